//! Censored observations `(x, z, delta)`.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One observed triplet. `z = min(y, c)` and `delta` is true when the lifetime
/// itself was observed (`y <= c`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub x: f64,
    pub z: f64,
    pub delta: bool,
}

impl Observation {
    pub fn new(x: f64, z: f64, delta: bool) -> Result<Self> {
        if !x.is_finite() {
            return Err(Error::InvalidObservation(format!("covariate {x} is not finite")));
        }
        if !(z > 0.0 && z.is_finite()) {
            return Err(Error::InvalidObservation(format!(
                "observed time {z} must be positive and finite"
            )));
        }
        Ok(Observation { x, z, delta })
    }
}

/// Product-limit processing order: ascending `z`, uncensored before censored on ties.
pub(crate) fn event_order(a: &Observation, b: &Observation) -> Ordering {
    a.z.total_cmp(&b.z).then_with(|| b.delta.cmp(&a.delta))
}

/// A non-empty sample in its original order, with a cached index sorted by `z`.
#[derive(Debug, Clone, PartialEq)]
pub struct CensoredSample {
    observations: Vec<Observation>,
    by_z: Vec<usize>,
}

impl CensoredSample {
    pub fn new(observations: Vec<Observation>) -> Result<Self> {
        if observations.is_empty() {
            return Err(Error::EmptyInput);
        }
        for o in &observations {
            Observation::new(o.x, o.z, o.delta)?;
        }
        let mut by_z: Vec<usize> = (0..observations.len()).collect();
        by_z.sort_by(|&i, &j| event_order(&observations[i], &observations[j]).then(i.cmp(&j)));
        Ok(CensoredSample { observations, by_z })
    }

    /// Builds a sample from parallel columns.
    pub fn from_columns(x: &[f64], z: &[f64], delta: &[bool]) -> Result<Self> {
        if x.len() != z.len() || x.len() != delta.len() {
            return Err(Error::InvalidObservation(format!(
                "column lengths differ: x={}, z={}, delta={}",
                x.len(),
                z.len(),
                delta.len()
            )));
        }
        let obs = x
            .iter()
            .zip(z)
            .zip(delta)
            .map(|((&x, &z), &d)| Observation::new(x, z, d))
            .collect::<Result<Vec<_>>>()?;
        Self::new(obs)
    }

    /// Complete-data view: same covariates and times with every indicator forced to 1.
    pub fn uncensored(&self) -> Self {
        let observations: Vec<Observation> = self
            .observations
            .iter()
            .map(|o| Observation { delta: true, ..*o })
            .collect();
        let mut by_z: Vec<usize> = (0..observations.len()).collect();
        by_z.sort_by(|&i, &j| event_order(&observations[i], &observations[j]).then(i.cmp(&j)));
        CensoredSample { observations, by_z }
    }

    /// Multiplies every observed time by `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(
            self.observations
                .iter()
                .map(|o| Observation { z: o.z * c, ..*o })
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }

    pub fn observations(&self) -> &[Observation] {
        &self.observations
    }

    pub fn get(&self, i: usize) -> &Observation {
        &self.observations[i]
    }

    /// Indices into [`observations`](Self::observations) in product-limit order.
    pub fn sorted_index(&self) -> &[usize] {
        &self.by_z
    }

    pub fn iter_sorted(&self) -> impl DoubleEndedIterator<Item = &Observation> + ExactSizeIterator + '_ {
        self.by_z.iter().map(move |&i| &self.observations[i])
    }

    pub fn covariates(&self) -> impl Iterator<Item = f64> + '_ {
        self.observations.iter().map(|o| o.x)
    }

    pub fn uncensored_count(&self) -> usize {
        self.observations.iter().filter(|o| o.delta).count()
    }

    /// `max x - min x`.
    pub fn covariate_range(&self) -> f64 {
        let (lo, hi) = self
            .covariates()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| {
                (lo.min(x), hi.max(x))
            });
        hi - lo
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_observations() {
        assert!(Observation::new(0.0, 0.0, true).is_err());
        assert!(Observation::new(0.0, -1.0, true).is_err());
        assert!(Observation::new(f64::NAN, 1.0, true).is_err());
        assert!(Observation::new(0.0, f64::INFINITY, true).is_err());
        assert!(CensoredSample::new(vec![]).is_err());
    }

    #[test]
    fn sorted_index_puts_events_first_on_ties() {
        let s = CensoredSample::from_columns(
            &[0.0, 0.0, 0.0, 0.0],
            &[2.0, 1.0, 2.0, 0.5],
            &[false, true, true, false],
        )
        .unwrap();
        assert_eq!(s.sorted_index(), &[3, 1, 2, 0]);
        assert_eq!(s.get(0).z, 2.0);
    }

    #[test]
    fn uncensored_view_keeps_order() {
        let s = CensoredSample::from_columns(&[0.1, 0.2], &[3.0, 1.0], &[false, false]).unwrap();
        let u = s.uncensored();
        assert_eq!(u.uncensored_count(), 2);
        assert_eq!(u.get(0).z, 3.0);
        assert_eq!(u.sorted_index(), &[1, 0]);
    }

    #[test]
    fn column_length_mismatch() {
        assert!(CensoredSample::from_columns(&[0.0], &[1.0, 2.0], &[true]).is_err());
    }
}
