//! Conditional Weibull design: `Y | X = x` and `C | X = x` are Weibull with
//! cumulative hazards `y^(1/gamma_Y(x))` and `c^(1/gamma_C(x))`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `gamma_Y(x) = 0.5 (0.1 + sin(pi x)) (1.1 - 0.5 exp(-64 (x - 0.5)^2))`.
pub fn true_gamma(x: f64) -> f64 {
    0.5 * (0.1 + (PI * x).sin()) * (1.1 - 0.5 * (-64.0 * (x - 0.5).powi(2)).exp())
}

/// Quantile at survival level `p`: `(-log p)^gamma_Y(x)`.
pub fn true_quantile(survival_level: f64, x: f64) -> Result<f64> {
    if !(survival_level > 0.0 && survival_level < 1.0) {
        return Err(Error::InvalidLevel(survival_level));
    }
    Ok((-survival_level.ln()).powf(true_gamma(x)))
}

/// Inverse-transform Weibull draw `(-log u)^gamma` for `u` in `(0, 1)`.
#[inline]
pub fn weibull_inverse(u: f64, gamma: f64) -> f64 {
    (-u.ln()).powf(gamma)
}

/// How the censoring tail compares with the lifetime tail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CensorRelation {
    /// `gamma_Y < gamma_C`: censoring has the heavier tail.
    Lighter,
    /// `gamma_Y = gamma_C`.
    Equal,
    /// `gamma_Y > gamma_C`: censoring has the lighter tail.
    Heavier,
}

impl CensorRelation {
    pub fn default_ratio(self) -> f64 {
        match self {
            CensorRelation::Lighter => 1.5,
            CensorRelation::Equal => 1.0,
            CensorRelation::Heavier => 2.0 / 3.0,
        }
    }

    pub fn code(self) -> &'static str {
        match self {
            CensorRelation::Lighter => "lt",
            CensorRelation::Equal => "eq",
            CensorRelation::Heavier => "gt",
        }
    }
}

impl fmt::Display for CensorRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for CensorRelation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lt" | "lighter" => Ok(CensorRelation::Lighter),
            "eq" | "equal" => Ok(CensorRelation::Equal),
            "gt" | "heavier" => Ok(CensorRelation::Heavier),
            other => Err(Error::Config(format!("unknown scenario '{other}' (expected lt, eq or gt)"))),
        }
    }
}

/// Scenario with `gamma_C(x) = censor_ratio * gamma_Y(x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub relation: CensorRelation,
    pub censor_ratio: f64,
}

impl ScenarioSpec {
    pub fn new(relation: CensorRelation, censor_ratio: f64) -> Result<Self> {
        let consistent = match relation {
            CensorRelation::Lighter => censor_ratio > 1.0,
            CensorRelation::Equal => censor_ratio == 1.0,
            CensorRelation::Heavier => censor_ratio > 0.0 && censor_ratio < 1.0,
        };
        if !consistent || !censor_ratio.is_finite() {
            return Err(Error::Config(format!(
                "censor ratio {censor_ratio} is inconsistent with scenario {relation}"
            )));
        }
        Ok(ScenarioSpec { relation, censor_ratio })
    }

    pub fn standard(relation: CensorRelation) -> Self {
        ScenarioSpec { relation, censor_ratio: relation.default_ratio() }
    }

    pub fn gamma_y(&self, x: f64) -> f64 {
        true_gamma(x)
    }

    pub fn gamma_c(&self, x: f64) -> f64 {
        self.censor_ratio * true_gamma(x)
    }

    /// Tail coefficient of the observed `Z = min(Y, C)`.
    pub fn gamma_z(&self, x: f64) -> f64 {
        self.gamma_y(x).min(self.gamma_c(x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_reference_values() {
        assert!((true_gamma(0.5) - 0.33).abs() < 1e-15);
        // published four-decimal values are truncations, not roundings
        let truncated = |x: f64| (true_gamma(x) * 1e4).floor() / 1e4;
        for (x, t) in [(0.1, 0.2249), (0.2, 0.3777), (0.3, 0.4823), (0.4, 0.4395)] {
            assert!((truncated(x) - t).abs() < 1e-12, "x = {x}");
        }
        assert!((true_gamma(0.1) - 0.224956).abs() < 1e-6);
        assert!((true_gamma(0.3) - 0.482392).abs() < 1e-6);
        // symmetric about 0.5
        for x in [0.1, 0.23, 0.4] {
            assert!((true_gamma(x) - true_gamma(1.0 - x)).abs() < 1e-12);
        }
    }

    #[test]
    fn quantile_reference_values() {
        assert!((true_quantile((-1.0f64).exp(), 0.37).unwrap() - 1.0).abs() < 1e-15);
        assert!((true_quantile(0.999, 0.5).unwrap() - 0.1023).abs() < 2e-4);
        assert!((true_quantile(0.999, 0.1).unwrap() - 0.2114).abs() < 2e-4);
        assert!((true_quantile(0.999, 0.2).unwrap() - 0.0735).abs() < 2e-4);
        assert!((true_quantile(0.999, 0.3).unwrap() - 0.0357).abs() < 2e-4);
        assert!(true_quantile(1.0, 0.5).is_err());
        assert!(true_quantile(0.0, 0.5).is_err());
    }

    #[test]
    fn inverse_transform_at_e_inverse() {
        let u = (-1.0f64).exp();
        for g in [0.1, 0.33, 2.0] {
            assert!((weibull_inverse(u, g) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn scenario_consistency() {
        assert!(ScenarioSpec::new(CensorRelation::Lighter, 0.9).is_err());
        assert!(ScenarioSpec::new(CensorRelation::Equal, 1.1).is_err());
        assert!(ScenarioSpec::new(CensorRelation::Heavier, 1.5).is_err());
        let s = ScenarioSpec::standard(CensorRelation::Heavier);
        assert!((s.gamma_z(0.5) - s.gamma_c(0.5)).abs() < 1e-15);
        let s = ScenarioSpec::standard(CensorRelation::Lighter);
        assert_eq!(s.gamma_z(0.5), true_gamma(0.5));
        assert_eq!("gt".parse::<CensorRelation>().unwrap(), CensorRelation::Heavier);
    }
}
