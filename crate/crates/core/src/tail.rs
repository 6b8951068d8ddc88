//! Weibull-tail coefficient estimators and the Weissman-type extreme quantile.
//!
//! Conventions shared by the conditional estimators:
//!
//! * only observations with positive kernel weight at `x` take part; call their
//!   count `m`;
//! * for a threshold count `k` (`2 <= k < m`) the threshold `y_n` is the
//!   `(k+1)`-th largest of those observed times, and the exceedances are the
//!   weighted observations with `z > y_n` strictly (fewer than `k` on ties);
//! * an exceedance whose estimated hazard is `+inf` (uncensored maximum under
//!   the `-log KM` hazard) is dropped from both sums and counted in
//!   [`TailEstimate::excluded_infinite`].

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{Bandwidth, KernelSpec};
use crate::sample::CensoredSample;
use crate::survival::{event_table, HazardVariant};
use crate::weights::nw_weights;

/// Which estimator produced a [`TailEstimate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TailVariant {
    /// Order-statistic estimator without covariate.
    Unconditional,
    /// Kernel-weighted numerator over a rank-based `log log` denominator.
    CompleteLiteral,
    /// Hazard-based estimator with every observation treated as uncensored.
    CompleteHazard,
    /// Hazard-based estimator with the conditional Kaplan-Meier / Beran hazard.
    Censored,
}

impl TailVariant {
    pub fn name(self) -> &'static str {
        match self {
            TailVariant::Unconditional => "uncond",
            TailVariant::CompleteLiteral => "complete-literal",
            TailVariant::CompleteHazard => "complete-hazard",
            TailVariant::Censored => "censored",
        }
    }
}

impl fmt::Display for TailVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TailVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uncond" | "unconditional" => Ok(TailVariant::Unconditional),
            "complete-literal" | "literal" => Ok(TailVariant::CompleteLiteral),
            "complete-hazard" | "complete" => Ok(TailVariant::CompleteHazard),
            "censored" => Ok(TailVariant::Censored),
            other => Err(Error::Config(format!("unknown estimator variant '{other}'"))),
        }
    }
}

/// Result of a tail coefficient estimation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailEstimate {
    pub gamma_hat: f64,
    /// Requested threshold count.
    pub k: usize,
    /// Threshold value.
    pub y_n: f64,
    /// Bandwidth, `None` for the unconditional estimator.
    pub h: Option<f64>,
    pub variant: TailVariant,
    /// Exceedances that entered the sums.
    pub n_exceedances: usize,
    /// Estimated cumulative hazard at `y_n` (hazard variants and complete-literal).
    pub hazard_at_threshold: Option<f64>,
    /// Exceedances dropped because their hazard estimate is infinite.
    pub excluded_infinite: usize,
    /// Set when the numerator vanished and `gamma_hat` was reported as 0.
    pub degenerate: bool,
}

/// Result of [`weissman_quantile`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantileEstimate {
    pub q_hat: f64,
    /// `p` such that the estimate targets `P(Y > q | x) = p`.
    pub survival_level: f64,
    /// The level exactly as supplied by the caller.
    pub alpha_input: f64,
    pub anchor: QuantileAnchor,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantileAnchor {
    pub y_n: f64,
    pub hazard_at_threshold: f64,
    pub gamma_hat: f64,
}

#[inline]
fn log_log(v: f64) -> f64 {
    v.ln().ln()
}

/// Order-statistic Weibull-tail estimator
/// `sum_{i<=k} [log Y_(n-i+1) - log Y_(n-k+1)] / sum_{i<=k} [loglog(n/i) - loglog(n/k)]`.
///
/// `data` need not be sorted. A vanishing numerator (all top-`k` values equal)
/// yields `gamma_hat = 0` with the `degenerate` flag set.
pub fn gamma_unconditional(data: &[f64], k: usize) -> Result<TailEstimate> {
    let n = data.len();
    if k < 2 || k >= n {
        return Err(Error::InvalidK { k, available: n });
    }
    if data.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
        return Err(Error::NonPositiveData);
    }
    let mut sorted = data.to_vec();
    sorted.sort_by(f64::total_cmp);
    let anchor = sorted[n - k];
    let log_anchor = anchor.ln();
    let num: f64 = sorted[n - k..].iter().map(|v| v.ln() - log_anchor).sum();
    let nf = n as f64;
    let base = log_log(nf / k as f64);
    let den: f64 = (1..=k).map(|i| log_log(nf / i as f64) - base).sum();
    let degenerate = num == 0.0;
    Ok(TailEstimate {
        gamma_hat: if degenerate { 0.0 } else { num / den },
        k,
        y_n: anchor,
        h: None,
        variant: TailVariant::Unconditional,
        n_exceedances: k,
        hazard_at_threshold: None,
        excluded_infinite: 0,
        degenerate,
    })
}

/// Positive-weight observations at a covariate value, sorted by observed time,
/// with the estimated cumulative hazard at each of them.
///
/// Building it costs one sort; every threshold count `k` is then evaluated in
/// `O(k)`, which is what the threshold selection sweeps rely on.
#[derive(Debug, Clone)]
pub struct ConditionalTail {
    h: Option<f64>,
    z: Vec<f64>,
    w: Vec<f64>,
    /// Hazard from the sample's own censoring indicators.
    hazard: Vec<f64>,
    /// Hazard with every indicator forced to 1.
    hazard_complete: Vec<f64>,
}

impl ConditionalTail {
    /// Kernel weights at `x`.
    pub fn new(
        sample: &CensoredSample,
        x: f64,
        h: Bandwidth,
        kernel: KernelSpec,
        hazard_variant: HazardVariant,
    ) -> Result<Self> {
        let w = nw_weights(x, sample, h, kernel)?;
        Ok(Self::with_weights(sample, &w, Some(h.get()), hazard_variant))
    }

    /// Explicit weights aligned with the sample's original order; zero weights drop out.
    pub fn with_weights(
        sample: &CensoredSample,
        weights: &[f64],
        h: Option<f64>,
        hazard_variant: HazardVariant,
    ) -> Self {
        assert_eq!(weights.len(), sample.len(), "one weight per observation");
        let order: Vec<usize> = sample
            .sorted_index()
            .iter()
            .copied()
            .filter(|&i| weights[i] > 0.0)
            .collect();
        let z: Vec<f64> = order.iter().map(|&i| sample.get(i).z).collect();
        let w: Vec<f64> = order.iter().map(|&i| weights[i]).collect();
        let hazard = per_position_hazard(
            &z,
            order.iter().map(|&i| (sample.get(i).z, sample.get(i).delta, weights[i])),
            hazard_variant,
        );
        let hazard_complete = per_position_hazard(
            &z,
            order.iter().map(|&i| (sample.get(i).z, true, weights[i])),
            hazard_variant,
        );
        ConditionalTail { h, z, w, hazard, hazard_complete }
    }

    /// Number of positive-weight observations.
    pub fn len(&self) -> usize {
        self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z.is_empty()
    }

    /// Observed times in ascending order.
    pub fn times(&self) -> &[f64] {
        &self.z
    }

    /// `(k+1)`-th largest weighted observed time, `1 <= k < m`.
    pub fn threshold(&self, k: usize) -> Result<f64> {
        let m = self.len();
        if k == 0 || k >= m {
            return Err(Error::InvalidK { k, available: m });
        }
        Ok(self.z[m - 1 - k])
    }

    /// Index of the first observation strictly above the threshold.
    fn exceedance_start(&self, y_n: f64) -> usize {
        self.z.partition_point(|&v| v <= y_n)
    }

    pub fn estimate(&self, k: usize, variant: TailVariant) -> Result<TailEstimate> {
        let m = self.len();
        if k < 2 || k >= m {
            return Err(Error::InvalidK { k, available: m });
        }
        let pos = m - 1 - k;
        let y_n = self.z[pos];
        let start = self.exceedance_start(y_n);
        let log_y = y_n.ln();
        let hazard = match variant {
            TailVariant::Censored => &self.hazard,
            TailVariant::CompleteHazard | TailVariant::CompleteLiteral => &self.hazard_complete,
            TailVariant::Unconditional => {
                return Err(Error::Config(
                    "the unconditional estimator has no kernel form".into(),
                ))
            }
        };
        let lambda_y = hazard[pos];

        let (num, den, used, excluded) = match variant {
            TailVariant::CompleteLiteral => {
                let mf = m as f64;
                let base = log_log(mf / k as f64);
                let mut num = 0.0;
                let mut den = 0.0;
                // rank 1 is the largest exceedance
                for (rank, j) in (start..m).rev().enumerate() {
                    let i = (rank + 1) as f64;
                    num += self.w[j] * (self.z[j].ln() - log_y);
                    den += self.w[j] * (log_log(mf / i) - base);
                }
                (num, den, m - start, 0)
            }
            _ => {
                if !(lambda_y > 0.0) {
                    return Err(Error::ZeroHazardAtThreshold);
                }
                let log_l = lambda_y.ln();
                let mut num = 0.0;
                let mut den = 0.0;
                let mut used = 0;
                let mut excluded = 0;
                for ((&l, &w), &z) in hazard[start..m].iter().zip(&self.w[start..m]).zip(&self.z[start..m]) {
                    if !l.is_finite() {
                        excluded += 1;
                        continue;
                    }
                    num += w * (z.ln() - log_y);
                    den += w * (l.ln() - log_l);
                    used += 1;
                }
                (num, den, used, excluded)
            }
        };
        if used == 0 || !(den > 0.0) {
            return Err(Error::ZeroDenominator);
        }
        debug_assert!(num >= 0.0);
        let degenerate = num == 0.0;
        Ok(TailEstimate {
            gamma_hat: if degenerate { 0.0 } else { num / den },
            k,
            y_n,
            h: self.h,
            variant,
            n_exceedances: used,
            hazard_at_threshold: Some(lambda_y),
            excluded_infinite: excluded,
            degenerate,
        })
    }

    /// `gamma_hat` for every `k = 1..m-1`; failures (including `k = 1`) are `None`.
    pub fn sweep(&self, variant: TailVariant) -> Vec<Option<f64>> {
        (1..self.len())
            .map(|k| self.estimate(k, variant).ok().map(|e| e.gamma_hat))
            .collect()
    }
}

fn per_position_hazard<I>(z: &[f64], triples: I, variant: HazardVariant) -> Vec<f64>
where
    I: IntoIterator<Item = (f64, bool, f64)>,
{
    let rows = event_table(triples);
    let mut out = Vec::with_capacity(z.len());
    let mut r = 0;
    for &t in z {
        while rows[r].time < t {
            r += 1;
        }
        out.push(rows[r].hazard(variant));
    }
    out
}

/// Kernel-weighted conditional tail coefficient at `x`.
#[allow(clippy::too_many_arguments)]
pub fn gamma_conditional(
    sample: &CensoredSample,
    x: f64,
    h: Bandwidth,
    kernel: KernelSpec,
    k: usize,
    variant: TailVariant,
    hazard_variant: HazardVariant,
) -> Result<TailEstimate> {
    ConditionalTail::new(sample, x, h, kernel, hazard_variant)?.estimate(k, variant)
}

/// `(k+1)`-th largest observed time among the observations weighted at `x`.
pub fn threshold_from_k(
    sample: &CensoredSample,
    x: f64,
    h: Bandwidth,
    kernel: KernelSpec,
    k: usize,
) -> Result<f64> {
    ConditionalTail::new(sample, x, h, kernel, HazardVariant::default())?.threshold(k)
}

/// `q = y_n [ -log(p) / Lambda(y_n|x) ]^gamma_hat`.
pub fn weissman_quantile(
    survival_level: f64,
    tail: &TailEstimate,
    hazard_at_threshold: f64,
) -> Result<QuantileEstimate> {
    if !(survival_level > 0.0 && survival_level < 1.0) {
        return Err(Error::InvalidLevel(survival_level));
    }
    if !(hazard_at_threshold > 0.0 && hazard_at_threshold.is_finite()) {
        return Err(Error::ZeroHazardAtThreshold);
    }
    let ratio = -survival_level.ln() / hazard_at_threshold;
    Ok(QuantileEstimate {
        q_hat: tail.y_n * ratio.powf(tail.gamma_hat),
        survival_level,
        alpha_input: survival_level,
        anchor: QuantileAnchor {
            y_n: tail.y_n,
            hazard_at_threshold,
            gamma_hat: tail.gamma_hat,
        },
    })
}

/// [`weissman_quantile`] anchored at the estimate's own threshold hazard.
pub fn weissman_from_estimate(survival_level: f64, tail: &TailEstimate) -> Result<QuantileEstimate> {
    let lambda = tail.hazard_at_threshold.ok_or(Error::ZeroHazardAtThreshold)?;
    weissman_quantile(survival_level, tail, lambda)
}
