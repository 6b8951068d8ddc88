//! Bandwidth selection by leave-one-out cross-validation and threshold-count
//! selection by the block minimal-standard-deviation rule.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{Bandwidth, KernelSpec};
use crate::sample::CensoredSample;

/// Candidate bandwidths, nonempty and strictly increasing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandwidthGrid {
    candidates: Vec<f64>,
}

impl BandwidthGrid {
    pub fn new(candidates: Vec<f64>) -> Result<Self> {
        if candidates.is_empty() {
            return Err(Error::Config("bandwidth grid is empty".into()));
        }
        if candidates.iter().any(|&h| !(h > 0.0 && h.is_finite())) {
            return Err(Error::Config("bandwidth candidates must be positive and finite".into()));
        }
        if candidates.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("bandwidth grid must be strictly increasing".into()));
        }
        Ok(BandwidthGrid { candidates })
    }

    /// `count` geometrically spaced values from `lo` to `hi` inclusive.
    pub fn geometric(lo: f64, hi: f64, count: usize) -> Result<Self> {
        if count == 0 || !(lo > 0.0) || !(hi >= lo) {
            return Err(Error::Config(format!("invalid geometric grid [{lo}, {hi}] x {count}")));
        }
        if count == 1 || hi == lo {
            return Self::new(vec![lo]);
        }
        let ratio = (hi / lo).ln() / (count - 1) as f64;
        let mut c: Vec<f64> = (0..count).map(|i| lo * (ratio * i as f64).exp()).collect();
        c[count - 1] = hi;
        Self::new(c)
    }

    /// 20 geometric candidates from `range / 20` to `2 * range` of the covariate.
    pub fn default_for(sample: &CensoredSample) -> Result<Self> {
        let range = sample.covariate_range();
        if !(range > 0.0) {
            return Err(Error::Config(
                "covariate is constant; supply an explicit bandwidth".into(),
            ));
        }
        Self::geometric(range / 20.0, 2.0 * range, 20)
    }

    pub fn candidates(&self) -> &[f64] {
        &self.candidates
    }
}

/// Leave-one-out criterion
/// `sum_i sum_j ( 1{Z_i > Z_j} - S_{-i}(Z_j | x_i) )^2`
/// where `S_{-i}` is the kernel conditional Kaplan-Meier survival built without
/// observation `i`. An empty leave-one-out neighborhood contributes with `S = 1`.
pub fn cv_score(sample: &CensoredSample, h: Bandwidth, kernel: KernelSpec) -> f64 {
    let n = sample.len();
    let order = sample.sorted_index();
    let obs = sample.observations();
    let z_sorted: Vec<f64> = order.iter().map(|&i| obs[i].z).collect();
    let hv = h.get();

    let mut total = 0.0;
    let mut kv = vec![0.0; n];
    let mut surv_at = vec![1.0; n];
    for i in 0..n {
        let xi = obs[i].x;
        let zi = obs[i].z;
        let mut mass = 0.0;
        for (r, &j) in order.iter().enumerate() {
            kv[r] = if j == i { 0.0 } else { kernel.eval((xi - obs[j].x) / hv) };
            mass += kv[r];
        }
        if mass > 0.0 {
            loo_survival(&z_sorted, order, obs, &kv, &mut surv_at);
        } else {
            surv_at.fill(1.0);
        }
        for r in 0..n {
            let ind = if zi > z_sorted[r] { 1.0 } else { 0.0 };
            let d = ind - surv_at[r];
            total += d * d;
        }
    }
    total
}

/// Product-limit survival evaluated at each sorted observation, from unnormalized
/// weights `kv` in sorted order.
fn loo_survival(
    z_sorted: &[f64],
    order: &[usize],
    obs: &[crate::sample::Observation],
    kv: &[f64],
    out: &mut [f64],
) {
    let n = z_sorted.len();
    // at-risk mass, accumulated from the top over the distinct times
    let mut at_risk = vec![0.0; n];
    let mut acc = 0.0;
    let mut r = n;
    while r > 0 {
        let end = r;
        let t = z_sorted[r - 1];
        while r > 0 && z_sorted[r - 1] == t {
            r -= 1;
            acc += kv[r];
        }
        for a in &mut at_risk[r..end] {
            *a = acc;
        }
    }
    let mut surv = 1.0;
    let mut r = 0;
    while r < n {
        let start = r;
        let t = z_sorted[r];
        let mut events = 0.0;
        while r < n && z_sorted[r] == t {
            if obs[order[r]].delta {
                events += kv[r];
            }
            r += 1;
        }
        if events > 0.0 {
            let ratio = events / at_risk[start];
            surv *= if ratio >= 1.0 { 0.0 } else { 1.0 - ratio };
        }
        out[start..r].fill(surv);
    }
}

/// Grid candidate minimizing [`cv_score`]; ties go to the smallest bandwidth.
pub fn cv_bandwidth(sample: &CensoredSample, grid: &BandwidthGrid, kernel: KernelSpec) -> Bandwidth {
    cv_bandwidth_traced(sample, grid, kernel).0
}

/// Like [`cv_bandwidth`], also returning the score of every candidate.
pub fn cv_bandwidth_traced(
    sample: &CensoredSample,
    grid: &BandwidthGrid,
    kernel: KernelSpec,
) -> (Bandwidth, Vec<f64>) {
    let scores: Vec<f64> = grid
        .candidates()
        .par_iter()
        .map(|&h| cv_score(sample, Bandwidth::new(h).expect("grid holds positive values"), kernel))
        .collect();
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate() {
        if s < scores[best] {
            best = i;
        }
    }
    (
        Bandwidth::new(grid.candidates()[best]).expect("grid holds positive values"),
        scores,
    )
}

/// Block of ten consecutive `k` values and the spread of its estimates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KBlock {
    pub first_k: usize,
    pub last_k: usize,
    pub present: usize,
    /// Sample standard deviation; `None` when the block is disqualified.
    pub sd: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KSelectionTrace {
    /// `(k, gamma_hat_k)` for `k = 1..K`; failed evaluations are `None`.
    pub per_k_estimates: Vec<(usize, Option<f64>)>,
    pub blocks: Vec<KBlock>,
    pub chosen_k: usize,
}

pub const K_BLOCK: usize = 10;

/// Sample standard deviation (divisor `n - 1`).
pub(crate) fn sample_sd(values: &[f64]) -> Option<f64> {
    if values.len() < 2 {
        return None;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    Some((ss / (n - 1.0)).sqrt())
}

/// Chooses `k*` from estimates indexed by `k = 1..K` (`estimates[0]` is `k = 1`).
///
/// Full blocks `{1..10}, {11..20}, ...` compete; when `K < 10` the single
/// partial block does. A block with more than half of its entries missing, or
/// fewer than two present, is disqualified. The winner has the smallest sample
/// standard deviation (earliest block on ties) and `k*` is the lower middle of
/// its range. If every block is disqualified the first block is used.
pub fn select_k(estimates: &[Option<f64>]) -> KSelectionTrace {
    let big_k = estimates.len();
    let ranges: Vec<(usize, usize)> = if big_k < K_BLOCK {
        vec![(1, big_k.max(1))]
    } else {
        (0..big_k / K_BLOCK)
            .map(|b| (b * K_BLOCK + 1, (b + 1) * K_BLOCK))
            .collect()
    };
    let blocks: Vec<KBlock> = ranges
        .iter()
        .map(|&(first, last)| {
            let vals: Vec<f64> = estimates
                .get(first - 1..last.min(big_k))
                .unwrap_or(&[])
                .iter()
                .filter_map(|v| v.filter(|g| g.is_finite()))
                .collect();
            let size = last - first + 1;
            let sd = if 2 * vals.len() >= size { sample_sd(&vals) } else { None };
            KBlock { first_k: first, last_k: last, present: vals.len(), sd }
        })
        .collect();
    let mut winner: Option<usize> = None;
    for (b, blk) in blocks.iter().enumerate() {
        if let Some(sd) = blk.sd {
            if winner.is_none_or(|w| sd < blocks[w].sd.unwrap()) {
                winner = Some(b);
            }
        }
    }
    let blk = &blocks[winner.unwrap_or(0)];
    KSelectionTrace {
        per_k_estimates: estimates.iter().enumerate().map(|(i, v)| (i + 1, *v)).collect(),
        chosen_k: (blk.first_k + blk.last_k) / 2,
        blocks,
    }
}
