//! Brute-force reference implementations, written directly from the defining
//! sums over the unsorted data. They share no code with the library beyond
//! the kernel formulas, which are re-typed here.

#![allow(dead_code, clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

use proptest::prelude::*;
use proptest::strategy::ValueTree;
use proptest::test_runner::{Config, TestRng, TestRunner};

pub fn kernel(name: &str, u: f64) -> f64 {
    if !(-1.0..=1.0).contains(&u) {
        return 0.0;
    }
    match name {
        "asymmetric-linear" => 1.9 - 1.8 * u,
        "biquadratic" => 15.0 / 16.0 * (1.0 - u * u) * (1.0 - u * u),
        _ => unreachable!(),
    }
}

/// Nadaraya-Watson weights; `h = inf` gives equal weights.
pub fn weights(kern: &str, x: f64, xs: &[f64], h: f64) -> Vec<f64> {
    let raw: Vec<f64> = xs
        .iter()
        .map(|&xi| if h.is_infinite() { kernel(kern, 0.0) } else { kernel(kern, (x - xi) / h) })
        .collect();
    let total: f64 = raw.iter().sum();
    raw.iter().map(|r| r / total).collect()
}

/// Cumulative hazard at `y`: over distinct uncensored times `s <= y`,
/// Nelson-Aalen sums `dH1(s) / R(s)` and the product-limit form takes
/// `-log prod (1 - dH1(s) / R(s))`, where `R(s) = sum_i w_i 1{Z_i >= s}`.
pub fn hazard(z: &[f64], d: &[bool], w: &[f64], y: f64, nelson_aalen: bool) -> f64 {
    let mut times: Vec<f64> = (0..z.len()).filter(|&i| d[i] && w[i] > 0.0 && z[i] <= y).map(|i| z[i]).collect();
    times.sort_by(f64::total_cmp);
    times.dedup();
    let mut na = 0.0;
    let mut surv = 1.0;
    for &s in &times {
        let mut jump = 0.0;
        let mut risk = 0.0;
        for i in 0..z.len() {
            if z[i] == s && d[i] {
                jump += w[i];
            }
            if z[i] >= s {
                risk += w[i];
            }
        }
        let ratio = jump / risk;
        na += ratio;
        surv *= if ratio >= 1.0 - 1e-12 { 0.0 } else { 1.0 - ratio };
    }
    if nelson_aalen {
        na
    } else if surv == 0.0 {
        f64::INFINITY
    } else {
        -surv.ln()
    }
}

/// Order-statistic estimator on the top `k` of `data`.
pub fn gamma_uncond(data: &[f64], k: usize) -> f64 {
    let mut s = data.to_vec();
    s.sort_by(|a, b| b.total_cmp(a)); // descending: s[i-1] = Y_{n-i+1,n}
    let n = s.len() as f64;
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 1..=k {
        num += s[i - 1].ln() - s[k - 1].ln();
        den += (n / i as f64).ln().ln() - (n / k as f64).ln().ln();
    }
    num / den
}

pub struct Oracle {
    pub gamma: f64,
    pub y_n: f64,
    pub lambda_y: f64,
}

/// `(k+1)`-th largest z among positive weights.
pub fn threshold(z: &[f64], w: &[f64], k: usize) -> f64 {
    let mut zs: Vec<f64> = (0..z.len()).filter(|&i| w[i] > 0.0).map(|i| z[i]).collect();
    zs.sort_by(|a, b| b.total_cmp(a));
    zs[k]
}

/// Hazard-based estimator; `force_complete` treats every observation as an event.
/// `None` where the library must report an error.
pub fn gamma_hazard(
    z: &[f64],
    d: &[bool],
    w: &[f64],
    k: usize,
    nelson_aalen: bool,
    force_complete: bool,
) -> Option<Oracle> {
    let d: Vec<bool> = if force_complete { vec![true; z.len()] } else { d.to_vec() };
    let y_n = threshold(z, w, k);
    let lambda_y = hazard(z, &d, w, y_n, nelson_aalen);
    if !(lambda_y > 0.0) {
        return None;
    }
    let mut num = 0.0;
    let mut den = 0.0;
    let mut used = 0;
    for i in 0..z.len() {
        if w[i] > 0.0 && z[i] > y_n {
            let l = hazard(z, &d, w, z[i], nelson_aalen);
            if l.is_infinite() {
                continue;
            }
            num += w[i] * (z[i].ln() - y_n.ln());
            den += w[i] * (l.ln() - lambda_y.ln());
            used += 1;
        }
    }
    if used == 0 || !(den > 0.0) {
        return None;
    }
    Some(Oracle { gamma: num / den, y_n, lambda_y })
}

/// Rank-based reading of the complete-data estimator.
pub fn gamma_literal(z: &[f64], w: &[f64], k: usize) -> Option<Oracle> {
    let y_n = threshold(z, w, k);
    let m = w.iter().filter(|&&v| v > 0.0).count() as f64;
    let mut exc: Vec<usize> = (0..z.len()).filter(|&i| w[i] > 0.0 && z[i] > y_n).collect();
    exc.sort_by(|&a, &b| z[b].total_cmp(&z[a]));
    let mut num = 0.0;
    let mut den = 0.0;
    for (r, &i) in exc.iter().enumerate() {
        let rank = (r + 1) as f64;
        num += w[i] * (z[i].ln() - y_n.ln());
        den += w[i] * ((m / rank).ln().ln() - (m / k as f64).ln().ln());
    }
    if exc.is_empty() || !(den > 0.0) {
        return None;
    }
    let lambda_y = hazard(z, &vec![true; z.len()], w, y_n, false);
    Some(Oracle { gamma: num / den, y_n, lambda_y })
}

pub fn weissman(p: f64, o: &Oracle) -> f64 {
    o.y_n * ((-p.ln()) / o.lambda_y).powf(o.gamma)
}

/// One random conditional instance.
#[derive(Debug, Clone)]
pub struct Instance {
    pub x: Vec<f64>,
    pub z: Vec<f64>,
    pub d: Vec<bool>,
    pub at: f64,
    pub h: f64,
    pub kernel: &'static str,
    pub nelson_aalen: bool,
    pub k_frac: f64,
}

pub fn instance_strategy(max_n: usize) -> impl Strategy<Value = Instance> {
    (4..=max_n)
        .prop_flat_map(|n| {
            (
                prop::collection::vec(0.0..1.0f64, n),
                prop::collection::vec(0.01..50.0f64, n),
                prop::collection::vec(prop::bool::weighted(0.7), n),
                0.0..1.0f64,
                prop_oneof![3 => 0.3..3.0f64, 1 => Just(f64::INFINITY)],
                prop_oneof![Just("asymmetric-linear"), Just("biquadratic")],
                any::<bool>(),
                0.0..1.0f64,
            )
        })
        .prop_map(|(x, z, d, at, h, kernel, nelson_aalen, k_frac)| Instance { x, z, d, at, h, kernel, nelson_aalen, k_frac })
}

/// Draws `count` instances with at least three positive weights, deterministically.
pub fn instances(count: usize, max_n: usize, seed: u8) -> Vec<Instance> {
    let mut runner = TestRunner::new_with_rng(Config::default(), TestRng::from_seed(Default::default(), &[seed; 32]));
    let strat = instance_strategy(max_n);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let inst = strat.new_tree(&mut runner).unwrap().current();
        let w = weights(inst.kernel, inst.at, &inst.x, inst.h);
        if w.iter().all(|v| v.is_finite()) && w.iter().filter(|&&v| v > 0.0).count() >= 3 {
            out.push(inst);
        }
    }
    out
}

impl Instance {
    pub fn weights(&self) -> Vec<f64> {
        weights(self.kernel, self.at, &self.x, self.h)
    }

    /// A threshold count in `2..m` for `m` positive weights.
    pub fn k(&self) -> usize {
        let m = self.weights().iter().filter(|&&v| v > 0.0).count();
        2 + ((m - 2) as f64 * self.k_frac).floor().min((m - 3) as f64) as usize
    }
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}
