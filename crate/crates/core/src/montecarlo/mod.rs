//! Replicated simulation study under the conditional Weibull design.
//!
//! Every replication draws from its own ChaCha8 stream: the key is derived
//! from the master seed and the stream id is the replication index, so a
//! replication's sample does not depend on which other replications run, nor
//! on the thread that runs it. Within a replication, observation `i` consumes
//! three uniforms in the order `X_i, U_i, V_i`.

mod report;
mod scenario;

pub use report::{McCell, McMetadata, McReport, Quantity};
pub use scenario::{
    true_gamma, true_quantile, weibull_inverse, CensorRelation, ScenarioSpec,
};

use rand::distributions::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{Bandwidth, KernelSpec};
use crate::sample::{CensoredSample, Observation};
use crate::survival::HazardVariant;
use crate::tail::{weissman_from_estimate, ConditionalTail, TailVariant};
use crate::tuning::{cv_bandwidth, select_k, BandwidthGrid};

pub const GENERATOR: &str = "ChaCha8Rng(seed_from_u64(master_seed)), stream = replication index, draws per observation: X, U, V (Open01)";

/// Estimators compared in the study.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum McEstimator {
    /// Complete-data estimator on the (unobservable) lifetimes `Y`.
    YComplete,
    /// Complete-data estimator on `Z`, ignoring the censoring indicators.
    ZComplete,
    /// Censoring-adapted estimator on `(Z, delta)`.
    YCensored,
}

impl McEstimator {
    pub const ALL: [McEstimator; 3] = [McEstimator::YComplete, McEstimator::ZComplete, McEstimator::YCensored];

    pub fn name(self) -> &'static str {
        match self {
            McEstimator::YComplete => "y_complete",
            McEstimator::ZComplete => "z_complete",
            McEstimator::YCensored => "y_censored",
        }
    }
}

/// How `(h, k)` are set in each replication.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "mode")]
pub enum Tuning {
    Fixed { h: f64, k: usize },
    /// `h` by cross-validation once per replication, `k` per `(replication, x)`
    /// by the block rule. `grid = None` uses [`BandwidthGrid::default_for`].
    Auto { grid: Option<Vec<f64>> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    pub n: usize,
    pub reps: usize,
    pub seed: u64,
    pub x_grid: Vec<f64>,
    /// `p` for the quantile study, targeting `P(Y > q | x) = p`.
    pub survival_level: f64,
    pub kernel: KernelSpec,
    pub hazard_variant: HazardVariant,
    /// Variant used for the two complete-data estimators.
    pub complete_variant: TailVariant,
    pub estimators: Vec<McEstimator>,
    pub tuning: Tuning,
}

impl McConfig {
    pub fn new(n: usize, reps: usize, seed: u64) -> Self {
        McConfig {
            n,
            reps,
            seed,
            x_grid: (1..=9).map(|i| i as f64 / 10.0).collect(),
            survival_level: 1.0 - 1.0 / 1000.0,
            kernel: KernelSpec::Biquadratic,
            hazard_variant: HazardVariant::NegLogKm,
            complete_variant: TailVariant::CompleteHazard,
            estimators: McEstimator::ALL.to_vec(),
            tuning: Tuning::Auto { grid: None },
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 10 {
            return Err(Error::Config(format!("sample size must be at least 10, got {}", self.n)));
        }
        if self.reps < 1 {
            return Err(Error::Config("at least one replication is required".into()));
        }
        if self.x_grid.is_empty() || self.x_grid.iter().any(|x| !(0.0..=1.0).contains(x)) {
            return Err(Error::Config("x grid must be a nonempty subset of [0, 1]".into()));
        }
        if !(self.survival_level > 0.0 && self.survival_level < 1.0) {
            return Err(Error::Config(format!(
                "survival level must lie in (0, 1), got {}",
                self.survival_level
            )));
        }
        if self.estimators.is_empty() {
            return Err(Error::Config("no estimator selected".into()));
        }
        if !matches!(self.complete_variant, TailVariant::CompleteHazard | TailVariant::CompleteLiteral) {
            return Err(Error::Config("complete variant must be complete-hazard or complete-literal".into()));
        }
        match &self.tuning {
            Tuning::Fixed { h, k } => {
                Bandwidth::new(*h).map_err(|e| Error::Config(e.to_string()))?;
                if *k < 2 || *k >= self.n {
                    return Err(Error::Config(format!("fixed k = {k} must satisfy 2 <= k < n")));
                }
            }
            Tuning::Auto { grid: Some(g) } => {
                BandwidthGrid::new(g.clone())?;
            }
            Tuning::Auto { grid: None } => {}
        }
        Ok(())
    }
}

/// A simulated sample together with the latent lifetimes and censoring times.
#[derive(Debug, Clone)]
pub struct SimulatedSample {
    pub sample: CensoredSample,
    pub y: Vec<f64>,
    pub c: Vec<f64>,
}

impl SimulatedSample {
    /// Complete-data sample `(X, Y)`.
    pub fn lifetimes(&self) -> CensoredSample {
        let obs = self
            .sample
            .observations()
            .iter()
            .zip(&self.y)
            .map(|(o, &y)| Observation { x: o.x, z: y, delta: true })
            .collect();
        CensoredSample::new(obs).expect("lifetimes are positive")
    }

    pub fn censoring_fraction(&self) -> f64 {
        1.0 - self.sample.uncensored_count() as f64 / self.sample.len() as f64
    }
}

fn replication_rng(seed: u64, rep: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(rep);
    rng
}

/// Draws replication `rep` of size `n` under `scenario`.
pub fn gen_sample(n: usize, scenario: &ScenarioSpec, seed: u64, rep: u64) -> SimulatedSample {
    let mut rng = replication_rng(seed, rep);
    let mut obs = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    let mut c = Vec::with_capacity(n);
    for _ in 0..n {
        let x: f64 = rng.sample(Open01);
        let u: f64 = rng.sample(Open01);
        let v: f64 = rng.sample(Open01);
        // tiny exponents can underflow to 0; keep times strictly positive
        let yi = weibull_inverse(u, scenario.gamma_y(x)).max(f64::MIN_POSITIVE);
        let ci = weibull_inverse(v, scenario.gamma_c(x)).max(f64::MIN_POSITIVE);
        obs.push(Observation { x, z: yi.min(ci), delta: yi <= ci });
        y.push(yi);
        c.push(ci);
    }
    SimulatedSample {
        sample: CensoredSample::new(obs).expect("simulated times are positive"),
        y,
        c,
    }
}

/// `(mse, mae)` of `estimates` against `truth`.
pub fn error_metrics(estimates: &[f64], truth: f64) -> Result<(f64, f64)> {
    if estimates.is_empty() {
        return Err(Error::EmptyInput);
    }
    let n = estimates.len() as f64;
    let mse = estimates.iter().map(|e| (e - truth) * (e - truth)).sum::<f64>() / n;
    let mae = estimates.iter().map(|e| (e - truth).abs()).sum::<f64>() / n;
    Ok((mse, mae))
}

/// Outcome of one estimator at one covariate value in one replication.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointOutcome {
    pub k: Option<usize>,
    pub gamma: Option<f64>,
    pub quantile: Option<f64>,
}

/// Everything one replication produced, `outcomes[x][estimator]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicationOutcome {
    pub rep: usize,
    pub h: Option<f64>,
    pub censoring_fraction: f64,
    pub outcomes: Vec<Vec<PointOutcome>>,
}

fn estimate_point(
    sample: &CensoredSample,
    x: f64,
    h: Bandwidth,
    variant: TailVariant,
    k: usize,
    config: &McConfig,
) -> PointOutcome {
    let failed = PointOutcome { k: Some(k), gamma: None, quantile: None };
    let Ok(tail) = ConditionalTail::new(sample, x, h, config.kernel, config.hazard_variant) else {
        return failed;
    };
    match tail.estimate(k, variant) {
        Ok(est) => PointOutcome {
            k: Some(k),
            gamma: Some(est.gamma_hat),
            quantile: weissman_from_estimate(config.survival_level, &est)
                .ok()
                .map(|q| q.q_hat)
                .filter(|q| q.is_finite()),
        },
        Err(_) => failed,
    }
}

/// Block-rule `k` from the censored estimator's sweep at `x`.
fn censored_k(sample: &CensoredSample, x: f64, h: Bandwidth, config: &McConfig) -> Option<usize> {
    let tail = ConditionalTail::new(sample, x, h, config.kernel, config.hazard_variant).ok()?;
    Some(select_k(&tail.sweep(TailVariant::Censored)).chosen_k)
}

/// Runs replication `rep` of the study.
pub fn run_replication(config: &McConfig, scenario: &ScenarioSpec, rep: usize) -> ReplicationOutcome {
    let sim = gen_sample(config.n, scenario, config.seed, rep as u64);
    let lifetimes = sim.lifetimes();
    let observed_complete = sim.sample.uncensored();

    let (h, fixed_k) = match &config.tuning {
        Tuning::Fixed { h, k } => (Bandwidth::new(*h).ok(), Some(*k)),
        Tuning::Auto { grid } => {
            let grid = match grid {
                Some(g) => BandwidthGrid::new(g.clone()).ok(),
                None => BandwidthGrid::default_for(&sim.sample).ok(),
            };
            (grid.map(|g| cv_bandwidth(&sim.sample, &g, config.kernel)), None)
        }
    };

    let outcomes = config
        .x_grid
        .iter()
        .map(|&x| {
            let none = PointOutcome { k: None, gamma: None, quantile: None };
            let Some(h) = h else {
                return vec![none; config.estimators.len()];
            };
            // one k per (replication, x), shared by every estimator
            let Some(k) = fixed_k.or_else(|| censored_k(&sim.sample, x, h, config)) else {
                return vec![none; config.estimators.len()];
            };
            config
                .estimators
                .iter()
                .map(|&est| {
                    let (data, variant) = match est {
                        McEstimator::YComplete => (&lifetimes, config.complete_variant),
                        McEstimator::ZComplete => (&observed_complete, config.complete_variant),
                        McEstimator::YCensored => (&sim.sample, TailVariant::Censored),
                    };
                    estimate_point(data, x, h, variant, k, config)
                })
                .collect()
        })
        .collect();

    ReplicationOutcome {
        rep,
        h: h.map(|b| b.get()),
        censoring_fraction: sim.censoring_fraction(),
        outcomes,
    }
}

/// Runs every replication (in parallel on the current rayon pool) and reduces
/// them in replication-index order.
pub fn run_monte_carlo(config: &McConfig, scenario: &ScenarioSpec) -> Result<McReport> {
    config.validate()?;
    let reps: Vec<ReplicationOutcome> = (0..config.reps)
        .into_par_iter()
        .map(|r| run_replication(config, scenario, r))
        .collect();
    Ok(McReport::aggregate(config, scenario, &reps))
}
