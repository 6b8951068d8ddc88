use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{
    error_metrics, true_gamma, true_quantile, McConfig, McEstimator, ReplicationOutcome,
    ScenarioSpec, GENERATOR,
};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Quantity {
    Gamma,
    Quantile,
}

impl Quantity {
    pub fn name(self) -> &'static str {
        match self {
            Quantity::Gamma => "gamma",
            Quantity::Quantile => "quantile",
        }
    }
}

/// Aggregated errors of one estimator for one quantity at one covariate value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McCell {
    pub scenario: String,
    pub n: usize,
    pub x: f64,
    pub estimator: McEstimator,
    pub quantity: Quantity,
    pub truth: f64,
    /// `None` when every replication failed.
    pub mse: Option<f64>,
    pub mae: Option<f64>,
    pub mean: Option<f64>,
    pub reps_used: usize,
    pub reps_failed: usize,
    pub mean_k: Option<f64>,
}

impl McCell {
    /// `<quantity>_<estimator>`, e.g. `gamma_y_censored`.
    pub fn label(&self) -> String {
        format!("{}_{}", self.quantity.name(), self.estimator.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McMetadata {
    pub config: McConfig,
    pub scenario: ScenarioSpec,
    pub generator: String,
    pub version: String,
    pub mean_bandwidth: Option<f64>,
    pub mean_censoring_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McReport {
    pub metadata: McMetadata,
    pub cells: Vec<McCell>,
}

fn mean(values: &[f64]) -> Option<f64> {
    (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64)
}

pub const CSV_HEADER: [&str; 10] = [
    "scenario", "n", "x", "estimator", "truth", "mse", "mae", "mean", "reps_used", "reps_failed",
];

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, |v| v.to_string())
}

impl McReport {
    /// Reduces replication outcomes, which must be in replication-index order.
    pub fn aggregate(config: &McConfig, scenario: &ScenarioSpec, reps: &[ReplicationOutcome]) -> Self {
        let mut cells = Vec::new();
        for (xi, &x) in config.x_grid.iter().enumerate() {
            for quantity in [Quantity::Gamma, Quantity::Quantile] {
                let truth = match quantity {
                    Quantity::Gamma => true_gamma(x),
                    Quantity::Quantile => true_quantile(config.survival_level, x)
                        .expect("validated survival level"),
                };
                for (ei, &estimator) in config.estimators.iter().enumerate() {
                    let mut values = Vec::with_capacity(reps.len());
                    let mut ks = Vec::with_capacity(reps.len());
                    for r in reps {
                        let o = r.outcomes[xi][ei];
                        let v = match quantity {
                            Quantity::Gamma => o.gamma,
                            Quantity::Quantile => o.quantile,
                        };
                        if let Some(v) = v {
                            values.push(v);
                            if let Some(k) = o.k {
                                ks.push(k as f64);
                            }
                        }
                    }
                    let metrics = error_metrics(&values, truth).ok();
                    cells.push(McCell {
                        scenario: scenario.relation.code().to_string(),
                        n: config.n,
                        x,
                        estimator,
                        quantity,
                        truth,
                        mse: metrics.map(|m| m.0),
                        mae: metrics.map(|m| m.1),
                        mean: mean(&values),
                        reps_used: values.len(),
                        reps_failed: reps.len() - values.len(),
                        mean_k: mean(&ks),
                    });
                }
            }
        }
        let hs: Vec<f64> = reps.iter().filter_map(|r| r.h).collect();
        let cf: Vec<f64> = reps.iter().map(|r| r.censoring_fraction).collect();
        McReport {
            metadata: McMetadata {
                config: config.clone(),
                scenario: *scenario,
                generator: GENERATOR.to_string(),
                version: env!("CARGO_PKG_VERSION").to_string(),
                mean_bandwidth: mean(&hs),
                mean_censoring_fraction: mean(&cf).unwrap_or(0.0),
            },
            cells,
        }
    }

    pub fn cell(&self, x: f64, estimator: McEstimator, quantity: Quantity) -> Option<&McCell> {
        self.cells
            .iter()
            .find(|c| c.x == x && c.estimator == estimator && c.quantity == quantity)
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(CSV_HEADER).map_err(|e| Error::Io(e.to_string()))?;
        for c in &self.cells {
            w.write_record([
                c.scenario.clone(),
                c.n.to_string(),
                c.x.to_string(),
                c.label(),
                c.truth.to_string(),
                fmt_opt(c.mse),
                fmt_opt(c.mae),
                fmt_opt(c.mean),
                c.reps_used.to_string(),
                c.reps_failed.to_string(),
            ])
            .map_err(|e| Error::Io(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
    }

    pub fn to_json_string(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Io(e.to_string()))
    }

    /// Writes `<stem>.csv` and `<stem>.json` into `dir`, returning both paths.
    pub fn write_files(&self, dir: &Path, stem: &str) -> Result<(PathBuf, PathBuf)> {
        fs::create_dir_all(dir)?;
        let csv_path = dir.join(format!("{stem}.csv"));
        let json_path = dir.join(format!("{stem}.json"));
        fs::write(&csv_path, self.to_csv_string()?)?;
        fs::write(&json_path, self.to_json_string()? + "\n")?;
        Ok((csv_path, json_path))
    }
}
