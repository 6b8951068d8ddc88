//! Kernel-weighted conditional survival and cumulative hazard under censoring.
//!
//! All constructions run over the distinct observed times `s` carrying positive
//! weight. At each of them
//!
//! * `dH1(s)` is the weight of uncensored observations at `s`,
//! * `R(s) = 1 - H_n(s-)` is the weight still at risk (all `z >= s`).
//!
//! The Beran / Nelson-Aalen hazard accumulates `dH1(s) / R(s)`; the conditional
//! Kaplan-Meier survival multiplies `1 - dH1(s) / R(s)`. `R(s)` is accumulated
//! from the top so that the last time carries exactly its own mass, and an
//! uncensored maximum drives the survival to exactly 0.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::kernel::{Bandwidth, KernelSpec};
use crate::sample::CensoredSample;
use crate::weights::nw_weights;

/// Which cumulative hazard estimator to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HazardVariant {
    /// `sum dH1(s) / (1 - H_n(s-))`.
    NelsonAalen,
    /// `-log` of the conditional Kaplan-Meier survival.
    #[default]
    NegLogKm,
}

impl HazardVariant {
    pub fn name(self) -> &'static str {
        match self {
            HazardVariant::NelsonAalen => "nelson-aalen",
            HazardVariant::NegLogKm => "neg-log-km",
        }
    }
}

impl std::str::FromStr for HazardVariant {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nelson-aalen" | "na" | "beran" => Ok(HazardVariant::NelsonAalen),
            "neg-log-km" | "km" => Ok(HazardVariant::NegLogKm),
            other => Err(crate::Error::Config(format!("unknown hazard variant '{other}'"))),
        }
    }
}

/// Right-continuous step function: `initial` before the first time, then the
/// value attached to the largest time `<= y`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepFunction {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub initial: f64,
}

impl StepFunction {
    pub fn eval(&self, y: f64) -> f64 {
        let idx = self.times.partition_point(|&t| t <= y);
        if idx == 0 {
            self.initial
        } else {
            self.values[idx - 1]
        }
    }

    pub fn last(&self) -> f64 {
        self.values.last().copied().unwrap_or(self.initial)
    }
}

/// Weighted empirical sub-distributions `H_n(.|x)` and `H_1n(.|x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubDistributions {
    pub hn: StepFunction,
    pub h1n: StepFunction,
}

/// Estimated conditional cumulative hazard `Lambda(.|x)`.
///
/// Jumps only at uncensored times. With [`HazardVariant::NegLogKm`] the final
/// value is `+inf` when the largest weighted observation is uncensored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HazardCurve {
    pub jump_times: Vec<f64>,
    pub cumulative_values: Vec<f64>,
    pub variant: HazardVariant,
}

impl HazardCurve {
    pub fn eval(&self, y: f64) -> f64 {
        let idx = self.jump_times.partition_point(|&t| t <= y);
        if idx == 0 {
            0.0
        } else {
            self.cumulative_values[idx - 1]
        }
    }

    pub fn has_infinite_terminal(&self) -> bool {
        self.cumulative_values.last().is_some_and(|v| v.is_infinite())
    }
}

/// Conditional Kaplan-Meier survival `F_bar(.|x)`; 1 before the first event.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurvivalCurve {
    pub jump_times: Vec<f64>,
    pub values: Vec<f64>,
}

impl SurvivalCurve {
    pub fn eval(&self, y: f64) -> f64 {
        let idx = self.jump_times.partition_point(|&t| t <= y);
        if idx == 0 {
            1.0
        } else {
            self.values[idx - 1]
        }
    }
}

/// One distinct positive-weight time of the weighted sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct EventRow {
    pub time: f64,
    /// Weight of all observations at `time`.
    pub mass: f64,
    /// Weight of uncensored observations at `time`.
    pub event_mass: f64,
    /// Weight of observations with `z >= time`.
    pub at_risk: f64,
    /// Nelson-Aalen hazard after this time.
    pub nelson_aalen: f64,
    /// Kaplan-Meier survival after this time.
    pub survival: f64,
}

impl EventRow {
    pub fn hazard(&self, variant: HazardVariant) -> f64 {
        match variant {
            HazardVariant::NelsonAalen => self.nelson_aalen,
            HazardVariant::NegLogKm => neg_log(self.survival),
        }
    }
}

#[inline]
pub(crate) fn neg_log(s: f64) -> f64 {
    if s > 0.0 {
        -s.ln()
    } else {
        f64::INFINITY
    }
}

/// Groups `(z, delta, w)` triples, already in product-limit order, into distinct
/// times and runs both hazard recursions. Zero weights are skipped.
pub(crate) fn event_table<I>(sorted: I) -> Vec<EventRow>
where
    I: IntoIterator<Item = (f64, bool, f64)>,
{
    let mut rows: Vec<EventRow> = Vec::new();
    for (z, delta, w) in sorted {
        if w <= 0.0 {
            continue;
        }
        let ev = if delta { w } else { 0.0 };
        match rows.last_mut() {
            Some(r) if r.time == z => {
                r.mass += w;
                r.event_mass += ev;
            }
            _ => rows.push(EventRow {
                time: z,
                mass: w,
                event_mass: ev,
                at_risk: 0.0,
                nelson_aalen: 0.0,
                survival: 1.0,
            }),
        }
    }
    let mut risk = 0.0;
    for r in rows.iter_mut().rev() {
        risk += r.mass;
        r.at_risk = risk;
    }
    let mut na = 0.0;
    let mut surv = 1.0;
    for r in rows.iter_mut() {
        if r.event_mass > 0.0 {
            let ratio = r.event_mass / r.at_risk;
            na += ratio;
            surv *= if ratio >= 1.0 { 0.0 } else { 1.0 - ratio };
        }
        r.nelson_aalen = na;
        r.survival = surv;
    }
    rows
}

/// Event table of `sample` under weights aligned with its original order.
pub(crate) fn weighted_event_table(sample: &CensoredSample, weights: &[f64]) -> Vec<EventRow> {
    debug_assert_eq!(weights.len(), sample.len());
    event_table(
        sample
            .sorted_index()
            .iter()
            .map(|&i| (sample.get(i).z, sample.get(i).delta, weights[i])),
    )
}

pub fn sub_distributions_with_weights(sample: &CensoredSample, weights: &[f64]) -> SubDistributions {
    let rows = weighted_event_table(sample, weights);
    let times: Vec<f64> = rows.iter().map(|r| r.time).collect();
    let mut hn = Vec::with_capacity(rows.len());
    let mut h1n = Vec::with_capacity(rows.len());
    let (mut a, mut b) = (0.0, 0.0);
    for r in &rows {
        a += r.mass;
        b += r.event_mass;
        hn.push(a);
        h1n.push(b);
    }
    SubDistributions {
        hn: StepFunction { times: times.clone(), values: hn, initial: 0.0 },
        h1n: StepFunction { times, values: h1n, initial: 0.0 },
    }
}

/// `H_n(s|x) = sum_i B_i(x) 1{Z_i <= s}` and `H_1n(s|x) = sum_i B_i(x) 1{Z_i <= s, delta_i = 1}`.
pub fn sub_distributions(
    sample: &CensoredSample,
    x: f64,
    h: Bandwidth,
    kernel: KernelSpec,
) -> Result<SubDistributions> {
    let w = nw_weights(x, sample, h, kernel)?;
    Ok(sub_distributions_with_weights(sample, &w))
}

pub fn cum_hazard_with_weights(
    sample: &CensoredSample,
    weights: &[f64],
    variant: HazardVariant,
) -> HazardCurve {
    let rows = weighted_event_table(sample, weights);
    let (jump_times, cumulative_values) = rows
        .iter()
        .filter(|r| r.event_mass > 0.0)
        .map(|r| (r.time, r.hazard(variant)))
        .unzip();
    HazardCurve { jump_times, cumulative_values, variant }
}

/// Conditional cumulative hazard at covariate `x`.
pub fn conditional_cum_hazard(
    sample: &CensoredSample,
    x: f64,
    h: Bandwidth,
    kernel: KernelSpec,
    variant: HazardVariant,
) -> Result<HazardCurve> {
    let w = nw_weights(x, sample, h, kernel)?;
    Ok(cum_hazard_with_weights(sample, &w, variant))
}

pub fn km_survival_with_weights(sample: &CensoredSample, weights: &[f64]) -> SurvivalCurve {
    let rows = weighted_event_table(sample, weights);
    let (jump_times, values) = rows
        .iter()
        .filter(|r| r.event_mass > 0.0)
        .map(|r| (r.time, r.survival))
        .unzip();
    SurvivalCurve { jump_times, values }
}

/// Kernel conditional Kaplan-Meier (Beran) survival at covariate `x`.
pub fn conditional_km_survival(
    sample: &CensoredSample,
    x: f64,
    h: Bandwidth,
    kernel: KernelSpec,
) -> Result<SurvivalCurve> {
    let w = nw_weights(x, sample, h, kernel)?;
    Ok(km_survival_with_weights(sample, &w))
}
