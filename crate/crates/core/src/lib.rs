//! Kernel estimation of the conditional Weibull-tail coefficient and of
//! Weissman-type extreme conditional quantiles from randomly right-censored
//! data with a scalar covariate.
//!
//! The building blocks, bottom-up:
//!
//! * [`kernel`] and [`weights`]: compact-support kernels and Nadaraya–Watson weights;
//! * [`survival`]: kernel-weighted Beran (Kaplan–Meier) and Nelson–Aalen estimators;
//! * [`tail`]: Weibull-tail coefficient estimators and the Weissman quantile;
//! * [`tuning`]: cross-validated bandwidth and block-based choice of `k`;
//! * [`montecarlo`]: the simulation study;
//! * [`dataset`]: CSV ingestion and the bundled larynx-cancer data.

// `!(x > 0.0)` is used on purpose so that NaN falls into the rejecting branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod dataset;
pub mod error;
pub mod kernel;
pub mod montecarlo;
pub mod sample;
pub mod survival;
pub mod tail;
pub mod tuning;
pub mod weights;

pub use error::{Error, ErrorFamily, Result};
pub use kernel::{eval_kernel, Bandwidth, KernelSpec};
pub use sample::{CensoredSample, Observation};
pub use survival::{
    conditional_cum_hazard, conditional_km_survival, sub_distributions, HazardCurve, HazardVariant,
    SubDistributions, SurvivalCurve,
};
pub use tail::{
    gamma_conditional, gamma_unconditional, threshold_from_k, weissman_quantile, QuantileEstimate,
    TailEstimate, TailVariant,
};
pub use tuning::{cv_bandwidth, select_k, BandwidthGrid, KSelectionTrace};
pub use weights::nw_weights;
