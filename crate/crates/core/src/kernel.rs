//! Compact-support kernels and the bandwidth newtype.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Kernel densities supported on the closed interval `[-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelSpec {
    /// `K(u) = 1.9 - 1.8 u`. Not symmetric: `K(-1) = 3.7`, `K(1) = 0.1`.
    AsymmetricLinear,
    /// `K(u) = 15/16 (1 - u^2)^2`.
    Biquadratic,
}

impl KernelSpec {
    pub const ALL: [KernelSpec; 2] = [KernelSpec::AsymmetricLinear, KernelSpec::Biquadratic];

    /// Evaluates the kernel. Returns exactly 0 outside `[-1, 1]` and for non-finite `u`.
    #[inline]
    pub fn eval(self, u: f64) -> f64 {
        if !(-1.0..=1.0).contains(&u) {
            return 0.0;
        }
        match self {
            KernelSpec::AsymmetricLinear => 1.9 - 1.8 * u,
            KernelSpec::Biquadratic => {
                let s = 1.0 - u * u;
                15.0 / 16.0 * s * s
            }
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            KernelSpec::AsymmetricLinear => "asymmetric-linear",
            KernelSpec::Biquadratic => "biquadratic",
        }
    }
}

impl fmt::Display for KernelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for KernelSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "asymmetric-linear" | "asym" | "linear" => Ok(KernelSpec::AsymmetricLinear),
            "biquadratic" | "biquad" | "quartic" => Ok(KernelSpec::Biquadratic),
            other => Err(Error::Config(format!("unknown kernel '{other}'"))),
        }
    }
}

/// Free-function form of [`KernelSpec::eval`].
pub fn eval_kernel(kernel: KernelSpec, u: f64) -> f64 {
    kernel.eval(u)
}

/// A strictly positive smoothing bandwidth.
///
/// `+inf` is accepted: every scaled distance `(x - X_i) / h` is then 0, so all
/// observations share the weight `K(0)` and the kernel estimators collapse to
/// their unconditional counterparts.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Bandwidth(f64);

impl Bandwidth {
    pub fn new(h: f64) -> Result<Self> {
        if h > 0.0 && !h.is_nan() {
            Ok(Bandwidth(h))
        } else {
            Err(Error::InvalidBandwidth(h))
        }
    }

    pub const fn infinite() -> Self {
        Bandwidth(f64::INFINITY)
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }
}

impl fmt::Display for Bandwidth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}
