//! Nadaraya-Watson weights `B_i(x) = K((x - X_i)/h) / sum_j K((x - X_j)/h)`.

use crate::error::{Error, Result};
use crate::kernel::{Bandwidth, KernelSpec};
use crate::sample::CensoredSample;

/// Neumaier-compensated sum.
pub(crate) fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Raw kernel values `K((x - X_i)/h)` for covariates `xs`.
pub fn kernel_values(x: f64, xs: &[f64], h: Bandwidth, kernel: KernelSpec) -> Vec<f64> {
    let h = h.get();
    xs.iter().map(|&xi| kernel.eval((x - xi) / h)).collect()
}

/// Normalizes kernel values to unit sum.
pub(crate) fn normalize(x: f64, mut k: Vec<f64>) -> Result<Vec<f64>> {
    let total = compensated_sum(k.iter().copied());
    if !(total > 0.0) {
        return Err(Error::EmptyNeighborhood { x });
    }
    for v in &mut k {
        *v /= total;
    }
    Ok(k)
}

/// Nadaraya-Watson weights at `x`, aligned with `xs`.
pub fn nw_weights_for(x: f64, xs: &[f64], h: Bandwidth, kernel: KernelSpec) -> Result<Vec<f64>> {
    normalize(x, kernel_values(x, xs, h, kernel))
}

/// Nadaraya-Watson weights at `x`, aligned with the sample's original order.
pub fn nw_weights(
    x: f64,
    sample: &CensoredSample,
    h: Bandwidth,
    kernel: KernelSpec,
) -> Result<Vec<f64>> {
    let xs: Vec<f64> = sample.covariates().collect();
    nw_weights_for(x, &xs, h, kernel)
}
