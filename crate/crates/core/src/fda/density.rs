//! Cosine-series density estimate of the design law with hard thresholding.
//!
//! `θ_k` is the mean over curves of the per-curve averages of
//! `Φ_k(t) = √2 cos(πkt)` (with `Φ_0 = 1`) and `v_k` its estimated variance.
//! The cutoff `K̂` minimises `Σ_{k≤K} (2v_k − θ_k²)` over
//! `K ≤ c_K0 + c_K1 ln M̄`, where `M̄` is the pooled number of points, and
//! only the terms with `θ_k² > c_TH v_k` are kept.

use crate::error::{Error, Result};
use crate::geometry::{SamplingMeasure, TabulatedDensity};
use std::f64::consts::{PI, SQRT_2};

#[derive(Debug, Clone, PartialEq)]
pub struct DensityConstants {
    pub c_th: f64,
    pub c_k0: f64,
    pub c_k1: f64,
    /// Clip floor applied before renormalizing.
    pub floor: f64,
    pub grid_size: usize,
}

impl Default for DensityConstants {
    fn default() -> Self {
        Self {
            c_th: 0.4,
            c_k0: 3.0,
            c_k1: 0.8,
            floor: 1e-3,
            grid_size: 2001,
        }
    }
}

fn basis(k: usize, t: f64) -> f64 {
    if k == 0 {
        1.0
    } else {
        SQRT_2 * (PI * k as f64 * t).cos()
    }
}

#[derive(Debug, Clone)]
pub struct DensityFit {
    pub theta: Vec<f64>,
    pub variance: Vec<f64>,
    /// Retained coefficients, zero where thresholded or beyond `K̂`.
    pub coefficients: Vec<f64>,
    pub k_hat: usize,
    pub constants: DensityConstants,
    table: TabulatedDensity,
}

impl DensityFit {
    /// Raw series value before clipping.
    pub fn series(&self, t: f64) -> f64 {
        self.coefficients.iter().enumerate().map(|(k, c)| c * basis(k, t)).sum()
    }

    /// Clipped, renormalized density.
    pub fn density(&self, t: f64) -> f64 {
        self.table.density(t)
    }

    pub fn table(&self) -> &TabulatedDensity {
        &self.table
    }

    pub fn to_measure(&self) -> SamplingMeasure {
        SamplingMeasure::Tabulated(self.table.clone())
    }
}

/// Fit from the design points of each curve.
pub fn fit_density_threshold(curves: &[Vec<f64>], consts: &DensityConstants) -> Result<DensityFit> {
    let n = curves.len();
    if n < 2 {
        return Err(Error::TooFewCurves);
    }
    let pooled: usize = curves.iter().map(Vec::len).sum();
    if pooled < 10 {
        return Err(Error::PooledTooSmall { needed: 10, got: pooled });
    }
    if curves.iter().any(Vec::is_empty) {
        return Err(Error::Empty);
    }
    if let Some(index) = curves.iter().flatten().position(|t| !(0.0..=1.0).contains(t)) {
        return Err(Error::PointOutsideDomain { index });
    }
    let k_max = (consts.c_k0 + consts.c_k1 * (pooled as f64).ln()).floor().max(0.0) as usize;
    let nf = n as f64;
    let mut theta = Vec::with_capacity(k_max + 1);
    let mut variance = Vec::with_capacity(k_max + 1);
    for k in 0..=k_max {
        let avg: Vec<f64> = curves
            .iter()
            .map(|c| c.iter().map(|&t| basis(k, t)).sum::<f64>() / c.len() as f64)
            .collect();
        let mean = avg.iter().sum::<f64>() / nf;
        let var = avg.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / (nf - 1.0);
        theta.push(mean);
        variance.push(var / nf);
    }
    let mut best = (0usize, f64::INFINITY);
    let mut risk = 0.0;
    for k in 0..=k_max {
        risk += 2.0 * variance[k] - theta[k] * theta[k];
        if risk < best.1 {
            best = (k, risk);
        }
    }
    let k_hat = best.0;
    let coefficients: Vec<f64> = (0..=k_max)
        .map(|k| {
            if k <= k_hat && theta[k] * theta[k] > consts.c_th * variance[k] {
                theta[k]
            } else {
                0.0
            }
        })
        .collect();
    let g = consts.grid_size.max(2);
    let grid: Vec<f64> = (0..g).map(|i| i as f64 / (g - 1) as f64).collect();
    let values = grid
        .iter()
        .map(|&t| {
            coefficients
                .iter()
                .enumerate()
                .map(|(k, c)| c * basis(k, t))
                .sum::<f64>()
                .max(consts.floor)
        })
        .collect();
    let table = TabulatedDensity::new(grid, values)?;
    Ok(DensityFit {
        theta,
        variance,
        coefficients,
        k_hat,
        constants: consts.clone(),
        table,
    })
}
