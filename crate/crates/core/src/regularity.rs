//! Local regularity of curves observed at random points, and the induced
//! choice of the Hölder exponent `β`.
//!
//! For a window length `a`, `θ(t, a)` averages over curves the squared
//! increment between the observations nearest to the two window ends. With
//! `θ(t, a) ≈ L_t² a^{2H_t}`, doubling the window gives
//! `H_t = (ln θ(t, 2δ) − ln θ(t, δ)) / (2 ln 2)`.
//!
//! Noisy observations inflate `θ` and bias `H_t` downwards; no correction is
//! applied.

use crate::error::{Error, Result};
use crate::geometry::DesignSample;
use crate::parallel::map_indexed;

pub const H_MIN_CLAMP: f64 = 0.01;
pub const H_MAX_CLAMP: f64 = 0.99;
pub const BETA_FLOOR: f64 = 0.01;

#[derive(Debug, Clone)]
struct Curve {
    t: Vec<f64>,
    x: Vec<f64>,
}

impl Curve {
    fn nearest(&self, s: f64) -> usize {
        let k = self.t.partition_point(|&u| u < s);
        if k == 0 {
            0
        } else if k == self.t.len() || s - self.t[k - 1] <= self.t[k] - s {
            k - 1
        } else {
            k
        }
    }
}

/// Curves on `[0, 1]`, each stored sorted by observation time.
#[derive(Debug, Clone)]
pub struct CurveSet {
    curves: Vec<Curve>,
}

impl CurveSet {
    pub fn new(curves: Vec<(DesignSample, Vec<f64>)>) -> Result<Self> {
        let pairs = curves
            .into_iter()
            .map(|(s, x)| {
                if s.dim() != 1 || s.domain().is_sphere() {
                    return Err(Error::Unsupported("regularity estimation needs curves on [0, 1]".into()));
                }
                Ok((s.coords().to_vec(), x))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_pairs(pairs)
    }

    /// Curves given as `(times, values)` pairs.
    pub fn from_pairs(curves: Vec<(Vec<f64>, Vec<f64>)>) -> Result<Self> {
        if curves.is_empty() {
            return Err(Error::Empty);
        }
        let mut out = Vec::with_capacity(curves.len());
        for (t, x) in curves {
            if t.len() != x.len() {
                return Err(Error::LengthMismatch {
                    expected: t.len(),
                    got: x.len(),
                });
            }
            if t.len() < 2 {
                return Err(Error::InsufficientPoints { needed: 2, got: t.len() });
            }
            if let Some(index) = x.iter().chain(&t).position(|v| !v.is_finite()) {
                return Err(Error::NonFiniteValue { index: index % x.len() });
            }
            let mut order: Vec<usize> = (0..t.len()).collect();
            order.sort_by(|&a, &b| t[a].total_cmp(&t[b]));
            out.push(Curve {
                t: order.iter().map(|&i| t[i]).collect(),
                x: order.iter().map(|&i| x[i]).collect(),
            });
        }
        Ok(Self { curves: out })
    }

    pub fn len(&self) -> usize {
        self.curves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.curves.is_empty()
    }

    pub fn mean_size(&self) -> f64 {
        self.curves.iter().map(|c| c.t.len()).sum::<usize>() as f64 / self.len() as f64
    }

    /// Twice the median spacing between consecutive observations of a curve.
    pub fn default_delta(&self) -> f64 {
        let mut gaps: Vec<f64> = self
            .curves
            .iter()
            .flat_map(|c| c.t.windows(2).map(|w| w[1] - w[0]))
            .collect();
        gaps.sort_by(f64::total_cmp);
        2.0 * gaps[gaps.len() / 2]
    }

    /// `θ(t, a)`, or `None` when no curve has distinct observations within
    /// `a/2` of both window ends.
    fn theta(&self, t: f64, a: f64) -> Option<f64> {
        let (lo, hi) = window(t, a);
        let tol = 0.5 * a;
        let mut sum = 0.0;
        let mut n = 0usize;
        for c in &self.curves {
            let (i, j) = (c.nearest(lo), c.nearest(hi));
            if i != j && (c.t[i] - lo).abs() <= tol && (c.t[j] - hi).abs() <= tol {
                sum += (c.x[j] - c.x[i]).powi(2);
                n += 1;
            }
        }
        (n > 0).then(|| sum / n as f64)
    }
}

/// Window of length `a` centered at `t`, shifted to stay inside `[0, 1]`.
fn window(t: f64, a: f64) -> (f64, f64) {
    let a = a.min(1.0);
    let lo = (t - a / 2.0).clamp(0.0, 1.0 - a);
    (lo, lo + a)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegularityEstimate {
    pub t_grid: Vec<f64>,
    pub h: Vec<f64>,
    pub l: Vec<f64>,
    pub h_min: f64,
    pub delta: f64,
    /// `β̂` for the mean curve size of the learning set.
    pub beta: f64,
}

impl RegularityEstimate {
    pub fn mean_h(&self) -> f64 {
        self.h.iter().sum::<f64>() / self.h.len() as f64
    }

    /// `β̂` for a target design of size `m`.
    pub fn beta_for(&self, m: usize) -> f64 {
        select_beta(self.h_min, m)
    }
}

/// `n` evenly spread interior points `(i + ½)/n`.
pub fn uniform_grid(n: usize) -> Vec<f64> {
    (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect()
}

pub fn estimate_local_regularity(curves: &CurveSet, t_grid: &[f64], delta: Option<f64>) -> Result<RegularityEstimate> {
    if t_grid.is_empty() {
        return Err(Error::Empty);
    }
    let delta = delta.unwrap_or_else(|| curves.default_delta());
    if !(delta > 0.0 && delta <= 0.5) {
        return Err(Error::InvalidParameter(format!("delta = {delta} must lie in (0, 0.5]")));
    }
    let thetas = map_indexed(t_grid.len(), |g| {
        let t = t_grid[g];
        (curves.theta(t, delta), curves.theta(t, 2.0 * delta))
    });
    let empty: Vec<f64> = t_grid
        .iter()
        .zip(&thetas)
        .filter(|(_, th)| th.0.is_none() || th.1.is_none())
        .map(|(&t, _)| t)
        .collect();
    if !empty.is_empty() {
        return Err(Error::EmptyWindows(empty));
    }
    let (h, l): (Vec<f64>, Vec<f64>) = thetas
        .into_iter()
        .map(|th| {
            let (t1, t2) = (th.0.unwrap(), th.1.unwrap());
            let h = if t1 > 0.0 && t2 > 0.0 {
                ((t2.ln() - t1.ln()) / (2.0 * std::f64::consts::LN_2)).clamp(H_MIN_CLAMP, H_MAX_CLAMP)
            } else {
                H_MAX_CLAMP
            };
            (h, (t1 / delta.powf(2.0 * h)).sqrt())
        })
        .unzip();
    let h_min = h.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(RegularityEstimate {
        t_grid: t_grid.to_vec(),
        beta: select_beta(h_min, curves.mean_size().round() as usize),
        h,
        l,
        h_min,
        delta,
    })
}

/// `β̂ = H_min − 1/ln²(M)`, kept within `[0.01, 1]`.
pub fn select_beta(h_min: f64, m: usize) -> f64 {
    let lm = (m as f64).ln();
    (h_min - 1.0 / (lm * lm)).clamp(BETA_FLOOR, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::Rng;
    use rand_distr::StandardNormal;

    #[test]
    fn select_beta_examples() {
        assert_abs_diff_eq!(select_beta(0.5, 100), 0.5 - 1.0 / 100f64.ln().powi(2), epsilon = 1e-15);
        assert_abs_diff_eq!(select_beta(0.5, 100), 0.4529, epsilon = 1e-4);
        assert_eq!(select_beta(0.05, 10), BETA_FLOOR);
        assert!(select_beta(0.6, 1000) > select_beta(0.6, 100));
        assert!(select_beta(0.6, 1_000_000) < 0.6);
    }

    #[test]
    fn linear_curves_saturate() {
        let t: Vec<f64> = (0..=100).map(|i| i as f64 / 100.0).collect();
        let curves = (1..=5)
            .map(|a| (t.clone(), t.iter().map(|s| a as f64 * s).collect()))
            .collect();
        let cs = CurveSet::from_pairs(curves).unwrap();
        let est = estimate_local_regularity(&cs, &[0.3, 0.5, 0.7], Some(0.1)).unwrap();
        for h in &est.h {
            assert_eq!(*h, H_MAX_CLAMP);
        }
    }

    #[test]
    fn brownian_paths_have_half_regularity() {
        let mut r = crate::rng::from_seed(11);
        let m = 200;
        let curves = (0..300)
            .map(|_| {
                let t: Vec<f64> = (1..=m).map(|i| i as f64 / m as f64).collect();
                let mut x = Vec::with_capacity(m);
                let mut acc = 0.0;
                for _ in 0..m {
                    let z: f64 = r.sample(StandardNormal);
                    acc += z / (m as f64).sqrt();
                    x.push(acc);
                }
                (t, x)
            })
            .collect();
        let cs = CurveSet::from_pairs(curves).unwrap();
        let est = estimate_local_regularity(&cs, &uniform_grid(10), None).unwrap();
        assert!((est.mean_h() - 0.5).abs() < 0.05, "{}", est.mean_h());
    }

    #[test]
    fn empty_windows_are_reported() {
        let cs = CurveSet::from_pairs(vec![(vec![0.0, 1.0], vec![0.0, 1.0])]).unwrap();
        match estimate_local_regularity(&cs, &[0.5], Some(0.01)) {
            Err(Error::EmptyWindows(ts)) => assert_eq!(ts, vec![0.5]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn window_stays_inside() {
        assert_eq!(window(0.01, 0.1), (0.0, 0.1));
        let (lo, hi) = window(0.99, 0.1);
        assert_abs_diff_eq!(lo, 0.9, epsilon = 1e-15);
        assert_eq!(hi, 1.0);
    }
}
