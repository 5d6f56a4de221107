//! Point estimators of `I(φ) = ∫ φ dρ`.
//!
//! Every rule here targets the integral against the design law `ρ`. The
//! trapezoid rule integrates `φ f_T` over the interval, which reduces to the
//! plain Riemann sum under a uniform design.

use crate::error::{Error, Result};
use crate::geometry::{loo_neighbors, voronoi_volumes, DesignSample, VolumeOptions};
use crate::weights::{control_weights, WeightOptions, WeightSet, WeightVariant};

#[derive(Debug, Clone)]
pub struct IntegrandEvaluations {
    pub sample: DesignSample,
    pub values: Vec<f64>,
    /// Per-point noise scale `σ_η(T_m)`; present only for noisy evaluations.
    pub noise_scale: Option<Vec<f64>>,
}

impl IntegrandEvaluations {
    pub fn new(sample: DesignSample, values: Vec<f64>) -> Result<Self> {
        if values.len() != sample.len() {
            return Err(Error::LengthMismatch {
                expected: sample.len(),
                got: values.len(),
            });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue { index });
        }
        Ok(Self {
            sample,
            values,
            noise_scale: None,
        })
    }

    /// Evaluate `f` at every design point.
    pub fn from_fn(sample: DesignSample, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let values = sample.points().map(f).collect();
        Self::new(sample, values)
    }

    pub fn with_noise_scale(mut self, scale: Vec<f64>) -> Result<Self> {
        if scale.len() != self.values.len() {
            return Err(Error::LengthMismatch {
                expected: self.values.len(),
                got: scale.len(),
            });
        }
        if let Some(index) = scale.iter().position(|s| !s.is_finite() || *s < 0.0) {
            return Err(Error::NonFiniteValue { index });
        }
        self.noise_scale = Some(scale);
        Ok(self)
    }

    pub fn is_noisy(&self) -> bool {
        self.noise_scale.is_some()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.sample.dim()
    }

    pub fn subset(&self, idx: &[usize]) -> Self {
        Self {
            sample: self.sample.subset(idx),
            values: idx.iter().map(|&i| self.values[i]).collect(),
            noise_scale: self
                .noise_scale
                .as_ref()
                .map(|s| idx.iter().map(|&i| s[i]).collect()),
        }
    }
}

/// Estimation rule, used wherever a procedure is generic over the estimator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rule {
    Mean,
    Trapezoid,
    ControlUnbiased,
    ControlNn,
}

impl Rule {
    /// Unbiased control neighbors on the line, the NN variant otherwise.
    pub fn auto(dim: usize) -> Self {
        match WeightVariant::default_for_dim(dim) {
            WeightVariant::UnbiasedLoo => Rule::ControlUnbiased,
            WeightVariant::NnVariant => Rule::ControlNn,
        }
    }

    pub fn is_control(self) -> bool {
        matches!(self, Rule::ControlUnbiased | Rule::ControlNn)
    }

    /// Exponent `r` of the error rate `M^{-r}` assumed by the subsampling
    /// scaling for a `β`-Hölder integrand on a `d`-dimensional domain.
    pub fn rate_exponent(self, beta: f64, dim: usize) -> f64 {
        let d = dim as f64;
        match self {
            Rule::Mean => 0.5,
            Rule::Trapezoid => beta / d,
            Rule::ControlUnbiased | Rule::ControlNn => 0.5 + beta / d,
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            Rule::Mean => "mean",
            Rule::Trapezoid => "trapez",
            Rule::ControlUnbiased => "NN",
            Rule::ControlNn => "NN-fast",
        }
    }

    pub fn estimate(self, ev: &IntegrandEvaluations, opts: &WeightOptions) -> Result<f64> {
        match self {
            Rule::Mean => integrate_mean(ev),
            Rule::Trapezoid => integrate_trapezoid(ev),
            Rule::ControlUnbiased => {
                let w = control_weights(&ev.sample, WeightVariant::UnbiasedLoo, opts)?;
                integrate_control(ev, &w)
            }
            Rule::ControlNn => {
                let w = control_weights(&ev.sample, WeightVariant::NnVariant, opts)?;
                integrate_control(ev, &w)
            }
        }
    }
}

pub fn integrate_mean(ev: &IntegrandEvaluations) -> Result<f64> {
    if ev.is_empty() {
        return Err(Error::Empty);
    }
    Ok(ev.values.iter().sum::<f64>() / ev.len() as f64)
}

/// Trapezoid rule over the sorted design, extended to both ends of `[0, 1]`
/// by carrying the nearest observed value.
pub fn integrate_trapezoid(ev: &IntegrandEvaluations) -> Result<f64> {
    if ev.dim() != 1 || ev.sample.domain().is_sphere() {
        return Err(Error::TrapezoidDimension);
    }
    if ev.is_empty() {
        return Err(Error::Empty);
    }
    let measure = ev.sample.measure();
    let mut pts: Vec<(f64, f64)> = ev
        .sample
        .coords()
        .iter()
        .zip(&ev.values)
        .map(|(&t, &v)| (t, v * measure.density(&[t])))
        .collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let first = pts[0].1;
    let last = pts[pts.len() - 1].1;
    let mut knots = Vec::with_capacity(pts.len() + 2);
    knots.push((0.0, first));
    knots.extend(pts);
    knots.push((1.0, last));
    Ok(knots
        .windows(2)
        .map(|w| 0.5 * (w[1].0 - w[0].0) * (w[0].1 + w[1].1))
        .sum())
}

/// `Σ w_m φ(T_m)`.
pub fn integrate_control(ev: &IntegrandEvaluations, w: &WeightSet) -> Result<f64> {
    w.dot(&ev.values)
}

/// NN-variant estimate evaluated in its control-variate form: sample mean,
/// minus the mean of the leave-one-out neighbor values, plus the integral of
/// the piecewise-constant Voronoi interpolant.
pub fn integrate_control_threeterm(ev: &IntegrandEvaluations, volumes: &VolumeOptions) -> Result<f64> {
    let m = ev.len();
    if m < 2 {
        return Err(Error::InsufficientPoints { needed: 2, got: m });
    }
    let nn = loo_neighbors(&ev.sample)?;
    let (vol, _) = voronoi_volumes(&ev.sample, volumes)?;
    let mf = m as f64;
    let mean = ev.values.iter().sum::<f64>() / mf;
    let control = nn.iter().map(|&j| ev.values[j]).sum::<f64>() / mf;
    let interp: f64 = ev.values.iter().zip(&vol).map(|(v, a)| v * a).sum();
    Ok(mean - control + interp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Domain, SamplingMeasure};
    use crate::rng;
    use crate::weights::control_weights_nn;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn ev(t: &[f64], f: impl Fn(f64) -> f64) -> IntegrandEvaluations {
        let s = DesignSample::uniform_interval(t.to_vec()).unwrap();
        IntegrandEvaluations::from_fn(s, |p| f(p[0])).unwrap()
    }

    #[test]
    fn mean_examples() {
        assert_eq!(integrate_mean(&ev(&[0.1, 0.5, 0.9], |t| t)).unwrap(), 0.5);
        assert_eq!(integrate_mean(&ev(&[0.3], |_| 7.0)).unwrap(), 7.0);
    }

    #[test]
    fn trapezoid_examples() {
        assert_abs_diff_eq!(integrate_trapezoid(&ev(&[0.9, 0.1, 0.5], |t| t)).unwrap(), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(integrate_trapezoid(&ev(&[0.42], |_| 3.0)).unwrap(), 3.0, epsilon = 1e-15);
    }

    #[test]
    fn trapezoid_rejects_2d() {
        let s = DesignSample::from_points(Domain::cube(2).unwrap(), &[vec![0.1, 0.2]], SamplingMeasure::Uniform).unwrap();
        let e = IntegrandEvaluations::new(s, vec![1.0]).unwrap();
        assert_eq!(integrate_trapezoid(&e).unwrap_err(), Error::TrapezoidDimension);
    }

    #[test]
    fn trapezoid_weights_by_density() {
        // ∫ f_T = 1 for any design
        let m = SamplingMeasure::linear(0.5).unwrap();
        let t: Vec<f64> = (0..=1000).map(|i| i as f64 / 1000.0).collect();
        let s = DesignSample::on_interval(t, m).unwrap();
        let e = IntegrandEvaluations::from_fn(s, |_| 1.0).unwrap();
        assert_abs_diff_eq!(integrate_trapezoid(&e).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn control_examples() {
        let e = ev(&[0.1, 0.5, 0.9], |t| t);
        let est = Rule::ControlUnbiased.estimate(&e, &WeightOptions::default()).unwrap();
        assert_abs_diff_eq!(est, 1.9 / 3.0, epsilon = 1e-14);
        let three = integrate_control_threeterm(&e, &VolumeOptions::default()).unwrap();
        assert_abs_diff_eq!(three, 0.3 * 0.1 + 0.2 / 3.0 * 0.5 + 1.9 / 3.0 * 0.9, epsilon = 1e-14);
        let two = ev(&[0.3, 0.35], |t| t * t);
        assert_abs_diff_eq!(
            Rule::ControlUnbiased.estimate(&two, &WeightOptions::default()).unwrap(),
            integrate_mean(&two).unwrap(),
            epsilon = 1e-15
        );
    }

    #[test]
    fn length_mismatch() {
        let s = DesignSample::uniform_interval(vec![0.1, 0.2]).unwrap();
        assert!(IntegrandEvaluations::new(s.clone(), vec![1.0]).is_err());
        assert!(IntegrandEvaluations::new(s, vec![1.0, f64::NAN]).is_err());
    }

    #[test]
    fn rate_exponents() {
        assert_eq!(Rule::ControlNn.rate_exponent(1.0, 2), 1.0);
        assert_eq!(Rule::Mean.rate_exponent(1.0, 2), 0.5);
        assert_eq!(Rule::Trapezoid.rate_exponent(0.5, 1), 0.5);
        assert_eq!(Rule::auto(1), Rule::ControlUnbiased);
        assert_eq!(Rule::auto(3), Rule::ControlNn);
    }

    proptest! {
        #[test]
        fn threeterm_matches_nn_weights_2d(seed in any::<u64>(), m in 2usize..80) {
            let mut r = rng::from_seed(seed);
            let s = DesignSample::draw(Domain::cube(2).unwrap(), SamplingMeasure::Uniform, m, &mut r).unwrap();
            let e = IntegrandEvaluations::from_fn(s, |p| (5.0 * p[0]).sin() + p[1] * p[1]).unwrap();
            let w = control_weights_nn(&e.sample, &WeightOptions::default()).unwrap();
            let a = integrate_control(&e, &w).unwrap();
            let b = integrate_control_threeterm(&e, &VolumeOptions::default()).unwrap();
            prop_assert!((a - b).abs() < 1e-10);
        }

        #[test]
        fn linearity(seed in any::<u64>(), m in 4usize..60, a in -3.0f64..3.0, b in -3.0f64..3.0) {
            let mut r = rng::from_seed(seed);
            let s = DesignSample::draw(Domain::cube(1).unwrap(), SamplingMeasure::Uniform, m, &mut r).unwrap();
            let f = |t: f64| t.sqrt();
            let g = |t: f64| (3.0 * t).cos();
            let ef = IntegrandEvaluations::from_fn(s.clone(), |p| f(p[0])).unwrap();
            let eg = IntegrandEvaluations::from_fn(s.clone(), |p| g(p[0])).unwrap();
            let eh = IntegrandEvaluations::from_fn(s, |p| a * f(p[0]) + b * g(p[0])).unwrap();
            let opts = WeightOptions::default();
            for rule in [Rule::Mean, Rule::Trapezoid, Rule::ControlUnbiased, Rule::ControlNn] {
                let lhs = rule.estimate(&eh, &opts).unwrap();
                let rhs = a * rule.estimate(&ef, &opts).unwrap() + b * rule.estimate(&eg, &opts).unwrap();
                prop_assert!((lhs - rhs).abs() < 1e-10);
            }
        }

        #[test]
        fn constants_are_exact(seed in any::<u64>(), m in 2usize..60, c in -5.0f64..5.0) {
            let mut r = rng::from_seed(seed);
            let s = DesignSample::draw(Domain::cube(1).unwrap(), SamplingMeasure::Uniform, m, &mut r).unwrap();
            let e = IntegrandEvaluations::from_fn(s, |_| c).unwrap();
            for rule in [Rule::Mean, Rule::Trapezoid, Rule::ControlUnbiased, Rule::ControlNn] {
                prop_assert!((rule.estimate(&e, &WeightOptions::default()).unwrap() - c).abs() < 1e-12);
            }
        }
    }
}
