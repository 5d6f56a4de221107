use super::Domain;
use crate::error::{Error, Result};
use rand::Rng;
use rand_distr::StandardNormal;

/// Probability distribution of the design points.
///
/// `Linear` and `Tabulated` live on `[0,1]`; `Uniform` works on every domain
/// (on the sphere it is the normalised surface measure, with density 1).
#[derive(Debug, Clone, PartialEq)]
pub enum SamplingMeasure {
    Uniform,
    /// `f(t) = 1 - b/2 + b t` on `[0,1]`, `b ∈ [0, 2)`.
    Linear { b: f64 },
    Tabulated(TabulatedDensity),
}

impl SamplingMeasure {
    pub fn linear(b: f64) -> Result<Self> {
        if !(0.0..2.0).contains(&b) {
            return Err(Error::InvalidMeasure(format!(
                "linear density slope b = {b} outside [0, 2)"
            )));
        }
        Ok(if b == 0.0 {
            SamplingMeasure::Uniform
        } else {
            SamplingMeasure::Linear { b }
        })
    }

    pub fn is_uniform(&self) -> bool {
        matches!(self, SamplingMeasure::Uniform)
    }

    pub(crate) fn check_domain(&self, domain: &Domain) -> Result<()> {
        match self {
            SamplingMeasure::Uniform => Ok(()),
            _ if *domain == Domain::UnitCube { dim: 1 } => Ok(()),
            _ => Err(Error::InvalidMeasure(
                "non-uniform measures are only supported on [0,1]".into(),
            )),
        }
    }

    /// Density with respect to Lebesgue measure (normalised surface measure on the sphere).
    pub fn density(&self, p: &[f64]) -> f64 {
        match self {
            SamplingMeasure::Uniform => 1.0,
            SamplingMeasure::Linear { b } => 1.0 - b / 2.0 + b * p[0],
            SamplingMeasure::Tabulated(t) => t.density(p[0]),
        }
    }

    /// CDF on `[0,1]`.
    pub fn cdf(&self, x: f64) -> f64 {
        let x = x.clamp(0.0, 1.0);
        match self {
            SamplingMeasure::Uniform => x,
            SamplingMeasure::Linear { b } => (1.0 - b / 2.0) * x + b * x * x / 2.0,
            SamplingMeasure::Tabulated(t) => t.cdf(x),
        }
    }

    /// Inverse CDF on `[0,1]`.
    pub fn quantile(&self, u: f64) -> f64 {
        let u = u.clamp(0.0, 1.0);
        match self {
            SamplingMeasure::Uniform => u,
            SamplingMeasure::Linear { b } => {
                let a = 1.0 - b / 2.0;
                // root of (b/2) t^2 + a t - u = 0, written without cancellation
                (2.0 * u / (a + (a * a + 2.0 * b * u).sqrt())).min(1.0)
            }
            SamplingMeasure::Tabulated(t) => t.quantile(u),
        }
    }

    pub(crate) fn sample_into<R: Rng + ?Sized>(&self, domain: &Domain, rng: &mut R, out: &mut Vec<f64>) {
        match (self, domain) {
            (SamplingMeasure::Uniform, Domain::UnitCube { dim }) => {
                out.extend((0..*dim).map(|_| rng.random::<f64>()));
            }
            (SamplingMeasure::Uniform, Domain::UnitSphere { dim }) => loop {
                let v: Vec<f64> = (0..=*dim).map(|_| rng.sample(StandardNormal)).collect();
                let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                if n > 1e-12 {
                    out.extend(v.iter().map(|x| x / n));
                    break;
                }
            },
            _ => out.push(self.quantile(rng.random::<f64>())),
        }
    }

    /// Draw one point.
    pub fn sample<R: Rng + ?Sized>(&self, domain: &Domain, rng: &mut R) -> Vec<f64> {
        let mut v = Vec::with_capacity(domain.ambient_dim());
        self.sample_into(domain, rng, &mut v);
        v
    }
}

/// Piecewise-linear density on `[0,1]`, renormalised to integrate to one.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedDensity {
    grid: Vec<f64>,
    values: Vec<f64>,
    cum: Vec<f64>,
}

impl TabulatedDensity {
    /// `grid` must be strictly increasing from 0 to 1; `values` finite and positive.
    pub fn new(grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        check_table(&grid, &values)?;
        if grid[0].abs() > 1e-12 || (grid[grid.len() - 1] - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidMeasure("density grid must span [0, 1]".into()));
        }
        if let Some(i) = values.iter().position(|&v| v <= 0.0) {
            return Err(Error::InvalidMeasure(format!(
                "density must be bounded away from 0 (value {} at grid index {i})",
                values[i]
            )));
        }
        let mut cum = Vec::with_capacity(grid.len());
        cum.push(0.0);
        for i in 1..grid.len() {
            let area = 0.5 * (values[i] + values[i - 1]) * (grid[i] - grid[i - 1]);
            cum.push(cum[i - 1] + area);
        }
        let total = cum[cum.len() - 1];
        let values = values.into_iter().map(|v| v / total).collect();
        let cum = cum.into_iter().map(|c| c / total).collect();
        Ok(Self { grid, values, cum })
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn segment(&self, x: f64) -> usize {
        let n = self.grid.len();
        match self.grid.partition_point(|&g| g <= x) {
            0 => 0,
            k if k >= n => n - 2,
            k => k - 1,
        }
    }

    pub fn density(&self, x: f64) -> f64 {
        interp_linear(&self.grid, &self.values, x)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let x = x.clamp(0.0, 1.0);
        let i = self.segment(x);
        let h = x - self.grid[i];
        let slope = (self.values[i + 1] - self.values[i]) / (self.grid[i + 1] - self.grid[i]);
        (self.cum[i] + self.values[i] * h + 0.5 * slope * h * h).min(1.0)
    }

    pub fn quantile(&self, u: f64) -> f64 {
        let u = u.clamp(0.0, 1.0);
        let n = self.grid.len();
        let i = match self.cum.partition_point(|&c| c <= u) {
            0 => 0,
            k if k >= n => n - 2,
            k => k - 1,
        };
        let target = u - self.cum[i];
        let v = self.values[i];
        let slope = (self.values[i + 1] - v) / (self.grid[i + 1] - self.grid[i]);
        let disc = (v * v + 2.0 * slope * target).max(0.0);
        let h = 2.0 * target / (v + disc.sqrt());
        (self.grid[i] + h).clamp(self.grid[i], self.grid[i + 1])
    }
}

pub(crate) fn check_table(grid: &[f64], values: &[f64]) -> Result<()> {
    if grid.len() < 2 {
        return Err(Error::InvalidTable("need at least two grid points".into()));
    }
    if grid.len() != values.len() {
        return Err(Error::LengthMismatch {
            expected: grid.len(),
            got: values.len(),
        });
    }
    if grid.iter().chain(values).any(|x| !x.is_finite()) {
        return Err(Error::InvalidTable("grid and values must be finite".into()));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidTable("grid must be strictly increasing".into()));
    }
    Ok(())
}

/// Linear interpolation on a strictly increasing grid; constant extrapolation.
pub fn interp_linear(grid: &[f64], values: &[f64], x: f64) -> f64 {
    let n = grid.len();
    if x <= grid[0] {
        return values[0];
    }
    if x >= grid[n - 1] {
        return values[n - 1];
    }
    let k = grid.partition_point(|&g| g <= x);
    let (x0, x1) = (grid[k - 1], grid[k]);
    let (y0, y1) = (values[k - 1], values[k]);
    y0 + (y1 - y0) * (x - x0) / (x1 - x0)
}
