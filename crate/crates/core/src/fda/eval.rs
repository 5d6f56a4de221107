use crate::error::{Error, Result};
use crate::geometry::interp_linear;
use std::sync::Arc;

/// A real function on the design domain.
pub trait Evaluator: Send + Sync {
    fn eval(&self, t: &[f64]) -> f64;
}

impl<F> Evaluator for F
where
    F: Fn(&[f64]) -> f64 + Send + Sync,
{
    fn eval(&self, t: &[f64]) -> f64 {
        self(t)
    }
}

impl std::fmt::Debug for dyn Evaluator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("<evaluator>")
    }
}

pub type SharedEvaluator = Arc<dyn Evaluator>;

/// Piecewise-linear function on `[0, 1]` from `(grid, values)`, constant
/// beyond the grid ends.
#[derive(Debug, Clone, PartialEq)]
pub struct Tabulated {
    grid: Vec<f64>,
    values: Vec<f64>,
}

impl Tabulated {
    pub fn new(grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if grid.len() != values.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        if grid.len() < 2 {
            return Err(Error::InvalidTable("need at least two grid points".into()));
        }
        if grid.windows(2).any(|w| !(w[1] > w[0])) || grid.iter().any(|g| !g.is_finite()) {
            return Err(Error::InvalidTable("grid must be strictly increasing".into()));
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue { index });
        }
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn shared(self) -> SharedEvaluator {
        Arc::new(self)
    }
}

impl Evaluator for Tabulated {
    fn eval(&self, t: &[f64]) -> f64 {
        interp_linear(&self.grid, &self.values, t[0])
    }
}
