//! Domains, design samples, nearest-neighbor queries and Voronoi summaries.

mod measure;
mod nn;
mod polygon;
mod voronoi;

pub use measure::{interp_linear, SamplingMeasure, TabulatedDensity};
pub use nn::NnIndex;
pub use polygon::{ClippedCell, Polygon};
pub use voronoi::{
    degrees, loo_cumulative_volumes, loo_neighbors, voronoi_summary, voronoi_volumes, VolumeMethod,
    VolumeOptions, VoronoiSummary, DEFAULT_MC_FLOOR,
};

use crate::error::{Error, Result};
use rand::Rng;

const SPHERE_NORM_TOL: f64 = 1e-9;

/// Integration domain: the unit cube `[0,1]^d` or the unit sphere `S^d ⊂ R^{d+1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    UnitCube { dim: usize },
    UnitSphere { dim: usize },
}

impl Domain {
    pub fn cube(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDomain("dimension must be >= 1".into()));
        }
        Ok(Domain::UnitCube { dim })
    }

    pub fn sphere(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDomain("dimension must be >= 1".into()));
        }
        Ok(Domain::UnitSphere { dim })
    }

    /// Intrinsic dimension `d`.
    pub fn dim(&self) -> usize {
        match *self {
            Domain::UnitCube { dim } | Domain::UnitSphere { dim } => dim,
        }
    }

    /// Number of stored coordinates per point (`d + 1` on the sphere).
    pub fn ambient_dim(&self) -> usize {
        match *self {
            Domain::UnitCube { dim } => dim,
            Domain::UnitSphere { dim } => dim + 1,
        }
    }

    pub fn is_sphere(&self) -> bool {
        matches!(self, Domain::UnitSphere { .. })
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        if p.len() != self.ambient_dim() || p.iter().any(|x| !x.is_finite()) {
            return false;
        }
        match self {
            Domain::UnitCube { .. } => p.iter().all(|&x| (0.0..=1.0).contains(&x)),
            Domain::UnitSphere { .. } => {
                let n2: f64 = p.iter().map(|x| x * x).sum();
                (n2.sqrt() - 1.0).abs() <= SPHERE_NORM_TOL
            }
        }
    }

    /// Monotone surrogate of the metric used for all comparisons: squared
    /// Euclidean distance in the cube, squared chord length on the sphere.
    #[inline]
    pub fn key(&self, a: &[f64], b: &[f64]) -> f64 {
        sq_dist(a, b)
    }

    /// Euclidean distance in the cube, geodesic (great-circle) distance on the sphere.
    pub fn distance(&self, a: &[f64], b: &[f64]) -> f64 {
        let chord = sq_dist(a, b).sqrt();
        match self {
            Domain::UnitCube { .. } => chord,
            Domain::UnitSphere { .. } => 2.0 * (0.5 * chord).min(1.0).asin(),
        }
    }
}

#[inline]
pub(crate) fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// `M` design points in a domain, with the measure they were drawn from.
#[derive(Debug, Clone)]
pub struct DesignSample {
    domain: Domain,
    coords: Vec<f64>,
    measure: SamplingMeasure,
}

impl DesignSample {
    /// Build from row-major coordinates (`M * ambient_dim` values).
    pub fn new(domain: Domain, coords: Vec<f64>, measure: SamplingMeasure) -> Result<Self> {
        let k = domain.ambient_dim();
        if coords.is_empty() {
            return Err(Error::Empty);
        }
        if !coords.len().is_multiple_of(k) {
            return Err(Error::LengthMismatch {
                expected: (coords.len() / k + 1) * k,
                got: coords.len(),
            });
        }
        measure.check_domain(&domain)?;
        for (i, p) in coords.chunks_exact(k).enumerate() {
            if !domain.contains(p) {
                return Err(Error::PointOutsideDomain { index: i });
            }
        }
        Ok(Self {
            domain,
            coords,
            measure,
        })
    }

    /// Convenience constructor for `[0,1]` samples.
    pub fn on_interval(points: Vec<f64>, measure: SamplingMeasure) -> Result<Self> {
        Self::new(Domain::UnitCube { dim: 1 }, points, measure)
    }

    pub fn uniform_interval(points: Vec<f64>) -> Result<Self> {
        Self::on_interval(points, SamplingMeasure::Uniform)
    }

    pub fn from_points(domain: Domain, points: &[Vec<f64>], measure: SamplingMeasure) -> Result<Self> {
        let coords = points.iter().flat_map(|p| p.iter().copied()).collect();
        Self::new(domain, coords, measure)
    }

    /// Draw `m` i.i.d. points from `measure` on `domain`.
    pub fn draw<R: Rng + ?Sized>(
        domain: Domain,
        measure: SamplingMeasure,
        m: usize,
        rng: &mut R,
    ) -> Result<Self> {
        measure.check_domain(&domain)?;
        let mut coords = Vec::with_capacity(m * domain.ambient_dim());
        for _ in 0..m {
            measure.sample_into(&domain, rng, &mut coords);
        }
        Self::new(domain, coords, measure)
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn measure(&self) -> &SamplingMeasure {
        &self.measure
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.domain.ambient_dim()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        let k = self.domain.ambient_dim();
        &self.coords[i * k..(i + 1) * k]
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = &[f64]> {
        self.coords.chunks_exact(self.domain.ambient_dim())
    }

    /// Sub-sample keeping the listed indices, in the given order.
    pub fn subset(&self, idx: &[usize]) -> Self {
        let mut coords = Vec::with_capacity(idx.len() * self.domain.ambient_dim());
        for &i in idx {
            coords.extend_from_slice(self.point(i));
        }
        Self {
            domain: self.domain,
            coords,
            measure: self.measure.clone(),
        }
    }

    /// Density of the sampling measure at every design point.
    pub fn densities(&self) -> Result<Vec<f64>> {
        self.points()
            .enumerate()
            .map(|(i, p)| {
                let f = self.measure.density(p);
                if f.is_finite() {
                    Ok(f)
                } else {
                    Err(Error::NonFiniteDensity { index: i })
                }
            })
            .collect()
    }
}
