use super::nn::{lex_cmp, NnIndex};
use super::polygon::{ClippedCell, Polygon};
use super::{DesignSample, Domain, SamplingMeasure};
use crate::numeric::neumaier_sum;
use crate::error::{Error, Result};
use crate::parallel::map_indexed;
use crate::rng::{self, Role};

/// Lower bound on the Monte Carlo volume sample size.
pub const DEFAULT_MC_FLOOR: usize = 100_000;
const MC_CHUNK: usize = 8192;
const EXACT_TOL: f64 = 1e-12;

/// How cell volumes were obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VolumeMethod {
    /// CDF differences at the midpoints of the sorted sample.
    Exact1d,
    /// Areas of the Voronoi polygons clipped to the unit square (uniform measure).
    ExactPoly2d,
    /// Proportion of draws from the sampling measure falling in each cell.
    MonteCarlo,
}

#[derive(Debug, Clone)]
pub struct VolumeOptions {
    /// Monte Carlo sample size; defaults to `max(1e5, 100 M)`.
    pub mc_samples: Option<usize>,
    pub seed: u64,
    /// Use Monte Carlo even where an exact backend exists.
    pub force_monte_carlo: bool,
}

impl Default for VolumeOptions {
    fn default() -> Self {
        Self {
            mc_samples: None,
            seed: 0x5EED,
            force_monte_carlo: false,
        }
    }
}

impl VolumeOptions {
    pub fn monte_carlo(samples: usize, seed: u64) -> Self {
        Self {
            mc_samples: Some(samples),
            seed,
            force_monte_carlo: true,
        }
    }

    fn mc_size(&self, m: usize) -> usize {
        self.mc_samples
            .unwrap_or_else(|| DEFAULT_MC_FLOOR.max(100 * m))
            .max(1)
    }

    pub fn method_for(&self, sample: &DesignSample) -> VolumeMethod {
        if self.force_monte_carlo {
            return VolumeMethod::MonteCarlo;
        }
        match sample.domain() {
            Domain::UnitCube { dim: 1 } => VolumeMethod::Exact1d,
            Domain::UnitCube { dim: 2 } if sample.measure().is_uniform() => VolumeMethod::ExactPoly2d,
            _ => VolumeMethod::MonteCarlo,
        }
    }
}

/// Degrees, standard Voronoi volumes and (optionally) leave-one-out
/// cumulative volumes of a design.
#[derive(Debug, Clone)]
pub struct VoronoiSummary {
    pub degrees: Vec<usize>,
    pub std_volumes: Vec<f64>,
    pub loo_cum_volumes: Option<Vec<f64>>,
    pub volume_method: VolumeMethod,
    pub mc_samples: Option<usize>,
}

impl VoronoiSummary {
    /// Tolerance on the volume sum identities for the backend used.
    pub fn tolerance(&self) -> f64 {
        match (self.volume_method, self.mc_samples) {
            (VolumeMethod::MonteCarlo, Some(n)) => 3.0 / (n as f64).sqrt(),
            _ => EXACT_TOL,
        }
    }

    /// Check `Σ d = M`, `Σ V = 1` and `Σ c = M`.
    pub fn validate(&self) -> Result<()> {
        let m = self.degrees.len();
        let dsum: usize = self.degrees.iter().sum();
        if dsum != m {
            return Err(Error::Numerical(format!("degree sum {dsum} != M = {m}")));
        }
        let tol = self.tolerance();
        let vsum = neumaier_sum(self.std_volumes.iter().copied());
        if (vsum - 1.0).abs() > tol {
            return Err(Error::Numerical(format!("volume sum {vsum} != 1")));
        }
        if let Some(c) = &self.loo_cum_volumes {
            let csum = neumaier_sum(c.iter().copied());
            if (csum - m as f64).abs() > tol * m as f64 {
                return Err(Error::Numerical(format!("cumulative volume sum {csum} != {m}")));
            }
        }
        Ok(())
    }
}

/// `d_l = #{m != l : NN^{(m)}(T_m) = l}`.
pub fn degrees(sample: &DesignSample) -> Result<Vec<usize>> {
    degrees_with(&NnIndex::new(sample))
}

pub(crate) fn degrees_with(index: &NnIndex) -> Result<Vec<usize>> {
    let m = index.len();
    if m < 2 {
        return Err(Error::InsufficientPoints { needed: 2, got: m });
    }
    let nn = map_indexed(m, |i| index.nearest_excluding(index.point(i), i));
    let mut deg = vec![0usize; m];
    for j in nn {
        deg[j?] += 1;
    }
    Ok(deg)
}

/// Leave-one-out nearest neighbor of every design point.
pub fn loo_neighbors(sample: &DesignSample) -> Result<Vec<usize>> {
    let index = NnIndex::new(sample);
    if sample.len() < 2 {
        return Err(Error::InsufficientPoints {
            needed: 2,
            got: sample.len(),
        });
    }
    map_indexed(sample.len(), |i| index.nearest_excluding(index.point(i), i))
        .into_iter()
        .collect()
}

/// ρ-measure of each standard Voronoi cell.
pub fn voronoi_volumes(sample: &DesignSample, opts: &VolumeOptions) -> Result<(Vec<f64>, VolumeMethod)> {
    let method = opts.method_for(sample);
    let v = match method {
        VolumeMethod::Exact1d => volumes_1d(sample)?,
        VolumeMethod::ExactPoly2d => {
            let index = NnIndex::new(sample);
            map_indexed(sample.len(), |i| cell_2d(&index, i, None).area)
        }
        VolumeMethod::MonteCarlo => monte_carlo(sample, opts, false)?.0,
    };
    Ok((v, method))
}

/// `c_l = Σ_{m != l} V^{(m)}_l`, the measure of `T_l`'s cell summed over all
/// single-point deletions.
pub fn loo_cumulative_volumes(sample: &DesignSample, opts: &VolumeOptions) -> Result<Vec<f64>> {
    if sample.len() < 2 {
        return Err(Error::InsufficientPoints {
            needed: 2,
            got: sample.len(),
        });
    }
    match opts.method_for(sample) {
        VolumeMethod::Exact1d => loo_1d(sample),
        VolumeMethod::ExactPoly2d => Ok(loo_2d(sample)),
        VolumeMethod::MonteCarlo => Ok(monte_carlo(sample, opts, true)?
            .1
            .expect("requested cumulative volumes")),
    }
}

/// Degrees, volumes and, when `with_loo`, cumulative volumes.
pub fn voronoi_summary(sample: &DesignSample, opts: &VolumeOptions, with_loo: bool) -> Result<VoronoiSummary> {
    let m = sample.len();
    if m < 2 {
        return Err(Error::InsufficientPoints { needed: 2, got: m });
    }
    let index = NnIndex::new(sample);
    let degrees = degrees_with(&index)?;
    let method = opts.method_for(sample);
    let (std_volumes, loo) = match method {
        VolumeMethod::Exact1d => (volumes_1d(sample)?, if with_loo { Some(loo_1d(sample)?) } else { None }),
        VolumeMethod::ExactPoly2d => {
            let v = map_indexed(m, |i| cell_2d(&index, i, None).area);
            (v, with_loo.then(|| loo_2d(sample)))
        }
        VolumeMethod::MonteCarlo => monte_carlo(sample, opts, with_loo)?,
    };
    Ok(VoronoiSummary {
        degrees,
        std_volumes,
        loo_cum_volumes: loo,
        volume_method: method,
        mc_samples: (method == VolumeMethod::MonteCarlo).then(|| opts.mc_size(m)),
    })
}

// ---------------------------------------------------------------- d = 1

/// Sample indices sorted by (coordinate, index).
fn sorted_order(sample: &DesignSample) -> Vec<usize> {
    let mut order: Vec<usize> = (0..sample.len()).collect();
    order.sort_by(|&a, &b| lex_cmp(sample.point(a), sample.point(b)).then(a.cmp(&b)));
    order
}

fn checked_cdf(measure: &SamplingMeasure, x: f64, index: usize) -> Result<f64> {
    let f = measure.cdf(x);
    if f.is_finite() {
        Ok(f)
    } else {
        Err(Error::NonFiniteDensity { index })
    }
}

fn volumes_1d(sample: &DesignSample) -> Result<Vec<f64>> {
    let order = sorted_order(sample);
    let x = |i: usize| sample.point(i)[0];
    // duplicates collapse onto the first occurrence in (coordinate, index) order
    let reps: Vec<usize> = order
        .iter()
        .enumerate()
        .filter(|&(k, &i)| k == 0 || x(order[k - 1]) != x(i))
        .map(|(_, &i)| i)
        .collect();
    let mu = sample.measure();
    let mut v = vec![0.0; sample.len()];
    let n = reps.len();
    for k in 0..n {
        let lo = if k == 0 { 0.0 } else { 0.5 * (x(reps[k - 1]) + x(reps[k])) };
        let hi = if k + 1 == n { 1.0 } else { 0.5 * (x(reps[k]) + x(reps[k + 1])) };
        v[reps[k]] = checked_cdf(mu, hi, reps[k])? - checked_cdf(mu, lo, reps[k])?;
    }
    Ok(v)
}

fn loo_1d(sample: &DesignSample) -> Result<Vec<f64>> {
    let m = sample.len();
    let order = sorted_order(sample);
    let xs: Vec<f64> = order.iter().map(|&i| sample.point(i)[0]).collect();
    if xs.windows(2).any(|w| w[0] == w[1]) {
        return loo_by_recomputation(sample, volumes_1d);
    }
    let mu = sample.measure();
    let cdf = |t: f64, k: usize| checked_cdf(mu, t, order[k]);
    let mid = |a: usize, b: usize| 0.5 * (xs[a] + xs[b]);
    let mut c = vec![0.0; m];
    for k in 0..m {
        let lo = if k == 0 { 0.0 } else { mid(k - 1, k) };
        let hi = if k + 1 == m { 1.0 } else { mid(k, k + 1) };
        let own = cdf(hi, k)? - cdf(lo, k)?;
        let mut acc = 0.0;
        let mut unaffected = m - 1;
        if k > 0 {
            // delete the left neighbor
            let lo2 = if k == 1 { 0.0 } else { mid(k - 2, k) };
            acc += cdf(hi, k)? - cdf(lo2, k)?;
            unaffected -= 1;
        }
        if k + 1 < m {
            // delete the right neighbor
            let hi2 = if k + 2 == m { 1.0 } else { mid(k, k + 2) };
            acc += cdf(hi2, k)? - cdf(lo, k)?;
            unaffected -= 1;
        }
        c[order[k]] = unaffected as f64 * own + acc;
    }
    Ok(c)
}

/// Generic fallback: delete each point and recompute all volumes.
fn loo_by_recomputation<F>(sample: &DesignSample, volumes: F) -> Result<Vec<f64>>
where
    F: Fn(&DesignSample) -> Result<Vec<f64>> + Sync + Send,
{
    let m = sample.len();
    let per_deletion = map_indexed(m, |del| {
        let keep: Vec<usize> = (0..m).filter(|&i| i != del).collect();
        volumes(&sample.subset(&keep)).map(|v| (keep, v))
    });
    let mut c = vec![0.0; m];
    for r in per_deletion {
        let (keep, v) = r?;
        for (&i, vi) in keep.iter().zip(v) {
            c[i] += vi;
        }
    }
    Ok(c)
}

// ---------------------------------------------------------------- d = 2

/// Voronoi cell of `site` clipped to the unit square, ignoring `excluded`.
///
/// Neighbors are added in increasing distance until none can reach the
/// current polygon (distance at least twice the farthest vertex).
pub(crate) fn cell_2d(index: &NnIndex, site: usize, excluded: Option<usize>) -> ClippedCell {
    let p = index.point(site);
    let p = [p[0], p[1]];
    let skip: Vec<usize> = std::iter::once(site).chain(excluded).collect();
    let available = index.len() - skip.len();
    let mut k = available.min(16);
    loop {
        let mut poly = Polygon::unit_square();
        let mut done = k == available;
        for (key, q) in index.k_nearest(&p, k, &skip) {
            if key == 0.0 {
                // coincident site: the smaller index owns the cell
                if q < site {
                    return ClippedCell {
                        polygon: Polygon::empty(),
                        area: 0.0,
                        neighbors: vec![q],
                    };
                }
                continue;
            }
            if key >= 4.0 * poly.max_sq_dist(p) {
                done = true;
                break;
            }
            let qp = index.point(q);
            poly.clip_bisector(p, [qp[0], qp[1]], q);
            if poly.is_empty() {
                done = true;
                break;
            }
        }
        if done {
            let area = poly.area();
            let neighbors = poly.active_sites();
            return ClippedCell {
                polygon: poly,
                area,
                neighbors,
            };
        }
        k = (2 * k).min(available);
    }
}

fn has_duplicates(sample: &DesignSample) -> bool {
    let order = sorted_order(sample);
    order
        .windows(2)
        .any(|w| lex_cmp(sample.point(w[0]), sample.point(w[1])).is_eq())
}

fn loo_2d(sample: &DesignSample) -> Vec<f64> {
    let m = sample.len();
    let index = NnIndex::new(sample);
    if has_duplicates(sample) {
        return map_indexed(m, |l| {
            (0..m)
                .filter(|&del| del != l)
                .map(|del| cell_2d(&index, l, Some(del)).area)
                .sum()
        });
    }
    // deleting m only changes the cells that share an edge with m
    map_indexed(m, |l| {
        let base = cell_2d(&index, l, None);
        let delta: f64 = base
            .neighbors
            .iter()
            .map(|&del| cell_2d(&index, l, Some(del)).area - base.area)
            .sum();
        (m - 1) as f64 * base.area + delta
    })
}

// ---------------------------------------------------------------- Monte Carlo

/// Returns standard volumes and, if asked, cumulative volumes. Deleting `m`
/// hands each draw whose nearest site is `m` to its second-nearest site, so
/// all `M` deleted diagrams are evaluated on the same draws.
fn monte_carlo(sample: &DesignSample, opts: &VolumeOptions, with_loo: bool) -> Result<(Vec<f64>, Option<Vec<f64>>)> {
    let m = sample.len();
    let n = opts.mc_size(m);
    let domain = sample.domain();
    let measure = sample.measure();
    let index = NnIndex::new(sample);
    let chunks = n.div_ceil(MC_CHUNK);
    let counts = map_indexed(chunks, |c| {
        let mut rng = rng::stream(opts.seed, 0, Role::Volume, c as u64);
        let len = MC_CHUNK.min(n - c * MC_CHUNK);
        let mut first = vec![0u64; m];
        let mut second = vec![0u64; if with_loo { m } else { 0 }];
        let mut t = Vec::with_capacity(domain.ambient_dim());
        for _ in 0..len {
            t.clear();
            measure.sample_into(&domain, &mut rng, &mut t);
            let a = index.nearest(&t, None).expect("non-empty index");
            first[a] += 1;
            if with_loo && m > 1 {
                let b = index.nearest(&t, Some(a)).expect("at least two sites");
                second[b] += 1;
            }
        }
        (first, second)
    });
    let mut first = vec![0u64; m];
    let mut second = vec![0u64; if with_loo { m } else { 0 }];
    for (f, s) in counts {
        first.iter_mut().zip(f).for_each(|(a, b)| *a += b);
        second.iter_mut().zip(s).for_each(|(a, b)| *a += b);
    }
    let nf = n as f64;
    let v: Vec<f64> = first.iter().map(|&c| c as f64 / nf).collect();
    let c = with_loo.then(|| {
        v.iter()
            .zip(&second)
            .map(|(&vi, &s)| (m - 1) as f64 * vi + s as f64 / nf)
            .collect()
    });
    Ok((v, c))
}
