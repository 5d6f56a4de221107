//! Brute-force oracles shared by the integration tests. Nothing here calls
//! into the geometry code under test.
#![allow(dead_code)]

use std::cmp::Ordering;

pub type Pt = Vec<f64>;

fn sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Nearest of `pts` to `q` among indices `keep`, with ties broken by
/// coordinates then index.
pub fn argmin_among(pts: &[Pt], q: &[f64], keep: impl Iterator<Item = usize>) -> Option<usize> {
    keep.min_by(|&i, &j| {
        sq(&pts[i], q)
            .partial_cmp(&sq(&pts[j], q))
            .unwrap()
            .then_with(|| pts[i].partial_cmp(&pts[j]).unwrap_or(Ordering::Equal))
            .then(i.cmp(&j))
    })
}

pub fn nearest_excluding(pts: &[Pt], q: &[f64], ex: usize) -> usize {
    argmin_among(pts, q, (0..pts.len()).filter(|&i| i != ex)).unwrap()
}

pub fn degrees(pts: &[Pt]) -> Vec<usize> {
    let mut d = vec![0; pts.len()];
    for i in 0..pts.len() {
        d[nearest_excluding(pts, &pts[i], i)] += 1;
    }
    d
}

/// Uniform-measure cell lengths on `[0, 1]` for the points in `keep`, by
/// evaluating the nearest site on every interval between candidate breakpoints.
pub fn volumes_1d(pts: &[Pt], keep: &[usize]) -> Vec<f64> {
    let mut cuts = vec![0.0, 1.0];
    for &i in keep {
        for &j in keep {
            cuts.push(0.5 * (pts[i][0] + pts[j][0]));
        }
    }
    cuts.retain(|c| (0.0..=1.0).contains(c));
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut v = vec![0.0; pts.len()];
    for w in cuts.windows(2) {
        let mid = [0.5 * (w[0] + w[1])];
        let k = argmin_among(pts, &mid, keep.iter().copied()).unwrap();
        v[k] += w[1] - w[0];
    }
    v
}

fn clip(poly: &[[f64; 2]], s: &[f64], o: &[f64]) -> Vec<[f64; 2]> {
    // keep x with |x − s|² ≤ |x − o|², i.e. n·x ≤ c
    let n = [o[0] - s[0], o[1] - s[1]];
    let c = 0.5 * (o[0] * o[0] + o[1] * o[1] - s[0] * s[0] - s[1] * s[1]);
    let f = |p: &[f64; 2]| n[0] * p[0] + n[1] * p[1] - c;
    let mut out = Vec::new();
    for k in 0..poly.len() {
        let (a, b) = (poly[k], poly[(k + 1) % poly.len()]);
        let (fa, fb) = (f(&a), f(&b));
        if fa <= 0.0 {
            out.push(a);
        }
        if (fa < 0.0 && fb > 0.0) || (fa > 0.0 && fb < 0.0) {
            let t = fa / (fa - fb);
            out.push([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]);
        }
    }
    out
}

fn area(poly: &[[f64; 2]]) -> f64 {
    let mut s = 0.0;
    for k in 0..poly.len() {
        let (a, b) = (poly[k], poly[(k + 1) % poly.len()]);
        s += a[0] * b[1] - a[1] * b[0];
    }
    0.5 * s.abs()
}

/// Uniform-measure Voronoi areas in the unit square, clipping each cell by
/// every other site in `keep`. Sites are assumed distinct.
pub fn volumes_2d(pts: &[Pt], keep: &[usize]) -> Vec<f64> {
    let mut v = vec![0.0; pts.len()];
    for &i in keep {
        let mut poly = vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        for &j in keep {
            if j != i && !poly.is_empty() {
                poly = clip(&poly, &pts[i], &pts[j]);
            }
        }
        v[i] = if poly.len() < 3 { 0.0 } else { area(&poly) };
    }
    v
}

pub fn volumes(pts: &[Pt], keep: &[usize]) -> Vec<f64> {
    if pts[0].len() == 1 {
        volumes_1d(pts, keep)
    } else {
        volumes_2d(pts, keep)
    }
}

/// `ĉ_ℓ = Σ_{m≠ℓ} V_ℓ(sample without m)` by full recomputation.
pub fn cumulative_volumes(pts: &[Pt]) -> Vec<f64> {
    let m = pts.len();
    let mut c = vec![0.0; m];
    for del in 0..m {
        let keep: Vec<usize> = (0..m).filter(|&i| i != del).collect();
        let v = volumes(pts, &keep);
        for l in keep {
            c[l] += v[l];
        }
    }
    c
}

pub fn unbiased_weights(pts: &[Pt]) -> Vec<f64> {
    let m = pts.len() as f64;
    let d = degrees(pts);
    let c = cumulative_volumes(pts);
    d.iter().zip(&c).map(|(&d, c)| (1.0 + c - d as f64) / m).collect()
}

pub fn nn_weights(pts: &[Pt]) -> Vec<f64> {
    let m = pts.len();
    let d = degrees(pts);
    let all: Vec<usize> = (0..m).collect();
    let v = volumes(pts, &all);
    d.iter().zip(&v).map(|(&d, v)| (1.0 + m as f64 * v - d as f64) / m as f64).collect()
}

/// Least-squares slope of `y` on `x`.
pub fn ols_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}
