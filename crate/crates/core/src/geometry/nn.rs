use super::{DesignSample, Domain};
use crate::error::{Error, Result};
use std::cmp::Ordering;

const LEAF_SIZE: usize = 8;

#[derive(Debug, Clone)]
enum Node {
    Leaf { start: usize, end: usize },
    Split { axis: usize, value: f64, left: usize, right: usize },
}

/// Exact nearest-neighbor index (kd-tree) over a design sample.
///
/// Distances are compared through [`Domain::key`]. Exact ties are broken by
/// the lexicographic order of the coordinate vectors, then by point index,
/// so every query has a unique, deterministic answer.
#[derive(Debug, Clone)]
pub struct NnIndex {
    domain: Domain,
    k: usize,
    coords: Vec<f64>,
    perm: Vec<usize>,
    nodes: Vec<Node>,
    root: usize,
}

impl NnIndex {
    pub fn new(sample: &DesignSample) -> Self {
        Self::from_coords(sample.domain(), sample.coords().to_vec())
    }

    pub(crate) fn from_coords(domain: Domain, coords: Vec<f64>) -> Self {
        let k = domain.ambient_dim();
        let n = coords.len() / k;
        let mut idx = Self {
            domain,
            k,
            coords,
            perm: (0..n).collect(),
            nodes: Vec::with_capacity(2 * n / LEAF_SIZE + 1),
            root: 0,
        };
        if n > 0 {
            idx.root = idx.build(0, n);
        }
        idx
    }

    fn build(&mut self, start: usize, end: usize) -> usize {
        if end - start <= LEAF_SIZE {
            self.nodes.push(Node::Leaf { start, end });
            return self.nodes.len() - 1;
        }
        let k = self.k;
        let mut axis = 0;
        let mut best_spread = f64::NEG_INFINITY;
        for a in 0..k {
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for &i in &self.perm[start..end] {
                let x = self.coords[i * k + a];
                lo = lo.min(x);
                hi = hi.max(x);
            }
            if hi - lo > best_spread {
                best_spread = hi - lo;
                axis = a;
            }
        }
        let mid = start + (end - start) / 2;
        {
            let coords = &self.coords;
            self.perm[start..end].select_nth_unstable_by(mid - start, |&a, &b| {
                coords[a * k + axis].total_cmp(&coords[b * k + axis])
            });
        }
        let value = self.coords[self.perm[mid] * k + axis];
        let left = self.build(start, mid);
        let right = self.build(mid, end);
        self.nodes.push(Node::Split {
            axis,
            value,
            left,
            right,
        });
        self.nodes.len() - 1
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.k..(i + 1) * self.k]
    }

    /// Total order on candidates at the same query: distance, then coordinates, then index.
    #[inline]
    pub fn compare(&self, (ka, a): (f64, usize), (kb, b): (f64, usize)) -> Ordering {
        ka.total_cmp(&kb)
            .then_with(|| lex_cmp(self.point(a), self.point(b)))
            .then(a.cmp(&b))
    }

    /// Nearest point to `t`, skipping `excluded` if given.
    pub fn nearest(&self, t: &[f64], excluded: Option<usize>) -> Option<usize> {
        if self.is_empty() {
            return None;
        }
        let mut best: Option<(f64, usize)> = None;
        let mut stack = vec![(self.root, 0.0f64)];
        while let Some((node, bound)) = stack.pop() {
            if best.is_some_and(|(bk, _)| bound > bk) {
                continue;
            }
            match self.nodes[node] {
                Node::Leaf { start, end } => {
                    for &i in &self.perm[start..end] {
                        if Some(i) == excluded {
                            continue;
                        }
                        let cand = (self.domain.key(t, self.point(i)), i);
                        if best.is_none_or(|b| self.compare(cand, b) == Ordering::Less) {
                            best = Some(cand);
                        }
                    }
                }
                Node::Split {
                    axis,
                    value,
                    left,
                    right,
                } => {
                    let diff = t[axis] - value;
                    let (near, far) = if diff < 0.0 { (left, right) } else { (right, left) };
                    // equality keeps the far side: exact ties may live there
                    stack.push((far, bound.max(diff * diff)));
                    stack.push((near, bound));
                }
            }
        }
        best.map(|(_, i)| i)
    }

    /// Leave-one-out nearest neighbor of point `m` among the other points.
    pub fn nearest_excluding(&self, t: &[f64], excluded: usize) -> Result<usize> {
        if self.len() < 2 {
            return Err(Error::InsufficientPoints {
                needed: 2,
                got: self.len(),
            });
        }
        if excluded >= self.len() {
            return Err(Error::InvalidParameter(format!(
                "excluded id {excluded} out of range for {} points",
                self.len()
            )));
        }
        Ok(self
            .nearest(t, Some(excluded))
            .expect("index has at least one other point"))
    }

    /// The `count` nearest points to `t` (fewer if the index is smaller), sorted
    /// by the tie-aware order, skipping every id in `excluded`.
    pub fn k_nearest(&self, t: &[f64], count: usize, excluded: &[usize]) -> Vec<(f64, usize)> {
        let mut out: Vec<(f64, usize)> = Vec::with_capacity(count + 1);
        if count == 0 || self.is_empty() {
            return out;
        }
        let mut stack = vec![(self.root, 0.0f64)];
        while let Some((node, bound)) = stack.pop() {
            if out.len() == count && bound > out[count - 1].0 {
                continue;
            }
            match self.nodes[node] {
                Node::Leaf { start, end } => {
                    for &i in &self.perm[start..end] {
                        if excluded.contains(&i) {
                            continue;
                        }
                        let cand = (self.domain.key(t, self.point(i)), i);
                        if out.len() == count && self.compare(cand, out[count - 1]) != Ordering::Less {
                            continue;
                        }
                        let pos = out
                            .binary_search_by(|probe| self.compare(*probe, cand))
                            .unwrap_or_else(|p| p);
                        out.insert(pos, cand);
                        out.truncate(count);
                    }
                }
                Node::Split {
                    axis,
                    value,
                    left,
                    right,
                } => {
                    let diff = t[axis] - value;
                    let (near, far) = if diff < 0.0 { (left, right) } else { (right, left) };
                    stack.push((far, bound.max(diff * diff)));
                    stack.push((near, bound));
                }
            }
        }
        out
    }
}

#[inline]
pub(crate) fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    Ordering::Equal
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::SamplingMeasure;
    use crate::rng;

    fn brute(sample: &DesignSample, t: &[f64], excluded: Option<usize>) -> usize {
        let d = sample.domain();
        (0..sample.len())
            .filter(|&i| Some(i) != excluded)
            .min_by(|&a, &b| {
                let (pa, pb) = (sample.point(a), sample.point(b));
                d.key(t, pa)
                    .total_cmp(&d.key(t, pb))
                    .then_with(|| lex_cmp(pa, pb))
                    .then(a.cmp(&b))
            })
            .unwrap()
    }

    #[test]
    fn only_candidate() {
        let s = DesignSample::uniform_interval(vec![0.2, 0.8]).unwrap();
        let idx = NnIndex::new(&s);
        assert_eq!(idx.nearest_excluding(&[0.2], 0).unwrap(), 1);
    }

    #[test]
    fn symmetric_tie_goes_to_smaller_coordinate() {
        let s = DesignSample::uniform_interval(vec![0.9, 0.5, 0.1]).unwrap();
        let idx = NnIndex::new(&s);
        // 0.1 and 0.9 are equidistant from 0.5 in exact arithmetic
        assert_eq!(idx.nearest_excluding(&[0.5], 1).unwrap(), 2);
        let s = DesignSample::uniform_interval(vec![0.25, 0.5, 0.75]).unwrap();
        let idx = NnIndex::new(&s);
        assert_eq!(idx.nearest_excluding(&[0.5], 1).unwrap(), 0);
    }

    #[test]
    fn duplicates_tie_on_index() {
        let s = DesignSample::uniform_interval(vec![0.3, 0.7, 0.3, 0.3]).unwrap();
        let idx = NnIndex::new(&s);
        assert_eq!(idx.nearest_excluding(&[0.3], 0).unwrap(), 2);
        assert_eq!(idx.nearest_excluding(&[0.3], 2).unwrap(), 0);
        assert_eq!(idx.nearest(&[0.31], None).unwrap(), 0);
    }

    #[test]
    fn too_few_points() {
        let s = DesignSample::uniform_interval(vec![0.4]).unwrap();
        let e = NnIndex::new(&s).nearest_excluding(&[0.4], 0).unwrap_err();
        assert!(e.to_string().contains("insufficient points for LOO query"));
    }

    #[test]
    fn matches_brute_force_in_the_square() {
        let mut r = rng::from_seed(11);
        let d = Domain::cube(2).unwrap();
        let s = DesignSample::draw(d, SamplingMeasure::Uniform, 200, &mut r).unwrap();
        let idx = NnIndex::new(&s);
        for q in 0..50 {
            let t = SamplingMeasure::Uniform.sample(&d, &mut r);
            assert_eq!(idx.nearest(&t, None), Some(brute(&s, &t, None)));
            let ex = q * 3;
            assert_eq!(idx.nearest(&t, Some(ex)), Some(brute(&s, &t, Some(ex))));
        }
    }

    #[test]
    fn k_nearest_sorted_and_complete() {
        let mut r = rng::from_seed(5);
        let d = Domain::cube(3).unwrap();
        let s = DesignSample::draw(d, SamplingMeasure::Uniform, 300, &mut r).unwrap();
        let idx = NnIndex::new(&s);
        let t = [0.5, 0.5, 0.5];
        let got = idx.k_nearest(&t, 20, &[7]);
        let mut all: Vec<(f64, usize)> = (0..300)
            .filter(|&i| i != 7)
            .map(|i| (d.key(&t, s.point(i)), i))
            .collect();
        all.sort_by(|a, b| idx.compare(*a, *b));
        assert_eq!(got, all[..20].to_vec());
    }

    #[test]
    fn grid_ties_match_brute_force() {
        // lattice points produce many exact ties
        let d = Domain::cube(2).unwrap();
        let mut pts = Vec::new();
        for i in 0..6 {
            for j in 0..6 {
                pts.push(vec![i as f64 / 5.0, j as f64 / 5.0]);
            }
        }
        let s = DesignSample::from_points(d, &pts, SamplingMeasure::Uniform).unwrap();
        let idx = NnIndex::new(&s);
        for m in 0..s.len() {
            assert_eq!(idx.nearest_excluding(s.point(m), m).unwrap(), brute(&s, s.point(m), Some(m)));
        }
        let t = [0.1, 0.1];
        assert_eq!(idx.nearest(&t, None), Some(brute(&s, &t, None)));
    }
}
