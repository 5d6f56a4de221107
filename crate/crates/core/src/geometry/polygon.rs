/// Which constraint produced a polygon edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeSource {
    Boundary,
    Site(usize),
}

/// Convex polygon with a source label per edge (edge `i` runs from vertex
/// `i` to vertex `i + 1`).
#[derive(Debug, Clone, Default)]
pub struct Polygon {
    verts: Vec<[f64; 2]>,
    sources: Vec<EdgeSource>,
}

impl Polygon {
    pub fn unit_square() -> Self {
        Self {
            verts: vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]],
            sources: vec![EdgeSource::Boundary; 4],
        }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.verts
    }

    pub fn is_empty(&self) -> bool {
        self.verts.len() < 3
    }

    /// Shoelace area.
    pub fn area(&self) -> f64 {
        let n = self.verts.len();
        if n < 3 {
            return 0.0;
        }
        // fan from the first vertex keeps the cross products small
        let [ox, oy] = self.verts[0];
        let mut acc = 0.0;
        for i in 1..n - 1 {
            let (x0, y0) = (self.verts[i][0] - ox, self.verts[i][1] - oy);
            let (x1, y1) = (self.verts[i + 1][0] - ox, self.verts[i + 1][1] - oy);
            acc += x0 * y1 - x1 * y0;
        }
        0.5 * acc.abs()
    }

    pub fn max_sq_dist(&self, p: [f64; 2]) -> f64 {
        self.verts
            .iter()
            .map(|v| (v[0] - p[0]).powi(2) + (v[1] - p[1]).powi(2))
            .fold(0.0, f64::max)
    }

    /// Keep the half-plane of points at least as close to `site` as to `other`.
    pub fn clip_bisector(&mut self, site: [f64; 2], other: [f64; 2], label: usize) {
        let n = [other[0] - site[0], other[1] - site[1]];
        let mid = [0.5 * (site[0] + other[0]), 0.5 * (site[1] + other[1])];
        let side = |v: [f64; 2]| (v[0] - mid[0]) * n[0] + (v[1] - mid[1]) * n[1];
        self.clip(side, EdgeSource::Site(label));
    }

    fn clip(&mut self, side: impl Fn([f64; 2]) -> f64, label: EdgeSource) {
        let n = self.verts.len();
        if n == 0 {
            return;
        }
        let s: Vec<f64> = self.verts.iter().map(|&v| side(v)).collect();
        if s.iter().all(|&x| x <= 0.0) {
            return;
        }
        let mut verts = Vec::with_capacity(n + 1);
        let mut sources = Vec::with_capacity(n + 1);
        for i in 0..n {
            let j = (i + 1) % n;
            let (vi, vj) = (self.verts[i], self.verts[j]);
            let (si, sj) = (s[i], s[j]);
            if si <= 0.0 {
                verts.push(vi);
                sources.push(self.sources[i]);
                if sj > 0.0 {
                    verts.push(lerp(vi, vj, si / (si - sj)));
                    sources.push(label);
                }
            } else if sj <= 0.0 {
                verts.push(lerp(vi, vj, si / (si - sj)));
                sources.push(self.sources[i]);
            }
        }
        if verts.len() < 3 {
            verts.clear();
            sources.clear();
        }
        self.verts = verts;
        self.sources = sources;
    }

    /// Sites whose bisector contributes an edge of positive length.
    pub fn active_sites(&self) -> Vec<usize> {
        let n = self.verts.len();
        let mut out = Vec::new();
        for i in 0..n {
            if let EdgeSource::Site(s) = self.sources[i] {
                let (a, b) = (self.verts[i], self.verts[(i + 1) % n]);
                if a != b && !out.contains(&s) {
                    out.push(s);
                }
            }
        }
        out
    }
}

#[inline]
fn lerp(a: [f64; 2], b: [f64; 2], t: f64) -> [f64; 2] {
    [a[0] + (b[0] - a[0]) * t, a[1] + (b[1] - a[1]) * t]
}

/// A clipped Voronoi cell together with the sites that bound it.
#[derive(Debug, Clone)]
pub struct ClippedCell {
    pub polygon: Polygon,
    pub area: f64,
    pub neighbors: Vec<usize>,
}
