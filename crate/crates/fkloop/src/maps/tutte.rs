//! Tutte triangulation of a decorated map and its fully packed loops.
//!
//! Triangles are indexed by half-edges of `m`. For an open edge, `t(h)` is
//! the primal triangle left of `h`; for a closed edge it is the dual
//! triangle with apex at the origin of `h`. Companions are `t(h)`, `t(alpha h)`.
//! The corner `c(h)` between `h` and `sigma h` is a quadrangulation edge; the
//! loop leaves `t(h)` through `c(h)`.

use super::{alpha, EdgeSubset, PlanarMap};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TriangleKind {
    Primal,
    Dual,
}

/// Successor of `t(h)` along its loop.
pub(crate) fn loop_next(m: &PlanarMap, open: &EdgeSubset) -> Vec<usize> {
    (0..m.half_edges())
        .map(|h| {
            let s = m.sigma(h);
            if open.is_open_half(s) {
                alpha(s)
            } else {
                s
            }
        })
        .collect()
}

/// The triangle entered right after crossing the root edge of the
/// triangulation; the root loop is read from here.
pub(crate) fn root_triangle(m: &PlanarMap, next: &[usize]) -> usize {
    next[m.sigma_inv(m.root())]
}

pub(crate) fn cycle_from(next: &[usize], start: usize) -> Vec<usize> {
    let mut out = vec![start];
    let mut h = next[start];
    while h != start {
        out.push(h);
        h = next[h];
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoopConfig {
    /// Each loop as the cyclic list of triangles it crosses, in order; the
    /// root loop comes first and starts at the root triangle.
    pub loops: Vec<Vec<usize>>,
}

impl LoopConfig {
    pub fn len(&self) -> usize {
        self.loops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.loops.is_empty()
    }

    /// Loop index of every triangle.
    pub fn loop_of(&self) -> Vec<usize> {
        let n: usize = self.loops.iter().map(Vec::len).sum();
        let mut out = vec![usize::MAX; n];
        for (i, l) in self.loops.iter().enumerate() {
            for &t in l {
                out[t] = i;
            }
        }
        out
    }

    /// Every triangle lies on exactly one loop.
    pub fn is_fully_packed(&self, triangles: usize) -> bool {
        let mut seen = vec![false; triangles];
        for l in &self.loops {
            for &t in l {
                if t >= triangles || seen[t] {
                    return false;
                }
                seen[t] = true;
            }
        }
        seen.into_iter().all(|b| b)
    }
}

pub fn loops(m: &PlanarMap, open: &EdgeSubset) -> LoopConfig {
    let next = loop_next(m, open);
    let mut seen = vec![false; m.half_edges()];
    let mut out = Vec::new();
    let starts = std::iter::once(root_triangle(m, &next)).chain(0..m.half_edges());
    for s in starts {
        if seen[s] {
            continue;
        }
        let c = cycle_from(&next, s);
        for &t in &c {
            seen[t] = true;
        }
        out.push(c);
    }
    LoopConfig { loops: out }
}

pub fn loop_count(m: &PlanarMap, open: &EdgeSubset) -> usize {
    let next = loop_next(m, open);
    let mut seen = vec![false; m.half_edges()];
    let mut count = 0;
    for s in 0..m.half_edges() {
        if !seen[s] {
            count += 1;
            let mut h = s;
            while !seen[h] {
                seen[h] = true;
                h = next[h];
            }
        }
    }
    count
}

#[derive(Debug, Clone)]
pub struct TutteTriangulation {
    /// Vertices are the vertices of `m` followed by its faces. Half-edges
    /// `2h`, `2h+1` form the quadrangulation edge of corner `c(h)` (primal
    /// end first); `4k + h` is the diagonal through half-edge `h` of `m`,
    /// primal if the edge is open and dual otherwise.
    pub map: PlanarMap,
    /// Face of `map` occupied by triangle `t(h)`.
    pub face_of_triangle: Vec<usize>,
    pub kind: Vec<TriangleKind>,
    /// Per edge of `m`: the diagonal was flipped while merging loops.
    pub fictional: EdgeSubset,
}

impl TutteTriangulation {
    pub fn triangles(&self) -> usize {
        self.kind.len()
    }

    pub fn companion(&self, t: usize) -> usize {
        alpha(t)
    }

    pub fn quadrangulation_half_edges(&self) -> std::ops::Range<usize> {
        0..2 * self.triangles()
    }
}

pub fn tutte_triangulation(m: &PlanarMap, open: &EdgeSubset) -> (TutteTriangulation, LoopConfig) {
    let n = m.half_edges();
    let diag = |h: usize| 2 * n + h;
    let mut rotations: Vec<Vec<usize>> = Vec::new();
    let vertex_of = m.vertex_of();
    let face_of = m.face_of();
    let nv = m.vertex_count();

    let mut seen = vec![false; nv];
    for h in 0..n {
        if seen[vertex_of[h]] {
            continue;
        }
        seen[vertex_of[h]] = true;
        let mut rot = Vec::new();
        let mut g = h;
        loop {
            if open.is_open_half(g) {
                rot.push(diag(g));
            }
            rot.push(2 * g);
            g = m.sigma(g);
            if g == h {
                break;
            }
        }
        rotations.push(rot);
    }
    let mut seen = vec![false; m.face_count()];
    for h in 0..n {
        if seen[face_of[h]] {
            continue;
        }
        seen[face_of[h]] = true;
        let mut rot = Vec::new();
        let mut g = h;
        loop {
            if !open.is_open_half(g) {
                rot.push(diag(g));
            }
            rot.push(2 * m.sigma_inv(g) + 1);
            g = m.phi_inv(g);
            if g == h {
                break;
            }
        }
        rotations.push(rot);
    }
    let mut sigma = vec![usize::MAX; 3 * n];
    for rot in &rotations {
        for (i, &x) in rot.iter().enumerate() {
            sigma[x] = rot[(i + 1) % rot.len()];
        }
    }
    let root = 2 * m.sigma_inv(m.root()) + 1;
    let map = PlanarMap::new(sigma, root).expect("Tutte map is a planar triangulation");
    let faces = map.face_of();
    let face_of_triangle = (0..n).map(|h| faces[diag(alpha(h))]).collect();
    let kind = (0..n)
        .map(|h| if open.is_open_half(h) { TriangleKind::Primal } else { TriangleKind::Dual })
        .collect();
    let t = TutteTriangulation { map, face_of_triangle, kind, fictional: EdgeSubset::empty(m.edges()) };
    (t, loops(m, open))
}
