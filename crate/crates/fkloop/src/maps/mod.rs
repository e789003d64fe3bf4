//! Rooted planar maps on half-edges, with an FK edge subset.
//!
//! Half-edges are `0..2k`; `alpha(h) = h ^ 1`, so edge `e` owns `2e` and
//! `2e+1`. `sigma` turns counterclockwise around the origin of a half-edge
//! and the faces are the orbits of `phi = sigma . alpha`, each lying to the
//! right of its half-edges.

mod bijection;
mod tutte;

pub use bijection::{map_to_word, map_to_word_traced, word_to_map, Exploration};
pub use tutte::{loop_count, loops, tutte_triangulation, LoopConfig, TriangleKind, TutteTriangulation};

use std::collections::VecDeque;
use std::fmt;

use thiserror::Error;

use crate::analytics::DomainError;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MapError {
    #[error("sigma is not a permutation of 0..{0}")]
    NotPermutation(usize),
    #[error("odd number of half-edges ({0})")]
    OddHalfEdges(usize),
    #[error("root {root} out of range for {n} half-edges")]
    Root { root: usize, n: usize },
    #[error("map is not connected")]
    Disconnected,
    #[error("map is not planar: V - E + F = {0}")]
    NotPlanar(i64),
    #[error("edge subset has {got} entries, map has {want} edges")]
    SubsetSize { got: usize, want: usize },
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

#[inline]
pub fn alpha(h: usize) -> usize {
    h ^ 1
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PlanarMap {
    sigma: Vec<usize>,
    sigma_inv: Vec<usize>,
    root: usize,
}

impl PlanarMap {
    pub fn new(sigma: Vec<usize>, root: usize) -> Result<Self, MapError> {
        let n = sigma.len();
        if n % 2 == 1 {
            return Err(MapError::OddHalfEdges(n));
        }
        if root >= n.max(1) || n == 0 {
            return Err(MapError::Root { root, n });
        }
        let mut sigma_inv = vec![usize::MAX; n];
        for (h, &s) in sigma.iter().enumerate() {
            if s >= n || sigma_inv[s] != usize::MAX {
                return Err(MapError::NotPermutation(n));
            }
            sigma_inv[s] = h;
        }
        let m = PlanarMap { sigma, sigma_inv, root };
        if !m.is_connected() {
            return Err(MapError::Disconnected);
        }
        let chi = m.euler_characteristic();
        if chi != 2 {
            return Err(MapError::NotPlanar(chi));
        }
        Ok(m)
    }

    /// The single-edge loop: one vertex, two faces.
    pub fn single_loop() -> Self {
        PlanarMap::new(vec![1, 0], 0).expect("valid")
    }

    /// The single-edge bridge: two vertices, one face.
    pub fn single_bridge() -> Self {
        PlanarMap::new(vec![0, 1], 0).expect("valid")
    }

    pub fn half_edges(&self) -> usize {
        self.sigma.len()
    }

    pub fn edges(&self) -> usize {
        self.sigma.len() / 2
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn sigma(&self, h: usize) -> usize {
        self.sigma[h]
    }

    pub fn sigma_inv(&self, h: usize) -> usize {
        self.sigma_inv[h]
    }

    pub fn phi(&self, h: usize) -> usize {
        self.sigma[alpha(h)]
    }

    pub fn phi_inv(&self, h: usize) -> usize {
        alpha(self.sigma_inv[h])
    }

    pub fn sigma_array(&self) -> &[usize] {
        &self.sigma
    }

    fn orbits(&self, step: impl Fn(usize) -> usize) -> Vec<usize> {
        let n = self.half_edges();
        let mut label = vec![usize::MAX; n];
        let mut next = 0;
        for h in 0..n {
            if label[h] != usize::MAX {
                continue;
            }
            let mut g = h;
            while label[g] == usize::MAX {
                label[g] = next;
                g = step(g);
            }
            next += 1;
        }
        label
    }

    /// Vertex index of the origin of every half-edge.
    pub fn vertex_of(&self) -> Vec<usize> {
        self.orbits(|h| self.sigma[h])
    }

    /// Face index of the face to the right of every half-edge.
    pub fn face_of(&self) -> Vec<usize> {
        self.orbits(|h| self.phi(h))
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_of().into_iter().max().map_or(0, |m| m + 1)
    }

    pub fn face_count(&self) -> usize {
        self.face_of().into_iter().max().map_or(0, |m| m + 1)
    }

    /// Degrees counted in edge-sides, so an edge inside a face counts twice.
    pub fn face_degrees(&self) -> Vec<usize> {
        let f = self.face_of();
        let mut deg = vec![0; self.face_count()];
        for x in f {
            deg[x] += 1;
        }
        deg
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count() as i64 - self.edges() as i64 + self.face_count() as i64
    }

    fn is_connected(&self) -> bool {
        let n = self.half_edges();
        let mut seen = vec![false; n];
        let mut stack = vec![self.root];
        seen[self.root] = true;
        let mut count = 1;
        while let Some(h) = stack.pop() {
            for g in [self.sigma[h], alpha(h)] {
                if !seen[g] {
                    seen[g] = true;
                    count += 1;
                    stack.push(g);
                }
            }
        }
        count == n
    }

    /// Same map rooted at the reverse of the root half-edge.
    pub fn reverse_root(&self) -> Self {
        PlanarMap { root: alpha(self.root), ..self.clone() }
    }

    /// Relabel half-edges by `pi` (new label of old `h` is `pi[h]`), keeping
    /// edges as consecutive pairs.
    fn relabel(&self, pi: &[usize]) -> Self {
        let n = self.half_edges();
        let mut sigma = vec![0; n];
        for h in 0..n {
            sigma[pi[h]] = pi[self.sigma[h]];
        }
        PlanarMap::new(sigma, pi[self.root]).expect("relabelling preserves validity")
    }

    /// Planar dual. Dual half-edge `h` crosses primal `h` from its right to
    /// its left; the root is kept, so the dual root crosses the primal root
    /// from right to left.
    pub fn dual(&self) -> Self {
        let n = self.half_edges();
        let sigma = (0..n).map(|h| alpha(self.sigma_inv[h])).collect();
        PlanarMap::new(sigma, self.root).expect("dual of a planar map is planar")
    }

    /// Breadth-first labelling from the root; two rooted maps are isomorphic
    /// iff their codes agree.
    pub fn canonical_order(&self) -> Vec<usize> {
        let n = self.half_edges();
        let mut label = vec![usize::MAX; n];
        let mut order = Vec::with_capacity(n);
        let mut queue = VecDeque::new();
        label[self.root] = 0;
        order.push(self.root);
        queue.push_back(self.root);
        while let Some(h) = queue.pop_front() {
            for g in [self.sigma[h], alpha(h)] {
                if label[g] == usize::MAX {
                    label[g] = order.len();
                    order.push(g);
                    queue.push_back(g);
                }
            }
        }
        order
    }

    pub fn canonical_code(&self, open: Option<&EdgeSubset>) -> Vec<usize> {
        let order = self.canonical_order();
        let mut label = vec![0; order.len()];
        for (i, &h) in order.iter().enumerate() {
            label[h] = i;
        }
        let mut code = Vec::with_capacity(3 * order.len());
        for &h in &order {
            code.push(label[self.sigma[h]]);
            code.push(label[alpha(h)]);
            if let Some(o) = open {
                code.push(o.is_open_half(h) as usize);
            }
        }
        code
    }

    pub fn is_isomorphic(&self, other: &PlanarMap) -> bool {
        self.half_edges() == other.half_edges() && self.canonical_code(None) == other.canonical_code(None)
    }

    /// Canonical relabelling that keeps `alpha(h) = h ^ 1`: edges are
    /// numbered by first discovery, the discovered half-edge becoming even.
    pub fn normalised(&self, open: &EdgeSubset) -> (PlanarMap, EdgeSubset) {
        let order = self.canonical_order();
        let mut pi = vec![usize::MAX; self.half_edges()];
        let mut next_edge = 0;
        for &h in &order {
            if pi[h] == usize::MAX {
                pi[h] = 2 * next_edge;
                pi[alpha(h)] = 2 * next_edge + 1;
                next_edge += 1;
            }
        }
        let m = self.relabel(&pi);
        let mut o = EdgeSubset::empty(self.edges());
        for e in 0..self.edges() {
            if open.is_open(e) {
                o.set(pi[2 * e] / 2, true);
            }
        }
        (m, o)
    }

    pub fn to_text(&self, open: &EdgeSubset) -> String {
        let join = |v: &mut dyn Iterator<Item = usize>| v.map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
        let n = self.half_edges();
        format!(
            "alpha: {}\nsigma: {}\nroot: {}\nopen: {}\n",
            join(&mut (0..n).map(alpha)),
            join(&mut self.sigma.iter().copied()),
            self.root,
            join(&mut (0..self.edges()).map(|e| open.is_open(e) as usize)),
        )
    }

    /// Parse the text written by [`PlanarMap::to_text`]; lines starting with
    /// `#` are comments.
    pub fn from_text(text: &str) -> Result<(PlanarMap, EdgeSubset), MapError> {
        let mut fields: [Option<Vec<usize>>; 4] = Default::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |msg: String| MapError::Parse { line: i + 1, msg };
            let (key, rest) = line.split_once(':').ok_or_else(|| err("expected `key: values`".into()))?;
            let slot = match key.trim() {
                "alpha" => 0,
                "sigma" => 1,
                "root" => 2,
                "open" => 3,
                k => return Err(err(format!("unknown key {k:?}"))),
            };
            let vals = rest
                .split_whitespace()
                .map(|t| t.parse::<usize>().map_err(|e| err(format!("{t:?}: {e}"))))
                .collect::<Result<Vec<_>, _>>()?;
            fields[slot] = Some(vals);
        }
        let missing = |k: &str| MapError::Parse { line: 0, msg: format!("missing `{k}`") };
        let [a, s, r, o] = fields;
        let (a, s, r, o) = (a.ok_or(missing("alpha"))?, s.ok_or(missing("sigma"))?, r.ok_or(missing("root"))?, o.unwrap_or_default());
        if a.len() != s.len() || a.iter().enumerate().any(|(h, &x)| x != alpha(h)) {
            return Err(MapError::Parse { line: 0, msg: "alpha must pair 2e with 2e+1".into() });
        }
        let root = *r.first().ok_or(missing("root"))?;
        let m = PlanarMap::new(s, root)?;
        let open = if o.is_empty() { EdgeSubset::empty(m.edges()) } else { EdgeSubset::from_bits(o.iter().map(|&b| b != 0).collect()) };
        if open.len() != m.edges() {
            return Err(MapError::SubsetSize { got: open.len(), want: m.edges() });
        }
        Ok((m, open))
    }
}

/// Open edges, indexed by edge (`h / 2`).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EdgeSubset(Vec<bool>);

impl EdgeSubset {
    pub fn empty(edges: usize) -> Self {
        EdgeSubset(vec![false; edges])
    }

    pub fn full(edges: usize) -> Self {
        EdgeSubset(vec![true; edges])
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        EdgeSubset(bits)
    }

    /// Subset whose membership is the binary expansion of `mask`.
    pub fn from_mask(edges: usize, mask: u64) -> Self {
        EdgeSubset((0..edges).map(|e| mask >> e & 1 == 1).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_open(&self, e: usize) -> bool {
        self.0[e]
    }

    pub fn is_open_half(&self, h: usize) -> bool {
        self.0[h / 2]
    }

    pub fn set(&mut self, e: usize, open: bool) {
        self.0[e] = open;
    }

    pub fn toggle(&mut self, e: usize) {
        self.0[e] = !self.0[e];
    }

    pub fn count_open(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    /// `e` is dual-open iff `e` is closed.
    pub fn complement(&self) -> Self {
        EdgeSubset(self.0.iter().map(|&b| !b).collect())
    }
}

impl fmt::Display for EdgeSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.0.iter().map(|&b| if b { '1' } else { '0' }).collect();
        f.write_str(&s)
    }
}

/// `(m, omega) -> (m^dagger, omega^dagger)`.
pub fn dual_decorated(m: &PlanarMap, open: &EdgeSubset) -> (PlanarMap, EdgeSubset) {
    (m.dual(), open.complement())
}

/// `q^{#loops / 2}`.
pub fn fk_weight(m: &PlanarMap, open: &EdgeSubset, q: f64) -> Result<f64, DomainError> {
    if !(q > 0.0 && q < 4.0) {
        return Err(DomainError::Q(q));
    }
    Ok(q.powf(0.5 * loop_count(m, open) as f64))
}

/// All rooted planar maps with `k` edges, one representative per
/// isomorphism class, by brute force over `sigma`. Feasible for `k <= 4`.
pub fn enumerate_rooted_maps(k: usize) -> Vec<PlanarMap> {
    let n = 2 * k;
    let mut seen = std::collections::BTreeMap::new();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut visit = |sigma: &[usize]| {
        if let Ok(m) = PlanarMap::new(sigma.to_vec(), 0) {
            let (m, _) = m.normalised(&EdgeSubset::empty(k));
            seen.entry(m.canonical_code(None)).or_insert(m);
        }
    };
    heap_permutations(&mut perm, n, &mut visit);
    seen.into_values().collect()
}

fn heap_permutations(a: &mut [usize], k: usize, visit: &mut impl FnMut(&[usize])) {
    if k <= 1 {
        visit(a);
        return;
    }
    heap_permutations(a, k - 1, visit);
    for i in 0..k - 1 {
        if k % 2 == 0 {
            a.swap(i, k - 1);
        } else {
            a.swap(0, k - 1);
        }
        heap_permutations(a, k - 1, visit);
    }
}
