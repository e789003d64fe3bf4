//! Exact oracles at small size: balanced words, finite FK partition
//! functions, ring counts, truncated gasket weights and bounds on the law of
//! `tau^h` from the backward excursion recursion.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::analytics::{partition_f, DomainError, ModelParams};
use crate::maps::{self, alpha, EdgeSubset, PlanarMap};
use crate::par;
use crate::words::{symbol_weight_exact, Symbol, Word};

pub const DEFAULT_WORD_CAP: usize = 6;
pub const MAP_CAP: usize = 4;
pub const RING_CAP: usize = 16;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EnumError {
    #[error("size {size} exceeds the enumeration cap {cap}")]
    Cap { size: usize, cap: usize },
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error("tail majorant does not converge (ratio {0})")]
    Divergent(f64),
    #[error("quadrature failed: {0}")]
    Quadrature(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundsPair {
    pub lower: f64,
    pub upper: f64,
}

impl BoundsPair {
    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

/// Outcome label and exact weight.
#[derive(Debug, Clone, Default)]
pub struct ExactWeightTable {
    pub entries: Vec<(String, BigRational)>,
}

impl ExactWeightTable {
    pub fn total(&self) -> BigRational {
        self.entries.iter().map(|(_, w)| w.clone()).sum()
    }

    pub fn write_csv<W: std::io::Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["outcome", "weight_num", "weight_den"])?;
        for (o, x) in &self.entries {
            w.write_record([o.as_str(), &x.numer().to_string(), &x.denom().to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

// Words of length `len` continuing `prefix`, in ASCII order.
fn extend_balanced(prefix: &mut Vec<Symbol>, stack: &mut Vec<Symbol>, len: usize, out: &mut Vec<Word>) {
    if prefix.len() == len {
        out.push(Word::new(prefix.clone()));
        return;
    }
    let remaining = len - prefix.len();
    // ASCII order: C < F < H < c < h
    for s in [Symbol::CheeseOrder, Symbol::Flexible, Symbol::HamOrder, Symbol::Cheese, Symbol::Ham] {
        if s.is_burger() {
            if stack.len() + 1 > remaining - 1 {
                continue;
            }
            stack.push(s);
            prefix.push(s);
            extend_balanced(prefix, stack, len, out);
            prefix.pop();
            stack.pop();
        } else {
            let at = match s {
                Symbol::Flexible => stack.len().checked_sub(1),
                _ => stack.iter().rposition(|&b| b.kind() == s.kind()),
            };
            let Some(i) = at else { continue };
            let b = stack.remove(i);
            prefix.push(s);
            extend_balanced(prefix, stack, len, out);
            prefix.pop();
            stack.insert(i, b);
        }
    }
}

/// All words of length `2k` with empty reduction, sorted.
pub fn enumerate_balanced_words(k: usize, cap: usize) -> Result<Vec<Word>, EnumError> {
    if k > cap {
        return Err(EnumError::Cap { size: k, cap });
    }
    if k == 0 {
        return Ok(vec![Word::empty()]);
    }
    // shard on the first two letters
    let mut shards = Vec::new();
    for a in [Symbol::Cheese, Symbol::Ham] {
        for b in [Symbol::CheeseOrder, Symbol::Flexible, Symbol::HamOrder, Symbol::Cheese, Symbol::Ham] {
            shards.push((a, b));
        }
    }
    let parts = par::map(shards, |(a, b)| {
        let mut out = Vec::new();
        let mut stack = vec![a];
        if b.is_burger() {
            if 2 * k < 4 {
                return out;
            }
            stack.push(b);
        } else if b.kind().is_some_and(|t| Some(t) != a.kind()) {
            return out;
        } else {
            stack.pop();
        }
        let mut prefix = vec![a, b];
        extend_balanced(&mut prefix, &mut stack, 2 * k, &mut out);
        out
    });
    let mut all: Vec<Word> = parts.into_iter().flatten().collect();
    all.sort_by_key(|w| w.to_string());
    Ok(all)
}

/// All decorated maps with `k` edges, normalised, paired with their loop counts.
pub fn decorated_maps(k: usize) -> Result<Vec<(PlanarMap, EdgeSubset)>, EnumError> {
    if k > MAP_CAP {
        return Err(EnumError::Cap { size: k, cap: MAP_CAP });
    }
    let mut out = Vec::new();
    for m in maps::enumerate_rooted_maps(k) {
        for mask in 0..1u64 << k {
            out.push((m.clone(), EdgeSubset::from_mask(k, mask)));
        }
    }
    Ok(out)
}

fn rational_sqrt(q: &BigRational) -> Option<BigRational> {
    if q.is_negative() {
        return None;
    }
    let (n, d) = (q.numer().clone(), q.denom().clone());
    let (rn, rd) = (n.sqrt(), d.sqrt());
    (&rn * &rn == n && &rd * &rd == d).then(|| BigRational::new(rn, rd))
}

#[derive(Debug, Clone)]
pub struct FkPartition {
    pub k: usize,
    /// Number of decorated maps with `l` loops, at index `l`.
    pub map_loop_counts: Vec<u64>,
    /// Number of balanced words with `#F + 1 = l`, at index `l`.
    pub word_loop_counts: Vec<u64>,
    /// Per-word weights `n^{#F+1}` recovered from the symbol weights, when
    /// `sqrt(q)` is rational.
    pub word_table: Option<ExactWeightTable>,
    pub map_total: Option<BigRational>,
    pub word_total: Option<BigRational>,
    pub map_total_f64: f64,
    pub word_total_f64: f64,
}

fn loop_polynomial_total(counts: &[u64], q: f64) -> f64 {
    counts.iter().enumerate().map(|(l, &c)| c as f64 * q.powf(0.5 * l as f64)).sum()
}

/// `sum q^{#loops/2}` over decorated maps with `k` edges, computed on the
/// map side (loop counts of every configuration) and on the word side
/// (normalised word weights).
pub fn finite_fk_partition(k: usize, q: &BigRational) -> Result<FkPartition, EnumError> {
    let qf = q.to_f64().unwrap_or(f64::NAN);
    if !(qf > 0.0 && qf < 4.0) {
        return Err(DomainError::Q(qf).into());
    }
    let configs = decorated_maps(k)?;
    let loop_counts = par::map(configs, |(m, o)| maps::loop_count(&m, &o));
    let mut map_counts = vec![0u64; k + 2];
    for l in loop_counts {
        map_counts[l] += 1;
    }
    let words = enumerate_balanced_words(k, MAP_CAP)?;
    let mut word_counts = vec![0u64; k + 2];
    for w in &words {
        word_counts[w.count(Symbol::Flexible) + 1] += 1;
    }
    let map_total_f64 = loop_polynomial_total(&map_counts, qf);
    let word_total_f64 = loop_polynomial_total(&word_counts, qf);
    let (mut word_table, mut map_total, mut word_total) = (None, None, None);
    if let Some(n) = rational_sqrt(q) {
        let two = BigRational::from_integer(BigInt::from(2));
        let p = &n / (&two + &n);
        let burger = BigRational::new(1.into(), 4.into());
        let order = (BigRational::one() - &p) / BigRational::from_integer(BigInt::from(4));
        let scale = num_traits::pow(burger * order, k);
        let mut table = ExactWeightTable::default();
        for w in &words {
            let mut x = n.clone();
            for &s in w.symbols() {
                x *= symbol_weight_exact(s, &p)?;
            }
            table.entries.push((w.to_string(), x / &scale));
        }
        word_total = Some(table.total());
        word_table = Some(table);
        let mut t = BigRational::zero();
        for (l, &c) in map_counts.iter().enumerate() {
            t += BigRational::from_integer(BigInt::from(c)) * num_traits::pow(n.clone(), l);
        }
        map_total = Some(t);
    }
    Ok(FkPartition {
        k,
        map_loop_counts: map_counts,
        word_loop_counts: word_counts,
        word_table,
        map_total,
        word_total,
        map_total_f64,
        word_total_f64,
    })
}

/// Annulus whose triangles are read in the cyclic order `outward`; `true`
/// marks a triangle with an edge on the outer boundary. Rooted at the outer
/// edge of triangle `root_at`.
pub fn ring_map(outward: &[bool], root_at: usize) -> PlanarMap {
    let n = outward.len();
    let spoke = |i: usize| 2 * (i % n);
    let mut next_edge = n;
    let mut boundary = vec![0usize; n];
    for b in boundary.iter_mut() {
        *b = 2 * next_edge;
        next_edge += 1;
    }
    let total = 2 * next_edge;
    let mut phi = vec![usize::MAX; total];
    let mut cycle = |c: &[usize]| {
        for (j, &x) in c.iter().enumerate() {
            phi[x] = c[(j + 1) % c.len()];
        }
    };
    for i in 0..n {
        let (s_in, s_out) = (spoke(i + 1), alpha(spoke(i)));
        if outward[i] {
            cycle(&[boundary[i], s_in, s_out]);
        } else {
            cycle(&[s_in, alpha(boundary[i]), s_out]);
        }
    }
    let outer: Vec<usize> = (0..n).rev().filter(|&i| outward[i]).map(|i| alpha(boundary[i])).collect();
    let inner: Vec<usize> = (0..n).filter(|&i| !outward[i]).map(|i| boundary[i]).collect();
    cycle(&outer);
    if !inner.is_empty() {
        cycle(&inner);
    }
    let sigma = (0..total).map(|h| phi[alpha(h)]).collect();
    PlanarMap::new(sigma, alpha(boundary[root_at])).expect("ring is a planar annulus")
}

/// Whether a ring with empty inner boundary (a wheel around one vertex) is
/// counted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmptyInner {
    Include,
    Exclude,
}

/// Rooted rings with `k` outer and `kp` inner boundary edges, counted up to
/// rooted isomorphism over every cyclic arrangement and every outer root.
pub fn count_rings(k: usize, kp: usize, convention: EmptyInner) -> Result<u64, EnumError> {
    if k + kp > RING_CAP {
        return Err(EnumError::Cap { size: k + kp, cap: RING_CAP });
    }
    if k == 0 || (kp == 0 && convention == EmptyInner::Exclude) {
        return Ok(0);
    }
    let n = k + kp;
    let mut seen = BTreeSet::new();
    for mask in 0u32..1 << n {
        if mask.count_ones() as usize != k {
            continue;
        }
        let outward: Vec<bool> = (0..n).map(|i| mask >> i & 1 == 1).collect();
        for r in (0..n).filter(|&i| outward[i]) {
            seen.insert(ring_map(&outward, r).canonical_code(None));
        }
    }
    Ok(seen.len() as u64)
}

/// `C(k + kp - 1, kp)`, the candidate closed form checked against
/// [`count_rings`].
pub fn ring_candidate(k: usize, kp: usize) -> u64 {
    if k == 0 {
        return 0;
    }
    let mut c: u64 = 1;
    for i in 0..kp {
        c = c * (k as u64 + i as u64) / (i as u64 + 1);
    }
    c
}

/// Bounds on `g_k = n sum_{k'} A_{k->k'} x_c^{k+k'} F_{k'}`: the partial sum
/// up to `kp_max`, and that sum plus a tail majorant from
/// `A_{k->k'} <= C(k+k', k)` and `F_{k'} <= gamma_plus^{k'}`.
pub fn gasket_weight(k: usize, params: &ModelParams, kp_max: usize, convention: EmptyInner) -> Result<BoundsPair, EnumError> {
    let x = params.x_c;
    let ratio = x * params.gamma_plus;
    if ratio >= 1.0 {
        return Err(EnumError::Divergent(ratio));
    }
    let pre = params.n * x.powi(k as i32);
    let (mut lo, mut hi) = (0.0, 0.0);
    for kp in 0..=kp_max {
        let a = count_rings(k, kp, convention)? as f64;
        if a == 0.0 {
            continue;
        }
        let f = partition_f(kp as u32, params, 1e-13).map_err(|e| EnumError::Quadrature(e.to_string()))?;
        let w = pre * a * ratio.powi(kp as i32);
        lo += w * (f.scaled - f.abs_err);
        hi += w * (f.scaled + f.abs_err);
    }
    // sum_{k' > kp_max} C(k+k', k) r^{k'}, terms eventually decrease geometrically
    let mut term = (1..=k).fold(1.0, |c, i| c * (kp_max + 1 + i) as f64 / i as f64) * ratio.powi(kp_max as i32 + 1);
    let mut tail = 0.0;
    let mut j = kp_max + 1;
    loop {
        tail += term;
        let step = (k + j + 1) as f64 / (j + 1) as f64 * ratio;
        term *= step;
        j += 1;
        if step < 1.0 && term < 1e-18 * tail {
            tail += term * step / (1.0 - step);
            break;
        }
    }
    Ok(BoundsPair { lower: lo.max(0.0), upper: hi + pre * tail })
}

/// Closing probabilities of a backward F-excursion, from the recursion on
/// pending orders `(a, b)`: `close[m][l]` is the probability that the
/// excursion is of type h, uses exactly `m` letters after its F (burger
/// included) and has `l` unmatched `C`. Type c is symmetric.
#[derive(Debug, Clone)]
pub struct ExcursionTable {
    pub p: f64,
    pub depth: usize,
    pub close: Vec<Vec<f64>>,
}

impl ExcursionTable {
    pub fn new(p: f64, depth: usize) -> Result<Self, DomainError> {
        if !(p > 0.0 && p < 0.5) {
            return Err(DomainError::P(p));
        }
        let (wb, wo, wf) = (0.25, 0.25 * (1.0 - p), 0.5 * p);
        let d = depth;
        let idx = |a: usize, b: usize| a * (d + 1) + b;
        let mut g = vec![vec![0.0; (d + 1) * (d + 1)]; d + 1];
        let mut close = vec![vec![0.0; d + 1]; d + 1];
        g[0][idx(0, 0)] = 1.0;
        for big_m in 1..=d {
            let (done, rest) = g.split_at_mut(big_m);
            let cur = &mut rest[0];
            let prev = &done[big_m - 1];
            for a in 0..big_m {
                for b in 0..big_m - a {
                    let v = prev[idx(a, b)];
                    if v == 0.0 {
                        continue;
                    }
                    cur[idx(a + 1, b)] += v * wo;
                    cur[idx(a, b + 1)] += v * wo;
                    if a > 0 {
                        cur[idx(a - 1, b)] += v * wb;
                    } else {
                        close[big_m][b] += v * wb;
                    }
                    if b > 0 {
                        cur[idx(a, b - 1)] += v * wb;
                    }
                    // b == 0 closes as type c, accounted for by symmetry
                }
            }
            for m in 0..big_m.saturating_sub(1) {
                let mp = big_m - 1 - m;
                for a in 0..=m {
                    for b in 0..=m - a {
                        let v = done[m][idx(a, b)] * wf;
                        if v == 0.0 {
                            continue;
                        }
                        for l in 0..mp {
                            let e = close[mp][l];
                            if e == 0.0 {
                                continue;
                            }
                            cur[idx(a, b + l)] += v * e;
                            cur[idx(a + l, b)] += v * e;
                        }
                    }
                }
            }
        }
        Ok(ExcursionTable { p, depth, close })
    }

    /// `P(Xi = l, resolved within depth)` conditional on the excursion type.
    pub fn xi_mass(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.depth + 1];
        for row in &self.close {
            for (l, &v) in row.iter().enumerate() {
                out[l] += 2.0 * v;
            }
        }
        out
    }

    /// Conditional probability that the excursion is not resolved within depth.
    pub fn unresolved(&self) -> f64 {
        (1.0 - self.xi_mass().iter().sum::<f64>()).max(0.0)
    }
}

/// Bounds on `P(tau^h = l + 1)` for `l = 0..=l_max`. The non-lazy ham walk
/// steps `-1`, `+1`, `+Xi` with probabilities `1/2`, `(1-p)/2`, `p/2`; steps
/// whose excursion exceeds `depth` letters are unresolved. The lower bound
/// counts paths made only of resolved steps, the upper bound adds every path
/// that meets an unresolved step before hitting `-1`.
pub fn tau_law_bounds(l_max: usize, depth: usize, p: f64) -> Result<Vec<BoundsPair>, EnumError> {
    let table = ExcursionTable::new(p, depth)?;
    let xi = table.xi_mass();
    let delta = 0.5 * p * table.unresolved();
    let mut step = vec![(-1i64, 0.5), (1, 0.5 * (1.0 - p))];
    for (l, &m) in xi.iter().enumerate() {
        if m > 0.0 {
            step.push((l as i64, 0.5 * p * m));
        }
    }
    let jmax = l_max + 1;
    let width = jmax + 1;
    let mut f = vec![0.0; width];
    f[0] = 1.0;
    let mut lower = vec![0.0; jmax + 1];
    let mut alive = vec![0.0; jmax + 1];
    alive[0] = 1.0;
    for j in 1..=jmax {
        let mut g = vec![0.0; width];
        for (x, &v) in f.iter().enumerate() {
            if v == 0.0 {
                continue;
            }
            for &(s, w) in &step {
                let y = x as i64 + s;
                if y < 0 {
                    lower[j] += v * w;
                } else if (y as usize) < width {
                    g[y as usize] += v * w;
                }
            }
        }
        // positions beyond `width` can no longer hit -1 by step jmax
        f = g;
        alive[j] = f.iter().sum();
    }
    let known: f64 = lower.iter().sum();
    let mut out = Vec::with_capacity(l_max + 1);
    let mut exposure = 0.0;
    for j in 1..=jmax {
        exposure += alive[j - 1];
        let lo = lower[j];
        let hi = (lo + delta * exposure).min(1.0 - (known - lo)).min(1.0);
        out.push(BoundsPair { lower: lo, upper: hi.max(lo) });
    }
    Ok(out)
}
