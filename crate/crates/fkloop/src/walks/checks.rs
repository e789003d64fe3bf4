//! Statistical checks: the hitting-time dictionary against `F_l`, the
//! geometric coupling of the lazy walks, and the centring of the steps.

use std::ops::Range;

use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::stats::{Histogram, MCEstimate};
use super::stream::{sample_excursion_word, BackwardStream, BlockReader};
use super::{campaign_range, run_walk, Caps, Target, Trace};
use crate::analytics::laws::negbin_pmf;
use crate::analytics::quad::QuadError;
use crate::analytics::{partition_f_scaled, DomainError, ModelParams};
use crate::enumeration::{tau_law_bounds, BoundsPair, EnumError, ExcursionTable};
use crate::par;
use crate::words::{reduce, Kind, Word};

/// Histogram of the non-lazy `tau^h` over `1..=l_max+1`; longer walks are
/// counted in the total only.
pub fn dictionary_histogram(params: &ModelParams, n_runs: u64, seed: u64, caps: Caps, l_max: usize) -> Result<Histogram, DomainError> {
    dictionary_histogram_range(params, 0..n_runs, seed, caps, l_max)
}

pub fn dictionary_histogram_range(params: &ModelParams, runs: Range<u64>, seed: u64, caps: Caps, l_max: usize) -> Result<Histogram, DomainError> {
    let target = Target::HHit { horizon: l_max as u64 + 1 };
    campaign_range(
        params.p,
        runs,
        seed,
        target,
        caps,
        || Histogram::new(seed),
        |h, _, rec| match rec.tau_h {
            Some(t) => h.add(t.steps),
            None if rec.censored => h.add_censored(),
            None => h.add_elsewhere(),
        },
        |mut a, b| {
            a.merge(&b);
            a
        },
    )
}

#[derive(Debug, Clone)]
pub struct DictionaryRow {
    pub l: usize,
    /// `P(tau^h = l + 1)`.
    pub estimate: MCEstimate,
    pub f_scaled: f64,
    /// `2 P(tau^h = l+1) gamma_plus^l / F_l`.
    pub ratio: f64,
    pub ratio_stderr: f64,
    pub z: f64,
    pub dp_bounds: BoundsPair,
    /// The estimate lies within 3 standard errors of the bounds.
    pub bracketed: bool,
}

#[derive(Debug, Clone)]
pub struct DictionaryReport {
    pub rows: Vec<DictionaryRow>,
    pub notes: Vec<String>,
    pub n_total: u64,
    pub n_censored: u64,
}

impl DictionaryReport {
    pub fn max_abs_z(&self) -> f64 {
        self.rows.iter().map(|r| r.z.abs()).fold(0.0, f64::max)
    }
}

pub fn verify_dictionary(hist: &Histogram, params: &ModelParams, l_max: usize, depth: usize, tol: f64) -> Result<DictionaryReport, EnumError> {
    let bounds = tau_law_bounds(l_max, depth, params.p)?;
    let mut rows = Vec::new();
    let mut notes = Vec::new();
    for l in 0..=l_max {
        let e = hist.estimate(l + 1);
        if hist.count(l + 1) == 0 {
            notes.push(format!("l = {l}: empty bin excluded"));
            continue;
        }
        let f = partition_f_scaled(l as u32, params, tol).map_err(|e: QuadError| EnumError::Quadrature(e.to_string()))?.value;
        let ratio = 2.0 * e.point / f;
        let ratio_stderr = 2.0 * e.stderr / f;
        let b = bounds[l];
        rows.push(DictionaryRow {
            l,
            estimate: e,
            f_scaled: f,
            ratio,
            ratio_stderr,
            z: (ratio - 1.0) / ratio_stderr,
            dp_bounds: b,
            bracketed: e.point >= b.lower - 3.0 * e.stderr && e.point <= b.upper + 3.0 * e.stderr,
        });
    }
    Ok(DictionaryReport { rows, notes, n_total: hist.n_total, n_censored: hist.n_censored })
}

#[derive(Debug, Clone)]
pub struct FactorRow {
    pub l: usize,
    /// `P(tau~^h < tau~^c, tau^h = l + 1)`.
    pub joint: f64,
    pub joint_stderr: f64,
    /// `P(tau^h = l + 1) P(tau^c > N_{l+1})`.
    pub product: f64,
    pub product_stderr: f64,
    pub z: f64,
}

#[derive(Debug, Clone)]
pub struct CouplingReport {
    /// Lazy gaps between moves of `h~`: index `j` counts gaps of length `j`.
    pub gap_counts: Vec<u64>,
    pub n_gaps: u64,
    pub mean_gap: f64,
    pub mean_gap_stderr: f64,
    pub chi2: f64,
    pub dof: usize,
    pub p_value: f64,
    pub factorization: Vec<FactorRow>,
    /// Correlation of the indicators `{h step = -1}` and `{c step = -1}` at
    /// equal step index.
    pub correlation: f64,
    pub correlation_stderr: f64,
    pub n_runs: u64,
    pub n_censored: u64,
    pub undecided: u64,
}

#[derive(Debug, Clone, Default)]
struct CouplingAcc {
    gaps: Vec<u64>,
    joint: Vec<u64>,
    tau_h: Vec<u64>,
    tau_c: Vec<u64>,
    pairs: [u64; 4],
    censored: u64,
    undecided: u64,
}

impl CouplingAcc {
    fn merge(mut self, o: CouplingAcc) -> CouplingAcc {
        let add = |a: &mut Vec<u64>, b: &[u64]| {
            if b.len() > a.len() {
                a.resize(b.len(), 0);
            }
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        };
        add(&mut self.gaps, &o.gaps);
        add(&mut self.joint, &o.joint);
        add(&mut self.tau_h, &o.tau_h);
        add(&mut self.tau_c, &o.tau_c);
        for i in 0..4 {
            self.pairs[i] += o.pairs[i];
        }
        self.censored += o.censored;
        self.undecided += o.undecided;
        self
    }
}

const GAP_BINS: usize = 10;

pub fn geometric_coupling_check(params: &ModelParams, n_runs: u64, seed: u64, l_max: usize, horizon: u64, caps: Caps) -> Result<CouplingReport, DomainError> {
    let p = params.p;
    super::StepLaw::new(p)?;
    let hz = horizon as usize;
    let chunks: Vec<u64> = (0..n_runs.div_ceil(super::CHUNK)).collect();
    let parts = par::map(chunks, |k| {
        let mut acc = CouplingAcc {
            gaps: vec![0; GAP_BINS + 2],
            joint: vec![0; l_max + 2],
            tau_h: vec![0; hz + 1],
            tau_c: vec![0; hz + 1],
            ..Default::default()
        };
        let mut trace = Trace::default();
        for run in k * super::CHUNK..((k + 1) * super::CHUNK).min(n_runs) {
            trace.h.clear();
            trace.c.clear();
            let s = BackwardStream::new(seed, run, p).expect("p checked");
            let mut r = BlockReader::new(s, caps.letters);
            let rec = run_walk(&mut r, Target::BothHit { horizon }, caps, Some(&mut trace));
            if rec.censored {
                acc.censored += 1;
                continue;
            }
            let mut last = 0;
            for &(t, _) in &trace.h {
                acc.gaps[((t - last) as usize).min(GAP_BINS + 1)] += 1;
                last = t;
            }
            for (a, b) in trace.h.iter().zip(&trace.c) {
                acc.pairs[2 * (a.1 == -1) as usize + (b.1 == -1) as usize] += 1;
            }
            if let Some(t) = rec.tau_h {
                acc.tau_h[t.steps as usize] += 1;
            }
            if let Some(t) = rec.tau_c {
                acc.tau_c[t.steps as usize] += 1;
            }
            match (rec.first(), rec.tau_h) {
                (Some(Kind::Ham), Some(t)) if (t.steps as usize) <= l_max + 1 => acc.joint[t.steps as usize - 1] += 1,
                (None, _) => acc.undecided += 1,
                _ => {}
            }
        }
        acc
    });
    let acc = parts.into_iter().fold(CouplingAcc::default(), CouplingAcc::merge);
    let n = (n_runs - acc.censored) as f64;

    let n_gaps: u64 = acc.gaps.iter().sum();
    let ng = n_gaps as f64;
    // gaps longer than GAP_BINS are pooled; their mean is known exactly
    // given the geometric law, so only the observed part enters the mean
    let mut chi2 = 0.0;
    for j in 1..=GAP_BINS + 1 {
        let expect = if j <= GAP_BINS { ng * 0.5f64.powi(j as i32) } else { ng * 0.5f64.powi(GAP_BINS as i32) };
        chi2 += (acc.gaps[j] as f64 - expect).powi(2) / expect;
    }
    let dof = GAP_BINS;
    let p_value = 1.0 - ChiSquared::new(dof as f64).expect("dof > 0").cdf(chi2);
    let (mut m1, mut m2) = (0.0, 0.0);
    for j in 1..=GAP_BINS {
        m1 += j as f64 * acc.gaps[j] as f64;
        m2 += (j * j) as f64 * acc.gaps[j] as f64;
    }
    // pooled tail: conditional mean GAP_BINS + 2 under the null
    let tail = acc.gaps[GAP_BINS + 1] as f64;
    let tj = (GAP_BINS + 2) as f64;
    m1 += tj * tail;
    m2 += (tj * tj + 2.0) * tail;
    let mean_gap = m1 / ng;
    let mean_gap_stderr = ((m2 / ng - mean_gap * mean_gap) / ng).sqrt();

    let surv_c = |m: usize| -> f64 {
        let hit: u64 = acc.tau_c.iter().take(m + 1).sum();
        1.0 - hit as f64 / n
    };
    let factorization = (0..=l_max)
        .map(|l| {
            let k = l + 1;
            let ph = acc.tau_h[k] as f64 / n;
            let mut s = 0.0;
            let mut s_var = 0.0;
            for m in 0..hz {
                let w = negbin_pmf(k, m);
                let sm = surv_c(m);
                s += w * sm;
                s_var += w * (sm * (1.0 - sm) / n).sqrt();
            }
            let product = ph * s;
            let ph_se = (ph * (1.0 - ph) / n).sqrt();
            let product_stderr = ((s * ph_se).powi(2) + (ph * s_var).powi(2)).sqrt();
            let joint = acc.joint[l] as f64 / n;
            let joint_stderr = (joint * (1.0 - joint) / n).sqrt();
            FactorRow { l, joint, joint_stderr, product, product_stderr, z: (joint - product) / (joint_stderr.powi(2) + product_stderr.powi(2)).sqrt() }
        })
        .collect();

    let [n00, n01, n10, n11] = acc.pairs.map(|x| x as f64);
    let np = n00 + n01 + n10 + n11;
    let (pa, pb) = ((n10 + n11) / np, (n01 + n11) / np);
    let correlation = (n11 / np - pa * pb) / (pa * (1.0 - pa) * pb * (1.0 - pb)).sqrt();

    Ok(CouplingReport {
        gap_counts: acc.gaps,
        n_gaps,
        mean_gap,
        mean_gap_stderr,
        chi2,
        dof,
        p_value,
        factorization,
        correlation,
        correlation_stderr: 1.0 / np.sqrt(),
        n_runs,
        n_censored: acc.censored,
        undecided: acc.undecided,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XiLevel {
    pub m: u64,
    /// `E[xi 1{|xi| <= m}]` with censored steps counted as 0.
    pub mean: f64,
    pub stderr: f64,
    /// Censored steps contribute between 0 and `m`.
    pub bracket: (f64, f64),
}

#[derive(Debug, Clone)]
pub struct XiReport {
    pub h: Vec<XiLevel>,
    pub c: Vec<XiLevel>,
    pub n_samples: u64,
    pub censored_h: u64,
    pub censored_c: u64,
}

impl XiReport {
    /// Truncated means shrink in magnitude along the levels.
    pub fn trend_decreasing(&self) -> bool {
        self.h.windows(2).all(|w| w[1].mean.abs() < w[0].mean.abs())
    }
}

const XI_CHUNK: u64 = 1 << 14;

#[derive(Debug, Clone)]
struct XiAcc {
    sum: Vec<i128>,
    sumsq: Vec<i128>,
    censored: u64,
}

fn xi_side(p: f64, n: u64, seed: u64, stream_base: u64, side: Kind, levels: &[u64], cap: u64) -> (Vec<XiLevel>, u64) {
    let chunks: Vec<u64> = (0..n.div_ceil(XI_CHUNK)).collect();
    let parts = par::map(chunks, |k| {
        let mut acc = XiAcc { sum: vec![0; levels.len()], sumsq: vec![0; levels.len()], censored: 0 };
        let s = BackwardStream::new(seed, stream_base + k, p).expect("p checked");
        let mut r = BlockReader::new(s, 0);
        for _ in k * XI_CHUNK..((k + 1) * XI_CHUNK).min(n) {
            r.set_budget(r.letters_used() + cap);
            let xi = loop {
                match r.next_block() {
                    Ok(b) if b.side() == side => {
                        let (dh, dc) = b.increment();
                        break Some(if side == Kind::Ham { dh } else { dc });
                    }
                    Ok(_) => continue,
                    Err(_) => break None,
                }
            };
            match xi {
                Some(x) => {
                    for (i, &m) in levels.iter().enumerate() {
                        if x.unsigned_abs() <= m {
                            acc.sum[i] += x as i128;
                            acc.sumsq[i] += (x as i128) * (x as i128);
                        }
                    }
                }
                None => acc.censored += 1,
            }
        }
        acc
    });
    let mut tot = XiAcc { sum: vec![0; levels.len()], sumsq: vec![0; levels.len()], censored: 0 };
    for a in parts {
        for i in 0..levels.len() {
            tot.sum[i] += a.sum[i];
            tot.sumsq[i] += a.sumsq[i];
        }
        tot.censored += a.censored;
    }
    let nf = n as f64;
    let out = levels
        .iter()
        .enumerate()
        .map(|(i, &m)| {
            let mean = tot.sum[i] as f64 / nf;
            let var = tot.sumsq[i] as f64 / nf - mean * mean;
            XiLevel { m, mean, stderr: (var / nf).sqrt(), bracket: (mean, mean + m as f64 * tot.censored as f64 / nf) }
        })
        .collect();
    (out, tot.censored)
}

/// Truncated means of the non-lazy steps of `h` and of `c` (independent
/// streams), each from `n_samples` steps.
pub fn xi_centred_check(params: &ModelParams, n_samples: u64, seed: u64, levels: &[u64], cap: u64) -> Result<XiReport, DomainError> {
    super::StepLaw::new(params.p)?;
    let (h, censored_h) = xi_side(params.p, n_samples, seed, 0, Kind::Ham, levels, cap);
    let (c, censored_c) = xi_side(params.p, n_samples, seed, 1 << 40, Kind::Cheese, levels, cap);
    Ok(XiReport { h, c, n_samples, censored_h, censored_c })
}

/// `E[xi 1{|xi| <= 1}]` from the excursion recursion: `-1/2 + (1-p)/2 +
/// (p/2) P(Xi = 1)`, bracketed by the unresolved excursion mass.
pub fn xi_unit_truncation_bounds(p: f64, depth: usize) -> Result<BoundsPair, DomainError> {
    let t = ExcursionTable::new(p, depth)?;
    let base = -0.5 + 0.5 * (1.0 - p);
    let one = t.xi_mass()[1];
    Ok(BoundsPair { lower: base + 0.5 * p * one, upper: base + 0.5 * p * (one + t.unresolved()) })
}

/// The two readings of `Xi` on an excursion word `X(phi) ... X(0)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum XiReading {
    /// Length of the reduced excursion, F included.
    ReducedLength,
    /// Length of the reduced `X(phi) ... X(-1)` minus one.
    InteriorMinusOne,
}

pub fn xi_value(w: &Word, reading: XiReading) -> i64 {
    match reading {
        XiReading::ReducedLength => reduce(w).len() as i64,
        XiReading::InteriorMinusOne => reduce(&w.slice(1, w.len() - 1)).len() as i64 - 1,
    }
}

#[derive(Debug, Clone)]
pub struct XiReadings {
    pub n: u64,
    pub censored: u64,
    /// Samples where the two readings differ.
    pub disagreements: u64,
    /// Means truncated at `truncate`, per reading.
    pub reduced_length_mean: f64,
    pub interior_minus_one_mean: f64,
    pub truncate: u64,
}

pub fn xi_readings(p: f64, n: u64, seed: u64, cap: u64, truncate: u64) -> Result<XiReadings, DomainError> {
    super::StepLaw::new(p)?;
    let parts = par::map((0..n).collect::<Vec<u64>>(), |i| {
        let mut s = BackwardStream::new(seed, i, p).expect("p checked");
        sample_excursion_word(&mut s, cap).map(|w| (xi_value(&w, XiReading::ReducedLength), xi_value(&w, XiReading::InteriorMinusOne)))
    });
    let (mut a, mut b, mut dis, mut cens) = (0.0, 0.0, 0, 0);
    for x in parts {
        match x {
            Some((u, v)) => {
                a += u.min(truncate as i64) as f64;
                b += v.min(truncate as i64) as f64;
                dis += (u != v) as u64;
            }
            None => cens += 1,
        }
    }
    let m = (n - cens) as f64;
    Ok(XiReadings { n, censored: cens, disagreements: dis, reduced_length_mean: a / m, interior_minus_one_mean: b / m, truncate })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn readings_on_small_words() {
        let w: Word = "hCF".parse().unwrap();
        assert_eq!(xi_value(&w, XiReading::ReducedLength), 1);
        assert_eq!(xi_value(&w, XiReading::InteriorMinusOne), 1);
        let w: Word = "cF".parse().unwrap();
        assert_eq!(xi_value(&w, XiReading::ReducedLength), 0);
        assert_eq!(xi_value(&w, XiReading::InteriorMinusOne), 0);
    }

    #[test]
    fn xi_readings_agree_and_have_unit_mean() {
        let params = ModelParams::from_q(2.0).unwrap();
        let r = xi_readings(params.p, 100_000, 7, 1 << 22, 1_000_000).unwrap();
        assert_eq!(r.disagreements, 0);
        assert!((r.reduced_length_mean - 1.0).abs() < 0.1, "{r:?}");
    }

    #[test]
    fn unit_truncation_matches_bounds() {
        let params = ModelParams::from_q(2.0).unwrap();
        let b = xi_unit_truncation_bounds(params.p, 30).unwrap();
        let r = xi_centred_check(&params, 400_000, 7, &[1], 1 << 24).unwrap();
        let l = r.h[0];
        assert!(l.mean > b.lower - 4.0 * l.stderr && l.mean < b.upper + 4.0 * l.stderr, "{l:?} {b:?}");
        let c = r.c[0];
        assert!((l.mean - c.mean).abs() < 4.0 * (l.stderr.hypot(c.stderr)), "{l:?} {c:?}");
    }

    #[test]
    fn coupling_small_run() {
        let params = ModelParams::from_q(2.0).unwrap();
        let r = geometric_coupling_check(&params, 100_000, 7, 5, 64, Caps::default()).unwrap();
        assert!((r.mean_gap - 2.0).abs() < 4.0 * r.mean_gap_stderr, "{r:?}");
        assert!(r.p_value > 1e-4, "{r:?}");
        for j in 1..=10 {
            let f = r.gap_counts[j] as f64 / r.n_gaps as f64;
            let e = 0.5f64.powi(j as i32);
            assert!((f - e).abs() < 4.0 * (e * (1.0 - e) / r.n_gaps as f64).sqrt(), "j={j}");
        }
        for row in &r.factorization {
            assert!(row.z.abs() < 4.0, "{row:?}");
        }
        assert!(r.correlation.abs() < 4.0 * r.correlation_stderr);
    }

    #[test]
    fn dictionary_small_run() {
        let params = ModelParams::from_q(2.0).unwrap();
        let h = dictionary_histogram(&params, 200_000, 7, Caps::default(), 10).unwrap();
        let rep = verify_dictionary(&h, &params, 10, 30, 1e-12).unwrap();
        assert!(rep.max_abs_z() < 4.5, "{:?}", rep.rows);
        assert!(rep.rows.iter().all(|r| r.bracketed));
        assert!((rep.rows[0].ratio - 1.0).abs() < 3.0 * rep.rows[0].ratio_stderr + 1e-12);
    }
}
