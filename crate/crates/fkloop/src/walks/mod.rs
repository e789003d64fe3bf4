//! Monte Carlo over the backward word: reduced burger walks, their hitting
//! times, and the perimeter statistics built on them.
//!
//! Every run reads its own stream keyed by `(seed, run index)`; campaigns
//! split the runs into fixed chunks and merge chunk results in order, so
//! the output does not depend on the number of workers.

pub mod checks;
pub mod stats;
pub mod stream;

pub use checks::{
    dictionary_histogram, dictionary_histogram_range, geometric_coupling_check, verify_dictionary, xi_centred_check, xi_readings, CouplingReport,
    DictionaryReport, DictionaryRow, FactorRow, XiLevel, XiReading, XiReadings, XiReport,
};
pub use stats::{hill_slope, log_bins, ols_slope, wls_slope, Histogram, LogBin, MCEstimate, SlopeFit};
pub use stream::{sample_excursion_word, BackwardStream, Block, BlockReader, Stop, SymbolSource, WordSource};

use std::ops::Range;

use crate::analytics::{DomainError, ModelParams};
use crate::par;
use crate::words::Kind;

pub const DEFAULT_LETTER_CAP: u64 = 10_000_000;
pub const CHUNK: u64 = 2048;

/// The three-point step law of the non-lazy walks; the `Xi` component is
/// realised by reading an excursion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepLaw {
    pub p: f64,
}

impl StepLaw {
    pub fn new(p: f64) -> Result<Self, DomainError> {
        if !(p > 0.0 && p < 0.5) {
            return Err(DomainError::P(p));
        }
        Ok(StepLaw { p })
    }

    /// Probabilities of `-1`, `+1` and of an excursion step.
    pub fn components(&self) -> [f64; 3] {
        [0.5, 0.5 * (1.0 - self.p), 0.5 * self.p]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    /// Raw letters per run.
    pub letters: u64,
    /// Blocks per run.
    pub blocks: u64,
}

impl Default for Caps {
    fn default() -> Self {
        Caps { letters: DEFAULT_LETTER_CAP, blocks: u64::MAX }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    /// Until `h~` or `c~` hits `-1`.
    FirstHit,
    /// Until `h~` hits `-1` or has made `horizon` moves; `c~` is ignored.
    HHit { horizon: u64 },
    /// Until each coordinate has hit `-1` or made `horizon` moves.
    BothHit { horizon: u64 },
}

/// Non-lazy (moves of that coordinate) and lazy (all blocks) hitting times.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HitTime {
    pub steps: u64,
    pub lazy: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RunRecord {
    pub tau_h: Option<HitTime>,
    pub tau_c: Option<HitTime>,
    pub h_steps: u64,
    pub c_steps: u64,
    pub blocks: u64,
    pub letters: u64,
    pub censored: bool,
    /// Lazy time at which a coordinate reached its horizon without hitting.
    pub h_left: Option<u64>,
    pub c_left: Option<u64>,
}

impl RunRecord {
    /// Coordinate that hit first in lazy time, when that is decided.
    pub fn first(&self) -> Option<Kind> {
        let before = |t: HitTime, other_left: Option<u64>| other_left.is_none_or(|x| x > t.lazy);
        match (self.tau_h, self.tau_c) {
            (Some(h), Some(c)) => Some(if h.lazy < c.lazy { Kind::Ham } else { Kind::Cheese }),
            (Some(h), None) if before(h, self.c_left) => Some(Kind::Ham),
            (None, Some(c)) if before(c, self.h_left) => Some(Kind::Cheese),
            _ => None,
        }
    }
}

/// Per-run increments of the non-lazy walks with the block index of each.
#[derive(Debug, Clone, Default)]
pub struct Trace {
    pub h: Vec<(u64, i64)>,
    pub c: Vec<(u64, i64)>,
}

pub fn run_walk<S: SymbolSource>(reader: &mut BlockReader<S>, target: Target, caps: Caps, mut trace: Option<&mut Trace>) -> RunRecord {
    let mut rec = RunRecord::default();
    let (mut h, mut c) = (0i64, 0i64);
    let (h_limit, c_limit) = match target {
        Target::FirstHit => (u64::MAX, u64::MAX),
        Target::HHit { horizon } => (horizon, 0),
        Target::BothHit { horizon } => (horizon, horizon),
    };
    let start = reader.letters_used();
    loop {
        let h_live = rec.tau_h.is_none() && rec.h_steps < h_limit;
        let c_live = rec.tau_c.is_none() && rec.c_steps < c_limit;
        let done = match target {
            Target::FirstHit => rec.tau_h.is_some() || rec.tau_c.is_some(),
            _ => !h_live && !c_live,
        };
        if done {
            break;
        }
        if rec.blocks >= caps.blocks || reader.letters_used() - start >= caps.letters {
            rec.censored = true;
            break;
        }
        reader.set_budget(start + caps.letters);
        let b = match reader.next_block() {
            Ok(b) => b,
            Err(_) => {
                rec.censored = true;
                break;
            }
        };
        rec.blocks += 1;
        let (dh, dc) = b.increment();
        match b.side() {
            Kind::Ham if h_live => {
                rec.h_steps += 1;
                h += dh;
                if let Some(t) = trace.as_deref_mut() {
                    t.h.push((rec.blocks, dh));
                }
                if h < 0 {
                    rec.tau_h = Some(HitTime { steps: rec.h_steps, lazy: rec.blocks });
                } else if rec.h_steps == h_limit {
                    rec.h_left = Some(rec.blocks);
                }
            }
            Kind::Cheese if c_live => {
                rec.c_steps += 1;
                c += dc;
                if let Some(t) = trace.as_deref_mut() {
                    t.c.push((rec.blocks, dc));
                }
                if c < 0 {
                    rec.tau_c = Some(HitTime { steps: rec.c_steps, lazy: rec.blocks });
                } else if rec.c_steps == c_limit {
                    rec.c_left = Some(rec.blocks);
                }
            }
            _ => {}
        }
    }
    rec.letters = reader.letters_used() - start;
    rec
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutcomeKind {
    HFirst { tau: u64, tau_lazy: u64 },
    CFirst { tau: u64, tau_lazy: u64 },
    Censored { letters: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WalkOutcome {
    pub kind: OutcomeKind,
    pub raw_cost: u64,
}

/// Which coordinate of the walk started at `X(0) = F` hits `-1` first.
pub fn hitting_outcome<S: SymbolSource>(source: S, caps: Caps) -> WalkOutcome {
    let mut r = BlockReader::new(source, caps.letters);
    let rec = run_walk(&mut r, Target::FirstHit, caps, None);
    let kind = match (rec.tau_h, rec.tau_c) {
        (Some(t), _) => OutcomeKind::HFirst { tau: t.steps, tau_lazy: t.lazy },
        (_, Some(t)) => OutcomeKind::CFirst { tau: t.steps, tau_lazy: t.lazy },
        _ => OutcomeKind::Censored { letters: rec.letters },
    };
    WalkOutcome { kind, raw_cost: rec.letters }
}

/// Lazy and non-lazy trajectories.
#[derive(Debug, Clone, Default)]
pub struct Trajectory {
    pub blocks: Vec<Block>,
    /// `(h~_n, c~_n)` for `n = 0..=blocks.len()`.
    pub h_tilde: Vec<i64>,
    pub c_tilde: Vec<i64>,
    /// Non-lazy walks, starting at 0.
    pub h: Vec<i64>,
    pub c: Vec<i64>,
    pub stop: Option<Stop>,
}

pub fn reduced_walk<S: SymbolSource>(source: S, max_blocks: usize, letter_cap: u64) -> Trajectory {
    let mut r = BlockReader::new(source, letter_cap);
    let mut t = Trajectory { h_tilde: vec![0], c_tilde: vec![0], h: vec![0], c: vec![0], ..Default::default() };
    while t.blocks.len() < max_blocks {
        match r.next_block() {
            Ok(b) => {
                let (dh, dc) = b.increment();
                let (x, y) = (*t.h_tilde.last().unwrap() + dh, *t.c_tilde.last().unwrap() + dc);
                t.h_tilde.push(x);
                t.c_tilde.push(y);
                match b.side() {
                    Kind::Ham => t.h.push(x),
                    Kind::Cheese => t.c.push(y),
                }
                t.blocks.push(b);
            }
            Err(e) => {
                t.stop = Some(e);
                break;
            }
        }
    }
    t
}

/// Runs `n_runs` independent walks and folds each record into a per-chunk
/// accumulator; chunks are merged in index order.
pub fn campaign<A, I, F, M>(p: f64, n_runs: u64, seed: u64, target: Target, caps: Caps, init: I, fold: F, merge: M) -> Result<A, DomainError>
where
    A: Send,
    I: Fn() -> A + Sync + Send,
    F: Fn(&mut A, u64, &RunRecord) + Sync + Send,
    M: Fn(A, A) -> A,
{
    campaign_range(p, 0..n_runs, seed, target, caps, init, fold, merge)
}

/// [`campaign`] over the run indices `runs`; results for adjacent ranges
/// merge into the result for their union.
#[allow(clippy::too_many_arguments)]
pub fn campaign_range<A, I, F, M>(
    p: f64,
    runs: Range<u64>,
    seed: u64,
    target: Target,
    caps: Caps,
    init: I,
    fold: F,
    merge: M,
) -> Result<A, DomainError>
where
    A: Send,
    I: Fn() -> A + Sync + Send,
    F: Fn(&mut A, u64, &RunRecord) + Sync + Send,
    M: Fn(A, A) -> A,
{
    StepLaw::new(p)?;
    let (start, end) = (runs.start, runs.end.max(runs.start));
    let chunks: Vec<u64> = (0..(end - start).div_ceil(CHUNK)).collect();
    let parts = par::map(chunks, |k| {
        let mut acc = init();
        for run in start + k * CHUNK..(start + (k + 1) * CHUNK).min(end) {
            let s = BackwardStream::new(seed, run, p).expect("p checked");
            let mut r = BlockReader::new(s, caps.letters);
            let rec = run_walk(&mut r, target, caps, None);
            fold(&mut acc, run, &rec);
        }
        acc
    });
    Ok(parts.into_iter().fold(init(), merge))
}

/// Coupled cluster and loop perimeter samples from first-hit runs.
#[derive(Debug, Clone)]
pub struct PerimeterSample {
    /// `tau - 1` of the coordinate that hits first; pooling both sides
    /// estimates the law conditional on `h` first.
    pub cluster: Histogram,
    /// Lazy hitting time `tau~ = tau~^h ∧ tau~^c`.
    pub loops: Histogram,
    pub h_first: u64,
    pub c_first: u64,
    /// Runs with loop shorter than the cluster boundary (always 0).
    pub coupling_violations: u64,
    pub letters: u64,
}

pub fn mc_perimeters(params: &ModelParams, n_samples: u64, seed: u64, caps: Caps) -> Result<PerimeterSample, DomainError> {
    mc_perimeters_range(params, 0..n_samples, seed, caps)
}

pub fn mc_perimeters_range(params: &ModelParams, runs: Range<u64>, seed: u64, caps: Caps) -> Result<PerimeterSample, DomainError> {
    let init = || PerimeterSample {
        cluster: Histogram::new(seed),
        loops: Histogram::new(seed),
        h_first: 0,
        c_first: 0,
        coupling_violations: 0,
        letters: 0,
    };
    campaign_range(
        params.p,
        runs,
        seed,
        Target::FirstHit,
        caps,
        init,
        |acc, _, rec| {
            acc.letters += rec.letters;
            let hit = match (rec.tau_h, rec.tau_c) {
                (Some(t), _) => {
                    acc.h_first += 1;
                    Some(t)
                }
                (_, Some(t)) => {
                    acc.c_first += 1;
                    Some(t)
                }
                _ => None,
            };
            match hit {
                Some(t) => {
                    acc.cluster.add(t.steps - 1);
                    acc.loops.add(t.lazy);
                    if t.lazy < t.steps - 1 {
                        acc.coupling_violations += 1;
                    }
                }
                None => {
                    acc.cluster.add_censored();
                    acc.loops.add_censored();
                }
            }
        },
        |mut a, b| {
            a.cluster.merge(&b.cluster);
            a.loops.merge(&b.loops);
            a.h_first += b.h_first;
            a.c_first += b.c_first;
            a.coupling_violations += b.coupling_violations;
            a.letters += b.letters;
            a
        },
    )
}

pub fn mc_cluster_perimeter(params: &ModelParams, n_samples: u64, seed: u64, caps: Caps) -> Result<Histogram, DomainError> {
    Ok(mc_perimeters(params, n_samples, seed, caps)?.cluster)
}

pub fn mc_loop_perimeter(params: &ModelParams, n_samples: u64, seed: u64, caps: Caps) -> Result<Histogram, DomainError> {
    Ok(mc_perimeters(params, n_samples, seed, caps)?.loops)
}
