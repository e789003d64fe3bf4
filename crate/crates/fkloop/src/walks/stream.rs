//! Backward letter streams and the block reader that collapses F-excursions.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analytics::DomainError;
use crate::words::{Kind, Symbol, Word};

/// Letters `X(-1), X(-2), ...` read right to left.
pub trait SymbolSource {
    fn next_symbol(&mut self) -> Option<Symbol>;
}

/// I.i.d. letters with weights `1/4, 1/4, (1-p)/4, (1-p)/4, p/2` for
/// `c, h, C, H, F`. Keyed by `(seed, run)`.
#[derive(Debug, Clone)]
pub struct BackwardStream {
    rng: ChaCha8Rng,
    thresholds: [u32; 4],
    buf: u64,
    have: bool,
    swapped: bool,
    consumed: u64,
}

impl BackwardStream {
    pub fn new(seed: u64, run: u64, p: f64) -> Result<Self, DomainError> {
        if !(p > 0.0 && p < 0.5) {
            return Err(DomainError::P(p));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(run);
        let scale = 4294967296.0;
        let o = (1.0 - p) / 4.0;
        let cum = [0.25, 0.5, 0.5 + o, 0.5 + 2.0 * o];
        let thresholds = cum.map(|x: f64| (x * scale).round() as u32);
        Ok(BackwardStream { rng, thresholds, buf: 0, have: false, swapped: false, consumed: 0 })
    }

    /// Same stream with `h <-> c` and `H <-> C` exchanged.
    pub fn swapped(mut self) -> Self {
        self.swapped = !self.swapped;
        self
    }

    pub fn consumed(&self) -> u64 {
        self.consumed
    }

    #[inline]
    fn draw(&mut self) -> u32 {
        if self.have {
            self.have = false;
            (self.buf >> 32) as u32
        } else {
            self.buf = self.rng.next_u64();
            self.have = true;
            self.buf as u32
        }
    }
}

impl SymbolSource for BackwardStream {
    #[inline]
    fn next_symbol(&mut self) -> Option<Symbol> {
        let u = self.draw();
        self.consumed += 1;
        let t = &self.thresholds;
        let s = if u < t[0] {
            Symbol::Cheese
        } else if u < t[1] {
            Symbol::Ham
        } else if u < t[2] {
            Symbol::CheeseOrder
        } else if u < t[3] {
            Symbol::HamOrder
        } else {
            Symbol::Flexible
        };
        Some(if self.swapped { s.swap_kind() } else { s })
    }
}

/// A finite word `X(-k) ... X(-1)`, served from the right.
#[derive(Debug, Clone)]
pub struct WordSource {
    symbols: Vec<Symbol>,
}

impl WordSource {
    pub fn new(w: &Word) -> Self {
        WordSource { symbols: w.symbols().to_vec() }
    }
}

impl SymbolSource for WordSource {
    fn next_symbol(&mut self) -> Option<Symbol> {
        self.symbols.pop()
    }
}

/// One step of the reduced walk: a single letter, or an F-excursion read
/// all at once.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Block {
    Letter(Symbol),
    /// `kind` is the burger consumed by the F; `reduced` counts the
    /// unmatched orders of the other kind.
    Excursion { kind: Kind, reduced: u64, letters: u64 },
}

impl Block {
    /// Increment of `(h~, c~)`.
    #[inline]
    pub fn increment(&self) -> (i64, i64) {
        match *self {
            Block::Letter(Symbol::Ham) => (-1, 0),
            Block::Letter(Symbol::HamOrder) => (1, 0),
            Block::Letter(Symbol::Cheese) => (0, -1),
            Block::Letter(Symbol::CheeseOrder) => (0, 1),
            Block::Letter(Symbol::Flexible) => unreachable!("F is always read as an excursion"),
            Block::Excursion { kind: Kind::Ham, reduced, .. } => (0, reduced as i64),
            Block::Excursion { kind: Kind::Cheese, reduced, .. } => (reduced as i64, 0),
        }
    }

    /// The coordinate this block moves (an excursion of reduced length 0
    /// still counts as a move).
    #[inline]
    pub fn side(&self) -> Kind {
        match *self {
            Block::Letter(s) => s.kind().expect("not F"),
            Block::Excursion { kind, .. } => kind.other(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stop {
    /// The raw-letter budget ran out inside the current block.
    LetterCap,
    /// A finite source ran dry.
    Exhausted,
}

/// Reads blocks from a source under a raw-letter budget.
#[derive(Debug)]
pub struct BlockReader<S> {
    pub source: S,
    levels: Levels,
    budget: u64,
    used: u64,
}

impl<S: SymbolSource> BlockReader<S> {
    pub fn new(source: S, budget: u64) -> Self {
        BlockReader { source, levels: Levels::default(), budget, used: 0 }
    }

    pub fn letters_used(&self) -> u64 {
        self.used
    }

    /// Total letters this reader may consume, counted from its creation.
    pub fn set_budget(&mut self, budget: u64) {
        self.budget = budget;
    }

    #[inline]
    fn letter(&mut self) -> Result<Symbol, Stop> {
        if self.used >= self.budget {
            return Err(Stop::LetterCap);
        }
        let s = self.source.next_symbol().ok_or(Stop::Exhausted)?;
        self.used += 1;
        Ok(s)
    }

    pub fn next_block(&mut self) -> Result<Block, Stop> {
        let s = self.letter()?;
        if s != Symbol::Flexible {
            return Ok(Block::Letter(s));
        }
        let start = self.used;
        self.resolve().map(|(kind, reduced)| Block::Excursion { kind, reduced, letters: self.used - start + 1 })
    }

    /// Reads past an F until the burger it consumes; returns the burger kind
    /// and the number of unmatched orders of the other kind.
    fn resolve(&mut self) -> Result<(Kind, u64), Stop> {
        self.levels.start();
        loop {
            let s = self.letter()?;
            if let Some(done) = self.levels.feed(s) {
                return Ok(done);
            }
        }
    }
}

/// Pending `(H, C)` orders of each open F-excursion, innermost last.
#[derive(Debug, Default)]
struct Levels(Vec<(u64, u64)>);

impl Levels {
    fn start(&mut self) {
        self.0.clear();
        self.0.push((0, 0));
    }

    /// Feeds the next letter to the left; returns the outermost closure.
    #[inline]
    fn feed(&mut self, s: Symbol) -> Option<(Kind, u64)> {
        let top = self.0.last_mut().expect("open level");
        let (kind, l) = match s {
            Symbol::HamOrder => {
                top.0 += 1;
                return None;
            }
            Symbol::CheeseOrder => {
                top.1 += 1;
                return None;
            }
            Symbol::Ham if top.0 > 0 => {
                top.0 -= 1;
                return None;
            }
            Symbol::Cheese if top.1 > 0 => {
                top.1 -= 1;
                return None;
            }
            Symbol::Ham => (Kind::Ham, top.1),
            Symbol::Cheese => (Kind::Cheese, top.0),
            Symbol::Flexible => {
                self.0.push((0, 0));
                return None;
            }
        };
        self.0.pop();
        match self.0.last_mut() {
            None => Some((kind, l)),
            Some(parent) => {
                match kind {
                    Kind::Ham => parent.1 += l,
                    Kind::Cheese => parent.0 += l,
                }
                None
            }
        }
    }
}

/// Letters of one F-excursion `X(phi) ... X(0)` read back from a fresh F,
/// or `None` past `cap` letters.
pub fn sample_excursion_word<S: SymbolSource>(src: &mut S, cap: u64) -> Option<Word> {
    let mut letters = vec![Symbol::Flexible];
    let mut levels = Levels::default();
    levels.start();
    while (letters.len() as u64) < cap {
        let s = src.next_symbol()?;
        letters.push(s);
        if levels.feed(s).is_some() {
            letters.reverse();
            return Some(Word::new(letters));
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::{classify_excursion, reduce};

    #[test]
    fn symbol_frequencies() {
        let p = 1.0 / 3.0;
        let mut s = BackwardStream::new(11, 0, p).unwrap();
        let n = 1_000_000;
        let mut counts = [0usize; 5];
        for _ in 0..n {
            let i = match s.next_symbol().unwrap() {
                Symbol::Cheese => 0,
                Symbol::Ham => 1,
                Symbol::CheeseOrder => 2,
                Symbol::HamOrder => 3,
                Symbol::Flexible => 4,
            };
            counts[i] += 1;
        }
        let expect = [0.25, 0.25, (1.0 - p) / 4.0, (1.0 - p) / 4.0, p / 2.0];
        for (c, e) in counts.iter().zip(expect) {
            let sd = (e * (1.0 - e) / n as f64).sqrt();
            assert!((*c as f64 / n as f64 - e).abs() < 4.0 * sd, "{counts:?}");
        }
        assert_eq!(s.consumed(), n as u64);
    }

    #[test]
    fn streams_are_reproducible() {
        let a: Vec<_> = {
            let mut s = BackwardStream::new(5, 3, 0.3).unwrap();
            (0..100).map(|_| s.next_symbol().unwrap()).collect()
        };
        let mut s = BackwardStream::new(5, 3, 0.3).unwrap();
        let b: Vec<_> = (0..100).map(|_| s.next_symbol().unwrap()).collect();
        assert_eq!(a, b);
        let mut t = BackwardStream::new(5, 4, 0.3).unwrap();
        let c: Vec<_> = (0..100).map(|_| t.next_symbol().unwrap()).collect();
        assert_ne!(a, c);
        let mut u = BackwardStream::new(5, 3, 0.3).unwrap().swapped();
        let d: Vec<_> = (0..100).map(|_| u.next_symbol().unwrap().swap_kind()).collect();
        assert_eq!(a, d);
        assert!(BackwardStream::new(5, 3, 0.5).is_err());
    }

    fn blocks(w: &str) -> Vec<Block> {
        let mut r = BlockReader::new(WordSource::new(&w.parse().unwrap()), u64::MAX);
        let mut out = Vec::new();
        while let Ok(b) = r.next_block() {
            out.push(b);
        }
        out
    }

    #[test]
    fn block_rules() {
        // read right to left
        assert_eq!(blocks("hH"), vec![Block::Letter(Symbol::HamOrder), Block::Letter(Symbol::Ham)]);
        let b = blocks("cF");
        assert_eq!(b, vec![Block::Excursion { kind: Kind::Cheese, reduced: 0, letters: 2 }]);
        assert_eq!(b[0].increment(), (0, 0));
        let b = blocks("cHcCF");
        assert_eq!(b, vec![Block::Excursion { kind: Kind::Cheese, reduced: 1, letters: 5 }]);
        assert_eq!(b[0].increment(), (1, 0));
        // nested excursion contributes its unmatched orders to the outer one
        let b = blocks("hCcFF");
        assert_eq!(b, vec![Block::Excursion { kind: Kind::Ham, reduced: 1, letters: 5 }]);
        assert_eq!(
            blocks("CcHF"),
            vec![Block::Excursion { kind: Kind::Cheese, reduced: 1, letters: 3 }, Block::Letter(Symbol::CheeseOrder)]
        );
    }

    #[test]
    fn budget_stops_reading() {
        let mut r = BlockReader::new(WordSource::new(&"hHHHF".parse().unwrap()), 3);
        assert_eq!(r.next_block(), Err(Stop::LetterCap));
        let mut r = BlockReader::new(WordSource::new(&"HF".parse().unwrap()), 10);
        assert_eq!(r.next_block(), Err(Stop::Exhausted));
    }

    #[test]
    fn excursion_words_agree_with_reader() {
        let p = 0.35;
        for run in 0..2000 {
            let mut s = BackwardStream::new(3, run, p).unwrap();
            let Some(w) = sample_excursion_word(&mut s, 100_000) else { continue };
            let e = classify_excursion(&w).unwrap();
            let mut r = BlockReader::new(WordSource::new(&w), u64::MAX);
            match r.next_block().unwrap() {
                Block::Excursion { kind, reduced, letters } => {
                    assert_eq!(kind, e.kind());
                    assert_eq!(reduced as usize, reduce(&w).len());
                    assert_eq!(letters as usize, w.len());
                }
                b => panic!("{b:?}"),
            }
        }
    }
}
