//! Hamburger-cheeseburger words.
//!
//! Burgers `c`, `h` are produced; orders `C`, `H` consume the most recent
//! burger of their own type and `F` consumes the most recent burger of either
//! type. Positions in [`MatchMap`] are 1-based.

use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::analytics::DomainError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(u8)]
pub enum Symbol {
    /// `c`
    Cheese = b'c',
    /// `h`
    Ham = b'h',
    /// `C`
    CheeseOrder = b'C',
    /// `H`
    HamOrder = b'H',
    /// `F`
    Flexible = b'F',
}

pub const ALPHABET: [Symbol; 5] = [Symbol::Cheese, Symbol::Ham, Symbol::CheeseOrder, Symbol::HamOrder, Symbol::Flexible];

/// The two burger types; also the type of an F-excursion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kind {
    Ham,
    Cheese,
}

impl Kind {
    pub fn other(self) -> Kind {
        match self {
            Kind::Ham => Kind::Cheese,
            Kind::Cheese => Kind::Ham,
        }
    }

    pub fn burger(self) -> Symbol {
        match self {
            Kind::Ham => Symbol::Ham,
            Kind::Cheese => Symbol::Cheese,
        }
    }

    pub fn order(self) -> Symbol {
        match self {
            Kind::Ham => Symbol::HamOrder,
            Kind::Cheese => Symbol::CheeseOrder,
        }
    }
}

impl Symbol {
    pub fn as_char(self) -> char {
        self as u8 as char
    }

    pub fn from_char(ch: char) -> Option<Symbol> {
        match ch {
            'c' => Some(Symbol::Cheese),
            'h' => Some(Symbol::Ham),
            'C' => Some(Symbol::CheeseOrder),
            'H' => Some(Symbol::HamOrder),
            'F' => Some(Symbol::Flexible),
            _ => None,
        }
    }

    pub fn is_burger(self) -> bool {
        matches!(self, Symbol::Cheese | Symbol::Ham)
    }

    pub fn is_order(self) -> bool {
        !self.is_burger()
    }

    /// Burger type of `c`, `h`, `C`, `H`; `None` for `F`.
    pub fn kind(self) -> Option<Kind> {
        match self {
            Symbol::Cheese | Symbol::CheeseOrder => Some(Kind::Cheese),
            Symbol::Ham | Symbol::HamOrder => Some(Kind::Ham),
            Symbol::Flexible => None,
        }
    }

    /// Exchange ham and cheese; `F` is fixed.
    pub fn swap_kind(self) -> Symbol {
        match self {
            Symbol::Cheese => Symbol::Ham,
            Symbol::Ham => Symbol::Cheese,
            Symbol::CheeseOrder => Symbol::HamOrder,
            Symbol::HamOrder => Symbol::CheeseOrder,
            Symbol::Flexible => Symbol::Flexible,
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("invalid symbol {ch:?} at position {position}")]
    InvalidSymbol { ch: char, position: usize },
    #[error("word is not balanced; first unmatched symbol at position {position}")]
    Unbalanced { position: usize },
    #[error("F at position {position} is not matched inside the word")]
    UnmatchedF { position: usize },
    #[error("not an F-excursion")]
    NotExcursion,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct Word(Vec<Symbol>);

impl Word {
    pub fn new(symbols: Vec<Symbol>) -> Self {
        Word(symbols)
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.0
    }

    /// Symbol at 1-based position `i`.
    pub fn at(&self, i: usize) -> Symbol {
        self.0[i - 1]
    }

    pub fn push(&mut self, s: Symbol) {
        self.0.push(s);
    }

    pub fn extend_from(&mut self, other: &Word) {
        self.0.extend_from_slice(&other.0);
    }

    pub fn count(&self, s: Symbol) -> usize {
        self.0.iter().filter(|&&x| x == s).count()
    }

    /// Subword between 1-based positions `i..=j`.
    pub fn slice(&self, i: usize, j: usize) -> Word {
        Word(self.0[i - 1..j].to_vec())
    }

    pub fn swap_kind(&self) -> Word {
        Word(self.0.iter().map(|s| s.swap_kind()).collect())
    }

    pub fn is_balanced(&self) -> bool {
        reduce(self).is_empty()
    }

    /// First position that survives reduction, if any.
    pub fn first_unmatched(&self) -> Option<usize> {
        let m = match_positions(self);
        (1..=self.len()).find(|&i| !m.is_matched(i))
    }
}

impl From<Vec<Symbol>> for Word {
    fn from(v: Vec<Symbol>) -> Self {
        Word(v)
    }
}

impl FromStr for Word {
    type Err = WordError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .enumerate()
            .map(|(i, ch)| Symbol::from_char(ch).ok_or(WordError::InvalidSymbol { ch, position: i + 1 }))
            .collect::<Result<Vec<_>, _>>()
            .map(Word)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.0.iter().map(|s| s.as_char()).collect();
        f.write_str(&s)
    }
}

/// Unmatched orders followed by unmatched burgers, each in word order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct ReducedWord {
    pub orders: Vec<Symbol>,
    pub burgers: Vec<Symbol>,
}

impl ReducedWord {
    pub fn is_empty(&self) -> bool {
        self.orders.is_empty() && self.burgers.is_empty()
    }

    pub fn len(&self) -> usize {
        self.orders.len() + self.burgers.len()
    }

    pub fn to_word(&self) -> Word {
        Word(self.orders.iter().chain(self.burgers.iter()).copied().collect())
    }
}

impl fmt::Display for ReducedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("∅");
        }
        write!(f, "{}", self.to_word())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchMap {
    // partner[i] for 0-based i, stored 1-based; 0 when unmatched
    partner: Vec<usize>,
}

impl MatchMap {
    /// The burger consumed by the order at `order_pos`.
    pub fn get(&self, order_pos: usize) -> Option<usize> {
        match self.partner.get(order_pos - 1) {
            Some(&j) if j != 0 && j < order_pos => Some(j),
            _ => None,
        }
    }

    /// Partner of any position, burger or order.
    pub fn partner(&self, pos: usize) -> Option<usize> {
        match self.partner[pos - 1] {
            0 => None,
            j => Some(j),
        }
    }

    pub fn is_matched(&self, pos: usize) -> bool {
        self.partner[pos - 1] != 0
    }

    /// `(order, burger)` pairs sorted by order position.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        (1..=self.partner.len()).filter_map(|i| self.get(i).map(|j| (i, j))).collect()
    }

    pub fn len(&self) -> usize {
        self.pairs().len()
    }

    pub fn is_empty(&self) -> bool {
        self.partner.iter().all(|&j| j == 0)
    }
}

// One left-to-right pass; the two stacks hold positions of pending burgers.
fn scan(w: &Word) -> (Vec<usize>, Vec<usize>, Vec<usize>) {
    let n = w.len();
    let mut partner = vec![0usize; n];
    let mut hs: Vec<usize> = Vec::new();
    let mut cs: Vec<usize> = Vec::new();
    for (i0, &s) in w.0.iter().enumerate() {
        let i = i0 + 1;
        let taken = match s {
            Symbol::Ham => {
                hs.push(i);
                None
            }
            Symbol::Cheese => {
                cs.push(i);
                None
            }
            Symbol::HamOrder => hs.pop(),
            Symbol::CheeseOrder => cs.pop(),
            Symbol::Flexible => match (hs.last(), cs.last()) {
                (Some(&a), Some(&b)) if a > b => hs.pop(),
                (Some(_), Some(_)) => cs.pop(),
                (Some(_), None) => hs.pop(),
                (None, Some(_)) => cs.pop(),
                (None, None) => None,
            },
        };
        if let Some(j) = taken {
            partner[i0] = j;
            partner[j - 1] = i;
        }
    }
    (partner, hs, cs)
}

pub fn match_positions(w: &Word) -> MatchMap {
    MatchMap { partner: scan(w).0 }
}

pub fn reduce(w: &Word) -> ReducedWord {
    let (partner, _, _) = scan(w);
    let mut orders = Vec::new();
    let mut burgers = Vec::new();
    for (i, &s) in w.0.iter().enumerate() {
        if partner[i] == 0 {
            if s.is_burger() {
                burgers.push(s);
            } else {
                orders.push(s);
            }
        }
    }
    ReducedWord { orders, burgers }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FExcursion {
    word: Word,
    kind: Kind,
}

impl FExcursion {
    pub fn word(&self) -> &Word {
        &self.word
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    /// Length of the reduced word; for a type-h excursion the number of
    /// unmatched `C`.
    pub fn reduced_len(&self) -> usize {
        reduce(&self.word).len()
    }
}

pub fn classify_excursion(w: &Word) -> Option<FExcursion> {
    let n = w.len();
    if n < 2 || w.at(n) != Symbol::Flexible {
        return None;
    }
    let kind = match w.at(1) {
        Symbol::Ham => Kind::Ham,
        Symbol::Cheese => Kind::Cheese,
        _ => return None,
    };
    (match_positions(w).get(n) == Some(1)).then(|| FExcursion { word: w.clone(), kind })
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Block {
    Letter(Symbol),
    Excursion(FExcursion),
}

impl Block {
    pub fn to_word(&self) -> Word {
        match self {
            Block::Letter(s) => Word(vec![*s]),
            Block::Excursion(e) => e.word.clone(),
        }
    }

    /// The coordinate this block can move: `h`, `H` and type-c excursions
    /// act on the ham count.
    pub fn side(&self) -> Kind {
        match self {
            Block::Letter(s) => s.kind().expect("letters are never F"),
            Block::Excursion(e) => e.kind.other(),
        }
    }

    /// Compact form used for skeleton words: excursions print as `(hF)` / `(cF)`.
    pub fn label(&self) -> String {
        match self {
            Block::Letter(s) => s.to_string(),
            Block::Excursion(e) => format!("({}F)", e.kind.burger()),
        }
    }
}

/// Split a word into single letters and maximal F-excursions, scanning from
/// the right end (the last symbol plays the role of `X(0)`). Blocks are
/// returned left to right.
pub fn maximal_excursion_decomposition(w: &Word) -> Result<Vec<Block>, WordError> {
    let m = match_positions(w);
    let mut blocks = Vec::new();
    let mut i = w.len();
    while i >= 1 {
        let s = w.at(i);
        if s == Symbol::Flexible {
            let j = m.get(i).ok_or(WordError::UnmatchedF { position: i })?;
            let word = w.slice(j, i);
            let kind = w.at(j).kind().expect("F matches a burger");
            blocks.push(Block::Excursion(FExcursion { word, kind }));
            i = j - 1;
        } else {
            blocks.push(Block::Letter(s));
            i -= 1;
        }
    }
    blocks.reverse();
    Ok(blocks)
}

/// `e = b r[0] s[0] r[1] ... s[k-1] r[k] F`, left to right, where the `s`
/// blocks move the coordinate of the excursion's own type and the `r` words
/// collect everything else.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkeletonDecomposition {
    pub kind: Kind,
    pub s_blocks: Vec<Block>,
    pub r_blocks: Vec<Word>,
}

impl SkeletonDecomposition {
    pub fn reassemble(&self) -> Word {
        let mut w = Word(vec![self.kind.burger()]);
        for (i, r) in self.r_blocks.iter().enumerate() {
            w.extend_from(r);
            if let Some(s) = self.s_blocks.get(i) {
                w.extend_from(&s.to_word());
            }
        }
        w.push(Symbol::Flexible);
        w
    }

    /// `sk(e)`: the excursion with every `r` block deleted.
    pub fn skeleton_word(&self) -> Word {
        let mut w = Word(vec![self.kind.burger()]);
        for s in &self.s_blocks {
            w.extend_from(&s.to_word());
        }
        w.push(Symbol::Flexible);
        w
    }

    /// The skeleton with sub-excursions collapsed, e.g. `h h H (cF) F`.
    pub fn tilde_labels(&self) -> Vec<String> {
        if self.s_blocks.is_empty() {
            return Vec::new();
        }
        let mut out = vec![self.kind.burger().to_string()];
        out.extend(self.s_blocks.iter().map(Block::label));
        out.push("F".into());
        out
    }
}

pub fn skeleton(e: &FExcursion) -> SkeletonDecomposition {
    let n = e.word.len();
    let inner = if n > 2 { e.word.slice(2, n - 1) } else { Word::empty() };
    let blocks = maximal_excursion_decomposition(&inner).expect("interior of an excursion is closed");
    let mut s_blocks = Vec::new();
    let mut r_blocks = vec![Word::empty()];
    for b in blocks {
        if b.side() == e.kind {
            s_blocks.push(b);
            r_blocks.push(Word::empty());
        } else {
            r_blocks.last_mut().expect("non-empty").extend_from(&b.to_word());
        }
    }
    SkeletonDecomposition { kind: e.kind, s_blocks, r_blocks }
}

fn check_p(p: f64) -> Result<(), DomainError> {
    if p > 0.0 && p < 0.5 {
        Ok(())
    } else {
        Err(DomainError::P(p))
    }
}

pub fn symbol_weight(s: Symbol, p: f64) -> Result<f64, DomainError> {
    check_p(p)?;
    Ok(match s {
        Symbol::Cheese | Symbol::Ham => 0.25,
        Symbol::CheeseOrder | Symbol::HamOrder => 0.25 * (1.0 - p),
        Symbol::Flexible => 0.5 * p,
    })
}

pub fn symbol_weight_exact(s: Symbol, p: &BigRational) -> Result<BigRational, DomainError> {
    let half = BigRational::new(1.into(), 2.into());
    let quarter = BigRational::new(1.into(), 4.into());
    if !(p > &BigRational::zero() && p < &half) {
        return Err(DomainError::Other(format!("p must lie in (0,1/2); got {p}")));
    }
    Ok(match s {
        Symbol::Cheese | Symbol::Ham => quarter,
        Symbol::CheeseOrder | Symbol::HamOrder => quarter * (BigRational::one() - p),
        Symbol::Flexible => half * p,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    fn red(s: &str) -> String {
        reduce(&w(s)).to_word().to_string()
    }

    #[test]
    fn reduce_examples() {
        assert_eq!(red("hH"), "");
        assert_eq!(red("hcF"), "h");
        assert_eq!(red("hChCFhHccCFF"), "CC");
        assert_eq!(red("cHhC"), "Hh");
        assert!(w("").is_balanced());
    }

    #[test]
    fn match_examples() {
        assert_eq!(match_positions(&w("hH")).pairs(), vec![(2, 1)]);
        assert_eq!(match_positions(&w("hhH")).pairs(), vec![(3, 2)]);
        assert_eq!(match_positions(&w("hcCF")).pairs(), vec![(3, 2), (4, 1)]);
        assert_eq!(match_positions(&w("Hh")).pairs(), vec![]);
        assert_eq!(w("hHCc").first_unmatched(), Some(3));
    }

    #[test]
    fn excursion_examples() {
        assert_eq!(classify_excursion(&w("hF")).unwrap().kind(), Kind::Ham);
        assert_eq!(classify_excursion(&w("hcCF")).unwrap().kind(), Kind::Ham);
        assert_eq!(classify_excursion(&w("cF")).unwrap().kind(), Kind::Cheese);
        assert!(classify_excursion(&w("hH")).is_none());
        assert!(classify_excursion(&w("hcF")).is_none());
        assert!(classify_excursion(&w("HF")).is_none());
    }

    fn labels(bs: &[Block]) -> Vec<String> {
        bs.iter().map(|b| b.to_word().to_string()).collect()
    }

    #[test]
    fn decomposition_examples() {
        assert_eq!(labels(&maximal_excursion_decomposition(&w("hH")).unwrap()), ["h", "H"]);
        assert_eq!(labels(&maximal_excursion_decomposition(&w("cFh")).unwrap()), ["cF", "h"]);
        // interior of the skeleton example
        let d = maximal_excursion_decomposition(&w("ChCFhHccCF")).unwrap();
        assert_eq!(labels(&d), ["C", "hCF", "h", "H", "ccCF"]);
        assert!(matches!(&d[4], Block::Excursion(e) if e.kind() == Kind::Cheese));
        assert_eq!(maximal_excursion_decomposition(&w("hFF")), Err(WordError::UnmatchedF { position: 3 }));
    }

    #[test]
    fn skeleton_example() {
        let e = classify_excursion(&w("hChCFhHccCFF")).unwrap();
        let sk = skeleton(&e);
        assert_eq!(sk.skeleton_word().to_string(), "hhHccCFF");
        assert_eq!(sk.tilde_labels().join(" "), "h h H (cF) F");
        assert_eq!(sk.reassemble(), *e.word());
        assert!(reduce(&sk.skeleton_word()).is_empty());

        let e = classify_excursion(&w("hF")).unwrap();
        let sk = skeleton(&e);
        assert!(sk.s_blocks.is_empty());
        assert!(sk.tilde_labels().is_empty());
    }

    #[test]
    fn weights() {
        assert!((symbol_weight(Symbol::Flexible, 1.0 / 3.0).unwrap() - 1.0 / 6.0).abs() < 1e-15);
        assert_eq!(symbol_weight(Symbol::Cheese, 0.2).unwrap(), 0.25);
        assert!(symbol_weight(Symbol::Ham, 0.5).is_err());
        let p = BigRational::new(1.into(), 3.into());
        assert_eq!(symbol_weight_exact(Symbol::Flexible, &p).unwrap(), BigRational::new(1.into(), 6.into()));
        let q = BigRational::new(1.into(), 4.into());
        let total: BigRational = ALPHABET.iter().map(|&s| symbol_weight_exact(s, &q).unwrap()).sum();
        assert!(total.is_one());
    }

    // Rewrite with the relations in a random order until none applies.
    fn rewrite_randomly(word: &Word, rng: &mut ChaCha8Rng) -> Word {
        let mut v = word.symbols().to_vec();
        loop {
            let sites: Vec<usize> = (0..v.len().saturating_sub(1))
                .filter(|&i| v[i].is_burger() && v[i + 1].is_order())
                .collect();
            if sites.is_empty() {
                return Word(v);
            }
            let i = sites[rng.gen_range(0..sites.len())];
            let (b, o) = (v[i], v[i + 1]);
            if o == Symbol::Flexible || o.kind() == b.kind() {
                v.drain(i..i + 2);
            } else {
                v.swap(i, i + 1);
            }
        }
    }

    #[test]
    fn confluence_against_random_rewrites() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100_000 {
            let n = rng.gen_range(0..16);
            let word = Word((0..n).map(|_| ALPHABET[rng.gen_range(0..5)]).collect());
            assert_eq!(rewrite_randomly(&word, &mut rng), reduce(&word).to_word(), "{word}");
        }
    }

    fn arb_word(max: usize) -> impl Strategy<Value = Word> {
        prop::collection::vec(0usize..5, 0..max).prop_map(|v| Word(v.into_iter().map(|i| ALPHABET[i]).collect()))
    }

    proptest! {
        #[test]
        fn reduce_idempotent(word in arb_word(200)) {
            let r = reduce(&word);
            prop_assert_eq!(reduce(&r.to_word()), r);
        }

        #[test]
        fn cancelling_pair_insertion(word in arb_word(60), at in 0usize..61, pair in 0usize..4) {
            let at = at.min(word.len());
            let ins = [["c", "C"], ["h", "H"], ["c", "F"], ["h", "F"]][pair];
            let mut v = word.symbols().to_vec();
            v.insert(at, Symbol::from_char(ins[1].chars().next().unwrap()).unwrap());
            v.insert(at, Symbol::from_char(ins[0].chars().next().unwrap()).unwrap());
            prop_assert_eq!(reduce(&Word(v)), reduce(&word));
        }

        #[test]
        fn matching_is_consistent(word in arb_word(120)) {
            let m = match_positions(&word);
            let r = reduce(&word);
            let unmatched = (1..=word.len()).filter(|&i| !m.is_matched(i)).count();
            prop_assert_eq!(unmatched, r.len());
            let pairs = m.pairs();
            for &(o, b) in &pairs {
                let (so, sb) = (word.at(o), word.at(b));
                prop_assert!(b < o && sb.is_burger() && so.is_order());
                prop_assert!(so == Symbol::Flexible || so.kind() == sb.kind());
            }
            // crossing needs burgers of different types, and the pair that
            // closes first cannot be an F
            for &(o1, b1) in &pairs {
                for &(o2, b2) in &pairs {
                    if b1 < b2 && b2 < o1 && o1 < o2 {
                        prop_assert!(word.at(o1) != Symbol::Flexible);
                        prop_assert!(word.at(b1) != word.at(b2));
                    }
                }
            }
        }

        #[test]
        fn excursions_reduce_to_one_order_type(word in arb_word(200)) {
            let m = match_positions(&word);
            for (o, b) in m.pairs() {
                if word.at(o) != Symbol::Flexible {
                    continue;
                }
                let e = classify_excursion(&word.slice(b, o)).expect("sub-excursion");
                let r = reduce(e.word());
                prop_assert!(r.burgers.is_empty());
                prop_assert!(r.orders.iter().all(|&s| s == e.kind().other().order()));
                let sk = skeleton(&e);
                prop_assert_eq!(sk.reassemble(), e.word().clone());
                prop_assert!(reduce(&sk.skeleton_word()).is_empty());
                prop_assert!(sk.s_blocks.iter().all(|b| b.side() == e.kind()));
            }
        }

        #[test]
        fn decomposition_concatenates(word in arb_word(200)) {
            // drop dangling F (they consume nothing) so the decomposition exists
            let m = match_positions(&word);
            let trimmed: Vec<Symbol> = (1..=word.len())
                .filter(|&i| word.at(i) != Symbol::Flexible || m.is_matched(i))
                .map(|i| word.at(i))
                .collect();
            let t = Word(trimmed);
            let blocks = maximal_excursion_decomposition(&t).unwrap();
            let mut joined = Word::empty();
            for b in &blocks {
                joined.extend_from(&b.to_word());
            }
            prop_assert_eq!(joined, t);
        }

        #[test]
        fn weights_normalised(p in 0.001f64..0.499) {
            let s: f64 = ALPHABET.iter().map(|&x| symbol_weight(x, p).unwrap()).sum();
            prop_assert!((s - 1.0).abs() < 1e-15);
        }
    }
}
