//! Both directions of the hamburger-cheeseburger bijection.

use super::tutte::{cycle_from, loop_next, root_triangle};
use super::{alpha, EdgeSubset, PlanarMap};
use crate::words::{match_positions, Symbol, Word, WordError};

/// The space-filling exploration behind [`map_to_word`].
#[derive(Debug, Clone)]
pub struct Exploration {
    pub word: Word,
    /// Triangle read at each position of the word.
    pub triangles: Vec<usize>,
    /// Edges whose diagonal was flipped to merge loops.
    pub flipped: EdgeSubset,
    /// Edge subset after the flips; open edges form a spanning tree.
    pub merged: EdgeSubset,
    pub initial_loops: usize,
}

pub fn map_to_word(m: &PlanarMap, open: &EdgeSubset) -> Word {
    map_to_word_traced(m, open).word
}

pub fn map_to_word_traced(m: &PlanarMap, open: &EdgeSubset) -> Exploration {
    let n = m.half_edges();
    let mut cur = open.clone();
    let mut flipped = EdgeSubset::empty(m.edges());
    let initial_loops = super::loop_count(m, open);
    let seq = loop {
        let next = loop_next(m, &cur);
        let seq = cycle_from(&next, root_triangle(m, &next));
        if seq.len() == n {
            break seq;
        }
        let mut on = vec![false; n];
        for &t in &seq {
            on[t] = true;
        }
        let t = *seq.iter().rev().find(|&&t| !on[alpha(t)]).expect("some companion lies on another loop");
        cur.toggle(t / 2);
        flipped.toggle(t / 2);
    };
    let mut visited = vec![false; m.edges()];
    let mut word = Word::empty();
    for &t in &seq {
        let e = t / 2;
        let primal = cur.is_open(e);
        let s = match (visited[e], primal) {
            (false, true) => Symbol::Ham,
            (false, false) => Symbol::Cheese,
            (true, _) if flipped.is_open(e) => Symbol::Flexible,
            (true, true) => Symbol::HamOrder,
            (true, false) => Symbol::CheeseOrder,
        };
        visited[e] = true;
        word.push(s);
    }
    Exploration { word, triangles: seq, flipped, merged: cur, initial_loops }
}

/// Inverse of [`map_to_word`]. The map is built as a spanning tree (the
/// `h`/`H` letters, in contour order) plus the `c`/`C` edges, and then the
/// edges closed by an `F` are flipped.
pub fn word_to_map(w: &Word) -> Result<(PlanarMap, EdgeSubset), WordError> {
    if let Some(position) = w.first_unmatched() {
        return Err(WordError::Unbalanced { position });
    }
    let matches = match_positions(w);
    let k = w.len() / 2;
    let mut rotation: Vec<Vec<usize>> = vec![Vec::new()];
    let mut origin = vec![0usize; 2 * k];
    let mut edge_at = vec![0usize; w.len() + 1];
    let mut tree = EdgeSubset::empty(k);
    let mut flexible = Vec::new();
    let mut cur = 0;
    let mut next_edge = 0;
    let mut tree_stack: Vec<usize> = Vec::new();
    let mut cheese_stack: Vec<usize> = Vec::new();
    for (i0, &s) in w.symbols().iter().enumerate() {
        let i = i0 + 1;
        let s = match s {
            Symbol::Flexible => {
                let b = matches.get(i).expect("balanced");
                flexible.push(edge_at[b]);
                w.at(b).kind().expect("burger").order()
            }
            s => s,
        };
        match s {
            Symbol::Ham | Symbol::Cheese => {
                let g = 2 * next_edge;
                edge_at[i] = next_edge;
                next_edge += 1;
                rotation[cur].push(g);
                origin[g] = cur;
                if s == Symbol::Ham {
                    tree.set(g / 2, true);
                    rotation.push(vec![alpha(g)]);
                    cur = rotation.len() - 1;
                    origin[alpha(g)] = cur;
                    tree_stack.push(g);
                } else {
                    cheese_stack.push(g);
                }
            }
            Symbol::HamOrder => {
                let g = tree_stack.pop().expect("balanced");
                cur = origin[g];
            }
            Symbol::CheeseOrder => {
                let g = cheese_stack.pop().expect("balanced");
                rotation[cur].push(alpha(g));
                origin[alpha(g)] = cur;
            }
            Symbol::Flexible => unreachable!(),
        }
    }
    let mut sigma = vec![0; 2 * k];
    for rot in &rotation {
        for (j, &g) in rot.iter().enumerate() {
            sigma[g] = rot[(j + 1) % rot.len()];
        }
    }
    let m = PlanarMap::new(sigma, 0).expect("decoded map is planar");
    let mut open = tree;
    for e in flexible {
        open.toggle(e);
    }
    Ok((m, open))
}
