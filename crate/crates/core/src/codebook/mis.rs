//! Exact maximum independent set on bitset adjacency.
//!
//! The search looks for a maximum clique of the complement graph. Each node
//! colours its candidate set greedily (a colouring of the complement is a
//! clique cover of the original graph, so the colour count bounds the
//! independent set size), re-colours vertices that would otherwise need a
//! fresh class when a single conflicting vertex can be moved aside, and only
//! branches on vertices whose colour can still beat the incumbent. The
//! incumbent is seeded by an iterated (1,2)-swap local search, so the tree
//! mostly has to prove optimality rather than find it.

use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::source::stream_rng;

/// Caps on the exact search. Exceeding either returns
/// [`Error::SearchBudgetExhausted`] with the best set seen so far.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchBudget {
    pub max_nodes: Option<u64>,
    pub time_limit: Option<Duration>,
}

const LOCAL_SEARCH_ROUNDS: usize = 4000;
const LOCAL_SEARCH_SEED: u64 = 0x5eed;

struct Bits;

impl Bits {
    #[inline]
    fn get(words: &[u64], i: usize) -> bool {
        words[i / 64] >> (i % 64) & 1 == 1
    }
    #[inline]
    fn set(words: &mut [u64], i: usize) {
        words[i / 64] |= 1u64 << (i % 64);
    }
    #[inline]
    fn clear(words: &mut [u64], i: usize) {
        words[i / 64] &= !(1u64 << (i % 64));
    }
    #[inline]
    fn disjoint(a: &[u64], b: &[u64]) -> bool {
        a.iter().zip(b).all(|(x, y)| x & y == 0)
    }
    fn single_common(a: &[u64], b: &[u64]) -> Option<usize> {
        let mut found = None;
        for (wi, (x, y)) in a.iter().zip(b).enumerate() {
            let w = x & y;
            if w == 0 {
                continue;
            }
            if found.is_some() || w & (w - 1) != 0 {
                return None;
            }
            found = Some(wi * 64 + w.trailing_zeros() as usize);
        }
        found
    }
}

fn popcount_is_one(words: &[u64]) -> bool {
    let mut total = 0;
    for x in words {
        total += x.count_ones();
        if total > 1 {
            return false;
        }
    }
    total == 1
}

/// Maximum independent set of the graph whose adjacency rows are `rows`
/// (`rows[v]` has bit `u` set iff `u` and `v` are adjacent). Returns the
/// vertices in ascending order.
pub fn max_independent_set(rows: &[Vec<u64>], budget: &SearchBudget) -> Result<Vec<usize>> {
    max_independent_set_from(rows, &[], budget)
}

/// As [`max_independent_set`], starting from a known independent set
/// `initial`, which only serves as the first incumbent.
pub fn max_independent_set_from(rows: &[Vec<u64>], initial: &[usize], budget: &SearchBudget) -> Result<Vec<usize>> {
    let count = rows.len();
    if initial.iter().any(|&v| v >= count || initial.iter().any(|&u| Bits::get(&rows[v], u))) {
        return Err(Error::invalid("initial set is not an independent set of the graph"));
    }
    if count == 0 {
        return Ok(Vec::new());
    }
    let words = count.div_ceil(64);
    let degrees: Vec<usize> = rows
        .iter()
        .map(|r| r.iter().map(|w| w.count_ones() as usize).sum())
        .collect();

    let mut incumbent = local_search(rows, &degrees);
    if initial.len() > incumbent.len() {
        incumbent = initial.to_vec();
    }

    // Complement with vertices renumbered by ascending graph degree, so the
    // colouring visits the most constrained clique vertices first.
    let mut order: Vec<usize> = (0..count).collect();
    order.sort_by_key(|&v| (degrees[v], v));
    let mut position = vec![0usize; count];
    for (i, &v) in order.iter().enumerate() {
        position[v] = i;
    }
    let mut complement = vec![vec![0u64; words]; count];
    for (i, &v) in order.iter().enumerate() {
        for (j, &u) in order.iter().enumerate() {
            if u != v && !Bits::get(&rows[v], u) {
                Bits::set(&mut complement[i], j);
            }
        }
    }

    let mut search = CliqueSearch {
        adj: complement,
        words,
        best: incumbent.iter().map(|&v| position[v]).collect(),
        nodes: 0,
        budget: *budget,
        started: Instant::now(),
        aborted: false,
    };
    let mut all = vec![!0u64; words];
    if !count.is_multiple_of(64) {
        all[words - 1] = (1u64 << (count % 64)) - 1;
    }
    search.expand(&mut Vec::new(), all);

    let mut result: Vec<usize> = search.best.iter().map(|&i| order[i]).collect();
    result.sort_unstable();
    if search.aborted {
        return Err(Error::SearchBudgetExhausted {
            nodes: search.nodes,
            best_found: result.len(),
        });
    }
    Ok(result)
}

struct CliqueSearch {
    adj: Vec<Vec<u64>>,
    words: usize,
    best: Vec<usize>,
    nodes: u64,
    budget: SearchBudget,
    started: Instant,
    aborted: bool,
}

impl CliqueSearch {
    fn out_of_budget(&mut self) -> bool {
        if self.aborted {
            return true;
        }
        self.nodes += 1;
        if let Some(max) = self.budget.max_nodes {
            if self.nodes > max {
                self.aborted = true;
            }
        }
        if self.nodes.is_multiple_of(1024) {
            if let Some(limit) = self.budget.time_limit {
                if self.started.elapsed() > limit {
                    self.aborted = true;
                }
            }
        }
        self.aborted
    }

    fn expand(&mut self, current: &mut Vec<usize>, mut cand: Vec<u64>) {
        if self.out_of_budget() {
            return;
        }
        let (classes, vertices, colors) = self.color(&cand, current.len());
        for idx in (0..vertices.len()).rev() {
            if current.len() + colors[idx] <= self.best.len() || self.aborted {
                return;
            }
            let v = vertices[idx];
            let k = colors[idx];
            // Each disjoint inconsistent subset of the lower classes lowers
            // the bound for cliques through `v` by one.
            let needed = current.len() + k - self.best.len();
            if self.conflicts(&classes[..k - 1], v, needed) >= needed {
                Bits::clear(&mut cand, v);
                continue;
            }
            current.push(v);
            let next: Vec<u64> = cand.iter().zip(&self.adj[v]).map(|(c, a)| c & a).collect();
            if next.iter().all(|&w| w == 0) {
                if current.len() > self.best.len() {
                    self.best = current.clone();
                }
            } else {
                self.expand(current, next);
            }
            current.pop();
            Bits::clear(&mut cand, v);
        }
    }

    /// Counts up to `needed` disjoint sets of colour classes that cannot all
    /// contribute a neighbour of `v` to one clique, found by unit
    /// propagation: a class with a single neighbour of `v` forces that
    /// vertex, which restricts every other class to its neighbours; a class
    /// emptied this way closes an inconsistent set made of the forcing
    /// classes and itself.
    fn conflicts(&self, classes: &[Vec<u64>], v: usize, needed: usize) -> usize {
        let (m, w) = (classes.len(), self.words);
        let adj_v = &self.adj[v];
        let mut restricted = vec![0u64; m * w];
        for (i, c) in classes.iter().enumerate() {
            for (k, (a, b)) in c.iter().zip(adj_v).enumerate() {
                restricted[i * w + k] = a & b;
            }
        }
        let mut retired = vec![false; m];
        let mut work = restricted.clone();
        let mut state = vec![0u8; m];
        let mut found = 0;
        while found < needed {
            work.copy_from_slice(&restricted);
            // 0: open, 1: forcing a vertex, 2: retired
            state.iter_mut().zip(&retired).for_each(|(s, r)| *s = if *r { 2 } else { 0 });
            let mut conflict = None;
            'propagate: loop {
                let unit = (0..m).find(|&i| state[i] == 0 && popcount_is_one(&work[i * w..(i + 1) * w]));
                let Some(i) = unit else { break };
                state[i] = 1;
                let u = super::graph::iter_bits(&work[i * w..(i + 1) * w]).next().expect("unit class");
                let adj_u = &self.adj[u];
                for j in 0..m {
                    if state[j] != 0 {
                        continue;
                    }
                    let mut any = 0;
                    for (x, a) in work[j * w..(j + 1) * w].iter_mut().zip(adj_u) {
                        *x &= a;
                        any |= *x;
                    }
                    if any == 0 {
                        conflict = Some(j);
                        break 'propagate;
                    }
                }
            }
            let Some(j) = conflict else { break };
            found += 1;
            for i in 0..m {
                if i == j || state[i] == 1 {
                    retired[i] = true;
                    restricted[i * w..(i + 1) * w].fill(0);
                }
            }
        }
        found
    }

    /// First-fit colouring in vertex order with single-swap re-colouring.
    /// Returns only the vertices whose colour reaches the pruning threshold,
    /// ordered by colour.
    fn color(&self, cand: &[u64], depth: usize) -> (Vec<Vec<u64>>, Vec<usize>, Vec<usize>) {
        // A vertex must carry colour >= need to extend `current` past the incumbent.
        let need = (self.best.len() + 1).saturating_sub(depth).max(1);
        let mut classes: Vec<Vec<u64>> = Vec::new();
        for v in super::graph::iter_bits(cand) {
            let adj = &self.adj[v];
            let k = classes
                .iter()
                .position(|c| Bits::disjoint(c, adj))
                .unwrap_or(classes.len());
            if k + 1 >= need && need >= 2 && self.recolor(&mut classes, v, need - 1) {
                continue;
            }
            if k == classes.len() {
                classes.push(vec![0u64; self.words]);
            }
            Bits::set(&mut classes[k], v);
        }
        let mut vertices = Vec::new();
        let mut colors = Vec::new();
        for (k, class) in classes.iter().enumerate().skip(need - 1) {
            for v in super::graph::iter_bits(class) {
                vertices.push(v);
                colors.push(k + 1);
            }
        }
        (classes, vertices, colors)
    }

    /// Tries to place `v` into one of the first `low` classes by moving its
    /// single conflicting vertex to another of those classes.
    fn recolor(&self, classes: &mut [Vec<u64>], v: usize, low: usize) -> bool {
        let low = low.min(classes.len());
        for k1 in 0..low {
            let Some(w) = Bits::single_common(&classes[k1], &self.adj[v]) else {
                continue;
            };
            for k2 in k1 + 1..low {
                if Bits::disjoint(&classes[k2], &self.adj[w]) {
                    Bits::clear(&mut classes[k1], w);
                    Bits::set(&mut classes[k1], v);
                    Bits::set(&mut classes[k2], w);
                    return true;
                }
            }
        }
        false
    }
}

/// Iterated local search with (1,2)-swaps: repeatedly replace one solution
/// vertex by two non-adjacent vertices whose only solution neighbour it is,
/// perturbing by forced insertions when stuck. Deterministic for a given graph.
fn local_search(rows: &[Vec<u64>], degrees: &[usize]) -> Vec<usize> {
    let count = rows.len();
    let mut state = SwapState::new(count);
    let mut order: Vec<usize> = (0..count).collect();
    order.sort_by_key(|&v| (degrees[v], v));
    for &v in &order {
        if state.tight[v] == 0 && !state.in_set[v] {
            state.insert(rows, v);
        }
    }
    state.improve(rows);
    let mut best = state.members();

    let mut rng = stream_rng(LOCAL_SEARCH_SEED, count as u64);
    for _ in 0..LOCAL_SEARCH_ROUNDS {
        let snapshot = (state.in_set.clone(), state.tight.clone());
        let outside: Vec<usize> = (0..count).filter(|&v| !state.in_set[v]).collect();
        let Some(&v) = outside.choose(&mut rng) else {
            break;
        };
        state.force(rows, v);
        if rng.gen_bool(0.5) {
            if let Some(&u) = outside.choose(&mut rng) {
                if !state.in_set[u] {
                    state.force(rows, u);
                }
            }
        }
        state.fill(rows, &mut rng);
        state.improve(rows);
        let size = state.size();
        if size > best.len() {
            best = state.members();
        } else if size < best.len() && rng.gen_bool(0.9) {
            state.in_set = snapshot.0;
            state.tight = snapshot.1;
        }
    }
    best
}

struct SwapState {
    in_set: Vec<bool>,
    /// Number of solution neighbours of each vertex.
    tight: Vec<u32>,
}

impl SwapState {
    fn new(count: usize) -> Self {
        SwapState {
            in_set: vec![false; count],
            tight: vec![0; count],
        }
    }

    fn size(&self) -> usize {
        self.in_set.iter().filter(|&&b| b).count()
    }

    fn members(&self) -> Vec<usize> {
        (0..self.in_set.len()).filter(|&v| self.in_set[v]).collect()
    }

    fn insert(&mut self, rows: &[Vec<u64>], v: usize) {
        self.in_set[v] = true;
        for u in super::graph::iter_bits(&rows[v]) {
            self.tight[u] += 1;
        }
    }

    fn remove(&mut self, rows: &[Vec<u64>], v: usize) {
        self.in_set[v] = false;
        for u in super::graph::iter_bits(&rows[v]) {
            self.tight[u] -= 1;
        }
    }

    fn force(&mut self, rows: &[Vec<u64>], v: usize) {
        for u in super::graph::iter_bits(&rows[v]) {
            if self.in_set[u] {
                self.remove(rows, u);
            }
        }
        self.insert(rows, v);
    }

    fn fill(&mut self, rows: &[Vec<u64>], rng: &mut impl Rng) {
        let mut free: Vec<usize> = (0..self.in_set.len())
            .filter(|&v| !self.in_set[v] && self.tight[v] == 0)
            .collect();
        free.shuffle(rng);
        for v in free {
            if self.tight[v] == 0 && !self.in_set[v] {
                self.insert(rows, v);
            }
        }
    }

    fn improve(&mut self, rows: &[Vec<u64>]) {
        loop {
            let mut improved = false;
            for x in 0..self.in_set.len() {
                if !self.in_set[x] {
                    continue;
                }
                let candidates: Vec<usize> = super::graph::iter_bits(&rows[x])
                    .filter(|&u| self.tight[u] == 1)
                    .collect();
                let pair = candidates.iter().enumerate().find_map(|(i, &a)| {
                    candidates[i + 1..]
                        .iter()
                        .find(|&&b| !Bits::get(&rows[a], b))
                        .map(|&b| (a, b))
                });
                if let Some((a, b)) = pair {
                    self.remove(rows, x);
                    self.insert(rows, a);
                    self.insert(rows, b);
                    for u in 0..self.in_set.len() {
                        if !self.in_set[u] && self.tight[u] == 0 {
                            self.insert(rows, u);
                        }
                    }
                    improved = true;
                }
            }
            if !improved {
                break;
            }
        }
    }
}
