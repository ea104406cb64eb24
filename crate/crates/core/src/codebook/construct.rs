//! Codebook constructions on the confusability graph: sequential greedy,
//! exact maximum independent set, and the Markov-weighted
//! sample-and-repair construction.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::graph::{ConfusabilityGraph, Limits};
use super::mis::{max_independent_set_from, SearchBudget};
use super::Codebook;
use crate::error::{Error, Result};
use crate::source::{markov_log2_prob, stream_rng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GreedyOrdering {
    Lexicographic,
    /// Vertices by ascending degree, ties lexicographic.
    MinDegreeFirst,
    SeededRandom(u64),
}

/// Scan vertices in the given order, keeping each one that is not adjacent
/// to anything kept so far.
pub fn greedy_codebook(g: &ConfusabilityGraph, ordering: GreedyOrdering) -> Result<Codebook> {
    let count = g.vertex_count();
    let mut order: Vec<usize> = (0..count).collect();
    match ordering {
        GreedyOrdering::Lexicographic => {}
        GreedyOrdering::MinDegreeFirst => {
            let degrees = g.degrees();
            order.sort_by_key(|&v| (degrees[v], v));
        }
        GreedyOrdering::SeededRandom(seed) => order.shuffle(&mut stream_rng(seed, 0)),
    }
    let mut blocked = vec![false; count];
    let mut chosen = Vec::new();
    for v in order {
        if blocked[v] {
            continue;
        }
        chosen.push(v);
        blocked[v] = true;
        for u in g.neighbors(v) {
            blocked[u] = true;
        }
    }
    Codebook::from_indices(g.n(), g.deletions(), chosen)
}

/// Largest Varshamov-Tenengolts class `{x : sum_i i*x_i = a mod (n+1)}`,
/// positions counted from 1, as ascending vertex indices. Every class
/// corrects one deletion.
pub fn varshamov_tenengolts(n: usize) -> Vec<usize> {
    let modulus = n + 1;
    let mut classes = vec![Vec::new(); modulus];
    for v in 0..1usize << n {
        let checksum: usize = (1..=n).filter(|&i| v >> (n - i) & 1 == 1).sum();
        classes[checksum % modulus].push(v);
    }
    classes
        .into_iter()
        .rev()
        .max_by_key(Vec::len)
        .expect("at least one class")
}

/// Maximum independent set of a dense graph, as vertex indices in ascending
/// order. Single-deletion searches start from the best Varshamov-Tenengolts
/// code.
pub fn exact_max_independent_set(g: &ConfusabilityGraph, budget: &SearchBudget) -> Result<Vec<usize>> {
    if !g.is_dense() {
        return Err(Error::invalid("exact search needs a materialized adjacency matrix"));
    }
    let rows: Vec<Vec<u64>> = (0..g.vertex_count())
        .map(|v| g.row(v).expect("dense").to_vec())
        .collect();
    let initial = if g.deletions() == 1 {
        varshamov_tenengolts(g.n())
    } else {
        Vec::new()
    };
    max_independent_set_from(&rows, &initial, budget)
}

/// Largest zero-error codebook for `(n, D)`.
pub fn exact_max_codebook(
    n: usize,
    deletions: usize,
    limits: &Limits,
    budget: &SearchBudget,
) -> Result<Codebook> {
    if n > limits.exact_max_n {
        return Err(Error::LimitExceeded {
            what: "codeword length n for exact search",
            requested: n,
            limit: limits.exact_max_n,
            reason: "maximum independent set search is exponential in 2^n",
        });
    }
    let g = ConfusabilityGraph::build_with(n, deletions, limits)?;
    Codebook::from_indices(n, deletions, exact_max_independent_set(&g, budget)?)
}

fn check_rate_constant(q: f64, c: f64) -> Result<()> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::invalid(format!("stay probability q must be in (0, 1), got {q}")));
    }
    let cap = (1.0 / q).log2();
    if !(c > 0.0 && c < cap) {
        return Err(Error::invalid(format!(
            "rate constant c must be in (0, log2(1/q)) = (0, {cap}), got {c}"
        )));
    }
    Ok(())
}

/// `log2` of the retention probability `2^{cn-1} p(s)` of every vertex.
pub fn retention_log2(g: &ConfusabilityGraph, q: f64, c: f64) -> Result<Vec<f64>> {
    check_rate_constant(q, c)?;
    let n = g.n() as f64;
    let out: Vec<f64> = (0..g.vertex_count())
        .map(|v| Ok(c * n - 1.0 + markov_log2_prob(&g.vertex_string(v), q)?))
        .collect::<Result<_>>()?;
    if let Some((v, &r)) = out
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .filter(|(_, &r)| r > 0.0)
    {
        return Err(Error::invalid(format!(
            "retention probability 2^{r:.4} > 1 for {}; choose a smaller c",
            g.vertex_string(v)
        )));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleOutcome {
    pub codebook: Codebook,
    /// Vertices kept by the retention step.
    pub survivors: usize,
    /// Edges among the survivors before repair.
    pub surviving_edges: usize,
}

/// Randomized independent set: keep each string `s` with probability
/// `2^{cn-1} p(s)` under the Markov law with stay probability `q`, then for
/// every edge left among survivors delete one endpoint. Edges are visited in
/// lexicographic pair order and the endpoint with the lower retention
/// probability goes; on a tie the lexicographically larger one goes.
pub fn sample_codebook_thm3(g: &ConfusabilityGraph, q: f64, c: f64, seed: u64) -> Result<SampleOutcome> {
    let retention = retention_log2(g, q, c)?;
    let mut rng = stream_rng(seed, 0);
    let mut alive: Vec<bool> = retention
        .iter()
        .map(|&r| rng.gen::<f64>() < r.exp2())
        .collect();
    let survivors: Vec<usize> = (0..alive.len()).filter(|&v| alive[v]).collect();

    let mut surviving_edges = 0;
    for (i, &u) in survivors.iter().enumerate() {
        for &v in &survivors[i + 1..] {
            if g.has_edge(u, v) {
                surviving_edges += 1;
            }
        }
    }
    for (i, &u) in survivors.iter().enumerate() {
        for &v in &survivors[i + 1..] {
            if !alive[u] {
                break;
            }
            if alive[v] && g.has_edge(u, v) {
                let drop = if retention[v] <= retention[u] { v } else { u };
                alive[drop] = false;
            }
        }
    }
    let codebook = Codebook::from_indices(g.n(), g.deletions(), (0..alive.len()).filter(|&v| alive[v]))?;
    Ok(SampleOutcome {
        codebook,
        survivors: survivors.len(),
        surviving_edges,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurvivorExpectation {
    /// `E[Q] = sum_s 2^{cn-1} p(s)`.
    pub expected_vertices: f64,
    /// `E[R] = sum over edges of the product of endpoint retentions`.
    pub expected_edges: f64,
}

impl SurvivorExpectation {
    pub fn lower_bound(&self) -> f64 {
        self.expected_vertices - self.expected_edges
    }
}

/// Expected survivors of the retention step, computed directly from the graph.
pub fn expected_survivors(g: &ConfusabilityGraph, q: f64, c: f64) -> Result<SurvivorExpectation> {
    let r: Vec<f64> = retention_log2(g, q, c)?.into_iter().map(f64::exp2).collect();
    let expected_vertices = r.iter().sum();
    let mut expected_edges = 0.0;
    for u in 0..g.vertex_count() {
        for v in g.neighbors(u) {
            if v > u {
                expected_edges += r[u] * r[v];
            }
        }
    }
    Ok(SurvivorExpectation {
        expected_vertices,
        expected_edges,
    })
}
