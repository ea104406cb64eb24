//! Deletion confusability graph over all length-`n` binary strings.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lcs::lcs_binary_word;
use crate::math::{caro_wei_bound, turan_bound};
use crate::sequence::Sequence;
use crate::source::stream_rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Largest codeword length accepted at all.
    pub max_graph_n: usize,
    /// Largest length for which the adjacency matrix is materialized;
    /// above it edges are answered by recomputing the LCS.
    pub dense_max_n: usize,
    /// Largest length accepted by the exact maximum independent set search.
    pub exact_max_n: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_graph_n: 20,
            dense_max_n: 16,
            exact_max_n: 10,
        }
    }
}

/// Vertex `v` is the string `Sequence::from_index(v, n)`; numeric order of
/// vertices is lexicographic order of strings.
#[derive(Debug, Clone)]
pub struct ConfusabilityGraph {
    n: usize,
    deletions: usize,
    /// Strings in packed layout (bit `i` = position `i`).
    packed: Vec<u64>,
    rows: Option<Vec<u64>>,
    words_per_row: usize,
    edge_count: Option<u64>,
}

fn reverse_low_bits(v: u64, n: usize) -> u64 {
    if n == 0 {
        0
    } else {
        v.reverse_bits() >> (64 - n)
    }
}

impl ConfusabilityGraph {
    pub fn build(n: usize, deletions: usize) -> Result<Self> {
        Self::build_with(n, deletions, &Limits::default())
    }

    pub fn build_with(n: usize, deletions: usize, limits: &Limits) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("codeword length must be at least 1"));
        }
        if n > limits.max_graph_n {
            return Err(Error::LimitExceeded {
                what: "codeword length n",
                requested: n,
                limit: limits.max_graph_n,
                reason: "the graph has 2^n vertices and 4^n vertex pairs",
            });
        }
        if deletions > n {
            return Err(Error::invalid(format!("deletions {deletions} exceed length {n}")));
        }
        let count = 1usize << n;
        let packed: Vec<u64> = (0..count as u64).map(|v| reverse_low_bits(v, n)).collect();
        let mut g = ConfusabilityGraph {
            n,
            deletions,
            packed,
            rows: None,
            words_per_row: count.div_ceil(64),
            edge_count: None,
        };
        if n <= limits.dense_max_n {
            let w = g.words_per_row;
            let mut rows = vec![0u64; count * w];
            rows.par_chunks_mut(w).enumerate().for_each(|(u, row)| {
                for v in 0..count {
                    if g.confusable(u, v) {
                        row[v / 64] |= 1u64 << (v % 64);
                    }
                }
            });
            let degree_sum: u64 = rows.iter().map(|x| x.count_ones() as u64).sum();
            g.edge_count = Some(degree_sum / 2);
            g.rows = Some(rows);
        }
        Ok(g)
    }

    /// Edge predicate computed from scratch.
    #[inline]
    fn confusable(&self, u: usize, v: usize) -> bool {
        u != v
            && lcs_binary_word(self.packed[u], self.n, self.packed[v], self.n)
                >= self.n - self.deletions
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn deletions(&self) -> usize {
        self.deletions
    }

    pub fn vertex_count(&self) -> usize {
        1 << self.n
    }

    pub fn is_dense(&self) -> bool {
        self.rows.is_some()
    }

    /// `None` for oracle-mode graphs, where counting would visit all 4^n pairs.
    pub fn edge_count(&self) -> Option<u64> {
        self.edge_count
    }

    pub fn vertex_string(&self, v: usize) -> Sequence {
        Sequence::from_index(v as u64, self.n)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        match &self.rows {
            Some(rows) => rows[u * self.words_per_row + v / 64] >> (v % 64) & 1 == 1,
            None => self.confusable(u, v),
        }
    }

    /// Adjacency row as a bitset, when materialized.
    pub fn row(&self, v: usize) -> Option<&[u64]> {
        self.rows
            .as_ref()
            .map(|r| &r[v * self.words_per_row..(v + 1) * self.words_per_row])
    }

    pub fn words_per_row(&self) -> usize {
        self.words_per_row
    }

    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        match self.row(v) {
            Some(row) => iter_bits(row).collect(),
            None => (0..self.vertex_count()).filter(|&u| self.confusable(v, u)).collect(),
        }
    }

    pub fn degree(&self, v: usize) -> usize {
        match self.row(v) {
            Some(row) => row.iter().map(|w| w.count_ones() as usize).sum(),
            None => (0..self.vertex_count()).filter(|&u| self.confusable(v, u)).count(),
        }
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.vertex_count())
            .into_par_iter()
            .map(|v| self.degree(v))
            .collect()
    }
}

pub(crate) fn iter_bits(words: &[u64]) -> impl Iterator<Item = usize> + '_ {
    words.iter().enumerate().flat_map(|(wi, &w)| {
        let mut rest = w;
        std::iter::from_fn(move || {
            if rest == 0 {
                return None;
            }
            let b = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            Some(wi * 64 + b)
        })
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphStats {
    pub n: usize,
    pub deletions: usize,
    pub vertices: usize,
    pub edges: u64,
    pub min_degree: usize,
    pub mean_degree: f64,
    pub max_degree: usize,
    pub density: f64,
    /// degree -> number of vertices with that degree
    pub degree_histogram: BTreeMap<usize, usize>,
    pub turan_bound: f64,
    pub caro_wei_bound: f64,
    pub zero_string_degree: usize,
}

/// Exact degree statistics. Oracle-mode graphs compute every degree from
/// scratch, which costs 4^n LCS evaluations.
pub fn graph_stats(g: &ConfusabilityGraph) -> Result<GraphStats> {
    let degrees = g.degrees();
    let j = degrees.len();
    let sum: u64 = degrees.iter().map(|&d| d as u64).sum();
    let edges = sum / 2;
    let mut histogram = BTreeMap::new();
    for &d in &degrees {
        *histogram.entry(d).or_insert(0) += 1;
    }
    let pairs = j as f64 * (j as f64 - 1.0) / 2.0;
    Ok(GraphStats {
        n: g.n(),
        deletions: g.deletions(),
        vertices: j,
        edges,
        min_degree: *degrees.iter().min().expect("at least two vertices"),
        mean_degree: sum as f64 / j as f64,
        max_degree: *degrees.iter().max().expect("at least two vertices"),
        density: if pairs > 0.0 { edges as f64 / pairs } else { 0.0 },
        degree_histogram: histogram,
        turan_bound: turan_bound(j, edges as usize)?,
        caro_wei_bound: caro_wei_bound(&degrees)?,
        zero_string_degree: degrees[0],
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledDegrees {
    pub n: usize,
    pub deletions: usize,
    pub samples: usize,
    pub seed: u64,
    pub mean_degree: f64,
    pub min_degree: usize,
    pub max_degree: usize,
    pub zero_string_degree: usize,
}

/// Degrees of `samples` distinct vertices chosen uniformly without
/// replacement; intended for oracle-mode graphs.
pub fn sample_degrees(g: &ConfusabilityGraph, samples: usize, seed: u64) -> Result<SampledDegrees> {
    if samples == 0 || samples > g.vertex_count() {
        return Err(Error::invalid(format!(
            "sample count must be in [1, {}], got {samples}",
            g.vertex_count()
        )));
    }
    let mut rng = stream_rng(seed, 0);
    let mut vertices: Vec<usize> = (0..g.vertex_count()).collect();
    vertices.shuffle(&mut rng);
    vertices.truncate(samples);
    let degrees: Vec<usize> = vertices.par_iter().map(|&v| g.degree(v)).collect();
    Ok(SampledDegrees {
        n: g.n(),
        deletions: g.deletions(),
        samples,
        seed,
        mean_degree: degrees.iter().sum::<usize>() as f64 / samples as f64,
        min_degree: *degrees.iter().min().expect("non-empty"),
        max_degree: *degrees.iter().max().expect("non-empty"),
        zero_string_degree: g.degree(0),
    })
}
