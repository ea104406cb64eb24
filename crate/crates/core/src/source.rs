//! Seeded random string sources.
//!
//! Every generator is a pure function of `(seed, stream)`: the seed keys a
//! ChaCha8 generator and the stream index selects one of its 2^64
//! independent streams, so parallel consumers can draw streams in any order
//! and get bit-identical strings.

use rand::distributions::{Bernoulli, Distribution};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sequence::Sequence;

pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn check_stay(q: f64) -> Result<()> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::invalid(format!("stay probability q must be in (0, 1), got {q}")));
    }
    Ok(())
}

/// Length-`n` string with i.i.d. uniform symbols.
pub fn gen_uniform(n: usize, alphabet: u32, seed: u64, stream: u64) -> Result<Sequence> {
    let mut rng = stream_rng(seed, stream);
    if alphabet == 2 {
        let words = (0..n.div_ceil(64)).map(|_| rng.next_u64()).collect();
        return Ok(Sequence::from_binary_words(words, n));
    }
    let mut s = Sequence::with_capacity(alphabet, n)?;
    for _ in 0..n {
        s.push(rng.gen_range(0..alphabet) as u8)?;
    }
    Ok(s)
}

/// Symmetric first-order Markov bit string: a fair first bit, then each bit
/// repeats its predecessor with probability `q`.
pub fn gen_markov(n: usize, q: f64, seed: u64, stream: u64) -> Result<Sequence> {
    check_stay(q)?;
    if n == 0 {
        return Err(Error::invalid("Markov strings need n >= 1"));
    }
    let mut rng = stream_rng(seed, stream);
    let flip = Bernoulli::new(1.0 - q).map_err(|e| Error::invalid(e.to_string()))?;
    let mut bit = rng.gen::<bool>() as u64;
    let mut words = vec![0u64; n.div_ceil(64)];
    words[0] = bit;
    for i in 1..n {
        bit ^= flip.sample(&mut rng) as u64;
        words[i / 64] |= bit << (i % 64);
    }
    Ok(Sequence::from_binary_words(words, n))
}

/// Number of adjacent positions whose bits differ.
pub fn transitions(s: &Sequence) -> Result<usize> {
    let words = s.binary_words().ok_or(Error::NotBinary(s.alphabet()))?;
    if s.is_empty() {
        return Err(Error::invalid("transitions needs a non-empty string"));
    }
    let mut count = 0usize;
    for (i, &w) in words.iter().enumerate() {
        // Pair (j, j+1) inside the word.
        count += ((w ^ (w >> 1)) & !(1u64 << 63)).count_ones() as usize;
        if let Some(&next) = words.get(i + 1) {
            count += ((w >> 63) ^ (next & 1)) as usize;
        }
    }
    // Padding past the last symbol is zero; drop the spurious pair at the edge.
    let rem = s.len() % 64;
    if rem != 0 {
        let last = words[words.len() - 1];
        count -= ((last >> (rem - 1)) & 1) as usize;
    }
    Ok(count)
}

/// log2 of the probability that the Markov source emits `s`:
/// `-1 + (n-1-Δ) log2 q + Δ log2 (1-q)`.
pub fn markov_log2_prob(s: &Sequence, q: f64) -> Result<f64> {
    check_stay(q)?;
    let delta = transitions(s)? as f64;
    let stays = (s.len() - 1) as f64 - delta;
    Ok(-1.0 + stays * q.log2() + delta * (1.0 - q).log2())
}

/// Linear-space source probability. Underflows to zero for long strings;
/// use [`markov_log2_prob`] beyond a few hundred symbols.
pub fn markov_prob(s: &Sequence, q: f64) -> Result<f64> {
    check_stay(q)?;
    if s.len() > 64 {
        return Ok(markov_log2_prob(s, q)?.exp2());
    }
    let delta = transitions(s)?;
    let stays = s.len() - 1 - delta;
    Ok(0.5 * q.powi(stays as i32) * (1.0 - q).powi(delta as i32))
}

/// Symmetric Markov bit source.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarkovSource {
    pub q: f64,
    pub seed: u64,
}

impl MarkovSource {
    pub fn new(q: f64, seed: u64) -> Result<Self> {
        check_stay(q)?;
        Ok(MarkovSource { q, seed })
    }

    pub fn sample(&self, n: usize, stream: u64) -> Result<Sequence> {
        gen_markov(n, self.q, self.seed, stream)
    }

    pub fn log2_prob(&self, s: &Sequence) -> Result<f64> {
        markov_log2_prob(s, self.q)
    }
}

/// String law used by the Monte Carlo estimator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    /// i.i.d. uniform bits.
    Uniform,
    /// Symmetric Markov chain with stay probability `q`.
    Markov(f64),
}

impl Source {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Source::Uniform => Ok(()),
            Source::Markov(q) => check_stay(q),
        }
    }

    pub fn generate(&self, n: usize, seed: u64, stream: u64) -> Result<Sequence> {
        match *self {
            Source::Uniform => gen_uniform(n, 2, seed, stream),
            Source::Markov(q) => gen_markov(n, q, seed, stream),
        }
    }

    /// Text label: `uniform` or the decimal stay probability.
    pub fn label(&self) -> String {
        match self {
            Source::Uniform => "uniform".to_string(),
            Source::Markov(q) => q.to_string(),
        }
    }

    pub fn from_label(label: &str) -> Result<Self> {
        let label = label.trim();
        if label.eq_ignore_ascii_case("uniform") {
            return Ok(Source::Uniform);
        }
        let q: f64 = label
            .parse()
            .map_err(|_| Error::invalid(format!("expected `uniform` or a probability, got {label:?}")))?;
        check_stay(q)?;
        Ok(Source::Markov(q))
    }
}
