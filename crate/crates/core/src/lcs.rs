//! Longest common subsequence: a quadratic reference DP that serves as the
//! oracle, a word-parallel length kernel, subsequence tests and linear-memory
//! witness extraction.
//!
//! The fast tier is the bit-vector recurrence of Allison–Dix / Hyyrö. With
//! `M_a` the match mask of symbol `a` over the first string and `V` initially
//! all ones, each symbol `a` of the second string updates
//!
//! ```text
//!     U = V & M_a
//!     V = (V + U) | (V & !M_a)
//! ```
//!
//! and the LCS length is the number of zero bits of `V` among the first `m`.
//! More generally the number of zeros in bits `[0, i)` is the LCS of the
//! length-`i` prefix of the first string with the consumed part of the
//! second, which is what the Hirschberg split needs.

use crate::error::Result;
use crate::sequence::Sequence;

/// Quadratic two-row dynamic program. Correctness oracle for everything else.
pub fn lcs_length_reference(x: &Sequence, y: &Sequence) -> Result<usize> {
    x.check_same_alphabet(y)?;
    let xs = x.to_symbols();
    let ys = y.to_symbols();
    let mut prev = vec![0usize; ys.len() + 1];
    let mut cur = vec![0usize; ys.len() + 1];
    for &a in &xs {
        for (j, &b) in ys.iter().enumerate() {
            cur[j + 1] = if a == b {
                prev[j] + 1
            } else {
                prev[j + 1].max(cur[j])
            };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    Ok(prev[ys.len()])
}

/// Word-parallel LCS length; identical results to [`lcs_length_reference`].
pub fn lcs_length_fast(x: &Sequence, y: &Sequence) -> Result<usize> {
    x.check_same_alphabet(y)?;
    if x.is_empty() || y.is_empty() {
        return Ok(0);
    }
    if let (Some(xw), Some(yw)) = (x.binary_words(), y.binary_words()) {
        if x.len() <= 64 && y.len() <= 64 {
            return Ok(lcs_binary_word(xw[0], x.len(), yw[0], y.len()));
        }
        let masks = Masks::from_binary_words(xw, x.len());
        return Ok(masks.lcs_binary(yw, y.len()));
    }
    let masks = Masks::from_symbols(&x.to_symbols(), x.alphabet());
    Ok(masks.lcs(y.iter()))
}

/// Single-word kernel for binary strings of at most 64 symbols in packed
/// layout (bit `i` holds position `i`).
#[inline]
pub(crate) fn lcs_binary_word(x: u64, x_len: usize, y: u64, y_len: usize) -> usize {
    debug_assert!(x_len <= 64 && y_len <= 64);
    if x_len == 0 || y_len == 0 {
        return 0;
    }
    let live = if x_len == 64 { !0 } else { (1u64 << x_len) - 1 };
    let m1 = x & live;
    let m0 = !x & live;
    let mut v = !0u64;
    for j in 0..y_len {
        let m = if (y >> j) & 1 == 1 { m1 } else { m0 };
        let u = v & m;
        v = v.wrapping_add(u) | (v & !m);
    }
    (!v & live).count_ones() as usize
}

/// Per-symbol match masks over one string.
struct Masks {
    len: usize,
    masks: Vec<Vec<u64>>,
}

impl Masks {
    fn from_symbols(symbols: &[u8], alphabet: u32) -> Self {
        let words = symbols.len().div_ceil(64);
        let mut masks = vec![vec![0u64; words]; alphabet as usize];
        for (i, &s) in symbols.iter().enumerate() {
            masks[s as usize][i / 64] |= 1u64 << (i % 64);
        }
        Masks {
            len: symbols.len(),
            masks,
        }
    }

    fn from_binary_words(words: &[u64], len: usize) -> Self {
        let ones = words.to_vec();
        let mut zeros: Vec<u64> = words.iter().map(|w| !w).collect();
        if !len.is_multiple_of(64) {
            *zeros.last_mut().expect("non-empty") &= (1u64 << (len % 64)) - 1;
        }
        Masks {
            len,
            masks: vec![zeros, ones],
        }
    }

    fn fresh_state(&self) -> Vec<u64> {
        vec![!0u64; self.len.div_ceil(64)]
    }

    #[inline(always)]
    fn step(v: &mut [u64], m: &[u64]) {
        let mut carry = false;
        for (vw, &mw) in v.iter_mut().zip(m) {
            let u = *vw & mw;
            let (s1, c1) = vw.overflowing_add(u);
            let (s2, c2) = s1.overflowing_add(carry as u64);
            carry = c1 | c2;
            *vw = s2 | (*vw & !mw);
        }
    }

    fn run(&self, y: impl Iterator<Item = u8>) -> Vec<u64> {
        let mut v = self.fresh_state();
        for sym in y {
            Self::step(&mut v, &self.masks[sym as usize]);
        }
        v
    }

    fn run_binary(&self, y: &[u64], y_len: usize) -> Vec<u64> {
        let mut v = self.fresh_state();
        let (m0, m1) = (&self.masks[0], &self.masks[1]);
        for (wi, &word) in y.iter().enumerate() {
            let bits = (y_len - wi * 64).min(64);
            for b in 0..bits {
                let m = if (word >> b) & 1 == 1 { m1 } else { m0 };
                Self::step(&mut v, m);
            }
        }
        v
    }

    fn zeros_in_prefix(&self, v: &[u64]) -> usize {
        let full = self.len / 64;
        let mut zeros: usize = v[..full].iter().map(|w| w.count_zeros() as usize).sum();
        let rem = self.len % 64;
        if rem != 0 {
            zeros += (!v[full] & ((1u64 << rem) - 1)).count_ones() as usize;
        }
        zeros
    }

    fn lcs(&self, y: impl Iterator<Item = u8>) -> usize {
        self.zeros_in_prefix(&self.run(y))
    }

    fn lcs_binary(&self, y: &[u64], y_len: usize) -> usize {
        self.zeros_in_prefix(&self.run_binary(y, y_len))
    }

    /// `row[i]` = LCS of the first `i` symbols with the consumed string.
    fn prefix_row(&self, v: &[u64]) -> Vec<usize> {
        let mut row = Vec::with_capacity(self.len + 1);
        row.push(0);
        let mut acc = 0;
        for i in 0..self.len {
            acc += ((v[i / 64] >> (i % 64)) & 1 == 0) as usize;
            row.push(acc);
        }
        row
    }
}

/// True iff `w` is a subsequence of `v`. Single greedy left-to-right scan.
pub fn is_subsequence(w: &Sequence, v: &Sequence) -> Result<bool> {
    w.check_same_alphabet(v)?;
    if w.len() > v.len() {
        return Ok(false);
    }
    let mut want = w.iter().peekable();
    for s in v.iter() {
        match want.peek() {
            None => break,
            Some(&t) if t == s => {
                want.next();
            }
            Some(_) => {}
        }
    }
    Ok(want.peek().is_none())
}

/// Below this many DP cells the witness is read off a full traceback table.
const TABLE_CELLS: usize = 1 << 14;

/// One maximum-length common subsequence in memory linear in the inputs.
///
/// Hirschberg's divide and conquer over the second string, with both half
/// rows computed by the word-parallel kernel. Ties prefer the latest split
/// point and, in the small-table base case, the latest matching index pair.
pub fn lcs_witness(x: &Sequence, y: &Sequence) -> Result<Sequence> {
    x.check_same_alphabet(y)?;
    let xs = x.to_symbols();
    let ys = y.to_symbols();
    let mut out = Vec::with_capacity(xs.len().min(ys.len()));
    hirschberg(&xs, &ys, x.alphabet(), &mut out);
    Sequence::from_symbols(&out, x.alphabet())
}

fn hirschberg(x: &[u8], y: &[u8], alphabet: u32, out: &mut Vec<u8>) {
    if x.is_empty() || y.is_empty() {
        return;
    }
    if y.len() == 1 {
        if x.contains(&y[0]) {
            out.push(y[0]);
        }
        return;
    }
    if x.len() * y.len() <= TABLE_CELLS {
        table_traceback(x, y, out);
        return;
    }
    let mid = y.len() / 2;
    let forward = {
        let masks = Masks::from_symbols(x, alphabet);
        masks.prefix_row(&masks.run(y[..mid].iter().copied()))
    };
    let backward = {
        let xr: Vec<u8> = x.iter().rev().copied().collect();
        let masks = Masks::from_symbols(&xr, alphabet);
        masks.prefix_row(&masks.run(y[mid..].iter().rev().copied()))
    };
    let m = x.len();
    let split = (0..=m)
        .rev()
        .max_by_key(|&i| (forward[i] + backward[m - i], i))
        .expect("non-empty range");
    hirschberg(&x[..split], &y[..mid], alphabet, out);
    hirschberg(&x[split..], &y[mid..], alphabet, out);
}

fn table_traceback(x: &[u8], y: &[u8], out: &mut Vec<u8>) {
    let cols = y.len() + 1;
    let mut t = vec![0u32; (x.len() + 1) * cols];
    for i in 1..=x.len() {
        for j in 1..=y.len() {
            t[i * cols + j] = if x[i - 1] == y[j - 1] {
                t[(i - 1) * cols + j - 1] + 1
            } else {
                t[(i - 1) * cols + j].max(t[i * cols + j - 1])
            };
        }
    }
    let start = out.len();
    let (mut i, mut j) = (x.len(), y.len());
    while i > 0 && j > 0 {
        if x[i - 1] == y[j - 1] {
            out.push(x[i - 1]);
            i -= 1;
            j -= 1;
        } else if t[(i - 1) * cols + j] >= t[i * cols + j - 1] {
            i -= 1;
        } else {
            j -= 1;
        }
    }
    out[start..].reverse();
}
