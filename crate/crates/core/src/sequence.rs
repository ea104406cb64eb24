//! Packed symbol strings.
//!
//! A [`Sequence`] stores symbols over an alphabet of size `K` at the smallest
//! power-of-two bit width that holds `K - 1`, so binary strings cost one bit
//! per symbol. Position `i` lives in word `i / per_word` at bit offset
//! `(i % per_word) * width`, least significant first. For binary sequences the
//! backing words are therefore exactly the match mask of symbol `1`, which the
//! bit-parallel LCS kernel uses without repacking.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

pub const MAX_ALPHABET: u32 = 36;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Sequence {
    alphabet: u32,
    len: usize,
    width: u32,
    words: Vec<u64>,
}

fn width_for(alphabet: u32) -> u32 {
    match alphabet {
        0..=2 => 1,
        3..=4 => 2,
        5..=16 => 4,
        _ => 8,
    }
}

impl Sequence {
    pub fn new(alphabet: u32) -> Result<Self> {
        if !(2..=MAX_ALPHABET).contains(&alphabet) {
            return Err(Error::invalid(format!(
                "alphabet size must be in [2, {MAX_ALPHABET}], got {alphabet}"
            )));
        }
        Ok(Sequence {
            alphabet,
            len: 0,
            width: width_for(alphabet),
            words: Vec::new(),
        })
    }

    pub fn with_capacity(alphabet: u32, capacity: usize) -> Result<Self> {
        let mut s = Self::new(alphabet)?;
        s.words.reserve(capacity.div_ceil(s.per_word()));
        Ok(s)
    }

    pub fn from_symbols(symbols: &[u8], alphabet: u32) -> Result<Self> {
        let mut s = Self::with_capacity(alphabet, symbols.len())?;
        for &sym in symbols {
            s.push(sym)?;
        }
        Ok(s)
    }

    /// Parses a string of digits (`0-9`, then `a-z` for larger alphabets).
    pub fn parse(text: &str, alphabet: u32) -> Result<Self> {
        let mut s = Self::with_capacity(alphabet, text.len())?;
        for (i, ch) in text.chars().enumerate() {
            let sym = ch
                .to_digit(36)
                .ok_or_else(|| Error::invalid(format!("invalid symbol {ch:?} at position {i}")))?;
            s.push(sym as u8)
                .map_err(|_| Error::SymbolOutOfRange { symbol: sym, alphabet })?;
        }
        Ok(s)
    }

    pub fn binary(text: &str) -> Result<Self> {
        Self::parse(text, 2)
    }

    /// Binary string of length `n` whose first symbol is the most significant
    /// of the `n` low bits of `value`, so numeric order is lexicographic order.
    pub fn from_index(value: u64, n: usize) -> Self {
        assert!(n <= 64, "index form holds at most 64 symbols");
        let mut word = 0u64;
        for i in 0..n {
            word |= ((value >> (n - 1 - i)) & 1) << i;
        }
        Sequence {
            alphabet: 2,
            len: n,
            width: 1,
            words: if n == 0 { Vec::new() } else { vec![word] },
        }
    }

    /// Inverse of [`Sequence::from_index`]; `None` unless binary with length at most 64.
    pub fn to_index(&self) -> Option<u64> {
        if self.alphabet != 2 || self.len > 64 {
            return None;
        }
        let mut value = 0u64;
        for i in 0..self.len {
            value = (value << 1) | self.get(i) as u64;
        }
        Some(value)
    }

    /// Assembles a binary sequence from packed words (bit `i` = position `i`).
    pub(crate) fn from_binary_words(mut words: Vec<u64>, len: usize) -> Self {
        words.truncate(len.div_ceil(64));
        words.resize(len.div_ceil(64), 0);
        if !len.is_multiple_of(64) {
            if let Some(last) = words.last_mut() {
                *last &= (1u64 << (len % 64)) - 1;
            }
        }
        Sequence {
            alphabet: 2,
            len,
            width: 1,
            words,
        }
    }

    #[inline]
    fn per_word(&self) -> usize {
        (64 / self.width) as usize
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn alphabet(&self) -> u32 {
        self.alphabet
    }

    pub fn is_binary(&self) -> bool {
        self.alphabet == 2
    }

    #[inline]
    pub fn get(&self, i: usize) -> u8 {
        assert!(i < self.len, "index {i} out of bounds for length {}", self.len);
        let per = self.per_word();
        let shift = (i % per) as u32 * self.width;
        let mask = (1u64 << self.width) - 1;
        ((self.words[i / per] >> shift) & mask) as u8
    }

    pub fn push(&mut self, symbol: u8) -> Result<()> {
        if symbol as u32 >= self.alphabet {
            return Err(Error::SymbolOutOfRange {
                symbol: symbol as u32,
                alphabet: self.alphabet,
            });
        }
        let per = self.per_word();
        let i = self.len;
        if i.is_multiple_of(per) {
            self.words.push(0);
        }
        let shift = (i % per) as u32 * self.width;
        *self.words.last_mut().expect("word pushed above") |= (symbol as u64) << shift;
        self.len += 1;
        Ok(())
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = u8> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub fn to_symbols(&self) -> Vec<u8> {
        self.iter().collect()
    }

    /// Packed words of a binary sequence; `None` for larger alphabets.
    pub fn binary_words(&self) -> Option<&[u64]> {
        (self.alphabet == 2).then_some(self.words.as_slice())
    }

    pub fn count_symbol(&self, symbol: u8) -> usize {
        match self.binary_words() {
            Some(words) => {
                let ones: usize = words.iter().map(|w| w.count_ones() as usize).sum();
                if symbol == 1 {
                    ones
                } else if symbol == 0 {
                    self.len - ones
                } else {
                    0
                }
            }
            None => self.iter().filter(|&s| s == symbol).count(),
        }
    }

    pub(crate) fn check_same_alphabet(&self, other: &Sequence) -> Result<()> {
        if self.alphabet != other.alphabet {
            return Err(Error::AlphabetMismatch {
                left: self.alphabet,
                right: other.alphabet,
            });
        }
        Ok(())
    }
}

impl Ord for Sequence {
    /// Lexicographic by symbol, shorter prefix first; alphabet breaks full ties.
    fn cmp(&self, other: &Self) -> Ordering {
        self.iter()
            .cmp(other.iter())
            .then(self.alphabet.cmp(&other.alphabet))
    }
}

impl PartialOrd for Sequence {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Sequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use fmt::Write;
        for s in self.iter() {
            f.write_char(char::from_digit(s as u32, 36).expect("symbol below 36"))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Sequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Sequence(K={}, \"{}\")", self.alphabet, self)
    }
}
