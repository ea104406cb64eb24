//! Zero-error codebooks against an adversary that deletes up to `D` bits.
//!
//! Two length-`n` strings can share a codebook iff their LCS is at most
//! `n - D - 1`; otherwise deleting down to a common subsequence confuses
//! them. Codebooks are therefore independent sets of the
//! [`ConfusabilityGraph`].

mod construct;
mod graph;
mod mis;

pub use construct::{
    exact_max_codebook, exact_max_independent_set, expected_survivors, greedy_codebook,
    retention_log2, sample_codebook_thm3, varshamov_tenengolts, GreedyOrdering, SampleOutcome, SurvivorExpectation,
};
pub use mis::{max_independent_set, max_independent_set_from, SearchBudget};
pub use graph::{
    graph_stats, sample_degrees, ConfusabilityGraph, GraphStats, Limits, SampledDegrees,
};

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lcs::{is_subsequence, lcs_length_fast, lcs_witness};
use crate::sequence::Sequence;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Codebook {
    n: usize,
    deletions: usize,
    codewords: Vec<Sequence>,
}

impl Codebook {
    /// Sorts the codewords; rejects duplicates, non-binary strings and
    /// wrong lengths.
    pub fn new(n: usize, deletions: usize, mut codewords: Vec<Sequence>) -> Result<Self> {
        if deletions > n {
            return Err(Error::invalid(format!("deletions {deletions} exceed length {n}")));
        }
        for c in &codewords {
            if !c.is_binary() {
                return Err(Error::NotBinary(c.alphabet()));
            }
            if c.len() != n {
                return Err(Error::invalid(format!("codeword {c} has length {}, expected {n}", c.len())));
            }
        }
        codewords.sort();
        if let Some(w) = codewords.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::invalid(format!("duplicate codeword {}", w[0])));
        }
        Ok(Codebook {
            n,
            deletions,
            codewords,
        })
    }

    pub fn from_indices(n: usize, deletions: usize, indices: impl IntoIterator<Item = usize>) -> Result<Self> {
        let words = indices
            .into_iter()
            .map(|v| Sequence::from_index(v as u64, n))
            .collect();
        Self::new(n, deletions, words)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn deletions(&self) -> usize {
        self.deletions
    }

    pub fn codewords(&self) -> &[Sequence] {
        &self.codewords
    }

    pub fn len(&self) -> usize {
        self.codewords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codewords.is_empty()
    }

    /// `log2(size) / n`; zero for an empty codebook.
    pub fn rate(&self) -> f64 {
        if self.codewords.is_empty() {
            0.0
        } else {
            (self.codewords.len() as f64).log2() / self.n as f64
        }
    }

    /// Line-oriented text form: `n=<n> D=<D> count=<k>` then one codeword per
    /// line, sorted.
    pub fn to_file_string(&self) -> String {
        let mut out = format!("n={} D={} count={}\n", self.n, self.deletions, self.len());
        for c in &self.codewords {
            writeln!(out, "{c}").expect("string write");
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            message: "empty codebook file".into(),
        })?;
        let (n, deletions, count) = parse_header(header)?;
        let mut words = Vec::with_capacity(count);
        let mut previous: Option<Sequence> = None;
        for (i, line) in lines {
            let line_no = i + 1;
            let line = line.trim_end();
            if line.is_empty() {
                continue;
            }
            if line.len() != n {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("codeword has length {}, expected {n}", line.len()),
                });
            }
            let word = Sequence::binary(line).map_err(|e| Error::Parse {
                line: line_no,
                message: e.to_string(),
            })?;
            if let Some(prev) = &previous {
                if *prev == word {
                    return Err(Error::Parse {
                        line: line_no,
                        message: format!("duplicate codeword {word}"),
                    });
                }
                if *prev > word {
                    return Err(Error::Parse {
                        line: line_no,
                        message: "codewords are not lexicographically sorted".into(),
                    });
                }
            }
            previous = Some(word.clone());
            words.push(word);
        }
        if words.len() != count {
            return Err(Error::Parse {
                line: 1,
                message: format!("header declares {count} codewords, found {}", words.len()),
            });
        }
        Self::new(n, deletions, words)
    }
}

fn parse_header(header: &str) -> Result<(usize, usize, usize)> {
    let bad = |message: String| Error::Parse { line: 1, message };
    let mut fields = [None; 3];
    for token in header.split_whitespace() {
        let (key, value) = token
            .split_once('=')
            .ok_or_else(|| bad(format!("malformed header token {token:?}")))?;
        let slot = match key {
            "n" => 0,
            "D" => 1,
            "count" => 2,
            _ => return Err(bad(format!("unknown header key {key:?}"))),
        };
        let v: usize = value
            .parse()
            .map_err(|_| bad(format!("header value {value:?} is not a count")))?;
        fields[slot] = Some(v);
    }
    match fields {
        [Some(n), Some(d), Some(c)] => Ok((n, d, c)),
        _ => Err(bad("header must be `n=<n> D=<D> count=<k>`".into())),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub first: String,
    pub second: String,
    pub lcs: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidityReport {
    pub valid: bool,
    pub n: usize,
    pub deletions: usize,
    pub count: usize,
    /// First confusable pair in lexicographic pair order.
    pub violation: Option<Violation>,
}

/// PASS iff every pair of distinct codewords has LCS at most `n - D - 1`.
pub fn verify_codebook(cb: &Codebook) -> ValidityReport {
    let violation = first_confusable_pair(cb).map(|(i, j, lcs)| Violation {
        first: cb.codewords[i].to_string(),
        second: cb.codewords[j].to_string(),
        lcs,
    });
    ValidityReport {
        valid: violation.is_none(),
        n: cb.n,
        deletions: cb.deletions,
        count: cb.len(),
        violation,
    }
}

fn first_confusable_pair(cb: &Codebook) -> Option<(usize, usize, usize)> {
    let limit = cb.n - cb.deletions;
    let words = &cb.codewords;
    (0..words.len()).into_par_iter().find_map_first(|i| {
        (i + 1..words.len()).find_map(|j| {
            let l = lcs_length_fast(&words[i], &words[j]).expect("codewords are binary");
            (l >= limit).then_some((i, j, l))
        })
    })
}

/// The unique codeword that has `received` as a subsequence.
pub fn decode<'a>(cb: &'a Codebook, received: &Sequence) -> Result<&'a Sequence> {
    let (min, max) = (cb.n - cb.deletions, cb.n);
    if received.len() < min || received.len() > max {
        return Err(Error::ReceivedLength {
            len: received.len(),
            min,
            max,
        });
    }
    let mut found = None;
    let mut count = 0;
    for c in &cb.codewords {
        if is_subsequence(received, c)? {
            count += 1;
            found.get_or_insert(c);
        }
    }
    match count {
        0 => Err(Error::NoCandidate),
        1 => Ok(found.expect("one candidate")),
        k => Err(Error::Ambiguous(k)),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Attack {
    pub first: String,
    pub second: String,
    /// Common subsequence the adversary delivers, of length at least `n - D`.
    pub received: String,
    pub deletions_first: usize,
    pub deletions_second: usize,
}

/// Finds two codewords the adversary can map to the same received string.
pub fn adversary_attack(cb: &Codebook) -> Option<Attack> {
    let (i, j, _) = first_confusable_pair(cb)?;
    let (x, y) = (&cb.codewords[i], &cb.codewords[j]);
    let w = lcs_witness(x, y).expect("codewords are binary");
    Some(Attack {
        first: x.to_string(),
        second: y.to_string(),
        received: w.to_string(),
        deletions_first: cb.n - w.len(),
        deletions_second: cb.n - w.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(s: &str) -> Sequence {
        Sequence::binary(s).unwrap()
    }

    fn cb(n: usize, d: usize, words: &[&str]) -> Codebook {
        Codebook::new(n, d, words.iter().map(|w| b(w)).collect()).unwrap()
    }

    #[test]
    fn verify_examples() {
        assert!(verify_codebook(&cb(2, 1, &["00", "11"])).valid);
        for n in 1..=12 {
            let zeros = "0".repeat(n);
            let ones = "1".repeat(n);
            assert!(verify_codebook(&cb(n, n / 2, &[&zeros, &ones])).valid);
        }
        let report = verify_codebook(&cb(4, 1, &["0101", "1010"]));
        assert!(!report.valid);
        assert_eq!(
            report.violation,
            Some(Violation {
                first: "0101".into(),
                second: "1010".into(),
                lcs: 3
            })
        );
    }

    #[test]
    fn decode_examples() {
        let book = cb(2, 1, &["00", "11"]);
        assert_eq!(decode(&book, &b("0")).unwrap(), &b("00"));
        assert_eq!(decode(&book, &b("11")).unwrap(), &b("11"));
        assert_eq!(decode(&book, &b("01")), Err(Error::NoCandidate));
        assert!(matches!(decode(&book, &Sequence::new(2).unwrap()), Err(Error::ReceivedLength { .. })));
        let bad = cb(4, 1, &["0101", "1010"]);
        assert_eq!(decode(&bad, &b("010")), Err(Error::Ambiguous(2)));
    }

    #[test]
    fn attack_on_invalid_pair() {
        let a = adversary_attack(&cb(4, 1, &["0101", "1010"])).unwrap();
        assert!(a.received == "101" || a.received == "010");
        assert_eq!((a.deletions_first, a.deletions_second), (1, 1));
        assert_eq!(adversary_attack(&cb(2, 1, &["00", "11"])), None);
    }

    #[test]
    fn file_round_trip() {
        let book = cb(4, 2, &["1111", "0000"]);
        let text = book.to_file_string();
        assert_eq!(text, "n=4 D=2 count=2\n0000\n1111\n");
        assert_eq!(Codebook::parse(&text).unwrap(), book);
    }

    #[test]
    fn parser_rejections() {
        let cases = [
            "",
            "n=4 D=2\n0000\n",
            "n=4 D=2 count=2\n0000\n111\n",
            "n=4 D=2 count=2\n0000\n0000\n",
            "n=4 D=2 count=2\n1111\n0000\n",
            "n=4 D=2 count=3\n0000\n1111\n",
            "n=4 D=2 count=1\n0020\n",
            "n=4 D=x count=1\n0000\n",
            "n=4 D=5 count=1\n0000\n",
        ];
        for text in cases {
            assert!(Codebook::parse(text).is_err(), "{text:?} accepted");
        }
    }

    #[test]
    fn constructor_rejections() {
        assert!(Codebook::new(2, 1, vec![b("00"), b("00")]).is_err());
        assert!(Codebook::new(2, 1, vec![b("000")]).is_err());
        assert!(Codebook::new(2, 1, vec![Sequence::parse("01", 3).unwrap()]).is_err());
        assert!(Codebook::new(2, 3, vec![]).is_err());
        assert_eq!(cb(8, 0, &[]).rate(), 0.0);
    }
}
