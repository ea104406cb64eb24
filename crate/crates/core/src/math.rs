//! Closed-form quantities: binary entropy, the two rate thresholds,
//! supersequence counts and independent-set lower bounds.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Lueker's lower bound on the binary LCS constant.
pub const GAMMA_LOWER: f64 = 0.788071;
/// Lueker's upper bound on the binary LCS constant.
pub const GAMMA_UPPER: f64 = 0.826820;
/// Rounded upper bound quoted alongside the headline 0.1731 threshold.
pub const GAMMA_UPPER_ROUNDED: f64 = 0.8269;
/// Experimental estimate attributed to Matzinger et al.
pub const GAMMA_ESTIMATE: f64 = 0.8182;
/// Alternate estimate used for the implied 0.1872 threshold.
pub const GAMMA_ESTIMATE_ALT: f64 = 0.8128;

/// Default per-coordinate martingale difference bound for uniform strings.
pub const AZUMA_UNIFORM_STEP: f64 = 2.0;

const BRACKET_LO: f64 = 1e-6;
const BRACKET_HI: f64 = 0.5 - 1e-6;

fn check_probability(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::ProbabilityOutOfRange(p));
    }
    Ok(())
}

/// `H(p) = -p log2 p - (1-p) log2 (1-p)`, with `0 log 0 = 0`.
pub fn binary_entropy(p: f64) -> Result<f64> {
    check_probability(p)?;
    let term = |x: f64| if x == 0.0 { 0.0 } else { -x * x.log2() };
    Ok(term(p) + term(1.0 - p))
}

/// Rate exponent of the greedy bipartite construction, `1 - 2H(p) + p`.
pub fn thm1_exponent(p: f64) -> Result<f64> {
    if !(0.0..0.5).contains(&p) {
        return Err(Error::invalid(format!("deletion fraction must be in [0, 1/2), got {p}")));
    }
    Ok(1.0 - 2.0 * binary_entropy(p)? + p)
}

/// Root of [`thm1_exponent`] on (0, 1/2) by bisection.
///
/// The exponent is decreasing up to `p = 1/(1+sqrt 2)` and negative from the
/// root onwards, so a single sign change exists in the bracket; that shape is
/// checked before bisecting.
pub fn thm1_threshold(tolerance: f64) -> Result<f64> {
    if tolerance.is_nan() || tolerance <= 0.0 {
        return Err(Error::invalid(format!("tolerance must be positive, got {tolerance}")));
    }
    let f = |p: f64| thm1_exponent(p).expect("bracket inside domain");
    check_single_crossing(f);

    let (mut lo, mut hi) = (BRACKET_LO, BRACKET_HI);
    while hi - lo > tolerance {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn check_single_crossing(f: impl Fn(f64) -> f64) {
    let turn = 1.0 / (1.0 + 2f64.sqrt());
    assert!(f(BRACKET_LO) > 0.0 && f(BRACKET_HI) < 0.0, "root not bracketed");
    let grid: Vec<f64> = (0..=1000)
        .map(|i| BRACKET_LO + (turn - BRACKET_LO) * i as f64 / 1000.0)
        .collect();
    assert!(
        grid.windows(2).all(|w| f(w[1]) < f(w[0])),
        "exponent not decreasing before its minimum"
    );
    assert!(f(turn) < 0.0, "exponent not negative past the root");
}

/// `1 - gamma`: the deletion fraction below which an LCS constant `gamma`
/// yields positive zero-error rate.
pub fn thm2_threshold(gamma: f64) -> Result<f64> {
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::invalid(format!("gamma must be in (0, 1], got {gamma}")));
    }
    Ok(1.0 - gamma)
}

fn binomial_row(n: usize) -> Vec<BigUint> {
    let mut row = Vec::with_capacity(n + 1);
    let mut c = BigUint::one();
    row.push(c.clone());
    for i in 0..n {
        c = c * BigUint::from(n - i) / BigUint::from(i + 1);
        row.push(c.clone());
    }
    row
}

/// Number of length-`super_len` strings over `alphabet` symbols that contain a
/// fixed length-`sub_len` string as a subsequence:
/// `sum_{i=0}^{super_len - sub_len} C(super_len, i) (K-1)^i`.
///
/// The count does not depend on which string is fixed.
pub fn count_supersequences(sub_len: usize, super_len: usize, alphabet: u32) -> Result<BigUint> {
    if sub_len > super_len {
        return Err(Error::invalid(format!(
            "subsequence length {sub_len} exceeds supersequence length {super_len}"
        )));
    }
    if alphabet < 2 {
        return Err(Error::invalid("alphabet must have at least 2 symbols"));
    }
    let row = binomial_row(super_len);
    let base = BigUint::from(alphabet - 1);
    let mut power = BigUint::one();
    let mut total = BigUint::zero();
    for c in row.iter().take(super_len - sub_len + 1) {
        total += c * &power;
        power *= &base;
    }
    Ok(total)
}

/// `log2` of [`count_supersequences`], evaluated with a log-sum-exp so it
/// stays finite for lengths far beyond exact integer feasibility.
pub fn log2_count_supersequences(sub_len: usize, super_len: usize, alphabet: u32) -> Result<f64> {
    if sub_len > super_len {
        return Err(Error::invalid(format!(
            "subsequence length {sub_len} exceeds supersequence length {super_len}"
        )));
    }
    if alphabet < 2 {
        return Err(Error::invalid("alphabet must have at least 2 symbols"));
    }
    if super_len <= 512 {
        let exact = count_supersequences(sub_len, super_len, alphabet)?;
        return Ok(big_log2(&exact));
    }
    let base = ((alphabet - 1) as f64).log2();
    let n = super_len as f64;
    let mut terms = Vec::with_capacity(super_len - sub_len + 1);
    let mut log_binom = 0.0f64;
    for i in 0..=super_len - sub_len {
        if i > 0 {
            log_binom += ((n - i as f64 + 1.0) / i as f64).log2();
        }
        terms.push(log_binom + i as f64 * base);
    }
    let peak = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = terms.iter().map(|t| (t - peak).exp2()).sum();
    Ok(peak + sum.log2())
}

fn big_log2(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().expect("fits in f64").log2();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().expect("64-bit value");
    top.log2() + shift as f64
}

/// Turán's bound `j^2 / (2k + 1)`, clamped to `j`.
pub fn turan_bound(num_vertices: usize, num_edges: usize) -> Result<f64> {
    let j = num_vertices as f64;
    let max_edges = num_vertices as u128 * num_vertices.saturating_sub(1) as u128 / 2;
    if num_edges as u128 > max_edges {
        return Err(Error::invalid(format!(
            "{num_edges} edges exceed C({num_vertices}, 2)"
        )));
    }
    Ok((j * j / (2.0 * num_edges as f64 + 1.0)).min(j))
}

/// Caro–Wei bound `sum_u 1 / (d(u) + 1)`.
pub fn caro_wei_bound(degrees: &[usize]) -> Result<f64> {
    let j = degrees.len();
    if let Some(&d) = degrees.iter().find(|&&d| d >= j) {
        return Err(Error::invalid(format!("degree {d} impossible with {j} vertices")));
    }
    Ok(degrees.iter().map(|&d| 1.0 / (d as f64 + 1.0)).sum())
}

/// Exponent `f(eps)` in `Pr[L >= E[L] + eps n] <= 2^{-f(eps) n}` from the
/// one-sided Azuma–Hoeffding inequality with per-coordinate difference bound
/// `step_bound`: `eps^2 / (2 c^2 ln 2)`.
pub fn azuma_tail_exponent(epsilon: f64, step_bound: f64) -> Result<f64> {
    if epsilon.is_nan() || step_bound.is_nan() || epsilon <= 0.0 || step_bound <= 0.0 {
        return Err(Error::invalid(format!(
            "epsilon and step bound must be positive, got {epsilon} and {step_bound}"
        )));
    }
    Ok(epsilon * epsilon / (2.0 * step_bound * step_bound * std::f64::consts::LN_2))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub thm1_threshold: f64,
    pub thm2_threshold_proven: f64,
    pub thm2_threshold_conjectured: f64,
    pub thm2_threshold_conjectured_alt: f64,
    pub gamma_upper: f64,
    pub gamma_lower: f64,
    pub gamma_estimate: f64,
    pub gamma_estimate_alt: f64,
}

impl ThresholdReport {
    pub fn compute(tolerance: f64) -> Result<Self> {
        Ok(ThresholdReport {
            thm1_threshold: thm1_threshold(tolerance)?,
            thm2_threshold_proven: thm2_threshold(GAMMA_UPPER)?,
            thm2_threshold_conjectured: thm2_threshold(GAMMA_ESTIMATE)?,
            thm2_threshold_conjectured_alt: thm2_threshold(GAMMA_ESTIMATE_ALT)?,
            gamma_upper: GAMMA_UPPER,
            gamma_lower: GAMMA_LOWER,
            gamma_estimate: GAMMA_ESTIMATE,
            gamma_estimate_alt: GAMMA_ESTIMATE_ALT,
        })
    }

    pub fn check_invariants(&self) -> Result<()> {
        let ordered = 0.0 < self.thm1_threshold
            && self.thm1_threshold < self.thm2_threshold_proven
            && self.thm2_threshold_proven < 0.5;
        let bracketed = [self.gamma_estimate, self.gamma_estimate_alt]
            .iter()
            .all(|g| self.gamma_lower <= *g && *g <= self.gamma_upper);
        if !ordered || !bracketed {
            return Err(Error::invalid(format!("threshold report violates its invariants: {self:?}")));
        }
        Ok(())
    }
}
