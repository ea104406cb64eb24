//! Monte Carlo estimation of the limiting normalized LCS of two independent
//! source strings.
//!
//! Pair `i` is drawn from streams `2i` and `2i + 1` of the master seed and
//! the per-pair lengths are collected in pair order before reduction, so
//! every field of a [`GammaEstimate`] is independent of the worker count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::lcs::lcs_length_fast;
use crate::source::Source;

pub const DEFAULT_CONFIDENCE: f64 = 0.99;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaConfig {
    pub source: Source,
    pub n: usize,
    pub num_pairs: usize,
    pub seed: u64,
    /// Rayon pool size; `0` uses the available parallelism.
    pub workers: usize,
    pub confidence: f64,
}

impl GammaConfig {
    pub fn new(source: Source, n: usize, num_pairs: usize, seed: u64) -> Self {
        GammaConfig {
            source,
            n,
            num_pairs,
            seed,
            workers: 0,
            confidence: DEFAULT_CONFIDENCE,
        }
    }

    /// Full-scale experiment size: 1000 pairs of length 100000.
    pub fn full_scale(source: Source, seed: u64) -> Self {
        Self::new(source, 100_000, 1000, seed)
    }

    /// Desk-scale preset for CI: 100 pairs of length 10000.
    pub fn desk_scale(source: Source, seed: u64) -> Self {
        Self::new(source, 10_000, 100, seed)
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    fn validate(&self) -> Result<()> {
        self.source.validate()?;
        if self.n == 0 {
            return Err(Error::invalid("string length n must be at least 1"));
        }
        if self.num_pairs == 0 {
            return Err(Error::invalid("num_pairs must be at least 1"));
        }
        if !(self.confidence > 0.0 && self.confidence < 1.0) {
            return Err(Error::invalid(format!(
                "confidence level must be in (0, 1), got {}",
                self.confidence
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaEstimate {
    /// `uniform` or the stay probability.
    #[serde(with = "source_label")]
    pub q: Source,
    pub n: usize,
    pub num_pairs: usize,
    pub mean_lcs: f64,
    pub min_lcs: usize,
    pub max_lcs: usize,
    pub stddev: f64,
    pub mean_normalized: f64,
    pub ci_halfwidth: f64,
    pub master_seed: u64,
}

mod source_label {
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::source::Source;

    pub fn serialize<S: Serializer>(source: &Source, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&source.label())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Source, D::Error> {
        let label = String::deserialize(d)?;
        Source::from_label(&label).map_err(serde::de::Error::custom)
    }
}

/// One LCS sample per pair, in pair order.
pub fn sample_lcs_lengths(config: &GammaConfig) -> Result<Vec<usize>> {
    config.validate()?;
    let run = || -> Result<Vec<usize>> {
        (0..config.num_pairs as u64)
            .into_par_iter()
            .map(|i| {
                let x = config.source.generate(config.n, config.seed, 2 * i)?;
                let y = config.source.generate(config.n, config.seed, 2 * i + 1)?;
                lcs_length_fast(&x, &y)
            })
            .collect()
    };
    if config.workers == 0 {
        return run();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| Error::invalid(format!("cannot build worker pool: {e}")))?;
    pool.install(run)
}

pub fn estimate_gamma(config: &GammaConfig) -> Result<GammaEstimate> {
    let samples = sample_lcs_lengths(config)?;
    summarize(config, &samples)
}

fn summarize(config: &GammaConfig, samples: &[usize]) -> Result<GammaEstimate> {
    let count = samples.len() as f64;
    let mean = samples.iter().map(|&l| l as f64).sum::<f64>() / count;
    let stddev = if samples.len() > 1 {
        let ss: f64 = samples.iter().map(|&l| (l as f64 - mean).powi(2)).sum();
        (ss / (count - 1.0)).sqrt()
    } else {
        0.0
    };
    let z = Normal::new(0.0, 1.0)
        .expect("standard normal")
        .inverse_cdf(0.5 + config.confidence / 2.0);
    Ok(GammaEstimate {
        q: config.source,
        n: config.n,
        num_pairs: samples.len(),
        mean_lcs: mean,
        min_lcs: *samples.iter().min().expect("at least one pair"),
        max_lcs: *samples.iter().max().expect("at least one pair"),
        stddev,
        mean_normalized: mean / config.n as f64,
        ci_halfwidth: z * stddev / count.sqrt(),
        master_seed: config.seed,
    })
}

/// One estimate per `(source, n)` cell, sources outermost.
pub fn gamma_sweep(
    sources: &[Source],
    lengths: &[usize],
    num_pairs: usize,
    seed: u64,
    workers: usize,
) -> Result<Vec<GammaEstimate>> {
    if sources.is_empty() || lengths.is_empty() {
        return Err(Error::invalid("sweep needs at least one source and one length"));
    }
    let mut out = Vec::with_capacity(sources.len() * lengths.len());
    for &source in sources {
        for &n in lengths {
            let config = GammaConfig::new(source, n, num_pairs, seed).with_workers(workers);
            out.push(estimate_gamma(&config)?);
        }
    }
    Ok(out)
}

/// Threshold implied by an empirical constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImpliedThreshold {
    pub threshold: f64,
    /// Always true: a finite-n Monte Carlo point estimate, not a proven bound.
    pub empirical: bool,
}

pub fn implied_threshold(est: &GammaEstimate) -> Result<ImpliedThreshold> {
    est.check_invariants()?;
    Ok(ImpliedThreshold {
        threshold: 1.0 - est.mean_normalized,
        empirical: true,
    })
}

impl GammaEstimate {
    pub fn check_invariants(&self) -> Result<()> {
        let ordered = self.min_lcs as f64 <= self.mean_lcs
            && self.mean_lcs <= self.max_lcs as f64
            && self.max_lcs <= self.n;
        let normalized = self.n > 0
            && (self.mean_normalized - self.mean_lcs / self.n as f64).abs() <= 1e-12;
        if !ordered || !normalized {
            return Err(Error::invalid(format!("inconsistent estimate: {self:?}")));
        }
        Ok(())
    }
}

pub const CSV_HEADER: [&str; 10] = [
    "q",
    "n",
    "pairs",
    "mean",
    "min",
    "max",
    "stddev",
    "mean_normalized",
    "ci",
    "seed",
];

#[derive(Debug, Serialize, Deserialize)]
struct CsvRow {
    q: String,
    n: usize,
    pairs: usize,
    mean: f64,
    min: usize,
    max: usize,
    stddev: f64,
    mean_normalized: f64,
    ci: f64,
    seed: u64,
}

pub fn to_csv(estimates: &[GammaEstimate]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    if estimates.is_empty() {
        w.write_record(CSV_HEADER).expect("in-memory write");
    }
    for e in estimates {
        w.serialize(CsvRow {
            q: e.q.label(),
            n: e.n,
            pairs: e.num_pairs,
            mean: e.mean_lcs,
            min: e.min_lcs,
            max: e.max_lcs,
            stddev: e.stddev,
            mean_normalized: e.mean_normalized,
            ci: e.ci_halfwidth,
            seed: e.master_seed,
        })
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
}

pub fn from_csv(text: &str) -> Result<Vec<GammaEstimate>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let mut out = Vec::new();
    for (i, row) in r.deserialize::<CsvRow>().enumerate() {
        let row = row.map_err(|e| Error::Parse {
            line: i + 2,
            message: e.to_string(),
        })?;
        out.push(GammaEstimate {
            q: Source::from_label(&row.q)?,
            n: row.n,
            num_pairs: row.pairs,
            mean_lcs: row.mean,
            min_lcs: row.min,
            max_lcs: row.max,
            stddev: row.stddev,
            mean_normalized: row.mean_normalized,
            ci_halfwidth: row.ci,
            master_seed: row.seed,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_symbol_strings_match_half_the_time() {
        let cfg = GammaConfig::new(Source::Markov(0.9), 1, 100_000, 3);
        let est = estimate_gamma(&cfg).unwrap();
        assert!((est.mean_lcs - 0.5).abs() < 0.01, "{}", est.mean_lcs);
        assert_eq!(est.min_lcs, 0);
        assert_eq!(est.max_lcs, 1);
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let cfg = GammaConfig::new(Source::Markov(0.95), 3000, 12, 99);
        let a = estimate_gamma(&cfg.with_workers(1)).unwrap();
        let b = estimate_gamma(&cfg.with_workers(3)).unwrap();
        let c = estimate_gamma(&cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, c);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(estimate_gamma(&GammaConfig::new(Source::Uniform, 0, 5, 0)).is_err());
        assert!(estimate_gamma(&GammaConfig::new(Source::Uniform, 5, 0, 0)).is_err());
        assert!(estimate_gamma(&GammaConfig::new(Source::Markov(1.0), 5, 5, 0)).is_err());
        assert!(gamma_sweep(&[], &[10], 5, 0, 1).is_err());
    }

    #[test]
    fn sweep_cell_equals_direct_estimate() {
        let sweep = gamma_sweep(&[Source::Markov(0.9)], &[500], 10, 4, 0).unwrap();
        let direct = estimate_gamma(&GammaConfig::new(Source::Markov(0.9), 500, 10, 4)).unwrap();
        assert_eq!(sweep, vec![direct]);
    }

    #[test]
    fn sweep_order_is_source_major() {
        let sweep = gamma_sweep(&[Source::Uniform, Source::Markov(0.9)], &[50, 80], 3, 1, 0).unwrap();
        let cells: Vec<_> = sweep.iter().map(|e| (e.q, e.n)).collect();
        assert_eq!(
            cells,
            vec![
                (Source::Uniform, 50),
                (Source::Uniform, 80),
                (Source::Markov(0.9), 50),
                (Source::Markov(0.9), 80)
            ]
        );
    }

    #[test]
    fn implied_threshold_is_complement() {
        let mut est = estimate_gamma(&GammaConfig::new(Source::Uniform, 100, 5, 0)).unwrap();
        for (g, t) in [(0.8269, 0.1731), (0.75, 0.25), (1.0, 0.0)] {
            est.mean_lcs = g * est.n as f64;
            est.mean_normalized = g;
            est.min_lcs = est.mean_lcs.floor() as usize;
            est.max_lcs = est.mean_lcs.ceil() as usize;
            let it = implied_threshold(&est).unwrap();
            assert!((it.threshold - t).abs() < 1e-12);
            assert!(it.empirical);
        }
        est.mean_normalized = 0.3;
        assert!(implied_threshold(&est).is_err());
    }

    #[test]
    fn csv_and_json_round_trip() {
        let ests = gamma_sweep(&[Source::Uniform, Source::Markov(0.95)], &[200], 7, 5, 0).unwrap();
        let text = to_csv(&ests);
        assert!(text.starts_with("q,n,pairs,mean,min,max,stddev,mean_normalized,ci,seed\n"));
        assert!(text.contains("\nuniform,200,7,"));
        assert_eq!(from_csv(&text).unwrap(), ests);
        let json = serde_json::to_string(&ests).unwrap();
        assert!(json.contains("\"q\":\"0.95\""));
        assert_eq!(serde_json::from_str::<Vec<GammaEstimate>>(&json).unwrap(), ests);
    }

    #[test]
    fn confidence_interval_uses_normal_quantile() {
        let cfg = GammaConfig::new(Source::Uniform, 300, 40, 8);
        let est = estimate_gamma(&cfg).unwrap();
        let expected = 2.575_829_303_548_900_4 * est.stddev / 40f64.sqrt();
        assert!((est.ci_halfwidth - expected).abs() < 1e-9);
        est.check_invariants().unwrap();
    }
}
