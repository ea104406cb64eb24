//! Report formatting. JSON and CSV are stable; text is for people.

use std::fmt::Write as _;

use anyhow::Context;
use clap::ValueEnum;
use serde::Serialize;
use serde_json::Value;

use delcap::codebook::{GraphStats, SampledDegrees, ValidityReport};
use delcap::gamma::{GammaEstimate, ImpliedThreshold};
use delcap::math::ThresholdReport;

use crate::{AttackReport, CodebookReport, LcsReport};

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Text,
}

impl Format {
    /// Renders a single record.
    pub fn record<T: Serialize>(self, value: &T, text: impl FnOnce() -> String) -> anyhow::Result<String> {
        match self {
            Format::Json => json(value),
            Format::Csv => csv_record(value),
            Format::Text => Ok(text()),
        }
    }
}

pub fn json<T: Serialize + ?Sized>(value: &T) -> anyhow::Result<String> {
    let mut s = serde_json::to_string_pretty(value).context("serializing report")?;
    s.push('\n');
    Ok(s)
}

/// Header row of field names and one value row. Nested values are embedded
/// as JSON text; absent values are empty cells.
fn csv_record<T: Serialize>(value: &T) -> anyhow::Result<String> {
    let Value::Object(fields) = serde_json::to_value(value).context("serializing report")? else {
        anyhow::bail!("CSV output needs a record");
    };
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(fields.keys())?;
    writer.write_record(fields.values().map(|v| match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }))?;
    Ok(String::from_utf8(writer.into_inner()?)?)
}

pub fn thresholds_text(r: &ThresholdReport) -> String {
    format!(
        "entropy (counting) threshold   p < {:.6}\n\
         LCS threshold, proven           p < {:.6}  (gamma <= {})\n\
         LCS threshold, conjectured      p < {:.6}  (gamma ~ {})\n\
         LCS threshold, conjectured alt  p < {:.6}  (gamma ~ {})\n\
         gamma bounds                    [{}, {}]\n",
        r.thm1_threshold,
        r.thm2_threshold_proven,
        r.gamma_upper,
        r.thm2_threshold_conjectured,
        r.gamma_estimate,
        r.thm2_threshold_conjectured_alt,
        r.gamma_estimate_alt,
        r.gamma_lower,
        r.gamma_upper,
    )
}

pub fn lcs_text(r: &LcsReport) -> String {
    let mut s = format!("lcs {} (lengths {} and {})\n", r.lcs, r.x_len, r.y_len);
    if let Some(w) = &r.witness {
        writeln!(s, "witness {w}").expect("string write");
    }
    s
}

pub fn gamma_text(e: &GammaEstimate, t: &ImpliedThreshold) -> String {
    format!(
        "source {}  n {}  pairs {}  seed {}\n\
         mean lcs {:.1}  min {}  max {}  stddev {:.2}\n\
         normalized {:.6} +/- {:.6} (99% CI)\n\
         implied threshold p < {:.6}  [empirical finite-n estimate, not a proven bound]\n",
        e.q.label(),
        e.n,
        e.num_pairs,
        e.master_seed,
        e.mean_lcs,
        e.min_lcs,
        e.max_lcs,
        e.stddev,
        e.mean_normalized,
        e.ci_halfwidth,
        t.threshold,
    )
}

pub fn graph_text(s: &GraphStats) -> String {
    let mut out = format!(
        "n {}  D {}  vertices {}  edges {}  density {:.6}\n\
         degree min {}  mean {:.3}  max {}  (0^n: {})\n\
         independent set lower bounds: Turan {:.3}  Caro-Wei {:.3}\n\
         degree histogram:\n",
        s.n,
        s.deletions,
        s.vertices,
        s.edges,
        s.density,
        s.min_degree,
        s.mean_degree,
        s.max_degree,
        s.zero_string_degree,
        s.turan_bound,
        s.caro_wei_bound,
    );
    for (d, k) in &s.degree_histogram {
        writeln!(out, "  {d:>8} {k}").expect("string write");
    }
    out
}

pub fn sampled_text(s: &SampledDegrees) -> String {
    format!(
        "n {}  D {}  sampled vertices {}  seed {}\n\
         degree min {}  mean {:.3}  max {}  (0^n: {})\n",
        s.n,
        s.deletions,
        s.samples,
        s.seed,
        s.min_degree,
        s.mean_degree,
        s.max_degree,
        s.zero_string_degree,
    )
}

pub fn codebook_text(r: &CodebookReport) -> String {
    let mut s = format!(
        "method {}  n {}  D {}  size {}  rate {:.6}\n",
        r.method, r.n, r.deletions, r.size, r.rate
    );
    if let Some(seed) = r.seed {
        writeln!(s, "seed {seed}").expect("string write");
    }
    if r.valid {
        writeln!(s, "verify PASS\nwrote {}", r.file).expect("string write");
    } else {
        writeln!(s, "verify FAIL; nothing written").expect("string write");
    }
    s
}

pub fn verify_text(r: &ValidityReport) -> String {
    match &r.violation {
        None => format!("PASS  n {}  D {}  count {}\n", r.n, r.deletions, r.count),
        Some(v) => format!(
            "FAIL  {} and {} have LCS {} >= {}\n",
            v.first,
            v.second,
            v.lcs,
            r.n - r.deletions
        ),
    }
}

pub fn attack_text(r: &AttackReport) -> String {
    match &r.attack {
        None => "none\n".to_string(),
        Some(a) => format!(
            "{} -> {} (deleting {})\n{} -> {} (deleting {})\n",
            a.first, a.received, a.deletions_first, a.second, a.received, a.deletions_second
        ),
    }
}
