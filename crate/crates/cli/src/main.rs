//! `delcap`: command-line front end for the deletion-capacity toolkit.

mod render;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use delcap::codebook::{
    adversary_attack, decode, exact_max_codebook, graph_stats, greedy_codebook, sample_codebook_thm3,
    sample_degrees, verify_codebook, Codebook, ConfusabilityGraph, GreedyOrdering, Limits, SearchBudget,
};
use delcap::gamma::{estimate_gamma, gamma_sweep, implied_threshold, to_csv, GammaConfig};
use delcap::lcs::{lcs_length_fast, lcs_witness};
use delcap::math::ThresholdReport;
use delcap::source::Source;
use delcap::{Error, Sequence};

use render::Format;

const EXIT_VALIDATION: u8 = 2;
const EXIT_RESOURCE: u8 = 3;
const EXIT_VERIFY_FAIL: u8 = 4;
const EXIT_DECODE_FAIL: u8 = 5;

#[derive(Parser, Debug)]
#[command(name = "delcap", version, about = "Zero-error capacity experiments for the adversarial deletion channel")]
struct Cli {
    /// Master seed for every stochastic command.
    #[arg(long, global = true, env = "DELCAP_SEED", default_value_t = 1)]
    seed: u64,

    /// Worker threads; 0 uses the available parallelism. Never changes results.
    #[arg(long, global = true, default_value_t = 0)]
    workers: usize,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Capacity thresholds and LCS constant bounds.
    Thresholds {
        /// Bisection tolerance for the entropy threshold.
        #[arg(long, default_value_t = 1e-12)]
        tolerance: f64,
    },
    /// LCS length (and optionally a witness) of two strings.
    Lcs {
        x: String,
        y: String,
        #[arg(long, default_value_t = 2)]
        alphabet: u32,
        #[arg(long)]
        witness: bool,
    },
    /// Monte Carlo estimate of the normalized LCS of two random strings.
    Gamma {
        /// Stay probability of the Markov source, or `uniform`.
        #[arg(long, default_value = "uniform")]
        q: String,
        #[arg(long, default_value_t = 10_000)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        pairs: usize,
    },
    /// Gamma estimates over a grid of sources and lengths.
    GammaSweep {
        #[arg(long, value_delimiter = ',', default_value = "uniform,0.95,0.99,0.999")]
        q: Vec<String>,
        #[arg(long, value_delimiter = ',', default_value = "10000")]
        n: Vec<usize>,
        #[arg(long, default_value_t = 100)]
        pairs: usize,
    },
    /// Confusability graph statistics.
    Graph {
        #[arg(long)]
        n: usize,
        #[arg(long = "D")]
        deletions: usize,
        /// Estimate degrees from this many sampled vertices instead of all.
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Build a codebook, verify it and write it to a file.
    #[command(alias = "codebook")]
    CodebookBuild {
        #[arg(long)]
        n: usize,
        #[arg(long = "D")]
        deletions: usize,
        #[arg(long, value_enum, default_value_t = Method::Greedy)]
        method: Method,
        #[arg(long, value_enum, default_value_t = Ordering::MinDegree)]
        ordering: Ordering,
        /// Stay probability for the sampled construction.
        #[arg(long, default_value_t = 0.9)]
        q: f64,
        /// Rate constant for the sampled construction.
        #[arg(long, default_value_t = 0.1)]
        c: f64,
        /// Seconds allowed for the exact search; 0 means unlimited.
        #[arg(long, default_value_t = 300)]
        time_limit: u64,
        /// Codebook file; defaults to `codebook_n<n>_D<D>_<method>.txt`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check that no two codewords are confusable.
    CodebookVerify { file: PathBuf },
    /// Decode a received string against a codebook.
    Decode { file: PathBuf, received: String },
    /// Search for two codewords the adversary can confuse.
    Attack { file: PathBuf },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Method {
    Greedy,
    Exact,
    Sample,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Ordering {
    Lexicographic,
    MinDegree,
    Random,
}

/// A failure with its exit status.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl From<anyhow::Error> for Failure {
    fn from(error: anyhow::Error) -> Self {
        let code = match error.downcast_ref::<Error>() {
            Some(Error::LimitExceeded { .. } | Error::SearchBudgetExhausted { .. }) => EXIT_RESOURCE,
            Some(Error::NoCandidate | Error::Ambiguous(_) | Error::ReceivedLength { .. }) => EXIT_DECODE_FAIL,
            Some(_) => EXIT_VALIDATION,
            None => 1,
        };
        Failure { code, error }
    }
}

impl From<Error> for Failure {
    fn from(error: Error) -> Self {
        anyhow::Error::new(error).into()
    }
}

/// Rendered report plus the exit status it implies.
struct Outcome {
    report: String,
    code: u8,
}

impl Outcome {
    fn ok(report: String) -> Self {
        Outcome { report, code: 0 }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.workers > 0 {
        // Only fails if a pool already exists, which cannot happen here.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.workers).build_global();
    }
    match run(&cli) {
        Ok(outcome) => match emit(&cli, &outcome.report) {
            Ok(()) => ExitCode::from(outcome.code),
            Err(e) => {
                eprintln!("error: {e:#}");
                ExitCode::from(1)
            }
        },
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}

fn emit(cli: &Cli, report: &str) -> anyhow::Result<()> {
    match &cli.output {
        Some(path) => write_file(path, report),
        None => {
            print!("{report}");
            Ok(())
        }
    }
}

fn write_file(path: &Path, contents: &str) -> anyhow::Result<()> {
    std::fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn read_codebook(path: &Path) -> Result<Codebook, Failure> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(Codebook::parse(&text).with_context(|| format!("parsing {}", path.display()))?)
}

fn run(cli: &Cli) -> Result<Outcome, Failure> {
    let format = cli.format;
    match &cli.command {
        Command::Thresholds { tolerance } => {
            let report = ThresholdReport::compute(*tolerance)?;
            report.check_invariants()?;
            Ok(Outcome::ok(format.record(&report, || render::thresholds_text(&report))?))
        }
        Command::Lcs { x, y, alphabet, witness } => {
            let xs = Sequence::parse(x, *alphabet)?;
            let ys = Sequence::parse(y, *alphabet)?;
            let report = LcsReport {
                x_len: xs.len(),
                y_len: ys.len(),
                lcs: lcs_length_fast(&xs, &ys)?,
                witness: if *witness {
                    Some(lcs_witness(&xs, &ys)?.to_string())
                } else {
                    None
                },
            };
            Ok(Outcome::ok(format.record(&report, || render::lcs_text(&report))?))
        }
        Command::Gamma { q, n, pairs } => {
            let source = Source::from_label(q)?;
            let config = GammaConfig::new(source, *n, *pairs, cli.seed).with_workers(cli.workers);
            let estimate = estimate_gamma(&config)?;
            let report = match format {
                Format::Json => render::json(&estimate)?,
                Format::Csv => to_csv(std::slice::from_ref(&estimate)),
                Format::Text => render::gamma_text(&estimate, &implied_threshold(&estimate)?),
            };
            Ok(Outcome::ok(report))
        }
        Command::GammaSweep { q, n, pairs } => {
            let sources = q
                .iter()
                .map(|label| Source::from_label(label))
                .collect::<Result<Vec<_>, _>>()?;
            let estimates = gamma_sweep(&sources, n, *pairs, cli.seed, cli.workers)?;
            let report = match format {
                Format::Json => render::json(&estimates)?,
                Format::Csv => to_csv(&estimates),
                Format::Text => {
                    let mut out = String::new();
                    for e in &estimates {
                        out.push_str(&render::gamma_text(e, &implied_threshold(e)?));
                    }
                    out
                }
            };
            Ok(Outcome::ok(report))
        }
        Command::Graph { n, deletions, samples } => {
            let g = ConfusabilityGraph::build(*n, *deletions)?;
            let report = match samples {
                Some(s) => {
                    let sampled = sample_degrees(&g, *s, cli.seed)?;
                    format.record(&sampled, || render::sampled_text(&sampled))?
                }
                None => {
                    let stats = graph_stats(&g)?;
                    format.record(&stats, || render::graph_text(&stats))?
                }
            };
            Ok(Outcome::ok(report))
        }
        Command::CodebookBuild {
            n,
            deletions,
            method,
            ordering,
            q,
            c,
            time_limit,
            out,
        } => build_codebook(cli, *n, *deletions, *method, *ordering, *q, *c, *time_limit, out.as_deref()),
        Command::CodebookVerify { file } => {
            let cb = read_codebook(file)?;
            let report = verify_codebook(&cb);
            let code = if report.valid { 0 } else { EXIT_VERIFY_FAIL };
            Ok(Outcome {
                report: format.record(&report, || render::verify_text(&report))?,
                code,
            })
        }
        Command::Decode { file, received } => {
            let cb = read_codebook(file)?;
            let w = Sequence::binary(received)?;
            let codeword = decode(&cb, &w)?;
            let report = DecodeReport {
                received: received.clone(),
                codeword: codeword.to_string(),
            };
            Ok(Outcome::ok(format.record(&report, || format!("{}\n", report.codeword))?))
        }
        Command::Attack { file } => {
            let cb = read_codebook(file)?;
            let attack = adversary_attack(&cb);
            let report = AttackReport {
                found: attack.is_some(),
                attack,
            };
            let code = if report.found { EXIT_VERIFY_FAIL } else { 0 };
            Ok(Outcome {
                report: format.record(&report, || render::attack_text(&report))?,
                code,
            })
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn build_codebook(
    cli: &Cli,
    n: usize,
    deletions: usize,
    method: Method,
    ordering: Ordering,
    q: f64,
    c: f64,
    time_limit: u64,
    out: Option<&Path>,
) -> Result<Outcome, Failure> {
    let limits = Limits::default();
    let (codebook, seed) = match method {
        Method::Exact => {
            let budget = SearchBudget {
                max_nodes: None,
                time_limit: (time_limit > 0).then(|| Duration::from_secs(time_limit)),
            };
            (exact_max_codebook(n, deletions, &limits, &budget)?, None)
        }
        Method::Greedy => {
            let g = ConfusabilityGraph::build_with(n, deletions, &limits)?;
            let (order, seed) = match ordering {
                Ordering::Lexicographic => (GreedyOrdering::Lexicographic, None),
                Ordering::MinDegree => (GreedyOrdering::MinDegreeFirst, None),
                Ordering::Random => (GreedyOrdering::SeededRandom(cli.seed), Some(cli.seed)),
            };
            (greedy_codebook(&g, order)?, seed)
        }
        Method::Sample => {
            let g = ConfusabilityGraph::build_with(n, deletions, &limits)?;
            (sample_codebook_thm3(&g, q, c, cli.seed)?.codebook, Some(cli.seed))
        }
    };
    let verification = verify_codebook(&codebook);
    let path = out.map(Path::to_path_buf).unwrap_or_else(|| {
        PathBuf::from(format!("codebook_n{n}_D{deletions}_{}.txt", method_name(method)))
    });
    let report = CodebookReport {
        n,
        deletions,
        method: method_name(method).to_string(),
        seed,
        size: codebook.len(),
        rate: codebook.rate(),
        valid: verification.valid,
        file: path.display().to_string(),
    };
    if !verification.valid {
        return Ok(Outcome {
            report: cli.format.record(&report, || render::codebook_text(&report))?,
            code: EXIT_VERIFY_FAIL,
        });
    }
    write_file(&path, &codebook.to_file_string())?;
    Ok(Outcome::ok(cli.format.record(&report, || render::codebook_text(&report))?))
}

fn method_name(method: Method) -> &'static str {
    match method {
        Method::Greedy => "greedy",
        Method::Exact => "exact",
        Method::Sample => "sample",
    }
}

#[derive(Debug, Serialize)]
struct LcsReport {
    x_len: usize,
    y_len: usize,
    lcs: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<String>,
}

#[derive(Debug, Serialize)]
struct CodebookReport {
    n: usize,
    #[serde(rename = "D")]
    deletions: usize,
    method: String,
    /// Present for seeded constructions.
    seed: Option<u64>,
    size: usize,
    rate: f64,
    valid: bool,
    file: String,
}

#[derive(Debug, Serialize)]
struct DecodeReport {
    received: String,
    codeword: String,
}

#[derive(Debug, Serialize)]
struct AttackReport {
    found: bool,
    attack: Option<delcap::codebook::Attack>,
}
