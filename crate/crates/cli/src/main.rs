use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand};
use regex::Regex;

use sonckit::corpus::{render_table, run_corpus};
use sonckit::form::parse_form_file;
use sonckit::grid::{evaluate_grid, Grid};
use sonckit::mediated::{maximal_mediated_set, MediatedSet};
use sonckit::rational::{format_rational, q};
use sonckit::report::{analyze, render_text, AnalysisError, AnalysisReport, AnalyzeOptions};
use sonckit::search::SearchBudget;
use sonckit::{parse_form, ExponentVector, SparseForm};

const EXIT_INPUT: u8 = 1;
const EXIT_INVARIANT: u8 = 2;
const EXIT_MISMATCH: u8 = 3;

#[derive(Parser)]
#[command(name = "sonckit", version, about = "Exact SONC / SOS analysis of sparse forms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze a form file (or a previously written JSON report).
    Analyze {
        file: PathBuf,
        #[arg(long)]
        json: bool,
        /// Run the numeric SONC feasibility search when exact tests are inconclusive.
        #[arg(long)]
        search: bool,
        /// Include the full maximal mediated set for circuit forms.
        #[arg(long)]
        mms: bool,
        #[arg(long, default_value_t = SearchBudget::default().max_params)]
        max_params: usize,
        /// Normalized margin above which the search reports infeasibility.
        #[arg(long, default_value_t = SearchBudget::default().infeasibility_margin)]
        margin: f64,
        #[arg(long, default_value_t = SearchBudget::default().max_iters)]
        iters: usize,
        #[arg(long, default_value_t = SearchBudget::default().seeds)]
        seeds: usize,
    },
    /// Run the built-in regression corpus.
    Corpus {
        /// Regular expression on entry names.
        #[arg(long)]
        filter: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// Maximal mediated set of a list of even points, e.g. "4,2,0; 2,4,0; 0,0,6".
    Mms {
        #[arg(long)]
        points: String,
        #[arg(long)]
        json: bool,
    },
    /// Exact evaluation of a form on a named grid.
    Grid {
        file: PathBuf,
        #[arg(long)]
        grid: String,
    },
}

enum Failure {
    Input(anyhow::Error),
    Invariant(String),
    Mismatch,
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Input(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = std::env::var("SONCKIT_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        // Only fails if a global pool already exists.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    match run(cli.command) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INPUT)
        }
        Err(Failure::Invariant(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(EXIT_INVARIANT)
        }
        Err(Failure::Mismatch) => ExitCode::from(EXIT_MISMATCH),
    }
}

fn run(cmd: Command) -> Result<String, Failure> {
    match cmd {
        Command::Analyze {
            file,
            json,
            search,
            mms,
            max_params,
            margin,
            iters,
            seeds,
        } => {
            let f = load_form(&file)?;
            let opts = AnalyzeOptions {
                search,
                mms,
                budget: SearchBudget {
                    max_params,
                    infeasibility_margin: margin,
                    max_iters: iters,
                    seeds,
                },
            };
            let report = analyze(&f, &opts).map_err(|e| match e {
                AnalysisError::InvariantViolation(m) => Failure::Invariant(m),
                other => Failure::Input(other.into()),
            })?;
            if json {
                Ok(serde_json::to_string_pretty(&report).map_err(anyhow::Error::from)? + "\n")
            } else {
                Ok(render_text(&report))
            }
        }
        Command::Corpus { filter, json } => {
            let re = filter
                .map(|p| Regex::new(&p).with_context(|| format!("bad filter '{p}'")))
                .transpose()?;
            let results = run_corpus(re.as_ref());
            let out = if json {
                serde_json::to_string_pretty(&results).map_err(anyhow::Error::from)? + "\n"
            } else {
                render_table(&results)
            };
            if results.iter().all(|r| r.pass) {
                Ok(out)
            } else {
                print!("{out}");
                Err(Failure::Mismatch)
            }
        }
        Command::Mms { points, json } => {
            let pts = parse_points(&points)?;
            let m = maximal_mediated_set(&pts).map_err(anyhow::Error::from)?;
            if json {
                Ok(serde_json::to_string_pretty(&m).map_err(anyhow::Error::from)? + "\n")
            } else {
                Ok(render_mms(&m))
            }
        }
        Command::Grid { file, grid } => {
            let f = load_form(&file)?;
            let g: Grid = grid.parse().map_err(anyhow::Error::from)?;
            let r = evaluate_grid(&f, g).map_err(anyhow::Error::from)?;
            let mut out = String::new();
            let _ = writeln!(out, "grid {g}: {} points, {} zeros", r.values.len(), r.zero_count());
            for v in &r.values {
                let pt: Vec<String> = v.point.iter().map(format_rational).collect();
                let mark = if v.value == q(0) { "zero" } else { "nonzero" };
                let _ = writeln!(out, "({})  {}  {mark}", pt.join(","), format_rational(&v.value));
            }
            Ok(out)
        }
    }
}

/// Reads a form file, or the `form` field of a JSON report.
fn load_form(path: &Path) -> anyhow::Result<SparseForm> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    if text.trim_start().starts_with('{') {
        let report: AnalysisReport =
            serde_json::from_str(&text).with_context(|| format!("{} is not a valid report", path.display()))?;
        let f = parse_form(&report.form, Some(report.num_vars))?;
        return Ok(f.with_name(report.form_name));
    }
    let f = parse_form_file(&text).with_context(|| format!("cannot parse {}", path.display()))?;
    Ok(match f.name() {
        Some(_) => f,
        None => {
            let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("unnamed").to_string();
            f.with_name(stem)
        }
    })
}

fn parse_points(text: &str) -> anyhow::Result<Vec<ExponentVector>> {
    let pts = text
        .split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|p| {
            p.split(',')
                .map(|c| c.trim().parse::<u32>().with_context(|| format!("bad coordinate in '{p}'")))
                .collect::<anyhow::Result<Vec<u32>>>()
                .map(ExponentVector)
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    if pts.is_empty() {
        return Err(anyhow!("no points given"));
    }
    Ok(pts)
}

fn render_mms(m: &MediatedSet) -> String {
    let show = |v: &[ExponentVector]| v.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(" ");
    let mut out = String::new();
    let _ = writeln!(out, "classification: {:?}", m.classification);
    let _ = writeln!(out, "star ({}): {}", m.star.len(), show(&m.star));
    let _ = writeln!(out, "lattice ({}): {}", m.lattice.len(), show(&m.lattice));
    let _ = writeln!(out, "mid ({}): {}", m.mid_delta.len(), show(&m.mid_delta));
    out
}
