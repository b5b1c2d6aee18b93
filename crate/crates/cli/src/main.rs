//! `hltriple`: verification reports, sieve-function tables, constants and
//! almost-prime counts.

mod table;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use hltriple_core::bounds::{report_labels, validate_overrides, ReportMode, ReportOptions};
use hltriple_core::constants::{c2, c3, constant_c0, singular_series_cn};
use hltriple_core::engine::{count, ratio_scan, CountKind, Query, TripleCountResult};
use hltriple_core::special::{buchstab_w, lower_f0, upper_f0};
use hltriple_core::verification_report;

use table::{Cell, Format, Table};

/// Environment variable fixing the worker thread count.
const THREADS_ENV: &str = "HLTRIPLE_THREADS";

#[derive(Debug, Parser)]
#[command(name = "hltriple", version, about = "Hardy-Littlewood triple toolkit")]
struct Cli {
    #[command(flatten)]
    output: OutputArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,
    /// Write the report to this file instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Omit the generation timestamp so repeated runs are byte-identical.
    #[arg(long, global = true)]
    no_timestamp: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Recompute every published constant and compare.
    Verify {
        /// Per-label relative tolerance in percent, e.g. `margin=100`.
        #[arg(long = "tolerance", value_name = "LABEL=PCT", value_parser = parse_override)]
        tolerance: Vec<(String, f64)>,
        /// Default relative tolerance in percent.
        #[arg(long, value_name = "PCT", default_value_t = 1.0)]
        default_tolerance: f64,
        /// Report the published values instead of recomputing them.
        #[arg(long)]
        paper_values: bool,
    },
    /// Count one almost-prime configuration.
    Count {
        /// pi_1ab, D_1ab, pi_1r, D_1r or D_sr.
        kind: String,
        /// x for the pi kinds, N for the D kinds.
        size: u64,
        /// a b, r, or s r depending on the kind.
        #[arg(num_args = 1..=2, required = true)]
        params: Vec<u32>,
    },
    /// Counts and predictor ratios at several checkpoints.
    Ratio {
        kind: String,
        a: u32,
        b: u32,
        /// Ascending comma-separated sizes.
        #[arg(long, value_delimiter = ',', required = true)]
        checkpoints: Vec<u64>,
    },
    /// Tabulate F0, f0 or w.
    Functions {
        /// F0, f0 or w.
        which: String,
        #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
        points: Vec<f64>,
    },
    /// Euler products and auxiliary constants.
    Constants {
        /// C2, C3, C0 or CN=<N>; all of C2, C3, C0 when omitted.
        names: Vec<String>,
    },
}

fn parse_override(s: &str) -> Result<(String, f64), String> {
    let (label, pct) = s
        .split_once('=')
        .ok_or_else(|| format!("expected LABEL=PCT, got `{s}`"))?;
    let pct: f64 = pct
        .parse()
        .map_err(|_| format!("`{pct}` is not a percentage"))?;
    if !(pct >= 0.0 && pct.is_finite()) {
        return Err(format!("tolerance {pct} must be a non-negative number"));
    }
    if !report_labels().iter().any(|l| l == label) {
        return Err(format!("unknown label `{label}`"));
    }
    Ok((label.to_string(), pct / 100.0))
}

/// Failure classes mapped onto exit codes.
#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl From<hltriple_core::Error> for CliError {
    fn from(e: hltriple_core::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

struct Outcome {
    table: Table,
    /// Set when any row is flagged or carries an error marker.
    flagged: bool,
}

fn parse_kind(s: &str) -> Result<CountKind, CliError> {
    CountKind::parse(s).ok_or_else(|| {
        CliError::Usage(format!(
            "unknown kind `{s}`; expected pi_1ab, D_1ab, pi_1r, D_1r or D_sr"
        ))
    })
}

fn run_verify(overrides: Vec<(String, f64)>, default_pct: f64, paper: bool) -> Result<Outcome, CliError> {
    if !(default_pct >= 0.0 && default_pct.is_finite()) {
        return Err(CliError::Usage(format!("tolerance {default_pct} must be non-negative")));
    }
    let overrides: BTreeMap<String, f64> = overrides.into_iter().collect();
    validate_overrides(&overrides)?;
    let opts = ReportOptions {
        mode: if paper {
            ReportMode::PaperValues
        } else {
            ReportMode::Recompute
        },
        tolerance: default_pct / 100.0,
        overrides,
    };
    let rows = verification_report(&opts)?;
    let mut table = Table::new(
        "verify",
        &["label", "computed", "paper", "direction", "rel_diff", "verdict"],
    );
    let mut flagged = false;
    for r in rows {
        let passed = r.passed();
        flagged |= !passed;
        table.push(vec![
            Cell::Text(r.label),
            Cell::Number(r.computed),
            Cell::Text(r.paper),
            Cell::text(r.direction.to_string()),
            Cell::Number(r.rel_diff),
            Cell::text(if passed { "pass" } else { "flag" }),
        ]);
    }
    Ok(Outcome { table, flagged })
}

const COUNT_COLUMNS: [&str; 8] = [
    "kind",
    "size",
    "p1",
    "p2",
    "count",
    "predicted",
    "ratio",
    "unit_exclusions",
];

fn count_row(r: &TripleCountResult) -> Vec<Cell> {
    let (p1, p2) = match r.query {
        Query::Pi1ab { a, b, .. } | Query::D1ab { a, b, .. } => (Cell::Integer(a as u64), Cell::Integer(b as u64)),
        Query::Pi1r { r, .. } | Query::D1r { r, .. } => (Cell::Integer(r as u64), Cell::Empty),
        Query::Dsr { s, r, .. } => (Cell::Integer(s as u64), Cell::Integer(r as u64)),
    };
    vec![
        Cell::text(r.query.kind().name()),
        Cell::Integer(r.query.size()),
        p1,
        p2,
        Cell::Integer(r.count),
        Cell::Number(r.predicted),
        Cell::Number(r.ratio),
        Cell::Integer(r.unit_exclusions),
    ]
}

fn run_count(kind: &str, size: u64, params: &[u32]) -> Result<Outcome, CliError> {
    let kind = parse_kind(kind)?;
    let needed = match kind {
        CountKind::Pi1r | CountKind::D1r => 1,
        _ => 2,
    };
    if params.len() != needed {
        return Err(CliError::Usage(format!(
            "{} takes {needed} parameter(s), got {}",
            kind.name(),
            params.len()
        )));
    }
    let q = Query::new(kind, size, params[0], params.get(1).copied().unwrap_or(0));
    let r = count(q)?;
    if r.unit_exclusions > 0 {
        eprintln!(
            "note: {} configuration(s) excluded because 1 is not counted as an almost-prime",
            r.unit_exclusions
        );
    }
    let mut table = Table::new("count", &COUNT_COLUMNS);
    table.push(count_row(&r));
    Ok(Outcome {
        table,
        flagged: false,
    })
}

fn run_ratio(kind: &str, a: u32, b: u32, checkpoints: &[u64]) -> Result<Outcome, CliError> {
    let kind = parse_kind(kind)?;
    let results = ratio_scan(kind, a, b, checkpoints)?;
    let mut table = Table::new("ratio", &COUNT_COLUMNS);
    for r in &results {
        table.push(count_row(r));
    }
    Ok(Outcome {
        table,
        flagged: false,
    })
}

fn run_functions(which: &str, points: &[f64]) -> Result<Outcome, CliError> {
    let f: fn(f64) -> hltriple_core::Result<f64> = match which {
        "F0" => upper_f0,
        "f0" => lower_f0,
        "w" => buchstab_w,
        other => {
            return Err(CliError::Usage(format!(
                "unknown function `{other}`; expected F0, f0 or w"
            )))
        }
    };
    let mut table = Table::new("functions", &["function", "point", "value", "error"]);
    let mut flagged = false;
    for &p in points {
        match f(p) {
            Ok(v) => table.push(vec![
                Cell::text(which),
                Cell::Number(p),
                Cell::Number(v),
                Cell::Empty,
            ]),
            Err(e) => {
                flagged = true;
                table.push(vec![
                    Cell::text(which),
                    Cell::Number(p),
                    Cell::Empty,
                    Cell::Text(e.to_string()),
                ]);
            }
        }
    }
    Ok(Outcome { table, flagged })
}

fn run_constants(names: &[String]) -> Result<Outcome, CliError> {
    let defaults = ["C2".to_string(), "C3".to_string(), "C0".to_string()];
    let names = if names.is_empty() { &defaults[..] } else { names };
    let mut table = Table::new("constants", &["name", "value"]);
    for name in names {
        let value = match name.as_str() {
            "C2" => c2(),
            "C3" => c3(),
            "C0" => constant_c0()?,
            other => match other.strip_prefix("CN=") {
                Some(n) => {
                    let n: u64 = n
                        .parse()
                        .map_err(|_| CliError::Usage(format!("`{n}` is not an integer")))?;
                    singular_series_cn(n)?
                }
                None => {
                    return Err(CliError::Usage(format!(
                        "unknown constant `{other}`; expected C2, C3, C0 or CN=<N>"
                    )))
                }
            },
        };
        table.push(vec![Cell::Text(name.clone()), Cell::Number(value)]);
    }
    Ok(Outcome {
        table,
        flagged: false,
    })
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = value
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("{THREADS_ENV} must be a positive integer, got `{value}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Usage(e.to_string()))
}

fn run(cli: Cli) -> Result<bool, CliError> {
    configure_threads()?;
    let outcome = match cli.command {
        Command::Verify {
            tolerance,
            default_tolerance,
            paper_values,
        } => run_verify(tolerance, default_tolerance, paper_values)?,
        Command::Count { kind, size, params } => run_count(&kind, size, &params)?,
        Command::Ratio {
            kind,
            a,
            b,
            checkpoints,
        } => run_ratio(&kind, a, b, &checkpoints)?,
        Command::Functions { which, points } => run_functions(&which, &points)?,
        Command::Constants { names } => run_constants(&names)?,
    };
    let timestamp = if cli.output.no_timestamp {
        None
    } else {
        Some(
            SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        )
    };
    let bytes = outcome.table.render(cli.output.format, timestamp)?;
    match &cli.output.out {
        Some(path) => table::write_atomic(path, &bytes)?,
        None => {
            use std::io::Write;
            std::io::stdout().lock().write_all(&bytes)?;
        }
    }
    Ok(outcome.flagged)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            if matches!(e, CliError::Usage(_)) {
                eprintln!("run `hltriple --help` for usage");
            }
            ExitCode::from(1)
        }
    }
}
