//! Command-line front end.
//!
//! Exit codes: 0 success, 1 invariant failure, 2 usage or domain error,
//! 3 a certificate or bound failed.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use sdp_gap::appendix::{q_inverse_closed_form, QMatrix};
use sdp_gap::checks::{run_suite, Suite};
use sdp_gap::kcycle::build_kcycle_certificate;
use sdp_gap::linalg::csv::write_csv;
use sdp_gap::tsp_sdp::{cycle_solution, read_solution, verify_feasibility, write_solution, SdpInstance};
use sdp_gap::witness::{analytic_a, build_gap_certificate, cut_cost_matrix, expand_family, WitnessCertificate};
use sdp_gap::Error;

const EXIT_INVARIANT: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_CLAIM: u8 = 3;

#[derive(Parser)]
#[command(name = "sdp-gap", version, about = "Integrality-gap certificates for the association-scheme TSP relaxation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ExportKind {
    Witness,
    Cycle,
    QInverse,
}

#[derive(Subcommand)]
enum Command {
    /// Certificate for the cut instance on n vertices.
    Witness {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// One certificate per even n in a range, with the growing TSP/SDP ratio.
    GapTable {
        #[arg(long)]
        n_min: usize,
        #[arg(long)]
        n_max: usize,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Certificate for the k-cycle-cover instance with scale c.
    Kcycle {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        c: usize,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Checks a solution written by `export` (or by hand) against the cut instance.
    Verify {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Runs an invariant suite and prints a JSON summary.
    Checks {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Writes matrices as CSV files into a directory.
    Export {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = ExportKind::Witness)]
        kind: ExportKind,
        #[arg(long)]
        out: PathBuf,
    },
}

enum Failure {
    Core(Error),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::Domain(_)
        | Error::Parity { .. }
        | Error::DimensionMismatch { .. }
        | Error::TooLarge { .. }
        | Error::NotSymmetric { .. }
        | Error::NotMetric { .. }
        | Error::InvalidCost { .. }
        | Error::Parse(_)
        | Error::Io(_) => EXIT_USAGE,
        Error::InfeasibleWitness(_) | Error::IdentityViolation { .. } => EXIT_CLAIM,
        _ => EXIT_INVARIANT,
    }
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::Core(e.into())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serialisable");
    s.push('\n');
    s
}

fn witness_text(cert: &WitnessCertificate) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "n           {}", cert.n);
    if let (Some(k), Some(c)) = (cert.k, cert.c) {
        let _ = writeln!(s, "k, c        {k}, {c}");
    }
    let _ = writeln!(s, "sdp_cost    {}", cert.sdp_cost);
    let _ = writeln!(s, "integer_opt {}", cert.integer_opt);
    let _ = writeln!(s, "ratio       {}", cert.ratio);
    let _ = writeln!(s, "bound       {}", cert.bound);
    let _ = writeln!(s, "feasible    {}", cert.feasible);
    s
}

#[derive(Serialize)]
struct GapRow {
    n: usize,
    sdp_cost: f64,
    tsp_opt: f64,
    ratio: f64,
    bound: f64,
    tsp_over_sdp: f64,
}

fn cmd_witness(n: usize, tol: f64, seed: u64, out: Option<&Path>, format: Format) -> Result<u8, Failure> {
    let mut cert = build_gap_certificate(n, tol)?;
    cert.seed = seed;
    let text = match format {
        Format::Json => to_json(&cert),
        Format::Text => witness_text(&cert),
        Format::Csv => return Err(Failure::Usage("witness supports --format json or text".into())),
    };
    emit(&text, out)?;
    Ok(if cert.feasible && cert.ratio <= cert.bound + 1e-10 { 0 } else { EXIT_CLAIM })
}

fn cmd_gap_table(n_min: usize, n_max: usize, tol: f64, out: Option<&Path>, format: Format) -> Result<u8, Failure> {
    if !n_min.is_multiple_of(2) || !n_max.is_multiple_of(2) || n_min < 6 || n_max < n_min {
        return Err(Failure::Usage(format!("need even 6 <= n-min <= n-max, got {n_min}..{n_max}")));
    }
    let mut rows = Vec::new();
    let mut feasible = true;
    for n in (n_min..=n_max).step_by(2) {
        let cert = build_gap_certificate(n, tol)?;
        feasible &= cert.feasible;
        rows.push(GapRow {
            n,
            sdp_cost: cert.sdp_cost,
            tsp_opt: cert.integer_opt,
            ratio: cert.ratio,
            bound: cert.bound,
            tsp_over_sdp: cert.integer_opt / cert.sdp_cost,
        });
    }
    let increasing = rows.windows(2).all(|w| w[1].tsp_over_sdp > w[0].tsp_over_sdp);
    let text = match format {
        Format::Csv => {
            let mut s = String::from("n,sdp_cost,tsp_opt,ratio,bound,tsp_over_sdp\n");
            for r in &rows {
                let _ = writeln!(s, "{},{},{},{},{},{}", r.n, r.sdp_cost, r.tsp_opt, r.ratio, r.bound, r.tsp_over_sdp);
            }
            s
        }
        Format::Json => to_json(&rows),
        Format::Text => {
            let mut s = String::new();
            for r in &rows {
                let _ = writeln!(s, "{:>5} {:>22} {:>22}", r.n, r.sdp_cost, r.tsp_over_sdp);
            }
            s
        }
    };
    emit(&text, out)?;
    Ok(if feasible && increasing { 0 } else { EXIT_CLAIM })
}

fn cmd_kcycle(k: usize, c: usize, tol: f64, seed: u64, out: Option<&Path>) -> Result<u8, Failure> {
    let mut cert = build_kcycle_certificate(k, c, tol)?;
    cert.seed = seed;
    emit(&to_json(&cert), out)?;
    Ok(if cert.feasible { 0 } else { EXIT_CLAIM })
}

fn cmd_verify(manifest: &Path, tol: f64, out: Option<&Path>) -> Result<u8, Failure> {
    let sol = read_solution(manifest)?;
    let inst = SdpInstance::new(cut_cost_matrix(sol.n())?)?;
    let report = verify_feasibility(&inst, &sol, tol)?;
    emit(&to_json(&report), out)?;
    Ok(if report.feasible { 0 } else { EXIT_INVARIANT })
}

fn cmd_checks(suite: &str, seed: u64, out: Option<&Path>) -> Result<u8, Failure> {
    let suite: Suite = suite
        .parse()
        .map_err(|_| Failure::Usage(format!("unknown suite {suite:?}; expected one of {}", Suite::NAMES.join(", "))))?;
    let summary = run_suite(suite, seed);
    emit(&to_json(&summary), out)?;
    if let Some(name) = &summary.first_failure {
        eprintln!("invariant failed: {name}");
        return Ok(EXIT_INVARIANT);
    }
    Ok(0)
}

fn cmd_export(n: usize, kind: ExportKind, out: &Path) -> Result<u8, Failure> {
    std::fs::create_dir_all(out).map_err(|e| Failure::Core(e.into()))?;
    match kind {
        ExportKind::Witness => {
            let path = write_solution(&expand_family(&analytic_a(n)?), out, &format!("witness_n{n}"))?;
            println!("{}", path.display());
        }
        ExportKind::Cycle => {
            let path = write_solution(&cycle_solution(n)?, out, &format!("cycle_n{n}"))?;
            println!("{}", path.display());
        }
        ExportKind::QInverse => {
            let q = QMatrix::new(n)?;
            let inv = q_inverse_closed_form(&q)?;
            let q_path = out.join(format!("q_n{n}.csv"));
            let inv_path = out.join(format!("q_inverse_n{n}.csv"));
            write_csv(q.entries(), &q_path)?;
            write_csv(&inv, &inv_path)?;
            println!("{}\n{}", q_path.display(), inv_path.display());
        }
    }
    Ok(0)
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Witness { n, tol, seed, out, format } => cmd_witness(n, tol, seed, out.as_deref(), format),
        Command::GapTable { n_min, n_max, tol, out, format } => cmd_gap_table(n_min, n_max, tol, out.as_deref(), format),
        Command::Kcycle { k, c, tol, seed, out } => cmd_kcycle(k, c, tol, seed, out.as_deref()),
        Command::Verify { manifest, tol, out } => cmd_verify(&manifest, tol, out.as_deref()),
        Command::Checks { suite, seed, out } => cmd_checks(&suite, seed, out.as_deref()),
        Command::Export { n, kind, out } => cmd_export(n, kind, &out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
