//! Command-line front end: file ingestion, bound computation, oracle
//! verification, and CSV sweeps. Exit codes: 0 success, 2 input error,
//! 3 verification failure.

use crate::bounds::{als_bound, mixed_char_bound};
use crate::calculus::{apply_diffop, convolve};
use crate::error::Error;
use crate::matrices::{mixed_char_poly, HermitianMatrix, PSDDecomposition};
use crate::measures::expected_charpoly;
use crate::multiaffine::MultiAffinePoly;
use crate::paving::{paving_certificate, paving_search};
use crate::sweep::{run_sweep, SweepConfig};
use crate::uni::uni_max_root;
use crate::{io, verify};
use clap::{Args, Parser, Subcommand};
use num_rational::BigRational;
use std::path::{Path, PathBuf};

const ENSEMBLE_HELP: &str = "Random ensembles: PSD contractions are drawn as V diag(u) V* with \
Haar-random unitary V and u uniform in [0, 1], then blended toward the zero matrix (convex \
scaling) until every diagonal entry is within the --alpha budget.";

#[derive(Parser)]
#[command(
    name = "stable-calc",
    version,
    about = "Calculus of multiaffine real stable polynomials: convolutions, root-shift \
certificates, expected characteristic polynomials, matrix pavings",
    after_help = ENSEMBLE_HELP
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct OutArg {
    /// Write the result here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Convolve two multiaffine polynomial files.
    Conv {
        p: PathBuf,
        q: PathBuf,
        /// Exact rational arithmetic; accepts and emits "p/q" coefficients.
        #[arg(long)]
        exact: bool,
        #[command(flatten)]
        out: OutArg,
    },
    /// Apply the differential operator q(d/dz) to p.
    Apply {
        q: PathBuf,
        p: PathBuf,
        /// Exact rational arithmetic; accepts and emits "p/q" coefficients.
        #[arg(long)]
        exact: bool,
        #[command(flatten)]
        out: OutArg,
    },
    /// Certify a root-shift bound for q(d/dz) p from points above the
    /// roots of p and of the flip of q; exits 3 if the certificate fails
    /// its own probe.
    AlsBound {
        p: PathBuf,
        q: PathBuf,
        /// Point above the roots of p, comma-separated.
        #[arg(long, value_delimiter = ',', required = true)]
        a: Vec<f64>,
        /// Point above the roots of the flip of q, comma-separated.
        #[arg(long, value_delimiter = ',', required = true)]
        b: Vec<f64>,
        #[command(flatten)]
        out: OutArg,
    },
    /// Expected characteristic polynomial of a random principal
    /// submatrix: measure JSON (inline or @file) plus a matrix file.
    Expchar {
        /// Measure spec: inline JSON or a path to a JSON file.
        #[arg(long)]
        measure: String,
        /// Hermitian matrix file (JSON, or CSV for real symmetric).
        #[arg(long)]
        matrix: PathBuf,
        #[command(flatten)]
        out: OutArg,
    },
    /// Paving bounds for a PSD contraction, with exhaustive search when
    /// cheap (or forced by --search).
    Pave {
        /// Hermitian matrix file (JSON, or CSV for real symmetric).
        #[arg(long)]
        matrix: PathBuf,
        /// Number of blocks.
        #[arg(long)]
        r: usize,
        /// Restrict to blocks of equal size (dimension must divide by r).
        #[arg(long)]
        equal_size: bool,
        /// Always run the exhaustive search and print the best paving.
        #[arg(long)]
        search: bool,
        #[command(flatten)]
        out: OutArg,
    },
    /// Mixed characteristic polynomial of PSD matrices (repeat --matrix
    /// once per summand), with the analytic bounds when --eps/--r given.
    Mixed {
        /// PSD matrix file; repeat once per matrix.
        #[arg(long = "matrix", required = true)]
        matrices: Vec<PathBuf>,
        /// Check that the matrices sum to the identity.
        #[arg(long)]
        resolution: bool,
        /// Trace budget for the analytic bound table.
        #[arg(long)]
        eps: Option<f64>,
        /// Rank parameter for the analytic bound table.
        #[arg(long)]
        r: Option<u32>,
        #[command(flatten)]
        out: OutArg,
    },
    /// Run every oracle suite at the given size cap; exits 3 on any
    /// failure.
    Verify {
        /// Largest variable/matrix size exercised.
        #[arg(long, default_value_t = 6)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Randomized bound-vs-truth sweep emitting deterministic CSV.
    Sweep {
        /// Matrix sizes, comma-separated.
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
        /// Block counts, comma-separated.
        #[arg(long, value_delimiter = ',', required = true)]
        r: Vec<usize>,
        /// Diagonal budgets in [0, 1); 0 emits formula-only rows.
        #[arg(long, value_delimiter = ',', default_value = "0.2")]
        alpha: Vec<f64>,
        /// Instances per (n, r, alpha) combination.
        #[arg(long, default_value_t = 1)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: OutArg,
    },
}

fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::NotRealRooted { .. }
        | Error::ImaginaryResidue { .. }
        | Error::BoundViolation { .. }
        | Error::BracketFailure => 3,
        _ => 2,
    }
}

fn read_file(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|e| Error::Malformed {
        detail: format!("cannot read {}: {e}", path.display()),
    })
}

fn emit(text: &str, out: &OutArg) -> Result<(), Error> {
    match &out.out {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::Malformed {
            detail: format!("cannot write {}: {e}", path.display()),
        }),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn read_matrix(path: &Path) -> Result<HermitianMatrix, Error> {
    let text = read_file(path)?;
    if path.extension().is_some_and(|e| e == "csv") {
        io::matrix_from_csv(&text)
    } else {
        io::matrix_from_json(&text)
    }
}

fn read_ma(path: &Path) -> Result<MultiAffinePoly<f64>, Error> {
    io::ma_from_json(&read_file(path)?)
}

fn read_ma_exact(path: &Path) -> Result<MultiAffinePoly<BigRational>, Error> {
    io::ma_exact_from_json(&read_file(path)?)
}

fn measure_text(arg: &str) -> Result<String, Error> {
    let trimmed = arg.trim_start();
    if trimmed.starts_with('{') {
        Ok(arg.to_string())
    } else {
        read_file(Path::new(arg))
    }
}

fn dispatch(cmd: Cmd) -> Result<i32, Error> {
    match cmd {
        Cmd::Conv { p, q, exact, out } => {
            let text = if exact {
                let r = convolve(&read_ma_exact(&p)?, &read_ma_exact(&q)?)?;
                io::ma_exact_to_json(&r)
            } else {
                io::ma_to_json(&convolve(&read_ma(&p)?, &read_ma(&q)?)?)
            };
            emit(&text, &out)?;
            Ok(0)
        }
        Cmd::Apply { q, p, exact, out } => {
            let text = if exact {
                let r = apply_diffop(&read_ma_exact(&q)?, &read_ma_exact(&p)?)?;
                io::ma_exact_to_json(&r)
            } else {
                io::ma_to_json(&apply_diffop(&read_ma(&q)?, &read_ma(&p)?)?)
            };
            emit(&text, &out)?;
            Ok(0)
        }
        Cmd::AlsBound { p, q, a, b, out } => {
            let cert = als_bound(&read_ma(&p)?, &read_ma(&q)?, &a, &b)?;
            let verified = cert.verified;
            emit(&io::certificate_to_json(&cert), &out)?;
            Ok(if verified { 0 } else { 3 })
        }
        Cmd::Expchar { measure, matrix, out } => {
            let mu = io::measure_from_json(&measure_text(&measure)?)?;
            let a = read_matrix(&matrix)?;
            let chi = expected_charpoly(&mu, &a)?;
            let root = uni_max_root(&chi)?;
            let text = format!(
                "{{\n  \"coeffs\": {},\n  \"max_root\": {}\n}}",
                serde_json::to_string(chi.coeffs()).expect("serializable"),
                serde_json::to_string(&root).expect("serializable")
            );
            emit(&text, &out)?;
            Ok(0)
        }
        Cmd::Pave { matrix, r, equal_size, search, out } => {
            let a = read_matrix(&matrix)?;
            let report = paving_certificate(&a, r, equal_size)?;
            let text = if search {
                let paving = paving_search(&a, r, equal_size)?;
                format!(
                    "{{\n  \"report\": {},\n  \"paving\": {}\n}}",
                    io::report_to_json(&report),
                    io::paving_to_json(&paving)
                )
            } else {
                io::report_to_json(&report)
            };
            emit(&text, &out)?;
            Ok(0)
        }
        Cmd::Mixed { matrices, resolution, eps, r, out } => {
            let mats = matrices
                .iter()
                .map(|p| read_matrix(p))
                .collect::<Result<Vec<_>, _>>()?;
            let dec = PSDDecomposition::new(mats, resolution)?;
            let chi = mixed_char_poly(&dec)?;
            let root = uni_max_root(&chi)?;
            let bounds = match (eps, r) {
                (Some(e), Some(rk)) => Some(mixed_char_bound(e, rk)?),
                (None, None) => None,
                _ => {
                    return Err(Error::Domain("--eps and --r must be given together"));
                }
            };
            let mut text = format!(
                "{{\n  \"coeffs\": {},\n  \"max_root\": {}",
                serde_json::to_string(chi.coeffs()).expect("serializable"),
                serde_json::to_string(&root).expect("serializable")
            );
            if let Some(b) = bounds {
                text.push_str(&format!(
                    ",\n  \"exact_min\": {},\n  \"headline\": {},\n  \"mss_rank1\": {},\n  \"mss_general\": {}",
                    b.exact_min, b.headline, b.mss_rank1, b.mss_general
                ));
            }
            text.push_str("\n}");
            emit(&text, &out)?;
            Ok(0)
        }
        Cmd::Verify { n, seed } => {
            let outcomes = verify::run_all(n, seed);
            for o in &outcomes {
                println!("{}: {} cases, {} failures", o.name, o.cases, o.failures);
            }
            Ok(if verify::all_green(&outcomes) { 0 } else { 3 })
        }
        Cmd::Sweep { n, r, alpha, samples, seed, out } => {
            let cfg = SweepConfig {
                n_values: n,
                r_values: r,
                alpha_values: alpha,
                samples,
                seed,
            };
            let csv = run_sweep(&cfg)?;
            match &out.out {
                Some(path) => std::fs::write(path, &csv).map_err(|e| Error::Malformed {
                    detail: format!("cannot write {}: {e}", path.display()),
                })?,
                None => print!("{csv}"),
            }
            Ok(0)
        }
    }
}

/// Parses argv, configures the thread pool from STABLE_CALC_THREADS, and
/// runs the requested subcommand.
pub fn cmd_dispatch(argv: &[String]) -> i32 {
    #[cfg(feature = "parallel")]
    if let Ok(v) = std::env::var("STABLE_CALC_THREADS") {
        match v.parse::<usize>() {
            Ok(k) if k > 0 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(k).build_global();
            }
            _ => {
                eprintln!("error: STABLE_CALC_THREADS must be a positive integer");
                return 2;
            }
        }
    }
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // clap renders its own message; keep its exit code convention
            // of 0 for --help/--version and 2 for usage errors
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.cmd) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}
