//! Command-line interface over JSON files.
//!
//! Exit codes: 0 success, 1 failed verification assertions, 2 parse/IO
//! errors, 3 mathematical precondition failures (non-ample divisor,
//! invalid fan or family, rank out of range).

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::Serialize;

use klyachko::construction::{build_stable_family, verify_construction, verify_rank2_optimality};
use klyachko::degree::PolarisedDivisor;
use klyachko::error::Error;
use klyachko::fan::Fan;
use klyachko::filtration::FiltrationFamily;
use klyachko::freeness::{is_compatible, singular_locus};
use klyachko::json::{
    CertificateOut, ConstructionOut, DegreesOut, DivisorJson, FamilyJson, FanJson, FreenessOut,
    InvariantsOut, OptimalityOut, ValidateOut, VerdictOut,
};
use klyachko::stability::{check_stability_with_cap, DEFAULT_CLOSURE_CAP};

/// Environment variable supplying the default worker thread count.
const THREADS_ENV: &str = "KLYACHKO_THREADS";

#[derive(Parser)]
#[command(
    name = "klyachko",
    version,
    about = "Stability and local freeness of equivariant reflexive sheaves on toric varieties"
)]
struct Cli {
    /// Worker threads (default: KLYACHKO_THREADS, then all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write the JSON report to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Report smoothness and completeness of a fan.
    ValidateFan {
        #[arg(long)]
        fan: PathBuf,
    },
    /// Per-ray intersection degrees of an ample divisor.
    Degrees {
        #[arg(long)]
        fan: PathBuf,
        #[arg(long)]
        divisor: PathBuf,
    },
    /// Weighted jump sums, first Chern class and slope of a family.
    Slope {
        #[arg(long)]
        fan: PathBuf,
        #[arg(long)]
        divisor: PathBuf,
        #[arg(long)]
        family: PathBuf,
    },
    /// Decide slope stability of a family.
    CheckStability {
        #[arg(long)]
        fan: PathBuf,
        #[arg(long)]
        divisor: PathBuf,
        #[arg(long)]
        family: PathBuf,
        /// Closure passes for non-line-type candidate enumeration.
        #[arg(long, default_value_t = DEFAULT_CLOSURE_CAP)]
        cap: usize,
    },
    /// Decide local freeness on the maximal cones.
    CheckFree {
        #[arg(long)]
        fan: PathBuf,
        #[arg(long)]
        family: PathBuf,
        /// Include a splitting certificate per maximal cone.
        #[arg(long)]
        emit_certificates: bool,
    },
    /// Per-cone compatibility, minimal incompatible cones, singular locus.
    SingularLocus {
        #[arg(long)]
        fan: PathBuf,
        #[arg(long)]
        family: PathBuf,
    },
    /// Build the stable rank-r family of a polarised fan.
    BuildEr {
        #[arg(long)]
        fan: PathBuf,
        #[arg(long)]
        divisor: PathBuf,
        #[arg(long)]
        rank: usize,
    },
    /// Verify the stable-family construction for every admissible rank.
    VerifyTheorem {
        #[arg(long)]
        fan: PathBuf,
        #[arg(long)]
        divisor: PathBuf,
    },
    /// Verify rank-2 singular-locus optimality on projective n-space.
    VerifyProp32 {
        #[arg(long)]
        n: usize,
    },
}

enum AppError {
    /// Unreadable or unparsable input (exit 2).
    Parse(String),
    /// Mathematical precondition failure (exit 3).
    Math(Error),
}

impl From<Error> for AppError {
    fn from(e: Error) -> Self {
        AppError::Math(e)
    }
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, AppError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| AppError::Parse(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| AppError::Parse(format!("{}: {e}", path.display())))
}

fn load_fan(path: &Path) -> Result<Fan, AppError> {
    Ok(read_json::<FanJson>(path)?.to_fan()?)
}

fn load_divisor(fan: &Fan, path: &Path) -> Result<PolarisedDivisor, AppError> {
    let json: DivisorJson = read_json(path)?;
    Ok(PolarisedDivisor::new(fan, json.coeffs)?)
}

fn load_family(path: &Path) -> Result<FiltrationFamily, AppError> {
    Ok(read_json::<FamilyJson>(path)?.to_family()?)
}

fn emit<T: Serialize>(out: &Option<PathBuf>, report: &T) -> Result<(), AppError> {
    let mut text = serde_json::to_string_pretty(report)
        .map_err(|e| AppError::Parse(format!("serialization: {e}")))?;
    text.push('\n');
    match out {
        None => {
            print!("{text}");
            Ok(())
        }
        Some(path) => std::fs::write(path, text)
            .map_err(|e| AppError::Parse(format!("{}: {e}", path.display()))),
    }
}

fn run(cli: Cli) -> Result<u8, AppError> {
    match cli.command {
        Command::ValidateFan { fan } => {
            let fan = load_fan(&fan)?;
            let report = fan.validate()?;
            emit(&cli.out, &ValidateOut::new(&report))?;
            Ok(0)
        }
        Command::Degrees { fan, divisor } => {
            let fan = load_fan(&fan)?;
            let div = load_divisor(&fan, &divisor)?;
            emit(&cli.out, &DegreesOut::new(&div.degree_vector()))?;
            Ok(0)
        }
        Command::Slope { fan, divisor, family } => {
            let fan = load_fan(&fan)?;
            let div = load_divisor(&fan, &divisor)?;
            let fam = load_family(&family)?;
            let record = fam.invariants(&div)?;
            emit(&cli.out, &InvariantsOut::new(&record))?;
            Ok(0)
        }
        Command::CheckStability {
            fan,
            divisor,
            family,
            cap,
        } => {
            let fan = load_fan(&fan)?;
            let div = load_divisor(&fan, &divisor)?;
            let fam = load_family(&family)?;
            let verdict = check_stability_with_cap(&fam, &div, cap)?;
            emit(&cli.out, &VerdictOut::new(&verdict))?;
            Ok(0)
        }
        Command::CheckFree {
            fan,
            family,
            emit_certificates,
        } => {
            let fan = load_fan(&fan)?;
            let fam = load_family(&family)?;
            let report = singular_locus(&fam, &fan)?;
            #[derive(Serialize)]
            struct CheckFreeOut {
                locally_free: bool,
                incompatible_cones: Vec<Vec<usize>>,
                #[serde(skip_serializing_if = "Option::is_none")]
                certificates: Option<Vec<CertificateOut>>,
            }
            let certificates = if emit_certificates {
                let mut certs = Vec::new();
                for cone in fan.max_cones() {
                    certs.push(CertificateOut::new(&is_compatible(&fam, cone)?));
                }
                Some(certs)
            } else {
                None
            };
            emit(
                &cli.out,
                &CheckFreeOut {
                    locally_free: report.locally_free,
                    incompatible_cones: report
                        .minimal_incompatible
                        .iter()
                        .map(|c| c.ray_indices().to_vec())
                        .collect(),
                    certificates,
                },
            )?;
            Ok(0)
        }
        Command::SingularLocus { fan, family } => {
            let fan = load_fan(&fan)?;
            let fam = load_family(&family)?;
            let report = singular_locus(&fam, &fan)?;
            emit(&cli.out, &FreenessOut::new(&report, true))?;
            Ok(0)
        }
        Command::BuildEr { fan, divisor, rank } => {
            let fan = load_fan(&fan)?;
            let div = load_divisor(&fan, &divisor)?;
            let example = build_stable_family(&fan, &div, rank)?;
            emit(&cli.out, &FamilyJson::from_example(&example))?;
            Ok(0)
        }
        Command::VerifyTheorem { fan, divisor } => {
            let fan = load_fan(&fan)?;
            let div = load_divisor(&fan, &divisor)?;
            let report = verify_construction(&fan, &div)?;
            emit(&cli.out, &ConstructionOut::new(&report))?;
            for row in &report.rows {
                eprintln!(
                    "rank {}: slope {}, {}, {}{} -> {}",
                    row.rank,
                    klyachko::json::fmt_rat(&row.slope),
                    if row.stable { "stable" } else { "NOT stable" },
                    match row.sing_dim {
                        None => "locally free".to_string(),
                        Some(s) => format!("sing dim {s}"),
                    },
                    if row.notes.is_empty() {
                        String::new()
                    } else {
                        format!(" ({})", row.notes.join("; "))
                    },
                    if row.pass { "pass" } else { "FAIL" },
                );
            }
            eprintln!(
                "verify-theorem: {}",
                if report.all_pass { "PASS" } else { "FAIL" }
            );
            Ok(u8::from(!report.all_pass))
        }
        Command::VerifyProp32 { n } => {
            let report = verify_rank2_optimality(n)?;
            emit(&cli.out, &OptimalityOut::new(&report))?;
            let sing = match report.sing_dim {
                None => "empty".to_string(),
                Some(s) => s.to_string(),
            };
            eprintln!(
                "dimension {}: sing dim {sing} (expected {}) -> {}",
                report.dim,
                report.expected,
                if report.pass { "pass" } else { "FAIL" },
            );
            Ok(u8::from(!report.pass))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = cli.threads.or_else(|| {
        std::env::var(THREADS_ENV)
            .ok()
            .and_then(|s| s.parse::<usize>().ok())
    });
    if let Some(t) = threads.filter(|&t| t > 0) {
        // Ignore failure: the global pool may already exist in tests.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global();
    }
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(AppError::Parse(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(AppError::Math(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}
