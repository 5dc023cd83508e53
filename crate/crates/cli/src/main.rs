use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use modinv::formchar::{self, FormalCharacter};
use modinv::inertia::{self, TameCharacter, TameRep};
use modinv::lierank::{self, LieFactorDescriptor};
use modinv::nori::{self, MatrixGroup, ScanMode, Thresholds};
use modinv::sysharness::{self, SystemBundle};

#[derive(Debug, Error)]
enum CliError {
    #[error("cli: cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cli: cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("cli: {path} does not match the expected schema: {source}")]
    Schema { path: PathBuf, source: serde_json::Error },
    #[error("cli: {0}")]
    Usage(String),
    #[error(transparent)]
    Nori(#[from] nori::NoriError),
    #[error(transparent)]
    Formchar(#[from] formchar::FormcharError),
    #[error(transparent)]
    LieRank(#[from] lierank::LieRankError),
    #[error(transparent)]
    Inertia(#[from] inertia::InertiaError),
    #[error(transparent)]
    Sys(#[from] sysharness::SysError),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    Auto,
    Exhaustive,
    Scan,
}

impl From<Mode> for ScanMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Auto => ScanMode::Auto,
            Mode::Exhaustive => ScanMode::Exhaustive,
            Mode::Scan => ScanMode::Scan,
        }
    }
}

/// Mod-ℓ monodromy invariants of finite matrix groups.
#[derive(Debug, Parser)]
#[command(name = "modinv", version)]
struct Cli {
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Override the working threshold ell_min(N).
    #[arg(long = "ell-min", global = true)]
    ell_min: Option<u64>,
    #[arg(long, global = true, value_enum, default_value_t = Mode::Auto)]
    mode: Mode,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Envelope of a group given as JSON {n, ell, generators, label}.
    Envelope {
        #[arg(long = "in")]
        input: PathBuf,
        /// Also compare the points of the envelope with their order-ℓ part.
        #[arg(long)]
        quotient: bool,
    },
    /// Canonical formal character of a weight matrix {n, weights}.
    Formchar {
        #[arg(long = "in")]
        input: PathBuf,
        /// Second weight matrix to compare against; exit 1 when different.
        #[arg(long)]
        compare: Option<PathBuf>,
    },
    /// Ranks from a list of composition-factor descriptors.
    Rank {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Tame-inertia character tools.
    Tame {
        #[command(subcommand)]
        op: TameOp,
    },
    /// Check declared characteristic polynomials of a bundle.
    CompatCheck {
        #[arg(long)]
        bundle: PathBuf,
    },
    /// Compare envelope invariants across the primes of a bundle.
    Independence {
        #[arg(long)]
        bundle: PathBuf,
    },
    /// Emit a catalog fixture.
    Fixtures {
        /// Fixture name; `list` prints the catalog.
        name: String,
        /// Comma-separated primes (default: the window up to 31).
        #[arg(long, value_delimiter = ',')]
        primes: Vec<u64>,
    },
}

#[derive(Debug, Subcommand)]
enum TameOp {
    /// Characters of a tame representation {ell, level, generator_image}.
    Decompose {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// ℓ-restricted digits of an exponent.
    Digits {
        #[arg(long)]
        ell: u64,
        #[arg(long)]
        level: u32,
        #[arg(long, allow_hyphen_values = true)]
        exponent: i128,
    },
    /// Digits after raising to a higher level.
    Raise {
        #[arg(long)]
        ell: u64,
        #[arg(long)]
        level: u32,
        #[arg(long, allow_hyphen_values = true)]
        exponent: i128,
        #[arg(long)]
        target: u32,
    },
    /// Audit the characters of a representation against the digit bound e·i.
    Serre {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        e: u64,
        #[arg(long)]
        i: u64,
    },
}

#[derive(Serialize)]
struct Wrapped<'a, T: Serialize> {
    tool: &'a str,
    tool_version: &'a str,
    command: &'a str,
    seed: u64,
    report: T,
}

#[derive(Deserialize)]
struct WeightInput {
    n: usize,
    weights: Vec<Vec<i64>>,
}

#[derive(Serialize)]
struct FormcharReport {
    n: usize,
    weights: Vec<Vec<i64>>,
    annihilator: Vec<Vec<i64>>,
    formal_character: FormalCharacter,
    max_abs_weight: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    same_as_compare: Option<bool>,
}

#[derive(Serialize)]
struct RankOutput {
    descriptors: Vec<LieFactorDescriptor>,
    composition_factors: Vec<Vec<String>>,
    rank_report: lierank::RankReport,
}

#[derive(Serialize)]
struct EnvelopeOutput {
    envelope: nori::EnvelopeReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    quotient: Option<nori::QuotientCheck>,
}

#[derive(Serialize)]
struct DecomposeOutput {
    ell: u64,
    level: u32,
    characters: Vec<TameCharacter>,
}

#[derive(Serialize)]
struct DigitsOutput {
    ell: u64,
    level: u32,
    exponent: i128,
    character: TameCharacter,
}

/// Outcome of a command: the report and whether its verdict holds.
struct Outcome {
    command: &'static str,
    report: Value,
    verdict: bool,
    /// Emit the report without the tool/seed wrapper (input artifacts).
    raw: bool,
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    let schema = |source| CliError::Schema {
        path: path.to_path_buf(),
        source,
    };
    let mut v: Value = serde_json::from_str(&text).map_err(schema)?;
    // accept our own wrapped reports as input
    if v.get("tool").and_then(Value::as_str) == Some("modinv") {
        if let Some(inner) = v.get_mut("report") {
            v = inner.take();
        }
    }
    serde_json::from_value(v).map_err(schema)
}

fn to_value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("reports serialize")
}

fn thresholds(cli: &Cli) -> Thresholds {
    Thresholds {
        ell_min_override: cli.ell_min,
        ..Thresholds::default()
    }
}

fn read_tame(path: &Path) -> Result<TameRep, CliError> {
    let rep: TameRep = read_json(path)?;
    if rep.generator_image.data().iter().any(|x| *x >= rep.ell) {
        return Err(CliError::Usage(format!(
            "{}: matrix entries must be reduced mod {}",
            path.display(),
            rep.ell
        )));
    }
    Ok(rep)
}

fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let t = thresholds(cli);
    let mode: ScanMode = cli.mode.into();
    let out = match &cli.command {
        Command::Envelope { input, quotient } => {
            let g: MatrixGroup = read_json(input)?;
            let env = nori::analyze_group(&g, mode, cli.seed, &t)?;
            let quotient = if *quotient { Some(nori::quotient_check(&env, &t)?) } else { None };
            let verdict = quotient.as_ref().is_none_or(|q| q.pass);
            Outcome {
                command: "envelope",
                raw: false,
                report: to_value(&EnvelopeOutput {
                    envelope: env.report(),
                    quotient,
                }),
                verdict,
            }
        }
        Command::Formchar { input, compare } => {
            let w: WeightInput = read_json(input)?;
            let annihilator = formchar::annihilator_lattice(&w.weights, w.n)?;
            let fc = formchar::canonical_form(&annihilator, w.n)?;
            let same = match compare {
                Some(p) => {
                    let other: WeightInput = read_json(p)?;
                    let ofc = FormalCharacter::from_weights(&other.weights, other.n)?;
                    Some(formchar::same_formal_character(&fc, &ofc)?)
                }
                None => None,
            };
            let max_abs_weight = w.weights.iter().flatten().map(|x| x.unsigned_abs()).max().unwrap_or(0);
            Outcome {
                command: "formchar",
                raw: false,
                verdict: same.unwrap_or(true),
                report: to_value(&FormcharReport {
                    n: w.n,
                    weights: w.weights,
                    annihilator,
                    formal_character: fc,
                    max_abs_weight,
                    same_as_compare: same,
                }),
            }
        }
        Command::Rank { input } => {
            let descriptors: Vec<LieFactorDescriptor> = read_json(input)?;
            let composition_factors = descriptors
                .iter()
                .map(lierank::composition_factors)
                .collect::<Result<Vec<_>, _>>()?;
            Outcome {
                command: "rank",
                raw: false,
                verdict: true,
                report: to_value(&RankOutput {
                    rank_report: lierank::total_rank(&descriptors),
                    descriptors,
                    composition_factors,
                }),
            }
        }
        Command::Tame { op } => match op {
            TameOp::Decompose { input } => {
                let rep = read_tame(input)?;
                let characters = inertia::decompose_tame(&rep)?;
                Outcome {
                    command: "tame decompose",
                    raw: false,
                    verdict: true,
                    report: to_value(&DecomposeOutput {
                        ell: rep.ell,
                        level: rep.level,
                        characters,
                    }),
                }
            }
            TameOp::Digits { ell, level, exponent } => {
                check_tame_args(*ell, *level)?;
                Outcome {
                    command: "tame digits",
                    raw: false,
                    verdict: true,
                    report: to_value(&DigitsOutput {
                        ell: *ell,
                        level: *level,
                        exponent: *exponent,
                        character: TameCharacter::from_exponent(*exponent, *level, *ell),
                    }),
                }
            }
            TameOp::Raise {
                ell,
                level,
                exponent,
                target,
            } => {
                check_tame_args(*ell, *level)?;
                let c = TameCharacter::from_exponent(*exponent, *level, *ell);
                let raised = inertia::raise_level(&c, *target)?;
                Outcome {
                    command: "tame raise",
                    raw: false,
                    verdict: true,
                    report: to_value(&serde_json::json!({ "character": c, "raised": raised })),
                }
            }
            TameOp::Serre { input, e, i } => {
                let rep = read_tame(input)?;
                let chars = inertia::decompose_tame(&rep)?;
                let audit = inertia::check_serre_bound(&chars, *e, *i);
                Outcome {
                    command: "tame serre",
                    raw: false,
                    verdict: audit.pass,
                    report: to_value(&audit),
                }
            }
        },
        Command::CompatCheck { bundle } => {
            let b: SystemBundle = read_json(bundle)?;
            let r = sysharness::verify_compatibility(&b)?;
            Outcome {
                command: "compat-check",
                raw: false,
                verdict: r.pass,
                report: to_value(&r),
            }
        }
        Command::Independence { bundle } => {
            let b: SystemBundle = read_json(bundle)?;
            let r = sysharness::check_independence(&b, cli.seed, mode, &t)?;
            Outcome {
                command: "independence",
                raw: false,
                verdict: r.verdict,
                report: to_value(&r),
            }
        }
        Command::Fixtures { name, primes } => {
            let report = match name.as_str() {
                "list" => {
                    let mut names: Vec<&str> = sysharness::FIXTURES.to_vec();
                    names.push("tame-mult");
                    to_value(&names)
                }
                "tame-mult" => {
                    let ell = primes.first().copied().unwrap_or(7);
                    to_value(&inertia::multiplication_rep(ell, 2, 1)?)
                }
                _ => to_value(&sysharness::fixture(name, primes)?),
            };
            Outcome {
                command: "fixtures",
                verdict: true,
                report,
                raw: true,
            }
        }
    };
    Ok(out)
}

fn check_tame_args(ell: u64, level: u32) -> Result<(), CliError> {
    if !modinv::ff::is_prime(ell) || level == 0 {
        return Err(CliError::Usage(format!("need a prime ell and a positive level, got {ell}, {level}")));
    }
    Ok(())
}

/// Indented `key: value` rendering of a JSON report.
fn render_text(v: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                match x {
                    Value::Object(_) => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        render_text(x, indent + 1, out);
                    }
                    Value::Array(items) if items.iter().any(|i| i.is_object()) => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        for (i, item) in items.iter().enumerate() {
                            out.push_str(&format!("{pad}  [{i}]\n"));
                            render_text(item, indent + 2, out);
                        }
                    }
                    _ => out.push_str(&format!("{pad}{k}: {x}\n")),
                }
            }
        }
        _ => out.push_str(&format!("{pad}{v}\n")),
    }
}

fn emit(cli: &Cli, outcome: &Outcome) -> Result<(), CliError> {
    let wrapped = Wrapped {
        tool: "modinv",
        tool_version: env!("CARGO_PKG_VERSION"),
        command: outcome.command,
        seed: cli.seed,
        report: &outcome.report,
    };
    let value = if outcome.raw { outcome.report.clone() } else { to_value(&wrapped) };
    let text = match cli.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&value).expect("reports serialize");
            s.push('\n');
            s
        }
        Format::Text => {
            let mut s = String::new();
            render_text(&value, 0, &mut s);
            s
        }
    };
    match &cli.out {
        Some(path) => fs::write(path, text).map_err(|source| CliError::Write {
            path: path.clone(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli).and_then(|o| emit(&cli, &o).map(|_| o.verdict)) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(2)
        }
    }
}
