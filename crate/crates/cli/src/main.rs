use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use hypcert_core::certificate::{from_json, to_json};
use hypcert_core::compact::gen_compact_family;
use hypcert_core::geometry::{classify_pair, cosh_sq_formula};
use hypcert_core::interval::distance_interval;
use hypcert_core::noncompact::{decompose, gen_noncompact_family, gen_noncompact_from_targets};
use hypcert_core::rational::{parse_int, parse_lenient, rational_decimal};
use hypcert_core::report::{report, Format};
use hypcert_core::three_squares::{three_squares_decompose, DEFAULT_BUDGET};
use hypcert_core::verify::verify_all;
use hypcert_core::{Field, LorentzForm, Mode, NormalVector, PairClass, QuadElem, Rational};

const DEFAULT_WIDTH: &str = "1/1000000000000";

#[derive(Parser)]
#[command(name = "hypcert", version, about = "Exact certificates for families of ultraparallel hyperplane pairs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Analytic,
    Explicit,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Table,
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Noncompact family over the standard form with targets p^k, or an explicit smooth target list.
    GenNoncompact {
        #[arg(long, default_value_t = 3, env = "HYPCERT_N")]
        n: usize,
        #[arg(long, default_value_t = 2, env = "HYPCERT_PRIME")]
        prime: u64,
        #[arg(long, default_value_t = 10, env = "HYPCERT_KMAX")]
        kmax: u32,
        /// Comma-separated targets; replaces the p^k sequence.
        #[arg(long, env = "HYPCERT_TARGETS", requires = "smooth_bound")]
        targets: Option<String>,
        /// Smoothness bound T for --targets.
        #[arg(long, env = "HYPCERT_SMOOTH_BOUND")]
        smooth_bound: Option<u64>,
        #[arg(long, default_value = DEFAULT_WIDTH, env = "HYPCERT_WIDTH")]
        width: String,
        #[arg(long, env = "HYPCERT_OUT")]
        out: Option<PathBuf>,
    },
    /// Compact family over -sqrt5 x0^2 + x1^2 + ... + xn^2.
    GenCompact {
        #[arg(long, default_value = "6+sqrt5", env = "HYPCERT_RHO")]
        rho: String,
        #[arg(long, default_value_t = 1, env = "HYPCERT_KMIN")]
        kmin: u32,
        #[arg(long, default_value_t = 10, env = "HYPCERT_KMAX")]
        kmax: u32,
        #[arg(long, default_value_t = 4, env = "HYPCERT_N")]
        n: usize,
        #[arg(long, value_enum, default_value_t = ModeArg::Analytic, env = "HYPCERT_MODE")]
        mode: ModeArg,
        #[arg(long, default_value_t = DEFAULT_BUDGET, env = "HYPCERT_BUDGET")]
        budget: u64,
        #[arg(long, default_value = DEFAULT_WIDTH, env = "HYPCERT_WIDTH")]
        width: String,
        #[arg(long, env = "HYPCERT_OUT")]
        out: Option<PathBuf>,
    },
    /// Re-verify every certificate in a file.
    Verify {
        file: PathBuf,
        /// Print reports as JSON.
        #[arg(long, env = "HYPCERT_JSON")]
        json: bool,
    },
    /// Summarize a certificate file.
    Report {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = FormatArg::Table, env = "HYPCERT_FORMAT")]
        format: FormatArg,
    },
    /// Distance between the hyperplanes of two vectors under a diagonal form.
    Distance {
        /// Comma-separated diagonal coefficients, e.g. "-1,1,1,1".
        #[arg(long, env = "HYPCERT_FORM", allow_hyphen_values = true)]
        form: String,
        #[arg(long, allow_hyphen_values = true)]
        v: String,
        #[arg(long, allow_hyphen_values = true)]
        w: String,
        /// Field parameter d; omitted means the rationals.
        #[arg(long, env = "HYPCERT_D")]
        d: Option<u64>,
        #[arg(long, default_value = DEFAULT_WIDTH, env = "HYPCERT_WIDTH")]
        width: String,
    },
    /// Write a totally positive integer of Q(sqrt d) as a sum of three squares.
    ThreeSquares {
        #[arg(long, default_value_t = 5, env = "HYPCERT_D")]
        d: u64,
        #[arg(long, allow_hyphen_values = true)]
        eps: String,
        #[arg(long, default_value_t = DEFAULT_BUDGET, env = "HYPCERT_BUDGET")]
        budget: u64,
    },
    /// Write r = b^2 - 2c - 1 with minimal b.
    Decompose {
        #[arg(allow_hyphen_values = true)]
        r: String,
    },
}

fn parse_width(s: &str) -> Result<Rational> {
    parse_lenient(s).with_context(|| format!("invalid width {s:?}"))
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn parse_vector(s: &str, field: Field) -> Result<Vec<QuadElem>> {
    s.split(',')
        .map(|t| QuadElem::parse(t.trim(), field).with_context(|| format!("invalid entry {t:?}")))
        .collect()
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::GenNoncompact { n, prime, kmax, targets, smooth_bound, width, out } => {
            let width = parse_width(&width)?;
            let certs = match targets {
                Some(list) => {
                    let parsed = list
                        .split(',')
                        .map(|t| {
                            parse_int(t.trim())
                                .ok()
                                .and_then(|v| v.to_biguint())
                                .with_context(|| format!("invalid target {t:?}"))
                        })
                        .collect::<Result<Vec<_>>>()?;
                    let t = smooth_bound.context("--targets needs --smooth-bound")?;
                    gen_noncompact_from_targets(&parsed, t, n, &width)?
                }
                None => gen_noncompact_family(prime, kmax, n, &width)?,
            };
            emit(&to_json(&certs), out.as_ref())?;
        }
        Command::GenCompact { rho, kmin, kmax, n, mode, budget, width, out } => {
            let rho = QuadElem::parse(&rho, Field::sqrt5()).with_context(|| format!("invalid rho {rho:?}"))?;
            let mode = match mode {
                ModeArg::Analytic => Mode::Analytic,
                ModeArg::Explicit => Mode::Explicit,
            };
            let certs = gen_compact_family(&rho, kmin, kmax, n, mode, budget, &parse_width(&width)?)?;
            emit(&to_json(&certs), out.as_ref())?;
        }
        Command::Verify { file, json } => {
            let text = fs::read_to_string(&file).with_context(|| format!("reading {}", file.display()))?;
            let certs = match from_json(&text) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("malformed certificate file: {e}");
                    return Ok(ExitCode::from(1));
                }
            };
            if certs.is_empty() {
                eprintln!("no certificates in {}", file.display());
                return Ok(ExitCode::from(1));
            }
            let reports = verify_all(&certs);
            if json {
                println!("{}", serde_json::to_string_pretty(&reports)?);
            } else {
                for r in &reports {
                    print!("{r}");
                }
            }
            let failed: Vec<u32> = reports.iter().filter(|r| !r.overall).map(|r| r.k).collect();
            if failed.is_empty() {
                eprintln!("verified {} certificate(s)", reports.len());
            } else {
                for r in reports.iter().filter(|r| !r.overall) {
                    for c in r.failures() {
                        eprintln!("k={} failed check {}: {}", r.k, c.name, c.witness);
                    }
                }
                return Ok(ExitCode::from(1));
            }
        }
        Command::Report { file, format } => {
            let text = fs::read_to_string(&file).with_context(|| format!("reading {}", file.display()))?;
            let certs = from_json(&text)?;
            let format = match format {
                FormatArg::Table => Format::Table,
                FormatArg::Csv => Format::Csv,
                FormatArg::Json => Format::Json,
            };
            print!("{}", report(&certs, format)?);
        }
        Command::Distance { form, v, w, d, width } => {
            let field = match d {
                Some(d) => Field::quadratic(d)?,
                None => Field::Rational,
            };
            let form = LorentzForm::new(field, parse_vector(&form, field)?)?;
            let v = NormalVector::new(form.clone(), parse_vector(&v, field)?)?;
            let w = NormalVector::new(form, parse_vector(&w, field)?)?;
            let class = classify_pair(&v, &w)?;
            println!("class: {class}");
            if class == PairClass::Incident {
                return Ok(ExitCode::SUCCESS);
            }
            let c = cosh_sq_formula(&v, &w)?;
            let d = distance_interval(&c, &parse_width(&width)?)?;
            println!("cosh^2: {c}");
            println!("distance: [{}, {}]", rational_decimal(&d.lo, 15), rational_decimal(&d.hi, 15));
            println!("exact: [{}, {}]", d.lo, d.hi);
        }
        Command::ThreeSquares { d, eps, budget } => {
            let field = Field::quadratic(d)?;
            let eps = QuadElem::parse(&eps, field).with_context(|| format!("invalid element {eps:?}"))?;
            let g = three_squares_decompose(&eps, budget)?;
            println!("{} = ({})^2 + ({})^2 + ({})^2", eps, g[0], g[1], g[2]);
        }
        Command::Decompose { r } => {
            let r = parse_int(&r).with_context(|| format!("invalid integer {r:?}"))?;
            let dec = decompose(&r)?;
            println!("r={} b={} c={}", dec.r, dec.b, dec.c);
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
