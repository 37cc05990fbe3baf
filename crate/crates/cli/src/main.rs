use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use keldysh_cli::commands::{EXIT_OK, EXIT_PARSE, EXIT_VERIFICATION};
use keldysh_cli::format::parse_rational;
use keldysh_cli::{execute, generate, CliError, Command, Field, Method, ProblemFile, Settings};
use keldysh_core::Tolerance;

/// Local pole structure of T(λ)⁻¹ at a singular point.
///
/// Exit codes: 0 ok, 1 parse error, 2 not singular at the point,
/// 3 insufficient truncation, 4 not semisimple, 5 verification failure.
#[derive(Debug, Parser)]
#[command(name = "keldysh", version)]
struct Cli {
    /// Absolute zero threshold (float backend).
    #[arg(long, global = true, default_value_t = Tolerance::DEFAULT_ABS, value_parser = nonnegative)]
    tol_abs: f64,
    /// Relative zero threshold (float backend).
    #[arg(long, global = true, default_value_t = Tolerance::DEFAULT_REL, value_parser = nonnegative)]
    tol_rel: f64,
    /// Regular terms of T⁻¹ computed by the oracle when verifying.
    #[arg(long, global = true, default_value_t = 0)]
    max_order: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Seed for `generate`.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the output here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Sub,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Smith,
    Keldysh,
    Main,
    Realization,
    All,
}

#[derive(Debug, Subcommand)]
enum Sub {
    /// Partial multiplicities, cross-checked against the local Smith form.
    Analyze { input: Option<PathBuf> },
    /// Local Smith factorization with its certificate.
    Smith { input: Option<PathBuf> },
    /// Right and left canonical systems of root functions.
    Canonical { input: Option<PathBuf> },
    /// Principal part of T⁻¹.
    Principal {
        input: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = MethodArg::All)]
        method: MethodArg,
        /// Compare against the adjugate/determinant oracle.
        #[arg(long)]
        verify: bool,
    },
    /// Residue of T⁻¹ at a semisimple point.
    Residue {
        input: Option<PathBuf>,
        #[arg(long)]
        verify: bool,
    },
    /// Planted instance with the given size and partial multiplicities.
    Generate {
        n: usize,
        #[arg(required = true, value_delimiter = ',')]
        m: Vec<usize>,
        #[arg(long, default_value = "0")]
        point: String,
        /// Defaults to a value sufficient for every command.
        #[arg(long)]
        truncation: Option<usize>,
        #[arg(long, default_value = "rational")]
        field: String,
    },
    /// Every construction, every certificate, and the oracle comparison.
    Verify { input: Option<PathBuf> },
}

fn nonnegative(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() && v >= 0.0 => Ok(v),
        _ => Err(format!("{s:?} is not a finite nonnegative number")),
    }
}

fn read_input(path: &Option<PathBuf>) -> Result<ProblemFile, CliError> {
    let text = match path {
        Some(p) if p.as_os_str() != "-" => std::fs::read_to_string(p)?,
        _ => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s)?;
            s
        }
    };
    Ok(ProblemFile::from_json(&text)?)
}

fn backend_override() -> Result<Option<Field>, CliError> {
    match std::env::var("KELDYSH_BACKEND") {
        Ok(v) if !v.trim().is_empty() => Ok(Some(v.parse()?)),
        _ => Ok(None),
    }
}

fn emit(cli: &Cli, text: &str) -> Result<(), CliError> {
    match &cli.output {
        Some(p) => std::fs::write(p, text)?,
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())?;
            if !text.ends_with('\n') {
                out.write_all(b"\n")?;
            }
        }
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<i32, CliError> {
    let settings = Settings {
        tol: Tolerance::new(cli.tol_abs, cli.tol_rel),
        max_order: cli.max_order,
        backend: backend_override()?,
    };
    let (cmd, input) = match &cli.command {
        Sub::Generate {
            n,
            m,
            point,
            truncation,
            field,
        } => {
            let point = parse_rational(point)?;
            let field = settings.backend.unwrap_or(field.parse()?);
            let problem = generate(*n, m, cli.seed, &point, *truncation, field)?;
            emit(cli, &problem.to_json())?;
            return Ok(EXIT_OK);
        }
        Sub::Analyze { input } => (Command::Analyze, input),
        Sub::Smith { input } => (Command::Smith, input),
        Sub::Canonical { input } => (Command::Canonical, input),
        Sub::Principal { input, method, verify } => {
            let method = match method {
                MethodArg::Smith => Method::Smith,
                MethodArg::Keldysh => Method::Keldysh,
                MethodArg::Main => Method::Main,
                MethodArg::Realization => Method::Realization,
                MethodArg::All => Method::All,
            };
            (
                Command::Principal {
                    method,
                    verify: *verify,
                },
                input,
            )
        }
        Sub::Residue { input, verify } => (Command::Residue { verify: *verify }, input),
        Sub::Verify { input } => (Command::Verify, input),
    };
    let problem = read_input(input)?;
    let report = execute(cmd, &problem, &settings)?;
    let text = match cli.format {
        Format::Json => report.to_json(),
        Format::Text => report.to_text(),
    };
    emit(cli, &text)?;
    Ok(if report.pass { EXIT_OK } else { EXIT_VERIFICATION })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let code = match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
