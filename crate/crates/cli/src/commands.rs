use std::fmt;

use keldysh_core::canonical::{column_span_check, left_canonical, right_canonical, validate_left, validate_right};
use keldysh_core::pipeline::{self, principal_by, structure_and_smith, verify_against_oracle, Options};
use keldysh_core::planted::planted_instance;
use keldysh_core::principal::{residue_semisimple, PrincipalPart, Route};
use keldysh_core::{local_smith, verify_smith, Certificate, Error, LocalStructure, MatrixJet, Scalar, Tolerance};
use num_rational::BigRational;

use crate::format::*;

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 1;
pub const EXIT_NONSINGULAR: i32 = 2;
pub const EXIT_TRUNCATION: i32 = 3;
pub const EXIT_NOT_SEMISIMPLE: i32 = 4;
pub const EXIT_VERIFICATION: i32 = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Smith,
    Keldysh,
    Main,
    Realization,
    All,
}

impl Method {
    fn route(self) -> Option<Route> {
        match self {
            Method::Smith => Some(Route::Smith),
            Method::Keldysh => Some(Route::Keldysh),
            Method::Main => Some(Route::Main),
            Method::Realization => Some(Route::Realization),
            Method::All => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Analyze,
    Smith,
    Canonical,
    Principal { method: Method, verify: bool },
    Residue { verify: bool },
    Verify,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Analyze => "analyze",
            Command::Smith => "smith",
            Command::Canonical => "canonical",
            Command::Principal { .. } => "principal",
            Command::Residue { .. } => "residue",
            Command::Verify => "verify",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Settings {
    pub tol: Tolerance,
    /// Regular terms requested from the oracle.
    pub max_order: usize,
    /// Overrides the backend named in the file.
    pub backend: Option<Field>,
}

#[derive(Debug)]
pub enum CliError {
    Parse(ParseError),
    Core(Error),
    Io(std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) | CliError::Io(_) => EXIT_PARSE,
            CliError::Core(e) => exit_code_for(e),
        }
    }
}

pub fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::NotSingular => EXIT_NONSINGULAR,
        Error::InsufficientTruncation { .. } | Error::NotInvertibleWithinTruncation { .. } => EXIT_TRUNCATION,
        Error::NotSemisimple { .. } => EXIT_NOT_SEMISIMPLE,
        _ => EXIT_VERIFICATION,
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Parse(e) => write!(f, "parse error: {e}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<ParseError> for CliError {
    fn from(e: ParseError) -> Self {
        CliError::Parse(e)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

/// Runs `cmd` on `problem` with the backend chosen by `settings` or the file.
pub fn execute(cmd: Command, problem: &ProblemFile, settings: &Settings) -> Result<ReportFile, CliError> {
    problem.validate()?;
    let field = settings.backend.unwrap_or(problem.field);
    match field {
        Field::Rational => execute_with::<BigRational>(cmd, field, problem, settings),
        Field::Float64 => execute_with::<f64>(cmd, field, problem, settings),
    }
}

fn execute_with<S: Scalar>(
    cmd: Command,
    field: Field,
    problem: &ProblemFile,
    settings: &Settings,
) -> Result<ReportFile, CliError> {
    let t: MatrixJet<S> = problem.jet()?;
    let tol = &settings.tol;
    let opts = Options {
        tol: settings.tol,
        ..Options::default()
    };
    let mut report = ReportFile::new(cmd.name(), field, problem.clone());
    match cmd {
        Command::Analyze => {
            let (st, f) = structure_and_smith(&t, tol)?;
            report.structure = Some(structure_report(&st));
            report.smith = Some(SmithReport {
                m: f.m.clone(),
                left: Vec::new(),
                right: Vec::new(),
            });
        }
        Command::Smith => {
            let f = local_smith(&t, tol)?;
            report.certificates.push((&verify_smith(&t, &f, tol)).into());
            report.smith = Some(SmithReport {
                m: f.m.clone(),
                left: jet_coefficients(&f.left),
                right: jet_coefficients(&f.right),
            });
        }
        Command::Canonical => {
            let (st, _) = structure_and_smith(&t, tol)?;
            let y = right_canonical(&t, &st, tol)?;
            let v = left_canonical(&t, &st, tol)?;
            let mut cert = validate_right(&t, &y.y, &st.m, tol);
            cert.extend(validate_left(&t, &v.v, &st.m, tol));
            cert.push(column_span_check(&y.y, &st, tol));
            cert.name = "canonical".into();
            report.certificates.push((&cert).into());
            report.structure = Some(structure_report(&st));
            report.canonical = Some(CanonicalReport {
                m: st.m.clone(),
                y: jet_coefficients(&y.y),
                v: jet_coefficients(&v.v),
            });
        }
        Command::Principal { method, verify } => {
            let parts = match method.route() {
                Some(route) => {
                    let (part, certs) = principal_by(&t, route, &opts)?;
                    push_all(&mut report, &certs);
                    vec![part]
                }
                None => {
                    let a = pipeline::run(&t, &opts)?;
                    push_all(&mut report, &a.certificates);
                    report.structure = Some(structure_report(&a.structure));
                    report.realization = Some(RealizationReport {
                        a: matrix(&a.realization.a),
                        b: matrix(&a.realization.b),
                        c: matrix(&a.realization.c),
                    });
                    a.parts
                }
            };
            if verify {
                oracle_into(&mut report, &t, &parts, settings)?;
            }
            report.principal = parts.iter().map(principal_report).collect();
        }
        Command::Residue { verify } => {
            let res = residue_semisimple(&t, tol)?;
            if verify {
                let part = PrincipalPart {
                    route: Route::Oracle,
                    part: keldysh_core::LaurentPart::from_descending(res.rows(), res.cols(), vec![res.clone()], tol)?,
                };
                oracle_into(&mut report, &t, &[part], settings)?;
                if let Some(o) = report.oracle.as_mut() {
                    o.comparisons[0].route = "residue".into();
                }
            }
            report.residue = Some(matrix(&res));
        }
        Command::Verify => {
            let a = pipeline::run(&t, &opts)?;
            push_all(&mut report, &a.certificates);
            oracle_into(&mut report, &t, &a.parts, settings)?;
            report.structure = Some(structure_report(&a.structure));
            report.principal = a.parts.iter().map(principal_report).collect();
        }
    }
    report.pass = report.certificates.iter().all(|c| c.pass)
        && report
            .oracle
            .as_ref()
            .is_none_or(|o| o.comparisons.iter().all(|c| c.pass));
    Ok(report)
}

fn push_all(report: &mut ReportFile, certs: &[Certificate]) {
    report.certificates.extend(certs.iter().map(CertificateReport::from));
}

fn oracle_into<S: Scalar>(
    report: &mut ReportFile,
    t: &MatrixJet<S>,
    parts: &[PrincipalPart<S>],
    settings: &Settings,
) -> Result<(), CliError> {
    let (_, comparisons, cert) = verify_against_oracle(t, parts, settings.max_order, &settings.tol)?;
    report.certificates.push((&cert).into());
    report.oracle = Some(OracleReport {
        regular_order: settings.max_order,
        comparisons: comparisons
            .into_iter()
            .map(|(route, c)| ComparisonReport {
                route: route.name().into(),
                pass: c.pass,
                max_deviation: c.max_deviation,
                first_mismatch: c.first_mismatch.map(|(j, r, k)| (j, r + 1, k + 1)),
            })
            .collect(),
    });
    if parts.len() != report.oracle.as_ref().map_or(0, |o| o.comparisons.len()) {
        report.pass = false;
    }
    Ok(())
}

fn structure_report<S>(st: &LocalStructure<S>) -> StructureReport {
    StructureReport {
        r: st.r,
        s: st.s,
        ell: st.ell.clone(),
        m: st.m.clone(),
        alg_mult: st.alg_mult,
    }
}

fn principal_report<S: Scalar>(p: &PrincipalPart<S>) -> PrincipalReport {
    PrincipalReport {
        route: p.route.name().into(),
        coefficients: (1..=p.part.pole_order())
            .rev()
            .map(|j| Term {
                pole: j,
                matrix: matrix(&p.part.coefficient(j)),
            })
            .collect(),
    }
}

/// A planted problem with multiplicities `m` at `point`, in the centered basis.
pub fn generate(
    n: usize,
    m: &[usize],
    seed: u64,
    point: &BigRational,
    truncation: Option<usize>,
    field: Field,
) -> Result<ProblemFile, CliError> {
    let inst = planted_instance(n, m, seed)?;
    Ok(ProblemFile::centered(
        field,
        point,
        &inst.coeffs,
        truncation.unwrap_or(inst.truncation),
    ))
}
