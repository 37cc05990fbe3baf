//! Problem and report documents (JSON).

use std::fmt;
use std::str::FromStr;

use keldysh_core::jet::recenter;
use keldysh_core::{Mat, MatrixJet, Scalar};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Rational,
    Float64,
}

impl FromStr for Field {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, ParseError> {
        match s.trim().to_ascii_lowercase().as_str() {
            "rational" => Ok(Field::Rational),
            "float64" | "f64" | "float" => Ok(Field::Float64),
            other => Err(ParseError(format!(
                "unknown backend {other:?} (expected rational or float64)"
            ))),
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Field::Rational => "rational",
            Field::Float64 => "float64",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    /// Coefficients of `λ^k`.
    #[default]
    Monomial,
    /// Coefficients of `(λ - λ₀)^k`.
    Centered,
}

/// A scalar as written in a file: a string such as `"3/4"`, `"-2"`,
/// `"0.125"`, `"1e-3"`, or a bare JSON number.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Text(String),
    Number(serde_json::Number),
}

impl Entry {
    pub fn rational(q: &BigRational) -> Self {
        Entry::Text(q.to_string())
    }

    pub fn to_rational(&self) -> Result<BigRational, ParseError> {
        match self {
            Entry::Text(s) => parse_rational(s),
            Entry::Number(n) => parse_rational(&n.to_string()),
        }
    }
}

impl From<i64> for Entry {
    fn from(v: i64) -> Self {
        Entry::Text(v.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Point {
    Fraction { num: Entry, den: Entry },
    Value(Entry),
}

impl Default for Point {
    fn default() -> Self {
        Point::Value(Entry::from(0))
    }
}

impl Point {
    pub fn to_rational(&self) -> Result<BigRational, ParseError> {
        match self {
            Point::Value(e) => e.to_rational(),
            Point::Fraction { num, den } => {
                let d = den.to_rational()?;
                if d.is_zero() {
                    return Err(ParseError("point has zero denominator".into()));
                }
                Ok(num.to_rational()? / d)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coefficient {
    pub power: usize,
    pub matrix: Vec<Vec<Entry>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemFile {
    pub field: Field,
    #[serde(default)]
    pub point: Point,
    pub size: usize,
    #[serde(default)]
    pub basis: Basis,
    pub coefficients: Vec<Coefficient>,
    pub truncation: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError(pub String);

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ParseError {}

/// Exact value of an integer, fraction, or decimal literal.
pub fn parse_rational(text: &str) -> Result<BigRational, ParseError> {
    let s = text.trim();
    let bad = || ParseError(format!("not a rational number: {text:?}"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((n, d)) = s.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
        let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
        if d.is_zero() {
            return Err(ParseError(format!("zero denominator in {text:?}")));
        }
        return Ok(BigRational::new(n, d));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty()
        || !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit())
    {
        return Err(bad());
    }
    let all: String = [int_part, frac_part].concat();
    let mut q = BigRational::from_integer(BigInt::from_str(&all).map_err(|_| bad())?);
    let shift = exponent - frac_part.len() as i32;
    let ten = BigRational::from_integer(BigInt::from(10));
    let factor = num_traits::pow(ten, shift.unsigned_abs() as usize);
    q = if shift >= 0 { q * factor } else { q / factor };
    Ok(if negative { -q } else { q })
}

impl ProblemFile {
    pub fn from_json(text: &str) -> Result<Self, ParseError> {
        let p: ProblemFile =
            serde_json::from_str(text).map_err(|e| ParseError(format!("invalid problem file: {e}")))?;
        p.validate()?;
        Ok(p)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    pub fn validate(&self) -> Result<(), ParseError> {
        if self.size == 0 {
            return Err(ParseError("size must be positive".into()));
        }
        if self.coefficients.is_empty() {
            return Err(ParseError("at least one coefficient is required".into()));
        }
        let mut seen = std::collections::BTreeSet::new();
        for c in &self.coefficients {
            if !seen.insert(c.power) {
                return Err(ParseError(format!("power {} listed twice", c.power)));
            }
            if c.matrix.len() != self.size || c.matrix.iter().any(|row| row.len() != self.size) {
                return Err(ParseError(format!(
                    "coefficient of power {} is not {}x{}",
                    c.power, self.size, self.size
                )));
            }
        }
        self.point.to_rational()?;
        Ok(())
    }

    /// Coefficients as exact polynomial matrices, indexed by power.
    pub fn polynomial(&self) -> Result<Vec<Mat<BigRational>>, ParseError> {
        let degree = self.coefficients.iter().map(|c| c.power).max().unwrap_or(0);
        let mut out = vec![Mat::zeros(self.size, self.size); degree + 1];
        for c in &self.coefficients {
            let m = &mut out[c.power];
            for (i, row) in c.matrix.iter().enumerate() {
                for (j, e) in row.iter().enumerate() {
                    m[(i, j)] = e.to_rational()?;
                }
            }
        }
        Ok(out)
    }

    /// Taylor jet at the point, truncated at `truncation`.
    pub fn jet<S: Scalar>(&self) -> Result<MatrixJet<S>, ParseError> {
        let poly: Vec<Mat<S>> = self
            .polynomial()?
            .iter()
            .map(|m| m.map_into(S::from_rational))
            .collect();
        let point = self.point.to_rational()?;
        let jet = match self.basis {
            Basis::Centered => MatrixJet::from_polynomial(poly, self.truncation),
            Basis::Monomial if point.is_zero() => MatrixJet::from_polynomial(poly, self.truncation),
            Basis::Monomial => recenter(&poly, &S::from_rational(&point), self.truncation),
        };
        jet.map_err(|e| ParseError(e.to_string()))
    }

    /// A centered problem with the given exact coefficients.
    pub fn centered(field: Field, point: &BigRational, coeffs: &[Mat<BigRational>], truncation: usize) -> Self {
        let size = coeffs.first().map_or(0, |c| c.rows());
        let coefficients = coeffs
            .iter()
            .enumerate()
            .filter(|(k, c)| *k == 0 || !c.is_zero())
            .map(|(power, c)| Coefficient {
                power,
                matrix: (0..c.rows())
                    .map(|i| (0..c.cols()).map(|j| Entry::rational(&c[(i, j)])).collect())
                    .collect(),
            })
            .collect();
        let point = if point.denom().is_one() {
            Point::Value(Entry::rational(point))
        } else {
            Point::Fraction {
                num: Entry::Text(point.numer().to_string()),
                den: Entry::Text(point.denom().to_string()),
            }
        };
        ProblemFile {
            field,
            point,
            size,
            basis: Basis::Centered,
            coefficients,
            truncation,
        }
    }
}

/// Rows of rendered scalars.
pub type Matrix = Vec<Vec<String>>;

pub fn matrix<S: Scalar>(m: &Mat<S>) -> Matrix {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| m[(i, j)].render()).collect())
        .collect()
}

pub fn jet_coefficients<S: Scalar>(j: &MatrixJet<S>) -> Vec<Matrix> {
    j.coeffs().iter().map(matrix).collect()
}

/// Reads a rendered matrix back as exact rationals.
pub fn parse_matrix(m: &Matrix) -> Result<Mat<BigRational>, ParseError> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    if m.iter().any(|r| r.len() != cols) {
        return Err(ParseError("ragged matrix".into()));
    }
    let mut out = Mat::zeros(rows, cols);
    for (i, row) in m.iter().enumerate() {
        for (j, e) in row.iter().enumerate() {
            out[(i, j)] = parse_rational(e)?;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructureReport {
    pub r: usize,
    pub s: usize,
    pub ell: Vec<usize>,
    pub m: Vec<usize>,
    pub alg_mult: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmithReport {
    /// All `n` exponents, nonincreasing.
    pub m: Vec<usize>,
    pub left: Vec<Matrix>,
    pub right: Vec<Matrix>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CanonicalReport {
    pub m: Vec<usize>,
    pub y: Vec<Matrix>,
    pub v: Vec<Matrix>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Term {
    /// `j` for the coefficient of `(λ - λ₀)^{-j}`.
    pub pole: usize,
    pub matrix: Matrix,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrincipalReport {
    pub route: String,
    /// Highest pole first.
    pub coefficients: Vec<Term>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealizationReport {
    pub a: Matrix,
    pub b: Matrix,
    pub c: Matrix,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub route: String,
    pub pass: bool,
    pub max_deviation: f64,
    /// `(j, row, col)`, 1-based.
    pub first_mismatch: Option<(usize, usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub regular_order: usize,
    pub comparisons: Vec<ComparisonReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub pass: bool,
    pub residual: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub name: String,
    pub pass: bool,
    pub residual: f64,
    pub checks: Vec<CheckReport>,
}

impl From<&keldysh_core::Certificate> for CertificateReport {
    fn from(c: &keldysh_core::Certificate) -> Self {
        let finite = |x: f64| if x.is_finite() { x } else { f64::MAX };
        CertificateReport {
            name: c.name.clone(),
            pass: c.pass(),
            residual: finite(c.residual()),
            checks: c
                .checks
                .iter()
                .map(|k| CheckReport {
                    name: k.name.clone(),
                    pass: k.pass,
                    residual: finite(k.residual),
                    detail: k.detail.clone(),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub command: String,
    /// Backend actually used.
    pub field: Field,
    pub problem: ProblemFile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub structure: Option<StructureReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub smith: Option<SmithReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub canonical: Option<CanonicalReport>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub principal: Vec<PrincipalReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub realization: Option<RealizationReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residue: Option<Matrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleReport>,
    #[serde(default)]
    pub certificates: Vec<CertificateReport>,
    pub pass: bool,
}

impl ReportFile {
    pub fn new(command: &str, field: Field, problem: ProblemFile) -> Self {
        ReportFile {
            command: command.into(),
            field,
            problem,
            structure: None,
            smith: None,
            canonical: None,
            principal: Vec::new(),
            realization: None,
            residue: None,
            oracle: None,
            certificates: Vec::new(),
            pass: true,
        }
    }

    pub fn from_json(text: &str) -> Result<Self, ParseError> {
        serde_json::from_str(text).map_err(|e| ParseError(format!("invalid report file: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    pub fn to_text(&self) -> String {
        use std::fmt::Write;
        let mut out = String::new();
        let _ = writeln!(out, "{} ({} backend)", self.command, self.field);
        if let Some(s) = &self.structure {
            let _ = writeln!(
                out,
                "structure: r = {}, s = {}, alg_mult = {}, ell = {:?}, m = {:?}",
                s.r, s.s, s.alg_mult, s.ell, s.m
            );
        }
        if let Some(s) = &self.smith {
            let _ = writeln!(out, "smith exponents: {:?}", s.m);
        }
        if let Some(c) = &self.canonical {
            let _ = writeln!(out, "canonical multiplicities: {:?}", c.m);
            write_coeffs(&mut out, "Y", &c.y);
            write_coeffs(&mut out, "V", &c.v);
        }
        for p in &self.principal {
            let _ = writeln!(out, "principal part ({}):", p.route);
            for t in &p.coefficients {
                let _ = writeln!(out, "  x^-{}:", t.pole);
                write_matrix(&mut out, &t.matrix, "    ");
            }
        }
        if let Some(r) = &self.realization {
            for (name, m) in [("A", &r.a), ("B", &r.b), ("C", &r.c)] {
                let _ = writeln!(out, "realization {name}:");
                write_matrix(&mut out, m, "  ");
            }
        }
        if let Some(r) = &self.residue {
            let _ = writeln!(out, "residue:");
            write_matrix(&mut out, r, "  ");
        }
        if let Some(o) = &self.oracle {
            let _ = writeln!(out, "oracle ({} regular terms):", o.regular_order);
            for c in &o.comparisons {
                let verdict = if c.pass { "pass" } else { "FAIL" };
                let _ = write!(
                    out,
                    "  {:<12} {verdict}  max deviation {:.3e}",
                    c.route, c.max_deviation
                );
                if let Some((j, r, k)) = c.first_mismatch {
                    let _ = write!(out, "  first mismatch R_{j}[{r},{k}]");
                }
                out.push('\n');
            }
        }
        for c in &self.certificates {
            let verdict = if c.pass { "pass" } else { "FAIL" };
            let _ = writeln!(out, "certificate {:<22} {verdict}  residual {:.3e}", c.name, c.residual);
            for k in c.checks.iter().filter(|k| !k.pass) {
                let _ = writeln!(out, "  failed: {} ({})", k.name, k.detail);
            }
        }
        let _ = writeln!(out, "result: {}", if self.pass { "pass" } else { "FAIL" });
        out
    }
}

fn write_coeffs(out: &mut String, name: &str, coeffs: &[Matrix]) {
    use std::fmt::Write;
    for (k, m) in coeffs.iter().enumerate() {
        if m.iter().flatten().all(|e| e == "0") {
            continue;
        }
        let _ = writeln!(out, "  {name}_{k}:");
        write_matrix(out, m, "    ");
    }
}

fn write_matrix(out: &mut String, m: &Matrix, indent: &str) {
    let width = m.iter().flatten().map(String::len).max().unwrap_or(1);
    for row in m {
        out.push_str(indent);
        out.push('[');
        let cells: Vec<String> = row.iter().map(|e| format!("{e:>width$}")).collect();
        out.push_str(&cells.join(" "));
        out.push_str("]\n");
    }
}
