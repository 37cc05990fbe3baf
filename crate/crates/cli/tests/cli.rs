use std::io::Write;
use std::path::PathBuf;
use std::process::{Command as Process, Output, Stdio};

use keldysh_cli::format::{parse_matrix, Basis, Coefficient, Entry, Point};
use keldysh_cli::{execute, generate, Command, Field, Method, ProblemFile, ReportFile, Settings};
use keldysh_core::{Mat, Tolerance};
use num_rational::BigRational;

type Q = BigRational;

fn q(n: i64, d: i64) -> Q {
    Q::new(n.into(), d.into())
}

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn running() -> ProblemFile {
    ProblemFile::from_json(&std::fs::read_to_string(data("running_example.json")).unwrap()).unwrap()
}

fn run_bin(args: &[&str], stdin: &str, backend: Option<&str>) -> Output {
    let mut cmd = Process::new(env!("CARGO_BIN_EXE_keldysh"));
    cmd.args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped());
    match backend {
        Some(b) => cmd.env("KELDYSH_BACKEND", b),
        None => cmd.env_remove("KELDYSH_BACKEND"),
    };
    let mut child = cmd.spawn().unwrap();
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

/// `diag(x, 1)` in the centered basis.
fn diag_x_1() -> ProblemFile {
    ProblemFile::centered(
        Field::Rational,
        &q(0, 1),
        &[Mat::from_i64(&[&[0, 0], &[0, 1]]), Mat::from_i64(&[&[1, 0], &[0, 0]])],
        3,
    )
}

fn principal(method: Method) -> Command {
    Command::Principal { method, verify: true }
}

#[test]
fn analyze_running_example() {
    let out = run_bin(&["analyze", data("running_example.json").to_str().unwrap()], "", None);
    assert_eq!(out.status.code(), Some(0));
    let report = ReportFile::from_json(&String::from_utf8(out.stdout).unwrap()).unwrap();
    let s = report.structure.unwrap();
    assert_eq!((s.r, s.s, s.alg_mult), (2, 2, 3));
    assert_eq!(s.m, vec![2, 1]);
    assert_eq!(report.smith.unwrap().m, vec![2, 1, 0]);
}

#[test]
fn principal_all_with_verification() {
    let settings = Settings {
        max_order: 1,
        ..Settings::default()
    };
    let report = execute(principal(Method::All), &running(), &settings).unwrap();
    assert!(report.pass);
    assert_eq!(report.principal.len(), 4);
    let r2 = Mat::from_i64(&[&[1, 0, 0], &[0, 0, 0], &[0, 0, 0]]);
    let r1 = Mat::from_i64(&[&[0, -1, 0], &[0, 1, 0], &[-1, 0, 0]]);
    for p in &report.principal {
        assert_eq!(p.coefficients[0].pole, 2);
        assert_eq!(parse_matrix(&p.coefficients[0].matrix).unwrap(), r2);
        assert_eq!(parse_matrix(&p.coefficients[1].matrix).unwrap(), r1);
    }
    let oracle = report.oracle.unwrap();
    assert!(oracle.comparisons.iter().all(|c| c.pass && c.max_deviation == 0.0));
    let real = report.realization.unwrap();
    assert_eq!(
        parse_matrix(&real.a).unwrap(),
        Mat::from_i64(&[&[0, 0, 0], &[1, 0, 0], &[0, 0, 0]])
    );
}

#[test]
fn semisimple_diagonal_every_method() {
    for method in [
        Method::Smith,
        Method::Keldysh,
        Method::Main,
        Method::Realization,
        Method::All,
    ] {
        let report = execute(principal(method), &diag_x_1(), &Settings::default()).unwrap();
        assert!(report.pass, "{method:?}");
        for p in &report.principal {
            assert_eq!(p.coefficients.len(), 1);
            assert_eq!(
                parse_matrix(&p.coefficients[0].matrix).unwrap(),
                Mat::from_i64(&[&[1, 0], &[0, 0]])
            );
        }
    }
    let report = execute(Command::Residue { verify: true }, &diag_x_1(), &Settings::default()).unwrap();
    assert!(report.pass);
    assert_eq!(
        parse_matrix(&report.residue.unwrap()).unwrap(),
        Mat::from_i64(&[&[1, 0], &[0, 0]])
    );
}

#[test]
fn exit_codes() {
    let running_text = running().to_json();
    assert_eq!(run_bin(&["residue"], &running_text, None).status.code(), Some(4));
    assert_eq!(run_bin(&["analyze"], "{ not json", None).status.code(), Some(1));
    assert_eq!(
        run_bin(&["analyze", "/nonexistent/file.json"], "", None).status.code(),
        Some(1)
    );
    assert_eq!(
        run_bin(&["--tol-abs", "-1", "analyze"], &running_text, None)
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        run_bin(&["analyze"], &running_text, Some("quaternion")).status.code(),
        Some(1)
    );

    let identity = ProblemFile::centered(Field::Rational, &q(0, 1), &[Mat::identity(2)], 3);
    assert_eq!(
        run_bin(&["principal"], &identity.to_json(), None).status.code(),
        Some(2)
    );

    let mut short = running();
    short.truncation = 2;
    let out = run_bin(&["analyze"], &short.to_json(), None);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("truncation"));
    short.truncation = 3;
    assert_eq!(run_bin(&["analyze"], &short.to_json(), None).status.code(), Some(3));
}

#[test]
fn report_round_trip_is_lossless() {
    let problem = generate(3, &[2, 1], 7, &q(-3, 7), None, Field::Rational).unwrap();
    let report = execute(Command::Verify, &problem, &Settings::default()).unwrap();
    assert!(report.pass);
    let text = report.to_json();
    let back = ReportFile::from_json(&text).unwrap();
    assert_eq!(back, report);
    assert_eq!(back.problem, problem);
    assert_eq!(back.to_json(), text);
    let again = execute(Command::Verify, &back.problem, &Settings::default()).unwrap();
    assert_eq!(again, report);
}

#[test]
fn generated_instances_are_recovered() {
    let gen = run_bin(&["--seed", "7", "generate", "3", "2,1"], "", None);
    assert_eq!(gen.status.code(), Some(0));
    let text = String::from_utf8(gen.stdout).unwrap();
    let out = run_bin(&["analyze"], &text, None);
    let report = ReportFile::from_json(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(report.structure.unwrap().m, vec![2, 1]);

    let scalar = generate(1, &[3], 0, &q(0, 1), None, Field::Rational).unwrap();
    let poly = scalar.polynomial().unwrap();
    assert!(poly[..3].iter().all(Mat::is_zero));
    assert!(!poly[3].is_zero());

    let semisimple = generate(4, &[1, 1], 5, &q(0, 1), None, Field::Rational).unwrap();
    let report = execute(Command::Residue { verify: true }, &semisimple, &Settings::default()).unwrap();
    assert!(report.pass);
}

#[test]
fn backend_override_and_text_output() {
    let path = data("running_example.json");
    let out = run_bin(
        &["--format", "text", "principal", "--verify", path.to_str().unwrap()],
        "",
        Some("float64"),
    );
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("float64 backend"));
    assert!(text.contains("result: pass"));

    let mut p = running();
    p.field = Field::Float64;
    let report = execute(
        principal(Method::All),
        &p,
        &Settings {
            backend: Some(Field::Rational),
            ..Settings::default()
        },
    )
    .unwrap();
    assert_eq!(report.field, Field::Rational);
}

#[test]
fn monomial_basis_away_from_zero() {
    // T(λ) = diag(λ - 1/2, λ² + 1) at λ₀ = 1/2
    let e = |v: i64| Entry::from(v);
    let problem = ProblemFile {
        field: Field::Rational,
        point: Point::Fraction { num: e(1), den: e(2) },
        size: 2,
        basis: Basis::Monomial,
        coefficients: vec![
            Coefficient {
                power: 0,
                matrix: vec![vec![Entry::Text("-1/2".into()), e(0)], vec![e(0), e(1)]],
            },
            Coefficient {
                power: 1,
                matrix: vec![vec![e(1), e(0)], vec![e(0), e(0)]],
            },
            Coefficient {
                power: 2,
                matrix: vec![vec![e(0), e(0)], vec![e(0), e(1)]],
            },
        ],
        truncation: 3,
    };
    let report = execute(Command::Residue { verify: true }, &problem, &Settings::default()).unwrap();
    assert!(report.pass);
    assert_eq!(
        parse_matrix(&report.residue.unwrap()).unwrap(),
        Mat::from_i64(&[&[1, 0], &[0, 0]])
    );

    let mut float = problem.clone();
    float.field = Field::Float64;
    let settings = Settings {
        tol: Tolerance::new(1e-12, 1e-9),
        ..Settings::default()
    };
    let report = execute(principal(Method::All), &float, &settings).unwrap();
    assert!(report.pass);
}
