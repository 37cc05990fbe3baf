//! Acceptance run: one pass/fail line per criterion, nonzero exit on any
//! failure. Built with `harness = false` so the lines always print.

use std::path::PathBuf;
use std::process::{Command as Process, Stdio};
use std::time::{Duration, Instant};

use keldysh_cli::commands::{EXIT_NONSINGULAR, EXIT_NOT_SEMISIMPLE, EXIT_TRUNCATION};
use keldysh_cli::{execute, generate, Command, Field, Method, ProblemFile, Settings};
use keldysh_core::canonical::{decomposition_checks, multiplicity, right_canonical};
use keldysh_core::jet::MatrixJet;
use keldysh_core::oracle::{compare, laurent_inverse};
use keldysh_core::pipeline::{self, Options};
use keldysh_core::planted::{planted_instance, PlantedInstance};
use keldysh_core::principal::{
    biorthogonal_left, biorthogonal_right, is_semisimple, principal_keldysh, realization, residue_from_bases,
    residue_semisimple, BiorthogonalPair, Route,
};
use keldysh_core::{analyze, conjugate_partition, LaurentPart, Mat, Tolerance};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Q = BigRational;
type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn tol() -> Tolerance {
    Tolerance::default()
}

fn q(v: i64) -> Q {
    Q::from_integer(BigInt::from(v))
}

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn running_problem() -> ProblemFile {
    ProblemFile::from_json(&std::fs::read_to_string(data("running_example.json")).unwrap()).unwrap()
}

fn running_jet(order: usize) -> MatrixJet<Q> {
    MatrixJet::from_polynomial(
        vec![
            Mat::from_i64(&[&[0, 0, 0], &[0, 0, 0], &[0, 0, 1]]),
            Mat::from_i64(&[&[0, 0, 0], &[0, 1, 1], &[1, 0, 0]]),
            Mat::from_i64(&[&[1, 1, 0], &[1, 0, 0], &[0, 0, 0]]),
        ],
        order,
    )
    .unwrap()
}

fn jet(coeffs: &[&[&[i64]]], order: usize) -> MatrixJet<Q> {
    MatrixJet::from_polynomial(coeffs.iter().map(|c| Mat::from_i64(c)).collect(), order).unwrap()
}

fn expected_pp() -> LaurentPart<Q> {
    LaurentPart::from_descending(
        3,
        3,
        vec![
            Mat::from_i64(&[&[1, 0, 0], &[0, 0, 0], &[0, 0, 0]]),
            Mat::from_i64(&[&[0, -1, 0], &[0, 1, 0], &[-1, 0, 0]]),
        ],
        &tol(),
    )
    .unwrap()
}

/// Every `(n, m)` with `n ≤ 5`, `Σm ≤ 6`, `m` a partition with at most `n` parts.
fn shapes() -> Vec<(usize, Vec<usize>)> {
    fn partitions(total: usize, max: usize, out: &mut Vec<Vec<usize>>, cur: &mut Vec<usize>) {
        if total == 0 {
            out.push(cur.clone());
            return;
        }
        for p in (1..=total.min(max)).rev() {
            cur.push(p);
            partitions(total - p, p, out, cur);
            cur.pop();
        }
    }
    let mut all = Vec::new();
    for total in 1..=6 {
        let mut ps = Vec::new();
        partitions(total, total, &mut ps, &mut Vec::new());
        for n in 1..=5 {
            for p in &ps {
                if p.len() <= n {
                    all.push((n, p.clone()));
                }
            }
        }
    }
    all
}

fn instances(count: usize, filter: impl Fn(usize, &[usize]) -> bool) -> Vec<PlantedInstance> {
    let shapes: Vec<_> = shapes().into_iter().filter(|(n, m)| filter(*n, m)).collect();
    (0..count)
        .map(|i| {
            let (n, m) = &shapes[i % shapes.len()];
            planted_instance(*n, m, 1000 + i as u64).unwrap()
        })
        .collect()
}

fn timed(limit: Duration, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let out = f()?;
    let elapsed = start.elapsed();
    if elapsed > limit {
        return Err(format!("{out}; took {elapsed:.2?}, limit {limit:?}"));
    }
    Ok(format!("{out} in {elapsed:.2?}"))
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn running_structure() -> Outcome {
    timed(Duration::from_secs(1), || {
        let report = execute(Command::Analyze, &running_problem(), &Settings::default()).map_err(err)?;
        let s = report.structure.ok_or("no structure in report")?;
        ensure(
            (s.r, s.s, s.alg_mult) == (2, 2, 3) && s.ell == [2, 1] && s.m == [2, 1],
            || format!("got {s:?}"),
        )?;
        let smith = report.smith.ok_or("no smith section")?;
        ensure(smith.m == [2, 1, 0], || format!("smith exponents {:?}", smith.m))?;
        Ok("r=2 ell=(2,1) m=(2,1) s=2 alg_mult=3".into())
    })
}

fn running_principal() -> Outcome {
    timed(Duration::from_secs(1), || {
        let t = running_jet(6);
        let a = pipeline::run(&t, &Options::default()).map_err(err)?;
        let expected = expected_pp();
        for route in Route::ALL {
            let p = a.part(route).ok_or_else(|| format!("missing {route}"))?;
            ensure(p.part == expected, || format!("{route} gave {:?}", p.part))?;
        }
        Ok("smith, keldysh, main, realization all exact".into())
    })
}

fn running_realization() -> Outcome {
    let t = running_jet(6);
    let a = pipeline::run(&t, &Options::default()).map_err(err)?;
    let real = &a.realization;
    let r1 = expected_pp().coefficient(1);
    let r2 = expected_pp().coefficient(2);
    ensure(real.c.mul(&real.b).map_err(err)? == r1, || "C B != R_1".into())?;
    ensure(
        real.c.mul(&real.a).map_err(err)?.mul(&real.b).map_err(err)? == r2,
        || "C A B != R_2".into(),
    )?;
    ensure(real.a_power(2).is_zero(), || "A^2 != 0".into())?;

    let y_bar = jet(&[&[&[1, -1], &[0, 1], &[0, 0]], &[&[0, 0], &[0, 0], &[-1, 0]]], 6);
    let v = jet(&[&[&[1, 0, 0], &[0, 1, 0]]], 6);
    let pair = BiorthogonalPair::new(&t, y_bar, v, vec![2, 1], &tol()).map_err(err)?;
    let real = realization(&pair).map_err(err)?;
    ensure(real.a == Mat::from_i64(&[&[0, 0, 0], &[1, 0, 0], &[0, 0, 0]]), || {
        format!("A = {}", real.a)
    })?;
    ensure(real.b == Mat::from_i64(&[&[1, 0, 0], &[0, 0, 0], &[0, 1, 0]]), || {
        format!("B = {}", real.b)
    })?;
    ensure(real.c == Mat::from_i64(&[&[0, 1, -1], &[0, 0, 1], &[-1, 0, 0]]), || {
        format!("C = {}", real.c)
    })?;
    Ok("CB=R1, CAB=R2, A^2=0; normalized pair gives the reference A, B, C".into())
}

fn biorthogonal_reconstruction() -> Outcome {
    let t = running_jet(6);
    let y = keldysh_core::canonical::RightCanonical {
        y: jet(&[&[&[1, 0], &[0, 1], &[0, 0]], &[&[0, 0], &[0, 0], &[-1, 0]]], 6),
        m: vec![2, 1],
    };
    let v = keldysh_core::canonical::LeftCanonical {
        v: jet(&[&[&[1, 0, 0], &[0, 1, 0]]], 6),
        m: vec![2, 1],
    };
    let y_hat = biorthogonal_right(&t, &y, &v, &tol()).map_err(err)?;
    let expected = jet(
        &[&[&[1, -1], &[0, 1], &[0, 0]], &[&[0, 0], &[0, 0], &[-1, 1]]],
        y_hat.y.order(),
    );
    ensure(y_hat.y == expected, || format!("Ŷ = {:?}", y_hat.y))?;
    Ok("Ŷ = [[1,-1],[0,1],[-x,x]]".into())
}

fn planted_oracle() -> Outcome {
    timed(Duration::from_secs(60), || {
        let insts = instances(100, |_, _| true);
        for (k, inst) in insts.iter().enumerate() {
            let t = inst.jet::<Q>(inst.truncation);
            let ctx = |e: String| format!("instance {k} (n={}, m={:?}): {e}", inst.n, inst.m);
            // run() fails unless analyze and local_smith agree
            let a = pipeline::run(&t, &Options::default()).map_err(err).map_err(ctx)?;
            let (m, smith_m) = (&a.structure.m, a.smith.partial_multiplicities());
            ensure(*m == inst.m && smith_m == inst.m, || {
                ctx(format!("analyze {m:?}, smith {smith_m:?}"))
            })?;
            ensure(a.all_certificates_pass(), || ctx("a certificate failed".into()))?;
            let oracle = laurent_inverse(&t, 0, &tol()).map_err(err).map_err(ctx)?;
            for p in &a.parts {
                let c = compare(&p.part, &oracle, &tol()).map_err(err).map_err(ctx)?;
                ensure(c.pass && c.max_deviation == 0.0, || ctx(format!("{}: {c}", p.route)))?;
            }
        }
        Ok(format!("{} instances, 4 routes each, exact", insts.len()))
    })
}

fn random_poly(rng: &mut ChaCha8Rng, rows: usize, cols: usize, degree: usize, order: usize) -> MatrixJet<Q> {
    let coeffs = (0..=degree)
        .map(|_| {
            let mut m = Mat::zeros(rows, cols);
            for i in 0..rows {
                for j in 0..cols {
                    m[(i, j)] = q(rng.gen_range(-3..=3));
                }
            }
            m
        })
        .collect();
    MatrixJet::from_polynomial(coeffs, order).unwrap()
}

/// Unit lower triangular times unit upper triangular, random integer entries.
fn random_invertible(rng: &mut ChaCha8Rng, n: usize) -> Mat<Q> {
    let mut l = Mat::identity(n);
    let mut u = Mat::identity(n);
    for i in 0..n {
        for j in 0..i {
            l[(i, j)] = q(rng.gen_range(-2..=2));
            u[(j, i)] = q(rng.gen_range(-2..=2));
        }
    }
    l.mul(&u).unwrap()
}

fn property_suite() -> Outcome {
    const COUNT: usize = 60;
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let general = instances(COUNT, |_, _| true);
    let t_of = |inst: &PlantedInstance| inst.jet::<Q>(inst.truncation);

    let mut done = Vec::new();

    // conjugate partitions
    for inst in &general {
        let st = analyze(&t_of(inst), &tol()).map_err(err)?;
        ensure(
            st.ell == conjugate_partition(&st.m) && conjugate_partition(&st.ell) == st.m,
            || format!("m {:?} ell {:?}", st.m, st.ell),
        )?;
    }
    for _ in 0..COUNT {
        let mut p: Vec<usize> = (0..rng.gen_range(1..6)).map(|_| rng.gen_range(1..7)).collect();
        p.sort_unstable_by(|a, b| b.cmp(a));
        ensure(conjugate_partition(&conjugate_partition(&p)) == p, || format!("{p:?}"))?;
    }
    done.push("conjugate");

    // unimodular invariance of ell
    for (k, inst) in general.iter().enumerate() {
        let n = inst.n;
        let t = t_of(inst);
        let other = planted_instance(n, &[1], 5000 + k as u64).map_err(err)?;
        let e = MatrixJet::from_polynomial(other.left.clone(), t.order()).unwrap();
        let f = MatrixJet::from_polynomial(other.right.clone(), t.order()).unwrap();
        let moved = e.mul(&t).and_then(|et| et.mul(&f)).map_err(err)?;
        let a = analyze(&t, &tol()).map_err(err)?;
        let b = analyze(&moved, &tol()).map_err(err)?;
        ensure(a.ell == b.ell, || format!("ell {:?} vs {:?}", a.ell, b.ell))?;
    }
    done.push("invariance");

    // Σν = Σm for generated canonical systems
    for inst in &general {
        let t = t_of(inst);
        let st = analyze(&t, &tol()).map_err(err)?;
        let y = right_canonical(&t, &st, &tol()).map_err(err)?;
        let mut nus = Vec::new();
        for i in 0..y.y.cols() {
            nus.push(multiplicity(&t, &y.y.column(i), &tol()).map_err(err)?);
        }
        ensure(nus.iter().sum::<usize>() == st.alg_mult && nus == st.m, || {
            format!("ν {nus:?}, m {:?}", st.m)
        })?;
    }
    done.push("Σν=Σm");

    // biorthogonal V is unique modulo ΔH
    for inst in &general {
        let t = t_of(inst);
        let st = analyze(&t, &tol()).map_err(err)?;
        let y = right_canonical(&t, &st, &tol()).map_err(err)?;
        let v_hat = biorthogonal_left(&t, &y, &tol()).map_err(err)?;
        let base = BiorthogonalPair::new(&t, y.y.clone(), v_hat.v.clone(), st.m.clone(), &tol()).map_err(err)?;
        let h = random_poly(&mut rng, st.r, inst.n, 2, v_hat.v.order());
        let shifted = v_hat.v.add(&h.multiply_rows(&st.m)).map_err(err)?;
        let pair = BiorthogonalPair::new(&t, y.y.clone(), shifted, st.m.clone(), &tol())
            .map_err(|e| format!("V + ΔH rejected: {e}"))?;
        ensure(pair.normalized_v() == base.normalized_v(), || {
            "normalized V differs".into()
        })?;
        let a = principal_keldysh(&base, &tol()).map_err(err)?;
        let b = principal_keldysh(&pair, &tol()).map_err(err)?;
        ensure(a.part == b.part, || "principal part depends on H".into())?;
        let solved = biorthogonal_left(&t, &right_canonical(&t, &st, &tol()).map_err(err)?, &tol()).map_err(err)?;
        ensure(solved.v.truncate_rows(&st.m) == base.normalized_v(), || {
            "second solve differs".into()
        })?;
    }
    done.push("V mod ΔH");

    // direct-sum certificates
    for inst in &general {
        let t = t_of(inst);
        let a = pipeline::run(&t, &Options::default()).map_err(err)?;
        let cert = decomposition_checks(&t, &a.right.y, &a.left.v, &a.structure.m, &tol());
        ensure(cert.pass(), || cert.to_string())?;
    }
    done.push("direct sums");

    // semisimplicity tests agree with m_1 = 1
    let mixed = instances(COUNT, |_, m| m.len() > 1 || m[0] <= 2);
    let mut semisimple_seen = 0;
    for inst in &mixed {
        let t = t_of(inst);
        let w = is_semisimple(&t, &tol()).map_err(err)?;
        let expected = inst.m[0] == 1;
        semisimple_seen += usize::from(expected);
        ensure(
            w.semisimple == expected
                && w.direct_sum == expected
                && w.trivial_intersections == expected
                && w.l2_trivial == expected,
            || format!("m {:?}: {w:?}", inst.m),
        )?;
    }
    ensure(semisimple_seen > 0 && semisimple_seen < mixed.len(), || {
        "no variety".into()
    })?;
    done.push("semisimple");

    // residue is independent of the kernel bases
    let semisimple = instances(COUNT, |_, m| m[0] == 1);
    for inst in &semisimple {
        let t = t_of(inst);
        let w = is_semisimple(&t, &tol()).map_err(err)?;
        let res = residue_semisimple(&t, &tol()).map_err(err)?;
        let r = w.z_right.cols();
        let zl = random_invertible(&mut rng, r).mul(&w.z_left).unwrap();
        let zr = w.z_right.mul(&random_invertible(&mut rng, r)).unwrap();
        let other = residue_from_bases(&t, &zl, &zr, &tol()).map_err(err)?;
        ensure(other == res, || "residue changed with bases".into())?;
        let oracle = laurent_inverse(&t, 0, &tol()).map_err(err)?;
        ensure(oracle.principal_part().coefficient(1) == res, || {
            "residue differs from oracle".into()
        })?;
    }
    done.push("residue");

    Ok(format!(
        "{} properties x {COUNT} instances, exact: {}",
        done.len(),
        done.join(", ")
    ))
}

fn keldysh_binary() -> Process {
    Process::new(env!("CARGO_BIN_EXE_keldysh"))
}

fn exit_code(args: &[&str], stdin: &str) -> Result<i32, String> {
    use std::io::Write;
    let mut child = keldysh_binary()
        .args(args)
        .env_remove("KELDYSH_BACKEND")
        .stdin(Stdio::piped())
        .stdout(Stdio::null())
        .stderr(Stdio::null())
        .spawn()
        .map_err(err)?;
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).map_err(err)?;
    child
        .wait()
        .map_err(err)?
        .code()
        .ok_or_else(|| "killed by signal".into())
}

fn float_backend() -> Outcome {
    let insts = instances(20, |_, _| true);
    let mut worst = 0.0_f64;
    for (k, inst) in insts.iter().enumerate() {
        let t = inst.jet::<f64>(inst.truncation);
        let ctx = |e: String| format!("instance {k} (n={}, m={:?}): {e}", inst.n, inst.m);
        let a = pipeline::run(&t, &Options::default()).map_err(err).map_err(ctx)?;
        ensure(a.structure.m == inst.m, || ctx(format!("m = {:?}", a.structure.m)))?;
        let oracle = laurent_inverse(&t, 0, &tol()).map_err(err).map_err(ctx)?;
        for p in &a.parts {
            let c = compare(&p.part, &oracle, &tol()).map_err(err).map_err(ctx)?;
            ensure(c.max_deviation < 1e-8, || ctx(format!("{}: {c}", p.route)))?;
            worst = worst.max(c.max_deviation);
        }
    }

    let identity = ProblemFile::centered(Field::Rational, &q(0), &[Mat::identity(3)], 4).to_json();
    let code = exit_code(&["analyze"], &identity)?;
    ensure(code == EXIT_NONSINGULAR, || format!("nonsingular input exited {code}"))?;
    let mut short = running_problem();
    short.truncation = 2;
    let code = exit_code(&["analyze"], &short.to_json())?;
    ensure(code == EXIT_TRUNCATION, || format!("N=2 exited {code}"))?;
    let mut oracle_short = running_problem();
    oracle_short.truncation = 4;
    let code = exit_code(&["principal", "--verify"], &oracle_short.to_json())?;
    ensure(code == EXIT_TRUNCATION, || format!("oracle at N=4 exited {code}"))?;
    let code = exit_code(&["residue"], &running_problem().to_json())?;
    ensure(code == EXIT_NOT_SEMISIMPLE, || format!("residue exited {code}"))?;

    let planted = generate(4, &[2, 1], 3, &q(0), None, Field::Float64).map_err(err)?;
    let settings = Settings::default();
    let report = execute(
        Command::Principal {
            method: Method::All,
            verify: true,
        },
        &planted,
        &settings,
    )
    .map_err(err)?;
    ensure(report.pass, || "float CLI report failed".into())?;
    Ok(format!(
        "20 instances, max deviation {worst:.1e}; exit codes 2, 3, 3, 4 as designated"
    ))
}

fn main() {
    let criteria: [Criterion; 7] = [
        ("running-example structure", running_structure),
        ("running-example principal part", running_principal),
        ("running-example realization", running_realization),
        ("biorthogonal reconstruction", biorthogonal_reconstruction),
        ("planted-instance oracle equivalence", planted_oracle),
        ("property suite", property_suite),
        ("float backend sanity", float_backend),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("criterion {} {name}: PASS ({detail})", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} {name}: FAIL ({detail})", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
