//! Property tests over random jets and planted instances.

use keldysh_core::canonical::{decomposition_checks, multiplicity, right_canonical, unimodular_completion};
use keldysh_core::jet::{det_adj_jet, det_jet, recenter, unimodular_inverse};
use keldysh_core::oracle::{compare, laurent_inverse};
use keldysh_core::pipeline::{self, Options};
use keldysh_core::planted::planted_instance;
use keldysh_core::principal::{is_semisimple, residue_semisimple};
use keldysh_core::{analyze, conjugate_partition, local_smith, verify_smith, Jet, Mat, MatrixJet, Tolerance};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

type Q = BigRational;

fn tol() -> Tolerance {
    Tolerance::default()
}

fn q(v: i64) -> Q {
    Q::from_integer(BigInt::from(v))
}

fn jet_strategy(order: usize) -> impl Strategy<Value = Jet<Q>> {
    prop::collection::vec(-4i64..=4, order + 1).prop_map(|c| Jet::from_i64(&c))
}

fn matrix_jet_strategy(n: usize, order: usize) -> impl Strategy<Value = MatrixJet<Q>> {
    prop::collection::vec(prop::collection::vec(-3i64..=3, n * n), order + 1).prop_map(move |cs| {
        let coeffs = cs
            .into_iter()
            .map(|c| Mat::from_fn(n, n, |i, j| q(c[i * n + j])))
            .collect();
        MatrixJet::new(coeffs).unwrap()
    })
}

fn partition_strategy() -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(1usize..8, 1..6).prop_map(|mut p| {
        p.sort_unstable_by(|a, b| b.cmp(a));
        p
    })
}

/// `(n, m)` with `n ≤ 5`, `Σm ≤ 6`, at most `n` parts.
fn shape_strategy() -> impl Strategy<Value = (usize, Vec<usize>)> {
    (1usize..=5)
        .prop_flat_map(|n| (Just(n), prop::collection::vec(1usize..=4, 1..=n)))
        .prop_filter("Σm ≤ 6", |(_, m)| m.iter().sum::<usize>() <= 6)
}

/// Shapes with pole order at most 2.
fn low_pole_shape_strategy() -> impl Strategy<Value = (usize, Vec<usize>)> {
    (1usize..=5)
        .prop_flat_map(|n| (Just(n), prop::collection::vec(1usize..=2, 1..=n)))
        .prop_filter("Σm ≤ 6", |(_, m)| m.iter().sum::<usize>() <= 6)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn jet_ring_laws(a in jet_strategy(5), b in jet_strategy(5), c in jet_strategy(5)) {
        let ab = a.mul(&b).unwrap();
        prop_assert_eq!(&ab, &b.mul(&a).unwrap());
        prop_assert_eq!(ab.mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
        let lhs = a.mul(&b.add(&c).unwrap()).unwrap();
        let rhs = ab.add(&a.mul(&c).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
        prop_assert_eq!(a.sub(&a).unwrap(), Jet::zero(5));
    }

    #[test]
    fn unit_inverse(mut a in jet_strategy(6), lead in prop::sample::select(vec![-3i64, -1, 1, 2, 5])) {
        let mut c = a.clone().into_coeffs();
        c[0] = q(lead);
        a = Jet::new(c);
        let inv = a.inverse(&tol()).unwrap();
        prop_assert_eq!(a.mul(&inv).unwrap(), Jet::one(6));
    }

    #[test]
    fn adjugate_identity(m in (1usize..=3).prop_flat_map(|n| matrix_jet_strategy(n, 3))) {
        let (det, adj) = det_adj_jet(&m).unwrap();
        let n = m.rows();
        let mut det_i = MatrixJet::zeros(n, n, 3);
        for i in 0..n {
            det_i.set_entry(i, i, &det).unwrap();
        }
        prop_assert_eq!(adj.mul(&m).unwrap(), det_i.clone());
        prop_assert_eq!(m.mul(&adj).unwrap(), det_i);
        prop_assert_eq!(det_jet(&m).unwrap(), det);
    }

    #[test]
    fn determinant_is_multiplicative(
        (a, b) in (1usize..=3).prop_flat_map(|n| (matrix_jet_strategy(n, 2), matrix_jet_strategy(n, 2)))
    ) {
        let ab = a.mul(&b).unwrap();
        let lhs = det_jet(&ab).unwrap();
        let rhs = det_jet(&a).unwrap().mul(&det_jet(&b).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn recenter_round_trip(
        m in (1usize..=3).prop_flat_map(|n| matrix_jet_strategy(n, 3)),
        num in -5i64..=5,
        den in 1i64..=4,
    ) {
        let p = Q::new(num.into(), den.into());
        let there = recenter(m.coeffs(), &p, 3).unwrap();
        let back = recenter(there.coeffs(), &-p, 3).unwrap();
        prop_assert_eq!(back, m);
    }

    #[test]
    fn unimodular_inverse_is_two_sided(m in (1usize..=3).prop_flat_map(|n| matrix_jet_strategy(n, 3))) {
        let n = m.rows();
        let mut coeffs = m.coeffs().to_vec();
        coeffs[0] = Mat::identity(n);
        let u = MatrixJet::new(coeffs).unwrap();
        let inv = unimodular_inverse(&u, &tol()).unwrap();
        prop_assert_eq!(u.mul(&inv).unwrap(), MatrixJet::identity(n, 3));
        prop_assert_eq!(inv.mul(&u).unwrap(), MatrixJet::identity(n, 3));
    }

    #[test]
    fn conjugate_partition_is_an_involution(p in partition_strategy()) {
        let c = conjugate_partition(&p);
        prop_assert_eq!(c.iter().sum::<usize>(), p.iter().sum::<usize>());
        prop_assert_eq!(c.len(), p[0]);
        prop_assert_eq!(conjugate_partition(&c), p);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn planted_structure_is_recovered((n, m) in shape_strategy(), seed in any::<u64>()) {
        let inst = planted_instance(n, &m, seed).unwrap();
        let t = inst.jet::<Q>(inst.truncation);
        let st = analyze(&t, &tol()).unwrap();
        prop_assert_eq!(&st.m, &inst.m);
        prop_assert_eq!(st.alg_mult, inst.alg_mult());
        prop_assert_eq!(&st.ell, &conjugate_partition(&inst.m));
        let f = local_smith(&t, &tol()).unwrap();
        prop_assert_eq!(f.partial_multiplicities(), inst.m.clone());
        let cert = verify_smith(&t, &f, &tol());
        prop_assert!(cert.pass(), "{}", cert);
    }

    #[test]
    fn canonical_multiplicities_sum((n, m) in shape_strategy(), seed in any::<u64>()) {
        let inst = planted_instance(n, &m, seed).unwrap();
        let t = inst.jet::<Q>(inst.truncation);
        let st = analyze(&t, &tol()).unwrap();
        let y = right_canonical(&t, &st, &tol()).unwrap();
        let nus: Vec<usize> = (0..y.y.cols())
            .map(|i| multiplicity(&t, &y.y.column(i), &tol()).unwrap())
            .collect();
        prop_assert_eq!(nus, st.m.clone());
        let completed = unimodular_completion(&y.y.transpose(), &tol()).unwrap();
        prop_assert!(completed.is_unimodular(&tol()));
    }

    #[test]
    fn all_routes_match_oracle((n, m) in shape_strategy(), seed in any::<u64>()) {
        let inst = planted_instance(n, &m, seed).unwrap();
        let t = inst.jet::<Q>(inst.truncation);
        let a = pipeline::run(&t, &Options::default()).unwrap();
        for c in &a.certificates {
            prop_assert!(c.pass(), "{}", c);
        }
        let cert = decomposition_checks(&t, &a.right.y, &a.left.v, &a.structure.m, &tol());
        prop_assert!(cert.pass(), "{}", cert);
        let oracle = laurent_inverse(&t, 1, &tol()).unwrap();
        prop_assert!(oracle.self_check(&t, &tol()).pass);
        for p in &a.parts {
            let c = compare(&p.part, &oracle, &tol()).unwrap();
            prop_assert!(c.pass, "{}: {}", p.route, c);
        }
    }

    #[test]
    fn semisimple_verdict_matches_largest_multiplicity((n, m) in shape_strategy(), seed in any::<u64>()) {
        let inst = planted_instance(n, &m, seed).unwrap();
        let t = inst.jet::<Q>(inst.truncation);
        let w = is_semisimple(&t, &tol()).unwrap();
        prop_assert_eq!(w.semisimple, inst.pole_order() == 1);
        if w.semisimple {
            let res = residue_semisimple(&t, &tol()).unwrap();
            let oracle = laurent_inverse(&t, 0, &tol()).unwrap();
            prop_assert_eq!(res, oracle.principal_part().coefficient(1));
        }
    }

    #[test]
    fn float_backend_tracks_rational((n, m) in low_pole_shape_strategy(), seed in any::<u64>()) {
        let inst = planted_instance(n, &m, seed).unwrap();
        let exact = pipeline::run(&inst.jet::<Q>(inst.truncation), &Options::default()).unwrap();
        let float = pipeline::run(&inst.jet::<f64>(inst.truncation), &Options::default()).unwrap();
        prop_assert_eq!(&float.structure.m, &exact.structure.m);
        let reference: Vec<Mat<f64>> = exact.parts[0]
            .part
            .coeffs()
            .iter()
            .map(|c| c.map_into(|x| num_traits::ToPrimitive::to_f64(x).unwrap()))
            .collect();
        let scale = reference.iter().map(Mat::max_magnitude).fold(1.0, f64::max);
        for p in &float.parts {
            prop_assert_eq!(p.part.pole_order(), reference.len());
            for (got, want) in p.part.coeffs().iter().zip(&reference) {
                let dev = got.sub(want).unwrap().max_magnitude();
                prop_assert!(dev <= 1e-7 * scale, "{}: deviation {} at scale {}", p.route, dev, scale);
            }
        }
    }
}
