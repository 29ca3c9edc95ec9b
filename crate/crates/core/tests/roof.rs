mod common;

use common::{b, q, roof};
use num_bigint::BigInt;
use proptest::prelude::*;
use specflow::flowlab::cocycle_holds;
use specflow::roof::{brute_force_p1, presets, WeakMixing};
use specflow::symreal::SymReal;
use specflow::Error;

#[test]
fn example1_values() {
    let f = roof("example1", "sqrt2m1");
    let bs = f.basis().clone();
    let one_plus_b = b(&bs, 1).add_rational(&q(1, 1));
    assert_eq!(f.value_at(&SymReal::zero()).unwrap(), &one_plus_b);
    assert_eq!(f.value_at(&SymReal::frac(1, 2)).unwrap(), &SymReal::int(1));
    assert_eq!(f.value_at(&SymReal::frac(1, 3)).unwrap(), &SymReal::int(1));
    // The jump at 0 is f(0⁻) − f(0⁺) = 1 − (1 + √3).
    assert_eq!(f.jumps()[0], b(&bs, -1));
}

#[test]
fn integrals() {
    let f = roof("example1", "sqrt2m1");
    let bs = f.basis().clone();
    assert_eq!(f.integral().unwrap(), &bs.sym("b", q(1, 3)).unwrap().add_rational(&q(1, 1)));
    let g = roof("p2_fail_values", "sqrt2m1");
    assert_eq!(g.integral().unwrap(), &bs.sym("b", q(3, 2)).unwrap());
    let h = roof("solvable_eigen", "sqrt2m1");
    assert_eq!(h.integral().unwrap(), &SymReal::lin_alpha(q(1, 1), q(1, 1)));
}

#[test]
fn integral_identity_on_all_presets() {
    for name in presets::NAMES {
        for alpha in ["golden", "sqrt2m1"] {
            let f = roof(name, alpha);
            let id = f.integral_identity().unwrap();
            let k = id.coefficients.expect("residual in the integer span of the jumps");
            assert_eq!(SymReal::combination_big(f.jumps(), &k), id.residual, "{name}");
        }
    }
}

#[test]
fn invalid_roofs_rejected() {
    let bs = common::basis("golden");
    let one = SymReal::int(1);
    let constant = specflow::roof::RoofPC::new(bs.clone(), vec![SymReal::zero()], vec![SymReal::zero()], one.clone());
    assert!(matches!(constant, Err(Error::InvalidRoof(_))));
    let unbalanced = specflow::roof::RoofPC::new(
        bs.clone(),
        vec![SymReal::zero(), SymReal::frac(1, 2)],
        vec![SymReal::int(1), SymReal::int(1)],
        SymReal::int(5),
    );
    assert!(matches!(unbalanced, Err(Error::InvalidRoof(_))));
    let negative = specflow::roof::RoofPC::new(
        bs,
        vec![SymReal::zero(), SymReal::frac(1, 2)],
        vec![SymReal::int(-2), SymReal::int(2)],
        SymReal::int(1),
    );
    assert!(matches!(negative, Err(Error::InvalidRoof(_))));
}

#[test]
fn birkhoff_basics() {
    let f = roof("example1", "golden");
    let x = SymReal::frac(1, 5);
    assert_eq!(f.birkhoff(&x, 0).unwrap(), SymReal::zero());
    assert_eq!(&f.birkhoff(&x, 1).unwrap(), f.value_at(&x).unwrap());
    let n = 7;
    let back = f.birkhoff(&x, -n).unwrap();
    assert_eq!(back, -&f.birkhoff(&f.rotate(&x, -n), n).unwrap());
}

#[test]
fn birkhoff_diff_agrees() {
    let f = roof("example1", "golden");
    let q6 = f.basis().ctx().q_u64(6).unwrap();
    let x = SymReal::frac(26, 100);
    let y = SymReal::frac(25, 100);
    let d = f.birkhoff_diff(&x, &y, q6).unwrap();
    let direct = &f.birkhoff(&x, q6 as i64).unwrap() - &f.birkhoff(&y, q6 as i64).unwrap();
    assert_eq!(d, direct);
    // Reversed orientation and wrapped arcs.
    let d2 = f.birkhoff_diff(&y, &SymReal::frac(9, 10), 40).unwrap();
    assert_eq!(d2, &f.birkhoff(&y, 40).unwrap() - &f.birkhoff(&SymReal::frac(9, 10), 40).unwrap());
    assert!(f.birkhoff_diff(&x, &x, 5).is_err());
    // In Σℤdᵢ.
    assert!(f.basis().integer_span(f.jumps(), &d).is_some());
}

#[test]
fn discontinuity_multisets() {
    let f = roof("example1", "sqrt2m1");
    let d1 = f.discontinuities(1).unwrap();
    assert_eq!(d1.iter().map(|p| p.point.clone()).collect::<Vec<_>>(), f.xi().to_vec());
    let a = f.discontinuity_audit(2).unwrap();
    assert_eq!(a.multiset_size, 4);
    assert_eq!(a.genuine(), 4);
    let expect = [
        SymReal::zero(),
        SymReal::lin_alpha(q(1, 1), q(-1, 1)),
        SymReal::frac(1, 3),
        SymReal::lin_alpha(q(4, 3), q(-1, 1)),
    ];
    for e in &expect {
        assert!(a.clusters.iter().any(|c| &c.point == e));
    }
    let g = roof("p1_fail_orbit", "sqrt2m1");
    let a = g.discontinuity_audit(2).unwrap();
    // ξ₂ − α = ξ₁, where the jumps −b and b cancel.
    assert_eq!(a.cancelled, vec![SymReal::zero()]);
}

#[test]
fn p1_genuine_discontinuities() {
    for alpha in ["golden", "sqrt2m1"] {
        let f = roof("example1", alpha);
        for n in [1u64, 5, 20, 50] {
            let a = f.discontinuity_audit(n).unwrap();
            assert_eq!(a.genuine(), 2 * n as usize);
        }
    }
}

fn big(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

#[test]
fn p1_verdicts() {
    let f = roof("example1", "sqrt2m1");
    let v = f.check_p1().unwrap();
    assert!(v.holds);
    assert_eq!(v.structure.classes_sim, vec![vec![0], vec![1]]);
    assert_eq!(v.structure.classes_q, vec![vec![0, 1]]);
    for name in ["p1_fail_orbit", "p1_fail_gamma"] {
        let g = roof(name, "sqrt2m1");
        let v = g.check_p1().unwrap();
        assert!(!v.holds);
        assert_eq!(v.witness, Some(big(&[1, 1])));
        assert!(SymReal::combination_big(g.jumps(), v.witness.as_ref().unwrap()).is_zero());
    }
    assert!(roof("p2_fail_values", "sqrt2m1").check_p1().unwrap().holds);
}

#[test]
fn p1_matches_brute_force() {
    for name in presets::NAMES {
        for alpha in ["golden", "sqrt2m1"] {
            let f = roof(name, alpha);
            let exact = f.check_p1().unwrap();
            let brute = brute_force_p1(&f, 5).unwrap();
            assert_eq!(exact.holds, brute.is_none(), "{name} {alpha}");
        }
    }
}

#[test]
fn p2_verdicts() {
    let f = roof("example1", "sqrt2m1");
    let v = f.check_p2().unwrap();
    assert!(v.holds && v.necessary_holds);
    let g = roof("p2_fail_values", "sqrt2m1");
    let v = g.check_p2().unwrap();
    assert!(!v.holds);
    assert!(!v.necessary_holds);
    match v.certificate {
        specflow::symreal::Certificate::AlphaCoefficients(c) => {
            let bs = g.basis();
            let mut acc = SymReal::zero();
            for ((u, w), d) in c.iter().zip(g.jumps()) {
                acc = &acc + &d.scale(u);
                acc = &acc + &bs.alpha_times(d).unwrap().scale(w);
            }
            assert_eq!(&acc, g.min_value());
        }
        other => panic!("unexpected certificate {other:?}"),
    }
}

#[test]
fn eigen_criterion() {
    let f = roof("solvable_eigen", "sqrt2m1");
    let r = f.eigenvalue_criterion(&SymReal::int(1)).unwrap();
    assert!(r.solvable);
    assert_eq!(r.classes.len(), 1);
    assert!(r.classes[0].sum.is_zero());
    let e = roof("example1", "sqrt2m1");
    for qd in 1..=5 {
        for p in -5..=5 {
            if p == 0 {
                continue;
            }
            let r = e.eigenvalue_criterion(&SymReal::frac(p, qd)).unwrap();
            assert!(!r.solvable && !r.class_clause);
        }
    }
    assert!(matches!(e.eigenvalue_criterion(&SymReal::zero()), Err(Error::Precondition(_))));
}

#[test]
fn eigen_clause_scales() {
    let f = roof("solvable_eigen", "golden");
    for k in [-3i64, -1, 2, 5] {
        let r = f.eigenvalue_criterion(&SymReal::int(k)).unwrap();
        assert!(r.class_clause);
    }
}

#[test]
fn weak_mixing() {
    assert_eq!(roof("example1", "sqrt2m1").weak_mixing_verdict().unwrap(), WeakMixing::WeaklyMixing);
    assert_eq!(
        roof("p1_fail_orbit", "sqrt2m1").weak_mixing_verdict().unwrap(),
        WeakMixing::Unknown("P1 fails".into())
    );
    assert_eq!(
        roof("p2_fail_values", "sqrt2m1").weak_mixing_verdict().unwrap(),
        WeakMixing::Unknown("P2 fails".into())
    );
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::with_cases(64) })]

    #[test]
    fn cocycle_identity(m in -200i64..200, n in -200i64..200, k in 0i64..1000) {
        let f = roof("example1", "golden");
        let x = SymReal::frac(k, 1000);
        prop_assert!(cocycle_holds(&f, &x, m, n).unwrap());
    }

    #[test]
    fn diff_matches_sums(a in 0i64..997, c in 0i64..997, n in 1u64..150) {
        prop_assume!(a != c);
        let f = roof("example1", "sqrt2m1");
        let x = SymReal::frac(a, 997);
        let y = SymReal::frac(c, 997);
        let d = f.birkhoff_diff(&x, &y, n).unwrap();
        prop_assert_eq!(d, &f.birkhoff(&x, n as i64).unwrap() - &f.birkhoff(&y, n as i64).unwrap());
    }
}
