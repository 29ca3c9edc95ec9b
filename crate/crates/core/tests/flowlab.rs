mod common;

use common::{q, roof};
use proptest::prelude::*;
use specflow::flowlab::{
    correlation, dk_audit, flow_map, flow_map_f64, full_space, occupancy, phase_measure, qn_distribution,
    FloatPoint, Rect, SpecialFlowPoint,
};
use specflow::symreal::SymReal;
use std::time::Instant;

#[test]
fn flow_identity_and_gluing() {
    let f = roof("example1", "golden");
    let x = SymReal::frac(1, 7);
    let p = SpecialFlowPoint::new(&f, x.clone(), SymReal::zero()).unwrap();
    assert_eq!(flow_map(&f, &p, &SymReal::zero()).unwrap(), p);
    let fx = f.value_at(&x).unwrap().clone();
    let img = flow_map(&f, &p, &fx).unwrap();
    assert_eq!(img.x, f.basis().circle(&f.rotate(&x, 1)).unwrap());
    assert!(img.s.is_zero());
}

#[test]
fn phase_measures() {
    let f = roof("example1", "sqrt2m1");
    let full = phase_measure(&f, &full_space(&f)).unwrap();
    assert_eq!(full.value, 1.0);
    assert_eq!(phase_measure(&f, &[]).unwrap().value, 0.0);
    let r = Rect::new(SymReal::zero(), SymReal::frac(1, 3), SymReal::zero(), SymReal::int(1));
    let m = phase_measure(&f, &[r]).unwrap();
    assert_eq!(m.area, SymReal::frac(1, 3));
    let expect = (1.0 / 3.0) / (1.0 + 3f64.sqrt() / 3.0);
    assert!((m.value - expect).abs() < 1e-15);
    let tall = Rect::new(SymReal::frac(1, 4), SymReal::frac(1, 2), SymReal::zero(), SymReal::int(2));
    assert!(phase_measure(&f, &[tall]).is_err());
}

#[test]
fn rigidity_atoms_in_predicted_set() {
    for alpha in ["golden", "sqrt2m1"] {
        let f = roof("example1", alpha);
        for n in 1..=12 {
            let r = qn_distribution(&f, n, 1000).unwrap();
            assert!(r.all_in_predicted, "{alpha} n={n}");
            assert!(r.atoms.len() <= r.d_size);
            let total: num_rational::BigRational = r.atoms.iter().map(|a| a.mass.clone()).sum();
            assert_eq!(total, q(1, 1));
        }
    }
    assert_eq!(specflow::flowlab::offset_set(&roof("example1", "golden")).len(), 9);
}

#[test]
fn qn_distribution_grid_precondition() {
    let f = roof("example1", "golden");
    assert!(qn_distribution(&f, 3, 10).is_err());
}

#[test]
fn dk_example1_golden() {
    let f = roof("example1", "golden");
    let start = Instant::now();
    let rows = dk_audit(&f, 12, 10_000).unwrap();
    eprintln!("dk golden: {:?}", start.elapsed());
    for r in rows {
        assert!(r.holds, "n={}", r.n);
        assert!(r.float_gap < 1e-9);
        assert!(r.max_dev_f64 <= 2.0 * 3f64.sqrt() + 1e-12);
    }
}

#[test]
fn correlation_trivial_cases() {
    let f = roof("example1", "golden");
    let a = [Rect::new(SymReal::frac(1, 2), SymReal::frac(3, 4), SymReal::zero(), SymReal::frac(1, 2))];
    let m = phase_measure(&f, &a).unwrap().value;
    let c = correlation(&f, &a, &a, 0.0, 20_000, 7).unwrap();
    assert!((c.estimate.estimate - m).abs() <= 3.0 * c.estimate.radius);
    let full = full_space(&f);
    let c = correlation(&f, &full, &full, 12.5, 2_000, 7).unwrap();
    assert_eq!(c.estimate.estimate, 1.0);
    let again = correlation(&f, &a, &a, 3.0, 5_000, 99).unwrap();
    assert_eq!(again, correlation(&f, &a, &a, 3.0, 5_000, 99).unwrap());
    assert!(correlation(&f, &a, &a, 3.0, 10, 99).is_err());
}

#[test]
fn measure_preservation() {
    let f = roof("example1", "sqrt2m1");
    let rects = vec![
        Rect::new(SymReal::zero(), SymReal::frac(1, 3), SymReal::zero(), SymReal::int(2)),
        Rect::new(SymReal::frac(1, 3), SymReal::frac(2, 3), SymReal::frac(1, 4), SymReal::frac(3, 4)),
        Rect::new(SymReal::frac(3, 5), SymReal::frac(6, 5), SymReal::zero(), SymReal::frac(1, 2)),
    ];
    let c_f = f.basis().to_f64(f.integral().unwrap());
    let q5 = f.basis().ctx().q_u64(5).unwrap() as f64;
    for t in [0.3, c_f, q5 * c_f] {
        let occ = occupancy(&f, &rects, t, 100_000, 11).unwrap();
        for (r, e) in rects.iter().zip(occ) {
            let m = phase_measure(&f, std::slice::from_ref(r)).unwrap().value;
            assert!((e.estimate - m).abs() <= 3.0 * e.radius, "t={t} est={} m={m}", e.estimate);
        }
    }
}

fn point(f: &specflow::roof::RoofPC, k: i64, h: i64) -> SpecialFlowPoint {
    let x = SymReal::frac(k, 1009);
    let top = f.value_at(&x).unwrap().clone();
    // s = top·h/1000 for h < 1000 stays under the graph.
    let s = top.scale(&q(h, 1000));
    SpecialFlowPoint::new(f, x, s).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::with_cases(48) })]

    #[test]
    fn exact_group_law(k in 0i64..1009, h in 0i64..1000, a in -400i64..400, c in -400i64..400) {
        let f = roof("example1", "golden");
        let p = point(&f, k, h);
        let s = SymReal::frac(a, 37);
        let t = SymReal::frac(c, 41);
        let two = flow_map(&f, &flow_map(&f, &p, &s).unwrap(), &t).unwrap();
        let one = flow_map(&f, &p, &(&s + &t)).unwrap();
        prop_assert_eq!(two, one);
    }

    #[test]
    fn exact_inverse(k in 0i64..1009, h in 0i64..1000, a in -2000i64..2000) {
        let f = roof("example1", "sqrt2m1");
        let p = point(&f, k, h);
        let t = SymReal::frac(a, 13);
        let back = flow_map(&f, &flow_map(&f, &p, &t).unwrap(), &(-&t)).unwrap();
        prop_assert_eq!(back, p);
    }

    #[test]
    fn float_group_law(x in 0.0f64..1.0, h in 0.0f64..1.0, s in -50.0f64..50.0, t in -50.0f64..50.0) {
        let f = roof("example1", "golden");
        let p = FloatPoint { x, s: h * f.value_at_f64(x) };
        let two = flow_map_f64(&f, flow_map_f64(&f, p, s), t);
        let one = flow_map_f64(&f, p, s + t);
        let dx = (two.x - one.x).abs();
        prop_assert!(dx.min(1.0 - dx) < 1e-9 && (two.s - one.s).abs() < 1e-9
            || (two.s - f.value_at_f64(two.x)).abs() < 1e-9 || two.s < 1e-9 || one.s < 1e-9);
    }
}
