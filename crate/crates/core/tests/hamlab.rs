use std::time::Instant;

use specflow::hamlab::*;
use specflow::Error;

fn golden_pair() -> (f64, f64) {
    (5f64.sqrt() - 2.0, 1.0)
}

fn cos_y_weight() -> Weight {
    Weight { poly: TrigPoly2::new(vec![
        Mode { kx: 0, ky: 0, cos: 1.0, sin: 0.0 },
        Mode { kx: 0, ky: 1, cos: 0.5, sin: 0.0 },
    ]), vertices: vec![] }
}

#[test]
fn constant_field_and_straight_orbits() {
    let (a1, a2) = golden_pair();
    let sys = HamiltonianSystem::linear(a1, a2, Weight::one()).unwrap();
    assert_eq!(vector_field(&sys, 0.3, 0.7).unwrap(), (a2, -a1));
    let tr = integrate(&sys, 0.1, 0.2, 3.0, 1e-10).unwrap();
    for &(t, x, y) in &tr.samples {
        assert!((x - (0.1 + a2 * t)).abs() < 1e-12);
        assert!((y - (0.2 - a1 * t)).abs() < 1e-12);
    }
    let (ex, ey) = tr.end;
    assert!((ex - (0.1 + 3.0 * a2)).abs() < 1e-9 && (ey - (0.2 - 3.0 * a1)).abs() < 1e-9);
}

#[test]
fn vertex_and_fixed_point_errors() {
    let sys = HamiltonianSystem::trap_fixture(golden_pair().0, 1.0).unwrap();
    let (vx, vy) = sys.g.vertices[0];
    assert!(matches!(vector_field(&sys, vx, vy), Err(Error::Precondition(_))));
    let centre = sys.critical_points(16).into_iter().find(|c| !c.saddle).unwrap();
    assert!(matches!(integrate(&sys, centre.x, centre.y, 1.0, 1e-9), Err(Error::Precondition(_))));
}

#[test]
fn quasi_periodicity_and_conservation() {
    let sys = HamiltonianSystem::trap_fixture(golden_pair().0, 1.0).unwrap();
    let mut worst = 0.0f64;
    for i in 0..1000 {
        let x = (i as f64 * 0.618_033_988_7).fract();
        let y = (i as f64 * 0.754_877_666_2).fract();
        let (m, n) = ((i % 7) as f64 - 3.0, (i % 5) as f64 - 2.0);
        let lhs = sys.h(x + m, y + n) - sys.h(x, y);
        worst = worst.max((lhs - (m * sys.alpha1 + n * sys.alpha2)).abs());
    }
    assert!(worst < 1e-12, "{worst}");
    let tol = 1e-9;
    let t = 5.0;
    let tr = integrate(&sys, 0.0, 0.5, t, tol).unwrap();
    assert!(tr.h_drift <= 10.0 * tol * t, "{}", tr.h_drift);
}

#[test]
fn induced_coordinate_closed_form() {
    let (a1, a2) = (5f64.sqrt() - 2.0, 0.7);
    let sys = HamiltonianSystem::linear(a1, a2, Weight::one()).unwrap();
    let tr = Transversal::vertical(&sys, 0.0, 64).unwrap();
    assert_eq!(induced_coordinate(&sys, &tr, 0.0), 0.0);
    for y in [0.1, 0.25, 0.9] {
        assert!((induced_coordinate(&sys, &tr, y) - a2 * y).abs() < 1e-15);
    }
    assert!(induced_coordinate(&sys, &tr, 1.0) < 1e-15);
}

#[test]
fn linear_return_map_is_rotation() {
    let (a1, a2) = golden_pair();
    let sys = HamiltonianSystem::linear(a1, a2, Weight::one()).unwrap();
    let tr = Transversal::vertical(&sys, 0.0, 64).unwrap();
    for k in 0..20 {
        let s = k as f64 / 20.0 * a2;
        let (s1, t) = return_map(&sys, &tr, s, 1e-11).unwrap();
        let want = (s - a1).rem_euclid(a2);
        let err = (s1 - want).abs().min(a2 - (s1 - want).abs());
        assert!(err < 1e-9, "{s}: {s1} vs {want}");
        assert!((t - 1.0 / a2).abs() < 1e-9);
    }
    let p = section_profile(&sys, &tr, 64, 1e-11).unwrap();
    assert!(p.jumps.is_empty());
    assert!(p.rotation_error < 1e-6);
    let area = area_identity_check(&sys, &tr, &p, 10_000, 1).unwrap();
    assert!((area.mc_estimate - 1.0).abs() < 1e-9 && (area.profile_integral - 1.0).abs() < 1e-9);
}

#[test]
fn velocity_change_keeps_orbits() {
    let (a1, a2) = golden_pair();
    let flat = HamiltonianSystem::linear(a1, a2, Weight::one()).unwrap();
    let slow = HamiltonianSystem::linear(a1, a2, cos_y_weight()).unwrap();
    let tr = Transversal::vertical(&flat, 0.0, 64).unwrap();
    let tol = 1e-10;
    let mut times = Vec::new();
    for k in 0..16 {
        let s = (k as f64 + 0.3) / 16.0 * a2;
        let (s_flat, _) = return_map(&flat, &tr, s, tol).unwrap();
        let (s_slow, t) = return_map(&slow, &tr, s, tol).unwrap();
        assert!((s_flat - s_slow).abs() <= 10.0 * tol, "{s}");
        times.push(t);
    }
    let spread = times.iter().cloned().fold(f64::MIN, f64::max) - times.iter().cloned().fold(f64::MAX, f64::min);
    assert!(spread > 1e-3, "return time should depend on s");
}

#[test]
fn weighted_area_identity() {
    let (a1, a2) = golden_pair();
    let sys = HamiltonianSystem::linear(a1, a2, cos_y_weight()).unwrap();
    let tr = Transversal::vertical(&sys, 0.0, 64).unwrap();
    let p = section_profile(&sys, &tr, 200, 1e-10).unwrap();
    let r = area_identity_check(&sys, &tr, &p, 1_000_000, 7).unwrap();
    assert!(r.certified_no_traps);
    assert!(r.relative_discrepancy <= 0.005, "{r:?}");
}

#[test]
fn trap_fixture_jumps_cancel() {
    let start = Instant::now();
    let sys = HamiltonianSystem::trap_fixture(golden_pair().0, 1.0).unwrap();
    assert_eq!(sys.g.vertices.len(), 4);
    let tr = Transversal::vertical(&sys, 0.0, 1024).unwrap();
    let coarse = section_profile(&sys, &tr, 100, 1e-10).unwrap();
    let fine = section_profile(&sys, &tr, 200, 1e-10).unwrap();
    for p in [&coarse, &fine] {
        assert!(p.failures.is_empty());
        assert_eq!(p.jumps.len(), 4);
        assert!(p.jump_sum().abs() <= 0.02 * p.max_jump(), "{:?}", p.jumps);
        assert!(p.rotation_error < 1e-6);
    }
    for (a, b) in coarse.jumps.iter().zip(&fine.jumps) {
        assert!((a.beta - b.beta).abs() < 2.0 / 100.0);
    }
    assert!(start.elapsed().as_secs() < 60);
}

#[test]
fn trapped_point_has_no_return() {
    let sys = HamiltonianSystem::trap_fixture(golden_pair().0, 1.0).unwrap();
    let tr = Transversal::vertical(&sys, 0.0, 1024).unwrap();
    let centre = sys.critical_points(16).into_iter().find(|c| !c.saddle).unwrap();
    let e = section_first_hit(&sys, &tr, centre.x + 1e-3, centre.y);
    assert!(matches!(e, Err(Error::Numerical(_))), "{e:?}");
}

fn section_first_hit(sys: &HamiltonianSystem, tr: &Transversal, x: f64, y: f64) -> specflow::Result<(f64, f64)> {
    first_hit(sys, tr, x, y, 1e-9)
}

#[test]
fn trap_area_identity() {
    let sys = HamiltonianSystem::trap_fixture(golden_pair().0, 1.0).unwrap();
    let tr = Transversal::vertical(&sys, 0.0, 1024).unwrap();
    let p = section_profile(&sys, &tr, 400, 1e-10).unwrap();
    let r = area_identity_check(&sys, &tr, &p, 20_000, 3).unwrap();
    assert!(!r.certified_no_traps && r.ec_fraction < 1.0);
    assert!(r.relative_discrepancy <= 0.02 + 2.0 * r.mc_radius / r.profile_integral, "{r:?}");
}

#[test]
fn portrait_is_svg() {
    let sys = HamiltonianSystem::trap_fixture(golden_pair().0, 1.0).unwrap();
    let svg = phase_portrait_svg(&sys, &[(0.0, 0.1), (0.0, 0.5)], 2.0, 0.0, 200);
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
    assert_eq!(svg.matches("<circle").count(), 8);
}
