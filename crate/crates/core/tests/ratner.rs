mod common;

use common::{q, roof};
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use specflow::ratner::{brute_force_trace, constants, find_witness, verify_r_property, RPropertyParams, DEFAULT_J_MAX};
use specflow::symreal::SymReal;
use specflow::Error;
use std::time::Instant;

#[test]
fn example1_constants() {
    let f = roof("example1", "sqrt2m1");
    let k = constants(&f, DEFAULT_J_MAX).unwrap();
    assert_eq!(k.h, 3);
    assert_eq!(k.p, 2);
    assert!(k.kappa > BigRational::from_integer(0.into()) && k.kappa < BigRational::from_integer(1.into()));
    assert_eq!(k.delta(10) * BigRational::from_integer(2.into()), k.delta(5));
    // F never contains 0, and contains ±k·b for small k.
    let bs = f.basis().clone();
    assert!(!k.in_f(&f, &SymReal::zero()).unwrap());
    for m in [1i64, -1, 2, 7] {
        assert!(k.in_f(&f, &bs.sym("b", q(m, 1)).unwrap()).unwrap());
    }
    assert!(!k.in_f(&f, &bs.sym("b", q(1, 2)).unwrap()).unwrap());
    assert!(!k.in_f(&f, &SymReal::int(1)).unwrap());
    let too_big = 2 * k.r_floor as i64 + 1;
    assert!(!k.in_f(&f, &bs.sym("b", q(too_big, 1)).unwrap()).unwrap());
}

#[test]
fn constants_refuse_without_p1() {
    let f = roof("p1_fail_orbit", "sqrt2m1");
    assert!(matches!(constants(&f, DEFAULT_J_MAX), Err(Error::Precondition(_))));
}

fn close_pair(rng: &mut ChaCha8Rng, delta: f64) -> (SymReal, SymReal) {
    let den: i64 = 1 << 40;
    let xn = rng.gen_range(0..den);
    let gap = (delta * rng.gen_range(0.5..0.99) * den as f64) as i64;
    let (x, y) = (SymReal::frac(xn, den), SymReal::frac(xn + gap, den));
    if rng.gen_bool(0.5) {
        (x, y)
    } else {
        (y, x)
    }
}

#[test]
fn witnesses_match_brute_force_golden() {
    let f = roof("example1", "golden");
    let k = constants(&f, DEFAULT_J_MAX).unwrap();
    let n = f.basis().ctx().q_u64(4).unwrap();
    let delta = k.delta(n).to_f64().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let start = Instant::now();
    for _ in 0..8 {
        let (x, y) = close_pair(&mut rng, delta);
        let w = find_witness(&f, &k, &x, &y, n).unwrap();
        let brute = brute_force_trace(&f, &x, &y, w.q_s, w.q_s4).unwrap();
        assert_eq!(brute, w.trace);
        assert!(k.in_f(&f, &w.rho).unwrap());
        assert_eq!(f.int_combination(&w.rho_coeffs), w.rho);
        // Maximal start.
        assert!(w.m == w.q_s || w.delta_at(w.m - 1) != Some(&w.rho));
    }
    eprintln!("golden witnesses: {:?}", start.elapsed());
}

#[test]
fn witness_on_same_orbit() {
    let f = roof("example1", "golden");
    let k = constants(&f, DEFAULT_J_MAX).unwrap();
    let n = f.basis().ctx().q_u64(4).unwrap();
    let ctx = f.basis().ctx();
    // y = x + q_m α lies on the orbit of x and is close for large m.
    let m = 30;
    let qm = ctx.q(m).unwrap().to_i64().unwrap();
    let x = SymReal::frac(1, 7);
    let y = f.rotate(&x, qm);
    assert!(f.basis().dist_to_int_lt(&(&x - &y), &k.delta(n)).unwrap());
    let w = find_witness(&f, &k, &x, &y, n).unwrap();
    let brute = brute_force_trace(&f, &x, &y, w.q_s, w.q_s4).unwrap();
    assert_eq!(brute, w.trace);
}

#[test]
fn witness_rejects_bad_pairs() {
    let f = roof("example1", "golden");
    let k = constants(&f, DEFAULT_J_MAX).unwrap();
    let x = SymReal::frac(1, 5);
    assert!(matches!(find_witness(&f, &k, &x, &x, 5), Err(Error::Precondition(_))));
    let far = SymReal::frac(1, 4);
    assert!(matches!(find_witness(&f, &k, &x, &far, 5), Err(Error::Precondition(_))));
}

#[test]
fn witness_sqrt2m1() {
    let f = roof("example1", "sqrt2m1");
    let k = constants(&f, DEFAULT_J_MAX).unwrap();
    let n = 2;
    let delta = k.delta(n).to_f64().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (x, y) = close_pair(&mut rng, delta);
    let w = find_witness(&f, &k, &x, &y, n).unwrap();
    assert!(w.kappa_check && w.n_check && w.v_check && w.split_check);
    let brute = brute_force_trace(&f, &x, &y, w.m, w.m + w.l + 1).unwrap();
    assert_eq!(brute.len(), 1);
    assert_eq!(brute[0].delta, w.rho);
}

#[test]
fn reflection_reverses_sums() {
    let f = roof("example1", "golden");
    let g = f.reflected().unwrap();
    let x = SymReal::frac(2, 11);
    for n in [1i64, 5, 40] {
        let back = f.birkhoff(&x, -n).unwrap();
        let fwd = g.birkhoff(&(-&x), n).unwrap();
        assert_eq!(back, -&fwd);
    }
}

fn r_params(f: &specflow::roof::RoofPC, t0: f64, forced: Option<f64>) -> RPropertyParams {
    let b = f.basis().to_f64(&f.basis().sym("b", q(1, 1)).unwrap());
    RPropertyParams {
        t0,
        p: (-6..=6).filter(|&k| k != 0).map(|k| k as f64 * b).collect(),
        eps: 0.1,
        n: f.basis().ctx().q_u64(4).unwrap(),
        trials: 12,
        seed: 9,
        forced_shift: forced,
    }
}

#[test]
fn r_property_forward_and_backward() {
    let f = roof("example1", "golden");
    let k = constants(&f, DEFAULT_J_MAX).unwrap();
    for t0 in [1.0, -0.7] {
        let st = verify_r_property(&f, &k, &r_params(&f, t0, None)).unwrap();
        assert_eq!(st.passed, st.trials, "t0={t0}: {:?}", st.pairs);
    }
}

#[test]
fn r_property_negative_control() {
    let f = roof("example1", "golden");
    let k = constants(&f, DEFAULT_J_MAX).unwrap();
    let st = verify_r_property(&f, &k, &r_params(&f, 1.0, Some(0.37))).unwrap();
    assert!(st.pairs.iter().all(|p| p.fraction < 0.9));
    assert!(!st.holds);
    let mut empty = r_params(&f, 1.0, None);
    empty.p.clear();
    assert!(verify_r_property(&f, &k, &empty).is_err());
}
