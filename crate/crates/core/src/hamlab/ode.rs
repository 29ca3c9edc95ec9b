//! Adaptive Dormand–Prince 5(4) integration.

pub type State = [f64; 3];

const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
/// Fifth-order minus embedded fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// One Dormand–Prince step of size `h`; returns the fifth-order solution
/// and the error estimate.
pub fn step(rhs: &impl Fn(&State) -> State, y: &State, h: f64) -> (State, State) {
    let mut k = [[0.0; 3]; 7];
    k[0] = rhs(y);
    for s in 1..7 {
        let mut z = *y;
        for (j, kj) in k.iter().enumerate().take(s) {
            let a = A[s][j];
            if a != 0.0 {
                for d in 0..3 {
                    z[d] += h * a * kj[d];
                }
            }
        }
        k[s] = rhs(&z);
    }
    // Row 7 of A holds the fifth-order weights (FSAL).
    let mut out = *y;
    let mut err = [0.0; 3];
    for (j, kj) in k.iter().enumerate() {
        for d in 0..3 {
            if j < 6 {
                out[d] += h * A[6][j] * kj[d];
            }
            err[d] += h * E[j] * kj[d];
        }
    }
    (out, err)
}

/// Scaled RMS error norm.
pub fn error_norm(y: &State, y1: &State, err: &State, tol: f64) -> f64 {
    let mut acc = 0.0;
    for d in 0..3 {
        let sc = tol + tol * y[d].abs().max(y1[d].abs());
        acc += (err[d] / sc).powi(2);
    }
    (acc / 3.0).sqrt()
}

/// Outcome of an event-terminated integration.
#[derive(Debug, Clone, PartialEq)]
pub enum Stop {
    Event(State),
    /// The step size fell below the floor at this state.
    Collapse(State),
    /// The budget (in the third state component) ran out at this state.
    Cap(State),
    /// The visitor asked to stop at this state.
    Halt(State),
}

/// Integrates from `y0` until `event(y)` changes sign from negative to
/// non-negative, `y[2] ≥ cap`, or the step size collapses. Accepted states
/// are passed to `visit`, which may halt the integration by returning `false`.
pub fn integrate_until(
    rhs: &impl Fn(&State) -> State,
    y0: State,
    h0: f64,
    tol: f64,
    event: &impl Fn(&State) -> f64,
    cap: f64,
    visit: &mut impl FnMut(&State) -> bool,
) -> Stop {
    let mut y = y0;
    let mut h = h0;
    let h_min = 1e-14;
    let mut guard = 0u64;
    loop {
        guard += 1;
        if guard > 2_000_000 {
            return Stop::Collapse(y);
        }
        let (y1, err) = step(rhs, &y, h);
        let en = error_norm(&y, &y1, &err, tol);
        if en <= 1.0 || h <= h_min {
            if h <= h_min && en > 1.0 {
                return Stop::Collapse(y);
            }
            if event(&y) < 0.0 && event(&y1) >= 0.0 {
                return Stop::Event(locate_event(rhs, &y, h, event, tol));
            }
            y = y1;
            if !visit(&y) {
                return Stop::Halt(y);
            }
            if y[2] >= cap {
                return Stop::Cap(y);
            }
        }
        let fac = if en == 0.0 { 5.0 } else { (0.9 * en.powf(-0.2)).clamp(0.2, 5.0) };
        h *= fac;
    }
}

/// Finds `θ ∈ (0, 1]` with `event(step(y, θh)) = 0` by safeguarded secant
/// iteration on single steps from `y`.
fn locate_event(rhs: &impl Fn(&State) -> State, y: &State, h: f64, event: &impl Fn(&State) -> f64, tol: f64) -> State {
    let eval = |th: f64| {
        let z = if th == 0.0 { *y } else { step(rhs, y, th * h).0 };
        (event(&z), z)
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    let (mut flo, _) = eval(lo);
    let (mut fhi, mut zhi) = eval(hi);
    let target = (tol * 1e-2).max(1e-15);
    for it in 0..200 {
        let sec = lo - flo * (hi - lo) / (fhi - flo);
        let th = if it % 3 == 2 || !(sec > lo && sec < hi) { 0.5 * (lo + hi) } else { sec };
        let (fm, zm) = eval(th);
        if fm >= 0.0 {
            hi = th;
            fhi = fm;
            zhi = zm;
        } else {
            lo = th;
            flo = fm;
        }
        if fhi.abs() < target || hi - lo < 1e-15 {
            break;
        }
    }
    zhi
}
