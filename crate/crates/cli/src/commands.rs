//! Subcommand implementations. Each returns a report; verification
//! failures are carried in the report so that its files are still written.

use num_traits::ToPrimitive;
use serde::Deserialize;
use serde_json::{json, Value};
use specflow::flowlab::{cocycle_holds, correlation, dk_audit, phase_measure, qn_distribution, Rect};
use specflow::hamlab::{
    area_identity_check, phase_portrait_svg, section_profile, SectionProfile, Transversal,
};
use specflow::ratner::{constants, find_witness, random_close_pairs, verify_r_property, RPropertyParams};
use specflow::roof::coboundary::{coboundary_reduce, TrigPoly};
use specflow::roof::{RoofPC, WeakMixing};
use specflow::symreal::{Basis, SymReal};
use specflow::{Error, Result};

use crate::config::{ExperimentConfig, Literal};

#[derive(Debug, Default)]
pub struct Report {
    pub json: Value,
    pub csv: Option<String>,
    pub svg: Option<String>,
    /// First failed verification, if any.
    pub failure: Option<String>,
}

impl Report {
    fn fail_if(&mut self, bad: bool, msg: impl FnOnce() -> String) {
        if bad && self.failure.is_none() {
            self.failure = Some(msg());
        }
    }
}

fn show(b: &Basis, x: &SymReal) -> String {
    x.display(b).to_string()
}

fn verdict(holds: bool) -> &'static str {
    if holds {
        "holds"
    } else {
        "fails"
    }
}

fn need_seed(seed: Option<u64>) -> Result<u64> {
    seed.ok_or_else(|| Error::Config("this subcommand is stochastic and needs a seed".into()))
}

fn roof_json(f: &RoofPC) -> Value {
    let b = f.basis();
    json!({
        "xi": f.xi().iter().map(|x| show(b, x)).collect::<Vec<_>>(),
        "d": f.jumps().iter().map(|x| show(b, x)).collect::<Vec<_>>(),
        "values": f.values().iter().map(|x| show(b, x)).collect::<Vec<_>>(),
    })
}

pub fn check_props(cfg: &ExperimentConfig) -> Result<Report> {
    let f = cfg.roof()?;
    let b = f.basis();
    let p1 = f.check_p1()?;
    let p2 = f.check_p2()?;
    let wm = f.weak_mixing_verdict()?;
    let witness = p1.witness.as_ref().map(|w| w.iter().map(|n| n.to_string()).collect::<Vec<_>>());
    let json = json!({
        "roof": roof_json(&f),
        "integral": show(b, f.integral()?),
        "p1": verdict(p1.holds),
        "p1_witness": witness,
        "p1_selections_checked": p1.selections_checked,
        "p2": verdict(p2.holds),
        "p2_necessary": verdict(p2.necessary_holds),
        "weak_mixing": wm == WeakMixing::WeaklyMixing,
        "reason": match &wm { WeakMixing::WeaklyMixing => None, WeakMixing::Unknown(r) => Some(r.clone()) },
    });
    let csv = format!(
        "property,verdict\np1,{}\np2,{}\np2_necessary,{}\nweak_mixing,{}\n",
        verdict(p1.holds),
        verdict(p2.holds),
        verdict(p2.necessary_holds),
        wm == WeakMixing::WeaklyMixing
    );
    Ok(Report { json, csv: Some(csv), ..Report::default() })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AuditParams {
    n_max: usize,
    grid: usize,
    float_tol: f64,
    #[serde(default = "default_cocycle_points")]
    cocycle_points: usize,
}

fn default_cocycle_points() -> usize {
    16
}

pub fn birkhoff_audit(cfg: &ExperimentConfig) -> Result<Report> {
    let f = cfg.roof()?;
    let p: AuditParams = cfg.params()?;
    let b = f.basis();
    let rows = dk_audit(&f, p.n_max, p.grid)?;
    let mut rep = Report::default();
    let mut csv = String::from("n,q_n,max_dev,bound,holds,float_max_dev,float_gap\n");
    let mut out = Vec::new();
    for r in &rows {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{:e}\n",
            r.n,
            r.q_n,
            r.max_dev_f64,
            b.to_f64(&r.bound),
            r.holds,
            r.float_max_dev,
            r.float_gap
        ));
        rep.fail_if(!r.holds, || format!("Denjoy–Koksma bound fails at n = {}", r.n));
        rep.fail_if(r.float_gap > p.float_tol, || format!("float path off by {:e} at n = {}", r.float_gap, r.n));
        out.push(json!({
            "n": r.n, "q_n": r.q_n, "max_dev": show(b, &r.max_dev), "bound": show(b, &r.bound),
            "holds": r.holds, "float_gap": r.float_gap,
        }));
    }
    let shifts = [(3i64, 5i64), (-4, 7), (10, -3), (-6, -2)];
    let mut cocycle_ok = true;
    for j in 0..p.cocycle_points {
        let x = SymReal::frac(j as i64, p.cocycle_points as i64);
        for &(m, n) in &shifts {
            cocycle_ok &= cocycle_holds(&f, &x, m, n)?;
        }
    }
    rep.fail_if(!cocycle_ok, || "cocycle identity fails".into());
    rep.json = json!({ "rows": out, "cocycle": cocycle_ok, "cocycle_points": p.cocycle_points });
    rep.csv = Some(csv);
    Ok(rep)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PairSpec {
    x: Literal,
    y: Literal,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct WitnessParams {
    /// `N = q_{n_index}`.
    n_index: usize,
    #[serde(default)]
    pairs: Vec<PairSpec>,
    #[serde(default)]
    random_pairs: usize,
    #[serde(default = "default_j_max")]
    j_max: u64,
}

fn default_j_max() -> u64 {
    specflow::ratner::DEFAULT_J_MAX
}

pub fn ratner_witness(cfg: &ExperimentConfig, seed: Option<u64>) -> Result<Report> {
    let f = cfg.roof()?;
    let p: WitnessParams = cfg.params()?;
    let b = f.basis();
    let k = constants(&f, p.j_max)?;
    let n = b.ctx().q_u64(p.n_index)?;
    let mut pairs = Vec::new();
    for ps in &p.pairs {
        pairs.push((ps.x.resolve(b)?, ps.y.resolve(b)?));
    }
    if p.random_pairs > 0 {
        pairs.extend(random_close_pairs(&k.delta(n), p.random_pairs, need_seed(seed)?));
    }
    if pairs.is_empty() {
        return Err(Error::Config("give \"pairs\" or \"random_pairs\"".into()));
    }
    let mut rep = Report::default();
    let mut csv = String::from("x,y,s,M,L,rho,kappa_check,N_check,V_check,split_check\n");
    let mut out = Vec::new();
    for (x, y) in &pairs {
        let w = find_witness(&f, &k, x, y, n)?;
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            show(b, x),
            show(b, y),
            w.s,
            w.m,
            w.l,
            show(b, &w.rho),
            w.kappa_check,
            w.n_check,
            w.v_check,
            w.split_check
        ));
        let mut j = serde_json::to_value(w.json(&f)).map_err(|e| Error::Numerical(e.to_string()))?;
        j["x"] = json!(show(b, x));
        j["y"] = json!(show(b, y));
        j["rho_expr"] = json!(show(b, &w.rho));
        out.push(j);
    }
    rep.json = json!({
        "N": n,
        "delta": k.delta(n).to_string(),
        "kappa": k.kappa.to_string(),
        "c": k.c.to_string(),
        "R_floor": k.r_floor,
        "witnesses": out,
    });
    rep.csv = Some(csv);
    Ok(rep)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RParams {
    t0: f64,
    /// Shifts in units of the listed literals.
    shifts: Vec<Literal>,
    eps: f64,
    n_index: usize,
    trials: usize,
    #[serde(default = "default_j_max")]
    j_max: u64,
}

pub fn r_property(cfg: &ExperimentConfig, seed: Option<u64>) -> Result<Report> {
    let f = cfg.roof()?;
    let p: RParams = cfg.params()?;
    let b = f.basis();
    let k = constants(&f, p.j_max)?;
    let shifts = p.shifts.iter().map(|l| Ok(b.to_f64(&l.resolve(b)?))).collect::<Result<Vec<_>>>()?;
    let params = RPropertyParams {
        t0: p.t0,
        p: shifts,
        eps: p.eps,
        n: b.ctx().q_u64(p.n_index)?,
        trials: p.trials,
        seed: need_seed(seed)?,
        forced_shift: None,
    };
    let stats = verify_r_property(&f, &k, &params)?;
    let mut csv = String::from("x,y,s,M,L,shift,shift_in_p,fraction,passed\n");
    for o in &stats.pairs {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            o.x, o.y, o.s, o.m, o.l, o.shift, o.shift_in_p, o.fraction, o.passed
        ));
    }
    let mut rep = Report {
        json: serde_json::to_value(&stats).map_err(|e| Error::Numerical(e.to_string()))?,
        csv: Some(csv),
        ..Report::default()
    };
    rep.fail_if(!stats.holds, || format!("R-property pass rate {:.3}", stats.pass_rate));
    Ok(rep)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RigidityParams {
    n_min: usize,
    n_max: usize,
    grid: usize,
    mc_samples: usize,
    /// Test rectangle `[x0, x1) × [s0, s1)`.
    rect: [Literal; 4],
}

pub fn rigidity_scan(cfg: &ExperimentConfig, seed: Option<u64>) -> Result<Report> {
    let f = cfg.roof()?;
    let p: RigidityParams = cfg.params()?;
    let seed = need_seed(seed)?;
    let b = f.basis();
    let [x0, x1, s0, s1] = &p.rect;
    let a = vec![Rect::new(x0.resolve(b)?, x1.resolve(b)?, s0.resolve(b)?, s1.resolve(b)?)];
    let measure_a = phase_measure(&f, &a)?.value;
    let mut rep = Report::default();
    let mut csv = String::from("n,q_n,atom_value,mass\n");
    let mut rows = Vec::new();
    for n in p.n_min..=p.n_max {
        let r = qn_distribution(&f, n, p.grid)?;
        csv.push_str(r.csv().split_once('\n').map_or("", |x| x.1));
        let top = r.heaviest();
        let t = r.t_n + top.value_f64;
        let c = correlation(&f, &a, &a, t, p.mc_samples, seed)?;
        let mass = top.mass.to_f64().unwrap_or(0.0);
        let floor = 0.9 * mass * measure_a - 3.0 * c.estimate.radius;
        let ok = c.estimate.estimate >= floor;
        rep.fail_if(!r.all_in_predicted, || format!("n = {n}: an atom lies outside the predicted set"));
        rep.fail_if(r.atoms.len() > r.d_size, || format!("n = {n}: too many atoms"));
        rep.fail_if(!ok, || format!("n = {n}: correlation {} below {floor}", c.estimate.estimate));
        rows.push(json!({
            "n": n, "q_n": r.q_n, "gamma": show(b, &r.gamma), "atoms": r.atoms.len(), "d_size": r.d_size,
            "all_in_predicted": r.all_in_predicted, "heaviest": show(b, &top.value), "mass": top.mass.to_string(),
            "t": t, "correlation": c.estimate.estimate, "radius": c.estimate.radius, "floor": floor,
        }));
    }
    rep.json = json!({ "measure_a": measure_a, "seed": seed, "rows": rows });
    rep.csv = Some(csv);
    Ok(rep)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EigenParams {
    r: Vec<Literal>,
}

pub fn eigen_test(cfg: &ExperimentConfig) -> Result<Report> {
    let f = cfg.roof()?;
    let p: EigenParams = cfg.params()?;
    let b = f.basis();
    let mut csv = String::from("r,class_clause,integral_clause,solvable\n");
    let mut out = Vec::new();
    for lit in &p.r {
        let r = lit.resolve(b)?;
        let e = f.eigenvalue_criterion(&r)?;
        csv.push_str(&format!("{},{},{},{}\n", show(b, &r), e.class_clause, e.integral_clause, e.solvable));
        out.push(json!({
            "r": show(b, &r),
            "class_sums": e.classes.iter().map(|c| show(b, &c.sum)).collect::<Vec<_>>(),
            "class_clause": e.class_clause,
            "scaled_integral": show(b, &e.scaled_integral),
            "integral_clause": e.integral_clause,
            "verdict": if e.solvable { "solvable" } else { "not_solvable" },
        }));
    }
    Ok(Report { json: json!({ "reports": out }), csv: Some(csv), ..Report::default() })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CoboundaryParams {
    /// `(k, cos coefficient, sin coefficient)`.
    modes: Vec<(i64, f64, f64)>,
    truncation: i64,
    grid: usize,
    tol: f64,
}

pub fn coboundary(cfg: &ExperimentConfig) -> Result<Report> {
    let ctx = cfg.context()?;
    let p: CoboundaryParams = cfg.params()?;
    let zeta = TrigPoly::from_cos_sin(&p.modes);
    let r = coboundary_reduce(&zeta, &ctx, p.truncation, p.grid)?;
    let mut rep = Report::default();
    let mut csv = String::from("k,re,im\n");
    let mut modes = Vec::new();
    for &(k, c) in &r.transfer.modes {
        csv.push_str(&format!("{k},{},{}\n", c.re, c.im));
        modes.push(json!([k, c.re, c.im]));
    }
    rep.fail_if(r.check(p.tol).is_err(), || format!("residual {:e} above {:e}", r.residual, p.tol));
    rep.json = json!({ "residual": r.residual, "grid": r.grid, "max_divisor": r.max_divisor, "transfer": modes });
    rep.csv = Some(csv);
    Ok(rep)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SectionParams {
    x0: f64,
    grid: usize,
    tol: f64,
    #[serde(default)]
    mc_samples: usize,
}

fn profile_json(p: &SectionProfile) -> Value {
    json!({
        "x0": p.transversal.x0,
        "alpha2": p.alpha2,
        "grid": p.grid_size,
        "failures": p.failures.iter().map(|f| json!({"s": f.s, "error": f.message})).collect::<Vec<_>>(),
        "jumps": p.jumps.iter().map(|j| json!({"beta": j.beta, "d": j.d})).collect::<Vec<_>>(),
        "jump_sum": p.jump_sum(),
        "rotation": p.rotation,
        "expected_rotation": p.expected_rotation,
        "rotation_error": p.rotation_error,
        "orientation": p.orientation,
        "beta_lattice_match": "unchecked",
    })
}

pub fn ham_section(cfg: &ExperimentConfig) -> Result<Report> {
    let sys = cfg.hamiltonian()?;
    let p: SectionParams = cfg.params()?;
    let tr = Transversal::vertical(&sys, p.x0, 1024)?;
    let prof = section_profile(&sys, &tr, p.grid, p.tol)?;
    let seeds: Vec<(f64, f64)> = (0..12).map(|j| (p.x0, (j as f64 + 0.5) / 12.0)).collect();
    let svg = phase_portrait_svg(&sys, &seeds, 3.0 / sys.alpha2, p.x0, 480);
    let mut rep = Report { json: profile_json(&prof), csv: Some(prof.csv()), svg: Some(svg), failure: None };
    rep.fail_if(!prof.failures.is_empty(), || format!("{} grid points did not return", prof.failures.len()));
    Ok(rep)
}

pub fn ham_area(cfg: &ExperimentConfig, seed: Option<u64>) -> Result<Report> {
    let sys = cfg.hamiltonian()?;
    let p: SectionParams = cfg.params()?;
    let seed = need_seed(seed)?;
    if p.mc_samples == 0 {
        return Err(Error::Config("ham-area needs \"mc_samples\"".into()));
    }
    let tr = Transversal::vertical(&sys, p.x0, 1024)?;
    let prof = section_profile(&sys, &tr, p.grid, p.tol)?;
    let a = area_identity_check(&sys, &tr, &prof, p.mc_samples, seed)?;
    let json = json!({
        "mc_estimate": a.mc_estimate, "mc_radius": a.mc_radius, "mc_samples": a.mc_samples,
        "ec_fraction": a.ec_fraction, "certified_no_traps": a.certified_no_traps,
        "profile_integral": a.profile_integral, "relative_discrepancy": a.relative_discrepancy, "seed": seed,
    });
    let csv = format!(
        "mc_estimate,mc_radius,profile_integral,relative_discrepancy\n{},{},{},{}\n",
        a.mc_estimate, a.mc_radius, a.profile_integral, a.relative_discrepancy
    );
    Ok(Report { json, csv: Some(csv), ..Report::default() })
}
