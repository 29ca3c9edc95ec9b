//! The arithmetic properties (P1), (P2) and the eigenvalue criterion.

use super::RoofPC;
use crate::error::{Error, Result};
use crate::symreal::linalg::{integer_kernel, QMatrix};
use crate::symreal::{Certificate, SymReal, Target};
use num_bigint::BigInt;
use num_traits::Zero;

/// Partition of the discontinuities under `ξᵢ − ξⱼ ∈ ℤ + ℤα` (`∼`) and
/// under `ξᵢ − ξⱼ ∈ ℚ + ℚα`.
#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceStructure {
    /// `∼`-classes as index lists, in order of first member.
    pub classes_sim: Vec<Vec<usize>>,
    /// `ℚ + ℚα`-classes as lists of `∼`-class indices.
    pub classes_q: Vec<Vec<usize>>,
    /// `σ_C = Σ_{i ∈ C} dᵢ` per `∼`-class.
    pub class_sums: Vec<SymReal>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct P1Verdict {
    pub holds: bool,
    /// A nonzero `n ∈ ℤᵖ` with `Σ nᵢdᵢ = 0` whose support contains no pair
    /// with `ξᵢ − ξⱼ ∈ (ℚ+ℚα)∖(ℤ+ℤα)`.
    pub witness: Option<Vec<BigInt>>,
    /// Indices of the failing selection.
    pub selection: Option<Vec<usize>>,
    pub selections_checked: usize,
    pub structure: EquivalenceStructure,
}

#[derive(Debug, Clone, PartialEq)]
pub struct P2Verdict {
    pub holds: bool,
    /// `a = min f`.
    pub a: SymReal,
    /// Certificate for `a ∈ Σ(ℚ+ℚα)dᵢ` or a separating functional.
    pub certificate: Certificate,
    /// Whether `a ∉ Σℚdᵢ`, which (P2) implies.
    pub necessary_holds: bool,
    pub necessary_certificate: Certificate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassClause {
    pub class: Vec<usize>,
    pub sum: SymReal,
    pub scaled: SymReal,
    pub integral: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenReport {
    pub r: SymReal,
    pub classes: Vec<ClassClause>,
    /// `r·σ_C ∈ ℤ` for every `∼`-class.
    pub class_clause: bool,
    pub scaled_integral: SymReal,
    /// `r·∫f ∈ ℤ + ℤα`.
    pub integral_clause: bool,
    pub solvable: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WeakMixing {
    WeaklyMixing,
    Unknown(String),
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

fn classes(p: usize, same: impl Fn(usize, usize) -> Result<bool>) -> Result<Vec<Vec<usize>>> {
    let mut parent: Vec<usize> = (0..p).collect();
    for i in 0..p {
        for j in i + 1..p {
            let (a, b) = (find(&mut parent, i), find(&mut parent, j));
            if a != b && same(i, j)? {
                parent[b] = a;
            }
        }
    }
    let mut out: Vec<Vec<usize>> = Vec::new();
    let mut root_of: Vec<Option<usize>> = vec![None; p];
    for i in 0..p {
        let r = find(&mut parent, i);
        match root_of[r] {
            Some(k) => out[k].push(i),
            None => {
                root_of[r] = Some(out.len());
                out.push(vec![i]);
            }
        }
    }
    Ok(out)
}

pub(super) fn equivalence_structure(f: &RoofPC) -> Result<EquivalenceStructure> {
    let b = f.basis();
    let xi = f.xi();
    let p = f.p();
    let member = |i: usize, j: usize, t: Target<'_>| -> Result<bool> {
        Ok(b.membership(&(&xi[i] - &xi[j]), t)?.member)
    };
    let classes_sim = classes(p, |i, j| member(i, j, Target::ZPlusZAlphaMod1))?;
    let reps: Vec<usize> = classes_sim.iter().map(|c| c[0]).collect();
    let classes_q = classes(reps.len(), |a, c| member(reps[a], reps[c], Target::QPlusQAlpha))?;
    let class_sums = classes_sim
        .iter()
        .map(|c| c.iter().fold(SymReal::zero(), |acc, &i| &acc + &f.jumps()[i]))
        .collect();
    Ok(EquivalenceStructure {
        classes_sim,
        classes_q,
        class_sums,
    })
}

pub(super) fn check_p1(f: &RoofPC) -> Result<P1Verdict> {
    let structure = equivalence_structure(f)?;
    let d = f.jumps();
    let dim = d.iter().map(|x| x.len()).max().unwrap_or(0);
    // Mixed-radix enumeration: one ∼-class from each ℚ+ℚα-class.
    let radices: Vec<usize> = structure.classes_q.iter().map(|c| c.len()).collect();
    let mut choice = vec![0usize; radices.len()];
    let mut checked = 0;
    loop {
        let mut sel: Vec<usize> = structure
            .classes_q
            .iter()
            .zip(&choice)
            .flat_map(|(qc, &k)| structure.classes_sim[qc[k]].iter().copied())
            .collect();
        sel.sort_unstable();
        checked += 1;
        let m: QMatrix = (0..dim)
            .map(|r| sel.iter().map(|&i| d[i].coord(r)).collect())
            .collect();
        let ker = integer_kernel(&m, sel.len());
        if let Some(v) = ker.first() {
            let mut w = vec![BigInt::zero(); f.p()];
            for (&i, c) in sel.iter().zip(v) {
                w[i] = c.clone();
            }
            return Ok(P1Verdict {
                holds: false,
                witness: Some(w),
                selection: Some(sel),
                selections_checked: checked,
                structure,
            });
        }
        let mut k = 0;
        while k < choice.len() {
            choice[k] += 1;
            if choice[k] < radices[k] {
                break;
            }
            choice[k] = 0;
            k += 1;
        }
        if k == choice.len() {
            break;
        }
    }
    Ok(P1Verdict {
        holds: true,
        witness: None,
        selection: None,
        selections_checked: checked,
        structure,
    })
}

/// Searches `n ∈ [−bound, bound]ᵖ ∖ {0}` with `Σ nᵢdᵢ = 0` that violates
/// (P1) directly from its definition.
pub fn brute_force_p1(f: &RoofPC, bound: i64) -> Result<Option<Vec<i64>>> {
    let b = f.basis();
    let p = f.p();
    let xi = f.xi();
    let mut bad_pair = vec![vec![false; p]; p];
    for i in 0..p {
        for j in 0..p {
            if i != j {
                let diff = &xi[i] - &xi[j];
                let in_q = b.membership(&diff, Target::QPlusQAlpha)?.member;
                let in_z = b.membership(&diff, Target::ZPlusZAlphaMod1)?.member;
                bad_pair[i][j] = in_q && !in_z;
            }
        }
    }
    let side = (2 * bound + 1) as u64;
    let total = side.checked_pow(p as u32).ok_or_else(|| {
        Error::Precondition("brute-force search space too large".into())
    })?;
    for code in 0..total {
        let mut c = code;
        let n: Vec<i64> = (0..p)
            .map(|_| {
                let k = (c % side) as i64 - bound;
                c /= side;
                k
            })
            .collect();
        if n.iter().all(|&k| k == 0) || !f.int_combination(&n).is_zero() {
            continue;
        }
        let supp: Vec<usize> = (0..p).filter(|&i| n[i] != 0).collect();
        let rescued = supp
            .iter()
            .any(|&i| supp.iter().any(|&j| i != j && bad_pair[i][j]));
        if !rescued {
            return Ok(Some(n));
        }
    }
    Ok(None)
}

pub(super) fn check_p2(f: &RoofPC) -> Result<P2Verdict> {
    let b = f.basis();
    let a = f.min_value().clone();
    let full = b.membership(&a, Target::QAlphaSpan(f.jumps()))?;
    let nec = b.membership(&a, Target::QSpan(f.jumps()))?;
    Ok(P2Verdict {
        holds: !full.member,
        a,
        certificate: full.certificate,
        necessary_holds: !nec.member,
        necessary_certificate: nec.certificate,
    })
}

pub(super) fn eigenvalue_criterion(f: &RoofPC, r: &SymReal) -> Result<EigenReport> {
    if r.is_zero() {
        return Err(Error::Precondition(
            "r = 0 is degenerate: the constant function solves the equation".into(),
        ));
    }
    let b = f.basis();
    let st = equivalence_structure(f)?;
    let mut classes = Vec::new();
    for (c, s) in st.classes_sim.iter().zip(&st.class_sums) {
        let scaled = b.mul(r, s)?;
        let integral = scaled.as_rational().is_some_and(|q| q.is_integer());
        classes.push(ClassClause {
            class: c.clone(),
            sum: s.clone(),
            scaled,
            integral,
        });
    }
    let class_clause = classes.iter().all(|c| c.integral);
    let scaled_integral = b.mul(r, f.integral()?)?;
    let integral_clause = b.membership(&scaled_integral, Target::ZPlusZAlphaMod1)?.member;
    Ok(EigenReport {
        r: r.clone(),
        classes,
        class_clause,
        scaled_integral,
        integral_clause,
        solvable: class_clause && integral_clause,
    })
}

pub(super) fn weak_mixing_verdict(f: &RoofPC) -> Result<WeakMixing> {
    let p1 = check_p1(f)?;
    if !p1.holds {
        return Ok(WeakMixing::Unknown("P1 fails".into()));
    }
    match check_p2(f) {
        Ok(v) if v.holds => Ok(WeakMixing::WeaklyMixing),
        Ok(_) => Ok(WeakMixing::Unknown("P2 fails".into())),
        Err(Error::InsufficientStructure(m)) => Ok(WeakMixing::Unknown(format!("P2 undecided: {m}"))),
        Err(e) => Err(e),
    }
}
