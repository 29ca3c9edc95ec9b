//! Exact linear algebra over ℚ and ℤ on small dense matrices.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type QMatrix = Vec<Vec<BigRational>>;

/// Reduced row echelon form; returns the pivot columns.
pub fn rref(m: &mut QMatrix) -> Vec<usize> {
    let rows = m.len();
    if rows == 0 {
        return vec![];
    }
    let cols = m[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(pr) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, pr);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x = &*x * &inv;
        }
        let pivot = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, p) in row.iter_mut().zip(&pivot) {
                    *x -= &f * p;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(m: &QMatrix) -> usize {
    let mut w = m.clone();
    rref(&mut w).len()
}

/// Basis of the rational kernel `{v : M v = 0}` of a `rows × cols` matrix.
pub fn rational_kernel(m: &QMatrix, cols: usize) -> Vec<Vec<BigRational>> {
    let mut w = m.clone();
    let pivots = rref(&mut w);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![BigRational::zero(); cols];
            v[f] = BigRational::one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -w[r][f].clone();
            }
            v
        })
        .collect()
}

/// Outcome of a span test: coefficients reconstructing the target, or a
/// functional vanishing on every generator but not on the target.
#[derive(Debug, Clone, PartialEq)]
pub enum SpanSolution {
    Coefficients(Vec<BigRational>),
    Separator(Vec<BigRational>),
}

/// Decides `target ∈ span_ℚ(gens)`; all vectors have length `dim`.
pub fn solve_span(gens: &[Vec<BigRational>], target: &[BigRational], dim: usize) -> SpanSolution {
    let k = gens.len();
    // Augmented system [g_1 … g_k | t], one row per coordinate.
    let mut m: QMatrix = (0..dim)
        .map(|i| {
            let mut row: Vec<BigRational> = gens.iter().map(|g| g[i].clone()).collect();
            row.push(target[i].clone());
            row
        })
        .collect();
    let pivots = rref(&mut m);
    if pivots.contains(&k) {
        // Left kernel of the generator matrix that sees the target.
        let gt: QMatrix = gens.to_vec();
        let left = rational_kernel(&gt, dim);
        for y in left {
            let dot: BigRational = y.iter().zip(target).map(|(a, b)| a * b).sum();
            if !dot.is_zero() {
                return SpanSolution::Separator(y);
            }
        }
        unreachable!("target outside the span must be detected by the left kernel");
    }
    let mut coeffs = vec![BigRational::zero(); k];
    for (r, &pc) in pivots.iter().enumerate() {
        coeffs[pc] = m[r][k].clone();
    }
    SpanSolution::Coefficients(coeffs)
}

/// Basis of the integer lattice `{n ∈ ℤ^cols : M n = 0}` obtained from a
/// unimodular column reduction; basis vectors are primitive, size-reduced and
/// sign-normalized (first nonzero entry positive).
pub fn integer_kernel(m: &QMatrix, cols: usize) -> Vec<Vec<BigInt>> {
    // Clear denominators row by row.
    let mut a: Vec<Vec<BigInt>> = m
        .iter()
        .map(|row| {
            let l = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            row.iter().map(|x| (x * BigRational::from_integer(l.clone())).to_integer()).collect()
        })
        .collect();
    let mut u: Vec<Vec<BigInt>> = (0..cols)
        .map(|i| (0..cols).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect();
    // Column operations act on column indices of both `a` and `u`.
    let col_op = |mat: &mut Vec<Vec<BigInt>>, c: usize, j: usize, t: [&BigInt; 4]| {
        for row in mat.iter_mut() {
            let x = row[c].clone();
            let y = row[j].clone();
            row[c] = t[0] * &x + t[1] * &y;
            row[j] = t[2] * &x + t[3] * &y;
        }
    };
    let mut col = 0;
    for r in 0..a.len() {
        if col == cols {
            break;
        }
        for j in col + 1..cols {
            if a[r][j].is_zero() {
                continue;
            }
            let x = a[r][col].clone();
            let y = a[r][j].clone();
            let e = x.extended_gcd(&y);
            let (g, s, t) = (e.gcd, e.x, e.y);
            let mx = -(&y / &g);
            let my = &x / &g;
            col_op(&mut a, col, j, [&s, &t, &mx, &my]);
            col_op(&mut u, col, j, [&s, &t, &mx, &my]);
        }
        if !a[r][col].is_zero() {
            col += 1;
        }
    }
    let mut basis: Vec<Vec<BigInt>> = (col..cols).map(|c| u.iter().map(|row| row[c].clone()).collect()).collect();
    size_reduce(&mut basis);
    for v in basis.iter_mut() {
        if let Some(first) = v.iter().find(|x| !x.is_zero()) {
            if first.is_negative() {
                for x in v.iter_mut() {
                    *x = -x.clone();
                }
            }
        }
    }
    basis
}

fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Pairwise Gauss reduction until no vector shortens; keeps the lattice.
fn size_reduce(basis: &mut [Vec<BigInt>]) {
    let n = basis.len();
    let mut changed = true;
    while changed {
        changed = false;
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let bj2 = dot(&basis[j], &basis[j]);
                if bj2.is_zero() {
                    continue;
                }
                let num = dot(&basis[i], &basis[j]);
                // k = round(num / bj2)
                let two = BigInt::from(2);
                let k = (&num * &two + &bj2).div_floor(&(&bj2 * &two));
                if k.is_zero() {
                    continue;
                }
                let cand: Vec<BigInt> = basis[i].iter().zip(&basis[j]).map(|(x, y)| x - &k * y).collect();
                if dot(&cand, &cand) < dot(&basis[i], &basis[i]) {
                    basis[i] = cand;
                    changed = true;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn kernel_of_one_relation() {
        let m = vec![vec![q(1), q(-1)]];
        assert_eq!(integer_kernel(&m, 2), vec![ints(&[1, 1])]);
    }

    #[test]
    fn kernel_with_independent_column() {
        let m = vec![vec![q(1), q(2), q(0)], vec![q(0), q(0), q(1)]];
        assert_eq!(integer_kernel(&m, 3), vec![ints(&[2, -1, 0])]);
    }

    #[test]
    fn kernel_is_saturated() {
        // 2x + 4y = 0 over ℚ has kernel spanned by (2,-1); (−2, 1) primitive.
        let m = vec![vec![q(2), q(4)]];
        let k = integer_kernel(&m, 2);
        assert_eq!(k, vec![ints(&[2, -1])]);
        // x − y + 0z = 0, fractional entries.
        let m = vec![vec![BigRational::new(1.into(), 3.into()), BigRational::new((-1).into(), 3.into()), q(0)]];
        let k = integer_kernel(&m, 3);
        assert_eq!(k.len(), 2);
        for v in &k {
            assert_eq!(&v[0], &v[1]);
        }
    }

    #[test]
    fn span_and_separator() {
        let gens = vec![vec![q(1), q(0), q(0)], vec![q(0), q(1), q(0)]];
        match solve_span(&gens, &[q(2), q(3), q(0)], 3) {
            SpanSolution::Coefficients(c) => assert_eq!(c, vec![q(2), q(3)]),
            other => panic!("{other:?}"),
        }
        match solve_span(&gens, &[q(0), q(0), q(5)], 3) {
            SpanSolution::Separator(y) => {
                assert!(y[0].is_zero() && y[1].is_zero() && !y[2].is_zero());
            }
            other => panic!("{other:?}"),
        }
    }
}
