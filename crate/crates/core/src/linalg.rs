//! Exact linear algebra over the rationals and the integers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::scalar::Rat;

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref(m: &mut Vec<Vec<Rat>>, ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..ncols {
        if row == m.len() {
            break;
        }
        let Some(p) = (row..m.len()).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let inv = Rat::one() / &m[row][col];
        for x in m[row].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..m.len() {
            if i != row && !m[i][col].is_zero() {
                let f = m[i][col].clone();
                for j in 0..m[i].len() {
                    let v = &m[row][j] * &f;
                    m[i][j] = &m[i][j] - &v;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    m.truncate(row);
    pivots
}

/// A basis of `{x : M x = 0}`.
pub fn nullspace(rows: &[Vec<Rat>], ncols: usize) -> Vec<Vec<Rat>> {
    let mut m = rows.to_vec();
    let pivots = rref(&mut m, ncols);
    let mut basis = Vec::new();
    for free in (0..ncols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![Rat::zero(); ncols];
        v[free] = Rat::one();
        for (r, &pc) in pivots.iter().enumerate() {
            v[pc] = -m[r][free].clone();
        }
        basis.push(v);
    }
    basis
}

pub fn rank(rows: &[Vec<Rat>], ncols: usize) -> usize {
    let mut m = rows.to_vec();
    rref(&mut m, ncols).len()
}

/// One solution of `M x = b`, if any (free variables set to zero).
pub fn solve(rows: &[Vec<Rat>], rhs: &[Rat], ncols: usize) -> Option<Vec<Rat>> {
    let mut m: Vec<Vec<Rat>> = rows
        .iter()
        .zip(rhs)
        .map(|(r, b)| {
            let mut r = r.clone();
            r.push(b.clone());
            r
        })
        .collect();
    let pivots = rref(&mut m, ncols + 1);
    if pivots.last() == Some(&ncols) {
        return None;
    }
    let mut x = vec![Rat::zero(); ncols];
    for (r, &pc) in pivots.iter().enumerate() {
        x[pc] = m[r][ncols].clone();
    }
    Some(x)
}

/// Diagonal of the Smith normal form of an integer matrix (nonzero entries
/// only, each dividing the next).
pub fn smith_diagonal(mut a: Vec<Vec<BigInt>>) -> Vec<BigInt> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut out = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        // smallest nonzero entry of the trailing block
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if !a[i][j].is_zero() && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((bi, bj)) = best else { break };
        a.swap(t, bi);
        for row in a.iter_mut() {
            row.swap(t, bj);
        }
        let mut clean = true;
        for i in (t + 1)..rows {
            let q = a[i][t].div_floor(&a[t][t]);
            if !q.is_zero() {
                for j in t..cols {
                    let v = &q * &a[t][j];
                    a[i][j] -= v;
                }
            }
            clean &= a[i][t].is_zero();
        }
        for j in (t + 1)..cols {
            let q = a[t][j].div_floor(&a[t][t]);
            if !q.is_zero() {
                for i in t..rows {
                    let v = &q * &a[i][t];
                    a[i][j] -= v;
                }
            }
            clean &= a[t][j].is_zero();
        }
        if !clean {
            continue;
        }
        // the pivot must divide the rest of the block
        let bad = (t + 1..rows).flat_map(|i| (t + 1..cols).map(move |j| (i, j))).find(|&(i, j)| !(&a[i][j] % &a[t][t]).is_zero());
        if let Some((i, _)) = bad {
            for j in t..cols {
                let v = a[i][j].clone();
                a[t][j] += v;
            }
            continue;
        }
        out.push(a[t][t].abs());
        t += 1;
    }
    out
}

/// Invariant factors (> 1) of `(Z^k + sum Z e_i) / Z^k` for rational vectors
/// `e_i` of length `k`.
pub fn torsion_invariants(vectors: &[Vec<Rat>], k: usize) -> Vec<BigInt> {
    let mut n = BigInt::one();
    for v in vectors {
        for x in v {
            n = n.lcm(x.denom());
        }
    }
    if n.is_one() || k == 0 {
        return Vec::new();
    }
    let mut rows: Vec<Vec<BigInt>> = vectors.iter().map(|v| v.iter().map(|x| (x * Rat::from_integer(n.clone())).to_integer()).collect()).collect();
    for i in 0..k {
        let mut r = vec![BigInt::zero(); k];
        r[i] = n.clone();
        rows.push(r);
    }
    let diag = smith_diagonal(rows);
    let mut out: Vec<BigInt> = diag.into_iter().map(|d| &n / d).filter(|f| f > &BigInt::one()).collect();
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, rat_int};

    #[test]
    fn nullspace_and_solve() {
        let m = vec![vec![rat_int(1), rat_int(2), rat_int(3)], vec![rat_int(2), rat_int(4), rat_int(6)]];
        assert_eq!(rank(&m, 3), 1);
        let ns = nullspace(&m, 3);
        assert_eq!(ns.len(), 2);
        let x = solve(&m, &[rat_int(1), rat_int(2)], 3).unwrap();
        assert_eq!(x[0], rat_int(1));
        assert!(solve(&m, &[rat_int(1), rat_int(3)], 3).is_none());
    }

    #[test]
    fn smith() {
        let m = vec![vec![BigInt::from(2), BigInt::from(4)], vec![BigInt::from(6), BigInt::from(8)]];
        assert_eq!(smith_diagonal(m), vec![BigInt::from(2), BigInt::from(4)]);
    }

    #[test]
    fn torsion() {
        assert_eq!(torsion_invariants(&[vec![rat(1, 2)]], 1), vec![BigInt::from(2)]);
        assert_eq!(torsion_invariants(&[vec![rat(3, 2)], vec![rat(-1, 2)]], 1), vec![BigInt::from(2)]);
        let klein = torsion_invariants(&[vec![rat(1, 2), rat(0, 1)], vec![rat(0, 1), rat(1, 2)]], 2);
        assert_eq!(klein, vec![BigInt::from(2), BigInt::from(2)]);
        assert_eq!(torsion_invariants(&[vec![rat(1, 2), rat(1, 3)]], 2), vec![BigInt::from(6)]);
        assert!(torsion_invariants(&[vec![rat_int(4)]], 1).is_empty());
    }
}
