//! Exact integer matrix routines on arbitrary-precision entries.
//!
//! These are the general (slow-path) algorithms: determinants, Hermite and
//! Smith normal forms with transforms. The classification hot loop uses the
//! modular kernel routines in [`crate::lattice`] instead.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::Int;

pub type BigMatrix = Vec<Vec<BigInt>>;

pub fn to_big(m: &[Vec<Int>]) -> BigMatrix {
    m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
}

/// Converts back to `Int`, failing if an entry does not fit.
pub fn from_big(m: &BigMatrix) -> Option<Vec<Vec<Int>>> {
    m.iter()
        .map(|r| r.iter().map(|x| x.to_i128()).collect::<Option<Vec<_>>>())
        .collect()
}

pub fn identity(n: usize) -> BigMatrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect()
}

pub fn transpose<T: Clone>(m: &[Vec<T>]) -> Vec<Vec<T>> {
    if m.is_empty() {
        return Vec::new();
    }
    (0..m[0].len()).map(|j| m.iter().map(|r| r[j].clone()).collect()).collect()
}

pub fn mat_mul(a: &BigMatrix, b: &BigMatrix) -> BigMatrix {
    let inner = b.len();
    let cols = if inner == 0 { 0 } else { b[0].len() };
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).fold(BigInt::zero(), |acc, k| acc + &row[k] * &b[k][j]))
                .collect()
        })
        .collect()
}

/// Determinant of a square matrix by fraction-free (Bareiss) elimination.
pub fn determinant(m: &BigMatrix) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a = m.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                a[i][j] = v;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

pub fn determinant_int(m: &[Vec<Int>]) -> BigInt {
    determinant(&to_big(m))
}

/// Column subsets of size `k` out of `n`, in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Rank over the rationals.
pub fn rank(m: &BigMatrix) -> usize {
    let mut a = m.clone();
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, p);
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let (f, g) = (a[i][c].clone(), a[r][c].clone());
                for j in 0..cols {
                    a[i][j] = &a[i][j] * &g - &a[r][j] * &f;
                }
            }
        }
        r += 1;
        if r == rows {
            break;
        }
    }
    r
}

/// Row-style Hermite normal form under left unimodular action.
///
/// Pivots are strictly positive, entries below a pivot are zero and entries
/// above a pivot are reduced into `[0, pivot)`. Returns the reduced rows and the
/// pivot columns; zero rows of a rank-deficient input are dropped.
pub fn hermite(m: &BigMatrix) -> (BigMatrix, Vec<usize>) {
    let mut a = m.clone();
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        loop {
            // smallest nonzero entry in this column at or below row r becomes the pivot
            let mut best: Option<usize> = None;
            for i in r..rows {
                if !a[i][c].is_zero() && best.is_none_or(|b| a[i][c].abs() < a[b][c].abs()) {
                    best = Some(i);
                }
            }
            let Some(p) = best else { break };
            a.swap(r, p);
            let mut clean = true;
            for i in r + 1..rows {
                if a[i][c].is_zero() {
                    continue;
                }
                let q = a[i][c].div_floor(&a[r][c]);
                let pivot_row = a[r].clone();
                for (x, y) in a[i].iter_mut().zip(&pivot_row) {
                    *x -= &q * y;
                }
                if !a[i][c].is_zero() {
                    clean = false;
                }
            }
            if clean {
                break;
            }
        }
        if a[r][c].is_zero() {
            continue;
        }
        if a[r][c].is_negative() {
            for x in a[r].iter_mut() {
                *x = -&*x;
            }
        }
        let pivot_row = a[r].clone();
        for i in 0..r {
            let q = a[i][c].div_floor(&pivot_row[c]);
            if !q.is_zero() {
                for (x, y) in a[i].iter_mut().zip(&pivot_row) {
                    *x -= &q * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    a.truncate(r);
    (a, pivots)
}

/// Smith normal form `U * A * V = D` with `U`, `V` unimodular and the diagonal
/// of `D` nonnegative with each entry dividing the next.
pub struct Smith {
    pub u: BigMatrix,
    pub d: BigMatrix,
    pub v: BigMatrix,
}

impl Smith {
    pub fn diagonal(&self) -> Vec<BigInt> {
        let k = self.d.len().min(self.d.first().map_or(0, |r| r.len()));
        (0..k).map(|i| self.d[i][i].clone()).collect()
    }
}

pub fn smith(m: &BigMatrix) -> Smith {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut a = m.clone();
    let mut u = identity(rows);
    let mut v = identity(cols);

    let row_op = |a: &mut BigMatrix, u: &mut BigMatrix, dst: usize, src: usize, f: &BigInt| {
        let s = a[src].clone();
        for (x, y) in a[dst].iter_mut().zip(&s) {
            *x += f * y;
        }
        let s = u[src].clone();
        for (x, y) in u[dst].iter_mut().zip(&s) {
            *x += f * y;
        }
    };
    let col_op = |a: &mut BigMatrix, v: &mut BigMatrix, dst: usize, src: usize, f: &BigInt| {
        for r in a.iter_mut() {
            let y = r[src].clone();
            r[dst] += f * y;
        }
        for r in v.iter_mut() {
            let y = r[src].clone();
            r[dst] += f * y;
        }
    };

    for t in 0..rows.min(cols) {
        loop {
            // move the smallest nonzero entry of the trailing block to (t, t)
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    if !a[i][j].is_zero()
                        && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs())
                    {
                        best = Some((i, j));
                    }
                }
            }
            let Some((bi, bj)) = best else { break };
            if bi != t {
                a.swap(bi, t);
                u.swap(bi, t);
            }
            if bj != t {
                for r in a.iter_mut() {
                    r.swap(bj, t);
                }
                for r in v.iter_mut() {
                    r.swap(bj, t);
                }
            }
            let mut done = true;
            for i in t + 1..rows {
                if !a[i][t].is_zero() {
                    let q = -a[i][t].div_floor(&a[t][t]);
                    row_op(&mut a, &mut u, i, t, &q);
                    if !a[i][t].is_zero() {
                        done = false;
                    }
                }
            }
            for j in t + 1..cols {
                if !a[t][j].is_zero() {
                    let q = -a[t][j].div_floor(&a[t][t]);
                    col_op(&mut a, &mut v, j, t, &q);
                    if !a[t][j].is_zero() {
                        done = false;
                    }
                }
            }
            if !done {
                continue;
            }
            // divisibility of the trailing block by the pivot
            let mut fix = None;
            'outer: for i in t + 1..rows {
                for j in t + 1..cols {
                    if !(&a[i][j] % &a[t][t]).is_zero() {
                        fix = Some(i);
                        break 'outer;
                    }
                }
            }
            match fix {
                Some(i) => row_op(&mut a, &mut u, t, i, &BigInt::one()),
                None => break,
            }
        }
        if a[t][t].is_negative() {
            for x in a[t].iter_mut() {
                *x = -&*x;
            }
            for x in u[t].iter_mut() {
                *x = -&*x;
            }
        }
    }
    Smith { u, d: a, v }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(m: &[&[i64]]) -> BigMatrix {
        m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
    }

    #[test]
    fn determinant_matches_cofactor() {
        let m = big(&[&[2, -1, 3], &[0, 4, 1], &[5, 2, -2]]);
        // 2*(4*-2 - 1*2) - (-1)*(0*-2 - 1*5) + 3*(0*2 - 4*5) = -20 - 5 - 60
        assert_eq!(determinant(&m), BigInt::from(-85));
        assert_eq!(determinant(&big(&[&[1, 2], &[2, 4]])), BigInt::zero());
    }

    #[test]
    fn hermite_sign_and_reduction() {
        let (h, p) = hermite(&big(&[&[-2, -4]]));
        assert_eq!(h, big(&[&[2, 4]]));
        assert_eq!(p, vec![0]);
        let (h, _) = hermite(&big(&[&[1, 0, -1], &[0, 1, -1]]));
        assert_eq!(h, big(&[&[1, 0, -1], &[0, 1, -1]]));
        let (h, p) = hermite(&big(&[&[2, 3, 1], &[4, 1, 0]]));
        assert_eq!(p, vec![0, 1]);
        assert!(h[1][1] > BigInt::zero());
        assert!(h[0][1] >= BigInt::zero() && h[0][1] < h[1][1]);
    }

    #[test]
    fn smith_reconstructs() {
        let m = big(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]);
        let s = smith(&m);
        assert_eq!(mat_mul(&mat_mul(&s.u, &m), &s.v), s.d);
        assert_eq!(s.diagonal(), vec![BigInt::from(2), BigInt::from(6), BigInt::from(12)]);
        assert_eq!(determinant(&s.u).abs(), BigInt::one());
        assert_eq!(determinant(&s.v).abs(), BigInt::one());
    }

    #[test]
    fn combinations_count() {
        assert_eq!(combinations(5, 2).len(), 10);
        assert_eq!(combinations(3, 0), vec![Vec::<usize>::new()]);
        assert!(combinations(2, 3).is_empty());
    }
}
