//! Fixed-width lattice routines for the classification hot loop.
//!
//! The kernel of a degree matrix is computed as a lattice of congruences in
//! `Z^n` (dropping the last coordinate, which is determined by the others),
//! with every intermediate entry reduced modulo a multiple `E` of the lattice
//! exponent. Entries therefore never exceed `E^2`.

use num_traits::{Euclid, PrimInt, Signed};

use crate::arith::{modulo, mul_mod, Int};

/// Whether the rows of `mat` are linearly independent over `F_p`.
pub fn full_row_rank_mod(mat: &[Vec<Int>], p: Int) -> bool {
    let rows = mat.len();
    if rows == 0 {
        return true;
    }
    let cols = mat[0].len();
    if rows > cols {
        return false;
    }
    let mut a: Vec<Vec<Int>> = mat.iter().map(|r| r.iter().map(|&x| modulo(x, p)).collect()).collect();
    let mut r = 0;
    for c in 0..cols {
        let Some(piv) = (r..rows).find(|&i| a[i][c] != 0) else { continue };
        a.swap(r, piv);
        let inv = crate::arith::mod_inverse(a[r][c], p).expect("prime modulus");
        for i in r + 1..rows {
            if a[i][c] != 0 {
                let f = mul_mod(a[i][c], inv, p);
                for j in c..cols {
                    a[i][j] = modulo(a[i][j] - mul_mod(f, a[r][j], p), p);
                }
            }
        }
        r += 1;
        if r == rows {
            return true;
        }
    }
    false
}

/// Whether the maximal minors of `mat` generate `Z/μ`, where `primes` are the
/// prime divisors of `μ`. Equivalent to full rank modulo each of them.
pub fn minors_generate(mat: &[Vec<Int>], primes: &[Int]) -> bool {
    primes.iter().all(|&p| full_row_rank_mod(mat, p))
}

/// Row-style Hermite basis of `{x ∈ Z^{n+1} : Σ w_i x_i = 0, Σ_i η_ij x_i ≡ 0 mod μ_j}`.
///
/// `rows` holds `(μ_j, η_{*j})`. The returned `n × (n+1)` matrix has its pivots
/// on the diagonal of the first `n` columns.
pub fn kernel_hermite(weights: &[Int], rows: &[(Int, &[Int])]) -> Vec<Vec<Int>> {
    let n = weights.len() - 1;
    let exponent = rows.iter().map(|r| r.0).max().unwrap_or(1);
    let modulus = weights[n].checked_mul(exponent).expect("kernel modulus overflow");
    let mut basis: Vec<Vec<Int>> = (0..n).map(|i| (0..n).map(|j| Int::from(i == j)).collect()).collect();
    basis = restrict(&basis, &weights[..n], weights[n], modulus);
    for &(mu, eta) in rows {
        let (a, m) = torsion_congruence(weights, mu, eta);
        basis = restrict(&basis, &a, m, modulus);
    }
    append_last(basis, weights)
}

/// Hermite basis of `{x ∈ Λ : Σ ζ_i x_i ≡ 0 mod μ}` where `kernel` is the
/// Hermite basis of a lattice `Λ` in the hyperplane `Σ w_i x_i = 0`, as
/// returned by [`kernel_hermite`], and `top` is the largest torsion order of
/// the result.
pub fn restrict_kernel(weights: &[Int], kernel: &[Vec<Int>], mu: Int, zeta: &[Int], top: Int) -> Vec<Vec<Int>> {
    let n = weights.len() - 1;
    let modulus = weights[n].checked_mul(top).expect("kernel modulus overflow");
    let projected: Vec<Vec<Int>> = kernel.iter().map(|r| r[..n].to_vec()).collect();
    let (a, m) = torsion_congruence(weights, mu, zeta);
    append_last(restrict(&projected, &a, m, modulus), weights)
}

/// `(v, m)` such that `x = Σ c_j K_j` lies in the restriction of the kernel
/// `K` by `ζ` iff `Σ c_j v_j ≡ 0 mod m`. `v` is scaled by a unit so that its
/// first nonzero entry divides `m`; equal outputs give equal restrictions.
pub fn restriction_key(weights: &[Int], kernel: &[Vec<Int>], mu: Int, zeta: &[Int]) -> (Vec<Int>, Int) {
    let (a, m) = torsion_congruence(weights, mu, zeta);
    congruence_key(kernel, &a, m)
}

/// [`restriction_key`] for a congruence `Σ a_i x_i ≡ 0 mod m` from
/// [`torsion_congruence`].
pub fn congruence_key(kernel: &[Vec<Int>], a: &[Int], m: Int) -> (Vec<Int>, Int) {
    let mut v: Vec<Int> = kernel
        .iter()
        .map(|k| {
            let dot = k.iter().zip(a).try_fold(0 as Int, |acc, (&x, &y)| acc.checked_add(x.checked_mul(y)?));
            match dot {
                Some(d) => modulo(d, m),
                None => k.iter().zip(a).fold(0, |acc, (&x, &y)| modulo(acc + mul_mod(x, y, m), m)),
            }
        })
        .collect();
    if let Some(&first) = v.iter().find(|&&x| x != 0) {
        let d = crate::arith::gcd(first, m);
        let small = m / d;
        let inv = crate::arith::mod_inverse(first / d, small).unwrap_or(1);
        let shift = crate::abelian::coprime_shift(inv, small, m).expect("inverse is coprime to the cofactor");
        let unit = inv + shift * small;
        if unit != 1 {
            for x in v.iter_mut() {
                *x = mul_mod(*x, unit, m);
            }
        }
    }
    (v, m)
}

/// The condition `Σ η_i x_i ≡ 0 mod μ` as `Σ a_i x_i ≡ 0 mod m` on the first
/// `n` coordinates, given that the last one is `-Σ w_i x_i / w_n`.
pub fn torsion_congruence(weights: &[Int], mu: Int, eta: &[Int]) -> (Vec<Int>, Int) {
    let n = weights.len() - 1;
    let last = weights[n];
    let m = last * mu;
    let a = (0..n).map(|i| modulo(mul_mod(last, eta[i], m) - mul_mod(weights[i], eta[n], m), m)).collect();
    (a, m)
}

fn append_last(basis: Vec<Vec<Int>>, weights: &[Int]) -> Vec<Vec<Int>> {
    let last = weights[weights.len() - 1];
    basis
        .into_iter()
        .map(|mut row| {
            let s: Int = row.iter().zip(weights).map(|(&x, &w)| x * w).sum();
            debug_assert_eq!(s % last, 0);
            row.push(-s / last);
            row
        })
        .collect()
}

// Sublattice of span(basis) cut out by Σ a_i x_i ≡ 0 mod m, in i64 when the
// modulus allows it.
fn restrict(basis: &[Vec<Int>], a: &[Int], m: Int, modulus: Int) -> Vec<Vec<Int>> {
    if modulus < 1 << 31 {
        let narrow = |v: &[Int]| -> Vec<i64> { v.iter().map(|&x| modulo(x, modulus) as i64).collect() };
        let basis: Vec<Vec<i64>> = basis.iter().map(|r| narrow(r)).collect();
        restrict_word(&basis, &narrow(a), m as i64, modulus as i64)
            .into_iter()
            .map(|r| r.into_iter().map(Int::from).collect())
            .collect()
    } else {
        restrict_word(basis, a, m, modulus)
    }
}

fn restrict_word<T: Word>(basis: &[Vec<T>], a: &[T], m: T, modulus: T) -> Vec<Vec<T>> {
    let n = a.len();
    if m.is_one() {
        return hermite_mod(basis, modulus);
    }
    let values: Vec<T> =
        basis.iter().map(|b| b.iter().zip(a).fold(T::zero(), |acc, (&x, &y)| md(acc + mm(x, y, m), m))).collect();
    let mut out = scaled_identity(n, modulus);
    let mut v = vec![T::zero(); n];
    for c in congruence_kernel(&values, m) {
        for (j, x) in v.iter_mut().enumerate() {
            *x = basis.iter().zip(&c).fold(T::zero(), |acc, (b, &ci)| md(acc + mm(ci, b[j], modulus), modulus));
        }
        insert_mod(&mut out, &mut v, modulus);
    }
    finish_reduction(&mut out, modulus);
    out
}

/// Generators of `{c ∈ Z^n : Σ c_i a_i ≡ 0 mod m}`.
///
/// Uses the kernel basis of the integer row `(m, a_0, …, a_{n-1})` built from
/// running gcds and Bezout vectors, with the first coordinate dropped.
fn congruence_kernel<T: Word>(a: &[T], m: T) -> Vec<Vec<T>> {
    let n = a.len();
    // bezout[l] for coordinates (m, a_0, ..) with Σ bezout·v = g
    let mut bezout: Vec<T> = vec![T::one()];
    let mut g = m;
    let mut out = Vec::with_capacity(2 * n);
    for i in 0..n {
        let v = a[i];
        let (ng, s, t) = xgcd_word(g, v);
        // kernel vector (v/ng)·bezout - (g/ng)·e_{i+1}
        let mut k: Vec<T> = bezout.iter().map(|&b| mm(v / ng, b, m)).collect();
        k.resize(n + 1, T::zero());
        k[i + 1] = md(-(g / ng), m);
        out.push(k[1..].to_vec());
        for b in bezout.iter_mut() {
            *b = mm(*b, s, m);
        }
        bezout.push(md(t, m));
        g = ng;
    }
    // the vectors above are only correct modulo m
    for i in 0..n {
        let mut e = vec![T::zero(); n];
        e[i] = m;
        out.push(e);
    }
    out
}

/// Machine integers the modular Hermite routines run on.
pub trait Word: Copy + Ord + PrimInt + Signed + Euclid {}
impl Word for i64 {}
impl Word for i128 {}

#[inline]
pub(crate) fn md<T: Word>(a: T, m: T) -> T {
    a.rem_euclid(&m)
}

#[inline]
pub(crate) fn mm<T: Word>(a: T, b: T, m: T) -> T {
    md(md(a, m) * md(b, m), m)
}

pub(crate) fn xgcd_word<T: Word>(a: T, b: T) -> (T, T, T) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (T::one(), T::zero());
    let (mut old_t, mut t) = (T::zero(), T::one());
    while !r.is_zero() {
        let q = old_r.div_euclid(&r);
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    if old_r < T::zero() {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

/// Upper triangular basis with every diagonal entry equal to `modulus`.
pub fn scaled_identity<T: Word>(n: usize, modulus: T) -> Vec<Vec<T>> {
    (0..n).map(|i| (0..n).map(|j| if i == j { modulus } else { T::zero() }).collect()).collect()
}

/// Adds `v` to the lattice spanned by the upper triangular `basis`, assuming
/// the lattice contains `modulus · Z^n`.
pub fn insert_mod<T: Word>(basis: &mut [Vec<T>], v: &mut [T], modulus: T) {
    let n = v.len();
    for x in v.iter_mut() {
        *x = md(*x, modulus);
    }
    for i in 0..n {
        if v[i].is_zero() {
            continue;
        }
        let b = basis[i][i];
        let (g, s, t) = xgcd_word(b, v[i]);
        let (fb, fv) = (b / g, v[i] / g);
        let (s, t) = (md(s, modulus), md(t, modulus));
        for j in i + 1..n {
            let r = basis[i][j];
            basis[i][j] = md(mm(s, r, modulus) + mm(t, v[j], modulus), modulus);
            v[j] = md(mm(fb, v[j], modulus) - mm(fv, r, modulus), modulus);
        }
        // the pivot is g, which divides the modulus
        basis[i][i] = g;
        v[i] = T::zero();
    }
}

/// Reduces entries above each pivot into `[0, pivot)` and the rest modulo `modulus`.
pub fn finish_reduction<T: Word>(basis: &mut [Vec<T>], modulus: T) {
    let n = basis.len();
    for j in 0..n {
        let p = basis[j][j];
        debug_assert!(p > T::zero());
        for i in 0..j {
            let q = basis[i][j].div_euclid(&p);
            if !q.is_zero() {
                for k in j..n {
                    let x = basis[j][k];
                    basis[i][k] = basis[i][k] - q * x;
                }
            }
            for k in j + 1..n {
                basis[i][k] = md(basis[i][k], modulus);
            }
        }
    }
}

/// Hermite basis of the lattice spanned by `rows` and `modulus · Z^n`.
pub fn hermite_mod<T: Word>(rows: &[Vec<T>], modulus: T) -> Vec<Vec<T>> {
    let n = rows.first().map_or(0, |r| r.len());
    let mut basis = scaled_identity(n, modulus);
    let mut v = vec![T::zero(); n];
    for r in rows {
        v.copy_from_slice(r);
        insert_mod(&mut basis, &mut v, modulus);
    }
    finish_reduction(&mut basis, modulus);
    basis
}
