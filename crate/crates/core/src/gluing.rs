//! Stacking minimal torsion rows on a weight vector into degree matrices.

use std::collections::{BTreeMap, HashSet};

use crate::arith::{prime_divisors, Int};
use crate::error::{Error, Result};
use crate::invariants::DegreeMatrix;
use crate::lattice::{self, minors_generate};
use crate::normal_form::{Canonicalizer, NormalForm};
use crate::torsion::all_minimal_torsion;

/// The minimal Gorenstein torsion vectors of a weight vector, sorted by order
/// descending and then lexicographically ascending.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorsionPool {
    weights: Vec<Int>,
    entries: Vec<(Int, Vec<Int>)>,
}

impl TorsionPool {
    pub fn new(weights: &[Int]) -> Self {
        Self { weights: weights.to_vec(), entries: all_minimal_torsion(weights) }
    }

    pub fn from_entries(weights: &[Int], mut entries: Vec<(Int, Vec<Int>)>) -> Self {
        entries.sort_unstable_by(|x, y| y.0.cmp(&x.0).then_with(|| x.1.cmp(&y.1)));
        entries.dedup();
        Self { weights: weights.to_vec(), entries }
    }

    pub fn weights(&self) -> &[Int] {
        &self.weights
    }

    pub fn entries(&self) -> &[(Int, Vec<Int>)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Whether every `n` columns of `[w; η_1; …; η_r; ζ]` keep maximal minors that
/// generate `Z/μ`, i.e. the stack has full row rank modulo every `p | μ` after
/// any single column is deleted.
fn extension_generates(weights: &[Int], rows: &[&[Int]], zeta: &[Int], primes: &[Int]) -> bool {
    let n1 = weights.len();
    (0..n1).all(|skip| {
        let pick = |r: &[Int]| -> Vec<Int> { (0..n1).filter(|&j| j != skip).map(|j| r[j]).collect() };
        let mut m = Vec::with_capacity(rows.len() + 2);
        m.push(pick(weights));
        m.extend(rows.iter().map(|r| pick(r)));
        m.push(pick(zeta));
        minors_generate(&m, primes)
    })
}

// reduced echelon rows mod p, each with its pivot column
type Rows = Vec<(usize, Vec<i64>)>;

/// Reduced echelon forms modulo a prime of the stack `[w; η_1; …]` with one
/// column deleted, one per deleted column.
struct Echelon {
    p: i64,
    // per deleted column: rows normalized to pivot 1 with their pivot index,
    // or None when the stack itself is already dependent
    forms: Vec<Option<Rows>>,
}

impl Echelon {
    fn new(weights: &[Int], rows: &[&[Int]], p: Int) -> Self {
        let n1 = weights.len();
        let pm = p as i64;
        let forms = (0..n1)
            .map(|skip| {
                let pick = |r: &[Int]| -> Vec<i64> {
                    (0..n1).filter(|&j| j != skip).map(|j| r[j].rem_euclid(p) as i64).collect()
                };
                let mut echelon: Vec<(usize, Vec<i64>)> = Vec::new();
                for r in std::iter::once(weights).chain(rows.iter().copied()) {
                    echelon.push(reduce(&echelon, pick(r), pm)?);
                }
                Some(echelon)
            })
            .collect();
        Self { p: pm, forms }
    }

    // ζ, given modulo p, stays independent of the stack after every single deletion
    fn accepts(&self, zeta: &[i64]) -> bool {
        let n1 = zeta.len();
        self.forms.iter().enumerate().all(|(skip, echelon)| {
            let Some(echelon) = echelon else { return false };
            let v = (0..n1).filter(|&j| j != skip).map(|j| zeta[j]).collect();
            reduce(echelon, v, self.p).is_some()
        })
    }
}

// Reduces `v` against the echelon rows; a nonzero remainder comes back
// normalized with its pivot.
fn reduce(echelon: &[(usize, Vec<i64>)], mut v: Vec<i64>, p: i64) -> Option<(usize, Vec<i64>)> {
    for (c, row) in echelon {
        let f = v[*c];
        if f != 0 {
            for (x, &y) in v.iter_mut().zip(row) {
                *x = (*x - f * y).rem_euclid(p);
            }
        }
    }
    let c = v.iter().position(|&x| x != 0)?;
    let inv = crate::arith::mod_inverse(Int::from(v[c]), Int::from(p)).expect("prime modulus") as i64;
    for x in v.iter_mut() {
        *x = *x * inv % p;
    }
    Some((c, v))
}

/// Appends `ζ` of order `μ` as a new torsion row when the result is again a
/// degree matrix; `Ok(None)` means the extension is rejected.
pub fn extend_degree_matrix(q: &DegreeMatrix, mu: Int, zeta: &[Int]) -> Result<Option<DegreeMatrix>> {
    if mu < 2 {
        return Err(Error::InvalidArgument(format!("torsion order {mu} < 2")));
    }
    if zeta.len() != q.weights().len() {
        return Err(Error::DimensionMismatch(format!(
            "row of length {} for {} columns",
            zeta.len(),
            q.weights().len()
        )));
    }
    if q.factors().last().is_some_and(|&last| last % mu != 0) {
        return Ok(None);
    }
    let zeta: Vec<Int> = zeta.iter().map(|&x| x.rem_euclid(mu)).collect();
    let rows: Vec<&[Int]> = q.torsion().iter().map(|r| r.as_slice()).collect();
    if !extension_generates(q.weights(), &rows, &zeta, &prime_divisors(mu)) {
        return Ok(None);
    }
    let mut factors = q.factors().to_vec();
    factors.push(mu);
    let mut torsion = q.torsion().to_vec();
    torsion.push(zeta);
    Ok(Some(DegreeMatrix::sorted(q.weights().to_vec(), factors, torsion)))
}

/// Every degree matrix over `w` reachable by stacking pool rows: orders
/// non-increasing and dividing, equal orders strictly increasing, each prefix
/// a degree matrix. With `prune`, a row rejected at some node is not tried
/// again below it.
pub fn assemble_all(pool: &TorsionPool, prune: bool) -> Vec<DegreeMatrix> {
    let primes: Vec<Vec<Int>> = pool.entries.iter().map(|e| prime_divisors(e.0)).collect();
    let mut out = vec![DegreeMatrix::sorted(pool.weights.clone(), Vec::new(), Vec::new())];
    let mut stack: Vec<usize> = Vec::new();
    let all: Vec<usize> = (0..pool.len()).collect();
    descend(pool, &primes, &all, prune, &mut stack, &mut out);
    out
}

/// One degree matrix per isomorphism class over `w`, keyed by normal form
/// bytes.
///
/// Works level by level in the number of torsion rows: every representative
/// of the previous level is extended by each pool row whose order divides its
/// last factor, and the results are reduced to one per normal form. Dropping
/// the last row of a degree matrix gives a degree matrix, and an isomorphism
/// of the prefix carries the dropped row to a row of the same order whose least
/// representative is in the pool, so no class is lost.
pub fn assemble_classes(pool: &TorsionPool) -> BTreeMap<Vec<u8>, (DegreeMatrix, NormalForm)> {
    let w = &pool.weights;
    let canon = Canonicalizer::new(w);
    // per pool row: (p, ζ mod p) for each prime p | μ, and its kernel congruence
    let residues: Vec<Vec<(Int, Vec<i64>)>> = pool
        .entries
        .iter()
        .map(|(mu, zeta)| {
            prime_divisors(*mu).into_iter().map(|p| (p, zeta.iter().map(|x| x.rem_euclid(p) as i64).collect())).collect()
        })
        .collect();
    let congruences: Vec<(Vec<Int>, Int)> =
        pool.entries.iter().map(|(mu, zeta)| lattice::torsion_congruence(w, *mu, zeta)).collect();
    let root = DegreeMatrix::sorted(w.clone(), Vec::new(), Vec::new());
    let root_kernel = lattice::kernel_hermite(w, &[]);
    let nf = canon.normal_form_of_kernel(&root_kernel, 1);
    let mut classes = BTreeMap::new();
    classes.insert(nf.to_bytes(), (root.clone(), nf));
    let mut level = vec![(root, root_kernel)];
    // the kernel fixes the lattice, so equal kernels are one class
    let mut seen: HashSet<Vec<Vec<Int>>> = HashSet::new();
    while !level.is_empty() {
        let mut next = BTreeMap::new();
        for (q, kernel) in &level {
            let rows: Vec<&[Int]> = q.torsion().iter().map(|r| r.as_slice()).collect();
            let last = q.factors().last().copied();
            let top = q.factors().first().copied();
            let mut echelons: Vec<Echelon> = Vec::new();
            let mut keys: HashSet<(Vec<Int>, Int)> = HashSet::new();
            for (c, (mu, zeta)) in pool.entries.iter().enumerate() {
                if last.is_some_and(|l| l % mu != 0) {
                    continue;
                }
                let generates = residues[c].iter().all(|(p, zeta_p)| {
                    let p = *p;
                    let i = match echelons.iter().position(|e| e.p as Int == p) {
                        Some(i) => i,
                        None => {
                            echelons.push(Echelon::new(w, &rows, p));
                            echelons.len() - 1
                        }
                    };
                    echelons[i].accepts(zeta_p)
                });
                if !generates {
                    continue;
                }
                let (a, m) = &congruences[c];
                if !keys.insert(lattice::congruence_key(kernel, a, *m)) {
                    continue;
                }
                let top = top.unwrap_or(*mu);
                let sub = lattice::restrict_kernel(w, kernel, *mu, zeta, top);
                if seen.contains(&sub) {
                    continue;
                }
                let nf = canon.normal_form_of_kernel(&sub, top);
                seen.insert(sub.clone());
                let key = nf.to_bytes();
                if !classes.contains_key(&key) {
                    let mut factors = q.factors().to_vec();
                    factors.push(*mu);
                    let mut torsion = q.torsion().to_vec();
                    torsion.push(zeta.clone());
                    let ext = DegreeMatrix::sorted(w.clone(), factors, torsion);
                    classes.insert(key.clone(), (ext.clone(), nf));
                    next.insert(key, (ext, sub));
                }
            }
        }
        level = next.into_values().collect();
    }
    classes
}

fn descend(
    pool: &TorsionPool,
    primes: &[Vec<Int>],
    candidates: &[usize],
    prune: bool,
    stack: &mut Vec<usize>,
    out: &mut Vec<DegreeMatrix>,
) {
    let rows: Vec<&[Int]> = stack.iter().map(|&i| pool.entries[i].1.as_slice()).collect();
    let last = stack.last().map(|&i| &pool.entries[i]);
    let accepted: Vec<usize> = candidates
        .iter()
        .copied()
        .filter(|&c| {
            let (mu, zeta) = &pool.entries[c];
            let ordered = match last {
                None => true,
                Some((m, eta)) => m % mu == 0 && (m != mu || zeta > eta),
            };
            ordered && extension_generates(&pool.weights, &rows, zeta, &primes[c])
        })
        .collect();
    for (k, &c) in accepted.iter().enumerate() {
        stack.push(c);
        out.push(DegreeMatrix::sorted(
            pool.weights.clone(),
            stack.iter().map(|&i| pool.entries[i].0).collect(),
            stack.iter().map(|&i| pool.entries[i].1.clone()).collect(),
        ));
        if prune {
            descend(pool, primes, &accepted[k + 1..], prune, stack, out);
        } else {
            let rest: Vec<usize> = (c + 1..pool.len()).collect();
            descend(pool, primes, &rest, prune, stack, out);
        }
        stack.pop();
    }
}
