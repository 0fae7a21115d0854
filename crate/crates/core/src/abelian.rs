//! Finitely generated abelian groups in invariant factor form
//! `Z^k ⊕ Z/μ_1 ⊕ … ⊕ Z/μ_r` with `μ_{j+1} | μ_j`, their endomorphism
//! matrices ("G-matrices") and an explicit generating set of the
//! automorphism group.
//!
//! All indices in this module are zero-based: free coordinates are
//! `0..k` and torsion coordinates `0..r`.

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{crt, gcd, gcd_all, mod_inverse, modulo, mul_mod, prime_divisors, xgcd, Int};
use crate::error::{Error, Result};
use crate::intmat::{self, combinations};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct InvariantFactorGroup {
    rank: usize,
    factors: Vec<Int>,
}

impl InvariantFactorGroup {
    pub fn new(rank: usize, factors: Vec<Int>) -> Result<Self> {
        if let Some(&m) = factors.iter().find(|&&m| m < 2) {
            return Err(Error::InvalidGroup(format!("torsion factor {m} < 2")));
        }
        for pair in factors.windows(2) {
            if pair[0] % pair[1] != 0 {
                return Err(Error::InvalidGroup(format!(
                    "{} does not divide {}",
                    pair[1], pair[0]
                )));
            }
        }
        Ok(Self { rank, factors })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn factors(&self) -> &[Int] {
        &self.factors
    }

    /// Number of cyclic summands, `k + r`.
    pub fn len(&self) -> usize {
        self.rank + self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn torsion_order(&self) -> Int {
        self.factors.iter().product()
    }

    pub fn zero(&self) -> GroupElement {
        GroupElement { free: vec![0; self.rank], torsion: vec![0; self.factors.len()] }
    }

    /// Generator `e_i` of the `i`-th cyclic summand (free ones first).
    pub fn basis(&self, i: usize) -> GroupElement {
        let mut e = self.zero();
        if i < self.rank {
            e.free[i] = 1;
        } else {
            e.torsion[i - self.rank] = 1;
        }
        e
    }

    /// Builds an element, reducing torsion coordinates to canonical representatives.
    pub fn element(&self, free: Vec<Int>, torsion: Vec<Int>) -> Result<GroupElement> {
        if free.len() != self.rank || torsion.len() != self.factors.len() {
            return Err(Error::GroupMismatch(format!(
                "element has shape ({}, {}), group has ({}, {})",
                free.len(),
                torsion.len(),
                self.rank,
                self.factors.len()
            )));
        }
        let torsion = torsion.iter().zip(&self.factors).map(|(&t, &m)| modulo(t, m)).collect();
        Ok(GroupElement { free, torsion })
    }

    /// Builds an element from its `k + r` coordinates.
    pub fn element_from_coords(&self, coords: &[Int]) -> Result<GroupElement> {
        if coords.len() != self.len() {
            return Err(Error::GroupMismatch(format!(
                "{} coordinates for a group with {} summands",
                coords.len(),
                self.len()
            )));
        }
        self.element(coords[..self.rank].to_vec(), coords[self.rank..].to_vec())
    }

    pub fn contains(&self, e: &GroupElement) -> bool {
        e.free.len() == self.rank
            && e.torsion.len() == self.factors.len()
            && e.torsion.iter().zip(&self.factors).all(|(&t, &m)| (0..m).contains(&t))
    }

    fn check(&self, e: &GroupElement) -> Result<()> {
        if self.contains(e) {
            Ok(())
        } else {
            Err(Error::GroupMismatch(format!("{e:?}")))
        }
    }

    pub fn add(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        GroupElement {
            free: a.free.iter().zip(&b.free).map(|(x, y)| x + y).collect(),
            torsion: a
                .torsion
                .iter()
                .zip(&b.torsion)
                .zip(&self.factors)
                .map(|((x, y), &m)| modulo(x + y, m))
                .collect(),
        }
    }

    pub fn scale(&self, a: &GroupElement, c: Int) -> GroupElement {
        GroupElement {
            free: a.free.iter().map(|x| x * c).collect(),
            torsion: a.torsion.iter().zip(&self.factors).map(|(&x, &m)| mul_mod(x, c, m)).collect(),
        }
    }
}

/// An element `(w, η)`; torsion entries are stored as representatives in `[0, μ_j)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroupElement {
    pub free: Vec<Int>,
    pub torsion: Vec<Int>,
}

impl GroupElement {
    pub fn coords(&self) -> Vec<Int> {
        self.free.iter().chain(&self.torsion).copied().collect()
    }
}

/// Matrix of an endomorphism: column `i` is the image of `e_i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GMatrix {
    group: InvariantFactorGroup,
    entries: Vec<Vec<Int>>,
}

impl GMatrix {
    pub fn identity(group: &InvariantFactorGroup) -> Self {
        let n = group.len();
        let entries =
            (0..n).map(|i| (0..n).map(|j| if i == j { 1 } else { 0 }).collect()).collect();
        let mut m = Self { group: group.clone(), entries };
        m.reduce();
        m
    }

    /// The matrix `[φ(e_1), …, φ(e_{k+r})]` of the endomorphism given by its images.
    pub fn from_endomorphism(images: &[GroupElement], group: &InvariantFactorGroup) -> Result<Self> {
        if images.len() != group.len() {
            return Err(Error::NotEndomorphism(format!(
                "{} images for {} generators",
                images.len(),
                group.len()
            )));
        }
        for img in images {
            group.check(img)?;
        }
        let n = group.len();
        let entries = (0..n).map(|i| images.iter().map(|img| img.coords()[i]).collect()).collect();
        Self::from_entries(group, entries)
    }

    /// Validates the block shape and the torsion congruences, reducing torsion rows.
    pub fn from_entries(group: &InvariantFactorGroup, entries: Vec<Vec<Int>>) -> Result<Self> {
        let n = group.len();
        if entries.len() != n || entries.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch(format!("expected a {n}x{n} matrix")));
        }
        let mut m = Self { group: group.clone(), entries };
        m.reduce();
        m.validate()?;
        Ok(m)
    }

    fn reduce(&mut self) {
        let k = self.group.rank;
        for (i, &mu) in self.group.factors.iter().enumerate() {
            for x in self.entries[k + i].iter_mut() {
                *x = modulo(*x, mu);
            }
        }
    }

    fn validate(&self) -> Result<()> {
        let k = self.group.rank;
        let mu = &self.group.factors;
        for i in 0..k {
            if let Some(j) = (k..self.group.len()).find(|&j| self.entries[i][j] != 0) {
                return Err(Error::NotEndomorphism(format!(
                    "torsion generator {} maps to an element with free part",
                    j - k
                )));
            }
        }
        // image of e_{k+j} has order dividing μ_j
        for i in 0..mu.len() {
            for j in i + 1..mu.len() {
                let a = self.entries[k + i][k + j];
                if mul_mod(a, mu[j], mu[i]) != 0 {
                    return Err(Error::NotEndomorphism(format!(
                        "μ_{j} * a[{i}][{j}] = {} * {a} is not 0 mod {}",
                        mu[j], mu[i]
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn group(&self) -> &InvariantFactorGroup {
        &self.group
    }

    pub fn entries(&self) -> &[Vec<Int>] {
        &self.entries
    }

    pub fn column(&self, j: usize) -> GroupElement {
        let coords: Vec<Int> = self.entries.iter().map(|r| r[j]).collect();
        self.group.element_from_coords(&coords).expect("column shape")
    }

    pub fn columns(&self) -> Vec<GroupElement> {
        (0..self.group.len()).map(|j| self.column(j)).collect()
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(&self.group)
    }

    /// `A · ω`, torsion coordinates reduced.
    pub fn apply(&self, omega: &GroupElement) -> Result<GroupElement> {
        self.group.check(omega)?;
        let coords = omega.coords();
        let k = self.group.rank;
        let free = (0..k)
            .map(|i| (0..k).map(|l| self.entries[i][l] * coords[l]).sum())
            .collect();
        let torsion = self
            .group
            .factors
            .iter()
            .enumerate()
            .map(|(i, &mu)| {
                let row = &self.entries[k + i];
                row.iter().zip(&coords).fold(0, |acc, (&a, &x)| modulo(acc + mul_mod(a, x, mu), mu))
            })
            .collect();
        Ok(GroupElement { free, torsion })
    }

    /// Matrix product `self · other`, i.e. the composition `self ∘ other`.
    pub fn mul(&self, other: &GMatrix) -> Result<GMatrix> {
        if self.group != other.group {
            return Err(Error::GroupMismatch("G-matrices over different groups".into()));
        }
        let n = self.group.len();
        let k = self.group.rank;
        let mut entries = vec![vec![0; n]; n];
        for i in 0..n {
            let m = if i < k { 0 } else { self.group.factors[i - k] };
            for j in 0..n {
                entries[i][j] = if m == 0 {
                    (0..n).map(|l| self.entries[i][l] * other.entries[l][j]).sum()
                } else {
                    (0..n).fold(0, |acc, l| {
                        modulo(acc + mul_mod(self.entries[i][l], other.entries[l][j], m), m)
                    })
                };
            }
        }
        let out = GMatrix { group: self.group.clone(), entries };
        debug_assert!(out.validate().is_ok());
        Ok(out)
    }
}

/// The elementary automorphisms generating `Aut(G)`, with an integer
/// multiplicity where the generator is a transvection (a `times`-fold power;
/// negative powers are inverses).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Elementary {
    /// `ψ_i`: `w_i ↦ -w_i`.
    NegateFree { i: usize },
    /// `ψ_{i,u}`: `η_i ↦ u η_i` for a unit `u` mod `μ_i`.
    ScaleTorsion { i: usize, unit: Int },
    /// `α_{i,j}`: `w_to += times * w_from`.
    AddFree { from: usize, to: usize, times: Int },
    /// `β_{i,j}`: `η_torsion += times * w_free`.
    FreeIntoTorsion { free: usize, torsion: usize, times: Int },
    /// `γ_{i,j}` with `from < to`: `η_to += times * η_from` (well defined as `μ_to | μ_from`).
    TorsionDown { from: usize, to: usize, times: Int },
    /// `δ_{i,j}` with `to < from`: `η_to += times * (μ_to / μ_from) * η_from`.
    TorsionUp { from: usize, to: usize, times: Int },
}

impl Elementary {
    pub fn matrix(&self, group: &InvariantFactorGroup) -> Result<GMatrix> {
        let k = group.rank;
        let r = group.factors.len();
        let mu = &group.factors;
        let mut m = GMatrix::identity(group).entries;
        let oob = |what: &str| Err(Error::IndexOutOfRange(format!("{what} for {self:?}")));
        match *self {
            Elementary::NegateFree { i } => {
                if i >= k {
                    return oob("free index");
                }
                m[i][i] = -1;
            }
            Elementary::ScaleTorsion { i, unit } => {
                if i >= r {
                    return oob("torsion index");
                }
                if gcd(unit, mu[i]) != 1 {
                    return Err(Error::NotAUnit(unit, mu[i]));
                }
                m[k + i][k + i] = unit;
            }
            Elementary::AddFree { from, to, times } => {
                if from >= k || to >= k || from == to {
                    return oob("free indices");
                }
                m[to][from] += times;
            }
            Elementary::FreeIntoTorsion { free, torsion, times } => {
                if free >= k || torsion >= r {
                    return oob("indices");
                }
                m[k + torsion][free] += times;
            }
            Elementary::TorsionDown { from, to, times } => {
                if from >= to || to >= r {
                    return oob("torsion indices (need from < to)");
                }
                m[k + to][k + from] += times;
            }
            Elementary::TorsionUp { from, to, times } => {
                if to >= from || from >= r {
                    return oob("torsion indices (need to < from)");
                }
                m[k + to][k + from] += times * (mu[to] / mu[from]);
            }
        }
        GMatrix::from_entries(group, m)
    }

    pub fn inverse(&self, group: &InvariantFactorGroup) -> Result<Elementary> {
        Ok(match *self {
            Elementary::NegateFree { i } => Elementary::NegateFree { i },
            Elementary::ScaleTorsion { i, unit } => {
                let mu = *group
                    .factors
                    .get(i)
                    .ok_or_else(|| Error::IndexOutOfRange(format!("torsion index {i}")))?;
                let inv = mod_inverse(unit, mu).ok_or(Error::NotAUnit(unit, mu))?;
                Elementary::ScaleTorsion { i, unit: inv }
            }
            Elementary::AddFree { from, to, times } => Elementary::AddFree { from, to, times: -times },
            Elementary::FreeIntoTorsion { free, torsion, times } => {
                Elementary::FreeIntoTorsion { free, torsion, times: -times }
            }
            Elementary::TorsionDown { from, to, times } => {
                Elementary::TorsionDown { from, to, times: -times }
            }
            Elementary::TorsionUp { from, to, times } => Elementary::TorsionUp { from, to, times: -times },
        })
    }
}

/// Left-to-right product of elementary matrices.
pub fn product(group: &InvariantFactorGroup, factors: &[Elementary]) -> Result<GMatrix> {
    factors.iter().try_fold(GMatrix::identity(group), |acc, e| acc.mul(&e.matrix(group)?))
}

/// Smallest `k >= 0` with `gcd(a + k b, c) = 1`.
///
/// Existence follows from a CRT argument over the primes of `c`: take
/// `k ≡ 0 mod p` when `p ∤ a` and `k ≡ 1 mod p` otherwise. That solution bounds
/// the search.
pub fn coprime_shift(a: Int, b: Int, c: Int) -> Result<Int> {
    if gcd_all([a, b, c]) != 1 {
        return Err(Error::NotCoprime(a, b, c));
    }
    if c == 0 {
        return Err(Error::InvalidArgument("coprime_shift needs c != 0".into()));
    }
    let residues: Vec<(Int, Int)> = prime_divisors(c)
        .into_iter()
        .map(|p| (if a % p == 0 { 1 } else { 0 }, p))
        .collect();
    let bound = crt(&residues);
    debug_assert_eq!(gcd(a + bound * b, c), 1);
    Ok((0..=bound).find(|&k| gcd(a + k * b, c) == 1).unwrap_or(bound))
}

fn coefficient_matrix(elements: &[GroupElement], group: &InvariantFactorGroup) -> Result<Vec<Vec<Int>>> {
    for e in elements {
        group.check(e)?;
    }
    Ok((0..group.len()).map(|i| elements.iter().map(|e| e.coords()[i]).collect()).collect())
}

/// Generation criterion by maximal minors: the `k`-minors of the free rows
/// generate `Z`, and for each `j` the `(k+j)`-minors of the free rows stacked
/// with the first `j` torsion rows generate `Z/μ_j`.
pub fn is_generating(elements: &[GroupElement], group: &InvariantFactorGroup) -> Result<bool> {
    let q = coefficient_matrix(elements, group)?;
    let n = elements.len();
    let k = group.rank;
    let minors_gcd_with = |rows: usize, modulus: Option<Int>| -> bool {
        if rows > n {
            return false;
        }
        let m = modulus.map(BigInt::from);
        let mut g = m.clone().unwrap_or_else(BigInt::zero);
        for cols in combinations(n, rows) {
            let sub: Vec<Vec<Int>> = q[..rows].iter().map(|r| cols.iter().map(|&c| r[c]).collect()).collect();
            let det = intmat::determinant_int(&sub);
            g = num_integer::Integer::gcd(&g, &det);
            if g.is_one() {
                return true;
            }
        }
        g.is_one()
    };
    if !minors_gcd_with(k, None) {
        return Ok(false);
    }
    for (j, &mu) in group.factors.iter().enumerate() {
        if !minors_gcd_with(k + j + 1, Some(mu)) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Generation test through the quotient `Z^{k+r} / ⟨Q', diag(μ)⟩`, trivial iff
/// every Smith invariant is one. Independent of the minors criterion.
pub fn generates_by_smith(elements: &[GroupElement], group: &InvariantFactorGroup) -> Result<bool> {
    let q = coefficient_matrix(elements, group)?;
    let k = group.rank;
    let r = group.factors.len();
    let rows = k + r;
    if rows == 0 {
        return Ok(true);
    }
    let relations: Vec<Vec<Int>> = (0..rows)
        .map(|i| {
            let mut row = q[i].clone();
            row.extend((0..r).map(|j| if i == k + j { group.factors[j] } else { 0 }));
            row
        })
        .collect();
    let s = intmat::smith(&intmat::to_big(&relations));
    let diag = s.diagonal();
    Ok(diag.len() == rows && diag.iter().all(|d| d.is_one()))
}

/// Writes an automorphism as an ordered product of elementary automorphisms.
///
/// The matrix is reduced to the identity by left multiplication: the free
/// block by Euclid on rows, the free-to-torsion block by `β`, the torsion block
/// column by column from the last one (making the diagonal entry a unit via
/// `γ` and the coprime shift, normalizing by `ψ`, clearing above by `δ`), and
/// the remaining lower triangle by `γ`. The inverses of the applied
/// operations, in application order, multiply back to the input.
pub fn factor_automorphism(a: &GMatrix) -> Result<Vec<Elementary>> {
    let group = a.group.clone();
    if !is_generating(&a.columns(), &group)? {
        return Err(Error::NotInvertible("columns do not generate the group".into()));
    }
    let k = group.rank;
    let r = group.factors.len();
    let mu = group.factors.clone();
    let mut m = a.clone();
    let mut applied: Vec<Elementary> = Vec::new();
    let mut apply = |m: &mut GMatrix, e: Elementary| -> Result<()> {
        *m = e.matrix(&group)?.mul(m)?;
        applied.push(e);
        Ok(())
    };

    for c in 0..k {
        loop {
            let nonzero: Vec<usize> = (c..k).filter(|&i| m.entries[i][c] != 0).collect();
            let Some(&p) = nonzero.iter().min_by_key(|&&i| m.entries[i][c].abs()) else {
                return Err(Error::NotInvertible("singular free block".into()));
            };
            if nonzero.len() == 1 {
                if p != c {
                    apply(&mut m, Elementary::AddFree { from: p, to: c, times: 1 })?;
                    apply(&mut m, Elementary::AddFree { from: c, to: p, times: -1 })?;
                }
                break;
            }
            for &q in nonzero.iter().filter(|&&q| q != p) {
                let f = m.entries[q][c].div_euclid(m.entries[p][c]);
                apply(&mut m, Elementary::AddFree { from: p, to: q, times: -f })?;
            }
        }
        match m.entries[c][c] {
            1 => {}
            -1 => apply(&mut m, Elementary::NegateFree { i: c })?,
            _ => return Err(Error::NotInvertible("free block has determinant != ±1".into())),
        }
        for q in (0..k).filter(|&q| q != c) {
            let x = m.entries[q][c];
            if x != 0 {
                apply(&mut m, Elementary::AddFree { from: c, to: q, times: -x })?;
            }
        }
    }

    for i in 0..r {
        for j in 0..k {
            let x = m.entries[k + i][j];
            if x != 0 {
                apply(&mut m, Elementary::FreeIntoTorsion { free: j, torsion: i, times: -x })?;
            }
        }
    }

    for c in (0..r).rev() {
        // Bezout combination of the entries above the diagonal in this column
        let mut g: Int = 0;
        let mut coeffs = vec![0; c];
        for i in 0..c {
            let x = m.entries[k + i][k + c];
            let (ng, s, t) = xgcd(g, x);
            for v in coeffs.iter_mut().take(i) {
                *v *= s;
            }
            coeffs[i] = t;
            g = ng;
        }
        let diag = m.entries[k + c][k + c];
        let shift = coprime_shift(diag, g, mu[c])
            .map_err(|_| Error::NotInvertible(format!("torsion column {c} has no unit pivot")))?;
        if shift != 0 {
            for (i, &s) in coeffs.iter().enumerate() {
                let times = modulo(shift * s, mu[c]);
                if times != 0 {
                    apply(&mut m, Elementary::TorsionDown { from: i, to: c, times })?;
                }
            }
        }
        let u = m.entries[k + c][k + c];
        if u != 1 {
            let inv = mod_inverse(u, mu[c]).ok_or(Error::NotAUnit(u, mu[c]))?;
            apply(&mut m, Elementary::ScaleTorsion { i: c, unit: inv })?;
        }
        for i in 0..c {
            let x = m.entries[k + i][k + c];
            if x != 0 {
                let step = mu[i] / mu[c];
                debug_assert_eq!(x % step, 0);
                apply(&mut m, Elementary::TorsionUp { from: c, to: i, times: -(x / step) })?;
            }
        }
    }

    for c in 0..r {
        for i in c + 1..r {
            let x = m.entries[k + i][k + c];
            if x != 0 {
                apply(&mut m, Elementary::TorsionDown { from: c, to: i, times: -x })?;
            }
        }
    }

    if !m.is_identity() {
        return Err(Error::NotInvertible("reduction did not reach the identity".into()));
    }
    applied.iter().map(|e| e.inverse(&group)).collect()
}

/// Number of elements of a finite group, used by brute-force checks.
pub fn finite_order(group: &InvariantFactorGroup) -> Option<u64> {
    if group.rank > 0 {
        return None;
    }
    group.factors.iter().try_fold(1u64, |acc, &m| acc.checked_mul(m.to_u64()?))
}
