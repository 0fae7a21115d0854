//! Degree and generator matrices of a fake weighted projective space, the
//! conversions between them, and the Picard / Gorenstein invariants.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::abelian::{is_generating, GroupElement, InvariantFactorGroup};
use crate::arith::{gcd, gcd_all, lcm, lcm_all, modulo, Int};
use crate::error::{Error, Result};
use crate::intmat::{self, transpose};
use crate::lattice;

/// `Q = [ω_0 … ω_n]` with `ω_i = (w_i, η_{i1}, …, η_{ir}) ∈ Z ⊕ Z/μ_1 ⊕ … ⊕ Z/μ_r`.
///
/// Columns are stored sorted: weights ascending, ties by torsion tuples.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DegreeMatrix {
    weights: Vec<Int>,
    factors: Vec<Int>,
    torsion: Vec<Vec<Int>>,
}

impl DegreeMatrix {
    /// Validates and sorts. `torsion` holds `(μ_j, η_{*j})` rows.
    pub fn new(weights: Vec<Int>, torsion: Vec<(Int, Vec<Int>)>) -> Result<Self> {
        let q = Self::new_unverified(weights, torsion)?;
        if let Some(omitted) = q.failing_column() {
            return Err(Error::InvalidDegreeMatrix(format!(
                "the columns other than {omitted} do not generate the class group"
            )));
        }
        Ok(q)
    }

    /// Checks shapes, positivity and the divisibility chain, reduces and sorts,
    /// but skips the generation test. The invariant formulas still apply to
    /// such a matrix; [`DegreeMatrix::failing_column`] tells whether it
    /// actually presents a fake weighted projective space.
    pub fn new_unverified(weights: Vec<Int>, torsion: Vec<(Int, Vec<Int>)>) -> Result<Self> {
        if weights.len() < 2 {
            return Err(Error::InvalidDegreeMatrix("need at least two columns".into()));
        }
        if weights.iter().any(|&w| w < 1) {
            return Err(Error::InvalidDegreeMatrix("weights must be positive".into()));
        }
        let factors: Vec<Int> = torsion.iter().map(|t| t.0).collect();
        InvariantFactorGroup::new(1, factors.clone())
            .map_err(|e| Error::InvalidDegreeMatrix(e.to_string()))?;
        if let Some((_, row)) = torsion.iter().find(|t| t.1.len() != weights.len()) {
            return Err(Error::DimensionMismatch(format!(
                "torsion row of length {} for {} weights",
                row.len(),
                weights.len()
            )));
        }
        let rows: Vec<Vec<Int>> =
            torsion.iter().map(|(m, row)| row.iter().map(|&x| modulo(x, *m)).collect()).collect();
        Ok(Self::sorted(weights, factors, rows))
    }

    pub(crate) fn sorted(weights: Vec<Int>, factors: Vec<Int>, torsion: Vec<Vec<Int>>) -> Self {
        let mut cols: Vec<(Int, Vec<Int>)> = (0..weights.len())
            .map(|i| (weights[i], torsion.iter().map(|r| r[i]).collect()))
            .collect();
        cols.sort();
        let weights = cols.iter().map(|c| c.0).collect();
        let torsion = (0..factors.len()).map(|j| cols.iter().map(|c| c.1[j]).collect()).collect();
        Self { weights, factors, torsion }
    }

    /// The first column whose removal leaves a non-generating set, if any.
    pub fn failing_column(&self) -> Option<usize> {
        let group = self.group();
        let cols = self.columns();
        (0..cols.len()).find(|&i| {
            let rest: Vec<GroupElement> =
                cols.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, c)| c.clone()).collect();
            !is_generating(&rest, &group).unwrap_or(false)
        })
    }

    /// Dimension `n` of the variety (one less than the number of columns).
    pub fn dim(&self) -> usize {
        self.weights.len() - 1
    }

    pub fn weights(&self) -> &[Int] {
        &self.weights
    }

    /// Torsion orders `μ_1 ≥ … ≥ μ_r`.
    pub fn factors(&self) -> &[Int] {
        &self.factors
    }

    /// Torsion rows as representatives in `[0, μ_j)`.
    pub fn torsion(&self) -> &[Vec<Int>] {
        &self.torsion
    }

    pub fn group(&self) -> InvariantFactorGroup {
        InvariantFactorGroup::new(1, self.factors.clone()).expect("validated at construction")
    }

    pub fn column(&self, i: usize) -> GroupElement {
        GroupElement { free: vec![self.weights[i]], torsion: self.torsion.iter().map(|r| r[i]).collect() }
    }

    pub fn columns(&self) -> Vec<GroupElement> {
        (0..self.weights.len()).map(|i| self.column(i)).collect()
    }

    pub fn sum_of_weights(&self) -> Int {
        self.weights.iter().sum()
    }
}

impl fmt::Display for DegreeMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[Int]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        write!(f, "{}", join(&self.weights))?;
        for (row, mu) in self.torsion.iter().zip(&self.factors) {
            write!(f, ";{}@{}", join(row), mu)?;
        }
        Ok(())
    }
}

impl DegreeMatrix {
    /// Parses `w_0,…,w_n;η_0,…,η_n@μ;…`, e.g. `1,1,1,4;0,1,2,2@4`, without the
    /// generation test.
    pub fn parse_unverified(s: &str) -> Result<Self> {
        let parse_row = |row: &str| -> Result<Vec<Int>> {
            row.split(',')
                .map(|x| x.trim().parse::<Int>().map_err(|e| Error::Parse(format!("{:?}: {e}", x.trim()))))
                .collect()
        };
        let mut parts = s.trim().split(';');
        let first = parts.next().filter(|p| !p.trim().is_empty()).ok_or_else(|| Error::Parse("empty matrix".into()))?;
        if first.contains('@') {
            return Err(Error::Parse("the first row holds weights and takes no '@' order".into()));
        }
        let weights = parse_row(first)?;
        let mut torsion = Vec::new();
        for part in parts {
            let (row, mu) = part
                .split_once('@')
                .ok_or_else(|| Error::Parse(format!("torsion row {:?} lacks an '@order' suffix", part.trim())))?;
            let mu = mu.trim().parse::<Int>().map_err(|e| Error::Parse(format!("order {:?}: {e}", mu.trim())))?;
            torsion.push((mu, parse_row(row)?));
        }
        DegreeMatrix::new_unverified(weights, torsion)
    }
}

impl FromStr for DegreeMatrix {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let q = Self::parse_unverified(s)?;
        if let Some(omitted) = q.failing_column() {
            return Err(Error::InvalidDegreeMatrix(format!(
                "the columns other than {omitted} do not generate the class group"
            )));
        }
        Ok(q)
    }
}

/// `L`, `L_ij`, `M_j`, `M` and `S` of a degree matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantBundle {
    pub l: Int,
    /// `(n+1) × r`, entry `(i, j)` is `(L / w_i) · η_ij`.
    pub l_matrix: Vec<Vec<Int>>,
    pub m_factors: Vec<Int>,
    pub m: Int,
    pub s: Int,
}

pub fn invariant_bundle(q: &DegreeMatrix) -> InvariantBundle {
    let l = lcm_all(q.weights.iter().copied());
    let l_matrix: Vec<Vec<Int>> = q
        .weights
        .iter()
        .enumerate()
        .map(|(i, &w)| q.torsion.iter().map(|row| (l / w) * row[i]).collect())
        .collect();
    let m_factors: Vec<Int> = q
        .factors
        .iter()
        .enumerate()
        .map(|(j, &mu)| mu / gcd_all(std::iter::once(mu).chain(l_matrix.iter().map(|r| r[j]))))
        .collect();
    let m = lcm_all(m_factors.iter().copied());
    InvariantBundle { l, l_matrix, m_factors, m, s: q.sum_of_weights() }
}

/// `LM`: the Picard group is the subgroup generated by `(LM, 0)`.
pub fn picard_index(q: &DegreeMatrix) -> Int {
    let b = invariant_bundle(q);
    b.l.checked_mul(b.m).expect("picard index overflow")
}

/// `lcm(LM / gcd(LM, S), μ_j / gcd(μ_j, Σ_i η_ij))`.
pub fn gorenstein_index(q: &DegreeMatrix) -> Int {
    let lm = picard_index(q);
    let s = q.sum_of_weights();
    q.torsion.iter().zip(&q.factors).fold(lm / gcd(lm, s), |acc, (row, &mu)| {
        let sum = row.iter().fold(0, |a, &x| modulo(a + x, mu));
        lcm(acc, mu / gcd(mu, sum))
    })
}

/// The three conditions of the Gorenstein criterion, evaluated separately.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GorensteinReport {
    /// `L | S`.
    pub lcm_divides_sum: bool,
    /// `M_j | S/L` for each torsion row, read as `L·M_j | S`.
    pub m_divides_quotient: Vec<bool>,
    /// Each torsion row sums to zero in `Z/μ_j`.
    pub rows_sum_to_zero: Vec<bool>,
}

impl GorensteinReport {
    pub fn holds(&self) -> bool {
        self.lcm_divides_sum
            && self.m_divides_quotient.iter().all(|&b| b)
            && self.rows_sum_to_zero.iter().all(|&b| b)
    }
}

pub fn gorenstein_report(q: &DegreeMatrix) -> GorensteinReport {
    let b = invariant_bundle(q);
    GorensteinReport {
        lcm_divides_sum: b.s % b.l == 0,
        m_divides_quotient: b.m_factors.iter().map(|&m| b.s % (b.l * m) == 0).collect(),
        rows_sum_to_zero: q
            .torsion
            .iter()
            .zip(&q.factors)
            .map(|(row, &mu)| row.iter().fold(0, |a, &x| modulo(a + x, mu)) == 0)
            .collect(),
    }
}

pub fn is_gorenstein(q: &DegreeMatrix) -> bool {
    gorenstein_report(q).holds()
}

/// `n × (n+1)` matrix whose columns are the primitive ray generators.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GeneratorMatrix {
    rows: Vec<Vec<Int>>,
}

impl GeneratorMatrix {
    pub fn new(rows: Vec<Vec<Int>>) -> Result<Self> {
        let p = Self::new_unverified(rows)?;
        p.check_rays()?;
        p.check_relation()?;
        Ok(p)
    }

    /// Only checks the shape. Rank, primitivity and positivity are left to the
    /// caller; [`degree_from_generator`] and the facet computations still
    /// require rank `n` and a positive relation.
    pub fn new_unverified(rows: Vec<Vec<Int>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n + 1) {
            return Err(Error::InvalidGeneratorMatrix(format!("expected an n × (n+1) matrix, got {n} rows")));
        }
        Ok(Self { rows })
    }

    fn check_rays(&self) -> Result<()> {
        let cols = self.columns();
        for (i, c) in cols.iter().enumerate() {
            if gcd_all(c.iter().copied()) != 1 {
                return Err(Error::InvalidGeneratorMatrix(format!("column {i} is not primitive")));
            }
            if cols[..i].contains(c) {
                return Err(Error::InvalidGeneratorMatrix(format!("column {i} is repeated")));
            }
        }
        Ok(())
    }

    pub(crate) fn check_relation(&self) -> Result<()> {
        let relation = self.relation();
        let positive = relation.iter().all(|a| a.is_positive()) || relation.iter().all(|a| a.is_negative());
        if relation.iter().all(|a| a.is_zero()) {
            return Err(Error::InvalidGeneratorMatrix("rank is below n".into()));
        }
        if !positive {
            return Err(Error::InvalidGeneratorMatrix("columns admit no positive relation".into()));
        }
        Ok(())
    }

    /// Signed maximal minors `a_i = (-1)^i det(P without column i)`; they span
    /// the relations `Σ a_i v_i = 0` when `P` has rank `n`.
    fn relation(&self) -> Vec<BigInt> {
        let n = self.rows.len();
        (0..=n)
            .map(|i| {
                let sub: Vec<Vec<Int>> =
                    self.rows.iter().map(|r| r.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &x)| x).collect()).collect();
                let d = intmat::determinant_int(&sub);
                if i % 2 == 0 {
                    d
                } else {
                    -d
                }
            })
            .collect()
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// The primitive positive relation `Σ w_i v_i = 0`, aligned with the columns.
    pub fn weights(&self) -> Result<Vec<Int>> {
        self.check_relation()?;
        let rel = self.relation();
        let g = rel.iter().fold(BigInt::zero(), |g, x| num_integer::Integer::gcd(&g, x));
        rel.iter()
            .map(|x| (x / &g).abs().to_i128().ok_or_else(|| Error::Overflow("weight".into())))
            .collect()
    }

    pub fn rows(&self) -> &[Vec<Int>] {
        &self.rows
    }

    pub fn columns(&self) -> Vec<Vec<Int>> {
        transpose(&self.rows)
    }

    /// Columns permuted: column `i` of the result is column `perm[i]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Vec<Vec<Int>> {
        self.rows.iter().map(|r| perm.iter().map(|&j| r[j]).collect()).collect()
    }
}

/// A basis of `ker Q` in Hermite form, as a generator matrix.
pub fn generator_from_degree(q: &DegreeMatrix) -> Result<GeneratorMatrix> {
    GeneratorMatrix::new(kernel_rows(q)).map_err(|e| Error::InvalidDegreeMatrix(e.to_string()))
}

pub(crate) fn kernel_rows(q: &DegreeMatrix) -> Vec<Vec<Int>> {
    let rows: Vec<(Int, &[Int])> = q.factors.iter().copied().zip(q.torsion.iter().map(|r| r.as_slice())).collect();
    lattice::kernel_hermite(&q.weights, &rows)
}

/// `Cl = Z^{n+1} / im(P^T)` in invariant factor form, with the images of the
/// standard basis as columns.
///
/// For a valid generator matrix the result is a degree matrix. A matrix that
/// only has rank `n` and a positive relation still yields its presentation,
/// which then fails the generation test.
pub fn degree_from_generator(p: &GeneratorMatrix) -> Result<DegreeMatrix> {
    p.check_relation()?;
    let n = p.dim();
    let s = intmat::smith(&intmat::to_big(&transpose(&p.rows)));
    let diag = s.diagonal();
    // invariant factors ascending in the Smith form; keep the nontrivial ones, largest first
    let torsion_idx: Vec<usize> = (0..n).rev().filter(|&k| diag[k] > BigInt::from(1)).collect();
    let to_int = |x: &BigInt| x.to_i128().ok_or_else(|| Error::Overflow("class group entry".into()));
    let mut weights: Vec<Int> = s.u[n].iter().map(to_int).collect::<Result<_>>()?;
    if weights.iter().any(|&w| w < 0) {
        weights.iter_mut().for_each(|w| *w = -*w);
    }
    let torsion = torsion_idx
        .iter()
        .map(|&k| Ok((to_int(&diag[k])?, s.u[k].iter().map(to_int).collect::<Result<Vec<_>>>()?)))
        .collect::<Result<Vec<_>>>()?;
    DegreeMatrix::new_unverified(weights, torsion)
}

#[cfg(test)]
mod tests {
    use super::*;

    // The matrices of the worked example. Its second ray is not primitive, so
    // the pair presents Z ⊕ Z/4 without being a genuine fan/degree matrix.
    fn example() -> DegreeMatrix {
        DegreeMatrix::parse_unverified("1,1,1,4;0,1,2,2@4").unwrap()
    }

    fn example_p() -> GeneratorMatrix {
        GeneratorMatrix::new_unverified(vec![vec![1, -2, 1, 0], vec![-2, -2, 0, 1], vec![-3, 2, 1, 0]]).unwrap()
    }

    #[test]
    fn bundle_examples() {
        let b = invariant_bundle(&"1,1,1".parse().unwrap());
        assert_eq!((b.l, b.m, b.s), (1, 1, 3));
        let b = invariant_bundle(&example());
        assert_eq!((b.l, b.m, b.s), (4, 2, 7));
        assert_eq!(b.l_matrix.iter().map(|r| r[0]).collect::<Vec<_>>(), vec![0, 4, 8, 2]);
        assert_eq!(b.m_factors, vec![2]);
        let b = invariant_bundle(&"1,1,2;0,1,1@2".parse().unwrap());
        assert_eq!((b.l, b.m, b.s), (2, 2, 4));
        assert_eq!(b.l_matrix.iter().map(|r| r[0]).collect::<Vec<_>>(), vec![0, 2, 1]);
    }

    #[test]
    fn picard_and_gorenstein_indices() {
        assert_eq!(picard_index(&"1,1,1".parse().unwrap()), 1);
        assert_eq!(picard_index(&example()), 8);
        assert_eq!(gorenstein_index(&example()), 8);
        let z3: DegreeMatrix = "1,1,1;0,1,2@3".parse().unwrap();
        assert_eq!(picard_index(&z3), 3);
        assert_eq!(gorenstein_index(&z3), 1);
        assert_eq!(gorenstein_index(&"1,1,2".parse().unwrap()), 1);
    }

    #[test]
    fn gorenstein_predicate() {
        assert!(is_gorenstein(&"1,1,2".parse().unwrap()));
        assert!(!is_gorenstein(&"1,1,3".parse().unwrap()));
        assert!(!is_gorenstein(&example()));
        assert!(is_gorenstein(&"1,1,1;0,1,2@3".parse().unwrap()));
        let r = gorenstein_report(&example());
        assert!(!r.lcm_divides_sum);
        assert_eq!(r.rows_sum_to_zero, vec![false]);
    }

    #[test]
    fn example_is_degenerate() {
        assert_eq!(example().failing_column(), Some(1));
        assert!("1,1,1,4;0,1,2,2@4".parse::<DegreeMatrix>().is_err());
        assert!(GeneratorMatrix::new(example_p().rows().to_vec()).is_err());
    }

    #[test]
    fn parse_and_display() {
        let q = example();
        assert_eq!(q.to_string(), "1,1,1,4;0,1,2,2@4");
        assert!(matches!("".parse::<DegreeMatrix>(), Err(Error::Parse(_))));
        assert!(matches!("1,1;0,1".parse::<DegreeMatrix>(), Err(Error::Parse(_))));
        assert!(matches!("1,x".parse::<DegreeMatrix>(), Err(Error::Parse(_))));
        // two columns with equal degree leave the torsion ungenerated
        assert!(matches!("1,1,1;0,1,1@2".parse::<DegreeMatrix>(), Err(Error::InvalidDegreeMatrix(_))));
        // columns are sorted on construction
        let q: DegreeMatrix = "2,1,1;1,1,0@2".parse().unwrap();
        assert_eq!(q.weights(), &[1, 1, 2]);
        assert_eq!(q.torsion()[0], vec![0, 1, 1]);
    }

    #[test]
    fn generator_matrix_validation() {
        assert!(GeneratorMatrix::new(vec![vec![1, 0, -1], vec![0, 1, -1]]).is_ok());
        assert!(GeneratorMatrix::new(vec![vec![1, 0, 1], vec![0, 1, 0]]).is_err());
        assert!(GeneratorMatrix::new(vec![vec![2, 0, -1], vec![0, 1, -1]]).is_err());
        assert!(GeneratorMatrix::new(vec![vec![1, 1, -1], vec![0, 0, -1]]).is_err());
        assert!(GeneratorMatrix::new(vec![vec![1, 2, 3]]).is_err());
    }

    #[test]
    fn kernel_of_plane() {
        let p = generator_from_degree(&"1,1,1".parse().unwrap()).unwrap();
        assert_eq!(p.rows(), &[vec![1, 0, -1], vec![0, 1, -1]]);
    }

    #[test]
    fn kernel_of_z3_quotient() {
        let p = generator_from_degree(&"1,1,1;0,1,2@3".parse().unwrap()).unwrap();
        for row in p.rows() {
            assert_eq!(row.iter().sum::<Int>(), 0);
            assert_eq!(modulo(row[1] + 2 * row[2], 3), 0);
        }
        let h = intmat::hermite(&intmat::to_big(&[vec![1, 1, -2], vec![1, -2, 1]])).0;
        assert_eq!(intmat::from_big(&h).unwrap(), p.rows());
    }

    #[test]
    fn example_kernel_matches_generator() {
        let h = intmat::hermite(&intmat::to_big(example_p().rows())).0;
        assert_eq!(intmat::from_big(&h).unwrap(), kernel_rows(&example()));
    }

    #[test]
    fn class_group_of_examples() {
        let q = degree_from_generator(&GeneratorMatrix::new(vec![vec![1, 0, -1], vec![0, 1, -1]]).unwrap()).unwrap();
        assert_eq!(q.weights(), &[1, 1, 1]);
        assert!(q.factors().is_empty());

        let q = degree_from_generator(&example_p()).unwrap();
        assert_eq!(q.weights(), &[1, 1, 1, 4]);
        assert_eq!(q.factors(), &[4]);
        assert_eq!((picard_index(&q), gorenstein_index(&q)), (8, 8));
        // the torsion row is (0,1,2,2) up to u·η + k·w and reordering the weight-1 columns
        let eta = &q.torsion()[0];
        let hit = crate::arith::units(4).into_iter().any(|u| {
            (0..4).any(|k| {
                let mut v: Vec<Int> = (0..4).map(|i| modulo(u * eta[i] + k * q.weights()[i], 4)).collect();
                v[..3].sort();
                v == [0, 1, 2, 2]
            })
        });
        assert!(hit, "{eta:?}");

        let q = degree_from_generator(&GeneratorMatrix::new(vec![vec![1, 1, -2], vec![1, -2, 1]]).unwrap()).unwrap();
        assert_eq!(q.weights(), &[1, 1, 1]);
        assert_eq!(q.factors(), &[3]);
        assert!(is_gorenstein(&q));
    }

    #[test]
    fn relation_gives_weights() {
        let p = GeneratorMatrix::new(vec![vec![1, 0, -1], vec![0, 1, -2]]).unwrap();
        assert_eq!(p.weights().unwrap(), vec![1, 2, 1]);
        assert_eq!(example_p().weights().unwrap(), vec![1, 1, 1, 4]);
    }

    #[test]
    fn projective_line() {
        let q: DegreeMatrix = "1,1".parse().unwrap();
        let p = generator_from_degree(&q).unwrap();
        assert_eq!(p.rows(), &[vec![1, -1]]);
        assert_eq!(degree_from_generator(&p).unwrap(), q);
        assert!(is_gorenstein(&q));
    }
}
