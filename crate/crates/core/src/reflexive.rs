//! Reflexivity of the simplex spanned by the columns of a generator matrix,
//! decided from its dual vertices in exact rational arithmetic.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::invariants::{is_gorenstein, kernel_rows, DegreeMatrix, GeneratorMatrix};

/// `u_i` with `⟨u_i, v_j⟩ = -1` for all `j ≠ i`: the vertices of the dual simplex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplexFacetData {
    pub duals: Vec<Vec<BigRational>>,
}

pub fn facet_duals(p: &GeneratorMatrix) -> Result<SimplexFacetData> {
    p.check_relation()?;
    let cols = p.columns();
    let n = p.dim();
    let duals = (0..=n)
        .map(|i| {
            let system: Vec<Vec<BigRational>> = cols
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, v)| v.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect())
                .collect();
            solve(system, -BigRational::one())
                .ok_or_else(|| Error::InvalidGeneratorMatrix(format!("facet opposite column {i} is degenerate")))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SimplexFacetData { duals })
}

// Solves A x = (c, …, c) by Gauss-Jordan elimination.
fn solve(mut a: Vec<Vec<BigRational>>, c: BigRational) -> Option<Vec<BigRational>> {
    let n = a.len();
    for row in a.iter_mut() {
        row.push(c.clone());
    }
    for col in 0..n {
        let p = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, p);
        let inv = a[col][col].recip();
        for x in a[col].iter_mut() {
            *x *= &inv;
        }
        let pivot = a[col].clone();
        for (r, row) in a.iter_mut().enumerate() {
            if r != col && !row[col].is_zero() {
                let f = row[col].clone();
                for (x, y) in row.iter_mut().zip(&pivot) {
                    *x -= &f * y;
                }
            }
        }
    }
    Some(a.into_iter().map(|mut r| r.pop().expect("augmented")).collect())
}

fn dot(u: &[BigRational], v: &[i128]) -> BigRational {
    u.iter().zip(v).fold(BigRational::zero(), |acc, (a, &b)| acc + a * BigRational::from_integer(BigInt::from(b)))
}

/// Every dual vertex is integral and the origin is interior.
pub fn is_reflexive(p: &GeneratorMatrix) -> Result<bool> {
    let data = facet_duals(p)?;
    let cols = p.columns();
    let minus_one = -BigRational::one();
    Ok(data.duals.iter().zip(&cols).all(|(u, v)| u.iter().all(|x| x.is_integer()) && dot(u, v) > minus_one))
}

/// `is_gorenstein(Q)` agrees with the reflexivity of the simplex of `ker Q`.
pub fn cross_check(q: &DegreeMatrix) -> Result<bool> {
    let p = GeneratorMatrix::new_unverified(kernel_rows(q))?;
    Ok(is_gorenstein(q) == is_reflexive(&p)?)
}

/// Dual vertices of a reflexive simplex as an integer generator matrix.
pub fn dual_generator(p: &GeneratorMatrix) -> Result<Option<GeneratorMatrix>> {
    let data = facet_duals(p)?;
    if !data.duals.iter().flatten().all(|x| x.is_integer()) {
        return Ok(None);
    }
    let n = p.dim();
    let rows = (0..n)
        .map(|r| {
            data.duals
                .iter()
                .map(|u| {
                    let x = u[r].to_integer();
                    i128::try_from(x).map_err(|_| Error::Overflow("dual vertex".into()))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Some(GeneratorMatrix::new_unverified(rows)?))
}
