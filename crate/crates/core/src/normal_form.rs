//! Canonical forms of generator matrices and the isomorphism filter.
//!
//! `Norm(P)` is the least Hermite form of `P_σ` over the column permutations
//! `σ` that preserve the ascending weight blocks, compared row-major.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::arith::Int;
use crate::error::{Error, Result};
use crate::intmat;
use crate::invariants::{kernel_rows, DegreeMatrix, GeneratorMatrix};
use crate::lattice;

/// Row-style Hermite form: positive pivots, zeros below, entries above a pivot
/// in `[0, pivot)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HermiteForm {
    rows: Vec<Vec<Int>>,
    pivots: Vec<usize>,
}

impl HermiteForm {
    pub fn rows(&self) -> &[Vec<Int>] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    fn flat(&self) -> impl Iterator<Item = &Int> {
        self.rows.iter().flatten()
    }

    fn less_than(&self, other: &Self) -> bool {
        self.flat().lt(other.flat())
    }
}

pub fn hermite_normal_form(p: &[Vec<Int>]) -> Result<HermiteForm> {
    let (h, pivots) = intmat::hermite(&intmat::to_big(p));
    if h.len() < p.len() {
        return Err(Error::RankDeficient);
    }
    let rows = intmat::from_big(&h).ok_or_else(|| Error::Overflow("Hermite form entry".into()))?;
    Ok(HermiteForm { rows, pivots })
}

/// Permutations preserving the blocks of equal weights in an ascending weight
/// vector, starting with the identity.
pub fn allowed_permutations(w: &[Int]) -> Vec<Vec<usize>> {
    let mut blocks: Vec<(usize, usize)> = Vec::new();
    let mut start = 0;
    for i in 1..=w.len() {
        if i == w.len() || w[i] != w[start] {
            blocks.push((start, i));
            start = i;
        }
    }
    let mut perm: Vec<usize> = (0..w.len()).collect();
    let mut out = vec![perm.clone()];
    // odometer over the blocks, each advanced by next_permutation
    loop {
        let mut advanced = false;
        for &(a, b) in blocks.iter().rev() {
            if next_permutation(&mut perm[a..b]) {
                advanced = true;
                break;
            }
        }
        if !advanced {
            return out;
        }
        out.push(perm.clone());
    }
}

// Advances to the next permutation in lexicographic order, or wraps to the
// first one and returns false.
fn next_permutation(s: &mut [usize]) -> bool {
    let n = s.len();
    if n < 2 {
        return false;
    }
    let Some(i) = (0..n - 1).rev().find(|&i| s[i] < s[i + 1]) else {
        s.reverse();
        return false;
    };
    let j = (i + 1..n).rev().find(|&j| s[j] > s[i]).expect("successor exists");
    s.swap(i, j);
    s[i + 1..].reverse();
    true
}

/// Canonical representative of a generator matrix up to lattice isomorphism.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NormalForm {
    form: HermiteForm,
}

const FORMAT_VERSION: u8 = 1;

impl NormalForm {
    pub fn rows(&self) -> &[Vec<Int>] {
        self.form.rows()
    }

    pub fn hermite(&self) -> &HermiteForm {
        &self.form
    }

    /// Version byte, row and column counts as big-endian `u32`, then each entry
    /// row-major as a length byte followed by its signed decimal digits.
    pub fn to_bytes(&self) -> Vec<u8> {
        let rows = self.rows();
        let cols = rows.first().map_or(0, |r| r.len());
        let mut out = vec![FORMAT_VERSION];
        out.extend_from_slice(&(rows.len() as u32).to_be_bytes());
        out.extend_from_slice(&(cols as u32).to_be_bytes());
        for x in rows.iter().flatten() {
            let s = x.to_string();
            out.push(s.len() as u8);
            out.extend_from_slice(s.as_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let bad = |m: &str| Error::Parse(format!("normal form bytes: {m}"));
        if bytes.first() != Some(&FORMAT_VERSION) {
            return Err(bad("unknown version"));
        }
        if bytes.len() < 9 {
            return Err(bad("truncated header"));
        }
        let rows = u32::from_be_bytes(bytes[1..5].try_into().unwrap()) as usize;
        let cols = u32::from_be_bytes(bytes[5..9].try_into().unwrap()) as usize;
        let mut pos = 9;
        let mut entries = Vec::with_capacity(rows * cols);
        for _ in 0..rows * cols {
            let len = *bytes.get(pos).ok_or_else(|| bad("truncated entry"))? as usize;
            let digits = bytes.get(pos + 1..pos + 1 + len).ok_or_else(|| bad("truncated entry"))?;
            let text = std::str::from_utf8(digits).map_err(|_| bad("non-ascii entry"))?;
            entries.push(text.parse::<Int>().map_err(|_| bad("bad integer"))?);
            pos += 1 + len;
        }
        if pos != bytes.len() {
            return Err(bad("trailing bytes"));
        }
        let rows: Vec<Vec<Int>> = entries.chunks(cols.max(1)).take(rows).map(|c| c.to_vec()).collect();
        Self::from_rows(rows).map_err(|e| bad(&e.to_string()))
    }

    /// Accepts `rows` only if they are already a full-rank Hermite form.
    pub fn from_rows(rows: Vec<Vec<Int>>) -> Result<Self> {
        if rows.is_empty() || rows.iter().any(|r| r.len() != rows[0].len()) {
            return Err(Error::Parse("normal form rows are empty or ragged".into()));
        }
        let form = hermite_normal_form(&rows).map_err(|_| Error::Parse("normal form is not of full rank".into()))?;
        if form.rows != rows {
            return Err(Error::Parse("normal form is not in Hermite form".into()));
        }
        Ok(Self { form })
    }
}

/// `min_σ HNF(P_σ)` with `w` the weights of the columns of `P`, ascending.
pub fn normal_form(p: &GeneratorMatrix, w: &[Int]) -> Result<NormalForm> {
    if w.len() != p.dim() + 1 {
        return Err(Error::DimensionMismatch(format!("{} weights for {} columns", w.len(), p.dim() + 1)));
    }
    if w.windows(2).any(|x| x[0] > x[1]) {
        return Err(Error::InvalidArgument("weights must be ascending".into()));
    }
    let mut best: Option<HermiteForm> = None;
    for sigma in allowed_permutations(w) {
        let h = hermite_normal_form(&p.permuted(&sigma))?;
        if best.as_ref().is_none_or(|b| h.less_than(b)) {
            best = Some(h);
        }
    }
    Ok(NormalForm { form: best.expect("identity permutation") })
}

/// Normal form of an arbitrary generator matrix: its weights are read off the
/// positive relation and the columns sorted accordingly.
pub fn normal_form_of_generator(p: &GeneratorMatrix) -> Result<NormalForm> {
    let w = p.weights()?;
    let mut order: Vec<usize> = (0..w.len()).collect();
    order.sort_by_key(|&i| w[i]);
    let sorted_w: Vec<Int> = order.iter().map(|&i| w[i]).collect();
    let sorted = GeneratorMatrix::new_unverified(p.permuted(&order))?;
    normal_form(&sorted, &sorted_w)
}

/// Normal forms of degree matrices over one fixed weight vector.
///
/// The kernel of `Q` is computed once; each block permutation of it is then
/// re-reduced on its first `n` coordinates modulo `E = w_n · μ_1`, since
/// `E · Z^n` lies in every such projection. The last coordinate is fixed by
/// the first `n` through the weights.
#[derive(Clone, Debug)]
pub struct Canonicalizer {
    weights: Vec<Int>,
    perms: Vec<Vec<usize>>,
}

impl Canonicalizer {
    pub fn new(weights: &[Int]) -> Self {
        Self { weights: weights.to_vec(), perms: allowed_permutations(weights) }
    }

    pub fn weights(&self) -> &[Int] {
        &self.weights
    }

    pub fn permutations(&self) -> usize {
        self.perms.len()
    }

    pub fn normal_form(&self, q: &DegreeMatrix) -> NormalForm {
        assert_eq!(q.weights(), self.weights.as_slice(), "weights differ from the canonicalizer");
        let rows: Vec<(Int, &[Int])> = q.factors().iter().copied().zip(q.torsion().iter().map(|r| r.as_slice())).collect();
        let kernel = lattice::kernel_hermite(&self.weights, &rows);
        self.normal_form_of_kernel(&kernel, q.factors().first().copied().unwrap_or(1))
    }

    /// Normal form from the Hermite kernel basis of a degree matrix whose
    /// largest torsion order is `top` (1 without torsion).
    pub fn normal_form_of_kernel(&self, kernel: &[Vec<Int>], top: Int) -> NormalForm {
        let w = &self.weights;
        let n = w.len() - 1;
        let modulus = w[n] * top;
        let best: Vec<Vec<Int>> = if self.perms.len() == 1 {
            kernel.iter().map(|r| r[..n].to_vec()).collect()
        } else if modulus < 1 << 31 {
            let base: Vec<Vec<i64>> = kernel.iter().map(|r| r.iter().map(|&x| x as i64).collect()).collect();
            self.least(&base, modulus as i64).into_iter().map(|r| r.into_iter().map(Int::from).collect()).collect()
        } else {
            self.least(kernel, modulus)
        };
        let rows = best
            .into_iter()
            .map(|mut row| {
                let s: Int = row.iter().zip(w).map(|(&x, &wi)| x * wi).sum();
                row.push(-s / w[n]);
                row
            })
            .collect::<Vec<_>>();
        let pivots = (0..n).collect();
        NormalForm { form: HermiteForm { rows, pivots } }
    }

    fn least<T: lattice::Word>(&self, base: &[Vec<T>], modulus: T) -> Vec<Vec<T>> {
        let n = self.weights.len() - 1;
        let mut projected = vec![vec![T::zero(); n]; n];
        let mut best: Option<Vec<Vec<T>>> = None;
        for sigma in &self.perms {
            for (dst, src) in projected.iter_mut().zip(base) {
                for (d, &s) in dst.iter_mut().zip(sigma) {
                    *d = src[s];
                }
            }
            let h = lattice::hermite_mod(&projected, modulus);
            if best.as_ref().is_none_or(|b| h.iter().flatten().lt(b.iter().flatten())) {
                best = Some(h);
            }
        }
        best.expect("identity permutation")
    }
}

/// The normal form of the generator matrix of `Q`, computed in fixed-width
/// arithmetic from its kernel.
pub fn normal_form_of_degree(q: &DegreeMatrix) -> NormalForm {
    Canonicalizer::new(q.weights()).normal_form(q)
}

/// One entry per isomorphism class: the first degree matrix seen with each
/// normal form, keyed and ordered by canonical bytes.
pub fn filter_representatives<I: IntoIterator<Item = DegreeMatrix>>(
    matrices: I,
) -> BTreeMap<Vec<u8>, (DegreeMatrix, NormalForm)> {
    let mut seen = BTreeMap::new();
    let mut canon: Option<Canonicalizer> = None;
    for q in matrices {
        if canon.as_ref().is_none_or(|c| c.weights() != q.weights()) {
            canon = Some(Canonicalizer::new(q.weights()));
        }
        let nf = canon.as_ref().expect("set above").normal_form(&q);
        seen.entry(nf.to_bytes()).or_insert((q, nf));
    }
    seen
}

/// Kernel generator matrix of a degree matrix without validation; rows are
/// already in Hermite form.
pub fn generator_rows(q: &DegreeMatrix) -> Vec<Vec<Int>> {
    kernel_rows(q)
}
