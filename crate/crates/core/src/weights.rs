//! Gorenstein weight vectors, through their bijection with decompositions of
//! one into unit fractions: `(u_0, …, u_n) ↦ (u/u_0, …, u/u_n)` with
//! `u = lcm(u_i)`, inverted by `w ↦ (S/w_0, …, S/w_n)`.

use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use num_rational::Ratio;
use num_traits::{One, Zero};

use crate::arith::{gcd_all, lcm_all, Int};
use crate::error::{Error, Result};

/// All `u_0 ≥ … ≥ u_n` with `Σ 1/u_i = 1`, in lexicographically decreasing order.
pub fn enumerate_unit_fractions(n: usize) -> Vec<Vec<Int>> {
    assert!(n >= 1, "dimension must be positive");
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(n + 1);
    extend(Ratio::one(), n + 1, 1, &mut cur, &mut out);
    for t in out.iter_mut() {
        t.reverse();
    }
    out.sort_unstable_by(|a, b| b.cmp(a));
    out
}

// Denominators are chosen in ascending order; `terms` of them remain to sum to `rest`.
fn extend(rest: Ratio<Int>, terms: usize, prev: Int, cur: &mut Vec<Int>, out: &mut Vec<Vec<Int>>) {
    if terms == 1 {
        if rest.numer().is_one() && *rest.denom() >= prev {
            cur.push(*rest.denom());
            out.push(cur.clone());
            cur.pop();
        }
        return;
    }
    let lo = prev.max(rest.recip().ceil().to_integer());
    let hi = (Ratio::from_integer(terms as Int) / rest).floor().to_integer();
    for x in lo..=hi {
        let next = rest - Ratio::new(1, x);
        if next <= Ratio::zero() {
            continue;
        }
        cur.push(x);
        extend(next, terms - 1, x, cur, out);
        cur.pop();
    }
}

/// Ascending weights `u/u_i`.
pub fn weight_from_unit_fraction(u: &[Int]) -> Vec<Int> {
    let l = lcm_all(u.iter().copied());
    let mut w: Vec<Int> = u.iter().map(|&x| l / x).collect();
    w.sort_unstable();
    w
}

/// Descending denominators `S/w_i`; `None` unless every weight divides `S`.
pub fn unit_fraction_from_weight(w: &[Int]) -> Option<Vec<Int>> {
    let s: Int = w.iter().sum();
    if w.iter().any(|&x| s % x != 0) {
        return None;
    }
    let mut u: Vec<Int> = w.iter().map(|&x| s / x).collect();
    u.sort_unstable_by(|a, b| b.cmp(a));
    Some(u)
}

/// Any `n` of the `n+1` weights are coprime.
pub fn is_well_formed(w: &[Int]) -> bool {
    w.iter().all(|&x| x >= 1)
        && (0..w.len()).all(|i| {
            gcd_all(w.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &x)| x)) == 1
        })
}

/// Well-formed with `lcm(w) | Σ w`.
pub fn is_gorenstein_weight(w: &[Int]) -> bool {
    let s: Int = w.iter().sum();
    is_well_formed(w) && s % lcm_all(w.iter().copied()) == 0
}

/// Shard order used throughout: by weight sum, then lexicographically.
pub fn shard_order(a: &[Int], b: &[Int]) -> std::cmp::Ordering {
    let (sa, sb): (Int, Int) = (a.iter().sum(), b.iter().sum());
    sa.cmp(&sb).then_with(|| a.cmp(b))
}

/// All Gorenstein weight vectors of length `n+1`, sorted by `(S, w)`.
pub fn enumerate_gorenstein_weights(n: usize) -> Vec<Vec<Int>> {
    let mut out: Vec<Vec<Int>> = enumerate_unit_fractions(n).iter().map(|u| weight_from_unit_fraction(u)).collect();
    out.sort_unstable_by(|a, b| shard_order(a, b));
    out
}

pub fn write_cache(path: &Path, weights: &[Vec<Int>]) -> Result<()> {
    let io = |e: std::io::Error| Error::Io(format!("{}: {e}", path.display()));
    let tmp = path.with_extension("tmp");
    let mut f = std::io::BufWriter::new(fs::File::create(&tmp).map_err(io)?);
    for w in weights {
        let line: Vec<String> = w.iter().map(|x| x.to_string()).collect();
        writeln!(f, "{}", line.join(" ")).map_err(io)?;
    }
    f.flush().map_err(io)?;
    drop(f);
    fs::rename(&tmp, path).map_err(io)
}

pub fn read_cache(path: &Path) -> Result<Vec<Vec<Int>>> {
    let f = fs::File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (no, line) in BufReader::new(f).lines().enumerate() {
        let line = line.map_err(|e| Error::Parse(format!("{}:{}: {e}", path.display(), no + 1)))?;
        if line.trim().is_empty() {
            continue;
        }
        let w = line
            .split_whitespace()
            .map(|x| x.parse::<Int>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::Parse(format!("{}:{}: {e}", path.display(), no + 1)))?;
        out.push(w);
    }
    Ok(out)
}

/// Reads the cache at `path` when it holds a plausible table for dimension
/// `n`, otherwise enumerates and rewrites it.
pub fn load_or_compute(n: usize, path: &Path) -> Result<Vec<Vec<Int>>> {
    if let Ok(cached) = read_cache(path) {
        let plausible = !cached.is_empty()
            && cached.iter().all(|w| w.len() == n + 1 && w.windows(2).all(|p| p[0] <= p[1]) && is_gorenstein_weight(w))
            && cached.windows(2).all(|p| shard_order(&p[0], &p[1]).is_lt());
        if plausible {
            return Ok(cached);
        }
    }
    let weights = enumerate_gorenstein_weights(n);
    write_cache(path, &weights)?;
    Ok(weights)
}
