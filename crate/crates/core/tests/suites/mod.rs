//! Property and oracle suites shared by the `properties` and `acceptance`
//! targets. Each suite returns a one-line summary or the first failure.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::sync::OnceLock;

use proptest::prelude::*;
use proptest::test_runner::{RngAlgorithm, TestRng, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use fwps::abelian::{
    coprime_shift, factor_automorphism, generates_by_smith, is_generating, product, Elementary, GMatrix,
    GroupElement, InvariantFactorGroup,
};
use fwps::arith::{divisors, gcd, gcd_all, prime_divisors};
use fwps::classify::classify_weight;
use fwps::intmat::determinant_int;
use fwps::invariants::{
    degree_from_generator, generator_from_degree, gorenstein_index, picard_index, DegreeMatrix, GeneratorMatrix,
};
use fwps::normal_form::{normal_form_of_degree, normal_form_of_generator, NormalForm};
use fwps::reflexive::cross_check;
use fwps::torsion::{
    admissible_order_pairs, is_gorenstein_torsion, minimal_representative, minimal_torsion_vectors,
    scan_minimal_torsion,
};
use fwps::weights::enumerate_gorenstein_weights;
use fwps::Int;

pub type Outcome = Result<String, String>;

// Fixed seed so a failure reproduces.
fn run<S: Strategy>(cases: u32, strategy: S, test: impl Fn(S::Value) -> std::result::Result<(), TestCaseError>) -> Outcome {
    let mut runner = TestRunner::new_with_rng(config(cases), TestRng::deterministic_rng(RngAlgorithm::ChaCha));
    runner.run(&strategy, test).map(|()| format!("{cases} cases")).map_err(|e| e.to_string())
}

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, max_global_rejects: 100_000, failure_persistence: None, ..ProptestConfig::default() }
}

fn chains(max_len: usize) -> Vec<Vec<Int>> {
    let mut out = vec![vec![]];
    let mut frontier: Vec<Vec<Int>> = (2..=12).map(|m| vec![m]).collect();
    while let Some(c) = frontier.pop() {
        if c.len() < max_len {
            let last = *c.last().unwrap();
            for d in divisors(last).into_iter().filter(|&d| d >= 2) {
                let mut next = c.clone();
                next.push(d);
                frontier.push(next);
            }
        }
        out.push(c);
    }
    out.sort();
    out
}

fn arb_group() -> impl Strategy<Value = InvariantFactorGroup> {
    let all: Vec<(usize, Vec<Int>)> =
        (0..=2).flat_map(|k| chains(2).into_iter().map(move |c| (k, c))).filter(|(k, c)| k + c.len() >= 1).collect();
    proptest::sample::select(all).prop_map(|(k, c)| InvariantFactorGroup::new(k, c).unwrap())
}

fn arb_element(g: &InvariantFactorGroup) -> impl Strategy<Value = GroupElement> {
    let g = g.clone();
    let k = g.rank();
    let factors = g.factors().to_vec();
    (proptest::collection::vec(-5 as Int..=5, k), proptest::collection::vec(0 as Int..1000, factors.len())).prop_map(
        move |(free, t)| {
            let torsion = t.iter().zip(&factors).map(|(&x, &m)| x % m).collect();
            g.element(free, torsion).unwrap()
        },
    )
}

// Random entries, then forced into the block shape of an endomorphism.
fn arb_endomorphism(g: &InvariantFactorGroup) -> impl Strategy<Value = GMatrix> {
    let g = g.clone();
    let n = g.len();
    proptest::collection::vec(proptest::collection::vec(-4 as Int..=4, n), n).prop_map(move |mut e| {
        let k = g.rank();
        let mu = g.factors();
        for (i, row) in e.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                if i < k && j >= k {
                    *x = 0;
                }
                if i >= k && j >= k && i < j {
                    *x *= mu[i - k] / mu[j - k];
                }
            }
        }
        GMatrix::from_entries(&g, e).unwrap()
    })
}

fn arb_elementary(g: &InvariantFactorGroup) -> impl Strategy<Value = Option<Elementary>> {
    let g = g.clone();
    (0..6u8, 0..4usize, 0..4usize, -3 as Int..=3, 1 as Int..12).prop_map(move |(kind, i, j, times, unit)| {
        let e = match kind {
            0 => Elementary::NegateFree { i },
            1 => Elementary::ScaleTorsion { i, unit },
            2 => Elementary::AddFree { from: i, to: j, times },
            3 => Elementary::FreeIntoTorsion { free: i, torsion: j, times },
            4 => Elementary::TorsionDown { from: i, to: j, times },
            _ => Elementary::TorsionUp { from: i, to: j, times },
        };
        e.matrix(&g).ok().map(|_| e)
    })
}

pub fn g_matrix_composition(cases: u32) -> Outcome {
    let strategy = arb_group().prop_flat_map(|g| (Just(g.clone()), arb_endomorphism(&g), arb_endomorphism(&g), arb_element(&g)));
    run(cases, strategy, |(g, a, b, x)| {
        let ab = a.mul(&b).unwrap();
        prop_assert_eq!(ab.apply(&x).unwrap(), a.apply(&b.apply(&x).unwrap()).unwrap());
        prop_assert_eq!(GMatrix::identity(&g).mul(&a).unwrap(), a.clone());
        Ok(())
    })
}

pub fn factorization_round_trip(cases: u32) -> Outcome {
    let strategy =
        arb_group().prop_flat_map(|g| (Just(g.clone()), proptest::collection::vec(arb_elementary(&g), 0..8)));
    run(cases, strategy, |(g, ops)| {
        let ops: Vec<Elementary> = ops.into_iter().flatten().collect();
        let m = product(&g, &ops).unwrap();
        let factors = factor_automorphism(&m).unwrap();
        prop_assert_eq!(product(&g, &factors).unwrap(), m);
        Ok(())
    })
}

// Subgroup closure in G/pG by breadth-first search, or None when the quotient
// is too large to walk.
fn closure_is_everything(elements: &[GroupElement], g: &InvariantFactorGroup, p: Int) -> Option<bool> {
    let k = g.rank();
    let moduli: Vec<Int> = (0..k).map(|_| p).chain(g.factors().iter().map(|&m| gcd(m, p))).collect();
    let size: Int = moduli.iter().product();
    if size > 200_000 {
        return None;
    }
    let gens: Vec<Vec<Int>> =
        elements.iter().map(|e| e.coords().iter().zip(&moduli).map(|(&x, &m)| x.rem_euclid(m)).collect()).collect();
    let zero = vec![0; moduli.len()];
    let mut seen: HashSet<Vec<Int>> = HashSet::from([zero.clone()]);
    let mut queue = VecDeque::from([zero]);
    while let Some(v) = queue.pop_front() {
        for gen in &gens {
            let w: Vec<Int> = v.iter().zip(gen).zip(&moduli).map(|((&a, &b), &m)| (a + b) % m).collect();
            if seen.insert(w.clone()) {
                queue.push_back(w);
            }
        }
    }
    Some(seen.len() as Int == size)
}

// Elements generate iff they generate G/pG for every prime p. Only primes
// dividing |G/H| matter, and those divide |T| times any nonzero maximal minor
// of the free rows; with no such minor the quotient is infinite and p = 2
// already fails.
fn generates_by_closure(elements: &[GroupElement], g: &InvariantFactorGroup) -> Option<bool> {
    let k = g.rank();
    let n = elements.len();
    let mut bound: Int = g.torsion_order();
    if k > 0 {
        let free: Vec<Vec<Int>> = (0..k).map(|i| elements.iter().map(|e| e.free[i]).collect()).collect();
        let minor = fwps::intmat::combinations(n, k)
            .into_iter()
            .map(|cols| {
                let sub: Vec<Vec<Int>> = free.iter().map(|r| cols.iter().map(|&c| r[c]).collect()).collect();
                Int::try_from(determinant_int(&sub)).unwrap().abs()
            })
            .filter(|&d| d != 0)
            .min();
        bound *= minor.unwrap_or(2);
    }
    let mut primes = prime_divisors(bound);
    if primes.is_empty() {
        primes.push(2);
    }
    let mut all = true;
    for p in primes {
        all &= closure_is_everything(elements, g, p)?;
    }
    Some(all)
}

/// Every group with `k + r ≤ 4` and `μ ≤ 12`, 25 random element sets each.
pub fn generation_vs_closure() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut groups = 0;
    let mut checked = 0;
    let mut generating = 0;
    for k in 0..=4usize {
        for c in chains(4 - k) {
            if k + c.len() == 0 {
                continue;
            }
            let g = InvariantFactorGroup::new(k, c.clone()).unwrap();
            groups += 1;
            for _ in 0..25 {
                let n = g.len() + rng.gen_range(0..=2);
                let elements: Vec<GroupElement> = (0..n)
                    .map(|_| {
                        let free = (0..k).map(|_| rng.gen_range(-2..=2)).collect();
                        let torsion = c.iter().map(|&m| rng.gen_range(0..m)).collect();
                        g.element(free, torsion).unwrap()
                    })
                    .collect();
                let Some(expected) = generates_by_closure(&elements, &g) else { continue };
                if is_generating(&elements, &g).unwrap() != expected || generates_by_smith(&elements, &g).unwrap() != expected {
                    return Err(format!("disagreement on {g:?} {elements:?}"));
                }
                checked += 1;
                generating += expected as usize;
            }
        }
    }
    if checked < 3000 || generating < 300 || generating + 300 > checked {
        return Err(format!("weak sample: {generating} generating of {checked}"));
    }
    Ok(format!("{groups} groups, {checked} element sets, {generating} generating"))
}

pub fn coprime_shift_least() -> Outcome {
    for a in -30 as Int..=30 {
        for b in -30 as Int..=30 {
            for c in (-30 as Int..=30).filter(|&c| c != 0) {
                let ok = match coprime_shift(a, b, c) {
                    Ok(k) => k >= 0 && gcd(a + k * b, c) == 1 && (0..k).all(|j| gcd(a + j * b, c) != 1),
                    Err(_) => gcd_all([a, b, c]) != 1,
                };
                if !ok {
                    return Err(format!("coprime_shift({a}, {b}, {c})"));
                }
            }
        }
    }
    Ok("all |a|, |b|, |c| ≤ 30".into())
}

fn generator_pool() -> &'static Vec<(GeneratorMatrix, NormalForm)> {
    static POOL: OnceLock<Vec<(GeneratorMatrix, NormalForm)>> = OnceLock::new();
    POOL.get_or_init(|| {
        let mut weights: Vec<Vec<Int>> = (1..=3).flat_map(enumerate_gorenstein_weights).collect();
        weights.extend(enumerate_gorenstein_weights(4).into_iter().step_by(7));
        weights
            .iter()
            .flat_map(|w| classify_weight(w))
            .map(|r| (generator_from_degree(&r.degree).unwrap(), r.normal_form))
            .collect()
    })
}

fn arb_unimodular_ops() -> impl Strategy<Value = Vec<(usize, usize, Int, bool)>> {
    proptest::collection::vec((0..5usize, 0..5usize, -2 as Int..=2, any::<bool>()), 0..10)
}

/// Random row operations and a random column permutation leave the normal
/// form unchanged.
pub fn normal_form_invariance(cases: u32) -> Outcome {
    let strategy = (any::<proptest::sample::Index>(), arb_unimodular_ops(), any::<u64>());
    run(cases, strategy, |(idx, ops, shuffle)| {
        let pool = generator_pool();
        let (p, nf) = &pool[idx.index(pool.len())];
        let n = p.dim();
        let mut rows = p.rows().to_vec();
        for (i, j, c, swap) in ops {
            let (i, j) = (i % n, j % n);
            if swap {
                rows.swap(i, j);
            } else if i != j {
                let src = rows[j].clone();
                rows[i].iter_mut().zip(&src).for_each(|(x, &y)| *x += c * y);
            } else {
                rows[i].iter_mut().for_each(|x| *x = -*x);
            }
        }
        let mut perm: Vec<usize> = (0..=n).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(shuffle);
        for i in (1..perm.len()).rev() {
            perm.swap(i, rng.gen_range(0..=i));
        }
        let moved = GeneratorMatrix::new_unverified(rows).unwrap();
        let moved = GeneratorMatrix::new_unverified(moved.permuted(&perm)).unwrap();
        prop_assert_eq!(&normal_form_of_generator(&moved).unwrap(), nf);
        prop_assert_eq!(&NormalForm::from_bytes(&nf.to_bytes()).unwrap(), nf);
        Ok(())
    })
}

fn arb_degree_matrix() -> impl Strategy<Value = Option<DegreeMatrix>> {
    (
        proptest::collection::vec(1 as Int..=6, 3..=5),
        proptest::collection::vec((2 as Int..=6, proptest::collection::vec(0 as Int..6, 5)), 0..=2),
    )
        .prop_map(|(w, rows)| {
            let mut factors: Vec<Int> = rows.iter().map(|r| r.0).collect();
            factors.sort_unstable_by(|a, b| b.cmp(a));
            // force a divisibility chain
            for i in 1..factors.len() {
                factors[i] = gcd(factors[i], factors[i - 1]);
            }
            let torsion: Vec<(Int, Vec<Int>)> = factors
                .iter()
                .zip(&rows)
                .filter(|(&m, _)| m >= 2)
                .map(|(&m, r)| (m, r.1[..w.len()].to_vec()))
                .collect();
            DegreeMatrix::new(w, torsion).ok()
        })
}

pub fn gorenstein_vs_reflexive(cases: u32) -> Outcome {
    run(cases, arb_degree_matrix(), |q| {
        prop_assume!(q.is_some());
        prop_assert!(cross_check(&q.unwrap()).unwrap());
        Ok(())
    })
}

pub fn degree_generator_round_trip(cases: u32) -> Outcome {
    run(cases, arb_degree_matrix(), |q| {
        prop_assume!(q.is_some());
        let q = q.unwrap();
        let p = generator_from_degree(&q).unwrap();
        let back = degree_from_generator(&p).unwrap();
        prop_assert_eq!(back.weights(), q.weights());
        prop_assert_eq!(back.factors(), q.factors());
        prop_assert_eq!(back.failing_column(), None);
        prop_assert_eq!(picard_index(&back), picard_index(&q));
        prop_assert_eq!(gorenstein_index(&back), gorenstein_index(&q));
        prop_assert_eq!(normal_form_of_degree(&back), normal_form_of_degree(&q));
        Ok(())
    })
}

fn enumerated(w: &[Int], mu: Int) -> std::result::Result<Vec<Vec<Int>>, String> {
    let mut v: Vec<Vec<Int>> = admissible_order_pairs(w)
        .into_iter()
        .filter(|p| p.order() == mu)
        .flat_map(|p| minimal_torsion_vectors(w, p))
        .collect();
    let len = v.len();
    v.sort();
    v.dedup();
    if v.len() != len {
        return Err(format!("pairs overlap for {w:?}, μ={mu}"));
    }
    Ok(v)
}

fn all_gorenstein_rows(w: &[Int], mu: Int) -> Vec<Vec<Int>> {
    let n1 = w.len();
    let total = (mu as usize).pow(n1 as u32);
    (0..total)
        .map(|idx| {
            let mut x = idx;
            (0..n1)
                .map(|_| {
                    let d = (x % mu as usize) as Int;
                    x /= mu as usize;
                    d
                })
                .collect::<Vec<Int>>()
        })
        .filter(|eta| eta.iter().sum::<Int>() % mu == 0 && is_gorenstein_torsion(w, mu, eta))
        .collect()
}

/// The order-pair enumeration against the library's own scan, and against the
/// least member of every class of Gorenstein rows found by brute force.
pub fn minimal_torsion_vs_scan() -> Outcome {
    let mut cases = 0;
    let mut vectors = 0;
    for n in 1..=3 {
        for w in enumerate_gorenstein_weights(n) {
            for mu in 2..=12 {
                let got = enumerated(&w, mu)?;
                if got != scan_minimal_torsion(&w, mu) {
                    return Err(format!("scan disagrees for {w:?} μ={mu}"));
                }
                let least: BTreeSet<Vec<Int>> =
                    all_gorenstein_rows(&w, mu).iter().map(|eta| minimal_representative(&w, mu, eta)).collect();
                if least != got.iter().cloned().collect() {
                    return Err(format!("brute force disagrees for {w:?} μ={mu}"));
                }
                cases += 1;
                vectors += got.len();
            }
        }
    }
    Ok(format!("{cases} (weights, μ) cases, {vectors} minimal vectors"))
}
