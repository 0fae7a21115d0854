//! Minimal Gorenstein torsion vectors of a Gorenstein weight vector.
//!
//! A torsion vector of order `μ` for `w` is a row `η ∈ (Z/μ)^{n+1}` such that
//! `[w; η]` is a degree matrix. Two of them are equivalent when they differ by
//! `η ↦ uη + kw` with `u` a unit mod `μ`; the minimal one is lexicographically
//! least among its class (on representatives in `[0, μ)`).

use crate::arith::{divisors, gcd, gcd_all, lcm_all, mod_inverse, modulo, mul_mod, prime_divisors, units, Int};
use crate::invariants::{is_gorenstein, DegreeMatrix};
use crate::lattice::{md, mm, xgcd_word, Word};

/// A candidate order `μ = ab` with `a | L` and `b | S/L`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OrderPair {
    pub a: Int,
    pub b: Int,
}

impl OrderPair {
    pub fn order(self) -> Int {
        self.a * self.b
    }
}

fn lcm_and_sum(w: &[Int]) -> (Int, Int) {
    (lcm_all(w.iter().copied()), w.iter().sum())
}

/// All pairs `(a, b)` that can carry a Gorenstein torsion vector, sorted by
/// `(ab, a)`.
pub fn admissible_order_pairs(w: &[Int]) -> Vec<OrderPair> {
    let (l, s) = lcm_and_sum(w);
    assert_eq!(s % l, 0, "not a Gorenstein weight vector");
    let mut out = Vec::new();
    for &a in &divisors(l) {
        let alpha = l / a;
        for &b in &divisors(s / l) {
            let mu = a * b;
            if mu < 2 {
                continue;
            }
            let mut g = mu;
            'pairs: for (i, &wi) in w.iter().enumerate() {
                for &wj in &w[i..] {
                    let p = wi * wj;
                    g = gcd(g, p / gcd(alpha, p));
                    if g == 1 {
                        break 'pairs;
                    }
                }
            }
            if g == 1 {
                out.push(OrderPair { a, b });
            }
        }
    }
    out.sort_unstable_by_key(|p| (p.order(), p.a));
    out
}

/// The bounds `d_i = μ·gcd(μ, w_0..w_i) / gcd(μ, w_0..w_{i-1})`.
pub fn minimality_bounds(w: &[Int], mu: Int) -> Vec<Int> {
    let mut prev = mu;
    w.iter()
        .map(|&x| {
            let g = gcd(prev, x);
            let d = mu * g / prev;
            prev = g;
            d
        })
        .collect()
}

// Rows w and η mod p stay linearly independent when any one column is removed.
fn independent_after_deletion<T: Word>(wp: &[T], ep: &[T], p: T) -> bool {
    let n = wp.len();
    (0..n).all(|l| {
        let Some(i) = (0..n).find(|&i| i != l && !(wp[i].is_zero() && ep[i].is_zero())) else {
            return false;
        };
        (0..n).any(|j| j != l && j != i && !((wp[i] * ep[j] - wp[j] * ep[i]) % p).is_zero())
    })
}

/// `η ≤ uη` for every unit `u`, on representatives in `[0, μ)`.
///
/// The units fixing `η_0, …, η_{j-1}` are those `≡ 1 mod μ/g`, `g` the gcd of
/// `μ` and those entries, and only they can decide coordinate `j`. Over them
/// `uη_j` runs through `η_j + ⟨δ⟩` for a step `δ`, so only the values below
/// `η_j` in that coset are tried, each against the units that reach it.
fn unit_minimal(eta: &[Int], mu: Int) -> bool {
    let mut g = mu;
    for &x in eta {
        if g == 1 {
            return true;
        }
        if x == 0 {
            continue;
        }
        if g == mu {
            // every unit: the orbit of x is the residues with the same gcd
            if mu % x != 0 {
                return false;
            }
            g = x;
            continue;
        }
        let m = mu / g;
        let r = x % g;
        if r == 0 {
            continue;
        }
        // u = 1 + m t moves x by t·s
        let s = m * r;
        let delta = gcd(s, mu);
        let e = mu / delta;
        let inv = mod_inverse(s / delta, e).expect("coprime after dividing out the gcd");
        let period = m * e;
        let mut v = x % delta;
        while v < x {
            let t = mul_mod((v - x) / delta, inv, e);
            // some u ≡ 1 + m t (mod m e) is a unit
            if gcd(gcd(1 + m * t, period), mu) == 1 {
                return false;
            }
            v += delta;
        }
        g = gcd(g, x);
    }
    true
}

/// Minimal in its class: `η_i < d_i` for all `i` and `η ≤ uη` for all units.
pub fn is_minimal(w: &[Int], mu: Int, eta: &[Int]) -> bool {
    let d = minimality_bounds(w, mu);
    eta.iter().zip(&d).all(|(&x, &b)| (0..b).contains(&x)) && unit_minimal(eta, mu)
}

/// Whether `[w; η]` is the degree matrix of a Gorenstein fake weighted
/// projective space. Uses the literal minors criterion and the invariant
/// formulas, independent of the enumeration below.
pub fn is_gorenstein_torsion(w: &[Int], mu: Int, eta: &[Int]) -> bool {
    if mu < 2 || eta.len() != w.len() {
        return false;
    }
    match DegreeMatrix::new_unverified(w.to_vec(), vec![(mu, eta.to_vec())]) {
        Ok(q) => q.failing_column().is_none() && is_gorenstein(&q),
        Err(_) => false,
    }
}

/// The least element of `{uη + kw}` by exhaustive search.
pub fn minimal_representative(w: &[Int], mu: Int, eta: &[Int]) -> Vec<Int> {
    let mut best: Option<Vec<Int>> = None;
    for u in units(mu) {
        for k in 0..mu {
            let v: Vec<Int> = eta.iter().zip(w).map(|(&x, &wi)| modulo(u * x + k * wi, mu)).collect();
            if best.as_ref().is_none_or(|b| v < *b) {
                best = Some(v);
            }
        }
    }
    best.expect("at least one unit")
}

/// All minimal Gorenstein torsion vectors of order `ab` whose invariant
/// `gcd(ab, L_{0}, …, L_{n}) = a`, in ascending lexicographic order.
///
/// Entry `i` runs over multiples `c_i k_i < d_i` of `c_i = w_i / gcd(L/a, w_i)`;
/// the last entry is solved from the row-sum congruence.
pub fn minimal_torsion_vectors(w: &[Int], pair: OrderPair) -> Vec<Vec<Int>> {
    let (l, _) = lcm_and_sum(w);
    let mu = pair.order();
    let alpha = l / pair.a;
    let c: Vec<Int> = w.iter().map(|&x| x / gcd(alpha, x)).collect();
    let d = minimality_bounds(w, mu);
    // L_i = (L/w_i)·η_i = k_i·L/gcd(α, w_i) is a multiple of a, so the gcd is
    // a exactly when the cofactors k_i·(L/gcd(α, w_i))/a are coprime to b
    let cofactor: Vec<Int> = w.iter().map(|&x| modulo(l / gcd(alpha, x) / pair.a, pair.b)).collect();
    let small = mu < 1 << 31 && c.iter().all(|&x| x < 1 << 31);
    let mut out = if small {
        let t = |v: &[Int]| v.iter().map(|&x| x as i64).collect::<Vec<i64>>();
        Search::new(w, mu as i64, pair.b as i64, t(&c), t(&d), t(&cofactor)).run()
    } else {
        Search::new(w, mu, pair.b, c, d, cofactor).run()
    };
    out.sort_unstable();
    out
}

struct Search<'a, T> {
    w: &'a [Int],
    mu: T,
    b: T,
    c: Vec<T>,
    d: Vec<T>,
    cofactor: Vec<T>,
    primes: Vec<Prime<T>>,
}

// A prime of μ with what the generation test needs modulo it.
struct Prime<T> {
    p: T,
    w: Vec<i64>,
    // inverse of w_i mod p, or 0
    w_inv: Vec<i64>,
    // from column k on: columns forced to η_i ≡ 0 with w_i ≢ 0, and columns not forced
    forced: Vec<usize>,
    open: Vec<usize>,
}

impl<'a, T: Word> Search<'a, T> {
    fn new(w: &'a [Int], mu: T, b: T, c: Vec<T>, d: Vec<T>, cofactor: Vec<T>) -> Self {
        let mu_int = mu.to_i128().expect("fits");
        let n1 = w.len();
        let primes = prime_divisors(mu_int)
            .into_iter()
            .map(|p| {
                let small = |x: Int| i64::try_from(x).expect("primes of μ fit in 64 bits");
                let wp: Vec<i64> = w.iter().map(|&x| small(modulo(x, p))).collect();
                let w_inv = wp.iter().map(|&x| small(mod_inverse(x as Int, p).unwrap_or(0))).collect();
                let pt = T::from(p).expect("prime below μ");
                let zero: Vec<bool> = c.iter().map(|&ci| (ci % pt).is_zero()).collect();
                let mut forced = vec![0; n1 + 1];
                let mut open = vec![0; n1 + 1];
                for k in (0..n1).rev() {
                    forced[k] = forced[k + 1] + (zero[k] && wp[k] != 0) as usize;
                    open[k] = open[k + 1] + !zero[k] as usize;
                }
                Prime { p: pt, w: wp, w_inv, forced, open }
            })
            .collect();
        Search { w, mu, b, c, d, cofactor, primes }
    }

    fn run(&self) -> Vec<Vec<Int>> {
        let mut out = Vec::new();
        let mut eta = Vec::with_capacity(self.w.len());
        self.descend(&mut eta, T::zero(), false, &mut out);
        out
    }

    fn descend(&self, eta: &mut Vec<T>, sum: T, nonzero: bool, out: &mut Vec<Vec<Int>>) {
        let i = eta.len();
        let n = self.w.len() - 1;
        if i == n {
            self.finish(eta, sum, nonzero, out);
            return;
        }
        let mut x = T::zero();
        while x < self.d[i] {
            // the first nonzero entry of a unit-minimal vector divides μ
            if nonzero || x.is_zero() || (self.mu % x).is_zero() {
                eta.push(x);
                if !self.can_generate(eta) {
                    eta.pop();
                    x = x + self.c[i];
                    continue;
                }
                let next = sum + x;
                let next = if next >= self.mu { next - self.mu } else { next };
                self.descend(eta, next, nonzero || !x.is_zero(), out);
                eta.pop();
            }
            x = x + self.c[i];
        }
    }

    fn finish(&self, eta: &mut Vec<T>, sum: T, nonzero: bool, out: &mut Vec<Vec<Int>>) {
        let n = self.w.len() - 1;
        let (cn, mu) = (self.c[n], self.mu);
        // c_n k ≡ -sum (mod μ)
        let target = md(-sum, mu);
        let (g, inv, _) = xgcd_word(cn, mu);
        if !(target % g).is_zero() {
            return;
        }
        let step = mu / g;
        let mut k = mm(target / g, inv, step);
        while cn * k < self.d[n] {
            let x = cn * k;
            if nonzero || x.is_zero() || (mu % x).is_zero() {
                eta.push(x);
                if self.accept(eta) {
                    out.push(eta.iter().map(|x| x.to_i128().expect("fits")).collect());
                }
                eta.pop();
            }
            k = k + step;
        }
    }

    // The minors of [w; η] survive any one deletion mod p iff η - λw has at
    // least two nonzero entries for every λ. With only a prefix of η fixed,
    // an open column adds at most one and a forced one adds [λw_i ≢ 0]; only
    // λ = 0, the ratios η_i/w_i of the prefix and one other value can differ.
    fn can_generate(&self, eta: &[T]) -> bool {
        let k = eta.len();
        self.primes.iter().all(|q| {
            if q.p >= T::from(1i64 << 31).expect("fits") {
                return true;
            }
            let p = q.p.to_i64().expect("prime fits");
            let ep: Vec<i64> = eta.iter().map(|&x| (x % q.p).to_i64().expect("below p")).collect();
            let rest = |lambda: i64| q.open[k] + if lambda == 0 { 0 } else { q.forced[k] };
            let weight = |lambda: i64| (0..k).filter(|&i| (ep[i] - lambda * q.w[i]) % p != 0).count() + rest(lambda);
            if weight(0) < 2 {
                return false;
            }
            let mut ratios = 0;
            for i in 0..k {
                if q.w[i] != 0 {
                    ratios += 1;
                    let lambda = ep[i] * q.w_inv[i] % p;
                    if weight(lambda) < 2 {
                        return false;
                    }
                }
            }
            // some λ avoiding 0 and every ratio exists
            if ratios + 1 < p as usize {
                let generic = (0..k).filter(|&i| q.w[i] != 0 || ep[i] != 0).count() + q.open[k] + q.forced[k];
                if generic < 2 {
                    return false;
                }
            }
            true
        })
    }

    fn accept(&self, eta: &[T]) -> bool {
        if self.b > T::one() {
            let g = eta
                .iter()
                .zip(&self.c)
                .zip(&self.cofactor)
                .fold(self.b, |g, ((&x, &ci), &f)| xgcd_word(g, mm(x / ci, f, self.b)).0);
            if !g.is_one() {
                return false;
            }
        }
        self.primes.iter().all(|q| {
            if q.p < T::from(1i64 << 31).expect("fits") {
                let p = q.p.to_i64().expect("fits");
                let ep: Vec<i64> = eta.iter().map(|&x| (x % q.p).to_i64().expect("below p")).collect();
                independent_after_deletion(&q.w, &ep, p)
            } else {
                let p = q.p.to_i128().expect("fits");
                let wp: Vec<Int> = q.w.iter().map(|&x| x as Int).collect();
                let ep: Vec<Int> = eta.iter().map(|&x| (x % q.p).to_i128().expect("fits")).collect();
                independent_after_deletion(&wp, &ep, p)
            }
        }) && unit_minimal(&eta.iter().map(|x| x.to_i128().expect("fits")).collect::<Vec<Int>>(), self.mu.to_i128().expect("fits"))
    }
}

/// Every minimal Gorenstein torsion vector of every order for `w`, as
/// `(μ, η)` pairs sorted by `μ` descending and `η` ascending.
pub fn all_minimal_torsion(w: &[Int]) -> Vec<(Int, Vec<Int>)> {
    let mut out: Vec<(Int, Vec<Int>)> = admissible_order_pairs(w)
        .into_iter()
        .flat_map(|p| minimal_torsion_vectors(w, p).into_iter().map(move |eta| (p.order(), eta)))
        .collect();
    out.sort_unstable_by(|x, y| y.0.cmp(&x.0).then_with(|| x.1.cmp(&y.1)));
    out.dedup();
    out
}

/// Exhaustive scan of `(Z/μ)^{n+1}`: the Gorenstein torsion vectors of order
/// `μ` satisfying [`is_minimal`]. Exponential; meant as a test oracle.
pub fn scan_minimal_torsion(w: &[Int], mu: Int) -> Vec<Vec<Int>> {
    let n1 = w.len();
    let mut out = Vec::new();
    let mut eta = vec![0; n1];
    loop {
        let sum = eta.iter().sum::<i128>();
        if sum % mu == 0 && is_minimal(w, mu, &eta) && is_gorenstein_torsion(w, mu, &eta) {
            out.push(eta.clone());
        }
        // odometer, last coordinate fastest so the output is lexicographic
        let mut i = n1;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            eta[i] += 1;
            if eta[i] < mu {
                break;
            }
            eta[i] = 0;
        }
    }
}

/// `gcd(μ, L_0, …, L_n)` for a torsion row, which picks the pair it belongs to.
pub fn pair_of(w: &[Int], mu: Int, eta: &[Int]) -> OrderPair {
    let (l, _) = lcm_and_sum(w);
    let a = gcd_all(std::iter::once(mu).chain(eta.iter().zip(w).map(|(&x, &wi)| (l / wi) * x)));
    OrderPair { a, b: mu / a }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::enumerate_gorenstein_weights;

    // A rejected prefix has no completion passing the exact test, with
    // columns whose step is divisible by p held at 0.
    #[test]
    fn generation_pruning_is_sound() {
        for w in [vec![1, 1, 1, 1], vec![1, 1, 2, 4], vec![1, 2, 3, 6], vec![2, 3, 10, 15]] {
            for p in [2i64, 3, 5, 7] {
                for mask in 0..16usize {
                    let c: Vec<i64> = (0..4).map(|i| if mask >> i & 1 == 1 { p } else { 1 }).collect();
                    let s = Search::new(&w, p, 1, c.clone(), vec![p; 4], vec![0; 4]);
                    let q = &s.primes[0];
                    let values = |i: usize| if c[i] == p { vec![0] } else { (0..p).collect() };
                    let mut complete = vec![vec![]];
                    for i in 0..4 {
                        complete = complete.into_iter().flat_map(|e: Vec<i64>| values(i).into_iter().map(move |x| [e.clone(), vec![x]].concat())).collect();
                    }
                    for eta in &complete {
                        let exact = independent_after_deletion(&q.w, eta, p);
                        assert_eq!(s.can_generate(eta), exact, "{w:?} p={p} {eta:?}");
                        for k in 0..4 {
                            if exact {
                                assert!(s.can_generate(&eta[..k]), "{w:?} p={p} {eta:?} pruned at {k}");
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn unit_minimality_matches_all_units() {
        for mu in 2..=36 {
            let all = units(mu);
            for idx in 0..mu.pow(3) {
                let eta = [idx / (mu * mu), (idx / mu) % mu, idx % mu];
                let brute = all.iter().all(|&u| eta <= [0, 1, 2].map(|i| mul_mod(u, eta[i], mu)));
                assert_eq!(unit_minimal(&eta, mu), brute, "μ={mu} {eta:?}");
            }
        }
    }

    fn by_order(w: &[Int], mu: Int) -> Vec<Vec<Int>> {
        let mut v: Vec<Vec<Int>> = admissible_order_pairs(w)
            .into_iter()
            .filter(|p| p.order() == mu)
            .flat_map(|p| minimal_torsion_vectors(w, p))
            .collect();
        v.sort();
        v
    }

    #[test]
    fn pairs_examples() {
        assert_eq!(admissible_order_pairs(&[1, 1, 1]), vec![OrderPair { a: 1, b: 3 }]);
        let mus: Vec<Int> = admissible_order_pairs(&[1, 1, 2]).iter().map(|p| p.order()).collect();
        assert!(mus.iter().all(|m| [2, 4].contains(m)), "{mus:?}");
        assert!(admissible_order_pairs(&[1, 2, 3]).iter().all(|p| p.b == 1));
    }

    #[test]
    fn enumeration_examples() {
        assert_eq!(by_order(&[1, 1, 1], 3), vec![vec![0, 1, 2]]);
        assert_eq!(by_order(&[1, 1, 2], 2), vec![vec![0, 1, 1]]);
        assert_eq!(
            by_order(&[1, 1, 1, 1], 2),
            vec![vec![0, 0, 1, 1], vec![0, 1, 0, 1], vec![0, 1, 1, 0]]
        );
    }

    #[test]
    fn minimality_examples() {
        assert!(is_minimal(&[1, 1, 1], 3, &[0, 1, 2]));
        assert!(!is_minimal(&[1, 1, 1], 3, &[0, 2, 1]));
        assert!(!is_minimal(&[1, 1, 2], 2, &[1, 0, 1]));
        assert_eq!(minimality_bounds(&[1, 1, 1], 3), vec![1, 3, 3]);
    }

    #[test]
    fn gorenstein_torsion_examples() {
        assert!(is_gorenstein_torsion(&[1, 1, 1], 3, &[0, 1, 2]));
        assert!(!is_gorenstein_torsion(&[1, 1, 1], 3, &[0, 0, 0]));
        assert!(!is_gorenstein_torsion(&[1, 1, 1], 2, &[0, 1, 1]));
    }

    #[test]
    fn matches_scan_in_dimension_two() {
        for w in enumerate_gorenstein_weights(2) {
            let s: Int = w.iter().sum();
            for mu in 2..=12 {
                if s % mu == 0 {
                    assert_eq!(by_order(&w, mu), scan_minimal_torsion(&w, mu), "{w:?} μ={mu}");
                } else {
                    assert!(by_order(&w, mu).is_empty());
                }
            }
        }
    }

    #[test]
    fn pairs_partition_the_vectors() {
        for w in enumerate_gorenstein_weights(3) {
            for p in admissible_order_pairs(&w) {
                for eta in minimal_torsion_vectors(&w, p) {
                    assert_eq!(pair_of(&w, p.order(), &eta), p);
                }
            }
        }
    }
}
