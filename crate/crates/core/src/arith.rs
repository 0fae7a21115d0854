//! Integer helpers shared by every module.
//!
//! All domain integers are `i128`. The build profiles keep overflow checks on,
//! so an out-of-range intermediate panics instead of wrapping.

/// The integer type used for weights, residues and matrix entries.
pub type Int = i128;

pub fn gcd(a: Int, b: Int) -> Int {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn gcd_all<I: IntoIterator<Item = Int>>(values: I) -> Int {
    values.into_iter().fold(0, gcd)
}

pub fn lcm(a: Int, b: Int) -> Int {
    if a == 0 || b == 0 {
        return 0;
    }
    (a / gcd(a, b)).checked_mul(b).expect("lcm overflow").abs()
}

pub fn lcm_all<I: IntoIterator<Item = Int>>(values: I) -> Int {
    values.into_iter().fold(1, lcm)
}

/// Extended Euclid: returns `(g, s, t)` with `g = s*a + t*b = gcd(a, b) >= 0`.
pub fn xgcd(a: Int, b: Int) -> (Int, Int, Int) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1, 0);
    let (mut old_t, mut t) = (0, 1);
    while r != 0 {
        let q = old_r.div_euclid(r);
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    if old_r < 0 {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

/// Canonical representative in `[0, m)`. `m = 0` leaves the value untouched.
#[inline]
pub fn modulo(a: Int, m: Int) -> Int {
    if m == 0 {
        a
    } else {
        a.rem_euclid(m)
    }
}

#[inline]
pub fn mul_mod(a: Int, b: Int, m: Int) -> Int {
    modulo(modulo(a, m).checked_mul(modulo(b, m)).expect("mul_mod overflow"), m)
}

pub fn mod_inverse(a: Int, m: Int) -> Option<Int> {
    let (g, s, _) = xgcd(modulo(a, m), m);
    (g == 1).then(|| modulo(s, m))
}

/// Prime factorization by trial division, primes ascending with multiplicity.
pub fn factorize(n: Int) -> Vec<(Int, u32)> {
    let mut n = n.abs();
    let mut out = Vec::new();
    if n < 2 {
        return out;
    }
    let mut push = |p: Int, n: &mut Int| {
        let mut e = 0;
        while *n % p == 0 {
            *n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
    };
    push(2, &mut n);
    push(3, &mut n);
    let mut p: Int = 5;
    while p * p <= n {
        push(p, &mut n);
        push(p + 2, &mut n);
        p += 6;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn prime_divisors(n: Int) -> Vec<Int> {
    factorize(n).into_iter().map(|(p, _)| p).collect()
}

/// All positive divisors, ascending.
pub fn divisors(n: Int) -> Vec<Int> {
    divisors_from_factorization(&factorize(n))
}

pub fn divisors_from_factorization(factors: &[(Int, u32)]) -> Vec<Int> {
    let mut out = vec![1];
    for &(p, e) in factors {
        let len = out.len();
        let mut pk = 1;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                out.push(out[i] * pk);
            }
        }
    }
    out.sort_unstable();
    out
}

/// Units of `Z/m`, ascending. For `m = 1` this is `[0]`.
pub fn units(m: Int) -> Vec<Int> {
    if m == 1 {
        return vec![0];
    }
    (1..m).filter(|&u| gcd(u, m) == 1).collect()
}

/// Chinese remainder for pairwise coprime moduli; returns the solution in `[0, prod)`.
pub fn crt(residues: &[(Int, Int)]) -> Int {
    let (mut x, mut m) = (0, 1);
    for &(r, n) in residues {
        let (_, s, _) = xgcd(m, n);
        // x + m*s*(r - x) solves both congruences.
        let step = mul_mod(s, r - x, n);
        x += m * step;
        m *= n;
        x = modulo(x, m);
    }
    x
}

/// Lexicographic comparison of integer sequences.
pub fn lex_less(a: &[Int], b: &[Int]) -> bool {
    a.cmp(b) == std::cmp::Ordering::Less
}
