//! Exact integer and residue arithmetic.
//!
//! Everything here works on `u64` with `u128` intermediates. Factorization is
//! trial division over a 2·3·5 wheel followed by Brent's variant of Pollard
//! rho, with a deterministic Miller–Rabin test for 64-bit inputs.

use serde::Serialize;

use crate::error::{Error, Result};

/// Largest modulus for which dense tables (discrete logs, residue sets,
/// smooth-number sieves) are built.
pub const MAX_TABLE_MODULUS: u64 = 1 << 22;

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` modulo `m`, if `gcd(a, m) = 1`.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let (mut old_r, mut r) = (a as i128 % m as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return if m == 1 { Some(0) } else { None };
    }
    Some(old_s.rem_euclid(m as i128) as u64)
}

/// Deterministic Miller–Rabin for all 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &p in &BASES {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

const TRIAL_BOUND: u64 = 1 << 12;
const WHEEL: [u64; 8] = [4, 2, 4, 2, 4, 6, 2, 6];

fn pollard_brent(n: u64) -> u64 {
    if n % 2 == 0 {
        return 2;
    }
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut q, mut g) = (2u64, 2u64, 1u64, 1u64);
        let mut r = 1u64;
        let m = 128u64;
        let mut ys = 0;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..m.min(r - k) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = gcd(q, n);
                k += m;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = gcd(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
        c += 1;
    }
}

fn collect_large_factors(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        out.push(n);
        return;
    }
    let d = pollard_brent(n);
    collect_large_factors(d, out);
    collect_large_factors(n / d, out);
}

/// Prime factorization of `n ≥ 1` as `(prime, exponent)` pairs with strictly
/// increasing primes. `factorize(1)` is empty.
pub fn factorize(n: u64) -> Vec<(u64, u32)> {
    assert!(n >= 1, "factorize requires n >= 1");
    let mut rest = n;
    let mut out: Vec<(u64, u32)> = Vec::new();
    let mut strip = |rest: &mut u64, p: u64| {
        if *rest % p == 0 {
            let mut e = 0;
            while *rest % p == 0 {
                *rest /= p;
                e += 1;
            }
            out.push((p, e));
        }
    };
    for p in [2, 3, 5] {
        strip(&mut rest, p);
    }
    let mut d = 7u64;
    let mut i = 0;
    while d <= TRIAL_BOUND && d * d <= rest {
        strip(&mut rest, d);
        d += WHEEL[i];
        i = (i + 1) % WHEEL.len();
    }
    if rest > 1 {
        if d * d > rest {
            out.push((rest, 1));
        } else {
            let mut large = Vec::new();
            collect_large_factors(rest, &mut large);
            large.sort_unstable();
            for p in large {
                match out.last_mut() {
                    Some((q, e)) if *q == p => *e += 1,
                    _ => out.push((p, 1)),
                }
            }
        }
    }
    out
}

pub fn euler_phi(n: u64) -> u64 {
    factorize(n)
        .into_iter()
        .fold(n, |acc, (p, _)| acc / p * (p - 1))
}

/// Smallest primitive root of the prime `p`. For `p = 2` this is 1.
pub fn primitive_root(p: u64) -> Result<u64> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if p == 2 {
        return Ok(1);
    }
    let order = p - 1;
    let primes: Vec<u64> = factorize(order).into_iter().map(|(q, _)| q).collect();
    (2..p)
        .find(|&g| primes.iter().all(|&q| pow_mod(g, order / q, p) != 1))
        .ok_or_else(|| Error::domain(format!("no primitive root modulo {p}")))
}

/// `⌊m^c⌋` for real `c ≥ 0`.
///
/// The power is taken in floating point. When `1/c` is an integer `d` the
/// result is the exact integer `d`-th root; otherwise values within a relative
/// `1e-9` of an integer are snapped to it before flooring.
pub fn floor_pow(m: u64, c: f64) -> u64 {
    assert!(c >= 0.0 && c.is_finite(), "exponent must be finite and >= 0");
    if c == 0.0 || m <= 1 {
        return if m == 0 && c > 0.0 { 0 } else { 1 };
    }
    let inv = 1.0 / c;
    if (inv - inv.round()).abs() < 1e-9 && inv.round() >= 1.0 {
        return integer_root(m, inv.round() as u32);
    }
    let v = (m as f64).powf(c);
    let r = v.round();
    if (v - r).abs() <= 1e-9 * v.max(1.0) {
        r as u64
    } else {
        v.floor() as u64
    }
}

/// Largest `r` with `r^d ≤ n`.
pub fn integer_root(n: u64, d: u32) -> u64 {
    if d == 1 || n <= 1 {
        return n;
    }
    let fits = |r: u64| -> bool {
        let mut acc: u128 = 1;
        for _ in 0..d {
            acc *= r as u128;
            if acc > n as u128 {
                return false;
            }
        }
        true
    };
    let mut r = (n as f64).powf(1.0 / d as f64).round() as u64;
    while r > 0 && !fits(r) {
        r -= 1;
    }
    while fits(r + 1) {
        r += 1;
    }
    r
}

/// A modulus `m ≥ 2` together with its factorization.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Modulus {
    m: u64,
    factorization: Vec<(u64, u32)>,
}

impl Modulus {
    pub fn new(m: u64) -> Result<Self> {
        if m < 2 {
            return Err(Error::domain(format!("modulus must be >= 2 (got {m})")));
        }
        Ok(Modulus {
            m,
            factorization: factorize(m),
        })
    }

    pub fn value(&self) -> u64 {
        self.m
    }

    pub fn factorization(&self) -> &[(u64, u32)] {
        &self.factorization
    }

    pub fn is_prime(&self) -> bool {
        matches!(self.factorization.as_slice(), [(_, 1)])
    }

    pub fn phi(&self) -> u64 {
        self.factorization
            .iter()
            .fold(self.m, |acc, &(p, _)| acc / p * (p - 1))
    }
}

/// A prime field with its smallest primitive root and a dense discrete-log
/// table.
#[derive(Debug, Clone)]
pub struct FieldContext {
    p: u64,
    g: u64,
    dlog: Vec<u32>,
    powers: Vec<u32>,
}

impl FieldContext {
    pub fn new(p: u64) -> Result<Self> {
        Self::with_cap(p, MAX_TABLE_MODULUS)
    }

    pub fn with_cap(p: u64, cap: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if p > cap {
            return Err(Error::ResourceCap {
                what: "field modulus",
                value: p,
                cap,
            });
        }
        let g = primitive_root(p)?;
        let order = (p - 1) as usize;
        let mut dlog = vec![u32::MAX; p as usize];
        let mut powers = Vec::with_capacity(order);
        let mut x = 1u64;
        for k in 0..order {
            dlog[x as usize] = k as u32;
            powers.push(x as u32);
            x = x * g % p;
        }
        Ok(FieldContext { p, g, dlog, powers })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn generator(&self) -> u64 {
        self.g
    }

    /// Order of the unit group, `p − 1`.
    pub fn order(&self) -> u64 {
        self.p - 1
    }

    /// Index of `x` base `g`; `None` for `x ≡ 0`.
    #[inline]
    pub fn dlog(&self, x: u64) -> Option<u64> {
        match self.dlog[(x % self.p) as usize] {
            u32::MAX => None,
            k => Some(k as u64),
        }
    }

    /// `g^k mod p`.
    #[inline]
    pub fn exp(&self, k: u64) -> u64 {
        self.powers[(k % self.order()) as usize] as u64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_phi(n: u64) -> u64 {
        (1..=n).filter(|&x| gcd(x, n) == 1).count() as u64
    }

    fn brute_is_prime(n: u64) -> bool {
        n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0)
    }

    fn brute_order(g: u64, p: u64) -> u64 {
        let mut x = g % p;
        let mut k = 1;
        while x != 1 {
            x = x * g % p;
            k += 1;
        }
        k
    }

    #[test]
    fn factorize_examples() {
        assert_eq!(factorize(1), vec![]);
        assert_eq!(factorize(12), vec![(2, 2), (3, 1)]);
        assert!(brute_is_prime(97));
        assert_eq!(factorize(97), vec![(97, 1)]);
    }

    #[test]
    fn factorize_beyond_trial_bound() {
        // two primes above the wheel bound
        let (p, q) = (1_000_003u64, 999_983u64);
        assert_eq!(factorize(p * q), vec![(q, 1), (p, 1)]);
        assert_eq!(factorize(p * p), vec![(p, 2)]);
        let big = 18_446_744_073_709_551_557u64; // largest 64-bit prime
        assert_eq!(factorize(big), vec![(big, 1)]);
    }

    #[test]
    fn phi_examples() {
        assert_eq!(euler_phi(1), 1);
        assert_eq!(euler_phi(12), 4);
        assert_eq!(euler_phi(97), 96);
    }

    #[test]
    fn phi_matches_coprime_count() {
        for n in 1..=10_000u64 {
            assert_eq!(euler_phi(n), brute_phi(n), "n = {n}");
        }
    }

    #[test]
    fn miller_rabin_matches_trial_division() {
        for n in 0..20_000u64 {
            assert_eq!(is_prime(n), brute_is_prime(n), "n = {n}");
        }
    }

    #[test]
    fn primitive_root_examples() {
        assert_eq!(primitive_root(2), Ok(1));
        assert_eq!(brute_order(2, 7), 3);
        assert_eq!(brute_order(3, 7), 6);
        assert_eq!(primitive_root(7), Ok(3));
        assert_eq!(brute_order(2, 11), 10);
        assert_eq!(primitive_root(11), Ok(2));
        assert_eq!(primitive_root(12), Err(Error::NotPrime(12)));
    }

    #[test]
    fn primitive_root_is_smallest() {
        for p in (3..2000).filter(|&p| brute_is_prime(p)) {
            let g = primitive_root(p).unwrap();
            assert_eq!(brute_order(g, p), p - 1);
            assert!((2..g).all(|h| brute_order(h, p) < p - 1));
        }
    }

    #[test]
    fn field_context_examples() {
        let f5 = FieldContext::new(5).unwrap();
        assert_eq!(f5.generator(), 2);
        let logs: Vec<_> = [1, 2, 4, 3].iter().map(|&x| f5.dlog(x).unwrap()).collect();
        assert_eq!(logs, vec![0, 1, 2, 3]);
        assert_eq!(f5.dlog(0), None);

        let f2 = FieldContext::new(2).unwrap();
        assert_eq!(f2.dlog(1), Some(0));

        let f7 = FieldContext::new(7).unwrap();
        assert_eq!(f7.generator(), 3);
        assert_eq!(f7.dlog(6), Some(3));
    }

    #[test]
    fn field_context_rejects() {
        assert_eq!(FieldContext::new(9).unwrap_err(), Error::NotPrime(9));
        assert!(matches!(
            FieldContext::with_cap(101, 100),
            Err(Error::ResourceCap { .. })
        ));
    }

    #[test]
    fn dlog_is_a_homomorphism() {
        for p in [2u64, 3, 5, 7, 11, 13, 101, 257] {
            let f = FieldContext::new(p).unwrap();
            let mut seen = vec![false; (p - 1) as usize];
            for x in 1..p {
                let lx = f.dlog(x).unwrap();
                assert_eq!(pow_mod(f.generator(), lx, p), x);
                assert!(!seen[lx as usize]);
                seen[lx as usize] = true;
                for y in 1..p {
                    let lxy = f.dlog(x * y % p).unwrap();
                    assert_eq!(lxy, (lx + f.dlog(y).unwrap()) % (p - 1));
                }
            }
        }
    }

    #[test]
    fn inverse_and_roots() {
        assert_eq!(inv_mod(3, 7), Some(5));
        assert_eq!(inv_mod(2, 8), None);
        assert_eq!(floor_pow(10_000, 0.5), 100);
        assert_eq!(floor_pow(99, 0.5), 9);
        assert_eq!(floor_pow(1000, 1.0 / 3.0), 10);
        assert_eq!(floor_pow(1024, 0.3), 8); // 1024^0.3 = 2^3
        assert_eq!(integer_root(80, 4), 2);
        assert_eq!(integer_root(81, 4), 3);
    }

    #[test]
    fn modulus_invariants() {
        let m = Modulus::new(360).unwrap();
        let back: u64 = m
            .factorization()
            .iter()
            .map(|&(p, e)| p.pow(e))
            .product();
        assert_eq!(back, 360);
        assert!(!m.is_prime());
        assert!(Modulus::new(13).unwrap().is_prime());
        assert_eq!(m.phi(), 96);
        assert!(Modulus::new(1).is_err());
    }
}
