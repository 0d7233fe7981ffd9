//! Smooth numbers: `Ψ(x; y)`, `Ψ_q(x; y)` and greedy splitting of a smooth
//! integer into parts of bounded size.

use serde::Serialize;

use crate::arith::{euler_phi, factorize, floor_pow, gcd};
use crate::error::{Error, Result};

pub const MAX_SMOOTH_TABLE: u64 = 1 << 24;

/// Largest-prime-factor table over `1..=x_max`, with `lpf(1) = 1`.
#[derive(Debug, Clone)]
pub struct SmoothTable {
    lpf: Vec<u32>,
}

impl SmoothTable {
    pub fn new(x_max: u64) -> Result<Self> {
        if x_max < 1 {
            return Err(Error::domain("x_max must be at least 1"));
        }
        if x_max > MAX_SMOOTH_TABLE {
            return Err(Error::ResourceCap {
                what: "smooth table size",
                value: x_max,
                cap: MAX_SMOOTH_TABLE,
            });
        }
        let n = x_max as usize;
        let mut lpf = vec![0u32; n + 1];
        lpf[1] = 1;
        for p in 2..=n {
            if lpf[p] == 0 {
                // ascending p, so the last write is the largest prime factor
                for k in (p..=n).step_by(p) {
                    lpf[k] = p as u32;
                }
            }
        }
        Ok(SmoothTable { lpf })
    }

    pub fn x_max(&self) -> u64 {
        (self.lpf.len() - 1) as u64
    }

    pub fn largest_prime_factor(&self, n: u64) -> Option<u64> {
        if n == 0 {
            return None;
        }
        self.lpf.get(n as usize).map(|&v| v as u64)
    }

    fn covers(&self, x: u64) -> Result<()> {
        if x > self.x_max() {
            return Err(Error::domain(format!(
                "x = {x} is beyond the table (x_max = {})",
                self.x_max()
            )));
        }
        Ok(())
    }

    /// `Ψ(x; y)`: integers `1 ≤ n ≤ x` whose prime factors are all `≤ y`.
    /// A real bound `y` behaves as `⌊y⌋`.
    pub fn psi(&self, x: u64, y: u64) -> Result<u64> {
        self.covers(x)?;
        Ok((1..=x as usize)
            .filter(|&n| n == 1 || self.lpf[n] as u64 <= y)
            .count() as u64)
    }

    /// `Ψ_q(x; y)`: as [`psi`](Self::psi), restricted to `gcd(n, q) = 1`.
    pub fn psi_q(&self, x: u64, y: u64, q: u64) -> Result<u64> {
        self.covers(x)?;
        if q == 0 {
            return Err(Error::domain("q must be positive"));
        }
        Ok((1..=x)
            .filter(|&n| (n == 1 || self.lpf[n as usize] as u64 <= y) && gcd(n, q) == 1)
            .count() as u64)
    }

    /// `Ψ_m(m; m^ε)` together with `φ(m)` and their ratio.
    pub fn smooth_unit_density(&self, m: u64, eps: f64) -> Result<SmoothDensity> {
        let y = floor_pow(m, eps);
        let count = self.psi_q(m, y, m)?;
        let phi = euler_phi(m);
        Ok(SmoothDensity {
            m,
            y,
            count,
            phi,
            ratio: count as f64 / phi as f64,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SmoothDensity {
    pub m: u64,
    /// `⌊m^ε⌋`.
    pub y: u64,
    pub count: u64,
    pub phi: u64,
    pub ratio: f64,
}

/// `x = x_1 ⋯ x_k` with `x_1 ≤ ⌊m^c⌋` and `⌊m^c⌋ ≥ x_j > m^{c/2}` for `j ≥ 2`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SmoothFactorization {
    pub x: u64,
    pub m: u64,
    pub c0: f64,
    pub c: f64,
    /// `⌊m^c⌋`.
    pub cap: u64,
    pub parts: Vec<u64>,
}

/// `⌈2/c0⌉ + 1`.
pub fn part_bound(c0: f64) -> usize {
    (2.0 / c0 - 1e-12).ceil() as usize + 1
}

impl SmoothFactorization {
    pub fn k(&self) -> usize {
        self.parts.len()
    }

    /// Rechecks the product, the size window of every part, and the part count.
    pub fn verify(&self) -> bool {
        let product = self
            .parts
            .iter()
            .try_fold(1u64, |acc, &x| acc.checked_mul(x));
        let sizes = self.parts.iter().all(|&x| x <= self.cap)
            && self.parts[1..]
                .iter()
                .all(|&x| x as u128 * x as u128 > self.cap as u128);
        product == Some(self.x) && sizes && self.k() <= part_bound(self.c0)
    }
}

/// Splits an `m^{c0}`-smooth `x ≤ m`, coprime to `m`, into parts no larger
/// than `m^c`.
///
/// Primes are taken with multiplicity in descending order; a part is filled
/// while it stays `≤ ⌊m^c⌋` and a new one is opened otherwise. Any closed part
/// then exceeds `m^{c/2}`, so at most the last part is small. Small parts (if
/// several ever occur) are merged pairwise, and the remaining small part is
/// moved to the front.
pub fn greedy_factor(x: u64, m: u64, c0: f64, c: f64) -> Result<SmoothFactorization> {
    if !(c0 > 0.0 && c0 <= c && c < 1.0) {
        return Err(Error::domain(format!(
            "need 0 < c0 <= c < 1 (c0 = {c0}, c = {c})"
        )));
    }
    if x == 0 || x > m {
        return Err(Error::domain(format!("need 1 <= x <= m (x = {x}, m = {m})")));
    }
    if gcd(x, m) != 1 {
        return Err(Error::domain(format!("gcd({x}, {m}) != 1")));
    }
    let smooth_bound = floor_pow(m, c0);
    if smooth_bound < 2 {
        return Err(Error::domain(format!(
            "m^c0 < 2 for m = {m}, c0 = {c0}: no primes available"
        )));
    }
    let cap = floor_pow(m, c);
    let mut primes: Vec<u64> = factorize(x)
        .into_iter()
        .flat_map(|(p, e)| std::iter::repeat_n(p, e as usize))
        .collect();
    if let Some(&big) = primes.last() {
        if big > smooth_bound {
            return Err(Error::domain(format!(
                "{x} is not {smooth_bound}-smooth (prime factor {big})"
            )));
        }
    }
    primes.reverse();

    let mut parts: Vec<u64> = Vec::new();
    let mut current = 1u64;
    for p in primes {
        if current * p > cap {
            parts.push(current);
            current = p;
        } else {
            current *= p;
        }
    }
    parts.push(current);

    let is_small = |v: u64| v as u128 * v as u128 <= cap as u128;
    loop {
        let small: Vec<usize> = (0..parts.len()).filter(|&i| is_small(parts[i])).collect();
        if small.len() < 2 {
            if let Some(&i) = small.first() {
                let v = parts.remove(i);
                parts.insert(0, v);
            }
            break;
        }
        let (i, j) = (small[small.len() - 2], small[small.len() - 1]);
        let merged = parts[i] * parts[j];
        parts.remove(j);
        parts[i] = merged;
    }

    Ok(SmoothFactorization {
        x,
        m,
        c0,
        c,
        cap,
        parts,
    })
}
