//! Multiplicative characters modulo a prime and multiplicative energy.
//!
//! Characters are indexed by `j ∈ {0, …, p−2}` through the discrete-log table:
//! `χ_j(x) = exp(2πi · j · ind(x) / (p−1))`, `χ_j(0) = 0`. The energy
//!
//! ```text
//! J(X, Y) = #{ (x1, y1, x2, y2) : x1 y1 ≡ x2 y2 }
//! ```
//!
//! is counted exactly from the product multiplicity histogram, and separately
//! evaluated through `J = (1/(p−1)) Σ_χ |Σ_X χ|² |Σ_Y χ|²` as a cross-check.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::Serialize;

use crate::arith::{is_prime, mul_mod, FieldContext};
use crate::error::{Error, Result};
use crate::sets::{product_set, ResidueSet};

/// Discrete-log table plus the `(p−1)`-th roots of unity.
#[derive(Debug, Clone)]
pub struct CharTable {
    ctx: FieldContext,
    roots: Vec<Complex64>,
}

impl CharTable {
    pub fn new(p: u64) -> Result<Self> {
        Ok(Self::from_context(FieldContext::new(p)?))
    }

    pub fn from_context(ctx: FieldContext) -> Self {
        let n = ctx.order();
        let roots = (0..n)
            .map(|k| Complex64::from_polar(1.0, TAU * k as f64 / n as f64))
            .collect();
        CharTable { ctx, roots }
    }

    pub fn context(&self) -> &FieldContext {
        &self.ctx
    }

    pub fn p(&self) -> u64 {
        self.ctx.p()
    }

    /// Number of characters, `p − 1`.
    pub fn count(&self) -> u64 {
        self.ctx.order()
    }

    /// `χ_j(x)`.
    pub fn chi(&self, j: u64, x: u64) -> Complex64 {
        match self.ctx.dlog(x) {
            None => Complex64::new(0.0, 0.0),
            Some(l) => self.roots[((j as u128 * l as u128) % self.count() as u128) as usize],
        }
    }

    fn logs(&self, items: impl IntoIterator<Item = u64>) -> Result<Vec<u64>> {
        items
            .into_iter()
            .map(|x| {
                self.ctx
                    .dlog(x)
                    .ok_or(Error::ContainsZero("character sums range over units"))
            })
            .collect()
    }

    /// `Σ_{s∈S} χ_j(s)`.
    pub fn char_sum(&self, j: u64, items: impl IntoIterator<Item = u64>) -> Result<Complex64> {
        let n = self.count();
        let j = j % n;
        Ok(self
            .logs(items)?
            .into_iter()
            .map(|l| self.roots[((j * l) % n) as usize])
            .sum())
    }

    /// `Σ_{s∈S} χ_j(s)` for every `j`, indexed by `j`.
    pub fn all_char_sums(&self, items: impl IntoIterator<Item = u64>) -> Result<Vec<Complex64>> {
        let n = self.count();
        let logs = self.logs(items)?;
        Ok((0..n)
            .map(|j| logs.iter().map(|&l| self.roots[((j * l) % n) as usize]).sum())
            .collect())
    }
}

fn check_units(s: &ResidueSet, p: u64) -> Result<()> {
    if s.modulus() != p {
        return Err(Error::ModulusMismatch(p, s.modulus()));
    }
    if s.contains(0) {
        return Err(Error::ContainsZero("energy sets must lie in F_p^*"));
    }
    Ok(())
}

/// Exact `J(X, Y)`: the sum of squared multiplicities of the products `xy`.
pub fn count_products_j(x: &ResidueSet, y: &ResidueSet, p: u64) -> Result<u128> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    check_units(x, p)?;
    check_units(y, p)?;
    let mut hist = vec![0u64; p as usize];
    let ys: Vec<u64> = y.iter().collect();
    for a in x.iter() {
        for &b in &ys {
            hist[mul_mod(a, b, p) as usize] += 1;
        }
    }
    Ok(hist.iter().map(|&c| c as u128 * c as u128).sum())
}

/// `J(X, Y)` through the character identity, in double precision.
pub fn j_via_characters(table: &CharTable, x: &ResidueSet, y: &ResidueSet) -> Result<f64> {
    let p = table.p();
    check_units(x, p)?;
    check_units(y, p)?;
    let sx = table.all_char_sums(x.iter())?;
    let sy = table.all_char_sums(y.iter())?;
    let total: f64 = sx
        .iter()
        .zip(&sy)
        .map(|(a, b)| a.norm_sqr() * b.norm_sqr())
        .sum();
    Ok(total / table.count() as f64)
}

/// Number of `2n₀`-tuples in `{1,…,N}` with `y_1⋯y_{n₀} ≡ y_{n₀+1}⋯y_{2n₀} (mod p)`.
///
/// Builds the multiplicity histogram of `n₀`-fold products residue by residue
/// and sums its squares. Fails when `N^{2n₀}` does not fit in 128 bits.
pub fn multiplicative_energy_2n(n: u64, n0: u32, p: u64) -> Result<u128> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if n == 0 || n >= p {
        return Err(Error::domain(format!("need 1 <= N < p (N = {n}, p = {p})")));
    }
    if n0 == 0 {
        return Err(Error::domain("n0 must be at least 1"));
    }
    if (n as u128).checked_pow(2 * n0).is_none() {
        return Err(Error::ResourceCap {
            what: "N^(2 n0) bit budget",
            value: 2 * n0 as u64,
            cap: 128,
        });
    }
    let mut hist = vec![0u128; p as usize];
    for y in 1..=n {
        hist[y as usize] = 1;
    }
    for _ in 1..n0 {
        let mut next = vec![0u128; p as usize];
        for (r, &c) in hist.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for y in 1..=n {
                next[mul_mod(r as u64, y, p) as usize] += c;
            }
        }
        hist = next;
    }
    Ok(hist.iter().map(|&c| c * c).sum())
}

/// Both sides of `|XY| ≥ |X|²|Y|² / J`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProductBound {
    /// `|XY|`.
    pub lhs: u64,
    /// `|X|²|Y|²`.
    pub numerator: u128,
    /// `J(X, Y)`.
    pub energy: u128,
}

impl ProductBound {
    pub fn rhs(&self) -> f64 {
        self.numerator as f64 / self.energy as f64
    }

    /// Exact check `|XY| · J ≥ |X|²|Y|²`.
    pub fn holds(&self) -> bool {
        self.lhs as u128 * self.energy >= self.numerator
    }
}

pub fn product_bound_check(x: &ResidueSet, y: &ResidueSet, p: u64) -> Result<ProductBound> {
    let energy = count_products_j(x, y, p)?;
    let lhs = product_set(x, y)?.len() as u64;
    let (nx, ny) = (x.len() as u128, y.len() as u128);
    Ok(ProductBound {
        lhs,
        numerator: nx * nx * ny * ny,
        energy,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProductGrowthDelta {
    /// `(p/|X|)^{1/n₀}`.
    pub field_branch: f64,
    /// `N/|X|^{1/n₀}`.
    pub length_branch: f64,
    pub delta: f64,
}

/// `min{(p/|X|)^{1/n₀}, N/|X|^{1/n₀}}`, the predicted growth factor of `|X·{1..N}|`
/// over `|X|` with the `N^{o(1)}` loss dropped. Diagnostic only.
pub fn product_growth_delta(p: u64, card_x: u64, n: u64, n0: u32) -> ProductGrowthDelta {
    let e = 1.0 / n0 as f64;
    let field_branch = (p as f64 / card_x as f64).powf(e);
    let length_branch = n as f64 / (card_x as f64).powf(e);
    ProductGrowthDelta {
        field_branch,
        length_branch,
        delta: field_branch.min(length_branch),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BurgessProfile {
    pub max_ratio: f64,
    /// Smallest nonprincipal index attaining the maximum; `None` when `p = 2`.
    pub argmax: Option<u64>,
}

/// `max_{χ ≠ χ_0} |Σ_{n ≤ len} χ(n)| / len` over the initial interval `{1, …, len}`.
pub fn burgess_profile(table: &CharTable, len: u64) -> Result<BurgessProfile> {
    let p = table.p();
    if len == 0 || len >= p {
        return Err(Error::domain(format!(
            "interval length must satisfy 1 <= len < p (len = {len}, p = {p})"
        )));
    }
    let sums = table.all_char_sums(1..=len)?;
    let mut best = BurgessProfile {
        max_ratio: 0.0,
        argmax: None,
    };
    for (j, s) in sums.iter().enumerate().skip(1) {
        let ratio = s.norm() / len as f64;
        if best.argmax.is_none() || ratio > best.max_ratio + 1e-12 {
            best = BurgessProfile {
                max_ratio: ratio,
                argmax: Some(j as u64),
            };
        }
    }
    Ok(best)
}

/// One row of the energy experiment: `X` against `Y = {1, …, N}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyDiagnostic {
    pub p: u64,
    pub card_x: u64,
    pub n: u64,
    pub j_direct: u128,
    pub j_char: f64,
    pub n0: u32,
    pub bound: ProductBound,
    pub delta: ProductGrowthDelta,
}

pub fn energy_diagnostic(
    table: &CharTable,
    x: &ResidueSet,
    n: u64,
    n0: u32,
) -> Result<EnergyDiagnostic> {
    let p = table.p();
    if n == 0 || n >= p {
        return Err(Error::domain("need 1 <= N < p"));
    }
    let y = ResidueSet::from_iter(p, 1..=n);
    let bound = product_bound_check(x, &y, p)?;
    Ok(EnergyDiagnostic {
        p,
        card_x: x.len() as u64,
        n,
        j_direct: bound.energy,
        j_char: j_via_characters(table, x, &y)?,
        n0,
        delta: product_growth_delta(p, x.len() as u64, n, n0),
        bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(p: u64, xs: &[u64]) -> ResidueSet {
        ResidueSet::from_iter(p, xs.iter().copied())
    }

    fn brute_j(x: &[u64], y: &[u64], p: u64) -> u128 {
        let mut n = 0;
        for &x1 in x {
            for &y1 in y {
                for &x2 in x {
                    for &y2 in y {
                        if x1 * y1 % p == x2 * y2 % p {
                            n += 1;
                        }
                    }
                }
            }
        }
        n
    }

    fn brute_energy(n: u64, n0: u32, p: u64) -> u128 {
        let k = 2 * n0 as usize;
        let mut count = 0;
        let mut tuple = vec![1u64; k];
        loop {
            let l = tuple[..n0 as usize].iter().fold(1, |a, &y| a * y % p);
            let r = tuple[n0 as usize..].iter().fold(1, |a, &y| a * y % p);
            if l == r {
                count += 1;
            }
            let mut i = 0;
            while i < k && tuple[i] == n {
                tuple[i] = 1;
                i += 1;
            }
            if i == k {
                return count;
            }
            tuple[i] += 1;
        }
    }

    #[test]
    fn char_sum_examples() {
        let t = CharTable::new(5).unwrap();
        let s = t.char_sum(0, [1, 3, 4]).unwrap();
        assert!((s - Complex64::new(3.0, 0.0)).norm() < 1e-12);

        assert_eq!(t.context().dlog(2), Some(1));
        let s = t.char_sum(1, [1, 2]).unwrap();
        assert!((s - Complex64::new(1.0, 1.0)).norm() < 1e-12);
        assert!((s.norm() - 2f64.sqrt()).abs() < 1e-12);

        for j in 1..4 {
            assert!(t.char_sum(j, 1..5).unwrap().norm() < 1e-12);
        }
        assert!(t.char_sum(1, [0, 1]).is_err());
    }

    #[test]
    fn characters_are_multiplicative_and_orthogonal() {
        for p in [3u64, 5, 7, 31, 101, 499] {
            let t = CharTable::new(p).unwrap();
            for j in 0..t.count() {
                for x in 1..p.min(40) {
                    for y in 1..p.min(40) {
                        let lhs = t.chi(j, x * y % p);
                        assert!((lhs - t.chi(j, x) * t.chi(j, y)).norm() < 1e-9);
                    }
                }
            }
            for u in 1..p {
                let avg: Complex64 =
                    (0..t.count()).map(|j| t.chi(j, u)).sum::<Complex64>() / t.count() as f64;
                let expect = if u == 1 { 1.0 } else { 0.0 };
                assert!((avg - Complex64::new(expect, 0.0)).norm() < 1e-9, "p={p} u={u}");
            }
        }
    }

    #[test]
    fn energy_examples() {
        let s = set(11, &[1, 2]);
        assert_eq!(brute_j(&[1, 2], &[1, 2], 11), 6);
        assert_eq!(count_products_j(&s, &s, 11), Ok(6));
        let one = set(7, &[1]);
        assert_eq!(count_products_j(&one, &one, 7), Ok(1));
        let f5 = ResidueSet::nonzero(5);
        assert_eq!(brute_j(&[1, 2, 3, 4], &[1, 2, 3, 4], 5), 64);
        assert_eq!(count_products_j(&f5, &f5, 5), Ok(64));
        assert!(count_products_j(&set(5, &[0]), &f5, 5).is_err());
    }

    #[test]
    fn character_identity_examples() {
        let t7 = CharTable::new(7).unwrap();
        let one = set(7, &[1]);
        assert!((j_via_characters(&t7, &one, &one).unwrap() - 1.0).abs() < 1e-9);

        let t11 = CharTable::new(11).unwrap();
        let s = set(11, &[1, 2]);
        assert!((j_via_characters(&t11, &s, &s).unwrap() - 6.0).abs() < 1e-6);

        let t5 = CharTable::new(5).unwrap();
        let f5 = ResidueSet::nonzero(5);
        assert!((j_via_characters(&t5, &f5, &f5).unwrap() - 64.0).abs() < 1e-6);
    }

    #[test]
    fn energy_2n_examples() {
        assert_eq!(multiplicative_energy_2n(1, 3, 101), Ok(1));
        assert_eq!(multiplicative_energy_2n(2, 1, 101), Ok(2));
        assert_eq!(brute_energy(2, 2, 101), 6);
        assert_eq!(multiplicative_energy_2n(2, 2, 101), Ok(6));
        assert!(multiplicative_energy_2n(5, 1, 5).is_err());
    }

    #[test]
    fn energy_2n_matches_enumeration() {
        for p in [5u64, 7, 11, 13, 17] {
            for n in 1..p.min(7) {
                for n0 in 1..=3 {
                    assert_eq!(
                        multiplicative_energy_2n(n, n0, p).unwrap(),
                        brute_energy(n, n0, p),
                        "p={p} N={n} n0={n0}"
                    );
                }
            }
        }
    }

    #[test]
    fn energy_2n_base_case_is_diagonal() {
        for p in [11u64, 101] {
            for n in 1..10 {
                assert_eq!(multiplicative_energy_2n(n, 1, p).unwrap(), n as u128);
                let y = ResidueSet::from_iter(p, 1..=n);
                let one = set(p, &[1]);
                assert_eq!(count_products_j(&y, &one, p).unwrap(), n as u128);
            }
        }
    }

    #[test]
    fn product_bound_examples() {
        let s = set(11, &[1, 2]);
        let b = product_bound_check(&s, &s, 11).unwrap();
        assert_eq!((b.lhs, b.numerator, b.energy), (3, 16, 6));
        assert!((b.rhs() - 16.0 / 6.0).abs() < 1e-12);
        assert!(b.holds());

        let one = set(11, &[1]);
        let b = product_bound_check(&one, &one, 11).unwrap();
        assert_eq!((b.lhs, b.rhs()), (1, 1.0));

        let f5 = ResidueSet::nonzero(5);
        let b = product_bound_check(&f5, &f5, 5).unwrap();
        assert_eq!((b.lhs, b.rhs()), (4, 4.0));
        assert!(b.holds());
    }

    #[test]
    fn product_growth_delta_examples() {
        assert_eq!(product_growth_delta(50, 50, 7, 3).field_branch, 1.0);
        let d = product_growth_delta(16, 1, 1, 2);
        assert_eq!((d.field_branch, d.length_branch, d.delta), (4.0, 1.0, 1.0));
        let d = product_growth_delta(101, 8, 10, 3);
        let first = (101.0f64 / 8.0).cbrt();
        assert!((first - 2.3285).abs() < 1e-4);
        assert!((d.length_branch - 5.0).abs() < 1e-12);
        assert!((d.delta - first).abs() < 1e-12);
    }

    #[test]
    fn burgess_examples() {
        let t5 = CharTable::new(5).unwrap();
        let b = burgess_profile(&t5, 2).unwrap();
        assert!((b.max_ratio - 0.5f64.sqrt()).abs() < 1e-12);
        assert_eq!(b.argmax, Some(1));
        // j = 3 ties with j = 1
        let s3 = t5.char_sum(3, [1, 2]).unwrap();
        assert!((s3.norm() / 2.0 - b.max_ratio).abs() < 1e-12);

        let t3 = CharTable::new(3).unwrap();
        let b = burgess_profile(&t3, 2).unwrap();
        assert!(b.max_ratio.abs() < 1e-12);

        let t13 = CharTable::new(13).unwrap();
        assert!(burgess_profile(&t13, 12).unwrap().max_ratio < 1e-12);
        assert!(burgess_profile(&t13, 13).is_err());

        let t2 = CharTable::new(2).unwrap();
        assert_eq!(burgess_profile(&t2, 1).unwrap().argmax, None);
    }
}
