//! Growth of iterated product sets `A^n` in `Z_m^*`.
//!
//! `A = {x mod m : 1 ≤ x ≤ cutoff, gcd(x, m) = 1}` always contains 1, so
//! `A ⊆ A² ⊆ A³ ⊆ ⋯`. The chain stabilizes exactly when it reaches a subgroup,
//! which is then the subgroup generated by `A`. Every member of `A^n` carries a
//! witness: `n` small integers from `A` multiplying to it. A member first
//! reached at level `k` keeps its level-`k` witness, padded with trailing 1s.

use serde::Serialize;

use crate::arith::{euler_phi, floor_pow, gcd, inv_mod, is_prime, mul_mod, pow_mod, MAX_TABLE_MODULUS};
use crate::error::{Error, Result};
use crate::sets::{all_units, product_set, ResidueSet, WitnessedSet};

pub const DEFAULT_N_MAX: usize = 64;

#[derive(Debug, Clone)]
pub struct GeneratorSet {
    m: u64,
    cutoff: u64,
    c: Option<f64>,
    set: WitnessedSet,
}

impl GeneratorSet {
    /// `A` with cutoff `⌊m^c⌋`, `0 < c < 1`.
    pub fn from_exponent(m: u64, c: f64) -> Result<Self> {
        if !(c > 0.0 && c < 1.0) {
            return Err(Error::domain(format!("exponent c must lie in (0, 1) (got {c})")));
        }
        let mut g = Self::from_cutoff(m, floor_pow(m, c).max(1))?;
        g.c = Some(c);
        Ok(g)
    }

    pub fn from_cutoff(m: u64, cutoff: u64) -> Result<Self> {
        if m < 2 {
            return Err(Error::domain(format!("modulus must be >= 2 (got {m})")));
        }
        if m > MAX_TABLE_MODULUS {
            return Err(Error::ResourceCap {
                what: "modulus",
                value: m,
                cap: MAX_TABLE_MODULUS,
            });
        }
        if cutoff < 1 {
            return Err(Error::domain("cutoff must be at least 1"));
        }
        let members = (1..=cutoff.min(m - 1)).filter(|&x| gcd(x, m) == 1);
        let set = WitnessedSet::singletons(ResidueSet::from_iter(m, members));
        Ok(GeneratorSet {
            m,
            cutoff,
            c: None,
            set,
        })
    }

    pub fn modulus(&self) -> u64 {
        self.m
    }

    pub fn cutoff(&self) -> u64 {
        self.cutoff
    }

    pub fn exponent(&self) -> Option<f64> {
        self.c
    }

    pub fn set(&self) -> &ResidueSet {
        self.set.set()
    }

    pub fn len(&self) -> usize {
        self.set.set().len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_degenerate(&self) -> bool {
        self.len() == 1
    }

    /// `A^n` with witnesses of arity `n`.
    pub fn power(&self, n: usize) -> WitnessedSet {
        assert!(n >= 1);
        let mut chain = Chain::new(self.set());
        while chain.levels < n {
            chain.extend();
        }
        chain.witnessed(n)
    }
}

/// The chain `A ⊆ A² ⊆ ⋯` as a birth tree: each member records the level at
/// which it first appeared and the `(s, t)` with `s` one level lower, `t ∈ A`.
/// Witnesses are materialized once, at the requested arity.
struct Chain {
    gens: Vec<u64>,
    set: ResidueSet,
    /// Members in birth order.
    order: Vec<u64>,
    birth: Vec<u32>,
    parent: Vec<u64>,
    factor: Vec<u64>,
    levels: usize,
}

impl Chain {
    fn new(a: &ResidueSet) -> Self {
        let m = a.modulus() as usize;
        let gens: Vec<u64> = a.iter().collect();
        let mut birth = vec![0u32; m];
        let mut factor = vec![0u64; m];
        for &x in &gens {
            birth[x as usize] = 1;
            factor[x as usize] = x;
        }
        Chain {
            set: a.clone(),
            order: gens.clone(),
            gens,
            birth,
            parent: vec![0; m],
            factor,
            levels: 1,
        }
    }

    /// `A^{n+1} = A^n · A`, scanning `s ∈ A^n` then `t ∈ A` in ascending
    /// order; returns the number of new members.
    fn extend(&mut self) -> usize {
        let m = self.set.modulus();
        let level: Vec<u64> = self.set.iter().collect();
        let next = self.levels as u32 + 1;
        let before = self.order.len();
        for &s in &level {
            for &t in &self.gens {
                let r = mul_mod(s, t, m);
                if self.set.insert(r) {
                    self.birth[r as usize] = next;
                    self.parent[r as usize] = s;
                    self.factor[r as usize] = t;
                    self.order.push(r);
                }
            }
        }
        self.levels += 1;
        self.order.len() - before
    }

    /// Whether `A^n · A` has a member outside `A^n`.
    fn grows(&self) -> bool {
        let m = self.set.modulus();
        self.set
            .iter()
            .any(|s| self.gens.iter().any(|&t| !self.set.contains(mul_mod(s, t, m))))
    }

    /// Witnesses of arity `k` at least the latest birth level: a member born at level `L` from
    /// `(s, t)` copies the witness of `s`, pads with 1s to `L − 1`, puts `t`
    /// at position `L − 1`, and pads with 1s to `k`.
    fn witnessed(&self, k: usize) -> WitnessedSet {
        assert!(self.order.last().is_none_or(|&r| self.birth[r as usize] as usize <= k));
        let mut factors = vec![1u64; self.set.modulus() as usize * k];
        for &r in &self.order {
            let r = r as usize;
            let level = self.birth[r] as usize;
            if level > 1 {
                let s = self.parent[r] as usize;
                let born = self.birth[s] as usize;
                factors.copy_within(s * k..s * k + born, r * k);
            }
            factors[r * k + level - 1] = self.factor[r];
        }
        WitnessedSet::from_parts(self.set.clone(), k, factors)
    }
}

fn check_units(s: &ResidueSet, m: u64) -> Result<()> {
    if s.modulus() != m {
        return Err(Error::ModulusMismatch(m, s.modulus()));
    }
    if s.is_empty() {
        return Err(Error::domain("set must be nonempty"));
    }
    if !all_units(s) {
        return Err(Error::domain(format!("every member must be coprime to {m}")));
    }
    Ok(())
}

/// Whether `S` is closed under multiplication mod `m` (hence a subgroup of
/// `Z_m^*`, being finite).
pub fn is_subgroup(s: &ResidueSet, m: u64) -> Result<bool> {
    check_units(s, m)?;
    product_set(s, s)?.is_subset(s)
}

#[derive(Debug, Clone, Serialize)]
pub struct GrowthReport {
    pub m: u64,
    pub cutoff: u64,
    pub c: Option<f64>,
    pub card_a: usize,
    /// `|A^1|, …, |A^{n_stab}|` (or up to `n_max` when unstabilized).
    pub cards: Vec<usize>,
    /// Least `n` with `A^{n+1} = A^n`; `None` if `n_max` was reached first.
    pub n_stab: Option<usize>,
    pub is_subgroup_at_stab: bool,
    pub subgroup_order: usize,
    pub phi: u64,
    /// `(p−1)/|A^{n_stab}|`, prime moduli only.
    pub ell: Option<u64>,
    pub density: f64,
    #[serde(skip)]
    pub subgroup: WitnessedSet,
}

impl GrowthReport {
    pub fn stabilized(&self) -> bool {
        self.n_stab.is_some()
    }

    pub fn degenerate(&self) -> bool {
        self.card_a == 1
    }
}

/// Builds `A, A², …` until `A^{n+1} = A^n` or `n_max` levels exist.
pub fn power_set_sequence(g: &GeneratorSet, n_max: usize) -> Result<GrowthReport> {
    if n_max < 1 {
        return Err(Error::domain("n_max must be at least 1"));
    }
    let m = g.m;
    let mut chain = Chain::new(g.set.set());
    let mut cards = vec![chain.set.len()];
    let mut n_stab = None;
    loop {
        let n = cards.len();
        if n == n_max {
            if !chain.grows() {
                n_stab = Some(n);
            }
            break;
        }
        if chain.extend() == 0 {
            n_stab = Some(n);
            break;
        }
        cards.push(chain.set.len());
    }
    let level = chain.witnessed(cards.len());
    let is_subgroup_at_stab = n_stab.is_some() && is_subgroup(level.set(), m)?;
    let ell = if n_stab.is_some() && is_prime(m) {
        Some(power_residue_index(level.set(), m)?)
    } else {
        None
    };
    let phi = euler_phi(m);
    let order = level.set().len();
    Ok(GrowthReport {
        m,
        cutoff: g.cutoff,
        c: g.c,
        card_a: g.len(),
        cards,
        n_stab,
        is_subgroup_at_stab,
        subgroup_order: order,
        phi,
        ell,
        density: order as f64 / phi as f64,
        subgroup: level,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OlsonCheck {
    pub card_x: usize,
    pub group_order: usize,
    /// Least `h` with `X^h = ⟨X⟩`.
    pub h_actual: usize,
    /// `max{2, 2|G|/|X| − 1}`.
    pub h_bound_exact: f64,
    /// Integer part of the bound.
    pub h_bound: usize,
}

impl OlsonCheck {
    pub fn holds(&self) -> bool {
        self.h_actual <= self.h_bound.max(1)
    }
}

/// Compares the basis order of `X ∋ 1` for the subgroup it generates with the
/// bound `max{2, 2|G|/|X| − 1}`.
pub fn olson_bound_check(x: &ResidueSet, m: u64) -> Result<OlsonCheck> {
    check_units(x, m)?;
    if !x.contains(1) {
        return Err(Error::domain("X must contain 1"));
    }
    let mut level = x.clone();
    let mut h = 1;
    loop {
        let next = product_set(&level, x)?;
        if next.len() == level.len() {
            break;
        }
        level = next;
        h += 1;
    }
    let (g, nx) = (level.len(), x.len());
    let exact = (2.0 * g as f64 / nx as f64 - 1.0).max(2.0);
    let bound = (2 * g / nx).saturating_sub(1).max(2);
    Ok(OlsonCheck {
        card_x: nx,
        group_order: g,
        h_actual: h,
        h_bound_exact: exact,
        h_bound: bound,
    })
}

/// For a subgroup `S ≤ F_p^*`, the index `ℓ = (p−1)/|S|`; checks that `S` is
/// exactly the set of `ℓ`-th powers.
pub fn power_residue_index(s: &ResidueSet, p: u64) -> Result<u64> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if !is_subgroup(s, p)? {
        return Err(Error::NotSubgroup(p));
    }
    let order = s.len() as u64;
    if (p - 1) % order != 0 {
        return Err(Error::NotSubgroup(p));
    }
    let ell = (p - 1) / order;
    let powers = ResidueSet::from_iter(p, (1..p).map(|x| pow_mod(x, ell, p)));
    if &powers != s {
        return Err(Error::domain(format!(
            "subgroup of order {order} is not the set of {ell}-th powers mod {p}"
        )));
    }
    Ok(ell)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Nonresidue {
    pub t: u64,
    /// `p^{1/(4 e^{(ℓ−1)/ℓ})}`, for comparison only.
    pub vinogradov_cap: f64,
}

/// Least positive integer that is not an `ℓ`-th power mod `p`.
pub fn least_power_nonresidue(p: u64, ell: u64) -> Result<Nonresidue> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if ell < 2 || (p - 1) % ell != 0 {
        return Err(Error::domain(format!(
            "need ell >= 2 dividing p - 1 (ell = {ell}, p = {p})"
        )));
    }
    let e = (p - 1) / ell;
    let t = (1..p)
        .find(|&x| pow_mod(x, e, p) != 1)
        .expect("a nonresidue exists for ell >= 2");
    let l = ell as f64;
    let exponent = 1.0 / (4.0 * ((l - 1.0) / l).exp());
    Ok(Nonresidue {
        t,
        vinogradov_cap: (p as f64).powf(exponent),
    })
}

/// `x_1 ⋯ x_k ≡ target (mod m)` with every `x_i ≤ cutoff` coprime to `m`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Representation {
    pub modulus: u64,
    pub target: u64,
    pub cutoff: u64,
    pub factors: Vec<u64>,
    pub n_stab: usize,
    pub ell: Option<u64>,
}

impl Representation {
    pub fn k(&self) -> usize {
        self.factors.len()
    }

    pub fn verify(&self) -> bool {
        let m = self.modulus;
        let product = self.factors.iter().fold(1 % m, |acc, &f| mul_mod(acc, f, m));
        product == self.target % m
            && self
                .factors
                .iter()
                .all(|&f| f >= 1 && f <= self.cutoff && gcd(f, m) == 1)
    }
}

fn stabilized(g: &GeneratorSet, n_max: usize) -> Result<(GrowthReport, usize)> {
    let report = power_set_sequence(g, n_max)?;
    match report.n_stab {
        Some(n) => Ok((report, n)),
        None => Err(Error::Unstabilized(n_max)),
    }
}

/// A product of `2·n_stab` elements of `A` equal to 1 whose first factor is
/// the smallest `g ≠ 1` in `A`: the nontrivial factors of the witnesses of
/// `g` and `g^{-1}`, concatenated and padded with 1s.
pub fn represent_unit(g: &GeneratorSet, n_max: usize) -> Result<Representation> {
    if g.is_degenerate() {
        return Err(Error::Degenerate(g.m));
    }
    let (report, n) = stabilized(g, n_max)?;
    let m = g.m;
    let gen = g.set().iter().find(|&x| x != 1).expect("|A| > 1");
    let inverse = inv_mod(gen, m).expect("members of A are units");
    let mut factors: Vec<u64> = Vec::with_capacity(2 * n);
    for r in [gen, inverse] {
        let w = report
            .subgroup
            .witness(r)
            .expect("the stabilized chain is a group");
        factors.extend(w.iter().copied().filter(|&f| f != 1));
    }
    factors.resize(2 * n, 1);
    Ok(Representation {
        modulus: m,
        target: 1,
        cutoff: g.cutoff,
        factors,
        n_stab: n,
        ell: report.ell,
    })
}

/// A product of `n_stab` elements of `A` congruent to `target`, or
/// [`Error::NotRepresentable`] when `target` lies outside the subgroup
/// generated by `A`.
pub fn represent_target(g: &GeneratorSet, target: u64, n_max: usize) -> Result<Representation> {
    let m = g.m;
    if gcd(target % m, m) != 1 {
        return Err(Error::domain(format!("target {target} is not a unit mod {m}")));
    }
    let (report, n) = stabilized(g, n_max)?;
    let w = report
        .subgroup
        .witness(target)
        .ok_or(Error::NotRepresentable {
            target,
            modulus: m,
            ell: report.ell,
        })?;
    Ok(Representation {
        modulus: m,
        target: target % m,
        cutoff: g.cutoff,
        factors: w.to_vec(),
        n_stab: n,
        ell: report.ell,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(m: u64, xs: &[u64]) -> ResidueSet {
        ResidueSet::from_iter(m, xs.iter().copied())
    }

    #[test]
    fn generator_examples() {
        assert_eq!(GeneratorSet::from_cutoff(7, 3).unwrap().set().to_vec(), vec![1, 2, 3]);
        assert_eq!(GeneratorSet::from_cutoff(8, 3).unwrap().set().to_vec(), vec![1, 3]);
        let g = GeneratorSet::from_cutoff(210, 8).unwrap();
        assert_eq!(g.set().to_vec(), vec![1]);
        assert!(g.is_degenerate());
        let g = GeneratorSet::from_exponent(10_000, 0.5).unwrap();
        assert_eq!(g.cutoff(), 100);
        assert!(GeneratorSet::from_exponent(100, 1.0).is_err());
    }

    #[test]
    fn subgroup_examples() {
        assert_eq!(is_subgroup(&set(7, &[1]), 7), Ok(true));
        assert_eq!(is_subgroup(&set(7, &[1, 2]), 7), Ok(false));
        assert_eq!(is_subgroup(&set(7, &[1, 2, 4]), 7), Ok(true));
        assert!(is_subgroup(&set(8, &[1, 2]), 8).is_err());
    }

    #[test]
    fn growth_examples() {
        let r = power_set_sequence(&GeneratorSet::from_cutoff(7, 3).unwrap(), 64).unwrap();
        assert_eq!(r.cards, vec![3, 5, 6]);
        assert_eq!(r.n_stab, Some(3));
        assert_eq!(r.subgroup_order, 6);
        assert_eq!(r.ell, Some(1));
        assert!(r.is_subgroup_at_stab);

        let r = power_set_sequence(&GeneratorSet::from_cutoff(7, 2).unwrap(), 64).unwrap();
        assert_eq!(r.cards, vec![2, 3]);
        assert_eq!(r.n_stab, Some(2));
        assert_eq!(r.subgroup.set().to_vec(), vec![1, 2, 4]);
        assert_eq!(r.ell, Some(2));

        let r = power_set_sequence(&GeneratorSet::from_cutoff(8, 3).unwrap(), 64).unwrap();
        assert_eq!(r.n_stab, Some(1));
        assert_eq!(r.subgroup.set().to_vec(), vec![1, 3]);
        assert_eq!(r.ell, None);
        assert_eq!(r.density, 0.5);
    }

    #[test]
    fn growth_reports_unstabilized() {
        let g = GeneratorSet::from_cutoff(101, 2).unwrap();
        let r = power_set_sequence(&g, 3).unwrap();
        assert_eq!(r.n_stab, None);
        assert_eq!(r.cards.len(), 3);
        assert!(!r.is_subgroup_at_stab);
        assert_eq!(represent_unit(&g, 3), Err(Error::Unstabilized(3)));
    }

    #[test]
    fn witnesses_are_minimal_level() {
        let g = GeneratorSet::from_cutoff(7, 3).unwrap();
        let a3 = g.power(3);
        assert_eq!(a3.witness(4), Some(&[2, 2, 1][..]));
        assert_eq!(a3.witness(1), Some(&[1, 1, 1][..]));
        assert!(a3.verify());
    }

    #[test]
    fn olson_examples() {
        let c = olson_bound_check(&set(7, &[1, 2, 3]), 7).unwrap();
        assert_eq!((c.group_order, c.h_bound, c.h_actual), (6, 3, 3));
        let c = olson_bound_check(&ResidueSet::nonzero(7), 7).unwrap();
        assert_eq!((c.h_actual, c.h_bound), (1, 2));
        let c = olson_bound_check(&set(7, &[1, 2]), 7).unwrap();
        assert_eq!((c.group_order, c.h_bound, c.h_actual), (3, 2, 2));
        assert!(c.holds());
        assert!(olson_bound_check(&set(7, &[2, 3]), 7).is_err());
    }

    #[test]
    fn power_residue_examples() {
        assert_eq!(power_residue_index(&ResidueSet::nonzero(13), 13), Ok(1));
        assert_eq!(power_residue_index(&set(7, &[1, 2, 4]), 7), Ok(2));
        assert_eq!(power_residue_index(&set(7, &[1]), 7), Ok(6));
        assert_eq!(
            power_residue_index(&set(7, &[1, 2]), 7),
            Err(Error::NotSubgroup(7))
        );
    }

    #[test]
    fn nonresidue_examples() {
        assert_eq!(least_power_nonresidue(7, 2).unwrap().t, 3);
        assert_eq!(least_power_nonresidue(5, 2).unwrap().t, 2);
        assert_eq!(least_power_nonresidue(7, 3).unwrap().t, 2);
        assert!(least_power_nonresidue(7, 1).is_err());
        assert!(least_power_nonresidue(7, 4).is_err());
        let cap = least_power_nonresidue(7, 2).unwrap().vinogradov_cap;
        assert!((cap - 7f64.powf(1.0 / (4.0 * 0.5f64.exp()))).abs() < 1e-12);
    }

    #[test]
    fn unit_representation_examples() {
        let r = represent_unit(&GeneratorSet::from_cutoff(7, 2).unwrap(), 64).unwrap();
        assert_eq!(r.factors, vec![2, 2, 2, 1]);
        assert!(r.verify());
        let r = represent_unit(&GeneratorSet::from_cutoff(8, 3).unwrap(), 64).unwrap();
        assert_eq!(r.factors, vec![3, 3]);
        assert!(r.verify());
        let r = represent_unit(&GeneratorSet::from_cutoff(5, 2).unwrap(), 64).unwrap();
        assert_eq!(r.n_stab, 3);
        assert_eq!(r.factors, vec![2, 2, 2, 2, 1, 1]);
        assert!(r.verify());
        assert_eq!(
            represent_unit(&GeneratorSet::from_cutoff(210, 8).unwrap(), 64),
            Err(Error::Degenerate(210))
        );
    }

    #[test]
    fn target_representation_examples() {
        let g = GeneratorSet::from_cutoff(7, 3).unwrap();
        let r = represent_target(&g, 4, 64).unwrap();
        assert_eq!(r.factors, vec![2, 2, 1]);
        assert!(r.verify());
        let r = represent_target(&g, 1, 64).unwrap();
        assert_eq!(r.factors, vec![1, 1, 1]);

        let g = GeneratorSet::from_cutoff(7, 2).unwrap();
        assert_eq!(
            represent_target(&g, 3, 64),
            Err(Error::NotRepresentable {
                target: 3,
                modulus: 7,
                ell: Some(2)
            })
        );
        assert!(represent_target(&g, 7, 64).is_err());
    }
}
