//! Intervals and dense residue sets over `Z_m`.
//!
//! A [`ResidueSet`] is one bit per residue. Sum sets are computed by OR-ing
//! rotated copies of the larger operand, one rotation per member of the
//! smaller one; product sets use a plain double loop. A [`WitnessedSet`]
//! additionally stores, for every member, one factor tuple whose product is
//! that member.

use serde::Serialize;

use crate::arith::{gcd, is_prime, mul_mod};
use crate::error::{Error, Result};

/// `{L+1, …, L+N} mod m`, possibly wrapping past zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Interval {
    offset: u64,
    len: u64,
    modulus: u64,
}

impl Interval {
    pub fn new(offset: u64, len: u64, modulus: u64) -> Result<Self> {
        if modulus < 1 || len < 1 || len > modulus {
            return Err(Error::InvalidInterval {
                offset,
                len,
                modulus,
            });
        }
        Ok(Interval {
            offset: offset % modulus,
            len,
            modulus,
        })
    }

    /// `{1, …, len}`.
    pub fn initial(len: u64, modulus: u64) -> Result<Self> {
        Self::new(0, len, modulus)
    }

    pub fn offset(&self) -> u64 {
        self.offset
    }

    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Members in the order `L+1, L+2, …` (not sorted when the interval wraps).
    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        (1..=self.len).map(move |i| (self.offset + i) % self.modulus)
    }

    pub fn contains(&self, x: u64) -> bool {
        let step = (x % self.modulus + self.modulus - self.offset) % self.modulus;
        let step = if step == 0 { self.modulus } else { step };
        step <= self.len
    }

    pub fn contains_zero(&self) -> bool {
        self.contains(0)
    }

    pub fn to_set(&self) -> ResidueSet {
        ResidueSet::from_iter(self.modulus, self.iter())
    }
}

/// Dense membership over `0..m`.
#[derive(Clone, PartialEq, Eq)]
pub struct ResidueSet {
    modulus: u64,
    words: Vec<u64>,
    card: usize,
}

impl std::fmt::Debug for ResidueSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "ResidueSet(mod {}) ", self.modulus)?;
        f.debug_set().entries(self.iter()).finish()
    }
}

impl ResidueSet {
    pub fn empty(modulus: u64) -> Self {
        assert!(modulus >= 1, "modulus must be positive");
        ResidueSet {
            modulus,
            words: vec![0; modulus.div_ceil(64) as usize],
            card: 0,
        }
    }

    pub fn full(modulus: u64) -> Self {
        Self::from_iter(modulus, 0..modulus)
    }

    /// `{1, …, m−1}`; the unit group when `m` is prime.
    pub fn nonzero(modulus: u64) -> Self {
        Self::from_iter(modulus, 1..modulus)
    }

    pub fn from_iter(modulus: u64, items: impl IntoIterator<Item = u64>) -> Self {
        let mut s = Self::empty(modulus);
        for x in items {
            s.insert(x);
        }
        s
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn len(&self) -> usize {
        self.card
    }

    pub fn is_empty(&self) -> bool {
        self.card == 0
    }

    #[inline]
    pub fn contains(&self, x: u64) -> bool {
        let x = x % self.modulus;
        self.words[(x / 64) as usize] >> (x % 64) & 1 == 1
    }

    /// Inserts `x mod m`; returns whether it was new.
    #[inline]
    pub fn insert(&mut self, x: u64) -> bool {
        let x = x % self.modulus;
        let (w, b) = ((x / 64) as usize, x % 64);
        let fresh = self.words[w] >> b & 1 == 0;
        if fresh {
            self.words[w] |= 1 << b;
            self.card += 1;
        }
        fresh
    }

    /// Members in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut bits = w;
            std::iter::from_fn(move || {
                if bits == 0 {
                    return None;
                }
                let t = bits.trailing_zeros() as u64;
                bits &= bits - 1;
                Some(i as u64 * 64 + t)
            })
        })
    }

    pub fn to_vec(&self) -> Vec<u64> {
        self.iter().collect()
    }

    fn check_same(&self, other: &ResidueSet) -> Result<()> {
        if self.modulus != other.modulus {
            return Err(Error::ModulusMismatch(self.modulus, other.modulus));
        }
        Ok(())
    }

    fn recount(&mut self) {
        self.card = self.words.iter().map(|w| w.count_ones() as usize).sum();
    }

    pub fn union(&self, other: &ResidueSet) -> Result<ResidueSet> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (a, b) in out.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
        out.recount();
        Ok(out)
    }

    pub fn intersection(&self, other: &ResidueSet) -> Result<ResidueSet> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (a, b) in out.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
        out.recount();
        Ok(out)
    }

    /// Smallest common member, if any.
    pub fn first_common(&self, other: &ResidueSet) -> Result<Option<u64>> {
        self.check_same(other)?;
        Ok(self
            .words
            .iter()
            .zip(&other.words)
            .enumerate()
            .find(|(_, (a, b))| *a & *b != 0)
            .map(|(i, (a, b))| i as u64 * 64 + (a & b).trailing_zeros() as u64))
    }

    pub fn is_subset(&self, other: &ResidueSet) -> Result<bool> {
        self.check_same(other)?;
        Ok(self
            .words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0))
    }

    /// Members of `{1,…,m−1}` that are absent.
    pub fn missing_units(&self) -> Vec<u64> {
        (1..self.modulus).filter(|&x| !self.contains(x)).collect()
    }

    /// ORs `src` rotated by `k` (bit `i` lands on `(i + k) mod m`) into `self`.
    fn or_rotated(&mut self, src: &ResidueSet, k: u64) {
        let m = self.modulus;
        let k = k % m;
        or_bit_range(&mut self.words, &src.words, 0, m - k, k);
        if k > 0 {
            or_bit_range(&mut self.words, &src.words, m - k, k, 0);
        }
    }
}

#[inline]
fn read64(src: &[u64], pos: u64) -> u64 {
    let (w, b) = ((pos / 64) as usize, pos % 64);
    let lo = src.get(w).copied().unwrap_or(0) >> b;
    let hi = if b > 0 {
        src.get(w + 1).copied().unwrap_or(0) << (64 - b)
    } else {
        0
    };
    lo | hi
}

/// `dst[dst_start + i] |= src[src_start + i]` for `i in 0..len`.
fn or_bit_range(dst: &mut [u64], src: &[u64], src_start: u64, len: u64, dst_start: u64) {
    let mut off = 0;
    while off < len {
        let n = (len - off).min(64);
        let mut chunk = read64(src, src_start + off);
        if n < 64 {
            chunk &= (1u64 << n) - 1;
        }
        let pos = dst_start + off;
        let (w, b) = ((pos / 64) as usize, pos % 64);
        dst[w] |= chunk << b;
        if b > 0 && n > 64 - b {
            dst[w + 1] |= chunk >> (64 - b);
        }
        off += n;
    }
}

pub fn interval_to_set(interval: &Interval) -> ResidueSet {
    interval.to_set()
}

/// `ST = {st mod m}`.
pub fn product_set(s: &ResidueSet, t: &ResidueSet) -> Result<ResidueSet> {
    s.check_same(t)?;
    let m = s.modulus;
    let (small, large) = if s.len() <= t.len() { (s, t) } else { (t, s) };
    let large: Vec<u64> = large.iter().collect();
    let mut out = ResidueSet::empty(m);
    for a in small.iter() {
        for &b in &large {
            out.insert(mul_mod(a, b, m));
        }
    }
    Ok(out)
}

/// `S + T = {s + t mod m}`.
pub fn sum_set(s: &ResidueSet, t: &ResidueSet) -> Result<ResidueSet> {
    s.check_same(t)?;
    let (small, large) = if s.len() <= t.len() { (s, t) } else { (t, s) };
    let mut out = ResidueSet::empty(s.modulus);
    for a in small.iter() {
        out.or_rotated(large, a);
    }
    out.recount();
    Ok(out)
}

/// `ξS`. Cardinality is preserved when `gcd(ξ, m) = 1`.
pub fn scale_set(xi: u64, s: &ResidueSet) -> ResidueSet {
    let m = s.modulus;
    ResidueSet::from_iter(m, s.iter().map(|x| mul_mod(xi % m, x, m)))
}

/// `c − S = {c − s mod m}`.
pub fn reflect_set(c: u64, s: &ResidueSet) -> ResidueSet {
    let m = s.modulus;
    ResidueSet::from_iter(m, s.iter().map(|x| (c % m + m - x) % m))
}

/// A residue set in which every member carries one factor tuple of fixed
/// arity whose product mod `m` is the member.
#[derive(Debug, Clone)]
pub struct WitnessedSet {
    set: ResidueSet,
    arity: usize,
    factors: Vec<u64>,
}

impl WitnessedSet {
    /// Each member witnessed by itself.
    pub fn singletons(set: ResidueSet) -> Self {
        let m = set.modulus as usize;
        let mut factors = vec![0; m];
        for x in set.iter() {
            factors[x as usize] = x;
        }
        WitnessedSet {
            set,
            arity: 1,
            factors,
        }
    }

    pub(crate) fn from_parts(set: ResidueSet, arity: usize, factors: Vec<u64>) -> Self {
        debug_assert_eq!(factors.len(), set.modulus as usize * arity);
        WitnessedSet {
            set,
            arity,
            factors,
        }
    }

    pub fn set(&self) -> &ResidueSet {
        &self.set
    }

    pub fn into_set(self) -> ResidueSet {
        self.set
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn witness(&self, r: u64) -> Option<&[u64]> {
        let r = r % self.set.modulus;
        self.set.contains(r).then(|| {
            let i = r as usize * self.arity;
            &self.factors[i..i + self.arity]
        })
    }

    /// Checks every stored witness against its member.
    pub fn verify(&self) -> bool {
        let m = self.set.modulus;
        self.set.iter().all(|r| {
            let w = self.witness(r).unwrap();
            w.iter().fold(1 % m, |acc, &f| mul_mod(acc, f, m)) == r
        })
    }

    /// `ST` with each new member witnessed by the first pair `(s, t)` found
    /// in ascending order of `s`, then `t`.
    pub fn product(&self, other: &WitnessedSet) -> Result<WitnessedSet> {
        self.set.check_same(&other.set)?;
        let m = self.set.modulus;
        let arity = self.arity + other.arity;
        let mut set = ResidueSet::empty(m);
        let mut factors = vec![0; m as usize * arity];
        let rhs: Vec<u64> = other.set.iter().collect();
        for s in self.set.iter() {
            let ws = self.witness(s).unwrap();
            for &t in &rhs {
                let r = mul_mod(s, t, m);
                if set.insert(r) {
                    let dst = &mut factors[r as usize * arity..(r as usize + 1) * arity];
                    dst[..self.arity].copy_from_slice(ws);
                    dst[self.arity..].copy_from_slice(other.witness(t).unwrap());
                }
            }
        }
        Ok(WitnessedSet {
            set,
            arity,
            factors,
        })
    }
}

struct Partial {
    set: WitnessedSet,
    positions: Vec<usize>,
}

fn fold_half(intervals: &[Interval], order: &[usize], with_witness: bool) -> Result<Partial> {
    let mut acc: Option<Partial> = None;
    for &i in order {
        let next = if with_witness {
            WitnessedSet::singletons(intervals[i].to_set())
        } else {
            WitnessedSet::from_parts(intervals[i].to_set(), 0, Vec::new())
        };
        acc = Some(match acc {
            None => Partial {
                set: next,
                positions: vec![i],
            },
            Some(mut p) => {
                p.positions.push(i);
                let set = if with_witness {
                    p.set.product(&next)?
                } else {
                    WitnessedSet::from_parts(product_set(&p.set.set, &next.set)?, 0, Vec::new())
                };
                Partial {
                    set,
                    positions: p.positions,
                }
            }
        });
    }
    Ok(acc.expect("non-empty half"))
}

/// Exact product set `I_1 I_2 ⋯ I_k`.
///
/// Intervals are sorted by length and dealt alternately into two halves; each
/// half is built by successive products, smallest first, and the halves are
/// multiplied once at the end. With `with_witness`, member witnesses list one
/// factor per interval in the caller's order, factor `j` lying in
/// `intervals[j]`. Without it the returned set has arity 0.
pub fn iterated_interval_product(
    intervals: &[Interval],
    with_witness: bool,
) -> Result<WitnessedSet> {
    let first = intervals
        .first()
        .ok_or_else(|| Error::domain("interval list is empty"))?;
    let m = first.modulus();
    if let Some(bad) = intervals.iter().find(|i| i.modulus() != m) {
        return Err(Error::ModulusMismatch(m, bad.modulus()));
    }
    let mut order: Vec<usize> = (0..intervals.len()).collect();
    order.sort_by_key(|&i| intervals[i].len());
    let left: Vec<usize> = order.iter().copied().step_by(2).collect();
    let right: Vec<usize> = order.iter().copied().skip(1).step_by(2).collect();

    let lhs = fold_half(intervals, &left, with_witness)?;
    let combined = if right.is_empty() {
        lhs
    } else {
        let rhs = fold_half(intervals, &right, with_witness)?;
        let set = if with_witness {
            lhs.set.product(&rhs.set)?
        } else {
            WitnessedSet::from_parts(product_set(&lhs.set.set, &rhs.set.set)?, 0, Vec::new())
        };
        let mut positions = lhs.positions;
        positions.extend(rhs.positions);
        Partial { set, positions }
    };

    if !with_witness {
        return Ok(combined.set);
    }
    // restore caller order of factors
    let k = intervals.len();
    let mut factors = vec![0; m as usize * k];
    for r in combined.set.set.iter() {
        let w = combined.set.witness(r).unwrap();
        let base = r as usize * k;
        for (slot, &pos) in combined.positions.iter().enumerate() {
            factors[base + pos] = w[slot];
        }
    }
    Ok(WitnessedSet::from_parts(combined.set.set, k, factors))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoverageReport {
    /// `|A||B||C||D| > p³`.
    pub hypothesis_met: bool,
    /// `F_p^* ⊆ AB + CD`.
    pub covers: bool,
    pub missing: Vec<u64>,
}

/// Checks whether `AB + CD` contains every unit of `F_p`, alongside the
/// cardinality condition `|A||B||C||D| > p³` under which it always does.
pub fn coverage_check(
    a: &ResidueSet,
    b: &ResidueSet,
    c: &ResidueSet,
    d: &ResidueSet,
    p: u64,
) -> Result<CoverageReport> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    for s in [a, b, c, d] {
        if s.modulus() != p {
            return Err(Error::ModulusMismatch(p, s.modulus()));
        }
        if s.contains(0) {
            return Err(Error::ContainsZero("coverage sets must lie in F_p^*"));
        }
    }
    let size: u128 = [a, b, c, d].iter().map(|s| s.len() as u128).product();
    let hypothesis_met = size > (p as u128).pow(3);
    let covered = sum_set(&product_set(a, b)?, &product_set(c, d)?)?;
    let missing = covered.missing_units();
    Ok(CoverageReport {
        hypothesis_met,
        covers: missing.is_empty(),
        missing,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TripleStats {
    pub card: u64,
    pub box_size: u64,
    pub ratio: f64,
}

/// `|I_1 I_2 I_3|` and its ratio to `N_1 N_2 N_3`.
pub fn triple_product_stats(
    i1: &Interval,
    i2: &Interval,
    i3: &Interval,
    p: u64,
) -> Result<TripleStats> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    for i in [i1, i2, i3] {
        if i.modulus() != p {
            return Err(Error::ModulusMismatch(p, i.modulus()));
        }
        if i.contains_zero() {
            return Err(Error::ContainsZero("interval"));
        }
    }
    let card = iterated_interval_product(&[*i1, *i2, *i3], false)?.set().len() as u64;
    let box_size = i1.len() * i2.len() * i3.len();
    Ok(TripleStats {
        card,
        box_size,
        ratio: card as f64 / box_size as f64,
    })
}

/// Whether every member is coprime to the modulus.
pub fn all_units(s: &ResidueSet) -> bool {
    s.iter().all(|x| gcd(x, s.modulus()) == 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(m: u64, xs: &[u64]) -> ResidueSet {
        ResidueSet::from_iter(m, xs.iter().copied())
    }

    fn naive_sum(s: &ResidueSet, t: &ResidueSet) -> ResidueSet {
        let m = s.modulus();
        let mut out = ResidueSet::empty(m);
        for a in s.iter() {
            for b in t.iter() {
                out.insert((a + b) % m);
            }
        }
        out
    }

    #[test]
    fn interval_examples() {
        let i = Interval::new(5, 4, 7).unwrap();
        assert_eq!(i.to_set().to_vec(), vec![0, 1, 2, 6]);
        assert_eq!(i.iter().collect::<Vec<_>>(), vec![6, 0, 1, 2]);
        assert!(i.contains_zero());
        assert_eq!(Interval::new(0, 7, 7).unwrap().to_set(), ResidueSet::full(7));
        let j = Interval::new(0, 3, 13).unwrap();
        assert_eq!(j.to_set().to_vec(), vec![1, 2, 3]);
        assert!(!j.contains_zero());
        assert!(Interval::new(0, 0, 7).is_err());
        assert!(Interval::new(0, 8, 7).is_err());
    }

    #[test]
    fn interval_membership_matches_enumeration() {
        for m in 1..20u64 {
            for l in 0..m {
                for n in 1..=m {
                    let i = Interval::new(l, n, m).unwrap();
                    let s = i.to_set();
                    assert_eq!(s.len() as u64, n);
                    for x in 0..m {
                        assert_eq!(i.contains(x), s.contains(x));
                    }
                }
            }
        }
    }

    #[test]
    fn product_examples() {
        let s = set(11, &[1, 2]);
        assert_eq!(product_set(&s, &s).unwrap().to_vec(), vec![1, 2, 4]);
        let t = set(11, &[3, 5, 9]);
        assert_eq!(product_set(&set(11, &[1]), &t).unwrap(), t);
        let units = ResidueSet::nonzero(7);
        assert_eq!(product_set(&set(7, &[0]), &units).unwrap().to_vec(), vec![0]);
        assert_eq!(
            product_set(&set(7, &[1]), &set(11, &[1])),
            Err(Error::ModulusMismatch(7, 11))
        );
    }

    #[test]
    fn sum_examples() {
        let s = set(5, &[1, 2, 4]);
        assert_eq!(sum_set(&s, &s).unwrap(), ResidueSet::full(5));
        let t = set(9, &[2, 7, 8]);
        assert_eq!(sum_set(&set(9, &[0]), &t).unwrap(), t);
        assert_eq!(sum_set(&set(2, &[1]), &set(2, &[1])).unwrap().to_vec(), vec![0]);
    }

    #[test]
    fn rotated_sum_matches_double_loop() {
        for m in [1u64, 2, 63, 64, 65, 127, 128, 129, 200, 331] {
            for seed in 0..5u64 {
                let mut rng = crate::rng::Stream::new(seed, "sumset");
                let s = ResidueSet::from_iter(m, (0..m / 3 + 1).map(|_| rng.below(m)));
                let t = ResidueSet::from_iter(m, (0..m / 5 + 1).map(|_| rng.below(m)));
                let fast = sum_set(&s, &t).unwrap();
                assert_eq!(fast, naive_sum(&s, &t), "m = {m}");
                assert_eq!(fast.len(), fast.iter().count());
            }
        }
    }

    #[test]
    fn scale_examples() {
        let s = set(7, &[1, 2]);
        assert_eq!(scale_set(1, &s), s);
        assert_eq!(scale_set(3, &s).to_vec(), vec![3, 6]);
        let odd = set(8, &[1, 3, 5]);
        let scaled = scale_set(2, &odd);
        assert_eq!(scaled.to_vec(), vec![2, 6]);
        assert_eq!(scaled.len(), 2);
    }

    #[test]
    fn iterated_product_examples() {
        let one = Interval::new(0, 2, 11).unwrap();
        let w = iterated_interval_product(&[one], true).unwrap();
        assert_eq!(w.set().to_vec(), vec![1, 2]);
        assert_eq!(w.witness(1), Some(&[1][..]));
        assert_eq!(w.witness(2), Some(&[2][..]));

        let i = Interval::initial(4, 101).unwrap();
        let w = iterated_interval_product(&[i, i, i], true).unwrap();
        assert_eq!(
            w.set().to_vec(),
            vec![1, 2, 3, 4, 6, 8, 9, 12, 16, 18, 24, 27, 32, 36, 48, 64]
        );
        assert!(w.verify());

        let s = Interval::initial(1, 13).unwrap();
        let w = iterated_interval_product(&[s; 6], true).unwrap();
        assert_eq!(w.set().to_vec(), vec![1]);
        assert_eq!(w.witness(1), Some(&[1, 1, 1, 1, 1, 1][..]));

        assert!(iterated_interval_product(&[], false).is_err());
    }

    #[test]
    fn witnesses_respect_interval_positions() {
        let m = 97;
        let ivs = [
            Interval::new(10, 3, m).unwrap(),
            Interval::new(40, 1, m).unwrap(),
            Interval::new(70, 5, m).unwrap(),
            Interval::new(2, 2, m).unwrap(),
        ];
        let w = iterated_interval_product(&ivs, true).unwrap();
        assert!(w.verify());
        for r in w.set().iter() {
            for (j, &x) in w.witness(r).unwrap().iter().enumerate() {
                assert!(ivs[j].contains(x));
            }
        }
    }

    #[test]
    fn coverage_examples() {
        let f5 = ResidueSet::nonzero(5);
        let r = coverage_check(&f5, &f5, &f5, &f5, 5).unwrap();
        assert!(r.hypothesis_met && r.covers && r.missing.is_empty());

        let s = set(5, &[1, 2]);
        assert_eq!(product_set(&s, &s).unwrap().to_vec(), vec![1, 2, 4]);
        let r = coverage_check(&s, &s, &s, &s, 5).unwrap();
        assert!(!r.hypothesis_met);
        assert!(r.covers);

        let one = set(3, &[1]);
        let r = coverage_check(&one, &one, &one, &one, 3).unwrap();
        assert!(!r.hypothesis_met);
        assert!(!r.covers);
        assert_eq!(r.missing, vec![1]);

        let z = set(5, &[0, 1]);
        assert!(matches!(
            coverage_check(&z, &s, &s, &s, 5),
            Err(Error::ContainsZero(_))
        ));
    }

    #[test]
    fn triple_examples() {
        let i = Interval::initial(4, 101).unwrap();
        let t = triple_product_stats(&i, &i, &i, 101).unwrap();
        assert_eq!((t.card, t.box_size, t.ratio), (16, 64, 0.25));

        let s = Interval::new(4, 1, 101).unwrap();
        let t = triple_product_stats(&s, &s, &s, 101).unwrap();
        assert_eq!((t.card, t.ratio), (1, 1.0));

        let u = Interval::initial(6, 7).unwrap();
        let t = triple_product_stats(&u, &u, &u, 7).unwrap();
        assert_eq!((t.card, t.box_size), (6, 216));

        let z = Interval::new(5, 3, 7).unwrap();
        assert!(triple_product_stats(&z, &u, &u, 7).is_err());
    }
}
