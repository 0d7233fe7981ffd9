//! Exact solvability of `a x_1⋯x_6 + b x_7⋯x_13 ≡ c (mod p)` over a box of
//! intervals.
//!
//! The left product `P = I_1⋯I_6` and the right product `Q = I_7⋯I_13` are
//! materialized as witnessed sets; the congruence is solvable iff the sets
//! `aP` and `c − bQ` meet. Scans over `(b, c)` fix `a = 1`, which loses
//! nothing: `(a, b, c)` and `(1, b/a, c/a)` have the same solutions.

use serde::Serialize;

use crate::arith::{inv_mod, is_prime, mul_mod};
use crate::error::{Error, Result};
use crate::rng::Stream;
use crate::sets::{
    iterated_interval_product, reflect_set, scale_set, sum_set, Interval, ResidueSet, WitnessedSet,
};

pub const LEFT_LEN: usize = 6;
pub const RIGHT_LEN: usize = 7;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveInstance {
    pub p: u64,
    pub a: u64,
    pub b: u64,
    pub c: u64,
    pub left: Vec<Interval>,
    pub right: Vec<Interval>,
}

impl SolveInstance {
    pub fn new(
        p: u64,
        a: u64,
        b: u64,
        c: u64,
        left: Vec<Interval>,
        right: Vec<Interval>,
    ) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if left.len() != LEFT_LEN || right.len() != RIGHT_LEN {
            return Err(Error::domain(format!(
                "expected {LEFT_LEN} + {RIGHT_LEN} intervals, got {} + {}",
                left.len(),
                right.len()
            )));
        }
        let (a, b, c) = (a % p, b % p, c % p);
        if a == 0 || b == 0 || c == 0 {
            return Err(Error::ContainsZero("coefficients a, b, c must be nonzero mod p"));
        }
        for i in left.iter().chain(&right) {
            if i.modulus() != p {
                return Err(Error::ModulusMismatch(p, i.modulus()));
            }
            if i.contains_zero() {
                return Err(Error::ContainsZero("intervals must avoid 0 mod p"));
            }
        }
        Ok(SolveInstance {
            p,
            a,
            b,
            c,
            left,
            right,
        })
    }

    /// All 13 intervals anchored at `{1, …, len}`.
    pub fn uniform(p: u64, a: u64, b: u64, c: u64, len: u64) -> Result<Self> {
        let i = Interval::initial(len, p)?;
        Self::new(p, a, b, c, vec![i; LEFT_LEN], vec![i; RIGHT_LEN])
    }

    /// Six intervals on each side plus `I_13 = {1}`.
    pub fn twelve(
        p: u64,
        a: u64,
        b: u64,
        c: u64,
        left: Vec<Interval>,
        mut right: Vec<Interval>,
    ) -> Result<Self> {
        right.push(Interval::initial(1, p)?);
        Self::new(p, a, b, c, left, right)
    }

    pub fn intervals(&self) -> impl Iterator<Item = &Interval> {
        self.left.iter().chain(&self.right)
    }

    /// Same box with `(ta, tb, tc)`.
    pub fn rescaled(&self, t: u64) -> Result<Self> {
        let p = self.p;
        Self::new(
            p,
            mul_mod(t, self.a, p),
            mul_mod(t, self.b, p),
            mul_mod(t, self.c, p),
            self.left.clone(),
            self.right.clone(),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveReport {
    pub instance: SolveInstance,
    pub solvable: bool,
    pub witness: Option<Vec<u64>>,
    pub left_card: usize,
    pub right_card: usize,
}

/// Both side products of a box, built once and reused across coefficients.
pub struct BoxProducts {
    p: u64,
    left: WitnessedSet,
    right: WitnessedSet,
}

impl BoxProducts {
    pub fn new(p: u64, left: &[Interval], right: &[Interval]) -> Result<Self> {
        Ok(BoxProducts {
            p,
            left: iterated_interval_product(left, true)?,
            right: iterated_interval_product(right, true)?,
        })
    }

    pub fn left(&self) -> &ResidueSet {
        self.left.set()
    }

    pub fn right(&self) -> &ResidueSet {
        self.right.set()
    }

    /// Smallest `r ∈ aP ∩ (c − bQ)` and the full factor tuple behind it.
    pub fn find(&self, a: u64, b: u64, c: u64) -> Option<Vec<u64>> {
        let p = self.p;
        let lhs = scale_set(a, self.left.set());
        let rhs = reflect_set(c, &scale_set(b, self.right.set()));
        let r = lhs.first_common(&rhs).expect("same modulus")?;
        let u = mul_mod(inv_mod(a, p)?, r, p);
        let v = mul_mod(inv_mod(b, p)?, (c + p - r) % p, p);
        let mut tuple = self.left.witness(u)?.to_vec();
        tuple.extend_from_slice(self.right.witness(v)?);
        Some(tuple)
    }

    /// Every `c` for which `x + b·y ≡ c` has a solution with `x ∈ P`, `y ∈ Q`.
    pub fn reachable(&self, b: u64) -> ResidueSet {
        sum_set(self.left.set(), &scale_set(b, self.right.set())).expect("same modulus")
    }
}

pub fn solve(instance: &SolveInstance) -> Result<SolveReport> {
    let products = BoxProducts::new(instance.p, &instance.left, &instance.right)?;
    let witness = products.find(instance.a, instance.b, instance.c);
    if let Some(w) = &witness {
        debug_assert_eq!(verify_witness(instance, w), Ok(true));
    }
    Ok(SolveReport {
        instance: instance.clone(),
        solvable: witness.is_some(),
        witness,
        left_card: products.left().len(),
        right_card: products.right().len(),
    })
}

/// Recomputes `a x_1⋯x_6 + b x_7⋯x_13 mod p` and compares it with `c`.
pub fn verify_witness(instance: &SolveInstance, witness: &[u64]) -> Result<bool> {
    let p = instance.p;
    if witness.len() != LEFT_LEN + RIGHT_LEN {
        return Err(Error::domain(format!(
            "witness must have {} coordinates",
            LEFT_LEN + RIGHT_LEN
        )));
    }
    for (index, (&value, interval)) in witness.iter().zip(instance.intervals()).enumerate() {
        if value >= p || !interval.contains(value) {
            return Err(Error::WitnessOutside { index, value });
        }
    }
    let prod = |xs: &[u64]| xs.iter().fold(1, |acc, &x| mul_mod(acc, x, p));
    let lhs = mul_mod(instance.a, prod(&witness[..LEFT_LEN]), p);
    let rhs = mul_mod(instance.b, prod(&witness[LEFT_LEN..]), p);
    Ok((lhs + rhs) % p == instance.c)
}

/// Named configuration with `1 ∈ I_13`: the same decision as [`solve`].
pub fn solve_unit_tail(instance: &SolveInstance) -> Result<SolveReport> {
    let last = instance.right.last().expect("validated instance");
    if !last.contains(1) {
        return Err(Error::domain("the last interval must contain 1"));
    }
    solve(instance)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanSummary {
    pub p: u64,
    pub lengths: Vec<u64>,
    pub total: u64,
    pub solvable: u64,
    pub fraction: f64,
    /// First failing `(a, b, c)` triples in scan order, at most
    /// [`MAX_REPORTED_FAILURES`].
    pub failures: Vec<(u64, u64, u64)>,
}

pub const MAX_REPORTED_FAILURES: usize = 16;

/// Solvability over `(b, c) ∈ (F_p^*)²` at `a = 1`, intervals `{1, …, len_j}`.
///
/// With `sample = None` every pair is decided; otherwise `sample` pairs are
/// drawn from the named stream `"abc-scan"` of `seed`.
pub fn exhaustive_abc_scan(
    p: u64,
    lengths: &[u64],
    sample: Option<u64>,
    seed: u64,
) -> Result<ScanSummary> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if lengths.len() != LEFT_LEN + RIGHT_LEN {
        return Err(Error::domain(format!(
            "expected {} lengths, got {}",
            LEFT_LEN + RIGHT_LEN,
            lengths.len()
        )));
    }
    if let Some(&bad) = lengths.iter().find(|&&n| n == 0 || n >= p) {
        return Err(Error::domain(format!(
            "interval lengths must satisfy 1 <= len < p (got {bad})"
        )));
    }
    let intervals = lengths
        .iter()
        .map(|&n| Interval::initial(n, p))
        .collect::<Result<Vec<_>>>()?;
    let products = BoxProducts::new(p, &intervals[..LEFT_LEN], &intervals[LEFT_LEN..])?;

    let mut solvable = 0u64;
    let mut total = 0u64;
    let mut failures = Vec::new();
    let mut record = |b: u64, c: u64, ok: bool| {
        total += 1;
        if ok {
            solvable += 1;
        } else if failures.len() < MAX_REPORTED_FAILURES {
            failures.push((1, b, c));
        }
    };
    match sample {
        None => {
            for b in 1..p {
                let reach = products.reachable(b);
                for c in 1..p {
                    record(b, c, reach.contains(c));
                }
            }
        }
        Some(k) => {
            let mut rng = Stream::new(seed, "abc-scan");
            for _ in 0..k {
                let b = rng.range(1, p - 1);
                let c = rng.range(1, p - 1);
                record(b, c, products.find(1, b, c).is_some());
            }
        }
    }
    Ok(ScanSummary {
        p,
        lengths: lengths.to_vec(),
        total,
        solvable,
        fraction: if total == 0 { 0.0 } else { solvable as f64 / total as f64 },
        failures,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdScan {
    pub p: u64,
    pub minimal_len: u64,
    /// `minimal_len / p^{1/4}`.
    pub quarter_power_ratio: f64,
    pub curve: Vec<ScanSummary>,
}

/// Smallest uniform length `n` with every `(1, b, c)` solvable, ascending from 1.
pub fn threshold_scan(p: u64) -> Result<ThresholdScan> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if p < 3 {
        return Err(Error::domain("threshold scan needs p >= 3"));
    }
    let mut curve = Vec::new();
    for n in 1..p {
        let row = exhaustive_abc_scan(p, &[n; LEFT_LEN + RIGHT_LEN], None, 0)?;
        let done = row.solvable == row.total;
        curve.push(row);
        if done {
            return Ok(ThresholdScan {
                p,
                minimal_len: n,
                quarter_power_ratio: n as f64 / (p as f64).powf(0.25),
                curve,
            });
        }
    }
    unreachable!("length p - 1 yields the full unit group on both sides")
}
