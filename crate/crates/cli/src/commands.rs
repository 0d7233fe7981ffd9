//! One function per subcommand. Each validates its moduli against the cap,
//! computes rows (in parallel where rows are independent), and fills the
//! summary from the rows it emitted.

use std::collections::BTreeMap;

use congrulab::arith::{euler_phi, floor_pow, gcd, is_prime};
use congrulab::chars::{burgess_profile, count_products_j, j_via_characters, product_bound_check, CharTable};
use congrulab::growth::{olson_bound_check, power_set_sequence, represent_target, represent_unit, GeneratorSet};
use congrulab::rng::Stream;
use congrulab::sets::{coverage_check, Interval, ResidueSet};
use congrulab::smooth::{greedy_factor, part_bound, SmoothTable};
use congrulab::solver::{exhaustive_abc_scan, solve as decide, threshold_scan, verify_witness, SolveInstance, LEFT_LEN, RIGHT_LEN};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::report::{joined, opt, Report};
use crate::{
    BurgessArgs, CliError, CoverageArgs, GrowthArgs, IdentityArgs, OlsonArgs, Outcome, RepresentArgs, ScanArgs,
    SmoothArgs, SolveArgs, ThresholdArgs, EXIT_INTERNAL, EXIT_RESOURCE,
};

type Result<T> = std::result::Result<T, CliError>;

fn within_cap(what: &'static str, value: u64, cap: u64) -> Result<()> {
    if value > cap {
        return Err(CliError {
            code: EXIT_RESOURCE,
            message: congrulab::Error::ResourceCap { what, value, cap }.to_string(),
        });
    }
    Ok(())
}

fn primes(list: &[u64], cap: u64) -> Result<()> {
    for &p in list {
        if !is_prime(p) {
            return Err(congrulab::Error::NotPrime(p).into());
        }
        within_cap("modulus", p, cap)?;
    }
    Ok(())
}

fn unverified(what: &str) -> CliError {
    CliError {
        code: EXIT_INTERNAL,
        message: format!("refusing to emit an unverified {what}"),
    }
}

fn done(report: Report, negative: bool) -> Result<Outcome> {
    Ok(Outcome {
        report,
        negative,
        notes: Vec::new(),
    })
}

fn min_max(xs: impl Iterator<Item = f64>) -> (Value, Value) {
    let (lo, hi) = xs.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)));
    if lo > hi {
        (Value::Null, Value::Null)
    } else {
        (json!(lo), json!(hi))
    }
}

pub fn solve(args: &SolveArgs, config: Value, cap: u64) -> Result<Outcome> {
    let p = args.p;
    primes(&[p], cap)?;
    let inst = match (&args.intervals, args.len) {
        (Some(spec), _) => {
            let ivs = spec
                .pairs()
                .iter()
                .map(|&(l, n)| Interval::new(l, n, p))
                .collect::<congrulab::Result<Vec<_>>>()?;
            if ivs.len() != LEFT_LEN + RIGHT_LEN {
                return Err(CliError::usage(format!(
                    "expected {} intervals, got {}",
                    LEFT_LEN + RIGHT_LEN,
                    ivs.len()
                )));
            }
            SolveInstance::new(p, args.a, args.b, args.c, ivs[..LEFT_LEN].to_vec(), ivs[LEFT_LEN..].to_vec())?
        }
        (None, Some(n)) => SolveInstance::uniform(p, args.a, args.b, args.c, n)?,
        (None, None) => return Err(CliError::usage("one of --intervals or --len is required")),
    };
    let r = decide(&inst)?;
    if let Some(w) = &r.witness {
        if !verify_witness(&inst, w)? {
            return Err(unverified("witness"));
        }
    }
    let mut report = Report::new(
        "solve",
        config,
        &["p", "a", "b", "c", "left_card", "right_card", "solvable", "witness"],
    );
    report.push(vec![
        json!(p),
        json!(inst.a),
        json!(inst.b),
        json!(inst.c),
        json!(r.left_card),
        json!(r.right_card),
        json!(r.solvable),
        opt(r.witness.as_deref().map(joined)),
    ]);
    report.set("solvable", r.solvable);
    done(report, !r.solvable)
}

pub fn scan(args: &ScanArgs, config: Value, cap: u64) -> Result<Outcome> {
    primes(args.p.values(), cap)?;
    let mut jobs = Vec::new();
    for &p in args.p.values() {
        let lens: Vec<u64> = match &args.len {
            Some(l) => l.values().to_vec(),
            None => (1..p).collect(),
        };
        for n in lens {
            if n == 0 || n >= p {
                return Err(CliError::usage(format!("length {n} is outside 1..{p}")));
            }
            jobs.push((p, n));
        }
    }
    let rows = jobs
        .par_iter()
        .map(|&(p, n)| exhaustive_abc_scan(p, &[n; LEFT_LEN + RIGHT_LEN], args.sample, args.seed))
        .collect::<congrulab::Result<Vec<_>>>()?;
    let mut report = Report::new("scan", config, &["p", "len", "total", "solvable", "fraction"]);
    for (&(p, n), s) in jobs.iter().zip(&rows) {
        report.push(vec![json!(p), json!(n), json!(s.total), json!(s.solvable), json!(s.fraction)]);
    }
    let (lo, hi) = min_max(rows.iter().map(|s| s.fraction));
    report.set("rows", rows.len());
    report.set("cases", rows.iter().map(|s| s.total).sum::<u64>());
    report.set("solvable", rows.iter().map(|s| s.solvable).sum::<u64>());
    report.set("min_fraction", lo);
    report.set("max_fraction", hi);
    done(report, false)
}

pub fn threshold(args: &ThresholdArgs, config: Value, cap: u64) -> Result<Outcome> {
    primes(args.p.values(), cap)?;
    let scans = args
        .p
        .values()
        .par_iter()
        .map(|&p| threshold_scan(p))
        .collect::<congrulab::Result<Vec<_>>>()?;
    let mut report = if args.curve {
        let mut r = Report::new("threshold", config, &["p", "len", "total", "solvable", "fraction"]);
        for t in &scans {
            for (n, s) in (1u64..).zip(&t.curve) {
                r.push(vec![json!(t.p), json!(n), json!(s.total), json!(s.solvable), json!(s.fraction)]);
            }
        }
        r
    } else {
        let mut r = Report::new("threshold", config, &["p", "minimal_len", "quarter_power_ratio"]);
        for t in &scans {
            r.push(vec![json!(t.p), json!(t.minimal_len), json!(t.quarter_power_ratio)]);
        }
        r
    };
    let thresholds: Vec<Value> = scans
        .iter()
        .map(|t| json!({"p": t.p, "minimal_len": t.minimal_len, "quarter_power_ratio": t.quarter_power_ratio}))
        .collect();
    report.set("primes", scans.len());
    report.set("thresholds", thresholds);
    done(report, false)
}

fn generator_set(m: u64, c: Option<f64>, cutoff: Option<u64>) -> congrulab::Result<GeneratorSet> {
    match (c, cutoff) {
        (_, Some(k)) => GeneratorSet::from_cutoff(m, k),
        (Some(c), None) => GeneratorSet::from_exponent(m, c),
        (None, None) => unreachable!("clap requires --c or --cutoff"),
    }
}

pub fn growth(args: &GrowthArgs, config: Value, cap: u64) -> Result<Outcome> {
    within_cap("modulus", args.m.max(), cap)?;
    let reports = args
        .m
        .values()
        .par_iter()
        .map(|&m| power_set_sequence(&generator_set(m, args.c, args.cutoff)?, args.n_max))
        .collect::<congrulab::Result<Vec<_>>>()?;
    let mut report = Report::new(
        "growth",
        config,
        &["m", "cutoff", "|A|", "n_stab", "subgroup_order", "density", "ell", "degenerate", "closed"],
    );
    for r in &reports {
        let stab = r.stabilized();
        report.push(vec![
            json!(r.m),
            json!(r.cutoff),
            json!(r.card_a),
            opt(r.n_stab),
            opt(stab.then_some(r.subgroup_order)),
            opt(stab.then_some(r.density)),
            opt(r.ell),
            json!(r.degenerate()),
            opt(stab.then_some(r.is_subgroup_at_stab)),
        ]);
    }
    let stable: Vec<_> = reports.iter().filter(|r| r.stabilized()).collect();
    let (lo, hi) = min_max(stable.iter().map(|r| r.density));
    report.set("rows", reports.len());
    report.set("degenerate", reports.iter().filter(|r| r.degenerate()).count());
    report.set("unstabilized", reports.len() - stable.len());
    report.set("not_closed", stable.iter().filter(|r| !r.is_subgroup_at_stab).count());
    report.set("max_n_stab", opt(stable.iter().filter_map(|r| r.n_stab).max()));
    report.set("min_density", lo);
    report.set("max_density", hi);
    done(report, false)
}

pub fn burgess(args: &BurgessArgs, config: Value, cap: u64) -> Result<Outcome> {
    primes(args.p.values(), cap)?;
    let mut jobs = Vec::new();
    for &p in args.p.values() {
        let lens: Vec<u64> = match &args.len {
            Some(l) => l.values().to_vec(),
            None => (1..p).collect(),
        };
        if let Some(&n) = lens.iter().find(|&&n| n == 0 || n >= p) {
            return Err(CliError::usage(format!("length {n} is outside 1..{p}")));
        }
        jobs.push((p, lens));
    }
    let rows = jobs
        .par_iter()
        .map(|(p, lens)| {
            let table = CharTable::new(*p)?;
            lens.iter()
                .map(|&n| Ok((*p, n, burgess_profile(&table, n)?)))
                .collect::<congrulab::Result<Vec<_>>>()
        })
        .collect::<congrulab::Result<Vec<_>>>()?;
    let mut report = Report::new("charsum", config, &["p", "len", "max_ratio", "argmax_j"]);
    for (p, n, b) in rows.iter().flatten() {
        report.push(vec![json!(p), json!(n), json!(b.max_ratio), opt(b.argmax)]);
    }
    let (lo, hi) = min_max(rows.iter().flatten().map(|r| r.2.max_ratio));
    report.set("rows", report.rows.len());
    report.set("min_max_ratio", lo);
    report.set("max_max_ratio", hi);
    done(report, false)
}

/// Seeded instances `(p, X, Y)` with `p` prime in `[3, p_max]` and
/// `1 ≤ |X|, |Y| ≤ max_set`, drawn from the stream `"charsum-identity"`.
pub fn identity_instances(args: &IdentityArgs) -> Result<Vec<(u64, ResidueSet, ResidueSet)>> {
    if args.p_max < 3 || args.max_set == 0 {
        return Err(CliError::usage("need p_max >= 3 and max_set >= 1"));
    }
    let pool: Vec<u64> = (3..=args.p_max).filter(|&p| is_prime(p)).collect();
    let mut rng = Stream::new(args.seed, "charsum-identity");
    let mut out = Vec::new();
    for _ in 0..args.instances {
        let p = pool[rng.below(pool.len() as u64) as usize];
        let units: Vec<u64> = (1..p).collect();
        let top = args.max_set.min(p - 1);
        let (kx, ky) = (rng.range(1, top), rng.range(1, top));
        let x = ResidueSet::from_iter(p, rng.choose(&units, kx as usize));
        let y = ResidueSet::from_iter(p, rng.choose(&units, ky as usize));
        out.push((p, x, y));
    }
    Ok(out)
}

pub const IDENTITY_TOLERANCE: f64 = 1e-6;

pub fn identity(args: &IdentityArgs, config: Value, cap: u64) -> Result<Outcome> {
    within_cap("modulus", args.p_max, cap)?;
    let instances = identity_instances(args)?;
    let mut tables: BTreeMap<u64, CharTable> = BTreeMap::new();
    let mut report = Report::new(
        "charsum",
        config,
        &["instance", "p", "|X|", "|Y|", "J", "J_char", "rel_err", "|XY|", "cs_lhs", "cs_rhs", "cs_holds"],
    );
    let (mut worst, mut failures, mut violations) = (0.0f64, 0u64, 0u64);
    for (i, (p, x, y)) in instances.iter().enumerate() {
        if !tables.contains_key(p) {
            tables.insert(*p, CharTable::new(*p)?);
        }
        let j = count_products_j(x, y, *p)?;
        let jc = j_via_characters(&tables[p], x, y)?;
        let rel = (jc - j as f64).abs() / j as f64;
        let bound = product_bound_check(x, y, *p)?;
        debug_assert_eq!(bound.energy, j);
        worst = worst.max(rel);
        failures += u64::from(rel > IDENTITY_TOLERANCE);
        violations += u64::from(!bound.holds());
        let lhs = bound.lhs as u128 * bound.energy;
        report.push(vec![
            json!(i),
            json!(p),
            json!(x.len()),
            json!(y.len()),
            json!(j as u64),
            json!(jc),
            json!(rel),
            json!(bound.lhs),
            json!(lhs as u64),
            json!(bound.numerator as u64),
            json!(bound.holds()),
        ]);
    }
    report.set("instances", instances.len());
    report.set("max_rel_err", worst);
    report.set("identity_failures", failures);
    report.set("cs_violations", violations);
    done(report, failures + violations > 0)
}

struct SmoothRow {
    m: u64,
    y: u64,
    psi: u64,
    psi_m: u64,
    phi: u64,
    checked: u64,
    max_k: usize,
    failures: u64,
    card_a_n1: Option<usize>,
}

fn smooth_row(table: &SmoothTable, m: u64, c0: f64, c: f64, greedy: bool, inclusion: bool) -> congrulab::Result<SmoothRow> {
    let y = floor_pow(m, c0);
    let mut row = SmoothRow {
        m,
        y,
        psi: table.psi(m, y)?,
        psi_m: table.psi_q(m, y, m)?,
        phi: euler_phi(m),
        checked: 0,
        max_k: 0,
        failures: 0,
        card_a_n1: None,
    };
    if !(greedy || inclusion) {
        return Ok(row);
    }
    let cutoff = floor_pow(m, c).max(1);
    let a = GeneratorSet::from_cutoff(m, cutoff)?;
    let smooth_units = (1..=m).filter(|&x| {
        (x == 1 || table.largest_prime_factor(x).is_some_and(|q| q <= y)) && gcd(x, m) == 1
    });
    for x in smooth_units {
        row.checked += 1;
        if y < 2 {
            row.max_k = row.max_k.max(1);
            continue;
        }
        match greedy_factor(x, m, c0, c) {
            Ok(f) => {
                row.max_k = row.max_k.max(f.k());
                let in_a = !inclusion || f.parts.iter().all(|&q| a.set().contains(q % m));
                if !f.verify() || !in_a {
                    row.failures += 1;
                }
            }
            Err(_) => row.failures += 1,
        }
    }
    if inclusion {
        row.card_a_n1 = Some(a.power(part_bound(c0)).set().len());
    }
    Ok(row)
}

pub fn smooth(args: &SmoothArgs, config: Value, cap: u64) -> Result<Outcome> {
    let c = args.c.unwrap_or(args.c0);
    if !(args.c0 > 0.0 && args.c0 <= c && c < 1.0) {
        return Err(CliError::usage(format!("need 0 < c0 <= c < 1 (c0 = {}, c = {c})", args.c0)));
    }
    if args.m.values()[0] < 2 {
        return Err(CliError::usage("moduli must be >= 2"));
    }
    within_cap("modulus", args.m.max(), cap)?;
    let table = SmoothTable::new(args.m.max())?;
    let rows = args
        .m
        .values()
        .par_iter()
        .map(|&m| smooth_row(&table, m, args.c0, c, args.check_greedy, args.inclusion))
        .collect::<congrulab::Result<Vec<_>>>()?;

    let mut columns = vec!["m", "y", "psi", "psi_m", "phi", "delta_hat"];
    if args.check_greedy || args.inclusion {
        columns.extend(["checked", "max_k", "failures"]);
    }
    if args.inclusion {
        columns.extend(["n1", "card_a_n1", "covers_psi_m"]);
    }
    let mut report = Report::new("smooth", config, &columns);
    let n1 = part_bound(args.c0);
    for r in &rows {
        let mut v = vec![
            json!(r.m),
            json!(r.y),
            json!(r.psi),
            json!(r.psi_m),
            json!(r.phi),
            json!(r.psi_m as f64 / r.phi as f64),
        ];
        if args.check_greedy || args.inclusion {
            v.extend([json!(r.checked), json!(r.max_k), json!(r.failures)]);
        }
        if let Some(card) = r.card_a_n1 {
            v.extend([json!(n1), json!(card), json!(card as u64 >= r.psi_m)]);
        }
        report.push(v);
    }
    let failures: u64 = rows.iter().map(|r| r.failures).sum();
    let shortfalls = rows
        .iter()
        .filter(|r| r.card_a_n1.is_some_and(|c| (c as u64) < r.psi_m))
        .count();
    report.set("rows", rows.len());
    if args.check_greedy || args.inclusion {
        report.set("checked", rows.iter().map(|r| r.checked).sum::<u64>());
        report.set("max_k", rows.iter().map(|r| r.max_k).max().unwrap_or(0));
        report.set("part_bound", n1);
        report.set("failures", failures);
    }
    if args.inclusion {
        report.set("psi_m_shortfalls", shortfalls);
    }
    done(report, failures > 0 || shortfalls > 0)
}

pub fn coverage(args: &CoverageArgs, config: Value, cap: u64) -> Result<Outcome> {
    primes(args.p.values(), cap)?;
    if let Some(&p) = args.p.values().iter().find(|&&p| p < 5) {
        return Err(CliError::usage(format!(
            "no subsets of F_{p}^* satisfy |A||B||C||D| > p^3; use p >= 5"
        )));
    }
    let rows = args
        .p
        .values()
        .par_iter()
        .map(|&p| {
            let mut rng = Stream::new(args.seed, &format!("coverage:{p}"));
            let units: Vec<u64> = (1..p).collect();
            let cube = (p as u128).pow(3);
            let mut counterexamples = 0u64;
            for _ in 0..args.random {
                let sizes = loop {
                    let s: [u64; 4] = std::array::from_fn(|_| rng.range(1, p - 1));
                    if s.iter().map(|&k| k as u128).product::<u128>() > cube {
                        break s;
                    }
                };
                let sets: Vec<ResidueSet> = sizes
                    .iter()
                    .map(|&k| ResidueSet::from_iter(p, rng.choose(&units, k as usize)))
                    .collect();
                let r = coverage_check(&sets[0], &sets[1], &sets[2], &sets[3], p)?;
                debug_assert!(r.hypothesis_met);
                counterexamples += u64::from(!r.covers);
            }
            Ok((p, counterexamples))
        })
        .collect::<congrulab::Result<Vec<_>>>()?;
    let mut report = Report::new("coverage", config, &["p", "trials", "covered", "counterexamples"]);
    for &(p, bad) in &rows {
        report.push(vec![json!(p), json!(args.random), json!(args.random - bad), json!(bad)]);
    }
    let bad: u64 = rows.iter().map(|r| r.1).sum();
    report.set("trials", args.random * rows.len() as u64);
    report.set("counterexamples", bad);
    done(report, bad > 0)
}

pub fn represent(args: &RepresentArgs, config: Value, cap: u64) -> Result<Outcome> {
    within_cap("modulus", args.m, cap)?;
    let g = generator_set(args.m, args.c, args.cutoff)?;
    let rep = if args.target % args.m.max(1) == 1 {
        represent_unit(&g, args.n_max)?
    } else {
        represent_target(&g, args.target, args.n_max)?
    };
    if !rep.verify() {
        return Err(unverified("representation"));
    }
    let factors = joined(&rep.factors);
    let mut report = Report::new(
        "represent",
        config,
        &["m", "target", "cutoff", "n_stab", "ell", "k", "factors", "verified"],
    );
    report.push(vec![
        json!(rep.modulus),
        json!(rep.target),
        json!(rep.cutoff),
        json!(rep.n_stab),
        opt(rep.ell),
        json!(rep.k()),
        json!(factors),
        json!(true),
    ]);
    report.set("k", rep.k());
    report.set("verified", true);
    let product = rep.factors.iter().map(u64::to_string).collect::<Vec<_>>().join("*");
    Ok(Outcome {
        report,
        negative: false,
        notes: vec![
            format!("factors: {factors}"),
            format!("verified: {product} = {} (mod {})", rep.target, rep.modulus),
        ],
    })
}

pub fn olson(args: &OlsonArgs, config: Value, cap: u64) -> Result<Outcome> {
    if args.m_max < 2 {
        return Err(CliError::usage("m_max must be >= 2"));
    }
    within_cap("modulus", args.m_max, cap)?;
    let mut rng = Stream::new(args.seed, "olson-suite");
    let mut report = Report::new(
        "olson-suite",
        config,
        &["instance", "m", "|X|", "|G|", "h_actual", "h_bound", "holds"],
    );
    let mut violations = 0u64;
    for i in 0..args.instances {
        let m = rng.range(2, args.m_max);
        let others: Vec<u64> = (2..m).filter(|&x| gcd(x, m) == 1).collect();
        let extra = rng.range(0, args.max_extra.min(others.len() as u64));
        let mut x = ResidueSet::from_iter(m, rng.choose(&others, extra as usize));
        x.insert(1);
        let check = olson_bound_check(&x, m)?;
        violations += u64::from(!check.holds());
        report.push(vec![
            json!(i),
            json!(m),
            json!(check.card_x),
            json!(check.group_order),
            json!(check.h_actual),
            json!(check.h_bound),
            json!(check.holds()),
        ]);
    }
    report.set("instances", args.instances);
    report.set("violations", violations);
    report.set("max_h", report.column("h_actual").filter_map(Value::as_u64).max());
    done(report, violations > 0)
}
