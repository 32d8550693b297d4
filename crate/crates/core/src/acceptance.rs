//! The acceptance suite: eleven numbered checks with time limits, each
//! comparing library output against an oracle computed here.
//!
//! Suites group the criteria: `lattice` (1, 2, 11), `bg` (3), `bx` (4),
//! `posmodel` (5, 6, 7, 8), `flatness` (9, 10) and `all`.

use std::collections::HashSet;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebraic::FieldSpec;
use crate::congruence::{
    bg_check, check_bx_nonrelation, Carrier, classify_nat_congruence, closure_on, enumerate_congruences, has_boolean_quotient,
    is_boolean_kernel, is_c_principal, ClosureBudget, EnumerationBudget, NatUniverse,
};
use crate::error::{Error, Result};
use crate::flat::{cover, shrink_pair, standard_basis, verify_chain_fast, verify_membership, GammaForm};
use crate::order::{
    canonical_generators, classify_congruence, cross_check_in, derive_integer_relation, power_relation_chain,
    quotient_semiring, verify_power_chain, CongruenceClass, OrderElement, OrderUniverse, RealOrder,
};
use crate::poly::IntPolynomial;
use crate::semiring::{
    catalog, catalog_names, make_boolean, make_minmax, random_semiring, BoolPolynomial, FiniteSemiring,
};

/// Outcome of one criterion.
#[derive(Clone, Debug, Serialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed_ms: u128,
    pub limit_ms: u128,
}

impl CriterionResult {
    /// One line for logs: `[PASS] 9 flatness witness (1234 ms / 60000 ms): …`.
    pub fn line(&self) -> String {
        format!(
            "[{}] {:>2} {} ({} ms / {} ms): {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.elapsed_ms,
            self.limit_ms,
            self.detail
        )
    }
}

/// All criteria of a suite run.
#[derive(Clone, Debug, Serialize)]
pub struct AcceptanceReport {
    pub suite: String,
    pub seed: u64,
    pub passed: bool,
    pub criteria: Vec<CriterionResult>,
}

pub const SUITES: [&str; 6] = ["lattice", "bg", "posmodel", "flatness", "bx", "all"];

/// Criterion numbers making up a suite.
pub fn suite_criteria(suite: &str) -> Result<Vec<u8>> {
    Ok(match suite {
        "lattice" => vec![1, 2, 11],
        "bg" => vec![3],
        "bx" => vec![4],
        "posmodel" => vec![5, 6, 7, 8],
        "flatness" => vec![9, 10],
        "all" => (1..=11).collect(),
        _ => return Err(Error::invalid(format!("unknown suite {suite:?}; expected one of {SUITES:?}"))),
    })
}

pub fn run_suite(suite: &str, seed: u64) -> Result<AcceptanceReport> {
    let criteria: Vec<CriterionResult> =
        suite_criteria(suite)?.into_iter().map(|id| run_criterion(id, seed)).collect::<Result<_>>()?;
    Ok(AcceptanceReport { suite: suite.into(), seed, passed: criteria.iter().all(|c| c.passed), criteria })
}

type Check = fn(u64) -> std::result::Result<String, String>;

fn table() -> [(u8, &'static str, u64, Check); 11] {
    [
        (1, "minmax principality", 5, minmax_principality),
        (2, "chain congruence counts", 10, chain_counts),
        (3, "ring iff no Boolean quotient", 30, boolean_quotients),
        (4, "B[X] bounded closure", 20, bx_closure),
        (5, "positive model classification", 60, positive_model),
        (6, "quotient structure", 5, quotients),
        (7, "integer relation", 5, integer_relations),
        (8, "power relation chains", 10, power_chains),
        (9, "flatness witness", 60, flatness),
        (10, "continued fraction convergents", 1, convergents),
        (11, "N classifier", 10, nat_classifier),
    ]
}

/// Runs one criterion. A criterion passes when its check succeeds within
/// its time limit.
pub fn run_criterion(id: u8, seed: u64) -> Result<CriterionResult> {
    let (id, name, limit, check) = table()
        .into_iter()
        .find(|c| c.0 == id)
        .ok_or_else(|| Error::invalid(format!("no acceptance criterion {id}")))?;
    let start = Instant::now();
    let outcome = check(seed);
    let elapsed = start.elapsed();
    let limit = Duration::from_secs(limit);
    let (passed, detail) = match outcome {
        Ok(d) if elapsed <= limit => (true, d),
        Ok(d) => (false, format!("over time: {d}")),
        Err(e) => (false, e),
    };
    Ok(CriterionResult { id, name, passed, detail, elapsed_ms: elapsed.as_millis(), limit_ms: limit.as_millis() })
}

fn rng_for(seed: u64, id: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ id)
}

fn err(e: Error) -> String {
    e.to_string()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

// 1 --------------------------------------------------------------------------

fn minmax_principality(_: u64) -> std::result::Result<String, String> {
    let mut out = Vec::new();
    for b in 2..=5 {
        let r = is_c_principal(&make_minmax(b).map_err(err)?, EnumerationBudget::default()).map_err(err)?;
        ensure(r.principal == (b <= 3), || format!("minmax:{b} principal = {}", r.principal))?;
        if b == 4 {
            let w = r.witness.as_ref().ok_or("no witness for minmax:4")?;
            ensure(w.partition.classes() == vec![vec![0, 1], vec![2, 3]], || {
                format!("minmax:4 witness {}", w.partition)
            })?;
            out.push(format!("minmax:4 witness {}", w.partition));
        }
    }
    Ok(format!("principal for b = 2, 3 only; {}", out.join("")))
}

// 2 --------------------------------------------------------------------------

/// All set partitions of `0..n` as label vectors.
fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        let mut next = Vec::new();
        for p in &out {
            let blocks = p.iter().max().map_or(0, |m| m + 1);
            for b in 0..=blocks {
                let mut q = p.clone();
                q.push(b);
                next.push(q);
            }
        }
        out = next;
    }
    out
}

fn compatible(s: &FiniteSemiring, labels: &[usize]) -> bool {
    let n = s.size();
    (0..n).all(|a| {
        (0..n).all(|b| {
            labels[a] != labels[b]
                || (0..n).all(|r| {
                    labels[s.add(a, r)] == labels[s.add(b, r)]
                        && labels[s.mul(a, r)] == labels[s.mul(b, r)]
                        && labels[s.mul(r, a)] == labels[s.mul(r, b)]
                })
        })
    })
}

fn chain_counts(_: u64) -> std::result::Result<String, String> {
    let mut counts = Vec::new();
    for b in 2..=5usize {
        let s = make_minmax(b).map_err(err)?;
        let lattice = enumerate_congruences(&s, EnumerationBudget::default()).map_err(err)?;
        let brute: HashSet<Vec<usize>> = set_partitions(b).into_iter().filter(|p| compatible(&s, p)).collect();
        let intervals = brute.iter().filter(|p| p.windows(2).all(|w| w[1] == w[0] || w[1] == w[0] + 1)).count();
        let found: HashSet<Vec<usize>> = lattice.entries.iter().map(|e| e.partition.labels().to_vec()).collect();
        ensure(lattice.len() == 1 << (b - 1), || format!("minmax:{b}: {} congruences", lattice.len()))?;
        ensure(found == brute, || format!("minmax:{b}: enumeration differs from brute force"))?;
        ensure(intervals == brute.len(), || format!("minmax:{b}: a congruence is not an interval partition"))?;
        counts.push(lattice.len().to_string());
    }
    Ok(format!("counts for b = 2..5: {}", counts.join(", ")))
}

// 3 --------------------------------------------------------------------------

fn boolean_quotients(seed: u64) -> std::result::Result<String, String> {
    let names = catalog_names();
    for name in &names {
        let s = catalog(name).map_err(err)?;
        check_bg(&s).map_err(|e| format!("{name}: {e}"))?;
    }
    let mut rng = rng_for(seed, 3);
    let mut rings = 0;
    for k in 0..200 {
        let s = random_semiring(&mut rng, 6);
        ensure(s.validate_axioms().is_empty(), || format!("random semiring {k} is invalid"))?;
        rings += usize::from(s.is_ring());
        check_bg(&s).map_err(|e| format!("random semiring {k} {}: {e}", s.to_json()))?;
    }
    Ok(format!("{} catalog and 200 random semirings ({rings} rings), no discrepancy", names.len()))
}

/// Ring-ness from additive inverses, Boolean quotient from exhaustive
/// search, both compared with the library.
fn check_bg(s: &FiniteSemiring) -> std::result::Result<(), String> {
    let n = s.size();
    let ring = (0..n).all(|a| (0..n).any(|b| s.add(a, b) == s.zero()));
    let kernel = (0u32..1 << n).find(|&mask| {
        let q = |x: usize| mask >> x & 1 == 1;
        q(s.zero())
            && !q(s.one())
            && (0..n).all(|a| {
                (0..n).all(|b| q(s.add(a, b)) == (q(a) && q(b)) && q(s.mul(a, b)) == (q(a) || q(b)))
            })
    });
    let report = bg_check(s);
    ensure(report.is_ring == ring, || format!("is_ring {} but inverses say {ring}", report.is_ring))?;
    ensure(report.boolean_quotient.is_some() == kernel.is_some(), || {
        format!("Boolean quotient {:?} but exhaustive search says {kernel:?}", report.boolean_quotient)
    })?;
    if let Some(q) = has_boolean_quotient(s) {
        ensure(is_boolean_kernel(s, &q), || format!("{q:?} is not a Boolean kernel"))?;
    }
    ensure(ring == kernel.is_none(), || format!("ring = {ring} but Boolean quotient = {kernel:?}"))
}

// 4 --------------------------------------------------------------------------

fn bx_closure(_: u64) -> std::result::Result<String, String> {
    let without = check_bx_nonrelation(3, 10, &[], None, ClosureBudget::default()).map_err(err)?;
    ensure(!without.related, || "X^4+1 ~ X^5+1 found without the extra generator".into())?;
    let extra = (BoolPolynomial::from_exponents([0, 4]), BoolPolynomial::from_exponents([0, 5]));
    let with = check_bx_nonrelation(3, 10, &[extra], None, ClosureBudget::default()).map_err(err)?;
    ensure(with.related, || "X^4+1 ~ X^5+1 missing with the extra generator".into())?;
    Ok(format!(
        "degree ≤ 10 ({} elements): unrelated with 6 generators ({} classes), related with 7 ({} classes)",
        without.universe_size, without.class_count, with.class_count
    ))
}

// 5 --------------------------------------------------------------------------

/// Coordinate bounds for the bounded closure, per degree.
pub const POSITIVE_MODEL_BOUNDS: [(&str, i64); 2] = [("x^2-2@1", 12), ("x^3-2@0", 8)];

fn positive_model(seed: u64) -> std::result::Result<String, String> {
    let mut rng = rng_for(seed, 5);
    let mut out = Vec::new();
    for (spec, bound) in POSITIVE_MODEL_BOUNDS {
        let order = RealOrder::from_spec(spec).map_err(err)?;
        let universe = OrderUniverse::new(&order, bound).map_err(err)?;
        let d = order.degree();
        let mut classes = [0usize; 3];
        for k in 0..100 {
            let count = rng.gen_range(1..=4);
            let pairs: Vec<(OrderElement, OrderElement)> = (0..count)
                .map(|_| {
                    let a: Vec<i64> = (0..d).map(|_| rng.gen_range(0..=5)).collect();
                    let b: Vec<i64> = (0..d).map(|_| rng.gen_range(0..=5)).collect();
                    Ok((order.element(&a)?, order.element(&b)?))
                })
                .collect::<Result<_>>()
                .map_err(err)?;
            let c = classify_congruence(&order, &pairs, None).map_err(err)?;
            let canonical = canonical_generators(&order, &c.class, None);
            let report = cross_check_in(&order, &universe, &pairs, &c.class, &canonical, ClosureBudget::default())
                .map_err(|e| format!("{spec} sample {k}: {e}"))?;
            ensure(report.canonical_reachable, || {
                let shown: Vec<String> = pairs.iter().map(|(a, b)| format!("{a}~{b}")).collect();
                format!("{spec} sample {k} ({}): canonical generators not reached", shown.join("; "))
            })?;
            classes[c.class.j().map_or(2, usize::from)] += 1;
        }
        out.push(format!(
            "{spec} box {bound} ({} elements): j=0 {}, j=1 {}, trivial {}",
            universe.size(),
            classes[0],
            classes[1],
            classes[2]
        ));
    }
    Ok(out.join("; "))
}

// 6 --------------------------------------------------------------------------

fn quotients(_: u64) -> std::result::Result<String, String> {
    let order = RealOrder::from_spec("x^2-2@1").map_err(err)?;
    let mut out = Vec::new();
    for (text, a, b) in [("w", 0i64, 1i64), ("2", 2, 0), ("1+w", 1, 1), ("3", 3, 0)] {
        let norm = (a * a - 2 * b * b).unsigned_abs() as usize;
        let ideal = order.ideal(&[order.parse(text).map_err(err)?]).map_err(err)?;
        ensure(ideal.determinant().abs() == BigInt::from(norm), || {
            format!("({text}): determinant {} but norm {norm}", ideal.determinant())
        })?;
        for j in [0u8, 1] {
            let q = quotient_semiring(&order, &CongruenceClass::Ideal { ideal: ideal.clone(), j }).map_err(err)?;
            let expected = norm + usize::from(j);
            ensure(q.size == expected && q.semiring.size() == expected, || {
                format!("({text}), j={j}: {} elements, expected {expected}", q.size)
            })?;
            let bad = q.semiring.validate_axioms();
            ensure(bad.is_empty(), || format!("({text}), j={j}: axiom failure {:?}", bad[0]))?;
        }
        out.push(format!("({text}) {norm}/{}", norm + 1));
    }
    Ok(format!("sizes j=0/j=1: {}", out.join(", ")))
}

// 7 --------------------------------------------------------------------------

fn horner(order: &RealOrder, p: &IntPolynomial, u: &OrderElement) -> OrderElement {
    let mut acc = order.zero();
    for c in p.coefficients().iter().rev() {
        acc = order.mul(&acc, u);
        acc = order.add(&acc, &order.from_big_int(c));
    }
    acc
}

fn random_positive(order: &RealOrder, rng: &mut ChaCha8Rng, range: i64) -> OrderElement {
    loop {
        let c: Vec<i64> = (0..order.degree()).map(|_| rng.gen_range(-range..=range)).collect();
        let x = order.element(&c).expect("degree");
        if order.sign(&x) > 0 {
            return x;
        }
    }
}

fn integer_relations(seed: u64) -> std::result::Result<String, String> {
    let q2 = RealOrder::from_spec("x^2-2@1").map_err(err)?;
    let w = q2.theta();
    let r = derive_integer_relation(&q2, &w, &w).map_err(err)?;
    ensure(r.f == "x" && r.g == "0", || format!("f = {}, g = {}", r.f, r.g))?;
    ensure(r.l == 2.into() && r.m == 3.into() && r.n == 5.into(), || {
        format!("l = {}, m = {}, n = {}", r.l, r.m, r.n)
    })?;
    let mut rng = rng_for(seed, 7);
    let mut checked = 0;
    for spec in ["x^2-2@1", "x^3-2@0"] {
        let order = RealOrder::from_spec(spec).map_err(err)?;
        for _ in 0..20 {
            let u = random_positive(&order, &mut rng, 5);
            let a = random_positive(&order, &mut rng, 5);
            let r = derive_integer_relation(&order, &a, &u).map_err(err)?;
            let lhs = order.mul(&u, &horner(&order, &r.f_poly, &u));
            let rhs = order.add(&order.mul(&u, &horner(&order, &r.g_poly, &u)), &order.from_big_int(&r.l));
            ensure(lhs == rhs, || format!("{spec}: u·f(u) ≠ u·g(u) + l for u = {u}"))?;
            let nonneg = |p: &IntPolynomial| p.coefficients().iter().all(|c| !c.is_negative());
            ensure(nonneg(&r.f_poly) && nonneg(&r.g_poly) && r.l.is_positive(), || {
                format!("{spec}: f, g or l has the wrong sign for u = {u}")
            })?;
            ensure(&r.n - &r.m == r.l, || format!("{spec}: n − m ≠ l"))?;
            checked += 1;
        }
    }
    Ok(format!("√2: f=x, g=0, l=2, (m,n)=(3,5); identity holds for {checked} random u"))
}

// 8 --------------------------------------------------------------------------

fn power_chains(seed: u64) -> std::result::Result<String, String> {
    let mut rng = rng_for(seed, 8);
    let names = catalog_names();
    let mut transcripts = 0;
    for _ in 0..20 {
        let name = &names[rng.gen_range(0..names.len())];
        let s = catalog(name).map_err(err)?;
        let (x, y) = (rng.gen_range(0..s.size()), rng.gen_range(0..s.size()));
        for n in 1..=5 {
            let chain = power_relation_chain(&s, &x, &y, n).map_err(err)?;
            verify_power_chain(&s, &chain).map_err(|e| format!("{name}, x={x}, y={y}, n={n}: {e}"))?;
            transcripts += 1;
        }
    }
    let boolean = make_boolean();
    verify_power_chain(&boolean, &power_relation_chain(&boolean, &1, &1, 5).map_err(err)?)?;
    for spec in ["x^2-2@1", "x^3-2@0"] {
        let order = RealOrder::from_spec(spec).map_err(err)?;
        for _ in 0..20 {
            let x = random_positive(&order, &mut rng, 3);
            let y = random_positive(&order, &mut rng, 3);
            for n in 1..=5 {
                let chain = power_relation_chain(&*order, &x, &y, n).map_err(err)?;
                verify_power_chain(&*order, &chain).map_err(|e| format!("{spec}, x={x}, y={y}, n={n}: {e}"))?;
                transcripts += 1;
            }
        }
    }
    Ok(format!("{transcripts} transcripts verified"))
}

// 9 --------------------------------------------------------------------------

fn flatness(seed: u64) -> std::result::Result<String, String> {
    let mut rng = rng_for(seed, 9);
    let mut out = Vec::new();
    for (spec, n) in [("x^2-2@1", 2usize), ("x^3-2@0", 3)] {
        let field = spec.parse::<FieldSpec>().map_err(err)?.build().map_err(err)?;
        let g = GammaForm::powers(&field, n).map_err(err)?;
        let (mut steps, mut certs) = (0, 0);
        for k in 0..50 {
            let count = rng.gen_range(1..=5);
            let mut targets = Vec::new();
            while targets.len() < count {
                let v: Vec<BigInt> = (0..n).map(|_| BigInt::from(rng.gen_range(-5..=5))).collect();
                if g.sign(&v).map_err(err)? >= 0 {
                    targets.push(v);
                }
            }
            let c = cover(&g, &standard_basis(n), &targets).map_err(|e| format!("n={n} set {k}: {e}"))?;
            verify_chain_fast(&g, &c.chain).map_err(|e| format!("n={n} set {k}: {e}"))?;
            for cert in &c.certificates {
                verify_membership(&g, &c.chain.result, cert).map_err(|e| format!("n={n} set {k}: {e}"))?;
            }
            steps += c.chain.steps.len();
            certs += c.certificates.len();
        }
        out.push(format!("n={n}: 50 sets, {certs} certificates, {steps} steps"));
    }
    Ok(format!("{}; all verified", out.join("; ")))
}

// 10 -------------------------------------------------------------------------

fn convergents(_: u64) -> std::result::Result<String, String> {
    // √2 = [1; 2, 2, …]: p_k = a_k p_{k-1} + p_{k-2}, likewise q.
    // Pairs hold (x_{k-2}, x_{k-1}), starting from p = (0, 1), q = (1, 0).
    let (mut p, mut q) = ((0i64, 1i64), (1i64, 0i64));
    let mut classical = Vec::new();
    for k in 0..4 {
        let a = if k == 0 { 1 } else { 2 };
        let next = (a * p.1 + p.0, a * q.1 + q.0);
        p = (p.1, next.0);
        q = (q.1, next.1);
        classical.push((p.1, q.1));
    }
    let field = "x^2-2@1".parse::<FieldSpec>().map_err(err)?.build().map_err(err)?;
    let g = GammaForm::powers(&field, 2).map_err(err)?;
    let delta = crate::algebraic::FieldElement::from_rational(
        &field,
        num_rational::BigRational::new(1.into(), 5.into()),
    );
    let r = shrink_pair(&g, &[1.into(), 0.into()], &[0.into(), 1.into()], &delta).map_err(err)?;
    let expect: Vec<Vec<BigInt>> = vec![vec![3.into(), (-2).into()], vec![(-7).into(), 5.into()]];
    ensure(r.pair == expect, || format!("final pair {:?}", r.pair))?;
    // Each round introduces one new vector ±(p, −q).
    let mut seen: Vec<(i64, i64)> = Vec::new();
    let mut prev = vec![vec![BigInt::from(1), BigInt::zero()], vec![BigInt::zero(), BigInt::from(1)]];
    for pair in &r.trajectory {
        let fresh = pair.iter().find(|v| !prev.contains(v)).ok_or("round without a new vector")?;
        let a: i64 = (&fresh[0]).try_into().map_err(|_| "overflow")?;
        let b: i64 = (&fresh[1]).try_into().map_err(|_| "overflow")?;
        ensure(a.signum() == -b.signum(), || format!("{fresh:?} is not of the form ±(p, −q)"))?;
        seen.push((a.abs(), b.abs()));
        prev = pair.clone();
    }
    ensure(seen == classical[..seen.len()] && seen.len() == 3, || {
        format!("trajectory {seen:?} against convergents {classical:?}")
    })?;
    Ok(format!("trajectory convergents {seen:?} match p/q of √2"))
}

// 11 -------------------------------------------------------------------------

fn nat_classifier(seed: u64) -> std::result::Result<String, String> {
    let mut rng = rng_for(seed, 11);
    let universe = NatUniverse::new(60);
    let mut tails = 0;
    for k in 0..100 {
        let count = rng.gen_range(1..=3);
        let pairs: Vec<(u64, u64)> = (0..count).map(|_| (rng.gen_range(0..=12), rng.gen_range(0..=12))).collect();
        let c = classify_nat_congruence(&pairs).map_err(err)?.congruence;
        let gens: Vec<(usize, usize)> = pairs.iter().map(|&(a, b)| (a as usize, b as usize)).collect();
        let p = closure_on(&universe, &gens, ClosureBudget::default()).map_err(err)?.partition;
        for x in 0..=60u64 {
            for y in x + 1..=60 {
                ensure(p.related(x as usize, y as usize) == c.relates(x, y), || {
                    format!("set {k} {pairs:?}: {c:?} and bounded closure disagree on ({x}, {y})")
                })?;
            }
        }
        tails += usize::from(c != crate::congruence::NatCongruence::Trivial);
    }
    Ok(format!("100 generator sets ({tails} nontrivial) agree on 0..=60"))
}
