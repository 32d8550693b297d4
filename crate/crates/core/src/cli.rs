//! Command line front end. `semicong <group> <command> …` prints a report,
//! human readable by default or JSON with `--json`.
//!
//! Exit codes: 0 success, 2 invalid input, 3 budget exhausted, 1 failed
//! consistency check or failed acceptance criterion.

use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::acceptance::run_suite;
use crate::algebraic::FieldSpec;
use crate::congruence::{
    bg_check, check_bx_nonrelation, classify_nat_congruence, enumerate_congruences, is_c_principal, ClosureBudget,
    EnumerationBudget,
};
use crate::error::{Error, Result};
use crate::flat::{
    cover_with_budget, format_vector, parse_vector, parse_vectors, search_span_refinement, standard_basis,
    verify_chain_fast, verify_membership, Cover, GammaForm, DEFAULT_MAX_STEPS,
};
use crate::order::{
    classify_congruence, derive_integer_relation, find_small_generators, is_related, k_ideal_of, quotient_semiring,
    verify_integer_relation, CongruenceClass, CrossCheck, RealOrder,
};
use crate::semiring::{load, BoolPolynomial, FiniteSemiring};

#[derive(Debug, Parser)]
#[command(name = "semicong", version, about = "Congruences of semirings and positive cones of real orders")]
pub struct Cli {
    /// Print the report as JSON.
    #[arg(long, global = true)]
    pub json: bool,
    /// Seed for randomized commands.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Step budget for closures and refinement chains.
    #[arg(long, global = true)]
    pub budget: Option<usize>,
    /// Degree bound for 𝔹[X] closures.
    #[arg(long, global = true)]
    pub degree_bound: Option<u32>,
    /// Coordinate bound for bounded universes and searches.
    #[arg(long, global = true)]
    pub coord_bound: Option<i64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Finite semirings given by catalog name or JSON table file.
    #[command(subcommand)]
    Semiring(SemiringCmd),
    /// Congruences of ℕ.
    #[command(subcommand)]
    Nat(NatCmd),
    /// Bounded closure in 𝔹[X].
    #[command(subcommand)]
    Bx(BxCmd),
    /// Positive parts of monogenic real orders.
    #[command(subcommand)]
    Order(OrderCmd),
    /// Refinement chains and ℕ-span certificates.
    #[command(subcommand)]
    Flat(FlatCmd),
    /// Runs an acceptance suite: lattice, bg, posmodel, flatness, bx or all.
    Acceptance { suite: String, seed: Option<u64> },
}

#[derive(Debug, Subcommand)]
pub enum SemiringCmd {
    /// Checks the semiring axioms.
    Validate { semiring: String },
    /// Lists every congruence.
    Enumerate { semiring: String },
    /// Decides whether every congruence is principal.
    CPrincipal { semiring: String },
    /// Compares ring-ness with the existence of a Boolean quotient.
    BgCheck { semiring: String },
}

#[derive(Debug, Subcommand)]
pub enum NatCmd {
    /// Classifies the congruence generated by pairs like `2~5;3~9`.
    Classify {
        #[arg(long)]
        pairs: String,
    },
}

#[derive(Debug, Subcommand)]
pub enum BxCmd {
    /// Closure of `X^i+1 ~ X^j+1` (1 ≤ i < j ≤ n) plus extra pairs.
    Check {
        #[arg(long, default_value_t = 3)]
        n: u32,
        /// Extra generators, e.g. `X^4+1~X^5+1`.
        #[arg(long)]
        extra: Option<String>,
        /// Query pair; defaults to `X^(n+1)+1 ~ X^(n+2)+1`.
        #[arg(long)]
        query: Option<String>,
    },
}

#[derive(Debug, Args)]
pub struct FieldArg {
    /// Minimal polynomial and real root index, e.g. `x^2-2@1`.
    #[arg(long)]
    pub field: Option<String>,
    /// JSON problem file supplying any of `field`, `pairs`, `ideal`, `j`,
    /// `x`, `y`, `a`, `u`, `contains`. Flags take precedence.
    #[arg(long)]
    pub problem: Option<String>,
}

/// JSON problem file for the `order` commands. Elements are strings in
/// the `w` notation; lists are `;`-separated strings or arrays.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrderProblem {
    pub field: Option<String>,
    #[serde(default, deserialize_with = "de_list")]
    pub pairs: Option<String>,
    #[serde(default, deserialize_with = "de_list")]
    pub ideal: Option<String>,
    pub j: Option<u8>,
    pub x: Option<String>,
    pub y: Option<String>,
    pub a: Option<String>,
    pub u: Option<String>,
    #[serde(default, deserialize_with = "de_list")]
    pub contains: Option<String>,
}

fn de_list<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Option<String>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum List {
        One(String),
        Many(Vec<String>),
    }
    Ok(Option::<List>::deserialize(d)?.map(|l| match l {
        List::One(s) => s,
        List::Many(v) => v.join(";"),
    }))
}

#[derive(Debug, Subcommand)]
pub enum OrderCmd {
    /// Classifies the congruence on S generated by pairs like `w~1+w`.
    Classify {
        #[command(flatten)]
        field: FieldArg,
        #[arg(long)]
        pairs: Option<String>,
        /// Skip the bounded closure cross-check.
        #[arg(long)]
        no_cross_check: bool,
    },
    /// The finite quotient for an ideal and j ∈ {0, 1}.
    Quotient {
        #[command(flatten)]
        field: FieldArg,
        /// Ideal generators separated by `;`.
        #[arg(long)]
        ideal: Option<String>,
        /// 0 or 1; defaults to 0.
        #[arg(long)]
        j: Option<u8>,
    },
    /// Whether x ~ y under the congruence given by an ideal and j.
    Related {
        #[command(flatten)]
        field: FieldArg,
        #[arg(long)]
        ideal: Option<String>,
        /// 0 or 1; defaults to 0.
        #[arg(long)]
        j: Option<u8>,
        #[arg(long)]
        x: Option<String>,
        #[arg(long)]
        y: Option<String>,
    },
    /// `u·f(u) = u·g(u) + l` and the integers m, n for `a ~ a+u`.
    IntegerRelation {
        #[command(flatten)]
        field: FieldArg,
        #[arg(long)]
        a: Option<String>,
        #[arg(long)]
        u: Option<String>,
    },
    /// The k-ideal I ∩ S and its generators.
    KIdeal {
        #[command(flatten)]
        field: FieldArg,
        #[arg(long)]
        ideal: Option<String>,
        /// Elements to test for membership, separated by `;`.
        #[arg(long)]
        contains: Option<String>,
    },
}

#[derive(Debug, Args)]
pub struct GammaArgs {
    #[arg(long)]
    pub field: Option<String>,
    /// γ as field elements separated by `;`, e.g. `1;w`.
    #[arg(long)]
    pub gamma: Option<String>,
    /// JSON problem file with `field`, `gamma` and optionally `start` and
    /// `targets`.
    #[arg(long)]
    pub problem: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum FlatCmd {
    /// Refines a nice collection until every target is in its ℕ-span.
    Cover {
        #[command(flatten)]
        gamma: GammaArgs,
        /// Targets like `-1,1`, separated by `;` or given repeatedly.
        #[arg(long, allow_hyphen_values = true)]
        target: Vec<String>,
        /// Start collection; defaults to the standard basis.
        #[arg(long, allow_hyphen_values = true)]
        start: Option<String>,
    },
    /// Replays the chain and certificates of a `flat cover --json` report.
    Verify { report: String },
    /// Looks for pairs with ℕ-span containment but no refinement.
    Search {
        #[command(flatten)]
        gamma: GammaArgs,
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
}

/// JSON problem file for the `flat` commands. Vectors are strings like
/// `"-1,1"`.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlatProblem {
    pub field: String,
    pub gamma: Vec<String>,
    #[serde(default)]
    pub start: Option<Vec<String>>,
    #[serde(default)]
    pub targets: Vec<String>,
}

/// What every command prints.
#[derive(Debug, Serialize)]
pub struct RunReport {
    pub command: String,
    pub inputs_digest: String,
    pub seed: u64,
    pub result: Value,
    /// Outcomes of independent checks embedded in the result.
    pub verification: Value,
    pub elapsed_ms: u128,
}

struct Outcome {
    result: Value,
    verification: Value,
    text: String,
    /// Success flag for commands whose answer is itself a verdict on a
    /// check (acceptance, verify).
    ok: bool,
}

impl Outcome {
    fn new(result: Value, text: String) -> Self {
        Outcome { result, verification: Value::Null, text, ok: true }
    }
}

/// Parses the arguments, runs the command, prints the report and returns
/// the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args: Vec<std::ffi::OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let words: Vec<String> = args.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    match run(&cli, &words) {
        Ok((report, text, ok)) => {
            if cli.json {
                emit(&serde_json::to_string_pretty(&report).expect("report serializes"));
            } else {
                emit(&text);
            }
            if ok {
                0
            } else {
                1
            }
        }
        Err(e) => {
            if cli.json {
                let v = json!({ "error": e.to_string(), "exit_code": e.exit_code() });
                emit(&serde_json::to_string_pretty(&v).expect("error serializes"));
            } else {
                eprintln!("error: {e}");
            }
            e.exit_code()
        }
    }
}

/// Writes to stdout, ignoring a closed pipe.
fn emit(text: &str) {
    use std::io::Write;
    let _ = writeln!(std::io::stdout(), "{text}");
}

/// Runs a parsed command line. `words` are the raw arguments, used for the
/// report's command string and input digest.
pub fn run(cli: &Cli, words: &[String]) -> Result<(RunReport, String, bool)> {
    let start = Instant::now();
    let outcome = dispatch(cli)?;
    let command: Vec<&str> = words.iter().map(String::as_str).filter(|w| *w != "--json").collect();
    let command = command.join(" ");
    let mut hasher = Sha256::new();
    hasher.update(command.as_bytes());
    for path in file_inputs(&cli.command) {
        if let Ok(bytes) = std::fs::read(&path) {
            hasher.update(&bytes);
        }
    }
    let inputs_digest: String = hasher.finalize().iter().map(|b| format!("{b:02x}")).collect();
    let report = RunReport {
        command,
        inputs_digest,
        seed: cli.seed,
        result: outcome.result,
        verification: outcome.verification,
        elapsed_ms: start.elapsed().as_millis(),
    };
    Ok((report, outcome.text, outcome.ok))
}

fn file_inputs(c: &Command) -> Vec<String> {
    match c {
        Command::Semiring(
            SemiringCmd::Validate { semiring }
            | SemiringCmd::Enumerate { semiring }
            | SemiringCmd::CPrincipal { semiring }
            | SemiringCmd::BgCheck { semiring },
        ) => vec![semiring.clone()],
        Command::Flat(FlatCmd::Verify { report }) => vec![report.clone()],
        Command::Order(
            OrderCmd::Classify { field, .. }
            | OrderCmd::Quotient { field, .. }
            | OrderCmd::Related { field, .. }
            | OrderCmd::IntegerRelation { field, .. }
            | OrderCmd::KIdeal { field, .. },
        ) => field.problem.iter().cloned().collect(),
        Command::Flat(FlatCmd::Cover { gamma, .. } | FlatCmd::Search { gamma, .. }) => {
            gamma.problem.iter().cloned().collect()
        }
        _ => Vec::new(),
    }
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

fn closure_budget(cli: &Cli) -> ClosureBudget {
    cli.budget.map_or_else(ClosureBudget::default, ClosureBudget::steps)
}

fn dispatch(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Semiring(c) => semiring_cmd(c),
        Command::Nat(NatCmd::Classify { pairs }) => nat_classify(pairs),
        Command::Bx(BxCmd::Check { n, extra, query }) => bx_check(cli, *n, extra.as_deref(), query.as_deref()),
        Command::Order(c) => order_cmd(cli, c),
        Command::Flat(c) => flat_cmd(cli, c),
        Command::Acceptance { suite, seed } => {
            let report = run_suite(suite, seed.unwrap_or(cli.seed))?;
            let text: Vec<String> = report.criteria.iter().map(|c| c.line()).collect();
            let verification = json!({ "passed": report.passed });
            Ok(Outcome { ok: report.passed, result: to_value(&report), verification, text: text.join("\n") })
        }
    }
}

fn table_text(s: &FiniteSemiring) -> String {
    let n = s.size();
    let width = (0..n).map(|x| s.label(x).chars().count()).max().unwrap_or(1);
    let mut out = String::new();
    for (name, op) in [("+", FiniteSemiring::add as fn(&FiniteSemiring, usize, usize) -> usize), ("·", FiniteSemiring::mul)]
    {
        out.push_str(&format!("{name:>width$} |"));
        for b in 0..n {
            out.push_str(&format!(" {:>width$}", s.label(b)));
        }
        out.push('\n');
        for a in 0..n {
            out.push_str(&format!("{:>width$} |", s.label(a)));
            for b in 0..n {
                out.push_str(&format!(" {:>width$}", s.label(op(s, a, b))));
            }
            out.push('\n');
        }
    }
    out
}

fn semiring_cmd(c: &SemiringCmd) -> Result<Outcome> {
    match c {
        SemiringCmd::Validate { semiring } => {
            let s = load(semiring)?;
            let violations = s.validate_axioms();
            let text = if violations.is_empty() {
                format!("{semiring}: {} elements, all axioms hold\n{}", s.size(), table_text(&s))
            } else {
                let lines: Vec<String> = violations.iter().map(|v| format!("  {v:?}")).collect();
                format!("{semiring}: {} violations\n{}", violations.len(), lines.join("\n"))
            };
            let result = json!({
                "semiring": semiring,
                "size": s.size(),
                "valid": violations.is_empty(),
                "violations": to_value(&violations),
                "tables": to_value(&s.to_tables()),
            });
            Ok(Outcome::new(result, text))
        }
        SemiringCmd::Enumerate { semiring } => {
            let s = load(semiring)?;
            s.ensure_valid()?;
            let lattice = enumerate_congruences(&s, EnumerationBudget::default())?;
            let mut lines = vec![format!("{semiring}: {} congruences", lattice.len())];
            for e in &lattice.entries {
                let gens: Vec<String> = e.generators.iter().map(|(a, b)| format!("{}~{}", s.label(*a), s.label(*b))).collect();
                let kind = if e.principal { "principal" } else { "not principal" };
                lines.push(format!("  {}  generated by {}  ({kind})", e.partition, gens.join(", ")));
            }
            Ok(Outcome::new(to_value(&lattice), lines.join("\n")))
        }
        SemiringCmd::CPrincipal { semiring } => {
            let s = load(semiring)?;
            s.ensure_valid()?;
            let r = is_c_principal(&s, EnumerationBudget::default())?;
            let text = match &r.witness {
                None => format!("{semiring}: c-principal ({} congruences, each generated by one pair)", r.congruence_count),
                Some(w) => format!(
                    "{semiring}: not c-principal; {} needs {} generators",
                    w.partition,
                    w.generators.len()
                ),
            };
            Ok(Outcome::new(to_value(&r), text))
        }
        SemiringCmd::BgCheck { semiring } => {
            let s = load(semiring)?;
            s.ensure_valid()?;
            let r = bg_check(&s);
            if !r.consistent {
                return Err(Error::Consistency(format!("{semiring}: is_ring = {} but Boolean quotient {:?}", r.is_ring, r.boolean_quotient)));
            }
            let text = match &r.boolean_quotient {
                None => format!("{semiring}: ring, no Boolean quotient"),
                Some(q) => format!("{semiring}: not a ring; kernel of a map onto 𝔹: {q:?}"),
            };
            let mut o = Outcome::new(to_value(&r), text);
            o.verification = json!({ "consistent": r.consistent });
            Ok(o)
        }
    }
}

fn split_pairs(s: &str) -> Result<Vec<(String, String)>> {
    s.split(';')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            let (a, b) = p.split_once('~').ok_or_else(|| Error::invalid(format!("pair {p:?} needs '~'")))?;
            Ok((a.trim().to_string(), b.trim().to_string()))
        })
        .collect()
}

fn nat_classify(pairs: &str) -> Result<Outcome> {
    let parsed: Vec<(u64, u64)> = split_pairs(pairs)?
        .into_iter()
        .map(|(a, b)| {
            let n = |x: &str| x.parse::<u64>().map_err(|_| Error::invalid(format!("{x:?} is not a natural number")));
            Ok((n(&a)?, n(&b)?))
        })
        .collect::<Result<_>>()?;
    let c = classify_nat_congruence(&parsed)?;
    let text = match c.congruence {
        crate::congruence::NatCongruence::Trivial => "trivial congruence".to_string(),
        crate::congruence::NatCongruence::Tail { n, k } => {
            format!("x ~ y iff x = y or x, y ≥ {n} and x ≡ y mod {k} (confirmed by closure on 0..={})", c.universe_bound)
        }
    };
    let mut o = Outcome::new(to_value(&c), text);
    o.verification = json!({ "bounded_closure_agrees": true, "window": c.checked_window });
    Ok(o)
}

fn bx_check(cli: &Cli, n: u32, extra: Option<&str>, query: Option<&str>) -> Result<Outcome> {
    let poly_pairs = |s: &str| -> Result<Vec<(BoolPolynomial, BoolPolynomial)>> {
        split_pairs(s)?.into_iter().map(|(a, b)| Ok((a.parse()?, b.parse()?))).collect()
    };
    let extra = extra.map(poly_pairs).transpose()?.unwrap_or_default();
    let query = match query.map(poly_pairs).transpose()? {
        Some(q) if q.len() == 1 => Some(q[0].clone()),
        Some(_) => return Err(Error::invalid("query must be a single pair")),
        None => None,
    };
    let r = check_bx_nonrelation(n, cli.degree_bound.unwrap_or(10), &extra, query, closure_budget(cli))?;
    let text = format!(
        "{} ~ {}: {} by bounded closure on degree ≤ {} ({} elements, {} classes)\n{}",
        r.query.0,
        r.query.1,
        if r.related { "related" } else { "not related" },
        r.degree_bound,
        r.universe_size,
        r.class_count,
        r.note
    );
    Ok(Outcome::new(to_value(&r), text))
}

fn order_problem(f: &FieldArg) -> Result<OrderProblem> {
    let Some(path) = &f.problem else { return Ok(OrderProblem::default()) };
    let text = std::fs::read_to_string(path).map_err(|e| Error::invalid(format!("cannot read {path}: {e}")))?;
    serde_json::from_str(&text).map_err(|e| Error::invalid(format!("bad problem file {path}: {e}")))
}

/// The flag if given, else the problem file's field.
fn pick(flag: &Option<String>, file: &Option<String>, name: &str) -> Result<String> {
    flag.clone().or_else(|| file.clone()).ok_or_else(|| Error::invalid(format!("--{name} is required")))
}

fn order_of(f: &FieldArg, p: &OrderProblem) -> Result<std::sync::Arc<RealOrder>> {
    RealOrder::from_spec(&pick(&f.field, &p.field, "field")?)
}

fn class_of(order: &RealOrder, ideal: &str, j: u8) -> Result<CongruenceClass> {
    if j > 1 {
        return Err(Error::invalid("j must be 0 or 1"));
    }
    let ideal = order.ideal(&order.parse_elements(ideal)?)?;
    Ok(CongruenceClass::Ideal { ideal, j })
}

fn order_cmd(cli: &Cli, c: &OrderCmd) -> Result<Outcome> {
    match c {
        OrderCmd::Classify { field, pairs, no_cross_check } => {
            let p = order_problem(field)?;
            let order = order_of(field, &p)?;
            let pairs = order.parse_pairs(&pick(pairs, &p.pairs, "pairs")?)?;
            let cross = (!no_cross_check).then(|| {
                let mut cfg = CrossCheck::default_for(order.degree());
                if let Some(b) = cli.coord_bound {
                    cfg.coord_bound = b;
                }
                cfg.budget = closure_budget(cli);
                cfg
            });
            let r = classify_congruence(&order, &pairs, cross)?;
            let mut text = match &r.class {
                CongruenceClass::Trivial => "trivial congruence".to_string(),
                CongruenceClass::Ideal { ideal, j } => format!(
                    "C_{j}(I) with I of index {} (HNF {:?})",
                    ideal.determinant(),
                    ideal.hnf().iter().map(|r| r.iter().map(ToString::to_string).collect::<Vec<_>>()).collect::<Vec<_>>()
                ),
            };
            let gens: Vec<String> = r.canonical_generators.iter().map(|(a, b)| format!("{a}~{b}")).collect();
            text.push_str(&format!("\ncanonical generators: {}", gens.join(", ")));
            let mut verification = Value::Null;
            if let Some(x) = &r.cross_check {
                text.push_str(&format!(
                    "\nbounded closure on box {} ({} elements): sound, canonical generators {}",
                    x.coord_bound,
                    x.universe_size,
                    if x.canonical_reachable { "reached" } else { "not all reached" }
                ));
                verification = json!({ "sound": x.sound, "canonical_reachable": x.canonical_reachable });
            }
            let mut o = Outcome::new(to_value(&r), text);
            o.verification = verification;
            Ok(o)
        }
        OrderCmd::Quotient { field, ideal, j } => {
            let p = order_problem(field)?;
            let order = order_of(field, &p)?;
            let class = class_of(&order, &pick(ideal, &p.ideal, "ideal")?, j.or(p.j).unwrap_or(0))?;
            let q = quotient_semiring(&order, &class)?;
            let violations = q.semiring.validate_axioms();
            let reps: Vec<String> = q.representatives.iter().map(ToString::to_string).collect();
            let text = format!(
                "{} elements (|R/I| = {}, invariants {:?}); representatives {}\n{}",
                q.size,
                q.determinant,
                q.smith_invariants.iter().map(ToString::to_string).collect::<Vec<_>>(),
                reps.join(", "),
                table_text(&q.semiring)
            );
            let mut result = to_value(&q);
            result["tables"] = to_value(&q.semiring.to_tables());
            let mut o = Outcome::new(result, text);
            o.verification = json!({ "axioms_hold": violations.is_empty() });
            if !violations.is_empty() {
                return Err(Error::Consistency(format!("quotient table fails {:?}", violations[0])));
            }
            Ok(o)
        }
        OrderCmd::Related { field, ideal, j, x, y } => {
            let p = order_problem(field)?;
            let order = order_of(field, &p)?;
            let class = class_of(&order, &pick(ideal, &p.ideal, "ideal")?, j.or(p.j).unwrap_or(0))?;
            let (x, y) = (order.parse(&pick(x, &p.x, "x")?)?, order.parse(&pick(y, &p.y, "y")?)?);
            let related = is_related(&order, &class, &x, &y)?;
            let text = format!("{x} {} {y}", if related { "~" } else { "≁" });
            Ok(Outcome::new(json!({ "x": x.to_string(), "y": y.to_string(), "related": related }), text))
        }
        OrderCmd::IntegerRelation { field, a, u } => {
            let p = order_problem(field)?;
            let order = order_of(field, &p)?;
            let (a, u) = (order.parse(&pick(a, &p.a, "a")?)?, order.parse(&pick(u, &p.u, "u")?)?);
            let r = derive_integer_relation(&order, &a, &u)?;
            let ok = verify_integer_relation(&order, &a, &u, &r);
            if !ok {
                return Err(Error::Consistency("integer relation fails its independent check".into()));
            }
            let text = format!(
                "minimal polynomial {}; u·f(u) = u·g(u) + l with f = {}, g = {}, l = {}; so {} ~ {}",
                r.minimal_polynomial, r.f, r.g, r.l, r.m, r.n
            );
            let mut o = Outcome::new(to_value(&r), text);
            o.verification = json!({ "identity_holds": ok });
            Ok(o)
        }
        OrderCmd::KIdeal { field, ideal, contains } => {
            let p = order_problem(field)?;
            let order = order_of(field, &p)?;
            let lattice = order.ideal(&order.parse_elements(&pick(ideal, &p.ideal, "ideal")?)?)?;
            let contains = contains.clone().or(p.contains);
            let k = k_ideal_of(&order, &lattice);
            let small = find_small_generators(&order, &lattice, cli.coord_bound.unwrap_or(4));
            let members: Vec<(String, bool)> = match &contains {
                Some(s) => order.parse_elements(s)?.iter().map(|x| (x.to_string(), k.contains(&order, x))).collect(),
                None => Vec::new(),
            };
            let gens: Vec<String> = k.generators.iter().map(ToString::to_string).collect();
            let mut text = format!("I ∩ S generated as a k-ideal by {}; index {}", gens.join(", "), lattice.determinant());
            if let Some(sg) = &small {
                let s: Vec<String> = sg.iter().map(ToString::to_string).collect();
                text.push_str(&format!("\nsmall generators: {}", s.join(", ")));
            }
            for (x, m) in &members {
                text.push_str(&format!("\n{x} {} I ∩ S", if *m { "∈" } else { "∉" }));
            }
            let result = json!({
                "k_ideal": to_value(&k),
                "index": lattice.determinant().to_string(),
                "small_generators": small.map(|v| v.iter().map(ToString::to_string).collect::<Vec<_>>()),
                "membership": members,
            });
            Ok(Outcome::new(result, text))
        }
    }
}

struct FlatInput {
    field: String,
    gamma_text: Vec<String>,
    gamma: GammaForm,
    start: Option<Vec<crate::flat::LatticeVector>>,
    targets: Vec<crate::flat::LatticeVector>,
}

fn flat_input(g: &GammaArgs) -> Result<FlatInput> {
    let (field, gamma_text, start, targets) = match &g.problem {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::invalid(format!("cannot read {path}: {e}")))?;
            let p: FlatProblem =
                serde_json::from_str(&text).map_err(|e| Error::invalid(format!("bad problem file {path}: {e}")))?;
            let start = p.start.map(|v| v.iter().map(|s| parse_vector(s)).collect::<Result<Vec<_>>>()).transpose()?;
            let targets = p.targets.iter().map(|s| parse_vector(s)).collect::<Result<Vec<_>>>()?;
            (p.field, p.gamma, start, targets)
        }
        None => {
            let field = g.field.clone().ok_or_else(|| Error::invalid("--field or --problem is required"))?;
            let gamma = g.gamma.clone().ok_or_else(|| Error::invalid("--gamma or --problem is required"))?;
            (field, gamma.split(';').map(|s| s.trim().to_string()).collect(), None, Vec::new())
        }
    };
    let f = field.parse::<FieldSpec>()?.build()?;
    let gamma = GammaForm::parse(&f, &gamma_text.join(";"))?;
    Ok(FlatInput { field, gamma_text, gamma, start, targets })
}

fn flat_cmd(cli: &Cli, c: &FlatCmd) -> Result<Outcome> {
    match c {
        FlatCmd::Cover { gamma, target, start } => {
            let mut input = flat_input(gamma)?;
            for t in target {
                input.targets.extend(parse_vectors(t)?);
            }
            if let Some(s) = start {
                input.start = Some(parse_vectors(s)?);
            }
            if input.targets.is_empty() {
                return Err(Error::invalid("no targets given"));
            }
            let g = &input.gamma;
            if !g.is_independent() {
                return Err(Error::invalid("γ has ℚ-linearly dependent coordinates"));
            }
            let w = input.start.clone().unwrap_or_else(|| standard_basis(g.dim()));
            let cover = cover_with_budget(g, &w, &input.targets, cli.budget.unwrap_or(DEFAULT_MAX_STEPS))?;
            let chain_ok = verify_chain_fast(g, &cover.chain);
            let cert_ok: Vec<std::result::Result<(), String>> =
                cover.certificates.iter().map(|c| verify_membership(g, &cover.chain.result, c)).collect();
            let all_ok = chain_ok.is_ok() && cert_ok.iter().all(|r| r.is_ok());
            if !all_ok {
                return Err(Error::Consistency("cover output failed its independent replay".into()));
            }
            let mut text = format!("{} refinement steps", cover.chain.steps.len());
            if cover.chain.steps.len() <= 20 {
                for s in &cover.chain.steps {
                    text.push_str(&format!("\n  {s}"));
                }
            }
            let result_vectors: Vec<String> = cover.chain.result.iter().map(|v| format_vector(v)).collect();
            text.push_str(&format!("\nfinal collection: {}", result_vectors.join(" ")));
            for c in &cover.certificates {
                let coeffs: Vec<String> = c.coefficients.iter().map(ToString::to_string).collect();
                text.push_str(&format!("\n{} = ({}) · collection", format_vector(&c.target), coeffs.join(",")));
            }
            text.push_str("\nreplay verification: chain ok, certificates ok");
            let result = json!({
                "field": input.field,
                "gamma": input.gamma_text,
                "cover": to_value(&cover),
            });
            let mut o = Outcome::new(result, text);
            o.verification = json!({ "chain": true, "certificates": vec![true; cover.certificates.len()] });
            Ok(o)
        }
        FlatCmd::Verify { report } => {
            let text = std::fs::read_to_string(report).map_err(|e| Error::invalid(format!("cannot read {report}: {e}")))?;
            let v: Value = serde_json::from_str(&text).map_err(|e| Error::invalid(format!("bad JSON in {report}: {e}")))?;
            let body = v.get("result").unwrap_or(&v);
            let field = body["field"].as_str().ok_or_else(|| Error::invalid("report lacks a field"))?;
            let gamma: Vec<String> = serde_json::from_value(body["gamma"].clone())
                .map_err(|e| Error::invalid(format!("report lacks gamma: {e}")))?;
            let cover: Cover = serde_json::from_value(body["cover"].clone())
                .map_err(|e| Error::invalid(format!("report lacks a cover: {e}")))?;
            let f = field.parse::<FieldSpec>()?.build()?;
            let g = GammaForm::parse(&f, &gamma.join(";"))?;
            let chain = verify_chain_fast(&g, &cover.chain);
            let certs: Vec<std::result::Result<(), String>> =
                cover.certificates.iter().map(|c| verify_membership(&g, &cover.chain.result, c)).collect();
            let ok = chain.is_ok() && certs.iter().all(|r| r.is_ok());
            let mut lines = vec![match &chain {
                Ok(()) => format!("chain of {} steps: ok", cover.chain.steps.len()),
                Err(e) => format!("chain: FAILED: {e}"),
            }];
            for (c, r) in cover.certificates.iter().zip(&certs) {
                lines.push(match r {
                    Ok(()) => format!("certificate for {}: ok", format_vector(&c.target)),
                    Err(e) => format!("certificate for {}: FAILED: {e}", format_vector(&c.target)),
                });
            }
            let verification = json!({
                "chain": chain.as_ref().err(),
                "certificates": certs.iter().map(|r| r.as_ref().err()).collect::<Vec<_>>(),
                "passed": ok,
            });
            Ok(Outcome { result: json!({ "passed": ok }), verification, text: lines.join("\n"), ok })
        }
        FlatCmd::Search { gamma, samples } => {
            let input = flat_input(gamma)?;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(cli.seed);
            let r = search_span_refinement(&input.gamma, *samples, cli.coord_bound.unwrap_or(3), &mut rng)?;
            let mut text = format!(
                "{} samples with Sp_N(V) ⊆ Sp_N(W): {} refinable, {} not refinable, {} undecided",
                r.samples, r.refinable, r.not_refinable, r.undecided
            );
            for w in &r.witnesses {
                let v: Vec<String> = w.v.iter().map(|x| format_vector(x)).collect();
                let ww: Vec<String> = w.w.iter().map(|x| format_vector(x)).collect();
                text.push_str(&format!("\n  V = {}  W = {}", v.join(" "), ww.join(" ")));
            }
            Ok(Outcome::new(to_value(&r), text))
        }
    }
}
