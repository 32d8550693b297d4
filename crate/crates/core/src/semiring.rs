//! Finite semirings as explicit operation tables, plus the catalog and the
//! standard constructions on them.
//!
//! Elements are dense indices `0..size`. Tables are stored row-major, so
//! `a + b` is `add[a * size + b]`.
//!
//! Catalog conventions:
//!
//! * `minmax:b` is the chain `{0, …, b-1}` with `+ = max`, `· = min`,
//!   additive identity `0` and multiplicative identity `b-1`.
//! * `truncnat:n:k` is ℕ modulo `n ~ n+k`, i.e. `{0, …, n+k-1}` where values
//!   at or above `n` wrap with period `k`.
//! * `zmod:m` is ℤ/m, the same as `truncnat:0:m`.
//! * `star:S` adjoins a new additive identity ω with `ω·x = ω`.

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::congruence::Partition;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteSemiring {
    size: usize,
    add: Vec<usize>,
    mul: Vec<usize>,
    zero: usize,
    one: usize,
    labels: Option<Vec<String>>,
}

/// One failed axiom together with the elements that witness it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomViolation {
    pub axiom: &'static str,
    pub witness: Vec<usize>,
}

impl fmt::Display for AxiomViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} fails at {:?}", self.axiom, self.witness)
    }
}

/// Serialized form of a semiring table.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SemiringTables {
    pub size: usize,
    pub zero: usize,
    pub one: usize,
    pub add: Vec<Vec<usize>>,
    pub mul: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

impl FiniteSemiring {
    /// Builds a semiring from row-major tables without checking the axioms.
    /// Only index ranges are checked; use [`validate_axioms`] or
    /// [`FiniteSemiring::new`] for the full check.
    ///
    /// [`validate_axioms`]: FiniteSemiring::validate_axioms
    pub fn from_tables(
        size: usize,
        add: Vec<usize>,
        mul: Vec<usize>,
        zero: usize,
        one: usize,
    ) -> Result<Self> {
        if size == 0 {
            return Err(Error::invalid("semiring must have at least one element"));
        }
        if add.len() != size * size || mul.len() != size * size {
            return Err(Error::invalid(format!("tables must have {} entries", size * size)));
        }
        if zero >= size || one >= size {
            return Err(Error::invalid("zero or one out of range"));
        }
        if let Some(bad) = add.iter().chain(&mul).find(|&&v| v >= size) {
            return Err(Error::invalid(format!("table entry {bad} out of range 0..{size}")));
        }
        Ok(FiniteSemiring { size, add, mul, zero, one, labels: None })
    }

    /// Builds a semiring and rejects it unless every axiom holds.
    pub fn new(size: usize, add: Vec<usize>, mul: Vec<usize>, zero: usize, one: usize) -> Result<Self> {
        let s = Self::from_tables(size, add, mul, zero, one)?;
        s.ensure_valid()?;
        Ok(s)
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.size {
            return Err(Error::invalid("one label per element expected"));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    fn from_fns(
        size: usize,
        zero: usize,
        one: usize,
        add: impl Fn(usize, usize) -> usize,
        mul: impl Fn(usize, usize) -> usize,
    ) -> Self {
        let mut a = Vec::with_capacity(size * size);
        let mut m = Vec::with_capacity(size * size);
        for x in 0..size {
            for y in 0..size {
                a.push(add(x, y));
                m.push(mul(x, y));
            }
        }
        FiniteSemiring { size, add: a, mul: m, zero, one, labels: None }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn zero(&self) -> usize {
        self.zero
    }

    pub fn one(&self) -> usize {
        self.one
    }

    #[inline]
    pub fn add(&self, a: usize, b: usize) -> usize {
        self.add[a * self.size + b]
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.size + b]
    }

    pub fn add_table(&self) -> &[usize] {
        &self.add
    }

    pub fn mul_table(&self) -> &[usize] {
        &self.mul
    }

    pub fn label(&self, x: usize) -> String {
        match &self.labels {
            Some(l) => l[x].clone(),
            None => x.to_string(),
        }
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn is_mul_commutative(&self) -> bool {
        (0..self.size).all(|a| (0..a).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    /// Every violated axiom with one witness each. Empty iff `self` is a
    /// semiring.
    pub fn validate_axioms(&self) -> Vec<AxiomViolation> {
        let n = self.size;
        let mut out = Vec::new();
        let mut first = |axiom: &'static str, found: Option<Vec<usize>>| {
            if let Some(witness) = found {
                out.push(AxiomViolation { axiom, witness });
            }
        };
        let pairs = || (0..n).flat_map(move |a| (0..n).map(move |b| (a, b)));
        let triples = || pairs().flat_map(move |(a, b)| (0..n).map(move |c| (a, b, c)));

        first(
            "addition is associative",
            triples()
                .find(|&(a, b, c)| self.add(self.add(a, b), c) != self.add(a, self.add(b, c)))
                .map(|(a, b, c)| vec![a, b, c]),
        );
        first(
            "addition is commutative",
            pairs().find(|&(a, b)| self.add(a, b) != self.add(b, a)).map(|(a, b)| vec![a, b]),
        );
        first(
            "zero is an additive identity",
            (0..n).find(|&a| self.add(self.zero, a) != a || self.add(a, self.zero) != a).map(|a| vec![a]),
        );
        first(
            "multiplication is associative",
            triples()
                .find(|&(a, b, c)| self.mul(self.mul(a, b), c) != self.mul(a, self.mul(b, c)))
                .map(|(a, b, c)| vec![a, b, c]),
        );
        first(
            "one is a multiplicative identity",
            (0..n).find(|&a| self.mul(self.one, a) != a || self.mul(a, self.one) != a).map(|a| vec![a]),
        );
        first(
            "left distributivity a(b+c) = ab+ac",
            triples()
                .find(|&(a, b, c)| self.mul(a, self.add(b, c)) != self.add(self.mul(a, b), self.mul(a, c)))
                .map(|(a, b, c)| vec![a, b, c]),
        );
        first(
            "right distributivity (a+b)c = ac+bc",
            triples()
                .find(|&(a, b, c)| self.mul(self.add(a, b), c) != self.add(self.mul(a, c), self.mul(b, c)))
                .map(|(a, b, c)| vec![a, b, c]),
        );
        first(
            "zero is multiplicatively absorbing",
            (0..n).find(|&a| self.mul(self.zero, a) != self.zero || self.mul(a, self.zero) != self.zero).map(|a| vec![a]),
        );
        out
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let report = self.validate_axioms();
        match report.first() {
            None => Ok(()),
            Some(v) => Err(Error::invalid(format!("not a semiring: {v}"))),
        }
    }

    /// True iff every element has an additive inverse.
    pub fn is_ring(&self) -> bool {
        (0..self.size).all(|a| (0..self.size).any(|b| self.add(a, b) == self.zero))
    }

    pub fn to_tables(&self) -> SemiringTables {
        SemiringTables {
            size: self.size,
            zero: self.zero,
            one: self.one,
            add: self.add.chunks(self.size).map(<[usize]>::to_vec).collect(),
            mul: self.mul.chunks(self.size).map(<[usize]>::to_vec).collect(),
            labels: self.labels.clone(),
        }
    }

    pub fn from_serialized(t: &SemiringTables) -> Result<Self> {
        if t.add.len() != t.size || t.mul.len() != t.size {
            return Err(Error::invalid("table must have one row per element"));
        }
        if t.add.iter().chain(&t.mul).any(|row| row.len() != t.size) {
            return Err(Error::invalid("every row must have one entry per element"));
        }
        let s = Self::from_tables(t.size, t.add.concat(), t.mul.concat(), t.zero, t.one)?;
        match &t.labels {
            Some(l) => s.with_labels(l.clone()),
            None => Ok(s),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_tables()).expect("tables serialize")
    }

    /// Parses a JSON table document. The axioms are not checked here.
    pub fn from_json(s: &str) -> Result<Self> {
        let t: SemiringTables =
            serde_json::from_str(s).map_err(|e| Error::invalid(format!("bad semiring document: {e}")))?;
        Self::from_serialized(&t)
    }

    /// The relabelled copy where old element `x` becomes `perm[x]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Self> {
        let n = self.size;
        let mut seen = vec![false; n];
        if perm.len() != n || perm.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::invalid("relabelling must be a permutation"));
        }
        let mut add = vec![0; n * n];
        let mut mul = vec![0; n * n];
        for a in 0..n {
            for b in 0..n {
                add[perm[a] * n + perm[b]] = perm[self.add(a, b)];
                mul[perm[a] * n + perm[b]] = perm[self.mul(a, b)];
            }
        }
        Ok(FiniteSemiring { size: n, add, mul, zero: perm[self.zero], one: perm[self.one], labels: None })
    }
}

/// The two element semiring 𝔹 with `1 + 1 = 1`.
pub fn make_boolean() -> FiniteSemiring {
    FiniteSemiring::from_fns(2, 0, 1, |a, b| a | b, |a, b| a & b)
}

/// ℕ modulo the congruence `n ~ n+k`, with `n + k` elements.
pub fn make_truncated_nat(n: usize, k: usize) -> Result<FiniteSemiring> {
    if k == 0 {
        return Err(Error::invalid("truncnat period k must be at least 1"));
    }
    let size = n + k;
    let reduce = move |x: usize| if x < n { x } else { n + (x - n) % k };
    // `one` is 1 unless the carrier has collapsed to a single element.
    let one = reduce(1);
    Ok(FiniteSemiring::from_fns(size, 0, one, |a, b| reduce(a + b), |a, b| reduce(a * b)))
}

/// ℤ/m.
pub fn make_zmod(m: usize) -> Result<FiniteSemiring> {
    make_truncated_nat(0, m)
}

/// The chain 𝓜_b: `{0, …, b-1}` with max and min.
pub fn make_minmax(b: usize) -> Result<FiniteSemiring> {
    if b < 2 {
        return Err(Error::invalid(format!("minmax needs b >= 2, got {b}")));
    }
    Ok(FiniteSemiring::from_fns(b, 0, b - 1, |x, y| x.max(y), |x, y| x.min(y)))
}

/// Componentwise product; element `(s, t)` has index `s * |T| + t`.
pub fn make_product(s: &FiniteSemiring, t: &FiniteSemiring) -> FiniteSemiring {
    let m = t.size;
    FiniteSemiring::from_fns(
        s.size * m,
        s.zero * m + t.zero,
        s.one * m + t.one,
        |a, b| s.add(a / m, b / m) * m + t.add(a % m, b % m),
        |a, b| s.mul(a / m, b / m) * m + t.mul(a % m, b % m),
    )
}

/// `S ∪ {ω}` with `ω + x = x` and `ω·x = x·ω = ω`. ω gets index 0 and the
/// old elements are shifted up by one.
pub fn make_star(s: &FiniteSemiring) -> FiniteSemiring {
    let omega = 0;
    let r = FiniteSemiring::from_fns(
        s.size + 1,
        omega,
        s.one + 1,
        |a, b| match (a, b) {
            (0, y) => y,
            (x, 0) => x,
            (x, y) => s.add(x - 1, y - 1) + 1,
        },
        |a, b| if a == 0 || b == 0 { omega } else { s.mul(a - 1, b - 1) + 1 },
    );
    let mut labels = vec!["ω".to_string()];
    labels.extend((0..s.size).map(|x| s.label(x)));
    FiniteSemiring { labels: Some(labels), ..r }
}

/// The semiring of classes of a congruence. Class ids are those of the
/// canonical partition, so class `c` contains the `c`-th new element met in
/// index order.
pub fn make_quotient(s: &FiniteSemiring, p: &Partition) -> Result<FiniteSemiring> {
    if p.len() != s.size {
        return Err(Error::invalid("partition size does not match semiring"));
    }
    if let Some(w) = crate::congruence::is_congruence(s, p) {
        return Err(Error::invalid(format!("not a congruence: {w}")));
    }
    let p = p.canonical();
    let k = p.class_count();
    let rep = p.representatives();
    let q = FiniteSemiring::from_fns(
        k,
        p.class_of(s.zero),
        p.class_of(s.one),
        |a, b| p.class_of(s.add(rep[a], rep[b])),
        |a, b| p.class_of(s.mul(rep[a], rep[b])),
    );
    let labels = p
        .classes()
        .iter()
        .map(|c| format!("[{}]", c.iter().map(|&x| s.label(x)).collect::<Vec<_>>().join(",")))
        .collect();
    Ok(FiniteSemiring { labels: Some(labels), ..q })
}

/// Looks up a catalog name: `boolean`, `minmax:b`, `truncnat:n:k`,
/// `zmod:m`, `star:<name>`, `product:<name>,<name>`. Names nest, so
/// `product:product:boolean,boolean,zmod:2` is `(𝔹 × 𝔹) × ℤ/2`.
pub fn catalog(name: &str) -> Result<FiniteSemiring> {
    let name = name.trim();
    let (s, rest) = parse_catalog(name)?;
    if !rest.is_empty() {
        return Err(Error::invalid(format!("trailing {rest:?} in catalog name {name:?}")));
    }
    Ok(s)
}

fn parse_catalog(s: &str) -> Result<(FiniteSemiring, &str)> {
    if let Some(rest) = s.strip_prefix("star:") {
        let (inner, rest) = parse_catalog(rest)?;
        return Ok((make_star(&inner), rest));
    }
    if let Some(rest) = s.strip_prefix("product:") {
        let (a, rest) = parse_catalog(rest)?;
        let rest = rest
            .strip_prefix(',')
            .ok_or_else(|| Error::invalid(format!("product needs two comma separated names: {s:?}")))?;
        let (b, rest) = parse_catalog(rest)?;
        return Ok((make_product(&a, &b), rest));
    }
    let end = s.find(',').unwrap_or(s.len());
    let (atom, rest) = s.split_at(end);
    let parts: Vec<&str> = atom.split(':').collect();
    let num = |x: &str| -> Result<usize> {
        x.parse().map_err(|_| Error::invalid(format!("bad number {x:?} in {atom:?}")))
    };
    let semiring = match parts.as_slice() {
        ["boolean"] | ["B"] => make_boolean(),
        ["minmax", b] => make_minmax(num(b)?)?,
        ["truncnat", n, k] => make_truncated_nat(num(n)?, num(k)?)?,
        ["zmod", m] => make_zmod(num(m)?)?,
        _ => return Err(Error::invalid(format!("unknown catalog semiring {atom:?}"))),
    };
    Ok((semiring, rest))
}

/// The catalog names used in tests and demos.
pub fn catalog_names() -> Vec<String> {
    let mut v = vec!["boolean".to_string()];
    for b in 2..=6 {
        v.push(format!("minmax:{b}"));
    }
    for m in 1..=8 {
        v.push(format!("zmod:{m}"));
    }
    for n in 0..=4 {
        for k in 1..=4 {
            if n > 0 {
                v.push(format!("truncnat:{n}:{k}"));
            }
        }
    }
    v.extend(
        ["star:boolean", "star:zmod:2", "star:zmod:3", "star:minmax:3", "star:truncnat:1:2"]
            .map(String::from),
    );
    v.extend(["product:boolean,boolean", "product:zmod:2,boolean", "product:minmax:3,zmod:2"].map(String::from));
    v
}

/// Resolves a catalog name or a path to a JSON table document.
pub fn load(name_or_path: &str) -> Result<FiniteSemiring> {
    let path = Path::new(name_or_path);
    if path.extension().is_some_and(|e| e == "json") || path.is_file() {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::invalid(format!("cannot read {name_or_path}: {e}")))?;
        return FiniteSemiring::from_json(&text);
    }
    catalog(name_or_path)
}

/// A polynomial over 𝔹, stored as its support.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BoolPolynomial {
    support: BTreeSet<u32>,
}

impl BoolPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(0)
    }

    pub fn monomial(e: u32) -> Self {
        BoolPolynomial { support: BTreeSet::from([e]) }
    }

    pub fn from_exponents(e: impl IntoIterator<Item = u32>) -> Self {
        BoolPolynomial { support: e.into_iter().collect() }
    }

    pub fn support(&self) -> &BTreeSet<u32> {
        &self.support
    }

    pub fn degree(&self) -> Option<u32> {
        self.support.last().copied()
    }

    pub fn is_zero(&self) -> bool {
        self.support.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        BoolPolynomial { support: self.support.union(&other.support).copied().collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut support = BTreeSet::new();
        for a in &self.support {
            for b in &other.support {
                support.insert(a + b);
            }
        }
        BoolPolynomial { support }
    }

    /// Bitmask encoding, bit `e` set iff `X^e` is in the support.
    pub fn to_mask(&self) -> Option<u64> {
        self.support.iter().try_fold(0u64, |m, &e| (e < 64).then(|| m | (1 << e)))
    }

    pub fn from_mask(mask: u64) -> Self {
        Self::from_exponents((0..64).filter(|e| mask >> e & 1 == 1))
    }
}

impl fmt::Display for BoolPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.support.is_empty() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .support
            .iter()
            .map(|&e| match e {
                0 => "1".to_string(),
                1 => "X".to_string(),
                _ => format!("X^{e}"),
            })
            .collect();
        write!(f, "{}", terms.join("+"))
    }
}

impl std::str::FromStr for BoolPolynomial {
    type Err = Error;

    /// Accepts sums of `1`, `X`, `X^e` (any single letter variable).
    fn from_str(s: &str) -> Result<Self> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if s == "0" {
            return Ok(Self::zero());
        }
        let mut support = BTreeSet::new();
        for term in s.split('+') {
            let e = if term == "1" {
                0
            } else {
                let mut chars = term.chars();
                match chars.next() {
                    Some(c) if c.is_ascii_alphabetic() => {}
                    _ => return Err(Error::invalid(format!("bad Boolean polynomial term {term:?}"))),
                }
                let rest = chars.as_str();
                if rest.is_empty() {
                    1
                } else {
                    rest.strip_prefix('^')
                        .and_then(|e| e.parse().ok())
                        .ok_or_else(|| Error::invalid(format!("bad exponent in {term:?}")))?
                }
            };
            support.insert(e);
        }
        Ok(BoolPolynomial { support })
    }
}

/// A sign function on a finite ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PositivityMap {
    pub values: Vec<i8>,
}

impl PositivityMap {
    /// Checks `p(0)=0`, `p(1)=1`, multiplicativity, and
    /// `p(x+y) = -1 ⇒ p(x) = -1 or p(y) = -1` on the ring `r`.
    pub fn validate(&self, r: &FiniteSemiring) -> Result<()> {
        let p = &self.values;
        if p.len() != r.size() {
            return Err(Error::invalid("positivity map needs one value per element"));
        }
        if let Some(x) = p.iter().position(|v| !(-1..=1).contains(v)) {
            return Err(Error::invalid(format!("p({x}) must be -1, 0 or 1")));
        }
        if p[r.zero()] != 0 {
            return Err(Error::invalid("p(0) must be 0"));
        }
        if p[r.one()] != 1 {
            return Err(Error::invalid("p(1) must be 1"));
        }
        for x in 0..r.size() {
            for y in 0..r.size() {
                if p[r.mul(x, y)] != p[x] * p[y] {
                    return Err(Error::invalid(format!("p(xy) != p(x)p(y) at x={x}, y={y}")));
                }
                if p[r.add(x, y)] == -1 && p[x] != -1 && p[y] != -1 {
                    return Err(Error::invalid(format!("p(x+y) = -1 with p(x), p(y) >= 0 at x={x}, y={y}")));
                }
            }
        }
        Ok(())
    }
}

/// The subsemiring `{x : p(x) ≥ 0}` of a finite ring, relabelled densely.
/// Labels record the original indices.
pub fn positive_subsemiring(r: &FiniteSemiring, p: &PositivityMap) -> Result<FiniteSemiring> {
    r.ensure_valid()?;
    if !r.is_ring() {
        return Err(Error::invalid("positive_subsemiring needs a ring"));
    }
    p.validate(r)?;
    let keep: Vec<usize> = (0..r.size()).filter(|&x| p.values[x] >= 0).collect();
    let mut index = vec![usize::MAX; r.size()];
    for (i, &x) in keep.iter().enumerate() {
        index[x] = i;
    }
    let sub = FiniteSemiring::from_fns(
        keep.len(),
        index[r.zero()],
        index[r.one()],
        |a, b| index[r.add(keep[a], keep[b])],
        |a, b| index[r.mul(keep[a], keep[b])],
    );
    if sub.add.contains(&usize::MAX) || sub.mul.contains(&usize::MAX) {
        return Err(Error::Consistency("positive part is not closed under the operations".into()));
    }
    sub.with_labels(keep.iter().map(|&x| r.label(x)).collect())
}

/// A random semiring with at most `max_size` elements (at least 2 when
/// `max_size ≥ 2`), validated and randomly relabelled. Half of the draws
/// come from rejection sampling of raw tables, the rest from the catalog
/// constructions and their quotients.
pub fn random_semiring<R: rand::Rng>(rng: &mut R, max_size: usize) -> FiniteSemiring {
    assert!(max_size >= 2, "random semirings need room for 0 and 1");
    loop {
        let candidate = if rng.gen_bool(0.5) {
            let n = rng.gen_range(2..=max_size.min(4));
            random_table(rng, n)
        } else {
            random_construction(rng, max_size)
        };
        let Some(s) = candidate else { continue };
        if s.size() > max_size || !s.validate_axioms().is_empty() {
            continue;
        }
        let mut perm: Vec<usize> = (0..s.size()).collect();
        for i in (1..perm.len()).rev() {
            perm.swap(i, rng.gen_range(0..=i));
        }
        return s.relabel(&perm).expect("a permutation");
    }
}

/// Rejection sampling: commutative addition with identity 0, multiplication
/// with identity 1 and absorbing 0, remaining entries uniform.
fn random_table<R: rand::Rng>(rng: &mut R, n: usize) -> Option<FiniteSemiring> {
    for _ in 0..5000 {
        let mut add = vec![0; n * n];
        let mut mul = vec![0; n * n];
        for a in 0..n {
            for b in a..n {
                let v = if a == 0 { b } else { rng.gen_range(0..n) };
                add[a * n + b] = v;
                add[b * n + a] = v;
            }
            for b in 0..n {
                mul[a * n + b] = match (a, b) {
                    (0, _) | (_, 0) => 0,
                    (1, x) | (x, 1) => x,
                    _ => rng.gen_range(0..n),
                };
            }
        }
        let s = FiniteSemiring::from_tables(n, add, mul, 0, 1).ok()?;
        if s.validate_axioms().is_empty() {
            return Some(s);
        }
    }
    None
}

fn random_construction<R: rand::Rng>(rng: &mut R, max_size: usize) -> Option<FiniteSemiring> {
    let atom = |rng: &mut R, m: usize| -> FiniteSemiring {
        match rng.gen_range(0..4) {
            0 => make_boolean(),
            1 => make_minmax(rng.gen_range(2..=m.max(2))).expect("b ≥ 2"),
            2 => make_zmod(rng.gen_range(2..=m.max(2))).expect("m ≥ 1"),
            _ => {
                let n = rng.gen_range(1..m.max(2));
                make_truncated_nat(n, rng.gen_range(1..=(m - n).max(1))).expect("k ≥ 1")
            }
        }
    };
    let s = match rng.gen_range(0..4) {
        0 => atom(rng, max_size),
        1 => make_star(&atom(rng, max_size - 1)),
        2 => make_product(&atom(rng, 3), &atom(rng, 2)),
        _ => {
            let base = atom(rng, max_size + 2);
            let (a, b) = (rng.gen_range(0..base.size()), rng.gen_range(0..base.size()));
            let p = crate::congruence::congruence_closure(&base, &[(a, b)]).ok()?;
            make_quotient(&base, &p).ok()?
        }
    };
    (s.size() >= 2).then_some(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_members_are_semirings() {
        for name in catalog_names() {
            let s = catalog(&name).unwrap();
            assert!(s.validate_axioms().is_empty(), "{name}: {:?}", s.validate_axioms());
        }
    }

    #[test]
    fn truncnat_shapes() {
        let b = make_truncated_nat(1, 1).unwrap();
        assert_eq!(b, make_boolean());
        let t = make_truncated_nat(2, 3).unwrap();
        assert_eq!(t.size(), 5);
        assert_eq!(t.add(4, 1), 2);
        assert_eq!(t.mul(3, 3), 3);
        assert_eq!(t.mul(4, 4), 4);
    }

    #[test]
    fn detects_violations() {
        let mut s = make_minmax(3).unwrap();
        s.mul[2 * 3 + 1] = 2;
        let report = s.validate_axioms();
        assert!(report.iter().any(|v| v.axiom.contains("identity")));
        assert!(FiniteSemiring::from_tables(2, vec![0, 1, 1, 5], vec![0; 4], 0, 1).is_err());
    }

    #[test]
    fn non_distributive_witness() {
        // 𝔹 with 1+1 = 0 but idempotent-style multiplication is still a
        // ring (ℤ/2); break distributivity at a single cell instead.
        let s = FiniteSemiring::from_tables(3, vec![0, 1, 2, 1, 2, 0, 2, 0, 1], vec![0, 0, 0, 0, 1, 2, 0, 2, 2], 0, 1)
            .unwrap();
        let report = s.validate_axioms();
        let d = report.iter().find(|v| v.axiom.starts_with("left distributivity")).unwrap();
        let (a, b, c) = (d.witness[0], d.witness[1], d.witness[2]);
        assert_ne!(s.mul(a, s.add(b, c)), s.add(s.mul(a, b), s.mul(a, c)));
    }

    #[test]
    fn rings() {
        assert!(make_zmod(4).unwrap().is_ring());
        assert!(!make_boolean().is_ring());
        assert!(!make_minmax(4).unwrap().is_ring());
        for name in catalog_names() {
            let s = catalog(&name).unwrap();
            assert!(!make_star(&s).is_ring(), "star of {name}");
        }
        assert!(make_minmax(1).is_err());
    }

    #[test]
    fn star_of_z2() {
        let s = make_star(&make_zmod(2).unwrap());
        assert_eq!(s.size(), 3);
        assert_eq!(s.zero(), 0);
        // old zero is now index 1 and is no longer the additive identity
        assert_eq!(s.add(1, 2), 2);
        assert_eq!(s.add(2, 2), 1);
        assert_eq!(s.mul(1, 2), 1);
        assert!(s.validate_axioms().is_empty());
    }

    #[test]
    fn product_of_booleans() {
        let p = make_product(&make_boolean(), &make_boolean());
        assert_eq!(p.size(), 4);
        assert_eq!(p.zero(), 0);
        assert_eq!(p.one(), 3);
        assert_eq!(p.add(1, 2), 3);
        assert_eq!(p.mul(1, 2), 0);
    }

    #[test]
    fn json_round_trip() {
        let s = catalog("star:truncnat:1:2").unwrap();
        let back = FiniteSemiring::from_json(&s.to_json()).unwrap();
        assert_eq!(back, s);
        assert!(FiniteSemiring::from_json("{\"size\":2}").is_err());
        assert!(catalog("minmax:x").is_err());
        assert!(catalog("nope").is_err());
        assert_eq!(catalog("product:product:boolean,boolean,zmod:2").unwrap().size(), 8);
    }

    #[test]
    fn bool_polynomials() {
        let a: BoolPolynomial = "1+X^3".parse().unwrap();
        let b: BoolPolynomial = "1+X^5".parse().unwrap();
        assert_eq!(a.add(&b), BoolPolynomial::from_exponents([0, 3, 5]));
        let x1: BoolPolynomial = "1+X".parse().unwrap();
        assert_eq!(x1.mul(&x1), BoolPolynomial::from_exponents([0, 1, 2]));
        assert_eq!(a.mul(&b), BoolPolynomial::from_exponents([0, 3, 5, 8]));
        assert_eq!(a.to_string(), "1+X^3");
        assert_eq!(BoolPolynomial::from_mask(a.to_mask().unwrap()), a);
    }

    #[test]
    fn positivity() {
        let z2 = make_zmod(2).unwrap();
        let p = PositivityMap { values: vec![0, 1] };
        assert_eq!(positive_subsemiring(&z2, &p).unwrap().size(), 2);
        let z5 = make_zmod(5).unwrap();
        let nz = PositivityMap { values: vec![0, 1, 1, 1, 1] };
        assert_eq!(positive_subsemiring(&z5, &nz).unwrap().size(), 5);
        // p(2·2) = p(4) = 0 but p(2)p(2) = 1
        let bad = PositivityMap { values: vec![0, 1, 1, 1, 0] };
        let err = positive_subsemiring(&z5, &bad).unwrap_err().to_string();
        assert!(err.contains("p(xy)"), "{err}");
    }
}
