//! Congruence closure and everything built on it: lattices of congruences,
//! the c-principal test, Boolean quotients, and bounded closure on finite
//! windows of infinite semirings.
//!
//! All closures run on a [`Carrier`]: a finite set of elements together
//! with a list of unary translations `x ↦ x + r`, `x ↦ x·r`, `x ↦ r·x`,
//! each of which may be undefined on some elements. An equivalence is
//! compatible when every translation sends related elements (where both
//! images are defined) to related elements. On a finite semiring every
//! translation is total and this is exactly the usual notion of a
//! congruence.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use num_integer::Integer;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::semiring::{BoolPolynomial, FiniteSemiring};

/// An equivalence relation on `0..len`, stored as a class id per element.
/// Class ids are canonical: classes are numbered in order of their smallest
/// element.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    class_of: Vec<usize>,
}

impl Serialize for Partition {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.classes().serialize(s)
    }
}

impl Partition {
    /// Renumbers arbitrary class labels canonically.
    pub fn from_labels(labels: &[usize]) -> Self {
        let mut map = HashMap::new();
        let class_of = labels
            .iter()
            .map(|l| {
                let next = map.len();
                *map.entry(*l).or_insert(next)
            })
            .collect();
        Partition { class_of }
    }

    /// Builds a partition from explicit classes, which must cover `0..n`
    /// exactly once.
    pub fn from_classes(n: usize, classes: &[Vec<usize>]) -> Result<Self> {
        let mut labels = vec![usize::MAX; n];
        for (c, class) in classes.iter().enumerate() {
            for &x in class {
                if x >= n || labels[x] != usize::MAX {
                    return Err(Error::invalid(format!("element {x} out of range or listed twice")));
                }
                labels[x] = c;
            }
        }
        if let Some(x) = labels.iter().position(|&l| l == usize::MAX) {
            return Err(Error::invalid(format!("element {x} is in no class")));
        }
        Ok(Self::from_labels(&labels))
    }

    pub fn diagonal(n: usize) -> Self {
        Partition { class_of: (0..n).collect() }
    }

    pub fn full(n: usize) -> Self {
        Partition { class_of: vec![0; n] }
    }

    pub fn len(&self) -> usize {
        self.class_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.class_of.is_empty()
    }

    pub fn class_of(&self, x: usize) -> usize {
        self.class_of[x]
    }

    pub fn labels(&self) -> &[usize] {
        &self.class_of
    }

    pub fn related(&self, a: usize, b: usize) -> bool {
        self.class_of[a] == self.class_of[b]
    }

    pub fn class_count(&self) -> usize {
        self.class_of.iter().max().map_or(0, |m| m + 1)
    }

    pub fn canonical(&self) -> Partition {
        Self::from_labels(&self.class_of)
    }

    pub fn classes(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.class_count()];
        for (x, &c) in self.class_of.iter().enumerate() {
            out[c].push(x);
        }
        out
    }

    /// Smallest element of each class, indexed by class id.
    pub fn representatives(&self) -> Vec<usize> {
        self.classes().iter().map(|c| c[0]).collect()
    }

    pub fn is_diagonal(&self) -> bool {
        self.class_count() == self.len()
    }

    pub fn is_full(&self) -> bool {
        self.class_count() <= 1
    }

    /// True iff every class of `self` lies inside a class of `other`.
    pub fn refines(&self, other: &Partition) -> bool {
        let mut image = vec![usize::MAX; self.class_count()];
        self.class_of.iter().zip(&other.class_of).all(|(&c, &d)| {
            if image[c] == usize::MAX {
                image[c] = d;
            }
            image[c] == d
        })
    }

    /// Pairs `(x, smallest element of x's class)` for every non-minimal
    /// `x`; their closure gives back the partition.
    pub fn spanning_pairs(&self) -> Vec<(usize, usize)> {
        let reps = self.representatives();
        (0..self.len())
            .filter_map(|x| {
                let r = reps[self.class_of[x]];
                (r != x).then_some((r, x))
            })
            .collect()
    }

    /// Meet of two partitions of the same set.
    pub fn meet(&self, other: &Partition) -> Partition {
        let labels: Vec<usize> = self
            .class_of
            .iter()
            .zip(&other.class_of)
            .map(|(&a, &b)| a * other.len() + b)
            .collect();
        Self::from_labels(&labels)
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for class in self.classes() {
            let items: Vec<String> = class.iter().map(usize::to_string).collect();
            write!(f, "{{{}}}", items.join(","))?;
        }
        Ok(())
    }
}

/// A finite set with partially defined unary translations.
pub trait Carrier {
    fn size(&self) -> usize;
    fn op_count(&self) -> usize;
    /// Image of `x` under translation `op`, or `None` if it leaves the
    /// carrier.
    fn apply(&self, op: usize, x: usize) -> Option<usize>;
    /// Human readable name of a translation, for witnesses.
    fn describe_op(&self, op: usize) -> String {
        format!("op{op}")
    }
}

/// Which translation a compatibility failure was found under.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Operation {
    /// `x ↦ x + r`
    AddRight,
    /// `x ↦ x·r`
    MulRight,
    /// `x ↦ r·x`
    MulLeft,
}

/// Translations of a finite semiring: `+r`, `·r` and, if multiplication is
/// not commutative, `r·`.
pub struct TableCarrier<'a> {
    s: &'a FiniteSemiring,
    left: bool,
}

impl<'a> TableCarrier<'a> {
    pub fn new(s: &'a FiniteSemiring) -> Self {
        TableCarrier { s, left: !s.is_mul_commutative() }
    }

    pub fn decode(&self, op: usize) -> (Operation, usize) {
        let n = self.s.size();
        match op / n {
            0 => (Operation::AddRight, op % n),
            1 => (Operation::MulRight, op % n),
            _ => (Operation::MulLeft, op % n),
        }
    }
}

impl Carrier for TableCarrier<'_> {
    fn size(&self) -> usize {
        self.s.size()
    }

    fn op_count(&self) -> usize {
        self.s.size() * if self.left { 3 } else { 2 }
    }

    fn apply(&self, op: usize, x: usize) -> Option<usize> {
        let (kind, r) = self.decode(op);
        Some(match kind {
            Operation::AddRight => self.s.add(x, r),
            Operation::MulRight => self.s.mul(x, r),
            Operation::MulLeft => self.s.mul(r, x),
        })
    }

    fn describe_op(&self, op: usize) -> String {
        let (kind, r) = self.decode(op);
        match kind {
            Operation::AddRight => format!("x+{r}"),
            Operation::MulRight => format!("x*{r}"),
            Operation::MulLeft => format!("{r}*x"),
        }
    }
}

/// Result of a closure run.
#[derive(Clone, Debug)]
pub struct ClosureOutcome {
    pub partition: Partition,
    /// Translation applications performed.
    pub steps: usize,
    pub merges: usize,
}

/// Step and memory limits for a closure run.
#[derive(Clone, Copy, Debug)]
pub struct ClosureBudget {
    pub max_steps: usize,
    pub max_table_bytes: usize,
}

impl Default for ClosureBudget {
    fn default() -> Self {
        ClosureBudget { max_steps: 2_000_000_000, max_table_bytes: 1 << 30 }
    }
}

impl ClosureBudget {
    pub fn steps(max_steps: usize) -> Self {
        ClosureBudget { max_steps, ..Self::default() }
    }
}

const UNDEFINED: u32 = u32::MAX;

struct Closure<'c, C: Carrier + ?Sized> {
    carrier: &'c C,
    parent: Vec<u32>,
    members: Vec<u32>,
    // Per non-singleton root: one defined image under each translation, or
    // UNDEFINED if no member has a defined image yet.
    images: HashMap<u32, Vec<u32>>,
    queue: VecDeque<(u32, u32)>,
    steps: usize,
    merges: usize,
    budget: ClosureBudget,
}

impl<'c, C: Carrier + ?Sized> Closure<'c, C> {
    fn new(carrier: &'c C, budget: ClosureBudget) -> Self {
        let n = carrier.size();
        Closure {
            carrier,
            parent: (0..n as u32).collect(),
            members: vec![1; n],
            images: HashMap::new(),
            queue: VecDeque::new(),
            steps: 0,
            merges: 0,
            budget,
        }
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let p = self.parent[x as usize];
            self.parent[x as usize] = self.parent[p as usize];
            x = p;
        }
        x
    }

    fn partition(&mut self) -> Partition {
        let labels: Vec<usize> = (0..self.parent.len() as u32).map(|x| self.find(x) as usize).collect();
        Partition::from_labels(&labels)
    }

    fn budget_error(&mut self, what: &str, limit: usize) -> Error {
        Error::Budget { what: what.to_string(), limit, partial: Some(Box::new(self.partition())) }
    }

    fn row_of(&mut self, root: u32) -> Result<Vec<u32>> {
        if let Some(row) = self.images.remove(&root) {
            return Ok(row);
        }
        let ops = self.carrier.op_count();
        self.steps += ops;
        if self.steps > self.budget.max_steps {
            return Err(self.budget_error("closure steps", self.budget.max_steps));
        }
        Ok((0..ops)
            .map(|op| self.carrier.apply(op, root as usize).map_or(UNDEFINED, |y| y as u32))
            .collect())
    }

    fn run(&mut self) -> Result<()> {
        let ops = self.carrier.op_count();
        while let Some((a, b)) = self.queue.pop_front() {
            let (ra, rb) = (self.find(a), self.find(b));
            if ra == rb {
                continue;
            }
            let (big, small) =
                if self.members[ra as usize] >= self.members[rb as usize] { (ra, rb) } else { (rb, ra) };
            let live_rows = self.images.len() + 1;
            if live_rows.saturating_mul(ops).saturating_mul(4) > self.budget.max_table_bytes {
                return Err(self.budget_error("closure image table bytes", self.budget.max_table_bytes));
            }
            let small_row = self.row_of(small)?;
            let mut big_row = self.row_of(big)?;
            self.steps += ops;
            if self.steps > self.budget.max_steps {
                return Err(self.budget_error("closure steps", self.budget.max_steps));
            }
            for (x, &y) in big_row.iter_mut().zip(&small_row) {
                if y == UNDEFINED {
                    continue;
                }
                if *x == UNDEFINED {
                    *x = y;
                } else if *x != y {
                    self.queue.push_back((*x, y));
                }
            }
            self.parent[small as usize] = big;
            self.members[big as usize] += self.members[small as usize];
            self.images.insert(big, big_row);
            self.merges += 1;
        }
        Ok(())
    }
}

/// The least compatible equivalence on `carrier` containing `gens`, where
/// compatibility only constrains translations that stay inside the carrier.
///
/// Pairs are processed first in, first out, so the run is deterministic.
/// On budget exhaustion the error carries the partition reached so far,
/// which is still sound: every pair it relates is in the true closure.
pub fn closure_on<C: Carrier + ?Sized>(
    carrier: &C,
    gens: &[(usize, usize)],
    budget: ClosureBudget,
) -> Result<ClosureOutcome> {
    let n = carrier.size();
    if n > u32::MAX as usize - 1 {
        return Err(Error::invalid("carrier too large"));
    }
    if let Some(&(a, b)) = gens.iter().find(|&&(a, b)| a >= n || b >= n) {
        return Err(Error::invalid(format!("generator ({a}, {b}) outside carrier of size {n}")));
    }
    let mut c = Closure::new(carrier, budget);
    c.queue.extend(gens.iter().map(|&(a, b)| (a as u32, b as u32)));
    c.run()?;
    Ok(ClosureOutcome { partition: c.partition(), steps: c.steps, merges: c.merges })
}

/// The congruence of `s` generated by `gens`.
pub fn congruence_closure(s: &FiniteSemiring, gens: &[(usize, usize)]) -> Result<Partition> {
    Ok(closure_on(&TableCarrier::new(s), gens, ClosureBudget::default())?.partition)
}

/// A related pair whose images under one translation are not related.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CompatibilityWitness {
    pub a: usize,
    pub b: usize,
    pub r: usize,
    pub op: Operation,
    pub images: (usize, usize),
}

impl fmt::Display for CompatibilityWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (x, y) = self.images;
        let (l, r) = match self.op {
            Operation::AddRight => (format!("{}+{}", self.a, self.r), format!("{}+{}", self.b, self.r)),
            Operation::MulRight => (format!("{}*{}", self.a, self.r), format!("{}*{}", self.b, self.r)),
            Operation::MulLeft => (format!("{}*{}", self.r, self.a), format!("{}*{}", self.r, self.b)),
        };
        write!(f, "{} ~ {} but {l} = {x} and {r} = {y} are not related", self.a, self.b)
    }
}

/// `None` if `p` is a congruence of `s`, otherwise a witness.
pub fn is_congruence(s: &FiniteSemiring, p: &Partition) -> Option<CompatibilityWitness> {
    assert_eq!(p.len(), s.size(), "partition size does not match semiring");
    let n = s.size();
    for a in 0..n {
        for b in a + 1..n {
            if !p.related(a, b) {
                continue;
            }
            for r in 0..n {
                let checks = [
                    (Operation::AddRight, s.add(a, r), s.add(b, r)),
                    (Operation::MulRight, s.mul(a, r), s.mul(b, r)),
                    (Operation::MulLeft, s.mul(r, a), s.mul(r, b)),
                ];
                for (op, x, y) in checks {
                    if !p.related(x, y) {
                        return Some(CompatibilityWitness { a, b, r, op, images: (x, y) });
                    }
                }
            }
        }
    }
    None
}

/// One congruence of a finite semiring with a generating set.
#[derive(Clone, Debug, Serialize)]
pub struct CongruenceEntry {
    pub partition: Partition,
    pub generators: Vec<(usize, usize)>,
    pub principal: bool,
}

/// All congruences of a finite semiring, sorted from finest to coarsest
/// (by class count, then lexicographically by class labels).
#[derive(Clone, Debug, Serialize)]
pub struct CongruenceLattice {
    pub size: usize,
    pub entries: Vec<CongruenceEntry>,
}

impl CongruenceLattice {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, p: &Partition) -> bool {
        self.entries.iter().any(|e| &e.partition == p)
    }

    pub fn non_principal(&self) -> impl Iterator<Item = &CongruenceEntry> {
        self.entries.iter().filter(|e| !e.principal)
    }
}

/// Size limits for [`enumerate_congruences`].
#[derive(Clone, Copy, Debug)]
pub struct EnumerationBudget {
    pub max_elements: usize,
    pub max_congruences: usize,
}

impl Default for EnumerationBudget {
    fn default() -> Self {
        EnumerationBudget { max_elements: 24, max_congruences: 100_000 }
    }
}

/// Every congruence of `s`, found as the join closure of the principal
/// congruences. Each entry records one generating set; principal entries
/// record a single pair.
pub fn enumerate_congruences(s: &FiniteSemiring, budget: EnumerationBudget) -> Result<CongruenceLattice> {
    let n = s.size();
    if n > budget.max_elements {
        return Err(Error::Budget {
            what: format!("congruence enumeration on {n} elements"),
            limit: budget.max_elements,
            partial: None,
        });
    }
    let carrier = TableCarrier::new(s);
    let close = |gens: &[(usize, usize)]| -> Result<Partition> {
        Ok(closure_on(&carrier, gens, ClosureBudget::default())?.partition)
    };

    let mut index: HashMap<Partition, usize> = HashMap::new();
    let mut entries: Vec<CongruenceEntry> = Vec::new();
    let diagonal = Partition::diagonal(n);
    index.insert(diagonal.clone(), 0);
    entries.push(CongruenceEntry { partition: diagonal, generators: Vec::new(), principal: true });

    let mut principal_pairs = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            let p = close(&[(a, b)])?;
            if !index.contains_key(&p) {
                index.insert(p.clone(), entries.len());
                entries.push(CongruenceEntry { partition: p, generators: vec![(a, b)], principal: true });
                principal_pairs.push((a, b));
            }
        }
    }

    // Every congruence is a join of principal ones, so joining with the
    // distinct principal generators is enough.
    let mut i = 0;
    while i < entries.len() {
        for &(a, b) in &principal_pairs {
            let base = &entries[i];
            if base.partition.related(a, b) {
                continue;
            }
            let mut gens = base.partition.spanning_pairs();
            gens.push((a, b));
            let p = close(&gens)?;
            if index.contains_key(&p) {
                continue;
            }
            if entries.len() >= budget.max_congruences {
                return Err(Error::Budget {
                    what: "number of congruences".into(),
                    limit: budget.max_congruences,
                    partial: None,
                });
            }
            let mut generators = entries[i].generators.clone();
            generators.push((a, b));
            index.insert(p.clone(), entries.len());
            entries.push(CongruenceEntry { partition: p, generators, principal: false });
        }
        i += 1;
    }

    entries.sort_by(|x, y| {
        y.partition
            .class_count()
            .cmp(&x.partition.class_count())
            .then_with(|| x.partition.labels().cmp(y.partition.labels()))
    });
    Ok(CongruenceLattice { size: n, entries })
}

/// Result of the c-principal test.
#[derive(Clone, Debug, Serialize)]
pub struct PrincipalReport {
    pub principal: bool,
    pub congruence_count: usize,
    /// The first non-principal congruence in lattice order, if any.
    pub witness: Option<CongruenceEntry>,
}

/// Whether every congruence of `s` is generated by a single pair.
pub fn is_c_principal(s: &FiniteSemiring, budget: EnumerationBudget) -> Result<PrincipalReport> {
    let lattice = enumerate_congruences(s, budget)?;
    let witness = lattice.non_principal().next().cloned();
    Ok(PrincipalReport { principal: witness.is_none(), congruence_count: lattice.len(), witness })
}

/// A subset `Q` with `0 ∈ Q`, `1 ∉ Q`, `a+b ∈ Q ⟺ a,b ∈ Q` and
/// `ab ∈ Q ⟺ a ∈ Q or b ∈ Q`, i.e. the preimage of 0 under a surjection
/// onto 𝔹. Found by backtracking with propagation; the first solution in
/// lexicographic order (elements outside `Q` preferred) is returned.
pub fn has_boolean_quotient(s: &FiniteSemiring) -> Option<Vec<usize>> {
    let n = s.size();
    if s.zero() == s.one() {
        return None;
    }
    let mut assign: Vec<Option<bool>> = vec![None; n];
    assign[s.zero()] = Some(true);
    assign[s.one()] = Some(false);
    if !propagate(s, &mut assign) {
        return None;
    }
    search(s, assign).map(|a| (0..n).filter(|&x| a[x] == Some(true)).collect())
}

fn search(s: &FiniteSemiring, assign: Vec<Option<bool>>) -> Option<Vec<Option<bool>>> {
    let Some(x) = assign.iter().position(Option::is_none) else {
        return Some(assign);
    };
    for value in [false, true] {
        let mut next = assign.clone();
        next[x] = Some(value);
        if propagate(s, &mut next) {
            if let Some(done) = search(s, next) {
                return Some(done);
            }
        }
    }
    None
}

// Forces every consequence of the current partial assignment; false on a
// contradiction.
fn propagate(s: &FiniteSemiring, assign: &mut [Option<bool>]) -> bool {
    let n = s.size();
    let set = |assign: &mut [Option<bool>], x: usize, v: bool, changed: &mut bool| -> bool {
        match assign[x] {
            Some(w) => w == v,
            None => {
                assign[x] = Some(v);
                *changed = true;
                true
            }
        }
    };
    loop {
        let mut changed = false;
        for a in 0..n {
            let Some(va) = assign[a] else { continue };
            for b in 0..n {
                match assign[b] {
                    Some(vb) => {
                        if !set(assign, s.add(a, b), va && vb, &mut changed)
                            || !set(assign, s.mul(a, b), va || vb, &mut changed)
                        {
                            return false;
                        }
                    }
                    None => {
                        let ok = if va {
                            set(assign, s.mul(a, b), true, &mut changed)
                                && set(assign, s.mul(b, a), true, &mut changed)
                        } else {
                            set(assign, s.add(a, b), false, &mut changed)
                        };
                        if !ok {
                            return false;
                        }
                    }
                }
            }
        }
        // a + b ∈ Q forces a, b ∈ Q; ab ∉ Q forces a, b ∉ Q.
        for a in 0..n {
            for b in 0..n {
                if assign[s.add(a, b)] == Some(true)
                    && (!set(assign, a, true, &mut changed) || !set(assign, b, true, &mut changed))
                {
                    return false;
                }
                if assign[s.mul(a, b)] == Some(false)
                    && (!set(assign, a, false, &mut changed) || !set(assign, b, false, &mut changed))
                {
                    return false;
                }
            }
        }
        if !changed {
            return true;
        }
    }
}

/// Checks one candidate zero preimage against all four conditions.
pub fn is_boolean_kernel(s: &FiniteSemiring, q: &[usize]) -> bool {
    let n = s.size();
    let mut inq = vec![false; n];
    for &x in q {
        if x >= n {
            return false;
        }
        inq[x] = true;
    }
    inq[s.zero()]
        && !inq[s.one()]
        && (0..n).all(|a| {
            (0..n).all(|b| inq[s.add(a, b)] == (inq[a] && inq[b]) && inq[s.mul(a, b)] == (inq[a] || inq[b]))
        })
}

/// Exhaustive subset search; only for small carriers.
pub fn has_boolean_quotient_exhaustive(s: &FiniteSemiring) -> Option<Vec<usize>> {
    let n = s.size();
    assert!(n <= 20, "exhaustive Boolean quotient search is for small carriers");
    (0u32..1 << n)
        .map(|mask| (0..n).filter(|&x| mask >> x & 1 == 1).collect::<Vec<_>>())
        .find(|q| is_boolean_kernel(s, q))
}

/// Ring-ness against the existence of a Boolean quotient.
#[derive(Clone, Debug, Serialize)]
pub struct BgReport {
    pub is_ring: bool,
    pub boolean_quotient: Option<Vec<usize>>,
    /// `is_ring` holds exactly when no Boolean quotient exists.
    pub consistent: bool,
}

pub fn bg_check(s: &FiniteSemiring) -> BgReport {
    let is_ring = s.is_ring();
    let boolean_quotient = has_boolean_quotient(s);
    if let Some(q) = &boolean_quotient {
        debug_assert!(is_boolean_kernel(s, q));
    }
    BgReport { consistent: is_ring == boolean_quotient.is_none(), is_ring, boolean_quotient }
}

/// 𝔹[X] truncated at degree `D`: element index = support bitmask.
#[derive(Clone, Copy, Debug)]
pub struct BoolPolyUniverse {
    degree_bound: u32,
}

impl BoolPolyUniverse {
    pub fn new(degree_bound: u32) -> Result<Self> {
        if degree_bound > 22 {
            return Err(Error::invalid("degree bound above 22 is too large to enumerate"));
        }
        Ok(BoolPolyUniverse { degree_bound })
    }

    pub fn degree_bound(&self) -> u32 {
        self.degree_bound
    }

    pub fn index_of(&self, p: &BoolPolynomial) -> Result<usize> {
        match (p.to_mask(), p.degree()) {
            (Some(m), d) if d.is_none_or(|d| d <= self.degree_bound) => Ok(m as usize),
            _ => Err(Error::invalid(format!("{p} has degree above {}", self.degree_bound))),
        }
    }

    pub fn element(&self, x: usize) -> BoolPolynomial {
        BoolPolynomial::from_mask(x as u64)
    }

    fn mul_masks(&self, a: usize, b: usize) -> Option<usize> {
        let limit = 1usize << (self.degree_bound + 1);
        let mut out = 0usize;
        let mut rest = b;
        while rest != 0 {
            let e = rest.trailing_zeros();
            let shifted = a.checked_shl(e)?;
            if shifted >= limit || (a != 0 && (a.leading_zeros() as i64) < e as i64) {
                return None;
            }
            out |= shifted;
            rest &= rest - 1;
        }
        Some(out)
    }
}

impl Carrier for BoolPolyUniverse {
    fn size(&self) -> usize {
        1 << (self.degree_bound + 1)
    }

    fn op_count(&self) -> usize {
        2 * self.size()
    }

    fn apply(&self, op: usize, x: usize) -> Option<usize> {
        let n = self.size();
        if op < n {
            Some(x | op)
        } else {
            self.mul_masks(x, op - n)
        }
    }

    fn describe_op(&self, op: usize) -> String {
        let n = self.size();
        if op < n {
            format!("x+({})", self.element(op))
        } else {
            format!("x*({})", self.element(op - n))
        }
    }
}

/// `{0, …, B}` inside ℕ.
#[derive(Clone, Copy, Debug)]
pub struct NatUniverse {
    bound: usize,
}

impl NatUniverse {
    pub fn new(bound: usize) -> Self {
        NatUniverse { bound }
    }
}

impl Carrier for NatUniverse {
    fn size(&self) -> usize {
        self.bound + 1
    }

    fn op_count(&self) -> usize {
        2 * (self.bound + 1)
    }

    fn apply(&self, op: usize, x: usize) -> Option<usize> {
        let n = self.bound + 1;
        let y = if op < n { x + op } else { x.checked_mul(op - n)? };
        (y <= self.bound).then_some(y)
    }

    fn describe_op(&self, op: usize) -> String {
        let n = self.bound + 1;
        if op < n {
            format!("x+{op}")
        } else {
            format!("x*{}", op - n)
        }
    }
}

/// A congruence of (ℕ, +, ·).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum NatCongruence {
    Trivial,
    /// `x ~ y` iff `x = y`, or `x, y ≥ n` and `x ≡ y (mod k)`.
    Tail { n: u64, k: u64 },
}

impl NatCongruence {
    pub fn relates(&self, x: u64, y: u64) -> bool {
        match *self {
            NatCongruence::Trivial => x == y,
            NatCongruence::Tail { n, k } => x == y || (x >= n && y >= n && x % k == y % k),
        }
    }
}

/// Outcome of [`classify_nat_congruence`], including the cross-check.
#[derive(Clone, Debug, Serialize)]
pub struct NatClassification {
    pub congruence: NatCongruence,
    pub universe_bound: usize,
    pub checked_window: usize,
}

/// Classifies the congruence of ℕ generated by `pairs` and confirms the
/// answer against bounded closure: every pair the closure relates must
/// satisfy the formula, and every pair inside the checked window that the
/// formula relates must be found by the closure.
pub fn classify_nat_congruence(pairs: &[(u64, u64)]) -> Result<NatClassification> {
    let nontrivial: Vec<(u64, u64)> =
        pairs.iter().filter(|(a, b)| a != b).map(|&(a, b)| (a.min(b), a.max(b))).collect();
    let congruence = match nontrivial.iter().map(|&(a, _)| a).min() {
        None => NatCongruence::Trivial,
        Some(n) => {
            let k = nontrivial.iter().fold(0, |g, &(a, b)| g.gcd(&(b - a)));
            NatCongruence::Tail { n, k }
        }
    };
    let largest = pairs.iter().map(|&(a, b)| a.max(b)).max().unwrap_or(0);
    let window = match congruence {
        NatCongruence::Trivial => largest.max(8),
        NatCongruence::Tail { n, k } => (4 * (n + k)).max(largest),
    };
    // Paths between small elements may pass through larger ones; this
    // headroom was enough for every generator set tried in the tests.
    let bound = 2 * window + largest;
    if bound > 1 << 14 {
        return Err(Error::Budget { what: "ℕ cross-check universe".into(), limit: 1 << 14, partial: None });
    }
    let gens: Vec<(usize, usize)> = pairs.iter().map(|&(a, b)| (a as usize, b as usize)).collect();
    let closure = closure_on(&NatUniverse::new(bound as usize), &gens, ClosureBudget::default())?.partition;
    for x in 0..=bound {
        for y in x + 1..=bound {
            let found = closure.related(x as usize, y as usize);
            let claimed = congruence.relates(x, y);
            if found && !claimed {
                return Err(Error::Consistency(format!(
                    "bounded closure relates {x} and {y}, which {congruence:?} does not"
                )));
            }
            if claimed && !found && y <= window {
                return Err(Error::Consistency(format!(
                    "{congruence:?} relates {x} and {y} but bounded closure on 0..={bound} does not"
                )));
            }
        }
    }
    Ok(NatClassification { congruence, universe_bound: bound as usize, checked_window: window as usize })
}

/// Report of [`check_bx_nonrelation`].
#[derive(Clone, Debug, Serialize)]
pub struct BxReport {
    pub generator_bound: u32,
    pub degree_bound: u32,
    pub generators: Vec<(String, String)>,
    pub query: (String, String),
    pub related: bool,
    pub universe_size: usize,
    pub class_count: usize,
    pub steps: usize,
    pub note: &'static str,
}

/// Runs bounded closure on 𝔹[X] up to degree `D` with the generators
/// `Xⁱ+1 ~ Xʲ+1` for `1 ≤ i < j ≤ N` plus `extra`, and asks whether the
/// query pair (default `X^(N+1)+1 ~ X^(N+2)+1`) is related.
pub fn check_bx_nonrelation(
    n: u32,
    degree_bound: u32,
    extra: &[(BoolPolynomial, BoolPolynomial)],
    query: Option<(BoolPolynomial, BoolPolynomial)>,
    budget: ClosureBudget,
) -> Result<BxReport> {
    if degree_bound <= n + 2 {
        return Err(Error::invalid(format!("degree bound must exceed N+2 = {}", n + 2)));
    }
    let universe = BoolPolyUniverse::new(degree_bound)?;
    let x_plus_one = |e: u32| BoolPolynomial::from_exponents([0, e]);
    let mut gens = Vec::new();
    for i in 1..=n {
        for j in i + 1..=n {
            gens.push((x_plus_one(i), x_plus_one(j)));
        }
    }
    gens.extend(extra.iter().cloned());
    let query = query.unwrap_or_else(|| (x_plus_one(n + 1), x_plus_one(n + 2)));
    let idx: Vec<(usize, usize)> =
        gens.iter().map(|(a, b)| Ok((universe.index_of(a)?, universe.index_of(b)?))).collect::<Result<_>>()?;
    let q = (universe.index_of(&query.0)?, universe.index_of(&query.1)?);
    let out = closure_on(&universe, &idx, budget)?;
    Ok(BxReport {
        generator_bound: n,
        degree_bound,
        generators: gens.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect(),
        query: (query.0.to_string(), query.1.to_string()),
        related: out.partition.related(q.0, q.1),
        universe_size: universe.size(),
        class_count: out.partition.class_count(),
        steps: out.steps,
        note: "bounded closure under-approximates the congruence: a relation found here is genuine, \
               a missing one is only evidence",
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semiring::{catalog, make_boolean, make_minmax, make_zmod};

    fn parts(p: &Partition) -> Vec<Vec<usize>> {
        p.classes()
    }

    #[test]
    fn partitions() {
        let p = Partition::from_labels(&[5, 5, 2, 5]);
        assert_eq!(p.labels(), &[0, 0, 1, 0]);
        assert_eq!(p.to_string(), "{0,1,3}{2}");
        assert!(Partition::diagonal(4).refines(&p));
        assert!(!p.refines(&Partition::diagonal(4)));
        assert!(p.refines(&Partition::full(4)));
        let q = Partition::from_classes(4, &[vec![0, 2], vec![1, 3]]).unwrap();
        assert_eq!(p.meet(&q).classes(), vec![vec![0], vec![1, 3], vec![2]]);
        assert!(Partition::from_classes(3, &[vec![0, 1]]).is_err());
    }

    #[test]
    fn closures_on_chains() {
        let m3 = make_minmax(3).unwrap();
        assert!(congruence_closure(&m3, &[(0, 2)]).unwrap().is_full());
        assert!(congruence_closure(&m3, &[]).unwrap().is_diagonal());
        let m4 = make_minmax(4).unwrap();
        assert_eq!(parts(&congruence_closure(&m4, &[(0, 1)]).unwrap()), vec![vec![0, 1], vec![2], vec![3]]);
        assert!(congruence_closure(&m4, &[(0, 9)]).is_err());
    }

    #[test]
    fn compatibility_witness() {
        let m3 = make_minmax(3).unwrap();
        let p = Partition::from_classes(3, &[vec![0, 2], vec![1]]).unwrap();
        let w = is_congruence(&m3, &p).unwrap();
        let (x, y) = w.images;
        assert!(!p.related(x, y));
        assert!(is_congruence(&m3, &Partition::diagonal(3)).is_none());
    }

    #[test]
    fn lattices() {
        let b = EnumerationBudget::default();
        assert_eq!(enumerate_congruences(&make_boolean(), b).unwrap().len(), 2);
        assert_eq!(enumerate_congruences(&make_minmax(3).unwrap(), b).unwrap().len(), 4);
        assert_eq!(enumerate_congruences(&make_minmax(4).unwrap(), b).unwrap().len(), 8);
        let r = is_c_principal(&make_minmax(4).unwrap(), b).unwrap();
        assert!(!r.principal);
        assert_eq!(parts(&r.witness.unwrap().partition), vec![vec![0, 1], vec![2, 3]]);
        assert!(is_c_principal(&make_minmax(3).unwrap(), b).unwrap().principal);
        assert!(is_c_principal(&make_zmod(5).unwrap(), b).unwrap().principal);
        let small = EnumerationBudget { max_elements: 3, ..b };
        assert!(matches!(enumerate_congruences(&make_minmax(4).unwrap(), small), Err(Error::Budget { .. })));
    }

    #[test]
    fn boolean_quotients() {
        assert_eq!(has_boolean_quotient(&make_boolean()), Some(vec![0]));
        assert_eq!(has_boolean_quotient(&make_zmod(4).unwrap()), None);
        assert_eq!(has_boolean_quotient(&make_minmax(4).unwrap()), Some(vec![0]));
        let t = catalog("truncnat:2:3").unwrap();
        let r = bg_check(&t);
        assert!(!r.is_ring && r.boolean_quotient.is_some() && r.consistent);
        assert!(bg_check(&make_zmod(6).unwrap()).consistent);
    }

    #[test]
    fn nat_universe() {
        let p = closure_on(&NatUniverse::new(20), &[(2, 5)], ClosureBudget::default()).unwrap().partition;
        for x in 0..=20usize {
            for y in 0..=20usize {
                let expect = x == y || (x >= 2 && y >= 2 && x % 3 == y % 3);
                assert_eq!(p.related(x, y), expect, "{x} {y}");
            }
        }
    }

    #[test]
    fn nat_classification() {
        assert_eq!(classify_nat_congruence(&[]).unwrap().congruence, NatCongruence::Trivial);
        assert_eq!(classify_nat_congruence(&[(2, 5)]).unwrap().congruence, NatCongruence::Tail { n: 2, k: 3 });
        assert_eq!(
            classify_nat_congruence(&[(3, 5), (4, 10)]).unwrap().congruence,
            NatCongruence::Tail { n: 3, k: 2 }
        );
        assert_eq!(
            classify_nat_congruence(&[(7, 7), (10, 6)]).unwrap().congruence,
            NatCongruence::Tail { n: 6, k: 4 }
        );
    }

    #[test]
    fn bool_poly_universe() {
        let u = BoolPolyUniverse::new(6).unwrap();
        let p = |s: &str| u.index_of(&s.parse().unwrap()).unwrap();
        let out = closure_on(&u, &[(p("1+X"), p("1+X^2"))], ClosureBudget::default()).unwrap().partition;
        assert!(out.related(p("X+X^2"), p("X+X^3")));
        assert!(out.related(p("1+X+X^2"), p("1+X+X^3")));
        assert!(!out.related(p("0"), p("1")));
        let d = closure_on(&u, &[], ClosureBudget::default()).unwrap().partition;
        assert!(d.is_diagonal());
        assert_eq!(u.apply(u.size() + p("X^3"), p("X^4")), None);
        assert_eq!(u.apply(u.size() + p("1+X"), p("1+X")), Some(p("1+X+X^2")));
    }

    #[test]
    fn bx_check() {
        let b = ClosureBudget::default();
        let r = check_bx_nonrelation(3, 10, &[], None, b).unwrap();
        assert!(!r.related);
        let x = |e: u32| BoolPolynomial::from_exponents([0, e]);
        let r = check_bx_nonrelation(3, 10, &[(x(4), x(5))], None, b).unwrap();
        assert!(r.related);
        let r = check_bx_nonrelation(3, 10, &[], Some((x(2), x(3))), b).unwrap();
        assert!(r.related);
        assert!(check_bx_nonrelation(3, 5, &[], None, b).is_err());
        let tight = ClosureBudget::steps(1000);
        match check_bx_nonrelation(3, 10, &[], None, tight) {
            Err(Error::Budget { partial: Some(p), .. }) => assert_eq!(p.len(), 2048),
            other => panic!("expected budget error, got {other:?}"),
        }
    }
}
