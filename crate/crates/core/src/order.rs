//! Real orders ℤ[θ] ⊂ ℝ and their positive parts `S = {x : x ≥ 0}`.
//!
//! Every congruence on `S` is either trivial or determined by a nonzero
//! ideal `I` of the order and a flag `j ∈ {0, 1}`:
//!
//! * `j = 0`: `x ~ y` iff `x - y ∈ I`;
//! * `j = 1`: `x ~ y` iff `x = y = 0`, or `x, y > 0` and `x - y ∈ I`.
//!
//! The flag records whether 0 is related to anything else. A generating
//! set of pairs determines `I` as the ideal generated by the differences,
//! and `j = 0` exactly when some nontrivial pair contains 0.
//!
//! Quotients are finite: `S/C₀(I) ≅ R/I` and `S/C₁(I) ≅ (R/I)_*`.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::algebraic::{FieldElement, FieldSpec, NumberField};
use crate::congruence::{closure_on, Carrier, ClosureBudget, Partition};
use crate::error::{Error, Result};
use crate::json;
use crate::lattice::{diagonal_product, hermite_rows, reduce_mod_hnf, smith_invariants, solve_columns};
use crate::poly::{format_terms, IntPolynomial};
use crate::semiring::{make_star, FiniteSemiring};

/// An element of ℤ[θ] in the power basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct OrderElement {
    #[serde(serialize_with = "json::vector")]
    coords: Vec<BigInt>,
}

impl OrderElement {
    pub fn coords(&self) -> &[BigInt] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    /// Coordinates as machine integers, if they fit.
    pub fn small_coords(&self) -> Option<Vec<i64>> {
        self.coords.iter().map(ToPrimitive::to_i64).collect()
    }
}

impl fmt::Display for OrderElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c: Vec<BigRational> = self.coords.iter().map(|x| BigRational::from_integer(x.clone())).collect();
        write!(f, "{}", format_terms(&c, "w"))
    }
}

/// The monogenic order ℤ[θ] for a real root θ of a monic irreducible
/// polynomial of degree at least 2.
#[derive(Debug)]
pub struct RealOrder {
    field: Arc<NumberField>,
    degree: usize,
    // θ^k in the power basis for k < 2d - 1.
    powers: Vec<Vec<BigInt>>,
}

impl RealOrder {
    pub fn new(polynomial: IntPolynomial, root_index: usize) -> Result<Arc<RealOrder>> {
        let degree = polynomial.degree().unwrap_or(0);
        if degree < 2 {
            return Err(Error::invalid("an order needs a defining polynomial of degree at least 2"));
        }
        let field = NumberField::new(polynomial, root_index)?;
        let coeffs = field.polynomial().coefficients().to_vec();
        let mut powers: Vec<Vec<BigInt>> = (0..degree)
            .map(|k| (0..degree).map(|i| if i == k { BigInt::one() } else { BigInt::zero() }).collect())
            .collect();
        for _ in degree..2 * degree - 1 {
            // θ·v shifts coordinates and folds θ^d = -Σ c_i θ^i back in.
            let last = powers.last().unwrap();
            let top = last[degree - 1].clone();
            let mut next = vec![BigInt::zero(); degree];
            for i in (1..degree).rev() {
                next[i] = last[i - 1].clone();
            }
            for (i, c) in coeffs.iter().take(degree).enumerate() {
                next[i] -= &top * c;
            }
            powers.push(next);
        }
        Ok(Arc::new(RealOrder { field, degree, powers }))
    }

    /// Parses `poly@root_index`.
    pub fn from_spec(spec: &str) -> Result<Arc<RealOrder>> {
        let s: FieldSpec = spec.parse()?;
        Self::new(s.polynomial, s.root_index)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }

    pub fn spec_string(&self) -> String {
        self.field.spec_string()
    }

    pub fn element(&self, coords: &[i64]) -> Result<OrderElement> {
        self.element_big(coords.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn element_big(&self, coords: Vec<BigInt>) -> Result<OrderElement> {
        if coords.len() != self.degree {
            return Err(Error::invalid(format!("expected {} coordinates, got {}", self.degree, coords.len())));
        }
        Ok(OrderElement { coords })
    }

    pub fn from_int(&self, n: i64) -> OrderElement {
        let mut c = vec![BigInt::zero(); self.degree];
        c[0] = BigInt::from(n);
        OrderElement { coords: c }
    }

    pub fn zero(&self) -> OrderElement {
        self.from_int(0)
    }

    pub fn one(&self) -> OrderElement {
        self.from_int(1)
    }

    pub fn theta(&self) -> OrderElement {
        OrderElement { coords: self.powers[1].clone() }
    }

    /// Parses an expression in one variable such as `-7+5w`; the result
    /// must have integer coordinates.
    pub fn parse(&self, s: &str) -> Result<OrderElement> {
        let fe = FieldElement::parse(&self.field, s)?;
        let coords = fe
            .coords()
            .iter()
            .map(|c| c.is_integer().then(|| c.to_integer()))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::invalid(format!("{s} is not in the order (non-integral coordinates)")))?;
        Ok(OrderElement { coords })
    }

    pub fn add(&self, a: &OrderElement, b: &OrderElement) -> OrderElement {
        OrderElement { coords: a.coords.iter().zip(&b.coords).map(|(x, y)| x + y).collect() }
    }

    pub fn sub(&self, a: &OrderElement, b: &OrderElement) -> OrderElement {
        OrderElement { coords: a.coords.iter().zip(&b.coords).map(|(x, y)| x - y).collect() }
    }

    pub fn neg(&self, a: &OrderElement) -> OrderElement {
        OrderElement { coords: a.coords.iter().map(|x| -x).collect() }
    }

    pub fn scale(&self, k: &BigInt, a: &OrderElement) -> OrderElement {
        OrderElement { coords: a.coords.iter().map(|x| x * k).collect() }
    }

    pub fn mul(&self, a: &OrderElement, b: &OrderElement) -> OrderElement {
        let d = self.degree;
        let mut out = vec![BigInt::zero(); d];
        for (i, x) in a.coords.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coords.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                let xy = x * y;
                for (o, p) in out.iter_mut().zip(&self.powers[i + j]) {
                    if !p.is_zero() {
                        *o += &xy * p;
                    }
                }
            }
        }
        OrderElement { coords: out }
    }

    pub fn pow(&self, a: &OrderElement, n: u32) -> OrderElement {
        (0..n).fold(self.one(), |acc, _| self.mul(&acc, a))
    }

    /// Evaluates an integer polynomial at `a`.
    pub fn eval(&self, p: &IntPolynomial, a: &OrderElement) -> OrderElement {
        p.coefficients().iter().rev().fold(self.zero(), |acc, c| self.add(&self.mul(&acc, a), &self.from_big_int(c)))
    }

    pub fn from_big_int(&self, n: &BigInt) -> OrderElement {
        let mut c = vec![BigInt::zero(); self.degree];
        c[0] = n.clone();
        OrderElement { coords: c }
    }

    pub fn to_field(&self, a: &OrderElement) -> FieldElement {
        FieldElement::from_integers(&self.field, &a.coords).expect("dimension matches")
    }

    pub fn sign(&self, a: &OrderElement) -> i8 {
        self.to_field(a).sign()
    }

    /// Membership in the positive part `S`.
    pub fn in_s(&self, a: &OrderElement) -> bool {
        self.sign(a) >= 0
    }

    pub fn abs(&self, a: &OrderElement) -> OrderElement {
        if self.sign(a) < 0 {
            self.neg(a)
        } else {
            a.clone()
        }
    }

    pub fn to_f64(&self, a: &OrderElement) -> f64 {
        self.to_field(a).to_f64()
    }

    /// The nonzero ideal generated by `gens`.
    pub fn ideal(&self, gens: &[OrderElement]) -> Result<IdealLattice> {
        if let Some(g) = gens.iter().find(|g| g.coords.len() != self.degree) {
            return Err(Error::invalid(format!("generator {g} has the wrong dimension")));
        }
        if gens.iter().all(OrderElement::is_zero) {
            return Err(Error::invalid("the zero ideal is not supported"));
        }
        let basis: Vec<OrderElement> = (0..self.degree).map(|k| OrderElement { coords: self.powers[k].clone() }).collect();
        let rows: Vec<Vec<BigInt>> =
            gens.iter().flat_map(|g| basis.iter().map(|b| self.mul(g, b).coords)).collect();
        let hnf = hermite_rows(&rows, self.degree);
        if hnf.len() != self.degree {
            return Err(Error::Consistency("ideal lattice is not of full rank".into()));
        }
        let ideal = IdealLattice { hnf, generators: gens.to_vec() };
        let theta = self.theta();
        for row in &ideal.hnf {
            let v = self.mul(&OrderElement { coords: row.clone() }, &theta);
            if !ideal.contains(&v) {
                return Err(Error::Consistency("ideal lattice is not closed under θ".into()));
            }
        }
        Ok(ideal)
    }

    pub fn parse_elements(&self, s: &str) -> Result<Vec<OrderElement>> {
        s.split(';').filter(|t| !t.trim().is_empty()).map(|t| self.parse(t.trim())).collect()
    }

    /// Parses `a~b;c~d`.
    pub fn parse_pairs(&self, s: &str) -> Result<Vec<(OrderElement, OrderElement)>> {
        s.split(';')
            .filter(|t| !t.trim().is_empty())
            .map(|t| {
                let (a, b) = t
                    .split_once('~')
                    .ok_or_else(|| Error::invalid(format!("pair {t:?} must look like a~b")))?;
                Ok((self.parse(a.trim())?, self.parse(b.trim())?))
            })
            .collect()
    }
}

/// A nonzero ideal as a full rank sublattice of ℤ^d, in row Hermite normal
/// form.
#[derive(Clone, Debug, Serialize)]
pub struct IdealLattice {
    #[serde(serialize_with = "json::matrix")]
    hnf: Vec<Vec<BigInt>>,
    generators: Vec<OrderElement>,
}

impl PartialEq for IdealLattice {
    fn eq(&self, other: &Self) -> bool {
        self.hnf == other.hnf
    }
}

impl Eq for IdealLattice {}

impl IdealLattice {
    pub fn hnf(&self) -> &[Vec<BigInt>] {
        &self.hnf
    }

    pub fn generators(&self) -> &[OrderElement] {
        &self.generators
    }

    /// Index of the ideal in the order, i.e. `|R/I|`.
    pub fn determinant(&self) -> BigInt {
        diagonal_product(&self.hnf)
    }

    pub fn reduce(&self, x: &OrderElement) -> OrderElement {
        OrderElement { coords: reduce_mod_hnf(&self.hnf, &x.coords) }
    }

    pub fn contains(&self, x: &OrderElement) -> bool {
        self.reduce(x).is_zero()
    }

    /// Abelian group invariants of `R/I`.
    pub fn smith_invariants(&self) -> Vec<BigInt> {
        smith_invariants(&self.hnf)
    }
}

/// The k-ideal `I ∩ S` of the positive part.
#[derive(Clone, Debug, Serialize)]
pub struct KIdeal {
    pub ideal: IdealLattice,
    /// `{|x| : x a generator of I}`, which generates `I ∩ S` as a k-ideal.
    pub generators: Vec<OrderElement>,
}

impl KIdeal {
    pub fn contains(&self, order: &RealOrder, x: &OrderElement) -> bool {
        order.in_s(x) && self.ideal.contains(x)
    }
}

pub fn k_ideal_of(order: &RealOrder, ideal: &IdealLattice) -> KIdeal {
    KIdeal { ideal: ideal.clone(), generators: ideal.generators.iter().map(|g| order.abs(g)).collect() }
}

/// Rebuilds the ring ideal `J ∪ -J` from the k-ideal's generators.
pub fn ring_ideal_of(order: &RealOrder, k: &KIdeal) -> Result<IdealLattice> {
    order.ideal(&k.generators)
}

/// A congruence on the positive part of an order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum CongruenceClass {
    Trivial,
    Ideal { ideal: IdealLattice, j: u8 },
}

impl CongruenceClass {
    pub fn j(&self) -> Option<u8> {
        match self {
            CongruenceClass::Trivial => None,
            CongruenceClass::Ideal { j, .. } => Some(*j),
        }
    }
}

/// Whether `x ~ y` under `class`. Both must lie in `S`.
pub fn is_related(order: &RealOrder, class: &CongruenceClass, x: &OrderElement, y: &OrderElement) -> Result<bool> {
    let (sx, sy) = (order.sign(x), order.sign(y));
    if sx < 0 || sy < 0 {
        return Err(Error::invalid("is_related needs elements of S"));
    }
    Ok(match class {
        CongruenceClass::Trivial => x == y,
        CongruenceClass::Ideal { ideal, j: 0 } => ideal.contains(&order.sub(x, y)),
        CongruenceClass::Ideal { ideal, .. } => {
            (sx == 0 && sy == 0) || (sx > 0 && sy > 0 && ideal.contains(&order.sub(x, y)))
        }
    })
}

/// Settings for the bounded closure cross-check of a classification.
#[derive(Clone, Copy, Debug)]
pub struct CrossCheck {
    pub coord_bound: i64,
    pub budget: ClosureBudget,
}

impl CrossCheck {
    /// A small universe suited to the degree.
    pub fn default_for(degree: usize) -> Self {
        let coord_bound = match degree {
            2 => 12,
            3 => 4,
            _ => 2,
        };
        CrossCheck { coord_bound, budget: ClosureBudget::default() }
    }
}

/// What the bounded closure confirmed.
#[derive(Clone, Debug, Serialize)]
pub struct CrossCheckReport {
    pub coord_bound: i64,
    pub universe_size: usize,
    pub steps: usize,
    /// Every pair related by bounded closure is related by the class.
    pub sound: bool,
    /// Every canonical generator pair is related by bounded closure.
    pub canonical_reachable: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Classification {
    pub class: CongruenceClass,
    pub canonical_generators: Vec<(OrderElement, OrderElement)>,
    pub cross_check: Option<CrossCheckReport>,
}

/// Classifies the congruence on `S` generated by `pairs`.
///
/// With `cross_check` set, bounded closure on a coordinate box is run on
/// the same generators; a pair it relates that the class does not relate
/// raises a consistency error. Reachability of the canonical generators is
/// reported but is not an error, since bounded closure may miss relations.
pub fn classify_congruence(
    order: &RealOrder,
    pairs: &[(OrderElement, OrderElement)],
    cross_check: Option<CrossCheck>,
) -> Result<Classification> {
    for (a, b) in pairs {
        for x in [a, b] {
            if x.coords.len() != order.degree() || !order.in_s(x) {
                return Err(Error::invalid(format!("{x} is not an element of S")));
            }
        }
    }
    let nontrivial: Vec<&(OrderElement, OrderElement)> = pairs.iter().filter(|(a, b)| a != b).collect();
    let class = if nontrivial.is_empty() {
        CongruenceClass::Trivial
    } else {
        let diffs: Vec<OrderElement> = nontrivial.iter().map(|(a, b)| order.abs(&order.sub(a, b))).collect();
        let ideal = order.ideal(&diffs)?;
        let j = if nontrivial.iter().any(|(a, b)| a.is_zero() || b.is_zero()) { 0 } else { 1 };
        CongruenceClass::Ideal { ideal, j }
    };
    let canonical = canonical_generators(order, &class, None);
    let report = match cross_check {
        None => None,
        Some(cfg) => Some(cross_check_classification(order, pairs, &class, &canonical, cfg)?),
    };
    Ok(Classification { class, canonical_generators: canonical, cross_check: report })
}

fn cross_check_classification(
    order: &RealOrder,
    pairs: &[(OrderElement, OrderElement)],
    class: &CongruenceClass,
    canonical: &[(OrderElement, OrderElement)],
    cfg: CrossCheck,
) -> Result<CrossCheckReport> {
    let needed = pairs
        .iter()
        .flat_map(|(a, b)| [a, b])
        .filter_map(|x| x.small_coords())
        .flat_map(|c| c.into_iter().map(i64::abs))
        .max()
        .unwrap_or(0);
    let universe = OrderUniverse::new(order, cfg.coord_bound.max(needed))?;
    cross_check_in(order, &universe, pairs, class, canonical, cfg.budget)
}

/// Bounded closure of `pairs` inside a prebuilt universe, compared with
/// `class`. Errors if the closure relates a pair the class does not.
pub fn cross_check_in(
    order: &RealOrder,
    universe: &OrderUniverse,
    pairs: &[(OrderElement, OrderElement)],
    class: &CongruenceClass,
    canonical: &[(OrderElement, OrderElement)],
    budget: ClosureBudget,
) -> Result<CrossCheckReport> {
    let gens: Vec<(usize, usize)> = pairs
        .iter()
        .map(|(a, b)| match (universe.index_of(a), universe.index_of(b)) {
            (Some(x), Some(y)) => Ok((x, y)),
            _ => Err(Error::invalid("generator does not fit the cross-check universe")),
        })
        .collect::<Result<_>>()?;
    let out = closure_on(universe, &gens, budget)?;
    let sound = universe.check_soundness(order, class, &out.partition);
    if !sound.is_empty() {
        let (x, y) = &sound[0];
        return Err(Error::Consistency(format!("bounded closure relates {x} and {y}, which the class does not")));
    }
    let canonical_reachable = canonical.iter().all(|(a, b)| {
        matches!((universe.index_of(a), universe.index_of(b)), (Some(x), Some(y)) if out.partition.related(x, y))
    });
    Ok(CrossCheckReport {
        coord_bound: universe.bound,
        universe_size: universe.size(),
        steps: out.steps,
        sound: true,
        canonical_reachable,
    })
}

/// The pairs `(j, j + |x|)` for the given k-ideal generators (default: the
/// ideal's own generators). They generate the congruence `class`.
pub fn canonical_generators(
    order: &RealOrder,
    class: &CongruenceClass,
    ideal_gens: Option<&[OrderElement]>,
) -> Vec<(OrderElement, OrderElement)> {
    match class {
        CongruenceClass::Trivial => Vec::new(),
        CongruenceClass::Ideal { ideal, j } => {
            let base = order.from_int(*j as i64);
            ideal_gens
                .unwrap_or(ideal.generators())
                .iter()
                .filter(|g| !g.is_zero())
                .map(|g| (base.clone(), order.add(&base, &order.abs(g))))
                .collect()
        }
    }
}

/// A finite quotient `S/C` with the data used to build it.
#[derive(Clone, Debug, Serialize)]
pub struct QuotientReport {
    #[serde(skip)]
    pub semiring: FiniteSemiring,
    pub size: usize,
    #[serde(serialize_with = "json::big")]
    pub determinant: BigInt,
    #[serde(serialize_with = "json::vector")]
    pub smith_invariants: Vec<BigInt>,
    pub j: u8,
    /// Residues of `R/I` in the order of table indices (after ω for j=1).
    pub representatives: Vec<OrderElement>,
}

/// Largest `|R/I|` for which tables are built.
pub const MAX_QUOTIENT: usize = 4096;

/// `R/I` for `j = 0`, `(R/I)_*` for `j = 1`.
pub fn quotient_semiring(order: &RealOrder, class: &CongruenceClass) -> Result<QuotientReport> {
    let CongruenceClass::Ideal { ideal, j } = class else {
        return Err(Error::Unsupported("the trivial congruence has an infinite quotient".into()));
    };
    let det = ideal.determinant();
    let size = det
        .to_usize()
        .filter(|&s| s <= MAX_QUOTIENT)
        .ok_or_else(|| Error::Budget { what: "quotient size".into(), limit: MAX_QUOTIENT, partial: None })?;
    let d = order.degree();
    let radices: Vec<usize> = (0..d).map(|i| ideal.hnf[i][i].to_usize().unwrap()).collect();
    let decode = |mut k: usize| -> OrderElement {
        let mut coords = vec![BigInt::zero(); d];
        for i in (0..d).rev() {
            coords[i] = BigInt::from(k % radices[i]);
            k /= radices[i];
        }
        OrderElement { coords }
    };
    let encode = |x: &OrderElement| -> usize {
        let r = ideal.reduce(x);
        r.coords.iter().zip(&radices).fold(0, |acc, (c, &m)| acc * m + c.to_usize().unwrap())
    };
    let reps: Vec<OrderElement> = (0..size).map(decode).collect();
    let mut add = Vec::with_capacity(size * size);
    let mut mul = Vec::with_capacity(size * size);
    for a in &reps {
        for b in &reps {
            add.push(encode(&order.add(a, b)));
            mul.push(encode(&order.mul(a, b)));
        }
    }
    let ring = FiniteSemiring::from_tables(size, add, mul, encode(&order.zero()), encode(&order.one()))?
        .with_labels(reps.iter().map(|r| r.to_string()).collect())?;
    let semiring = if *j == 1 { make_star(&ring) } else { ring };
    semiring.ensure_valid().map_err(|e| Error::Consistency(format!("quotient tables: {e}")))?;
    Ok(QuotientReport {
        size: semiring.size(),
        semiring,
        smith_invariants: ideal.smith_invariants(),
        determinant: det,
        j: *j,
        representatives: reps,
    })
}

/// The positive elements of ℤ[θ] with every coordinate in `[-C, C]`, with
/// translations by its own elements (partial: results must stay in the box).
pub struct OrderUniverse {
    degree: usize,
    bound: i64,
    coords: Vec<i64>,
    grid: Vec<u32>,
    powers: Vec<Vec<i64>>,
    // Row-major add and mul tables when the universe is small enough.
    tables: Option<(Vec<u32>, Vec<u32>)>,
}

const NOT_IN_S: u32 = u32::MAX;
const MAX_TABLE_ENTRIES: usize = 1 << 24;

impl OrderUniverse {
    pub fn new(order: &RealOrder, bound: i64) -> Result<Self> {
        let d = order.degree();
        let side = (2 * bound + 1) as usize;
        let cells = side
            .checked_pow(d as u32)
            .filter(|&c| c <= 1 << 22)
            .ok_or_else(|| Error::Budget { what: "order universe cells".into(), limit: 1 << 22, partial: None })?;
        let powers = order
            .powers
            .iter()
            .map(|p| p.iter().map(|c| c.to_i64()).collect::<Option<Vec<_>>>())
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::invalid("defining polynomial coefficients too large"))?;
        let mut grid = vec![NOT_IN_S; cells];
        let mut coords = Vec::new();
        let mut count = 0u32;
        // Elements are numbered in grid order; signs are exact.
        let mut point = vec![0i64; d];
        for cell in 0..cells {
            let mut k = cell;
            for p in point.iter_mut() {
                *p = (k % side) as i64 - bound;
                k /= side;
            }
            let el = order.element(&point)?;
            if order.sign(&el) >= 0 {
                grid[cell] = count;
                coords.extend_from_slice(&point);
                count += 1;
            }
        }
        let mut u = OrderUniverse { degree: d, bound, coords, grid, powers, tables: None };
        let n = u.size();
        if n * n <= MAX_TABLE_ENTRIES {
            let code = |r: Option<usize>| r.map_or(NOT_IN_S, |x| x as u32);
            let add = (0..n * n).map(|k| code(u.compute(k % n, k / n))).collect();
            let mul = (0..n * n).map(|k| code(u.compute(n + k % n, k / n))).collect();
            u.tables = Some((add, mul));
        }
        Ok(u)
    }

    pub fn bound(&self) -> i64 {
        self.bound
    }

    fn cell_of(&self, c: &[i128]) -> Option<usize> {
        let side = (2 * self.bound + 1) as i128;
        let mut cell = 0i128;
        for &x in c.iter().rev() {
            if x.abs() > self.bound as i128 {
                return None;
            }
            cell = cell * side + (x + self.bound as i128);
        }
        Some(cell as usize)
    }

    fn lookup(&self, c: &[i128]) -> Option<usize> {
        let g = self.grid[self.cell_of(c)?];
        (g != NOT_IN_S).then_some(g as usize)
    }

    pub fn index_of(&self, x: &OrderElement) -> Option<usize> {
        let c: Vec<i128> = x.small_coords()?.into_iter().map(i128::from).collect();
        self.lookup(&c)
    }

    pub fn element(&self, order: &RealOrder, i: usize) -> OrderElement {
        order.element(&self.coords[i * self.degree..(i + 1) * self.degree]).unwrap()
    }

    fn point(&self, i: usize) -> &[i64] {
        &self.coords[i * self.degree..(i + 1) * self.degree]
    }

    /// Pairs related by `p` but not by `class`, found by comparing each
    /// class of `p` with its smallest member. Universe elements lie in `S`
    /// already, so only zero needs special treatment.
    pub fn check_soundness(
        &self,
        order: &RealOrder,
        class: &CongruenceClass,
        p: &Partition,
    ) -> Vec<(OrderElement, OrderElement)> {
        let mut bad = Vec::new();
        for members in p.classes() {
            let rep = self.element(order, members[0]);
            for &m in &members[1..] {
                let x = self.element(order, m);
                let related = match class {
                    CongruenceClass::Trivial => false,
                    CongruenceClass::Ideal { ideal, j } => {
                        (*j == 0 || (!rep.is_zero() && !x.is_zero())) && ideal.contains(&order.sub(&rep, &x))
                    }
                };
                if !related {
                    bad.push((rep.clone(), x));
                }
            }
        }
        bad
    }
}

impl Carrier for OrderUniverse {
    fn size(&self) -> usize {
        self.coords.len() / self.degree
    }

    fn op_count(&self) -> usize {
        2 * self.size()
    }

    fn apply(&self, op: usize, x: usize) -> Option<usize> {
        match &self.tables {
            Some((add, mul)) => {
                let n = self.size();
                let r = if op < n { add[x * n + op] } else { mul[x * n + op - n] };
                (r != NOT_IN_S).then_some(r as usize)
            }
            None => self.compute(op, x),
        }
    }
}

impl OrderUniverse {
    fn compute(&self, op: usize, x: usize) -> Option<usize> {
        let n = self.size();
        let d = self.degree;
        let a = self.point(x);
        let mut out = [0i128; 8];
        let out = &mut out[..d.min(8)];
        if d > 8 {
            return None;
        }
        if op < n {
            let b = self.point(op);
            for i in 0..d {
                out[i] = (a[i] + b[i]) as i128;
            }
        } else {
            let b = self.point(op - n);
            for (i, &ai) in a.iter().enumerate() {
                if ai == 0 {
                    continue;
                }
                for (j, &bj) in b.iter().enumerate() {
                    if bj == 0 {
                        continue;
                    }
                    let ab = (ai * bj) as i128;
                    for (o, &p) in out.iter_mut().zip(&self.powers[i + j]) {
                        *o += ab * p as i128;
                    }
                }
            }
        }
        self.lookup(out)
    }
}

/// Minimal operations needed to replay a derivation.
pub trait SemiringOps {
    type Elem: Clone + PartialEq + fmt::Debug;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn zero(&self) -> Self::Elem;
}

impl SemiringOps for FiniteSemiring {
    type Elem = usize;
    fn add(&self, a: &usize, b: &usize) -> usize {
        FiniteSemiring::add(self, *a, *b)
    }
    fn mul(&self, a: &usize, b: &usize) -> usize {
        FiniteSemiring::mul(self, *a, *b)
    }
    fn one(&self) -> usize {
        FiniteSemiring::one(self)
    }
    fn zero(&self) -> usize {
        FiniteSemiring::zero(self)
    }
}

impl SemiringOps for RealOrder {
    type Elem = OrderElement;
    fn add(&self, a: &OrderElement, b: &OrderElement) -> OrderElement {
        RealOrder::add(self, a, b)
    }
    fn mul(&self, a: &OrderElement, b: &OrderElement) -> OrderElement {
        RealOrder::mul(self, a, b)
    }
    fn one(&self) -> OrderElement {
        RealOrder::one(self)
    }
    fn zero(&self) -> OrderElement {
        RealOrder::zero(self)
    }
}

/// One elementary congruence step `m·l + c ~ m·r + c` obtained from a known
/// relation `l ~ r` (or its reverse).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChainLink<E> {
    /// Index of the relation used: 0 is the premise `x ~ x+y`, `k` is the
    /// conclusion `x^(k+1) ~ x^(k+1) + y^(k+1)`.
    pub source: usize,
    pub reversed: bool,
    pub multiplier: E,
    pub addend: E,
    pub from: E,
    pub to: E,
}

/// Derivation of `xⁿ ~ xⁿ + yⁿ` from `x ~ x + y`, three links per power.
#[derive(Clone, Debug, Serialize)]
pub struct PowerChain<E> {
    pub x: E,
    pub y: E,
    pub n: u32,
    /// `relations[k]` is `(x^(k+1), x^(k+1) + y^(k+1))`.
    pub relations: Vec<(E, E)>,
    pub links: Vec<ChainLink<E>>,
}

fn power<S: SemiringOps>(s: &S, a: &S::Elem, n: u32) -> S::Elem {
    (0..n).fold(s.one(), |acc, _| s.mul(&acc, a))
}

/// Builds the transcript: from `x^k ~ x^k + y^k`,
/// `x^(k+1) ~ x^(k+1) + x·y^k ~ x^(k+1) + x·y^k + y^(k+1) ~ x^(k+1) + y^(k+1)`.
pub fn power_relation_chain<S: SemiringOps>(s: &S, x: &S::Elem, y: &S::Elem, n: u32) -> Result<PowerChain<S::Elem>> {
    if n == 0 {
        return Err(Error::invalid("power_relation_chain needs n >= 1"));
    }
    let mut relations = vec![(x.clone(), s.add(x, y))];
    let mut links = Vec::new();
    for k in 1..n {
        let xk1 = power(s, x, k + 1);
        let yk = power(s, y, k);
        let yk1 = power(s, y, k + 1);
        let x_yk = s.mul(x, &yk);
        let step = |source: usize, reversed: bool, multiplier: S::Elem, addend: S::Elem| {
            let (l, r) = &relations[source];
            let (l, r) = if reversed { (r, l) } else { (l, r) };
            ChainLink {
                source,
                reversed,
                from: s.add(&s.mul(&multiplier, l), &addend),
                to: s.add(&s.mul(&multiplier, r), &addend),
                multiplier,
                addend,
            }
        };
        let l1 = step(k as usize - 1, false, x.clone(), s.zero());
        let l2 = step(0, false, yk.clone(), xk1.clone());
        let l3 = step(k as usize - 1, true, x.clone(), yk1.clone());
        debug_assert_eq!(l1.to, s.add(&xk1, &x_yk));
        links.extend([l1, l2, l3]);
        relations.push((xk1.clone(), s.add(&xk1, &yk1)));
    }
    Ok(PowerChain { x: x.clone(), y: y.clone(), n, relations, links })
}

/// Replays a transcript using only the semiring operations. Returns a
/// description of the first problem found.
pub fn verify_power_chain<S: SemiringOps>(s: &S, chain: &PowerChain<S::Elem>) -> std::result::Result<(), String> {
    let (x, y) = (&chain.x, &chain.y);
    if chain.n == 0 {
        return Err("n must be at least 1".into());
    }
    if chain.relations.len() != chain.n as usize || chain.links.len() != 3 * (chain.n as usize - 1) {
        return Err(format!(
            "expected {} relations and {} links, got {} and {}",
            chain.n,
            3 * (chain.n - 1),
            chain.relations.len(),
            chain.links.len()
        ));
    }
    if chain.relations[0] != (x.clone(), s.add(x, y)) {
        return Err("premise is not x ~ x+y".into());
    }
    for k in 1..chain.n as usize {
        let want = (power(s, x, k as u32 + 1), s.add(&power(s, x, k as u32 + 1), &power(s, y, k as u32 + 1)));
        if chain.relations[k] != want {
            return Err(format!("relation {k} is not x^{0} ~ x^{0} + y^{0}", k + 1));
        }
        let round = &chain.links[3 * (k - 1)..3 * k];
        if round[0].from != want.0 || round[2].to != want.1 {
            return Err(format!("round {k} does not connect its endpoints"));
        }
        for (i, link) in round.iter().enumerate() {
            if link.source >= k {
                return Err(format!("round {k} link {i} uses relation {} not yet derived", link.source));
            }
            let (l, r) = &chain.relations[link.source];
            let (l, r) = if link.reversed { (r, l) } else { (l, r) };
            if link.from != s.add(&s.mul(&link.multiplier, l), &link.addend)
                || link.to != s.add(&s.mul(&link.multiplier, r), &link.addend)
            {
                return Err(format!("round {k} link {i} is not an instance of its source relation"));
            }
            if i > 0 && round[i - 1].to != link.from {
                return Err(format!("round {k} link {i} does not continue the chain"));
            }
        }
    }
    Ok(())
}

/// `u·f(u) = u·g(u) + l` with `f, g ∈ ℕ[X]`, and integers `n = m + l`
/// with `m > a·f(a) + a·g(a)`, so that `a ~ a+u` forces `m ~ n`.
#[derive(Clone, Debug, Serialize)]
pub struct IntegerRelation {
    pub minimal_polynomial: String,
    pub f: String,
    pub g: String,
    #[serde(skip)]
    pub f_poly: IntPolynomial,
    #[serde(skip)]
    pub g_poly: IntPolynomial,
    #[serde(serialize_with = "json::big")]
    pub l: BigInt,
    #[serde(serialize_with = "json::big")]
    pub m: BigInt,
    #[serde(serialize_with = "json::big")]
    pub n: BigInt,
}

/// Minimal polynomial over ℤ (primitive, positive leading coefficient) of
/// an order element, from the first linear dependence among its powers.
pub fn minimal_polynomial(order: &RealOrder, u: &OrderElement) -> Result<IntPolynomial> {
    let mut powers = vec![order.one()];
    for k in 1..=order.degree() {
        let next = order.mul(powers.last().unwrap(), u);
        let cols: Vec<Vec<BigInt>> = powers.iter().map(|p| p.coords.clone()).collect();
        if let Some(c) = solve_columns(&cols, &next.coords) {
            // u^k = Σ c_i u^i
            let mut coeffs: Vec<BigRational> = c.into_iter().map(|x| -x).collect();
            coeffs.push(BigRational::one());
            debug_assert_eq!(coeffs.len(), k + 1);
            return Ok(IntPolynomial::primitive_from(&crate::poly::RatPoly::new(coeffs)));
        }
        powers.push(next);
    }
    Err(Error::Consistency("no linear dependence among powers up to the degree".into()))
}

/// Builds the relation used to turn `a ~ a+u` into an integer relation.
pub fn derive_integer_relation(order: &RealOrder, a: &OrderElement, u: &OrderElement) -> Result<IntegerRelation> {
    if order.sign(a) <= 0 {
        return Err(Error::invalid(format!("a = {a} must be positive")));
    }
    if order.sign(u) <= 0 {
        return Err(Error::invalid(format!("u = {u} must be positive")));
    }
    let p = minimal_polynomial(order, u)?;
    let c = p.coefficients();
    // P = X·h + c0 with c0 ≠ 0 because P is irreducible and u ≠ 0.
    let c0 = c[0].clone();
    if c0.is_zero() {
        return Err(Error::Consistency(format!("minimal polynomial {p} of a nonzero element has no constant term")));
    }
    let h = &c[1..];
    let pos: Vec<BigInt> = h.iter().map(|x| if x.is_positive() { x.clone() } else { BigInt::zero() }).collect();
    let neg: Vec<BigInt> = h.iter().map(|x| if x.is_negative() { -x } else { BigInt::zero() }).collect();
    // u·(pos - neg)(u) = -c0
    let (f, g) = if c0.is_negative() { (pos, neg) } else { (neg, pos) };
    let f_poly = IntPolynomial::new(f);
    let g_poly = IntPolynomial::new(g);
    let l = c0.abs();
    let lhs = order.mul(u, &order.eval(&f_poly, u));
    let rhs = order.add(&order.mul(u, &order.eval(&g_poly, u)), &order.from_big_int(&l));
    if lhs != rhs {
        return Err(Error::Consistency(format!("u·f(u) = u·g(u) + l fails for u = {u}")));
    }
    let bound = order.add(&order.mul(a, &order.eval(&f_poly, a)), &order.mul(a, &order.eval(&g_poly, a)));
    let m = order.to_field(&bound).floor() + 1;
    let n = &m + &l;
    Ok(IntegerRelation {
        minimal_polynomial: p.to_string(),
        f: f_poly.to_string(),
        g: g_poly.to_string(),
        f_poly,
        g_poly,
        l,
        m,
        n,
    })
}

/// Independent check of an [`IntegerRelation`].
pub fn verify_integer_relation(order: &RealOrder, a: &OrderElement, u: &OrderElement, r: &IntegerRelation) -> bool {
    let nonneg = |p: &IntPolynomial| p.coefficients().iter().all(|c| !c.is_negative());
    let lhs = order.mul(u, &order.eval(&r.f_poly, u));
    let rhs = order.add(&order.mul(u, &order.eval(&r.g_poly, u)), &order.from_big_int(&r.l));
    let bound = order.add(&order.mul(a, &order.eval(&r.f_poly, a)), &order.mul(a, &order.eval(&r.g_poly, a)));
    let m = order.from_big_int(&r.m);
    nonneg(&r.f_poly)
        && nonneg(&r.g_poly)
        && r.l.is_positive()
        && lhs == rhs
        && &r.n - &r.m == r.l
        && order.sign(&order.sub(&m, &bound)) > 0
}

/// Searches the coordinate box `[-b, b]^d` for one or two elements that
/// generate `ideal`.
pub fn find_small_generators(order: &RealOrder, ideal: &IdealLattice, b: i64) -> Option<Vec<OrderElement>> {
    let d = order.degree();
    let side = (2 * b + 1) as usize;
    let cells = side.checked_pow(d as u32)?;
    let mut members: Vec<OrderElement> = (0..cells)
        .map(|mut k| {
            let c: Vec<i64> = (0..d)
                .map(|_| {
                    let v = (k % side) as i64 - b;
                    k /= side;
                    v
                })
                .collect();
            order.element(&c).unwrap()
        })
        .filter(|x| !x.is_zero() && ideal.contains(x))
        .collect();
    members.sort_by_key(|x| x.coords.iter().map(|c| c.abs()).sum::<BigInt>());
    let generates = |g: &[OrderElement]| order.ideal(g).map(|i| &i == ideal).unwrap_or(false);
    if let Some(x) = members.iter().find(|x| generates(std::slice::from_ref(*x))) {
        return Some(vec![x.clone()]);
    }
    for (i, x) in members.iter().enumerate() {
        for y in &members[i + 1..] {
            if generates(&[x.clone(), y.clone()]) {
                return Some(vec![x.clone(), y.clone()]);
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zsqrt2() -> Arc<RealOrder> {
        RealOrder::from_spec("x^2-2@1").unwrap()
    }

    #[test]
    fn orders() {
        let o = zsqrt2();
        let w = o.theta();
        assert_eq!(o.mul(&w, &w), o.from_int(2));
        assert!(RealOrder::from_spec("x^2+1@0").is_err());
        assert!(RealOrder::from_spec("x-2@0").is_err());
        let c = RealOrder::from_spec("x^3-2@0").unwrap();
        let t = c.theta();
        assert_eq!(c.pow(&t, 3), c.from_int(2));
        assert_eq!(c.pow(&t, 4), c.scale(&BigInt::from(2), &t));
        assert!(o.in_s(&o.parse("w-1").unwrap()));
        assert!(!o.in_s(&o.parse("1-w").unwrap()));
        assert!(o.in_s(&o.zero()));
        assert!(o.parse("w/2").is_err());
    }

    #[test]
    fn ideals() {
        let o = zsqrt2();
        let p = |s: &str| o.parse(s).unwrap();
        let i = o.ideal(&[p("w")]).unwrap();
        assert_eq!(i.determinant(), BigInt::from(2));
        assert!(i.contains(&p("3w")));
        assert!(!i.contains(&p("1")));
        assert!(i.contains(&o.zero()));
        assert_eq!(o.ideal(&[p("1")]).unwrap().determinant(), BigInt::from(1));
        assert_eq!(o.ideal(&[p("2")]).unwrap().determinant(), BigInt::from(4));
        assert_eq!(o.ideal(&[p("1+w")]).unwrap().determinant(), BigInt::from(1));
        assert_eq!(o.ideal(&[p("3")]).unwrap().determinant(), BigInt::from(9));
        assert!(o.ideal(&[o.zero()]).is_err());
        let k = k_ideal_of(&o, &o.ideal(&[p("-w")]).unwrap());
        assert_eq!(k.generators, vec![p("w")]);
        assert_eq!(ring_ideal_of(&o, &k).unwrap(), i);
        assert!(k_ideal_of(&o, &o.ideal(&[p("1")]).unwrap()).contains(&o, &o.one()));
    }

    #[test]
    fn classification() {
        let o = zsqrt2();
        let p = |s: &str| o.parse(s).unwrap();
        let cc = Some(CrossCheck::default_for(2));
        let c = classify_congruence(&o, &[(p("1"), p("1+w"))], cc).unwrap();
        assert_eq!(c.class.j(), Some(1));
        assert_eq!(c.canonical_generators, vec![(p("1"), p("1+w"))]);
        assert!(c.cross_check.unwrap().canonical_reachable);
        let c0 = classify_congruence(&o, &[(p("0"), p("w"))], cc).unwrap();
        assert_eq!(c0.class.j(), Some(0));
        assert_eq!(classify_congruence(&o, &[(p("3"), p("3"))], cc).unwrap().class, CongruenceClass::Trivial);
        assert!(classify_congruence(&o, &[(p("1-w"), p("1"))], None).is_err());

        let class1 = c.class.clone();
        assert!(!is_related(&o, &class1, &p("0"), &p("w")).unwrap());
        assert!(is_related(&o, &c0.class, &p("0"), &p("w")).unwrap());
        assert!(is_related(&o, &class1, &p("1"), &p("1+2w")).unwrap());
    }

    #[test]
    fn quotients() {
        let o = zsqrt2();
        let p = |s: &str| o.parse(s).unwrap();
        let i = o.ideal(&[p("w")]).unwrap();
        let q0 = quotient_semiring(&o, &CongruenceClass::Ideal { ideal: i.clone(), j: 0 }).unwrap();
        assert_eq!(q0.size, 2);
        assert!(q0.semiring.is_ring());
        let q1 = quotient_semiring(&o, &CongruenceClass::Ideal { ideal: i, j: 1 }).unwrap();
        assert_eq!(q1.size, 3);
        let i2 = o.ideal(&[p("2")]).unwrap();
        let q = quotient_semiring(&o, &CongruenceClass::Ideal { ideal: i2, j: 0 }).unwrap();
        assert_eq!(q.size, 4);
        assert_eq!(q.smith_invariants, vec![BigInt::from(2), BigInt::from(2)]);
        assert!(matches!(quotient_semiring(&o, &CongruenceClass::Trivial), Err(Error::Unsupported(_))));
    }

    #[test]
    fn power_chains() {
        let o = zsqrt2();
        let (x, y) = (o.one(), o.one());
        let c1 = power_relation_chain(&*o, &x, &y, 1).unwrap();
        assert!(c1.links.is_empty());
        let c = power_relation_chain(&*o, &o.parse("1+w").unwrap(), &o.parse("w").unwrap(), 3).unwrap();
        assert_eq!(c.links.len(), 6);
        verify_power_chain(&*o, &c).unwrap();
        let mut bad = c.clone();
        bad.links[4].addend = o.one();
        assert!(verify_power_chain(&*o, &bad).is_err());
        let m4 = crate::semiring::make_minmax(4).unwrap();
        let c = power_relation_chain(&m4, &1, &2, 5).unwrap();
        verify_power_chain(&m4, &c).unwrap();
    }

    #[test]
    fn integer_relations() {
        let o = zsqrt2();
        let w = o.theta();
        let r = derive_integer_relation(&o, &w, &w).unwrap();
        assert_eq!((r.f.as_str(), r.g.as_str()), ("x", "0"));
        assert_eq!((r.l.clone(), r.m.clone(), r.n.clone()), (BigInt::from(2), BigInt::from(3), BigInt::from(5)));
        assert!(verify_integer_relation(&o, &w, &w, &r));
        let u = o.parse("1+w").unwrap();
        let r = derive_integer_relation(&o, &w, &u).unwrap();
        assert_eq!((r.f.as_str(), r.g.as_str(), r.l.clone()), ("x", "2", BigInt::from(1)));
        let c = RealOrder::from_spec("x^3-2@0").unwrap();
        let t = c.theta();
        let r = derive_integer_relation(&c, &t, &t).unwrap();
        assert_eq!((r.f.as_str(), r.g.as_str(), r.l.clone()), ("x^2", "0", BigInt::from(2)));
        assert!(derive_integer_relation(&o, &o.zero(), &w).is_err());
        assert!(derive_integer_relation(&o, &w, &o.zero()).is_err());
    }

    #[test]
    fn small_generators() {
        let o = zsqrt2();
        let i = o.ideal(&[o.from_int(2), o.theta()]).unwrap();
        let g = find_small_generators(&o, &i, 2).unwrap();
        assert_eq!(o.ideal(&g).unwrap(), i);
    }
}
