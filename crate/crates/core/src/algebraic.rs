//! Exact arithmetic and sign determination in a real number field ℚ(θ).
//!
//! A [`NumberField`] is fixed by a monic irreducible integer polynomial and
//! one of its real roots. Elements are coordinate vectors in the power basis
//! `1, θ, …, θ^(d-1)`. Every comparison is decided exactly: the sign of a
//! nonzero element is read off an interval enclosure that is refined until
//! it no longer straddles zero, which always happens because a nonzero
//! element of the field has a nonzero real value.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::poly::{format_terms, isolate_real_roots, parse_univariate, IntPolynomial, RatPoly, RealRoot};

/// The real field ℚ(θ) for a chosen real root θ.
pub struct NumberField {
    polynomial: IntPolynomial,
    modulus: RatPoly,
    root_index: usize,
    root: RealRoot,
    // Tightest isolating interval found so far; only ever narrowed.
    refined: Mutex<RealRoot>,
}

impl fmt::Debug for NumberField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NumberField({}@{})", self.polynomial, self.root_index)
    }
}

impl NumberField {
    /// Builds ℚ(θ) where θ is the `root_index`-th real root (increasing
    /// order, zero based) of `polynomial`.
    ///
    /// The polynomial must be monic. Irreducibility is checked only through
    /// the rational root test, which is a complete check up to degree 3.
    pub fn new(polynomial: IntPolynomial, root_index: usize) -> Result<Arc<NumberField>> {
        let degree = polynomial
            .degree()
            .filter(|&d| d >= 1)
            .ok_or_else(|| Error::invalid("minimal polynomial must have degree at least 1"))?;
        if !polynomial.is_monic() {
            return Err(Error::invalid(format!("{polynomial} is not monic")));
        }
        let roots = isolate_real_roots(&polynomial)?;
        if degree >= 2 {
            if let Some(r) = roots.iter().find(|r| r.is_exact()) {
                return Err(Error::invalid(format!(
                    "{polynomial} is reducible: it has the rational root {}",
                    r.lo()
                )));
            }
            if polynomial.to_rational().squarefree_part().degree() != Some(degree) {
                return Err(Error::invalid(format!("{polynomial} is not squarefree")));
            }
        }
        let root = roots.get(root_index).cloned().ok_or_else(|| {
            Error::invalid(format!(
                "{polynomial} has {} real roots, index {root_index} out of range",
                roots.len()
            ))
        })?;
        Ok(Arc::new(NumberField {
            modulus: polynomial.to_rational(),
            polynomial,
            root_index,
            refined: Mutex::new(root.clone()),
            root,
        }))
    }

    pub fn degree(&self) -> usize {
        self.polynomial.degree().unwrap()
    }

    pub fn polynomial(&self) -> &IntPolynomial {
        &self.polynomial
    }

    pub fn root_index(&self) -> usize {
        self.root_index
    }

    /// The isolating interval the field was created with.
    pub fn root(&self) -> &RealRoot {
        &self.root
    }

    /// `poly@index`, the textual form accepted by [`FieldSpec`].
    pub fn spec_string(&self) -> String {
        format!("{}@{}", self.polynomial, self.root_index)
    }

    /// An isolating interval of θ no wider than `2^-bits`.
    pub fn root_interval(&self, bits: u64) -> (BigRational, BigRational) {
        let width = BigRational::new(BigInt::one(), BigInt::one() << bits);
        let mut cached = self.refined.lock().unwrap();
        cached.refine_to(&width);
        (cached.lo().clone(), cached.hi().clone())
    }

    fn reduce(&self, p: RatPoly) -> Vec<BigRational> {
        let mut c = p.rem(&self.modulus).into_coefficients();
        c.resize(self.degree(), BigRational::zero());
        c
    }
}

/// `poly@root_index`, e.g. `x^2-2@1` for the positive square root of 2.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldSpec {
    pub polynomial: IntPolynomial,
    pub root_index: usize,
}

impl FromStr for FieldSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (poly, idx) = s
            .rsplit_once('@')
            .ok_or_else(|| Error::invalid(format!("field spec {s:?} must look like poly@index")))?;
        let root_index = idx
            .trim()
            .parse()
            .map_err(|_| Error::invalid(format!("bad root index in {s:?}")))?;
        Ok(FieldSpec { polynomial: poly.parse()?, root_index })
    }
}

impl FieldSpec {
    pub fn build(&self) -> Result<Arc<NumberField>> {
        NumberField::new(self.polynomial.clone(), self.root_index)
    }
}

/// An element of ℚ(θ) in the power basis.
#[derive(Clone)]
pub struct FieldElement {
    field: Arc<NumberField>,
    coords: Vec<BigRational>,
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FieldElement({self})")
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", format_terms(&self.coords, "w"))
    }
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        same_field(&self.field, &other.field) && self.coords == other.coords
    }
}

impl Eq for FieldElement {}

fn same_field(a: &Arc<NumberField>, b: &Arc<NumberField>) -> bool {
    Arc::ptr_eq(a, b) || (a.polynomial == b.polynomial && a.root_index == b.root_index)
}

impl FieldElement {
    pub fn from_coords(field: &Arc<NumberField>, coords: Vec<BigRational>) -> Result<Self> {
        if coords.len() != field.degree() {
            return Err(Error::invalid(format!(
                "expected {} coordinates, got {}",
                field.degree(),
                coords.len()
            )));
        }
        Ok(FieldElement { field: field.clone(), coords })
    }

    pub fn from_integers(field: &Arc<NumberField>, coords: &[BigInt]) -> Result<Self> {
        Self::from_coords(field, coords.iter().map(|c| BigRational::from_integer(c.clone())).collect())
    }

    /// Reduces an arbitrary polynomial in θ.
    pub fn from_poly(field: &Arc<NumberField>, p: RatPoly) -> Self {
        FieldElement { coords: field.reduce(p), field: field.clone() }
    }

    pub fn from_rational(field: &Arc<NumberField>, q: BigRational) -> Self {
        Self::from_poly(field, RatPoly::constant(q))
    }

    pub fn from_int(field: &Arc<NumberField>, n: i64) -> Self {
        Self::from_rational(field, BigRational::from_integer(BigInt::from(n)))
    }

    pub fn zero(field: &Arc<NumberField>) -> Self {
        Self::from_poly(field, RatPoly::zero())
    }

    pub fn one(field: &Arc<NumberField>) -> Self {
        Self::from_int(field, 1)
    }

    /// θ itself.
    pub fn generator(field: &Arc<NumberField>) -> Self {
        Self::from_poly(field, RatPoly::new(vec![BigRational::zero(), BigRational::one()]))
    }

    /// Parses an expression in one variable (any letter), e.g. `-7+5w`.
    pub fn parse(field: &Arc<NumberField>, s: &str) -> Result<Self> {
        let (coeffs, _) = parse_univariate(s)?;
        Ok(Self::from_poly(field, RatPoly::new(coeffs)))
    }

    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }

    pub fn coords(&self) -> &[BigRational] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    fn as_poly(&self) -> RatPoly {
        RatPoly::new(self.coords.clone())
    }

    fn check_field(&self, other: &FieldElement) {
        assert!(
            same_field(&self.field, &other.field),
            "mixing elements of {:?} and {:?}",
            self.field,
            other.field
        );
    }

    pub fn scale(&self, k: &BigRational) -> FieldElement {
        FieldElement { field: self.field.clone(), coords: self.coords.iter().map(|c| c * k).collect() }
    }

    pub fn scale_int(&self, k: &BigInt) -> FieldElement {
        self.scale(&BigRational::from_integer(k.clone()))
    }

    pub fn inv(&self) -> Result<FieldElement> {
        if self.is_zero() {
            return Err(Error::Division("inverse of zero field element".into()));
        }
        let (g, s, _) = self.as_poly().extended_gcd(&self.field.modulus);
        if g.degree() != Some(0) {
            // Only reachable when the defining polynomial is reducible.
            return Err(Error::Consistency(format!(
                "{self} shares a factor with the minimal polynomial"
            )));
        }
        Ok(FieldElement::from_poly(&self.field, s))
    }

    pub fn div(&self, other: &FieldElement) -> Result<FieldElement> {
        Ok(self * &other.inv()?)
    }

    pub fn pow(&self, n: u32) -> FieldElement {
        let mut acc = FieldElement::one(&self.field);
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Interval containing the real value, evaluated on an isolating
    /// interval of width `2^-bits`.
    pub fn enclosure(&self, bits: u64) -> (BigRational, BigRational) {
        if self.coords.iter().skip(1).all(|c| c.is_zero()) {
            let c = self.coords[0].clone();
            return (c.clone(), c);
        }
        let (lo, hi) = self.field.root_interval(bits);
        self.as_poly().eval_interval(&lo, &hi)
    }

    /// Interval of width at most `width` containing the real value.
    pub fn approx(&self, width: &BigRational) -> (BigRational, BigRational) {
        let mut bits = 32;
        loop {
            let (lo, hi) = self.enclosure(bits);
            if &hi - &lo <= *width {
                return (lo, hi);
            }
            bits *= 2;
        }
    }

    /// Exact sign of the real value: -1, 0 or +1.
    pub fn sign(&self) -> i8 {
        if self.is_zero() {
            return 0;
        }
        let mut bits = 16;
        loop {
            let (lo, hi) = self.enclosure(bits);
            if lo.is_positive() {
                return 1;
            }
            if hi.is_negative() {
                return -1;
            }
            bits *= 2;
        }
    }

    pub fn is_positive(&self) -> bool {
        self.sign() > 0
    }

    pub fn cmp_value(&self, other: &FieldElement) -> std::cmp::Ordering {
        (self - other).sign().cmp(&0)
    }

    /// The unique integer `m` with `m·b ≤ a < (m+1)·b`, for `b > 0`.
    pub fn floor_ratio(a: &FieldElement, b: &FieldElement) -> Result<BigInt> {
        a.check_field(b);
        if b.sign() <= 0 {
            return Err(Error::invalid(format!("floor_ratio needs a positive divisor, got {b}")));
        }
        let q = a.div(b)?;
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        let (lo, _) = q.approx(&half);
        let mut m = lo.floor().to_integer();
        // The enclosure is within 1/2 of the value, so at most a couple of
        // exact corrections are needed.
        while (a - &b.scale_int(&m)).sign() < 0 {
            m -= 1;
        }
        while (a - &b.scale_int(&(&m + 1))).sign() >= 0 {
            m += 1;
        }
        Ok(m)
    }

    /// Floor of the real value.
    pub fn floor(&self) -> BigInt {
        FieldElement::floor_ratio(self, &FieldElement::one(&self.field)).expect("1 is positive")
    }

    /// Approximate value for display only.
    pub fn to_f64(&self) -> f64 {
        let (lo, hi) = self.approx(&BigRational::new(BigInt::one(), BigInt::from(1u64 << 60)));
        ((lo + hi) / BigRational::from_integer(BigInt::from(2))).to_f64().unwrap_or(f64::NAN)
    }
}

impl<'a> Add<&'a FieldElement> for &'a FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: &FieldElement) -> FieldElement {
        self.check_field(rhs);
        FieldElement {
            field: self.field.clone(),
            coords: self.coords.iter().zip(&rhs.coords).map(|(a, b)| a + b).collect(),
        }
    }
}

impl<'a> Sub<&'a FieldElement> for &'a FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: &FieldElement) -> FieldElement {
        self.check_field(rhs);
        FieldElement {
            field: self.field.clone(),
            coords: self.coords.iter().zip(&rhs.coords).map(|(a, b)| a - b).collect(),
        }
    }
}

impl<'a> Mul<&'a FieldElement> for &'a FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: &FieldElement) -> FieldElement {
        self.check_field(rhs);
        FieldElement::from_poly(&self.field, self.as_poly().mul(&rhs.as_poly()))
    }
}

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement { field: self.field.clone(), coords: self.coords.iter().map(|c| -c).collect() }
    }
}

impl Add for FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: FieldElement) -> FieldElement {
        &self + &rhs
    }
}

impl Sub for FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: FieldElement) -> FieldElement {
        &self - &rhs
    }
}

impl Mul for FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: FieldElement) -> FieldElement {
        &self * &rhs
    }
}

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sqrt2() -> Arc<NumberField> {
        NumberField::new("x^2-2".parse().unwrap(), 1).unwrap()
    }

    fn el(f: &Arc<NumberField>, s: &str) -> FieldElement {
        FieldElement::parse(f, s).unwrap()
    }

    #[test]
    fn arithmetic_in_sqrt2() {
        let f = sqrt2();
        assert_eq!(&el(&f, "1+w") * &el(&f, "-1+w"), FieldElement::one(&f));
        let a = el(&f, "3-5w");
        assert!((&a + &(-&a)).is_zero());
        assert_eq!(el(&f, "w^2"), FieldElement::from_int(&f, 2));
        let inv = el(&f, "1+w").inv().unwrap();
        assert_eq!(inv, el(&f, "-1+w"));
        assert!(FieldElement::zero(&f).inv().is_err());
    }

    #[test]
    fn cube_root_field() {
        let f = NumberField::new("x^3-2".parse().unwrap(), 0).unwrap();
        let t = FieldElement::generator(&f);
        assert_eq!(&t * &t.pow(2), FieldElement::from_int(&f, 2));
        assert!((t.to_f64() - 2f64.powf(1.0 / 3.0)).abs() < 1e-12);
    }

    #[test]
    fn signs() {
        let f = sqrt2();
        assert_eq!(el(&f, "w-1").sign(), 1);
        assert_eq!(el(&f, "1-w").sign(), -1);
        assert_eq!(FieldElement::zero(&f).sign(), 0);
        assert_eq!(el(&f, "3-2w").sign(), 1);
        assert_eq!(el(&f, "-99-70w").sign(), -1);
        // 99 - 70√2 ≈ 0.00505
        assert_eq!(el(&f, "99-70w").sign(), 1);
        // 114243² - 2·80782² = 1
        assert_eq!(el(&f, "-114243+80782w").sign(), -1);
        assert_eq!(el(&f, "114243-80782w").sign(), 1);
        // the negative root flips signs of odd parts
        let g = NumberField::new("x^2-2".parse().unwrap(), 0).unwrap();
        assert_eq!(el(&g, "w-1").sign(), -1);
    }

    #[test]
    fn floor_ratios() {
        let f = sqrt2();
        let one = FieldElement::one(&f);
        assert_eq!(FieldElement::floor_ratio(&el(&f, "w"), &one).unwrap(), BigInt::from(1));
        assert_eq!(FieldElement::floor_ratio(&one, &el(&f, "w-1")).unwrap(), BigInt::from(2));
        assert_eq!(FieldElement::floor_ratio(&el(&f, "5"), &one).unwrap(), BigInt::from(5));
        assert_eq!(FieldElement::floor_ratio(&el(&f, "-w"), &one).unwrap(), BigInt::from(-2));
        assert!(FieldElement::floor_ratio(&one, &el(&f, "1-w")).is_err());
        assert!(FieldElement::floor_ratio(&one, &FieldElement::zero(&f)).is_err());
    }

    #[test]
    fn rejects_bad_fields() {
        assert!(NumberField::new("x^2+1".parse().unwrap(), 0).is_err());
        assert!(NumberField::new("x^2-4".parse().unwrap(), 0).is_err());
        assert!(NumberField::new("2x^2-1".parse().unwrap(), 0).is_err());
        assert!(NumberField::new("x^3-x^2-x+1".parse().unwrap(), 0).is_err());
        assert!(NumberField::new("x^2-2".parse().unwrap(), 2).is_err());
        let spec: FieldSpec = "x^2-2@1".parse().unwrap();
        assert_eq!(spec.build().unwrap().spec_string(), "x^2-2@1");
        assert!("x^2-2".parse::<FieldSpec>().is_err());
    }
}
