//! Univariate polynomials over ℤ and ℚ, Sturm sequences and real root
//! isolation with exact rational endpoints.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Integer polynomial, coefficients lowest degree first. Trailing zeros
/// are always trimmed, so the zero polynomial has no coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntPolynomial {
    coefficients: Vec<BigInt>,
}

impl IntPolynomial {
    pub fn new(mut coefficients: Vec<BigInt>) -> Self {
        while coefficients.last().is_some_and(|c| c.is_zero()) {
            coefficients.pop();
        }
        IntPolynomial { coefficients }
    }

    pub fn from_i64(coefficients: &[i64]) -> Self {
        Self::new(coefficients.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn coefficients(&self) -> &[BigInt] {
        &self.coefficients
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coefficients.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&BigInt> {
        self.coefficients.last()
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_some_and(|c| c.is_one())
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coefficients.iter().rev() {
            acc = acc * x + BigRational::from_integer(c.clone());
        }
        acc
    }

    pub fn to_rational(&self) -> RatPoly {
        RatPoly::new(
            self.coefficients
                .iter()
                .map(|c| BigRational::from_integer(c.clone()))
                .collect(),
        )
    }

    /// Primitive integer polynomial with positive leading coefficient
    /// proportional to `p`.
    pub fn primitive_from(p: &RatPoly) -> Self {
        if p.is_zero() {
            return IntPolynomial::new(vec![]);
        }
        let lcm = p
            .coefficients()
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = p
            .coefficients()
            .iter()
            .map(|c| (c * BigRational::from_integer(lcm.clone())).to_integer())
            .collect();
        let g = ints
            .iter()
            .fold(BigInt::zero(), |acc, c| acc.gcd(c));
        let mut ints: Vec<BigInt> = ints.into_iter().map(|c| c / &g).collect();
        if ints.last().is_some_and(|c| c.is_negative()) {
            for c in ints.iter_mut() {
                *c = -c.clone();
            }
        }
        IntPolynomial::new(ints)
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", format_terms(&self.to_rational().coefficients, "x"))
    }
}

impl FromStr for IntPolynomial {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (coeffs, _) = parse_univariate(s)?;
        if coeffs.iter().any(|c| !c.is_integer()) {
            return Err(Error::invalid(format!("non-integer coefficient in {s:?}")));
        }
        Ok(IntPolynomial::new(coeffs.into_iter().map(|c| c.to_integer()).collect()))
    }
}

/// Polynomial with rational coefficients, lowest degree first, trimmed.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatPoly {
    coefficients: Vec<BigRational>,
}

impl RatPoly {
    pub fn new(mut coefficients: Vec<BigRational>) -> Self {
        while coefficients.last().is_some_and(|c| c.is_zero()) {
            coefficients.pop();
        }
        RatPoly { coefficients }
    }

    pub fn zero() -> Self {
        RatPoly { coefficients: vec![] }
    }

    pub fn constant(c: BigRational) -> Self {
        RatPoly::new(vec![c])
    }

    pub fn coefficients(&self) -> &[BigRational] {
        &self.coefficients
    }

    pub fn into_coefficients(self) -> Vec<BigRational> {
        self.coefficients
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coefficients.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&BigRational> {
        self.coefficients.last()
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coefficients.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn derivative(&self) -> RatPoly {
        RatPoly::new(
            self.coefficients
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigRational::from_integer(BigInt::from(i)))
                .collect(),
        )
    }

    pub fn add(&self, other: &RatPoly) -> RatPoly {
        let n = self.coefficients.len().max(other.coefficients.len());
        let zero = BigRational::zero();
        RatPoly::new(
            (0..n)
                .map(|i| {
                    self.coefficients.get(i).unwrap_or(&zero)
                        + other.coefficients.get(i).unwrap_or(&zero)
                })
                .collect(),
        )
    }

    pub fn neg(&self) -> RatPoly {
        RatPoly::new(self.coefficients.iter().map(|c| -c).collect())
    }

    pub fn sub(&self, other: &RatPoly) -> RatPoly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &RatPoly) -> RatPoly {
        if self.is_zero() || other.is_zero() {
            return RatPoly::zero();
        }
        let mut out = vec![BigRational::zero(); self.coefficients.len() + other.coefficients.len() - 1];
        for (i, a) in self.coefficients.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coefficients.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        RatPoly::new(out)
    }

    pub fn scale(&self, k: &BigRational) -> RatPoly {
        RatPoly::new(self.coefficients.iter().map(|c| c * k).collect())
    }

    /// Euclidean division. Panics when `divisor` is zero.
    pub fn div_rem(&self, divisor: &RatPoly) -> (RatPoly, RatPoly) {
        let dd = divisor.degree().expect("polynomial division by zero");
        let lead = divisor.leading().unwrap().clone();
        let mut rem = self.coefficients.clone();
        if rem.len() <= dd {
            return (RatPoly::zero(), self.clone());
        }
        let mut quot = vec![BigRational::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = &rem[k + dd] / &lead;
            if !c.is_zero() {
                for (j, dc) in divisor.coefficients.iter().enumerate() {
                    rem[k + j] -= &c * dc;
                }
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (RatPoly::new(quot), RatPoly::new(rem))
    }

    pub fn rem(&self, divisor: &RatPoly) -> RatPoly {
        self.div_rem(divisor).1
    }

    pub fn monic(&self) -> RatPoly {
        match self.leading() {
            None => RatPoly::zero(),
            Some(l) => self.scale(&l.recip()),
        }
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &RatPoly) -> RatPoly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Returns `(g, s, t)` with `s·self + t·other = g`, `g` monic.
    pub fn extended_gcd(&self, other: &RatPoly) -> (RatPoly, RatPoly, RatPoly) {
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut s0, mut s1) = (RatPoly::constant(BigRational::one()), RatPoly::zero());
        let (mut t0, mut t1) = (RatPoly::zero(), RatPoly::constant(BigRational::one()));
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1);
            r0 = std::mem::replace(&mut r1, r);
            let s = s0.sub(&q.mul(&s1));
            s0 = std::mem::replace(&mut s1, s);
            let t = t0.sub(&q.mul(&t1));
            t0 = std::mem::replace(&mut t1, t);
        }
        match r0.leading().cloned() {
            None => (r0, s0, t0),
            Some(l) => {
                let inv = l.recip();
                (r0.scale(&inv), s0.scale(&inv), t0.scale(&inv))
            }
        }
    }

    pub fn squarefree_part(&self) -> RatPoly {
        if self.degree().unwrap_or(0) == 0 {
            return self.monic();
        }
        let g = self.gcd(&self.derivative());
        self.div_rem(&g).0.monic()
    }

    /// Interval enclosure of the polynomial over `[lo, hi]` by Horner's rule.
    pub fn eval_interval(&self, lo: &BigRational, hi: &BigRational) -> (BigRational, BigRational) {
        let mut acc_lo = BigRational::zero();
        let mut acc_hi = BigRational::zero();
        for c in self.coefficients.iter().rev() {
            let products = [&acc_lo * lo, &acc_lo * hi, &acc_hi * lo, &acc_hi * hi];
            let mut mn = products[0].clone();
            let mut mx = products[0].clone();
            for p in &products[1..] {
                if *p < mn {
                    mn = p.clone();
                }
                if *p > mx {
                    mx = p.clone();
                }
            }
            acc_lo = mn + c;
            acc_hi = mx + c;
        }
        (acc_lo, acc_hi)
    }
}

/// Sturm chain `p, p', -rem(p, p'), ...`.
pub fn sturm_sequence(p: &RatPoly) -> Vec<RatPoly> {
    let mut seq = vec![p.clone()];
    let d = p.derivative();
    if d.is_zero() {
        return seq;
    }
    seq.push(d);
    loop {
        let n = seq.len();
        let r = seq[n - 2].rem(&seq[n - 1]).neg();
        if r.is_zero() {
            break;
        }
        seq.push(r);
    }
    seq
}

/// Number of sign changes of the chain at `x`, zeros dropped.
pub fn sign_variations(seq: &[RatPoly], x: &BigRational) -> usize {
    let mut last = 0i8;
    let mut count = 0;
    for p in seq {
        let v = p.eval(x);
        let s = if v.is_positive() {
            1
        } else if v.is_negative() {
            -1
        } else {
            0
        };
        if s != 0 {
            if last != 0 && s != last {
                count += 1;
            }
            last = s;
        }
    }
    count
}

/// A real root of an integer polynomial, isolated in `[lo, hi]`.
///
/// When `lo == hi` the root is rational and known exactly. Otherwise the
/// polynomial is nonzero at both endpoints, changes sign across the
/// interval, and has exactly one root inside it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RealRoot {
    polynomial: IntPolynomial,
    lo: BigRational,
    hi: BigRational,
}

impl RealRoot {
    pub fn polynomial(&self) -> &IntPolynomial {
        &self.polynomial
    }

    pub fn lo(&self) -> &BigRational {
        &self.lo
    }

    pub fn hi(&self) -> &BigRational {
        &self.hi
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    /// Halves the isolating interval.
    pub fn bisect(&mut self) {
        if self.is_exact() {
            return;
        }
        let two = BigRational::from_integer(BigInt::from(2));
        let mid = (&self.lo + &self.hi) / two;
        let vm = self.polynomial.eval(&mid);
        if vm.is_zero() {
            self.lo = mid.clone();
            self.hi = mid;
            return;
        }
        let vlo = self.polynomial.eval(&self.lo);
        if vlo.is_positive() == vm.is_positive() {
            self.lo = mid;
        } else {
            self.hi = mid;
        }
    }

    /// Bisects until the interval is no wider than `width`.
    pub fn refine_to(&mut self, width: &BigRational) {
        while !self.is_exact() && self.width() > *width {
            self.bisect();
        }
    }

    pub fn to_f64(&self) -> f64 {
        let two = BigRational::from_integer(BigInt::from(2));
        ((&self.lo + &self.hi) / two).to_f64().unwrap_or(f64::NAN)
    }
}

/// Isolates every distinct real root of `p`, in increasing order.
pub fn isolate_real_roots(p: &IntPolynomial) -> Result<Vec<RealRoot>> {
    if p.is_zero() {
        return Err(Error::invalid("cannot isolate roots of the zero polynomial"));
    }
    let sqf = p.to_rational().squarefree_part();
    let poly = IntPolynomial::primitive_from(&sqf);
    if poly.degree() == Some(0) {
        return Ok(vec![]);
    }
    if poly.degree() == Some(1) {
        let c = poly.coefficients();
        let r = BigRational::new(-c[0].clone(), c[1].clone());
        return Ok(vec![RealRoot { polynomial: poly, lo: r.clone(), hi: r }]);
    }
    let seq = sturm_sequence(&sqf);
    // Cauchy bound, strictly larger than every root modulus.
    let lead = sqf.leading().unwrap().abs();
    let bound = sqf.coefficients()[..sqf.coefficients().len() - 1]
        .iter()
        .map(|c| c.abs() / &lead)
        .fold(BigRational::zero(), |a, b| if b > a { b } else { a })
        + BigRational::from_integer(BigInt::from(2));

    let mut out = Vec::new();
    let mut stack = vec![(-bound.clone(), bound)];
    let two = BigRational::from_integer(BigInt::from(2));
    while let Some((lo, hi)) = stack.pop() {
        let count = sign_variations(&seq, &lo) - sign_variations(&seq, &hi);
        match count {
            0 => {}
            1 => out.push(RealRoot { polynomial: poly.clone(), lo, hi }),
            _ => {
                let mid = (&lo + &hi) / &two;
                if poly.eval(&mid).is_zero() {
                    out.push(RealRoot { polynomial: poly.clone(), lo: mid.clone(), hi: mid.clone() });
                    let (a, b) = split_around(&poly, &seq, &mid, &lo, &hi);
                    stack.push((b, hi));
                    stack.push((lo, a));
                } else {
                    stack.push((mid.clone(), hi));
                    stack.push((lo, mid));
                }
            }
        }
    }
    // Detect rational roots: any rational root of a primitive integer
    // polynomial has the form k / lead.
    let lead_int = poly.leading().unwrap().abs();
    let unit = BigRational::new(BigInt::one(), &lead_int * BigInt::from(2));
    for root in out.iter_mut() {
        if root.is_exact() {
            continue;
        }
        root.refine_to(&unit);
        if root.is_exact() {
            continue;
        }
        let scale = BigRational::from_integer(lead_int.clone());
        let k_lo = (&root.lo * &scale).ceil().to_integer();
        let k_hi = (&root.hi * &scale).floor().to_integer();
        let mut k = k_lo;
        while k <= k_hi {
            let cand = BigRational::new(k.clone(), lead_int.clone());
            if poly.eval(&cand).is_zero() {
                root.lo = cand.clone();
                root.hi = cand;
                break;
            }
            k += 1;
        }
    }
    out.sort_by(|a, b| a.lo.cmp(&b.lo));
    Ok(out)
}

/// Finds non-root points `a < mid < b` such that `mid` is the only root in
/// `(a, b]`, staying inside `(lo, hi)`.
fn split_around(
    poly: &IntPolynomial,
    seq: &[RatPoly],
    mid: &BigRational,
    lo: &BigRational,
    hi: &BigRational,
) -> (BigRational, BigRational) {
    let two = BigRational::from_integer(BigInt::from(2));
    let mut eps = {
        let l = mid - lo;
        let r = hi - mid;
        (if l < r { l } else { r }) / &two
    };
    loop {
        let a = mid - &eps;
        let b = mid + &eps;
        if !poly.eval(&a).is_zero()
            && !poly.eval(&b).is_zero()
            && sign_variations(seq, &a) - sign_variations(seq, &b) == 1
        {
            return (a, b);
        }
        eps /= &two;
    }
}

/// Parses a univariate polynomial expression such as `x^2-2`, `-7+5w`,
/// `3/2*t^3 + t`. Returns coefficients (lowest degree first, untrimmed of
/// nothing) and the variable letter if one appeared.
pub fn parse_univariate(s: &str) -> Result<(Vec<BigRational>, Option<char>)> {
    let src: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if src.is_empty() {
        return Err(Error::invalid("empty polynomial expression"));
    }
    let bytes: Vec<char> = src.chars().collect();
    let mut i = 0;
    let mut var: Option<char> = None;
    let mut coeffs: Vec<BigRational> = Vec::new();
    let bad = |msg: &str| Error::invalid(format!("cannot parse {s:?}: {msg}"));
    while i < bytes.len() {
        let mut sign = BigInt::one();
        let mut saw_sign = false;
        while i < bytes.len() && (bytes[i] == '+' || bytes[i] == '-') {
            if bytes[i] == '-' {
                sign = -sign;
            }
            saw_sign = true;
            i += 1;
        }
        if i > 0 && !saw_sign {
            return Err(bad("expected + or - between terms"));
        }
        let start = i;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
        let mut coef: Option<BigRational> = None;
        if i > start {
            let num: BigInt = bytes[start..i].iter().collect::<String>().parse().unwrap();
            let mut c = BigRational::from_integer(num);
            if i < bytes.len() && bytes[i] == '/' {
                i += 1;
                let ds = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if ds == i {
                    return Err(bad("missing denominator"));
                }
                let den: BigInt = bytes[ds..i].iter().collect::<String>().parse().unwrap();
                if den.is_zero() {
                    return Err(bad("zero denominator"));
                }
                c /= BigRational::from_integer(den);
            }
            coef = Some(c);
        }
        if i < bytes.len() && bytes[i] == '*' {
            if coef.is_none() {
                return Err(bad("dangling '*'"));
            }
            i += 1;
        }
        let mut exp = 0usize;
        if i < bytes.len() && bytes[i].is_alphabetic() {
            let v = bytes[i];
            match var {
                None => var = Some(v),
                Some(w) if w != v => return Err(bad("more than one variable")),
                _ => {}
            }
            i += 1;
            exp = 1;
            if i < bytes.len() && bytes[i] == '^' {
                i += 1;
                let es = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if es == i {
                    return Err(bad("missing exponent"));
                }
                exp = bytes[es..i]
                    .iter()
                    .collect::<String>()
                    .parse()
                    .map_err(|_| bad("exponent too large"))?;
            }
        } else if coef.is_none() {
            return Err(bad("expected a term"));
        }
        let c = coef.unwrap_or_else(BigRational::one) * BigRational::from_integer(sign);
        if coeffs.len() <= exp {
            coeffs.resize(exp + 1, BigRational::zero());
        }
        coeffs[exp] += c;
    }
    Ok((coeffs, var))
}

pub(crate) fn format_terms(coefficients: &[BigRational], var: &str) -> String {
    let mut out = String::new();
    for (i, c) in coefficients.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let neg = c.is_negative();
        let a = c.abs();
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { "-" } else { "+" });
        }
        let mono = match i {
            0 => String::new(),
            1 => var.to_string(),
            _ => format!("{var}^{i}"),
        };
        if a.is_one() && i > 0 {
            out.push_str(&mono);
        } else {
            out.push_str(&a.to_string());
            out.push_str(&mono);
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn parses_and_prints() {
        let p: IntPolynomial = "x^2-2".parse().unwrap();
        assert_eq!(p, IntPolynomial::from_i64(&[-2, 0, 1]));
        assert_eq!(p.to_string(), "x^2-2");
        let (c, v) = parse_univariate("-7+5w").unwrap();
        assert_eq!(v, Some('w'));
        assert_eq!(c, vec![q(-7, 1), q(5, 1)]);
        let (c, _) = parse_univariate("3/2*t^3 + t - t").unwrap();
        assert_eq!(c, vec![q(0, 1), q(0, 1), q(0, 1), q(3, 2)]);
        assert!(parse_univariate("x+y").is_err());
        assert!(parse_univariate("2**x").is_err());
        assert!("x/2".parse::<IntPolynomial>().is_err());
    }

    #[test]
    fn division_and_gcd() {
        let a = IntPolynomial::from_i64(&[-1, 0, 1]).to_rational(); // x^2-1
        let b = IntPolynomial::from_i64(&[1, 1]).to_rational(); // x+1
        let (qt, r) = a.div_rem(&b);
        assert!(r.is_zero());
        assert_eq!(qt, IntPolynomial::from_i64(&[-1, 1]).to_rational());
        assert_eq!(a.gcd(&a.mul(&b)), a);
        let (g, s, t) = a.extended_gcd(&IntPolynomial::from_i64(&[-2, 0, 1]).to_rational());
        assert_eq!(g.degree(), Some(0));
        assert_eq!(s.mul(&a).add(&t.mul(&IntPolynomial::from_i64(&[-2, 0, 1]).to_rational())), g);
    }

    #[test]
    fn isolates_sqrt2() {
        let roots = isolate_real_roots(&"x^2-2".parse().unwrap()).unwrap();
        assert_eq!(roots.len(), 2);
        assert!((roots[0].to_f64() + 1.414).abs() < 1.0);
        let mut r = roots[1].clone();
        r.refine_to(&q(1, 1_000_000));
        assert!((r.to_f64() - std::f64::consts::SQRT_2).abs() < 1e-5);
        for root in &roots {
            let p = root.polynomial();
            assert_ne!(p.eval(root.lo()).is_positive(), p.eval(root.hi()).is_positive());
        }
    }

    #[test]
    fn no_roots_and_rational_roots() {
        assert!(isolate_real_roots(&"x^2+1".parse().unwrap()).unwrap().is_empty());
        let r = isolate_real_roots(&"x-3".parse().unwrap()).unwrap();
        assert_eq!(r.len(), 1);
        assert!(r[0].is_exact());
        assert_eq!(r[0].lo(), &q(3, 1));
        // (2x-1)(x^2-2)(x+5) has rational roots 1/2 and -5
        let p = IntPolynomial::from_i64(&[1, 0, -2])
            .to_rational()
            .mul(&IntPolynomial::from_i64(&[-1, 2]).to_rational())
            .mul(&IntPolynomial::from_i64(&[5, 1]).to_rational());
        let roots = isolate_real_roots(&IntPolynomial::primitive_from(&p)).unwrap();
        assert_eq!(roots.len(), 4);
        let exact: Vec<_> = roots.iter().filter(|r| r.is_exact()).map(|r| r.lo().clone()).collect();
        assert_eq!(exact, vec![q(-5, 1), q(1, 2)]);
        // Squared factors are taken out first.
        let sq = IntPolynomial::primitive_from(&p.mul(&p));
        assert_eq!(isolate_real_roots(&sq).unwrap().len(), 4);
        assert!(isolate_real_roots(&IntPolynomial::new(vec![])).is_err());
    }
}
