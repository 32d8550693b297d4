//! Exact arithmetic in ℚ(θ) for a chosen real root θ, with signs decided by
//! interval refinement.

use num_rational::BigRational;
use semicong::algebraic::{FieldElement, FieldSpec};
use semicong::poly::{isolate_real_roots, IntPolynomial};

fn main() -> semicong::Result<()> {
    let p = IntPolynomial::from_i64(&[-2, 0, 0, 1]);
    for (i, r) in isolate_real_roots(&p)?.iter().enumerate() {
        println!("root {i} of x^3-2 lies in [{}, {}]", r.lo(), r.hi());
    }

    let field = "x^3-2@0".parse::<FieldSpec>()?.build()?;
    let w = FieldElement::generator(&field);
    let e = FieldElement::parse(&field, "w^2-w-1")?;
    println!("w^2-w-1 has sign {} (≈ {:.6})", e.sign(), e.to_f64());

    // (1+w)(1-w+w^2) = 1 + w^3 = 3
    let a = FieldElement::parse(&field, "1+w")?;
    let b = FieldElement::parse(&field, "1-w+w^2")?;
    println!("(1+w)(1-w+w^2) = {}", &a * &b);
    println!("1/(1+w) = {}", a.inv()?);

    let (lo, hi) = w.pow(5).enclosure(40);
    println!("w^5 in [{:.12}, {:.12}]", to_f64(&lo), to_f64(&hi));
    println!("floor(w^5 / (w-1)) = {}", FieldElement::floor_ratio(&w.pow(5), &(&w - &FieldElement::one(&field)))?);
    Ok(())
}

fn to_f64(q: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    q.to_f64().unwrap_or(f64::NAN)
}
