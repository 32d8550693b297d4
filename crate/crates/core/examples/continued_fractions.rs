//! In the plane the refinement procedure is Euclid's algorithm on γ-values:
//! shrinking the pair (1,0), (0,1) for γ = (1, √2) walks through the
//! convergents p/q of √2 as vectors ±(p, −q).

use num_bigint::BigInt;
use num_rational::BigRational;
use semicong::algebraic::{FieldElement, FieldSpec};
use semicong::flat::{absorb, format_vector, shrink_pair, standard_basis, GammaForm};

fn main() -> semicong::Result<()> {
    let field = "x^2-2@1".parse::<FieldSpec>()?.build()?;
    let g = GammaForm::powers(&field, 2)?;
    let delta = FieldElement::from_rational(&field, BigRational::new(1.into(), 1000.into()));
    let e = standard_basis(2);
    let r = shrink_pair(&g, &e[0], &e[1], &delta)?;
    for pair in &r.trajectory {
        let vals: Vec<String> = pair.iter().map(|v| format!("{} ({:.6})", format_vector(v), g.value(v).unwrap().to_f64())).collect();
        println!("{}", vals.join("   "));
    }

    // Absorbing the convergent vectors one at a time.
    let mut v = standard_basis(2);
    for t in [[-1, 1], [3, -2], [-7, 5], [17, -12], [-41, 29]] {
        let t: Vec<BigInt> = t.iter().map(|&x| BigInt::from(x)).collect();
        let (chain, _) = absorb(&g, &v, &t)?;
        v = chain.result;
        println!("absorbed {:>9} in {} steps, V = {} {}", format_vector(&t), chain.steps.len(), format_vector(&v[0]), format_vector(&v[1]));
    }
    Ok(())
}
