//! In 𝔹[X] the relations Xⁱ+1 ~ Xʲ+1 for i < j ≤ N do not force
//! X^(N+1)+1 ~ X^(N+2)+1, which is what makes 𝔹[X] fail to be
//! c-Noetherian. Bounded closure up to a degree shows the pattern.

use semicong::congruence::{check_bx_nonrelation, ClosureBudget};
use semicong::semiring::BoolPolynomial;

fn main() -> semicong::Result<()> {
    for n in 1..=4 {
        let r = check_bx_nonrelation(n, 10, &[], None, ClosureBudget::default())?;
        println!(
            "N = {n}: {} ~ {} {} (degree ≤ 10, {} classes)",
            r.query.0,
            r.query.1,
            if r.related { "related" } else { "not related" },
            r.class_count
        );
    }

    // Adding the next relation as a generator makes the query trivial.
    let extra: (BoolPolynomial, BoolPolynomial) = ("X^4+1".parse()?, "X^5+1".parse()?);
    let r = check_bx_nonrelation(3, 10, &[extra], None, ClosureBudget::default())?;
    println!("with X^4+1 ~ X^5+1 added: related = {}", r.related);
    Ok(())
}
