//! Does Sp_ℕ(V) ⊆ Sp_ℕ(W) imply that W refines V? In the plane it does;
//! random sampling in dimension 3 finds pairs where it does not.

use num_bigint::BigInt;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use semicong::algebraic::FieldSpec;
use semicong::flat::{format_vector, refines_to, search_span_refinement, span_contains, standard_basis, GammaForm};

fn main() -> semicong::Result<()> {
    for (spec, n) in [("x^2-2@1", 2), ("x^3-2@0", 3)] {
        let field = spec.parse::<FieldSpec>()?.build()?;
        let g = GammaForm::powers(&field, n)?;
        let r = search_span_refinement(&g, 300, 3, &mut ChaCha8Rng::seed_from_u64(0))?;
        println!("n = {n}: {} refinable, {} not, {} undecided", r.refinable, r.not_refinable, r.undecided);
        if let Some(w) = r.witnesses.first() {
            let show = |c: &[Vec<BigInt>]| c.iter().map(|x| format_vector(x)).collect::<Vec<_>>().join(" ");
            println!("  V = {}\n  W = {}", show(&w.v), show(&w.w));
        }
    }

    // No column of this unimodular matrix dominates another, so no legal
    // subtraction stays inside ℕ³ and the standard basis is unreachable.
    let field = "x^3-2@0".parse::<FieldSpec>()?.build()?;
    let g = GammaForm::powers(&field, 3)?;
    let v: Vec<Vec<BigInt>> = [[0, 1, 3], [1, 1, 1], [2, 1, 0]].iter().map(|c| c.iter().map(|&x| BigInt::from(x)).collect()).collect();
    let e = standard_basis(3);
    println!("Sp(V) ⊆ ℕ³: {}, V ⪯ e: {:?}", span_contains(&e, &v), refines_to(&g, &v, &e, 1000)?);
    Ok(())
}
