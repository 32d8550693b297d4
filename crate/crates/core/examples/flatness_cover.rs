//! Flatness of S over ℕ, made concrete: starting from a nice basis, a chain
//! of elementary refinements puts any set of cone vectors into the ℕ-span,
//! and both the chain and the certificates are replayed independently.

use num_bigint::BigInt;
use semicong::algebraic::FieldSpec;
use semicong::flat::{cover, format_vector, standard_basis, verify_chain_fast, verify_membership, GammaForm};

fn main() -> semicong::Result<()> {
    for (spec, n, targets) in [
        ("x^2-2@1", 2, vec![vec![-1, 1], vec![3, -2], vec![-7, 5]]),
        ("x^3-2@0", 3, vec![vec![-1, -1, 2], vec![1, 1, -1]]),
        ("x^3-2@0", 3, vec![vec![3, -1, -1]]),
    ] {
        let field = spec.parse::<FieldSpec>()?.build()?;
        let g = GammaForm::powers(&field, n)?;
        let targets: Vec<Vec<BigInt>> = targets.iter().map(|t| t.iter().map(|&x| BigInt::from(x)).collect()).collect();
        for t in &targets {
            println!("{spec}: {} has γ-value {:.4}", format_vector(t), g.value(t)?.to_f64());
        }
        let c = cover(&g, &standard_basis(n), &targets)?;
        verify_chain_fast(&g, &c.chain).expect("chain replays");
        for cert in &c.certificates {
            verify_membership(&g, &c.chain.result, cert).expect("certificate holds");
            let coeffs: Vec<String> = cert.coefficients.iter().map(ToString::to_string).collect();
            println!("  {} = ({}) · V", format_vector(&cert.target), coeffs.join(", "));
        }
        let v: Vec<String> = c.chain.result.iter().map(|x| format_vector(x)).collect();
        println!("  {} steps, V = {}", c.chain.steps.len(), v.join(" "));
    }
    Ok(())
}
