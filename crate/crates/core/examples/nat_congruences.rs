//! Every congruence on ℕ is trivial or "equal, or both ≥ n and congruent
//! mod k". Classifies a few generating sets and cross-checks by closure.

use semicong::congruence::{classify_nat_congruence, NatCongruence};

fn main() -> semicong::Result<()> {
    let sets: [&[(u64, u64)]; 5] = [&[(2, 5), (3, 9)], &[(0, 4)], &[(7, 7)], &[(10, 16), (12, 21)], &[(1, 2)]];
    for pairs in sets {
        let c = classify_nat_congruence(pairs)?;
        let text = match c.congruence {
            NatCongruence::Trivial => "trivial".to_string(),
            NatCongruence::Tail { n, k } => format!("x ~ y iff x = y or x, y ≥ {n} and x ≡ y mod {k}"),
        };
        println!("{pairs:?}: {text}");
    }
    Ok(())
}
