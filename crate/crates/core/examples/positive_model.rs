//! Congruences on the positive part S = ℤ[θ] ∩ [0, ∞) of a real order.
//! Each nontrivial one is C_j(I) for an ideal I and j ∈ {0, 1}; the
//! classification is cross-checked by closure on a bounded box of S.

use semicong::order::{classify_congruence, quotient_semiring, CongruenceClass, CrossCheck, RealOrder};

fn main() -> semicong::Result<()> {
    let order = RealOrder::from_spec("x^2-2@1")?;
    println!("θ = {:.6}", order.to_f64(&order.theta()));

    for pairs in ["w~1+w", "0~2", "1~1+2w", "2+w~2+3w;4~4+w"] {
        let gens = order.parse_pairs(pairs)?;
        let r = classify_congruence(&order, &gens, Some(CrossCheck::default_for(order.degree())))?;
        let class = match &r.class {
            CongruenceClass::Trivial => "trivial".to_string(),
            CongruenceClass::Ideal { ideal, j } => format!("C_{j}(I), |R/I| = {}", ideal.determinant()),
        };
        let x = r.cross_check.as_ref().expect("cross-check requested");
        println!("{pairs:<16} {class:<20} box ±{} ({} elements) sound: {}", x.coord_bound, x.universe_size, x.sound);

        if let CongruenceClass::Ideal { .. } = r.class {
            let q = quotient_semiring(&order, &r.class)?;
            let reps: Vec<String> = q.representatives.iter().map(ToString::to_string).collect();
            println!("{:16} quotient: {} elements, residues {}", "", q.size, reps.join(", "));
        }
    }
    Ok(())
}
