//! From a ~ a+u in S, the minimal polynomial of u yields integers m ≠ n
//! with m ~ n, so every nontrivial congruence meets ℕ nontrivially.

use semicong::order::{derive_integer_relation, verify_integer_relation, RealOrder};

fn main() -> semicong::Result<()> {
    for (spec, a, u) in [("x^2-2@1", "1", "w"), ("x^2-2@1", "w", "w-1"), ("x^3-2@0", "2", "w^2"), ("x^3-3x+1@2", "1", "w")] {
        let order = RealOrder::from_spec(spec)?;
        let (a, u) = (order.parse(a)?, order.parse(u)?);
        let r = derive_integer_relation(&order, &a, &u)?;
        assert!(verify_integer_relation(&order, &a, &u, &r));
        println!("{spec}: {a} ~ {a}+({u})");
        println!("  minimal polynomial {}, f = {}, g = {}, l = {}", r.minimal_polynomial, r.f, r.g, r.l);
        println!("  hence {} ~ {}", r.m, r.n);
    }
    Ok(())
}
