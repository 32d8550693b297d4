//! A finite commutative semiring is a ring exactly when it has no quotient
//! onto the Boolean semiring. Checks this on the catalog and random tables.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use semicong::congruence::{bg_check, is_boolean_kernel};
use semicong::semiring::{catalog, catalog_names, random_semiring};

fn main() -> semicong::Result<()> {
    for name in catalog_names() {
        let s = catalog(&name)?;
        let r = bg_check(&s);
        if let Some(q) = &r.boolean_quotient {
            assert!(is_boolean_kernel(&s, q));
        }
        match &r.boolean_quotient {
            None => println!("{name:>14}: ring {:<5} no Boolean quotient", r.is_ring),
            Some(q) => println!("{name:>14}: ring {:<5} maps onto 𝔹 with zero set {q:?}", r.is_ring),
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut checked = 0;
    for _ in 0..500 {
        let s = random_semiring(&mut rng, 5);
        if s.is_mul_commutative() {
            assert!(bg_check(&s).consistent);
            checked += 1;
        }
    }
    println!("{checked} random commutative semirings checked, all consistent");
    Ok(())
}
