//! Builds finite semirings from the catalog, by construction and from JSON
//! tables, and checks the axioms.

use semicong::semiring::{catalog, catalog_names, make_minmax, make_product, make_star, FiniteSemiring};

fn main() -> semicong::Result<()> {
    for name in catalog_names().iter().take(12) {
        let s = catalog(name)?;
        println!("{name:>14}: {} elements, ring: {}", s.size(), s.is_ring());
    }

    let s = make_product(&make_minmax(2)?, &catalog("zmod:2")?);
    println!("minmax:2 × zmod:2 has {} elements, valid: {}", s.size(), s.validate_axioms().is_empty());
    let star = make_star(&catalog("zmod:3")?);
    println!("zmod:3 with a new zero ω adjoined has {} elements", star.size());

    // Tables round trip through JSON.
    let json = s.to_json();
    let back = FiniteSemiring::from_json(&json)?;
    assert_eq!(back.add_table(), s.add_table());

    // A broken table is reported, not accepted.
    let mut add = s.add_table().to_vec();
    add[1] = 0;
    match FiniteSemiring::new(s.size(), add, s.mul_table().to_vec(), s.zero(), s.one()) {
        Ok(_) => println!("unexpectedly accepted"),
        Err(e) => println!("rejected: {e}"),
    }
    Ok(())
}
