//! Enumerates all congruences of small semirings and decides
//! c-principality, printing a non-principal witness when there is one.

use semicong::congruence::{congruence_closure, enumerate_congruences, is_c_principal, EnumerationBudget};
use semicong::semiring::catalog;

fn main() -> semicong::Result<()> {
    let s = catalog("minmax:4")?;
    let lattice = enumerate_congruences(&s, EnumerationBudget::default())?;
    println!("minmax:4 has {} congruences", lattice.len());
    for e in &lattice.entries {
        println!("  {:<16} principal: {}", e.partition.to_string(), e.principal);
    }

    let closure = congruence_closure(&s, &[(0, 1), (2, 3)])?;
    println!("closure of 0~1, 2~3: {closure}");

    for name in ["minmax:2", "minmax:3", "minmax:4", "minmax:5", "zmod:6", "truncnat:2:2"] {
        let r = is_c_principal(&catalog(name)?, EnumerationBudget::default())?;
        match r.witness {
            None => println!("{name}: c-principal"),
            Some(w) => println!("{name}: not c-principal, {} needs {} generators", w.partition, w.generators.len()),
        }
    }
    Ok(())
}
