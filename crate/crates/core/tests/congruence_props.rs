//! Algebraic laws of congruence closure on random finite semirings.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use semicong::congruence::{
    congruence_closure, enumerate_congruences, is_congruence, EnumerationBudget, Partition,
};
use semicong::order::{power_relation_chain, verify_power_chain, RealOrder, SemiringOps};
use semicong::semiring::{catalog, random_semiring, FiniteSemiring};

fn semiring(seed: u64) -> FiniteSemiring {
    random_semiring(&mut ChaCha8Rng::seed_from_u64(seed), 5)
}

fn pairs(s: &FiniteSemiring, raw: &[(usize, usize)]) -> Vec<(usize, usize)> {
    raw.iter().map(|&(a, b)| (a % s.size(), b % s.size())).collect()
}

fn contains_pairs(p: &Partition, gens: &[(usize, usize)]) -> bool {
    gens.iter().all(|&(a, b)| p.related(a, b))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn closure_is_a_congruence_containing_the_generators(
        seed in any::<u64>(),
        raw in prop::collection::vec((0usize..8, 0usize..8), 0..4),
    ) {
        let s = semiring(seed);
        let gens = pairs(&s, &raw);
        let c = congruence_closure(&s, &gens).unwrap();
        prop_assert!(is_congruence(&s, &c).is_none());
        prop_assert!(contains_pairs(&c, &gens));
    }

    #[test]
    fn closure_is_the_meet_of_all_congruences_above_the_generators(
        seed in any::<u64>(),
        raw in prop::collection::vec((0usize..8, 0usize..8), 0..4),
    ) {
        let s = semiring(seed);
        let gens = pairs(&s, &raw);
        let c = congruence_closure(&s, &gens).unwrap();
        let lattice = enumerate_congruences(&s, EnumerationBudget::default()).unwrap();
        let meet = lattice
            .entries
            .iter()
            .filter(|e| contains_pairs(&e.partition, &gens))
            .fold(Partition::full(s.size()), |acc, e| acc.meet(&e.partition));
        prop_assert_eq!(c.canonical(), meet.canonical());
    }

    #[test]
    fn closure_is_monotone(
        seed in any::<u64>(),
        raw in prop::collection::vec((0usize..8, 0usize..8), 0..4),
        more in prop::collection::vec((0usize..8, 0usize..8), 0..3),
    ) {
        let s = semiring(seed);
        let small = pairs(&s, &raw);
        let mut large = small.clone();
        large.extend(pairs(&s, &more));
        let a = congruence_closure(&s, &small).unwrap();
        let b = congruence_closure(&s, &large).unwrap();
        prop_assert!(a.refines(&b));
        let again = congruence_closure(&s, &a.spanning_pairs()).unwrap();
        prop_assert_eq!(again.canonical(), a.canonical());
    }

    #[test]
    fn power_chains_replay_in_quotients(
        seed in any::<u64>(),
        x in 0usize..8,
        y in 0usize..8,
        n in 1u32..7,
    ) {
        let s = semiring(seed);
        let (x, y) = (x % s.size(), y % s.size());
        let chain = power_relation_chain(&s, &x, &y, n).unwrap();
        prop_assert_eq!(verify_power_chain(&s, &chain), Ok(()));
        // In the quotient by x ~ x+y every claimed relation must hold.
        let q = congruence_closure(&s, &[(x, s.add(x, y))]).unwrap();
        for (l, r) in &chain.relations {
            prop_assert!(q.related(*l, *r));
        }
    }

    #[test]
    fn power_chains_replay_in_real_orders(
        a in 0i64..4, b in 0i64..4, c in 0i64..4, d in 0i64..4, n in 1u32..5,
    ) {
        let order = RealOrder::from_spec("x^2-2@1").unwrap();
        let x = order.element(&[a, b]).unwrap();
        let y = order.element(&[c, d]).unwrap();
        let chain = power_relation_chain(&*order, &x, &y, n).unwrap();
        prop_assert_eq!(verify_power_chain(&*order, &chain), Ok(()));
        let (l, r) = chain.relations.last().unwrap();
        prop_assert_eq!(l, &order.pow(&x, n));
        prop_assert_eq!(r, &SemiringOps::add(&*order, &order.pow(&x, n), &order.pow(&y, n)));
    }
}

#[test]
fn tampered_power_chain_is_rejected() {
    let s = catalog("minmax:3").unwrap();
    let mut chain = power_relation_chain(&s, &1, &2, 3).unwrap();
    assert!(verify_power_chain(&s, &chain).is_ok());
    chain.links[1].to = (chain.links[1].to + 1) % 3;
    assert!(verify_power_chain(&s, &chain).is_err());
}
