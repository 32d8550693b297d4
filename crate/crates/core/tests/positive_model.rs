//! Congruences of the positive part S of ℤ[θ] and their quotients.

use num_bigint::BigInt;
use proptest::prelude::*;
use semicong::order::{
    classify_congruence, is_related, k_ideal_of, quotient_semiring, ring_ideal_of, CongruenceClass, RealOrder,
};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    /// `j ~ j + x` generates `C_j((x))`, and the quotient has |R/(x)|
    /// elements for j = 0 and one more for j = 1.
    #[test]
    fn single_relations_give_principal_ideal_classes(
        a in 0i64..6, b in 0i64..4, j in 0u8..2, cubic in any::<bool>(),
    ) {
        prop_assume!(a != 0 || b != 0);
        let order = RealOrder::from_spec(if cubic { "x^3-2@0" } else { "x^2-3@1" }).unwrap();
        let x = order.add(&order.from_int(a), &order.scale(&BigInt::from(b), &order.theta()));
        let jj = order.from_int(j as i64);
        let r = classify_congruence(&order, &[(jj.clone(), order.add(&jj, &x))], None).unwrap();
        let expected = order.ideal(std::slice::from_ref(&x)).unwrap();
        match &r.class {
            CongruenceClass::Ideal { ideal, j: got } => {
                prop_assert_eq!(*got, j);
                prop_assert_eq!(ideal.hnf(), expected.hnf());
            }
            CongruenceClass::Trivial => prop_assert!(false, "trivial class"),
        }
        let index = expected.determinant();
        let q = quotient_semiring(&order, &r.class).unwrap();
        prop_assert!(q.semiring.validate_axioms().is_empty());
        prop_assert_eq!(BigInt::from(q.size), &index + BigInt::from(j));
        prop_assert_eq!(q.semiring.is_ring(), j == 0);
        let smith_product: BigInt = q.smith_invariants.iter().product();
        prop_assert_eq!(smith_product, index);
    }

    /// Relatedness under `C_j(I)` follows the explicit description:
    /// `|x - y| ∈ I`, and for j = 1 both sides positive or both zero.
    #[test]
    fn relatedness_matches_the_explicit_description(
        x in (0i64..8, 0i64..8), y in (0i64..8, 0i64..8), j in 0u8..2,
    ) {
        let order = RealOrder::from_spec("x^2-2@1").unwrap();
        let ideal = order.ideal(&order.parse_elements("2;w").unwrap()).unwrap();
        let class = CongruenceClass::Ideal { ideal: ideal.clone(), j };
        let (x, y) = (order.element(&[x.0, x.1]).unwrap(), order.element(&[y.0, y.1]).unwrap());
        prop_assume!(order.in_s(&x) && order.in_s(&y));
        let diff_in = ideal.contains(&order.sub(&x, &y));
        let expected = x == y || (diff_in && (j == 0 || (!x.is_zero() && !y.is_zero())));
        prop_assert_eq!(is_related(&order, &class, &x, &y).unwrap(), expected);
    }
}

#[test]
fn root_two_quotients() {
    let order = RealOrder::from_spec("x^2-2@1").unwrap();
    let ideal = order.ideal(&[order.theta()]).unwrap();
    assert_eq!(ideal.determinant(), BigInt::from(2));
    let q1 = quotient_semiring(&order, &CongruenceClass::Ideal { ideal: ideal.clone(), j: 1 }).unwrap();
    assert_eq!(q1.size, 3);
    let q0 = quotient_semiring(&order, &CongruenceClass::Ideal { ideal, j: 0 }).unwrap();
    assert_eq!(q0.size, 2);
    assert!(q0.semiring.is_ring());
}

#[test]
fn k_ideal_round_trip() {
    let order = RealOrder::from_spec("x^3-2@0").unwrap();
    for gens in ["w", "2", "1+w", "3;w^2", "w-1"] {
        let ideal = order.ideal(&order.parse_elements(gens).unwrap()).unwrap();
        let k = k_ideal_of(&order, &ideal);
        let back = ring_ideal_of(&order, &k).unwrap();
        assert_eq!(back.hnf(), ideal.hnf(), "{gens}");
        for g in &k.generators {
            assert!(order.in_s(g) && ideal.contains(g));
        }
    }
}
