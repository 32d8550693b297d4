//! Refinement chains: invariants under random legal steps, covers with
//! independent replay, and the n = 2 convergent structure.

use std::sync::Arc;

use num_bigint::BigInt;
use proptest::prelude::*;
use semicong::algebraic::{FieldSpec, NumberField};
use semicong::flat::{
    absorb, apply_step, cover, gamma_sign, is_nice, span_coefficients, standard_basis, verify_chain,
    verify_membership, GammaForm, LatticeVector, RefinementStep,
};
use semicong::lattice::determinant;

fn field(spec: &str) -> Arc<NumberField> {
    spec.parse::<FieldSpec>().unwrap().build().unwrap()
}

fn big(v: &[i64]) -> LatticeVector {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

/// Applies the legal steps among `moves`, skipping illegal ones.
fn random_chain(g: &GammaForm, moves: &[(usize, usize)]) -> (Vec<LatticeVector>, Vec<RefinementStep>) {
    let n = g.dim();
    let mut v = standard_basis(n);
    let mut steps = Vec::new();
    for &(i, j) in moves {
        let (i, j) = (i % n, j % n);
        let step = if i == j {
            let mut p: Vec<usize> = (0..n).collect();
            p.rotate_left(1);
            RefinementStep::Permute(p)
        } else {
            RefinementStep::Subtract { i, j }
        };
        if let Ok(next) = apply_step(g, &v, &step) {
            v = next;
            steps.push(step);
        }
    }
    (v, steps)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn legal_steps_keep_niceness_and_grow_the_span(
        moves in prop::collection::vec((0usize..3, 0usize..3), 0..40),
        cubic in any::<bool>(),
    ) {
        let (f, n) = if cubic { (field("x^3-2@0"), 3) } else { (field("x^2-3@1"), 2) };
        let g = GammaForm::powers(&f, n).unwrap();
        let mut v = standard_basis(n);
        for &(i, j) in &moves {
            let (i, j) = (i % n, j % n);
            if i == j {
                continue;
            }
            let step = RefinementStep::Subtract { i, j };
            let Ok(next) = apply_step(&g, &v, &step) else { continue };
            prop_assert!(is_nice(&g, &next).nice);
            prop_assert_eq!(determinant(&next).magnitude().clone(), 1u32.into());
            // Every old vector lies in the ℕ-span of the new collection.
            for x in &v {
                prop_assert!(span_coefficients(&next, x).is_some());
            }
            v = next;
        }
    }

    #[test]
    fn random_chains_replay(moves in prop::collection::vec((0usize..3, 0usize..3), 0..30)) {
        let g = GammaForm::powers(&field("x^3-2@0"), 3).unwrap();
        let (result, steps) = random_chain(&g, &moves);
        let chain = semicong::flat::RefinementChain { start: standard_basis(3), steps, result };
        prop_assert_eq!(verify_chain(&g, &chain), Ok(()));
    }

    #[test]
    fn covers_verify_in_the_plane(
        targets in prop::collection::vec((-30i64..=30, -30i64..=30), 1..4),
        golden in any::<bool>(),
    ) {
        let f = if golden { field("x^2-x-1@1") } else { field("x^2-2@1") };
        let g = GammaForm::powers(&f, 2).unwrap();
        let targets: Vec<LatticeVector> = targets
            .iter()
            .map(|&(a, b)| big(&[a, b]))
            .filter(|t| gamma_sign(&g, t).unwrap() >= 0)
            .collect();
        let c = cover(&g, &standard_basis(2), &targets).unwrap();
        prop_assert_eq!(verify_chain(&g, &c.chain), Ok(()));
        prop_assert_eq!(c.certificates.len(), targets.len());
        for cert in &c.certificates {
            prop_assert_eq!(verify_membership(&g, &c.chain.result, cert), Ok(()));
        }
    }
}

/// `(-1)^k (p_k, -q_k)` for the convergents of √2, from the recurrence.
fn sqrt2_convergent_vectors(count: usize) -> Vec<LatticeVector> {
    let (mut p, mut q) = ((1i64, 1i64), (0i64, 1i64));
    let mut out = vec![big(&[1, 0]), big(&[-1, 1])];
    for k in 2..count {
        p = (p.1, 2 * p.1 + p.0);
        q = (q.1, 2 * q.1 + q.0);
        let s = if k % 2 == 0 { 1 } else { -1 };
        out.push(big(&[s * p.1, -s * q.1]));
    }
    out
}

#[test]
fn absorbing_a_convergent_ends_on_consecutive_convergents() {
    let g = GammaForm::powers(&field("x^2-2@1"), 2).unwrap();
    let c = sqrt2_convergent_vectors(9);
    for k in 1..c.len() {
        let (chain, cert) = absorb(&g, &standard_basis(2), &c[k]).unwrap();
        assert_eq!(verify_chain(&g, &chain), Ok(()));
        assert_eq!(verify_membership(&g, &chain.result, &cert), Ok(()));
        assert_eq!(chain.steps.len(), 2 * k - 1, "k = {k}");
        let mut got = chain.result.clone();
        let mut want = vec![c[k - 1].clone(), c[k].clone()];
        got.sort();
        want.sort();
        assert_eq!(got, want, "k = {k}");
    }
}

#[test]
fn iterated_absorption_passes_through_every_convergent() {
    let g = GammaForm::powers(&field("x^2-2@1"), 2).unwrap();
    let c = sqrt2_convergent_vectors(7);
    let mut v = standard_basis(2);
    for k in 1..c.len() {
        let (chain, cert) = absorb(&g, &v, &c[k]).unwrap();
        assert_eq!(verify_chain(&g, &chain), Ok(()));
        assert_eq!(verify_membership(&g, &chain.result, &cert), Ok(()));
        assert!(chain.result.contains(&c[k]));
        v = chain.result;
    }
}

#[test]
fn cubic_cover_of_a_mixed_sign_target() {
    let g = GammaForm::powers(&field("x^3-2@0"), 3).unwrap();
    let e = big(&[-1, -1, 1]);
    assert_eq!(gamma_sign(&g, &e).unwrap(), -1);
    assert!(cover(&g, &standard_basis(3), &[e]).is_err());
    let e = big(&[-1, -1, 2]);
    let c = cover(&g, &standard_basis(3), std::slice::from_ref(&e)).unwrap();
    assert_eq!(semicong::flat::verify_chain_fast(&g, &c.chain), Ok(()));
    assert_eq!(verify_membership(&g, &c.chain.result, &c.certificates[0]), Ok(()));
    assert_eq!(c.certificates[0].target, e);
}

/// Independent decision of `V ⪯ W`: in W-coordinates every intermediate
/// collection is a nonnegative matrix, so a subtraction is legal exactly
/// when the difference of two columns stays nonnegative.
fn reaches_permutation(cols: Vec<Vec<i64>>) -> bool {
    let is_perm = cols.iter().all(|c| c.iter().filter(|&&x| x == 1).count() == 1 && c.iter().all(|&x| x == 0 || x == 1));
    if is_perm {
        return true;
    }
    let n = cols.len();
    (0..n).any(|i| {
        (0..n).any(|j| {
            if i == j || cols[i] == cols[j] || cols[i].iter().zip(&cols[j]).any(|(a, b)| a < b) {
                return false;
            }
            let mut next = cols.clone();
            next[i] = cols[i].iter().zip(&cols[j]).map(|(a, b)| a - b).collect();
            reaches_permutation(next)
        })
    })
}

fn w_coordinates(w: &[LatticeVector], v: &[LatticeVector]) -> Vec<Vec<i64>> {
    v.iter()
        .map(|x| {
            span_coefficients(w, x)
                .expect("containment")
                .iter()
                .map(|c| i64::try_from(c).unwrap())
                .collect()
        })
        .collect()
}

#[test]
fn span_search_agrees_with_an_independent_reachability_check() {
    use rand::SeedableRng;
    use semicong::flat::{refines_to, search_span_refinement};
    let g2 = GammaForm::powers(&field("x^2-2@1"), 2).unwrap();
    let r = search_span_refinement(&g2, 100, 3, &mut rand_chacha::ChaCha8Rng::seed_from_u64(1)).unwrap();
    assert_eq!(r.not_refinable, 0);

    let g3 = GammaForm::powers(&field("x^3-2@0"), 3).unwrap();
    let r = search_span_refinement(&g3, 200, 3, &mut rand_chacha::ChaCha8Rng::seed_from_u64(0)).unwrap();
    assert!(r.not_refinable > 0);
    for wit in &r.witnesses {
        assert!(is_nice(&g3, &wit.v).nice && is_nice(&g3, &wit.w).nice);
        assert!(!reaches_permutation(w_coordinates(&wit.w, &wit.v)));
        assert_eq!(refines_to(&g3, &wit.v, &wit.w, 100_000).unwrap(), Some(false));
    }
    // Smallest hand example: no column dominates another.
    let e = standard_basis(3);
    let v = vec![big(&[0, 1, 3]), big(&[1, 1, 1]), big(&[2, 1, 0])];
    assert_eq!(determinant(&v), BigInt::from(-1));
    assert!(!reaches_permutation(w_coordinates(&e, &v)));
    assert_eq!(refines_to(&g3, &v, &e, 1000).unwrap(), Some(false));
}
