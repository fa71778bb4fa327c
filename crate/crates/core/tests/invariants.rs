//! Property-based invariants of the search engines and closure operators.

mod common;

use std::sync::Arc;

use dualwork::algebra::{hom_enumerate, subuniverse_generate, subuniverses_of_power, term_clone};
use dualwork::catalog::algebras;
use dualwork::closure::ClosureSystem;
use dualwork::endo::{endomorphisms, is_k_endoprimal, pad_witness, EndoprimalityVerdict};
use dualwork::entailment::entails;
use dualwork::structures::{brute_force_morphisms, substructure_generate, MorphismSearch};
use dualwork::{AlterEgo, FiniteAlgebra, FiniteStructure, Limits, Relation};
use proptest::prelude::*;

/// A binary operation `f` and a unary operation `g` on `n` elements.
fn algebra(n: usize) -> impl Strategy<Value = FiniteAlgebra> {
    (prop::collection::vec(0..n, n * n), prop::collection::vec(0..n, n)).prop_map(move |(f, g)| {
        FiniteAlgebra::from_tables("rand", n, vec![("f", 2, f), ("g", 1, g)]).unwrap()
    })
}

fn small_algebra() -> impl Strategy<Value = FiniteAlgebra> {
    (2usize..=3).prop_flat_map(algebra)
}

fn subset(n: usize) -> impl Strategy<Value = Vec<usize>> {
    prop::collection::btree_set(0..n, 0..=n).prop_map(|s| s.into_iter().collect())
}

fn is_subset(a: &[usize], b: &[usize]) -> bool {
    a.iter().all(|x| b.contains(x))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hom_search_matches_brute_force(a in small_algebra(), b in small_algebra()) {
        let found: Vec<Vec<usize>> = hom_enumerate(&a, &b, None)
            .unwrap()
            .into_iter()
            .map(|h| h.0)
            .collect();
        prop_assert_eq!(found, common::brute_homs(&a, &b));
    }

    #[test]
    fn subuniverse_generation_is_a_closure(
        (a, s, t) in small_algebra().prop_flat_map(|a| {
            let n = a.size();
            (Just(a), subset(n), subset(n))
        })
    ) {
        let gs = subuniverse_generate(&a, &s);
        prop_assert!(is_subset(&s, &gs));
        prop_assert_eq!(subuniverse_generate(&a, &gs), gs.clone());
        let mask: Vec<bool> = (0..a.size()).map(|x| gs.contains(&x)).collect();
        prop_assert!(a.is_subuniverse(&mask));
        let union: Vec<usize> = (0..a.size()).filter(|x| s.contains(x) || t.contains(x)).collect();
        prop_assert!(is_subset(&gs, &subuniverse_generate(&a, &union)));
    }

    #[test]
    fn closure_operator_laws(
        n in 1usize..=9,
        rules in prop::collection::vec((any::<u16>(), 0usize..9), 0..12),
        x in any::<u16>(),
        y in any::<u16>(),
    ) {
        let full = (1u64 << n) - 1;
        let mut cs = ClosureSystem::new(n).unwrap();
        for (prem, c) in rules {
            let prem: Vec<usize> = (0..n).filter(|&i| prem >> i & 1 == 1).collect();
            cs.add_rule(&prem, c % n);
        }
        let (x, y) = (x as u64 & full, y as u64 & full);
        let cx = cs.close(x);
        prop_assert_eq!(cx & x, x);
        prop_assert_eq!(cs.close(cx), cx);
        prop_assert_eq!(cs.close(x & y) & !cs.close(y), 0);
        // NextClosure lists exactly the closed sets, each once
        let (sets, truncated) = cs.enumerate_within(full, usize::MAX);
        prop_assert!(!truncated);
        let mut brute: Vec<u64> = (0..=full).filter(|&s| cs.is_closed(s)).collect();
        let mut listed = sets.clone();
        listed.sort_unstable();
        brute.sort_unstable();
        prop_assert_eq!(listed, brute);
    }

    #[test]
    fn term_operations_commute_with_endomorphisms(a in small_algebra()) {
        // binary clones of primal 3-element algebras are too big to generate here
        let k = if a.size() == 2 { 2 } else { 1 };
        let ends = endomorphisms(&a).unwrap();
        for t in term_clone(&a, k, &Limits::default()).unwrap() {
            for e in &ends.elements {
                prop_assert!(t.commutes_with(e.map()));
            }
        }
    }

    #[test]
    fn endoprimality_is_antitone_in_k(a in algebra(2)) {
        let l = Limits::default();
        let v1 = is_k_endoprimal(&a, 1, &l).unwrap();
        let v2 = is_k_endoprimal(&a, 2, &l).unwrap();
        prop_assert!(!v2.holds || v1.holds);
        if let Some(w) = &v1.witness {
            let padded = EndoprimalityVerdict {
                k: 2,
                holds: false,
                witness: Some(pad_witness(w, 2)),
                clone_size: 0,
            };
            prop_assert!(padded.verify(&a, &l).unwrap());
        }
        prop_assert!(v2.verify(&a, &l).unwrap());
    }

    #[test]
    fn morphism_search_matches_brute_force(
        seeds in prop::collection::vec(prop::collection::vec(0usize..3, 2), 1..4),
        target in prop::collection::vec(prop::collection::vec(0usize..3, 2), 1..3),
    ) {
        let ego = Arc::new(dualwork::catalog::egos::three());
        let x = substructure_generate(Arc::clone(&ego), 2, &seeds).unwrap();
        let y = substructure_generate(Arc::clone(&ego), 2, &target).unwrap();
        let found = MorphismSearch::new(&x, &y).unwrap().all().unwrap();
        prop_assert_eq!(found, brute_force_morphisms(&x, &y));
    }
}

/// Algebraic binary relations on the bounded 3-chain.
fn pool() -> Vec<Relation> {
    subuniverses_of_power(&algebras::bounded_chain(3), 2, &Limits::default()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn entailment_is_monotone_in_the_ego(picks in prop::collection::vec(any::<prop::sample::Index>(), 0..3),
                                         extra in any::<prop::sample::Index>(),
                                         target in any::<prop::sample::Index>()) {
        let rels = pool();
        let l = Limits::default();
        let m = Arc::new(algebras::bounded_chain(3));
        let mut small = AlterEgo::new("small", Arc::clone(&m));
        for (i, p) in picks.iter().enumerate() {
            small = small.with_relation(format!("r{i}"), p.get(&rels).clone()).unwrap();
        }
        let big = small.clone().with_relation("extra", extra.get(&rels).clone()).unwrap();
        let s = target.get(&rels);
        let before = entails(&Arc::new(small), s, &l).unwrap().holds;
        let after = entails(&Arc::new(big), s, &l).unwrap().holds;
        prop_assert!(!before || after);
    }
}

#[test]
fn structure_generation_reaches_a_closed_set() {
    let ego = Arc::new(dualwork::catalog::egos::three_sigma());
    let x = substructure_generate(Arc::clone(&ego), 2, &[vec![0, 2]]).unwrap();
    assert!(x.closure_violation().is_none());
    let checked = FiniteStructure::new(ego, 2, x.points().to_vec()).unwrap();
    assert_eq!(checked.points(), x.points());
}
