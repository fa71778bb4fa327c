//! `D` and `E` send homomorphisms and morphisms to morphisms and
//! homomorphisms in the opposite direction.

use std::sync::Arc;

use dualwork::algebra::{hom_enumerate, subuniverses_of_power, subpower_algebra};
use dualwork::catalog::{algebras, egos};
use dualwork::duality::{dual_of_algebra, dual_of_structure};
use dualwork::{Homomorphism, Limits, StructMorphism};

#[test]
fn dual_of_a_homomorphism_is_a_morphism() {
    let l = Limits::default();
    let ego = Arc::new(egos::three());
    let m = algebras::bounded_chain(3);
    let subs: Vec<_> = subuniverses_of_power(&m, 2, &l)
        .unwrap()
        .into_iter()
        .filter(|s| s.len() >= 3)
        .take(6)
        .enumerate()
        .map(|(i, s)| {
            let elems: Vec<Vec<usize>> = s.iter().cloned().collect();
            subpower_algebra(&m, &elems, format!("s{i}")).unwrap()
        })
        .collect();
    let mut seen = 0;
    for a in &subs {
        for b in &subs {
            let da = dual_of_algebra(a, &ego, &l).unwrap();
            let db = dual_of_algebra(b, &ego, &l).unwrap();
            for phi in hom_enumerate(a, b, None).unwrap() {
                // D(phi)(x) = x . phi
                let map: Vec<usize> = db
                    .homs
                    .iter()
                    .map(|x| da.homs.iter().position(|y| *y == phi.then(x)).unwrap())
                    .collect();
                assert!(StructMorphism(map.clone()).is_morphism(&db.structure, &da.structure));
                // and E(D(phi)) is a homomorphism E(D(a)) -> E(D(b))
                let ea = dual_of_structure(&da.structure, &l).unwrap();
                let eb = dual_of_structure(&db.structure, &l).unwrap();
                let lifted: Vec<usize> = ea
                    .morphisms
                    .iter()
                    .map(|u| {
                        let composite: Vec<usize> = map.iter().map(|&p| u.apply(p)).collect();
                        eb.morphisms.iter().position(|v| v.0 == composite).unwrap()
                    })
                    .collect();
                assert!(Homomorphism(lifted).is_homomorphism(&ea.algebra, &eb.algebra));
                seen += 1;
            }
        }
    }
    assert!(seen > 20);
}
