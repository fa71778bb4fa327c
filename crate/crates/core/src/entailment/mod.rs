//! Entailment of algebraic relations by an alter ego, decided on the single
//! structure `D(s)`, with primitive positive certificates, clone entailment
//! and the relational constructs.

mod clone;
mod constructs;
mod pp;

pub use clone::{brute_force_polymorphisms, clone_entails, CloneVerdict};
pub use constructs::{
    classify_projection, equalizer_closure, intersect_rel, product_rel, project,
    remove_repetitions, retraction_decomposition, trivial_rels, Projection,
    RetractionCertificate,
};
pub use pp::{evaluate_pp, pp_certificate, Atom, PPFormula};

use std::sync::Arc;

use crate::algebra::{subpower_algebra, subuniverses_of_power, FiniteAlgebra, Homomorphism};
use crate::duality::{dual_of_algebra, DualOfAlgebra};
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::relation::Relation;
use crate::structures::{
    is_algebraic_relation, AlterEgo, FiniteStructure, MorphismSearch, StructMorphism,
};

/// `s` as an algebra: element `i` is the `i`-th tuple of `s` in sorted order.
pub fn relation_algebra(m: &FiniteAlgebra, s: &Relation, name: &str) -> Result<FiniteAlgebra> {
    if s.is_empty() || !is_algebraic_relation(m, s) {
        return Err(Error::NotAlgebraic {
            name: name.to_string(),
            detail: format!("relation is not a non-empty subuniverse of {}^{}", m.name(), s.arity()),
        });
    }
    let elems: Vec<Vec<usize>> = s.iter().cloned().collect();
    subpower_algebra(m, &elems, name)
}

/// `D(s)` with the coordinate projections located.
#[derive(Debug, Clone)]
pub struct LabelledDual {
    pub dual: DualOfAlgebra,
    /// `rho[i]` is the point of `D(s)` holding the `i`-th projection.
    pub rho: Vec<usize>,
    /// Pairs `(i, j)`, `i < j`, with `rho_i = rho_j` as homomorphisms.
    pub aliases: Vec<(usize, usize)>,
}

impl LabelledDual {
    /// Points of `D(s)` that are not projections, in order.
    pub fn taus(&self) -> Vec<usize> {
        (0..self.dual.homs.len()).filter(|p| !self.rho.contains(p)).collect()
    }
}

pub fn labelled_dual(ego: &Arc<AlterEgo>, s: &Relation, limits: &Limits) -> Result<LabelledDual> {
    let alg = relation_algebra(ego.over(), s, "s")?;
    let dual = dual_of_algebra(&alg, ego, limits)?;
    let tuples: Vec<&Vec<usize>> = s.iter().collect();
    let rho: Vec<usize> = (0..s.arity())
        .map(|i| {
            let h = Homomorphism(tuples.iter().map(|t| t[i]).collect());
            dual.homs.binary_search(&h).expect("coordinate projections are homomorphisms")
        })
        .collect();
    let mut aliases = Vec::new();
    for i in 0..rho.len() {
        for j in i + 1..rho.len() {
            if rho[i] == rho[j] {
                aliases.push((i, j));
            }
        }
    }
    Ok(LabelledDual { dual, rho, aliases })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntailmentVerdict {
    pub holds: bool,
    /// On failure: a morphism `u: D(s) -> ego` as values on the points of `D(s)`.
    pub witness: Option<Vec<usize>>,
    /// On failure: `(u(rho_1), .., u(rho_n))`, a tuple outside `s`.
    pub escaping: Option<Vec<usize>>,
    /// True when the ego yields a duality on `s`: the morphisms are exactly
    /// the evaluations.
    pub on_duality: bool,
    pub dual_size: usize,
    pub morphisms: usize,
    pub aliases: Vec<(usize, usize)>,
}

/// Does every morphism `D(s) -> ego` send the projections into `s`?
pub fn entails(ego: &Arc<AlterEgo>, s: &Relation, limits: &Limits) -> Result<EntailmentVerdict> {
    let ld = labelled_dual(ego, s, limits)?;
    let target = FiniteStructure::ego_itself(Arc::clone(ego));
    let morphisms = MorphismSearch::new(&ld.dual.structure, &target)?
        .with_limit(limits.max_results)
        .all()?;
    let failure = morphisms.iter().find_map(|u| {
        let t: Vec<usize> = ld.rho.iter().map(|&p| u.apply(p)).collect();
        (!s.contains(&t)).then(|| (u.0.clone(), t))
    });
    Ok(EntailmentVerdict {
        holds: failure.is_none(),
        on_duality: morphisms.len() == s.len(),
        dual_size: ld.dual.homs.len(),
        morphisms: morphisms.len(),
        aliases: ld.aliases,
        witness: failure.as_ref().map(|f| f.0.clone()),
        escaping: failure.map(|f| f.1),
    })
}

/// `{ (u(z_1), .., u(z_k)) }` over all morphisms `u: Z -> ego`.
pub fn graph_of_dual(z: &FiniteStructure, labels: &[usize], limits: &Limits) -> Result<Relation> {
    if labels.is_empty() {
        return Err(Error::invalid("graph of a dual needs at least one label"));
    }
    if let Some(&bad) = labels.iter().find(|&&p| p >= z.len()) {
        return Err(Error::invalid(format!("label {bad} is not a point of the structure")));
    }
    let target = FiniteStructure::ego_itself(z.ego_arc());
    let morphisms = MorphismSearch::new(z, &target)?
        .with_limit(limits.max_results)
        .all()?;
    Relation::new(
        labels.len(),
        morphisms
            .iter()
            .map(|u: &StructMorphism| labels.iter().map(|&p| u.apply(p)).collect::<Vec<_>>()),
    )
}

/// Sweep over all non-empty algebraic relations of arity `1..=bound`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DensityReport {
    pub arity_bound: usize,
    pub checked: usize,
    pub failures: Vec<Relation>,
}

impl DensityReport {
    pub fn all_hold(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn summary(&self) -> String {
        format!(
            "{} of {} algebraic relations of arity <= {} entailed (up to arity bound)",
            self.checked - self.failures.len(),
            self.checked,
            self.arity_bound
        )
    }
}

pub fn entailment_dense_upto(
    ego: &Arc<AlterEgo>,
    arity_bound: usize,
    limits: &Limits,
) -> Result<DensityReport> {
    let mut checked = 0;
    let mut failures = Vec::new();
    for n in 1..=arity_bound {
        for s in subuniverses_of_power(ego.over(), n, limits)? {
            checked += 1;
            if !entails(ego, &s, limits)?.holds {
                failures.push(s);
            }
        }
    }
    Ok(DensityReport {
        arity_bound,
        checked,
        failures,
    })
}

/// The members of `omega` entailed by the relations `rels` over `m`.
pub fn entailment_closure_within(
    m: &Arc<FiniteAlgebra>,
    rels: &[Relation],
    omega: &[Relation],
    limits: &Limits,
) -> Result<Vec<Relation>> {
    let mut ego = AlterEgo::new("R", Arc::clone(m));
    for (i, r) in rels.iter().enumerate() {
        ego = ego.with_relation(format!("r{i}"), r.clone())?;
    }
    let ego = Arc::new(ego);
    let mut out = Vec::new();
    for s in omega {
        if entails(&ego, s, limits)?.holds {
            out.push(s.clone());
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{algebras, egos};
    use crate::tuples::Tuples;

    fn rel(arity: usize, t: &[&[usize]]) -> Relation {
        Relation::new(arity, t.iter().map(|x| x.to_vec())).unwrap()
    }

    fn le() -> Relation {
        rel(2, &[&[0, 0], &[0, 1], &[1, 1]])
    }

    /// Reference verdict: all maps on `D(s)`, filtered by preservation.
    fn brute_force(ego: &Arc<AlterEgo>, s: &Relation) -> bool {
        let ld = labelled_dual(ego, s, &Limits::default()).unwrap();
        let x = &ld.dual.structure;
        let target = FiniteStructure::ego_itself(Arc::clone(ego));
        Tuples::new(ego.carrier(), x.len())
            .map(StructMorphism)
            .filter(|u| u.is_morphism(x, &target))
            .all(|u| s.contains(&ld.rho.iter().map(|&p| u.apply(p)).collect::<Vec<_>>()))
    }

    #[test]
    fn priestley_entails_subuniverses_of_cube() {
        let ego = Arc::new(egos::priestley());
        let l = Limits::default();
        let subs = subuniverses_of_power(ego.over(), 3, &l).unwrap();
        assert!(!subs.is_empty());
        for s in &subs {
            assert!(entails(&ego, s, &l).unwrap().holds, "{s:?}");
        }
    }

    #[test]
    fn empty_ego_fails_on_order() {
        let ego = Arc::new(AlterEgo::new("bare", algebras::bounded_chain(2)));
        let v = entails(&ego, &le(), &Limits::default()).unwrap();
        assert!(!v.holds);
        assert_eq!(v.escaping, Some(vec![1, 0]));
        assert_eq!(v.dual_size, 2);
    }

    #[test]
    fn full_relation_always_holds() {
        let ego = Arc::new(AlterEgo::new("bare", algebras::lattice_chain(2)));
        let v = entails(&ego, &Relation::full(2, 2), &Limits::default()).unwrap();
        assert!(v.holds);
    }

    #[test]
    fn non_algebraic_is_rejected() {
        let ego = Arc::new(egos::priestley());
        let err = entails(&ego, &rel(2, &[&[0, 1]]), &Limits::default()).unwrap_err();
        assert!(matches!(err, Error::NotAlgebraic { .. }));
    }

    #[test]
    fn diagonal_records_alias() {
        let ego = Arc::new(AlterEgo::new("bare", algebras::bounded_chain(3)));
        let v = entails(&ego, &Relation::diagonal(3, 2), &Limits::default()).unwrap();
        assert!(v.holds);
        assert_eq!(v.aliases, vec![(0, 1)]);
    }

    #[test]
    fn decider_matches_brute_force_on_three() {
        let l = Limits::default();
        let m = algebras::bounded_chain(3);
        for ego in [
            AlterEgo::new("bare", m.clone()),
            egos::three(),
            AlterEgo::new("le3", m.clone())
                .with_relation("le", rel(2, &[&[0, 0], &[0, 1], &[0, 2], &[1, 1], &[1, 2], &[2, 2]]))
                .unwrap(),
        ] {
            let ego = Arc::new(ego);
            for n in 1..=2 {
                for s in subuniverses_of_power(ego.over(), n, &l).unwrap() {
                    assert_eq!(entails(&ego, &s, &l).unwrap().holds, brute_force(&ego, &s), "{s:?}");
                }
            }
        }
    }

    #[test]
    fn graph_of_unconstrained_point() {
        let ego = Arc::new(AlterEgo::new("bare", algebras::lattice_chain(3)));
        let z = FiniteStructure::new(ego, 1, vec![vec![1]]).unwrap();
        assert_eq!(graph_of_dual(&z, &[0], &Limits::default()).unwrap(), Relation::full(3, 1));
    }

    #[test]
    fn density_sweeps() {
        let l = Limits::default();
        let good = Arc::new(egos::priestley_unbounded());
        assert!(entailment_dense_upto(&good, 2, &l).unwrap().all_hold());
        let bare = Arc::new(AlterEgo::new("bare", algebras::bounded_chain(2)));
        let r = entailment_dense_upto(&bare, 2, &l).unwrap();
        assert!(r.failures.contains(&le()));
    }
}
