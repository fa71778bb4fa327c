//! The hom-functors at the finite level and the duality, fullness and
//! injectivity verdicts built on them.

use std::collections::HashSet;
use std::sync::Arc;

use rayon::prelude::*;

use crate::algebra::{
    has_product_factoring, hom_enumerate, subpower_algebra, subuniverses_of_power, FiniteAlgebra,
    HomSearch, Homomorphism,
};
use crate::closure::{bit, members};
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::structures::{AlterEgo, FiniteStructure, MorphismSearch, PowerSpace, StructMorphism};

/// Scope banner carried by every verdict.
pub const SCOPE: &str = "finite-level; infinite-level claims out of scope";

/// `D(A)`: the homomorphisms `A -> M` as a substructure of `ego^|A|`.
/// Point `i` of the structure is `homs[i]`.
#[derive(Debug, Clone)]
pub struct DualOfAlgebra {
    pub structure: FiniteStructure,
    pub homs: Vec<Homomorphism>,
}

impl DualOfAlgebra {
    /// `e_A(a)`: evaluation at `a` as a map from `D(A)` into the ego carrier.
    pub fn evaluation(&self, a: usize) -> StructMorphism {
        StructMorphism(self.homs.iter().map(|h| h.apply(a)).collect())
    }
}

pub fn dual_of_algebra(
    a: &FiniteAlgebra,
    ego: &Arc<AlterEgo>,
    limits: &Limits,
) -> Result<DualOfAlgebra> {
    let homs = HomSearch::new(a, ego.over())?
        .with_limit(limits.max_results)
        .all()?;
    if homs.is_empty() {
        return Err(Error::EmptyHomset(format!("{} into {}", a.name(), ego.over().name())));
    }
    let points = homs.iter().map(|h| h.map().to_vec()).collect();
    let structure = FiniteStructure::new(Arc::clone(ego), a.size(), points).map_err(|e| {
        Error::NotAlgebraic {
            name: ego.name().to_string(),
            detail: format!("D({}) is not closed: {e}", a.name()),
        }
    })?;
    Ok(DualOfAlgebra { structure, homs })
}

/// `E(X)`: the structure morphisms `X -> ego` as a subalgebra of `M^X`.
/// Element `i` of the algebra is `morphisms[i]` (a map from points to `M`).
#[derive(Debug, Clone)]
pub struct DualOfStructure {
    pub algebra: FiniteAlgebra,
    pub morphisms: Vec<StructMorphism>,
}

impl DualOfStructure {
    /// `ε_X(x)`: evaluation at point `x` as a map `E(X) -> M`.
    pub fn evaluation(&self, x: usize) -> Homomorphism {
        Homomorphism(self.morphisms.iter().map(|m| m.apply(x)).collect())
    }
}

pub fn dual_of_structure(x: &FiniteStructure, limits: &Limits) -> Result<DualOfStructure> {
    let target = FiniteStructure::ego_itself(x.ego_arc());
    let morphisms = MorphismSearch::new(x, &target)?
        .with_limit(limits.max_results)
        .all()?;
    dual_from_morphisms(x.ego(), morphisms, limits, "E(X)")
}

fn dual_from_morphisms(
    ego: &AlterEgo,
    morphisms: Vec<StructMorphism>,
    limits: &Limits,
    what: &str,
) -> Result<DualOfStructure> {
    if morphisms.is_empty() {
        return Err(Error::EmptyHomset(format!("{what} over {}", ego.name())));
    }
    if morphisms.len() > limits.max_dual {
        return Err(Error::size(
            format!("{what} over {}", ego.name()),
            morphisms.len() as u128,
            limits.max_dual as u128,
        ));
    }
    let elems: Vec<Vec<usize>> = morphisms.iter().map(|m| m.0.clone()).collect();
    let algebra = subpower_algebra(ego.over(), &elems, what).map_err(|e| Error::NotAlgebraic {
        name: ego.name().to_string(),
        detail: format!("{what} is not a subalgebra: {e}"),
    })?;
    Ok(DualOfStructure { algebra, morphisms })
}

/// Evidence that a map is not an evaluation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    /// A structure morphism `D(A) -> ego` indexed by the points of `D(A)`.
    Morphism(Vec<usize>),
    /// A homomorphism `E(X) -> M` indexed by the elements of `E(X)`.
    Hom(Vec<usize>),
    /// A homomorphism `E(C) -> M` for a connected component `C` of `X`; it
    /// gives `E(X) -> M` by composing with the projection onto `E(C)`.
    ComponentHom {
        component: Vec<usize>,
        dual: Vec<Vec<usize>>,
        hom: Vec<usize>,
    },
    /// The constant map onto a one-element subalgebra `{e}`.
    Constant(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VerdictKind {
    Iso,
    /// Two distinct elements (or points) with equal evaluations.
    NotInjective(usize, usize),
    NotSurjective(Witness),
}

/// How `E(X)` was handled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    Direct,
    /// Per connected component, via product factoring of homomorphisms.
    Components,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualityVerdict {
    pub kind: VerdictKind,
    /// Number of distinct evaluations.
    pub evaluations: usize,
    /// Number of all morphisms (or homomorphisms) on the dual side.
    pub total: u128,
    pub route: Route,
}

impl DualityVerdict {
    pub fn is_iso(&self) -> bool {
        self.kind == VerdictKind::Iso
    }

    pub fn scope(&self) -> &'static str {
        SCOPE
    }
}

/// Is `e_A` an isomorphism `A -> E(D(A))`?
pub fn check_duality_on(
    a: &FiniteAlgebra,
    ego: &Arc<AlterEgo>,
    limits: &Limits,
) -> Result<DualityVerdict> {
    let dual = dual_of_algebra(a, ego, limits)?;
    let target = FiniteStructure::ego_itself(Arc::clone(ego));
    let morphisms = MorphismSearch::new(&dual.structure, &target)?
        .with_limit(limits.max_results)
        .all()?;
    let evaluations: Vec<StructMorphism> = (0..a.size()).map(|x| dual.evaluation(x)).collect();
    for (x, e) in evaluations.iter().enumerate() {
        if morphisms.binary_search(e).is_err() {
            return Err(Error::NotAlgebraic {
                name: ego.name().to_string(),
                detail: format!("evaluation at {} is not a structure morphism", a.label(x)),
            });
        }
    }
    let distinct: HashSet<&StructMorphism> = evaluations.iter().collect();
    let total = morphisms.len() as u128;
    let kind = if let Some((x, y)) = first_collision(&evaluations) {
        VerdictKind::NotInjective(x, y)
    } else if let Some(m) = morphisms.iter().find(|m| !distinct.contains(m)) {
        VerdictKind::NotSurjective(Witness::Morphism(m.0.clone()))
    } else {
        VerdictKind::Iso
    };
    Ok(DualityVerdict {
        kind,
        evaluations: distinct.len(),
        total,
        route: Route::Direct,
    })
}

fn first_collision<T: PartialEq>(items: &[T]) -> Option<(usize, usize)> {
    for x in 0..items.len() {
        for y in x + 1..items.len() {
            if items[x] == items[y] {
                return Some((x, y));
            }
        }
    }
    None
}

/// Is `ε_X` an isomorphism `X -> D(E(X))`?
///
/// When every homomorphism from a finite product into `M` factors through a
/// projection (see [`has_product_factoring`]) the check runs per connected
/// component of `X`, so `E(X)` itself is never built.
pub fn check_fullness_on(x: &FiniteStructure, limits: &Limits) -> Result<DualityVerdict> {
    let tuples = x.interpretations();
    let comps = components(x.len(), &tuples);
    if comps.len() > 1 && has_product_factoring(x.ego().over(), limits)? {
        fullness_by_components(x, &tuples, &comps, limits)
    } else {
        fullness_direct(x, &tuples, limits)
    }
}

fn fullness_direct(
    x: &FiniteStructure,
    tuples: &[Vec<Vec<usize>>],
    limits: &Limits,
) -> Result<DualityVerdict> {
    let target = FiniteStructure::ego_itself(x.ego_arc());
    let morphisms = MorphismSearch::new(x, &target)?
        .with_source_interpretations(tuples)
        .with_limit(limits.max_results)
        .all()?;
    let dual = dual_from_morphisms(x.ego(), morphisms, limits, "E(X)")?;
    let m = x.ego().over();
    let homs = HomSearch::new(&dual.algebra, m)?
        .with_limit(limits.max_results)
        .all()?;
    let evaluations: Vec<Homomorphism> = (0..x.len()).map(|p| dual.evaluation(p)).collect();
    for e in &evaluations {
        if homs.binary_search(e).is_err() {
            return Err(Error::NotAlgebraic {
                name: x.ego().name().to_string(),
                detail: "an evaluation on E(X) is not a homomorphism".into(),
            });
        }
    }
    let distinct: HashSet<&Homomorphism> = evaluations.iter().collect();
    let kind = if let Some((p, q)) = first_collision(&evaluations) {
        VerdictKind::NotInjective(p, q)
    } else if let Some(h) = homs.iter().find(|h| !distinct.contains(h)) {
        VerdictKind::NotSurjective(Witness::Hom(h.0.clone()))
    } else {
        VerdictKind::Iso
    };
    Ok(DualityVerdict {
        kind,
        evaluations: distinct.len(),
        total: homs.len() as u128,
        route: Route::Direct,
    })
}

/// Connected components of the hypergraph whose edges are the induced tuples.
pub fn components(n: usize, tuples: &[Vec<Vec<usize>>]) -> Vec<Vec<usize>> {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    for t in tuples.iter().flatten() {
        for w in t.windows(2) {
            let (a, b) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut comps: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for p in 0..n {
        let r = find(&mut parent, p);
        if slot[r] == usize::MAX {
            slot[r] = comps.len();
            comps.push(Vec::new());
        }
        comps[slot[r]].push(p);
    }
    comps
}

fn fullness_by_components(
    x: &FiniteStructure,
    tuples: &[Vec<Vec<usize>>],
    comps: &[Vec<usize>],
    limits: &Limits,
) -> Result<DualityVerdict> {
    let m = x.ego().over();
    let singletons: Vec<usize> = subuniverses_of_power(m, 1, limits)?
        .iter()
        .filter(|s| s.len() == 1)
        .map(|s| s.iter().next().expect("one tuple")[0])
        .collect();
    // constant value of ε_p (if constant), per point
    let mut constant_eval: Vec<Option<usize>> = vec![None; x.len()];
    let mut total: u128 = singletons.len() as u128;
    let mut first_failure: Option<VerdictKind> = None;
    for comp in comps {
        let local = component_structure(x, comp, tuples);
        let target = FiniteStructure::ego_itself(x.ego_arc());
        let morphisms = MorphismSearch::new(&local.0, &target)?
            .with_source_interpretations(&local.1)
            .with_limit(limits.max_results)
            .all()?;
        let dual = dual_from_morphisms(x.ego(), morphisms, limits, "E(C)")?;
        let homs = hom_enumerate(&dual.algebra, m, None)?;
        let evals: Vec<Homomorphism> = (0..comp.len()).map(|i| dual.evaluation(i)).collect();
        for (i, e) in evals.iter().enumerate() {
            if homs.binary_search(e).is_err() {
                return Err(Error::NotAlgebraic {
                    name: x.ego().name().to_string(),
                    detail: "an evaluation on E(C) is not a homomorphism".into(),
                });
            }
            if e.0.iter().all(|&v| v == e.0[0]) {
                constant_eval[comp[i]] = Some(e.0[0]);
            }
        }
        let nonconstant: Vec<&Homomorphism> = homs
            .iter()
            .filter(|h| h.0.iter().any(|&v| v != h.0[0]))
            .collect();
        total += nonconstant.len() as u128;
        if first_failure.is_none() {
            if let Some((i, j)) = first_collision(&evals) {
                first_failure = Some(VerdictKind::NotInjective(comp[i], comp[j]));
            } else if let Some(h) = nonconstant.iter().find(|h| !evals.contains(h)) {
                first_failure = Some(VerdictKind::NotSurjective(Witness::ComponentHom {
                    component: comp.clone(),
                    dual: dual.morphisms.iter().map(|m| m.0.clone()).collect(),
                    hom: h.0.clone(),
                }));
            }
        }
    }
    // constant evaluations from different components coincide as maps on E(X)
    let mut injectivity = None;
    'outer: for p in 0..x.len() {
        for q in p + 1..x.len() {
            if constant_eval[p].is_some() && constant_eval[p] == constant_eval[q] {
                injectivity = Some(VerdictKind::NotInjective(p, q));
                break 'outer;
            }
        }
    }
    let missing_constant = singletons
        .iter()
        .find(|&&e| !constant_eval.contains(&Some(e)))
        .map(|&e| VerdictKind::NotSurjective(Witness::Constant(e)));
    let kind = match (injectivity, first_failure, missing_constant) {
        (Some(k), _, _) => k,
        (None, Some(k), _) => k,
        (None, None, Some(k)) => k,
        (None, None, None) => VerdictKind::Iso,
    };
    let evaluations = if matches!(kind, VerdictKind::NotInjective(..)) {
        count_distinct_evaluations(&constant_eval, comps)
    } else {
        x.len()
    };
    Ok(DualityVerdict {
        kind,
        evaluations,
        total,
        route: Route::Components,
    })
}

fn count_distinct_evaluations(constant_eval: &[Option<usize>], comps: &[Vec<usize>]) -> usize {
    let mut constants: Vec<usize> = constant_eval.iter().flatten().copied().collect();
    constants.sort_unstable();
    constants.dedup();
    let nonconstant = comps.iter().flatten().filter(|&&p| constant_eval[p].is_none()).count();
    constants.len() + nonconstant
}

/// The relational structure induced on a component (not necessarily closed),
/// with its tuples re-indexed.
fn component_structure(
    x: &FiniteStructure,
    comp: &[usize],
    tuples: &[Vec<Vec<usize>>],
) -> (FiniteStructure, Vec<Vec<Vec<usize>>>) {
    let mut local = vec![usize::MAX; x.len()];
    for (i, &p) in comp.iter().enumerate() {
        local[p] = i;
    }
    let points: Vec<Vec<usize>> = comp.iter().map(|&p| x.point(p).to_vec()).collect();
    let s = FiniteStructure::unchecked(x.ego_arc(), x.width(), points)
        .expect("points of a structure are valid");
    let sub: Vec<Vec<Vec<usize>>> = tuples
        .iter()
        .map(|ts| {
            ts.iter()
                .filter(|t| local[t[0]] != usize::MAX)
                .map(|t| t.iter().map(|&p| local[p]).collect())
                .collect()
        })
        .collect();
    (s, sub)
}

/// A morphism `phi: X -> ego` that does not extend to `Y ⊇ X`.
#[derive(Debug, Clone, PartialEq)]
pub struct InjectivityWitness {
    pub k: usize,
    pub y: FiniteStructure,
    pub x: FiniteStructure,
    /// Values of `phi` on the points of `x`.
    pub phi: Vec<usize>,
}

impl InjectivityWitness {
    /// Re-checks the witness from scratch: `X ≤ Y` are closed, `phi` is a
    /// morphism and no morphism `Y -> ego` restricts to it.
    pub fn verify(&self) -> Result<bool> {
        if self.x.closure_violation().is_some() || self.y.closure_violation().is_some() {
            return Ok(false);
        }
        let mut partial = vec![None; self.y.len()];
        for (i, p) in self.x.points().iter().enumerate() {
            match self.y.index_of(p) {
                Some(j) => partial[j] = Some(self.phi[i]),
                None => return Ok(false),
            }
        }
        let target = FiniteStructure::ego_itself(self.x.ego_arc());
        if !StructMorphism(self.phi.clone()).is_morphism(&self.x, &target) {
            return Ok(false);
        }
        Ok(!MorphismSearch::new(&self.y, &target)?
            .with_partial(&partial)?
            .exists())
    }
}

/// Result of a bounded injectivity sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutcome {
    pub witness: Option<InjectivityWitness>,
    pub power_bound: usize,
    pub size_bound: usize,
}

impl SweepOutcome {
    /// Human-readable summary; absence of a witness is never called strong.
    pub fn summary(&self) -> String {
        match &self.witness {
            Some(w) => format!(
                "injectivity fails: a morphism on a {}-point substructure does not extend to a {}-point substructure of power {}",
                w.x.len(),
                w.y.len(),
                w.k
            ),
            None => format!(
                "no counterexample found within bounds (power <= {}, size <= {})",
                self.power_bound, self.size_bound
            ),
        }
    }
}

/// Sweeps `X ≤ Y ≤ ego^k` for `k ≤ power_bound`, `|Y| ≤ size_bound`, in
/// order of `k`, then `|Y|`, then canonical order, and returns the first
/// morphism `X -> ego` with no extension to `Y`.
///
/// A failure inside `ego^k` exists iff one exists with `Y = ego^k`, because
/// an extension to `ego^k` restricts to every intermediate `Y`. That full
/// power is tested first when it fits the size bound, and the ordered search
/// only runs at a power known to contain a witness.
pub fn search_injectivity_failure(
    ego: &Arc<AlterEgo>,
    power_bound: usize,
    size_bound: usize,
    limits: &Limits,
) -> Result<SweepOutcome> {
    for k in 1..=power_bound {
        let space = PowerSpace::new(Arc::clone(ego), k, limits)?;
        if space.len() <= size_bound {
            let full = space.full_mask();
            let ext = restriction_source(&space, full, limits)?;
            let xs = space.closed_subsets(full, limits.max_results)?;
            let fails = xs
                .par_iter()
                .map(|&xm| first_nonextending(&space, full, &ext, xm, limits).map(|r| r.is_some()))
                .collect::<Result<Vec<bool>>>()?;
            if !fails.contains(&true) {
                continue;
            }
        }
        if let Some(w) = ordered_search(&space, size_bound, limits)? {
            return Ok(SweepOutcome {
                witness: Some(w),
                power_bound,
                size_bound,
            });
        }
    }
    Ok(SweepOutcome {
        witness: None,
        power_bound,
        size_bound,
    })
}

fn ordered_search(
    space: &PowerSpace,
    size_bound: usize,
    limits: &Limits,
) -> Result<Option<InjectivityWitness>> {
    let mut ys = space.closed_subsets(space.full_mask(), limits.max_results)?;
    ys.retain(|m| m.count_ones() as usize <= size_bound);
    let found: Option<Result<InjectivityWitness>> = ys.par_iter().find_map_first(|&ym| {
        let run = || -> Result<Option<InjectivityWitness>> {
            let ext = restriction_source(space, ym, limits)?;
            for xm in space.closed_subsets(ym, limits.max_results)? {
                if xm == ym {
                    continue;
                }
                if let Some(phi) = first_nonextending(space, ym, &ext, xm, limits)? {
                    return Ok(Some(InjectivityWitness {
                        k: space.k(),
                        y: space.structure(ym),
                        x: space.structure(xm),
                        phi,
                    }));
                }
            }
            Ok(None)
        };
        run().transpose()
    });
    found.transpose()
}

/// All morphisms `Y -> ego`, as maps on the members of `ym`.
fn restriction_source(space: &PowerSpace, ym: u64, limits: &Limits) -> Result<Vec<StructMorphism>> {
    let y = space.structure(ym);
    let target = FiniteStructure::ego_itself(y.ego_arc());
    MorphismSearch::new(&y, &target)?
        .with_limit(limits.max_results)
        .all()
}

/// Lexicographically first morphism `X -> ego` that is not the restriction
/// of a morphism `Y -> ego`.
fn first_nonextending(
    space: &PowerSpace,
    ym: u64,
    ext: &[StructMorphism],
    xm: u64,
    limits: &Limits,
) -> Result<Option<Vec<usize>>> {
    let x = space.structure(xm);
    let target = FiniteStructure::ego_itself(x.ego_arc());
    let ex = MorphismSearch::new(&x, &target)?
        .with_limit(limits.max_results)
        .all()?;
    let y_points = members(ym);
    let positions: Vec<usize> = members(xm)
        .into_iter()
        .map(|p| {
            debug_assert!(ym & bit(p) != 0);
            y_points.binary_search(&p).expect("X is inside Y")
        })
        .collect();
    let restrictions: HashSet<Vec<usize>> = ext
        .iter()
        .map(|m| positions.iter().map(|&i| m.0[i]).collect())
        .collect();
    if restrictions.len() == ex.len() {
        return Ok(None);
    }
    Ok(ex.into_iter().map(|m| m.0).find(|m| !restrictions.contains(m)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{algebras, egos};
    use crate::structures::enumerate_substructures;

    fn arc(e: AlterEgo) -> Arc<AlterEgo> {
        Arc::new(e)
    }

    #[test]
    fn dual_of_two_under_sigma_has_one_point() {
        let d = dual_of_algebra(&algebras::bounded_chain(2), &arc(egos::three_sigma()), &Limits::default())
            .unwrap();
        assert_eq!(d.homs.len(), 1);
    }

    #[test]
    fn one_point_structure_dual_is_m() {
        let ego = arc(AlterEgo::new("bare", algebras::bounded_chain(3)));
        let x = FiniteStructure::new(ego, 1, vec![vec![0]]).unwrap();
        let e = dual_of_structure(&x, &Limits::default()).unwrap();
        assert_eq!(e.algebra.size(), 3);
    }

    #[test]
    fn three_dualises_small_chains() {
        let ego = arc(egos::three());
        let l = Limits::default();
        for n in 2..=5 {
            let v = check_duality_on(&algebras::bounded_chain(n), &ego, &l).unwrap();
            assert!(v.is_iso(), "chain {n}: {v:?}");
        }
    }

    #[test]
    fn empty_ego_fails_on_three() {
        let ego = arc(AlterEgo::new("bare", algebras::bounded_chain(3)));
        let v = check_duality_on(&algebras::bounded_chain(3), &ego, &Limits::default()).unwrap();
        assert!(matches!(v.kind, VerdictKind::NotSurjective(_)));
    }

    #[test]
    fn non_member_is_not_injective() {
        let ego = arc(egos::cyclic(2));
        let v = check_duality_on(&algebras::cyclic_group(4), &ego, &Limits::default()).unwrap();
        assert_eq!(v.kind, VerdictKind::NotInjective(0, 2));
    }

    #[test]
    fn fullness_on_squares_of_sigma_and_h() {
        let l = Limits::default();
        for ego in [egos::three_sigma(), egos::three_h()] {
            let subs = enumerate_substructures(arc(ego), 2, 1000, &l).unwrap();
            for x in &subs.structures {
                let v = check_fullness_on(x, &l).unwrap();
                assert!(v.is_iso(), "{x:?}: {v:?}");
            }
        }
    }

    #[test]
    fn component_route_agrees_with_direct_route() {
        let l = Limits::default();
        let ego = arc(egos::priestley());
        let subs = enumerate_substructures(ego, 2, 1000, &l).unwrap();
        for x in &subs.structures {
            let tuples = x.interpretations();
            let comps = components(x.len(), &tuples);
            let direct = fullness_direct(x, &tuples, &l).unwrap();
            let split = fullness_by_components(x, &tuples, &comps, &l).unwrap();
            assert_eq!(direct.is_iso(), split.is_iso(), "{x:?}");
        }
    }

    #[test]
    fn h_fails_injectivity_at_power_one() {
        let out = search_injectivity_failure(&arc(egos::three_h()), 3, 27, &Limits::default()).unwrap();
        let w = out.witness.clone().unwrap();
        assert_eq!(w.k, 1);
        assert_eq!(w.y.points(), &[vec![0], vec![1], vec![2]]);
        assert_eq!(w.x.points(), &[vec![0], vec![2]]);
        assert_eq!(w.phi, vec![2, 0]);
        assert!(w.verify().unwrap());
    }

    #[test]
    fn sigma_has_no_small_failure() {
        let out = search_injectivity_failure(&arc(egos::three_sigma()), 2, 16, &Limits::default()).unwrap();
        assert!(out.witness.is_none());
        assert!(out.summary().starts_with("no counterexample found within bounds"));
    }
}
