//! Relational constructs: products, intersections, trivial relations,
//! repetition removal, projections and their classification, the
//! retraction decomposition of an entailed relation and equalizer closure.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use super::{entails, graph_of_dual, labelled_dual, relation_algebra};
use crate::algebra::{hom_enumerate, power, FiniteAlgebra, HomSearch, Homomorphism};
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::relation::Relation;
use crate::structures::AlterEgo;
use crate::tuples::{encode, Tuples};

/// `r x s`: all concatenations.
pub fn product_rel(r: &Relation, s: &Relation) -> Relation {
    let tuples = r
        .iter()
        .flat_map(|a| s.iter().map(move |b| a.iter().chain(b).copied().collect::<Vec<_>>()));
    Relation::new(r.arity() + s.arity(), tuples).expect("uniform arity")
}

pub fn intersect_rel(r: &Relation, s: &Relation) -> Result<Relation> {
    if r.arity() != s.arity() {
        return Err(Error::ArityMismatch {
            expected: r.arity(),
            found: s.arity(),
        });
    }
    Relation::new(r.arity(), r.iter().filter(|t| s.contains(t)).cloned())
}

/// The relations of arity `n` defined by equalities alone, one per
/// partition of the coordinates (in restricted-growth order).
pub fn trivial_rels(carrier: usize, n: usize) -> Vec<Relation> {
    let mut out = Vec::new();
    let mut rgs = vec![0usize; n];
    loop {
        let blocks = rgs.iter().max().map_or(0, |m| m + 1);
        let tuples = Tuples::new(carrier, blocks).map(|v| rgs.iter().map(|&b| v[b]).collect::<Vec<_>>());
        out.push(Relation::new(n, tuples).expect("uniform arity"));
        // next restricted growth string
        let mut i = n;
        loop {
            if i <= 1 {
                return out;
            }
            i -= 1;
            let bound = rgs[..i].iter().max().copied().unwrap_or(0) + 1;
            if rgs[i] < bound {
                rgs[i] += 1;
                for slot in &mut rgs[i + 1..] {
                    *slot = 0;
                }
                break;
            }
        }
    }
}

/// Drops every coordinate that always equals an earlier one. Returns the
/// smaller relation and the kept coordinates.
pub fn remove_repetitions(r: &Relation) -> (Relation, Vec<usize>) {
    let kept: Vec<usize> = (0..r.arity())
        .filter(|&j| !(0..j).any(|i| r.iter().all(|t| t[i] == t[j])))
        .collect();
    let projected = Relation::new(
        kept.len(),
        r.iter().map(|t| kept.iter().map(|&i| t[i]).collect::<Vec<_>>()),
    )
    .expect("uniform arity");
    (projected, kept)
}

/// `r_eta = { (d_eta(1), .., d_eta(n)) : d in r }` for an injective `eta`.
pub fn project(r: &Relation, eta: &[usize]) -> Result<Relation> {
    let mut seen = BTreeSet::new();
    for &i in eta {
        if i >= r.arity() || !seen.insert(i) {
            return Err(Error::invalid(format!(
                "projection {eta:?} is not injective into {} coordinates",
                r.arity()
            )));
        }
    }
    Relation::new(eta.len(), r.iter().map(|t| eta.iter().map(|&i| t[i]).collect::<Vec<_>>()))
}

/// How the natural projection `p: r -> r_eta` splits. `q` maps tuple
/// indices of `r_eta` to tuple indices of `r` (sorted order).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Projection {
    Plain,
    Retractive(Homomorphism),
    Bijective(Homomorphism),
}

impl Projection {
    pub fn section(&self) -> Option<&Homomorphism> {
        match self {
            Projection::Plain => None,
            Projection::Retractive(q) | Projection::Bijective(q) => Some(q),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Projection::Plain => "plain",
            Projection::Retractive(_) => "retractive",
            Projection::Bijective(_) => "bijective",
        }
    }
}

fn projection_map(r: &Relation, s: &Relation, eta: &[usize]) -> Vec<usize> {
    let index: BTreeMap<&Vec<usize>, usize> = s.iter().enumerate().map(|(i, t)| (t, i)).collect();
    r.iter()
        .map(|t| index[&eta.iter().map(|&i| t[i]).collect::<Vec<_>>()])
        .collect()
}

pub fn classify_projection(m: &FiniteAlgebra, r: &Relation, eta: &[usize]) -> Result<Projection> {
    let s = project(r, eta)?;
    let r_alg = relation_algebra(m, r, "r")?;
    let s_alg = relation_algebra(m, &s, "r_eta")?;
    let p = projection_map(r, &s, eta);
    let allowed: Vec<Vec<bool>> = (0..s.len())
        .map(|x| p.iter().map(|&px| px == x).collect())
        .collect();
    let Some(q) = HomSearch::new(&s_alg, &r_alg)?.with_allowed(allowed).first() else {
        return Ok(Projection::Plain);
    };
    if (0..r.len()).all(|y| q.apply(p[y]) == y) {
        Ok(Projection::Bijective(q))
    } else {
        Ok(Projection::Retractive(q))
    }
}

/// `s` as a retractive projection of the graph of `E(D(s))` onto the
/// projection coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RetractionCertificate {
    /// Points of `D(s)` labelling the coordinates of `graph`: the
    /// projections first (repeated for aliases), then the rest.
    pub labels: Vec<usize>,
    pub graph: Relation,
    pub eta: Vec<usize>,
    pub classification: Projection,
}

impl RetractionCertificate {
    /// Re-checks the certificate from its data alone.
    pub fn verify(&self, m: &FiniteAlgebra, s: &Relation) -> Result<bool> {
        if &project(&self.graph, &self.eta)? != s {
            return Ok(false);
        }
        let Some(q) = self.classification.section() else {
            return Ok(false);
        };
        let r_alg = relation_algebra(m, &self.graph, "graph")?;
        let s_alg = relation_algebra(m, s, "s")?;
        let p = projection_map(&self.graph, s, &self.eta);
        Ok(q.is_homomorphism(&s_alg, &r_alg) && (0..s.len()).all(|x| p[q.apply(x)] == x))
    }
}

pub fn retraction_decomposition(
    ego: &Arc<AlterEgo>,
    s: &Relation,
    limits: &Limits,
) -> Result<RetractionCertificate> {
    if !entails(ego, s, limits)?.holds {
        return Err(Error::invalid("the ego does not entail the relation"));
    }
    let ld = labelled_dual(ego, s, limits)?;
    let mut labels = ld.rho.clone();
    labels.extend(ld.taus());
    let graph = graph_of_dual(&ld.dual.structure, &labels, limits)?;
    let eta: Vec<usize> = (0..s.arity()).collect();
    let classification = classify_projection(ego.over(), &graph, &eta)?;
    let cert = RetractionCertificate {
        labels,
        graph,
        eta,
        classification,
    };
    if !cert.verify(ego.over(), s)? {
        return Err(Error::CertificateMismatch(format!(
            "projection of the dual graph is {} for an entailed relation",
            cert.classification.as_str()
        )));
    }
    Ok(cert)
}

/// Intersection of all equalizers `{x : phi(x) = psi(x)}` of homomorphisms
/// `phi, psi: M^n -> M` that contain `r`.
pub fn equalizer_closure(m: &FiniteAlgebra, r: &Relation, limits: &Limits) -> Result<Relation> {
    let n = r.arity();
    let mn = power(m, n, limits)?;
    let homs = hom_enumerate(&mn, m, None)?;
    let base = m.size();
    let r_idx: Vec<usize> = r.iter().map(|t| encode(base, t)).collect();
    // two homs agreeing on r must agree on every member of the closure
    let mut groups: BTreeMap<Vec<usize>, Vec<&Homomorphism>> = BTreeMap::new();
    for h in &homs {
        groups
            .entry(r_idx.iter().map(|&i| h.apply(i)).collect())
            .or_default()
            .push(h);
    }
    let tuples = Tuples::new(base, n).filter(|t| {
        let i = encode(base, t);
        groups
            .values()
            .all(|g| g.iter().all(|h| h.apply(i) == g[0].apply(i)))
    });
    Relation::new(n, tuples)
}
