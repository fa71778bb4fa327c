//! Built-in algebras and alter egos, and the regression manifest of expected
//! verdicts.

pub mod algebras;
pub mod egos;
mod manifest;

pub use manifest::{
    builtin_manifest, run_claim, run_manifest, Claim, ClaimManifest, ClaimOutcome, ClaimOp,
    ManifestReport,
};

use std::sync::Arc;

use crate::algebra::FiniteAlgebra;
use crate::endo::endo_ego;
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::relation::Relation;
use crate::structures::AlterEgo;

/// Where the data of an entry comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Provenance {
    /// Tables taken verbatim from the literature.
    Stated,
    /// Reconstructed from stated conditions, or computed.
    Derived,
    /// Standard definitions from outside the primary source.
    External,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::Stated => "stated",
            Provenance::Derived => "derived",
            Provenance::External => "external",
        }
    }
}

#[derive(Debug, Clone)]
pub enum EntryKind {
    Algebra(Arc<FiniteAlgebra>),
    Ego(Arc<AlterEgo>),
    /// A relation on the carrier of the named algebra.
    Relation { on: String, relation: Arc<Relation> },
}

#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub id: String,
    pub kind: EntryKind,
    pub provenance: Provenance,
    pub notes: &'static str,
}

#[derive(Debug, Clone, Default)]
pub struct Catalog {
    pub entries: Vec<CatalogEntry>,
}

impl Catalog {
    pub fn algebra(&self, id: &str) -> Result<Arc<FiniteAlgebra>> {
        self.entries
            .iter()
            .find_map(|e| match &e.kind {
                EntryKind::Algebra(a) if e.id == id => Some(Arc::clone(a)),
                _ => None,
            })
            .ok_or_else(|| Error::invalid(format!("no catalog algebra `{id}`")))
    }

    pub fn ego(&self, id: &str) -> Result<Arc<AlterEgo>> {
        self.entries
            .iter()
            .find_map(|e| match &e.kind {
                EntryKind::Ego(g) if e.id == id => Some(Arc::clone(g)),
                _ => None,
            })
            .ok_or_else(|| Error::invalid(format!("no catalog ego `{id}`")))
    }

    /// The relation and the id of the algebra it lives on.
    pub fn relation(&self, id: &str) -> Result<(String, Arc<Relation>)> {
        self.entries
            .iter()
            .find_map(|e| match &e.kind {
                EntryKind::Relation { on, relation } if e.id == id => Some((on.clone(), Arc::clone(relation))),
                _ => None,
            })
            .ok_or_else(|| Error::invalid(format!("no catalog relation `{id}`")))
    }

    pub fn entry(&self, id: &str) -> Option<&CatalogEntry> {
        self.entries.iter().find(|e| e.id == id)
    }

    pub fn algebras(&self) -> impl Iterator<Item = &Arc<FiniteAlgebra>> {
        self.entries.iter().filter_map(|e| match &e.kind {
            EntryKind::Algebra(a) => Some(a),
            _ => None,
        })
    }

    pub fn egos(&self) -> impl Iterator<Item = &Arc<AlterEgo>> {
        self.entries.iter().filter_map(|e| match &e.kind {
            EntryKind::Ego(g) => Some(g),
            _ => None,
        })
    }

    /// Every ego must be algebraic over an algebra of the catalog.
    pub fn validate(&self) -> Result<()> {
        for e in &self.entries {
            if let EntryKind::Relation { on, relation } = &e.kind {
                let m = self.algebra(on).map_err(|_| Error::SelfValidationFailed {
                    id: e.id.clone(),
                    detail: format!("algebra `{on}` is not in the catalog"),
                })?;
                if relation.max_value_bound() > m.size() {
                    return Err(Error::SelfValidationFailed {
                        id: e.id.clone(),
                        detail: format!("values exceed the carrier of `{on}`"),
                    });
                }
            }
            if let EntryKind::Ego(g) = &e.kind {
                let report = g.is_algebraic_over();
                if let Some(bad) = report.first_failure() {
                    return Err(Error::SelfValidationFailed {
                        id: e.id.clone(),
                        detail: format!("`{}` is not algebraic", bad.name),
                    });
                }
                let over = self.algebra(g.over().name()).map_err(|_| Error::SelfValidationFailed {
                    id: e.id.clone(),
                    detail: format!("algebra `{}` is not in the catalog", g.over().name()),
                })?;
                if *over != *g.over() {
                    return Err(Error::SelfValidationFailed {
                        id: e.id.clone(),
                        detail: format!("algebra `{}` differs from the catalog entry", g.over().name()),
                    });
                }
            }
        }
        Ok(())
    }
}

/// Builds every entry and validates the egos.
pub fn load_catalog() -> Result<Catalog> {
    use Provenance::*;
    let mut entries = Vec::new();
    let mut alg = |a: FiniteAlgebra, provenance, notes| {
        entries.push(CatalogEntry {
            id: a.name().to_string(),
            kind: EntryKind::Algebra(Arc::new(a)),
            provenance,
            notes,
        })
    };
    for n in 2..=4 {
        alg(algebras::lattice_chain(n), Stated, "chain as a lattice");
    }
    for n in 2..=5 {
        alg(algebras::bounded_chain(n), Stated, "chain as a bounded distributive lattice");
    }
    let c2 = algebras::bounded_chain(2);
    let c2x2 = algebras::product(&c2, &c2, "chain2x2");
    alg(algebras::product(&c2x2, &c2, "chain2x2x2"), Derived, "Boolean lattice 2^3");
    alg(algebras::product(&c2, &algebras::bounded_chain(3), "chain2x3"), Derived, "product");
    alg(algebras::product(&c2, &algebras::bounded_chain(4), "chain2x4"), Derived, "product");
    alg(c2x2, Derived, "Boolean lattice 2^2");
    alg(algebras::stone_three(), Stated, "3-element Stone algebra");
    for n in 2..=4 {
        alg(algebras::double_stone_chain(n), Stated, "double Stone chain, listed tables");
    }
    alg(
        algebras::double_stone_chain(5),
        Derived,
        "double Stone 5-chain; star and plus from the Stone and dual Stone laws on a chain",
    );
    let ds2 = algebras::double_stone_chain(2);
    alg(algebras::product(&ds2, &ds2, "ds2x2"), Derived, "Boolean double Stone algebra 2^2");
    for n in [3, 4] {
        let j = algebras::double_stone_chain(n);
        alg(algebras::product(&j, &ds2, &format!("ds{n}x2")), Derived, "non-Boolean chain times 2");
    }
    alg(algebras::median_two(), Derived, "majority table, unique by enumeration");
    for m in 2..=6 {
        alg(algebras::cyclic_group(m), Stated, "cyclic group");
    }
    for (z, o) in [(false, false), (true, false), (false, true), (true, true)] {
        alg(algebras::semilattice_two(z, o), Stated, "2-element join semilattice");
    }
    alg(algebras::discriminator_chain(), External, "4-chain with the standard ternary discriminator");
    alg(algebras::kleene_four(), External, "standard 4-element Kleene chain");

    let mut ego = |g: AlterEgo, provenance, notes| {
        entries.push(CatalogEntry {
            id: g.name().to_string(),
            kind: EntryKind::Ego(Arc::new(g)),
            provenance,
            notes,
        })
    };
    ego(egos::three(), Stated, "the non-identity endomorphisms f, g of the 3-chain");
    ego(egos::three_sigma(), Stated, "adds the partial operation sigma");
    ego(
        egos::three_h(),
        Derived,
        "adds the partial operation h; values decoded from a drawing",
    );
    ego(egos::priestley(), Stated, "order relation on the bounded 2-chain");
    ego(egos::priestley_unbounded(), Stated, "order and both constants on the 2-element lattice");
    ego(egos::stone(), Stated, "graph(d) and the order prec");
    for m in 2..=6 {
        ego(egos::cyclic(m), Stated, "(Z_m; +, -, 0)");
    }
    for (z, o) in [(false, false), (true, false), (false, true), (true, true)] {
        ego(egos::semilattice(z, o), Stated, "join and the one-element subuniverses as constants");
    }
    ego(egos::discriminator_bot(), Stated, "graph of the partial endomorphism u with u(a) = b");
    ego(
        egos::all_partial_operations(algebras::lattice_chain(2), 2, &Limits::default())?,
        Derived,
        "all algebraic partial operations of arity <= 2",
    );
    for id in ["ds3", "ds3x2", "ds4x2", "chain2", "chain3", "lat2"] {
        let m = Catalog {
            entries: entries.clone(),
        }
        .algebra(id)?;
        entries.push(CatalogEntry {
            id: format!("{id}_end"),
            kind: EntryKind::Ego(Arc::new(endo_ego(&m)?)),
            provenance: Derived,
            notes: "End(M) as total unary operations",
        });
    }
    let catalog = Catalog { entries };
    catalog.validate()?;
    Ok(catalog)
}
