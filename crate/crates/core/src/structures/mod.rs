//! Alter egos over a finite algebra and the finite structures living in
//! their powers.
//!
//! Partial operations are handled through their graphs, so the search core
//! only ever deals with relation preservation.

mod morphism;
mod space;

pub use morphism::{brute_force_morphisms, MorphismSearch, StructMorphism};
pub use space::{
    enumerate_substructures, substructure_generate, FiniteStructure, PowerSpace, Substructures,
};

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::sync::Arc;

use crate::algebra::{FiniteAlgebra, OperationTable};
use crate::error::{Error, Result};
use crate::relation::Relation;
use crate::tuples::Tuples;

/// A partial operation given by its table on an explicit domain.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PartialOperationTable {
    arity: usize,
    size: usize,
    entries: BTreeMap<Vec<usize>, usize>,
}

impl PartialOperationTable {
    pub fn new(
        arity: usize,
        size: usize,
        entries: impl IntoIterator<Item = (Vec<usize>, usize)>,
    ) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (args, v) in entries {
            if args.len() != arity {
                return Err(Error::ArityMismatch {
                    expected: arity,
                    found: args.len(),
                });
            }
            if let Some(bad) = args.iter().chain(std::iter::once(&v)).find(|&&x| x >= size) {
                return Err(Error::invalid(format!("value {bad} exceeds carrier {size}")));
            }
            if map.insert(args.clone(), v).is_some() {
                return Err(Error::invalid(format!("domain tuple {args:?} listed twice")));
            }
        }
        Ok(PartialOperationTable {
            arity,
            size,
            entries: map,
        })
    }

    /// Builds from a domain (in any order) and values listed in lexicographic domain order.
    pub fn from_domain(
        arity: usize,
        size: usize,
        domain: &Relation,
        values: &[usize],
    ) -> Result<Self> {
        if domain.arity() != arity {
            return Err(Error::ArityMismatch {
                expected: arity,
                found: domain.arity(),
            });
        }
        if domain.len() != values.len() {
            return Err(Error::invalid(format!(
                "partial table has {} values for {} domain tuples",
                values.len(),
                domain.len()
            )));
        }
        PartialOperationTable::new(arity, size, domain.iter().cloned().zip(values.iter().copied()))
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn apply(&self, args: &[usize]) -> Option<usize> {
        self.entries.get(args).copied()
    }

    pub fn domain(&self) -> Relation {
        Relation::new(self.arity, self.entries.keys().cloned()).expect("uniform arity")
    }

    /// Values in lexicographic domain order.
    pub fn values(&self) -> Vec<usize> {
        self.entries.values().copied().collect()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Vec<usize>, usize)> {
        self.entries.iter().map(|(k, &v)| (k, v))
    }

    pub fn graph(&self) -> Relation {
        graph_of_partial(self)
    }
}

impl fmt::Debug for PartialOperationTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Partial/{}{:?}", self.arity, self.entries)
    }
}

/// `{(x1..xn, h(x)) : x ∈ dom h}`.
pub fn graph_of_partial(h: &PartialOperationTable) -> Relation {
    Relation::new(
        h.arity + 1,
        h.entries.iter().map(|(args, &v)| {
            let mut t = args.clone();
            t.push(v);
            t
        }),
    )
    .expect("uniform arity")
}

/// `{(x1..xn, g(x))}` for a total operation.
pub fn graph_of(g: &OperationTable) -> Relation {
    g.graph()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SymbolKind {
    Total,
    Partial,
    Relation,
}

impl SymbolKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SymbolKind::Total => "op",
            SymbolKind::Partial => "partial",
            SymbolKind::Relation => "rel",
        }
    }
}

/// A symbol of the alter ego together with the relation it imposes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub name: String,
    pub kind: SymbolKind,
    pub relation: Relation,
}

/// `M̰ = (M; G, H, R)` with discrete (hence omitted) topology.
#[derive(Clone, PartialEq, Eq)]
pub struct AlterEgo {
    name: String,
    over: Arc<FiniteAlgebra>,
    total: Vec<(String, OperationTable)>,
    partial: Vec<(String, PartialOperationTable)>,
    relations: Vec<(String, Relation)>,
    constraints: Vec<Constraint>,
}

impl AlterEgo {
    pub fn new(name: impl Into<String>, over: impl Into<Arc<FiniteAlgebra>>) -> Self {
        AlterEgo {
            name: name.into(),
            over: over.into(),
            total: Vec::new(),
            partial: Vec::new(),
            relations: Vec::new(),
            constraints: Vec::new(),
        }
    }

    fn check_name(&self, name: &str) -> Result<()> {
        if self.constraints.iter().any(|c| c.name == name) {
            return Err(Error::invalid(format!(
                "symbol `{name}` declared twice in `{}`",
                self.name
            )));
        }
        Ok(())
    }

    fn rebuild(&mut self) {
        let mut cs = Vec::new();
        for (n, g) in &self.total {
            cs.push(Constraint {
                name: n.clone(),
                kind: SymbolKind::Total,
                relation: g.graph(),
            });
        }
        for (n, h) in &self.partial {
            cs.push(Constraint {
                name: n.clone(),
                kind: SymbolKind::Partial,
                relation: h.graph(),
            });
        }
        for (n, r) in &self.relations {
            cs.push(Constraint {
                name: n.clone(),
                kind: SymbolKind::Relation,
                relation: r.clone(),
            });
        }
        self.constraints = cs;
    }

    pub fn with_total(mut self, name: impl Into<String>, g: OperationTable) -> Result<Self> {
        let name = name.into();
        self.check_name(&name)?;
        if g.size() != self.over.size() {
            return Err(Error::invalid(format!(
                "operation `{name}` is on {} elements, carrier has {}",
                g.size(),
                self.over.size()
            )));
        }
        self.total.push((name, g));
        self.rebuild();
        Ok(self)
    }

    pub fn with_partial(
        mut self,
        name: impl Into<String>,
        h: PartialOperationTable,
    ) -> Result<Self> {
        let name = name.into();
        self.check_name(&name)?;
        if h.size() != self.over.size() {
            return Err(Error::invalid(format!(
                "partial operation `{name}` is on {} elements, carrier has {}",
                h.size(),
                self.over.size()
            )));
        }
        self.partial.push((name, h));
        self.rebuild();
        Ok(self)
    }

    pub fn with_relation(mut self, name: impl Into<String>, r: Relation) -> Result<Self> {
        let name = name.into();
        self.check_name(&name)?;
        if r.arity() == 0 {
            return Err(Error::invalid(format!("relation `{name}` has arity 0")));
        }
        if r.max_value_bound() > self.over.size() {
            return Err(Error::invalid(format!(
                "value {} exceeds carrier {}",
                r.max_value_bound() - 1,
                self.over.size()
            )));
        }
        self.relations.push((name, r));
        self.rebuild();
        Ok(self)
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn over(&self) -> &FiniteAlgebra {
        &self.over
    }

    pub fn over_arc(&self) -> Arc<FiniteAlgebra> {
        Arc::clone(&self.over)
    }

    pub fn carrier(&self) -> usize {
        self.over.size()
    }

    pub fn total(&self) -> &[(String, OperationTable)] {
        &self.total
    }

    pub fn partial(&self) -> &[(String, PartialOperationTable)] {
        &self.partial
    }

    pub fn relations(&self) -> &[(String, Relation)] {
        &self.relations
    }

    /// Graphs of `G`, then graphs of `H`, then `R`, in declaration order.
    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn constraint_relations(&self) -> Vec<Relation> {
        self.constraints.iter().map(|c| c.relation.clone()).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    /// Checks every graph and relation for being a subuniverse of the matching power of `M`.
    pub fn is_algebraic_over(&self) -> AlgebraicityReport {
        AlgebraicityReport {
            ego: self.name.clone(),
            entries: self
                .constraints
                .iter()
                .map(|c| AlgebraicityEntry {
                    name: c.name.clone(),
                    kind: c.kind,
                    violation: closure_violation(&self.over, &c.relation),
                })
                .collect(),
        }
    }
}

impl fmt::Debug for AlterEgo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AlterEgo")
            .field("name", &self.name)
            .field("over", &self.over.name())
            .field(
                "symbols",
                &self.constraints.iter().map(|c| &c.name).collect::<Vec<_>>(),
            )
            .finish()
    }
}

/// An operation of `M` applied coordinatewise to tuples of a relation,
/// producing a tuple outside it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub operation: String,
    pub arguments: Vec<Vec<usize>>,
    pub result: Vec<usize>,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "`{}` applied to {:?} gives {:?}",
            self.operation, self.arguments, self.result
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgebraicityEntry {
    pub name: String,
    pub kind: SymbolKind,
    pub violation: Option<Violation>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgebraicityReport {
    pub ego: String,
    pub entries: Vec<AlgebraicityEntry>,
}

impl AlgebraicityReport {
    pub fn is_algebraic(&self) -> bool {
        self.entries.iter().all(|e| e.violation.is_none())
    }

    pub fn first_failure(&self) -> Option<&AlgebraicityEntry> {
        self.entries.iter().find(|e| e.violation.is_some())
    }
}

/// First coordinatewise application of an operation of `m` leaving `r`, if any.
pub fn closure_violation(m: &FiniteAlgebra, r: &Relation) -> Option<Violation> {
    let tuples: Vec<&Vec<usize>> = r.iter().collect();
    let set: HashSet<&[usize]> = tuples.iter().map(|t| t.as_slice()).collect();
    let arity = r.arity();
    for op in m.ops() {
        let k = op.table.arity();
        let mut column = vec![0; k];
        for pick in Tuples::new(tuples.len(), k) {
            let result: Vec<usize> = (0..arity)
                .map(|c| {
                    for (slot, &i) in column.iter_mut().zip(&pick) {
                        *slot = tuples[i][c];
                    }
                    op.table.apply(&column)
                })
                .collect();
            if !set.contains(result.as_slice()) {
                return Some(Violation {
                    operation: op.name.clone(),
                    arguments: pick.iter().map(|&i| tuples[i].clone()).collect(),
                    result,
                });
            }
        }
    }
    None
}

/// True when `r` is a subuniverse of `M^arity`.
pub fn is_algebraic_relation(m: &FiniteAlgebra, r: &Relation) -> bool {
    closure_violation(m, r).is_none()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{algebras, egos};

    #[test]
    fn sigma_graph() {
        let ego = egos::three_sigma();
        let (_, sigma) = &ego.partial()[0];
        let g = sigma.graph();
        let expected = Relation::new(3, vec![vec![0, 0, 0], vec![0, 2, 1], vec![2, 2, 2]]).unwrap();
        assert_eq!(g, expected);
    }

    #[test]
    fn identity_graph_on_two() {
        let id = OperationTable::projection(1, 2, 0);
        assert_eq!(graph_of(&id), Relation::diagonal(2, 2));
    }

    #[test]
    fn non_algebraic_relation_is_reported() {
        let two = algebras::bounded_chain(2);
        let ego = AlterEgo::new("bad", two)
            .with_relation("r", Relation::new(2, vec![vec![0, 1]]).unwrap())
            .unwrap();
        let report = ego.is_algebraic_over();
        assert!(!report.is_algebraic());
        let v = report.first_failure().unwrap().violation.clone().unwrap();
        assert!(!Relation::new(2, vec![vec![0, 1]]).unwrap().contains(&v.result));
    }

    #[test]
    fn empty_ego_is_algebraic() {
        let ego = AlterEgo::new("e", algebras::bounded_chain(3));
        assert!(ego.is_algebraic_over().is_algebraic());
    }

    #[test]
    fn duplicate_symbols_rejected() {
        let ego = AlterEgo::new("e", algebras::bounded_chain(2))
            .with_relation("r", Relation::diagonal(2, 2))
            .unwrap();
        assert!(ego.with_relation("r", Relation::diagonal(2, 2)).is_err());
    }
}
