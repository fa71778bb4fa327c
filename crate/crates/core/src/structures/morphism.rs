//! Structure-morphism search: backtracking with forward checking over
//! bitmask domains, most-constrained variable first.

use super::FiniteStructure;
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::relation::{Relation, RelationIndex};
use crate::tuples::Tuples;

/// A structure morphism as a map between point indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StructMorphism(pub Vec<usize>);

impl StructMorphism {
    pub fn map(&self) -> &[usize] {
        &self.0
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.0[x]
    }

    /// Checks preservation of every ego symbol directly.
    pub fn is_morphism(&self, source: &FiniteStructure, target: &FiniteStructure) -> bool {
        if self.0.len() != source.len() || self.0.iter().any(|&v| v >= target.len()) {
            return false;
        }
        source.ego().constraints().iter().all(|c| {
            let image: std::collections::HashSet<Vec<usize>> =
                target.induced(&c.relation).into_iter().collect();
            source
                .induced(&c.relation)
                .iter()
                .all(|t| image.contains(&t.iter().map(|&x| self.0[x]).collect::<Vec<_>>()))
        })
    }
}

/// Configurable search for structure morphisms `source -> target`.
pub struct MorphismSearch<'a> {
    source: &'a FiniteStructure,
    target: &'a FiniteStructure,
    partial: Vec<Option<usize>>,
    limit: usize,
    source_tuples: Option<&'a [Vec<Vec<usize>>]>,
}

impl<'a> MorphismSearch<'a> {
    pub fn new(source: &'a FiniteStructure, target: &'a FiniteStructure) -> Result<Self> {
        if source.ego() != target.ego() {
            return Err(Error::invalid(format!(
                "structures over different alter egos `{}` and `{}`",
                source.ego().name(),
                target.ego().name()
            )));
        }
        if target.len() > 64 {
            return Err(Error::size("morphism target points", target.len() as u128, 64));
        }
        Ok(MorphismSearch {
            source,
            target,
            partial: vec![None; source.len()],
            limit: Limits::default().max_results,
            source_tuples: None,
        })
    }

    pub fn with_partial(mut self, partial: &[Option<usize>]) -> Result<Self> {
        if partial.len() != self.source.len() {
            return Err(Error::invalid(format!(
                "partial map has {} entries, source has {} points",
                partial.len(),
                self.source.len()
            )));
        }
        self.partial = partial.to_vec();
        Ok(self)
    }

    pub fn with_limit(mut self, limit: usize) -> Self {
        self.limit = limit;
        self
    }

    /// Reuse precomputed source interpretations (as from [`FiniteStructure::interpretations`]).
    pub fn with_source_interpretations(mut self, tuples: &'a [Vec<Vec<usize>>]) -> Self {
        self.source_tuples = Some(tuples);
        self
    }

    /// All morphisms, sorted by map table.
    pub fn all(&self) -> Result<Vec<StructMorphism>> {
        let mut out = Vec::new();
        let mut over = false;
        self.run(&mut |m| {
            out.push(StructMorphism(m.to_vec()));
            if out.len() > self.limit {
                over = true;
                return false;
            }
            true
        });
        if over {
            return Err(Error::size(
                "structure morphisms",
                out.len() as u128,
                self.limit as u128,
            ));
        }
        out.sort();
        Ok(out)
    }

    /// Some morphism, the first met in search order.
    pub fn first(&self) -> Option<StructMorphism> {
        let mut found = None;
        self.run(&mut |m| {
            found = Some(StructMorphism(m.to_vec()));
            false
        });
        found
    }

    pub fn exists(&self) -> bool {
        self.first().is_some()
    }

    fn run(&self, visit: &mut dyn FnMut(&[usize]) -> bool) {
        let computed;
        let tuples: &[Vec<Vec<usize>>] = match self.source_tuples {
            Some(t) => t,
            None => {
                computed = self.source.interpretations();
                &computed
            }
        };
        let targets: Vec<RelationIndex> = self
            .source
            .ego()
            .constraints()
            .iter()
            .map(|c| {
                let image = Relation::new(c.relation.arity(), self.target.induced(&c.relation))
                    .expect("uniform arity");
                RelationIndex::new(self.target.len(), &image)
            })
            .collect();
        let mut csp = Csp::new(self.source.len(), self.target.len(), tuples, &targets);
        for (x, v) in self.partial.iter().enumerate() {
            if let Some(v) = *v {
                if v >= self.target.len() {
                    return;
                }
                csp.domains[x] &= 1u64 << v;
            }
        }
        csp.solve(visit);
    }
}

struct Csp<'t> {
    domains: Vec<u64>,
    assign: Vec<usize>,
    /// per variable: (constraint, tuple) occurrences
    occ: Vec<Vec<(usize, usize)>>,
    tuples: &'t [Vec<Vec<usize>>],
    targets: &'t [RelationIndex],
}

const UNSET: usize = usize::MAX;

impl<'t> Csp<'t> {
    fn new(
        vars: usize,
        values: usize,
        tuples: &'t [Vec<Vec<usize>>],
        targets: &'t [RelationIndex],
    ) -> Self {
        let full = if values == 64 {
            u64::MAX
        } else {
            (1u64 << values) - 1
        };
        let mut occ = vec![Vec::new(); vars];
        for (ci, ts) in tuples.iter().enumerate() {
            for (ti, t) in ts.iter().enumerate() {
                let mut vs = t.clone();
                vs.sort_unstable();
                vs.dedup();
                for v in vs {
                    occ[v].push((ci, ti));
                }
            }
        }
        Csp {
            domains: vec![full; vars],
            assign: vec![UNSET; vars],
            occ,
            tuples,
            targets,
        }
    }

    fn solve(&mut self, visit: &mut dyn FnMut(&[usize]) -> bool) {
        // unary constraints and tuples without variables are handled by an initial sweep
        for ci in 0..self.tuples.len() {
            for ti in 0..self.tuples[ci].len() {
                if !self.revise(ci, ti) {
                    return;
                }
            }
        }
        self.search(visit);
    }

    /// Filters domains of a tuple with at most one unassigned variable.
    fn revise(&mut self, ci: usize, ti: usize) -> bool {
        let t = &self.tuples[ci][ti];
        let mut free = UNSET;
        for &x in t {
            if self.assign[x] == UNSET {
                if free == UNSET {
                    free = x;
                } else if free != x {
                    return true;
                }
            }
        }
        let mut image: Vec<usize> = t.iter().map(|&x| self.assign[x]).collect();
        if free == UNSET {
            return self.targets[ci].contains(&image);
        }
        let mut dom = self.domains[free];
        let mut keep = 0u64;
        while dom != 0 {
            let w = dom.trailing_zeros() as usize;
            dom &= dom - 1;
            for (slot, &x) in image.iter_mut().zip(t) {
                if x == free {
                    *slot = w;
                }
            }
            if self.targets[ci].contains(&image) {
                keep |= 1u64 << w;
            }
        }
        self.domains[free] = keep;
        keep != 0
    }

    fn search(&mut self, visit: &mut dyn FnMut(&[usize]) -> bool) -> bool {
        // most constrained unassigned variable, ties by index
        let mut best = UNSET;
        let mut best_size = u32::MAX;
        for (x, &d) in self.domains.iter().enumerate() {
            if self.assign[x] == UNSET && d.count_ones() < best_size {
                best = x;
                best_size = d.count_ones();
            }
        }
        if best == UNSET {
            return visit(&self.assign);
        }
        let x = best;
        let mut dom = self.domains[x];
        while dom != 0 {
            let v = dom.trailing_zeros() as usize;
            dom &= dom - 1;
            let saved = self.domains.clone();
            self.assign[x] = v;
            self.domains[x] = 1u64 << v;
            let mut ok = true;
            for i in 0..self.occ[x].len() {
                let (ci, ti) = self.occ[x][i];
                if !self.revise(ci, ti) {
                    ok = false;
                    break;
                }
            }
            let go_on = !ok || self.search(visit);
            self.assign[x] = UNSET;
            self.domains = saved;
            if !go_on {
                return false;
            }
        }
        true
    }
}

/// Reference enumeration of all maps, filtered by preservation.
pub fn brute_force_morphisms(source: &FiniteStructure, target: &FiniteStructure) -> Vec<StructMorphism> {
    Tuples::new(target.len(), source.len())
        .map(StructMorphism)
        .filter(|m| m.is_morphism(source, target))
        .collect()
}
