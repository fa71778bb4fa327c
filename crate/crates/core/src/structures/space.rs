//! Finite structures as closed subsets of powers of an alter ego.

use std::fmt;
use std::sync::Arc;

use super::AlterEgo;
use crate::closure::{bit, canonical_key, members, ClosureSystem};
use crate::error::{Error, Result};
use crate::limits::{checked_pow, Limits};
use crate::relation::Relation;
use crate::tuples::{encode, Tuples};

/// A substructure of `ego^width`. Points are kept sorted lexicographically,
/// and every symbol of the ego is interpreted pointwise.
#[derive(Clone)]
pub struct FiniteStructure {
    ego: Arc<AlterEgo>,
    width: usize,
    points: Vec<Vec<usize>>,
}

impl FiniteStructure {
    /// Wraps a point set, which must be non-empty and closed under `G` and `H`.
    pub fn new(ego: Arc<AlterEgo>, width: usize, points: Vec<Vec<usize>>) -> Result<Self> {
        let s = FiniteStructure::unchecked(ego, width, points)?;
        if s.points.is_empty() {
            return Err(Error::invalid("structures must be non-empty"));
        }
        if let Some((name, p)) = s.closure_violation() {
            return Err(Error::invalid(format!(
                "point set is not closed under `{name}`: {p:?} is missing"
            )));
        }
        Ok(s)
    }

    pub(crate) fn unchecked(
        ego: Arc<AlterEgo>,
        width: usize,
        mut points: Vec<Vec<usize>>,
    ) -> Result<Self> {
        let n = ego.carrier();
        for p in &points {
            if p.len() != width {
                return Err(Error::ArityMismatch {
                    expected: width,
                    found: p.len(),
                });
            }
            if let Some(v) = p.iter().find(|&&v| v >= n) {
                return Err(Error::invalid(format!("value {v} exceeds carrier {n}")));
            }
        }
        points.sort();
        points.dedup();
        Ok(FiniteStructure { ego, width, points })
    }

    /// The alter ego itself as a structure: `ego^1` with every point.
    pub fn ego_itself(ego: Arc<AlterEgo>) -> Self {
        let n = ego.carrier();
        FiniteStructure {
            ego,
            width: 1,
            points: (0..n).map(|x| vec![x]).collect(),
        }
    }

    pub fn ego(&self) -> &AlterEgo {
        &self.ego
    }

    pub fn ego_arc(&self) -> Arc<AlterEgo> {
        Arc::clone(&self.ego)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec<usize>] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &[usize] {
        &self.points[i]
    }

    pub fn index_of(&self, p: &[usize]) -> Option<usize> {
        self.points.binary_search_by(|q| q.as_slice().cmp(p)).ok()
    }

    /// First symbol of `G ∪ H` whose pointwise application leaves the set.
    pub fn closure_violation(&self) -> Option<(String, Vec<usize>)> {
        let k = self.points.len();
        for (name, g) in self.ego.total() {
            for pick in Tuples::new(k, g.arity()) {
                let v = self.apply_total(g, &pick);
                if self.index_of(&v).is_none() {
                    return Some((name.clone(), v));
                }
            }
        }
        for (name, h) in self.ego.partial() {
            for pick in Tuples::new(k, h.arity()) {
                if let Some(v) = self.apply_partial(h, &pick) {
                    if self.index_of(&v).is_none() {
                        return Some((name.clone(), v));
                    }
                }
            }
        }
        None
    }

    fn apply_total(&self, g: &crate::OperationTable, pick: &[usize]) -> Vec<usize> {
        let mut column = vec![0; pick.len()];
        (0..self.width)
            .map(|c| {
                for (slot, &i) in column.iter_mut().zip(pick) {
                    *slot = self.points[i][c];
                }
                g.apply(&column)
            })
            .collect()
    }

    fn apply_partial(&self, h: &super::PartialOperationTable, pick: &[usize]) -> Option<Vec<usize>> {
        let mut column = vec![0; pick.len()];
        (0..self.width)
            .map(|c| {
                for (slot, &i) in column.iter_mut().zip(pick) {
                    *slot = self.points[i][c];
                }
                h.apply(&column)
            })
            .collect()
    }

    /// Tuples of point indices in the pointwise interpretation of `r`.
    pub fn induced(&self, r: &Relation) -> Vec<Vec<usize>> {
        let n = self.ego.carrier();
        let arity = r.arity();
        let mut out = Vec::new();
        if arity == 0 || self.points.is_empty() {
            return out;
        }
        // prefix membership tables, one per prefix length
        let prefixes: Vec<PrefixTable> = (1..=arity)
            .map(|len| PrefixTable::new(n, len, r))
            .collect();
        let mut pick = Vec::with_capacity(arity);
        let mut codes = vec![vec![0usize; self.width]; arity + 1];
        self.induced_rec(n, &prefixes, &mut pick, &mut codes, &mut out);
        out
    }

    fn induced_rec(
        &self,
        n: usize,
        prefixes: &[PrefixTable],
        pick: &mut Vec<usize>,
        codes: &mut Vec<Vec<usize>>,
        out: &mut Vec<Vec<usize>>,
    ) {
        let depth = pick.len();
        if depth == prefixes.len() {
            out.push(pick.clone());
            return;
        }
        for (i, p) in self.points.iter().enumerate() {
            let table = &prefixes[depth];
            let mut ok = true;
            for c in 0..self.width {
                let code = codes[depth][c] * n + p[c];
                if !table.contains(code) {
                    ok = false;
                    break;
                }
                codes[depth + 1][c] = code;
            }
            if ok {
                pick.push(i);
                self.induced_rec(n, prefixes, pick, codes, out);
                pick.pop();
            }
        }
    }

    /// Interpretations of every ego symbol, in constraint order.
    pub fn interpretations(&self) -> Vec<Vec<Vec<usize>>> {
        self.ego
            .constraints()
            .iter()
            .map(|c| self.induced(&c.relation))
            .collect()
    }

    /// The `i`-th coordinate projection as a map into the ego carrier.
    pub fn projection(&self, i: usize) -> Vec<usize> {
        self.points.iter().map(|p| p[i]).collect()
    }
}

impl PartialEq for FiniteStructure {
    fn eq(&self, other: &Self) -> bool {
        self.width == other.width && self.points == other.points && self.ego == other.ego
    }
}

impl fmt::Debug for FiniteStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "FiniteStructure({}^{}, {:?})",
            self.ego.name(),
            self.width,
            self.points
        )
    }
}

/// Membership of prefixes of a relation, encoded mixed-radix.
struct PrefixTable {
    dense: Vec<bool>,
}

impl PrefixTable {
    fn new(n: usize, len: usize, r: &Relation) -> Self {
        let cells = checked_pow(n, len) as usize;
        let mut dense = vec![false; cells];
        for t in r.iter() {
            dense[encode(n, &t[..len])] = true;
        }
        PrefixTable { dense }
    }

    #[inline]
    fn contains(&self, code: usize) -> bool {
        self.dense[code]
    }
}

/// Least substructure of `ego^width` containing `seeds`.
pub fn substructure_generate(
    ego: Arc<AlterEgo>,
    width: usize,
    seeds: &[Vec<usize>],
) -> Result<FiniteStructure> {
    let mut s = FiniteStructure::unchecked(ego, width, seeds.to_vec())?;
    while let Some((_, p)) = s.closure_violation() {
        s.points.push(p);
        s.points.sort();
    }
    if s.points.is_empty() {
        return Err(Error::invalid("generated structure is empty"));
    }
    Ok(s)
}

/// The full power `ego^k` (at most 64 points) with its closure system.
#[derive(Debug, Clone)]
pub struct PowerSpace {
    ego: Arc<AlterEgo>,
    k: usize,
    points: Vec<Vec<usize>>,
    closure: ClosureSystem,
}

impl PowerSpace {
    pub fn new(ego: Arc<AlterEgo>, k: usize, limits: &Limits) -> Result<Self> {
        let n = ego.carrier();
        let needed = checked_pow(n, k);
        let bound = limits.max_ambient.min(64) as u128;
        if needed > bound {
            return Err(Error::size(format!("{}^{k}", ego.name()), needed, bound));
        }
        let points: Vec<Vec<usize>> = Tuples::new(n, k).collect();
        let full = FiniteStructure {
            ego: Arc::clone(&ego),
            width: k,
            points: points.clone(),
        };
        let mut closure = ClosureSystem::new(points.len())?;
        for (_, g) in ego.total() {
            for pick in Tuples::new(points.len(), g.arity()) {
                let v = full.apply_total(g, &pick);
                closure.add_rule(&pick, encode(n, &v));
            }
        }
        for (_, h) in ego.partial() {
            for pick in Tuples::new(points.len(), h.arity()) {
                if let Some(v) = full.apply_partial(h, &pick) {
                    closure.add_rule(&pick, encode(n, &v));
                }
            }
        }
        Ok(PowerSpace {
            ego,
            k,
            points,
            closure,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn full_mask(&self) -> u64 {
        if self.points.len() == 64 {
            u64::MAX
        } else {
            bit(self.points.len()) - 1
        }
    }

    pub fn closure(&self) -> &ClosureSystem {
        &self.closure
    }

    pub fn structure(&self, mask: u64) -> FiniteStructure {
        FiniteStructure {
            ego: Arc::clone(&self.ego),
            width: self.k,
            points: members(mask).into_iter().map(|i| self.points[i].clone()).collect(),
        }
    }

    /// Mask of a substructure of this power.
    pub fn mask_of(&self, s: &FiniteStructure) -> u64 {
        let n = self.ego.carrier();
        s.points().iter().fold(0, |m, p| m | bit(encode(n, p)))
    }

    /// Non-empty closed subsets of `within`, canonically ordered
    /// (size, then sorted members), failing beyond `limit`.
    pub fn closed_subsets(&self, within: u64, limit: usize) -> Result<Vec<u64>> {
        let (mut sets, truncated) = self.closure.enumerate_within(within, limit.saturating_add(1));
        if truncated || sets.len() > limit {
            return Err(Error::size(
                format!("closed substructures of {}^{}", self.ego.name(), self.k),
                sets.len() as u128,
                limit as u128,
            ));
        }
        sets.retain(|&m| m != 0);
        sets.sort_by_cached_key(|&m| canonical_key(m));
        Ok(sets)
    }
}

/// Closed substructures of a power, with a truncation flag.
#[derive(Debug, Clone)]
pub struct Substructures {
    pub structures: Vec<FiniteStructure>,
    pub truncated: bool,
}

/// All non-empty closed substructures of `ego^k` in canonical order, cut
/// after `max_count`.
pub fn enumerate_substructures(
    ego: Arc<AlterEgo>,
    k: usize,
    max_count: usize,
    limits: &Limits,
) -> Result<Substructures> {
    let space = PowerSpace::new(ego, k, limits)?;
    let masks = space.closed_subsets(space.full_mask(), limits.max_results)?;
    let truncated = masks.len() > max_count;
    Ok(Substructures {
        structures: masks
            .into_iter()
            .take(max_count)
            .map(|m| space.structure(m))
            .collect(),
        truncated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{algebras, egos};

    #[test]
    fn closure_of_d_in_three() {
        let ego = Arc::new(egos::three());
        let s = substructure_generate(ego, 1, &[vec![1]]).unwrap();
        assert_eq!(s.points(), &[vec![0], vec![1], vec![2]]);
    }

    #[test]
    fn substructure_with_no_operations_is_the_seed() {
        let ego = Arc::new(AlterEgo::new("bare", algebras::bounded_chain(3)));
        let s = substructure_generate(ego, 2, &[vec![1, 0], vec![2, 2]]).unwrap();
        assert_eq!(s.len(), 2);
    }

    #[test]
    fn zero_constant_is_generated() {
        let ego = Arc::new(egos::cyclic(2));
        let s = substructure_generate(ego, 1, &[]).unwrap();
        assert_eq!(s.points(), &[vec![0]]);
    }

    #[test]
    fn substructure_counts() {
        let l = Limits::default();
        let bare = Arc::new(AlterEgo::new("bare", algebras::bounded_chain(2)));
        assert_eq!(enumerate_substructures(bare, 1, 100, &l).unwrap().structures.len(), 3);
        let three = Arc::new(egos::three());
        let subs = enumerate_substructures(three.clone(), 1, 100, &l).unwrap();
        let sets: Vec<Vec<Vec<usize>>> = subs.structures.iter().map(|s| s.points().to_vec()).collect();
        assert_eq!(
            sets,
            vec![
                vec![vec![0]],
                vec![vec![2]],
                vec![vec![0], vec![2]],
                vec![vec![0], vec![1], vec![2]],
            ]
        );
        assert_eq!(enumerate_substructures(three, 2, 1000, &l).unwrap().structures.len(), 71);
        let sigma = Arc::new(egos::three_sigma());
        assert_eq!(enumerate_substructures(sigma.clone(), 2, 1000, &l).unwrap().structures.len(), 15);
        assert_eq!(enumerate_substructures(sigma, 3, 1000, &l).unwrap().structures.len(), 255);
        let h = Arc::new(egos::three_h());
        assert_eq!(enumerate_substructures(h, 2, 1000, &l).unwrap().structures.len(), 62);
    }

    #[test]
    fn too_large_power_is_rejected() {
        let three = Arc::new(egos::three());
        assert!(matches!(
            enumerate_substructures(three, 4, 10, &Limits::default()),
            Err(Error::SizeBoundExceeded { .. })
        ));
    }

    #[test]
    fn truncation() {
        let three = Arc::new(egos::three());
        let subs = enumerate_substructures(three, 2, 5, &Limits::default()).unwrap();
        assert!(subs.truncated);
        assert_eq!(subs.structures.len(), 5);
    }

    #[test]
    fn induced_order_on_square() {
        let l = algebras::bounded_chain(2);
        let ego = Arc::new(
            AlterEgo::new("le", l)
                .with_relation("le", Relation::new(2, vec![vec![0, 0], vec![0, 1], vec![1, 1]]).unwrap())
                .unwrap(),
        );
        let sq = FiniteStructure::new(ego.clone(), 2, Tuples::new(2, 2).collect()).unwrap();
        let le = &ego.constraints()[0].relation;
        // product order on 2^2 has 9 comparable pairs
        assert_eq!(sq.induced(le).len(), 9);
    }
}
