//! Endomorphism monoids, `k`-endoprimality and endodualisability on a given
//! test algebra.

use std::collections::HashSet;
use std::sync::Arc;

use crate::algebra::{hom_enumerate, term_clone, FiniteAlgebra, Homomorphism, OperationTable};
use crate::duality::{check_duality_on, DualityVerdict};
use crate::error::{Error, Result};
use crate::limits::{checked_pow, Limits};
use crate::structures::AlterEgo;
use crate::tuples::{decode, encode};

/// `End(M)`, sorted by table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EndoMonoid {
    pub elements: Vec<Homomorphism>,
}

impl EndoMonoid {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Contains the identity and is closed under composition.
    pub fn is_monoid(&self) -> bool {
        let set: HashSet<&Homomorphism> = self.elements.iter().collect();
        self.elements.iter().any(Homomorphism::is_identity)
            && self
                .elements
                .iter()
                .all(|a| self.elements.iter().all(|b| set.contains(&a.then(b))))
    }
}

pub fn endomorphisms(m: &FiniteAlgebra) -> Result<EndoMonoid> {
    let monoid = EndoMonoid {
        elements: hom_enumerate(m, m, None)?,
    };
    debug_assert!(monoid.is_monoid());
    Ok(monoid)
}

/// The alter ego whose only structure is `End(M)` as total unary operations.
pub fn endo_ego(m: &Arc<FiniteAlgebra>) -> Result<AlterEgo> {
    let mut ego = AlterEgo::new(format!("{}_end", m.name()), Arc::clone(m));
    for (i, e) in endomorphisms(m)?.elements.into_iter().enumerate() {
        if e.is_identity() {
            continue;
        }
        ego = ego.with_total(format!("e{i}"), OperationTable::new(1, m.size(), e.0)?)?;
    }
    Ok(ego)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EndoprimalityVerdict {
    pub k: usize,
    pub holds: bool,
    /// On failure: the lexicographically least `k`-ary table commuting with
    /// every endomorphism that is not a term operation.
    pub witness: Option<OperationTable>,
    pub clone_size: usize,
}

impl EndoprimalityVerdict {
    /// Re-checks a failure witness against `End(M)` and the term clone.
    pub fn verify(&self, m: &FiniteAlgebra, limits: &Limits) -> Result<bool> {
        let Some(w) = &self.witness else {
            return Ok(self.holds);
        };
        let ends = endomorphisms(m)?;
        let clone = term_clone(m, self.k, limits)?;
        Ok(w.arity() == self.k
            && ends.elements.iter().all(|e| w.commutes_with(e.map()))
            && !clone.contains(w))
    }
}

/// Is every `k`-ary operation commuting with `End(M)` a term operation?
pub fn is_k_endoprimal(m: &FiniteAlgebra, k: usize, limits: &Limits) -> Result<EndoprimalityVerdict> {
    let n = m.size();
    let cells = checked_pow(n, k);
    if cells > limits.max_cells as u128 {
        return Err(Error::size("table cells", cells, limits.max_cells as u128));
    }
    let clone: HashSet<OperationTable> = term_clone(m, k, limits)?.into_iter().collect();
    let ends: Vec<Homomorphism> = endomorphisms(m)?
        .elements
        .into_iter()
        .filter(|e| !e.is_identity())
        .collect();
    let cells = cells as usize;
    // image of each cell under each endomorphism, coordinatewise
    let moves: Vec<Vec<usize>> = ends
        .iter()
        .map(|e| {
            (0..cells)
                .map(|c| {
                    let t: Vec<usize> = decode(n, k, c).into_iter().map(|x| e.apply(x)).collect();
                    encode(n, &t)
                })
                .collect()
        })
        .collect();
    let mut search = CellSearch {
        n,
        ends: &ends,
        moves: &moves,
        table: vec![UNSET; cells],
        visited: 0,
        limit: limits.max_results,
    };
    let mut witness = None;
    search.run(0, &mut |t| {
        let table = OperationTable::new(k, n, t.to_vec()).expect("complete table");
        if clone.contains(&table) {
            true
        } else {
            witness = Some(table);
            false
        }
    });
    if search.visited > search.limit {
        return Err(Error::size(
            "End-preserving tables",
            search.visited as u128,
            search.limit as u128,
        ));
    }
    Ok(EndoprimalityVerdict {
        k,
        holds: witness.is_none(),
        witness,
        clone_size: clone.len(),
    })
}

/// `f'(x_1..x_k') = f(x_1..x_k)` for `k' >= k`.
pub fn pad_witness(f: &OperationTable, k: usize) -> OperationTable {
    assert!(k >= f.arity(), "padding cannot drop variables");
    let a = f.arity();
    OperationTable::from_fn(k, f.size(), |t| f.apply(&t[..a]))
}

const UNSET: usize = usize::MAX;

struct CellSearch<'a> {
    n: usize,
    ends: &'a [Homomorphism],
    moves: &'a [Vec<usize>],
    table: Vec<usize>,
    visited: usize,
    limit: usize,
}

impl CellSearch<'_> {
    /// Cells are filled in index order with values in increasing order, so
    /// complete tables appear lexicographically.
    fn run(&mut self, from: usize, visit: &mut dyn FnMut(&[usize]) -> bool) -> bool {
        let Some(c) = (from..self.table.len()).find(|&c| self.table[c] == UNSET) else {
            self.visited += 1;
            return self.visited <= self.limit && visit(&self.table);
        };
        for v in 0..self.n {
            let mut trail = Vec::new();
            let ok = self.assign(c, v, &mut trail);
            let go_on = !ok || self.run(c + 1, visit);
            for cell in trail {
                self.table[cell] = UNSET;
            }
            if !go_on {
                return false;
            }
        }
        true
    }

    /// Sets `cell = v` and propagates `f(e(x)) = e(f(x))`.
    fn assign(&mut self, cell: usize, v: usize, trail: &mut Vec<usize>) -> bool {
        let mut queue = vec![(cell, v)];
        while let Some((c, v)) = queue.pop() {
            match self.table[c] {
                UNSET => {
                    self.table[c] = v;
                    trail.push(c);
                    for (e, mv) in self.ends.iter().zip(self.moves) {
                        queue.push((mv[c], e.apply(v)));
                    }
                }
                w if w != v => return false,
                _ => {}
            }
        }
        true
    }
}

/// Does `End(M)` alone yield a duality on the test algebra `a`?
pub fn is_endodualisable_on(
    m: &Arc<FiniteAlgebra>,
    a: &FiniteAlgebra,
    limits: &Limits,
) -> Result<DualityVerdict> {
    check_duality_on(a, &Arc::new(endo_ego(m)?), limits)
}

/// `K(L) = { x : x* = 0, x+ = 1 }` in a double Stone algebra.
pub fn double_stone_core(l: &FiniteAlgebra) -> Result<Vec<usize>> {
    let get = |name: &str| {
        l.op(name)
            .ok_or_else(|| Error::invalid(format!("{} has no operation `{name}`", l.name())))
    };
    let (star, plus) = (get("star")?, get("plus")?);
    let (bot, top) = (get("bot")?.apply(&[]), get("top")?.apply(&[]));
    Ok((0..l.size())
        .filter(|&x| star.apply(&[x]) == bot && plus.apply(&[x]) == top)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::algebras;
    use crate::duality::VerdictKind;

    #[test]
    fn endomorphism_monoids() {
        let three = endomorphisms(&algebras::bounded_chain(3)).unwrap();
        let maps: Vec<Vec<usize>> = three.elements.iter().map(|e| e.0.clone()).collect();
        assert_eq!(maps, vec![vec![0, 0, 2], vec![0, 1, 2], vec![0, 2, 2]]);
        assert!(three.is_monoid());
        assert_eq!(endomorphisms(&algebras::bounded_chain(2)).unwrap().len(), 1);
        let lat = endomorphisms(&algebras::lattice_chain(2)).unwrap();
        assert_eq!(lat.elements.len(), 3);
    }

    #[test]
    fn three_chain_is_one_endoprimal() {
        let l = Limits::default();
        let v = is_k_endoprimal(&algebras::bounded_chain(3), 1, &l).unwrap();
        assert!(v.holds);
        assert_eq!(v.clone_size, 3);
    }

    #[test]
    fn two_lattice_is_not_three_endoprimal() {
        let l = Limits::default();
        let m = algebras::lattice_chain(2);
        let v = is_k_endoprimal(&m, 3, &l).unwrap();
        assert!(!v.holds);
        assert_eq!(v.clone_size, 18);
        let w = v.witness.clone().unwrap();
        assert_eq!(w.apply(&[0, 0, 0]), 0);
        assert_eq!(w.apply(&[1, 1, 1]), 1);
        assert!(v.verify(&m, &l).unwrap());
        let padded = EndoprimalityVerdict {
            k: 4,
            holds: false,
            witness: Some(pad_witness(&w, 4)),
            clone_size: 0,
        };
        assert!(padded.verify(&m, &l).unwrap());
    }

    #[test]
    fn post_algebra_case() {
        let m = Arc::new(algebras::double_stone_chain(3));
        let v = is_endodualisable_on(&m, &algebras::double_stone_chain(2), &Limits::default()).unwrap();
        assert!(matches!(v.kind, VerdictKind::NotSurjective(_)));
    }

    #[test]
    fn cores() {
        assert_eq!(double_stone_core(&algebras::double_stone_chain(4)).unwrap(), vec![1, 2]);
        assert!(double_stone_core(&algebras::double_stone_chain(2)).unwrap().is_empty());
        assert_eq!(double_stone_core(&algebras::double_stone_chain(3)).unwrap(), vec![1]);
        assert!(double_stone_core(&algebras::bounded_chain(3)).is_err());
    }
}
