//! Clone entailment: is `s` invariant under every polymorphism of `R`?
//!
//! Only the `|s|`-ary polymorphisms matter. They are the morphisms from the
//! full power `(M; R)^|s|` into `(M; R)`, and `s` is entailed iff each one
//! sends the columns `rho_1..rho_n` of `s` back into `s`.

use std::sync::Arc;

use crate::algebra::{FiniteAlgebra, OperationTable};
use crate::error::{Error, Result};
use crate::limits::{checked_pow, Limits};
use crate::relation::Relation;
use crate::structures::{AlterEgo, FiniteStructure, MorphismSearch};
use crate::tuples::{encode, Tuples};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CloneVerdict {
    pub holds: bool,
    /// On failure: an `|s|`-ary polymorphism of `R` moving the columns of `s`
    /// outside `s`.
    pub violator: Option<OperationTable>,
    pub escaping: Option<Vec<usize>>,
}

fn relational_ego(carrier: usize, rels: &[Relation]) -> Result<Arc<AlterEgo>> {
    let bare = FiniteAlgebra::new("set", carrier, Vec::new())?;
    let mut ego = AlterEgo::new("R", bare);
    for (i, r) in rels.iter().enumerate() {
        ego = ego.with_relation(format!("r{i}"), r.clone())?;
    }
    Ok(Arc::new(ego))
}

pub fn clone_entails(
    carrier: usize,
    rels: &[Relation],
    s: &Relation,
    limits: &Limits,
) -> Result<CloneVerdict> {
    if s.is_empty() {
        return Err(Error::invalid("clone entailment of an empty relation"));
    }
    if s.max_value_bound() > carrier {
        return Err(Error::invalid("relation exceeds the carrier"));
    }
    let width = s.len();
    let cells = checked_pow(carrier, width);
    if cells > limits.max_cells as u128 {
        return Err(Error::size("polymorphism cells", cells, limits.max_cells as u128));
    }
    let ego = relational_ego(carrier, rels)?;
    let points: Vec<Vec<usize>> = Tuples::new(carrier, width).collect();
    let power = FiniteStructure::new(Arc::clone(&ego), width, points)?;
    let one = FiniteStructure::ego_itself(ego);
    let tuples: Vec<&Vec<usize>> = s.iter().collect();
    let rho: Vec<usize> = (0..s.arity())
        .map(|i| encode(carrier, &tuples.iter().map(|t| t[i]).collect::<Vec<_>>()))
        .collect();
    let interp = power.interpretations();
    for c in Tuples::new(carrier, s.arity()) {
        if s.contains(&c) {
            continue;
        }
        let mut partial = vec![None; power.len()];
        let mut consistent = true;
        for (&p, &v) in rho.iter().zip(&c) {
            match partial[p] {
                Some(w) if w != v => consistent = false,
                _ => partial[p] = Some(v),
            }
        }
        if !consistent {
            continue;
        }
        let found = MorphismSearch::new(&power, &one)?
            .with_partial(&partial)?
            .with_source_interpretations(&interp)
            .first();
        if let Some(u) = found {
            return Ok(CloneVerdict {
                holds: false,
                violator: Some(OperationTable::new(width, carrier, u.0)?),
                escaping: Some(c),
            });
        }
    }
    Ok(CloneVerdict {
        holds: true,
        violator: None,
        escaping: None,
    })
}

/// Reference enumeration: every `k`-ary table on the carrier preserving all
/// of `rels`. Exponential; for oracles on tiny carriers.
pub fn brute_force_polymorphisms(carrier: usize, k: usize, rels: &[Relation]) -> Vec<OperationTable> {
    let cells = checked_pow(carrier, k) as usize;
    Tuples::new(carrier, cells)
        .map(|t| OperationTable::new(k, carrier, t).expect("table size"))
        .filter(|f| rels.iter().all(|r| preserves(f, r)))
        .collect()
}

fn preserves(f: &OperationTable, r: &Relation) -> bool {
    let rows: Vec<&Vec<usize>> = r.iter().collect();
    let mut column = vec![0; f.arity()];
    Tuples::new(rows.len(), f.arity()).all(|pick| {
        let image: Vec<usize> = (0..r.arity())
            .map(|i| {
                for (slot, &row) in column.iter_mut().zip(&pick) {
                    *slot = rows[row][i];
                }
                f.apply(&column)
            })
            .collect();
        r.contains(&image)
    })
}
