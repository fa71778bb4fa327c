//! Subuniverse generation in finite powers, free algebras and term clones.

use std::collections::HashMap;

use super::{FiniteAlgebra, Operation, OperationTable};
use crate::closure::{canonical_key, members, ClosureSystem};
use crate::error::{Error, Result};
use crate::limits::{checked_pow, Limits};
use crate::relation::Relation;
use crate::tuples::{encode, Tuples};

/// `M^k` with mixed-radix indexing: `(x_1..x_k)` has index `encode(|M|, x)`.
pub fn power(m: &FiniteAlgebra, k: usize, limits: &Limits) -> Result<FiniteAlgebra> {
    if k == 0 {
        return Err(Error::invalid("power exponent must be at least 1"));
    }
    let needed = checked_pow(m.size(), k);
    if needed > limits.max_carrier as u128 {
        return Err(Error::size(
            format!("{}^{k}", m.name()),
            needed,
            limits.max_carrier as u128,
        ));
    }
    let n = m.size();
    let size = needed as usize;
    let points: Vec<Vec<usize>> = Tuples::new(n, k).collect();
    let ops = m
        .ops()
        .iter()
        .map(|op| {
            let arity = op.table.arity();
            let table = OperationTable::from_fn(arity, size, |args| {
                let coords: Vec<usize> = (0..k)
                    .map(|i| {
                        let column: Vec<usize> = args.iter().map(|&a| points[a][i]).collect();
                        op.table.apply(&column)
                    })
                    .collect();
                encode(n, &coords)
            });
            Operation {
                name: op.name.clone(),
                table,
            }
        })
        .collect();
    let alg = FiniteAlgebra::new(format!("{}^{k}", m.name()), size, ops)?;
    let labels = points
        .iter()
        .map(|p| p.iter().map(|&x| m.label(x)).collect::<Vec<_>>().join(""))
        .collect();
    Ok(alg.clone().with_labels(labels).unwrap_or(alg))
}

/// Least subuniverse of `a` containing `s`, sorted.
pub fn subuniverse_generate(a: &FiniteAlgebra, s: &[usize]) -> Vec<usize> {
    let gens: Vec<Vec<usize>> = s.iter().map(|&x| vec![x]).collect();
    generate_subpower(a, 1, &gens, usize::MAX)
        .expect("unbounded generation cannot exceed its limit")
        .into_iter()
        .map(|v| v[0])
        .collect()
}

/// Subuniverse of `a^width` generated by `gens` (vectors of length `width`),
/// sorted lexicographically. Fails once more than `limit` elements appear.
///
/// Semi-naive: each round only applies operations to argument tuples with at
/// least one element found in the previous round.
pub fn generate_subpower(
    a: &FiniteAlgebra,
    width: usize,
    gens: &[Vec<usize>],
    limit: usize,
) -> Result<Vec<Vec<usize>>> {
    let mut elems: Vec<Vec<usize>> = Vec::new();
    let mut index: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut push = |v: Vec<usize>, elems: &mut Vec<Vec<usize>>| -> Result<()> {
        if !index.contains_key(&v) {
            if elems.len() >= limit {
                return Err(Error::size(
                    format!("subpower of {}^{width}", a.name()),
                    elems.len() as u128 + 1,
                    limit as u128,
                ));
            }
            index.insert(v.clone(), elems.len());
            elems.push(v);
        }
        Ok(())
    };
    for g in gens {
        if g.len() != width {
            return Err(Error::ArityMismatch {
                expected: width,
                found: g.len(),
            });
        }
        push(g.clone(), &mut elems)?;
    }
    for c in a.constants() {
        push(vec![c; width], &mut elems)?;
    }
    let mut old = 0;
    while old < elems.len() {
        let len = elems.len();
        for op in a.ops() {
            let arity = op.table.arity();
            if arity == 0 {
                continue;
            }
            // first argument drawn from the new range sits at position p
            for p in 0..arity {
                let ranges: Vec<(usize, usize)> = (0..arity)
                    .map(|i| match i.cmp(&p) {
                        std::cmp::Ordering::Less => (0, old),
                        std::cmp::Ordering::Equal => (old, len),
                        std::cmp::Ordering::Greater => (0, len),
                    })
                    .collect();
                if ranges.iter().any(|&(lo, hi)| lo >= hi) {
                    continue;
                }
                let mut pick: Vec<usize> = ranges.iter().map(|r| r.0).collect();
                let mut column = vec![0; arity];
                loop {
                    let v: Vec<usize> = (0..width)
                        .map(|c| {
                            for (slot, &e) in column.iter_mut().zip(&pick) {
                                *slot = elems[e][c];
                            }
                            op.table.apply(&column)
                        })
                        .collect();
                    push(v, &mut elems)?;
                    if !advance_in(&mut pick, &ranges) {
                        break;
                    }
                }
            }
        }
        old = len;
    }
    elems.sort();
    Ok(elems)
}

/// Odometer step over a product of half-open ranges; false on wrap-around.
fn advance_in(pick: &mut [usize], ranges: &[(usize, usize)]) -> bool {
    for i in (0..pick.len()).rev() {
        pick[i] += 1;
        if pick[i] < ranges[i].1 {
            return true;
        }
        pick[i] = ranges[i].0;
    }
    false
}

/// Algebra on a sorted list of subpower elements; element `i` is `elems[i]`.
pub fn subpower_algebra(
    a: &FiniteAlgebra,
    elems: &[Vec<usize>],
    name: impl Into<String>,
) -> Result<FiniteAlgebra> {
    let index: HashMap<&[usize], usize> = elems
        .iter()
        .enumerate()
        .map(|(i, v)| (v.as_slice(), i))
        .collect();
    let n = elems.len();
    let width = elems.first().map_or(0, Vec::len);
    let mut ops = Vec::with_capacity(a.ops().len());
    for op in a.ops() {
        let arity = op.table.arity();
        let mut table = Vec::with_capacity(checked_pow(n, arity) as usize);
        let mut column = vec![0; arity];
        for t in Tuples::new(n, arity) {
            let v: Vec<usize> = (0..width)
                .map(|c| {
                    for (slot, &e) in column.iter_mut().zip(&t) {
                        *slot = elems[e][c];
                    }
                    op.table.apply(&column)
                })
                .collect();
            match index.get(v.as_slice()) {
                Some(&i) => table.push(i),
                None => {
                    return Err(Error::invalid(format!(
                        "subpower is not closed under `{}`",
                        op.name
                    )))
                }
            }
        }
        ops.push(Operation {
            name: op.name.clone(),
            table: OperationTable::new(arity, n, table)?,
        });
    }
    FiniteAlgebra::new(name, n, ops)
}

/// All `k`-ary term operations of `a`: the subpower of `a^(|A|^k)` generated
/// by the coordinate projections.
pub fn term_clone(a: &FiniteAlgebra, k: usize, limits: &Limits) -> Result<Vec<OperationTable>> {
    let n = a.size();
    let width = checked_pow(n, k);
    if width > limits.max_width as u128 {
        return Err(Error::size(
            format!("{k}-ary tables on {}", a.name()),
            width,
            limits.max_width as u128,
        ));
    }
    let projections: Vec<Vec<usize>> = (0..k)
        .map(|i| OperationTable::projection(k, n, i).values().to_vec())
        .collect();
    let elems = generate_subpower(a, width as usize, &projections, limits.max_results)?;
    elems
        .into_iter()
        .map(|t| OperationTable::new(k, n, t))
        .collect()
}

/// Non-empty subuniverses of `m^n` (the algebraic `n`-ary relations), in
/// canonical order: by size, then by sorted tuple list.
pub fn subuniverses_of_power(m: &FiniteAlgebra, n: usize, limits: &Limits) -> Result<Vec<Relation>> {
    let size = m.size();
    let points = checked_pow(size, n);
    if points > limits.max_ambient.min(64) as u128 {
        return Err(Error::size(
            format!("{}^{n} as a closure space", m.name()),
            points,
            limits.max_ambient.min(64) as u128,
        ));
    }
    let points: Vec<Vec<usize>> = Tuples::new(size, n).collect();
    let mut cs = ClosureSystem::new(points.len())?;
    for op in m.ops() {
        let arity = op.table.arity();
        let mut column = vec![0; arity];
        for pick in Tuples::new(points.len(), arity) {
            let v: Vec<usize> = (0..n)
                .map(|c| {
                    for (slot, &i) in column.iter_mut().zip(&pick) {
                        *slot = points[i][c];
                    }
                    op.table.apply(&column)
                })
                .collect();
            cs.add_rule(&pick, encode(size, &v));
        }
    }
    let full = if points.len() == 64 {
        u64::MAX
    } else {
        (1u64 << points.len()) - 1
    };
    let (mut sets, truncated) = cs.enumerate_within(full, limits.max_results.saturating_add(1));
    if truncated {
        return Err(Error::size(
            format!("subuniverses of {}^{n}", m.name()),
            sets.len() as u128,
            limits.max_results as u128,
        ));
    }
    sets.retain(|&s| s != 0);
    sets.sort_by_cached_key(|&s| canonical_key(s));
    sets.into_iter()
        .map(|s| Relation::new(n, members(s).into_iter().map(|i| points[i].clone())))
        .collect()
}

/// True when every homomorphism from a finite product into `m` factors
/// through a single projection or is constant: `m` has a majority term
/// (so congruences of products are product congruences) and every
/// subalgebra with at least two elements is simple.
pub fn has_product_factoring(m: &FiniteAlgebra, limits: &Limits) -> Result<bool> {
    if m.majority_term().is_none() {
        return Ok(false);
    }
    for s in subuniverses_of_power(m, 1, limits)? {
        if s.len() < 2 {
            continue;
        }
        let elems: Vec<usize> = s.iter().map(|t| t[0]).collect();
        if !m.subalgebra(&elems, "sub")?.is_simple() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A free algebra together with the indices of its free generators.
#[derive(Debug, Clone)]
pub struct FreeAlgebra {
    pub algebra: FiniteAlgebra,
    pub generators: Vec<usize>,
    /// Element `i` as a `k`-ary term table on `M`.
    pub tables: Vec<OperationTable>,
}

/// `F(k)` in the quasivariety generated by `m`, realised as the subalgebra of
/// `m^(m^k)` generated by the projections.
pub fn free_algebra(m: &FiniteAlgebra, k: usize, limits: &Limits) -> Result<FreeAlgebra> {
    let tables = term_clone(m, k, limits)?;
    if tables.is_empty() {
        return Err(Error::invalid(format!(
            "{} has no constants, so F(0) is empty",
            m.name()
        )));
    }
    if tables.len() > limits.max_carrier {
        return Err(Error::size(
            format!("F({k}) over {}", m.name()),
            tables.len() as u128,
            limits.max_carrier as u128,
        ));
    }
    let elems: Vec<Vec<usize>> = tables.iter().map(|t| t.values().to_vec()).collect();
    let algebra = subpower_algebra(m, &elems, format!("F_{}({k})", m.name()))?;
    let generators = (0..k)
        .map(|i| {
            let p = OperationTable::projection(k, m.size(), i);
            tables
                .binary_search(&p)
                .expect("projections generate the free algebra")
        })
        .collect();
    Ok(FreeAlgebra {
        algebra,
        generators,
        tables,
    })
}
