//! Constructors for the built-in alter egos.

use super::algebras;
use crate::algebra::{subuniverses_of_power, FiniteAlgebra, OperationTable};
use crate::error::Result;
use crate::limits::Limits;
use crate::relation::Relation;
use crate::structures::{AlterEgo, PartialOperationTable};

fn rel(arity: usize, tuples: &[&[usize]]) -> Relation {
    Relation::new(arity, tuples.iter().map(|t| t.to_vec())).expect("built-in relation")
}

fn unary(n: usize, values: &[usize]) -> OperationTable {
    OperationTable::new(1, n, values.to_vec()).expect("built-in table")
}

fn partial(n: usize, entries: &[(&[usize], usize)]) -> PartialOperationTable {
    let arity = entries[0].0.len();
    PartialOperationTable::new(arity, n, entries.iter().map(|(a, v)| (a.to_vec(), *v)))
        .expect("built-in partial table")
}

/// `(3; f, g)` on the chain `0 < d < 1` with `f(d) = 0`, `g(d) = 1`.
pub fn three() -> AlterEgo {
    AlterEgo::new("threeT", algebras::bounded_chain(3))
        .with_total("f", unary(3, &[0, 0, 2]))
        .and_then(|e| e.with_total("g", unary(3, &[0, 2, 2])))
        .expect("built-in ego")
}

/// `(3; f, g, σ)` with `σ(0,0) = 0`, `σ(0,1) = d`, `σ(1,1) = 1`.
pub fn three_sigma() -> AlterEgo {
    three()
        .renamed("threeT_sigma")
        .with_partial("sigma", partial(3, &[(&[0, 0], 0), (&[0, 2], 1), (&[2, 2], 2)]))
        .expect("built-in ego")
}

/// `(3; f, g, h)` with `h` on the 4-chain `{(0,0),(0,d),(d,1),(1,1)}`:
/// `h(0,0) = 0`, `h(0,d) = d`, `h(d,1) = d`, `h(1,1) = 1`.
pub fn three_h() -> AlterEgo {
    three()
        .renamed("threeT_h")
        .with_partial(
            "h",
            partial(3, &[(&[0, 0], 0), (&[0, 1], 1), (&[1, 2], 1), (&[2, 2], 2)]),
        )
        .expect("built-in ego")
}

fn order_two() -> Relation {
    rel(2, &[&[0, 0], &[0, 1], &[1, 1]])
}

/// The order `{≤}` over the bounded 2-chain.
pub fn priestley() -> AlterEgo {
    AlterEgo::new("twoT", algebras::bounded_chain(2))
        .with_relation("le", order_two())
        .expect("built-in ego")
}

/// `{≤}` with the constants `0`, `1` over the unbounded 2-element lattice.
pub fn priestley_unbounded() -> AlterEgo {
    AlterEgo::new("lat2T", algebras::lattice_chain(2))
        .with_total("bot", OperationTable::constant(2, 0))
        .and_then(|e| e.with_total("top", OperationTable::constant(2, 1)))
        .and_then(|e| e.with_relation("le", order_two()))
        .expect("built-in ego")
}

/// `(3; d, ≼)` over the Stone algebra `0 < a < 1`.
pub fn stone() -> AlterEgo {
    AlterEgo::new("stone3T", algebras::stone_three())
        .with_total("d", unary(3, &[0, 2, 2]))
        .and_then(|e| e.with_relation("prec", rel(2, &[&[0, 0], &[1, 1], &[2, 2], &[2, 1]])))
        .expect("built-in ego")
}

/// `(Z_m; +, -, 0)`.
pub fn cyclic(m: usize) -> AlterEgo {
    let z = algebras::cyclic_group(m);
    let add = z.op("add").expect("add").clone();
    let neg = z.op("neg").expect("neg").clone();
    AlterEgo::new(format!("z{m}T"), z)
        .with_total("add", add)
        .and_then(|e| e.with_total("neg", neg))
        .and_then(|e| e.with_total("zero", OperationTable::constant(m, 0)))
        .expect("built-in ego")
}

/// Alter ego of the 2-element join semilattice with the given bounds. A
/// constant `c` of the ego must form a one-element subuniverse, so `0` is
/// added unless the algebra has `1` as a constant, and vice versa.
pub fn semilattice(with_zero: bool, with_one: bool) -> AlterEgo {
    let alg = algebras::semilattice_two(with_zero, with_one);
    let name = format!("{}T", alg.name());
    let mut ego = AlterEgo::new(name, alg)
        .with_total("join", OperationTable::from_fn(2, 2, |t| t[0].max(t[1])))
        .expect("built-in ego");
    if !with_one {
        ego = ego
            .with_total("bot", OperationTable::constant(2, 0))
            .expect("built-in ego");
    }
    if !with_zero {
        ego = ego
            .with_total("top", OperationTable::constant(2, 1))
            .expect("built-in ego");
    }
    ego
}

/// `(R; graph(u))` with `u` the partial endomorphism `0 ↦ 0, a ↦ b, 1 ↦ 1`.
pub fn discriminator_bot() -> AlterEgo {
    AlterEgo::new("rdiscT", algebras::discriminator_chain())
        .with_relation("graph_u", rel(2, &[&[0, 0], &[1, 2], &[3, 3]]))
        .expect("built-in ego")
}

/// Every algebraic partial operation of arity `<= max_arity` over `m`: the
/// subuniverses of `m^(n+1)` that are graphs of partial functions.
pub fn all_partial_operations(m: FiniteAlgebra, max_arity: usize, limits: &Limits) -> Result<AlterEgo> {
    let name = format!("{}_partialT", m.name());
    let size = m.size();
    let mut found = Vec::new();
    for n in 0..=max_arity {
        for r in subuniverses_of_power(&m, n + 1, limits)? {
            let functional = r
                .iter()
                .zip(r.iter().skip(1))
                .all(|(a, b)| a[..n] != b[..n]);
            if functional {
                let entries = r.iter().map(|t| (t[..n].to_vec(), t[n]));
                found.push(PartialOperationTable::new(n, size, entries)?);
            }
        }
    }
    let mut ego = AlterEgo::new(name, m);
    for (i, h) in found.into_iter().enumerate() {
        ego = ego.with_partial(format!("p{i}"), h)?;
    }
    Ok(ego)
}
