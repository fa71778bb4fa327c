//! Constructors for the built-in algebras.
//!
//! Element order always follows the lattice order where there is one, so the
//! bottom is `0` and the top is `n-1`.

use crate::algebra::{FiniteAlgebra, Operation, OperationTable};

fn chain_labels(n: usize) -> Vec<String> {
    let inner: &[&str] = match n {
        3 => &["d"],
        _ => &["a", "b", "c", "e", "f", "g"],
    };
    let mut labels = vec!["0".to_string()];
    labels.extend(inner.iter().take(n.saturating_sub(2)).map(|s| s.to_string()));
    if n > 1 {
        labels.push("1".to_string());
    }
    labels
}

fn op(name: &str, table: OperationTable) -> Operation {
    Operation {
        name: name.to_string(),
        table,
    }
}

fn lattice_ops(n: usize) -> Vec<Operation> {
    vec![
        op("join", OperationTable::from_fn(2, n, |t| t[0].max(t[1]))),
        op("meet", OperationTable::from_fn(2, n, |t| t[0].min(t[1]))),
    ]
}

fn bounds(n: usize) -> Vec<Operation> {
    vec![
        op("bot", OperationTable::constant(n, 0)),
        op("top", OperationTable::constant(n, n - 1)),
    ]
}

fn build(name: String, n: usize, ops: Vec<Operation>, labels: Vec<String>) -> FiniteAlgebra {
    FiniteAlgebra::new(name, n, ops)
        .and_then(|a| a.with_labels(labels))
        .expect("built-in tables are well formed")
}

/// `n`-element chain as a lattice `(join, meet)`.
pub fn lattice_chain(n: usize) -> FiniteAlgebra {
    build(format!("lat{n}"), n, lattice_ops(n), chain_labels(n))
}

/// `n`-element chain as a bounded distributive lattice `(join, meet, bot, top)`.
/// The 3-chain is labelled `0 < d < 1`.
pub fn bounded_chain(n: usize) -> FiniteAlgebra {
    let mut ops = lattice_ops(n);
    ops.extend(bounds(n));
    build(format!("chain{n}"), n, ops, chain_labels(n))
}

/// `n`-chain as a double Stone algebra: `x* = 0` for `x > 0`, `0* = 1`,
/// `x+ = 1` for `x < 1`, `1+ = 0`.
pub fn double_stone_chain(n: usize) -> FiniteAlgebra {
    let mut ops = lattice_ops(n);
    ops.extend(bounds(n));
    let top = n - 1;
    ops.push(op(
        "star",
        OperationTable::from_fn(1, n, |t| if t[0] == 0 { top } else { 0 }),
    ));
    ops.push(op(
        "plus",
        OperationTable::from_fn(1, n, |t| if t[0] == top { 0 } else { top }),
    ));
    let mut labels = vec!["0".to_string()];
    labels.extend(["a", "b", "c"].iter().take(n - 2).map(|s| s.to_string()));
    labels.push("1".to_string());
    build(format!("ds{n}"), n, ops, labels)
}

/// The 3-element Stone algebra `0 < a < 1` with `0* = 1`, `a* = 1* = 0`.
pub fn stone_three() -> FiniteAlgebra {
    let mut ops = lattice_ops(3);
    ops.extend(bounds(3));
    ops.push(op(
        "star",
        OperationTable::from_fn(1, 3, |t| if t[0] == 0 { 2 } else { 0 }),
    ));
    build(
        "stone3".into(),
        3,
        ops,
        vec!["0".into(), "a".into(), "1".into()],
    )
}

/// `Z_m` as `(add, neg, zero)`.
pub fn cyclic_group(m: usize) -> FiniteAlgebra {
    let ops = vec![
        op("add", OperationTable::from_fn(2, m, |t| (t[0] + t[1]) % m)),
        op("neg", OperationTable::from_fn(1, m, |t| (m - t[0]) % m)),
        op("zero", OperationTable::constant(m, 0)),
    ];
    build(
        format!("z{m}"),
        m,
        ops,
        (0..m).map(|i| i.to_string()).collect(),
    )
}

/// `{0,1}` with the ternary majority operation `m`.
///
/// `m(x,x,y) = m(x,y,x) = m(y,x,x) = x` fixes six of the eight rows, and the
/// remaining rows `(0,0,0)`, `(1,1,1)` are fixed by idempotence of the same
/// equations with `y = x`; the table is therefore unique.
pub fn median_two() -> FiniteAlgebra {
    let m = OperationTable::from_fn(3, 2, |t| usize::from(t[0] + t[1] + t[2] >= 2));
    build(
        "median2".into(),
        2,
        vec![op("m", m)],
        vec!["0".into(), "1".into()],
    )
}

/// 2-element join semilattice, optionally with bottom `0` and/or top `1` as constants.
pub fn semilattice_two(with_zero: bool, with_one: bool) -> FiniteAlgebra {
    let mut ops = vec![op("join", OperationTable::from_fn(2, 2, |t| t[0].max(t[1])))];
    if with_zero {
        ops.push(op("bot", OperationTable::constant(2, 0)));
    }
    if with_one {
        ops.push(op("top", OperationTable::constant(2, 1)));
    }
    let name = match (with_zero, with_one) {
        (false, false) => "sl",
        (true, false) => "sl0",
        (false, true) => "sl1",
        (true, true) => "sl01",
    };
    build(name.into(), 2, ops, vec!["0".into(), "1".into()])
}

/// The ternary discriminator `t(x,y,z) = z` if `x = y`, else `x`.
pub fn discriminator(n: usize) -> OperationTable {
    OperationTable::from_fn(3, n, |t| if t[0] == t[1] { t[2] } else { t[0] })
}

/// The 4-chain `0 < a < b < 1` as a bounded lattice enriched with the discriminator.
pub fn discriminator_chain() -> FiniteAlgebra {
    let mut ops = lattice_ops(4);
    ops.extend(bounds(4));
    ops.push(op("t", discriminator(4)));
    build("rdisc".into(), 4, ops, chain_labels(4))
}

/// Kleene 4: the 4-chain `0 < a < b < 1` as a bounded lattice with the order
/// reversing involution swapping `0,1` and `a,b`.
pub fn kleene_four() -> FiniteAlgebra {
    let mut ops = lattice_ops(4);
    ops.extend(bounds(4));
    ops.push(op("neg", OperationTable::from_fn(1, 4, |t| 3 - t[0])));
    build("kleene4".into(), 4, ops, chain_labels(4))
}

/// Product with element labels `xy`; panics only on malformed built-ins.
pub fn product(a: &FiniteAlgebra, b: &FiniteAlgebra, name: &str) -> FiniteAlgebra {
    a.product(b, name).expect("built-in factors share a signature")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tuples::Tuples;

    #[test]
    fn four_element_double_stone_tables() {
        let l = double_stone_chain(4);
        let star = l.op("star").unwrap();
        let plus = l.op("plus").unwrap();
        let e = |s: &str| l.element(s).unwrap();
        for x in ["1", "b", "a"] {
            assert_eq!(star.apply(&[e(x)]), e("0"));
        }
        assert_eq!(star.apply(&[e("0")]), e("1"));
        for x in ["0", "a", "b"] {
            assert_eq!(plus.apply(&[e(x)]), e("1"));
        }
        assert_eq!(plus.apply(&[e("1")]), e("0"));
    }

    #[test]
    fn median_is_the_only_majority_table() {
        let majority: Vec<Vec<usize>> = Tuples::new(2, 8)
            .filter(|t| {
                let m = OperationTable::new(3, 2, t.clone()).unwrap();
                (0..2).all(|x| {
                    (0..2).all(|y| {
                        m.apply(&[x, x, y]) == x
                            && m.apply(&[x, y, x]) == x
                            && m.apply(&[y, x, x]) == x
                    })
                })
            })
            .collect();
        assert_eq!(majority.len(), 1);
        assert_eq!(majority[0], median_two().op("m").unwrap().values());
    }

    #[test]
    fn discriminator_identities() {
        let t = discriminator_chain();
        let t = t.op("t").unwrap();
        for x in 0..4 {
            for y in 0..4 {
                assert_eq!(t.apply(&[x, x, y]), y);
                if x != y {
                    assert_eq!(t.apply(&[x, y, x]), x);
                }
            }
        }
    }

    #[test]
    fn labels() {
        assert_eq!(bounded_chain(3).labels(), ["0", "d", "1"]);
        assert_eq!(double_stone_chain(5).labels(), ["0", "a", "b", "c", "1"]);
        assert_eq!(kleene_four().op("neg").unwrap().values(), [3, 2, 1, 0]);
    }
}
