//! Finite algebras on `{0..n-1}`, homomorphism search, generation, term
//! clones, free algebras and retracts.

mod generate;
mod hom;

pub use generate::{
    free_algebra, generate_subpower, has_product_factoring, power, subpower_algebra,
    subuniverse_generate, subuniverses_of_power, term_clone, FreeAlgebra,
};
pub use hom::{hom_enumerate, in_quasivariety, is_retract_of, HomSearch, Retraction, Separation};

use std::collections::HashSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::tuples::{encode, Tuples};

/// Total operation table, row-major over arguments in lexicographic order.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OperationTable {
    arity: usize,
    size: usize,
    table: Vec<usize>,
}

impl OperationTable {
    pub fn new(arity: usize, size: usize, table: Vec<usize>) -> Result<Self> {
        let expected = crate::limits::checked_pow(size, arity);
        if table.len() as u128 != expected {
            return Err(Error::invalid(format!(
                "table for arity {arity} over {size} elements needs {expected} entries, got {}",
                table.len()
            )));
        }
        if let Some(v) = table.iter().find(|&&v| v >= size) {
            return Err(Error::invalid(format!("value {v} exceeds carrier {size}")));
        }
        Ok(OperationTable { arity, size, table })
    }

    pub fn from_fn(arity: usize, size: usize, f: impl Fn(&[usize]) -> usize) -> Self {
        let table = Tuples::new(size, arity).map(|t| f(&t)).collect();
        OperationTable { arity, size, table }
    }

    pub fn constant(size: usize, value: usize) -> Self {
        OperationTable {
            arity: 0,
            size,
            table: vec![value],
        }
    }

    pub fn projection(arity: usize, size: usize, i: usize) -> Self {
        OperationTable::from_fn(arity, size, |t| t[i])
    }

    #[inline]
    pub fn apply(&self, args: &[usize]) -> usize {
        debug_assert_eq!(args.len(), self.arity);
        self.table[encode(self.size, args)]
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn values(&self) -> &[usize] {
        &self.table
    }

    /// Graph `{(x1..xn, f(x))}` as an `(n+1)`-ary relation.
    pub fn graph(&self) -> crate::Relation {
        let tuples = Tuples::new(self.size, self.arity).map(|mut t| {
            let v = self.apply(&t);
            t.push(v);
            t
        });
        crate::Relation::new(self.arity + 1, tuples).expect("graph tuples have uniform arity")
    }

    /// True when the table commutes with the unary map `e`: `f(e(x)) = e(f(x))`.
    pub fn commutes_with(&self, e: &[usize]) -> bool {
        Tuples::new(self.size, self.arity).all(|t| {
            let image: Vec<usize> = t.iter().map(|&x| e[x]).collect();
            self.apply(&image) == e[self.apply(&t)]
        })
    }
}

impl fmt::Debug for OperationTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Op/{}{:?}", self.arity, self.table)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Operation {
    pub name: String,
    pub table: OperationTable,
}

/// Operation symbols with arities, in declaration order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Signature {
    symbols: Vec<(String, usize)>,
}

impl Signature {
    pub fn new(symbols: Vec<(String, usize)>) -> Result<Self> {
        let mut seen = HashSet::new();
        for (name, _) in &symbols {
            if !seen.insert(name.as_str()) {
                return Err(Error::invalid(format!("duplicate operation symbol `{name}`")));
            }
        }
        Ok(Signature { symbols })
    }

    pub fn symbols(&self) -> &[(String, usize)] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }
}

/// A finite algebra with carrier `{0..size-1}`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FiniteAlgebra {
    name: String,
    size: usize,
    labels: Vec<String>,
    ops: Vec<Operation>,
}

impl FiniteAlgebra {
    pub fn new(name: impl Into<String>, size: usize, ops: Vec<Operation>) -> Result<Self> {
        if size == 0 {
            return Err(Error::invalid("carrier must be non-empty"));
        }
        Signature::new(
            ops.iter()
                .map(|o| (o.name.clone(), o.table.arity()))
                .collect(),
        )?;
        for op in &ops {
            if op.table.size() != size {
                return Err(Error::invalid(format!(
                    "operation `{}` is defined on {} elements, carrier has {size}",
                    op.name,
                    op.table.size()
                )));
            }
        }
        Ok(FiniteAlgebra {
            name: name.into(),
            size,
            labels: (0..size).map(|i| i.to_string()).collect(),
            ops,
        })
    }

    /// Convenience constructor from `(name, arity, table)` triples.
    pub fn from_tables(
        name: impl Into<String>,
        size: usize,
        tables: Vec<(&str, usize, Vec<usize>)>,
    ) -> Result<Self> {
        let ops = tables
            .into_iter()
            .map(|(n, a, t)| {
                Ok(Operation {
                    name: n.to_string(),
                    table: OperationTable::new(a, size, t)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        FiniteAlgebra::new(name, size, ops)
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.size {
            return Err(Error::invalid(format!(
                "{} labels for {} elements",
                labels.len(),
                self.size
            )));
        }
        let unique: HashSet<_> = labels.iter().collect();
        if unique.len() != labels.len() {
            return Err(Error::invalid("element labels must be distinct"));
        }
        self.labels = labels;
        Ok(self)
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, e: usize) -> &str {
        &self.labels[e]
    }

    /// Element with the given display label.
    pub fn element(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn ops(&self) -> &[Operation] {
        &self.ops
    }

    pub fn op(&self, name: &str) -> Option<&OperationTable> {
        self.ops.iter().find(|o| o.name == name).map(|o| &o.table)
    }

    pub fn signature(&self) -> Signature {
        Signature {
            symbols: self
                .ops
                .iter()
                .map(|o| (o.name.clone(), o.table.arity()))
                .collect(),
        }
    }

    pub fn same_signature(&self, other: &FiniteAlgebra) -> bool {
        self.ops.len() == other.ops.len()
            && self
                .ops
                .iter()
                .zip(&other.ops)
                .all(|(a, b)| a.name == b.name && a.table.arity() == b.table.arity())
    }

    pub(crate) fn require_same_signature(&self, other: &FiniteAlgebra) -> Result<()> {
        if self.same_signature(other) {
            Ok(())
        } else {
            Err(Error::SignatureMismatch {
                left: self.name.clone(),
                right: other.name.clone(),
            })
        }
    }

    /// Values of the nullary operations.
    pub fn constants(&self) -> Vec<usize> {
        self.ops
            .iter()
            .filter(|o| o.table.arity() == 0)
            .map(|o| o.table.apply(&[]))
            .collect()
    }

    /// True when `set` (as a membership vector) is closed under every operation.
    pub fn is_subuniverse(&self, set: &[bool]) -> bool {
        self.ops.iter().all(|op| {
            Tuples::new(self.size, op.table.arity())
                .filter(|t| t.iter().all(|&x| set[x]))
                .all(|t| set[op.table.apply(&t)])
        })
    }

    /// Finds an operation application violating closure of `set`, if any.
    pub fn closure_violation(&self, set: &[bool]) -> Option<(String, Vec<usize>, usize)> {
        for op in &self.ops {
            for t in Tuples::new(self.size, op.table.arity()) {
                if t.iter().all(|&x| set[x]) {
                    let v = op.table.apply(&t);
                    if !set[v] {
                        return Some((op.name.clone(), t, v));
                    }
                }
            }
        }
        None
    }

    /// Direct product; the pair `(x, y)` has index `x * |other| + y`.
    pub fn product(&self, other: &FiniteAlgebra, name: impl Into<String>) -> Result<Self> {
        self.require_same_signature(other)?;
        let n = self.size * other.size;
        let ops = self
            .ops
            .iter()
            .zip(&other.ops)
            .map(|(a, b)| {
                let arity = a.table.arity();
                let table = OperationTable::from_fn(arity, n, |args| {
                    let left: Vec<usize> = args.iter().map(|&p| p / other.size).collect();
                    let right: Vec<usize> = args.iter().map(|&p| p % other.size).collect();
                    a.table.apply(&left) * other.size + b.table.apply(&right)
                });
                Operation {
                    name: a.name.clone(),
                    table,
                }
            })
            .collect();
        let labels = (0..n)
            .map(|p| format!("{}{}", self.labels[p / other.size], other.labels[p % other.size]))
            .collect::<Vec<_>>();
        let alg = FiniteAlgebra::new(name, n, ops)?;
        // composite labels may collide (e.g. "1"+"10" vs "11"+"0"); fall back to indices
        Ok(alg.clone().with_labels(labels).unwrap_or(alg))
    }

    /// Subalgebra on a subuniverse given as a sorted element list; element `i`
    /// of the result is `elements[i]`.
    pub fn subalgebra(&self, elements: &[usize], name: impl Into<String>) -> Result<Self> {
        let mut pos = vec![usize::MAX; self.size];
        for (i, &e) in elements.iter().enumerate() {
            pos[e] = i;
        }
        let n = elements.len();
        let mut ops = Vec::with_capacity(self.ops.len());
        for op in &self.ops {
            let mut table = Vec::with_capacity(crate::limits::checked_pow(n, op.table.arity()) as usize);
            for t in Tuples::new(n, op.table.arity()) {
                let args: Vec<usize> = t.iter().map(|&i| elements[i]).collect();
                let v = pos[op.table.apply(&args)];
                if v == usize::MAX {
                    return Err(Error::invalid(format!(
                        "subset is not closed under `{}`",
                        op.name
                    )));
                }
                table.push(v);
            }
            ops.push(Operation {
                name: op.name.clone(),
                table: OperationTable::new(op.table.arity(), n, table)?,
            });
        }
        let labels = elements.iter().map(|&e| self.labels[e].clone()).collect();
        FiniteAlgebra::new(name, n, ops)?.with_labels(labels)
    }

    /// Finds a ternary term of the form `m(x,y,z)` satisfying the majority
    /// identities, either a basic operation or the lattice median built from a
    /// pair of binary operations. Returned as a table.
    pub fn majority_term(&self) -> Option<OperationTable> {
        let is_majority = |m: &OperationTable| {
            (0..self.size).all(|x| {
                (0..self.size).all(|y| {
                    m.apply(&[x, x, y]) == x && m.apply(&[x, y, x]) == x && m.apply(&[y, x, x]) == x
                })
            })
        };
        for op in &self.ops {
            if op.table.arity() == 3 && is_majority(&op.table) {
                return Some(op.table.clone());
            }
        }
        let binaries: Vec<&OperationTable> = self
            .ops
            .iter()
            .filter(|o| o.table.arity() == 2)
            .map(|o| &o.table)
            .collect();
        for &j in &binaries {
            for &m in &binaries {
                let median = OperationTable::from_fn(3, self.size, |t| {
                    let (x, y, z) = (t[0], t[1], t[2]);
                    let xy = m.apply(&[x, y]);
                    let yz = m.apply(&[y, z]);
                    let xz = m.apply(&[x, z]);
                    j.apply(&[j.apply(&[xy, yz]), xz])
                });
                if is_majority(&median) {
                    return Some(median);
                }
            }
        }
        None
    }

    /// Congruence generated by one pair, as a class-representative vector.
    pub fn congruence_generated(&self, a: usize, b: usize) -> Vec<usize> {
        let n = self.size;
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut y = x;
            while p[y] != r {
                let next = p[y];
                p[y] = r;
                y = next;
            }
            r
        }
        let mut pending = vec![(a, b)];
        while let Some((x, y)) = pending.pop() {
            let (rx, ry) = (find(&mut parent, x), find(&mut parent, y));
            if rx == ry {
                continue;
            }
            parent[rx.max(ry)] = rx.min(ry);
            // compatibility: substitute into every argument position
            for op in &self.ops {
                let k = op.table.arity();
                if k == 0 {
                    continue;
                }
                for pos in 0..k {
                    for rest in Tuples::new(n, k - 1) {
                        let mut args_x = Vec::with_capacity(k);
                        args_x.extend_from_slice(&rest[..pos]);
                        args_x.push(x);
                        args_x.extend_from_slice(&rest[pos..]);
                        let mut args_y = args_x.clone();
                        args_y[pos] = y;
                        let (u, v) = (op.table.apply(&args_x), op.table.apply(&args_y));
                        if find(&mut parent, u) != find(&mut parent, v) {
                            pending.push((u, v));
                        }
                    }
                }
            }
        }
        (0..n).map(|x| find(&mut parent, x)).collect()
    }

    /// True when the only congruences are the identity and the full relation.
    pub fn is_simple(&self) -> bool {
        if self.size < 2 {
            return false;
        }
        for a in 0..self.size {
            for b in a + 1..self.size {
                let classes = self.congruence_generated(a, b);
                if classes.iter().any(|&c| c != classes[0]) {
                    return false;
                }
            }
        }
        true
    }
}

impl fmt::Debug for FiniteAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteAlgebra")
            .field("name", &self.name)
            .field("size", &self.size)
            .field("ops", &self.ops.iter().map(|o| &o.name).collect::<Vec<_>>())
            .finish()
    }
}

/// A homomorphism given by its table on the source carrier.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Homomorphism(pub Vec<usize>);

impl Homomorphism {
    pub fn identity(n: usize) -> Self {
        Homomorphism((0..n).collect())
    }

    pub fn map(&self) -> &[usize] {
        &self.0
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.0[x]
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &Homomorphism) -> Homomorphism {
        Homomorphism(self.0.iter().map(|&x| other.0[x]).collect())
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &x)| i == x)
    }

    /// Checks the homomorphism condition against every table entry.
    pub fn is_homomorphism(&self, source: &FiniteAlgebra, target: &FiniteAlgebra) -> bool {
        source.same_signature(target)
            && self.0.len() == source.size()
            && source.ops().iter().zip(target.ops()).all(|(a, b)| {
                Tuples::new(source.size(), a.table.arity()).all(|t| {
                    let image: Vec<usize> = t.iter().map(|&x| self.0[x]).collect();
                    self.0[a.table.apply(&t)] == b.table.apply(&image)
                })
            })
    }
}
