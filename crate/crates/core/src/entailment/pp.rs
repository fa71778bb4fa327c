//! Primitive positive certificates and a small conjunctive-query evaluator.

use std::fmt;
use std::sync::Arc;

use super::{entails, labelled_dual};
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::relation::Relation;
use crate::structures::AlterEgo;
use crate::tuples::Tuples;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Atom {
    Eq(usize, usize),
    /// A symbol of the ego; operations appear through their graphs.
    Rel { symbol: String, args: Vec<usize> },
}

/// `exists y_1..y_m . atoms`, with free variables `0..free` and bound
/// variables `free..free + bound`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PPFormula {
    pub free: usize,
    pub bound: usize,
    pub atoms: Vec<Atom>,
}

impl PPFormula {
    fn var_name(&self, v: usize) -> String {
        if v < self.free {
            format!("x{}", v + 1)
        } else {
            format!("y{}", v - self.free + 1)
        }
    }
}

impl fmt::Display for PPFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.bound > 0 {
            let names: Vec<String> = (self.free..self.free + self.bound)
                .map(|v| self.var_name(v))
                .collect();
            write!(f, "exists {} . ", names.join(" "))?;
        }
        if self.atoms.is_empty() {
            return write!(f, "true");
        }
        let atoms: Vec<String> = self
            .atoms
            .iter()
            .map(|a| match a {
                Atom::Eq(x, y) => format!("{} = {}", self.var_name(*x), self.var_name(*y)),
                Atom::Rel { symbol, args } => {
                    let args: Vec<String> = args.iter().map(|&v| self.var_name(v)).collect();
                    format!("{symbol}({})", args.join(", "))
                }
            })
            .collect();
        write!(f, "{}", atoms.join(" & "))
    }
}

/// The primitive positive type of the projections in `D(s)`, checked to
/// define `s` exactly.
pub fn pp_certificate(ego: &Arc<AlterEgo>, s: &Relation, limits: &Limits) -> Result<PPFormula> {
    if !entails(ego, s, limits)?.holds {
        return Err(Error::invalid("the ego does not entail the relation"));
    }
    let ld = labelled_dual(ego, s, limits)?;
    let n = s.arity();
    let points = ld.dual.homs.len();
    let mut var = vec![usize::MAX; points];
    for (i, &p) in ld.rho.iter().enumerate() {
        if var[p] == usize::MAX {
            var[p] = i;
        }
    }
    let mut next = n;
    for slot in var.iter_mut().filter(|v| **v == usize::MAX) {
        *slot = next;
        next += 1;
    }
    let mut atoms: Vec<Atom> = ld
        .aliases
        .iter()
        .filter(|&&(i, _)| var[ld.rho[i]] == i)
        .map(|&(i, j)| Atom::Eq(i, j))
        .collect();
    atoms.dedup();
    let tuples = ld.dual.structure.interpretations();
    for (c, ts) in ego.constraints().iter().zip(&tuples) {
        for t in ts {
            atoms.push(Atom::Rel {
                symbol: c.name.clone(),
                args: t.iter().map(|&p| var[p]).collect(),
            });
        }
    }
    let phi = PPFormula {
        free: n,
        bound: next - n,
        atoms,
    };
    let defined = evaluate_pp(&phi, ego)?;
    if &defined != s {
        return Err(Error::CertificateMismatch(format!(
            "formula defines {} tuples, relation has {}",
            defined.len(),
            s.len()
        )));
    }
    Ok(phi)
}

/// `{ c in M^free : M satisfies phi(c) }`, by backtracking over the bound
/// variables for each candidate tuple.
pub fn evaluate_pp(phi: &PPFormula, ego: &AlterEgo) -> Result<Relation> {
    let vars = phi.free + phi.bound;
    let constraints = ego.constraints();
    // atoms grouped by their largest variable, so each is checked once all
    // its arguments are set
    let mut due: Vec<Vec<(Option<&Relation>, &Atom)>> = vec![Vec::new(); vars];
    for atom in &phi.atoms {
        let (rel, last) = match atom {
            Atom::Eq(x, y) => (None, *x.max(y)),
            Atom::Rel { symbol, args } => {
                let c = constraints
                    .iter()
                    .find(|c| &c.name == symbol)
                    .ok_or_else(|| Error::invalid(format!("unknown symbol `{symbol}`")))?;
                if c.relation.arity() != args.len() {
                    return Err(Error::ArityMismatch {
                        expected: c.relation.arity(),
                        found: args.len(),
                    });
                }
                (Some(&c.relation), args.iter().copied().max().unwrap_or(0))
            }
        };
        if last >= vars {
            return Err(Error::invalid(format!("variable {last} out of range")));
        }
        due[last].push((rel, atom));
    }
    let n = ego.carrier();
    let mut assign = vec![0usize; vars];
    let mut out = Vec::new();
    for c in Tuples::new(n, phi.free) {
        assign[..phi.free].copy_from_slice(&c);
        let ok_free = (0..phi.free).all(|v| holds_at(&due[v], &assign));
        if ok_free && extend(phi.free, vars, n, &due, &mut assign) {
            out.push(c);
        }
    }
    Relation::new(phi.free, out)
}

fn holds_at(atoms: &[(Option<&Relation>, &Atom)], assign: &[usize]) -> bool {
    atoms.iter().all(|(rel, atom)| match atom {
        Atom::Eq(x, y) => assign[*x] == assign[*y],
        Atom::Rel { args, .. } => {
            let t: Vec<usize> = args.iter().map(|&v| assign[v]).collect();
            rel.expect("relation atoms carry their relation").contains(&t)
        }
    })
}

fn extend(
    v: usize,
    vars: usize,
    n: usize,
    due: &[Vec<(Option<&Relation>, &Atom)>],
    assign: &mut [usize],
) -> bool {
    if v == vars {
        return true;
    }
    for value in 0..n {
        assign[v] = value;
        if holds_at(&due[v], assign) && extend(v + 1, vars, n, due, assign) {
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{algebras, egos};

    #[test]
    fn order_certificate_on_unbounded_two() {
        let ego = Arc::new(egos::priestley_unbounded());
        let le = Relation::new(2, vec![vec![0, 0], vec![0, 1], vec![1, 1]]).unwrap();
        let phi = pp_certificate(&ego, &le, &Limits::default()).unwrap();
        assert_eq!(phi.free, 2);
        assert_eq!(evaluate_pp(&phi, &ego).unwrap(), le);
    }

    #[test]
    fn diagonal_certificate_is_an_equality() {
        let ego = Arc::new(AlterEgo::new("bare", algebras::bounded_chain(3)));
        let phi = pp_certificate(&ego, &Relation::diagonal(3, 2), &Limits::default()).unwrap();
        assert!(phi.atoms.contains(&Atom::Eq(0, 1)));
        // the two non-identity endomorphisms stay as unconstrained bound variables
        assert_eq!(phi.to_string(), "exists y1 y2 . x1 = x2");
    }

    #[test]
    fn graph_certificate() {
        let ego = Arc::new(egos::three());
        let f = ego.total()[0].1.graph();
        let phi = pp_certificate(&ego, &f, &Limits::default()).unwrap();
        assert!(phi.atoms.iter().any(|a| matches!(a, Atom::Rel { symbol, .. } if symbol == "f")));
        assert_eq!(evaluate_pp(&phi, &ego).unwrap(), f);
    }

    #[test]
    fn unknown_symbol() {
        let ego = egos::priestley();
        let phi = PPFormula {
            free: 1,
            bound: 0,
            atoms: vec![Atom::Rel {
                symbol: "nope".into(),
                args: vec![0],
            }],
        };
        assert!(evaluate_pp(&phi, &ego).is_err());
    }
}
