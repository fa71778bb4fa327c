//! Brute-force oracles shared by the integration tests. They work from the
//! operation tables and relation tuples alone and never call the search
//! engines they check.

#![allow(dead_code)]

use std::collections::BTreeSet;

use dualwork::{AlterEgo, FiniteAlgebra, Relation};

/// Every map `len -> carrier`, lexicographically.
pub fn all_maps(len: usize, carrier: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = (carrier as u128).pow(len as u32);
    (0..total).map(move |mut i| {
        let mut v = vec![0; len];
        for slot in v.iter_mut().rev() {
            *slot = (i % carrier as u128) as usize;
            i /= carrier as u128;
        }
        v
    })
}

/// Homomorphisms from the subalgebra `s` of `m^n` (elements are tuples,
/// operations act coordinatewise) into `m`.
pub fn homs_from_relation(m: &FiniteAlgebra, s: &Relation) -> Vec<Vec<usize>> {
    let elems: Vec<&Vec<usize>> = s.iter().collect();
    let index = |t: &Vec<usize>| elems.iter().position(|e| *e == t).expect("s is a subuniverse");
    all_maps(elems.len(), m.size())
        .filter(|h| {
            m.ops().iter().all(|op| {
                let k = op.table.arity();
                all_maps(k, elems.len()).all(|pick| {
                    let image: Vec<usize> = (0..s.arity())
                        .map(|c| op.table.apply(&pick.iter().map(|&i| elems[i][c]).collect::<Vec<_>>()))
                        .collect();
                    let lhs = h[index(&image)];
                    let rhs = op.table.apply(&pick.iter().map(|&i| h[i]).collect::<Vec<_>>());
                    lhs == rhs
                })
            })
        })
        .collect()
}

/// Homomorphisms `a -> b` by checking every map.
pub fn brute_homs(a: &FiniteAlgebra, b: &FiniteAlgebra) -> Vec<Vec<usize>> {
    all_maps(a.size(), b.size())
        .filter(|h| {
            a.ops().iter().zip(b.ops()).all(|(fa, fb)| {
                all_maps(fa.table.arity(), a.size()).all(|x| {
                    let y: Vec<usize> = x.iter().map(|&i| h[i]).collect();
                    h[fa.table.apply(&x)] == fb.table.apply(&y)
                })
            })
        })
        .collect()
}

/// The constraint relations of an ego: graphs of total and partial
/// operations, then the relations.
pub fn constraint_relations(ego: &AlterEgo) -> Vec<Relation> {
    let mut out: Vec<Relation> = ego.total().iter().map(|(_, g)| g.graph()).collect();
    for (_, h) in ego.partial() {
        let tuples = h.entries().map(|(args, v)| {
            let mut t = args.clone();
            t.push(v);
            t
        });
        out.push(Relation::new(h.arity() + 1, tuples).unwrap());
    }
    out.extend(ego.relations().iter().map(|(_, r)| r.clone()));
    out
}

/// What the oracle knows about `s` under an ego.
pub struct EntailmentOracle {
    pub holds: bool,
    /// Every morphism `D(s) -> ego` is an evaluation at a tuple of `s`.
    pub morphisms_are_evaluations: bool,
    pub morphism_count: usize,
}

/// Enumerates every map from `D(s)` into the carrier and keeps the
/// morphisms.
pub fn brute_entails(ego: &AlterEgo, s: &Relation) -> EntailmentOracle {
    let m = ego.over();
    let points = homs_from_relation(m, s);
    let elems: Vec<&Vec<usize>> = s.iter().collect();
    // r holds on points (p_1..p_k) iff it holds at every element of s
    let interp: Vec<(Relation, Vec<Vec<usize>>)> = constraint_relations(ego)
        .into_iter()
        .map(|r| {
            let tuples = all_maps(r.arity(), points.len())
                .filter(|ps| {
                    (0..elems.len()).all(|e| r.contains(&ps.iter().map(|&p| points[p][e]).collect::<Vec<_>>()))
                })
                .collect();
            (r, tuples)
        })
        .collect();
    let rho: Vec<usize> = (0..s.arity())
        .map(|i| {
            let proj: Vec<usize> = elems.iter().map(|t| t[i]).collect();
            points.iter().position(|p| *p == proj).unwrap()
        })
        .collect();
    let mut holds = true;
    let mut images = BTreeSet::new();
    let mut count = 0;
    for u in all_maps(points.len(), m.size()) {
        let is_morphism = interp.iter().all(|(r, ts)| {
            ts.iter().all(|ps| r.contains(&ps.iter().map(|&p| u[p]).collect::<Vec<_>>()))
        });
        if !is_morphism {
            continue;
        }
        count += 1;
        let t: Vec<usize> = rho.iter().map(|&p| u[p]).collect();
        holds &= s.contains(&t);
        images.insert(u);
    }
    // the evaluation at element e sends every point p to p(e)
    let evaluations: BTreeSet<Vec<usize>> = (0..elems.len())
        .map(|e| points.iter().map(|p| p[e]).collect())
        .collect();
    EntailmentOracle {
        holds,
        morphisms_are_evaluations: images == evaluations,
        morphism_count: count,
    }
}

/// Does the `k`-ary table `f` (values in lexicographic argument order)
/// preserve `r`?
pub fn preserves(f: &[usize], carrier: usize, k: usize, r: &Relation) -> bool {
    let rows: Vec<&Vec<usize>> = r.iter().collect();
    all_maps(k, rows.len()).all(|pick| {
        let image: Vec<usize> = (0..r.arity())
            .map(|c| {
                let idx = pick.iter().fold(0, |acc, &row| acc * carrier + rows[row][c]);
                f[idx]
            })
            .collect();
        r.contains(&image)
    })
}

/// All `k`-ary polymorphisms of `rels`, as raw tables.
pub fn polymorphisms(carrier: usize, k: usize, rels: &[Relation]) -> Vec<Vec<usize>> {
    let cells = carrier.pow(k as u32);
    all_maps(cells, carrier)
        .filter(|f| rels.iter().all(|r| preserves(f, carrier, k, r)))
        .collect()
}

/// Every relation of the given arity on the carrier, including the empty one.
pub fn all_relations(carrier: usize, arity: usize) -> Vec<Relation> {
    let tuples: Vec<Vec<usize>> = all_maps(arity, carrier).collect();
    (0u64..1 << tuples.len())
        .map(|mask| {
            Relation::new(
                arity,
                tuples
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, t)| t.clone()),
            )
            .unwrap()
        })
        .collect()
}

pub mod sweeps {
    //! The entailment and clone sweeps, reporting mismatches instead of
    //! panicking so the acceptance runner can print them.

    use std::sync::Arc;

    use dualwork::algebra::subuniverses_of_power;
    use dualwork::endo::endo_ego;
    use dualwork::entailment::{
        clone_entails, entails, evaluate_pp, pp_certificate, retraction_decomposition, Projection,
    };
    use dualwork::{AlterEgo, FiniteAlgebra, Limits, Relation};

    use super::{all_maps, all_relations, brute_entails, preserves};

    pub fn order(n: usize) -> Relation {
        Relation::new(2, (0..n).flat_map(|x| (x..n).map(move |y| vec![x, y]))).unwrap()
    }

    /// The empty set, End(M), an order relation, and End(M) with the order.
    pub fn ghr_family(m: FiniteAlgebra) -> Vec<Arc<AlterEgo>> {
        let n = m.size();
        let m = Arc::new(m);
        let end = endo_ego(&m).unwrap();
        let with_order = end.clone().with_relation("le", order(n)).unwrap().renamed("end_le");
        vec![
            Arc::new(AlterEgo::new("bare", Arc::clone(&m))),
            Arc::new(end),
            Arc::new(AlterEgo::new("le", Arc::clone(&m)).with_relation("le", order(n)).unwrap()),
            Arc::new(with_order),
        ]
    }

    #[derive(Debug, Default)]
    pub struct EntailmentTally {
        pub cases: usize,
        pub holds: usize,
        pub certificates: usize,
        pub on_duality: usize,
        pub bijective: usize,
        pub mismatches: Vec<String>,
    }

    /// Every algebraic `s` of arity <= 2 against every ego of the family.
    pub fn entailment_sweep(m: FiniteAlgebra) -> EntailmentTally {
        let limits = Limits::default();
        let mut t = EntailmentTally::default();
        let rels: Vec<Relation> = (1..=2)
            .flat_map(|n| subuniverses_of_power(&m, n, &limits).unwrap())
            .collect();
        for ego in ghr_family(m) {
            for s in &rels {
                let tag = format!("{} on {s:?}", ego.name());
                let v = entails(&ego, s, &limits).unwrap();
                let oracle = brute_entails(&ego, s);
                t.cases += 1;
                if v.holds != oracle.holds
                    || v.morphisms != oracle.morphism_count
                    || v.on_duality != oracle.morphisms_are_evaluations
                {
                    t.mismatches.push(format!("verdict differs from brute force: {tag}"));
                    continue;
                }
                if !v.holds {
                    if v.escaping.as_ref().is_none_or(|e| s.contains(e)) {
                        t.mismatches.push(format!("bad escaping tuple: {tag}"));
                    }
                    continue;
                }
                t.holds += 1;
                match pp_certificate(&ego, s, &limits).and_then(|phi| evaluate_pp(&phi, &ego)) {
                    Ok(defined) if &defined == s => t.certificates += 1,
                    other => t.mismatches.push(format!("pp certificate {other:?}: {tag}")),
                }
                let cert = match retraction_decomposition(&ego, s, &limits) {
                    Ok(c) if c.verify(ego.over(), s).unwrap_or(false) => c,
                    other => {
                        t.mismatches.push(format!("retraction certificate {other:?}: {tag}"));
                        continue;
                    }
                };
                if oracle.morphisms_are_evaluations {
                    t.on_duality += 1;
                    if matches!(cert.classification, Projection::Bijective(_)) {
                        t.bijective += 1;
                    } else {
                        t.mismatches.push(format!("not bijective on a duality: {tag}"));
                    }
                }
            }
        }
        t
    }

    /// Preservation on the 2-element carrier with tables as bitmasks: bit
    /// `i` of `f` is the value at the `i`-th argument tuple.
    pub struct BoolRel {
        /// For each pick of `k` rows, the cell read by each coordinate.
        picks: Vec<Vec<usize>>,
        /// Bit `t` set iff tuple `t` (binary encoding) is in the relation.
        members: u32,
    }

    impl BoolRel {
        pub fn new(r: &Relation, k: usize) -> Self {
            let rows: Vec<&Vec<usize>> = r.iter().collect();
            let picks = all_maps(k, rows.len())
                .map(|pick| {
                    (0..r.arity())
                        .map(|c| pick.iter().fold(0, |acc, &row| acc * 2 + rows[row][c]))
                        .collect()
                })
                .collect();
            let members = r.iter().map(|t| 1 << t.iter().fold(0, |a, &x| a * 2 + x)).sum();
            BoolRel { picks, members }
        }

        pub fn preserved_by(&self, f: u32) -> bool {
            self.picks.iter().all(|cells| {
                let image = cells.iter().fold(0, |acc, &c| acc * 2 + (f >> c & 1) as usize);
                self.members >> image & 1 == 1
            })
        }
    }

    #[derive(Debug, Default)]
    pub struct CloneTally {
        pub rsets: usize,
        pub cases: usize,
        pub holds: usize,
        pub mismatches: Vec<String>,
    }

    /// All R-sets of at most two relations of arity <= 2 on `{0,1}`, against
    /// every non-empty target of arity <= 2.
    pub fn clone_sweep() -> CloneTally {
        let limits = Limits::default();
        let mut universe = all_relations(2, 1);
        universe.extend(all_relations(2, 2));
        let mut rsets: Vec<Vec<Relation>> = vec![Vec::new()];
        for (i, r) in universe.iter().enumerate() {
            rsets.push(vec![r.clone()]);
            for r2 in &universe[i + 1..] {
                rsets.push(vec![r.clone(), r2.clone()]);
            }
        }
        let targets: Vec<&Relation> = universe.iter().filter(|r| !r.is_empty()).collect();
        let mut t = CloneTally {
            rsets: rsets.len(),
            ..CloneTally::default()
        };
        for rs in &rsets {
            for k in 1..=4 {
                let checks: Vec<BoolRel> = rs.iter().map(|r| BoolRel::new(r, k)).collect();
                let pols: Vec<u32> = (0u32..1 << (1 << k))
                    .filter(|&f| checks.iter().all(|c| c.preserved_by(f)))
                    .collect();
                for s in targets.iter().filter(|s| s.len() == k) {
                    let target = BoolRel::new(s, k);
                    let expected = pols.iter().all(|&f| target.preserved_by(f));
                    let v = clone_entails(2, rs, s, &limits).unwrap();
                    t.cases += 1;
                    t.holds += v.holds as usize;
                    if v.holds != expected {
                        t.mismatches.push(format!("R = {rs:?}, s = {s:?}"));
                    }
                    if let Some(u) = &v.violator {
                        if !rs.iter().all(|r| preserves(u.values(), 2, k, r)) || preserves(u.values(), 2, k, s) {
                            t.mismatches.push(format!("bad violator for R = {rs:?}, s = {s:?}"));
                        }
                    }
                }
            }
        }
        t
    }
}
