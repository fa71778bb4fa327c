//! Claims with expected verdicts, run against the catalog.

use rayon::prelude::*;

use super::{Catalog, Provenance};
use crate::algebra::{free_algebra, is_retract_of, subpower_algebra, subuniverses_of_power, FiniteAlgebra};
use crate::duality::{
    check_duality_on, check_fullness_on, search_injectivity_failure, VerdictKind,
};
use crate::endo::{double_stone_core, is_endodualisable_on, is_k_endoprimal};
use crate::entailment::{clone_entails, entailment_dense_upto, entails};
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::relation::Relation;
use crate::structures::enumerate_substructures;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClaimOp {
    Algebraic { ego: String },
    /// Value of a unary or nullary operation, by labels.
    OpValue { algebra: String, op: String, args: Vec<String> },
    /// Relation of an ego symbol (graph for operations), by labels.
    SymbolGraph { ego: String, symbol: String },
    Duality { algebra: String, ego: String },
    /// Duality on every subalgebra of `algebra^power`.
    DualityOnSubalgebras { algebra: String, power: usize, ego: String },
    /// Fullness on every closed substructure of `ego^power`.
    FullnessOnPower { ego: String, power: usize },
    InjectivitySweep { ego: String, power: usize, size: usize },
    Endoprimal { algebra: String, k: usize },
    Endodualisable { algebra: String, test: String },
    FreeSize { algebra: String, k: usize },
    FreeRetract { retract: String, algebra: String, k: usize },
    Core { algebra: String },
    DenseUpTo { ego: String, arity: usize },
    /// Does the ego entail a catalog relation?
    Entails { ego: String, relation: String },
    /// Is `relation` invariant under every polymorphism of `from`?
    CloneEntails { relation: String, from: Vec<String> },
}

impl ClaimOp {
    /// Catalog ids this claim reads.
    pub fn inputs(&self) -> Vec<&str> {
        use ClaimOp::*;
        match self {
            Algebraic { ego } | SymbolGraph { ego, .. } | FullnessOnPower { ego, .. } => vec![ego],
            InjectivitySweep { ego, .. } | DenseUpTo { ego, .. } => vec![ego],
            OpValue { algebra, .. } | Endoprimal { algebra, .. } | FreeSize { algebra, .. } => {
                vec![algebra]
            }
            Core { algebra } => vec![algebra],
            Duality { algebra, ego } | DualityOnSubalgebras { algebra, ego, .. } => vec![algebra, ego],
            Endodualisable { algebra, test } => vec![algebra, test],
            FreeRetract { retract, algebra, .. } => vec![retract, algebra],
            Entails { ego, relation } => vec![ego, relation],
            CloneEntails { relation, from } => {
                std::iter::once(relation).chain(from).map(String::as_str).collect()
            }
        }
    }

    pub fn name(&self) -> &'static str {
        use ClaimOp::*;
        match self {
            Algebraic { .. } => "algebraic",
            OpValue { .. } => "op-value",
            SymbolGraph { .. } => "symbol-graph",
            Duality { .. } => "duality",
            DualityOnSubalgebras { .. } => "duality-on-subalgebras",
            FullnessOnPower { .. } => "fullness-on-power",
            InjectivitySweep { .. } => "injectivity-sweep",
            Endoprimal { .. } => "endoprimal",
            Endodualisable { .. } => "endodualisable",
            FreeSize { .. } => "free-size",
            FreeRetract { .. } => "free-retract",
            Core { .. } => "core",
            DenseUpTo { .. } => "dense-up-to",
            Entails { .. } => "entails",
            CloneEntails { .. } => "clone-entails",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Claim {
    pub id: String,
    pub group: String,
    pub op: ClaimOp,
    /// `None` marks an informational claim: it records its verdict and
    /// always passes.
    pub expected: Option<String>,
    pub provenance: Provenance,
    pub source: String,
}

#[derive(Debug, Clone, Default)]
pub struct ClaimManifest {
    pub claims: Vec<Claim>,
}

impl ClaimManifest {
    /// Claims whose id or group contains `filter`.
    pub fn filtered(&self, filter: Option<&str>) -> Vec<&Claim> {
        self.claims
            .iter()
            .filter(|c| filter.is_none_or(|f| c.id.contains(f) || c.group.contains(f)))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClaimOutcome {
    pub id: String,
    pub group: String,
    pub expected: Option<String>,
    pub actual: Option<String>,
    pub error: Option<String>,
    pub passed: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ManifestReport {
    pub outcomes: Vec<ClaimOutcome>,
}

impl ManifestReport {
    pub fn all_passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.passed)
    }

    pub fn failed(&self) -> impl Iterator<Item = &ClaimOutcome> {
        self.outcomes.iter().filter(|o| !o.passed)
    }
}

/// Runs the claims in parallel; outcomes keep manifest order.
pub fn run_manifest(
    catalog: &Catalog,
    manifest: &ClaimManifest,
    filter: Option<&str>,
    limits: &Limits,
) -> ManifestReport {
    let outcomes = manifest
        .filtered(filter)
        .par_iter()
        .map(|c| {
            let result = run_claim(catalog, &c.op, limits);
            let (actual, error) = match result {
                Ok(a) => (Some(a), None),
                Err(e) => (None, Some(e.to_string())),
            };
            let passed = match (&c.expected, &actual) {
                (Some(e), Some(a)) => e == a,
                (None, Some(_)) => true,
                _ => false,
            };
            ClaimOutcome {
                id: c.id.clone(),
                group: c.group.clone(),
                expected: c.expected.clone(),
                actual,
                error,
                passed,
            }
        })
        .collect();
    ManifestReport { outcomes }
}

fn kind_str(kind: &VerdictKind) -> &'static str {
    match kind {
        VerdictKind::Iso => "iso",
        VerdictKind::NotInjective(..) => "notInjective",
        VerdictKind::NotSurjective(_) => "notSurjective",
    }
}

/// `{(0,0),(a,1)}` with element labels.
pub fn format_relation(m: &FiniteAlgebra, r: &Relation) -> String {
    let tuples: Vec<String> = r
        .iter()
        .map(|t| {
            let parts: Vec<&str> = t.iter().map(|&x| m.label(x)).collect();
            format!("({})", parts.join(","))
        })
        .collect();
    format!("{{{}}}", tuples.join(","))
}

/// Evaluates a claim to its verdict string.
pub fn run_claim(catalog: &Catalog, op: &ClaimOp, limits: &Limits) -> Result<String> {
    use ClaimOp::*;
    Ok(match op {
        Algebraic { ego } => {
            let g = catalog.ego(ego)?;
            match g.is_algebraic_over().first_failure() {
                None => "algebraic".into(),
                Some(bad) => format!("notAlgebraic({})", bad.name),
            }
        }
        OpValue { algebra, op, args } => {
            let a = catalog.algebra(algebra)?;
            let table = a
                .op(op)
                .ok_or_else(|| Error::invalid(format!("no operation `{op}` in {algebra}")))?;
            let args = args
                .iter()
                .map(|l| a.element(l).ok_or_else(|| Error::invalid(format!("no element `{l}`"))))
                .collect::<Result<Vec<_>>>()?;
            a.label(table.apply(&args)).to_string()
        }
        SymbolGraph { ego, symbol } => {
            let g = catalog.ego(ego)?;
            let c = g
                .constraints()
                .iter()
                .find(|c| &c.name == symbol)
                .ok_or_else(|| Error::invalid(format!("no symbol `{symbol}` in {ego}")))?;
            format_relation(g.over(), &c.relation)
        }
        Duality { algebra, ego } => {
            let v = check_duality_on(&*catalog.algebra(algebra)?, &catalog.ego(ego)?, limits)?;
            kind_str(&v.kind).into()
        }
        DualityOnSubalgebras { algebra, power, ego } => {
            let m = catalog.algebra(algebra)?;
            let g = catalog.ego(ego)?;
            for (i, s) in subuniverses_of_power(&m, *power, limits)?.iter().enumerate() {
                let elems: Vec<Vec<usize>> = s.iter().cloned().collect();
                let sub = subpower_algebra(&m, &elems, format!("sub{i}"))?;
                let v = check_duality_on(&sub, &g, limits)?;
                if !v.is_iso() {
                    return Ok(format!("{}(subalgebra {i})", kind_str(&v.kind)));
                }
            }
            "iso".into()
        }
        FullnessOnPower { ego, power } => {
            let g = catalog.ego(ego)?;
            let subs = enumerate_substructures(g, *power, limits.max_results, limits)?;
            if subs.truncated {
                return Err(Error::size("closed substructures", subs.structures.len() as u128, limits.max_results as u128));
            }
            let verdicts = subs
                .structures
                .par_iter()
                .map(|x| check_fullness_on(x, limits))
                .collect::<Result<Vec<_>>>()?;
            match verdicts.iter().position(|v| !v.is_iso()) {
                None => "iso".into(),
                Some(i) => format!("{}(substructure {i})", kind_str(&verdicts[i].kind)),
            }
        }
        InjectivitySweep { ego, power, size } => {
            let out = search_injectivity_failure(&catalog.ego(ego)?, *power, *size, limits)?;
            match out.witness {
                Some(w) if w.verify()? => format!("witness(k={})", w.k),
                Some(_) => return Err(Error::invalid("sweep witness failed re-verification")),
                None => "noWitnessWithinBounds".into(),
            }
        }
        Endoprimal { algebra, k } => {
            let m = catalog.algebra(algebra)?;
            let v = is_k_endoprimal(&m, *k, limits)?;
            if !v.verify(&m, limits)? {
                return Err(Error::invalid("endoprimality witness failed re-verification"));
            }
            if v.holds { "holds" } else { "fails" }.into()
        }
        Endodualisable { algebra, test } => {
            let v = is_endodualisable_on(&catalog.algebra(algebra)?, &*catalog.algebra(test)?, limits)?;
            kind_str(&v.kind).into()
        }
        FreeSize { algebra, k } => {
            let f = free_algebra(&*catalog.algebra(algebra)?, *k, limits)?;
            format!("size={}", f.algebra.size())
        }
        FreeRetract { retract, algebra, k } => {
            let f = free_algebra(&*catalog.algebra(algebra)?, *k, limits)?;
            let d = catalog.algebra(retract)?;
            match is_retract_of(&d, &f.algebra)? {
                Some(_) => "present".into(),
                None => "absent".into(),
            }
        }
        Core { algebra } => {
            let l = catalog.algebra(algebra)?;
            let core: Vec<&str> = double_stone_core(&l)?.into_iter().map(|x| l.label(x)).collect();
            format!("{{{}}}", core.join(","))
        }
        DenseUpTo { ego, arity } => {
            let r = entailment_dense_upto(&catalog.ego(ego)?, *arity, limits)?;
            if r.all_hold() { "holds" } else { "fails" }.into()
        }
        Entails { ego, relation } => {
            let g = catalog.ego(ego)?;
            let (on, r) = catalog.relation(relation)?;
            if on != g.over().name() {
                return Err(Error::invalid(format!("`{relation}` lives on {on}, not on {}", g.over().name())));
            }
            if entails(&g, &r, limits)?.holds { "holds" } else { "fails" }.into()
        }
        CloneEntails { relation, from } => {
            let (on, s) = catalog.relation(relation)?;
            let carrier = catalog.algebra(&on)?.size();
            let rels = from
                .iter()
                .map(|id| catalog.relation(id).map(|(_, r)| (*r).clone()))
                .collect::<Result<Vec<_>>>()?;
            if clone_entails(carrier, &rels, &s, limits)?.holds { "holds" } else { "fails" }.into()
        }
    })
}

/// The built-in regression claims.
pub fn builtin_manifest(catalog: &Catalog) -> ClaimManifest {
    use ClaimOp::*;
    use Provenance::*;
    let s = |x: &str| x.to_string();
    let mut claims = Vec::new();
    let mut add = |id: String, group: &str, op, expected: Option<&str>, provenance, source: &str| {
        claims.push(Claim {
            id,
            group: s(group),
            op,
            expected: expected.map(s),
            provenance,
            source: s(source),
        })
    };
    for g in catalog.egos() {
        add(
            format!("algebraic-{}", g.name()),
            "catalog",
            Algebraic { ego: g.name().into() },
            Some("algebraic"),
            Derived,
            "every catalog ego is algebraic over its algebra",
        );
    }
    for (x, v) in [("1", "0"), ("b", "0"), ("a", "0"), ("0", "1")] {
        add(
            format!("ds4-star-{x}"),
            "double-stone",
            OpValue { algebra: s("ds4"), op: s("star"), args: vec![s(x)] },
            Some(v),
            Stated,
            "star table of the 4-element double Stone chain",
        );
    }
    for (x, v) in [("0", "1"), ("a", "1"), ("b", "1"), ("1", "0")] {
        add(
            format!("ds4-plus-{x}"),
            "double-stone",
            OpValue { algebra: s("ds4"), op: s("plus"), args: vec![s(x)] },
            Some(v),
            Stated,
            "plus table of the 4-element double Stone chain",
        );
    }
    for (ego, symbol, v) in [
        ("threeT_sigma", "sigma", "{(0,0,0),(0,1,d),(1,1,1)}"),
        ("threeT_h", "h", "{(0,0,0),(0,d,d),(d,1,d),(1,1,1)}"),
        ("stone3T", "d", "{(0,0),(a,1),(1,1)}"),
        ("stone3T", "prec", "{(0,0),(a,a),(1,a),(1,1)}"),
        ("rdiscT", "graph_u", "{(0,0),(a,b),(1,1)}"),
    ] {
        let provenance = if symbol == "h" { Derived } else { Stated };
        add(
            format!("graph-{ego}-{symbol}"),
            "catalog",
            SymbolGraph { ego: s(ego), symbol: s(symbol) },
            Some(v),
            provenance,
            "listed table of an ego symbol",
        );
    }
    for a in ["chain2", "chain3", "chain4", "chain5", "chain2x2", "chain2x3", "chain2x2x2", "chain2x4"] {
        for ego in ["threeT", "twoT"] {
            add(
                format!("duality-{ego}-{a}"),
                "duality",
                Duality { algebra: s(a), ego: s(ego) },
                Some("iso"),
                Stated,
                "the ego yields a duality on bounded distributive lattices",
            );
        }
    }
    add(
        s("double-stone-case-a"),
        "double-stone",
        Endodualisable { algebra: s("ds3"), test: s("ds2") },
        Some("notSurjective"),
        Stated,
        "End of the 3-element Post algebra fails on 2",
    );
    for m in ["ds3x2", "ds4x2"] {
        add(
            format!("double-stone-case-b-{m}"),
            "double-stone",
            Endodualisable { algebra: s(m), test: s("ds2x2") },
            Some("notSurjective"),
            Stated,
            "End of J x 2 fails on 2^2",
        );
    }
    for (a, v) in [("ds2", "{}"), ("ds3", "{a}"), ("ds4", "{a,b}"), ("ds5", "{a,b,c}")] {
        add(
            format!("double-stone-core-{a}"),
            "double-stone",
            Core { algebra: s(a) },
            Some(v),
            Derived,
            "core K(L) from the star and plus tables",
        );
    }
    for ego in ["threeT_sigma", "threeT_h"] {
        add(
            format!("fullness-{ego}-square"),
            "fullness",
            FullnessOnPower { ego: s(ego), power: 2 },
            Some("iso"),
            Stated,
            "full at the finite level",
        );
    }
    add(
        s("strong-threeT_h"),
        "strong",
        InjectivitySweep { ego: s("threeT_h"), power: 3, size: 27 },
        Some("witness(k=1)"),
        Derived,
        "full but not strong; first witness by bounded search",
    );
    add(
        s("strong-threeT_sigma"),
        "strong",
        InjectivitySweep { ego: s("threeT_sigma"), power: 3, size: 27 },
        Some("noWitnessWithinBounds"),
        Stated,
        "strong duality",
    );
    for ego in ["slT", "sl0T", "sl1T", "sl01T", "z2T", "z3T"] {
        add(
            format!("strong-{ego}"),
            "strong",
            InjectivitySweep { ego: s(ego), power: 2, size: 16 },
            Some("noWitnessWithinBounds"),
            Stated,
            "strong duality",
        );
        add(
            format!("fullness-{ego}-square"),
            "fullness",
            FullnessOnPower { ego: s(ego), power: 2 },
            Some("iso"),
            Stated,
            "strong, hence full",
        );
    }
    add(
        s("strong-lat2_partialT"),
        "strong",
        InjectivitySweep { ego: s("lat2_partialT"), power: 2, size: 4 },
        Some("noWitnessWithinBounds"),
        Stated,
        "all algebraic partial operations give a strong duality at the finite level",
    );
    for power in [1, 2] {
        add(
            format!("discriminator-duality-power-{power}"),
            "discriminator",
            DualityOnSubalgebras { algebra: s("rdisc"), power, ego: s("rdiscT") },
            Some("iso"),
            Stated,
            "duality on subalgebras of R and R^2",
        );
    }
    add(
        s("discriminator-fullness-square"),
        "discriminator",
        FullnessOnPower { ego: s("rdiscT"), power: 2 },
        Some("iso"),
        Stated,
        "full duality",
    );
    add(
        s("discriminator-strong-sweep"),
        "discriminator",
        InjectivitySweep { ego: s("rdiscT"), power: 2, size: 16 },
        Some("witness(k=1)"),
        Derived,
        "not strong: phi(a) = b on X = {a} has no extension to Y = {a,b}",
    );
    add(
        s("endoprimal-chain3-1"),
        "endoprimal",
        Endoprimal { algebra: s("chain3"), k: 1 },
        Some("holds"),
        Stated,
        "a non-Boolean bounded distributive lattice is 1-endoprimal",
    );
    add(
        s("endoprimal-lat2-3"),
        "endoprimal",
        Endoprimal { algebra: s("lat2"), k: 3 },
        Some("fails"),
        Stated,
        "the Boolean lattice 2 is not 3-endoprimal",
    );
    for (k, v) in [(1, "size=1"), (2, "size=4"), (3, "size=18")] {
        add(
            format!("free-lat2-{k}"),
            "free",
            FreeSize { algebra: s("lat2"), k },
            Some(v),
            if k == 3 { Derived } else { Stated },
            "free distributive lattices",
        );
    }
    for m in 2..=4 {
        let v = format!("size={}", m * m);
        add(
            format!("free-z{m}-2"),
            "free",
            FreeSize { algebra: format!("z{m}"), k: 2 },
            Some(&v),
            Stated,
            "free algebra on two generators in ISP(Z_m)",
        );
    }
    for (k, v) in [(3, "present"), (2, "absent")] {
        add(
            format!("free-lat2-{k}-retract-lat3"),
            "free",
            FreeRetract { retract: s("lat3"), algebra: s("lat2"), k },
            Some(v),
            Stated,
            "3 as a retract of free distributive lattices",
        );
    }
    add(
        s("dense-lat2T-2"),
        "entailment",
        DenseUpTo { ego: s("lat2T"), arity: 2 },
        Some("holds"),
        Derived,
        "entailment up to arity 2",
    );
    add(
        s("dense-chain2-bare-fails"),
        "entailment",
        DenseUpTo { ego: s("chain2_end"), arity: 2 },
        Some("fails"),
        Derived,
        "End(2) is trivial and does not entail the order",
    );
    ClaimManifest { claims }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::load_catalog;

    #[test]
    fn quick_groups_pass() {
        let c = load_catalog().unwrap();
        let m = builtin_manifest(&c);
        for group in ["catalog", "double-stone", "free", "endoprimal", "entailment"] {
            let r = run_manifest(&c, &m, Some(group), &Limits::default());
            assert!(!r.outcomes.is_empty());
            for o in &r.outcomes {
                assert!(o.passed, "{o:?}");
            }
        }
    }

    #[test]
    fn every_claim_reads_catalog_entries() {
        let c = load_catalog().unwrap();
        for claim in builtin_manifest(&c).claims {
            for id in claim.op.inputs() {
                assert!(c.entry(id).is_some(), "{}: {id}", claim.id);
            }
        }
    }
}
