//! Backtracking homomorphism search with propagation through operation tables.

use super::{FiniteAlgebra, Homomorphism};
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::tuples::decode;

const UNSET: usize = usize::MAX;

/// Configurable search for homomorphisms `source -> target`.
///
/// Results of [`HomSearch::all`] are sorted lexicographically by map table.
/// [`HomSearch::first`] returns the lexicographically least homomorphism.
#[derive(Debug, Clone)]
pub struct HomSearch<'a> {
    source: &'a FiniteAlgebra,
    target: &'a FiniteAlgebra,
    partial: Vec<Option<usize>>,
    allowed: Option<Vec<Vec<bool>>>,
    limit: usize,
}

impl<'a> HomSearch<'a> {
    pub fn new(source: &'a FiniteAlgebra, target: &'a FiniteAlgebra) -> Result<Self> {
        source.require_same_signature(target)?;
        Ok(HomSearch {
            source,
            target,
            partial: vec![None; source.size()],
            allowed: None,
            limit: Limits::default().max_results,
        })
    }

    /// Fix the images of some source elements.
    pub fn with_partial(mut self, partial: &[Option<usize>]) -> Result<Self> {
        if partial.len() != self.source.size() {
            return Err(Error::invalid(format!(
                "partial map has {} entries, source has {}",
                partial.len(),
                self.source.size()
            )));
        }
        if let Some(v) = partial.iter().flatten().find(|&&v| v >= self.target.size()) {
            return Err(Error::invalid(format!(
                "value {v} exceeds carrier {}",
                self.target.size()
            )));
        }
        self.partial = partial.to_vec();
        Ok(self)
    }

    /// Restrict the image of each source element to a set of allowed targets.
    pub fn with_allowed(mut self, allowed: Vec<Vec<bool>>) -> Self {
        self.allowed = Some(allowed);
        self
    }

    pub fn with_limit(mut self, limit: usize) -> Self {
        self.limit = limit;
        self
    }

    pub fn all(&self) -> Result<Vec<Homomorphism>> {
        let mut engine = Engine::new(self, true);
        let mut out = Vec::new();
        if engine.init() {
            engine.search(0, &mut |m| {
                out.push(Homomorphism(m.to_vec()));
                out.len() <= self.limit
            });
        }
        if out.len() > self.limit {
            return Err(Error::size(
                format!("homomorphisms {} -> {}", self.source.name(), self.target.name()),
                out.len() as u128,
                self.limit as u128,
            ));
        }
        out.sort();
        Ok(out)
    }

    pub fn first(&self) -> Option<Homomorphism> {
        // index order makes the first hit lexicographically least
        let mut engine = Engine::new(self, false);
        let mut found = None;
        if engine.init() {
            engine.search(0, &mut |m| {
                found = Some(Homomorphism(m.to_vec()));
                false
            });
        }
        found
    }

    pub fn exists(&self) -> bool {
        self.first().is_some()
    }
}

struct Engine<'s, 'a> {
    search: &'s HomSearch<'a>,
    order: Vec<usize>,
    /// constraint occurrences per source element: (operation, table row)
    occ: Vec<Vec<(u32, u32)>>,
    assign: Vec<usize>,
    trail: Vec<usize>,
    queue: Vec<usize>,
}

impl<'s, 'a> Engine<'s, 'a> {
    fn new(search: &'s HomSearch<'a>, by_degree: bool) -> Self {
        let n = search.source.size();
        let mut occ: Vec<Vec<(u32, u32)>> = vec![Vec::new(); n];
        for (oi, op) in search.source.ops().iter().enumerate() {
            let arity = op.table.arity();
            if arity == 0 {
                continue;
            }
            for (row, &res) in op.table.values().iter().enumerate() {
                let mut seen = decode(n, arity, row);
                seen.push(res);
                seen.sort_unstable();
                seen.dedup();
                for x in seen {
                    occ[x].push((oi as u32, row as u32));
                }
            }
        }
        let mut order: Vec<usize> = (0..n).collect();
        if by_degree {
            order.sort_by(|&a, &b| occ[b].len().cmp(&occ[a].len()).then(a.cmp(&b)));
        }
        Engine {
            search,
            order,
            occ,
            assign: vec![UNSET; n],
            trail: Vec::new(),
            queue: Vec::new(),
        }
    }

    fn allowed(&self, x: usize, v: usize) -> bool {
        self.search.allowed.as_ref().is_none_or(|a| a[x][v])
    }

    fn set(&mut self, x: usize, v: usize) -> bool {
        match self.assign[x] {
            UNSET => {
                if !self.allowed(x, v) {
                    return false;
                }
                self.assign[x] = v;
                self.trail.push(x);
                self.queue.push(x);
                true
            }
            w => w == v,
        }
    }

    fn init(&mut self) -> bool {
        let (src, tgt) = (self.search.source, self.search.target);
        for (a, b) in src.ops().iter().zip(tgt.ops()) {
            if a.table.arity() == 0 && !self.set(a.table.apply(&[]), b.table.apply(&[])) {
                return false;
            }
        }
        for x in 0..src.size() {
            if let Some(v) = self.search.partial[x] {
                if !self.set(x, v) {
                    return false;
                }
            }
        }
        self.propagate()
    }

    fn propagate(&mut self) -> bool {
        let (src, tgt) = (self.search.source, self.search.target);
        let n = src.size();
        let mut args = Vec::new();
        while let Some(x) = self.queue.pop() {
            for i in 0..self.occ[x].len() {
                let (oi, row) = self.occ[x][i];
                let op = &src.ops()[oi as usize].table;
                let arity = op.arity();
                args.clear();
                let mut rest = row as usize;
                let mut complete = true;
                for _ in 0..arity {
                    let a = rest % n;
                    rest /= n;
                    let v = self.assign[a];
                    if v == UNSET {
                        complete = false;
                        break;
                    }
                    args.push(v);
                }
                if !complete {
                    continue;
                }
                args.reverse();
                let value = tgt.ops()[oi as usize].table.apply(&args);
                let res = op.values()[row as usize];
                if !self.set(res, value) {
                    self.queue.clear();
                    return false;
                }
            }
        }
        true
    }

    fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let x = self.trail.pop().expect("trail above mark");
            self.assign[x] = UNSET;
        }
    }

    /// Returns false when the visitor asked to stop.
    fn search(&mut self, depth: usize, visit: &mut dyn FnMut(&[usize]) -> bool) -> bool {
        let mut d = depth;
        while d < self.order.len() && self.assign[self.order[d]] != UNSET {
            d += 1;
        }
        if d == self.order.len() {
            return visit(&self.assign);
        }
        let x = self.order[d];
        for v in 0..self.search.target.size() {
            if !self.allowed(x, v) {
                continue;
            }
            let mark = self.trail.len();
            let ok = self.set(x, v) && self.propagate();
            if ok && !self.search(d + 1, visit) {
                self.undo(mark);
                return false;
            }
            self.undo(mark);
        }
        true
    }
}

/// All homomorphisms `a -> b` extending `partial` (if given), sorted by map table.
pub fn hom_enumerate(
    a: &FiniteAlgebra,
    b: &FiniteAlgebra,
    partial: Option<&[Option<usize>]>,
) -> Result<Vec<Homomorphism>> {
    let mut search = HomSearch::new(a, b)?;
    if let Some(p) = partial {
        search = search.with_partial(p)?;
    }
    search.all()
}

/// A retraction pair with `p ∘ q = id`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Retraction {
    pub q: Homomorphism,
    pub p: Homomorphism,
}

/// First `(q, p)` (q in lexicographic order) with `q: d -> a`, `p: a -> d`, `p ∘ q = id_d`.
pub fn is_retract_of(d: &FiniteAlgebra, a: &FiniteAlgebra) -> Result<Option<Retraction>> {
    for q in HomSearch::new(d, a)?.all()? {
        let mut image = q.map().to_vec();
        image.sort_unstable();
        image.dedup();
        if image.len() != d.size() {
            continue;
        }
        let mut partial = vec![None; a.size()];
        for (x, &y) in q.map().iter().enumerate() {
            partial[y] = Some(x);
        }
        if let Some(p) = HomSearch::new(a, d)?.with_partial(&partial)?.first() {
            debug_assert!(q.then(&p).is_identity());
            return Ok(Some(Retraction { q, p }));
        }
    }
    Ok(None)
}

/// Outcome of the point-separation test for `A ∈ ISP(M)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Separation {
    /// Homomorphisms into `M` separate all points.
    Separated,
    /// The first pair `a < b` identified by every homomorphism.
    Inseparable(usize, usize),
}

impl Separation {
    pub fn is_member(&self) -> bool {
        matches!(self, Separation::Separated)
    }
}

/// `A ∈ ISP(M)` iff homomorphisms `A -> M` separate points.
pub fn in_quasivariety(a: &FiniteAlgebra, m: &FiniteAlgebra) -> Result<Separation> {
    let homs = hom_enumerate(a, m, None)?;
    Ok(separation(a.size(), &homs))
}

pub(crate) fn separation(n: usize, homs: &[Homomorphism]) -> Separation {
    for x in 0..n {
        for y in x + 1..n {
            if !homs.iter().any(|h| h.apply(x) != h.apply(y)) {
                return Separation::Inseparable(x, y);
            }
        }
    }
    Separation::Separated
}
