use std::collections::{BTreeSet, HashSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::tuples::Tuples;

/// A finitary relation on `{0..carrier}`, stored as a sorted tuple set.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Relation {
    arity: usize,
    tuples: BTreeSet<Vec<usize>>,
}

impl Relation {
    pub fn new<I>(arity: usize, tuples: I) -> Result<Self>
    where
        I: IntoIterator<Item = Vec<usize>>,
    {
        let mut set = BTreeSet::new();
        for t in tuples {
            if t.len() != arity {
                return Err(Error::ArityMismatch {
                    expected: arity,
                    found: t.len(),
                });
            }
            set.insert(t);
        }
        Ok(Relation { arity, tuples: set })
    }

    /// Builds a relation and checks every entry lies below `carrier`.
    pub fn on_carrier<I>(carrier: usize, arity: usize, tuples: I) -> Result<Self>
    where
        I: IntoIterator<Item = Vec<usize>>,
    {
        let r = Relation::new(arity, tuples)?;
        if let Some(bad) = r.tuples.iter().flatten().find(|&&v| v >= carrier) {
            return Err(Error::invalid(format!(
                "value {bad} exceeds carrier {carrier}"
            )));
        }
        Ok(r)
    }

    pub fn empty(arity: usize) -> Self {
        Relation {
            arity,
            tuples: BTreeSet::new(),
        }
    }

    /// `M^arity`.
    pub fn full(carrier: usize, arity: usize) -> Self {
        Relation {
            arity,
            tuples: Tuples::new(carrier, arity).collect(),
        }
    }

    /// The diagonal `{(x,..,x)}` of the given arity.
    pub fn diagonal(carrier: usize, arity: usize) -> Self {
        Relation {
            arity,
            tuples: (0..carrier).map(|x| vec![x; arity]).collect(),
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn contains(&self, t: &[usize]) -> bool {
        self.tuples.contains(t)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Vec<usize>> {
        self.tuples.iter()
    }

    pub fn tuples(&self) -> &BTreeSet<Vec<usize>> {
        &self.tuples
    }

    pub fn is_subset(&self, other: &Relation) -> bool {
        self.arity == other.arity && self.tuples.is_subset(&other.tuples)
    }

    /// Largest entry plus one (0 for the empty relation).
    pub fn max_value_bound(&self) -> usize {
        self.tuples.iter().flatten().map(|&v| v + 1).max().unwrap_or(0)
    }

    /// Hash set view used by the search engines.
    pub fn to_hash_set(&self) -> HashSet<Vec<usize>> {
        self.tuples.iter().cloned().collect()
    }
}

impl fmt::Debug for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Relation/{}{{", self.arity)?;
        for (i, t) in self.tuples.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "(")?;
            for (j, v) in t.iter().enumerate() {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{v}")?;
            }
            write!(f, ")")?;
        }
        write!(f, "}}")
    }
}

/// Membership test specialised for small carriers: a dense bitmap when
/// `carrier^arity` is modest, a hash set otherwise.
#[derive(Debug, Clone)]
pub(crate) struct RelationIndex {
    carrier: usize,
    dense: Option<Vec<bool>>,
    sparse: HashSet<Vec<usize>>,
}

impl RelationIndex {
    pub(crate) fn new(carrier: usize, rel: &Relation) -> Self {
        let cells = crate::limits::checked_pow(carrier, rel.arity());
        if cells <= (1 << 20) {
            let mut dense = vec![false; cells as usize];
            for t in rel.iter() {
                dense[crate::tuples::encode(carrier, t)] = true;
            }
            RelationIndex {
                carrier,
                dense: Some(dense),
                sparse: HashSet::new(),
            }
        } else {
            RelationIndex {
                carrier,
                dense: None,
                sparse: rel.to_hash_set(),
            }
        }
    }

    #[inline]
    pub(crate) fn contains(&self, t: &[usize]) -> bool {
        match &self.dense {
            Some(d) => d[crate::tuples::encode(self.carrier, t)],
            None => self.sparse.contains(t),
        }
    }
}
