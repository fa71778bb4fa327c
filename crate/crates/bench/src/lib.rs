//! Shared fixtures for the criterion benchmarks.

use std::sync::Arc;

use dualwork::algebra::power;
use dualwork::catalog::{load_catalog, Catalog};
use dualwork::{AlterEgo, FiniteAlgebra, Limits, Relation};

pub struct Fixtures {
    pub catalog: Catalog,
    pub limits: Limits,
}

impl Fixtures {
    pub fn new() -> Self {
        Fixtures {
            catalog: load_catalog().expect("built-in catalog loads"),
            limits: Limits::default(),
        }
    }

    pub fn algebra(&self, id: &str) -> Arc<FiniteAlgebra> {
        self.catalog.algebra(id).expect("catalog algebra")
    }

    pub fn ego(&self, id: &str) -> Arc<AlterEgo> {
        self.catalog.ego(id).expect("catalog ego")
    }

    /// `m^k` as a plain algebra, for hom-search sources.
    pub fn power_of(&self, id: &str, k: usize) -> FiniteAlgebra {
        power(&self.algebra(id), k, &self.limits).expect("power fits the limits")
    }

    /// The order of the `n`-chain.
    pub fn chain_order(n: usize) -> Relation {
        let tuples = (0..n).flat_map(|i| (i..n).map(move |j| vec![i, j]));
        Relation::new(2, tuples).expect("a binary relation")
    }
}

impl Default for Fixtures {
    fn default() -> Self {
        Self::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_load() {
        let f = Fixtures::new();
        assert_eq!(f.power_of("chain2", 3).size(), 8);
        assert_eq!(Fixtures::chain_order(3).len(), 6);
        assert_eq!(f.ego("threeT").over().size(), 3);
    }
}
