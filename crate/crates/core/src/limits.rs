/// Search and construction bounds.
///
/// These are configuration rather than constants; every verdict that depends
/// on them echoes them back (see the CLI reports).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Limits {
    /// Largest carrier of an algebra built with explicit operation tables.
    pub max_carrier: usize,
    /// Largest number of maps a single search is allowed to enumerate.
    pub max_results: usize,
    /// Largest ambient power (number of points) scanned by closure-system enumeration.
    pub max_ambient: usize,
    /// Largest number of coordinates of a subpower (e.g. `|M|^k` for free algebras).
    pub max_width: usize,
    /// Largest number of cells of a clone-entailment search (`|M|^|s|`).
    pub max_cells: usize,
    /// Largest dual algebra `E(X)` built explicitly with operation tables.
    pub max_dual: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_carrier: 64,
            max_results: 100_000,
            max_ambient: 64,
            max_width: 4096,
            max_cells: 4096,
            max_dual: 2048,
        }
    }
}

impl Limits {
    pub fn with_max_carrier(mut self, n: usize) -> Self {
        self.max_carrier = n;
        self
    }

    pub fn with_max_results(mut self, n: usize) -> Self {
        self.max_results = n;
        self
    }
}

/// `base^exp`, saturating at `u128::MAX`.
pub(crate) fn checked_pow(base: usize, exp: usize) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.saturating_mul(base as u128);
    }
    acc
}
