//! Closure systems on at most 64 points given by Horn rules, with
//! NextClosure enumeration of all closed sets.

use crate::error::{Error, Result};

/// Horn rules `premises -> conclusion` over points `0..n` (`n <= 64`).
#[derive(Debug, Clone)]
pub struct ClosureSystem {
    n: usize,
    base: u64,
    rules: Vec<(u64, u8)>,
}

impl ClosureSystem {
    pub fn new(n: usize) -> Result<Self> {
        if n > 64 {
            return Err(Error::size("closure-system points", n as u128, 64));
        }
        Ok(ClosureSystem {
            n,
            base: 0,
            rules: Vec::new(),
        })
    }

    pub fn points(&self) -> usize {
        self.n
    }

    /// Adds `premises -> conclusion`; trivial rules are dropped.
    pub fn add_rule(&mut self, premises: &[usize], conclusion: usize) {
        let mask = premises.iter().fold(0u64, |m, &p| m | bit(p));
        if mask & bit(conclusion) != 0 {
            return;
        }
        if mask == 0 {
            self.base |= bit(conclusion);
        } else {
            self.rules.push((mask, conclusion as u8));
        }
    }

    pub fn close(&self, mut set: u64) -> u64 {
        set |= self.base;
        loop {
            let before = set;
            for &(prem, c) in &self.rules {
                if prem & !set == 0 {
                    set |= 1u64 << c;
                }
            }
            if set == before {
                return set;
            }
        }
    }

    pub fn is_closed(&self, set: u64) -> bool {
        self.close(set) == set
    }

    /// All closed subsets of `within` (itself assumed closed), in lectic
    /// order, stopping after `max_count` sets. The flag reports truncation.
    pub fn enumerate_within(&self, within: u64, max_count: usize) -> (Vec<u64>, bool) {
        let mut out = Vec::new();
        let mut current = self.close(0);
        if current & !within != 0 {
            return (out, false);
        }
        let points: Vec<usize> = (0..self.n).filter(|&i| within & bit(i) != 0).collect();
        loop {
            if out.len() == max_count {
                return (out, true);
            }
            out.push(current);
            let mut next = None;
            for &i in points.iter().rev() {
                if current & bit(i) != 0 {
                    continue;
                }
                let below = bit(i) - 1;
                let candidate = self.close((current & below) | bit(i));
                if candidate & below == current & below {
                    next = Some(candidate);
                    break;
                }
            }
            match next {
                Some(c) => current = c,
                None => return (out, false),
            }
        }
    }
}

#[inline]
pub(crate) fn bit(i: usize) -> u64 {
    1u64 << i
}

/// Members of a mask in increasing order.
pub fn members(mask: u64) -> Vec<usize> {
    (0..64).filter(|&i| mask & bit(i) != 0).collect()
}

pub fn mask_of(points: &[usize]) -> u64 {
    points.iter().fold(0, |m, &p| m | bit(p))
}

/// Order of sets used throughout: by size, then lexicographically by sorted members.
pub fn canonical_key(mask: u64) -> (u32, Vec<usize>) {
    (mask.count_ones(), members(mask))
}
