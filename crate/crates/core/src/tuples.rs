//! Mixed-radix helpers shared by tables, powers and relation scans.

/// Odometer over `{0..base}^len` in lexicographic order.
#[derive(Debug, Clone)]
pub struct Tuples {
    base: usize,
    current: Vec<usize>,
    done: bool,
}

impl Tuples {
    pub fn new(base: usize, len: usize) -> Self {
        Tuples {
            base,
            current: vec![0; len],
            done: base == 0 && len > 0,
        }
    }
}

impl Iterator for Tuples {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.current.clone();
        // advance
        let mut i = self.current.len();
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            self.current[i] += 1;
            if self.current[i] < self.base {
                break;
            }
            self.current[i] = 0;
        }
        Some(out)
    }
}

/// Row-major index of `args` in `{0..base}^args.len()`.
#[inline]
pub fn encode(base: usize, args: &[usize]) -> usize {
    args.iter().fold(0, |acc, &a| acc * base + a)
}

/// Inverse of [`encode`].
pub fn decode(base: usize, len: usize, mut index: usize) -> Vec<usize> {
    let mut out = vec![0; len];
    for slot in out.iter_mut().rev() {
        *slot = index % base;
        index /= base;
    }
    out
}

/// Advance `tuple` to its lexicographic successor in `{0..base}^len`; false on wrap-around.
pub fn advance(tuple: &mut [usize], base: usize) -> bool {
    for i in (0..tuple.len()).rev() {
        tuple[i] += 1;
        if tuple[i] < base {
            return true;
        }
        tuple[i] = 0;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn odometer_is_lexicographic() {
        let all: Vec<_> = Tuples::new(2, 2).collect();
        assert_eq!(all, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
        assert_eq!(Tuples::new(3, 0).count(), 1);
        assert_eq!(Tuples::new(0, 2).count(), 0);
    }

    #[test]
    fn encode_decode_inverse() {
        for (i, t) in Tuples::new(3, 3).enumerate() {
            assert_eq!(encode(3, &t), i);
            assert_eq!(decode(3, 3, i), t);
        }
    }
}
