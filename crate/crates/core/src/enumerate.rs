//! Deterministic enumeration of a countable dense subset of `Y`.
//!
//! Level `s = 1, 2, ...` lists every vector supported on the first `s`
//! coordinates (degree `< s` for polynomials) whose coefficients lie in
//! `{-s, ..., s} / s`. Vectors already produced at an earlier level are
//! skipped, the zero vector never appears.

use std::collections::HashSet;

use crate::space::{Scalar, Space, Vector};

/// Number of vectors in the standard candidate set for adjoint probes.
pub const STANDARD_CANDIDATES: usize = 10;

#[derive(Debug, Clone)]
pub struct DenseEnumeration {
    space: Space,
    level: usize,
    digits: Vec<usize>,
    seen: HashSet<Vec<u64>>,
}

/// Digit `d` at level `s` maps to `0, 1/s, -1/s, 2/s, -2/s, ...`.
fn digit_value(d: usize, s: usize) -> f64 {
    if d == 0 {
        return 0.0;
    }
    let mag = d.div_ceil(2) as f64;
    if d % 2 == 1 {
        mag / s as f64
    } else {
        -mag / s as f64
    }
}

impl DenseEnumeration {
    pub fn new(space: Space) -> Self {
        DenseEnumeration {
            space,
            level: 1,
            digits: vec![0],
            seen: HashSet::new(),
        }
    }

    /// Advances the odometer; the first coordinate turns fastest.
    fn step(&mut self) {
        let radix = 2 * self.level + 1;
        for d in self.digits.iter_mut() {
            *d += 1;
            if *d < radix {
                return;
            }
            *d = 0;
        }
        self.level += 1;
        self.digits = vec![0; self.level];
    }
}

impl Iterator for DenseEnumeration {
    type Item = Vector;

    fn next(&mut self) -> Option<Vector> {
        loop {
            self.step();
            let s = self.level;
            let values: Vec<f64> = self.digits.iter().map(|&d| digit_value(d, s)).collect();
            let mut key: Vec<u64> = values.iter().map(|v| v.to_bits()).collect();
            while key.last() == Some(&0.0f64.to_bits()) {
                key.pop();
            }
            if key.is_empty() || !self.seen.insert(key) {
                continue;
            }
            let coeffs = values.iter().map(|&v| Scalar::new(v, 0.0)).collect();
            return Vector::new(self.space, coeffs).ok();
        }
    }
}

pub fn canonical_enumeration(space: Space) -> DenseEnumeration {
    DenseEnumeration::new(space)
}

/// The first `count` vectors of the canonical enumeration.
pub fn canonical_samples(space: Space, count: usize) -> Vec<Vector> {
    canonical_enumeration(space).take(count).collect()
}

pub fn standard_candidates(space: Space) -> Vec<Vector> {
    canonical_samples(space, STANDARD_CANDIDATES)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn starts_with_units() {
        let s = Space::lp(2.0).unwrap();
        let v = canonical_samples(s, 4);
        let re = |v: &Vector| v.coeffs().iter().map(|c| c.re).collect::<Vec<_>>();
        assert_eq!(re(&v[0]), vec![1.0]);
        assert_eq!(re(&v[1]), vec![-1.0]);
        assert_eq!(re(&v[2]), vec![0.5]);
        assert_eq!(re(&v[3]), vec![-0.5]);
    }

    #[test]
    fn no_duplicates_no_zero() {
        let s = Space::C0;
        let v = canonical_samples(s, 500);
        assert_eq!(v.len(), 500);
        let mut keys = HashSet::new();
        for x in &v {
            assert!(!x.is_zero());
            let key: Vec<u64> = x.coeffs().iter().map(|c| c.re.to_bits()).collect();
            assert!(keys.insert(key));
        }
    }

    #[test]
    fn deterministic() {
        let s = Space::poly(0.0, 1.0).unwrap();
        assert_eq!(canonical_samples(s, 50), canonical_samples(s, 50));
    }
}
