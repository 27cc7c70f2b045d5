//! Small dense integer matrices with exact arithmetic.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::structure::BinaryMatrix;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct IntMatrix {
    n: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(n: usize) -> Self {
        IntMatrix {
            n,
            entries: vec![BigInt::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.entries[i * n + i] = BigInt::one();
        }
        m
    }

    /// Row-major entries; panics unless there are exactly `n * n`.
    pub fn from_entries(n: usize, entries: Vec<BigInt>) -> Self {
        assert_eq!(entries.len(), n * n, "entry count must be n^2");
        IntMatrix { n, entries }
    }

    pub fn from_binary(b: &BinaryMatrix) -> Self {
        let n = b.n();
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.entries[i * n + j] = BigInt::from(b.get(i, j));
            }
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.n + j]
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.entries
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.entries[i * n + j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, other: &IntMatrix) -> IntMatrix {
        IntMatrix {
            n: self.n,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    /// `self + c·I`
    pub fn add_diagonal(&self, c: &BigInt) -> IntMatrix {
        let mut out = self.clone();
        for i in 0..self.n {
            out.entries[i * self.n + i] += c;
        }
        out
    }

    pub fn scale(&self, c: &BigInt) -> IntMatrix {
        IntMatrix {
            n: self.n,
            entries: self.entries.iter().map(|a| a * c).collect(),
        }
    }

    pub fn trace(&self) -> BigInt {
        (0..self.n).map(|i| self.get(i, i).clone()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    pub fn all_positive(&self) -> bool {
        self.entries.iter().all(Signed::is_positive)
    }

    /// Rank over the rationals by fraction-free (Bareiss) elimination.
    pub fn rank(&self) -> usize {
        let n = self.n;
        let mut a: Vec<Vec<BigInt>> = (0..n)
            .map(|i| self.entries[i * n..(i + 1) * n].to_vec())
            .collect();
        let mut rank = 0;
        let mut prev_pivot = BigInt::one();
        for col in 0..n {
            let Some(p) = (rank..n).find(|&r| !a[r][col].is_zero()) else {
                continue;
            };
            a.swap(rank, p);
            let pivot = a[rank][col].clone();
            for r in rank + 1..n {
                let factor = a[r][col].clone();
                for c in col..n {
                    let value = (&pivot * &a[r][c] - &factor * &a[rank][c]) / &prev_pivot;
                    a[r][c] = value;
                }
            }
            prev_pivot = pivot;
            rank += 1;
        }
        rank
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> IntMatrix {
        let n = rows.len();
        let mut out = IntMatrix::zeros(n);
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                out.entries[i * n + j] = BigInt::from(v);
            }
        }
        out
    }

    #[test]
    fn bareiss_rank() {
        assert_eq!(m(&[&[1, 2], &[2, 4]]).rank(), 1);
        assert_eq!(m(&[&[0, 1, 1], &[1, 0, 1], &[1, 1, 0]]).rank(), 3);
        assert_eq!(m(&[&[0, 0, 0], &[0, 0, 0], &[0, 0, 0]]).rank(), 0);
        assert_eq!(m(&[&[2, 4, 1], &[1, 2, 3], &[3, 6, 4]]).rank(), 2);
        // Column swap needed: first column is zero.
        assert_eq!(m(&[&[0, 3, 1], &[0, 6, 2], &[0, 1, 5]]).rank(), 2);
    }

    #[test]
    fn products_and_traces() {
        let a = m(&[&[0, 1], &[1, 0]]);
        let sq = a.mul(&a);
        assert_eq!(sq, IntMatrix::identity(2));
        assert_eq!(sq.trace(), BigInt::from(2));
        assert_eq!(a.add_diagonal(&BigInt::from(3)), m(&[&[3, 1], &[1, 3]]));
        assert!(a.add(&a.scale(&BigInt::from(-1))).is_zero());
        assert!(!a.all_positive());
    }
}
