//! Bit-packed square matrices over GF(2), at most 64 × 64.
//!
//! Row i is a word whose bit j holds entry (i, j). This is the hot-loop
//! representation for orbit scans over F_2.

use crate::gf2k::{FiniteField, Gf2k};
use crate::linalg::Mat;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitMat<const N: usize> {
    rows: [u64; N],
}

impl<const N: usize> BitMat<N> {
    pub const fn zero() -> Self {
        BitMat { rows: [0; N] }
    }

    pub fn identity() -> Self {
        let mut rows = [0u64; N];
        for (i, r) in rows.iter_mut().enumerate() {
            *r = 1 << i;
        }
        BitMat { rows }
    }

    pub fn from_rows(rows: [u64; N]) -> Self {
        BitMat { rows }
    }

    pub fn rows(&self) -> &[u64; N] {
        &self.rows
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.rows[i] >> j & 1 == 1
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(|&r| r == 0)
    }

    #[inline]
    pub fn add(&self, other: &Self) -> Self {
        let mut rows = self.rows;
        for (r, o) in rows.iter_mut().zip(&other.rows) {
            *r ^= o;
        }
        BitMat { rows }
    }

    /// Row i of the product is the XOR of rows k of `other` with a_ik = 1.
    #[inline]
    pub fn mul(&self, other: &Self) -> Self {
        let mut rows = [0u64; N];
        for (out, &a) in rows.iter_mut().zip(&self.rows) {
            let mut bits = a;
            let mut acc = 0u64;
            while bits != 0 {
                let k = bits.trailing_zeros() as usize;
                acc ^= other.rows[k];
                bits &= bits - 1;
            }
            *out = acc;
        }
        BitMat { rows }
    }

    pub fn is_nilpotent(&self) -> bool {
        let mut p = *self;
        let mut e = 1usize;
        while e < N {
            if p.is_zero() {
                return true;
            }
            p = p.mul(&p);
            e *= 2;
        }
        p.is_zero()
    }

    pub fn rank(&self) -> usize {
        let mut rows = self.rows;
        let mut rank = 0;
        for col in 0..64 {
            let Some(p) = (rank..N).find(|&i| rows[i] >> col & 1 == 1) else {
                continue;
            };
            rows.swap(rank, p);
            let pivot = rows[rank];
            for (i, r) in rows.iter_mut().enumerate() {
                if i != rank && *r >> col & 1 == 1 {
                    *r ^= pivot;
                }
            }
            rank += 1;
            if rank == N {
                break;
            }
        }
        rank
    }

    /// Packs into a single key (N·N ≤ 128 required).
    pub fn key(&self) -> u128 {
        assert!(N * N <= 128);
        let mut k = 0u128;
        for &r in &self.rows {
            k = (k << N) | r as u128;
        }
        k
    }

    pub fn to_mat(&self) -> Mat<Gf2k<1>> {
        Mat::from_fn(N, N, |i, j| Gf2k::<1>::from_bits(self.get(i, j) as u32))
    }

    pub fn from_mat(m: &Mat<Gf2k<1>>) -> Self {
        assert_eq!((m.rows(), m.cols()), (N, N));
        let mut rows = [0u64; N];
        for (i, r) in rows.iter_mut().enumerate() {
            for j in 0..N {
                if m[(i, j)].bits() == 1 {
                    *r |= 1 << j;
                }
            }
        }
        BitMat { rows }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn agrees_with_dense_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..500 {
            let a = BitMat::<6>::from_rows(std::array::from_fn(|_| rng.random_range(0..64)));
            let b = BitMat::<6>::from_rows(std::array::from_fn(|_| rng.random_range(0..64)));
            let (da, db) = (a.to_mat(), b.to_mat());
            assert_eq!(a.mul(&b).to_mat(), &da * &db);
            assert_eq!(a.add(&b).to_mat(), &da + &db);
            assert_eq!(a.rank(), da.rank());
            assert_eq!(a.is_nilpotent(), da.is_nilpotent());
            assert_eq!(BitMat::from_mat(&da), a);
        }
        assert_eq!(BitMat::<4>::identity().rank(), 4);
        assert!(BitMat::<4>::zero().is_nilpotent());
    }
}
