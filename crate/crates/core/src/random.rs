//! Seeded random streams and Haar-distributed samplers.
//!
//! A [`RandomStream`] is ChaCha8 keyed by the 64-bit seed with the ChaCha
//! stream word used as the sub-stream id. Sub-streams are therefore derived
//! purely from `(seed, id)`, and a batch that owns stream `id` draws the
//! same numbers no matter which worker runs it or in what order.

use std::f64::consts::FRAC_1_SQRT_2;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{Matrix, C64, ZERO};
use crate::states::{OrthonormalBasis, StateVector, UnitaryOperator};

#[derive(Clone, Debug)]
pub struct RandomStream {
    seed: u64,
    stream: u64,
    rng: ChaCha8Rng,
}

impl RandomStream {
    pub fn new(seed: u64) -> Self {
        Self::with_stream(seed, 0)
    }

    pub fn with_stream(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        RandomStream { seed, stream, rng }
    }

    /// Fresh stream keyed by the same seed and the given id. Does not depend
    /// on how much of `self` has been consumed.
    pub fn substream(&self, id: u64) -> Self {
        Self::with_stream(self.seed, id)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream
    }

    /// Number of 32-bit words consumed so far.
    pub fn word_position(&self) -> u128 {
        self.rng.get_word_pos()
    }

    /// Uniform on [0, 1).
    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    pub fn gaussian(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    /// Circular complex Gaussian with `E|z|² = 1`.
    pub fn complex_gaussian(&mut self) -> C64 {
        let re = self.gaussian();
        let im = self.gaussian();
        C64::new(re * FRAC_1_SQRT_2, im * FRAC_1_SQRT_2)
    }

    /// Uniform index in `0..n`.
    pub fn index(&mut self, n: usize) -> usize {
        self.rng.random_range(0..n)
    }

    pub fn bit(&mut self) -> bool {
        self.rng.random::<bool>()
    }

    /// Samples an index from a discrete distribution by inversion. The weights
    /// are assumed to sum to one; residual mass goes to the last index with
    /// non-zero weight.
    pub fn categorical(&mut self, weights: &[f64]) -> usize {
        let u = self.uniform();
        let mut acc = 0.0;
        let mut last = 0;
        for (k, &w) in weights.iter().enumerate() {
            if w <= 0.0 {
                continue;
            }
            last = k;
            acc += w;
            if u < acc {
                return k;
            }
        }
        last
    }
}

impl RngCore for RandomStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

/// Haar-random unitary: complex Gaussian matrix, Householder QR, then the
/// columns of Q are rephased by `R_kk / |R_kk|` so that the distribution is
/// exactly the Haar measure.
pub fn haar_unitary(dim: usize, rng: &mut RandomStream) -> UnitaryOperator {
    assert!(dim >= 1, "dimension must be positive");
    let mut a = Matrix::from_fn(dim, dim, |_, _| rng.complex_gaussian());
    let mut q = Matrix::identity(dim);
    let mut r_diag = vec![ZERO; dim];

    for k in 0..dim {
        let norm: f64 = (k..dim).map(|i| a[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        let x0 = a[(k, k)];
        let phase = if x0.norm() > 0.0 {
            x0 / x0.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        let alpha = -phase * norm;
        r_diag[k] = alpha;
        let mut v: Vec<C64> = (k..dim).map(|i| a[(i, k)]).collect();
        v[0] -= alpha;
        let vnorm: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vnorm == 0.0 {
            continue;
        }
        // A ← (I − 2vv†/v†v) A on rows k..
        for j in k..dim {
            let dot: C64 = v
                .iter()
                .enumerate()
                .map(|(t, vi)| vi.conj() * a[(k + t, j)])
                .sum();
            let f = dot * (2.0 / vnorm);
            for (t, vi) in v.iter().enumerate() {
                a[(k + t, j)] -= vi * f;
            }
        }
        // Q ← Q (I − 2vv†/v†v) on columns k..
        for i in 0..dim {
            let dot: C64 = v.iter().enumerate().map(|(t, vi)| q[(i, k + t)] * vi).sum();
            let f = dot * (2.0 / vnorm);
            for (t, vi) in v.iter().enumerate() {
                q[(i, k + t)] -= f * vi.conj();
            }
        }
    }

    let phases: Vec<C64> = r_diag
        .iter()
        .map(|&r| {
            if r.norm() > 0.0 {
                r / r.norm()
            } else {
                C64::new(1.0, 0.0)
            }
        })
        .collect();
    let u = Matrix::from_fn(dim, dim, |i, j| q[(i, j)] * phases[j]);
    UnitaryOperator::new_unchecked(u)
}

/// Columns of a Haar unitary.
pub fn haar_basis(dim: usize, rng: &mut RandomStream) -> OrthonormalBasis {
    OrthonormalBasis::from_unitary_columns(&haar_unitary(dim, rng))
}

/// Uniformly random unit vector (normalised complex Gaussian), which has the
/// same law as `U|ψ⟩` for Haar `U` and any fixed `ψ`.
pub fn haar_vector(dim: usize, rng: &mut RandomStream) -> StateVector {
    loop {
        let amps: Vec<C64> = (0..dim).map(|_| rng.complex_gaussian()).collect();
        if let Ok(v) = StateVector::normalized(amps) {
            return v;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::inner;

    #[test]
    fn equal_seeds_equal_sequences() {
        let mut a = RandomStream::new(42);
        let mut b = RandomStream::new(42);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
        let ua = haar_unitary(4, &mut RandomStream::new(9));
        let ub = haar_unitary(4, &mut RandomStream::new(9));
        assert_eq!(ua.matrix(), ub.matrix());
    }

    #[test]
    fn substreams_ignore_parent_position() {
        let mut parent = RandomStream::new(5);
        let before = parent.substream(3).next_u64();
        parent.next_u64();
        parent.next_u64();
        assert_eq!(parent.substream(3).next_u64(), before);
        assert_ne!(parent.substream(4).next_u64(), before);
    }

    #[test]
    fn known_first_draw_is_stable() {
        // pins the ChaCha8 key schedule so a dependency bump that changes
        // the stream cannot go unnoticed
        assert_eq!(
            RandomStream::with_stream(0, 0).next_u64(),
            13080132717333068652
        );
        assert_ne!(
            RandomStream::with_stream(0, 0).next_u64(),
            RandomStream::with_stream(0, 1).next_u64()
        );
    }

    #[test]
    fn dim_one_is_a_phase() {
        let mut rng = RandomStream::new(1);
        for _ in 0..20 {
            let u = haar_unitary(1, &mut rng);
            assert!((u.matrix()[(0, 0)].norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn haar_unitaries_are_unitary() {
        let mut rng = RandomStream::new(2);
        for dim in [2, 3, 5, 8, 16, 64] {
            let u = haar_unitary(dim, &mut rng);
            assert!(u.matrix().is_unitary(1e-10), "dim {dim}");
        }
    }

    #[test]
    fn haar_vectors_normalised() {
        let mut rng = RandomStream::new(3);
        let v = haar_vector(7, &mut rng);
        assert!((inner(v.amplitudes(), v.amplitudes()).re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn categorical_respects_support() {
        let mut rng = RandomStream::new(4);
        for _ in 0..1000 {
            let k = rng.categorical(&[0.0, 0.3, 0.0, 0.7]);
            assert!(k == 1 || k == 3);
        }
        assert_eq!(rng.categorical(&[0.0, 1.0]), 1);
    }
}
