//! Entropy functionals in bits.

use crate::eigen::eigvalsh;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::states::DensityOperator;

/// Eigenvalues in `[-CLAMP_TOL, 0)` are treated as zero.
pub const CLAMP_TOL: f64 = 1e-10;
/// Eigenvalues below `-NEGATIVE_TOL` make a spectrum invalid.
pub const NEGATIVE_TOL: f64 = 1e-8;

/// `-Σ λ log₂ λ` with `0 log 0 = 0`.
pub fn spectrum_entropy(values: &[f64]) -> Result<f64> {
    let mut s = 0.0;
    for &l in values {
        if l < -NEGATIVE_TOL {
            return Err(Error::validity(format!(
                "negative eigenvalue {l} in entropy"
            )));
        }
        if l > 0.0 {
            s -= l * l.log2();
        }
    }
    Ok(s.max(0.0))
}

/// Von Neumann entropy of a density operator.
pub fn entropy_bits(rho: &DensityOperator) -> Result<f64> {
    hermitian_entropy(rho.matrix())
}

/// Entropy of a PSD unit-trace matrix that has not been wrapped as a
/// [`DensityOperator`] (e.g. Gram matrices of weighted pure states).
pub fn hermitian_entropy(m: &Matrix) -> Result<f64> {
    let values = eigvalsh(m)?;
    let dim = values.len() as f64;
    let s = spectrum_entropy(&values)?;
    // rounding can push a maximally mixed spectrum a hair above log2(dim)
    Ok(s.min(dim.log2()))
}

pub fn binary_entropy(x: f64) -> Result<f64> {
    if !(-1e-12..=1.0 + 1e-12).contains(&x) || x.is_nan() {
        return Err(Error::domain(format!(
            "binary entropy argument {x} outside [0, 1]"
        )));
    }
    let x = x.clamp(0.0, 1.0);
    Ok(h2(x))
}

/// Unchecked `h₂` for hot loops; `x` must already lie in `[0, 1]`.
#[inline]
pub fn h2(x: f64) -> f64 {
    let mut s = 0.0;
    if x > 0.0 {
        s -= x * x.log2();
    }
    let y = 1.0 - x;
    if y > 0.0 {
        s -= y * y.log2();
    }
    s
}

/// Eigenvalues `(λ₊, λ₋)` of `p|ψ⟩⟨ψ| + (1−p)|χ⟩⟨χ|` with `|⟨ψ|χ⟩|² = F`.
pub fn mixture_two_pure_eigs(p: f64, overlap: f64) -> Result<(f64, f64)> {
    for (name, v) in [("p", p), ("F", overlap)] {
        if !(-1e-12..=1.0 + 1e-12).contains(&v) || v.is_nan() {
            return Err(Error::domain(format!("{name} = {v} outside [0, 1]")));
        }
    }
    Ok(two_pure_eigs(p.clamp(0.0, 1.0), overlap.clamp(0.0, 1.0)))
}

#[inline]
pub(crate) fn two_pure_eigs(p: f64, overlap: f64) -> (f64, f64) {
    let disc = (1.0 - 4.0 * p * (1.0 - p) * (1.0 - overlap)).max(0.0);
    let root = disc.sqrt();
    let plus = 0.5 * (1.0 + root);
    // 1 − λ₊ loses precision when λ₋ is tiny; use λ₊λ₋ = p(1−p)(1−F)
    let minus = if plus > 0.0 {
        p * (1.0 - p) * (1.0 - overlap) / plus
    } else {
        0.0
    };
    (plus, minus)
}

/// Entropy of a two-pure-state mixture via the closed-form spectrum.
#[inline]
pub fn two_pure_entropy(p: f64, overlap: f64) -> f64 {
    let (a, b) = two_pure_eigs(p, overlap);
    let mut s = 0.0;
    if a > 0.0 {
        s -= a * a.log2();
    }
    if b > 0.0 {
        s -= b * b.log2();
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{Matrix, C64};
    use crate::random::{haar_vector, RandomStream};
    use crate::states::StateVector;
    use proptest::prelude::*;

    #[test]
    fn maximally_mixed_qubit_has_one_bit() {
        let s = entropy_bits(&DensityOperator::maximally_mixed(2)).unwrap();
        assert!((s - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pure_state_has_zero_entropy() {
        let mut rng = RandomStream::new(1);
        let psi = haar_vector(5, &mut rng);
        assert!(entropy_bits(&psi.projector()).unwrap().abs() < 1e-9);
    }

    #[test]
    fn diagonal_quarter_three_quarters() {
        let rho = DensityOperator::new(Matrix::diagonal(&[0.25, 0.75])).unwrap();
        // -Σ λ log₂ λ evaluated by hand: 0.5 + 0.75·log₂(4/3)
        let expected = 0.25 * 2.0 + 0.75 * (4.0f64 / 3.0).log2();
        assert!((entropy_bits(&rho).unwrap() - expected).abs() < 1e-12);
        assert!((expected - 0.811278).abs() < 1e-6);
    }

    #[test]
    fn binary_entropy_values() {
        assert_eq!(binary_entropy(0.5).unwrap(), 1.0);
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        assert!((binary_entropy(0.25).unwrap() - 0.811278).abs() < 1e-6);
        assert!(matches!(binary_entropy(1.1), Err(Error::Domain(_))));
        assert!(matches!(binary_entropy(-0.01), Err(Error::Domain(_))));
    }

    #[test]
    fn negative_spectrum_rejected() {
        assert!(spectrum_entropy(&[1.1, -0.1]).is_err());
        assert!(spectrum_entropy(&[1.0 + 1e-11, -1e-11]).is_ok());
    }

    #[test]
    fn mixture_eigs_examples() {
        assert_eq!(mixture_two_pure_eigs(0.5, 0.0).unwrap(), (0.5, 0.5));
        for p in [0.0, 0.3, 1.0] {
            let (a, b) = mixture_two_pure_eigs(p, 1.0).unwrap();
            assert!((a - 1.0).abs() < 1e-15 && b.abs() < 1e-15);
        }
        // explicit 2×2 eigendecomposition of 0.25|0⟩⟨0| + 0.75|χ⟩⟨χ|, |⟨0|χ⟩|² = 0.5
        let chi = StateVector::qubit_xz(std::f64::consts::FRAC_PI_2);
        let m = &StateVector::basis(2, 0)
            .projector()
            .matrix()
            .scale_real(0.25)
            + &chi.projector().matrix().scale_real(0.75);
        let ev = eigvalsh(&m).unwrap();
        let (a, b) = mixture_two_pure_eigs(0.25, 0.5).unwrap();
        assert!((a - ev[1]).abs() < 1e-12 && (b - ev[0]).abs() < 1e-12);
        assert!((a - 0.895285).abs() < 1e-6 && (b - 0.104715).abs() < 1e-6);
        assert!(mixture_two_pure_eigs(1.5, 0.5).is_err());
    }

    #[test]
    fn closed_form_matches_eigensolver_on_random_mixtures() {
        let mut rng = RandomStream::new(77);
        for _ in 0..1000 {
            let psi = haar_vector(2, &mut rng);
            let chi = haar_vector(2, &mut rng);
            let p = rng.uniform();
            let f = psi.overlap(&chi);
            let m = &psi.projector().matrix().scale(C64::new(p, 0.0))
                + &chi.projector().matrix().scale(C64::new(1.0 - p, 0.0));
            let ev = eigvalsh(&m).unwrap();
            let (a, b) = mixture_two_pure_eigs(p, f).unwrap();
            assert!((a - ev[1]).abs() < 1e-10 && (b - ev[0]).abs() < 1e-10);
        }
    }

    proptest! {
        #[test]
        fn entropy_is_additive_on_products(seed in any::<u64>(), da in 1usize..4, db in 1usize..4) {
            let mut rng = RandomStream::new(seed);
            let rand_rho = |d: usize, rng: &mut RandomStream| {
                let g = Matrix::from_fn(d, d, |_, _| rng.complex_gaussian());
                let m = &g * &g.adjoint();
                let tr = m.trace().re;
                DensityOperator::new(m.scale_real(1.0 / tr).hermitian_part()).unwrap()
            };
            let a = rand_rho(da, &mut rng);
            let b = rand_rho(db, &mut rng);
            let joint = entropy_bits(&a.tensor(&b).unwrap()).unwrap();
            let sum = entropy_bits(&a).unwrap() + entropy_bits(&b).unwrap();
            prop_assert!((joint - sum).abs() < 1e-8);
        }

        #[test]
        fn binary_entropy_symmetric(x in 0.0f64..=1.0) {
            let a = binary_entropy(x).unwrap();
            let b = binary_entropy(1.0 - x).unwrap();
            prop_assert!((a - b).abs() < 1e-12);
            prop_assert!((0.0..=1.0).contains(&a));
        }

        #[test]
        fn mixture_eigs_sum_to_one(p in 0.0f64..=1.0, f in 0.0f64..=1.0) {
            let (a, b) = mixture_two_pure_eigs(p, f).unwrap();
            prop_assert!((a + b - 1.0).abs() < 1e-12);
            prop_assert!(a >= b && b >= 0.0);
        }
    }
}
