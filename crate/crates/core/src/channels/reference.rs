//! Textbook channels used as witnesses in the capacity ladder.

use super::kraus::KrausChannel;
use crate::error::{Error, Result};
use crate::linalg::{pauli, Matrix, ONE};

fn check_probability(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::domain(format!("probability {p} outside [0, 1]")));
    }
    Ok(())
}

pub fn identity_qudit(d: usize) -> KrausChannel {
    KrausChannel::new(format!("identity-{d}"), vec![Matrix::identity(d)]).expect("identity is CPTP")
}

/// 100% dephasing qubit channel.
pub fn classical_bit() -> KrausChannel {
    let ops = (0..2)
        .map(|k| {
            let mut m = Matrix::zeros(2, 2);
            m[(k, k)] = ONE;
            m
        })
        .collect();
    KrausChannel::new("classical-bit", ops).expect("projective measurement is CPTP")
}

/// Full computational-basis dephasing of a qubit; the same map as
/// [`classical_bit`].
pub fn dephasing() -> KrausChannel {
    let ops = classical_bit().operators().to_vec();
    KrausChannel::new("dephasing", ops).expect("projective measurement is CPTP")
}

/// `ρ ↦ (1 − p) ρ + p I/2` on a qubit.
pub fn depolarizing(p: f64) -> Result<KrausChannel> {
    check_probability(p)?;
    let mut ops = vec![pauli(0).scale_real((1.0 - 0.75 * p).sqrt())];
    for k in 1..4 {
        ops.push(pauli(k).scale_real((p / 4.0).sqrt()));
    }
    KrausChannel::new(format!("depolarizing-{p}"), ops)
}

/// Qudit erasure: with probability `p` the output is the flag state `|d⟩`
/// of a (d+1)-dimensional output space.
pub fn erasure_qudit(d: usize, p: f64) -> Result<KrausChannel> {
    check_probability(p)?;
    let mut ops = Vec::with_capacity(d + 1);
    let mut keep = Matrix::zeros(d + 1, d);
    for i in 0..d {
        keep[(i, i)] = ONE;
    }
    ops.push(keep.scale_real((1.0 - p).sqrt()));
    for i in 0..d {
        let mut e = Matrix::zeros(d + 1, d);
        e[(d, i)] = ONE;
        ops.push(e.scale_real(p.sqrt()));
    }
    KrausChannel::new(format!("erasure-{d}-{p}"), ops)
}

pub fn erasure(p: f64) -> Result<KrausChannel> {
    erasure_qudit(2, p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{haar_vector, RandomStream};
    use crate::states::{DensityOperator, StateVector};

    #[test]
    fn depolarizing_zero_is_identity() {
        let chan = depolarizing(0.0).unwrap();
        let mut rng = RandomStream::new(1);
        for _ in 0..20 {
            let rho = haar_vector(2, &mut rng).projector();
            assert!(
                chan.apply(&rho)
                    .unwrap()
                    .matrix()
                    .max_abs_diff(rho.matrix())
                    < 1e-15
            );
        }
    }

    #[test]
    fn full_erasure_outputs_flag() {
        let chan = erasure(1.0).unwrap();
        assert_eq!(chan.output_dim(), 3);
        let mut rng = RandomStream::new(2);
        let flag = StateVector::basis(3, 2).projector();
        for _ in 0..20 {
            let rho = haar_vector(2, &mut rng).projector();
            assert!(
                chan.apply(&rho)
                    .unwrap()
                    .matrix()
                    .max_abs_diff(flag.matrix())
                    < 1e-15
            );
        }
    }

    #[test]
    fn half_depolarizing_on_zero() {
        let out = depolarizing(0.5)
            .unwrap()
            .apply(&StateVector::basis(2, 0).projector())
            .unwrap();
        let expected = DensityOperator::new(Matrix::diagonal(&[0.75, 0.25])).unwrap();
        assert!(out.matrix().max_abs_diff(expected.matrix()) < 1e-15);
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(depolarizing(1.5), Err(Error::Domain(_))));
        assert!(matches!(erasure(-0.1), Err(Error::Domain(_))));
    }

    #[test]
    fn all_reference_channels_preserve_trace() {
        let chans = vec![
            identity_qudit(2),
            classical_bit(),
            dephasing(),
            depolarizing(0.3).unwrap(),
            erasure(0.4).unwrap(),
        ];
        let mut rng = RandomStream::new(3);
        for chan in &chans {
            for _ in 0..1000 {
                let rho = haar_vector(2, &mut rng).projector();
                let tr = chan.apply(&rho).unwrap().matrix().trace();
                assert!(
                    (tr.re - 1.0).abs() < 1e-10 && tr.im.abs() < 1e-10,
                    "{}",
                    chan.label()
                );
            }
        }
    }
}
