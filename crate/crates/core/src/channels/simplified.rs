//! The simplified partially retrocorrectable qubit channel.
//!
//! The control qubit is measured in one of two fixed conjugate bases chosen
//! uniformly at random; one outcome per basis (the trigger) causes the data
//! qubit to be replaced by I/2. The only classical output is which basis was
//! used.

use serde::{Deserialize, Serialize};

use super::kraus::KrausChannel;
use crate::error::{Error, Result};
use crate::linalg::{apply_to_factor, Matrix};
use crate::measure::born_measure;
use crate::random::RandomStream;
use crate::states::{DensityOperator, OrthonormalBasis, StateVector, UnitaryOperator, TOL};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimplifiedChannelSpec {
    bases: [OrthonormalBasis; 2],
    triggers: [usize; 2],
}

impl Default for SimplifiedChannelSpec {
    /// Z and X bases, trigger on the second outcome of each (|1⟩ and |−⟩).
    fn default() -> Self {
        SimplifiedChannelSpec {
            bases: [
                OrthonormalBasis::computational(2),
                OrthonormalBasis::hadamard(),
            ],
            triggers: [1, 1],
        }
    }
}

impl SimplifiedChannelSpec {
    pub fn new(bases: [OrthonormalBasis; 2], triggers: [usize; 2]) -> Result<Self> {
        if bases.iter().any(|b| b.dim() != 2) {
            return Err(Error::shape("simplified channel bases must be qubit bases"));
        }
        if triggers.iter().any(|&t| t > 1) {
            return Err(Error::domain("trigger outcome must be 0 or 1"));
        }
        for a in bases[0].vectors() {
            for b in bases[1].vectors() {
                if (a.overlap(b) - 0.5).abs() > TOL {
                    return Err(Error::validity("bases are not mutually unbiased"));
                }
            }
        }
        Ok(SimplifiedChannelSpec { bases, triggers })
    }

    pub fn with_triggers(&self, triggers: [usize; 2]) -> Result<Self> {
        Self::new(self.bases.clone(), triggers)
    }

    pub fn basis(&self, b: usize) -> &OrthonormalBasis {
        &self.bases[b]
    }

    pub fn trigger(&self, b: usize) -> usize {
        self.triggers[b]
    }

    pub fn triggers(&self) -> [usize; 2] {
        self.triggers
    }

    /// Outcome of basis `b` that leaves the data intact.
    pub fn safe_outcome(&self, b: usize) -> usize {
        1 - self.triggers[b]
    }

    /// `q_b = P(no depolarization | basis b)` for a pure control state.
    pub fn pass_probability(&self, b: usize, control: &StateVector) -> f64 {
        self.bases[b].vector(self.safe_outcome(b)).overlap(control)
    }

    /// Kraus form for a fixed basis choice, input (control, data), output data.
    pub fn fixed_basis_channel(&self, b: usize) -> Result<KrausChannel> {
        let mut ops = Vec::new();
        for j in 0..2 {
            let bra = Matrix::from_vec(1, 2, self.bases[b].vector(j).conj().into_amplitudes());
            if j == self.triggers[b] {
                // replacement by I/2 via the uniform Pauli twirl
                for k in 0..4 {
                    let p = crate::linalg::pauli(k).scale_real(0.5);
                    ops.push(&p * &bra.kron(&Matrix::identity(2))?);
                }
            } else {
                ops.push(bra.kron(&Matrix::identity(2))?);
            }
        }
        KrausChannel::new(format!("simplified, basis {b}"), ops)
    }

    /// Whole channel: output (basis bit, data), basis bit block-diagonal.
    pub fn flagged_channel(&self) -> Result<KrausChannel> {
        let mut ops = Vec::new();
        for b in 0..2 {
            let mut e = Matrix::zeros(2, 1);
            e[(b, 0)] = crate::linalg::ONE;
            let e = e.scale_real(0.5f64.sqrt());
            for k in self.fixed_basis_channel(b)?.operators() {
                ops.push(e.kron(k)?);
            }
        }
        KrausChannel::new("simplified", ops)
    }
}

#[derive(Clone, Debug)]
pub struct SimplifiedOutput {
    pub basis_bit: usize,
    pub data: DensityOperator,
    /// Internal measurement result; not part of the channel output.
    pub hidden: usize,
}

impl SimplifiedOutput {
    pub fn depolarized(&self, spec: &SimplifiedChannelSpec) -> bool {
        self.hidden == spec.trigger(self.basis_bit)
    }
}

pub fn apply_simplified(
    spec: &SimplifiedChannelSpec,
    control_in: &StateVector,
    data_in: &DensityOperator,
    rng: &mut RandomStream,
) -> Result<SimplifiedOutput> {
    if control_in.dim() != 2 || data_in.dim() != 2 {
        return Err(Error::shape("simplified channel acts on qubits"));
    }
    let basis_bit = rng.index(2);
    let m = born_measure(control_in, &[2], 0, &spec.bases[basis_bit], rng)?;
    let data = if m.outcome == spec.triggers[basis_bit] {
        DensityOperator::maximally_mixed(2)
    } else {
        data_in.clone()
    };
    Ok(SimplifiedOutput {
        basis_bit,
        data,
        hidden: m.outcome,
    })
}

#[derive(Clone, Debug)]
pub struct SimplifiedJointOutput {
    pub basis_bit: usize,
    pub hidden: usize,
    pub depolarized: bool,
    pub state: StateVector,
    pub dims: Vec<usize>,
    pub data: usize,
}

/// Pure-state trajectory version acting on factors of a joint state. The
/// depolarization is unravelled as a uniformly random Pauli on the data
/// factor, which averages to replacement by I/2 jointly with any reference.
pub fn apply_simplified_joint(
    spec: &SimplifiedChannelSpec,
    joint_in: &StateVector,
    dims: &[usize],
    control: usize,
    data: usize,
    rng: &mut RandomStream,
) -> Result<SimplifiedJointOutput> {
    if control >= dims.len() || data >= dims.len() || control == data {
        return Err(Error::shape(
            "control and data ports must be distinct factors",
        ));
    }
    if dims[control] != 2 || dims[data] != 2 {
        return Err(Error::shape("simplified channel acts on qubits"));
    }
    let basis_bit = rng.index(2);
    let m = born_measure(joint_in, dims, control, &spec.bases[basis_bit], rng)?;
    let data = if data > control { data - 1 } else { data };
    let depolarized = m.outcome == spec.triggers[basis_bit];
    let state = if depolarized {
        let pauli = UnitaryOperator::pauli(rng.index(4));
        let (amps, _) = apply_to_factor(
            m.post_state.amplitudes(),
            &m.post_dims,
            data,
            pauli.matrix(),
        )?;
        StateVector::normalized(amps)?
    } else {
        m.post_state
    };
    Ok(SimplifiedJointOutput {
        basis_bit,
        hidden: m.outcome,
        depolarized,
        state,
        dims: m.post_dims,
        data,
    })
}
