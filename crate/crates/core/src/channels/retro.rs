//! The standard retrocorrectable channel R_{c,d} and its dephased variant.
//!
//! A use of the channel draws a flag θ = (B, U_1..U_c), measures the control
//! input in B with outcome j, and applies U_j to the data input. The flag is
//! emitted as a classical control output; j is kept inside the channel.

use serde::{Deserialize, Serialize};

use super::kraus::KrausChannel;
use crate::error::{Error, Result};
use crate::linalg::{apply_to_factor, Matrix, MAX_DIM};
use crate::measure::{born_measure, measure_in_place};
use crate::random::{haar_basis, haar_unitary, RandomStream};
use crate::states::{OrthonormalBasis, StateVector, UnitaryOperator};

/// Largest control or data dimension accepted by the explicit channel.
pub const MAX_FACTOR_DIM: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    Standard,
    /// Data input is dephased in the computational basis before the
    /// conditional unitary.
    Dephased,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum BasisEnsemble {
    Haar,
    Finite(Vec<OrthonormalBasis>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum UnitaryEnsemble {
    Haar,
    /// Each entry is a full tuple `(U_1, …, U_c)`.
    Finite(Vec<Vec<UnitaryOperator>>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RetroChannelSpec {
    c: usize,
    d: usize,
    variant: Variant,
    bases: BasisEnsemble,
    unitaries: UnitaryEnsemble,
}

impl RetroChannelSpec {
    pub fn new(
        c: usize,
        d: usize,
        variant: Variant,
        bases: BasisEnsemble,
        unitaries: UnitaryEnsemble,
    ) -> Result<Self> {
        if c < 2 || d < 2 {
            return Err(Error::domain(format!("need c, d >= 2 (got c={c}, d={d})")));
        }
        if let BasisEnsemble::Finite(list) = &bases {
            if list.is_empty() {
                return Err(Error::validity("finite basis ensemble is empty"));
            }
            if list.iter().any(|b| b.dim() != c) {
                return Err(Error::shape("basis ensemble members must have dimension c"));
            }
        }
        if let UnitaryEnsemble::Finite(list) = &unitaries {
            if list.is_empty() {
                return Err(Error::validity("finite unitary ensemble is empty"));
            }
            for tuple in list {
                if tuple.len() != c {
                    return Err(Error::shape(
                        "each unitary tuple must hold exactly c unitaries",
                    ));
                }
                if tuple.iter().any(|u| u.dim() != d) {
                    return Err(Error::shape("unitaries must act on dimension d"));
                }
            }
        }
        Ok(RetroChannelSpec {
            c,
            d,
            variant,
            bases,
            unitaries,
        })
    }

    /// Haar flags.
    pub fn standard(c: usize, d: usize) -> Result<Self> {
        Self::new(
            c,
            d,
            Variant::Standard,
            BasisEnsemble::Haar,
            UnitaryEnsemble::Haar,
        )
    }

    pub fn dephased(c: usize, d: usize) -> Result<Self> {
        Self::new(
            c,
            d,
            Variant::Dephased,
            BasisEnsemble::Haar,
            UnitaryEnsemble::Haar,
        )
    }

    /// Same channel with every `U_j` replaced by the identity.
    pub fn with_identity_unitaries(&self) -> Self {
        let tuple = vec![UnitaryOperator::identity(self.d); self.c];
        RetroChannelSpec {
            unitaries: UnitaryEnsemble::Finite(vec![tuple]),
            ..self.clone()
        }
    }

    pub fn with_bases(&self, bases: BasisEnsemble) -> Result<Self> {
        Self::new(self.c, self.d, self.variant, bases, self.unitaries.clone())
    }

    pub fn with_unitaries(&self, unitaries: UnitaryEnsemble) -> Result<Self> {
        Self::new(self.c, self.d, self.variant, self.bases.clone(), unitaries)
    }

    /// Smallest finite discretisation of R_{2,2}: bases {Z, X} and all
    /// ordered pairs of Pauli unitaries.
    pub fn pauli_discretization(variant: Variant) -> Self {
        let bases = vec![
            OrthonormalBasis::computational(2),
            OrthonormalBasis::hadamard(),
        ];
        let mut tuples = Vec::with_capacity(16);
        for a in 0..4 {
            for b in 0..4 {
                tuples.push(vec![UnitaryOperator::pauli(a), UnitaryOperator::pauli(b)]);
            }
        }
        RetroChannelSpec {
            c: 2,
            d: 2,
            variant,
            bases: BasisEnsemble::Finite(bases),
            unitaries: UnitaryEnsemble::Finite(tuples),
        }
    }

    pub fn c(&self) -> usize {
        self.c
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn bases(&self) -> &BasisEnsemble {
        &self.bases
    }

    pub fn unitaries(&self) -> &UnitaryEnsemble {
        &self.unitaries
    }

    pub fn is_finite(&self) -> bool {
        matches!(self.bases, BasisEnsemble::Finite(_))
            && matches!(self.unitaries, UnitaryEnsemble::Finite(_))
    }

    /// Number of distinct flags when both ensembles are finite.
    pub fn flag_count(&self) -> Option<usize> {
        match (&self.bases, &self.unitaries) {
            (BasisEnsemble::Finite(b), UnitaryEnsemble::Finite(u)) => Some(b.len() * u.len()),
            _ => None,
        }
    }

    /// Bits needed to name the basis part / the unitary part of a flag, when
    /// that part is drawn from a finite list.
    pub fn flag_bits(&self) -> (Option<u32>, Option<u32>) {
        let bits = |n: usize| (n as f64).log2().ceil() as u32;
        let b = match &self.bases {
            BasisEnsemble::Finite(l) => Some(bits(l.len())),
            BasisEnsemble::Haar => None,
        };
        let u = match &self.unitaries {
            UnitaryEnsemble::Finite(l) => Some(bits(l.len())),
            UnitaryEnsemble::Haar => None,
        };
        (b, u)
    }

    fn check_explicit(&self) -> Result<()> {
        let big = self.c.max(self.d);
        if big > MAX_FACTOR_DIM {
            return Err(Error::Size {
                dim: big,
                max: MAX_FACTOR_DIM,
            });
        }
        Ok(())
    }

    /// Every flag of a finite spec with its probability.
    pub fn enumerate_flags(&self) -> Result<Vec<(f64, Flag)>> {
        let (bases, tuples) = match (&self.bases, &self.unitaries) {
            (BasisEnsemble::Finite(b), UnitaryEnsemble::Finite(u)) => (b, u),
            _ => return Err(Error::UnsupportedRepresentation(
                "Haar flag ensembles have no finite enumeration; use the Monte Carlo estimators"
                    .into(),
            )),
        };
        let w = 1.0 / (bases.len() * tuples.len()) as f64;
        let mut out = Vec::with_capacity(bases.len() * tuples.len());
        for (bi, b) in bases.iter().enumerate() {
            for (ui, t) in tuples.iter().enumerate() {
                out.push((
                    w,
                    Flag {
                        basis: b.clone(),
                        unitaries: t.clone(),
                        basis_index: Some(bi),
                        unitary_index: Some(ui),
                    },
                ));
            }
        }
        Ok(out)
    }

    /// Kraus form of the channel for one fixed flag, input ordered
    /// (control, data), output = data.
    pub fn fixed_flag_channel(&self, flag: &Flag) -> Result<KrausChannel> {
        self.check_explicit()?;
        let (c, d) = (self.c, self.d);
        let mut ops = Vec::new();
        for j in 0..c {
            let bra = Matrix::from_vec(1, c, flag.basis.vector(j).conj().into_amplitudes());
            let u = flag.unitaries[j].matrix();
            match self.variant {
                Variant::Standard => {
                    ops.push(u * &bra.kron(&Matrix::identity(d))?);
                }
                Variant::Dephased => {
                    for k in 0..d {
                        let mut ek = Matrix::zeros(1, d);
                        ek[(0, k)] = crate::linalg::ONE;
                        let proj = &ek.adjoint() * &ek;
                        ops.push(u * &bra.kron(&proj)?);
                    }
                }
            }
        }
        KrausChannel::new(format!("R_{{{c},{d}}} fixed flag"), ops)
    }

    /// Whole channel for a finite spec: input (control, data), output
    /// (flag register, data) with the flag block-diagonal.
    pub fn flagged_channel(&self) -> Result<KrausChannel> {
        let flags = self.enumerate_flags()?;
        let n = flags.len();
        if n * self.d > MAX_DIM {
            return Err(Error::Size {
                dim: n * self.d,
                max: MAX_DIM,
            });
        }
        let mut ops = Vec::new();
        for (t, (w, flag)) in flags.iter().enumerate() {
            let mut e = Matrix::zeros(n, 1);
            e[(t, 0)] = crate::linalg::ONE;
            let e = e.scale_real(w.sqrt());
            for k in self.fixed_flag_channel(flag)?.operators() {
                ops.push(e.kron(k)?);
            }
        }
        let label = match self.variant {
            Variant::Standard => format!("R_{{{},{}}} finite flags", self.c, self.d),
            Variant::Dephased => format!("dephased R_{{{},{}}} finite flags", self.c, self.d),
        };
        KrausChannel::new(label, ops)
    }
}

/// The protocol-visible classical control output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Flag {
    pub basis: OrthonormalBasis,
    pub unitaries: Vec<UnitaryOperator>,
    /// Positions in the finite ensembles, when applicable.
    pub basis_index: Option<usize>,
    pub unitary_index: Option<usize>,
}

/// One drawn flag plus the hidden outcome once the channel has acted.
#[derive(Clone, Debug)]
pub struct ChannelSample {
    flag: Flag,
    hidden: Option<usize>,
}

/// Verification-only view onto what the channel keeps to itself.
#[derive(Clone, Copy, Debug)]
pub struct AuditView<'a> {
    sample: &'a ChannelSample,
}

impl AuditView<'_> {
    pub fn hidden_outcome(&self) -> Option<usize> {
        self.sample.hidden
    }
}

impl ChannelSample {
    pub fn new(flag: Flag) -> Self {
        ChannelSample { flag, hidden: None }
    }

    /// What the parties are allowed to see.
    pub fn flag(&self) -> &Flag {
        &self.flag
    }

    pub fn audit(&self) -> AuditView<'_> {
        AuditView { sample: self }
    }
}

pub fn sample_flag(spec: &RetroChannelSpec, rng: &mut RandomStream) -> Result<ChannelSample> {
    spec.check_explicit()?;
    let (basis, basis_index) = match &spec.bases {
        BasisEnsemble::Haar => (haar_basis(spec.c, rng), None),
        BasisEnsemble::Finite(list) => {
            let k = rng.index(list.len());
            (list[k].clone(), Some(k))
        }
    };
    let (unitaries, unitary_index) = match &spec.unitaries {
        UnitaryEnsemble::Haar => (
            (0..spec.c).map(|_| haar_unitary(spec.d, rng)).collect(),
            None,
        ),
        UnitaryEnsemble::Finite(list) => {
            let k = rng.index(list.len());
            (list[k].clone(), Some(k))
        }
    };
    Ok(ChannelSample::new(Flag {
        basis,
        unitaries,
        basis_index,
        unitary_index,
    }))
}

/// Which tensor factors of a joint input feed the channel.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Ports {
    pub control: usize,
    pub data: usize,
}

#[derive(Clone, Debug)]
pub struct RetroOutput {
    pub state: StateVector,
    /// Factor dims after the control factor has been consumed.
    pub dims: Vec<usize>,
    /// Index of the data factor in `dims`.
    pub data: usize,
    pub sample: ChannelSample,
}

/// Applies one channel use to a pure joint state. The control factor is
/// measured and removed; the data factor receives `U_j`; other factors are
/// untouched. For the dephased variant the data dephasing is unravelled as a
/// computational-basis measurement whose record is discarded, which gives
/// the exact channel on average over trajectories.
pub fn apply_retro(
    spec: &RetroChannelSpec,
    sample: ChannelSample,
    joint_in: &StateVector,
    dims: &[usize],
    ports: Ports,
    rng: &mut RandomStream,
) -> Result<RetroOutput> {
    if ports.control >= dims.len() || ports.data >= dims.len() || ports.control == ports.data {
        return Err(Error::shape(
            "control and data ports must be distinct factors",
        ));
    }
    if dims[ports.control] != spec.c || dims[ports.data] != spec.d {
        return Err(Error::shape(format!(
            "ports have dims ({}, {}), channel expects ({}, {})",
            dims[ports.control], dims[ports.data], spec.c, spec.d
        )));
    }
    let mut state = joint_in.clone();
    if spec.variant == Variant::Dephased {
        let z = OrthonormalBasis::computational(spec.d);
        state = measure_in_place(&state, dims, ports.data, &z, rng)?.1;
    }
    let m = born_measure(&state, dims, ports.control, &sample.flag.basis, rng)?;
    let data = if ports.data > ports.control {
        ports.data - 1
    } else {
        ports.data
    };
    let (amps, out_dims) = apply_to_factor(
        m.post_state.amplitudes(),
        &m.post_dims,
        data,
        sample.flag.unitaries[m.outcome].matrix(),
    )?;
    let mut sample = sample;
    sample.hidden = Some(m.outcome);
    Ok(RetroOutput {
        state: StateVector::normalized(amps)?,
        dims: out_dims,
        data,
        sample,
    })
}
