//! Named tensor factors of a pure joint state.

use crate::channels::{
    apply_retro, apply_simplified_joint, ChannelSample, Ports, RetroChannelSpec,
};
use crate::channels::{SimplifiedChannelSpec, SimplifiedJointOutput};
use crate::error::{Error, Result};
use crate::linalg::{apply_to_factor, kron_vec, Matrix, C64, ONE, ZERO};
use crate::measure::born_measure;
use crate::random::RandomStream;
use crate::states::{OrthonormalBasis, StateVector};

#[derive(Clone, Debug)]
pub struct Registers {
    names: Vec<String>,
    dims: Vec<usize>,
    amps: Vec<C64>,
}

impl Default for Registers {
    fn default() -> Self {
        Self::new()
    }
}

impl Registers {
    pub fn new() -> Self {
        Registers {
            names: Vec::new(),
            dims: Vec::new(),
            amps: vec![ONE],
        }
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn index(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::shape(format!("no register named {name}")))
    }

    fn dims_or_unit(&self) -> Vec<usize> {
        if self.dims.is_empty() {
            vec![1]
        } else {
            self.dims.clone()
        }
    }

    fn state(&self) -> Result<StateVector> {
        StateVector::new(self.amps.clone())
    }

    pub fn push(&mut self, name: &str, state: &StateVector) -> Result<()> {
        if self.index(name).is_ok() {
            return Err(Error::shape(format!("register {name} already exists")));
        }
        self.amps = kron_vec(&self.amps, state.amplitudes())?;
        self.names.push(name.to_string());
        self.dims.push(state.dim());
        Ok(())
    }

    /// Appends `Φ_d = Σ|ii⟩/√d` on two new registers.
    pub fn push_pair(&mut self, a: &str, b: &str, d: usize) -> Result<()> {
        if self.index(a).is_ok() || self.index(b).is_ok() || a == b {
            return Err(Error::shape("pair registers must be new and distinct"));
        }
        self.amps = kron_vec(&self.amps, StateVector::maximally_entangled(d).amplitudes())?;
        self.names.extend([a.to_string(), b.to_string()]);
        self.dims.extend([d, d]);
        Ok(())
    }

    /// Appends a joint state on several new registers, first name most
    /// significant.
    pub fn push_joint(
        &mut self,
        names: &[&str],
        dims: &[usize],
        state: &StateVector,
    ) -> Result<()> {
        if names.len() != dims.len() || dims.iter().product::<usize>() != state.dim() {
            return Err(Error::shape(
                "register names and dims do not match the state",
            ));
        }
        for (k, n) in names.iter().enumerate() {
            if self.index(n).is_ok() || names[..k].contains(n) {
                return Err(Error::shape(format!("register {n} already exists")));
            }
        }
        self.amps = kron_vec(&self.amps, state.amplitudes())?;
        self.names.extend(names.iter().map(|n| n.to_string()));
        self.dims.extend_from_slice(dims);
        Ok(())
    }

    pub fn rename(&mut self, old: &str, new: &str) -> Result<()> {
        let k = self.index(old)?;
        self.names[k] = new.to_string();
        Ok(())
    }

    pub fn apply(&mut self, name: &str, op: &Matrix) -> Result<()> {
        let k = self.index(name)?;
        if op.rows() != op.cols() {
            return Err(Error::shape("register operations must be square"));
        }
        let (amps, _) = apply_to_factor(&self.amps, &self.dims, k, op)?;
        self.amps = amps;
        Ok(())
    }

    /// Projective measurement; the register is removed.
    pub fn measure(
        &mut self,
        name: &str,
        basis: &OrthonormalBasis,
        rng: &mut RandomStream,
    ) -> Result<usize> {
        let k = self.index(name)?;
        let m = born_measure(&self.state()?, &self.dims, k, basis, rng)?;
        self.amps = m.post_state.into_amplitudes();
        self.names.remove(k);
        self.dims.remove(k);
        Ok(m.outcome)
    }

    /// Feeds two registers into one channel use; the control register is
    /// consumed and the data register keeps its name.
    pub fn feed_retro(
        &mut self,
        spec: &RetroChannelSpec,
        sample: ChannelSample,
        control: &str,
        data: &str,
        rng: &mut RandomStream,
    ) -> Result<ChannelSample> {
        let ports = Ports {
            control: self.index(control)?,
            data: self.index(data)?,
        };
        let out = apply_retro(spec, sample, &self.state()?, &self.dims, ports, rng)?;
        self.amps = out.state.into_amplitudes();
        self.names.remove(ports.control);
        self.dims.remove(ports.control);
        Ok(out.sample)
    }

    pub fn feed_simplified(
        &mut self,
        spec: &SimplifiedChannelSpec,
        control: &str,
        data: &str,
        rng: &mut RandomStream,
    ) -> Result<SimplifiedJointOutput> {
        let c = self.index(control)?;
        let d = self.index(data)?;
        let out = apply_simplified_joint(spec, &self.state()?, &self.dims, c, d, rng)?;
        self.amps = out.state.amplitudes().to_vec();
        self.names.remove(c);
        self.dims.remove(c);
        Ok(out)
    }

    /// `⟨Φ_d| ρ_ab |Φ_d⟩` for two registers of equal dimension.
    pub fn pair_fidelity(&self, a: &str, b: &str) -> Result<f64> {
        let (ia, ib) = (self.index(a)?, self.index(b)?);
        let d = self.dims[ia];
        if self.dims[ib] != d || ia == ib {
            return Err(Error::shape(
                "fidelity needs two distinct registers of equal dimension",
            ));
        }
        let dims = self.dims_or_unit();
        let mut strides = vec![1usize; dims.len()];
        for k in (0..dims.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * dims[k + 1];
        }
        // contract ⟨Φ| on (a, b); the remainder is indexed by the flat index
        // with both digits zeroed
        let mut rest = vec![ZERO; self.amps.len()];
        let scale = 1.0 / (d as f64).sqrt();
        for (idx, z) in self.amps.iter().enumerate() {
            let da = (idx / strides[ia]) % d;
            let db = (idx / strides[ib]) % d;
            if da == db {
                rest[idx - da * strides[ia] - db * strides[ib]] += z * scale;
            }
        }
        Ok(rest.iter().map(|z| z.norm_sqr()).sum::<f64>().min(1.0))
    }

    /// Measures the only two remaining registers jointly, `first` as the
    /// more significant factor.
    pub fn measure_joint(
        &mut self,
        first: &str,
        second: &str,
        basis: &OrthonormalBasis,
        rng: &mut RandomStream,
    ) -> Result<usize> {
        if self.names.len() != 2 {
            return Err(Error::shape(
                "joint measurement expects exactly two registers left",
            ));
        }
        let (i, j) = (self.index(first)?, self.index(second)?);
        if i == j {
            return Err(Error::shape("joint measurement needs two registers"));
        }
        let mut amps = self.amps.clone();
        if i == 1 {
            let (d0, d1) = (self.dims[0], self.dims[1]);
            amps = (0..d0 * d1)
                .map(|k| self.amps[(k % d0) * d1 + k / d0])
                .collect();
        }
        let outcome =
            born_measure(&StateVector::new(amps)?, &[basis.dim()], 0, basis, rng)?.outcome;
        *self = Registers::new();
        Ok(outcome)
    }
}
