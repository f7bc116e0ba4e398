use std::iter::Sum;
use std::ops::Add;

use serde::{Deserialize, Serialize};

/// Resources used or produced by a protocol run.
///
/// Message bit counts are `None` when a message carries a continuous
/// description (Haar flags) and so has no finite price.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResourceLedger {
    pub channel_uses: u64,
    pub forward_messages: u64,
    pub forward_bits: Option<u64>,
    pub backward_messages: u64,
    pub backward_bits: Option<u64>,
    pub ebits_consumed: u64,
    pub ebits_produced: u64,
    pub qubits_transmitted: u64,
    pub cbits_transmitted: u64,
}

impl ResourceLedger {
    /// The empty ledger (zero of the addition).
    pub fn zero() -> Self {
        ResourceLedger {
            forward_bits: Some(0),
            backward_bits: Some(0),
            ..Default::default()
        }
    }

    pub fn side_messages(&self) -> u64 {
        self.forward_messages + self.backward_messages
    }

    /// Ledger of `n` independent repetitions.
    pub fn times(&self, n: u64) -> Self {
        if n == 0 {
            return Self::zero();
        }
        ResourceLedger {
            channel_uses: self.channel_uses * n,
            forward_messages: self.forward_messages * n,
            forward_bits: self.forward_bits.map(|b| b * n),
            backward_messages: self.backward_messages * n,
            backward_bits: self.backward_bits.map(|b| b * n),
            ebits_consumed: self.ebits_consumed * n,
            ebits_produced: self.ebits_produced * n,
            qubits_transmitted: self.qubits_transmitted * n,
            cbits_transmitted: self.cbits_transmitted * n,
        }
    }
}

fn add_bits(a: Option<u64>, b: Option<u64>) -> Option<u64> {
    Some(a? + b?)
}

impl Add for ResourceLedger {
    type Output = ResourceLedger;

    fn add(self, o: ResourceLedger) -> ResourceLedger {
        ResourceLedger {
            channel_uses: self.channel_uses + o.channel_uses,
            forward_messages: self.forward_messages + o.forward_messages,
            forward_bits: add_bits(self.forward_bits, o.forward_bits),
            backward_messages: self.backward_messages + o.backward_messages,
            backward_bits: add_bits(self.backward_bits, o.backward_bits),
            ebits_consumed: self.ebits_consumed + o.ebits_consumed,
            ebits_produced: self.ebits_produced + o.ebits_produced,
            qubits_transmitted: self.qubits_transmitted + o.qubits_transmitted,
            cbits_transmitted: self.cbits_transmitted + o.cbits_transmitted,
        }
    }
}

impl Sum for ResourceLedger {
    fn sum<I: Iterator<Item = ResourceLedger>>(iter: I) -> Self {
        iter.fold(ResourceLedger::zero(), Add::add)
    }
}
