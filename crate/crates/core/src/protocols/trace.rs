//! Structured event logs of protocol runs.

use serde::{Deserialize, Serialize};

use super::ledger::ResourceLedger;
use crate::channels::Flag;
use crate::linalg::Matrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Party {
    Alice,
    Bob,
    Verifier,
}

/// Forward is sender to receiver (Alice to Bob).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    Forward,
    Backward,
}

/// Content-free summary of a flag: a fingerprint of the matrices plus the
/// ensemble positions when finite.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlagSummary {
    pub fingerprint: u64,
    pub basis_index: Option<usize>,
    pub unitary_index: Option<usize>,
}

fn fnv(hash: &mut u64, m: &Matrix) {
    for z in m.data() {
        for x in [z.re, z.im] {
            for byte in x.to_bits().to_le_bytes() {
                *hash ^= byte as u64;
                *hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
            }
        }
    }
}

impl FlagSummary {
    pub fn of(flag: &Flag) -> Self {
        let mut h = 0xcbf2_9ce4_8422_2325u64;
        fnv(&mut h, flag.basis.to_unitary().matrix());
        for u in &flag.unitaries {
            fnv(&mut h, u.matrix());
        }
        FlagSummary {
            fingerprint: h,
            basis_index: flag.basis_index,
            unitary_index: flag.unitary_index,
        }
    }

    /// Fingerprint of the basis alone.
    pub fn basis_only(flag: &Flag) -> Self {
        let mut h = 0xcbf2_9ce4_8422_2325u64;
        fnv(&mut h, flag.basis.to_unitary().matrix());
        FlagSummary {
            fingerprint: h,
            basis_index: flag.basis_index,
            unitary_index: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Payload {
    /// Description of the control-measurement basis.
    Basis {
        flag: FlagSummary,
    },
    /// Which of two fixed bases was used.
    BasisBit {
        bit: usize,
    },
    /// Echo-measurement outcome.
    Outcome {
        j: usize,
    },
    ErasureFlag {
        erased: bool,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "kebab-case")]
pub enum Event {
    Prepare {
        party: Party,
        registers: Vec<String>,
        state: String,
    },
    ChannelUse {
        index: usize,
        control: String,
        data: String,
        flag: Option<FlagSummary>,
    },
    Message {
        direction: Direction,
        payload: Payload,
        bits: Option<u64>,
    },
    Operation {
        party: Party,
        register: String,
        operation: String,
    },
    Measurement {
        party: Party,
        register: String,
        basis: String,
        outcome: usize,
    },
    /// Entanglement or transmission accounting not visible as a message.
    Resources {
        ebits_consumed: u64,
        ebits_produced: u64,
        qubits_transmitted: u64,
        cbits_transmitted: u64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FigureOfMerit {
    EntanglementFidelity { fidelity: f64 },
    BitErrors { errors: u64, bits: u64 },
    Erasure { erased: bool, missed: bool },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolTrace {
    pub protocol: String,
    pub trial: usize,
    pub seed: u64,
    pub events: Vec<Event>,
    pub figure_of_merit: Option<FigureOfMerit>,
}

impl ProtocolTrace {
    pub fn new(protocol: impl Into<String>, trial: usize, seed: u64) -> Self {
        ProtocolTrace {
            protocol: protocol.into(),
            trial,
            seed,
            events: Vec::new(),
            figure_of_merit: None,
        }
    }

    pub fn push(&mut self, e: Event) {
        self.events.push(e);
    }

    pub fn message(&mut self, direction: Direction, payload: Payload, bits: Option<u64>) {
        self.push(Event::Message {
            direction,
            payload,
            bits,
        });
    }

    /// The classical side conversation, in order.
    pub fn side_messages(&self) -> Vec<&Event> {
        self.events
            .iter()
            .filter(|e| matches!(e, Event::Message { .. }))
            .collect()
    }

    /// Ledger derived from the events.
    pub fn ledger(&self) -> ResourceLedger {
        let mut l = ResourceLedger::zero();
        for e in &self.events {
            match e {
                Event::ChannelUse { .. } => l.channel_uses += 1,
                Event::Message {
                    direction, bits, ..
                } => match direction {
                    Direction::Forward => {
                        l.forward_messages += 1;
                        l.forward_bits = l.forward_bits.zip(*bits).map(|(a, b)| a + b);
                    }
                    Direction::Backward => {
                        l.backward_messages += 1;
                        l.backward_bits = l.backward_bits.zip(*bits).map(|(a, b)| a + b);
                    }
                },
                Event::Resources {
                    ebits_consumed,
                    ebits_produced,
                    qubits_transmitted,
                    cbits_transmitted,
                } => {
                    l.ebits_consumed += ebits_consumed;
                    l.ebits_produced += ebits_produced;
                    l.qubits_transmitted += qubits_transmitted;
                    l.cbits_transmitted += cbits_transmitted;
                }
                _ => {}
            }
        }
        l
    }
}

/// True when two runs had the same side conversation.
pub fn same_side_conversation(a: &ProtocolTrace, b: &ProtocolTrace) -> bool {
    a.side_messages() == b.side_messages()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ledger_counts_events() {
        let mut t = ProtocolTrace::new("t", 0, 0);
        t.push(Event::ChannelUse {
            index: 0,
            control: "c".into(),
            data: "d".into(),
            flag: None,
        });
        t.message(Direction::Backward, Payload::BasisBit { bit: 1 }, Some(1));
        t.message(Direction::Forward, Payload::Outcome { j: 0 }, Some(1));
        t.push(Event::Resources {
            ebits_consumed: 0,
            ebits_produced: 1,
            qubits_transmitted: 0,
            cbits_transmitted: 0,
        });
        let l = t.ledger();
        assert_eq!(l.channel_uses, 1);
        assert_eq!((l.forward_messages, l.backward_messages), (1, 1));
        assert_eq!((l.forward_bits, l.backward_bits), (Some(1), Some(1)));
        assert_eq!(l.ebits_produced, 1);
    }

    #[test]
    fn serde_round_trip() {
        let mut t = ProtocolTrace::new("t", 3, 9);
        t.message(
            Direction::Forward,
            Payload::ErasureFlag { erased: true },
            Some(1),
        );
        t.figure_of_merit = Some(FigureOfMerit::BitErrors { errors: 0, bits: 1 });
        let json = serde_json::to_string(&t).unwrap();
        let back: ProtocolTrace = serde_json::from_str(&json).unwrap();
        assert_eq!(back, t);
        assert!(json.contains("\"event\":\"message\""));
    }
}
