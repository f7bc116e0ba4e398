//! Retrocorrectable quantum channels: construction, one-shot capacity
//! estimates, echo-assisted protocols and the capacity ladder.

pub mod channels;
pub mod eigen;
pub mod entropy;
pub mod error;
pub mod estimators;
pub mod ladder;
pub mod linalg;
pub mod measure;
pub mod protocols;
pub mod random;
pub mod report;
pub mod states;

pub use channels::{KrausChannel, RetroChannelSpec, SimplifiedChannelSpec, Variant};
pub use error::{Error, Result};
pub use estimators::{Ensemble, Estimate};
pub use ladder::{build_ladder, check_ladder, Relation, TolerancePolicy};
pub use protocols::{ProtocolTrace, ResourceLedger};
pub use random::RandomStream;
pub use report::{CapacityKind, CapacityReport, EntryTag, ReportEntry};
pub use states::{DensityOperator, OrthonormalBasis, StateVector, UnitaryOperator};
