//! Channel constructors: the retrocorrectable family, the simplified
//! channel, reference channels, and Choi/PPT analysis.

pub mod choi;
pub mod kraus;
pub mod reference;
pub mod retro;
pub mod simplified;

pub use choi::{choi_matrix, choi_of, is_ppt, Choi};
pub use kraus::KrausChannel;
pub use retro::{
    apply_retro, sample_flag, AuditView, BasisEnsemble, ChannelSample, Flag, Ports,
    RetroChannelSpec, RetroOutput, UnitaryEnsemble, Variant,
};
pub use simplified::{
    apply_simplified, apply_simplified_joint, SimplifiedChannelSpec, SimplifiedJointOutput,
    SimplifiedOutput,
};
