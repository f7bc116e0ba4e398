//! Two-party protocols over the retro and simplified channels.

pub mod dephased;
pub mod echo;
pub mod erasure;
pub mod ledger;
pub mod registers;
pub mod runner;
pub mod trace;

pub use dephased::{run_dephased_c2, run_dephased_c2_with, DephasedOptions, DephasedRun};
pub use echo::{
    compose_2cbits_3s_back, compose_2cbits_3s_back_with, compose_qubit_2s_back,
    compose_qubit_2s_back_with, run_fig2, run_fig2_with, run_fig3, run_fig3_with, run_fig4,
    run_fig4_with, ProtocolRun, SuperdenseRun,
};
pub use erasure::{
    erasure_conversion_mes, erasure_conversion_mes_with, flagged_rate, optimize_flagged_rate,
    ErasureRun, FlaggedOptimum,
};
pub use ledger::ResourceLedger;
pub use runner::{
    AuditSummary, EchoBasis, FidelityStats, ProtocolOptions, ReferenceCorrection, FIDELITY_TOL,
};
pub use trace::{Direction, Event, FigureOfMerit, FlagSummary, Party, Payload, ProtocolTrace};
