//! One-shot capacity estimators.

pub mod ea;
pub mod holevo;
pub mod montecarlo;
pub mod retro_mc;
pub mod simplified;
pub mod trend;

pub use ea::{ea_mutual_info, maximize_ea, AscentConfig, EaResult};
pub use holevo::{holevo_chi, holevo_chi_retro, Ensemble};
pub use montecarlo::{run_batched, Estimate, McRun, BATCH_SIZE};
pub use retro_mc::{
    coherent_info_retro, coherent_info_retro_mc, holevo_retro, holevo_retro_mc, EntropyPath,
    FlagSampler, RetroMcOptions,
};
pub use simplified::{simplified_chi, simplified_chi_mc, simplified_chi_scan, ChiScan};
pub use trend::{trend_c, trend_csv, trend_scan, TrendRow};
