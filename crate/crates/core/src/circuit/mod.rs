//! Bitline RC ladder with TSV parasitics, the tier temperature profile and
//! the read path built on them.

mod bitline;
mod readpath;
mod thermal;
mod transient;

pub use bitline::{build_bitline, BitlineNetwork};
pub use readpath::{
    bit_resistance, evaluate_bitline, precharge_bitline, read_path_simulate, read_voltages,
    PrechargeDrive, ReadTiming, ReadWaveform,
};
pub use thermal::{TierThermalModel, TileGeometry};
pub use transient::{
    transient_solve, transient_solve_from, DeviceLoad, LadderSolver, NodeWaveforms, SourceDrive,
};
