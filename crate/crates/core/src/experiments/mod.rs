//! Reproduction harness: device calibration, write sweeps, the PVT read
//! table, variation margins and Monte Carlo waveform averages.

pub mod calibrate;
pub mod fig3;
pub mod sweep;
pub mod tables;
pub mod waveforms;

pub use calibrate::{
    calibrate_device, latency_errors, macrospin_estimate, macrospin_integral, CalibrationReport,
    CalibrationSettings, FitLevel, LatencyProbe, LatencyTarget,
};
pub use fig3::{calibrated, energy_anchor, latency_targets};
pub use sweep::{
    cell_energy, fit_rp_to_energy, sweep_write, write_point, WriteEnergyModel, WritePoint,
    SWEEP_VOLTAGES,
};
pub use tables::{energy_ratios, margin_table, pvt_read_table, MarginModels, MarginRow, PvtRow};
pub use waveforms::{
    average_waveforms, mc_waveform_average, read_trial_waveform, trial_waveform,
    write_trial_waveform, WaveGrid, WavePath,
};
