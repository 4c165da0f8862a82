//! Behavioral peripheral circuits: sense amplifiers, precharge and
//! equalization drivers, write drivers and the corner read table.

mod corners;
mod precharge;
mod sense;
mod write_driver;

pub use corners::{Corner, ReadTable, ReadTables, CORNERS};
pub use precharge::{
    disturbance_free_window, precharge_waveform, residual_differential, PdVariant, PrechargeEqModel,
};
pub use sense::{sense_decision, SaVariant, SenseAmpModel, SenseResult};
pub use write_driver::{
    driver_energy, driver_self_energy, write_pulse, DriverEnergy, DriverLoad, WdVariant,
    WriteDriverModel,
};
