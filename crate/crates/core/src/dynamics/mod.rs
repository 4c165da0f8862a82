//! Macrospin dynamics of the antiferromagnetic junction and its
//! single-layer MTJ comparator.

mod integrate;
mod llg;
mod params;
mod state;

pub use integrate::{
    integrate, resistance_at, resistance_of_state, state_projection, switching_latency,
    switching_latency_with_dt, Integrator, ResistanceTrajectory, DEFAULT_SUCCESS_THRESHOLD,
    MAX_STEP_ROTATION,
};
pub use llg::{
    anisotropy_field, effective_field, exchange_field, exchange_torque, field_energy, llg_rhs,
    mtj_llg_rhs, sot_torque,
};
pub use params::{DeviceKind, DeviceParams, DeviceThermal, Readout, GAMMA_E, MAX_DEFAULT_DT};
pub use state::{rotate_x_pi, SublatticeState};
