//! Write latency and energy against drive voltage.

use alloc::vec::Vec;

use super::calibrate::LatencyProbe;
use crate::dynamics::{integrate, DeviceParams};
use crate::error::{Error, Result};
use crate::peripherals::{driver_energy, DriverLoad, ReadTables, SaVariant, WriteDriverModel};
use crate::waveform::{Trapezoid, Waveform};

/// Drive voltages of the published write sweep, V.
pub const SWEEP_VOLTAGES: [f64; 8] = [0.5, 0.6, 0.7, 0.8, 0.9, 1.0, 1.1, 1.2];

/// Energy bookkeeping around one write.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WriteEnergyModel {
    /// Capacitance switched on the selected write line, F.
    pub line_capacitance: f64,
    /// Energy of the read that verifies every write, J.
    pub verify_read_energy: f64,
    /// Shortest flat top tried when looking for the switch, s.
    pub min_window: f64,
    /// Give up (NoSwitch) beyond this flat top, s.
    pub max_window: f64,
}

impl Default for WriteEnergyModel {
    fn default() -> Self {
        let verify = ReadTables::default()
            .read_energy(SaVariant::Plus, 0.90, 25.0)
            .unwrap_or(0.0);
        WriteEnergyModel {
            line_capacitance: 32e-15,
            verify_read_energy: verify,
            min_window: 1e-9,
            max_window: 16e-9,
        }
    }
}

/// One row of the sweep. Energies in J, latency in s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WritePoint {
    pub voltage: f64,
    /// `None` when the cell never switched within `max_window`.
    pub latency: Option<f64>,
    /// `∫ v²/R dt` through the cell up to the switch.
    pub cell_energy: f64,
    /// Charging the write line.
    pub line_energy: f64,
    pub driver_energy: f64,
    pub verify_energy: f64,
    pub total_energy: f64,
    /// Driver self-energy over the total.
    pub driver_overhead: f64,
}

/// `∫ v(t)²/R(t) dt` from 0 to `t_end` along the simulated trajectory.
pub fn cell_energy(
    params: &DeviceParams,
    probe: &LatencyProbe,
    pulse: &Trapezoid,
    t_end: f64,
) -> Result<f64> {
    let dt = params.default_dt(pulse.peak());
    let (_, traj) = integrate(params, probe.initial_state(), pulse, t_end, dt)?;
    let mut e = 0.0;
    for w in traj.samples.windows(2) {
        let (t0, r0) = w[0];
        let (t1, r1) = w[1];
        let p0 = pulse.value(t0) * pulse.value(t0) / r0;
        let p1 = pulse.value(t1) * pulse.value(t1) / r1;
        e += 0.5 * (p0 + p1) * (t1 - t0);
    }
    Ok(e)
}

/// Latency and the pulse that produced it, doubling the flat top until
/// the cell switches or `max_window` is exceeded.
fn find_switch(
    params: &DeviceParams,
    probe: &LatencyProbe,
    model: &WriteEnergyModel,
    v: f64,
) -> Result<Option<(f64, Trapezoid)>> {
    let mut window = model.min_window;
    while window <= model.max_window * (1.0 + 1e-12) {
        if let Some(t) = probe.latency(params, v, window)? {
            return Ok(Some((t, probe.pulse(v, window))));
        }
        window *= 2.0;
    }
    Ok(None)
}

/// Latency and energy of a single write at `v`. The driver shuts off at
/// the switch, so the cell only draws current up to the latency.
pub fn write_point(
    params: &DeviceParams,
    probe: &LatencyProbe,
    wd: &WriteDriverModel,
    model: &WriteEnergyModel,
    v: f64,
) -> Result<WritePoint> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(Error::InvalidParams("write voltage must be > 0"));
    }
    let found = find_switch(params, probe, model, v)?;
    let (latency, cell) = match &found {
        Some((t, pulse)) => (Some(*t), cell_energy(params, probe, pulse, *t)?),
        None => (None, 0.0),
    };
    let mut drv = *wd;
    drv.amplitude_w0 = v;
    drv.amplitude_w1 = v;
    let pulse = probe.pulse(v, model.min_window);
    let e = driver_energy(
        &drv,
        &pulse,
        DriverLoad {
            resistance: f64::INFINITY,
            capacitance: model.line_capacitance,
        },
    );
    let total = cell + e.delivered + e.driver + model.verify_read_energy;
    Ok(WritePoint {
        voltage: v,
        latency,
        cell_energy: cell,
        line_energy: e.delivered,
        driver_energy: e.driver,
        verify_energy: model.verify_read_energy,
        total_energy: total,
        driver_overhead: if total > 0.0 { e.driver / total } else { 0.0 },
    })
}

pub fn sweep_write(
    params: &DeviceParams,
    probe: &LatencyProbe,
    wd: &WriteDriverModel,
    model: &WriteEnergyModel,
    voltages: &[f64],
) -> Result<Vec<WritePoint>> {
    voltages
        .iter()
        .map(|&v| write_point(params, probe, wd, model, v))
        .collect()
}

/// Copy of `params` whose parallel resistance makes the write at `v` cost
/// `target` J. Cell energy scales as `1/R`, so one simulation suffices.
pub fn fit_rp_to_energy(
    params: &DeviceParams,
    probe: &LatencyProbe,
    wd: &WriteDriverModel,
    model: &WriteEnergyModel,
    v: f64,
    target: f64,
) -> Result<DeviceParams> {
    let mut unit = *params;
    unit.rp = 1.0;
    let pt = write_point(&unit, probe, wd, model, v)?;
    let fixed = pt.line_energy + pt.driver_energy + pt.verify_energy;
    if pt.latency.is_none() || !(target > fixed) {
        return Err(Error::InvalidParams(
            "energy target not reachable by scaling the cell resistance",
        ));
    }
    let mut p = *params;
    p.rp = pt.cell_energy / (target - fixed);
    Ok(p)
}
