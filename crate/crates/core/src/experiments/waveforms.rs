//! Trial-averaged transient waveforms.

use alloc::vec::Vec;

use crate::circuit::{read_path_simulate, ReadTiming};
use crate::dynamics::{state_projection, Integrator};
use crate::error::{Error, Result};
use crate::montecarlo::{sample, ReadSetup, VariationSpec, WriteSetup};
use crate::peripherals::write_pulse;
use crate::waveform::Padded;
use crate::Bit;

/// Which transient is averaged.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WavePath {
    /// Sense-amplifier output while reading a stored one.
    Read,
    /// Néel projection while writing a one.
    Write,
}

impl WavePath {
    /// CSV header of the averaged waveform.
    pub fn header(self) -> &'static str {
        match self {
            WavePath::Read => "Time,Average_vout",
            WavePath::Write => "Time,Average_Mz",
        }
    }
}

/// Common time grid, s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveGrid {
    pub t_end: f64,
    pub points: usize,
}

impl Default for WaveGrid {
    fn default() -> Self {
        WaveGrid {
            t_end: 1.2e-9,
            points: 241,
        }
    }
}

impl WaveGrid {
    pub fn times(&self) -> Vec<f64> {
        let n = self.points.max(2);
        (0..n)
            .map(|i| self.t_end * i as f64 / (n - 1) as f64)
            .collect()
    }
}

fn interpolate(t: &[f64], v: &[f64], at: f64) -> f64 {
    let i = t.partition_point(|&x| x <= at);
    if i == 0 {
        return v[0];
    }
    if i == t.len() {
        return v[v.len() - 1];
    }
    let (t0, t1) = (t[i - 1], t[i]);
    v[i - 1] + (v[i] - v[i - 1]) * (at - t0) / (t1 - t0)
}

/// Sense-amplifier output of one read trial on `grid`, time zero at word
/// line on. The output follows the bitline until the amplifier fires, then
/// regenerates to the decided rail.
pub fn read_trial_waveform(
    setup: &ReadSetup,
    spec: &VariationSpec,
    seed: u64,
    id: u64,
    grid: &WaveGrid,
) -> Result<Vec<f64>> {
    let s = sample(spec, seed, id);
    let cell = setup.cell(&s);
    let times = grid.times();
    let t_fire = setup.timing.t_sense * s.sense_time_scale;
    if !(cell.tmr > 0.0) {
        return Ok(alloc::vec![0.0; times.len()]);
    }
    let net =
        crate::circuit::build_bitline(s.r_bl, s.c_bit, s.c_tsv, setup.n_segments, setup.tsv_hops)?
            .with_wire(setup.c_wire)?;
    let line = setup.precharge.line_at(&net, s.temperature);
    let mut pre = crate::peripherals::precharge_waveform(&setup.precharge, &net, s.temperature);
    pre.v_source *= s.read_bias_scale;
    pre.r_source *= setup.vdd_nominal / s.vdd.max(1e-3);
    let timing = ReadTiming {
        t_sense: t_fire,
        t_after: (grid.t_end - t_fire).max(0.0),
        dt: setup.timing.dt,
    };
    let w = read_path_simulate(&line, Bit::One, &cell, &pre, &timing)?;
    let t_rel: Vec<f64> = w.t.iter().map(|t| t - w.eval_start).collect();
    let decided = crate::montecarlo::read_trial_full(setup, &s)?;
    let rail = if decided.voltages.is_some_and(|(_, vap)| vap > decided.trip) {
        setup.vdd_nominal
    } else {
        0.0
    };
    let tau = setup.sense.latency(s.temperature) / 5.0;
    Ok(times
        .iter()
        .map(|&t| {
            if t <= t_fire {
                interpolate(&t_rel, &w.v_sense, t)
            } else {
                rail + (w.v_at_sense - rail) * libm::exp(-(t - t_fire) / tau)
            }
        })
        .collect())
}

/// Néel projection of one write trial on `grid`.
pub fn write_trial_waveform(
    setup: &WriteSetup,
    spec: &VariationSpec,
    seed: u64,
    id: u64,
    grid: &WaveGrid,
) -> Result<Vec<f64>> {
    let s = sample(spec, seed, id);
    let cell = setup.cell(&s);
    let pulse = write_pulse(&setup.driver_for(&s), Bit::One, s.temperature);
    let drive = Padded {
        inner: pulse,
        extra: grid.t_end,
    };
    let dt = cell.default_dt(s.write_bias.abs().max(1e-3) * 1.5);
    let start = setup.start_for(Bit::One);
    let mut it = Integrator::new(&cell, start, drive, dt)?;
    let axis = cell.readout_axis;
    let mut out = Vec::with_capacity(grid.points);
    for t in grid.times() {
        while it.state().t < t - 1e-9 * dt {
            let h = dt.min(t - it.state().t);
            it.step_by(h)?;
        }
        out.push(state_projection(&cell, it.state(), axis)?);
    }
    Ok(out)
}

/// One trial's waveform on `grid`.
pub fn trial_waveform(
    path: WavePath,
    read: &ReadSetup,
    write: &WriteSetup,
    spec: &VariationSpec,
    seed: u64,
    id: u64,
    grid: &WaveGrid,
) -> Result<Vec<f64>> {
    match path {
        WavePath::Read => read_trial_waveform(read, spec, seed, id, grid),
        WavePath::Write => write_trial_waveform(write, spec, seed, id, grid),
    }
}

/// Pointwise mean, summed in the order given.
pub fn average_waveforms(traces: &[Vec<f64>]) -> Result<Vec<f64>> {
    let first = traces
        .first()
        .ok_or(Error::InvalidParams("no waveforms to average"))?;
    let mut acc = alloc::vec![0.0; first.len()];
    for tr in traces {
        for (a, v) in acc.iter_mut().zip(tr) {
            *a += v;
        }
    }
    let n = traces.len() as f64;
    Ok(acc.into_iter().map(|a| a / n).collect())
}

/// Average of trials `0..n` on `grid`.
pub fn mc_waveform_average(
    path: WavePath,
    read: &ReadSetup,
    write: &WriteSetup,
    spec: &VariationSpec,
    seed: u64,
    n: u64,
    grid: &WaveGrid,
) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::InvalidParams("need at least one trial"));
    }
    let traces = (0..n)
        .map(|id| trial_waveform(path, read, write, spec, seed, id, grid))
        .collect::<Result<Vec<_>>>()?;
    average_waveforms(&traces)
}
