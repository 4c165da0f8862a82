//! Write trials: both directions plus a half-selected neighbour that must
//! keep its state.

use alloc::vec::Vec;

use super::fit::least_squares;
use super::variation::{sample, Sample, VariationSpec};
use crate::dynamics::{switching_latency, DeviceParams, DeviceThermal, SublatticeState};
use crate::error::{Error, Result};
use crate::experiments::{macrospin_integral, LatencyProbe};
use crate::peripherals::{write_pulse, WriteDriverModel};
use crate::waveform::{Padded, Trapezoid, Waveform};
use crate::Bit;

/// Everything fixed across write trials.
#[derive(Debug, Clone, PartialEq)]
pub struct WriteSetup {
    /// Nominal cell at 300 K.
    pub device: DeviceParams,
    pub thermal: DeviceThermal,
    /// Amplitudes and width are replaced by the sampled operating point.
    pub driver: WriteDriverModel,
    pub probe: LatencyProbe,
    /// Share of the write pulse seen by a half-selected neighbour.
    pub disturb_fraction: f64,
    /// Undriven time after the pulse before the final state is judged, s.
    pub relax_time: f64,
}

impl WriteSetup {
    pub fn new(device: DeviceParams) -> Self {
        WriteSetup {
            device,
            thermal: DeviceThermal::default(),
            driver: WriteDriverModel::wd_write(0.7, 0.5e-9),
            probe: LatencyProbe::default(),
            disturb_fraction: 0.25,
            relax_time: 0.3e-9,
        }
    }

    /// Cell at the trial's temperature and process point.
    pub fn cell(&self, s: &Sample) -> DeviceParams {
        let mut p = self.thermal.apply(&self.device, s.temperature);
        p.hk *= s.hk_scale;
        p.sot_efficiency *= s.sot_scale;
        p
    }

    pub fn driver_for(&self, s: &Sample) -> WriteDriverModel {
        let mut wd = self.driver;
        wd.amplitude_w0 = s.write_bias;
        wd.amplitude_w1 = s.write_bias;
        wd.pulse_width = s.pulse_width;
        wd
    }

    /// State holding the opposite of `bit`, i.e. where a write of `bit`
    /// starts.
    pub fn start_for(&self, bit: Bit) -> SublatticeState {
        SublatticeState::tilted(self.probe.initial_tilt, bit == Bit::One)
    }
}

/// Result of one write trial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WriteTrial {
    /// Switching latency writing one, then zero; `None` when the cell
    /// does not end in the written state.
    pub latency: [Option<f64>; 2],
    /// A half-selected neighbour flipped.
    pub disturbed: bool,
    pub pass: bool,
    /// Pulse length minus the slower latency, s (negative on failure).
    pub margin: f64,
}

const DIRECTIONS: [Bit; 2] = [Bit::One, Bit::Zero];

fn scaled(p: &Trapezoid, f: f64) -> Trapezoid {
    Trapezoid::new(p.amplitude * f, p.t_rise, p.width, p.t_fall)
}

fn summarize(latency: [Option<f64>; 2], disturbed: bool, duration: f64) -> WriteTrial {
    let slowest = latency
        .iter()
        .map(|l| l.unwrap_or(f64::INFINITY))
        .fold(0.0, f64::max);
    let pass = !disturbed && latency.iter().all(Option::is_some);
    WriteTrial {
        latency,
        disturbed,
        pass,
        margin: if slowest.is_finite() {
            duration - slowest
        } else {
            f64::NEG_INFINITY
        },
    }
}

/// Full LLG write of both directions and the neighbour check.
pub fn write_trial_full(setup: &WriteSetup, s: &Sample) -> Result<WriteTrial> {
    let cell = setup.cell(s);
    let wd = setup.driver_for(s);
    let thr = setup.probe.threshold;
    let mut latency = [None; 2];
    let mut disturbed = false;
    let mut duration = 0.0;
    for (k, bit) in DIRECTIONS.into_iter().enumerate() {
        let pulse = write_pulse(&wd, bit, s.temperature);
        duration = pulse.duration();
        if pulse.amplitude == 0.0 {
            continue;
        }
        let start = setup.start_for(bit);
        let extra = setup.relax_time;
        latency[k] = switching_latency(
            &cell,
            start,
            Padded {
                inner: pulse,
                extra,
            },
            thr,
        )?;
        let half = scaled(&pulse, setup.disturb_fraction);
        if half.amplitude != 0.0
            && switching_latency(&cell, start, Padded { inner: half, extra }, thr)?.is_some()
        {
            disturbed = true;
        }
    }
    Ok(summarize(latency, disturbed, duration))
}

/// Closed-form single-spin time for `cell` under a constant `v` to reach
/// projection `-threshold` from the probe's starting tilt, s.
pub fn analytic_latency(
    cell: &DeviceParams,
    probe: &LatencyProbe,
    v: f64,
    threshold: f64,
) -> Option<f64> {
    let eta = cell.sot_efficiency;
    if !(eta > 0.0) {
        return None;
    }
    let vc = cell.alpha * cell.hk / ((1.0 + cell.alpha * cell.alpha) * eta);
    macrospin_integral(v.abs(), vc, probe.initial_tilt, threshold).map(|i| i / (cell.gamma * eta))
}

/// Projection treated as the point of no return.
const EQUATOR: f64 = 1e-3;

/// Regressors in nanoseconds so the columns share a scale.
fn write_features(t_an: f64, s: &Sample) -> Vec<f64> {
    let t = t_an * 1e9;
    let z = (s.temperature - 300.0) / 100.0;
    alloc::vec![1.0, t, t * z, t * t]
}

/// Fast write model: closed-form times corrected by fits against full
/// transients. The write succeeds when the equator is crossed before the
/// drive fades; the reported latency uses the success threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct WriteSurrogate {
    pub crossing: Vec<f64>,
    pub latency: Vec<f64>,
    /// How long before the drive ends the equator must be crossed, s.
    pub lead: f64,
}

impl WriteSurrogate {
    /// Fit on `n` full transients drawn from `spec`, each under a pulse
    /// long enough to finish switching.
    pub fn fit(
        setup: &WriteSetup,
        spec: &VariationSpec,
        seed: u64,
        first_id: u64,
        n: u64,
    ) -> Result<Self> {
        let mut rows = [Vec::new(), Vec::new()];
        let mut y = [Vec::new(), Vec::new()];
        // (end of drive, equator regressors, full pass) for the lead fit
        let mut outcomes = Vec::new();
        for id in first_id..first_id + n {
            let s = sample(spec, seed, id);
            let cell = setup.cell(&s);
            let pulse = write_pulse(&setup.driver_for(&s), Bit::One, s.temperature);
            let v = pulse.amplitude;
            let start = setup.start_for(Bit::One);
            for (k, thr) in [EQUATOR, setup.probe.threshold].into_iter().enumerate() {
                let Some(t_an) = analytic_latency(&cell, &setup.probe, v, thr) else {
                    continue;
                };
                if t_an > 20e-9 {
                    continue;
                }
                let long = setup.probe.pulse(v, 2.0 * t_an + 0.2e-9);
                if let Some(t) = switching_latency(&cell, start, long, thr)? {
                    rows[k].push(write_features(t_an, &s));
                    y[k].push(t * 1e9);
                }
                if k == 0 {
                    let own = Padded {
                        inner: pulse,
                        extra: setup.relax_time,
                    };
                    let pass =
                        switching_latency(&cell, start, own, setup.probe.threshold)?.is_some();
                    outcomes.push((drive_end(&pulse), write_features(t_an, &s), pass));
                }
            }
        }
        if rows.iter().any(|r| r.len() < 20) {
            return Err(Error::InvalidParams(
                "too few switching write trials to fit",
            ));
        }
        let crossing = least_squares(&rows[0], &y[0])?;
        // pick the lead that best separates full passes from failures
        let mut gaps: Vec<(f64, bool)> = outcomes
            .iter()
            .map(|(end, f, pass)| (end - 1e-9 * dot(f, &crossing), *pass))
            .collect();
        gaps.sort_by(|a, b| a.0.total_cmp(&b.0));
        let passes = gaps.iter().filter(|g| g.1).count();
        // predicted pass iff gap >= lead; start with lead below every gap
        let mut errors = gaps.len() - passes;
        let (mut best, mut lead) = (errors, gaps.first().map_or(0.0, |g| g.0) - 1e-12);
        for i in 0..gaps.len() {
            // move gap i to the predicted-fail side
            if gaps[i].1 {
                errors += 1;
            } else {
                errors -= 1;
            }
            if errors < best && (i + 1 == gaps.len() || gaps[i + 1].0 > gaps[i].0) {
                best = errors;
                lead = match gaps.get(i + 1) {
                    Some(next) => 0.5 * (gaps[i].0 + next.0),
                    None => gaps[i].0 + 1e-12,
                };
            }
        }
        Ok(WriteSurrogate {
            crossing,
            latency: least_squares(&rows[1], &y[1])?,
            lead,
        })
    }

    fn predict(
        coeffs: &[f64],
        setup: &WriteSetup,
        cell: &DeviceParams,
        s: &Sample,
        v: f64,
        thr: f64,
    ) -> Option<f64> {
        let t_an = analytic_latency(cell, &setup.probe, v, thr)?;
        let f = write_features(t_an, s);
        Some(1e-9 * dot(&f, coeffs))
    }

    /// Predicted time to cross the equator under a long pulse of `v`.
    pub fn crossing_time(
        &self,
        setup: &WriteSetup,
        cell: &DeviceParams,
        s: &Sample,
        v: f64,
    ) -> Option<f64> {
        Self::predict(&self.crossing, setup, cell, s, v, EQUATOR)
    }

    /// Predicted latency under a long pulse of `v`.
    pub fn latency(
        &self,
        setup: &WriteSetup,
        cell: &DeviceParams,
        s: &Sample,
        v: f64,
    ) -> Option<f64> {
        Self::predict(&self.latency, setup, cell, s, v, setup.probe.threshold)
    }

    pub fn trial(&self, setup: &WriteSetup, s: &Sample) -> WriteTrial {
        let cell = setup.cell(s);
        let wd = setup.driver_for(s);
        let mut latency = [None; 2];
        let mut disturbed = false;
        let mut duration = 0.0;
        for (k, bit) in DIRECTIONS.into_iter().enumerate() {
            let pulse = write_pulse(&wd, bit, s.temperature);
            duration = pulse.duration();
            let budget = drive_end(&pulse) - self.lead;
            let crosses = |v: f64| {
                self.crossing_time(setup, &cell, s, v)
                    .is_some_and(|t| t <= budget)
            };
            if crosses(pulse.amplitude) {
                latency[k] = self.latency(setup, &cell, s, pulse.amplitude);
            }
            if crosses(pulse.amplitude * setup.disturb_fraction) {
                disturbed = true;
            }
        }
        summarize(latency, disturbed, duration)
    }
}

/// End of the drive with the falling edge counted at half weight, s.
fn drive_end(p: &Trapezoid) -> f64 {
    p.t_rise + p.width + 0.5 * p.t_fall
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Share of `n` trials on which surrogate and full transient disagree.
pub fn write_misclassification(
    surrogate: &WriteSurrogate,
    setup: &WriteSetup,
    spec: &VariationSpec,
    seed: u64,
    first_id: u64,
    n: u64,
) -> Result<f64> {
    let mut wrong = 0u64;
    for id in first_id..first_id + n {
        let s = sample(spec, seed, id);
        if write_trial_full(setup, &s)?.pass != surrogate.trial(setup, &s).pass {
            wrong += 1;
        }
    }
    Ok(wrong as f64 / n.max(1) as f64)
}
