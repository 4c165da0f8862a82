//! Read trials: precharge, discharge through the sampled cell, sense both
//! stored states against the reference.

use alloc::vec::Vec;

use super::fit::QuadraticSurface;
use super::variation::{sample, Sample, VariationSpec};
use crate::circuit::{
    build_bitline, evaluate_bitline, precharge_bitline, BitlineNetwork, PrechargeDrive, ReadTiming,
};
use crate::dynamics::{DeviceParams, DeviceThermal};
use crate::error::{Error, Result};
use crate::peripherals::{
    precharge_waveform, sense_decision, PdVariant, PrechargeEqModel, SaVariant, SenseAmpModel,
};
use crate::Bit;

/// Everything fixed across read trials.
#[derive(Debug, Clone, PartialEq)]
pub struct ReadSetup {
    /// Nominal cell at 300 K.
    pub device: DeviceParams,
    pub thermal: DeviceThermal,
    pub n_segments: usize,
    pub tsv_hops: usize,
    /// Interconnect capacitance of the whole bitline, F.
    pub c_wire: f64,
    pub precharge: PrechargeEqModel,
    pub sense: SenseAmpModel,
    pub timing: ReadTiming,
    /// Supply at which the precharge driver has its nominal strength, V.
    pub vdd_nominal: f64,
}

impl ReadSetup {
    pub fn new(device: DeviceParams, sense: SenseAmpModel) -> Self {
        ReadSetup {
            device,
            thermal: DeviceThermal::default(),
            n_segments: 16,
            tsv_hops: 2,
            c_wire: 10e-15,
            precharge: PrechargeEqModel::new(PdVariant::PdEqPlus),
            sense,
            timing: ReadTiming {
                t_sense: 250e-12,
                ..ReadTiming::default()
            },
            vdd_nominal: 0.9,
        }
    }

    /// Same setup with the baseline comparator's fixed reference moved to
    /// the midpoint of the nominal state voltages.
    pub fn centered(mut self, spec: &VariationSpec) -> Result<Self> {
        let r = read_trial_full(&self, &spec.nominal())?;
        if let Some(v) = r.voltages {
            self.sense.v_ref = 0.5 * (v.0 + v.1);
        }
        Ok(self)
    }

    fn network(&self, s: &Sample) -> Result<BitlineNetwork> {
        build_bitline(s.r_bl, s.c_bit, s.c_tsv, self.n_segments, self.tsv_hops)?
            .with_wire(self.c_wire)
    }

    fn drive(&self, net: &BitlineNetwork, s: &Sample) -> PrechargeDrive {
        let mut d = precharge_waveform(&self.precharge, net, s.temperature);
        d.r_source *= self.vdd_nominal / s.vdd.max(1e-3);
        d
    }

    /// Cell at the trial's temperature and process point.
    pub fn cell(&self, s: &Sample) -> DeviceParams {
        let mut p = self.thermal.apply(&self.device, s.temperature);
        p.rp *= s.rp_scale;
        p.tmr *= s.tmr_scale;
        p
    }
}

/// Result of one read trial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReadTrial {
    /// `(v_P, v_AP)` at the sense instant; `None` when the sampled TMR
    /// leaves no signal.
    pub voltages: Option<(f64, f64)>,
    /// Comparator trip point including the sampled offset, V.
    pub trip: f64,
    pub pass: bool,
    /// Smaller distance from a state voltage to the trip point, V
    /// (negative on a misread).
    pub margin: f64,
    /// Word-line-on to decision, s.
    pub latency: f64,
    /// Charge drawn by the precharge, J.
    pub energy: f64,
}

fn decide(setup: &ReadSetup, s: &Sample, vp: f64, vap: f64, reference: f64) -> (f64, bool, f64) {
    let mut sa = setup.sense;
    sa.v_ref = reference;
    let trip = sa.trip_point(s.sa_offset);
    let p = sense_decision(&sa, vp, s.sa_offset, s.temperature).bit == Bit::Zero;
    let ap = sense_decision(&sa, vap, s.sa_offset, s.temperature).bit == Bit::One;
    (trip, p && ap, (trip - vp).min(vap - trip))
}

/// Full transient read of both states for sample `s`.
pub fn read_trial_full(setup: &ReadSetup, s: &Sample) -> Result<ReadTrial> {
    let net = setup.network(s)?;
    let line = setup.precharge.line_at(&net, s.temperature);
    let nominal_drive = setup.drive(&net, s);
    let mut drive = nominal_drive;
    drive.v_source *= s.read_bias_scale;
    let dt = setup.timing.dt;
    let t_sense = setup.timing.t_sense * s.sense_time_scale;
    let latency = t_sense + setup.sense.latency(s.temperature);
    let energy = net.c_total() * drive.v_source * drive.v_source;
    let cell = setup.cell(s);
    if !(cell.tmr > 0.0) || !(cell.rp > 0.0) {
        return Ok(ReadTrial {
            voltages: None,
            trip: setup.sense.trip_point(s.sa_offset),
            pass: false,
            margin: f64::NEG_INFINITY,
            latency,
            energy,
        });
    }
    let v0 = precharge_bitline(&line, &drive, None, dt)?;
    let vp = evaluate_bitline(&line, &v0, cell.rp, t_sense, dt)?;
    let vap = evaluate_bitline(&line, &v0, cell.r_ap(), t_sense, dt)?;
    let reference = match setup.sense.variant {
        SaVariant::Baseline => setup.sense.v_ref,
        SaVariant::Plus => {
            // replica cell: nominal device, nominal bias and timing, same line
            let replica = setup.thermal.apply(&setup.device, s.temperature);
            let scale = if s.read_bias_scale != 0.0 {
                1.0 / s.read_bias_scale
            } else {
                0.0
            };
            let v0r: Vec<f64> = v0.iter().map(|v| v * scale).collect();
            let t = setup.timing.t_sense;
            let a = evaluate_bitline(&line, &v0r, replica.rp, t, dt)?;
            let b = evaluate_bitline(&line, &v0r, replica.r_ap(), t, dt)?;
            0.5 * (a + b)
        }
    };
    let (trip, pass, margin) = decide(setup, s, vp, vap, reference);
    Ok(ReadTrial {
        voltages: Some((vp, vap)),
        trip,
        pass,
        margin,
        latency,
        energy,
    })
}

/// Inputs of the read response surface, as logarithms: the discharge
/// exponent is close to a product of powers of these.
fn read_inputs(s: &Sample) -> Vec<f64> {
    let ln = |v: f64| libm::log(v.max(1e-300));
    alloc::vec![
        ln(s.temperature),
        ln(s.r_bl),
        ln(s.c_bit),
        ln(s.c_tsv),
        ln(s.rp_scale),
        ln(s.tmr_scale),
        ln(s.vdd),
        ln(s.sense_time_scale),
    ]
}

/// `ln(-ln(v))` of a level `v` in (0, 1): the log of the discharge exponent.
fn exponent_log(v: f64) -> f64 {
    libm::log(-libm::log(v))
}

fn level_from_exponent_log(y: f64) -> f64 {
    libm::exp(-libm::exp(y))
}

/// Fast read model. For each state voltage and the replica reference,
/// the log of its discharge exponent relative to the precharge level is
/// quadratic in the logged sample.
#[derive(Debug, Clone, PartialEq)]
pub struct ReadSurrogate {
    pub ln_vp: QuadraticSurface,
    pub ln_vap: QuadraticSurface,
    pub ln_ref: QuadraticSurface,
}

impl ReadSurrogate {
    /// Fit on `n` full transients drawn from `spec` with trial ids
    /// starting at `first_id`.
    pub fn fit(
        setup: &ReadSetup,
        spec: &VariationSpec,
        seed: u64,
        first_id: u64,
        n: u64,
    ) -> Result<Self> {
        let mut xs = Vec::new();
        let (mut yp, mut yap, mut yref) = (Vec::new(), Vec::new(), Vec::new());
        for id in first_id..first_id + n {
            let s = sample(spec, seed, id);
            let r = read_trial_full(setup, &s)?;
            let Some((vp, vap)) = r.voltages else {
                continue;
            };
            let net = setup.network(&s)?;
            let v_src = setup.drive(&net, &s).v_source;
            let reference = r.trip - setup.sense.effective_v_off() - s.sa_offset;
            let bias = v_src * s.read_bias_scale;
            let levels = [vp / bias, vap / bias, reference / v_src];
            if !levels.iter().all(|l| *l > 0.0 && *l < 1.0) || !(s.tmr_scale > 0.0) {
                continue;
            }
            xs.push(read_inputs(&s));
            yp.push(exponent_log(levels[0]));
            yap.push(exponent_log(levels[1]));
            yref.push(exponent_log(levels[2]));
        }
        if xs.len() < 50 {
            return Err(Error::InvalidParams("too few usable read trials to fit"));
        }
        Ok(ReadSurrogate {
            ln_vp: QuadraticSurface::fit(&xs, &yp)?,
            ln_vap: QuadraticSurface::fit(&xs, &yap)?,
            ln_ref: QuadraticSurface::fit(&xs, &yref)?,
        })
    }

    pub fn trial(&self, setup: &ReadSetup, s: &Sample) -> ReadTrial {
        let latency =
            setup.timing.t_sense * s.sense_time_scale + setup.sense.latency(s.temperature);
        let v_src = setup.precharge.v_precharge;
        let c_tot = s.c_bit + self.tsv_count(setup) * s.c_tsv + setup.c_wire;
        let energy = c_tot * (v_src * s.read_bias_scale) * (v_src * s.read_bias_scale);
        if !(s.tmr_scale * setup.device.tmr > 0.0) || !(s.rp_scale > 0.0) {
            return ReadTrial {
                voltages: None,
                trip: setup.sense.trip_point(s.sa_offset),
                pass: false,
                margin: f64::NEG_INFINITY,
                latency,
                energy,
            };
        }
        let x = read_inputs(s);
        let v_bias = v_src * s.read_bias_scale;
        let vp = v_bias * level_from_exponent_log(self.ln_vp.eval(&x));
        let vap = v_bias * level_from_exponent_log(self.ln_vap.eval(&x));
        let reference = match setup.sense.variant {
            SaVariant::Baseline => setup.sense.v_ref,
            SaVariant::Plus => v_src * level_from_exponent_log(self.ln_ref.eval(&x)),
        };
        let (trip, pass, margin) = decide(setup, s, vp, vap, reference);
        ReadTrial {
            voltages: Some((vp, vap)),
            trip,
            pass,
            margin,
            latency,
            energy,
        }
    }

    fn tsv_count(&self, setup: &ReadSetup) -> f64 {
        setup.tsv_hops as f64
    }
}

/// Share of `n` trials (ids from `first_id`) on which the surrogate and
/// the full transient disagree about pass/fail.
pub fn read_misclassification(
    surrogate: &ReadSurrogate,
    setup: &ReadSetup,
    spec: &VariationSpec,
    seed: u64,
    first_id: u64,
    n: u64,
) -> Result<f64> {
    let mut wrong = 0u64;
    for id in first_id..first_id + n {
        let s = sample(spec, seed, id);
        let full = read_trial_full(setup, &s)?;
        if full.pass != surrogate.trial(setup, &s).pass {
            wrong += 1;
        }
    }
    Ok(wrong as f64 / n.max(1) as f64)
}
