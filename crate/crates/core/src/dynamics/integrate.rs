//! Fixed-step RK4 over the sublattice pair with renormalization after each
//! step, plus the resistance readout built on it.

use alloc::vec::Vec;

use super::llg::rhs_raw;
use super::params::{DeviceParams, Readout};
use super::state::SublatticeState;
use crate::error::{Error, Result};
use crate::vec3::{UnitVector3, Vec3};
use crate::waveform::Waveform;

/// Largest rotation of either sublattice allowed in a single step, rad.
pub const MAX_STEP_ROTATION: f64 = 0.5;
// cos(0.5)
const COS_MAX_STEP_ROTATION: f64 = 0.877_582_561_890_372_8;

/// Default switching criterion on the normalized Néel projection.
pub const DEFAULT_SUCCESS_THRESHOLD: f64 = 0.9;

/// `(t, R)` samples with strictly increasing `t`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ResistanceTrajectory {
    pub samples: Vec<(f64, f64)>,
}

impl ResistanceTrajectory {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Linear interpolation; clamps outside the sampled range.
    pub fn at(&self, t: f64) -> f64 {
        let s = &self.samples;
        let i = s.partition_point(|&(ti, _)| ti <= t);
        if i == 0 {
            return s[0].1;
        }
        if i == s.len() {
            return s[s.len() - 1].1;
        }
        let (t0, r0) = s[i - 1];
        let (t1, r1) = s[i];
        r0 + (r1 - r0) * (t - t0) / (t1 - t0)
    }
}

/// Projection of the stored-bit vector on `axis`, normalized to `[-1, 1]`.
pub fn state_projection(
    params: &DeviceParams,
    state: &SublatticeState,
    axis: UnitVector3,
) -> Result<f64> {
    let l = match params.readout {
        Readout::Neel => state.neel_vector(),
        Readout::Sublattice1 => state.m1.vec(),
    };
    let n = l.norm();
    if n < 1e-6 {
        return Err(Error::DegenerateNeel { t: state.t });
    }
    Ok((l.dot(axis.vec()) / n).clamp(-1.0, 1.0))
}

/// Resistance from the angle between the Néel vector and `readout_axis`,
/// interpolating conductance between the P and AP states.
pub fn resistance_of_state(
    params: &DeviceParams,
    state: &SublatticeState,
    readout_axis: UnitVector3,
) -> Result<f64> {
    let cos = state_projection(params, state, readout_axis)?;
    Ok(resistance_at(params, cos))
}

/// Resistance at a given `cos θ`.
pub fn resistance_at(params: &DeviceParams, cos_theta: f64) -> f64 {
    let r_ap = params.r_ap();
    if cos_theta >= 1.0 {
        return params.rp;
    }
    if cos_theta <= -1.0 {
        return r_ap;
    }
    let gp = 1.0 / params.rp;
    let gap = 1.0 / r_ap;
    let g = 0.5 * (gp + gap) + 0.5 * (gp - gap) * cos_theta;
    (1.0 / g).clamp(params.rp, r_ap)
}

/// Stepwise RK4 driver. Holds the current state; each call to
/// [`Integrator::step`] advances by `dt`.
pub struct Integrator<'a, W: Waveform> {
    params: &'a DeviceParams,
    drive: W,
    dt: f64,
    state: SublatticeState,
    steps: u64,
    t0: f64,
}

impl<'a, W: Waveform> Integrator<'a, W> {
    pub fn new(
        params: &'a DeviceParams,
        initial: SublatticeState,
        drive: W,
        dt: f64,
    ) -> Result<Self> {
        params.validate()?;
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidParams("dt must be > 0"));
        }
        Ok(Integrator {
            params,
            drive,
            dt,
            state: initial,
            steps: 0,
            t0: initial.t,
        })
    }

    pub fn state(&self) -> &SublatticeState {
        &self.state
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Drive voltage at the current time.
    pub fn voltage(&self) -> f64 {
        self.drive.value(self.state.t)
    }

    /// Advance one step of length `dt`.
    pub fn step(&mut self) -> Result<&SublatticeState> {
        let dt = self.dt;
        self.step_by(dt)
    }

    /// Advance one step of arbitrary length `h` (used to land on `t_end`).
    pub fn step_by(&mut self, h: f64) -> Result<&SublatticeState> {
        let p = self.params;
        let t = self.state.t;
        let (a1, a2) = (self.state.m1.vec(), self.state.m2.vec());
        let v0 = self.drive.value(t);
        let vh = self.drive.value(t + 0.5 * h);
        let v1 = self.drive.value(t + h);

        let (k1a, k1b) = rhs_raw(p, a1, a2, v0);
        let (k2a, k2b) = rhs_raw(p, a1 + k1a * (0.5 * h), a2 + k1b * (0.5 * h), vh);
        let (k3a, k3b) = rhs_raw(p, a1 + k2a * (0.5 * h), a2 + k2b * (0.5 * h), vh);
        let (k4a, k4b) = rhs_raw(p, a1 + k3a * h, a2 + k3b * h, v1);

        let n1 = a1 + (k1a + (k2a + k3a) * 2.0 + k4a) * (h / 6.0);
        let n2 = a2 + (k1b + (k2b + k3b) * 2.0 + k4b) * (h / 6.0);
        let m1 = renormalize(n1, self.state.m1, t)?;
        let m2 = renormalize(n2, self.state.m2, t)?;

        // cos of the rotation; both ends are unit vectors
        let c = a1.dot(m1.vec()).min(a2.dot(m2.vec()));
        if c < COS_MAX_STEP_ROTATION {
            let rot = a1.angle_to(m1.vec()).max(a2.angle_to(m2.vec()));
            return Err(Error::StepTooLarge { t, angle: rot });
        }
        self.steps += 1;
        // time from the step count avoids drift from repeated addition
        let t_next = if h == self.dt {
            self.t0 + self.steps as f64 * self.dt
        } else {
            t + h
        };
        self.state = SublatticeState::new(m1, m2, t_next);
        Ok(&self.state)
    }
}

fn renormalize(v: Vec3, prev: UnitVector3, t: f64) -> Result<UnitVector3> {
    if v == prev.vec() {
        return Ok(prev);
    }
    UnitVector3::new(v).ok_or(Error::StepTooLarge { t, angle: f64::NAN })
}

/// Integrate from `initial` to `initial.t + t_end` and record `R(t)` after
/// every step (and at the start).
pub fn integrate<W: Waveform>(
    params: &DeviceParams,
    initial: SublatticeState,
    drive: W,
    t_end: f64,
    dt: f64,
) -> Result<(SublatticeState, ResistanceTrajectory)> {
    if !(t_end > 0.0) {
        return Err(Error::InvalidParams("t_end must be > 0"));
    }
    let axis = params.readout_axis;
    let mut it = Integrator::new(params, initial, drive, dt)?;
    let stop = initial.t + t_end;
    let n_full = libm::floor(t_end / dt * (1.0 + 1e-12)) as u64;
    let mut traj = ResistanceTrajectory {
        samples: Vec::with_capacity(n_full as usize + 2),
    };
    traj.samples
        .push((initial.t, resistance_of_state(params, &initial, axis)?));
    for _ in 0..n_full {
        let s = *it.step()?;
        traj.samples
            .push((s.t, resistance_of_state(params, &s, axis)?));
    }
    let rest = stop - it.state().t;
    if rest > dt * 1e-9 {
        let s = *it.step_by(rest)?;
        traj.samples
            .push((s.t, resistance_of_state(params, &s, axis)?));
    }
    Ok((*it.state(), traj))
}

/// First time after which the normalized projection stays beyond
/// `success_threshold` on the side opposite to where it started, for the
/// rest of the pulse. `None` if that never happens.
///
/// Uses [`DeviceParams::default_dt`] for the step.
pub fn switching_latency<W: Waveform>(
    params: &DeviceParams,
    initial: SublatticeState,
    pulse: W,
    success_threshold: f64,
) -> Result<Option<f64>> {
    let dt = params.default_dt(pulse.peak());
    switching_latency_with_dt(params, initial, pulse, success_threshold, dt)
}

pub fn switching_latency_with_dt<W: Waveform>(
    params: &DeviceParams,
    initial: SublatticeState,
    pulse: W,
    success_threshold: f64,
    dt: f64,
) -> Result<Option<f64>> {
    if !(success_threshold > 0.0 && success_threshold <= 1.0) {
        return Err(Error::InvalidParams("success threshold must lie in (0, 1]"));
    }
    let t_end = pulse.duration();
    if !t_end.is_finite() {
        return Err(Error::InvalidParams("switching needs a finite pulse"));
    }
    let axis = params.readout_axis;
    let p0 = state_projection(params, &initial, axis)?;
    // target side is opposite to the starting side
    let sign = if p0 >= 0.0 { -1.0 } else { 1.0 };
    let beyond = |p: f64| sign * p >= success_threshold;

    let mut it = Integrator::new(params, initial, pulse, dt)?;
    let mut prev_t = initial.t;
    let mut prev_p = p0;
    // crossing time of the current run of "beyond" samples
    let mut entered: Option<f64> = if beyond(p0) { Some(initial.t) } else { None };
    let stop = initial.t + t_end;
    while it.state().t < stop - 1e-9 * dt {
        let h = dt.min(stop - it.state().t);
        let s = *it.step_by(h)?;
        let p = state_projection(params, &s, axis)?;
        match (beyond(prev_p), beyond(p)) {
            (false, true) => {
                let target = sign * success_threshold;
                let frac = (target - prev_p) / (p - prev_p);
                entered = Some(prev_t + frac.clamp(0.0, 1.0) * (s.t - prev_t));
            }
            (true, false) => entered = None,
            _ => {}
        }
        prev_t = s.t;
        prev_p = p;
    }
    Ok(entered.map(|t| t - initial.t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::params::DeviceKind;
    use crate::waveform::{Constant, Trapezoid};

    fn unit(x: f64, y: f64, z: f64) -> UnitVector3 {
        UnitVector3::new(Vec3::new(x, y, z)).unwrap()
    }

    fn kohm() -> DeviceParams {
        let mut p = DeviceParams::new(DeviceKind::Afmtj);
        p.rp = 1000.0;
        p.tmr = 0.3;
        p
    }

    #[test]
    fn resistance_endpoints() {
        let p = kohm();
        let par = SublatticeState::new(UnitVector3::Z, -UnitVector3::Z, 0.0);
        assert_eq!(
            resistance_of_state(&p, &par, UnitVector3::Z).unwrap(),
            1000.0
        );
        let ap = SublatticeState::new(-UnitVector3::Z, UnitVector3::Z, 0.0);
        assert_eq!(
            resistance_of_state(&p, &ap, UnitVector3::Z).unwrap(),
            1300.0
        );
    }

    #[test]
    fn resistance_perpendicular_is_conductance_average() {
        let p = kohm();
        let s = SublatticeState::new(UnitVector3::X, -UnitVector3::X, 0.0);
        let r = resistance_of_state(&p, &s, UnitVector3::Z).unwrap();
        let expect = 2.0 * 1000.0 * 1300.0 / 2300.0;
        assert!((r - expect).abs() < 1e-9);
        assert!((r - 1130.43).abs() < 0.01);
    }

    #[test]
    fn collapsed_neel_is_an_error() {
        let p = kohm();
        let s = SublatticeState::new(UnitVector3::Z, UnitVector3::Z, 2e-12);
        assert_eq!(
            resistance_of_state(&p, &s, UnitVector3::Z),
            Err(Error::DegenerateNeel { t: 2e-12 })
        );
    }

    #[test]
    fn sublattice_readout_ignores_m2() {
        let mut p = kohm();
        p.readout = Readout::Sublattice1;
        let s = SublatticeState::new(UnitVector3::Z, UnitVector3::Z, 0.0);
        assert_eq!(resistance_of_state(&p, &s, UnitVector3::Z).unwrap(), 1000.0);
    }

    #[test]
    fn zero_torque_leaves_state_unchanged() {
        let mut p = kohm();
        p.hk = 0.0;
        let s0 = SublatticeState::new(unit(0.2, 0.1, 0.9), unit(-0.5, 0.1, -0.6), 0.0);
        let (s, traj) = integrate(&p, s0, Constant(0.0), 1e-10, 1e-13).unwrap();
        assert_eq!(s.m1, s0.m1);
        assert_eq!(s.m2, s0.m2);
        assert!((s.t - 1e-10).abs() < 1e-22);
        assert_eq!(traj.len(), 1001);
    }

    #[test]
    fn trajectory_is_ordered_and_bounded() {
        let mut p = kohm();
        p.hk = 0.5;
        p.sot_efficiency = 0.05;
        let s0 = SublatticeState::tilted(0.2, true);
        let (_, traj) = integrate(
            &p,
            s0,
            Trapezoid::new(1.0, 16e-12, 200e-12, 16e-12),
            3e-10,
            1e-13,
        )
        .unwrap();
        assert!(traj.samples.windows(2).all(|w| w[1].0 > w[0].0));
        let r_ap = p.r_ap();
        assert!(traj
            .samples
            .iter()
            .all(|&(_, r)| r >= p.rp * (1.0 - 1e-12) && r <= r_ap * (1.0 + 1e-12)));
    }

    #[test]
    fn coarse_step_is_rejected() {
        let mut p = kohm();
        p.kind = DeviceKind::Mtj;
        p.applied_field = Vec3::new(0.0, 0.0, 1.0);
        let s0 = SublatticeState::new(UnitVector3::X, -UnitVector3::X, 0.0);
        let err = integrate(&p, s0, Constant(0.0), 1e-9, 5e-12).unwrap_err();
        assert_eq!(err.name(), "StepTooLarge");
    }

    #[test]
    fn zero_amplitude_never_switches() {
        let mut p = kohm();
        p.hk = 0.5;
        p.sot_efficiency = 0.05;
        let s0 = SublatticeState::tilted(0.1, true);
        let r =
            switching_latency(&p, s0, Trapezoid::new(0.0, 16e-12, 500e-12, 16e-12), 0.9).unwrap();
        assert_eq!(r, None);
    }

    #[test]
    fn threshold_is_validated() {
        let p = kohm();
        let s0 = SublatticeState::tilted(0.1, true);
        let w = Trapezoid::new(0.0, 1e-12, 1e-12, 1e-12);
        assert!(switching_latency(&p, s0, w, 0.0).is_err());
        assert!(switching_latency(&p, s0, w, 1.1).is_err());
    }

    #[test]
    fn mtj_mirror_keeps_projection_equal_to_m1() {
        let mut p = kohm();
        p.kind = DeviceKind::Mtj;
        p.hk = 0.8;
        p.sot_efficiency = 0.05;
        let s0 = SublatticeState::tilted(0.3, true);
        let (s, _) = integrate(&p, s0, Constant(0.4), 2e-10, 1e-14).unwrap();
        let proj = state_projection(&p, &s, UnitVector3::Z).unwrap();
        assert!((proj - s.m1.z()).abs() < 1e-12);
    }
}
