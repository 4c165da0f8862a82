use crate::error::{Error, Result};
use crate::vec3::{UnitVector3, Vec3};

/// Gyromagnetic ratio of the free electron, rad·s⁻¹·T⁻¹.
pub const GAMMA_E: f64 = 1.7595e11;

/// Upper bound on [`DeviceParams::default_dt`], s.
pub const MAX_DEFAULT_DT: f64 = 0.1e-12;

/// Which magnetic structure the parameter block describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeviceKind {
    /// Two exchange-coupled sublattices; the bit is the Néel vector.
    Afmtj,
    /// Single ferromagnetic free layer. Its state is carried in `m1`
    /// and `m2` is kept as the mirror image `-m1`.
    Mtj,
}

/// What the tunnel resistance follows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Readout {
    /// Direction of `L = m1 - m2`.
    Neel,
    /// Direction of sublattice 1 alone.
    Sublattice1,
}

/// Physical constants of one junction. SI units throughout.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeviceParams {
    pub kind: DeviceKind,
    /// rad·s⁻¹·T⁻¹
    pub gamma: f64,
    pub alpha: f64,
    /// A·m⁻¹
    pub ms: f64,
    /// Inter-sublattice exchange constant. Only `j_af / ms` (tesla) is
    /// ever used.
    pub j_af: f64,
    /// Uniaxial anisotropy field along +z, T.
    pub hk: f64,
    /// Damping-like SOT strength, T per volt.
    pub sot_efficiency: f64,
    pub sigma_hat: UnitVector3,
    /// Sign of the SOT on each sublattice. `[1, -1]` drives the two
    /// sublattices toward opposite poles.
    pub sot_signs: [f64; 2],
    /// Static external field, T.
    pub applied_field: Vec3,
    /// Parallel-state resistance, Ω.
    pub rp: f64,
    pub tmr: f64,
    /// K
    pub temperature: f64,
    pub readout: Readout,
    pub readout_axis: UnitVector3,
}

impl DeviceParams {
    /// Textbook-constant starting point; every field is meant to be overridden.
    pub fn new(kind: DeviceKind) -> Self {
        DeviceParams {
            kind,
            gamma: GAMMA_E,
            alpha: 0.01,
            ms: 1.0e6,
            j_af: 0.0,
            hk: 1.0,
            sot_efficiency: 0.0,
            sigma_hat: -UnitVector3::Z,
            sot_signs: [1.0, -1.0],
            applied_field: Vec3::ZERO,
            rp: 3.5e3,
            tmr: 0.3,
            temperature: 300.0,
            readout: Readout::Neel,
            readout_axis: UnitVector3::Z,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.gamma,
            self.alpha,
            self.ms,
            self.j_af,
            self.hk,
            self.sot_efficiency,
            self.rp,
            self.tmr,
            self.temperature,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidParams("non-finite device parameter"));
        }
        if !(self.gamma > 0.0) {
            return Err(Error::InvalidParams("gamma must be > 0"));
        }
        if !(self.alpha > 0.0) {
            return Err(Error::InvalidParams("alpha must be > 0"));
        }
        if !(self.ms > 0.0) {
            return Err(Error::InvalidParams("Ms must be > 0"));
        }
        if self.j_af < 0.0 {
            return Err(Error::InvalidParams("J_AF must be >= 0"));
        }
        if self.kind == DeviceKind::Mtj && self.j_af != 0.0 {
            return Err(Error::InvalidParams(
                "an MTJ has no inter-sublattice exchange",
            ));
        }
        if !(self.rp > 0.0) {
            return Err(Error::InvalidParams("Rp must be > 0"));
        }
        if self.tmr < 0.0 {
            return Err(Error::InvalidParams("TMR must be >= 0"));
        }
        if self.hk < 0.0 {
            return Err(Error::InvalidParams("Hk must be >= 0"));
        }
        Ok(())
    }

    /// Exchange field per unit neighbour magnetization, T.
    #[inline]
    pub fn exchange_ratio(&self) -> f64 {
        self.j_af / self.ms
    }

    /// Exchange torque rate `gamma * J_AF / Ms`, s⁻¹.
    #[inline]
    pub fn t_af(&self) -> f64 {
        self.gamma * self.j_af / self.ms
    }

    #[inline]
    pub fn r_ap(&self) -> f64 {
        self.rp * (1.0 + self.tmr)
    }

    /// Largest field magnitude the dynamics can see at unit SOT drive, T.
    pub fn max_field(&self, v_max: f64) -> f64 {
        self.hk
            + 2.0 * self.exchange_ratio()
            + self.applied_field.norm()
            + self.sot_efficiency * v_max.abs()
    }

    /// Default step: the fastest precession period split into 200 steps,
    /// never longer than 0.1 ps.
    pub fn default_dt(&self, v_max: f64) -> f64 {
        let h = self.max_field(v_max);
        if h <= 0.0 {
            return MAX_DEFAULT_DT;
        }
        let period = 2.0 * core::f64::consts::PI / (self.gamma * h);
        (period / 200.0).min(MAX_DEFAULT_DT)
    }
}

/// Linear temperature coefficients of the device constants, per K about
/// 300 K. Each scaled quantity is floored at zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeviceThermal {
    pub hk_coeff: f64,
    pub sot_coeff: f64,
    pub rp_coeff: f64,
    pub tmr_coeff: f64,
}

impl Default for DeviceThermal {
    fn default() -> Self {
        DeviceThermal {
            hk_coeff: -0.0008,
            sot_coeff: -0.0008,
            rp_coeff: -0.0002,
            tmr_coeff: -0.0015,
        }
    }
}

impl DeviceThermal {
    pub const NONE: DeviceThermal = DeviceThermal {
        hk_coeff: 0.0,
        sot_coeff: 0.0,
        rp_coeff: 0.0,
        tmr_coeff: 0.0,
    };

    /// `params` moved from 300 K to `temperature`.
    pub fn apply(&self, params: &DeviceParams, temperature: f64) -> DeviceParams {
        let dt = temperature - 300.0;
        let scale = |c: f64| (1.0 + c * dt).max(0.0);
        let mut p = *params;
        p.temperature = temperature;
        p.hk *= scale(self.hk_coeff);
        p.sot_efficiency *= scale(self.sot_coeff);
        p.rp *= scale(self.rp_coeff);
        p.tmr *= scale(self.tmr_coeff);
        p
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_nonpositive_damping() {
        let mut p = DeviceParams::new(DeviceKind::Afmtj);
        p.alpha = 0.0;
        assert_eq!(p.validate(), Err(Error::InvalidParams("alpha must be > 0")));
    }

    #[test]
    fn rejects_negative_exchange_and_tmr() {
        let mut p = DeviceParams::new(DeviceKind::Afmtj);
        p.j_af = -1.0;
        assert!(p.validate().is_err());
        p.j_af = 0.0;
        p.tmr = -0.1;
        assert!(p.validate().is_err());
    }

    #[test]
    fn t_af_is_derived() {
        let mut p = DeviceParams::new(DeviceKind::Afmtj);
        p.j_af = 2.0e6;
        p.ms = 1.0e6;
        assert_eq!(p.t_af(), p.gamma * 2.0);
        p.ms = 4.0e6;
        assert_eq!(p.t_af(), p.gamma * 0.5);
    }

    #[test]
    fn thermal_shift_is_identity_at_reference() {
        let p = DeviceParams::new(DeviceKind::Afmtj);
        assert_eq!(DeviceThermal::default().apply(&p, 300.0), p);
        let hot = DeviceThermal::default().apply(&p, 400.0);
        assert!(hot.tmr < p.tmr && hot.hk < p.hk);
    }

    #[test]
    fn default_dt_is_capped() {
        let mut p = DeviceParams::new(DeviceKind::Mtj);
        p.hk = 0.01;
        assert_eq!(p.default_dt(0.0), MAX_DEFAULT_DT);
        p.hk = 100.0;
        let period = 2.0 * core::f64::consts::PI / (p.gamma * 100.0);
        assert!((p.default_dt(0.0) - period / 200.0).abs() < 1e-30);
    }
}
