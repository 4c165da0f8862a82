//! Right-hand sides of the coupled two-sublattice LLG system.
//!
//! The Gilbert form `dm/dt = -γ m×H + α m×dm/dt` is solved for `dm/dt`,
//! which gives the Landau-Lifshitz form
//! `dm/dt = -γ/(1+α²) [m×H + α m×(m×H)]`. The spin-orbit and exchange
//! torques are then added on top without passing through the damping term.

use super::params::{DeviceKind, DeviceParams};
use super::state::SublatticeState;
use crate::vec3::{UnitVector3, Vec3};

/// Exchange field on one sublattice from its partner, T.
#[inline]
pub fn exchange_field(params: &DeviceParams, other_m: UnitVector3) -> Vec3 {
    other_m.vec() * params.exchange_ratio()
}

/// Exchange torque `-T_AF (m_self × m_other)`, s⁻¹.
#[inline]
pub fn exchange_torque(params: &DeviceParams, m_self: UnitVector3, m_other: UnitVector3) -> Vec3 {
    m_self.vec().cross(m_other.vec()) * -params.t_af()
}

/// Uniaxial anisotropy field `Hk (m·ẑ) ẑ`.
#[inline]
pub fn anisotropy_field(params: &DeviceParams, m: UnitVector3) -> Vec3 {
    Vec3::new(0.0, 0.0, params.hk * m.z())
}

/// Exchange + anisotropy + `applied`, T.
#[inline]
pub fn effective_field(
    params: &DeviceParams,
    m_self: UnitVector3,
    m_other: UnitVector3,
    applied: Vec3,
) -> Vec3 {
    exchange_field(params, m_other) + anisotropy_field(params, m_self) + applied
}

/// Damping-like spin-orbit torque `-γ η V m×(m×σ̂)`, s⁻¹.
#[inline]
pub fn sot_torque(params: &DeviceParams, m: UnitVector3, v_applied: f64) -> Vec3 {
    sot_raw(params, m.vec(), v_applied)
}

/// Landau-Lifshitz precession + damping about `h`.
#[inline]
fn ll_term(params: &DeviceParams, m: Vec3, h: Vec3) -> Vec3 {
    let pref = -params.gamma / (1.0 + params.alpha * params.alpha);
    let mxh = m.cross(h);
    (mxh + m.cross(mxh) * params.alpha) * pref
}

#[inline]
fn sot_raw(params: &DeviceParams, m: Vec3, v_applied: f64) -> Vec3 {
    let a = params.gamma * params.sot_efficiency * v_applied;
    if a == 0.0 {
        return Vec3::ZERO;
    }
    m.cross(m.cross(params.sigma_hat.vec())) * -a
}

/// Derivative of one sublattice given its partner. Works on raw vectors so
/// intermediate Runge-Kutta stages need not be normalized.
#[inline]
fn sublattice_raw(params: &DeviceParams, m: Vec3, other: Vec3, sot_sign: f64, v: f64) -> Vec3 {
    let j = params.exchange_ratio();
    let h = other * j + Vec3::new(0.0, 0.0, params.hk * m.z) + params.applied_field;
    let mut d = ll_term(params, m, h);
    if sot_sign != 0.0 {
        d += sot_raw(params, m, v) * sot_sign;
    }
    if j != 0.0 {
        d += m.cross(other) * -params.t_af();
    }
    d
}

#[inline]
fn mtj_raw(params: &DeviceParams, m: Vec3, v: f64) -> Vec3 {
    let h = Vec3::new(0.0, 0.0, params.hk * m.z) + params.applied_field;
    ll_term(params, m, h) + sot_raw(params, m, v) * params.sot_signs[0]
}

#[inline]
pub(crate) fn rhs_raw(params: &DeviceParams, m1: Vec3, m2: Vec3, v: f64) -> (Vec3, Vec3) {
    match params.kind {
        DeviceKind::Afmtj => (
            sublattice_raw(params, m1, m2, params.sot_signs[0], v),
            sublattice_raw(params, m2, m1, params.sot_signs[1], v),
        ),
        DeviceKind::Mtj => {
            let d = mtj_raw(params, m1, v);
            (d, -d)
        }
    }
}

/// `(dm1/dt, dm2/dt)` for the coupled pair.
///
/// For an [`DeviceKind::Mtj`] block only `m1` is physical; the returned
/// `dm2/dt` is `-dm1/dt` so the mirror stays a mirror.
pub fn llg_rhs(params: &DeviceParams, state: &SublatticeState, v_applied: f64) -> (Vec3, Vec3) {
    rhs_raw(params, state.m1.vec(), state.m2.vec(), v_applied)
}

/// Single free-layer LLG: no exchange, SOT with the sublattice-1 sign.
pub fn mtj_llg_rhs(params: &DeviceParams, m: UnitVector3, v_applied: f64) -> Vec3 {
    mtj_raw(params, m.vec(), v_applied)
}

/// Magnetic energy per unit moment, T, whose gradient is the effective
/// field: `-(J_AF/Ms) m1·m2 - ½Hk Σ mz² - H·Σ m`. Undriven dynamics never
/// increase it.
pub fn field_energy(params: &DeviceParams, state: &SublatticeState) -> f64 {
    let (m1, m2) = (state.m1.vec(), state.m2.vec());
    let h = params.applied_field;
    match params.kind {
        DeviceKind::Afmtj => {
            -params.exchange_ratio() * m1.dot(m2)
                - 0.5 * params.hk * (m1.z * m1.z + m2.z * m2.z)
                - h.dot(m1 + m2)
        }
        DeviceKind::Mtj => -0.5 * params.hk * m1.z * m1.z - h.dot(m1),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::params::DeviceKind;

    fn unit(x: f64, y: f64, z: f64) -> UnitVector3 {
        UnitVector3::new(Vec3::new(x, y, z)).unwrap()
    }

    fn bare() -> DeviceParams {
        let mut p = DeviceParams::new(DeviceKind::Afmtj);
        p.hk = 0.0;
        p.j_af = 0.0;
        p.sot_efficiency = 0.0;
        p
    }

    #[test]
    fn exchange_field_examples() {
        let mut p = bare();
        p.ms = 1.0;
        p.j_af = 1.0;
        assert_eq!(exchange_field(&p, UnitVector3::Z), Vec3::new(0.0, 0.0, 1.0));
        p.j_af = 0.0;
        assert_eq!(exchange_field(&p, unit(0.3, -0.2, 0.9)), Vec3::ZERO);
        p.j_af = 2.5;
        let h = exchange_field(&p, unit(0.6, 0.8, 0.0));
        // 2.5 * 0.6 and 2.5 * 0.8
        assert!((h.x - 1.5).abs() < 1e-15);
        assert!((h.y - 2.0).abs() < 1e-15);
        assert_eq!(h.z, 0.0);
    }

    #[test]
    fn exchange_torque_examples() {
        let mut p = bare();
        p.j_af = 1.0;
        p.ms = 1.0;
        p.gamma = 1.0;
        let z = UnitVector3::Z;
        assert_eq!(exchange_torque(&p, z, z), Vec3::ZERO);
        assert_eq!(exchange_torque(&p, z, -z).norm(), 0.0);
        let t = exchange_torque(&p, UnitVector3::X, UnitVector3::Y);
        assert_eq!(t, Vec3::new(0.0, 0.0, -1.0));
    }

    #[test]
    fn effective_field_examples() {
        let mut p = bare();
        assert_eq!(
            effective_field(&p, UnitVector3::Z, -UnitVector3::Z, Vec3::ZERO),
            Vec3::ZERO
        );
        p.hk = 0.1;
        assert_eq!(
            effective_field(&p, UnitVector3::Z, -UnitVector3::Z, Vec3::ZERO),
            Vec3::new(0.0, 0.0, 0.1)
        );
        assert_eq!(
            effective_field(&p, UnitVector3::X, -UnitVector3::Z, Vec3::ZERO),
            Vec3::ZERO
        );
    }

    #[test]
    fn sot_torque_examples() {
        let mut p = bare();
        p.sot_efficiency = 0.05;
        assert_eq!(sot_torque(&p, UnitVector3::X, 0.0), Vec3::ZERO);
        p.sigma_hat = unit(0.2, 0.3, 0.9);
        assert!(sot_torque(&p, p.sigma_hat, 1.0).norm() < 1e-3);

        // γ·η·V = 1, m = ẑ, σ̂ = x̂
        p.gamma = 1.0;
        p.sot_efficiency = 1.0;
        p.sigma_hat = UnitVector3::X;
        let t = sot_torque(&p, UnitVector3::Z, 1.0);
        // oracle: z × x = y, z × y = -x, negated -> +x
        let zx = Vec3::new(
            0.0 * 0.0 - 1.0 * 0.0,
            1.0 * 1.0 - 0.0 * 0.0,
            0.0 * 0.0 - 0.0 * 1.0,
        );
        let zzx = Vec3::new(
            0.0 * zx.z - 1.0 * zx.y,
            1.0 * zx.x - 0.0 * zx.z,
            0.0 * zx.y - 0.0 * zx.x,
        );
        assert_eq!(t, -zzx);
        assert_eq!(t, Vec3::X);
    }

    #[test]
    fn sot_along_sigma_is_exactly_zero() {
        let mut p = bare();
        p.sot_efficiency = 1.0;
        p.sigma_hat = UnitVector3::X;
        assert_eq!(sot_torque(&p, UnitVector3::X, 2.0), Vec3::ZERO);
    }

    #[test]
    fn zero_fields_give_zero_derivatives() {
        let p = bare();
        let s = SublatticeState::new(unit(0.3, 0.4, 0.5), unit(-0.1, 0.9, 0.2), 0.0);
        let (d1, d2) = llg_rhs(&p, &s, 0.0);
        assert_eq!(d1, Vec3::ZERO);
        assert_eq!(d2, Vec3::ZERO);
    }

    #[test]
    fn undamped_precession_direction() {
        // α → 0 limit of dm/dt = -γ m×H with m = x̂, H = H0 ẑ: x̂ × ẑ = -ŷ
        let mut p = bare();
        p.alpha = 1e-300;
        p.applied_field = Vec3::new(0.0, 0.0, 2.0);
        let d = mtj_llg_rhs(&p, UnitVector3::X, 0.0);
        let expect = p.gamma * 2.0;
        assert!((d.y - expect).abs() < 1e-12 * expect);
        assert!(d.x.abs() < 1e-12 * expect && d.z.abs() < 1e-12 * expect);
    }

    #[test]
    fn damping_pulls_toward_field() {
        let mut p = bare();
        p.alpha = 0.1;
        p.applied_field = Vec3::new(0.0, 0.0, 1.0);
        let m = unit(1.0, 0.0, 0.2);
        let d = mtj_llg_rhs(&p, m, 0.0);
        // d/dt (m·Ĥ) = dm/dt · ẑ
        assert!(d.z > 0.0);
        // finite-difference check of the Zeeman energy -m·H along the flow
        let h = 1e-15;
        let m2 = UnitVector3::new(m.vec() + d * h).unwrap();
        let e0 = -m.vec().dot(p.applied_field);
        let e1 = -m2.vec().dot(p.applied_field);
        assert!(e1 < e0);
    }

    #[test]
    fn mtj_and_decoupled_afmtj_agree_on_sublattice_one() {
        let mut p = bare();
        p.hk = 0.8;
        p.sot_efficiency = 0.02;
        p.alpha = 0.02;
        let m1 = unit(0.1, 0.2, 0.97);
        let s = SublatticeState::new(m1, unit(0.3, 0.1, -0.9), 0.0);
        let (d1, _) = llg_rhs(&p, &s, 0.7);
        let mut q = p;
        q.kind = DeviceKind::Mtj;
        assert_eq!(d1, mtj_llg_rhs(&q, m1, 0.7));
    }
}
