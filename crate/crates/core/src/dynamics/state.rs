use crate::vec3::{UnitVector3, Vec3};

/// Snapshot of one junction: both sublattice directions at time `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SublatticeState {
    pub m1: UnitVector3,
    pub m2: UnitVector3,
    /// s
    pub t: f64,
}

impl SublatticeState {
    pub fn new(m1: UnitVector3, m2: UnitVector3, t: f64) -> Self {
        SublatticeState { m1, m2, t }
    }

    /// `L = m1 - m2`.
    #[inline]
    pub fn neel_vector(&self) -> Vec3 {
        self.m1.vec() - self.m2.vec()
    }

    /// Antiparallel pair with `m1` tilted by `tilt` rad from `+z` (or `-z`
    /// when `up` is false) toward `+y`.
    ///
    /// The pair is a π rotation about `x̂` of itself, so the dynamics keep
    /// `m2 = R_x m1` for any exchange strength.
    pub fn tilted(tilt: f64, up: bool) -> Self {
        let m1 = UnitVector3::from_angles(tilt, core::f64::consts::FRAC_PI_2);
        let m1 = if up { m1 } else { rotate_x_pi(m1) };
        SublatticeState::new(m1, rotate_x_pi(m1), 0.0)
    }
}

/// π rotation about `x̂`: `(x, y, z) -> (x, -y, -z)`.
pub fn rotate_x_pi(m: UnitVector3) -> UnitVector3 {
    UnitVector3::new(Vec3::new(m.x(), -m.y(), -m.z())).expect("rotation preserves length")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn neel_is_exact_difference() {
        let a = UnitVector3::new(Vec3::new(0.1, 0.2, 0.3)).unwrap();
        let b = UnitVector3::new(Vec3::new(-0.7, 0.2, 0.05)).unwrap();
        let s = SublatticeState::new(a, b, 0.0);
        let l = s.neel_vector();
        assert_eq!(l.x, a.x() - b.x());
        assert_eq!(l.y, a.y() - b.y());
        assert_eq!(l.z, a.z() - b.z());
    }

    #[test]
    fn tilted_pair_is_antiparallel() {
        let s = SublatticeState::tilted(0.3, true);
        let sum = s.m1.vec() + s.m2.vec();
        assert!(sum.norm() < 1e-15);
        assert!((s.m1.z() - libm::cos(0.3)).abs() < 1e-15);
        let d = SublatticeState::tilted(0.3, false);
        assert!((d.m1.z() + libm::cos(0.3)).abs() < 1e-15);
    }
}
