//! Three-component vectors and the unit-vector newtype used for magnetization.

use core::ops::{Add, AddAssign, Mul, Neg, Sub};

/// Plain Cartesian vector. Fields and torques live here.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3::new(0.0, 0.0, 0.0);
    pub const X: Vec3 = Vec3::new(1.0, 0.0, 0.0);
    pub const Y: Vec3 = Vec3::new(0.0, 1.0, 0.0);
    pub const Z: Vec3 = Vec3::new(0.0, 0.0, 1.0);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    #[inline]
    pub fn dot(self, o: Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    #[inline]
    pub fn cross(self, o: Vec3) -> Vec3 {
        Vec3 {
            x: self.y * o.z - self.z * o.y,
            y: self.z * o.x - self.x * o.z,
            z: self.x * o.y - self.y * o.x,
        }
    }

    #[inline]
    pub fn norm(self) -> f64 {
        libm::sqrt(self.dot(self))
    }

    /// Angle between two vectors in radians, robust near 0 and pi.
    pub fn angle_to(self, o: Vec3) -> f64 {
        libm::atan2(self.cross(o).norm(), self.dot(o))
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    #[inline]
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl AddAssign for Vec3 {
    #[inline]
    fn add_assign(&mut self, o: Vec3) {
        self.x += o.x;
        self.y += o.y;
        self.z += o.z;
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    #[inline]
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    #[inline]
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    #[inline]
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Mul<Vec3> for f64 {
    type Output = Vec3;
    #[inline]
    fn mul(self, v: Vec3) -> Vec3 {
        v * self
    }
}

/// A vector of Euclidean length one.
///
/// The only way to build one is through [`UnitVector3::new`], which
/// normalizes, so every value handed out satisfies `|v| = 1` to rounding.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitVector3(Vec3);

impl UnitVector3 {
    pub const X: UnitVector3 = UnitVector3(Vec3::X);
    pub const Y: UnitVector3 = UnitVector3(Vec3::Y);
    pub const Z: UnitVector3 = UnitVector3(Vec3::Z);

    /// Normalizes `v`. Returns `None` for the zero vector or non-finite input.
    pub fn new(v: Vec3) -> Option<Self> {
        if !(v.x.is_finite() && v.y.is_finite() && v.z.is_finite()) {
            return None;
        }
        let scale = v.x.abs().max(v.y.abs()).max(v.z.abs());
        if scale == 0.0 {
            return None;
        }
        let v = v * (1.0 / scale);
        let mut u = v * (1.0 / v.norm());
        // one Newton correction keeps |u| - 1 at the rounding floor
        let n2 = u.dot(u);
        u = u * (1.5 - 0.5 * n2);
        Some(UnitVector3(u))
    }

    /// Unit vector from polar angle `theta` (from +z) and azimuth `phi`.
    pub fn from_angles(theta: f64, phi: f64) -> Self {
        let s = libm::sin(theta);
        UnitVector3::new(Vec3::new(
            s * libm::cos(phi),
            s * libm::sin(phi),
            libm::cos(theta),
        ))
        .expect("spherical coordinates are never zero length")
    }

    #[inline]
    pub fn vec(self) -> Vec3 {
        self.0
    }

    #[inline]
    pub fn x(self) -> f64 {
        self.0.x
    }

    #[inline]
    pub fn y(self) -> f64 {
        self.0.y
    }

    #[inline]
    pub fn z(self) -> f64 {
        self.0.z
    }
}

impl Neg for UnitVector3 {
    type Output = UnitVector3;
    fn neg(self) -> UnitVector3 {
        UnitVector3(-self.0)
    }
}

impl From<UnitVector3> for Vec3 {
    fn from(u: UnitVector3) -> Vec3 {
        u.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cross_of_basis() {
        assert_eq!(Vec3::X.cross(Vec3::Y), Vec3::Z);
        assert_eq!(Vec3::Y.cross(Vec3::Z), Vec3::X);
        assert_eq!(Vec3::Z.cross(Vec3::X), Vec3::Y);
    }

    #[test]
    fn zero_is_not_a_direction() {
        assert!(UnitVector3::new(Vec3::ZERO).is_none());
        assert!(UnitVector3::new(Vec3::new(f64::NAN, 0.0, 1.0)).is_none());
    }

    #[test]
    fn normalization_hits_unit_length() {
        let u = UnitVector3::new(Vec3::new(3.0, -4.0, 12.0)).unwrap();
        assert!((u.vec().norm() - 1.0).abs() < 1e-15);
        let tiny = UnitVector3::new(Vec3::new(1e-200, 2e-200, 0.0)).unwrap();
        assert!((tiny.vec().norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn angle_between_opposites() {
        assert!((Vec3::Z.angle_to(-Vec3::Z) - core::f64::consts::PI).abs() < 1e-15);
        assert_eq!(Vec3::Z.angle_to(Vec3::Z), 0.0);
    }
}
