//! Tabulated read latency and energy at the characterized PVT corners.

use super::sense::SaVariant;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Corner {
    pub name: &'static str,
    /// V
    pub vdd: f64,
    /// °C
    pub temperature_c: f64,
}

/// Slow, typical and fast corners, in that order.
pub const CORNERS: [Corner; 3] = [
    Corner {
        name: "SS",
        vdd: 0.81,
        temperature_c: -40.0,
    },
    Corner {
        name: "TT",
        vdd: 0.90,
        temperature_c: 25.0,
    },
    Corner {
        name: "FF",
        vdd: 0.99,
        temperature_c: 85.0,
    },
];

/// Read figures for one sense-amplifier scheme, indexed like [`CORNERS`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReadTable {
    /// ns
    pub latency_ns: [f64; 3],
    /// fJ
    pub energy_fj: [f64; 3],
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReadTables {
    pub baseline: ReadTable,
    pub plus: ReadTable,
}

impl Default for ReadTables {
    fn default() -> Self {
        ReadTables {
            baseline: ReadTable {
                latency_ns: [0.6, 0.8, 0.9],
                energy_fj: [0.0505, 0.0733, 0.111],
            },
            plus: ReadTable {
                latency_ns: [0.6, 0.8, 0.9],
                energy_fj: [0.0123, 0.0128, 0.0140],
            },
        }
    }
}

impl ReadTables {
    pub fn table(&self, sa: SaVariant) -> &ReadTable {
        match sa {
            SaVariant::Baseline => &self.baseline,
            SaVariant::Plus => &self.plus,
        }
    }

    /// Energy per read, J.
    pub fn read_energy(&self, sa: SaVariant, vdd: f64, temperature_c: f64) -> Result<f64> {
        Ok(lookup(&self.table(sa).energy_fj, vdd, temperature_c)? * 1e-15)
    }

    /// Read latency, s.
    pub fn read_latency(&self, sa: SaVariant, vdd: f64, temperature_c: f64) -> Result<f64> {
        Ok(lookup(&self.table(sa).latency_ns, vdd, temperature_c)? * 1e-9)
    }

    /// Ratio of the reduced-swing read energy to the baseline at each corner.
    pub fn swing_scale(&self) -> [f64; 3] {
        let mut s = [0.0; 3];
        for (i, v) in s.iter_mut().enumerate() {
            *v = self.plus.energy_fj[i] / self.baseline.energy_fj[i];
        }
        s
    }
}

/// Position along the SS-TT-FF path: the mean of the normalized supply
/// and temperature coordinates.
fn corner_coordinate(vdd: f64, temperature_c: f64) -> f64 {
    let (lo, hi) = (&CORNERS[0], &CORNERS[2]);
    let a = (vdd - lo.vdd) / (hi.vdd - lo.vdd);
    let b = (temperature_c - lo.temperature_c) / (hi.temperature_c - lo.temperature_c);
    0.5 * (a + b)
}

fn lookup(values: &[f64; 3], vdd: f64, temperature_c: f64) -> Result<f64> {
    let (lo, hi) = (&CORNERS[0], &CORNERS[2]);
    let eps = 1e-9;
    let inside = vdd >= lo.vdd - eps
        && vdd <= hi.vdd + eps
        && temperature_c >= lo.temperature_c - eps
        && temperature_c <= hi.temperature_c + eps;
    if !inside {
        return Err(Error::UnknownCorner { vdd, temperature_c });
    }
    for (c, v) in CORNERS.iter().zip(values) {
        if (c.vdd - vdd).abs() < eps && (c.temperature_c - temperature_c).abs() < eps {
            return Ok(*v);
        }
    }
    let u = corner_coordinate(vdd, temperature_c).clamp(0.0, 1.0);
    let u_tt = corner_coordinate(CORNERS[1].vdd, CORNERS[1].temperature_c);
    let (i, u0, u1) = if u <= u_tt {
        (0, 0.0, u_tt)
    } else {
        (1, u_tt, 1.0)
    };
    let f = (u - u0) / (u1 - u0);
    Ok(values[i] + (values[i + 1] - values[i]) * f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corners_are_exact() {
        let t = ReadTables::default();
        for (i, c) in CORNERS.iter().enumerate() {
            for sa in [SaVariant::Baseline, SaVariant::Plus] {
                let e = t.read_energy(sa, c.vdd, c.temperature_c).unwrap();
                assert_eq!(e, t.table(sa).energy_fj[i] * 1e-15);
            }
        }
        let tt = t.read_latency(SaVariant::Plus, 0.90, 25.0).unwrap();
        assert_eq!(tt, 0.8 * 1e-9);
    }

    #[test]
    fn outside_envelope_is_unknown() {
        let t = ReadTables::default();
        let e = t.read_energy(SaVariant::Plus, 1.1, 25.0).unwrap_err();
        assert_eq!(e.name(), "UnknownCorner");
        assert!(t.read_latency(SaVariant::Baseline, 0.9, 100.0).is_err());
    }

    #[test]
    fn off_corner_is_bracketed() {
        let t = ReadTables::default();
        for sa in [SaVariant::Baseline, SaVariant::Plus] {
            let e = t.read_energy(sa, 0.85, 0.0).unwrap();
            let ss = t.read_energy(sa, 0.81, -40.0).unwrap();
            let tt = t.read_energy(sa, 0.90, 25.0).unwrap();
            assert!(e > ss.min(tt) && e < ss.max(tt));
        }
    }

    #[test]
    fn plus_never_costs_more() {
        let t = ReadTables::default();
        for i in 0..3 {
            assert!(t.plus.energy_fj[i] <= t.baseline.energy_fj[i]);
        }
    }
}
