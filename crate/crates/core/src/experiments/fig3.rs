//! Published write-sweep coordinates and the device constants fitted to them.

use alloc::vec::Vec;

use super::calibrate::LatencyTarget;
use crate::dynamics::{DeviceKind, DeviceParams};

/// `(V, latency ps)` of the antiferromagnetic junction.
pub const AFMTJ_LATENCY_PS: [(f64, f64); 8] = [
    (0.5, 491.2),
    (0.6, 357.4),
    (0.7, 283.2),
    (0.8, 238.0),
    (0.9, 204.1),
    (1.0, 179.6),
    (1.1, 160.7),
    (1.2, 146.7),
];

/// `(V, latency ps)` of the ferromagnetic MTJ.
pub const MTJ_LATENCY_PS: [(f64, f64); 8] = [
    (0.5, 4067.0),
    (0.6, 2517.0),
    (0.7, 1963.0),
    (0.8, 1631.0),
    (0.9, 1432.0),
    (1.0, 1332.0),
    (1.1, 1174.0),
    (1.2, 1089.0),
];

/// `(V, energy fJ)` of the antiferromagnetic junction.
pub const AFMTJ_ENERGY_FJ: [(f64, f64); 8] = [
    (0.5, 30.02),
    (0.6, 32.35),
    (0.7, 37.58),
    (0.8, 44.91),
    (0.9, 53.88),
    (1.0, 55.98),
    (1.1, 62.11),
    (1.2, 67.26),
];

/// `(V, energy fJ)` of the ferromagnetic MTJ. Not monotone at the top end.
pub const MTJ_ENERGY_FJ: [(f64, f64); 8] = [
    (0.5, 67.0),
    (0.6, 133.4),
    (0.7, 201.3),
    (0.8, 290.8),
    (0.9, 427.3),
    (1.0, 507.3),
    (1.1, 493.2),
    (1.2, 500.7),
];

/// Voltage at which the energy scale is anchored, V.
pub const ENERGY_ANCHOR_V: f64 = 0.7;

pub fn latency_targets(kind: DeviceKind) -> Vec<LatencyTarget> {
    let data = match kind {
        DeviceKind::Afmtj => &AFMTJ_LATENCY_PS,
        DeviceKind::Mtj => &MTJ_LATENCY_PS,
    };
    data.iter()
        .map(|&(v, ps)| LatencyTarget::new(v, ps * 1e-12))
        .collect()
}

/// Energy target at [`ENERGY_ANCHOR_V`], J.
pub fn energy_anchor(kind: DeviceKind) -> f64 {
    let data = match kind {
        DeviceKind::Afmtj => &AFMTJ_ENERGY_FJ,
        DeviceKind::Mtj => &MTJ_ENERGY_FJ,
    };
    data.iter()
        .find(|&&(v, _)| v == ENERGY_ANCHOR_V)
        .map(|&(_, fj)| fj * 1e-15)
        .unwrap_or(0.0)
}

/// Output of `calibrate_device` plus `fit_rp_to_energy` with default
/// settings, so runs need not repeat the fit.
pub fn calibrated(kind: DeviceKind) -> DeviceParams {
    let mut p = DeviceParams::new(kind);
    match kind {
        DeviceKind::Afmtj => {
            p.hk = 4.4657397401998615;
            p.sot_efficiency = 0.10146755271642673;
            p.j_af = 31.553118632018585;
            p.rp = 4099.833066347535;
        }
        DeviceKind::Mtj => {
            p.hk = 0.644148124065298;
            p.sot_efficiency = 0.013631776176098249;
            p.j_af = 0.0;
            p.rp = 4699.583150443226;
        }
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn anchors() {
        assert!((energy_anchor(DeviceKind::Afmtj) / 37.58e-15 - 1.0).abs() < 1e-12);
        assert!((energy_anchor(DeviceKind::Mtj) / 201.3e-15 - 1.0).abs() < 1e-12);
        assert!((latency_targets(DeviceKind::Mtj)[2].latency / 1963e-12 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn presets_validate() {
        calibrated(DeviceKind::Afmtj).validate().unwrap();
        calibrated(DeviceKind::Mtj).validate().unwrap();
    }
}
