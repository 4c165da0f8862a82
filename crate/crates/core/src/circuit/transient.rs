//! Backward-Euler nodal integration of the bitline ladder.

use alloc::vec::Vec;

use super::bitline::BitlineNetwork;
use crate::dynamics::ResistanceTrajectory;
use crate::error::{Error, Result};
use crate::waveform::Waveform;

// zero-ohm links are replaced by this many ohms
const R_FLOOR: f64 = 1e-3;

/// What hangs between the far node and ground.
#[derive(Debug, Clone, Copy)]
pub enum DeviceLoad<'a> {
    /// Word line off.
    Open,
    /// Ω
    Resistance(f64),
    Trajectory(&'a ResistanceTrajectory),
}

impl DeviceLoad<'_> {
    pub fn conductance(&self, t: f64) -> f64 {
        match self {
            DeviceLoad::Open => 0.0,
            DeviceLoad::Resistance(r) => 1.0 / r,
            DeviceLoad::Trajectory(tr) => 1.0 / tr.at(t),
        }
    }
}

/// Ideal voltage `waveform` behind `r_source`. An infinite `r_source`
/// disconnects the source.
#[derive(Debug, Clone, Copy)]
pub struct SourceDrive<W> {
    pub waveform: W,
    /// Ω
    pub r_source: f64,
}

/// Node voltages sampled every `dt`, including `t = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeWaveforms {
    pub t: Vec<f64>,
    /// `v[k][i]`: node `i` at sample `k`.
    pub v: Vec<Vec<f64>>,
}

impl NodeWaveforms {
    pub fn node(&self, i: usize) -> Vec<f64> {
        self.v.iter().map(|row| row[i]).collect()
    }

    /// First time node `i` reaches `level`, linearly interpolated.
    pub fn crossing(&self, i: usize, level: f64) -> Option<f64> {
        let mut prev = (self.t[0], self.v[0][i]);
        if prev.1 >= level {
            return Some(prev.0);
        }
        for (t, row) in self.t.iter().zip(&self.v).skip(1) {
            let v = row[i];
            if v >= level {
                let f = (level - prev.1) / (v - prev.1);
                return Some(prev.0 + f * (t - prev.0));
            }
            prev = (*t, v);
        }
        None
    }
}

/// One ladder with its working storage; advances node voltages one
/// backward-Euler step at a time.
#[derive(Debug, Clone)]
pub struct LadderSolver {
    c: Vec<f64>,
    g_link: f64,
    v: Vec<f64>,
    diag: Vec<f64>,
    rhs: Vec<f64>,
}

impl LadderSolver {
    /// Starts from `v0` (all zero when `None`).
    pub fn new(net: &BitlineNetwork, v0: Option<&[f64]>) -> Result<Self> {
        let n = net.n_nodes();
        if net.n_segments == 0 {
            return Err(Error::InvalidGeometry(
                "a bitline needs at least one segment",
            ));
        }
        let v = match v0 {
            Some(v0) if v0.len() == n => v0.to_vec(),
            Some(_) => {
                return Err(Error::InvalidGeometry(
                    "initial voltages do not match the node count",
                ))
            }
            None => alloc::vec![0.0; n],
        };
        Ok(LadderSolver {
            c: net.node_capacitances(),
            g_link: 1.0 / net.r_segment.max(R_FLOOR),
            v,
            diag: alloc::vec![0.0; n],
            rhs: alloc::vec![0.0; n],
        })
    }

    pub fn voltages(&self) -> &[f64] {
        &self.v
    }

    /// One step of length `dt`. The ideal source `v_source` feeds node 0
    /// through `r_source` (infinite when off); `g_device` loads the last
    /// node.
    pub fn step(&mut self, dt: f64, v_source: f64, r_source: f64, g_device: f64) -> Result<&[f64]> {
        let n = self.v.len();
        let g = self.g_link;
        let g0 = if r_source.is_finite() {
            1.0 / r_source.max(R_FLOOR)
        } else {
            0.0
        };
        for i in 0..n {
            let ci = self.c[i] / dt;
            let left = if i == 0 { g0 } else { g };
            let right = if i + 1 < n { g } else { g_device };
            self.diag[i] = ci + left + right;
            self.rhs[i] = ci * self.v[i];
        }
        self.rhs[0] += g0 * v_source;
        // Thomas algorithm; the off-diagonals are all -g
        for i in 1..n {
            let piv = self.diag[i - 1];
            if !(piv.abs() > 0.0) || !piv.is_finite() {
                return Err(Error::SingularNetwork);
            }
            let w = g / piv;
            self.diag[i] -= w * g;
            self.rhs[i] += w * self.rhs[i - 1];
        }
        let last = self.diag[n - 1];
        if !(last.abs() > 0.0) || !last.is_finite() {
            return Err(Error::SingularNetwork);
        }
        self.v[n - 1] = self.rhs[n - 1] / last;
        for i in (0..n - 1).rev() {
            self.v[i] = (self.rhs[i] + g * self.v[i + 1]) / self.diag[i];
        }
        Ok(&self.v)
    }
}

/// Integrate the ladder from rest (or `v0`) to `t_end`, sampling every `dt`.
pub fn transient_solve<W: Waveform>(
    net: &BitlineNetwork,
    device: DeviceLoad<'_>,
    drive: &SourceDrive<W>,
    t_end: f64,
    dt: f64,
) -> Result<NodeWaveforms> {
    transient_solve_from(net, device, drive, None, t_end, dt)
}

pub fn transient_solve_from<W: Waveform>(
    net: &BitlineNetwork,
    device: DeviceLoad<'_>,
    drive: &SourceDrive<W>,
    v0: Option<&[f64]>,
    t_end: f64,
    dt: f64,
) -> Result<NodeWaveforms> {
    if !(dt > 0.0 && dt.is_finite() && t_end >= 0.0) {
        return Err(Error::InvalidParams(
            "transient needs dt > 0 and t_end >= 0",
        ));
    }
    if !(drive.r_source >= 0.0) {
        return Err(Error::InvalidParams("source resistance must be >= 0"));
    }
    let mut s = LadderSolver::new(net, v0)?;
    let steps = libm::ceil(t_end / dt - 1e-9) as usize;
    let mut out = NodeWaveforms {
        t: Vec::with_capacity(steps + 1),
        v: Vec::with_capacity(steps + 1),
    };
    out.t.push(0.0);
    out.v.push(s.voltages().to_vec());
    for k in 1..=steps {
        let t = k as f64 * dt;
        let g_dev = device.conductance(t);
        if !(g_dev >= 0.0 && g_dev.is_finite()) {
            return Err(Error::InvalidParams("device resistance must be positive"));
        }
        let v = s.step(dt, drive.waveform.value(t), drive.r_source, g_dev)?;
        out.t.push(t);
        out.v.push(v.to_vec());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::bitline::build_bitline;
    use crate::waveform::Constant;

    #[test]
    fn lumped_rc_step() {
        let net = build_bitline(1000.0, 1e-15, 0.0, 1, 0).unwrap();
        let rc = 1e-12;
        let drive = SourceDrive {
            waveform: Constant(1.0),
            r_source: 0.0,
        };
        let dt = rc / 2000.0;
        let w = transient_solve(&net, DeviceLoad::Open, &drive, rc, dt).unwrap();
        let v = *w.v.last().unwrap().last().unwrap();
        let expect = 1.0 - libm::exp(-1.0);
        assert!((v - expect).abs() < 0.005 * expect);
        assert!((expect - 0.632).abs() < 0.001);
    }

    #[test]
    fn zero_drive_stays_at_zero() {
        let net = build_bitline(200.0, 20e-15, 10e-15, 8, 2).unwrap();
        let drive = SourceDrive {
            waveform: Constant(0.0),
            r_source: 500.0,
        };
        let w =
            transient_solve(&net, DeviceLoad::Resistance(3000.0), &drive, 1e-10, 1e-12).unwrap();
        assert!(w.v.iter().flatten().all(|&v| v == 0.0));
    }

    #[test]
    fn floating_network_is_singular() {
        let net = build_bitline(200.0, 0.0, 0.0, 4, 0).unwrap();
        let drive = SourceDrive {
            waveform: Constant(1.0),
            r_source: f64::INFINITY,
        };
        let err = transient_solve(&net, DeviceLoad::Open, &drive, 1e-12, 1e-13).unwrap_err();
        assert_eq!(err, Error::SingularNetwork);
    }

    #[test]
    fn isolated_charge_is_conserved() {
        let net = build_bitline(300.0, 30e-15, 20e-15, 16, 3).unwrap();
        let net = net.with_wire(12e-15).unwrap();
        let v0: Vec<f64> = (0..17).map(|i| 0.1 * i as f64).collect();
        let c = net.node_capacitances();
        let q = |v: &[f64]| v.iter().zip(&c).map(|(v, c)| v * c).sum::<f64>();
        let q0 = q(&v0);
        let mut s = LadderSolver::new(&net, Some(&v0)).unwrap();
        let mut prev = q0;
        for _ in 0..2000 {
            let v = s.step(1e-13, 0.0, f64::INFINITY, 0.0).unwrap();
            let now = q(v);
            assert!((now - prev).abs() <= 1e-12 * q0.abs());
            prev = now;
        }
    }
}
