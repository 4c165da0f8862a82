//! Precharge, then discharge through the selected cell.

use alloc::vec::Vec;

use super::bitline::BitlineNetwork;
use super::transient::LadderSolver;
use crate::dynamics::DeviceParams;
use crate::error::{Error, Result};
use crate::Bit;

/// Precharge phase as seen by the ladder: an ideal source behind
/// `r_source`, connected for `window` seconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrechargeDrive {
    /// V
    pub v_source: f64,
    /// Ω
    pub r_source: f64,
    /// s
    pub window: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReadTiming {
    /// Sense instant after the word line opens, s.
    pub t_sense: f64,
    /// Extra evaluation time recorded after the sense instant, s.
    pub t_after: f64,
    pub dt: f64,
}

impl Default for ReadTiming {
    fn default() -> Self {
        ReadTiming {
            t_sense: 150e-12,
            t_after: 0.0,
            dt: 1e-12,
        }
    }
}

/// Sense-node voltage over the whole read.
#[derive(Debug, Clone, PartialEq)]
pub struct ReadWaveform {
    /// s, from the start of precharge
    pub t: Vec<f64>,
    pub v_sense: Vec<f64>,
    /// Word-line turn-on time, s.
    pub eval_start: f64,
    /// Sense-node voltage at `eval_start + t_sense`.
    pub v_at_sense: f64,
}

fn split(span: f64, dt: f64) -> (usize, f64) {
    if span <= 0.0 {
        return (0, 0.0);
    }
    let n = libm::ceil(span / dt - 1e-9).max(1.0) as usize;
    (n, span / n as f64)
}

fn check_timing(dt: f64) -> Result<()> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidParams("read step must be > 0"));
    }
    Ok(())
}

/// Node voltages at the end of the precharge window, starting from
/// `v0` (an empty bitline when `None`).
pub fn precharge_bitline(
    net: &BitlineNetwork,
    pre: &PrechargeDrive,
    v0: Option<&[f64]>,
    dt: f64,
) -> Result<Vec<f64>> {
    check_timing(dt)?;
    let mut s = LadderSolver::new(net, v0)?;
    let (n, h) = split(pre.window, dt);
    for _ in 0..n {
        s.step(h, pre.v_source, pre.r_source, 0.0)?;
    }
    Ok(s.voltages().to_vec())
}

/// Sense-node voltage `t_sense` after connecting `r_device` to a bitline
/// holding `v0`.
pub fn evaluate_bitline(
    net: &BitlineNetwork,
    v0: &[f64],
    r_device: f64,
    t_sense: f64,
    dt: f64,
) -> Result<f64> {
    check_timing(dt)?;
    if !(r_device > 0.0) {
        return Err(Error::InvalidParams("device resistance must be > 0"));
    }
    let mut s = LadderSolver::new(net, Some(v0))?;
    let (n, h) = split(t_sense, dt);
    for _ in 0..n {
        s.step(h, 0.0, f64::INFINITY, 1.0 / r_device)?;
    }
    Ok(s.voltages()[0])
}

/// Cell resistance for a settled stored bit.
pub fn bit_resistance(params: &DeviceParams, bit: Bit) -> f64 {
    match bit {
        Bit::Zero => params.rp,
        Bit::One => params.r_ap(),
    }
}

/// Full read of one stored bit: precharge from an empty line, then
/// discharge through the cell with the source off.
pub fn read_path_simulate(
    net: &BitlineNetwork,
    bit: Bit,
    params: &DeviceParams,
    pre: &PrechargeDrive,
    timing: &ReadTiming,
) -> Result<ReadWaveform> {
    check_timing(timing.dt)?;
    params.validate()?;
    let r_dev = bit_resistance(params, bit);
    let mut s = LadderSolver::new(net, None)?;
    let mut t = Vec::new();
    let mut v = Vec::new();
    t.push(0.0);
    v.push(s.voltages()[0]);
    let mut now = 0.0;
    let (n, h) = split(pre.window, timing.dt);
    for _ in 0..n {
        s.step(h, pre.v_source, pre.r_source, 0.0)?;
        now += h;
        t.push(now);
        v.push(s.voltages()[0]);
    }
    let eval_start = pre.window.max(0.0);
    let (n, h) = split(timing.t_sense, timing.dt);
    for _ in 0..n {
        s.step(h, 0.0, f64::INFINITY, 1.0 / r_dev)?;
        now += h;
        t.push(now);
        v.push(s.voltages()[0]);
    }
    let v_at_sense = s.voltages()[0];
    let (n, h) = split(timing.t_after, timing.dt);
    for _ in 0..n {
        s.step(h, 0.0, f64::INFINITY, 1.0 / r_dev)?;
        now += h;
        t.push(now);
        v.push(s.voltages()[0]);
    }
    Ok(ReadWaveform {
        t,
        v_sense: v,
        eval_start,
        v_at_sense,
    })
}

/// Sense-node voltages `(v_P, v_AP)` at the sense instant.
pub fn read_voltages(
    net: &BitlineNetwork,
    params: &DeviceParams,
    pre: &PrechargeDrive,
    timing: &ReadTiming,
) -> Result<(f64, f64)> {
    let v0 = precharge_bitline(net, pre, None, timing.dt)?;
    let vp = evaluate_bitline(net, &v0, params.rp, timing.t_sense, timing.dt)?;
    let vap = evaluate_bitline(net, &v0, params.r_ap(), timing.t_sense, timing.dt)?;
    Ok((vp, vap))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::bitline::build_bitline;
    use crate::dynamics::DeviceKind;

    fn setup(r_bl: f64) -> (BitlineNetwork, DeviceParams, PrechargeDrive) {
        let net = build_bitline(r_bl, 22.5e-15, 15e-15, 16, 2).unwrap();
        let p = DeviceParams::new(DeviceKind::Afmtj);
        let pre = PrechargeDrive {
            v_source: 0.3,
            r_source: 1000.0,
            window: 1e-9,
        };
        (net, p, pre)
    }

    #[test]
    fn no_tmr_no_signal() {
        let (net, mut p, pre) = setup(200.0);
        p.tmr = 0.0;
        let t = ReadTiming::default();
        let a = read_path_simulate(&net, Bit::Zero, &p, &pre, &t).unwrap();
        let b = read_path_simulate(&net, Bit::One, &p, &pre, &t).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn more_tmr_more_signal() {
        let (net, mut p, pre) = setup(200.0);
        let t = ReadTiming::default();
        p.tmr = 0.3;
        let (a, b) = read_voltages(&net, &p, &pre, &t).unwrap();
        p.tmr = 0.6;
        let (c, d) = read_voltages(&net, &p, &pre, &t).unwrap();
        assert!((d - c).abs() > (b - a).abs());
        assert!(b > a);
    }

    #[test]
    fn longer_line_develops_slower() {
        let t = ReadTiming {
            t_sense: 40e-12,
            ..Default::default()
        };
        let (n1, p, pre) = setup(100.0);
        let (n3, _, _) = setup(300.0);
        let (a, b) = read_voltages(&n1, &p, &pre, &t).unwrap();
        let (c, d) = read_voltages(&n3, &p, &pre, &t).unwrap();
        assert!((d - c).abs() < (b - a).abs());
    }

    #[test]
    fn waveform_stays_between_rails() {
        let (net, p, pre) = setup(300.0);
        let t = ReadTiming {
            t_after: 500e-12,
            ..Default::default()
        };
        let w = read_path_simulate(&net, Bit::One, &p, &pre, &t).unwrap();
        assert!(w.v_sense.iter().all(|&v| (0.0..=0.3 + 1e-12).contains(&v)));
        assert!(w.t.windows(2).all(|p| p[1] > p[0]));
    }
}
