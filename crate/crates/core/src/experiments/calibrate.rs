//! Fitting device constants to measured (voltage, write latency) pairs.
//!
//! The fit minimizes the largest relative latency error over all targets.
//! A closed-form macrospin estimate seeds a Nelder-Mead search over
//! `(ln η, ln Hk, exchange)`.

use alloc::vec::Vec;

use crate::dynamics::{switching_latency, DeviceKind, DeviceParams, SublatticeState};
use crate::error::{Error, Result};
use crate::waveform::Trapezoid;

/// One calibration point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatencyTarget {
    /// V
    pub voltage: f64,
    /// s
    pub latency: f64,
}

impl LatencyTarget {
    pub const fn new(voltage: f64, latency: f64) -> Self {
        LatencyTarget { voltage, latency }
    }
}

/// How a latency is measured for a given set of constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatencyProbe {
    /// Polar tilt of the starting state, rad.
    pub initial_tilt: f64,
    pub threshold: f64,
    /// s
    pub t_rise: f64,
    /// s
    pub t_fall: f64,
}

impl Default for LatencyProbe {
    fn default() -> Self {
        LatencyProbe {
            initial_tilt: 0.5,
            threshold: crate::dynamics::DEFAULT_SUCCESS_THRESHOLD,
            t_rise: 16e-12,
            t_fall: 16e-12,
        }
    }
}

impl LatencyProbe {
    pub fn initial_state(&self) -> SublatticeState {
        SublatticeState::tilted(self.initial_tilt, true)
    }

    /// Pulse of amplitude `v` whose flat top lasts `window`.
    pub fn pulse(&self, v: f64, window: f64) -> Trapezoid {
        Trapezoid::new(v, self.t_rise, window, self.t_fall)
    }

    /// Switching latency under a pulse long enough to hold for `window`.
    pub fn latency(&self, params: &DeviceParams, v: f64, window: f64) -> Result<Option<f64>> {
        switching_latency(
            params,
            self.initial_state(),
            self.pulse(v, window),
            self.threshold,
        )
    }
}

/// Which tolerance the finished fit satisfies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitLevel {
    /// Every target within 5 %.
    Tight,
    /// Every target within the 15 % fallback.
    Relaxed,
}

impl FitLevel {
    pub fn label(self) -> &'static str {
        match self {
            FitLevel::Tight => "within 5%",
            FitLevel::Relaxed => "within 15% (fallback)",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationSettings {
    pub probe: LatencyProbe,
    /// Upper bound on `J_AF/Ms` as a fraction of `Hk`. Above roughly 0.2
    /// the antiparallel ground state is no longer stable.
    pub max_exchange_fraction: f64,
    pub max_evaluations: usize,
    pub tight_tolerance: f64,
    pub fallback_tolerance: f64,
}

impl Default for CalibrationSettings {
    fn default() -> Self {
        CalibrationSettings {
            probe: LatencyProbe::default(),
            max_exchange_fraction: 0.18,
            max_evaluations: 400,
            tight_tolerance: 0.05,
            fallback_tolerance: 0.15,
        }
    }
}

/// Outcome of [`calibrate_device`].
#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationReport {
    pub params: DeviceParams,
    /// `(V, target, achieved)`; `achieved` is `None` for a target that did
    /// not switch.
    pub points: Vec<(f64, f64, Option<f64>)>,
    pub max_rel_error: f64,
    pub level: FitLevel,
    pub evaluations: usize,
}

/// Closed-form latency of a single spin under anti-damping torque with the
/// torque axis along the easy axis: `u = cos θ` obeys
/// `du/dt = -γη (1-u²)(V - Vc u)` with `Vc = α Hk / ((1+α²) η)`.
///
/// Returns the integral `∫ du / ((1-u²)(V - Vc u))` from `-threshold` to
/// `cos(tilt)`; latency is that over `γη`. `None` when `V <= Vc·cos(tilt)`.
pub fn macrospin_integral(v: f64, vc: f64, tilt: f64, threshold: f64) -> Option<f64> {
    let u0 = libm::cos(tilt);
    let u1 = -threshold;
    if v <= vc * u0 || v <= -vc * u1 {
        return None;
    }
    let d = v * v - vc * vc;
    if d.abs() > 1e-9 * v * v {
        // partial fractions: A/(1-u) + B/(1+u) + C/(V - Vc u)
        let a = 0.5 / (v - vc);
        let b = 0.5 / (v + vc);
        let c_over_vc = -vc / d;
        let big_f = |u: f64| {
            -a * libm::log(1.0 - u) + b * libm::log(1.0 + u) - c_over_vc * libm::log(v - vc * u)
        };
        return Some(big_f(u0) - big_f(u1));
    }
    // V = Vc: Simpson on an even grid; the integrand is smooth inside (-1, 1)
    let n = 400;
    let h = (u0 - u1) / n as f64;
    let f = |u: f64| 1.0 / ((1.0 - u * u) * (v - vc * u));
    let mut s = f(u1) + f(u0);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(u1 + i as f64 * h);
    }
    Some(s * h / 3.0)
}

/// Best `(η, Hk)` for a single spin under the closed-form model, by a
/// golden-section search over the critical voltage with the scale chosen
/// to balance the extreme relative errors.
pub fn macrospin_estimate(
    base: &DeviceParams,
    probe: &LatencyProbe,
    targets: &[LatencyTarget],
) -> Option<(f64, f64, f64)> {
    let v_min = targets
        .iter()
        .map(|t| t.voltage)
        .fold(f64::INFINITY, f64::min);
    let fit = |vc: f64| -> Option<(f64, f64)> {
        let mut lo = f64::INFINITY;
        let mut hi = 0.0_f64;
        for t in targets {
            let i = macrospin_integral(t.voltage, vc, probe.initial_tilt, probe.threshold)?;
            let eff = t.latency - 0.5 * probe.t_rise;
            if eff <= 0.0 {
                return None;
            }
            let r = i / eff;
            lo = lo.min(r);
            hi = hi.max(r);
        }
        // k * r_i - 1 is the relative error; k balances the extremes
        let k = 2.0 / (lo + hi);
        Some((k, (hi - lo) / (hi + lo)))
    };
    let cap = v_min / libm::cos(probe.initial_tilt).max(probe.threshold) * 0.999;
    let (mut a, mut b) = (0.0, cap);
    let g = 0.618_033_988_749_894_8;
    let err = |vc: f64| fit(vc).map_or(f64::INFINITY, |f| f.1);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    for _ in 0..80 {
        if err(c) < err(d) {
            b = d;
        } else {
            a = c;
        }
        c = b - g * (b - a);
        d = a + g * (b - a);
    }
    let vc = 0.5 * (a + b);
    let (k, e) = fit(vc)?;
    // k is 1/(γη) in seconds per volt-integral unit
    let eta = 1.0 / (k * base.gamma);
    let alpha_eff = base.alpha / (1.0 + base.alpha * base.alpha);
    let hk = vc * eta / alpha_eff;
    Some((eta, hk, e))
}

fn with_coords(base: &DeviceParams, x: &[f64], max_frac: f64) -> DeviceParams {
    let mut p = *base;
    p.sot_efficiency = libm::exp(x[0]);
    p.hk = libm::exp(x[1]);
    p.j_af = if base.kind == DeviceKind::Afmtj && x.len() > 2 {
        let frac = max_frac * 0.5 * (1.0 + libm::sin(x[2]));
        frac * p.hk * p.ms
    } else {
        0.0
    };
    p
}

/// Largest relative latency error of `params` over `targets`, with the
/// per-target results. A target that does not switch inside its window
/// scores as a 100 % error.
pub fn latency_errors(
    params: &DeviceParams,
    probe: &LatencyProbe,
    targets: &[LatencyTarget],
) -> (f64, Vec<(f64, f64, Option<f64>)>) {
    let mut worst = 0.0_f64;
    let mut points = Vec::with_capacity(targets.len());
    for t in targets {
        // anything slower than 1.6x the target is already a > 60 % miss
        let window = 1.6 * t.latency + 50e-12;
        let got = probe.latency(params, t.voltage, window).ok().flatten();
        let e = match got {
            Some(l) => libm::fabs(l - t.latency) / t.latency,
            None => 1.0,
        };
        worst = worst.max(e);
        points.push((t.voltage, t.latency, got));
    }
    (worst, points)
}

/// Fit `sot_efficiency`, `hk` and (for an AFMTJ) `j_af` of `base` so that
/// simulated latencies match `targets`.
pub fn calibrate_device(
    base: &DeviceParams,
    targets: &[LatencyTarget],
    settings: &CalibrationSettings,
) -> Result<CalibrationReport> {
    base.validate()?;
    if targets.is_empty() {
        return Err(Error::InvalidParams(
            "calibration needs at least one target",
        ));
    }
    if targets
        .iter()
        .any(|t| !(t.voltage > 0.0 && t.latency > 0.0))
    {
        return Err(Error::InvalidParams(
            "targets need positive voltage and latency",
        ));
    }
    if targets
        .windows(2)
        .any(|w| !(w[1].voltage > w[0].voltage && w[1].latency < w[0].latency))
    {
        return Err(Error::InvalidParams(
            "targets must be sorted by voltage with decreasing latency",
        ));
    }
    let probe = &settings.probe;
    let (eta0, hk0) = if targets.len() >= 2 {
        let (eta, hk, _) =
            macrospin_estimate(base, probe, targets).ok_or(Error::CalibrationFailed {
                max_rel_error: f64::INFINITY,
            })?;
        (eta, hk)
    } else {
        (base.sot_efficiency, base.hk)
    };
    let mut x0 = Vec::from([libm::log(eta0.max(1e-12)), libm::log(hk0.max(1e-9))]);
    if base.kind == DeviceKind::Afmtj {
        // start at a quarter of the allowed exchange range
        x0.push(libm::asin(-0.5));
    }
    let max_frac = settings.max_exchange_fraction;
    let objective = |x: &[f64]| {
        let p = with_coords(base, x, max_frac);
        latency_errors(&p, probe, targets).0
    };
    let steps: Vec<f64> = x0
        .iter()
        .enumerate()
        .map(|(i, _)| if i < 2 { 0.08 } else { 0.8 })
        .collect();
    let (mut best, mut f_best, mut evals) =
        nelder_mead(&objective, &x0, &steps, settings.max_evaluations, 1e-4);
    // one restart from the best vertex with a smaller simplex
    if f_best > settings.tight_tolerance * 0.5 && evals < settings.max_evaluations {
        let small: Vec<f64> = steps.iter().map(|s| s * 0.3).collect();
        let (b2, f2, e2) = nelder_mead(
            &objective,
            &best,
            &small,
            settings.max_evaluations - evals,
            1e-5,
        );
        evals += e2;
        if f2 < f_best {
            best = b2;
            f_best = f2;
        }
    }
    let params = with_coords(base, &best, max_frac);
    let (max_rel_error, points) = latency_errors(&params, probe, targets);
    debug_assert!((max_rel_error - f_best).abs() < 1e-12);
    let level = if max_rel_error <= settings.tight_tolerance {
        FitLevel::Tight
    } else if max_rel_error <= settings.fallback_tolerance {
        FitLevel::Relaxed
    } else {
        return Err(Error::CalibrationFailed { max_rel_error });
    };
    Ok(CalibrationReport {
        params,
        points,
        max_rel_error,
        level,
        evaluations: evals,
    })
}

/// Derivative-free simplex minimization. Returns the best point, its
/// value and the number of function evaluations spent.
pub fn nelder_mead<F: Fn(&[f64]) -> f64>(
    f: &F,
    x0: &[f64],
    step: &[f64],
    max_evals: usize,
    f_tol: f64,
) -> (Vec<f64>, f64, usize) {
    let n = x0.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let mut evals = 0usize;
    let eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let f0 = eval(x0, &mut evals);
    simplex.push((x0.to_vec(), f0));
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += step[i];
        let v = eval(&x, &mut evals);
        simplex.push((x, v));
    }
    let combine = |a: &[f64], b: &[f64], t: f64| -> Vec<f64> {
        a.iter().zip(b).map(|(ai, bi)| ai + t * (bi - ai)).collect()
    };
    while evals < max_evals {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        if simplex[n].1 - simplex[0].1 <= f_tol * (1.0 + libm::fabs(simplex[0].1)) {
            break;
        }
        let mut centroid = alloc::vec![0.0; n];
        for (x, _) in &simplex[..n] {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / n as f64;
            }
        }
        let worst = simplex[n].clone();
        let xr = combine(&centroid, &worst.0, -1.0);
        let fr = eval(&xr, &mut evals);
        if fr < simplex[0].1 {
            let xe = combine(&centroid, &worst.0, -2.0);
            let fe = eval(&xe, &mut evals);
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
        } else {
            let (xc, fc) = if fr < worst.1 {
                let xc = combine(&centroid, &xr, 0.5);
                let fc = eval(&xc, &mut evals);
                (xc, fc)
            } else {
                let xc = combine(&centroid, &worst.0, 0.5);
                let fc = eval(&xc, &mut evals);
                (xc, fc)
            };
            if fc < worst.1.min(fr) {
                simplex[n] = (xc, fc);
            } else {
                let best = simplex[0].0.clone();
                for v in simplex.iter_mut().skip(1) {
                    v.0 = combine(&best, &v.0, 0.5);
                    v.1 = eval(&v.0, &mut evals);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, v) = simplex.swap_remove(0);
    (x, v, evals)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nelder_mead_finds_quadratic_minimum() {
        let f = |x: &[f64]| (x[0] - 1.0).powi(2) + 3.0 * (x[1] + 2.0).powi(2);
        let (x, v, _) = nelder_mead(&f, &[0.0, 0.0], &[0.5, 0.5], 2000, 1e-14);
        assert!(v < 1e-8);
        assert!((x[0] - 1.0).abs() < 1e-4 && (x[1] + 2.0).abs() < 1e-4);
    }

    #[test]
    fn macrospin_integral_diverges_at_critical_voltage() {
        assert!(macrospin_integral(0.3, 0.4, 0.5, 0.9).is_none());
        let near = macrospin_integral(0.40, 0.4, 0.5, 0.9).unwrap();
        let far = macrospin_integral(1.0, 0.4, 0.5, 0.9).unwrap();
        assert!(near > far);
    }

    #[test]
    fn macrospin_integral_matches_closed_form_without_damping() {
        // Vc = 0: ∫ du / (V (1-u²)) = atanh(u)/V
        let (v, tilt, thr) = (0.8, 0.5, 0.9);
        let expect = (libm::atanh(libm::cos(tilt)) + libm::atanh(thr)) / v;
        let got = macrospin_integral(v, 0.0, tilt, thr).unwrap();
        assert!((got - expect).abs() < 1e-6 * expect);
    }

    #[test]
    fn macrospin_integral_matches_quadrature_with_damping() {
        let (tilt, thr) = (0.5, 0.9);
        let (u0, u1) = (libm::cos(tilt), -thr);
        for &(v, vc) in &[(0.7, 0.44), (0.5, 0.2), (1.2, 0.6), (0.45, 0.44)] {
            let n = 200_000;
            let h = (u0 - u1) / n as f64;
            let quad: f64 = (0..n)
                .map(|i| {
                    let u = u1 + (i as f64 + 0.5) * h;
                    h / ((1.0 - u * u) * (v - vc * u))
                })
                .sum();
            let got = macrospin_integral(v, vc, tilt, thr).unwrap();
            assert!((got / quad - 1.0).abs() < 1e-6, "{v} {vc}: {got} vs {quad}");
        }
    }
}
