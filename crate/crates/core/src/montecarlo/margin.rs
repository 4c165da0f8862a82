//! Symmetric variation margins: how far one operating-point knob can move
//! either way before the failure rate bound crosses its target.

use super::stats::RateEstimate;
use super::variation::{Dist, VariationSpec};
use crate::error::{Error, Result};

/// Knob perturbed by a margin search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MarginAxis {
    /// Read (precharge) voltage.
    ReadVoltage,
    /// Sense-amplifier firing time.
    SenseTime,
    /// Write pulse amplitude.
    WriteVoltage,
    /// Write pulse width.
    PulseWidth,
}

impl MarginAxis {
    pub const ALL: [MarginAxis; 4] = [
        MarginAxis::ReadVoltage,
        MarginAxis::SenseTime,
        MarginAxis::WriteVoltage,
        MarginAxis::PulseWidth,
    ];

    pub fn label(self) -> &'static str {
        match self {
            MarginAxis::ReadVoltage => "V_r",
            MarginAxis::SenseTime => "t_SA",
            MarginAxis::WriteVoltage => "V_w",
            MarginAxis::PulseWidth => "tau_w",
        }
    }

    pub fn is_read(self) -> bool {
        matches!(self, MarginAxis::ReadVoltage | MarginAxis::SenseTime)
    }

    /// `spec` with this axis moved by the signed fraction `delta`.
    pub fn perturb(self, spec: &VariationSpec, delta: f64) -> VariationSpec {
        let mut s = *spec;
        let k = 1.0 + delta;
        let scale = |d: Dist| match d {
            Dist::Point(v) => Dist::Point(v * k),
            Dist::Uniform { lo, hi } => Dist::Uniform {
                lo: lo * k,
                hi: hi * k,
            },
            Dist::Normal { mean, sigma } => Dist::Normal {
                mean: mean * k,
                sigma: sigma * k,
            },
        };
        match self {
            MarginAxis::ReadVoltage => s.read_bias_scale = scale(s.read_bias_scale),
            MarginAxis::SenseTime => s.sense_time_scale = scale(s.sense_time_scale),
            MarginAxis::WriteVoltage => s.write_bias = scale(s.write_bias),
            MarginAxis::PulseWidth => s.pulse_width = scale(s.pulse_width),
        }
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarginSettings {
    pub target: f64,
    pub confidence: f64,
    /// Largest fraction tried.
    pub max_fraction: f64,
    /// Bisection stops once the bracket is this narrow (fraction).
    pub resolution: f64,
}

impl Default for MarginSettings {
    fn default() -> Self {
        MarginSettings {
            target: 1e-3,
            confidence: 0.95,
            max_fraction: 0.9,
            resolution: 1e-4,
        }
    }
}

/// Largest `δ ∈ [0, max_fraction]` such that the rate bound at both `+δ`
/// and `-δ` stays at or below the target, in percent. `rate(δ)` evaluates
/// one signed perturbation.
pub fn margin_search<F>(settings: &MarginSettings, mut rate: F) -> Result<f64>
where
    F: FnMut(f64) -> Result<RateEstimate>,
{
    let mut ok = |d: f64| -> Result<(bool, f64)> {
        let hi = rate(d)?.upper(settings.confidence);
        if d == 0.0 {
            return Ok((hi <= settings.target, hi));
        }
        let lo = rate(-d)?.upper(settings.confidence);
        let worst = hi.max(lo);
        Ok((worst <= settings.target, worst))
    };
    let (nominal_ok, bound) = ok(0.0)?;
    if !nominal_ok {
        return Err(Error::NominalFails { upper_bound: bound });
    }
    if ok(settings.max_fraction)?.0 {
        return Ok(100.0 * settings.max_fraction);
    }
    let (mut a, mut b) = (0.0, settings.max_fraction);
    while b - a > settings.resolution {
        let m = 0.5 * (a + b);
        if ok(m)?.0 {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(100.0 * a)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn everything_passes_at_unit_target() {
        let s = MarginSettings {
            target: 1.0,
            ..MarginSettings::default()
        };
        let m = margin_search(&s, |_| Ok(RateEstimate::new(10, 10))).unwrap();
        assert_eq!(m, 90.0);
    }

    #[test]
    fn nominal_failure_is_reported() {
        let s = MarginSettings::default();
        let e = margin_search(&s, |_| Ok(RateEstimate::new(100, 50))).unwrap_err();
        assert_eq!(e.name(), "NominalFails");
    }

    #[test]
    fn step_rate_recovers_edge() {
        let s = MarginSettings::default();
        let m = margin_search(&s, |d| {
            Ok(RateEstimate::new(
                1_000_000,
                if d.abs() > 0.123 { 5000 } else { 0 },
            ))
        })
        .unwrap();
        assert!((m - 12.3).abs() < 0.02);
    }
}
