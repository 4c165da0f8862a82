//! Distributions of the process, voltage and temperature parameters.

use super::rng::TrialRng;
use crate::error::{Error, Result};

/// One-dimensional distribution with finite support or finite spread.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Dist {
    Point(f64),
    Uniform { lo: f64, hi: f64 },
    Normal { mean: f64, sigma: f64 },
}

impl Dist {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Dist::Point(v) => v.is_finite(),
            Dist::Uniform { lo, hi } => lo.is_finite() && hi.is_finite() && lo <= hi,
            Dist::Normal { mean, sigma } => mean.is_finite() && sigma.is_finite() && sigma >= 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParams(
                "distribution needs finite bounds and sigma >= 0",
            ))
        }
    }

    /// Draw from slot `param` of `rng`. Point masses draw nothing.
    pub fn draw(&self, rng: &mut TrialRng, param: u32) -> f64 {
        match *self {
            Dist::Point(v) => v,
            Dist::Uniform { lo, hi } => lo + (hi - lo) * rng.uniform(param),
            Dist::Normal { mean, sigma } => {
                if sigma == 0.0 {
                    mean
                } else {
                    mean + sigma * rng.normal(param)
                }
            }
        }
    }

    /// Center of the distribution.
    pub fn nominal(&self) -> f64 {
        match *self {
            Dist::Point(v) => v,
            Dist::Uniform { lo, hi } => 0.5 * (lo + hi),
            Dist::Normal { mean, .. } => mean,
        }
    }

    /// Same distribution with its spread removed.
    pub fn pinned(&self) -> Dist {
        Dist::Point(self.nominal())
    }
}

/// Every varied quantity of a trial. Device and offset entries are
/// relative multipliers or absolute offsets around the nominal design.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VariationSpec {
    /// Supply, V.
    pub vdd: Dist,
    /// Die temperature, K.
    pub temperature: Dist,
    /// Bitline resistance, Ω.
    pub r_bl: Dist,
    /// Cell load on the bitline, F.
    pub c_bit: Dist,
    /// Capacitance per TSV, F.
    pub c_tsv: Dist,
    /// Multiplier on the parallel resistance.
    pub rp_scale: Dist,
    /// Multiplier on the TMR ratio.
    pub tmr_scale: Dist,
    /// Sense amplifier input offset, V.
    pub sa_offset: Dist,
    /// Multiplier on the anisotropy field.
    pub hk_scale: Dist,
    /// Multiplier on the spin-orbit efficiency.
    pub sot_scale: Dist,
    /// Write pulse amplitude, V. A sweep variable: a point mass for rate
    /// runs, spread over its range for surrogate fitting.
    pub write_bias: Dist,
    /// Write pulse flat top, s. Sweep variable like `write_bias`.
    pub pulse_width: Dist,
    /// Multiplier on the read (precharge) voltage. Sweep variable.
    pub read_bias_scale: Dist,
    /// Multiplier on the sense instant. Sweep variable.
    pub sense_time_scale: Dist,
}

/// Range swept for the write amplitude, V.
pub const WRITE_BIAS_RANGE: (f64, f64) = (0.5, 1.2);
/// Range swept for the write pulse width, s.
pub const PULSE_WIDTH_RANGE: (f64, f64) = (0.1e-9, 1.5e-9);
/// Range swept for the read-path multipliers.
pub const READ_SCALE_RANGE: (f64, f64) = (0.5, 1.5);

impl Default for VariationSpec {
    fn default() -> Self {
        VariationSpec {
            vdd: Dist::Uniform { lo: 0.8, hi: 1.2 },
            temperature: Dist::Uniform {
                lo: 300.0,
                hi: 475.0,
            },
            r_bl: Dist::Uniform {
                lo: 100.0,
                hi: 300.0,
            },
            c_bit: Dist::Uniform {
                lo: 15e-15,
                hi: 30e-15,
            },
            c_tsv: Dist::Uniform {
                lo: 10e-15,
                hi: 20e-15,
            },
            rp_scale: Dist::Normal {
                mean: 1.0,
                sigma: 0.02,
            },
            tmr_scale: Dist::Normal {
                mean: 1.0,
                sigma: 0.03,
            },
            sa_offset: Dist::Normal {
                mean: 0.0,
                sigma: 2e-3,
            },
            hk_scale: Dist::Normal {
                mean: 1.0,
                sigma: 0.03,
            },
            sot_scale: Dist::Normal {
                mean: 1.0,
                sigma: 0.03,
            },
            write_bias: Dist::Point(0.7),
            pulse_width: Dist::Point(0.5e-9),
            read_bias_scale: Dist::Point(1.0),
            sense_time_scale: Dist::Point(1.0),
        }
    }
}

/// One drawn parameter vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub vdd: f64,
    pub temperature: f64,
    pub r_bl: f64,
    pub c_bit: f64,
    pub c_tsv: f64,
    pub rp_scale: f64,
    pub tmr_scale: f64,
    pub sa_offset: f64,
    pub hk_scale: f64,
    pub sot_scale: f64,
    pub write_bias: f64,
    pub pulse_width: f64,
    pub read_bias_scale: f64,
    pub sense_time_scale: f64,
}

/// Column names matching [`Sample::to_array`].
pub const SAMPLE_FIELDS: [&str; 14] = [
    "vdd",
    "temperature",
    "r_bl",
    "c_bit",
    "c_tsv",
    "rp_scale",
    "tmr_scale",
    "sa_offset",
    "hk_scale",
    "sot_scale",
    "write_bias",
    "pulse_width",
    "read_bias_scale",
    "sense_time_scale",
];

impl Sample {
    pub fn to_array(&self) -> [f64; 14] {
        [
            self.vdd,
            self.temperature,
            self.r_bl,
            self.c_bit,
            self.c_tsv,
            self.rp_scale,
            self.tmr_scale,
            self.sa_offset,
            self.hk_scale,
            self.sot_scale,
            self.write_bias,
            self.pulse_width,
            self.read_bias_scale,
            self.sense_time_scale,
        ]
    }
}

impl VariationSpec {
    fn fields(&self) -> [Dist; 14] {
        [
            self.vdd,
            self.temperature,
            self.r_bl,
            self.c_bit,
            self.c_tsv,
            self.rp_scale,
            self.tmr_scale,
            self.sa_offset,
            self.hk_scale,
            self.sot_scale,
            self.write_bias,
            self.pulse_width,
            self.read_bias_scale,
            self.sense_time_scale,
        ]
    }

    pub fn validate(&self) -> Result<()> {
        self.fields().iter().try_for_each(Dist::validate)
    }

    /// Every entry at its nominal value.
    pub fn nominal(&self) -> Sample {
        let mut s = self.pinned();
        s.sa_offset = Dist::Point(self.sa_offset.nominal());
        let f = s.fields().map(|d| d.nominal());
        from_array(f)
    }

    /// Spec with every spread removed.
    pub fn pinned(&self) -> VariationSpec {
        let f = self.fields().map(|d| d.pinned());
        VariationSpec {
            vdd: f[0],
            temperature: f[1],
            r_bl: f[2],
            c_bit: f[3],
            c_tsv: f[4],
            rp_scale: f[5],
            tmr_scale: f[6],
            sa_offset: f[7],
            hk_scale: f[8],
            sot_scale: f[9],
            write_bias: f[10],
            pulse_width: f[11],
            read_bias_scale: f[12],
            sense_time_scale: f[13],
        }
    }

    /// Copy whose sweep variables cover their full ranges, used to fit
    /// and check the fast trial models.
    pub fn with_swept_operating_point(&self) -> VariationSpec {
        VariationSpec {
            write_bias: Dist::Uniform {
                lo: WRITE_BIAS_RANGE.0,
                hi: WRITE_BIAS_RANGE.1,
            },
            pulse_width: Dist::Uniform {
                lo: PULSE_WIDTH_RANGE.0,
                hi: PULSE_WIDTH_RANGE.1,
            },
            read_bias_scale: Dist::Uniform {
                lo: READ_SCALE_RANGE.0,
                hi: READ_SCALE_RANGE.1,
            },
            sense_time_scale: Dist::Uniform {
                lo: READ_SCALE_RANGE.0,
                hi: READ_SCALE_RANGE.1,
            },
            ..*self
        }
    }
}

fn from_array(f: [f64; 14]) -> Sample {
    Sample {
        vdd: f[0],
        temperature: f[1],
        r_bl: f[2],
        c_bit: f[3],
        c_tsv: f[4],
        rp_scale: f[5],
        tmr_scale: f[6],
        sa_offset: f[7],
        hk_scale: f[8],
        sot_scale: f[9],
        write_bias: f[10],
        pulse_width: f[11],
        read_bias_scale: f[12],
        sense_time_scale: f[13],
    }
}

/// Parameter vector of trial `trial_id`. Slot `i` of the trial's stream
/// feeds field `i`, so adding or pinning one field leaves the others alone.
pub fn sample(spec: &VariationSpec, master_seed: u64, trial_id: u64) -> Sample {
    let mut rng = TrialRng::new(master_seed, trial_id);
    let mut out = [0.0; 14];
    for (i, d) in spec.fields().iter().enumerate() {
        out[i] = d.draw(&mut rng, i as u32);
    }
    from_array(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic() {
        let s = VariationSpec::default();
        assert_eq!(sample(&s, 9, 1234), sample(&s, 9, 1234));
        assert_ne!(sample(&s, 9, 1234), sample(&s, 9, 1235));
    }

    #[test]
    fn point_masses_pass_through() {
        let s = VariationSpec::default().pinned();
        let x = sample(&s, 1, 5);
        assert_eq!(x, s.nominal());
        assert_eq!(x.vdd, 1.0);
        assert_eq!(x.temperature, 387.5);
    }

    #[test]
    fn uniform_vdd_mean() {
        let s = VariationSpec::default();
        let n = 100_000;
        let mean = (0..n).map(|i| sample(&s, 3, i).vdd).sum::<f64>() / n as f64;
        assert!((mean - 1.0).abs() < 0.002);
    }

    #[test]
    fn default_bounds() {
        let s = VariationSpec::default();
        assert_eq!(s.vdd, Dist::Uniform { lo: 0.8, hi: 1.2 });
        assert_eq!(
            s.temperature,
            Dist::Uniform {
                lo: 300.0,
                hi: 475.0
            }
        );
        s.validate().unwrap();
        assert!(Dist::Normal {
            mean: 0.0,
            sigma: f64::INFINITY
        }
        .validate()
        .is_err());
        for i in 0..1000 {
            let x = sample(&s.with_swept_operating_point(), 4, i);
            assert!((0.5..=1.2).contains(&x.write_bias));
            assert!((0.1e-9..=1.5e-9).contains(&x.pulse_width));
        }
    }
}
