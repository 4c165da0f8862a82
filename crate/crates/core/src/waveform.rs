//! Time-dependent source voltages.

use alloc::vec::Vec;

/// A voltage as a function of time, defined on `[0, duration]` and zero
/// afterwards.
pub trait Waveform {
    fn value(&self, t: f64) -> f64;

    /// End of the waveform, s. May be infinite.
    fn duration(&self) -> f64;

    /// Largest `|v(t)|`.
    fn peak(&self) -> f64;
}

/// Time-independent voltage that never ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constant(pub f64);

impl Waveform for Constant {
    fn value(&self, _t: f64) -> f64 {
        self.0
    }
    fn duration(&self) -> f64 {
        f64::INFINITY
    }
    fn peak(&self) -> f64 {
        self.0.abs()
    }
}

/// `0 -> amplitude` over `t_rise`, hold for `width`, back to `0` over `t_fall`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Trapezoid {
    pub amplitude: f64,
    pub t_rise: f64,
    /// Flat-top duration, s.
    pub width: f64,
    pub t_fall: f64,
}

impl Trapezoid {
    pub fn new(amplitude: f64, t_rise: f64, width: f64, t_fall: f64) -> Self {
        Trapezoid {
            amplitude,
            t_rise,
            width,
            t_fall,
        }
    }

    /// `∫ v dt` in V·s.
    pub fn area(&self) -> f64 {
        self.amplitude * (self.width + 0.5 * (self.t_rise + self.t_fall))
    }

    /// `∫ v² dt` in V²·s.
    pub fn square_area(&self) -> f64 {
        self.amplitude * self.amplitude * (self.width + (self.t_rise + self.t_fall) / 3.0)
    }
}

impl Waveform for Trapezoid {
    fn value(&self, t: f64) -> f64 {
        if t < 0.0 {
            return 0.0;
        }
        if t < self.t_rise {
            return self.amplitude * t / self.t_rise;
        }
        let t = t - self.t_rise;
        if t <= self.width {
            return self.amplitude;
        }
        let t = t - self.width;
        if t < self.t_fall {
            return self.amplitude * (1.0 - t / self.t_fall);
        }
        0.0
    }

    fn duration(&self) -> f64 {
        self.t_rise + self.width + self.t_fall
    }

    fn peak(&self) -> f64 {
        self.amplitude.abs()
    }
}

/// Piecewise-linear waveform through `(t, v)` breakpoints. Holds the last
/// value up to the final breakpoint.
#[derive(Debug, Clone, PartialEq)]
pub struct Pwl {
    points: Vec<(f64, f64)>,
}

impl Pwl {
    /// Returns `None` unless breakpoint times are strictly increasing.
    pub fn new(points: Vec<(f64, f64)>) -> Option<Self> {
        if points.is_empty() || points.windows(2).any(|w| !(w[1].0 > w[0].0)) {
            return None;
        }
        Some(Pwl { points })
    }
}

impl Waveform for Pwl {
    fn value(&self, t: f64) -> f64 {
        let p = &self.points;
        if t < p[0].0 || t > p[p.len() - 1].0 {
            return 0.0;
        }
        let i = p.partition_point(|&(ti, _)| ti <= t);
        if i == 0 {
            return p[0].1;
        }
        if i == p.len() {
            return p[p.len() - 1].1;
        }
        let (t0, v0) = p[i - 1];
        let (t1, v1) = p[i];
        v0 + (v1 - v0) * (t - t0) / (t1 - t0)
    }

    fn duration(&self) -> f64 {
        self.points[self.points.len() - 1].0
    }

    fn peak(&self) -> f64 {
        self.points.iter().fold(0.0, |m, &(_, v)| m.max(v.abs()))
    }
}

/// `inner` followed by `extra` seconds at zero volts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Padded<W> {
    pub inner: W,
    pub extra: f64,
}

impl<W: Waveform> Waveform for Padded<W> {
    fn value(&self, t: f64) -> f64 {
        if t > self.inner.duration() {
            0.0
        } else {
            self.inner.value(t)
        }
    }
    fn duration(&self) -> f64 {
        self.inner.duration() + self.extra
    }
    fn peak(&self) -> f64 {
        self.inner.peak()
    }
}

impl<W: Waveform + ?Sized> Waveform for &W {
    fn value(&self, t: f64) -> f64 {
        (**self).value(t)
    }
    fn duration(&self) -> f64 {
        (**self).duration()
    }
    fn peak(&self) -> f64 {
        (**self).peak()
    }
}
