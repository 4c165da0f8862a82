use crate::waveform::Trapezoid;
use crate::Bit;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WdVariant {
    /// One amplitude for both directions, no thermal compensation.
    Fixed,
    /// Per-direction amplitude and temperature-compensated drive.
    WdWrite,
}

/// Trapezoidal write-pulse generator. Writing a one uses positive
/// polarity, writing a zero negative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WriteDriverModel {
    pub variant: WdVariant,
    /// V, toward the parallel state
    pub amplitude_w0: f64,
    /// V, toward the antiparallel state
    pub amplitude_w1: f64,
    /// Flat-top length, s.
    pub pulse_width: f64,
    pub t_rise: f64,
    pub t_fall: f64,
    /// Fractional amplitude change per K away from 300 K.
    pub thermal_comp_coeff: f64,
    /// Output-stage capacitance, F.
    pub c_out: f64,
}

impl WriteDriverModel {
    pub fn wd_write(amplitude: f64, pulse_width: f64) -> Self {
        WriteDriverModel {
            variant: WdVariant::WdWrite,
            amplitude_w0: amplitude,
            amplitude_w1: amplitude,
            pulse_width,
            t_rise: 16e-12,
            t_fall: 16e-12,
            thermal_comp_coeff: 0.0008,
            c_out: 1.0e-15,
        }
    }

    pub fn fixed(amplitude: f64, pulse_width: f64) -> Self {
        WriteDriverModel {
            variant: WdVariant::Fixed,
            thermal_comp_coeff: 0.0,
            ..WriteDriverModel::wd_write(amplitude, pulse_width)
        }
    }

    /// Unsigned amplitude for writing `bit` at `temperature` K.
    pub fn amplitude(&self, bit: Bit, temperature: f64) -> f64 {
        match self.variant {
            WdVariant::Fixed => self.amplitude_w1,
            WdVariant::WdWrite => {
                let a = match bit {
                    Bit::Zero => self.amplitude_w0,
                    Bit::One => self.amplitude_w1,
                };
                a * (1.0 + self.thermal_comp_coeff * (temperature - 300.0))
            }
        }
    }
}

/// The pulse the driver emits to write `bit`.
pub fn write_pulse(wd: &WriteDriverModel, bit: Bit, temperature: f64) -> Trapezoid {
    let a = wd.amplitude(bit, temperature);
    let signed = match bit {
        Bit::One => a,
        Bit::Zero => -a,
    };
    Trapezoid::new(signed, wd.t_rise, wd.pulse_width, wd.t_fall)
}

/// What the pulse drives: the cell resistance and the line capacitance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriverLoad {
    /// Ω
    pub resistance: f64,
    /// F
    pub capacitance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriverEnergy {
    /// Charging and discharging the output stage, J.
    pub driver: f64,
    /// Into the load, J.
    pub delivered: f64,
    /// `driver / (driver + delivered)`.
    pub overhead_fraction: f64,
}

/// Driver self-energy `½ C_out V²` per pulse, J.
pub fn driver_self_energy(wd: &WriteDriverModel, amplitude: f64) -> f64 {
    0.5 * wd.c_out * amplitude * amplitude
}

/// Split the energy of one pulse into the driver's own switching and
/// what reaches `load`.
pub fn driver_energy(wd: &WriteDriverModel, pulse: &Trapezoid, load: DriverLoad) -> DriverEnergy {
    let a = pulse.amplitude;
    let driver = driver_self_energy(wd, a);
    let resistive = if load.resistance > 0.0 && load.resistance.is_finite() {
        pulse.square_area() / load.resistance
    } else {
        0.0
    };
    let delivered = resistive + 0.5 * load.capacitance * a * a;
    let total = driver + delivered;
    DriverEnergy {
        driver,
        delivered,
        overhead_fraction: if total > 0.0 { driver / total } else { 0.0 },
    }
}
