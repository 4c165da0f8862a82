//! Bitline precharge and equalization drivers.

use crate::circuit::{BitlineNetwork, PrechargeDrive, TierThermalModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PdVariant {
    /// Precharge only; any differential left from the last access stays.
    Pd,
    /// Precharge with a fixed equalization window.
    PdEq,
    /// Window and drive adapted to the tier temperature.
    PdEqPlus,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrechargeEqModel {
    pub variant: PdVariant,
    /// V
    pub v_precharge: f64,
    /// Fixed window of the non-adaptive variants, s.
    pub eq_pulse_width: f64,
    /// Driver resistance at 300 K, Ω.
    pub drive_strength: f64,
    /// Window multiplier on `R_median · C_total`.
    pub window_k: f64,
    /// Fractional window growth per 300 K of tier heating.
    pub window_beta: f64,
    /// Median cell resistance from the device statistics, Ω.
    pub r_device_median: f64,
    /// Driver resistance scales as `(T/300)^exponent`.
    pub driver_temp_exponent: f64,
    /// Bitline metal resistance coefficient, per K.
    pub r_bl_tcr: f64,
    /// The adaptive drive matches the settling time of a tier at this
    /// temperature, K.
    pub reference_temperature: f64,
}

impl PrechargeEqModel {
    pub fn new(variant: PdVariant) -> Self {
        PrechargeEqModel {
            variant,
            v_precharge: 0.3,
            eq_pulse_width: 0.6e-9,
            drive_strength: 1000.0,
            window_k: 5.0,
            window_beta: 0.4,
            r_device_median: 4.0e3,
            driver_temp_exponent: 1.5,
            r_bl_tcr: 0.0039,
            reference_temperature: 298.15,
        }
    }

    /// `net` (characterized at 300 K) with its metal heated to `temperature`.
    pub fn line_at(&self, net: &BitlineNetwork, temperature: f64) -> BitlineNetwork {
        net.with_resistance_scale(1.0 + self.r_bl_tcr * (temperature - 300.0))
    }

    /// Resistance of a fixed-size driver at `temperature`, Ω.
    pub fn driver_resistance(&self, temperature: f64) -> f64 {
        self.drive_strength * libm::pow(temperature / 300.0, self.driver_temp_exponent)
    }

    /// Equalization window at `temperature`, s.
    pub fn window(&self, net: &BitlineNetwork, temperature: f64) -> f64 {
        match self.variant {
            PdVariant::Pd | PdVariant::PdEq => self.eq_pulse_width,
            PdVariant::PdEqPlus => {
                self.window_k
                    * self.r_device_median
                    * net.c_total()
                    * (1.0 + self.window_beta * (temperature - 300.0) / 300.0)
            }
        }
    }

    /// Source resistance at `temperature`, Ω. The adaptive variant sizes
    /// its driver so the far-node Elmore delay matches the reference tier.
    pub fn source_resistance(&self, net: &BitlineNetwork, temperature: f64) -> f64 {
        let line = self.line_at(net, temperature);
        match self.variant {
            PdVariant::Pd | PdVariant::PdEq => self.driver_resistance(temperature),
            PdVariant::PdEqPlus => {
                let t_ref = self.reference_temperature;
                let reference = self
                    .line_at(net, t_ref)
                    .elmore_delay(self.driver_resistance(t_ref), net.device_node());
                let wire = line.elmore_delay(0.0, net.device_node());
                let c = net.c_total();
                if c > 0.0 {
                    ((reference - wire) / c).max(1.0)
                } else {
                    self.driver_resistance(t_ref)
                }
            }
        }
    }

    /// Far-node Elmore time constant of the precharge at `temperature`, s.
    pub fn time_constant(&self, net: &BitlineNetwork, temperature: f64) -> f64 {
        self.line_at(net, temperature)
            .elmore_delay(self.source_resistance(net, temperature), net.device_node())
    }
}

/// Source, source resistance and window handed to the ladder solver for
/// a tier at `temperature` K.
pub fn precharge_waveform(
    pd: &PrechargeEqModel,
    net: &BitlineNetwork,
    temperature: f64,
) -> PrechargeDrive {
    PrechargeDrive {
        v_source: pd.v_precharge,
        r_source: pd.source_resistance(net, temperature),
        window: pd.window(net, temperature),
    }
}

/// Differential left after equalizing an initial `dv0` with the window
/// scaled by `window_scale`.
pub fn residual_differential(
    pd: &PrechargeEqModel,
    net: &BitlineNetwork,
    temperature: f64,
    window_scale: f64,
    dv0: f64,
) -> f64 {
    if pd.variant == PdVariant::Pd {
        return dv0;
    }
    let w = pd.window(net, temperature) * window_scale.max(0.0);
    let tau = pd.time_constant(net, temperature);
    if !(tau > 0.0) {
        return if w > 0.0 { 0.0 } else { dv0 };
    }
    dv0 * libm::exp(-w / tau)
}

/// Area of the largest `[0, e] × [0, ΔT]` rectangle in the plane of
/// window-shortening error `e` and tier heating on which the residual
/// differential stays below `limit`. Units: fraction × K.
pub fn disturbance_free_window(
    pd: &PrechargeEqModel,
    net: &BitlineNetwork,
    thermal: &TierThermalModel,
    dv0: f64,
    limit: f64,
) -> f64 {
    if pd.variant == PdVariant::Pd || !(dv0 > limit) {
        return if dv0 <= limit {
            thermal.delta_t_total
        } else {
            0.0
        };
    }
    let needed = libm::log(dv0 / limit);
    let samples = 151;
    let mut e_star = 1.0_f64;
    for k in 0..samples {
        let t = thermal.t_bottom + thermal.delta_t_total * k as f64 / (samples - 1) as f64;
        let w = pd.window(net, t);
        let tau = pd.time_constant(net, t);
        let e_max = if w > 0.0 { 1.0 - tau * needed / w } else { 0.0 };
        e_star = e_star.min(e_max.clamp(0.0, 1.0));
    }
    e_star * thermal.delta_t_total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::build_bitline;

    fn net() -> BitlineNetwork {
        build_bitline(200.0, 22.5e-15, 15e-15, 16, 2).unwrap()
    }

    #[test]
    fn fixed_variants_ignore_temperature_for_the_window() {
        for v in [PdVariant::Pd, PdVariant::PdEq] {
            let pd = PrechargeEqModel::new(v);
            let a = precharge_waveform(&pd, &net(), 298.15);
            let b = precharge_waveform(&pd, &net(), 373.15);
            assert_eq!(a.window, b.window);
        }
    }

    #[test]
    fn adaptive_driver_is_stronger_when_hot() {
        let pd = PrechargeEqModel::new(PdVariant::PdEqPlus);
        let cold = precharge_waveform(&pd, &net(), 298.15);
        let hot = precharge_waveform(&pd, &net(), 373.15);
        assert!(hot.r_source < cold.r_source);
        assert!(hot.window > cold.window);
    }

    #[test]
    fn zero_window_leaves_differential() {
        let mut pd = PrechargeEqModel::new(PdVariant::PdEq);
        pd.eq_pulse_width = 0.0;
        assert_eq!(residual_differential(&pd, &net(), 300.0, 1.0, 0.1), 0.1);
        let pd = PrechargeEqModel::new(PdVariant::PdEq);
        assert_eq!(residual_differential(&pd, &net(), 300.0, 0.0, 0.1), 0.1);
        assert!(residual_differential(&pd, &net(), 300.0, 1.0, 0.1) < 0.1);
    }

    #[test]
    fn precharge_only_has_no_window() {
        let pd = PrechargeEqModel::new(PdVariant::Pd);
        let w = disturbance_free_window(&pd, &net(), &TierThermalModel::default(), 0.3, 1e-3);
        assert_eq!(w, 0.0);
    }
}
