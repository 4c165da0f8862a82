use crate::Bit;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SaVariant {
    /// Single fixed threshold.
    Baseline,
    /// Programmable offset, temperature-compensated tail bias and a
    /// reference that tracks a replica cell.
    Plus,
}

/// Behavioral clocked comparator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SenseAmpModel {
    pub variant: SaVariant,
    /// V
    pub v_ref: f64,
    /// Programmed trip-point shift, V. Ignored by the baseline.
    pub v_off_programmed: f64,
    /// Input-referred offset standard deviation, V.
    pub sigma_offset: f64,
    /// s
    pub t_decision_nominal: f64,
    /// Fractional decision-delay change per K away from 300 K.
    pub gm_thermal_coeff: f64,
}

impl SenseAmpModel {
    pub fn baseline() -> Self {
        SenseAmpModel {
            variant: SaVariant::Baseline,
            v_ref: 0.15,
            v_off_programmed: 0.0,
            sigma_offset: 5e-3,
            t_decision_nominal: 50e-12,
            gm_thermal_coeff: 0.002,
        }
    }

    pub fn plus() -> Self {
        SenseAmpModel {
            variant: SaVariant::Plus,
            sigma_offset: 2e-3,
            gm_thermal_coeff: 1e-4,
            ..SenseAmpModel::baseline()
        }
    }

    pub fn effective_v_off(&self) -> f64 {
        match self.variant {
            SaVariant::Baseline => 0.0,
            SaVariant::Plus => self.v_off_programmed,
        }
    }

    /// Input level above which the comparator reports a one.
    pub fn trip_point(&self, sampled_offset: f64) -> f64 {
        self.v_ref + self.effective_v_off() + sampled_offset
    }

    /// Decision delay at `temperature` K.
    pub fn latency(&self, temperature: f64) -> f64 {
        self.t_decision_nominal * (1.0 + self.gm_thermal_coeff * (temperature - 300.0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SenseResult {
    pub bit: Bit,
    /// s
    pub latency: f64,
}

/// Compare `v_in` against the trip point. An exact tie reads as zero.
pub fn sense_decision(
    sa: &SenseAmpModel,
    v_in: f64,
    sampled_offset: f64,
    temperature: f64,
) -> SenseResult {
    let bit = if v_in > sa.trip_point(sampled_offset) {
        Bit::One
    } else {
        Bit::Zero
    };
    SenseResult {
        bit,
        latency: sa.latency(temperature),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tie_reads_zero() {
        let sa = SenseAmpModel::baseline();
        assert_eq!(sense_decision(&sa, sa.v_ref, 0.0, 300.0).bit, Bit::Zero);
        assert_eq!(
            sense_decision(&sa, sa.v_ref + 0.010, 0.0, 300.0).bit,
            Bit::One
        );
    }

    #[test]
    fn baseline_ignores_programmed_offset() {
        let mut sa = SenseAmpModel::baseline();
        sa.v_off_programmed = 0.05;
        assert_eq!(sa.trip_point(0.0), sa.v_ref);
        sa.variant = SaVariant::Plus;
        assert_eq!(sa.trip_point(0.0), sa.v_ref + 0.05);
    }

    #[test]
    fn baseline_slows_when_hot() {
        let sa = SenseAmpModel::baseline();
        let hot = sense_decision(&sa, 0.0, 0.0, 358.15).latency / sa.t_decision_nominal;
        // 1 + 0.002 * 58.15
        assert!((hot - 1.1163).abs() < 1e-12);
        assert!((hot - 1.12).abs() < 0.005);
        assert_eq!(sa.latency(300.0), sa.t_decision_nominal);
    }
}
