//! Read table across PVT corners and the variation-margin table.

use alloc::vec::Vec;

use crate::error::Result;
use crate::montecarlo::{
    margin_search, run_read_trials, run_write_trials, Dist, MarginAxis, MarginSettings, ReadModel,
    ReadSetup, VariationSpec, WriteModel, WriteSetup,
};
use crate::peripherals::{Corner, ReadTables, SaVariant, CORNERS};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PvtRow {
    pub corner: Corner,
    pub sa: SaVariant,
    /// ns
    pub latency_ns: f64,
    /// fJ
    pub energy_fj: f64,
}

/// Six rows: each corner read by the baseline and by the reduced-swing
/// amplifier, corner by corner.
pub fn pvt_read_table(tables: &ReadTables, corners: &[Corner]) -> Result<Vec<PvtRow>> {
    let mut rows = Vec::with_capacity(corners.len() * 2);
    for &corner in corners {
        for sa in [SaVariant::Baseline, SaVariant::Plus] {
            rows.push(PvtRow {
                corner,
                sa,
                latency_ns: tables.read_latency(sa, corner.vdd, corner.temperature_c)? * 1e9,
                energy_fj: tables.read_energy(sa, corner.vdd, corner.temperature_c)? * 1e15,
            });
        }
    }
    Ok(rows)
}

/// Baseline over reduced-swing read energy at each default corner.
pub fn energy_ratios(tables: &ReadTables) -> Result<[f64; 3]> {
    let mut r = [0.0; 3];
    for (i, c) in CORNERS.iter().enumerate() {
        r[i] = tables.read_energy(SaVariant::Baseline, c.vdd, c.temperature_c)?
            / tables.read_energy(SaVariant::Plus, c.vdd, c.temperature_c)?;
    }
    Ok(r)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarginRow {
    /// °C
    pub temperature_c: f64,
    pub axis: MarginAxis,
    /// %
    pub margin_pct: f64,
}

/// The models a margin table runs on.
#[derive(Debug, Clone, Copy)]
pub struct MarginModels<'a> {
    pub read_setup: &'a ReadSetup,
    pub read: ReadModel<'a>,
    pub write_setup: &'a WriteSetup,
    pub write: WriteModel<'a>,
}

/// Four margins per operating temperature, each the worst case over both
/// read states or both write directions. `n` trials per probe.
pub fn margin_table(
    models: &MarginModels<'_>,
    spec: &VariationSpec,
    temperatures_c: &[f64],
    settings: &MarginSettings,
    seed: u64,
    n: u64,
) -> Result<Vec<MarginRow>> {
    let mut rows = Vec::new();
    for &tc in temperatures_c {
        let mut at = *spec;
        at.temperature = Dist::Point(tc + 273.15);
        for axis in MarginAxis::ALL {
            let margin_pct = margin_search(settings, |d| {
                let s = axis.perturb(&at, d);
                if axis.is_read() {
                    run_read_trials(models.read_setup, &s, models.read, seed, n)
                } else {
                    run_write_trials(models.write_setup, &s, models.write, seed, n)
                }
            })?;
            rows.push(MarginRow {
                temperature_c: tc,
                axis,
                margin_pct,
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_matches_defaults_exactly() {
        let t = ReadTables::default();
        let rows = pvt_read_table(&t, &CORNERS).unwrap();
        assert_eq!(rows.len(), 6);
        let want = [
            (0.6, 0.0505),
            (0.6, 0.0123),
            (0.8, 0.0733),
            (0.8, 0.0128),
            (0.9, 0.111),
            (0.9, 0.0140),
        ];
        for (r, w) in rows.iter().zip(want) {
            assert!((r.latency_ns - w.0).abs() < 1e-12 && (r.energy_fj - w.1).abs() < 1e-12);
        }
    }

    #[test]
    fn ratio_column() {
        let r = energy_ratios(&ReadTables::default()).unwrap();
        for (got, want) in r.iter().zip([4.1, 5.7, 7.9]) {
            assert!((got - want).abs() < 0.05, "{got} vs {want}");
        }
    }
}
