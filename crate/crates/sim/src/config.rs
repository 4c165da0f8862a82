//! Run configuration: bundled defaults, a user file layered on top, then
//! dotted `key=value` overrides. The merged table is validated in full
//! before anything runs.

use std::path::{Path, PathBuf};

use afmtj_core::circuit::{build_bitline, BitlineNetwork, TierThermalModel};
use afmtj_core::dynamics::{DeviceKind, DeviceParams};
use afmtj_core::experiments::{LatencyProbe, WaveGrid, WriteEnergyModel};
use afmtj_core::montecarlo::{Dist, MarginSettings, ReadSetup, VariationSpec, WriteSetup};
use afmtj_core::peripherals::{
    Corner, PdVariant, PrechargeEqModel, ReadTables, SaVariant, SenseAmpModel, WriteDriverModel,
};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

pub const DEFAULTS: &str = include_str!("../defaults.toml");

/// Consulted when neither the config nor the command line names an
/// output directory.
pub const OUT_DIR_ENV: &str = "AFMTJ_OUT_DIR";
const FALLBACK_OUT_DIR: &str = "afmtj-out";

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub master_seed: u64,
    pub threads: usize,
    pub output_dir: String,
    pub device: Devices,
    pub probe: ProbeConfig,
    pub array: ArrayConfig,
    pub peripheral: PeripheralConfig,
    pub variation: VariationConfig,
    pub sweep: SweepConfig,
    pub pvt: PvtConfig,
    pub montecarlo: MonteCarloConfig,
    pub margins: MarginsConfig,
    pub waveforms: WaveformsConfig,
    pub calibrate: CalibrateConfig,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Devices {
    pub afmtj: DeviceConfig,
    pub mtj: DeviceConfig,
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct DeviceConfig {
    pub alpha: f64,
    pub ms: f64,
    pub hk: f64,
    pub sot_efficiency: f64,
    pub j_af: f64,
    pub rp: f64,
    pub tmr: f64,
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeConfig {
    pub initial_tilt: f64,
    pub threshold: f64,
    pub t_rise: f64,
    pub t_fall: f64,
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ArrayConfig {
    pub n_segments: usize,
    pub tsv_hops: usize,
    pub c_wire: f64,
    pub r_bl: f64,
    pub c_bit: f64,
    pub c_tsv: f64,
    pub tiers: usize,
    pub t_bottom_k: f64,
    pub delta_t_k: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SenseAmpKind {
    Plus,
    Baseline,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PrechargeKind {
    Pd,
    PdEq,
    PdEqPlus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WriteDriverKind {
    WdWrite,
    Fixed,
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct PeripheralConfig {
    pub sense_amp: SenseAmpKind,
    pub precharge: PrechargeKind,
    pub eq_pulse_width: f64,
    pub t_sense: f64,
    pub write_driver: WriteDriverKind,
    pub write_voltage: f64,
    pub pulse_width: f64,
    pub disturb_fraction: f64,
    pub relax_time: f64,
    pub line_capacitance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum DistConfig {
    Point { value: f64 },
    Uniform { lo: f64, hi: f64 },
    Normal { mean: f64, sigma: f64 },
}

impl From<DistConfig> for Dist {
    fn from(d: DistConfig) -> Dist {
        match d {
            DistConfig::Point { value } => Dist::Point(value),
            DistConfig::Uniform { lo, hi } => Dist::Uniform { lo, hi },
            DistConfig::Normal { mean, sigma } => Dist::Normal { mean, sigma },
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct VariationConfig {
    pub vdd: DistConfig,
    pub temperature: DistConfig,
    pub r_bl: DistConfig,
    pub c_bit: DistConfig,
    pub c_tsv: DistConfig,
    pub rp_scale: DistConfig,
    pub tmr_scale: DistConfig,
    pub sa_offset: DistConfig,
    pub hk_scale: DistConfig,
    pub sot_scale: DistConfig,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub voltages: Vec<f64>,
    pub report_voltage: f64,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct CornerConfig {
    pub name: String,
    pub vdd: f64,
    pub temperature_c: f64,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct PvtConfig {
    pub corners: Vec<CornerConfig>,
    pub dv0: f64,
    pub residual_limit: f64,
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct MonteCarloConfig {
    pub read_full_trials: u64,
    pub write_full_trials: u64,
    pub surrogate_trials: u64,
    pub fit_trials: u64,
    pub validation_trials: u64,
    pub target: f64,
    pub confidence: f64,
    pub trial_csv: bool,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct MarginsConfig {
    pub temperatures_c: Vec<f64>,
    pub trials: u64,
    pub target: f64,
    pub confidence: f64,
    pub max_fraction: f64,
    pub resolution: f64,
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct WaveformsConfig {
    pub trials: u64,
    pub t_end: f64,
    pub points: usize,
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct CalibrateConfig {
    pub max_evaluations: usize,
}

/// A validated configuration and its fingerprint.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub config: RunConfig,
    /// First 16 hex digits of the SHA-256 of the merged table, with the
    /// keys that cannot change any result (`threads`, `output_dir`)
    /// removed.
    pub hash: String,
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn parse_table(text: &str, origin: &str) -> Result<toml::Table, CliError> {
    text.parse::<toml::Table>()
        .map_err(|e| invalid(format!("{origin}: {e}")))
}

/// `over` merged into `base`, tables recursively, everything else replaced.
fn merge(base: &mut toml::Table, over: toml::Table) {
    for (k, v) in over {
        match (base.get_mut(&k), v) {
            (Some(toml::Value::Table(b)), toml::Value::Table(o)) => merge(b, o),
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
}

/// `raw` read as a TOML value, or as a bare string when it is not one.
fn parse_value(raw: &str) -> toml::Value {
    format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()))
}

/// Apply one `a.b.c=value` override.
pub fn apply_override(table: &mut toml::Table, assignment: &str) -> Result<(), CliError> {
    let (path, raw) = assignment.split_once('=').ok_or_else(|| {
        invalid(format!(
            "override `{assignment}` is not of the form key=value"
        ))
    })?;
    let keys: Vec<&str> = path.trim().split('.').collect();
    if keys.iter().any(|k| k.is_empty()) {
        return Err(invalid(format!("override `{assignment}` has an empty key")));
    }
    let (last, parents) = keys.split_last().expect("split yields at least one key");
    let mut node = table;
    for k in parents {
        node = match node
            .entry(k.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()))
        {
            toml::Value::Table(t) => t,
            _ => return Err(invalid(format!("override `{path}`: `{k}` is not a table"))),
        };
    }
    node.insert(last.to_string(), parse_value(raw.trim()));
    Ok(())
}

/// Defaults, then `path` if given, then `overrides`.
pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<LoadedConfig, CliError> {
    let mut table = parse_table(DEFAULTS, "bundled defaults")?;
    if let Some(p) = path {
        let text = std::fs::read_to_string(p)
            .map_err(|e| invalid(format!("cannot read config {}: {e}", p.display())))?;
        merge(&mut table, parse_table(&text, &p.display().to_string())?);
    }
    for o in overrides {
        apply_override(&mut table, o)?;
    }
    let config: RunConfig = table
        .clone()
        .try_into()
        .map_err(|e: toml::de::Error| invalid(e.to_string()))?;
    config.validate()?;
    let mut hashed = table;
    hashed.remove("threads");
    hashed.remove("output_dir");
    let canonical = toml::to_string(&hashed).map_err(|e| invalid(e.to_string()))?;
    let digest = Sha256::digest(canonical.as_bytes());
    let hash = digest.iter().take(8).map(|b| format!("{b:02x}")).collect();
    Ok(LoadedConfig { config, hash })
}

fn positive(name: &str, v: f64) -> Result<(), CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!(
            "{name} must be a positive number, got {v}"
        )))
    }
}

fn fraction(name: &str, v: f64) -> Result<(), CliError> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(invalid(format!(
            "{name} must lie strictly between 0 and 1, got {v}"
        )))
    }
}

fn at_least_one(name: &str, n: u64) -> Result<(), CliError> {
    if n >= 1 {
        Ok(())
    } else {
        Err(invalid(format!("{name} must be at least 1")))
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        for kind in [DeviceKind::Afmtj, DeviceKind::Mtj] {
            self.device_params(kind)
                .validate()
                .map_err(|e| invalid(format!("device.{}: {e}", kind_key(kind))))?;
        }
        let p = &self.probe;
        positive("probe.t_rise", p.t_rise)?;
        positive("probe.t_fall", p.t_fall)?;
        if !(p.threshold > 0.0 && p.threshold <= 1.0) {
            return Err(invalid("probe.threshold must lie in (0, 1]"));
        }
        if !(p.initial_tilt > 0.0 && p.initial_tilt < std::f64::consts::FRAC_PI_2) {
            return Err(invalid("probe.initial_tilt must lie in (0, pi/2)"));
        }
        self.bitline().map_err(|e| invalid(format!("array: {e}")))?;
        positive("array.t_bottom_k", self.array.t_bottom_k)?;
        if !(self.array.delta_t_k >= 0.0) || self.array.tiers == 0 {
            return Err(invalid(
                "array: need at least one tier and a non-negative gradient",
            ));
        }
        let per = &self.peripheral;
        for (name, v) in [
            ("peripheral.eq_pulse_width", per.eq_pulse_width),
            ("peripheral.t_sense", per.t_sense),
            ("peripheral.write_voltage", per.write_voltage),
            ("peripheral.pulse_width", per.pulse_width),
            ("peripheral.relax_time", per.relax_time),
            ("peripheral.line_capacitance", per.line_capacitance),
        ] {
            positive(name, v)?;
        }
        fraction("peripheral.disturb_fraction", per.disturb_fraction)?;
        self.variation_spec()
            .validate()
            .map_err(|e| invalid(format!("variation: {e}")))?;
        if self.sweep.voltages.is_empty() {
            return Err(invalid("sweep.voltages is empty"));
        }
        for v in &self.sweep.voltages {
            positive("sweep.voltages", *v)?;
        }
        positive("sweep.report_voltage", self.sweep.report_voltage)?;
        if self.pvt.corners.is_empty() {
            return Err(invalid("pvt.corners is empty"));
        }
        positive("pvt.dv0", self.pvt.dv0)?;
        positive("pvt.residual_limit", self.pvt.residual_limit)?;
        let mc = &self.montecarlo;
        at_least_one("montecarlo.read_full_trials", mc.read_full_trials)?;
        at_least_one("montecarlo.write_full_trials", mc.write_full_trials)?;
        at_least_one("montecarlo.surrogate_trials", mc.surrogate_trials)?;
        at_least_one("montecarlo.validation_trials", mc.validation_trials)?;
        if mc.fit_trials < 20 {
            return Err(invalid("montecarlo.fit_trials must be at least 20"));
        }
        fraction("montecarlo.target", mc.target)?;
        fraction("montecarlo.confidence", mc.confidence)?;
        let m = &self.margins;
        if m.temperatures_c.is_empty() {
            return Err(invalid("margins.temperatures_c is empty"));
        }
        at_least_one("margins.trials", m.trials)?;
        if !(m.target > 0.0 && m.target <= 1.0) {
            return Err(invalid("margins.target must lie in (0, 1]"));
        }
        fraction("margins.confidence", m.confidence)?;
        fraction("margins.max_fraction", m.max_fraction)?;
        positive("margins.resolution", m.resolution)?;
        at_least_one("waveforms.trials", self.waveforms.trials)?;
        positive("waveforms.t_end", self.waveforms.t_end)?;
        if self.waveforms.points < 2 {
            return Err(invalid("waveforms.points must be at least 2"));
        }
        at_least_one(
            "calibrate.max_evaluations",
            self.calibrate.max_evaluations as u64,
        )?;
        Ok(())
    }

    pub fn device_params(&self, kind: DeviceKind) -> DeviceParams {
        let c = match kind {
            DeviceKind::Afmtj => &self.device.afmtj,
            DeviceKind::Mtj => &self.device.mtj,
        };
        let mut p = DeviceParams::new(kind);
        p.alpha = c.alpha;
        p.ms = c.ms;
        p.hk = c.hk;
        p.sot_efficiency = c.sot_efficiency;
        p.j_af = c.j_af;
        p.rp = c.rp;
        p.tmr = c.tmr;
        p
    }

    pub fn probe(&self) -> LatencyProbe {
        LatencyProbe {
            initial_tilt: self.probe.initial_tilt,
            threshold: self.probe.threshold,
            t_rise: self.probe.t_rise,
            t_fall: self.probe.t_fall,
        }
    }

    /// Bitline at the nominal array values.
    pub fn bitline(&self) -> afmtj_core::Result<BitlineNetwork> {
        let a = &self.array;
        build_bitline(a.r_bl, a.c_bit, a.c_tsv, a.n_segments, a.tsv_hops)?.with_wire(a.c_wire)
    }

    pub fn thermal(&self) -> TierThermalModel {
        TierThermalModel {
            n_tiers: self.array.tiers,
            t_bottom: self.array.t_bottom_k,
            delta_t_total: self.array.delta_t_k,
        }
    }

    pub fn sense_amp(&self) -> SenseAmpModel {
        match self.peripheral.sense_amp {
            SenseAmpKind::Plus => SenseAmpModel::plus(),
            SenseAmpKind::Baseline => SenseAmpModel::baseline(),
        }
    }

    pub fn sa_variant(&self) -> SaVariant {
        match self.peripheral.sense_amp {
            SenseAmpKind::Plus => SaVariant::Plus,
            SenseAmpKind::Baseline => SaVariant::Baseline,
        }
    }

    pub fn precharge(&self, variant: PdVariant) -> PrechargeEqModel {
        PrechargeEqModel {
            eq_pulse_width: self.peripheral.eq_pulse_width,
            ..PrechargeEqModel::new(variant)
        }
    }

    fn pd_variant(&self) -> PdVariant {
        match self.peripheral.precharge {
            PrechargeKind::Pd => PdVariant::Pd,
            PrechargeKind::PdEq => PdVariant::PdEq,
            PrechargeKind::PdEqPlus => PdVariant::PdEqPlus,
        }
    }

    pub fn write_driver(&self) -> WriteDriverModel {
        let (v, w) = (self.peripheral.write_voltage, self.peripheral.pulse_width);
        let mut wd = match self.peripheral.write_driver {
            WriteDriverKind::WdWrite => WriteDriverModel::wd_write(v, w),
            WriteDriverKind::Fixed => WriteDriverModel::fixed(v, w),
        };
        wd.t_rise = self.probe.t_rise;
        wd.t_fall = self.probe.t_fall;
        wd
    }

    /// Process and environment spread, with the operating point pinned at
    /// the configured write pulse and nominal read knobs.
    pub fn variation_spec(&self) -> VariationSpec {
        let v = &self.variation;
        VariationSpec {
            vdd: v.vdd.into(),
            temperature: v.temperature.into(),
            r_bl: v.r_bl.into(),
            c_bit: v.c_bit.into(),
            c_tsv: v.c_tsv.into(),
            rp_scale: v.rp_scale.into(),
            tmr_scale: v.tmr_scale.into(),
            sa_offset: v.sa_offset.into(),
            hk_scale: v.hk_scale.into(),
            sot_scale: v.sot_scale.into(),
            write_bias: Dist::Point(self.peripheral.write_voltage),
            pulse_width: Dist::Point(self.peripheral.pulse_width),
            read_bias_scale: Dist::Point(1.0),
            sense_time_scale: Dist::Point(1.0),
        }
    }

    /// Read-trial setup. A baseline comparator gets its fixed reference
    /// centred on the nominal state voltages.
    pub fn read_setup(&self) -> afmtj_core::Result<ReadSetup> {
        let mut s = ReadSetup::new(self.device_params(DeviceKind::Afmtj), self.sense_amp());
        s.n_segments = self.array.n_segments;
        s.tsv_hops = self.array.tsv_hops;
        s.c_wire = self.array.c_wire;
        s.precharge = self.precharge(self.pd_variant());
        s.timing.t_sense = self.peripheral.t_sense;
        if self.peripheral.sense_amp == SenseAmpKind::Baseline {
            s = s.centered(&self.variation_spec())?;
        }
        Ok(s)
    }

    pub fn write_setup(&self) -> WriteSetup {
        let mut s = WriteSetup::new(self.device_params(DeviceKind::Afmtj));
        s.driver = self.write_driver();
        s.probe = self.probe();
        s.disturb_fraction = self.peripheral.disturb_fraction;
        s.relax_time = self.peripheral.relax_time;
        s
    }

    pub fn energy_model(&self) -> afmtj_core::Result<WriteEnergyModel> {
        Ok(WriteEnergyModel {
            line_capacitance: self.peripheral.line_capacitance,
            verify_read_energy: ReadTables::default().read_energy(self.sa_variant(), 0.90, 25.0)?,
            ..WriteEnergyModel::default()
        })
    }

    /// Configured corners. Names are leaked to match the core's static
    /// corner table; a run builds this list once.
    pub fn corners(&self) -> Vec<Corner> {
        self.pvt
            .corners
            .iter()
            .map(|c| Corner {
                name: Box::leak(c.name.clone().into_boxed_str()),
                vdd: c.vdd,
                temperature_c: c.temperature_c,
            })
            .collect()
    }

    pub fn margin_settings(&self) -> MarginSettings {
        MarginSettings {
            target: self.margins.target,
            confidence: self.margins.confidence,
            max_fraction: self.margins.max_fraction,
            resolution: self.margins.resolution,
        }
    }

    pub fn wave_grid(&self) -> WaveGrid {
        WaveGrid {
            t_end: self.waveforms.t_end,
            points: self.waveforms.points,
        }
    }

    /// `explicit` if given, then the config, then the environment.
    pub fn output_dir(&self, explicit: Option<&Path>) -> PathBuf {
        if let Some(p) = explicit {
            return p.to_path_buf();
        }
        if !self.output_dir.is_empty() {
            return PathBuf::from(&self.output_dir);
        }
        match std::env::var_os(OUT_DIR_ENV) {
            Some(v) if !v.is_empty() => PathBuf::from(v),
            _ => PathBuf::from(FALLBACK_OUT_DIR),
        }
    }
}

pub fn kind_key(kind: DeviceKind) -> &'static str {
    match kind {
        DeviceKind::Afmtj => "afmtj",
        DeviceKind::Mtj => "mtj",
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_load_and_validate() {
        let c = load(None, &[]).unwrap();
        assert_eq!(c.hash.len(), 16);
        assert_eq!(c.config.sweep.voltages.len(), 8);
    }

    #[test]
    fn overrides_reach_nested_keys() {
        let c = load(
            None,
            &[
                "montecarlo.surrogate_trials=10".into(),
                "peripheral.sense_amp=baseline".into(),
            ],
        )
        .unwrap();
        assert_eq!(c.config.montecarlo.surrogate_trials, 10);
        assert_eq!(c.config.peripheral.sense_amp, SenseAmpKind::Baseline);
        let base = load(None, &[]).unwrap();
        assert_ne!(c.hash, base.hash);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(matches!(
            load(None, &["montecarlo.trails=10".into()]),
            Err(CliError::Config(_))
        ));
        assert!(matches!(
            load(None, &["bogus=1".into()]),
            Err(CliError::Config(_))
        ));
        assert!(matches!(
            load(
                None,
                &["variation.vdd={ kind = \"uniform\", lo = 1.0, hi = 2.0, mode = 1 }".into()]
            ),
            Err(CliError::Config(_))
        ));
    }

    #[test]
    fn bad_values_are_rejected() {
        for o in [
            "device.afmtj.alpha=0",
            "montecarlo.target=2",
            "waveforms.points=1",
            "sweep.voltages=[]",
        ] {
            assert!(
                matches!(load(None, &[o.into()]), Err(CliError::Config(_))),
                "{o}"
            );
        }
    }

    #[test]
    fn scheduling_keys_do_not_change_the_hash() {
        let a = load(None, &[]).unwrap();
        let b = load(None, &["threads=3".into(), "output_dir=\"x\"".into()]).unwrap();
        assert_eq!(a.hash, b.hash);
    }

    #[test]
    fn merge_is_recursive() {
        let mut base: toml::Table = "[a]\nx = 1\ny = 2".parse().unwrap();
        merge(&mut base, "[a]\ny = 3".parse().unwrap());
        assert_eq!(base["a"]["x"].as_integer(), Some(1));
        assert_eq!(base["a"]["y"].as_integer(), Some(3));
    }
}
