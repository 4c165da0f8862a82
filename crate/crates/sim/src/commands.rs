//! One function per subcommand. Each builds its artifacts in memory and
//! returns them with a one-line digest; nothing touches the disk here.

use std::ops::Range;

use afmtj_core::circuit::{precharge_bitline, read_path_simulate, ReadTiming};
use afmtj_core::dynamics::DeviceKind;
use afmtj_core::experiments::fit_rp_to_energy;
use afmtj_core::experiments::{
    average_waveforms, calibrate_device, energy_anchor, fig3::ENERGY_ANCHOR_V, latency_targets,
    margin_table, pvt_read_table, sweep_write, trial_waveform, write_trial_waveform,
    CalibrationSettings, FitLevel, MarginModels, WavePath, WritePoint,
};
use afmtj_core::montecarlo::{
    count_failures, read_misclassification, read_outcome, write_misclassification, write_outcome,
    write_trial_full, MarginAxis, RateEstimate, ReadModel, ReadSurrogate, TrialOutcome,
    VariationSpec, WriteModel, WriteSurrogate, SAMPLE_FIELDS,
};
use afmtj_core::peripherals::{
    disturbance_free_window, driver_self_energy, precharge_waveform, PdVariant, ReadTables,
    SaVariant,
};
use afmtj_core::Bit;
use rayon::prelude::*;
use rayon::ThreadPool;

use crate::artifacts::{exact, fixed, significant, Artifacts, Summary};
use crate::config::{kind_key, LoadedConfig, RunConfig};
use crate::error::Result;
use crate::plot::{LinePlot, Series};

/// Trial ids used to fit the fast models start here, far from the ids of
/// the estimation runs.
pub const FIT_FIRST_ID: u64 = 1 << 40;
/// Trial ids used to check the fast models against full transients.
pub const VALIDATION_FIRST_ID: u64 = 2 << 40;
/// Work unit for parallel trial loops. Fixed, so the split of work never
/// depends on the number of workers.
const CHUNK: u64 = 4096;

/// Shared state of one command run.
pub struct Ctx<'a> {
    pub loaded: &'a LoadedConfig,
    pub pool: &'a ThreadPool,
}

impl Ctx<'_> {
    fn cfg(&self) -> &RunConfig {
        &self.loaded.config
    }

    fn seed(&self) -> u64 {
        self.cfg().master_seed
    }

    fn artifacts(&self, command: &str) -> Artifacts {
        Artifacts::new(command, &self.loaded.hash, self.seed())
    }
}

/// What a command produced.
pub struct Outcome {
    pub artifacts: Artifacts,
    pub digest: String,
}

fn chunks(range: Range<u64>, size: u64) -> Vec<Range<u64>> {
    let mut out = Vec::new();
    let mut a = range.start;
    while a < range.end {
        let b = (a + size).min(range.end);
        out.push(a..b);
        a = b;
    }
    out
}

/// Failures among ids `0..n`, counted in parallel and merged in id order.
fn par_failures<F>(pool: &ThreadPool, n: u64, failed: F) -> Result<u64>
where
    F: Fn(u64) -> afmtj_core::Result<bool> + Sync,
{
    let parts: Vec<afmtj_core::Result<u64>> = pool.install(|| {
        chunks(0..n, CHUNK)
            .into_par_iter()
            .map(|r| count_failures(r, &failed))
            .collect()
    });
    let mut k = 0;
    for p in parts {
        k += p?;
    }
    Ok(k)
}

/// `f` over ids `0..n` in parallel, results in id order.
fn par_map<T, F>(pool: &ThreadPool, n: u64, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> afmtj_core::Result<T> + Sync,
{
    let out: afmtj_core::Result<Vec<T>> = pool.install(|| (0..n).into_par_iter().map(&f).collect());
    Ok(out?)
}

/// Misclassified trials among `n` ids from `first`, checked in parallel.
fn par_misclassified<F>(pool: &ThreadPool, first: u64, n: u64, share: F) -> Result<f64>
where
    F: Fn(u64, u64) -> afmtj_core::Result<f64> + Sync,
{
    let parts: Vec<afmtj_core::Result<f64>> = pool.install(|| {
        chunks(first..first + n, 50)
            .into_par_iter()
            .map(|r| Ok((share(r.start, r.end - r.start)? * (r.end - r.start) as f64).round()))
            .collect()
    });
    let mut wrong = 0.0;
    for p in parts {
        wrong += p?;
    }
    Ok(wrong / n.max(1) as f64)
}

fn ps(t: f64) -> String {
    fixed(t * 1e12, 3)
}

fn fj(e: f64) -> String {
    fixed(e * 1e15, 4)
}

fn kinds() -> [DeviceKind; 2] {
    [DeviceKind::Afmtj, DeviceKind::Mtj]
}

// ---------------------------------------------------------------- simulate

pub fn simulate(ctx: &Ctx<'_>, kind: DeviceKind) -> Result<Outcome> {
    let cfg = ctx.cfg();
    let mut art = ctx.artifacts("simulate");
    let spec = cfg.variation_spec().pinned();
    let s = spec.nominal();

    let mut write = cfg.write_setup();
    write.device = cfg.device_params(kind);
    let grid = cfg.wave_grid();
    let times = grid.times();
    let mz = write_trial_waveform(&write, &spec, ctx.seed(), 0, &grid)?;
    let trial = write_trial_full(&write, &s)?;
    let rows: Vec<Vec<String>> = times
        .iter()
        .zip(&mz)
        .map(|(t, m)| vec![fixed(t * 1e9, 6), exact(*m)])
        .collect();
    art.csv("simulate_write.csv", &["Time", "Mz"], &rows)?;

    let read = {
        let mut r = cfg.read_setup()?;
        r.device = cfg.device_params(kind);
        r
    };
    let cell = read.cell(&s);
    let net = cfg.bitline()?;
    let line = read.precharge.line_at(&net, s.temperature);
    let pre = precharge_waveform(&read.precharge, &net, s.temperature);
    let timing = ReadTiming {
        t_after: (grid.t_end - read.timing.t_sense).max(0.0),
        ..read.timing
    };
    let wp = read_path_simulate(&line, Bit::Zero, &cell, &pre, &timing)?;
    let wap = read_path_simulate(&line, Bit::One, &cell, &pre, &timing)?;
    let settled = precharge_bitline(&line, &pre, None, timing.dt)?;
    let rows: Vec<Vec<String>> =
        wp.t.iter()
            .zip(wp.v_sense.iter().zip(&wap.v_sense))
            .map(|(t, (p, ap))| vec![fixed(t * 1e9, 6), exact(*p), exact(*ap)])
            .collect();
    art.csv("simulate_read.csv", &["Time", "V_P", "V_AP"], &rows)?;

    let plot = LinePlot::new("Write transient", "Time (ns)", "Mz").with(Series::new(
        kind_key(kind),
        times
            .iter()
            .map(|t| t * 1e9)
            .zip(mz.iter().copied())
            .collect(),
    ));
    art.raw("simulate_write.svg", plot.render(art.stamp()));
    let plot = LinePlot::new("Read transient", "Time (ns)", "Sense node (V)")
        .with(Series::new(
            "P",
            wp.t.iter()
                .map(|t| t * 1e9)
                .zip(wp.v_sense.iter().copied())
                .collect(),
        ))
        .with(Series::new(
            "AP",
            wap.t
                .iter()
                .map(|t| t * 1e9)
                .zip(wap.v_sense.iter().copied())
                .collect(),
        ));
    art.raw("simulate_read.svg", plot.render(art.stamp()));

    let slowest = trial
        .latency
        .iter()
        .copied()
        .collect::<Option<Vec<f64>>>()
        .map(|l| l.iter().fold(0.0_f64, |a, b| a.max(*b)));
    let mut sum = Summary::new();
    sum.text("device", kind_key(kind))
        .num("write.voltage_v", s.write_bias)
        .num("write.pulse_width_ns", s.pulse_width * 1e9)
        .flag("write.pass", trial.pass);
    match slowest {
        Some(t) => sum.num("write.latency_ps", t * 1e12),
        None => sum.text("write.latency_ps", "NoSwitch"),
    };
    sum.num("write.final_mz", *mz.last().unwrap_or(&f64::NAN))
        .num("read.precharge_v", settled[line.device_node()])
        .num("read.v_p_at_sense", wp.v_at_sense)
        .num("read.v_ap_at_sense", wap.v_at_sense)
        .num(
            "read.differential_mv",
            (wap.v_at_sense - wp.v_at_sense) * 1e3,
        );
    art.summary("simulate_summary.txt", &sum);
    let digest = format!(
        "simulate {}: write {}, read differential {:.2} mV",
        kind_key(kind),
        slowest.map_or("NoSwitch".to_string(), |t| format!("{:.1} ps", t * 1e12)),
        (wap.v_at_sense - wp.v_at_sense) * 1e3
    );
    Ok(Outcome {
        artifacts: art,
        digest,
    })
}

// ------------------------------------------------------------- sweep-write

fn fit_level(points: &[WritePoint], kind: DeviceKind) -> Option<f64> {
    let targets = latency_targets(kind);
    let mut worst: Option<f64> = Some(0.0);
    for t in &targets {
        let got = points
            .iter()
            .find(|p| (p.voltage - t.voltage).abs() < 1e-9)?;
        let e = match got.latency {
            Some(l) => (l / t.latency - 1.0).abs(),
            None => f64::INFINITY,
        };
        worst = worst.map(|w| w.max(e));
    }
    worst
}

fn level_label(err: f64) -> &'static str {
    if err <= 0.05 {
        FitLevel::Tight.label()
    } else if err <= 0.15 {
        FitLevel::Relaxed.label()
    } else {
        "outside 15%"
    }
}

pub fn sweep(ctx: &Ctx<'_>) -> Result<Outcome> {
    let cfg = ctx.cfg();
    let mut art = ctx.artifacts("sweep-write");
    let probe = cfg.probe();
    let wd = cfg.write_driver();
    let model = cfg.energy_model()?;
    let mut volts = cfg.sweep.voltages.clone();
    let v_rep = cfg.sweep.report_voltage;
    if !volts.iter().any(|v| (v - v_rep).abs() < 1e-12) {
        volts.push(v_rep);
    }
    let jobs: Vec<(DeviceKind, f64)> = kinds()
        .into_iter()
        .flat_map(|k| volts.iter().map(move |&v| (k, v)))
        .collect();
    let done: Vec<afmtj_core::Result<WritePoint>> = ctx.pool.install(|| {
        jobs.par_iter()
            .map(|&(k, v)| {
                sweep_write(&cfg.device_params(k), &probe, &wd, &model, &[v])
                    .map(|mut p| p.remove(0))
            })
            .collect()
    });
    let mut by_kind: [Vec<WritePoint>; 2] = [Vec::new(), Vec::new()];
    for ((k, _), p) in jobs.iter().zip(done) {
        by_kind[(*k == DeviceKind::Mtj) as usize].push(p?);
    }
    let n = cfg.sweep.voltages.len();
    let at =
        |pts: &[WritePoint], v: f64| pts.iter().find(|p| (p.voltage - v).abs() < 1e-12).copied();
    let (afm_rep, mtj_rep) = (
        at(&by_kind[0], v_rep).expect("added above"),
        at(&by_kind[1], v_rep).expect("added above"),
    );

    let mut breakdown = Vec::new();
    for (k, pts) in kinds().into_iter().zip(&by_kind) {
        let rows: Vec<Vec<String>> = pts[..n]
            .iter()
            .map(|p| match p.latency {
                Some(l) => vec![exact(p.voltage), ps(l), fj(p.total_energy)],
                None => vec![exact(p.voltage), "NoSwitch".into(), "NoSwitch".into()],
            })
            .collect();
        art.csv(
            &format!("sweep_write_{}.csv", kind_key(k)),
            &["V", "latency_ps", "energy_fJ"],
            &rows,
        )?;
        for p in &pts[..n] {
            breakdown.push(vec![
                kind_key(k).to_string(),
                exact(p.voltage),
                p.latency.map_or("NoSwitch".into(), ps),
                fj(p.cell_energy),
                fj(p.line_energy),
                fj(p.driver_energy),
                fj(p.verify_energy),
                fj(p.total_energy),
                fixed(p.driver_overhead * 100.0, 4),
            ]);
        }
    }
    art.csv(
        "sweep_write_breakdown.csv",
        &[
            "device",
            "V",
            "latency_ps",
            "cell_fJ",
            "line_fJ",
            "driver_fJ",
            "verify_fJ",
            "total_fJ",
            "driver_overhead_pct",
        ],
        &breakdown,
    )?;

    let series = |f: &dyn Fn(&WritePoint) -> Option<f64>| -> Vec<Series> {
        kinds()
            .into_iter()
            .zip(&by_kind)
            .map(|(k, pts)| {
                Series::new(
                    kind_key(k).to_uppercase(),
                    pts[..n]
                        .iter()
                        .filter_map(|p| f(p).map(|y| (p.voltage, y)))
                        .collect(),
                )
            })
            .collect()
    };
    let mut lat = LinePlot::new("Write latency", "Voltage (V)", "Latency (ps)").log_y();
    lat.series = series(&|p| p.latency.map(|l| l * 1e12));
    art.raw("sweep_write_latency.svg", lat.render(art.stamp()));
    let mut en = LinePlot::new("Write energy", "Voltage (V)", "Energy (fJ)").log_y();
    en.series = series(&|p| p.latency.map(|_| p.total_energy * 1e15));
    art.raw("sweep_write_energy.svg", en.render(art.stamp()));

    let afm = &by_kind[0][..n];
    let mtj = &by_kind[1][..n];
    let lat_down = afm
        .windows(2)
        .all(|w| matches!((w[0].latency, w[1].latency), (Some(a), Some(b)) if b < a));
    let en_up = afm.iter().all(|p| p.latency.is_some())
        && afm
            .windows(2)
            .all(|w| w[1].total_energy > w[0].total_energy);
    let dominance = afm
        .iter()
        .zip(mtj)
        .all(|(a, m)| match (a.latency, m.latency) {
            (Some(la), Some(lm)) => la < lm && a.total_energy < m.total_energy,
            (Some(_), None) => true,
            _ => false,
        });
    let speedup = match (afm_rep.latency, mtj_rep.latency) {
        (Some(a), Some(m)) => m / a,
        _ => f64::NAN,
    };
    let self_energy = driver_self_energy(&wd, v_rep);
    let tables = ReadTables::default();
    let verify_latency = tables.read_latency(cfg.sa_variant(), 0.90, 25.0)?;

    let mut sum = Summary::new();
    sum.num("report_voltage_v", v_rep).num("speedup", speedup);
    for (k, pts) in kinds().into_iter().zip([afm, mtj]) {
        let key = kind_key(k);
        match fit_level(pts, k) {
            Some(e) => {
                sum.num(&format!("fig3.{key}.max_latency_error_pct"), e * 100.0)
                    .text(&format!("fig3.{key}.level"), level_label(e));
            }
            None => {
                sum.text(
                    &format!("fig3.{key}.level"),
                    "not compared (custom voltages)",
                );
            }
        }
    }
    sum.flag("afmtj.latency_strictly_decreasing", lat_down)
        .flag("afmtj.energy_strictly_increasing", en_up)
        .flag("afmtj.faster_and_cheaper_everywhere", dominance);
    match afm_rep.latency {
        Some(l) => sum.num("afmtj.latency_ps", l * 1e12),
        None => sum.text("afmtj.latency_ps", "NoSwitch"),
    };
    sum.num("afmtj.energy_fj", afm_rep.total_energy * 1e15);
    match mtj_rep.latency {
        Some(l) => sum.num("mtj.latency_ps", l * 1e12),
        None => sum.text("mtj.latency_ps", "NoSwitch"),
    };
    sum.num("mtj.energy_fj", mtj_rep.total_energy * 1e15)
        .num("driver.self_energy_fj", self_energy * 1e15)
        .num("driver.overhead_pct", afm_rep.driver_overhead * 100.0)
        .flag("driver.overhead_below_1pct", afm_rep.driver_overhead < 0.01)
        .num("verify_read.energy_fj", model.verify_read_energy * 1e15)
        .num("verify_read.latency_ns", verify_latency * 1e9)
        .comment("Energies include one verify read per write: a TT-corner read with the configured sense")
        .comment("amplifier. Its energy is added to every point; its latency is reported here only.");
    art.summary("sweep_write_summary.txt", &sum);

    let level = fit_level(afm, DeviceKind::Afmtj)
        .zip(fit_level(mtj, DeviceKind::Mtj))
        .map_or("n/a", |(a, m)| level_label(a.max(m)));
    let digest = format!(
        "sweep-write: speedup {speedup:.2}x at {v_rep} V, fit {level}, driver overhead {:.3}%",
        afm_rep.driver_overhead * 100.0
    );
    Ok(Outcome {
        artifacts: art,
        digest,
    })
}

// --------------------------------------------------------------- pvt-table

pub fn pvt(ctx: &Ctx<'_>) -> Result<Outcome> {
    let cfg = ctx.cfg();
    let mut art = ctx.artifacts("pvt-table");
    let tables = ReadTables::default();
    let corners = cfg.corners();
    let rows = pvt_read_table(&tables, &corners)?;
    let mut out = Vec::new();
    let mut ratios = Vec::new();
    for pair in rows.chunks(2) {
        let (base, plus) = (&pair[0], &pair[1]);
        let ratio = base.energy_fj / plus.energy_fj;
        ratios.push((base.corner.name, ratio));
        for r in pair {
            out.push(vec![
                r.corner.name.to_string(),
                exact(r.corner.vdd),
                exact(r.corner.temperature_c),
                match r.sa {
                    SaVariant::Baseline => "baseline".to_string(),
                    SaVariant::Plus => "plus".to_string(),
                },
                significant(r.latency_ns, 10),
                significant(r.energy_fj, 10),
                fixed(ratio, 2),
            ]);
        }
    }
    art.csv(
        "pvt_table.csv",
        &[
            "corner",
            "vdd",
            "temperature_c",
            "sense_amp",
            "latency_ns",
            "energy_fJ",
            "energy_ratio",
        ],
        &out,
    )?;

    let net = cfg.bitline()?;
    let thermal = cfg.thermal();
    let window = |v| {
        disturbance_free_window(
            &cfg.precharge(v),
            &net,
            &thermal,
            cfg.pvt.dv0,
            cfg.pvt.residual_limit,
        )
    };
    let (w_eq, w_plus) = (window(PdVariant::PdEq), window(PdVariant::PdEqPlus));
    let gain = w_plus / w_eq;

    let mut sum = Summary::new();
    for (name, r) in &ratios {
        sum.num(&format!("energy_ratio.{name}"), *r);
    }
    sum.num("precharge.delta_t_k", thermal.delta_t_total)
        .num("precharge.pd_eq_window", w_eq)
        .num("precharge.pd_eq_plus_window", w_plus)
        .num("precharge.window_gain", gain)
        .flag("precharge.gain_at_least_2x", gain >= 2.0)
        .comment("Window: largest window-shortening fraction tolerated at every tier temperature,")
        .comment("times the tier gradient in K, with the residual differential below the limit.");
    art.summary("pvt_summary.txt", &sum);
    let digest = format!(
        "pvt-table: {} rows, energy ratios {}, PD_EQ+ window {gain:.2}x PD_EQ",
        out.len(),
        ratios
            .iter()
            .map(|(n, r)| format!("{n} {r:.1}x"))
            .collect::<Vec<_>>()
            .join(" ")
    );
    Ok(Outcome {
        artifacts: art,
        digest,
    })
}

// ---------------------------------------------------------------- margins

struct Fitted {
    read: ReadSurrogate,
    write: WriteSurrogate,
    read_miss: f64,
    write_miss: f64,
}

fn fit_surrogates(ctx: &Ctx<'_>, spec: &VariationSpec) -> Result<Fitted> {
    let cfg = ctx.cfg();
    let (rs, ws) = (cfg.read_setup()?, cfg.write_setup());
    let swept = spec.with_swept_operating_point();
    let seed = ctx.seed();
    let mc = &cfg.montecarlo;
    let (read, write) = ctx.pool.install(|| {
        rayon::join(
            || ReadSurrogate::fit(&rs, &swept, seed, FIT_FIRST_ID, mc.fit_trials),
            || WriteSurrogate::fit(&ws, &swept, seed, FIT_FIRST_ID, mc.fit_trials),
        )
    });
    let (read, write) = (read?, write?);
    let n = mc.validation_trials;
    let read_miss = par_misclassified(ctx.pool, VALIDATION_FIRST_ID, n, |a, k| {
        read_misclassification(&read, &rs, &swept, seed, a, k)
    })?;
    let write_miss = par_misclassified(ctx.pool, VALIDATION_FIRST_ID, n, |a, k| {
        write_misclassification(&write, &ws, &swept, seed, a, k)
    })?;
    Ok(Fitted {
        read,
        write,
        read_miss,
        write_miss,
    })
}

pub fn margins(ctx: &Ctx<'_>) -> Result<Outcome> {
    let cfg = ctx.cfg();
    let mut art = ctx.artifacts("margins");
    let spec = cfg.variation_spec();
    let fitted = fit_surrogates(ctx, &spec)?;
    let (rs, ws) = (cfg.read_setup()?, cfg.write_setup());
    let models = MarginModels {
        read_setup: &rs,
        read: ReadModel::Surrogate(&fitted.read),
        write_setup: &ws,
        write: WriteModel::Surrogate(&fitted.write),
    };
    let temps = &cfg.margins.temperatures_c;
    let per_temp: Vec<afmtj_core::Result<Vec<afmtj_core::experiments::MarginRow>>> =
        ctx.pool.install(|| {
            temps
                .par_iter()
                .map(|&t| {
                    margin_table(
                        &models,
                        &spec,
                        &[t],
                        &cfg.margin_settings(),
                        ctx.seed(),
                        cfg.margins.trials,
                    )
                })
                .collect()
        });
    let mut rows = Vec::new();
    for r in per_temp {
        rows.extend(r?);
    }
    let csv_rows: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                exact(r.temperature_c),
                r.axis.label().to_string(),
                fixed(r.margin_pct, 2),
            ]
        })
        .collect();
    art.csv(
        "margins.csv",
        &["temperature_c", "axis", "margin_pct"],
        &csv_rows,
    )?;

    let mut sum = Summary::new();
    sum.num("target", cfg.margins.target)
        .num("confidence", cfg.margins.confidence)
        .int("trials_per_probe", cfg.margins.trials)
        .num("cap_pct", cfg.margins.max_fraction * 100.0)
        .num("surrogate.read_misclassification", fitted.read_miss)
        .num("surrogate.write_misclassification", fitted.write_miss)
        .num("surrogate.write_lead_ps", fitted.write.lead * 1e12);
    let mut all_ok = true;
    for &t in temps {
        let get = |a: MarginAxis| {
            rows.iter()
                .find(|r| r.temperature_c == t && r.axis == a)
                .map_or(f64::NAN, |r| r.margin_pct)
        };
        let (vr, tsa, vw, tw) = (
            get(MarginAxis::ReadVoltage),
            get(MarginAxis::SenseTime),
            get(MarginAxis::WriteVoltage),
            get(MarginAxis::PulseWidth),
        );
        let key = format!("t{}c", t.round() as i64);
        let positive = [vr, tsa, vw, tw].iter().all(|m| *m > 0.0);
        sum.flag(&format!("{key}.all_positive"), positive)
            .flag(&format!("{key}.t_sa_above_v_r"), tsa > vr)
            .flag(&format!("{key}.tau_w_above_v_w"), tw > vw);
        all_ok &= positive && tsa > vr && tw > vw;
    }
    sum.flag("ordering_holds", all_ok);
    art.summary("margins_summary.txt", &sum);
    let digest = format!(
        "margins: {} rows, positive and ordered: {all_ok}, surrogate misclassification read {:.4} write {:.4}",
        rows.len(),
        fitted.read_miss,
        fitted.write_miss
    );
    Ok(Outcome {
        artifacts: art,
        digest,
    })
}

// -------------------------------------------------------------- montecarlo

fn rate_keys(sum: &mut Summary, key: &str, r: &RateEstimate, confidence: f64, target: f64) {
    let (lo, hi) = r.interval(confidence);
    let upper = r.upper(confidence);
    sum.int(&format!("{key}.trials"), r.n_trials)
        .int(&format!("{key}.failures"), r.n_failures)
        .num(&format!("{key}.rate"), r.point)
        .num(&format!("{key}.cp_upper"), upper)
        .num(&format!("{key}.cp_interval_lo"), lo)
        .num(&format!("{key}.cp_interval_hi"), hi)
        .flag(&format!("{key}.meets_target"), upper <= target);
}

fn trial_rows(outcomes: &[TrialOutcome]) -> Vec<Vec<String>> {
    outcomes
        .iter()
        .map(|o| {
            let mut row = vec![
                o.trial_id.to_string(),
                o.pass.to_string(),
                o.latency.map_or("NA".into(), |l| exact(l * 1e12)),
                exact(o.margin),
            ];
            row.extend(o.sample.to_array().iter().map(|v| exact(*v)));
            row
        })
        .collect()
}

pub fn montecarlo(ctx: &Ctx<'_>) -> Result<Outcome> {
    let cfg = ctx.cfg();
    let mc = cfg.montecarlo;
    let seed = ctx.seed();
    let mut art = ctx.artifacts("montecarlo");
    let spec = cfg.variation_spec();
    let (rs, ws) = (cfg.read_setup()?, cfg.write_setup());

    let (read_full, write_full) = if mc.trial_csv {
        let ro = par_map(ctx.pool, mc.read_full_trials, |id| {
            read_outcome(&rs, &spec, ReadModel::Full, seed, id)
        })?;
        let wo = par_map(ctx.pool, mc.write_full_trials, |id| {
            write_outcome(&ws, &spec, WriteModel::Full, seed, id)
        })?;
        let mut header = vec!["trial_id", "pass", "latency_ps", "margin"];
        header.extend(SAMPLE_FIELDS);
        art.csv("trials_read.csv", &header, &trial_rows(&ro))?;
        art.csv("trials_write.csv", &header, &trial_rows(&wo))?;
        let fails = |o: &[TrialOutcome]| o.iter().filter(|t| !t.pass).count() as u64;
        (
            RateEstimate::new(mc.read_full_trials, fails(&ro)),
            RateEstimate::new(mc.write_full_trials, fails(&wo)),
        )
    } else {
        let kr = par_failures(ctx.pool, mc.read_full_trials, |id| {
            Ok(!read_outcome(&rs, &spec, ReadModel::Full, seed, id)?.pass)
        })?;
        let kw = par_failures(ctx.pool, mc.write_full_trials, |id| {
            Ok(!write_outcome(&ws, &spec, WriteModel::Full, seed, id)?.pass)
        })?;
        (
            RateEstimate::new(mc.read_full_trials, kr),
            RateEstimate::new(mc.write_full_trials, kw),
        )
    };

    let fitted = fit_surrogates(ctx, &spec)?;
    let n = mc.surrogate_trials;
    let kr = par_failures(ctx.pool, n, |id| {
        Ok(!read_outcome(&rs, &spec, ReadModel::Surrogate(&fitted.read), seed, id)?.pass)
    })?;
    let kw = par_failures(ctx.pool, n, |id| {
        Ok(!write_outcome(&ws, &spec, WriteModel::Surrogate(&fitted.write), seed, id)?.pass)
    })?;
    let (read_sur, write_sur) = (RateEstimate::new(n, kr), RateEstimate::new(n, kw));

    let mut sum = Summary::new();
    sum.num("target", mc.target)
        .num("confidence", mc.confidence);
    rate_keys(&mut sum, "read.full", &read_full, mc.confidence, mc.target);
    rate_keys(
        &mut sum,
        "read.surrogate",
        &read_sur,
        mc.confidence,
        mc.target,
    );
    sum.num("read.surrogate.misclassification", fitted.read_miss);
    rate_keys(
        &mut sum,
        "write.full",
        &write_full,
        mc.confidence,
        mc.target,
    );
    rate_keys(
        &mut sum,
        "write.surrogate",
        &write_sur,
        mc.confidence,
        mc.target,
    );
    sum.num("write.surrogate.misclassification", fitted.write_miss)
        .comment("cp_upper is the one-sided Clopper-Pearson bound at the stated confidence;")
        .comment("cp_interval_lo/hi is the two-sided interval.");
    art.summary("montecarlo_summary.txt", &sum);
    let digest = format!(
        "montecarlo: BER {:.3e} (upper {:.3e}), WER {:.3e} (upper {:.3e}); surrogate BER upper {:.3e}, WER upper {:.3e} over {n} trials",
        read_full.point,
        read_full.upper(mc.confidence),
        write_full.point,
        write_full.upper(mc.confidence),
        read_sur.upper(mc.confidence),
        write_sur.upper(mc.confidence),
    );
    Ok(Outcome {
        artifacts: art,
        digest,
    })
}

// --------------------------------------------------------------- waveforms

pub fn waveforms(ctx: &Ctx<'_>, path: WavePath) -> Result<Outcome> {
    let cfg = ctx.cfg();
    let mut art = ctx.artifacts("waveforms");
    let spec = cfg.variation_spec();
    let (rs, ws) = (cfg.read_setup()?, cfg.write_setup());
    let grid = cfg.wave_grid();
    let seed = ctx.seed();
    let traces = par_map(ctx.pool, cfg.waveforms.trials, |id| {
        trial_waveform(path, &rs, &ws, &spec, seed, id, &grid)
    })?;
    let avg = average_waveforms(&traces)?;
    let times = grid.times();
    let (name, column, label) = match path {
        WavePath::Read => ("read", "Average_vout", "v_out (V)"),
        WavePath::Write => ("write", "Average_Mz", "Mz"),
    };
    let rows: Vec<Vec<String>> = times
        .iter()
        .zip(&avg)
        .map(|(t, v)| vec![fixed(t * 1e9, 6), exact(*v)])
        .collect();
    art.csv(
        &format!("mc_transient_waveforms_{name}.csv"),
        &["Time", column],
        &rows,
    )?;
    let plot = LinePlot::new(
        &format!("Average {name} transient, {} trials", traces.len()),
        "Time (ns)",
        label,
    )
    .with(Series::new(
        column,
        times
            .iter()
            .map(|t| t * 1e9)
            .zip(avg.iter().copied())
            .collect(),
    ));
    art.raw(
        &format!("mc_transient_waveforms_{name}.svg"),
        plot.render(art.stamp()),
    );

    let (lo, hi) = avg
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
            (a.min(*v), b.max(*v))
        });
    let mut sum = Summary::new();
    sum.text("path", name)
        .int("trials", cfg.waveforms.trials)
        .int("points", times.len() as u64)
        .num("start", avg[0])
        .num("end", avg[avg.len() - 1])
        .num("min", lo)
        .num("max", hi);
    art.summary(&format!("waveforms_{name}_summary.txt"), &sum);
    let digest = format!(
        "waveforms {name}: {} trials averaged, {} -> {}",
        traces.len(),
        fixed(avg[0], 4),
        fixed(avg[avg.len() - 1], 4)
    );
    Ok(Outcome {
        artifacts: art,
        digest,
    })
}

// --------------------------------------------------------------- calibrate

pub fn calibrate(ctx: &Ctx<'_>, which: &[DeviceKind]) -> Result<Outcome> {
    let cfg = ctx.cfg();
    let mut art = ctx.artifacts("calibrate");
    let settings = CalibrationSettings {
        probe: cfg.probe(),
        max_evaluations: cfg.calibrate.max_evaluations,
        ..CalibrationSettings::default()
    };
    let wd = cfg.write_driver();
    let model = cfg.energy_model()?;
    let fits: Vec<afmtj_core::Result<_>> = ctx.pool.install(|| {
        which
            .par_iter()
            .map(|&k| {
                let report =
                    calibrate_device(&cfg.device_params(k), &latency_targets(k), &settings)?;
                let params = fit_rp_to_energy(
                    &report.params,
                    &settings.probe,
                    &wd,
                    &model,
                    ENERGY_ANCHOR_V,
                    energy_anchor(k),
                )?;
                Ok((k, report, params))
            })
            .collect()
    });
    let mut rows = Vec::new();
    let mut snippet = format!("# {}\n", art.stamp());
    let mut sum = Summary::new();
    let mut worst: f64 = 0.0;
    for f in fits {
        let (k, report, p) = f?;
        let key = kind_key(k);
        for &(v, target, got) in &report.points {
            rows.push(vec![
                key.to_string(),
                exact(v),
                ps(target),
                got.map_or("NoSwitch".into(), ps),
                got.map_or("NA".into(), |g| fixed((g / target - 1.0) * 100.0, 3)),
            ]);
        }
        worst = worst.max(report.max_rel_error);
        snippet.push_str(&format!(
            "\n[device.{key}]\nalpha = {}\nms = {}\nhk = {}\nsot_efficiency = {}\nj_af = {}\nrp = {}\ntmr = {}\n",
            exact(p.alpha),
            exact(p.ms),
            exact(p.hk),
            exact(p.sot_efficiency),
            exact(p.j_af),
            exact(p.rp),
            exact(p.tmr)
        ));
        sum.num(
            &format!("{key}.max_latency_error_pct"),
            report.max_rel_error * 100.0,
        )
        .text(&format!("{key}.level"), report.level.label())
        .int(&format!("{key}.evaluations"), report.evaluations as u64)
        .num(&format!("{key}.exchange_fraction"), p.j_af / (p.ms * p.hk))
        .num(&format!("{key}.rp_ohm"), p.rp);
    }
    art.csv(
        "calibration.csv",
        &["device", "V", "target_ps", "fitted_ps", "error_pct"],
        &rows,
    )?;
    art.raw("calibrated_devices.toml", snippet);
    art.summary("calibration_summary.txt", &sum);
    let digest = format!(
        "calibrate: {} device(s), worst latency error {:.2}% ({})",
        which.len(),
        worst * 100.0,
        level_label(worst)
    );
    Ok(Outcome {
        artifacts: art,
        digest,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::CliError;
    use afmtj_core::montecarlo::sample;

    #[test]
    fn chunks_cover_the_range_once() {
        let c = chunks(3..10_000, CHUNK);
        assert_eq!(c.first().unwrap().start, 3);
        assert_eq!(c.last().unwrap().end, 10_000);
        assert!(c.windows(2).all(|w| w[0].end == w[1].start));
        assert!(chunks(5..5, 10).is_empty());
    }

    #[test]
    fn parallel_counts_match_serial() {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(3)
            .build()
            .unwrap();
        let f =
            |id: u64| Ok(id % 7 == 3 || sample(&VariationSpec::default(), 1, id).rp_scale > 1.02);
        let serial = count_failures(0..20_000, f).unwrap();
        assert_eq!(par_failures(&pool, 20_000, f).unwrap(), serial);
    }

    #[test]
    fn parallel_errors_surface() {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(2)
            .build()
            .unwrap();
        let got = par_failures(&pool, 10_000, |id| {
            if id == 9_000 {
                Err(afmtj_core::Error::SingularNetwork)
            } else {
                Ok(false)
            }
        });
        assert!(matches!(
            got,
            Err(CliError::Simulation {
                name: "SingularNetwork",
                ..
            })
        ));
    }
}
