//! Trial bookkeeping shared by the read and write paths.

use core::ops::Range;

use super::read::{read_trial_full, ReadSetup, ReadSurrogate};
use super::stats::RateEstimate;
use super::variation::{sample, Dist, Sample, VariationSpec};
use super::write::{write_trial_full, WriteSetup, WriteSurrogate};
use crate::error::Result;

/// Per-trial record.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialOutcome {
    pub trial_id: u64,
    pub sample: Sample,
    pub pass: bool,
    /// s
    pub latency: Option<f64>,
    /// J
    pub energy: Option<f64>,
    /// V for reads, s for writes.
    pub margin: f64,
}

/// Which model evaluates a read trial.
#[derive(Debug, Clone, Copy)]
pub enum ReadModel<'a> {
    Full,
    Surrogate(&'a ReadSurrogate),
    /// Pass while the sampled offset (in units of σ) stays below `margin`.
    Gaussian {
        margin: f64,
    },
}

/// Which model evaluates a write trial.
#[derive(Debug, Clone, Copy)]
pub enum WriteModel<'a> {
    Full,
    Surrogate(&'a WriteSurrogate),
}

/// Spec whose only spread is a unit normal in the offset slot.
pub fn gaussian_spec() -> VariationSpec {
    VariationSpec {
        sa_offset: Dist::Normal {
            mean: 0.0,
            sigma: 1.0,
        },
        ..VariationSpec::default().pinned()
    }
}

pub fn read_outcome(
    setup: &ReadSetup,
    spec: &VariationSpec,
    model: ReadModel<'_>,
    seed: u64,
    id: u64,
) -> Result<TrialOutcome> {
    let s = sample(spec, seed, id);
    let r = match model {
        ReadModel::Full => read_trial_full(setup, &s)?,
        ReadModel::Surrogate(m) => m.trial(setup, &s),
        ReadModel::Gaussian { margin } => {
            return Ok(TrialOutcome {
                trial_id: id,
                sample: s,
                pass: s.sa_offset <= margin,
                latency: None,
                energy: None,
                margin: margin - s.sa_offset,
            })
        }
    };
    Ok(TrialOutcome {
        trial_id: id,
        sample: s,
        pass: r.pass,
        latency: Some(r.latency),
        energy: Some(r.energy),
        margin: r.margin,
    })
}

pub fn write_outcome(
    setup: &WriteSetup,
    spec: &VariationSpec,
    model: WriteModel<'_>,
    seed: u64,
    id: u64,
) -> Result<TrialOutcome> {
    let s = sample(spec, seed, id);
    let w = match model {
        WriteModel::Full => write_trial_full(setup, &s)?,
        WriteModel::Surrogate(m) => m.trial(setup, &s),
    };
    let slowest = w
        .latency
        .iter()
        .flatten()
        .copied()
        .fold(None, |a: Option<f64>, t| Some(a.map_or(t, |a| a.max(t))));
    Ok(TrialOutcome {
        trial_id: id,
        sample: s,
        pass: w.pass,
        latency: if w.latency.iter().all(Option::is_some) {
            slowest
        } else {
            None
        },
        energy: None,
        margin: w.margin,
    })
}

/// Failures among trial ids `ids`. Counts add, so any split of the ids
/// over workers merges to the same total.
pub fn count_failures<F>(ids: Range<u64>, mut failed: F) -> Result<u64>
where
    F: FnMut(u64) -> Result<bool>,
{
    let mut k = 0;
    for id in ids {
        if failed(id)? {
            k += 1;
        }
    }
    Ok(k)
}

/// Read error rate over trial ids `0..n`.
pub fn run_read_trials(
    setup: &ReadSetup,
    spec: &VariationSpec,
    model: ReadModel<'_>,
    seed: u64,
    n: u64,
) -> Result<RateEstimate> {
    let k = count_failures(0..n, |id| {
        Ok(!read_outcome(setup, spec, model, seed, id)?.pass)
    })?;
    Ok(RateEstimate::new(n, k))
}

/// Write error rate over trial ids `0..n`.
pub fn run_write_trials(
    setup: &WriteSetup,
    spec: &VariationSpec,
    model: WriteModel<'_>,
    seed: u64,
    n: u64,
) -> Result<RateEstimate> {
    let k = count_failures(0..n, |id| {
        Ok(!write_outcome(setup, spec, model, seed, id)?.pass)
    })?;
    Ok(RateEstimate::new(n, k))
}
