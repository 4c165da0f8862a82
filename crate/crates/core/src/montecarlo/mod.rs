//! Variation sampling, read/write error-rate estimation and margin search.

mod engine;
pub mod fit;
mod margin;
mod read;
pub mod rng;
mod stats;
mod variation;
mod write;

pub use engine::{
    count_failures, gaussian_spec, read_outcome, run_read_trials, run_write_trials, write_outcome,
    ReadModel, TrialOutcome, WriteModel,
};
pub use margin::{margin_search, MarginAxis, MarginSettings};
pub use read::{read_misclassification, read_trial_full, ReadSetup, ReadSurrogate, ReadTrial};
pub use stats::{
    beta_quantile, cp_interval, cp_lower_bound, cp_upper_bound, inc_beta, normal_tail,
    normal_tail_inverse, RateEstimate,
};
pub use variation::{
    sample, Dist, Sample, VariationSpec, PULSE_WIDTH_RANGE, READ_SCALE_RANGE, SAMPLE_FIELDS,
    WRITE_BIAS_RANGE,
};
pub use write::{
    analytic_latency, write_misclassification, write_trial_full, WriteSetup, WriteSurrogate,
    WriteTrial,
};
