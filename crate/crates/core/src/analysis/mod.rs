//! Statistics and checks of the theoretical claims.

pub mod stats;
pub mod theory;

pub use stats::{
    bonferroni_threshold, bootstrap_mean_ci, cohens_d, compare_samples, mean, std_dev,
    two_sample_t_test, variance, welch_t, StatResult,
};
pub use theory::{
    compositions, prop1_deviation_check, prop2_bound, prop2_bound_check, prop3_collapse_check,
    BoundCheck, CollapseReport, Deviation, DeviationReport, PROP2_DEFAULT_MARGIN,
    PROP3_SINGLE_NICHE_FRACTION, PROP3_SI_THRESHOLD,
};
