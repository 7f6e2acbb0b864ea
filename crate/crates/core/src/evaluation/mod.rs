//! Trial classification, path lengths and the nonparametric tests used to
//! compare conditions.

mod likert;
mod path;
mod report;
mod stats;
mod trials;

pub use likert::{analyze_likert, likert_text, parse_likert, LikertComparison, LikertRow};
pub use path::{shortest_path_distance, DistanceField};
pub use report::{
    ConditionSummary, FrontDetectConditionSummary, FrontDetectReport, NavigationReport,
    PairwiseTest,
};
pub use stats::{holm_correct, wilcoxon_rank_sum, wilcoxon_signed_rank, Method, TestResult};
pub use trials::{
    classify_log, classify_trial, detect_front_back_err, front_detect_errors, front_detect_summary,
    split_trials, travel_distance, FrontDetectSummary, TrialClass, TrialOutcome, TrialSpan,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("no path between {0:?} and {1:?}")]
    NoPath((f64, f64), (f64, f64)),
    #[error("malformed log: {0}")]
    Malformed(String),
    #[error("{0}")]
    Domain(String),
}
