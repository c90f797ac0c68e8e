//! Recall metrics, the synthetic descriptor scenario and ablation grids.

pub mod ablation;
pub mod recall;
pub mod synthetic;

pub use ablation::{run_ablation, AblationConfig, AblationData, AblationResult, FusionMode, SkippedCell};
pub use recall::{
    evaluate, evaluated_query_count, percent_cutoff, recall_at_n, recall_at_percent, write_reports_csv, write_reports_json,
    EvalParams, ExclusionWindow, RecallReport,
};
pub use synthetic::{generate_synthetic_descriptors, loop_trajectory, SyntheticDescriptors, SyntheticScenario};
