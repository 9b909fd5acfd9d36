//! Two-group linear discriminant analysis for bank-distress early warning:
//! ratio panels, z-score normalization, the canonical discriminant fit, its
//! test battery, and three-zone classification of yearly panels.
//!
//! The numeric core is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix it to `f64`.

// `!(x > 0)` is used deliberately so that NaN fails domain checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classification;
pub mod dataset;
pub mod diagnostics;
pub mod error;
pub mod lda;
pub mod linalg;
pub mod model_file;
pub mod normalization;
pub mod scalar;
pub mod special;

pub use classification::{
    classify_zone, confusion_matrix, cutoff_point, evaluate_both, evaluate_panel, grey_interval,
    grey_zone, score_observation, weighted_cutoff, ActualLabels, BankRow, ClassificationZones,
    ConfusionMatrix, EvaluationReport, GreyZone, PanelEvaluation, ScoringMode, YearRow, ZoneCounts,
    ZoneLabel, ZoneSource,
};
pub use dataset::{
    average_ratios, build_training_set, case_processing_summary, parse_panel, samples_from_panel,
    write_panel, BankYearRecord, Design, GroupLabel, LabeledSample, Ratio, RatioVector,
    TrainingSet, YearRange,
};
pub use diagnostics::{
    box_m_test, canonical_from_eigenvalue, canonical_summary, collinearity_check,
    wilks_from_eigenvalue, wilks_test, BoxBranch, BoxMResult, CanonicalSummary, CollinearityReport,
    WilksResult, DEFAULT_ALPHA, DEFAULT_COLLINEARITY_THRESHOLD,
};
pub use error::{Error, Result};
pub use lda::{
    compute_group_stats, fit, summarize_scores, DiscriminantModel, FisherDecision, FitOptions,
    GroupStatistics, PerGroup, Priors, ScoreSummary,
};
pub use linalg::{solve_spd, Matrix};
pub use model_file::ModelFile;
pub use normalization::{fit_design, fit_normalizer, NormalizationStats};
pub use scalar::Scalar;
pub use special::{
    chi_square_sf, f_sf, ln_gamma, reg_inc_beta, reg_inc_gamma_p, reg_inc_gamma_q, TailProbability,
};

pub type Ratios = RatioVector<f64>;
pub type Record = BankYearRecord<f64>;
pub type Sample = LabeledSample<f64>;
pub type Training = TrainingSet<f64>;
pub type Stats = NormalizationStats<f64>;
pub type Model = DiscriminantModel<f64>;
pub type Zones = ClassificationZones<f64>;
pub type Report = EvaluationReport<f64>;
pub type Model32 = DiscriminantModel<f32>;
