//! JSON model document: the fitted discriminant, its normalization statistics
//! and optional training summaries, with every vector keyed by variable name.

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::dataset::{Design, GroupLabel};
use crate::error::{Error, Result};
use crate::lda::{DiscriminantModel, FisherFunctions, GroupStatistics, PerGroup};
use crate::linalg::Matrix;
use crate::normalization::NormalizationStats;

pub const FORMAT: &str = "distress-lda-model/1";

pub type NamedValues = IndexMap<String, f64>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FisherFunctionFile {
    pub weights: NamedValues,
    pub constant: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FisherFile {
    pub priors: PerGroup<f64>,
    pub bankrupt: FisherFunctionFile,
    pub nonbankrupt: FisherFunctionFile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizationFile {
    pub mean: NamedValues,
    pub sd: NamedValues,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedMatrix {
    pub variables: Vec<String>,
    pub matrix: Vec<Vec<f64>>,
}

impl NamedMatrix {
    pub fn from_matrix(variables: &[String], m: &Matrix<f64>) -> Self {
        NamedMatrix {
            variables: variables.to_vec(),
            matrix: m.rows(),
        }
    }

    pub fn to_matrix(&self) -> Result<Matrix<f64>> {
        let m = Matrix::from_rows(&self.matrix)?;
        if m.dim() != self.variables.len() {
            return Err(Error::ModelFile(format!(
                "{} variable names for a {}x{} matrix",
                self.variables.len(),
                m.dim(),
                m.dim()
            )));
        }
        Ok(m)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingScore {
    pub bank: String,
    pub label: GroupLabel,
    pub score: f64,
}

/// What the diagnostics need from the training run.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TrainingSummary {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pooled_correlation: Option<NamedMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub total_correlation: Option<NamedMatrix>,
    #[serde(default)]
    pub scores: Vec<TrainingScore>,
}

impl TrainingSummary {
    pub fn from_fit(
        model: &DiscriminantModel<f64>,
        stats: &GroupStatistics<f64>,
        design: &Design<f64>,
    ) -> Result<Self> {
        let scores = model.score_design(design)?;
        Ok(TrainingSummary {
            pooled_correlation: Some(NamedMatrix::from_matrix(
                &stats.variables,
                &stats.within_correlation,
            )),
            total_correlation: Some(NamedMatrix::from_matrix(
                &stats.variables,
                &stats.total_correlation,
            )),
            scores: design
                .ids
                .iter()
                .zip(&design.labels)
                .zip(scores)
                .map(|((bank, &label), score)| TrainingScore {
                    bank: bank.clone(),
                    label,
                    score,
                })
                .collect(),
        })
    }

    /// Scores split as (bankrupt, nonbankrupt), in file order.
    pub fn grouped_scores(&self) -> PerGroup<Vec<f64>> {
        PerGroup::from_fn(|g| {
            self.scores
                .iter()
                .filter(|s| s.label == g)
                .map(|s| s.score)
                .collect()
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub format: String,
    pub variables: Vec<String>,
    pub coefficients: NamedValues,
    pub constant: f64,
    pub standardized_coefficients: NamedValues,
    pub centroids: PerGroup<f64>,
    pub group_sizes: PerGroup<usize>,
    pub group_score_sd: PerGroup<f64>,
    pub within_score_variance: f64,
    pub eigenvalue: f64,
    pub canonical_correlation: f64,
    pub wilks_lambda: f64,
    pub fisher: FisherFile,
    pub normalization: NormalizationFile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub training: Option<TrainingSummary>,
}

fn named(variables: &[String], values: &[f64]) -> NamedValues {
    variables
        .iter()
        .cloned()
        .zip(values.iter().copied())
        .collect()
}

/// Values of `map` in `variables` order; the key set must match exactly.
fn unnamed(what: &str, variables: &[String], map: &NamedValues) -> Result<Vec<f64>> {
    if map.len() != variables.len() {
        return Err(Error::Binding(format!(
            "{what} has {} entries for {} variables",
            map.len(),
            variables.len()
        )));
    }
    variables
        .iter()
        .map(|v| {
            map.get(v)
                .copied()
                .ok_or_else(|| Error::Binding(format!("{what} lacks variable `{v}`")))
        })
        .collect()
}

impl ModelFile {
    pub fn new(
        model: &DiscriminantModel<f64>,
        stats: &NormalizationStats<f64>,
        training: Option<TrainingSummary>,
    ) -> Self {
        let vars = &model.variables;
        let function = |g: GroupLabel| FisherFunctionFile {
            weights: named(vars, model.fisher.weights.get(g)),
            constant: *model.fisher.constants.get(g),
        };
        ModelFile {
            format: FORMAT.to_string(),
            variables: vars.clone(),
            coefficients: named(vars, &model.coefficients),
            constant: model.constant,
            standardized_coefficients: named(vars, &model.standardized),
            centroids: model.centroids,
            group_sizes: model.group_sizes,
            group_score_sd: model.group_score_sd,
            within_score_variance: model.within_score_variance,
            eigenvalue: model.eigenvalue,
            canonical_correlation: model.canonical_correlation,
            wilks_lambda: model.wilks_lambda,
            fisher: FisherFile {
                priors: model.fisher.priors,
                bankrupt: function(GroupLabel::Bankrupt),
                nonbankrupt: function(GroupLabel::NonBankrupt),
            },
            normalization: NormalizationFile {
                mean: named(&stats.variables, &stats.mean),
                sd: named(&stats.variables, &stats.sd),
            },
            training,
        }
    }

    pub fn model(&self) -> Result<DiscriminantModel<f64>> {
        let vars = &self.variables;
        let model = DiscriminantModel {
            variables: vars.clone(),
            coefficients: unnamed("coefficients", vars, &self.coefficients)?,
            constant: self.constant,
            standardized: unnamed(
                "standardized_coefficients",
                vars,
                &self.standardized_coefficients,
            )?,
            centroids: self.centroids,
            group_sizes: self.group_sizes,
            group_score_sd: self.group_score_sd,
            within_score_variance: self.within_score_variance,
            eigenvalue: self.eigenvalue,
            canonical_correlation: self.canonical_correlation,
            wilks_lambda: self.wilks_lambda,
            fisher: FisherFunctions {
                priors: self.fisher.priors,
                weights: PerGroup::new(
                    unnamed(
                        "fisher.bankrupt.weights",
                        vars,
                        &self.fisher.bankrupt.weights,
                    )?,
                    unnamed(
                        "fisher.nonbankrupt.weights",
                        vars,
                        &self.fisher.nonbankrupt.weights,
                    )?,
                ),
                constants: PerGroup::new(
                    self.fisher.bankrupt.constant,
                    self.fisher.nonbankrupt.constant,
                ),
            },
        };
        model.validate()?;
        Ok(model)
    }

    pub fn normalization(&self) -> Result<NormalizationStats<f64>> {
        let vars = &self.variables;
        let sd = unnamed("normalization.sd", vars, &self.normalization.sd)?;
        if let Some((v, s)) = vars.iter().zip(&sd).find(|(_, s)| !(**s > 0.0)) {
            return Err(Error::ZeroVariance(format!("{v} (sd {s} in model file)")));
        }
        Ok(NormalizationStats {
            variables: vars.clone(),
            mean: unnamed("normalization.mean", vars, &self.normalization.mean)?,
            sd,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ModelFile =
            serde_json::from_str(text).map_err(|e| Error::ModelFile(e.to_string()))?;
        if file.format != FORMAT {
            return Err(Error::ModelFile(format!(
                "unsupported format `{}` (expected `{FORMAT}`)",
                file.format
            )));
        }
        file.model()?;
        file.normalization()?;
        Ok(file)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model file serializes")
    }
}
