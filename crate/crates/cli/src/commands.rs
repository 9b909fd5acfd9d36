use std::path::Path;

use serde::Serialize;

use distress_lda::dataset::CaseCounts;
use distress_lda::model_file::{NamedValues, TrainingSummary};
use distress_lda::{
    box_m_test, build_training_set, canonical_summary, case_processing_summary, classify_zone,
    collinearity_check, compute_group_stats, confusion_matrix, evaluate_both, fit, fit_normalizer,
    parse_panel, samples_from_panel, score_observation, wilks_test, ActualLabels, BoxMResult,
    CanonicalSummary, ClassificationZones, CollinearityReport, ConfusionMatrix, Design, FitOptions,
    GroupLabel, Model, ModelFile, PanelEvaluation, PerGroup, Priors, Record, ScoringMode, Stats,
    WilksResult, YearRange, ZoneLabel, Zones,
};

use crate::config::{RunConfig, ZoneSelector};
use crate::error::{CliError, Result};

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })
}

fn input_err(path: &Path) -> impl FnOnce(distress_lda::Error) -> CliError + '_ {
    move |source| CliError::Input {
        path: path.to_path_buf(),
        source,
    }
}

pub fn load_panel(path: &Path) -> Result<Vec<Record>> {
    parse_panel(&read_text(path)?).map_err(input_err(path))
}

/// Concatenates panels; a bank-year present in two files is a duplicate.
pub fn load_panels(paths: &[std::path::PathBuf]) -> Result<Vec<Record>> {
    let mut all: Vec<Record> = Vec::new();
    for path in paths {
        let records = load_panel(path)?;
        if let Some(dup) = records.iter().find(|r| {
            all.iter()
                .any(|a| a.bank_id == r.bank_id && a.year == r.year)
        }) {
            return Err(CliError::Input {
                path: path.clone(),
                source: distress_lda::Error::DuplicateKey {
                    bank: dup.bank_id.clone(),
                    year: dup.year,
                },
            });
        }
        all.extend(records);
    }
    Ok(all)
}

pub fn load_model(path: &Path) -> Result<ModelFile> {
    ModelFile::from_json(&read_text(path)?).map_err(input_err(path))
}

pub fn resolve_zones(selector: &ZoneSelector, model: &Model) -> Result<Zones> {
    match selector {
        ZoneSelector::Derived => Ok(ClassificationZones::derived(model)),
        ZoneSelector::Published => Ok(ClassificationZones::published()),
        ZoneSelector::File(path) => Zones::from_json(&read_text(path)?)
            .map_err(|e| CliError::Config(format!("zones file {}: {e}", path.display()))),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VariableStats {
    pub variable: String,
    pub mean: f64,
    pub sd: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FisherSummary {
    pub priors: Priors,
    pub prior_probabilities: PerGroup<f64>,
    pub bankrupt: NamedValues,
    pub bankrupt_constant: f64,
    pub nonbankrupt: NamedValues,
    pub nonbankrupt_constant: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FitReport {
    pub window: String,
    pub cases: Vec<CaseCounts>,
    pub normalization: Vec<VariableStats>,
    /// Mean and sd of each normalized training column; should be 0 and 1.
    pub z_check: Vec<VariableStats>,
    pub coefficients: NamedValues,
    pub constant: f64,
    pub standardized_coefficients: NamedValues,
    pub fisher: FisherSummary,
    pub group_sizes: PerGroup<usize>,
    pub centroids: PerGroup<f64>,
    pub group_score_sd: PerGroup<f64>,
    pub eigenvalue: f64,
    pub canonical_correlation: f64,
    pub wilks_lambda: f64,
    pub training_scores: Vec<(String, GroupLabel, f64)>,
    pub confusion: ConfusionMatrix,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model_file: Option<String>,
}

fn named(variables: &[String], values: &[f64]) -> NamedValues {
    variables
        .iter()
        .cloned()
        .zip(values.iter().copied())
        .collect()
}

fn column_stats(design: &Design<f64>) -> Vec<VariableStats> {
    (0..design.p())
        .map(|j| {
            let col = design.column(j);
            let n = col.len() as f64;
            let mean = col.iter().sum::<f64>() / n;
            let var = col.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
            VariableStats {
                variable: design.variables[j].clone(),
                mean,
                sd: var.sqrt(),
            }
        })
        .collect()
}

struct Training {
    cases: Vec<CaseCounts>,
    stats: Stats,
    z: Design<f64>,
}

fn load_training(cfg: &RunConfig, window: YearRange) -> Result<Training> {
    let path = cfg.require_train()?;
    let records = load_panel(path)?;
    let samples = samples_from_panel(&records, window, &cfg.labels).map_err(input_err(path))?;
    let ts = build_training_set(samples).map_err(input_err(path))?;
    let stats = fit_normalizer(&ts)?;
    let z = stats.normalize_design(&ts.design())?;
    Ok(Training {
        cases: case_processing_summary(&ts),
        stats,
        z,
    })
}

pub fn cmd_fit(cfg: &RunConfig) -> Result<FitReport> {
    let t = load_training(cfg, cfg.window)?;
    let group_stats = compute_group_stats(&t.z)?;
    let model = fit(&t.z, FitOptions { priors: cfg.priors })?;
    let training = TrainingSummary::from_fit(&model, &group_stats, &t.z)?;
    let confusion = confusion_matrix(&model, &t.z)?;

    let model_file = match &cfg.model {
        Some(path) => {
            let file = ModelFile::new(&model, &t.stats, Some(training.clone()));
            std::fs::write(path, file.to_json() + "\n").map_err(|source| CliError::Write {
                path: path.clone(),
                source,
            })?;
            Some(path.display().to_string())
        }
        None => None,
    };

    let vars = &model.variables;
    Ok(FitReport {
        window: cfg.window.to_string(),
        cases: t.cases,
        normalization: vars
            .iter()
            .zip(t.stats.mean.iter().zip(&t.stats.sd))
            .map(|(v, (&mean, &sd))| VariableStats {
                variable: v.clone(),
                mean,
                sd,
            })
            .collect(),
        z_check: column_stats(&t.z),
        coefficients: named(vars, &model.coefficients),
        constant: model.constant,
        standardized_coefficients: named(vars, &model.standardized),
        fisher: FisherSummary {
            priors: cfg.priors,
            prior_probabilities: model.fisher.priors,
            bankrupt: named(vars, &model.fisher.weights.bankrupt),
            bankrupt_constant: model.fisher.constants.bankrupt,
            nonbankrupt: named(vars, &model.fisher.weights.nonbankrupt),
            nonbankrupt_constant: model.fisher.constants.nonbankrupt,
        },
        group_sizes: model.group_sizes,
        centroids: model.centroids,
        group_score_sd: model.group_score_sd,
        eigenvalue: model.eigenvalue,
        canonical_correlation: model.canonical_correlation,
        wilks_lambda: model.wilks_lambda,
        training_scores: training
            .scores
            .iter()
            .map(|s| (s.bank.clone(), s.label, s.score))
            .collect(),
        confusion,
        model_file,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct Verdict<R> {
    #[serde(flatten)]
    pub result: R,
    pub verdict: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct DiagnoseReport {
    pub alpha: f64,
    pub cases: usize,
    pub variables: usize,
    pub collinearity: Option<CollinearityReport<f64>>,
    pub wilks: Verdict<WilksResult<f64>>,
    pub box_m: Option<Verdict<BoxMResult<f64>>>,
    pub canonical: CanonicalSummary<f64>,
    pub notices: Vec<String>,
}

pub fn cmd_diagnose(cfg: &RunConfig) -> Result<DiagnoseReport> {
    let path = cfg.require_model()?;
    let file = load_model(path)?;
    let model = file.model().map_err(input_err(path))?;
    let mut notices = Vec::new();

    let training = match &cfg.train {
        Some(_) => {
            let t = load_training(cfg, cfg.window)?;
            if t.z.variables != model.variables {
                return Err(CliError::Config(format!(
                    "training variables {:?} differ from model variables {:?}",
                    t.z.variables, model.variables
                )));
            }
            let group_stats = compute_group_stats(&t.z)?;
            notices
                .push("training scores and correlations recomputed from the training file".into());
            Some(TrainingSummary::from_fit(&model, &group_stats, &t.z)?)
        }
        None => file.training.clone(),
    };

    let collinearity = match training
        .as_ref()
        .and_then(|t| t.pooled_correlation.as_ref())
    {
        Some(m) => Some(collinearity_check(
            &m.variables,
            &m.to_matrix().map_err(input_err(path))?,
            cfg.collinearity_threshold,
        )?),
        None => {
            notices.push(
                "model file has no pooled correlation matrix; collinearity check skipped".into(),
            );
            None
        }
    };

    let n = model.total_cases();
    let wilks = wilks_test(&model, n, model.p(), 2)?;
    let wilks = Verdict {
        verdict: wilks.verdict(cfg.alpha),
        result: wilks,
    };

    let box_m = match training.as_ref().filter(|t| !t.scores.is_empty()) {
        Some(t) => {
            let g = t.grouped_scores();
            let r = box_m_test(&[g.bankrupt, g.nonbankrupt])?;
            Some(Verdict {
                verdict: r.verdict(cfg.alpha),
                result: r,
            })
        }
        None => {
            notices.push("model file has no training scores; Box's M skipped".into());
            None
        }
    };

    Ok(DiagnoseReport {
        alpha: cfg.alpha,
        cases: n,
        variables: model.p(),
        collinearity,
        wilks,
        box_m,
        canonical: canonical_summary(&model)?,
        notices,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassifiedRow {
    pub bank: String,
    pub year: i32,
    /// `None` for bank-years without data.
    pub score: Option<f64>,
    pub zone: Option<ZoneLabel>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassifyReport {
    pub mode: ScoringMode,
    pub zones: Zones,
    pub rows: Vec<ClassifiedRow>,
    pub notices: Vec<String>,
}

/// Derived zones sit on the normalized-score scale.
fn scale_notice(cfg: &RunConfig) -> Option<String> {
    (cfg.zones == ZoneSelector::Derived && cfg.mode == ScoringMode::Raw).then(|| {
        "derived zones lie on the normalized-score scale but scores are raw; \
         consider --mode normalized or explicit zones"
            .to_string()
    })
}

struct Scoring {
    model: Model,
    stats: Stats,
    zones: Zones,
    records: Vec<Record>,
}

fn load_scoring(cfg: &RunConfig) -> Result<Scoring> {
    let panels = cfg.require_panels()?;
    let path = cfg.require_model()?;
    let file = load_model(path)?;
    let model = file.model().map_err(input_err(path))?;
    let stats = file.normalization().map_err(input_err(path))?;
    let zones = resolve_zones(&cfg.zones, &model)?;
    let records = load_panels(panels)?;
    Ok(Scoring {
        model,
        stats,
        zones,
        records,
    })
}

pub fn cmd_classify(cfg: &RunConfig) -> Result<ClassifyReport> {
    let s = load_scoring(cfg)?;
    let mut rows = Vec::with_capacity(s.records.len());
    for r in &s.records {
        let (score, zone) = if r.available {
            let score =
                score_observation(&s.model, &s.stats, r, cfg.mode).map_err(CliError::Evaluation)?;
            let zone = classify_zone(score, &s.zones).map_err(CliError::Evaluation)?;
            (Some(score), Some(zone))
        } else {
            (None, None)
        };
        rows.push(ClassifiedRow {
            bank: r.bank_id.clone(),
            year: r.year,
            score,
            zone,
        });
    }
    let mut notices: Vec<String> = scale_notice(cfg).into_iter().collect();
    if rows.iter().all(|r| r.score.is_none()) {
        notices.push("panel has no available records".into());
    }
    Ok(ClassifyReport {
        mode: cfg.mode,
        zones: s.zones,
        rows,
        notices,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct EvaluateReport {
    /// Bank names in order of first appearance across the panels.
    pub banks: Vec<String>,
    /// Every year present in the panels, including ones without data.
    pub years: Vec<i32>,
    #[serde(flatten)]
    pub evaluation: PanelEvaluation<f64>,
    pub notices: Vec<String>,
}

pub fn cmd_evaluate(cfg: &RunConfig) -> Result<EvaluateReport> {
    let s = load_scoring(cfg)?;
    let labels = ActualLabels::from_records(&s.records).with_bank_labels(cfg.labels.clone());
    let evaluation = evaluate_both(&s.model, &s.stats, &s.records, &labels, &s.zones, cfg.mode)
        .map_err(CliError::Evaluation)?;
    let mut banks: Vec<String> = Vec::new();
    for r in &s.records {
        if !banks.contains(&r.bank_id) {
            banks.push(r.bank_id.clone());
        }
    }
    let mut years: Vec<i32> = s.records.iter().map(|r| r.year).collect();
    years.sort_unstable();
    years.dedup();
    let mut notices: Vec<String> = scale_notice(cfg).into_iter().collect();
    notices.extend(evaluation.with_grey.notices.iter().cloned());
    Ok(EvaluateReport {
        banks,
        years,
        evaluation,
        notices,
    })
}
