//! Classification zones, observation scoring, confusion matrices and yearly
//! panel evaluation.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dataset::{BankYearRecord, Design, GroupLabel};
use crate::error::{Error, Result};
use crate::lda::{DiscriminantModel, PerGroup};
use crate::normalization::NormalizationStats;
use crate::scalar::Scalar;

/// Size-weighted centroid average `(y0·n0 + y1·n1)/(n0 + n1)`.
pub fn weighted_cutoff<T: Scalar>(centroids: PerGroup<T>, sizes: PerGroup<usize>) -> T {
    let n0 = T::from_count(sizes.bankrupt);
    let n1 = T::from_count(sizes.nonbankrupt);
    (centroids.bankrupt * n0 + centroids.nonbankrupt * n1) / (n0 + n1)
}

pub fn cutoff_point<T: Scalar>(model: &DiscriminantModel<T>) -> T {
    weighted_cutoff(model.centroids, model.group_sizes)
}

/// Closed score interval in which no prediction is committed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GreyZone<T> {
    pub lo: T,
    pub hi: T,
}

/// `[y0 + s0, y1 − s1]`, or `None` when the interval is empty.
pub fn grey_interval<T: Scalar>(centroids: PerGroup<T>, sds: PerGroup<T>) -> Option<GreyZone<T>> {
    let lo = centroids.bankrupt + sds.bankrupt;
    let hi = centroids.nonbankrupt - sds.nonbankrupt;
    (lo < hi).then_some(GreyZone { lo, hi })
}

/// Grey zone of a fitted model; `None` if either group is too small to have
/// a score sd or the interval is degenerate.
pub fn grey_zone<T: Scalar>(model: &DiscriminantModel<T>) -> Option<GreyZone<T>> {
    if model.group_sizes.bankrupt < 2 || model.group_sizes.nonbankrupt < 2 {
        return None;
    }
    grey_interval(model.centroids, model.group_score_sd)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ZoneSource {
    DerivedFromModel,
    ExplicitOverride,
}

impl fmt::Display for ZoneSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ZoneSource::DerivedFromModel => "derived-from-model",
            ZoneSource::ExplicitOverride => "explicit-override",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassificationZones<T> {
    pub cutoff: T,
    pub grey: Option<GreyZone<T>>,
    pub source: ZoneSource,
}

/// Published override: cut-off −0.000007 and grey interval [−0.040, −0.003],
/// stated on the raw-ratio score scale.
pub const PUBLISHED_CUTOFF: f64 = -0.000007;
pub const PUBLISHED_GREY: (f64, f64) = (-0.040, -0.003);

impl<T: Scalar> ClassificationZones<T> {
    /// Cut-off and centroid ± sd grey zone computed from the model.
    pub fn derived(model: &DiscriminantModel<T>) -> Self {
        ClassificationZones {
            cutoff: cutoff_point(model),
            grey: grey_zone(model),
            source: ZoneSource::DerivedFromModel,
        }
    }

    pub fn explicit(cutoff: T, grey: Option<GreyZone<T>>) -> Result<Self> {
        let zones = ClassificationZones {
            cutoff,
            grey,
            source: ZoneSource::ExplicitOverride,
        };
        zones.validate()?;
        Ok(zones)
    }

    /// The printed override zones used for the yearly panels.
    pub fn published() -> Self {
        ClassificationZones {
            cutoff: T::lit(PUBLISHED_CUTOFF),
            grey: Some(GreyZone {
                lo: T::lit(PUBLISHED_GREY.0),
                hi: T::lit(PUBLISHED_GREY.1),
            }),
            source: ZoneSource::ExplicitOverride,
        }
    }

    pub fn without_grey(&self) -> Self {
        ClassificationZones {
            grey: None,
            ..*self
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.cutoff.is_finite() {
            return Err(Error::Validation(format!(
                "cut-off {} is not finite",
                self.cutoff
            )));
        }
        if let Some(g) = self.grey {
            if !(g.lo.is_finite() && g.hi.is_finite() && g.lo <= g.hi) {
                return Err(Error::Validation(format!(
                    "grey interval [{}, {}] is not a finite interval with lo <= hi",
                    g.lo, g.hi
                )));
            }
        }
        Ok(())
    }
}

impl ClassificationZones<f64> {
    pub fn from_json(text: &str) -> Result<Self> {
        let zones: Self =
            serde_json::from_str(text).map_err(|e| Error::Validation(format!("zone file: {e}")))?;
        zones.validate()?;
        Ok(zones)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ZoneLabel {
    Bankrupt,
    Grey,
    NonBankrupt,
}

impl ZoneLabel {
    pub fn glyph(self) -> char {
        match self {
            ZoneLabel::Bankrupt => '▼',
            ZoneLabel::Grey => '■',
            ZoneLabel::NonBankrupt => '▲',
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ZoneLabel::Bankrupt => "bankrupt",
            ZoneLabel::Grey => "grey",
            ZoneLabel::NonBankrupt => "nonbankrupt",
        }
    }

    /// The committed group, if any.
    pub fn group(self) -> Option<GroupLabel> {
        match self {
            ZoneLabel::Bankrupt => Some(GroupLabel::Bankrupt),
            ZoneLabel::Grey => None,
            ZoneLabel::NonBankrupt => Some(GroupLabel::NonBankrupt),
        }
    }
}

impl fmt::Display for ZoneLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

pub fn classify_zone<T: Scalar>(score: T, zones: &ClassificationZones<T>) -> Result<ZoneLabel> {
    if !score.is_finite() {
        return Err(Error::NonFinite(format!("score {score}")));
    }
    Ok(match zones.grey {
        Some(g) if score < g.lo => ZoneLabel::Bankrupt,
        Some(g) if score <= g.hi => ZoneLabel::Grey,
        Some(_) => ZoneLabel::NonBankrupt,
        None if score < zones.cutoff => ZoneLabel::Bankrupt,
        None => ZoneLabel::NonBankrupt,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScoringMode {
    /// Coefficients applied directly to the raw ratio fractions.
    #[default]
    Raw,
    /// Ratios standardized with the training statistics first.
    Normalized,
}

impl FromStr for ScoringMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "raw" => Ok(ScoringMode::Raw),
            "normalized" | "normalised" => Ok(ScoringMode::Normalized),
            other => Err(format!(
                "unknown scoring mode `{other}` (expected raw or normalized)"
            )),
        }
    }
}

impl fmt::Display for ScoringMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScoringMode::Raw => "raw",
            ScoringMode::Normalized => "normalized",
        })
    }
}

pub fn score_observation<T: Scalar>(
    model: &DiscriminantModel<T>,
    stats: &NormalizationStats<T>,
    record: &BankYearRecord<T>,
    mode: ScoringMode,
) -> Result<T> {
    if !record.available {
        return Err(Error::MissingData {
            bank: record.bank_id.clone(),
            year: record.year,
        });
    }
    match mode {
        ScoringMode::Raw => model.score_ratios(&record.ratios),
        ScoringMode::Normalized => model.score_ratios(&stats.apply_ratios(&record.ratios)?),
    }
}

/// Counts indexed `[actual][predicted]` by [`GroupLabel::index`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub counts: [[usize; 2]; 2],
}

impl ConfusionMatrix {
    pub fn from_pairs(pairs: impl IntoIterator<Item = (GroupLabel, GroupLabel)>) -> Self {
        let mut m = ConfusionMatrix::default();
        for (actual, predicted) in pairs {
            m.counts[actual.index()][predicted.index()] += 1;
        }
        m
    }

    pub fn get(&self, actual: GroupLabel, predicted: GroupLabel) -> usize {
        self.counts[actual.index()][predicted.index()]
    }

    pub fn total(&self) -> usize {
        self.counts.iter().flatten().sum()
    }

    pub fn correct(&self) -> usize {
        self.counts[0][0] + self.counts[1][1]
    }

    pub fn row_total(&self, actual: GroupLabel) -> usize {
        self.counts[actual.index()].iter().sum()
    }

    /// Percent of the actual group predicted as `predicted`.
    pub fn row_percent(&self, actual: GroupLabel, predicted: GroupLabel) -> Option<f64> {
        let row = self.row_total(actual);
        (row > 0).then(|| 100.0 * self.get(actual, predicted) as f64 / row as f64)
    }

    pub fn percent_correct(&self) -> Option<f64> {
        let total = self.total();
        (total > 0).then(|| 100.0 * self.correct() as f64 / total as f64)
    }
}

/// Fisher classification of every design row against its label.
pub fn confusion_matrix<T: Scalar>(
    model: &DiscriminantModel<T>,
    design: &Design<T>,
) -> Result<ConfusionMatrix> {
    let mut pairs = Vec::with_capacity(design.n());
    for (row, &actual) in design.rows.iter().zip(&design.labels) {
        let decision = model.fisher_classify_named(&design.variables, row)?;
        pairs.push((actual, decision.label));
    }
    Ok(ConfusionMatrix::from_pairs(pairs))
}

/// Actual group of each bank-year, with an optional per-bank fallback.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ActualLabels {
    by_bank_year: BTreeMap<(String, i32), GroupLabel>,
    by_bank: BTreeMap<String, GroupLabel>,
}

impl ActualLabels {
    /// Collects the `label` cells of a panel.
    pub fn from_records<T>(records: &[BankYearRecord<T>]) -> Self {
        ActualLabels {
            by_bank_year: records
                .iter()
                .filter_map(|r| r.label.map(|l| ((r.bank_id.clone(), r.year), l)))
                .collect(),
            by_bank: BTreeMap::new(),
        }
    }

    /// Labels applying to every year of a bank without a per-year label.
    pub fn with_bank_labels(mut self, labels: BTreeMap<String, GroupLabel>) -> Self {
        self.by_bank.extend(labels);
        self
    }

    pub fn get(&self, bank: &str, year: i32) -> Result<GroupLabel> {
        self.by_bank_year
            .get(&(bank.to_string(), year))
            .or_else(|| self.by_bank.get(bank))
            .copied()
            .ok_or_else(|| Error::MissingLabel {
                bank: bank.to_string(),
                year,
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ZoneCounts {
    pub bankrupt: usize,
    pub grey: usize,
    pub nonbankrupt: usize,
}

impl ZoneCounts {
    pub fn add(&mut self, zone: ZoneLabel) {
        match zone {
            ZoneLabel::Bankrupt => self.bankrupt += 1,
            ZoneLabel::Grey => self.grey += 1,
            ZoneLabel::NonBankrupt => self.nonbankrupt += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.bankrupt + self.grey + self.nonbankrupt
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BankRow<T> {
    pub bank: String,
    pub score: T,
    pub zone: ZoneLabel,
    pub actual: GroupLabel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct YearRow<T> {
    pub year: i32,
    pub counts: ZoneCounts,
    pub hits: usize,
    pub total: usize,
    /// Actual-bankrupt cases zoned nonbankrupt over actual-bankrupt cases.
    pub type1: Option<f64>,
    /// Actual-nonbankrupt cases zoned bankrupt over actual-nonbankrupt cases.
    pub type2: Option<f64>,
    pub type1_count: usize,
    pub type2_count: usize,
    pub actual_bankrupt: usize,
    pub actual_nonbankrupt: usize,
    pub accuracy: f64,
    /// Bank-years in the panel for this year without data.
    pub unavailable: usize,
    pub banks: Vec<BankRow<T>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport<T> {
    pub mode: ScoringMode,
    pub zones: ClassificationZones<T>,
    pub years: Vec<YearRow<T>>,
    pub notices: Vec<String>,
}

impl<T> EvaluationReport<T> {
    pub fn year(&self, year: i32) -> Option<&YearRow<T>> {
        self.years.iter().find(|y| y.year == year)
    }
}

fn ratio(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

/// Scores and zones every available bank-year, grouped by year.
pub fn evaluate_panel<T: Scalar>(
    model: &DiscriminantModel<T>,
    stats: &NormalizationStats<T>,
    records: &[BankYearRecord<T>],
    actual: &ActualLabels,
    zones: &ClassificationZones<T>,
    mode: ScoringMode,
) -> Result<EvaluationReport<T>> {
    zones.validate()?;
    let mut by_year: BTreeMap<i32, Vec<&BankYearRecord<T>>> = BTreeMap::new();
    for r in records {
        by_year.entry(r.year).or_default().push(r);
    }
    let mut years = Vec::new();
    let mut notices = Vec::new();
    for (year, rows) in by_year {
        let available: Vec<&&BankYearRecord<T>> = rows.iter().filter(|r| r.available).collect();
        if available.is_empty() {
            notices.push(format!("year {year}: no available records, omitted"));
            continue;
        }
        let mut counts = ZoneCounts::default();
        let (mut hits, mut t1, mut t2, mut n_bankrupt, mut n_healthy) = (0, 0, 0, 0, 0);
        let mut banks = Vec::with_capacity(available.len());
        for r in available {
            let label = actual.get(&r.bank_id, year)?;
            let score = score_observation(model, stats, r, mode)?;
            let zone = classify_zone(score, zones)?;
            counts.add(zone);
            match label {
                GroupLabel::Bankrupt => n_bankrupt += 1,
                GroupLabel::NonBankrupt => n_healthy += 1,
            }
            match (label, zone.group()) {
                (_, None) => {}
                (a, Some(p)) if a == p => hits += 1,
                (GroupLabel::Bankrupt, Some(_)) => t1 += 1,
                (GroupLabel::NonBankrupt, Some(_)) => t2 += 1,
            }
            banks.push(BankRow {
                bank: r.bank_id.clone(),
                score,
                zone,
                actual: label,
            });
        }
        let total = counts.total();
        years.push(YearRow {
            year,
            counts,
            hits,
            total,
            type1: ratio(t1, n_bankrupt),
            type2: ratio(t2, n_healthy),
            type1_count: t1,
            type2_count: t2,
            actual_bankrupt: n_bankrupt,
            actual_nonbankrupt: n_healthy,
            accuracy: hits as f64 / total as f64,
            unavailable: rows.len() - total,
            banks,
        });
    }
    if years.is_empty() {
        notices.push("panel has no available records".into());
    }
    Ok(EvaluationReport {
        mode,
        zones: *zones,
        years,
        notices,
    })
}

/// The evaluation with the grey zone and the cut-off-only evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PanelEvaluation<T> {
    pub with_grey: EvaluationReport<T>,
    pub cutoff_only: EvaluationReport<T>,
}

pub fn evaluate_both<T: Scalar>(
    model: &DiscriminantModel<T>,
    stats: &NormalizationStats<T>,
    records: &[BankYearRecord<T>],
    actual: &ActualLabels,
    zones: &ClassificationZones<T>,
    mode: ScoringMode,
) -> Result<PanelEvaluation<T>> {
    Ok(PanelEvaluation {
        with_grey: evaluate_panel(model, stats, records, actual, zones, mode)?,
        cutoff_only: evaluate_panel(model, stats, records, actual, &zones.without_grey(), mode)?,
    })
}
