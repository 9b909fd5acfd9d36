//! Bank-year ratio panels, training-set assembly and the labeled design matrix
//! consumed by the fitting routines.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// The six predictor ratios, in canonical column order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Ratio {
    /// Equity to average total assets.
    Eaa,
    /// Return on average equity.
    Roae,
    /// Return on average total assets.
    Roaa,
    /// Net interest income to average total assets.
    Nii,
    /// Loans and advances to average total assets.
    Laaa,
    /// Bad debts to total loans and advances.
    Bdtla,
}

impl Ratio {
    pub const ALL: [Ratio; 6] = [
        Ratio::Eaa,
        Ratio::Roae,
        Ratio::Roaa,
        Ratio::Nii,
        Ratio::Laaa,
        Ratio::Bdtla,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Ratio::Eaa => "eaa",
            Ratio::Roae => "roae",
            Ratio::Roaa => "roaa",
            Ratio::Nii => "nii",
            Ratio::Laaa => "laaa",
            Ratio::Bdtla => "bdtla",
        }
    }

    /// Upper-case label used in printed tables.
    pub fn label(self) -> &'static str {
        match self {
            Ratio::Eaa => "EAA",
            Ratio::Roae => "ROAE",
            Ratio::Roaa => "ROAA",
            Ratio::Nii => "NII",
            Ratio::Laaa => "LAAA",
            Ratio::Bdtla => "BDTLA",
        }
    }

    pub fn from_name(name: &str) -> Option<Ratio> {
        let lower = name.trim().to_ascii_lowercase();
        Ratio::ALL.into_iter().find(|r| r.name() == lower)
    }

    /// Position in canonical column order.
    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One bank-observation of the six ratios, stored as decimal fractions.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RatioVector<T> {
    pub eaa: T,
    pub roae: T,
    pub roaa: T,
    pub nii: T,
    pub laaa: T,
    pub bdtla: T,
}

impl<T: Scalar> RatioVector<T> {
    pub fn from_array(values: [T; 6]) -> Self {
        let [eaa, roae, roaa, nii, laaa, bdtla] = values;
        RatioVector {
            eaa,
            roae,
            roaa,
            nii,
            laaa,
            bdtla,
        }
    }

    pub fn to_array(&self) -> [T; 6] {
        [
            self.eaa, self.roae, self.roaa, self.nii, self.laaa, self.bdtla,
        ]
    }

    pub fn zeros() -> Self {
        Self::from_array([T::zero(); 6])
    }

    pub fn get(&self, ratio: Ratio) -> T {
        self.to_array()[ratio.index()]
    }

    pub fn set(&mut self, ratio: Ratio, value: T) {
        let mut values = self.to_array();
        values[ratio.index()] = value;
        *self = Self::from_array(values);
    }

    /// Looks a value up by variable name.
    pub fn get_by_name(&self, name: &str) -> Option<T> {
        Ratio::from_name(name).map(|r| self.get(r))
    }

    pub fn is_all_zero(&self) -> bool {
        self.to_array().iter().all(|v| v.is_zero())
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|v| v.is_finite())
    }
}

/// Binary group membership. `Bankrupt` encodes the target 0, `NonBankrupt` 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupLabel {
    Bankrupt,
    NonBankrupt,
}

impl GroupLabel {
    pub const BOTH: [GroupLabel; 2] = [GroupLabel::Bankrupt, GroupLabel::NonBankrupt];

    pub fn target(self) -> u8 {
        match self {
            GroupLabel::Bankrupt => 0,
            GroupLabel::NonBankrupt => 1,
        }
    }

    pub fn index(self) -> usize {
        self.target() as usize
    }

    pub fn as_str(self) -> &'static str {
        match self {
            GroupLabel::Bankrupt => "bankrupt",
            GroupLabel::NonBankrupt => "nonbankrupt",
        }
    }

    pub fn other(self) -> GroupLabel {
        match self {
            GroupLabel::Bankrupt => GroupLabel::NonBankrupt,
            GroupLabel::NonBankrupt => GroupLabel::Bankrupt,
        }
    }
}

impl fmt::Display for GroupLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GroupLabel {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s
            .trim()
            .to_ascii_lowercase()
            .replace(['-', '_', ' '], "")
            .as_str()
        {
            "bankrupt" | "0" => Ok(GroupLabel::Bankrupt),
            "nonbankrupt" | "healthy" | "1" => Ok(GroupLabel::NonBankrupt),
            other => Err(format!("unknown group label `{other}`")),
        }
    }
}

/// One row of a yearly panel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BankYearRecord<T> {
    pub bank_id: String,
    pub year: i32,
    pub ratios: RatioVector<T>,
    /// False when the source row carried no data (all six ratios zero or empty).
    pub available: bool,
    /// Actual group for this bank-year, when the file has a `label` column.
    pub label: Option<GroupLabel>,
}

/// Inclusive calendar-year window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct YearRange {
    pub from: i32,
    pub to: i32,
}

impl YearRange {
    pub fn new(from: i32, to: i32) -> Result<Self> {
        if from > to {
            return Err(Error::Validation(format!(
                "year window {from}:{to} is empty"
            )));
        }
        Ok(YearRange { from, to })
    }

    pub fn contains(&self, year: i32) -> bool {
        (self.from..=self.to).contains(&year)
    }
}

impl Default for YearRange {
    fn default() -> Self {
        YearRange {
            from: 2012,
            to: 2015,
        }
    }
}

impl FromStr for YearRange {
    type Err = Error;

    /// Parses `YYYY:YYYY`.
    fn from_str(s: &str) -> Result<Self> {
        let (a, b) = s
            .split_once(':')
            .ok_or_else(|| Error::Validation(format!("window `{s}` is not YYYY:YYYY")))?;
        let parse = |t: &str| {
            t.trim()
                .parse::<i32>()
                .map_err(|_| Error::Validation(format!("window `{s}` is not YYYY:YYYY")))
        };
        YearRange::new(parse(a)?, parse(b)?)
    }
}

impl fmt::Display for YearRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.from, self.to)
    }
}

const BANK_COLUMN: &str = "bank";
const YEAR_COLUMN: &str = "year";
const LABEL_COLUMN: &str = "label";

/// Parses a panel CSV (`bank,year,eaa,roae,roaa,nii,laaa,bdtla[,label]`).
///
/// Rows whose six ratio cells are all empty or all zero are kept with
/// `available = false`. Reported row numbers are file line numbers.
pub fn parse_panel<T: Scalar>(text: &str) -> Result<Vec<BankYearRecord<T>>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| Error::Schema(format!("unreadable header: {e}")))?
        .clone();
    let find = |name: &str| headers.iter().position(|h| h.eq_ignore_ascii_case(name));
    let require =
        |name: &str| find(name).ok_or_else(|| Error::Schema(format!("missing column `{name}`")));

    let bank_col = require(BANK_COLUMN)?;
    let year_col = require(YEAR_COLUMN)?;
    let ratio_cols = Ratio::ALL
        .iter()
        .map(|r| require(r.name()))
        .collect::<Result<Vec<_>>>()?;
    let label_col = find(LABEL_COLUMN);

    let mut seen = HashSet::new();
    let mut records = Vec::new();
    for row in reader.records() {
        let row = row.map_err(|e| Error::Parse {
            row: e.position().map_or(0, |p| p.line() as usize),
            column: String::new(),
            message: e.to_string(),
        })?;
        let line = row.position().map_or(0, |p| p.line() as usize);
        let cell = |idx: usize| row.get(idx).unwrap_or("");
        let parse_err = |column: &str, message: String| Error::Parse {
            row: line,
            column: column.to_string(),
            message,
        };

        let bank_id = cell(bank_col).to_string();
        if bank_id.is_empty() {
            return Err(parse_err(BANK_COLUMN, "empty bank identifier".into()));
        }
        let year = cell(year_col)
            .parse::<i32>()
            .map_err(|e| parse_err(YEAR_COLUMN, format!("`{}`: {e}", cell(year_col))))?;

        let raw: Vec<&str> = ratio_cols.iter().map(|&i| cell(i)).collect();
        let all_empty = raw.iter().all(|c| c.is_empty());
        let mut values = [T::zero(); 6];
        if !all_empty {
            for (k, ratio) in Ratio::ALL.iter().enumerate() {
                let text = raw[k];
                let v: f64 = text
                    .parse()
                    .map_err(|_| parse_err(ratio.name(), format!("`{text}` is not a number")))?;
                if !v.is_finite() {
                    return Err(parse_err(ratio.name(), format!("`{text}` is not finite")));
                }
                values[k] = T::lit(v);
            }
        }
        let ratios = RatioVector::from_array(values);

        let label = match label_col.map(cell) {
            None | Some("") => None,
            Some(text) => Some(
                text.parse::<GroupLabel>()
                    .map_err(|m| parse_err(LABEL_COLUMN, m))?,
            ),
        };

        if !seen.insert((bank_id.clone(), year)) {
            return Err(Error::DuplicateKey {
                bank: bank_id,
                year,
            });
        }
        records.push(BankYearRecord {
            bank_id,
            year,
            available: !ratios.is_all_zero(),
            ratios,
            label,
        });
    }
    Ok(records)
}

/// Serializes records back into the panel CSV schema.
pub fn write_panel<T: Scalar>(records: &[BankYearRecord<T>]) -> String {
    let with_label = records.iter().any(|r| r.label.is_some());
    let mut writer = csv::WriterBuilder::new().from_writer(Vec::new());
    let mut header = vec![BANK_COLUMN, YEAR_COLUMN];
    header.extend(Ratio::ALL.iter().map(|r| r.name()));
    if with_label {
        header.push(LABEL_COLUMN);
    }
    writer.write_record(&header).expect("in-memory write");
    for r in records {
        let mut row = vec![r.bank_id.clone(), r.year.to_string()];
        row.extend(r.ratios.to_array().iter().map(|v| v.to_string()));
        if with_label {
            row.push(r.label.map(|l| l.as_str().to_string()).unwrap_or_default());
        }
        writer.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("utf-8 output")
}

/// Component-wise mean of a bank's available ratios inside `window`.
pub fn average_ratios<T: Scalar>(
    records: &[BankYearRecord<T>],
    bank_id: &str,
    window: YearRange,
) -> Result<RatioVector<T>> {
    let selected: Vec<&RatioVector<T>> = records
        .iter()
        .filter(|r| r.bank_id == bank_id && r.available && window.contains(r.year))
        .map(|r| &r.ratios)
        .collect();
    if selected.is_empty() {
        return Err(Error::EmptyWindow {
            bank: bank_id.to_string(),
            from: window.from,
            to: window.to,
        });
    }
    let n = T::from_count(selected.len());
    let mut sums = [T::zero(); 6];
    for v in &selected {
        for (s, x) in sums.iter_mut().zip(v.to_array()) {
            *s = *s + x;
        }
    }
    Ok(RatioVector::from_array(sums.map(|s| s / n)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledSample<T> {
    pub bank_id: String,
    pub ratios: RatioVector<T>,
    pub label: GroupLabel,
}

/// Averages every bank's window and attaches its label.
///
/// A bank's label comes from `overrides` when present, otherwise from the
/// `label` cells of its in-window rows, which must agree. Banks appear in
/// order of first appearance in `records`.
pub fn samples_from_panel<T: Scalar>(
    records: &[BankYearRecord<T>],
    window: YearRange,
    overrides: &BTreeMap<String, GroupLabel>,
) -> Result<Vec<LabeledSample<T>>> {
    let mut banks: Vec<&str> = Vec::new();
    for r in records {
        if window.contains(r.year) && !banks.contains(&r.bank_id.as_str()) {
            banks.push(&r.bank_id);
        }
    }
    banks
        .into_iter()
        .map(|bank| {
            let label = match overrides.get(bank) {
                Some(&l) => l,
                None => {
                    let mut labels = records
                        .iter()
                        .filter(|r| r.bank_id == bank && window.contains(r.year))
                        .filter_map(|r| r.label);
                    let first = labels.next().ok_or_else(|| {
                        Error::Schema(format!("no label for training bank `{bank}`"))
                    })?;
                    if labels.any(|l| l != first) {
                        return Err(Error::Schema(format!(
                            "conflicting labels for training bank `{bank}`"
                        )));
                    }
                    first
                }
            };
            Ok(LabeledSample {
                bank_id: bank.to_string(),
                ratios: average_ratios(records, bank, window)?,
                label,
            })
        })
        .collect()
}

/// Labeled averaged samples with validated group sizes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingSet<T> {
    pub samples: Vec<LabeledSample<T>>,
    pub n0: usize,
    pub n1: usize,
    pub p: usize,
}

/// Smallest admissible group: the grey zone needs a per-group score sd.
pub const MIN_GROUP_SIZE: usize = 2;

pub fn build_training_set<T: Scalar>(samples: Vec<LabeledSample<T>>) -> Result<TrainingSet<T>> {
    if let Some(bad) = samples.iter().find(|s| !s.ratios.is_finite()) {
        return Err(Error::NonFinite(format!("ratios of `{}`", bad.bank_id)));
    }
    if let Some(bad) = samples.iter().find(|s| s.ratios.is_all_zero()) {
        return Err(Error::MissingData {
            bank: bad.bank_id.clone(),
            year: 0,
        });
    }
    let n0 = samples
        .iter()
        .filter(|s| s.label == GroupLabel::Bankrupt)
        .count();
    let n1 = samples.len() - n0;
    for (label, count) in [(GroupLabel::Bankrupt, n0), (GroupLabel::NonBankrupt, n1)] {
        if count < MIN_GROUP_SIZE {
            return Err(Error::InsufficientGroup {
                label,
                count,
                required: MIN_GROUP_SIZE,
            });
        }
    }
    let p = Ratio::ALL.len();
    let limit = n0 + n1 - 1;
    if p > limit {
        return Err(Error::VariableCount {
            variables: p,
            limit,
        });
    }
    Ok(TrainingSet { samples, n0, n1, p })
}

impl<T: Scalar> TrainingSet<T> {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// The samples as a labeled design matrix over the six named ratios.
    pub fn design(&self) -> Design<T> {
        Design {
            variables: Ratio::ALL.iter().map(|r| r.name().to_string()).collect(),
            ids: self.samples.iter().map(|s| s.bank_id.clone()).collect(),
            rows: self
                .samples
                .iter()
                .map(|s| s.ratios.to_array().to_vec())
                .collect(),
            labels: self.samples.iter().map(|s| s.label).collect(),
        }
    }
}

/// One cell block of the case processing summary.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CaseCounts {
    pub variable: Ratio,
    pub group: GroupLabel,
    pub valid: usize,
    pub missing: usize,
    pub total: usize,
    pub valid_percent: f64,
    pub missing_percent: f64,
}

/// Per-variable, per-group valid/missing counts.
pub fn case_processing_summary<T: Scalar>(ts: &TrainingSet<T>) -> Vec<CaseCounts> {
    let mut rows = Vec::new();
    for variable in Ratio::ALL {
        for group in GroupLabel::BOTH {
            let in_group: Vec<&LabeledSample<T>> =
                ts.samples.iter().filter(|s| s.label == group).collect();
            let total = in_group.len();
            let valid = in_group
                .iter()
                .filter(|s| s.ratios.get(variable).is_finite())
                .count();
            let missing = total - valid;
            let pct = |k: usize| {
                if total == 0 {
                    0.0
                } else {
                    100.0 * k as f64 / total as f64
                }
            };
            rows.push(CaseCounts {
                variable,
                group,
                valid,
                missing,
                total,
                valid_percent: pct(valid),
                missing_percent: pct(missing),
            });
        }
    }
    rows
}

/// Labeled observation matrix with named columns. Works for any number of
/// predictors; the six-ratio training set is one instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Design<T> {
    pub variables: Vec<String>,
    pub ids: Vec<String>,
    pub rows: Vec<Vec<T>>,
    pub labels: Vec<GroupLabel>,
}

impl<T: Scalar> Design<T> {
    /// Builds a design with generated row ids, checking shape.
    pub fn new(variables: Vec<String>, rows: Vec<Vec<T>>, labels: Vec<GroupLabel>) -> Result<Self> {
        if rows.len() != labels.len() {
            return Err(Error::Validation(format!(
                "{} rows but {} labels",
                rows.len(),
                labels.len()
            )));
        }
        if let Some((i, _)) = rows
            .iter()
            .enumerate()
            .find(|(_, r)| r.len() != variables.len())
        {
            return Err(Error::Validation(format!(
                "row {i} has {} values, expected {}",
                rows[i].len(),
                variables.len()
            )));
        }
        let ids = (0..rows.len()).map(|i| format!("case{}", i + 1)).collect();
        Ok(Design {
            variables,
            ids,
            rows,
            labels,
        })
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn p(&self) -> usize {
        self.variables.len()
    }

    pub fn count(&self, label: GroupLabel) -> usize {
        self.labels.iter().filter(|&&l| l == label).count()
    }

    pub fn group_rows(&self, label: GroupLabel) -> impl Iterator<Item = &Vec<T>> + '_ {
        self.rows
            .iter()
            .zip(&self.labels)
            .filter(move |(_, &l)| l == label)
            .map(|(r, _)| r)
    }

    /// Values of one column.
    pub fn column(&self, j: usize) -> Vec<T> {
        self.rows.iter().map(|r| r[j]).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADER: &str = "bank,year,eaa,roae,roaa,nii,laaa,bdtla\n";

    #[test]
    fn parses_yearly_row() {
        let text = format!("{HEADER}Moza Banco,2015,0.0896,0.0360,0.0030,0.0270,0.6775,0.0200\n");
        let recs = parse_panel::<f64>(&text).unwrap();
        assert_eq!(recs.len(), 1);
        let r = &recs[0];
        assert_eq!(r.bank_id, "Moza Banco");
        assert_eq!(r.year, 2015);
        assert!(r.available);
        assert_eq!(r.ratios.eaa, 0.0896);
        assert_eq!(r.ratios.bdtla, 0.0200);
        assert_eq!(r.label, None);
    }

    #[test]
    fn all_zero_or_empty_row_is_unavailable() {
        let text = format!("{HEADER}Nosso Banco,2017,0,0,0,0,0,0\nNosso Banco,2018,,,,,,\n");
        let recs = parse_panel::<f64>(&text).unwrap();
        assert!(recs.iter().all(|r| !r.available));
    }

    #[test]
    fn partial_zero_row_stays_available() {
        // Nosso Banco 2012 reports NII = 0 with other ratios present.
        let text = format!("{HEADER}Nosso,2012,-0.1127,0.0019,-0.061,0,0.4482,0.0026\n");
        assert!(parse_panel::<f64>(&text).unwrap()[0].available);
    }

    #[test]
    fn malformed_number_names_row_and_column() {
        let text = format!("{HEADER}BankX,2015,abc,0,0,0,0,0\n");
        match parse_panel::<f64>(&text) {
            Err(Error::Parse { row, column, .. }) => {
                assert_eq!(row, 2);
                assert_eq!(column, "eaa");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn partially_empty_row_is_a_parse_error() {
        let text = format!("{HEADER}BankX,2015,0.1,,0,0,0,0\n");
        assert!(matches!(
            parse_panel::<f64>(&text),
            Err(Error::Parse { column, .. }) if column == "roae"
        ));
    }

    #[test]
    fn duplicate_key_rejected() {
        let text = format!("{HEADER}A,2015,1,1,1,1,1,1\nA,2015,2,2,2,2,2,2\n");
        assert_eq!(
            parse_panel::<f64>(&text),
            Err(Error::DuplicateKey {
                bank: "A".into(),
                year: 2015
            })
        );
    }

    #[test]
    fn missing_column_is_schema_error() {
        let text = "bank,year,eaa,roae,roaa,nii,laaa\nA,2015,1,1,1,1,1\n";
        assert!(matches!(parse_panel::<f64>(text), Err(Error::Schema(m)) if m.contains("bdtla")));
    }

    #[test]
    fn label_column_parsed() {
        let text = "bank,year,eaa,roae,roaa,nii,laaa,bdtla,label\nA,2015,1,1,1,1,1,1,bankrupt\nB,2015,1,1,1,1,1,1,nonbankrupt\nC,2015,1,1,1,1,1,1,\n";
        let recs = parse_panel::<f64>(text).unwrap();
        assert_eq!(recs[0].label, Some(GroupLabel::Bankrupt));
        assert_eq!(recs[1].label, Some(GroupLabel::NonBankrupt));
        assert_eq!(recs[2].label, None);
        let bad = "bank,year,eaa,roae,roaa,nii,laaa,bdtla,label\nA,2015,1,1,1,1,1,1,maybe\n";
        assert!(
            matches!(parse_panel::<f64>(bad), Err(Error::Parse { column, .. }) if column == "label")
        );
    }

    #[test]
    fn moza_average_matches_table_two() {
        let text = format!(
            "{HEADER}Moza,2012,0.2202,0,0,0,0,0.0154\nMoza,2013,0.1150,0,0,0,0,0.0328\n\
             Moza,2014,0.1107,0,0,0,0,0.0222\nMoza,2015,0.0896,0,0,0,0,0.0200\nMoza,2016,0,0,0,0,0,0\n"
        );
        let recs = parse_panel::<f64>(&text).unwrap();
        let avg = average_ratios(&recs, "Moza", YearRange::default()).unwrap();
        assert!((avg.eaa - 0.13386).abs() < 5e-4, "{}", avg.eaa);
        // 2016 is unavailable and is excluded from numerator and denominator.
        let wide = average_ratios(&recs, "Moza", YearRange::new(2012, 2016).unwrap()).unwrap();
        assert_eq!(wide, avg);
    }

    #[test]
    fn average_of_single_year_is_unchanged() {
        let text = format!("{HEADER}A,2013,0.1,0.2,0.3,0.4,0.5,0.6\n");
        let recs = parse_panel::<f64>(&text).unwrap();
        let avg = average_ratios(&recs, "A", YearRange::default()).unwrap();
        assert_eq!(avg, recs[0].ratios);
    }

    #[test]
    fn average_of_unavailable_window_fails() {
        let text = format!("{HEADER}A,2013,0,0,0,0,0,0\nA,2020,0.1,0.2,0.3,0.4,0.5,0.6\n");
        let recs = parse_panel::<f64>(&text).unwrap();
        assert!(matches!(
            average_ratios(&recs, "A", YearRange::default()),
            Err(Error::EmptyWindow { .. })
        ));
    }

    #[test]
    fn inverted_window_rejected() {
        assert!(YearRange::new(2016, 2015).is_err());
        assert!("2016:2015".parse::<YearRange>().is_err());
        assert_eq!(
            "2012:2015".parse::<YearRange>().unwrap(),
            YearRange::default()
        );
    }

    fn sample(id: &str, label: GroupLabel, x: f64) -> LabeledSample<f64> {
        LabeledSample {
            bank_id: id.into(),
            ratios: RatioVector::from_array([x, x * 2.0, x + 1.0, 0.5, x * x, 1.0 / (1.0 + x)]),
            label,
        }
    }

    #[test]
    fn training_set_group_rules() {
        let mut s = vec![sample("b1", GroupLabel::Bankrupt, 1.0)];
        s.extend((0..12).map(|i| sample(&format!("h{i}"), GroupLabel::NonBankrupt, i as f64)));
        assert!(matches!(
            build_training_set(s.clone()),
            Err(Error::InsufficientGroup {
                label: GroupLabel::Bankrupt,
                count: 1,
                ..
            })
        ));
        s.push(sample("b2", GroupLabel::Bankrupt, 3.0));
        let ts = build_training_set(s).unwrap();
        assert_eq!((ts.n0, ts.n1, ts.p), (2, 12, 6));
    }

    #[test]
    fn variable_count_rule_boundary() {
        let mk = |n0: usize, n1: usize| {
            let mut s: Vec<_> = (0..n0)
                .map(|i| sample(&format!("b{i}"), GroupLabel::Bankrupt, i as f64))
                .collect();
            s.extend(
                (0..n1).map(|i| sample(&format!("h{i}"), GroupLabel::NonBankrupt, i as f64 + 5.0)),
            );
            build_training_set(s)
        };
        assert!(matches!(
            mk(3, 3),
            Err(Error::VariableCount {
                variables: 6,
                limit: 5
            })
        ));
        assert!(mk(3, 4).is_ok());
    }

    #[test]
    fn case_summary_counts() {
        let mut s: Vec<_> = (0..5)
            .map(|i| sample(&format!("b{i}"), GroupLabel::Bankrupt, i as f64 + 0.5))
            .collect();
        s.extend((0..3).map(|i| sample(&format!("h{i}"), GroupLabel::NonBankrupt, i as f64)));
        let ts = build_training_set(s).unwrap();
        let summary = case_processing_summary(&ts);
        assert_eq!(summary.len(), 12);
        for row in &summary {
            let expect = if row.group == GroupLabel::Bankrupt {
                5
            } else {
                3
            };
            assert_eq!(row.valid, expect);
            assert_eq!(row.missing, 0);
            assert_eq!(row.valid_percent, 100.0);
        }
    }

    #[test]
    fn label_conflict_and_absence() {
        let text = "bank,year,eaa,roae,roaa,nii,laaa,bdtla,label\nA,2013,1,1,1,1,1,1,bankrupt\nA,2014,1,1,1,1,1,1,nonbankrupt\n";
        let recs = parse_panel::<f64>(text).unwrap();
        assert!(samples_from_panel(&recs, YearRange::default(), &BTreeMap::new()).is_err());
        let mut over = BTreeMap::new();
        over.insert("A".to_string(), GroupLabel::Bankrupt);
        let s = samples_from_panel(&recs, YearRange::default(), &over).unwrap();
        assert_eq!(s[0].label, GroupLabel::Bankrupt);

        let unlabeled = parse_panel::<f64>(&format!("{HEADER}A,2013,1,1,1,1,1,1\n")).unwrap();
        assert!(matches!(
            samples_from_panel(&unlabeled, YearRange::default(), &BTreeMap::new()),
            Err(Error::Schema(_))
        ));
    }
}
