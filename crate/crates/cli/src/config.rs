use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, ValueEnum};
use serde::Deserialize;

use distress_lda::{
    GroupLabel, Priors, ScoringMode, YearRange, DEFAULT_ALPHA, DEFAULT_COLLINEARITY_THRESHOLD,
};

use crate::error::{CliError, Result};

pub const CONFIG_ENV: &str = "DISTRESS_LDA_CONFIG";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Text,
    Json,
}

/// Where the cut-off and grey interval come from.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum ZoneSelector {
    /// Weighted cut-off and centroid ± sd interval of the loaded model.
    #[default]
    Derived,
    /// The built-in printed override zones.
    Published,
    File(PathBuf),
}

impl FromStr for ZoneSelector {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim() {
            "" => Err("empty zone selector".into()),
            "derived" => Ok(ZoneSelector::Derived),
            "paper" => Ok(ZoneSelector::Published),
            path => Ok(ZoneSelector::File(PathBuf::from(path))),
        }
    }
}

impl fmt::Display for ZoneSelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ZoneSelector::Derived => f.write_str("derived"),
            ZoneSelector::Published => f.write_str("paper"),
            ZoneSelector::File(p) => write!(f, "{}", p.display()),
        }
    }
}

/// Flags shared by every subcommand; each overrides the config file.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Config file (key=value lines or a JSON object).
    #[arg(long, global = true, env = CONFIG_ENV)]
    pub config: Option<PathBuf>,

    /// Training panel CSV.
    #[arg(long, global = true)]
    pub train: Option<PathBuf>,

    /// Panel CSV to classify or evaluate; repeat to concatenate panels.
    #[arg(long, global = true)]
    pub panel: Vec<PathBuf>,

    /// Model file (written by `fit`, read by the other commands).
    #[arg(long, global = true)]
    pub model: Option<PathBuf>,

    /// Zone source: `derived`, `paper`, or a zones JSON file.
    #[arg(long, global = true)]
    pub zones: Option<String>,

    /// Scoring mode: `raw` ratios or `normalized` z-scores.
    #[arg(long, global = true)]
    pub mode: Option<String>,

    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,

    /// Significance level for the test verdicts.
    #[arg(long, global = true)]
    pub alpha: Option<f64>,

    /// Absolute pooled correlation above which a pair is flagged.
    #[arg(long, global = true)]
    pub collinearity_threshold: Option<f64>,

    /// Averaging window `FROM:TO`, inclusive.
    #[arg(long, global = true)]
    pub window: Option<String>,

    /// Group of a bank, `BANK=bankrupt|nonbankrupt`; repeatable.
    #[arg(long = "label", global = true)]
    pub labels: Vec<String>,

    /// Fisher prior probabilities: `proportional` or `equal`.
    #[arg(long, global = true)]
    pub priors: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub train: Option<PathBuf>,
    pub panels: Vec<PathBuf>,
    pub model: Option<PathBuf>,
    pub labels: BTreeMap<String, GroupLabel>,
    pub window: YearRange,
    pub zones: ZoneSelector,
    pub mode: ScoringMode,
    pub priors: Priors,
    pub alpha: f64,
    pub collinearity_threshold: f64,
    pub format: OutputFormat,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            train: None,
            panels: Vec::new(),
            model: None,
            labels: BTreeMap::new(),
            window: YearRange::default(),
            zones: ZoneSelector::default(),
            mode: ScoringMode::default(),
            priors: Priors::default(),
            alpha: DEFAULT_ALPHA,
            collinearity_threshold: DEFAULT_COLLINEARITY_THRESHOLD,
            format: OutputFormat::default(),
        }
    }
}

/// Values a config file may set, all optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
struct FileConfig {
    train: Option<PathBuf>,
    #[serde(default, deserialize_with = "one_or_many")]
    panel: Vec<PathBuf>,
    model: Option<PathBuf>,
    #[serde(default, alias = "label")]
    labels: BTreeMap<String, String>,
    window: Option<String>,
    zones: Option<String>,
    mode: Option<String>,
    priors: Option<String>,
    alpha: Option<f64>,
    #[serde(alias = "collinearity_threshold")]
    collinearity_threshold: Option<f64>,
    format: Option<OutputFormat>,
}

fn one_or_many<'de, D: serde::Deserializer<'de>>(
    d: D,
) -> std::result::Result<Vec<PathBuf>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum OneOrMany {
        One(PathBuf),
        Many(Vec<PathBuf>),
    }
    Ok(match OneOrMany::deserialize(d)? {
        OneOrMany::One(p) => vec![p],
        OneOrMany::Many(v) => v,
    })
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

pub fn parse_window(s: &str) -> Result<YearRange> {
    s.parse::<YearRange>()
        .map_err(|e| config_err(format!("window `{s}`: {e}")))
}

fn check_unit_interval(name: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err(config_err(format!("{name} {v} must lie in (0, 1)")))
    }
}

/// Splits `BANK=group` on the last `=` so bank names may contain `=`.
pub fn parse_label(s: &str) -> Result<(String, GroupLabel)> {
    let (bank, group) = s
        .rsplit_once('=')
        .ok_or_else(|| config_err(format!("label `{s}` is not BANK=group")))?;
    let bank = bank.trim();
    if bank.is_empty() {
        return Err(config_err(format!("label `{s}` has an empty bank name")));
    }
    let group = group
        .parse::<GroupLabel>()
        .map_err(|e| config_err(format!("label `{s}`: {e}")))?;
    Ok((bank.to_string(), group))
}

fn parse_with<T: FromStr>(what: &str, s: &str) -> Result<T>
where
    T::Err: fmt::Display,
{
    s.parse::<T>()
        .map_err(|e| config_err(format!("{what} `{s}`: {e}")))
}

fn parse_key_values(text: &str) -> Result<FileConfig> {
    let mut cfg = FileConfig::default();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| config_err(format!("config line {}: expected key=value", i + 1)))?;
        let value = value.trim().to_string();
        let number = |v: &str| -> Result<f64> {
            v.parse::<f64>()
                .map_err(|e| config_err(format!("config line {}: {e}", i + 1)))
        };
        match key.trim().replace('_', "-").as_str() {
            "train" => cfg.train = Some(value.into()),
            "panel" => cfg.panel.push(value.into()),
            "model" => cfg.model = Some(value.into()),
            "label" | "labels" => {
                let (bank, group) = value.rsplit_once('=').ok_or_else(|| {
                    config_err(format!("config line {}: label is not BANK=group", i + 1))
                })?;
                cfg.labels
                    .insert(bank.trim().to_string(), group.trim().to_string());
            }
            "window" => cfg.window = Some(value),
            "zones" => cfg.zones = Some(value),
            "mode" => cfg.mode = Some(value),
            "priors" => cfg.priors = Some(value),
            "alpha" => cfg.alpha = Some(number(&value)?),
            "collinearity-threshold" => cfg.collinearity_threshold = Some(number(&value)?),
            "format" => {
                cfg.format = Some(
                    OutputFormat::from_str(&value, true)
                        .map_err(|e| config_err(format!("config line {}: {e}", i + 1)))?,
                )
            }
            other => {
                return Err(config_err(format!(
                    "config line {}: unknown key `{other}`",
                    i + 1
                )))
            }
        }
    }
    Ok(cfg)
}

fn load_file(path: &Path) -> Result<FileConfig> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    if text.trim_start().starts_with('{') {
        serde_json::from_str(&text).map_err(|e| config_err(format!("{}: {e}", path.display())))
    } else {
        parse_key_values(&text).map_err(|e| config_err(format!("{}: {e}", path.display())))
    }
}

/// Validates values given on the command line before anything is read.
fn precheck(args: &CommonArgs) -> Result<()> {
    if let Some(w) = &args.window {
        parse_window(w)?;
    }
    if let Some(a) = args.alpha {
        check_unit_interval("alpha", a)?;
    }
    if let Some(t) = args.collinearity_threshold {
        check_unit_interval("collinearity threshold", t)?;
    }
    for l in &args.labels {
        parse_label(l)?;
    }
    Ok(())
}

impl RunConfig {
    /// Merges defaults, the config file, and flags, in increasing precedence.
    pub fn resolve(args: &CommonArgs) -> Result<Self> {
        precheck(args)?;
        let file = match &args.config {
            Some(path) => load_file(path)?,
            None => FileConfig::default(),
        };
        let mut cfg = RunConfig {
            train: args.train.clone().or(file.train),
            panels: if args.panel.is_empty() {
                file.panel
            } else {
                args.panel.clone()
            },
            model: args.model.clone().or(file.model),
            ..RunConfig::default()
        };

        for (bank, group) in &file.labels {
            cfg.labels.insert(
                bank.clone(),
                parse_with::<GroupLabel>("label group", group)?,
            );
        }
        for l in &args.labels {
            let (bank, group) = parse_label(l)?;
            cfg.labels.insert(bank, group);
        }

        if let Some(w) = args.window.as_ref().or(file.window.as_ref()) {
            cfg.window = parse_window(w)?;
        }
        if let Some(z) = args.zones.as_ref().or(file.zones.as_ref()) {
            cfg.zones = parse_with("zone selector", z)?;
        }
        if let Some(m) = args.mode.as_ref().or(file.mode.as_ref()) {
            cfg.mode = parse_with("scoring mode", m)?;
        }
        if let Some(p) = args.priors.as_ref().or(file.priors.as_ref()) {
            cfg.priors = parse_with("priors", p)?;
        }
        if let Some(a) = args.alpha.or(file.alpha) {
            cfg.alpha = check_unit_interval("alpha", a)?;
        }
        if let Some(t) = args.collinearity_threshold.or(file.collinearity_threshold) {
            cfg.collinearity_threshold = check_unit_interval("collinearity threshold", t)?;
        }
        if let Some(f) = args.format.or(file.format) {
            cfg.format = f;
        }
        Ok(cfg)
    }

    pub fn require_train(&self) -> Result<&Path> {
        self.train
            .as_deref()
            .ok_or_else(|| config_err("no training file given (--train)"))
    }

    pub fn require_model(&self) -> Result<&Path> {
        self.model
            .as_deref()
            .ok_or_else(|| config_err("no model file given (--model)"))
    }

    pub fn require_panels(&self) -> Result<&[PathBuf]> {
        if self.panels.is_empty() {
            Err(config_err("no panel file given (--panel)"))
        } else {
            Ok(&self.panels)
        }
    }
}
