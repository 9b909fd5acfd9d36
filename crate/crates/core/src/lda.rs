//! Two-group canonical discriminant fit and Fisher classification functions.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dataset::{Design, GroupLabel, Ratio, RatioVector};
use crate::error::{Error, Result};
use crate::linalg::{dot, Cholesky, Matrix};
use crate::scalar::{mean, Scalar};

/// A value for each of the two groups.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct PerGroup<V> {
    pub bankrupt: V,
    pub nonbankrupt: V,
}

impl<V> PerGroup<V> {
    pub fn new(bankrupt: V, nonbankrupt: V) -> Self {
        PerGroup {
            bankrupt,
            nonbankrupt,
        }
    }

    pub fn get(&self, label: GroupLabel) -> &V {
        match label {
            GroupLabel::Bankrupt => &self.bankrupt,
            GroupLabel::NonBankrupt => &self.nonbankrupt,
        }
    }

    pub fn get_mut(&mut self, label: GroupLabel) -> &mut V {
        match label {
            GroupLabel::Bankrupt => &mut self.bankrupt,
            GroupLabel::NonBankrupt => &mut self.nonbankrupt,
        }
    }

    pub fn map<U>(self, mut f: impl FnMut(V) -> U) -> PerGroup<U> {
        PerGroup {
            bankrupt: f(self.bankrupt),
            nonbankrupt: f(self.nonbankrupt),
        }
    }

    pub fn from_fn(mut f: impl FnMut(GroupLabel) -> V) -> Self {
        PerGroup {
            bankrupt: f(GroupLabel::Bankrupt),
            nonbankrupt: f(GroupLabel::NonBankrupt),
        }
    }
}

/// Prior group probabilities entering the Fisher constants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Priors {
    /// Proportional to the training group sizes.
    #[default]
    Proportional,
    /// One half each.
    Equal,
}

impl FromStr for Priors {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "proportional" => Ok(Priors::Proportional),
            "equal" => Ok(Priors::Equal),
            other => Err(format!(
                "unknown priors `{other}` (expected proportional or equal)"
            )),
        }
    }
}

impl fmt::Display for Priors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Priors::Proportional => "proportional",
            Priors::Equal => "equal",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FitOptions {
    pub priors: Priors,
}

/// Group means and the pooled within-group covariance of a labeled design.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupStatistics<T> {
    pub variables: Vec<String>,
    pub means: PerGroup<Vec<T>>,
    pub sizes: PerGroup<usize>,
    pub grand_mean: Vec<T>,
    /// Group-centered cross products divided by `N - g`.
    pub within_covariance: Matrix<T>,
    pub within_correlation: Matrix<T>,
    /// Correlation of the pooled sample ignoring groups (divisor `N - 1`).
    pub total_correlation: Matrix<T>,
}

pub fn compute_group_stats<T: Scalar>(design: &Design<T>) -> Result<GroupStatistics<T>> {
    let p = design.p();
    let sizes = PerGroup::from_fn(|g| design.count(g));
    for g in GroupLabel::BOTH {
        if *sizes.get(g) == 0 {
            return Err(Error::InsufficientGroup {
                label: g,
                count: 0,
                required: 1,
            });
        }
    }
    let n = design.n();
    if n < 3 {
        return Err(Error::InsufficientCases(format!(
            "{n} cases leave no degrees of freedom for the within-group covariance"
        )));
    }
    let column_means = |rows: Vec<&Vec<T>>| -> Vec<T> {
        (0..p)
            .map(|j| mean(&rows.iter().map(|r| r[j]).collect::<Vec<T>>()))
            .collect()
    };
    let means = PerGroup::from_fn(|g| column_means(design.group_rows(g).collect()));
    let grand_mean = column_means(design.rows.iter().collect());

    let mut within = Matrix::zeros(p);
    let mut total = Matrix::zeros(p);
    for (row, &label) in design.rows.iter().zip(&design.labels) {
        let mu = means.get(label);
        for i in 0..p {
            let di = row[i] - mu[i];
            let ti = row[i] - grand_mean[i];
            for j in 0..p {
                within[(i, j)] = within[(i, j)] + di * (row[j] - mu[j]);
                total[(i, j)] = total[(i, j)] + ti * (row[j] - grand_mean[j]);
            }
        }
    }
    within.scale(T::one() / T::from_count(n - 2));
    total.scale(T::one() / T::from_count(n - 1));
    Ok(GroupStatistics {
        variables: design.variables.clone(),
        within_correlation: within.to_correlation(),
        total_correlation: total.to_correlation(),
        within_covariance: within,
        means,
        sizes,
        grand_mean,
    })
}

/// Centroids, dispersion and the sum-of-squares split of grouped scores.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreSummary<T> {
    pub sizes: PerGroup<usize>,
    pub centroids: PerGroup<T>,
    /// Sample standard deviation per group (divisor `n_g - 1`); zero for a
    /// single-member group.
    pub sds: PerGroup<T>,
    pub grand_mean: T,
    pub ss_between: T,
    pub ss_within: T,
    pub ss_total: T,
    /// `ss_within / (N - g)`.
    pub within_variance: T,
    /// `ss_between / ss_within`.
    pub eigenvalue: T,
}

pub fn summarize_scores<T: Scalar>(scores: &[(GroupLabel, T)]) -> Result<ScoreSummary<T>> {
    let group = |g: GroupLabel| -> Vec<T> {
        scores
            .iter()
            .filter(|(l, _)| *l == g)
            .map(|&(_, s)| s)
            .collect()
    };
    let values = PerGroup::from_fn(group);
    for g in GroupLabel::BOTH {
        if values.get(g).is_empty() {
            return Err(Error::InsufficientGroup {
                label: g,
                count: 0,
                required: 1,
            });
        }
    }
    if let Some((_, s)) = scores.iter().find(|(_, s)| !s.is_finite()) {
        return Err(Error::NonFinite(format!("discriminant score {s}")));
    }
    let n = scores.len();
    let all: Vec<T> = scores.iter().map(|&(_, s)| s).collect();
    let grand_mean = mean(&all);
    let centroids = values.clone().map(|v| mean(&v));
    let ss_group = |g: GroupLabel| -> T {
        let c = *centroids.get(g);
        values.get(g).iter().map(|&s| (s - c) * (s - c)).sum()
    };
    let ss = PerGroup::from_fn(ss_group);
    let sizes = values.clone().map(|v| v.len());
    let sds = PerGroup::from_fn(|g| {
        let k = *sizes.get(g);
        if k < 2 {
            T::zero()
        } else {
            (*ss.get(g) / T::from_count(k - 1)).sqrt()
        }
    });
    let ss_within = ss.bankrupt + ss.nonbankrupt;
    let ss_between: T = GroupLabel::BOTH
        .iter()
        .map(|&g| {
            let d = *centroids.get(g) - grand_mean;
            T::from_count(*sizes.get(g)) * d * d
        })
        .sum();
    let ss_total = all
        .iter()
        .map(|&s| (s - grand_mean) * (s - grand_mean))
        .sum();
    if !(ss_within > T::zero()) {
        return Err(Error::ZeroVariance(
            "within-group discriminant scores".into(),
        ));
    }
    Ok(ScoreSummary {
        sizes,
        centroids,
        sds,
        grand_mean,
        ss_between,
        ss_within,
        ss_total,
        within_variance: ss_within / T::from_count(n - 2),
        eigenvalue: ss_between / ss_within,
    })
}

/// Per-group Fisher classification functions `w_gᵀz + c_g`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FisherFunctions<T> {
    pub priors: PerGroup<T>,
    pub weights: PerGroup<Vec<T>>,
    pub constants: PerGroup<T>,
}

/// Outcome of a Fisher classification; `tie` is set when both functions are
/// exactly equal and the case was resolved to `NonBankrupt`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FisherDecision {
    pub label: GroupLabel,
    pub tie: bool,
}

/// Fitted two-group discriminant function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscriminantModel<T> {
    /// Names binding each coefficient; every scoring path checks them.
    pub variables: Vec<String>,
    pub coefficients: Vec<T>,
    pub constant: T,
    pub standardized: Vec<T>,
    pub centroids: PerGroup<T>,
    pub group_sizes: PerGroup<usize>,
    pub group_score_sd: PerGroup<T>,
    pub within_score_variance: T,
    pub eigenvalue: T,
    pub canonical_correlation: T,
    pub wilks_lambda: T,
    pub fisher: FisherFunctions<T>,
}

fn prior_values<T: Scalar>(priors: Priors, sizes: PerGroup<usize>) -> PerGroup<T> {
    match priors {
        Priors::Equal => PerGroup::new(T::lit(0.5), T::lit(0.5)),
        Priors::Proportional => {
            let n = T::from_count(sizes.bankrupt + sizes.nonbankrupt);
            sizes.map(|k| T::from_count(k) / n)
        }
    }
}

/// Fits the canonical discriminant function on a (normalized) design.
pub fn fit<T: Scalar>(design: &Design<T>, opts: FitOptions) -> Result<DiscriminantModel<T>> {
    let stats = compute_group_stats(design)?;
    let p = design.p();
    let diff: Vec<T> = (0..p)
        .map(|j| stats.means.nonbankrupt[j] - stats.means.bankrupt[j])
        .collect();
    let spread = diff.iter().fold(T::zero(), |m, d| m.max(d.abs()));
    if spread < T::lit(1e-12) {
        return Err(Error::DegenerateSeparation);
    }
    let chol = Cholesky::factor(&stats.within_covariance)?;
    let raw = chol.solve(&diff);
    let quad = dot(&raw, &stats.within_covariance.mul_vec(&raw));
    // bᵀ(μ1 − μ0) = quad > 0, so the healthy centroid already lies on the positive side.
    let norm = quad.sqrt();
    let coefficients: Vec<T> = raw.iter().map(|&b| b / norm).collect();
    let constant = -dot(&coefficients, &stats.grand_mean);

    let scores: Vec<(GroupLabel, T)> = design
        .rows
        .iter()
        .zip(&design.labels)
        .map(|(r, &l)| (l, constant + dot(&coefficients, r)))
        .collect();
    let summary = summarize_scores(&scores)?;
    let eigenvalue = summary.eigenvalue;
    let standardized = coefficients
        .iter()
        .zip(stats.within_covariance.diagonal())
        .map(|(&b, v)| b * v.sqrt())
        .collect();

    let priors: PerGroup<T> = prior_values(opts.priors, stats.sizes);
    let weights = PerGroup::from_fn(|g| chol.solve(stats.means.get(g)));
    let constants = PerGroup::from_fn(|g| {
        T::lit(-0.5) * dot(stats.means.get(g), weights.get(g)) + priors.get(g).ln()
    });

    Ok(DiscriminantModel {
        variables: design.variables.clone(),
        coefficients,
        constant,
        standardized,
        centroids: summary.centroids,
        group_sizes: summary.sizes,
        group_score_sd: summary.sds,
        within_score_variance: summary.within_variance,
        eigenvalue,
        canonical_correlation: (eigenvalue / (T::one() + eigenvalue)).sqrt(),
        wilks_lambda: T::one() / (T::one() + eigenvalue),
        fisher: FisherFunctions {
            priors,
            weights,
            constants,
        },
    })
}

impl<T: Scalar> DiscriminantModel<T> {
    pub fn p(&self) -> usize {
        self.variables.len()
    }

    pub fn total_cases(&self) -> usize {
        self.group_sizes.bankrupt + self.group_sizes.nonbankrupt
    }

    /// `a + Σ b_j z_j` for values already in the model's variable order.
    pub fn score(&self, z: &[T]) -> Result<T> {
        if z.len() != self.p() {
            return Err(Error::Binding(format!(
                "{} values supplied for {} model variables",
                z.len(),
                self.p()
            )));
        }
        Ok(self.constant + dot(&self.coefficients, z))
    }

    /// Reorders `(names, values)` into the model's variable order.
    pub fn bind(&self, names: &[String], values: &[T]) -> Result<Vec<T>> {
        if names.len() != values.len() {
            return Err(Error::Binding(format!(
                "{} names for {} values",
                names.len(),
                values.len()
            )));
        }
        if names.len() != self.p() {
            return Err(Error::Binding(format!(
                "input has variables {names:?}, model expects {:?}",
                self.variables
            )));
        }
        self.variables
            .iter()
            .map(|v| {
                names
                    .iter()
                    .position(|n| n == v)
                    .map(|k| values[k])
                    .ok_or_else(|| Error::Binding(format!("input lacks model variable `{v}`")))
            })
            .collect()
    }

    pub fn score_named(&self, names: &[String], values: &[T]) -> Result<T> {
        self.score(&self.bind(names, values)?)
    }

    pub fn score_ratios(&self, v: &RatioVector<T>) -> Result<T> {
        let names: Vec<String> = Ratio::ALL.iter().map(|r| r.name().to_string()).collect();
        self.score_named(&names, &v.to_array())
    }

    /// Scores of every design row, bound by the design's variable names.
    pub fn score_design(&self, design: &Design<T>) -> Result<Vec<T>> {
        design
            .rows
            .iter()
            .map(|r| self.score_named(&design.variables, r))
            .collect()
    }

    pub fn fisher_values(&self, z: &[T]) -> Result<PerGroup<T>> {
        if z.len() != self.p() {
            return Err(Error::Binding(format!(
                "{} values supplied for {} model variables",
                z.len(),
                self.p()
            )));
        }
        Ok(PerGroup::from_fn(|g| {
            dot(self.fisher.weights.get(g), z) + *self.fisher.constants.get(g)
        }))
    }

    /// Group with the larger Fisher function; exact ties go to `NonBankrupt`.
    pub fn fisher_classify(&self, z: &[T]) -> Result<FisherDecision> {
        let v = self.fisher_values(z)?;
        Ok(if v.bankrupt > v.nonbankrupt {
            FisherDecision {
                label: GroupLabel::Bankrupt,
                tie: false,
            }
        } else {
            FisherDecision {
                label: GroupLabel::NonBankrupt,
                tie: v.bankrupt == v.nonbankrupt,
            }
        })
    }

    pub fn fisher_classify_named(&self, names: &[String], values: &[T]) -> Result<FisherDecision> {
        self.fisher_classify(&self.bind(names, values)?)
    }

    /// The same model with the Fisher constants re-based on other priors.
    pub fn with_priors(&self, priors: Priors) -> DiscriminantModel<T> {
        let new: PerGroup<T> = prior_values(priors, self.group_sizes);
        let mut out = self.clone();
        for g in GroupLabel::BOTH {
            *out.fisher.constants.get_mut(g) =
                *self.fisher.constants.get(g) - self.fisher.priors.get(g).ln() + new.get(g).ln();
        }
        out.fisher.priors = new;
        out
    }

    /// Structural checks used when a model is loaded rather than fitted.
    pub fn validate(&self) -> Result<()> {
        let p = self.p();
        let lengths = [
            ("coefficients", self.coefficients.len()),
            ("standardized coefficients", self.standardized.len()),
            (
                "bankrupt Fisher weights",
                self.fisher.weights.bankrupt.len(),
            ),
            (
                "nonbankrupt Fisher weights",
                self.fisher.weights.nonbankrupt.len(),
            ),
        ];
        for (what, len) in lengths {
            if len != p {
                return Err(Error::Binding(format!(
                    "{what}: {len} values for {p} variables"
                )));
            }
        }
        let scalars = [
            self.constant,
            self.centroids.bankrupt,
            self.centroids.nonbankrupt,
            self.group_score_sd.bankrupt,
            self.group_score_sd.nonbankrupt,
            self.eigenvalue,
            self.canonical_correlation,
            self.wilks_lambda,
        ];
        let all_finite = scalars.iter().all(|x| x.is_finite())
            && self.coefficients.iter().all(|x| x.is_finite())
            && self.fisher.weights.bankrupt.iter().all(|x| x.is_finite())
            && self
                .fisher
                .weights
                .nonbankrupt
                .iter()
                .all(|x| x.is_finite());
        if !all_finite {
            return Err(Error::NonFinite("model parameter".into()));
        }
        if self.centroids.nonbankrupt < self.centroids.bankrupt {
            return Err(Error::Validation(
                "nonbankrupt centroid lies below the bankrupt centroid".into(),
            ));
        }
        if self.eigenvalue < T::zero() {
            return Err(Error::Validation("negative eigenvalue".into()));
        }
        Ok(())
    }
}
