//! Pooled z-score normalization fitted on the training set.

use serde::{Deserialize, Serialize};

use crate::dataset::{Design, Ratio, RatioVector, TrainingSet};
use crate::error::{Error, Result};
use crate::scalar::{mean, sample_variance, Scalar};

/// Per-variable mean and sample standard deviation (divisor `n - 1`),
/// computed over both groups pooled.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizationStats<T> {
    pub variables: Vec<String>,
    pub mean: Vec<T>,
    pub sd: Vec<T>,
}

pub fn fit_normalizer<T: Scalar>(ts: &TrainingSet<T>) -> Result<NormalizationStats<T>> {
    fit_design(&ts.design())
}

pub fn fit_design<T: Scalar>(design: &Design<T>) -> Result<NormalizationStats<T>> {
    if design.n() < 2 {
        return Err(Error::InsufficientCases(format!(
            "{} cases, normalization needs at least 2",
            design.n()
        )));
    }
    let mut means = Vec::with_capacity(design.p());
    let mut sds = Vec::with_capacity(design.p());
    for (j, name) in design.variables.iter().enumerate() {
        let col = design.column(j);
        let m = mean(&col);
        let sd = sample_variance(&col).sqrt();
        let scale = col.iter().fold(T::zero(), |acc, x| acc.max(x.abs()));
        if !(sd > T::lit(8.0) * T::epsilon() * scale) {
            return Err(Error::ZeroVariance(name.clone()));
        }
        means.push(m);
        sds.push(sd);
    }
    Ok(NormalizationStats {
        variables: design.variables.clone(),
        mean: means,
        sd: sds,
    })
}

impl<T: Scalar> NormalizationStats<T> {
    /// `(v_j - mean_j) / sd_j`, in the stats' own variable order.
    pub fn apply(&self, values: &[T]) -> Vec<T> {
        values
            .iter()
            .zip(self.mean.iter().zip(&self.sd))
            .map(|(&v, (&m, &s))| (v - m) / s)
            .collect()
    }

    /// Standardizes a ratio vector, binding each statistic by variable name.
    pub fn apply_ratios(&self, v: &RatioVector<T>) -> Result<RatioVector<T>> {
        let mut out = *v;
        for (k, name) in self.variables.iter().enumerate() {
            let ratio = Ratio::from_name(name)
                .ok_or_else(|| Error::Binding(format!("`{name}` is not one of the six ratios")))?;
            out.set(ratio, (v.get(ratio) - self.mean[k]) / self.sd[k]);
        }
        if self.variables.len() != Ratio::ALL.len() {
            return Err(Error::Binding(format!(
                "normalization covers {} variables, ratio vectors have 6",
                self.variables.len()
            )));
        }
        Ok(out)
    }

    /// Standardizes every row of a design with matching variable names.
    pub fn normalize_design(&self, design: &Design<T>) -> Result<Design<T>> {
        if design.variables != self.variables {
            return Err(Error::Binding(format!(
                "design variables {:?} do not match normalization variables {:?}",
                design.variables, self.variables
            )));
        }
        Ok(Design {
            variables: design.variables.clone(),
            ids: design.ids.clone(),
            rows: design.rows.iter().map(|r| self.apply(r)).collect(),
            labels: design.labels.clone(),
        })
    }
}
