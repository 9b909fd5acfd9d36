//! Test battery for a fitted discriminant: collinearity screen, Wilks' Lambda
//! with Bartlett's χ², Box's M on the discriminant scores, canonical summary.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lda::DiscriminantModel;
use crate::linalg::Matrix;
use crate::scalar::{sample_variance, Scalar};
use crate::special::{chi_square_sf, f_sf, TailProbability};

/// Default significance level for both hypothesis tests.
pub const DEFAULT_ALPHA: f64 = 0.05;

/// Default absolute-correlation threshold of the collinearity screen.
pub const DEFAULT_COLLINEARITY_THRESHOLD: f64 = 0.8;

pub const WILKS_SIGNIFICANT: &str = "discriminant function is significant";
pub const WILKS_NOT_SIGNIFICANT: &str = "discriminant function is not significant";
pub const BOX_HOMOGENEOUS: &str = "variance of the groups is homogenous";
pub const BOX_HETEROGENEOUS: &str = "variance of the groups is not homogenous";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlaggedPair<T> {
    pub first: String,
    pub second: String,
    pub r: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollinearityReport<T> {
    pub variables: Vec<String>,
    pub matrix: Vec<Vec<T>>,
    pub threshold: T,
    /// Pairs with `|r| > threshold`, largest `|r|` first.
    pub flagged: Vec<FlaggedPair<T>>,
}

pub fn collinearity_check<T: Scalar>(
    variables: &[String],
    corr: &Matrix<T>,
    threshold: T,
) -> Result<CollinearityReport<T>> {
    let p = corr.dim();
    if variables.len() != p {
        return Err(Error::Validation(format!(
            "{} names for a {p}x{p} correlation matrix",
            variables.len()
        )));
    }
    if !(threshold > T::zero() && threshold < T::one()) {
        return Err(Error::Validation(format!(
            "collinearity threshold {threshold} must lie in (0, 1)"
        )));
    }
    let tol = T::lit(1e-9);
    for i in 0..p {
        if (corr[(i, i)] - T::one()).abs() > tol {
            return Err(Error::Validation(format!(
                "diagonal entry {i} of the correlation matrix is {}",
                corr[(i, i)]
            )));
        }
        for j in 0..p {
            let r = corr[(i, j)];
            if !r.is_finite() || r.abs() > T::one() + tol {
                return Err(Error::Validation(format!("correlation ({i}, {j}) = {r}")));
            }
            if (r - corr[(j, i)]).abs() > tol {
                return Err(Error::Validation(format!(
                    "correlation matrix is not symmetric at ({i}, {j})"
                )));
            }
        }
    }
    let mut flagged = Vec::new();
    for i in 0..p {
        for j in (i + 1)..p {
            let r = corr[(i, j)];
            if r.abs() > threshold {
                flagged.push(FlaggedPair {
                    first: variables[i].clone(),
                    second: variables[j].clone(),
                    r,
                });
            }
        }
    }
    flagged.sort_by(|a, b| b.r.abs().partial_cmp(&a.r.abs()).expect("finite"));
    Ok(CollinearityReport {
        variables: variables.to_vec(),
        matrix: corr.rows(),
        threshold,
        flagged,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WilksResult<T> {
    pub lambda: T,
    pub chi_square: T,
    pub df: usize,
    pub p_value: TailProbability<T>,
}

impl<T: Scalar> WilksResult<T> {
    pub fn is_significant(&self, alpha: T) -> bool {
        self.p_value.value() < alpha
    }

    pub fn verdict(&self, alpha: T) -> &'static str {
        if self.is_significant(alpha) {
            WILKS_SIGNIFICANT
        } else {
            WILKS_NOT_SIGNIFICANT
        }
    }
}

/// Wilks' Lambda `1/(1+λ)` and Bartlett's `−(n − 1 − (p+g)/2)·ln Λ` on `p(g−1)` df.
pub fn wilks_from_eigenvalue<T: Scalar>(
    eigenvalue: T,
    n: usize,
    p: usize,
    g: usize,
) -> Result<WilksResult<T>> {
    if !(eigenvalue >= T::zero()) || !eigenvalue.is_finite() {
        return Err(Error::Domain(format!(
            "eigenvalue {eigenvalue} must be finite and >= 0"
        )));
    }
    if g < 2 || p == 0 {
        return Err(Error::Domain(format!(
            "need p >= 1 and g >= 2, got p={p}, g={g}"
        )));
    }
    let factor = T::from_count(n) - T::one() - T::from_count(p + g) / T::lit(2.0);
    if !(factor > T::zero()) {
        return Err(Error::InsufficientCases(format!(
            "n={n}, p={p}, g={g} leaves a non-positive Bartlett factor"
        )));
    }
    let lambda = T::one() / (T::one() + eigenvalue);
    // ln(1/(1+λ)) = −ln(1+λ), so χ² = factor·ln(1+λ) without cancellation.
    let chi_square = factor * eigenvalue.ln_1p();
    let df = p * (g - 1);
    Ok(WilksResult {
        lambda,
        chi_square,
        df,
        p_value: chi_square_sf(chi_square, T::from_count(df))?,
    })
}

pub fn wilks_test<T: Scalar>(
    model: &DiscriminantModel<T>,
    n: usize,
    p: usize,
    g: usize,
) -> Result<WilksResult<T>> {
    wilks_from_eigenvalue(model.eigenvalue, n, p, g)
}

/// Which of Box's two F approximations applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoxBranch {
    /// `c2 > c1²`: `F = M(1 − c1 − df1/df2)/df1`.
    C2AboveC1Squared,
    /// `c2 < c1²`: `F = df2·M / (df1·(b − M))`.
    C2BelowC1Squared,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxMResult<T> {
    pub m: T,
    pub f_approx: T,
    pub df1: T,
    pub df2: T,
    pub p_value: TailProbability<T>,
    pub c1: T,
    pub c2: T,
    pub branch: BoxBranch,
}

impl<T: Scalar> BoxMResult<T> {
    pub fn is_homogeneous(&self, alpha: T) -> bool {
        self.p_value.value() >= alpha
    }

    pub fn verdict(&self, alpha: T) -> &'static str {
        if self.is_homogeneous(alpha) {
            BOX_HOMOGENEOUS
        } else {
            BOX_HETEROGENEOUS
        }
    }
}

/// Box's M for equality of group variances of a single discriminant function.
pub fn box_m_test<T: Scalar>(groups: &[Vec<T>]) -> Result<BoxMResult<T>> {
    let g = groups.len();
    if g < 2 {
        return Err(Error::InsufficientCases(format!(
            "{g} groups, need at least 2"
        )));
    }
    let mut variances = Vec::with_capacity(g);
    for (k, scores) in groups.iter().enumerate() {
        if scores.len() < 2 {
            return Err(Error::InsufficientCases(format!(
                "group {k} has {} scores, need at least 2",
                scores.len()
            )));
        }
        let v = sample_variance(scores);
        if !(v > T::zero()) {
            return Err(Error::ZeroVariance(format!(
                "discriminant scores of group {k}"
            )));
        }
        variances.push(v);
    }
    let one = T::one();
    let pf = one;
    let gf = T::from_count(g);
    let dof: Vec<T> = groups.iter().map(|s| T::from_count(s.len() - 1)).collect();
    let n_minus_g: T = dof.iter().copied().sum();
    let pooled = dof.iter().zip(&variances).map(|(&d, &v)| d * v).sum::<T>() / n_minus_g;
    let weighted_logs: T = dof.iter().zip(&variances).map(|(&d, &v)| d * v.ln()).sum();
    // Concavity of ln makes M ≥ 0; clamp away rounding below zero.
    let m = (n_minus_g * pooled.ln() - weighted_logs).max(T::zero());

    let inv: T = dof.iter().map(|&d| one / d).sum();
    let inv2: T = dof.iter().map(|&d| one / (d * d)).sum();
    let two = T::lit(2.0);
    let three = T::lit(3.0);
    let six = T::lit(6.0);
    let c1 = (inv - one / n_minus_g) * (two * pf * pf + three * pf - one)
        / (six * (pf + one) * (gf - one));
    let c2 = (inv2 - one / (n_minus_g * n_minus_g)) * (pf - one) * (pf + two) / (six * (gf - one));
    let df1 = pf * (pf + one) * (gf - one) / two;
    let c1_sq = c1 * c1;

    let (df2, f_approx, branch) = if c2 > c1_sq {
        let df2 = (df1 + two) / (c2 - c1_sq);
        let f = m * (one - c1 - df1 / df2) / df1;
        (df2, f, BoxBranch::C2AboveC1Squared)
    } else if c2 < c1_sq {
        let df2 = (df1 + two) / (c1_sq - c2);
        let b = df2 / (one - c1 + two / df2);
        if !(b > m) {
            return Err(Error::Domain(format!(
                "Box's F approximation undefined: b = {b} does not exceed M = {m}"
            )));
        }
        let f = df2 * m / (df1 * (b - m));
        (df2, f, BoxBranch::C2BelowC1Squared)
    } else {
        return Err(Error::Domain(
            "Box's F approximation undefined when c2 = c1²".into(),
        ));
    };
    let f_approx = f_approx.max(T::zero());
    Ok(BoxMResult {
        m,
        f_approx,
        df1,
        df2,
        p_value: f_sf(f_approx, df1, df2)?,
        c1,
        c2,
        branch,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CanonicalSummary<T> {
    pub eigenvalue: T,
    pub percent_variance: T,
    pub cumulative_percent: T,
    pub canonical_correlation: T,
    pub r_squared: T,
}

pub fn canonical_from_eigenvalue<T: Scalar>(eigenvalue: T) -> Result<CanonicalSummary<T>> {
    if !(eigenvalue >= T::zero()) || !eigenvalue.is_finite() {
        return Err(Error::Domain(format!(
            "eigenvalue {eigenvalue} must be finite and >= 0"
        )));
    }
    let r_squared = eigenvalue / (T::one() + eigenvalue);
    Ok(CanonicalSummary {
        eigenvalue,
        percent_variance: T::lit(100.0),
        cumulative_percent: T::lit(100.0),
        canonical_correlation: r_squared.sqrt(),
        r_squared,
    })
}

pub fn canonical_summary<T: Scalar>(model: &DiscriminantModel<T>) -> Result<CanonicalSummary<T>> {
    canonical_from_eigenvalue(model.eigenvalue)
}
