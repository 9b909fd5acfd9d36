//! Independent oracles and fixture loaders shared by the integration tests.
//! Nothing here calls into the numeric routines under test.

#![allow(dead_code)]

use std::path::PathBuf;

use distress_lda::{parse_panel, GroupLabel, ModelFile, Record};

pub fn data_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
}

pub fn read_data(name: &str) -> String {
    std::fs::read_to_string(data_path(name))
        .unwrap_or_else(|e| panic!("reading fixture {name}: {e}"))
}

pub fn panel(name: &str) -> Vec<Record> {
    parse_panel(&read_data(name)).expect("fixture parses")
}

pub fn published_model() -> ModelFile {
    ModelFile::from_json(&read_data("paper_model.json")).expect("model fixture loads")
}

/// Printed discriminant scores of the fourteen training banks, bankrupt first.
pub fn published_scores() -> Vec<(GroupLabel, f64)> {
    published_model()
        .training
        .expect("fixture carries training scores")
        .scores
        .iter()
        .map(|s| (s.label, s.score))
        .collect()
}

/// Gaussian elimination with partial pivoting on a dense copy.
pub fn eliminate(a: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .zip(b)
        .map(|(row, &bi)| {
            let mut r = row.clone();
            r.push(bi);
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| m[i][col].abs().partial_cmp(&m[j][col].abs()).unwrap())
            .unwrap();
        m.swap(col, pivot);
        for row in (col + 1)..n {
            let f = m[row][col] / m[col][col];
            let pivot_row = m[col].clone();
            for (x, p) in m[row][col..].iter_mut().zip(&pivot_row[col..]) {
                *x -= f * p;
            }
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = ((i + 1)..n).map(|k| m[i][k] * x[k]).sum();
        x[i] = (m[i][n] - s) / m[i][i];
    }
    x
}

/// Brute-force two-group quantities computed from first principles.
pub struct BruteLda {
    pub within: Vec<Vec<f64>>,
    pub means: [Vec<f64>; 2],
    pub sizes: [usize; 2],
    /// `S_w⁻¹(μ1 − μ0)` solved by elimination, unscaled.
    pub direction: Vec<f64>,
    /// Fisher weights and constants for (bankrupt, nonbankrupt).
    pub fisher: [(Vec<f64>, f64); 2],
}

pub fn brute_lda(rows: &[Vec<f64>], labels: &[GroupLabel], priors: [f64; 2]) -> BruteLda {
    let p = rows[0].len();
    let mut sums = [vec![0.0; p], vec![0.0; p]];
    let mut sizes = [0usize; 2];
    for (r, l) in rows.iter().zip(labels) {
        let g = l.index();
        sizes[g] += 1;
        for j in 0..p {
            sums[g][j] += r[j];
        }
    }
    let means = [0, 1].map(|g| {
        sums[g]
            .iter()
            .map(|s| s / sizes[g] as f64)
            .collect::<Vec<_>>()
    });
    let mut within = vec![vec![0.0; p]; p];
    for (r, l) in rows.iter().zip(labels) {
        let mu = &means[l.index()];
        for i in 0..p {
            for j in 0..p {
                within[i][j] += (r[i] - mu[i]) * (r[j] - mu[j]);
            }
        }
    }
    let dof = (rows.len() - 2) as f64;
    for row in within.iter_mut() {
        for v in row.iter_mut() {
            *v /= dof;
        }
    }
    let diff: Vec<f64> = (0..p).map(|j| means[1][j] - means[0][j]).collect();
    let direction = eliminate(&within, &diff);
    let fisher = [0, 1].map(|g| {
        let w = eliminate(&within, &means[g]);
        let quad: f64 = w.iter().zip(&means[g]).map(|(a, b)| a * b).sum();
        (w, -0.5 * quad + priors[g].ln())
    });
    BruteLda {
        within,
        means,
        sizes,
        direction,
        fisher,
    }
}

impl BruteLda {
    pub fn fisher_classify(&self, z: &[f64]) -> GroupLabel {
        let value = |g: usize| -> f64 {
            let (w, c) = &self.fisher[g];
            w.iter().zip(z).map(|(a, b)| a * b).sum::<f64>() + c
        };
        if value(0) > value(1) {
            GroupLabel::Bankrupt
        } else {
            GroupLabel::NonBankrupt
        }
    }
}

pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    dot / (na * nb)
}

/// Composite 8-point Gauss–Legendre rule over `[lo, hi]` with `panels` panels.
pub fn integrate(f: impl Fn(f64) -> f64, lo: f64, hi: f64, panels: usize) -> f64 {
    const NODES: [f64; 4] = [
        0.183_434_642_495_649_8,
        0.525_532_409_916_329,
        0.796_666_477_413_626_7,
        0.960_289_856_497_536_3,
    ];
    const WEIGHTS: [f64; 4] = [
        0.362_683_783_378_362,
        0.313_706_645_877_887_3,
        0.222_381_034_453_374_5,
        0.101_228_536_290_376_3,
    ];
    let h = (hi - lo) / panels as f64;
    let mut total = 0.0;
    for k in 0..panels {
        let mid = lo + (k as f64 + 0.5) * h;
        let half = 0.5 * h;
        for (x, w) in NODES.iter().zip(WEIGHTS) {
            total += w * (f(mid - half * x) + f(mid + half * x));
        }
    }
    total * 0.5 * h
}

/// ln Γ(x) by upward recurrence to x ≥ 20 and the Stirling series.
pub fn stirling_ln_gamma(x: f64) -> f64 {
    let mut shift = 0.0;
    let mut z = x;
    while z < 20.0 {
        shift += z.ln();
        z += 1.0;
    }
    let inv = 1.0 / z;
    let inv2 = inv * inv;
    let series = inv
        * (1.0 / 12.0
            - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 * (1.0 / 1680.0 - inv2 / 1188.0))));
    (z - 0.5) * z.ln() - z + 0.5 * (2.0 * std::f64::consts::PI).ln() + series - shift
}

/// χ² upper tail by quadrature of the density from `x` outward.
pub fn chi_square_sf_oracle(x: f64, df: f64) -> f64 {
    let a = 0.5 * df;
    let ln_norm = -stirling_ln_gamma(a);
    let t0 = 0.5 * x;
    // Past the mode a − 1, twenty standard deviations plus 70 units leave
    // a negligible remainder.
    let hi = t0.max(a) + 70.0 + 20.0 * a.sqrt();
    let panels = ((hi - t0) * 50.0) as usize;
    integrate(|t| ((a - 1.0) * t.ln() - t + ln_norm).exp(), t0, hi, panels)
}

/// F upper tail as the incomplete beta integral `I_y(d2/2, d1/2)`, `y = d2/(d2 + d1·x)`.
/// Intended for `d1, d2 ≥ 2`, where the integrand is smooth on `[0, y]`.
pub fn f_sf_oracle(x: f64, d1: f64, d2: f64) -> f64 {
    let (a, b) = (0.5 * d2, 0.5 * d1);
    let y = d2 / (d2 + d1 * x);
    let ln_beta = stirling_ln_gamma(a) + stirling_ln_gamma(b) - stirling_ln_gamma(a + b);
    integrate(
        |t| ((a - 1.0) * t.ln() + (b - 1.0) * (1.0 - t).ln() - ln_beta).exp(),
        0.0,
        y,
        4000,
    )
}

/// Two-pass sample variance.
pub fn variance(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0)
}
