//! Correlation coefficients and ordinary least squares.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};

fn check_pair(xs: &[f64], ys: &[f64]) -> Result<()> {
    if xs.len() != ys.len() {
        return Err(Error::DegenerateInput(format!(
            "length mismatch: {} vs {}",
            xs.len(),
            ys.len()
        )));
    }
    if xs.len() < 3 {
        return Err(Error::DegenerateInput(format!(
            "need at least 3 points, got {}",
            xs.len()
        )));
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(Error::DegenerateInput("non-finite value".into()));
    }
    Ok(())
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample Pearson correlation coefficient.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64> {
    check_pair(xs, ys)?;
    let (mx, my) = (mean(xs), mean(ys));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (&x, &y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::DegenerateInput("zero variance".into()));
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// 1-based ranks in ascending order; tied values share the mean of the
/// ranks they span.
pub fn fractional_ranks(xs: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..xs.len()).collect();
    idx.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut ranks = vec![0.0; xs.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i + 1;
        while j < idx.len() && xs[idx[j]] == xs[idx[i]] {
            j += 1;
        }
        // positions i..j hold ranks i+1..=j
        let rank = (i + 1 + j) as f64 / 2.0;
        for &k in &idx[i..j] {
            ranks[k] = rank;
        }
        i = j;
    }
    ranks
}

/// Spearman's rank correlation: Pearson over fractional ranks.
pub fn spearman(xs: &[f64], ys: &[f64]) -> Result<f64> {
    check_pair(xs, ys)?;
    pearson(&fractional_ranks(xs), &fractional_ranks(ys))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LinearFit {
    pub weights: Vec<f64>,
    pub intercept: f64,
}

impl LinearFit {
    pub fn predict(&self, features: &[f64]) -> f64 {
        self.intercept
            + self
                .weights
                .iter()
                .zip(features)
                .map(|(w, x)| w * x)
                .sum::<f64>()
    }
}

/// Ordinary least squares with an intercept. `features` holds one row per
/// observation.
///
/// Columns are standardized before the SVD so the rank test does not
/// depend on feature units.
pub fn fit_linear(features: &[Vec<f64>], targets: &[f64]) -> Result<LinearFit> {
    let n = features.len();
    if n != targets.len() {
        return Err(Error::DegenerateInput(format!(
            "{n} feature rows but {} targets",
            targets.len()
        )));
    }
    let p = features.first().map_or(0, Vec::len);
    if features.iter().any(|row| row.len() != p) {
        return Err(Error::DegenerateInput("ragged feature matrix".into()));
    }
    if features
        .iter()
        .flatten()
        .chain(targets)
        .any(|v| !v.is_finite())
    {
        return Err(Error::DegenerateInput("non-finite value".into()));
    }
    if n < p + 1 || n == 0 {
        return Err(Error::RankDeficient);
    }

    let mut centers = vec![0.0; p];
    let mut scales = vec![0.0; p];
    for j in 0..p {
        let col: Vec<f64> = features.iter().map(|r| r[j]).collect();
        centers[j] = mean(&col);
        scales[j] = (col.iter().map(|x| (x - centers[j]).powi(2)).sum::<f64>() / n as f64).sqrt();
        if scales[j] == 0.0 {
            return Err(Error::RankDeficient);
        }
    }
    let ty = mean(targets);
    let x = DMatrix::from_fn(n, p, |i, j| (features[i][j] - centers[j]) / scales[j]);
    let y = DVector::from_iterator(n, targets.iter().map(|t| t - ty));

    let svd = x.svd(true, true);
    let largest = svd.singular_values.max();
    let eps = largest * (n.max(p) as f64) * f64::EPSILON * 16.0;
    if p > 0 && svd.rank(eps) < p {
        return Err(Error::RankDeficient);
    }
    let beta = svd
        .solve(&y, eps)
        .map_err(|e| Error::DegenerateInput(e.to_string()))?;

    let weights: Vec<f64> = (0..p).map(|j| beta[j] / scales[j]).collect();
    let intercept = ty
        - weights
            .iter()
            .zip(&centers)
            .map(|(w, c)| w * c)
            .sum::<f64>();
    Ok(LinearFit { weights, intercept })
}
