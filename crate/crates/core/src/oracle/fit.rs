use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FitMode {
    /// Fit `−ln α̂` against `n`.
    Error,
    /// Fit `−ln(1 − α̂)` against `n`.
    StrongConverse,
}

/// One oracle outcome, with both logs kept so that tiny `α̂` or `1 − α̂` are exact.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentSample {
    pub n: usize,
    pub log_alpha: f64,
    pub log_one_minus_alpha: f64,
}

impl ExponentSample {
    pub fn from_alpha(n: usize, alpha: f64) -> Self {
        Self { n, log_alpha: alpha.ln(), log_one_minus_alpha: (-alpha).ln_1p() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    /// Coefficient of `ln n`, when that regressor was used.
    pub log_n_coef: Option<f64>,
    /// Root mean square residual.
    pub residual: f64,
    pub points_used: usize,
}

/// Least-squares slope of `−ln α̂` (or `−ln(1 − α̂)`) against `n`, optionally
/// with a `ln n` regressor. Points with `α̂ ∈ {0, 1}` are dropped.
pub fn exponent_fit(samples: &[ExponentSample], mode: FitMode, log_n_regressor: bool) -> Result<FitResult> {
    let pts: Vec<(f64, f64)> = samples
        .iter()
        .filter(|p| p.log_alpha.is_finite() && p.log_one_minus_alpha.is_finite())
        .map(|p| {
            let y = match mode {
                FitMode::Error => -p.log_alpha,
                FitMode::StrongConverse => -p.log_one_minus_alpha,
            };
            (p.n as f64, y)
        })
        .collect();
    let k = if log_n_regressor { 3 } else { 2 };
    if pts.len() < 3 || pts.len() < k {
        return Err(Error::InsufficientPoints { needed: 3.max(k), found: pts.len() });
    }
    let row = |n: f64| {
        let mut r = vec![1.0, n];
        if log_n_regressor {
            r.push(n.ln());
        }
        r
    };
    // normal equations, solved by Gaussian elimination with partial pivoting
    let mut ata = vec![vec![0.0; k]; k];
    let mut aty = vec![0.0; k];
    for &(n, y) in &pts {
        let r = row(n);
        for i in 0..k {
            aty[i] += r[i] * y;
            for j in 0..k {
                ata[i][j] += r[i] * r[j];
            }
        }
    }
    let coef = solve(ata, aty).ok_or_else(|| Error::InvalidArgument("fit design matrix is singular".into()))?;
    let sse: f64 = pts
        .iter()
        .map(|&(n, y)| {
            let fit: f64 = row(n).iter().zip(&coef).map(|(a, c)| a * c).sum();
            (y - fit).powi(2)
        })
        .sum();
    Ok(FitResult {
        intercept: coef[0],
        slope: coef[1],
        log_n_coef: log_n_regressor.then(|| coef[2]),
        residual: (sse / pts.len() as f64).sqrt(),
        points_used: pts.len(),
    })
}

fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let k = b.len();
    for col in 0..k {
        let piv = (col..k).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..k {
            let f = a[r][col] / a[col][col];
            for c in col..k {
                a[r][c] -= f * a[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; k];
    for i in (0..k).rev() {
        let s: f64 = (i + 1..k).map(|j| a[i][j] * x[j]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    Some(x)
}
