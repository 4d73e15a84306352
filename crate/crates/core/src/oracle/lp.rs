//! Dense tableau simplex for `max c·x  s.t.  A x ≤ b, x ≥ 0` with `b ≥ 0`.
//!
//! Pivots by largest reduced cost and falls back to Bland's rule for the rest
//! of the solve once a run of degenerate pivots is seen.

use crate::error::{Error, Result};

/// Absolute tolerance on reduced costs, pivots and feasibility.
pub const LP_TOL: f64 = 1e-10;
const DEGENERATE_STREAK: usize = 50;
const MAX_PIVOTS: usize = 200_000;

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    pub pivots: usize,
    pub used_bland: bool,
}

pub fn maximize(c: &[f64], a: &[Vec<f64>], b: &[f64]) -> Result<LpSolution> {
    let (m, n) = (a.len(), c.len());
    if b.len() != m || a.iter().any(|row| row.len() != n) {
        return Err(Error::InvalidArgument("LP dimensions do not match".into()));
    }
    if b.iter().any(|&v| v.is_nan() || v < 0.0) {
        return Err(Error::InvalidArgument("LP right-hand side must be nonnegative".into()));
    }
    let width = n + m + 1;
    // rows 0..m are constraints, row m is the objective (reduced costs, negated value in the rhs)
    let mut tab = vec![0.0; (m + 1) * width];
    for i in 0..m {
        tab[i * width..i * width + n].copy_from_slice(&a[i]);
        tab[i * width + n + i] = 1.0;
        tab[i * width + width - 1] = b[i];
    }
    tab[m * width..m * width + n].copy_from_slice(c);
    let mut basis: Vec<usize> = (n..n + m).collect();

    let mut bland = false;
    let mut streak = 0;
    let mut pivots = 0;
    loop {
        let obj = &tab[m * width..m * width + width - 1];
        let entering = if bland {
            obj.iter().position(|&r| r > LP_TOL)
        } else {
            obj.iter()
                .enumerate()
                .filter(|(_, &r)| r > LP_TOL)
                .max_by(|x, y| x.1.total_cmp(y.1).then(y.0.cmp(&x.0)))
                .map(|(j, _)| j)
        };
        let Some(col) = entering else { break };

        let mut leave: Option<(usize, f64)> = None;
        for i in 0..m {
            let aij = tab[i * width + col];
            if aij > LP_TOL {
                let ratio = tab[i * width + width - 1] / aij;
                let better = match leave {
                    None => true,
                    Some((r, best)) => {
                        ratio < best - LP_TOL || (ratio <= best + LP_TOL && basis[i] < basis[r])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((row, ratio)) = leave else {
            return Err(Error::InvalidArgument("LP is unbounded".into()));
        };

        if ratio <= LP_TOL {
            streak += 1;
            if streak >= DEGENERATE_STREAK {
                bland = true;
            }
        } else {
            streak = 0;
        }

        let piv = tab[row * width + col];
        for v in &mut tab[row * width..(row + 1) * width] {
            *v /= piv;
        }
        let pivot_row: Vec<f64> = tab[row * width..(row + 1) * width].to_vec();
        for i in 0..=m {
            if i == row {
                continue;
            }
            let f = tab[i * width + col];
            if f != 0.0 {
                for (v, &p) in tab[i * width..(i + 1) * width].iter_mut().zip(&pivot_row) {
                    *v -= f * p;
                }
            }
        }
        basis[row] = col;
        pivots += 1;
        if pivots > MAX_PIVOTS {
            return Err(Error::InvalidArgument("LP pivot limit reached".into()));
        }
    }

    let mut x = vec![0.0; n];
    for (i, &j) in basis.iter().enumerate() {
        if j < n {
            x[j] = tab[i * width + width - 1].max(0.0);
        }
    }
    let objective = c.iter().zip(&x).map(|(a, b)| a * b).sum();
    Ok(LpSolution { x, objective, pivots, used_bland: bland })
}
