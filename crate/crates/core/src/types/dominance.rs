//! Exhaustive pointwise checks of the universal dominance bounds on
//! symmetrized product distributions and channels.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::log_sum_exp;

use super::{log_type_count, LogFactorials};

/// Outcome of a dominance check over all sequences and members.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DominanceReport {
    pub n: usize,
    pub members: usize,
    pub points_checked: usize,
    pub violations: usize,
    /// Largest `ln Q − ln(v·U)` seen; nonpositive when the bound holds.
    pub max_log_ratio: f64,
    pub log_v: f64,
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                rec(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::with_capacity(n), &mut vec![false; n], &mut out);
    out
}

fn sequences(d: usize, n: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = d.pow(n as u32);
    (0..total).map(move |mut k| {
        let mut s = vec![0; n];
        for slot in s.iter_mut().rev() {
            *slot = k % d;
            k /= d;
        }
        s
    })
}

fn counts(seq: &[usize], d: usize) -> Vec<u32> {
    let mut c = vec![0u32; d];
    for &x in seq {
        c[x] += 1;
    }
    c
}

/// `ln (1/n!) Σ_π Π_i Q_i(x_{π(i)})`, the symmetrization of `Q_1 × … × Q_n`.
pub fn symmetrized_product_logprob(factors: &[Vec<f64>], seq: &[usize]) -> f64 {
    let perms = permutations(seq.len());
    let lf = LogFactorials::new(seq.len());
    let terms = perms.iter().map(|pi| pi.iter().enumerate().map(|(i, &j)| factors[i][seq[j]].ln()).sum::<f64>());
    log_sum_exp(terms) - lf.get(seq.len())
}

/// `ln (1/n!) Σ_π Π_i W_i(y_{π(i)} | x_{π(i)})` for row-major channels with `out_size` columns.
pub fn symmetrized_channel_logprob(channels: &[Vec<f64>], out_size: usize, x: &[usize], y: &[usize]) -> f64 {
    let perms = permutations(x.len());
    let lf = LogFactorials::new(x.len());
    let terms = perms
        .iter()
        .map(|pi| pi.iter().enumerate().map(|(i, &j)| channels[i][x[j] * out_size + y[j]].ln()).sum::<f64>());
    log_sum_exp(terms) - lf.get(x.len())
}

fn check_members(members: &[Vec<Vec<f64>>], n: usize, width: usize) -> Result<()> {
    for m in members {
        if m.len() != n || m.iter().any(|f| f.len() != width) {
            return Err(Error::InvalidArgument(format!("each member needs {n} factors of length {width}")));
        }
    }
    Ok(())
}

/// Checks `Q(x^n) ≤ |T_n|·U^n(x^n)` for every sequence and every member,
/// where each member is given by its `n` per-position factors. A point counts
/// as a violation when the ratio exceeds `1 + slack`.
pub fn distribution_dominance(d: usize, n: usize, members: &[Vec<Vec<f64>>], slack: f64) -> Result<DominanceReport> {
    check_members(members, n, d)?;
    let lf = LogFactorials::new(n);
    let log_v = log_type_count(d, n);
    let mut report =
        DominanceReport { n, members: members.len(), points_checked: 0, violations: 0, max_log_ratio: f64::NEG_INFINITY, log_v };
    for seq in sequences(d, n) {
        let log_u = -log_v - lf.multinomial(&counts(&seq, d));
        for m in members {
            let ratio = symmetrized_product_logprob(m, &seq) - (log_v + log_u);
            report.points_checked += 1;
            report.max_log_ratio = report.max_log_ratio.max(ratio);
            if ratio > slack.ln_1p() {
                report.violations += 1;
            }
        }
    }
    Ok(report)
}

/// Checks `Q(y^n|x^n) ≤ |T_n(X×Y)|·U(y^n|x^n)` for every pair of sequences and
/// every symmetrized product channel (`n` row-major `in_size × out_size` factors).
pub fn channel_dominance(
    in_size: usize,
    out_size: usize,
    n: usize,
    members: &[Vec<Vec<f64>>],
    slack: f64,
) -> Result<DominanceReport> {
    check_members(members, n, in_size * out_size)?;
    let ch = super::universal_channel(in_size, out_size, n, u64::MAX)?;
    let log_v = ch.log_num_joint_types;
    let mut report =
        DominanceReport { n, members: members.len(), points_checked: 0, violations: 0, max_log_ratio: f64::NEG_INFINITY, log_v };
    let xs: Vec<Vec<usize>> = sequences(in_size, n).collect();
    for x in &xs {
        for y in sequences(out_size, n) {
            let joint: Vec<usize> = x.iter().zip(&y).map(|(&a, &b)| a * out_size + b).collect();
            let log_u = ch.log_prob_sequence(&counts(&joint, in_size * out_size));
            for m in members {
                let ratio = symmetrized_channel_logprob(m, out_size, x, &y) - (log_v + log_u);
                report.points_checked += 1;
                report.max_log_ratio = report.max_log_ratio.max(ratio);
                if ratio > slack.ln_1p() {
                    report.violations += 1;
                }
            }
        }
    }
    Ok(report)
}
