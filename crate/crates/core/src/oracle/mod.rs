//! Exact optimal type-I error at finite blocklength.
//!
//! All tests here are permutation invariant, so they act on type classes.
//! Type-II budgets are passed as `ln μ` so that `μ = exp(−nR)` survives large
//! `n`, and both `ln α̂` and `ln(1 − α̂)` are accumulated directly.

mod fit;
pub mod lp;

pub use fit::{exponent_fit, ExponentSample, FitMode, FitResult};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::{assemble, family_divergence, FamilySpec};
use crate::num::{log_diff_exp, log_sum_exp};
use crate::prob::{JointPmf, RenyiOrder};
use crate::types::{compositions, PerTypeTest, TypeTable};

/// Default lattice resolution (points per binary axis) of [`member_grid`].
pub const DEFAULT_GRID_RESOLUTION: usize = 21;
/// Default limit on the number of grid members.
pub const DEFAULT_MAX_MEMBERS: usize = 20_000;

/// An optimal (or grid-optimal) test and its type-I error.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub alpha_hat: f64,
    pub log_alpha: f64,
    pub log_one_minus_alpha: f64,
    pub test: PerTypeTest,
    /// Indices of the alternatives whose type-II error equals the budget.
    pub binding: Vec<usize>,
    /// `ln β` per alternative under the returned test.
    pub log_betas: Vec<f64>,
}

fn finish(lp: &[f64], lqs: &[Vec<f64>], log_mu: f64, test: PerTypeTest) -> OracleResult {
    let log_alpha = log_sum_exp(lp.iter().zip(&test.t).filter(|(_, &t)| t < 1.0).map(|(&l, &t)| l + (-t).ln_1p()));
    let log_one_minus_alpha = log_sum_exp(lp.iter().zip(&test.t).filter(|(_, &t)| t > 0.0).map(|(&l, &t)| l + t.ln()));
    let log_betas: Vec<f64> = lqs
        .iter()
        .map(|lq| log_sum_exp(lq.iter().zip(&test.t).filter(|(_, &t)| t > 0.0).map(|(&l, &t)| l + t.ln())))
        .collect();
    let binding = log_betas
        .iter()
        .enumerate()
        .filter(|(_, &b)| b >= log_mu + (-1e-9f64).ln_1p())
        .map(|(i, _)| i)
        .collect();
    OracleResult { alpha_hat: log_alpha.exp(), log_alpha, log_one_minus_alpha, test, binding, log_betas }
}

/// Neyman–Pearson: the minimum of `α` over all tests with `β(Q^{×n}) ≤ μ`.
///
/// Types are accepted in decreasing order of the likelihood ratio (ties broken
/// by the type order); the first type that does not fit the remaining budget
/// is accepted with the fractional probability that exhausts it.
pub fn np_simple(p: &JointPmf<f64>, q: &JointPmf<f64>, n: usize, log_mu: f64, cap: u64) -> Result<OracleResult> {
    if log_mu.is_nan() {
        return Err(Error::InvalidArgument("ln μ is NaN".into()));
    }
    let table = TypeTable::for_family(p, &FamilySpec::Singleton { q: q.clone() }, n, cap)?;
    let lp = table.log_p_class();
    let lq = table.log_class_mass(q)?;
    let mut t = vec![0.0; table.len()];
    if log_mu >= 0.0 {
        t.iter_mut().for_each(|v| *v = 1.0);
    } else {
        let mut order: Vec<usize> = (0..table.len()).filter(|&i| lp[i] > f64::NEG_INFINITY).collect();
        // stable sort keeps the type order among equal ratios
        order.sort_by(|&i, &j| (lp[j] - lq[j]).total_cmp(&(lp[i] - lq[i])));
        let mut spent = f64::NEG_INFINITY;
        for i in order {
            let next = log_sum_exp([spent, lq[i]]);
            if next <= log_mu {
                t[i] = 1.0;
                spent = next;
            } else {
                t[i] = (log_diff_exp(log_mu, spent) - lq[i]).exp().clamp(0.0, 1.0);
                break;
            }
        }
    }
    let test = PerTypeTest { n, t, threshold: None };
    Ok(finish(&lp, &[lq], log_mu, test))
}

/// Minimum of `α` over permutation-invariant tests subject to `β(Q^{×n}) ≤ μ`
/// for every `Q` in `members`, by linear programming over per-type acceptance
/// probabilities. When the members are a subset of the family this is a lower
/// bound on the composite optimum.
pub fn composite_lp(
    p: &JointPmf<f64>,
    family: &FamilySpec<f64>,
    n: usize,
    log_mu: f64,
    members: &[JointPmf<f64>],
    cap: u64,
) -> Result<OracleResult> {
    if members.is_empty() {
        return Err(Error::InvalidArgument("member grid is empty".into()));
    }
    let table = TypeTable::for_family(p, family, n, cap)?;
    let lp = table.log_p_class();
    let lqs = members.iter().map(|q| table.log_class_mass(q)).collect::<Result<Vec<_>>>()?;
    if log_mu >= 0.0 {
        let test = PerTypeTest { n, t: vec![1.0; table.len()], threshold: None };
        return Ok(finish(&lp, &lqs, log_mu, test));
    }
    // types the null never produces are rejected outright
    let live: Vec<usize> = (0..table.len()).filter(|&i| lp[i] > f64::NEG_INFINITY).collect();
    let c: Vec<f64> = live.iter().map(|&i| lp[i].exp()).collect();
    let mut a: Vec<Vec<f64>> = lqs.iter().map(|lq| live.iter().map(|&i| (lq[i] - log_mu).exp()).collect()).collect();
    let mut b = vec![1.0; members.len()];
    for k in 0..live.len() {
        let mut row = vec![0.0; live.len()];
        row[k] = 1.0;
        a.push(row);
        b.push(1.0);
    }
    let sol = lp::maximize(&c, &a, &b)?;
    let mut t = vec![0.0; table.len()];
    for (k, &i) in live.iter().enumerate() {
        t[i] = sol.x[k].clamp(0.0, 1.0);
    }
    let test = PerTypeTest { n, t, threshold: None };
    Ok(finish(&lp, &lqs, log_mu, test))
}

/// Lattice points of the probability simplex of dimension `d` with `res` points per edge.
fn simplex_lattice(d: usize, res: usize) -> Vec<Vec<f64>> {
    let steps = res - 1;
    compositions(d, steps).into_iter().map(|c| c.iter().map(|&k| k as f64 / steps as f64).collect()).collect()
}

fn lattice_product(lattices: &[Vec<Vec<f64>>], max_members: usize) -> Result<Vec<Vec<Vec<f64>>>> {
    let count: f64 = lattices.iter().map(|l| l.len() as f64).product();
    if count > max_members as f64 {
        return Err(Error::CapacityExceeded { count, cap: max_members as u64 });
    }
    let mut out: Vec<Vec<Vec<f64>>> = vec![Vec::new()];
    for l in lattices {
        let mut next = Vec::with_capacity(out.len() * l.len());
        for prefix in &out {
            for point in l {
                let mut v = prefix.clone();
                v.push(point.clone());
                next.push(v);
            }
        }
        out = next;
    }
    Ok(out)
}

/// Explicit members of a family on a lattice over its free components, plus
/// the order-one minimizer. `resolution` is the number of lattice points per
/// edge of each free simplex.
pub fn member_grid(
    p: &JointPmf<f64>,
    family: &FamilySpec<f64>,
    resolution: usize,
    max_members: usize,
) -> Result<Vec<JointPmf<f64>>> {
    if resolution < 2 {
        return Err(Error::InvalidArgument("grid resolution must be at least 2".into()));
    }
    family.validate(p)?;
    let shape = p.shape();
    let size = |g: &[usize]| g.iter().map(|&a| shape[a]).product::<usize>();
    let mut members = vec![family_divergence(p, family, RenyiOrder::One)?.assembled];
    let axes = p.axes();
    match family {
        FamilySpec::Singleton { .. } => {}
        FamilySpec::FixedMarginalProduct { fixed, fixed_axes, free_axes } => {
            for q in lattice_product(&[simplex_lattice(size(free_axes), resolution)], max_members)? {
                let groups = [fixed_axes.clone(), free_axes.clone()];
                members.push(assemble(axes, &groups, |c| fixed.probs()[c[0]] * q[0][c[1]]));
            }
        }
        FamilySpec::GeneralProduct { .. } => {
            let blocks = family.blocks();
            let lattices: Vec<_> = blocks.iter().map(|b| simplex_lattice(size(b), resolution)).collect();
            for qs in lattice_product(&lattices, max_members)? {
                members.push(assemble(axes, &blocks, |c| (0..qs.len()).map(|i| qs[i][c[i]]).product()));
            }
        }
        FamilySpec::MarkovRecovery { x, y, z } => {
            let (dy, dz) = (size(y), size(z));
            let pxy = p.regroup(&[x.clone(), y.clone()])?.data;
            let lattices = vec![simplex_lattice(dz, resolution); dy];
            let groups = [x.clone(), y.clone(), z.clone()];
            for rows in lattice_product(&lattices, max_members)? {
                members.push(assemble(axes, &groups, |c| pxy[c[0] * dy + c[1]] * rows[c[1]][c[2]]));
            }
        }
        FamilySpec::MarkovAll { x, y, z } => {
            let (dx, dy, dz) = (size(x), size(y), size(z));
            let mut lattices = vec![simplex_lattice(dy, resolution)];
            lattices.extend(vec![simplex_lattice(dx, resolution); dy]);
            lattices.extend(vec![simplex_lattice(dz, resolution); dy]);
            let groups = [x.clone(), y.clone(), z.clone()];
            for qs in lattice_product(&lattices, max_members)? {
                members.push(assemble(axes, &groups, |c| qs[0][c[1]] * qs[1 + c[1]][c[0]] * qs[1 + dy + c[1]][c[2]]));
            }
        }
    }
    Ok(members)
}
