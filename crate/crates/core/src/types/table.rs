//! Per-type evaluation of the universal likelihood-ratio test for a family.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::FamilySpec;
use crate::num::{log_sum_exp, ExtReal};
use crate::prob::{JointPmf, RenyiOrder};

use super::{check_cap, compositions, universal_channel, LogFactorials, TypeClass};

/// Joint types of length `n` over the flattened alphabet of a null `P`, with
/// per-sequence log-probabilities under `P^{×n}` and under the family's
/// universal object `U^n`, and the log dominance constant `log v(n)`.
#[derive(Clone, Debug)]
pub struct TypeTable {
    pub n: usize,
    pub shape: Vec<usize>,
    pub types: Vec<TypeClass>,
    /// `ln P^{×n}(x^n)` for any `x^n` of the type.
    pub log_p: Vec<f64>,
    /// `ln U^n(x^n)` for any `x^n` of the type.
    pub log_u: Vec<f64>,
    pub log_v: f64,
}

fn iid_log(counts: &[u32], q: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (&c, &qi) in counts.iter().zip(q) {
        if c > 0 {
            if qi <= 0.0 {
                return f64::NEG_INFINITY;
            }
            acc += c as f64 * qi.ln();
        }
    }
    acc
}

/// Index of each flat letter within the flattened axis group.
fn group_index(shape: &[usize], group: &[usize]) -> Vec<usize> {
    let total: usize = shape.iter().product();
    (0..total)
        .map(|mut flat| {
            let mut coord = vec![0; shape.len()];
            for k in (0..shape.len()).rev() {
                coord[k] = flat % shape[k];
                flat /= shape[k];
            }
            group.iter().fold(0, |acc, &a| acc * shape[a] + coord[a])
        })
        .collect()
}

fn fold_type(counts: &[u32], index: &[usize], size: usize) -> Vec<u32> {
    let mut out = vec![0u32; size];
    for (&c, &i) in counts.iter().zip(index) {
        out[i] += c;
    }
    out
}

fn group_size(shape: &[usize], group: &[usize]) -> usize {
    group.iter().map(|&a| shape[a]).product()
}

impl TypeTable {
    /// Builds the table for `P` and a family; fails if the number of joint
    /// types exceeds `cap`.
    pub fn for_family(p: &JointPmf<f64>, family: &FamilySpec<f64>, n: usize, cap: u64) -> Result<Self> {
        family.validate(p)?;
        if n == 0 {
            return Err(Error::InvalidArgument("n must be positive".into()));
        }
        let shape = p.shape();
        let d = p.len();
        check_cap(d, n, cap)?;
        let lf = LogFactorials::new(n + d);
        let log_tn = |size: usize| lf.binomial(n + size - 1, size - 1);
        let comps = compositions(d, n);
        let log_p: Vec<f64> = comps.iter().map(|c| iid_log(c, p.probs())).collect();

        let (log_u, log_v): (Vec<f64>, f64) = match family {
            FamilySpec::Singleton { q } => (comps.iter().map(|c| iid_log(c, q.probs())).collect(), 0.0),
            FamilySpec::FixedMarginalProduct { fixed, fixed_axes, free_axes } => {
                let ia = group_index(&shape, fixed_axes);
                let ib = group_index(&shape, free_axes);
                let db = group_size(&shape, free_axes);
                let lt = log_tn(db);
                let lu = comps
                    .iter()
                    .map(|c| {
                        let t_part = iid_log(&fold_type(c, &ia, fixed.len()), fixed.probs());
                        t_part - lt - lf.multinomial(&fold_type(c, &ib, db))
                    })
                    .collect();
                (lu, lt)
            }
            FamilySpec::GeneralProduct { .. } => {
                let blocks = family.blocks();
                let idx: Vec<(Vec<usize>, usize)> =
                    blocks.iter().map(|b| (group_index(&shape, b), group_size(&shape, b))).collect();
                let lv: f64 = idx.iter().map(|(_, size)| log_tn(*size)).sum();
                let lu = comps
                    .iter()
                    .map(|c| -lv - idx.iter().map(|(ix, size)| lf.multinomial(&fold_type(c, ix, *size))).sum::<f64>())
                    .collect();
                (lu, lv)
            }
            FamilySpec::MarkovRecovery { x, y, z } => {
                let xy: Vec<usize> = x.iter().chain(y).copied().collect();
                let yz: Vec<usize> = y.iter().chain(z).copied().collect();
                let pxy = p.regroup(std::slice::from_ref(&xy))?.data;
                let ixy = group_index(&shape, &xy);
                let iyz = group_index(&shape, &yz);
                let (dy, dz) = (group_size(&shape, y), group_size(&shape, z));
                let ch = universal_channel(dy, dz, n, u64::MAX)?;
                let lu = comps
                    .iter()
                    .map(|c| iid_log(&fold_type(c, &ixy, pxy.len()), &pxy) + ch.log_prob_sequence(&fold_type(c, &iyz, dy * dz)))
                    .collect();
                (lu, ch.log_num_joint_types)
            }
            FamilySpec::MarkovAll { x, y, z } => {
                let yx: Vec<usize> = y.iter().chain(x).copied().collect();
                let yz: Vec<usize> = y.iter().chain(z).copied().collect();
                let iy = group_index(&shape, y);
                let iyx = group_index(&shape, &yx);
                let iyz = group_index(&shape, &yz);
                let (dx, dy, dz) = (group_size(&shape, x), group_size(&shape, y), group_size(&shape, z));
                let cx = universal_channel(dy, dx, n, u64::MAX)?;
                let cz = universal_channel(dy, dz, n, u64::MAX)?;
                let lty = log_tn(dy);
                let lu = comps
                    .iter()
                    .map(|c| {
                        -lty - lf.multinomial(&fold_type(c, &iy, dy))
                            + cx.log_prob_sequence(&fold_type(c, &iyx, dy * dx))
                            + cz.log_prob_sequence(&fold_type(c, &iyz, dy * dz))
                    })
                    .collect();
                (lu, lty + cx.log_num_joint_types + cz.log_num_joint_types)
            }
        };

        let types = comps
            .into_iter()
            .map(|counts| {
                let log_multiplicity = lf.multinomial(&counts);
                TypeClass { counts, log_multiplicity }
            })
            .collect();
        Ok(Self { n, shape, types, log_p, log_u, log_v })
    }

    pub fn len(&self) -> usize {
        self.types.len()
    }

    pub fn is_empty(&self) -> bool {
        self.types.is_empty()
    }

    /// `ln P^{×n}(type class)` per type.
    pub fn log_p_class(&self) -> Vec<f64> {
        self.types.iter().zip(&self.log_p).map(|(t, &lp)| t.log_multiplicity + lp).collect()
    }

    /// `ln Q^{×n}(type class)` per type for an i.i.d. member `Q` on the same axes.
    pub fn log_class_mass(&self, q: &JointPmf<f64>) -> Result<Vec<f64>> {
        if q.shape() != self.shape {
            return Err(Error::AlphabetMismatch(format!("member shape {:?} vs {:?}", q.shape(), self.shape)));
        }
        Ok(self.types.iter().map(|t| t.log_multiplicity + iid_log(&t.counts, q.probs())).collect())
    }
}

/// `D_s(P^{×n}‖U^n)`, exactly, by a sum over types.
pub fn d_s_p_u(table: &TypeTable, order: RenyiOrder<f64>) -> Result<ExtReal<f64>> {
    let live = || table.types.iter().zip(table.log_p.iter().zip(&table.log_u)).filter(|(_, (lp, _))| lp.is_finite());
    match order {
        RenyiOrder::One => {
            let mut acc = 0.0;
            for (t, (&lp, &lu)) in live() {
                if lu == f64::NEG_INFINITY {
                    return Ok(ExtReal::PosInfinity);
                }
                acc += (t.log_multiplicity + lp).exp() * (lp - lu);
            }
            Ok(ExtReal::Finite(acc))
        }
        RenyiOrder::Finite(s) => {
            let mut terms = Vec::with_capacity(table.len());
            for (t, (&lp, &lu)) in live() {
                if lu == f64::NEG_INFINITY {
                    if s > 1.0 {
                        return Ok(ExtReal::PosInfinity);
                    }
                    continue;
                }
                terms.push(t.log_multiplicity + s * lp + (1.0 - s) * lu);
            }
            Ok(ExtReal::from_float(log_sum_exp(terms) / (s - 1.0)))
        }
        _ => Err(Error::OrderOutOfRange { order: order.value(), range: "(0,∞)".into() }),
    }
}

/// Threshold `λ_n = (log v(n) + nR + (s-1)·D_s(P^{×n}‖U^n)) / s`; at order one
/// `λ_n = log v(n) + nR`.
pub fn lr_threshold(n: usize, rate: f64, order: RenyiOrder<f64>, d_s_pu: f64, log_v: f64) -> Result<f64> {
    let base = log_v + n as f64 * rate;
    match order {
        RenyiOrder::One => Ok(base),
        RenyiOrder::Finite(s) => Ok((base + (s - 1.0) * d_s_pu) / s),
        _ => Err(Error::OrderOutOfRange { order: order.value(), range: "(0,∞)".into() }),
    }
}

/// A permutation-invariant randomized test: acceptance probability per type.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerTypeTest {
    pub n: usize,
    pub t: Vec<f64>,
    pub threshold: Option<f64>,
}

/// Accepts the null on every type with `ln P^{×n} − ln U^n ≥ λ_n`.
pub fn build_lr_test(table: &TypeTable, lambda: f64) -> PerTypeTest {
    let t = table
        .log_p
        .iter()
        .zip(&table.log_u)
        .map(|(&lp, &lu)| {
            if lambda == f64::NEG_INFINITY {
                1.0
            } else if lambda == f64::INFINITY || lp == f64::NEG_INFINITY {
                0.0
            } else if lp - lu >= lambda {
                1.0
            } else {
                0.0
            }
        })
        .collect();
    PerTypeTest { n: table.n, t, threshold: Some(lambda) }
}

fn check_test(table: &TypeTable, test: &PerTypeTest) -> Result<()> {
    if test.n != table.n || test.t.len() != table.len() {
        return Err(Error::InvalidArgument(format!(
            "test for n = {} with {} types does not match table for n = {} with {} types",
            test.n,
            test.t.len(),
            table.n,
            table.len()
        )));
    }
    Ok(())
}

/// `ln α = ln Σ_λ P^{×n}(λ)(1 − t_λ)`.
pub fn log_alpha_of_test(table: &TypeTable, test: &PerTypeTest) -> Result<f64> {
    check_test(table, test)?;
    let lp = table.log_p_class();
    Ok(log_sum_exp(lp.iter().zip(&test.t).filter(|(_, &t)| t < 1.0).map(|(&l, &t)| l + (-t).ln_1p())))
}

pub fn alpha_of_test(table: &TypeTable, test: &PerTypeTest) -> Result<f64> {
    Ok(log_alpha_of_test(table, test)?.exp())
}

fn log_accepted(mass: &[f64], test: &PerTypeTest) -> f64 {
    log_sum_exp(mass.iter().zip(&test.t).filter(|(_, &t)| t > 0.0).map(|(&l, &t)| l + t.ln()))
}

/// `ln β = ln Σ_λ Q^{×n}(λ)·t_λ` for an i.i.d. member `Q`.
pub fn log_beta_iid(table: &TypeTable, test: &PerTypeTest, q: &JointPmf<f64>) -> Result<f64> {
    check_test(table, test)?;
    Ok(log_accepted(&table.log_class_mass(q)?, test))
}

pub fn beta_iid(table: &TypeTable, test: &PerTypeTest, q: &JointPmf<f64>) -> Result<f64> {
    Ok(log_beta_iid(table, test, q)?.exp())
}

/// `ln (v(n)·Σ_λ U^n(λ)·t_λ)`, an upper bound on the type-II error of every
/// permutation-invariant member of the family.
pub fn log_beta_universal_bound(table: &TypeTable, test: &PerTypeTest) -> Result<f64> {
    check_test(table, test)?;
    let mass: Vec<f64> = table.types.iter().zip(&table.log_u).map(|(t, &lu)| t.log_multiplicity + lu).collect();
    Ok(table.log_v + log_accepted(&mass, test))
}

pub fn beta_universal_bound(table: &TypeTable, test: &PerTypeTest) -> Result<f64> {
    Ok(log_beta_universal_bound(table, test)?.exp())
}
