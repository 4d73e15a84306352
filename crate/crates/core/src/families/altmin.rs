//! Alternating minimization for the product and Markov families.
//!
//! Every block update is exact: with the other blocks frozen, the optimal block
//! is proportional to `(Σ P^s · rest^{1-s})^{1/s}`, which is Sibson's minimizer
//! with the frozen blocks playing the role of the fixed marginal.

use crate::error::{Error, Result};
use crate::num::{log_sum_exp, Real};
use crate::prob::{divergence_slices, Channel, JointPmf, Pmf, RenyiOrder};

use super::{assemble, Argmin, FamilySpec, MinimizerResult, SolverOptions};

/// Normalizes log weights into probabilities; `-inf` entries become zero.
fn normalize_log<T: Real>(logs: &[T]) -> Vec<T> {
    let total = log_sum_exp(logs.iter().copied());
    logs.iter().map(|&l| (l - total).exp()).collect()
}

/// Replaces `dst` by `src` and returns the largest entrywise change.
fn replace<T: Real>(dst: &mut [T], src: &[T]) -> T {
    let mut change = T::zero();
    for (d, &s) in dst.iter_mut().zip(src) {
        change = change.max((*d - s).abs());
        *d = s;
    }
    change
}

/// Per-bucket `log Σ exp` of `(bucket, value)` pairs.
fn bucket_log_sum_exp<T: Real>(buckets: usize, terms: &[(usize, T)]) -> Vec<T> {
    let mut max = vec![T::neg_infinity(); buckets];
    for &(b, v) in terms {
        max[b] = max[b].max(v);
    }
    let mut acc = vec![T::zero(); buckets];
    for &(b, v) in terms {
        acc[b] = acc[b] + (v - max[b]).exp();
    }
    max.iter().zip(&acc).map(|(&m, &a)| if m == T::neg_infinity() { m } else { m + a.ln() }).collect()
}

/// Minimizes `D_s(P‖Q_1 × … × Q_m)` over all product members of a
/// [`FamilySpec::GeneralProduct`] family.
///
/// Starts at the marginals of `P`, sweeps the blocks in order and stops when no
/// entry moves by more than `opts.tol` in a sweep. If `opts.max_sweeps` is hit
/// first, the last iterate is returned with `converged = false`.
pub fn alt_min_product<T: Real>(
    p: &JointPmf<T>,
    family: &FamilySpec<T>,
    order: RenyiOrder<T>,
    opts: &SolverOptions<T>,
) -> Result<MinimizerResult<T>> {
    if !matches!(family, FamilySpec::GeneralProduct { .. }) {
        return Err(Error::InvalidArgument(format!("alt_min_product needs a general product, got {}", family.name())));
    }
    family.validate(p)?;
    let within_validity = family.check_order(order, opts.allow_outside_validity)?;
    let blocks = family.blocks();
    let grouped = p.regroup(&blocks)?;
    let m = blocks.len();

    let mut factors: Vec<Vec<T>> = (0..m).map(|j| p.group_marginal(&blocks[j]).map(|f| f.probs().to_vec())).collect::<Result<_>>()?;
    let mut iterations = 0;
    let mut converged = true;

    if let RenyiOrder::Finite(s) = order {
        // support entries with their block coordinates and s·log P
        let entries: Vec<(Vec<usize>, T)> = grouped
            .data
            .iter()
            .enumerate()
            .filter(|(_, &v)| v > T::zero())
            .map(|(i, &v)| (grouped.coords(i), s * v.ln()))
            .collect();
        let one_minus = T::one() - s;
        let mut terms = Vec::with_capacity(entries.len());
        converged = false;
        while iterations < opts.max_sweeps {
            iterations += 1;
            let mut change = T::zero();
            for j in 0..m {
                terms.clear();
                for (c, slp) in &entries {
                    let rest: T = (0..m).filter(|&i| i != j).map(|i| factors[i][c[i]].ln()).sum();
                    terms.push((c[j], *slp + one_minus * rest));
                }
                let logc = bucket_log_sum_exp(grouped.dims[j], &terms);
                let scaled: Vec<T> = logc.iter().map(|&l| l / s).collect();
                change = change.max(replace(&mut factors[j], &normalize_log(&scaled)));
            }
            if change < opts.tol {
                converged = true;
                break;
            }
        }
    }

    let assembled = assemble(p.axes(), &blocks, |c| (0..m).map(|i| factors[i][c[i]]).fold(T::one(), |a, b| a * b));
    let divergence = divergence_slices(p.probs(), assembled.probs(), order);
    let factors = blocks
        .iter()
        .zip(factors)
        .map(|(b, f)| Ok(Pmf::from_unnormalized(p.group_alphabet(b)?, f)))
        .collect::<Result<Vec<_>>>()?;
    Ok(MinimizerResult {
        value: divergence,
        divergence,
        argmin: Argmin::Product { factors },
        assembled,
        iterations,
        converged,
        within_validity,
    })
}

/// Minimizes `D_s(P_XYZ‖Q_Y × Q_{X|Y} × Q_{Z|Y})` over all Markov chains of a
/// [`FamilySpec::MarkovAll`] family.
///
/// For each `y` the two channel rows are updated alternately; `Q_Y` then has
/// the closed form `Q_Y(y) ∝ (Σ_{x,z} P^s (Q_{X|y} Q_{Z|y})^{1-s})^{1/s}`.
/// Stopping rules as in [`alt_min_product`].
pub fn alt_min_markov<T: Real>(
    p: &JointPmf<T>,
    family: &FamilySpec<T>,
    order: RenyiOrder<T>,
    opts: &SolverOptions<T>,
) -> Result<MinimizerResult<T>> {
    let FamilySpec::MarkovAll { x, y, z } = family else {
        return Err(Error::InvalidArgument(format!("alt_min_markov needs the Markov family, got {}", family.name())));
    };
    family.validate(p)?;
    let within_validity = family.check_order(order, opts.allow_outside_validity)?;
    let blocks = [x.clone(), y.clone(), z.clone()];
    let g = p.regroup(&blocks)?;
    let (dx, dy, dz) = (g.dims[0], g.dims[1], g.dims[2]);
    let at = |xx: usize, yy: usize, zz: usize| g.data[(xx * dy + yy) * dz + zz];

    let mut qy: Vec<T> = (0..dy).map(|yy| (0..dx).flat_map(|xx| (0..dz).map(move |zz| (xx, zz))).map(|(xx, zz)| at(xx, yy, zz)).sum()).collect();
    let mut qx: Vec<Vec<T>> = (0..dy).map(|yy| (0..dx).map(|xx| (0..dz).map(|zz| at(xx, yy, zz)).sum::<T>() / qy[yy]).collect()).collect();
    let mut qz: Vec<Vec<T>> = (0..dy).map(|yy| (0..dz).map(|zz| (0..dx).map(|xx| at(xx, yy, zz)).sum::<T>() / qy[yy]).collect()).collect();
    let mut iterations = 0;
    let mut converged = true;

    if let RenyiOrder::Finite(s) = order {
        let one_minus = T::one() - s;
        // log Σ_j P(i,j)^s Q(j)^{1-s} over the support, then the 1/s power
        let row_update = |pairs: &mut dyn Iterator<Item = (T, T)>| -> T {
            let terms = pairs.filter(|&(pv, _)| pv > T::zero()).map(|(pv, qv)| s * pv.ln() + one_minus * qv.ln());
            log_sum_exp(terms) / s
        };
        converged = false;
        while iterations < opts.max_sweeps {
            iterations += 1;
            let mut change = T::zero();
            for yy in 0..dy {
                let logs: Vec<T> = (0..dx).map(|xx| row_update(&mut (0..dz).map(|zz| (at(xx, yy, zz), qz[yy][zz])))).collect();
                change = change.max(replace(&mut qx[yy], &normalize_log(&logs)));
                let logs: Vec<T> = (0..dz).map(|zz| row_update(&mut (0..dx).map(|xx| (at(xx, yy, zz), qx[yy][xx])))).collect();
                change = change.max(replace(&mut qz[yy], &normalize_log(&logs)));
            }
            let logs: Vec<T> = (0..dy)
                .map(|yy| {
                    row_update(&mut (0..dx).flat_map(|xx| (0..dz).map(move |zz| (xx, zz))).map(|(xx, zz)| (at(xx, yy, zz), qx[yy][xx] * qz[yy][zz])))
                })
                .collect();
            change = change.max(replace(&mut qy, &normalize_log(&logs)));
            if change < opts.tol {
                converged = true;
                break;
            }
        }
    }

    let assembled = assemble(p.axes(), &blocks, |c| qy[c[1]] * qx[c[1]][c[0]] * qz[c[1]][c[2]]);
    let divergence = divergence_slices(p.probs(), assembled.probs(), order);
    let (ax, ay, az) = (p.group_alphabet(x)?, p.group_alphabet(y)?, p.group_alphabet(z)?);
    let argmin = Argmin::Markov {
        y: Pmf::from_unnormalized(ay.clone(), qy),
        x_given_y: Channel::from_parts_unchecked(ay.clone(), ax, qx.concat()),
        z_given_y: Channel::from_parts_unchecked(ay, az, qz.concat()),
    };
    Ok(MinimizerResult { value: divergence, divergence, argmin, assembled, iterations, converged, within_validity })
}
