//! Closed-form minimizers from Sibson's identity.

use crate::error::{Error, Result};
use crate::num::{log_sum_exp, ExtReal, Real};
use crate::prob::{kl_slices, log_g_slices, Channel, JointPmf, Pmf, RenyiOrder};

use super::{assemble, require_full_support, Argmin, FamilySpec, MinimizerResult};

/// Minimizes `D_s(P_XY‖T_X × Q_Y)` over `Q_Y` for a two-axis `P` (axes `X`, `Y`).
///
/// The minimizer is `Q̂_Y(y) ∝ P_Y(y)·g_s(P_{X|Y=y}‖T_X)^{1/s}`. At order one it is
/// `P_Y`. `T_X` must have full support.
pub fn sibson_minimize<T: Real>(p: &JointPmf<T>, t: &Pmf<T>, order: RenyiOrder<T>) -> Result<MinimizerResult<T>> {
    if p.num_axes() != 2 {
        return Err(Error::Axis(format!("expected a two-axis joint pmf, got {} axes", p.num_axes())));
    }
    FamilySpec::fixed_marginal(t.clone()).validate(p)?;
    sibson_grouped(p, t, &[0], &[1], order)
}

/// Per-column log weights `log (Σ_x p(x,y)^s t(x)^{1-s})^{1/s}` for a row-major
/// `dx × dy` matrix. `+inf` entries flag a support violation at `s > 1`.
fn sibson_log_weights<T: Real>(p: &[T], dx: usize, dy: usize, t: &[T], s: T) -> Vec<T> {
    let mut col = vec![T::zero(); dx];
    (0..dy)
        .map(|y| {
            for (x, c) in col.iter_mut().enumerate() {
                *c = p[x * dy + y];
            }
            log_g_slices(&col, t, s) / s
        })
        .collect()
}

pub(crate) fn sibson_grouped<T: Real>(
    p: &JointPmf<T>,
    t: &Pmf<T>,
    fixed_axes: &[usize],
    free_axes: &[usize],
    order: RenyiOrder<T>,
) -> Result<MinimizerResult<T>> {
    let groups = [fixed_axes.to_vec(), free_axes.to_vec()];
    let free_alpha = p.group_alphabet(free_axes)?;
    let tp = t.probs();
    match order {
        RenyiOrder::One => {
            let q = p.group_marginal(free_axes)?;
            let qv = q.probs().to_vec();
            let assembled = assemble(p.axes(), &groups, |c| tp[c[0]] * qv[c[1]]);
            let d = kl_slices(p.probs(), assembled.probs());
            Ok(MinimizerResult::closed_form(d, Argmin::Marginal { q }, assembled))
        }
        RenyiOrder::Finite(s) => {
            let g = p.regroup(&groups)?;
            let (dx, dy) = (g.dims[0], g.dims[1]);
            let logw = sibson_log_weights(&g.data, dx, dy, tp, s);
            if logw.iter().any(|&w| w == T::infinity()) {
                // only reachable when T_X vanishes on supp P_X with s > 1
                let q = p.group_marginal(free_axes)?;
                let qv = q.probs().to_vec();
                let assembled = assemble(p.axes(), &groups, |c| tp[c[0]] * qv[c[1]]);
                return Ok(MinimizerResult::closed_form(ExtReal::PosInfinity, Argmin::Marginal { q }, assembled));
            }
            let total = log_sum_exp(logw.iter().copied());
            let qv: Vec<T> = logw.iter().map(|&w| (w - total).exp()).collect();
            let value = ExtReal::from_float(s / (s - T::one()) * total);
            let assembled = assemble(p.axes(), &groups, |c| tp[c[0]] * qv[c[1]]);
            let q = Pmf::from_unnormalized(free_alpha, qv);
            Ok(MinimizerResult::closed_form(value, Argmin::Marginal { q }, assembled))
        }
        _ => Err(Error::OrderOutOfRange { order: order.value().as_f64(), range: "(0,∞)".into() }),
    }
}

struct Cmi<T> {
    dx: usize,
    dy: usize,
    dz: usize,
    data: Vec<T>,
}

impl<T: Real> Cmi<T> {
    fn new(p: &JointPmf<T>, x: &[usize], y: &[usize], z: &[usize]) -> Result<Self> {
        require_full_support(p, y)?;
        let g = p.regroup(&[x.to_vec(), y.to_vec(), z.to_vec()])?;
        Ok(Self { dx: g.dims[0], dy: g.dims[1], dz: g.dims[2], data: g.data })
    }

    fn at(&self, x: usize, y: usize, z: usize) -> T {
        self.data[(x * self.dy + y) * self.dz + z]
    }

    fn p_y(&self, y: usize) -> T {
        (0..self.dx).flat_map(|x| (0..self.dz).map(move |z| (x, z))).map(|(x, z)| self.at(x, y, z)).sum()
    }

    /// `P_{X|Y=y}`.
    fn x_given_y(&self, y: usize) -> Vec<T> {
        let py = self.p_y(y);
        (0..self.dx).map(|x| (0..self.dz).map(|z| self.at(x, y, z)).sum::<T>() / py).collect()
    }

    /// `P_{Z|Y=y}`.
    fn z_given_y(&self, y: usize) -> Vec<T> {
        let py = self.p_y(y);
        (0..self.dz).map(|z| (0..self.dx).map(|x| self.at(x, y, z)).sum::<T>() / py).collect()
    }
}

fn cmi_result<T: Real>(
    p: &JointPmf<T>,
    groups: [&[usize]; 3],
    value: ExtReal<T>,
    rows: Vec<T>,
) -> Result<MinimizerResult<T>> {
    let [x, y, z] = groups;
    let pxy = p.regroup(&[x.to_vec(), y.to_vec()])?;
    let dy = pxy.dims[1];
    let dz = rows.len() / dy;
    let assembled = assemble(p.axes(), &[x.to_vec(), y.to_vec(), z.to_vec()], |c| {
        pxy.data[c[0] * dy + c[1]] * rows[c[1] * dz + c[2]]
    });
    let q = Channel::from_parts_unchecked(p.group_alphabet(y)?, p.group_alphabet(z)?, rows);
    Ok(MinimizerResult::closed_form(value, Argmin::Channel { q }, assembled))
}

fn order_one_cmi<T: Real>(p: &JointPmf<T>, c: &Cmi<T>, groups: [&[usize]; 3]) -> Result<MinimizerResult<T>> {
    let rows: Vec<T> = (0..c.dy).flat_map(|y| c.z_given_y(y)).collect();
    let mut r = cmi_result(p, groups, ExtReal::Finite(T::zero()), rows)?;
    r.value = kl_slices(p.probs(), r.assembled.probs());
    r.divergence = r.value;
    Ok(r)
}

pub(crate) fn cmi_uud_grouped<T: Real>(
    p: &JointPmf<T>,
    x: &[usize],
    y: &[usize],
    z: &[usize],
    order: RenyiOrder<T>,
) -> Result<MinimizerResult<T>> {
    let c = Cmi::new(p, x, y, z)?;
    let s = match order {
        RenyiOrder::One => return order_one_cmi(p, &c, [x, y, z]),
        RenyiOrder::Finite(s) => s,
        _ => return Err(Error::OrderOutOfRange { order: order.value().as_f64(), range: "(0,∞)".into() }),
    };
    // 1/(s-1)·log Σ_y P_Y(y) (Σ_z P_{Z|y}(z) g_s(P_{X|yz}‖P_{X|y})^{1/s})^s
    let mut outer = Vec::with_capacity(c.dy);
    let mut rows = Vec::with_capacity(c.dy * c.dz);
    let mut px_yz = vec![T::zero(); c.dx];
    for yy in 0..c.dy {
        let py = c.p_y(yy);
        let px_y = c.x_given_y(yy);
        let pz_y = c.z_given_y(yy);
        let mut inner = Vec::with_capacity(c.dz);
        for zz in 0..c.dz {
            if pz_y[zz] <= T::zero() {
                inner.push(T::neg_infinity());
                continue;
            }
            let pyz = pz_y[zz] * py;
            for (xx, v) in px_yz.iter_mut().enumerate() {
                *v = c.at(xx, yy, zz) / pyz;
            }
            inner.push(pz_y[zz].ln() + log_g_slices(&px_yz, &px_y, s) / s);
        }
        let total = log_sum_exp(inner.iter().copied());
        rows.extend(inner.iter().map(|&w| (w - total).exp()));
        outer.push(py.ln() + s * total);
    }
    let value = ExtReal::from_float(log_sum_exp(outer) / (s - T::one()));
    cmi_result(p, [x, y, z], value, rows)
}

/// `min_{Q_{Z|Y}} D_s(P_XYZ‖P_XY × Q_{Z|Y})` from the closed form, for a three-axis `P`
/// with axes `(X, Y, Z)`.
pub fn cmi_uud_closed_form<T: Real>(p: &JointPmf<T>, order: RenyiOrder<T>) -> Result<MinimizerResult<T>> {
    check_three(p)?;
    cmi_uud_grouped(p, &[0], &[1], &[2], order)
}

/// The same minimum assembled from one Sibson minimization per `y`.
pub fn cmi_uud_per_y<T: Real>(p: &JointPmf<T>, order: RenyiOrder<T>) -> Result<MinimizerResult<T>> {
    check_three(p)?;
    let groups: [&[usize]; 3] = [&[0], &[1], &[2]];
    let c = Cmi::new(p, &[0], &[1], &[2])?;
    let s = match order {
        RenyiOrder::One => return order_one_cmi(p, &c, groups),
        RenyiOrder::Finite(s) => s,
        _ => return Err(Error::OrderOutOfRange { order: order.value().as_f64(), range: "(0,∞)".into() }),
    };
    let axes = [p.axes()[0].clone(), p.axes()[2].clone()];
    let mut terms = Vec::with_capacity(c.dy);
    let mut rows = Vec::with_capacity(c.dy * c.dz);
    for yy in 0..c.dy {
        let py = c.p_y(yy);
        let cond: Vec<T> =
            (0..c.dx).flat_map(|xx| (0..c.dz).map(move |zz| (xx, zz))).map(|(xx, zz)| c.at(xx, yy, zz) / py).collect();
        let cond = JointPmf::from_parts_unchecked(axes.to_vec(), cond);
        let t = Pmf::from_unnormalized(axes[0].clone(), c.x_given_y(yy));
        let r = sibson_grouped(&cond, &t, &[0], &[1], order)?;
        let Argmin::Marginal { q } = r.argmin else { unreachable!("sibson returns a marginal") };
        rows.extend_from_slice(q.probs());
        terms.push(py.ln() + (s - T::one()) * r.value.to_float());
    }
    let value = ExtReal::from_float(log_sum_exp(terms) / (s - T::one()));
    cmi_result(p, groups, value, rows)
}

fn check_three<T: Real>(p: &JointPmf<T>) -> Result<()> {
    if p.num_axes() != 3 {
        return Err(Error::Axis(format!("expected a three-axis joint pmf, got {} axes", p.num_axes())));
    }
    Ok(())
}
