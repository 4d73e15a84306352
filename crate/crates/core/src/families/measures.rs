//! Rényi mutual information, conditional entropy and conditional mutual
//! information measures with closed forms.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::{log_sum_exp, ExtReal, Real};
use crate::prob::{divergence_slices, Channel, JointPmf, Pmf, RenyiOrder};

use super::sibson::{cmi_uud_grouped, sibson_grouped};
use super::{assemble, Argmin, MinimizerResult};

/// Which closed-form measure to compute. Two-axis kinds read the axes as
/// `(X, Y)`, three-axis kinds as `(X, Y, Z)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeasureKind {
    /// `I↑↑_s(X:Y) = D_s(P_XY‖P_X × P_Y)`.
    MiUpUp,
    /// Sibson's mutual information `min_{Q_Y} D_s(P_XY‖P_X × Q_Y)`.
    MiUpDown,
    /// `H↓_s(X|Y) = log|X| − D_s(P_XY‖R_X × P_Y)` with `R_X` uniform.
    CondEntDown,
    /// Arimoto's conditional entropy `log|X| − min_{Q_Y} D_s(P_XY‖R_X × Q_Y)`.
    CondEntUp,
    /// `I↑↑↑_s(X:Z|Y) = D_s(P_XYZ‖P_Y × P_{X|Y} × P_{Z|Y})`.
    CmiUpUpUp,
    /// `min_{Q_{Z|Y}} D_s(P_XYZ‖P_XY × Q_{Z|Y})`.
    CmiUpUpDown,
}

impl MeasureKind {
    pub fn num_axes(self) -> usize {
        match self {
            MeasureKind::CmiUpUpUp | MeasureKind::CmiUpUpDown => 3,
            _ => 2,
        }
    }
}

/// Evaluates a closed-form measure. Plain divergences (`MiUpUp`, `CondEntDown`,
/// `CmiUpUpUp`) accept every order; the minimized ones need `s ∈ (0,∞)`.
pub fn closed_form_measure<T: Real>(
    kind: MeasureKind,
    p: &JointPmf<T>,
    order: RenyiOrder<T>,
) -> Result<MinimizerResult<T>> {
    if p.num_axes() != kind.num_axes() {
        return Err(Error::Axis(format!(
            "{kind:?} needs {} axes, got {}",
            kind.num_axes(),
            p.num_axes()
        )));
    }
    let xy = [vec![0], vec![1]];
    match kind {
        MeasureKind::MiUpUp => {
            let px = p.marginal_pmf(0)?;
            let py = p.marginal_pmf(1)?;
            let q = assemble(p.axes(), &xy, |c| px.probs()[c[0]] * py.probs()[c[1]]);
            let d = divergence_slices(p.probs(), q.probs(), order);
            Ok(MinimizerResult::closed_form(d, Argmin::Fixed, q))
        }
        MeasureKind::MiUpDown => sibson_grouped(p, &p.marginal_pmf(0)?, &[0], &[1], order),
        MeasureKind::CondEntDown => {
            let py = p.marginal_pmf(1)?;
            let dx = p.axes()[0].len();
            let r = T::one() / T::lit(dx as f64);
            let q = assemble(p.axes(), &xy, |c| r * py.probs()[c[1]]);
            let d = divergence_slices(p.probs(), q.probs(), order);
            let mut out = MinimizerResult::closed_form(d, Argmin::Fixed, q);
            out.value = entropy_form(dx, d);
            Ok(out)
        }
        MeasureKind::CondEntUp => {
            let dx = p.axes()[0].len();
            let mut out = sibson_grouped(p, &Pmf::uniform(p.axes()[0].clone()), &[0], &[1], order)?;
            out.value = entropy_form(dx, out.divergence);
            Ok(out)
        }
        MeasureKind::CmiUpUpUp => {
            let pxy = p.marginal(&[0, 1])?;
            let pyz = p.marginal(&[1, 2])?;
            let py = p.marginal_pmf(1)?;
            let (dy, dz) = (p.axes()[1].len(), p.axes()[2].len());
            let q = assemble(p.axes(), &[vec![0], vec![1], vec![2]], |c| {
                let y = py.probs()[c[1]];
                if y <= T::zero() {
                    T::zero()
                } else {
                    pxy.probs()[c[0] * dy + c[1]] * pyz.probs()[c[1] * dz + c[2]] / y
                }
            });
            let d = divergence_slices(p.probs(), q.probs(), order);
            Ok(MinimizerResult::closed_form(d, Argmin::Fixed, q))
        }
        MeasureKind::CmiUpUpDown => cmi_uud_grouped(p, &[0], &[1], &[2], order),
    }
}

fn entropy_form<T: Real>(size: usize, d: ExtReal<T>) -> ExtReal<T> {
    // the reference measure is the uniform distribution, so d is finite
    ExtReal::Finite(T::lit(size as f64).ln() - d.to_float())
}

fn check_input<T: Real>(p_x: &Pmf<T>, w: &Channel<T>) -> Result<()> {
    if !p_x.alphabet().same_labels(w.input()) {
        return Err(Error::AlphabetMismatch("input pmf does not match channel input".into()));
    }
    Ok(())
}

/// `log Σ_y (Σ_x P_X(x) W(y|x)^{1/(1-ρ)})^{1-ρ}` for `ρ < 1`.
///
/// With this sign convention Sibson's mutual information satisfies
/// `I↑↓_s = s/(s-1)·E_0((s-1)/s, P_X)` for every `s > 0`. It equals
/// `−E_0^std(−ρ)` in terms of [`gallager_e0_standard`].
pub fn gallager_e0<T: Real>(rho: T, p_x: &Pmf<T>, w: &Channel<T>) -> Result<T> {
    check_input(p_x, w)?;
    if rho.is_nan() || rho >= T::one() {
        return Err(Error::InvalidArgument(format!("rho = {rho} must be below 1")));
    }
    Ok(e0_core(T::one() - rho, p_x, w))
}

/// Gallager's function in its usual form,
/// `−log Σ_y (Σ_x P_X(x) W(y|x)^{1/(1+ρ)})^{1+ρ}` for `ρ > −1`.
pub fn gallager_e0_standard<T: Real>(rho: T, p_x: &Pmf<T>, w: &Channel<T>) -> Result<T> {
    check_input(p_x, w)?;
    if rho.is_nan() || rho <= -T::one() {
        return Err(Error::InvalidArgument(format!("rho = {rho} must exceed -1")));
    }
    Ok(-e0_core(T::one() + rho, p_x, w))
}

/// `log Σ_y (Σ_x P_X(x) W(y|x)^{1/c})^c`.
fn e0_core<T: Real>(c: T, p_x: &Pmf<T>, w: &Channel<T>) -> T {
    let a = T::one() / c;
    let outer = (0..w.output().len()).map(|y| {
        let inner = p_x
            .probs()
            .iter()
            .enumerate()
            .filter(|&(x, &px)| px > T::zero() && w.get(x, y) > T::zero())
            .map(|(x, &px)| px.ln() + a * w.get(x, y).ln());
        c * log_sum_exp(inner)
    });
    log_sum_exp(outer)
}
