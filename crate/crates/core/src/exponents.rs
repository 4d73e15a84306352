//! Threshold rate, error exponent, strong converse exponent and second-order
//! behaviour of a composite test, all derived from the curve
//! `φ(s) = (s-1)·D_s(P‖family)` and `ψ(s) = s·φ'(s) − φ(s)`.
//!
//! `φ'` is not available in closed form once the inner minimization is
//! involved, so it is taken by central differences with one Richardson step.
//! The edge rates `R_a` and `R_b` are evaluated at `a + 1e-4` and at
//! `min(b − 1e-4, 64)`; when `b = ∞` the reported `R_b` is a lower estimate.

use std::collections::HashMap;
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::{family_divergence_with, FamilySpec, Interval, MinimizerResult, SolverOptions};
use crate::num::ExtReal;
use crate::prob::{variance_slices, JointPmf, RenyiOrder};

/// Offset from a finite interval edge used for edge evaluations.
pub const EDGE_EPS: f64 = 1e-4;
/// Largest order used in place of an infinite upper edge.
pub const S_MAX: f64 = 64.0;
/// Stopping tolerance `|ψ(ŝ) − R|` of the bisection.
pub const BISECTION_TOL: f64 = 1e-10;
pub const BISECTION_MAX_ITERS: usize = 200;
/// Number of points of the fallback grid supremum.
const GRID_POINTS: usize = 2000;

/// `s ↦ φ(s)` for a null and a family, with memoized evaluations.
#[derive(Debug)]
pub struct PhiCurve {
    null: JointPmf<f64>,
    family: FamilySpec<f64>,
    opts: SolverOptions<f64>,
    threshold: f64,
    minimizer_at_one: MinimizerResult<f64>,
    cache: Mutex<HashMap<u64, f64>>,
}

impl PhiCurve {
    /// Fails if the family does not fit the null or if `D(P‖family)` is infinite.
    pub fn new(null: JointPmf<f64>, family: FamilySpec<f64>) -> Result<Self> {
        Self::with_options(null, family, SolverOptions::default())
    }

    pub fn with_options(null: JointPmf<f64>, family: FamilySpec<f64>, opts: SolverOptions<f64>) -> Result<Self> {
        family.validate(&null)?;
        let at_one = family_divergence_with(&null, &family, RenyiOrder::One, &opts)?;
        let threshold = at_one.value.finite().ok_or(Error::InfiniteDivergence { order: 1.0 })?;
        Ok(Self { null, family, opts, threshold, minimizer_at_one: at_one, cache: Mutex::new(HashMap::new()) })
    }

    pub fn null(&self) -> &JointPmf<f64> {
        &self.null
    }

    pub fn family(&self) -> &FamilySpec<f64> {
        &self.family
    }

    pub fn interval(&self) -> Interval {
        self.family.validity()
    }

    /// `D(P‖family)`.
    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    /// The minimizer at order one.
    pub fn minimizer_at_one(&self) -> &MinimizerResult<f64> {
        &self.minimizer_at_one
    }

    fn check(&self, s: f64) -> Result<()> {
        if !self.interval().contains(s) {
            return Err(Error::OrderOutOfRange { order: s, range: self.interval().to_string() });
        }
        Ok(())
    }

    /// `φ(s) = (s-1)·D_s(P‖family) = log g_s(P‖family)`; may be `±∞`.
    pub fn phi(&self, s: f64) -> Result<f64> {
        self.check(s)?;
        let order = RenyiOrder::new(s)?;
        let Some(s) = order.generic() else { return Ok(0.0) };
        let key = s.to_bits();
        if let Some(&v) = self.cache.lock().expect("cache lock").get(&key) {
            return Ok(v);
        }
        let d = family_divergence_with(&self.null, &self.family, order, &self.opts)?.value;
        let v = match d {
            ExtReal::Finite(d) => (s - 1.0) * d,
            ExtReal::PosInfinity if s > 1.0 => f64::INFINITY,
            ExtReal::PosInfinity => f64::NEG_INFINITY,
        };
        self.cache.lock().expect("cache lock").insert(key, v);
        Ok(v)
    }

    /// `D_s(P‖family)`, with the order-one value taken from the threshold.
    pub fn divergence(&self, s: f64) -> Result<f64> {
        if (s - 1.0).abs() < crate::prob::ORDER_ONE_BAND {
            self.check(s)?;
            return Ok(self.threshold);
        }
        Ok(self.phi(s)? / (s - 1.0))
    }

    fn step(&self, s: f64) -> f64 {
        let iv = self.interval();
        let dist = (s - iv.lo).min(iv.hi - s);
        (1e-4 * dist).max(1e-5).min(dist / 2.0)
    }

    /// `φ'(s)` by central differences with one Richardson step.
    pub fn phi_prime(&self, s: f64) -> Result<f64> {
        self.check(s)?;
        let h = self.step(s);
        let central = |h: f64| -> Result<f64> { Ok((self.phi(s + h)? - self.phi(s - h)?) / (2.0 * h)) };
        let coarse = central(h)?;
        let fine = central(h / 2.0)?;
        Ok((4.0 * fine - coarse) / 3.0)
    }

    /// Evaluations made so far, sorted by order.
    pub fn samples(&self) -> Vec<(f64, f64)> {
        let mut v: Vec<(f64, f64)> =
            self.cache.lock().expect("cache lock").iter().map(|(&k, &v)| (f64::from_bits(k), v)).collect();
        v.sort_by(|a, b| a.0.total_cmp(&b.0));
        v
    }
}

/// `ψ(s) = s·φ'(s) − φ(s)`, nondecreasing on the validity interval.
pub fn psi(curve: &PhiCurve, s: f64) -> Result<f64> {
    let v = s * curve.phi_prime(s)? - curve.phi(s)?;
    if !v.is_finite() {
        return Err(Error::InfiniteDivergence { order: s });
    }
    Ok(v)
}

/// Lower edge `a + ε` at which `R_a` is evaluated.
pub fn lower_edge(curve: &PhiCurve) -> f64 {
    curve.interval().lo + EDGE_EPS
}

/// Upper edge `min(b − ε, s_max)` at which `R_b` is evaluated.
pub fn upper_edge(curve: &PhiCurve) -> f64 {
    (curve.interval().hi - EDGE_EPS).min(S_MAX)
}

/// The `c`-critical rate `lim_{s→c} ψ(s)`; edges (and `c = ∞`) are evaluated
/// one-sidedly at [`lower_edge`] / [`upper_edge`].
pub fn critical_rate(curve: &PhiCurve, c: f64) -> Result<f64> {
    let iv = curve.interval();
    if c.is_nan() || c < iv.lo || c > iv.hi {
        return Err(Error::OrderOutOfRange { order: c, range: iv.to_string() });
    }
    if (c - 1.0).abs() < crate::prob::ORDER_ONE_BAND {
        return psi(curve, 1.0);
    }
    let lo = lower_edge(curve);
    let hi = upper_edge(curve);
    psi(curve, c.clamp(lo, hi))
}

/// `D(P‖family)`.
pub fn threshold_rate(curve: &PhiCurve) -> f64 {
    curve.threshold()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExponentKind {
    Error,
    StrongConverse,
}

/// One exponent evaluation. Rates and values are in nats per symbol.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentReport {
    pub kind: ExponentKind,
    pub rate: f64,
    pub value: f64,
    /// `ŝ` with `ψ(ŝ) = R`, or the best grid order when no root is bracketed.
    /// `None` when the value is zero because `R` is on the trivial side of the threshold.
    pub optimizing_order: Option<f64>,
    /// Whether the single-letter formula is known to equal the exponent at this rate.
    pub equality_guaranteed: bool,
    pub threshold: f64,
    pub variance: f64,
    /// `R_a` for the error exponent, `R_b` for the strong converse exponent.
    pub critical_rate: f64,
    /// Value from direct golden-section maximization of the supremand.
    pub direct_value: f64,
}

/// Root of `ψ(s) = rate` on `[lo, hi]` where `ψ(lo) < rate < ψ(hi)`.
fn bisect(curve: &PhiCurve, rate: f64, mut lo: f64, mut hi: f64) -> Result<f64> {
    let mut mid = 0.5 * (lo + hi);
    for _ in 0..BISECTION_MAX_ITERS {
        mid = 0.5 * (lo + hi);
        let v = psi(curve, mid)?;
        if (v - rate).abs() <= BISECTION_TOL {
            break;
        }
        if v < rate {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(mid)
}

/// Maximizes a unimodal `f` on `[lo, hi]`; returns `(argmax, max)`.
fn golden_max(f: impl Fn(f64) -> Result<f64>, mut lo: f64, mut hi: f64) -> Result<(f64, f64)> {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1)?, f(x2)?);
    while hi - lo > 1e-10 * (1.0 + lo.abs()) {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2)?;
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1)?;
        }
    }
    let (fl, fh) = (f(lo)?, f(hi)?);
    let best = [(x1, f1), (x2, f2), (lo, fl), (hi, fh)]
        .into_iter()
        .fold((lo, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
    Ok(best)
}

fn grid_max(f: impl Fn(f64) -> Result<f64>, lo: f64, hi: f64) -> Result<(f64, f64)> {
    let mut best = (lo, f64::NEG_INFINITY);
    for i in 0..=GRID_POINTS {
        let s = lo + (hi - lo) * i as f64 / GRID_POINTS as f64;
        let v = f(s)?;
        if v > best.1 {
            best = (s, v);
        }
    }
    Ok(best)
}

fn check_rate(rate: f64) -> Result<()> {
    if rate.is_nan() || rate < 0.0 {
        return Err(Error::InvalidRate(rate));
    }
    Ok(())
}

fn null_variance(curve: &PhiCurve) -> Result<f64> {
    variance_slices(curve.null.probs(), curve.minimizer_at_one.assembled.probs())
}

/// Hoeffding-type error exponent `sup_{s∈(a,1)} (1-s)/s·(D_s − R)`.
///
/// For `R` between `R_a` and the threshold the supremum is attained at the
/// root of `ψ(ŝ) = R`; below `R_a` a grid supremum (a lower bound) is returned
/// and `equality_guaranteed` is false.
pub fn error_exponent(curve: &PhiCurve, rate: f64) -> Result<ExponentReport> {
    check_rate(rate)?;
    let threshold = curve.threshold();
    let lo = lower_edge(curve);
    let r_a = psi(curve, lo)?;
    let supremand = |s: f64| -> Result<f64> { Ok((1.0 - s) / s * (curve.divergence(s)? - rate)) };
    let mut report = ExponentReport {
        kind: ExponentKind::Error,
        rate,
        value: 0.0,
        optimizing_order: None,
        equality_guaranteed: rate >= r_a,
        threshold,
        variance: null_variance(curve)?,
        critical_rate: r_a,
        direct_value: 0.0,
    };
    if rate >= threshold {
        return Ok(report);
    }
    let direct = golden_max(supremand, lo, 1.0)?;
    report.direct_value = direct.1.max(0.0);
    if rate > r_a {
        let s_hat = bisect(curve, rate, lo, 1.0)?;
        report.optimizing_order = Some(s_hat);
        report.value = supremand(s_hat)?.max(0.0);
    } else {
        let grid = grid_max(supremand, lo, 1.0)?;
        let best = if direct.1 > grid.1 { direct } else { grid };
        report.optimizing_order = Some(best.0);
        report.value = best.1.max(0.0);
    }
    Ok(report)
}

/// Strong converse exponent `sup_{s∈(1,b)} (s-1)/s·(R − D_s)`.
///
/// Mirrors [`error_exponent`] on `(1, b)`: zero at or below the threshold, the
/// root of `ψ(ŝ) = R` up to `R_b`, and a grid lower bound beyond it.
pub fn sc_exponent(curve: &PhiCurve, rate: f64) -> Result<ExponentReport> {
    check_rate(rate)?;
    let threshold = curve.threshold();
    let hi = upper_edge(curve);
    let r_b = psi(curve, hi)?;
    let supremand = |s: f64| -> Result<f64> { Ok((s - 1.0) / s * (rate - curve.divergence(s)?)) };
    let mut report = ExponentReport {
        kind: ExponentKind::StrongConverse,
        rate,
        value: 0.0,
        optimizing_order: None,
        equality_guaranteed: rate <= r_b,
        threshold,
        variance: null_variance(curve)?,
        critical_rate: r_b,
        direct_value: 0.0,
    };
    if rate <= threshold {
        return Ok(report);
    }
    let direct = golden_max(supremand, 1.0, hi)?;
    report.direct_value = direct.1.max(0.0);
    if rate < r_b {
        let s_hat = bisect(curve, rate, 1.0, hi)?;
        report.optimizing_order = Some(s_hat);
        report.value = supremand(s_hat)?.max(0.0);
    } else {
        let grid = grid_max(supremand, 1.0, hi)?;
        let best = if direct.1 > grid.1 { direct } else { grid };
        report.optimizing_order = Some(best.0);
        report.value = best.1.max(0.0);
    }
    Ok(report)
}

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

/// `V(P‖family)`, the log-likelihood variance against the order-one minimizer.
pub fn family_variance(curve: &PhiCurve) -> Result<f64> {
    null_variance(curve)
}

/// Limit of the optimal type-I error when the type-II budget is
/// `exp(−n·D − √n·r)`: `Φ(r/√V)`.
pub fn second_order_alpha(curve: &PhiCurve, r: f64) -> Result<f64> {
    let v = null_variance(curve)?;
    if v <= 0.0 {
        return Err(Error::DegenerateVariance);
    }
    Ok(normal_cdf(r / v.sqrt()))
}
