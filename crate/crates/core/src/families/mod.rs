//! Composite alternative families and minimization of the Rényi divergence over them.
//!
//! A family is described by how the axes of the null distribution `P` are
//! grouped into blocks. Closed forms are used wherever Sibson's identity gives
//! one; the fully free product and Markov families use alternating
//! minimization, each block update being an exact Sibson-type step.

mod altmin;
mod measures;
mod sibson;

pub use altmin::{alt_min_markov, alt_min_product};
pub use measures::{closed_form_measure, gallager_e0, gallager_e0_standard, MeasureKind};
pub use sibson::{cmi_uud_closed_form, cmi_uud_per_y, sibson_minimize};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::{ExtReal, Real};
use crate::prob::{check_same_domain, renyi_divergence, Alphabet, Channel, JointPmf, Pmf, RenyiOrder};

/// Open interval `(lo, hi)` of orders; `hi` may be infinite.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const POSITIVE: Interval = Interval { lo: 0.0, hi: f64::INFINITY };

    pub fn contains(&self, s: f64) -> bool {
        s > self.lo && s < self.hi
    }
}

impl std::fmt::Display for Interval {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.hi.is_infinite() {
            write!(f, "({}, ∞)", self.lo)
        } else {
            write!(f, "({}, {})", self.lo, self.hi)
        }
    }
}

/// A composite alternative family. Axis groups index the axes of the null `P`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FamilySpec<T> {
    /// A single alternative `Q` on the same axes as `P`.
    Singleton { q: JointPmf<T> },
    /// `T × Q` with `T` fixed on `fixed_axes` and `Q` free on `free_axes`.
    FixedMarginalProduct { fixed: Pmf<T>, fixed_axes: Vec<usize>, free_axes: Vec<usize> },
    /// `Q_1 × … × Q_k (× Q_Y)`; the first `k` factors are permutation invariant
    /// at blocklength `n`, the optional last one is unconstrained.
    GeneralProduct { invariant_factors: Vec<Vec<usize>>, unconstrained: Option<Vec<usize>> },
    /// `P_XY × Q_{Z|Y}` with `P_XY` taken from the null.
    MarkovRecovery { x: Vec<usize>, y: Vec<usize>, z: Vec<usize> },
    /// All Markov chains `Q_Y × Q_{X|Y} × Q_{Z|Y}`.
    MarkovAll { x: Vec<usize>, y: Vec<usize>, z: Vec<usize> },
}

impl<T: Real> FamilySpec<T> {
    /// `T_X × Q_Y` on a two-axis null.
    pub fn fixed_marginal(fixed: Pmf<T>) -> Self {
        FamilySpec::FixedMarginalProduct { fixed, fixed_axes: vec![0], free_axes: vec![1] }
    }

    /// `k` invariant single-axis factors followed by one unconstrained axis
    /// (a null with `k + 1` axes).
    pub fn general_product(k: usize) -> Self {
        FamilySpec::GeneralProduct {
            invariant_factors: (0..k).map(|i| vec![i]).collect(),
            unconstrained: Some(vec![k]),
        }
    }

    /// Markov recovery on a three-axis null `(X, Y, Z)`.
    pub fn markov_recovery() -> Self {
        FamilySpec::MarkovRecovery { x: vec![0], y: vec![1], z: vec![2] }
    }

    /// All Markov chains on a three-axis null `(X, Y, Z)`.
    pub fn markov_all() -> Self {
        FamilySpec::MarkovAll { x: vec![0], y: vec![1], z: vec![2] }
    }

    pub fn name(&self) -> &'static str {
        match self {
            FamilySpec::Singleton { .. } => "singleton",
            FamilySpec::FixedMarginalProduct { .. } => "fixed-marginal-product",
            FamilySpec::GeneralProduct { .. } => "general-product",
            FamilySpec::MarkovRecovery { .. } => "markov-recovery",
            FamilySpec::MarkovAll { .. } => "markov-all",
        }
    }

    /// Orders for which the family's minimizer is guaranteed unique and interior.
    pub fn validity(&self) -> Interval {
        match self {
            FamilySpec::GeneralProduct { invariant_factors, .. } => {
                let k = invariant_factors.len() as f64;
                Interval { lo: k / (k + 1.0), hi: f64::INFINITY }
            }
            FamilySpec::MarkovAll { .. } => Interval { lo: 2.0 / 3.0, hi: f64::INFINITY },
            _ => Interval::POSITIVE,
        }
    }

    /// Whether `order` lies inside the validity interval (order one always does).
    pub fn admits(&self, order: RenyiOrder<T>) -> bool {
        match order {
            RenyiOrder::One => true,
            RenyiOrder::Finite(s) => self.validity().contains(s.as_f64()),
            RenyiOrder::Zero | RenyiOrder::Infinity => matches!(self, FamilySpec::Singleton { .. }),
        }
    }

    /// Axis groups that make up one member, in assembly order.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        match self {
            FamilySpec::Singleton { q } => vec![(0..q.num_axes()).collect()],
            FamilySpec::FixedMarginalProduct { fixed_axes, free_axes, .. } => {
                vec![fixed_axes.clone(), free_axes.clone()]
            }
            FamilySpec::GeneralProduct { invariant_factors, unconstrained } => {
                let mut b = invariant_factors.clone();
                b.extend(unconstrained.iter().cloned());
                b
            }
            FamilySpec::MarkovRecovery { x, y, z } | FamilySpec::MarkovAll { x, y, z } => {
                vec![x.clone(), y.clone(), z.clone()]
            }
        }
    }

    /// Checks that the family is well formed for the null `p`.
    pub fn validate(&self, p: &JointPmf<T>) -> Result<()> {
        if let FamilySpec::Singleton { q } = self {
            return check_same_domain(p, q);
        }
        let blocks = self.blocks();
        check_partition(&blocks, p.num_axes())?;
        match self {
            FamilySpec::FixedMarginalProduct { fixed, fixed_axes, .. } => {
                let alpha = p.group_alphabet(fixed_axes)?;
                if !alpha.same_labels(fixed.alphabet()) {
                    return Err(Error::AlphabetMismatch(format!(
                        "fixed marginal has {} letters, axis group {:?} has {}",
                        fixed.len(),
                        fixed_axes,
                        alpha.len()
                    )));
                }
                if let Some(i) = fixed.probs().iter().position(|&v| v <= T::zero()) {
                    return Err(Error::ZeroMarginal { group: fixed_axes.clone(), label: alpha.labels()[i].clone() });
                }
            }
            FamilySpec::GeneralProduct { invariant_factors, .. } if invariant_factors.is_empty() => {
                return Err(Error::InvalidArgument("general product needs at least one invariant factor".into()));
            }
            FamilySpec::MarkovRecovery { y, .. } | FamilySpec::MarkovAll { y, .. } => {
                require_full_support(p, y)?;
            }
            _ => {}
        }
        Ok(())
    }

    pub(crate) fn check_order(&self, order: RenyiOrder<T>, allow_outside: bool) -> Result<bool> {
        let inside = self.admits(order);
        let generic_or_one = matches!(order, RenyiOrder::One | RenyiOrder::Finite(_));
        if inside || (allow_outside && generic_or_one) {
            return Ok(inside);
        }
        Err(Error::OrderOutOfRange { order: order.value().as_f64(), range: self.validity().to_string() })
    }
}

fn check_partition(blocks: &[Vec<usize>], num_axes: usize) -> Result<()> {
    let mut seen = vec![false; num_axes];
    for &a in blocks.iter().flatten() {
        if a >= num_axes || seen[a] {
            return Err(Error::Axis(format!("axis groups {blocks:?} do not partition {num_axes} axes")));
        }
        seen[a] = true;
    }
    if seen.iter().any(|&b| !b) || blocks.iter().any(Vec::is_empty) {
        return Err(Error::Axis(format!("axis groups {blocks:?} do not partition {num_axes} axes")));
    }
    Ok(())
}

pub(crate) fn require_full_support<T: Real>(p: &JointPmf<T>, group: &[usize]) -> Result<Pmf<T>> {
    let m = p.group_marginal(group)?;
    if let Some(i) = m.probs().iter().position(|&v| v <= T::zero()) {
        return Err(Error::ZeroMarginal { group: group.to_vec(), label: m.alphabet().labels()[i].clone() });
    }
    Ok(m)
}

/// Optimal components of a minimization.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Argmin<T> {
    /// Nothing was optimized; the assembled member is the answer.
    Fixed,
    /// Optimal free marginal `Q̂_Y`.
    Marginal { q: Pmf<T> },
    /// Optimal factors, one per block.
    Product { factors: Vec<Pmf<T>> },
    /// Optimal channel `Q̂_{Z|Y}`.
    Channel { q: Channel<T> },
    /// Optimal Markov chain components.
    Markov { y: Pmf<T>, x_given_y: Channel<T>, z_given_y: Channel<T> },
}

/// Outcome of a minimization over a family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinimizerResult<T> {
    /// The requested quantity. Equals `divergence` except for the conditional
    /// entropy measures, where it is `log|X| − divergence`.
    pub value: ExtReal<T>,
    /// `D_s(P‖assembled)`.
    pub divergence: ExtReal<T>,
    pub argmin: Argmin<T>,
    /// The minimizing member on the axes of `P`.
    pub assembled: JointPmf<T>,
    pub iterations: usize,
    pub converged: bool,
    /// Whether the order lies in the family's validity interval.
    pub within_validity: bool,
}

impl<T: Real> MinimizerResult<T> {
    pub(crate) fn closed_form(divergence: ExtReal<T>, argmin: Argmin<T>, assembled: JointPmf<T>) -> Self {
        Self { value: divergence, divergence, argmin, assembled, iterations: 0, converged: true, within_validity: true }
    }
}

/// Stopping rules for the alternating solvers.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions<T> {
    /// Stop once no entry of any block moves by more than this in a sweep.
    pub tol: T,
    pub max_sweeps: usize,
    /// Run (and flag) orders outside the validity interval instead of refusing them.
    pub allow_outside_validity: bool,
}

impl<T: Real> Default for SolverOptions<T> {
    fn default() -> Self {
        Self { tol: T::solver_tolerance(), max_sweeps: 10_000, allow_outside_validity: false }
    }
}

/// Builds a joint pmf on `axes` whose entry at each point is `value(group coordinates)`.
pub(crate) fn assemble<T: Real>(
    axes: &[Alphabet],
    groups: &[Vec<usize>],
    value: impl Fn(&[usize]) -> T,
) -> JointPmf<T> {
    let shape: Vec<usize> = axes.iter().map(Alphabet::len).collect();
    let total: usize = shape.iter().product();
    let mut coord = vec![0usize; shape.len()];
    let mut sub = vec![0usize; groups.len()];
    let mut probs = Vec::with_capacity(total);
    for _ in 0..total {
        for (g, group) in groups.iter().enumerate() {
            sub[g] = group.iter().fold(0, |acc, &a| acc * shape[a] + coord[a]);
        }
        probs.push(value(&sub));
        for k in (0..shape.len()).rev() {
            coord[k] += 1;
            if coord[k] < shape[k] {
                break;
            }
            coord[k] = 0;
        }
    }
    JointPmf::from_parts_unchecked(axes.to_vec(), probs)
}

/// `D_s(P‖family)` with default solver options.
pub fn family_divergence<T: Real>(
    p: &JointPmf<T>,
    family: &FamilySpec<T>,
    order: RenyiOrder<T>,
) -> Result<MinimizerResult<T>> {
    family_divergence_with(p, family, order, &SolverOptions::default())
}

/// `D_s(P‖family) = inf_{Q ∈ family} D_s(P‖Q)`.
pub fn family_divergence_with<T: Real>(
    p: &JointPmf<T>,
    family: &FamilySpec<T>,
    order: RenyiOrder<T>,
    opts: &SolverOptions<T>,
) -> Result<MinimizerResult<T>> {
    family.validate(p)?;
    match family {
        FamilySpec::Singleton { q } => {
            let d = renyi_divergence(p, q, order)?;
            Ok(MinimizerResult::closed_form(d, Argmin::Fixed, q.clone()))
        }
        FamilySpec::FixedMarginalProduct { fixed, fixed_axes, free_axes } => {
            family.check_order(order, false)?;
            sibson::sibson_grouped(p, fixed, fixed_axes, free_axes, order)
        }
        FamilySpec::MarkovRecovery { x, y, z } => {
            family.check_order(order, false)?;
            sibson::cmi_uud_grouped(p, x, y, z, order)
        }
        FamilySpec::GeneralProduct { .. } => alt_min_product(p, family, order, opts),
        FamilySpec::MarkovAll { .. } => alt_min_markov(p, family, order, opts),
    }
}
