//! Finite-alphabet probability objects and the Rényi divergence family.
//!
//! All divergences are in nats. Products are accumulated in the log domain,
//! terms with `P(x) = 0` are skipped (the `0·log(0/q) = 0` convention), and
//! `+∞` is returned as [`ExtReal::PosInfinity`], never as a float sentinel.
//!
//! Constructors reject inputs whose mass deviates from one by more than
//! [`Real::normalization_tolerance`]; nothing is silently renormalized.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::{log_sum_exp, ExtReal, Real};

/// Orders within this distance of one are routed to the KL branch.
pub const ORDER_ONE_BAND: f64 = 1e-9;

/// An ordered finite alphabet with a name.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Alphabet {
    name: String,
    labels: Vec<String>,
}

impl Alphabet {
    pub fn new(name: impl Into<String>, labels: Vec<String>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::AlphabetMismatch("alphabet must be nonempty".into()));
        }
        let mut sorted = labels.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != labels.len() {
            return Err(Error::AlphabetMismatch("alphabet labels must be unique".into()));
        }
        Ok(Self { name: name.into(), labels })
    }

    /// Alphabet `{0, 1, …, size-1}`.
    pub fn indexed(name: impl Into<String>, size: usize) -> Self {
        assert!(size > 0, "alphabet must be nonempty");
        Self { name: name.into(), labels: (0..size).map(|i| i.to_string()).collect() }
    }

    /// Cartesian product; labels are joined with `,` in row-major order.
    pub fn product(parts: &[&Alphabet]) -> Self {
        let name = parts.iter().map(|a| a.name.as_str()).collect::<Vec<_>>().join("");
        let mut labels = vec![String::new()];
        for (k, part) in parts.iter().enumerate() {
            let mut next = Vec::with_capacity(labels.len() * part.len());
            for prefix in &labels {
                for l in &part.labels {
                    next.push(if k == 0 { l.clone() } else { format!("{prefix},{l}") });
                }
            }
            labels = next;
        }
        Self { name, labels }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Same labels in the same order; names are not compared.
    pub fn same_labels(&self, other: &Alphabet) -> bool {
        self.labels == other.labels
    }

    fn restricted(&self, keep: &[usize]) -> Self {
        Self { name: self.name.clone(), labels: keep.iter().map(|&i| self.labels[i].clone()).collect() }
    }
}

/// A nonnegative function on a (possibly multi-axis) finite alphabet.
pub trait Weights<T: Real> {
    fn axes(&self) -> &[Alphabet];
    fn weights(&self) -> &[T];
}

/// Marker for weights that form a probability mass function.
pub trait ProbabilityMass<T: Real>: Weights<T> {}

fn check_entries<T: Real>(what: &str, values: &[T]) -> Result<()> {
    for (index, &v) in values.iter().enumerate() {
        if !v.is_finite() || v < T::zero() {
            return Err(Error::InvalidEntry { what: what.into(), index, value: v.as_f64() });
        }
    }
    Ok(())
}

fn check_normalized<T: Real>(what: &str, values: &[T]) -> Result<()> {
    check_entries(what, values)?;
    let sum: T = values.iter().copied().sum();
    if (sum - T::one()).abs() > T::normalization_tolerance() {
        return Err(Error::NotNormalized { what: what.into(), sum: sum.as_f64() });
    }
    Ok(())
}

/// Checks that two weight functions live on the same axes (labels compared per axis).
pub fn check_same_domain<T: Real>(a: &impl Weights<T>, b: &impl Weights<T>) -> Result<()> {
    let (xa, xb) = (a.axes(), b.axes());
    if xa.len() != xb.len() || xa.iter().zip(xb).any(|(u, v)| !u.same_labels(v)) {
        let shape = |x: &[Alphabet]| x.iter().map(Alphabet::len).collect::<Vec<_>>();
        return Err(Error::AlphabetMismatch(format!(
            "domains differ: shape {:?} vs {:?}",
            shape(xa),
            shape(xb)
        )));
    }
    Ok(())
}

/// A probability mass function on a single alphabet.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Pmf<T> {
    alphabet: Alphabet,
    probs: Vec<T>,
}

impl<T: Real> Pmf<T> {
    pub fn new(alphabet: Alphabet, probs: Vec<T>) -> Result<Self> {
        if alphabet.len() != probs.len() {
            return Err(Error::AlphabetMismatch(format!(
                "{} labels but {} probabilities",
                alphabet.len(),
                probs.len()
            )));
        }
        check_normalized(alphabet.name(), &probs)?;
        Ok(Self { alphabet, probs })
    }

    /// Pmf on the indexed alphabet `X = {0, …, len-1}`.
    pub fn from_probs(probs: Vec<T>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::AlphabetMismatch("alphabet must be nonempty".into()));
        }
        Self::new(Alphabet::indexed("X", probs.len()), probs)
    }

    pub fn uniform(alphabet: Alphabet) -> Self {
        let v = T::one() / T::lit(alphabet.len() as f64);
        let probs = vec![v; alphabet.len()];
        Self { alphabet, probs }
    }

    /// Normalizes nonnegative weights. Intended for values produced by this
    /// crate's own solvers, not for user input.
    pub(crate) fn from_unnormalized(alphabet: Alphabet, weights: Vec<T>) -> Self {
        let total: T = weights.iter().copied().sum();
        let probs = weights.into_iter().map(|w| w / total).collect();
        Self { alphabet, probs }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn has_full_support(&self) -> bool {
        self.probs.iter().all(|&p| p > T::zero())
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.probs.iter().enumerate().filter(|(_, &p)| p > T::zero()).map(|(i, _)| i)
    }

    /// The same probabilities as a one-axis joint pmf.
    pub fn to_joint(&self) -> JointPmf<T> {
        JointPmf { axes: vec![self.alphabet.clone()], probs: self.probs.clone() }
    }
}

impl<T: Real> Weights<T> for Pmf<T> {
    fn axes(&self) -> &[Alphabet] {
        std::slice::from_ref(&self.alphabet)
    }
    fn weights(&self) -> &[T] {
        &self.probs
    }
}

impl<T: Real> ProbabilityMass<T> for Pmf<T> {}

/// A nonnegative, not necessarily normalized function on an alphabet.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Measure<T> {
    axes: Vec<Alphabet>,
    values: Vec<T>,
}

impl<T: Real> Measure<T> {
    pub fn new(axes: Vec<Alphabet>, values: Vec<T>) -> Result<Self> {
        let size: usize = axes.iter().map(Alphabet::len).product();
        if axes.is_empty() || size != values.len() {
            return Err(Error::AlphabetMismatch(format!(
                "domain of size {size} but {} values",
                values.len()
            )));
        }
        check_entries("measure", &values)?;
        Ok(Self { axes, values })
    }

    /// `v · Q` for a pmf or measure `Q`.
    pub fn scaled(q: &impl Weights<T>, v: T) -> Result<Self> {
        Self::new(q.axes().to_vec(), q.weights().iter().map(|&x| x * v).collect())
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }
}

impl<T: Real> Weights<T> for Measure<T> {
    fn axes(&self) -> &[Alphabet] {
        &self.axes
    }
    fn weights(&self) -> &[T] {
        &self.values
    }
}

/// A joint pmf over an ordered list of axes, stored row-major (last axis fastest).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JointPmf<T> {
    axes: Vec<Alphabet>,
    probs: Vec<T>,
}

/// Probabilities regrouped into blocks of axes, each block flattened row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Grouped<T> {
    pub dims: Vec<usize>,
    pub data: Vec<T>,
}

impl<T: Copy> Grouped<T> {
    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Per-group coordinates of a flat index.
    pub fn coords(&self, mut flat: usize) -> Vec<usize> {
        let mut out = vec![0; self.dims.len()];
        for k in (0..self.dims.len()).rev() {
            out[k] = flat % self.dims[k];
            flat /= self.dims[k];
        }
        out
    }
}

fn default_axis_name(i: usize, count: usize) -> String {
    if count <= 3 {
        ["X", "Y", "Z"][i].to_string()
    } else {
        format!("X{}", i + 1)
    }
}

impl<T: Real> JointPmf<T> {
    pub fn new(axes: Vec<Alphabet>, probs: Vec<T>) -> Result<Self> {
        let size: usize = axes.iter().map(Alphabet::len).product();
        if axes.is_empty() || size != probs.len() {
            return Err(Error::AlphabetMismatch(format!(
                "product alphabet of size {size} but {} probabilities",
                probs.len()
            )));
        }
        check_normalized("joint pmf", &probs)?;
        Ok(Self { axes, probs })
    }

    /// Joint pmf on indexed axes named `X, Y, Z` (or `X1, X2, …` beyond three axes).
    pub fn from_shape(shape: &[usize], probs: Vec<T>) -> Result<Self> {
        if shape.contains(&0) {
            return Err(Error::AlphabetMismatch("axes must be nonempty".into()));
        }
        let axes = shape
            .iter()
            .enumerate()
            .map(|(i, &d)| Alphabet::indexed(default_axis_name(i, shape.len()), d))
            .collect();
        Self::new(axes, probs)
    }

    /// Product distribution `P_1 × P_2 × …` with one axis per factor.
    pub fn independent(factors: &[Pmf<T>]) -> Self {
        let axes = factors.iter().map(|f| f.alphabet.clone()).collect();
        let mut probs = vec![T::one()];
        for f in factors {
            let mut next = Vec::with_capacity(probs.len() * f.len());
            for &a in &probs {
                next.extend(f.probs.iter().map(|&b| a * b));
            }
            probs = next;
        }
        Self { axes, probs }
    }

    pub(crate) fn from_parts_unchecked(axes: Vec<Alphabet>, probs: Vec<T>) -> Self {
        debug_assert_eq!(axes.iter().map(Alphabet::len).product::<usize>(), probs.len());
        Self { axes, probs }
    }

    pub fn axes(&self) -> &[Alphabet] {
        &self.axes
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    pub fn num_axes(&self) -> usize {
        self.axes.len()
    }

    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(Alphabet::len).collect()
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    fn check_axes(&self, axes: &[usize]) -> Result<()> {
        let mut seen = vec![false; self.axes.len()];
        for &a in axes {
            if a >= self.axes.len() || seen[a] {
                return Err(Error::Axis(format!(
                    "axis list {axes:?} invalid for {} axes",
                    self.axes.len()
                )));
            }
            seen[a] = true;
        }
        Ok(())
    }

    /// Regroups the axes into blocks (which must partition a subset of the
    /// axes; axes left out are summed over).
    pub fn regroup(&self, groups: &[Vec<usize>]) -> Result<Grouped<T>> {
        let flat: Vec<usize> = groups.iter().flatten().copied().collect();
        self.check_axes(&flat)?;
        let shape = self.shape();
        let dims: Vec<usize> = groups.iter().map(|g| g.iter().map(|&a| shape[a]).product()).collect();
        let mut data = vec![T::zero(); dims.iter().product()];
        let mut coord = vec![0usize; shape.len()];
        for &p in &self.probs {
            let mut idx = 0;
            for (g, &d) in groups.iter().zip(&dims) {
                let mut sub = 0;
                for &a in g {
                    sub = sub * shape[a] + coord[a];
                }
                idx = idx * d + sub;
            }
            data[idx] = data[idx] + p;
            for k in (0..shape.len()).rev() {
                coord[k] += 1;
                if coord[k] < shape[k] {
                    break;
                }
                coord[k] = 0;
            }
        }
        Ok(Grouped { dims, data })
    }

    /// Alphabet of a group of axes, flattened row-major.
    pub fn group_alphabet(&self, group: &[usize]) -> Result<Alphabet> {
        self.check_axes(group)?;
        if group.len() == 1 {
            return Ok(self.axes[group[0]].clone());
        }
        let parts: Vec<&Alphabet> = group.iter().map(|&a| &self.axes[a]).collect();
        Ok(Alphabet::product(&parts))
    }

    /// Marginal over the listed axes, in the listed order.
    pub fn marginal(&self, axes: &[usize]) -> Result<JointPmf<T>> {
        let groups: Vec<Vec<usize>> = axes.iter().map(|&a| vec![a]).collect();
        let g = self.regroup(&groups)?;
        Ok(Self { axes: axes.iter().map(|&a| self.axes[a].clone()).collect(), probs: g.data })
    }

    /// Marginal of a block of axes as a single-alphabet pmf.
    pub fn group_marginal(&self, group: &[usize]) -> Result<Pmf<T>> {
        let g = self.regroup(&[group.to_vec()])?;
        Ok(Pmf { alphabet: self.group_alphabet(group)?, probs: g.data })
    }

    pub fn marginal_pmf(&self, axis: usize) -> Result<Pmf<T>> {
        self.group_marginal(&[axis])
    }

    /// The same probabilities on the flattened product alphabet.
    pub fn flatten(&self) -> Pmf<T> {
        let parts: Vec<&Alphabet> = self.axes.iter().collect();
        Pmf { alphabet: Alphabet::product(&parts), probs: self.probs.clone() }
    }

    /// Conditional channel from one block of axes to another.
    /// Input letters of zero probability are rejected.
    pub fn channel(&self, input: &[usize], output: &[usize]) -> Result<Channel<T>> {
        let g = self.regroup(&[input.to_vec(), output.to_vec()])?;
        let (rows, cols) = (g.dims[0], g.dims[1]);
        let in_alpha = self.group_alphabet(input)?;
        let mut matrix = g.data;
        for r in 0..rows {
            let row = &mut matrix[r * cols..(r + 1) * cols];
            let total: T = row.iter().copied().sum();
            if total <= T::zero() {
                return Err(Error::ZeroMarginal { group: input.to_vec(), label: in_alpha.labels()[r].clone() });
            }
            row.iter_mut().for_each(|v| *v = *v / total);
        }
        Ok(Channel { input: in_alpha, output: self.group_alphabet(output)?, matrix })
    }

    /// Drops labels whose single-axis marginal vanishes.
    pub fn restrict_to_support(&self) -> JointPmf<T> {
        let keep: Vec<Vec<usize>> = (0..self.axes.len())
            .map(|a| {
                let m = self.marginal_pmf(a).expect("valid axis");
                m.support().collect()
            })
            .collect();
        let shape = self.shape();
        let new_axes: Vec<Alphabet> = self.axes.iter().zip(&keep).map(|(ax, k)| ax.restricted(k)).collect();
        let mut probs = Vec::new();
        let total: usize = keep.iter().map(Vec::len).product();
        let mut coord = vec![0usize; shape.len()];
        for _ in 0..total {
            let mut flat = 0;
            for k in 0..shape.len() {
                flat = flat * shape[k] + keep[k][coord[k]];
            }
            probs.push(self.probs[flat]);
            for k in (0..shape.len()).rev() {
                coord[k] += 1;
                if coord[k] < keep[k].len() {
                    break;
                }
                coord[k] = 0;
            }
        }
        Self { axes: new_axes, probs }
    }
}

impl<T: Real> Weights<T> for JointPmf<T> {
    fn axes(&self) -> &[Alphabet] {
        &self.axes
    }
    fn weights(&self) -> &[T] {
        &self.probs
    }
}

impl<T: Real> ProbabilityMass<T> for JointPmf<T> {}

/// A row-stochastic matrix: one output pmf per input letter.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Channel<T> {
    input: Alphabet,
    output: Alphabet,
    matrix: Vec<T>,
}

impl<T: Real> Channel<T> {
    pub fn new(input: Alphabet, output: Alphabet, matrix: Vec<T>) -> Result<Self> {
        if matrix.len() != input.len() * output.len() {
            return Err(Error::AlphabetMismatch(format!(
                "{}x{} channel but {} entries",
                input.len(),
                output.len(),
                matrix.len()
            )));
        }
        for (r, row) in matrix.chunks(output.len()).enumerate() {
            check_normalized(&format!("channel row {r}"), row)?;
        }
        Ok(Self { input, output, matrix })
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.is_empty() || cols == 0 || rows.iter().any(|r| r.len() != cols) {
            return Err(Error::AlphabetMismatch("channel rows must be nonempty and equal length".into()));
        }
        let input = Alphabet::indexed("X", rows.len());
        Self::new(input, Alphabet::indexed("Y", cols), rows.concat())
    }

    pub(crate) fn from_parts_unchecked(input: Alphabet, output: Alphabet, matrix: Vec<T>) -> Self {
        Self { input, output, matrix }
    }

    pub fn input(&self) -> &Alphabet {
        &self.input
    }

    pub fn output(&self) -> &Alphabet {
        &self.output
    }

    pub fn row(&self, x: usize) -> &[T] {
        let c = self.output.len();
        &self.matrix[x * c..(x + 1) * c]
    }

    pub fn get(&self, x: usize, y: usize) -> T {
        self.matrix[x * self.output.len() + y]
    }

    pub fn matrix(&self) -> &[T] {
        &self.matrix
    }

    /// Joint pmf `P_X × W` with axes (input, output).
    pub fn joint(&self, input: &Pmf<T>) -> Result<JointPmf<T>> {
        if !input.alphabet().same_labels(&self.input) {
            return Err(Error::AlphabetMismatch("input pmf does not match channel input".into()));
        }
        let c = self.output.len();
        let probs = self.matrix.iter().enumerate().map(|(i, &w)| input.probs()[i / c] * w).collect();
        Ok(JointPmf { axes: vec![self.input.clone(), self.output.clone()], probs })
    }
}

/// A Rényi order `s ∈ [0, ∞]` with the limit cases kept explicit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum RenyiOrder<T> {
    Zero,
    /// `s ∈ (0,1) ∪ (1,∞)`.
    Finite(T),
    One,
    Infinity,
}

impl<T: Real> RenyiOrder<T> {
    /// Classifies `s`. Values within [`ORDER_ONE_BAND`] of one become [`RenyiOrder::One`].
    pub fn new(s: T) -> Result<Self> {
        if s.is_nan() || s < T::zero() {
            return Err(Error::InvalidOrder(s.as_f64()));
        }
        Ok(if s == T::zero() {
            RenyiOrder::Zero
        } else if s == T::infinity() {
            RenyiOrder::Infinity
        } else if (s - T::one()).abs() < T::lit(ORDER_ONE_BAND) {
            RenyiOrder::One
        } else {
            RenyiOrder::Finite(s)
        })
    }

    pub fn value(&self) -> T {
        match *self {
            RenyiOrder::Zero => T::zero(),
            RenyiOrder::Finite(s) => s,
            RenyiOrder::One => T::one(),
            RenyiOrder::Infinity => T::infinity(),
        }
    }

    /// `Some(s)` for the generic case, `None` for the three limits.
    pub fn generic(&self) -> Option<T> {
        match *self {
            RenyiOrder::Finite(s) => Some(s),
            _ => None,
        }
    }

    pub(crate) fn require_generic(&self) -> Result<T> {
        self.generic().ok_or_else(|| Error::OrderOutOfRange {
            order: self.value().as_f64(),
            range: "(0,1)∪(1,∞)".into(),
        })
    }
}

/// `log g_s(P‖Q)` on raw slices; `+inf` on a support violation with `s > 1`,
/// `-inf` when the sum is empty (`s < 1`, disjoint supports).
pub fn log_g_slices<T: Real>(p: &[T], q: &[T], s: T) -> T {
    let one_minus = T::one() - s;
    let mut terms = Vec::with_capacity(p.len());
    for (&pi, &qi) in p.iter().zip(q) {
        if pi <= T::zero() {
            continue;
        }
        if qi <= T::zero() {
            if s > T::one() {
                return T::infinity();
            }
            continue;
        }
        terms.push(s * pi.ln() + one_minus * qi.ln());
    }
    log_sum_exp(terms)
}

/// KL divergence on raw slices.
pub fn kl_slices<T: Real>(p: &[T], q: &[T]) -> ExtReal<T> {
    let mut total = T::zero();
    for (&pi, &qi) in p.iter().zip(q) {
        if pi <= T::zero() {
            continue;
        }
        if qi <= T::zero() {
            return ExtReal::PosInfinity;
        }
        total = total + pi * (pi.ln() - qi.ln());
    }
    ExtReal::Finite(total)
}

/// `D_s(P‖Q)` on raw slices for any order.
pub fn divergence_slices<T: Real>(p: &[T], q: &[T], order: RenyiOrder<T>) -> ExtReal<T> {
    match order {
        RenyiOrder::One => kl_slices(p, q),
        RenyiOrder::Zero => {
            let mass: T = p.iter().zip(q).filter(|(&pi, _)| pi > T::zero()).map(|(_, &qi)| qi).sum();
            if mass <= T::zero() {
                ExtReal::PosInfinity
            } else {
                ExtReal::Finite(-mass.ln())
            }
        }
        RenyiOrder::Infinity => {
            let mut best = T::neg_infinity();
            for (&pi, &qi) in p.iter().zip(q) {
                if pi <= T::zero() {
                    continue;
                }
                if qi <= T::zero() {
                    return ExtReal::PosInfinity;
                }
                best = best.max(pi.ln() - qi.ln());
            }
            ExtReal::Finite(best)
        }
        RenyiOrder::Finite(s) => {
            let lg = log_g_slices(p, q, s);
            ExtReal::from_float(lg / (s - T::one()))
        }
    }
}

/// `g_s(P‖Q) = Σ_{P(x)>0} P(x)^s Q(x)^{1-s}` for `s ∈ (0,1) ∪ (1,∞)`.
pub fn g_s<T: Real>(
    p: &impl ProbabilityMass<T>,
    q: &impl Weights<T>,
    s: RenyiOrder<T>,
) -> Result<ExtReal<T>> {
    check_same_domain(p, q)?;
    check_entries("second argument", q.weights())?;
    let s = s.require_generic()?;
    Ok(ExtReal::from_float(log_g_slices(p.weights(), q.weights(), s).exp()))
}

/// Rényi divergence `D_s(P‖Q)` in nats for any `s ∈ [0, ∞]`.
///
/// `Q` may be any nonnegative function; for a scalar `v > 0`,
/// `D_s(P‖vQ) = D_s(P‖Q) − log v`.
pub fn renyi_divergence<T: Real>(
    p: &impl ProbabilityMass<T>,
    q: &impl Weights<T>,
    s: RenyiOrder<T>,
) -> Result<ExtReal<T>> {
    check_same_domain(p, q)?;
    check_entries("second argument", q.weights())?;
    Ok(divergence_slices(p.weights(), q.weights(), s))
}

/// Kullback–Leibler divergence `D(P‖Q)` in nats.
pub fn kl_divergence<T: Real>(p: &impl ProbabilityMass<T>, q: &impl Weights<T>) -> Result<ExtReal<T>> {
    renyi_divergence(p, q, RenyiOrder::One)
}

/// Variance of the log-likelihood ratio `log P/Q` under `P`.
pub fn loglik_variance<T: Real>(p: &impl ProbabilityMass<T>, q: &impl Weights<T>) -> Result<T> {
    check_same_domain(p, q)?;
    check_entries("second argument", q.weights())?;
    variance_slices(p.weights(), q.weights())
}

pub(crate) fn variance_slices<T: Real>(p: &[T], q: &[T]) -> Result<T> {
    let d = kl_slices(p, q)
        .finite()
        .ok_or_else(|| Error::SupportViolation("supp P is not contained in supp Q".into()))?;
    let mut v = T::zero();
    for (&pi, &qi) in p.iter().zip(q) {
        if pi > T::zero() {
            let dev = pi.ln() - qi.ln() - d;
            v = v + pi * dev * dev;
        }
    }
    Ok(v)
}
