//! Problem specification: a versioned TOML document.

use std::path::{Path, PathBuf};

use renyi_hyp::{FamilySpec64, JointPmf64, MeasureKind, Pmf64, RenyiOrder};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const SPEC_VERSION: u32 = 1;

/// A probability table: flat row-major `probs` with its `shape`, given inline
/// or through `file`, a path (relative to the spec) to a TOML document with
/// the same keys.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub file: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shape: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probs: Option<Vec<f64>>,
    /// Axis names; defaults to X, Y, Z.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axes: Option<Vec<String>>,
}

fn default_fixed_axes() -> Vec<usize> {
    vec![0]
}
fn default_free_axes() -> Vec<usize> {
    vec![1]
}
fn ax(i: usize) -> Vec<usize> {
    vec![i]
}
fn x_axis() -> Vec<usize> {
    ax(0)
}
fn y_axis() -> Vec<usize> {
    ax(1)
}
fn z_axis() -> Vec<usize> {
    ax(2)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FamilyInput {
    /// A single alternative `q`.
    Singleton { q: TableSpec },
    /// `T × Q_free` with `T` fixed; `fixed` defaults to the null's marginal on `fixed_axes`.
    #[serde(alias = "fixed-marginal")]
    Sibson {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        fixed: Option<Vec<f64>>,
        #[serde(default = "default_fixed_axes")]
        fixed_axes: Vec<usize>,
        #[serde(default = "default_free_axes")]
        free_axes: Vec<usize>,
    },
    /// Either `k` (single-axis invariant factors plus the last axis) or explicit blocks.
    GeneralProduct {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        k: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        invariant_factors: Option<Vec<Vec<usize>>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        unconstrained: Option<Vec<usize>>,
    },
    MarkovRecovery {
        #[serde(default = "x_axis")]
        x: Vec<usize>,
        #[serde(default = "y_axis")]
        y: Vec<usize>,
        #[serde(default = "z_axis")]
        z: Vec<usize>,
    },
    MarkovAll {
        #[serde(default = "x_axis")]
        x: Vec<usize>,
        #[serde(default = "y_axis")]
        y: Vec<usize>,
        #[serde(default = "z_axis")]
        z: Vec<usize>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OracleOptions {
    /// Lattice points per edge of each free simplex in composite member grids.
    pub grid_resolution: usize,
    pub max_members: usize,
    pub type_cap: u64,
    /// Include a `ln n` regressor in exponent fits.
    pub log_n_regressor: bool,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self {
            grid_resolution: renyi_hyp::oracle::DEFAULT_GRID_RESOLUTION,
            max_members: renyi_hyp::oracle::DEFAULT_MAX_MEMBERS,
            type_cap: renyi_hyp::types::DEFAULT_TYPE_CAP,
            log_n_regressor: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverInput {
    pub tol: f64,
    pub max_sweeps: usize,
}

impl Default for SolverInput {
    fn default() -> Self {
        let d = renyi_hyp::SolverOptions::<f64>::default();
        Self { tol: d.tol, max_sweeps: d.max_sweeps }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct UniversalOptions {
    /// Random symmetrized members per dominance check.
    pub members: usize,
    pub seed: u64,
    /// Dominance checks are skipped when the number of sequences exceeds this.
    pub max_sequences: u64,
    /// ... or when `n` exceeds this: each point sums over all `n!` orderings.
    pub max_dominance_n: usize,
    pub slack: f64,
}

impl Default for UniversalOptions {
    fn default() -> Self {
        Self { members: 20, seed: 0, max_sequences: 100_000, max_dominance_n: 5, slack: 1e-12 }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    #[default]
    Report,
    Table,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputOptions {
    pub format: OutputFormat,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub spec_version: u32,
    pub null: TableSpec,
    pub family: FamilyInput,
    /// Rényi orders `s` for the measure and universal jobs.
    #[serde(default, with = "crate::quantity::ext_f64_vec")]
    pub orders: Vec<f64>,
    /// Closed-form measures evaluated at every order.
    #[serde(default)]
    pub measures: Vec<MeasureKind>,
    /// Type-II rates in nats per symbol.
    #[serde(default, with = "crate::quantity::ext_f64_vec")]
    pub rates: Vec<f64>,
    /// Rates given as multiples of the threshold rate.
    #[serde(default, with = "crate::quantity::ext_f64_vec")]
    pub rate_multiples: Vec<f64>,
    /// Blocklengths for the verify and universal jobs.
    #[serde(default)]
    pub n: Vec<usize>,
    #[serde(default)]
    pub oracle: OracleOptions,
    #[serde(default)]
    pub solver: SolverInput,
    #[serde(default)]
    pub universal: UniversalOptions,
    #[serde(default)]
    pub output: OutputOptions,
}

/// A parsed spec with its resolved objects and validation warnings.
#[derive(Clone, Debug)]
pub struct ParsedSpec {
    pub spec: ProblemSpec,
    pub null: JointPmf64,
    pub family: FamilySpec64,
    pub warnings: Vec<String>,
}

fn resolve_table(table: &TableSpec, what: &str, base_dir: &Path) -> Result<TableSpec, CliError> {
    let Some(file) = &table.file else { return Ok(table.clone()) };
    if table.shape.is_some() || table.probs.is_some() {
        return Err(CliError::Spec(format!("[{what}]: give either `file` or inline `shape`/`probs`, not both")));
    }
    let path: PathBuf = base_dir.join(file);
    let text = std::fs::read_to_string(&path)
        .map_err(|e| CliError::Spec(format!("[{what}]: cannot read {}: {e}", path.display())))?;
    let loaded: TableSpec =
        toml::from_str(&text).map_err(|e| CliError::Spec(format!("[{what}] file {}: {e}", path.display())))?;
    if loaded.file.is_some() {
        return Err(CliError::Spec(format!("[{what}] file {}: nested `file` references are not allowed", path.display())));
    }
    Ok(loaded)
}

fn build_joint(table: &TableSpec, what: &str) -> Result<JointPmf64, CliError> {
    let (Some(shape), Some(probs)) = (&table.shape, &table.probs) else {
        return Err(CliError::Spec(format!("[{what}]: `shape` and `probs` are required")));
    };
    let joint = JointPmf64::from_shape(shape, probs.clone()).map_err(|e| CliError::Spec(format!("[{what}]: {e}")))?;
    match &table.axes {
        None => Ok(joint),
        Some(names) if names.len() == shape.len() => {
            let axes = joint
                .axes()
                .iter()
                .zip(names)
                .map(|(a, name)| renyi_hyp::Alphabet::new(name.clone(), a.labels().to_vec()))
                .collect::<renyi_hyp::Result<Vec<_>>>()
                .map_err(|e| CliError::Spec(format!("[{what}].axes: {e}")))?;
            JointPmf64::new(axes, probs.clone()).map_err(|e| CliError::Spec(format!("[{what}]: {e}")))
        }
        Some(names) => Err(CliError::Spec(format!("[{what}].axes: {} names for {} axes", names.len(), shape.len()))),
    }
}

fn build_family(input: &FamilyInput, null: &JointPmf64, base_dir: &Path) -> Result<(FamilyInput, FamilySpec64), CliError> {
    let bad = |e: renyi_hyp::Error| CliError::Spec(format!("[family]: {e}"));
    let family = match input {
        FamilyInput::Singleton { q } => {
            let q_table = resolve_table(q, "family.q", base_dir)?;
            let q = build_joint(&q_table, "family.q")?;
            let family = FamilySpec64::Singleton { q };
            return Ok((FamilyInput::Singleton { q: q_table }, family));
        }
        FamilyInput::Sibson { fixed, fixed_axes, free_axes } => {
            let fixed = match fixed {
                Some(v) => {
                    let alphabet = null.group_alphabet(fixed_axes).map_err(bad)?;
                    Pmf64::new(alphabet, v.clone()).map_err(|e| CliError::Spec(format!("[family].fixed: {e}")))?
                }
                None => null.group_marginal(fixed_axes).map_err(bad)?,
            };
            FamilySpec64::FixedMarginalProduct { fixed, fixed_axes: fixed_axes.clone(), free_axes: free_axes.clone() }
        }
        FamilyInput::GeneralProduct { k, invariant_factors, unconstrained } => match (k, invariant_factors) {
            (Some(k), None) if unconstrained.is_none() => {
                if null.num_axes() != k + 1 {
                    return Err(CliError::Spec(format!(
                        "[family]: general-product with k = {k} needs a null with {} axes, got {}",
                        k + 1,
                        null.num_axes()
                    )));
                }
                FamilySpec64::general_product(*k)
            }
            (None, Some(blocks)) => FamilySpec64::GeneralProduct {
                invariant_factors: blocks.clone(),
                unconstrained: unconstrained.clone(),
            },
            _ => {
                return Err(CliError::Spec(
                    "[family]: general-product takes either `k` or `invariant_factors` (with optional `unconstrained`)".into(),
                ))
            }
        },
        FamilyInput::MarkovRecovery { x, y, z } => FamilySpec64::MarkovRecovery { x: x.clone(), y: y.clone(), z: z.clone() },
        FamilyInput::MarkovAll { x, y, z } => FamilySpec64::MarkovAll { x: x.clone(), y: y.clone(), z: z.clone() },
    };
    family.validate(null).map_err(bad)?;
    Ok((input.clone(), family))
}

fn check_values(values: &[f64], what: &str, allow_inf: bool) -> Result<(), CliError> {
    for (i, &v) in values.iter().enumerate() {
        if v.is_nan() || (v.is_infinite() && !allow_inf) || v < 0.0 {
            return Err(CliError::Spec(format!("{what}[{i}] = {v} is not a valid value")));
        }
    }
    Ok(())
}

/// Parses and validates a spec. File references are resolved against
/// `base_dir` and inlined, so the returned spec is self-contained.
pub fn parse_spec(text: &str, base_dir: &Path) -> Result<ParsedSpec, CliError> {
    let mut spec: ProblemSpec = toml::from_str(text).map_err(|e| CliError::Spec(e.to_string()))?;
    if spec.spec_version != SPEC_VERSION {
        return Err(CliError::Spec(format!(
            "spec_version {} is not supported (expected {SPEC_VERSION})",
            spec.spec_version
        )));
    }
    spec.null = resolve_table(&spec.null, "null", base_dir)?;
    let null = build_joint(&spec.null, "null")?;
    let (family_input, family) = build_family(&spec.family, &null, base_dir)?;
    spec.family = family_input;

    check_values(&spec.orders, "orders", true)?;
    check_values(&spec.rates, "rates", false)?;
    check_values(&spec.rate_multiples, "rate_multiples", false)?;
    if let Some(i) = spec.n.iter().position(|&n| n == 0) {
        return Err(CliError::Spec(format!("n[{i}] must be positive")));
    }
    if spec.oracle.grid_resolution < 2 {
        return Err(CliError::Spec("oracle.grid_resolution must be at least 2".into()));
    }
    if spec.solver.tol.is_nan() || spec.solver.tol <= 0.0 || spec.solver.max_sweeps == 0 {
        return Err(CliError::Spec("solver.tol and solver.max_sweeps must be positive".into()));
    }
    for kind in &spec.measures {
        if kind.num_axes() != null.num_axes() {
            return Err(CliError::Spec(format!(
                "measures: {kind:?} needs {} axes, the null has {}",
                kind.num_axes(),
                null.num_axes()
            )));
        }
    }

    let mut warnings = Vec::new();
    let validity = family.validity();
    for &s in &spec.orders {
        let order = RenyiOrder::new(s).map_err(|e| CliError::Spec(format!("orders: {e}")))?;
        if !family.admits(order) {
            warnings.push(format!("order s = {s} is outside the validity interval {validity} of {}", family.name()));
        }
    }
    Ok(ParsedSpec { spec, null, family, warnings })
}

/// The grids a command needs.
pub fn check_for_command(spec: &ProblemSpec, command: crate::Command) -> Result<(), CliError> {
    use crate::Command::*;
    let missing = |what: &str| Err(CliError::Spec(format!("the {} job needs a nonempty `{what}`", command.name())));
    match command {
        Measure if spec.orders.is_empty() => missing("orders"),
        Exponents | Verify if spec.rates.is_empty() && spec.rate_multiples.is_empty() => missing("rates` or `rate_multiples"),
        Verify | Universal if spec.n.is_empty() => missing("n"),
        _ => Ok(()),
    }
}
