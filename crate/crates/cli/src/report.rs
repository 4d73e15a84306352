//! Report schema and its tabular export.

use renyi_hyp::{ExponentKind, FitMode, MeasureKind};
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::quantity::{Quantity, Unit};
use crate::spec::ProblemSpec;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    /// Mirrors `spec_version` of the input.
    pub report_version: u32,
    pub command: String,
    pub provenance: Provenance,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    /// Labels of minimizations that stopped at the sweep limit.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub non_converged: Vec<String>,
    /// The validated spec, with file references inlined.
    pub spec: ProblemSpec,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub measures: Vec<MeasureRow>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exponents: Option<ExponentSection>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub verify: Vec<VerifyRate>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub universal: Vec<UniversalRow>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    /// Seconds since the Unix epoch; omitted with `--no-timestamp`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generated_at_unix: Option<u64>,
    pub tolerances: Tolerances,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Per-entry stopping threshold of the alternating solvers.
    pub solver_tol: Quantity,
    pub max_sweeps: Quantity,
    /// Orders this close to one are treated as one.
    pub order_one_band: Quantity,
    pub lp_feasibility: Quantity,
    pub type_cap: Quantity,
    pub grid_resolution: Quantity,
    pub max_members: Quantity,
}

/// A joint pmf in row-major order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub unit: Unit,
    pub shape: Vec<usize>,
    pub probs: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureRow {
    pub s: Quantity,
    pub family: FamilyValue,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub measures: Vec<NamedMeasure>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyValue {
    /// `D_s(P‖family)`.
    pub value: Quantity,
    pub iterations: Quantity,
    pub converged: bool,
    pub within_validity: bool,
    /// The minimizing member.
    pub argmin: Table,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NamedMeasure {
    pub kind: MeasureKind,
    pub value: Quantity,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentSection {
    /// `D(P‖family)`.
    pub threshold: Quantity,
    pub variance: Quantity,
    /// `α` limits at budgets `exp(−nD − √n r)`; empty when the variance vanishes.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub second_order: Vec<SecondOrderPoint>,
    pub rows: Vec<ExponentRow>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SecondOrderPoint {
    pub r: Quantity,
    pub alpha: Quantity,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentRow {
    pub rate: Quantity,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub multiple_of_threshold: Option<Quantity>,
    pub error: ExponentValue,
    pub strong_converse: ExponentValue,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentValue {
    pub value: Quantity,
    /// Supremum found by direct search, as a cross-check of `value`.
    pub direct_value: Quantity,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub optimizing_order: Option<Quantity>,
    pub equality_guaranteed: bool,
    pub critical_rate: Quantity,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyRate {
    pub rate: Quantity,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub multiple_of_threshold: Option<Quantity>,
    /// `np-simple` for a singleton family, `composite-lp` otherwise.
    pub oracle: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub members: Option<Quantity>,
    /// Absent exactly at the threshold, where both exponents vanish.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theory: Option<TheoryValue>,
    pub points: Vec<VerifyPoint>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit: Option<FitOut>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TheoryValue {
    pub kind: ExponentKind,
    pub value: Quantity,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub optimizing_order: Option<Quantity>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyPoint {
    pub n: Quantity,
    /// `ln μ = −nR`.
    pub log_budget: Quantity,
    pub alpha_hat: Quantity,
    pub log_alpha: Quantity,
    pub log_one_minus_alpha: Quantity,
    /// Largest `ln β` over the constrained alternatives.
    pub max_log_beta: Quantity,
    /// Type-I error of the universal likelihood-ratio test at the optimizing order.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub universal_test_alpha: Option<Quantity>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitOut {
    pub mode: FitMode,
    pub slope: Quantity,
    pub intercept: Quantity,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub log_n_coef: Option<Quantity>,
    pub residual: Quantity,
    pub points_used: Quantity,
    pub theory: Quantity,
    pub relative_error: Quantity,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniversalRow {
    pub n: Quantity,
    pub alphabet_size: Quantity,
    /// `ln |T_n|` for the full joint alphabet.
    pub log_num_types: Quantity,
    /// `ln v(n)` of the family's universal distribution.
    pub family_log_v: Quantity,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub divergences: Vec<UniversalDivergence>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distribution_dominance: Option<Dominance>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub channel_dominance: Option<Dominance>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniversalDivergence {
    pub s: Quantity,
    /// `D_s(P^n‖U^n)`.
    pub d_s_p_u: Quantity,
    /// `n·D_s(P‖family)`.
    pub n_family_value: Quantity,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dominance {
    pub members: Quantity,
    pub points_checked: Quantity,
    pub violations: Quantity,
    /// Largest `ln(Q/(v·U))` seen.
    pub max_log_ratio: Quantity,
    pub log_v: Quantity,
}

fn fmt(v: f64) -> String {
    if v.is_finite() {
        format!("{v:?}")
    } else if v.is_nan() {
        "nan".into()
    } else if v > 0.0 {
        "+inf".into()
    } else {
        "-inf".into()
    }
}

fn opt(q: Option<Quantity>) -> String {
    q.map(|q| fmt(q.value)).unwrap_or_default()
}

impl Report {
    pub fn to_json(&self) -> Result<String, CliError> {
        let mut text = serde_json::to_string_pretty(self).map_err(|e| CliError::Io(e.to_string()))?;
        text.push('\n');
        Ok(text)
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Io(e.to_string()))
    }

    /// Flat CSV export: one row per order, rate or blocklength.
    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let res: csv::Result<()> = (|| {
            match self.command.as_str() {
                "measure" => {
                    let kinds: Vec<MeasureKind> = self.spec.measures.clone();
                    let mut header = vec!["s", "family_value_nats", "converged", "within_validity", "iterations"]
                        .into_iter()
                        .map(String::from)
                        .collect::<Vec<_>>();
                    header.extend(kinds.iter().map(|k| format!("{}_nats", kind_name(*k))));
                    w.write_record(header)?;
                    for r in &self.measures {
                        let mut row = vec![
                            fmt(r.s.value),
                            fmt(r.family.value.value),
                            r.family.converged.to_string(),
                            r.family.within_validity.to_string(),
                            fmt(r.family.iterations.value),
                        ];
                        row.extend(r.measures.iter().map(|m| fmt(m.value.value)));
                        w.write_record(row)?;
                    }
                }
                "exponents" => {
                    w.write_record([
                            "rate_nats_per_symbol",
                            "error_exponent",
                            "error_order",
                            "error_equality_guaranteed",
                            "sc_exponent",
                            "sc_order",
                            "sc_equality_guaranteed",
                        ]
                        .map(String::from)
                        .to_vec(),
                    )?;
                    for r in self.exponents.iter().flat_map(|e| &e.rows) {
                        w.write_record(vec![
                                fmt(r.rate.value),
                                fmt(r.error.value.value),
                                opt(r.error.optimizing_order),
                                r.error.equality_guaranteed.to_string(),
                                fmt(r.strong_converse.value.value),
                                opt(r.strong_converse.optimizing_order),
                                r.strong_converse.equality_guaranteed.to_string(),
                            ],
                        )?;
                    }
                }
                "verify" => {
                    w.write_record([
                            "rate_nats_per_symbol",
                            "n",
                            "alpha_hat",
                            "log_alpha",
                            "log_one_minus_alpha",
                            "max_log_beta",
                            "universal_test_alpha",
                        ]
                        .map(String::from)
                        .to_vec(),
                    )?;
                    for r in &self.verify {
                        for p in &r.points {
                            w.write_record(vec![
                                    fmt(r.rate.value),
                                    fmt(p.n.value),
                                    fmt(p.alpha_hat.value),
                                    fmt(p.log_alpha.value),
                                    fmt(p.log_one_minus_alpha.value),
                                    fmt(p.max_log_beta.value),
                                    opt(p.universal_test_alpha),
                                ],
                            )?;
                        }
                    }
                }
                _ => {
                    w.write_record(["n", "log_num_types", "family_log_v", "distribution_violations", "channel_violations"]
                            .map(String::from)
                            .to_vec(),
                    )?;
                    for r in &self.universal {
                        w.write_record(vec![
                                fmt(r.n.value),
                                fmt(r.log_num_types.value),
                                fmt(r.family_log_v.value),
                                opt(r.distribution_dominance.as_ref().map(|d| d.violations)),
                                opt(r.channel_dominance.as_ref().map(|d| d.violations)),
                            ],
                        )?;
                    }
                }
            }
            Ok(())
        })();
        res.map_err(|e| CliError::Io(e.to_string()))?;
        let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| CliError::Io(e.to_string()))
    }
}

fn kind_name(k: MeasureKind) -> String {
    serde_json::to_value(k).ok().and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_else(|| format!("{k:?}"))
}
