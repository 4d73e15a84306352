//! Rényi divergence minimization over composite hypothesis families, error and
//! strong converse exponents, and exact finite-blocklength test oracles.
//!
//! [`prob`] and [`families`] are generic over the scalar type ([`Real`], for
//! `f32` and `f64`); the aliases below fix it to `f64`.

pub mod error;
pub mod exponents;
pub mod families;
pub mod num;
pub mod oracle;
pub mod prob;
pub mod types;

pub use error::{Error, Result};
pub use families::{
    alt_min_markov, alt_min_product, closed_form_measure, family_divergence, family_divergence_with, gallager_e0,
    gallager_e0_standard, sibson_minimize, Argmin, FamilySpec, Interval, MeasureKind, MinimizerResult, SolverOptions,
};
pub use exponents::{
    critical_rate, error_exponent, normal_cdf, psi, sc_exponent, second_order_alpha, threshold_rate, ExponentKind,
    ExponentReport, PhiCurve,
};
pub use num::{ExtReal, Real};
pub use oracle::{composite_lp, exponent_fit, member_grid, np_simple, ExponentSample, FitMode, FitResult, OracleResult};
pub use types::{
    alpha_of_test, beta_iid, beta_universal_bound, build_lr_test, enumerate_types, lr_threshold, universal_channel,
    universal_dist, universal_logprob, PerTypeTest, TypeClass, TypeTable, UniversalChannel, UniversalDistribution,
};
pub use prob::{
    g_s, kl_divergence, loglik_variance, renyi_divergence, Alphabet, Channel, JointPmf, Measure, Pmf, RenyiOrder,
};

pub type Pmf64 = Pmf<f64>;
pub type Pmf32 = Pmf<f32>;
pub type JointPmf64 = JointPmf<f64>;
pub type JointPmf32 = JointPmf<f32>;
pub type Channel64 = Channel<f64>;
pub type Order64 = RenyiOrder<f64>;
pub type FamilySpec64 = FamilySpec<f64>;
pub type MinimizerResult64 = MinimizerResult<f64>;
