//! Method-of-types combinatorics and the universal distribution and channel.
//!
//! All masses are kept as natural logarithms. A type of length `n` over an
//! alphabet of size `d` is a composition of `n` into `d` parts; types are
//! always listed in descending lexicographic order of their counts.

mod dominance;
mod table;

pub use dominance::{
    channel_dominance, distribution_dominance, symmetrized_channel_logprob, symmetrized_product_logprob,
    DominanceReport,
};
pub use table::{
    alpha_of_test, beta_iid, beta_universal_bound, build_lr_test, d_s_p_u, log_alpha_of_test, log_beta_iid,
    log_beta_universal_bound, lr_threshold, PerTypeTest, TypeTable,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default limit on the number of enumerated types.
pub const DEFAULT_TYPE_CAP: u64 = 5_000_000;

/// `ln k!` for `k = 0..len`, by cumulative summation.
#[derive(Clone, Debug)]
pub struct LogFactorials(Vec<f64>);

impl LogFactorials {
    pub fn new(max: usize) -> Self {
        let mut v = Vec::with_capacity(max + 1);
        let mut acc = 0.0;
        v.push(0.0);
        for k in 1..=max {
            acc += (k as f64).ln();
            v.push(acc);
        }
        Self(v)
    }

    pub fn get(&self, k: usize) -> f64 {
        self.0[k]
    }

    /// `ln C(a, b)`.
    pub fn binomial(&self, a: usize, b: usize) -> f64 {
        self.get(a) - self.get(b) - self.get(a - b)
    }

    /// `ln (n! / Π c_i!)` with `n = Σ c_i`.
    pub fn multinomial(&self, counts: &[u32]) -> f64 {
        let n: usize = counts.iter().map(|&c| c as usize).sum();
        self.get(n) - counts.iter().map(|&c| self.get(c as usize)).sum::<f64>()
    }
}

/// Number of types `C(n+d-1, d-1)` as a float.
pub fn type_count(d: usize, n: usize) -> f64 {
    (1..d).fold(1.0, |acc, i| acc * (n + i) as f64 / i as f64)
}

/// `ln |T_n|` for an alphabet of size `d`.
pub fn log_type_count(d: usize, n: usize) -> f64 {
    let lf = LogFactorials::new(n + d);
    lf.binomial(n + d - 1, d - 1)
}

/// A composition of `n` with the log of the number of sequences of that type.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TypeClass {
    pub counts: Vec<u32>,
    pub log_multiplicity: f64,
}

impl TypeClass {
    pub fn n(&self) -> usize {
        self.counts.iter().map(|&c| c as usize).sum()
    }
}

fn check_cap(d: usize, n: usize, cap: u64) -> Result<()> {
    let count = type_count(d, n);
    if count > cap as f64 {
        return Err(Error::CapacityExceeded { count, cap });
    }
    Ok(())
}

/// Raw compositions of `n` into `d` parts, descending lexicographic.
pub(crate) fn compositions(d: usize, n: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; d];
    fn rec(pos: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if pos + 1 == cur.len() {
            cur[pos] = left;
            out.push(cur.clone());
            return;
        }
        for c in (0..=left).rev() {
            cur[pos] = c;
            rec(pos + 1, left - c, cur, out);
        }
    }
    rec(0, n as u32, &mut cur, &mut out);
    out
}

/// All types of length `n` over an alphabet of size `d`.
pub fn enumerate_types(d: usize, n: usize, cap: u64) -> Result<Vec<TypeClass>> {
    if d == 0 || n == 0 {
        return Err(Error::InvalidArgument("alphabet size and n must be positive".into()));
    }
    check_cap(d, n, cap)?;
    let lf = LogFactorials::new(n);
    Ok(compositions(d, n)
        .into_iter()
        .map(|counts| {
            let log_multiplicity = lf.multinomial(&counts);
            TypeClass { counts, log_multiplicity }
        })
        .collect())
}

/// The universal distribution: uniform over types, uniform within a type.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniversalDistribution {
    pub n: usize,
    pub alphabet_size: usize,
    /// `ln |T_n|`, also the log of the dominance constant `v(n)`.
    pub log_num_types: f64,
}

pub fn universal_dist(alphabet_size: usize, n: usize, cap: u64) -> Result<UniversalDistribution> {
    if alphabet_size == 0 || n == 0 {
        return Err(Error::InvalidArgument("alphabet size and n must be positive".into()));
    }
    check_cap(alphabet_size, n, cap)?;
    Ok(UniversalDistribution { n, alphabet_size, log_num_types: log_type_count(alphabet_size, n) })
}

/// `ln U^n(x^n)` for a sequence of the given type.
pub fn universal_logprob(u: &UniversalDistribution, ty: &TypeClass) -> Result<f64> {
    if ty.counts.len() != u.alphabet_size || ty.n() != u.n {
        return Err(Error::InvalidArgument("type does not match the universal distribution".into()));
    }
    Ok(-u.log_num_types - ty.log_multiplicity)
}

/// The universal permutation-covariant channel from an input alphabet of size
/// `in_size` to an output alphabet of size `out_size`. Joint types are
/// compositions over the input-major product alphabet.
#[derive(Clone, Debug)]
pub struct UniversalChannel {
    pub n: usize,
    pub in_size: usize,
    pub out_size: usize,
    /// `ln |T_n(X × Y)|`, the log of the dominance constant.
    pub log_num_joint_types: f64,
    lf: LogFactorials,
}

pub fn universal_channel(in_size: usize, out_size: usize, n: usize, cap: u64) -> Result<UniversalChannel> {
    if in_size == 0 || out_size == 0 || n == 0 {
        return Err(Error::InvalidArgument("alphabet sizes and n must be positive".into()));
    }
    check_cap(in_size * out_size, n, cap)?;
    Ok(UniversalChannel {
        n,
        in_size,
        out_size,
        log_num_joint_types: log_type_count(in_size * out_size, n),
        lf: LogFactorials::new(n + in_size * out_size),
    })
}

impl UniversalChannel {
    /// Input marginal of a joint type.
    pub fn input_type(&self, joint: &[u32]) -> Vec<u32> {
        joint.chunks(self.out_size).map(|row| row.iter().sum()).collect()
    }

    /// `ln |{κ : κ_X = λ_X}| = Σ_x ln C(λ_X(x) + |Y| − 1, |Y| − 1)`.
    pub fn log_compatible(&self, input_counts: &[u32]) -> f64 {
        input_counts
            .iter()
            .map(|&c| self.lf.binomial(c as usize + self.out_size - 1, self.out_size - 1))
            .sum()
    }

    /// `ln ũ(λ_XY) = ln #λ_X − ln |{κ : κ_X = λ_X}|`.
    pub fn log_weight(&self, joint: &[u32]) -> f64 {
        let input = self.input_type(joint);
        self.lf.multinomial(&input) - self.log_compatible(&input)
    }

    /// `ln U(y^n | x^n)` for a pair of sequences with joint type `joint`.
    pub fn log_prob_sequence(&self, joint: &[u32]) -> f64 {
        self.log_weight(joint) - self.lf.multinomial(joint)
    }

    /// Largest deviation of `Σ_{λ: λ_X = μ} ũ(λ)/#μ` from one over all input types `μ`.
    pub fn row_normalization_error(&self, cap: u64) -> Result<f64> {
        let joints = enumerate_types(self.in_size * self.out_size, self.n, cap)?;
        let mut sums: std::collections::BTreeMap<Vec<u32>, f64> = Default::default();
        for j in &joints {
            let mu = self.input_type(&j.counts);
            let term = (self.log_weight(&j.counts) - self.lf.multinomial(&mu)).exp();
            *sums.entry(mu).or_default() += term;
        }
        Ok(sums.values().map(|s| (s - 1.0).abs()).fold(0.0, f64::max))
    }
}
