//! The four jobs. Each one fans its rows out over rayon and collects them in
//! spec order, so reports do not depend on the thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use renyi_hyp::exponents::family_variance;
use renyi_hyp::types::{channel_dominance, d_s_p_u, distribution_dominance, log_alpha_of_test, log_type_count, DominanceReport};
use renyi_hyp::{
    build_lr_test, closed_form_measure, composite_lp, error_exponent, exponent_fit, family_divergence_with, lr_threshold,
    member_grid, np_simple, sc_exponent, second_order_alpha, ExponentKind, ExponentReport, ExponentSample, FamilySpec,
    FitMode, JointPmf64, Order64, PhiCurve, SolverOptions, TypeTable,
};

use crate::error::CliError;
use crate::quantity::{Quantity, Unit};
use crate::report::*;
use crate::spec::ParsedSpec;

const SECOND_ORDER_OFFSETS: [f64; 5] = [-2.0, -1.0, 0.0, 1.0, 2.0];

fn order(s: f64, job: &str) -> Result<Order64, CliError> {
    Order64::new(s).map_err(|e| CliError::numeric(job, e))
}

pub(crate) fn solver_options(parsed: &ParsedSpec, allow_outside: bool) -> SolverOptions<f64> {
    SolverOptions {
        tol: parsed.spec.solver.tol,
        max_sweeps: parsed.spec.solver.max_sweeps,
        allow_outside_validity: allow_outside,
    }
}

fn table(p: &JointPmf64) -> Table {
    Table { unit: Unit::Probability, shape: p.shape(), probs: p.probs().to_vec() }
}

pub(crate) fn measure(parsed: &ParsedSpec, non_converged: &mut Vec<String>) -> Result<Vec<MeasureRow>, CliError> {
    let opts = solver_options(parsed, true);
    let rows = parsed
        .spec
        .orders
        .par_iter()
        .map(|&s| {
            let job = format!("measure s = {s}");
            let o = order(s, &job)?;
            let r = family_divergence_with(&parsed.null, &parsed.family, o, &opts)
                .map_err(|e| CliError::numeric(&job, e))?;
            let measures = parsed
                .spec
                .measures
                .iter()
                .map(|&kind| {
                    let m = closed_form_measure(kind, &parsed.null, o)
                        .map_err(|e| CliError::numeric(format!("{job}, {kind:?}"), e))?;
                    Ok(NamedMeasure { kind, value: Quantity::nats(m.value.to_float()) })
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            let family = FamilyValue {
                value: Quantity::nats(r.value.to_float()),
                iterations: Quantity::new(r.iterations as f64, Unit::Sweeps),
                converged: r.converged,
                within_validity: r.within_validity,
                argmin: table(&r.assembled),
            };
            Ok(MeasureRow { s: Quantity::order(s), family, measures })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    non_converged.extend(rows.iter().filter(|r| !r.family.converged).map(|r| format!("measure s = {}", r.s.value)));
    Ok(rows)
}

fn curve(parsed: &ParsedSpec, non_converged: &mut Vec<String>) -> Result<PhiCurve, CliError> {
    let curve = PhiCurve::with_options(parsed.null.clone(), parsed.family.clone(), solver_options(parsed, false))
        .map_err(|e| CliError::numeric("threshold", e))?;
    if !curve.minimizer_at_one().converged {
        non_converged.push("threshold minimizer (s = 1)".into());
    }
    Ok(curve)
}

/// Absolute rates first, then multiples of the threshold.
fn rate_grid(parsed: &ParsedSpec, threshold: f64) -> Vec<(f64, Option<Quantity>)> {
    let spec = &parsed.spec;
    spec.rates
        .iter()
        .map(|&r| (r, None))
        .chain(spec.rate_multiples.iter().map(|&m| (m * threshold, Some(Quantity::new(m, Unit::Ratio)))))
        .collect()
}

fn exponent_value(r: &ExponentReport) -> ExponentValue {
    ExponentValue {
        value: Quantity::rate(r.value),
        direct_value: Quantity::rate(r.direct_value),
        optimizing_order: r.optimizing_order.map(Quantity::order),
        equality_guaranteed: r.equality_guaranteed,
        critical_rate: Quantity::rate(r.critical_rate),
    }
}

pub(crate) fn exponents(parsed: &ParsedSpec, non_converged: &mut Vec<String>) -> Result<ExponentSection, CliError> {
    let curve = curve(parsed, non_converged)?;
    let threshold = curve.threshold();
    let variance = family_variance(&curve).map_err(|e| CliError::numeric("variance", e))?;
    let second_order = if variance > 0.0 {
        SECOND_ORDER_OFFSETS
            .iter()
            .map(|&r| {
                let a = second_order_alpha(&curve, r).map_err(|e| CliError::numeric("second order", e))?;
                Ok(SecondOrderPoint { r: Quantity::new(r, Unit::NatsPerSqrtSymbol), alpha: Quantity::prob(a) })
            })
            .collect::<Result<Vec<_>, CliError>>()?
    } else {
        Vec::new()
    };
    let rows = rate_grid(parsed, threshold)
        .into_par_iter()
        .map(|(rate, multiple)| {
            let job = format!("exponents R = {rate}");
            let e = error_exponent(&curve, rate).map_err(|e| CliError::numeric(&job, e))?;
            let sc = sc_exponent(&curve, rate).map_err(|e| CliError::numeric(&job, e))?;
            Ok(ExponentRow {
                rate: Quantity::rate(rate),
                multiple_of_threshold: multiple,
                error: exponent_value(&e),
                strong_converse: exponent_value(&sc),
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(ExponentSection {
        threshold: Quantity::rate(threshold),
        variance: Quantity::new(variance, Unit::NatsSquared),
        second_order,
        rows,
    })
}

fn theory(curve: &PhiCurve, rate: f64, job: &str) -> Result<Option<TheoryValue>, CliError> {
    let threshold = curve.threshold();
    let r = if rate < threshold {
        error_exponent(curve, rate)
    } else if rate > threshold {
        sc_exponent(curve, rate)
    } else {
        return Ok(None);
    }
    .map_err(|e| CliError::numeric(job, e))?;
    Ok(Some(TheoryValue {
        kind: r.kind,
        value: Quantity::rate(r.value),
        optimizing_order: r.optimizing_order.map(Quantity::order),
    }))
}

/// `α` of the universal likelihood-ratio test at order `s`.
fn universal_test_alpha(parsed: &ParsedSpec, n: usize, rate: f64, s: f64, job: &str) -> Result<Option<f64>, CliError> {
    let err = |e| CliError::numeric(job, e);
    let table = TypeTable::for_family(&parsed.null, &parsed.family, n, parsed.spec.oracle.type_cap).map_err(err)?;
    let o = order(s, job)?;
    let Some(dpu) = d_s_p_u(&table, o).map_err(err)?.finite() else { return Ok(None) };
    let lambda = lr_threshold(n, rate, o, dpu, table.log_v).map_err(err)?;
    let test = build_lr_test(&table, lambda);
    Ok(Some(log_alpha_of_test(&table, &test).map_err(err)?.exp()))
}

pub(crate) fn verify(parsed: &ParsedSpec, non_converged: &mut Vec<String>) -> Result<Vec<VerifyRate>, CliError> {
    let curve = curve(parsed, non_converged)?;
    let rates = rate_grid(parsed, curve.threshold());
    let opts = &parsed.spec.oracle;
    let members = match &parsed.family {
        FamilySpec::Singleton { .. } => None,
        fam => Some(
            member_grid(&parsed.null, fam, opts.grid_resolution, opts.max_members)
                .map_err(|e| CliError::numeric("verify member grid", e))?,
        ),
    };
    let theories = rates
        .par_iter()
        .map(|&(rate, _)| theory(&curve, rate, &format!("verify R = {rate}")))
        .collect::<Result<Vec<_>, CliError>>()?;

    let cells: Vec<(usize, usize)> =
        (0..rates.len()).flat_map(|i| parsed.spec.n.iter().map(move |&n| (i, n))).collect();
    let points = cells
        .par_iter()
        .map(|&(i, n)| {
            let rate = rates[i].0;
            let job = format!("verify R = {rate}, n = {n}");
            let log_mu = -(n as f64) * rate;
            let res = match (&parsed.family, &members) {
                (FamilySpec::Singleton { q }, _) => np_simple(&parsed.null, q, n, log_mu, opts.type_cap),
                (fam, Some(m)) => composite_lp(&parsed.null, fam, n, log_mu, m, opts.type_cap),
                (_, None) => unreachable!("member grid is built for every composite family"),
            }
            .map_err(|e| CliError::numeric(&job, e))?;
            let s_hat = theories[i]
                .as_ref()
                .filter(|t| t.kind == ExponentKind::Error)
                .and_then(|t| t.optimizing_order)
                .map(|q| q.value)
                .filter(|&s| s > 0.0 && s < 1.0);
            let universal = match s_hat {
                Some(s) => universal_test_alpha(parsed, n, rate, s, &job)?,
                None => None,
            };
            Ok(VerifyPoint {
                n: Quantity::new(n as f64, Unit::Symbols),
                log_budget: Quantity::nats(log_mu),
                alpha_hat: Quantity::prob(res.alpha_hat),
                log_alpha: Quantity::nats(res.log_alpha),
                log_one_minus_alpha: Quantity::nats(res.log_one_minus_alpha),
                max_log_beta: Quantity::nats(res.log_betas.iter().copied().fold(f64::NEG_INFINITY, f64::max)),
                universal_test_alpha: universal.map(Quantity::prob),
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;

    let per_rate = parsed.spec.n.len();
    let oracle = if members.is_some() { "composite-lp" } else { "np-simple" };
    let mut out = Vec::with_capacity(rates.len());
    for (i, ((rate, multiple), theory)) in rates.into_iter().zip(theories).enumerate() {
        let points = points[i * per_rate..(i + 1) * per_rate].to_vec();
        let (fit, note) = fit(&points, theory.as_ref(), parsed.spec.oracle.log_n_regressor)?;
        out.push(VerifyRate {
            rate: Quantity::rate(rate),
            multiple_of_threshold: multiple,
            oracle: oracle.into(),
            members: members.as_ref().map(|m| Quantity::count(m.len())),
            theory,
            points,
            fit,
            note,
        });
    }
    Ok(out)
}

fn fit(points: &[VerifyPoint], theory: Option<&TheoryValue>, log_n: bool) -> Result<(Option<FitOut>, Option<String>), CliError> {
    let Some(theory) = theory else {
        return Ok((None, Some("rate equals the threshold; both exponents vanish".into())));
    };
    let mode = match theory.kind {
        ExponentKind::Error => FitMode::Error,
        ExponentKind::StrongConverse => FitMode::StrongConverse,
    };
    let samples: Vec<ExponentSample> = points
        .iter()
        .map(|p| ExponentSample {
            n: p.n.value as usize,
            log_alpha: p.log_alpha.value,
            log_one_minus_alpha: p.log_one_minus_alpha.value,
        })
        .collect();
    match exponent_fit(&samples, mode, log_n) {
        Ok(f) => {
            let t = theory.value.value;
            let rel = if t > 0.0 { (f.slope - t).abs() / t } else { f64::INFINITY };
            Ok((
                Some(FitOut {
                    mode,
                    slope: Quantity::rate(f.slope),
                    intercept: Quantity::nats(f.intercept),
                    log_n_coef: f.log_n_coef.map(|c| Quantity::new(c, Unit::Ratio)),
                    residual: Quantity::nats(f.residual),
                    points_used: Quantity::count(f.points_used),
                    theory: Quantity::rate(t),
                    relative_error: Quantity::new(rel, Unit::Ratio),
                }),
                None,
            ))
        }
        Err(renyi_hyp::Error::InsufficientPoints { needed, found }) => {
            Ok((None, Some(format!("no fit: {found} usable blocklengths, need {needed}"))))
        }
        Err(e) => Err(CliError::numeric("verify fit", e)),
    }
}

fn random_row(rng: &mut ChaCha8Rng, width: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..width).map(|_| rng.gen_range(0.02..1.0)).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|v| v / total).collect()
}

fn dominance(r: DominanceReport) -> Dominance {
    Dominance {
        members: Quantity::count(r.members),
        points_checked: Quantity::count(r.points_checked),
        violations: Quantity::count(r.violations),
        max_log_ratio: Quantity::nats(r.max_log_ratio),
        log_v: Quantity::nats(r.log_v),
    }
}

pub(crate) fn universal(parsed: &ParsedSpec, non_converged: &mut Vec<String>) -> Result<Vec<UniversalRow>, CliError> {
    let opts = solver_options(parsed, true);
    let family_values = parsed
        .spec
        .orders
        .par_iter()
        .map(|&s| {
            let job = format!("universal s = {s}");
            let r = family_divergence_with(&parsed.null, &parsed.family, order(s, &job)?, &opts)
                .map_err(|e| CliError::numeric(&job, e))?;
            Ok((s, r.value.to_float(), r.converged))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    non_converged.extend(family_values.iter().filter(|v| !v.2).map(|v| format!("universal s = {}", v.0)));

    let u = &parsed.spec.universal;
    let shape = parsed.null.shape();
    let d = parsed.null.len();
    parsed
        .spec
        .n
        .par_iter()
        .map(|&n| {
            let job = format!("universal n = {n}");
            let err = |e| CliError::numeric(&job, e);
            let table = TypeTable::for_family(&parsed.null, &parsed.family, n, parsed.spec.oracle.type_cap).map_err(err)?;
            let divergences = family_values
                .iter()
                .map(|&(s, value, _)| {
                    let dpu = d_s_p_u(&table, order(s, &job)?).map_err(err)?;
                    Ok(UniversalDivergence {
                        s: Quantity::order(s),
                        d_s_p_u: Quantity::nats(dpu.to_float()),
                        n_family_value: Quantity::nats(n as f64 * value),
                    })
                })
                .collect::<Result<Vec<_>, CliError>>()?;

            let mut notes = Vec::new();
            let mut rng = ChaCha8Rng::seed_from_u64(u.seed ^ (n as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
            let sequences = (d as f64).powi(n as i32);
            let feasible = sequences <= u.max_sequences as f64 && n <= u.max_dominance_n;
            let distribution_dominance = if feasible {
                let members: Vec<Vec<Vec<f64>>> =
                    (0..u.members).map(|_| (0..n).map(|_| random_row(&mut rng, d)).collect()).collect();
                Some(dominance(distribution_dominance(d, n, &members, u.slack).map_err(err)?))
            } else {
                notes.push(format!("dominance checks skipped: n = {n} with {d}^{n} sequences exceeds max_dominance_n or max_sequences"));
                None
            };
            let channel_dominance = match shape[..] {
                [dx, dy] if feasible => {
                    let members: Vec<Vec<Vec<f64>>> = (0..u.members)
                        .map(|_| (0..n).map(|_| (0..dx).flat_map(|_| random_row(&mut rng, dy)).collect()).collect())
                        .collect();
                    Some(dominance(channel_dominance(dx, dy, n, &members, u.slack).map_err(err)?))
                }
                _ => None,
            };
            Ok(UniversalRow {
                n: Quantity::new(n as f64, Unit::Symbols),
                alphabet_size: Quantity::count(d),
                log_num_types: Quantity::nats(log_type_count(d, n)),
                family_log_v: Quantity::nats(table.log_v),
                divergences,
                distribution_dominance,
                channel_dominance,
                notes,
            })
        })
        .collect()
}
