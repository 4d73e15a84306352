#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use renyi_hyp::{JointPmf64, Order64, Pmf64};

pub fn order(s: f64) -> Order64 {
    Order64::new(s).unwrap()
}

pub fn random_probs(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..len).map(|_| rng.gen_range(0.02..1.0)).collect();
    let total: f64 = raw.iter().sum();
    raw.iter().map(|v| v / total).collect()
}

pub fn random_joint(rng: &mut ChaCha8Rng, shape: &[usize]) -> JointPmf64 {
    JointPmf64::from_shape(shape, random_probs(rng, shape.iter().product())).unwrap()
}

pub fn random_pmf(rng: &mut ChaCha8Rng, len: usize) -> Pmf64 {
    Pmf64::from_probs(random_probs(rng, len)).unwrap()
}

/// `D_s(p‖q)` for `s ∉ {0, 1, ∞}` from the definition.
pub fn renyi(p: &[f64], q: &[f64], s: f64) -> f64 {
    let g: f64 = p.iter().zip(q).filter(|(&a, _)| a > 0.0).map(|(&a, &b)| a.powf(s) * b.powf(1.0 - s)).sum();
    g.ln() / (s - 1.0)
}

pub fn kl(p: &[f64], q: &[f64]) -> f64 {
    p.iter().zip(q).filter(|(&a, _)| a > 0.0).map(|(&a, &b)| a * (a / b).ln()).sum()
}

/// Minimum of `f` on `[0,1]^k`: lattice with `steps` intervals per axis, then
/// coordinate pattern search with halving steps.
pub fn box_minimize(k: usize, steps: usize, f: impl Fn(&[f64]) -> f64) -> (f64, Vec<f64>) {
    let mut best = (f64::INFINITY, vec![0.0; k]);
    let mut x = vec![0.0; k];
    for idx in 0..(steps + 1).pow(k as u32) {
        let mut rest = idx;
        for xi in x.iter_mut() {
            *xi = (rest % (steps + 1)) as f64 / steps as f64;
            rest /= steps + 1;
        }
        let fx = f(&x);
        if fx < best.0 {
            best = (fx, x.clone());
        }
    }
    let (mut fx, mut x) = best;
    let mut step = 1.0 / steps as f64;
    while step > 1e-14 {
        let mut improved = false;
        for i in 0..k {
            for dir in [1.0, -1.0] {
                let v = x[i] + dir * step;
                if !(0.0..=1.0).contains(&v) {
                    continue;
                }
                let mut y = x.clone();
                y[i] = v;
                let fy = f(&y);
                if fy < fx {
                    x = y;
                    fx = fy;
                    improved = true;
                }
            }
        }
        if !improved {
            step /= 2.0;
        }
    }
    (fx, x)
}

/// Largest value of `f` on a uniform grid of `points` points over `[lo, hi]`,
/// refined by golden-section search around the best grid point.
pub fn grid_sup(lo: f64, hi: f64, points: usize, f: impl Fn(f64) -> f64) -> f64 {
    let h = (hi - lo) / (points - 1) as f64;
    let (mut best_i, mut best) = (0, f64::NEG_INFINITY);
    for i in 0..points {
        let v = f(lo + h * i as f64);
        if v > best {
            best = v;
            best_i = i;
        }
    }
    let (mut a, mut b) = ((lo + h * best_i as f64 - h).max(lo), (lo + h * best_i as f64 + h).min(hi));
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..200 {
        let (c, d) = (b - g * (b - a), a + g * (b - a));
        if f(c) > f(d) {
            b = d;
        } else {
            a = c;
        }
    }
    best.max(f((a + b) / 2.0))
}

/// `I(X:Y)` of a row-major two-axis joint.
pub fn mutual_information(p: &[f64], dx: usize, dy: usize) -> f64 {
    let px: Vec<f64> = (0..dx).map(|x| (0..dy).map(|y| p[x * dy + y]).sum()).collect();
    let py: Vec<f64> = (0..dy).map(|y| (0..dx).map(|x| p[x * dy + y]).sum()).collect();
    let prod: Vec<f64> = (0..dx * dy).map(|i| px[i / dy] * py[i % dy]).collect();
    kl(p, &prod)
}
