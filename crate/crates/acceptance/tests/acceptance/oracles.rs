//! Brute-force references written directly from the definitions, without the
//! library's closed forms or solvers.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use renyi_hyp::JointPmf64;

pub fn random_probs(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..len).map(|_| rng.gen_range(0.02..1.0)).collect();
    let total: f64 = raw.iter().sum();
    raw.iter().map(|v| v / total).collect()
}

pub fn random_joint(rng: &mut ChaCha8Rng, shape: &[usize]) -> JointPmf64 {
    let len = shape.iter().product();
    JointPmf64::from_shape(shape, random_probs(rng, len)).unwrap()
}

/// `D_s(p‖q)` for `s ∉ {0, 1, ∞}`, straight from the definition.
pub fn renyi(p: &[f64], q: &[f64], s: f64) -> f64 {
    let g: f64 = p.iter().zip(q).filter(|(&a, _)| a > 0.0).map(|(&a, &b)| a.powf(s) * b.powf(1.0 - s)).sum();
    g.ln() / (s - 1.0)
}

fn lattice(d: usize, steps: usize) -> Vec<Vec<usize>> {
    if d == 1 {
        return vec![vec![steps]];
    }
    let mut out = Vec::new();
    for k in 0..=steps {
        for mut rest in lattice(d - 1, steps - k) {
            rest.insert(0, k);
            out.push(rest);
        }
    }
    out
}

/// Pattern search along the edge directions `e_i − e_j` of the simplex, with
/// the step halved whenever no move improves.
fn refine_simplex(mut x: Vec<f64>, mut fx: f64, mut step: f64, f: &impl Fn(&[f64]) -> f64) -> (f64, Vec<f64>) {
    let d = x.len();
    while step > 1e-14 {
        let mut improved = false;
        for i in 0..d {
            for j in 0..d {
                if i == j || x[j] < step {
                    continue;
                }
                let mut y = x.clone();
                y[i] += step;
                y[j] -= step;
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

/// Minimum of `f` over the probability simplex of dimension `d`: exhaustive
/// lattice search with spacing `1/steps`, then local refinement from the best
/// lattice point.
pub fn simplex_minimize(d: usize, steps: usize, f: impl Fn(&[f64]) -> f64) -> (f64, Vec<f64>) {
    let mut best = (f64::INFINITY, Vec::new());
    let mut x = vec![0.0; d];
    for point in lattice(d, steps) {
        for (xi, &k) in x.iter_mut().zip(&point) {
            *xi = k as f64 / steps as f64;
        }
        let fx = f(&x);
        if fx < best.0 {
            best = (fx, x.clone());
        }
    }
    refine_simplex(best.1, best.0, 1.0 / steps as f64, &f)
}

/// Minimum of `f` over the unit box `[0,1]^k`: lattice search then coordinate pattern search.
pub fn box_minimize(k: usize, steps: usize, f: impl Fn(&[f64]) -> f64) -> (f64, Vec<f64>) {
    let mut best = (f64::INFINITY, Vec::new());
    let total = (steps + 1).pow(k as u32);
    let mut x = vec![0.0; k];
    for idx in 0..total {
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

/// `min_{Q_Y} D_s(P_XY‖T_X × Q_Y)` by simplex search over `Q_Y` (row-major `P`).
pub fn grid_sibson(p: &[f64], dx: usize, dy: usize, t: &[f64], s: f64, steps: usize) -> f64 {
    simplex_minimize(dy, steps, |q| {
        let member: Vec<f64> = (0..dx * dy).map(|i| t[i / dy] * q[i % dy]).collect();
        renyi(p, &member, s)
    })
    .0
}

/// `min D_s(P_XY‖Q_X × Q_Y)` over binary `Q_X`, `Q_Y`, on a 2×2 joint.
pub fn grid_product_2x2(p: &[f64], s: f64, steps: usize) -> f64 {
    box_minimize(2, steps, |v| {
        let (qx, qy) = ([v[0], 1.0 - v[0]], [v[1], 1.0 - v[1]]);
        let member: Vec<f64> = (0..4).map(|i| qx[i / 2] * qy[i % 2]).collect();
        renyi(p, &member, s)
    })
    .0
}

/// `min D_s(P_XYZ‖Q_Y Q_{X|Y} Q_{Z|Y})` on a 2×2×2 joint (row-major over `(x, y, z)`).
///
/// `Σ P^s Q^{1−s}` splits as `Σ_y Q_Y(y)^{1−s} F_y(Q_{X|y}, Q_{Z|y})`, so each
/// `F_y` is optimized on its own (minimized for `s > 1`, maximized for `s < 1`)
/// before the outer search over `Q_Y`.
pub fn grid_markov_2x2x2(p: &[f64], s: f64, steps: usize) -> f64 {
    let sign = (s - 1.0).signum();
    let at = |x: usize, y: usize, z: usize| p[x * 4 + y * 2 + z];
    let f_star: Vec<f64> = (0..2)
        .map(|y| {
            let (v, _) = box_minimize(2, steps, |ab| {
                let (qx, qz) = ([ab[0], 1.0 - ab[0]], [ab[1], 1.0 - ab[1]]);
                let mut total = 0.0;
                for x in 0..2 {
                    for z in 0..2 {
                        total += at(x, y, z).powf(s) * (qx[x] * qz[z]).powf(1.0 - s);
                    }
                }
                sign * total
            });
            sign * v
        })
        .collect();
    simplex_minimize(2, steps, |q| {
        let g: f64 = (0..2).map(|y| q[y].powf(1.0 - s) * f_star[y]).sum();
        g.ln() / (s - 1.0)
    })
    .0
}

/// `P^{×2}` of a joint pmf, with the two copies of each axis merged into one
/// axis, so a row-major `(a, b)` joint becomes an `(a a', b b')` joint.
pub fn square_two_axis(p: &[f64], da: usize, db: usize) -> Vec<f64> {
    let mut out = vec![0.0; da * da * db * db];
    for a1 in 0..da {
        for a2 in 0..da {
            for b1 in 0..db {
                for b2 in 0..db {
                    let i = (a1 * da + a2) * db * db + b1 * db + b2;
                    out[i] = p[a1 * db + b1] * p[a2 * db + b2];
                }
            }
        }
    }
    out
}

/// `min_{Q_{Z²|Y²}} D_s(P^{×2}‖P_XY^{×2} × Q_{Z²|Y²})` for a 2×2×2 joint, over
/// every channel from `Y²` to `Z²`. Rows of the channel separate as in
/// [`grid_markov_2x2x2`].
pub fn brute_recovery_n2(p: &[f64], s: f64, steps: usize) -> f64 {
    let sign = (s - 1.0).signum();
    let at = |x: usize, y: usize, z: usize| p[x * 4 + y * 2 + z];
    let pxy = |x: usize, y: usize| at(x, y, 0) + at(x, y, 1);
    let mut total = 0.0;
    for y1 in 0..2 {
        for y2 in 0..2 {
            // coefficient of Q(z1 z2 | y1 y2)^{1−s}
            let mut c = [0.0; 4];
            for x1 in 0..2 {
                for x2 in 0..2 {
                    let base = (pxy(x1, y1) * pxy(x2, y2)).powf(1.0 - s);
                    for z1 in 0..2 {
                        for z2 in 0..2 {
                            c[z1 * 2 + z2] += (at(x1, y1, z1) * at(x2, y2, z2)).powf(s) * base;
                        }
                    }
                }
            }
            let (v, _) = simplex_minimize(4, steps, |q| {
                sign * c.iter().zip(q).map(|(&ci, &qi)| if ci > 0.0 { ci * qi.powf(1.0 - s) } else { 0.0 }).sum::<f64>()
            });
            total += sign * v;
        }
    }
    total.ln() / (s - 1.0)
}
