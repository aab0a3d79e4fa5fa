use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, TAU};

use rayon::prelude::*;
use serde::Serialize;

use super::quadrature::gauss_legendre;
use super::Kernel;
use crate::dyadic::{ball_volume, diameter, torus_distance, v_xy};
use crate::ncmeasure::MAX_DIM;
use crate::sampling::{direction, Kronecker};

/// One line of a kernel condition report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConditionRow {
    pub kernel: String,
    pub condition: String,
    pub parameter: f64,
    pub value: f64,
    pub samples: usize,
}

fn shifted(x: &[f64], step: f64, dir: &[f64]) -> Vec<f64> {
    x.iter().zip(dir).map(|(a, b)| (a + step * b).rem_euclid(1.0)).collect()
}

fn log_uniform(lo: f64, hi: f64, u: f64) -> f64 {
    lo * (hi / lo).powf(u)
}

/// `sup |k(x, y)|·V(x, y)` over low-discrepancy pairs with separation log-uniform in
/// `[min_separation, diam]`.
pub fn size_condition_check(k: &dyn Kernel, samples: usize, min_separation: f64) -> f64 {
    let d = k.dim();
    let hi = diameter(d);
    Kronecker::new(d + 3)
        .take(samples.max(1))
        .map(|u| {
            let x = &u[..d];
            let sep = log_uniform(min_separation, hi, u[d]);
            let y = shifted(x, sep, &direction(d, &u[d + 1..]));
            if torus_distance(x, &y) == 0.0 {
                return 0.0;
            }
            k.eval(x, &y).norm() * v_xy(x, &y)
        })
        .fold(0.0, f64::max)
}

/// `sup |k(x, y) − k(x, y′)|·V(x, y′)·d(x, y′)^α / d(y, y′)^α` over sampled triples with
/// `2 d(y, y′) < d(x, y)`.
pub fn lipschitz_condition_check(k: &dyn Kernel, alpha: f64, samples: usize, min_separation: f64) -> f64 {
    assert!(alpha > 0.0 && alpha <= 1.0, "alpha must lie in (0, 1]");
    let d = k.dim();
    let hi = diameter(d);
    Kronecker::new(d + 6)
        .take(samples.max(1))
        .map(|u| {
            let x = &u[..d];
            let sep = log_uniform(min_separation, hi, u[d]);
            let yp = shifted(x, sep, &direction(d, &u[d + 2..d + 4]));
            let step = log_uniform(1e-3 * sep, 0.45 * sep, u[d + 1]);
            let y = shifted(&yp, step, &direction(d, &u[d + 4..d + 6]));
            let dxy = torus_distance(x, &y);
            let dyy = torus_distance(&y, &yp);
            let dxyp = torus_distance(x, &yp);
            if dyy == 0.0 || 2.0 * dyy >= dxy {
                return 0.0;
            }
            let diff = (k.eval(x, &y) - k.eval(x, &yp)).norm();
            diff * v_xy(x, &yp) * (dxyp / dyy).powf(alpha)
        })
        .fold(0.0, f64::max)
}

/// Quadrature sizes for the Hörmander checks.
#[derive(Clone, Copy, Debug)]
pub struct HormanderOptions {
    /// Gauss–Legendre nodes per radial panel.
    pub radial_nodes: usize,
    /// Gauss–Legendre nodes per angular arc.
    pub angular_nodes: usize,
    /// Points `y ∈ B_{r/3}(y′)` for the inner supremum.
    pub y_samples: usize,
}

impl Default for HormanderOptions {
    fn default() -> Self {
        HormanderOptions {
            radial_nodes: 16,
            angular_nodes: 16,
            y_samples: 32,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HormanderReport {
    pub value: f64,
    /// `|A_m|^{1/2} sup_y ‖k(·, y) − k(·, y′)‖_{L_2(A_m)}` for `m = 0, …, m_max`.
    pub terms: Vec<f64>,
    /// Number of nonempty annuli among them.
    pub contributing: usize,
}

type Node = ([f64; MAX_DIM], f64);

/// Quadrature for `{z ∈ [−½, ½]^d : a ≤ |z| < b}`, the torus annulus around a point.
fn annulus_nodes(d: usize, a: f64, b: f64, opts: &HormanderOptions) -> Vec<Node> {
    let rmax = diameter(d);
    let b = b.min(rmax);
    if a >= b {
        return Vec::new();
    }
    let mut breaks = vec![a];
    for kink in [0.5, FRAC_1_SQRT_2] {
        if kink > a && kink < b {
            breaks.push(kink);
        }
    }
    breaks.push(b);
    let mut out = Vec::new();
    for win in breaks.windows(2) {
        for (rho, wr) in gauss_legendre(opts.radial_nodes, win[0], win[1]) {
            match d {
                1 => {
                    for s in [-1.0, 1.0] {
                        out.push(([s * rho, 0.0, 0.0], wr));
                    }
                }
                2 => {
                    let alpha = if rho <= 0.5 { 0.0 } else { (0.5 / rho).min(1.0).acos() };
                    for q in 0..4 {
                        let lo = q as f64 * FRAC_PI_2 + alpha;
                        let hi = (q + 1) as f64 * FRAC_PI_2 - alpha;
                        if hi <= lo {
                            continue;
                        }
                        for (t, wt) in gauss_legendre(opts.angular_nodes, lo, hi) {
                            out.push(([rho * t.cos(), rho * t.sin(), 0.0], wr * rho * wt));
                        }
                    }
                }
                _ => {
                    // polar cosine × azimuth with the cube cut applied pointwise
                    for (c, wc) in gauss_legendre(opts.angular_nodes, -1.0, 1.0) {
                        let s = (1.0 - c * c).sqrt();
                        for (t, wt) in gauss_legendre(2 * opts.angular_nodes, 0.0, TAU) {
                            let z = [rho * s * t.cos(), rho * s * t.sin(), rho * c];
                            if z.iter().all(|v| v.abs() <= 0.5) {
                                out.push((z, wr * rho * rho * wc * wt));
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

fn y_points(y_prime: &[f64], r: f64, n: usize) -> Vec<Vec<f64>> {
    let d = y_prime.len();
    Kronecker::new(d + 1)
        .take(n.max(1))
        .map(|u| {
            let rho = r / 3.0 * u[0].powf(1.0 / d as f64);
            shifted(y_prime, rho, &direction(d, &u[1..]))
        })
        .collect()
}

/// Number of dyadic annuli `[2^m r, 2^{m+1} r)` meeting the torus.
fn annulus_count(d: usize, r: f64) -> usize {
    let mut m = 0;
    while r * 2f64.powi(m as i32) < diameter(d) {
        m += 1;
    }
    m
}

/// Per-annulus data: nodes translated to `y′` and their total weight `|A_m|`.
fn annuli(d: usize, y_prime: &[f64], r: f64, count: usize, opts: &HormanderOptions) -> Vec<(Vec<(Vec<f64>, f64)>, f64)> {
    (0..count)
        .map(|m| {
            let a = r * 2f64.powi(m as i32);
            let nodes: Vec<(Vec<f64>, f64)> = annulus_nodes(d, a, 2.0 * a, opts)
                .into_iter()
                .map(|(z, w)| (shifted(y_prime, 1.0, &z[..d]), w))
                .collect();
            let area = nodes.iter().map(|(_, w)| w).sum();
            (nodes, area)
        })
        .collect()
}

/// `Σ_{m ≤ m_max} |A_m|^{1/2} sup_{y ∈ B_{r/3}(y′)} (∫_{A_m} |k(x,y) − k(x,y′)|² dx)^{1/2}`
/// with `A_m = {2^m r ≤ d(x, y′) < 2^{m+1} r}`.
pub fn hormander_l2_sum(k: &dyn Kernel, y_prime: &[f64], r: f64, m_max: usize, opts: &HormanderOptions) -> HormanderReport {
    let d = k.dim();
    let ys = y_points(y_prime, r, opts.y_samples);
    let terms: Vec<f64> = annuli(d, y_prime, r, m_max + 1, opts)
        .into_par_iter()
        .map(|(nodes, area)| {
            if nodes.is_empty() {
                return 0.0;
            }
            let sup = ys
                .iter()
                .map(|y| {
                    nodes
                        .iter()
                        .map(|(x, w)| w * (k.eval(x, y) - k.eval(x, y_prime)).norm_sqr())
                        .sum::<f64>()
                        .sqrt()
                })
                .fold(0.0, f64::max);
            area.sqrt() * sup
        })
        .collect();
    let contributing = annulus_count(d, r).min(m_max + 1);
    HormanderReport {
        value: terms.iter().sum(),
        terms,
        contributing,
    }
}

/// `sup_{y ∈ B_{r/3}(y′)} ∫_{X ∖ B_r(y′)} |k(x, y) − k(x, y′)| dx` on the annulus quadrature of
/// [`hormander_l2_sum`].
pub fn hormander_l1_check(k: &dyn Kernel, y_prime: &[f64], r: f64, opts: &HormanderOptions) -> f64 {
    let d = k.dim();
    let ys = y_points(y_prime, r, opts.y_samples);
    let rings = annuli(d, y_prime, r, annulus_count(d, r), opts);
    ys.par_iter()
        .map(|y| {
            rings
                .iter()
                .flat_map(|(nodes, _)| nodes.iter())
                .map(|(x, w)| w * (k.eval(x, y) - k.eval(x, y_prime)).norm())
                .sum::<f64>()
        })
        .reduce(|| 0.0, f64::max)
}

/// Bound on [`hormander_l2_sum`] from a Lipschitz constant `c`:
/// `Σ_m |A_m| · c · 3^{−α} 2^{−mα} / |B_{2^m r}|`.
pub fn lipschitz_implied_l2_bound(d: usize, c: f64, alpha: f64, r: f64, m_max: usize) -> f64 {
    (0..=m_max)
        .map(|m| {
            let a = r * 2f64.powi(m as i32);
            let area = ball_volume(d, 2.0 * a) - ball_volume(d, a);
            if area <= 0.0 {
                return 0.0;
            }
            area * c * 3f64.powf(-alpha) * 2f64.powf(-(m as f64) * alpha) / ball_volume(d, a)
        })
        .sum()
}
