use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use super::quadrature::gauss_legendre;
use super::{wrapped_difference, Kernel};
use crate::linalg::C64;
use crate::ncmeasure::MAX_DIM;
use crate::sampling::Kronecker;
use crate::{Error, Result};

/// Largest admissible `|∫_{S_∞^{d−1}} K|`.
pub const SPHERE_TOL: f64 = 1e-8;

/// Real kernel on `R^d ∖ {0}`, homogeneous of degree `−d`.
pub trait EuclideanKernel: Send + Sync {
    fn dim(&self) -> usize;

    fn name(&self) -> String;

    fn eval(&self, x: &[f64]) -> f64;
}

/// `ω_{d−1}`, the surface measure of the Euclidean unit sphere of `R^d`.
pub fn sphere_measure(d: usize) -> f64 {
    match d {
        1 => 2.0,
        2 => TAU,
        3 => 4.0 * PI,
        _ => panic!("dimension {d} not supported"),
    }
}

/// `K(x) = 1/(2πx)` on the line.
#[derive(Clone, Copy, Debug, Default)]
pub struct CauchyKernel;

impl EuclideanKernel for CauchyKernel {
    fn dim(&self) -> usize {
        1
    }
    fn name(&self) -> String {
        "cauchy".into()
    }
    fn eval(&self, x: &[f64]) -> f64 {
        1.0 / (TAU * x[0])
    }
}

/// `K_ij(x) = −(1/ω_{d−1}) ∂_i [x_j/|x|^d] = −δ_ij/(ω_{d−1}|x|^d) + d x_i x_j/(ω_{d−1}|x|^{d+2})`.
#[derive(Clone, Copy, Debug)]
pub struct LerayEuclidean {
    i: usize,
    j: usize,
    d: usize,
}

impl LerayEuclidean {
    pub fn new(i: usize, j: usize, d: usize) -> Result<Self> {
        if !(2..=MAX_DIM).contains(&d) {
            return Err(Error::arg("d", format!("Leray kernel needs 2 <= d <= {MAX_DIM}, got {d}")));
        }
        if i >= d || j >= d {
            return Err(Error::arg("i, j", format!("axes ({i}, {j}) out of range for d = {d}")));
        }
        Ok(LerayEuclidean { i, j, d })
    }
}

impl EuclideanKernel for LerayEuclidean {
    fn dim(&self) -> usize {
        self.d
    }
    fn name(&self) -> String {
        format!("leray_{}{}", self.i + 1, self.j + 1)
    }
    fn eval(&self, x: &[f64]) -> f64 {
        let d = self.d as i32;
        let r2: f64 = x.iter().map(|v| v * v).sum();
        let r = r2.sqrt();
        let w = sphere_measure(self.d);
        let delta = if self.i == self.j { 1.0 } else { 0.0 };
        -delta / (w * r.powi(d)) + self.d as f64 * x[self.i] * x[self.j] / (w * r.powi(d + 2))
    }
}

/// `∫_{S_∞^{d−1}} K`, the integral over the boundary of `[−1, 1]^d`, by composite
/// Gauss–Legendre quadrature on each face.
pub fn sphere_integral(k: &dyn EuclideanKernel) -> f64 {
    let d = k.dim();
    if d == 1 {
        return k.eval(&[1.0]) + k.eval(&[-1.0]);
    }
    let mut rule = Vec::new();
    for p in 0..8 {
        let a = -1.0 + p as f64 / 4.0;
        rule.extend(gauss_legendre(24, a, a + 0.25));
    }
    let mut total = 0.0;
    let mut x = [0.0; MAX_DIM];
    for axis in 0..d {
        for sign in [-1.0, 1.0] {
            x[axis] = sign;
            let others: Vec<usize> = (0..d).filter(|&a| a != axis).collect();
            match others.len() {
                1 => {
                    for &(t, w) in &rule {
                        x[others[0]] = t;
                        total += w * k.eval(&x[..d]);
                    }
                }
                _ => {
                    for &(t, w) in &rule {
                        x[others[0]] = t;
                        for &(t2, w2) in &rule {
                            x[others[1]] = t2;
                            total += w * w2 * k.eval(&x[..d]);
                        }
                    }
                }
            }
        }
    }
    total
}

/// Integer points with `|m|_∞ = r` in lexicographic order.
pub fn shell(d: usize, r: usize) -> Vec<[i64; MAX_DIM]> {
    let r = r as i64;
    let side = (2 * r + 1) as usize;
    let mut out = Vec::new();
    for idx in 0..side.pow(d as u32) {
        let mut m = [0i64; MAX_DIM];
        let mut rest = idx;
        for axis in (0..d).rev() {
            m[axis] = (rest % side) as i64 - r;
            rest /= side;
        }
        if m[..d].iter().any(|v| v.abs() == r) {
            out.push(m);
        }
    }
    out
}

/// `K̃(x) = K(x) + Σ_{R=1}^{R_max} Σ_{|m|_∞=R} K(x + 2πm)` (shell-ordered), exposed as the
/// torus kernel `k(u, v) = offset + scale·(2π)^d·K̃(2π wrap(u − v))`.
#[derive(Clone)]
pub struct PeriodizedKernel {
    base: Arc<dyn EuclideanKernel>,
    r_max: usize,
    scale: C64,
    offset: C64,
    tail_constant: f64,
    // 2π m for 1 ≤ |m|_∞ ≤ R_max, shells in increasing order
    lattice: Vec<[f64; MAX_DIM]>,
    shell_ends: Vec<usize>,
}

impl std::fmt::Debug for PeriodizedKernel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PeriodizedKernel")
            .field("base", &self.base.name())
            .field("r_max", &self.r_max)
            .field("scale", &self.scale)
            .field("offset", &self.offset)
            .field("tail_constant", &self.tail_constant)
            .finish()
    }
}

/// Periodize a `(−d)`-homogeneous kernel with vanishing sup-sphere integral.
pub fn periodize(base: Arc<dyn EuclideanKernel>, r_max: usize) -> Result<PeriodizedKernel> {
    let d = base.dim();
    if !(1..=MAX_DIM).contains(&d) {
        return Err(Error::arg("K", format!("dimension {d} not supported")));
    }
    if r_max == 0 {
        return Err(Error::arg("r_max", "must be at least 1"));
    }
    let sphere = sphere_integral(base.as_ref());
    if sphere.abs() > SPHERE_TOL {
        return Err(Error::KernelHypothesis(format!(
            "{}: sphere integral {sphere:.3e} exceeds {SPHERE_TOL:e}",
            base.name()
        )));
    }
    let mut lattice = Vec::new();
    let mut shell_ends = Vec::with_capacity(r_max);
    for r in 1..=r_max {
        for m in shell(d, r) {
            let mut p = [0.0; MAX_DIM];
            for k in 0..d {
                p[k] = TAU * m[k] as f64;
            }
            lattice.push(p);
        }
        shell_ends.push(lattice.len());
    }
    let mut out = PeriodizedKernel {
        base,
        r_max,
        scale: C64::new(1.0, 0.0),
        offset: C64::new(0.0, 0.0),
        tail_constant: 0.0,
        lattice,
        shell_ends,
    };
    let mut c = 0.0_f64;
    for x in envelope_points(d) {
        let shells = out.shell_sums(&x);
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        for (idx, s) in shells.iter().enumerate() {
            let r = (idx + 1) as f64;
            c = c.max(s.abs() * r * r / (norm + 1.0));
        }
    }
    out.tail_constant = 1.1 * c;
    Ok(out)
}

/// Sample angles for the shell envelope: a low-discrepancy set in `[−π, π)^d` and the grid
/// `{−π, −π/2, 0, π/2}^d`.
fn envelope_points(d: usize) -> Vec<Vec<f64>> {
    let mut pts: Vec<Vec<f64>> = Kronecker::new(d)
        .take(128)
        .map(|u| u.iter().map(|v| TAU * (v - 0.5)).collect())
        .collect();
    let grid = [-PI, -PI / 2.0, 0.0, PI / 2.0];
    for idx in 0..4usize.pow(d as u32) {
        let mut rest = idx;
        let mut x = vec![0.0; d];
        for v in x.iter_mut() {
            *v = grid[rest % 4];
            rest /= 4;
        }
        if x.iter().any(|v| *v != 0.0) {
            pts.push(x);
        }
    }
    pts
}

/// Cauchy–Riesz kernel `1/2 + i·2π·K̃_cauchy(2π(u − v))`, the periodized form of [`super::RieszKernel`].
pub fn riesz_periodized(r_max: usize) -> Result<PeriodizedKernel> {
    Ok(periodize(Arc::new(CauchyKernel), r_max)?
        .with_scale(C64::new(0.0, 1.0))
        .with_offset(C64::new(0.5, 0.0)))
}

/// Kernel of the Leray entry `R_ij` off the support: periodized `K_ij` plus the
/// constant `δ_ij/d` carried by the zero frequency.
pub fn leray_kernel(i: usize, j: usize, d: usize, r_max: usize) -> Result<PeriodizedKernel> {
    let base = LerayEuclidean::new(i, j, d)?;
    let offset = if i == j { 1.0 / d as f64 } else { 0.0 };
    Ok(periodize(Arc::new(base), r_max)?.with_offset(C64::new(offset, 0.0)))
}

impl PeriodizedKernel {
    pub fn with_scale(mut self, scale: C64) -> Self {
        self.scale = scale;
        self
    }

    pub fn with_offset(mut self, offset: C64) -> Self {
        self.offset = offset;
        self
    }

    pub fn base(&self) -> &dyn EuclideanKernel {
        self.base.as_ref()
    }

    pub fn r_max(&self) -> usize {
        self.r_max
    }

    pub fn scale(&self) -> C64 {
        self.scale
    }

    pub fn offset(&self) -> C64 {
        self.offset
    }

    /// `c` with `|Σ_{|m|_∞=R} K(x + 2πm)| ≤ c (|x|+1)/R²` on the sample set.
    pub fn tail_constant(&self) -> f64 {
        self.tail_constant
    }

    /// Bound `c (|x|+1)/R_max ≥ Σ_{R > R_max} c (|x|+1)/R²` on the discarded shells.
    pub fn tail_bound(&self, x: &[f64]) -> f64 {
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        self.tail_constant * (norm + 1.0) / self.r_max as f64
    }

    /// `Σ_{|m|_∞=R} K(x + 2πm)` for `R = 1, …, R_max`.
    pub fn shell_sums(&self, x: &[f64]) -> Vec<f64> {
        let d = x.len();
        let mut y = [0.0; MAX_DIM];
        let mut start = 0;
        self.shell_ends
            .iter()
            .map(|&end| {
                let mut s = 0.0;
                for p in &self.lattice[start..end] {
                    for k in 0..d {
                        y[k] = x[k] + p[k];
                    }
                    s += self.base.eval(&y[..d]);
                }
                start = end;
                s
            })
            .collect()
    }

    /// Partial sum of `K̃(x)` through shell `r`.
    pub fn partial_sum(&self, x: &[f64], r: usize) -> f64 {
        let shells = self.shell_sums(x);
        self.base.eval(x) + shells[..r.min(self.r_max)].iter().sum::<f64>()
    }

    /// `K̃(x)` for an angle vector `x`.
    pub fn periodic(&self, x: &[f64]) -> f64 {
        let d = x.len();
        let mut y = [0.0; MAX_DIM];
        let mut s = self.base.eval(x);
        for p in &self.lattice {
            for k in 0..d {
                y[k] = x[k] + p[k];
            }
            s += self.base.eval(&y[..d]);
        }
        s
    }
}

impl Kernel for PeriodizedKernel {
    fn dim(&self) -> usize {
        self.base.dim()
    }

    fn name(&self) -> String {
        format!("periodized_{}", self.base.name())
    }

    fn eval(&self, x: &[f64], y: &[f64]) -> C64 {
        self.eval_difference(&wrapped_difference(x, y))
    }

    fn translation_invariant(&self) -> bool {
        true
    }

    fn eval_difference(&self, delta: &[f64]) -> C64 {
        let d = delta.len();
        let angle: Vec<f64> = delta.iter().map(|v| TAU * crate::dyadic::wrap(*v)).collect();
        self.offset + self.scale * (TAU.powi(d as i32) * self.periodic(&angle))
    }
}
