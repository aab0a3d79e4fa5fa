//! Torus metric and measure, dyadic cubes and the dyadic filtration.
//!
//! Points live in `[0,1)^d` with the Euclidean quotient metric. Cubes of order `n` are the
//! half-open dyadic cubes of side `2^{-n}`; they play the role of Christ cubes with
//! `δ = 1/2`, `C₁ = 1/2` (box metric) and `C₂ = √d`.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::Mutex;

use serde::Serialize;

use crate::linalg::{Mat, C64};
use crate::ncmeasure::{GridSpec, MatrixField, MAX_DIM};
use crate::{Error, Result};

pub const DELTA: f64 = 0.5;
pub const C1: f64 = 0.5;

pub fn c2(d: usize) -> f64 {
    (d as f64).sqrt()
}

/// Diameter of the torus `[0,1)^d` in the quotient metric.
pub fn diameter(d: usize) -> f64 {
    (d as f64).sqrt() / 2.0
}

/// Signed representative of `x − y` in `[-1/2, 1/2)`.
pub fn wrap(delta: f64) -> f64 {
    delta - (delta + 0.5).floor()
}

pub fn torus_distance(x: &[f64], y: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(a, b)| {
            let t = (a - b).rem_euclid(1.0);
            let t = t.min(1.0 - t);
            t * t
        })
        .sum::<f64>()
        .sqrt()
}

static BALL_CACHE: Mutex<Option<HashMap<u64, f64>>> = Mutex::new(None);

/// Volume of a metric ball of radius `r` (independent of the center).
pub fn ball_volume(d: usize, r: f64) -> f64 {
    if r <= 0.0 {
        return 0.0;
    }
    if r >= diameter(d) {
        return 1.0;
    }
    match d {
        1 => (2.0 * r).min(1.0),
        2 => {
            let area = PI * r * r;
            if r <= 0.5 {
                area
            } else {
                let h = 0.5;
                area - 4.0 * (r * r * (h / r).acos() - h * (r * r - h * h).sqrt())
            }
        }
        _ => {
            let vol = 4.0 / 3.0 * PI * r * r * r;
            if r <= 0.5 {
                vol
            } else if r < std::f64::consts::FRAC_1_SQRT_2 {
                let h = r - 0.5;
                vol - 6.0 * PI * h * h * (3.0 * r - h) / 3.0
            } else {
                cached_lattice_volume(r)
            }
        }
    }
}

/// Midpoint lattice quadrature on `100³` points for the corner regime of `d = 3`.
fn cached_lattice_volume(r: f64) -> f64 {
    let key = r.to_bits();
    if let Some(v) = BALL_CACHE.lock().unwrap().as_ref().and_then(|m| m.get(&key)) {
        return *v;
    }
    const N: usize = 100;
    let h = 1.0 / N as f64;
    let sq: Vec<f64> = (0..N)
        .map(|i| {
            let x = (i as f64 + 0.5) * h - 0.5;
            x * x
        })
        .collect();
    let r2 = r * r;
    let mut count = 0usize;
    for a in &sq {
        for b in &sq {
            for c in &sq {
                if a + b + c < r2 {
                    count += 1;
                }
            }
        }
    }
    let v = count as f64 / (N * N * N) as f64;
    BALL_CACHE
        .lock()
        .unwrap()
        .get_or_insert_with(HashMap::new)
        .insert(key, v);
    v
}

/// `V(x, y) = |B_{d(x,y)}(x)|`.
pub fn v_xy(x: &[f64], y: &[f64]) -> f64 {
    ball_volume(x.len(), torus_distance(x, y))
}

/// Empirical Ahlfors constants `(c_low, c_high)` of `|B_r| / r^d` over `r ∈ [2^{-level}, diam]`.
pub fn ahlfors_constants(d: usize, level: u32) -> (f64, f64) {
    let lo = 2f64.powi(-(level as i32));
    let hi = diameter(d);
    let mut c_low = f64::INFINITY;
    let mut c_high = 0.0_f64;
    let n = 200;
    for k in 0..=n {
        let r = lo * (hi / lo).powf(k as f64 / n as f64);
        let ratio = ball_volume(d, r) / r.powi(d as i32);
        c_low = c_low.min(ratio);
        c_high = c_high.max(ratio);
    }
    (c_low, c_high)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Cube {
    pub order: u32,
    pub index: [usize; MAX_DIM],
    pub center: [f64; MAX_DIM],
    pub diameter: f64,
    #[serde(skip)]
    d: usize,
}

impl Cube {
    pub fn new(d: usize, order: u32, index: &[usize]) -> Self {
        let side = 2f64.powi(-(order as i32));
        let mut idx = [0; MAX_DIM];
        let mut center = [0.0; MAX_DIM];
        for k in 0..d {
            idx[k] = index[k];
            center[k] = (index[k] as f64 + 0.5) * side;
        }
        Cube {
            order,
            index: idx,
            center,
            diameter: cube_diameter(d, order),
            d,
        }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn side(&self) -> f64 {
        2f64.powi(-(self.order as i32))
    }

    pub fn center(&self) -> &[f64] {
        &self.center[..self.d]
    }

    pub fn parent(&self) -> Option<Cube> {
        if self.order == 0 {
            return None;
        }
        let idx: Vec<usize> = self.index[..self.d].iter().map(|i| i / 2).collect();
        Some(Cube::new(self.d, self.order - 1, &idx))
    }

    pub fn children(&self) -> Vec<Cube> {
        (0..1usize << self.d)
            .map(|bits| {
                let idx: Vec<usize> = (0..self.d)
                    .map(|k| 2 * self.index[k] + ((bits >> (self.d - 1 - k)) & 1))
                    .collect();
                Cube::new(self.d, self.order + 1, &idx)
            })
            .collect()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        let side = self.side();
        (0..self.d).all(|k| (x[k] / side).floor() as usize == self.index[k])
    }

    /// Lexicographic position among the cubes of the same order.
    pub fn linear_index(&self) -> usize {
        let side = 1usize << self.order;
        self.index[..self.d].iter().fold(0, |acc, &i| acc * side + i)
    }
}

/// Torus diameter of a half-open cube of order `n`: `√d · min(2^{-n}, 1/2)`.
pub fn cube_diameter(d: usize, order: u32) -> f64 {
    (d as f64).sqrt() * 2f64.powi(-(order as i32)).min(0.5)
}

/// All cubes of order `n`, in lexicographic order (first axis most significant).
pub fn cubes(d: usize, order: u32) -> Vec<Cube> {
    let side = 1usize << order;
    let total = side.pow(d as u32);
    (0..total)
        .map(|lin| {
            let mut idx = [0usize; MAX_DIM];
            let mut rest = lin;
            for k in (0..d).rev() {
                idx[k] = rest % side;
                rest /= side;
            }
            Cube::new(d, order, &idx[..d])
        })
        .collect()
}

/// Linear index of the order-`n` cube containing the given cell.
pub fn cube_of_cell(spec: &GridSpec, cell: usize, order: u32) -> usize {
    let c = spec.coords(cell);
    let shift = spec.level - order;
    let side = 1usize << order;
    c[..spec.d].iter().fold(0, |acc, &i| acc * side + (i >> shift))
}

/// Cells (linear indices) belonging to each order-`n` cube.
pub fn cells_by_cube(spec: &GridSpec, order: u32) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new(); 1usize << (spec.d as u32 * order)];
    for cell in 0..spec.n_cells() {
        out[cube_of_cell(spec, cell, order)].push(cell);
    }
    out
}

fn check_order(spec: &GridSpec, order: u32) -> Result<()> {
    if order > spec.level {
        return Err(Error::InvalidArgument {
            name: "n",
            reason: format!("order {order} exceeds grid level {}", spec.level),
        });
    }
    Ok(())
}

/// Averages `f_Q` over the cubes of order `n`, in lexicographic cube order.
pub fn cube_means(f: &MatrixField, order: u32) -> Result<Vec<Mat>> {
    let spec = f.spec();
    check_order(spec, order)?;
    let m = spec.m;
    let mut sums = vec![Mat::zeros(m, m); 1usize << (spec.d as u32 * order)];
    for (cell, value) in f.cells().iter().enumerate() {
        sums[cube_of_cell(spec, cell, order)] += value;
    }
    let per_cube = 1usize << (spec.d as u32 * (spec.level - order));
    let w = C64::new(1.0 / per_cube as f64, 0.0);
    for s in &mut sums {
        *s *= w;
    }
    Ok(sums)
}

/// Step field equal to `values[Q]` on each order-`n` cube.
pub fn expand(spec: GridSpec, order: u32, values: &[Mat]) -> MatrixField {
    let cells = (0..spec.n_cells())
        .map(|cell| values[cube_of_cell(&spec, cell, order)].clone())
        .collect();
    MatrixField::from_cells_unchecked(spec, cells)
}

/// `E_n(f) = Σ_{Q ∈ Q_n} 1_Q ⊗ f_Q`.
pub fn conditional_expectation(f: &MatrixField, order: u32) -> Result<MatrixField> {
    let means = cube_means(f, order)?;
    Ok(expand(*f.spec(), order, &means))
}

/// Constants of the cube system for report headers.
#[derive(Clone, Debug, Serialize)]
pub struct CubeConstants {
    pub delta: f64,
    pub c1: f64,
    pub c2: f64,
    pub ahlfors_low: f64,
    pub ahlfors_high: f64,
}

pub fn cube_constants(d: usize, level: u32) -> CubeConstants {
    let (lo, hi) = ahlfors_constants(d, level);
    CubeConstants {
        delta: DELTA,
        c1: C1,
        c2: c2(d),
        ahlfors_low: lo,
        ahlfors_high: hi,
    }
}
