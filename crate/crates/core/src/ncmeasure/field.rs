use std::fmt;

use serde::{Deserialize, Serialize};

use crate::linalg::{self, Mat, C64};
use crate::{Error, Result};

/// Largest supported torus dimension.
pub const MAX_DIM: usize = 3;

/// Dyadic grid over `[0,1)^d` with `2^level` cells per axis and `m × m` matrix values.
///
/// The torus carries the probability measure, so every cell has volume `2^{-d·level}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GridSpec {
    pub d: usize,
    #[serde(rename = "L")]
    pub level: u32,
    pub m: usize,
}

impl GridSpec {
    pub fn new(d: usize, level: u32, m: usize) -> Result<Self> {
        if d == 0 || d > MAX_DIM {
            return Err(Error::InvalidGrid(format!("dimension {d} outside 1..={MAX_DIM}")));
        }
        if m == 0 {
            return Err(Error::InvalidGrid("matrix size must be positive".into()));
        }
        if (d as u32) * level > 24 {
            return Err(Error::InvalidGrid(format!("2^(d·L) = 2^{} cells is too many", d as u32 * level)));
        }
        Ok(GridSpec { d, level, m })
    }

    /// Cells per axis.
    pub fn side(&self) -> usize {
        1 << self.level
    }

    pub fn n_cells(&self) -> usize {
        1 << (self.d as u32 * self.level)
    }

    pub fn cell_volume(&self) -> f64 {
        1.0 / self.n_cells() as f64
    }

    pub fn cell_width(&self) -> f64 {
        1.0 / self.side() as f64
    }

    /// Lexicographic cell coordinates; the first axis is the most significant.
    pub fn coords(&self, index: usize) -> [usize; MAX_DIM] {
        let side = self.side();
        let mut out = [0; MAX_DIM];
        let mut rest = index;
        for axis in (0..self.d).rev() {
            out[axis] = rest % side;
            rest /= side;
        }
        out
    }

    pub fn index(&self, coords: &[usize]) -> usize {
        let side = self.side();
        coords[..self.d].iter().fold(0, |acc, &c| acc * side + c)
    }

    pub fn center(&self, index: usize) -> [f64; MAX_DIM] {
        let c = self.coords(index);
        let h = self.cell_width();
        let mut out = [0.0; MAX_DIM];
        for axis in 0..self.d {
            out[axis] = (c[axis] as f64 + 0.5) * h;
        }
        out
    }

    pub fn centers(&self) -> Vec<[f64; MAX_DIM]> {
        (0..self.n_cells()).map(|i| self.center(i)).collect()
    }

    pub fn with_level(&self, level: u32) -> Result<Self> {
        GridSpec::new(self.d, level, self.m)
    }

    pub(crate) fn ensure_same(&self, other: &GridSpec) -> Result<()> {
        if self != other {
            return Err(Error::GridMismatch {
                left: self.to_string(),
                right: other.to_string(),
            });
        }
        Ok(())
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "d={} L={} m={}", self.d, self.level, self.m)
    }
}

/// Matrix-valued step function on a dyadic grid: one `m × m` complex matrix per cell.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixField {
    spec: GridSpec,
    cells: Vec<Mat>,
}

impl MatrixField {
    pub fn new(spec: GridSpec, cells: Vec<Mat>) -> Result<Self> {
        if cells.len() != spec.n_cells() {
            return Err(Error::Format(format!(
                "expected {} cells, got {}",
                spec.n_cells(),
                cells.len()
            )));
        }
        for (i, c) in cells.iter().enumerate() {
            if c.nrows() != spec.m || c.ncols() != spec.m {
                return Err(Error::Format(format!("cell {i} is {}x{}, expected m={}", c.nrows(), c.ncols(), spec.m)));
            }
            if c.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::Format(format!("cell {i} has a non-finite entry")));
            }
        }
        Ok(MatrixField { spec, cells })
    }

    pub(crate) fn from_cells_unchecked(spec: GridSpec, cells: Vec<Mat>) -> Self {
        debug_assert_eq!(cells.len(), spec.n_cells());
        MatrixField { spec, cells }
    }

    pub fn zeros(spec: GridSpec) -> Self {
        Self::constant(spec, &linalg::zeros(spec.m))
    }

    pub fn identity(spec: GridSpec) -> Self {
        Self::constant(spec, &linalg::identity(spec.m))
    }

    pub fn constant(spec: GridSpec, value: &Mat) -> Self {
        assert_eq!(value.nrows(), spec.m, "constant value has wrong size");
        MatrixField {
            spec,
            cells: vec![value.clone(); spec.n_cells()],
        }
    }

    /// Field whose value on each cell is `g(center)`.
    pub fn from_fn(spec: GridSpec, g: impl Fn(&[f64]) -> Mat) -> Self {
        let cells = (0..spec.n_cells())
            .map(|i| {
                let c = spec.center(i);
                let v = g(&c[..spec.d]);
                assert_eq!(v.nrows(), spec.m, "generator returned wrong size");
                v
            })
            .collect();
        MatrixField { spec, cells }
    }

    /// Scalar field (`m = 1`) from per-cell values in lexicographic order.
    pub fn from_scalars(spec: GridSpec, values: &[f64]) -> Result<Self> {
        if spec.m != 1 {
            return Err(Error::arg("spec", "scalar fields need m = 1"));
        }
        Self::new(
            spec,
            values
                .iter()
                .map(|&v| Mat::from_element(1, 1, C64::new(v, 0.0)))
                .collect(),
        )
    }

    /// `chi_n ⊗ a`, the character `exp(2πi n·u)` sampled at cell centers times a fixed matrix.
    pub fn character(spec: GridSpec, n: &[i64], a: &Mat) -> Self {
        Self::from_fn(spec, |u| {
            let phase: f64 = u.iter().zip(n).map(|(x, &k)| x * k as f64).sum::<f64>() * std::f64::consts::TAU;
            a * C64::from_polar(1.0, phase)
        })
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn cells(&self) -> &[Mat] {
        &self.cells
    }

    pub fn cell(&self, index: usize) -> &Mat {
        &self.cells[index]
    }

    pub fn into_cells(self) -> Vec<Mat> {
        self.cells
    }

    pub fn map(&self, g: impl Fn(&Mat) -> Mat) -> Self {
        MatrixField {
            spec: self.spec,
            cells: self.cells.iter().map(g).collect(),
        }
    }

    pub fn map_indexed(&self, g: impl Fn(usize, &Mat) -> Mat) -> Self {
        MatrixField {
            spec: self.spec,
            cells: self.cells.iter().enumerate().map(|(i, c)| g(i, c)).collect(),
        }
    }

    pub fn zip_with(&self, other: &MatrixField, g: impl Fn(&Mat, &Mat) -> Mat) -> Self {
        assert_eq!(self.spec, other.spec, "fields live on different grids");
        MatrixField {
            spec: self.spec,
            cells: self.cells.iter().zip(&other.cells).map(|(a, b)| g(a, b)).collect(),
        }
    }

    pub fn adjoint(&self) -> Self {
        self.map(|c| c.adjoint())
    }

    pub fn add(&self, other: &MatrixField) -> Self {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &MatrixField) -> Self {
        self.zip_with(other, |a, b| a - b)
    }

    /// Pointwise matrix product.
    pub fn mul(&self, other: &MatrixField) -> Self {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn scale(&self, c: C64) -> Self {
        self.map(|a| a * c)
    }

    pub fn scale_real(&self, c: f64) -> Self {
        self.scale(C64::new(c, 0.0))
    }

    /// `p f p` cellwise.
    pub fn compress(&self, p: &MatrixField) -> Self {
        assert_eq!(self.spec, p.spec, "fields live on different grids");
        MatrixField {
            spec: self.spec,
            cells: self
                .cells
                .iter()
                .zip(&p.cells)
                .map(|(f, q)| q * f * q)
                .collect(),
        }
    }

    /// `σ(f) = Σ_cells vol · Tr f(cell)`, summed in lexicographic order.
    pub fn trace(&self) -> C64 {
        let vol = self.spec.cell_volume();
        self.cells.iter().map(linalg::trace).sum::<C64>() * vol
    }

    pub fn hermitian_deviation(&self) -> f64 {
        self.cells
            .iter()
            .map(linalg::hermitian_deviation)
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.cells
            .iter()
            .flat_map(|c| c.iter())
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Noncommutative `L_p` norm, `p ∈ [1, ∞]` (use `f64::INFINITY` for the operator norm).
    pub fn lp_norm(&self, p: f64) -> f64 {
        assert!(p >= 1.0, "lp_norm needs p >= 1");
        if p.is_infinite() {
            return self
                .cells
                .iter()
                .map(linalg::op_norm)
                .fold(0.0, f64::max);
        }
        if p == 2.0 {
            return self.l2_norm();
        }
        let vol = self.spec.cell_volume();
        let sum: f64 = self
            .cells
            .iter()
            .map(|c| linalg::singular_values(c).iter().map(|s| s.powf(p)).sum::<f64>())
            .sum();
        (vol * sum).powf(1.0 / p)
    }

    pub fn l1_norm(&self) -> f64 {
        self.lp_norm(1.0)
    }

    /// Hilbert–Schmidt norm, `‖f‖₂² = σ(f* f)`.
    pub fn l2_norm(&self) -> f64 {
        let vol = self.spec.cell_volume();
        (vol * self.cells.iter().map(|c| linalg::hs_norm(c).powi(2)).sum::<f64>()).sqrt()
    }

    pub fn linf_norm(&self) -> f64 {
        self.lp_norm(f64::INFINITY)
    }

    /// Hermitian split `f = re + i·im` with `re`, `im` Hermitian.
    pub fn hermitian_split(&self) -> (MatrixField, MatrixField) {
        let half = C64::new(0.5, 0.0);
        let re = self.map(|a| (a + a.adjoint()) * half);
        let im = self.map(|a| (a - a.adjoint()) * C64::new(0.0, -0.5));
        (re, im)
    }

    /// Four positive parts with `f = f₁ − f₂ + i(f₃ − f₄)`.
    pub fn positive_parts(&self) -> [MatrixField; 4] {
        let (re, im) = self.hermitian_split();
        let split = |h: &MatrixField| {
            let pairs: Vec<(Mat, Mat)> = h.cells.iter().map(linalg::positive_negative_parts).collect();
            let (pos, neg): (Vec<Mat>, Vec<Mat>) = pairs.into_iter().unzip();
            (
                MatrixField::from_cells_unchecked(h.spec, pos),
                MatrixField::from_cells_unchecked(h.spec, neg),
            )
        };
        let (f1, f2) = split(&re);
        let (f3, f4) = split(&im);
        [f1, f2, f3, f4]
    }

    /// Cellwise spectral-cutoff split `f = y + z` with `y = u(|f| − c)₊`, `z = u min(|f|, c)`.
    pub fn cutoff_split(&self, c: f64) -> (MatrixField, MatrixField) {
        let mut ys = Vec::with_capacity(self.cells.len());
        let mut zs = Vec::with_capacity(self.cells.len());
        for cell in &self.cells {
            let s = linalg::svd(cell);
            let y = s.rebuild(|x| (x - c).max(0.0));
            let z = cell - &y;
            ys.push(y);
            zs.push(z);
        }
        (
            MatrixField::from_cells_unchecked(self.spec, ys),
            MatrixField::from_cells_unchecked(self.spec, zs),
        )
    }

    /// Smallest eigenvalue over all cells (fields assumed Hermitian).
    pub fn min_eigenvalue(&self) -> f64 {
        self.cells
            .iter()
            .map(|c| linalg::hermitian_eigen(c).0.first().copied().unwrap_or(0.0))
            .fold(f64::INFINITY, f64::min)
    }

    /// Relative `L₂` distance `‖self − other‖₂ / max(‖other‖₂, tiny)`.
    pub fn rel_l2_distance(&self, other: &MatrixField) -> f64 {
        let diff = self.sub(other).l2_norm();
        let scale = other.l2_norm().max(self.l2_norm());
        if scale == 0.0 {
            diff
        } else {
            diff / scale
        }
    }
}

/// Sum of several fields on the same grid.
pub fn sum_fields<'a>(spec: GridSpec, fields: impl IntoIterator<Item = &'a MatrixField>) -> MatrixField {
    let mut acc = MatrixField::zeros(spec);
    for f in fields {
        assert_eq!(f.spec, spec, "fields live on different grids");
        for (a, b) in acc.cells.iter_mut().zip(&f.cells) {
            *a += b;
        }
    }
    acc
}
