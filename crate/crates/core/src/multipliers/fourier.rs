use std::sync::Arc;

use rustfft::{Fft, FftDirection, FftPlanner};

use crate::linalg::{Mat, C64};
use crate::ncmeasure::{GridSpec, MatrixField, MAX_DIM};

/// Frequency of FFT position `j` on an axis of `n` points: `{−n/2, …, n/2 − 1}`.
pub fn frequency(j: usize, n: usize) -> i64 {
    if j < n.div_ceil(2) {
        j as i64
    } else {
        j as i64 - n as i64
    }
}

/// In-place d-dimensional unnormalized DFT of a lexicographically stored array.
pub fn fft_nd(data: &mut [C64], d: usize, side: usize, direction: FftDirection) {
    if side == 1 {
        return;
    }
    let fft: Arc<dyn Fft<f64>> = FftPlanner::new().plan_fft(side, direction);
    let mut line = vec![C64::new(0.0, 0.0); side];
    let mut scratch = vec![C64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    for axis in 0..d {
        let stride = side.pow((d - 1 - axis) as u32);
        let block = stride * side;
        for outer in (0..data.len()).step_by(block) {
            for inner in 0..stride {
                let base = outer + inner;
                for (k, v) in line.iter_mut().enumerate() {
                    *v = data[base + k * stride];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for (k, v) in line.iter().enumerate() {
                    data[base + k * stride] = *v;
                }
            }
        }
    }
}

/// Fourier coefficients `f̂(n)` on the frequency box `{−N/2, …, N/2 − 1}^d`.
///
/// `f̂(n) = N^{-d} Σ_k f_k e^{−2πi n·(k+½)/N}` (cell-center phase), so that a character
/// sampled at cell centers has coefficient exactly one and `f̂(0)` is the mean.
/// The table is stored in FFT order: position `j` on an axis carries `frequency(j, N)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierCoefficients {
    spec: GridSpec,
    table: Vec<Mat>,
}

fn phase(spec: &GridSpec, pos: usize, sign: f64) -> C64 {
    let side = spec.side();
    let c = spec.coords(pos);
    let total: i64 = c[..spec.d].iter().map(|&j| frequency(j, side)).sum();
    C64::from_polar(1.0, sign * std::f64::consts::PI * total as f64 / side as f64)
}

/// Scalar entry `(a, b)` of every cell as a flat array.
fn entry_array(cells: &[Mat], a: usize, b: usize) -> Vec<C64> {
    cells.iter().map(|c| c[(a, b)]).collect()
}

fn transform(spec: &GridSpec, cells: &[Mat], forward: bool) -> Vec<Mat> {
    let m = spec.m;
    let n = spec.n_cells();
    let mut out = vec![Mat::zeros(m, m); n];
    let phases: Vec<C64> = (0..n)
        .map(|k| phase(spec, k, if forward { -1.0 } else { 1.0 }))
        .collect();
    let scale = if forward { 1.0 / n as f64 } else { 1.0 };
    for a in 0..m {
        for b in 0..m {
            let mut data = entry_array(cells, a, b);
            if forward {
                fft_nd(&mut data, spec.d, spec.side(), FftDirection::Forward);
                for (k, v) in data.iter().enumerate() {
                    out[k][(a, b)] = v * phases[k] * scale;
                }
            } else {
                for (k, v) in data.iter_mut().enumerate() {
                    *v *= phases[k];
                }
                fft_nd(&mut data, spec.d, spec.side(), FftDirection::Inverse);
                for (k, v) in data.iter().enumerate() {
                    out[k][(a, b)] = *v;
                }
            }
        }
    }
    out
}

pub fn fourier(f: &MatrixField) -> FourierCoefficients {
    FourierCoefficients {
        spec: *f.spec(),
        table: transform(f.spec(), f.cells(), true),
    }
}

pub fn inverse_fourier(c: &FourierCoefficients) -> MatrixField {
    MatrixField::new(c.spec, transform(&c.spec, &c.table, false)).expect("finite coefficients")
}

impl FourierCoefficients {
    pub fn zeros(spec: GridSpec) -> Self {
        FourierCoefficients {
            spec,
            table: vec![Mat::zeros(spec.m, spec.m); spec.n_cells()],
        }
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn table(&self) -> &[Mat] {
        &self.table
    }

    pub fn table_mut(&mut self) -> &mut [Mat] {
        &mut self.table
    }

    /// Frequency carried by table position `pos`.
    pub fn frequency_at(&self, pos: usize) -> [i64; MAX_DIM] {
        frequency_vector(&self.spec, pos)
    }

    /// Table position of frequency `n`, if it lies in the box.
    pub fn position(&self, n: &[i64]) -> Option<usize> {
        let side = self.spec.side() as i64;
        let half = side / 2;
        let mut coords = [0usize; MAX_DIM];
        for k in 0..self.spec.d {
            let lo = if side == 1 { 0 } else { -half };
            let hi = if side == 1 { 0 } else { half - 1 };
            if n[k] < lo || n[k] > hi {
                return None;
            }
            coords[k] = n[k].rem_euclid(side) as usize;
        }
        Some(self.spec.index(&coords[..self.spec.d]))
    }

    pub fn get(&self, n: &[i64]) -> Option<&Mat> {
        self.position(n).map(|p| &self.table[p])
    }

    /// `Σ_n ‖f̂(n)‖²_HS`.
    pub fn energy(&self) -> f64 {
        self.table.iter().map(|c| c.norm_squared()).sum()
    }
}

pub fn frequency_vector(spec: &GridSpec, pos: usize) -> [i64; MAX_DIM] {
    let c = spec.coords(pos);
    let mut n = [0i64; MAX_DIM];
    for k in 0..spec.d {
        n[k] = frequency(c[k], spec.side());
    }
    n
}
