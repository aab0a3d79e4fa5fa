use rayon::prelude::*;

use crate::dyadic;
use crate::linalg::{self, Mat};
use crate::ncmeasure::{GridSpec, MatrixField};
use crate::{Error, Result};

/// Relative slack of the closed spectral cutoff `1_{[0,s]}`.
pub const CUTOFF_SLACK: f64 = 1e-12;
pub const INPUT_TOL: f64 = 1e-8;

/// Cuculescu projections of a positive field at threshold `s`.
///
/// `q_Q` and `e_Q` are stored per cube: `q[n][Q]` for every order `n = 0..=L`
/// (with `q[0] = 1`) and `e[n][Q] = q_{n-1}(Q̂) − q_n(Q)` for `n ≥ 1` (`e[0]` is empty).
#[derive(Clone, Debug)]
pub struct CuculescuState {
    pub s: f64,
    spec: GridSpec,
    q: Vec<Vec<Mat>>,
    e: Vec<Vec<Mat>>,
}

pub(crate) fn check_positive(f: &MatrixField) -> Result<()> {
    let dev = f.hermitian_deviation();
    if dev > INPUT_TOL {
        return Err(Error::NotHermitian { deviation: dev });
    }
    let low = f.min_eigenvalue();
    if low < -INPUT_TOL {
        return Err(Error::NotPositive { eigenvalue: low });
    }
    Ok(())
}

pub(crate) fn check_threshold(s: f64) -> Result<()> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::arg("s", format!("threshold must be positive and finite, got {s}")));
    }
    Ok(())
}

/// `q_n := 1_{[0,s]}(q_{n-1} E_n(f) q_{n-1})` restricted to the range of `q_{n-1}`.
pub fn cuculescu(f: &MatrixField, s: f64) -> Result<CuculescuState> {
    check_positive(f)?;
    check_threshold(s)?;
    let spec = *f.spec();
    let (d, m) = (spec.d, spec.m);
    let cut = s * (1.0 + CUTOFF_SLACK);
    // orthonormal bases of range(q_Q) at the previous order
    let mut bases = vec![linalg::identity(m)];
    let mut q = vec![vec![linalg::identity(m)]];
    let mut e = vec![Vec::new()];
    for n in 1..=spec.level {
        let means = dyadic::cube_means(f, n)?;
        let prev_bases = &bases;
        let prev_q = &q[n as usize - 1];
        let results: Vec<(Mat, Mat, Mat)> = means
            .par_iter()
            .enumerate()
            .map(|(k, mean)| {
                let parent = parent_index(d, n, k);
                let v = &prev_bases[parent];
                let basis = if v.ncols() == 0 {
                    v.clone()
                } else {
                    let c = v.adjoint() * mean * v;
                    if linalg::trace(&c).re <= cut {
                        // every eigenvalue of the positive compression is below the trace
                        v.clone()
                    } else {
                        let (values, vectors) = linalg::hermitian_eigen(&c);
                        v * linalg::select_columns(&values, &vectors, |x| x <= cut)
                    }
                };
                let qq = linalg::projector(&basis);
                let ee = &prev_q[parent] - &qq;
                (basis, qq, ee)
            })
            .collect();
        let mut next_bases = Vec::with_capacity(results.len());
        let mut qn = Vec::with_capacity(results.len());
        let mut en = Vec::with_capacity(results.len());
        for (b, qq, ee) in results {
            next_bases.push(b);
            qn.push(qq);
            en.push(ee);
        }
        bases = next_bases;
        q.push(qn);
        e.push(en);
    }
    Ok(CuculescuState { s, spec, q, e })
}

/// Linear index of the parent (order `n − 1`) of the order-`n` cube with linear index `k`.
pub(crate) fn parent_index(d: usize, n: u32, k: usize) -> usize {
    let side = 1usize << n;
    let mut rest = k;
    let mut coords = [0usize; 3];
    for c in (0..d).rev() {
        coords[c] = rest % side;
        rest /= side;
    }
    let half = side / 2;
    coords[..d].iter().fold(0, |acc, &i| acc * half + i / 2)
}

impl CuculescuState {
    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn levels(&self) -> u32 {
        self.spec.level
    }

    /// Per-cube `q_Q` for cubes of order `n`.
    pub fn q_cubes(&self, n: u32) -> &[Mat] {
        &self.q[n as usize]
    }

    /// Per-cube `e_Q` for cubes of order `n ≥ 1`.
    pub fn e_cubes(&self, n: u32) -> &[Mat] {
        &self.e[n as usize]
    }

    pub fn q_field(&self, n: u32) -> MatrixField {
        dyadic::expand(self.spec, n, &self.q[n as usize])
    }

    pub fn e_field(&self, n: u32) -> MatrixField {
        assert!(n >= 1, "e_n is defined for n ≥ 1");
        dyadic::expand(self.spec, n, &self.e[n as usize])
    }

    /// Terminal projection `q = q_L`.
    pub fn q(&self) -> MatrixField {
        self.q_field(self.spec.level)
    }

    /// `e = 1 − q`.
    pub fn e(&self) -> MatrixField {
        MatrixField::identity(self.spec).sub(&self.q())
    }

    /// `σ(1 − q)`.
    pub fn bad_trace(&self) -> f64 {
        self.e().trace().re
    }

    /// Cubes `(n, Q)` with `e_Q ≠ 0`.
    pub fn active_cubes(&self) -> Vec<(u32, usize)> {
        let mut out = Vec::new();
        for n in 1..=self.spec.level {
            for (k, e) in self.e[n as usize].iter().enumerate() {
                if linalg::hs_norm(e) > 1e-9 {
                    out.push((n, k));
                }
            }
        }
        out
    }

    /// Largest deviation of the stored `q_Q` from being orthogonal projections,
    /// and largest violation of `q_n ≤ q_{n−1}`.
    pub fn projection_defects(&self) -> (f64, f64) {
        let d = self.spec.d;
        let mut idem = 0.0_f64;
        let mut mono = 0.0_f64;
        for n in 0..=self.spec.level {
            for (k, q) in self.q[n as usize].iter().enumerate() {
                idem = idem.max(linalg::hs_norm(&(q * q - q))).max(linalg::hermitian_deviation(q));
                if n >= 1 {
                    let diff = &self.q[n as usize - 1][parent_index(d, n, k)] - q;
                    let (values, _) = linalg::hermitian_eigen(&diff);
                    mono = mono.max(-values.first().copied().unwrap_or(0.0));
                }
            }
        }
        (idem, mono)
    }

    /// `max_n ‖q_n E_n(f) q_n‖_∞`.
    pub fn max_compressed_norm(&self, f: &MatrixField) -> Result<f64> {
        let mut worst = 0.0_f64;
        for n in 1..=self.spec.level {
            let means = dyadic::cube_means(f, n)?;
            for (q, mean) in self.q[n as usize].iter().zip(&means) {
                worst = worst.max(linalg::op_norm(&(q * mean * q)));
            }
        }
        Ok(worst)
    }
}
