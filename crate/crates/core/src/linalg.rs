//! Small dense complex matrix helpers used per cell.

use nalgebra::{DMatrix, SymmetricEigen, SVD};
pub use num_complex::Complex64 as C64;

pub type Mat = DMatrix<C64>;

/// Relative threshold below which singular values are treated as zero.
pub const SINGULAR_CLAMP: f64 = 1e-12;

pub fn zeros(m: usize) -> Mat {
    Mat::zeros(m, m)
}

pub fn identity(m: usize) -> Mat {
    Mat::identity(m, m)
}

pub fn trace(a: &Mat) -> C64 {
    (0..a.nrows()).map(|i| a[(i, i)]).sum()
}

/// Largest entrywise deviation `|a - a*|`.
pub fn hermitian_deviation(a: &Mat) -> f64 {
    let n = a.nrows();
    let mut dev = 0.0_f64;
    for i in 0..n {
        for j in 0..n {
            dev = dev.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    dev
}

pub fn hermitian_part(a: &Mat) -> Mat {
    (a + a.adjoint()) * C64::new(0.5, 0.0)
}

/// Eigen-decomposition of a Hermitian matrix with eigenvalues sorted ascending.
///
/// The input is symmetrized first so that rounding noise in the lower triangle
/// does not leak into the result.
pub fn hermitian_eigen(a: &Mat) -> (Vec<f64>, Mat) {
    let n = a.nrows();
    if n == 0 {
        return (Vec::new(), Mat::zeros(0, 0));
    }
    let eig = SymmetricEigen::new(hermitian_part(a));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = Mat::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        vectors.set_column(col, &eig.eigenvectors.column(i));
    }
    (values, vectors)
}

/// Columns of `vectors` whose eigenvalue satisfies `keep`.
pub fn select_columns(values: &[f64], vectors: &Mat, keep: impl Fn(f64) -> bool) -> Mat {
    let cols: Vec<usize> = (0..values.len()).filter(|&i| keep(values[i])).collect();
    let mut out = Mat::zeros(vectors.nrows(), cols.len());
    for (c, &i) in cols.iter().enumerate() {
        out.set_column(c, &vectors.column(i));
    }
    out
}

/// Orthogonal projection `V V*` onto the span of orthonormal columns.
pub fn projector(basis: &Mat) -> Mat {
    basis * basis.adjoint()
}

/// Projection onto the range of a positive semidefinite matrix.
pub fn range_projection(a: &Mat, tol: f64) -> Mat {
    let (values, vectors) = hermitian_eigen(a);
    projector(&select_columns(&values, &vectors, |v| v > tol))
}

/// Meet of orthogonal projections: the eigenvalue-1 eigenspace of
/// `p_1 ⋯ p_k ⋯ p_1`, eigenvalues above `1 - 1e-9` counted as 1.
pub fn meet(projections: &[&Mat]) -> Mat {
    let m = projections[0].nrows();
    if projections.len() == 1 {
        return projections[0].clone();
    }
    let mut product = identity(m);
    for p in projections {
        product = &product * *p;
    }
    for p in projections.iter().rev().skip(1) {
        product = &product * *p;
    }
    let (values, vectors) = hermitian_eigen(&product);
    projector(&select_columns(&values, &vectors, |v| v > 1.0 - 1e-9))
}

/// Singular values in descending order; values below `SINGULAR_CLAMP · s_max` are set to 0.
pub fn singular_values(a: &Mat) -> Vec<f64> {
    let n = a.nrows();
    if n == 1 {
        return vec![a[(0, 0)].norm()];
    }
    let mut sv: Vec<f64> = SVD::new(a.clone(), false, false)
        .singular_values
        .iter()
        .copied()
        .collect();
    sv.sort_by(|x, y| y.total_cmp(x));
    clamp_small(&mut sv);
    sv
}

fn clamp_small(sv: &mut [f64]) {
    let top = sv.first().copied().unwrap_or(0.0);
    for s in sv.iter_mut() {
        if *s < SINGULAR_CLAMP * top {
            *s = 0.0;
        }
    }
}

/// Polar-type factorization `a = U diag(σ) V*` with σ descending.
pub struct Svd {
    pub u: Mat,
    pub sigma: Vec<f64>,
    pub v_t: Mat,
}

pub fn svd(a: &Mat) -> Svd {
    let n = a.nrows();
    if n == 1 {
        let z = a[(0, 0)];
        let r = z.norm();
        let phase = if r > 0.0 { z / r } else { C64::new(1.0, 0.0) };
        return Svd {
            u: Mat::from_element(1, 1, phase),
            sigma: vec![r],
            v_t: Mat::identity(1, 1),
        };
    }
    let dec = SVD::new(a.clone(), true, true);
    let u = dec.u.expect("requested U");
    let v_t = dec.v_t.expect("requested V*");
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| dec.singular_values[j].total_cmp(&dec.singular_values[i]));
    let mut su = Mat::zeros(n, n);
    let mut sv = Mat::zeros(n, n);
    let mut sigma = Vec::with_capacity(n);
    for (k, &i) in order.iter().enumerate() {
        su.set_column(k, &u.column(i));
        sv.set_row(k, &v_t.row(i));
        sigma.push(dec.singular_values[i]);
    }
    clamp_small(&mut sigma);
    Svd { u: su, sigma, v_t: sv }
}

impl Svd {
    /// Rebuild `U diag(g(σ)) V*`.
    pub fn rebuild(&self, g: impl Fn(f64) -> f64) -> Mat {
        let n = self.sigma.len();
        let mut scaled = self.u.clone();
        for k in 0..n {
            let factor = C64::new(g(self.sigma[k]), 0.0);
            for i in 0..n {
                scaled[(i, k)] *= factor;
            }
        }
        scaled * &self.v_t
    }
}

/// Split a Hermitian matrix into positive and negative parts, `h = h₊ − h₋`.
pub fn positive_negative_parts(h: &Mat) -> (Mat, Mat) {
    let (values, vectors) = hermitian_eigen(h);
    let n = values.len();
    let mut pos = Mat::zeros(n, n);
    let mut neg = Mat::zeros(n, n);
    for (k, &lambda) in values.iter().enumerate() {
        let v = vectors.column(k);
        let outer = &v * v.adjoint();
        if lambda > 0.0 {
            pos += outer * C64::new(lambda, 0.0);
        } else if lambda < 0.0 {
            neg += outer * C64::new(-lambda, 0.0);
        }
    }
    (pos, neg)
}

/// Operator norm (largest singular value).
pub fn op_norm(a: &Mat) -> f64 {
    singular_values(a).first().copied().unwrap_or(0.0)
}

/// Frobenius norm.
pub fn hs_norm(a: &Mat) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}
