use nalgebra::DMatrix;

use super::fourier::{fourier, inverse_fourier, FourierCoefficients};
use super::symbol::partial_derivative;
use crate::linalg::{Mat, C64};
use crate::ncmeasure::{GridSpec, MatrixField};
use crate::{Error, Result};

/// `ρ(n)` with `ρ_ij(n) = δ_ij − n_i n_j / |n|²` and `ρ(0) = Id`.
pub fn leray_symbol(n: &[i64]) -> DMatrix<f64> {
    let d = n.len();
    let norm2: i64 = n.iter().map(|v| v * v).sum();
    DMatrix::from_fn(d, d, |i, j| {
        let delta = if i == j { 1.0 } else { 0.0 };
        if norm2 == 0 {
            delta
        } else {
            delta - (n[i] * n[j]) as f64 / norm2 as f64
        }
    })
}

fn check_components(fields: &[MatrixField]) -> Result<GridSpec> {
    let first = fields.first().ok_or_else(|| Error::arg("f", "empty tuple"))?;
    let spec = *first.spec();
    if fields.len() != spec.d {
        return Err(Error::arg(
            "f",
            format!("expected {} components for d = {}, got {}", spec.d, spec.d, fields.len()),
        ));
    }
    for f in &fields[1..] {
        spec.ensure_same(f.spec())?;
    }
    Ok(spec)
}

/// Apply a `d × d` matrix symbol to a `d`-tuple of fields.
pub fn apply_matrix_symbol(fields: &[MatrixField], symbol: impl Fn(&[i64]) -> DMatrix<f64>) -> Result<Vec<MatrixField>> {
    let spec = check_components(fields)?;
    let d = spec.d;
    let coefs: Vec<FourierCoefficients> = fields.iter().map(fourier).collect();
    let mut out: Vec<FourierCoefficients> = (0..d).map(|_| FourierCoefficients::zeros(spec)).collect();
    for pos in 0..spec.n_cells() {
        let n = coefs[0].frequency_at(pos);
        let rho = symbol(&n[..d]);
        for i in 0..d {
            let mut acc = Mat::zeros(spec.m, spec.m);
            for j in 0..d {
                let w = rho[(i, j)];
                if w != 0.0 {
                    acc += &coefs[j].table()[pos] * C64::new(w, 0.0);
                }
            }
            out[i].table_mut()[pos] = acc;
        }
    }
    Ok(out.iter().map(inverse_fourier).collect())
}

pub fn leray_projection(fields: &[MatrixField]) -> Result<Vec<MatrixField>> {
    apply_matrix_symbol(fields, leray_symbol)
}

/// `P^⊥ = Id − P`.
pub fn leray_complement(fields: &[MatrixField]) -> Result<Vec<MatrixField>> {
    apply_matrix_symbol(fields, |n| DMatrix::identity(n.len(), n.len()) - leray_symbol(n))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Membership {
    /// `Σ_j ∂_j f_j = 0`.
    Range,
    /// `∂_i f_j = ∂_j f_i` and `f̂_j(0) = 0`.
    Complement,
}

/// `‖·‖₂` residual of the defining relations of `H(P)` or `H(P^⊥)`.
pub fn membership_check(fields: &[MatrixField], which: Membership) -> Result<f64> {
    let spec = check_components(fields)?;
    let d = spec.d;
    let derivs: Vec<Vec<MatrixField>> = fields
        .iter()
        .map(|f| (0..d).map(|i| partial_derivative(f, i)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    match which {
        Membership::Range => {
            let div = (0..d).fold(MatrixField::zeros(spec), |acc, j| acc.add(&derivs[j][j]));
            Ok(div.l2_norm())
        }
        Membership::Complement => {
            let mut total = 0.0;
            for i in 0..d {
                for j in (i + 1)..d {
                    // ∂_i f_j − ∂_j f_i
                    total += derivs[j][i].sub(&derivs[i][j]).l2_norm().powi(2);
                }
                let mean = fourier(&fields[i]).get(&vec![0; d]).expect("zero frequency").clone();
                total += mean.norm_squared();
            }
            Ok(total.sqrt())
        }
    }
}

/// Mean-zero `g` with `∇g = G` for a curl-free tuple `G`:
/// `ĝ(n) = Σ_j (−i n_j) Ĝ_j(n) / |n|²`, `ĝ(0) = 0`.
pub fn antiderivative(fields: &[MatrixField]) -> Result<MatrixField> {
    let spec = check_components(fields)?;
    let d = spec.d;
    let coefs: Vec<FourierCoefficients> = fields.iter().map(fourier).collect();
    let mut out = FourierCoefficients::zeros(spec);
    for pos in 0..spec.n_cells() {
        let n = coefs[0].frequency_at(pos);
        let norm2: i64 = n[..d].iter().map(|v| v * v).sum();
        if norm2 == 0 {
            continue;
        }
        let mut acc = Mat::zeros(spec.m, spec.m);
        for j in 0..d {
            acc += &coefs[j].table()[pos] * C64::new(0.0, -(n[j] as f64) / norm2 as f64);
        }
        out.table_mut()[pos] = acc;
    }
    Ok(inverse_fourier(&out))
}

/// `(∂₁ g, …, ∂_d g)`.
pub fn gradient(g: &MatrixField) -> Result<Vec<MatrixField>> {
    (0..g.spec().d).map(|j| partial_derivative(g, j)).collect()
}
