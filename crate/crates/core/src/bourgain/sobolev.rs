use rayon::prelude::*;

use super::{sort_rows, InstanceGen, ReportRow};
use crate::linalg::op_norm;
use crate::multipliers::{antiderivative, fourier, gradient, leray_complement};
use crate::ncmeasure::{GridSpec, MatrixField, SingularFunction};
use crate::{Error, Result};

/// A Sobolev splitting `f = g + h` together with both sides of the K-functional comparison.
#[derive(Clone, Debug)]
pub struct SobolevWitness {
    pub g: MatrixField,
    pub h: MatrixField,
    /// `Σ_j K_t(∂_j f, L₁, L_∞)`, exact.
    pub lower: f64,
    /// `Σ_j ‖∂_j g‖₁ + t Σ_j ‖∂_j h‖_∞`.
    pub upper: f64,
    /// `‖f − g − h‖₂`.
    pub residual: f64,
}

impl SobolevWitness {
    /// `upper / lower`, 1 when both vanish.
    pub fn ratio(&self) -> f64 {
        if self.lower > 0.0 {
            self.upper / self.lower
        } else {
            1.0
        }
    }
}

/// `g` with `∇g = U` for a tuple in the range of the Leray complement; refuses a tuple with a
/// nonzero mean.
pub(crate) fn checked_antiderivative(fields: &[MatrixField]) -> Result<MatrixField> {
    for (j, f) in fields.iter().enumerate() {
        let coefs = fourier(f);
        let zero = [0i64; 3];
        let mean = op_norm(coefs.get(&zero[..f.spec().d]).expect("zero frequency"));
        if mean > 1e-12 * f.linf_norm().max(1.0) {
            return Err(Error::Precondition(format!(
                "component {j} has a nonzero mean ({mean:.3e}); it is not a gradient"
            )));
        }
    }
    antiderivative(fields)
}

/// Cutoff-splits `∇f` componentwise at `μ_{∂_j f}(t)`, projects both halves onto gradients with
/// the Leray complement and integrates them back.
pub fn sobolev_witness(f: &MatrixField, t: f64) -> Result<SobolevWitness> {
    let spec = *f.spec();
    if spec.d < 2 {
        return Err(Error::arg("grid", format!("the Sobolev experiment needs d ≥ 2, got d = {}", spec.d)));
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::arg("t", format!("must be positive, got {t}")));
    }
    let grad = gradient(f)?;
    let mut lower = 0.0;
    let mut large = Vec::with_capacity(spec.d);
    let mut small = Vec::with_capacity(spec.d);
    for gj in &grad {
        let mu = SingularFunction::of(gj);
        lower += mu.integral_to(t);
        let (u, v) = gj.cutoff_split(mu.value_at(t));
        large.push(u);
        small.push(v);
    }
    let g = checked_antiderivative(&leray_complement(&large)?)?;
    let mean = &fourier(f).get(&[0i64; 3][..spec.d]).expect("zero frequency").clone();
    let h = checked_antiderivative(&leray_complement(&small)?)?.add(&MatrixField::constant(spec, mean));
    let upper = gradient(&g)?.iter().map(MatrixField::l1_norm).sum::<f64>()
        + t * gradient(&h)?.iter().map(MatrixField::linf_norm).sum::<f64>();
    let residual = f.sub(&g).sub(&h).l2_norm();
    Ok(SobolevWitness {
        g,
        h,
        lower,
        upper,
        residual,
    })
}

/// Sobolev K-functional comparison over `n_instances` scalar instances and `t_grid`.
pub fn sobolev_k_experiment(gen: &InstanceGen, spec: GridSpec, t_grid: &[f64], n_instances: usize) -> Result<Vec<ReportRow>> {
    if spec.d < 2 {
        return Err(Error::arg("grid", format!("the Sobolev experiment needs d ≥ 2, got d = {}", spec.d)));
    }
    if let Some(&t) = t_grid.iter().find(|&&t| !(t > 0.0 && t.is_finite())) {
        return Err(Error::arg("t_grid", format!("t must be positive, got {t}")));
    }
    let per_instance: Vec<Vec<ReportRow>> = (0..n_instances)
        .into_par_iter()
        .map(|i| {
            let instance = gen.draw(spec, i, None)?;
            if instance.fields.len() != 1 {
                return Err(Error::arg("kind", "the Sobolev experiment needs scalar instances"));
            }
            let f = &instance.fields[0];
            let scale = f.l2_norm().max(1.0);
            t_grid
                .iter()
                .map(|&t| {
                    let w = sobolev_witness(f, t)?;
                    let mut row = ReportRow::new("sobolev", "leray_complement", &spec, instance.index, instance.seed, "t", t);
                    row.push("lower", w.lower);
                    row.push("upper", w.upper);
                    row.push("ratio", w.ratio());
                    row.push("residual", w.residual);
                    row.check("lower_le_upper", w.lower, w.upper);
                    row.check("residual", w.residual, 1e-9 * scale);
                    Ok(row)
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rows: Vec<ReportRow> = per_instance.into_iter().flatten().collect();
    sort_rows(&mut rows);
    Ok(rows)
}
