//! Cuculescu projections and the semicommutative Calderón–Zygmund decomposition.
//!
//! For a positive field `f` and a threshold `s`,
//!
//! ```text
//! a   = q f q + Σ_n E_{n−1}(e_n f e_n)
//! b_d = Σ_n [e_n f e_n − E_{n−1}(e_n f e_n)]
//! b_o = f − q f q − Σ_n e_n f e_n
//! ```
//!
//! and `p` is the complement of the join of `1_{B_{3d_Q}(y_Q)} ⊗ e_Q`. General fields are
//! handled through their four positive parts, direct sums through a shared projection.

mod cuculescu;
mod projection;

pub use cuculescu::{cuculescu, CuculescuState, CUTOFF_SLACK, INPUT_TOL};
pub use projection::{cells_in_ball, cz_projection, meet_fields, support_defect, DILATION, RANGE_TOL};

use serde::Serialize;

use crate::dyadic;
use crate::linalg::{self, C64};
use crate::ncmeasure::{sum_fields, GridSpec, MatrixField};
use crate::Result;

/// Output of the decomposition `f = a + b_d + b_o` with projection `p`.
///
/// `states` holds the Cuculescu data of every positive part that entered the
/// construction together with its coefficient (`1`, `−1`, `i`, `−i`).
#[derive(Clone, Debug)]
pub struct CZParts {
    pub s: f64,
    pub a: MatrixField,
    pub b_d: MatrixField,
    pub b_o: MatrixField,
    pub p: MatrixField,
    pub states: Vec<(C64, CuculescuState)>,
}

impl CZParts {
    pub fn b(&self) -> MatrixField {
        self.b_d.add(&self.b_o)
    }

    pub fn spec(&self) -> &GridSpec {
        self.a.spec()
    }

    /// `σ(1 − p)`.
    pub fn p_perp_trace(&self) -> f64 {
        MatrixField::identity(*self.spec()).sub(&self.p).trace().re
    }

    pub fn reconstruction_error(&self, f: &MatrixField) -> f64 {
        self.a.add(&self.b_d).add(&self.b_o).rel_l2_distance(f)
    }

    /// Measured constants of the first two decomposition bounds.
    pub fn constants(&self, f_l1: f64) -> CZConstants {
        let a2 = self.a.l2_norm().powi(2);
        CZConstants {
            a_bound: if f_l1 > 0.0 { (a2 / (self.s * f_l1)).sqrt() } else { 0.0 },
            p_bound: if f_l1 > 0.0 { (self.p_perp_trace() * self.s / f_l1).sqrt() } else { 0.0 },
        }
    }
}

/// `C` such that `‖a‖₂² = C² s ‖f‖₁` and `σ(1 − p) = C² s⁻¹ ‖f‖₁`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct CZConstants {
    pub a_bound: f64,
    pub p_bound: f64,
}

// levels whose `e_n` vanish to rounding contribute nothing to `a` or `b_d`
const NEGLIGIBLE: f64 = 1e-13;

/// `(a, b_d, b_o)` for a positive field from its Cuculescu state.
fn split_positive(f: &MatrixField, state: &CuculescuState) -> Result<(MatrixField, MatrixField, MatrixField)> {
    let spec = *f.spec();
    let q = state.q();
    let qfq = f.compress(&q);
    let mut efe_sum = MatrixField::zeros(spec);
    let mut cond_sum = MatrixField::zeros(spec);
    for n in 1..=spec.level {
        if state.e_cubes(n).iter().all(|e| linalg::hs_norm(e) <= NEGLIGIBLE) {
            continue;
        }
        let efe = f.compress(&state.e_field(n));
        cond_sum = cond_sum.add(&dyadic::conditional_expectation(&efe, n - 1)?);
        efe_sum = efe_sum.add(&efe);
    }
    let a = qfq.add(&cond_sum);
    let b_d = efe_sum.sub(&cond_sum);
    let b_o = f.sub(&qfq).sub(&efe_sum);
    Ok((a, b_d, b_o))
}

pub fn cz_decompose_positive(f: &MatrixField, s: f64) -> Result<CZParts> {
    let state = cuculescu(f, s)?;
    let (a, b_d, b_o) = split_positive(f, &state)?;
    let p = cz_projection(&state);
    Ok(CZParts {
        s,
        a,
        b_d,
        b_o,
        p,
        states: vec![(C64::new(1.0, 0.0), state)],
    })
}

/// Decomposition of an arbitrary field through `f = f₁ − f₂ + i(f₃ − f₄)`.
pub fn cz_decompose(f: &MatrixField, s: f64) -> Result<CZParts> {
    cuculescu::check_threshold(s)?;
    let spec = *f.spec();
    let coefficients = [
        C64::new(1.0, 0.0),
        C64::new(-1.0, 0.0),
        C64::new(0.0, 1.0),
        C64::new(0.0, -1.0),
    ];
    let mut a = Vec::new();
    let mut b_d = Vec::new();
    let mut b_o = Vec::new();
    let mut ps = Vec::new();
    let mut states = Vec::new();
    for (part, c) in f.positive_parts().iter().zip(coefficients) {
        if part.max_abs() == 0.0 {
            continue;
        }
        let parts = cz_decompose_positive(part, s)?;
        a.push(parts.a.scale(c));
        b_d.push(parts.b_d.scale(c));
        b_o.push(parts.b_o.scale(c));
        ps.push(parts.p);
        states.extend(parts.states.into_iter().map(|(_, st)| (c, st)));
    }
    let p = if ps.is_empty() {
        MatrixField::identity(spec)
    } else {
        meet_fields(&ps.iter().collect::<Vec<_>>())
    };
    Ok(CZParts {
        s,
        a: sum_fields(spec, &a),
        b_d: sum_fields(spec, &b_d),
        b_o: sum_fields(spec, &b_o),
        p,
        states,
    })
}

/// Decomposition of a direct sum `f = (f₁, …, f_k)` with the shared projection `⋀_j p_j`.
#[derive(Clone, Debug)]
pub struct VectorCZParts {
    pub s: f64,
    pub components: Vec<CZParts>,
    pub p: MatrixField,
}

impl VectorCZParts {
    pub fn a(&self) -> Vec<MatrixField> {
        self.components.iter().map(|c| c.a.clone()).collect()
    }

    pub fn b(&self) -> Vec<MatrixField> {
        self.components.iter().map(CZParts::b).collect()
    }

    /// `σ^{⊕k}(p^⊥) = k · σ(p^⊥)`.
    pub fn p_perp_trace(&self) -> f64 {
        let spec = *self.p.spec();
        self.components.len() as f64 * MatrixField::identity(spec).sub(&self.p).trace().re
    }
}

pub fn cz_decompose_vector(fields: &[MatrixField], s: f64) -> Result<VectorCZParts> {
    cuculescu::check_threshold(s)?;
    let first = fields
        .first()
        .ok_or_else(|| crate::Error::arg("f", "at least one component is required"))?;
    for f in &fields[1..] {
        first.spec().ensure_same(f.spec())?;
    }
    let components = fields
        .iter()
        .map(|f| cz_decompose(f, s))
        .collect::<Result<Vec<_>>>()?;
    let p = meet_fields(&components.iter().map(|c| &c.p).collect::<Vec<_>>());
    Ok(VectorCZParts { s, components, p })
}

#[cfg(test)]
mod tests;
