use rayon::prelude::*;

use super::{bourgain_split, ratio, sort_rows, tuple_add, tuple_l1, tuple_l2, tuple_sub, Branch, InstanceGen, Operator, ReportRow};
use crate::ncmeasure::{GridSpec, MatrixField, SingularFunction};
use crate::{Error, Result};

/// Relative tolerance of the `x = y + z`, `P(x) = x` preconditions and of the output residuals.
pub const KCLOSED_TOL: f64 = 1e-9;

/// Output of [`kclosed_decompose`]: `x = y′ + z′` with both parts in the range of `P`.
#[derive(Clone, Debug)]
pub struct KClosedResult {
    pub y_prime: Vec<MatrixField>,
    pub z_prime: Vec<MatrixField>,
    pub branch: Branch,
    pub y_l1: f64,
    pub z_l2: f64,
    pub y_prime_l1: f64,
    pub z_prime_l2: f64,
    /// `(‖y′‖₁ + t‖z′‖₂) / (‖y‖₁ + t‖z‖₂)`, zero when both sides vanish.
    pub ratio: f64,
    /// `‖x − y′ − z′‖₂`.
    pub sum_residual: f64,
    /// `max(‖Py′ − y′‖₂, ‖Pz′ − z′‖₂)`.
    pub range_residual: f64,
    pub a_l2: f64,
    /// `k·σ(1 − p)` on the direct sum of `k` components.
    pub p_perp_trace: f64,
    pub pyp_l1: f64,
    /// `‖(1 − p)y′‖₁`.
    pub left_l1: f64,
    /// `‖p y′ (1 − p)‖₁`.
    pub mixed_l1: f64,
    /// `‖(1 − p)y‖₁`.
    pub y_left_l1: f64,
    /// `‖y (1 − p)‖₁`.
    pub y_right_l1: f64,
}

impl KClosedResult {
    /// Inequalities of the construction with both sides, scaled by `scale = max(1, ‖x‖₂)`.
    pub fn checks(&self, scale: f64) -> Vec<(&'static str, f64, f64)> {
        let holder = self.p_perp_trace.sqrt() * (self.z_l2 + self.z_prime_l2);
        vec![
            ("sum", self.sum_residual, KCLOSED_TOL * scale),
            ("range", self.range_residual, KCLOSED_TOL * scale),
            ("z_prime", self.z_prime_l2, self.a_l2 + self.z_l2),
            ("y_prime_split", self.y_prime_l1, self.pyp_l1 + self.left_l1 + self.mixed_l1),
            ("left", self.left_l1, self.y_left_l1 + holder),
            ("mixed", self.mixed_l1, self.y_right_l1 + holder),
        ]
    }
}

fn compress_left(p: &MatrixField, fields: &[MatrixField]) -> f64 {
    fields.iter().map(|f| p.mul(f).l1_norm()).sum()
}

fn compress_right(fields: &[MatrixField], p: &MatrixField) -> f64 {
    fields.iter().map(|f| f.mul(p).l1_norm()).sum()
}

fn residual(op: &Operator, fields: &[MatrixField]) -> Result<f64> {
    Ok(tuple_l2(&tuple_sub(&op.project(fields)?, fields)))
}

/// Splits `x = y + z ∈ range(P)` as `x = y′ + z′` with `y′ = P(b)`, `z′ = P(a + z)` where
/// `y = a + b` is the decomposition of `y` at `s = t⁻²`.
pub fn kclosed_decompose(
    op: &Operator,
    x: &[MatrixField],
    y: &[MatrixField],
    z: &[MatrixField],
    t: f64,
) -> Result<KClosedResult> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::arg("t", format!("must be positive, got {t}")));
    }
    if !op.is_projection() {
        return Err(Error::arg("operator", format!("{} is not a projection", op.tag())));
    }
    if x.len() != y.len() || x.len() != z.len() || x.is_empty() {
        return Err(Error::arg("x", "x, y and z must be tuples of equal length"));
    }
    let spec = *x[0].spec();
    let scale = tuple_l2(x).max(1.0);
    let split_gap = tuple_l2(&tuple_sub(x, &tuple_add(y, z)));
    if split_gap > KCLOSED_TOL * scale {
        return Err(Error::Precondition(format!("x ≠ y + z (residual {split_gap:.3e})")));
    }
    let range_gap = residual(op, x)?;
    if range_gap > KCLOSED_TOL * scale {
        return Err(Error::Precondition(format!("x is not in the range of {} (residual {range_gap:.3e})", op.tag())));
    }

    let k = x.len();
    let y_l1 = tuple_l1(y);
    let z_l2 = tuple_l2(z);
    let zeros = vec![MatrixField::zeros(spec); k];
    let (y_prime, z_prime, split) = if y_l1 == 0.0 {
        (zeros.clone(), x.to_vec(), None)
    } else {
        let split = bourgain_split(y, t.powi(-2))?;
        let y_prime = op.project(&split.b())?;
        let z_prime = op.project(&tuple_add(&split.a, z))?;
        (y_prime, z_prime, Some(split))
    };
    let y_prime_l1 = tuple_l1(&y_prime);
    let z_prime_l2 = tuple_l2(&z_prime);
    let sum_residual = tuple_l2(&tuple_sub(x, &tuple_add(&y_prime, &z_prime)));
    let range_residual = residual(op, &y_prime)?.max(residual(op, &z_prime)?);

    let (branch, a_l2, p_perp_trace, p) = match &split {
        Some(s) => (s.branch, tuple_l2(&s.a), s.p_perp_trace(), s.p.clone()),
        None => (Branch::Guard, 0.0, 0.0, MatrixField::identity(spec)),
    };
    let pp = MatrixField::identity(spec).sub(&p);
    let pyp_l1 = y_prime.iter().map(|f| p.mul(f).mul(&p).l1_norm()).sum();
    let mixed_l1 = y_prime.iter().map(|f| p.mul(f).mul(&pp).l1_norm()).sum();

    Ok(KClosedResult {
        branch,
        y_l1,
        z_l2,
        y_prime_l1,
        z_prime_l2,
        ratio: ratio(y_prime_l1 + t * z_prime_l2, y_l1 + t * z_l2),
        sum_residual,
        range_residual,
        a_l2,
        p_perp_trace,
        pyp_l1,
        left_l1: compress_left(&pp, &y_prime),
        mixed_l1,
        y_left_l1: compress_left(&pp, y),
        y_right_l1: compress_right(y, &pp),
        y_prime,
        z_prime,
    })
}

#[derive(Clone, Debug)]
pub struct KClosedSweep {
    pub rows: Vec<ReportRow>,
}

impl KClosedSweep {
    /// `C_emp`: the largest ratio over all instances and `t`.
    pub fn c_emp(&self) -> f64 {
        self.rows
            .iter()
            .filter_map(|r| r.quantity("ratio"))
            .fold(0.0, f64::max)
    }

    pub fn max_residual(&self) -> f64 {
        self.rows
            .iter()
            .flat_map(|r| [r.quantity("sum_residual"), r.quantity("range_residual")])
            .flatten()
            .fold(0.0, f64::max)
    }
}

/// One sweep row for `x` split by the `(L₁, L₂)` cutoff at `t`.
pub fn kclosed_row(op: &Operator, x: &[MatrixField], t: f64, mut row: ReportRow) -> Result<ReportRow> {
    let (c, k_cutoff) = SingularFunction::of_direct_sum(x).best_cutoff(t, 2.0);
    let (y, z): (Vec<MatrixField>, Vec<MatrixField>) = x.iter().map(|f| f.cutoff_split(c)).unzip();
    let res = kclosed_decompose(op, x, &y, &z, t)?;
    row.push("cutoff", c);
    row.push("k_cutoff", k_cutoff);
    row.push("y_l1", res.y_l1);
    row.push("z_l2", res.z_l2);
    row.push("y_prime_l1", res.y_prime_l1);
    row.push("z_prime_l2", res.z_prime_l2);
    row.push("ratio", res.ratio);
    row.push("sum_residual", res.sum_residual);
    row.push("range_residual", res.range_residual);
    row.push("a_l2", res.a_l2);
    row.push("p_perp_trace", res.p_perp_trace);
    row.push("branch", res.branch.code());
    for (name, lhs, rhs) in res.checks(tuple_l2(x).max(1.0)) {
        row.check(name, lhs, rhs);
    }
    Ok(row)
}

/// Runs [`kclosed_decompose`] on `n_instances` draws `x = P(raw)` over `t_grid`, each split by
/// the `(L₁, L₂)`-optimal spectral cutoff.
pub fn kclosed_sweep(
    op: &Operator,
    gen: &InstanceGen,
    spec: GridSpec,
    t_grid: &[f64],
    n_instances: usize,
) -> Result<KClosedSweep> {
    op.validate(&spec)?;
    if !op.is_projection() {
        return Err(Error::arg("operator", format!("{} is not a projection", op.tag())));
    }
    if let Some(&t) = t_grid.iter().find(|&&t| !(t > 0.0 && t.is_finite())) {
        return Err(Error::arg("t_grid", format!("t must be positive, got {t}")));
    }
    let tag = op.tag();
    let per_instance: Vec<Vec<ReportRow>> = (0..n_instances)
        .into_par_iter()
        .map(|i| {
            let instance = gen.draw(spec, i, Some(op))?;
            let x = op.project(&instance.fields)?;
            t_grid
                .iter()
                .map(|&t| kclosed_row(op, &x, t, ReportRow::new("kclosed", &tag, &spec, instance.index, instance.seed, "t", t)))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rows: Vec<ReportRow> = per_instance.into_iter().flatten().collect();
    sort_rows(&mut rows);
    Ok(KClosedSweep { rows })
}
