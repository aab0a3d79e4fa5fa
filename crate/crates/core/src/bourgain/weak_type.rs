use rayon::prelude::*;

use super::{bourgain_split, ratio, sort_rows, InstanceGen, Operator, ReportRow};
use crate::ncmeasure::{GridSpec, MatrixField, SingularFunction};
use crate::{Error, Result};

#[derive(Clone, Debug)]
pub struct WeakTypeReport {
    pub rows: Vec<ReportRow>,
    /// `sup_s s·λ_{Ty}(s)` per instance, with `‖y‖₁ = 1`.
    pub weak_constants: Vec<f64>,
}

impl WeakTypeReport {
    /// Largest weak-type constant over the family.
    pub fn c_emp(&self) -> f64 {
        self.weak_constants.iter().copied().fold(0.0, f64::max)
    }

    /// Largest value of a named row quantity.
    pub fn max_quantity(&self, name: &str) -> f64 {
        self.rows
            .iter()
            .filter_map(|r| r.quantity(name))
            .fold(0.0, f64::max)
    }
}

fn lambda(f: &MatrixField, s: f64) -> f64 {
    SingularFunction::of(f).distribution(s)
}

/// One row: the split `Ty = T(a) + (1−p)T(b) + pT(b)(1−p) + pT(b)p` at threshold `s` for an
/// `L₁`-normalized `y`.
pub(crate) fn weak_type_row(op: &Operator, y: &MatrixField, ty: &MatrixField, s: f64, mut row: ReportRow) -> Result<ReportRow> {
    let spec = *y.spec();
    let y_l1 = y.l1_norm();
    let split = bourgain_split(std::slice::from_ref(y), s)?;
    let (a, b_d, b_o, p) = (&split.a[0], &split.b_d[0], &split.b_o[0], &split.p);
    let pp = MatrixField::identity(spec).sub(p);
    let ta = op.apply(a)?;
    let tbd = op.apply(b_d)?;
    let tbo = op.apply(b_o)?;
    let tb = tbd.add(&tbo);

    let lhs = lambda(ty, 4.0 * s);
    let t_a = lambda(&ta, s);
    let t_left = lambda(&pp.mul(&tb), s);
    let t_mixed = lambda(&p.mul(&tb).mul(&pp), s);
    let pbp = p.mul(&tb).mul(p);
    let t_pbp = lambda(&pbp, s);

    let t_norm = op.l2_norm(&spec);
    let a_l2 = a.l2_norm();
    let ta_l2 = ta.l2_norm();
    let sigma = pp.trace().re;
    let pbp_l1 = pbp.l1_norm();
    let pbdp_l1 = p.mul(&tbd).mul(p).l1_norm();
    let pbop_l1 = p.mul(&tbo).mul(p).l1_norm();

    let c_a = ratio(a_l2 * a_l2, s * y_l1);
    let c_p = ratio(sigma * s, y_l1);
    let c_b = ratio(pbp_l1, y_l1);
    let c = c_a.sqrt().max(c_p).max(c_b);

    row.push("s_lambda", s * lambda(ty, s));
    row.push("lambda_4s", lhs);
    row.push("t_a", t_a);
    row.push("t_left", t_left);
    row.push("t_mixed", t_mixed);
    row.push("t_pbp", t_pbp);
    row.push("markov_a", ta_l2 * ta_l2 / (s * s));
    row.push("a_l2", a_l2);
    row.push("ta_l2", ta_l2);
    row.push("sigma_p_perp", sigma);
    row.push("pbp_l1", pbp_l1);
    row.push("pbdp_l1", pbdp_l1);
    row.push("pbop_l1", pbop_l1);
    row.push("c_a", c_a);
    row.push("c_p", c_p);
    row.push("c_b", c_b);
    row.push("c_bd", ratio(pbdp_l1, y_l1));
    row.push("c_bo", ratio(pbop_l1, y_l1));
    row.push("c", c);
    row.push("t_norm", t_norm);
    row.push("branch", split.branch.code());
    let recon = y.sub(a).sub(b_d).sub(b_o).l2_norm();
    row.push("reconstruction", recon);

    row.check("reconstruction", recon, 1e-10 * y.l2_norm().max(1.0));
    row.check("four_term", lhs, t_a + t_left + t_mixed + t_pbp);
    row.check("markov_a", t_a, ta_l2 * ta_l2 / (s * s));
    row.check("l2_bound", ta_l2, t_norm * a_l2);
    row.check("rank_left", t_left, sigma);
    row.check("rank_mixed", t_mixed, sigma);
    row.check("markov_pbp", t_pbp, pbp_l1 / s);
    row.check("termwise", lhs, (2.0 * c_p + c_b + t_norm * t_norm * c_a) * y_l1 / s);
    row.check("proof_bound", lhs, (3.0 * c + t_norm * t_norm * c * c) * y_l1 / s);
    Ok(row)
}

/// Weak type `(1,1)` of a scalar operator over `n_instances` `L₁`-normalized instances and the
/// thresholds `s_grid`.
pub fn weak_type_experiment(
    op: &Operator,
    gen: &InstanceGen,
    spec: GridSpec,
    s_grid: &[f64],
    n_instances: usize,
) -> Result<WeakTypeReport> {
    op.validate(&spec)?;
    if op.components(spec.d) != 1 {
        return Err(Error::arg("operator", format!("{} is not a scalar operator", op.tag())));
    }
    if let Some(&s) = s_grid.iter().find(|&&s| !(s > 0.0 && s.is_finite())) {
        return Err(Error::arg("s_grid", format!("thresholds must be positive, got {s}")));
    }
    let tag = op.tag();
    let per_instance: Vec<(Vec<ReportRow>, f64)> = (0..n_instances)
        .into_par_iter()
        .map(|i| {
            let instance = gen.draw(spec, i, None)?;
            let f = &instance.fields[0];
            let norm = f.l1_norm();
            let y = if norm > 0.0 { f.scale_real(1.0 / norm) } else { f.clone() };
            let ty = op.apply(&y)?;
            let weak = SingularFunction::of(&ty).weak_l1();
            let rows = s_grid
                .iter()
                .map(|&s| {
                    let mut row = ReportRow::new("weaktype", &tag, &spec, instance.index, instance.seed, "s", s);
                    row.push("weak_constant", weak);
                    weak_type_row(op, &y, &ty, s, row)
                })
                .collect::<Result<Vec<_>>>()?;
            Ok((rows, weak))
        })
        .collect::<Result<Vec<_>>>()?;
    let weak_constants = per_instance.iter().map(|(_, w)| *w).collect();
    let mut rows: Vec<ReportRow> = per_instance.into_iter().flat_map(|(r, _)| r).collect();
    sort_rows(&mut rows);
    Ok(WeakTypeReport { rows, weak_constants })
}
