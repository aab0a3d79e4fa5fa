use rayon::prelude::*;

use super::cuculescu::CuculescuState;
use crate::dyadic;
use crate::linalg::{self, Mat, C64};
use crate::ncmeasure::{GridSpec, MatrixField};

/// Ball dilation factor in `B_{3 d_Q}(y_Q)`.
pub const DILATION: f64 = 3.0;
/// Eigenvalue threshold for the range projection of `Σ 1_B ⊗ e_Q`.
pub const RANGE_TOL: f64 = 1e-9;

/// Cells whose center lies at torus distance `< r` from `y`.
pub fn cells_in_ball(spec: &GridSpec, y: &[f64], r: f64) -> Vec<usize> {
    let d = spec.d;
    if r >= dyadic::diameter(d) {
        return (0..spec.n_cells()).collect();
    }
    let side = spec.side();
    let h = spec.cell_width();
    // candidate indices per axis, wrapped and deduplicated
    let axes: Vec<Vec<usize>> = (0..d)
        .map(|k| {
            let lo = ((y[k] - r) / h - 0.5).ceil() as i64;
            let hi = ((y[k] + r) / h - 0.5).floor() as i64;
            if hi - lo + 1 >= side as i64 {
                (0..side).collect()
            } else {
                let mut v: Vec<usize> = (lo..=hi).map(|i| i.rem_euclid(side as i64) as usize).collect();
                v.sort_unstable();
                v.dedup();
                v
            }
        })
        .collect();
    let mut out = Vec::new();
    let mut idx = [0usize; 3];
    let total: usize = axes.iter().map(Vec::len).product();
    for lin in 0..total {
        let mut rest = lin;
        for k in (0..d).rev() {
            idx[k] = axes[k][rest % axes[k].len()];
            rest /= axes[k].len();
        }
        let cell = spec.index(&idx[..d]);
        let c = spec.center(cell);
        if dyadic::torus_distance(&c[..d], y) < r {
            out.push(cell);
        }
    }
    out.sort_unstable();
    out
}

fn cube_tree(spec: &GridSpec) -> Vec<Vec<dyadic::Cube>> {
    (0..=spec.level).map(|n| dyadic::cubes(spec.d, n)).collect()
}

/// Calderón–Zygmund projection `p = (⋁_{n,Q} 1_{B_{3d_Q}(y_Q)} ⊗ e_Q)^⊥`.
///
/// Balls are discretized as the cells whose center lies inside; the join is the range
/// projection of the sum `Σ 1_B ⊗ e_Q`.
pub fn cz_projection(state: &CuculescuState) -> MatrixField {
    let spec = *state.spec();
    let m = spec.m;
    let mut acc = vec![Mat::zeros(m, m); spec.n_cells()];
    let tree = cube_tree(&spec);
    for (n, k) in state.active_cubes() {
        let cube = &tree[n as usize][k];
        let e = &state.e_cubes(n)[k];
        for cell in cells_in_ball(&spec, cube.center(), DILATION * cube.diameter) {
            acc[cell] += e;
        }
    }
    let id = linalg::identity(m);
    let cells = acc
        .par_iter()
        .map(|s| {
            if s.iter().all(|v| *v == C64::new(0.0, 0.0)) {
                id.clone()
            } else {
                &id - linalg::range_projection(s, RANGE_TOL)
            }
        })
        .collect();
    MatrixField::new(spec, cells).expect("finite projections")
}

/// Largest `‖p(x) e_Q‖` over all active cubes and cells of their dilated balls.
pub fn support_defect(state: &CuculescuState, p: &MatrixField) -> f64 {
    let spec = *state.spec();
    let mut worst = 0.0_f64;
    let tree = cube_tree(&spec);
    for (n, k) in state.active_cubes() {
        let cube = &tree[n as usize][k];
        let e = &state.e_cubes(n)[k];
        for cell in cells_in_ball(&spec, cube.center(), DILATION * cube.diameter) {
            worst = worst.max(linalg::hs_norm(&(p.cell(cell) * e)));
        }
    }
    worst
}

/// Pointwise meet of projection fields.
pub fn meet_fields(fields: &[&MatrixField]) -> MatrixField {
    let spec = *fields[0].spec();
    let cells = (0..spec.n_cells())
        .into_par_iter()
        .map(|k| {
            let mats: Vec<&Mat> = fields.iter().map(|f| f.cell(k)).collect();
            linalg::meet(&mats)
        })
        .collect();
    MatrixField::new(spec, cells).expect("finite projections")
}
