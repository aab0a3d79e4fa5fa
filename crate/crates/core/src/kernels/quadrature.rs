use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use rayon::prelude::*;
use rustfft::FftDirection;

use super::Kernel;
use crate::dyadic::torus_distance;
use crate::linalg::{Mat, C64};
use crate::multipliers::fft_nd;
use crate::ncmeasure::MatrixField;
use crate::{Error, Result};

/// Gauss–Legendre nodes and weights for `∫_a^b`.
pub fn gauss_legendre(n: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let rule = GaussLegendre::new(NonZeroUsize::new(n.max(1)).unwrap());
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    rule.as_node_weight_pairs()
        .iter()
        .map(|&(x, w)| (mid + half * x, half * w))
        .collect()
}

/// Midpoint quadrature of `(Sf)(x) = ∫ k(x, y) f(y) dy` over the cells whose center lies
/// farther than `exclusion_radius` from the target center.
pub fn apply_kernel_operator(k: &dyn Kernel, f: &MatrixField, exclusion_radius: f64) -> Result<MatrixField> {
    let spec = *f.spec();
    if k.dim() != spec.d {
        return Err(Error::arg(
            "k",
            format!("kernel dimension {} does not match grid dimension {}", k.dim(), spec.d),
        ));
    }
    let cell_diameter = (spec.d as f64).sqrt() * spec.cell_width();
    if !(exclusion_radius >= cell_diameter * (1.0 - 1e-12)) {
        return Err(Error::arg(
            "exclusion_radius",
            format!("{exclusion_radius} is below the cell diameter {cell_diameter}"),
        ));
    }
    if k.translation_invariant() {
        Ok(convolve(k, f, exclusion_radius))
    } else {
        Ok(direct(k, f, exclusion_radius))
    }
}

fn direct(k: &dyn Kernel, f: &MatrixField, r: f64) -> MatrixField {
    let spec = *f.spec();
    let d = spec.d;
    let vol = spec.cell_volume();
    let centers = spec.centers();
    let cells: Vec<Mat> = (0..spec.n_cells())
        .into_par_iter()
        .map(|t| {
            let x = &centers[t][..d];
            let mut acc = Mat::zeros(spec.m, spec.m);
            for (s, c) in centers.iter().enumerate() {
                let y = &c[..d];
                if torus_distance(x, y) > r {
                    acc += f.cell(s) * (k.eval(x, y) * vol);
                }
            }
            acc
        })
        .collect();
    MatrixField::new(spec, cells).expect("finite quadrature")
}

/// Circular convolution with the masked kernel table `w(j) = vol·k(j/N)` over lattice differences.
fn convolve(k: &dyn Kernel, f: &MatrixField, r: f64) -> MatrixField {
    let spec = *f.spec();
    let d = spec.d;
    let n = spec.n_cells();
    let side = spec.side() as f64;
    let vol = spec.cell_volume();
    let zero = [0.0; 3];
    let mut table: Vec<C64> = (0..n)
        .into_par_iter()
        .map(|pos| {
            let c = spec.coords(pos);
            let delta: Vec<f64> = (0..d).map(|a| c[a] as f64 / side).collect();
            if torus_distance(&delta, &zero[..d]) > r {
                k.eval_difference(&delta) * vol
            } else {
                C64::new(0.0, 0.0)
            }
        })
        .collect();
    fft_nd(&mut table, d, spec.side(), FftDirection::Forward);
    let mut out = vec![Mat::zeros(spec.m, spec.m); n];
    for a in 0..spec.m {
        for b in 0..spec.m {
            let mut data: Vec<C64> = f.cells().iter().map(|c| c[(a, b)]).collect();
            fft_nd(&mut data, d, spec.side(), FftDirection::Forward);
            for (v, w) in data.iter_mut().zip(&table) {
                *v *= w / n as f64;
            }
            fft_nd(&mut data, d, spec.side(), FftDirection::Inverse);
            for (cell, v) in out.iter_mut().zip(&data) {
                cell[(a, b)] = *v;
            }
        }
    }
    MatrixField::new(spec, out).expect("finite quadrature")
}
