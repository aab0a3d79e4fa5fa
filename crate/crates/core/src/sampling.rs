//! Deterministic sampling: seeded Gaussian matrices/fields and low-discrepancy point sets.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{Mat, C64};
use crate::ncmeasure::{GridSpec, MatrixField};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Matrix with independent standard complex Gaussian entries (`E|z|² = 1`).
pub fn gaussian_matrix<R: Rng>(m: usize, rng: &mut R) -> Mat {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    Mat::from_fn(m, m, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re * s, im * s)
    })
}

pub fn hermitian_gaussian<R: Rng>(m: usize, rng: &mut R) -> Mat {
    let g = gaussian_matrix(m, rng);
    (&g + g.adjoint()) * C64::new(0.5, 0.0)
}

/// Field with i.i.d. Gaussian cells.
pub fn gaussian_field<R: Rng>(spec: GridSpec, rng: &mut R) -> MatrixField {
    let cells = (0..spec.n_cells()).map(|_| gaussian_matrix(spec.m, rng)).collect();
    MatrixField::new(spec, cells).expect("finite gaussian cells")
}

/// Positive field `g* g` with Gaussian `g`, each cell scaled by `exp(N(0, spread²))`
/// so that values span several orders of magnitude.
pub fn positive_field<R: Rng>(spec: GridSpec, spread: f64, rng: &mut R) -> MatrixField {
    let cells = (0..spec.n_cells())
        .map(|_| {
            let g = gaussian_matrix(spec.m, rng);
            let z: f64 = rng.sample(StandardNormal);
            g.adjoint() * g * C64::new((spread * z).exp(), 0.0)
        })
        .collect();
    MatrixField::new(spec, cells).expect("finite cells")
}

/// Additive-recurrence (Kronecker) low-discrepancy sequence in `[0,1)^dim`
/// using the generalized golden ratio of order `dim`.
#[derive(Clone, Debug)]
pub struct Kronecker {
    alpha: Vec<f64>,
    index: u64,
}

impl Kronecker {
    pub fn new(dim: usize) -> Self {
        // φ_dim is the positive root of x^{dim+1} = x + 1
        let mut phi = 2.0_f64;
        for _ in 0..64 {
            phi = (1.0 + phi).powf(1.0 / (dim as f64 + 1.0));
        }
        let alpha = (1..=dim).map(|k| (1.0 / phi.powi(k as i32)).fract()).collect();
        Kronecker { alpha, index: 0 }
    }
}

impl Iterator for Kronecker {
    type Item = Vec<f64>;

    fn next(&mut self) -> Option<Vec<f64>> {
        self.index += 1;
        let n = self.index as f64;
        Some(self.alpha.iter().map(|a| (0.5 + n * a).fract()).collect())
    }
}

/// Deterministic points spread over the unit sphere of `R^d` (`d ≤ 3`) from a uniform sample.
pub fn direction(d: usize, u: &[f64]) -> Vec<f64> {
    match d {
        1 => vec![if u[0] < 0.5 { -1.0 } else { 1.0 }],
        2 => {
            let a = std::f64::consts::TAU * u[0];
            vec![a.cos(), a.sin()]
        }
        _ => {
            let z = 2.0 * u[0] - 1.0;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let a = std::f64::consts::TAU * u[1];
            vec![r * a.cos(), r * a.sin(), z]
        }
    }
}
