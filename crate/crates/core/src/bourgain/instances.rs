use rand::Rng;
use serde::{Deserialize, Serialize};

use super::Operator;
use crate::multipliers::{gradient, inverse_fourier, FourierCoefficients};
use crate::ncmeasure::{GridSpec, MatrixField};
use crate::sampling::{gaussian_matrix, positive_field, rng};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InstanceKind {
    /// `Σ_{|n|_∞ ≤ K} χ_n ⊗ A_n / (1 + |n|)` with complex Gaussian `A_n`.
    RandomTrigPoly,
    /// Cellwise `g*g·e^{N(0,1)}`; depends on the level.
    PositiveField,
    /// Random trig polynomial pushed into the range of the operator.
    Analytic,
    /// `∇g` of a random scalar trig polynomial.
    GradientField,
}

/// Reproducible instance family. Instance `i` is drawn from the seed
/// `seed ^ (i · 0x9E3779B97F4A7C15)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceGen {
    pub seed: u64,
    pub kind: InstanceKind,
    pub freq_cutoff: u32,
    /// Instances are scaled by `10^{decades·(u − ½)}`, `u` uniform.
    pub amplitude_decades: f64,
}

#[derive(Clone, Debug)]
pub struct Instance {
    pub index: usize,
    pub seed: u64,
    pub fields: Vec<MatrixField>,
}

impl InstanceGen {
    pub fn new(seed: u64, kind: InstanceKind, freq_cutoff: u32) -> Self {
        InstanceGen {
            seed,
            kind,
            freq_cutoff,
            amplitude_decades: 4.0,
        }
    }

    pub fn with_amplitude_decades(mut self, decades: f64) -> Self {
        self.amplitude_decades = decades;
        self
    }

    pub fn instance_seed(&self, index: usize) -> u64 {
        self.seed ^ (index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
    }

    /// Instance `index` on `spec`, with `op.components(d)` components (one without an operator,
    /// `d` for gradient fields). Trig-polynomial kinds sample the same function at every level
    /// that resolves the cutoff.
    pub fn draw(&self, spec: GridSpec, index: usize, op: Option<&Operator>) -> Result<Instance> {
        let seed = self.instance_seed(index);
        let mut r = rng(seed);
        let k = op.map_or(1, |o| o.components(spec.d));
        let amplitude = 10f64.powf(self.amplitude_decades * (r.random::<f64>() - 0.5));
        let fields = match self.kind {
            InstanceKind::RandomTrigPoly => (0..k).map(|_| self.trig_poly(spec, &mut r)).collect::<Result<Vec<_>>>()?,
            InstanceKind::PositiveField => (0..k).map(|_| positive_field(spec, 1.0, &mut r)).collect(),
            InstanceKind::Analytic => {
                let op = op.ok_or_else(|| Error::arg("kind", "analytic instances need an operator"))?;
                if !op.is_projection() {
                    return Err(Error::arg("kind", format!("{} is not a projection", op.tag())));
                }
                let raw = (0..k).map(|_| self.trig_poly(spec, &mut r)).collect::<Result<Vec<_>>>()?;
                op.project(&raw)?
            }
            InstanceKind::GradientField => gradient(&self.trig_poly(spec, &mut r)?)?,
        };
        Ok(Instance {
            index,
            seed,
            fields: fields.iter().map(|f| f.scale_real(amplitude)).collect(),
        })
    }

    fn trig_poly<R: Rng>(&self, spec: GridSpec, r: &mut R) -> Result<MatrixField> {
        let k = self.freq_cutoff as i64;
        if 2 * k >= spec.side() as i64 && k > 0 {
            return Err(Error::arg(
                "freq_cutoff",
                format!("{k} is not resolved at level {} (needs 2K < {})", spec.level, spec.side()),
            ));
        }
        let d = spec.d;
        let mut coefs = FourierCoefficients::zeros(spec);
        let width = (2 * k + 1) as usize;
        for flat in 0..width.pow(d as u32) {
            let mut n = [0i64; 3];
            let mut rest = flat;
            for axis in (0..d).rev() {
                n[axis] = (rest % width) as i64 - k;
                rest /= width;
            }
            let norm = n[..d].iter().map(|v| (v * v) as f64).sum::<f64>().sqrt();
            let a = gaussian_matrix(spec.m, r) / crate::linalg::C64::new(1.0 + norm, 0.0);
            let pos = coefs.position(&n[..d]).expect("frequency inside the box");
            coefs.table_mut()[pos] = a;
        }
        Ok(inverse_fourier(&coefs))
    }
}
