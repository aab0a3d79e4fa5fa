use serde::{Deserialize, Serialize};

use super::field::MatrixField;
use crate::linalg;

/// Decreasing rearrangement `μ_f` of a step field as a weighted list of singular values.
///
/// `pairs` holds the distinct nonzero singular values in descending order together with
/// the total cell volume carrying each of them; `μ_f` vanishes on `(Σ weights, domain)`.
/// `domain` is the total trace of the identity, i.e. the matrix size `m`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SingularFunction {
    pairs: Vec<(f64, f64)>,
    domain: f64,
}

impl SingularFunction {
    /// Build from unsorted `(value, weight)` samples.
    pub fn from_samples(mut samples: Vec<(f64, f64)>, domain: f64) -> Self {
        samples.retain(|&(v, w)| v > 0.0 && w > 0.0);
        samples.sort_by(|a, b| b.0.total_cmp(&a.0));
        let mut pairs: Vec<(f64, f64)> = Vec::with_capacity(samples.len());
        for (v, w) in samples {
            match pairs.last_mut() {
                Some(last) if last.0 == v => last.1 += w,
                _ => pairs.push((v, w)),
            }
        }
        SingularFunction { pairs, domain }
    }

    pub fn of(f: &MatrixField) -> Self {
        let vol = f.spec().cell_volume();
        let samples = f
            .cells()
            .iter()
            .flat_map(|c| linalg::singular_values(c).into_iter().map(move |s| (s, vol)))
            .collect();
        Self::from_samples(samples, f.spec().m as f64)
    }

    /// Singular function of a direct sum `f₁ ⊕ ⋯ ⊕ f_k` (block-diagonal element).
    pub fn of_direct_sum(fields: &[MatrixField]) -> Self {
        let mut samples = Vec::new();
        let mut domain = 0.0;
        for f in fields {
            let vol = f.spec().cell_volume();
            domain += f.spec().m as f64;
            for c in f.cells() {
                samples.extend(linalg::singular_values(c).into_iter().map(|s| (s, vol)));
            }
        }
        Self::from_samples(samples, domain)
    }

    pub fn pairs(&self) -> &[(f64, f64)] {
        &self.pairs
    }

    pub fn domain(&self) -> f64 {
        self.domain
    }

    /// Measure of the support of `μ`.
    pub fn support(&self) -> f64 {
        self.pairs.iter().map(|p| p.1).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.pairs.is_empty()
    }

    /// `μ(t)`, right-continuous.
    pub fn value_at(&self, t: f64) -> f64 {
        let mut acc = 0.0;
        for &(v, w) in &self.pairs {
            acc += w;
            if t < acc {
                return v;
            }
        }
        0.0
    }

    /// `λ(s)`: total weight of singular values strictly above `s`.
    pub fn distribution(&self, s: f64) -> f64 {
        self.pairs
            .iter()
            .take_while(|p| p.0 > s)
            .map(|p| p.1)
            .sum()
    }

    pub fn lp_norm(&self, p: f64) -> f64 {
        if p.is_infinite() {
            return self.pairs.first().map_or(0.0, |p| p.0);
        }
        self.pairs
            .iter()
            .map(|&(v, w)| w * v.powf(p))
            .sum::<f64>()
            .powf(1.0 / p)
    }

    /// `∫₀ᵗ μ(s) ds`, which is `K_t(f, L₁, L_∞)`.
    pub fn integral_to(&self, t: f64) -> f64 {
        let mut acc = 0.0;
        let mut used = 0.0;
        for &(v, w) in &self.pairs {
            if used + w >= t {
                return acc + v * (t - used);
            }
            acc += v * w;
            used += w;
        }
        acc
    }

    /// Weak `L_{1,∞}` quasi-norm `sup_s s·λ(s)`, attained as `s ↑ v_k`.
    pub fn weak_l1(&self) -> f64 {
        let mut cum = 0.0;
        let mut best = 0.0_f64;
        for &(v, w) in &self.pairs {
            cum += w;
            best = best.max(v * cum);
        }
        best
    }

    /// Cost of the cutoff splitting at level `c` for the couple `(L₁, L_p1)`:
    /// `‖(|f| − c)₊‖₁ + t ‖min(|f|, c)‖_{p1}`.
    pub fn cutoff_cost(&self, c: f64, t: f64, p1: f64) -> f64 {
        let head: f64 = self.pairs.iter().map(|&(v, w)| w * (v - c).max(0.0)).sum();
        let tail = if p1.is_infinite() {
            self.pairs.first().map_or(0.0, |p| p.0.min(c))
        } else {
            self.pairs
                .iter()
                .map(|&(v, w)| w * v.min(c).powf(p1))
                .sum::<f64>()
                .powf(1.0 / p1)
        };
        head + t * tail
    }

    /// Cutoff minimizing [`Self::cutoff_cost`] over the scan grid: every distinct singular value,
    /// zero, the closed-form interior stationary points (for `p1 = 2`) and 64 log-spaced points
    /// inside every segment.
    pub fn best_cutoff(&self, t: f64, p1: f64) -> (f64, f64) {
        let mut candidates = vec![0.0];
        let mut values: Vec<f64> = self.pairs.iter().map(|p| p.0).collect();
        values.reverse();
        let mut lo = 0.0;
        let mut weight_above: f64 = self.support();
        let mut b0 = 0.0; // Σ w v² over values below the current segment
        for (k, &hi) in values.iter().enumerate() {
            candidates.push(hi);
            let start = if lo > 0.0 { lo } else { hi * 1e-6 };
            for j in 1..=64 {
                let frac = j as f64 / 65.0;
                candidates.push(start * (hi / start).powf(frac));
            }
            if p1 == 2.0 && t * t > weight_above {
                let c = (b0 / (t * t - weight_above)).sqrt();
                if c > lo && c < hi {
                    candidates.push(c);
                }
            }
            // weight of pairs with value >= hi drops by the pair at hi
            let pair_weight = self.pairs[self.pairs.len() - 1 - k].1;
            weight_above -= pair_weight;
            b0 += pair_weight * hi * hi;
            lo = hi;
        }
        // segment costs from suffix/prefix sums: on (values[k−1], values[k]] the pairs at or
        // above values[k] are cut at c and the rest are kept whole
        let n = values.len();
        let weights: Vec<f64> = self.pairs.iter().rev().map(|p| p.1).collect();
        let mut w_above = vec![0.0; n + 1];
        let mut s_above = vec![0.0; n + 1];
        for k in (0..n).rev() {
            w_above[k] = w_above[k + 1] + weights[k];
            s_above[k] = s_above[k + 1] + weights[k] * values[k];
        }
        let mut p_below = vec![0.0; n + 1];
        for k in 0..n {
            p_below[k + 1] = p_below[k] + weights[k] * values[k].powf(p1);
        }
        let top = values.last().copied().unwrap_or(0.0);
        let cost = |c: f64| -> f64 {
            let k = values.partition_point(|&v| v < c);
            let head = s_above[k] - c * w_above[k];
            let tail = if p1.is_infinite() {
                top.min(c)
            } else {
                (p_below[k] + c.powf(p1) * w_above[k]).max(0.0).powf(1.0 / p1)
            };
            head.max(0.0) + t * tail
        };
        let mut best = (0.0, f64::INFINITY);
        for c in candidates {
            let cost = cost(c);
            if cost < best.1 {
                best = (c, cost);
            }
        }
        best
    }
}

/// Interpolation couples `(L₁, L_p1)` handled by the cutoff estimate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Couple {
    L1Linf,
    L1L2,
}

impl Couple {
    pub fn p1(&self) -> f64 {
        match self {
            Couple::L1Linf => f64::INFINITY,
            Couple::L1L2 => 2.0,
        }
    }
}

pub fn singular_function(f: &MatrixField) -> SingularFunction {
    SingularFunction::of(f)
}

pub fn distribution_function(f: &MatrixField, s: f64) -> f64 {
    SingularFunction::of(f).distribution(s)
}

/// Exact `K_t(f, L₁, L_∞) = ∫₀ᵗ μ_f`.
pub fn k_functional_l1_linf(f: &MatrixField, t: f64) -> f64 {
    SingularFunction::of(f).integral_to(t)
}

/// Upper estimate of `K_t(f, L₁, L_p1)` restricted to spectral-cutoff splittings.
pub fn k_functional_cutoff(f: &MatrixField, t: f64, couple: Couple) -> f64 {
    let mu = SingularFunction::of(f);
    if mu.is_zero() {
        return 0.0;
    }
    mu.best_cutoff(t, couple.p1()).1
}

/// Samples of a K-functional over an increasing `t` grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KProfile {
    pub t_grid: Vec<f64>,
    pub values: Vec<f64>,
    pub couple_tag: String,
}

impl KProfile {
    pub fn l1_linf(f: &MatrixField, t_grid: &[f64]) -> Self {
        let mu = SingularFunction::of(f);
        KProfile {
            t_grid: t_grid.to_vec(),
            values: t_grid.iter().map(|&t| mu.integral_to(t)).collect(),
            couple_tag: "L1,Linf".into(),
        }
    }

    /// Largest violation of monotonicity, concavity and `K_t/t` nonincreasing.
    /// Zero (up to rounding) for an exact K-functional.
    pub fn shape_violation(&self) -> f64 {
        let t = &self.t_grid;
        let k = &self.values;
        let mut worst = 0.0_f64;
        for i in 1..k.len() {
            worst = worst.max(k[i - 1] - k[i]);
            worst = worst.max(k[i] / t[i] - k[i - 1] / t[i - 1]);
        }
        for i in 1..k.len().saturating_sub(1) {
            // slope decrease: (k_i − k_{i−1})/(t_i − t_{i−1}) ≥ (k_{i+1} − k_i)/(t_{i+1} − t_i)
            let left = (k[i] - k[i - 1]) / (t[i] - t[i - 1]);
            let right = (k[i + 1] - k[i]) / (t[i + 1] - t[i]);
            worst = worst.max(right - left);
        }
        worst
    }
}
