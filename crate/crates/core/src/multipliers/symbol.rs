use super::fourier::{fourier, frequency_vector, inverse_fourier};
use crate::linalg::C64;
use crate::ncmeasure::{GridSpec, MatrixField};
use crate::{Error, Result};

/// Scalar Fourier symbol on the frequency box of a grid of dimension `d` and level `L`.
#[derive(Clone, Debug, PartialEq)]
pub struct Symbol {
    pub name: String,
    d: usize,
    level: u32,
    values: Vec<C64>,
}

impl Symbol {
    pub fn from_fn(name: impl Into<String>, d: usize, level: u32, g: impl Fn(&[i64]) -> C64) -> Self {
        let spec = GridSpec::new(d, level, 1).expect("valid symbol box");
        let values = (0..spec.n_cells())
            .map(|pos| g(&frequency_vector(&spec, pos)[..d]))
            .collect();
        Symbol {
            name: name.into(),
            d,
            level,
            values,
        }
    }

    pub fn constant(d: usize, level: u32, c: C64) -> Self {
        Self::from_fn("constant", d, level, |_| c)
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn value(&self, n: &[i64]) -> C64 {
        let spec = GridSpec::new(self.d, self.level, 1).expect("valid symbol box");
        let side = spec.side() as i64;
        let coords: Vec<usize> = n.iter().map(|v| v.rem_euclid(side) as usize).collect();
        self.values[spec.index(&coords)]
    }

    pub fn sup(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn is_projection(&self) -> bool {
        self.values
            .iter()
            .all(|v| *v == C64::new(0.0, 0.0) || *v == C64::new(1.0, 0.0))
    }

    pub fn product(&self, other: &Symbol) -> Symbol {
        assert_eq!((self.d, self.level), (other.d, other.level), "symbol boxes differ");
        Symbol {
            name: format!("{}*{}", self.name, other.name),
            d: self.d,
            level: self.level,
            values: self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect(),
        }
    }

    /// `1 − m`.
    pub fn complement(&self) -> Symbol {
        Symbol {
            name: format!("1-{}", self.name),
            d: self.d,
            level: self.level,
            values: self.values.iter().map(|v| C64::new(1.0, 0.0) - v).collect(),
        }
    }

    fn check(&self, spec: &GridSpec) -> Result<()> {
        if spec.d != self.d || spec.level != self.level {
            return Err(Error::GridMismatch {
                left: format!("symbol box d={} L={}", self.d, self.level),
                right: spec.to_string(),
            });
        }
        Ok(())
    }
}

/// `(m f)^(n) = m(n) f̂(n)`.
pub fn apply_multiplier(sym: &Symbol, f: &MatrixField) -> Result<MatrixField> {
    sym.check(f.spec())?;
    let mut c = fourier(f);
    for (coef, v) in c.table_mut().iter_mut().zip(&sym.values) {
        *coef *= *v;
    }
    Ok(inverse_fourier(&c))
}

/// Indicator of `n ≥ 0` in dimension one; the unpaired frequency `−N/2` is negative.
pub fn riesz_symbol(level: u32) -> Symbol {
    Symbol::from_fn("riesz", 1, level, |n| C64::new(if n[0] >= 0 { 1.0 } else { 0.0 }, 0.0))
}

fn require_dim(f: &MatrixField, d: usize, what: &str) -> Result<()> {
    if f.spec().d != d {
        return Err(Error::arg("f", format!("{what} needs d = {d}, got d = {}", f.spec().d)));
    }
    Ok(())
}

pub fn riesz_projection(f: &MatrixField) -> Result<MatrixField> {
    require_dim(f, 1, "the Riesz projection")?;
    apply_multiplier(&riesz_symbol(f.spec().level), f)
}

pub fn riesz_complement(f: &MatrixField) -> Result<MatrixField> {
    require_dim(f, 1, "the Riesz projection")?;
    apply_multiplier(&riesz_symbol(f.spec().level).complement(), f)
}

/// Truncation rule of the Fejér weights `Π_k (1 − |n_k|/λ)₊`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FejerSupport {
    /// Weights restricted to `‖n‖₁ ≤ λ`.
    L1Ball,
    /// Plain tensor product (support `‖n‖_∞ < λ`), a positive kernel in every dimension.
    Product,
}

pub fn fejer_symbol(d: usize, level: u32, lambda: f64, support: FejerSupport) -> Symbol {
    Symbol::from_fn("fejer", d, level, |n| {
        if support == FejerSupport::L1Ball && n.iter().map(|v| v.abs()).sum::<i64>() as f64 > lambda {
            return C64::new(0.0, 0.0);
        }
        let w: f64 = n.iter().map(|v| (1.0 - v.abs() as f64 / lambda).max(0.0)).product();
        C64::new(w, 0.0)
    })
}

/// Fejér means `K_λ(f)` with tensor-product weights.
pub fn fejer(f: &MatrixField, lambda: f64) -> Result<MatrixField> {
    fejer_with(f, lambda, FejerSupport::Product)
}

pub fn fejer_with(f: &MatrixField, lambda: f64, support: FejerSupport) -> Result<MatrixField> {
    if !(lambda > 0.0) {
        return Err(Error::arg("lambda", format!("must be positive, got {lambda}")));
    }
    apply_multiplier(&fejer_symbol(f.spec().d, f.spec().level, lambda, support), f)
}

/// `η_j(n) = i n_j`.
pub fn derivative_symbol(d: usize, level: u32, axis: usize) -> Symbol {
    Symbol::from_fn(format!("d{axis}"), d, level, move |n| C64::new(0.0, n[axis] as f64))
}

pub fn partial_derivative(f: &MatrixField, axis: usize) -> Result<MatrixField> {
    let spec = f.spec();
    if axis >= spec.d {
        return Err(Error::arg("j", format!("axis {axis} out of range for d = {}", spec.d)));
    }
    apply_multiplier(&derivative_symbol(spec.d, spec.level, axis), f)
}

/// `[Σ_j ‖∂_j f‖_p^p]^{1/p}`, or `max_j ‖∂_j f‖_∞` for `p = ∞`.
pub fn sobolev_norm(f: &MatrixField, p: f64) -> Result<f64> {
    let norms = (0..f.spec().d)
        .map(|j| partial_derivative(f, j).map(|g| g.lp_norm(p)))
        .collect::<Result<Vec<f64>>>()?;
    Ok(if p.is_infinite() {
        norms.into_iter().fold(0.0, f64::max)
    } else {
        norms.iter().map(|v| v.powf(p)).sum::<f64>().powf(1.0 / p)
    })
}

/// Largest `‖T f‖_p / ‖f‖_p` over a family of test fields.
pub fn operator_norm_estimate(
    op: impl Fn(&MatrixField) -> Result<MatrixField>,
    fields: &[MatrixField],
    p: f64,
) -> Result<f64> {
    let mut best = 0.0_f64;
    for f in fields {
        let n = f.lp_norm(p);
        if n > 0.0 {
            best = best.max(op(f)?.lp_norm(p) / n);
        }
    }
    Ok(best)
}
