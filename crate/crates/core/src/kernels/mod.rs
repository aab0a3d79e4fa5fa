//! Singular kernels on the torus: the Riesz (Cauchy) kernel, periodization of
//! `(−d)`-homogeneous Euclidean kernels, quadrature of kernel operators and
//! numerical checks of the size, Lipschitz and Hörmander conditions.
//!
//! Points are stored in `[0,1)^d`. Euclidean kernels live on angles `x = 2π u`; the
//! Jacobian `(2π)^d` is folded into [`PeriodizedKernel`] so that every [`Kernel`]
//! integrates against the normalized measure `du`.

mod conditions;
mod periodize;
mod quadrature;

pub use conditions::{
    hormander_l1_check, hormander_l2_sum, lipschitz_condition_check, lipschitz_implied_l2_bound,
    size_condition_check, ConditionRow, HormanderOptions, HormanderReport,
};
pub use periodize::{
    leray_kernel, periodize, riesz_periodized, shell, sphere_integral, sphere_measure, CauchyKernel,
    EuclideanKernel, LerayEuclidean, PeriodizedKernel, SPHERE_TOL,
};
pub use quadrature::{apply_kernel_operator, gauss_legendre};

use std::f64::consts::PI;
use std::sync::Arc;

use crate::dyadic::{torus_distance, wrap};
use crate::linalg::C64;

/// Complex kernel `k(x, y)` defined off the diagonal of the torus.
pub trait Kernel: Send + Sync {
    fn dim(&self) -> usize;

    fn name(&self) -> String;

    fn eval(&self, x: &[f64], y: &[f64]) -> C64;

    /// Whether `k(x, y)` depends on `x − y` only.
    fn translation_invariant(&self) -> bool {
        false
    }

    /// `k(δ, 0)`.
    fn eval_difference(&self, delta: &[f64]) -> C64 {
        let zero = vec![0.0; delta.len()];
        self.eval(delta, &zero)
    }
}

impl<K: Kernel + ?Sized> Kernel for Arc<K> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn name(&self) -> String {
        (**self).name()
    }
    fn eval(&self, x: &[f64], y: &[f64]) -> C64 {
        (**self).eval(x, y)
    }
    fn translation_invariant(&self) -> bool {
        (**self).translation_invariant()
    }
    fn eval_difference(&self, delta: &[f64]) -> C64 {
        (**self).eval_difference(delta)
    }
}

pub(crate) fn wrapped_difference(x: &[f64], y: &[f64]) -> Vec<f64> {
    x.iter().zip(y).map(|(a, b)| wrap(a - b)).collect()
}

#[derive(Clone, Debug)]
pub struct ConstantKernel {
    pub d: usize,
    pub value: C64,
}

impl Kernel for ConstantKernel {
    fn dim(&self) -> usize {
        self.d
    }
    fn name(&self) -> String {
        format!("constant({})", self.value)
    }
    fn eval(&self, _x: &[f64], _y: &[f64]) -> C64 {
        self.value
    }
    fn translation_invariant(&self) -> bool {
        true
    }
    fn eval_difference(&self, _delta: &[f64]) -> C64 {
        self.value
    }
}

/// `d(x, y)^{−exponent}`. With `exponent > d` the size condition fails.
#[derive(Clone, Debug)]
pub struct PowerKernel {
    pub d: usize,
    pub exponent: f64,
}

impl Kernel for PowerKernel {
    fn dim(&self) -> usize {
        self.d
    }
    fn name(&self) -> String {
        format!("power({})", self.exponent)
    }
    fn eval(&self, x: &[f64], y: &[f64]) -> C64 {
        C64::new(torus_distance(x, y).powf(-self.exponent), 0.0)
    }
    fn translation_invariant(&self) -> bool {
        true
    }
}

type KernelFn = dyn Fn(&[f64], &[f64]) -> C64 + Send + Sync;

/// Kernel given by a closure.
pub struct FnKernel {
    d: usize,
    name: String,
    f: Box<KernelFn>,
}

impl FnKernel {
    pub fn new(d: usize, name: impl Into<String>, f: impl Fn(&[f64], &[f64]) -> C64 + Send + Sync + 'static) -> Self {
        FnKernel {
            d,
            name: name.into(),
            f: Box::new(f),
        }
    }
}

impl Kernel for FnKernel {
    fn dim(&self) -> usize {
        self.d
    }
    fn name(&self) -> String {
        self.name.clone()
    }
    fn eval(&self, x: &[f64], y: &[f64]) -> C64 {
        (self.f)(x, y)
    }
}

/// Kernel of the Riesz projection on the circle,
/// `k(x, y) = 1/2 + (i/2) cot(π(x − y))`, i.e. `w/(w − z)` with `z = e^{2πix}`, `w = e^{2πiy}`.
#[derive(Clone, Copy, Debug, Default)]
pub struct RieszKernel;

impl RieszKernel {
    pub fn complex_form(z: C64, w: C64) -> C64 {
        w / (w - z)
    }
}

pub fn riesz_kernel() -> RieszKernel {
    RieszKernel
}

impl Kernel for RieszKernel {
    fn dim(&self) -> usize {
        1
    }
    fn name(&self) -> String {
        "riesz".into()
    }
    fn eval(&self, x: &[f64], y: &[f64]) -> C64 {
        self.eval_difference(&[wrap(x[0] - y[0])])
    }
    fn translation_invariant(&self) -> bool {
        true
    }
    fn eval_difference(&self, delta: &[f64]) -> C64 {
        C64::new(0.5, 0.5 / (PI * delta[0]).tan())
    }
}
