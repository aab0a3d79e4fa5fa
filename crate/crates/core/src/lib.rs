//! Desk-scale laboratory for matrix-valued harmonic analysis on the dyadic torus.
//!
//! Elements of `L_p(L_∞(T^d) ⊗ M_m)` are modelled as [`MatrixField`]s: step
//! functions constant on the cells of a dyadic grid over `[0,1)^d`, one complex
//! `m × m` matrix per cell. On top of that the crate provides
//!
//! * [`ncmeasure`]: trace, singular value function, `L_p` norms and K-functionals,
//! * [`dyadic`]: torus metric, ball volumes, dyadic cubes and conditional expectations,
//! * [`czd`]: Cuculescu projections and the semicommutative Calderón–Zygmund decomposition,
//! * [`kernels`]: singular kernels, periodization and kernel condition checkers,
//! * [`multipliers`]: DFT, Fourier multipliers, Riesz/Leray projections, Sobolev norms,
//! * [`bourgain`]: instance generators and the weak-type, K-closedness and Sobolev experiments.

pub mod bourgain;
pub mod czd;
pub mod dyadic;
mod error;
pub mod kernels;
pub mod linalg;
pub mod multipliers;
pub mod ncmeasure;
pub mod sampling;

pub use error::{Error, Result};
pub use linalg::{Mat, C64};
pub use ncmeasure::{GridSpec, KProfile, MatrixField, SingularFunction};
