//! Fourier analysis of step fields: cell-center DFT, scalar and matrix symbols,
//! Riesz and Leray projections, Fejér means, derivatives and Sobolev seminorms.
//!
//! Frequencies live in the box `{−N/2, …, N/2 − 1}^d` with `N = 2^L`. The derivative
//! symbol is `i n_j`, i.e. derivatives are taken in angle coordinates `x = 2π u`.

mod fourier;
mod leray;
mod symbol;

pub use fourier::{fft_nd, fourier, frequency, frequency_vector, inverse_fourier, FourierCoefficients};
pub use leray::{
    antiderivative, apply_matrix_symbol, gradient, leray_complement, leray_projection, leray_symbol,
    membership_check, Membership,
};
pub use symbol::{
    apply_multiplier, derivative_symbol, fejer, fejer_symbol, fejer_with, operator_norm_estimate,
    partial_derivative, riesz_complement, riesz_projection, riesz_symbol, sobolev_norm, FejerSupport, Symbol,
};
