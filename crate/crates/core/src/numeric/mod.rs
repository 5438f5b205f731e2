//! Numerical building blocks: adaptive Gauss-Kronrod quadrature,
//! Chebyshev-Lobatto panels and compensated summation.

pub mod cheb;
pub mod quad;
mod sum;

pub use sum::NeumaierSum;
