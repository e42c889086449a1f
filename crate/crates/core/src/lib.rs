//! Meromorphic interpolation of random Fourier series at the integers.
//!
//! The crate samples a Gaussian coefficient sequence, solves a nonlinear
//! fixed-point system whose solution is a sum of Cauchy kernels `F` with
//! `F(m) = ζ_m ω(|m|)` on an integer window, analyses the pole set of `F`
//! (counting function, density, canonical product, exponential type) and
//! finally reconstructs the random Fourier series as an exponential sum over
//! the poles.
//!
//! Pipeline stages live in their own modules:
//!
//! * [`stochastic`]: weights, Gaussian draws and the normalized target sequence.
//! * [`local_map`]: the three-point rational maps used on blocks, with Newton
//!   inversion and numerical chart certification.
//! * [`solver`]: block partition, the operators `W` and `V`, parameter
//!   selection, the fixed-point iteration and assembly of `F`.
//! * [`analysis`]: pole-set geometry and density statistics.
//! * [`cartwright`]: canonical products, `U = V·F`, exponential type and the
//!   cardinal series.
//! * [`reconstruction`]: frequency sets, Avdonin blocks, Gram systems and
//!   least-squares reconstruction.
//! * [`pipeline`]: configuration, orchestration and report emission.

pub mod analysis;
pub mod cartwright;
pub mod error;
pub mod local_map;
pub mod numeric;
pub mod pipeline;
pub mod reconstruction;
pub mod solver;
pub mod stochastic;

pub use error::{Error, Result};
pub use num_complex::Complex64;
