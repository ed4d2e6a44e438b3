//! Subdiffusion driven by fractional Gaussian noise.
//!
//! A particle obeys the generalized Langevin equation with the power-law
//! memory kernel `K(t) = 2h(2h-1)|t|^(2h-2)` and fractional Gaussian noise
//! of Hurst exponent `1/2 < h < 1`. The crate provides
//!
//! * [`fgn`]: noise generation and the kernel in the time domain,
//! * [`specfun`]: Mittag-Leffler function, kernel transforms, quadrature,
//! * [`analytic`]: stationary covariances, spectra and mean squared displacement,
//! * [`sim`]: exact Gaussian path synthesis for the free, harmonic and
//!   overdamped regimes,
//! * [`heatbath`]: a finite oscillator bath whose Hamiltonian dynamics
//!   produce the same equation,
//! * [`lifetime`]: the exponential distance-to-rate observable and its
//!   multi-time correlations,
//! * [`inference`]: estimators, model fitting, kernel recovery and
//!   potential reconstruction.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod error;
pub mod fgn;
pub mod heatbath;
pub mod inference;
pub mod io;
pub mod lifetime;
pub mod params;
pub mod rng;
pub mod sim;
pub mod specfun;
pub mod synthesis;
pub mod trace;

pub use error::{Error, Result};
pub use params::{Hurst, PhysicalParams};
pub use trace::{CovarianceCurve, CurveKind, LaplaceCurve, SpectralCurve, Trace};
