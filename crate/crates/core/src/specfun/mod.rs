pub mod kernel;
pub mod mittag_leffler;
pub mod quadrature;

pub use kernel::{kernel_fourier_full, kernel_fourier_half, kernel_laplace};
pub use mittag_leffler::mittag_leffler;
pub use quadrature::{
    fourier_integral, oscillatory_quadrature, Estimate, Oscillator, Shape, Tolerance,
};
