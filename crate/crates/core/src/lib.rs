//! Genetic search over spectrally phase-shaped pulses and principal control
//! analysis of the resulting trial ensemble.
//!
//! The crate is `no_std` and only needs `alloc`. Everything here is a pure
//! function of its inputs; file formats, the command-line front end and
//! parallel evaluation live in the companion `pcontrol` crate.
//!
//! Layout:
//!
//! - [`pulse`]: genome → spectral field → temporal field, intensity, the
//!   Fourier transform of the intensity, and the Wigner map.
//! - [`srs`]: the two-mode stimulated Raman surrogate fitness.
//! - [`ga`]: generational GA with elitism and genealogy, plus the
//!   reduced-basis search over principal coordinates.
//! - [`pca`]: covariance of nearest-neighbour phase differences, Jacobi
//!   eigendecomposition, fitness correlations, principal-control selection
//!   and essential-pulse reconstruction.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

mod error;
mod fft;
pub mod ga;
mod genome;
pub mod pca;
pub mod pulse;
pub mod srs;
pub mod stats;

pub use error::Error;
pub use genome::Genome;

/// Convenience alias used throughout the crate.
pub type Result<T, E = Error> = core::result::Result<T, E>;

pub(crate) const TAU: f64 = core::f64::consts::TAU;
