//! Topological-derivative imaging of short, linear perfectly conducting cracks
//! embedded in a homogeneous disk.
//!
//! The pipeline is:
//!
//! 1. describe the configuration ([`scene`]): medium, cracks, incident
//!    directions, boundary sampling and the imaging raster;
//! 2. synthesize boundary data `u - w` from the small-crack asymptotic
//!    expansion and optionally pollute it with seeded Gaussian noise
//!    ([`forward`]);
//! 3. back-propagate the data with the disk's Neumann function at an assumed
//!    (possibly wrong) wavenumber and form the normalized imaging function
//!    ([`imaging`]);
//! 4. compare the result against the closed-form `J0` predictor and the
//!    `(k / k_a) x_m` shift law ([`theory`]).
//!
//! The Neumann function of the disk is evaluated through its Fourier-Bessel
//! series ([`greens`]), which in turn relies on the integer-order cylinder
//! functions in [`specfun`].

pub mod error;
pub mod forward;
pub mod geometry;
pub mod greens;
pub mod imaging;
pub mod scene;
pub mod specfun;
pub mod theory;

pub use error::{Error, Result};
pub use geometry::Point;
