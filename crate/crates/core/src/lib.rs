//! Intensity-only Kirchhoff imaging.
//!
//! A source illuminates weak point scatterers and an array of receivers
//! records only the intensity of the total field. Under the Born
//! approximation and for a scattered field small against the direct
//! arrival, the intensities determine a projection `p̃` of the array
//! response vector in O(N) operations per frequency, and Kirchhoff
//! migration of `p̃` gives, at high frequency, the same image as migrating
//! the full-waveform response `p`.
//!
//! Module map:
//!
//! * [`scene`]: geometry, medium, frequency band, image window, presets and
//!   the JSON scene document.
//! * [`specfun`]: Bessel `J0`/`Y0`, Hankel `H0^(1)` and the free-space
//!   Helmholtz Green's function in 2D and 3D.
//! * [`forward`]: direct arrivals, Born array response and intensity data.
//! * [`stochastic`]: Gaussian-process illumination, power-spectrum data and
//!   a time-domain autocorrelation oracle.
//! * [`recover`]: the measurement matrix, closed-form recovery of `p̃`,
//!   conditioning and the geometric imaging condition.
//! * [`migrate`]: single-frequency and broadband Kirchhoff migration, image
//!   metrics and image export.
//! * [`io`]: CSV formats for intensity data, illumination records and
//!   recovered fields.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Series coefficients are kept as published, digits beyond f64 included.
#![allow(clippy::excessive_precision)]

pub mod error;
pub mod forward;
pub mod geometry;
pub mod io;
pub mod migrate;
pub mod recover;
pub mod scene;
pub mod specfun;
pub mod stochastic;

pub use error::{Error, Result};
pub use geometry::Point;
pub use num_complex::Complex64;
