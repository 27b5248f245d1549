//! Single-image 2x superresolution with sparse mixing estimators (SME).
//!
//! An image is decomposed in a redundant frame (a fast finite shearlet
//! transform or a one-level Daubechies wavelet), oriented blocks of
//! coefficients receive mixing weights from a block-sparse least-squares
//! fit, and each angle group is upsampled with a directional interpolator.

pub mod bench;
pub mod blocks;
pub mod error;
pub mod ffst;
pub mod image;
pub mod resample;
pub mod sme;
pub mod spectral;
pub mod wavelet;

pub use error::{Error, Result};
pub use image::{GrayImage, Plane};
