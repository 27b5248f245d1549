//! Centered two-dimensional DFT pair.
//!
//! The forward transform is unnormalized and the inverse carries the full
//! `1/(M N)` factor. Values are stored in natural FFT order; [`Spectrum::at`]
//! addresses them by signed frequency, with frequencies along an axis of
//! length `n` running over `-floor(n/2) ..= ceil(n/2) - 1`.

use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::image::Plane;

/// Largest imaginary part, relative to the real magnitude, tolerated when
/// converting an inverse transform back to a real plane.
pub const IMAGINARY_TOLERANCE: f64 = 1e-10;

/// Signed frequency of FFT bin `index` on an axis of length `n`.
#[inline]
pub fn frequency(index: usize, n: usize) -> i64 {
    if index < n.div_ceil(2) {
        index as i64
    } else {
        index as i64 - n as i64
    }
}

/// FFT bin holding signed frequency `freq` on an axis of length `n`.
#[inline]
pub fn bin(freq: i64, n: usize) -> usize {
    freq.rem_euclid(n as i64) as usize
}

/// Inclusive range of representable frequencies on an axis of length `n`.
pub fn frequency_range(n: usize) -> (i64, i64) {
    (-((n / 2) as i64), n.div_ceil(2) as i64 - 1)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    rows: usize,
    cols: usize,
    values: Vec<Complex64>,
}

impl Spectrum {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Raw values in natural FFT order.
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    /// Value at signed frequency (`w1`, `w2`), `w1` along rows.
    pub fn at(&self, w1: i64, w2: i64) -> Complex64 {
        let (lo1, hi1) = frequency_range(self.rows);
        let (lo2, hi2) = frequency_range(self.cols);
        assert!(
            (lo1..=hi1).contains(&w1) && (lo2..=hi2).contains(&w2),
            "frequency ({w1}, {w2}) outside grid"
        );
        self.values[bin(w1, self.rows) * self.cols + bin(w2, self.cols)]
    }

    /// Pointwise product with a real filter stored in natural FFT order.
    pub fn filtered(&self, filter: &[f64]) -> Spectrum {
        debug_assert_eq!(filter.len(), self.values.len());
        Spectrum {
            rows: self.rows,
            cols: self.cols,
            values: self
                .values
                .iter()
                .zip(filter)
                .map(|(v, &h)| v * h)
                .collect(),
        }
    }
}

/// Planned forward/inverse 2-D FFT for a fixed grid. Cheap to clone and
/// shareable across threads.
#[derive(Clone)]
pub struct Fft2 {
    rows: usize,
    cols: usize,
    row_fwd: Arc<dyn Fft<f64>>,
    row_inv: Arc<dyn Fft<f64>>,
    col_fwd: Arc<dyn Fft<f64>>,
    col_inv: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Fft2 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Fft2")
            .field("rows", &self.rows)
            .field("cols", &self.cols)
            .finish()
    }
}

impl Fft2 {
    pub fn new(rows: usize, cols: usize) -> Self {
        let mut planner = FftPlanner::new();
        Fft2 {
            rows,
            cols,
            row_fwd: planner.plan_fft_forward(cols),
            row_inv: planner.plan_fft_inverse(cols),
            col_fwd: planner.plan_fft_forward(rows),
            col_inv: planner.plan_fft_inverse(rows),
        }
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn forward(&self, img: &Plane) -> Result<Spectrum> {
        if img.dims() != (self.rows, self.cols) {
            return Err(Error::DimensionMismatch {
                expected: (self.rows, self.cols),
                found: img.dims(),
            });
        }
        let mut values: Vec<Complex64> =
            img.data().iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.transform(&mut values, &self.row_fwd, &self.col_fwd);
        Ok(Spectrum {
            rows: self.rows,
            cols: self.cols,
            values,
        })
    }

    /// Inverse transform, checking that the imaginary residue is negligible
    /// before discarding it.
    pub fn inverse(&self, spec: &Spectrum) -> Result<Plane> {
        if (spec.rows, spec.cols) != (self.rows, self.cols) {
            return Err(Error::DimensionMismatch {
                expected: (self.rows, self.cols),
                found: (spec.rows, spec.cols),
            });
        }
        let mut values = spec.values.clone();
        self.transform(&mut values, &self.row_inv, &self.col_inv);
        let norm = 1.0 / (self.rows * self.cols) as f64;
        let mut max_im = 0.0f64;
        let mut max_re = 0.0f64;
        let data: Vec<f64> = values
            .iter()
            .map(|v| {
                max_im = max_im.max(v.im.abs());
                max_re = max_re.max(v.re.abs());
                v.re * norm
            })
            .collect();
        let residue = max_im * norm;
        if residue > IMAGINARY_TOLERANCE * (max_re * norm).max(1.0) {
            return Err(Error::ImaginaryResidue(residue));
        }
        Plane::from_vec(self.rows, self.cols, data)
    }

    fn transform(
        &self,
        values: &mut [Complex64],
        along_rows: &Arc<dyn Fft<f64>>,
        along_cols: &Arc<dyn Fft<f64>>,
    ) {
        let (rows, cols) = (self.rows, self.cols);
        let mut scratch = vec![
            Complex64::default();
            along_rows
                .get_inplace_scratch_len()
                .max(along_cols.get_inplace_scratch_len())
        ];
        along_rows.process_with_scratch(values, &mut scratch);
        let mut transposed = vec![Complex64::default(); rows * cols];
        for r in 0..rows {
            for c in 0..cols {
                transposed[c * rows + r] = values[r * cols + c];
            }
        }
        along_cols.process_with_scratch(&mut transposed, &mut scratch);
        for c in 0..cols {
            for r in 0..rows {
                values[r * cols + c] = transposed[c * rows + r];
            }
        }
    }
}

/// Unnormalized forward DFT of a real plane.
pub fn dft2(img: &Plane) -> Spectrum {
    Fft2::new(img.rows(), img.cols())
        .forward(img)
        .expect("planner built for the image dims")
}

/// Inverse DFT with `1/(M N)` normalization.
pub fn idft2(spec: &Spectrum) -> Result<Plane> {
    Fft2::new(spec.rows, spec.cols).inverse(spec)
}
