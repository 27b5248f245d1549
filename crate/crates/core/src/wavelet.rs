//! One-level separable 2-D Daubechies-4 wavelet transform with periodic
//! extension. Orthonormal, so the synthesis is the exact inverse.

use crate::error::{Error, Result};
use crate::image::Plane;

const SQRT3: f64 = 1.732_050_807_568_877_2;

/// Daubechies-4 scaling (low-pass) filter.
pub fn db4_lowpass() -> [f64; 4] {
    let n = 4.0 * std::f64::consts::SQRT_2;
    [
        (1.0 + SQRT3) / n,
        (3.0 + SQRT3) / n,
        (3.0 - SQRT3) / n,
        (1.0 - SQRT3) / n,
    ]
}

/// Quadrature mirror high-pass, `g[k] = (-1)^k h[3 - k]`.
pub fn db4_highpass() -> [f64; 4] {
    let h = db4_lowpass();
    [h[3], -h[2], h[1], -h[0]]
}

/// Detail channels in block-channel order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Detail {
    /// High-pass across columns: responds to vertical edges.
    Vertical = 1,
    /// High-pass across rows: responds to horizontal edges.
    Horizontal = 2,
    Diagonal = 3,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WaveletCoefficients {
    pub approx: Plane,
    pub vertical: Plane,
    pub horizontal: Plane,
    pub diagonal: Plane,
}

impl WaveletCoefficients {
    pub fn details(&self) -> [&Plane; 3] {
        [&self.vertical, &self.horizontal, &self.diagonal]
    }

    pub fn details_mut(&mut self) -> [&mut Plane; 3] {
        [&mut self.vertical, &mut self.horizontal, &mut self.diagonal]
    }

    pub fn energy(&self) -> f64 {
        self.approx.energy() + self.details().iter().map(|p| p.energy()).sum::<f64>()
    }
}

fn analyze_1d(x: &[f64], lo: &mut [f64], hi: &mut [f64]) {
    let (h, g) = (db4_lowpass(), db4_highpass());
    let n = x.len();
    for i in 0..n / 2 {
        let (mut a, mut d) = (0.0, 0.0);
        for k in 0..4 {
            let v = x[(2 * i + k) % n];
            a += h[k] * v;
            d += g[k] * v;
        }
        lo[i] = a;
        hi[i] = d;
    }
}

fn synthesize_1d(lo: &[f64], hi: &[f64], x: &mut [f64]) {
    let (h, g) = (db4_lowpass(), db4_highpass());
    let n = x.len();
    x.iter_mut().for_each(|v| *v = 0.0);
    for i in 0..n / 2 {
        for k in 0..4 {
            x[(2 * i + k) % n] += h[k] * lo[i] + g[k] * hi[i];
        }
    }
}

/// Runs `f` over every row of `src` (rows x cols), producing two half-width
/// planes.
fn split_rows(src: &Plane) -> (Plane, Plane) {
    let (rows, cols) = src.dims();
    let mut lo = Plane::zeros(rows, cols / 2);
    let mut hi = Plane::zeros(rows, cols / 2);
    let (mut l, mut h) = (vec![0.0; cols / 2], vec![0.0; cols / 2]);
    for r in 0..rows {
        analyze_1d(src.row(r), &mut l, &mut h);
        for c in 0..cols / 2 {
            lo.set(r, c, l[c]);
            hi.set(r, c, h[c]);
        }
    }
    (lo, hi)
}

fn merge_rows(lo: &Plane, hi: &Plane) -> Plane {
    let (rows, half) = lo.dims();
    let mut out = Plane::zeros(rows, 2 * half);
    let mut x = vec![0.0; 2 * half];
    for r in 0..rows {
        synthesize_1d(lo.row(r), hi.row(r), &mut x);
        for (c, &v) in x.iter().enumerate() {
            out.set(r, c, v);
        }
    }
    out
}

/// One-level forward transform. Both dimensions must be even.
pub fn dwt2(img: &Plane) -> Result<WaveletCoefficients> {
    let (rows, cols) = img.dims();
    if rows % 2 == 1 || cols % 2 == 1 || rows == 0 || cols == 0 {
        return Err(Error::OddDimensions(rows, cols));
    }
    let (lo_x, hi_x) = split_rows(img);
    // Column passes run on the transposes.
    let (ll, lh) = split_rows(&lo_x.transpose());
    let (hl, hh) = split_rows(&hi_x.transpose());
    Ok(WaveletCoefficients {
        approx: ll.transpose(),
        horizontal: lh.transpose(),
        vertical: hl.transpose(),
        diagonal: hh.transpose(),
    })
}

/// Inverse of [`dwt2`].
pub fn idwt2(coeffs: &WaveletCoefficients) -> Result<Plane> {
    let dims = coeffs.approx.dims();
    for p in coeffs.details() {
        if p.dims() != dims {
            return Err(Error::DimensionMismatch {
                expected: dims,
                found: p.dims(),
            });
        }
    }
    let lo_x = merge_rows(&coeffs.approx.transpose(), &coeffs.horizontal.transpose()).transpose();
    let hi_x = merge_rows(&coeffs.vertical.transpose(), &coeffs.diagonal.transpose()).transpose();
    Ok(merge_rows(&lo_x, &hi_x))
}
