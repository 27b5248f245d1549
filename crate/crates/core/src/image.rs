//! Grayscale images, binary PGM I/O, PSNR and the synthetic cartoon-like
//! test images (half-plane, disk, parabola).

use std::fs;
use std::io::Write;
use std::ops::{Deref, Index, IndexMut};
use std::path::Path;

use crate::error::{Error, Result};

/// Default radius of the `circle` preset, as a fraction of the image size.
pub const DEFAULT_RADIUS_FRACTION: f64 = 0.3;
/// Default curvature of the `parabola` preset.
pub const DEFAULT_CURVATURE: f64 = 1.0 / 64.0;
/// Slope of the `plane` preset.
pub const DEFAULT_PLANE_SLOPE: f64 = 5.0;

/// A real-valued matrix in row-major order. Values are unconstrained; this is
/// the working type for coefficients, detail images and interpolator output.
#[derive(Clone, Debug, PartialEq)]
pub struct Plane {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Plane {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::filled(rows, cols, 0.0)
    }

    pub fn filled(rows: usize, cols: usize, value: f64) -> Self {
        Plane {
            rows,
            cols,
            data: vec![value; rows * cols],
        }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: (rows, cols),
                found: (data.len(), 1),
            });
        }
        Ok(Plane { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Plane { rows, cols, data }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn dims(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    /// Periodic access: indices are wrapped onto the grid.
    #[inline]
    pub fn get_wrapped(&self, r: isize, c: isize) -> f64 {
        let r = r.rem_euclid(self.rows as isize) as usize;
        let c = c.rem_euclid(self.cols as isize) as usize;
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn transpose(&self) -> Plane {
        Plane::from_fn(self.cols, self.rows, |r, c| self.get(c, r))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Plane {
        Plane {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn check_same_dims(&self, other: &Plane) -> Result<()> {
        if self.dims() != other.dims() {
            return Err(Error::DimensionMismatch {
                expected: self.dims(),
                found: other.dims(),
            });
        }
        Ok(())
    }

    pub fn add_assign(&mut self, other: &Plane) {
        debug_assert_eq!(self.dims(), other.dims());
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b;
        }
    }

    pub fn sub_assign(&mut self, other: &Plane) {
        debug_assert_eq!(self.dims(), other.dims());
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a -= b;
        }
    }

    pub fn scale(&mut self, s: f64) {
        self.data.iter_mut().for_each(|v| *v *= s);
    }

    pub fn energy(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }

    pub fn max_abs_diff(&self, other: &Plane) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn mean(&self) -> f64 {
        self.data.iter().sum::<f64>() / self.data.len() as f64
    }

    /// Copies out the sub-rectangle starting at (`row`, `col`).
    pub fn crop(&self, row: usize, col: usize, height: usize, width: usize) -> Result<Plane> {
        if row + height > self.rows || col + width > self.cols || height == 0 || width == 0 {
            return Err(Error::InvalidArgument(format!(
                "crop {width}x{height}+{col}+{row} outside {}x{} image",
                self.cols, self.rows
            )));
        }
        Ok(Plane::from_fn(height, width, |r, c| {
            self.get(row + r, col + c)
        }))
    }
}

impl Index<(usize, usize)> for Plane {
    type Output = f64;

    fn index(&self, (r, c): (usize, usize)) -> &f64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for Plane {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut f64 {
        &mut self.data[r * self.cols + c]
    }
}

/// A grayscale image with every pixel in `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct GrayImage(Plane);

impl GrayImage {
    /// Wraps a plane whose values are already in `[0, 1]`.
    pub fn new(plane: Plane) -> Result<Self> {
        if plane.rows == 0 || plane.cols == 0 {
            return Err(Error::InvalidArgument("image must be at least 1x1".into()));
        }
        if let Some(v) = plane.data.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::InvalidArgument(format!(
                "pixel value {v} outside [0, 1]"
            )));
        }
        Ok(GrayImage(plane))
    }

    /// Clamps every value into `[0, 1]`. NaN maps to 0.
    pub fn clamped(mut plane: Plane) -> Self {
        for v in plane.data.iter_mut() {
            *v = if v.is_nan() { 0.0 } else { v.clamp(0.0, 1.0) };
        }
        GrayImage(plane)
    }

    pub fn constant(rows: usize, cols: usize, value: f64) -> Self {
        GrayImage::clamped(Plane::filled(rows, cols, value))
    }

    pub fn height(&self) -> usize {
        self.0.rows
    }

    pub fn width(&self) -> usize {
        self.0.cols
    }

    pub fn plane(&self) -> &Plane {
        &self.0
    }

    pub fn into_plane(self) -> Plane {
        self.0
    }
}

impl Deref for GrayImage {
    type Target = Plane;

    fn deref(&self) -> &Plane {
        &self.0
    }
}

/// Reads a binary (P5) PGM with maxval up to 65535.
pub fn load_pgm(path: impl AsRef<Path>) -> Result<GrayImage> {
    let bytes = fs::read(path.as_ref())?;
    decode_pgm(&bytes)
}

pub fn decode_pgm(bytes: &[u8]) -> Result<GrayImage> {
    if bytes.len() < 2 {
        return Err(Error::PgmHeader("file too short for a magic number".into()));
    }
    if &bytes[..2] != b"P5" {
        return Err(Error::PgmMagic(
            String::from_utf8_lossy(&bytes[..2]).into_owned(),
        ));
    }
    let mut pos = 2;
    let mut fields = [0usize; 3];
    for field in fields.iter_mut() {
        *field = read_header_number(bytes, &mut pos)?;
    }
    // Exactly one whitespace byte separates the header from the raster.
    match bytes.get(pos) {
        Some(b) if b.is_ascii_whitespace() => pos += 1,
        _ => return Err(Error::PgmHeader("missing whitespace after maxval".into())),
    }
    let [width, height, maxval] = fields;
    if width == 0 || height == 0 {
        return Err(Error::PgmHeader(format!("bad dimensions {width}x{height}")));
    }
    if maxval == 0 || maxval > 65535 {
        return Err(Error::PgmHeader(format!("maxval {maxval} out of range")));
    }
    let sample_bytes = if maxval > 255 { 2 } else { 1 };
    let needed = width * height * sample_bytes;
    let raster = &bytes[pos..];
    if raster.len() < needed {
        return Err(Error::PgmTruncated {
            expected: needed,
            found: raster.len(),
        });
    }
    let scale = 1.0 / maxval as f64;
    let data: Vec<f64> = if sample_bytes == 1 {
        raster[..needed].iter().map(|&b| b as f64 * scale).collect()
    } else {
        raster[..needed]
            .chunks_exact(2)
            .map(|p| u16::from_be_bytes([p[0], p[1]]) as f64 * scale)
            .collect()
    };
    if data.iter().any(|&v| v > 1.0) {
        return Err(Error::PgmHeader("sample exceeds maxval".into()));
    }
    Ok(GrayImage(Plane {
        rows: height,
        cols: width,
        data,
    }))
}

fn read_header_number(bytes: &[u8], pos: &mut usize) -> Result<usize> {
    loop {
        match bytes.get(*pos) {
            Some(b'#') => {
                while let Some(&b) = bytes.get(*pos) {
                    *pos += 1;
                    if b == b'\n' {
                        break;
                    }
                }
            }
            Some(b) if b.is_ascii_whitespace() => *pos += 1,
            Some(_) => break,
            None => return Err(Error::PgmHeader("unexpected end of header".into())),
        }
    }
    let start = *pos;
    while bytes.get(*pos).is_some_and(u8::is_ascii_digit) {
        *pos += 1;
    }
    if start == *pos {
        return Err(Error::PgmHeader(format!(
            "expected a number at byte {start}"
        )));
    }
    std::str::from_utf8(&bytes[start..*pos])
        .ok()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::PgmHeader("header number overflow".into()))
}

/// Writes an 8-bit binary PGM.
pub fn save_pgm(img: &GrayImage, path: impl AsRef<Path>) -> Result<()> {
    let mut file = fs::File::create(path.as_ref())?;
    file.write_all(&encode_pgm(img))?;
    Ok(())
}

pub fn encode_pgm(img: &GrayImage) -> Vec<u8> {
    let header = format!("P5\n{} {}\n255\n", img.width(), img.height());
    let mut out = Vec::with_capacity(header.len() + img.data().len());
    out.extend_from_slice(header.as_bytes());
    out.extend(img.data().iter().map(|&v| (v * 255.0).round() as u8));
    out
}

/// Peak signal-to-noise ratio for unit-peak images, in dB. Identical images
/// give `f64::INFINITY`.
pub fn psnr(reference: &Plane, test: &Plane) -> Result<f64> {
    reference.check_same_dims(test)?;
    let sse: f64 = reference
        .data()
        .iter()
        .zip(test.data())
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    let mse = sse / reference.data().len() as f64;
    if mse == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(-10.0 * mse.log10())
}

/// Centered coordinates with y pointing up: x = c - (N-1)/2, y = (M-1)/2 - r.
#[inline]
pub fn centered(size: usize, r: usize, c: usize) -> (f64, f64) {
    let mid = (size as f64 - 1.0) / 2.0;
    (c as f64 - mid, mid - r as f64)
}

fn indicator(size: usize, inside: impl Fn(f64, f64) -> bool) -> Result<GrayImage> {
    if size < 2 {
        return Err(Error::InvalidArgument(format!(
            "synthetic image size must be at least 2, got {size}"
        )));
    }
    Ok(GrayImage(Plane::from_fn(size, size, |r, c| {
        let (x, y) = centered(size, r, c);
        if inside(x, y) {
            1.0
        } else {
            0.0
        }
    })))
}

/// Indicator of `y > slope * x` in centered coordinates.
pub fn gen_half_plane(size: usize, slope: f64) -> Result<GrayImage> {
    indicator(size, |x, y| y > slope * x)
}

/// Disk of radius `radius_fraction * size` centered on the image midpoint.
pub fn gen_circle(size: usize, radius_fraction: f64) -> Result<GrayImage> {
    if !(radius_fraction > 0.0 && radius_fraction < 0.5) {
        return Err(Error::InvalidArgument(format!(
            "radius fraction {radius_fraction} not in (0, 0.5)"
        )));
    }
    let radius = radius_fraction * size as f64;
    indicator(size, |x, y| x * x + y * y < radius * radius)
}

/// Indicator of `y > curvature * x^2` in centered coordinates.
pub fn gen_parabola(size: usize, curvature: f64) -> Result<GrayImage> {
    if !(curvature > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "curvature must be positive, got {curvature}"
        )));
    }
    indicator(size, |x, y| y > curvature * x * x)
}
