//! Fast finite shearlet transform.
//!
//! Band-limited cone-adapted shearlets sampled directly on the DFT grid. The
//! filters are real, and their squares sum to one at every grid frequency,
//! so analysis followed by the adjoint synthesis is the identity.
//!
//! Frequencies are evaluated in image coordinates: `wx` is the column
//! frequency and `wy = -row frequency`, so that `y` points up as in the
//! synthetic image generators. The horizontal cone is `|wy| <= |wx|` (it
//! responds to edges steeper than 45 degrees) and the vertical cone is
//! `|wx| < |wy|`.

use std::f64::consts::FRAC_PI_2;
use std::path::Path;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::image::{save_pgm, GrayImage, Plane};
use crate::spectral::{bin, frequency, Fft2};

/// Meyer auxiliary polynomial: 0 below 0, 1 above 1, `35x^4 - 84x^5 + 70x^6 - 20x^7` between.
pub fn meyer_v(x: f64) -> f64 {
    if x < 0.0 {
        0.0
    } else if x > 1.0 {
        1.0
    } else {
        x.powi(4) * (35.0 - 84.0 * x + 70.0 * x * x - 20.0 * x.powi(3))
    }
}

/// Meyer wavelet bump, supported on `1 <= |w| <= 4`.
pub fn meyer_b(w: f64) -> f64 {
    let a = w.abs();
    if (1.0..=2.0).contains(&a) {
        (FRAC_PI_2 * meyer_v(a - 1.0)).sin()
    } else if a > 2.0 && a <= 4.0 {
        (FRAC_PI_2 * meyer_v(0.5 * a - 1.0)).cos()
    } else {
        0.0
    }
}

/// Radial generator, supported on `1/2 <= |w| <= 4`.
pub fn psi1_hat(w: f64) -> f64 {
    let (b1, b2) = (meyer_b(w), meyer_b(2.0 * w));
    (b2 * b2 + b1 * b1).sqrt()
}

/// Angular generator, supported on `[-1, 1]`.
pub fn psi2_hat(w: f64) -> f64 {
    if w <= 0.0 {
        meyer_v(1.0 + w).sqrt()
    } else {
        meyer_v(1.0 - w).sqrt()
    }
}

/// One-dimensional Meyer scaling function.
pub fn meyer_scaling(w: f64) -> f64 {
    let a = w.abs();
    if a <= 0.5 {
        1.0
    } else if a < 1.0 {
        (FRAC_PI_2 * meyer_v(2.0 * a - 1.0)).cos()
    } else {
        0.0
    }
}

/// Two-dimensional low-pass: the scaling function of the dominant coordinate.
pub fn phi_hat(w1: f64, w2: f64) -> f64 {
    if w2.abs() <= w1.abs() {
        meyer_scaling(w1)
    } else {
        meyer_scaling(w2)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Cone {
    Horizontal,
    Vertical,
    /// The `|k| = 2^j` bands shared by both cones along the diagonals.
    Seam,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Band {
    LowPass,
    Shear {
        cone: Cone,
        scale: usize,
        shear: i64,
    },
}

impl Band {
    pub fn scale(&self) -> Option<usize> {
        match *self {
            Band::LowPass => None,
            Band::Shear { scale, .. } => Some(scale),
        }
    }
}

impl std::fmt::Display for Band {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match *self {
            Band::LowPass => write!(f, "lowpass"),
            Band::Shear { cone, scale, shear } => {
                let c = match cone {
                    Cone::Horizontal => "h",
                    Cone::Vertical => "v",
                    Cone::Seam => "hv",
                };
                write!(f, "{c}_j{scale}_k{shear}")
            }
        }
    }
}

/// Number of bands for `scales` scales: the low-pass plus `2^(j+2)` per scale.
pub fn band_count(scales: usize) -> usize {
    1 + (0..scales).map(|j| 1usize << (j + 2)).sum::<usize>()
}

/// Largest admissible scale count for an `rows x cols` grid.
pub fn max_scales(rows: usize, cols: usize) -> usize {
    rows.max(cols).ilog2() as usize
}

/// Default scale count, `floor(log2(max(M, N)) / 2)` (at least one).
pub fn default_scales(rows: usize, cols: usize) -> usize {
    (max_scales(rows, cols) / 2).max(1)
}

fn band_layout(scales: usize) -> Vec<Band> {
    let mut bands = vec![Band::LowPass];
    for scale in 0..scales {
        let edge = 1i64 << scale;
        for cone in [Cone::Horizontal, Cone::Vertical] {
            for shear in -edge + 1..edge {
                bands.push(Band::Shear { cone, scale, shear });
            }
        }
        for shear in [-edge, edge] {
            bands.push(Band::Shear {
                cone: Cone::Seam,
                scale,
                shear,
            });
        }
    }
    bands
}

/// Radial window of scale `j`. The finest scale keeps its plateau out to the
/// edge of the grid so that the squared windows partition unity up to the
/// Nyquist frequency for every scale count.
fn radial(scale: usize, finest: bool, w: f64) -> f64 {
    let x = w.abs() / 4f64.powi(scale as i32);
    if finest && x >= 1.0 {
        1.0
    } else {
        psi1_hat(x)
    }
}

fn cone_window(scale: usize, shear: i64, finest: bool, dominant: f64, other: f64) -> f64 {
    let ratio = other / dominant;
    radial(scale, finest, dominant) * psi2_hat(shear as f64 + (1i64 << scale) as f64 * ratio)
}

/// Filter value of `band` at image-oriented frequency (`wx`, `wy`).
fn band_value(band: Band, scales: usize, wx: f64, wy: f64) -> f64 {
    let Band::Shear { cone, scale, shear } = band else {
        return phi_hat(wx, wy);
    };
    if wx == 0.0 && wy == 0.0 {
        return 0.0;
    }
    let finest = scale + 1 == scales;
    let in_h = wy.abs() <= wx.abs();
    match cone {
        Cone::Horizontal if in_h => cone_window(scale, shear, finest, wx, wy),
        Cone::Vertical if !in_h => cone_window(scale, shear, finest, wy, wx),
        Cone::Seam if in_h => cone_window(scale, shear, finest, wx, wy),
        Cone::Seam => cone_window(scale, shear, finest, wy, wx),
        _ => 0.0,
    }
}

/// Precomputed frequency-domain shearlet filter bank for one grid size.
#[derive(Clone, Debug)]
pub struct ShearletSystem {
    rows: usize,
    cols: usize,
    scales: usize,
    bands: Arc<[Band]>,
    /// One real filter per band, natural FFT order.
    filters: Vec<Vec<f64>>,
    fft: Fft2,
}

impl ShearletSystem {
    pub fn new(rows: usize, cols: usize, scales: usize) -> Result<Self> {
        let max = max_scales(rows.max(1), cols.max(1));
        if rows < 4 || cols < 4 {
            return Err(Error::InvalidArgument(format!(
                "shearlet grid must be at least 4x4, got {rows}x{cols}"
            )));
        }
        if scales == 0 || scales > max {
            return Err(Error::ScalesOutOfRange {
                scales,
                max,
                rows,
                cols,
            });
        }
        let bands: Arc<[Band]> = band_layout(scales).into();
        let filters = bands
            .par_iter()
            .map(|&band| sample_filter(band, scales, rows, cols))
            .collect();
        Ok(ShearletSystem {
            rows,
            cols,
            scales,
            bands,
            filters,
            fft: Fft2::new(rows, cols),
        })
    }

    /// System with the default scale count for the grid.
    pub fn with_default_scales(rows: usize, cols: usize) -> Result<Self> {
        Self::new(rows, cols, default_scales(rows, cols))
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn scales(&self) -> usize {
        self.scales
    }

    pub fn bands(&self) -> &[Band] {
        &self.bands
    }

    pub fn band_index(&self, band: Band) -> Option<usize> {
        self.bands.iter().position(|&b| b == band)
    }

    /// Filter of band `index` in natural FFT order.
    pub fn filter(&self, index: usize) -> &[f64] {
        &self.filters[index]
    }

    /// Filter value of band `index` at signed frequency (`w1`, `w2`), `w1`
    /// along rows.
    pub fn filter_at(&self, index: usize, w1: i64, w2: i64) -> f64 {
        self.filters[index][bin(w1, self.rows) * self.cols + bin(w2, self.cols)]
    }

    /// Largest deviation of the summed squared filters from one.
    pub fn tightness_error(&self) -> f64 {
        (0..self.rows * self.cols)
            .map(|i| {
                let s: f64 = self.filters.iter().map(|f| f[i] * f[i]).sum();
                (s - 1.0).abs()
            })
            .fold(0.0, f64::max)
    }

    pub fn analyze(&self, img: &Plane) -> Result<ShearletCoefficients> {
        let spec = self.fft.forward(img)?;
        let planes = self
            .filters
            .par_iter()
            .map(|filter| self.fft.inverse(&spec.filtered(filter)))
            .collect::<Result<Vec<_>>>()?;
        Ok(ShearletCoefficients {
            rows: self.rows,
            cols: self.cols,
            bands: Arc::clone(&self.bands),
            planes,
        })
    }

    /// Adjoint of [`analyze`](Self::analyze); its inverse since the frame is
    /// Parseval.
    pub fn synthesize(&self, coeffs: &ShearletCoefficients) -> Result<Plane> {
        if coeffs.planes.len() != self.bands.len() || coeffs.bands[..] != self.bands[..] {
            return Err(Error::BandMismatch {
                expected: self.bands.len(),
                found: coeffs.planes.len(),
            });
        }
        if (coeffs.rows, coeffs.cols) != (self.rows, self.cols) {
            return Err(Error::DimensionMismatch {
                expected: (self.rows, self.cols),
                found: (coeffs.rows, coeffs.cols),
            });
        }
        let filtered = coeffs
            .planes
            .par_iter()
            .zip(self.filters.par_iter())
            .map(|(plane, filter)| Ok(self.fft.forward(plane)?.filtered(filter)))
            .collect::<Result<Vec<_>>>()?;
        // Summed in band order so the result does not depend on scheduling.
        let mut acc = filtered[0].clone();
        for spec in &filtered[1..] {
            for (a, v) in acc.values_mut().iter_mut().zip(spec.values()) {
                *a += v;
            }
        }
        self.fft.inverse(&acc)
    }

    /// Writes every filter as an 8-bit PGM (centered, magnitude normalized).
    pub fn dump_filters(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        for (band, filter) in self.bands.iter().zip(&self.filters) {
            let centered = Plane::from_fn(self.rows, self.cols, |r, c| {
                let r0 = (r + self.rows / 2) % self.rows;
                let c0 = (c + self.cols / 2) % self.cols;
                filter[r0 * self.cols + c0]
            });
            save_pgm(
                &normalized_magnitude(&centered),
                dir.join(format!("filter_{band}.pgm")),
            )?;
        }
        Ok(())
    }
}

fn sample_filter(band: Band, scales: usize, rows: usize, cols: usize) -> Vec<f64> {
    let value = |i: usize, l: usize| {
        let wx = frequency(l, cols) as f64;
        let wy = -(frequency(i, rows) as f64);
        band_value(band, scales, wx, wy)
    };
    let mut out = Vec::with_capacity(rows * cols);
    for i in 0..rows {
        for l in 0..cols {
            let h = value(i, l);
            // On even grids the Nyquist row and column alias onto themselves
            // under negation. Average the squared responses with the aliased
            // partner so the filter stays conjugate symmetric without
            // disturbing the partition of unity.
            let (pi, pl) = ((rows - i) % rows, (cols - l) % cols);
            let exact_partner = frequency(pi, rows) == -frequency(i, rows)
                && frequency(pl, cols) == -frequency(l, cols);
            if exact_partner {
                out.push(h);
            } else {
                let g = value(pi, pl);
                out.push(((h * h + g * g) / 2.0).sqrt());
            }
        }
    }
    out
}

fn normalized_magnitude(p: &Plane) -> GrayImage {
    let max = p.data().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let scale = if max > 0.0 { 1.0 / max } else { 0.0 };
    GrayImage::clamped(p.map(|v| v.abs() * scale))
}

/// Coefficient planes of one analysis, one `M x N` plane per band.
#[derive(Clone, Debug)]
pub struct ShearletCoefficients {
    rows: usize,
    cols: usize,
    bands: Arc<[Band]>,
    planes: Vec<Plane>,
}

impl ShearletCoefficients {
    /// All-zero coefficients laid out for `sys`.
    pub fn zeros(sys: &ShearletSystem) -> Self {
        ShearletCoefficients {
            rows: sys.rows,
            cols: sys.cols,
            bands: Arc::clone(&sys.bands),
            planes: vec![Plane::zeros(sys.rows, sys.cols); sys.bands.len()],
        }
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn bands(&self) -> &[Band] {
        &self.bands
    }

    pub fn planes(&self) -> &[Plane] {
        &self.planes
    }

    pub fn planes_mut(&mut self) -> &mut [Plane] {
        &mut self.planes
    }

    pub fn plane(&self, band: Band) -> Option<&Plane> {
        self.bands
            .iter()
            .position(|&b| b == band)
            .map(|i| &self.planes[i])
    }

    /// Indices of the shear bands at `scale`.
    pub fn scale_indices(&self, scale: usize) -> Vec<usize> {
        self.bands
            .iter()
            .enumerate()
            .filter(|(_, b)| b.scale() == Some(scale))
            .map(|(i, _)| i)
            .collect()
    }

    pub fn energy(&self) -> f64 {
        self.planes.iter().map(Plane::energy).sum()
    }

    /// Inner product with another coefficient set of the same layout.
    pub fn dot(&self, other: &ShearletCoefficients) -> f64 {
        self.planes
            .iter()
            .zip(&other.planes)
            .map(|(a, b)| {
                a.data()
                    .iter()
                    .zip(b.data())
                    .map(|(x, y)| x * y)
                    .sum::<f64>()
            })
            .sum()
    }

    pub fn dump(&self, dir: &Path, prefix: &str) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        for (band, plane) in self.bands.iter().zip(&self.planes) {
            save_pgm(
                &normalized_magnitude(plane),
                dir.join(format!("{prefix}_{band}.pgm")),
            )?;
        }
        Ok(())
    }
}

/// Dominant shear at one position and scale.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SlopeEstimate {
    /// Winning shear index `k`.
    pub shear: i64,
    /// `s = k / 2^j`. In the vertical cone this estimates the edge slope
    /// `r` directly; in the horizontal cone it estimates `1 / r`.
    pub shear_slope: f64,
    /// Seam bands (`|k| = 2^j`, slope of magnitude one) report as vertical.
    pub cone: Cone,
    pub magnitude: f64,
}

impl SlopeEstimate {
    /// Edge slope `dy/dx` implied by the estimate.
    pub fn edge_slope(&self) -> f64 {
        match self.cone {
            Cone::Horizontal => 1.0 / self.shear_slope,
            _ => self.shear_slope,
        }
    }
}

/// Picks the shear band with the largest coefficient magnitude at
/// (`row`, `col`) among both cones at `scale`. Ties go to the smaller `|k|`,
/// then to the horizontal cone.
pub fn detect_slope(
    coeffs: &ShearletCoefficients,
    scale: usize,
    row: usize,
    col: usize,
) -> Result<SlopeEstimate> {
    let candidates = coeffs.scale_indices(scale);
    if candidates.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "scale {scale} not present in coefficients"
        )));
    }
    let rank = |cone: Cone| match cone {
        Cone::Horizontal => 0,
        _ => 1,
    };
    let mut best: Option<SlopeEstimate> = None;
    for i in candidates {
        let Band::Shear { cone, shear, .. } = coeffs.bands[i] else {
            continue;
        };
        let cone = if cone == Cone::Seam {
            Cone::Vertical
        } else {
            cone
        };
        let magnitude = coeffs.planes[i].get(row, col).abs();
        let better = match best {
            None => true,
            Some(b) => {
                magnitude > b.magnitude
                    || (magnitude == b.magnitude
                        && (shear.abs(), rank(cone)) < (b.shear.abs(), rank(b.cone)))
            }
        };
        if better {
            best = Some(SlopeEstimate {
                shear,
                shear_slope: shear as f64 / (1i64 << scale) as f64,
                cone,
                magnitude,
            });
        }
    }
    Ok(best.expect("at least one candidate band"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::image::gen_half_plane;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_plane(rows: usize, cols: usize, seed: u64) -> Plane {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Plane::from_fn(rows, cols, |_, _| rng.random::<f64>())
    }

    #[test]
    fn meyer_v_values() {
        assert_eq!(meyer_v(0.0), 0.0);
        assert_eq!(meyer_v(1.0), 1.0);
        assert_eq!(meyer_v(-3.0), 0.0);
        assert_eq!(meyer_v(7.0), 1.0);
        assert!((meyer_v(0.5) - 0.5).abs() < 1e-15);
        // direct polynomial evaluation at 1/4
        let x: f64 = 0.25;
        let direct = 35.0 * x.powi(4) - 84.0 * x.powi(5) + 70.0 * x.powi(6) - 20.0 * x.powi(7);
        assert!((meyer_v(0.25) - direct).abs() < 1e-15);
        assert!((meyer_v(0.75) - (1.0 - direct)).abs() < 1e-14);
        for i in 0..=100 {
            let x = i as f64 / 100.0;
            assert!((meyer_v(x) + meyer_v(1.0 - x) - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn meyer_b_values_and_partition() {
        assert!(meyer_b(1.0).abs() < 1e-15);
        assert!(meyer_b(4.0).abs() < 1e-15);
        assert!((meyer_b(2.0) - 1.0).abs() < 1e-15);
        assert_eq!(meyer_b(0.5), 0.0);
        assert_eq!(meyer_b(5.0), 0.0);
        for i in 0..1000 {
            let w = 1.0 + i as f64 / 999.0;
            let s = meyer_b(w).powi(2) + meyer_b(2.0 * w).powi(2);
            assert!((s - 1.0).abs() < 1e-13, "w = {w}");
        }
    }

    #[test]
    fn psi1_values_support_and_scale_partition() {
        assert!((psi1_hat(1.0) - 1.0).abs() < 1e-15);
        assert_eq!(psi1_hat(0.4), 0.0);
        assert_eq!(psi1_hat(-0.4), 0.0);
        assert_eq!(psi1_hat(4.5), 0.0);
        assert!(psi1_hat(0.6) > 0.0 && psi1_hat(3.9) > 0.0);
        for i in 1..=300 {
            let w = 1.0 + 3.0 * i as f64 / 300.0;
            let s: f64 = (0..=8).map(|j| psi1_hat(w / 4f64.powi(j)).powi(2)).sum();
            assert!((s - 1.0).abs() < 1e-13, "w = {w}");
        }
    }

    #[test]
    fn psi2_values_and_shift_partition() {
        assert_eq!(psi2_hat(0.0), 1.0);
        assert_eq!(psi2_hat(1.0), 0.0);
        assert_eq!(psi2_hat(-1.0), 0.0);
        for i in 0..=200 {
            let xi = -1.0 + 2.0 * i as f64 / 200.0;
            assert!((psi2_hat(xi) - psi2_hat(-xi)).abs() < 1e-15);
            let s: f64 = (-1..=1).map(|k| psi2_hat(k as f64 + xi).powi(2)).sum();
            assert!((s - 1.0).abs() < 1e-13, "xi = {xi}");
        }
    }

    #[test]
    fn phi_values() {
        assert_eq!(phi_hat(0.0, 0.0), 1.0);
        assert_eq!(phi_hat(1.5, 0.0), 0.0);
        let expect = (FRAC_PI_2 * meyer_v(0.5)).cos();
        assert!((phi_hat(0.75, 0.2) - expect).abs() < 1e-15);
        assert!((phi_hat(0.2, -0.75) - expect).abs() < 1e-15);
    }

    #[test]
    fn band_counts() {
        for scales in 1..=5 {
            let expect: usize = 1
                + (0..scales)
                    .map(|j| 2 * ((1 << (j + 1)) - 1) + 2)
                    .sum::<usize>();
            assert_eq!(band_count(scales), expect);
            assert_eq!(band_layout(scales).len(), expect);
        }
        let sys = ShearletSystem::new(64, 64, 3).unwrap();
        assert_eq!(sys.bands().len(), band_count(3));
    }

    #[test]
    fn scale_range_is_checked() {
        assert!(matches!(
            ShearletSystem::new(64, 64, 0),
            Err(Error::ScalesOutOfRange { .. })
        ));
        assert!(matches!(
            ShearletSystem::new(64, 64, 7),
            Err(Error::ScalesOutOfRange { max: 6, .. })
        ));
        assert!(ShearletSystem::new(64, 64, 6).is_ok());
        assert!(ShearletSystem::new(3, 64, 1).is_err());
        assert_eq!(default_scales(256, 256), 4);
    }

    #[test]
    fn tight_and_bounded_filters() {
        for (m, n, j) in [(64, 64, 3), (17, 23, 2), (32, 20, 5), (16, 16, 1)] {
            let sys = ShearletSystem::new(m, n, j).unwrap();
            assert!(sys.tightness_error() <= 1e-12, "{m}x{n} J={j}");
            for i in 0..sys.bands().len() {
                assert!(sys
                    .filter(i)
                    .iter()
                    .all(|&h| (0.0..=1.0 + 1e-15).contains(&h)));
            }
        }
    }

    #[test]
    fn constant_image_lives_in_lowpass() {
        let sys = ShearletSystem::new(32, 32, 2).unwrap();
        let img = Plane::filled(32, 32, 0.4);
        let coeffs = sys.analyze(&img).unwrap();
        for (band, plane) in coeffs.bands().iter().zip(coeffs.planes()) {
            if *band == Band::LowPass {
                assert!(plane.max_abs_diff(&img) < 1e-14);
            } else {
                assert!(plane.data().iter().all(|v| v.abs() < 1e-14));
            }
        }
        // masking everything but the low-pass keeps the constant
        let mut masked = ShearletCoefficients::zeros(&sys);
        masked.planes_mut()[0] = coeffs.planes()[0].clone();
        assert!(sys.synthesize(&masked).unwrap().max_abs_diff(&img) < 1e-14);
    }

    #[test]
    fn parseval_reconstruction_linearity() {
        let sys = ShearletSystem::new(64, 64, 3).unwrap();
        let x = random_plane(64, 64, 11);
        let y = random_plane(64, 64, 12);
        let cx = sys.analyze(&x).unwrap();
        assert!((cx.energy() - x.energy()).abs() / x.energy() < 1e-8);
        assert!(sys.synthesize(&cx).unwrap().max_abs_diff(&x) < 1e-10);

        let mut sum = x.clone();
        sum.add_assign(&y);
        let cs = sys.analyze(&sum).unwrap();
        let cy = sys.analyze(&y).unwrap();
        for ((s, a), b) in cs.planes().iter().zip(cx.planes()).zip(cy.planes()) {
            let mut ab = a.clone();
            ab.add_assign(b);
            assert!(s.max_abs_diff(&ab) < 1e-12);
        }

        let zero = ShearletCoefficients::zeros(&sys);
        assert!(sys
            .synthesize(&zero)
            .unwrap()
            .data()
            .iter()
            .all(|&v| v == 0.0));
    }

    #[test]
    fn synthesize_rejects_foreign_layout() {
        let a = ShearletSystem::new(32, 32, 2).unwrap();
        let b = ShearletSystem::new(32, 32, 1).unwrap();
        let c = a.analyze(&Plane::zeros(32, 32)).unwrap();
        assert!(matches!(b.synthesize(&c), Err(Error::BandMismatch { .. })));
        assert!(matches!(
            a.analyze(&Plane::zeros(16, 32)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn axis_aligned_edge_selects_zero_shear() {
        let img = gen_half_plane(64, 0.0).unwrap();
        let sys = ShearletSystem::new(64, 64, 3).unwrap();
        let coeffs = sys.analyze(&img).unwrap();
        for col in [16, 30, 47] {
            let est = detect_slope(&coeffs, 2, 32, col).unwrap();
            assert_eq!(est.shear, 0);
            assert_eq!(est.cone, Cone::Vertical);
            assert_eq!(est.shear_slope, 0.0);
        }
    }
}
