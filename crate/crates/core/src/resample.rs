//! Degradation operators and 2x upsamplers.
//!
//! The degradations treat the image as periodic; the upsamplers extend it
//! by mirror reflection. Upsampled images keep the input samples at even
//! output indices: output `(2i, 2j)` equals input `(i, j)`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::image::{GrayImage, Plane};

/// Keys cubic convolution parameter.
pub const KEYS_A: f64 = -0.5;
/// Blur standard deviation of the blurred degradation presets.
pub const BLUR_SIGMA: f64 = 0.5;
/// Noise standard deviation of the noisy degradation presets.
pub const NOISE_SIGMA: f64 = 0.1;
/// Name of the generator behind [`gaussian_noise`]. Row `r` of the noise
/// field draws from the ChaCha20 stream `r` of the seed, so the field does
/// not depend on how rows are scheduled.
pub const NOISE_RNG: &str = "ChaCha20 (rand_chacha 0.9), one stream per row, StandardNormal";

/// Keys cubic convolution kernel.
#[inline]
pub fn keys_kernel(x: f64) -> f64 {
    let a = KEYS_A;
    let t = x.abs();
    if t <= 1.0 {
        ((a + 2.0) * t - (a + 3.0)) * t * t + 1.0
    } else if t < 2.0 {
        ((a * t - 5.0 * a) * t + 8.0 * a) * t - 4.0 * a
    } else {
        0.0
    }
}

/// Keys weights for taps at offsets `-1, 0, 1, 2` from `floor(x)`.
#[cfg(test)]
fn keys_weights(frac: f64) -> [f64; 4] {
    [
        keys_kernel(frac + 1.0),
        keys_kernel(frac),
        keys_kernel(1.0 - frac),
        keys_kernel(2.0 - frac),
    ]
}

/// Half-sample Keys weights, `(-1/16, 9/16, 9/16, -1/16)`.
const HALF: [f64; 4] = [-0.0625, 0.5625, 0.5625, -0.0625];

/// Keeps the samples at even row and column indices.
pub fn downsample2(img: &Plane) -> Result<Plane> {
    let (rows, cols) = img.dims();
    if rows % 2 == 1 || cols % 2 == 1 {
        return Err(Error::OddDimensions(rows, cols));
    }
    Ok(Plane::from_fn(rows / 2, cols / 2, |r, c| {
        img.get(2 * r, 2 * c)
    }))
}

/// Normalized 3x3 Gaussian kernel, row-major over offsets `-1..=1`.
pub fn gaussian_kernel3(sigma: f64) -> [[f64; 3]; 3] {
    let mut k = [[0.0; 3]; 3];
    let mut total = 0.0;
    for (i, row) in k.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            let d2 = (i as f64 - 1.0).powi(2) + (j as f64 - 1.0).powi(2);
            *v = (-d2 / (2.0 * sigma * sigma)).exp();
            total += *v;
        }
    }
    k.iter_mut().flatten().for_each(|v| *v /= total);
    k
}

/// 3x3 Gaussian blur with periodic boundary.
pub fn gaussian_blur3(img: &Plane, sigma: f64) -> Result<Plane> {
    if !(sigma > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "blur sigma must be positive, got {sigma}"
        )));
    }
    let k = gaussian_kernel3(sigma);
    Ok(Plane::from_fn(img.rows(), img.cols(), |r, c| {
        let mut acc = 0.0;
        for (di, row) in k.iter().enumerate() {
            for (dj, w) in row.iter().enumerate() {
                acc +=
                    w * img.get_wrapped(r as isize + di as isize - 1, c as isize + dj as isize - 1);
            }
        }
        acc
    }))
}

/// Zero-mean Gaussian field with standard deviation `sigma`.
pub fn gaussian_noise(rows: usize, cols: usize, sigma: f64, seed: u64) -> Plane {
    let data: Vec<f64> = (0..rows)
        .into_par_iter()
        .flat_map_iter(|r| {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            rng.set_stream(r as u64);
            (0..cols)
                .map(|_| {
                    sigma * <StandardNormal as Distribution<f64>>::sample(&StandardNormal, &mut rng)
                })
                .collect::<Vec<_>>()
        })
        .collect();
    Plane::from_vec(rows, cols, data).expect("rows * cols samples")
}

/// Adds i.i.d. Gaussian noise and clamps back into `[0, 1]`.
pub fn add_gaussian_noise(img: &Plane, sigma: f64, seed: u64) -> GrayImage {
    if sigma == 0.0 {
        return GrayImage::clamped(img.clone());
    }
    let mut out = gaussian_noise(img.rows(), img.cols(), sigma, seed);
    out.add_assign(img);
    GrayImage::clamped(out)
}

/// Degradation applied before superresolution: 2x decimation, then an
/// optional 3x3 blur, then optional noise.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DegradationSpec {
    pub blur: Option<f64>,
    pub noise: Option<NoiseSpec>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseSpec {
    pub sigma: f64,
    /// `None` means "take the run seed".
    pub seed: Option<u64>,
}

impl DegradationSpec {
    pub const DOWNSAMPLE: DegradationSpec = DegradationSpec {
        blur: None,
        noise: None,
    };

    /// The four benchmark regimes, noise seeded with `seed`.
    pub fn presets(seed: u64) -> [DegradationSpec; 4] {
        let noise = Some(NoiseSpec {
            sigma: NOISE_SIGMA,
            seed: Some(seed),
        });
        [
            DegradationSpec::DOWNSAMPLE,
            DegradationSpec {
                blur: Some(BLUR_SIGMA),
                noise: None,
            },
            DegradationSpec { blur: None, noise },
            DegradationSpec {
                blur: Some(BLUR_SIGMA),
                noise,
            },
        ]
    }

    pub fn is_noisy(&self) -> bool {
        self.noise.is_some_and(|n| n.sigma > 0.0)
    }

    /// Applies the operator chain. `stream` is mixed into the noise seed so
    /// that separate images draw separate realizations.
    pub fn apply(&self, img: &Plane, default_seed: u64, stream: u64) -> Result<GrayImage> {
        let mut out = downsample2(img)?;
        if let Some(sigma) = self.blur {
            out = gaussian_blur3(&out, sigma)?;
        }
        match self.noise {
            Some(n) => Ok(add_gaussian_noise(
                &out,
                n.sigma,
                mix_seed(n.seed.unwrap_or(default_seed), stream),
            )),
            None => Ok(GrayImage::clamped(out)),
        }
    }
}

/// SplitMix64 finalizer over the pair.
pub fn mix_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl fmt::Display for DegradationSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ds")?;
        if self.blur.is_some() {
            write!(f, "+blur")?;
        }
        if let Some(n) = self.noise {
            match n.seed {
                Some(s) => write!(f, "+noise:{s}")?,
                None => write!(f, "+noise")?,
            }
        }
        Ok(())
    }
}

/// Grammar: `ds`, optionally followed by `+blur`, optionally followed by
/// `+noise:<seed>` (or `+noise` to use the run seed).
impl FromStr for DegradationSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || {
            Error::Parse(format!(
                "degradation {s:?}; expected ds[+blur][+noise:<seed>]"
            ))
        };
        let mut rest = s.trim().strip_prefix("ds").ok_or_else(bad)?;
        let mut spec = DegradationSpec::DOWNSAMPLE;
        if let Some(r) = rest.strip_prefix("+blur") {
            spec.blur = Some(BLUR_SIGMA);
            rest = r;
        }
        if let Some(r) = rest.strip_prefix("+noise") {
            let seed = if r.is_empty() {
                None
            } else {
                let digits = r.strip_prefix(':').ok_or_else(bad)?;
                Some(digits.parse::<u64>().map_err(|_| bad())?)
            };
            spec.noise = Some(NoiseSpec {
                sigma: NOISE_SIGMA,
                seed,
            });
            rest = "";
        }
        if !rest.is_empty() {
            return Err(bad());
        }
        Ok(spec)
    }
}

/// Upsamples each row by two with half-sample Keys interpolation.
fn up2_rows(img: &Plane) -> Plane {
    let (rows, cols) = img.dims();
    let mut out = Plane::zeros(rows, 2 * cols);
    for r in 0..rows {
        for c in 0..cols {
            out.set(r, 2 * c, img.get(r, c));
            let ci = c as isize;
            let v = (0..4)
                .map(|k| HALF[k] * ext(img, r as isize, ci - 1 + k as isize))
                .sum();
            out.set(r, 2 * c + 1, v);
        }
    }
    out
}

/// Separable Keys bicubic 2x upsampling.
pub fn bicubic_up2(img: &Plane) -> Plane {
    up2_rows(&up2_rows(img).transpose()).transpose()
}

fn reflect(i: isize, n: usize) -> usize {
    let n = n as isize;
    if n == 1 {
        return 0;
    }
    let period = 2 * (n - 1);
    let m = i.rem_euclid(period);
    (if m < n { m } else { period - m }) as usize
}

/// Sample with whole-sample mirror extension.
#[inline]
fn ext(img: &Plane, r: isize, c: isize) -> f64 {
    img.get(reflect(r, img.rows()), reflect(c, img.cols()))
}

/// Half-length of the window along the line searched by the directional
/// interpolator, in input samples.
const REACH: f64 = 3.0;

/// Cost of distance along the line relative to distance across it.
const ALONG_COST: f64 = 0.02;

/// Input offsets `(dr, dc)` and weights producing one class of new pixels.
type Stencil = Vec<(isize, isize, f64)>;

/// Stencil for new pixels with row parity `a` and column parity `b` and
/// lines of slope `m` (`y` up).
///
/// Known samples within `REACH` of the pixel along the line are measured by
/// their signed distance `s` across the line. Samples on the line are
/// averaged (nearest only); otherwise the best sample on each side, by
/// `|s| + ALONG_COST |t|`, is interpolated linearly in `s`.
fn projection_stencil(a: usize, b: usize, m: f64) -> Stencil {
    let norm = (1.0 + m * m).sqrt();
    let k = REACH.ceil() as isize + 1;
    let mut on: Vec<(f64, isize, isize)> = Vec::new();
    let mut below: Option<(f64, f64, isize, isize)> = None;
    let mut above: Option<(f64, f64, isize, isize)> = None;
    for di in -k..=k {
        for dj in -k..=k {
            let dx = dj as f64 - b as f64 / 2.0;
            let dy = a as f64 / 2.0 - di as f64;
            let s = (dy - m * dx) / norm;
            let t = (dx + m * dy) / norm;
            if t.abs() > REACH {
                continue;
            }
            let cost = s.abs() + ALONG_COST * t.abs();
            let side = if s.abs() < 1e-9 {
                on.push((t.abs(), di, dj));
                continue;
            } else if s < 0.0 {
                &mut below
            } else {
                &mut above
            };
            if side.is_none_or(|best| cost < best.0) {
                *side = Some((cost, s, di, dj));
            }
        }
    }
    if let Some(nearest) = on.iter().map(|o| o.0).min_by(f64::total_cmp) {
        let picked: Vec<_> = on.iter().filter(|o| o.0 - nearest < 1e-9).collect();
        let w = 1.0 / picked.len() as f64;
        return picked.iter().map(|o| (o.1, o.2, w)).collect();
    }
    let (lo, hi) = (
        below.expect("samples below the line"),
        above.expect("samples above the line"),
    );
    let (dl, dh) = (-lo.1, hi.1);
    vec![(lo.2, lo.3, dh / (dl + dh)), (hi.2, hi.3, dl / (dl + dh))]
}

/// Directional upsampling for lines no steeper than 45 degrees.
fn directional_shallow(img: &Plane, slope: f64) -> Plane {
    let (rows, cols) = img.dims();
    let stencils = [
        projection_stencil(0, 1, slope),
        projection_stencil(1, 0, slope),
        projection_stencil(1, 1, slope),
    ];
    let stencils = &stencils;
    let data: Vec<f64> = (0..2 * rows)
        .into_par_iter()
        .flat_map_iter(|r| {
            (0..2 * cols).map(move |c| {
                let (r0, c0) = (r / 2, c / 2);
                let st = match (r % 2, c % 2) {
                    (0, 0) => return img.get(r0, c0),
                    (0, _) => &stencils[0],
                    (_, 0) => &stencils[1],
                    _ => &stencils[2],
                };
                st.iter()
                    .map(|&(dr, dc, w)| w * ext(img, r0 as isize + dr, c0 as isize + dc))
                    .sum()
            })
        })
        .collect();
    Plane::from_vec(2 * rows, 2 * cols, data).expect("2M x 2N samples")
}

/// Directional 2x upsampling along angle `theta` (radians from the
/// horizontal, counter-clockwise with `y` up).
///
/// Each new pixel is predicted from input samples near the line through it
/// at angle `theta`, by position across that line: an image constant along
/// `theta` is reproduced wherever the line meets input samples. Input
/// samples are kept.
pub fn directional_up2(img: &Plane, theta: f64) -> Plane {
    let theta = theta.rem_euclid(PI);
    let (s, c) = theta.sin_cos();
    if s.abs() <= c.abs() {
        directional_shallow(img, snap_zero(s / c))
    } else {
        // Transposition swaps the axes and maps theta to pi/2 - theta.
        directional_shallow(&img.transpose(), snap_zero(c / s)).transpose()
    }
}

#[inline]
fn snap_zero(x: f64) -> f64 {
    if x.abs() < 1e-12 {
        0.0
    } else {
        x
    }
}
