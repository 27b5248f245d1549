//! Benchmark protocol: degrade a pristine image, superresolve it with each
//! method, and score the result against the pristine image.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;

use crate::blocks::{BlockConfig, BlockFamily};
use crate::error::{Error, Result};
use crate::ffst::ShearletSystem;
use crate::image::{
    gen_circle, gen_half_plane, gen_parabola, load_pgm, psnr, save_pgm, GrayImage, Plane,
};
use crate::resample::{bicubic_up2, mix_seed, DegradationSpec};
use crate::sme::{superresolve, DetailFrame, SolverOptions, DEFAULT_LAMBDA};

/// Side of the synthetic presets.
pub const PRESET_SIZE: usize = 256;
/// Shearlet scales used for superresolution. Only the finest scale enters
/// the mixing. With one scale the low-pass is close to DC only, and the
/// finest bands would also carry the smooth content.
pub const DEFAULT_SR_SCALES: usize = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Method {
    Bicubic,
    SmeShearlet,
    SmeWavelet,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Bicubic, Method::SmeShearlet, Method::SmeWavelet];

    pub fn name(self) -> &'static str {
        match self {
            Method::Bicubic => "bicubic",
            Method::SmeShearlet => "sme-shearlet",
            Method::SmeWavelet => "sme-wavelet",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s.trim())
            .ok_or_else(|| {
                Error::Parse(format!(
                    "unknown method {s:?}; expected bicubic, sme-wavelet or sme-shearlet"
                ))
            })
    }
}

/// Synthetic preset name or a PGM path.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InputSource {
    Preset(String),
    Path(PathBuf),
}

pub const PRESETS: [&str; 3] = ["circle", "parabola", "plane"];

impl InputSource {
    pub fn parse(s: &str) -> Self {
        if PRESETS.contains(&s) || s == "constant" {
            InputSource::Preset(s.to_owned())
        } else {
            InputSource::Path(PathBuf::from(s))
        }
    }

    pub fn name(&self) -> String {
        match self {
            InputSource::Preset(n) => n.clone(),
            InputSource::Path(p) => p
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| p.display().to_string()),
        }
    }

    pub fn load(&self) -> Result<GrayImage> {
        match self {
            InputSource::Preset(n) => preset(n),
            InputSource::Path(p) => load_pgm(p),
        }
    }
}

/// The synthetic test images at their benchmark settings.
pub fn preset(name: &str) -> Result<GrayImage> {
    match name {
        "plane" => gen_half_plane(PRESET_SIZE, crate::image::DEFAULT_PLANE_SLOPE),
        "circle" => gen_circle(PRESET_SIZE, crate::image::DEFAULT_RADIUS_FRACTION),
        "parabola" => gen_parabola(PRESET_SIZE, crate::image::DEFAULT_CURVATURE),
        "constant" => Ok(GrayImage::constant(PRESET_SIZE, PRESET_SIZE, 0.5)),
        other => Err(Error::InvalidArgument(format!("unknown preset {other:?}"))),
    }
}

/// Region `x, y, w, h` of an output image to save separately.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Crop {
    pub x: usize,
    pub y: usize,
    pub w: usize,
    pub h: usize,
}

impl FromStr for Crop {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let v: Vec<usize> = s
            .split(',')
            .map(|t| t.trim().parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::Parse(format!("crop {s:?}; expected x,y,w,h")))?;
        match v[..] {
            [x, y, w, h] if w > 0 && h > 0 => Ok(Crop { x, y, w, h }),
            _ => Err(Error::Parse(format!(
                "crop {s:?}; expected x,y,w,h with w, h > 0"
            ))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub inputs: Vec<InputSource>,
    pub methods: Vec<Method>,
    pub degradations: Vec<DegradationSpec>,
    pub lambda: f64,
    /// Shearlet scale count.
    pub scales: usize,
    pub seed: u64,
    pub out_dir: Option<PathBuf>,
    pub crop: Option<Crop>,
    pub blocks: BlockConfig,
    pub solver: SolverOptions,
    /// Write the solved weights next to the output images.
    pub dump_weights: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            inputs: PRESETS
                .iter()
                .map(|p| InputSource::Preset((*p).to_owned()))
                .collect(),
            methods: Method::ALL.to_vec(),
            degradations: vec![DegradationSpec::DOWNSAMPLE],
            lambda: DEFAULT_LAMBDA,
            scales: DEFAULT_SR_SCALES,
            seed: 0,
            out_dir: None,
            crop: None,
            blocks: BlockConfig::default(),
            solver: SolverOptions::default(),
            dump_weights: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReportRow {
    pub image: String,
    pub degradation: String,
    pub method: String,
    pub psnr_db: f64,
}

/// A row that could not be produced.
#[derive(Clone, Debug, PartialEq)]
pub struct RowFailure {
    pub image: String,
    pub degradation: String,
    pub method: Option<String>,
    pub message: String,
}

impl fmt::Display for RowFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} / {}", self.image, self.degradation)?;
        if let Some(m) = &self.method {
            write!(f, " / {m}")?;
        }
        write!(f, ": {}", self.message)
    }
}

#[derive(Clone, Debug, Default)]
pub struct RunOutput {
    pub rows: Vec<ReportRow>,
    pub failures: Vec<RowFailure>,
}

/// Superresolves `y` by two with one method.
pub fn upscale(method: Method, y: &Plane, cfg: &RunConfig) -> Result<(GrayImage, Option<String>)> {
    match method {
        Method::Bicubic => Ok((GrayImage::clamped(bicubic_up2(y)), None)),
        Method::SmeWavelet => {
            let frame = DetailFrame::wavelet(y)?;
            let (m, n) = frame.grid();
            let family = BlockFamily::with_config(m, n, frame.channel_ids(), &cfg.blocks)?;
            let (out, w) = superresolve(y, &frame, &family, cfg.lambda, &cfg.solver)?;
            Ok((out, cfg.dump_weights.then(|| w.dump(&family))))
        }
        Method::SmeShearlet => {
            let system = ShearletSystem::new(y.rows(), y.cols(), cfg.scales)?;
            let frame = DetailFrame::shearlet(system, y)?;
            let (m, n) = frame.grid();
            let family = BlockFamily::with_config(m, n, frame.channel_ids(), &cfg.blocks)?;
            let (out, w) = superresolve(y, &frame, &family, cfg.lambda, &cfg.solver)?;
            Ok((out, cfg.dump_weights.then(|| w.dump(&family))))
        }
    }
}

/// FNV-1a, used to give every image its own noise stream.
fn name_stream(name: &str) -> u64 {
    name.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
        (h ^ b as u64).wrapping_mul(0x100_0000_01b3)
    })
}

fn file_stem(image: &str, deg: &str, method: &str) -> String {
    let deg: String = deg
        .chars()
        .map(|c| match c {
            '+' => '_',
            ':' => '-',
            c => c,
        })
        .collect();
    format!("{image}__{deg}__{method}")
}

struct Job {
    index: usize,
    image: String,
    source: InputSource,
    spec: DegradationSpec,
}

/// Runs every image x degradation x method combination. Failures abort only
/// their own row.
pub fn run_pipeline(cfg: &RunConfig) -> RunOutput {
    if let Some(dir) = &cfg.out_dir {
        if let Err(e) = fs::create_dir_all(dir) {
            return RunOutput {
                rows: Vec::new(),
                failures: vec![RowFailure {
                    image: "*".into(),
                    degradation: "*".into(),
                    method: None,
                    message: format!("cannot create {}: {e}", dir.display()),
                }],
            };
        }
    }
    let mut jobs = Vec::new();
    for source in &cfg.inputs {
        for &spec in &cfg.degradations {
            jobs.push(Job {
                index: jobs.len(),
                image: source.name(),
                source: source.clone(),
                spec,
            });
        }
    }
    let results: Vec<(usize, Vec<ReportRow>, Vec<RowFailure>)> = jobs
        .par_iter()
        .map(|job| {
            let (rows, failures) = run_job(job, cfg);
            (job.index, rows, failures)
        })
        .collect();

    let mut out = RunOutput::default();
    for (_, rows, failures) in results {
        out.rows.extend(rows);
        out.failures.extend(failures);
    }
    sort_rows(&mut out.rows);
    out
}

fn run_job(job: &Job, cfg: &RunConfig) -> (Vec<ReportRow>, Vec<RowFailure>) {
    let deg = job.spec.to_string();
    let fail = |method: Option<Method>, e: Error| RowFailure {
        image: job.image.clone(),
        degradation: deg.clone(),
        method: method.map(|m| m.name().to_owned()),
        message: e.to_string(),
    };
    let prepared = job.source.load().and_then(|truth| {
        let y = job
            .spec
            .apply(truth.plane(), cfg.seed, name_stream(&job.image))?;
        Ok((truth, y))
    });
    let (truth, y) = match prepared {
        Ok(v) => v,
        Err(e) => return (Vec::new(), vec![fail(None, e)]),
    };
    let (mut rows, mut failures) = (Vec::new(), Vec::new());
    for &method in &cfg.methods {
        let result = upscale(method, y.plane(), cfg).and_then(|(img, dump)| {
            let score = psnr(truth.plane(), img.plane())?;
            if let Some(dir) = &cfg.out_dir {
                let stem = file_stem(&job.image, &deg, method.name());
                save_pgm(&img, dir.join(format!("{stem}.pgm")))?;
                if let Some(c) = cfg.crop {
                    let part = img.plane().crop(c.y, c.x, c.h, c.w)?;
                    save_pgm(
                        &GrayImage::clamped(part),
                        dir.join(format!("{stem}__crop.pgm")),
                    )?;
                }
                if let Some(text) = dump {
                    fs::write(dir.join(format!("{stem}.weights.txt")), text)?;
                }
            }
            Ok(score)
        });
        match result {
            Ok(score) => rows.push(ReportRow {
                image: job.image.clone(),
                degradation: deg.clone(),
                method: method.name().to_owned(),
                psnr_db: score,
            }),
            Err(e) => failures.push(fail(Some(method), e)),
        }
    }
    (rows, failures)
}

/// Orders rows by image, degradation, then method.
pub fn sort_rows(rows: &mut [ReportRow]) {
    rows.sort_by(|a, b| {
        (&a.image, &a.degradation, &a.method).cmp(&(&b.image, &b.degradation, &b.method))
    });
}

pub const CSV_HEADER: &str = "image,degradation,method,psnr_db";

fn format_psnr(v: f64) -> String {
    if v.is_infinite() && v > 0.0 {
        "inf".to_owned()
    } else {
        format!("{v:.4}")
    }
}

/// CSV report with a header line, rows sorted.
pub fn emit_csv(rows: &[ReportRow]) -> String {
    let mut rows = rows.to_vec();
    sort_rows(&mut rows);
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in &rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            r.image,
            r.degradation,
            r.method,
            format_psnr(r.psnr_db)
        ));
    }
    out
}

/// Aligned text table, one line per row.
pub fn emit_table(rows: &[ReportRow]) -> String {
    let mut rows = rows.to_vec();
    sort_rows(&mut rows);
    let header = ["image", "degradation", "method", "psnr_db"];
    let cells: Vec<[String; 4]> = rows
        .iter()
        .map(|r| {
            [
                r.image.clone(),
                r.degradation.clone(),
                r.method.clone(),
                format_psnr(r.psnr_db),
            ]
        })
        .collect();
    let mut width = header.map(str::len);
    for row in &cells {
        for (w, c) in width.iter_mut().zip(row) {
            *w = (*w).max(c.len());
        }
    }
    let line = |row: [&str; 4]| {
        format!(
            "{:<w0$}  {:<w1$}  {:<w2$}  {:>w3$}\n",
            row[0],
            row[1],
            row[2],
            row[3],
            w0 = width[0],
            w1 = width[1],
            w2 = width[2],
            w3 = width[3]
        )
    };
    let mut out = line(header);
    for row in &cells {
        out.push_str(&line([&row[0], &row[1], &row[2], &row[3]]));
    }
    out
}

/// Reads a report written by [`emit_csv`].
pub fn parse_csv(text: &str) -> Result<Vec<ReportRow>> {
    let mut lines = text.lines();
    if lines.next().map(str::trim) != Some(CSV_HEADER) {
        return Err(Error::Parse(
            "report must start with the header line".into(),
        ));
    }
    lines
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            let [image, degradation, method, psnr] = f[..] else {
                return Err(Error::Parse(format!("report line {l:?} needs four fields")));
            };
            let psnr_db = if psnr == "inf" {
                f64::INFINITY
            } else {
                psnr.parse()
                    .map_err(|_| Error::Parse(format!("bad PSNR {psnr:?}")))?
            };
            Ok(ReportRow {
                image: image.to_owned(),
                degradation: degradation.to_owned(),
                method: method.to_owned(),
                psnr_db,
            })
        })
        .collect()
}

/// Writes the CSV report, creating parent directories.
pub fn write_report(path: &Path, rows: &[ReportRow]) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    fs::write(path, emit_csv(rows))?;
    Ok(())
}

/// Stream index mixed into the noise seed for `image`.
pub fn noise_stream(image: &str, seed: u64) -> u64 {
    mix_seed(seed, name_stream(image))
}
