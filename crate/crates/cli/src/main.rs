use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use shearsr::bench::{
    emit_table, run_pipeline, write_report, Crop, InputSource, Method, RunConfig, PRESETS,
};
use shearsr::blocks::BlockConfig;
use shearsr::ffst::ShearletSystem;
use shearsr::resample::DegradationSpec;
use shearsr::sme::{SolverOptions, DEFAULT_LAMBDA};

/// Degrade images, superresolve them 2x and report PSNR per method.
#[derive(Debug, Parser)]
#[command(name = "shearsr", version)]
struct Args {
    /// Preset (plane, circle, parabola, constant) or PGM path; comma list or repeated.
    #[arg(long, value_delimiter = ',')]
    input: Vec<String>,

    /// Methods to run: bicubic, sme-wavelet, sme-shearlet.
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "bicubic,sme-wavelet,sme-shearlet"
    )]
    methods: Vec<Method>,

    /// Degradation, `ds[+blur][+noise:<seed>]`; repeatable. `all` expands to
    /// the four benchmark regimes seeded with --seed.
    #[arg(long, default_value = "ds")]
    degrade: Vec<String>,

    /// Mixing regularization weight (dimensionless).
    #[arg(long, default_value_t = DEFAULT_LAMBDA)]
    lambda: f64,

    /// Shearlet scale count.
    #[arg(long, default_value_t = shearsr::bench::DEFAULT_SR_SCALES)]
    scales: usize,

    /// Coordinate-descent sweep limit.
    #[arg(long, default_value_t = SolverOptions::default().max_sweeps)]
    sweeps: usize,

    /// Seed for noise when a degradation gives none.
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Directory for superresolved PGMs.
    #[arg(long)]
    out: Option<PathBuf>,

    /// CSV report path.
    #[arg(long)]
    report: Option<PathBuf>,

    /// Also save the region x,y,w,h of every output image.
    #[arg(long)]
    crop: Option<Crop>,

    /// Write shearlet filters and coefficient planes of each input to
    /// <out>/bands.
    #[arg(long)]
    dump_bands: bool,

    /// Block shape/angle config file (key = value lines).
    #[arg(long)]
    blocks: Option<PathBuf>,

    /// Write solved mixing weights next to the output images.
    #[arg(long)]
    dump_weights: bool,
}

fn configure_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("SHEARSR_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .map_err(|_| format!("SHEARSR_THREADS must be a positive integer, got {v:?}"))?;
    if n == 0 {
        return Err("SHEARSR_THREADS must be positive".into());
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn config(args: &Args) -> Result<RunConfig, String> {
    let mut degradations = Vec::new();
    for d in &args.degrade {
        if d == "all" {
            degradations.extend(DegradationSpec::presets(args.seed));
        } else {
            degradations.push(d.parse::<DegradationSpec>().map_err(|e| e.to_string())?);
        }
    }
    let blocks = match &args.blocks {
        Some(p) => fs::read_to_string(p)
            .map_err(|e| format!("{}: {e}", p.display()))?
            .parse::<BlockConfig>()
            .map_err(|e| e.to_string())?,
        None => BlockConfig::default(),
    };
    if !(args.lambda >= 0.0) {
        return Err(format!("--lambda must be nonnegative, got {}", args.lambda));
    }
    let inputs = if args.input.is_empty() {
        PRESETS
            .iter()
            .map(|p| InputSource::Preset((*p).to_owned()))
            .collect()
    } else {
        args.input.iter().map(|s| InputSource::parse(s)).collect()
    };
    Ok(RunConfig {
        inputs,
        methods: args.methods.clone(),
        degradations,
        lambda: args.lambda,
        scales: args.scales,
        seed: args.seed,
        out_dir: args.out.clone(),
        crop: args.crop,
        blocks,
        solver: SolverOptions {
            max_sweeps: args.sweeps,
            ..SolverOptions::default()
        },
        dump_weights: args.dump_weights,
    })
}

fn dump_bands(cfg: &RunConfig, out: &std::path::Path) -> Result<(), String> {
    let dir = out.join("bands");
    for source in &cfg.inputs {
        let img = source.load().map_err(|e| e.to_string())?;
        let sys = ShearletSystem::new(img.height(), img.width(), cfg.scales)
            .map_err(|e| e.to_string())?;
        let name = source.name();
        sys.dump_filters(&dir.join(format!("{name}_filters")))
            .and_then(|_| sys.analyze(img.plane()))
            .and_then(|c| c.dump(&dir, &name))
            .map_err(|e| e.to_string())?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = Args::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    let cfg = match config(&args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if args.dump_bands {
        let Some(out) = &cfg.out_dir else {
            eprintln!("error: --dump-bands needs --out");
            return ExitCode::from(2);
        };
        if let Err(e) = dump_bands(&cfg, out) {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }

    let result = run_pipeline(&cfg);
    print!("{}", emit_table(&result.rows));
    if let Some(path) = &args.report {
        if let Err(e) = write_report(path, &result.rows) {
            eprintln!("error: {}: {e}", path.display());
            return ExitCode::from(2);
        }
    }
    for f in &result.failures {
        eprintln!("row aborted: {f}");
    }
    if result.failures.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
