//! `cyltile`: sample, verify and benchmark the field of cylindrical tiles
//! described in a JSON scene file.

mod output;
mod scene;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use cyltile::oracle::{default_spec, oracle_b_charge, oracle_b_surface};
use cyltile::{
    field_at, field_batch, tensor_at, EvalOptions, EvalPoint, FieldSample, QuadratureError, QuadratureSpec, TensorError,
    Tile,
};
use nalgebra::Vector3;
use rayon::prelude::*;
use thiserror::Error;

use output::{write_rows, Row};
use scene::{Scene, SceneError};

#[derive(Parser)]
#[command(name = "cyltile", version, about = "Magnetic field of uniformly magnetized cylindrical tiles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate B and H at every sample point and write the rows out.
    Field {
        scene: PathBuf,
        /// Overrides the scene's output path.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Compare the closed-form field with brute-force quadrature.
    Verify {
        scene: PathBuf,
        #[arg(long, value_enum, default_value_t = OracleChoice::Both)]
        oracle: OracleChoice,
        /// Largest accepted error, relative to max |B| over each sampling set.
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Time the evaluation of every sample point.
    Bench {
        scene: PathBuf,
        #[arg(long, default_value_t = 5)]
        repeat: usize,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OracleChoice {
    Surface,
    Charge,
    Both,
}

#[derive(Debug, Error)]
enum CliError {
    #[error(transparent)]
    Scene(#[from] SceneError),
    #[error("{0}")]
    Usage(String),
    #[error("writing {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("verification failed")]
    VerifyFailed,
    #[error("evaluation failed: {0}")]
    Evaluation(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Scene(_) | CliError::Usage(_) | CliError::Write { .. } => 1,
            CliError::VerifyFailed => 2,
            CliError::Evaluation(_) => 3,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    let result = match cli.command {
        Command::Field { scene, output } => cmd_field(&scene, output.as_deref()),
        Command::Verify { scene, oracle, tol } => cmd_verify(&scene, oracle, tol),
        Command::Bench { scene, repeat } => cmd_bench(&scene, repeat),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

/// Sampling sets as `(name, points in scene units, points in meters)`.
fn sample_sets(scene: &Scene) -> Vec<(String, Vec<[f64; 3]>, Vec<EvalPoint>)> {
    (0..scene.sampling.len())
        .map(|i| {
            let pts = scene.sampling[i].points();
            let si = pts.iter().map(|p| scene.to_si(p)).collect();
            (scene.set_name(i), pts, si)
        })
        .collect()
}

fn cmd_field(path: &Path, output: Option<&Path>) -> Result<(), CliError> {
    let scene = Scene::load(path)?;
    let tiles = scene.tiles_si();
    let base = output.unwrap_or(&scene.output.path);
    let mut failures = 0;
    for (i, (name, pts, si)) in sample_sets(&scene).into_iter().enumerate() {
        let results = field_batch(&tiles, &si, &EvalOptions::default());
        failures += results.iter().filter(|r| r.is_err()).count();
        let rows: Vec<Row> = pts.iter().zip(&results).map(|(p, r)| Row { point: *p, result: r }).collect();
        let out = scene.output_path(base, i);
        write_rows(&out, scene.output.format, &rows).map_err(|source| CliError::Write {
            path: out.clone(),
            source,
        })?;
        println!("{name}: {} rows -> {}", rows.len(), out.display());
    }
    if failures > 0 {
        println!("{failures} rows could not be evaluated; see the error column");
    }
    Ok(())
}

/// Max and mean of per-point, per-component errors, relative to a scale.
#[derive(Default)]
struct ErrorStats {
    max: [f64; 3],
    sum: [f64; 3],
    n: usize,
}

impl ErrorStats {
    fn add(&mut self, diff: &Vector3<f64>, scale: f64) {
        for c in 0..3 {
            let e = diff[c].abs() / scale;
            self.max[c] = self.max[c].max(e);
            self.sum[c] += e;
        }
        self.n += 1;
    }

    fn overall(&self) -> f64 {
        self.max.iter().cloned().fold(0.0, f64::max)
    }

    fn report(&self, label: &str) -> String {
        let mean = self.sum.map(|s| s / self.n.max(1) as f64);
        format!(
            "  {label:<8} max [{:.3e}, {:.3e}, {:.3e}]  mean [{:.3e}, {:.3e}, {:.3e}]",
            self.max[0], self.max[1], self.max[2], mean[0], mean[1], mean[2]
        )
    }
}

type OracleFn = fn(&Tile, &EvalPoint, &QuadratureSpec) -> Result<Vector3<f64>, QuadratureError>;

fn oracle_b(tiles: &[Tile], p: &EvalPoint, f: OracleFn) -> Result<Vector3<f64>, String> {
    let spec = default_spec();
    tiles.iter().try_fold(Vector3::zeros(), |acc, t| Ok(acc + f(t, p, &spec).map_err(|e| e.to_string())?))
}

/// Whether the guard moved `p` for any tile.
fn guarded(tiles: &[Tile], p: &EvalPoint) -> Result<bool, TensorError> {
    for t in tiles {
        if tensor_at(t, p)?.guard.triggered {
            return Ok(true);
        }
    }
    Ok(false)
}

fn cmd_verify(path: &Path, oracle: OracleChoice, tol: f64) -> Result<(), CliError> {
    if !(tol >= 0.0) {
        return Err(CliError::Usage(format!("--tol must be non-negative, got {tol}")));
    }
    let scene = Scene::load(path)?;
    let tiles = scene.tiles_si();
    let mut oracles: Vec<(&str, OracleFn)> = Vec::new();
    if oracle != OracleChoice::Charge {
        oracles.push(("surface", oracle_b_surface));
    }
    if oracle != OracleChoice::Surface {
        oracles.push(("charge", oracle_b_charge));
    }
    let mut worst: f64 = 0.0;
    for (name, _, si) in sample_sets(&scene) {
        let analytic: Vec<FieldSample> = field_batch(&tiles, &si, &EvalOptions::default())
            .into_iter()
            .collect::<Result<_, _>>()
            .map_err(|e| CliError::Evaluation(e.to_string()))?;
        let nudged = si
            .iter()
            .map(|p| guarded(&tiles, p))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| CliError::Evaluation(e.to_string()))?
            .into_iter()
            .filter(|&g| g)
            .count();
        println!("{name}: {} points, {nudged} nudged", si.len());
        for (label, f) in &oracles {
            let reference: Vec<Vector3<f64>> = si
                .par_iter()
                .map(|p| oracle_b(&tiles, p, *f))
                .collect::<Result<_, _>>()
                .map_err(CliError::Evaluation)?;
            let scale = reference.iter().map(|b| b.amax()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
            let mut stats = ErrorStats::default();
            for (s, r) in analytic.iter().zip(&reference) {
                stats.add(&(s.b - r), scale);
            }
            worst = worst.max(stats.overall());
            println!("{}", stats.report(label));
        }
    }
    // Strict comparison: a zero tolerance always fails.
    let pass = worst < tol;
    println!("max error {worst:.3e}, tolerance {tol:.1e}: {}", if pass { "PASS" } else { "FAIL" });
    if pass {
        Ok(())
    } else {
        Err(CliError::VerifyFailed)
    }
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn cmd_bench(path: &Path, repeat: usize) -> Result<(), CliError> {
    if repeat == 0 {
        return Err(CliError::Usage("--repeat must be at least 1".into()));
    }
    let scene = Scene::load(path)?;
    let tiles = scene.tiles_si();
    let points: Vec<EvalPoint> = sample_sets(&scene).into_iter().flat_map(|(_, _, si)| si).collect();
    let opts = EvalOptions::default();
    let mut serial = Vec::with_capacity(repeat);
    let mut parallel = Vec::with_capacity(repeat);
    for _ in 0..repeat {
        let start = Instant::now();
        for p in &points {
            std::hint::black_box(field_at(&tiles, p).map_err(|e| CliError::Evaluation(e.to_string()))?);
        }
        serial.push(start.elapsed().as_secs_f64());
        let start = Instant::now();
        std::hint::black_box(field_batch(&tiles, &points, &opts));
        parallel.push(start.elapsed().as_secs_f64());
    }
    let label = if repeat == 1 { "time" } else { "median" };
    let n = points.len() as f64;
    println!("{} points, {} tiles, {repeat} runs", points.len(), tiles.len());
    for (mode, times) in [("single-threaded", &mut serial), ("parallel", &mut parallel)] {
        let t = if repeat == 1 { times[0] } else { median(times) };
        println!("  {mode:<16} {label} {t:.6} s total, {:.3} us/point", t / n * 1e6);
    }
    Ok(())
}
