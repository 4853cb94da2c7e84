//! The three batch commands: simulate, image, compare.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use serde::Serialize;

use rtomo::dataset::{read_dataset, read_raw_image, write_dataset, write_raw_image};
use rtomo::report::SolverReport;
use rtomo::sim::simulate;
use rtomo::solvers::FistaConfig;
use rtomo::{cadmm, jsc};
use rtomo::{CadmmConfig64, ClusterOperator64, JscConfig64, MeasurementSet64, SceneGrid64};

use crate::metrics::{self, ImageMetrics};
use crate::pgm;
use crate::scene::SceneSpec;

/// Which imaging algorithm `image` should run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Algo {
    /// Incoherent sum of per-cluster back-projections.
    Bp,
    /// Joint sparsity constraint: per-cluster l1 solves, max fusion.
    Jsc,
    /// Consensus ADMM fusion across clusters.
    Cadmm,
}

impl fmt::Display for Algo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Algo::Bp => write!(f, "bp"),
            Algo::Jsc => write!(f, "jsc"),
            Algo::Cadmm => write!(f, "cadmm"),
        }
    }
}

/// Everything one imaging run needs.
#[derive(Debug, Clone)]
pub struct RunManifest {
    pub data: PathBuf,
    pub algo: Algo,
    pub mu: f64,
    pub beta: f64,
    pub eps: f64,
    pub t_max: usize,
    /// Overrides the grid embedded in the dataset, if given.
    pub grid: Option<SceneGrid64>,
    pub floor_db: f64,
    pub out_dir: PathBuf,
    pub threads: Option<usize>,
}

impl RunManifest {
    pub fn validate(&self) -> Result<()> {
        ensure!(!self.data.as_os_str().is_empty(), "dataset path is empty");
        ensure!(
            !self.out_dir.as_os_str().is_empty(),
            "output directory path is empty"
        );
        ensure!(
            self.floor_db.is_finite() && self.floor_db < 0.0,
            "display floor must be a negative decibel value, got {}",
            self.floor_db
        );
        for (name, v) in [("mu", self.mu), ("beta", self.beta), ("eps", self.eps)] {
            ensure!(
                v.is_finite() && v > 0.0,
                "{name} must be positive and finite, got {v}"
            );
        }
        ensure!(self.t_max >= 1, "tmax must be at least 1");
        if let Some(threads) = self.threads {
            ensure!(threads >= 1, "threads must be at least 1");
        }
        Ok(())
    }
}

/// Parses `<nx>x<ny>:<xmin>,<xmax>,<ymin>,<ymax>`.
pub fn parse_grid(text: &str) -> Result<SceneGrid64> {
    let (shape, extents) = text
        .split_once(':')
        .with_context(|| format!("grid `{text}` is missing the `:` separator"))?;
    let (nx, ny) = shape
        .split_once('x')
        .with_context(|| format!("grid shape `{shape}` is not <nx>x<ny>"))?;
    let nx: usize = nx
        .parse()
        .with_context(|| format!("bad pixel count `{nx}`"))?;
    let ny: usize = ny
        .parse()
        .with_context(|| format!("bad pixel count `{ny}`"))?;
    let bounds: Vec<f64> = extents
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .with_context(|| format!("bad grid extent `{s}`"))
        })
        .collect::<Result<_>>()?;
    ensure!(
        bounds.len() == 4,
        "grid extents need exactly xmin,xmax,ymin,ymax; got {} values",
        bounds.len()
    );
    SceneGrid64::new(nx, ny, bounds[0], bounds[1], bounds[2], bounds[3])
        .with_context(|| format!("grid `{text}` is not usable"))
}

/// Simulates the scene file into a dataset. Prints per-cluster sample
/// counts so a spec mistake is visible immediately.
pub fn cmd_simulate(spec_path: &Path, out_path: &Path) -> Result<()> {
    let spec = SceneSpec::load(spec_path)?;
    let (sim, grid) = spec.build()?;
    let sets = simulate(&sim).context("simulation failed")?;
    write_dataset(out_path, &sets, grid.as_ref())
        .with_context(|| format!("cannot write {}", out_path.display()))?;
    let mut total = 0;
    for (i, set) in sets.iter().enumerate() {
        let g = set.geometry();
        println!(
            "cluster {i}: {} azimuths x {} tones = {} samples",
            g.num_azimuths(),
            g.waveform().num_freqs(),
            g.num_samples()
        );
        total += g.num_samples();
    }
    println!(
        "wrote {} ({} clusters, {} samples)",
        out_path.display(),
        sets.len(),
        total
    );
    Ok(())
}

struct AlgoRun {
    magnitudes: Vec<f64>,
    log: String,
    converged: bool,
    summary: String,
}

/// Images a dataset per the manifest. Writes the raw magnitude image, the
/// graymap, and the solver log regardless of convergence; the returned
/// flag is `false` when the algorithm hit its iteration cap short of the
/// tolerance.
pub fn cmd_image(manifest: &RunManifest) -> Result<bool> {
    manifest.validate()?;
    let (sets, embedded_grid) = read_dataset(&manifest.data)
        .with_context(|| format!("cannot read dataset {}", manifest.data.display()))?;
    let grid = match manifest.grid.or(embedded_grid) {
        Some(g) => g,
        None => bail!(
            "dataset {} embeds no grid; pass --grid <nx>x<ny>:<xmin>,<xmax>,<ymin>,<ymax>",
            manifest.data.display()
        ),
    };
    let ops: Vec<ClusterOperator64> = sets
        .iter()
        .map(|s| ClusterOperator64::matrix_free(s.geometry().clone(), grid))
        .collect();

    let run_algo = || run_algorithm(manifest, &ops, &sets);
    let run = match manifest.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .context("cannot build thread pool")?
            .install(run_algo),
        None => run_algo(),
    }?;

    fs::create_dir_all(&manifest.out_dir)
        .with_context(|| format!("cannot create {}", manifest.out_dir.display()))?;
    let raw_path = manifest.out_dir.join("magnitude.rimg");
    let pgm_path = manifest.out_dir.join("magnitude.pgm");
    let log_path = manifest.out_dir.join("report.log");
    write_raw_image(&raw_path, &grid, &run.magnitudes)
        .with_context(|| format!("cannot write {}", raw_path.display()))?;
    pgm::write_pgm(&pgm_path, &grid, &run.magnitudes, manifest.floor_db)?;
    fs::write(&log_path, &run.log).with_context(|| format!("cannot write {}", log_path.display()))?;

    println!("{}", run.summary);
    println!(
        "wrote {}, {}, {}",
        raw_path.display(),
        pgm_path.display(),
        log_path.display()
    );
    Ok(run.converged)
}

fn run_algorithm(
    manifest: &RunManifest,
    ops: &[ClusterOperator64],
    sets: &[MeasurementSet64],
) -> Result<AlgoRun> {
    match manifest.algo {
        Algo::Bp => {
            let mut magnitudes = vec![0.0; ops[0].num_pixels()];
            for (op, set) in ops.iter().zip(sets) {
                let bp = op.apply_adjoint(set.samples())?;
                for (acc, z) in magnitudes.iter_mut().zip(&bp) {
                    *acc += z.norm();
                }
            }
            Ok(AlgoRun {
                magnitudes,
                log: SolverReport::<f64>::new().to_log(),
                converged: true,
                summary: format!("bp: {} clusters back-projected", ops.len()),
            })
        }
        Algo::Jsc => {
            let cfg = JscConfig64 {
                mu: manifest.mu,
                fista: FistaConfig {
                    max_iters: manifest.t_max,
                    rel_tol: manifest.eps,
                    ..FistaConfig::default()
                },
            };
            let out = jsc::run(ops, sets, &cfg)?;
            let mut log = SolverReport::<f64>::new().to_log();
            let mut inner_total = 0;
            for (i, report) in out.reports.iter().enumerate() {
                log.push_str(&format!(
                    "# cluster {i}: {} inner iterations, converged {}\n",
                    report.iterations, report.converged
                ));
                inner_total += report.iterations;
            }
            Ok(AlgoRun {
                magnitudes: out.fused,
                log,
                converged: out.converged,
                summary: format!(
                    "jsc: {} clusters, {} inner iterations, converged {}",
                    ops.len(),
                    inner_total,
                    out.converged
                ),
            })
        }
        Algo::Cadmm => {
            let cfg = CadmmConfig64 {
                mu: manifest.mu,
                beta: manifest.beta,
                eps: manifest.eps,
                t_max: manifest.t_max,
                ..CadmmConfig64::default()
            };
            let out = cadmm::run(ops, sets, &cfg)?;
            let summary = match (out.report.converged, out.report.records.last()) {
                (true, Some(last)) => format!("cadmm: converged in {} iterations", last.t),
                (false, Some(last)) => format!(
                    "cadmm: no convergence within {} iterations (eta_pri {:.3e}, eta_dual {:.3e})",
                    manifest.t_max, last.eta_pri, last.eta_dual
                ),
                (_, None) => "cadmm: no iterations ran".to_string(),
            };
            Ok(AlgoRun {
                magnitudes: out.global.magnitudes(),
                log: out.report.to_log(),
                converged: out.report.converged,
                summary,
            })
        }
    }
}

#[derive(Serialize)]
struct NamedMetrics {
    path: String,
    #[serde(flatten)]
    metrics: ImageMetrics,
}

#[derive(Serialize)]
struct CompareReport {
    radius_m: f64,
    a: NamedMetrics,
    b: NamedMetrics,
    /// Positive when image `a` leaks more artifact energy than `b`.
    a_minus_b_db: f64,
}

/// Compares two images on the same grid against the true scatterer
/// positions of a scene file and prints a JSON report.
pub fn cmd_compare(
    a_path: &Path,
    b_path: &Path,
    truth_path: &Path,
    radius_m: Option<f64>,
) -> Result<()> {
    let (grid_a, values_a) = read_raw_image(a_path)
        .with_context(|| format!("cannot read image {}", a_path.display()))?;
    let (grid_b, values_b) = read_raw_image(b_path)
        .with_context(|| format!("cannot read image {}", b_path.display()))?;
    ensure!(
        grids_identical(&grid_a, &grid_b),
        "images live on different grids: {} is {}x{} over [{}, {}]x[{}, {}], {} is {}x{} over [{}, {}]x[{}, {}]",
        a_path.display(),
        grid_a.nx(),
        grid_a.ny(),
        grid_a.x_min(),
        grid_a.x_max(),
        grid_a.y_min(),
        grid_a.y_max(),
        b_path.display(),
        grid_b.nx(),
        grid_b.ny(),
        grid_b.x_min(),
        grid_b.x_max(),
        grid_b.y_min(),
        grid_b.y_max(),
    );

    let truth = SceneSpec::load(truth_path)?;
    let positions = truth.ground_positions();
    ensure!(
        !positions.is_empty(),
        "truth scene {} has no scatterers",
        truth_path.display()
    );
    // Default: three pixel pitches around each true position, enough to
    // absorb peak quantization without swallowing displaced artifacts.
    let radius = radius_m.unwrap_or_else(|| 3.0 * grid_a.pitch_x().max(grid_a.pitch_y()));

    let metrics_a = metrics::evaluate(&grid_a, &values_a, &positions, radius)?;
    let metrics_b = metrics::evaluate(&grid_b, &values_b, &positions, radius)?;
    let report = CompareReport {
        radius_m: radius,
        a_minus_b_db: metrics_a.artifact_to_signal_db - metrics_b.artifact_to_signal_db,
        a: NamedMetrics {
            path: a_path.display().to_string(),
            metrics: metrics_a,
        },
        b: NamedMetrics {
            path: b_path.display().to_string(),
            metrics: metrics_b,
        },
    };
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}

fn grids_identical(a: &SceneGrid64, b: &SceneGrid64) -> bool {
    a.nx() == b.nx()
        && a.ny() == b.ny()
        && a.x_min() == b.x_min()
        && a.x_max() == b.x_max()
        && a.y_min() == b.y_min()
        && a.y_max() == b.y_max()
}
