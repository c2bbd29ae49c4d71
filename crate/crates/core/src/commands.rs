//! File-writing entry points behind the command-line subcommands. Every CSV
//! file starts with the resolved configuration as `# key=value` lines,
//! followed by the data block of its format; JSON files hold the
//! configuration as their first member. All functions return the paths
//! written together with any error tables.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::error::{Error, Result};
use crate::harmonics::{SphereGrid, Synthesizer};
use crate::harness::{
    analytic_weak_experiment, pathwise_error_experiment, strong_error_experiment,
    weak_error_experiment, Equation, ErrorTable,
};
use crate::noise::sample_isotropic_grf;
use crate::rng::stream;
use crate::schrodinger::run_path_schrodinger;
use crate::spectrum::CoefficientField;
use crate::trajectory::Trajectory;
use crate::wave::run_path;

fn write_file(
    cfg: &ExperimentConfig,
    name: &str,
    body: impl FnOnce(&mut BufWriter<File>) -> Result<()>,
) -> Result<PathBuf> {
    fs::create_dir_all(&cfg.output)?;
    let path = cfg.output.join(name);
    let mut out = BufWriter::new(File::create(&path)?);
    out.write_all(cfg.header().as_bytes())?;
    body(&mut out)?;
    out.flush()?;
    Ok(path)
}

fn write_field_grid(
    cfg: &ExperimentConfig,
    name: &str,
    field: &CoefficientField,
) -> Result<PathBuf> {
    let grid = Arc::new(cfg.grid()?);
    let values = Synthesizer::new(grid, field.band()).synthesize(field)?;
    write_file(cfg, name, |out| values.write_csv(out))
}

/// Files written by a command and the tables they contain.
#[derive(Debug, Default)]
pub struct Outputs {
    pub paths: Vec<PathBuf>,
    pub tables: Vec<ErrorTable>,
}

#[derive(Serialize)]
struct TablesJson<'a> {
    config: &'a ExperimentConfig,
    tables: &'a [ErrorTable],
}

/// Writes `<stem>_<statistic>_<part>.csv` per table and `<stem>.json` with
/// the configuration and every table.
fn write_tables(cfg: &ExperimentConfig, stem: &str, tables: Vec<ErrorTable>) -> Result<Outputs> {
    let mut paths = Vec::new();
    for t in &tables {
        let stat = t.statistic.rsplit('/').next().unwrap_or(&t.statistic);
        let name = format!("{stem}_{stat}_{}.csv", t.part.name());
        paths.push(write_file(cfg, &name, |out| t.write_csv(out))?);
    }
    // JSON has no comments; the leading `config` member plays the header's role
    let path = cfg.output.join(format!("{stem}.json"));
    let mut out = BufWriter::new(File::create(&path)?);
    serde_json::to_writer_pretty(
        &mut out,
        &TablesJson {
            config: cfg,
            tables: &tables,
        },
    )?;
    writeln!(out)?;
    out.flush()?;
    paths.push(path);
    Ok(Outputs { paths, tables })
}

/// Simulates sample 0 at band `kappa-ref`; writes `trajectory.csv` and, on
/// `S^2`, the synthesized final first field as `final_field.csv`.
pub fn cmd_simulate(cfg: &ExperimentConfig) -> Result<Outputs> {
    let spec = cfg.path_spec()?;
    let traj: Trajectory = match cfg.equation() {
        Equation::Wave => run_path(&spec)?,
        Equation::Schrodinger => run_path_schrodinger(&spec)?,
    };
    let mut paths = vec![write_file(cfg, "trajectory.csv", |out| {
        traj.write_csv(out)
    })?];
    if cfg.d == 3 {
        let last = traj
            .last()
            .ok_or_else(|| Error::Config("empty trajectory".into()))?;
        paths.push(write_field_grid(cfg, "final_field.csv", &last.first)?);
    }
    Ok(Outputs {
        paths,
        tables: Vec::new(),
    })
}

/// Mean-square truncation errors for every configured error kind.
pub fn cmd_convergence(cfg: &ExperimentConfig) -> Result<Outputs> {
    let setup = cfg.setup()?;
    let grid = grid_for(cfg)?;
    let tables = strong_error_experiment(&setup, &cfg.error_kinds, grid.as_ref())?;
    write_tables(cfg, "convergence", tables)
}

/// Weak errors by Monte Carlo for every configured functional, plus the
/// closed-form squared-norm errors.
pub fn cmd_weak(cfg: &ExperimentConfig) -> Result<Outputs> {
    let setup = cfg.setup()?;
    let mut tables = weak_error_experiment(&setup, &cfg.functionals)?;
    tables.extend(analytic_weak_experiment(&setup)?);
    write_tables(cfg, "weak", tables)
}

/// Truncation errors of the single path with stream 0 under `seed`.
pub fn cmd_path_error(cfg: &ExperimentConfig) -> Result<Outputs> {
    let setup = cfg.setup()?;
    let grid = grid_for(cfg)?;
    let tables = pathwise_error_experiment(&setup, &cfg.error_kinds, grid.as_ref())?;
    write_tables(cfg, "path_error", tables)
}

/// One isotropic Gaussian field with the configured spectrum at band
/// `kappa-ref`: `field_coefficients.csv` and, on `S^2`, `field_grid.csv`.
pub fn cmd_sample_field(cfg: &ExperimentConfig) -> Result<Outputs> {
    cfg.validate()?;
    let mut rng = stream(cfg.seed, 0);
    let field = sample_isotropic_grf(&cfg.spectrum()?, cfg.kappa_ref, cfg.d, &mut rng)?;
    let mut paths = vec![write_file(cfg, "field_coefficients.csv", |out| {
        field.write_csv(out)
    })?];
    if cfg.d == 3 {
        paths.push(write_field_grid(cfg, "field_grid.csv", &field)?);
    }
    Ok(Outputs {
        paths,
        tables: Vec::new(),
    })
}

fn grid_for(cfg: &ExperimentConfig) -> Result<Option<SphereGrid>> {
    Ok(match (cfg.grid_n_theta, cfg.grid_n_phi) {
        (Some(_), Some(_)) => Some(cfg.grid()?),
        _ => None,
    })
}

/// Reads back the `# key=value` configuration block of an output file.
pub fn read_config_header(path: &Path) -> Result<ExperimentConfig> {
    ExperimentConfig::from_header(std::io::BufReader::new(File::open(path)?))
}
