//! `sphere-lab`: simulations and convergence studies for the stochastic wave
//! and Schrödinger equations on spheres.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use sphere_spde::commands::{
    cmd_convergence, cmd_path_error, cmd_sample_field, cmd_simulate, cmd_weak, Outputs,
};
use sphere_spde::config::{ExperimentConfig, PRESETS};

#[derive(Parser)]
#[command(name = "sphere-lab", version, about, args_override_self = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one path at band kappa-ref; write the trajectory and the final field on a grid.
    Simulate(RunArgs),
    /// Mean-square truncation errors over coupled Monte Carlo samples.
    Convergence(RunArgs),
    /// Weak errors by Monte Carlo and from the closed-form second moments.
    Weak(RunArgs),
    /// Truncation errors of a single path.
    PathError(RunArgs),
    /// Sample one isotropic Gaussian field with the configured spectrum.
    SampleField(RunArgs),
    /// List the named presets.
    Presets,
    /// Print the resolved configuration as JSON without running anything.
    ShowConfig(RunArgs),
}

/// Declares one `--<key> <value>` flag per configuration key.
macro_rules! key_flags {
    ($($field:ident => $key:literal : $help:literal),* $(,)?) => {
        #[derive(Args, Default)]
        struct KeyFlags {
            $(
                #[arg(long = $key, value_name = "VALUE", help = $help)]
                $field: Option<String>,
            )*
        }

        impl KeyFlags {
            fn pairs(&self) -> Vec<(&'static str, &str)> {
                let mut out = Vec::new();
                $(
                    if let Some(v) = &self.$field {
                        out.push(($key, v.as_str()));
                    }
                )*
                out
            }
        }
    };
}

key_flags! {
    equation => "equation": "wave, wave-dsphere or schrodinger",
    d => "d": "Ambient dimension (sphere S^{d-1}); d > 3 needs wave-dsphere",
    alpha => "alpha": "Decay exponent of the angular power spectrum",
    scale => "scale": "Spectral scale C in A_l = C l^-alpha",
    ell0 => "ell0": "Degrees below ell0 share the variance of degree ell0",
    a0 => "a0": "Variance of degree 0 (default: scale)",
    beta => "beta": "Sobolev order of random initial position",
    gamma => "gamma": "Sobolev order of random initial velocity",
    initial => "initial": "zero, random-sobolev or file",
    initial_position_file => "initial-position-file": "Coefficient CSV of the initial position",
    initial_velocity_file => "initial-velocity-file": "Coefficient CSV of the initial velocity",
    t_final => "t-final": "Final time",
    steps => "steps": "Number of time steps",
    stride => "stride": "Keep every stride-th step in the trajectory",
    kappas => "kappas": "Comma-separated band limits, increasing",
    kappa_ref => "kappa-ref": "Reference band limit",
    samples => "samples": "Monte Carlo samples",
    seed => "seed": "Base random seed",
    error_kinds => "error-kinds": "Comma-separated: l2-coefficients, max-grid, l2-grid",
    functionals => "functionals": "Comma-separated: squared-norm, exp-neg-squared-norm",
    grid_n_theta => "grid-n-theta": "Grid latitudes",
    grid_n_phi => "grid-n-phi": "Grid longitudes",
    threads => "threads": "Worker threads (0 = all cores)",
    output => "output": "Output directory",
}

#[derive(Args)]
struct RunArgs {
    /// JSON configuration file; its keys override the preset.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Named preset to start from (see `sphere-lab presets`).
    #[arg(long)]
    preset: Option<String>,
    #[command(flatten)]
    keys: KeyFlags,
}

impl RunArgs {
    fn resolve(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.preset {
            Some(name) => ExperimentConfig::preset(name)?,
            None => ExperimentConfig::default(),
        };
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            cfg = cfg
                .merge_json(&text)
                .with_context(|| format!("parsing {}", path.display()))?;
        }
        for (key, value) in self.keys.pairs() {
            cfg.apply_override(key, value)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn report(out: &Outputs) {
    for t in &out.tables {
        let slope = t.slope().map_or("n/a".to_string(), |s| format!("{s:.3}"));
        let reference = t
            .metadata
            .get("reference-slope")
            .map_or("n/a", String::as_str);
        println!(
            "{:<32} {:<10} slope {:>7}  reference {}",
            t.statistic,
            t.part.name(),
            slope,
            reference
        );
    }
    for p in &out.paths {
        println!("wrote {}", p.display());
    }
}

fn run(cli: Cli) -> Result<()> {
    let (args, f): (
        &RunArgs,
        fn(&ExperimentConfig) -> sphere_spde::Result<Outputs>,
    ) = match &cli.command {
        Command::Presets => {
            for (name, about) in PRESETS {
                println!("{name:<10} {about}");
            }
            return Ok(());
        }
        Command::ShowConfig(a) => {
            println!("{}", a.resolve()?.to_json());
            return Ok(());
        }
        Command::Simulate(a) => (a, cmd_simulate),
        Command::Convergence(a) => (a, cmd_convergence),
        Command::Weak(a) => (a, cmd_weak),
        Command::PathError(a) => (a, cmd_path_error),
        Command::SampleField(a) => (a, cmd_sample_field),
    };
    let cfg = args.resolve()?;
    report(&f(&cfg)?);
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
