//! Flat JSON experiment configuration, named presets and the `# key=value`
//! header written at the top of every output file.
//!
//! ```json
//! {"equation": "wave", "alpha": 3, "kappas": [2, 4, 8, 16, 32], "kappa-ref": 64, "samples": 100}
//! ```
//!
//! Missing keys take their defaults; unknown keys are rejected.

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::harmonics::SphereGrid;
use crate::harness::{Equation, ErrorKind, ExperimentSetup, TestFunctional};
use crate::spectrum::{CoefficientField, InitialData, PowerSpectrum};
use crate::trajectory::PathSpec;

/// Largest band a configuration may request.
pub const MAX_BAND: usize = 1 << 15;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EquationChoice {
    /// Wave equation on `S^2`.
    Wave,
    /// Wave equation on `S^{d-1}`, `d ≥ 3`.
    WaveDsphere,
    /// Free Schrödinger equation on `S^2`.
    Schrodinger,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialMode {
    Zero,
    RandomSobolev,
    File,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub equation: EquationChoice,
    /// Ambient dimension; the sphere is `S^{d-1}`.
    pub d: usize,
    /// Decay exponent of the angular power spectrum.
    pub alpha: f64,
    /// Spectral scale `C` in `A_l = C l^{−α}`.
    pub scale: f64,
    /// Degrees below `ell0` share the variance of degree `ell0`.
    pub ell0: usize,
    /// Variance of degree 0; defaults to `scale`.
    pub a0: Option<f64>,
    /// Sobolev order of random initial position (or real part).
    pub beta: Option<f64>,
    /// Sobolev order of random initial velocity (or imaginary part).
    pub gamma: Option<f64>,
    pub initial: InitialMode,
    pub initial_position_file: Option<PathBuf>,
    pub initial_velocity_file: Option<PathBuf>,
    pub t_final: f64,
    pub steps: usize,
    /// Trajectory output keeps every `stride`-th step.
    pub stride: usize,
    pub kappas: Vec<usize>,
    /// Band of the reference path; also the band of `simulate` and `sample-field`.
    pub kappa_ref: usize,
    pub samples: usize,
    pub seed: u64,
    pub error_kinds: Vec<ErrorKind>,
    pub functionals: Vec<TestFunctional>,
    /// Grid for grid errors and field output; both or neither.
    pub grid_n_theta: Option<usize>,
    pub grid_n_phi: Option<usize>,
    /// Worker threads; 0 uses all cores.
    pub threads: usize,
    pub output: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            equation: EquationChoice::Wave,
            d: 3,
            alpha: 3.0,
            scale: 1.0,
            ell0: 1,
            a0: None,
            beta: None,
            gamma: None,
            initial: InitialMode::Zero,
            initial_position_file: None,
            initial_velocity_file: None,
            t_final: 1.0,
            steps: 1,
            stride: 1,
            kappas: vec![2, 4, 8, 16, 32],
            kappa_ref: 64,
            samples: 100,
            seed: 1,
            error_kinds: vec![ErrorKind::L2Coefficients],
            functionals: vec![
                TestFunctional::SquaredNorm,
                TestFunctional::ExpNegSquaredNorm,
            ],
            grid_n_theta: None,
            grid_n_phi: None,
            threads: 0,
            output: PathBuf::from("out"),
        }
    }
}

/// Preset names with a one-line description.
pub const PRESETS: &[(&str, &str)] = &[
    ("fig1", "wave, alpha=3, zero data, 100 samples"),
    ("fig2", "wave, alpha=5, zero data, 100 samples"),
    (
        "fig3",
        "wave, alpha=1 (rough noise), zero data, 100 samples, reference band 128",
    ),
    (
        "fig4",
        "wave, alpha=10, random H^2 initial position, 100 samples",
    ),
    ("fig5", "wave, alpha=3, single path"),
    ("fig5b", "wave, alpha=5, single path"),
    ("fig6", "wave, alpha=3, weak errors, 1000 samples"),
    ("weak", "same as fig6"),
    ("sch-fig7", "Schrodinger, alpha=4, zero data, 100 samples"),
    (
        "dsphere",
        "wave on S^3 (d=4), alpha=4, zero data, 100 samples",
    ),
];

impl ExperimentConfig {
    pub fn preset(name: &str) -> Result<Self> {
        let base = Self::default();
        let cfg = match name {
            "fig1" => Self { alpha: 3.0, ..base },
            "fig2" => Self { alpha: 5.0, ..base },
            "fig3" => Self {
                alpha: 1.0,
                kappa_ref: 128,
                ..base
            },
            "fig4" => Self {
                alpha: 10.0,
                initial: InitialMode::RandomSobolev,
                beta: Some(2.0),
                ..base
            },
            "fig5" => Self {
                alpha: 3.0,
                samples: 1,
                ..base
            },
            "fig5b" => Self {
                alpha: 5.0,
                samples: 1,
                ..base
            },
            "fig6" | "weak" => Self {
                alpha: 3.0,
                samples: 1000,
                ..base
            },
            "sch-fig7" => Self {
                equation: EquationChoice::Schrodinger,
                alpha: 4.0,
                ..base
            },
            "dsphere" => Self {
                equation: EquationChoice::WaveDsphere,
                d: 4,
                alpha: 4.0,
                ..base
            },
            _ => {
                let names: Vec<_> = PRESETS.iter().map(|p| p.0).collect();
                return Err(Error::Config(format!(
                    "unknown preset {name:?}; expected one of {}",
                    names.join(", ")
                )));
            }
        };
        Ok(Self {
            output: PathBuf::from(format!("out/{name}")),
            ..cfg
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// Overlays the keys of a JSON object on `self`.
    pub fn merge_json(&self, text: &str) -> Result<Self> {
        let Value::Object(overlay) = serde_json::from_str::<Value>(text)? else {
            return Err(Error::Config("config file must hold a JSON object".into()));
        };
        let Value::Object(mut obj) = serde_json::to_value(self)? else {
            unreachable!("config serializes to an object");
        };
        obj.extend(overlay);
        Ok(serde_json::from_value(Value::Object(obj))?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Sets `key` (with `_` read as `-`) from command-line text. List keys
    /// take comma-separated items; every value is read as JSON first and as
    /// a bare string otherwise.
    pub fn apply_override(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.replace('_', "-");
        let mut obj = match serde_json::to_value(&*self)? {
            Value::Object(m) => m,
            _ => unreachable!("config serializes to an object"),
        };
        let current = obj
            .get(&key)
            .ok_or_else(|| Error::Config(format!("unknown config key {key:?}")))?;
        let parsed = match current {
            Value::Array(_) if !value.trim_start().starts_with('[') => Value::Array(
                value
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(scalar)
                    .collect(),
            ),
            _ => typed_value(&key, current, value).unwrap_or_else(|_| scalar(value)),
        };
        obj.insert(key.clone(), parsed);
        *self = serde_json::from_value(Value::Object(obj))
            .map_err(|e| Error::Config(format!("bad value {value:?} for {key}: {e}")))?;
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        match self.equation {
            EquationChoice::WaveDsphere if self.d < 3 => {
                return fail(format!("d must be at least 3, got {}", self.d))
            }
            EquationChoice::Wave | EquationChoice::Schrodinger if self.d != 3 => {
                return fail(format!("d={} needs equation wave-dsphere", self.d))
            }
            _ => {}
        }
        if !(self.t_final.is_finite() && self.t_final > 0.0) {
            return fail(format!("t-final must be positive, got {}", self.t_final));
        }
        if self.steps == 0 || self.stride == 0 {
            return fail("steps and stride must be at least 1".into());
        }
        if self.samples == 0 {
            return fail("samples must be at least 1".into());
        }
        if self.kappas.is_empty() || self.kappas.windows(2).any(|w| w[0] >= w[1]) {
            return fail("kappas must be a non-empty strictly increasing list".into());
        }
        if self.kappa_ref > MAX_BAND {
            return fail(format!("kappa-ref {} exceeds {MAX_BAND}", self.kappa_ref));
        }
        if self.kappas.iter().any(|&k| k >= self.kappa_ref) {
            return fail(format!(
                "kappa-ref {} must exceed every kappa",
                self.kappa_ref
            ));
        }
        match self.initial {
            InitialMode::RandomSobolev if self.beta.is_none() && self.gamma.is_none() => {
                return fail("random-sobolev initial data needs beta or gamma".into())
            }
            InitialMode::File
                if self.initial_position_file.is_none() && self.initial_velocity_file.is_none() =>
            {
                return fail(
                    "file initial data needs initial-position-file or initial-velocity-file".into(),
                )
            }
            _ => {}
        }
        for s in [self.beta, self.gamma].into_iter().flatten() {
            if !s.is_finite() {
                return fail(format!("Sobolev order must be finite, got {s}"));
            }
        }
        if self.error_kinds.is_empty() {
            return fail("error-kinds must not be empty".into());
        }
        if self
            .error_kinds
            .iter()
            .any(|k| *k != ErrorKind::L2Coefficients)
            && self.d != 3
        {
            return fail("grid errors are available for d=3 only".into());
        }
        match (self.grid_n_theta, self.grid_n_phi) {
            (None, None) => {}
            (Some(a), Some(b)) if a > 0 && b > 0 && a <= 4 * MAX_BAND && b <= 8 * MAX_BAND => {}
            _ => return fail("grid-n-theta and grid-n-phi must both be set and positive".into()),
        }
        let paths = [
            Some(&self.output),
            self.initial_position_file.as_ref(),
            self.initial_velocity_file.as_ref(),
        ];
        for p in paths.into_iter().flatten() {
            let text = p.to_string_lossy();
            if text.is_empty() || text.chars().any(char::is_control) {
                return fail(format!(
                    "path {p:?} is empty or contains control characters"
                ));
            }
        }
        self.spectrum()?;
        Ok(())
    }

    pub fn spectrum(&self) -> Result<PowerSpectrum> {
        PowerSpectrum::with_head(
            self.alpha,
            self.scale,
            self.ell0,
            self.a0.unwrap_or(self.scale),
        )
    }

    pub fn equation(&self) -> Equation {
        match self.equation {
            EquationChoice::Wave | EquationChoice::WaveDsphere => Equation::Wave,
            EquationChoice::Schrodinger => Equation::Schrodinger,
        }
    }

    /// Resolves the initial data, reading coefficient files if requested.
    pub fn initial_data(&self) -> Result<InitialData> {
        Ok(match self.initial {
            InitialMode::Zero => InitialData::Zero,
            InitialMode::RandomSobolev => InitialData::RandomSobolev {
                beta: self.beta,
                gamma: self.gamma,
            },
            InitialMode::File => {
                let load = |p: &Option<PathBuf>| -> Result<CoefficientField> {
                    match p {
                        Some(p) => CoefficientField::read_csv(BufReader::new(File::open(p)?)),
                        None => CoefficientField::zeros(0, self.d),
                    }
                };
                InitialData::Fixed {
                    first: load(&self.initial_position_file)?,
                    second: load(&self.initial_velocity_file)?,
                }
            }
        })
    }

    pub fn setup(&self) -> Result<ExperimentSetup> {
        self.validate()?;
        Ok(ExperimentSetup {
            equation: self.equation(),
            dim: self.d,
            spectrum: self.spectrum()?,
            initial: self.initial_data()?,
            t_final: self.t_final,
            steps: self.steps,
            kappas: self.kappas.clone(),
            kappa_ref: self.kappa_ref,
            samples: self.samples,
            seed: self.seed,
            threads: self.threads,
        })
    }

    /// Path of sample 0 at band `kappa_ref`.
    pub fn path_spec(&self) -> Result<PathSpec> {
        self.validate()?;
        Ok(PathSpec {
            spectrum: self.spectrum()?,
            band: self.kappa_ref,
            dim: self.d,
            t_final: self.t_final,
            steps: self.steps,
            stride: self.stride,
            seed: self.seed,
            sample: 0,
            initial: self.initial_data()?,
        })
    }

    /// The configured grid, or the smallest exact grid for `kappa_ref`.
    pub fn grid(&self) -> Result<SphereGrid> {
        match (self.grid_n_theta, self.grid_n_phi) {
            (Some(a), Some(b)) => SphereGrid::gauss_legendre(a, b),
            _ => Ok(SphereGrid::for_band(self.kappa_ref)),
        }
    }

    /// One `# key=value` line per key, in key order. Values are JSON, with
    /// strings left unquoted and unset keys left empty.
    pub fn header(&self) -> String {
        let obj = match serde_json::to_value(self).expect("config serializes") {
            Value::Object(m) => m,
            _ => unreachable!("config serializes to an object"),
        };
        let mut out = String::new();
        for (k, v) in obj {
            let text = match v {
                Value::String(s) => s,
                Value::Null => String::new(),
                other => other.to_string(),
            };
            out.push_str(&format!("# {k}={text}\n"));
        }
        out
    }

    /// Rebuilds a configuration from the leading header block of an output
    /// file. Reading stops at the first line that is not a config key or
    /// repeats one.
    pub fn from_header<R: BufRead>(input: R) -> Result<Self> {
        let keys = match serde_json::to_value(Self::default())? {
            Value::Object(m) => m,
            _ => unreachable!("config serializes to an object"),
        };
        let mut obj = Map::new();
        for (i, line) in input.lines().enumerate() {
            let line = line?;
            let Some((k, v)) = line.strip_prefix("# ").and_then(|c| c.split_once('=')) else {
                break;
            };
            let Some(default) = keys.get(k) else {
                break;
            };
            let value = typed_value(k, default, v).map_err(|e| Error::Parse {
                line: i + 1,
                msg: format!("{k}: {e}"),
            })?;
            if obj.contains_key(k) {
                // a repeated key belongs to the data block that follows
                break;
            }
            obj.insert(k.to_string(), value);
        }
        if obj.is_empty() {
            return Err(Error::Parse {
                line: 1,
                msg: "no config header".into(),
            });
        }
        Ok(serde_json::from_value(Value::Object(obj))?)
    }
}

/// Reads `text` as the value of `key`, whose current or default value is
/// `like`: path and name keys stay strings, empty text unsets an optional
/// key, everything else is JSON.
fn typed_value(key: &str, like: &Value, text: &str) -> serde_json::Result<Value> {
    match like {
        Value::String(_) => Ok(Value::String(text.to_string())),
        _ if text.is_empty() => Ok(Value::Null),
        _ if key.ends_with("-file") => Ok(Value::String(text.to_string())),
        _ => serde_json::from_str(text),
    }
}

fn scalar(text: &str) -> Value {
    serde_json::from_str(text).unwrap_or_else(|_| Value::String(text.to_string()))
}
