//! Stored paths of a two-field state and their CSV form.
//!
//! ```text
//! # t=0.5 kappa=8 d=3 seed=1
//! # block=u1
//! ell,m,component,value
//! 0,0,0,1.2500000000000000e-1
//! ...
//! # block=u2
//! ell,m,component,value
//! ...
//! ```
//!
//! Lines of the form `# key=value` before the first snapshot are treated as
//! free-form metadata and skipped by the reader.

use std::io::{BufRead, Write};

use crate::error::{domain, Error, Result};
use crate::spectrum::{
    comment_pairs, parse_num, parse_row, CoefficientField, InitialData, PowerSpectrum,
};

/// Everything needed to simulate one path on a uniform time grid.
#[derive(Clone, Debug, PartialEq)]
pub struct PathSpec {
    pub spectrum: PowerSpectrum,
    pub band: usize,
    pub dim: usize,
    pub t_final: f64,
    pub steps: usize,
    /// Keep every `stride`-th state; the initial and final states are always kept.
    pub stride: usize,
    pub seed: u64,
    /// Index of the random stream under `seed`.
    pub sample: u64,
    pub initial: InitialData,
}

impl PathSpec {
    pub fn new(spectrum: PowerSpectrum, band: usize, t_final: f64, seed: u64) -> Self {
        Self {
            spectrum,
            band,
            dim: 3,
            t_final,
            steps: 1,
            stride: 1,
            seed,
            sample: 0,
            initial: InitialData::Zero,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_final.is_finite() && self.t_final > 0.0) {
            return Err(domain("final time", self.t_final));
        }
        if self.steps == 0 {
            return Err(Error::Config("steps must be at least 1".into()));
        }
        if self.stride == 0 {
            return Err(Error::Config("stride must be at least 1".into()));
        }
        if self.dim < 3 {
            return Err(Error::InvalidDimension(self.dim));
        }
        Ok(())
    }

    /// Uniform step `T / steps`.
    pub fn step(&self) -> f64 {
        self.t_final / self.steps as f64
    }

    /// Time of grid point `j`.
    pub fn time(&self, j: usize) -> f64 {
        if j == self.steps {
            self.t_final
        } else {
            j as f64 * self.t_final / self.steps as f64
        }
    }

    /// Whether state `j` is stored in the trajectory.
    pub fn keeps(&self, j: usize) -> bool {
        j.is_multiple_of(self.stride) || j == self.steps
    }
}

/// A state at one instant.
#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub first: CoefficientField,
    pub second: CoefficientField,
}

/// Strided sequence of snapshots along one path.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    /// Block names of the two fields, e.g. `u1`/`u2` or `R`/`I`.
    pub labels: [String; 2],
    pub band: usize,
    pub dim: usize,
    pub seed: u64,
    pub snapshots: Vec<Snapshot>,
}

impl Trajectory {
    pub fn new(labels: [&str; 2], band: usize, dim: usize, seed: u64) -> Self {
        Self {
            labels: labels.map(str::to_owned),
            band,
            dim,
            seed,
            snapshots: Vec::new(),
        }
    }

    pub fn last(&self) -> Option<&Snapshot> {
        self.snapshots.last()
    }

    pub fn write_csv<W: Write>(&self, out: &mut W) -> Result<()> {
        for snap in &self.snapshots {
            writeln!(
                out,
                "# t={} kappa={} d={} seed={}",
                snap.t, self.band, self.dim, self.seed
            )?;
            for (label, field) in self.labels.iter().zip([&snap.first, &snap.second]) {
                writeln!(out, "# block={label}")?;
                field.write_rows(out)?;
            }
        }
        Ok(())
    }

    /// Reads the format of [`Trajectory::write_csv`]. Every snapshot must
    /// carry the same two block labels, band, dimension and seed.
    pub fn read_csv<R: BufRead>(input: R) -> Result<Self> {
        let mut traj: Option<Trajectory> = None;
        let mut current: Option<PendingSnapshot> = None;
        for (i, line) in input.lines().enumerate() {
            let line = line?;
            let lineno = i + 1;
            let bad = |msg: String| Error::Parse { line: lineno, msg };
            let text = line.trim();
            if text.is_empty() || text.starts_with("ell") {
                continue;
            }
            if let Some(comment) = text.strip_prefix('#') {
                let pairs: Vec<_> = comment_pairs(comment).collect();
                if let Some((_, t)) = pairs.iter().find(|(k, _)| *k == "t") {
                    let get = |key: &str| {
                        pairs
                            .iter()
                            .find(|(k, _)| *k == key)
                            .map(|(_, v)| *v)
                            .ok_or_else(|| bad(format!("snapshot line lacks {key}=")))
                    };
                    let t: f64 = parse_num(t, lineno)?;
                    if !t.is_finite() {
                        return Err(bad(format!("non-finite time {t}")));
                    }
                    let band: usize = parse_num(get("kappa")?, lineno)?;
                    let dim: usize = parse_num(get("d")?, lineno)?;
                    let seed: u64 = parse_num(get("seed")?, lineno)?;
                    if let Some(p) = current.take() {
                        p.finish(&mut traj)?;
                    }
                    current = Some(PendingSnapshot {
                        line: lineno,
                        t,
                        band,
                        dim,
                        seed,
                        blocks: Vec::new(),
                    });
                } else if let Some((_, label)) = pairs.iter().find(|(k, _)| *k == "block") {
                    let snap = current
                        .as_mut()
                        .ok_or_else(|| bad("block before any snapshot line".into()))?;
                    if snap.blocks.len() == 2 {
                        return Err(bad("more than two blocks in a snapshot".into()));
                    }
                    snap.blocks.push((label.to_string(), lineno, Vec::new()));
                }
                continue;
            }
            let block = current
                .as_mut()
                .and_then(|s| s.blocks.last_mut())
                .ok_or_else(|| bad("coefficient row outside a block".into()))?;
            block.2.push((lineno, parse_row(text, lineno)?));
        }
        if let Some(p) = current.take() {
            p.finish(&mut traj)?;
        }
        traj.ok_or(Error::Parse {
            line: 0,
            msg: "no snapshots".into(),
        })
    }
}

type Rows = Vec<(usize, (usize, usize, u8, f64))>;

struct PendingSnapshot {
    line: usize,
    t: f64,
    band: usize,
    dim: usize,
    seed: u64,
    blocks: Vec<(String, usize, Rows)>,
}

impl PendingSnapshot {
    fn finish(self, traj: &mut Option<Trajectory>) -> Result<()> {
        let bad = |msg: String| Error::Parse {
            line: self.line,
            msg,
        };
        if self.blocks.len() != 2 {
            return Err(bad(format!(
                "expected 2 blocks, found {}",
                self.blocks.len()
            )));
        }
        let mut blocks = self.blocks.into_iter();
        let (l1, _, rows1) = blocks.next().expect("two blocks");
        let (l2, _, rows2) = blocks.next().expect("two blocks");
        let t =
            traj.get_or_insert_with(|| Trajectory::new([&l1, &l2], self.band, self.dim, self.seed));
        if t.labels != [l1, l2] || t.band != self.band || t.dim != self.dim || t.seed != self.seed {
            return Err(bad("snapshot header differs from the first snapshot".into()));
        }
        let first = CoefficientField::from_rows(self.band, self.dim, rows1)?;
        let second = CoefficientField::from_rows(self.band, self.dim, rows2)?;
        t.snapshots.push(Snapshot {
            t: self.t,
            first,
            second,
        });
        Ok(())
    }
}
