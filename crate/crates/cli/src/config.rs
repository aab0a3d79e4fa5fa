use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use semicz::bourgain::{InstanceKind, Operator};
use semicz::GridSpec;

use crate::CliError;

pub const SCHEMA: &str = include_str!("../config.schema.json");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Experiment {
    Czd,
    Weaktype,
    Kclosed,
    Sobolev,
    Kernelcheck,
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::Czd => "czd",
            Experiment::Weaktype => "weaktype",
            Experiment::Kclosed => "kclosed",
            Experiment::Sobolev => "sobolev",
            Experiment::Kernelcheck => "kernelcheck",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub d: usize,
    #[serde(rename = "L")]
    pub level: u32,
    pub m: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    Log,
    Lin,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamGrid {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    pub scale: Scale,
}

impl ParamGrid {
    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        (0..self.count)
            .map(|i| {
                let u = i as f64 / (self.count - 1) as f64;
                match self.scale {
                    Scale::Log => self.start * (self.stop / self.start).powf(u),
                    Scale::Lin => self.start + (self.stop - self.start) * u,
                }
            })
            .collect()
    }

    fn validate(&self, key: &str) -> Result<(), CliError> {
        let bad = |what: &str| Err(CliError::Config(format!("{key}.{what}")));
        if !self.start.is_finite() || self.start <= 0.0 {
            return bad(&format!("start must be positive, got {}", self.start));
        }
        if !self.stop.is_finite() || self.stop <= 0.0 {
            return bad(&format!("stop must be positive, got {}", self.stop));
        }
        if self.stop < self.start {
            return bad(&format!("stop ({}) is below start ({})", self.stop, self.start));
        }
        if self.count == 0 {
            return bad("count must be at least 1");
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Instances {
    pub count: usize,
    pub seed: u64,
    #[serde(default)]
    pub kind: Option<InstanceKind>,
    #[serde(default = "default_cutoff")]
    pub freq_cutoff: u32,
    #[serde(default = "default_decades")]
    pub amplitude_decades: f64,
}

fn default_cutoff() -> u32 {
    4
}

fn default_decades() -> f64 {
    4.0
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Output {
    /// Base path; `.csv`/`.json`, `.summary.json` and `_<figure>.tsv` are appended.
    pub path: PathBuf,
    #[serde(default = "default_format")]
    pub format: Format,
    #[serde(default)]
    pub plotdata: bool,
}

fn default_format() -> Format {
    Format::Csv
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub experiment: Experiment,
    pub grid: Grid,
    #[serde(default)]
    pub operator: Option<String>,
    #[serde(default)]
    pub s_grid: Option<ParamGrid>,
    #[serde(default)]
    pub t_grid: Option<ParamGrid>,
    pub instances: Instances,
    pub output: Output,
    /// Also run at level `L + 1` and report the refinement ratio.
    #[serde(default)]
    pub refine: bool,
    #[serde(default = "default_workers")]
    pub workers: usize,
}

fn default_workers() -> usize {
    1
}

impl Config {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let config: Config = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn spec(&self) -> Result<GridSpec, CliError> {
        GridSpec::new(self.grid.d, self.grid.level, self.grid.m).map_err(|e| CliError::Config(format!("grid: {e}")))
    }

    pub fn operator(&self) -> Result<Operator, CliError> {
        let tag = self.operator.as_deref().unwrap_or(match self.experiment {
            Experiment::Sobolev => "leray_complement",
            _ if self.grid.d == 1 => "riesz",
            Experiment::Kclosed => "leray",
            _ => "leray_12",
        });
        Operator::parse(tag).map_err(|e| CliError::Config(format!("operator: {e}")))
    }

    pub fn kind(&self) -> InstanceKind {
        self.instances.kind.unwrap_or(match self.experiment {
            Experiment::Kclosed => InstanceKind::Analytic,
            _ => InstanceKind::RandomTrigPoly,
        })
    }

    /// The grid the experiment sweeps: `s_grid` for czd, weaktype and kernelcheck (ball
    /// radii), `t_grid` for kclosed and sobolev.
    pub fn sweep(&self) -> (&'static str, ParamGrid) {
        match self.experiment {
            Experiment::Kclosed | Experiment::Sobolev => ("t", self.t_grid.expect("validated")),
            Experiment::Kernelcheck => ("r", self.s_grid.expect("validated")),
            _ => ("s", self.s_grid.expect("validated")),
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let spec = self.spec()?;
        if self.grid.level > 12 {
            return Err(CliError::Config(format!("grid.L must be at most 12, got {}", self.grid.level)));
        }
        let needs_t = matches!(self.experiment, Experiment::Kclosed | Experiment::Sobolev);
        let (key, grid, other) = if needs_t {
            ("t_grid", self.t_grid, ("s_grid", self.s_grid))
        } else {
            ("s_grid", self.s_grid, ("t_grid", self.t_grid))
        };
        match grid {
            Some(g) => g.validate(key)?,
            None => return Err(CliError::Config(format!("{key} is required for {}", self.experiment.name()))),
        }
        if other.1.is_some() {
            return Err(CliError::Config(format!("{} is not used by {}", other.0, self.experiment.name())));
        }
        if self.workers == 0 {
            return Err(CliError::Config("workers must be at least 1".into()));
        }
        if !(self.instances.amplitude_decades >= 0.0 && self.instances.amplitude_decades.is_finite()) {
            return Err(CliError::Config("instances.amplitude_decades must be a nonnegative number".into()));
        }
        let op = self.operator()?;
        if self.experiment != Experiment::Sobolev && self.experiment != Experiment::Czd {
            op.validate(&spec).map_err(|e| CliError::Config(format!("operator: {e}")))?;
        }
        match self.experiment {
            Experiment::Weaktype if op.components(spec.d) != 1 => {
                return Err(CliError::Config(format!("operator: {} is not a scalar operator", op.tag())));
            }
            Experiment::Kclosed if !op.is_projection() => {
                return Err(CliError::Config(format!("operator: {} is not a projection", op.tag())));
            }
            Experiment::Sobolev if spec.d < 2 => {
                return Err(CliError::Config(format!("grid.d must be at least 2 for sobolev, got {}", spec.d)));
            }
            Experiment::Kernelcheck if !matches!(op, Operator::Riesz | Operator::LerayEntry { .. }) => {
                return Err(CliError::Config(format!("operator: no kernel ships for {}", op.tag())));
            }
            _ => {}
        }
        let cutoff = self.instances.freq_cutoff as usize;
        let uses_trig = matches!(
            self.kind(),
            InstanceKind::RandomTrigPoly | InstanceKind::Analytic | InstanceKind::GradientField
        );
        if self.experiment != Experiment::Kernelcheck && uses_trig && cutoff > 0 && 2 * cutoff >= spec.side() {
            return Err(CliError::Config(format!(
                "instances.freq_cutoff = {cutoff} is not resolved at L = {} (needs 2·cutoff < {})",
                spec.level,
                spec.side()
            )));
        }
        Ok(())
    }

    /// Output base path, resolved against `OUTPUT_DIR` when it is set and the path is relative.
    pub fn output_base(&self) -> PathBuf {
        match std::env::var_os("OUTPUT_DIR") {
            Some(dir) if self.output.path.is_relative() => PathBuf::from(dir).join(&self.output.path),
            _ => self.output.path.clone(),
        }
    }
}
