//! Scenario files: what to deploy, which faults to inject and which
//! pipeline to run.

use std::path::Path;

use ripsnet::complex::PowerConfig;
use ripsnet::deploy::{self, Deployment, Point, Sampler};
use ripsnet::locator::LocatorConfig;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default)]
    pub seed: u64,
    pub deployment: DeploymentSpec,
    #[serde(default)]
    pub faults: Vec<FaultSpec>,
    #[serde(default)]
    pub pipeline: Pipeline,
    #[serde(default)]
    pub algorithm: AlgorithmParams,
    #[serde(default)]
    pub output: OutputSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeploymentSpec {
    pub n: usize,
    pub r_c: f64,
    pub r_s: f64,
    #[serde(default)]
    pub sampler: Sampler,
}

/// Faults are applied in file order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FaultSpec {
    Hole { center: Point, radius: f64 },
    Wormhole { p1: Point, p2: Point, r_w: f64 },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pipeline {
    /// Hole localization only.
    #[default]
    Coverage,
    /// Localization, then classification of every surviving cycle.
    Wormhole,
    /// Both, plus the raster coverage ground truth.
    Both,
}

impl Pipeline {
    pub fn classifies(self) -> bool {
        !matches!(self, Pipeline::Coverage)
    }

    pub fn rasterizes(self) -> bool {
        !matches!(self, Pipeline::Wormhole)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AlgorithmParams {
    pub tol: f64,
    pub sweeps: usize,
    /// Power-iteration cap; `None` means 10 times the edge count.
    pub max_iters: Option<usize>,
    pub power_rel_tol: f64,
    pub retry_factor: usize,
    pub girth_factor: usize,
}

impl Default for AlgorithmParams {
    fn default() -> Self {
        let l = LocatorConfig::default();
        AlgorithmParams {
            tol: l.tol,
            sweeps: 2,
            max_iters: None,
            power_rel_tol: l.power.rel_tol,
            retry_factor: l.retry_factor,
            girth_factor: l.girth_factor,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Layer {
    Coverage,
    Boundary,
    Survivor,
    Removed,
    Flagged,
}

impl Layer {
    pub const ALL: [Layer; 5] = [
        Layer::Coverage,
        Layer::Boundary,
        Layer::Survivor,
        Layer::Removed,
        Layer::Flagged,
    ];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSpec {
    /// Directory for the report and figure; relative to the working
    /// directory.
    pub dir: Option<String>,
    pub svg: bool,
    /// SVG layers drawn on top of nodes and edges (all of them when the
    /// field is absent).
    pub layers: Vec<Layer>,
}

impl Default for OutputSpec {
    fn default() -> Self {
        OutputSpec {
            dir: None,
            svg: false,
            layers: Layer::ALL.to_vec(),
        }
    }
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Scenario, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Scenario::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Scenario, CliError> {
        let s: Scenario =
            serde_json::from_str(text).map_err(|e| CliError::Validation(e.to_string()))?;
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let a = &self.algorithm;
        if !(a.tol > 0.0 && a.tol < 1.0) {
            return Err(CliError::Validation(format!(
                "tol must lie in (0, 1), got {}",
                a.tol
            )));
        }
        if !(a.power_rel_tol > 0.0 && a.power_rel_tol < 1.0) {
            return Err(CliError::Validation(
                "power_rel_tol must lie in (0, 1)".into(),
            ));
        }
        if a.max_iters == Some(0) || a.retry_factor == 0 {
            return Err(CliError::Validation(
                "iteration caps must be positive".into(),
            ));
        }
        if self.name.is_empty() {
            return Err(CliError::Validation("scenario name is empty".into()));
        }
        Ok(())
    }

    /// Deployment with every fault applied.
    pub fn build(&self) -> Result<Deployment, CliError> {
        let d = &self.deployment;
        let mut out = Deployment::generate(d.n, d.r_c, d.r_s, self.seed, &d.sampler)?;
        for f in &self.faults {
            out = match *f {
                FaultSpec::Hole { center, radius } => deploy::inject_hole(&out, center, radius)?,
                FaultSpec::Wormhole { p1, p2, r_w } => deploy::inject_wormhole(&out, p1, p2, r_w)?,
            };
        }
        Ok(out)
    }

    pub fn locator_config(&self) -> LocatorConfig {
        let a = &self.algorithm;
        LocatorConfig {
            tol: a.tol,
            power: PowerConfig {
                rel_tol: a.power_rel_tol,
                max_iters: a.max_iters,
                seed: self.seed,
            },
            retry_factor: a.retry_factor,
            girth_factor: a.girth_factor,
            ..LocatorConfig::default()
        }
    }
}
