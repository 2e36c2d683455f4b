//! Scenario files: kernel, integration and output settings plus the initial patches.

use crate::error::{Error, Result};
use crate::scenarios::{make_shape, DoublyOddPreset, Shape};
use crate::velocity::{KernelSpec, PatchFamily};
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PatchSpec {
    pub kind: String,
    #[serde(default)]
    pub params: toml::Table,
    pub strength: f64,
}

impl PatchSpec {
    pub fn shape(&self) -> Result<Shape> {
        let mut t = self.params.clone();
        t.insert("kind".into(), toml::Value::String(self.kind.clone()));
        toml::Value::Table(t)
            .try_into()
            .map_err(|e: toml::de::Error| Error::ConfigError(format!("patch `{}`: {}", self.kind, e.message())))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Presets {
    pub doubly_odd: Option<DoublyOddPreset>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_c_alpha")]
    pub c_alpha: f64,
    /// Mollification radius; defaults to a tenth of the smallest patch diameter.
    pub epsilon: Option<f64>,
    #[serde(default = "default_chi_floor")]
    pub chi_floor: f64,
    #[serde(default = "default_cfl")]
    pub cfl: f64,
    #[serde(rename = "N", default = "default_n")]
    pub n: usize,
    pub t_end: f64,
    #[serde(default = "default_output_every")]
    pub output_every: usize,
    /// Stop once L exceeds this; defaults to 10³·L at t = 0.
    #[serde(rename = "ceiling_L")]
    pub ceiling_l: Option<f64>,
    /// Upper bound on the time step in addition to the CFL limit.
    pub dt_max: Option<f64>,
    /// Write per-patch JSON and SVG frames at every recorded step.
    #[serde(default = "default_true")]
    pub snapshots: bool,
    #[serde(default)]
    pub patches: Vec<PatchSpec>,
    #[serde(default)]
    pub presets: Presets,
}

fn default_alpha() -> f64 {
    1.0 / 6.0
}
fn default_c_alpha() -> f64 {
    1.0
}
fn default_chi_floor() -> f64 {
    0.5
}
fn default_cfl() -> f64 {
    0.5
}
fn default_n() -> usize {
    256
}
fn default_output_every() -> usize {
    10
}
fn default_true() -> bool {
    true
}

impl SimConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let c: SimConfig = toml::from_str(s).map_err(|e| Error::ConfigError(e.message().to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn from_path(p: &Path) -> Result<Self> {
        let s = std::fs::read_to_string(p)
            .map_err(|e| Error::ConfigError(format!("{}: {e}", p.display())))?;
        Self::from_toml_str(&s)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::ConfigError(m.to_string()));
        if !(self.alpha > 0.0 && self.alpha < 0.5) {
            return bad("alpha must lie in (0, 1/2)");
        }
        if !(self.c_alpha > 0.0) {
            return bad("c_alpha must be positive");
        }
        if let Some(e) = self.epsilon {
            if !(e >= 0.0) {
                return bad("epsilon must be >= 0");
            }
        }
        if !(self.chi_floor > 0.0 && self.chi_floor < 1.0) {
            return bad("chi_floor must lie in (0, 1)");
        }
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return bad("cfl must lie in (0, 1]");
        }
        if self.n < 16 || self.n % 2 != 0 {
            return bad("N must be even and >= 16");
        }
        if !(self.t_end >= 0.0) {
            return bad("t_end must be >= 0");
        }
        if self.output_every == 0 {
            return bad("output_every must be >= 1");
        }
        if self.patches.is_empty() && self.presets.doubly_odd.is_none() {
            return bad("no patches and no preset given");
        }
        for p in &self.patches {
            p.shape()?;
            if !(p.strength != 0.0 && p.strength.is_finite()) {
                return bad("patch strengths must be finite and nonzero");
            }
        }
        Ok(())
    }

    /// Builds the initial family. With the doubly-odd preset, the listed patches (if
    /// any) are the upper-half base; otherwise the preset's own candidate is used.
    pub fn initial_family(&self) -> Result<PatchFamily> {
        let listed = self
            .patches
            .iter()
            .map(|p| Ok((make_shape(&p.shape()?, self.n)?, p.strength)))
            .collect::<Result<Vec<_>>>()?;
        match &self.presets.doubly_odd {
            Some(pre) => {
                let base = if listed.is_empty() { pre.base(self.n)? } else { listed };
                crate::scenarios::doubly_odd_config(&base)
            }
            None => {
                let (c, t): (Vec<_>, Vec<_>) = listed.into_iter().unzip();
                PatchFamily::new(c, t)
            }
        }
    }

    /// Kernel for the given family, filling the default ε.
    pub fn kernel(&self, family: &PatchFamily) -> KernelSpec {
        let eps = self.epsilon.unwrap_or_else(|| {
            0.1 * family.curves.iter().map(|c| c.diameter_bound()).fold(f64::INFINITY, f64::min)
        });
        KernelSpec { alpha: self.alpha, c_alpha: self.c_alpha, epsilon: eps, chi_floor: self.chi_floor }
    }
}
