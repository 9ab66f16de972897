//! Experiment configuration: one JSON document per run.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use zswkb::{PotentialSpec64, Problem64, Tolerances};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub potential: PotentialSpec64,
    pub lambda0: f64,
    pub delta: f64,
    /// Sorted descending.
    pub h_list: Vec<f64>,
    /// Sorted descending; `0` is allowed (and needed for baselines).
    pub eps_list: Vec<f64>,
    /// Half-width of the sampling interval for the well check.
    pub cutoff: f64,
    /// Overrides of [`Tolerances`] fields by name.
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub seed_metadata: String,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from(".")
}

fn descending(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[0] >= w[1])
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let cfg: ExperimentConfig =
            serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks list shapes and tolerances, then builds the baseline problem to
    /// surface potential and well errors.
    pub fn validate(&self) -> anyhow::Result<()> {
        if self.h_list.is_empty() || self.eps_list.is_empty() {
            bail!("h_list and eps_list must be nonempty");
        }
        if !self.h_list.iter().all(|h| *h > 0.0 && h.is_finite()) {
            bail!("h_list entries must be positive");
        }
        if !self.eps_list.iter().all(|e| *e >= 0.0 && e.is_finite()) {
            bail!("eps_list entries must be non-negative");
        }
        if !descending(&self.h_list) || !descending(&self.eps_list) {
            bail!("h_list and eps_list must be sorted descending");
        }
        if !(self.delta > 0.0) {
            bail!("delta must be positive");
        }
        if !(self.cutoff > 0.0) {
            bail!("cutoff must be positive");
        }
        if let Some((k, v)) = self.tolerances.iter().find(|(_, v)| !(**v > 0.0)) {
            bail!("tolerance {k} = {v} must be positive");
        }
        self.effective_tolerances()?;
        self.problem(self.h_list[0], self.eps_list[0])?;
        Ok(())
    }

    /// Defaults with the configured overrides applied.
    pub fn effective_tolerances(&self) -> anyhow::Result<Tolerances<f64>> {
        let mut v = serde_json::to_value(Tolerances::<f64>::default())?;
        let obj = v.as_object_mut().expect("tolerances serialize as an object");
        for (name, value) in &self.tolerances {
            let slot = obj.get_mut(name).with_context(|| format!("unknown tolerance {name}"))?;
            *slot = if slot.is_u64() {
                if value.fract() != 0.0 {
                    bail!("tolerance {name} must be an integer");
                }
                serde_json::Value::from(*value as u64)
            } else {
                serde_json::Value::from(*value)
            };
        }
        Ok(serde_json::from_value(v)?)
    }

    pub fn problem(&self, h: f64, eps: f64) -> anyhow::Result<Problem64> {
        let p = Problem64::with_sample_cutoff(self.potential.clone(), self.lambda0, self.delta, h, eps, self.cutoff)?;
        Ok(p.with_tolerances(self.effective_tolerances()?))
    }

    /// Hex SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(&bytes))
    }
}
