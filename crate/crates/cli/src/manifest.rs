//! Run manifests: everything needed to reproduce an output file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use pweight_core::barrier::BarrierConfig;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::tsv::write_atomic;

/// JSON has no infinity; non-finite reals are written as strings like `"inf"`.
pub fn serialize_real<S: serde::Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if x.is_finite() {
        s.serialize_f64(*x)
    } else {
        s.serialize_str(&x.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BarrierSettings {
    pub t0: f64,
    pub kappa: f64,
    pub eps: f64,
    pub ls_alpha: f64,
    pub ls_beta: f64,
    pub newton_tol: f64,
    pub max_newton: usize,
    pub subsample_l: usize,
    pub dedup_c0: f64,
}

impl From<&BarrierConfig> for BarrierSettings {
    fn from(c: &BarrierConfig) -> Self {
        Self {
            t0: c.t0,
            kappa: c.kappa,
            eps: c.eps,
            ls_alpha: c.ls_alpha,
            ls_beta: c.ls_beta,
            newton_tol: c.newton_tol,
            max_newton: c.max_newton,
            subsample_l: c.subsample_l,
            dedup_c0: c.dedup_c0,
        }
    }
}

/// Written next to every output as `<output>.manifest.json`.
///
/// Holds no timestamps or host details, so identical runs give identical
/// manifests.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub subcommand: String,
    pub parameters: serde_json::Value,
    pub barrier: BarrierSettings,
    /// Input path to SHA-256 of its bytes.
    pub inputs: BTreeMap<String, String>,
}

impl RunManifest {
    pub fn new(subcommand: &str, parameters: serde_json::Value, barrier: &BarrierConfig) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            subcommand: subcommand.to_string(),
            parameters,
            barrier: barrier.into(),
            inputs: BTreeMap::new(),
        }
    }

    pub fn add_input(&mut self, path: &Path) -> Result<()> {
        let bytes = std::fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
        self.inputs.insert(path.display().to_string(), hex::encode(Sha256::digest(&bytes)));
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest fields are always serializable") + "\n"
    }

    pub fn path_for(output: &Path) -> PathBuf {
        let mut s = output.as_os_str().to_owned();
        s.push(".manifest.json");
        PathBuf::from(s)
    }

    pub fn write_beside(&self, output: &Path) -> Result<()> {
        write_atomic(&Self::path_for(output), self.to_json().as_bytes())
    }
}
