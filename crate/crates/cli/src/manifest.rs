use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use codespace_core::vqe::{AnsatzChoice, VqeConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Group,
    Diagonalize,
    Vqe,
    Counts,
    Exact,
}

/// Everything one invocation needs, validated up front.
#[derive(Clone, Debug)]
pub struct RunManifest {
    pub command: Command,
    pub inputs: Vec<PathBuf>,
    pub n_electrons: Option<usize>,
    pub config: VqeConfig,
    pub out: Option<PathBuf>,
    pub timestamp: bool,
}

impl RunManifest {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        command: Command,
        inputs: Vec<PathBuf>,
        n_electrons: Option<usize>,
        ansatz: &str,
        layers: usize,
        max_iterations: usize,
        step_tolerance: f64,
        init_value: f64,
        out: Option<PathBuf>,
        timestamp: bool,
    ) -> anyhow::Result<Self> {
        for p in &inputs {
            if !p.is_file() {
                bail!("input `{}` does not exist", p.display());
            }
        }
        let mut stems: Vec<String> = inputs.iter().map(|p| stem(p)).collect();
        stems.sort();
        if let Some(w) = stems.windows(2).find(|w| w[0] == w[1]) {
            bail!("two inputs share the file stem `{}`; outputs would collide", w[0]);
        }
        let config = VqeConfig {
            ansatz: ansatz.parse::<AnsatzChoice>()?,
            layers,
            init_value,
            max_iterations,
            step_tolerance,
            ..VqeConfig::default()
        };
        config.validate()?;
        if let Some(dir) = &out {
            std::fs::create_dir_all(dir).with_context(|| format!("creating `{}`", dir.display()))?;
        }
        Ok(Self {
            command,
            inputs,
            n_electrons,
            config,
            out,
            timestamp,
        })
    }
}

pub fn stem(p: &Path) -> String {
    p.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "input".to_string())
}
