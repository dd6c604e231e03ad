//! Experiment configuration: one flat JSON document shared by the `sweep`
//! and `pde-compare` subcommands. Unknown keys are rejected.

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::Deserialize;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub x_min: f64,
    pub x_max: f64,
    pub n_points: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            x_min: -8.0,
            x_max: 8.0,
            n_points: 801,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: String,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    #[serde(default = "default_h")]
    pub h: f64,
    /// 1 selects the F_n family; even/odd p ≥ 2 the power families.
    #[serde(default = "default_p")]
    pub p: u32,
    #[serde(default = "default_x")]
    pub x: f64,
    #[serde(default = "default_t")]
    pub t: f64,
    #[serde(default)]
    pub n_list: Vec<usize>,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default = "default_tol")]
    pub tol: f64,
    /// Comparison window for pde-compare; defaults to the central half of
    /// the grid.
    #[serde(default)]
    pub window: Option<(f64, f64)>,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
}

fn default_h() -> f64 {
    1.2
}
fn default_p() -> u32 {
    1
}
fn default_x() -> f64 {
    1.0
}
fn default_t() -> f64 {
    1.0
}
fn default_tol() -> f64 {
    1e-8
}
fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

impl ExperimentConfig {
    pub fn load(path: &std::path::Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| format!("bad config {}: {e}", path.display()))
    }

    /// Output directory, honoring the QUADPROP_OUTPUT_DIR override.
    pub fn resolved_output_dir(&self) -> PathBuf {
        match std::env::var_os("QUADPROP_OUTPUT_DIR") {
            Some(dir) if !dir.is_empty() => PathBuf::from(dir),
            _ => self.output_dir.clone(),
        }
    }

    pub fn window_or_default(&self) -> (f64, f64) {
        self.window.unwrap_or((self.grid.x_min / 2.0, self.grid.x_max / 2.0))
    }
}
