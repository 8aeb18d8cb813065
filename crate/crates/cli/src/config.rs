//! TOML run configuration. Every key is optional; command-line flags win.

use std::path::{Path, PathBuf};

use serde::Deserialize;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub threads: Option<usize>,
    pub output: Option<PathBuf>,
    pub seed: Option<u64>,
    #[serde(default)]
    pub degennes: DeGennesSection,
    #[serde(default)]
    pub curve: CurveSection,
    #[serde(default)]
    pub cylinder: CylinderSection,
    #[serde(default)]
    pub disk: DiskSection,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub projectors: ProjectorSection,
    #[serde(default)]
    pub variational: VariationalSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeGennesSection {
    pub xi: Option<f64>,
    pub n_points: Option<usize>,
    pub tolerance: Option<f64>,
    pub xi_min: Option<f64>,
    pub xi_max: Option<f64>,
    pub xi_step: Option<f64>,
    pub c: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveSection {
    pub circle: Option<f64>,
    pub ellipse: Option<[f64; 2]>,
    pub file: Option<PathBuf>,
    pub points: Option<usize>,
    pub b: Option<f64>,
    pub boundary_b: Option<f64>,
    pub lambda: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CylinderSection {
    #[serde(rename = "S")]
    pub s: Option<f64>,
    #[serde(rename = "T")]
    pub t: Option<f64>,
    pub b: Option<f64>,
    pub lambda: Option<f64>,
    pub h: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiskSection {
    #[serde(rename = "R")]
    pub radius: Option<f64>,
    pub b: Option<f64>,
    pub h: Option<f64>,
    pub m_margin: Option<i64>,
    pub n_radial: Option<usize>,
    pub r_out: Option<f64>,
    pub exterior: Option<bool>,
    pub threshold_frac: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub h_list: Option<Vec<f64>>,
    pub a: Option<f64>,
    pub lambda_frac: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProjectorSection {
    pub xi_cut: Option<f64>,
    pub j_max: Option<usize>,
    pub grid_step: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariationalSection {
    pub trials: Option<usize>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        Self::parse(&text).map_err(|e| format!("{}: {e}", path.display()))
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }
}
