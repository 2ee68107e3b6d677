//! Input file formats for the commands.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Deserialize;

use siegel_core::hecke::ValueJson;
use siegel_core::CycloNumber;

use crate::CliError;

pub fn load<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Load(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Load(format!("{}: {e}", path.display())))
}

pub fn load_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Load(format!("cannot read {}: {e}", path.display())))
}

pub fn value(v: &ValueJson) -> Result<CycloNumber, CliError> {
    v.value().map_err(|e| CliError::Load(e.to_string()))
}

/// One (chi, m, sign) row of an interpolation job.
#[derive(Clone, Debug, Deserialize)]
pub struct Row {
    pub chi_modulus: u64,
    pub chi_exps: Vec<u64>,
    pub m: String,
    /// "+" or "-".
    pub sign: String,
}

/// Interpolation job. Without rows, every primitive character of conductor
/// p^l (l up to --bound) is paired with every half-integral m in both ranges.
#[derive(Clone, Debug, Deserialize)]
pub struct InterpolationJob {
    pub p: u64,
    pub weight: String,
    pub tau_twice: Vec<Vec<i64>>,
    pub t: String,
    pub b: String,
    pub c: u64,
    #[serde(default = "one")]
    pub psi_inf_sign: i32,
    #[serde(default)]
    pub twist_sq_trivial: bool,
    pub lambda_tau: ValueJson,
    pub g_tau: ValueJson,
    pub lambda0: ValueJson,
    pub l_ratio: ValueJson,
    #[serde(default)]
    pub gauss: Option<ValueJson>,
    #[serde(default = "eight")]
    pub precision: u32,
    #[serde(default)]
    pub rows: Vec<Row>,
}

fn one() -> i32 {
    1
}

fn eight() -> u32 {
    8
}
