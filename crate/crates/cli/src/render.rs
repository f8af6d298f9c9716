//! Number formatting and the JSON document types.

use std::path::Path;

use pryce_core::linalg::Matrix;
use pryce_core::verify::VerificationReport;
use pryce_core::Vec3;
use serde::{Deserialize, Serialize};

use crate::Failure;

pub const SCHEMA: u32 = 1;

/// Row-major matrix of `[re, im]` pairs.
pub type JsonMatrix = Vec<Vec<[f64; 2]>>;

pub fn json_matrix<const N: usize>(m: &Matrix<N>) -> JsonMatrix {
    (0..N).map(|i| (0..N).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect()
}

/// 15 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.14e}")
}

pub fn human_matrix(m: &JsonMatrix) -> String {
    m.iter()
        .map(|row| {
            row.iter()
                .map(|[re, im]| format!("{:>22} {:>22}i", num(*re), num(*im)))
                .collect::<Vec<_>>()
                .join("   ")
        })
        .collect::<Vec<_>>()
        .join("\n")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OpsDocument {
    pub schema: u32,
    pub op: String,
    pub m: f64,
    pub p: Vec3,
    pub basis: String,
    pub labels: Vec<String>,
    pub matrices: Vec<JsonMatrix>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub schema: u32,
    #[serde(flatten)]
    pub report: VerificationReport,
}

/// Linear law `y(t) = y(0) + v·t` checked along the time grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitDocument {
    pub law: String,
    pub residuals: Vec<f64>,
    pub max_residual: f64,
    pub max_deviation: f64,
    pub max_velocity_drift: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WavepacketDocument {
    pub schema: u32,
    pub m: f64,
    pub center: Vec3,
    pub width: f64,
    pub pol: String,
    pub species: String,
    pub basis: String,
    pub points: usize,
    pub check_points: usize,
    pub columns: Vec<String>,
    /// One row per time: `t` followed by the observables in `columns` order.
    pub rows: Vec<Vec<f64>>,
    pub max_error_estimate: f64,
    pub max_imaginary: f64,
    pub fits: Vec<FitDocument>,
}

/// Prints `doc` as JSON when requested and writes it to `--out`.
pub fn emit_json<T: Serialize>(doc: &T, stdout: bool, out: Option<&Path>) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(doc).map_err(|e| Failure::usage(e.to_string()))?;
    if stdout {
        out!("{text}");
    }
    if let Some(path) = out {
        std::fs::write(path, format!("{text}\n"))?;
    }
    Ok(())
}
