//! JSON triplet files.
//!
//! ```json
//! { "mu": 1.0, "theta_r": 0.0,
//!   "a": [[[1,0],[0,0]], [[0,0],[1,0]]],
//!   "b": [[[1,0],[0,0]], [[0,0],[1,0]]],
//!   "c": [[[0.5,0],[0.5,1]], [[-0.5,1],[0.5,0]]] }
//! ```
//!
//! Complex numbers are `[re, im]` pairs and matrices are arrays of rows.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::linalg::{ComplexMatrix, C64};
use crate::triplet::{TripletConfig, TripletError};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed config: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("malformed config: {0}")]
    Shape(String),
    #[error(transparent)]
    Triplet(#[from] TripletError),
}

type Rows = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TripletFile {
    pub mu: f64,
    #[serde(default)]
    pub theta_r: f64,
    pub a: Rows,
    pub b: Rows,
    pub c: Rows,
}

fn to_matrix(name: &str, rows: &Rows) -> Result<ComplexMatrix, ConfigError> {
    let n = rows.len();
    let m = rows.first().map_or(0, Vec::len);
    if n == 0 || m == 0 || rows.iter().any(|r| r.len() != m) {
        return Err(ConfigError::Shape(format!("`{name}` must be a nonempty rectangular array of rows")));
    }
    let data: Vec<C64> = rows.iter().flatten().map(|&[re, im]| C64::new(re, im)).collect();
    ComplexMatrix::new(n, m, data).map_err(|e| ConfigError::Shape(format!("`{name}`: {e}")))
}

fn to_rows(m: &ComplexMatrix) -> Rows {
    (0..m.rows()).map(|i| (0..m.cols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect()
}

impl TripletFile {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Io { path: path.display().to_string(), source })?;
        Self::parse(&text)
    }

    pub fn from_triplet(cfg: &TripletConfig) -> Self {
        Self { mu: cfg.mu, theta_r: cfg.theta_r, a: to_rows(&cfg.a), b: to_rows(&cfg.b), c: to_rows(&cfg.c) }
    }

    /// Shape-checked triplet; the Σ, spectrum and minimality checks happen in `validate`.
    pub fn to_triplet(&self) -> Result<TripletConfig, ConfigError> {
        let a = to_matrix("a", &self.a)?;
        let b = to_matrix("b", &self.b)?;
        let c = to_matrix("c", &self.c)?;
        Ok(TripletConfig::new(a, b, c, self.mu, self.theta_r)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data always serializes")
    }
}
