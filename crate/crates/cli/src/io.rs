//! Operator files and number formatting.

use std::fmt;
use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use qot_core::linalg::ComplexMatrix;
use qot_core::qstates::validate_density;
use qot_core::{DensityMatrix, HermitianOperator};

/// Failure exit codes: bad input or a numerical problem.
#[derive(Debug)]
pub enum CliError {
    Input(String),
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 1,
            CliError::Numerical(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl From<qot_core::Error> for CliError {
    fn from(e: qot_core::Error) -> Self {
        use qot_core::Error as E;
        match e {
            E::Solver { .. } | E::NoConvergence { .. } | E::Infeasible { .. } => CliError::Numerical(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// `{"dims": [...], "matrix": [[[re, im], ...], ...]}`, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorFile {
    pub dims: Vec<usize>,
    pub matrix: Vec<Vec<[f64; 2]>>,
}

impl OperatorFile {
    pub fn from_matrix(m: &ComplexMatrix, dims: &[usize]) -> Self {
        let matrix = (0..m.rows())
            .map(|r| (0..m.cols()).map(|c| [round12(m[(r, c)].re), round12(m[(r, c)].im)]).collect())
            .collect();
        Self {
            dims: dims.to_vec(),
            matrix,
        }
    }

    pub fn to_matrix(&self, origin: &str) -> CliResult<ComplexMatrix> {
        let n = self.matrix.len();
        if n == 0 {
            return Err(CliError::Input(format!("{origin}: field `matrix` is empty")));
        }
        if let Some(r) = self.matrix.iter().position(|row| row.len() != n) {
            return Err(CliError::Input(format!(
                "{origin}: field `matrix` row {r} has {} entries, expected {n}",
                self.matrix[r].len()
            )));
        }
        let product: usize = self.dims.iter().product();
        if self.dims.is_empty() || product != n {
            return Err(CliError::Input(format!(
                "{origin}: field `dims` {:?} does not multiply to the matrix size {n}",
                self.dims
            )));
        }
        let data = self
            .matrix
            .iter()
            .flat_map(|row| row.iter().map(|&[re, im]| Complex64::new(re, im)))
            .collect();
        ComplexMatrix::from_vec(n, n, data).map_err(|e| CliError::Input(format!("{origin}: field `matrix`: {e}")))
    }
}

fn read_json(path: &Path) -> CliResult<Value> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn operator_from_value(value: Value, origin: &str) -> CliResult<OperatorFile> {
    serde_json::from_value(value).map_err(|e| CliError::Input(format!("{origin}: {e}")))
}

pub fn read_operator_file(path: &Path) -> CliResult<OperatorFile> {
    operator_from_value(read_json(path)?, &path.display().to_string())
}

pub fn read_state(path: &Path) -> CliResult<DensityMatrix> {
    let origin = path.display().to_string();
    let file = read_operator_file(path)?;
    let m = file.to_matrix(&origin)?;
    validate_density(&m, &file.dims).map_err(|e| CliError::Input(format!("{origin}: {e}")))
}

pub fn read_observable(path: &Path) -> CliResult<HermitianOperator> {
    let origin = path.display().to_string();
    let file = read_operator_file(path)?;
    let m = file.to_matrix(&origin)?;
    HermitianOperator::new(m, file.dims).map_err(|e| CliError::Input(format!("{origin}: {e}")))
}

/// Reads a bipartite state from an operator file or from any document with a
/// `coupling` field holding one (as printed by `qot distance`).
pub fn read_coupling(path: &Path) -> CliResult<DensityMatrix> {
    let origin = path.display().to_string();
    let mut value = read_json(path)?;
    if let Some(inner) = value.get_mut("coupling") {
        value = inner.take();
    }
    let file = operator_from_value(value, &origin)?;
    let m = file.to_matrix(&origin)?;
    let n = m.rows();
    let dims = if file.dims.len() == 2 {
        file.dims.clone()
    } else {
        let d = (n as f64).sqrt().round() as usize;
        if d * d != n {
            return Err(CliError::Input(format!("{origin}: dimension {n} is not d×d")));
        }
        vec![d, d]
    };
    validate_density(&m, &dims).map_err(|e| CliError::Input(format!("{origin}: {e}")))
}

/// Rounds to 12 significant digits so that JSON output is stable across platforms.
pub fn round12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { 0.0 } else { x };
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

/// C-style `%.10e`: two-digit signed exponent.
pub fn sci10(x: f64) -> String {
    let s = format!("{x:.10e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}
