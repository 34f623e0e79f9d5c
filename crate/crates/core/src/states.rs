//! Covariance data of multimode states with block-diagonal second moments.
//!
//! A state is described by its position block `γxx`, momentum block `γpp`
//! (no x–p correlations) and, optionally, the standard deviations of each
//! measured entry. The vacuum has `γxx = γpp = ½·E`.
//!
//! # File format
//!
//! ```json
//! {
//!   "n": 2,
//!   "label": "optional text",
//!   "gamma_xx": [[0.5, 0.0], [0.0, 0.5]],
//!   "gamma_pp": [[0.5, 0.0], [0.0, 0.5]],
//!   "sigma_xx": [[0.01, 0.01], [0.01, 0.01]],
//!   "sigma_pp": [[0.01, 0.01], [0.01, 0.01]]
//! }
//! ```
//!
//! Matrices are row-major; row `i` belongs to mode `i + 1`. The sigma blocks
//! are optional but must appear together.

use std::fmt::Write as _;
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::linalg::{block_diag, symplectic_spectrum, SymMatrix};

/// Asymmetry tolerated in loaded matrices before they are rejected.
pub const LOAD_SYMMETRY_TOLERANCE: f64 = 1e-8;

/// A state is physical when its smallest symplectic eigenvalue is at least
/// `½ − PHYSICALITY_TOLERANCE`.
pub const PHYSICALITY_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct CVState {
    pub label: String,
    pub gamma_xx: SymMatrix,
    pub gamma_pp: SymMatrix,
    pub sigma_xx: Option<SymMatrix>,
    pub sigma_pp: Option<SymMatrix>,
}

impl CVState {
    pub fn new(label: impl Into<String>, gamma_xx: SymMatrix, gamma_pp: SymMatrix) -> Result<Self> {
        gamma_pp.check_dim(gamma_xx.n())?;
        Ok(CVState {
            label: label.into(),
            gamma_xx,
            gamma_pp,
            sigma_xx: None,
            sigma_pp: None,
        })
    }

    pub fn with_errors(mut self, sigma_xx: SymMatrix, sigma_pp: SymMatrix) -> Result<Self> {
        sigma_xx.check_dim(self.n())?;
        sigma_pp.check_dim(self.n())?;
        for s in [&sigma_xx, &sigma_pp] {
            if s.as_matrix().iter().any(|&v| v < 0.0) {
                return Err(Error::Load("negative standard deviation".into()));
            }
        }
        self.sigma_xx = Some(sigma_xx);
        self.sigma_pp = Some(sigma_pp);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.gamma_xx.n()
    }

    pub fn has_error_model(&self) -> bool {
        self.sigma_xx.is_some() && self.sigma_pp.is_some()
    }

    /// `diag(γxx, γpp)` in `(x₁…xₙ, p₁…pₙ)` ordering.
    pub fn covariance(&self) -> SymMatrix {
        block_diag(&self.gamma_xx, &self.gamma_pp)
    }

    pub fn to_json(&self) -> String {
        let mut out = String::new();
        out.push_str("{\n");
        let _ = writeln!(out, "  \"n\": {},", self.n());
        let _ = writeln!(out, "  \"label\": {},", serde_json::to_string(&self.label).unwrap_or_default());
        let mut blocks = vec![("gamma_xx", &self.gamma_xx), ("gamma_pp", &self.gamma_pp)];
        if let (Some(sx), Some(sp)) = (&self.sigma_xx, &self.sigma_pp) {
            blocks.push(("sigma_xx", sx));
            blocks.push(("sigma_pp", sp));
        }
        let rendered: Vec<String> = blocks
            .iter()
            .map(|(name, m)| format!("  \"{name}\": {}", matrix_json(m, "  ")))
            .collect();
        out.push_str(&rendered.join(",\n"));
        out.push_str("\n}\n");
        out
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }
}

/// Row-major nested array with 17 significant digits per entry.
pub(crate) fn matrix_json(m: &SymMatrix, indent: &str) -> String {
    let rows: Vec<String> = m
        .to_rows()
        .iter()
        .map(|row| {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
            format!("{indent}  [{}]", cells.join(", "))
        })
        .collect();
    format!("[\n{}\n{indent}]", rows.join(",\n"))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct StateFile {
    n: usize,
    #[serde(default)]
    label: Option<String>,
    gamma_xx: Vec<Vec<f64>>,
    gamma_pp: Vec<Vec<f64>>,
    #[serde(default)]
    sigma_xx: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    sigma_pp: Option<Vec<Vec<f64>>>,
}

fn load_block(name: &str, rows: &[Vec<f64>], n: usize) -> Result<SymMatrix> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
        return Err(Error::Load(format!(
            "{name} must be {n}x{n}, got {}x{cols}",
            rows.len()
        )));
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let d = (rows[i][j] - rows[j][i]).abs();
            if d > LOAD_SYMMETRY_TOLERANCE {
                return Err(Error::Load(format!(
                    "{name} is not symmetric at ({}, {}): |difference| = {d:e}",
                    i + 1,
                    j + 1
                )));
            }
        }
    }
    SymMatrix::from_rows(rows).map_err(|e| Error::Load(format!("{name}: {e}")))
}

/// Parse a state document.
pub fn parse_state(text: &str) -> Result<CVState> {
    let file: StateFile =
        serde_json::from_str(text).map_err(|e| Error::Load(format!("malformed state JSON: {e}")))?;
    let n = file.n;
    if n == 0 {
        return Err(Error::Load("n must be positive".into()));
    }
    let gamma_xx = load_block("gamma_xx", &file.gamma_xx, n)?;
    let gamma_pp = load_block("gamma_pp", &file.gamma_pp, n)?;
    let state = CVState::new(file.label.unwrap_or_default(), gamma_xx, gamma_pp)?;
    match (file.sigma_xx, file.sigma_pp) {
        (None, None) => Ok(state),
        (Some(sx), Some(sp)) => {
            let sx = load_block("sigma_xx", &sx, n)?;
            let sp = load_block("sigma_pp", &sp, n)?;
            state.with_errors(sx, sp)
        }
        _ => Err(Error::Load(
            "sigma_xx and sigma_pp must be given together".into(),
        )),
    }
}

pub fn load_state(path: impl AsRef<Path>) -> Result<CVState> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Load(format!("{}: {e}", path.display())))?;
    parse_state(&text)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Physicality {
    pub physical: bool,
    pub min_symplectic_eigenvalue: f64,
}

/// Uncertainty-principle check `γ + (i/2) J ≥ 0`, via the symplectic
/// spectrum.
pub fn is_physical(state: &CVState) -> Result<Physicality> {
    let spectrum = symplectic_spectrum(&state.covariance())?;
    let min = spectrum.min();
    Ok(Physicality {
        physical: min >= 0.5 - PHYSICALITY_TOLERANCE,
        min_symplectic_eigenvalue: min,
    })
}

/// Partial transposition on the given 0-based modes: `p → −p` on those
/// modes, which flips the sign of the matching rows and columns of `γpp`.
pub fn partial_transpose(state: &CVState, modes: &[usize]) -> Result<CVState> {
    let n = state.n();
    if let Some(&bad) = modes.iter().find(|&&m| m >= n) {
        return Err(Error::InvalidArgument(format!(
            "mode {} out of range 1..={n}",
            bad + 1
        )));
    }
    let sign: Vec<f64> = (0..n)
        .map(|i| if modes.contains(&i) { -1.0 } else { 1.0 })
        .collect();
    let mut flipped = state.gamma_pp.clone();
    for i in 0..n {
        for j in i..n {
            let v = state.gamma_pp.get(i, j) * sign[i] * sign[j];
            flipped.set(i, j, v);
        }
    }
    let mut out = state.clone();
    out.gamma_pp = flipped;
    Ok(out)
}

pub const BUILTIN_STATES: &[&str] = &["ppt4", "klev4", "vacuum4"];

fn half(rows: [[f64; 4]; 4]) -> SymMatrix {
    let rows: Vec<Vec<f64>> = rows.iter().map(|r| r.iter().map(|v| 0.5 * v).collect()).collect();
    SymMatrix::from_rows(&rows).expect("built-in matrix")
}

fn rows4(rows: [[f64; 4]; 4]) -> SymMatrix {
    let rows: Vec<Vec<f64>> = rows.iter().map(|r| r.to_vec()).collect();
    SymMatrix::from_rows(&rows).expect("built-in matrix")
}

/// Built-in example states.
///
/// * `ppt4`: four-mode bound-entangled state, positive under every
///   partial transposition of two modes.
/// * `klev4`: measured four-mode cluster-type state with per-entry errors.
/// * `vacuum4`: four vacuum modes with uniform errors 0.01, a separable
///   negative control.
pub fn builtin_state(name: &str) -> Result<CVState> {
    match name {
        "ppt4" => CVState::new(
            "ppt4",
            half([
                [2.0, 0.0, 1.0, 0.0],
                [0.0, 2.0, 0.0, -1.0],
                [1.0, 0.0, 2.0, 0.0],
                [0.0, -1.0, 0.0, 2.0],
            ]),
            half([
                [1.0, 0.0, 0.0, -1.0],
                [0.0, 1.0, -1.0, 0.0],
                [0.0, -1.0, 4.0, 0.0],
                [-1.0, 0.0, 0.0, 4.0],
            ]),
        ),
        "klev4" => CVState::new(
            "klev4",
            rows4([
                [1.09921, 0.16092, -0.17609, -0.84831],
                [0.16092, 0.40938, -0.16060, -0.18963],
                [-0.17609, -0.16060, 0.46060, 0.04319],
                [-0.84831, -0.18963, 0.04319, 1.06419],
            ]),
            rows4([
                [1.09921, 0.35533, 0.36439, 0.91386],
                [0.35533, 0.92282, 0.57440, 0.43388],
                [0.36439, 0.57440, 1.04339, 0.34868],
                [0.91386, 0.43388, 0.34868, 1.06419],
            ]),
        )?
        .with_errors(
            rows4([
                [0.00327, 0.01041, 0.00894, 0.00647],
                [0.01041, 0.00822, 0.01848, 0.01899],
                [0.00894, 0.01848, 0.00861, 0.01345],
                [0.00647, 0.01899, 0.01345, 0.00549],
            ]),
            rows4([
                [0.00458, 0.01009, 0.02767, 0.04289],
                [0.01009, 0.01023, 0.02101, 0.02085],
                [0.02767, 0.02101, 0.01466, 0.01955],
                [0.04289, 0.02085, 0.01955, 0.00455],
            ]),
        ),
        "vacuum4" => CVState::new(
            "vacuum4",
            SymMatrix::identity(4).scaled(0.5),
            SymMatrix::identity(4).scaled(0.5),
        )?
        .with_errors(
            SymMatrix::outer(&[0.1; 4]),
            SymMatrix::outer(&[0.1; 4]),
        ),
        other => Err(Error::UnknownState(other.to_string())),
    }
}
