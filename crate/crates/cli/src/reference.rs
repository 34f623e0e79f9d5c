//! Published values the `reproduce` verb compares against.

use cvwitness::bounds::WitnessPair;
use cvwitness::linalg::SymMatrix;

pub type Table1Row = (usize, f64, Option<f64>, Option<f64>, f64);

/// Bounds table for the symmetric witness: `(n, q, a, b, f)`. The analytic
/// and biseparable rows start at three modes.
pub const TABLE1: [Table1Row; 7] = [
    (2, 0.0, None, None, 2.0),
    (3, 3.46, Some(5.00), Some(5.46), 6.0),
    (4, 8.48, Some(10.03), Some(10.89), 12.0),
    (5, 15.49, Some(17.06), Some(18.26), 20.0),
    (6, 24.49, Some(26.07), Some(27.59), 30.0),
    (7, 35.49, Some(37.08), Some(38.89), 42.0),
    (8, 48.49, Some(50.09), Some(52.17), 56.0),
];
pub const TABLE1_TOL: f64 = 0.01;

pub const PPT_X: f64 = 0.144375;
pub const PPT_Y: f64 = 0.084087;
pub const PPT_P: f64 = 0.232000;
pub const PPT_Q: f64 = 0.039543;
pub const PPT_G: f64 = 0.435170;
pub const PPT_CERTIFICATE: f64 = 0.481359;
pub const PPT_TOL: f64 = 1e-6;
pub const PPT_BOUND_SLACK: f64 = 1e-8;

/// Witness for the bound-entangled state, built from `(x, y, p, q)`.
pub fn ppt_witness() -> WitnessPair {
    let (x, y, p, q) = (PPT_X, PPT_Y, PPT_P, PPT_Q);
    let xy = (x * y).sqrt();
    let pq = (p * q).sqrt();
    let xm = SymMatrix::from_rows(&[
        vec![x, 0.0, -xy, 0.0],
        vec![0.0, x, 0.0, xy],
        vec![-xy, 0.0, y, 0.0],
        vec![0.0, xy, 0.0, y],
    ])
    .expect("symmetric");
    let pm = SymMatrix::from_rows(&[
        vec![p, 0.0, 0.0, pq],
        vec![0.0, p, pq, 0.0],
        vec![0.0, pq, q, 0.0],
        vec![pq, 0.0, 0.0, q],
    ])
    .expect("symmetric");
    WitnessPair::new(xm, pm).expect("PSD by construction")
}

/// Four-mode witness violating every bipartition bound of `klev4`.
pub fn genuine_witness() -> WitnessPair {
    let x = SymMatrix::from_rows(&[
        vec![0.39234, -0.20267, 0.24691, 0.30527],
        vec![-0.20267, 0.88526, 0.09450, 0.09080],
        vec![0.24691, 0.09450, 0.58391, 0.20795],
        vec![0.30527, 0.09080, 0.20795, 0.39504],
    ])
    .expect("symmetric");
    let p = SymMatrix::from_rows(&[
        vec![0.22992, -0.13140, -0.00477, -0.11723],
        vec![-0.13140, 0.52598, -0.32316, -0.16699],
        vec![-0.00477, -0.32316, 0.39949, 0.06971],
        vec![-0.11723, -0.16699, 0.06971, 0.31242],
    ])
    .expect("symmetric");
    WitnessPair::new(x, p).expect("PSD")
}

pub const GENUINE_G: f64 = 1.47484;
pub const GENUINE_G_TOL: f64 = 1e-4;
pub const GENUINE_SIGMA: f64 = 0.01947;
pub const GENUINE_SIGMA_TOL: f64 = 1e-4;
pub const GENUINE_MIN_S: f64 = 4.43199;
pub const GENUINE_S_TOL: f64 = 0.01;
pub const GENUINE_BOUND_TOL: f64 = 1e-3;

/// Separability bound of the genuine witness per bipartition.
pub const GENUINE_BOUNDS: [(&str, f64); 7] = [
    ("1|234", 1.65474),
    ("2|134", 1.66193),
    ("3|124", 1.56935),
    ("4|123", 1.63974),
    ("12|34", 1.81056),
    ("13|24", 1.74993),
    ("14|23", 1.56114),
];

pub const ALT_TOL: f64 = 1e-9;
