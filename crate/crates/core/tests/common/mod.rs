//! Reference data shared by the integration tests: the published
//! four-mode witness with its separability certificates, the rank-one
//! vectors of the bipartition search, and the PPT example parameters.

#![allow(dead_code)]

use cvwitness::bounds::WitnessPair;
use cvwitness::linalg::SymMatrix;
use cvwitness::partitions::{free_mask, Partition};

pub fn genuine_witness() -> WitnessPair {
    let x = SymMatrix::from_rows(&[
        vec![0.39234, -0.20267, 0.24691, 0.30527],
        vec![-0.20267, 0.88526, 0.09450, 0.09080],
        vec![0.24691, 0.09450, 0.58391, 0.20795],
        vec![0.30527, 0.09080, 0.20795, 0.39504],
    ])
    .unwrap();
    let p = SymMatrix::from_rows(&[
        vec![0.22992, -0.13140, -0.00477, -0.11723],
        vec![-0.13140, 0.52598, -0.32316, -0.16699],
        vec![-0.00477, -0.32316, 0.39949, 0.06971],
        vec![-0.11723, -0.16699, 0.06971, 0.31242],
    ])
    .unwrap();
    WitnessPair::new(x, p).unwrap()
}

pub const GENUINE_G: f64 = 1.47484;
pub const GENUINE_SIGMA: f64 = 0.01947;
pub const GENUINE_MIN_S: f64 = 4.43199;

/// Printed separability bound of the genuine witness per bipartition, with
/// the free entries of the maximizing `X'` and `P'` (in row-major order of
/// the upper triangle).
pub struct CertificateRow {
    pub partition: &'static str,
    pub bound: f64,
    pub x_free: &'static [f64],
    pub p_free: &'static [f64],
}

pub const GENUINE_CERTIFICATES: [CertificateRow; 7] = [
    CertificateRow {
        partition: "1|234",
        bound: 1.65474,
        x_free: &[-0.10873, 0.158136, 0.116524],
        p_free: &[-0.11914, 0.113758, 0.083761],
    },
    CertificateRow {
        partition: "2|134",
        bound: 1.66193,
        x_free: &[-0.07310, -0.03586, -0.01993],
        p_free: &[-0.05400, -0.01432, 0.02340],
    },
    CertificateRow {
        partition: "3|124",
        bound: 1.56935,
        x_free: &[0.22149, -0.01671, 0.24154],
        p_free: &[0.02836, -0.07629, 0.12842],
    },
    CertificateRow {
        partition: "4|123",
        bound: 1.63974,
        x_free: &[0.15483, 0.04047, 0.23966],
        p_free: &[0.05094, -0.05608, 0.12953],
    },
    CertificateRow {
        partition: "12|34",
        bound: 1.81056,
        x_free: &[0.19766, 0.11649, -0.02260, 0.03156],
        p_free: &[0.11949, 0.06522, -0.02001, 0.02362],
    },
    CertificateRow {
        partition: "13|24",
        bound: 1.74993,
        x_free: &[-0.10013, 0.12997, -0.03695, 0.25436],
        p_free: &[-0.07273, 0.06225, -0.05209, 0.17734],
    },
    CertificateRow {
        partition: "14|23",
        bound: 1.56114,
        x_free: &[-0.11435, 0.18571, -0.02360, 0.25307],
        p_free: &[-0.09531, 0.05497, -0.02171, 0.12643],
    },
];

/// `(X', P')` of a row: the genuine witness with its free entries replaced.
pub fn certificate_pair(row: &CertificateRow) -> (Partition, WitnessPair) {
    let partition = Partition::parse(row.partition, 4).unwrap();
    let mut w = genuine_witness();
    for (k, (i, j)) in free_mask(&partition).pairs().into_iter().enumerate() {
        w.x.set(i, j, row.x_free[k]);
        w.p.set(i, j, row.p_free[k]);
    }
    (partition, w)
}

/// Rank-one vectors `(h, g)` with the published score, per bipartition.
pub struct RankOneRow {
    pub partition: &'static str,
    pub h: [f64; 4],
    pub g: [f64; 4],
    pub s: f64,
    /// Score the random search must reach with a million trials.
    pub floor: f64,
}

pub const RANK_ONE_ROWS: [RankOneRow; 7] = [
    RankOneRow {
        partition: "1|234",
        h: [1.97, -0.01, 0.49, 1.88],
        g: [1.14, 0.18, -0.20, -1.03],
        s: 26.48,
        floor: 20.0,
    },
    RankOneRow {
        partition: "2|134",
        h: [-0.40, -1.99, -1.48, -0.74],
        g: [-0.15, -1.80, 1.24, 0.68],
        s: 18.08,
        floor: 12.0,
    },
    RankOneRow {
        partition: "3|124",
        h: [0.31, 1.93, 1.62, 0.32],
        g: [0.23, 1.65, -1.46, -0.19],
        s: 16.10,
        floor: 12.0,
    },
    RankOneRow {
        partition: "4|123",
        h: [1.77, 0.18, 0.44, 1.82],
        g: [-0.96, -0.18, -0.12, 1.21],
        s: 26.57,
        floor: 20.0,
    },
    RankOneRow {
        partition: "12|34",
        h: [1.91, 0.42, 0.75, 1.90],
        g: [-1.06, -0.60, 0.50, 1.19],
        s: 27.79,
        floor: 20.0,
    },
    RankOneRow {
        partition: "13|24",
        h: [-1.52, -0.17, -0.54, -1.58],
        g: [0.78, -0.09, 0.24, -0.97],
        s: 26.17,
        floor: 20.0,
    },
    RankOneRow {
        partition: "14|23",
        h: [0.22, 1.65, 0.18, 0.77],
        g: [0.28, 1.34, -0.37, -0.95],
        s: 9.72,
        floor: 7.0,
    },
];

/// Rank-one pair violating all seven bipartition bounds at once.
pub const GENUINE_RANK_ONE: ([f64; 4], [f64; 4], f64) = (
    [0.31, -1.93, -0.17, -0.18],
    [0.30, 1.48, -0.57, -0.53],
    3.15,
);

/// Parameters of the PPT example and the witness built from them.
pub const PPT_X: f64 = 0.144375;
pub const PPT_Y: f64 = 0.084087;
pub const PPT_P: f64 = 0.232000;
pub const PPT_Q: f64 = 0.039543;
pub const PPT_G: f64 = 0.435170;
pub const PPT_CERTIFICATE: f64 = 0.481359;

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
    .unwrap();
    let pm = SymMatrix::from_rows(&[
        vec![p, 0.0, 0.0, pq],
        vec![0.0, p, pq, 0.0],
        vec![0.0, pq, q, 0.0],
        vec![pq, 0.0, 0.0, q],
    ])
    .unwrap();
    WitnessPair::new(xm, pm).unwrap()
}

pub type Table1Row = (usize, f64, Option<f64>, Option<f64>, f64);

/// Published bounds-table cells for the symmetric witness: (n, q, a, b, f).
pub const TABLE1: [Table1Row; 7] = [
    (2, 0.0, None, None, 2.0),
    (3, 3.46, Some(5.00), Some(5.46), 6.0),
    (4, 8.48, Some(10.03), Some(10.89), 12.0),
    (5, 15.49, Some(17.06), Some(18.26), 20.0),
    (6, 24.49, Some(26.07), Some(27.59), 30.0),
    (7, 35.49, Some(37.08), Some(38.89), 42.0),
    (8, 48.49, Some(50.09), Some(52.17), 56.0),
];
