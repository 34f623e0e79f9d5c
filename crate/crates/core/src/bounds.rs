//! Lower bounds on `G = tr(X γxx) + tr(P γpp)` for separable states.
//!
//! For a partition `I`, the entries of `X` and `P` that couple different
//! blocks can be replaced freely (keeping both matrices positive definite)
//! without changing `G` on an `I`-separable minimizer. The separability
//! bound `B_I` is the largest quantumness bound reachable that way. The
//! maximization is concave; [`separability_bound`] solves it by gradient
//! ascent over the free entries.
//!
//! Every iterate also yields an upper bound: a block-diagonal `γxx = A`
//! with `γpp = ¼A⁻¹` is a pure product state across the blocks, so its
//! value of `G` can never fall below `B_I`. The gap between the two is the
//! convergence criterion.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{eig_sym, quantum_bound, SymEigen, SymMatrix, PSD_TOLERANCE};
use crate::partitions::{free_mask, Partition};
use crate::states::CVState;

/// Witness matrices `(X, P)`, both PSD and of equal size.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "WitnessFile", into = "WitnessFile")]
pub struct WitnessPair {
    pub x: SymMatrix,
    pub p: SymMatrix,
}

#[derive(Serialize, Deserialize)]
#[allow(non_snake_case)]
struct WitnessFile {
    n: usize,
    X: SymMatrix,
    P: SymMatrix,
}

impl TryFrom<WitnessFile> for WitnessPair {
    type Error = Error;

    fn try_from(f: WitnessFile) -> Result<Self> {
        f.X.check_dim(f.n)?;
        WitnessPair::new(f.X, f.P)
    }
}

impl From<WitnessPair> for WitnessFile {
    fn from(w: WitnessPair) -> Self {
        WitnessFile {
            n: w.n(),
            X: w.x,
            P: w.p,
        }
    }
}

impl WitnessPair {
    pub fn new(x: SymMatrix, p: SymMatrix) -> Result<Self> {
        p.check_dim(x.n())?;
        for m in [&x, &p] {
            let min = m.min_eigenvalue()?;
            if min < -PSD_TOLERANCE {
                return Err(Error::NotPsd {
                    min_eigenvalue: min,
                });
            }
        }
        Ok(WitnessPair { x, p })
    }

    /// `X = h hᵀ`, `P = g gᵀ`.
    pub fn rank_one(h: &[f64], g: &[f64]) -> Result<Self> {
        if h.len() != g.len() {
            return Err(Error::DimensionMismatch {
                expected: h.len(),
                found: g.len(),
            });
        }
        Ok(WitnessPair {
            x: SymMatrix::outer(h),
            p: SymMatrix::outer(g),
        })
    }

    pub fn n(&self) -> usize {
        self.x.n()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        WitnessPair {
            x: self.x.scaled(factor),
            p: self.p.scaled(factor),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        format!(
            "{{\n  \"n\": {},\n  \"X\": {},\n  \"P\": {}\n}}\n",
            self.n(),
            crate::states::matrix_json(&self.x, "  "),
            crate::states::matrix_json(&self.p, "  ")
        )
    }
}

/// `G = tr(X γxx) + tr(P γpp)`
pub fn evaluate_g(w: &WitnessPair, state: &CVState) -> Result<f64> {
    w.x.check_dim(state.n())?;
    Ok(w.x.dot(&state.gamma_xx) + w.p.dot(&state.gamma_pp))
}

/// Tuning of the free-entry ascent.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AscentOptions {
    pub max_iterations: usize,
    /// Stop once the Frobenius norm of the free-entry gradient drops below
    /// this.
    pub gradient_tolerance: f64,
    /// Stop once the value improved by less than this (relative) over the
    /// last [`STALL_WINDOW`] iterations.
    pub relative_tolerance: f64,
    /// Step length of the first iteration; later steps are chosen by the
    /// Barzilai–Borwein rule.
    pub initial_step: f64,
    /// Stop once `upper_bound − value ≤ gap_tolerance · (1 + value)`.
    pub gap_tolerance: f64,
}

impl Default for AscentOptions {
    fn default() -> Self {
        AscentOptions {
            max_iterations: 10_000,
            gradient_tolerance: 1e-9,
            relative_tolerance: 1e-12,
            initial_step: 1.0,
            gap_tolerance: 1e-10,
        }
    }
}

pub const STALL_WINDOW: usize = 5;

/// A stalled run still counts as converged when its certified gap is
/// below this (relative).
pub const STALLED_GAP_TOLERANCE: f64 = 1e-6;

const ARMIJO: f64 = 1e-4;
const MIN_STEP: f64 = 1e-20;
const REGULARIZATION: f64 = 1e-10;

/// Outcome of the free-entry maximization.
#[derive(Clone, Debug, Serialize)]
pub struct BoundResult {
    /// Attained value `tr √(√X' P' √X')`.
    pub value: f64,
    /// Product-state value bounding the true maximum from above.
    pub upper_bound: f64,
    /// Maximizing `X'`; agrees with `X` outside the free entries.
    pub certificate_x: SymMatrix,
    /// Maximizing `P'`; agrees with `P` outside the free entries.
    pub certificate_p: SymMatrix,
    pub iterations: usize,
    pub converged: bool,
    /// True if a singular input had `1e-10·E` added to make the ascent
    /// well-defined.
    pub regularized: bool,
}

impl BoundResult {
    pub fn gap(&self) -> f64 {
        self.upper_bound - self.value
    }
}

/// Value and gradient of the quantumness bound at a strictly definite pair.
struct Evaluation {
    value: f64,
    grad_x: SymMatrix,
    grad_p: SymMatrix,
}

fn definite_eigen(m: &SymMatrix) -> Option<SymEigen> {
    let e = eig_sym(m).ok()?;
    (e.min() > crate::linalg::PD_THRESHOLD).then_some(e)
}

fn sandwich(s: &DMatrix<f64>, a: &DMatrix<f64>) -> SymMatrix {
    SymMatrix::symmetrized(s * a * s)
}

/// Value and gradient from one SVD `√P √X = U Σ Vᵀ`: then
/// `(√X P √X)^{-1/2} = V Σ⁻¹ Vᵀ` and `(√P X √P)^{-1/2} = U Σ⁻¹ Uᵀ`. Working
/// with singular values rather than eigenvalues of the sandwiches keeps
/// nearly singular pairs accurate.
fn evaluate(x: &SymMatrix, p: &SymMatrix) -> Option<Evaluation> {
    let sx = definite_eigen(x)?.map(f64::sqrt);
    let sp = definite_eigen(p)?.map(f64::sqrt);
    let svd = (sp.as_matrix() * sx.as_matrix()).try_svd(true, true, f64::EPSILON, 0)?;
    let (u, v_t) = (svd.u?, svd.v_t?);
    if svd.singular_values.iter().any(|&w| !(w > 0.0)) {
        return None;
    }
    let value = svd.singular_values.sum();
    let inv = DMatrix::from_diagonal(&svd.singular_values.map(|w| 0.5 / w));
    let grad_p = sandwich(sx.as_matrix(), &(v_t.transpose() * &inv * &v_t));
    let grad_x = sandwich(sp.as_matrix(), &(&u * &inv * u.transpose()));
    Some(Evaluation {
        value,
        grad_x,
        grad_p,
    })
}

/// Zero every entry outside the free pairs.
fn restrict(m: &SymMatrix, pairs: &[(usize, usize)]) -> SymMatrix {
    let mut out = SymMatrix::zeros(m.n());
    for &(i, j) in pairs {
        out.set(i, j, m.get(i, j));
    }
    out
}

/// Zero the free pairs, keeping everything else.
fn block_part(m: &SymMatrix, pairs: &[(usize, usize)]) -> SymMatrix {
    let mut out = m.clone();
    for &(i, j) in pairs {
        out.set(i, j, 0.0);
    }
    out
}

fn inverse_pd(m: &SymMatrix) -> Option<SymMatrix> {
    let chol = m.as_matrix().clone().cholesky()?;
    Some(SymMatrix::symmetrized(chol.inverse()))
}

/// Smallest product-state value of `G` obtainable from the current
/// optimal covariance blocks.
fn product_state_bound(x: &SymMatrix, p: &SymMatrix, eval: &Evaluation, pairs: &[(usize, usize)]) -> f64 {
    let mut best = f64::INFINITY;
    // γxx = A block-diagonal, γpp = ¼A⁻¹
    let a = block_part(&eval.grad_x, pairs);
    if let Some(a_inv) = inverse_pd(&a) {
        best = best.min(x.dot(&a) + 0.25 * p.dot(&a_inv));
    }
    let b = block_part(&eval.grad_p, pairs);
    if let Some(b_inv) = inverse_pd(&b) {
        best = best.min(0.25 * x.dot(&b_inv) + p.dot(&b));
    }
    best
}

/// `block + s·free` for the largest `s ∈ {1, ½, ¼, …}` that keeps a
/// comfortable positive definite margin. `block` must be positive definite.
fn shrink_into_interior(block: &SymMatrix, free: &SymMatrix) -> Result<SymMatrix> {
    let floor = 1e-3 * block.min_eigenvalue()?;
    let mut shrink = 1.0;
    for _ in 0..60 {
        let current = block.add_scaled(free, shrink);
        if current.min_eigenvalue()? >= floor {
            return Ok(current);
        }
        shrink *= 0.5;
    }
    Ok(block.clone())
}

fn needs_ridge(m: &SymMatrix, pairs: &[(usize, usize)]) -> Result<bool> {
    Ok(block_part(m, pairs).min_eigenvalue()? <= crate::linalg::PD_THRESHOLD)
}

/// Ridges for inputs with singular diagonal blocks: solved from a large
/// ridge down to `1e-10`, each stage warm-started from the last, since the
/// ascent crawls when started next to the boundary.
fn ridge_schedule(w: &WitnessPair) -> Vec<f64> {
    let n = w.n() as f64;
    let scale = (w.x.trace() / n).max(w.p.trace() / n);
    let mut ridges: Vec<f64> = [1e-2, 1e-4, 1e-6, 1e-8]
        .iter()
        .map(|f| f * scale)
        .filter(|&r| r > REGULARIZATION)
        .collect();
    ridges.push(REGULARIZATION);
    ridges
}

/// `B_I(X, P)`: the maximum of the quantumness bound over the entries that
/// couple different blocks of `partition`.
pub fn separability_bound(w: &WitnessPair, partition: &Partition, opts: &AscentOptions) -> Result<BoundResult> {
    separability_bound_from(w, partition, opts, None)
}

/// [`separability_bound`] started from the free entries of `warm` when they
/// keep both matrices positive definite.
pub fn separability_bound_from(
    w: &WitnessPair,
    partition: &Partition,
    opts: &AscentOptions,
    warm: Option<&BoundResult>,
) -> Result<BoundResult> {
    let n = w.n();
    if partition.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: partition.n(),
        });
    }
    let pairs = free_mask(partition).pairs();
    if pairs.is_empty() {
        let value = quantum_bound(&w.x, &w.p)?;
        return Ok(BoundResult {
            value,
            upper_bound: value,
            certificate_x: w.x.clone(),
            certificate_p: w.p.clone(),
            iterations: 0,
            converged: true,
            regularized: false,
        });
    }

    let ridge_x = needs_ridge(&w.x, &pairs)?;
    let ridge_p = needs_ridge(&w.p, &pairs)?;
    let regularized = ridge_x || ridge_p;
    let ridges = if regularized { ridge_schedule(w) } else { vec![0.0] };
    let mut carried = warm.map(|r| (restrict(&r.certificate_x, &pairs), restrict(&r.certificate_p, &pairs)));
    let mut iterations = 0;
    let mut last = None;
    for ridge in ridges {
        let bx = if ridge_x { w.x.add_scaled(&SymMatrix::identity(n), ridge) } else { w.x.clone() };
        let bp = if ridge_p { w.p.add_scaled(&SymMatrix::identity(n), ridge) } else { w.p.clone() };
        let (block_x, block_p) = (block_part(&bx, &pairs), block_part(&bp, &pairs));
        let mut x = shrink_into_interior(&block_x, &restrict(&bx, &pairs))?;
        let mut p = shrink_into_interior(&block_p, &restrict(&bp, &pairs))?;
        if let Some((fx, fp)) = &carried {
            let cx = shrink_into_interior(&block_x, fx)?;
            let cp = shrink_into_interior(&block_p, fp)?;
            if let (Some(a), Some(b)) = (evaluate(&cx, &cp), evaluate(&x, &p)) {
                if a.value >= b.value {
                    x = cx;
                    p = cp;
                }
            }
        }
        let Some(stage) = maximize(x, p, &pairs, opts) else {
            break;
        };
        iterations += stage.iterations;
        carried = Some((restrict(&stage.x, &pairs), restrict(&stage.p, &pairs)));
        last = Some(stage);
    }

    let Some(best) = last else {
        // The interior start failed numerically; fall back to the bare bound.
        let value = quantum_bound(&w.x, &w.p)?;
        return Ok(BoundResult {
            value,
            upper_bound: f64::INFINITY,
            certificate_x: w.x.clone(),
            certificate_p: w.p.clone(),
            iterations: 0,
            converged: false,
            regularized,
        });
    };
    Ok(BoundResult {
        value: best.value,
        upper_bound: best.upper_bound,
        certificate_x: best.x,
        certificate_p: best.p,
        iterations,
        converged: best.converged,
        regularized,
    })
}

/// Joint ascent over the free entries of both matrices, falling back to an
/// ascent over `X` alone when the joint run does not close its gap.
fn maximize(x: SymMatrix, p: SymMatrix, pairs: &[(usize, usize)], opts: &AscentOptions) -> Option<Ascent> {
    let mut best = ascend(x.clone(), p.clone(), pairs, opts, true)?;
    let tight = |a: &Ascent| a.upper_bound - a.value <= opts.gap_tolerance * (1.0 + a.value.abs());
    if !tight(&best) {
        // The joint ascent can stall where X' and P' approach a common null
        // direction, a corner at which neither partial gradient points
        // uphill. Holding P fixed removes the corner, and the maximum is
        // attainable with P' = P, so retry over the free entries of X alone.
        if let Some(one_sided) = ascend(x, p, pairs, opts, false) {
            let iterations = best.iterations + one_sided.iterations;
            let upper_bound = best.upper_bound.min(one_sided.upper_bound);
            if one_sided.value > best.value {
                best = one_sided;
            }
            best.upper_bound = upper_bound;
            best.iterations = iterations;
            best.converged =
                tight(&best) || best.upper_bound - best.value <= STALLED_GAP_TOLERANCE * (1.0 + best.value.abs());
        }
    }
    Some(best)
}

struct Ascent {
    value: f64,
    upper_bound: f64,
    x: SymMatrix,
    p: SymMatrix,
    iterations: usize,
    converged: bool,
}

/// Gradient ascent over the free entries of `X` (and of `P` when `vary_p`),
/// with Barzilai–Borwein steps, Armijo backtracking, and rejection of any
/// step leaving the positive definite cone. `None` if the start point is
/// not strictly definite.
fn ascend(mut x: SymMatrix, mut p: SymMatrix, pairs: &[(usize, usize)], opts: &AscentOptions, vary_p: bool) -> Option<Ascent> {
    let base_x = x.clone();
    let base_p = p.clone();
    let mut eval = evaluate(&x, &p)?;
    let mut upper = product_state_bound(&base_x, &base_p, &eval, pairs);
    let mut history = vec![eval.value];
    let mut step = opts.initial_step;
    let mut prev: Option<(SymMatrix, SymMatrix, SymMatrix, SymMatrix)> = None;
    let mut converged = false;
    let mut iterations = 0;
    let n = x.n();

    while iterations < opts.max_iterations {
        let gap_ok = upper - eval.value <= opts.gap_tolerance * (1.0 + eval.value.abs());
        let dx = restrict(&eval.grad_x, pairs);
        let dp = if vary_p {
            restrict(&eval.grad_p, pairs)
        } else {
            SymMatrix::zeros(n)
        };
        let slope = dx.dot(&dx) + dp.dot(&dp);
        if gap_ok || slope.sqrt() < opts.gradient_tolerance {
            converged = true;
            break;
        }

        // Barzilai–Borwein step for the concave objective.
        if let Some((px, pp, pdx, pdp)) = &prev {
            let sx = x.add_scaled(px, -1.0);
            let sp = p.add_scaled(pp, -1.0);
            let yx = dx.add_scaled(pdx, -1.0);
            let yp = dp.add_scaled(pdp, -1.0);
            let ss = sx.dot(&sx) + sp.dot(&sp);
            let sy = -(sx.dot(&yx) + sp.dot(&yp));
            step = if sy > 0.0 && ss > 0.0 {
                (ss / sy).clamp(1e-12, 1e12)
            } else {
                (2.0 * step).min(1e12)
            };
        }

        let mut t = step;
        let accepted = loop {
            if t < MIN_STEP {
                break None;
            }
            let nx = x.add_scaled(&dx, t);
            let np = p.add_scaled(&dp, t);
            if let Some(next) = evaluate(&nx, &np) {
                if next.value >= eval.value + ARMIJO * t * slope {
                    break Some((nx, np, next, t));
                }
            }
            t *= 0.5;
        };
        iterations += 1;
        let dual = dual_step(&x, &p, &eval, pairs, vary_p);
        let accepted = match (accepted, dual) {
            (Some(a), Some(d)) => Some(if d.2.value > a.2.value { (d.0, d.1, d.2, step) } else { a }),
            (Some(a), None) => Some(a),
            (None, Some(d)) => Some((d.0, d.1, d.2, step)),
            (None, None) => None,
        };
        let Some((nx, np, next, t)) = accepted else {
            converged = upper - eval.value <= STALLED_GAP_TOLERANCE * (1.0 + eval.value.abs());
            break;
        };
        prev = Some((x, p, dx, dp));
        x = nx;
        p = np;
        eval = next;
        step = t;
        upper = upper.min(product_state_bound(&base_x, &base_p, &eval, pairs));
        history.push(eval.value);
        if history.len() > STALL_WINDOW {
            let old = history[history.len() - 1 - STALL_WINDOW];
            if eval.value - old <= opts.relative_tolerance * eval.value.abs() {
                converged = upper - eval.value <= STALLED_GAP_TOLERANCE * (1.0 + eval.value.abs());
                break;
            }
        }
    }

    Some(Ascent {
        value: eval.value,
        upper_bound: upper,
        x,
        p,
        iterations,
        converged,
    })
}

/// Step towards the pair that makes the current block-diagonal product
/// state optimal: with `A` the block part of the optimal `γxx`, that state
/// is optimal for `X' = ¼A⁻¹PA⁻¹`, so the free entries of `X` move towards
/// those of `X'` (and symmetrically for `P`). Near the PSD boundary, where
/// optima of singular inputs sit, this converges far faster than the
/// gradient. Returns the best improving point found by halving.
fn dual_step(
    x: &SymMatrix,
    p: &SymMatrix,
    eval: &Evaluation,
    pairs: &[(usize, usize)],
    vary_p: bool,
) -> Option<(SymMatrix, SymMatrix, Evaluation)> {
    let mut best: Option<(SymMatrix, SymMatrix, Evaluation)> = None;
    let mut try_direction = |dx: &SymMatrix, dp: &SymMatrix| {
        let mut t = 1.0;
        for _ in 0..40 {
            let nx = x.add_scaled(dx, t);
            let np = p.add_scaled(dp, t);
            if let Some(next) = evaluate(&nx, &np) {
                if next.value > eval.value {
                    if best.as_ref().is_none_or(|b| next.value > b.2.value) {
                        best = Some((nx, np, next));
                    }
                    return;
                }
            }
            t *= 0.5;
        }
    };
    let n = x.n();
    if let Some(a_inv) = inverse_pd(&block_part(&eval.grad_x, pairs)) {
        let target = SymMatrix::symmetrized(a_inv.as_matrix() * p.as_matrix() * a_inv.as_matrix()).scaled(0.25);
        try_direction(&restrict(&target.add_scaled(x, -1.0), pairs), &SymMatrix::zeros(n));
    }
    if vary_p {
        if let Some(b_inv) = inverse_pd(&block_part(&eval.grad_p, pairs)) {
            let target = SymMatrix::symmetrized(b_inv.as_matrix() * x.as_matrix() * b_inv.as_matrix()).scaled(0.25);
            try_direction(&SymMatrix::zeros(n), &restrict(&target.add_scaled(p, -1.0), pairs));
        }
    }
    best
}

/// Gradient of `B_I` with respect to `(X, P)` at the pair that produced
/// `result`: the quantumness-bound gradient at the certificates, with the
/// free entries zeroed since they are re-optimized.
pub fn separability_bound_gradient(result: &BoundResult, partition: &Partition) -> Result<(SymMatrix, SymMatrix)> {
    let pairs = free_mask(partition).pairs();
    let (gx, gp) = crate::linalg::quantum_bound_gradient(&result.certificate_x, &result.certificate_p)?;
    Ok((block_part(&gx, &pairs), block_part(&gp, &pairs)))
}

/// `Σ_blocks |Σ_{i∈I} hᵢ gᵢ|`, the separability bound of the rank-one pair
/// `(h hᵀ, g gᵀ)`.
pub fn rank_one_bound(h: &[f64], g: &[f64], partition: &Partition) -> Result<f64> {
    if h.len() != g.len() || h.len() != partition.n() {
        return Err(Error::DimensionMismatch {
            expected: partition.n(),
            found: if h.len() != partition.n() { h.len() } else { g.len() },
        });
    }
    Ok(partition
        .blocks()
        .iter()
        .map(|block| block.iter().map(|&i| h[i] * g[i]).sum::<f64>().abs())
        .sum())
}

/// Rank-one bound together with the sign-flipped certificate
/// `(h' h'ᵀ, g gᵀ)` attaining it, where `h'` flips every block whose
/// overlap `Σ hᵢgᵢ` is negative.
pub fn rank_one_certificate(h: &[f64], g: &[f64], partition: &Partition) -> Result<BoundResult> {
    let value = rank_one_bound(h, g, partition)?;
    let mut flipped = h.to_vec();
    for block in partition.blocks() {
        let overlap: f64 = block.iter().map(|&i| h[i] * g[i]).sum();
        if overlap < 0.0 {
            for &i in &block {
                flipped[i] = -flipped[i];
            }
        }
    }
    Ok(BoundResult {
        value,
        upper_bound: value,
        certificate_x: SymMatrix::outer(&flipped),
        certificate_p: SymMatrix::outer(g),
        iterations: 0,
        converged: true,
        regularized: false,
    })
}

/// Result of the sign-matrix test.
#[derive(Clone, Debug, Serialize)]
pub struct LmiOutcome {
    pub violated: bool,
    pub min_eigenvalue: f64,
    /// Per-mode signs of the pattern with the most negative eigenvalue.
    pub worst_signs: Vec<i8>,
}

/// Checks `[[γxx, E_I/2], [E_I/2, γpp]] ≥ 0` for every diagonal sign
/// matrix `E_I` that is constant on the blocks of `partition`. The first
/// block is fixed to `+1`, since a global sign does not change the
/// spectrum.
pub fn lmi_separability_test(state: &CVState, partition: &Partition) -> Result<LmiOutcome> {
    let n = state.n();
    if partition.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: partition.n(),
        });
    }
    let k = partition.num_blocks();
    let mut worst = LmiOutcome {
        violated: false,
        min_eigenvalue: f64::INFINITY,
        worst_signs: vec![1; n],
    };
    for pattern in 0u64..(1u64 << (k - 1)) {
        let signs: Vec<i8> = (0..n)
            .map(|i| {
                let b = partition.block_of(i);
                if b > 0 && pattern & (1 << (b - 1)) != 0 {
                    -1
                } else {
                    1
                }
            })
            .collect();
        let mut m = DMatrix::zeros(2 * n, 2 * n);
        m.view_mut((0, 0), (n, n)).copy_from(state.gamma_xx.as_matrix());
        m.view_mut((n, n), (n, n)).copy_from(state.gamma_pp.as_matrix());
        for (i, &s) in signs.iter().enumerate() {
            m[(i, n + i)] = 0.5 * s as f64;
            m[(n + i, i)] = 0.5 * s as f64;
        }
        let min = SymMatrix::from_matrix(m)?.min_eigenvalue()?;
        if min < worst.min_eigenvalue {
            worst.min_eigenvalue = min;
            worst.worst_signs = signs;
        }
    }
    worst.violated = worst.min_eigenvalue < -PSD_TOLERANCE;
    Ok(worst)
}

/// Closed-form lower bound on `G_n` for biseparable states, obtained from
/// the commuting choice of free entries for the fully symmetric witness.
pub fn analytic_biseparable_bound(n: usize) -> Result<f64> {
    if n < 3 {
        return Err(Error::InvalidArgument(format!(
            "analytic biseparable bound needs n >= 3, got {n}"
        )));
    }
    let n = n as f64;
    Ok((n - 1.0) * (n * (n - 2.0)).sqrt()
        + 4.0 * (n - 1.0) / (n.sqrt() * ((2.0 * n - 2.0).sqrt() + (n - 2.0).sqrt())))
}

/// `Xₙ = (n−2)E + J`, `Pₙ = nE − J` (diagonal `n−1`, off-diagonal `±1`),
/// the witness of `Σ_{i<j} ⟨(xᵢ + xⱼ)² + (pᵢ − pⱼ)²⟩`.
pub fn symmetric_witness(n: usize) -> Result<WitnessPair> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "symmetric witness needs n >= 2, got {n}"
        )));
    }
    let x = SymMatrix::from_matrix(DMatrix::from_fn(n, n, |i, j| if i == j { n as f64 - 1.0 } else { 1.0 }))?;
    let p = SymMatrix::from_matrix(DMatrix::from_fn(n, n, |i, j| if i == j { n as f64 - 1.0 } else { -1.0 }))?;
    Ok(WitnessPair { x, p })
}

/// `(n−1)√(n(n−2))`, the quantumness bound of the symmetric witness.
pub fn symmetric_quantum_bound(n: usize) -> f64 {
    let n = n as f64;
    (n - 1.0) * (n * (n - 2.0)).max(0.0).sqrt()
}

/// One column of the bounds table for the symmetric witness.
#[derive(Clone, Debug, Serialize)]
pub struct Table1Column {
    pub n: usize,
    /// Quantumness bound, computed numerically.
    pub q: f64,
    /// Analytic biseparable bound (`n ≥ 3`).
    pub a: Option<f64>,
    /// Biseparable bound: minimum of `B_I` over bipartitions (`n ≥ 3`).
    pub b: Option<f64>,
    pub b_partition: Option<Partition>,
    /// Full-separability bound.
    pub f: f64,
    pub converged: bool,
}

pub fn table1_bounds(n: usize, opts: &AscentOptions) -> Result<Table1Column> {
    let w = symmetric_witness(n)?;
    let q = quantum_bound(&w.x, &w.p)?;
    let full = separability_bound(&w, &Partition::full(n), opts)?;
    let mut converged = full.converged;
    let (a, b, b_partition) = if n >= 3 {
        let mut best: Option<(f64, Partition)> = None;
        for rep in crate::partitions::symmetric_bipartition_representatives(n)? {
            let r = separability_bound(&w, &rep, opts)?;
            converged &= r.converged;
            if best.as_ref().is_none_or(|(v, _)| r.value < *v) {
                best = Some((r.value, rep));
            }
        }
        let (b, part) = best.expect("n >= 3 has representatives");
        (Some(analytic_biseparable_bound(n)?), Some(b), Some(part))
    } else {
        (None, None, None)
    };
    Ok(Table1Column {
        n,
        q,
        a,
        b,
        b_partition,
        f: full.value,
        converged,
    })
}
