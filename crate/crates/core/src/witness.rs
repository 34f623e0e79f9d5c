//! Error-aware certification: the measurement error of `G`, violation
//! scores, and searches for witnesses that maximize them.
//!
//! A witness `(X, P)` certifies that a state is not `I`-separable at
//! level `s` when `E_I = G + s·σ − B_I < 0`, i.e. when the measured value
//! undercuts the separable bound by more than `s` standard deviations.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};
use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{
    evaluate_g, rank_one_certificate, separability_bound, separability_bound_from, separability_bound_gradient,
    AscentOptions, BoundResult, WitnessPair,
};
use crate::error::{Error, Result};
use crate::linalg::{eig_sym, SymMatrix};
use crate::partitions::{bipartitions, Partition};
use crate::states::CVState;

/// `σ(X, P) = √(Σᵢⱼ x²ᵢⱼ σ²xx,ᵢⱼ + p²ᵢⱼ σ²pp,ᵢⱼ)` over all ordered pairs.
pub fn measurement_sigma(w: &WitnessPair, state: &CVState) -> Result<f64> {
    let (sxx, spp) = error_model(state)?;
    w.x.check_dim(state.n())?;
    Ok(sigma_squared(w, sxx, spp).sqrt())
}

fn error_model(state: &CVState) -> Result<(&SymMatrix, &SymMatrix)> {
    match (&state.sigma_xx, &state.sigma_pp) {
        (Some(a), Some(b)) => Ok((a, b)),
        _ => Err(Error::MissingErrorModel),
    }
}

fn sigma_squared(w: &WitnessPair, sxx: &SymMatrix, spp: &SymMatrix) -> f64 {
    let n = w.n();
    let mut total = 0.0;
    for i in 0..n {
        for j in 0..n {
            total += (w.x.get(i, j) * sxx.get(i, j)).powi(2) + (w.p.get(i, j) * spp.get(i, j)).powi(2);
        }
    }
    total
}

/// Gradient of σ with respect to `(X, P)`; zero where σ vanishes.
fn sigma_gradient(w: &WitnessPair, sigma: f64, sxx: &SymMatrix, spp: &SymMatrix) -> (SymMatrix, SymMatrix) {
    let n = w.n();
    let mut gx = SymMatrix::zeros(n);
    let mut gp = SymMatrix::zeros(n);
    if sigma > 0.0 {
        for i in 0..n {
            for j in i..n {
                gx.set(i, j, w.x.get(i, j) * sxx.get(i, j).powi(2) / sigma);
                gp.set(i, j, w.p.get(i, j) * spp.get(i, j).powi(2) / sigma);
            }
        }
    }
    (gx, gp)
}

/// `E_I = G + s_level·σ − B_I`. Negative values certify that the state is
/// not separable with respect to `partition`.
pub fn condition_e(w: &WitnessPair, state: &CVState, partition: &Partition, s_level: f64) -> Result<f64> {
    let g = evaluate_g(w, state)?;
    let sigma = if s_level == 0.0 && !state.has_error_model() {
        0.0
    } else {
        measurement_sigma(w, state)?
    };
    let bound = separability_bound(w, partition, &AscentOptions::default())?;
    Ok(g + s_level * sigma - bound.value)
}

/// `P(s) = 1 − erf(s/√2)`: the probability that Gaussian noise alone
/// shifts the measurement by `s` standard deviations. Negative scores are
/// clamped to 1.
pub fn confidence(s: f64) -> f64 {
    if s < 0.0 {
        log::warn!("confidence requested for negative score {s}; clamping to 1");
        return 1.0;
    }
    statrs::function::erf::erfc(s / std::f64::consts::SQRT_2)
}

/// Evaluation of one witness against one partition.
#[derive(Clone, Debug, Serialize)]
pub struct ViolationReport {
    pub partition: Partition,
    #[serde(rename = "G")]
    pub g: f64,
    /// `None` when the state carries no error model.
    pub sigma: Option<f64>,
    /// Separability bound `B_I`.
    pub bound: f64,
    /// `B_I − G`; positive means the separable bound is violated.
    pub margin: f64,
    /// Violation score `(B_I − G)/σ`.
    pub s: Option<f64>,
    pub confidence: Option<f64>,
    pub witness: WitnessPair,
    /// Rank-one generating vectors, when the witness is `(h hᵀ, g gᵀ)`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vectors: Option<RankOneVectors>,
    pub certificate: BoundResult,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RankOneVectors {
    pub h: Vec<f64>,
    pub g: Vec<f64>,
}

impl ViolationReport {
    fn assemble(w: WitnessPair, state: &CVState, partition: &Partition, certificate: BoundResult) -> Result<Self> {
        let g = evaluate_g(&w, state)?;
        let sigma = if state.has_error_model() {
            Some(measurement_sigma(&w, state)?)
        } else {
            None
        };
        let margin = certificate.value - g;
        let s = sigma.filter(|&v| v > 0.0).map(|v| margin / v);
        Ok(ViolationReport {
            partition: partition.clone(),
            g,
            sigma,
            bound: certificate.value,
            margin,
            s,
            confidence: s.map(|v| confidence(v.max(0.0))),
            witness: w,
            vectors: None,
            certificate,
        })
    }

    /// True when the report certifies non-separability at `s_level`
    /// (by the raw margin when `s_level` is zero).
    pub fn certifies(&self, s_level: f64) -> bool {
        if s_level == 0.0 {
            return self.margin > 0.0;
        }
        self.s.is_some_and(|s| s >= s_level)
    }
}

/// Full report for one witness and one partition.
pub fn violation_score(w: &WitnessPair, state: &CVState, partition: &Partition) -> Result<ViolationReport> {
    let sigma = measurement_sigma(w, state)?;
    if sigma == 0.0 {
        return Err(Error::ZeroSigma);
    }
    let certificate = separability_bound(w, partition, &AscentOptions::default())?;
    ViolationReport::assemble(w.clone(), state, partition, certificate)
}

/// [`violation_score`] for a rank-one witness, using the closed form of
/// the separability bound.
pub fn rank_one_violation_score(h: &[f64], g: &[f64], state: &CVState, partition: &Partition) -> Result<ViolationReport> {
    let w = WitnessPair::rank_one(h, g)?;
    let certificate = rank_one_certificate(h, g, partition)?;
    let mut report = ViolationReport::assemble(w, state, partition, certificate)?;
    report.vectors = Some(RankOneVectors {
        h: h.to_vec(),
        g: g.to_vec(),
    });
    Ok(report)
}

/// Component distribution for random witness vectors.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Sampler {
    StandardNormal,
    /// Uniform on `[-1, 1]`.
    Uniform,
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchConfig {
    pub trials: u64,
    pub seed: u64,
    /// Certification level `s`.
    pub s_level: f64,
    /// Normalization `tr(X γxx) + tr(P γpp) = C` of optimized witnesses.
    pub c: f64,
    pub sampler: Sampler,
    /// Restarts allowed in [`genuine_search`].
    pub restarts: usize,
    /// Descent iterations per optimization run.
    pub max_iterations: usize,
    pub ascent: AscentOptions,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            trials: 1_000_000,
            seed: 0,
            s_level: 6.0,
            c: 1.0,
            sampler: Sampler::StandardNormal,
            restarts: 200,
            max_iterations: 2_000,
            ascent: AscentOptions::default(),
        }
    }
}

impl SearchConfig {
    fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidArgument("trials must be at least 1".into()));
        }
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(Error::InvalidArgument(format!("normalization C must be positive, got {}", self.c)));
        }
        if !(self.s_level >= 0.0 && self.s_level.is_finite()) {
            return Err(Error::InvalidArgument(format!("s level must be non-negative, got {}", self.s_level)));
        }
        Ok(())
    }
}

fn sample_vector(rng: &mut ChaCha8Rng, sampler: Sampler, n: usize) -> Vec<f64> {
    match sampler {
        Sampler::StandardNormal => (0..n).map(|_| StandardNormal.sample(rng)).collect(),
        Sampler::Uniform => {
            let u = Uniform::new_inclusive(-1.0, 1.0).expect("valid range");
            (0..n).map(|_| u.sample(rng)).collect()
        }
    }
}

/// Vectors `(h, g)` of trial `index`; each trial has its own stream so the
/// draw does not depend on scheduling.
pub fn trial_vectors(seed: u64, index: u64, sampler: Sampler, n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let h = sample_vector(&mut rng, sampler, n);
    let g = sample_vector(&mut rng, sampler, n);
    (h, g)
}

fn quadratic(m: &SymMatrix, v: &[f64]) -> f64 {
    let n = v.len();
    let mut total = 0.0;
    for i in 0..n {
        for j in 0..n {
            total += v[i] * m.get(i, j) * v[j];
        }
    }
    total
}

/// Cheap score of one rank-one trial: `(B_I − G)/σ`, or the relative
/// margin `B_I/G − 1` without an error model. `None` for degenerate draws.
fn trial_score(h: &[f64], g: &[f64], state: &CVState, partition: &Partition, use_sigma: bool) -> Option<f64> {
    let bound = crate::bounds::rank_one_bound(h, g, partition).ok()?;
    let value = quadratic(&state.gamma_xx, h) + quadratic(&state.gamma_pp, g);
    if use_sigma {
        let (sxx, spp) = error_model(state).ok()?;
        let n = h.len();
        let mut s2 = 0.0;
        for i in 0..n {
            for j in 0..n {
                s2 += (h[i] * h[j] * sxx.get(i, j)).powi(2) + (g[i] * g[j] * spp.get(i, j)).powi(2);
            }
        }
        let sigma = s2.sqrt();
        (sigma > 0.0).then(|| (bound - value) / sigma)
    } else {
        (value > 0.0).then(|| bound / value - 1.0)
    }
}

fn better(a: Option<(u64, f64)>, b: Option<(u64, f64)>) -> Option<(u64, f64)> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(x), Some(y)) => {
            if y.1 > x.1 || (y.1 == x.1 && y.0 < x.0) {
                Some(y)
            } else {
                Some(x)
            }
        }
    }
}

/// Draws `cfg.trials` random rank-one witnesses `(h hᵀ, g gᵀ)` and returns
/// the report of the one with the largest violation score.
///
/// With `use_sigma = false` trials are ranked by relative margin instead
/// and the state needs no error model. The result is independent of the
/// number of threads.
pub fn random_rank_one_search(
    state: &CVState,
    partition: &Partition,
    cfg: &SearchConfig,
    use_sigma: bool,
) -> Result<ViolationReport> {
    cfg.validate()?;
    if use_sigma {
        error_model(state)?;
    }
    let n = state.n();
    if partition.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: partition.n(),
        });
    }
    let best = (0..cfg.trials)
        .into_par_iter()
        .map(|i| {
            let (h, g) = trial_vectors(cfg.seed, i, cfg.sampler, n);
            trial_score(&h, &g, state, partition, use_sigma)
                .filter(|s| s.is_finite())
                .map(|s| (i, s))
        })
        .reduce(|| None, better);
    let Some((index, _)) = best else {
        return Err(Error::ZeroSigma);
    };
    let (h, g) = trial_vectors(cfg.seed, index, cfg.sampler, n);
    let w = WitnessPair::rank_one(&h, &g)?;
    let certificate = rank_one_certificate(&h, &g, partition)?;
    let mut report = ViolationReport::assemble(w, state, partition, certificate)?;
    report.vectors = Some(RankOneVectors { h, g });
    Ok(report)
}

/// Search over several partitions, one independent stream set per
/// partition (the seed is offset by the partition index).
pub fn random_rank_one_search_all(
    state: &CVState,
    partitions: &[Partition],
    cfg: &SearchConfig,
    use_sigma: bool,
) -> Result<Vec<ViolationReport>> {
    partitions
        .iter()
        .enumerate()
        .map(|(k, p)| {
            let cfg = SearchConfig {
                seed: cfg.seed.wrapping_add(k as u64),
                ..cfg.clone()
            };
            random_rank_one_search(state, p, &cfg, use_sigma)
        })
        .collect()
}

/// Objective `s_level·σ − B_I` on the slice `G = 1`, with its gradient.
struct Objective<'a> {
    state: &'a CVState,
    s_level: f64,
    ascent: &'a AscentOptions,
}

struct Point {
    w: WitnessPair,
    /// Per-partition values of `s_level·σ − B_I`.
    values: Vec<f64>,
    bounds: Vec<BoundResult>,
    sigma: f64,
}

impl Point {
    fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

impl Objective<'_> {
    fn sigma(&self, w: &WitnessPair) -> f64 {
        match error_model(self.state) {
            Ok((sxx, spp)) if self.s_level > 0.0 => sigma_squared(w, sxx, spp).sqrt(),
            _ => 0.0,
        }
    }

    fn point(&self, w: WitnessPair, partitions: &[Partition], warm: Option<&Point>) -> Result<Point> {
        let bounds = partitions
            .par_iter()
            .enumerate()
            .map(|(k, p)| separability_bound_from(&w, p, self.ascent, warm.map(|pt| &pt.bounds[k])))
            .collect::<Result<Vec<_>>>()?;
        let sigma = self.sigma(&w);
        let values = bounds.iter().map(|b| self.s_level * sigma - b.value).collect();
        Ok(Point {
            w,
            values,
            bounds,
            sigma,
        })
    }

    /// Gradient of partition `k`'s value, projected onto the tangent space
    /// of the normalization slice.
    fn gradient(&self, pt: &Point, partitions: &[Partition], k: usize) -> Result<(SymMatrix, SymMatrix)> {
        let (bx, bp) = bound_gradient(&pt.bounds[k], &partitions[k])?;
        let (mut gx, mut gp) = (bx.scaled(-1.0), bp.scaled(-1.0));
        if self.s_level > 0.0 {
            if let Ok((sxx, spp)) = error_model(self.state) {
                let (sx, sp) = sigma_gradient(&pt.w, pt.sigma, sxx, spp);
                gx = gx.add_scaled(&sx, self.s_level);
                gp = gp.add_scaled(&sp, self.s_level);
            }
        }
        let nx = &self.state.gamma_xx;
        let np = &self.state.gamma_pp;
        let along = (gx.dot(nx) + gp.dot(np)) / (nx.dot(nx) + np.dot(np));
        Ok((gx.add_scaled(nx, -along), gp.add_scaled(np, -along)))
    }
}

fn bound_gradient(result: &BoundResult, partition: &Partition) -> Result<(SymMatrix, SymMatrix)> {
    match separability_bound_gradient(result, partition) {
        Ok(g) => Ok(g),
        Err(Error::SingularGradient { .. }) => {
            // Only reachable without free entries; nudge into the interior.
            let n = result.certificate_x.n();
            let nudged = BoundResult {
                certificate_x: result.certificate_x.add_scaled(&SymMatrix::identity(n), 1e-10),
                certificate_p: result.certificate_p.add_scaled(&SymMatrix::identity(n), 1e-10),
                ..result.clone()
            };
            separability_bound_gradient(&nudged, partition)
        }
        Err(e) => Err(e),
    }
}

fn clip_psd(m: &SymMatrix) -> Result<SymMatrix> {
    Ok(eig_sym(m)?.map(|v| v.max(0.0)))
}

/// Scale a PSD pair onto the slice `G = 1`.
fn normalize(x: &SymMatrix, p: &SymMatrix, state: &CVState) -> Result<Option<WitnessPair>> {
    let w = WitnessPair {
        x: clip_psd(x)?,
        p: clip_psd(p)?,
    };
    let g = evaluate_g(&w, state)?;
    Ok((g > 0.0 && g.is_finite()).then(|| w.scaled(1.0 / g)))
}

/// Euclidean projection onto `{X, P ⪰ 0, G = 1}`: the PSD parts of
/// `(X − μγxx, P − μγpp)` for the multiplier `μ` that meets the
/// normalization, followed by an exact rescale to remove bisection error.
fn project(x: &SymMatrix, p: &SymMatrix, state: &CVState) -> Result<Option<WitnessPair>> {
    let (nx, np) = (&state.gamma_xx, &state.gamma_pp);
    let shifted = |mu: f64| -> Result<(WitnessPair, f64)> {
        let w = WitnessPair {
            x: clip_psd(&x.add_scaled(nx, -mu))?,
            p: clip_psd(&p.add_scaled(np, -mu))?,
        };
        let g = evaluate_g(&w, state)?;
        Ok((w, g))
    };
    // G of the shifted pair is non-increasing in μ.
    let scale = (x.dot(x) + p.dot(p)).sqrt().max(1.0) / (nx.dot(nx) + np.dot(np)).sqrt();
    let (mut lo, mut hi) = (-scale, scale);
    let mut expand = 0;
    while shifted(lo)?.1 < 1.0 {
        lo *= 2.0;
        expand += 1;
        if expand > 200 {
            return Ok(None);
        }
    }
    while shifted(hi)?.1 > 1.0 {
        hi *= 2.0;
        expand += 1;
        if expand > 200 {
            return Ok(None);
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if shifted(mid)?.1 >= 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (w, _) = shifted(lo)?;
    normalize(&w.x, &w.p, state)
}

/// Minimum-norm point of the convex hull of `grads`, as simplex weights.
fn min_norm_weights(grads: &[(SymMatrix, SymMatrix)]) -> Vec<f64> {
    let m = grads.len();
    let gram: Vec<Vec<f64>> = (0..m)
        .map(|i| {
            (0..m)
                .map(|j| grads[i].0.dot(&grads[j].0) + grads[i].1.dot(&grads[j].1))
                .collect()
        })
        .collect();
    let mut lambda = vec![1.0 / m as f64; m];
    for _ in 0..200 {
        let kl: Vec<f64> = (0..m).map(|i| (0..m).map(|j| gram[i][j] * lambda[j]).sum()).collect();
        let vv: f64 = (0..m).map(|i| lambda[i] * kl[i]).sum();
        let (t, _) = kl
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (i, &v)| if v < acc.1 { (i, v) } else { acc });
        // |v − g_t|² = vv − 2 kl_t + K_tt
        let denom = vv - 2.0 * kl[t] + gram[t][t];
        if denom <= 1e-300 {
            break;
        }
        let gamma = ((vv - kl[t]) / denom).clamp(0.0, 1.0);
        if gamma <= 1e-12 {
            break;
        }
        for (i, l) in lambda.iter_mut().enumerate() {
            *l *= 1.0 - gamma;
            if i == t {
                *l += gamma;
            }
        }
    }
    lambda
}

/// Outcome of a descent run on `max_k (s_level·σ − B_k)` at `G = 1`.
struct DescentOutcome {
    point: Point,
    iterations: usize,
    converged: bool,
}

const MIN_STEP: f64 = 1e-10;
const ACTIVE_TOLERANCES: [f64; 4] = [1e-2, 1e-4, 1e-6, 0.0];

/// Minimizes the largest partition value by steepest descent for the max
/// function: the step direction is the negated minimum-norm element of the
/// convex hull of the near-active gradients. Stops early once the maximum
/// drops below `stop_below`.
fn descend(
    obj: &Objective,
    partitions: &[Partition],
    start: WitnessPair,
    max_iterations: usize,
    stop_below: f64,
) -> Result<DescentOutcome> {
    let mut pt = obj.point(start, partitions, None)?;
    let mut step: f64 = 0.1;
    let mut history = vec![pt.max()];
    for iteration in 0..max_iterations {
        let f = pt.max();
        if f < stop_below {
            return Ok(DescentOutcome {
                point: pt,
                iterations: iteration,
                converged: true,
            });
        }
        let mut moved = false;
        for &eps in &ACTIVE_TOLERANCES {
            let active: Vec<usize> = (0..partitions.len()).filter(|&k| pt.values[k] >= f - eps).collect();
            let grads = active
                .iter()
                .map(|&k| obj.gradient(&pt, partitions, k))
                .collect::<Result<Vec<_>>>()?;
            let lambda = min_norm_weights(&grads);
            let n = pt.w.n();
            let mut dx = SymMatrix::zeros(n);
            let mut dp = SymMatrix::zeros(n);
            for (l, (gx, gp)) in lambda.iter().zip(&grads) {
                dx = dx.add_scaled(gx, *l);
                dp = dp.add_scaled(gp, *l);
            }
            let norm = (dx.dot(&dx) + dp.dot(&dp)).sqrt();
            if !(norm > 1e-14) {
                continue;
            }
            let scale = (pt.w.x.dot(&pt.w.x) + pt.w.p.dot(&pt.w.p)).sqrt() / norm;
            let mut t = (2.0 * step).min(1.0);
            while t >= MIN_STEP {
                let x = pt.w.x.add_scaled(&dx, -t * scale);
                let p = pt.w.p.add_scaled(&dp, -t * scale);
                if let Some(w) = project(&x, &p, obj.state)? {
                    let trial = obj.point(w, partitions, Some(&pt))?;
                    if trial.max() < f - 1e-15 * (1.0 + f.abs()) {
                        pt = trial;
                        step = t;
                        moved = true;
                        break;
                    }
                }
                t *= 0.5;
            }
            if moved {
                break;
            }
        }
        if !moved {
            return Ok(DescentOutcome {
                point: pt,
                iterations: iteration,
                converged: true,
            });
        }
        history.push(pt.max());
        if history.len() > 20 {
            let old = history[history.len() - 21];
            if old - pt.max() <= 1e-10 * (1.0 + pt.max().abs()) {
                return Ok(DescentOutcome {
                    point: pt,
                    iterations: iteration + 1,
                    converged: true,
                });
            }
        }
    }
    Ok(DescentOutcome {
        point: pt,
        iterations: max_iterations,
        converged: false,
    })
}

fn require_sigma(state: &CVState, s_level: f64) -> Result<()> {
    if s_level > 0.0 {
        error_model(state)?;
    }
    Ok(())
}

/// Result of [`optimize_witness`].
#[derive(Clone, Debug, Serialize)]
pub struct OptimizedWitness {
    pub report: ViolationReport,
    /// `s_level·σ − B_I` at `G = C`; below `−C` certifies.
    pub objective: f64,
    pub certified: bool,
    pub iterations: usize,
    pub converged: bool,
}

/// Minimizes `s_level·σ − B_I` over PSD pairs with `G = C`. The minimum is
/// below `−C` exactly when some witness certifies the state at
/// `s_level`. Starts from `start`, or from `(E, E)` scaled to the slice.
pub fn optimize_witness(
    state: &CVState,
    partition: &Partition,
    cfg: &SearchConfig,
    start: Option<&WitnessPair>,
) -> Result<OptimizedWitness> {
    cfg.validate()?;
    require_sigma(state, cfg.s_level)?;
    let n = state.n();
    let identity = WitnessPair {
        x: SymMatrix::identity(n),
        p: SymMatrix::identity(n),
    };
    let start = start.unwrap_or(&identity);
    let start = normalize(&start.x, &start.p, state)?
        .ok_or_else(|| Error::InvalidArgument("start witness has G = 0".into()))?;
    let obj = Objective {
        state,
        s_level: cfg.s_level,
        ascent: &cfg.ascent,
    };
    let parts = [partition.clone()];
    let out = descend(&obj, &parts, start, cfg.max_iterations, f64::NEG_INFINITY)?;
    let objective = cfg.c * out.point.max();
    let w = out.point.w.scaled(cfg.c);
    let certificate = separability_bound(&w, partition, &cfg.ascent)?;
    let report = ViolationReport::assemble(w, state, partition, certificate)?;
    Ok(OptimizedWitness {
        certified: objective < -cfg.c,
        report,
        objective,
        iterations: out.iterations,
        converged: out.converged,
    })
}

/// Result of [`genuine_search`].
#[derive(Clone, Debug, Serialize)]
pub struct GenuineResult {
    pub found: bool,
    pub witness: WitnessPair,
    /// One report per bipartition, in enumeration order.
    pub reports: Vec<ViolationReport>,
    /// Smallest score over the bipartitions.
    pub min_s: Option<f64>,
    pub restarts: usize,
    pub iterations: usize,
}

/// Random positive definite pair `A = RᵀR + 0.1·E` with standard normal `R`.
fn random_pd_pair(rng: &mut ChaCha8Rng, n: usize) -> Result<WitnessPair> {
    let mut draw = || {
        let r = nalgebra::DMatrix::<f64>::from_fn(n, n, |_, _| rng.sample(StandardNormal));
        let a = r.transpose() * &r + nalgebra::DMatrix::identity(n, n) * 0.1;
        SymMatrix::from_matrix(a)
    };
    Ok(WitnessPair { x: draw()?, p: draw()? })
}

/// Looks for one witness violating the bound of every bipartition at level
/// `cfg.s_level` simultaneously, which certifies genuine multipartite
/// entanglement. Runs the descent from `start` (if given) and then from up
/// to `cfg.restarts` random positive definite pairs.
pub fn genuine_search(state: &CVState, cfg: &SearchConfig, start: Option<&WitnessPair>) -> Result<GenuineResult> {
    cfg.validate()?;
    require_sigma(state, cfg.s_level)?;
    let n = state.n();
    if n < 3 {
        return Err(Error::InvalidArgument(format!("genuine search needs n >= 3, got {n}")));
    }
    let parts = bipartitions(n)?;
    let obj = Objective {
        state,
        s_level: cfg.s_level,
        ascent: &cfg.ascent,
    };
    // At G = 1 every E_I equals 1 + value, so success means value < −1.
    let target = -1.0;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut best: Option<Point> = None;
    let mut iterations = 0;
    let mut restarts = 0;
    let mut found = false;

    let mut next_start = match start {
        Some(w) => normalize(&w.x, &w.p, state)?,
        None => None,
    };
    for attempt in 0..=cfg.restarts {
        let w = match next_start.take() {
            Some(w) => w,
            None => {
                let candidate = random_pd_pair(&mut rng, n)?;
                match normalize(&candidate.x, &candidate.p, state)? {
                    Some(w) => w,
                    None => continue,
                }
            }
        };
        restarts = attempt;
        let out = descend(&obj, &parts, w, cfg.max_iterations, target)?;
        iterations += out.iterations;
        log::debug!(
            "genuine search attempt {attempt}: max value {:.6} after {} iterations",
            out.point.max(),
            out.iterations
        );
        let done = out.point.max() < target;
        if best.as_ref().is_none_or(|b| out.point.max() < b.max()) {
            best = Some(out.point);
        }
        if done {
            found = true;
            break;
        }
    }
    let best = best.ok_or_else(|| Error::InvalidArgument("no usable start point".into()))?;
    let w = best.w.scaled(cfg.c);
    let reports = parts
        .iter()
        .map(|p| {
            let certificate = separability_bound(&w, p, &cfg.ascent)?;
            ViolationReport::assemble(w.clone(), state, p, certificate)
        })
        .collect::<Result<Vec<_>>>()?;
    let min_s = reports
        .iter()
        .map(|r| r.s)
        .try_fold(f64::INFINITY, |acc, s| s.map(|v| acc.min(v)));
    let found = found && reports.iter().all(|r| r.certifies(cfg.s_level));
    Ok(GenuineResult {
        found,
        witness: w,
        reports,
        min_s,
        restarts,
        iterations,
    })
}

fn format_vector(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.2}")).collect();
    format!("({})", parts.join(", "))
}

fn format_option(v: Option<f64>, width: usize) -> String {
    match v {
        Some(x) => format!("{x:>width$.5}"),
        None => format!("{:>width$}", "-"),
    }
}

/// Aligned plain-text table of reports.
pub fn render_table(reports: &[ViolationReport]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<12} {:>10} {:>10} {:>10} {:>10} {:>11}  vectors",
        "partition", "G", "bound", "sigma", "s", "P(s)"
    );
    for r in reports {
        let conf = match r.confidence {
            Some(c) => format!("{c:>11.3e}"),
            None => format!("{:>11}", "-"),
        };
        let vectors = match &r.vectors {
            Some(v) => format!("h={} g={}", format_vector(&v.h), format_vector(&v.g)),
            None => String::new(),
        };
        let _ = writeln!(
            out,
            "{:<12} {:>10.5} {:>10.5} {} {} {}  {}",
            r.partition.to_string(),
            r.g,
            r.bound,
            format_option(r.sigma, 10),
            format_option(r.s, 10),
            conf,
            vectors
        );
    }
    out
}
