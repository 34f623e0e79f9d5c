//! Recomputation of published results against their reference values.

use anyhow::Result;
use cvwitness::bounds::{evaluate_g, lmi_separability_test, separability_bound, table1_bounds, AscentOptions};
use cvwitness::linalg::{alt_inequality_gap, SymMatrix};
use cvwitness::partitions::{bipartitions, Partition};
use cvwitness::states::{builtin_state, is_physical, partial_transpose};
use cvwitness::witness::measurement_sigma;
use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::reference as r;

/// One compared quantity.
#[derive(Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub computed: f64,
    /// Reference value, or the limit for one-sided checks.
    pub expected: f64,
    pub tolerance: f64,
    pub relation: Relation,
    pub pass: bool,
}

#[derive(Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Within,
    AtLeast,
    Holds,
}

impl Check {
    pub fn within(name: impl Into<String>, computed: f64, expected: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            computed,
            expected,
            tolerance,
            relation: Relation::Within,
            pass: (computed - expected).abs() <= tolerance,
        }
    }

    fn at_least(name: impl Into<String>, computed: f64, limit: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            computed,
            expected: limit,
            tolerance,
            relation: Relation::AtLeast,
            pass: computed >= limit - tolerance,
        }
    }

    /// A yes/no property; `computed` carries the quantity behind it.
    fn holds(name: impl Into<String>, computed: f64, pass: bool) -> Self {
        Check {
            name: name.into(),
            computed,
            expected: f64::NAN,
            tolerance: 0.0,
            relation: Relation::Holds,
            pass,
        }
    }

    pub fn render(&self) -> String {
        let status = if self.pass { "ok" } else { "MISMATCH" };
        let reference = match self.relation {
            Relation::Within => format!("{:>12.6} ± {:.0e}", self.expected, self.tolerance),
            Relation::AtLeast => format!(">= {:>9.6} - {:.0e}", self.expected, self.tolerance),
            Relation::Holds => format!("{:>21}", ""),
        };
        let delta = match self.relation {
            Relation::Holds => String::new(),
            _ => format!("  delta {:+.3e}", self.computed - self.expected),
        };
        format!("{:<8} {:<34} {:>12.6}  {reference}{delta}", status, self.name, self.computed)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Target {
    Table1,
    Ppt4,
    Genuine4,
    AltProperty,
}

pub fn run(target: Target, opts: &AscentOptions, samples: u64, seed: u64) -> Result<Vec<Check>> {
    match target {
        Target::Table1 => table1(opts),
        Target::Ppt4 => ppt4(opts),
        Target::Genuine4 => genuine4(opts),
        Target::AltProperty => alt_property(samples, seed),
    }
}

fn table1(opts: &AscentOptions) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for &(n, q, a, b, f) in &r::TABLE1 {
        let col = table1_bounds(n, opts)?;
        checks.push(Check::within(format!("n={n} q"), col.q, q, r::TABLE1_TOL));
        if let (Some(computed), Some(expected)) = (col.a, a) {
            checks.push(Check::within(format!("n={n} a"), computed, expected, r::TABLE1_TOL));
        }
        if let (Some(computed), Some(expected)) = (col.b, b) {
            checks.push(Check::within(format!("n={n} b"), computed, expected, r::TABLE1_TOL));
        }
        checks.push(Check::within(format!("n={n} f"), col.f, f, r::TABLE1_TOL));
    }
    Ok(checks)
}

fn ppt4(opts: &AscentOptions) -> Result<Vec<Check>> {
    let state = builtin_state("ppt4")?;
    let w = r::ppt_witness();
    let g = evaluate_g(&w, &state)?;
    let commuting = 2.0 * ((r::PPT_X * r::PPT_P).sqrt() + (r::PPT_Y * r::PPT_Q).sqrt());
    let bound = separability_bound(&w, &Partition::parse("12|34", 4)?, opts)?;
    let mut checks = vec![
        Check::within("G", g, r::PPT_G, r::PPT_TOL),
        Check::within("commuting certificate", commuting, r::PPT_CERTIFICATE, r::PPT_TOL),
        Check::at_least("B_12|34", bound.value, r::PPT_CERTIFICATE, r::PPT_BOUND_SLACK),
        Check::holds("B_12|34 exceeds G", bound.value - g, bound.value > g),
    ];
    for p in bipartitions(4)? {
        let blocks = p.blocks();
        let single = blocks.iter().any(|b| b.len() == 1);
        let pt = is_physical(&partial_transpose(&state, &blocks[0])?)?;
        let name = if single { "unphysical" } else { "physical" };
        checks.push(Check::holds(
            format!("transpose {} {name}", label(&blocks[0])),
            pt.min_symplectic_eigenvalue,
            pt.physical != single,
        ));
        let lmi = lmi_separability_test(&state, &p)?;
        let name = if single { "violated" } else { "passed" };
        checks.push(Check::holds(format!("LMI {p} {name}"), lmi.min_eigenvalue, lmi.violated == single));
    }
    Ok(checks)
}

fn genuine4(opts: &AscentOptions) -> Result<Vec<Check>> {
    let state = builtin_state("klev4")?;
    let w = r::genuine_witness();
    let g = evaluate_g(&w, &state)?;
    let sigma = measurement_sigma(&w, &state)?;
    let mut checks = vec![
        Check::within("G", g, r::GENUINE_G, r::GENUINE_G_TOL),
        Check::within("sigma", sigma, r::GENUINE_SIGMA, r::GENUINE_SIGMA_TOL),
    ];
    let mut min_s = f64::INFINITY;
    for &(text, bound) in &r::GENUINE_BOUNDS {
        let certificate = separability_bound(&w, &Partition::parse(text, 4)?, opts)?;
        checks.push(Check::within(format!("B_{text}"), certificate.value, bound, r::GENUINE_BOUND_TOL));
        min_s = min_s.min((certificate.value - g) / sigma);
    }
    checks.push(Check::within("min s", min_s, r::GENUINE_MIN_S, r::GENUINE_S_TOL));
    Ok(checks)
}

fn alt_property(samples: u64, seed: u64) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = f64::INFINITY;
    for k in 0..samples {
        let n = 1 + (k % 5) as usize;
        let rank = |k: u64, shift: u64| 1 + ((k / 5 + shift) % n as u64) as usize;
        let x = random_psd(&mut rng, n, rank(k, 0));
        let p = random_psd(&mut rng, n, rank(k, 1));
        worst = worst.min(alt_inequality_gap(&x, &p)?);
    }
    Ok(vec![Check::at_least(format!("min ALT gap over {samples} pairs"), worst, 0.0, r::ALT_TOL)])
}

fn random_psd(rng: &mut ChaCha8Rng, n: usize, rank: usize) -> SymMatrix {
    let r = DMatrix::<f64>::from_fn(rank, n, |_, _| StandardNormal.sample(rng));
    SymMatrix::from_matrix(r.transpose() * r).expect("symmetric")
}

fn label(modes: &[usize]) -> String {
    modes.iter().map(|m| (m + 1).to_string()).collect()
}
