//! cvwitness command-line interface.
//!
//! Exit codes: 0 when the command ran and nothing was certified (or every
//! reproduced value matched), 1 when entanglement was certified (or a
//! reproduced value missed its tolerance), 2 on usage or input errors.

mod reference;
mod reproduce;

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use cvwitness::bounds::{
    lmi_separability_test, separability_bound, symmetric_witness, table1_bounds, AscentOptions, WitnessPair,
};
use cvwitness::linalg::quantum_bound;
use cvwitness::partitions::{bipartitions, Partition};
use cvwitness::states::{builtin_state, is_physical, load_state, partial_transpose, CVState, BUILTIN_STATES};
use cvwitness::witness::{
    genuine_search, optimize_witness, random_rank_one_search_all, render_table, Sampler, SearchConfig,
};
use serde_json::{json, Value};

const THREADS_ENV: &str = "CVWITNESS_THREADS";

#[derive(Parser)]
#[command(name = "cvwitness", version)]
#[command(about = "Certify multipartite entanglement of Gaussian states from second moments")]
struct Cli {
    /// Worker threads for searches (default: available cores). The
    /// CVWITNESS_THREADS environment variable takes precedence.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Quantumness bound and separability bounds of a witness pair.
    Bound(BoundArgs),
    /// Physicality, partial transposes and the sign-matrix test of a state.
    Check(CheckArgs),
    /// Search for witnesses that certify entanglement of a state.
    Search(SearchArgs),
    /// Recompute a published result and compare it with the reference values.
    Reproduce(ReproduceArgs),
}

#[derive(Args)]
struct AscentArgs {
    /// Iteration cap of the inner maximization.
    #[arg(long, default_value_t = AscentOptions::default().max_iterations)]
    max_iterations: usize,
    /// Gradient-norm tolerance of the inner maximization.
    #[arg(long, default_value_t = AscentOptions::default().gradient_tolerance)]
    tolerance: f64,
    /// Initial line-search step of the inner maximization.
    #[arg(long, default_value_t = AscentOptions::default().initial_step)]
    initial_step: f64,
}

impl AscentArgs {
    fn options(&self) -> Result<AscentOptions> {
        if self.max_iterations == 0 {
            bail!("--max-iterations must be at least 1");
        }
        if !(self.tolerance > 0.0 && self.initial_step > 0.0) {
            bail!("--tolerance and --initial-step must be positive");
        }
        Ok(AscentOptions {
            max_iterations: self.max_iterations,
            gradient_tolerance: self.tolerance,
            initial_step: self.initial_step,
            ..AscentOptions::default()
        })
    }
}

#[derive(Args)]
struct PartitionArgs {
    /// Partition in bar notation (e.g. "12|34"), or "trivial" / "full".
    /// May be repeated.
    #[arg(long = "partition")]
    partitions: Vec<String>,
    /// Every bipartition of the modes.
    #[arg(long)]
    all_bipartitions: bool,
}

impl PartitionArgs {
    fn resolve(&self, n: usize) -> Result<Vec<Partition>> {
        let mut out = Vec::new();
        for text in &self.partitions {
            out.push(parse_partition(text, n)?);
        }
        if self.all_bipartitions {
            out.extend(bipartitions(n)?);
        }
        Ok(out)
    }

    fn is_empty(&self) -> bool {
        self.partitions.is_empty() && !self.all_bipartitions
    }
}

#[derive(Args)]
struct BoundArgs {
    /// Witness file: {"n": .., "X": [[..]], "P": [[..]]}.
    #[arg(long, conflicts_with = "symmetric_witness", required_unless_present = "symmetric_witness")]
    witness: Option<PathBuf>,
    /// The completely symmetric n-mode witness.
    #[arg(long, value_name = "N")]
    symmetric_witness: Option<usize>,
    #[command(flatten)]
    partitions: PartitionArgs,
    /// Bounds table column (q, a, b, f) of the symmetric witness.
    #[arg(long, requires = "symmetric_witness")]
    table1: bool,
    #[command(flatten)]
    ascent: AscentArgs,
    /// Write the machine-readable report here ("-" for stdout).
    #[arg(long, value_name = "PATH")]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    /// Built-in state name or path to a state file.
    #[arg(long)]
    state: String,
    /// Partitions for the sign-matrix test (default: every bipartition).
    #[command(flatten)]
    partitions: PartitionArgs,
    #[arg(long, value_name = "PATH")]
    json: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SamplerArg {
    Normal,
    Uniform,
}

#[derive(Args)]
struct SearchArgs {
    /// Built-in state name or path to a state file.
    #[arg(long)]
    state: String,
    #[command(flatten)]
    partitions: PartitionArgs,
    /// Look for one witness violating every bipartition bound.
    #[arg(long, conflicts_with_all = ["partitions", "all_bipartitions"])]
    genuine: bool,
    /// Optimize full witness matrices instead of sampling rank-one pairs.
    #[arg(long, conflicts_with = "genuine")]
    optimize: bool,
    /// Starting witness file for --optimize or --genuine.
    #[arg(long, value_name = "PATH")]
    start: Option<PathBuf>,
    /// Certification level s.
    #[arg(long, visible_alias = "target-s", default_value_t = 6.0)]
    s_level: f64,
    /// Ignore measurement errors: rank by the raw margin, certify when it is positive.
    #[arg(long)]
    no_error: bool,
    /// Normalization G = C of optimized witnesses.
    #[arg(short = 'C', default_value_t = 1.0)]
    c: f64,
    /// Random rank-one trials per partition.
    #[arg(long, default_value_t = 1_000_000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = SamplerArg::Normal)]
    sampler: SamplerArg,
    /// Random restarts allowed in the genuine search.
    #[arg(long, default_value_t = 200)]
    restarts: usize,
    /// Descent iterations per optimization run.
    #[arg(long, default_value_t = 2_000)]
    descent_iterations: usize,
    #[command(flatten)]
    ascent: AscentArgs,
    #[arg(long, value_name = "PATH")]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct ReproduceArgs {
    #[arg(value_enum)]
    target: reproduce::Target,
    /// Random pairs for alt-property.
    #[arg(long, default_value_t = 1000)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    ascent: AscentArgs,
    #[arg(long, value_name = "PATH")]
    json: Option<PathBuf>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    configure_threads(cli.threads)?;
    match cli.command {
        Command::Bound(args) => cmd_bound(args),
        Command::Check(args) => cmd_check(args),
        Command::Search(args) => cmd_search(args),
        Command::Reproduce(args) => cmd_reproduce(args),
    }
}

fn configure_threads(flag: Option<usize>) -> Result<()> {
    let threads = match std::env::var(THREADS_ENV) {
        Ok(text) => Some(
            text.trim()
                .parse::<usize>()
                .with_context(|| format!("{THREADS_ENV}={text:?} is not a thread count"))?,
        ),
        Err(_) => flag,
    };
    if let Some(n) = threads {
        if n == 0 {
            bail!("thread count must be at least 1");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the thread pool")?;
    }
    Ok(())
}

fn parse_partition(text: &str, n: usize) -> Result<Partition> {
    Ok(match text.trim() {
        "trivial" => Partition::trivial(n),
        "full" => Partition::full(n),
        other => Partition::parse(other, n)?,
    })
}

fn load_state_arg(source: &str) -> Result<CVState> {
    if BUILTIN_STATES.contains(&source) {
        return Ok(builtin_state(source)?);
    }
    let path = Path::new(source);
    if !path.exists() {
        bail!(
            "{source:?} is neither a built-in state ({}) nor an existing file",
            BUILTIN_STATES.join(", ")
        );
    }
    Ok(load_state(path)?)
}

fn emit_json(target: Option<&Path>, value: &Value) -> Result<()> {
    let Some(path) = target else {
        return Ok(());
    };
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    if path == Path::new("-") {
        std::io::stdout().write_all(text.as_bytes())?;
    } else {
        std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

/// Human-readable output goes to stderr when the JSON report takes stdout.
fn say(json: Option<&Path>, text: &str) {
    if json == Some(Path::new("-")) {
        eprint!("{text}");
    } else {
        print!("{text}");
    }
}

fn cmd_bound(args: BoundArgs) -> Result<ExitCode> {
    let opts = args.ascent.options()?;
    let json_path = args.json.as_deref();
    let w = match (&args.witness, args.symmetric_witness) {
        (Some(path), _) => WitnessPair::load(path)?,
        (None, Some(n)) => symmetric_witness(n)?,
        (None, None) => bail!("give --witness or --symmetric-witness"),
    };
    let n = w.n();
    let mut text = String::new();
    let mut report = serde_json::Map::new();
    report.insert("n".into(), json!(n));

    if args.table1 {
        let col = table1_bounds(n, &opts)?;
        let cell = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |v| format!("{v:.5}"));
        writeln!(text, "{:<4} {:>10} {:>10} {:>10} {:>10}", "n", "q", "a", "b", "f")?;
        writeln!(
            text,
            "{:<4} {:>10.5} {:>10} {:>10} {:>10.5}",
            n,
            col.q,
            cell(col.a),
            cell(col.b),
            col.f
        )?;
        if !col.converged {
            writeln!(text, "warning: inner maximization did not converge")?;
        }
        report.insert("table1".into(), serde_json::to_value(&col)?);
    }

    let q = quantum_bound(&w.x, &w.p)?;
    report.insert("quantum_bound".into(), json!(q));
    if !args.table1 || !args.partitions.is_empty() {
        writeln!(text, "quantum bound B = {q:.5}")?;
    }
    let partitions = args.partitions.resolve(n)?;
    let mut bounds = Vec::new();
    if !partitions.is_empty() {
        writeln!(
            text,
            "{:<14} {:>10} {:>12} {:>10} {:>9}",
            "partition", "B_I", "gap", "iterations", "converged"
        )?;
    }
    for p in &partitions {
        let r = separability_bound(&w, p, &opts)?;
        writeln!(
            text,
            "{:<14} {:>10.5} {:>12.3e} {:>10} {:>9}",
            p.to_string(),
            r.value,
            r.gap(),
            r.iterations,
            r.converged
        )?;
        bounds.push(json!({ "partition": p, "result": r }));
    }
    report.insert("bounds".into(), Value::Array(bounds));
    say(json_path, &text);
    emit_json(json_path, &Value::Object(report))?;
    Ok(ExitCode::SUCCESS)
}

/// Nonempty unions of blocks, one per complementary pair.
fn block_unions(p: &Partition) -> Vec<Vec<usize>> {
    let blocks = p.blocks();
    let k = blocks.len();
    if k < 2 {
        return Vec::new();
    }
    // Subsets containing the last block are complements of ones that do not.
    (1u32..(1 << (k - 1)))
        .map(|mask| {
            let mut modes: Vec<usize> = (0..k)
                .filter(|b| mask & (1 << b) != 0)
                .flat_map(|b| blocks[b].iter().copied())
                .collect();
            modes.sort_unstable();
            modes
        })
        .collect()
}

fn mode_label(modes: &[usize]) -> String {
    let wide = modes.iter().any(|&m| m >= 9);
    let labels: Vec<String> = modes.iter().map(|m| (m + 1).to_string()).collect();
    labels.join(if wide { "," } else { "" })
}

fn cmd_check(args: CheckArgs) -> Result<ExitCode> {
    let json_path = args.json.as_deref();
    let state = load_state_arg(&args.state)?;
    let n = state.n();
    let physical = is_physical(&state)?;
    if !physical.physical {
        bail!(
            "state {} is not physical (smallest symplectic eigenvalue {:.6} < 0.5)",
            state.label,
            physical.min_symplectic_eigenvalue
        );
    }
    let partitions = if args.partitions.is_empty() {
        bipartitions(n)?
    } else {
        args.partitions.resolve(n)?
    };

    let mut text = String::new();
    writeln!(
        text,
        "state {} ({n} modes): physical, smallest symplectic eigenvalue {:.6}",
        state.label, physical.min_symplectic_eigenvalue
    )?;
    writeln!(
        text,
        "{:<14} {:>12} {:>14} {:>12} {:>9}  certified",
        "partition", "PT physical", "PT min eig", "LMI min eig", "violated"
    )?;
    let mut rows = Vec::new();
    let mut certified_any = false;
    for p in &partitions {
        let mut pt_min = f64::INFINITY;
        let mut transposes = Vec::new();
        for modes in block_unions(p) {
            let out = is_physical(&partial_transpose(&state, &modes)?)?;
            pt_min = pt_min.min(out.min_symplectic_eigenvalue);
            transposes.push(json!({
                "modes": mode_label(&modes),
                "physical": out.physical,
                "min_symplectic_eigenvalue": out.min_symplectic_eigenvalue,
            }));
        }
        let pt_physical = transposes.iter().all(|t| t["physical"] == json!(true));
        let lmi = lmi_separability_test(&state, p)?;
        let certified = !pt_physical || lmi.violated;
        certified_any |= certified;
        let pt_min_text = if pt_min.is_finite() {
            format!("{pt_min:.6}")
        } else {
            "-".to_string()
        };
        writeln!(
            text,
            "{:<14} {:>12} {:>14} {:>12.3e} {:>9}  {}",
            p.to_string(),
            pt_physical,
            pt_min_text,
            lmi.min_eigenvalue,
            lmi.violated,
            if certified { "entangled" } else { "-" }
        )?;
        rows.push(json!({
            "partition": p,
            "partial_transposes": transposes,
            "lmi": lmi,
            "certified": certified,
        }));
    }
    if !certified_any {
        writeln!(text, "separability not excluded for the requested partitions")?;
    }
    say(json_path, &text);
    emit_json(
        json_path,
        &json!({
            "state": state.label,
            "n": n,
            "physical": true,
            "min_symplectic_eigenvalue": physical.min_symplectic_eigenvalue,
            "partitions": rows,
            "certified": certified_any,
        }),
    )?;
    Ok(if certified_any { ExitCode::from(1) } else { ExitCode::SUCCESS })
}

fn cmd_search(args: SearchArgs) -> Result<ExitCode> {
    let json_path = args.json.as_deref();
    let state = load_state_arg(&args.state)?;
    let n = state.n();
    let s_level = if args.no_error { 0.0 } else { args.s_level };
    let cfg = SearchConfig {
        trials: args.trials,
        seed: args.seed,
        s_level,
        c: args.c,
        sampler: match args.sampler {
            SamplerArg::Normal => Sampler::StandardNormal,
            SamplerArg::Uniform => Sampler::Uniform,
        },
        restarts: args.restarts,
        max_iterations: args.descent_iterations,
        ascent: args.ascent.options()?,
    };
    if !args.no_error && !state.has_error_model() {
        bail!("state {} has no error model; pass --no-error to score by the raw margin", state.label);
    }
    let start = args.start.as_deref().map(WitnessPair::load).transpose()?;
    if start.is_some() && !(args.optimize || args.genuine) {
        bail!("--start applies to --optimize and --genuine only");
    }
    let header = json!({
        "state": state.label,
        "n": n,
        "s_level": s_level,
        "config": cfg,
    });
    let mut text = String::new();

    let (certified, mut report) = if args.genuine {
        let out = genuine_search(&state, &cfg, start.as_ref())?;
        writeln!(
            text,
            "genuine search at s = {s_level}: {} after {} restarts, {} iterations",
            if out.found { "found" } else { "not found" },
            out.restarts,
            out.iterations
        )?;
        if let Some(min_s) = out.min_s {
            writeln!(text, "min s over bipartitions = {min_s:.5}")?;
        }
        text.push_str(&render_table(&out.reports));
        (out.found, json!({ "mode": "genuine", "result": out }))
    } else {
        if args.partitions.is_empty() {
            bail!("give --partition, --all-bipartitions or --genuine");
        }
        let partitions = args.partitions.resolve(n)?;
        if args.optimize {
            let mut results = Vec::new();
            let mut any = false;
            for p in &partitions {
                let out = optimize_witness(&state, p, &cfg, start.as_ref())?;
                any |= out.certified;
                results.push(out);
            }
            let reports: Vec<_> = results.iter().map(|r| r.report.clone()).collect();
            text.push_str(&render_table(&reports));
            for r in &results {
                writeln!(
                    text,
                    "{}: objective {:.5} (certifies below {:.5}), {}",
                    r.report.partition,
                    r.objective,
                    -cfg.c,
                    if r.certified { "certified" } else { "not certified" }
                )?;
            }
            (any, json!({ "mode": "optimize", "results": results }))
        } else {
            let mut reports = random_rank_one_search_all(&state, &partitions, &cfg, !args.no_error)?;
            // Rank-one witnesses cannot detect every state (PPT cuts among
            // them), so partitions left uncertified go to the optimizer.
            let mut methods = vec!["rank-one"; reports.len()];
            for (k, p) in partitions.iter().enumerate() {
                if reports[k].certifies(s_level) {
                    continue;
                }
                let out = optimize_witness(&state, p, &cfg, None)?;
                if out.report.certifies(s_level) {
                    reports[k] = out.report;
                    methods[k] = "optimized";
                }
            }
            text.push_str(&render_table(&reports));
            let any = reports.iter().any(|r| r.certifies(s_level));
            let entries: Vec<Value> = reports
                .iter()
                .zip(&methods)
                .map(|(r, m)| json!({ "method": m, "report": r }))
                .collect();
            (any, json!({ "mode": "random", "reports": entries }))
        }
    };
    writeln!(
        text,
        "{}",
        if certified {
            "entanglement certified"
        } else {
            "not certified at the requested level"
        }
    )?;
    if let (Value::Object(out), Value::Object(head)) = (&mut report, header) {
        for (k, v) in head {
            out.insert(k, v);
        }
        out.insert("certified".into(), json!(certified));
    }
    say(json_path, &text);
    emit_json(json_path, &report)?;
    Ok(if certified { ExitCode::from(1) } else { ExitCode::SUCCESS })
}

fn cmd_reproduce(args: ReproduceArgs) -> Result<ExitCode> {
    let json_path = args.json.as_deref();
    let checks = reproduce::run(args.target, &args.ascent.options()?, args.samples, args.seed)?;
    let (text, pass) = summarize(&checks);
    say(json_path, &text);
    emit_json(
        json_path,
        &json!({
            "target": args.target,
            "checks": checks,
            "pass": pass,
        }),
    )?;
    Ok(if pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

/// Rendered check lines plus a list of deltas for any mismatch.
fn summarize(checks: &[reproduce::Check]) -> (String, bool) {
    let mut text = String::new();
    for c in checks {
        text.push_str(&c.render());
        text.push('\n');
    }
    let failed: Vec<&reproduce::Check> = checks.iter().filter(|c| !c.pass).collect();
    if failed.is_empty() {
        text.push_str(&format!("all {} values reproduced\n", checks.len()));
    } else {
        text.push_str(&format!("{} of {} values outside tolerance:\n", failed.len(), checks.len()));
        for c in &failed {
            text.push_str(&format!("  {}: computed {} reference {}\n", c.name, c.computed, c.expected));
        }
    }
    (text, failed.is_empty())
}
