//! bethelab: reproducible table and figure pipelines for Bethe-state
//! preparation on the XXX chain.
//!
//! Every command writes its artifacts (CSV/JSON) plus a run manifest
//! with parameter echo and content digests into --out-dir. Outputs are
//! byte-deterministic for fixed flags and seed; only the manifest's
//! duration field varies. Exit codes: 0 success, 2 computation failure,
//! 3 internal cross-check failure.

mod manifest;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::json;

use bethelab::correlator::{self, ExperimentPlan};
use bethelab::emulator::{self, LabelCompletion};
use bethelab::gaudin::{self, GaudinReport};
use bethelab::oracle;
use bethelab::solver::{self, BetheRootSet, HalfInt};
use bethelab::state;

use manifest::RunManifest;

/// Documented default seed for all randomized commands.
const DEFAULT_SEED: u64 = 7;

#[derive(Parser)]
#[command(
    name = "bethelab",
    version,
    about = "Bethe-state laboratory for the periodic spin-1/2 XXX chain"
)]
struct Cli {
    /// Directory for CSV/JSON artifacts and run manifests.
    #[arg(long, global = true, default_value = "out")]
    out_dir: PathBuf,

    /// Seed for all randomized commands.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,

    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Composite-register amplitude budget for emulation.
    #[arg(long, global = true, default_value_t = emulator::DEFAULT_COMPOSITE_BUDGET)]
    memory_budget: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the Bethe equations for one state and write its roots JSON.
    Solve {
        #[command(flatten)]
        selection: RootSelection,
        /// Output file (default: roots_L{L}_M{M}.json in --out-dir).
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Enumerate all real solutions of one (L, M) sector.
    Enumerate {
        #[arg(long = "L")]
        chain_len: usize,
        #[arg(long = "M")]
        magnons: usize,
        /// Cap on attempted counting-number sets.
        #[arg(long)]
        max_sets: Option<usize>,
    },
    /// Success probability report for one state.
    Success {
        #[command(flatten)]
        selection: RootSelection,
    },
    /// The four-state success-probability benchmark table.
    Table1,
    /// Ground-state correlator table: exact values and/or shot experiments.
    Table2 {
        /// Emit exact correlators (two independent routes).
        #[arg(long)]
        exact: bool,
        /// Run shot experiments.
        #[arg(long)]
        shots: bool,
        /// Chain lengths.
        #[arg(long = "L", value_delimiter = ',', default_value = "4,6,8")]
        chain_lens: Vec<usize>,
        /// Target error for the shot budget.
        #[arg(long, default_value_t = 0.01)]
        epsilon: f64,
        /// Trials per experiment.
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
    /// Success probability of lowest-energy states vs chain length.
    Fig2 {
        /// Magnon numbers to scan.
        #[arg(long, value_delimiter = ',', default_value = "1,2,3,4")]
        magnons: Vec<usize>,
        /// Largest (even) chain length.
        #[arg(long, default_value_t = 96)]
        max_chain_len: usize,
    },
    /// ln of the ground-state success probability vs chain length.
    Fig3 {
        #[arg(long, default_value_t = 4)]
        min_chain_len: usize,
        #[arg(long, default_value_t = 40)]
        max_chain_len: usize,
    },
    /// Multi-trial shot experiment on one ground state.
    Measure {
        /// Chain length L (even); ground state M = L/2 is prepared.
        #[arg(long = "L")]
        chain_len: Option<usize>,
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long)]
        trials: Option<usize>,
        /// Separations l to estimate (default 1..=L/2).
        #[arg(long, value_delimiter = ',')]
        separations: Option<Vec<usize>>,
        /// Pin the per-trial shot count instead of planning it.
        #[arg(long)]
        pin_shots: Option<u64>,
        /// JSON config {"L", "epsilon", "trials", "seed", "separations",
        /// "pinN"}; explicit flags override it.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Register-level emulation of the preparation circuit.
    Emulate {
        #[command(flatten)]
        selection: RootSelection,
        /// Also sample this many measurement shots and write them as CSV.
        #[arg(long)]
        shots: Option<u64>,
    },
    /// Dense exact diagonalization of one sector.
    Oracle {
        #[arg(long = "L")]
        chain_len: usize,
        #[arg(long = "M")]
        magnons: usize,
    },
    /// Determinant-bound checks: full scan and/or one exceptional state.
    Conjectures {
        /// Scan all real-root states up to this chain length.
        #[arg(long)]
        max_chain_len: Option<usize>,
        /// Probe the equally-spaced state at the given L and M.
        #[arg(long, num_args = 2, value_names = ["L", "M"])]
        exceptional: Option<Vec<usize>>,
    },
    /// Write a state's amplitude map as JSON.
    DumpState {
        #[command(flatten)]
        selection: RootSelection,
        #[arg(long, value_enum, default_value_t = StateKind::Bethe)]
        kind: StateKind,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum StateKind {
    /// The unnormalized on-shell Bethe state.
    Bethe,
    /// The bracket-rescaled state.
    Rescaled,
    /// The unit-norm Bethe state.
    Normalized,
    /// The uniform Dicke state (no solve involved).
    Dicke,
}

/// How to pick the root set a command operates on.
#[derive(Args, Clone, Debug)]
struct RootSelection {
    /// Chain length L (even).
    #[arg(long = "L")]
    chain_len: usize,
    /// Magnon number M.
    #[arg(long = "M")]
    magnons: Option<usize>,
    /// The antiferromagnetic ground state (M = L/2).
    #[arg(long, conflicts_with_all = ["lowest_energy", "counting_numbers"])]
    ground: bool,
    /// The lowest-energy real solution of the (L, M) sector.
    #[arg(long, conflicts_with = "counting_numbers")]
    lowest_energy: bool,
    /// Counting numbers, comma separated (integers or half-integers).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    counting_numbers: Option<Vec<f64>>,
}

impl RootSelection {
    fn resolve(&self) -> anyhow::Result<BetheRootSet> {
        if self.ground {
            return Ok(solver::ground_state(self.chain_len)?);
        }
        let magnons = self
            .magnons
            .context("--M is required unless --ground is given")?;
        if self.lowest_energy {
            return Ok(solver::lowest_energy_solution(self.chain_len, magnons)?);
        }
        let raw = self
            .counting_numbers
            .as_ref()
            .context("pick a state with one of --ground, --lowest-energy, --counting-numbers")?;
        anyhow::ensure!(
            raw.len() == magnons,
            "expected {magnons} counting numbers, got {}",
            raw.len()
        );
        let numbers: Vec<HalfInt> = raw
            .iter()
            .map(|&x| HalfInt::try_from_f64(x))
            .collect::<bethelab::Result<_>>()?;
        Ok(solver::solve_by_counting_numbers(self.chain_len, &numbers)?)
    }

    fn describe(&self) -> serde_json::Value {
        json!({
            "L": self.chain_len,
            "M": self.magnons,
            "ground": self.ground,
            "lowestEnergy": self.lowest_energy,
            "countingNumbers": self.counting_numbers,
        })
    }
}

/// A failed internal consistency check; maps to exit code 3.
#[derive(Debug)]
struct CrossCheckFailure(String);

impl std::fmt::Display for CrossCheckFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "cross-check failed: {}", self.0)
    }
}

impl std::error::Error for CrossCheckFailure {}

fn cross_check(ok: bool, message: String) -> anyhow::Result<()> {
    if ok {
        Ok(())
    } else {
        Err(CrossCheckFailure(message).into())
    }
}

/// Shared state for one command run: output directory plus the manifest
/// under construction.
struct Ctx {
    out_dir: PathBuf,
    seed: u64,
    memory_budget: usize,
    manifest: RunManifest,
}

impl Ctx {
    fn new(cli: &Cli, command: &str, parameters: serde_json::Value) -> anyhow::Result<Self> {
        fs::create_dir_all(&cli.out_dir)
            .with_context(|| format!("creating {}", cli.out_dir.display()))?;
        Ok(Ctx {
            out_dir: cli.out_dir.clone(),
            seed: cli.seed,
            memory_budget: cli.memory_budget,
            manifest: RunManifest::new(command, parameters, cli.seed),
        })
    }

    fn write(&mut self, name: &str, contents: &str) -> anyhow::Result<PathBuf> {
        let path = self.out_dir.join(name);
        self.write_at(&path, contents)?;
        Ok(path)
    }

    fn write_at(&mut self, path: &Path, contents: &str) -> anyhow::Result<()> {
        fs::write(path, contents).with_context(|| format!("writing {}", path.display()))?;
        self.manifest.record(path)?;
        Ok(())
    }

    fn finish(self) -> anyhow::Result<()> {
        let path = self.manifest.write(&self.out_dir)?;
        println!("manifest: {}", path.display());
        Ok(())
    }
}

/// 12 significant digits, the CSV float format.
fn csv_float(x: f64) -> String {
    format!("{x:.11e}")
}

/// 17 significant digits, the JSON float format.
fn json_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn success_report_json(report: &GaudinReport) -> String {
    let brackets = report
        .bracket_products
        .iter()
        .map(|&p| json_float(p))
        .collect::<Vec<_>>()
        .join(",");
    let mut matrix_rows = Vec::with_capacity(report.magnons);
    for m in 0..report.magnons {
        let row = (0..report.magnons)
            .map(|n| json_float(report.matrix[(m, n)]))
            .collect::<Vec<_>>()
            .join(",");
        matrix_rows.push(format!("[{row}]"));
    }
    format!(
        "{{\"L\":{},\"M\":{},\"alpha2\":{},\"lnAlpha2\":{},\"detG\":{},\"lnAbsDetG\":{},\"detSign\":{},\"ratioToFactorialBound\":{},\"delta\":{},\"residual\":{},\"bracketProducts\":[{}],\"matrix\":[{}]}}",
        report.chain_len,
        report.magnons,
        json_float(report.success_probability),
        json_float(report.ln_success_probability),
        json_float(report.determinant),
        json_float(report.log_determinant.ln_abs),
        report.log_determinant.sign as i8,
        json_float(report.ratio_to_factorial_bound),
        json_float(report.delta),
        json_float(report.residual),
        brackets,
        matrix_rows.join(",")
    )
}

fn momenta_field(roots: &BetheRootSet) -> String {
    roots
        .momenta()
        .iter()
        .map(|&k| csv_float(k))
        .collect::<Vec<_>>()
        .join(";")
}

fn cmd_solve(cli: &Cli, selection: &RootSelection, output: Option<&PathBuf>) -> anyhow::Result<()> {
    let mut ctx = Ctx::new(cli, "solve", selection.describe())?;
    let roots = selection.resolve()?;
    println!(
        "L={} M={} energy={:.12} residual={:.3e}",
        roots.chain_len(),
        roots.magnon_count(),
        roots.energy(),
        roots.residual()
    );
    println!("k = {:?}", roots.momenta());
    let json = roots.to_json_string();
    match output {
        Some(path) => ctx.write_at(path, &json)?,
        None => {
            ctx.write(
                &format!(
                    "roots_L{}_M{}.json",
                    roots.chain_len(),
                    roots.magnon_count()
                ),
                &json,
            )?;
        }
    }
    ctx.finish()
}

fn cmd_enumerate(
    cli: &Cli,
    chain_len: usize,
    magnons: usize,
    max_sets: Option<usize>,
) -> anyhow::Result<()> {
    let mut ctx = Ctx::new(
        cli,
        "enumerate",
        json!({"L": chain_len, "M": magnons, "maxSets": max_sets}),
    )?;
    let enumeration = solver::enumerate_real_solutions(chain_len, magnons, max_sets)?;
    println!(
        "attempted {} counting-number sets: {} solutions, {} failed, {} duplicates",
        enumeration.attempted,
        enumeration.solutions.len(),
        enumeration.failed,
        enumeration.duplicates
    );
    let solutions = enumeration
        .solutions
        .iter()
        .map(|s| s.to_json_string())
        .collect::<Vec<_>>()
        .join(",");
    let json = format!(
        "{{\"L\":{},\"M\":{},\"attempted\":{},\"failed\":{},\"duplicates\":{},\"solutions\":[{}]}}",
        chain_len,
        magnons,
        enumeration.attempted,
        enumeration.failed,
        enumeration.duplicates,
        solutions
    );
    ctx.write(&format!("enumeration_L{chain_len}_M{magnons}.json"), &json)?;
    ctx.finish()
}

fn cmd_success(cli: &Cli, selection: &RootSelection) -> anyhow::Result<()> {
    let mut ctx = Ctx::new(cli, "success", selection.describe())?;
    let roots = selection.resolve()?;
    let report = gaudin::success_probability(&roots)?;
    println!(
        "L={} M={} |alpha|^2 = {:.12e} (det G = {:.6e}, delta = {:.3e})",
        report.chain_len,
        report.magnons,
        report.success_probability,
        report.determinant,
        report.delta
    );
    ctx.write(
        &format!("success_L{}_M{}.json", report.chain_len, report.magnons),
        &success_report_json(&report),
    )?;
    ctx.finish()
}

fn cmd_table1(cli: &Cli) -> anyhow::Result<()> {
    let mut ctx = Ctx::new(cli, "table1", json!({}))?;
    let states = solver::benchmark_states()?;
    let mut csv = String::from("L,M,k,alpha2\n");
    for roots in &states {
        let report = gaudin::success_probability(roots)?;
        // dual route: brute-force norm must reproduce the determinant value
        let psi = state::build_bethe_state(roots)?;
        let dim = bethelab::combinatorics::binomial(roots.chain_len(), roots.magnon_count());
        let m_factorial: u128 = (1..=roots.magnon_count() as u128).product();
        let brute = psi.norm_squared() / (dim as f64 * (m_factorial * m_factorial) as f64);
        cross_check(
            (report.success_probability - brute).abs() <= 1e-8,
            format!(
                "table1 L={} M={}: determinant route {} vs norm route {brute}",
                roots.chain_len(),
                roots.magnon_count(),
                report.success_probability
            ),
        )?;
        writeln!(
            csv,
            "{},{},{},{}",
            roots.chain_len(),
            roots.magnon_count(),
            momenta_field(roots),
            csv_float(report.success_probability)
        )?;
        println!(
            "L={} M={} |alpha|^2 = {:.6}",
            roots.chain_len(),
            roots.magnon_count(),
            report.success_probability
        );
    }
    ctx.write("table1.csv", &csv)?;
    ctx.finish()
}

fn cmd_table2(
    cli: &Cli,
    exact: bool,
    shots: bool,
    chain_lens: &[usize],
    epsilon: f64,
    trials: usize,
) -> anyhow::Result<()> {
    let run_exact = exact || !shots;
    let mut ctx = Ctx::new(
        cli,
        "table2",
        json!({
            "exact": run_exact,
            "shots": shots,
            "L": chain_lens,
            "epsilon": epsilon,
            "trials": trials,
        }),
    )?;

    if run_exact {
        let mut csv = String::from("L,l,value\n");
        for &chain_len in chain_lens {
            let roots = solver::ground_state(chain_len)?;
            let bethe = state::normalize(&state::build_bethe_state(&roots)?)?;
            let hamiltonian = oracle::build_hamiltonian(chain_len, chain_len / 2)?;
            let (_, eigenvector) = oracle::ground_eigenpair(&hamiltonian)?;
            for separation in 1..=chain_len / 2 {
                let from_bethe = oracle::exact_correlator(&bethe, separation)?;
                let from_eigenvector = oracle::exact_correlator(&eigenvector, separation)?;
                cross_check(
                    (from_bethe - from_eigenvector).abs() <= 1e-10,
                    format!(
                        "table2 L={chain_len} l={separation}: Bethe route {from_bethe} vs dense route {from_eigenvector}"
                    ),
                )?;
                writeln!(csv, "{chain_len},{separation},{}", csv_float(from_bethe))?;
                println!("L={chain_len} l={separation} exact = {from_bethe:.6}");
            }
        }
        ctx.write("table2_exact.csv", &csv)?;
    }

    if shots {
        let mut csv = String::from("L,l,mean,std,N,trials,seed\n");
        for &chain_len in chain_lens {
            let roots = solver::ground_state(chain_len)?;
            let plan = ExperimentPlan::new(roots, epsilon, trials, ctx.seed)?;
            let shots_per_trial = plan.shots_per_trial;
            let experiment = correlator::run_experiment(plan)?;
            for summary in &experiment.summaries {
                writeln!(
                    csv,
                    "{chain_len},{},{},{},{shots_per_trial},{trials},{}",
                    summary.separation,
                    csv_float(summary.mean),
                    csv_float(summary.sample_std),
                    ctx.seed
                )?;
                println!(
                    "L={chain_len} l={} mean = {:.4} ± {:.4} (N = {shots_per_trial})",
                    summary.separation, summary.mean, summary.sample_std
                );
            }
        }
        ctx.write("table2_shots.csv", &csv)?;
    }
    ctx.finish()
}

fn cmd_fig2(cli: &Cli, magnons: &[usize], max_chain_len: usize) -> anyhow::Result<()> {
    let mut ctx = Ctx::new(
        cli,
        "fig2",
        json!({"magnons": magnons, "maxChainLen": max_chain_len}),
    )?;
    let mut csv = String::from("M,L,alpha2\n");
    for &m in magnons {
        let chain_lens: Vec<usize> = ((2 * m).max(2)..=max_chain_len)
            .filter(|l| l % 2 == 0)
            .collect();
        let scan = gaudin::large_l_scan(m, &chain_lens);
        for (chain_len, reason) in &scan.failures {
            eprintln!("fig2: no state at M={m}, L={chain_len}: {reason}");
        }
        for point in &scan.points {
            if m == 1 {
                cross_check(
                    (point.success_probability - 1.0).abs() <= 1e-12,
                    format!(
                        "fig2 M=1 L={}: |alpha|^2 = {}",
                        point.chain_len, point.success_probability
                    ),
                )?;
            }
            writeln!(
                csv,
                "{m},{},{}",
                point.chain_len,
                csv_float(point.success_probability)
            )?;
        }
    }
    ctx.write("fig2.csv", &csv)?;
    ctx.finish()
}

fn cmd_fig3(cli: &Cli, min_chain_len: usize, max_chain_len: usize) -> anyhow::Result<()> {
    let mut ctx = Ctx::new(
        cli,
        "fig3",
        json!({"minChainLen": min_chain_len, "maxChainLen": max_chain_len}),
    )?;
    let chain_lens: Vec<usize> = (min_chain_len..=max_chain_len)
        .filter(|l| l % 2 == 0)
        .collect();
    let scan = gaudin::ground_state_probability_scan(&chain_lens)?;
    let mut csv = String::from("L,alpha2,ln_alpha2\n");
    for point in &scan.points {
        writeln!(
            csv,
            "{},{},{}",
            point.chain_len,
            csv_float(point.success_probability),
            csv_float(point.ln_success_probability)
        )?;
    }
    ctx.write("fig3.csv", &csv)?;
    let fit = format!(
        "{{\"slope\":{},\"intercept\":{},\"rSquared\":{}}}",
        json_float(scan.fit.slope),
        json_float(scan.fit.intercept),
        json_float(scan.fit.r_squared)
    );
    ctx.write("fig3_fit.json", &fit)?;
    println!(
        "ln|alpha|^2 ≈ {:.4}·L + {:.4} (R² = {:.5})",
        scan.fit.slope, scan.fit.intercept, scan.fit.r_squared
    );
    ctx.finish()
}

#[derive(Deserialize, Default)]
struct MeasureConfig {
    #[serde(rename = "L")]
    chain_len: Option<usize>,
    epsilon: Option<f64>,
    trials: Option<usize>,
    seed: Option<u64>,
    separations: Option<Vec<usize>>,
    #[serde(rename = "pinN")]
    pin_n: Option<u64>,
}

#[allow(clippy::too_many_arguments)]
fn cmd_measure(
    cli: &Cli,
    chain_len: Option<usize>,
    epsilon: Option<f64>,
    trials: Option<usize>,
    separations: Option<Vec<usize>>,
    pin_shots: Option<u64>,
    config_path: Option<&PathBuf>,
) -> anyhow::Result<()> {
    let config: MeasureConfig = match config_path {
        Some(path) => serde_json::from_str(
            &fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?,
        )?,
        None => MeasureConfig::default(),
    };
    // flags override the config file
    let chain_len = chain_len
        .or(config.chain_len)
        .context("--L (or \"L\" in --config) is required")?;
    let epsilon = epsilon.or(config.epsilon).unwrap_or(0.01);
    let trials = trials.or(config.trials).unwrap_or(100);
    let seed = config.seed.unwrap_or(cli.seed);
    let pinned = pin_shots.or(config.pin_n);

    let mut ctx = Ctx::new(
        cli,
        "measure",
        json!({
            "L": chain_len,
            "epsilon": epsilon,
            "trials": trials,
            "separations": separations,
            "pinN": pinned,
            "config": config_path.map(|p| p.display().to_string()),
        }),
    )?;

    let roots = solver::ground_state(chain_len)?;
    let mut plan = match pinned {
        Some(n) => ExperimentPlan::with_pinned_shots(roots, epsilon, trials, seed, n)?,
        None => ExperimentPlan::new(roots, epsilon, trials, seed)?,
    };
    if let Some(separations) = separations.or(config.separations) {
        plan.separations = separations;
    }
    let shots_per_trial = plan.shots_per_trial;
    println!(
        "L={chain_len}: {} trials x {} shots (epsilon = {epsilon})",
        trials, shots_per_trial
    );
    let experiment = correlator::run_experiment(plan)?;
    let mut csv = String::from("L,l,mean,std,N,trials,seed\n");
    for summary in &experiment.summaries {
        writeln!(
            csv,
            "{chain_len},{},{},{},{shots_per_trial},{trials},{seed}",
            summary.separation,
            csv_float(summary.mean),
            csv_float(summary.sample_std)
        )?;
        println!(
            "l={}: {:.4} ± {:.4} ({} trials used)",
            summary.separation, summary.mean, summary.sample_std, summary.trials_used
        );
    }
    ctx.write(&format!("measure_L{chain_len}.csv"), &csv)?;
    ctx.finish()
}

fn cmd_emulate(cli: &Cli, selection: &RootSelection, shots: Option<u64>) -> anyhow::Result<()> {
    let mut params = selection.describe();
    params["shots"] = json!(shots);
    let mut ctx = Ctx::new(cli, "emulate", params)?;
    let roots = selection.resolve()?;
    let report = gaudin::success_probability(&roots)?;
    let emulation =
        emulator::run_algorithm_with(&roots, ctx.memory_budget, LabelCompletion::Householder)?;
    let block_deviation = emulator::projected_amplitude_check(&roots)?;
    println!(
        "emulator accept = {:.12e}, formula = {:.12e}, overlap = {:.12}, block deviation = {:.3e}",
        emulation.accept_probability,
        report.success_probability,
        emulation.overlap_with_target,
        block_deviation
    );
    let json = format!(
        "{{\"L\":{},\"M\":{},\"acceptProbability\":{},\"formulaProbability\":{},\"overlapWithTarget\":{},\"maxBlockDeviation\":{}}}",
        roots.chain_len(),
        roots.magnon_count(),
        json_float(emulation.accept_probability),
        json_float(report.success_probability),
        json_float(emulation.overlap_with_target),
        json_float(block_deviation)
    );
    ctx.write(
        &format!(
            "emulate_L{}_M{}.json",
            roots.chain_len(),
            roots.magnon_count()
        ),
        &json,
    )?;

    if let Some(n_shots) = shots {
        let counts = emulator::sample_shots(&roots, n_shots, ctx.seed, 0)?;
        let mut csv = String::from("outcome,bitstring,count\n");
        for (rank, &count) in counts.accepted.iter().enumerate() {
            if count > 0 {
                writeln!(csv, "accept,{},{count}", counts.bitstring(rank))?;
            }
        }
        writeln!(csv, "reject,,{}", counts.rejected)?;
        ctx.write(
            &format!("shots_L{}_M{}.csv", roots.chain_len(), roots.magnon_count()),
            &csv,
        )?;
    }

    cross_check(
        (emulation.accept_probability - report.success_probability).abs() <= 1e-9,
        format!(
            "emulator acceptance {} vs formula {}",
            emulation.accept_probability, report.success_probability
        ),
    )?;
    cross_check(
        block_deviation <= 1e-9,
        format!("projected block deviates by {block_deviation:e}"),
    )?;
    cross_check(
        emulation.overlap_with_target >= 1.0 - 1e-9,
        format!("target overlap {}", emulation.overlap_with_target),
    )?;
    ctx.finish()
}

fn cmd_oracle(cli: &Cli, chain_len: usize, magnons: usize) -> anyhow::Result<()> {
    let mut ctx = Ctx::new(cli, "oracle", json!({"L": chain_len, "M": magnons}))?;
    let hamiltonian = oracle::build_hamiltonian(chain_len, magnons)?;
    let (energy, eigenvector) = oracle::ground_eigenpair(&hamiltonian)?;
    println!(
        "sector (L={chain_len}, M={magnons}): dimension {}, lowest eigenvalue {:.12}",
        hamiltonian.dimension(),
        energy
    );
    if magnons == chain_len / 2 && chain_len.is_multiple_of(2) {
        let bethe_energy = solver::ground_state(chain_len)?.energy();
        cross_check(
            (energy - bethe_energy).abs() <= 1e-9,
            format!("dense minimum {energy} vs Bethe ground energy {bethe_energy}"),
        )?;
    }
    let json = format!(
        "{{\"L\":{chain_len},\"M\":{magnons},\"dimension\":{},\"groundEnergy\":{}}}",
        hamiltonian.dimension(),
        json_float(energy)
    );
    ctx.write(&format!("oracle_L{chain_len}_M{magnons}.json"), &json)?;
    ctx.write(
        &format!("oracle_state_L{chain_len}_M{magnons}.json"),
        &eigenvector.to_json_string(),
    )?;
    ctx.finish()
}

fn conjecture_csv_row(record: &gaudin::ConjectureRecord) -> String {
    let numbers = record
        .counting_numbers
        .iter()
        .map(|n| n.to_string())
        .collect::<Vec<_>>()
        .join(";");
    format!(
        "{},{},{},{},{},{},{},{},{},{}\n",
        record.chain_len,
        record.magnons,
        numbers,
        csv_float(record.success_probability),
        csv_float(record.delta),
        record.probability_bound_holds,
        record.factorial_bound_holds,
        record.reduced_bound_holds,
        record.determinant_positive,
        csv_float(record.residual)
    )
}

const CONJECTURE_HEADER: &str =
    "L,M,I_set,alpha2,delta,c0_holds,c1_holds,c2_holds,detG_positive,residual\n";

fn cmd_conjectures(
    cli: &Cli,
    max_chain_len: Option<usize>,
    exceptional: Option<&Vec<usize>>,
) -> anyhow::Result<()> {
    anyhow::ensure!(
        max_chain_len.is_some() || exceptional.is_some(),
        "pass --max-chain-len for a scan and/or --exceptional L M for a probe"
    );
    let mut ctx = Ctx::new(
        cli,
        "conjectures",
        json!({"maxChainLen": max_chain_len, "exceptional": exceptional}),
    )?;

    if let Some(max_chain_len) = max_chain_len {
        let records = gaudin::conjecture_scan(max_chain_len)?;
        let mut csv = String::from(CONJECTURE_HEADER);
        let mut violations = 0usize;
        let mut exceptions = 0usize;
        for record in &records {
            if !record.probability_bound_holds || !record.determinant_positive {
                violations += 1;
            }
            if !record.factorial_bound_holds {
                exceptions += 1;
            }
            csv.push_str(&conjecture_csv_row(record));
        }
        println!(
            "scanned {} states up to L={max_chain_len}: {} above 1/M!, {} bound violations",
            records.len(),
            exceptions,
            violations
        );
        ctx.write("conjectures.csv", &csv)?;
        cross_check(
            violations == 0,
            format!("{violations} states violate det G bounds"),
        )?;
    }

    if let Some(pair) = exceptional {
        anyhow::ensure!(pair.len() == 2, "--exceptional takes L and M");
        let (chain_len, magnons) = (pair[0], pair[1]);
        let record = gaudin::exceptional_state_probe(chain_len, magnons)?;
        println!(
            "equally-spaced state (L={chain_len}, M={magnons}): |alpha|^2·M! − 1 = {:.6e} (residual {:.3e})",
            record.delta, record.residual
        );
        let mut csv = String::from(CONJECTURE_HEADER);
        csv.push_str(&conjecture_csv_row(&record));
        ctx.write(
            &format!("conjectures_exceptional_L{chain_len}_M{magnons}.csv"),
            &csv,
        )?;
    }
    ctx.finish()
}

fn cmd_dump_state(cli: &Cli, selection: &RootSelection, kind: StateKind) -> anyhow::Result<()> {
    let mut params = selection.describe();
    params["kind"] = json!(format!("{kind:?}").to_lowercase());
    let mut ctx = Ctx::new(cli, "dump-state", params)?;
    let (state, label) = match kind {
        StateKind::Dicke => {
            let magnons = selection
                .magnons
                .context("--M is required for the Dicke state")?;
            (
                state::build_dicke_state(selection.chain_len, magnons)?,
                "dicke",
            )
        }
        StateKind::Bethe => (state::build_bethe_state(&selection.resolve()?)?, "bethe"),
        StateKind::Rescaled => (
            state::build_rescaled_state(&selection.resolve()?)?,
            "rescaled",
        ),
        StateKind::Normalized => (
            state::normalize(&state::build_bethe_state(&selection.resolve()?)?)?,
            "normalized",
        ),
    };
    println!(
        "{label} state on {} sites with {} magnons: {} amplitudes, norm² = {:.12e}",
        state.chain_len(),
        state.magnon_count(),
        state.entry_count(),
        state.norm_squared()
    );
    ctx.write(
        &format!(
            "state_{label}_L{}_M{}.json",
            state.chain_len(),
            state.magnon_count()
        ),
        &state.to_json_string(),
    )?;
    ctx.finish()
}

fn dispatch(cli: &Cli) -> anyhow::Result<()> {
    match &cli.command {
        Command::Solve { selection, output } => cmd_solve(cli, selection, output.as_ref()),
        Command::Enumerate {
            chain_len,
            magnons,
            max_sets,
        } => cmd_enumerate(cli, *chain_len, *magnons, *max_sets),
        Command::Success { selection } => cmd_success(cli, selection),
        Command::Table1 => cmd_table1(cli),
        Command::Table2 {
            exact,
            shots,
            chain_lens,
            epsilon,
            trials,
        } => cmd_table2(cli, *exact, *shots, chain_lens, *epsilon, *trials),
        Command::Fig2 {
            magnons,
            max_chain_len,
        } => cmd_fig2(cli, magnons, *max_chain_len),
        Command::Fig3 {
            min_chain_len,
            max_chain_len,
        } => cmd_fig3(cli, *min_chain_len, *max_chain_len),
        Command::Measure {
            chain_len,
            epsilon,
            trials,
            separations,
            pin_shots,
            config,
        } => cmd_measure(
            cli,
            *chain_len,
            *epsilon,
            *trials,
            separations.clone(),
            *pin_shots,
            config.as_ref(),
        ),
        Command::Emulate { selection, shots } => cmd_emulate(cli, selection, *shots),
        Command::Oracle { chain_len, magnons } => cmd_oracle(cli, *chain_len, *magnons),
        Command::Conjectures {
            max_chain_len,
            exceptional,
        } => cmd_conjectures(cli, *max_chain_len, exceptional.as_ref()),
        Command::DumpState { selection, kind } => cmd_dump_state(cli, selection, *kind),
    }
}

fn main() -> ExitCode {
    // die quietly when stdout is a closed pipe (e.g. `bethelab ... | head`)
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("error: could not configure {threads} threads: {e}");
            return ExitCode::from(2);
        }
    }
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(error) => {
            eprintln!("error: {error:#}");
            if error.downcast_ref::<CrossCheckFailure>().is_some() {
                ExitCode::from(3)
            } else {
                ExitCode::from(2)
            }
        }
    }
}
