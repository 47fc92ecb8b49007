//! Acceptance suite: one test per release criterion, each printing a
//! pass line with the measured numbers (visible with --nocapture).

use std::f64::consts::PI;
use std::time::Instant;

use bethelab::correlator::{plan_shots, ExperimentPlan};
use bethelab::emulator::{projected_amplitude_check, run_algorithm};
use bethelab::gaudin::{
    amplification_iterations, check_conjectures, conjecture_scan, exceptional_state_probe,
    ground_state_probability_scan, large_l_scan, success_probability,
};
use bethelab::linalg::linear_fit;
use bethelab::oracle::{build_hamiltonian, exact_correlator, ground_eigenpair};
use bethelab::solver::{
    benchmark_states, enumerate_real_solutions, ground_state, solve_by_counting_numbers,
    BetheRootSet, HalfInt,
};
use bethelab::state::{build_bethe_state, build_rescaled_state, normalize};

/// Benchmark success probabilities for the four reference states.
const BENCHMARK_PROBABILITIES: [f64; 4] = [0.5, 0.463068, 0.157232, 0.0361418];

/// Exact ground-state correlators ⟨σᶻ_0 σᶻ_l⟩ for L = 4, 6, 8.
const EXACT_CORRELATORS: [(usize, usize, f64); 9] = [
    (4, 1, -0.666667),
    (4, 2, 0.333333),
    (6, 1, -0.622839),
    (6, 2, 0.27735),
    (6, 3, -0.309022),
    (8, 1, -0.608516),
    (8, 2, 0.261037),
    (8, 3, -0.251937),
    (8, 4, 0.198831),
];

fn all_real_states_up_to(max_chain_len: usize) -> Vec<BetheRootSet> {
    let mut states = vec![];
    for chain_len in (2..=max_chain_len).step_by(2) {
        for magnons in 1..=chain_len / 2 {
            let enumeration = enumerate_real_solutions(chain_len, magnons, None).unwrap();
            states.extend(enumeration.solutions);
        }
    }
    states
}

#[test]
fn criterion_01_benchmark_table_reproduction() {
    let start = Instant::now();
    let states = benchmark_states().unwrap();

    let mut max_probability_error: f64 = 0.0;
    for (roots, expected) in states.iter().zip(BENCHMARK_PROBABILITIES) {
        let report = success_probability(roots).unwrap();
        max_probability_error =
            max_probability_error.max((report.success_probability - expected).abs());
    }
    assert!(
        max_probability_error < 1e-5,
        "success probabilities off by {max_probability_error:e}"
    );

    let printed: [&[f64]; 4] = [
        &[2.0 * PI / 3.0, 4.0 * PI / 3.0],
        &[1.41951, 2.76928],
        &[1.72277, PI, 2.0 * PI - 1.72277],
        &[1.522, 2.63483, 2.0 * PI - 2.63483, 2.0 * PI - 1.522],
    ];
    let mut max_root_error: f64 = 0.0;
    for (roots, expected) in states.iter().zip(printed) {
        for (k, e) in roots.momenta().iter().zip(expected) {
            max_root_error = max_root_error.max((k - e).abs());
        }
    }
    assert!(max_root_error < 1e-4, "roots off by {max_root_error:e}");

    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}");
    println!(
        "criterion 01 benchmark table: pass (max |α²| error {max_probability_error:.2e}, max root error {max_root_error:.2e}, {} ms)",
        elapsed.as_millis()
    );
}

#[test]
fn criterion_02_exact_correlators_two_routes() {
    let start = Instant::now();
    let mut max_value_error: f64 = 0.0;
    let mut max_route_gap: f64 = 0.0;
    for chain_len in [4usize, 6, 8] {
        let roots = ground_state(chain_len).unwrap();
        let bethe = normalize(&build_bethe_state(&roots).unwrap()).unwrap();
        let hamiltonian = build_hamiltonian(chain_len, chain_len / 2).unwrap();
        let (_, eigenvector) = ground_eigenpair(&hamiltonian).unwrap();
        for &(l_expected, separation, expected) in &EXACT_CORRELATORS {
            if l_expected != chain_len {
                continue;
            }
            let from_bethe = exact_correlator(&bethe, separation).unwrap();
            let from_eigenvector = exact_correlator(&eigenvector, separation).unwrap();
            max_route_gap = max_route_gap.max((from_bethe - from_eigenvector).abs());
            max_value_error = max_value_error.max((from_bethe - expected).abs());
        }
    }
    assert!(
        max_route_gap <= 1e-10,
        "independent routes disagree by {max_route_gap:e}"
    );
    assert!(
        max_value_error <= 1e-5,
        "exact correlators off by {max_value_error:e}"
    );
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 5.0, "took {elapsed:?}");
    println!(
        "criterion 02 exact correlators: pass (9 values, max error {max_value_error:.2e}, route gap {max_route_gap:.2e}, {} ms)",
        elapsed.as_millis()
    );
}

#[test]
fn criterion_03_shot_experiments() {
    let start = Instant::now();
    let epsilon = 0.01;
    let trials = 100;
    let mut worst_mean_gap: f64 = 0.0;
    let mut worst_std: f64 = 0.0;
    for chain_len in [4usize, 6, 8] {
        let roots = ground_state(chain_len).unwrap();
        let hamiltonian = build_hamiltonian(chain_len, chain_len / 2).unwrap();
        let (_, eigenvector) = ground_eigenpair(&hamiltonian).unwrap();
        let plan = ExperimentPlan::new(roots, epsilon, trials, 7 + chain_len as u64).unwrap();
        let experiment = bethelab::correlator::run_experiment(plan).unwrap();
        for summary in &experiment.summaries {
            let exact = exact_correlator(&eigenvector, summary.separation).unwrap();
            let gap = (summary.mean - exact).abs();
            assert!(
                gap <= 3.0 * epsilon,
                "L={chain_len} l={}: mean {} vs exact {exact}",
                summary.separation,
                summary.mean
            );
            assert!(
                summary.sample_std <= 0.012,
                "L={chain_len} l={}: std {}",
                summary.separation,
                summary.sample_std
            );
            assert_eq!(summary.trials_used, trials);
            worst_mean_gap = worst_mean_gap.max(gap);
            worst_std = worst_std.max(summary.sample_std);
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 600.0, "took {elapsed:?}");
    println!(
        "criterion 03 shot experiments: pass (worst |mean−exact| {worst_mean_gap:.4}, worst std {worst_std:.4}, {} ms)",
        elapsed.as_millis()
    );
}

#[test]
fn criterion_04_emulator_identity() {
    let mut worst_probability_gap: f64 = 0.0;
    let mut worst_projection: f64 = 0.0;
    let mut worst_overlap: f64 = 1.0;
    for roots in benchmark_states().unwrap() {
        let report = success_probability(&roots).unwrap();
        let emulation = run_algorithm(&roots).unwrap();
        let gap = (emulation.accept_probability - report.success_probability).abs();
        assert!(
            gap <= 1e-9,
            "L={} M={}: emulator {} vs formula {}",
            roots.chain_len(),
            roots.magnon_count(),
            emulation.accept_probability,
            report.success_probability
        );
        let projection = projected_amplitude_check(&roots).unwrap();
        assert!(projection <= 1e-9, "projected block off by {projection:e}");
        assert!(
            emulation.overlap_with_target >= 1.0 - 1e-9,
            "overlap {}",
            emulation.overlap_with_target
        );
        worst_probability_gap = worst_probability_gap.max(gap);
        worst_projection = worst_projection.max(projection);
        worst_overlap = worst_overlap.min(emulation.overlap_with_target);
    }
    println!(
        "criterion 04 emulator identity: pass (max |emulator−formula| {worst_probability_gap:.2e}, max block deviation {worst_projection:.2e}, min overlap 1−{:.2e})",
        1.0 - worst_overlap
    );
}

#[test]
fn criterion_05_norm_identity_up_to_ten_sites() {
    let states = all_real_states_up_to(10);
    assert!(!states.is_empty());
    let mut worst: f64 = 0.0;
    let mut worst_probability: f64 = 0.0;
    for roots in &states {
        let report = success_probability(roots).unwrap();
        let phi = build_rescaled_state(roots).unwrap();
        let product: f64 = report.bracket_products.iter().product();
        let expected = product * report.determinant;
        let relative = (phi.norm_squared() - expected).abs() / expected.abs();
        assert!(
            relative <= 1e-10,
            "L={} M={} k={:?}: ⟨φ|φ⟩={} vs Π·detG={}",
            roots.chain_len(),
            roots.magnon_count(),
            roots.momenta(),
            phi.norm_squared(),
            expected
        );
        worst = worst.max(relative);

        // the same identity at the probability level:
        // |α|² = ⟨ψ|ψ⟩ / (C(L,M)·(M!)²), brute force against the formula
        let psi = build_bethe_state(roots).unwrap();
        let dim = bethelab::combinatorics::binomial(roots.chain_len(), roots.magnon_count()) as f64;
        let m_factorial: u128 = (1..=roots.magnon_count() as u128).product();
        let brute = psi.norm_squared() / (dim * (m_factorial * m_factorial) as f64);
        let relative = (report.success_probability - brute).abs() / brute;
        assert!(
            relative <= 1e-10,
            "L={} M={}: |α|² {} vs brute force {brute}",
            roots.chain_len(),
            roots.magnon_count(),
            report.success_probability
        );
        worst_probability = worst_probability.max(relative);
    }
    println!(
        "criterion 05 norm identity: pass ({} states, worst ⟨φ|φ⟩ deviation {worst:.2e}, worst |α|² deviation {worst_probability:.2e})",
        states.len()
    );
}

#[test]
fn criterion_06_eigenstate_oracle() {
    let states = all_real_states_up_to(10);
    let mut worst_residual: f64 = 0.0;
    for roots in &states {
        let hamiltonian = build_hamiltonian(roots.chain_len(), roots.magnon_count()).unwrap();
        let psi = build_bethe_state(roots).unwrap();
        let residual = hamiltonian
            .eigenstate_residual(&psi, roots.energy())
            .unwrap();
        assert!(
            residual <= 1e-9,
            "L={} M={} k={:?}: residual {residual:e}",
            roots.chain_len(),
            roots.magnon_count(),
            roots.momenta()
        );
        worst_residual = worst_residual.max(residual);
    }

    let mut worst_energy_gap: f64 = 0.0;
    for chain_len in (2..=12).step_by(2) {
        let roots = ground_state(chain_len).unwrap();
        let hamiltonian = build_hamiltonian(chain_len, chain_len / 2).unwrap();
        let (ed_energy, _) = ground_eigenpair(&hamiltonian).unwrap();
        let gap = (roots.energy() - ed_energy).abs();
        assert!(
            gap <= 1e-9,
            "L={chain_len}: Bethe {} vs dense {}",
            roots.energy(),
            ed_energy
        );
        worst_energy_gap = worst_energy_gap.max(gap);
    }
    println!(
        "criterion 06 eigenstate oracle: pass ({} eigenstates, worst residual {worst_residual:.2e}; ground energies to L=12, worst gap {worst_energy_gap:.2e})",
        states.len()
    );
}

#[test]
fn criterion_07_single_magnon_exactness() {
    let mut checked = 0usize;
    let mut worst: f64 = 0.0;
    for chain_len in (2..=64usize).step_by(2) {
        for mode in 1..chain_len {
            let counting = HalfInt::from_integer(chain_len as i64 / 2 - mode as i64);
            let roots = solve_by_counting_numbers(chain_len, &[counting]).unwrap();
            let report = success_probability(&roots).unwrap();
            let deviation = (report.success_probability - 1.0).abs();
            assert!(
                deviation <= 1e-12,
                "L={chain_len}, k=2π·{mode}/{chain_len}: |α|² = {}",
                report.success_probability
            );
            worst = worst.max(deviation);
            checked += 1;
        }
    }
    println!(
        "criterion 07 single-magnon exactness: pass ({checked} states across L ≤ 64, worst |α²−1| = {worst:.2e})"
    );
}

#[test]
fn criterion_08_large_l_limit() {
    // strict approach to 1/M!, except where the ratio already sits at the
    // limit to float precision (the lowest-energy M=2 family saturates
    // |α|²·2! = 1 identically)
    for magnons in [2usize, 3, 4] {
        let scan = large_l_scan(magnons, &[12, 96]);
        assert!(scan.failures.is_empty(), "M={magnons}: {:?}", scan.failures);
        let near = (1.0 - scan.points[0].ratio_to_factorial_bound).abs();
        let far = (1.0 - scan.points[1].ratio_to_factorial_bound).abs();
        assert!(
            far < near || far <= 1e-12,
            "M={magnons}: |1−ratio| = {far:e} at L=96 vs {near:e} at L=12"
        );
        println!(
            "criterion 08 large-L limit: M={magnons}: |1−|α|²·M!| {near:.3e} (L=12) → {far:.3e} (L=96)"
        );
    }
    println!("criterion 08 large-L limit: pass");
}

#[test]
fn criterion_09_ground_state_decay_and_budget() {
    let start = Instant::now();
    let chain_lens: Vec<usize> = (8..=40).step_by(2).collect();
    let scan = ground_state_probability_scan(&chain_lens).unwrap();

    let last = scan.points.last().unwrap();
    assert_eq!(last.chain_len, 40);
    assert!(
        (1e-20..=2e-19).contains(&last.success_probability),
        "|α|²(40) = {:e}",
        last.success_probability
    );

    let xs: Vec<f64> = scan.points.iter().map(|p| p.chain_len as f64).collect();
    let ys: Vec<f64> = scan
        .points
        .iter()
        .map(|p| p.ln_success_probability)
        .collect();
    let fit = linear_fit(&xs, &ys);
    assert!(fit.r_squared >= 0.99, "R² = {}", fit.r_squared);

    let plan = plan_shots(last.success_probability, 0.01).unwrap();
    assert!(
        (100_000_000_000_000_000_000_000u128..1_000_000_000_000_000_000_000_000u128)
            .contains(&plan.n_max),
        "N_max = {}",
        plan.n_max
    );

    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 60.0, "took {elapsed:?}");
    println!(
        "criterion 09 ground-state decay: pass (|α|²(40) = {:.3e}, R² = {:.5}, N_max = {:.3e}, {} ms)",
        last.success_probability,
        fit.r_squared,
        plan.n_max as f64,
        elapsed.as_millis()
    );
}

#[test]
fn criterion_10_determinant_bounds() {
    let start = Instant::now();

    let records = conjecture_scan(14).unwrap();
    assert!(!records.is_empty());
    let mut violations = 0usize;
    for record in &records {
        if !record.probability_bound_holds || !record.determinant_positive {
            violations += 1;
        }
    }
    assert_eq!(violations, 0, "determinant-bound violations in the scan");

    let first_exception = exceptional_state_probe(22, 3).unwrap();
    assert!(
        first_exception.delta > 1e-6 && first_exception.delta < 1e-4,
        "δ(22, 3) = {:e}",
        first_exception.delta
    );

    let large_exception = exceptional_state_probe(500, 75).unwrap();
    assert!(
        large_exception.delta > 1e-3 && large_exception.delta < 1e-1,
        "δ(500, 75) = {:e}",
        large_exception.delta
    );

    let fixed_m_far = exceptional_state_probe(200, 3).unwrap();
    assert!(
        fixed_m_far.delta < first_exception.delta,
        "δ(200, 3) = {:e} not below δ(22, 3) = {:e}",
        fixed_m_far.delta,
        first_exception.delta
    );

    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 600.0, "took {elapsed:?}");
    println!(
        "criterion 10 determinant bounds: pass ({} states to L=14 clean; δ(22,3) = {:.2e}, δ(500,75) = {:.2e}, δ(200,3) = {:.2e}, {} ms)",
        records.len(),
        first_exception.delta,
        large_exception.delta,
        fixed_m_far.delta,
        elapsed.as_millis()
    );
}

#[test]
fn criterion_11_amplification_calculator() {
    let moderate = amplification_iterations(5e-20).unwrap();
    assert!(
        (1_000_000_000u128..10_000_000_000u128).contains(&moderate.iterations),
        "m = {}",
        moderate.iterations
    );

    let small = amplification_iterations(1e-12).unwrap();
    let gain = small.one_iteration_probability / 1e-12;
    assert!((gain - 9.0).abs() / 9.0 <= 0.01, "gain {gain}");

    println!(
        "criterion 11 amplification: pass (m(5e−20) = {:.3e}, one-iteration gain at 1e−12 = {gain:.6})",
        moderate.iterations as f64
    );
}

#[test]
fn vacuum_sector_degrades_gracefully() {
    // companion check: the M = 0 reference state flows through the
    // analytics with probability 1
    let vacuum = BetheRootSet::vacuum(8).unwrap();
    let report = success_probability(&vacuum).unwrap();
    assert_eq!(report.success_probability, 1.0);
    let record = check_conjectures(&vacuum).unwrap();
    assert!(record.probability_bound_holds);
}
