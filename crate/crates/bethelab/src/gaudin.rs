//! Gaudin matrix, determinant, and exact success probabilities.
//!
//! For an on-shell state with real momenta the squared norm of the
//! rescaled state |φ⟩ factorizes through the M×M Gaudin matrix
//!
//!   G_{m,n} = δ_{m,n}[L − Σ_l 4(1−cos k_l)/((n,l)(l,n))]
//!             + 4(1−cos k_m)/((n,m)(m,n)),
//!
//! with the bracket notation (j,l) = 2 − e^{−i k_j} − e^{i k_l}; the l=n
//! self-term cancels the added diagonal term, so only l≠n couplings enter.
//! The preparation circuit succeeds with probability
//!
//!   |α|² = (L−M)!/(L! M!) · det G,
//!
//! which tends to 1/M! for fixed M as L grows. Factorial ratios and
//! determinants are combined in log space: det G grows like L^M, past
//! f64 range for long chains, while |α|² stays well-scaled throughout.
//!
//! Also here: scans over lowest-energy and ground states, the amplitude-
//! amplification iteration count, and checks of the conjectured
//! determinant bounds with their exceptional equally-spaced states.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::combinatorics::ln_factorial;
use crate::error::{Error, Result};
use crate::linalg::{self, LogDet};
use crate::solver::{
    self, centered_counting_numbers, enumerate_real_solutions, lowest_energy_solution,
    BetheRootSet, HalfInt,
};

pub use crate::linalg::{determinant, log_determinant};

/// Margin for the conjectured strict inequalities, applied in log space
/// (equivalent to a 1e−12 relative margin on the bound itself).
const BOUND_MARGIN: f64 = 1e-12;

/// The bracket (j, l) = 2 − e^{−i k_j} − e^{i k_l}.
///
/// For real momenta, (j,l)* = (l,j).
pub fn bracket(roots: &BetheRootSet, j: usize, l: usize) -> Complex64 {
    let kj = roots.momenta()[j];
    let kl = roots.momenta()[l];
    Complex64::new(2.0, 0.0) - Complex64::from_polar(1.0, -kj) - Complex64::from_polar(1.0, kl)
}

/// Real bracket products (j,l)(l,j) = |(j,l)|² for j < l.
fn bracket_products(roots: &BetheRootSet) -> Result<Vec<f64>> {
    let magnons = roots.magnon_count();
    let mut products = Vec::with_capacity(magnons * magnons.saturating_sub(1) / 2);
    for j in 0..magnons {
        for l in j + 1..magnons {
            let product = (bracket(roots, j, l) * bracket(roots, l, j)).re;
            if product <= 0.0 {
                return Err(Error::SingularBracket(j, l));
            }
            products.push(product);
        }
    }
    Ok(products)
}

/// The M×M Gaudin matrix; 0×0 for the vacuum.
pub fn gaudin_matrix(roots: &BetheRootSet) -> Result<DMatrix<f64>> {
    let magnons = roots.magnon_count();
    let momenta = roots.momenta();
    // pairwise couplings 4(1−cos k_m)/((n,m)(m,n))
    let mut coupling = DMatrix::zeros(magnons, magnons);
    for m in 0..magnons {
        for n in 0..magnons {
            if m == n {
                continue;
            }
            let product = (bracket(roots, n, m) * bracket(roots, m, n)).re;
            if product.abs() <= 1e-14 {
                return Err(Error::SingularBracket(m.min(n), m.max(n)));
            }
            coupling[(m, n)] = 4.0 * (1.0 - momenta[m].cos()) / product;
        }
    }
    let mut matrix = DMatrix::zeros(magnons, magnons);
    for n in 0..magnons {
        let mut diagonal = roots.chain_len() as f64;
        for l in 0..magnons {
            if l != n {
                diagonal -= coupling[(l, n)];
            }
        }
        matrix[(n, n)] = diagonal;
        for m in 0..magnons {
            if m != n {
                matrix[(m, n)] = coupling[(m, n)];
            }
        }
    }
    Ok(matrix)
}

/// Gaudin matrix, determinant, and success probability of one state.
#[derive(Debug, Clone)]
pub struct GaudinReport {
    pub chain_len: usize,
    pub magnons: usize,
    pub matrix: DMatrix<f64>,
    /// det G as a plain float; ±inf once it overflows.
    pub determinant: f64,
    /// Overflow-safe determinant: sign and ln|det G|.
    pub log_determinant: LogDet,
    /// |α|² = (L−M)!/(L!M!) · det G.
    pub success_probability: f64,
    /// ln |α|².
    pub ln_success_probability: f64,
    /// |α|²·M!, the quantity that tends to 1 for large L.
    pub ratio_to_factorial_bound: f64,
    /// δ = |α|²·M! − 1, computed without cancellation.
    pub delta: f64,
    /// (j,l)(l,j) for j < l.
    pub bracket_products: Vec<f64>,
    /// Solver residual of the underlying roots; δ claims are only as good
    /// as this.
    pub residual: f64,
}

/// Full success-probability report for an on-shell state.
pub fn success_probability(roots: &BetheRootSet) -> Result<GaudinReport> {
    let chain_len = roots.chain_len();
    let magnons = roots.magnon_count();
    let matrix = gaudin_matrix(roots)?;
    let products = bracket_products(roots)?;
    let log_det = linalg::log_determinant(&matrix);
    if log_det.sign <= 0.0 {
        return Err(Error::ProbabilityOutOfRange(
            log_det.sign * log_det.ln_abs.exp(),
            roots.residual(),
        ));
    }
    let ln_success = log_det.ln_abs + ln_factorial(chain_len - magnons)
        - ln_factorial(chain_len)
        - ln_factorial(magnons);
    let success = ln_success.exp();
    if !(0.0..=1.0 + 1e-12).contains(&success) {
        return Err(Error::ProbabilityOutOfRange(success, roots.residual()));
    }
    let ln_ratio = log_det.ln_abs + ln_factorial(chain_len - magnons) - ln_factorial(chain_len);
    Ok(GaudinReport {
        chain_len,
        magnons,
        determinant: log_det.value(),
        log_determinant: log_det,
        success_probability: success,
        ln_success_probability: ln_success,
        ratio_to_factorial_bound: ln_ratio.exp(),
        delta: ln_ratio.exp_m1(),
        bracket_products: products,
        residual: roots.residual(),
        matrix,
    })
}

/// One row of the fixed-M success-probability scan.
#[derive(Debug, Clone)]
pub struct ScanPoint {
    pub chain_len: usize,
    pub magnons: usize,
    pub success_probability: f64,
    pub ratio_to_factorial_bound: f64,
    /// ‖G/L − 1‖_max, a diagnostic for how close G is to L times the
    /// identity. Reported only; never assumed.
    pub identity_deviation: f64,
}

/// Scan of lowest-energy states at fixed M over a list of chain lengths.
#[derive(Debug)]
pub struct LargeLScan {
    pub points: Vec<ScanPoint>,
    /// (chain length, reason) for every L that produced no state.
    pub failures: Vec<(usize, String)>,
}

/// Success probabilities of lowest-energy M-magnon states as a function
/// of chain length.
pub fn large_l_scan(magnons: usize, chain_lens: &[usize]) -> LargeLScan {
    let mut outcomes: Vec<(usize, std::result::Result<ScanPoint, String>)> = chain_lens
        .par_iter()
        .map(|&chain_len| {
            let outcome = lowest_energy_solution(chain_len, magnons)
                .and_then(|roots| {
                    let report = success_probability(&roots)?;
                    let l_f = chain_len as f64;
                    let mut deviation: f64 = 0.0;
                    for m in 0..magnons {
                        for n in 0..magnons {
                            let expected = if m == n { 1.0 } else { 0.0 };
                            deviation =
                                deviation.max((report.matrix[(m, n)] / l_f - expected).abs());
                        }
                    }
                    Ok(ScanPoint {
                        chain_len,
                        magnons,
                        success_probability: report.success_probability,
                        ratio_to_factorial_bound: report.ratio_to_factorial_bound,
                        identity_deviation: deviation,
                    })
                })
                .map_err(|e| e.to_string());
            (chain_len, outcome)
        })
        .collect();
    outcomes.sort_by_key(|(chain_len, _)| *chain_len);

    let mut scan = LargeLScan {
        points: vec![],
        failures: vec![],
    };
    for (chain_len, outcome) in outcomes {
        match outcome {
            Ok(point) => scan.points.push(point),
            Err(reason) => scan.failures.push((chain_len, reason)),
        }
    }
    scan
}

/// One row of the ground-state probability scan.
#[derive(Debug, Clone)]
pub struct GroundScanPoint {
    pub chain_len: usize,
    pub success_probability: f64,
    pub ln_success_probability: f64,
}

/// Ground-state scan with the linear fit of ln|α|² against L.
#[derive(Debug)]
pub struct GroundScan {
    pub points: Vec<GroundScanPoint>,
    pub fit: linalg::LineFit,
}

/// ln|α|² of the antiferromagnetic ground state (M = L/2) over a list of
/// chain lengths.
pub fn ground_state_probability_scan(chain_lens: &[usize]) -> Result<GroundScan> {
    let mut points: Vec<GroundScanPoint> = chain_lens
        .par_iter()
        .map(|&chain_len| {
            let roots = solver::ground_state(chain_len)?;
            let report = success_probability(&roots)?;
            Ok(GroundScanPoint {
                chain_len,
                success_probability: report.success_probability,
                ln_success_probability: report.ln_success_probability,
            })
        })
        .collect::<Result<_>>()?;
    points.sort_by_key(|p| p.chain_len);
    let xs: Vec<f64> = points.iter().map(|p| p.chain_len as f64).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.ln_success_probability).collect();
    let fit = linalg::linear_fit(&xs, &ys);
    Ok(GroundScan { points, fit })
}

/// Amplitude-amplification cost for a given success probability.
#[derive(Debug, Clone, Copy)]
pub struct Amplification {
    /// m = ⌊π/(4θ_a)⌋ iterations to reach success probability near 1,
    /// with sin²θ_a = |α|².
    pub iterations: u128,
    /// sin²(3θ_a): the success probability after a single iteration.
    pub one_iteration_probability: f64,
}

/// Iteration count and one-iteration gain of amplitude amplification.
pub fn amplification_iterations(success_probability: f64) -> Result<Amplification> {
    if success_probability <= 0.0 {
        return Err(Error::ZeroSuccessProbability);
    }
    if success_probability > 1.0 {
        return Err(Error::InvalidInput(format!(
            "success probability {success_probability} exceeds 1"
        )));
    }
    let theta = success_probability.sqrt().asin();
    let iterations_f = (std::f64::consts::PI / (4.0 * theta)).floor();
    if iterations_f >= u128::MAX as f64 {
        return Err(Error::InvalidInput(format!(
            "iteration count {iterations_f:e} does not fit in 128 bits"
        )));
    }
    Ok(Amplification {
        iterations: iterations_f as u128,
        one_iteration_probability: (3.0 * theta).sin().powi(2),
    })
}

/// Outcome of the determinant-bound checks for one state.
#[derive(Debug, Clone)]
pub struct ConjectureRecord {
    pub chain_len: usize,
    pub magnons: usize,
    pub counting_numbers: Vec<HalfInt>,
    pub success_probability: f64,
    /// δ = |α|²·M! − 1; positive only for the exceptional states.
    pub delta: f64,
    /// det G ≤ L!·M!/(L−M)! (equivalently |α|² ≤ 1).
    pub probability_bound_holds: bool,
    /// |α|² ≤ 1/M!.
    pub factorial_bound_holds: bool,
    /// det G ≤ L!/(L−M)!.
    pub reduced_bound_holds: bool,
    pub determinant_positive: bool,
    pub ln_abs_determinant: f64,
    pub residual: f64,
}

/// Evaluate the conjectured determinant bounds on one state.
pub fn check_conjectures(roots: &BetheRootSet) -> Result<ConjectureRecord> {
    let chain_len = roots.chain_len();
    let magnons = roots.magnon_count();
    let report = success_probability(roots)?;
    let ln_det = report.log_determinant.ln_abs;
    let ln_probability_bound =
        ln_factorial(chain_len) + ln_factorial(magnons) - ln_factorial(chain_len - magnons);
    let ln_reduced_bound = ln_factorial(chain_len) - ln_factorial(chain_len - magnons);
    Ok(ConjectureRecord {
        chain_len,
        magnons,
        counting_numbers: roots.counting_numbers().to_vec(),
        success_probability: report.success_probability,
        delta: report.delta,
        probability_bound_holds: ln_det <= ln_probability_bound + BOUND_MARGIN,
        factorial_bound_holds: report.delta <= BOUND_MARGIN,
        reduced_bound_holds: ln_det <= ln_reduced_bound + BOUND_MARGIN,
        determinant_positive: report.log_determinant.sign > 0.0,
        ln_abs_determinant: ln_det,
        residual: report.residual,
    })
}

/// Solve the equally-spaced counting-number state
/// {−(M−1)/2, …, (M−1)/2} and check the bounds on it. These are the
/// candidates that violate the 1/M! bound by a small positive δ.
pub fn exceptional_state_probe(chain_len: usize, magnons: usize) -> Result<ConjectureRecord> {
    if magnons < 3 {
        return Err(Error::InvalidInput(format!(
            "exceptional states need M >= 3, got {magnons}"
        )));
    }
    let roots = solver::solve_by_counting_numbers(chain_len, &centered_counting_numbers(magnons))?;
    check_conjectures(&roots)
}

/// Bound checks for every enumerated real-root state with L up to
/// `max_chain_len`, ordered by (L, M, energy).
pub fn conjecture_scan(max_chain_len: usize) -> Result<Vec<ConjectureRecord>> {
    let mut records = vec![];
    for chain_len in (2..=max_chain_len).step_by(2) {
        for magnons in 1..=chain_len / 2 {
            let enumeration = enumerate_real_solutions(chain_len, magnons, None)?;
            for roots in &enumeration.solutions {
                records.push(check_conjectures(roots)?);
            }
        }
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::{benchmark_states, ground_state, solve_by_counting_numbers};
    use std::f64::consts::PI;

    #[test]
    fn diagonal_bracket_is_real() {
        let roots = ground_state(6).unwrap();
        for j in 0..3 {
            let b = bracket(&roots, j, j);
            assert!(b.im.abs() < 1e-14);
            assert!((b.re - (2.0 - 2.0 * roots.momenta()[j].cos())).abs() < 1e-14);
        }
    }

    #[test]
    fn benchmark_brackets() {
        let roots = ground_state(4).unwrap();
        let b01 = bracket(&roots, 0, 1);
        let b10 = bracket(&roots, 1, 0);
        assert!((b01 - Complex64::new(3.0, 3.0f64.sqrt())).norm() < 1e-12);
        assert!((b10 - Complex64::new(3.0, -3.0f64.sqrt())).norm() < 1e-12);
        assert!(((b01 * b10).re - 12.0).abs() < 1e-12);
    }

    #[test]
    fn brackets_are_conjugate_symmetric() {
        let enumeration = enumerate_real_solutions(8, 3, None).unwrap();
        for roots in &enumeration.solutions {
            for j in 0..3 {
                for l in 0..3 {
                    let deviation = (bracket(roots, j, l) - bracket(roots, l, j).conj()).norm();
                    assert!(deviation < 1e-14);
                }
            }
        }
    }

    #[test]
    fn gaudin_matrix_of_the_four_site_ground_state() {
        let roots = ground_state(4).unwrap();
        let g = gaudin_matrix(&roots).unwrap();
        assert!((g[(0, 0)] - 3.5).abs() < 1e-12);
        assert!((g[(1, 1)] - 3.5).abs() < 1e-12);
        assert!((g[(0, 1)] - 0.5).abs() < 1e-12);
        assert!((g[(1, 0)] - 0.5).abs() < 1e-12);
        assert!((determinant(&g) - 12.0).abs() < 1e-10);
    }

    #[test]
    fn single_magnon_gaudin_matrix_is_the_chain_length() {
        for chain_len in [4usize, 8, 12] {
            let roots = solve_by_counting_numbers(chain_len, &[HalfInt::from_integer(1)]).unwrap();
            let g = gaudin_matrix(&roots).unwrap();
            assert_eq!(g.nrows(), 1);
            assert_eq!(g[(0, 0)], chain_len as f64);
        }
    }

    #[test]
    fn vacuum_report_degrades_gracefully() {
        let vacuum = BetheRootSet::vacuum(8).unwrap();
        let report = success_probability(&vacuum).unwrap();
        assert_eq!(report.determinant, 1.0);
        assert_eq!(report.success_probability, 1.0);
        assert_eq!(report.delta, 0.0);
        assert!(report.bracket_products.is_empty());
    }

    #[test]
    fn benchmark_success_probabilities() {
        let states = benchmark_states().unwrap();
        let expected = [0.5, 0.463068, 0.157232, 0.0361418];
        for (roots, expected) in states.iter().zip(expected) {
            let report = success_probability(roots).unwrap();
            assert!(
                (report.success_probability - expected).abs() < 1e-6,
                "L={} M={}: got {}, expected {expected}",
                roots.chain_len(),
                roots.magnon_count(),
                report.success_probability
            );
        }
        // the first one is exactly 1/2
        let first = success_probability(&states[0]).unwrap();
        assert!((first.success_probability - 0.5).abs() < 1e-12);
    }

    #[test]
    fn single_magnon_probability_is_exactly_one() {
        for chain_len in (2..=20).step_by(2) {
            let roots = solve_by_counting_numbers(chain_len, &[HalfInt::from_integer(0)]).unwrap();
            let report = success_probability(&roots).unwrap();
            assert!(
                (report.success_probability - 1.0).abs() <= 1e-12,
                "L={chain_len}: {}",
                report.success_probability
            );
        }
    }

    #[test]
    fn log_space_factorials_match_exact_integers() {
        for chain_len in 1..=20usize {
            for magnons in 0..=chain_len {
                // C(L,M) and L!M!/(L−M)! in exact integers
                let binom = crate::combinatorics::binomial(chain_len, magnons) as f64;
                let ln_binom = ln_factorial(chain_len)
                    - ln_factorial(magnons)
                    - ln_factorial(chain_len - magnons);
                assert!(
                    (ln_binom.exp() - binom).abs() / binom < 1e-12,
                    "C({chain_len},{magnons})"
                );
                let mut exact: f64 = 1.0;
                for i in (chain_len - magnons + 1)..=chain_len {
                    exact *= i as f64;
                }
                for i in 2..=magnons {
                    exact *= i as f64;
                }
                let ln_bound = ln_factorial(chain_len) + ln_factorial(magnons)
                    - ln_factorial(chain_len - magnons);
                assert!(
                    (ln_bound.exp() - exact).abs() / exact < 1e-12,
                    "L!M!/(L−M)! at ({chain_len},{magnons})"
                );
            }
        }
    }

    #[test]
    fn determinant_and_probability_fields_are_consistent() {
        // det G = |α|² · L!·M!/(L−M)!, with the right side in exact integers
        for roots in benchmark_states().unwrap() {
            let report = success_probability(&roots).unwrap();
            let mut bound: u128 = 1;
            for i in (roots.chain_len() - roots.magnon_count() + 1)..=roots.chain_len() {
                bound *= i as u128;
            }
            for i in 2..=roots.magnon_count() {
                bound *= i as u128;
            }
            let expected = report.success_probability * bound as f64;
            let rel = (report.determinant - expected).abs() / expected;
            assert!(
                rel < 1e-10,
                "L={} M={}: det {} vs |α|²·bound {expected}",
                roots.chain_len(),
                roots.magnon_count(),
                report.determinant
            );
        }
    }

    #[test]
    fn success_probability_matches_brute_force_norm() {
        // |α|² = ⟨ψ|ψ⟩ / (C(L,M)·(M!)²)
        for roots in benchmark_states().unwrap() {
            let report = success_probability(&roots).unwrap();
            let psi = crate::state::build_bethe_state(&roots).unwrap();
            let dim = crate::combinatorics::binomial(roots.chain_len(), roots.magnon_count());
            let m_factorial: u128 = (1..=roots.magnon_count() as u128).product();
            let brute = psi.norm_squared() / (dim as f64 * (m_factorial * m_factorial) as f64);
            let rel = (report.success_probability - brute).abs() / brute;
            assert!(
                rel < 1e-10,
                "L={} M={}: formula {} vs brute force {brute}",
                roots.chain_len(),
                roots.magnon_count(),
                report.success_probability
            );
        }
    }

    #[test]
    fn norm_identity_for_benchmark_states() {
        // ⟨φ|φ⟩ = [Π (j,l)(l,j)] · det G
        for roots in benchmark_states().unwrap() {
            let report = success_probability(&roots).unwrap();
            let phi = crate::state::build_rescaled_state(&roots).unwrap();
            let product: f64 = report.bracket_products.iter().product();
            let expected = product * report.determinant;
            let rel = (phi.norm_squared() - expected).abs() / expected;
            assert!(
                rel < 1e-10,
                "L={} M={}: ⟨φ|φ⟩ = {} vs {expected}",
                roots.chain_len(),
                roots.magnon_count(),
                phi.norm_squared()
            );
        }
    }

    #[test]
    fn flat_single_magnon_scan() {
        let chain_lens: Vec<usize> = (4..=24).step_by(4).collect();
        let scan = large_l_scan(1, &chain_lens);
        assert!(scan.failures.is_empty());
        assert_eq!(scan.points.len(), chain_lens.len());
        for point in &scan.points {
            assert!((point.success_probability - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn two_magnon_lowest_energy_saturates_the_factorial_bound() {
        // counting numbers {−1/2, 1/2} give coupling exactly ½, hence
        // det G = L(L−1) and |α|²·2! = 1 at every chain length
        let scan = large_l_scan(2, &[12, 48]);
        assert!(scan.failures.is_empty());
        for point in &scan.points {
            assert!(
                (point.ratio_to_factorial_bound - 1.0).abs() <= 1e-12,
                "L={}: ratio {}",
                point.chain_len,
                point.ratio_to_factorial_bound
            );
        }
        // the identity diagnostic tightens with L even at saturation
        assert!(scan.points[1].identity_deviation < scan.points[0].identity_deviation);
    }

    #[test]
    fn three_magnon_ratio_approaches_one() {
        let scan = large_l_scan(3, &[12, 48]);
        assert!(scan.failures.is_empty());
        let near = (1.0 - scan.points[0].ratio_to_factorial_bound).abs();
        let far = (1.0 - scan.points[1].ratio_to_factorial_bound).abs();
        assert!(far < near, "ratio gap at L=48 ({far:e}) vs L=12 ({near:e})");
    }

    #[test]
    fn ground_scan_pins_the_known_points() {
        let scan = ground_state_probability_scan(&[4, 6, 8]).unwrap();
        assert!((scan.points[0].ln_success_probability - 0.5f64.ln()).abs() < 1e-10);
        assert!((scan.points[2].ln_success_probability - 0.0361418f64.ln()).abs() < 1e-5);
        assert!(scan.fit.slope < 0.0);
    }

    #[test]
    fn amplification_extremes() {
        let full = amplification_iterations(1.0).unwrap();
        assert_eq!(full.iterations, 0);

        let tiny = amplification_iterations(5e-20).unwrap();
        assert!(
            tiny.iterations >= 1_000_000_000 && tiny.iterations < 10_000_000_000,
            "m = {}",
            tiny.iterations
        );

        let gain = amplification_iterations(1e-12).unwrap();
        let ratio = gain.one_iteration_probability / 1e-12;
        assert!((ratio - 9.0).abs() < 0.09, "one-iteration gain {ratio}");

        assert!(matches!(
            amplification_iterations(0.0),
            Err(Error::ZeroSuccessProbability)
        ));
    }

    #[test]
    fn benchmark_state_saturates_the_factorial_bound() {
        let roots = ground_state(4).unwrap();
        let record = check_conjectures(&roots).unwrap();
        // |α|²·M! = 1 exactly: equality counts as holding
        assert!(record.delta.abs() < 1e-12);
        assert!(record.probability_bound_holds);
        assert!(record.factorial_bound_holds);
        assert!(record.reduced_bound_holds);
        assert!(record.determinant_positive);
    }

    #[test]
    fn exceptional_state_at_the_first_reported_size() {
        let record = exceptional_state_probe(22, 3).unwrap();
        assert!(
            record.delta > 1e-6 && record.delta < 1e-4,
            "δ = {:e}",
            record.delta
        );
        assert!(!record.factorial_bound_holds);
        assert!(!record.reduced_bound_holds);
        assert!(record.probability_bound_holds, "|α|² must stay below 1");
        assert!(record.residual <= 1e-10);
    }

    #[test]
    fn exceptional_probe_requires_three_magnons() {
        assert!(matches!(
            exceptional_state_probe(22, 2),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn small_conjecture_scan_is_clean() {
        let records = conjecture_scan(8).unwrap();
        assert!(!records.is_empty());
        for record in &records {
            assert!(record.probability_bound_holds);
            assert!(record.determinant_positive);
        }
    }

    #[test]
    fn gaudin_matrix_entries_are_finite_and_real() {
        let enumeration = enumerate_real_solutions(10, 3, None).unwrap();
        for roots in &enumeration.solutions {
            let g = gaudin_matrix(roots).unwrap();
            for m in 0..3 {
                for n in 0..3 {
                    assert!(g[(m, n)].is_finite());
                }
            }
            // all bracket products strictly positive
            let report = success_probability(roots).unwrap();
            for &p in &report.bracket_products {
                assert!(p > 0.0);
            }
        }
    }

    #[test]
    fn boosted_state_energy_matches_its_printed_roots() {
        // energy evaluated at the printed benchmark roots equals the
        // solver's energy for the same state
        let states = benchmark_states().unwrap();
        let printed = [1.41951, 2.76928];
        let expected: f64 = -printed
            .iter()
            .map(|k: &f64| 4.0 * (k / 2.0).sin().powi(2))
            .sum::<f64>();
        assert!((states[1].energy() - expected).abs() < 1e-4);
        let _ = PI;
    }
}
