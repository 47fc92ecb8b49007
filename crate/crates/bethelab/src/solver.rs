//! Real-root solver for the Bethe equations of the periodic spin-1/2 XXX
//! chain.
//!
//! A set of M pairwise-distinct momenta k_j ∈ (0, 2π) is on shell when
//!
//!   e^{i k_j L} = Π_{l≠j} S(k_j, k_l),
//!   S(k_j, k_l) = (u_j − u_l + i) / (u_j − u_l − i),
//!   u(k) = ½ cot(k/2).
//!
//! Solving happens in rapidity variables, where the equations take the
//! logarithmic form
//!
//!   2L·arctan(2u_j) = 2π I_j + Σ_{l≠j} 2·arctan(u_j − u_l),
//!
//! with counting numbers I_j that are half-odd-integers for M even and
//! integers for M odd. Each strictly increasing set of counting numbers
//! seeds one Newton solve; converged roots are mapped back through
//! k = π − 2·arctan(2u) and accepted only if they satisfy the product
//! form above, whatever branch the logarithmic iteration took.
//!
//! The energy of an on-shell state is E = −Σ_j 4 sin²(k_j/2).

use std::f64::consts::PI;
use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg;

/// Residual bound for accepting a converged root set.
pub const RESIDUAL_TOLERANCE: f64 = 1e-10;
/// Minimum pairwise momentum gap within a root set.
pub const DISTINCTNESS_TOLERANCE: f64 = 1e-9;
/// Dedup tolerance on sorted momenta during enumeration.
pub const DEDUP_TOLERANCE: f64 = 1e-8;

const MAX_NEWTON_ITERATIONS: usize = 200;
const MAX_STEP_HALVINGS: usize = 30;
const NEWTON_UPDATE_TOLERANCE: f64 = 1e-13;
const PRE_SWEEPS: usize = 200;
const PRE_SWEEP_TOLERANCE: f64 = 1e-9;

/// An integer or half-odd-integer, stored as twice its value.
///
/// Counting numbers of the logarithmic Bethe equations live here; window
/// enumeration and parity checks run on the doubled integers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HalfInt {
    doubled: i64,
}

impl HalfInt {
    pub fn from_doubled(doubled: i64) -> Self {
        HalfInt { doubled }
    }

    pub fn from_integer(n: i64) -> Self {
        HalfInt { doubled: 2 * n }
    }

    /// Parse from an f64 that must be an exact integer or half-integer.
    pub fn try_from_f64(x: f64) -> Result<Self> {
        let doubled = 2.0 * x;
        if doubled.fract() != 0.0 || doubled.abs() > 1e15 {
            return Err(Error::InvalidInput(format!(
                "{x} is not an integer or half-integer"
            )));
        }
        Ok(HalfInt {
            doubled: doubled as i64,
        })
    }

    pub fn doubled(&self) -> i64 {
        self.doubled
    }

    pub fn value(&self) -> f64 {
        self.doubled as f64 / 2.0
    }

    pub fn is_integer(&self) -> bool {
        self.doubled % 2 == 0
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.doubled / 2)
        } else {
            write!(f, "{}/2", self.doubled)
        }
    }
}

/// A validated on-shell solution of the Bethe equations.
///
/// Invariants enforced at construction: L even, M ≤ L/2, momenta strictly
/// inside (0, 2π), pairwise distinct beyond [`DISTINCTNESS_TOLERANCE`],
/// rapidities consistent with u(k) = ½cot(k/2) to 1e−12, and product-form
/// residual at most [`RESIDUAL_TOLERANCE`]. Momenta are stored sorted
/// ascending, rapidities aligned index-by-index.
#[derive(Debug, Clone)]
pub struct BetheRootSet {
    chain_len: usize,
    magnons: usize,
    momenta: Vec<f64>,
    rapidities: Vec<f64>,
    counting_numbers: Vec<HalfInt>,
    residual: f64,
}

impl BetheRootSet {
    /// The M = 0 reference state (all spins up): an empty, trivially valid
    /// root set with energy 0.
    pub fn vacuum(chain_len: usize) -> Result<Self> {
        check_chain(chain_len)?;
        Ok(BetheRootSet {
            chain_len,
            magnons: 0,
            momenta: vec![],
            rapidities: vec![],
            counting_numbers: vec![],
            residual: 0.0,
        })
    }

    pub fn chain_len(&self) -> usize {
        self.chain_len
    }

    pub fn magnon_count(&self) -> usize {
        self.magnons
    }

    /// Momenta k_j, sorted ascending in (0, 2π).
    pub fn momenta(&self) -> &[f64] {
        &self.momenta
    }

    /// Rapidities u_j = ½cot(k_j/2), aligned with [`Self::momenta`].
    pub fn rapidities(&self) -> &[f64] {
        &self.rapidities
    }

    pub fn counting_numbers(&self) -> &[HalfInt] {
        &self.counting_numbers
    }

    /// Max-norm residual of the product-form Bethe equations.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    /// E = −Σ_j 4 sin²(k_j/2).
    pub fn energy(&self) -> f64 {
        -self
            .momenta
            .iter()
            .map(|k| 4.0 * (k / 2.0).sin().powi(2))
            .sum::<f64>()
    }

    /// Total momentum Σ_j k_j reduced to [0, 2π).
    pub fn total_momentum(&self) -> f64 {
        let p: f64 = self.momenta.iter().sum();
        p.rem_euclid(2.0 * PI)
    }

    /// JSON with momenta (and the other floats) at 17 significant digits.
    pub fn to_json_string(&self) -> String {
        let join = |values: &[f64]| {
            values
                .iter()
                .map(|v| format!("{v:.16e}"))
                .collect::<Vec<_>>()
                .join(",")
        };
        let numbers = self
            .counting_numbers
            .iter()
            .map(|i| format!("{}", i.value()))
            .collect::<Vec<_>>()
            .join(",");
        format!(
            "{{\"L\":{},\"M\":{},\"k\":[{}],\"u\":[{}],\"I\":[{}],\"residual\":{:.16e},\"energy\":{:.16e}}}",
            self.chain_len,
            self.magnons,
            join(&self.momenta),
            join(&self.rapidities),
            numbers,
            self.residual,
            self.energy()
        )
    }
}

fn check_chain(chain_len: usize) -> Result<()> {
    if chain_len < 2 || !chain_len.is_multiple_of(2) {
        return Err(Error::InvalidInput(format!(
            "chain length must be even and at least 2, got {chain_len}"
        )));
    }
    Ok(())
}

fn check_sector(chain_len: usize, magnons: usize) -> Result<()> {
    check_chain(chain_len)?;
    if magnons == 0 || magnons > chain_len / 2 {
        return Err(Error::InvalidInput(format!(
            "magnon number must satisfy 1 <= M <= L/2, got M={magnons}, L={chain_len}"
        )));
    }
    Ok(())
}

/// Rapidity u(k) = ½ cot(k/2).
pub fn rapidity(momentum: f64) -> f64 {
    let half = momentum / 2.0;
    0.5 * half.cos() / half.sin()
}

/// Momentum branch k = π − 2·arctan(2u), mapping reals onto (0, 2π).
pub fn momentum(rapidity: f64) -> f64 {
    PI - 2.0 * (2.0 * rapidity).atan()
}

/// Two-magnon scattering amplitude S(k_j, k_l); unit modulus for real
/// momenta.
pub fn s_matrix(kj: f64, kl: f64) -> Result<Complex64> {
    if ((kj - kl) / 2.0).sin().abs() < 1e-12 {
        return Err(Error::DegenerateRoots(kj, kl));
    }
    let du = rapidity(kj) - rapidity(kl);
    if !du.is_finite() {
        return Err(Error::InvalidInput(format!(
            "no finite rapidity for momenta {kj}, {kl}"
        )));
    }
    Ok(Complex64::new(du, 1.0) / Complex64::new(du, -1.0))
}

/// Scattering phase Θ(k_j, k_l) with S = −e^{iΘ} (up to 2π).
pub fn theta_phase(kj: f64, kl: f64) -> Result<f64> {
    let numerator = ((kj - kl) / 2.0).sin();
    if numerator.abs() < 1e-12 {
        return Err(Error::DegenerateRoots(kj, kl));
    }
    let denominator = ((kj - kl) / 2.0).cos() - ((kj + kl) / 2.0).cos();
    Ok(2.0 * (numerator / denominator).atan())
}

/// Max-norm residual of the product-form Bethe equations for a candidate
/// set of momenta.
pub fn bethe_residual(chain_len: usize, momenta: &[f64]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (j, &kj) in momenta.iter().enumerate() {
        let lhs = Complex64::from_polar(1.0, kj * chain_len as f64);
        let mut rhs = Complex64::new(1.0, 0.0);
        for (l, &kl) in momenta.iter().enumerate() {
            if l != j {
                rhs *= s_matrix(kj, kl)?;
            }
        }
        worst = worst.max((lhs - rhs).norm());
    }
    Ok(worst)
}

/// Residual of the logarithmic equations at rapidities `u`.
fn log_form_residual(chain_len: usize, doubled: &[i64], u: &[f64], out: &mut [f64]) {
    let l_f = chain_len as f64;
    for j in 0..u.len() {
        let mut scattering = 0.0;
        for l in 0..u.len() {
            if l != j {
                scattering += 2.0 * (u[j] - u[l]).atan();
            }
        }
        out[j] = 2.0 * l_f * (2.0 * u[j]).atan() - PI * doubled[j] as f64 - scattering;
    }
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |acc, x| acc.max(x.abs()))
}

/// Newton solve of the logarithmic equations, preceded by Gauss–Seidel
/// sweeps of the fixed point u_j = ½tan((πI_j + Σ_{l≠j} atan(u_j−u_l))/L)
/// from the free-magnon seed u_j = ½tan(πI_j/L).
fn solve_rapidities(chain_len: usize, doubled: &[i64]) -> Result<Vec<f64>> {
    let m = doubled.len();
    let l_f = chain_len as f64;
    let max_angle = PI / 2.0 - 1e-9;

    let mut u: Vec<f64> = doubled
        .iter()
        .map(|&d| {
            0.5 * (PI * d as f64 / (2.0 * l_f))
                .clamp(-max_angle, max_angle)
                .tan()
        })
        .collect();

    for _ in 0..PRE_SWEEPS {
        let mut max_delta: f64 = 0.0;
        for j in 0..m {
            let mut scattering = 0.0;
            for l in 0..m {
                if l != j {
                    scattering += (u[j] - u[l]).atan();
                }
            }
            let angle =
                ((PI * doubled[j] as f64 / 2.0 + scattering) / l_f).clamp(-max_angle, max_angle);
            let updated = 0.5 * angle.tan();
            max_delta = max_delta.max((updated - u[j]).abs());
            u[j] = updated;
        }
        if max_delta < PRE_SWEEP_TOLERANCE {
            break;
        }
    }

    let mut residual = vec![0.0; m];
    log_form_residual(chain_len, doubled, &u, &mut residual);
    let mut residual_norm = inf_norm(&residual);

    for iteration in 0..MAX_NEWTON_ITERATIONS {
        let mut jacobian = DMatrix::zeros(m, m);
        for j in 0..m {
            let mut diagonal = 4.0 * l_f / (1.0 + 4.0 * u[j] * u[j]);
            for l in 0..m {
                if l != j {
                    let coupling = 2.0 / (1.0 + (u[j] - u[l]).powi(2));
                    diagonal -= coupling;
                    jacobian[(j, l)] = coupling;
                }
            }
            jacobian[(j, j)] = diagonal;
        }
        let rhs = DVector::from_fn(m, |i, _| -residual[i]);
        let step = linalg::solve(&jacobian, &rhs).ok_or_else(|| Error::SolverFailure {
            iterations: iteration,
            residual: residual_norm,
            last_iterate: u.clone(),
        })?;

        if step.amax() < NEWTON_UPDATE_TOLERANCE {
            for j in 0..m {
                u[j] += step[j];
            }
            return Ok(u);
        }

        let mut damping = 1.0;
        let mut accepted = false;
        let mut trial = vec![0.0; m];
        let mut trial_residual = vec![0.0; m];
        for _ in 0..=MAX_STEP_HALVINGS {
            for j in 0..m {
                trial[j] = u[j] + damping * step[j];
            }
            log_form_residual(chain_len, doubled, &trial, &mut trial_residual);
            let trial_norm = inf_norm(&trial_residual);
            if trial_norm < residual_norm {
                u.copy_from_slice(&trial);
                residual.copy_from_slice(&trial_residual);
                residual_norm = trial_norm;
                accepted = true;
                if damping * step.amax() < NEWTON_UPDATE_TOLERANCE {
                    return Ok(u);
                }
                break;
            }
            damping /= 2.0;
        }
        if !accepted {
            return Err(Error::SolverFailure {
                iterations: iteration,
                residual: residual_norm,
                last_iterate: u,
            });
        }
    }
    Err(Error::SolverFailure {
        iterations: MAX_NEWTON_ITERATIONS,
        residual: residual_norm,
        last_iterate: u,
    })
}

/// Validate converged rapidities and assemble a [`BetheRootSet`].
fn finish_root_set(
    chain_len: usize,
    numbers: &[HalfInt],
    rapidities: Vec<f64>,
) -> Result<BetheRootSet> {
    let magnons = rapidities.len();
    for &u in &rapidities {
        if !u.is_finite() {
            return Err(Error::NotRealSolution(format!("rapidity diverged to {u}")));
        }
    }

    let mut pairs: Vec<(f64, f64)> = rapidities.iter().map(|&u| (momentum(u), u)).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let momenta: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let rapidities: Vec<f64> = pairs.iter().map(|p| p.1).collect();

    for &k in &momenta {
        if !(k > 1e-12 && k < 2.0 * PI - 1e-12) {
            return Err(Error::NotRealSolution(format!(
                "momentum {k} outside (0, 2π)"
            )));
        }
    }
    for w in momenta.windows(2) {
        if w[1] - w[0] <= DISTINCTNESS_TOLERANCE {
            return Err(Error::NotRealSolution(format!(
                "momenta {} and {} coincide",
                w[0], w[1]
            )));
        }
    }
    for (&k, &u) in momenta.iter().zip(&rapidities) {
        if (rapidity(k) - u).abs() > 1e-12 {
            return Err(Error::NotRealSolution(format!(
                "rapidity {u} inconsistent with momentum {k}"
            )));
        }
    }
    let residual = bethe_residual(chain_len, &momenta)?;
    if residual > RESIDUAL_TOLERANCE {
        return Err(Error::NotRealSolution(format!(
            "product-form residual {residual:.3e} exceeds {RESIDUAL_TOLERANCE:.0e}"
        )));
    }
    Ok(BetheRootSet {
        chain_len,
        magnons,
        momenta,
        rapidities,
        counting_numbers: numbers.to_vec(),
        residual,
    })
}

/// Solve the Bethe equations for one strictly increasing set of counting
/// numbers.
pub fn solve_by_counting_numbers(chain_len: usize, numbers: &[HalfInt]) -> Result<BetheRootSet> {
    let magnons = numbers.len();
    check_sector(chain_len, magnons)?;
    for w in numbers.windows(2) {
        if w[0] >= w[1] {
            return Err(Error::InvalidInput(format!(
                "counting numbers must be strictly increasing, got {} >= {}",
                w[0], w[1]
            )));
        }
    }
    let want_integer = magnons % 2 == 1;
    for n in numbers {
        if n.is_integer() != want_integer {
            return Err(Error::InvalidInput(format!(
                "counting numbers must be {} for M={magnons}, got {n}",
                if want_integer {
                    "integers"
                } else {
                    "half-odd-integers"
                },
            )));
        }
    }
    let doubled: Vec<i64> = numbers.iter().map(|n| n.doubled()).collect();
    let rapidities = solve_rapidities(chain_len, &doubled)?;
    finish_root_set(chain_len, numbers, rapidities)
}

/// Consecutive centered counting numbers I_j = −(M−1)/2 + j.
pub fn centered_counting_numbers(magnons: usize) -> Vec<HalfInt> {
    (0..magnons)
        .map(|j| HalfInt::from_doubled(-(magnons as i64 - 1) + 2 * j as i64))
        .collect()
}

/// The antiferromagnetic ground state: M = L/2 magnons with consecutive
/// centered counting numbers.
pub fn ground_state(chain_len: usize) -> Result<BetheRootSet> {
    check_chain(chain_len)?;
    solve_by_counting_numbers(chain_len, &centered_counting_numbers(chain_len / 2))
}

/// Outcome of a window enumeration: validated solutions plus bookkeeping
/// that makes skipped candidates visible.
#[derive(Debug)]
pub struct Enumeration {
    /// Deduplicated validated solutions, sorted by (energy, momenta).
    pub solutions: Vec<BetheRootSet>,
    /// Counting-number sets attempted.
    pub attempted: usize,
    /// Candidates that failed to converge or to validate.
    pub failed: usize,
    /// Converged duplicates removed by the momentum dedup.
    pub duplicates: usize,
}

/// All admissible counting numbers (twice their value) for the sector:
/// |I_j| ≤ (L−1)/2 with the parity class fixed by M.
fn admissible_window(chain_len: usize, magnons: usize) -> Vec<i64> {
    let parity: i64 = if magnons.is_multiple_of(2) { 1 } else { 0 };
    let max_doubled = chain_len as i64 - 1;
    (-max_doubled..=max_doubled)
        .filter(|d| d.rem_euclid(2) == parity)
        .collect()
}

/// Solve every M-subset of a window of doubled counting numbers.
fn solve_window(
    chain_len: usize,
    magnons: usize,
    window: &[i64],
    max_sets: Option<usize>,
) -> Enumeration {
    let mut candidates: Vec<Vec<HalfInt>> = crate::combinatorics::tuples(window.len(), magnons)
        .map(|idx| {
            idx.iter()
                .map(|&i| HalfInt::from_doubled(window[i]))
                .collect()
        })
        .collect();
    if let Some(limit) = max_sets {
        candidates.truncate(limit);
    }
    let attempted = candidates.len();

    let mut solutions: Vec<BetheRootSet> = candidates
        .par_iter()
        .filter_map(|numbers| solve_by_counting_numbers(chain_len, numbers).ok())
        .collect();
    let converged = solutions.len();

    solutions.sort_by(|a, b| {
        a.momenta()
            .iter()
            .zip(b.momenta())
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    solutions.dedup_by(|a, b| {
        a.momenta()
            .iter()
            .zip(b.momenta())
            .all(|(x, y)| (x - y).abs() < DEDUP_TOLERANCE)
    });
    let duplicates = converged - solutions.len();

    solutions.sort_by(|a, b| {
        a.energy().total_cmp(&b.energy()).then_with(|| {
            a.momenta()
                .iter()
                .zip(b.momenta())
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        })
    });

    Enumeration {
        solutions,
        attempted,
        failed: attempted - converged,
        duplicates,
    }
}

/// Enumerate all real solutions reachable from admissible counting-number
/// sets, deduplicated by sorted momenta.
pub fn enumerate_real_solutions(
    chain_len: usize,
    magnons: usize,
    max_sets: Option<usize>,
) -> Result<Enumeration> {
    check_sector(chain_len, magnons)?;
    let window = admissible_window(chain_len, magnons);
    Ok(solve_window(chain_len, magnons, &window, max_sets))
}

/// Full enumeration is used up to this many candidate sets; beyond it the
/// search narrows to counting numbers near zero, which minimize the
/// energy E = −Σ 4/(1+4u_j²) because small |I_j| gives small |u_j|.
const FULL_ENUMERATION_LIMIT: u128 = 20_000;

/// Extra window slots (in doubled units) around the centered set kept by
/// the narrowed lowest-energy search.
const NEIGHBORHOOD_PAD: i64 = 6;

/// The enumerated real solution of lowest energy; ties break toward the
/// lexicographically smallest momenta.
pub fn lowest_energy_solution(chain_len: usize, magnons: usize) -> Result<BetheRootSet> {
    check_sector(chain_len, magnons)?;
    let window = admissible_window(chain_len, magnons);
    let enumeration =
        if crate::combinatorics::binomial(window.len(), magnons) <= FULL_ENUMERATION_LIMIT {
            solve_window(chain_len, magnons, &window, None)
        } else {
            let bound = magnons as i64 - 1 + NEIGHBORHOOD_PAD;
            let near_zero: Vec<i64> = window
                .iter()
                .copied()
                .filter(|d| d.abs() <= bound)
                .collect();
            solve_window(chain_len, magnons, &near_zero, None)
        };
    enumeration
        .solutions
        .into_iter()
        .next()
        .ok_or(Error::NoSolution { chain_len, magnons })
}

/// The four benchmark states of the success-probability table: the L = 4,
/// 6, 8 ground states plus one boosted two-magnon state at L = 6.
pub fn benchmark_states() -> Result<Vec<BetheRootSet>> {
    Ok(vec![
        ground_state(4)?,
        solve_by_counting_numbers(6, &[HalfInt::from_doubled(1), HalfInt::from_doubled(3)])?,
        ground_state(6)?,
        ground_state(8)?,
    ])
}
