//! Register-level emulation of the 5-step Bethe preparation circuit.
//!
//! The composite register is the M-magnon system sector tensored with an
//! M!-dimensional permutation-label space; the faucet register is back
//! in its initial state after step 3 and is left implicit. The steps:
//!
//! 1. load the Dicke state on the system factor, label at rank 0;
//! 2. apply a label unitary W_A whose first column is (ε_P A_P)/√M!;
//! 3. multiply each (x, P) amplitude by e^{i Σ_j k_{P(j)} x_j};
//! 4. apply W†, where W has uniform first column 1/√M!;
//! 5. project the label onto rank 0.
//!
//! The projected block equals f(x)/(M!·√C(L,M)), so the probability of
//! the all-zeros label outcome reproduces the Gaudin-determinant success
//! probability — that identity is what the emulator is for.
//!
//! Shot sampling uses the analytic two-stage scheme (Bernoulli accept,
//! then a categorical draw over |f(x)|²): statistically identical to
//! measuring the composite state, with no composite-memory ceiling.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::combinatorics::{sector_dimension, tuple_unrank, tuples};
use crate::error::{Error, Result};
use crate::gaudin::success_probability;
use crate::linalg::{
    unitarity_deviation, unitary_from_first_column, unitary_from_first_column_gram_schmidt,
};
use crate::solver::BetheRootSet;
use crate::state::{
    build_bethe_state, build_permutation_amplitudes, inner_product, normalize, SparseMagnonState,
};

/// Default cap on system_dim × label_dim; covers C(8,4)·4! = 1680.
pub const DEFAULT_COMPOSITE_BUDGET: usize = 1680;

/// How the label unitaries are completed beyond their specified first
/// column. Physical outputs must not depend on this.
#[derive(Debug, Clone, Copy)]
pub enum LabelCompletion {
    Householder,
    GramSchmidt { seed: u64 },
}

/// System ⊗ label amplitudes, indexed by (tuple rank, permutation rank).
#[derive(Debug, Clone)]
pub struct CompositeState {
    pub chain_len: usize,
    pub magnons: usize,
    pub system_dim: usize,
    pub label_dim: usize,
    amplitudes: Vec<Complex64>,
}

impl CompositeState {
    fn zeros(chain_len: usize, magnons: usize) -> Self {
        let system_dim = sector_dimension(chain_len, magnons);
        let label_dim: usize = (1..=magnons).product();
        CompositeState {
            chain_len,
            magnons,
            system_dim,
            label_dim,
            amplitudes: vec![Complex64::new(0.0, 0.0); system_dim * label_dim],
        }
    }

    pub fn amplitude(&self, system_rank: usize, label_rank: usize) -> Complex64 {
        self.amplitudes[system_rank * self.label_dim + label_rank]
    }

    pub fn norm_squared(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    fn check_norm(&self, step: &'static str) -> Result<()> {
        let deviation = (self.norm_squared() - 1.0).abs();
        if deviation > 1e-10 {
            return Err(Error::NormNotPreserved { step, deviation });
        }
        Ok(())
    }

    /// Apply a label-space operator: amp[x, p] ← Σ_q op[p, q] amp[x, q].
    fn apply_label_operator(&mut self, op: &nalgebra::DMatrix<Complex64>) {
        let label_dim = self.label_dim;
        let mut row = vec![Complex64::new(0.0, 0.0); label_dim];
        for x in 0..self.system_dim {
            let base = x * label_dim;
            for p in 0..label_dim {
                let mut acc = Complex64::new(0.0, 0.0);
                for q in 0..label_dim {
                    acc += op[(p, q)] * self.amplitudes[base + q];
                }
                row[p] = acc;
            }
            self.amplitudes[base..base + label_dim].copy_from_slice(&row);
        }
    }

    /// Multiply each (x, P) amplitude by e^{sign·i Σ_j k_{P(j)} x_j}.
    fn apply_permutation_phases(
        &mut self,
        momenta: &[f64],
        permutations: &[Vec<usize>],
        sign: f64,
    ) {
        let phases: Vec<Vec<Complex64>> = momenta
            .iter()
            .map(|&k| {
                (0..self.chain_len)
                    .map(|x| Complex64::from_polar(1.0, sign * k * x as f64))
                    .collect()
            })
            .collect();
        for (x_rank, positions) in tuples(self.chain_len, self.magnons).enumerate() {
            let base = x_rank * self.label_dim;
            for (p_rank, perm) in permutations.iter().enumerate() {
                let mut phase = Complex64::new(1.0, 0.0);
                for (j, &x) in positions.iter().enumerate() {
                    phase *= phases[perm[j]][x];
                }
                self.amplitudes[base + p_rank] *= phase;
            }
        }
    }

    /// The label-rank-0 block as an unnormalized system state.
    fn label_zero_block(&self) -> SparseMagnonState {
        let dense: Vec<Complex64> = (0..self.system_dim)
            .map(|x| self.amplitudes[x * self.label_dim])
            .collect();
        SparseMagnonState::from_dense(self.chain_len, self.magnons, &dense)
    }
}

/// What the circuit left behind after the label measurement.
#[derive(Debug, Clone)]
pub struct EmulationResult {
    /// Squared norm of the label-zero block: the probability that all
    /// label qubits read 0.
    pub accept_probability: f64,
    /// The label-zero block, unnormalized.
    pub projected_state: SparseMagnonState,
    /// Squared overlap of the normalized block with the normalized
    /// target Bethe state.
    pub overlap_with_target: f64,
}

/// Run the 5 steps with the default budget and Householder completion.
pub fn run_algorithm(roots: &BetheRootSet) -> Result<EmulationResult> {
    run_algorithm_with(
        roots,
        DEFAULT_COMPOSITE_BUDGET,
        LabelCompletion::Householder,
    )
}

/// Run the 5 steps with explicit budget and completion strategy.
pub fn run_algorithm_with(
    roots: &BetheRootSet,
    budget: usize,
    completion: LabelCompletion,
) -> Result<EmulationResult> {
    let chain_len = roots.chain_len();
    let magnons = roots.magnon_count();
    if magnons == 0 {
        return Err(Error::InvalidInput(
            "emulation needs at least one magnon".into(),
        ));
    }
    let system_dim = sector_dimension(chain_len, magnons);
    let label_dim: usize = (1..=magnons).product();
    let needed = system_dim * label_dim;
    if needed > budget {
        return Err(Error::MemoryBudget { needed, budget });
    }

    let permutation_amplitudes = build_permutation_amplitudes(roots)?;
    let permutations: Vec<Vec<usize>> = permutation_amplitudes
        .entries()
        .iter()
        .map(|(p, _)| p.clone())
        .collect();

    let complete = |column: &[Complex64]| -> Result<nalgebra::DMatrix<Complex64>> {
        let u = match completion {
            LabelCompletion::Householder => unitary_from_first_column(column)?,
            LabelCompletion::GramSchmidt { seed } => {
                unitary_from_first_column_gram_schmidt(column, seed)?
            }
        };
        let deviation = unitarity_deviation(&u);
        if deviation > 1e-12 {
            return Err(Error::NonUnitary(deviation));
        }
        Ok(u)
    };

    // step 1: Dicke state on the system factor, label at rank 0
    let mut state = CompositeState::zeros(chain_len, magnons);
    let dicke = 1.0 / (system_dim as f64).sqrt();
    for x in 0..system_dim {
        state.amplitudes[x * label_dim] = Complex64::new(dicke, 0.0);
    }
    state.check_norm("step 1 (Dicke load)")?;

    // step 2: label unitary with first column (ε_P A_P)/√M!
    let scale = 1.0 / (label_dim as f64).sqrt();
    let amplitude_column: Vec<Complex64> = permutation_amplitudes
        .entries()
        .iter()
        .map(|(_, entry)| entry * scale)
        .collect();
    let w_amplitudes = complete(&amplitude_column)?;
    state.apply_label_operator(&w_amplitudes);
    state.check_norm("step 2 (label preparation)")?;

    // step 3: permutation-dependent phases
    state.apply_permutation_phases(roots.momenta(), &permutations, 1.0);
    state.check_norm("step 3 (phases)")?;

    // step 4: reverse of step 2 without the phases: apply W†
    let uniform_column: Vec<Complex64> = vec![Complex64::new(scale, 0.0); label_dim];
    let w_uniform = complete(&uniform_column)?;
    let w_uniform_dagger = w_uniform.adjoint();
    state.apply_label_operator(&w_uniform_dagger);
    state.check_norm("step 4 (label reversal)")?;

    // step 5: project the label onto rank 0
    let projected_state = state.label_zero_block();
    let accept_probability = projected_state.norm_squared();

    let target = normalize(&build_bethe_state(roots)?)?;
    let projected_normalized = normalize(&projected_state)?;
    let overlap_with_target = inner_product(&projected_normalized, &target)?.norm_sqr();

    Ok(EmulationResult {
        accept_probability,
        projected_state,
        overlap_with_target,
    })
}

/// Max deviation of the projected block from f(x)/(M!·√C(L,M)).
pub fn projected_amplitude_check(roots: &BetheRootSet) -> Result<f64> {
    let result = run_algorithm(roots)?;
    let psi = build_bethe_state(roots)?;
    let system_dim = sector_dimension(roots.chain_len(), roots.magnon_count());
    let label_dim: f64 = (1..=roots.magnon_count()).product::<usize>() as f64;
    let prefactor = 1.0 / (label_dim * (system_dim as f64).sqrt());
    let mut deviation: f64 = 0.0;
    for (positions, amplitude) in psi.iter() {
        let expected = prefactor * amplitude;
        deviation = deviation.max((result.projected_state.amplitude(positions) - expected).norm());
    }
    Ok(deviation)
}

/// A counter-based generator for shot streams: one 64-bit seed, one
/// stream index per trial.
pub fn shot_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Aggregated measurement outcomes of repeated circuit shots.
///
/// Accepted shots (all label qubits 0) record the measured system
/// configuration by colex rank; rejected shots record only their count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShotCounts {
    pub chain_len: usize,
    pub magnons: usize,
    /// Count per system configuration, indexed by tuple rank.
    pub accepted: Vec<u64>,
    pub rejected: u64,
}

impl ShotCounts {
    pub fn accepted_total(&self) -> u64 {
        self.accepted.iter().sum()
    }

    pub fn shots(&self) -> u64 {
        self.accepted_total() + self.rejected
    }

    /// 'L'-character occupation string for a configuration rank; char n
    /// is '1' when site n carries a magnon.
    pub fn bitstring(&self, rank: usize) -> String {
        let positions = tuple_unrank(self.magnons, rank);
        let mut chars = vec!['0'; self.chain_len];
        for x in positions {
            chars[x] = '1';
        }
        chars.into_iter().collect()
    }
}

/// Sample `n_shots` measurement shots of the prepared circuit.
///
/// Deterministic for a fixed (seed, stream): accepts arrive as Bernoulli
/// draws at the exact success probability, accepted configurations from
/// the normalized Bethe distribution |f(x)|²/⟨ψ|ψ⟩.
pub fn sample_shots(
    roots: &BetheRootSet,
    n_shots: u64,
    seed: u64,
    stream: u64,
) -> Result<ShotCounts> {
    if n_shots == 0 {
        return Err(Error::InvalidInput("need at least one shot".into()));
    }
    let report = success_probability(roots)?;
    let psi = build_bethe_state(roots)?;
    let dense = psi.to_dense();
    let norm = psi.norm_squared();
    // cumulative distribution over configurations
    let mut cumulative = Vec::with_capacity(dense.len());
    let mut acc = 0.0;
    for amplitude in &dense {
        acc += amplitude.norm_sqr() / norm;
        cumulative.push(acc);
    }

    let mut rng = shot_rng(seed, stream);
    let mut counts = ShotCounts {
        chain_len: roots.chain_len(),
        magnons: roots.magnon_count(),
        accepted: vec![0; dense.len()],
        rejected: 0,
    };
    for _ in 0..n_shots {
        if rng.random_bool(report.success_probability.min(1.0)) {
            let draw = rng.random::<f64>();
            let rank = cumulative
                .partition_point(|&c| c <= draw)
                .min(dense.len() - 1);
            counts.accepted[rank] += 1;
        } else {
            counts.rejected += 1;
        }
    }
    Ok(counts)
}
