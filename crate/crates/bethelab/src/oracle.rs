//! Dense exact diagonalization of the XXX Hamiltonian restricted to one
//! magnon sector — the independent brute-force check for everything the
//! analytic modules produce.
//!
//! The Hamiltonian is H = ½ Σ_{n=0}^{L-1} (σ⃗_n·σ⃗_{n+1} − 1) with the
//! periodic wrap σ⃗_L = σ⃗_0. In the occupation basis each bond
//! contributes −1 to the diagonal when its two sites are anti-aligned and
//! +1 between configurations related by exchanging them; magnon number is
//! conserved, so the sector matrix is built directly.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::combinatorics::{binomial, sector_dimension, tuples};
use crate::error::{Error, Result};
use crate::state::SparseMagnonState;

/// Sector dimensions above this are refused.
pub const DEFAULT_DIMENSION_BUDGET: usize = 200_000;

/// The Hamiltonian restricted to the M-magnon sector, basis ordered by
/// colex tuple rank.
#[derive(Debug, Clone)]
pub struct SectorHamiltonian {
    chain_len: usize,
    magnons: usize,
    dimension: usize,
    matrix: DMatrix<f64>,
}

/// Colex rank of an occupation bitmask (bit n = site n occupied).
fn mask_rank(mask: u64) -> usize {
    let mut rank: u128 = 0;
    let mut j = 0usize;
    let mut remaining = mask;
    while remaining != 0 {
        let site = remaining.trailing_zeros() as usize;
        rank += binomial(site, j + 1);
        j += 1;
        remaining &= remaining - 1;
    }
    rank as usize
}

/// Build the sector Hamiltonian.
pub fn build_hamiltonian(chain_len: usize, magnons: usize) -> Result<SectorHamiltonian> {
    build_hamiltonian_with_budget(chain_len, magnons, DEFAULT_DIMENSION_BUDGET)
}

/// Build with an explicit dimension budget.
pub fn build_hamiltonian_with_budget(
    chain_len: usize,
    magnons: usize,
    budget: usize,
) -> Result<SectorHamiltonian> {
    if !(2..=64).contains(&chain_len) {
        return Err(Error::InvalidInput(format!(
            "chain length {chain_len} outside [2, 64]"
        )));
    }
    if magnons > chain_len {
        return Err(Error::InvalidInput(format!(
            "cannot place {magnons} magnons on {chain_len} sites"
        )));
    }
    let dimension = sector_dimension(chain_len, magnons);
    if dimension > budget {
        return Err(Error::DimensionBudget { dimension, budget });
    }
    let mut matrix = DMatrix::zeros(dimension, dimension);
    for (row, positions) in tuples(chain_len, magnons).enumerate() {
        let mask: u64 = positions.iter().fold(0u64, |m, &x| m | (1u64 << x));
        for bond in 0..chain_len {
            let a = bond;
            let b = (bond + 1) % chain_len;
            let occupied_a = mask >> a & 1;
            let occupied_b = mask >> b & 1;
            if occupied_a != occupied_b {
                matrix[(row, row)] -= 1.0;
                let exchanged = mask ^ (1u64 << a) ^ (1u64 << b);
                matrix[(row, mask_rank(exchanged))] += 1.0;
            }
        }
    }
    Ok(SectorHamiltonian {
        chain_len,
        magnons,
        dimension,
        matrix,
    })
}

impl SectorHamiltonian {
    pub fn chain_len(&self) -> usize {
        self.chain_len
    }

    pub fn magnon_count(&self) -> usize {
        self.magnons
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// H|ψ⟩ as a new state.
    pub fn apply(&self, state: &SparseMagnonState) -> Result<SparseMagnonState> {
        if state.chain_len() != self.chain_len || state.magnon_count() != self.magnons {
            return Err(Error::SectorMismatch(
                self.chain_len,
                self.magnons,
                state.chain_len(),
                state.magnon_count(),
            ));
        }
        let dense = state.to_dense();
        let mut out = vec![Complex64::new(0.0, 0.0); self.dimension];
        for (row, target) in out.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (col, amplitude) in dense.iter().enumerate() {
                let h = self.matrix[(row, col)];
                if h != 0.0 {
                    acc += h * amplitude;
                }
            }
            *target = acc;
        }
        Ok(SparseMagnonState::from_dense(
            self.chain_len,
            self.magnons,
            &out,
        ))
    }

    /// ‖H|ψ⟩ − E|ψ⟩‖ / ‖ψ‖.
    pub fn eigenstate_residual(&self, state: &SparseMagnonState, energy: f64) -> Result<f64> {
        let applied = self.apply(state)?;
        let dense = state.to_dense();
        let applied_dense = applied.to_dense();
        let mut deviation_sq = 0.0;
        for (h_psi, psi) in applied_dense.iter().zip(&dense) {
            deviation_sq += (h_psi - energy * psi).norm_sqr();
        }
        Ok(deviation_sq.sqrt() / state.norm_squared().sqrt())
    }
}

/// Lowest eigenvalue and its normalized eigenvector.
pub fn ground_eigenpair(hamiltonian: &SectorHamiltonian) -> Result<(f64, SparseMagnonState)> {
    let eigen = hamiltonian.matrix.clone().symmetric_eigen();
    let mut best = 0usize;
    for i in 1..eigen.eigenvalues.len() {
        if eigen.eigenvalues[i] < eigen.eigenvalues[best] {
            best = i;
        }
    }
    let energy = eigen.eigenvalues[best];
    if !energy.is_finite() {
        return Err(Error::EigensolverFailure(hamiltonian.dimension));
    }
    let column = eigen.eigenvectors.column(best);
    let dense: Vec<Complex64> = column.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    Ok((
        energy,
        SparseMagnonState::from_dense(hamiltonian.chain_len, hamiltonian.magnons, &dense),
    ))
}

/// ⟨σᶻ_a σᶻ_b⟩ in a normalized state; σᶻ is diagonal here, with
/// eigenvalue −1 on occupied sites.
pub fn exact_correlator_between(
    state: &SparseMagnonState,
    site_a: usize,
    site_b: usize,
) -> Result<f64> {
    let chain_len = state.chain_len();
    if site_a >= chain_len || site_b >= chain_len {
        return Err(Error::SeparationOutOfRange {
            separation: site_a.max(site_b),
            chain_len,
        });
    }
    let norm_deviation = (state.norm_squared() - 1.0).abs();
    if norm_deviation > 1e-8 {
        return Err(Error::UnnormalizedState(norm_deviation));
    }
    let mut acc = 0.0;
    for (positions, amplitude) in state.iter() {
        let z_a = if positions.contains(&site_a) {
            -1.0
        } else {
            1.0
        };
        let z_b = if positions.contains(&site_b) {
            -1.0
        } else {
            1.0
        };
        acc += amplitude.norm_sqr() * z_a * z_b;
    }
    Ok(acc)
}

/// ⟨σᶻ_0 σᶻ_l⟩ in a normalized state.
pub fn exact_correlator(state: &SparseMagnonState, separation: usize) -> Result<f64> {
    exact_correlator_between(state, 0, separation)
}
