//! Explicit coordinate-Bethe-ansatz wavefunctions over the M-magnon
//! sector.
//!
//! States are amplitude maps over occupied-site tuples
//! x_0 < x_1 < … < x_{M-1}. The Bethe wavefunction is
//!
//!   f(x) = Σ_P ε_P A_P e^{i Σ_j k_{P(j)} x_j},
//!
//! summed over all M! permutations, with ε_P the signature and the
//! amplitudes fixed by A_I = 1 and A_P / A_P' = −S(k_{P(l)}, k_{P'(l)})
//! for P, P' differing by one adjacent transposition. Walking the
//! permutations in Steinhaus–Johnson–Trotter order realizes that
//! recursion literally: one scattering factor per step.
//!
//! Also built here: the uniform Dicke state and the rescaled state
//! |φ⟩ = [Π_{j<l} (j,l)] |ψ⟩ whose squared norm is a Gaudin determinant.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::combinatorics::{sector_dimension, tuple_rank, tuples};
use crate::error::{Error, Result};
use crate::gaudin::bracket;
use crate::solver::{s_matrix, BetheRootSet};

/// A complex amplitude map over strictly increasing position tuples.
#[derive(Debug, Clone)]
pub struct SparseMagnonState {
    chain_len: usize,
    magnons: usize,
    amplitudes: BTreeMap<Vec<usize>, Complex64>,
    norm_squared: f64,
}

impl SparseMagnonState {
    /// Build from an explicit amplitude map, validating every key.
    pub fn from_amplitudes(
        chain_len: usize,
        magnons: usize,
        amplitudes: BTreeMap<Vec<usize>, Complex64>,
    ) -> Result<Self> {
        for positions in amplitudes.keys() {
            if positions.len() != magnons {
                return Err(Error::InvalidInput(format!(
                    "tuple {positions:?} has wrong length for M={magnons}"
                )));
            }
            for w in positions.windows(2) {
                if w[0] >= w[1] {
                    return Err(Error::InvalidInput(format!(
                        "tuple {positions:?} is not strictly increasing"
                    )));
                }
            }
            if positions.last().is_some_and(|&x| x >= chain_len) {
                return Err(Error::InvalidInput(format!(
                    "tuple {positions:?} leaves the chain of length {chain_len}"
                )));
            }
        }
        let norm_squared = amplitudes.values().map(|a| a.norm_sqr()).sum();
        Ok(SparseMagnonState {
            chain_len,
            magnons,
            amplitudes,
            norm_squared,
        })
    }

    /// Reassemble from a dense colex-ordered amplitude vector.
    pub fn from_dense(chain_len: usize, magnons: usize, dense: &[Complex64]) -> Self {
        debug_assert_eq!(dense.len(), sector_dimension(chain_len, magnons));
        let amplitudes = tuples(chain_len, magnons)
            .zip(dense.iter().copied())
            .collect();
        let norm_squared = dense.iter().map(|a| a.norm_sqr()).sum();
        SparseMagnonState {
            chain_len,
            magnons,
            amplitudes,
            norm_squared,
        }
    }

    pub fn chain_len(&self) -> usize {
        self.chain_len
    }

    pub fn magnon_count(&self) -> usize {
        self.magnons
    }

    /// Cached Σ_x |a_x|².
    pub fn norm_squared(&self) -> f64 {
        self.norm_squared
    }

    /// Amplitude at a tuple; zero when absent.
    pub fn amplitude(&self, positions: &[usize]) -> Complex64 {
        self.amplitudes
            .get(positions)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Vec<usize>, &Complex64)> {
        self.amplitudes.iter()
    }

    pub fn entry_count(&self) -> usize {
        self.amplitudes.len()
    }

    /// Dense amplitude vector in colex rank order.
    pub fn to_dense(&self) -> Vec<Complex64> {
        let mut dense =
            vec![Complex64::new(0.0, 0.0); sector_dimension(self.chain_len, self.magnons)];
        for (positions, amplitude) in &self.amplitudes {
            dense[tuple_rank(positions)] = *amplitude;
        }
        dense
    }

    /// Multiply every amplitude by a global factor.
    pub fn scaled(&self, factor: Complex64) -> Self {
        let amplitudes: BTreeMap<_, _> = self
            .amplitudes
            .iter()
            .map(|(k, v)| (k.clone(), factor * v))
            .collect();
        let norm_squared = self.norm_squared * factor.norm_sqr();
        SparseMagnonState {
            chain_len: self.chain_len,
            magnons: self.magnons,
            amplitudes,
            norm_squared,
        }
    }

    /// JSON array of {positions, re, im}.
    pub fn to_json_string(&self) -> String {
        let entries: Vec<String> = self
            .amplitudes
            .iter()
            .map(|(positions, amplitude)| {
                let pos = positions
                    .iter()
                    .map(|p| p.to_string())
                    .collect::<Vec<_>>()
                    .join(",");
                format!(
                    "{{\"positions\":[{pos}],\"re\":{:.16e},\"im\":{:.16e}}}",
                    amplitude.re, amplitude.im
                )
            })
            .collect();
        format!("[{}]", entries.join(","))
    }
}

/// The M! permutation entries ε_P·A_P, in Steinhaus–Johnson–Trotter order
/// starting from the identity (entry exactly +1).
#[derive(Debug, Clone)]
pub struct PermutationAmplitudes {
    size: usize,
    entries: Vec<(Vec<usize>, Complex64)>,
}

impl PermutationAmplitudes {
    pub fn size(&self) -> usize {
        self.size
    }

    /// (permutation, ε_P·A_P) pairs in generation order.
    pub fn entries(&self) -> &[(Vec<usize>, Complex64)] {
        &self.entries
    }
}

/// One adjacent-transposition update of the stored product ε_P·A_P.
///
/// Swapping positions (l, l+1) of `perm` in place multiplies the stored
/// entry by S(k at new left, k at new right).
fn step_entry(
    momenta: &[f64],
    perm: &mut [usize],
    entry: Complex64,
    swap: usize,
) -> Result<Complex64> {
    perm.swap(swap, swap + 1);
    Ok(entry * s_matrix(momenta[perm[swap]], momenta[perm[swap + 1]])?)
}

/// Walk a closed loop of adjacent swaps from `start` and report how far
/// the entry lands from where it began. On-shell roots close every loop.
pub fn loop_closure_error(roots: &BetheRootSet, start: &[usize], swaps: &[usize]) -> Result<f64> {
    let mut perm = start.to_vec();
    let mut entry = Complex64::new(1.0, 0.0);
    for &swap in swaps {
        entry = step_entry(roots.momenta(), &mut perm, entry, swap)?;
    }
    if perm != start {
        return Err(Error::InvalidInput(format!(
            "swap sequence {swaps:?} is not a loop from {start:?}"
        )));
    }
    Ok((entry - 1.0).norm())
}

/// Generate all M! entries ε_P·A_P by walking adjacent transpositions
/// from A_I = 1.
pub fn build_permutation_amplitudes(roots: &BetheRootSet) -> Result<PermutationAmplitudes> {
    let magnons = roots.magnon_count();
    if magnons == 0 {
        return Err(Error::InvalidInput(
            "permutation amplitudes need at least one magnon".into(),
        ));
    }
    let momenta = roots.momenta();
    let mut entries = Vec::with_capacity((1..=magnons).product());
    let mut entry = Complex64::new(1.0, 0.0);
    for (perm, swap) in crate::combinatorics::permutations(magnons) {
        if let Some(swap) = swap {
            // perm already carries the swap; recompute the factor from it
            entry *= s_matrix(momenta[perm[swap]], momenta[perm[swap + 1]])?;
        }
        entries.push((perm, entry));
    }

    // closed-loop consistency: s_l twice, and the hexagon (s_l s_{l+1})³
    let identity: Vec<usize> = (0..magnons).collect();
    for l in 0..magnons - 1 {
        let err = loop_closure_error(roots, &identity, &[l, l])?;
        if err > 1e-10 {
            return Err(Error::InconsistentAmplitudes(err));
        }
    }
    for l in 0..magnons.saturating_sub(2) {
        let err = loop_closure_error(roots, &identity, &[l, l + 1, l, l + 1, l, l + 1])?;
        if err > 1e-10 {
            return Err(Error::InconsistentAmplitudes(err));
        }
    }

    Ok(PermutationAmplitudes {
        size: magnons,
        entries,
    })
}

/// The unnormalized on-shell Bethe state |ψ⟩ with wavefunction f.
pub fn build_bethe_state(roots: &BetheRootSet) -> Result<SparseMagnonState> {
    let chain_len = roots.chain_len();
    let magnons = roots.magnon_count();
    if magnons == 0 {
        let mut amplitudes = BTreeMap::new();
        amplitudes.insert(vec![], Complex64::new(1.0, 0.0));
        return SparseMagnonState::from_amplitudes(chain_len, 0, amplitudes);
    }
    let permutation_amplitudes = build_permutation_amplitudes(roots)?;

    // phases[j][x] = e^{i k_j x}
    let phases: Vec<Vec<Complex64>> = roots
        .momenta()
        .iter()
        .map(|&k| {
            (0..chain_len)
                .map(|x| Complex64::from_polar(1.0, k * x as f64))
                .collect()
        })
        .collect();

    let mut amplitudes = BTreeMap::new();
    for positions in tuples(chain_len, magnons) {
        let mut f = Complex64::new(0.0, 0.0);
        for (perm, entry) in permutation_amplitudes.entries() {
            let mut phase = Complex64::new(1.0, 0.0);
            for (j, &x) in positions.iter().enumerate() {
                phase *= phases[perm[j]][x];
            }
            f += entry * phase;
        }
        amplitudes.insert(positions, f);
    }
    SparseMagnonState::from_amplitudes(chain_len, magnons, amplitudes)
}

/// The rescaled state |φ⟩ = [Π_{j<l} (j,l)] |ψ⟩.
pub fn build_rescaled_state(roots: &BetheRootSet) -> Result<SparseMagnonState> {
    let magnons = roots.magnon_count();
    let mut scale = Complex64::new(1.0, 0.0);
    for j in 0..magnons {
        for l in j + 1..magnons {
            let b = bracket(roots, j, l);
            if b.norm() <= 1e-12 {
                return Err(Error::SingularRescaling(j, l));
            }
            scale *= b;
        }
    }
    Ok(build_bethe_state(roots)?.scaled(scale))
}

/// The Dicke state: uniform amplitude 1/√C(L,M) on every tuple.
pub fn build_dicke_state(chain_len: usize, magnons: usize) -> Result<SparseMagnonState> {
    if magnons > chain_len {
        return Err(Error::InvalidInput(format!(
            "cannot place {magnons} magnons on {chain_len} sites"
        )));
    }
    let dim = sector_dimension(chain_len, magnons);
    let amplitude = Complex64::new(1.0 / (dim as f64).sqrt(), 0.0);
    let amplitudes: BTreeMap<_, _> = tuples(chain_len, magnons).map(|t| (t, amplitude)).collect();
    SparseMagnonState::from_amplitudes(chain_len, magnons, amplitudes)
}

/// ⟨a|b⟩ = Σ_x a_x* b_x.
pub fn inner_product(a: &SparseMagnonState, b: &SparseMagnonState) -> Result<Complex64> {
    if a.chain_len() != b.chain_len() || a.magnon_count() != b.magnon_count() {
        return Err(Error::SectorMismatch(
            a.chain_len(),
            a.magnon_count(),
            b.chain_len(),
            b.magnon_count(),
        ));
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for (positions, amplitude) in a.iter() {
        acc += amplitude.conj() * b.amplitude(positions);
    }
    Ok(acc)
}

/// Divide by the norm; the result has norm² = 1.
pub fn normalize(a: &SparseMagnonState) -> Result<SparseMagnonState> {
    if a.norm_squared() <= 0.0 {
        return Err(Error::ZeroNorm);
    }
    let inverse_norm = Complex64::new(1.0 / a.norm_squared().sqrt(), 0.0);
    Ok(a.scaled(inverse_norm))
}
