//! Error type shared by all modules.

use thiserror::Error;

/// Everything that can go wrong in the laboratory.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("degenerate roots: momenta {0} and {1} coincide (mod 2π)")]
    DegenerateRoots(f64, f64),

    #[error("solver failed after {iterations} iterations (max residual {residual:.3e}); last iterate {last_iterate:?}")]
    SolverFailure {
        iterations: usize,
        residual: f64,
        last_iterate: Vec<f64>,
    },

    #[error("converged roots are not a valid real solution: {0}")]
    NotRealSolution(String),

    #[error("no real solution found for L={chain_len}, M={magnons}")]
    NoSolution { chain_len: usize, magnons: usize },

    #[error("permutation-amplitude walk is inconsistent: loop closure error {0:.3e}")]
    InconsistentAmplitudes(f64),

    #[error("states live in different sectors: (L={0}, M={1}) vs (L={2}, M={3})")]
    SectorMismatch(usize, usize, usize, usize),

    #[error("rescaling is singular: bracket ({0},{1}) vanishes")]
    SingularRescaling(usize, usize),

    #[error("bracket product ({0},{1})({1},{0}) vanishes")]
    SingularBracket(usize, usize),

    #[error("cannot normalize a zero state")]
    ZeroNorm,

    #[error("state is not normalized: |norm² − 1| = {0:.3e}")]
    UnnormalizedState(f64),

    #[error("success probability {0} outside [0, 1]; root residual {1:.3e}")]
    ProbabilityOutOfRange(f64, f64),

    #[error("composite register needs {needed} amplitudes, budget is {budget}")]
    MemoryBudget { needed: usize, budget: usize },

    #[error("completed label operator is not unitary: max deviation {0:.3e}")]
    NonUnitary(f64),

    #[error("composite norm drifted by {deviation:.3e} after {step}")]
    NormNotPreserved { step: &'static str, deviation: f64 },

    #[error("sector dimension {dimension} exceeds the oracle budget {budget}")]
    DimensionBudget { dimension: usize, budget: usize },

    #[error("eigensolver failed for a {0}×{0} matrix")]
    EigensolverFailure(usize),

    #[error("no accepted shots: cannot form an estimate")]
    InsufficientStatistics,

    #[error("separation {separation} out of range for L={chain_len}")]
    SeparationOutOfRange { separation: usize, chain_len: usize },

    #[error("amplification is undefined for zero success probability")]
    ZeroSuccessProbability,
}

pub type Result<T> = std::result::Result<T, Error>;
