//! Small dense linear algebra: LU factorization with partial pivoting,
//! overflow-safe log-determinants, unitary completion, and least squares.
//!
//! Determinants of Gaudin matrices grow like L^M and overflow f64 long
//! before the probabilities they feed do, so the primary interface is
//! (sign, ln|det|); the plain determinant is exp of that.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Sign and log-magnitude of a determinant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogDet {
    /// -1.0, 0.0 or +1.0
    pub sign: f64,
    /// ln|det|; -inf when singular
    pub ln_abs: f64,
}

impl LogDet {
    /// The determinant itself; may overflow to ±inf.
    pub fn value(&self) -> f64 {
        if self.sign == 0.0 {
            0.0
        } else {
            self.sign * self.ln_abs.exp()
        }
    }
}

/// LU factorization in place with partial pivoting; returns the row
/// permutation and its sign, or None if singular.
fn lu_factor(a: &mut DMatrix<f64>) -> Option<(Vec<usize>, f64)> {
    let n = a.nrows();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut sign = 1.0;
    for col in 0..n {
        let mut pivot_row = col;
        let mut pivot_abs = a[(col, col)].abs();
        for row in col + 1..n {
            let v = a[(row, col)].abs();
            if v > pivot_abs {
                pivot_abs = v;
                pivot_row = row;
            }
        }
        if pivot_abs == 0.0 {
            return None;
        }
        if pivot_row != col {
            a.swap_rows(pivot_row, col);
            perm.swap(pivot_row, col);
            sign = -sign;
        }
        let pivot = a[(col, col)];
        for row in col + 1..n {
            let factor = a[(row, col)] / pivot;
            a[(row, col)] = factor;
            for k in col + 1..n {
                a[(row, k)] -= factor * a[(col, k)];
            }
        }
    }
    Some((perm, sign))
}

/// Determinant by LU with partial pivoting; the 0×0 matrix has determinant 1.
pub fn determinant(a: &DMatrix<f64>) -> f64 {
    log_determinant(a).value()
}

/// Sign and ln|det| by LU with partial pivoting.
pub fn log_determinant(a: &DMatrix<f64>) -> LogDet {
    assert_eq!(a.nrows(), a.ncols(), "determinant needs a square matrix");
    let mut lu = a.clone();
    let Some((_, mut sign)) = lu_factor(&mut lu) else {
        return LogDet {
            sign: 0.0,
            ln_abs: f64::NEG_INFINITY,
        };
    };
    let mut ln_abs = 0.0;
    for i in 0..lu.nrows() {
        let d = lu[(i, i)];
        if d < 0.0 {
            sign = -sign;
        }
        ln_abs += d.abs().ln();
    }
    LogDet { sign, ln_abs }
}

/// Solve a x = b; None if the matrix is numerically singular.
pub fn solve(a: &DMatrix<f64>, b: &DVector<f64>) -> Option<DVector<f64>> {
    let n = a.nrows();
    assert_eq!(n, a.ncols());
    assert_eq!(n, b.len());
    let mut lu = a.clone();
    let (perm, _) = lu_factor(&mut lu)?;
    let mut x = DVector::zeros(n);
    for i in 0..n {
        x[i] = b[perm[i]];
    }
    // forward substitution (unit lower triangle)
    for i in 0..n {
        for k in 0..i {
            let l = lu[(i, k)];
            x[i] -= l * x[k];
        }
    }
    // back substitution
    for i in (0..n).rev() {
        for k in i + 1..n {
            let u = lu[(i, k)];
            x[i] -= u * x[k];
        }
        x[i] /= lu[(i, i)];
    }
    Some(x)
}

/// Complete a unit vector to a full unitary whose first column is that
/// vector, via a Householder reflection (phase-corrected so the first
/// column is exactly the requested one).
pub fn unitary_from_first_column(column: &[Complex64]) -> Result<DMatrix<Complex64>> {
    let n = column.len();
    let norm: f64 = column.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidInput(format!(
            "first column must be unit norm, got {norm}"
        )));
    }
    // phase that makes the leading entry real non-negative
    let v0 = column[0];
    let beta = if v0.norm() == 0.0 {
        Complex64::new(1.0, 0.0)
    } else {
        v0.conj() / v0.norm()
    };
    let target: Vec<Complex64> = column.iter().map(|c| beta * c).collect();
    let mut u = DMatrix::identity(n, n);
    let head = target[0].re; // = |v0| by construction
    if (head - 1.0).abs() > 1e-15 {
        // w = e0 - target; H = I - 2 w w† / (w†w) maps e0 to target
        let mut w: Vec<Complex64> = target.iter().map(|c| -c).collect();
        w[0] += 1.0;
        let w_norm_sqr: f64 = w.iter().map(|c| c.norm_sqr()).sum();
        for i in 0..n {
            for j in 0..n {
                u[(i, j)] -= 2.0 * w[i] * w[j].conj() / w_norm_sqr;
            }
        }
    }
    // undo the phase on the first column only
    let beta_conj = beta.conj();
    for i in 0..n {
        u[(i, 0)] *= beta_conj;
    }
    Ok(u)
}

/// Alternate completion of the same first column, by Gram–Schmidt on a
/// seeded random basis. Used to check that results do not depend on how
/// the label operators are completed.
pub fn unitary_from_first_column_gram_schmidt(
    column: &[Complex64],
    seed: u64,
) -> Result<DMatrix<Complex64>> {
    let n = column.len();
    let norm: f64 = column.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidInput(format!(
            "first column must be unit norm, got {norm}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut columns: Vec<Vec<Complex64>> = vec![column.to_vec()];
    while columns.len() < n {
        let candidate: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect();
        let mut v = candidate;
        for existing in &columns {
            let overlap: Complex64 = existing.iter().zip(&v).map(|(e, x)| e.conj() * x).sum();
            for i in 0..n {
                let corr = overlap * existing[i];
                v[i] -= corr;
            }
        }
        let vnorm: f64 = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if vnorm < 1e-8 {
            continue; // unlucky draw, retry
        }
        for c in &mut v {
            *c /= vnorm;
        }
        columns.push(v);
    }
    let mut u = DMatrix::zeros(n, n);
    for (j, col) in columns.iter().enumerate() {
        for i in 0..n {
            u[(i, j)] = col[i];
        }
    }
    Ok(u)
}

/// Max-norm deviation of U from unitarity, ‖U†U − 1‖_max.
pub fn unitarity_deviation(u: &DMatrix<Complex64>) -> f64 {
    let n = u.nrows();
    let mut max_dev: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..n {
                acc += u[(k, i)].conj() * u[(k, j)];
            }
            let expected = if i == j { 1.0 } else { 0.0 };
            max_dev = max_dev.max((acc - expected).norm());
        }
    }
    max_dev
}

/// Ordinary least-squares line fit.
#[derive(Debug, Clone, Copy)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Fit y = slope·x + intercept and report R².
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> LineFit {
    assert_eq!(xs.len(), ys.len());
    assert!(xs.len() >= 2, "need at least two points for a line");
    let n = xs.len() as f64;
    let mean_x = xs.iter().sum::<f64>() / n;
    let mean_y = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - mean_x) * (x - mean_x);
        sxy += (x - mean_x) * (y - mean_y);
        syy += (y - mean_y) * (y - mean_y);
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        sxy * sxy / (sxx * syy)
    };
    LineFit {
        slope,
        intercept,
        r_squared,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Cofactor-expansion determinant, the independent cross-check for
    /// small matrices.
    fn cofactor_determinant(a: &DMatrix<f64>) -> f64 {
        let n = a.nrows();
        if n == 0 {
            return 1.0;
        }
        if n == 1 {
            return a[(0, 0)];
        }
        let mut acc = 0.0;
        for col in 0..n {
            let minor = a.clone().remove_row(0).remove_column(col);
            let sign = if col % 2 == 0 { 1.0 } else { -1.0 };
            acc += sign * a[(0, col)] * cofactor_determinant(&minor);
        }
        acc
    }

    fn seeded_matrix(n: usize, seed: u64) -> DMatrix<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        DMatrix::from_fn(n, n, |_, _| rng.random::<f64>() * 2.0 - 1.0)
    }

    #[test]
    fn determinant_of_empty_matrix_is_one() {
        assert_eq!(determinant(&DMatrix::zeros(0, 0)), 1.0);
    }

    #[test]
    fn determinant_of_identity() {
        for n in 1..=5 {
            assert_eq!(determinant(&DMatrix::identity(n, n)), 1.0);
        }
    }

    #[test]
    fn determinant_of_gaudin_benchmark() {
        let g = DMatrix::from_row_slice(2, 2, &[3.5, 0.5, 0.5, 3.5]);
        assert!((determinant(&g) - 12.0).abs() < 1e-14);
    }

    #[test]
    fn determinant_matches_cofactor_oracle() {
        for seed in 0..20u64 {
            for n in 1..=6 {
                let a = seeded_matrix(n, seed * 31 + n as u64);
                let lu = determinant(&a);
                let cof = cofactor_determinant(&a);
                let rel = (lu - cof).abs() / cof.abs().max(1e-30);
                assert!(rel < 1e-10, "n={n} seed={seed}: lu={lu} cofactor={cof}");
            }
        }
    }

    #[test]
    fn singular_matrix_determinant_is_zero() {
        let mut a = seeded_matrix(4, 7);
        for j in 0..4 {
            let v = a[(1, j)];
            a[(2, j)] = v;
        }
        assert_eq!(determinant(&a), 0.0);
        assert_eq!(log_determinant(&a).sign, 0.0);
    }

    #[test]
    fn log_determinant_handles_huge_products() {
        // diag(1e200, 1e200): det overflows f64, ln|det| does not
        let a = DMatrix::from_diagonal(&DVector::from_vec(vec![1e200, 1e200]));
        let ld = log_determinant(&a);
        assert_eq!(ld.sign, 1.0);
        assert!((ld.ln_abs - 2.0 * 200.0 * std::f64::consts::LN_10).abs() < 1e-9);
        assert!(ld.value().is_infinite());
    }

    #[test]
    fn solve_recovers_known_solution() {
        for seed in 0..10u64 {
            let n = 5;
            let a = seeded_matrix(n, 1000 + seed);
            let x_true = DVector::from_fn(n, |i, _| (i as f64 + 1.0) * 0.3);
            let b = &a * &x_true;
            let x = solve(&a, &b).expect("well-conditioned system");
            assert!((x - x_true).amax() < 1e-9, "seed={seed}");
        }
    }

    #[test]
    fn householder_completion_is_unitary_with_requested_column() {
        let n = 6;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut col: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect();
        let norm: f64 = col.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        for c in &mut col {
            *c /= norm;
        }
        let u = unitary_from_first_column(&col).unwrap();
        assert!(unitarity_deviation(&u) < 1e-12);
        for i in 0..n {
            assert!((u[(i, 0)] - col[i]).norm() < 1e-12, "column entry {i}");
        }
    }

    #[test]
    fn gram_schmidt_completion_is_unitary_with_requested_column() {
        let col = vec![
            Complex64::new(0.5, 0.0),
            Complex64::new(0.0, 0.5),
            Complex64::new(-0.5, 0.0),
            Complex64::new(0.0, -0.5),
        ];
        let u = unitary_from_first_column_gram_schmidt(&col, 42).unwrap();
        assert!(unitarity_deviation(&u) < 1e-12);
        for i in 0..4 {
            assert!((u[(i, 0)] - col[i]).norm() < 1e-12);
        }
    }

    #[test]
    fn linear_fit_recovers_exact_line() {
        let xs: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| -1.3 * x + 0.7).collect();
        let fit = linear_fit(&xs, &ys);
        assert!((fit.slope + 1.3).abs() < 1e-12);
        assert!((fit.intercept - 0.7).abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
    }
}
