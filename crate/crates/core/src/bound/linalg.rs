use crate::bound::dual::Dual;
use crate::error::{Error, Result};

/// Relative tolerance for the power-iteration estimate.
const SPECTRAL_TOL: f64 = 1e-10;
const SPECTRAL_MAX_ITERS: usize = 100_000;

/// Largest eigenvalue magnitude of an entrywise-nonnegative square matrix,
/// by power iteration from the all-ones vector. Converges to the Perron
/// root for the transition-weight matrices used here; reports an error if
/// the estimate has not settled after the iteration cap.
pub fn spectral_radius(matrix: &[Vec<f64>]) -> Result<f64> {
    let n = matrix.len();
    for row in matrix {
        if row.len() != n {
            return Err(Error::InvalidConfig("matrix is not square".into()));
        }
        if row.iter().any(|&x| x < 0.0 || !x.is_finite()) {
            return Err(Error::InvalidConfig(
                "matrix must be entrywise nonnegative and finite".into(),
            ));
        }
    }
    if n == 0 {
        return Ok(0.0);
    }
    let mut x = vec![1.0 / (n as f64).sqrt(); n];
    let mut y = vec![0.0f64; n];
    let mut prev = f64::NAN;
    for _ in 0..SPECTRAL_MAX_ITERS {
        for i in 0..n {
            y[i] = matrix[i].iter().zip(&x).map(|(a, b)| a * b).sum();
        }
        let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Ok(0.0);
        }
        if (norm - prev).abs() <= SPECTRAL_TOL * norm.max(f64::MIN_POSITIVE) {
            return Ok(norm);
        }
        prev = norm;
        for i in 0..n {
            x[i] = y[i] / norm;
        }
    }
    Err(Error::Numerical(format!(
        "power iteration did not converge within {SPECTRAL_MAX_ITERS} iterations"
    )))
}

/// Solve `(I - a) x = b` in dual arithmetic by Gaussian elimination with
/// partial pivoting on the value parts. `a` is row-major `n x n`.
pub(crate) fn solve_id_minus(a: &[Dual], b: &[Dual], n: usize) -> Result<Vec<Dual>> {
    debug_assert_eq!(a.len(), n * n);
    debug_assert_eq!(b.len(), n);
    let mut m = vec![Dual::ZERO; n * n];
    for i in 0..n {
        for j in 0..n {
            let id = if i == j { Dual::ONE } else { Dual::ZERO };
            m[i * n + j] = id - a[i * n + j];
        }
    }
    let mut rhs = b.to_vec();
    for col in 0..n {
        let mut pivot = col;
        let mut best = m[col * n + col].abs_val();
        for row in col + 1..n {
            let mag = m[row * n + col].abs_val();
            if mag > best {
                best = mag;
                pivot = row;
            }
        }
        if best < f64::MIN_POSITIVE {
            return Err(Error::Numerical(
                "singular system while inverting (I - S_BB)".into(),
            ));
        }
        if pivot != col {
            for j in 0..n {
                m.swap(col * n + j, pivot * n + j);
            }
            rhs.swap(col, pivot);
        }
        let diag = m[col * n + col];
        for row in col + 1..n {
            let factor = m[row * n + col] / diag;
            if factor.val == 0.0 && factor.der == 0.0 {
                continue;
            }
            for j in col..n {
                let t = m[col * n + j] * factor;
                m[row * n + j] = m[row * n + j] - t;
            }
            let t = rhs[col] * factor;
            rhs[row] = rhs[row] - t;
        }
    }
    let mut x = vec![Dual::ZERO; n];
    for row in (0..n).rev() {
        let mut acc = rhs[row];
        for j in row + 1..n {
            acc = acc - m[row * n + j] * x[j];
        }
        x[row] = acc / m[row * n + row];
    }
    Ok(x)
}
