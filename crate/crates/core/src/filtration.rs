//! Metric filtrations and their normalization to pseudometrics.

use num_rational::Rational64;

use crate::error::{CoreError, Result};

pub type FiltrationMatrix = Vec<Vec<Rational64>>;

fn check_square(m: &FiltrationMatrix) -> Result<usize> {
    let n = m.len();
    if m.iter().any(|row| row.len() != n) {
        return Err(CoreError::ShapeMismatch("filtration matrix is not square".into()));
    }
    Ok(n)
}

/// Symmetric, non-negative, and `μ(x, x'') ≤ max(μ(x, x'), μ(x', x''))` for
/// every triple, repeated points included.
pub fn check_metric_filtration(m: &FiltrationMatrix) -> Result<()> {
    let n = check_square(m)?;
    let zero = Rational64::from_integer(0);
    for a in 0..n {
        for b in 0..n {
            if m[a][b] < zero {
                return Err(CoreError::NotUltrametric(format!("negative entry at ({a}, {b})")));
            }
            if m[a][b] != m[b][a] {
                return Err(CoreError::NotUltrametric(format!("asymmetric at ({a}, {b})")));
            }
        }
    }
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                if m[a][c] > m[a][b].max(m[b][c]) {
                    return Err(CoreError::NotUltrametric(format!(
                        "mu({a},{c}) = {} exceeds max(mu({a},{b}), mu({b},{c})) = {}",
                        m[a][c],
                        m[a][b].max(m[b][c])
                    )));
                }
            }
        }
    }
    Ok(())
}

/// `μ̃(x, x') = μ(x, x') - min(μ(x, x), μ(x', x'))` without any checks.
pub fn normalize_unchecked(m: &FiltrationMatrix) -> FiltrationMatrix {
    let n = m.len();
    (0..n).map(|a| (0..n).map(|b| m[a][b] - m[a][a].min(m[b][b])).collect()).collect()
}

pub fn is_pseudometric(m: &FiltrationMatrix) -> bool {
    let n = m.len();
    let zero = Rational64::from_integer(0);
    (0..n).all(|a| m[a][a] == zero)
        && (0..n).all(|a| (0..n).all(|b| m[a][b] >= zero && m[a][b] == m[b][a]))
        && (0..n).all(|a| (0..n).all(|b| (0..n).all(|c| m[a][c] <= m[a][b] + m[b][c])))
}

/// Normalizes a metric filtration. The result is checked to be a pseudometric.
pub fn normalize_filtration(m: &FiltrationMatrix) -> Result<FiltrationMatrix> {
    check_metric_filtration(m)?;
    let out = normalize_unchecked(m);
    if !is_pseudometric(&out) {
        return Err(CoreError::NotUltrametric("normalization is not a pseudometric".into()));
    }
    Ok(out)
}

/// Minimax path values on a graph: `μ(x, y)` is the least possible maximum
/// of `f` along a walk from `x` to `y` using the given edges. Unreachable
/// pairs get the maximum of `f` over the two components plus one.
pub fn minimax_filtration(f: &[Rational64], edges: &[(usize, usize)]) -> FiltrationMatrix {
    let n = f.len();
    let inf = f.iter().copied().max().unwrap_or_default() + Rational64::from_integer(1);
    let mut m = vec![vec![inf; n]; n];
    for a in 0..n {
        m[a][a] = f[a];
    }
    for &(a, b) in edges {
        let v = f[a].max(f[b]);
        if v < m[a][b] {
            m[a][b] = v;
            m[b][a] = v;
        }
    }
    for k in 0..n {
        for a in 0..n {
            for b in 0..n {
                let via = m[a][k].max(m[k][b]);
                if via < m[a][b] {
                    m[a][b] = via;
                }
            }
        }
    }
    m
}
