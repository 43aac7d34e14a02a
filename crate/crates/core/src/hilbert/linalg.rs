//! One-sided Jacobi SVD, used for the exact order-2 rank-one seminorm.

/// Largest singular value of a square matrix with its singular vectors.
#[derive(Debug, Clone)]
pub(crate) struct SingularTriple {
    #[allow(dead_code)]
    pub value: f64,
    pub left: Vec<f64>,
    pub right: Vec<f64>,
}

const MAX_SWEEPS: usize = 100;

/// Top singular triple of the row-major `n x n` matrix `a`.
///
/// Hestenes rotations orthogonalize the columns of `A V`; a pair is skipped
/// once its normalized correlation drops below `tol`.
pub(crate) fn top_singular_triple(a: &[f64], n: usize, tol: f64) -> SingularTriple {
    debug_assert_eq!(a.len(), n * n);
    // columns of A V and of V, column-major
    let mut u: Vec<Vec<f64>> = (0..n).map(|j| (0..n).map(|i| a[i * n + j]).collect()).collect();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|j| (0..n).map(|i| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let threshold = tol.min(1e-15);

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha: f64 = u[p].iter().map(|x| x * x).sum();
                let beta: f64 = u[q].iter().map(|x| x * x).sum();
                let gamma: f64 = u[p].iter().zip(&u[q]).map(|(x, y)| x * y).sum();
                if gamma == 0.0 || gamma.abs() <= threshold * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(&mut u, p, q, c, s);
                rotate(&mut v, p, q, c, s);
            }
        }
        if !rotated {
            break;
        }
    }

    let norms: Vec<f64> = u.iter().map(|col| col.iter().map(|x| x * x).sum::<f64>().sqrt()).collect();
    let best = norms
        .iter()
        .enumerate()
        .fold(0, |best, (j, &s)| if s > norms[best] { j } else { best });
    let value = norms[best];
    if value == 0.0 {
        let mut e = vec![0.0; n];
        e[0] = 1.0;
        return SingularTriple {
            value,
            left: e.clone(),
            right: e,
        };
    }
    let left = u[best].iter().map(|x| x / value).collect();
    SingularTriple {
        value,
        left,
        right: v[best].clone(),
    }
}

fn rotate(cols: &mut [Vec<f64>], p: usize, q: usize, c: f64, s: f64) {
    let (head, tail) = cols.split_at_mut(q);
    let cp = &mut head[p];
    let cq = &mut tail[0];
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let (xp, xq) = (*x, *y);
        *x = c * xp - s * xq;
        *y = s * xp + c * xq;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn identity_and_diagonal() {
        let t = top_singular_triple(&[1.0, 0.0, 0.0, 1.0], 2, 1e-12);
        assert_relative_eq!(t.value, 1.0, epsilon = 1e-15);
        let t = top_singular_triple(&[2.0, 0.0, 0.0, -5.0], 2, 1e-12);
        assert_relative_eq!(t.value, 5.0, epsilon = 1e-15);
    }

    #[test]
    fn triple_reproduces_value() {
        let a = [1.0, 2.0, 0.5, -1.0, 3.0, 0.0, 2.0, 1.0, -2.0];
        let t = top_singular_triple(&a, 3, 1e-12);
        let mut bilinear = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                bilinear += t.left[i] * a[i * 3 + j] * t.right[j];
            }
        }
        assert_relative_eq!(bilinear, t.value, epsilon = 1e-12);
    }

    #[test]
    fn zero_matrix() {
        let t = top_singular_triple(&[0.0; 9], 3, 1e-12);
        assert_eq!(t.value, 0.0);
        assert_eq!(t.left, vec![1.0, 0.0, 0.0]);
    }
}
