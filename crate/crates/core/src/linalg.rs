use nalgebra::{DMatrix, DVector};

/// Orthonormal basis (as columns) of the span of `vectors`.
///
/// Pivoted modified Gram-Schmidt with one reorthogonalization pass. A candidate
/// is accepted while its residual norm exceeds `tol * max(1, largest norm)`.
/// When the vectors span the whole space the identity is returned so that span
/// coordinates coincide with ambient coordinates.
pub(crate) fn span_basis(vectors: &[DVector<f64>], dim: usize, tol: f64) -> DMatrix<f64> {
    let scale = vectors.iter().map(|v| v.norm()).fold(1.0_f64, f64::max);
    let threshold = tol * scale;
    let mut residuals: Vec<DVector<f64>> = vectors.to_vec();
    let mut basis: Vec<DVector<f64>> = Vec::new();

    while basis.len() < dim {
        let mut best: Option<(usize, f64)> = None;
        for (i, r) in residuals.iter().enumerate() {
            let n = r.norm();
            if n > threshold && best.is_none_or(|(_, b)| n > b) {
                best = Some((i, n));
            }
        }
        let Some((idx, norm)) = best else { break };
        let mut q = &residuals[idx] / norm;
        for b in &basis {
            let c = b.dot(&q);
            q -= b * c;
        }
        let n = q.norm();
        if n <= f64::EPSILON {
            residuals[idx].fill(0.0);
            continue;
        }
        q /= n;
        for r in residuals.iter_mut() {
            let c = q.dot(r);
            *r -= &q * c;
        }
        residuals[idx].fill(0.0);
        basis.push(q);
    }

    if basis.len() == dim {
        return DMatrix::identity(dim, dim);
    }
    if basis.is_empty() {
        return DMatrix::zeros(dim, 0);
    }
    DMatrix::from_columns(&basis)
}

pub(crate) fn rank(vectors: &[DVector<f64>], dim: usize, tol: f64) -> usize {
    span_basis(vectors, dim, tol).ncols()
}

pub(crate) fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0_f64, |a, &x| a.max(x.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_rank_gives_identity() {
        let v = vec![
            DVector::from_vec(vec![1.0, 1.0, 0.0]),
            DVector::from_vec(vec![0.0, 1.0, 1.0]),
            DVector::from_vec(vec![1.0, 0.0, 1.0]),
        ];
        assert_eq!(span_basis(&v, 3, 1e-9), DMatrix::identity(3, 3));
    }

    #[test]
    fn plane_in_3d() {
        let v = vec![
            DVector::from_vec(vec![1.0, 0.0, 1.0]),
            DVector::from_vec(vec![1.0, 0.0, -1.0]),
            DVector::from_vec(vec![2.0, 0.0, 0.0]),
        ];
        let q = span_basis(&v, 3, 1e-9);
        assert_eq!(q.ncols(), 2);
        let gram = q.transpose() * &q;
        assert!((gram - DMatrix::identity(2, 2)).abs().max() < 1e-12);
        for x in &v {
            let back = &q * (q.transpose() * x);
            assert!((back - x).norm() < 1e-12);
        }
    }

    #[test]
    fn zero_vectors_have_rank_zero() {
        let v = vec![DVector::zeros(4), DVector::zeros(4)];
        assert_eq!(rank(&v, 4, 1e-9), 0);
    }
}
