//! Linear noise maps acting on the ambient space of a fragment.
//!
//! The matrix acts on states; effects transform by its transpose. Mixing a
//! fragment with weight `r` means `s -> (1 - r) s + r N s` on the state side,
//! or equivalently `e -> (1 - r) e + r N^T e` on the effect side.

use nalgebra::DMatrix;

use crate::error::FragmentError;
use crate::fragment::{GptFragment, RealVector};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseKind {
    /// Replace every normalized state by the maximally mixed state.
    Depolarizing,
    /// Dephase along the axis at angle `eta` in the ZX plane, measured from X
    /// toward Z (`eta = pi/2` is the Z axis).
    Dephasing { eta: f64 },
    Custom,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseMap {
    kind: NoiseKind,
    matrix: DMatrix<f64>,
}

impl NoiseMap {
    /// `s_D u^T` for the fragment's maximally mixed state and unit.
    pub fn depolarizing(f: &GptFragment, tol: f64) -> Result<Self, FragmentError> {
        Ok(NoiseMap {
            kind: NoiseKind::Depolarizing,
            matrix: depolarizing_matrix(f, tol)?,
        })
    }

    pub fn dephasing(eta: f64) -> Self {
        NoiseMap {
            kind: NoiseKind::Dephasing { eta },
            matrix: dephasing_matrix(eta),
        }
    }

    /// A user-supplied square matrix. Rejected unless it fixes `unit` under
    /// the effect action.
    pub fn custom(matrix: DMatrix<f64>, unit: &RealVector, tol: f64) -> Result<Self, FragmentError> {
        if matrix.nrows() != unit.len() || matrix.ncols() != unit.len() {
            return Err(FragmentError::NoiseDimension {
                rows: matrix.nrows(),
                cols: matrix.ncols(),
                dim: unit.len(),
            });
        }
        if matrix.iter().any(|x| !x.is_finite()) {
            return Err(FragmentError::NonFinite {
                label: "noise matrix".into(),
            });
        }
        let map = NoiseMap {
            kind: NoiseKind::Custom,
            matrix,
        };
        let deviation = map.unit_deviation(unit);
        if deviation > tol {
            return Err(FragmentError::NoiseDoesNotFixUnit { deviation });
        }
        Ok(map)
    }

    pub fn identity(dim: usize) -> Self {
        NoiseMap {
            kind: NoiseKind::Custom,
            matrix: DMatrix::identity(dim, dim),
        }
    }

    pub fn kind(&self) -> NoiseKind {
        self.kind
    }

    pub fn is_builtin(&self) -> bool {
        !matches!(self.kind, NoiseKind::Custom)
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn apply(&self, v: &RealVector) -> RealVector {
        RealVector::from_dvector(&(&self.matrix * v.to_dvector()))
    }

    pub fn apply_adjoint(&self, v: &RealVector) -> RealVector {
        RealVector::from_dvector(&self.matrix.tr_mul(&v.to_dvector()))
    }

    /// `max |N^T u - u|`.
    pub fn unit_deviation(&self, unit: &RealVector) -> f64 {
        if self.matrix.nrows() != unit.len() || self.matrix.ncols() != unit.len() {
            return f64::INFINITY;
        }
        self.apply_adjoint(unit).max_abs_diff(unit)
    }

    pub fn idempotence_error(&self) -> f64 {
        (&self.matrix * &self.matrix - &self.matrix).abs().max()
    }
}

/// Dephasing along the ZX-plane axis at angle `eta`, in the `(1, X, Z)/sqrt2`
/// operator basis.
pub fn dephasing_matrix(eta: f64) -> DMatrix<f64> {
    let (s, c) = eta.sin_cos();
    DMatrix::from_row_slice(
        3,
        3,
        &[1.0, 0.0, 0.0, 0.0, c * c, c * s, 0.0, c * s, s * s],
    )
}

/// `s_D u^T` in ambient coordinates. Requires `<u, s_D> = 1`.
pub fn depolarizing_matrix(f: &GptFragment, tol: f64) -> Result<DMatrix<f64>, FragmentError> {
    let u = f.unit();
    let sd = f.maxmix();
    let norm = u.dot(sd);
    if (norm - 1.0).abs() > tol {
        return Err(FragmentError::InvalidMaxmix(norm));
    }
    Ok(sd.to_dvector() * u.to_dvector().transpose())
}
