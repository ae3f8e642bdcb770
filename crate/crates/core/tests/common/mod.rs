//! Independent qubit oracle built from 2x2 density matrices and projectors.
#![allow(dead_code)]

use nalgebra::Matrix2;

pub type Op = Matrix2<f64>;

pub fn pauli_x() -> Op {
    Matrix2::new(0.0, 1.0, 1.0, 0.0)
}

pub fn pauli_z() -> Op {
    Matrix2::new(1.0, 0.0, 0.0, -1.0)
}

/// `(a I + x X + z Z) / 2`.
pub fn op(a: f64, x: f64, z: f64) -> Op {
    (Op::identity() * a + pauli_x() * x + pauli_z() * z) / 2.0
}

pub fn born(e: &Op, rho: &Op) -> f64 {
    (e * rho).trace()
}

pub fn depolarize(e: &Op, r: f64) -> Op {
    e * (1.0 - r) + Op::identity() * (r * e.trace() / 2.0)
}

/// Z-basis dephasing of an operator.
pub fn dephase_z(e: &Op, r: f64) -> Op {
    let diag = Matrix2::new(e[(0, 0)], 0.0, 0.0, e[(1, 1)]);
    e * (1.0 - r) + diag * r
}

#[derive(Clone, Copy, Debug)]
pub enum Noise {
    Depolarizing,
    DephasingZ,
}

/// Preparations `phi, psi, phi_bar, psi_bar` as density matrices.
pub fn mesd_states(theta: f64) -> [Op; 4] {
    let (s, c) = theta.sin_cos();
    [op(1.0, s, -c), op(1.0, s, c), op(1.0, -s, c), op(1.0, -s, -c)]
}

/// Outcome-0 effects of `M_phi, M_psi, M_g`.
pub fn mesd_effects(theta: f64, alpha: f64, p: f64) -> [Op; 3] {
    let (s, c) = theta.sin_cos();
    let (sa, ca) = alpha.sin_cos();
    [
        op(1.0, s, -c),
        op(1.0, s, c),
        op(1.0, -(1.0 - p) * sa, -(1.0 - p) * ca),
    ]
}

/// Data table with the effects mixed by `r`.
pub fn mesd_table(theta: f64, alpha: f64, p: f64, noise: Noise, r: f64) -> [[f64; 4]; 3] {
    let states = mesd_states(theta);
    let effects = mesd_effects(theta, alpha, p);
    let mut t = [[0.0; 4]; 3];
    for (i, e) in effects.iter().enumerate() {
        let e = match noise {
            Noise::Depolarizing => depolarize(e, r),
            Noise::DephasingZ => dephase_z(e, r),
        };
        for (j, rho) in states.iter().enumerate() {
            t[i][j] = born(&e, rho);
        }
    }
    t
}

pub fn max_table_diff(a: &[[f64; 4]; 3], b: &[[f64; 4]; 3]) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..3 {
        for j in 0..4 {
            worst = worst.max((a[i][j] - b[i][j]).abs());
        }
    }
    worst
}
