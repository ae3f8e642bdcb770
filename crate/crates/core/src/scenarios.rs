//! The minimum-error state discrimination family in the ZX plane of a qubit.
//!
//! Vectors are components in the operator basis `(1, X, Z)/sqrt2`, so a state
//! with Bloch vector `(x, z)` is `(1, x, z)/sqrt2` and a projector onto it is
//! the same vector. Four states `psi, psi_bar, phi, phi_bar` are tilted by
//! `theta` from the Z axis; the measurements are the projectors onto them and
//! the two-outcome measurement `M_g` (effects `g_psi`, `g_phi`), rotated by
//! `alpha` from Z toward X and optionally depolarized by `p`.
//!
//! Closed-form robustness values, the symmetric data-table parameterization
//! `(s, c, epsilon)` and the noncontextuality inequality live here as
//! independent checks on the linear program.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, SQRT_2};

use indexmap::IndexMap;
use serde::Serialize;

use crate::embedding::NoncontextualModel;
use crate::error::ScenarioError;
use crate::fragment::{apply_noise_to_effects, apply_noise_to_states, GptFragment, RealVector};
use crate::noise::{NoiseKind, NoiseMap};
use crate::DEFAULT_TOL;

pub use crate::noise::{dephasing_matrix, depolarizing_matrix};

pub const PSI: &str = "psi";
pub const PSI_BAR: &str = "psi_bar";
pub const PHI: &str = "phi";
pub const PHI_BAR: &str = "phi_bar";
pub const G_PSI: &str = "g_psi";
pub const G_PHI: &str = "g_phi";
pub const UNIT: &str = "unit";
pub const ZERO: &str = "zero";

/// Below this tilt the dephasing closed form is replaced by its limit.
const THETA_GUARD: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MesdParams {
    pub theta: f64,
    pub alpha: f64,
    pub p: f64,
    pub eta: f64,
}

impl MesdParams {
    pub fn new(theta: f64) -> Self {
        MesdParams {
            theta,
            alpha: 0.0,
            p: 0.0,
            eta: FRAC_PI_2,
        }
    }

    /// `M_g` along the X axis.
    pub fn rotated(theta: f64) -> Self {
        MesdParams::new(theta).with_alpha(FRAC_PI_2)
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn with_p(mut self, p: f64) -> Self {
        self.p = p;
        self
    }

    pub fn with_eta(mut self, eta: f64) -> Self {
        self.eta = eta;
        self
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        for (name, v) in [("theta", self.theta), ("alpha", self.alpha), ("p", self.p), ("eta", self.eta)] {
            if !v.is_finite() {
                return Err(ScenarioError::InvalidParams(format!("{name} is not finite")));
            }
        }
        if !(0.0..=FRAC_PI_2).contains(&self.theta) {
            return Err(ScenarioError::InvalidParams(format!(
                "theta = {} is outside [0, pi/2]",
                self.theta
            )));
        }
        if !(0.0..=1.0).contains(&self.p) {
            return Err(ScenarioError::InvalidParams(format!(
                "p = {} is outside [0, 1]",
                self.p
            )));
        }
        Ok(())
    }

    /// The dephasing map along this scenario's axis `eta`.
    pub fn dephasing(&self) -> NoiseMap {
        NoiseMap::dephasing(self.eta)
    }
}

fn zx(x: f64, z: f64) -> RealVector {
    RealVector::new(vec![FRAC_1_SQRT_2, x * FRAC_1_SQRT_2, z * FRAC_1_SQRT_2])
}

/// The MESD fragment. Coinciding elements at the ends of the `theta` range are
/// kept under their own labels and reported as duplicates.
pub fn build_mesd(params: &MesdParams) -> Result<GptFragment, ScenarioError> {
    params.validate()?;
    let (st, ct) = params.theta.sin_cos();
    let (sa, ca) = params.alpha.sin_cos();
    let q = 1.0 - params.p;
    let states = vec![
        (PSI.to_string(), zx(st, ct)),
        (PSI_BAR.to_string(), zx(-st, -ct)),
        (PHI.to_string(), zx(st, -ct)),
        (PHI_BAR.to_string(), zx(-st, ct)),
    ];
    let mut effects = vec![
        (ZERO.to_string(), RealVector::zeros(3)),
        (UNIT.to_string(), RealVector::new(vec![SQRT_2, 0.0, 0.0])),
    ];
    effects.extend(states.iter().cloned());
    effects.push((G_PSI.to_string(), zx(q * sa, q * ca)));
    effects.push((G_PHI.to_string(), zx(-q * sa, -q * ca)));
    let f = GptFragment::new(
        3,
        states,
        effects,
        UNIT,
        ZERO,
        RealVector::new(vec![FRAC_1_SQRT_2, 0.0, 0.0]),
    )?;
    f.warn_duplicates(DEFAULT_TOL);
    Ok(f)
}

/// Both states and effects passed through the dephasing map along `eta`.
pub fn fully_dephased(f: &GptFragment, eta: f64) -> Result<GptFragment, ScenarioError> {
    let noise = NoiseMap::dephasing(eta);
    let g = apply_noise_to_states(f, &noise, 1.0, DEFAULT_TOL)?;
    Ok(apply_noise_to_effects(&g, &noise, 1.0, DEFAULT_TOL)?)
}

pub fn r_depol_min_analytic(theta: f64) -> f64 {
    let s = theta.sin();
    1.0 - 1.0 / (s * s + theta.cos())
}

pub fn r_deph_min_analytic(theta: f64) -> f64 {
    if theta.abs() < THETA_GUARD {
        return 0.5;
    }
    let s = theta.sin();
    1.0 - (1.0 - theta.cos()) / (s * s)
}

/// Closed-form robustness of the unrotated, unpolluted scenario when one
/// exists: depolarizing for `theta` in `[0, pi/2]`, Z-axis dephasing for
/// `theta` in `(0, pi/2]`.
pub fn analytic_r_min(params: &MesdParams, noise: NoiseKind) -> Option<f64> {
    if params.alpha != 0.0 || params.p != 0.0 || !(0.0..=FRAC_PI_2).contains(&params.theta) {
        return None;
    }
    match noise {
        NoiseKind::Depolarizing => Some(r_depol_min_analytic(params.theta)),
        NoiseKind::Dephasing { eta } if (eta - FRAC_PI_2).abs() <= 1e-12 && params.theta > 0.0 => {
            Some(r_deph_min_analytic(params.theta))
        }
        _ => None,
    }
}

/// Trace distance to the Z-dephased state, `sqrt2 |x-component|`.
pub fn coherence(state: &RealVector) -> f64 {
    SQRT_2 * state[1].abs()
}

pub fn p_threshold(theta: f64) -> f64 {
    1.0 - theta.cos()
}

pub fn coherence_bound(p: f64) -> f64 {
    (p * (2.0 - p)).sqrt()
}

pub const TABLE_ROWS: [&str; 3] = ["M_phi", "M_psi", "M_g"];
pub const TABLE_COLS: [&str; 4] = ["P_phi", "P_psi", "P_phi_bar", "P_psi_bar"];
const ROW_EFFECTS: [&str; 3] = [PHI, PSI, G_PHI];
const COL_STATES: [&str; 4] = [PHI, PSI, PHI_BAR, PSI_BAR];

/// Outcome-0 probabilities, rows `M_phi, M_psi, M_g`, columns
/// `P_phi, P_psi, P_phi_bar, P_psi_bar`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DataTable {
    pub probabilities: [[f64; 4]; 3],
}

impl DataTable {
    pub fn new(probabilities: [[f64; 4]; 3], tol: f64) -> Result<Self, ScenarioError> {
        for (i, row) in probabilities.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if !(v >= -tol && v <= 1.0 + tol) {
                    return Err(ScenarioError::Precondition(format!(
                        "entry ({}, {}) = {v} is not a probability",
                        TABLE_ROWS[i], TABLE_COLS[j]
                    )));
                }
            }
        }
        Ok(DataTable { probabilities })
    }

    /// The symmetric pattern determined by `(s, c, epsilon)`.
    pub fn symmetric(s: f64, c: f64, epsilon: f64) -> Self {
        DataTable {
            probabilities: [
                [1.0 - epsilon, c, epsilon, 1.0 - c],
                [c, 1.0 - epsilon, 1.0 - c, epsilon],
                [s, 1.0 - s, 1.0 - s, s],
            ],
        }
    }

    pub fn entry(&self, row: usize, col: usize) -> f64 {
        self.probabilities[row][col]
    }

    pub fn max_abs_diff(&self, other: &DataTable) -> f64 {
        let mut worst = 0.0_f64;
        for i in 0..3 {
            for j in 0..4 {
                worst = worst.max((self.probabilities[i][j] - other.probabilities[i][j]).abs());
            }
        }
        worst
    }
}

/// Born-rule table of a fragment carrying the MESD labels.
pub fn data_table(f: &GptFragment) -> Result<DataTable, ScenarioError> {
    let mut probabilities = [[0.0; 4]; 3];
    for (i, e) in ROW_EFFECTS.iter().enumerate() {
        for (j, s) in COL_STATES.iter().enumerate() {
            probabilities[i][j] = f.raw_probability(e, s)?;
        }
    }
    DataTable::new(probabilities, DEFAULT_TOL)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sce {
    pub s: f64,
    pub c: f64,
    pub epsilon: f64,
    /// Largest deviation of the table from the symmetric pattern.
    pub residual: f64,
}

pub fn extract_sce(t: &DataTable, tol: f64) -> Result<Sce, ScenarioError> {
    let s = t.entry(2, 0);
    let c = t.entry(1, 0);
    let epsilon = t.entry(0, 2);
    let residual = t.max_abs_diff(&DataTable::symmetric(s, c, epsilon));
    if residual > tol {
        return Err(ScenarioError::NotParameterizable { residual });
    }
    Ok(Sce { s, c, epsilon, residual })
}

/// `s <= 1 - (c - epsilon)/2`.
pub fn nc_inequality_holds(s: f64, c: f64, epsilon: f64) -> bool {
    s <= 1.0 - (c - epsilon) / 2.0
}

/// `(s, c, epsilon)` with the projective effects depolarized by `r`.
pub fn depolarized_sce(theta: f64, r: f64) -> (f64, f64, f64) {
    let st = theta.sin();
    (
        0.5 + 0.5 * (1.0 - r) * theta.cos(),
        (1.0 - r) * st * st + r / 2.0,
        r / 2.0,
    )
}

/// `(s, c, epsilon)` with the projective effects Z-dephased by `r`. The
/// dephased part of a projector onto a tilted state still overlaps its
/// neighbours, so `c` and `epsilon` both pick up `r sin^2(theta) / 2`; their
/// difference `(1 - r) sin^2(theta)` equals the depolarized one.
pub fn dephased_sce(theta: f64, r: f64) -> (f64, f64, f64) {
    let s2 = theta.sin().powi(2);
    (
        0.5 * (1.0 + theta.cos()),
        (1.0 - r / 2.0) * s2,
        r * s2 / 2.0,
    )
}

/// Two-outcome model in the Z basis for states without X component. Entry
/// `i` of either vector is `<i| . |i>` read from the `(1, Z)` components.
pub fn incoherent_model(
    states: &[(String, RealVector)],
    effects: &[(String, RealVector)],
    tol: f64,
) -> Result<NoncontextualModel, ScenarioError> {
    let diag = |label: &str, v: &RealVector| -> Result<Vec<f64>, ScenarioError> {
        if v.len() != 3 {
            return Err(ScenarioError::Precondition(format!(
                "'{label}' has {} components, expected 3",
                v.len()
            )));
        }
        Ok(vec![(v[0] + v[2]) * FRAC_1_SQRT_2, (v[0] - v[2]) * FRAC_1_SQRT_2])
    };
    let mut epistemic_states = IndexMap::new();
    for (label, v) in states {
        let mu = diag(label, v)?;
        if v[1].abs() > tol {
            return Err(ScenarioError::Precondition(format!(
                "state '{label}' has X component {}",
                v[1]
            )));
        }
        epistemic_states.insert(label.clone(), mu);
    }
    let mut response_functions = IndexMap::new();
    for (label, v) in effects {
        response_functions.insert(label.clone(), diag(label, v)?);
    }
    Ok(NoncontextualModel {
        ontic_dim: 2,
        epistemic_states,
        response_functions,
    })
}
