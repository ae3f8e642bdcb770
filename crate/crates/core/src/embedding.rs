//! Simplex embedding as a linear program.
//!
//! With cone facet matrices `H_S` (states) and `H_E` (effects), inclusion
//! bases `I_S`, `I_E` and a noise map `D`, the program is
//!
//! ```text
//! minimize r
//! s.t.  r I_E^T D I_S + (1 - r) I_E^T I_S = H_E^T sigma H_S
//!       sigma >= 0,  0 <= r <= 1
//! ```
//!
//! A feasible `sigma` factors every probability as `kappa(e) . iota(s)` with
//! `iota(s) = H_S s >= 0` and `kappa(e) = sigma^T H_E e >= 0`, from which the
//! epistemic states and response functions of a noncontextual model follow.

use indexmap::IndexMap;
use log::debug;
use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::cone::{enumerate_facets, ConeFacets};
use crate::error::{EmbeddingError, FragmentError};
use crate::fragment::{compute_inclusion_maps, GptFragment, InclusionMaps, RealVector};
use crate::linalg::max_abs;
use crate::lp::{solve, LinearProgram, LpStatus};
use crate::noise::NoiseMap;

/// Largest tolerated excursion of a response function outside `[0, 1]`
/// before it is clamped; beyond it the certificate is rejected.
const RESPONSE_SLACK: f64 = 1e-6;
/// Largest tolerated reproduction error of an extracted model.
const REPRODUCTION_LIMIT: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EmbeddingStatus {
    AlreadyEmbeddable,
    RobustUpTo(f64),
    NoEmbeddingEvenAtFullNoise,
}

impl EmbeddingStatus {
    pub fn name(&self) -> &'static str {
        match self {
            EmbeddingStatus::AlreadyEmbeddable => "AlreadyEmbeddable",
            EmbeddingStatus::RobustUpTo(_) => "RobustUpTo",
            EmbeddingStatus::NoEmbeddingEvenAtFullNoise => "NoEmbeddingEvenAtFullNoise",
        }
    }
}

/// Ontic states `0..ontic_dim`, a distribution per state label and a response
/// function per effect label.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NoncontextualModel {
    pub ontic_dim: usize,
    #[serde(rename = "mu")]
    pub epistemic_states: IndexMap<String, Vec<f64>>,
    #[serde(rename = "xi")]
    pub response_functions: IndexMap<String, Vec<f64>>,
}

impl NoncontextualModel {
    pub fn probability(&self, effect: &str, state: &str) -> Option<f64> {
        let xi = self.response_functions.get(effect)?;
        let mu = self.epistemic_states.get(state)?;
        Some(xi.iter().zip(mu).map(|(a, b)| a * b).sum())
    }

    /// Largest `|sum_i xi(i) mu(i) - <e, s>|` over the pairs of `f`.
    pub fn max_reproduction_error(&self, f: &GptFragment) -> f64 {
        let mut worst = 0.0_f64;
        for (el, e) in f.effects() {
            for (sl, s) in f.states() {
                let got = self.probability(el, sl).unwrap_or(f64::NAN);
                let err = (got - e.dot(s)).abs();
                worst = if err.is_nan() { f64::INFINITY } else { worst.max(err) };
            }
        }
        worst
    }

    /// Checks normalization and range constraints; `Err` names the first
    /// offending entry.
    pub fn check(&self, unit: &str, zero: &str, sum_tol: f64, entry_tol: f64) -> Result<(), String> {
        for (l, mu) in &self.epistemic_states {
            if mu.len() != self.ontic_dim {
                return Err(format!("mu[{l}] has {} entries", mu.len()));
            }
            if let Some(x) = mu.iter().find(|&&x| x < -entry_tol) {
                return Err(format!("mu[{l}] has negative entry {x}"));
            }
            let s: f64 = mu.iter().sum();
            if (s - 1.0).abs() > sum_tol {
                return Err(format!("mu[{l}] sums to {s}"));
            }
        }
        for (l, xi) in &self.response_functions {
            if xi.len() != self.ontic_dim {
                return Err(format!("xi[{l}] has {} entries", xi.len()));
            }
            if let Some(x) = xi.iter().find(|&&x| x < -entry_tol || x > 1.0 + entry_tol) {
                return Err(format!("xi[{l}] has entry {x} outside [0,1]"));
            }
        }
        if let Some(xi) = self.response_functions.get(unit) {
            if xi.iter().any(|&x| (x - 1.0).abs() > entry_tol) {
                return Err("unit response is not identically one".into());
            }
        }
        if let Some(xi) = self.response_functions.get(zero) {
            if xi.iter().any(|&x| x.abs() > entry_tol) {
                return Err("zero response is not identically zero".into());
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct EmbeddingSolution {
    pub r_min: f64,
    pub status: EmbeddingStatus,
    /// `n_E x n_S` certificate; absent when no embedding exists.
    pub sigma: Option<DMatrix<f64>>,
    pub model: Option<NoncontextualModel>,
    pub state_facets: ConeFacets,
    pub effect_facets: ConeFacets,
    pub lp_iterations: usize,
}

impl EmbeddingSolution {
    /// Largest entry of `|r I_E^T D I_S + (1-r) I_E^T I_S - H_E^T sigma H_S|`.
    pub fn residual(&self, f: &GptFragment, noise: &NoiseMap, tol: f64) -> Option<f64> {
        let sigma = self.sigma.as_ref()?;
        let maps = compute_inclusion_maps(f, tol);
        let hs = coord_normals(&self.state_facets);
        let he = coord_normals(&self.effect_facets);
        let target = noisy_gram(&maps, noise, self.r_min);
        Some(max_abs(&(target - he.transpose() * sigma * hs)))
    }
}

/// Facet normals expressed in the coordinates the cone was enumerated from.
fn coord_normals(h: &ConeFacets) -> DMatrix<f64> {
    &h.normals * h.basis.transpose()
}

/// `(1 - r) I_E^T I_S + r I_E^T D I_S`.
fn noisy_gram(maps: &InclusionMaps, noise: &NoiseMap, r: f64) -> DMatrix<f64> {
    let g = maps.effect_basis.transpose() * &maps.state_basis;
    let gd = maps.effect_basis.transpose() * noise.matrix() * &maps.state_basis;
    g * (1.0 - r) + gd * r
}

/// State and effect cone facets in inclusion-map coordinates. The zero
/// effect is not a generator.
pub fn fragment_facets(
    f: &GptFragment,
    maps: &InclusionMaps,
    tol: f64,
) -> Result<(ConeFacets, ConeFacets), EmbeddingError> {
    let states: Vec<RealVector> = maps.state_coords.iter().map(RealVector::from_dvector).collect();
    let zero = f.effect_index(f.zero_label());
    let effects: Vec<RealVector> = maps
        .effect_coords
        .iter()
        .enumerate()
        .filter(|(i, _)| Some(*i) != zero)
        .map(|(_, c)| RealVector::from_dvector(c))
        .collect();
    let hs = enumerate_facets(&states, tol)?;
    let he = enumerate_facets(&effects, tol)?;
    Ok((hs, he))
}

fn check_noise(f: &GptFragment, noise: &NoiseMap, tol: f64) -> Result<(), FragmentError> {
    let m = noise.matrix();
    let d = f.ambient_dim();
    if m.nrows() != d || m.ncols() != d {
        return Err(FragmentError::NoiseDimension {
            rows: m.nrows(),
            cols: m.ncols(),
            dim: d,
        });
    }
    let deviation = noise.unit_deviation(f.unit());
    if deviation > tol {
        return Err(FragmentError::NoiseDoesNotFixUnit { deviation });
    }
    Ok(())
}

struct Layout {
    hs: DMatrix<f64>,
    he: DMatrix<f64>,
}

impl Layout {
    fn new(maps: &InclusionMaps, hs: &ConeFacets, he: &ConeFacets) -> Result<Self, EmbeddingError> {
        if hs.basis.nrows() != maps.state_span_dim() {
            return Err(EmbeddingError::Assembly(format!(
                "state facets live in dimension {}, state span has dimension {}",
                hs.basis.nrows(),
                maps.state_span_dim()
            )));
        }
        if he.basis.nrows() != maps.effect_span_dim() {
            return Err(EmbeddingError::Assembly(format!(
                "effect facets live in dimension {}, effect span has dimension {}",
                he.basis.nrows(),
                maps.effect_span_dim()
            )));
        }
        Ok(Layout {
            hs: coord_normals(hs),
            he: coord_normals(he),
        })
    }

    /// Coefficient matrix of `vec(H_E^T sigma H_S)` as a function of
    /// `vec(sigma)`, rows indexed by `(a, b)` over the effect x state span.
    fn sigma_block(&self) -> DMatrix<f64> {
        let (ne, ke) = self.he.shape();
        let (ns, ks) = self.hs.shape();
        DMatrix::from_fn(ke * ks, ne * ns, |row, col| {
            let (a, b) = (row / ks, row % ks);
            let (m, n) = (col / ns, col % ns);
            self.he[(m, a)] * self.hs[(n, b)]
        })
    }
}

/// Variables `(r, vec(sigma))` with `sigma` row-major over
/// effect-facets x state-facets; objective `r`; `r <= 1`.
pub fn assemble_embedding_lp(
    f: &GptFragment,
    maps: &InclusionMaps,
    state_facets: &ConeFacets,
    effect_facets: &ConeFacets,
    noise: &NoiseMap,
) -> Result<LinearProgram, EmbeddingError> {
    let d = f.ambient_dim();
    if noise.matrix().shape() != (d, d) {
        return Err(EmbeddingError::Assembly(format!(
            "noise matrix is {:?}, fragment dimension is {d}",
            noise.matrix().shape()
        )));
    }
    let layout = Layout::new(maps, state_facets, effect_facets)?;
    let block = layout.sigma_block();
    let g = maps.effect_basis.transpose() * &maps.state_basis;
    let gd = maps.effect_basis.transpose() * noise.matrix() * &maps.state_basis;
    let ks = g.ncols();
    let rows = block.nrows();
    let nsig = block.ncols();

    let mut a = DMatrix::zeros(rows, 1 + nsig);
    a.view_mut((0, 1), (rows, nsig)).copy_from(&block);
    let mut rhs = vec![0.0; rows];
    for row in 0..rows {
        let (ai, bi) = (row / ks, row % ks);
        a[(row, 0)] = -(gd[(ai, bi)] - g[(ai, bi)]);
        rhs[row] = g[(ai, bi)];
    }
    let mut objective = vec![0.0; 1 + nsig];
    objective[0] = 1.0;
    let mut upper = vec![None; 1 + nsig];
    upper[0] = Some(1.0);
    Ok(LinearProgram::new(objective, a, rhs)?.with_upper_bounds(upper)?)
}

/// Least noise weight at which `f` mixed with `noise` becomes simplex-embeddable.
pub fn min_noise_for_embedding(
    f: &GptFragment,
    noise: &NoiseMap,
    tol: f64,
) -> Result<EmbeddingSolution, EmbeddingError> {
    check_noise(f, noise, tol)?;
    let maps = compute_inclusion_maps(f, tol);
    let (hs, he) = fragment_facets(f, &maps, tol)?;
    let lp = assemble_embedding_lp(f, &maps, &hs, &he, noise)?;
    let sol = solve(&lp, tol)?;
    debug!(
        "embedding lp: {} vars, {} rows, {:?} after {} pivots",
        lp.n_vars(),
        lp.n_constraints(),
        sol.status,
        sol.iterations
    );
    match sol.status {
        LpStatus::Optimal => {}
        LpStatus::Infeasible if !noise.is_builtin() => {
            return Ok(EmbeddingSolution {
                r_min: 1.0,
                status: EmbeddingStatus::NoEmbeddingEvenAtFullNoise,
                sigma: None,
                model: None,
                state_facets: hs,
                effect_facets: he,
                lp_iterations: sol.iterations,
            });
        }
        LpStatus::Infeasible => {
            return Err(EmbeddingError::InternalConsistency(
                "fully noisy fragment was not embeddable under a built-in noise map".into(),
            ));
        }
        LpStatus::Unbounded => {
            return Err(EmbeddingError::InternalConsistency(
                "embedding program reported unbounded".into(),
            ));
        }
    }

    let r_min = sol.x[0].clamp(0.0, 1.0);
    let ne = he.n_facets();
    let ns = hs.n_facets();
    let sigma = DMatrix::from_fn(ne, ns, |m, n| sol.x[1 + m * ns + n]);
    let model = extract_model(f, &maps, &hs, &he, &sigma, r_min, noise, tol)?;
    let status = if r_min <= tol {
        EmbeddingStatus::AlreadyEmbeddable
    } else {
        EmbeddingStatus::RobustUpTo(r_min)
    };
    Ok(EmbeddingSolution {
        r_min,
        status,
        sigma: Some(sigma),
        model: Some(model),
        state_facets: hs,
        effect_facets: he,
        lp_iterations: sol.iterations,
    })
}

/// Builds the noncontextual model certified by `sigma` at noise weight `r`
/// and checks it against the `r`-noisy statistics.
#[allow(clippy::too_many_arguments)]
pub fn extract_model(
    f: &GptFragment,
    maps: &InclusionMaps,
    state_facets: &ConeFacets,
    effect_facets: &ConeFacets,
    sigma: &DMatrix<f64>,
    r: f64,
    noise: &NoiseMap,
    tol: f64,
) -> Result<NoncontextualModel, EmbeddingError> {
    let layout = Layout::new(maps, state_facets, effect_facets)?;
    if sigma.shape() != (layout.he.nrows(), layout.hs.nrows()) {
        return Err(EmbeddingError::Assembly(format!(
            "sigma is {:?}, expected {}x{}",
            sigma.shape(),
            layout.he.nrows(),
            layout.hs.nrows()
        )));
    }
    let iota: Vec<DVector<f64>> = maps.state_coords.iter().map(|c| &layout.hs * c).collect();
    let kappa: Vec<DVector<f64>> = maps
        .effect_coords
        .iter()
        .map(|c| sigma.tr_mul(&(&layout.he * c)))
        .collect();
    let ui = f.effect_index(f.unit_label()).expect("unit label");
    let weights = &kappa[ui];
    let support: Vec<usize> = (0..weights.len()).filter(|&i| weights[i] > tol).collect();

    let mut epistemic_states = IndexMap::new();
    for ((label, _), iota_s) in f.states().iter().zip(&iota) {
        let mut mu = Vec::with_capacity(support.len());
        for &i in &support {
            let v = weights[i] * iota_s[i];
            if v < -tol {
                return Err(EmbeddingError::CertificateCorruption(format!(
                    "negative weight {v:.3e} for state '{label}' on ontic state {i}"
                )));
            }
            mu.push(v.max(0.0));
        }
        epistemic_states.insert(label.clone(), mu);
    }

    let mut response_functions = IndexMap::new();
    for ((label, _), kappa_e) in f.effects().iter().zip(&kappa) {
        let mut xi = Vec::with_capacity(support.len());
        for &i in &support {
            let v = kappa_e[i] / weights[i];
            if !(-RESPONSE_SLACK..=1.0 + RESPONSE_SLACK).contains(&v) {
                return Err(EmbeddingError::CertificateCorruption(format!(
                    "response {v:.6} of effect '{label}' on ontic state {i} is outside [0,1]"
                )));
            }
            xi.push(v.clamp(0.0, 1.0));
        }
        response_functions.insert(label.clone(), xi);
    }

    let model = NoncontextualModel {
        ontic_dim: support.len(),
        epistemic_states,
        response_functions,
    };

    let noisy = crate::fragment::apply_noise_to_effects(f, noise, r, f64::INFINITY)?;
    let err = model.max_reproduction_error(&noisy);
    if err > REPRODUCTION_LIMIT {
        return Err(EmbeddingError::CertificateCorruption(format!(
            "model reproduces the statistics only to {err:.3e}"
        )));
    }
    Ok(model)
}

/// Feasibility of the embedding program with the noise weight fixed at `r`.
pub fn embeddable_at(
    f: &GptFragment,
    noise: &NoiseMap,
    r: f64,
    tol: f64,
) -> Result<bool, EmbeddingError> {
    if !(0.0..=1.0).contains(&r) {
        return Err(FragmentError::MixingWeight(r).into());
    }
    check_noise(f, noise, tol)?;
    let maps = compute_inclusion_maps(f, tol);
    let (hs, he) = fragment_facets(f, &maps, tol)?;
    let layout = Layout::new(&maps, &hs, &he)?;
    let block = layout.sigma_block();
    let target = noisy_gram(&maps, noise, r);
    let ks = target.ncols();
    let rhs: Vec<f64> = (0..block.nrows())
        .map(|row| target[(row / ks, row % ks)])
        .collect();
    let lp = LinearProgram::new(vec![0.0; block.ncols()], block, rhs)?;
    Ok(solve(&lp, tol)?.status == LpStatus::Optimal)
}

/// `true` iff the noiseless fragment admits a simplex embedding.
pub fn is_simplex_embeddable(f: &GptFragment, tol: f64) -> Result<bool, EmbeddingError> {
    embeddable_at(f, &NoiseMap::identity(f.ambient_dim()), 0.0, tol)
}
