//! Accessible GPT fragments: labeled state and effect vectors with a unit
//! effect, a zero effect and a designated maximally mixed state.

use std::fmt;
use std::sync::OnceLock;

use indexmap::IndexMap;
use log::warn;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;

use crate::error::FragmentError;
use crate::linalg::{rank, span_basis};
use crate::noise::NoiseMap;
use crate::numfmt::json_number;
use crate::DEFAULT_TOL;

/// Finite real vector in the raw ambient basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RealVector(Vec<f64>);

impl RealVector {
    pub fn new(entries: Vec<f64>) -> Self {
        RealVector(entries)
    }

    pub fn zeros(dim: usize) -> Self {
        RealVector(vec![0.0; dim])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }

    pub fn dot(&self, other: &RealVector) -> f64 {
        debug_assert_eq!(self.len(), other.len());
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn scale(&self, k: f64) -> RealVector {
        RealVector(self.0.iter().map(|x| x * k).collect())
    }

    /// `a * self + b * other`.
    pub fn combine(&self, a: f64, other: &RealVector, b: f64) -> RealVector {
        RealVector(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(x, y)| a * x + b * y)
                .collect(),
        )
    }

    pub fn max_abs_diff(&self, other: &RealVector) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn to_dvector(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.0)
    }

    pub fn from_dvector(v: &DVector<f64>) -> Self {
        RealVector(v.iter().copied().collect())
    }
}

impl From<Vec<f64>> for RealVector {
    fn from(v: Vec<f64>) -> Self {
        RealVector(v)
    }
}

impl std::ops::Index<usize> for RealVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

#[derive(Debug, Clone)]
pub struct GptFragment {
    ambient_dim: usize,
    states: Vec<(String, RealVector)>,
    effects: Vec<(String, RealVector)>,
    unit: String,
    zero: String,
    maxmix: RealVector,
    maps: OnceLock<InclusionMaps>,
}

impl PartialEq for GptFragment {
    fn eq(&self, other: &Self) -> bool {
        self.ambient_dim == other.ambient_dim
            && self.states == other.states
            && self.effects == other.effects
            && self.unit == other.unit
            && self.zero == other.zero
            && self.maxmix == other.maxmix
    }
}

impl GptFragment {
    /// Builds a fragment after structural checks. `unit` and `zero` name
    /// entries of `effects`. Probability-rule invariants are checked separately
    /// by [`validate_fragment`].
    pub fn new(
        ambient_dim: usize,
        states: Vec<(String, RealVector)>,
        effects: Vec<(String, RealVector)>,
        unit: &str,
        zero: &str,
        maxmix: RealVector,
    ) -> Result<Self, FragmentError> {
        if ambient_dim == 0 {
            return Err(FragmentError::ZeroDimension);
        }
        if states.is_empty() {
            return Err(FragmentError::NoStates);
        }
        if effects.is_empty() {
            return Err(FragmentError::NoEffects);
        }
        let check = |label: &str, v: &RealVector| {
            if v.len() != ambient_dim {
                return Err(FragmentError::DimensionMismatch {
                    label: label.to_string(),
                    expected: ambient_dim,
                    found: v.len(),
                });
            }
            if !v.is_finite() {
                return Err(FragmentError::NonFinite {
                    label: label.to_string(),
                });
            }
            Ok(())
        };
        for (kind, list) in [("state", &states), ("effect", &effects)] {
            let mut seen = std::collections::HashSet::new();
            for (label, v) in list.iter() {
                check(label, v)?;
                if !seen.insert(label.as_str()) {
                    return Err(FragmentError::DuplicateLabel {
                        kind,
                        label: label.clone(),
                    });
                }
            }
        }
        check("maxmix", &maxmix)?;
        for name in [unit, zero] {
            if !effects.iter().any(|(l, _)| l == name) {
                return Err(FragmentError::UnknownLabel {
                    kind: "effect",
                    label: name.to_string(),
                });
            }
        }
        Ok(GptFragment {
            ambient_dim,
            states,
            effects,
            unit: unit.to_string(),
            zero: zero.to_string(),
            maxmix,
            maps: OnceLock::new(),
        })
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn states(&self) -> &[(String, RealVector)] {
        &self.states
    }

    pub fn effects(&self) -> &[(String, RealVector)] {
        &self.effects
    }

    pub fn unit_label(&self) -> &str {
        &self.unit
    }

    pub fn zero_label(&self) -> &str {
        &self.zero
    }

    pub fn unit(&self) -> &RealVector {
        self.effect(&self.unit).expect("unit label checked at construction")
    }

    pub fn zero(&self) -> &RealVector {
        self.effect(&self.zero).expect("zero label checked at construction")
    }

    pub fn maxmix(&self) -> &RealVector {
        &self.maxmix
    }

    pub fn state(&self, label: &str) -> Option<&RealVector> {
        self.state_index(label).map(|i| &self.states[i].1)
    }

    pub fn effect(&self, label: &str) -> Option<&RealVector> {
        self.effect_index(label).map(|i| &self.effects[i].1)
    }

    pub fn state_index(&self, label: &str) -> Option<usize> {
        self.states.iter().position(|(l, _)| l == label)
    }

    pub fn effect_index(&self, label: &str) -> Option<usize> {
        self.effects.iter().position(|(l, _)| l == label)
    }

    /// Raw ambient inner product `<effect, state>`.
    pub fn raw_probability(&self, effect: &str, state: &str) -> Result<f64, FragmentError> {
        let e = self.effect(effect).ok_or_else(|| FragmentError::UnknownLabel {
            kind: "effect",
            label: effect.to_string(),
        })?;
        let s = self.state(state).ok_or_else(|| FragmentError::UnknownLabel {
            kind: "state",
            label: state.to_string(),
        })?;
        Ok(e.dot(s))
    }

    /// Inclusion maps at [`DEFAULT_TOL`], computed once per fragment.
    pub fn inclusion_maps(&self) -> &InclusionMaps {
        self.maps
            .get_or_init(|| compute_inclusion_maps(self, DEFAULT_TOL))
    }

    /// Groups of state labels whose vectors coincide within `tol` (max-abs).
    pub fn duplicate_states(&self, tol: f64) -> Vec<Vec<String>> {
        duplicate_groups(&self.states, tol)
    }

    pub fn duplicate_effects(&self, tol: f64) -> Vec<Vec<String>> {
        duplicate_groups(&self.effects, tol)
    }

    /// Logs a warning for every group of coinciding states or effects.
    pub fn warn_duplicates(&self, tol: f64) {
        for (kind, groups) in [
            ("states", self.duplicate_states(tol)),
            ("effects", self.duplicate_effects(tol)),
        ] {
            for g in groups {
                warn!("coinciding {kind} {g:?} are merged for cone processing");
            }
        }
    }

    pub(crate) fn with_vectors(
        &self,
        states: Vec<(String, RealVector)>,
        effects: Vec<(String, RealVector)>,
    ) -> GptFragment {
        GptFragment {
            ambient_dim: self.ambient_dim,
            states,
            effects,
            unit: self.unit.clone(),
            zero: self.zero.clone(),
            maxmix: self.maxmix.clone(),
            maps: OnceLock::new(),
        }
    }

    pub fn from_json_str(s: &str) -> Result<Self, FragmentError> {
        let raw: FragmentJson = serde_json::from_str(s)?;
        GptFragment::new(
            raw.ambient_dim,
            raw.states.into_iter().map(|(l, v)| (l, RealVector(v))).collect(),
            raw.effects
                .into_iter()
                .map(|(l, v)| (l, RealVector(v)))
                .collect(),
            &raw.unit,
            &raw.zero,
            RealVector(raw.maxmix),
        )
    }

    /// JSON with every number written to 17 significant digits.
    pub fn to_json_string(&self) -> String {
        let vec_raw = |v: &RealVector| -> Box<RawValue> {
            let body = v
                .as_slice()
                .iter()
                .map(|&x| json_number(x))
                .collect::<Vec<_>>()
                .join(", ");
            RawValue::from_string(format!("[{body}]")).expect("valid JSON array")
        };
        let map = |list: &[(String, RealVector)]| -> IndexMap<String, Box<RawValue>> {
            list.iter().map(|(l, v)| (l.clone(), vec_raw(v))).collect()
        };
        let out = FragmentJsonOut {
            ambient_dim: self.ambient_dim,
            states: map(&self.states),
            effects: map(&self.effects),
            unit: &self.unit,
            zero: &self.zero,
            maxmix: vec_raw(&self.maxmix),
        };
        serde_json::to_string_pretty(&out).expect("serializable fragment")
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FragmentJson {
    ambient_dim: usize,
    states: IndexMap<String, Vec<f64>>,
    effects: IndexMap<String, Vec<f64>>,
    unit: String,
    zero: String,
    maxmix: Vec<f64>,
}

#[derive(Serialize)]
struct FragmentJsonOut<'a> {
    ambient_dim: usize,
    states: IndexMap<String, Box<RawValue>>,
    effects: IndexMap<String, Box<RawValue>>,
    unit: &'a str,
    zero: &'a str,
    maxmix: Box<RawValue>,
}

fn duplicate_groups(list: &[(String, RealVector)], tol: f64) -> Vec<Vec<String>> {
    let mut assigned = vec![false; list.len()];
    let mut groups = Vec::new();
    for i in 0..list.len() {
        if assigned[i] {
            continue;
        }
        let mut g = vec![list[i].0.clone()];
        for j in i + 1..list.len() {
            if !assigned[j] && list[i].1.max_abs_diff(&list[j].1) <= tol {
                assigned[j] = true;
                g.push(list[j].0.clone());
            }
        }
        if g.len() > 1 {
            groups.push(g);
        }
    }
    groups
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    /// `<u, s> != 1` for a state.
    UnitNormalization { state: String, value: f64 },
    /// `<e, s>` outside `[0, 1]`.
    ProbabilityOutOfRange {
        effect: String,
        state: String,
        value: f64,
    },
    /// `<u, s_D> != 1`.
    MaxmixNormalization { value: f64 },
    /// The designated zero effect is not the origin.
    NonzeroZeroEffect { norm: f64 },
}

impl Violation {
    /// Signed distance from the allowed range.
    pub fn slack(&self) -> f64 {
        match self {
            Violation::UnitNormalization { value, .. } | Violation::MaxmixNormalization { value } => {
                value - 1.0
            }
            Violation::ProbabilityOutOfRange { value, .. } => {
                if *value < 0.0 {
                    *value
                } else {
                    value - 1.0
                }
            }
            Violation::NonzeroZeroEffect { norm } => *norm,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::UnitNormalization { state, value } => {
                write!(f, "⟨u,s⟩={value}≠1 for state '{state}'")
            }
            Violation::ProbabilityOutOfRange {
                effect,
                state,
                value,
            } => write!(f, "⟨{effect},{state}⟩={value} outside [0,1]"),
            Violation::MaxmixNormalization { value } => write!(f, "⟨u,s_D⟩={value}≠1"),
            Violation::NonzeroZeroEffect { norm } => {
                write!(f, "zero effect has norm {norm}")
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    /// Non-fatal findings, currently only an affine span of the states that
    /// contains the origin.
    pub warnings: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn validate_fragment(f: &GptFragment, tol: f64) -> ValidationReport {
    let mut report = ValidationReport::default();
    let u = f.unit();
    for (label, s) in f.states() {
        let value = u.dot(s);
        if (value - 1.0).abs() > tol {
            report.violations.push(Violation::UnitNormalization {
                state: label.clone(),
                value,
            });
        }
    }
    for (el, e) in f.effects() {
        for (sl, s) in f.states() {
            let value = e.dot(s);
            if value < -tol || value > 1.0 + tol {
                report.violations.push(Violation::ProbabilityOutOfRange {
                    effect: el.clone(),
                    state: sl.clone(),
                    value,
                });
            }
        }
    }
    let m = u.dot(f.maxmix());
    if (m - 1.0).abs() > tol {
        report
            .violations
            .push(Violation::MaxmixNormalization { value: m });
    }
    let zn = f.zero().norm();
    if zn > tol {
        report.violations.push(Violation::NonzeroZeroEffect { norm: zn });
    }
    if origin_in_affine_span(f, tol) {
        report
            .warnings
            .push("the affine span of the states contains the origin".to_string());
    }
    report
}

/// `0` lies in the affine span of the states iff `(0, 1)` lies in the column
/// span of the states stacked over a row of ones.
fn origin_in_affine_span(f: &GptFragment, tol: f64) -> bool {
    let d = f.ambient_dim();
    let lifted: Vec<DVector<f64>> = f
        .states()
        .iter()
        .map(|(_, s)| {
            let mut v = DVector::zeros(d + 1);
            v.rows_mut(0, d).copy_from(&s.to_dvector());
            v[d] = 1.0;
            v
        })
        .collect();
    let base = rank(&lifted, d + 1, tol);
    let mut with_target = lifted;
    let mut target = DVector::zeros(d + 1);
    target[d] = 1.0;
    with_target.push(target);
    rank(&with_target, d + 1, tol) == base
}

/// Orthonormal bases of the state span and the effect span, both expressed in
/// the ambient coordinates, with the coordinates of every element.
#[derive(Debug, Clone, PartialEq)]
pub struct InclusionMaps {
    /// `d x k_states`, orthonormal columns spanning the states.
    pub state_basis: DMatrix<f64>,
    /// `d x k_effects`, orthonormal columns spanning the effects.
    pub effect_basis: DMatrix<f64>,
    /// Orthonormal basis of the sum of both spans.
    pub common_basis: DMatrix<f64>,
    pub common_dim: usize,
    /// Coordinates of each state (fragment order) in `state_basis`.
    pub state_coords: Vec<DVector<f64>>,
    /// Coordinates of each effect (fragment order) in `effect_basis`.
    pub effect_coords: Vec<DVector<f64>>,
}

impl InclusionMaps {
    pub fn state_span_dim(&self) -> usize {
        self.state_basis.ncols()
    }

    pub fn effect_span_dim(&self) -> usize {
        self.effect_basis.ncols()
    }

    /// Largest reconstruction error `|I * coords - v|` over all elements.
    pub fn reconstruction_error(&self, f: &GptFragment) -> f64 {
        let st = f
            .states()
            .iter()
            .zip(&self.state_coords)
            .map(|((_, v), c)| (&self.state_basis * c - v.to_dvector()).norm());
        let ef = f
            .effects()
            .iter()
            .zip(&self.effect_coords)
            .map(|((_, v), c)| (&self.effect_basis * c - v.to_dvector()).norm());
        st.chain(ef).fold(0.0, f64::max)
    }
}

pub fn compute_inclusion_maps(f: &GptFragment, tol: f64) -> InclusionMaps {
    let d = f.ambient_dim();
    let states: Vec<DVector<f64>> = f.states().iter().map(|(_, v)| v.to_dvector()).collect();
    let effects: Vec<DVector<f64>> = f.effects().iter().map(|(_, v)| v.to_dvector()).collect();
    let state_basis = span_basis(&states, d, tol);
    let effect_basis = span_basis(&effects, d, tol);
    let all: Vec<DVector<f64>> = states.iter().chain(&effects).cloned().collect();
    let common_basis = span_basis(&all, d, tol);
    let state_coords = states.iter().map(|v| state_basis.tr_mul(v)).collect();
    let effect_coords = effects.iter().map(|v| effect_basis.tr_mul(v)).collect();
    InclusionMaps {
        common_dim: common_basis.ncols(),
        state_basis,
        effect_basis,
        common_basis,
        state_coords,
        effect_coords,
    }
}

/// Probability through the inclusion maps, `<I_E c_e, I_S c_s>`.
pub fn pair_probability(
    f: &GptFragment,
    maps: &InclusionMaps,
    effect: &str,
    state: &str,
) -> Result<f64, FragmentError> {
    let ei = f.effect_index(effect).ok_or_else(|| FragmentError::UnknownLabel {
        kind: "effect",
        label: effect.to_string(),
    })?;
    let si = f.state_index(state).ok_or_else(|| FragmentError::UnknownLabel {
        kind: "state",
        label: state.to_string(),
    })?;
    let e = &maps.effect_basis * &maps.effect_coords[ei];
    let s = &maps.state_basis * &maps.state_coords[si];
    Ok(e.dot(&s))
}

fn check_noise(f: &GptFragment, noise: &NoiseMap, r: f64, tol: f64) -> Result<(), FragmentError> {
    if !(0.0..=1.0).contains(&r) || !r.is_finite() {
        return Err(FragmentError::MixingWeight(r));
    }
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

/// Replaces every effect `e` by `(1 - r) e + r N^T e`.
///
/// Effects transform by the adjoint so that `<N^T e, s> = <e, N s>`; for the
/// symmetric built-in maps this is `N e`.
pub fn apply_noise_to_effects(
    f: &GptFragment,
    noise: &NoiseMap,
    r: f64,
    tol: f64,
) -> Result<GptFragment, FragmentError> {
    check_noise(f, noise, r, tol)?;
    let effects = f
        .effects()
        .iter()
        .map(|(l, e)| {
            let noisy = noise.apply_adjoint(e);
            (l.clone(), e.combine(1.0 - r, &noisy, r))
        })
        .collect();
    Ok(f.with_vectors(f.states().to_vec(), effects))
}

/// Replaces every state `s` by `(1 - r) s + r N s`.
pub fn apply_noise_to_states(
    f: &GptFragment,
    noise: &NoiseMap,
    r: f64,
    tol: f64,
) -> Result<GptFragment, FragmentError> {
    check_noise(f, noise, r, tol)?;
    let states = f
        .states()
        .iter()
        .map(|(l, s)| {
            let noisy = noise.apply(s);
            (l.clone(), s.combine(1.0 - r, &noisy, r))
        })
        .collect();
    Ok(f.with_vectors(states, f.effects().to_vec()))
}
