use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_3};

use nalgebra::DMatrix;
use ncx_core::scenarios::{MesdParams, PHI, PSI};
use ncx_core::{
    apply_noise_to_effects, build_mesd, compute_inclusion_maps, pair_probability,
    validate_fragment, GptFragment, NoiseMap, RealVector, Violation,
};
use proptest::prelude::*;

const TOL: f64 = 1e-9;

fn mesd(theta: f64) -> GptFragment {
    build_mesd(&MesdParams::new(theta)).unwrap()
}

fn builtins(f: &GptFragment) -> [NoiseMap; 2] {
    [NoiseMap::depolarizing(f, TOL).unwrap(), NoiseMap::dephasing(FRAC_PI_2)]
}

fn max_effect_diff(a: &GptFragment, b: &GptFragment) -> f64 {
    a.effects()
        .iter()
        .zip(b.effects())
        .map(|((_, x), (_, y))| x.max_abs_diff(y))
        .fold(0.0, f64::max)
}

#[test]
fn mesd_is_valid_with_identity_like_maps() {
    let f = mesd(FRAC_PI_3);
    assert!(validate_fragment(&f, TOL).violations.is_empty());
    let maps = compute_inclusion_maps(&f, TOL);
    assert_eq!(maps.common_dim, 3);
    assert_eq!(maps.state_span_dim(), 3);
    assert_eq!(maps.effect_span_dim(), 3);
    let eye = DMatrix::<f64>::identity(3, 3);
    assert!((maps.state_basis.transpose() * &maps.state_basis - &eye).amax() < 1e-12);
}

#[test]
fn scaled_state_is_reported() {
    let f = mesd(FRAC_PI_3);
    let text = f.to_json_string();
    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    for x in v["states"]["psi"].as_array_mut().unwrap() {
        *x = serde_json::json!(x.as_f64().unwrap() * 1.5);
    }
    let g = GptFragment::from_json_str(&v.to_string()).unwrap();
    let report = validate_fragment(&g, TOL);
    let hit = report.violations.iter().find_map(|v| match v {
        Violation::UnitNormalization { state, value } if state == "psi" => Some(*value),
        _ => None,
    });
    assert!((hit.unwrap() - 1.5).abs() < 1e-12);
    assert!(report.violations[0].to_string().contains("1.5"));
}

#[test]
fn dephased_fragment_spans_two_dimensions() {
    let f = ncx_core::scenarios::fully_dephased(&mesd(0.4), FRAC_PI_2).unwrap();
    let maps = compute_inclusion_maps(&f, TOL);
    let stacked = DMatrix::from_fn(3, f.states().len(), |i, j| f.states()[j].1[i]);
    assert_eq!(stacked.svd(false, false).rank(1e-9), 2);
    assert_eq!(maps.state_span_dim(), 2);
}

#[test]
fn noise_examples() {
    let f = mesd(FRAC_PI_3);
    let same = apply_noise_to_effects(&f, &builtins(&f)[1], 0.0, TOL).unwrap();
    assert_eq!(same, f);

    let deph = apply_noise_to_effects(&f, &NoiseMap::dephasing(FRAC_PI_2), 1.0, TOL).unwrap();
    let psi = deph.effect(PSI).unwrap();
    let expect = RealVector::new(vec![FRAC_1_SQRT_2, 0.0, 0.5 * FRAC_1_SQRT_2]);
    assert!(psi.max_abs_diff(&expect) < 1e-15);

    let depol = apply_noise_to_effects(&f, &builtins(&f)[0], 0.5, TOL).unwrap();
    assert!((depol.raw_probability(PSI, PHI).unwrap() - 0.625).abs() < 1e-12);

    let maps = compute_inclusion_maps(&f, TOL);
    assert!((pair_probability(&f, &maps, "unit", PHI).unwrap() - 1.0).abs() < 1e-12);
    assert!((pair_probability(&f, &maps, "g_psi", PSI).unwrap() - 0.75).abs() < 1e-12);
    assert!((pair_probability(&f, &maps, PSI, PHI).unwrap() - 0.75).abs() < 1e-12);
}

#[test]
fn noise_rejects_bad_weights() {
    let f = mesd(0.3);
    let n = NoiseMap::dephasing(0.0);
    assert!(apply_noise_to_effects(&f, &n, 1.5, TOL).is_err());
    assert!(apply_noise_to_effects(&f, &n, -0.1, TOL).is_err());
    assert!(apply_noise_to_effects(&f, &n, f64::NAN, TOL).is_err());
    assert!(apply_noise_to_effects(&f, &NoiseMap::identity(2), 0.5, TOL).is_err());
}

fn labelled(prefix: &str, vs: Vec<Vec<f64>>) -> Vec<(String, RealVector)> {
    vs.into_iter()
        .enumerate()
        .map(|(i, v)| (format!("{prefix}{i}"), RealVector::new(v)))
        .collect()
}

proptest! {
    #[test]
    fn probabilities_and_reconstruction(theta in 0.0f64..=FRAC_PI_2, alpha in -3.2f64..3.2, p in 0.0f64..=1.0) {
        let f = build_mesd(&MesdParams::new(theta).with_alpha(alpha).with_p(p)).unwrap();
        prop_assert!(validate_fragment(&f, TOL).is_valid());
        let maps = compute_inclusion_maps(&f, TOL);
        prop_assert!(maps.reconstruction_error(&f) <= 1e-10);
        for basis in [&maps.state_basis, &maps.effect_basis] {
            let k = basis.ncols();
            prop_assert!((basis.transpose() * basis - DMatrix::identity(k, k)).amax() <= 1e-10);
        }
        for (el, e) in f.effects() {
            for (sl, s) in f.states() {
                let q = pair_probability(&f, &maps, el, sl).unwrap();
                prop_assert!((-TOL..=1.0 + TOL).contains(&q));
                prop_assert!((q - e.dot(s)).abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn semigroup_law(theta in 0.0f64..=FRAC_PI_2, r1 in 0.0f64..=1.0, r2 in 0.0f64..=1.0) {
        let f = mesd(theta);
        for n in builtins(&f) {
            let twice = apply_noise_to_effects(&apply_noise_to_effects(&f, &n, r1, TOL).unwrap(), &n, r2, TOL).unwrap();
            let once = apply_noise_to_effects(&f, &n, 1.0 - (1.0 - r1) * (1.0 - r2), TOL).unwrap();
            prop_assert!(max_effect_diff(&twice, &once) <= 1e-12);
        }
    }

    #[test]
    fn noisy_fragments_stay_valid(theta in 0.0f64..=FRAC_PI_2, alpha in 0.0f64..=FRAC_PI_2, r in 0.0f64..=1.0) {
        let f = build_mesd(&MesdParams::new(theta).with_alpha(alpha)).unwrap();
        for n in builtins(&f) {
            let g = apply_noise_to_effects(&f, &n, r, TOL).unwrap();
            prop_assert!(validate_fragment(&g, TOL).is_valid());
        }
    }

    #[test]
    fn json_round_trip(
        states in prop::collection::vec(prop::collection::vec(-1e3f64..1e3, 4), 1..5),
        effects in prop::collection::vec(prop::collection::vec(-1e3f64..1e3, 4), 0..5),
    ) {
        let mut eff = labelled("e", effects);
        eff.push(("u".into(), RealVector::new(vec![1.0, 0.0, 0.0, 0.0])));
        eff.push(("z".into(), RealVector::zeros(4)));
        let f = GptFragment::new(4, labelled("s", states), eff, "u", "z", RealVector::new(vec![1.0, 0.0, 0.0, 0.0])).unwrap();
        let back = GptFragment::from_json_str(&f.to_json_string()).unwrap();
        prop_assert_eq!(back, f);
    }
}
