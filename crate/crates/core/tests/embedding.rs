mod common;

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3};

use common::Noise;
use ncx_core::scenarios::{self, fully_dephased, MesdParams, PHI, PSI};
use ncx_core::{
    apply_noise_to_effects, assemble_embedding_lp, build_mesd, compute_inclusion_maps,
    embeddable_at, is_simplex_embeddable, min_noise_for_embedding, EmbeddingStatus,
    GptFragment, NoiseMap,
};
use proptest::prelude::*;

const TOL: f64 = 1e-9;

fn noise_for(f: &GptFragment, noise: Noise) -> NoiseMap {
    match noise {
        Noise::Depolarizing => NoiseMap::depolarizing(f, TOL).unwrap(),
        Noise::DephasingZ => NoiseMap::dephasing(FRAC_PI_2),
    }
}

fn r_min(params: &MesdParams, noise: Noise) -> f64 {
    let f = build_mesd(params).unwrap();
    min_noise_for_embedding(&f, &noise_for(&f, noise), TOL).unwrap().r_min
}

#[test]
fn lp_shape_at_pi_over_3() {
    let f = build_mesd(&MesdParams::new(FRAC_PI_3)).unwrap();
    let maps = compute_inclusion_maps(&f, TOL);
    let (hs, he) = ncx_core::embedding::fragment_facets(&f, &maps, TOL).unwrap();
    assert_eq!(hs.n_facets(), 4);
    assert_eq!(he.n_facets(), 6);
    let lp = assemble_embedding_lp(&f, &maps, &hs, &he, &noise_for(&f, Noise::Depolarizing)).unwrap();
    assert_eq!(lp.n_vars(), 25);
    assert_eq!(lp.n_constraints(), 9);
}

#[test]
fn closed_form_agreement_on_the_degree_grid() {
    for k in 1..=17 {
        let theta = (5.0 * k as f64).to_radians();
        let p = MesdParams::new(theta);
        let depol = r_min(&p, Noise::Depolarizing);
        let deph = r_min(&p, Noise::DephasingZ);
        assert!((depol - scenarios::r_depol_min_analytic(theta)).abs() < 1e-6, "depol at {k}");
        assert!((deph - scenarios::r_deph_min_analytic(theta)).abs() < 1e-6, "deph at {k}");
    }
}

#[test]
fn pi_over_3_values() {
    let p = MesdParams::new(FRAC_PI_3);
    assert!((r_min(&p, Noise::Depolarizing) - 0.2).abs() < 1e-6);
    assert!((r_min(&p, Noise::DephasingZ) - 1.0 / 3.0).abs() < 1e-6);
}

#[test]
fn theta_zero_is_embeddable() {
    let f = build_mesd(&MesdParams::new(0.0)).unwrap();
    assert!(is_simplex_embeddable(&f, TOL).unwrap());
    for n in [Noise::Depolarizing, Noise::DephasingZ] {
        let sol = min_noise_for_embedding(&f, &noise_for(&f, n), TOL).unwrap();
        assert_eq!(sol.status, EmbeddingStatus::AlreadyEmbeddable);
        assert_eq!(sol.r_min, 0.0);
    }
    let f = build_mesd(&MesdParams::new(FRAC_PI_3)).unwrap();
    assert!(!is_simplex_embeddable(&f, TOL).unwrap());
}

#[test]
fn model_at_depolarized_optimum_reproduces_noisy_table() {
    let f = build_mesd(&MesdParams::new(FRAC_PI_3)).unwrap();
    let noise = noise_for(&f, Noise::Depolarizing);
    let sol = min_noise_for_embedding(&f, &noise, TOL).unwrap();
    let model = sol.model.unwrap();
    let p = model.probability(PSI, PHI).unwrap();
    assert!((p - 0.7).abs() < 1e-7, "{p}");
    let noisy = apply_noise_to_effects(&f, &noise, sol.r_min, TOL).unwrap();
    assert!(model.max_reproduction_error(&noisy) < 1e-7);
    assert!(model.check("unit", "zero", 1e-7, 1e-9).is_ok());
}

#[test]
fn fully_dephased_fragment() {
    let f = fully_dephased(&build_mesd(&MesdParams::new(FRAC_PI_3)).unwrap(), FRAC_PI_2).unwrap();
    assert_eq!(compute_inclusion_maps(&f, TOL).state_span_dim(), 2);
    assert!(is_simplex_embeddable(&f, TOL).unwrap());
    let sol = min_noise_for_embedding(&f, &noise_for(&f, Noise::DephasingZ), TOL).unwrap();
    assert_eq!(sol.status, EmbeddingStatus::AlreadyEmbeddable);
    let model = sol.model.unwrap();
    let p = model.probability(scenarios::G_PHI, PHI).unwrap();
    assert!((p - 0.5 * (1.0 + FRAC_PI_3.cos())).abs() < 1e-9);
    assert!(model.max_reproduction_error(&f) < 1e-9);
}

#[test]
fn custom_noise_without_embedding() {
    // the identity never helps a contextual fragment
    let f = build_mesd(&MesdParams::new(FRAC_PI_3)).unwrap();
    let sol = min_noise_for_embedding(&f, &NoiseMap::identity(3), TOL).unwrap();
    assert_eq!(sol.status, EmbeddingStatus::NoEmbeddingEvenAtFullNoise);
    assert!(sol.model.is_none());
}

#[test]
fn residual_of_certificate() {
    let f = build_mesd(&MesdParams::new(0.7)).unwrap();
    let noise = noise_for(&f, Noise::DephasingZ);
    let sol = min_noise_for_embedding(&f, &noise, TOL).unwrap();
    assert!(sol.residual(&f, &noise, TOL).unwrap() < 1e-9);
    assert!(sol.sigma.as_ref().unwrap().iter().all(|&x| x >= -1e-9));
}

fn verdict(theta: f64, r: f64, noise: Noise) -> bool {
    let (s, c, e) = match noise {
        Noise::Depolarizing => scenarios::depolarized_sce(theta, r),
        Noise::DephasingZ => scenarios::dephased_sce(theta, r),
    };
    scenarios::nc_inequality_holds(s, c, e)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn monotone_feasibility(theta in 0.05f64..1.52, dephasing in any::<bool>()) {
        let noise = if dephasing { Noise::DephasingZ } else { Noise::Depolarizing };
        let f = build_mesd(&MesdParams::new(theta)).unwrap();
        let map = noise_for(&f, noise);
        let r0 = min_noise_for_embedding(&f, &map, TOL).unwrap().r_min;
        for k in 0..20 {
            let r = (r0 + (1.0 - r0) * k as f64 / 19.0 + 1e-7).min(1.0);
            prop_assert!(embeddable_at(&f, &map, r, TOL).unwrap(), "r = {r}, r_min = {r0}");
        }
        if r0 > 1e-5 {
            prop_assert!(!embeddable_at(&f, &map, r0 - 1e-5, TOL).unwrap());
        }
    }

    #[test]
    fn verdict_matches_inequality(theta in 0.02f64..1.55, r in 0.0f64..1.0, dephasing in any::<bool>()) {
        let noise = if dephasing { Noise::DephasingZ } else { Noise::Depolarizing };
        let threshold = match noise {
            Noise::Depolarizing => scenarios::r_depol_min_analytic(theta),
            Noise::DephasingZ => scenarios::r_deph_min_analytic(theta),
        };
        prop_assume!((r - threshold).abs() > 1e-6);
        let f = build_mesd(&MesdParams::new(theta)).unwrap();
        let noisy = apply_noise_to_effects(&f, &noise_for(&f, noise), r, TOL).unwrap();
        prop_assert_eq!(is_simplex_embeddable(&noisy, TOL).unwrap(), verdict(theta, r, noise));
    }

    #[test]
    fn extracted_models_are_valid(theta in 0.0f64..=FRAC_PI_2, alpha in 0.0f64..=FRAC_PI_2, p in 0.0f64..0.5, dephasing in any::<bool>()) {
        let noise = if dephasing { Noise::DephasingZ } else { Noise::Depolarizing };
        let f = build_mesd(&MesdParams::new(theta).with_alpha(alpha).with_p(p)).unwrap();
        let map = noise_for(&f, noise);
        let sol = min_noise_for_embedding(&f, &map, TOL).unwrap();
        let model = sol.model.unwrap();
        prop_assert!(model.check("unit", "zero", 1e-7, 1e-9).is_ok());
        let noisy = apply_noise_to_effects(&f, &map, sol.r_min, TOL).unwrap();
        prop_assert!(model.max_reproduction_error(&noisy) < 1e-7);
    }

    #[test]
    fn lp_table_matches_density_matrix_oracle(theta in 0.0f64..=FRAC_PI_2, r in 0.0f64..=1.0) {
        let f = build_mesd(&MesdParams::new(theta)).unwrap();
        for noise in [Noise::Depolarizing, Noise::DephasingZ] {
            let noisy = apply_noise_to_effects(&f, &noise_for(&f, noise), r, TOL).unwrap();
            let t = scenarios::data_table(&noisy).unwrap();
            let oracle = common::mesd_table(theta, 0.0, 0.0, noise, r);
            prop_assert!(common::max_table_diff(&t.probabilities, &oracle) < 1e-12);
        }
    }
}
