use linkplan::analysis::{fso_outage_clt, gaussian_outage, rf_outage_linearized, rf_outage_low_snr};
use linkplan::network::{compose_mesh, compose_route, mesh_outage, route_outage, Analytical};
use linkplan::simulate::{simulate_route, McConfig};
use linkplan::{
    FsoExponential, FsoGammaGamma, FsoHopParams, FsoModel, GaussianApprox, Hop, MeshNetwork, Method, OutageEstimate,
    PaConfig, RfHopParams, RicianFading, Route,
};
use proptest::prelude::*;

fn rf_strategy() -> impl Strategy<Value = RfHopParams> {
    (
        0.0..5.0f64,
        0.5..2.0f64,
        1usize..40,
        1usize..4,
        1usize..20,
        0.2..4.0f64,
        -10.0..20.0f64,
    )
        .prop_map(|(k, omega, n, m, c, rate, p_db)| {
            let fading = RicianFading::new(k, omega, n).unwrap();
            let pa = PaConfig::ideal(10f64.powf(p_db / 10.0)).unwrap();
            RfHopParams::new(fading, pa, m, c, rate).unwrap()
        })
}

fn fso_strategy() -> impl Strategy<Value = FsoHopParams> {
    (
        prop::bool::ANY,
        0.5..3.0f64,
        1usize..4,
        1usize..20,
        0.2..4.0f64,
        -10.0..20.0f64,
    )
        .prop_map(|(gg, lambda, m, c, rate, p_db)| {
            let model: FsoModel = if gg {
                FsoGammaGamma::new(4.3939, 2.5636).unwrap().into()
            } else {
                FsoExponential::new(lambda).unwrap().into()
            };
            FsoHopParams::new(model, 10f64.powf(p_db / 10.0), m, c, rate).unwrap()
        })
}

fn hop_strategy() -> impl Strategy<Value = Hop> {
    prop_oneof![rf_strategy().prop_map(Hop::from), fso_strategy().prop_map(Hop::from)]
}

fn route_strategy() -> impl Strategy<Value = Route> {
    prop::collection::vec(hop_strategy(), 1..5).prop_map(|h| Route::new(h).unwrap())
}

fn estimate(p: f64) -> OutageEstimate {
    OutageEstimate::new(p, Method::Lemma4, 0.0).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hop_outage_is_a_probability(h in hop_strategy()) {
        let eval = Analytical::long_codeword();
        let v = linkplan::network::HopEvaluator::hop(&eval, &h).unwrap().value();
        prop_assert!((0.0..=1.0).contains(&v));
    }

    #[test]
    fn rf_outage_falls_with_power(h in rf_strategy(), step_db in 0.1..10.0f64) {
        let louder = h.with_pa(h.pa().with_p_cons(h.pa().p_cons() * 10f64.powf(step_db / 10.0)).unwrap());
        prop_assert!(rf_outage_linearized(&louder).unwrap().value() <= rf_outage_linearized(&h).unwrap().value());
        prop_assert!(rf_outage_low_snr(&louder).unwrap().value() <= rf_outage_low_snr(&h).unwrap().value());
    }

    #[test]
    fn outage_rises_with_rate(h in rf_strategy(), f in fso_strategy(), factor in 1.0..3.0f64) {
        let rf_fast = h.with_rate(h.rate() * factor).unwrap();
        prop_assert!(rf_outage_linearized(&rf_fast).unwrap().value() >= rf_outage_linearized(&h).unwrap().value());
        let fso_fast = f.with_rate(f.rate() * factor).unwrap();
        prop_assert!(fso_outage_clt(&fso_fast).unwrap().value() >= fso_outage_clt(&f).unwrap().value());
    }

    #[test]
    fn gaussian_outage_depends_only_on_scaled_triple(
        mean in 0.01..5.0f64, var in 0.01..3.0f64, m in 1usize..5, cc in 1usize..30, rate in 0.01..10.0f64,
    ) {
        // Doubling M together with the variance and R leaves (mean, var/(M·C), R/M) unchanged.
        let a = GaussianApprox::new(mean, var).unwrap();
        let b = GaussianApprox::new(mean, 2.0 * var).unwrap();
        prop_assert_eq!(gaussian_outage(&a, m, cc, rate), gaussian_outage(&b, 2 * m, cc, 2.0 * rate));
    }

    #[test]
    fn route_outage_is_permutation_invariant(r in route_strategy(), seed in any::<u64>()) {
        let eval = Analytical::long_codeword();
        let mut hops = r.hops().to_vec();
        // Deterministic shuffle driven by the seed.
        let mut s = seed;
        for i in (1..hops.len()).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            hops.swap(i, (s >> 33) as usize % (i + 1));
        }
        let shuffled = Route::new(hops).unwrap();
        prop_assert_eq!(route_outage(&r, &eval).unwrap().value(), route_outage(&shuffled, &eval).unwrap().value());
    }

    #[test]
    fn appending_a_hop_never_helps(r in route_strategy(), h in hop_strategy()) {
        let eval = Analytical::long_codeword();
        let mut longer = r.clone();
        longer.push(h);
        prop_assert!(route_outage(&longer, &eval).unwrap().value() >= route_outage(&r, &eval).unwrap().value());
    }

    #[test]
    fn adding_a_route_never_hurts(routes in prop::collection::vec(route_strategy(), 1..4), extra in route_strategy()) {
        let eval = Analytical::long_codeword();
        let mesh = MeshNetwork::new(routes).unwrap();
        let mut bigger = mesh.clone();
        bigger.push(extra);
        prop_assert!(mesh_outage(&bigger, &eval).unwrap().value() <= mesh_outage(&mesh, &eval).unwrap().value());
    }

    #[test]
    fn composition_extremes(ps in prop::collection::vec(0.0..=1.0f64, 1..6), idx in any::<prop::sample::Index>()) {
        let mut zeros: Vec<_> = ps.iter().map(|_| estimate(0.0)).collect();
        prop_assert_eq!(compose_route(&zeros).unwrap().value(), 0.0);
        prop_assert_eq!(compose_mesh(&zeros).unwrap().value(), 0.0);
        let i = idx.index(ps.len());
        zeros[i] = estimate(1.0);
        prop_assert_eq!(compose_route(&zeros).unwrap().value(), 1.0);
        let ones: Vec<_> = ps.iter().map(|_| estimate(1.0)).collect();
        prop_assert_eq!(compose_mesh(&ones).unwrap().value(), 1.0);
        let mixed: Vec<_> = ps.iter().map(|&p| estimate(p)).collect();
        let route = compose_route(&mixed).unwrap().value();
        let mesh = compose_mesh(&mixed).unwrap().value();
        prop_assert!((0.0..=1.0).contains(&route) && (0.0..=1.0).contains(&mesh));
        prop_assert!(mesh <= route + 1e-15);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn monte_carlo_is_deterministic_across_workers(r in route_strategy(), seed in any::<u64>(), workers in 2usize..5) {
        let one = simulate_route(&r, &McConfig::new(70_000, seed, 1).unwrap());
        let many = simulate_route(&r, &McConfig::new(70_000, seed, workers).unwrap());
        prop_assert_eq!(one.value(), many.value());
        prop_assert_eq!(one.ci_halfwidth(), many.ci_halfwidth());
        prop_assert!((0.0..=1.0).contains(&one.value()));
    }
}
