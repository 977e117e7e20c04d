use anderson_chaos::chaos_quadrature::{multiindex_set, product_bound_check};
use anderson_chaos::closed_forms::simplex_power_integral;
use anderson_chaos::kernels::green_fourier;
use anderson_chaos::model_params::{EquationKind, NoiseParam};
use anderson_chaos::monte_carlo::ks_two_sample;
use anderson_chaos::spectral_noise::{draw_noise, shell_fractions, spectral_weight, Lattice};
use proptest::prelude::*;

proptest! {
    #[test]
    fn product_of_gaps_is_dominated_by_the_multiindex_sum(
        etas in prop::collection::vec(-10.0f64..10.0, 1..=5),
        h in 0.01f64..0.49,
    ) {
        let (lhs, rhs) = product_bound_check(&etas, h);
        prop_assert!(lhs <= rhs * (1.0 + 1e-12), "lhs {lhs} rhs {rhs}");
    }

    #[test]
    fn multiindex_set_has_every_choice_once(k in 1usize..=12) {
        let set = multiindex_set(k).unwrap();
        prop_assert_eq!(set.len(), 1 << (k - 1));
        let mut sorted = set.indices.clone();
        sorted.dedup();
        prop_assert_eq!(sorted.len(), set.len());
    }

    #[test]
    fn green_transforms_are_bounded(t in 0.0f64..5.0, r in 0.0f64..100.0) {
        let heat = green_fourier(EquationKind::Heat, t, r);
        prop_assert!((0.0..=1.0).contains(&heat));
        let wave = green_fourier(EquationKind::Wave, t, r);
        prop_assert!(wave.abs() <= t * (1.0 + 1e-12));
    }

    #[test]
    fn heat_transform_decreases_in_time_and_frequency(t in 0.0f64..5.0, dt in 0.0f64..1.0, r in 0.0f64..10.0, dr in 0.0f64..1.0) {
        let g = green_fourier(EquationKind::Heat, t, r);
        prop_assert!(green_fourier(EquationKind::Heat, t + dt, r) <= g);
        prop_assert!(green_fourier(EquationKind::Heat, t, r + dr) <= g);
    }

    #[test]
    fn mirror_is_an_involution_with_one_fixed_cell(half_tau in 1usize..20, half_xi in 1usize..20, c in 0usize..10_000) {
        let lat = Lattice::new(4.0, half_tau, 4.0, half_xi, 1).unwrap();
        let c = c % lat.len();
        prop_assert_eq!(lat.mirror(lat.mirror(c)), c);
        prop_assert_eq!(lat.mirror(c) == c, c == lat.centre_cell());
    }

    #[test]
    fn spectral_weight_is_even(tau in -50.0f64..50.0, xi in -50.0f64..50.0, alpha in 0.05f64..0.95, h in 0.3f64..0.49) {
        for p in [NoiseParam::regular(alpha, 1, 0.75).unwrap(), NoiseParam::rough(h, 0.75).unwrap()] {
            let a = spectral_weight(&p, tau, &[xi], None).unwrap();
            let b = spectral_weight(&p, -tau, &[-xi], None).unwrap();
            prop_assert!((a - b).abs() <= 1e-14 * a.abs(), "{a} vs {b}");
        }
    }

    #[test]
    fn draws_are_hermitian(seed in any::<u64>()) {
        let lat = Lattice::new(4.0, 6, 4.0, 5, 1).unwrap();
        let draw = draw_noise(&lat, seed);
        for c in 0..lat.len() {
            prop_assert_eq!(draw.value(lat.mirror(c)), draw.value(c).conj());
        }
        prop_assert_eq!(draw.value(lat.centre_cell()).im, 0.0);
    }

    #[test]
    fn simplex_integral_scales_with_the_horizon(
        betas in prop::collection::vec(-0.9f64..2.0, 1..=4),
        t in 0.1f64..3.0,
        lambda in 0.1f64..3.0,
    ) {
        let s: f64 = betas.iter().sum::<f64>() + betas.len() as f64;
        let a = simplex_power_integral(lambda * t, &betas).unwrap();
        let b = lambda.powf(s) * simplex_power_integral(t, &betas).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * b.abs());
    }

    #[test]
    fn shell_fractions_partition_unity(q in 0.01f64..3.0) {
        let f = shell_fractions(q);
        prop_assert!(f.iter().all(|&x| x > 0.0));
        prop_assert!((f.iter().sum::<f64>() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn ks_statistic_is_a_distance(a in prop::collection::vec(-5.0f64..5.0, 1..40), b in prop::collection::vec(-5.0f64..5.0, 1..40)) {
        let d = ks_two_sample(&a, &b).unwrap();
        prop_assert!((0.0..=1.0).contains(&d));
        prop_assert_eq!(d, ks_two_sample(&b, &a).unwrap());
        prop_assert_eq!(ks_two_sample(&a, &a).unwrap(), 0.0);
    }
}
