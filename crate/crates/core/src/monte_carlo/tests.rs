use super::*;
use crate::spectral_noise::linear_functional;
use num_complex::Complex64;

fn small_lattice() -> Lattice {
    Lattice::new(12.0, 6, 6.0, 6, 1).unwrap()
}

fn pts(ts: &[f64], xs: &[f64]) -> Vec<SpaceTimePoint> {
    ts.iter().flat_map(|&t| xs.iter().map(move |&x| SpaceTimePoint { t, x: vec![x] })).collect()
}

#[test]
fn fft_path_matches_direct_enumeration() {
    let lat = small_lattice();
    let points = pts(&[0.6, 1.0], &[0.0, 0.37]);
    for eq in [EquationKind::Heat, EquationKind::Wave] {
        let params = [NoiseParam::regular(0.5, 1, 0.75).unwrap(), NoiseParam::regular(0.3, 1, 0.75).unwrap()];
        let fast = Sampler::new(eq, &params[0].temporal, &lat, &points, 2, 64).unwrap();
        let slow = direct::DirectEngine::new(eq, &params[0].temporal, &lat, &[0.6, 1.0], 2, 64).unwrap();
        let w = fast.weights(&params).unwrap();
        let wx: Vec<XiWeights> = w.xi.iter().zip(&w.shells).map(|(xi, shells)| XiWeights { xi, shells }).collect();
        for seed in 0..3 {
            let draw = draw_noise(&lat, seed);
            let a = fast.sample(&draw, &w).unwrap();
            let ps: Vec<(usize, &[f64])> = points.iter().map(|p| (if p.t == 0.6 { 0 } else { 1 }, p.x.as_slice())).collect();
            let b = slow.evaluate(&draw, &wx, &ps);
            for (wa, wb) in a.iter().zip(&b) {
                for (va, vb) in wa.iter().zip(wb) {
                    for k in 0..2 {
                        let scale = va[k].abs().max(1e-3);
                        assert!((va[k] - vb[k]).abs() < 1e-9 * scale, "{eq} k={} {} vs {}", k + 1, va[k], vb[k]);
                    }
                }
            }
        }
    }
}

#[test]
fn first_order_matches_linear_functional() {
    let lat = Lattice::default_for(1.0, 1).unwrap();
    let p = NoiseParam::regular(0.5, 1, 0.75).unwrap();
    let (t, x) = (1.0, 0.3);
    let fhat = move |tau: f64, xi: &[f64]| {
        let a = Complex64::new(0.5 * xi[0] * xi[0], 0.0);
        let itau = Complex64::new(0.0, -tau);
        // ∫_0^t e^{−iτ s} e^{−a (t−s)} ds
        let z = a + itau;
        let time = if z.norm() < 1e-12 { Complex64::new(t, 0.0) } else { ((itau * t).exp() - (-a * t).exp()) / z };
        time * Complex64::new(0.0, -xi[0] * x).exp()
    };
    for seed in 0..3 {
        let draw = draw_noise(&lat, seed);
        let exact = linear_functional(&draw, &p, &fhat).unwrap();
        let grid = discrete_multiple_integral(&draw, &p, EquationKind::Heat, t, &[x], 1).unwrap();
        assert!((grid - exact).abs() < 5e-3 * exact.abs().max(0.1), "{grid} vs {exact}");
    }
}

#[test]
fn coupled_ensembles_are_deterministic_and_share_draws() {
    let lat = small_lattice();
    let p = NoiseParam::rough(0.4, 0.7).unwrap();
    let params = [p.clone(), p.with_theta(0.3).unwrap(), p.clone()];
    let points = pts(&[1.0], &[0.0, 0.5]);
    let a = coupled_ensemble(&[1, 2, 3], &params, EquationKind::Wave, &points, 2, &lat).unwrap();
    let b = coupled_ensemble(&[1, 2, 3], &params, EquationKind::Wave, &points, 2, &lat).unwrap();
    assert_eq!(a, b);
    for s in 0..3 {
        for i in 0..2 {
            assert_eq!(a.solution(s, 0, i), a.solution(s, 2, i));
            assert_ne!(a.solution(s, 0, i), a.solution(s, 1, i));
        }
    }
    let mut csv = Vec::new();
    a.write_csv(&mut csv).unwrap();
    let text = String::from_utf8(csv).unwrap();
    assert_eq!(text.lines().count(), 1 + 3 * 3 * 2);
    assert!(text.starts_with("seed,theta,t,x,value\n"));
    assert!(text.lines().nth(1).unwrap().starts_with("1,rough:H=0.4,1,0,"));
    let flat = coupled_ensemble(&[4, 5], &params, EquationKind::Wave, &points, 0, &lat).unwrap();
    assert!((0..2).all(|s| (0..3).all(|t| (0..2).all(|i| flat.solution(s, t, i) == 1.0))));
    let regular = [NoiseParam::regular(0.5, 1, 0.7).unwrap()];
    let mut csv = Vec::new();
    coupled_ensemble(&[1], &regular, EquationKind::Heat, &points, 1, &lat).unwrap().write_csv(&mut csv).unwrap();
    assert!(String::from_utf8(csv).unwrap().contains("1,\"regular:alpha=0.5,d=1\",1,0,"));
}

#[test]
fn third_order_requires_small_lattice() {
    let big = Lattice::default_for(1.0, 1).unwrap();
    let p = NoiseParam::regular(0.5, 1, 0.75).unwrap();
    let draw = draw_noise(&big, 0);
    assert!(matches!(truncated_solution(&draw, &p, EquationKind::Heat, 1.0, &[0.0], 3), Err(ChaosError::Budget(_))));
    let lat = Lattice::new(8.0, 3, 4.0, 3, 1).unwrap();
    let draw = draw_noise(&lat, 0);
    let u3 = truncated_solution(&draw, &p, EquationKind::Heat, 1.0, &[0.0], 3).unwrap();
    let u2 = truncated_solution(&draw, &p, EquationKind::Heat, 1.0, &[0.0], 2).unwrap();
    let i3 = discrete_multiple_integral(&draw, &p, EquationKind::Heat, 1.0, &[0.0], 3).unwrap();
    assert!((u3 - u2 - i3).abs() < 1e-12 * u3.abs().max(1.0));
    assert!(matches!(truncated_solution(&draw, &p, EquationKind::Heat, 1.0, &[0.0], 4), Err(ChaosError::OrderTooLarge { .. })));
}

#[test]
fn higher_dimensional_lattices_use_enumeration() {
    let lat = Lattice::new(6.0, 2, 3.0, 1, 2).unwrap();
    let p = NoiseParam::regular(0.8, 2, 0.75).unwrap();
    let draw = draw_noise(&lat, 5);
    let i1 = discrete_multiple_integral(&draw, &p, EquationKind::Heat, 1.0, &[0.1, -0.2], 1).unwrap();
    let i2 = discrete_multiple_integral(&draw, &p, EquationKind::Heat, 1.0, &[0.1, -0.2], 2).unwrap();
    assert!(i1.is_finite() && i2.is_finite());
    assert!(discrete_multiple_integral(&draw, &p, EquationKind::Heat, 1.0, &[0.1], 1).is_err());
}

#[test]
fn inadmissible_and_mismatched_inputs_fail() {
    let lat = small_lattice();
    let draw = draw_noise(&lat, 0);
    let rough = NoiseParam::rough(0.12, 0.55).unwrap();
    assert!(discrete_multiple_integral(&draw, &rough, EquationKind::Heat, 1.0, &[0.0], 1).is_err());
    let other = NoiseParam::regular(0.5, 1, 0.6).unwrap();
    let base = NoiseParam::regular(0.5, 1, 0.75).unwrap();
    let points = pts(&[1.0], &[0.0]);
    assert!(coupled_ensemble(&[1], &[base, other], EquationKind::Heat, &points, 1, &lat).is_err());
    assert!(coupled_ensemble(&[], &[NoiseParam::regular(0.5, 1, 0.75).unwrap()], EquationKind::Heat, &points, 1, &lat).is_err());
}
