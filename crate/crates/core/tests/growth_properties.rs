use additive_spectrum::growth::{
    interpolate_above, probe_stability, GrowthFunction, Knot, BISECTION_PRECISION,
};
use proptest::prelude::*;

fn closed_form() -> impl Strategy<Value = GrowthFunction> {
    prop_oneof![
        (0.1f64..10.0, 0.5f64..4.0).prop_map(|(a, h)| GrowthFunction::power(a, h).unwrap()),
        (1.1f64..4.0).prop_map(|b| GrowthFunction::exponential(b).unwrap()),
        (0.1f64..3.0).prop_map(|c| GrowthFunction::exp_sqrt(c).unwrap()),
    ]
}

/// `λ_k = k² + d_k` with `d_k ∈ [0.1, 2]`, increasing because consecutive
/// squares differ by at least 3.
fn square_knots() -> impl Strategy<Value = Vec<Knot>> {
    (2usize..60)
        .prop_flat_map(|n| proptest::collection::vec(0.1f64..2.0, n))
        .prop_map(|ds| {
            ds.iter()
                .enumerate()
                .map(|(i, d)| {
                    let k = i as u64 + 1;
                    (k, (k * k) as f64 + d)
                })
                .collect()
        })
}

proptest! {
    #[test]
    fn eval_is_strictly_increasing(
        f in closed_form(),
        x in 1.0f64..300.0,
        rel in 1e-6f64..1.0,
    ) {
        let y = x * (1.0 + rel);
        prop_assert!(f.eval(x).unwrap() < f.eval(y).unwrap());
    }

    #[test]
    fn inverse_round_trip_closed_form(f in closed_form(), x in 1.0f64..300.0) {
        let back = f.inverse(f.eval(x).unwrap()).unwrap();
        prop_assert!((back - x).abs() <= 1e-6 * x, "{} -> {}", x, back);
    }

    #[test]
    fn interpolation_stays_above_and_hits_knots(knots in square_knots(), seed in any::<u64>()) {
        let g = GrowthFunction::power(1.0, 2.0).unwrap();
        let f = interpolate_above(&g, &knots).unwrap();
        for &(k, lambda) in &knots {
            prop_assert_eq!(f.eval(k as f64).unwrap(), lambda);
        }
        let lo = knots[0].0 as f64;
        let hi = knots[knots.len() - 1].0 as f64;
        // 1000 deterministic points from a 64-bit LCG.
        let mut s = seed;
        for _ in 0..1000 {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let x = lo + (hi - lo) * ((s >> 11) as f64 / (1u64 << 53) as f64);
            prop_assert!(f.eval(x).unwrap() > g.eval(x).unwrap(), "x = {}", x);
        }
    }

    #[test]
    fn inverse_round_trip_interpolated(knots in square_knots(), t in 0.0f64..1.0) {
        let g = GrowthFunction::power(1.0, 2.0).unwrap();
        let f = interpolate_above(&g, &knots).unwrap();
        let lo = knots[0].0 as f64;
        let hi = knots[knots.len() - 1].0 as f64;
        let x = lo + t * (hi - lo);
        let back = f.inverse(f.eval(x).unwrap()).unwrap();
        prop_assert!((back - x).abs() <= 2.0 * BISECTION_PRECISION * hi, "{} -> {}", x, back);
    }

    #[test]
    fn stability_telescopes(f in closed_form(), delta in 0.25f64..2.0, mult in 1.0f64..10.0) {
        let eps = 0.01;
        let g_max = 1e6;
        let base = probe_stability(&f, delta, g_max, eps).unwrap();
        prop_assume!(base.stable);
        let big = delta * mult;
        let eps_big = (1.0 + eps).powi((big / delta).ceil() as i32) - 1.0;
        let v = probe_stability(&f, big, g_max, eps_big).unwrap();
        prop_assert!(v.stable, "{} at Δ = {}: {} > 1 + {}", f, big, v.tail_sup_ratio, eps_big);
    }
}

#[test]
fn exponential_is_never_stable() {
    for b in [1.1, 2.0, 3.0] {
        let f = GrowthFunction::exponential(b).unwrap();
        assert!(!probe_stability(&f, 1.0, 1e6, 0.01).unwrap().stable);
    }
}
