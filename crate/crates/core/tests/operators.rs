use pme_particles::difference::{backward_diff, discrete_laplacian, forward_diff};
use pme_particles::prelude::*;
use proptest::prelude::*;

fn max_abs(v: &[f64]) -> f64 {
    v.iter().map(|x| x.abs()).fold(0.0, f64::max)
}

fn pair() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (1usize..60).prop_flat_map(|n| {
        (
            prop::collection::vec(-100.0..100.0f64, n),
            prop::collection::vec(-100.0..100.0f64, n),
        )
    })
}

proptest! {
    #[test]
    fn summation_by_parts((f, g) in pair()) {
        let n = f.len();
        let lap = discrete_laplacian(&f);
        let lhs: f64 = -(1..=n).map(|k| g[k - 1] * lap[k]).sum::<f64>();
        let rhs: f64 = forward_diff(&f).iter().zip(forward_diff(&g)).map(|(a, b)| a * b).sum();
        let tol = 1e-10 * (n * n) as f64 * max_abs(&f) * max_abs(&g);
        prop_assert!((lhs - rhs).abs() <= tol, "{lhs} vs {rhs}");
    }

    #[test]
    fn laplacian_sums_to_zero(f in prop::collection::vec(0.0..50.0f64, 1..80)) {
        let n = f.len();
        let sum: f64 = discrete_laplacian(&f).iter().sum();
        prop_assert!(sum.abs() <= 1e-12 * (n * n) as f64 * max_abs(&f).max(f64::MIN_POSITIVE));
    }

    #[test]
    fn nonnegative_data_has_a_negative_laplacian_entry(
        f in prop::collection::vec(prop_oneof![Just(0.0), 1e-3..50.0f64], 1..80)
    ) {
        prop_assume!(f.iter().any(|&v| v > 0.0));
        let lap = discrete_laplacian(&f);
        prop_assert!(lap[1..=f.len()].iter().any(|&v| v < 0.0));
    }

    #[test]
    fn laplacian_is_difference_of_differences(f in prop::collection::vec(-10.0..10.0f64, 1..40)) {
        let n = f.len() as f64;
        let fwd = forward_diff(&f);
        let bwd = backward_diff(&f);
        let lap = discrete_laplacian(&f);
        // Δ_k = N (D+_k - D-_k) for k = 1..N
        for k in 1..=f.len() {
            let expected = n * (fwd[k] - bwd[k - 1]);
            prop_assert!((lap[k] - expected).abs() <= 1e-9 * n * n * max_abs(&f).max(1.0));
        }
    }

    #[test]
    fn initial_ab_quantity_is_negative(gaps in prop::collection::vec(0.01..5.0f64, 1..50), m in 1.05..5.0f64) {
        let mut x = vec![0.0];
        for g in &gaps {
            x.push(x.last().unwrap() + g);
        }
        let state = ParticleState::new(x, m).unwrap();
        let z = z_vector(&state);
        prop_assert!(z.iter().cloned().fold(f64::INFINITY, f64::min) < 0.0);
    }
}
