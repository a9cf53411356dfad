use attrest::moments::{
    bias_t1, bias_t3, m_components, min_mse_t2, min_mse_t3, mse_t1, mse_t2, mse_t3_at, opt_h1,
    opt_q, t3_coefficients,
};
use attrest::population::summarize_population;
use attrest::{DesignMoments, Population, PopulationSummary, T3Params};
use proptest::prelude::*;

fn rel_eq(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

fn population_strategy() -> impl Strategy<Value = (Vec<u8>, Vec<f64>)> {
    (3usize..60).prop_flat_map(|n| {
        (
            proptest::collection::vec(0u8..=1, n),
            proptest::collection::vec(-50.0f64..200.0, n),
        )
    })
}

fn nondegenerate(phi: &[u8], x: &[f64]) -> Option<Population<f64>> {
    let pop = Population::from_pairs(phi, x).ok()?;
    let s = summarize_population(&pop).ok()?;
    (s.x_bar.abs() > 1e-3).then_some(pop)
}

proptest! {
    #[test]
    fn binary_variance_identity((phi, x) in population_strategy()) {
        if let Some(pop) = nondegenerate(&phi, &x) {
            let s = summarize_population(&pop).unwrap();
            let n = pop.size() as f64;
            prop_assert!(rel_eq(s.s_p_sq, n * s.p * (1.0 - s.p) / (n - 1.0), 1e-12));
            prop_assert!(s.rho_pb.abs() <= 1.0);
            prop_assert!(rel_eq(s.c_p * s.c_p, s.s_p_sq / (s.p * s.p), 1e-12));
            prop_assert!(rel_eq(s.c_x * s.c_x, s.s_x_sq / (s.x_bar * s.x_bar), 1e-12));
        }
    }

    #[test]
    fn affine_auxiliary_has_perfect_correlation(phi in proptest::collection::vec(0u8..=1, 2..80),
                                                c in prop_oneof![-20.0f64..-0.1, 0.1f64..20.0],
                                                d in -5.0f64..50.0) {
        let x: Vec<f64> = phi.iter().map(|&p| c * f64::from(p) + d).collect();
        let pop = Population::from_pairs(&phi, &x).unwrap();
        if let Ok(s) = summarize_population(&pop) {
            prop_assert!((s.rho_pb - c.signum()).abs() <= 1e-12);
        }
    }

    #[test]
    fn permutation_invariance((phi, x) in population_strategy(), seed in any::<u64>()) {
        if let Some(pop) = nondegenerate(&phi, &x) {
            let mut order: Vec<usize> = (0..phi.len()).collect();
            // Fisher-Yates driven by a simple LCG keeps the test free of extra deps
            let mut state = seed | 1;
            for i in (1..order.len()).rev() {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                order.swap(i, (state >> 33) as usize % (i + 1));
            }
            let phi2: Vec<u8> = order.iter().map(|&i| phi[i]).collect();
            let x2: Vec<f64> = order.iter().map(|&i| x[i]).collect();
            let a = summarize_population(&pop).unwrap();
            let b = summarize_population(&Population::from_pairs(&phi2, &x2).unwrap()).unwrap();
            for (u, v) in [(a.p, b.p), (a.x_bar, b.x_bar), (a.s_p_sq, b.s_p_sq), (a.s_x_sq, b.s_x_sq),
                           (a.s_phix, b.s_phix), (a.rho_pb, b.rho_pb), (a.c_p, b.c_p), (a.c_x, b.c_x)] {
                prop_assert!(rel_eq(u, v, 1e-15) || (u - v).abs() < 1e-300, "{u} vs {v}");
            }
        }
    }
}

fn summary_strategy() -> impl Strategy<Value = DesignMoments<f64>> {
    (
        20usize..1000,
        0.1f64..0.9,
        1.0f64..100.0,
        -0.95f64..0.95,
        0.05f64..0.6,
        0.02f64..0.1,
    )
        .prop_map(|(big_n, p, xbar, rho, c_x, f_frac)| {
            let n = ((big_n as f64 * f_frac).ceil() as usize).max(10).min(big_n);
            let c_p = ((1.0 - p) / p * big_n as f64 / (big_n as f64 - 1.0)).sqrt();
            let s = PopulationSummary::from_moments(big_n, p, xbar, rho, c_p, c_x);
            DesignMoments::for_sample_size(n, s).unwrap()
        })
}

proptest! {
    #[test]
    fn t2_minimum_dominates(dm in summary_strategy(), h1s in proptest::collection::vec(-5.0f64..5.0, 100)) {
        let min = min_mse_t2(&dm);
        let tol = 1e-12 * min.abs().max(1e-300);
        for h1 in h1s {
            prop_assert!(min <= mse_t2(&dm, h1) + tol);
        }
        prop_assert!(rel_eq(mse_t2(&dm, opt_h1(&dm).unwrap()), min, 1e-9) || min < 1e-15);
        prop_assert!(min <= mse_t1(&dm) + tol);
        prop_assert!(rel_eq(mse_t1(&dm), mse_t2(&dm, -dm.summary.p), 1e-12));
    }

    #[test]
    fn t3_minimum_dominates(dm in summary_strategy(), alpha in -1.0f64..1.0, beta in -1.0f64..1.0,
                            b in 0.0f64..5.0,
                            qs in proptest::collection::vec((-0.2f64..0.2, -0.05f64..0.05), 50)) {
        let c = t3_coefficients(alpha, beta, 1.0, b, dm.summary.x_bar).unwrap();
        let mc = m_components(&dm, &c);
        prop_assert!(mc.d1 > 0.0 && mc.determinant() > 0.0);
        let q = opt_q(&mc).unwrap();
        let p = dm.summary.p;
        let min = min_mse_t3(p, &mc).unwrap();
        prop_assert!(rel_eq(mse_t3_at(q.q1_star, q.q2_star, p, &mc), min, 1e-12));
        for (d1, d2) in qs {
            prop_assert!(mse_t3_at(q.q1_star + d1, q.q2_star + d2, p, &mc) >= min * (1.0 - 1e-12));
        }
    }

    #[test]
    fn t3_reduces_to_t1(dm in summary_strategy()) {
        let c = t3_coefficients(1.0, 0.0, 1.0, 0.0, dm.summary.x_bar).unwrap();
        let mc = m_components(&dm, &c);
        let ratio = T3Params::new(1.0, 0.0, 1.0, 0.0, 1.0, 0.0).unwrap();
        prop_assert!(rel_eq(mse_t3_at(1.0, 0.0, dm.summary.p, &mc), mse_t1(&dm), 1e-12));
        let b1 = bias_t1(&dm);
        prop_assert!(rel_eq(bias_t3(&dm, &ratio, &c), b1, 1e-12) || b1.abs() < 1e-15);
    }
}
