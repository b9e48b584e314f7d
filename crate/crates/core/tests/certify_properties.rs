use blocksdp::certify::{
    binary_certificate, censored_certificate, default_eta_star, general_certificate, multi_certificate, verify_default,
    Certificate,
};
use blocksdp::harness::{harness_solve_options, run_trial, wilson_interval, LambdaChoice, Method, TrialPoint};
use blocksdp::models::{generate, Graph, ModelSpec};
use blocksdp::oracle::swap_witness;
use blocksdp::thresholds::{solve_psi, tau};
use proptest::prelude::*;

fn certificates(n_scale: usize, seed: u64) -> Vec<(Graph, Certificate)> {
    let n = 6 * n_scale;
    let mut out = Vec::new();
    let binary = ModelSpec::binary(n, 4.0, 1.0, 1.0 / 3.0).unwrap();
    let (truth, g) = generate(&binary, seed).unwrap();
    let lambda = tau(4.0, 1.0).unwrap() * binary.log_n() / n as f64;
    out.push((g.clone(), binary_certificate(&g, &truth, lambda).unwrap()));
    let censored = ModelSpec::censored(n, 3.0, 0.2).unwrap();
    let (truth, g) = generate(&censored, seed).unwrap();
    out.push((g.clone(), censored_certificate(&g, &truth).unwrap()));
    let multi = ModelSpec::multi(n, 3, 5.0, 1.0).unwrap();
    let (truth, g) = generate(&multi, seed).unwrap();
    out.push((g.clone(), multi_certificate(&g, &truth, multi.q()).unwrap()));
    let general = ModelSpec::general(n, vec![3 * n_scale, 2 * n_scale], 5.0, 1.0).unwrap();
    let (truth, g) = generate(&general, seed).unwrap();
    let lambda = (1.0 + 2.0 * solve_psi(5.0, 1.0).unwrap()) * general.log_n() / n as f64;
    out.push((g.clone(), general_certificate(&g, &truth, default_eta_star(n, 3.0), lambda).unwrap()));
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn reconstruction_and_null_space(n_scale in 4usize..12, seed in any::<u64>()) {
        for (g, cert) in certificates(n_scale, seed) {
            let n = g.n() as f64;
            let rebuilt = cert.reconstruct(&g).unwrap();
            prop_assert!(rebuilt.frobenius_diff(&cert.s_star) <= 1e-12, "{:?}", cert.variant);
            prop_assert!(cert.s_star.asymmetry() <= 1e-12);
            let report = verify_default(&cert);
            prop_assert!(report.null_residual <= 1e-9 * n, "{:?}: {}", cert.variant, report.null_residual);
        }
    }
}

#[test]
fn valid_certificate_implies_recovery() {
    let opts = harness_solve_options();
    let points = [
        TrialPoint::new(ModelSpec::binary(60, 12.0, 1.0, 0.5).unwrap(), Method::Binary).unwrap(),
        TrialPoint::new(ModelSpec::binary(60, 12.0, 1.0, 0.3).unwrap(), Method::Penalized(LambdaChoice::Oracle))
            .unwrap(),
        TrialPoint::new(ModelSpec::censored(40, 8.0, 0.05).unwrap(), Method::Censored).unwrap(),
        TrialPoint::new(ModelSpec::multi(36, 3, 9.0, 0.5).unwrap(), Method::Multi).unwrap(),
    ];
    let (mut total, mut valid) = (0, 0);
    for (idx, point) in points.iter().enumerate() {
        for t in 0..15 {
            let rec = run_trial(point, 7_000 + 100 * idx as u64 + t, &opts).unwrap();
            total += 1;
            if rec.cert_valid {
                valid += 1;
                assert!(rec.rounded_match, "{} seed {}: certificate valid but rounding missed", rec.variant, rec.seed);
            }
        }
    }
    assert!(total >= 50);
    assert!(valid >= total / 2, "only {valid} of {total} certificates valid");
}

#[test]
fn certificate_rate_increases_with_a() {
    let n = 300;
    let trials = 20;
    let mut rates = Vec::new();
    for eta_target in [0.6f64, 1.0, 1.5] {
        let a = (1.0 + (2.0 * eta_target).sqrt()).powi(2);
        let spec = ModelSpec::binary(n, a, 1.0, 0.5).unwrap();
        let lambda = tau(a, 1.0).unwrap() * spec.log_n() / n as f64;
        let mut valid = 0;
        for t in 0..trials {
            let (truth, g) = generate(&spec, 20_000 + t).unwrap();
            if verify_default(&binary_certificate(&g, &truth, lambda).unwrap()).valid {
                valid += 1;
            }
        }
        rates.push(valid);
    }
    for w in rates.windows(2) {
        let overlap = wilson_interval(w[0], trials as usize).0 <= wilson_interval(w[1], trials as usize).1;
        assert!(w[1] >= w[0] || overlap, "{rates:?}");
    }
    assert!(rates[2] > rates[0], "{rates:?}");
}

#[test]
fn multi_degree_gap_above_threshold() {
    let n = 300;
    let r = 3;
    let a = (1.0 + 3f64.sqrt() + 0.7).powi(2);
    let spec = ModelSpec::multi(n, r, a, 1.0).unwrap();
    let log_n = spec.log_n();
    let bar = log_n / log_n.ln();
    let trials = 20;
    let violations = (0..trials)
        .filter(|&t| {
            let (truth, g) = generate(&spec, 30_000 + t).unwrap();
            swap_witness(&g, &truth).unwrap().min_s_minus_r <= bar
        })
        .count();
    assert!(violations * 5 <= trials as usize, "{violations} of {trials} below {bar}");
}
