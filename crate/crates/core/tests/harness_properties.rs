use blocksdp::harness::{
    harness_solve_options, phase_sweep, read_records, wilson_interval, GridPoint, Method, SuccessCriterion, SweepConfig,
};

fn censored_sweep(grid: &[(f64, f64)], trials: usize, seed_base: u64) -> SweepConfig {
    SweepConfig {
        method: Method::Censored,
        n: 60,
        grid: grid.iter().map(|&(a, eps)| GridPoint { a, b: None, rho: None, r: None, eps: Some(eps) }).collect(),
        sizes: None,
        trials,
        seed_base,
        solver: harness_solve_options(),
        criterion: SuccessCriterion::RoundedMatch,
    }
}

#[test]
fn success_rate_is_monotone_in_a() {
    let config = censored_sweep(&[(1.0, 0.1), (2.5, 0.1), (6.0, 0.1), (12.0, 0.1)], 12, 60_000);
    let res = phase_sweep::<Vec<u8>>(&config, None).unwrap();
    let counts: Vec<usize> = res.summaries.iter().map(|s| s.successes).collect();
    for w in counts.windows(2) {
        let overlap = wilson_interval(w[0], config.trials).0 <= wilson_interval(w[1], config.trials).1;
        assert!(w[1] >= w[0] || overlap, "{counts:?}");
    }
    assert!(counts[3] > counts[0], "{counts:?}");
}

#[test]
fn verdicts_agree_well_above_threshold() {
    let config = censored_sweep(&[(12.0, 0.05)], 20, 61_000);
    let res = phase_sweep::<Vec<u8>>(&config, None).unwrap();
    let agree = res.records.iter().filter(|r| r.recovered == r.cert_valid).count();
    assert!(agree * 10 >= 9 * res.records.len(), "{agree} of {}", res.records.len());
}

#[test]
fn streamed_csv_matches_records() {
    let config = censored_sweep(&[(3.0, 0.1), (8.0, 0.0)], 3, 62_000);
    let mut w = csv::Writer::from_writer(Vec::new());
    let res = phase_sweep(&config, Some(&mut w)).unwrap();
    let back = read_records(&w.into_inner().unwrap()[..]).unwrap();
    assert_eq!(back, res.records);
    for rec in &back {
        assert!(rec.margin.is_finite());
        assert_eq!(rec.variant, "censored");
    }
}
