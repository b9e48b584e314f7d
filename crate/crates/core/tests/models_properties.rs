use blocksdp::models::io::write_graph;
use blocksdp::models::{
    generate, generate_with, partition_to_matrix, z_from_y, Alphabet, Encoding, GenerateOptions, ModelSpec, Partition,
    OUTLIER,
};
use proptest::prelude::*;

fn arb_spec() -> impl Strategy<Value = ModelSpec> {
    prop_oneof![
        (4usize..40, 0.5f64..3.0, 0.05f64..0.5, 0.0f64..0.6).prop_map(|(n, a, rho, frac)| {
            let cap = n as f64 / (n as f64).ln();
            let a = (a * 0.3 * cap).max(0.2);
            ModelSpec::binary(n, a, a * frac.max(0.01), rho).unwrap()
        }),
        (2usize..5, 2usize..10, 0.1f64..1.0).prop_map(|(r, k, s)| {
            let n = r * k;
            let a = s * n as f64 / (n as f64).ln();
            ModelSpec::multi(n, r, a, a * 0.3).unwrap()
        }),
        (4usize..40, 0.1f64..1.0, 0.0f64..0.5)
            .prop_map(|(n, s, eps)| { ModelSpec::censored(n, s * n as f64 / (n as f64).ln(), eps).unwrap() }),
        (1usize..8, 1usize..8, 0usize..6, 0.1f64..1.0).prop_map(|(k1, k2, out, s)| {
            let n = k1.max(k2) + k1.min(k2) + out;
            let a = s * n as f64 / (n as f64).ln();
            ModelSpec::general(n, vec![k1.max(k2), k1.min(k2)], a, a * 0.5).unwrap()
        }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generated_graphs_are_well_formed(spec in arb_spec(), seed in any::<u64>(), shuffle in any::<bool>()) {
        let (truth, g) = generate_with(&spec, seed, GenerateOptions { shuffle }).unwrap();
        let n = spec.n;
        prop_assert_eq!(g.n(), n);
        prop_assert_eq!(truth.n(), n);
        for i in 0..n {
            prop_assert_eq!(g.get(i, i), 0);
            for j in 0..n {
                prop_assert_eq!(g.get(i, j), g.get(j, i));
                prop_assert!(g.alphabet().contains(g.get(i, j)));
            }
        }
        let expected = if spec.variant == blocksdp::models::Variant::Censored {
            Alphabet::PlusMinusOne
        } else {
            Alphabet::ZeroOne
        };
        prop_assert_eq!(g.alphabet(), expected);
        let mut sizes = truth.sizes();
        let mut want = spec.cluster_sizes();
        sizes.sort_unstable();
        want.sort_unstable();
        prop_assert_eq!(sizes, want);
        prop_assert_eq!(truth.outliers(), spec.outlier_count());
    }

    #[test]
    fn generation_is_deterministic(spec in arb_spec(), seed in any::<u64>()) {
        let (t1, g1) = generate(&spec, seed).unwrap();
        let (t2, g2) = generate(&spec, seed).unwrap();
        prop_assert_eq!(write_graph(&g1), write_graph(&g2));
        prop_assert_eq!(t1.labels(), t2.labels());
    }

    #[test]
    fn z_from_y_matches_zmulti(signs in prop::collection::vec(any::<bool>(), 1..30)) {
        let s: Vec<f64> = signs.iter().map(|&b| if b { 1.0 } else { -1.0 }).collect();
        let p = Partition::from_signs(&s);
        let y = partition_to_matrix(&p, Encoding::Ybinary).unwrap();
        let z = z_from_y(&y, 2).unwrap();
        prop_assert_eq!(z.matrix, partition_to_matrix(&p, Encoding::Zmulti).unwrap().matrix);
    }
}

/// Two-sided 99.9% interval of `Binom(m, p)` from the exact CDF.
fn binomial_interval(m: u64, p: f64) -> (u64, u64) {
    if p <= 0.0 {
        return (0, 0);
    }
    if p >= 1.0 {
        return (m, m);
    }
    let (lo_q, hi_q) = (0.0005, 0.9995);
    let ratio = (p / (1.0 - p)).ln();
    let mut log_pmf = m as f64 * (1.0 - p).ln();
    let mut cdf = 0.0;
    let mut lo = None;
    for k in 0..=m {
        cdf += log_pmf.exp();
        if lo.is_none() && cdf >= lo_q {
            lo = Some(k);
        }
        if cdf >= hi_q {
            return (lo.unwrap(), k);
        }
        log_pmf += ((m - k) as f64).ln() - ((k + 1) as f64).ln() + ratio;
    }
    (lo.unwrap_or(m), m)
}

#[test]
fn binomial_interval_reference() {
    assert_eq!(binomial_interval(10, 0.5), (0, 10));
    let (lo, hi) = binomial_interval(10_000, 0.5);
    assert!((4830..=4840).contains(&lo) && (5160..=5170).contains(&hi));
}

/// Pair counts and edge counts per block: in-cluster, cross-cluster, outlier.
fn block_counts(truth: &Partition, g: &blocksdp::models::Graph) -> [(u64, u64); 3] {
    let n = truth.n();
    let mut out = [(0u64, 0u64); 3];
    for i in 0..n {
        for j in (i + 1)..n {
            let (li, lj) = (truth.label(i), truth.label(j));
            let slot = if li == OUTLIER || lj == OUTLIER {
                2
            } else if li == lj {
                0
            } else {
                1
            };
            out[slot].0 += 1;
            out[slot].1 += (g.get(i, j) != 0) as u64;
        }
    }
    out
}

#[test]
fn block_edge_counts_within_binomial_intervals() {
    let specs = [
        ModelSpec::binary(200, 12.0, 2.0, 0.5).unwrap(),
        ModelSpec::binary(300, 16.0, 2.0, 0.25).unwrap(),
        ModelSpec::multi(300, 3, 15.0, 3.0).unwrap(),
        ModelSpec::general(240, vec![100, 80], 14.0, 2.0).unwrap(),
    ];
    for spec in &specs {
        for seed in 0..5 {
            let (truth, g) = generate(spec, 1000 + seed).unwrap();
            let probs = [spec.p(), spec.q(), spec.q()];
            for (slot, &(pairs, edges)) in block_counts(&truth, &g).iter().enumerate() {
                if pairs == 0 {
                    continue;
                }
                let (lo, hi) = binomial_interval(pairs, probs[slot]);
                assert!(
                    (lo..=hi).contains(&edges),
                    "{:?} seed {seed} block {slot}: {edges} edges outside [{lo}, {hi}]",
                    spec.variant
                );
            }
        }
    }
}

#[test]
fn censored_counts_within_binomial_intervals() {
    let n = 300usize;
    let spec = ModelSpec::censored(n, 6.0, 0.2).unwrap();
    let pairs = (n * (n - 1) / 2) as u64;
    for seed in 0..5 {
        let (truth, g) = generate(&spec, 2000 + seed).unwrap();
        let sigma = truth.signs().unwrap();
        let mut nonzero = 0u64;
        let mut disagree = 0u64;
        for (i, j, v) in g.upper_nonzeros() {
            nonzero += 1;
            if (v as f64) * sigma[i] * sigma[j] < 0.0 {
                disagree += 1;
            }
        }
        let (lo, hi) = binomial_interval(pairs, spec.p());
        assert!((lo..=hi).contains(&nonzero), "seed {seed}: {nonzero} outside [{lo}, {hi}]");
        let (lo, hi) = binomial_interval(pairs, spec.p() * 0.2);
        assert!((lo..=hi).contains(&disagree), "seed {seed}: {disagree} outside [{lo}, {hi}]");
    }
}
