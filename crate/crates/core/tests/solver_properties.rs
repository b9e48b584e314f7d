use blocksdp::matrix::Matrix;
use blocksdp::models::{generate, Alphabet, Graph, ModelSpec};
use blocksdp::oracle::{ml_censored, ml_multi};
use blocksdp::solver::{
    build_sdp_binary, build_sdp_censored, build_sdp_general, build_sdp_general_penalized, build_sdp_multi,
    build_sdp_penalized, project_constraints, project_psd, solve, DiagMode, SdpProblem, SolveOptions,
};
use proptest::prelude::*;

fn arb_symmetric(max_n: usize) -> impl Strategy<Value = Matrix> {
    (2..=max_n).prop_flat_map(|n| {
        prop::collection::vec(-5.0f64..5.0, n * n).prop_map(move |v| {
            let mut m = Matrix::from_row_major(n, v).unwrap();
            m.symmetrize();
            m
        })
    })
}

fn arb_graph(alphabet: Alphabet) -> impl Strategy<Value = Graph> {
    (3usize..12).prop_flat_map(move |n| {
        prop::collection::vec(-1i8..=1, n * (n - 1) / 2).prop_map(move |vals| {
            let mut g = Graph::empty(n, alphabet);
            let mut it = vals.into_iter();
            for i in 0..n {
                for j in (i + 1)..n {
                    let v = it.next().unwrap();
                    let v = if alphabet == Alphabet::ZeroOne { v.abs() } else { v };
                    g.set(i, j, v).unwrap();
                }
            }
            g
        })
    })
}

fn builders(g: &Graph) -> Vec<SdpProblem> {
    let n = g.n();
    let k = n / 2;
    let mut out = vec![
        build_sdp_binary(g, k).unwrap(),
        build_sdp_penalized(g, 0.3).unwrap(),
        build_sdp_general(g, n - 1, (n - 1) * (n - 1) / 2 + 1).unwrap(),
        build_sdp_general_penalized(g, 1.5, 0.2).unwrap(),
    ];
    if let Some(r) = (2..=n).find(|r| n % r == 0) {
        out.push(build_sdp_multi(g, n / r).unwrap());
    }
    let mut signed = Graph::empty(n, Alphabet::PlusMinusOne);
    for (i, j, v) in g.upper_nonzeros() {
        signed.set(i, j, if (i + j) % 2 == 0 { v } else { -v }).unwrap();
    }
    out.push(build_sdp_censored(&signed).unwrap());
    out
}

fn resize(m: &Matrix, n: usize) -> Matrix {
    Matrix::from_fn(n, |i, j| m[(i % m.n(), j % m.n())])
}

proptest! {
    #[test]
    fn psd_clip_is_exact(m in arb_symmetric(24)) {
        let p = project_psd(&m);
        prop_assert!(p.asymmetry() == 0.0 || p.asymmetry() <= 1e-14);
        prop_assert!(p.min_eigenvalue() >= -1e-12);
        prop_assert!(project_psd(&p).max_abs_diff(&p) <= 1e-10 * (1.0 + p.max_abs()));
    }

    #[test]
    fn constraint_projection_is_idempotent(g in arb_graph(Alphabet::ZeroOne), y in arb_symmetric(12)) {
        for problem in builders(&g) {
            let y = resize(&y, g.n());
            let once = project_constraints(&problem, &y).unwrap();
            let twice = project_constraints(&problem, &once).unwrap();
            let gap = twice.max_abs_diff(&once);
            prop_assert!(gap <= 1e-12 * (1.0 + once.max_abs()), "{problem:?}: {gap}");
        }
    }
}

fn check_feasible(problem: &SdpProblem, x: &Matrix, tol: f64) {
    let n = problem.n() as f64;
    for d in x.diag() {
        match problem.diag_mode {
            DiagMode::FixedOne => assert!((d - 1.0).abs() <= 10.0 * tol, "diag {d}"),
            DiagMode::AtMostOne => assert!(d <= 1.0 + 10.0 * tol, "diag {d}"),
        }
    }
    if let Some(c) = problem.j_inner {
        assert!((x.sum() - c).abs() <= 10.0 * tol * n, "<J, X> = {} vs {c}", x.sum());
    }
    if let Some(c) = problem.rowsum {
        for s in x.row_sums() {
            assert!((s - c).abs() <= 10.0 * tol * n, "row sum {s} vs {c}");
        }
    }
    if let Some(c) = problem.trace {
        assert!((x.trace() - c).abs() <= 10.0 * tol * n, "trace {} vs {c}", x.trace());
    }
    if problem.nonneg {
        assert!(x.min_entry() >= -10.0 * tol, "min entry {}", x.min_entry());
    }
    assert!(x.asymmetry() <= 1e-12);
    assert!(x.min_eigenvalue() >= -10.0 * tol);
}

#[test]
fn converged_output_is_feasible() {
    let opts = SolveOptions::default();
    let binary = ModelSpec::binary(30, 6.0, 1.0, 0.3).unwrap();
    let multi = ModelSpec::multi(24, 3, 6.0, 1.0).unwrap();
    let general = ModelSpec::general(30, vec![12, 10], 6.0, 1.0).unwrap();
    let censored = ModelSpec::censored(30, 5.0, 0.1).unwrap();
    for seed in 0..3 {
        let (_, g) = generate(&binary, seed).unwrap();
        let (_, gm) = generate(&multi, seed).unwrap();
        let (_, gg) = generate(&general, seed).unwrap();
        let (_, gc) = generate(&censored, seed).unwrap();
        let problems = [
            build_sdp_binary(&g, 9).unwrap(),
            build_sdp_penalized(&g, 0.5).unwrap(),
            build_sdp_multi(&gm, 8).unwrap(),
            build_sdp_general(&gg, 22, 244).unwrap(),
            build_sdp_general_penalized(&gg, 3.0, 0.4).unwrap(),
            build_sdp_censored(&gc).unwrap(),
        ];
        for problem in &problems {
            let res = solve(problem, &opts).unwrap();
            if res.converged {
                assert!(res.primal_residual <= opts.tol_primal && res.dual_residual <= opts.tol_dual);
                check_feasible(problem, &res.x, opts.tol_primal);
            }
        }
    }
}

/// Allowed shortfall of the numerical SDP value below the ML value.
const SANDWICH_TOL: f64 = 1e-5;

#[test]
fn relaxation_bounds_ml_from_above() {
    let opts = SolveOptions { max_iter: 20_000, tol_primal: 1e-7, tol_dual: 1e-7, ..SolveOptions::default() };
    let censored = ModelSpec::censored(10, 3.0, 0.2).unwrap();
    let multi = ModelSpec::multi(9, 3, 3.0, 1.0).unwrap();
    for seed in 0..10 {
        let (_, g) = generate(&censored, 500 + seed).unwrap();
        let ml = ml_censored(&g).unwrap();
        let res = solve(&build_sdp_censored(&g).unwrap(), &opts).unwrap();
        if res.converged {
            assert!(res.objective >= ml.objective as f64 - SANDWICH_TOL, "censored seed {seed}");
        }
        let (_, g) = generate(&multi, 600 + seed).unwrap();
        let ml = ml_multi(&g, 3, 3).unwrap();
        let res = solve(&build_sdp_multi(&g, 3).unwrap(), &opts).unwrap();
        if res.converged {
            assert!(res.objective >= ml.objective as f64 - SANDWICH_TOL, "multi seed {seed}");
        }
    }
}
