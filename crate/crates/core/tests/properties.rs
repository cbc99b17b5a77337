use std::f64::consts::PI;

use proptest::prelude::*;

use sdp_gap::appendix::{inverse_residual, numeric_inverse, q_inverse_closed_form, row_sum_theorem_check, QMatrix};
use sdp_gap::kcycle::{kcycle_analytic_a, kcycle_structured_objective, kcycle_cost_matrix, kcycle_objective, expand_kcycle_family};
use sdp_gap::linalg::{jacobi_eigenvalues, kron, spectrum, BlockKron};
use sdp_gap::lp_bridge::{compare_verdicts, simplex_solve, LpProblem, LpStatus};
use sdp_gap::polytope::{subtour_check, EdgeVector};
use sdp_gap::tsp_sdp::{assemble_psd_matrix, verify_feasibility, CandidateSolution, SdpInstance};
use sdp_gap::witness::{a_hat, b_hat, b_hat_closed_form, cut_cost_matrix, expand_family, structured_constraint_spectrum, StructuredFamily};
use sdp_gap::{CirculantSpec, SymMat};

fn sym_matrix(max_n: usize) -> impl Strategy<Value = SymMat> {
    (2..=max_n).prop_flat_map(|n| {
        prop::collection::vec(-3.0..3.0f64, n * n).prop_map(move |v| SymMat::from_fn(n, |i, j| v[i * n + j]))
    })
}

/// Even n with a group count dividing it into groups of at least 2.
fn layout() -> impl Strategy<Value = (usize, usize)> {
    prop_oneof![
        (3usize..=16).prop_map(|d| (2 * d, 2)),
        Just((12, 3)),
        Just((24, 3)),
        Just((12, 4)),
        Just((24, 4)),
        Just((30, 5)),
    ]
}

fn family() -> impl Strategy<Value = StructuredFamily> {
    layout().prop_flat_map(|(n, g)| {
        prop::collection::vec(0.0..1.0f64, n / 2).prop_map(move |w| {
            // Within-group entries must sum to one across the d matrices.
            let total: f64 = w.iter().sum::<f64>() + 1e-9;
            let mut a: Vec<f64> = w.iter().map(|x| x / total).collect();
            let rest = 1.0 - a.iter().sum::<f64>();
            a[0] += rest;
            StructuredFamily::from_a(n, g, a).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn jacobi_preserves_trace_and_frobenius(m in sym_matrix(10)) {
        let s = jacobi_eigenvalues(&m, 1e-12).unwrap();
        prop_assert!((s.sum() - m.trace()).abs() < 1e-9);
        let sq: f64 = s.eigenvalues().iter().map(|v| v * v).sum();
        prop_assert!((sq - m.inner(&m)).abs() < 1e-8 * (1.0 + sq));
    }

    #[test]
    fn circulant_closed_form_matches_jacobi(half in prop::collection::vec(-2.0..2.0f64, 2..12)) {
        let n = 2 * half.len() - 1;
        let mut row = vec![0.0; n];
        row[0] = half[0];
        for j in 1..half.len() {
            row[j] = half[j];
            row[n - j] = half[j];
        }
        let spec = CirculantSpec::new(row).unwrap();
        let m = spec.to_matrix().unwrap();
        let closed = sdp_gap::linalg::circulant_eigenvalues(&spec).unwrap();
        let jac = jacobi_eigenvalues(&m, 1e-13).unwrap();
        prop_assert!(closed.max_abs_diff(&jac) < 1e-9);
    }

    #[test]
    fn block_kron_closed_form_matches_jacobi(
        alpha in -2.0..2.0f64,
        b in prop::collection::vec(-8i32..8, 9),
        m in 2usize..6,
    ) {
        // Dyadic entries keep the detection exact.
        let alpha = (alpha * 8.0).round() / 8.0;
        let block = SymMat::from_fn(3, |i, j| b[i.min(j) * 3 + i.max(j)] as f64 / 8.0);
        let mat = kron(&block, &SymMat::all_ones(m)).shift(alpha);
        let bk = BlockKron::detect_with(&mat, m).unwrap();
        let closed = bk.eigenvalues().unwrap();
        let jac = jacobi_eigenvalues(&mat, 1e-13).unwrap();
        prop_assert!(closed.max_abs_diff(&jac) < 1e-9);
    }

    #[test]
    fn b_hat_identity_holds(fam in family()) {
        for k in 1..=fam.d() {
            let ak = a_hat(&fam, k).unwrap();
            let bk = b_hat(&fam, k).unwrap();
            prop_assert!((bk - b_hat_closed_form(&fam, ak)).abs() < 1e-10);
        }
    }

    #[test]
    fn structured_spectrum_matches_assembled(fam in family()) {
        let sol = expand_family(&fam);
        for k in 1..=fam.d() {
            let closed = structured_constraint_spectrum(&fam, k).unwrap();
            let direct = spectrum(&assemble_psd_matrix(&sol, k).unwrap()).unwrap();
            prop_assert!(closed.max_abs_diff(&direct) < 1e-8);
        }
    }

    #[test]
    fn range_test_agrees_with_eigenvalues(fam in family()) {
        let (_, first) = compare_verdicts(&fam, 1e-8).unwrap();
        prop_assert_eq!(first, None);
    }

    #[test]
    fn expanded_rows_follow_coupling(fam in family()) {
        prop_assert!(row_sum_theorem_check(&expand_family(&fam), 1e-10));
    }

    #[test]
    fn feasibility_invariant_under_relabelling(fam in family(), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let n = fam.n();
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
        let inst = SdpInstance::with_metric_check(cut_cost_matrix(n).unwrap(), false).unwrap();
        let sol = expand_family(&fam);
        let a = verify_feasibility(&inst, &sol, 1e-8).unwrap();
        let b = verify_feasibility(&inst, &sol.permuted(&perm), 1e-8).unwrap();
        prop_assert_eq!(a.feasible, b.feasible);
        for (x, y) in a.psd_min_eigs.iter().zip(&b.psd_min_eigs) {
            prop_assert!((x - y).abs() < 1e-8);
        }
    }

    #[test]
    fn convex_combinations_keep_sum_constraint(fam1 in family(), w in 0.0..1.0f64) {
        let fam2 = StructuredFamily::from_a(fam1.n(), fam1.groups(), vec![1.0 / fam1.d() as f64; fam1.d()]).unwrap();
        let (s1, s2) = (expand_family(&fam1), expand_family(&fam2));
        let mix = CandidateSolution::convex_combination(&[(w, &s1), (1.0 - w, &s2)]).unwrap();
        let inst = SdpInstance::with_metric_check(cut_cost_matrix(fam1.n()).unwrap(), false).unwrap();
        let r = verify_feasibility(&inst, &mix, 1e-8).unwrap();
        prop_assert!(r.sum_ok);
    }

    #[test]
    fn q_inverse_matches_elimination(n in 5usize..48) {
        let q = QMatrix::new(n).unwrap();
        let inv = q_inverse_closed_form(&q).unwrap();
        prop_assert!(inverse_residual(q.entries(), &inv) < 1e-9);
        let num = numeric_inverse(q.entries()).unwrap();
        for (i, row) in num.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                prop_assert!((inv.get(i, j) - v).abs() < 1e-8);
                prop_assert!(inv.get(i, j) <= 1e-12);
            }
        }
    }

    #[test]
    fn simplex_optimum_is_feasible_and_dominates(
        c in prop::collection::vec(-1.0..1.0f64, 3),
        rows in prop::collection::vec((prop::collection::vec(0.0..1.0f64, 3), 0.5..2.0f64), 1..5),
        start in prop::collection::vec(0.0..0.1f64, 3),
    ) {
        // Nonnegative rows with positive right-hand sides: bounded and
        // feasible, with `start` feasible whenever it satisfies every row.
        let mut lp = LpProblem::new(c);
        for (coef, rhs) in &rows {
            lp.add_le(coef.clone(), *rhs);
        }
        lp.bounds = vec![(0.0, 5.0); 3];
        let s = simplex_solve(&lp).unwrap();
        prop_assert_eq!(s.status, LpStatus::Optimal);
        prop_assert!(lp.violations(&s.x, 1e-8).is_empty());
        prop_assert!((s.objective_value - lp.objective_value(&s.x)).abs() < 1e-9);
        if lp.violations(&start, 0.0).is_empty() {
            prop_assert!(s.objective_value >= lp.objective_value(&start) - 1e-9);
        }
    }

    #[test]
    fn tours_satisfy_subtour_rows(perm in Just((0..9usize).collect::<Vec<_>>()).prop_shuffle()) {
        let r = subtour_check(&EdgeVector::from_tour(9, &perm), 1e-12).unwrap();
        prop_assert!(r.feasible());
    }
}

#[test]
fn kcycle_bounds_over_grid() {
    for k in 2..=7usize {
        for c in 1..=8usize {
            let n = c * k * (k + 1);
            if n > 128 || (k % 2 == 0 && c % 2 == 1) {
                continue;
            }
            let fam = kcycle_analytic_a(k, c).unwrap();
            let d = (n / 2) as f64;
            assert!(fam.b(k) <= PI * PI / (c as f64 * d * d * (k as f64 + 1.0)) + 1e-10, "k={k} c={c}");
            assert!((fam.a_values().iter().sum::<f64>() - 1.0).abs() < 1e-10);
            let lower = -1.0 / ((c * k) as f64 - 1.0);
            for j in 1..=fam.d() {
                let aj = a_hat(&fam, j).unwrap();
                assert!(aj >= lower - 1e-10 && aj <= 1.0 + 1e-10);
                // b⁽ʲ⁾ = −1/(ck²) − (ck − 1)/(ck²)·a⁽ʲ⁾
                let ck2 = (c * k * k) as f64;
                let want = -1.0 / ck2 - ((c * k) as f64 - 1.0) / ck2 * aj;
                assert!((b_hat(&fam, j).unwrap() - want).abs() < 1e-10);
            }
            let inst = kcycle_cost_matrix(k, c).unwrap();
            let sol = expand_kcycle_family(&inst, &fam).unwrap();
            let direct = kcycle_objective(&inst, &sol).unwrap();
            assert!((direct - kcycle_structured_objective(k, c, &fam)).abs() < 1e-9);
        }
    }
}
