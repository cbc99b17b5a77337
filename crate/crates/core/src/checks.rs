//! Named batteries of invariant checks, grouped by module. Each check
//! returns a pass/fail verdict and a short detail string; a suite run is
//! deterministic given its seed.

use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::appendix::{derive_upper_bounds, numeric_inverse, q_inverse_closed_form, row_sum_perturbation, row_sum_theorem_check, QMatrix};
use crate::error::{Error, Result};
use crate::kcycle::{a_hat_case_value, kcycle_analytic_a, kcycle_gap_certificate};
use crate::linalg::{circulant_eigenvalues, jacobi_eigenvalues, spectrum};
use crate::lp_bridge::{build_tsp_lp, equivalence_report, simplex_solve, LpStatus};
use crate::polytope::{mst_crossover, n5_equivalence_check, subtour_check, EdgeVector};
use crate::spectral::{h_value, verify_cvetkovic};
use crate::tsp_sdp::{assemble_psd_matrix, cycle_constraint_spectrum, cycle_solution, verify_feasibility, CandidateSolution, SdpInstance};
use crate::witness::{analytic_a, b_hat, cut_cost_matrix, expand_family, gap_certificate, structured_cost};
use crate::{CirculantSpec, SymMat};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    All,
    Linalg,
    Sdp,
    Lp,
    Spectral,
    Kcycle,
    Polytope,
    Appendix,
}

impl Suite {
    pub const NAMES: [&'static str; 8] = ["all", "linalg", "sdp", "lp", "spectral", "kcycle", "polytope", "appendix"];

    fn members(self) -> Vec<Suite> {
        match self {
            Suite::All => vec![
                Suite::Linalg,
                Suite::Sdp,
                Suite::Lp,
                Suite::Spectral,
                Suite::Kcycle,
                Suite::Polytope,
                Suite::Appendix,
            ],
            s => vec![s],
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "all" => Suite::All,
            "linalg" => Suite::Linalg,
            "sdp" => Suite::Sdp,
            "lp" => Suite::Lp,
            "spectral" => Suite::Spectral,
            "kcycle" => Suite::Kcycle,
            "polytope" => Suite::Polytope,
            "appendix" => Suite::Appendix,
            other => return Err(Error::Domain(format!("unknown suite {other:?}"))),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub suite: Suite,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckSummary {
    pub suite: Suite,
    pub seed: u64,
    pub passed: bool,
    pub total: usize,
    pub failed: usize,
    pub first_failure: Option<String>,
    pub checks: Vec<CheckResult>,
}

struct Recorder {
    suite: Suite,
    out: Vec<CheckResult>,
}

impl Recorder {
    fn record(&mut self, name: &str, outcome: Result<(bool, String)>) {
        let (passed, detail) = outcome.unwrap_or_else(|e| (false, format!("error: {e}")));
        self.out.push(CheckResult {
            suite: self.suite,
            name: name.to_string(),
            passed,
            detail,
        });
    }
}

pub fn run_suite(suite: Suite, seed: u64) -> CheckSummary {
    let mut checks = Vec::new();
    for s in suite.members() {
        let mut rec = Recorder { suite: s, out: Vec::new() };
        // Each suite draws from its own stream so suites stay reproducible
        // whether run alone or under `all`.
        let mut sub = ChaCha8Rng::seed_from_u64(seed ^ (s as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        match s {
            Suite::Linalg => linalg_checks(&mut rec, &mut sub),
            Suite::Sdp => sdp_checks(&mut rec, &mut sub),
            Suite::Lp => lp_checks(&mut rec, &mut sub),
            Suite::Spectral => spectral_checks(&mut rec),
            Suite::Kcycle => kcycle_checks(&mut rec, &mut sub),
            Suite::Polytope => polytope_checks(&mut rec, seed),
            Suite::Appendix => appendix_checks(&mut rec, &mut sub),
            Suite::All => unreachable!(),
        }
        checks.extend(rec.out);
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    CheckSummary {
        suite,
        seed,
        passed: failed == 0,
        total: checks.len(),
        failed,
        first_failure: checks.iter().find(|c| !c.passed).map(|c| c.name.clone()),
        checks,
    }
}

fn even_range(lo: usize, hi: usize) -> impl Iterator<Item = usize> {
    (lo..=hi).step_by(2)
}

fn linalg_checks(rec: &mut Recorder, rng: &mut ChaCha8Rng) {
    rec.record("circulant_vs_jacobi", (|| {
        let mut worst: f64 = 0.0;
        for n in 3..=24 {
            let mut row: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            for j in 1..n {
                row[n - j] = row[j];
            }
            let spec = CirculantSpec::new(row)?;
            let m = spec.to_matrix()?;
            let closed = circulant_eigenvalues(&spec)?;
            let jac = jacobi_eigenvalues(&m, 1e-13)?;
            worst = worst.max(closed.max_abs_diff(&jac));
        }
        Ok((worst <= 1e-9, format!("max deviation {worst:e}")))
    })());
    rec.record("jacobi_trace_preserved", (|| {
        let mut worst: f64 = 0.0;
        for n in [2, 5, 9, 16] {
            let m = SymMat::from_fn(n, |_, _| rng.gen_range(-2.0..2.0));
            let s = jacobi_eigenvalues(&m, 1e-13)?;
            worst = worst.max((s.sum() - m.trace()).abs());
        }
        Ok((worst <= 1e-9, format!("max trace deviation {worst:e}")))
    })());
}

fn sdp_checks(rec: &mut Recorder, rng: &mut ChaCha8Rng) {
    rec.record("cycle_solution_spectrum", (|| {
        for n in even_range(4, 32) {
            let sol = cycle_solution(n)?;
            for k in 1..=n / 2 {
                let m = assemble_psd_matrix(&sol, k)?;
                let want = cycle_constraint_spectrum(n, k);
                if !spectrum(&m)?.matches_multiset(&want, 1e-8) {
                    return Ok((false, format!("n = {n}, k = {k}")));
                }
            }
        }
        Ok((true, "even n in [4, 32]".into()))
    })());
    rec.record("witness_feasible", (|| {
        for n in even_range(6, 64) {
            let cert = gap_certificate(n, 1e-8)?;
            if (cert.sdp_cost - structured_cost(&analytic_a(n)?)).abs() > 1e-10 {
                return Ok((false, format!("cost mismatch at n = {n}")));
            }
        }
        Ok((true, "even n in [6, 64]".into()))
    })());
    rec.record("relabelling_invariance", (|| {
        for n in [6, 10, 14] {
            let inst = SdpInstance::new(cut_cost_matrix(n)?)?;
            let sol = expand_family(&analytic_a(n)?);
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(rng);
            let base = verify_feasibility(&inst, &sol, 1e-8)?;
            let moved = verify_feasibility(&inst, &sol.permuted(&perm), 1e-8)?;
            if base.feasible != moved.feasible {
                return Ok((false, format!("n = {n}")));
            }
        }
        Ok((true, "feasibility unchanged under relabelling".into()))
    })());
    rec.record("sdp_cost_decreasing", (|| {
        let costs = even_range(6, 64)
            .map(|n| analytic_a(n).map(|f| structured_cost(&f)))
            .collect::<Result<Vec<_>>>()?;
        let ok = costs.windows(2).all(|w| w[1] < w[0]);
        Ok((ok, format!("{} values", costs.len())))
    })());
}

fn lp_checks(rec: &mut Recorder, rng: &mut ChaCha8Rng) {
    rec.record("lp_optimum_dominates_analytic", (|| {
        for n in even_range(6, 40) {
            let lp = build_tsp_lp(n)?;
            let s = simplex_solve(&lp)?;
            if s.status != LpStatus::Optimal || s.x[0] < analytic_a(n)?.a(1) - 1e-8 {
                return Ok((false, format!("n = {n}: {:?}", s.status)));
            }
            if (s.objective_value - lp.objective_value(&s.x)).abs() > 1e-9 {
                return Ok((false, format!("objective mismatch at n = {n}")));
            }
            let fam = crate::witness::StructuredFamily::two_group(s.x.clone())?;
            let inst = SdpInstance::new(cut_cost_matrix(n)?)?;
            if !verify_feasibility(&inst, &expand_family(&fam), 1e-8)?.feasible {
                return Ok((false, format!("LP optimum not SDP-feasible at n = {n}")));
            }
        }
        Ok((true, "even n in [6, 40]".into()))
    })());
    rec.record("lp_sdp_equivalence", (|| {
        for n in [6, 10, 16] {
            let r = equivalence_report(n, 2, 50, rng)?;
            if r.disagreements > 0 {
                return Ok((false, format!("n = {n}: {:?}", r.first_disagreement)));
            }
        }
        Ok((true, "50 families each at n = 6, 10, 16".into()))
    })());
}

fn spectral_checks(rec: &mut Recorder) {
    rec.record("cvetkovic_tightness", (|| {
        let mut worst: f64 = 0.0;
        for n in even_range(6, 64) {
            let inst = SdpInstance::new(cut_cost_matrix(n)?)?;
            let x1 = expand_family(&analytic_a(n)?).mat(1).clone();
            let r = verify_cvetkovic(&inst, &x1, 1e-8)?;
            if !r.feasible {
                return Ok((false, format!("n = {n} infeasible")));
            }
            worst = worst.max((r.lambda2 - h_value(n)).abs());
        }
        Ok((worst <= 1e-9, format!("max |lambda2 - h_n| {worst:e}")))
    })());
}

fn kcycle_checks(rec: &mut Recorder, rng: &mut ChaCha8Rng) {
    let params = [(2, 2), (2, 4), (3, 1), (3, 2), (4, 2), (5, 1)];
    rec.record("kcycle_certificates", (|| {
        for (k, c) in params {
            kcycle_gap_certificate(k, c, 1e-8)?;
        }
        Ok((true, format!("{} parameter pairs", params.len())))
    })());
    rec.record("kcycle_identities", (|| {
        for (k, c) in params {
            let fam = kcycle_analytic_a(k, c)?;
            let d = fam.d() as f64;
            let bound = std::f64::consts::PI.powi(2) / (c as f64 * d * d * (k as f64 + 1.0));
            if fam.b(k) > bound + 1e-10 {
                return Ok((false, format!("b_k bound at k = {k}, c = {c}")));
            }
            for j in 1..=fam.d() {
                b_hat(&fam, j)?;
                let a = crate::witness::a_hat(&fam, j)?;
                if (a - a_hat_case_value(k, c, j)).abs() > 1e-10 {
                    return Ok((false, format!("case table at k = {k}, c = {c}, j = {j}")));
                }
            }
        }
        Ok((true, "b_k bound, identity, case table".into()))
    })());
    rec.record("kcycle_equivalence", (|| {
        for (k, c) in [(2, 2), (3, 1), (2, 4)] {
            let n = c * k * (k + 1);
            let r = equivalence_report(n, k + 1, 30, rng)?;
            if r.disagreements > 0 {
                return Ok((false, format!("k = {k}, c = {c}")));
            }
        }
        Ok((true, "30 families each".into()))
    })());
}

fn polytope_checks(rec: &mut Recorder, seed: u64) {
    rec.record("witness_subtour_violation", (|| {
        for n in even_range(6, 16) {
            let fam = analytic_a(n)?;
            let x = EdgeVector::from_solution_matrix(expand_family(&fam).mat(1))?;
            let r = subtour_check(&x, 1e-9)?;
            let group: Vec<usize> = (0..n / 2).collect();
            let other: Vec<usize> = (n / 2..n).collect();
            let on_group = r.cut.worst_set == group || r.cut.worst_set == other;
            if !r.cut.violated || !on_group || (r.cut.value - structured_cost(&fam)).abs() > 1e-10 {
                return Ok((false, format!("n = {n}")));
            }
        }
        Ok((true, "even n in [6, 16]".into()))
    })());
    rec.record("mst_crossover", (|| {
        let (rows, first) = mst_crossover(40, 1e-9)?;
        let Some(first) = first else {
            return Ok((false, "no violation up to 40".into()));
        };
        let persists = rows.iter().filter(|r| r.n >= first).all(|r| r.violated);
        Ok((persists, format!("first violation at n = {first}")))
    })());
    rec.record("n5_equivalence", Ok((n5_equivalence_check(seed, 50), "50 probes".into())));
}

fn appendix_checks(rec: &mut Recorder, rng: &mut ChaCha8Rng) {
    rec.record("q_inverse", (|| {
        let mut worst: f64 = 0.0;
        for n in 5..=40 {
            let q = QMatrix::new(n)?;
            let closed = q_inverse_closed_form(&q)?;
            let numeric = numeric_inverse(q.entries())?;
            for (i, row) in numeric.iter().enumerate() {
                for (j, &v) in row.iter().enumerate() {
                    worst = worst.max((closed.get(i, j) - v).abs());
                }
            }
        }
        Ok((worst <= 1e-8, format!("max deviation from elimination {worst:e}")))
    })());
    rec.record("row_sums_and_upper_bounds", (|| {
        for n in [6, 8, 10] {
            let base = cycle_solution(n)?;
            let witness = expand_family(&analytic_a(n)?);
            for sol in [&base, &witness] {
                if !row_sum_theorem_check(sol, 1e-10) || !derive_upper_bounds(sol, 1e-8) {
                    return Ok((false, format!("n = {n}")));
                }
            }
            for _ in 0..5 {
                let perms: Vec<CandidateSolution> = (0..3)
                    .map(|_| {
                        let mut p: Vec<usize> = (0..n).collect();
                        p.shuffle(rng);
                        base.permuted(&p)
                    })
                    .collect();
                let w: Vec<f64> = (0..3).map(|_| rng.gen::<f64>() + 0.01).collect();
                let t: f64 = w.iter().sum();
                let parts: Vec<(f64, &CandidateSolution)> = w.iter().map(|x| x / t).zip(&perms).collect();
                let mix = CandidateSolution::convex_combination(&parts)?;
                if !row_sum_theorem_check(&mix, 1e-10) {
                    return Ok((false, format!("mixture at n = {n}")));
                }
            }
        }
        Ok((true, "cycles, witnesses, mixtures".into()))
    })());
    rec.record("row_sum_perturbation", (|| {
        let (lhs, rhs) = row_sum_perturbation(10, 0.05)?;
        Ok((lhs > rhs, format!("{lhs} > {rhs}")))
    })());
}

impl CheckSummary {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summary serialises")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for name in Suite::NAMES {
            let s: Suite = name.parse().unwrap();
            assert_eq!(serde_json::to_value(s).unwrap(), name);
        }
        assert!("bogus".parse::<Suite>().is_err());
    }

    #[test]
    fn appendix_suite_passes() {
        let s = run_suite(Suite::Appendix, 0);
        assert!(s.passed, "{}", s.to_json());
    }
}
