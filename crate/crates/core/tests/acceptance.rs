//! Acceptance suite. Runs as a plain binary (no libtest harness) so that one
//! PASS/FAIL line per criterion is always printed; exits nonzero if any fails.

use std::f64::consts::PI;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sdp_gap::appendix::{inverse_residual, q_inverse_closed_form, row_sum_theorem_check, QMatrix};
use sdp_gap::kcycle::{brute_force_kcycle, build_kcycle_certificate, kcycle_cost_matrix};
use sdp_gap::linalg::{circulant_eigenvalues, jacobi_eigenvalues};
use sdp_gap::lp_bridge::equivalence_report;
use sdp_gap::polytope::{mst_crossover, n5_report, subtour_check, EdgeVector};
use sdp_gap::spectral::{h_value, verify_cvetkovic};
use sdp_gap::tsp_sdp::{assemble_psd_matrix, cycle_constraint_spectrum, cycle_solution, CandidateSolution, SdpInstance};
use sdp_gap::witness::{analytic_a, build_gap_certificate, cut_cost_matrix, expand_family, structured_cost};
use sdp_gap::CirculantSpec;

type Outcome = Result<String, String>;

fn even(lo: usize, hi: usize) -> impl Iterator<Item = usize> {
    (lo..=hi).step_by(2)
}

fn witness_sweep() -> Outcome {
    let start = Instant::now();
    let mut worst_eig = f64::INFINITY;
    let mut worst_sum: f64 = 0.0;
    for n in even(6, 256) {
        let cert = build_gap_certificate(n, 1e-8).map_err(|e| format!("n = {n}: {e}"))?;
        let r = &cert.report;
        let min_eig = r.psd_min_eigs.iter().copied().fold(f64::INFINITY, f64::min);
        if min_eig < -1e-8 {
            return Err(format!("n = {n}: min eigenvalue {min_eig:e}"));
        }
        if r.min_entry < 0.0 {
            return Err(format!("n = {n}: negative entry {:e}", r.min_entry));
        }
        if r.sum_max_dev > 1e-10 {
            return Err(format!("n = {n}: sum deviation {:e}", r.sum_max_dev));
        }
        if !cert.feasible {
            return Err(format!("n = {n}: certificate not feasible"));
        }
        worst_eig = worst_eig.min(min_eig);
        worst_sum = worst_sum.max(r.sum_max_dev);
    }
    let secs = start.elapsed().as_secs_f64();
    if secs > 300.0 {
        return Err(format!("took {secs:.1}s"));
    }
    Ok(format!("min eig {worst_eig:.3e}, max sum dev {worst_sum:.3e}, {secs:.1}s"))
}

fn theorem_ratio() -> Outcome {
    for n in even(6, 256) {
        let fam = analytic_a(n).map_err(|e| e.to_string())?;
        let inst = SdpInstance::new(cut_cost_matrix(n).unwrap()).unwrap();
        let sol = expand_family(&fam);
        let cost = sdp_gap::tsp_sdp::objective(&inst, &sol).map_err(|e| e.to_string())?;
        let ratio = cost / 2.0;
        if ratio > PI * PI / (2.0 * n as f64) + 1e-10 {
            return Err(format!("n = {n}: ratio {ratio} above bound"));
        }
        if (cost - structured_cost(&fam)).abs() > 1e-10 {
            return Err(format!("n = {n}: cost {cost} vs closed form {}", structured_cost(&fam)));
        }
    }
    let cert = build_gap_certificate(6, 1e-8).map_err(|e| e.to_string())?;
    let checks = [
        (cert.a[0], 0.75, "a1"),
        (cert.b[0], 1.0 / 6.0, "b1"),
        (cert.sdp_cost, 1.5, "cost"),
        (cert.integer_opt, 2.0, "tsp opt"),
        (cert.ratio, 0.75, "ratio"),
    ];
    for (got, want, what) in checks {
        if (got - want).abs() > 1e-10 {
            return Err(format!("n = 6 {what}: {got} vs {want}"));
        }
    }
    Ok(format!("n = 6 ratio {:.12}", cert.ratio))
}

fn cycle_spectrum() -> Outcome {
    let mut worst: f64 = 0.0;
    for n in even(4, 64) {
        let sol = cycle_solution(n).map_err(|e| e.to_string())?;
        for k in 1..=n / 2 {
            let m = assemble_psd_matrix(&sol, k).map_err(|e| e.to_string())?;
            let want = cycle_constraint_spectrum(n, k);
            let spec = CirculantSpec::detect(&m).ok_or(format!("n = {n}, k = {k}: not circulant"))?;
            let closed = circulant_eigenvalues(&spec).map_err(|e| e.to_string())?;
            let jac = jacobi_eigenvalues(&m, 1e-12).map_err(|e| e.to_string())?;
            for (what, s) in [("closed form", &closed), ("jacobi", &jac)] {
                if !s.matches_multiset(&want, 1e-8) {
                    return Err(format!("n = {n}, k = {k}: {what} spectrum off"));
                }
            }
            worst = worst.max(closed.max_abs_diff(&jac));
        }
    }
    Ok(format!("closed form vs jacobi max deviation {worst:.3e}"))
}

fn lp_sdp_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut notes = Vec::new();
    for n in [6, 10, 16, 24, 32] {
        let r = equivalence_report(n, 2, 100, &mut rng).map_err(|e| e.to_string())?;
        if r.disagreements > 0 {
            return Err(format!("n = {n}: {} disagreements, first {:?}", r.disagreements, r.first_disagreement));
        }
        notes.push(format!("n={n}: {}/100 feasible", r.feasible));
    }
    Ok(notes.join(", "))
}

fn subtour_violation() -> Outcome {
    let x1 = expand_family(&analytic_a(6).unwrap()).mat(1).clone();
    let r = subtour_check(&EdgeVector::from_solution_matrix(&x1).unwrap(), 1e-9).map_err(|e| e.to_string())?;
    if !r.cut.violated || (r.cut.value - 1.5).abs() > 1e-12 || r.cut.rhs != 2.0 {
        return Err(format!("cut {:?}", r.cut));
    }
    if r.cut.worst_set != vec![0, 1, 2] {
        return Err(format!("worst set {:?} is not a group", r.cut.worst_set));
    }
    Ok(format!("worst set {:?}, value {}", r.cut.worst_set, r.cut.value))
}

fn cvetkovic_tightness() -> Outcome {
    let mut worst: f64 = 0.0;
    for n in even(6, 128) {
        let inst = SdpInstance::new(cut_cost_matrix(n).unwrap()).unwrap();
        let x1 = expand_family(&analytic_a(n).unwrap()).mat(1).clone();
        let r = verify_cvetkovic(&inst, &x1, 1e-8).map_err(|e| format!("n = {n}: {e}"))?;
        if !r.feasible {
            return Err(format!("n = {n}: infeasible {r:?}"));
        }
        let gap = (r.lambda2 - (2.0 - 2.0 * (2.0 * PI / n as f64).cos())).abs();
        if gap > 1e-9 {
            return Err(format!("n = {n}: |lambda2 - h_n| = {gap:e}"));
        }
        debug_assert!((r.h_n - h_value(n)).abs() < 1e-15);
        worst = worst.max(gap);
    }
    Ok(format!("max |lambda2 - h_n| {worst:.3e}"))
}

fn kcycle_theorem() -> Outcome {
    let mut notes = Vec::new();
    for (k, c) in [(2, 2), (2, 4), (3, 1), (3, 2), (4, 2)] {
        let cert = build_kcycle_certificate(k, c, 1e-8).map_err(|e| e.to_string())?;
        let bound = PI * PI * k as f64 / ((k as f64 + 1.0) * cert.n as f64);
        if !cert.feasible || cert.ratio > bound + 1e-10 {
            return Err(format!("k = {k}, c = {c}: feasible {}, ratio {} bound {bound}", cert.feasible, cert.ratio));
        }
        notes.push(format!("({k},{c}) {:.4}", cert.ratio));
    }
    for (k, c) in [(2, 2), (3, 1)] {
        let inst = kcycle_cost_matrix(k, c).unwrap();
        let (best, _) = brute_force_kcycle(inst.cost(), k).map_err(|e| e.to_string())?;
        if best != 2.0 * k as f64 {
            return Err(format!("k = {k}, c = {c}: brute force {best}"));
        }
    }
    Ok(format!("ratios {}", notes.join(" ")))
}

fn appendix_algebra() -> Outcome {
    let mut worst: f64 = 0.0;
    for n in even(6, 64).chain((5..=63).step_by(2)) {
        let q = QMatrix::new(n).unwrap();
        let inv = q_inverse_closed_form(&q).map_err(|e| format!("n = {n}: {e}"))?;
        let res = inverse_residual(q.entries(), &inv);
        if res > 1e-9 {
            return Err(format!("n = {n}: residual {res:e}"));
        }
        worst = worst.max(res);
    }
    let inv6 = q_inverse_closed_form(&QMatrix::new(6).unwrap()).unwrap();
    let shown = [
        [-1.0 / 3.0, -1.0, -2.0 / 3.0],
        [-1.0, -1.0, 0.0],
        [-2.0 / 3.0, 0.0, -1.0 / 3.0],
    ];
    for (i, row) in shown.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            if (inv6.get(i, j) - v).abs() > 1e-12 {
                return Err(format!("n = 6 inverse entry ({i}, {j}) = {}", inv6.get(i, j)));
            }
        }
    }
    for n in even(6, 64) {
        let cyc = cycle_solution(n).unwrap();
        let wit = expand_family(&analytic_a(n).unwrap());
        if !row_sum_theorem_check(&cyc, 1e-10) || !row_sum_theorem_check(&wit, 1e-10) {
            return Err(format!("row sums at n = {n}"));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for n in [6, 8, 10] {
        let base = cycle_solution(n).unwrap();
        for t in 0..20 {
            let parts: Vec<CandidateSolution> = (0..4)
                .map(|_| {
                    let mut p: Vec<usize> = (0..n).collect();
                    p.shuffle(&mut rng);
                    base.permuted(&p)
                })
                .collect();
            let w: Vec<f64> = (0..4).map(|_| rng.gen::<f64>()).collect();
            let total: f64 = w.iter().sum();
            let mix: Vec<(f64, &CandidateSolution)> = w.iter().map(|v| v / total).zip(&parts).collect();
            let sol = CandidateSolution::convex_combination(&mix).map_err(|e| e.to_string())?;
            if !row_sum_theorem_check(&sol, 1e-10) {
                return Err(format!("mixture {t} at n = {n}"));
            }
        }
    }
    Ok(format!("max |QQ^-1 - I| {worst:.3e}"))
}

fn five_vertex() -> Outcome {
    let r = n5_report(5, 200).map_err(|e| e.to_string())?;
    if r.passed() {
        Ok(format!("{} cycles, {}/{} probes on cycles, halves decompose", r.cycles, r.probes_on_cycles, r.probes))
    } else {
        Err(format!("{r:?}"))
    }
}

fn non_monotonicity() -> Outcome {
    let costs: Vec<(usize, f64)> = even(6, 64).map(|n| (n, structured_cost(&analytic_a(n).unwrap()))).collect();
    if let Some(w) = costs.windows(2).find(|w| w[1].1 >= w[0].1) {
        return Err(format!("cost not decreasing between n = {} and {}", w[0].0, w[1].0));
    }
    let (rows, first) = mst_crossover(64, 1e-9).map_err(|e| e.to_string())?;
    let first = first.ok_or("no spanning-tree violation up to 64")?;
    if let Some(r) = rows.iter().find(|r| r.n >= first && !r.violated) {
        return Err(format!("violation lapses at n = {}", r.n));
    }
    Ok(format!("cost 6..64 strictly decreasing; first spanning-tree violation at n = {first}"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("witness feasibility sweep, even n in [6, 256]", witness_sweep),
        ("ratio bound and n = 6 values", theorem_ratio),
        ("cycle-solution constraint spectra, even n in [4, 64]", cycle_spectrum),
        ("range test vs eigenvalue test, 100 families per n", lp_sdp_equivalence),
        ("subtour violation of the n = 6 witness", subtour_violation),
        ("single-matrix relaxation tightness, even n in [6, 128]", cvetkovic_tightness),
        ("k-cycle certificates", kcycle_theorem),
        ("coefficient-matrix inverse and row-sum theorem", appendix_algebra),
        ("five-vertex degree polytope", five_vertex),
        ("decreasing cost and spanning-tree crossover", non_monotonicity),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(reason) => {
                failures += 1;
                println!("criterion {:>2} FAIL  {name}: {reason}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failures} failed", criteria.len() - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
