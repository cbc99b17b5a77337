//! The relaxation for covering the vertices by `k` disjoint cycles of equal
//! length, on the `(k + 1)`-group instance with unit cost between groups.

use std::collections::HashMap;
use std::f64::consts::PI;

use itertools::Itertools;

use crate::error::{domain, Error, Result};
use crate::linalg::kron;
use crate::tsp_sdp::{objective_at, verify_with_objective, CandidateSolution};
use crate::witness::{a_hat, b_hat, expand_family, StructuredFamily, WitnessCertificate};
use crate::SymMat;

/// Largest order accepted by [`brute_force_kcycle`].
pub const MAX_BRUTE_KCYCLE_N: usize = 12;

#[derive(Debug, Clone, PartialEq)]
pub struct KCycleInstance {
    k: usize,
    c: usize,
    cost: SymMat,
}

impl KCycleInstance {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn c(&self) -> usize {
        self.c
    }

    pub fn n(&self) -> usize {
        self.c * self.k * (self.k + 1)
    }

    pub fn d(&self) -> usize {
        self.n() / 2
    }

    pub fn cost(&self) -> &SymMat {
        &self.cost
    }
}

/// `k ≥ 2`, `c ≥ 1`, and `c` even whenever `k` is.
pub fn check_parameters(k: usize, c: usize) -> Result<()> {
    if k < 2 || c < 1 {
        return domain(format!("need k >= 2 and c >= 1, got k = {k}, c = {c}"));
    }
    if k.is_multiple_of(2) && c % 2 == 1 {
        return Err(Error::Parity { k, c });
    }
    let d = c * k * (k + 1) / 2;
    if !d.is_multiple_of(k) {
        return domain(format!("d = {d} is not a multiple of k = {k}"));
    }
    Ok(())
}

/// `(J_{k+1} − I_{k+1}) ⊗ J_{ck}`.
pub fn kcycle_cost_matrix(k: usize, c: usize) -> Result<KCycleInstance> {
    check_parameters(k, c)?;
    let outer = SymMat::from_fn(k + 1, |i, j| if i == j { 0.0 } else { 1.0 });
    Ok(KCycleInstance {
        k,
        c,
        cost: kron(&outer, &SymMat::all_ones(c * k)),
    })
}

/// `a_i = 2(cos(πi/d) + k)/(n − k − 1)` for `k | i`, `i < d`;
/// `a_d = (k − 1)/(n − k − 1)`; zero otherwise. The `b_i` follow from the
/// row-sum coupling.
pub fn kcycle_analytic_a(k: usize, c: usize) -> Result<StructuredFamily> {
    check_parameters(k, c)?;
    let n = c * k * (k + 1);
    let d = n / 2;
    let denom = (n - k - 1) as f64;
    let a = (1..=d)
        .map(|i| {
            if i == d {
                (k as f64 - 1.0) / denom
            } else if i % k == 0 {
                2.0 * ((PI * i as f64 / d as f64).cos() + k as f64) / denom
            } else {
                0.0
            }
        })
        .collect();
    StructuredFamily::from_a(n, k + 1, a)
}

pub fn expand_kcycle_family(inst: &KCycleInstance, fam: &StructuredFamily) -> Result<CandidateSolution> {
    if fam.n() != inst.n() {
        return Err(Error::DimensionMismatch {
            expected: inst.n(),
            found: fam.n(),
        });
    }
    if fam.groups() != inst.k() + 1 {
        return Err(Error::DimensionMismatch {
            expected: inst.k() + 1,
            found: fam.groups(),
        });
    }
    Ok(expand_family(fam))
}

/// `½ tr(C Xᵏ)`.
pub fn kcycle_objective(inst: &KCycleInstance, sol: &CandidateSolution) -> Result<f64> {
    objective_at(&inst.cost, sol, inst.k)
}

/// `(c²/2)(k + 1)k³ b_k`.
pub fn kcycle_structured_objective(k: usize, c: usize, fam: &StructuredFamily) -> f64 {
    let (kf, cf) = (k as f64, c as f64);
    cf * cf / 2.0 * (kf + 1.0) * kf.powi(3) * fam.b(k)
}

/// `π² k / ((k + 1) n)`.
pub fn kcycle_bound(k: usize, c: usize) -> f64 {
    let n = (c * k * (k + 1)) as f64;
    PI * PI * k as f64 / ((k as f64 + 1.0) * n)
}

/// Value of `a⁽ʲ⁾` for the analytic family by case analysis on `j` modulo
/// `c(k + 1)`: 1 when `j` is a multiple, `(c − 2)/(2(ck − 1))` when `j ± 1`
/// is, and `−1/(ck − 1)` otherwise.
pub fn a_hat_case_value(k: usize, c: usize, j: usize) -> f64 {
    let period = c * (k + 1);
    let ck1 = (c * k) as f64 - 1.0;
    if j.is_multiple_of(period) {
        1.0
    } else if (j - 1).is_multiple_of(period) || (j + 1).is_multiple_of(period) {
        (c as f64 - 2.0) / (2.0 * ck1)
    } else {
        -1.0 / ck1
    }
}

/// Minimum cost of covering the vertices by `k` disjoint cycles of length
/// `n/k`, with the cycles as vertex lists.
pub fn brute_force_kcycle(cost: &SymMat, k: usize) -> Result<(f64, Vec<Vec<usize>>)> {
    let n = cost.order();
    if n > MAX_BRUTE_KCYCLE_N {
        return Err(Error::TooLarge {
            n,
            limit: MAX_BRUTE_KCYCLE_N,
        });
    }
    if k == 0 || !n.is_multiple_of(k) || n / k < 3 {
        return domain(format!("cannot split {n} vertices into {k} cycles of length >= 3"));
    }
    let len = n / k;
    let mut memo: HashMap<u32, (f64, Vec<usize>)> = HashMap::new();
    let full: u32 = (1 << n) - 1;
    let best = cover(cost, len, full, &mut memo);
    Ok(best)
}

fn cover(cost: &SymMat, len: usize, free: u32, memo: &mut HashMap<u32, (f64, Vec<usize>)>) -> (f64, Vec<Vec<usize>>) {
    if free == 0 {
        return (0.0, Vec::new());
    }
    let first = free.trailing_zeros() as usize;
    let rest: Vec<usize> = (first + 1..32).filter(|&v| free >> v & 1 == 1).collect();
    let mut best = (f64::INFINITY, Vec::new());
    for others in rest.iter().copied().combinations(len - 1) {
        let mut mask = 1u32 << first;
        others.iter().for_each(|&v| mask |= 1 << v);
        let (cycle_cost, cycle) = memo
            .entry(mask)
            .or_insert_with(|| min_cycle(cost, first, &others))
            .clone();
        let (rest_cost, mut cycles) = cover(cost, len, free & !mask, memo);
        if cycle_cost + rest_cost < best.0 {
            cycles.insert(0, cycle);
            best = (cycle_cost + rest_cost, cycles);
        }
    }
    best
}

/// Cheapest cycle through `first` and `others`, `first` leading.
fn min_cycle(cost: &SymMat, first: usize, others: &[usize]) -> (f64, Vec<usize>) {
    let m = others.len();
    let mut best = (f64::INFINITY, Vec::new());
    for perm in others.iter().copied().permutations(m) {
        if perm[0] > perm[m - 1] {
            continue;
        }
        let mut c = cost.get(first, perm[0]) + cost.get(perm[m - 1], first);
        for w in perm.windows(2) {
            c += cost.get(w[0], w[1]);
        }
        if c < best.0 {
            best = (c, std::iter::once(first).chain(perm).collect());
        }
    }
    best
}

/// Verifies the analytic family on the `(k, c)` instance and bounds the
/// ratio against `CYCOPT = 2k`, cross-checked by enumeration for `n ≤ 12`.
pub fn build_kcycle_certificate(k: usize, c: usize, tol: f64) -> Result<WitnessCertificate> {
    let inst = kcycle_cost_matrix(k, c)?;
    let fam = kcycle_analytic_a(k, c)?;
    let sol = expand_kcycle_family(&inst, &fam)?;
    let report = verify_with_objective(inst.cost(), &sol, k, tol)?;

    let integer_opt = 2.0 * k as f64;
    let mut opt_ok = true;
    if inst.n() <= MAX_BRUTE_KCYCLE_N {
        let (best, _) = brute_force_kcycle(inst.cost(), k)?;
        opt_ok = (best - integer_opt).abs() < 1e-12;
    }
    let d = fam.d();
    let a_hats = (1..=d).map(|j| a_hat(&fam, j)).collect::<Result<Vec<_>>>()?;
    let b_hats = (1..=d).map(|j| b_hat(&fam, j)).collect::<Result<Vec<_>>>()?;
    let sdp_cost = report.objective;
    let ratio = sdp_cost / integer_opt;
    let bound = kcycle_bound(k, c);
    let cost_ok = (sdp_cost - kcycle_structured_objective(k, c, &fam)).abs() <= 1e-10;
    let feasible = report.feasible && fam.is_nonnegative() && opt_ok && cost_ok && ratio <= bound + tol;
    Ok(WitnessCertificate {
        n: inst.n(),
        a: fam.a_values().to_vec(),
        b: fam.b_values().to_vec(),
        a_hat: a_hats,
        b_hat: b_hats,
        min_eigs: report.psd_min_eigs.clone(),
        sdp_cost,
        integer_opt,
        ratio,
        bound,
        feasible,
        seed: 0,
        k: Some(k),
        c: Some(c),
        cvetkovic: None,
        report,
    })
}

pub fn kcycle_gap_certificate(k: usize, c: usize, tol: f64) -> Result<WitnessCertificate> {
    let cert = build_kcycle_certificate(k, c, tol)?;
    if !cert.feasible {
        return Err(Error::InfeasibleWitness(format!(
            "k = {k}, c = {c}: feasible={}, ratio={} bound={}",
            cert.report.feasible, cert.ratio, cert.bound
        )));
    }
    Ok(cert)
}
