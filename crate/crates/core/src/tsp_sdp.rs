//! The association-scheme SDP relaxation of the TSP: instances, candidate
//! solutions, the Hamiltonian-cycle solution, and constraint-by-constraint
//! feasibility checking.
//!
//! For even `n = 2d` the relaxation has variables `X¹..Xᵈ` and constraints
//!
//! ```text
//! Xʲ ≥ 0 entrywise,   Σ_j Xʲ = J − I,   I + Σ_j cos(2πjk/n) Xʲ ⪰ 0  (k = 1..d)
//! ```
//!
//! with objective `½ tr(C X¹)`.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::linalg::{csv, psd_tolerance, spectrum};
use crate::SymMat;

/// `cos(2π·jk/n)` with the product reduced mod `n` before scaling.
pub fn cos_coef(n: usize, j: usize, k: usize) -> f64 {
    (2.0 * PI * ((j * k) % n) as f64 / n as f64).cos()
}

/// Edge costs for an even number of cities.
#[derive(Debug, Clone, PartialEq)]
pub struct SdpInstance {
    n: usize,
    cost: SymMat,
}

impl SdpInstance {
    /// Validates the cost matrix, including the O(n³) triangle-inequality scan.
    pub fn new(cost: SymMat) -> Result<Self> {
        Self::with_metric_check(cost, true)
    }

    pub fn with_metric_check(cost: SymMat, check_metric: bool) -> Result<Self> {
        let n = cost.order();
        if n < 4 || !n.is_multiple_of(2) {
            return domain(format!("instance needs even n >= 4, got {n}"));
        }
        for i in 0..n {
            if cost.get(i, i) != 0.0 {
                return Err(Error::InvalidCost {
                    row: i,
                    col: i,
                    reason: "nonzero diagonal",
                });
            }
            for j in 0..n {
                let c = cost.get(i, j);
                if !c.is_finite() || c < 0.0 {
                    return Err(Error::InvalidCost {
                        row: i,
                        col: j,
                        reason: "negative or non-finite",
                    });
                }
            }
        }
        if check_metric {
            check_triangle(&cost)?;
        }
        Ok(SdpInstance { n, cost })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.n / 2
    }

    pub fn cost(&self) -> &SymMat {
        &self.cost
    }
}

fn check_triangle(cost: &SymMat) -> Result<()> {
    let n = cost.order();
    let slack = 1e-12 * (1.0 + cost.max_abs());
    for i in 0..n {
        for j in (i + 1)..n {
            let cij = cost.get(i, j);
            for k in 0..n {
                if k != i && k != j && cij > cost.get(i, k) + cost.get(k, j) + slack {
                    return Err(Error::NotMetric { i, j, k });
                }
            }
        }
    }
    Ok(())
}

/// The `d = n/2` matrix variables of a candidate point.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateSolution {
    n: usize,
    mats: Vec<SymMat>,
}

impl CandidateSolution {
    pub fn new(mats: Vec<SymMat>) -> Result<Self> {
        let d = mats.len();
        if d == 0 {
            return domain("solution needs at least one matrix");
        }
        let n = mats[0].order();
        if n != 2 * d {
            return Err(Error::DimensionMismatch {
                expected: 2 * d,
                found: n,
            });
        }
        if let Some(bad) = mats.iter().find(|m| m.order() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: bad.order(),
            });
        }
        Ok(CandidateSolution { n, mats })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.mats.len()
    }

    pub fn mats(&self) -> &[SymMat] {
        &self.mats
    }

    /// `Xʲ` for `j` in `1..=d`.
    pub fn mat(&self, j: usize) -> &SymMat {
        &self.mats[j - 1]
    }

    /// Conjugates every matrix by the same vertex relabelling.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        CandidateSolution {
            n: self.n,
            mats: self.mats.iter().map(|m| m.permuted(perm)).collect(),
        }
    }

    /// Entrywise convex combination of solutions of the same order.
    pub fn convex_combination(parts: &[(f64, &CandidateSolution)]) -> Result<Self> {
        let (_, first) = parts
            .first()
            .ok_or_else(|| Error::Domain("empty combination".into()))?;
        let mut mats: Vec<SymMat> = first.mats.iter().map(|m| SymMat::zeros(m.order())).collect();
        for (w, sol) in parts {
            if sol.n != first.n {
                return Err(Error::DimensionMismatch {
                    expected: first.n,
                    found: sol.n,
                });
            }
            for (acc, m) in mats.iter_mut().zip(&sol.mats) {
                acc.axpy(*w, m);
            }
        }
        CandidateSolution::new(mats)
    }
}

/// Per-constraint verdicts for a candidate solution.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstraintReport {
    pub nonneg_ok: bool,
    /// Smallest entry over all matrices, with its (matrix index, row, col).
    pub min_entry: f64,
    pub min_entry_at: (usize, usize, usize),
    pub sum_ok: bool,
    /// Largest deviation of `Σ Xʲ` from `J − I`.
    pub sum_max_dev: f64,
    /// Minimum eigenvalue of the k-th PSD constraint matrix, k = 1..d.
    pub psd_min_eigs: Vec<f64>,
    /// Effective tolerance applied to each entry of `psd_min_eigs`.
    pub psd_tols: Vec<f64>,
    pub objective: f64,
    pub feasible: bool,
}

impl ConstraintReport {
    pub fn psd_ok(&self, k: usize) -> bool {
        self.psd_min_eigs[k - 1] >= -self.psd_tols[k - 1]
    }

    pub fn all_psd_ok(&self) -> bool {
        (1..=self.psd_min_eigs.len()).all(|k| self.psd_ok(k))
    }
}

/// `Σ_{j=1..d} cos(2πjk/n)` by direct summation.
pub fn trig_sum(n: usize, k: usize) -> Result<f64> {
    if n < 2 || !n.is_multiple_of(2) {
        return domain(format!("trig_sum needs even n >= 2, got {n}"));
    }
    if k == 0 || k >= n {
        return domain(format!("trig_sum needs 0 < k < n, got k = {k}, n = {n}"));
    }
    Ok((1..=n / 2).map(|j| cos_coef(n, j, k)).sum())
}

/// Cycle-distance matrix `A_j(C_n)` for the cycle `0, 1, ..., n−1, 0`.
pub fn distance_matrix(n: usize, j: usize) -> Result<SymMat> {
    if n < 3 {
        return domain(format!("distance_matrix needs n >= 3, got {n}"));
    }
    if j == 0 || j > n / 2 {
        return domain(format!("distance index {j} outside 1..={}", n / 2));
    }
    Ok(SymMat::from_fn(n, |s, t| {
        let gap = s.abs_diff(t);
        if gap.min(n - gap) == j {
            1.0
        } else {
            0.0
        }
    }))
}

/// The Hamiltonian-cycle point `Xʲ = A_j(C_n)`.
pub fn cycle_solution(n: usize) -> Result<CandidateSolution> {
    if n < 4 || !n.is_multiple_of(2) {
        return domain(format!("cycle_solution needs even n >= 4, got {n}"));
    }
    let mats = (1..=n / 2)
        .map(|j| distance_matrix(n, j))
        .collect::<Result<Vec<_>>>()?;
    CandidateSolution::new(mats)
}

/// Expected spectrum of the k-th constraint matrix at the cycle point:
/// `2d` once when `k = d`, otherwise `d` twice; zeros elsewhere.
pub fn cycle_constraint_spectrum(n: usize, k: usize) -> Vec<f64> {
    let d = n / 2;
    let mut values = vec![0.0; n];
    if k == d {
        values[0] = (2 * d) as f64;
    } else {
        values[0] = d as f64;
        values[1] = d as f64;
    }
    values
}

/// `I + Σ_j cos(2πjk/n) Xʲ`.
pub fn assemble_psd_matrix(sol: &CandidateSolution, k: usize) -> Result<SymMat> {
    let d = sol.d();
    if k == 0 || k > d {
        return domain(format!("constraint index {k} outside 1..={d}"));
    }
    let n = sol.n();
    let mut out = SymMat::identity(n);
    for (j, x) in sol.mats.iter().enumerate() {
        out.axpy(cos_coef(n, j + 1, k), x);
    }
    Ok(out)
}

/// All `d` constraint matrices in one pass over the upper triangles. Each
/// entry accumulates its terms in the same order as [`assemble_psd_matrix`].
pub fn assemble_psd_matrices(sol: &CandidateSolution) -> Vec<SymMat> {
    let n = sol.n();
    let d = sol.d();
    let coefs: Vec<Vec<f64>> = (1..=d)
        .map(|k| (1..=d).map(|j| cos_coef(n, j, k)).collect())
        .collect();
    let mut bufs: Vec<Vec<f64>> = vec![vec![0.0; n * n]; d];
    for s in 0..n {
        let lo = s * n + s;
        let hi = (s + 1) * n;
        for (buf, ck) in bufs.iter_mut().zip(&coefs) {
            let out = &mut buf[lo..hi];
            out[0] = 1.0;
            for (x, &c) in sol.mats.iter().zip(ck) {
                let src = &x.as_slice()[lo..hi];
                for (o, &v) in out.iter_mut().zip(src) {
                    *o += c * v;
                }
            }
        }
    }
    bufs.into_iter()
        .map(|b| SymMat::from_upper_buffer(n, b))
        .collect()
}

/// `½ tr(C X¹)`.
pub fn objective(inst: &SdpInstance, sol: &CandidateSolution) -> Result<f64> {
    objective_at(inst.cost(), sol, 1)
}

/// `½ tr(C Xᵏ)` for an arbitrary matrix index.
pub(crate) fn objective_at(cost: &SymMat, sol: &CandidateSolution, index: usize) -> Result<f64> {
    if cost.order() != sol.n() {
        return Err(Error::DimensionMismatch {
            expected: cost.order(),
            found: sol.n(),
        });
    }
    Ok(0.5 * cost.inner(sol.mat(index)))
}

pub fn verify_feasibility(
    inst: &SdpInstance,
    sol: &CandidateSolution,
    tol: f64,
) -> Result<ConstraintReport> {
    verify_with_objective(inst.cost(), sol, 1, tol)
}

/// Shared by the TSP and k-cycle relaxations, which differ only in which
/// matrix the objective reads.
pub(crate) fn verify_with_objective(
    cost: &SymMat,
    sol: &CandidateSolution,
    objective_index: usize,
    tol: f64,
) -> Result<ConstraintReport> {
    let n = sol.n();
    if cost.order() != n {
        return Err(Error::DimensionMismatch {
            expected: cost.order(),
            found: n,
        });
    }

    let mut min_entry = f64::INFINITY;
    let mut min_entry_at = (1, 0, 0);
    for (idx, x) in sol.mats.iter().enumerate() {
        for (pos, &v) in x.as_slice().iter().enumerate() {
            if v < min_entry {
                min_entry = v;
                min_entry_at = (idx + 1, pos / n, pos % n);
            }
        }
    }
    let nonneg_ok = min_entry >= -tol;

    let mut total = SymMat::zeros(n);
    for x in &sol.mats {
        total.axpy(1.0, x);
    }
    let target = &SymMat::all_ones(n) - &SymMat::identity(n);
    let sum_max_dev = total.max_abs_diff(&target);
    let sum_ok = sum_max_dev <= tol;

    let mut psd_min_eigs = Vec::with_capacity(sol.d());
    let mut psd_tols = Vec::with_capacity(sol.d());
    for m in assemble_psd_matrices(sol) {
        psd_tols.push(psd_tolerance(&m, tol));
        psd_min_eigs.push(spectrum(&m)?.min_eig());
    }

    let objective = objective_at(cost, sol, objective_index)?;
    let mut report = ConstraintReport {
        nonneg_ok,
        min_entry,
        min_entry_at,
        sum_ok,
        sum_max_dev,
        psd_min_eigs,
        psd_tols,
        objective,
        feasible: false,
    };
    report.feasible = report.nonneg_ok && report.sum_ok && report.all_psd_ok();
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionManifest {
    pub n: usize,
    pub d: usize,
    pub files: Vec<String>,
}

/// Writes `X¹..Xᵈ` as CSV files next to a JSON manifest; returns the manifest path.
pub fn write_solution(sol: &CandidateSolution, dir: &Path, stem: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let mut files = Vec::with_capacity(sol.d());
    for (j, x) in sol.mats.iter().enumerate() {
        let name = format!("{stem}_X{}.csv", j + 1);
        csv::write_csv(x, &dir.join(&name))?;
        files.push(name);
    }
    let manifest = SolutionManifest {
        n: sol.n(),
        d: sol.d(),
        files,
    };
    let path = dir.join(format!("{stem}.json"));
    let text = serde_json::to_string_pretty(&manifest).map_err(|e| Error::Parse(e.to_string()))?;
    std::fs::write(&path, text)?;
    Ok(path)
}

pub fn read_solution(manifest_path: &Path) -> Result<CandidateSolution> {
    let text = std::fs::read_to_string(manifest_path)?;
    let manifest: SolutionManifest =
        serde_json::from_str(&text).map_err(|e| Error::Parse(e.to_string()))?;
    if manifest.files.len() != manifest.d || manifest.n != 2 * manifest.d {
        return Err(Error::Parse("manifest n, d and file count disagree".into()));
    }
    let base = manifest_path.parent().unwrap_or_else(|| Path::new("."));
    let mats = manifest
        .files
        .iter()
        .map(|f| csv::read_csv(&base.join(f)))
        .collect::<Result<Vec<SymMat>>>()?;
    CandidateSolution::new(mats)
}
