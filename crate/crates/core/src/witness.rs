//! Cut-semimetric instances, the block-structured solution family, and the
//! integrality-gap certificate built from the analytic family.
//!
//! A structured family places weight `a_j` on every edge inside a vertex
//! group and `b_j` on every edge between groups:
//!
//! ```text
//! Xʲ = ((b_j J_g + (a_j − b_j) I_g) ⊗ J_m) − a_j I_n,    n = g·m
//! ```
//!
//! The `b_j` are tied to the `a_j` so that every row of `Xʲ` sums to 2
//! (`j < d`) or 1 (`j = d`), the row sums of the cycle distance matrices:
//! `(m − 1) a_j + (n − m) b_j = 2` (resp. `1`).

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::linalg::{kron, SpectrumMethod};
use crate::polytope::brute_force_tsp;
use crate::spectral::{verify_cvetkovic, SpectralReport};
use crate::tsp_sdp::{cos_coef, verify_feasibility, CandidateSolution, ConstraintReport, SdpInstance};
use crate::{Spectrum, SymMat};

/// Coupling residual allowed by [`StructuredFamily::new`].
pub const COUPLING_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StructuredFamily {
    n: usize,
    groups: usize,
    a: Vec<f64>,
    b: Vec<f64>,
}

impl StructuredFamily {
    /// Checks lengths, the group layout and the row-sum coupling.
    pub fn new(n: usize, groups: usize, a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        validate_layout(n, groups)?;
        let d = n / 2;
        if a.len() != d || b.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: a.len().min(b.len()),
            });
        }
        let fam = StructuredFamily { n, groups, a, b };
        for j in 1..=d {
            let m = fam.group_size() as f64;
            let lhs = (m - 1.0) * fam.a(j) + (n as f64 - m) * fam.b(j);
            if (lhs - fam.row_sum(j)).abs() > COUPLING_TOL {
                return domain(format!(
                    "row-sum coupling fails at j = {j}: {lhs} != {}",
                    fam.row_sum(j)
                ));
            }
        }
        Ok(fam)
    }

    /// Derives each `b_j` from `a_j` through the coupling.
    pub fn from_a(n: usize, groups: usize, a: Vec<f64>) -> Result<Self> {
        validate_layout(n, groups)?;
        let d = n / 2;
        if a.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: a.len(),
            });
        }
        let m = (n / groups) as f64;
        let b = a
            .iter()
            .enumerate()
            .map(|(i, &ai)| {
                let r = if i + 1 < d { 2.0 } else { 1.0 };
                (r - (m - 1.0) * ai) / (n as f64 - m)
            })
            .collect();
        Ok(StructuredFamily { n, groups, a, b })
    }

    /// Two groups of `n/2` vertices, the TSP layout.
    pub fn two_group(a: Vec<f64>) -> Result<Self> {
        let n = 2 * a.len();
        Self::from_a(n, 2, a)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.n / 2
    }

    pub fn groups(&self) -> usize {
        self.groups
    }

    pub fn group_size(&self) -> usize {
        self.n / self.groups
    }

    /// `a_j`, 1-based.
    pub fn a(&self, j: usize) -> f64 {
        self.a[j - 1]
    }

    /// `b_j`, 1-based.
    pub fn b(&self, j: usize) -> f64 {
        self.b[j - 1]
    }

    pub fn a_values(&self) -> &[f64] {
        &self.a
    }

    pub fn b_values(&self) -> &[f64] {
        &self.b
    }

    /// Target row sum of `Xʲ`.
    pub fn row_sum(&self, j: usize) -> f64 {
        if j < self.d() {
            2.0
        } else {
            1.0
        }
    }

    pub fn is_nonnegative(&self) -> bool {
        self.a.iter().chain(&self.b).all(|&v| v >= 0.0)
    }

    /// Lower end of the admissible range of `a⁽ᵏ⁾`: `−1/(m − 1)`.
    pub fn a_hat_lower(&self) -> f64 {
        -1.0 / (self.group_size() as f64 - 1.0)
    }
}

fn validate_layout(n: usize, groups: usize) -> Result<()> {
    if n < 6 || !n.is_multiple_of(2) {
        return domain(format!("structured families need even n >= 6, got {n}"));
    }
    if groups < 2 || !n.is_multiple_of(groups) || n / groups < 2 {
        return domain(format!("cannot split {n} vertices into {groups} groups"));
    }
    Ok(())
}

/// `Ĉ = [[0, 1], [1, 0]] ⊗ J_{n/2}`.
pub fn cut_cost_matrix(n: usize) -> Result<SymMat> {
    if n < 4 || !n.is_multiple_of(2) {
        return domain(format!("cut cost matrix needs even n >= 4, got {n}"));
    }
    let swap = SymMat::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]])?;
    Ok(kron(&swap, &SymMat::all_ones(n / 2)))
}

/// Materialises `X¹..Xᵈ`.
pub fn expand_family(fam: &StructuredFamily) -> CandidateSolution {
    let n = fam.n();
    let m = fam.group_size();
    let mats = (1..=fam.d())
        .map(|j| {
            let (a, b) = (fam.a(j), fam.b(j));
            SymMat::from_fn(n, |s, t| {
                if s == t {
                    0.0
                } else if s / m == t / m {
                    a
                } else {
                    b
                }
            })
        })
        .collect();
    CandidateSolution::new(mats).expect("family layout gives n = 2d")
}

/// `a_i = 2/(n−2)·(cos(πi/d) + 1)` with `b_i = (2/n)(1 − cos(πi/d))`, `b_d = 2/n`.
pub fn analytic_a(n: usize) -> Result<StructuredFamily> {
    if n < 6 || !n.is_multiple_of(2) {
        return domain(format!("analytic family needs even n >= 6, got {n}"));
    }
    let d = n / 2;
    let nf = n as f64;
    let mut a = Vec::with_capacity(d);
    let mut b = Vec::with_capacity(d);
    for i in 1..=d {
        let cos = if i == d {
            -1.0
        } else {
            (PI * i as f64 / d as f64).cos()
        };
        a.push(2.0 / (nf - 2.0) * (cos + 1.0));
        b.push(if i == d { 2.0 / nf } else { 2.0 / nf * (1.0 - cos) });
    }
    StructuredFamily::new(n, 2, a, b)
}

fn check_index(fam: &StructuredFamily, k: usize) -> Result<()> {
    if k == 0 || k > fam.d() {
        return domain(format!("constraint index {k} outside 1..={}", fam.d()));
    }
    Ok(())
}

/// `a⁽ᵏ⁾ = Σ_i cos(2πik/n) a_i`.
pub fn a_hat(fam: &StructuredFamily, k: usize) -> Result<f64> {
    check_index(fam, k)?;
    Ok(fam
        .a
        .iter()
        .enumerate()
        .map(|(i, &ai)| cos_coef(fam.n, i + 1, k) * ai)
        .sum())
}

/// `b⁽ᵏ⁾ = Σ_i cos(2πik/n) b_i`, checked against `(−1 − (m−1) a⁽ᵏ⁾)/(n − m)`.
///
/// For two groups the closed form reads `−(1 − 2/n) a⁽ᵏ⁾ − 2/n`.
pub fn b_hat(fam: &StructuredFamily, k: usize) -> Result<f64> {
    let ak = a_hat(fam, k)?;
    let direct: f64 = fam
        .b
        .iter()
        .enumerate()
        .map(|(i, &bi)| cos_coef(fam.n, i + 1, k) * bi)
        .sum();
    let closed = b_hat_closed_form(fam, ak);
    if (closed - direct).abs() > 1e-8 {
        return Err(Error::IdentityViolation { k, closed, direct });
    }
    Ok(direct)
}

pub fn b_hat_closed_form(fam: &StructuredFamily, a_hat: f64) -> f64 {
    let m = fam.group_size() as f64;
    (-1.0 - (m - 1.0) * a_hat) / (fam.n as f64 - m)
}

/// Spectrum of the k-th constraint matrix of a structured family from its
/// Kronecker form: `1 − a⁽ᵏ⁾` (×g(m−1)), `1 − a⁽ᵏ⁾ + m(a⁽ᵏ⁾ − b⁽ᵏ⁾)` (×(g−1)),
/// `1 − a⁽ᵏ⁾ + m(a⁽ᵏ⁾ + (g−1)b⁽ᵏ⁾)` (×1).
pub fn structured_constraint_spectrum(fam: &StructuredFamily, k: usize) -> Result<Spectrum> {
    let ak = a_hat(fam, k)?;
    let bk = b_hat(fam, k)?;
    let g = fam.groups();
    let m = fam.group_size();
    let mf = m as f64;
    let mut values = vec![1.0 - ak; g * (m - 1)];
    values.extend(std::iter::repeat_n(1.0 - ak + mf * (ak - bk), g - 1));
    values.push(1.0 - ak + mf * (ak + (g as f64 - 1.0) * bk));
    Ok(Spectrum::new(values, SpectrumMethod::ClosedFormKronecker))
}

/// The range test `−1/(m−1) ≤ a⁽ᵏ⁾ ≤ 1`, with `tol` expressed on the
/// eigenvalue scale so it lines up with an eigenvalue test at the same `tol`.
///
/// The two nontrivial eigenvalues are `1 − a⁽ᵏ⁾` and
/// `(1 + (m−1) a⁽ᵏ⁾)·n/(n − m)`; the third is identically zero.
pub fn a_hat_in_range(fam: &StructuredFamily, a_hat: f64, tol: f64) -> bool {
    let n = fam.n() as f64;
    let m = fam.group_size() as f64;
    let upper_ok = 1.0 - a_hat >= -tol;
    let lower_ok = (1.0 + (m - 1.0) * a_hat) * n / (n - m) >= -tol;
    upper_ok && lower_ok
}

/// Gap certificate for the cut-semimetric instance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessCertificate {
    pub n: usize,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub a_hat: Vec<f64>,
    #[serde(skip)]
    pub b_hat: Vec<f64>,
    pub min_eigs: Vec<f64>,
    pub sdp_cost: f64,
    pub integer_opt: f64,
    pub ratio: f64,
    pub bound: f64,
    pub feasible: bool,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cvetkovic: Option<SpectralReport>,
    #[serde(skip)]
    pub report: ConstraintReport,
}

impl WitnessCertificate {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serialises")
    }
}

/// `π²/(2n)`.
pub fn theorem_bound(n: usize) -> f64 {
    PI * PI / (2.0 * n as f64)
}

/// Closed-form cost `(n/2)² b₁` of a two-group family.
pub fn structured_cost(fam: &StructuredFamily) -> f64 {
    let d = fam.d() as f64;
    d * d * fam.b(1)
}

/// Runs the full pipeline and returns the certificate with its `feasible`
/// flag, whatever the outcome.
pub fn build_gap_certificate(n: usize, tol: f64) -> Result<WitnessCertificate> {
    let fam = analytic_a(n)?;
    let inst = SdpInstance::new(cut_cost_matrix(n)?)?;
    let sol = expand_family(&fam);
    let report = verify_feasibility(&inst, &sol, tol)?;

    let integer_opt = 2.0;
    let mut opt_ok = true;
    if n <= 10 {
        let (cost, _) = brute_force_tsp(inst.cost())?;
        opt_ok = (cost - integer_opt).abs() < 1e-12;
    }

    let d = fam.d();
    let a_hats = (1..=d).map(|k| a_hat(&fam, k)).collect::<Result<Vec<_>>>()?;
    let b_hats = (1..=d).map(|k| b_hat(&fam, k)).collect::<Result<Vec<_>>>()?;
    let sdp_cost = report.objective;
    let ratio = sdp_cost / integer_opt;
    let bound = theorem_bound(n);
    let cost_ok = (sdp_cost - structured_cost(&fam)).abs() <= 1e-10;
    let cvetkovic = verify_cvetkovic(&inst, sol.mat(1), tol)?;

    let feasible = report.feasible
        && fam.is_nonnegative()
        && opt_ok
        && cost_ok
        && ratio <= bound + 1e-10
        && cvetkovic.feasible;
    Ok(WitnessCertificate {
        n,
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
        k: None,
        c: None,
        cvetkovic: Some(cvetkovic),
        report,
    })
}

/// As [`build_gap_certificate`], but any failed check is an error.
pub fn gap_certificate(n: usize, tol: f64) -> Result<WitnessCertificate> {
    let cert = build_gap_certificate(n, tol)?;
    if !cert.feasible {
        return Err(Error::InfeasibleWitness(format!(
            "n = {n}: feasible={}, ratio={} bound={}",
            cert.report.feasible, cert.ratio, cert.bound
        )));
    }
    Ok(cert)
}
