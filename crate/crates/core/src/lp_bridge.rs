//! Linear programs over the free parameters `a_1..a_d` of a structured
//! family, a small dense simplex solver, and the check that the LP rows
//! and the eigenvalue test agree on every constraint.

use rand::Rng;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::tsp_sdp::{cos_coef, verify_feasibility, SdpInstance};
use crate::witness::{a_hat, a_hat_in_range, cut_cost_matrix, expand_family, StructuredFamily};

/// Primal feasibility tolerance of the simplex.
pub const FEAS_TOL: f64 = 1e-9;
/// Pivot budget of the simplex.
pub const MAX_PIVOTS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = "=")]
    Eq,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem {
    pub num_vars: usize,
    /// Maximised.
    pub objective: Vec<f64>,
    pub ineq_rows: Vec<(Vec<f64>, Relation, f64)>,
    pub eq_rows: Vec<(Vec<f64>, f64)>,
    pub bounds: Vec<(f64, f64)>,
}

#[derive(Serialize)]
struct JsonRow<'a> {
    coef: &'a [f64],
    rel: Relation,
    rhs: f64,
}

#[derive(Serialize)]
struct JsonLp<'a> {
    n_vars: usize,
    maximize: &'a [f64],
    rows: Vec<JsonRow<'a>>,
}

impl LpProblem {
    /// No rows; every variable nonnegative and unbounded above.
    pub fn new(objective: Vec<f64>) -> Self {
        let num_vars = objective.len();
        LpProblem {
            num_vars,
            objective,
            ineq_rows: Vec::new(),
            eq_rows: Vec::new(),
            bounds: vec![(0.0, f64::INFINITY); num_vars],
        }
    }

    pub fn add_le(&mut self, coef: Vec<f64>, rhs: f64) {
        self.ineq_rows.push((coef, Relation::Le, rhs));
    }

    pub fn add_ge(&mut self, coef: Vec<f64>, rhs: f64) {
        self.ineq_rows.push((coef, Relation::Ge, rhs));
    }

    pub fn add_eq(&mut self, coef: Vec<f64>, rhs: f64) {
        self.eq_rows.push((coef, rhs));
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.num_vars;
        let lens = std::iter::once(self.objective.len())
            .chain(self.ineq_rows.iter().map(|r| r.0.len()))
            .chain(self.eq_rows.iter().map(|r| r.0.len()))
            .chain(std::iter::once(self.bounds.len()));
        for len in lens {
            if len != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: len,
                });
            }
        }
        if self.ineq_rows.iter().any(|r| r.1 == Relation::Eq) {
            return domain("equalities belong in eq_rows");
        }
        if self.bounds.iter().any(|&(l, u)| l > u || l == f64::INFINITY || u == f64::NEG_INFINITY) {
            return domain("empty variable bound");
        }
        Ok(())
    }

    /// Every row, with finite bounds spelled out as single-variable rows.
    pub fn all_rows(&self) -> Vec<(Vec<f64>, Relation, f64)> {
        let mut rows: Vec<_> = self.ineq_rows.clone();
        rows.extend(self.eq_rows.iter().map(|(c, r)| (c.clone(), Relation::Eq, *r)));
        for (i, &(l, u)) in self.bounds.iter().enumerate() {
            let mut unit = vec![0.0; self.num_vars];
            unit[i] = 1.0;
            if l.is_finite() {
                rows.push((unit.clone(), Relation::Ge, l));
            }
            if u.is_finite() {
                rows.push((unit, Relation::Le, u));
            }
        }
        rows
    }

    pub fn to_json(&self) -> String {
        let rows = self.all_rows();
        let json = JsonLp {
            n_vars: self.num_vars,
            maximize: &self.objective,
            rows: rows
                .iter()
                .map(|(coef, rel, rhs)| JsonRow {
                    coef,
                    rel: *rel,
                    rhs: *rhs,
                })
                .collect(),
        };
        serde_json::to_string_pretty(&json).expect("lp serialises")
    }

    /// Indices into [`all_rows`](Self::all_rows) violated by `x` beyond `tol`,
    /// with the amount of violation.
    pub fn violations(&self, x: &[f64], tol: f64) -> Vec<(usize, f64)> {
        self.all_rows()
            .iter()
            .enumerate()
            .filter_map(|(i, (coef, rel, rhs))| {
                let lhs: f64 = coef.iter().zip(x).map(|(c, v)| c * v).sum();
                let excess = match rel {
                    Relation::Le => lhs - rhs,
                    Relation::Ge => rhs - lhs,
                    Relation::Eq => (lhs - rhs).abs(),
                };
                (excess > tol).then_some((i, excess))
            })
            .collect()
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LpSolution {
    pub status: LpStatus,
    pub x: Vec<f64>,
    pub objective_value: f64,
    pub iterations: usize,
}

/// How an original variable is rebuilt from the nonnegative working ones.
#[derive(Debug, Clone, Copy)]
enum VarMap {
    /// `x = offset + y`
    Shifted { col: usize, offset: f64 },
    /// `x = offset − y`
    Mirrored { col: usize, offset: f64 },
    /// `x = y⁺ − y⁻`
    Free { pos: usize, neg: usize },
}

struct Tableau {
    /// Constraint rows, rhs in the last column.
    rows: Vec<Vec<f64>>,
    basis: Vec<usize>,
    /// `z_j − c_j` per column; the last entry is the objective value.
    zrow: Vec<f64>,
    iterations: usize,
}

enum PivotOutcome {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn width(&self) -> usize {
        self.zrow.len() - 1
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c];
        for v in self.rows[r].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r {
                let f = row[c];
                if f != 0.0 {
                    for (v, &pv) in row.iter_mut().zip(&pivot_row) {
                        *v -= f * pv;
                    }
                }
            }
        }
        let f = self.zrow[c];
        if f != 0.0 {
            for (v, &pv) in self.zrow.iter_mut().zip(&pivot_row) {
                *v -= f * pv;
            }
        }
        self.basis[r] = c;
        self.iterations += 1;
    }

    /// Bland's rule: lowest improving column enters; among tied ratios the
    /// row whose basic variable has the lowest index leaves.
    fn run(&mut self, allowed: &[bool]) -> Result<PivotOutcome> {
        loop {
            let entering = (0..self.width()).find(|&j| allowed[j] && self.zrow[j] < -FEAS_TOL);
            let Some(c) = entering else {
                return Ok(PivotOutcome::Optimal);
            };
            if self.iterations >= MAX_PIVOTS {
                return Err(Error::IterationLimit(MAX_PIVOTS));
            }
            let rhs = self.width();
            let mut leave: Option<(usize, f64)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if row[c] > FEAS_TOL {
                    let ratio = row[rhs] / row[c];
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((li, lr)) => {
                            if ratio < lr - 1e-12
                                || (ratio <= lr + 1e-12 && self.basis[i] < self.basis[li])
                            {
                                Some((i, ratio))
                            } else {
                                Some((li, lr))
                            }
                        }
                    };
                }
            }
            match leave {
                None => return Ok(PivotOutcome::Unbounded),
                Some((r, _)) => self.pivot(r, c),
            }
        }
    }

    /// Rebuilds `zrow` for maximising `cost · y` over the current basis.
    fn set_objective(&mut self, cost: &[f64]) {
        let w = self.width();
        let mut z = vec![0.0; w + 1];
        for (j, zj) in z.iter_mut().enumerate().take(w) {
            *zj = -cost.get(j).copied().unwrap_or(0.0);
        }
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            let cb = cost.get(b).copied().unwrap_or(0.0);
            if cb != 0.0 {
                for (zj, &v) in z.iter_mut().zip(row) {
                    *zj += cb * v;
                }
            }
        }
        self.zrow = z;
    }
}

/// Two-phase dense simplex with Bland's rule.
pub fn simplex_solve(lp: &LpProblem) -> Result<LpSolution> {
    lp.validate()?;

    // Substitute nonnegative working variables for the original ones.
    let mut maps = Vec::with_capacity(lp.num_vars);
    let mut ncols = 0;
    let mut extra_rows: Vec<(Vec<(usize, f64)>, Relation, f64)> = Vec::new();
    for &(l, u) in &lp.bounds {
        let map = if l.is_finite() {
            ncols += 1;
            if u.is_finite() {
                extra_rows.push((vec![(ncols - 1, 1.0)], Relation::Le, u - l));
            }
            VarMap::Shifted {
                col: ncols - 1,
                offset: l,
            }
        } else if u.is_finite() {
            ncols += 1;
            VarMap::Mirrored {
                col: ncols - 1,
                offset: u,
            }
        } else {
            ncols += 2;
            VarMap::Free {
                pos: ncols - 2,
                neg: ncols - 1,
            }
        };
        maps.push(map);
    }
    let nwork = ncols;

    let translate = |coef: &[f64]| -> (Vec<f64>, f64) {
        let mut out = vec![0.0; nwork];
        let mut constant = 0.0;
        for (&a, map) in coef.iter().zip(&maps) {
            match *map {
                VarMap::Shifted { col, offset } => {
                    out[col] += a;
                    constant += a * offset;
                }
                VarMap::Mirrored { col, offset } => {
                    out[col] -= a;
                    constant += a * offset;
                }
                VarMap::Free { pos, neg } => {
                    out[pos] += a;
                    out[neg] -= a;
                }
            }
        }
        (out, constant)
    };

    let mut rows: Vec<(Vec<f64>, Relation, f64)> = Vec::new();
    for (coef, rel, rhs) in &lp.ineq_rows {
        let (c, k) = translate(coef);
        rows.push((c, *rel, rhs - k));
    }
    for (coef, rhs) in &lp.eq_rows {
        let (c, k) = translate(coef);
        rows.push((c.clone(), Relation::Le, rhs - k));
        rows.push((c, Relation::Ge, rhs - k));
    }
    for (entries, rel, rhs) in extra_rows {
        let mut c = vec![0.0; nwork];
        for (j, v) in entries {
            c[j] = v;
        }
        rows.push((c, rel, rhs));
    }
    for row in rows.iter_mut() {
        if row.2 < 0.0 {
            row.0.iter_mut().for_each(|v| *v = -*v);
            row.2 = -row.2;
            row.1 = match row.1 {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            };
        }
    }

    // Columns: working vars, one slack/surplus per row, one artificial per >= row.
    let m = rows.len();
    let n_art = rows.iter().filter(|r| r.1 == Relation::Ge).count();
    let slack0 = nwork;
    let art0 = nwork + m;
    let width = art0 + n_art;
    let mut tab_rows = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut next_art = art0;
    for (i, (coef, rel, rhs)) in rows.iter().enumerate() {
        let mut r = vec![0.0; width + 1];
        r[..nwork].copy_from_slice(coef);
        r[width] = *rhs;
        match rel {
            Relation::Le => {
                r[slack0 + i] = 1.0;
                basis.push(slack0 + i);
            }
            _ => {
                r[slack0 + i] = -1.0;
                r[next_art] = 1.0;
                basis.push(next_art);
                next_art += 1;
            }
        }
        tab_rows.push(r);
    }
    let mut tab = Tableau {
        rows: tab_rows,
        basis,
        zrow: vec![0.0; width + 1],
        iterations: 0,
    };

    if n_art > 0 {
        let mut phase1 = vec![0.0; width];
        phase1[art0..].iter_mut().for_each(|v| *v = -1.0);
        tab.set_objective(&phase1);
        tab.run(&vec![true; width])?;
        if tab.zrow[width] < -FEAS_TOL {
            return Ok(LpSolution {
                status: LpStatus::Infeasible,
                x: vec![0.0; lp.num_vars],
                objective_value: f64::NAN,
                iterations: tab.iterations,
            });
        }
        // Drive zero-level artificials out of the basis; drop redundant rows.
        let mut i = 0;
        while i < tab.rows.len() {
            if tab.basis[i] >= art0 {
                match (0..art0).find(|&j| tab.rows[i][j].abs() > FEAS_TOL) {
                    Some(j) => {
                        tab.pivot(i, j);
                        i += 1;
                    }
                    None => {
                        tab.rows.remove(i);
                        tab.basis.remove(i);
                    }
                }
            } else {
                i += 1;
            }
        }
    }

    let (cost, _) = translate(&lp.objective);
    tab.set_objective(&cost);
    let mut allowed = vec![true; width];
    allowed[art0..].iter_mut().for_each(|v| *v = false);
    let outcome = tab.run(&allowed)?;
    if let PivotOutcome::Unbounded = outcome {
        return Ok(LpSolution {
            status: LpStatus::Unbounded,
            x: vec![0.0; lp.num_vars],
            objective_value: f64::INFINITY,
            iterations: tab.iterations,
        });
    }

    let mut y = vec![0.0; width];
    for (row, &b) in tab.rows.iter().zip(&tab.basis) {
        y[b] = row[width];
    }
    let x: Vec<f64> = maps
        .iter()
        .map(|map| match *map {
            VarMap::Shifted { col, offset } => offset + y[col],
            VarMap::Mirrored { col, offset } => offset - y[col],
            VarMap::Free { pos, neg } => y[pos] - y[neg],
        })
        .collect();
    Ok(LpSolution {
        status: LpStatus::Optimal,
        objective_value: lp.objective_value(&x),
        x,
        iterations: tab.iterations,
    })
}

/// Rows shared by the TSP and k-cycle programs for `n` vertices in groups of `m`.
fn structured_lp(n: usize, m: usize, objective_index: usize) -> LpProblem {
    let d = n / 2;
    let mut objective = vec![0.0; d];
    objective[objective_index - 1] = 1.0;
    let mut lp = LpProblem::new(objective);
    let lower = -1.0 / (m as f64 - 1.0);
    for k in 1..=d {
        let row: Vec<f64> = (1..=d).map(|i| cos_coef(n, i, k)).collect();
        lp.add_ge(row.clone(), lower);
        lp.add_le(row, 1.0);
    }
    lp.add_eq(vec![1.0; d], 1.0);
    let cap = 2.0 / (m as f64 - 1.0);
    for (i, b) in lp.bounds.iter_mut().enumerate() {
        *b = (0.0, if i + 1 < d { cap } else { cap / 2.0 });
    }
    lp
}

/// `max a_1` over the range, sum and sign conditions of the two-group family.
pub fn build_tsp_lp(n: usize) -> Result<LpProblem> {
    if n < 6 || !n.is_multiple_of(2) {
        return domain(format!("TSP program needs even n >= 6, got {n}"));
    }
    Ok(structured_lp(n, n / 2, 1))
}

/// `max a_k` for the `(k + 1)`-group family on `n = ck(k + 1)` vertices.
pub fn build_kcycle_lp(k: usize, c: usize) -> Result<LpProblem> {
    crate::kcycle::check_parameters(k, c)?;
    let n = c * k * (k + 1);
    Ok(structured_lp(n, c * k, k))
}

/// Outcome of comparing the LP rows with the eigenvalue test.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivalenceReport {
    pub n: usize,
    pub groups: usize,
    pub trials: usize,
    /// Families accepted by both sides.
    pub feasible: usize,
    pub disagreements: usize,
    /// First disagreeing `(trial, constraint index)`, index 0 meaning the
    /// sign/sum rows.
    pub first_disagreement: Option<(usize, usize)>,
}

/// Uniform `a_i` on `[0, 2/(m−1)]` (halved for `i = d`), rescaled to sum to 1.
pub fn random_family<R: Rng + ?Sized>(n: usize, groups: usize, rng: &mut R) -> Result<StructuredFamily> {
    let d = n / 2;
    let m = n / groups;
    let cap = 2.0 / (m as f64 - 1.0);
    let mut a: Vec<f64> = (1..=d)
        .map(|i| rng.gen::<f64>() * if i < d { cap } else { cap / 2.0 })
        .collect();
    let total: f64 = a.iter().sum();
    a.iter_mut().for_each(|v| *v /= total);
    StructuredFamily::from_a(n, groups, a)
}

/// `a_i = 1/d`: cosine sums are `0` or `−1/d`, strictly inside the range,
/// and every bound holds with room to spare.
pub fn uniform_family(n: usize, groups: usize) -> Result<StructuredFamily> {
    let d = n / 2;
    StructuredFamily::from_a(n, groups, vec![1.0 / d as f64; d])
}

/// `(1 − t)·anchor + t·random` with `t = u²`, `u` uniform.
pub fn anchored_family<R: Rng + ?Sized>(anchor: &StructuredFamily, rng: &mut R) -> Result<StructuredFamily> {
    let other = random_family(anchor.n(), anchor.groups(), rng)?;
    let t = rng.gen::<f64>().powi(2);
    let a = anchor
        .a_values()
        .iter()
        .zip(other.a_values())
        .map(|(x, y)| (1.0 - t) * x + t * y)
        .collect();
    StructuredFamily::from_a(anchor.n(), anchor.groups(), a)
}

/// Compares the LP verdict with `verify_feasibility` on one family, row by
/// row. Returns the first disagreeing constraint index (0 = sign/sum rows).
pub fn compare_verdicts(fam: &StructuredFamily, tol: f64) -> Result<(bool, Option<usize>)> {
    let n = fam.n();
    let m = fam.group_size() as f64;
    let sol = expand_family(fam);
    // Any cost works: the objective plays no part in feasibility.
    let inst = SdpInstance::with_metric_check(cut_cost_matrix(n)?, false)?;
    let report = verify_feasibility(&inst, &sol, tol)?;

    // Sign rows on a and the upper bounds (equivalent to b ≥ 0), measured on
    // the entries the eigen side inspects.
    let sign_ok = fam.a_values().iter().chain(fam.b_values()).all(|&v| v >= -tol);
    let sum_dev = (fam.a_values().iter().sum::<f64>() - 1.0).abs();
    let sum_ok = sum_dev * 1f64.max((m - 1.0) / (n as f64 - m)) <= tol;
    let mut first = None;
    if (sign_ok && sum_ok) != (report.nonneg_ok && report.sum_ok) {
        first = Some(0);
    }
    let mut lp_ok = sign_ok && sum_ok;
    for k in 1..=fam.d() {
        let in_range = a_hat_in_range(fam, a_hat(fam, k)?, report.psd_tols[k - 1]);
        lp_ok &= in_range;
        if in_range != report.psd_ok(k) && first.is_none() {
            first = Some(k);
        }
    }
    if lp_ok != report.feasible && first.is_none() {
        first = Some(0);
    }
    Ok((lp_ok && report.feasible, first))
}

pub fn equivalence_report<R: Rng + ?Sized>(
    n: usize,
    groups: usize,
    trials: usize,
    rng: &mut R,
) -> Result<EquivalenceReport> {
    let mut report = EquivalenceReport {
        n,
        groups,
        trials,
        feasible: 0,
        disagreements: 0,
        first_disagreement: None,
    };
    let anchor = uniform_family(n, groups)?;
    for t in 0..trials {
        // Odd trials sit on segments towards a feasible family so that both
        // verdicts occur at every n.
        let fam = if t % 2 == 1 {
            anchored_family(&anchor, rng)?
        } else {
            random_family(n, groups, rng)?
        };
        let (both, first) = compare_verdicts(&fam, 1e-8)?;
        if both {
            report.feasible += 1;
        }
        if let Some(k) = first {
            report.disagreements += 1;
            report.first_disagreement.get_or_insert((t, k));
        }
    }
    Ok(report)
}

/// True iff the range test and the eigenvalue test agree on `trials` random
/// two-group families.
pub fn check_equivalence(n: usize, trials: usize, seed: u64) -> bool {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    if n < 6 || !n.is_multiple_of(2) {
        return false;
    }
    equivalence_report(n, 2, trials, &mut rng)
        .map(|r| r.disagreements == 0)
        .unwrap_or(false)
}
