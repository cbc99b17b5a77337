//! Edge-space views of a solution: subtour and spanning-tree polytope
//! checks by exhaustive subset enumeration, exact small-instance TSP, and
//! the five-vertex degree-polytope check.

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lp_bridge::{simplex_solve, LpProblem, LpStatus};
use crate::witness::{analytic_a, expand_family};
use crate::SymMat;

/// Largest order accepted by the subset scans.
pub const MAX_SUBSET_N: usize = 22;
/// Largest order accepted by [`brute_force_tsp`].
pub const MAX_BRUTE_N: usize = 10;

/// Ties between subset values closer than this go to the lexicographically
/// smaller set.
const TIE_TOL: f64 = 1e-12;

/// Weights on the edges of `K_n`, stored by pair index over `i < j`.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeVector {
    n: usize,
    values: Vec<f64>,
}

impl EdgeVector {
    pub fn new(n: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != n * (n - 1) / 2 {
            return Err(Error::DimensionMismatch {
                expected: n * (n - 1) / 2,
                found: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("edge weights must be finite".into()));
        }
        Ok(EdgeVector { n, values })
    }

    /// Upper triangle of `X`.
    pub fn from_solution_matrix(x: &SymMat) -> Result<Self> {
        let n = x.order();
        if let Some(i) = (0..n).find(|&i| x.get(i, i) != 0.0) {
            return Err(Error::NonzeroDiagonal(i));
        }
        let mut values = Vec::with_capacity(n * (n - 1) / 2);
        for i in 0..n {
            values.extend_from_slice(&x.row(i)[i + 1..]);
        }
        EdgeVector::new(n, values)
    }

    /// Incidence vector of a closed tour.
    pub fn from_tour(n: usize, tour: &[usize]) -> Self {
        let mut m = SymMat::zeros(n);
        for (&u, &v) in tour.iter().zip(tour.iter().cycle().skip(1)) {
            m.set(u, v, 1.0);
        }
        EdgeVector::from_solution_matrix(&m).expect("tour matrix has zero diagonal")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        self.values[pair_index(self.n, i, j)]
    }

    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn to_matrix(&self) -> SymMat {
        SymMat::from_fn(self.n, |i, j| if i == j { 0.0 } else { self.get(i, j) })
    }

    pub fn degrees(&self) -> Vec<f64> {
        self.to_matrix().row_sums()
    }
}

/// Index of `{i, j}`, `i < j`, in row-major upper-triangle order.
pub fn pair_index(n: usize, i: usize, j: usize) -> usize {
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolytopeReport {
    pub check: String,
    pub violated: bool,
    pub worst_set: Vec<usize>,
    pub value: f64,
    pub rhs: f64,
}

impl PolytopeReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }
}

/// Degree, bound and cut verdicts of [`subtour_check`]. `cut` carries the
/// minimum-cut set over all `S` containing vertex 0.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubtourReport {
    pub degree_ok: bool,
    pub max_degree_dev: f64,
    pub bounds_ok: bool,
    pub cut: PolytopeReport,
}

impl SubtourReport {
    pub fn feasible(&self) -> bool {
        self.degree_ok && self.bounds_ok && !self.cut.violated
    }
}

fn members(mask: u32, n: usize) -> Vec<usize> {
    (0..n).filter(|&v| mask >> v & 1 == 1).collect()
}

fn lex_less(a: u32, b: u32, n: usize) -> bool {
    members(a, n) < members(b, n)
}

fn check_size(n: usize) -> Result<()> {
    if n > MAX_SUBSET_N {
        return Err(Error::TooLarge {
            n,
            limit: MAX_SUBSET_N,
        });
    }
    Ok(())
}

/// `Σ_{e ∈ δ(S)} x_e` summed directly.
pub fn cut_value(x: &EdgeVector, set: &[usize]) -> f64 {
    let n = x.n();
    let mut inside = vec![false; n];
    set.iter().for_each(|&v| inside[v] = true);
    let mut total = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            if inside[i] != inside[j] {
                total += x.get(i, j);
            }
        }
    }
    total
}

/// `Σ_{e ⊆ S} x_e` summed directly.
pub fn interior_value(x: &EdgeVector, set: &[usize]) -> f64 {
    set.iter()
        .tuple_combinations()
        .map(|(&i, &j)| x.get(i, j))
        .sum()
}

/// Degree constraints, `0 ≤ x ≤ 1`, and `x(δ(S)) ≥ 2` over every proper
/// `S ∋ 0`, walked in Gray-code order.
pub fn subtour_check(x: &EdgeVector, tol: f64) -> Result<SubtourReport> {
    let n = x.n();
    check_size(n)?;
    let m = x.to_matrix();
    let deg = m.row_sums();
    let max_degree_dev = deg.iter().fold(0.0_f64, |acc, d| acc.max((d - 2.0).abs()));
    let bounds_ok = x.values().iter().all(|&v| v >= -tol && v <= 1.0 + tol);

    let mut inside = vec![false; n];
    inside[0] = true;
    let mut cut = deg[0];
    let mut mask: u32 = 1;
    let mut best = (cut, mask);
    let full: u32 = (1 << n) - 1;
    for step in 1u32..(1 << (n - 1)) {
        let v = step.trailing_zeros() as usize + 1;
        let row = m.row(v);
        let to_set: f64 = (0..n).filter(|&u| inside[u] && u != v).map(|u| row[u]).sum();
        if inside[v] {
            cut -= deg[v] - 2.0 * to_set;
        } else {
            cut += deg[v] - 2.0 * to_set;
        }
        inside[v] = !inside[v];
        mask ^= 1 << v;
        if mask == full {
            continue;
        }
        if cut < best.0 - TIE_TOL || (cut <= best.0 + TIE_TOL && lex_less(mask, best.1, n)) {
            best = (cut, mask);
        }
    }
    let worst_set = members(best.1, n);
    let value = cut_value(x, &worst_set);
    Ok(SubtourReport {
        degree_ok: max_degree_dev <= tol,
        max_degree_dev,
        bounds_ok,
        cut: PolytopeReport {
            check: "subtour".into(),
            violated: value < 2.0 - tol,
            worst_set,
            value,
            rhs: 2.0,
        },
    })
}

/// Scales `x` by `(n − 1)/n` and finds the set maximising
/// `z(E(S)) − (|S| − 1)` over all `S` with `|S| ≥ 2`.
pub fn mst_polytope_check(x: &EdgeVector, tol: f64) -> Result<PolytopeReport> {
    let n = x.n();
    check_size(n)?;
    let scale = (n as f64 - 1.0) / n as f64;
    let m = x.to_matrix().scale(scale);

    let mut inside = vec![false; n];
    let mut size = 0usize;
    let mut interior = 0.0;
    let mut mask: u32 = 0;
    let mut best: Option<(f64, u32)> = None;
    for step in 1u32..(1 << n) {
        let v = step.trailing_zeros() as usize;
        let row = m.row(v);
        let to_set: f64 = (0..n).filter(|&u| inside[u] && u != v).map(|u| row[u]).sum();
        if inside[v] {
            interior -= to_set;
            size -= 1;
        } else {
            interior += to_set;
            size += 1;
        }
        inside[v] = !inside[v];
        mask ^= 1 << v;
        if size < 2 {
            continue;
        }
        let excess = interior - (size as f64 - 1.0);
        best = match best {
            None => Some((excess, mask)),
            Some((be, bm)) => {
                if excess > be + TIE_TOL || (excess >= be - TIE_TOL && lex_less(mask, bm, n)) {
                    Some((excess, mask))
                } else {
                    Some((be, bm))
                }
            }
        };
    }
    let (_, best_mask) = best.expect("n >= 2");
    let worst_set = members(best_mask, n);
    let value = scale * interior_value(x, &worst_set);
    let rhs = worst_set.len() as f64 - 1.0;
    Ok(PolytopeReport {
        check: "mst".into(),
        violated: value > rhs + tol,
        worst_set,
        value,
        rhs,
    })
}

/// One row of the spanning-tree crossover scan.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MstCrossoverRow {
    pub n: usize,
    pub violated: bool,
    /// `exhaustive` for a full subset scan, `group` when only the group set
    /// was evaluated.
    pub method: String,
    pub value: f64,
    pub rhs: f64,
}

/// `(n − 1)/4·(cos(π/d) + 1)`, the scaled interior weight of one group.
pub fn mst_group_value(n: usize) -> f64 {
    let d = (n / 2) as f64;
    (n as f64 - 1.0) / 4.0 * ((std::f64::consts::PI / d).cos() + 1.0)
}

/// Runs the spanning-tree check on the witness `X¹` for even `n` up to
/// `n_max`. Orders above [`MAX_SUBSET_N`] evaluate only the group set,
/// which is enough to certify a violation but not its absence.
pub fn mst_crossover(n_max: usize, tol: f64) -> Result<(Vec<MstCrossoverRow>, Option<usize>)> {
    let mut rows = Vec::new();
    for n in (6..=n_max).step_by(2) {
        let x1 = expand_family(&analytic_a(n)?).mat(1).clone();
        let x = EdgeVector::from_solution_matrix(&x1)?;
        let row = if n <= MAX_SUBSET_N {
            let r = mst_polytope_check(&x, tol)?;
            MstCrossoverRow {
                n,
                violated: r.violated,
                method: "exhaustive".into(),
                value: r.value,
                rhs: r.rhs,
            }
        } else {
            let group: Vec<usize> = (0..n / 2).collect();
            let value = (n as f64 - 1.0) / n as f64 * interior_value(&x, &group);
            let rhs = (n / 2) as f64 - 1.0;
            MstCrossoverRow {
                n,
                violated: value > rhs + tol,
                method: "group".into(),
                value,
                rhs,
            }
        };
        rows.push(row);
    }
    let first = rows.iter().find(|r| r.violated).map(|r| r.n);
    Ok((rows, first))
}

/// Exact minimum-cost tour, with vertex 0 first and the second vertex below
/// the last so each cycle is seen once.
pub fn brute_force_tsp(c: &SymMat) -> Result<(f64, Vec<usize>)> {
    let n = c.order();
    if n > MAX_BRUTE_N {
        return Err(Error::TooLarge {
            n,
            limit: MAX_BRUTE_N,
        });
    }
    if n < 3 {
        return Err(Error::Domain(format!("a tour needs n >= 3, got {n}")));
    }
    let mut best = (f64::INFINITY, Vec::new());
    for perm in (1..n).permutations(n - 1) {
        if perm[0] > perm[n - 2] {
            continue;
        }
        let mut cost = c.get(0, perm[0]) + c.get(perm[n - 2], 0);
        for w in perm.windows(2) {
            cost += c.get(w[0], w[1]);
        }
        if cost < best.0 {
            let mut tour = vec![0];
            tour.extend(perm);
            best = (cost, tour);
        }
    }
    Ok(best)
}

/// All Hamiltonian cycles of `K_n` as tours starting at 0, one per cycle.
pub fn hamiltonian_cycles(n: usize) -> Vec<Vec<usize>> {
    (1..n)
        .permutations(n - 1)
        .filter(|p| p[0] < p[n - 2])
        .map(|p| std::iter::once(0).chain(p).collect())
        .collect()
}

/// `max w·x` over degree constraints and `0 ≤ x ≤ 1`.
fn degree_polytope_lp(n: usize, weights: Vec<f64>) -> LpProblem {
    let e = n * (n - 1) / 2;
    let mut lp = LpProblem::new(weights);
    for v in 0..n {
        let mut row = vec![0.0; e];
        for u in 0..n {
            if u != v {
                let (i, j) = if u < v { (u, v) } else { (v, u) };
                row[pair_index(n, i, j)] = 1.0;
            }
        }
        lp.add_eq(row, 2.0);
    }
    lp.bounds = vec![(0.0, 1.0); e];
    lp
}

/// Subtour LP optimum: degree constraints, bounds, and every cut row over
/// `S ∋ 0`. Returned as a minimisation value.
pub fn subtour_lp_optimum(c: &SymMat) -> Result<f64> {
    let n = c.order();
    check_size(n)?;
    let e = n * (n - 1) / 2;
    let mut weights = vec![0.0; e];
    for i in 0..n {
        for j in i + 1..n {
            weights[pair_index(n, i, j)] = -c.get(i, j);
        }
    }
    let mut lp = degree_polytope_lp(n, weights);
    for mask in 1u32..(1 << (n - 1)) {
        let set: Vec<bool> = (0..n).map(|v| v == 0 || mask >> (v - 1) & 1 == 1).collect();
        if set.iter().filter(|&&b| b).count() < 2 || set.iter().all(|&b| b) {
            continue;
        }
        let mut row = vec![0.0; e];
        for i in 0..n {
            for j in i + 1..n {
                if set[i] != set[j] {
                    row[pair_index(n, i, j)] = 1.0;
                }
            }
        }
        lp.add_ge(row, 2.0);
    }
    let s = simplex_solve(&lp)?;
    if s.status != LpStatus::Optimal {
        return Err(Error::Domain(format!("subtour LP ended {:?}", s.status)));
    }
    Ok(-s.objective_value)
}

/// Outcome of the five-vertex check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct N5Report {
    pub cycles: usize,
    pub cycles_feasible: bool,
    pub probes: usize,
    pub probes_on_cycles: usize,
    pub halves_decomposes: bool,
    pub halves_weights: Vec<f64>,
}

impl N5Report {
    pub fn passed(&self) -> bool {
        self.cycles == 12 && self.cycles_feasible && self.probes_on_cycles == self.probes && self.halves_decomposes
    }
}

pub fn n5_report(seed: u64, trials: usize) -> Result<N5Report> {
    let n = 5;
    let cycles: Vec<EdgeVector> = hamiltonian_cycles(n)
        .iter()
        .map(|t| EdgeVector::from_tour(n, t))
        .collect();
    let mut cycles_feasible = true;
    for x in &cycles {
        cycles_feasible &= subtour_check(x, 1e-12)?.feasible();
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut on_cycles = 0;
    for _ in 0..trials {
        let w: Vec<f64> = (0..10).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let s = simplex_solve(&degree_polytope_lp(n, w))?;
        if s.status == LpStatus::Optimal
            && cycles.iter().any(|c| {
                c.values()
                    .iter()
                    .zip(&s.x)
                    .all(|(a, b)| (a - b).abs() <= 1e-8)
            })
        {
            on_cycles += 1;
        }
    }

    // λ ≥ 0, Σλ = 1, Σ λ_c x_c = ½ on every edge.
    let k = cycles.len();
    let mut lp = LpProblem::new(vec![0.0; k]);
    lp.add_eq(vec![1.0; k], 1.0);
    for e in 0..10 {
        lp.add_eq(cycles.iter().map(|c| c.values()[e]).collect(), 0.5);
    }
    let s = simplex_solve(&lp)?;
    let halves_decomposes = s.status == LpStatus::Optimal
        && (0..10).all(|e| {
            let v: f64 = cycles.iter().zip(&s.x).map(|(c, l)| l * c.values()[e]).sum();
            (v - 0.5).abs() <= 1e-8
        });

    Ok(N5Report {
        cycles: k,
        cycles_feasible,
        probes: trials,
        probes_on_cycles: on_cycles,
        halves_decomposes,
        halves_weights: s.x,
    })
}

/// True iff every five-vertex cycle is subtour-feasible, every LP probe
/// over the degree polytope lands on a cycle, and the all-halves point is a
/// convex combination of cycles.
pub fn n5_equivalence_check(seed: u64, trials: usize) -> bool {
    n5_report(seed, trials).map(|r| r.passed()).unwrap_or(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tsp_sdp::distance_matrix;
    use crate::witness::cut_cost_matrix;

    #[test]
    fn pair_indexing() {
        let n = 6;
        let mut k = 0;
        for i in 0..n {
            for j in i + 1..n {
                assert_eq!(pair_index(n, i, j), k);
                k += 1;
            }
        }
    }

    #[test]
    fn edge_vectors() {
        let x = EdgeVector::from_solution_matrix(&distance_matrix(4, 1).unwrap()).unwrap();
        assert_eq!(x.values(), &[1.0, 0.0, 1.0, 1.0, 0.0, 1.0]);
        assert_eq!(x.total(), 4.0);
        let fam = analytic_a(6).unwrap();
        let w = EdgeVector::from_solution_matrix(expand_family(&fam).mat(1)).unwrap();
        assert_eq!(w.values().iter().filter(|&&v| v == 0.75).count(), 6);
        assert_eq!(w.values().iter().filter(|&&v| v == fam.b(1)).count(), 9);
        assert!((w.total() - 6.0).abs() < 1e-12);
        assert!(matches!(
            EdgeVector::from_solution_matrix(&SymMat::identity(3)),
            Err(Error::NonzeroDiagonal(0))
        ));
    }

    #[test]
    fn witness_six_violates_subtour() {
        let x = EdgeVector::from_solution_matrix(expand_family(&analytic_a(6).unwrap()).mat(1)).unwrap();
        let r = subtour_check(&x, 1e-9).unwrap();
        assert!(r.degree_ok && r.bounds_ok);
        assert!(r.cut.violated);
        assert_eq!(r.cut.worst_set, vec![0, 1, 2]);
        assert!((r.cut.value - 1.5).abs() < 1e-12);
    }

    #[test]
    fn tours_pass_subtour() {
        for n in [5, 7, 9] {
            let tour: Vec<usize> = (0..n).map(|i| (i * 2) % n).collect();
            let r = subtour_check(&EdgeVector::from_tour(n, &tour), 1e-12).unwrap();
            assert!(r.feasible());
            assert!((r.cut.value - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn size_limits() {
        let big = EdgeVector::new(23, vec![0.0; 23 * 22 / 2]).unwrap();
        assert!(matches!(subtour_check(&big, 1e-9), Err(Error::TooLarge { .. })));
        assert!(matches!(mst_polytope_check(&big, 1e-9), Err(Error::TooLarge { .. })));
        assert!(matches!(brute_force_tsp(&SymMat::zeros(11)), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn spanning_tree_is_inside() {
        // A path 0-1-2-3-4 scaled up by n/(n−1) lands exactly on the polytope.
        let n = 5;
        let s = n as f64 / (n as f64 - 1.0);
        let mut m = SymMat::zeros(n);
        for i in 0..n - 1 {
            m.set(i, i + 1, s);
        }
        let r = mst_polytope_check(&EdgeVector::from_solution_matrix(&m).unwrap(), 1e-12).unwrap();
        assert!(!r.violated);
        assert!((r.value - r.rhs).abs() < 1e-12);
    }

    #[test]
    fn mst_small_witnesses() {
        for (n, group_value) in [(6, 1.875), (8, 2.987_436_867)] {
            let x = EdgeVector::from_solution_matrix(expand_family(&analytic_a(n).unwrap()).mat(1)).unwrap();
            let r = mst_polytope_check(&x, 1e-9).unwrap();
            assert!(!r.violated, "n = {n}: {r:?}");
            let group: Vec<usize> = (0..n / 2).collect();
            let g = (n as f64 - 1.0) / n as f64 * interior_value(&x, &group);
            assert!((g - group_value).abs() < 1e-8);
            assert!((g - mst_group_value(n)).abs() < 1e-12);
        }
        let (rows, first) = mst_crossover(12, 1e-9).unwrap();
        assert_eq!(first, Some(10));
        assert!(rows.iter().filter(|r| r.n >= 10).all(|r| r.violated));
    }

    #[test]
    fn brute_force_values() {
        for n in [4, 6, 8] {
            let (cost, tour) = brute_force_tsp(&cut_cost_matrix(n).unwrap()).unwrap();
            assert_eq!(cost, 2.0);
            assert_eq!(tour.iter().copied().sorted().collect::<Vec<_>>(), (0..n).collect::<Vec<_>>());
        }
        let unit = SymMat::from_fn(5, |i, j| if i == j { 0.0 } else { 1.0 });
        assert_eq!(brute_force_tsp(&unit).unwrap().0, 5.0);
        assert_eq!(hamiltonian_cycles(5).len(), 12);
    }

    #[test]
    fn subtour_lp_below_tour() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in [5, 6] {
            let pts: Vec<(f64, f64)> = (0..n).map(|_| (rng.gen(), rng.gen())).collect();
            let c = SymMat::from_fn(n, |i, j| {
                let (a, b) = (pts[i], pts[j]);
                ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt()
            });
            let lp = subtour_lp_optimum(&c).unwrap();
            let (tour, _) = brute_force_tsp(&c).unwrap();
            assert!(lp <= tour + 1e-9);
        }
    }

    #[test]
    fn five_vertex_check() {
        let r = n5_report(0, 50).unwrap();
        assert!(r.passed(), "{r:?}");
        assert!((r.halves_weights.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn report_json_keys() {
        let x = EdgeVector::from_solution_matrix(expand_family(&analytic_a(6).unwrap()).mat(1)).unwrap();
        let v: serde_json::Value = serde_json::from_str(&subtour_check(&x, 1e-9).unwrap().cut.to_json()).unwrap();
        for key in ["check", "violated", "worst_set", "value", "rhs"] {
            assert!(v.get(key).is_some());
        }
    }
}
