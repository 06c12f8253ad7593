//! Dense tableau simplex for `min c.x  s.t.  A x >= b, x >= 0`.
//!
//! Two-phase primal simplex with Bland's rule (lowest-index entering column,
//! lowest-index basic variable on ratio ties). The artificial columns are
//! kept in the tableau for the whole solve: they hold `B^-1`, which yields
//! the dual prices and lets callers append columns to a solved program
//! (column generation) without starting over.

use crate::error::{Error, Result};

pub const PIVOT_TOL: f64 = 1e-10;
pub const FEAS_TOL: f64 = 1e-9;
pub const DUALITY_TOL: f64 = 1e-7;
const COST_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    /// Cost per column.
    pub objective: Vec<f64>,
    /// Row-major constraint matrix, `rows x objective.len()`.
    pub rows: Vec<Vec<f64>>,
    pub rhs: Vec<f64>,
}

impl LinearProgram {
    pub fn new(objective: Vec<f64>, rows: Vec<Vec<f64>>, rhs: Vec<f64>) -> Result<Self> {
        if rows.len() != rhs.len() {
            return Err(Error::Contract(format!(
                "{} constraint rows but {} right-hand sides",
                rows.len(),
                rhs.len()
            )));
        }
        if let Some(bad) = rows.iter().position(|r| r.len() != objective.len()) {
            return Err(Error::Contract(format!(
                "row {bad} has {} entries, expected {}",
                rows[bad].len(),
                objective.len()
            )));
        }
        let finite = objective
            .iter()
            .chain(rows.iter().flatten())
            .chain(rhs.iter())
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::Contract("non-finite LP coefficient".into()));
        }
        Ok(Self {
            objective,
            rows,
            rhs,
        })
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn num_cols(&self) -> usize {
        self.objective.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    pub primal: Vec<f64>,
    /// One price per constraint row, nonnegative at optimality.
    pub dual: Vec<f64>,
    pub objective: f64,
}

impl LpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

/// Solves a program from scratch.
pub fn solve_lp(lp: &LinearProgram) -> LpSolution {
    let mut simplex = Simplex::new(lp);
    simplex.solve();
    simplex.solution()
}

/// Columns with a strictly positive value in an optimal solution.
pub fn basic_support(solution: &LpSolution) -> Result<Vec<usize>> {
    if !solution.is_optimal() {
        return Err(Error::Contract(format!(
            "support requested for a {:?} solution",
            solution.status
        )));
    }
    Ok(solution
        .primal
        .iter()
        .enumerate()
        .filter(|(_, &x)| x > FEAS_TOL)
        .map(|(j, _)| j)
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ColumnKind {
    Structural(usize),
    Surplus,
    Artificial(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Phase {
    Fresh,
    One,
    Two,
    Done(LpStatus),
}

/// Resumable simplex state.
#[derive(Debug, Clone)]
pub struct Simplex {
    rows: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    kinds: Vec<ColumnKind>,
    costs: Vec<f64>,
    /// `+1` or `-1`: rows with negative right-hand side are negated.
    signs: Vec<f64>,
    basis: Vec<usize>,
    reduced: Vec<f64>,
    structural: Vec<usize>,
    original: LinearProgram,
    phase: Phase,
}

impl Simplex {
    pub fn new(lp: &LinearProgram) -> Self {
        let p = lp.num_rows();
        let q = lp.num_cols();
        let signs: Vec<f64> = lp
            .rhs
            .iter()
            .map(|&b| if b < 0.0 { -1.0 } else { 1.0 })
            .collect();
        let width = q + 2 * p;
        let mut rows = vec![vec![0.0; width]; p];
        let mut kinds = Vec::with_capacity(width);
        kinds.extend((0..q).map(ColumnKind::Structural));
        kinds.extend((0..p).map(|_| ColumnKind::Surplus));
        kinds.extend((0..p).map(ColumnKind::Artificial));
        for i in 0..p {
            for j in 0..q {
                rows[i][j] = signs[i] * lp.rows[i][j];
            }
            rows[i][q + i] = -signs[i];
            rows[i][q + p + i] = 1.0;
        }
        let rhs = lp.rhs.iter().zip(&signs).map(|(b, s)| b * s).collect();
        Self {
            rows,
            rhs,
            kinds,
            costs: vec![0.0; width],
            signs,
            basis: (0..p).map(|i| q + p + i).collect(),
            reduced: vec![0.0; width],
            structural: (0..q).collect(),
            original: lp.clone(),
            phase: Phase::Fresh,
        }
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    fn artificial_col(&self, row: usize) -> usize {
        self.kinds
            .iter()
            .position(|k| *k == ColumnKind::Artificial(row))
            .expect("artificial column exists")
    }

    fn install_costs(&mut self, phase: Phase) {
        for (j, kind) in self.kinds.iter().enumerate() {
            self.costs[j] = match (phase, kind) {
                (Phase::One, ColumnKind::Artificial(_)) => 1.0,
                (Phase::Two, ColumnKind::Structural(s)) => self.original.objective[*s],
                _ => 0.0,
            };
        }
        self.recompute_reduced();
    }

    fn recompute_reduced(&mut self) {
        let width = self.kinds.len();
        for j in 0..width {
            let mut d = self.costs[j];
            for (r, &b) in self.basis.iter().enumerate() {
                d -= self.costs[b] * self.rows[r][j];
            }
            self.reduced[j] = d;
        }
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let width = self.kinds.len();
        let piv = self.rows[row][col];
        for j in 0..width {
            self.rows[row][j] /= piv;
        }
        self.rhs[row] /= piv;
        let pivot_row = self.rows[row].clone();
        let pivot_rhs = self.rhs[row];
        for r in 0..self.rows.len() {
            if r == row {
                continue;
            }
            let factor = self.rows[r][col];
            if factor != 0.0 {
                for j in 0..width {
                    self.rows[r][j] -= factor * pivot_row[j];
                }
                self.rows[r][col] = 0.0;
                self.rhs[r] -= factor * pivot_rhs;
            }
        }
        let factor = self.reduced[col];
        if factor != 0.0 {
            for j in 0..width {
                self.reduced[j] -= factor * pivot_row[j];
            }
            self.reduced[col] = 0.0;
        }
        self.basis[row] = col;
    }

    /// Runs Bland-rule iterations for the current cost vector.
    fn iterate(&mut self, allow_artificial: bool) -> LpStatus {
        loop {
            let entering = (0..self.kinds.len()).find(|&j| {
                (allow_artificial || !matches!(self.kinds[j], ColumnKind::Artificial(_)))
                    && self.reduced[j] < -COST_TOL
            });
            let Some(col) = entering else {
                return LpStatus::Optimal;
            };
            let mut leaving: Option<(usize, f64)> = None;
            for r in 0..self.rows.len() {
                let a = self.rows[r][col];
                if a > PIVOT_TOL {
                    let ratio = self.rhs[r].max(0.0) / a;
                    leaving = match leaving {
                        None => Some((r, ratio)),
                        Some((best, best_ratio)) => {
                            if ratio < best_ratio - 1e-12
                                || (ratio <= best_ratio + 1e-12
                                    && self.basis[r] < self.basis[best])
                            {
                                Some((r, ratio))
                            } else {
                                Some((best, best_ratio))
                            }
                        }
                    };
                }
            }
            match leaving {
                Some((row, _)) => self.pivot(row, col),
                None => return LpStatus::Unbounded,
            }
        }
    }

    fn rhs_scale(&self) -> f64 {
        1.0 + self
            .original
            .rhs
            .iter()
            .fold(0.0f64, |m, b| m.max(b.abs()))
    }

    fn phase_one(&mut self) -> bool {
        self.install_costs(Phase::One);
        self.iterate(true);
        let infeasibility: f64 = self
            .basis
            .iter()
            .zip(&self.rhs)
            .filter(|(&b, _)| matches!(self.kinds[b], ColumnKind::Artificial(_)))
            .map(|(_, &v)| v)
            .sum();
        if infeasibility > FEAS_TOL * self.rhs_scale() {
            return false;
        }
        // Drive remaining (zero-valued) artificials out of the basis.
        for r in 0..self.rows.len() {
            if matches!(self.kinds[self.basis[r]], ColumnKind::Artificial(_)) {
                let replacement = (0..self.kinds.len()).find(|&j| {
                    !matches!(self.kinds[j], ColumnKind::Artificial(_))
                        && self.rows[r][j].abs() > PIVOT_TOL
                });
                if let Some(col) = replacement {
                    self.pivot(r, col);
                }
            }
        }
        true
    }

    /// Solves (or re-optimises after [`Simplex::add_column`]).
    pub fn solve(&mut self) -> LpStatus {
        loop {
            match self.phase {
                Phase::Fresh => {
                    self.phase = Phase::One;
                    if !self.phase_one() {
                        self.phase = Phase::Done(LpStatus::Infeasible);
                    } else {
                        self.phase = Phase::Two;
                        self.install_costs(Phase::Two);
                    }
                }
                Phase::One => unreachable!("phase one runs inside Fresh"),
                Phase::Two => {
                    let status = self.iterate(false);
                    self.phase = Phase::Done(status);
                }
                Phase::Done(status) => return status,
            }
        }
    }

    /// Appends a structural column and returns its index in the primal vector.
    ///
    /// After an optimal solve the basis stays valid, so the next
    /// [`Simplex::solve`] continues phase two from the current vertex.
    pub fn add_column(&mut self, cost: f64, column: &[f64]) -> usize {
        assert_eq!(column.len(), self.rows.len(), "column length");
        let index = self.structural.len();
        self.original.objective.push(cost);
        for (row, &a) in self.original.rows.iter_mut().zip(column) {
            row.push(a);
        }
        // Tableau image B^-1 (signs .* a), with B^-1 read off the artificial columns.
        let p = self.rows.len();
        let art: Vec<usize> = (0..p).map(|i| self.artificial_col(i)).collect();
        let signed: Vec<f64> = column.iter().zip(&self.signs).map(|(a, s)| a * s).collect();
        let image: Vec<f64> = (0..p)
            .map(|r| (0..p).map(|i| self.rows[r][art[i]] * signed[i]).sum())
            .collect();
        for (r, v) in image.iter().enumerate() {
            self.rows[r].push(*v);
        }
        let col = self.kinds.len();
        self.kinds.push(ColumnKind::Structural(index));
        self.structural.push(col);
        let c = match self.phase {
            Phase::Fresh => 0.0,
            _ => cost,
        };
        self.costs.push(c);
        let mut d = c;
        for (r, &b) in self.basis.iter().enumerate() {
            d -= self.costs[b] * image[r];
        }
        self.reduced.push(d);
        if let Phase::Done(LpStatus::Optimal) = self.phase {
            self.phase = Phase::Two;
        } else if let Phase::Done(LpStatus::Unbounded) = self.phase {
            self.phase = Phase::Two;
        }
        index
    }

    /// Dual prices of the original rows for the current basis.
    fn duals(&self) -> Vec<f64> {
        (0..self.rows.len())
            .map(|i| {
                let d = self.reduced[self.artificial_col(i)];
                let price = -self.signs[i] * d;
                if price.abs() < 1e-13 {
                    0.0
                } else {
                    price
                }
            })
            .collect()
    }

    pub fn solution(&self) -> LpSolution {
        let status = match self.phase {
            Phase::Done(status) => status,
            _ => panic!("solution requested before solve"),
        };
        let q = self.structural.len();
        if status != LpStatus::Optimal {
            return LpSolution {
                status,
                primal: vec![0.0; q],
                dual: vec![0.0; self.rows.len()],
                objective: match status {
                    LpStatus::Unbounded => f64::NEG_INFINITY,
                    _ => f64::INFINITY,
                },
            };
        }
        let mut primal = vec![0.0; q];
        for (r, &b) in self.basis.iter().enumerate() {
            if let ColumnKind::Structural(s) = self.kinds[b] {
                primal[s] = if self.rhs[r].abs() < 1e-13 {
                    0.0
                } else {
                    self.rhs[r].max(0.0)
                };
            }
        }
        let objective = primal
            .iter()
            .zip(&self.original.objective)
            .map(|(x, c)| x * c)
            .sum();
        LpSolution {
            status,
            primal,
            dual: self.duals(),
            objective,
        }
    }

    pub fn program(&self) -> &LinearProgram {
        &self.original
    }
}

/// Residuals of an optimal solution: primal infeasibility, dual
/// infeasibility, duality gap and complementary slackness, all absolute.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residuals {
    pub primal: f64,
    pub dual: f64,
    pub gap: f64,
    pub slackness: f64,
}

pub fn residuals(lp: &LinearProgram, sol: &LpSolution) -> Residuals {
    let mut primal = sol.primal.iter().fold(0.0f64, |m, &x| m.max(-x));
    let mut slackness = 0.0f64;
    for (i, row) in lp.rows.iter().enumerate() {
        let lhs: f64 = row.iter().zip(&sol.primal).map(|(a, x)| a * x).sum();
        primal = primal.max(lp.rhs[i] - lhs);
        slackness = slackness.max((sol.dual[i] * (lhs - lp.rhs[i])).abs());
    }
    let mut dual = sol.dual.iter().fold(0.0f64, |m, &y| m.max(-y));
    for j in 0..lp.num_cols() {
        let used: f64 = (0..lp.num_rows()).map(|i| lp.rows[i][j] * sol.dual[i]).sum();
        let reduced = lp.objective[j] - used;
        dual = dual.max(-reduced);
        slackness = slackness.max((sol.primal[j] * reduced).abs());
    }
    let dual_obj: f64 = sol.dual.iter().zip(&lp.rhs).map(|(y, b)| y * b).sum();
    Residuals {
        primal,
        dual,
        gap: (sol.objective - dual_obj).abs(),
        slackness,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lp(c: &[f64], a: &[&[f64]], b: &[f64]) -> LinearProgram {
        LinearProgram::new(c.to_vec(), a.iter().map(|r| r.to_vec()).collect(), b.to_vec()).unwrap()
    }

    /// Enumerates all bases of `[A | -I]` and returns the best feasible vertex value.
    fn brute_force_min(lp: &LinearProgram) -> Option<f64> {
        let p = lp.num_rows();
        let q = lp.num_cols();
        let width = q + p;
        let column = |j: usize| -> Vec<f64> {
            (0..p)
                .map(|i| {
                    if j < q {
                        lp.rows[i][j]
                    } else if j - q == i {
                        -1.0
                    } else {
                        0.0
                    }
                })
                .collect()
        };
        let mut best: Option<f64> = None;
        let mut choose = vec![0usize; p];
        fn rec(
            start: usize,
            depth: usize,
            width: usize,
            choose: &mut Vec<usize>,
            visit: &mut dyn FnMut(&[usize]),
        ) {
            if depth == choose.len() {
                visit(choose);
                return;
            }
            for j in start..width {
                choose[depth] = j;
                rec(j + 1, depth + 1, width, choose, visit);
            }
        }
        let mut visit = |basis: &[usize]| {
            // Gaussian elimination on the p x p basis matrix.
            let mut m: Vec<Vec<f64>> = (0..p)
                .map(|i| {
                    let mut row: Vec<f64> = basis.iter().map(|&j| column(j)[i]).collect();
                    row.push(lp.rhs[i]);
                    row
                })
                .collect();
            for c in 0..p {
                let Some(piv) = (c..p).max_by(|&a, &b| m[a][c].abs().total_cmp(&m[b][c].abs()))
                else {
                    return;
                };
                if m[piv][c].abs() < 1e-12 {
                    return;
                }
                m.swap(c, piv);
                for r in 0..p {
                    if r != c {
                        let f = m[r][c] / m[c][c];
                        for k in c..=p {
                            m[r][k] -= f * m[c][k];
                        }
                    }
                }
            }
            let values: Vec<f64> = (0..p).map(|i| m[i][p] / m[i][i]).collect();
            if values.iter().any(|&v| v < -1e-9) {
                return;
            }
            let obj: f64 = basis
                .iter()
                .zip(&values)
                .filter(|(&j, _)| j < q)
                .map(|(&j, &v)| lp.objective[j] * v)
                .sum();
            if best.map_or(true, |b| obj < b) {
                best = Some(obj);
            }
        };
        rec(0, 0, width, &mut choose, &mut visit);
        best
    }

    #[test]
    fn single_binding_constraint() {
        let sol = solve_lp(&lp(&[1.0], &[&[1.0]], &[3.0]));
        assert!(sol.is_optimal());
        assert!((sol.primal[0] - 3.0).abs() < 1e-9);
        assert!((sol.objective - 3.0).abs() < 1e-9);
        assert!((sol.dual[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn separable_program() {
        let sol = solve_lp(&lp(&[1.0, 1.0], &[&[2.0, 0.0], &[0.0, 1.0]], &[4.0, 1.0]));
        assert!(sol.is_optimal());
        assert!((sol.primal[0] - 2.0).abs() < 1e-9);
        assert!((sol.primal[1] - 1.0).abs() < 1e-9);
        assert!((sol.objective - 3.0).abs() < 1e-9);
    }

    #[test]
    fn pattern_program_matches_vertex_enumeration() {
        // sizes {0.6: 2, 0.4: 2}; patterns (1,0), (0,2), (1,1)
        let program = lp(
            &[1.0, 1.0, 1.0],
            &[&[1.0, 0.0, 1.0], &[0.0, 2.0, 1.0]],
            &[2.0, 2.0],
        );
        let sol = solve_lp(&program);
        let brute = brute_force_min(&program).unwrap();
        assert!((brute - 2.0).abs() < 1e-12);
        assert!((sol.objective - brute).abs() < 1e-9);
        let support = basic_support(&sol).unwrap();
        assert!(support.len() <= 2);
        let r = residuals(&program, &sol);
        assert!(r.gap < DUALITY_TOL && r.slackness < DUALITY_TOL);
        assert!(r.primal < FEAS_TOL && r.dual < FEAS_TOL);
    }

    #[test]
    fn infeasible_and_unbounded() {
        // x >= 1 and -x >= 0
        let sol = solve_lp(&lp(&[1.0], &[&[1.0], &[-1.0]], &[1.0, 0.0]));
        assert_eq!(sol.status, LpStatus::Infeasible);
        assert!(basic_support(&sol).is_err());
        // min -x s.t. x >= 1
        let sol = solve_lp(&lp(&[-1.0], &[&[1.0]], &[1.0]));
        assert_eq!(sol.status, LpStatus::Unbounded);
    }

    #[test]
    fn negative_rhs_rows() {
        // x1 + x2 >= 1, -x1 >= -0.25  (x1 <= 0.25); min 2 x1 + 3 x2
        let program = lp(&[2.0, 3.0], &[&[1.0, 1.0], &[-1.0, 0.0]], &[1.0, -0.25]);
        let sol = solve_lp(&program);
        assert!(sol.is_optimal());
        assert!((sol.objective - (0.5 + 2.25)).abs() < 1e-9);
        let r = residuals(&program, &sol);
        assert!(r.gap < DUALITY_TOL, "{r:?}");
        assert!(r.dual < FEAS_TOL, "{r:?}");
    }

    #[test]
    fn empty_support_for_zero_demand() {
        let sol = solve_lp(&lp(&[1.0, 1.0], &[&[1.0, 1.0]], &[0.0]));
        assert!(sol.is_optimal());
        assert!(basic_support(&sol).unwrap().is_empty());
    }

    #[test]
    fn added_columns_warm_start() {
        let program = lp(&[1.0, 1.0], &[&[1.0, 0.0], &[0.0, 1.0]], &[2.0, 2.0]);
        let mut simplex = Simplex::new(&program);
        assert_eq!(simplex.solve(), LpStatus::Optimal);
        assert!((simplex.solution().objective - 4.0).abs() < 1e-9);
        simplex.add_column(1.0, &[1.0, 1.0]);
        assert_eq!(simplex.solve(), LpStatus::Optimal);
        let sol = simplex.solution();
        assert!((sol.objective - 2.0).abs() < 1e-9);
        assert_eq!(sol.primal.len(), 3);
        let r = residuals(simplex.program(), &sol);
        assert!(r.gap < DUALITY_TOL && r.primal < FEAS_TOL);
    }

    #[test]
    fn deterministic() {
        let program = lp(
            &[1.0, 1.0, 1.0, 1.0],
            &[&[1.0, 0.0, 2.0, 1.0], &[0.0, 3.0, 1.0, 1.0], &[1.0, 1.0, 0.0, 2.0]],
            &[3.0, 4.0, 2.0],
        );
        let a = solve_lp(&program);
        let b = solve_lp(&program);
        assert_eq!(format!("{a:?}"), format!("{b:?}"));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn covering_lp() -> impl Strategy<Value = LinearProgram> {
            (1usize..=3, 1usize..=4).prop_flat_map(|(p, q)| {
                (
                    proptest::collection::vec(1u8..=5, q),
                    proptest::collection::vec(proptest::collection::vec(0u8..=3, q), p),
                    proptest::collection::vec(0u8..=6, p),
                )
                    .prop_map(|(c, a, b)| {
                        // Make every row coverable by forcing a positive entry.
                        let rows: Vec<Vec<f64>> = a
                            .into_iter()
                            .enumerate()
                            .map(|(i, mut r)| {
                                let k = i % r.len();
                                if r[k] == 0 {
                                    r[k] = 1;
                                }
                                r.into_iter().map(f64::from).collect()
                            })
                            .collect();
                        LinearProgram::new(
                            c.into_iter().map(f64::from).collect(),
                            rows,
                            b.into_iter().map(f64::from).collect(),
                        )
                        .unwrap()
                    })
            })
        }

        proptest! {
            #[test]
            fn optimal_solves_certify_themselves(program in covering_lp()) {
                let sol = solve_lp(&program);
                prop_assert!(sol.is_optimal());
                let r = residuals(&program, &sol);
                let scale = 1.0 + program.rhs.iter().fold(0.0f64, |m, b| m.max(b.abs()));
                prop_assert!(r.primal <= FEAS_TOL * scale, "{:?}", r);
                prop_assert!(r.dual <= FEAS_TOL * scale, "{:?}", r);
                prop_assert!(r.gap <= DUALITY_TOL, "{:?}", r);
                prop_assert!(r.slackness <= DUALITY_TOL, "{:?}", r);
                prop_assert!(basic_support(&sol).unwrap().len() <= program.num_rows());
                let brute = brute_force_min(&program).unwrap();
                prop_assert!((brute - sol.objective).abs() < 1e-7);
            }
        }
    }
}
