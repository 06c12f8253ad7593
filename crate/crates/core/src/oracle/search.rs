//! Exhaustive search over pairwise separation relations.
//!
//! Every pair of items in a packing is separated along some axis, one item
//! ending where or before the other starts. Conversely, a set of such
//! relations that separates every pair and is acyclic per axis yields a
//! packing by placing each item at the longest path of its predecessors on
//! every axis; those coordinates are sums of item extents and never exceed
//! the coordinates of any packing that satisfies the relations. So branching
//! on one separating relation per pair and checking the longest-path spans is
//! an exact decision procedure.
//!
//! Relations are kept transitively closed as bitmasks, so a pair already
//! separated through a chain is never branched on.

use crate::error::OracleError;

pub(crate) const MAX_ITEMS: usize = 64;

pub(crate) struct Problem {
    /// Integer extents per item and axis.
    pub extents: Vec<Vec<i128>>,
    /// Container size per axis; `None` for the axis being minimised.
    pub capacity: Vec<Option<i128>>,
    /// Stop at the first feasible relation set instead of minimising.
    pub feasibility_only: bool,
    /// Known lower bound on the minimised span; reaching it ends the search.
    pub lower_bound: i128,
    /// Initial incumbent span; only strictly better packings are searched for.
    pub upper_bound: i128,
    pub node_budget: u64,
}

pub(crate) struct Outcome {
    /// Minimised span (or 0 in feasibility mode) and item positions.
    pub best: Option<(i128, Vec<Vec<i128>>)>,
}

struct Search<'a> {
    p: &'a Problem,
    n: usize,
    dims: usize,
    /// succ[d][i]: items that must start after `i` ends on axis `d`.
    succ: Vec<Vec<u64>>,
    pred: Vec<Vec<u64>>,
    identical: Vec<u64>,
    nodes: u64,
    best_span: i128,
    best: Option<(i128, Vec<Vec<i128>>)>,
    done: bool,
}

impl Search<'_> {
    fn positions(&self, d: usize) -> Vec<i128> {
        let mut order: Vec<usize> = (0..self.n).collect();
        order.sort_by_key(|&i| self.pred[d][i].count_ones());
        let mut pos = vec![0i128; self.n];
        for &j in &order {
            let mut mask = self.pred[d][j];
            while mask != 0 {
                let i = mask.trailing_zeros() as usize;
                mask &= mask - 1;
                pos[j] = pos[j].max(pos[i] + self.p.extents[i][d]);
            }
        }
        pos
    }

    fn span(&self, d: usize, pos: &[i128]) -> i128 {
        (0..self.n)
            .map(|i| pos[i] + self.p.extents[i][d])
            .max()
            .unwrap_or(0)
    }

    fn separated(&self, i: usize, j: usize) -> bool {
        (0..self.dims)
            .any(|d| self.succ[d][i] >> j & 1 == 1 || self.succ[d][j] >> i & 1 == 1)
    }

    fn relate(&mut self, d: usize, a: usize, b: usize) {
        let before = self.pred[d][a] | 1 << a;
        let after = self.succ[d][b] | 1 << b;
        let mut m = before;
        while m != 0 {
            let u = m.trailing_zeros() as usize;
            m &= m - 1;
            self.succ[d][u] |= after;
        }
        let mut m = after;
        while m != 0 {
            let v = m.trailing_zeros() as usize;
            m &= m - 1;
            self.pred[d][v] |= before;
        }
    }

    fn run(&mut self) -> Result<(), OracleError> {
        self.nodes += 1;
        if self.nodes > self.p.node_budget {
            return Err(OracleError::BudgetExceeded { nodes: self.nodes });
        }
        let mut all_pos = Vec::with_capacity(self.dims);
        let mut objective = 0;
        for d in 0..self.dims {
            let pos = self.positions(d);
            let span = self.span(d, &pos);
            match self.p.capacity[d] {
                Some(cap) if span > cap => return Ok(()),
                Some(_) => {}
                None => {
                    if !self.p.feasibility_only && span >= self.best_span {
                        return Ok(());
                    }
                    objective = span;
                }
            }
            all_pos.push(pos);
        }
        let pair = (0..self.n)
            .flat_map(|i| (i + 1..self.n).map(move |j| (i, j)))
            .find(|&(i, j)| !self.separated(i, j));
        let Some((i, j)) = pair else {
            self.best_span = objective;
            self.best = Some((objective, all_pos));
            if self.p.feasibility_only || objective <= self.p.lower_bound {
                self.done = true;
            }
            return Ok(());
        };
        let twins = self.identical[i] >> j & 1 == 1;
        for d in 0..self.dims {
            if let Some(cap) = self.p.capacity[d] {
                if self.p.extents[i][d] + self.p.extents[j][d] > cap {
                    continue;
                }
            }
            for (a, b) in [(i, j), (j, i)] {
                // Identical items are interchangeable; fix their order on the first axis.
                if twins && d == 0 && a == j {
                    continue;
                }
                let saved = (self.succ[d].clone(), self.pred[d].clone());
                self.relate(d, a, b);
                self.run()?;
                (self.succ[d], self.pred[d]) = saved;
                if self.done {
                    return Ok(());
                }
            }
        }
        Ok(())
    }
}

pub(crate) fn solve(p: &Problem) -> Result<Outcome, OracleError> {
    let n = p.extents.len();
    if n > MAX_ITEMS {
        return Err(OracleError::TooLarge {
            items: n,
            limit: MAX_ITEMS,
        });
    }
    let dims = p.capacity.len();
    let identical = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| j != i && p.extents[i] == p.extents[j])
                .fold(0u64, |m, j| m | 1 << j)
        })
        .collect();
    let mut search = Search {
        p,
        n,
        dims,
        succ: vec![vec![0; n]; dims],
        pred: vec![vec![0; n]; dims],
        identical,
        nodes: 0,
        best_span: p.upper_bound,
        best: None,
        done: false,
    };
    if p.feasibility_only || p.upper_bound > p.lower_bound {
        search.run()?;
    }
    Ok(Outcome {
        best: search.best,
    })
}
