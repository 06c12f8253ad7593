//! Exact bin packing for small instances.

use num_traits::ToPrimitive;

use super::{first_fit_decreasing, solve_fbp, SizeProfile};
use crate::error::{Error, Result};
use crate::rational::{ceil_to_i64, scale_to_integers, Rational};

/// Largest item count accepted by [`exact_bp`].
pub const EXACT_BP_LIMIT: u64 = 20;

/// Optimal number of bins, by branch-and-bound.
///
/// The lower bound is the larger of the rounded-up total size and the
/// rounded-up fractional optimum; First Fit Decreasing supplies the
/// starting upper bound.
pub fn exact_bp(profile: &SizeProfile) -> Result<u64> {
    let n = profile.total_items();
    if n > EXACT_BP_LIMIT {
        return Err(Error::Refused(format!(
            "exact bin packing limited to {EXACT_BP_LIMIT} items, got {n}"
        )));
    }
    if n == 0 {
        return Ok(0);
    }
    let items = profile.items();
    let upper = first_fit_decreasing(&items)?.len();
    let volume = ceil_to_i64(&profile.total_size()) as usize;
    let fractional = solve_fbp(profile)?.objective;
    let lower = volume.max((fractional - 1e-6).ceil().max(0.0) as usize);
    if lower >= upper {
        return Ok(upper as u64);
    }
    let mut with_one = items.clone();
    with_one.push(Rational::from_integer(1.into()));
    let (ints, _) = scale_to_integers(&with_one, 8)
        .ok_or_else(|| Error::Refused("item sizes have no common denominator".into()))?;
    let capacity = *ints.last().unwrap();
    let weights = &ints[..items.len()];

    struct Search<'a> {
        weights: &'a [i128],
        capacity: i128,
        loads: Vec<i128>,
        /// Bin chosen for each item, for symmetry breaking among equal sizes.
        assigned: Vec<usize>,
        best: usize,
        lower: usize,
    }
    impl Search<'_> {
        fn run(&mut self, i: usize) {
            if self.best == self.lower {
                return;
            }
            if i == self.weights.len() {
                self.best = self.best.min(self.loads.len());
                return;
            }
            let w = self.weights[i];
            let first_bin = if i > 0 && self.weights[i - 1] == w {
                self.assigned[i - 1]
            } else {
                0
            };
            let mut tried: Vec<i128> = Vec::new();
            for b in first_bin..self.loads.len() {
                let load = self.loads[b];
                if load + w > self.capacity || tried.contains(&load) {
                    continue;
                }
                tried.push(load);
                self.loads[b] += w;
                self.assigned[i] = b;
                self.run(i + 1);
                self.loads[b] -= w;
            }
            if self.loads.len() + 1 < self.best {
                self.loads.push(w);
                self.assigned[i] = self.loads.len() - 1;
                self.run(i + 1);
                self.loads.pop();
            }
        }
    }
    let mut search = Search {
        weights,
        capacity,
        loads: Vec::new(),
        assigned: vec![0; weights.len()],
        best: upper,
        lower,
    };
    search.run(0);
    Ok(search.best.to_u64().unwrap())
}
