//! Unbounded integer knapsack used for pattern pricing.
//!
//! Weights are exact integers (sizes scaled to a common denominator), so
//! feasibility of the returned pattern never depends on rounding. Values are
//! generic: `f64` while pricing, [`Rational`] for the final dual check.

use std::ops::{Add, Div, Mul};

use num_integer::Integer;
use num_traits::Zero;

use crate::rational::Rational;

pub(crate) trait KnapValue:
    Clone + PartialOrd + Zero + Add<Output = Self> + Mul<Output = Self> + Div<Output = Self>
{
    fn from_i128(v: i128) -> Self;
}

impl KnapValue for f64 {
    fn from_i128(v: i128) -> Self {
        v as f64
    }
}

impl KnapValue for Rational {
    fn from_i128(v: i128) -> Self {
        Rational::from_integer(v.into())
    }
}

/// Capacities up to this size are solved by dynamic programming.
const DP_CAPACITY: i128 = 200_000;

/// Maximises `sum v_j x_j` subject to `sum w_j x_j <= capacity`, `x_j >= 0` integer.
///
/// Returns the optimum and the count vector. Items with non-positive value
/// are never used.
pub(crate) fn solve_unbounded<V: KnapValue>(
    weights: &[i128],
    values: &[V],
    capacity: i128,
) -> (V, Vec<u64>) {
    debug_assert_eq!(weights.len(), values.len());
    debug_assert!(weights.iter().all(|&w| w > 0));
    let useful: Vec<usize> = (0..weights.len())
        .filter(|&j| values[j] > V::zero() && weights[j] <= capacity)
        .collect();
    let mut counts = vec![0u64; weights.len()];
    if useful.is_empty() || capacity <= 0 {
        return (V::zero(), counts);
    }
    let g = useful.iter().fold(0i128, |g, &j| g.gcd(&weights[j]));
    let w: Vec<i128> = useful.iter().map(|&j| weights[j] / g).collect();
    let v: Vec<V> = useful.iter().map(|&j| values[j].clone()).collect();
    let cap = capacity / g;
    let (best, local) = if cap <= DP_CAPACITY {
        dynamic_program(&w, &v, cap as usize)
    } else {
        branch_and_bound(&w, &v, cap)
    };
    for (k, &j) in useful.iter().enumerate() {
        counts[j] = local[k];
    }
    (best, counts)
}

fn dynamic_program<V: KnapValue>(w: &[i128], v: &[V], cap: usize) -> (V, Vec<u64>) {
    let mut best: Vec<V> = vec![V::zero(); cap + 1];
    // choice[c] = item added last at capacity c, or usize::MAX for "carry c-1"
    let mut choice = vec![usize::MAX; cap + 1];
    for c in 1..=cap {
        best[c] = best[c - 1].clone();
        for (j, (&wj, vj)) in w.iter().zip(v).enumerate() {
            let wj = wj as usize;
            if wj <= c {
                let cand = best[c - wj].clone() + vj.clone();
                if cand > best[c] {
                    best[c] = cand;
                    choice[c] = j;
                }
            }
        }
    }
    let mut counts = vec![0u64; w.len()];
    let mut c = cap;
    while c > 0 {
        match choice[c] {
            usize::MAX => c -= 1,
            j => {
                counts[j] += 1;
                c -= w[j] as usize;
            }
        }
    }
    (best[cap].clone(), counts)
}

fn branch_and_bound<V: KnapValue>(w: &[i128], v: &[V], cap: i128) -> (V, Vec<u64>) {
    let mut order: Vec<usize> = (0..w.len()).collect();
    let density = |j: usize| v[j].clone() / V::from_i128(w[j]);
    order.sort_by(|&a, &b| {
        density(b)
            .partial_cmp(&density(a))
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    struct Search<'a, V> {
        w: &'a [i128],
        v: &'a [V],
        order: &'a [usize],
        best: V,
        best_counts: Vec<u64>,
        counts: Vec<u64>,
    }
    impl<V: KnapValue> Search<'_, V> {
        fn run(&mut self, depth: usize, room: i128, value: V) {
            if value > self.best {
                self.best = value.clone();
                self.best_counts = self.counts.clone();
            }
            if depth == self.order.len() {
                return;
            }
            let j = self.order[depth];
            // LP bound: fill the remaining room with the densest remaining item.
            let bound = value.clone()
                + V::from_i128(room) * self.v[j].clone() / V::from_i128(self.w[j]);
            if bound <= self.best {
                return;
            }
            let max_count = room / self.w[j];
            for count in (0..=max_count).rev() {
                self.counts[j] = count as u64;
                let gained = V::from_i128(count) * self.v[j].clone();
                self.run(depth + 1, room - count * self.w[j], value.clone() + gained);
            }
            self.counts[j] = 0;
        }
    }
    let mut search = Search {
        w,
        v,
        order: &order,
        best: V::zero(),
        best_counts: vec![0; w.len()],
        counts: vec![0; w.len()],
    };
    search.run(0, cap, V::zero());
    (search.best, search.best_counts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn brute(weights: &[i128], values: &[f64], cap: i128) -> f64 {
        fn rec(j: usize, room: i128, w: &[i128], v: &[f64]) -> f64 {
            if j == w.len() {
                return 0.0;
            }
            let mut best = 0.0f64;
            let mut k = 0;
            while k * w[j] <= room {
                best = best.max(k as f64 * v[j] + rec(j + 1, room - k * w[j], w, v));
                k += 1;
            }
            best
        }
        rec(0, cap, weights, values)
    }

    #[test]
    fn dp_and_bnb_agree_with_brute_force() {
        let cases: &[(&[i128], &[f64], i128)] = &[
            (&[6, 4], &[0.5, 0.5], 10),
            (&[3, 5, 7], &[0.2, 0.45, 0.6], 17),
            (&[51], &[1.0], 100),
            (&[25, 40, 33], &[0.25, 0.45, 0.3], 100),
        ];
        for &(w, v, cap) in cases {
            let expect = brute(w, v, cap);
            let (dp, counts) = solve_unbounded(w, v, cap);
            assert!((dp - expect).abs() < 1e-12);
            let used: i128 = counts.iter().zip(w).map(|(&c, &wj)| c as i128 * wj).sum();
            assert!(used <= cap);
            let (bb, counts) = branch_and_bound(w, v, cap);
            assert!((bb - expect).abs() < 1e-12);
            let used: i128 = counts.iter().zip(w).map(|(&c, &wj)| c as i128 * wj).sum();
            assert!(used <= cap);
        }
    }

    #[test]
    fn rational_values() {
        let (best, counts) =
            solve_unbounded(&[6, 4], &[rat(1, 2), rat(1, 3)], 10);
        assert_eq!(best, rat(5, 6));
        assert_eq!(counts, vec![1, 1]);
    }

    #[test]
    fn nothing_useful() {
        let (best, counts) = solve_unbounded(&[11], &[1.0], 10);
        assert_eq!(best, 0.0);
        assert_eq!(counts, vec![0]);
    }
}
