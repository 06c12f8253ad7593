//! One-dimensional bin packing with unit capacity.
//!
//! Next Fit and First Fit Decreasing are the constructive packers; the
//! fractional relaxation over feasible patterns is solved by column
//! generation and yields an ordered dual, which is what the segment
//! certificate turns into a dual feasible step function.

mod aptas;
mod exact;
mod fbp;
mod knapsack;

pub use aptas::{aptas_bp, AptasBins};
pub use exact::{exact_bp, EXACT_BP_LIMIT};
pub use fbp::{max_pattern_value, solve_fbp, FbpSolution};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// A bin is the list of item indices it holds, in insertion order.
pub type Bins = Vec<Vec<usize>>;

fn check_sizes(sizes: &[Rational]) -> Result<()> {
    for s in sizes {
        if *s <= Rational::zero() || *s > Rational::one() {
            return Err(Error::domain("item size", s, "0 < size <= 1"));
        }
    }
    Ok(())
}

/// Distinct sizes in strictly decreasing order with their multiplicities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SizeProfile {
    sizes: Vec<Rational>,
    counts: Vec<u64>,
}

impl SizeProfile {
    pub fn new(mut pairs: Vec<(Rational, u64)>) -> Result<Self> {
        pairs.sort_by(|a, b| b.0.cmp(&a.0));
        let mut sizes: Vec<Rational> = Vec::with_capacity(pairs.len());
        let mut counts: Vec<u64> = Vec::with_capacity(pairs.len());
        for (s, n) in pairs {
            if n == 0 {
                continue;
            }
            check_sizes(std::slice::from_ref(&s))?;
            if sizes.last() == Some(&s) {
                *counts.last_mut().unwrap() += n;
            } else {
                sizes.push(s);
                counts.push(n);
            }
        }
        Ok(Self { sizes, counts })
    }

    pub fn from_sizes(items: &[Rational]) -> Result<Self> {
        Self::new(items.iter().map(|s| (s.clone(), 1)).collect())
    }

    pub fn sizes(&self) -> &[Rational] {
        &self.sizes
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Number of distinct sizes.
    pub fn len(&self) -> usize {
        self.sizes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sizes.is_empty()
    }

    pub fn total_items(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn total_size(&self) -> Rational {
        self.sizes
            .iter()
            .zip(&self.counts)
            .map(|(s, &n)| s * Rational::from_integer(n.into()))
            .sum()
    }

    /// Expands to a list of item sizes in decreasing order.
    pub fn items(&self) -> Vec<Rational> {
        self.sizes
            .iter()
            .zip(&self.counts)
            .flat_map(|(s, &n)| std::iter::repeat(s.clone()).take(n as usize))
            .collect()
    }

    /// Index of a size in the profile.
    pub fn class_of(&self, size: &Rational) -> Option<usize> {
        self.sizes.binary_search_by(|s| size.cmp(s)).ok()
    }
}

/// Item counts per size class of a profile.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Pattern {
    pub counts: Vec<u64>,
}

impl Pattern {
    pub fn is_feasible(&self, sizes: &[Rational]) -> bool {
        let load: Rational = self
            .counts
            .iter()
            .zip(sizes)
            .map(|(&v, s)| s * Rational::from_integer(v.into()))
            .sum();
        load <= Rational::one()
    }
}

/// Dual prices for the fractional bin packing program, aligned with the
/// profile's decreasing sizes.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DualSolution {
    sizes: Vec<Rational>,
    prices: Vec<Rational>,
}

impl DualSolution {
    pub fn new(sizes: Vec<Rational>, prices: Vec<Rational>) -> Self {
        Self { sizes, prices }
    }

    pub fn sizes(&self) -> &[Rational] {
        &self.sizes
    }

    pub fn prices(&self) -> &[Rational] {
        &self.prices
    }

    pub fn is_ordered(&self) -> bool {
        self.prices.windows(2).all(|w| w[0] >= w[1])
    }

    /// `sum_j n_j pi_j`.
    pub fn objective(&self, counts: &[u64]) -> Rational {
        self.prices
            .iter()
            .zip(counts)
            .map(|(p, &n)| p * Rational::from_integer(n.into()))
            .sum()
    }
}

/// Next Fit: keeps one open bin and closes it when the next item does not fit.
pub fn next_fit(sizes: &[Rational]) -> Result<Bins> {
    check_sizes(sizes)?;
    let mut bins: Bins = Vec::new();
    let mut load = Rational::zero();
    for (i, s) in sizes.iter().enumerate() {
        match bins.last_mut() {
            Some(bin) if &load + s <= Rational::one() => {
                bin.push(i);
                load += s;
            }
            _ => {
                bins.push(vec![i]);
                load = s.clone();
            }
        }
    }
    Ok(bins)
}

/// First Fit Decreasing; ties in size keep their original order.
pub fn first_fit_decreasing(sizes: &[Rational]) -> Result<Bins> {
    check_sizes(sizes)?;
    let mut order: Vec<usize> = (0..sizes.len()).collect();
    order.sort_by(|&a, &b| sizes[b].cmp(&sizes[a]).then(a.cmp(&b)));
    let mut bins: Bins = Vec::new();
    let mut loads: Vec<Rational> = Vec::new();
    for i in order {
        let slot = loads
            .iter()
            .position(|load| load + &sizes[i] <= Rational::one());
        match slot {
            Some(b) => {
                bins[b].push(i);
                loads[b] += &sizes[i];
            }
            None => {
                bins.push(vec![i]);
                loads.push(sizes[i].clone());
            }
        }
    }
    Ok(bins)
}

/// Checks that every item appears exactly once and no bin exceeds capacity.
pub fn bins_are_valid(sizes: &[Rational], bins: &Bins) -> bool {
    let mut seen = vec![false; sizes.len()];
    for bin in bins {
        let mut load = Rational::zero();
        for &i in bin {
            if i >= sizes.len() || std::mem::replace(&mut seen[i], true) {
                return false;
            }
            load += &sizes[i];
        }
        if load > Rational::one() {
            return false;
        }
    }
    seen.into_iter().all(|s| s)
}
