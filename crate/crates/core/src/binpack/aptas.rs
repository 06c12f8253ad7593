//! Asymptotic approximation scheme for 1D bin packing.
//!
//! Linear grouping of the large items, the pattern program on the rounded
//! profile, round-up of the fractional pattern usage, and First Fit for the
//! small items.

use num_traits::{One, ToPrimitive, Zero};

use super::{check_sizes, solve_fbp, Bins, SizeProfile};
use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Debug, Clone)]
pub struct AptasBins {
    pub bins: Bins,
    /// Number of size classes after linear grouping.
    pub classes: usize,
    /// Fractional optimum of the rounded large-item profile.
    pub rounded_fbp: f64,
}

/// Packs `sizes` into unit bins with at most `(1+eps) OPT_FBP + O(eps^-2)` bins.
pub fn aptas_bp(sizes: &[Rational], eps: &Rational) -> Result<AptasBins> {
    check_sizes(sizes)?;
    if *eps <= Rational::zero() || *eps > Rational::new(1.into(), 2.into()) {
        return Err(Error::domain("epsilon", eps, "0 < epsilon <= 1/2"));
    }
    let mut large: Vec<usize> = (0..sizes.len()).filter(|&i| sizes[i] > *eps).collect();
    let small: Vec<usize> = (0..sizes.len()).filter(|&i| sizes[i] <= *eps).collect();
    large.sort_by(|&a, &b| sizes[b].cmp(&sizes[a]).then(a.cmp(&b)));

    // Linear grouping: consecutive groups of `group` items, each rounded up to
    // its first (largest) member.
    let max_classes = (eps * eps).recip().ceil().to_integer().to_usize().unwrap();
    let group = large.len().div_ceil(max_classes).max(1);
    let rounded: Vec<Rational> = large
        .iter()
        .enumerate()
        .map(|(pos, _)| sizes[large[pos - pos % group]].clone())
        .collect();
    let profile = SizeProfile::from_sizes(&rounded)?;

    let mut bins: Bins = Vec::new();
    let mut loads: Vec<Rational> = Vec::new();
    let mut rounded_fbp = 0.0;
    if !profile.is_empty() {
        let fbp = solve_fbp(&profile)?;
        rounded_fbp = fbp.objective;
        // Free slots per bin, by class index.
        let mut slots: Vec<Vec<u64>> = Vec::new();
        for (pattern, &x) in fbp.patterns.iter().zip(&fbp.usage) {
            let copies = (x - 1e-9).ceil().max(0.0) as usize;
            for _ in 0..copies {
                slots.push(pattern.counts.clone());
                bins.push(Vec::new());
                loads.push(Rational::zero());
            }
        }
        for (pos, &item) in large.iter().enumerate() {
            let class = profile.class_of(&rounded[pos]).unwrap();
            // Own class first, then the smallest larger slot.
            let found = (0..slots.len())
                .find(|&b| slots[b][class] > 0)
                .map(|b| (b, class))
                .or_else(|| {
                    (0..class).rev().find_map(|c| {
                        (0..slots.len()).find(|&b| slots[b][c] > 0).map(|b| (b, c))
                    })
                });
            match found {
                Some((b, c)) => {
                    slots[b][c] -= 1;
                    bins[b].push(item);
                    loads[b] += &sizes[item];
                }
                None => {
                    slots.push(vec![0; profile.len()]);
                    bins.push(vec![item]);
                    loads.push(sizes[item].clone());
                }
            }
        }
        let mut keep = bins.iter().map(|b| !b.is_empty());
        loads.retain(|_| keep.next().unwrap());
        bins.retain(|b| !b.is_empty());
    }

    for item in small {
        let slot = loads
            .iter()
            .position(|load| load + &sizes[item] <= Rational::one());
        match slot {
            Some(b) => {
                bins[b].push(item);
                loads[b] += &sizes[item];
            }
            None => {
                bins.push(vec![item]);
                loads.push(sizes[item].clone());
            }
        }
    }
    debug_assert!(loads.iter().all(|l| *l <= Rational::one()));
    Ok(AptasBins {
        bins,
        classes: profile.len(),
        rounded_fbp,
    })
}
