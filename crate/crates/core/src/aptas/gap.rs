//! Split of a square-base instance into large, medium and small boxes around
//! a band of base sides with little volume.

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Box3, Instance};
use crate::rational::{pow, serde_rational, Rational};

#[derive(Debug, Clone, Serialize)]
pub struct GapSplit {
    /// Chosen band index, from 1.
    pub index: u32,
    /// Lower edge of the large range: sides `>= delta` are large.
    #[serde(with = "serde_rational")]
    pub delta: Rational,
    /// Sides below this are small.
    #[serde(with = "serde_rational")]
    pub small_below: Rational,
    #[serde(skip)]
    pub large: Vec<Box3>,
    #[serde(skip)]
    pub medium: Vec<Box3>,
    #[serde(skip)]
    pub small: Vec<Box3>,
}

/// `eps^(2^i - 1)`.
fn band_edge(eps: &Rational, i: u32) -> Rational {
    pow(eps, (1u32 << i) - 1)
}

/// Picks the smallest `i` in `1..=ceil(1/eps)` whose band
/// `[eps^(2^(i+1)-1), eps^(2^i-1))` holds at most `eps` of the volume.
///
/// The bands are disjoint, so such an `i` always exists.
pub fn select_gap(instance: &Instance, eps: &Rational) -> Result<GapSplit> {
    if !instance.is_empty() && !instance.is_square_base() {
        return Err(Error::Contract("instance has a non-square base".into()));
    }
    if *eps <= Rational::zero() || *eps >= Rational::one() {
        return Err(Error::domain("epsilon", eps, "0 < epsilon < 1"));
    }
    let r = eps.recip().ceil().to_integer();
    let total: Rational = instance.boxes().iter().map(Box3::volume).sum();
    let allowance = eps * &total;
    let min_side = instance.boxes().iter().map(|b| &b.length).min().cloned();
    let mut i = 1u32;
    loop {
        let hi = band_edge(eps, i);
        let lo = band_edge(eps, i + 1);
        let in_band: Rational = instance
            .boxes()
            .iter()
            .filter(|b| b.length >= lo && b.length < hi)
            .map(Box3::volume)
            .sum();
        let below_all = min_side.as_ref().is_none_or(|m| *m >= hi);
        if in_band <= allowance || below_all {
            let mut split = GapSplit {
                index: i,
                delta: hi.clone(),
                small_below: lo.clone(),
                large: Vec::new(),
                medium: Vec::new(),
                small: Vec::new(),
            };
            for b in instance.boxes() {
                if b.length >= hi {
                    split.large.push(b.clone());
                } else if b.length >= lo {
                    split.medium.push(b.clone());
                } else {
                    split.small.push(b.clone());
                }
            }
            return Ok(split);
        }
        if num_bigint::BigInt::from(i) >= r {
            return Err(Error::Invariant(format!(
                "no band among the first {r} holds at most epsilon of the volume"
            )));
        }
        i += 1;
    }
}
