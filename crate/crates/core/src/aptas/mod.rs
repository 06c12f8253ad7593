//! Approximation scheme for boxes with square bases.
//!
//! Pipeline: split the boxes around a light band of base sides
//! ([`select_gap`]), pack the large ones through rounding and a configuration
//! LP ([`pack_large`]), pour the small ones into the free space of that
//! packing with [`mnfdh_pack`], and put medium plus leftover small boxes on
//! top with the same layered packer.

mod gap;
mod mnfdh;
mod residual;
mod restricted;

pub use gap::{select_gap, GapSplit};
pub use mnfdh::{mnfdh_pack, MnfdhResult, Region};
pub use residual::band_regions;
pub use restricted::{
    enumerate_patterns, lin_value, sandwich, solve_restricted, stack_group_round, Band, Column,
    PatternLimits, PatternSet, RestrictedInstance, RestrictedPacking, Sandwich,
};

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{total_volume, validate_packing, Box3, Instance, Packing, Placement};
use crate::rational::{rat, serde_rational, to_f64, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AptasConfig {
    #[serde(with = "serde_rational")]
    pub epsilon: Rational,
    /// Number of groups; `None` uses `ceil(1 / (eps delta^2))`.
    pub k_override: Option<u64>,
    pub limits: PatternLimits,
}

impl Default for AptasConfig {
    fn default() -> Self {
        Self {
            epsilon: rat(1, 12),
            k_override: None,
            limits: PatternLimits::default(),
        }
    }
}

impl AptasConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epsilon <= Rational::zero() || self.epsilon > rat(1, 12) {
            return Err(Error::domain("epsilon", &self.epsilon, "0 < epsilon <= 1/12"));
        }
        if self.k_override == Some(0) {
            return Err(Error::domain("K", 0, "K >= 1"));
        }
        Ok(())
    }
}

/// `ceil(1 / (eps delta^2))`, saturated to `i64::MAX`.
pub fn group_count(eps: &Rational, delta: &Rational) -> u64 {
    let k = (eps * delta * delta).recip().ceil().to_integer();
    u64::try_from(k).map_or(i64::MAX as u64, |k| k.min(i64::MAX as u64))
}

#[derive(Debug, Clone)]
pub struct LargePacking {
    pub restricted: RestrictedInstance,
    pub patterns: PatternSet,
    pub packing: RestrictedPacking,
    pub k: u64,
}

/// Rounds, solves and realises the large boxes with `K` groups.
pub fn pack_large(large: &[Box3], k: u64, limits: &PatternLimits) -> Result<LargePacking> {
    let restricted = stack_group_round(large, k)?;
    let patterns = enumerate_patterns(&restricted.sizes, limits)?;
    let packing = solve_restricted(&restricted, &patterns)?;
    Ok(LargePacking {
        restricted,
        patterns,
        packing,
        k,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    /// Some small boxes did not fit in the free space among the large ones.
    Case1,
    /// All small boxes went into that free space.
    Case2,
}

#[derive(Debug, Clone, Serialize)]
pub struct SquareReport {
    pub branch: Branch,
    #[serde(rename = "K")]
    pub k: u64,
    #[serde(with = "serde_rational")]
    pub delta: Rational,
    #[serde(rename = "i")]
    pub gap_index: u32,
    #[serde(with = "serde_rational")]
    pub epsilon: Rational,
    #[serde(with = "serde_rational")]
    pub height: Rational,
    #[serde(with = "serde_rational")]
    pub lb_volume: Rational,
    /// `max(volume, tallest box)`.
    #[serde(with = "serde_rational")]
    pub lower_bound: Rational,
    pub large: usize,
    pub medium: usize,
    pub small: usize,
    /// Small boxes left after the free space was used.
    pub small_leftover: usize,
    pub thresholds: usize,
    pub patterns: usize,
    pub pattern_refusals: usize,
    pub lin: f64,
    pub support: usize,
    #[serde(with = "serde_rational")]
    pub large_height: Rational,
    #[serde(with = "serde_rational")]
    pub spill_height: Rational,
    pub residual_regions: usize,
    /// Leading term of the branch bound: `Vol/(1-6 eps)` in case 1,
    /// `(1+eps) * lower_bound` in case 2.
    pub main_term: f64,
    /// `height - main_term`, measured.
    pub additive: f64,
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct AptasRun {
    pub packing: Packing,
    pub report: SquareReport,
}

fn max_side(boxes: &[Box3]) -> Option<Rational> {
    boxes.iter().map(|b| b.length.clone()).max()
}

/// The full pipeline for a square-base instance.
pub fn run_square_aptas(instance: &Instance, config: &AptasConfig) -> Result<AptasRun> {
    config.validate()?;
    let eps = &config.epsilon;
    let split = select_gap(instance, eps)?;
    let k = config
        .k_override
        .unwrap_or_else(|| group_count(eps, &split.delta))
        .min(i64::MAX as u64);
    let large = pack_large(&split.large, k, &config.limits)?;
    let mut placements: Vec<Placement> = large.packing.placements.clone();

    let mut remaining: Vec<Box3> = split.small.clone();
    let mut regions_used = 0usize;
    for band in &large.packing.bands {
        for region in band_regions(band) {
            let Some(delta) = max_side(&remaining) else { break };
            if region.length < delta || region.width < delta {
                continue;
            }
            let r = mnfdh_pack(&remaining, &region, &delta)?;
            if !r.placements.is_empty() {
                regions_used += 1;
            }
            placements.extend(r.placements);
            remaining.retain(|b| r.leftovers.contains(&b.id));
        }
    }
    let small_leftover = remaining.len();
    let mut top: Vec<Box3> = split.medium.clone();
    top.extend(remaining);
    if let Some(delta) = max_side(&top) {
        let region = Region {
            origin: [Rational::zero(), Rational::zero(), large.packing.height.clone()],
            length: Rational::one(),
            width: Rational::one(),
            height: None,
        };
        let r = mnfdh_pack(&top, &region, &delta)?;
        if !r.leftovers.is_empty() {
            return Err(Error::Invariant("unbounded layer packing left boxes out".into()));
        }
        placements.extend(r.placements);
    }

    let packing = Packing::from_placements(instance, placements)?;
    let report = validate_packing(instance, &packing)?;
    if !report.is_ok() {
        return Err(Error::Invariant(format!("square packing is invalid: {report:?}")));
    }
    let height = packing.height().clone();
    let lb_volume = total_volume(instance);
    let tallest = instance.boxes().iter().map(|b| b.height.clone()).max().unwrap_or_default();
    let lower_bound = lb_volume.clone().max(tallest);
    let branch = if small_leftover > 0 { Branch::Case1 } else { Branch::Case2 };
    let main_term = match branch {
        Branch::Case1 => to_f64(&lb_volume) / (1.0 - 6.0 * to_f64(eps)),
        Branch::Case2 => (1.0 + to_f64(eps)) * to_f64(&lower_bound),
    };
    let report = SquareReport {
        branch,
        k,
        delta: split.delta.clone(),
        gap_index: split.index,
        epsilon: eps.clone(),
        additive: to_f64(&height) - main_term,
        ratio: (lower_bound > Rational::zero()).then(|| to_f64(&(&height / &lower_bound))),
        height,
        lb_volume,
        lower_bound,
        large: split.large.len(),
        medium: split.medium.len(),
        small: split.small.len(),
        small_leftover,
        thresholds: large.restricted.thresholds.len(),
        patterns: large.patterns.len(),
        pattern_refusals: large.patterns.refused,
        lin: large.packing.lin,
        support: large.packing.support,
        large_height: large.packing.height.clone(),
        spill_height: large.packing.spill_height.clone(),
        residual_regions: regions_used,
        main_term,
    };
    Ok(AptasRun { packing, report })
}
