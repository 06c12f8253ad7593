//! Large boxes: rounding to few base sizes, configuration LP, and bands.
//!
//! The large boxes are stacked by nonincreasing base side and the stack is cut
//! by `K - 1` horizontal planes. Boxes met by a plane (thresholds) are set
//! aside; every other box takes the base side of the threshold just below its
//! group, or 1 in the lowest group. The rounded instance has at most `K`
//! distinct sides and is solved through an LP over maximal square patterns.

use std::collections::HashMap;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, OracleError, Result};
use crate::lp::{basic_support, solve_lp, LinearProgram};
use crate::model::{Box3, Placement};
use crate::oracle::{square_fit, SearchBudget};
use crate::rational::{from_f64_exact, serde_rational, to_f64, Rational};

/// Boxes of few distinct square base sizes, plus boxes set aside.
#[derive(Debug, Clone, Default)]
pub struct RestrictedInstance {
    /// Distinct rounded sides, decreasing.
    pub sizes: Vec<Rational>,
    /// Boxes per size; each fits under its rounded side.
    pub members: Vec<Vec<Box3>>,
    /// Total height per size.
    pub beta: Vec<Rational>,
    /// Boxes met by a cutting plane, packed on their own.
    pub thresholds: Vec<Box3>,
    /// Height of the stack.
    pub stack_height: Rational,
}

impl RestrictedInstance {
    /// Every distinct side becomes its own size; nothing is set aside.
    pub fn from_boxes(boxes: &[Box3]) -> Result<Self> {
        check_square(boxes)?;
        let mut by_side: Vec<(Rational, Vec<Box3>)> = Vec::new();
        let mut sorted: Vec<&Box3> = boxes.iter().collect();
        sorted.sort_by(|p, q| q.length.cmp(&p.length).then(p.id.cmp(&q.id)));
        for b in sorted {
            match by_side.last_mut() {
                Some((s, v)) if *s == b.length => v.push(b.clone()),
                _ => by_side.push((b.length.clone(), vec![b.clone()])),
            }
        }
        let mut ri = Self {
            stack_height: boxes.iter().map(|b| &b.height).sum(),
            ..Self::default()
        };
        for (s, v) in by_side {
            ri.beta.push(v.iter().map(|b| &b.height).sum());
            ri.sizes.push(s);
            ri.members.push(v);
        }
        Ok(ri)
    }

    pub fn num_boxes(&self) -> usize {
        self.members.iter().map(Vec::len).sum::<usize>() + self.thresholds.len()
    }
}

fn check_square(boxes: &[Box3]) -> Result<()> {
    match boxes.iter().find(|b| b.length != b.width) {
        Some(b) => Err(Error::Contract(format!("box {} has a non-square base", b.id))),
        None => Ok(()),
    }
}

/// Boxes sorted by nonincreasing side, ties by id, with their `[z0, z1)` in the stack.
fn stack(boxes: &[Box3]) -> (Vec<(Box3, Rational, Rational)>, Rational) {
    let mut sorted: Vec<&Box3> = boxes.iter().collect();
    sorted.sort_by(|p, q| q.length.cmp(&p.length).then(p.id.cmp(&q.id)));
    let mut z = Rational::zero();
    let mut out = Vec::with_capacity(sorted.len());
    for b in sorted {
        let top = &z + &b.height;
        out.push((b.clone(), z.clone(), top.clone()));
        z = top;
    }
    (out, z)
}

/// Planes `i H / K` with `i` in `1..K` that lie in `[z0, z1)`, as an index range.
fn planes_within(z0: &Rational, z1: &Rational, h: &Rational, k: u64) -> (i64, i64) {
    let kk = Rational::from_integer((k as i64).into());
    let lo = (z0 * &kk / h).ceil().to_integer().try_into().unwrap_or(i64::MAX).max(1);
    let hi: i64 = (z1 * &kk / h).ceil().to_integer().try_into().unwrap_or(i64::MAX);
    (lo, (hi - 1).min(k as i64 - 1))
}

/// Stacks, cuts and rounds the large boxes.
pub fn stack_group_round(boxes: &[Box3], k: u64) -> Result<RestrictedInstance> {
    check_square(boxes)?;
    if k == 0 {
        return Err(Error::domain("K", k, "K >= 1"));
    }
    let (stacked, h) = stack(boxes);
    let mut ri = RestrictedInstance {
        stack_height: h.clone(),
        ..RestrictedInstance::default()
    };
    if stacked.is_empty() {
        return Ok(ri);
    }
    // Plane index ranges of the threshold boxes, increasing, with their sides.
    let mut ranges: Vec<(i64, i64, Rational)> = Vec::new();
    let mut rounded: Vec<(Rational, Box3)> = Vec::new();
    for (b, z0, z1) in &stacked {
        let (lo, hi) = planes_within(z0, z1, &h, k);
        if lo <= hi {
            ranges.push((lo, hi, b.length.clone()));
            ri.thresholds.push(b.clone());
        }
    }
    for (b, z0, z1) in &stacked {
        let (lo, hi) = planes_within(z0, z1, &h, k);
        if lo <= hi {
            continue;
        }
        // Planes strictly below z0: those in [1, lo - 1].
        let below = (lo - 1).min(k as i64 - 1);
        let side = if below == 0 {
            Rational::one()
        } else {
            let at = ranges.partition_point(|r| r.1 < below);
            match ranges.get(at) {
                Some((lo, _, side)) if *lo <= below => side.clone(),
                _ => return Err(Error::Invariant(format!("plane {below} has no threshold box"))),
            }
        };
        rounded.push((side, b.clone()));
    }
    rounded.sort_by(|p, q| q.0.cmp(&p.0).then(p.1.id.cmp(&q.1.id)));
    for (side, b) in rounded {
        if ri.sizes.last() != Some(&side) {
            ri.sizes.push(side);
            ri.members.push(Vec::new());
            ri.beta.push(Rational::zero());
        }
        *ri.beta.last_mut().unwrap() += &b.height;
        ri.members.last_mut().unwrap().push(b);
    }
    Ok(ri)
}

/// Limits on pattern enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PatternLimits {
    /// Refuse when `floor(1/s_min)^2` exceeds this.
    pub max_items: u64,
    /// Refuse after visiting this many feasible count vectors.
    pub max_patterns: usize,
    #[serde(skip)]
    pub budget: SearchBudget,
}

impl Default for PatternLimits {
    fn default() -> Self {
        Self {
            max_items: 36,
            max_patterns: 1_000_000,
            budget: SearchBudget::squares().with_nodes(20_000),
        }
    }
}

/// Maximal square patterns with a placement for each.
#[derive(Debug, Clone, Default)]
pub struct PatternSet {
    /// Count per size.
    pub counts: Vec<Vec<u64>>,
    /// Per pattern: `(size index, x, y)` of each square.
    pub slots: Vec<Vec<(usize, Rational, Rational)>>,
    /// Feasible count vectors visited.
    pub visited: usize,
    /// Vectors the square search gave up on; treated as infeasible.
    pub refused: usize,
}

impl PatternSet {
    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }
}

type Witness = Vec<(usize, Rational, Rational)>;

fn fits(
    sizes: &[Rational],
    v: &[u64],
    limits: &PatternLimits,
    refused: &mut usize,
) -> Result<Option<Witness>> {
    let mut sides = Vec::new();
    let mut owner = Vec::new();
    for (j, &c) in v.iter().enumerate() {
        for _ in 0..c {
            sides.push(sizes[j].clone());
            owner.push(j);
        }
    }
    match square_fit(&sides, &limits.budget) {
        Ok(Some(pos)) => Ok(Some(owner.into_iter().zip(pos).map(|(j, (x, y))| (j, x, y)).collect())),
        Ok(None) => Ok(None),
        Err(Error::Oracle(OracleError::TooLarge { .. } | OracleError::BudgetExceeded { .. })) => {
            *refused += 1;
            Ok(None)
        }
        Err(e) => Err(e),
    }
}

/// Enumerates maximal count vectors of squares of the given sides that fit in
/// the unit square.
pub fn enumerate_patterns(sizes: &[Rational], limits: &PatternLimits) -> Result<PatternSet> {
    let mut set = PatternSet::default();
    let Some(s_min) = sizes.iter().min() else {
        return Ok(set);
    };
    if *s_min <= Rational::zero() || sizes.iter().any(|s| *s > Rational::one()) {
        return Err(Error::domain("pattern size", s_min, "0 < size <= 1"));
    }
    let per_side: u64 = s_min.recip().floor().to_integer().try_into().unwrap_or(u64::MAX);
    if per_side.saturating_mul(per_side) > limits.max_items {
        return Err(Error::Refused(format!(
            "up to {} squares per pattern exceeds the limit of {}",
            per_side.saturating_mul(per_side),
            limits.max_items
        )));
    }
    let p = sizes.len();
    let mut feasible: HashMap<Vec<u64>, Witness> = HashMap::new();
    let mut v = vec![0u64; p];
    let mut refused = 0usize;
    // Depth-first over sizes; feasibility is closed under removal.
    fn rec(
        j: usize,
        v: &mut Vec<u64>,
        sizes: &[Rational],
        limits: &PatternLimits,
        feasible: &mut HashMap<Vec<u64>, Witness>,
        refused: &mut usize,
    ) -> Result<()> {
        if j == sizes.len() {
            return Ok(());
        }
        rec(j + 1, v, sizes, limits, feasible, refused)?;
        loop {
            v[j] += 1;
            match fits(sizes, v, limits, refused)? {
                Some(w) => {
                    feasible.insert(v.clone(), w);
                    if feasible.len() > limits.max_patterns {
                        return Err(Error::Refused(format!(
                            "more than {} feasible patterns",
                            limits.max_patterns
                        )));
                    }
                    rec(j + 1, v, sizes, limits, feasible, refused)?;
                }
                None => break,
            }
        }
        v[j] = 0;
        Ok(())
    }
    rec(0, &mut v, sizes, limits, &mut feasible, &mut refused)?;
    set.visited = feasible.len();
    set.refused = refused;

    let mut maximal: Vec<Vec<u64>> = feasible
        .keys()
        .filter(|v| {
            (0..p).all(|j| {
                let mut w = (*v).clone();
                w[j] += 1;
                !feasible.contains_key(&w)
            })
        })
        .cloned()
        .collect();
    maximal.sort_unstable_by(|a, b| b.cmp(a));
    let undominated: Vec<Vec<u64>> = maximal
        .iter()
        .filter(|v| !maximal.iter().any(|w| w != *v && w.iter().zip(v.iter()).all(|(a, b)| a >= b)))
        .cloned()
        .collect();
    for v in undominated {
        set.slots.push(feasible[&v].clone());
        set.counts.push(v);
    }
    Ok(set)
}

/// A column of stacked boxes inside a band.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Column {
    pub x: Rational,
    pub y: Rational,
    pub side: Rational,
    /// Height used inside the band.
    pub filled: Rational,
}

/// Horizontal slab `[z, z + height)` of the large-box packing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Band {
    pub z: Rational,
    pub height: Rational,
    pub columns: Vec<Column>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RestrictedPacking {
    #[serde(skip)]
    pub placements: Vec<Placement>,
    #[serde(skip)]
    pub bands: Vec<Band>,
    /// LP optimum over the rounded sizes.
    pub lin: f64,
    /// Patterns used with positive multiplicity.
    pub support: usize,
    pub patterns: usize,
    #[serde(with = "serde_rational")]
    pub height: Rational,
    /// Height of bands added for boxes the LP bands missed by rounding.
    #[serde(with = "serde_rational")]
    pub spill_height: Rational,
    #[serde(with = "serde_rational")]
    pub threshold_height: Rational,
}

/// Fills the columns of `band` with boxes of each size, in order.
fn fill_band(
    band: &mut Band,
    owners: &[usize],
    queues: &mut [std::collections::VecDeque<Box3>],
    placements: &mut Vec<Placement>,
) {
    for (col, &j) in band.columns.iter_mut().zip(owners) {
        while let Some(b) = queues[j].front() {
            if &col.filled + &b.height > band.height {
                break;
            }
            let b = queues[j].pop_front().unwrap();
            placements.push(Placement::new(b.id, col.x.clone(), col.y.clone(), &band.z + &col.filled));
            col.filled += &b.height;
        }
    }
}

/// Solves the configuration LP and realises it: one band of height `x_i + 1`
/// per pattern in the support, each square of the pattern becoming a column
/// filled greedily, then one band per threshold box.
pub fn solve_restricted(ri: &RestrictedInstance, patterns: &PatternSet) -> Result<RestrictedPacking> {
    let p = ri.sizes.len();
    let mut out = RestrictedPacking {
        placements: Vec::new(),
        bands: Vec::new(),
        lin: 0.0,
        support: 0,
        patterns: patterns.len(),
        height: Rational::zero(),
        spill_height: Rational::zero(),
        threshold_height: Rational::zero(),
    };
    let mut queues: Vec<std::collections::VecDeque<Box3>> =
        ri.members.iter().map(|m| m.iter().cloned().collect()).collect();
    let mut z = Rational::zero();

    if p > 0 {
        if patterns.is_empty() {
            return Err(Error::Contract("no patterns for a nonempty restricted instance".into()));
        }
        let rows: Vec<Vec<f64>> = (0..p)
            .map(|j| patterns.counts.iter().map(|c| c[j] as f64).collect())
            .collect();
        let rhs: Vec<f64> = ri.beta.iter().map(to_f64).collect();
        let lp = LinearProgram::new(vec![1.0; patterns.len()], rows, rhs)?;
        let sol = solve_lp(&lp);
        if !sol.is_optimal() {
            return Err(Error::Invariant(format!("configuration LP ended {:?}", sol.status)));
        }
        let support = basic_support(&sol)?;
        out.lin = sol.objective;
        out.support = support.len();
        for i in support {
            let height = from_f64_exact(sol.primal[i]) + Rational::one();
            let slots = &patterns.slots[i];
            let mut band = Band {
                z: z.clone(),
                height: height.clone(),
                columns: slots
                    .iter()
                    .map(|(j, x, y)| Column {
                        x: x.clone(),
                        y: y.clone(),
                        side: ri.sizes[*j].clone(),
                        filled: Rational::zero(),
                    })
                    .collect(),
            };
            let owners: Vec<usize> = slots.iter().map(|s| s.0).collect();
            fill_band(&mut band, &owners, &mut queues, &mut out.placements);
            z += height;
            out.bands.push(band);
        }
        // Floating-point shortfall: unit-height grid bands of one size.
        for j in 0..p {
            while !queues[j].is_empty() {
                let side = &ri.sizes[j];
                let per: i64 = side.recip().floor().to_integer().try_into().unwrap_or(1);
                let mut band = Band {
                    z: z.clone(),
                    height: Rational::one(),
                    columns: Vec::new(),
                };
                for a in 0..per {
                    for b in 0..per {
                        band.columns.push(Column {
                            x: side * Rational::from_integer(a.into()),
                            y: side * Rational::from_integer(b.into()),
                            side: side.clone(),
                            filled: Rational::zero(),
                        });
                    }
                }
                let owners = vec![j; band.columns.len()];
                fill_band(&mut band, &owners, &mut queues, &mut out.placements);
                z += Rational::one();
                out.spill_height += Rational::one();
                out.bands.push(band);
            }
        }
    }
    for b in &ri.thresholds {
        out.placements
            .push(Placement::new(b.id, Rational::zero(), Rational::zero(), z.clone()));
        out.bands.push(Band {
            z: z.clone(),
            height: b.height.clone(),
            columns: vec![Column {
                x: Rational::zero(),
                y: Rational::zero(),
                side: b.length.clone(),
                filled: b.height.clone(),
            }],
        });
        z += &b.height;
        out.threshold_height += &b.height;
    }
    out.height = z;
    Ok(out)
}

/// LP optimum for sizes with required heights.
pub fn lin_value(sizes: &[Rational], beta: &[Rational], limits: &PatternLimits) -> Result<f64> {
    if sizes.is_empty() {
        return Ok(0.0);
    }
    let patterns = enumerate_patterns(sizes, limits)?;
    let rows: Vec<Vec<f64>> = (0..sizes.len())
        .map(|j| patterns.counts.iter().map(|c| c[j] as f64).collect())
        .collect();
    let lp = LinearProgram::new(vec![1.0; patterns.len()], rows, beta.iter().map(to_f64).collect())?;
    let sol = solve_lp(&lp);
    if !sol.is_optimal() {
        return Err(Error::Invariant(format!("configuration LP ended {:?}", sol.status)));
    }
    Ok(sol.objective)
}

/// LP values of the instances obtained by cutting the stack into `K` slices
/// of equal height and rounding each slice's sides up to its largest side
/// (`sup`, lowest slice to 1) or down to the next slice's largest side (`inf`).
#[derive(Debug, Clone, Serialize)]
pub struct Sandwich {
    pub slice_height: f64,
    pub inf_prime: f64,
    pub sup_prime: f64,
    /// LP value of the rounded instance actually solved, thresholds excluded.
    pub sup: f64,
    /// LP value over the original sides; `None` when enumeration refuses.
    pub original: Option<f64>,
}

fn merged(sizes: Vec<Rational>, slice: &Rational) -> (Vec<Rational>, Vec<Rational>) {
    let mut s: Vec<Rational> = Vec::new();
    let mut b: Vec<Rational> = Vec::new();
    let mut sorted = sizes;
    sorted.sort_by(|p, q| q.cmp(p));
    for x in sorted {
        if s.last() == Some(&x) {
            *b.last_mut().unwrap() += slice;
        } else {
            s.push(x);
            b.push(slice.clone());
        }
    }
    (s, b)
}

pub fn sandwich(boxes: &[Box3], k: u64, limits: &PatternLimits) -> Result<Sandwich> {
    check_square(boxes)?;
    let (stacked, h) = stack(boxes);
    let kk = Rational::from_integer((k as i64).into());
    let slice = &h / &kk;
    // Largest side in slice g: the box containing height g * H / K.
    let largest: Vec<Rational> = (0..k as i64)
        .map(|g| {
            let at = &slice * Rational::from_integer(g.into());
            stacked
                .iter()
                .find(|(_, z0, z1)| *z0 <= at && at < *z1)
                .map(|(b, _, _)| b.length.clone())
                .unwrap_or_else(Rational::zero)
        })
        .collect();
    let mut sup_sizes = vec![Rational::one()];
    sup_sizes.extend(largest.iter().skip(1).cloned());
    let inf_sizes: Vec<Rational> = largest.iter().skip(1).cloned().collect();
    let (ss, sb) = merged(sup_sizes, &slice);
    let (is, ib) = merged(inf_sizes, &slice);
    let ri = stack_group_round(boxes, k)?;
    let exact = RestrictedInstance::from_boxes(boxes)?;
    let original = match lin_value(&exact.sizes, &exact.beta, limits) {
        Ok(v) => Some(v),
        Err(Error::Refused(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(Sandwich {
        original,
        slice_height: to_f64(&slice),
        inf_prime: lin_value(&is, &ib, limits)?,
        sup_prime: lin_value(&ss, &sb, limits)?,
        sup: lin_value(&ri.sizes, &ri.beta, limits)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{validate_packing, Instance, Packing};
    use crate::rational::{int, rat};

    fn squares(v: &[(Rational, Rational)]) -> Vec<Box3> {
        Instance::from_dims(v.iter().map(|(s, h)| (s.clone(), s.clone(), h.clone())))
            .unwrap()
            .boxes()
            .to_vec()
    }

    #[test]
    fn rounding_example() {
        let b = squares(&[
            (rat(9, 10), int(1)),
            (rat(8, 10), int(1)),
            (rat(7, 10), int(1)),
            (rat(6, 10), int(1)),
        ]);
        let ri = stack_group_round(&b, 2).unwrap();
        assert_eq!(ri.thresholds.len(), 1);
        assert_eq!(ri.thresholds[0].id, 2);
        assert_eq!(ri.sizes, vec![int(1), rat(7, 10)]);
        assert_eq!(ri.members[0].iter().map(|b| b.id).collect::<Vec<_>>(), vec![0, 1]);
        assert_eq!(ri.members[1][0].id, 3);
        assert_eq!(ri.beta, vec![int(2), int(1)]);
    }

    #[test]
    fn single_box_and_one_group() {
        let b = squares(&[(rat(1, 2), rat(1, 3))]);
        let ri = stack_group_round(&b, 1).unwrap();
        assert!(ri.thresholds.is_empty());
        assert_eq!(ri.sizes, vec![int(1)]);
        // With two groups the midplane meets the only box.
        let ri = stack_group_round(&b, 2).unwrap();
        assert_eq!(ri.thresholds.len(), 1);
        assert!(ri.sizes.is_empty());
    }

    #[test]
    fn rounding_never_shrinks_and_uses_few_sizes() {
        let b = squares(
            &(1..=40)
                .map(|j| (rat(20 + (j * 7) % 80, 100), rat(1 + (j * 3) % 10, 10)))
                .collect::<Vec<_>>(),
        );
        for k in [1, 2, 3, 5, 8] {
            let ri = stack_group_round(&b, k).unwrap();
            assert!(ri.sizes.len() as u64 <= k);
            assert!(ri.thresholds.len() as u64 <= k - 1);
            assert_eq!(ri.num_boxes(), b.len());
            for (s, m) in ri.sizes.iter().zip(&ri.members) {
                assert!(m.iter().all(|b| b.length <= *s));
            }
        }
    }

    #[test]
    fn patterns_of_two_sizes() {
        let set = enumerate_patterns(&[rat(1, 2), rat(1, 3)], &PatternLimits::default()).unwrap();
        let mut counts = set.counts.clone();
        counts.sort();
        // 4 halves; 3 halves + 1 third (0.75 + 0.11); 2 halves + 3 thirds? area 0.5 + 0.33.
        assert!(counts.contains(&vec![4, 0]));
        assert!(counts.contains(&vec![0, 9]));
        for (c, slots) in set.counts.iter().zip(&set.slots) {
            assert_eq!(slots.len() as u64, c.iter().sum::<u64>());
        }
        for c in &counts {
            for d in &counts {
                assert!(c == d || !c.iter().zip(d).all(|(a, b)| a >= b));
            }
        }
    }

    #[test]
    fn pattern_guard_refuses() {
        let err = enumerate_patterns(&[rat(1, 7)], &PatternLimits::default());
        assert!(matches!(err, Err(Error::Refused(_))));
        let limits = PatternLimits {
            max_patterns: 3,
            ..PatternLimits::default()
        };
        let err = enumerate_patterns(&[rat(1, 2), rat(1, 3)], &limits);
        assert!(matches!(err, Err(Error::Refused(_))));
    }

    #[test]
    fn restricted_packing_is_valid_and_within_bound() {
        let dims: Vec<(Rational, Rational, Rational)> = (0..30)
            .map(|j| {
                let s = [rat(1, 2), rat(1, 3), rat(2, 5)][j % 3].clone();
                (s.clone(), s, rat(1 + (j as i64 * 7) % 10, 10))
            })
            .collect();
        let inst = Instance::from_dims(dims).unwrap();
        let ri = RestrictedInstance::from_boxes(inst.boxes()).unwrap();
        let pats = enumerate_patterns(&ri.sizes, &PatternLimits::default()).unwrap();
        let rp = solve_restricted(&ri, &pats).unwrap();
        assert!(rp.support <= ri.sizes.len());
        assert!(crate::rational::to_f64(&rp.height) <= rp.lin + 2.0 * ri.sizes.len() as f64 + 1e-9);
        let packing = Packing::from_placements(&inst, rp.placements).unwrap();
        assert!(validate_packing(&inst, &packing).unwrap().is_ok());
    }

    #[test]
    fn sandwich_orders() {
        let b = squares(
            &(1..=12)
                .map(|j| (rat(30 + (j * 11) % 60, 100), rat(1 + j % 4, 4)))
                .collect::<Vec<_>>(),
        );
        let s = sandwich(&b, 3, &PatternLimits::default()).unwrap();
        assert!(s.inf_prime <= s.sup_prime + 1e-9);
        assert!(s.sup_prime <= s.inf_prime + s.slice_height + 1e-9);
        let lin = s.original.unwrap();
        assert!(s.inf_prime <= lin + 1e-9 && lin <= s.sup_prime + 1e-9);
    }
}
