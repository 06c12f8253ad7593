//! Exact solvers for small instances.
//!
//! Both the strip oracle and the square feasibility check run the same
//! separation-relation search on integer-scaled extents; see [`search`].

mod search;

use num_bigint::BigInt;
use num_traits::{One, Zero};

pub use crate::binpack::{exact_bp, EXACT_BP_LIMIT};
use crate::error::{Error, OracleError, Result};
use crate::model::{total_volume, validate_packing, Instance, Packing, Placement};
use crate::rational::{scale_to_integers, Rational};

/// Limits on exact searches.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBudget {
    pub max_nodes: u64,
    pub max_boxes: usize,
}

impl SearchBudget {
    pub const DEFAULT_NODES: u64 = 5_000_000;

    /// Defaults for the 3D strip oracle: 5 boxes.
    pub fn strip() -> Self {
        Self {
            max_nodes: Self::DEFAULT_NODES,
            max_boxes: 5,
        }
    }

    /// Defaults for square feasibility: 12 squares.
    pub fn squares() -> Self {
        Self {
            max_nodes: Self::DEFAULT_NODES,
            max_boxes: 12,
        }
    }

    pub fn with_nodes(self, max_nodes: u64) -> Self {
        Self { max_nodes, ..self }
    }
}

fn scaled(values: &[Rational]) -> Result<(Vec<i128>, BigInt)> {
    scale_to_integers(values, 16)
        .ok_or_else(|| Error::Refused("extents have no manageable common denominator".into()))
}

fn unscale(v: i128, denom: &BigInt) -> Rational {
    Rational::new(v.into(), denom.clone())
}

/// Minimum strip height of a small instance with an optimal packing.
pub fn exact_strip_opt(instance: &Instance, budget: &SearchBudget) -> Result<(Rational, Packing)> {
    let n = instance.len();
    if n > budget.max_boxes {
        return Err(OracleError::TooLarge {
            items: n,
            limit: budget.max_boxes,
        }
        .into());
    }
    if n == 0 {
        return Ok((Rational::zero(), Packing::empty()));
    }
    let boxes = instance.boxes();
    let mut flat: Vec<Rational> = boxes
        .iter()
        .flat_map(|b| [b.length.clone(), b.width.clone(), b.height.clone()])
        .collect();
    flat.push(Rational::one());
    let (ints, denom) = scaled(&flat)?;
    let unit = ints[3 * n];
    let extents: Vec<Vec<i128>> = ints[..3 * n].chunks(3).map(<[i128]>::to_vec).collect();

    let stacked: i128 = extents.iter().map(|e| e[2]).sum();
    let tallest = extents.iter().map(|e| e[2]).max().unwrap();
    let volume = total_volume(instance) * Rational::from_integer(denom.clone());
    let volume_bound: i128 = volume.ceil().to_integer().try_into().unwrap_or(i128::MAX);
    let problem = search::Problem {
        extents,
        capacity: vec![Some(unit), Some(unit), None],
        feasibility_only: false,
        lower_bound: tallest.max(volume_bound),
        upper_bound: stacked,
        node_budget: budget.max_nodes,
    };
    let outcome = search::solve(&problem)?;

    let placements: Vec<Placement> = match outcome.best {
        Some((_, pos)) => boxes
            .iter()
            .enumerate()
            .map(|(i, b)| {
                Placement::new(
                    b.id,
                    unscale(pos[0][i], &denom),
                    unscale(pos[1][i], &denom),
                    unscale(pos[2][i], &denom),
                )
            })
            .collect(),
        None => {
            let mut z = Rational::zero();
            boxes
                .iter()
                .map(|b| {
                    let p = Placement::new(b.id, Rational::zero(), Rational::zero(), z.clone());
                    z += &b.height;
                    p
                })
                .collect()
        }
    };
    let packing = Packing::from_placements(instance, placements)?;
    if !validate_packing(instance, &packing)?.is_ok() {
        return Err(Error::Invariant("oracle witness does not validate".into()));
    }
    Ok((packing.height().clone(), packing))
}

/// Shelf packing of squares in decreasing order; positions in input order.
/// Largest grid `{i/m}` used by [`lattice_excludes`].
const LATTICE_MAX: i64 = 64;

/// A square of side `s` inside the unit square holds at least
/// `(ceil(s m) - 1)^2` interior points of the grid `{i/m : 0 < i < m}^2`, and
/// squares with disjoint interiors hold distinct points. True when some `m`
/// shows the sides cannot fit.
fn lattice_excludes(sides: &[Rational]) -> bool {
    (2..=LATTICE_MAX).any(|m| {
        let mm = Rational::from_integer(m.into());
        let mut need: i64 = 0;
        for s in sides {
            let c = crate::rational::ceil_to_i64(&(s * &mm)) - 1;
            need += c * c;
        }
        need > (m - 1) * (m - 1)
    })
}

fn shelf_squares(sides: &[Rational]) -> Option<Vec<(Rational, Rational)>> {
    let mut order: Vec<usize> = (0..sides.len()).collect();
    order.sort_by(|&a, &b| sides[b].cmp(&sides[a]).then(a.cmp(&b)));
    let one = Rational::one();
    let mut pos = vec![(Rational::zero(), Rational::zero()); sides.len()];
    let mut shelf_y = Rational::zero();
    let mut shelf_h = Rational::zero();
    let mut x = Rational::zero();
    for i in order {
        let s = &sides[i];
        if &x + s > one || shelf_h.is_zero() {
            if !shelf_h.is_zero() {
                shelf_y += &shelf_h;
            }
            shelf_h = s.clone();
            x = Rational::zero();
        }
        if &shelf_y + s > one {
            return None;
        }
        pos[i] = (x.clone(), shelf_y.clone());
        x += s;
    }
    Some(pos)
}

/// Decides whether squares with the given sides fit in the unit square.
///
/// Returns the lower-left corner of every square when they do.
pub fn square_fit(
    sides: &[Rational],
    budget: &SearchBudget,
) -> Result<Option<Vec<(Rational, Rational)>>> {
    for s in sides {
        if *s <= Rational::zero() || *s > Rational::one() {
            return Err(Error::domain("square side", s, "0 < side <= 1"));
        }
    }
    let area: Rational = sides.iter().map(|s| s * s).sum();
    if area > Rational::one() {
        return Ok(None);
    }
    if let Some(pos) = shelf_squares(sides) {
        return Ok(Some(pos));
    }
    if lattice_excludes(sides) {
        return Ok(None);
    }
    let n = sides.len();
    if n > budget.max_boxes {
        return Err(OracleError::TooLarge {
            items: n,
            limit: budget.max_boxes,
        }
        .into());
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| sides[b].cmp(&sides[a]).then(a.cmp(&b)));
    let mut values: Vec<Rational> = order.iter().map(|&i| sides[i].clone()).collect();
    values.push(Rational::one());
    let (ints, denom) = scaled(&values)?;
    let unit = ints[n];
    let problem = search::Problem {
        extents: ints[..n].iter().map(|&s| vec![s, s]).collect(),
        capacity: vec![Some(unit), Some(unit)],
        feasibility_only: true,
        lower_bound: 0,
        upper_bound: 0,
        node_budget: budget.max_nodes,
    };
    let outcome = search::solve(&problem)?;
    Ok(outcome.best.map(|(_, pos)| {
        let mut out = vec![(Rational::zero(), Rational::zero()); n];
        for (k, &i) in order.iter().enumerate() {
            out[i] = (unscale(pos[0][k], &denom), unscale(pos[1][k], &denom));
        }
        out
    }))
}
