//! Layered next-fit-decreasing-height packing of small boxes into a cuboid.
//!
//! Boxes are taken in order of nonincreasing height. Each horizontal layer
//! holds the longest run of the remaining boxes whose bases a 2D NFDH shelf
//! packing fits into the region's base; the layer is as tall as its first
//! box. Layers stack until the next one would exceed the region height.

use std::ops::{Add, Sub};

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::model::{Box3, BoxId, Placement};
use crate::rational::{scale_to_integers, Rational};

/// An axis-aligned cuboid of free space; `height == None` is unbounded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Region {
    pub origin: [Rational; 3],
    pub length: Rational,
    pub width: Rational,
    pub height: Option<Rational>,
}

impl Region {
    pub fn volume(&self) -> Option<Rational> {
        self.height.as_ref().map(|h| &self.length * &self.width * h)
    }
}

#[derive(Debug, Clone, Default)]
pub struct MnfdhResult {
    pub placements: Vec<Placement>,
    pub leftovers: Vec<BoxId>,
    /// Height of the stacked layers.
    pub used_height: Rational,
    pub packed_volume: Rational,
}

/// 2D NFDH of `(length, width)` rectangles into `a x b`: sorted by
/// nonincreasing width, shelves along y, next fit along x. Returns positions
/// in input order.
fn shelf_pack<T>(items: &[(T, T)], a: &T, b: &T) -> Option<Vec<(T, T)>>
where
    T: Clone + Ord + Zero + Add<Output = T> + Sub<Output = T>,
{
    let mut order: Vec<usize> = (0..items.len()).collect();
    order.sort_by(|&i, &j| items[j].1.cmp(&items[i].1).then(i.cmp(&j)));
    let mut out = vec![(T::zero(), T::zero()); items.len()];
    let mut shelf_y = T::zero();
    let mut shelf_w = T::zero();
    let mut x = T::zero();
    let mut first = true;
    for i in order {
        let (l, w) = &items[i];
        if first || x.clone() + l.clone() > *a {
            if !first {
                shelf_y = shelf_y + shelf_w.clone();
            }
            first = false;
            shelf_w = w.clone();
            x = T::zero();
            if shelf_y.clone() + w.clone() > *b || l > a {
                return None;
            }
        }
        out[i] = (x.clone(), shelf_y.clone());
        x = x + l.clone();
    }
    Some(out)
}

struct Layer<T> {
    members: Vec<usize>,
    positions: Vec<(T, T)>,
}

fn layers<T>(
    heights: &[T],
    bases: &[(T, T)],
    a: &T,
    b: &T,
    cap: Option<&T>,
) -> (Vec<(T, Layer<T>)>, usize)
where
    T: Clone + Ord + Zero + Add<Output = T> + Sub<Output = T>,
{
    let n = heights.len();
    let mut out = Vec::new();
    let mut used = T::zero();
    let mut pos = 0;
    while pos < n {
        let h = heights[pos].clone();
        if let Some(c) = cap {
            if used.clone() + h.clone() > *c {
                break;
            }
        }
        let mut best: Option<Vec<(T, T)>> = None;
        let mut end = pos;
        while end < n {
            match shelf_pack(&bases[pos..=end], a, b) {
                Some(p) => {
                    best = Some(p);
                    end += 1;
                }
                None => break,
            }
        }
        let Some(positions) = best else { break };
        out.push((
            used.clone(),
            Layer {
                members: (pos..end).collect(),
                positions,
            },
        ));
        used = used + h;
        pos = end;
    }
    (out, pos)
}

/// Packs `items` into `region`; boxes that do not fit are returned as leftovers.
///
/// Refuses when some base side exceeds `delta` or `delta` exceeds the region's
/// base sides.
pub fn mnfdh_pack(items: &[Box3], region: &Region, delta: &Rational) -> Result<MnfdhResult> {
    if *delta > region.length || *delta > region.width {
        return Err(Error::Refused(format!(
            "region base {} x {} is smaller than delta = {delta}",
            region.length, region.width
        )));
    }
    if let Some(b) = items.iter().find(|b| b.length > *delta || b.width > *delta) {
        return Err(Error::Refused(format!(
            "box {} has a base side above delta = {delta}",
            b.id
        )));
    }
    let mut sorted: Vec<&Box3> = items.iter().collect();
    sorted.sort_by(|p, q| q.height.cmp(&p.height).then(p.id.cmp(&q.id)));
    let n = sorted.len();

    let mut values: Vec<Rational> = Vec::with_capacity(3 * n + 3);
    values.extend(sorted.iter().map(|b| b.height.clone()));
    values.extend(sorted.iter().map(|b| b.length.clone()));
    values.extend(sorted.iter().map(|b| b.width.clone()));
    values.push(region.length.clone());
    values.push(region.width.clone());
    if let Some(h) = &region.height {
        values.push(h.clone());
    }

    let (stacked, packed) = match scale_to_integers(&values, 24) {
        Some((ints, denom)) => {
            let bases: Vec<(i128, i128)> = (0..n).map(|i| (ints[n + i], ints[2 * n + i])).collect();
            let cap = region.height.as_ref().map(|_| ints[3 * n + 2]);
            let (ls, packed) = layers(&ints[..n], &bases, &ints[3 * n], &ints[3 * n + 1], cap.as_ref());
            let back = |v: i128| Rational::new(BigInt::from(v), denom.clone());
            let ls = ls
                .into_iter()
                .map(|(z, l)| {
                    (
                        back(z),
                        Layer {
                            members: l.members,
                            positions: l.positions.into_iter().map(|(x, y)| (back(x), back(y))).collect(),
                        },
                    )
                })
                .collect::<Vec<_>>();
            (ls, packed)
        }
        None => {
            let heights: Vec<Rational> = values[..n].to_vec();
            let bases: Vec<(Rational, Rational)> =
                (0..n).map(|i| (values[n + i].clone(), values[2 * n + i].clone())).collect();
            layers(&heights, &bases, &region.length, &region.width, region.height.as_ref())
        }
    };

    let mut result = MnfdhResult::default();
    for (z, layer) in &stacked {
        for (k, &i) in layer.members.iter().enumerate() {
            let (x, y) = &layer.positions[k];
            let b = sorted[i];
            result.placements.push(Placement::new(
                b.id,
                &region.origin[0] + x,
                &region.origin[1] + y,
                &region.origin[2] + z,
            ));
            result.packed_volume += b.volume();
        }
        let top = z + &sorted[layer.members[0]].height;
        if top > result.used_height {
            result.used_height = top;
        }
    }
    result.leftovers = sorted[packed..].iter().map(|b| b.id).collect();
    Ok(result)
}
