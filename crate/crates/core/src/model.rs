//! Boxes, instances, placements, packings and the geometric validator.
//!
//! Coordinates follow one convention everywhere: `x` is the length axis,
//! `y` the width axis and `z` the height axis. The strip occupies
//! `[0,1] x [0,1] x [0, inf)`. Boxes are closed; two boxes overlap only when
//! their open interiors intersect, so shared faces are allowed.

use std::collections::HashMap;
use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::ModelError;
use crate::rational::{to_f64, Rational};

pub type BoxId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        })
    }
}

/// An oriented box with every side in `(0, 1]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Box3 {
    pub id: BoxId,
    pub length: Rational,
    pub width: Rational,
    pub height: Rational,
}

impl Box3 {
    pub fn new(
        id: BoxId,
        length: Rational,
        width: Rational,
        height: Rational,
    ) -> Result<Self, ModelError> {
        for (axis, side) in Axis::ALL.into_iter().zip([&length, &width, &height]) {
            if !side.is_positive_unit() {
                return Err(ModelError::SideOutOfRange {
                    id,
                    axis,
                    value: side.clone(),
                });
            }
        }
        Ok(Self {
            id,
            length,
            width,
            height,
        })
    }

    pub fn extent(&self, axis: Axis) -> &Rational {
        match axis {
            Axis::X => &self.length,
            Axis::Y => &self.width,
            Axis::Z => &self.height,
        }
    }

    pub fn volume(&self) -> Rational {
        &self.length * &self.width * &self.height
    }

    pub fn base_area(&self) -> Rational {
        &self.length * &self.width
    }
}

trait UnitInterval {
    fn is_positive_unit(&self) -> bool;
}

impl UnitInterval for Rational {
    fn is_positive_unit(&self) -> bool {
        *self > Rational::zero() && *self <= Rational::one()
    }
}

/// An ordered list of boxes with unique ids.
#[derive(Debug, Clone, Default)]
pub struct Instance {
    boxes: Vec<Box3>,
    square_base: bool,
    index: HashMap<BoxId, usize>,
}

impl Instance {
    pub fn new(boxes: Vec<Box3>) -> Result<Self, ModelError> {
        let mut index = HashMap::with_capacity(boxes.len());
        for (pos, b) in boxes.iter().enumerate() {
            if index.insert(b.id, pos).is_some() {
                return Err(ModelError::DuplicateBoxId(b.id));
            }
        }
        let square_base = boxes.iter().all(|b| b.length == b.width);
        Ok(Self {
            boxes,
            square_base,
            index,
        })
    }

    /// Builds an instance from `(length, width, height)` triples with ids `0..n`.
    pub fn from_dims<I>(dims: I) -> Result<Self, ModelError>
    where
        I: IntoIterator<Item = (Rational, Rational, Rational)>,
    {
        let boxes = dims
            .into_iter()
            .enumerate()
            .map(|(id, (l, w, h))| Box3::new(id, l, w, h))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(boxes)
    }

    pub fn boxes(&self) -> &[Box3] {
        &self.boxes
    }

    pub fn len(&self) -> usize {
        self.boxes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.boxes.is_empty()
    }

    /// True iff every box has `length == width`. Vacuously true when empty.
    pub fn is_square_base(&self) -> bool {
        self.square_base
    }

    pub fn get(&self, id: BoxId) -> Option<&Box3> {
        self.index.get(&id).map(|&pos| &self.boxes[pos])
    }

    /// A new instance holding the boxes with the given ids, in the given order.
    pub fn subset(&self, ids: &[BoxId]) -> Result<Self, ModelError> {
        let boxes = ids
            .iter()
            .map(|&id| self.get(id).cloned().ok_or(ModelError::UnknownBoxId(id)))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(boxes)
    }
}

/// Sum of box volumes. Since the strip base has area 1 this bounds the
/// optimal height from below.
pub fn total_volume(instance: &Instance) -> Rational {
    instance.boxes().iter().map(Box3::volume).sum()
}

/// Min-corner position of one box.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Placement {
    pub box_id: BoxId,
    pub x: Rational,
    pub y: Rational,
    pub z: Rational,
}

impl Placement {
    pub fn new(box_id: BoxId, x: Rational, y: Rational, z: Rational) -> Self {
        Self { box_id, x, y, z }
    }

    pub fn at_origin(box_id: BoxId) -> Self {
        Self::new(box_id, Rational::zero(), Rational::zero(), Rational::zero())
    }

    pub fn coord(&self, axis: Axis) -> &Rational {
        match axis {
            Axis::X => &self.x,
            Axis::Y => &self.y,
            Axis::Z => &self.z,
        }
    }

    pub fn translated(&self, dx: &Rational, dy: &Rational, dz: &Rational) -> Self {
        Self::new(self.box_id, &self.x + dx, &self.y + dy, &self.z + dz)
    }
}

/// Placements of (normally) every box of an instance plus the used height.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Packing {
    placements: Vec<Placement>,
    height: Rational,
}

impl Packing {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Computes the height as the highest top face among the placements.
    pub fn from_placements(
        instance: &Instance,
        placements: Vec<Placement>,
    ) -> Result<Self, ModelError> {
        let mut height = Rational::zero();
        for p in &placements {
            let b = instance
                .get(p.box_id)
                .ok_or(ModelError::UnknownBoxId(p.box_id))?;
            let top = &p.z + &b.height;
            if top > height {
                height = top;
            }
        }
        Ok(Self { placements, height })
    }

    /// Keeps a declared height as-is, e.g. when read from a file. The
    /// validator reports a mismatch if it is not the true maximum.
    pub fn with_declared_height(placements: Vec<Placement>, height: Rational) -> Self {
        Self { placements, height }
    }

    pub fn placements(&self) -> &[Placement] {
        &self.placements
    }

    pub fn height(&self) -> &Rational {
        &self.height
    }

    pub fn len(&self) -> usize {
        self.placements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.placements.is_empty()
    }

    pub fn into_placements(self) -> Vec<Placement> {
        self.placements
    }
}

/// Height used by a packing; `0` for the empty packing.
pub fn packing_height(packing: &Packing) -> Rational {
    packing.height().clone()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// Open interiors intersect; `region` is the common box per axis.
    Overlap {
        first: BoxId,
        second: BoxId,
        region: [(Rational, Rational); 3],
    },
    OutOfBounds {
        id: BoxId,
        axis: Axis,
        far_side: Rational,
    },
    NegativeCoordinate {
        id: BoxId,
        axis: Axis,
        value: Rational,
    },
    HeightMismatch {
        declared: Rational,
        actual: Rational,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Overlap {
                first,
                second,
                region,
            } => {
                write!(f, "boxes {first} and {second} overlap on")?;
                for (axis, (lo, hi)) in Axis::ALL.iter().zip(region) {
                    write!(f, " {axis}:({lo},{hi})")?;
                }
                Ok(())
            }
            Violation::OutOfBounds { id, axis, far_side } => {
                write!(f, "box {id} ends at {axis}={far_side} > 1")
            }
            Violation::NegativeCoordinate { id, axis, value } => {
                write!(f, "box {id} starts at {axis}={value} < 0")
            }
            Violation::HeightMismatch { declared, actual } => {
                write!(f, "declared height {declared} but highest top is {actual}")
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

struct Extent {
    id: BoxId,
    lo: [Rational; 3],
    hi: [Rational; 3],
    lo_f: [f64; 3],
    hi_f: [f64; 3],
}

/// `a < b`, decided in floating point when the gap is clear and exactly otherwise.
fn less(a: &Rational, a_f: f64, b: &Rational, b_f: f64) -> bool {
    let tol = 1e-9 * (1.0 + a_f.abs().max(b_f.abs()));
    if a_f < b_f - tol {
        true
    } else if a_f > b_f + tol {
        false
    } else {
        a < b
    }
}

fn interiors_meet(a: &Extent, b: &Extent, axis: usize) -> bool {
    less(&a.lo[axis], a.lo_f[axis], &b.hi[axis], b.hi_f[axis])
        && less(&b.lo[axis], b.lo_f[axis], &a.hi[axis], a.hi_f[axis])
}

/// Checks a packing against an instance.
///
/// Structural problems (unknown, duplicate or missing box ids) are errors;
/// geometric problems are collected into the report. Every comparison is
/// exact; floats only short-cut comparisons whose outcome is unambiguous.
pub fn validate_packing(
    instance: &Instance,
    packing: &Packing,
) -> Result<ValidationReport, ModelError> {
    let mut seen = vec![false; instance.len()];
    let mut extents = Vec::with_capacity(packing.len());
    let mut violations = Vec::new();
    let zero = Rational::zero();
    let one = Rational::one();
    let mut actual_height = Rational::zero();

    for p in packing.placements() {
        let pos = *instance
            .index
            .get(&p.box_id)
            .ok_or(ModelError::UnknownBoxId(p.box_id))?;
        if std::mem::replace(&mut seen[pos], true) {
            return Err(ModelError::DuplicatePlacement(p.box_id));
        }
        let b = &instance.boxes[pos];
        let lo = [p.x.clone(), p.y.clone(), p.z.clone()];
        let hi = [&p.x + &b.length, &p.y + &b.width, &p.z + &b.height];
        for axis in Axis::ALL {
            let i = axis.index();
            if lo[i] < zero {
                violations.push(Violation::NegativeCoordinate {
                    id: b.id,
                    axis,
                    value: lo[i].clone(),
                });
            }
            if axis != Axis::Z && hi[i] > one {
                violations.push(Violation::OutOfBounds {
                    id: b.id,
                    axis,
                    far_side: hi[i].clone(),
                });
            }
        }
        if hi[2] > actual_height {
            actual_height = hi[2].clone();
        }
        extents.push(Extent {
            id: b.id,
            lo_f: [to_f64(&lo[0]), to_f64(&lo[1]), to_f64(&lo[2])],
            hi_f: [to_f64(&hi[0]), to_f64(&hi[1]), to_f64(&hi[2])],
            lo,
            hi,
        });
    }
    if let Some(pos) = seen.iter().position(|s| !s) {
        return Err(ModelError::MissingPlacement(instance.boxes[pos].id));
    }
    if *packing.height() != actual_height {
        violations.push(Violation::HeightMismatch {
            declared: packing.height().clone(),
            actual: actual_height,
        });
    }

    // Sweep along z: a box only needs checking against boxes whose z-range
    // is still open at its bottom face.
    extents.sort_by(|a, b| a.lo[2].cmp(&b.lo[2]).then(a.id.cmp(&b.id)));
    let mut active: Vec<usize> = Vec::new();
    let mut overlaps = Vec::new();
    for (idx, e) in extents.iter().enumerate() {
        active.retain(|&a| {
            let other = &extents[a];
            less(&e.lo[2], e.lo_f[2], &other.hi[2], other.hi_f[2])
        });
        for &a in &active {
            let other = &extents[a];
            if interiors_meet(other, e, 0) && interiors_meet(other, e, 1) {
                let region = [0, 1, 2].map(|i| {
                    (
                        crate::rational::max(&other.lo[i], &e.lo[i]),
                        crate::rational::min(&other.hi[i], &e.hi[i]),
                    )
                });
                let (first, second) = (other.id.min(e.id), other.id.max(e.id));
                overlaps.push(Violation::Overlap {
                    first,
                    second,
                    region,
                });
            }
        }
        active.push(idx);
    }
    overlaps.sort_by_key(|v| match v {
        Violation::Overlap { first, second, .. } => (*first, *second),
        _ => unreachable!(),
    });
    violations.extend(overlaps);
    Ok(ValidationReport { violations })
}
