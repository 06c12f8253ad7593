//! Harmonic grouping by length and the two segment packers.

use std::ops::Add;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::harmonic::harmonic_type;
use crate::model::{Box3, BoxId, Instance};
use crate::rational::{scale_to_integers, Rational};

/// Contents of a segment, by box id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SegmentContents {
    /// `q` slips of x-extent `1/q`, each a bottom-up stack.
    Slips(Vec<Vec<BoxId>>),
    /// Shelves from the bottom up; each is packed left to right along x and
    /// is as tall as its first box.
    Levels(Vec<Vec<BoxId>>),
}

/// A `1 x width x c` container holding boxes of a single harmonic type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment {
    /// Harmonic type `q` in `1..=k`.
    pub kind: u64,
    pub width: Rational,
    pub height: Rational,
    pub contents: SegmentContents,
    /// Layer index and y-offset, once realised.
    pub origin: Option<(usize, Rational)>,
}

impl Segment {
    pub fn box_ids(&self) -> Vec<BoxId> {
        match &self.contents {
            SegmentContents::Slips(s) | SegmentContents::Levels(s) => s.concat(),
        }
    }

    /// Box positions `(id, x, z)` relative to the segment's corner.
    pub fn local_positions(&self, instance: &Instance) -> Vec<(BoxId, Rational, Rational)> {
        let mut out = Vec::new();
        match &self.contents {
            SegmentContents::Slips(slips) => {
                let q = Rational::from_integer(self.kind.into());
                for (j, slip) in slips.iter().enumerate() {
                    let x = Rational::from_integer(j.into()) / &q;
                    let mut z = Rational::zero();
                    for &id in slip {
                        out.push((id, x.clone(), z.clone()));
                        z += &instance.get(id).expect("segment box in instance").height;
                    }
                }
            }
            SegmentContents::Levels(levels) => {
                let mut z = Rational::zero();
                for level in levels {
                    let mut x = Rational::zero();
                    for &id in level {
                        out.push((id, x.clone(), z.clone()));
                        x += &instance.get(id).expect("segment box in instance").length;
                    }
                    if let Some(&first) = level.first() {
                        z += &instance.get(first).unwrap().height;
                    }
                }
            }
        }
        out
    }
}

/// Splits an instance into `k` groups by harmonic type of the length; group
/// `q` sits at index `q - 1`. Each group is sorted by nonincreasing width,
/// ties by id.
pub fn group_by_length(instance: &Instance, k: u64) -> Result<Vec<Vec<Box3>>> {
    let mut groups: Vec<Vec<Box3>> = vec![Vec::new(); k as usize];
    for b in instance.boxes() {
        let t = harmonic_type(&b.length, k)?;
        groups[(t - 1) as usize].push(b.clone());
    }
    for g in &mut groups {
        g.sort_by(|a, b| b.width.cmp(&a.width).then(a.id.cmp(&b.id)));
    }
    Ok(groups)
}

fn check_widths(group: &[Box3]) -> Result<()> {
    if group.windows(2).any(|w| w[0].width < w[1].width) {
        return Err(Error::Contract("group must be sorted by nonincreasing width".into()));
    }
    Ok(())
}

fn check_c(c: &Rational) -> Result<()> {
    if *c <= Rational::one() {
        return Err(Error::domain("c", c, "c > 1"));
    }
    Ok(())
}

/// Packs a type-`q` group (`q < k`) into segments: `q` slips per segment,
/// filled by Next Fit on heights with capacity `c`.
pub fn gnf_pack(group: &[Box3], q: u64, c: &Rational) -> Result<Vec<Segment>> {
    check_c(c)?;
    check_widths(group)?;
    let lo = Rational::new(1.into(), (q + 1).into());
    let hi = Rational::new(1.into(), q.into());
    if let Some(b) = group.iter().find(|b| b.length <= lo || b.length > hi) {
        return Err(Error::Contract(format!(
            "box {} has length {} outside ({lo}, {hi}]",
            b.id, b.length
        )));
    }
    let mut segments = Vec::new();
    let mut slips: Vec<Vec<BoxId>> = Vec::new();
    let mut width = Rational::zero();
    let mut load = Rational::zero();
    for b in group {
        if slips.is_empty() {
            width = b.width.clone();
            slips.push(Vec::new());
            load = Rational::zero();
        } else if &load + &b.height > *c {
            if slips.len() as u64 == q {
                segments.push(slip_segment(q, &width, c, std::mem::take(&mut slips)));
                width = b.width.clone();
            }
            slips.push(Vec::new());
            load = Rational::zero();
        }
        slips.last_mut().unwrap().push(b.id);
        load += &b.height;
    }
    if !slips.is_empty() {
        segments.push(slip_segment(q, &width, c, slips));
    }
    Ok(segments)
}

fn slip_segment(q: u64, width: &Rational, c: &Rational, mut slips: Vec<Vec<BoxId>>) -> Segment {
    slips.resize(q as usize, Vec::new());
    Segment {
        kind: q,
        width: width.clone(),
        height: c.clone(),
        contents: SegmentContents::Slips(slips),
        origin: None,
    }
}

/// NFDH over `(height, length)` pairs already sorted by nonincreasing height.
/// Returns the level break positions, or `None` if the levels exceed `c`.
fn nfdh_levels<T>(sorted: &[(T, T)], one: &T, c: &T) -> Option<Vec<usize>>
where
    T: Clone + Ord + Zero + Add<Output = T>,
{
    let mut starts = Vec::new();
    let mut used = T::zero();
    let mut level_h = T::zero();
    let mut x = T::zero();
    for (pos, (h, l)) in sorted.iter().enumerate() {
        if starts.is_empty() || x.clone() + l.clone() > *one {
            used = used + level_h;
            if used.clone() + h.clone() > *c {
                return None;
            }
            starts.push(pos);
            level_h = h.clone();
            x = T::zero();
        }
        x = x + l.clone();
    }
    Some(starts)
}

/// Packs the longest prefix that fits, stopping at the first prefix that does not.
fn gnfdh_generic<T>(heights: &[T], lengths: &[T], one: &T, c: &T) -> Vec<Vec<Vec<usize>>>
where
    T: Clone + Ord + Zero + Add<Output = T>,
{
    let n = heights.len();
    let mut segments = Vec::new();
    let mut start = 0;
    while start < n {
        // sorted holds (height, length, index) for the current prefix
        let mut sorted: Vec<(T, T, usize)> = Vec::new();
        let mut accepted: Option<(Vec<usize>, Vec<usize>)> = None;
        for idx in start..n {
            let h = heights[idx].clone();
            let at = sorted.partition_point(|e| e.0 >= h);
            sorted.insert(at, (h, lengths[idx].clone(), idx));
            let pairs: Vec<(T, T)> = sorted.iter().map(|e| (e.0.clone(), e.1.clone())).collect();
            match nfdh_levels(&pairs, one, c) {
                Some(starts) => {
                    accepted = Some((starts, sorted.iter().map(|e| e.2).collect()));
                }
                None => break,
            }
        }
        let (starts, order) = accepted.expect("a single box always fits a segment");
        let mut levels = Vec::with_capacity(starts.len());
        for (k, &s) in starts.iter().enumerate() {
            let e = starts.get(k + 1).copied().unwrap_or(order.len());
            levels.push(order[s..e].to_vec());
        }
        start += order.len();
        segments.push(levels);
    }
    segments
}

/// Packs the type-`k` group (lengths at most `1/k`) into segments. Each
/// segment takes the longest prefix of the remaining boxes that NFDH, ignoring
/// widths, fits within height `c`; adding the next box would not fit.
pub fn gnfdh_pack(group: &[Box3], k: u64, c: &Rational) -> Result<Vec<Segment>> {
    check_c(c)?;
    check_widths(group)?;
    let cap = Rational::new(1.into(), k.into());
    if let Some(b) = group.iter().find(|b| b.length > cap) {
        return Err(Error::Contract(format!(
            "box {} has length {} above 1/{k}",
            b.id, b.length
        )));
    }
    let n = group.len();
    let mut values: Vec<Rational> = group.iter().map(|b| b.height.clone()).collect();
    values.extend(group.iter().map(|b| b.length.clone()));
    values.push(Rational::one());
    values.push(c.clone());
    let index_levels = match scale_to_integers(&values, 24) {
        Some((ints, _)) => gnfdh_generic(&ints[..n], &ints[n..2 * n], &ints[2 * n], &ints[2 * n + 1]),
        None => gnfdh_generic(
            &values[..n],
            &values[n..2 * n],
            &values[2 * n],
            &values[2 * n + 1],
        ),
    };
    Ok(index_levels
        .into_iter()
        .map(|levels| {
            let first = levels.iter().flatten().min().copied().unwrap();
            Segment {
                kind: k,
                width: group[first].width.clone(),
                height: c.clone(),
                contents: SegmentContents::Levels(
                    levels
                        .into_iter()
                        .map(|lv| lv.into_iter().map(|i| group[i].id).collect())
                        .collect(),
                ),
                origin: None,
            }
        })
        .collect())
}
