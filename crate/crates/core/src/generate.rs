//! Seeded instance generators.
//!
//! Sizes are multiples of `1/100` unless stated otherwise, so instances
//! round-trip through decimal strings and scale to small integers.

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{Instance, Packing, Placement};
use crate::rational::{rat, Rational};

/// Grid on which generated sizes and cuts lie.
pub const GRID: i64 = 100;

#[derive(Debug, Clone, PartialEq)]
pub enum Generator {
    /// Every side drawn uniformly from `[lo, hi]`.
    Uniform { n: usize, lo: f64, hi: f64 },
    /// Lengths just above `1/(t+1)` for a random `t < max_type`; widths and
    /// heights uniform in `(0, 1]`.
    HarmonicAdversarial { n: usize, max_type: u64, eta: Rational },
    /// Square bases with side uniform in `[lo, hi]`, heights uniform in `(0, 1]`.
    SquareBase { n: usize, lo: f64, hi: f64 },
    /// Random guillotine cuts of the cuboid `[0,1]^2 x [0, height]`, first
    /// into unit layers. The pieces tile the cuboid, so the optimum is `height`.
    GuillotineCut { height: u32, cuts: usize },
}

impl Generator {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Uniform { .. } => "uniform",
            Self::HarmonicAdversarial { .. } => "harmonic-adversarial",
            Self::SquareBase { .. } => "square-base",
            Self::GuillotineCut { .. } => "guillotine-cut",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Generated {
    pub instance: Instance,
    /// Optimal height when the construction fixes it.
    pub known_opt: Option<Rational>,
    /// A packing attaining `known_opt`.
    pub witness: Option<Packing>,
}

fn grid_range(lo: f64, hi: f64) -> Result<(i64, i64)> {
    if !(lo.is_finite() && hi.is_finite()) || lo > hi || hi <= 0.0 || hi > 1.0 || lo < 0.0 {
        return Err(Error::domain("size range", format!("[{lo}, {hi}]"), "0 <= lo <= hi <= 1, hi > 0"));
    }
    let a = ((lo * GRID as f64).ceil() as i64).max(1);
    let b = (hi * GRID as f64).floor() as i64;
    if a > b {
        return Err(Error::domain("size range", format!("[{lo}, {hi}]"), "contains a multiple of 1/100"));
    }
    Ok((a, b))
}

fn draw(rng: &mut ChaCha8Rng, (a, b): (i64, i64)) -> Rational {
    rat(rng.gen_range(a..=b), GRID)
}

pub fn generate(generator: &Generator, seed: u64) -> Result<Generated> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let full = (1, GRID);
    let dims: Vec<(Rational, Rational, Rational)> = match generator {
        Generator::Uniform { n, lo, hi } => {
            let r = grid_range(*lo, *hi)?;
            (0..*n)
                .map(|_| (draw(&mut rng, r), draw(&mut rng, r), draw(&mut rng, r)))
                .collect()
        }
        Generator::HarmonicAdversarial { n, max_type, eta } => {
            if *max_type < 1 {
                return Err(Error::domain("max_type", max_type, "max_type >= 1"));
            }
            if *eta <= Rational::zero() || *eta >= rat(1, 2) {
                return Err(Error::domain("eta", eta, "0 < eta < 1/2"));
            }
            (0..*n)
                .map(|_| {
                    let t = rng.gen_range(1..=*max_type);
                    let base = Rational::new(1.into(), (t + 1).into());
                    let l = (base + eta).min(Rational::one());
                    (l, draw(&mut rng, full), draw(&mut rng, full))
                })
                .collect()
        }
        Generator::SquareBase { n, lo, hi } => {
            let r = grid_range(*lo, *hi)?;
            (0..*n)
                .map(|_| {
                    let s = draw(&mut rng, r);
                    (s.clone(), s, draw(&mut rng, full))
                })
                .collect()
        }
        Generator::GuillotineCut { height, cuts } => {
            return guillotine_cut(&mut rng, *height, *cuts);
        }
    };
    Ok(Generated {
        instance: Instance::from_dims(dims)?,
        known_opt: None,
        witness: None,
    })
}

/// A cuboid piece in grid units: min corner and extents.
#[derive(Debug, Clone, Copy)]
struct Piece {
    at: [i64; 3],
    ext: [i64; 3],
}

fn guillotine_cut(rng: &mut ChaCha8Rng, height: u32, cuts: usize) -> Result<Generated> {
    let mut pieces: Vec<Piece> = (0..height as i64)
        .map(|z| Piece {
            at: [0, 0, z * GRID],
            ext: [GRID, GRID, GRID],
        })
        .collect();
    for _ in 0..cuts {
        let splittable: Vec<(usize, usize)> = pieces
            .iter()
            .enumerate()
            .flat_map(|(i, p)| (0..3).filter(move |&a| p.ext[a] > 1).map(move |a| (i, a)))
            .collect();
        if splittable.is_empty() {
            break;
        }
        let (i, axis) = splittable[rng.gen_range(0..splittable.len())];
        let p = pieces[i];
        let cut = rng.gen_range(1..p.ext[axis]);
        let mut first = p;
        first.ext[axis] = cut;
        let mut second = p;
        second.at[axis] += cut;
        second.ext[axis] -= cut;
        pieces[i] = first;
        pieces.push(second);
    }
    let dims = pieces
        .iter()
        .map(|p| (rat(p.ext[0], GRID), rat(p.ext[1], GRID), rat(p.ext[2], GRID)));
    let instance = Instance::from_dims(dims)?;
    let placements = pieces
        .iter()
        .enumerate()
        .map(|(id, p)| Placement::new(id, rat(p.at[0], GRID), rat(p.at[1], GRID), rat(p.at[2], GRID)))
        .collect();
    let witness = Packing::from_placements(&instance, placements)?;
    Ok(Generated {
        instance,
        known_opt: Some(Rational::from_integer(height.into())),
        witness: Some(witness),
    })
}

/// Rectangles `(length, width)` obtained by `cuts` random guillotine cuts of
/// the unit square on the `1/100` grid, with their lower-left corners. They
/// tile the square.
pub fn guillotine_rectangles(
    rng: &mut impl Rng,
    cuts: usize,
) -> Vec<((Rational, Rational), (Rational, Rational))> {
    let mut rects: Vec<([i64; 2], [i64; 2])> = vec![([0, 0], [GRID, GRID])];
    for _ in 0..cuts {
        let choices: Vec<(usize, usize)> = rects
            .iter()
            .enumerate()
            .flat_map(|(i, r)| (0..2).filter(move |&a| r.1[a] > 1).map(move |a| (i, a)))
            .collect();
        if choices.is_empty() {
            break;
        }
        let (i, axis) = choices[rng.gen_range(0..choices.len())];
        let (at, ext) = rects[i];
        let cut = rng.gen_range(1..ext[axis]);
        let mut first = (at, ext);
        first.1[axis] = cut;
        let mut second = (at, ext);
        second.0[axis] += cut;
        second.1[axis] -= cut;
        rects[i] = first;
        rects.push(second);
    }
    rects
        .into_iter()
        .map(|(at, ext)| {
            (
                (rat(ext[0], GRID), rat(ext[1], GRID)),
                (rat(at[0], GRID), rat(at[1], GRID)),
            )
        })
        .collect()
}
