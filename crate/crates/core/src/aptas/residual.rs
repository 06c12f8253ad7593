//! Free cuboids left inside the bands of the large-box packing.

use num_traits::{One, Zero};

use super::mnfdh::Region;
use super::restricted::Band;
use crate::rational::Rational;

/// Disjoint free regions of one band: the space above each column, and the
/// band's uncovered base area cut into slabs along x.
pub fn band_regions(band: &Band) -> Vec<Region> {
    let mut out = Vec::new();
    for col in &band.columns {
        let rest = &band.height - &col.filled;
        if rest > Rational::zero() {
            out.push(Region {
                origin: [col.x.clone(), col.y.clone(), &band.z + &col.filled],
                length: col.side.clone(),
                width: col.side.clone(),
                height: Some(rest),
            });
        }
    }
    let mut xs: Vec<Rational> = vec![Rational::zero(), Rational::one()];
    for col in &band.columns {
        xs.push(col.x.clone());
        xs.push(&col.x + &col.side);
    }
    xs.sort();
    xs.dedup();
    for w in xs.windows(2) {
        let (xa, xb) = (&w[0], &w[1]);
        let mut taken: Vec<(Rational, Rational)> = band
            .columns
            .iter()
            .filter(|c| c.x < *xb && &c.x + &c.side > *xa)
            .map(|c| (c.y.clone(), &c.y + &c.side))
            .collect();
        taken.sort();
        let mut y = Rational::zero();
        let mut push = |from: &Rational, to: &Rational| {
            if to > from {
                out.push(Region {
                    origin: [xa.clone(), from.clone(), band.z.clone()],
                    length: xb - xa,
                    width: to - from,
                    height: Some(band.height.clone()),
                });
            }
        };
        for (y0, y1) in taken {
            push(&y, &y0);
            if y1 > y {
                y = y1;
            }
        }
        push(&y, &Rational::one());
    }
    out
}
