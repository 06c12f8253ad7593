//! Segment-based strip packing.
//!
//! Boxes are grouped by the harmonic type of their length. Each group is
//! packed into `1 x w x c` segments (slips by Next Fit for types below `k`,
//! NFDH shelves for type `k`), the segment widths are packed as a 1D bin
//! packing instance, and every bin becomes one layer of height `c`.
//!
//! [`run_3ssp`] also produces a [`Certificate`] that evaluates the
//! modified-volume lower bound with the dual step function of the segment
//! width profile.

mod certificate;
mod segments;

pub use certificate::{certify, parametric_row, Certificate, ParametricRow, SegmentCheck};
pub use segments::{gnf_pack, gnfdh_pack, group_by_length, Segment, SegmentContents};

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::binpack::{aptas_bp, first_fit_decreasing, Bins};
use crate::error::{Error, Result};
use crate::model::{Instance, Packing, Placement};
use crate::rational::{int, rat, serde_rational, Rational};

/// 1D packer used for the segment widths.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Ffd,
    Aptas,
}

impl FromStr for Backend {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "ffd" => Ok(Self::Ffd),
            "aptas" => Ok(Self::Aptas),
            other => Err(format!("unknown backend {other:?}, expected ffd or aptas")),
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Ffd => "ffd",
            Self::Aptas => "aptas",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SspConfig {
    /// Number of harmonic types.
    pub k: u64,
    /// Segment height.
    #[serde(with = "serde_rational")]
    pub c: Rational,
    /// Accuracy of the 1D approximation scheme backend.
    #[serde(with = "serde_rational")]
    pub epsilon: Rational,
    pub backend: Backend,
}

impl Default for SspConfig {
    fn default() -> Self {
        Self {
            k: 12,
            c: int(16),
            epsilon: rat(1, 10),
            backend: Backend::Ffd,
        }
    }
}

impl SspConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k < 2 {
            return Err(Error::domain("k", self.k, "k >= 2"));
        }
        if self.c <= Rational::one() {
            return Err(Error::domain("c", &self.c, "c > 1"));
        }
        if self.epsilon <= Rational::zero() || self.epsilon > rat(1, 2) {
            return Err(Error::domain("epsilon", &self.epsilon, "0 < epsilon <= 1/2"));
        }
        Ok(())
    }
}

/// Places segments: bin `b` becomes the layer `[b c, (b+1) c)` and its
/// segments sit side by side along y. Records each segment's origin.
pub fn realize_layers(
    instance: &Instance,
    segments: &mut [Segment],
    bins: &Bins,
    c: &Rational,
) -> Result<Packing> {
    let mut placements = Vec::with_capacity(instance.len());
    let mut seen = vec![false; segments.len()];
    for (layer, bin) in bins.iter().enumerate() {
        let z0 = c * Rational::from_integer(layer.into());
        let mut y = Rational::zero();
        for &s in bin {
            if s >= segments.len() || std::mem::replace(&mut seen[s], true) {
                return Err(Error::Contract(format!("segment {s} is missing or repeated")));
            }
            let seg = &mut segments[s];
            for (id, x, z) in seg.local_positions(instance) {
                placements.push(Placement::new(id, x, y.clone(), &z0 + z));
            }
            seg.origin = Some((layer, y.clone()));
            y += &seg.width;
        }
        if y > Rational::one() {
            return Err(Error::Contract(format!("layer {layer} holds width {y} > 1")));
        }
    }
    if seen.iter().any(|s| !s) {
        return Err(Error::Contract("some segment is not assigned to a bin".into()));
    }
    Ok(Packing::from_placements(instance, placements)?)
}

/// Result of one run: the packing, its segments, and the certificate.
#[derive(Debug, Clone)]
pub struct SspRun {
    pub packing: Packing,
    pub segments: Vec<Segment>,
    pub bins: Bins,
    pub certificate: Certificate,
}

/// Packs all groups into segments, in type order.
pub fn build_segments(instance: &Instance, config: &SspConfig) -> Result<Vec<Segment>> {
    config.validate()?;
    let groups = group_by_length(instance, config.k)?;
    let mut segments = Vec::new();
    for (idx, group) in groups.iter().enumerate() {
        let q = idx as u64 + 1;
        if group.is_empty() {
            continue;
        }
        if q < config.k {
            segments.extend(gnf_pack(group, q, &config.c)?);
        } else {
            segments.extend(gnfdh_pack(group, config.k, &config.c)?);
        }
    }
    Ok(segments)
}

/// The full pipeline.
pub fn run_3ssp(instance: &Instance, config: &SspConfig) -> Result<SspRun> {
    let mut segments = build_segments(instance, config)?;
    let widths: Vec<Rational> = segments.iter().map(|s| s.width.clone()).collect();
    let bins = match config.backend {
        Backend::Ffd => first_fit_decreasing(&widths)?,
        Backend::Aptas => aptas_bp(&widths, &config.epsilon)?.bins,
    };
    let packing = realize_layers(instance, &mut segments, &bins, &config.c)?;
    let certificate = certify(instance, &segments, bins.len(), config)?;
    Ok(SspRun {
        packing,
        segments,
        bins,
        certificate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::validate_packing;

    #[test]
    fn config_domain() {
        assert!(SspConfig::default().validate().is_ok());
        let bad = SspConfig {
            c: int(1),
            ..SspConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = SspConfig {
            k: 1,
            ..SspConfig::default()
        };
        assert!(bad.validate().is_err());
        assert_eq!("aptas".parse::<Backend>().unwrap(), Backend::Aptas);
        assert!("nf".parse::<Backend>().is_err());
    }

    #[test]
    fn realize_examples() {
        let i = Instance::from_dims(vec![(int(1), rat(2, 5), rat(1, 2))]).unwrap();
        let config = SspConfig {
            c: int(2),
            ..SspConfig::default()
        };
        let run = run_3ssp(&i, &config).unwrap();
        assert_eq!(run.bins.len(), 1);
        assert_eq!(run.certificate.height, int(2));
        assert!(validate_packing(&i, &run.packing).unwrap().is_ok());

        let i = Instance::from_dims(vec![
            (int(1), rat(1, 2), int(1)),
            (int(1), rat(3, 10), int(1)),
            (int(1), rat(3, 10), int(1)),
        ])
        .unwrap();
        // c = 3/2 keeps one unit-height box per slip, so three segments.
        let config = SspConfig {
            c: rat(3, 2),
            ..SspConfig::default()
        };
        let run = run_3ssp(&i, &config).unwrap();
        assert_eq!(run.segments.len(), 3);
        assert_eq!(run.bins.len(), 2);
        assert_eq!(run.certificate.height, int(3));
        assert!(validate_packing(&i, &run.packing).unwrap().is_ok());

        let run = run_3ssp(&Instance::default(), &config).unwrap();
        assert_eq!(run.certificate.height, int(0));
        assert!(run.packing.is_empty());
    }

    #[test]
    fn realize_rejects_overfull_bins() {
        let i = Instance::from_dims(vec![(int(1), rat(3, 5), int(1)); 2]).unwrap();
        let config = SspConfig {
            c: rat(3, 2),
            ..SspConfig::default()
        };
        let mut segs = build_segments(&i, &config).unwrap();
        assert_eq!(segs.len(), 2);
        let err = realize_layers(&i, &mut segs, &vec![vec![0, 1]], &config.c);
        assert!(matches!(err, Err(Error::Contract(_))));
    }

    #[test]
    fn aptas_backend_is_valid() {
        let i = Instance::from_dims((0..40).map(|j| {
            (rat(1 + j % 9, 10), rat(1 + (j * 3) % 10, 10), rat(1 + (j * 7) % 10, 10))
        }))
        .unwrap();
        let config = SspConfig {
            backend: Backend::Aptas,
            epsilon: rat(1, 4),
            c: int(4),
            k: 5,
        };
        let run = run_3ssp(&i, &config).unwrap();
        assert!(validate_packing(&i, &run.packing).unwrap().is_ok());
        assert!(run.certificate.holds());
    }
}
