//! Lower-bound certificate for a segment packing.

use num_traits::{One, Zero};
use serde::Serialize;

use super::{Segment, SspConfig};
use crate::binpack::{solve_fbp, SizeProfile};
use crate::error::Result;
use crate::harmonic::{make_g, modified_volume, t_k, DualFeasibleFn};
use crate::model::{total_volume, Instance};
use crate::rational::{rat, serde_rational, to_f64, Rational};

/// Per-segment comparison `W(L_i^q) >= (c-1) g(w_{i+1}^q)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SegmentCheck {
    pub kind: u64,
    /// Position among the segments of this type, from 0.
    pub index: usize,
    #[serde(with = "serde_rational")]
    pub weight: Rational,
    #[serde(with = "serde_rational")]
    pub required: Rational,
}

impl SegmentCheck {
    pub fn holds(&self) -> bool {
        self.weight >= self.required
    }
}

/// Ratio row for instances whose lengths or widths are all at most `alpha`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParametricRow {
    /// The interval containing `alpha`, e.g. `(1/3, 1/2]`.
    pub alpha: String,
    pub ratio: String,
}

/// Table of asymptotic ratios for bounded lengths or widths.
const PARAMETRIC: [(i64, &str, &str); 4] = [
    (1, "(1/2, 1]", "1.691..."),
    (2, "(1/3, 1/2]", "1.423..."),
    (3, "(1/4, 1/3]", "1.302..."),
    (4, "(1/5, 1/4]", "1.234..."),
];

/// The parametric row for an instance, by the smaller of its largest length
/// and largest width. `None` when the bound falls below the table or the
/// instance is empty.
pub fn parametric_row(instance: &Instance) -> Option<ParametricRow> {
    let max_len = instance.boxes().iter().map(|b| &b.length).max()?;
    let max_wid = instance.boxes().iter().map(|b| &b.width).max()?;
    let alpha = max_len.min(max_wid);
    PARAMETRIC
        .iter()
        .find(|(t, _, _)| *alpha > rat(1, t + 1))
        .map(|(_, a, r)| ParametricRow {
            alpha: a.to_string(),
            ratio: r.to_string(),
        })
}

#[derive(Debug, Clone, Serialize)]
pub struct Certificate {
    /// Achieved height `c * bins`.
    #[serde(with = "serde_rational")]
    pub height: Rational,
    /// Highest top face in the realised packing (at most `height`).
    #[serde(with = "serde_rational")]
    pub packed_height: Rational,
    pub bins: usize,
    #[serde(with = "serde_rational")]
    pub lb_volume: Rational,
    /// `W(L) / T_k`.
    #[serde(with = "serde_rational")]
    pub lb_modified: Rational,
    #[serde(with = "serde_rational")]
    pub lower_bound: Rational,
    /// Total modified volume `W(L)`.
    #[serde(rename = "W", with = "serde_rational")]
    pub modified_volume: Rational,
    /// `G^q` for `q = 1..=k`.
    #[serde(rename = "G", serialize_with = "rational_list")]
    pub width_weights: Vec<Rational>,
    /// Fractional bin packing optimum of the segment widths.
    pub fbp: f64,
    /// `sum_j n_j pi_j` for the dual behind `g`; equals `sum_q G^q`.
    #[serde(with = "serde_rational")]
    pub fbp_dual: Rational,
    /// Segments per type.
    pub segments: Vec<usize>,
    /// `W(L) - ((c-1) sum_q G^q - c k)`; positive on every run.
    #[serde(rename = "lemma6_slack", with = "serde_rational")]
    pub aggregate_slack: Rational,
    /// Smallest `W(L_i^q) - (c-1) g(w_{i+1}^q)` over all segments.
    #[serde(with = "serde_rational")]
    pub min_segment_slack: Rational,
    #[serde(skip)]
    pub segment_checks: Vec<SegmentCheck>,
    /// Whether `c * OPT_FBP <= c (W + c k) / (c - 1)` holds for the LP value.
    pub fbp_chain: bool,
    /// `height / lower_bound`, when the bound is positive.
    pub ratio: Option<f64>,
    pub parametric: Option<ParametricRow>,
    pub config: SspConfig,
}

fn rational_list<S: serde::Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(crate::rational::format_rational))
}

impl Certificate {
    /// Every asserted inequality of the certificate.
    pub fn holds(&self) -> bool {
        self.aggregate_slack > Rational::zero()
            && self.segment_checks.iter().all(SegmentCheck::holds)
            && self.fbp_chain
            && self.lb_modified <= self.height
            && self.lb_volume <= self.packed_height
    }
}

/// Evaluates the certificate for segments created by the pipeline, listed by
/// type and then in creation order.
pub fn certify(
    instance: &Instance,
    segments: &[Segment],
    bins: usize,
    config: &SspConfig,
) -> Result<Certificate> {
    let k = config.k;
    let c = &config.c;
    let ck = c * Rational::from_integer(k.into());
    let widths: Vec<Rational> = segments.iter().map(|s| s.width.clone()).collect();
    let (g, fbp, fbp_dual) = if widths.is_empty() {
        (DualFeasibleFn::Identity, 0.0, Rational::zero())
    } else {
        let sol = solve_fbp(&SizeProfile::from_sizes(&widths)?)?;
        (make_g(&sol.dual)?, sol.objective, sol.dual_objective)
    };

    let mut width_weights = vec![Rational::zero(); k as usize];
    let mut counts = vec![0usize; k as usize];
    let mut checks = Vec::with_capacity(segments.len());
    let mut total = Rational::zero();
    let c_minus_one = c - Rational::one();
    for (pos, seg) in segments.iter().enumerate() {
        let q = seg.kind as usize;
        width_weights[q - 1] += g.eval(&seg.width);
        let mut weight = Rational::zero();
        for id in seg.box_ids() {
            let b = instance.get(id).expect("segment box in instance");
            weight += modified_volume(b, k, &g)?;
        }
        let next = segments
            .get(pos + 1)
            .filter(|s| s.kind == seg.kind)
            .map(|s| g.eval(&s.width))
            .unwrap_or_else(Rational::zero);
        checks.push(SegmentCheck {
            kind: seg.kind,
            index: counts[q - 1],
            required: &c_minus_one * next,
            weight: weight.clone(),
        });
        counts[q - 1] += 1;
        total += weight;
    }
    let g_sum: Rational = width_weights.iter().sum();
    let aggregate_slack = &total - (&c_minus_one * &g_sum - &ck);
    let min_segment_slack = checks
        .iter()
        .map(|ch| &ch.weight - &ch.required)
        .min()
        .unwrap_or_else(Rational::zero);
    let fbp_chain = fbp <= to_f64(&((&total + &ck) / &c_minus_one)) * (1.0 + 1e-9) + 1e-9;

    let height = c * Rational::from_integer(bins.into());
    let packed_height = packed_top(instance, segments, c);
    let lb_volume = total_volume(instance);
    let lb_modified = &total / t_k(k)?;
    let lower_bound = lb_volume.clone().max(lb_modified.clone());
    let ratio = (lower_bound > Rational::zero()).then(|| to_f64(&(&height / &lower_bound)));
    Ok(Certificate {
        height,
        packed_height,
        bins,
        lb_volume,
        lb_modified,
        lower_bound,
        modified_volume: total,
        width_weights,
        fbp,
        fbp_dual,
        segments: counts,
        aggregate_slack,
        min_segment_slack,
        segment_checks: checks,
        fbp_chain,
        ratio,
        parametric: parametric_row(instance),
        config: config.clone(),
    })
}

/// Highest top face among realised segments.
fn packed_top(instance: &Instance, segments: &[Segment], c: &Rational) -> Rational {
    let mut top = Rational::zero();
    for seg in segments {
        let Some((layer, _)) = &seg.origin else { continue };
        let base = c * Rational::from_integer((*layer).into());
        for (id, _, z) in seg.local_positions(instance) {
            let t = &base + z + &instance.get(id).unwrap().height;
            if t > top {
                top = t;
            }
        }
    }
    top
}
