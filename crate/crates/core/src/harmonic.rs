//! Harmonic size classes, the weighting function `f_k`, the constants `T_k`,
//! and the dual feasible functions used to define modified volume.
//!
//! A function `f` on `[0,1]` is dual feasible when `sum f(x_i) <= 1` for every
//! sequence with `sum x_i <= 1`. Three such functions are provided: the
//! scaled harmonic weight `f_k / T_k`, the step function `g` built from an
//! ordered fractional bin packing dual, and the identity.

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

use crate::binpack::DualSolution;
use crate::error::{Error, Result};
use crate::model::Box3;
use crate::rational::Rational;

/// The sequence `t_1 = 1`, `t_{i+1} = t_i (t_i + 1)`: 1, 2, 6, 42, 1806, ...
pub fn sylvester_term(i: u32) -> BigInt {
    assert!(i >= 1, "sequence is 1-indexed");
    let mut t = BigInt::one();
    for _ in 1..i {
        t = &t * (&t + 1u32);
    }
    t
}

/// `m(k)`: the index with `t_m < k <= t_{m+1}`.
pub fn sequence_index(k: u64) -> Result<u32> {
    check_k(k)?;
    let k_big = BigInt::from(k);
    let mut m = 1;
    let mut next = sylvester_term(2);
    while k_big > next {
        m += 1;
        next = &next * (&next + 1u32);
    }
    Ok(m)
}

fn check_k(k: u64) -> Result<()> {
    if k < 2 {
        return Err(Error::domain("k", k, "k >= 2"));
    }
    Ok(())
}

fn check_size(x: &Rational) -> Result<()> {
    if *x <= Rational::zero() || *x > Rational::one() {
        return Err(Error::domain("size", x, "0 < x <= 1"));
    }
    Ok(())
}

/// Parameters of the harmonic partition into `k` types.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HarmonicParams {
    k: u64,
    m: u32,
    ratio: Rational,
}

impl HarmonicParams {
    pub fn new(k: u64) -> Result<Self> {
        let m = sequence_index(k)?;
        Ok(Self {
            k,
            m,
            ratio: t_k(k)?,
        })
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn t_k(&self) -> &Rational {
        &self.ratio
    }
}

/// Type `t` with `1/(t+1) < x <= 1/t` for `t < k`, or `k` when `x <= 1/k`.
pub fn harmonic_type(x: &Rational, k: u64) -> Result<u64> {
    check_k(k)?;
    check_size(x)?;
    // x in (1/(t+1), 1/t]  <=>  t = floor(1/x)
    let t = x.recip().floor().to_integer();
    Ok(match t.to_u64() {
        Some(t) if t < k => t,
        _ => k,
    })
}

/// The harmonic weighting function.
pub fn f_k(x: &Rational, k: u64) -> Result<Rational> {
    let t = harmonic_type(x, k)?;
    if t < k {
        Ok(Rational::new(BigInt::one(), BigInt::from(t)))
    } else {
        Ok(x * Rational::new(BigInt::from(k), BigInt::from(k - 1)))
    }
}

/// `T_k = sum_{i<=m(k)} 1/t_i + (1/t_{m(k)+1}) * k/(k-1)`, exactly.
pub fn t_k(k: u64) -> Result<Rational> {
    let m = sequence_index(k)?;
    let mut total = Rational::zero();
    let mut t = BigInt::one();
    for _ in 0..m {
        total += Rational::new(BigInt::one(), t.clone());
        t = &t * (&t + 1u32);
    }
    total += Rational::new(BigInt::from(k), t * BigInt::from(k - 1));
    Ok(total)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DualFeasibleFn {
    /// `f_k(x) / T_k`.
    HarmonicScaled { k: u64, t_k: Rational },
    /// Right-open step function `g` with `g(x) = prices[j]` on
    /// `[breakpoints[j], breakpoints[j-1])`, `g = prices[0]` on `[breakpoints[0], 1]`
    /// and `g = 0` below the smallest breakpoint.
    Step {
        breakpoints: Vec<Rational>,
        prices: Vec<Rational>,
    },
    Identity,
}

impl DualFeasibleFn {
    pub fn harmonic_scaled(k: u64) -> Result<Self> {
        Ok(Self::HarmonicScaled { k, t_k: t_k(k)? })
    }

    /// Evaluates on `[0, 1]`; every variant maps `0` to `0`.
    pub fn eval(&self, x: &Rational) -> Rational {
        if x.is_zero() {
            return Rational::zero();
        }
        match self {
            Self::HarmonicScaled { k, t_k } => {
                f_k(x, *k).expect("argument inside (0, 1]") / t_k
            }
            Self::Step {
                breakpoints,
                prices,
            } => {
                // breakpoints are strictly decreasing; find the first one <= x
                let j = breakpoints.partition_point(|s| s > x);
                prices.get(j).cloned().unwrap_or_else(Rational::zero)
            }
            Self::Identity => x.clone(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::HarmonicScaled { .. } => "harmonic_scaled",
            Self::Step { .. } => "step_from_dual",
            Self::Identity => "identity",
        }
    }
}

/// Builds the step function `g` from an ordered dual solution.
pub fn make_g(dual: &DualSolution) -> Result<DualFeasibleFn> {
    let sizes = dual.sizes();
    let prices = dual.prices();
    if sizes.len() != prices.len() {
        return Err(Error::Contract(format!(
            "dual has {} sizes but {} prices",
            sizes.len(),
            prices.len()
        )));
    }
    if sizes.windows(2).any(|w| w[0] <= w[1]) {
        return Err(Error::Contract(
            "breakpoints must be strictly decreasing".into(),
        ));
    }
    if prices.windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::Contract(
            "dual prices must be nonincreasing in size order".into(),
        ));
    }
    if prices.iter().any(|p| *p < Rational::zero()) {
        return Err(Error::Contract("dual prices must be nonnegative".into()));
    }
    Ok(DualFeasibleFn::Step {
        breakpoints: sizes.to_vec(),
        prices: prices.to_vec(),
    })
}

/// `W(R) = f_k(length) * g(width) * height`.
pub fn modified_volume(b: &Box3, k: u64, g: &DualFeasibleFn) -> Result<Rational> {
    Ok(f_k(&b.length, k)? * g.eval(&b.width) * &b.height)
}

pub fn total_modified_volume<'a>(
    boxes: impl IntoIterator<Item = &'a Box3>,
    k: u64,
    g: &DualFeasibleFn,
) -> Result<Rational> {
    boxes
        .into_iter()
        .map(|b| modified_volume(b, k, g))
        .sum()
}
