//! Fractional bin packing by column generation.
//!
//! Master program: `min sum x_i` over pattern columns with one covering row
//! per distinct size. The master also carries one zero-cost "substitution"
//! column per adjacent size pair (`-1` on row `j`, `+1` on row `j+1`: a slot
//! for a size-`j` item may hold a smaller size-`j+1` item). Those columns do
//! not change the optimum, since patterns are closed under shrinking items,
//! but their reduced costs force `pi_j >= pi_{j+1}` at every optimal basis,
//! so the returned dual is ordered by construction.

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

use super::knapsack::solve_unbounded;
use super::{DualSolution, Pattern, SizeProfile};
use crate::error::{Error, Result};
use crate::lp::{LinearProgram, LpStatus, Simplex};
use crate::rational::{from_f64_exact, scale_to_integers, to_f64, Rational};

const PRICING_TOL: f64 = 1e-9;
const MAX_ROUNDS: usize = 20_000;

#[derive(Debug, Clone)]
pub struct FbpSolution {
    /// Optimal value of the pattern program.
    pub objective: f64,
    /// Ordered, exactly feasible dual (checked against every feasible pattern).
    pub dual: DualSolution,
    /// `sum_j n_j pi_j` for the returned dual.
    pub dual_objective: Rational,
    /// Factor the floating-point dual was divided by to make it exactly feasible (`>= 1`).
    pub dual_rescale: Rational,
    pub patterns: Vec<Pattern>,
    /// Fractional usage of each pattern.
    pub usage: Vec<f64>,
    pub pricing_rounds: usize,
}

/// Integer weights for the profile sizes plus the bin capacity.
///
/// When the sizes share no manageable common denominator the weights are
/// rounded down, which only enlarges the set of admissible patterns.
struct Weights {
    weights: Vec<i128>,
    capacity: i128,
    exact: bool,
}

fn pattern_weights(sizes: &[Rational]) -> Weights {
    let mut with_one = sizes.to_vec();
    with_one.push(Rational::one());
    if let Some((ints, _)) = scale_to_integers(&with_one, 24) {
        let capacity = *ints.last().unwrap();
        return Weights {
            weights: ints[..sizes.len()].to_vec(),
            capacity,
            exact: true,
        };
    }
    let scale = Rational::from_integer(BigInt::one() << 40);
    let weights = sizes
        .iter()
        .map(|s| (s * &scale).floor().to_integer().to_i128().unwrap().max(1))
        .collect();
    Weights {
        weights,
        capacity: 1i128 << 40,
        exact: false,
    }
}

/// Exact `max sum_j v_j pi_j` over all feasible patterns `v`.
pub fn max_pattern_value(sizes: &[Rational], prices: &[Rational]) -> Rational {
    let w = pattern_weights(sizes);
    solve_unbounded(&w.weights, prices, w.capacity).0
}

fn repair(pattern: &mut Pattern, sizes: &[Rational]) {
    while !pattern.is_feasible(sizes) {
        let j = pattern
            .counts
            .iter()
            .rposition(|&c| c > 0)
            .expect("non-empty infeasible pattern");
        pattern.counts[j] -= 1;
    }
}

/// Solves the fractional bin packing program of a profile.
pub fn solve_fbp(profile: &SizeProfile) -> Result<FbpSolution> {
    let p = profile.len();
    if p == 0 {
        return Ok(FbpSolution {
            objective: 0.0,
            dual: DualSolution::default(),
            dual_objective: Rational::zero(),
            dual_rescale: Rational::one(),
            patterns: Vec::new(),
            usage: Vec::new(),
            pricing_rounds: 0,
        });
    }
    let sizes = profile.sizes();
    let weights = pattern_weights(sizes);

    let mut patterns: Vec<Pattern> = Vec::new();
    let mut columns: Vec<Vec<f64>> = Vec::new();
    let mut costs = Vec::new();
    for (j, s) in sizes.iter().enumerate() {
        let mut counts = vec![0u64; p];
        counts[j] = s.recip().floor().to_integer().to_u64().unwrap();
        columns.push(counts.iter().map(|&c| c as f64).collect());
        costs.push(1.0);
        patterns.push(Pattern { counts });
    }
    let substitution_start = columns.len();
    for j in 0..p.saturating_sub(1) {
        let mut col = vec![0.0; p];
        col[j] = -1.0;
        col[j + 1] = 1.0;
        columns.push(col);
        costs.push(0.0);
    }
    let rows: Vec<Vec<f64>> = (0..p)
        .map(|i| columns.iter().map(|c| c[i]).collect())
        .collect();
    let rhs: Vec<f64> = profile.counts().iter().map(|&n| n as f64).collect();
    let program = LinearProgram::new(costs, rows, rhs)?;
    let mut simplex = Simplex::new(&program);
    // Maps primal column index -> pattern index for generated patterns.
    let mut pattern_columns: Vec<usize> = (0..p).collect();

    let mut rounds = 0;
    loop {
        let status = simplex.solve();
        if status != LpStatus::Optimal {
            return Err(Error::Invariant(format!(
                "pattern master program ended {status:?}"
            )));
        }
        rounds += 1;
        if rounds > MAX_ROUNDS {
            return Err(Error::Invariant(
                "column generation did not converge".into(),
            ));
        }
        let duals: Vec<f64> = simplex
            .solution()
            .dual
            .iter()
            .map(|&d| d.max(0.0))
            .collect();
        let (value, counts) = solve_unbounded(&weights.weights, &duals, weights.capacity);
        if value <= 1.0 + PRICING_TOL {
            break;
        }
        let mut pattern = Pattern { counts };
        if !weights.exact {
            repair(&mut pattern, sizes);
            let repaired: f64 = pattern
                .counts
                .iter()
                .zip(&duals)
                .map(|(&c, d)| c as f64 * d)
                .sum();
            if repaired <= 1.0 + PRICING_TOL {
                break;
            }
        }
        if patterns.contains(&pattern) {
            break;
        }
        let col: Vec<f64> = pattern.counts.iter().map(|&c| c as f64).collect();
        let index = simplex.add_column(1.0, &col);
        pattern_columns.push(index);
        patterns.push(pattern);
    }

    let solution = simplex.solution();
    let usage: Vec<f64> = pattern_columns.iter().map(|&c| solution.primal[c]).collect();
    debug_assert!(substitution_start == p);

    // Order and certify the dual exactly.
    let mut prices: Vec<f64> = solution.dual.iter().map(|&d| d.max(0.0)).collect();
    for j in (0..p.saturating_sub(1)).rev() {
        prices[j] = prices[j].max(prices[j + 1]);
    }
    let mut exact: Vec<Rational> = prices.iter().map(|&d| from_f64_exact(d)).collect();
    let best = max_pattern_value(sizes, &exact);
    let rescale = if best > Rational::one() {
        for price in &mut exact {
            *price /= &best;
        }
        best
    } else {
        Rational::one()
    };
    let dual = DualSolution::new(sizes.to_vec(), exact);
    let dual_objective = dual.objective(profile.counts());
    let gap = (to_f64(&dual_objective) - solution.objective).abs();
    if gap > 1e-6 * solution.objective.max(1.0) {
        return Err(Error::Invariant(format!(
            "dual objective {} differs from primal {} by {gap:e}",
            to_f64(&dual_objective),
            solution.objective
        )));
    }
    Ok(FbpSolution {
        objective: solution.objective,
        dual,
        dual_objective,
        dual_rescale: rescale,
        patterns,
        usage,
        pricing_rounds: rounds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    /// Every feasible pattern of a small profile, for brute-force checks.
    fn all_patterns(sizes: &[Rational]) -> Vec<Vec<u64>> {
        fn rec(j: usize, room: Rational, sizes: &[Rational], cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
            if j == sizes.len() {
                out.push(cur.clone());
                return;
            }
            let mut k = 0u64;
            let mut left = room.clone();
            loop {
                cur.push(k);
                rec(j + 1, left.clone(), sizes, cur, out);
                cur.pop();
                if left < sizes[j] {
                    break;
                }
                left -= &sizes[j];
                k += 1;
            }
        }
        let mut out = Vec::new();
        rec(0, int(1), sizes, &mut Vec::new(), &mut out);
        out
    }

    fn full_enumeration_value(profile: &SizeProfile) -> f64 {
        let pats: Vec<Vec<u64>> = all_patterns(profile.sizes())
            .into_iter()
            .filter(|v| v.iter().any(|&c| c > 0))
            .collect();
        let rows = (0..profile.len())
            .map(|j| pats.iter().map(|v| v[j] as f64).collect())
            .collect();
        let rhs = profile.counts().iter().map(|&n| n as f64).collect();
        let lp = LinearProgram::new(vec![1.0; pats.len()], rows, rhs).unwrap();
        crate::lp::solve_lp(&lp).objective
    }

    #[test]
    fn halves() {
        let profile = SizeProfile::new(vec![(rat(1, 2), 2)]).unwrap();
        let sol = solve_fbp(&profile).unwrap();
        assert!((sol.objective - 1.0).abs() < 1e-9);
        assert_eq!(sol.dual.prices(), &[rat(1, 2)]);
    }

    #[test]
    fn unit_items() {
        let profile = SizeProfile::new(vec![(int(1), 7)]).unwrap();
        let sol = solve_fbp(&profile).unwrap();
        assert!((sol.objective - 7.0).abs() < 1e-9);
    }

    #[test]
    fn mixed_profile_matches_full_enumeration() {
        let profile = SizeProfile::new(vec![(rat(6, 10), 2), (rat(4, 10), 2)]).unwrap();
        let sol = solve_fbp(&profile).unwrap();
        assert!((full_enumeration_value(&profile) - 2.0).abs() < 1e-9);
        assert!((sol.objective - 2.0).abs() < 1e-9);
        assert!(sol.dual.is_ordered());
        assert!(max_pattern_value(profile.sizes(), sol.dual.prices()) <= int(1));
    }

    #[test]
    fn dual_is_ordered_and_feasible_on_awkward_profiles() {
        let cases = vec![
            vec![(rat(51, 100), 3), (rat(26, 100), 5), (rat(23, 100), 4)],
            vec![(rat(7, 10), 1), (rat(3, 10), 9), (rat(1, 10), 2)],
            vec![(rat(1, 3), 4), (rat(1, 4), 3), (rat(1, 5), 2), (rat(1, 7), 8)],
        ];
        for pairs in cases {
            let profile = SizeProfile::new(pairs).unwrap();
            let sol = solve_fbp(&profile).unwrap();
            let brute = full_enumeration_value(&profile);
            assert!((sol.objective - brute).abs() < 1e-6 * brute.max(1.0));
            assert!(sol.dual.is_ordered());
            assert!(max_pattern_value(profile.sizes(), sol.dual.prices()) <= int(1));
            assert!((to_f64(&sol.dual_objective) - sol.objective).abs() < 1e-6);
            for pat in &sol.patterns {
                assert!(pat.is_feasible(profile.sizes()));
            }
        }
    }

    #[test]
    fn empty_profile() {
        let sol = solve_fbp(&SizeProfile::new(vec![]).unwrap()).unwrap();
        assert_eq!(sol.objective, 0.0);
        assert!(sol.dual.prices().is_empty());
    }
}
