//! Bisection for the smallest penalty weight whose QUBO minimizer is feasible.
//!
//! Raising a weight only raises the energy of states violating that
//! constraint, so validity is monotone in each weight and bisection applies
//! one weight at a time with the other held fixed.

use serde::{Deserialize, Serialize};

use super::enumerate::{exact_qubo_min_capped, DEFAULT_ENUM_CAP};
use super::exact::{exact_assignment, penalized_minimum};
use crate::instance::{Assignment, FlightGateInstance};
use crate::qubo::{compile, worst_case_weights, PenaltyWeights};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PenaltyKind {
    One,
    Not,
}

fn weights_for(which: PenaltyKind, value: f64, other: f64, epsilon: f64) -> PenaltyWeights {
    match which {
        PenaltyKind::One => PenaltyWeights {
            lambda_one: value,
            lambda_not: other,
            epsilon,
        },
        PenaltyKind::Not => PenaltyWeights {
            lambda_one: other,
            lambda_not: value,
            epsilon,
        },
    }
}

/// Whether the exact minimizer of the compiled QUBO is a feasible assignment.
///
/// Up to `cap` variables the QUBO is enumerated and its (lexicographically
/// first) minimizer decoded. Beyond that, the penalized minimum from
/// branch-and-bound is compared with the constrained optimum.
pub fn minimizer_is_feasible(
    inst: &FlightGateInstance,
    weights: &PenaltyWeights,
    cap: usize,
) -> Result<bool> {
    if inst.num_vars() <= cap {
        let q = compile(inst, weights);
        let (x, _) = exact_qubo_min_capped(&q, cap)?;
        Ok(Assignment::from_binary(&x, inst.num_flights(), inst.num_gates())
            .is_some_and(|a| inst.is_feasible(&a)))
    } else {
        let constrained = exact_assignment(inst)?.objective;
        let pm = penalized_minimum(inst, weights)?;
        let slack = 1e-9 * constrained.abs().max(1.0);
        Ok(pm.feasible || constrained <= pm.energy + slack)
    }
}

/// 1 for integral data and integral start, otherwise 1% of the start value.
pub fn default_tolerance(inst: &FlightGateInstance, hi_start: f64) -> f64 {
    if inst.is_integral() && hi_start.fract() == 0.0 {
        1.0
    } else {
        1e-2 * hi_start.abs().max(f64::MIN_POSITIVE)
    }
}

/// Smallest valid weight for one constraint, up to `tol`.
///
/// Returns the valid end of the final interval `[lo, hi]`, `hi - lo <= tol`;
/// `lo` starts at zero and is invalid unless zero itself is valid, in which
/// case zero is returned. Integral starts with `tol >= 1` bisect on integers.
pub fn bisect_penalty(
    inst: &FlightGateInstance,
    which: PenaltyKind,
    fixed_other: f64,
    hi_start: f64,
    tol: f64,
) -> Result<f64> {
    bisect_penalty_capped(inst, which, fixed_other, hi_start, tol, DEFAULT_ENUM_CAP)
}

pub fn bisect_penalty_capped(
    inst: &FlightGateInstance,
    which: PenaltyKind,
    fixed_other: f64,
    hi_start: f64,
    tol: f64,
    cap: usize,
) -> Result<f64> {
    if !(tol > 0.0) || !(hi_start >= 0.0) {
        return Err(Error::InvalidParams(format!(
            "bisection needs tol > 0 and hi >= 0, got tol={tol} hi={hi_start}"
        )));
    }
    let valid = |v: f64| minimizer_is_feasible(inst, &weights_for(which, v, fixed_other, 0.0), cap);
    if !valid(hi_start)? {
        return Err(Error::InvalidStart(hi_start));
    }
    if valid(0.0)? {
        return Ok(0.0);
    }
    let integral = tol >= 1.0 && hi_start.fract() == 0.0;
    let (mut lo, mut hi) = (0.0f64, hi_start);
    while hi - lo > tol {
        let mid = if integral {
            ((lo + hi) / 2.0).floor()
        } else {
            0.5 * (lo + hi)
        };
        if valid(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Minimal weights found by sequential bisection: first `λ_not` with
/// `λ_one` at its worst-case value, then `λ_one` with the bisected `λ_not`.
/// The returned pair is valid jointly.
pub fn tune_penalties(inst: &FlightGateInstance, epsilon: f64) -> Result<PenaltyWeights> {
    tune_penalties_capped(inst, epsilon, DEFAULT_ENUM_CAP)
}

/// [`tune_penalties`] with an explicit enumeration cap for the feasibility oracle.
pub fn tune_penalties_capped(
    inst: &FlightGateInstance,
    epsilon: f64,
    cap: usize,
) -> Result<PenaltyWeights> {
    let wc = worst_case_weights(inst, epsilon);
    let tol_not = default_tolerance(inst, wc.lambda_not);
    let lambda_not =
        bisect_penalty_capped(inst, PenaltyKind::Not, wc.lambda_one, wc.lambda_not, tol_not, cap)?;
    let tol_one = default_tolerance(inst, wc.lambda_one);
    let lambda_one =
        bisect_penalty_capped(inst, PenaltyKind::One, lambda_not, wc.lambda_one, tol_one, cap)?;
    Ok(PenaltyWeights {
        lambda_one,
        lambda_not,
        epsilon,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::tests::{flight, gate};
    use crate::instance::{generate, GeneratorParams};

    #[test]
    fn redundant_constraint_gives_zero() {
        // flights never overlap, so the no-overlap penalty is redundant
        let inst = FlightGateInstance {
            flights: vec![flight("a", 0, 10, 3, 2), flight("b", 100, 110, 1, 4)],
            gates: vec![gate("x", 1.0, 2.0), gate("y", 2.0, 1.0)],
            n_trans: vec![vec![0, 2], vec![2, 0]],
            t_gate: vec![vec![0.0, 3.0], vec![3.0, 0.0]],
            t_buf: 5,
        };
        let wc = worst_case_weights(&inst, 1.0);
        let v = bisect_penalty(&inst, PenaltyKind::Not, wc.lambda_one, wc.lambda_not, 1.0).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn boundary_witness_and_dominance() {
        for seed in 0..12 {
            let inst = generate(seed, 4, 3, &GeneratorParams::default()).unwrap();
            let wc = worst_case_weights(&inst, 1.0);
            for which in [PenaltyKind::One, PenaltyKind::Not] {
                let (other, hi) = match which {
                    PenaltyKind::One => (wc.lambda_not, wc.lambda_one),
                    PenaltyKind::Not => (wc.lambda_one, wc.lambda_not),
                };
                let v = bisect_penalty(&inst, which, other, hi, 1.0).unwrap();
                assert!(v <= hi);
                let ok = |x| minimizer_is_feasible(&inst, &weights_for(which, x, other, 1.0), 26).unwrap();
                assert!(ok(v));
                if v > 0.0 {
                    assert!(!ok(v - 1.0), "seed {seed} {which:?}: {v} - 1 still valid");
                }
            }
        }
    }

    #[test]
    fn invalid_start_is_rejected() {
        let inst = generate(1, 4, 3, &GeneratorParams::default()).unwrap();
        let wc = worst_case_weights(&inst, 1.0);
        let res = bisect_penalty(&inst, PenaltyKind::One, wc.lambda_not, 0.0, 1.0);
        assert!(matches!(res, Err(Error::InvalidStart(_))));
    }

    #[test]
    fn real_valued_bisection_brackets() {
        let inst = generate(5, 3, 3, &GeneratorParams::default()).unwrap();
        let wc = worst_case_weights(&inst, 0.5);
        let tol = 0.25;
        let v = bisect_penalty(&inst, PenaltyKind::One, wc.lambda_not, wc.lambda_one + 0.3, tol).unwrap();
        let ok = |x| minimizer_is_feasible(&inst, &weights_for(PenaltyKind::One, x, wc.lambda_not, 0.5), 26).unwrap();
        assert!(ok(v));
        assert!(!ok(v - tol));
    }

    #[test]
    fn oracles_agree_across_the_cap() {
        for seed in 0..10 {
            let inst = generate(seed, 4, 3, &GeneratorParams::default()).unwrap();
            let wc = worst_case_weights(&inst, 1.0);
            for f in [0.02, 0.1, 0.3, 1.0] {
                let w = wc.scaled(f, f);
                let small = minimizer_is_feasible(&inst, &w, 26).unwrap();
                let large = minimizer_is_feasible(&inst, &w, 0).unwrap();
                // the enumerator decodes one minimizer, branch-and-bound asks
                // whether any minimizer is feasible
                assert!(!small || large, "seed {seed} f {f}");
            }
        }
    }

    #[test]
    fn tuned_pair_is_jointly_valid() {
        let inst = generate(9, 4, 4, &GeneratorParams::default()).unwrap();
        let wc = worst_case_weights(&inst, 1.0);
        let t = tune_penalties(&inst, 1.0).unwrap();
        assert!(t.lambda_one <= wc.lambda_one && t.lambda_not <= wc.lambda_not);
        assert!(minimizer_is_feasible(&inst, &t, 26).unwrap());
    }
}
