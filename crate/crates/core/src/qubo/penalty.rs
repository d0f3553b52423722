use serde::{Deserialize, Serialize};

use crate::instance::FlightGateInstance;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PenaltyWeights {
    pub lambda_one: f64,
    pub lambda_not: f64,
    /// Margin added on top of the worst-case bounds.
    pub epsilon: f64,
}

impl PenaltyWeights {
    pub fn new(lambda_one: f64, lambda_not: f64, epsilon: f64) -> Result<Self> {
        for (name, v) in [
            ("lambda_one", lambda_one),
            ("lambda_not", lambda_not),
            ("epsilon", epsilon),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParams(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(Self {
            lambda_one,
            lambda_not,
            epsilon,
        })
    }

    /// Multiplies both weights by the given factors.
    pub fn scaled(&self, f_one: f64, f_not: f64) -> Self {
        Self {
            lambda_one: self.lambda_one * f_one,
            lambda_not: self.lambda_not * f_not,
            epsilon: self.epsilon,
        }
    }
}

/// The bounds `(T_one, T_not)` on the objective gain from breaking a
/// one-gate or a no-overlap constraint.
///
/// Transfers are stored symmetrically, so a transfer pair enters the QUBO
/// coupling of `x_iα` twice; both bounds carry that factor of two. The
/// minimum over `t_γβ` ranges over all gates including `γ` itself.
pub fn worst_case_bounds(inst: &FlightGateInstance) -> (f64, f64) {
    let ng = inst.num_gates();
    let row_max: Vec<f64> = inst
        .t_gate
        .iter()
        .map(|r| r.iter().copied().fold(0.0, f64::max))
        .collect();
    let row_min: Vec<f64> = inst
        .t_gate
        .iter()
        .map(|r| r.iter().copied().fold(f64::INFINITY, f64::min))
        .collect();

    let mut t_one = 0.0f64;
    let mut t_not = 0.0f64;
    for i in 0..inst.num_flights() {
        let transfers = 2.0 * inst.transfer_degree(i) as f64;
        for a in 0..ng {
            let high = inst.linear_cost(i, a) + row_max[a] * transfers;
            t_one = t_one.max(high);
            for c in 0..ng {
                let low = inst.linear_cost(i, c) + row_min[c] * transfers;
                t_not = t_not.max(high - low);
            }
        }
    }
    (t_one, t_not)
}

/// Penalty weights `T_one + ε`, `T_not + ε`, which make every global
/// minimizer of the compiled QUBO a feasible assignment.
pub fn worst_case_weights(inst: &FlightGateInstance, epsilon: f64) -> PenaltyWeights {
    let (t_one, t_not) = worst_case_bounds(inst);
    PenaltyWeights {
        lambda_one: t_one + epsilon,
        lambda_not: t_not + epsilon,
        epsilon,
    }
}

/// 1 for integral data, otherwise a thousandth of the smallest nonzero
/// objective coefficient.
pub fn default_epsilon(inst: &FlightGateInstance) -> f64 {
    if inst.is_integral() {
        return 1.0;
    }
    let zero = crate::qubo::PenaltyWeights {
        lambda_one: 0.0,
        lambda_not: 0.0,
        epsilon: 0.0,
    };
    let q = crate::qubo::compile(inst, &zero);
    let smallest = q
        .coeffs
        .values()
        .map(|v| v.abs())
        .fold(f64::INFINITY, f64::min);
    if smallest.is_finite() {
        1e-3 * smallest
    } else {
        1e-3
    }
}
