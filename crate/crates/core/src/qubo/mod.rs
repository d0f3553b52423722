//! Penalty compilation of flight gate instances to QUBO and Ising form.
//!
//! The compiled energy is
//!
//! ```text
//! q(x) = T(x) + λ_one · Σ_i (Σ_α x_iα − 1)² + λ_not · Σ_α Σ_(i,j)∈P x_iα x_jα
//! ```
//!
//! with the square expanded exactly; its constant part is kept in
//! [`Qubo::offset`] so that `q(x)` equals the reported energy.

mod ising;
mod penalty;
mod text;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::instance::{FlightGateInstance, ForbiddenPairs};

pub use ising::{coeff_ratio_ising, to_ising, IsingModel};
pub use penalty::{default_epsilon, worst_case_bounds, worst_case_weights, PenaltyWeights};
pub use text::looks_like_ising;

/// Row-major bijection between variable index and `(flight, gate)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VarMap {
    pub num_flights: usize,
    pub num_gates: usize,
}

impl VarMap {
    pub fn len(&self) -> usize {
        self.num_flights * self.num_gates
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, flight: usize, gate: usize) -> usize {
        debug_assert!(flight < self.num_flights && gate < self.num_gates);
        flight * self.num_gates + gate
    }

    pub fn flight_gate(&self, var: usize) -> (usize, usize) {
        (var / self.num_gates, var % self.num_gates)
    }
}

/// Upper-triangular quadratic form over binary variables plus a constant.
#[derive(Debug, Clone, PartialEq)]
pub struct Qubo {
    pub n: usize,
    /// `(j, k)` with `j <= k`; diagonal entries are linear terms. Never stores zeros.
    pub coeffs: BTreeMap<(usize, usize), f64>,
    pub var_map: Option<VarMap>,
    pub offset: f64,
}

impl Qubo {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            coeffs: BTreeMap::new(),
            var_map: None,
            offset: 0.0,
        }
    }

    /// Adds `value · x_j · x_k`, folding into the upper triangle.
    pub fn add(&mut self, j: usize, k: usize, value: f64) {
        assert!(j < self.n && k < self.n, "variable out of range");
        let key = if j <= k { (j, k) } else { (k, j) };
        let entry = self.coeffs.entry(key).or_insert(0.0);
        *entry += value;
        if *entry == 0.0 {
            self.coeffs.remove(&key);
        }
    }

    pub fn get(&self, j: usize, k: usize) -> f64 {
        let key = if j <= k { (j, k) } else { (k, j) };
        self.coeffs.get(&key).copied().unwrap_or(0.0)
    }

    pub fn energy(&self, x: &[u8]) -> f64 {
        debug_assert_eq!(x.len(), self.n);
        self.coeffs
            .iter()
            .filter(|(&(j, k), _)| x[j] != 0 && x[k] != 0)
            .map(|(_, &v)| v)
            .sum::<f64>()
            + self.offset
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.values().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.values().all(|v| v.fract() == 0.0) && self.offset.fract() == 0.0
    }

    /// Logical interaction graph: pairs `(j, k)`, `j < k`, with a nonzero coupling.
    pub fn interaction_edges(&self) -> Vec<(usize, usize)> {
        self.coeffs
            .keys()
            .filter(|(j, k)| j != k)
            .copied()
            .collect()
    }
}

/// Compiles `inst` with the given penalty weights.
pub fn compile(inst: &FlightGateInstance, weights: &PenaltyWeights) -> Qubo {
    compile_with_pairs(inst, weights, &inst.forbidden_pairs())
}

pub fn compile_with_pairs(
    inst: &FlightGateInstance,
    weights: &PenaltyWeights,
    pairs: &ForbiddenPairs,
) -> Qubo {
    let vm = VarMap {
        num_flights: inst.num_flights(),
        num_gates: inst.num_gates(),
    };
    let mut q = Qubo::new(vm.len());
    q.var_map = Some(vm);
    let ng = vm.num_gates;

    for i in 0..vm.num_flights {
        for a in 0..ng {
            q.add(vm.index(i, a), vm.index(i, a), inst.linear_cost(i, a));
        }
    }
    for (i, row) in inst.n_trans.iter().enumerate() {
        for (j, &n) in row.iter().enumerate() {
            if n == 0 {
                continue;
            }
            for a in 0..ng {
                for b in 0..ng {
                    let t = inst.t_gate[a][b];
                    if t != 0.0 {
                        q.add(vm.index(i, a), vm.index(j, b), f64::from(n) * t);
                    }
                }
            }
        }
    }

    // λ (Σ_α x_α − 1)² = λ (1 − Σ_α x_α + 2 Σ_{α<β} x_α x_β) for binary x
    let lo = weights.lambda_one;
    if lo != 0.0 {
        for i in 0..vm.num_flights {
            for a in 0..ng {
                q.add(vm.index(i, a), vm.index(i, a), -lo);
                for b in (a + 1)..ng {
                    q.add(vm.index(i, a), vm.index(i, b), 2.0 * lo);
                }
            }
            q.offset += lo;
        }
    }

    let ln = weights.lambda_not;
    if ln != 0.0 {
        for (i, j) in pairs.iter() {
            for a in 0..ng {
                q.add(vm.index(i, a), vm.index(j, a), ln);
            }
        }
    }
    q
}

/// Coefficient dynamic range `max |Q| / min |Q|` over nonzero entries.
pub fn coeff_ratio_qubo(q: &Qubo) -> crate::Result<f64> {
    magnitude_ratio(q.coeffs.values().copied()).ok_or(crate::Error::EmptyModel)
}

pub(crate) fn magnitude_ratio(values: impl IntoIterator<Item = f64>) -> Option<f64> {
    let (lo, hi) = values
        .into_iter()
        .filter(|v| *v != 0.0)
        .map(f64::abs)
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), v| (lo.min(v), hi.max(v)));
    (hi > 0.0).then(|| hi / lo)
}
