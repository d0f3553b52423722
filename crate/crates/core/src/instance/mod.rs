//! Flight gate assignment instances.
//!
//! Flights occupy a gate from arrival `t_in` until departure `t_out` plus a
//! buffer `t_buf`. Passengers walk from the gate to baggage claim (arriving),
//! from check-in to the gate (departing), or between two gates (transfer).
//! The objective is the total walking time of all passengers.

mod extract;
mod generate;
mod io;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

pub use extract::{
    component_members, connected_components, drop_no_transfer_flights, random_cut, split_long_stays,
    SplitOptions, DEFAULT_SPLIT_THRESHOLD, DEFAULT_TURNAROUND_GAP,
};
pub use generate::{generate, GeneratorParams};
pub use io::InstanceDocument;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Flight {
    pub id: String,
    /// Arrival timestamp, minutes since schedule start.
    pub t_in: i64,
    /// Departure timestamp, minutes since schedule start.
    pub t_out: i64,
    pub n_arr: u32,
    pub n_dep: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    pub id: String,
    /// Minutes from the gate to baggage claim.
    pub t_arr: f64,
    /// Minutes from check-in to the gate.
    pub t_dep: f64,
}

/// A complete flight gate assignment instance.
///
/// `n_trans` and `t_gate` are dense square matrices, symmetric with a zero
/// diagonal. The transfer term of the objective sums over all ordered flight
/// pairs, so every unordered transfer pair contributes twice.
#[derive(Debug, Clone, PartialEq)]
pub struct FlightGateInstance {
    pub flights: Vec<Flight>,
    pub gates: Vec<Gate>,
    pub n_trans: Vec<Vec<u32>>,
    pub t_gate: Vec<Vec<f64>>,
    pub t_buf: i64,
}

/// Total map from flights to gates.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Assignment {
    pub gate_of: Vec<usize>,
}

impl Assignment {
    pub fn new(gate_of: Vec<usize>) -> Self {
        Self { gate_of }
    }

    /// Binary encoding, row-major over (flight, gate).
    pub fn to_binary(&self, num_gates: usize) -> Vec<u8> {
        let mut x = vec![0u8; self.gate_of.len() * num_gates];
        for (i, &g) in self.gate_of.iter().enumerate() {
            x[i * num_gates + g] = 1;
        }
        x
    }

    /// Decodes a binary state; `None` unless every flight has exactly one gate.
    pub fn from_binary(x: &[u8], num_flights: usize, num_gates: usize) -> Option<Self> {
        if x.len() != num_flights * num_gates {
            return None;
        }
        let mut gate_of = Vec::with_capacity(num_flights);
        for row in x.chunks(num_gates) {
            let mut active = row.iter().enumerate().filter(|(_, &v)| v != 0);
            let (g, _) = active.next()?;
            if active.next().is_some() {
                return None;
            }
            gate_of.push(g);
        }
        Some(Self { gate_of })
    }
}

/// How flights with identical arrival times are treated.
///
/// The strict predicate `t_in[i] < t_in[j] < t_out[i] + t_buf` never marks
/// two flights arriving at the same minute as conflicting.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TieRule {
    #[default]
    Strict,
    /// Also forbid `(i, j)`, `i < j`, when `t_in[i] == t_in[j]`.
    ConflictOnTies,
}

/// Ordered flight pairs that may not share a gate.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ForbiddenPairs {
    pub pairs: BTreeSet<(usize, usize)>,
}

impl ForbiddenPairs {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.pairs.contains(&(i, j))
    }

    /// True when the two flights conflict in either order.
    pub fn conflict(&self, i: usize, j: usize) -> bool {
        self.contains(i, j) || self.contains(j, i)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.pairs.iter().copied()
    }

    /// Symmetric conflict lists per flight.
    pub fn adjacency(&self, num_flights: usize) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); num_flights];
        for &(i, j) in &self.pairs {
            adj[i].push(j);
            adj[j].push(i);
        }
        for a in &mut adj {
            a.sort_unstable();
            a.dedup();
        }
        adj
    }
}

impl FlightGateInstance {
    pub fn num_flights(&self) -> usize {
        self.flights.len()
    }

    pub fn num_gates(&self) -> usize {
        self.gates.len()
    }

    /// Number of binary variables of the QUBO encoding.
    pub fn num_vars(&self) -> usize {
        self.num_flights() * self.num_gates()
    }

    /// Cost of the linear (arrival and departure) part when flight `i` uses gate `g`.
    pub fn linear_cost(&self, i: usize, g: usize) -> f64 {
        let f = &self.flights[i];
        let gate = &self.gates[g];
        f64::from(f.n_arr) * gate.t_arr + f64::from(f.n_dep) * gate.t_dep
    }

    /// Row sum of the transfer matrix for flight `i`.
    pub fn transfer_degree(&self, i: usize) -> u64 {
        self.n_trans[i].iter().map(|&n| u64::from(n)).sum()
    }

    /// Unordered transfer edges `(i, j, n)` with `i < j` and `n > 0`.
    pub fn transfer_edges(&self) -> Vec<(usize, usize, u32)> {
        let mut edges = Vec::new();
        for (i, row) in self.n_trans.iter().enumerate() {
            for (j, &n) in row.iter().enumerate().skip(i + 1) {
                if n > 0 {
                    edges.push((i, j, n));
                }
            }
        }
        edges
    }

    /// Lists every violated structural invariant; empty means valid.
    pub fn validate(&self) -> Vec<String> {
        let mut issues = Vec::new();
        let nf = self.num_flights();
        let ng = self.num_gates();

        if self.t_buf < 0 {
            issues.push(format!("t_buf must be nonnegative, got {}", self.t_buf));
        }
        for (i, f) in self.flights.iter().enumerate() {
            if f.t_in >= f.t_out {
                issues.push(format!("t_in < t_out violated for flight {i}"));
            }
        }
        for (a, g) in self.gates.iter().enumerate() {
            if !(g.t_arr.is_finite() && g.t_arr > 0.0) {
                issues.push(format!("t_arr must be positive and finite for gate {a}"));
            }
            if !(g.t_dep.is_finite() && g.t_dep > 0.0) {
                issues.push(format!("t_dep must be positive and finite for gate {a}"));
            }
        }

        if self.n_trans.len() != nf || self.n_trans.iter().any(|r| r.len() != nf) {
            issues.push(format!("n_trans must be {nf}x{nf}"));
        } else {
            for i in 0..nf {
                if self.n_trans[i][i] != 0 {
                    issues.push(format!("n_trans diagonal nonzero for flight {i}"));
                }
                for j in (i + 1)..nf {
                    if self.n_trans[i][j] != self.n_trans[j][i] {
                        issues.push(format!("n_trans not symmetric at ({i}, {j})"));
                    }
                }
            }
        }

        if self.t_gate.len() != ng || self.t_gate.iter().any(|r| r.len() != ng) {
            issues.push(format!("t_gate must be {ng}x{ng}"));
        } else {
            for a in 0..ng {
                if self.t_gate[a][a] != 0.0 {
                    issues.push(format!("t_gate diagonal nonzero for gate {a}"));
                }
                for b in 0..ng {
                    let t = self.t_gate[a][b];
                    if !(t.is_finite() && t >= 0.0) {
                        issues.push(format!("t_gate[{a}][{b}] must be finite and nonnegative"));
                    }
                    if b > a && t != self.t_gate[b][a] {
                        issues.push(format!("t_gate not symmetric at ({a}, {b})"));
                    }
                }
            }
        }
        issues
    }

    pub fn ensure_valid(&self) -> crate::Result<()> {
        let issues = self.validate();
        if issues.is_empty() {
            Ok(())
        } else {
            Err(crate::Error::InvalidInstance(issues))
        }
    }

    pub fn forbidden_pairs(&self) -> ForbiddenPairs {
        self.forbidden_pairs_with(TieRule::Strict)
    }

    pub fn forbidden_pairs_with(&self, rule: TieRule) -> ForbiddenPairs {
        let mut pairs = BTreeSet::new();
        for (i, fi) in self.flights.iter().enumerate() {
            let blocked_until = fi.t_out + self.t_buf;
            for (j, fj) in self.flights.iter().enumerate() {
                if i == j {
                    continue;
                }
                let overlap = fi.t_in < fj.t_in && fj.t_in < blocked_until;
                let tie = rule == TieRule::ConflictOnTies && i < j && fi.t_in == fj.t_in;
                if overlap || tie {
                    pairs.insert((i, j));
                }
            }
        }
        ForbiddenPairs { pairs }
    }

    /// Total passenger walking time of an assignment.
    pub fn total_transit_time(&self, assignment: &Assignment) -> f64 {
        let g = &assignment.gate_of;
        let linear: f64 = (0..self.num_flights())
            .map(|i| self.linear_cost(i, g[i]))
            .sum();
        let mut transfer = 0.0;
        for (i, row) in self.n_trans.iter().enumerate() {
            for (j, &n) in row.iter().enumerate() {
                if n > 0 {
                    transfer += f64::from(n) * self.t_gate[g[i]][g[j]];
                }
            }
        }
        linear + transfer
    }

    pub fn is_feasible(&self, assignment: &Assignment) -> bool {
        self.is_feasible_with(assignment, &self.forbidden_pairs())
    }

    pub fn is_feasible_with(&self, assignment: &Assignment, pairs: &ForbiddenPairs) -> bool {
        assignment.gate_of.len() == self.num_flights()
            && assignment.gate_of.iter().all(|&g| g < self.num_gates())
            && pairs
                .iter()
                .all(|(i, j)| assignment.gate_of[i] != assignment.gate_of[j])
    }

    /// Greedy gate assignment in arrival order; a feasibility witness when it succeeds.
    pub fn greedy_assignment(&self) -> Option<Assignment> {
        let pairs = self.forbidden_pairs();
        let adj = pairs.adjacency(self.num_flights());
        let mut order: Vec<usize> = (0..self.num_flights()).collect();
        order.sort_by_key(|&i| (self.flights[i].t_in, i));
        let mut gate_of = vec![usize::MAX; self.num_flights()];
        for &i in &order {
            let used: BTreeSet<usize> = adj[i]
                .iter()
                .filter(|&&j| gate_of[j] != usize::MAX)
                .map(|&j| gate_of[j])
                .collect();
            gate_of[i] = (0..self.num_gates()).find(|g| !used.contains(g))?;
        }
        Some(Assignment { gate_of })
    }

    /// Sub-instance induced by `flights` (kept in the given order); gates unchanged.
    pub fn induced(&self, flights: &[usize]) -> Self {
        Self {
            flights: flights.iter().map(|&i| self.flights[i].clone()).collect(),
            gates: self.gates.clone(),
            n_trans: flights
                .iter()
                .map(|&i| flights.iter().map(|&j| self.n_trans[i][j]).collect())
                .collect(),
            t_gate: self.t_gate.clone(),
            t_buf: self.t_buf,
        }
    }

    /// Sub-instance keeping only the listed gates (in the given order).
    pub fn with_gates(&self, gates: &[usize]) -> Self {
        Self {
            flights: self.flights.clone(),
            gates: gates.iter().map(|&a| self.gates[a].clone()).collect(),
            n_trans: self.n_trans.clone(),
            t_gate: gates
                .iter()
                .map(|&a| gates.iter().map(|&b| self.t_gate[a][b]).collect())
                .collect(),
            t_buf: self.t_buf,
        }
    }

    /// True when every passenger count and time is an integer.
    pub fn is_integral(&self) -> bool {
        self.gates
            .iter()
            .all(|g| g.t_arr.fract() == 0.0 && g.t_dep.fract() == 0.0)
            && self.t_gate.iter().flatten().all(|t| t.fract() == 0.0)
    }
}
