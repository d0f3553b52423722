//! Depth-first branch-and-bound over flights in arrival order.
//!
//! Each node keeps, for every unassigned flight and gate, the cost that
//! flight would add given the flights placed so far (its arrival/departure
//! time plus transfers to placed flights). Transfer times are nonnegative,
//! so the sum over unassigned flights of their cheapest admissible gate is
//! a valid lower bound.

use crate::instance::{Assignment, FlightGateInstance};
use crate::qubo::PenaltyWeights;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ExactResult {
    pub assignment: Assignment,
    pub objective: f64,
    /// False when the node limit stopped the search early.
    pub proven_optimal: bool,
    pub nodes_explored: u64,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ExactOptions {
    pub node_limit: Option<u64>,
}

/// Minimum of the penalized objective over states with at most one gate per flight.
#[derive(Debug, Clone, PartialEq)]
pub struct PenalizedMinimum {
    pub energy: f64,
    /// `None` for a flight without a gate.
    pub gate_of: Vec<Option<usize>>,
    pub feasible: bool,
    pub nodes_explored: u64,
}

struct Search<'a> {
    inst: &'a FlightGateInstance,
    order: Vec<usize>,
    conflicts: Vec<Vec<usize>>,
    /// `partial[i][g]`: cost added by placing flight `i` at gate `g` now.
    partial: Vec<Vec<f64>>,
    /// `blocked[i][g]`: placed flights conflicting with `i` at gate `g`.
    blocked: Vec<Vec<u32>>,
    gate_of: Vec<Option<usize>>,
    placed: Vec<bool>,
    /// `Some` for the penalized objective.
    penalty: Option<PenaltyWeights>,
    best: f64,
    best_gates: Option<Vec<Option<usize>>>,
    nodes: u64,
    node_limit: Option<u64>,
    aborted: bool,
}

impl<'a> Search<'a> {
    fn new(inst: &'a FlightGateInstance, penalty: Option<PenaltyWeights>, limit: Option<u64>) -> Self {
        let nf = inst.num_flights();
        let ng = inst.num_gates();
        let mut order: Vec<usize> = (0..nf).collect();
        order.sort_by_key(|&i| (inst.flights[i].t_in, i));
        Self {
            inst,
            order,
            conflicts: inst.forbidden_pairs().adjacency(nf),
            partial: (0..nf)
                .map(|i| (0..ng).map(|g| inst.linear_cost(i, g)).collect())
                .collect(),
            blocked: vec![vec![0; ng]; nf],
            gate_of: vec![None; nf],
            placed: vec![false; nf],
            penalty,
            best: f64::INFINITY,
            best_gates: None,
            nodes: 0,
            node_limit: limit,
            aborted: false,
        }
    }

    /// Cost of putting flight `i` at gate `g`, or `None` if not allowed.
    fn step_cost(&self, i: usize, g: usize) -> Option<f64> {
        let clash = self.blocked[i][g];
        match self.penalty {
            None if clash > 0 => None,
            None => Some(self.partial[i][g]),
            Some(w) => Some(self.partial[i][g] + w.lambda_not * f64::from(clash)),
        }
    }

    fn cheapest(&self, i: usize) -> Option<f64> {
        let placed = (0..self.inst.num_gates())
            .filter_map(|g| self.step_cost(i, g))
            .reduce(f64::min);
        match (placed, self.penalty) {
            (Some(c), Some(w)) => Some(c.min(w.lambda_one)),
            (None, Some(w)) => Some(w.lambda_one),
            (c, None) => c,
        }
    }

    fn lower_bound(&self, cost: f64) -> Option<f64> {
        let mut bound = cost;
        for &i in &self.order {
            if !self.placed[i] {
                bound += self.cheapest(i)?;
            }
        }
        Some(bound)
    }

    fn place(&mut self, i: usize, g: Option<usize>, sign: f64) {
        self.placed[i] = sign > 0.0;
        self.gate_of[i] = if sign > 0.0 { g } else { None };
        let Some(g) = g else { return };
        for (j, row) in self.inst.n_trans[i].iter().enumerate() {
            if *row > 0 {
                let w = 2.0 * f64::from(*row);
                for (b, p) in self.partial[j].iter_mut().enumerate() {
                    *p += sign * w * self.inst.t_gate[b][g];
                }
            }
        }
        for &j in &self.conflicts[i] {
            if sign > 0.0 {
                self.blocked[j][g] += 1;
            } else {
                self.blocked[j][g] -= 1;
            }
        }
    }

    fn dfs(&mut self, depth: usize, cost: f64) {
        if self.aborted {
            return;
        }
        self.nodes += 1;
        if self.node_limit.is_some_and(|l| self.nodes > l) {
            self.aborted = true;
            return;
        }
        if depth == self.order.len() {
            if cost < self.best {
                self.best = cost;
                self.best_gates = Some(self.gate_of.clone());
            }
            return;
        }
        match self.lower_bound(cost) {
            Some(b) if b < self.best => {}
            _ => return,
        }
        let i = self.order[depth];
        let mut options: Vec<(f64, Option<usize>)> = (0..self.inst.num_gates())
            .filter_map(|g| self.step_cost(i, g).map(|c| (c, Some(g))))
            .collect();
        if let Some(w) = self.penalty {
            options.push((w.lambda_one, None));
        }
        // cheapest first; gates before "unassigned" on ties
        options.sort_by(|a, b| {
            a.0.total_cmp(&b.0)
                .then_with(|| a.1.is_none().cmp(&b.1.is_none()))
                .then(a.1.cmp(&b.1))
        });
        for (c, g) in options {
            if cost + c >= self.best {
                continue;
            }
            self.place(i, g, 1.0);
            self.dfs(depth + 1, cost + c);
            self.place(i, g, -1.0);
        }
    }
}

/// Optimal conflict-free assignment by branch-and-bound.
pub fn exact_assignment(inst: &FlightGateInstance) -> Result<ExactResult> {
    exact_assignment_with(inst, ExactOptions::default())
}

pub fn exact_assignment_with(inst: &FlightGateInstance, opts: ExactOptions) -> Result<ExactResult> {
    inst.ensure_valid()?;
    let mut s = Search::new(inst, None, opts.node_limit);
    s.dfs(0, 0.0);
    let gates = s.best_gates.ok_or_else(|| {
        if s.aborted {
            Error::Infeasible(format!("no assignment found within {} nodes", s.nodes - 1))
        } else {
            Error::Infeasible("no conflict-free gate assignment exists".into())
        }
    })?;
    let assignment = Assignment::new(gates.into_iter().map(|g| g.expect("complete")).collect());
    Ok(ExactResult {
        objective: inst.total_transit_time(&assignment),
        assignment,
        proven_optimal: !s.aborted,
        nodes_explored: s.nodes,
    })
}

/// Exact minimum of the compiled QUBO energy `T + λ_one C_one + λ_not C_not`.
///
/// With `λ_one >= 0`, dropping extra gates of a flight never raises the
/// energy, so it suffices to search states with at most one gate per flight.
pub fn penalized_minimum(inst: &FlightGateInstance, weights: &PenaltyWeights) -> Result<PenalizedMinimum> {
    inst.ensure_valid()?;
    if weights.lambda_one < 0.0 || weights.lambda_not < 0.0 {
        return Err(Error::InvalidParams("penalty weights must be nonnegative".into()));
    }
    let mut s = Search::new(inst, Some(*weights), None);
    s.dfs(0, 0.0);
    let gate_of = s.best_gates.expect("the empty assignment is always admissible");
    let pairs = inst.forbidden_pairs();
    let feasible = gate_of.iter().all(Option::is_some)
        && pairs.iter().all(|(i, j)| gate_of[i] != gate_of[j]);
    Ok(PenalizedMinimum {
        energy: s.best,
        gate_of,
        feasible,
        nodes_explored: s.nodes,
    })
}
