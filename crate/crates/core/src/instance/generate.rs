use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Flight, FlightGateInstance, Gate};
use crate::{Error, Result};

/// Inclusive integer range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Span {
    pub min: i64,
    pub max: i64,
}

impl Span {
    pub const fn new(min: i64, max: i64) -> Self {
        Self { min, max }
    }

    fn check(&self, what: &str, lowest: i64) -> Result<()> {
        if self.min < lowest || self.max < self.min {
            return Err(Error::InvalidParams(format!(
                "{what} range [{}, {}] must satisfy {lowest} <= min <= max",
                self.min, self.max
            )));
        }
        Ok(())
    }

    fn sample(&self, rng: &mut impl Rng) -> i64 {
        rng.gen_range(self.min..=self.max)
    }
}

/// Knobs of the synthetic schedule generator.
///
/// Gates sit along a single concourse; walking times grow with the distance
/// between gates and from the central check-in/baggage hall, and are whole
/// minutes so that compiled models stay integral.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GeneratorParams {
    /// Length of the schedule window in minutes.
    pub day_minutes: i64,
    /// Time at the gate, `t_out - t_in`.
    pub dwell: Span,
    pub t_buf: i64,
    pub arriving: Span,
    pub departing: Span,
    /// Passengers on a transfer edge, once the edge exists.
    pub transfer: Span,
    /// Probability that a pair of flights shares transfer passengers.
    pub transfer_density: f64,
    /// Walking minutes between neighbouring gates.
    pub gate_spacing: Span,
    /// Fixed walking overhead added to every gate time.
    pub walk_base: Span,
    /// Redraws allowed before reporting an infeasible schedule.
    pub max_retries: u32,
}

impl Default for GeneratorParams {
    fn default() -> Self {
        Self {
            day_minutes: 1440,
            dwell: Span::new(30, 240),
            t_buf: 15,
            arriving: Span::new(0, 150),
            departing: Span::new(0, 150),
            transfer: Span::new(1, 40),
            transfer_density: 0.3,
            gate_spacing: Span::new(1, 4),
            walk_base: Span::new(2, 6),
            max_retries: 50,
        }
    }
}

impl GeneratorParams {
    /// A day at a mid-sized airport: sparse transfers so that the transfer
    /// graph splits into many small components and one larger one.
    pub fn airport_day(num_flights: usize) -> Self {
        let pairs = (num_flights * num_flights.saturating_sub(1) / 2).max(1) as f64;
        Self {
            transfer_density: (80.0 / pairs).min(1.0),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.day_minutes < 1 {
            return Err(Error::InvalidParams("day_minutes must be >= 1".into()));
        }
        if self.t_buf < 0 {
            return Err(Error::InvalidParams("t_buf must be >= 0".into()));
        }
        self.dwell.check("dwell", 1)?;
        self.arriving.check("arriving", 0)?;
        self.departing.check("departing", 0)?;
        self.transfer.check("transfer", 1)?;
        self.gate_spacing.check("gate_spacing", 1)?;
        self.walk_base.check("walk_base", 1)?;
        if !(0.0..=1.0).contains(&self.transfer_density) {
            return Err(Error::InvalidParams(format!(
                "transfer_density {} not in [0, 1]",
                self.transfer_density
            )));
        }
        Ok(())
    }
}

/// Draws a valid, feasible instance. Deterministic in `seed`.
pub fn generate(
    seed: u64,
    num_flights: usize,
    num_gates: usize,
    params: &GeneratorParams,
) -> Result<FlightGateInstance> {
    if num_flights == 0 || num_gates == 0 {
        return Err(Error::InvalidParams(
            "need at least one flight and one gate".into(),
        ));
    }
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..=params.max_retries {
        let inst = draw(&mut rng, num_flights, num_gates, params);
        debug_assert!(inst.validate().is_empty(), "{:?}", inst.validate());
        if inst.greedy_assignment().is_some() {
            return Ok(inst);
        }
    }
    Err(Error::Infeasible(format!(
        "no conflict-free schedule for {num_flights} flights on {num_gates} gates after {} draws",
        params.max_retries + 1
    )))
}

fn draw(
    rng: &mut ChaCha8Rng,
    num_flights: usize,
    num_gates: usize,
    params: &GeneratorParams,
) -> FlightGateInstance {
    let mut stays: Vec<(i64, i64)> = (0..num_flights)
        .map(|_| {
            let dwell = params.dwell.sample(rng);
            let latest = (params.day_minutes - dwell).max(0);
            let t_in = rng.gen_range(0..=latest);
            (t_in, t_in + dwell)
        })
        .collect();
    stays.sort();

    let flights: Vec<Flight> = stays
        .iter()
        .enumerate()
        .map(|(i, &(t_in, t_out))| Flight {
            id: format!("F{i:03}"),
            t_in,
            t_out,
            n_arr: params.arriving.sample(rng) as u32,
            n_dep: params.departing.sample(rng) as u32,
        })
        .collect();

    let mut n_trans = vec![vec![0u32; num_flights]; num_flights];
    for i in 0..num_flights {
        for j in (i + 1)..num_flights {
            if rng.gen_bool(params.transfer_density) {
                let n = params.transfer.sample(rng) as u32;
                n_trans[i][j] = n;
                n_trans[j][i] = n;
            }
        }
    }

    let mut positions = Vec::with_capacity(num_gates);
    let mut pos = 0i64;
    for _ in 0..num_gates {
        positions.push(pos);
        pos += params.gate_spacing.sample(rng);
    }
    // check-in and baggage claim sit somewhere along the concourse
    let hub = rng.gen_range(0..=pos);
    let arr_base = params.walk_base.sample(rng);
    let dep_base = params.walk_base.sample(rng);
    let gate_base = params.walk_base.sample(rng);
    let mut gates: Vec<Gate> = positions
        .iter()
        .enumerate()
        .map(|(a, &p)| Gate {
            id: format!("G{a:02}"),
            t_arr: (arr_base + (p - hub).abs()) as f64,
            t_dep: (dep_base + (p - hub).abs()) as f64,
        })
        .collect();
    let mut t_gate = vec![vec![0.0; num_gates]; num_gates];
    for a in 0..num_gates {
        for b in 0..num_gates {
            if a != b {
                t_gate[a][b] = (gate_base + (positions[a] - positions[b]).abs()) as f64;
            }
        }
    }
    // gate labels carry no geometric meaning
    let mut perm: Vec<usize> = (0..num_gates).collect();
    perm.shuffle(rng);
    gates = perm.iter().map(|&a| gates[a].clone()).collect();
    for (a, g) in gates.iter_mut().enumerate() {
        g.id = format!("G{a:02}");
    }
    let t_gate = perm
        .iter()
        .map(|&a| perm.iter().map(|&b| t_gate[a][b]).collect())
        .collect();

    FlightGateInstance {
        flights,
        gates,
        n_trans,
        t_gate,
        t_buf: params.t_buf,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_in_seed() {
        let p = GeneratorParams::default();
        let a = generate(1, 5, 3, &p).unwrap();
        let b = generate(1, 5, 3, &p).unwrap();
        assert_eq!(a, b);
        assert!(a.validate().is_empty());
        assert_ne!(a, generate(2, 5, 3, &p).unwrap());
    }

    #[test]
    fn zero_density_has_no_transfers() {
        let p = GeneratorParams {
            transfer_density: 0.0,
            ..Default::default()
        };
        let inst = generate(3, 8, 4, &p).unwrap();
        assert!(inst.n_trans.iter().flatten().all(|&n| n == 0));
    }

    #[test]
    fn largest_extracted_size() {
        let inst = generate(2, 16, 16, &GeneratorParams::default()).unwrap();
        assert_eq!((inst.num_flights(), inst.num_gates()), (16, 16));
        assert!(inst.validate().is_empty());
        assert!(inst.is_integral());
    }

    #[test]
    fn rejects_bad_params() {
        let p = GeneratorParams {
            arriving: Span::new(-5, 10),
            ..Default::default()
        };
        assert!(matches!(generate(1, 3, 2, &p), Err(Error::InvalidParams(_))));
        let p = GeneratorParams {
            transfer_density: 1.5,
            ..Default::default()
        };
        assert!(generate(1, 3, 2, &p).is_err());
        assert!(generate(1, 0, 2, &GeneratorParams::default()).is_err());
    }

    #[test]
    fn reports_infeasible_schedules() {
        // every flight covers the whole day, one gate
        let p = GeneratorParams {
            day_minutes: 100,
            dwell: Span::new(100, 100),
            max_retries: 3,
            ..Default::default()
        };
        // all flights arrive at t=0; strict predicate lets them share
        assert!(generate(1, 3, 1, &p).is_ok());
        let p = GeneratorParams {
            day_minutes: 200,
            dwell: Span::new(150, 150),
            ..p
        };
        let res = generate(1, 6, 1, &p);
        assert!(matches!(res, Err(Error::Infeasible(_))), "{res:?}");
    }
}
