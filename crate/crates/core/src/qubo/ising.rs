use std::collections::BTreeMap;

use super::{magnitude_ratio, Qubo};
use crate::{Error, Result};

/// `E(s) = Σ h_i s_i + Σ_{i<j} J_ij s_i s_j + offset` over `s ∈ {−1, +1}^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct IsingModel {
    pub h: Vec<f64>,
    /// Strictly upper-triangular couplings; never stores zeros.
    pub j: BTreeMap<(usize, usize), f64>,
    pub offset: f64,
}

impl IsingModel {
    pub fn new(n: usize) -> Self {
        Self {
            h: vec![0.0; n],
            j: BTreeMap::new(),
            offset: 0.0,
        }
    }

    pub fn len(&self) -> usize {
        self.h.len()
    }

    pub fn is_empty(&self) -> bool {
        self.h.is_empty()
    }

    pub fn add_coupling(&mut self, a: usize, b: usize, value: f64) {
        assert!(a != b, "self-coupling on spin {a}");
        let key = (a.min(b), a.max(b));
        let e = self.j.entry(key).or_insert(0.0);
        *e += value;
        if *e == 0.0 {
            self.j.remove(&key);
        }
    }

    pub fn energy(&self, s: &[i8]) -> f64 {
        debug_assert_eq!(s.len(), self.h.len());
        let field: f64 = self
            .h
            .iter()
            .zip(s)
            .map(|(h, &si)| h * f64::from(si))
            .sum();
        let coupling: f64 = self
            .j
            .iter()
            .map(|(&(a, b), v)| v * f64::from(s[a] * s[b]))
            .sum();
        field + coupling + self.offset
    }

    /// Largest magnitude among fields and couplings.
    pub fn max_abs_coeff(&self) -> f64 {
        self.h
            .iter()
            .chain(self.j.values())
            .fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Smallest nonzero magnitude among fields and couplings.
    pub fn min_abs_coeff(&self) -> Option<f64> {
        self.h
            .iter()
            .chain(self.j.values())
            .filter(|v| **v != 0.0)
            .map(|v| v.abs())
            .reduce(f64::min)
    }

    /// Spins with a field or at least one coupling.
    pub fn active_spins(&self) -> Vec<bool> {
        let mut active: Vec<bool> = self.h.iter().map(|&h| h != 0.0).collect();
        for &(a, b) in self.j.keys() {
            active[a] = true;
            active[b] = true;
        }
        active
    }
}

/// Substitutes `x = (1 + s) / 2`; energies are preserved state by state.
pub fn to_ising(q: &Qubo) -> IsingModel {
    let mut m = IsingModel::new(q.n);
    m.offset = q.offset;
    for (&(a, b), &v) in &q.coeffs {
        if a == b {
            m.h[a] += v / 2.0;
            m.offset += v / 2.0;
        } else {
            let quarter = v / 4.0;
            m.add_coupling(a, b, quarter);
            m.h[a] += quarter;
            m.h[b] += quarter;
            m.offset += quarter;
        }
    }
    m
}

/// `max(max|h|/min|h|, max|J|/min|J|)` over nonzero magnitudes; an empty
/// class is skipped.
pub fn coeff_ratio_ising(m: &IsingModel) -> Result<f64> {
    let h = magnitude_ratio(m.h.iter().copied());
    let j = magnitude_ratio(m.j.values().copied());
    match (h, j) {
        (None, None) => Err(Error::EmptyModel),
        (a, b) => Ok(a.unwrap_or(0.0).max(b.unwrap_or(0.0))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_linear_term() {
        let mut q = Qubo::new(1);
        q.add(0, 0, 2.0);
        let m = to_ising(&q);
        assert_eq!(m.h, vec![1.0]);
        assert_eq!(m.offset, 1.0);
    }

    #[test]
    fn single_coupling() {
        let mut q = Qubo::new(2);
        q.add(0, 1, 4.0);
        let m = to_ising(&q);
        assert_eq!(m.j.get(&(0, 1)), Some(&1.0));
        assert_eq!(m.h, vec![1.0, 1.0]);
        assert_eq!(m.offset, 1.0);
    }

    #[test]
    fn cancelling_fields_stay_zero() {
        // x0 x1 - x0/2 - x1/2: fields 1/4 - 1/4 cancel
        let mut q = Qubo::new(2);
        q.add(0, 1, 1.0);
        q.add(0, 0, -0.5);
        q.add(1, 1, -0.5);
        let m = to_ising(&q);
        assert_eq!(m.h, vec![0.0, 0.0]);
        assert_eq!(m.active_spins(), vec![true, true]);
    }

    #[test]
    fn ratios() {
        let mut m = IsingModel::new(2);
        m.h = vec![1.0, 1.0];
        m.add_coupling(0, 1, 1.0);
        assert_eq!(coeff_ratio_ising(&m).unwrap(), 1.0);

        let mut m = IsingModel::new(3);
        m.h = vec![1.0, -10.0, 0.0];
        m.add_coupling(0, 1, 2.0);
        m.add_coupling(1, 2, -4.0);
        assert_eq!(coeff_ratio_ising(&m).unwrap(), 10.0);

        let mut only_j = IsingModel::new(2);
        only_j.add_coupling(0, 1, -3.0);
        assert_eq!(coeff_ratio_ising(&only_j).unwrap(), 1.0);
        assert!(coeff_ratio_ising(&IsingModel::new(3)).is_err());
    }
}
