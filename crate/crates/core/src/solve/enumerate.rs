//! Exhaustive QUBO minimization with Gray-code order.
//!
//! Consecutive Gray codes differ in one bit, so each step costs one local
//! field lookup plus an update of that variable's neighbours. Large models
//! are split on their top bits and the chunks are searched in parallel.

use rayon::prelude::*;

use crate::qubo::Qubo;
use crate::{Error, Result};

pub const DEFAULT_ENUM_CAP: usize = 26;

/// Bits enumerated per parallel chunk.
const CHUNK_BITS: usize = 18;

/// Global minimizer; ties go to the lexicographically smallest state.
pub fn exact_qubo_min(q: &Qubo) -> Result<(Vec<u8>, f64)> {
    exact_qubo_min_capped(q, DEFAULT_ENUM_CAP)
}

pub fn exact_qubo_min_capped(q: &Qubo, cap: usize) -> Result<(Vec<u8>, f64)> {
    let n = q.n;
    if n > cap || n > 63 {
        return Err(Error::TooLarge { n, cap: cap.min(63) });
    }
    let mut linear = vec![0.0; n];
    let mut nbrs: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for (&(j, k), &v) in &q.coeffs {
        if j == k {
            linear[j] = v;
        } else {
            nbrs[j].push((k, v));
            nbrs[k].push((j, v));
        }
    }

    let low = n.min(CHUNK_BITS);
    let high = n - low;
    let best = (0u64..1 << high)
        .into_par_iter()
        .map(|prefix| search_chunk(q, &linear, &nbrs, low, prefix << low))
        .reduce_with(|a, b| if better(&b, &a, n) { b } else { a })
        .expect("at least one chunk");

    let state: Vec<u8> = (0..n).map(|i| ((best.1 >> i) & 1) as u8).collect();
    let energy = q.energy(&state);
    Ok((state, energy))
}

/// Lexicographic key: variable 0 is the most significant position.
fn lex_key(mask: u64, n: usize) -> u64 {
    if n == 0 {
        0
    } else {
        mask.reverse_bits() >> (64 - n)
    }
}

fn better(a: &(f64, u64), b: &(f64, u64), n: usize) -> bool {
    a.0 < b.0 || (a.0 == b.0 && lex_key(a.1, n) < lex_key(b.1, n))
}

fn search_chunk(
    q: &Qubo,
    linear: &[f64],
    nbrs: &[Vec<(usize, f64)>],
    low: usize,
    base: u64,
) -> (f64, u64) {
    let n = linear.len();
    let mut mask = base;
    let mut x: Vec<u8> = (0..n).map(|i| ((mask >> i) & 1) as u8).collect();
    let mut energy = q.energy(&x);
    // field[k]: energy change of switching x_k from 0 to 1
    let mut field: Vec<f64> = linear.to_vec();
    for k in 0..n {
        for &(j, v) in &nbrs[k] {
            if x[j] == 1 {
                field[k] += v;
            }
        }
    }
    let mut best = (energy, mask);
    for step in 1u64..(1u64 << low) {
        let k = step.trailing_zeros() as usize;
        let on = x[k] == 0;
        if on {
            energy += field[k];
            x[k] = 1;
            mask |= 1 << k;
        } else {
            energy -= field[k];
            x[k] = 0;
            mask &= !(1 << k);
        }
        let sign = if on { 1.0 } else { -1.0 };
        for &(j, v) in &nbrs[k] {
            field[j] += sign * v;
        }
        if better(&(energy, mask), &best, n) {
            best = (energy, mask);
        }
    }
    best
}
