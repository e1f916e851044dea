//! Independent reference computations for the integration tests.

#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::PathBuf;

use taintmine::pipeline::io::read_jsonl;
use taintmine::predictor::PredictedSink;

pub fn data(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(rel)
}

pub fn load_predictions(rel: &str) -> Vec<PredictedSink> {
    read_jsonl(&data(rel)).expect("fixture reads")
}

/// One flow constraint `a + b <= sum(rhs) + c + eps` over variable indices.
#[derive(Debug, Clone)]
pub struct OracleConstraint {
    pub lhs: [usize; 2],
    pub rhs: Vec<usize>,
    pub c: f64,
}

/// Objective at `x`, with every slack at its smallest feasible value.
pub fn objective_at(x: &[f64], free: &[usize], cons: &[OracleConstraint], lambda: f64) -> f64 {
    let mut total = 0.0;
    for k in cons {
        let lhs = x[k.lhs[0]] + x[k.lhs[1]];
        let rhs: f64 = k.rhs.iter().map(|&i| x[i]).sum();
        let eps = lhs - rhs - k.c;
        if eps > 0.0 {
            total += eps;
        }
    }
    total + lambda * free.iter().map(|&i| x[i]).sum::<f64>()
}

/// Exhaustive search over a lattice of the free variables in [0,1].
pub fn grid_minimum(pins: &[Option<f64>], cons: &[OracleConstraint], lambda: f64, step: f64) -> f64 {
    let free: Vec<usize> = (0..pins.len()).filter(|&i| pins[i].is_none()).collect();
    let n = (1.0 / step).round() as usize;
    let mut x: Vec<f64> = pins.iter().map(|p| p.unwrap_or(0.0)).collect();
    let mut best = f64::INFINITY;
    let mut idx = vec![0usize; free.len()];
    loop {
        for (slot, &v) in free.iter().enumerate() {
            x[v] = idx[slot] as f64 * step;
        }
        best = best.min(objective_at(&x, &free, cons, lambda));
        let mut d = 0;
        loop {
            if d == idx.len() {
                return best;
            }
            idx[d] += 1;
            if idx[d] <= n {
                break;
            }
            idx[d] = 0;
            d += 1;
        }
    }
}

pub fn dot(u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

pub fn cos(u: &[f64], v: &[f64]) -> f64 {
    let (nu, nv) = (dot(u, u).sqrt(), dot(v, v).sqrt());
    if nu == 0.0 || nv == 0.0 {
        0.0
    } else {
        dot(u, v) / (nu * nv)
    }
}

/// Plain set arithmetic for the boosted-query metrics.
pub struct SetOracle {
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub to_recover: usize,
    pub recovered: usize,
    pub spurious: usize,
}

pub fn set_oracle(old: &BTreeSet<u32>, boosted: &BTreeSet<u32>, new: &BTreeSet<u32>) -> SetOracle {
    let mut added = Vec::new();
    for b in boosted {
        if !old.contains(b) {
            added.push(*b);
        }
    }
    let mut wanted = 0;
    for n in new {
        if !old.contains(n) {
            wanted += 1;
        }
    }
    let mut hit = 0;
    for a in &added {
        if new.contains(a) {
            hit += 1;
        }
    }
    SetOracle {
        precision: if added.is_empty() { None } else { Some(hit as f64 / added.len() as f64) },
        recall: if wanted == 0 { None } else { Some(hit as f64 / wanted as f64) },
        to_recover: wanted,
        recovered: hit,
        spurious: added.len() - hit,
    }
}
