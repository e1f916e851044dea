//! Dense-tableau primal simplex with bounded variables.
//!
//! Solves `min c·x` subject to `A x <= b` and `0 <= x_j <= u_j` (`u_j` may be
//! infinite). Rows with a negative right-hand side get an artificial variable
//! and are driven feasible in a first phase.

use thiserror::Error;

const TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimplexError {
    #[error("problem is infeasible (phase one residual {0:e})")]
    Infeasible(f64),
    #[error("objective is unbounded below")]
    Unbounded,
    #[error("no convergence after {0} iterations")]
    IterationLimit(usize),
}

#[derive(Debug, Clone, Default)]
pub struct LinearProgram {
    pub cost: Vec<f64>,
    pub upper: Vec<f64>,
    pub rows: Vec<(Vec<(usize, f64)>, f64)>,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
}

impl LinearProgram {
    pub fn add_var(&mut self, cost: f64, upper: f64) -> usize {
        self.cost.push(cost);
        self.upper.push(upper);
        self.cost.len() - 1
    }

    pub fn add_row(&mut self, terms: Vec<(usize, f64)>, rhs: f64) {
        self.rows.push((terms, rhs));
    }

    pub fn solve(&self, max_iter: usize) -> Result<LpSolution, SimplexError> {
        Tableau::new(self).run(self, max_iter)
    }
}

struct Tableau {
    m: usize,
    ncols: usize,
    t: Vec<Vec<f64>>,
    beta: Vec<f64>,
    basis: Vec<usize>,
    upper: Vec<f64>,
    at_upper: Vec<bool>,
    is_basic: Vec<bool>,
    artificials: Vec<usize>,
}

impl Tableau {
    fn new(lp: &LinearProgram) -> Self {
        let n = lp.cost.len();
        let m = lp.rows.len();
        let n_art = lp.rows.iter().filter(|(_, b)| *b < 0.0).count();
        let ncols = n + m + n_art;
        let mut t = vec![vec![0.0; ncols]; m];
        let mut beta = vec![0.0; m];
        let mut basis = vec![0; m];
        let mut upper = lp.upper.clone();
        upper.extend(std::iter::repeat_n(f64::INFINITY, m + n_art));
        let mut artificials = Vec::new();
        let mut next_art = n + m;
        for (i, (terms, b)) in lp.rows.iter().enumerate() {
            let sign = if *b < 0.0 { -1.0 } else { 1.0 };
            for &(j, a) in terms {
                t[i][j] += sign * a;
            }
            t[i][n + i] = sign;
            beta[i] = sign * b;
            if *b < 0.0 {
                t[i][next_art] = 1.0;
                basis[i] = next_art;
                artificials.push(next_art);
                next_art += 1;
            } else {
                basis[i] = n + i;
            }
        }
        let mut is_basic = vec![false; ncols];
        for &b in &basis {
            is_basic[b] = true;
        }
        Tableau { m, ncols, t, beta, basis, upper, at_upper: vec![false; ncols], is_basic, artificials }
    }

    fn value(&self, j: usize) -> f64 {
        if self.at_upper[j] {
            self.upper[j]
        } else {
            0.0
        }
    }

    fn run(mut self, lp: &LinearProgram, max_iter: usize) -> Result<LpSolution, SimplexError> {
        let n = lp.cost.len();
        let mut iterations = 0;
        if !self.artificials.is_empty() {
            let mut c1 = vec![0.0; self.ncols];
            for &a in &self.artificials {
                c1[a] = 1.0;
            }
            iterations += self.optimize(&c1, max_iter)?;
            let residual: f64 = self
                .basis
                .iter()
                .zip(&self.beta)
                .filter(|(b, _)| self.artificials.contains(b))
                .map(|(_, v)| v.max(0.0))
                .sum();
            if residual > 1e-7 {
                return Err(SimplexError::Infeasible(residual));
            }
            for &a in &self.artificials {
                self.upper[a] = 0.0;
            }
        }
        let mut c2 = vec![0.0; self.ncols];
        c2[..n].copy_from_slice(&lp.cost);
        iterations += self.optimize(&c2, max_iter.saturating_sub(iterations))?;

        let mut x: Vec<f64> = (0..n).map(|j| self.value(j)).collect();
        for (i, &b) in self.basis.iter().enumerate() {
            if b < n {
                x[b] = self.beta[i];
            }
        }
        for (j, v) in x.iter_mut().enumerate() {
            *v = v.clamp(0.0, lp.upper[j]);
        }
        let objective = x.iter().zip(&lp.cost).map(|(v, c)| v * c).sum();
        Ok(LpSolution { x, objective, iterations })
    }

    fn optimize(&mut self, cost: &[f64], max_iter: usize) -> Result<usize, SimplexError> {
        let mut degenerate_run = 0usize;
        for iter in 0..max_iter {
            let bland = degenerate_run > 50;
            let mut dual = vec![0.0; self.ncols];
            for (i, &b) in self.basis.iter().enumerate() {
                let cb = cost[b];
                if cb != 0.0 {
                    for (d, a) in dual.iter_mut().zip(&self.t[i]) {
                        *d += cb * a;
                    }
                }
            }
            let mut entering = None;
            let mut best = 0.0;
            for j in 0..self.ncols {
                if self.is_basic[j] || self.upper[j] <= 0.0 {
                    continue;
                }
                let d = cost[j] - dual[j];
                let gain = if self.at_upper[j] { d } else { -d };
                if gain > TOL && (entering.is_none() || (!bland && gain > best)) {
                    entering = Some(j);
                    best = gain;
                    if bland {
                        break;
                    }
                }
            }
            let Some(q) = entering else { return Ok(iter) };
            let delta = if self.at_upper[q] { -1.0 } else { 1.0 };

            let mut theta = self.upper[q];
            let mut leave: Option<(usize, bool)> = None;
            for i in 0..self.m {
                let a = self.t[i][q];
                if a.abs() < PIVOT_TOL {
                    continue;
                }
                let rate = -delta * a;
                let b = self.basis[i];
                let (limit, to_upper) = if rate < 0.0 {
                    (self.beta[i].max(0.0) / -rate, false)
                } else if self.upper[b].is_finite() {
                    ((self.upper[b] - self.beta[i]).max(0.0) / rate, true)
                } else {
                    continue;
                };
                let better = limit < theta - TOL
                    || match leave {
                        Some((r, _)) if limit <= theta + TOL => {
                            if bland {
                                b < self.basis[r]
                            } else {
                                a.abs() > self.t[r][q].abs()
                            }
                        }
                        _ => false,
                    };
                if better {
                    theta = limit;
                    leave = Some((i, to_upper));
                }
            }
            if !theta.is_finite() {
                return Err(SimplexError::Unbounded);
            }
            degenerate_run = if theta <= TOL { degenerate_run + 1 } else { 0 };
            for i in 0..self.m {
                let a = self.t[i][q];
                if a != 0.0 {
                    self.beta[i] -= delta * a * theta;
                }
            }
            match leave {
                None => self.at_upper[q] = !self.at_upper[q],
                Some((r, to_upper)) => {
                    let entering_value = self.value(q) + delta * theta;
                    let old = self.basis[r];
                    self.pivot(r, q);
                    self.is_basic[old] = false;
                    self.at_upper[old] = to_upper;
                    self.is_basic[q] = true;
                    self.at_upper[q] = false;
                    self.basis[r] = q;
                    self.beta[r] = entering_value;
                }
            }
        }
        Err(SimplexError::IterationLimit(max_iter))
    }

    fn pivot(&mut self, r: usize, q: usize) {
        let p = self.t[r][q];
        for v in self.t[r].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.t[r].clone();
        for i in 0..self.m {
            if i == r {
                continue;
            }
            let f = self.t[i][q];
            if f.abs() < 1e-15 {
                continue;
            }
            for (v, pr) in self.t[i].iter_mut().zip(&pivot_row) {
                *v -= f * pr;
            }
            self.t[i][q] = 0.0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn textbook_maximization() {
        // max 3x + 5y s.t. x <= 4, 2y <= 12, 3x + 2y <= 18  => (2, 6), 36
        let mut lp = LinearProgram::default();
        let x = lp.add_var(-3.0, f64::INFINITY);
        let y = lp.add_var(-5.0, f64::INFINITY);
        lp.add_row(vec![(x, 1.0)], 4.0);
        lp.add_row(vec![(y, 2.0)], 12.0);
        lp.add_row(vec![(x, 3.0), (y, 2.0)], 18.0);
        let s = lp.solve(1000).unwrap();
        assert!((s.objective + 36.0).abs() < 1e-9);
        assert!((s.x[x] - 2.0).abs() < 1e-9 && (s.x[y] - 6.0).abs() < 1e-9);
    }

    #[test]
    fn upper_bounds_flip() {
        // max x + y with both in [0,1] and no rows
        let mut lp = LinearProgram::default();
        lp.add_var(-1.0, 1.0);
        lp.add_var(-1.0, 1.0);
        let s = lp.solve(100).unwrap();
        assert_eq!(s.x, vec![1.0, 1.0]);
    }

    #[test]
    fn negative_rhs_needs_phase_one() {
        // min e s.t. 2 - x - e <= 0.75 i.e. -x - e <= -1.25, x in [0,1]
        let mut lp = LinearProgram::default();
        let x = lp.add_var(0.1, 1.0);
        let e = lp.add_var(1.0, f64::INFINITY);
        lp.add_row(vec![(x, -1.0), (e, -1.0)], -1.25);
        let s = lp.solve(100).unwrap();
        assert!((s.x[x] - 1.0).abs() < 1e-12);
        assert!((s.x[e] - 0.25).abs() < 1e-12);
        assert!((s.objective - 0.35).abs() < 1e-12);
    }

    #[test]
    fn infeasible_is_reported() {
        let mut lp = LinearProgram::default();
        let x = lp.add_var(1.0, 1.0);
        lp.add_row(vec![(x, -1.0)], -2.0);
        assert!(matches!(lp.solve(100), Err(SimplexError::Infeasible(_))));
    }

    #[test]
    fn unbounded_is_reported() {
        let mut lp = LinearProgram::default();
        let x = lp.add_var(-1.0, f64::INFINITY);
        let y = lp.add_var(0.0, f64::INFINITY);
        lp.add_row(vec![(x, 1.0), (y, -1.0)], 1.0);
        assert_eq!(lp.solve(100).unwrap_err(), SimplexError::Unbounded);
    }

    #[test]
    fn iteration_cap() {
        let mut lp = LinearProgram::default();
        let x = lp.add_var(-1.0, f64::INFINITY);
        lp.add_row(vec![(x, 1.0)], 1.0);
        assert_eq!(lp.solve(0).unwrap_err(), SimplexError::IterationLimit(0));
    }
}
