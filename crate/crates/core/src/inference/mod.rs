//! Constraint-based inference of taint specifications.
//!
//! Each project yields a linear program over one variable per
//! (representation, role) with flow constraints relaxed by non-negative
//! slacks. Per-project optima are averaged into predicted specifications.

mod constraints;
pub mod simplex;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use constraints::{build_constraints, ConstraintSystem, Family, FlowConstraint, Variable};

use crate::representations::Representation;
use crate::specs::{SpecKind, TaintSpec};
use simplex::{LinearProgram, SimplexError};

pub const DEFAULT_C: f64 = 0.75;
pub const DEFAULT_LAMBDA: f64 = 0.1;
const ITERATION_CAP: usize = 200_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InferenceError {
    #[error("representation {rep} is pinned both to 1 and to 0 as {kind}")]
    ConflictingKnownLabels { rep: Representation, kind: SpecKind },
    #[error("constant C must lie in (0,1), got {0}")]
    InvalidConstant(f64),
    #[error("infeasible constraint system: {0}")]
    Infeasible(String),
    #[error("numeric failure: {0}")]
    NumericFailure(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectScores {
    pub project: String,
    pub scores: BTreeMap<Representation, BTreeMap<SpecKind, f64>>,
    pub objective: f64,
    pub epsilons: Vec<f64>,
}

impl ProjectScores {
    pub fn get(&self, rep: &Representation, kind: SpecKind) -> Option<f64> {
        self.scores.get(rep).and_then(|m| m.get(&kind)).copied()
    }
}

/// Minimizes `sum(eps) + lambda * sum(free variables)`. Pinned variables are
/// constants and do not enter the objective.
pub fn solve(system: &ConstraintSystem, lambda: f64, project: &str) -> Result<ProjectScores, InferenceError> {
    let mut lp = LinearProgram::default();
    let mut col = vec![usize::MAX; system.variables.len()];
    for v in system.free_variables() {
        col[v] = lp.add_var(lambda, 1.0);
    }
    let eps_cols: Vec<usize> = system.constraints.iter().map(|_| lp.add_var(1.0, f64::INFINITY)).collect();
    for (k, e) in system.constraints.iter().zip(&eps_cols) {
        let mut coeffs: BTreeMap<usize, f64> = BTreeMap::new();
        let mut rhs = k.c;
        for (vars, sign) in [(&k.lhs[..], 1.0), (&k.rhs[..], -1.0)] {
            for &v in vars {
                match system.variables[v].pin {
                    Some(p) => rhs -= sign * p,
                    None => *coeffs.entry(col[v]).or_default() += sign,
                }
            }
        }
        let mut terms: Vec<(usize, f64)> = coeffs.into_iter().filter(|(_, a)| *a != 0.0).collect();
        terms.push((*e, -1.0));
        lp.add_row(terms, rhs);
    }
    let sol = lp.solve(ITERATION_CAP).map_err(|e| match e {
        SimplexError::Infeasible(_) | SimplexError::Unbounded => InferenceError::Infeasible(e.to_string()),
        SimplexError::IterationLimit(_) => InferenceError::NumericFailure(e.to_string()),
    })?;

    let mut values = Vec::with_capacity(system.variables.len());
    let mut scores: BTreeMap<Representation, BTreeMap<SpecKind, f64>> = BTreeMap::new();
    for (i, v) in system.variables.iter().enumerate() {
        let x = match v.pin {
            Some(p) => p,
            None => sol.x[col[i]].clamp(0.0, 1.0),
        };
        values.push(x);
        scores.entry(v.rep.clone()).or_default().insert(v.kind, x);
    }
    // recompute slacks from the clamped values so the report is exact
    let epsilons = system.required_epsilons(&values);
    let free: f64 = system.free_variables().map(|i| values[i]).sum();
    let objective = epsilons.iter().sum::<f64>() + lambda * free;
    Ok(ProjectScores { project: project.to_string(), scores, objective, epsilons })
}

/// Mean score per (rep, kind) over the projects that scored it.
pub fn average_specs(per_project: &[ProjectScores]) -> Vec<TaintSpec> {
    let mut acc: BTreeMap<(Representation, SpecKind), (f64, usize)> = BTreeMap::new();
    for p in per_project {
        for (rep, kinds) in &p.scores {
            for (kind, score) in kinds {
                let e = acc.entry((rep.clone(), *kind)).or_insert((0.0, 0));
                e.0 += score;
                e.1 += 1;
            }
        }
    }
    acc.into_iter().map(|((rep, kind), (sum, n))| TaintSpec::new(rep, kind, (sum / n as f64).clamp(0.0, 1.0))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::ElementId;
    use crate::propagation::{FlowTriple, KnownLabel};

    fn rep(s: &str) -> Representation {
        Representation::from(s)
    }

    fn triple(src: &str, san: &str, snk: &str) -> FlowTriple {
        FlowTriple { project: "p".into(), src: src.into(), san: san.into(), snk: snk.into() }
    }

    fn ident(id: &ElementId) -> Option<Representation> {
        Some(rep(id.as_str()))
    }

    fn label(r: &str, kind: SpecKind) -> KnownLabel {
        KnownLabel { element_id: r.into(), kind, origin: rep(r) }
    }

    #[test]
    fn empty_system() {
        let sys = build_constraints(&[], &[], ident, DEFAULT_C).unwrap();
        assert!(sys.variables.is_empty() && sys.constraints.is_empty());
        let s = solve(&sys, DEFAULT_LAMBDA, "p").unwrap();
        assert!(s.scores.is_empty());
        assert_eq!(s.objective, 0.0);
    }

    #[test]
    fn one_constraint_per_family() {
        let sys = build_constraints(
            &[triple("a()", "b()", "c(0)")],
            &[label("a()", SpecKind::Src), label("b()", SpecKind::San)],
            ident,
            DEFAULT_C,
        )
        .unwrap();
        assert_eq!(sys.constraints.len(), 3);
        let k = sys.constraints.iter().find(|k| k.family == Family::SrcSan).unwrap();
        assert_eq!(sys.variables[k.lhs[0]].pin, Some(1.0));
        assert_eq!(sys.variables[k.lhs[1]].pin, Some(1.0));
        assert_eq!(k.rhs.len(), 1);
        assert_eq!(sys.variables[k.rhs[0]].rep, rep("c(0)"));
        assert_eq!(sys.variables[k.rhs[0]].pin, None);
    }

    #[test]
    fn pairs_aggregate_their_sources() {
        let sys =
            build_constraints(&[triple("a1()", "b()", "c(0)"), triple("a2()", "b()", "c(0)")], &[], ident, DEFAULT_C)
                .unwrap();
        let k: Vec<_> = sys.constraints.iter().filter(|k| k.family == Family::SanSnk).collect();
        assert_eq!(k.len(), 1);
        assert_eq!(k[0].rhs.len(), 2);
    }

    #[test]
    fn known_sink_pins_other_roles_to_zero() {
        // `x()` is a sanitizer candidate and also a source candidate in another triple
        let sys = build_constraints(
            &[triple("a()", "x()", "c(0)"), triple("x()", "b()", "c(0)")],
            &[label("x()", SpecKind::San)],
            ident,
            DEFAULT_C,
        )
        .unwrap();
        assert_eq!(sys.variables[sys.lookup(&rep("x()"), SpecKind::San).unwrap()].pin, Some(1.0));
        assert_eq!(sys.variables[sys.lookup(&rep("x()"), SpecKind::Src).unwrap()].pin, Some(0.0));
    }

    #[test]
    fn conflicting_labels() {
        let err = build_constraints(
            &[triple("a()", "x()", "c(0)"), triple("x()", "b()", "c(0)")],
            &[label("x()", SpecKind::San), label("x()", SpecKind::Src)],
            ident,
            DEFAULT_C,
        )
        .unwrap_err();
        assert!(matches!(err, InferenceError::ConflictingKnownLabels { .. }));
    }

    #[test]
    fn c_must_be_in_open_unit_interval() {
        assert_eq!(build_constraints(&[], &[], ident, 1.0).unwrap_err(), InferenceError::InvalidConstant(1.0));
    }

    #[test]
    fn all_known_system_reports_required_slack() {
        let sys = build_constraints(
            &[triple("a()", "b()", "c(0)")],
            &[label("a()", SpecKind::Src), label("b()", SpecKind::San), label("c(0)", SpecKind::Snk)],
            ident,
            DEFAULT_C,
        )
        .unwrap();
        let s = solve(&sys, DEFAULT_LAMBDA, "p").unwrap();
        // every family reads 1 + 1 <= 1 + 0.75 + e
        for e in &s.epsilons {
            assert!((e - 0.25).abs() < 1e-12);
        }
        assert!((s.objective - 0.75).abs() < 1e-12);
        assert_eq!(s.get(&rep("c(0)"), SpecKind::Snk), Some(1.0));
    }

    #[test]
    fn averaging_uses_presence() {
        let mk = |project: &str, v: f64| {
            let mut scores = BTreeMap::new();
            scores.insert(rep("r(0)"), BTreeMap::from([(SpecKind::Snk, v)]));
            ProjectScores { project: project.into(), scores, objective: 0.0, epsilons: vec![] }
        };
        let a = average_specs(&[mk("p1", 0.8), mk("p2", 0.6)]);
        assert!((a[0].score - 0.7).abs() < 1e-12);
        let empty = ProjectScores { project: "p3".into(), scores: BTreeMap::new(), objective: 0.0, epsilons: vec![] };
        let b = average_specs(&[mk("p1", 0.9), empty.clone(), empty]);
        assert_eq!(b, vec![TaintSpec::new("r(0)", SpecKind::Snk, 0.9)]);
    }

    #[test]
    fn dump_mentions_every_variable_and_constraint() {
        let sys =
            build_constraints(&[triple("a()", "b()", "c(0)")], &[label("a()", SpecKind::Src)], ident, 0.75).unwrap();
        let d = sys.dump(0.1);
        assert!(d.contains("x0 = 1"));
        assert!(d.contains("c0 san-snk"));
        assert!(d.contains("min e0 + e1 + e2 + 0.1 x1 + 0.1 x2"));
    }
}
