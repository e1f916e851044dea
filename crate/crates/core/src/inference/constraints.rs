use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::frontend::ElementId;
use crate::propagation::{FlowTriple, KnownLabel};
use crate::representations::Representation;
use crate::specs::SpecKind;

use super::InferenceError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    /// `n_san + n_snk <= sum n_src + C + e`
    SanSnk,
    /// `n_src + n_san <= sum n_snk + C + e`
    SrcSan,
    /// `n_src + n_snk <= sum n_san + C + e`
    SrcSnk,
}

impl Family {
    pub fn as_str(self) -> &'static str {
        match self {
            Family::SanSnk => "san-snk",
            Family::SrcSan => "src-san",
            Family::SrcSnk => "src-snk",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Variable {
    pub rep: Representation,
    pub kind: SpecKind,
    pub pin: Option<f64>,
}

/// `lhs[0] + lhs[1] <= sum(rhs) + c + eps`, one slack per constraint.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowConstraint {
    pub family: Family,
    pub lhs: [usize; 2],
    pub rhs: Vec<usize>,
    pub c: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConstraintSystem {
    pub variables: Vec<Variable>,
    pub constraints: Vec<FlowConstraint>,
    index: BTreeMap<(Representation, SpecKind), usize>,
}

impl ConstraintSystem {
    pub fn new() -> Self {
        Self::default()
    }

    /// Declares `(rep, kind)`, returning the existing variable if present.
    pub fn variable(&mut self, rep: &Representation, kind: SpecKind) -> usize {
        if let Some(&v) = self.index.get(&(rep.clone(), kind)) {
            return v;
        }
        let v = self.variables.len();
        self.variables.push(Variable { rep: rep.clone(), kind, pin: None });
        self.index.insert((rep.clone(), kind), v);
        v
    }

    pub fn lookup(&self, rep: &Representation, kind: SpecKind) -> Option<usize> {
        self.index.get(&(rep.clone(), kind)).copied()
    }

    pub fn pin(&mut self, var: usize, value: f64) -> Result<(), InferenceError> {
        let v = &mut self.variables[var];
        match v.pin {
            Some(p) if p != value => Err(InferenceError::ConflictingKnownLabels { rep: v.rep.clone(), kind: v.kind }),
            _ => {
                v.pin = Some(value);
                Ok(())
            }
        }
    }

    pub fn add_constraint(&mut self, family: Family, lhs: [usize; 2], rhs: Vec<usize>, c: f64) -> usize {
        self.constraints.push(FlowConstraint { family, lhs, rhs, c });
        self.constraints.len() - 1
    }

    pub fn free_variables(&self) -> impl Iterator<Item = usize> + '_ {
        self.variables.iter().enumerate().filter(|(_, v)| v.pin.is_none()).map(|(i, _)| i)
    }

    /// Smallest slack making each constraint hold for the given values.
    pub fn required_epsilons(&self, values: &[f64]) -> Vec<f64> {
        self.constraints
            .iter()
            .map(|k| {
                let lhs: f64 = k.lhs.iter().map(|&v| values[v]).sum();
                let rhs: f64 = k.rhs.iter().map(|&v| values[v]).sum();
                (lhs - rhs - k.c).max(0.0)
            })
            .collect()
    }

    /// Largest violation of any constraint or bound.
    pub fn max_violation(&self, values: &[f64], eps: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for (k, e) in self.constraints.iter().zip(eps) {
            let lhs: f64 = k.lhs.iter().map(|&v| values[v]).sum();
            let rhs: f64 = k.rhs.iter().map(|&v| values[v]).sum();
            worst = worst.max(lhs - rhs - k.c - e).max(-e);
        }
        for (v, x) in self.variables.iter().zip(values) {
            worst = worst.max(-x).max(x - 1.0);
            if let Some(p) = v.pin {
                worst = worst.max((x - p).abs());
            }
        }
        worst
    }

    /// Plain-text rendering of the LP.
    pub fn dump(&self, lambda: f64) -> String {
        let mut s = String::new();
        let name = |i: usize| format!("x{i}");
        s.push_str("variables\n");
        for (i, v) in self.variables.iter().enumerate() {
            match v.pin {
                Some(p) => writeln!(s, "  {} = {p}  # {} {}", name(i), v.kind, v.rep),
                None => writeln!(s, "  0 <= {} <= 1  # {} {}", name(i), v.kind, v.rep),
            }
            .expect("write to string");
        }
        for i in 0..self.constraints.len() {
            writeln!(s, "  e{i} >= 0").expect("write to string");
        }
        s.push_str("objective\n  min");
        let mut terms: Vec<String> = (0..self.constraints.len()).map(|i| format!("e{i}")).collect();
        terms.extend(self.free_variables().map(|i| format!("{lambda} {}", name(i))));
        if terms.is_empty() {
            terms.push("0".into());
        }
        writeln!(s, " {}", terms.join(" + ")).expect("write to string");
        s.push_str("constraints\n");
        for (i, k) in self.constraints.iter().enumerate() {
            let rhs: Vec<String> = k.rhs.iter().map(|&v| name(v)).collect();
            let rhs = if rhs.is_empty() { String::new() } else { format!("{} + ", rhs.join(" + ")) };
            writeln!(s, "  c{i} {}: {} + {} <= {rhs}{} + e{i}", k.family.as_str(), name(k.lhs[0]), name(k.lhs[1]), k.c)
                .expect("write to string");
        }
        s
    }
}

/// Builds the per-project system. `rep_of` maps element ids to canonical
/// representations; triples with an unmapped element are ignored.
pub fn build_constraints(
    triples: &[FlowTriple],
    known: &[KnownLabel],
    rep_of: impl Fn(&ElementId) -> Option<Representation>,
    c: f64,
) -> Result<ConstraintSystem, InferenceError> {
    if !(c > 0.0 && c < 1.0) {
        return Err(InferenceError::InvalidConstant(c));
    }
    let mut sys = ConstraintSystem::new();
    type Key = (Representation, Representation);
    let mut san_snk: BTreeMap<Key, BTreeSet<Representation>> = BTreeMap::new();
    let mut src_san: BTreeMap<Key, BTreeSet<Representation>> = BTreeMap::new();
    let mut src_snk: BTreeMap<Key, BTreeSet<Representation>> = BTreeMap::new();
    for t in triples {
        let (Some(src), Some(san), Some(snk)) = (rep_of(&t.src), rep_of(&t.san), rep_of(&t.snk)) else {
            continue;
        };
        sys.variable(&src, SpecKind::Src);
        sys.variable(&san, SpecKind::San);
        sys.variable(&snk, SpecKind::Snk);
        san_snk.entry((san.clone(), snk.clone())).or_default().insert(src.clone());
        src_san.entry((src.clone(), san.clone())).or_default().insert(snk.clone());
        src_snk.entry((src, snk)).or_default().insert(san);
    }

    // a known element of kind k pins (rep, k) to 1 and its other kinds to 0
    let mut pins: BTreeMap<usize, f64> = BTreeMap::new();
    let mut pin = |sys: &ConstraintSystem, var: usize, value: f64| -> Result<(), InferenceError> {
        match pins.insert(var, value) {
            Some(old) if old != value => {
                let v = &sys.variables[var];
                Err(InferenceError::ConflictingKnownLabels { rep: v.rep.clone(), kind: v.kind })
            }
            _ => Ok(()),
        }
    };
    let mut seen = BTreeSet::new();
    for label in known {
        if !seen.insert((label.origin.clone(), label.kind)) {
            continue;
        }
        for kind in SpecKind::ALL {
            if let Some(v) = sys.lookup(&label.origin, kind) {
                pin(&sys, v, if kind == label.kind { 1.0 } else { 0.0 })?;
            }
        }
    }
    for (v, value) in pins {
        sys.pin(v, value)?;
    }

    for ((san, snk), srcs) in &san_snk {
        let lhs = [sys.variable(san, SpecKind::San), sys.variable(snk, SpecKind::Snk)];
        let rhs = srcs.iter().map(|r| sys.variable(r, SpecKind::Src)).collect();
        sys.add_constraint(Family::SanSnk, lhs, rhs, c);
    }
    for ((src, san), snks) in &src_san {
        let lhs = [sys.variable(src, SpecKind::Src), sys.variable(san, SpecKind::San)];
        let rhs = snks.iter().map(|r| sys.variable(r, SpecKind::Snk)).collect();
        sys.add_constraint(Family::SrcSan, lhs, rhs, c);
    }
    for ((src, snk), sans) in &src_snk {
        let lhs = [sys.variable(src, SpecKind::Src), sys.variable(snk, SpecKind::Snk)];
        let rhs = sans.iter().map(|r| sys.variable(r, SpecKind::San)).collect();
        sys.add_constraint(Family::SrcSnk, lhs, rhs, c);
    }
    Ok(sys)
}
