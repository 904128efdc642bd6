//! Gate rewrite rules and their matrix check.

use serde::Serialize;

use crate::builtins::Builtin;
use crate::sim::state::{self, Gate1, Matrix, StateVector};
use crate::sim::RULE_TOL;

/// A gate applied to rule-local wires.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum GateOp {
    One(Builtin1, usize),
    Cnot(usize, usize),
    /// `Controlled X([c], t)`
    ControlledX(usize, usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Builtin1 {
    H,
    X,
    Y,
    Z,
    S,
    T,
}

impl Builtin1 {
    pub fn builtin(self) -> Builtin {
        match self {
            Builtin1::H => Builtin::H,
            Builtin1::X => Builtin::X,
            Builtin1::Y => Builtin::Y,
            Builtin1::Z => Builtin::Z,
            Builtin1::S => Builtin::S,
            Builtin1::T => Builtin::T,
        }
    }

    pub fn from_builtin(b: Builtin) -> Option<Builtin1> {
        Some(match b {
            Builtin::H => Builtin1::H,
            Builtin::X => Builtin1::X,
            Builtin::Y => Builtin1::Y,
            Builtin::Z => Builtin1::Z,
            Builtin::S => Builtin1::S,
            Builtin::T => Builtin1::T,
            _ => return None,
        })
    }

    fn matrix(self) -> Gate1 {
        match self {
            Builtin1::H => state::h(),
            Builtin1::X => state::x(),
            Builtin1::Y => state::y(),
            Builtin1::Z => state::z(),
            Builtin1::S => state::s(),
            Builtin1::T => state::t(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RuleKind {
    /// Shrinks a pair of adjacent gates; used by merge-gates.
    Reduction,
    /// Swaps a gate sequence for an equivalent one; used by replace-gate.
    Substitution,
}

#[derive(Clone, Debug, Serialize)]
pub struct Rule {
    pub name: &'static str,
    pub kind: RuleKind,
    pub wires: usize,
    pub lhs: Vec<GateOp>,
    pub rhs: Vec<GateOp>,
}

impl Rule {
    fn new(
        name: &'static str,
        kind: RuleKind,
        wires: usize,
        lhs: Vec<GateOp>,
        rhs: Vec<GateOp>,
    ) -> Rule {
        Rule {
            name,
            kind,
            wires,
            lhs,
            rhs,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GateRuleTable {
    pub rules: Vec<Rule>,
}

impl GateRuleTable {
    pub fn standard() -> GateRuleTable {
        use Builtin1::*;
        use GateOp::*;
        use RuleKind::*;
        let pair = |g: Builtin1| vec![One(g, 0), One(g, 0)];
        GateRuleTable {
            rules: vec![
                Rule::new("h-h", Reduction, 1, pair(H), vec![]),
                Rule::new("x-x", Reduction, 1, pair(X), vec![]),
                Rule::new("y-y", Reduction, 1, pair(Y), vec![]),
                Rule::new("z-z", Reduction, 1, pair(Z), vec![]),
                Rule::new("s-s", Reduction, 1, pair(S), vec![One(Z, 0)]),
                Rule::new("t-t", Reduction, 1, pair(T), vec![One(S, 0)]),
                Rule::new(
                    "cnot-cnot",
                    Reduction,
                    2,
                    vec![Cnot(0, 1), Cnot(0, 1)],
                    vec![],
                ),
                Rule::new(
                    "z-to-hxh",
                    Substitution,
                    1,
                    vec![One(Z, 0)],
                    vec![One(H, 0), One(X, 0), One(H, 0)],
                ),
                Rule::new(
                    "hxh-to-z",
                    Substitution,
                    1,
                    vec![One(H, 0), One(X, 0), One(H, 0)],
                    vec![One(Z, 0)],
                ),
                Rule::new(
                    "x-to-hzh",
                    Substitution,
                    1,
                    vec![One(X, 0)],
                    vec![One(H, 0), One(Z, 0), One(H, 0)],
                ),
                Rule::new(
                    "hzh-to-x",
                    Substitution,
                    1,
                    vec![One(H, 0), One(Z, 0), One(H, 0)],
                    vec![One(X, 0)],
                ),
                Rule::new(
                    "cnot-to-controlled-x",
                    Substitution,
                    2,
                    vec![Cnot(0, 1)],
                    vec![ControlledX(0, 1)],
                ),
                Rule::new(
                    "controlled-x-to-cnot",
                    Substitution,
                    2,
                    vec![ControlledX(0, 1)],
                    vec![Cnot(0, 1)],
                ),
            ],
        }
    }

    pub fn get(&self, name: &str) -> Option<&Rule> {
        self.rules.iter().find(|r| r.name == name)
    }

    pub fn reductions(&self) -> impl Iterator<Item = &Rule> {
        self.rules.iter().filter(|r| r.kind == RuleKind::Reduction)
    }

    /// Names of rules whose matrix check fails.
    pub fn verify(&self) -> Vec<&'static str> {
        self.rules
            .iter()
            .filter(|r| !matrix_rule_check(r))
            .map(|r| r.name)
            .collect()
    }
}

fn apply(sv: &mut StateVector, op: &GateOp) {
    match *op {
        GateOp::One(g, w) => sv.apply1(w, &g.matrix()),
        GateOp::Cnot(c, t) | GateOp::ControlledX(c, t) => sv.apply_mcx(&[c], t),
    }
}

/// Unitary of a gate sequence on `wires` wires.
pub fn sequence_matrix(ops: &[GateOp], wires: usize) -> Matrix {
    let cols: Vec<_> = (0..1usize << wires)
        .map(|b| {
            let mut sv = StateVector::basis(wires, b);
            for op in ops {
                apply(&mut sv, op);
            }
            sv.amplitudes().to_vec()
        })
        .collect();
    Matrix::from_columns(&cols)
}

/// Whether both sides of `rule` agree up to global phase.
pub fn matrix_rule_check(rule: &Rule) -> bool {
    if rule.wires > 3 {
        return false;
    }
    let l = sequence_matrix(&rule.lhs, rule.wires);
    let r = sequence_matrix(&rule.rhs, rule.wires);
    l.equal_up_to_phase(&r, RULE_TOL)
}
