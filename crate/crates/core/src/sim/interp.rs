//! Tree-walking interpreter over a resolved program.
//!
//! One run follows a single path through the measurement outcomes. The
//! first `choices.len()` outcomes are replayed; later measurements take
//! their first viable outcome and queue the alternative in `pending`.

use std::fmt::Write;

use crate::analysis::symbols::{CallableLoc, Resolution, SymbolTable};
use crate::builtins::Builtin;
use crate::diagnostic::{Code, Diagnostic};
use crate::syntax::ast::*;

use super::state::{self, StateVector};
use super::Limits;

/// Branches below this probability are dropped and counted as pruned mass.
pub const PRUNE: f64 = 1e-12;
const RELEASE_EPS: f64 = 1e-12;
const MAX_CALL_DEPTH: usize = 128;

#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Unit,
    Int(i64),
    Double(f64),
    Bool(bool),
    Str(String),
    Result(bool),
    Range(i64, i64),
    Qubit(usize),
    Array(Vec<Value>),
}

impl Value {
    pub fn render(&self) -> String {
        match self {
            Value::Unit => "()".into(),
            Value::Int(v) => v.to_string(),
            Value::Double(v) => v.to_string(),
            Value::Bool(true) => "True".into(),
            Value::Bool(false) => "False".into(),
            Value::Str(s) => s.clone(),
            Value::Result(true) => "One".into(),
            Value::Result(false) => "Zero".into(),
            Value::Range(a, b) => format!("{a}..{b}"),
            Value::Qubit(w) => format!("q{w}"),
            Value::Array(items) => {
                let mut s = String::from("[");
                for (i, v) in items.iter().enumerate() {
                    if i > 0 {
                        s.push_str(", ");
                    }
                    let _ = write!(s, "{}", v.render());
                }
                s.push(']');
                s
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SimError {
    Limit(String),
    Release(String),
    Runtime(String),
    /// Measurement or message inside a unitary extraction.
    NotUnitary(String),
}

impl SimError {
    pub fn to_diagnostic(&self) -> Diagnostic {
        match self {
            SimError::Limit(m) => Diagnostic::error(Code::Limit, None, m.clone()),
            SimError::Release(m) => Diagnostic::error(Code::ReleaseNonzero, None, m.clone()),
            SimError::Runtime(m) => Diagnostic::error(Code::Runtime, None, m.clone()),
            SimError::NotUnitary(m) => Diagnostic::precondition(m.clone()),
        }
    }
}

type R<T> = Result<T, SimError>;

fn rt<T>(msg: impl Into<String>) -> R<T> {
    Err(SimError::Runtime(msg.into()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Branch over measurement outcomes, renormalizing after collapse.
    Explore,
    /// Follow the given outcomes exactly, without renormalizing.
    Forced,
    /// Reject measurement, reset and messages.
    Unitary,
}

enum Flow {
    Normal,
    Return(Value),
}

pub struct Machine<'a> {
    program: &'a Program,
    symbols: &'a SymbolTable,
    limits: &'a Limits,
    mode: Mode,
    choices: &'a [bool],
    pub state: StateVector,
    measured: Vec<bool>,
    pub trace: Vec<String>,
    pub taken: Vec<bool>,
    pub pending: Vec<Vec<bool>>,
    pub prob: f64,
    pub pruned: f64,
    steps: u64,
    depth: usize,
    scopes: Vec<Vec<(String, Value)>>,
}

impl<'a> Machine<'a> {
    pub fn new(
        program: &'a Program,
        symbols: &'a SymbolTable,
        limits: &'a Limits,
        mode: Mode,
        choices: &'a [bool],
    ) -> Self {
        Machine {
            program,
            symbols,
            limits,
            mode,
            choices,
            state: StateVector::default(),
            measured: Vec::new(),
            trace: Vec::new(),
            taken: Vec::new(),
            pending: Vec::new(),
            prob: 1.0,
            pruned: 0.0,
            steps: 0,
            depth: 0,
            scopes: Vec::new(),
        }
    }

    /// Starts from `state` instead of the empty register.
    pub fn with_state(mut self, state: StateVector) -> Self {
        self.measured = vec![false; state.wires()];
        self.state = state;
        self
    }

    pub fn call(&mut self, loc: CallableLoc, args: Vec<Value>) -> R<Value> {
        let c = self.program.callable(loc);
        let mut wires = Vec::new();
        for a in &args {
            collect_wires(a, &mut wires);
        }
        let mut sorted = wires.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != wires.len() {
            return rt(format!(
                "the same qubit is passed twice to `{}`",
                c.name.name
            ));
        }
        if self.depth >= MAX_CALL_DEPTH {
            return Err(SimError::Limit(format!(
                "call depth exceeds {MAX_CALL_DEPTH}"
            )));
        }
        let frame = c
            .params
            .iter()
            .zip(args)
            .map(|(p, v)| (p.name.name.clone(), v))
            .collect();
        let saved = std::mem::replace(&mut self.scopes, vec![frame]);
        self.depth += 1;
        let flow = self.block(&c.body);
        self.depth -= 1;
        self.scopes = saved;
        Ok(match flow? {
            Flow::Return(v) => v,
            Flow::Normal => Value::Unit,
        })
    }

    fn step(&mut self) -> R<()> {
        self.steps += 1;
        if self.steps > self.limits.max_steps {
            return Err(SimError::Limit(format!(
                "execution exceeds {} steps",
                self.limits.max_steps
            )));
        }
        Ok(())
    }

    fn block(&mut self, b: &Block) -> R<Flow> {
        self.scopes.push(Vec::new());
        let r = self.stmts(&b.stmts);
        self.scopes.pop();
        r
    }

    fn stmts(&mut self, stmts: &[Stmt]) -> R<Flow> {
        for s in stmts {
            if let Flow::Return(v) = self.stmt(s)? {
                return Ok(Flow::Return(v));
            }
        }
        Ok(Flow::Normal)
    }

    fn declare(&mut self, name: &str, v: Value) {
        self.scopes
            .last_mut()
            .expect("inside a scope")
            .push((name.to_owned(), v));
    }

    fn lookup(&self, name: &str) -> R<Value> {
        for sc in self.scopes.iter().rev() {
            if let Some((_, v)) = sc.iter().rev().find(|(n, _)| n == name) {
                return Ok(v.clone());
            }
        }
        rt(format!("`{name}` is not bound"))
    }

    fn assign(&mut self, name: &str, v: Value) -> R<()> {
        for sc in self.scopes.iter_mut().rev() {
            if let Some((_, slot)) = sc.iter_mut().rev().find(|(n, _)| n == name) {
                *slot = v;
                return Ok(());
            }
        }
        rt(format!("`{name}` is not bound"))
    }

    fn stmt(&mut self, s: &Stmt) -> R<Flow> {
        self.step()?;
        match &s.kind {
            StmtKind::Let { name, value } | StmtKind::Mutable { name, value } => {
                let v = self.eval(value)?;
                self.declare(&name.name, v);
            }
            StmtKind::Set { name, value } => {
                let v = self.eval(value)?;
                self.assign(&name.name, v)?;
            }
            StmtKind::Using {
                binding,
                alloc,
                body,
            } => {
                let count = match alloc {
                    QubitAlloc::Single => None,
                    QubitAlloc::Array(n) => match self.eval(n)? {
                        Value::Int(n) if n >= 0 => Some(n as usize),
                        Value::Int(n) => return rt(format!("cannot allocate {n} qubits")),
                        _ => return rt("qubit count is not an Int"),
                    },
                };
                let k = count.unwrap_or(1);
                if self.state.wires() + k > self.limits.max_qubits {
                    return Err(SimError::Limit(format!(
                        "more than {} live qubits",
                        self.limits.max_qubits
                    )));
                }
                let wires: Vec<usize> = (0..k)
                    .map(|_| {
                        self.measured.push(false);
                        self.state.alloc()
                    })
                    .collect();
                let v = match count {
                    None => Value::Qubit(wires[0]),
                    Some(_) => Value::Array(wires.iter().map(|&w| Value::Qubit(w)).collect()),
                };
                self.scopes.push(vec![(binding.name.clone(), v)]);
                let flow = self.block(body);
                self.scopes.pop();
                let flow = flow?;
                for &w in wires.iter().rev() {
                    self.release(w, &binding.name)?;
                }
                return Ok(flow);
            }
            StmtKind::For { var, range, body } => {
                let (lo, hi) = match self.eval(range)? {
                    Value::Range(lo, hi) => (lo, hi),
                    _ => return rt("loop range is not a Range"),
                };
                let mut i = lo;
                while i <= hi {
                    self.step()?;
                    self.scopes.push(vec![(var.name.clone(), Value::Int(i))]);
                    let flow = self.block(body);
                    self.scopes.pop();
                    if let Flow::Return(v) = flow? {
                        return Ok(Flow::Return(v));
                    }
                    i += 1;
                }
            }
            StmtKind::If {
                cond,
                then_block,
                elifs,
                else_block,
            } => {
                if self.truth(cond)? {
                    return self.block(then_block);
                }
                for (c, b) in elifs {
                    if self.truth(c)? {
                        return self.block(b);
                    }
                }
                if let Some(b) = else_block {
                    return self.block(b);
                }
            }
            StmtKind::Return(e) => return Ok(Flow::Return(self.eval(e)?)),
            StmtKind::Call(e) => {
                self.eval(e)?;
            }
        }
        Ok(Flow::Normal)
    }

    fn truth(&mut self, e: &Expr) -> R<bool> {
        match self.eval(e)? {
            Value::Bool(b) => Ok(b),
            _ => rt("condition is not a Bool"),
        }
    }

    fn release(&mut self, w: usize, name: &str) -> R<()> {
        debug_assert_eq!(w + 1, self.state.wires());
        let total = self.state.norm_sqr();
        let one = self.state.mass_one(w);
        let measured = self.measured.pop().unwrap_or(false);
        if one <= RELEASE_EPS * total {
            self.state.drop_top(false);
        } else if total - one <= RELEASE_EPS * total && measured {
            self.state.drop_top(true);
        } else {
            return Err(SimError::Release(format!(
                "qubit `{name}` is released in a state that may be non-zero"
            )));
        }
        Ok(())
    }

    fn gate1(&mut self, w: usize, g: &state::Gate1) {
        self.state.apply1(w, g);
        self.measured[w] = false;
    }

    fn mcx(&mut self, controls: &[usize], target: usize) -> R<()> {
        if controls.contains(&target) {
            return rt("Controlled operands overlap");
        }
        let mut c = controls.to_vec();
        c.sort_unstable();
        c.dedup();
        if c.len() != controls.len() {
            return rt("duplicate control qubit");
        }
        self.state.apply_mcx(controls, target);
        self.measured[target] = false;
        Ok(())
    }

    /// Chooses a measurement outcome for wire `w` and collapses onto it.
    fn measure(&mut self, w: usize) -> R<bool> {
        let outcome = match self.mode {
            Mode::Unitary => {
                return Err(SimError::NotUnitary(
                    "entry measures or resets a qubit".into(),
                ))
            }
            Mode::Forced => {
                let o = *self
                    .choices
                    .get(self.taken.len())
                    .ok_or_else(|| SimError::Runtime("forced outcomes exhausted".into()))?;
                self.state.collapse(w, o, false);
                o
            }
            Mode::Explore => {
                let p1 = self.state.mass_one(w).clamp(0.0, 1.0);
                let p = [1.0 - p1, p1];
                let k = self.taken.len();
                let o = if k < self.choices.len() {
                    self.choices[k]
                } else {
                    let viable: Vec<bool> = [false, true]
                        .into_iter()
                        .filter(|&o| p[o as usize] >= PRUNE)
                        .collect();
                    for o in [false, true] {
                        let q = p[o as usize];
                        if q > 0.0 && q < PRUNE {
                            self.pruned += self.prob * q;
                        }
                    }
                    if viable.len() == 2 {
                        let mut alt = self.taken.clone();
                        alt.push(true);
                        self.pending.push(alt);
                    }
                    *viable
                        .first()
                        .ok_or_else(|| SimError::Runtime("state has zero norm".into()))?
                };
                self.prob *= p[o as usize];
                self.state.collapse(w, o, true);
                o
            }
        };
        self.taken.push(outcome);
        self.measured[w] = true;
        Ok(outcome)
    }

    fn reset(&mut self, w: usize) -> R<()> {
        if self.measure(w)? {
            self.state.apply1(w, &state::x());
        }
        self.measured[w] = false;
        Ok(())
    }

    fn eval_all(&mut self, es: &[Expr]) -> R<Vec<Value>> {
        es.iter().map(|e| self.eval(e)).collect()
    }

    fn eval(&mut self, e: &Expr) -> R<Value> {
        Ok(match &e.kind {
            ExprKind::Int(v) => Value::Int(*v),
            ExprKind::Double(v) => Value::Double(*v),
            ExprKind::Bool(v) => Value::Bool(*v),
            ExprKind::ResultLit(v) => Value::Result(*v),
            ExprKind::Str(s) => Value::Str(s.clone()),
            ExprKind::Interp(parts) => {
                let mut s = String::new();
                for p in parts {
                    match p {
                        InterpPart::Lit(t) => s.push_str(t),
                        InterpPart::Expr(x) => s.push_str(&self.eval(x)?.render()),
                    }
                }
                Value::Str(s)
            }
            ExprKind::Name(n) => self.lookup(n)?,
            ExprKind::Array(items) => Value::Array(self.eval_all(items)?),
            ExprKind::Index(base, idx) => {
                let items = as_array(self.eval(base)?)?;
                let i = as_int(self.eval(idx)?)?;
                usize::try_from(i)
                    .ok()
                    .and_then(|i| items.get(i).cloned())
                    .ok_or_else(|| {
                        SimError::Runtime(format!(
                            "index {i} out of range for array of length {}",
                            items.len()
                        ))
                    })?
            }
            ExprKind::Slice(base, range) => {
                let items = as_array(self.eval(base)?)?;
                let (lo, hi) = match self.eval(range)? {
                    Value::Range(lo, hi) => (lo, hi),
                    _ => return rt("slice bound is not a Range"),
                };
                if lo > hi {
                    Value::Array(Vec::new())
                } else if lo < 0 || hi as usize >= items.len() {
                    return rt(format!(
                        "slice {lo}..{hi} out of range for array of length {}",
                        items.len()
                    ));
                } else {
                    Value::Array(items[lo as usize..=hi as usize].to_vec())
                }
            }
            ExprKind::Range(lo, hi) => {
                let lo = as_int(self.eval(lo)?)?;
                let hi = as_int(self.eval(hi)?)?;
                Value::Range(lo, hi)
            }
            ExprKind::Unary(op, x) => match (op, self.eval(x)?) {
                (UnOp::Neg, Value::Int(v)) => Value::Int(
                    v.checked_neg()
                        .ok_or_else(|| SimError::Runtime("integer overflow".into()))?,
                ),
                (UnOp::Neg, Value::Double(v)) => Value::Double(-v),
                (UnOp::Not, Value::Bool(b)) => Value::Bool(!b),
                _ => return rt("bad operand for unary operator"),
            },
            ExprKind::Binary(op, l, r) => self.binary(*op, l, r)?,
            ExprKind::Call(callee, args) => match self.symbols.resolution(&callee.span) {
                Some(Resolution::Builtin(b)) => self.builtin(b, args)?,
                Some(Resolution::Symbol(id)) => {
                    let loc = self.symbols.symbol(id).owner;
                    let vals = self.eval_all(args)?;
                    self.step()?;
                    self.call(loc, vals)?
                }
                None => return rt("unresolved callee"),
            },
            ExprKind::Controlled { controls, args, .. } => {
                let ctl: Vec<usize> = as_array(self.eval(controls)?)?
                    .iter()
                    .map(as_qubit)
                    .collect::<R<_>>()?;
                let target = match args.first() {
                    Some(t) => as_qubit(&self.eval(t)?)?,
                    None => return rt("missing target"),
                };
                self.mcx(&ctl, target)?;
                Value::Unit
            }
        })
    }

    fn binary(&mut self, op: BinOp, l: &Expr, r: &Expr) -> R<Value> {
        let a = self.eval(l)?;
        if let (BinOp::And | BinOp::Or, Value::Bool(x)) = (op, &a) {
            if (op == BinOp::And && !x) || (op == BinOp::Or && *x) {
                return Ok(Value::Bool(*x));
            }
            return match self.eval(r)? {
                Value::Bool(y) => Ok(Value::Bool(y)),
                _ => rt("bad operand for boolean operator"),
            };
        }
        let b = self.eval(r)?;
        let overflow = || SimError::Runtime("integer overflow or division by zero".into());
        Ok(match (op, a, b) {
            (BinOp::Eq, a, b) => Value::Bool(a == b),
            (BinOp::Ne, a, b) => Value::Bool(a != b),
            (BinOp::Add, Value::Str(a), Value::Str(b)) => Value::Str(a + &b),
            (op, Value::Int(a), Value::Int(b)) => match op {
                BinOp::Add => Value::Int(a.checked_add(b).ok_or_else(overflow)?),
                BinOp::Sub => Value::Int(a.checked_sub(b).ok_or_else(overflow)?),
                BinOp::Mul => Value::Int(a.checked_mul(b).ok_or_else(overflow)?),
                BinOp::Div => Value::Int(a.checked_div(b).ok_or_else(overflow)?),
                BinOp::Mod => Value::Int(a.checked_rem(b).ok_or_else(overflow)?),
                BinOp::Lt => Value::Bool(a < b),
                BinOp::Le => Value::Bool(a <= b),
                BinOp::Gt => Value::Bool(a > b),
                BinOp::Ge => Value::Bool(a >= b),
                _ => return rt("bad operands"),
            },
            (op, Value::Double(a), Value::Double(b)) => match op {
                BinOp::Add => Value::Double(a + b),
                BinOp::Sub => Value::Double(a - b),
                BinOp::Mul => Value::Double(a * b),
                BinOp::Div => Value::Double(a / b),
                BinOp::Lt => Value::Bool(a < b),
                BinOp::Le => Value::Bool(a <= b),
                BinOp::Gt => Value::Bool(a > b),
                BinOp::Ge => Value::Bool(a >= b),
                _ => return rt("bad operands"),
            },
            _ => return rt("bad operands"),
        })
    }

    fn apply_gate(&mut self, b: Builtin, w: usize) -> R<()> {
        match b {
            Builtin::H => self.gate1(w, &state::h()),
            Builtin::X => self.gate1(w, &state::x()),
            Builtin::Y => self.gate1(w, &state::y()),
            Builtin::Z => self.gate1(w, &state::z()),
            Builtin::S => self.gate1(w, &state::s()),
            Builtin::T => self.gate1(w, &state::t()),
            Builtin::Reset => self.reset(w)?,
            _ => return rt(format!("`{}` is not a single-qubit operation", b.name())),
        }
        Ok(())
    }

    fn builtin(&mut self, b: Builtin, args: &[Expr]) -> R<Value> {
        if b == Builtin::ApplyToEach {
            let gate = match args.first().map(|a| self.symbols.resolution(&a.span)) {
                Some(Some(Resolution::Builtin(g))) => g,
                _ => return rt("ApplyToEach expects a gate name"),
            };
            let qs = match args.get(1) {
                Some(a) => as_array(self.eval(a)?)?,
                None => return rt("ApplyToEach expects a qubit array"),
            };
            for q in &qs {
                self.apply_gate(gate, as_qubit(q)?)?;
            }
            return Ok(Value::Unit);
        }
        let vals = self.eval_all(args)?;
        Ok(match b {
            Builtin::H
            | Builtin::X
            | Builtin::Y
            | Builtin::Z
            | Builtin::S
            | Builtin::T
            | Builtin::Reset => {
                self.apply_gate(b, as_qubit(&vals[0])?)?;
                Value::Unit
            }
            Builtin::Cnot => {
                let (c, t) = (as_qubit(&vals[0])?, as_qubit(&vals[1])?);
                self.mcx(&[c], t)?;
                Value::Unit
            }
            Builtin::Ccnot => {
                let (c1, c2, t) = (
                    as_qubit(&vals[0])?,
                    as_qubit(&vals[1])?,
                    as_qubit(&vals[2])?,
                );
                self.mcx(&[c1, c2], t)?;
                Value::Unit
            }
            Builtin::M => Value::Result(self.measure(as_qubit(&vals[0])?)?),
            Builtin::MultiM => {
                let qs = as_array(vals[0].clone())?;
                let mut out = Vec::with_capacity(qs.len());
                for q in &qs {
                    out.push(Value::Result(self.measure(as_qubit(q)?)?));
                }
                Value::Array(out)
            }
            Builtin::Message => {
                if self.mode == Mode::Unitary {
                    return Err(SimError::NotUnitary("entry emits a message".into()));
                }
                match &vals[0] {
                    Value::Str(s) => self.trace.push(s.clone()),
                    other => self.trace.push(other.render()),
                }
                Value::Unit
            }
            Builtin::ResultArrayAsInt => {
                let rs = as_array(vals[0].clone())?;
                if rs.len() > 62 {
                    return rt("result array too long to convert");
                }
                let mut n = 0i64;
                for (i, r) in rs.iter().enumerate() {
                    match r {
                        Value::Result(true) => n |= 1 << i,
                        Value::Result(false) => {}
                        _ => return rt("expected Result[]"),
                    }
                }
                Value::Int(n)
            }
            Builtin::ApplyToEach => unreachable!("handled above"),
        })
    }
}

fn collect_wires(v: &Value, out: &mut Vec<usize>) {
    match v {
        Value::Qubit(w) => out.push(*w),
        Value::Array(items) => items.iter().for_each(|i| collect_wires(i, out)),
        _ => {}
    }
}

fn as_int(v: Value) -> R<i64> {
    match v {
        Value::Int(i) => Ok(i),
        _ => rt("expected Int"),
    }
}

fn as_array(v: Value) -> R<Vec<Value>> {
    match v {
        Value::Array(items) => Ok(items),
        _ => rt("expected an array"),
    }
}

fn as_qubit(v: &Value) -> R<usize> {
    match v {
        Value::Qubit(w) => Ok(*w),
        _ => rt("expected a qubit"),
    }
}
