//! The fixed registry of intrinsic callables.

use crate::syntax::ast::Type;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Builtin {
    H,
    X,
    Y,
    Z,
    S,
    T,
    Cnot,
    Ccnot,
    M,
    MultiM,
    Reset,
    ApplyToEach,
    Message,
    ResultArrayAsInt,
}

pub const ALL: [Builtin; 14] = [
    Builtin::H,
    Builtin::X,
    Builtin::Y,
    Builtin::Z,
    Builtin::S,
    Builtin::T,
    Builtin::Cnot,
    Builtin::Ccnot,
    Builtin::M,
    Builtin::MultiM,
    Builtin::Reset,
    Builtin::ApplyToEach,
    Builtin::Message,
    Builtin::ResultArrayAsInt,
];

/// Parameter shape of a builtin.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParamKind {
    Value(Type),
    /// A single-qubit gate (or `Reset`) passed by name.
    Gate,
}

impl Builtin {
    pub fn from_name(name: &str) -> Option<Builtin> {
        ALL.iter().copied().find(|b| b.name() == name)
    }

    pub fn name(self) -> &'static str {
        match self {
            Builtin::H => "H",
            Builtin::X => "X",
            Builtin::Y => "Y",
            Builtin::Z => "Z",
            Builtin::S => "S",
            Builtin::T => "T",
            Builtin::Cnot => "CNOT",
            Builtin::Ccnot => "CCNOT",
            Builtin::M => "M",
            Builtin::MultiM => "MultiM",
            Builtin::Reset => "Reset",
            Builtin::ApplyToEach => "ApplyToEach",
            Builtin::Message => "Message",
            Builtin::ResultArrayAsInt => "ResultArrayAsInt",
        }
    }

    pub fn params(self) -> Vec<ParamKind> {
        use ParamKind::*;
        match self {
            Builtin::H | Builtin::X | Builtin::Y | Builtin::Z | Builtin::S | Builtin::T => {
                vec![Value(Type::Qubit)]
            }
            Builtin::Cnot => vec![Value(Type::Qubit); 2],
            Builtin::Ccnot => vec![Value(Type::Qubit); 3],
            Builtin::M | Builtin::Reset => vec![Value(Type::Qubit)],
            Builtin::MultiM => vec![Value(Type::array(Type::Qubit))],
            Builtin::ApplyToEach => vec![Gate, Value(Type::array(Type::Qubit))],
            Builtin::Message => vec![Value(Type::String)],
            Builtin::ResultArrayAsInt => vec![Value(Type::array(Type::Result))],
        }
    }

    pub fn arity(self) -> usize {
        self.params().len()
    }

    pub fn return_type(self) -> Type {
        match self {
            Builtin::M => Type::Result,
            Builtin::MultiM => Type::array(Type::Result),
            Builtin::ResultArrayAsInt => Type::Int,
            _ => Type::Unit,
        }
    }

    /// Unitary gates applied directly to qubit arguments.
    pub fn is_gate(self) -> bool {
        matches!(
            self,
            Builtin::H
                | Builtin::X
                | Builtin::Y
                | Builtin::Z
                | Builtin::S
                | Builtin::T
                | Builtin::Cnot
                | Builtin::Ccnot
        )
    }

    pub fn is_single_qubit_gate(self) -> bool {
        self.is_gate() && self.arity() == 1
    }

    /// Anything a `function` body may not do.
    pub fn is_quantum(self) -> bool {
        self.is_gate()
            || matches!(
                self,
                Builtin::M | Builtin::MultiM | Builtin::Reset | Builtin::ApplyToEach
            )
    }

    /// Whether the call has an observable effect (quantum state or trace).
    pub fn is_effectful(self) -> bool {
        !matches!(self, Builtin::ResultArrayAsInt)
    }

    /// Accepted as the first argument of `ApplyToEach`.
    pub fn is_each_target(self) -> bool {
        self.is_single_qubit_gate() || self == Builtin::Reset
    }
}

pub fn is_builtin(name: &str) -> bool {
    Builtin::from_name(name).is_some()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arities_match_registry() {
        let expect = [
            ("H", 1),
            ("X", 1),
            ("Y", 1),
            ("Z", 1),
            ("S", 1),
            ("T", 1),
            ("CNOT", 2),
            ("CCNOT", 3),
        ];
        for (name, n) in expect {
            assert_eq!(Builtin::from_name(name).unwrap().arity(), n, "{name}");
        }
        assert_eq!(Builtin::M.return_type(), Type::Result);
        assert_eq!(Builtin::MultiM.return_type(), Type::array(Type::Result));
        assert!(Builtin::from_name("Foo").is_none());
    }
}
