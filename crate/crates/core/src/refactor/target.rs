//! Target locators.

use std::fmt;

use crate::analysis::Path;
use crate::diagnostic::Diagnostic;

use super::request;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Target {
    /// `Ns.A` or `Ns.A,Ns.B`
    Callables(Vec<String>),
    /// `Ns.A::name` or `Ns.A::name@path`
    Symbol {
        callable: String,
        name: String,
        at: Option<Path>,
    },
    /// `Ns.A:path` or `Ns.A:path..path`
    Stmts {
        callable: String,
        from: Path,
        to: Path,
    },
}

impl Target {
    pub fn parse(s: &str) -> Result<Target, Diagnostic> {
        let s = s.trim();
        let bad = || request(format!("invalid target `{s}`"));
        if let Some((callable, rest)) = s.split_once("::") {
            let (name, at) = match rest.split_once('@') {
                Some((n, p)) => (n, Some(Path::parse(p).ok_or_else(bad)?)),
                None => (rest, None),
            };
            if callable.is_empty() || name.is_empty() {
                return Err(bad());
            }
            return Ok(Target::Symbol {
                callable: callable.to_owned(),
                name: name.to_owned(),
                at,
            });
        }
        if let Some((callable, range)) = s.split_once(':') {
            let (a, b) = range.split_once("..").unwrap_or((range, range));
            let from = Path::parse(a).ok_or_else(bad)?;
            let to = Path::parse(b).ok_or_else(bad)?;
            if callable.is_empty() {
                return Err(bad());
            }
            return Ok(Target::Stmts {
                callable: callable.to_owned(),
                from,
                to,
            });
        }
        let names: Vec<String> = s
            .split(',')
            .map(|n| n.trim().to_owned())
            .filter(|n| !n.is_empty())
            .collect();
        Ok(Target::Callables(names))
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::Callables(v) => f.write_str(&v.join(",")),
            Target::Symbol { callable, name, at } => {
                write!(f, "{callable}::{name}")?;
                if let Some(p) = at {
                    write!(f, "@{p}")?;
                }
                Ok(())
            }
            Target::Stmts { callable, from, to } if from == to => write!(f, "{callable}:{from}"),
            Target::Stmts { callable, from, to } => write!(f, "{callable}:{from}..{to}"),
        }
    }
}
