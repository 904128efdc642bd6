use std::fmt;

use serde::Serialize;

use crate::syntax::span::{SourceMap, Span};

/// Stable machine-readable diagnostic codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Code {
    #[serde(rename = "E_SYNTAX")]
    Syntax,
    #[serde(rename = "E_UNKNOWN_TYPE")]
    UnknownType,
    #[serde(rename = "E_UNBALANCED")]
    Unbalanced,
    #[serde(rename = "E_UNSUPPORTED")]
    Unsupported,
    #[serde(rename = "E_UNRESOLVED")]
    Unresolved,
    #[serde(rename = "E_AMBIGUOUS")]
    Ambiguous,
    #[serde(rename = "E_DUPLICATE")]
    Duplicate,
    #[serde(rename = "E_ARITY")]
    Arity,
    #[serde(rename = "E_TYPE")]
    Type,
    #[serde(rename = "E_QUBIT_ESCAPE")]
    QubitEscape,
    #[serde(rename = "E_DUPLICATE_QUBIT")]
    DuplicateQubit,
    #[serde(rename = "E_OVERLAP_CONTROL")]
    OverlapControl,
    #[serde(rename = "E_QUANTUM_IN_FUNCTION")]
    QuantumInFunction,
    #[serde(rename = "E_PRECONDITION")]
    Precondition,
    #[serde(rename = "E_REQUEST")]
    Request,
    #[serde(rename = "E_LIMIT")]
    Limit,
    #[serde(rename = "E_RELEASE_NONZERO")]
    ReleaseNonzero,
    #[serde(rename = "E_RUNTIME")]
    Runtime,
    #[serde(rename = "E_IO")]
    Io,
}

impl Code {
    pub fn as_str(self) -> &'static str {
        match self {
            Code::Syntax => "E_SYNTAX",
            Code::UnknownType => "E_UNKNOWN_TYPE",
            Code::Unbalanced => "E_UNBALANCED",
            Code::Unsupported => "E_UNSUPPORTED",
            Code::Unresolved => "E_UNRESOLVED",
            Code::Ambiguous => "E_AMBIGUOUS",
            Code::Duplicate => "E_DUPLICATE",
            Code::Arity => "E_ARITY",
            Code::Type => "E_TYPE",
            Code::QubitEscape => "E_QUBIT_ESCAPE",
            Code::DuplicateQubit => "E_DUPLICATE_QUBIT",
            Code::OverlapControl => "E_OVERLAP_CONTROL",
            Code::QuantumInFunction => "E_QUANTUM_IN_FUNCTION",
            Code::Precondition => "E_PRECONDITION",
            Code::Request => "E_REQUEST",
            Code::Limit => "E_LIMIT",
            Code::ReleaseNonzero => "E_RELEASE_NONZERO",
            Code::Runtime => "E_RUNTIME",
            Code::Io => "E_IO",
        }
    }
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Severity::Error => f.write_str("error"),
            Severity::Warning => f.write_str("warning"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Diagnostic {
    pub code: Code,
    pub severity: Severity,
    pub span: Option<Span>,
    pub message: String,
}

impl Diagnostic {
    pub fn error(code: Code, span: impl Into<Option<Span>>, message: impl Into<String>) -> Self {
        Diagnostic {
            code,
            severity: Severity::Error,
            span: span.into().filter(|s| !s.is_synthetic()),
            message: message.into(),
        }
    }

    pub fn precondition(message: impl Into<String>) -> Self {
        Self::error(Code::Precondition, None, message)
    }

    pub fn with_span(mut self, span: Span) -> Self {
        if !span.is_synthetic() {
            self.span = Some(span);
        }
        self
    }

    /// `file:line:col: error[CODE]: message`
    pub fn render(&self, files: &SourceMap) -> String {
        match self.span {
            Some(span) => format!(
                "{}:{}:{}: {}[{}]: {}",
                files.name(span.file),
                span.start.line,
                span.start.col,
                self.severity,
                self.code,
                self.message
            ),
            None => format!("{}[{}]: {}", self.severity, self.code, self.message),
        }
    }

    /// Render with an explicit file name, for callers without a [`SourceMap`].
    pub fn render_in(&self, file: &str) -> String {
        match self.span {
            Some(span) => format!(
                "{}:{}:{}: {}[{}]: {}",
                file, span.start.line, span.start.col, self.severity, self.code, self.message
            ),
            None => format!(
                "{}: {}[{}]: {}",
                file, self.severity, self.code, self.message
            ),
        }
    }

    pub fn to_json(&self, files: &SourceMap) -> serde_json::Value {
        let span = self.span.map(|s| {
            serde_json::json!({
                "file": files.name(s.file),
                "line": s.start.line,
                "col": s.start.col,
                "endLine": s.end.line,
                "endCol": s.end.col,
            })
        });
        serde_json::json!({
            "code": self.code,
            "severity": self.severity,
            "span": span,
            "message": self.message,
        })
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.span {
            Some(s) => write!(
                f,
                "{}:{}: {}[{}]: {}",
                s.start.line, s.start.col, self.severity, self.code, self.message
            ),
            None => write!(f, "{}[{}]: {}", self.severity, self.code, self.message),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::span::LineIndex;

    #[test]
    fn line_format_and_json() {
        let mut files = SourceMap::new();
        let id = files.add("a.qs");
        let idx = LineIndex::new(id, "x\n  bad");
        let d = Diagnostic::error(Code::Syntax, idx.span(4, 7), "unexpected token");
        assert_eq!(
            d.render(&files),
            "a.qs:2:3: error[E_SYNTAX]: unexpected token"
        );
        let j = d.to_json(&files);
        assert_eq!(j["code"], "E_SYNTAX");
        assert_eq!(j["span"]["endCol"], 6);
        assert_eq!(j["severity"], "error");
    }
}
