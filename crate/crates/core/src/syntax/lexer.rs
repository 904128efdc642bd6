use crate::diagnostic::{Code, Diagnostic};

use super::span::LineIndex;

#[derive(Clone, Debug, PartialEq)]
pub enum Tok {
    Ident(String),
    Int(i64),
    Double(f64),
    Str(String),
    /// `$"..."`: raw text between the quotes and the byte offset where it starts.
    Interp {
        raw: String,
        base: u32,
    },
    Kw(Kw),
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Comma,
    Semi,
    Colon,
    Assign,
    EqEq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Plus,
    Minus,
    Star,
    Slash,
    Percent,
    DotDot,
    Eof,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kw {
    Namespace,
    Open,
    Operation,
    Function,
    Let,
    Mutable,
    Set,
    Using,
    For,
    In,
    If,
    Elif,
    Else,
    Return,
    True,
    False,
    And,
    Or,
    Not,
    Controlled,
    Zero,
    One,
}

fn keyword(s: &str) -> Option<Kw> {
    Some(match s {
        "namespace" => Kw::Namespace,
        "open" => Kw::Open,
        "operation" => Kw::Operation,
        "function" => Kw::Function,
        "let" => Kw::Let,
        "mutable" => Kw::Mutable,
        "set" => Kw::Set,
        "using" => Kw::Using,
        "for" => Kw::For,
        "in" => Kw::In,
        "if" => Kw::If,
        "elif" => Kw::Elif,
        "else" => Kw::Else,
        "return" => Kw::Return,
        "true" => Kw::True,
        "false" => Kw::False,
        "and" => Kw::And,
        "or" => Kw::Or,
        "not" => Kw::Not,
        "Controlled" => Kw::Controlled,
        "Zero" => Kw::Zero,
        "One" => Kw::One,
        _ => return None,
    })
}

/// Whether `s` can name a variable or callable: an ASCII identifier that
/// is neither a keyword, a type name nor an unsupported Q# word.
pub fn is_plain_ident(s: &str) -> bool {
    let mut chars = s.chars();
    let head_ok = chars
        .next()
        .is_some_and(|c| c.is_ascii_alphabetic() || c == '_');
    head_ok
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && keyword(s).is_none()
        && !UNSUPPORTED_WORDS.contains(&s)
        && !matches!(
            s,
            "Unit" | "Int" | "Double" | "Bool" | "String" | "Result" | "Range" | "Qubit" | "_"
        )
}

/// Q# words outside the supported subset. Using one is `E_UNSUPPORTED`
/// rather than a plain syntax error.
pub const UNSUPPORTED_WORDS: &[&str] = &[
    "use",
    "borrow",
    "borrowing",
    "repeat",
    "until",
    "fixup",
    "within",
    "apply",
    "while",
    "newtype",
    "struct",
    "Adjoint",
    "Adj",
    "Ctl",
    "is",
    "body",
    "adjoint",
    "controlled",
    "intrinsic",
    "internal",
    "new",
    "fail",
    "import",
    "export",
    "Pauli",
    "PauliX",
    "PauliY",
    "PauliZ",
    "PauliI",
    "BigInt",
];

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub lo: u32,
    pub hi: u32,
    /// `//` comments that precede this token: (text after `//`, lo, hi).
    pub comments: Vec<(String, u32, u32)>,
}

pub struct Lexer<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
    /// Added to every reported offset (used for interpolation holes).
    base: u32,
    lines: &'a LineIndex,
}

impl<'a> Lexer<'a> {
    pub fn new(src: &'a str, base: u32, lines: &'a LineIndex) -> Self {
        Lexer {
            src,
            bytes: src.as_bytes(),
            pos: 0,
            base,
            lines,
        }
    }

    fn err(&self, code: Code, lo: usize, hi: usize, msg: impl Into<String>) -> Diagnostic {
        Diagnostic::error(
            code,
            self.lines
                .span(self.base + lo as u32, self.base + hi as u32),
            msg,
        )
    }

    pub fn tokenize(mut self) -> Result<Vec<Token>, Diagnostic> {
        let mut out = Vec::new();
        loop {
            let comments = self.skip_trivia();
            let start = self.pos;
            let tok = self.next_tok()?;
            let done = tok == Tok::Eof;
            out.push(Token {
                tok,
                lo: self.base + start as u32,
                hi: self.base + self.pos as u32,
                comments,
            });
            if done {
                return Ok(out);
            }
        }
    }

    fn peek(&self, off: usize) -> u8 {
        self.bytes.get(self.pos + off).copied().unwrap_or(0)
    }

    fn skip_trivia(&mut self) -> Vec<(String, u32, u32)> {
        let mut comments = Vec::new();
        loop {
            let c = self.peek(0);
            if c == b' ' || c == b'\t' || c == b'\r' || c == b'\n' {
                self.pos += 1;
            } else if c == b'/' && self.peek(1) == b'/' {
                let lo = self.pos;
                while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                    self.pos += 1;
                }
                let text = self.src[lo + 2..self.pos].trim_end().to_owned();
                comments.push((text, self.base + lo as u32, self.base + self.pos as u32));
            } else {
                return comments;
            }
        }
    }

    fn next_tok(&mut self) -> Result<Tok, Diagnostic> {
        let start = self.pos;
        let Some(&c) = self.bytes.get(self.pos) else {
            return Ok(Tok::Eof);
        };
        if c.is_ascii_alphabetic() || c == b'_' {
            return Ok(self.ident_or_kw());
        }
        if c.is_ascii_digit() {
            return self.number();
        }
        if c == b'"' {
            self.pos += 1;
            return self.string(start);
        }
        if c == b'$' && self.peek(1) == b'"' {
            self.pos += 2;
            return self.interp(start);
        }
        let two = (c, self.peek(1));
        let (tok, len) = match two {
            (b'=', b'=') => (Tok::EqEq, 2),
            (b'!', b'=') => (Tok::Ne, 2),
            (b'<', b'=') => (Tok::Le, 2),
            (b'>', b'=') => (Tok::Ge, 2),
            (b'.', b'.') => (Tok::DotDot, 2),
            (b'(', _) => (Tok::LParen, 1),
            (b')', _) => (Tok::RParen, 1),
            (b'{', _) => (Tok::LBrace, 1),
            (b'}', _) => (Tok::RBrace, 1),
            (b'[', _) => (Tok::LBracket, 1),
            (b']', _) => (Tok::RBracket, 1),
            (b',', _) => (Tok::Comma, 1),
            (b';', _) => (Tok::Semi, 1),
            (b':', _) => (Tok::Colon, 1),
            (b'=', _) => (Tok::Assign, 1),
            (b'<', _) => (Tok::Lt, 1),
            (b'>', _) => (Tok::Gt, 1),
            (b'+', _) => (Tok::Plus, 1),
            (b'-', _) => (Tok::Minus, 1),
            (b'*', _) => (Tok::Star, 1),
            (b'/', _) => (Tok::Slash, 1),
            (b'%', _) => (Tok::Percent, 1),
            _ => {
                let ch = self.src[start..].chars().next().unwrap_or('?');
                let code = if matches!(ch, '@' | '&' | '|' | '^' | '~' | '?' | '!' | '\'') {
                    Code::Unsupported
                } else {
                    Code::Syntax
                };
                return Err(self.err(
                    code,
                    start,
                    start + ch.len_utf8(),
                    format!("unexpected character `{ch}`"),
                ));
            }
        };
        self.pos += len;
        Ok(tok)
    }

    fn ident_or_kw(&mut self) -> Tok {
        let start = self.pos;
        loop {
            while self.pos < self.bytes.len()
                && (self.bytes[self.pos].is_ascii_alphanumeric() || self.bytes[self.pos] == b'_')
            {
                self.pos += 1;
            }
            // dotted continuation `A.B`, but not a range `a..b`
            if self.peek(0) == b'.' && (self.peek(1).is_ascii_alphabetic() || self.peek(1) == b'_')
            {
                self.pos += 1;
                continue;
            }
            break;
        }
        let text = &self.src[start..self.pos];
        match keyword(text) {
            Some(k) => Tok::Kw(k),
            None => Tok::Ident(text.to_owned()),
        }
    }

    fn number(&mut self) -> Result<Tok, Diagnostic> {
        let start = self.pos;
        while self.peek(0).is_ascii_digit() {
            self.pos += 1;
        }
        let mut is_double = false;
        if self.peek(0) == b'.' && self.peek(1).is_ascii_digit() {
            is_double = true;
            self.pos += 1;
            while self.peek(0).is_ascii_digit() {
                self.pos += 1;
            }
        }
        if matches!(self.peek(0), b'e' | b'E') {
            let sign = matches!(self.peek(1), b'+' | b'-') as usize;
            if self.peek(1 + sign).is_ascii_digit() {
                is_double = true;
                self.pos += 1 + sign;
                while self.peek(0).is_ascii_digit() {
                    self.pos += 1;
                }
            }
        }
        if self.peek(0).is_ascii_alphabetic() || self.peek(0) == b'_' {
            return Err(self.err(
                Code::Syntax,
                start,
                self.pos + 1,
                "malformed numeric literal",
            ));
        }
        let text = &self.src[start..self.pos];
        if is_double {
            text.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .map(Tok::Double)
                .ok_or_else(|| self.err(Code::Syntax, start, self.pos, "invalid double literal"))
        } else {
            text.parse::<i64>().map(Tok::Int).map_err(|_| {
                self.err(
                    Code::Syntax,
                    start,
                    self.pos,
                    "integer literal out of range",
                )
            })
        }
    }

    fn string(&mut self, start: usize) -> Result<Tok, Diagnostic> {
        let mut out = String::new();
        loop {
            let Some(ch) = self.src[self.pos..].chars().next() else {
                return Err(self.err(Code::Syntax, start, self.pos, "unterminated string"));
            };
            self.pos += ch.len_utf8();
            match ch {
                '"' => return Ok(Tok::Str(out)),
                '\\' => {
                    let Some(e) = self.src[self.pos..].chars().next() else {
                        return Err(self.err(Code::Syntax, start, self.pos, "unterminated string"));
                    };
                    self.pos += e.len_utf8();
                    out.push(unescape(e).ok_or_else(|| {
                        self.err(
                            Code::Syntax,
                            self.pos - 2,
                            self.pos,
                            format!("unknown escape `\\{e}`"),
                        )
                    })?);
                }
                '\n' => return Err(self.err(Code::Syntax, start, self.pos, "unterminated string")),
                c => out.push(c),
            }
        }
    }

    fn interp(&mut self, start: usize) -> Result<Tok, Diagnostic> {
        let body = self.pos;
        let mut in_hole = false;
        loop {
            let Some(ch) = self.src[self.pos..].chars().next() else {
                return Err(self.err(Code::Syntax, start, self.pos, "unterminated string"));
            };
            match ch {
                '"' if in_hole => {
                    return Err(self.err(
                        Code::Unsupported,
                        self.pos,
                        self.pos + 1,
                        "string literals inside interpolation holes are not supported",
                    ))
                }
                '"' => {
                    let raw = self.src[body..self.pos].to_owned();
                    self.pos += 1;
                    return Ok(Tok::Interp {
                        raw,
                        base: self.base + body as u32,
                    });
                }
                '\\' if !in_hole => {
                    self.pos += 1;
                    if let Some(e) = self.src[self.pos..].chars().next() {
                        self.pos += e.len_utf8();
                    }
                    continue;
                }
                '{' if !in_hole => in_hole = true,
                '{' => {
                    return Err(self.err(
                        Code::Syntax,
                        self.pos,
                        self.pos + 1,
                        "nested `{` in interpolation hole",
                    ))
                }
                '}' if in_hole => in_hole = false,
                '\n' => return Err(self.err(Code::Syntax, start, self.pos, "unterminated string")),
                _ => {}
            }
            self.pos += ch.len_utf8();
        }
    }
}

pub fn unescape(e: char) -> Option<char> {
    Some(match e {
        'n' => '\n',
        't' => '\t',
        'r' => '\r',
        '\\' => '\\',
        '"' => '"',
        '{' => '{',
        '}' => '}',
        _ => return None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::span::FileId;

    fn lex(src: &str) -> Vec<Tok> {
        let idx = LineIndex::new(FileId(0), src);
        Lexer::new(src, 0, &idx)
            .tokenize()
            .unwrap()
            .into_iter()
            .map(|t| t.tok)
            .collect()
    }

    #[test]
    fn ranges_and_dotted_names() {
        assert_eq!(
            lex("1..n A.B qs[0..1]"),
            vec![
                Tok::Int(1),
                Tok::DotDot,
                Tok::Ident("n".into()),
                Tok::Ident("A.B".into()),
                Tok::Ident("qs".into()),
                Tok::LBracket,
                Tok::Int(0),
                Tok::DotDot,
                Tok::Int(1),
                Tok::RBracket,
                Tok::Eof
            ]
        );
    }

    #[test]
    fn doubles() {
        assert_eq!(lex("1.5 2e3")[..2], [Tok::Double(1.5), Tok::Double(2000.0)]);
    }

    #[test]
    fn comments_attach_to_next_token() {
        let src = "// hello\nx";
        let idx = LineIndex::new(FileId(0), src);
        let toks = Lexer::new(src, 0, &idx).tokenize().unwrap();
        assert_eq!(toks[0].comments[0].0, " hello");
    }

    #[test]
    fn interpolated_raw_text() {
        let toks = lex(r#"$"a {x} b""#);
        assert_eq!(
            toks[0],
            Tok::Interp {
                raw: "a {x} b".into(),
                base: 2
            }
        );
    }

    #[test]
    fn unterminated_string_is_error() {
        let src = "\"abc";
        let idx = LineIndex::new(FileId(0), src);
        assert!(Lexer::new(src, 0, &idx).tokenize().is_err());
    }
}
