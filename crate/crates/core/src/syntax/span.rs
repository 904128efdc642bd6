use serde::Serialize;

/// Identifies one source file inside a [`SourceMap`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct FileId(pub u32);

/// 1-based line and column. Columns count characters, not bytes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct LineCol {
    pub line: u32,
    pub col: u32,
}

/// A half-open byte range `[lo, hi)` in one file, with the matching
/// line/column positions precomputed.
///
/// Nodes synthesized by refactorings carry `Span::default()` until the
/// edited program is printed and re-parsed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Span {
    pub file: FileId,
    pub lo: u32,
    pub hi: u32,
    pub start: LineCol,
    pub end: LineCol,
}

impl Span {
    pub fn is_synthetic(&self) -> bool {
        self.start.line == 0
    }

    /// Smallest span covering both `self` and `other`.
    pub fn to(self, other: Span) -> Span {
        if self.is_synthetic() {
            return other;
        }
        if other.is_synthetic() {
            return self;
        }
        let (start, lo) = if self.lo <= other.lo {
            (self.start, self.lo)
        } else {
            (other.start, other.lo)
        };
        let (end, hi) = if self.hi >= other.hi {
            (self.end, self.hi)
        } else {
            (other.end, other.hi)
        };
        Span {
            file: self.file,
            lo,
            hi,
            start,
            end,
        }
    }

    pub fn contains(&self, other: &Span) -> bool {
        self.file == other.file && self.lo <= other.lo && other.hi <= self.hi
    }
}

/// Byte offset to line/column conversion for one file.
#[derive(Clone, Debug)]
pub struct LineIndex {
    file: FileId,
    line_starts: Vec<u32>,
    ascii_lines: Vec<bool>,
    text: String,
}

impl LineIndex {
    pub fn new(file: FileId, text: &str) -> Self {
        let mut line_starts = vec![0];
        for (i, b) in text.bytes().enumerate() {
            if b == b'\n' {
                line_starts.push(i as u32 + 1);
            }
        }
        let ascii_lines = (0..line_starts.len())
            .map(|i| {
                let end = line_starts.get(i + 1).map_or(text.len(), |&e| e as usize);
                text.as_bytes()[line_starts[i] as usize..end].is_ascii()
            })
            .collect();
        LineIndex {
            file,
            line_starts,
            ascii_lines,
            text: text.to_owned(),
        }
    }

    pub fn line_col(&self, offset: u32) -> LineCol {
        let line = match self.line_starts.binary_search(&offset) {
            Ok(i) => i,
            Err(i) => i - 1,
        };
        let start = self.line_starts[line] as usize;
        let end = (offset as usize).min(self.text.len());
        let col = if self.ascii_lines[line] {
            end.saturating_sub(start)
        } else {
            self.text
                .get(start..end)
                .map(|s| s.chars().count())
                .unwrap_or(end - start)
        };
        LineCol {
            line: line as u32 + 1,
            col: col as u32 + 1,
        }
    }

    pub fn span(&self, lo: u32, hi: u32) -> Span {
        Span {
            file: self.file,
            lo,
            hi,
            start: self.line_col(lo),
            end: self.line_col(hi),
        }
    }
}

/// File names for rendering diagnostics.
#[derive(Clone, Debug, Default)]
pub struct SourceMap {
    names: Vec<String>,
}

impl SourceMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, name: impl Into<String>) -> FileId {
        self.names.push(name.into());
        FileId(self.names.len() as u32 - 1)
    }

    pub fn name(&self, id: FileId) -> &str {
        self.names
            .get(id.0 as usize)
            .map(String::as_str)
            .unwrap_or("<unknown>")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_col_counts_chars() {
        let idx = LineIndex::new(FileId(0), "ab\nçd\n");
        assert_eq!(idx.line_col(0), LineCol { line: 1, col: 1 });
        assert_eq!(idx.line_col(3), LineCol { line: 2, col: 1 });
        // 'ç' is two bytes
        assert_eq!(idx.line_col(5), LineCol { line: 2, col: 2 });
        assert_eq!(idx.line_col(7), LineCol { line: 3, col: 1 });
    }

    #[test]
    fn join_spans() {
        let idx = LineIndex::new(FileId(0), "let x = 1;");
        let a = idx.span(0, 3);
        let b = idx.span(8, 10);
        let j = a.to(b);
        assert_eq!((j.lo, j.hi), (0, 10));
        assert_eq!(Span::default().to(b), b);
    }
}
