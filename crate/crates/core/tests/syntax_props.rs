//! Parser and printer properties.

mod common;

use proptest::prelude::*;
use qrt_core::syntax::ast::{Comment, Expr, ExprKind, Ident};
use qrt_core::syntax::visit::{self, VisitMut};
use qrt_core::{ast_equal, parse, print, FileId, Program};

#[test]
fn corpus_round_trips() {
    for (file, src) in common::corpus() {
        let p = common::parsed(&src);
        let text = print(&p);
        let q = parse(&text, FileId(0)).unwrap_or_else(|d| panic!("{file}: {d:?}"));
        assert!(ast_equal(&p, &q), "{file}");
        assert_eq!(print(&q), text, "{file}: printing is not idempotent");
    }
}

/// Every identifier and name reference with its source text.
struct Names(Vec<(String, u32, u32)>);

impl VisitMut for Names {
    fn visit_ident(&mut self, id: &mut Ident) {
        self.0.push((id.name.clone(), id.span.lo, id.span.hi));
    }
    fn visit_expr(&mut self, e: &mut Expr) {
        if let ExprKind::Name(n) = &e.kind {
            self.0.push((n.clone(), e.span.lo, e.span.hi));
        }
        visit::walk_expr_mut(self, e);
    }
}

fn check_spans(src: &str) {
    let mut p = common::parsed(src);
    let mut names = Names(Vec::new());
    names.visit_program(&mut p);
    assert!(!names.0.is_empty());
    for (name, lo, hi) in names.0 {
        assert_eq!(&src[lo as usize..hi as usize], name);
    }
}

#[test]
fn identifier_spans_cover_their_text() {
    for (_, src) in common::corpus() {
        check_spans(&src);
    }
}

struct Comments(Vec<String>);

impl VisitMut for Comments {
    fn visit_comments(&mut self, c: &mut Vec<Comment>) {
        self.0.extend(c.iter().map(|c| c.text.clone()));
    }
}

fn comments(p: &Program) -> Vec<String> {
    let mut c = Comments(Vec::new());
    c.visit_program(&mut p.clone());
    c.0
}

#[test]
fn comments_survive_printing() {
    for (file, src) in common::corpus() {
        let p = common::parsed(&src);
        let expected = src
            .lines()
            .filter(|l| l.trim_start().starts_with("//"))
            .count();
        assert_eq!(comments(&p).len(), expected, "{file}");
        assert_eq!(
            comments(&common::parsed(&print(&p))),
            comments(&p),
            "{file}"
        );
    }
}

#[test]
fn large_inputs_do_not_crash() {
    let deep =
        "namespace N { operation F() : Unit { let x = ".to_owned() + &"(".repeat(1 << 19) + "1;";
    assert!(parse(&deep, FileId(0)).is_err());
    let wide =
        "namespace N { operation F() : Unit { ".to_owned() + &"H(q); ".repeat(170_000) + "} }";
    assert!(wide.len() <= 1 << 20);
    let _ = parse(&wide, FileId(0));
}

/// A corpus program with a few random byte edits.
fn mutated() -> impl Strategy<Value = Vec<u8>> {
    let corpus: Vec<Vec<u8>> = common::corpus()
        .into_iter()
        .map(|(_, s)| s.into_bytes())
        .collect();
    (
        0..corpus.len(),
        proptest::collection::vec((any::<prop::sample::Index>(), any::<u8>(), 0..3u8), 1..8),
    )
        .prop_map(move |(i, edits)| {
            let mut b = corpus[i].clone();
            for (at, byte, kind) in edits {
                let k = at.index(b.len().max(1));
                match kind {
                    0 if k < b.len() => b[k] = byte,
                    1 => b.insert(k.min(b.len()), byte),
                    _ if k < b.len() => {
                        b.remove(k);
                    }
                    _ => {}
                }
            }
            b
        })
}

proptest! {
    #![proptest_config(common::config(2000))]

    #[test]
    fn arbitrary_bytes_never_crash(bytes in proptest::collection::vec(any::<u8>(), 0..4096)) {
        let _ = parse(&String::from_utf8_lossy(&bytes), FileId(0));
    }

    #[test]
    fn edited_programs_parse_or_fail_cleanly(bytes in mutated()) {
        let src = String::from_utf8_lossy(&bytes);
        match parse(&src, FileId(0)) {
            Ok(p) => {
                let again = parse(&print(&p), FileId(0));
                prop_assert!(again.is_ok_and(|q| ast_equal(&p, &q)));
            }
            Err(d) => prop_assert!(!d.is_empty()),
        }
    }

    #[test]
    fn generated_circuits_round_trip(c in common::circuit(3, 12, 3)) {
        let src = c.source();
        check_spans(&src);
        let p = common::parsed(&src);
        prop_assert!(ast_equal(&p, &common::parsed(&print(&p))));
    }
}
