//! Every successful refactoring of every corpus program keeps the trace
//! distribution of its entry point.

mod common;

use std::collections::BTreeMap;

use qrt_core::analysis::analyze;
use qrt_core::refactor::{apply, candidates, follow_entry};
use qrt_core::sim::{check_equivalence_as, Limits, Verdict};
use qrt_core::{ast_equal, print};

#[test]
fn every_applicable_refactoring_preserves_behavior() {
    let limits = Limits::default();
    let mut applied: BTreeMap<String, usize> = BTreeMap::new();
    let mut failures = Vec::new();
    for (file, src) in common::corpus() {
        let p = common::parsed(&src);
        let entry = common::entry(&p);
        for req in candidates(&p) {
            let r = apply(&p, &req);
            if !r.is_ok() {
                assert!(
                    ast_equal(&r.program, &p),
                    "{file}: {req} failed but changed the program"
                );
                continue;
            }
            if let Err(d) = analyze(&r.program) {
                failures.push(format!("{file}: {req}: result does not analyze: {d:?}"));
                continue;
            }
            let Some(after) = follow_entry(&p, &r.program, &entry) else {
                failures.push(format!("{file}: {req}: entry lost"));
                continue;
            };
            match check_equivalence_as(&p, &entry, &r.program, &after, &limits) {
                Ok(Verdict::Equivalent) => {
                    *applied.entry(req.refactoring.to_string()).or_default() += 1
                }
                other => failures.push(format!("{file}: {req}: {other:?}\n{}", print(&r.program))),
            }
        }
    }
    eprintln!("{applied:#?}");
    assert!(
        failures.is_empty(),
        "{} failures:\n{}",
        failures.len(),
        failures.join("\n")
    );
}
