//! Inputs shared by the benchmarks.

use std::path::PathBuf;

use qrt_core::{parse, FileId, Program};

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/corpus")
}

/// Source text of a corpus file.
pub fn source(name: &str) -> String {
    std::fs::read_to_string(corpus_dir().join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn program(name: &str) -> Program {
    parse(&source(name), FileId(0)).unwrap_or_else(|d| panic!("{name}: {d:?}"))
}

/// Every corpus file, sorted by name.
pub fn corpus() -> Vec<(String, String)> {
    let mut v: Vec<(String, String)> = std::fs::read_dir(corpus_dir())
        .expect("corpus directory")
        .filter_map(|e| {
            let p = e.ok()?.path();
            (p.extension()? == "qs").then(|| {
                let name = p.file_name().unwrap().to_string_lossy().into_owned();
                (name.clone(), source(&name))
            })
        })
        .collect();
    v.sort();
    v
}
