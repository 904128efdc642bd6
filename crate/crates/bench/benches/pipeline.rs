use criterion::{black_box, criterion_group, criterion_main, Criterion};
use qrt_bench::{corpus, program};
use qrt_core::analysis::{analyze, build_pdg};
use qrt_core::refactor::{apply, candidates, Refactoring, RefactoringRequest};
use qrt_core::sim::{check_equivalence, run_distribution, Limits};
use qrt_core::{parse, print, FileId};

fn syntax(c: &mut Criterion) {
    let files = corpus();
    c.bench_function("parse corpus", |b| {
        b.iter(|| {
            for (_, src) in &files {
                black_box(parse(src, FileId(0)).unwrap());
            }
        })
    });
    let programs: Vec<_> = files
        .iter()
        .map(|(_, s)| parse(s, FileId(0)).unwrap())
        .collect();
    c.bench_function("print corpus", |b| {
        b.iter(|| {
            for p in &programs {
                black_box(print(p));
            }
        })
    });
    let wide =
        "namespace N { operation F() : Unit { ".to_owned() + &"H(q); ".repeat(20_000) + "} }";
    c.bench_function("parse 120 KiB line", |b| {
        b.iter(|| black_box(parse(&wide, FileId(0))))
    });
}

fn analysis(c: &mut Criterion) {
    let p = program("teleport.qs");
    c.bench_function("analyze teleport", |b| {
        b.iter(|| black_box(analyze(&p).unwrap()))
    });
    let syms = analyze(&p).unwrap();
    c.bench_function("pdg teleport", |b| {
        b.iter(|| black_box(build_pdg(&p, &syms, (0, 0))))
    });
}

fn refactor(c: &mut Criterion) {
    let before = program("figure2_before.qs");
    let split = RefactoringRequest::new(
        Refactoring::SplitOperation,
        "MyNamespace.PerformQuantumSimulation",
    )
    .arg(
        "split",
        "0..3:PerformQuantumOperations,4..6:MeasureAndDisplayResult[i=iteration]",
    );
    c.bench_function("split figure2", |b| {
        b.iter(|| black_box(apply(&before, &split)))
    });
    let after = apply(&before, &split).program;
    c.bench_function("verify split figure2", |b| {
        b.iter(|| {
            black_box(check_equivalence(
                &before,
                &after,
                "MyNamespace.Main",
                &Limits::default(),
            ))
        })
    });
    let fig1 = program("figure1.qs");
    let reqs = candidates(&fig1);
    c.bench_function("apply every candidate on figure1", |b| {
        b.iter(|| {
            for r in &reqs {
                black_box(apply(&fig1, r));
            }
        })
    });
}

fn simulate(c: &mut Criterion) {
    for name in ["grover.qs", "wide.qs", "random_bits.qs"] {
        let p = program(name);
        c.bench_function(&format!("distribution {name}"), |b| {
            b.iter(|| black_box(run_distribution(&p, "Main", &Limits::default()).unwrap()))
        });
    }
}

criterion_group!(benches, syntax, analysis, refactor, simulate);
criterion_main!(benches);
