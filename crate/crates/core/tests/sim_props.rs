//! Simulator properties against independent oracles.

mod common;

use std::collections::BTreeMap;

use common::{circuit, Circuit, Op};
use proptest::prelude::*;
use qrt_core::sim::{check_equivalence, run_distribution, Limits, TraceDistribution, Verdict};

type C = (f64, f64);

fn mul(a: C, b: C) -> C {
    (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0)
}

/// Straight statevector arithmetic over the op list, branching on every
/// measurement; MultiM is expanded into one M per qubit.
struct Oracle {
    n: usize,
    out: BTreeMap<Vec<String>, f64>,
}

impl Oracle {
    fn gate(&self, s: &mut [C], q: usize, m: [[C; 2]; 2]) {
        let bit = 1 << q;
        for i in 0..s.len() {
            if i & bit == 0 {
                let (a, b) = (s[i], s[i | bit]);
                let r0 = mul(m[0][0], a);
                let r0b = mul(m[0][1], b);
                let r1 = mul(m[1][0], a);
                let r1b = mul(m[1][1], b);
                s[i] = (r0.0 + r0b.0, r0.1 + r0b.1);
                s[i | bit] = (r1.0 + r1b.0, r1.1 + r1b.1);
            }
        }
    }

    fn flip_if(&self, s: &mut [C], controls: &[usize], t: usize) {
        let bit = 1 << t;
        for i in 0..s.len() {
            if i & bit == 0 && controls.iter().all(|c| i & (1 << c) != 0) {
                s.swap(i, i | bit);
            }
        }
    }

    fn named(&self, g: &str) -> [[C; 2]; 2] {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let (o, z) = ((1.0, 0.0), (0.0, 0.0));
        match g {
            "H" => [[(h, 0.0), (h, 0.0)], [(h, 0.0), (-h, 0.0)]],
            "X" => [[z, o], [o, z]],
            "Y" => [[z, (0.0, -1.0)], [(0.0, 1.0), z]],
            "Z" => [[o, z], [z, (-1.0, 0.0)]],
            "S" => [[o, z], [z, (0.0, 1.0)]],
            "T" => [[o, z], [z, (h, h)]],
            _ => unreachable!(),
        }
    }

    /// Runs the steps from one branch; `acc` holds the results of the
    /// measurement statement in progress.
    fn run(&mut self, steps: &[Step], mut s: Vec<C>, p: f64, trace: Vec<String>, acc: Vec<bool>) {
        let Some((step, rest)) = steps.split_first() else {
            *self.out.entry(trace).or_insert(0.0) += p;
            return;
        };
        match step {
            Step::Gate(g, q) => self.gate(&mut s, *q, self.named(g)),
            Step::Mcx(c, t) => self.flip_if(&mut s, c, *t),
            Step::Measure { q, label, reset } => {
                let bit = 1 << q;
                let p1: f64 = s
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| i & bit != 0)
                    .map(|(_, a)| a.0 * a.0 + a.1 * a.1)
                    .sum();
                for (outcome, po) in [(false, 1.0 - p1), (true, p1)] {
                    if po < 1e-12 {
                        continue;
                    }
                    let norm = po.sqrt();
                    let mut c: Vec<C> = s
                        .iter()
                        .enumerate()
                        .map(|(i, a)| {
                            if (i & bit != 0) == outcome {
                                (a.0 / norm, a.1 / norm)
                            } else {
                                (0.0, 0.0)
                            }
                        })
                        .collect();
                    let mut t = trace.clone();
                    let mut results = acc.clone();
                    if *reset {
                        if outcome {
                            self.flip_if(&mut c, &[], *q);
                        }
                    } else {
                        results.push(outcome);
                    }
                    if let Some((l, array)) = label {
                        let shown: Vec<&str> = results
                            .iter()
                            .map(|&r| if r { "One" } else { "Zero" })
                            .collect();
                        t.push(if *array {
                            format!("{l} [{}]", shown.join(", "))
                        } else {
                            format!("{l} {}", shown[0])
                        });
                        results.clear();
                    }
                    self.run(rest, c, p * po, t, results);
                }
                return;
            }
        }
        self.run(rest, s, p, trace, acc);
    }
}

#[derive(Clone, Debug)]
enum Step {
    Gate(&'static str, usize),
    Mcx(Vec<usize>, usize),
    /// `label` is the message printed once this measurement statement
    /// completes, and whether its value is an array.
    Measure {
        q: usize,
        label: Option<(String, bool)>,
        reset: bool,
    },
}

fn steps(c: &Circuit) -> Vec<Step> {
    let mut v = Vec::new();
    for (k, op) in c.ops.iter().enumerate() {
        match op {
            Op::Gate(g, a) => v.push(Step::Gate(g, *a)),
            Op::Cnot(a, b) | Op::ControlledX(a, b) => v.push(Step::Mcx(vec![*a], *b)),
            Op::Ccnot(a, b, t) => v.push(Step::Mcx(vec![*a, *b], *t)),
            Op::M(a) => v.push(Step::Measure {
                q: *a,
                label: Some((format!("m{k}"), false)),
                reset: false,
            }),
            Op::MultiM => {
                for q in 0..c.n {
                    let label = (q + 1 == c.n).then(|| (format!("m{k}"), true));
                    v.push(Step::Measure {
                        q,
                        label,
                        reset: false,
                    });
                }
            }
        }
    }
    for q in 0..c.n {
        v.push(Step::Measure {
            q,
            label: None,
            reset: true,
        });
    }
    v
}

fn oracle(c: &Circuit) -> BTreeMap<Vec<String>, f64> {
    let mut o = Oracle {
        n: c.n,
        out: BTreeMap::new(),
    };
    let mut s = vec![(0.0, 0.0); 1 << o.n];
    s[0] = (1.0, 0.0);
    o.run(&steps(c), s, 1.0, Vec::new(), Vec::new());
    o.out
}

fn close(a: &TraceDistribution, b: &BTreeMap<Vec<String>, f64>) -> bool {
    a.entries.len() == b.len()
        && b.iter()
            .all(|(k, p)| a.entries.get(k).is_some_and(|q| (p - q).abs() <= 1e-9))
}

proptest! {
    #![proptest_config(common::config(256))]

    #[test]
    fn matches_brute_force_enumeration(c in circuit(3, 10, 2)) {
        let p = common::parsed(&c.source());
        let d = run_distribution(&p, "Main", &Limits::default()).unwrap();
        let want = oracle(&c);
        prop_assert!(close(&d, &want), "{}\n{:?}\n{:?}", c.source(), d.entries, want);
    }

    #[test]
    fn distributions_are_normalized_and_deterministic(c in circuit(3, 12, 3)) {
        let p = common::parsed(&c.source());
        let a = run_distribution(&p, "Main", &Limits::default()).unwrap();
        let b = run_distribution(&p, "Main", &Limits::default()).unwrap();
        prop_assert!((a.total() + a.pruned - 1.0).abs() <= 1e-9);
        prop_assert!(a.pruned <= 1e-9);
        prop_assert_eq!(a.entries.len(), b.entries.len());
        for (k, v) in &a.entries {
            prop_assert_eq!(v.to_bits(), b.entries[k].to_bits());
        }
    }
}

#[test]
fn bell_correlation() {
    // (|00> + |11>)/sqrt(2): each basis amplitude 1/sqrt(2), so each
    // agreeing outcome has probability 1/2 and the disagreeing ones 0
    let amp = std::f64::consts::FRAC_1_SQRT_2;
    let want = amp * amp;
    let src = std::fs::read_to_string(common::corpus_dir().join("figure1.qs")).unwrap();
    let d = run_distribution(&common::parsed(&src), "HelloWorld", &Limits::default()).unwrap();
    assert_eq!(d.entries.len(), 2);
    for (trace, p) in &d.entries {
        assert!((p - want).abs() <= 1e-9);
        let q = trace
            .iter()
            .find(|l| l.starts_with("Measured qubit"))
            .unwrap();
        let a = trace
            .iter()
            .find(|l| l.starts_with("Measured ancilla"))
            .unwrap();
        assert_eq!(q.rsplit(' ').next(), a.rsplit(' ').next(), "{trace:?}");
    }
}

fn only_trace(file: &str) -> Vec<String> {
    let src = std::fs::read_to_string(common::corpus_dir().join(file)).unwrap();
    let p = common::parsed(&src);
    let d = run_distribution(&p, &common::entry(&p), &Limits::default()).unwrap();
    assert_eq!(d.entries.len(), 1, "{file}: {:?}", d.entries);
    d.entries.into_keys().next().unwrap()
}

#[test]
fn deterministic_algorithms() {
    assert_eq!(only_trace("grover.qs"), ["found 3"]);
    assert_eq!(only_trace("teleport.qs").last().unwrap(), "received One");
    assert_eq!(only_trace("deutsch.qs"), ["balanced"]);
    assert_eq!(only_trace("superdense.qs"), ["bits OneZero"]);
    assert_eq!(only_trace("classical.qs"), ["fib 8", "odd False", "fib 5"]);
}

#[test]
fn corpus_mass_is_complete() {
    for (file, src) in common::corpus() {
        let p = common::parsed(&src);
        let d = run_distribution(&p, &common::entry(&p), &Limits::default()).unwrap();
        assert!(
            (d.total() - 1.0).abs() <= 1e-9 && d.pruned <= 1e-9,
            "{file}"
        );
    }
}

#[test]
fn figure_two_fixtures_agree() {
    let read =
        |f: &str| common::parsed(&std::fs::read_to_string(common::corpus_dir().join(f)).unwrap());
    let v = check_equivalence(
        &read("figure2_before.qs"),
        &read("figure2_after.qs"),
        "Main",
        &Limits::default(),
    )
    .unwrap();
    assert_eq!(v, Verdict::Equivalent);
}
