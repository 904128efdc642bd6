//! `qrt`: parse, refactor, verify and format Q# subset programs.

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args as ClapArgs, Parser, Subcommand, ValueEnum};
use serde_json::json;

use qrt_core::analysis::{self, entry_points, SymbolTable};
use qrt_core::refactor::{
    self, catalog, follow_entry, GateRuleTable, Refactoring, RefactoringRequest,
};
use qrt_core::sim::{self, Limits, Verdict};
use qrt_core::{parse, print, Code, Diagnostic, FileId, Program, SourceMap};

mod exit {
    pub const OK: u8 = 0;
    pub const DIFFERS: u8 = 1;
    pub const PRECONDITION: u8 = 2;
    pub const INEQUIVALENT: u8 = 3;
    pub const INPUT: u8 = 4;
    pub const INCONCLUSIVE: u8 = 5;
    pub const USAGE: u8 = 64;
    pub const INTERNAL: u8 = 70;
}

#[derive(Parser)]
#[command(
    name = "qrt",
    version,
    about = "Refactoring toolkit for a subset of Q#"
)]
struct Cli {
    /// Machine-readable output on stdout
    #[arg(long, global = true)]
    json: bool,
    /// Entry callable used for verification, e.g. `Main` or `Ns.Run(3)`
    #[arg(long, global = true)]
    entry: Option<String>,
    #[arg(long, global = true)]
    max_qubits: Option<usize>,
    #[arg(long, global = true)]
    max_branches: Option<usize>,
    /// Skip the behavior-preservation check
    #[arg(long, global = true)]
    no_verify: bool,
    /// Rewrite the input file in place
    #[arg(long, global = true)]
    write: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the refactorings and the catalog rows they implement
    List,
    /// Apply a refactoring
    Apply(Box<ApplyArgs>),
    /// Check two programs for equivalent behavior
    Check { a: PathBuf, b: PathBuf },
    /// Print the dependence graph of a callable
    Pdg {
        file: PathBuf,
        callable: String,
        #[arg(long, value_enum, default_value_t = PdgFormat::Text)]
        format: PdgFormat,
    },
    /// Print the canonical form of a program
    Fmt {
        file: PathBuf,
        /// Exit 1 when the file is not in canonical form
        #[arg(long)]
        check: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum PdgFormat {
    Text,
    Dot,
}

#[derive(ClapArgs)]
struct ApplyArgs {
    file: PathBuf,
    #[arg(long, required_unless_present = "batch")]
    refactoring: Option<String>,
    #[arg(long, required_unless_present = "batch", allow_hyphen_values = true)]
    target: Option<String>,
    /// JSON file holding one request or an array of requests
    #[arg(long, conflicts_with_all = ["refactoring", "target"])]
    batch: Option<PathBuf>,
    /// Print the full new source instead of a diff
    #[arg(long)]
    full: bool,
    /// Extra argument as key=value; repeatable
    #[arg(long = "arg", value_name = "KEY=VALUE")]
    extra: Vec<String>,
    #[arg(long)]
    name: Option<String>,
    #[arg(long)]
    split: Option<String>,
    #[arg(long)]
    params: Option<String>,
    #[arg(long)]
    other: Option<String>,
    #[arg(long)]
    namespace: Option<String>,
    #[arg(long)]
    callee: Option<String>,
    #[arg(long)]
    literal: Option<String>,
    #[arg(long)]
    param: Option<String>,
    #[arg(long)]
    rule: Option<String>,
    #[arg(long)]
    permutation: Option<String>,
    #[arg(long)]
    limit: Option<String>,
    #[arg(long)]
    var: Option<String>,
    #[arg(long)]
    add: Option<String>,
    #[arg(long)]
    remove: Option<String>,
    #[arg(long)]
    reorder: Option<String>,
}

impl ApplyArgs {
    fn request(&self) -> Result<RefactoringRequest, Failure> {
        let name = self.refactoring.as_deref().unwrap_or_default();
        let r = Refactoring::from_name(name).ok_or_else(|| {
            Failure::usage(format!("unknown refactoring `{name}`; see `qrt list`"))
        })?;
        let mut req = RefactoringRequest::new(r, self.target.clone().unwrap_or_default());
        let named = [
            ("name", &self.name),
            ("split", &self.split),
            ("params", &self.params),
            ("other", &self.other),
            ("namespace", &self.namespace),
            ("callee", &self.callee),
            ("literal", &self.literal),
            ("param", &self.param),
            ("rule", &self.rule),
            ("permutation", &self.permutation),
            ("limit", &self.limit),
            ("var", &self.var),
            ("add", &self.add),
            ("remove", &self.remove),
            ("reorder", &self.reorder),
        ];
        for (k, v) in named {
            if let Some(v) = v {
                req.args.insert(k.to_owned(), v.clone());
            }
        }
        for kv in &self.extra {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Failure::usage(format!("expected --arg key=value, got `{kv}`")))?;
            req.args.insert(k.to_owned(), v.to_owned());
        }
        Ok(req)
    }
}

/// A failed command: exit code plus what to print on stderr.
struct Failure {
    code: u8,
    lines: Vec<String>,
    json: Option<serde_json::Value>,
}

impl Failure {
    fn new(code: u8, msg: impl Into<String>) -> Self {
        Failure {
            code,
            lines: vec![msg.into()],
            json: None,
        }
    }

    fn usage(msg: impl Into<String>) -> Self {
        Failure::new(exit::USAGE, format!("error[E_REQUEST]: {}", msg.into()))
    }

    fn diagnostics(code: u8, diags: &[Diagnostic], files: &SourceMap) -> Self {
        Failure {
            code,
            lines: diags.iter().map(|d| d.render(files)).collect(),
            json: Some(
                json!({ "diagnostics": diags.iter().map(|d| d.to_json(files)).collect::<Vec<_>>() }),
            ),
        }
    }
}

fn exit_for(code: Code) -> u8 {
    match code {
        Code::Precondition => exit::PRECONDITION,
        Code::Request => exit::USAGE,
        Code::Limit => exit::INCONCLUSIVE,
        _ => exit::INPUT,
    }
}

struct Source {
    path: PathBuf,
    text: String,
    program: Program,
    files: SourceMap,
}

fn load(path: &Path) -> Result<Source, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::new(exit::INPUT, format!("{}: error[E_IO]: {e}", path.display())))?;
    let mut files = SourceMap::new();
    let id: FileId = files.add(path.display().to_string());
    let program = parse(&text, id).map_err(|d| Failure::diagnostics(exit::INPUT, &d, &files))?;
    Ok(Source {
        path: path.to_owned(),
        text,
        program,
        files,
    })
}

fn analyzed(src: &Source) -> Result<SymbolTable, Failure> {
    analysis::analyze(&src.program).map_err(|d| Failure::diagnostics(exit::INPUT, &d, &src.files))
}

fn limits(cli: &Cli) -> Result<Limits, Failure> {
    let mut l = match std::env::var("QRT_LIMITS") {
        Ok(s) if !s.trim().is_empty() => serde_json::from_str(&s)
            .map_err(|e| Failure::usage(format!("QRT_LIMITS is not a valid limits object: {e}")))?,
        _ => Limits::default(),
    };
    if let Some(q) = cli.max_qubits {
        l.max_qubits = q;
    }
    if let Some(b) = cli.max_branches {
        l.max_branches = b;
    }
    Ok(l)
}

/// The `--entry` flag, else the program's single entry point.
fn entry_of(cli: &Cli, program: &Program, symbols: &SymbolTable) -> Result<String, Failure> {
    if let Some(e) = &cli.entry {
        return Ok(e.clone());
    }
    match entry_points(program, symbols).as_slice() {
        [l] => Ok(format!(
            "{}.{}",
            program.namespaces[l.0].name.name,
            program.callable(*l).name.name
        )),
        [] => Err(Failure::usage(
            "the program has no entry point; pass --entry or --no-verify",
        )),
        _ => Err(Failure::usage(
            "the program has several entry points; pass --entry",
        )),
    }
}

fn verdict_exit(v: &Verdict) -> u8 {
    match v {
        Verdict::Equivalent => exit::OK,
        Verdict::Inequivalent { .. } => exit::INEQUIVALENT,
        Verdict::Inconclusive { .. } => exit::INCONCLUSIVE,
    }
}

fn describe(v: &Verdict) -> String {
    match v {
        Verdict::Equivalent => "equivalent".into(),
        Verdict::Inequivalent { witness, p_a, p_b } => {
            format!("inequivalent: trace {witness:?} has probability {p_a} before and {p_b} after")
        }
        Verdict::Inconclusive { reason } => format!("inconclusive: {reason}"),
    }
}

fn unified_diff(old: &str, new: &str, path: &Path) -> String {
    let name = path.display().to_string();
    similar::TextDiff::from_lines(old, new)
        .unified_diff()
        .context_radius(3)
        .header(&format!("a/{name}"), &format!("b/{name}"))
        .to_string()
}

/// Replaces `path` by writing a sibling temporary file and renaming it.
fn write_atomic(path: &Path, text: &str) -> Result<(), Failure> {
    let io = |e: std::io::Error| {
        Failure::new(exit::INPUT, format!("{}: error[E_IO]: {e}", path.display()))
    };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(text.as_bytes()).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

struct Output {
    code: u8,
    stdout: String,
    stderr: Vec<String>,
}

impl Output {
    fn ok(stdout: String) -> Self {
        Output {
            code: exit::OK,
            stdout,
            stderr: Vec::new(),
        }
    }
}

fn cmd_list(cli: &Cli) -> Output {
    let entries = catalog();
    if cli.json {
        return Output::ok(serde_json::to_string_pretty(&entries).expect("serializable") + "\n");
    }
    let mut out = String::new();
    for e in &entries {
        out += &format!("{}\n", e.name);
        out += &format!("    rows:    {}\n", e.rows.join("; "));
        out += &format!("    target:  {}\n", e.target);
        if !e.args.is_empty() {
            out += &format!("    args:    {}\n", e.args.join(", "));
        }
        out += &format!("    {}\n", e.description);
    }
    let rows: std::collections::BTreeSet<&str> = entries
        .iter()
        .flat_map(|e| e.rows.iter().copied())
        .collect();
    out += &format!(
        "{} refactorings covering {} of {} catalog rows\n",
        entries.len(),
        rows.len(),
        refactor::TABLE_ROWS.len()
    );
    Output::ok(out)
}

fn cmd_apply(cli: &Cli, a: &ApplyArgs) -> Result<Output, Failure> {
    let requests: Vec<RefactoringRequest> = match &a.batch {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| {
                Failure::new(exit::INPUT, format!("{}: error[E_IO]: {e}", p.display()))
            })?;
            let v: serde_json::Value = serde_json::from_str(&text)
                .map_err(|e| Failure::usage(format!("{}: {e}", p.display())))?;
            let v = if v.is_array() {
                v
            } else {
                serde_json::Value::Array(vec![v])
            };
            serde_json::from_value(v)
                .map_err(|e| Failure::usage(format!("{}: {e}", p.display())))?
        }
        None => vec![a.request()?],
    };
    let src = load(&a.file)?;
    let symbols = analyzed(&src)?;
    let limits = limits(cli)?;
    let mut entry = if cli.no_verify {
        None
    } else {
        Some(entry_of(cli, &src.program, &symbols)?)
    };
    let mut program = src.program.clone();
    let mut changes = Vec::new();
    let mut verdict = None;
    for req in &requests {
        let r = refactor::apply(&program, req);
        if let Some(d) = r.diagnostics.first() {
            let mut f = Failure::diagnostics(exit_for(d.code), &r.diagnostics, &src.files);
            f.lines.insert(0, format!("qrt: `{req}` was not applied"));
            return Err(f);
        }
        if let Some(e) = &entry {
            let after = follow_entry(&program, &r.program, e).ok_or_else(|| {
                Failure::new(
                    exit::INCONCLUSIVE,
                    format!("qrt: cannot locate entry `{e}` after `{req}`; pass --no-verify to skip checking"),
                )
            })?;
            let v = sim::check_equivalence_as(&program, e, &r.program, &after, &limits).map_err(
                |d| {
                    Failure::new(
                        if d.code == Code::Request {
                            exit::USAGE
                        } else {
                            exit::INCONCLUSIVE
                        },
                        d.render(&src.files),
                    )
                },
            )?;
            if !v.is_equivalent() {
                let mut f =
                    Failure::new(verdict_exit(&v), format!("qrt: `{req}`: {}", describe(&v)));
                f.json = Some(json!({ "request": req, "verdict": v }));
                return Err(f);
            }
            verdict = Some(v);
            entry = Some(after);
        }
        changes.extend(r.changes);
        program = r.program;
    }
    let new_text = print(&program);
    let diff = unified_diff(&src.text, &new_text, &src.path);
    if cli.write && new_text != src.text {
        write_atomic(&src.path, &new_text)?;
    }
    let stdout = if cli.json {
        serde_json::to_string_pretty(&json!({
            "requests": requests,
            "changes": changes,
            "verdict": verdict,
            "diff": diff,
            "source": new_text,
        }))
        .expect("serializable")
            + "\n"
    } else if a.full {
        new_text
    } else {
        diff
    };
    Ok(Output {
        code: exit::OK,
        stdout,
        stderr: changes.iter().map(|c| format!("qrt: {c}")).collect(),
    })
}

fn cmd_check(cli: &Cli, a: &Path, b: &Path) -> Result<Output, Failure> {
    let sa = load(a)?;
    let sb = load(b)?;
    let syms = analyzed(&sa)?;
    analyzed(&sb)?;
    let entry = entry_of(cli, &sa.program, &syms)?;
    let v = sim::check_equivalence(&sa.program, &sb.program, &entry, &limits(cli)?)
        .map_err(|d| Failure::new(exit_for(d.code), d.render(&sa.files)))?;
    let stdout = if cli.json {
        serde_json::to_string_pretty(&v).expect("serializable") + "\n"
    } else {
        describe(&v) + "\n"
    };
    Ok(Output {
        code: verdict_exit(&v),
        stdout,
        stderr: Vec::new(),
    })
}

fn cmd_pdg(cli: &Cli, file: &Path, callable: &str, format: PdgFormat) -> Result<Output, Failure> {
    let src = load(file)?;
    let symbols = analyzed(&src)?;
    let loc = src
        .program
        .find_callable(callable)
        .ok_or_else(|| Failure::usage(format!("no callable `{callable}`")))?;
    let pdg = analysis::pdg::build_pdg(&src.program, &symbols, loc);
    let stdout = if cli.json {
        let nodes: Vec<_> = pdg
            .nodes
            .iter()
            .map(|n| json!({ "id": n.id, "path": n.path, "text": n.text }))
            .collect();
        serde_json::to_string_pretty(
            &json!({ "callable": pdg.callable, "nodes": nodes, "edges": pdg.edges }),
        )
        .expect("serializable")
            + "\n"
    } else {
        match format {
            PdgFormat::Text => pdg.to_text(),
            PdgFormat::Dot => pdg.to_dot(),
        }
    };
    Ok(Output::ok(stdout))
}

fn cmd_fmt(cli: &Cli, file: &Path, check: bool) -> Result<Output, Failure> {
    let src = load(file)?;
    let text = print(&src.program);
    if check {
        let same = text == src.text;
        return Ok(Output {
            code: if same { exit::OK } else { exit::DIFFERS },
            stdout: String::new(),
            stderr: if same {
                Vec::new()
            } else {
                vec![format!("{}: not in canonical form", file.display())]
            },
        });
    }
    if cli.write {
        if text != src.text {
            write_atomic(file, &text)?;
        }
        return Ok(Output::ok(String::new()));
    }
    Ok(Output::ok(text))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() {
                exit::USAGE
            } else {
                exit::OK
            });
        }
    };
    let broken = GateRuleTable::standard().verify();
    if !broken.is_empty() {
        eprintln!(
            "qrt: internal error: gate rules fail verification: {}",
            broken.join(", ")
        );
        return ExitCode::from(exit::INTERNAL);
    }
    let result = match &cli.command {
        Command::List => Ok(cmd_list(&cli)),
        Command::Apply(a) => cmd_apply(&cli, a),
        Command::Check { a, b } => cmd_check(&cli, a, b),
        Command::Pdg {
            file,
            callable,
            format,
        } => cmd_pdg(&cli, file, callable, *format),
        Command::Fmt { file, check } => cmd_fmt(&cli, file, *check),
    };
    match result {
        Ok(out) => {
            print!("{}", out.stdout);
            for l in out.stderr {
                eprintln!("{l}");
            }
            ExitCode::from(out.code)
        }
        Err(f) => {
            for l in &f.lines {
                eprintln!("{l}");
            }
            if cli.json {
                let body = f.json.unwrap_or_else(|| json!({ "errors": f.lines }));
                println!(
                    "{}",
                    serde_json::to_string_pretty(&json!({ "exit": f.code, "error": body }))
                        .expect("serializable")
                );
            }
            ExitCode::from(f.code)
        }
    }
}
