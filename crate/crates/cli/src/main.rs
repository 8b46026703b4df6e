mod input;

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use freelines::arrangement::Arrangement;
use freelines::gallery;
use freelines::report::{analyze, case_line, ReportError};
use freelines::syzygy::{ProfileOptions, SyzygyError};
use freelines::theorems::{self, CaseReport, TheoremError, TheoremId};

use input::InputError;

macro_rules! out {
    ($($t:tt)*) => { write_stdout(format_args!($($t)*), false) };
}

macro_rules! outln {
    ($($t:tt)*) => { write_stdout(format_args!($($t)*), true) };
}

/// Exits quietly when the reader has gone away, as in `| head`.
fn write_stdout(args: fmt::Arguments<'_>, newline: bool) {
    let mut lock = io::stdout().lock();
    let r = lock
        .write_fmt(args)
        .and_then(|()| if newline { lock.write_all(b"\n") } else { Ok(()) });
    match r {
        Ok(()) => {}
        Err(e) if e.kind() == io::ErrorKind::BrokenPipe => std::process::exit(0),
        Err(e) => {
            eprintln!("error: writing output: {e}");
            std::process::exit(1);
        }
    }
}

const EXIT_PARSE: u8 = 2;
const EXIT_CAP: u8 = 3;
const EXIT_INVARIANT: u8 = 4;
const EXIT_DISAGREEMENT: u8 = 5;

#[derive(Parser)]
#[command(name = "freelines", version, about = "Exact freeness invariants of line arrangements in P^2")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct EngineArgs {
    /// Highest degree scanned for new generators.
    #[arg(long)]
    cap: Option<usize>,
    /// Use the larger cap 3(d-2).
    #[arg(long)]
    certified: bool,
}

impl EngineArgs {
    fn options(&self, defect: bool) -> ProfileOptions {
        ProfileOptions {
            cap: self.cap,
            certified: self.certified,
            defect,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Full report for one arrangement.
    Analyze {
        /// Arrangement document, `-` for stdin, or `gallery:NAME`.
        path: String,
        #[arg(long)]
        json: bool,
        #[command(flatten)]
        engine: EngineArgs,
        /// Compute the defect ν (default).
        #[arg(long, overrides_with = "no_defect")]
        defect: bool,
        /// Skip the defect ν, the slowest step.
        #[arg(long)]
        no_defect: bool,
        /// Also run these verifiers (repeatable, or `all`).
        #[arg(long = "theorem")]
        theorems: Vec<String>,
    },
    /// Case reports for every deletion, or for additions through a point.
    Scan {
        path: String,
        #[arg(long, value_enum)]
        mode: Mode,
        /// Point `a:b:c` for additions; default every point of maximal multiplicity.
        #[arg(long)]
        point: Option<String>,
        /// Extra candidate line `a,b,c` or `[[0,1],1,0]` (repeatable).
        #[arg(long = "line")]
        lines: Vec<String>,
        #[arg(long)]
        json: bool,
        #[command(flatten)]
        engine: EngineArgs,
        /// Where witness files are written on disagreement.
        #[arg(long, default_value = ".")]
        witness_dir: PathBuf,
    },
    /// Run theorem verifiers; exit 5 with witness files on disagreement.
    Verify {
        /// Run on every gallery entry; positional arguments are then theorem ids.
        #[arg(long)]
        gallery: bool,
        /// `[PATH] [THEOREM...]`; theorems default to all.
        targets: Vec<String>,
        #[arg(long)]
        json: bool,
        #[command(flatten)]
        engine: EngineArgs,
        #[arg(long, default_value = ".")]
        witness_dir: PathBuf,
    },
    /// The built-in arrangements.
    Gallery {
        #[command(subcommand)]
        action: GalleryAction,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Delete,
    Add,
}

#[derive(Subcommand)]
enum GalleryAction {
    List {
        #[arg(long)]
        json: bool,
    },
    /// Print the arrangement document.
    Emit {
        name: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    let syzygy = |e: &SyzygyError| match e {
        SyzygyError::CapTooSmall(_) => EXIT_CAP,
        SyzygyError::Invariant(_) => EXIT_INVARIANT,
        _ => 1,
    };
    for cause in err.chain() {
        if cause.downcast_ref::<InputError>().is_some() {
            return EXIT_PARSE;
        }
        if let Some(e) = cause.downcast_ref::<SyzygyError>() {
            return syzygy(e);
        }
        if let Some(e) = cause.downcast_ref::<TheoremError>() {
            return match e {
                TheoremError::Syzygy(s) => syzygy(s),
                TheoremError::UnknownTheorem(_) => EXIT_PARSE,
                _ => 1,
            };
        }
        if let Some(e) = cause.downcast_ref::<ReportError>() {
            return match e {
                ReportError::Syzygy(s) | ReportError::Theorem(TheoremError::Syzygy(s)) => syzygy(s),
                ReportError::Invariant(_) => EXIT_INVARIANT,
                _ => 1,
            };
        }
    }
    1
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    match cli.command {
        Command::Analyze {
            path,
            json,
            engine,
            defect: _,
            no_defect,
            theorems,
        } => cmd_analyze(&path, json, engine.options(!no_defect), &theorems),
        Command::Scan {
            path,
            mode,
            point,
            lines,
            json,
            engine,
            witness_dir,
        } => cmd_scan(&path, mode, point.as_deref(), &lines, json, engine.options(false), &witness_dir),
        Command::Verify {
            gallery,
            targets,
            json,
            engine,
            witness_dir,
        } => cmd_verify(gallery, &targets, json, engine.options(false), &witness_dir),
        Command::Gallery { action } => cmd_gallery(action),
    }
}

fn parse_theorems(ids: &[String]) -> anyhow::Result<Vec<TheoremId>> {
    let mut out = Vec::new();
    for id in ids {
        if id.eq_ignore_ascii_case("all") {
            out.extend([TheoremId::Thm02, TheoremId::Thm03, TheoremId::ThmAe1, TheoremId::CorAe1, TheoremId::Prop00]);
        } else {
            let t: TheoremId = id.parse().map_err(|e: TheoremError| InputError(e.to_string()))?;
            // prop00 and prop01 share one driver
            out.push(if t == TheoremId::Prop01 { TheoremId::Prop00 } else { t });
        }
    }
    out.dedup();
    Ok(out)
}

fn cmd_analyze(path: &str, json: bool, opts: ProfileOptions, theorems: &[String]) -> anyhow::Result<u8> {
    let loaded = input::load(path)?;
    let ids = parse_theorems(theorems)?;
    let start = Instant::now();
    let report = analyze(&loaded.arrangement, Some(&loaded.name), &opts, &ids)?;
    if json {
        outln!("{}", report.to_json());
    } else {
        out!("{}", report.render_text(&loaded.arrangement.field().to_string()));
        outln!("  elapsed             {:.2?}", start.elapsed());
    }
    let disagreements: Vec<&CaseReport> = report.cases.iter().filter(|c| c.is_disagreement()).collect();
    if !disagreements.is_empty() {
        return Ok(EXIT_DISAGREEMENT);
    }
    Ok(0)
}

fn write_witnesses(dir: &Path, a: &Arrangement, reports: &[&CaseReport]) -> anyhow::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut paths = Vec::new();
    for (k, r) in reports.iter().enumerate() {
        let mut doc = a.to_document();
        doc.name = Some(r.arrangement.clone());
        let stem: String = r
            .arrangement
            .chars()
            .map(|c| if c.is_ascii_alphanumeric() { c } else { '_' })
            .collect();
        let path = dir.join(format!("witness-{}-{stem}-{k}.json", r.theorem));
        let body = json!({
            "schema": "freelines.witness/1",
            "arrangement": doc,
            "case": r,
        });
        fs::write(&path, serde_json::to_string_pretty(&body)?).with_context(|| format!("writing {}", path.display()))?;
        paths.push(path);
    }
    Ok(paths)
}

#[derive(Default)]
struct Tally {
    /// (theorem, case) -> count among hypothesis-satisfied reports.
    cases: BTreeMap<(String, String), usize>,
    satisfied: usize,
    skipped: usize,
    disagreements: usize,
    addition_case_one: Vec<String>,
}

impl Tally {
    fn add(&mut self, r: &CaseReport) {
        if !r.hypothesis {
            self.skipped += 1;
            return;
        }
        self.satisfied += 1;
        if r.is_disagreement() {
            self.disagreements += 1;
        }
        let case = r.case.map_or("none".to_string(), |c| c.to_string());
        *self.cases.entry((r.theorem.to_string(), case)).or_default() += 1;
        if r.theorem == TheoremId::Thm03 && r.case == Some(1) {
            self.addition_case_one.push(format!(
                "{} p={} L={}",
                r.arrangement,
                r.point.as_deref().unwrap_or("?"),
                r.covector.as_deref().unwrap_or("?")
            ));
        }
    }

    fn print(&self, ran_addition: bool) {
        outln!(
            "summary: {} hypothesis-satisfied reports, {} skipped, {} disagreements",
            self.satisfied, self.skipped, self.disagreements
        );
        for ((t, c), n) in &self.cases {
            outln!("  {t} case {c}: {n}");
        }
        if ran_addition {
            if self.addition_case_one.is_empty() {
                outln!("  thm03 case-1 pattern matched: no");
            } else {
                outln!("  thm03 case-1 pattern matched: yes ({})", self.addition_case_one.join("; "));
            }
        }
    }

    fn json(&self) -> serde_json::Value {
        let cases: BTreeMap<String, usize> = self.cases.iter().map(|((t, c), n)| (format!("{t}:{c}"), *n)).collect();
        json!({
            "satisfied": self.satisfied,
            "skipped": self.skipped,
            "disagreements": self.disagreements,
            "cases": cases,
            "addition_case_one": self.addition_case_one,
        })
    }
}

fn finish(
    reports: &[(Arrangement, Vec<CaseReport>)],
    json: bool,
    ran_addition: bool,
    witness_dir: &Path,
) -> anyhow::Result<u8> {
    let mut tally = Tally::default();
    for (_, rs) in reports {
        for r in rs {
            tally.add(r);
        }
    }
    if json {
        let all: Vec<&CaseReport> = reports.iter().flat_map(|(_, rs)| rs).collect();
        let body = json!({ "schema": "freelines.cases/1", "reports": all, "summary": tally.json() });
        outln!("{}", serde_json::to_string_pretty(&body)?);
    } else {
        for (_, rs) in reports {
            for r in rs {
                outln!("{}", case_line(r));
            }
        }
        tally.print(ran_addition);
    }
    if tally.disagreements == 0 {
        return Ok(0);
    }
    for (a, rs) in reports {
        let bad: Vec<&CaseReport> = rs.iter().filter(|r| r.is_disagreement()).collect();
        if !bad.is_empty() {
            for p in write_witnesses(witness_dir, a, &bad)? {
                eprintln!("witness written to {}", p.display());
            }
        }
    }
    Ok(EXIT_DISAGREEMENT)
}

fn cmd_scan(
    path: &str,
    mode: Mode,
    point: Option<&str>,
    lines: &[String],
    json: bool,
    opts: ProfileOptions,
    witness_dir: &Path,
) -> anyhow::Result<u8> {
    let loaded = input::load(path)?;
    let a = &loaded.arrangement;
    let mut extras = loaded.extras.clone();
    for l in lines {
        extras.push(input::line(a.field(), l)?);
    }
    let reports = match mode {
        Mode::Delete => {
            let mut rs = theorems::verify_deletion_trichotomy(a, &loaded.name, &opts)?;
            rs.extend(theorems::verify_corollary_cases(a, &loaded.name, &opts)?);
            rs
        }
        Mode::Add => match point {
            Some(p) => {
                let p = input::point(a.field(), p)?;
                theorems::addition_candidates(a, &p, &extras)
                    .iter()
                    .map(|l| theorems::verify_addition_trichotomy(a, &loaded.name, &p, l, &opts))
                    .collect::<Result<Vec<_>, _>>()?
            }
            None => theorems::verify_additions(a, &loaded.name, &extras, &opts)?,
        },
    };
    finish(&[(a.clone(), reports)], json, matches!(mode, Mode::Add), witness_dir)
}

fn cmd_verify(
    use_gallery: bool,
    targets: &[String],
    json: bool,
    opts: ProfileOptions,
    witness_dir: &Path,
) -> anyhow::Result<u8> {
    let (inputs, ids) = if use_gallery {
        let inputs: Vec<input::Loaded> = gallery::list()
            .into_iter()
            .map(|e| input::Loaded {
                name: e.name,
                arrangement: e.arrangement,
                extras: e.extra_lines,
            })
            .collect();
        (inputs, targets.to_vec())
    } else {
        let Some((path, rest)) = targets.split_first() else {
            return Err(InputError("verify needs a path or --gallery".into()).into());
        };
        (vec![input::load(path)?], rest.to_vec())
    };
    let ids = if ids.is_empty() { vec!["all".to_string()] } else { ids };
    let ids = parse_theorems(&ids)?;
    let mut reports = Vec::new();
    for t in &ids {
        for inp in &inputs {
            let rs = theorems::verify(*t, &inp.arrangement, &inp.name, &inp.extras, &opts)?;
            reports.push((inp.arrangement.clone(), rs));
        }
    }
    finish(&reports, json, ids.contains(&TheoremId::Thm03), witness_dir)
}

fn cmd_gallery(action: GalleryAction) -> anyhow::Result<u8> {
    match action {
        GalleryAction::List { json } => {
            let entries = gallery::list();
            if json {
                let rows: Vec<serde_json::Value> = entries
                    .iter()
                    .map(|e| {
                        let x = &e.expected;
                        json!({
                            "name": e.name,
                            "d": x.d,
                            "field": e.arrangement.field().to_string(),
                            "equation": e.equation,
                            "expected": {
                                "n": x.n,
                                "m": x.m,
                                "mdr": x.mdr,
                                "classification": x.classification.map(|c| c.to_string()),
                                "exponents": x.exponents,
                                "tau": x.tau,
                                "nu": x.nu,
                            },
                        })
                    })
                    .collect();
                outln!("{}", serde_json::to_string_pretty(&rows)?);
            } else {
                for e in &entries {
                    let x = &e.expected;
                    let mut expected = Vec::new();
                    if let (Some(c), Some(ex)) = (&x.classification, &x.exponents) {
                        let parts: Vec<String> = ex.iter().map(|v| v.to_string()).collect();
                        expected.push(format!("{c} ({})", parts.join(",")));
                    }
                    if let Some(t) = x.tau {
                        expected.push(format!("τ {t}"));
                    }
                    if let Some(nu) = x.nu {
                        expected.push(format!("ν {nu}"));
                    }
                    outln!(
                        "{:<18} d={:<3} {:<24} {}",
                        e.name,
                        x.d,
                        e.arrangement.field().to_string(),
                        expected.join(", ")
                    );
                }
            }
            Ok(0)
        }
        GalleryAction::Emit { name, output } => {
            let e = gallery::entry_by_name(&name).map_err(|e| InputError(e.to_string()))?;
            let mut doc = e.arrangement.to_document();
            doc.name = Some(e.name.clone());
            let text = serde_json::to_string_pretty(&doc)?;
            match output {
                Some(p) => fs::write(&p, text + "\n").with_context(|| format!("writing {}", p.display()))?,
                None => outln!("{text}"),
            }
            Ok(0)
        }
    }
}
