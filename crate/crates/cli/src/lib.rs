//! Command-line driver: subcommands, JSON reports and the acceptance suite.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use finmodel::classes::{arrow, ArrowMode, ClassFragment, Verdict as ArrowVerdict, DEFAULT_ARROW_BUDGET};
use finmodel::indiscernibles::{
    collapse_scan, find_configuration, find_ip_pattern, is_primitive, is_reasonable_with, ConfigOptions, IpOptions,
    ScanMode, ScanOptions, TemplateSet, DEFAULT_MAX_CLASSES, DEFAULT_SCAN_BUDGET,
};
use finmodel::logic::ReductSpec;
use finmodel::products::{disjoint_union, free_superposition, full_product, lex_sum, ProductKind};
use finmodel::relzoo::{check_axioms, gen, Kind};
use finmodel::twinwidth::{
    heuristic_sequence, transfer_experiment, twin_width, SolverOptions, Trigraph, WidthMode, DEFAULT_EXACT_BOUND,
    DEFAULT_NODE_BUDGET,
};
use finmodel::{Error, Result, Structure};
use serde_json::{json, Value};

pub mod report;
pub mod suite;

use report::{config_hash, Report, Timing, Verdict};

#[derive(Parser, Debug)]
#[command(name = "finmodel", version, about = "Finite structures, indiscernible sequences and twin-width")]
struct Cli {
    /// Worker threads for the parallel searches (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a structure of a given kind.
    Gen(GenArgs),
    /// Check a structure against the axioms of its kind.
    CheckAxioms(CheckArgs),
    /// Decide C -> (B)^A_k.
    Arrow(ArrowArgs),
    /// Build a product of two structures.
    Product(ProductArgs),
    /// Compare indiscernibility for an index structure and its reduct.
    IndiscScan(ScanArgs),
    /// Decide whether an index structure is reasonable.
    Reasonable(InputArgs),
    /// Decide whether the automorphism group is primitive.
    Primitive(InputArgs),
    /// Search for an IP_n pattern of a relation.
    Ipn(IpArgs),
    /// Search for a configuration of one structure in another.
    ConfigSearch(ConfigArgs),
    /// Twin-width of a graph with a contraction sequence.
    Tww(TwwArgs),
    /// Twin-width of lexicographic sums of two corpora.
    TwwTransfer(TransferArgs),
    /// Run the acceptance battery.
    Suite(SuiteArgs),
}

#[derive(Args, Debug)]
struct GenArgs {
    /// lo, co, og, ohN, oc or cod.
    #[arg(long)]
    kind: String,
    #[arg(long, allow_negative_numbers = true)]
    size: i64,
    #[arg(long)]
    seed: u64,
    /// Write the structure here instead of into the report.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CheckArgs {
    #[arg(long)]
    kind: String,
    #[arg(long)]
    input: PathBuf,
}

#[derive(Args, Debug)]
struct ArrowArgs {
    #[arg(long = "C")]
    c: PathBuf,
    #[arg(long = "B")]
    b: PathBuf,
    #[arg(long = "A")]
    a: PathBuf,
    #[arg(long, default_value_t = 2)]
    k: usize,
    /// exhaustive or search.
    #[arg(long, default_value = "search")]
    mode: String,
    #[arg(long, default_value_t = DEFAULT_ARROW_BUDGET)]
    budget: u64,
}

#[derive(Args, Debug)]
struct ProductArgs {
    /// full, lex, disjoint or superpose.
    #[arg(long)]
    kind: String,
    left: PathBuf,
    right: PathBuf,
    /// JSON list of rib files, one per spine point, relative to this file.
    #[arg(long)]
    ribs: Option<PathBuf>,
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ScanArgs {
    #[arg(long)]
    index: PathBuf,
    /// `{"keep": [...]}` or `{"define": [{"name", "formula"}]}`.
    #[arg(long)]
    reduct: PathBuf,
    #[arg(long)]
    target: PathBuf,
    #[arg(long, default_value_t = 1)]
    k: usize,
    /// exhaust or sample.
    #[arg(long, default_value = "exhaust")]
    mode: String,
    #[arg(long, default_value_t = 1000)]
    samples: u64,
    #[arg(long)]
    seed: Option<u64>,
    /// qftype or orbit.
    #[arg(long, default_value = "qftype")]
    pattern: String,
    #[arg(long)]
    injective: bool,
    #[arg(long, default_value_t = DEFAULT_SCAN_BUDGET)]
    budget: u64,
    #[arg(long, default_value_t = 8)]
    witnesses: usize,
}

#[derive(Args, Debug)]
struct InputArgs {
    #[arg(long)]
    input: PathBuf,
    /// Edge-class limit for the reasonableness check.
    #[arg(long, default_value_t = DEFAULT_MAX_CLASSES)]
    max_classes: usize,
}

#[derive(Args, Debug)]
struct IpArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    relation: String,
    #[arg(long)]
    d: usize,
    /// Allow repeated parameters.
    #[arg(long)]
    repeats: bool,
    #[arg(long, default_value_t = 1 << 24)]
    budget: u64,
}

#[derive(Args, Debug)]
struct ConfigArgs {
    /// The structure to be configured.
    #[arg(long)]
    source: PathBuf,
    /// The structure supplying the formulas.
    #[arg(long)]
    target: PathBuf,
    #[arg(long, default_value_t = 1)]
    n: usize,
    /// identity, literals or pairs.
    #[arg(long, default_value = "pairs")]
    templates: String,
    #[arg(long)]
    equality: bool,
    #[arg(long, default_value_t = 1 << 26)]
    budget: u64,
}

#[derive(Args, Debug)]
struct TwwArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, conflicts_with = "heuristic")]
    exact: bool,
    #[arg(long)]
    heuristic: bool,
    #[arg(long, default_value_t = DEFAULT_EXACT_BOUND)]
    max_vertices: usize,
    #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
    budget: u64,
}

#[derive(Args, Debug)]
struct TransferArgs {
    /// A directory of graph files or a fragment file.
    #[arg(long)]
    left: PathBuf,
    #[arg(long)]
    right: PathBuf,
    #[arg(long, short)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 12)]
    max_vertices: usize,
    #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
    budget: u64,
}

#[derive(Args, Debug)]
struct SuiteArgs {
    /// Criteria to run, e.g. `1,3,8`. All by default.
    #[arg(long, value_delimiter = ',')]
    only: Vec<usize>,
}

/// What a subcommand hands back before it is wrapped in a report.
struct Outcome {
    verdicts: Vec<Verdict>,
    witnesses: Vec<Value>,
    result: Value,
    /// Written to `--out` when given.
    artifact: Option<(PathBuf, String)>,
    /// A requested exact answer was cut short by a budget.
    exhausted: bool,
}

impl Outcome {
    fn new(verdict: Verdict, result: Value) -> Outcome {
        Outcome { verdicts: vec![verdict], witnesses: Vec::new(), result, artifact: None, exhausted: false }
    }

    fn witness(mut self, w: Option<Value>) -> Outcome {
        self.witnesses.extend(w);
        self
    }
}

/// Input files read so far, for the config hash.
#[derive(Default)]
struct Inputs(Vec<Vec<u8>>);

impl Inputs {
    fn read(&mut self, path: &Path) -> Result<String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::input(format!("cannot read {}: {e}", path.display())))?;
        self.0.push(text.clone().into_bytes());
        Ok(text)
    }

    fn structure(&mut self, path: &Path) -> Result<Structure> {
        Structure::from_json_str(&self.read(path)?)
            .map_err(|e| Error::input(format!("{}: {e}", path.display())))
    }

    /// Every `*.json` in a directory, by file name, or a fragment file.
    fn corpus(&mut self, path: &Path) -> Result<Vec<Structure>> {
        if path.is_dir() {
            let mut files: Vec<PathBuf> = std::fs::read_dir(path)?
                .map(|e| e.map(|e| e.path()))
                .collect::<std::io::Result<_>>()?;
            files.retain(|p| p.extension().is_some_and(|x| x == "json"));
            files.sort();
            files.iter().map(|p| self.structure(p)).collect()
        } else {
            self.read(path)?;
            Ok(ClassFragment::load(path)?.members().to_vec())
        }
    }
}

fn structure_summary(m: &Structure) -> Value {
    let relations: serde_json::Map<String, Value> = m
        .signature()
        .relations()
        .iter()
        .enumerate()
        .map(|(r, sym)| (sym.name.clone(), json!(m.relation(r).len())))
        .collect();
    json!({ "name": m.name(), "sizes": m.sizes(), "relations": relations })
}

fn verdict_value(v: ArrowVerdict) -> Value {
    match v {
        ArrowVerdict::Holds => json!(true),
        ArrowVerdict::Fails => json!(false),
        ArrowVerdict::Unknown => json!("unknown"),
    }
}

fn to_value<T: serde::Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("reports serialize")
}

fn execute(command: &Command, inputs: &mut Inputs) -> Result<Outcome> {
    match command {
        Command::Gen(a) => {
            let kind: Kind = a.kind.parse()?;
            if a.size < 1 {
                return Err(Error::input(format!("size must be at least 1, got {}", a.size)));
            }
            let m = gen(kind, a.size as usize, a.seed)?;
            let mut o = Outcome::new(
                Verdict::new("generated", true, format!("{kind} on {} points, seed {}", a.size, a.seed)),
                structure_summary(&m),
            );
            match &a.out {
                Some(p) => o.artifact = Some((p.clone(), m.to_json_string())),
                None => o.result["structure"] = m.to_json_value(),
            }
            Ok(o)
        }
        Command::CheckAxioms(a) => {
            let kind: Kind = a.kind.parse()?;
            let m = inputs.structure(&a.input)?;
            let reports = check_axioms(kind, &m)?;
            let ok = reports.iter().all(|r| r.holds);
            let scale = format!("{} axioms of {kind} on {} points", reports.len(), m.len());
            let mut o = Outcome::new(Verdict::new("axioms_hold", ok, scale), json!({ "axioms": reports }));
            o.witnesses = reports.iter().filter(|r| !r.holds).map(to_value).collect();
            Ok(o)
        }
        Command::Arrow(a) => {
            let (c, b, x) = (inputs.structure(&a.c)?, inputs.structure(&a.b)?, inputs.structure(&a.a)?);
            let mode: ArrowMode = a.mode.parse()?;
            let r = arrow(&c, &b, &x, a.k, mode, a.budget)?;
            let scale = format!("{} positions, {} copies, {} colours, budget {}", r.positions, r.copies, a.k, a.budget);
            let mut v = Verdict::new("arrow", verdict_value(r.verdict), scale);
            if r.verdict == ArrowVerdict::Unknown {
                v = v.with_note(format!("arrow budget {} exhausted", a.budget));
            }
            Ok(Outcome::new(v, to_value(&r)).witness(r.witness.as_ref().map(to_value)))
        }
        Command::Product(a) => {
            let kind: ProductKind = a.kind.parse()?;
            let (l, r) = (inputs.structure(&a.left)?, inputs.structure(&a.right)?);
            let p = match kind {
                ProductKind::Full => full_product(&l, &r)?,
                ProductKind::Lex => {
                    let ribs = match &a.ribs {
                        None => vec![r.clone(); l.len()],
                        Some(map) => {
                            let files: Vec<PathBuf> = serde_json::from_str(&inputs.read(map)?)?;
                            let base = map.parent().unwrap_or(Path::new("."));
                            files.iter().map(|f| inputs.structure(&base.join(f))).collect::<Result<_>>()?
                        }
                    };
                    lex_sum(&l, &ribs)?
                }
                ProductKind::Disjoint => disjoint_union(&l, &r)?,
                ProductKind::Superposition => free_superposition(&l, &r, None)?,
            };
            let scale = format!("{kind} of {} and {} points", l.len(), r.len());
            let mut o = Outcome::new(Verdict::new("main_size", p.size(0), scale), structure_summary(&p));
            match &a.out {
                Some(path) => o.artifact = Some((path.clone(), p.to_json_string())),
                None => o.result["structure"] = p.to_json_value(),
            }
            Ok(o)
        }
        Command::IndiscScan(a) => {
            let i = inputs.structure(&a.index)?;
            let j = ReductSpec::from_json_str(&inputs.read(&a.reduct)?)?.apply(&i)?;
            let m = inputs.structure(&a.target)?;
            let mode = match a.mode.as_str() {
                "exhaust" => ScanMode::Exhaust,
                "sample" => match a.seed {
                    Some(seed) => ScanMode::Sample { count: a.samples, seed },
                    None => return Err(Error::input("sampled scans need --seed")),
                },
                other => return Err(Error::input(format!("unknown scan mode `{other}`"))),
            };
            let opts = ScanOptions {
                k: a.k,
                mode,
                pattern: a.pattern.parse()?,
                injective: a.injective,
                budget: a.budget,
                witness_limit: a.witnesses,
            };
            let r = collapse_scan(&i, &j, &m, &opts)?;
            let mut o = Outcome::new(Verdict::new("collapses", r.collapses, r.scale.clone()), to_value(&r));
            o.witnesses = r.witnesses.iter().map(to_value).collect();
            Ok(o)
        }
        Command::Reasonable(a) => {
            let m = inputs.structure(&a.input)?;
            let r = is_reasonable_with(&m, a.max_classes)?;
            let scale = format!("{} edge classes, {} assignments on {} points", r.classes, r.assignments, m.len());
            Ok(Outcome::new(Verdict::new("reasonable", r.reasonable, scale), to_value(&r))
                .witness(r.witness.as_ref().map(to_value)))
        }
        Command::Primitive(a) => {
            let m = inputs.structure(&a.input)?;
            let r = is_primitive(&m)?;
            let scale = format!("pairs of {} points", m.len());
            Ok(Outcome::new(Verdict::new("primitive", r.primitive, scale), to_value(&r))
                .witness(r.congruence.as_ref().map(|c| json!({ "pair": r.pair, "congruence": c }))))
        }
        Command::Ipn(a) => {
            let m = inputs.structure(&a.input)?;
            let opts = IpOptions { injective: !a.repeats, budget: a.budget };
            let r = find_ip_pattern(&m, &a.relation, a.d, &opts)?;
            let scale = format!("d = {} on {} points, {} nodes", a.d, m.len(), r.nodes);
            Ok(Outcome::new(Verdict::new("pattern_found", r.found.is_some(), scale), to_value(&r))
                .witness(r.found.as_ref().map(to_value)))
        }
        Command::ConfigSearch(a) => {
            let src = inputs.structure(&a.source)?;
            let m = inputs.structure(&a.target)?;
            let templates: TemplateSet = a.templates.parse()?;
            let opts = ConfigOptions { n: a.n, templates, equality: a.equality, budget: a.budget, ..Default::default() };
            let r = find_configuration(&m, &src, &opts)?;
            let scale = format!("{} template combinations, {} nodes", r.combinations, r.nodes);
            Ok(Outcome::new(Verdict::new("configured", r.found.is_some(), scale), to_value(&r))
                .witness(r.found.as_ref().map(to_value)))
        }
        Command::Tww(a) => {
            let g = inputs.structure(&a.input)?;
            let (width, mode, value) = if a.heuristic {
                let seq = heuristic_sequence(&Trigraph::from_graph(&g)?);
                let v = json!({ "width": seq.width, "mode": WidthMode::UpperBound, "certificate": seq });
                (seq.width, WidthMode::UpperBound, v)
            } else {
                let opts = SolverOptions { max_vertices: a.max_vertices, budget: a.budget, ..Default::default() };
                let w = twin_width(&g, &opts)?;
                (w.width, w.mode, to_value(&w))
            };
            let scale = format!("{} vertices, exact bound {}, node budget {}", g.len(), a.max_vertices, a.budget);
            let mut v = Verdict::new("twin_width", width, scale);
            if mode == WidthMode::UpperBound {
                let why = value.get("note").and_then(Value::as_str).unwrap_or("heuristic requested");
                v = v.with_note(format!("upper bound: {why}"));
            }
            let mut o = Outcome::new(v, value);
            o.exhausted = mode == WidthMode::UpperBound && !a.heuristic;
            Ok(o)
        }
        Command::TwwTransfer(a) => {
            let left = inputs.corpus(&a.left)?;
            let right = inputs.corpus(&a.right)?;
            let opts = SolverOptions { max_vertices: a.max_vertices, budget: a.budget, ..Default::default() };
            let r = transfer_experiment(&left, &right, &opts)?;
            let result = json!({
                "rows": r.rows.len(),
                "excess": r.excess,
                "bound_failures": r.bound_failures,
                "scale": r.scale,
            });
            let max_excess = r.excess.keys().next_back().copied().unwrap_or(0);
            let mut o = Outcome {
                verdicts: vec![
                    Verdict::new("lower_bound_holds", r.bound_failures == 0, r.scale.clone()),
                    Verdict::new("max_excess", max_excess, r.scale.clone()),
                ],
                witnesses: r.rows.iter().filter(|row| row.excess() < 0).map(to_value).collect(),
                result,
                artifact: None,
                exhausted: false,
            };
            match &a.out {
                Some(p) => o.artifact = Some((p.clone(), serde_json::to_string_pretty(&r)? + "\n")),
                None => o.result["table"] = to_value(&r.rows),
            }
            Ok(o)
        }
        Command::Suite(a) => {
            let outcomes = suite::run(&a.only);
            let verdicts = outcomes.iter().map(|c| Verdict::new(format!("criterion_{}", c.id), c.pass, c.scale.clone())).collect();
            Ok(Outcome { verdicts, witnesses: Vec::new(), result: json!({ "criteria": outcomes }), artifact: None, exhausted: false })
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Gen(_) => "gen",
        Command::CheckAxioms(_) => "check-axioms",
        Command::Arrow(_) => "arrow",
        Command::Product(_) => "product",
        Command::IndiscScan(_) => "indisc-scan",
        Command::Reasonable(_) => "reasonable",
        Command::Primitive(_) => "primitive",
        Command::Ipn(_) => "ipn",
        Command::ConfigSearch(_) => "config-search",
        Command::Tww(_) => "tww",
        Command::TwwTransfer(_) => "tww-transfer",
        Command::Suite(_) => "suite",
    }
}

/// Runs one invocation. Exit codes: 0 when a verdict was computed, negative
/// ones included; 1 on usage or input errors; 2 when a budget ran out or a
/// verdict is unknown. Reports go to `out`, diagnostics to `err`.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    0
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    1
                }
            };
        }
    };
    let args: Vec<String> = argv.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    let name = command_name(&cli.command);
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: cannot start {} threads: {e}", cli.threads);
            return 1;
        }
    };
    let start = Instant::now();
    let mut inputs = Inputs::default();
    let outcome = pool.install(|| execute(&cli.command, &mut inputs));
    let outcome = match outcome {
        Ok(o) => o,
        Err(Error::Budget { what, limit }) => {
            let why = format!("budget exceeded: {what} (limit {limit})");
            let _ = writeln!(err, "error: {why}");
            Outcome::new(Verdict::unknown(name, format!("limit {limit}"), why), Value::Null)
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return 1;
        }
    };
    if let Some((path, text)) = &outcome.artifact {
        if let Err(e) = std::fs::write(path, text) {
            let _ = writeln!(err, "error: cannot write {}: {e}", path.display());
            return 1;
        }
    }
    let exhausted = outcome.exhausted;
    let report = Report {
        command: name.to_string(),
        config_hash: config_hash(name, &args, &inputs.0),
        args,
        verdicts: outcome.verdicts,
        witnesses: outcome.witnesses,
        result: outcome.result,
        timing: Timing { elapsed_ms: start.elapsed().as_millis() as u64 },
    };
    if out.write_all(report.to_json().as_bytes()).is_err() {
        return 1;
    }
    if exhausted || report.verdicts.iter().any(Verdict::is_unknown) {
        2
    } else {
        0
    }
}
