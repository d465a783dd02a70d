use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use dag_automata::analysis::{canonical_form, encode_edge_labels, is_planar, path_language, rewire};
use dag_automata::derivation::{enumerate_language, sample_derivation, SampleOutcome};
use dag_automata::fixtures::FixtureSet;
use dag_automata::io::{self, AnyAutomaton};
use dag_automata::planar::{enumerate_planar, planar_partial_mass, planar_recognizes, planar_weights};
use dag_automata::recognition::{accepting_runs, first_run};
use dag_automata::reproduce::{reproduce, Options};
use dag_automata::series::{divergence_probe, probe_terms, theorem1_series_term, SeriesReport, Term};
use dag_automata::weighting::{dag_weight, full_support_check, partial_mass};
use dag_automata::{Dag, DagAutomaton, EdgeId, Error, Mode, PlanarAutomaton, RootPolicy};

// Output errors (a closed pipe, usually) end the program quietly.
macro_rules! out {
    ($($t:tt)*) => {{
        use std::io::Write as _;
        if writeln!(std::io::stdout(), $($t)*).is_err() {
            std::process::exit(0);
        }
    }};
}

macro_rules! out_raw {
    ($($t:tt)*) => {{
        use std::io::Write as _;
        if write!(std::io::stdout(), $($t)*).is_err() {
            std::process::exit(0);
        }
    }};
}

#[derive(Parser)]
#[command(name = "dagaut", version, about = "Generate, recognize and weigh DAGs with DAG automata")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Dot,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Single,
    Multi,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Single => Mode::Single,
            ModeArg::Multi => Mode::Multi,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Roots {
    One,
    Any,
}

#[derive(Clone, Copy, ValueEnum)]
enum Series {
    Theorem1,
    Reference,
}

#[derive(Subcommand)]
enum Command {
    /// Check a DAG (acyclic, connected, root policy) or an automaton file.
    Validate {
        #[arg(long)]
        dag: Option<PathBuf>,
        #[arg(long)]
        automaton: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "one")]
        roots: Roots,
    },
    /// Enumerate a language up to a node budget, or sample one derivation.
    Generate {
        #[arg(long)]
        automaton: PathBuf,
        #[arg(long, value_enum, default_value = "single")]
        mode: ModeArg,
        #[arg(long)]
        max_nodes: usize,
        /// Write one file per DAG into this directory instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long)]
        ordered: bool,
        /// Sample a single random derivation (at most `max-nodes` steps).
        #[arg(long)]
        sample: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Decide membership and list accepting runs.
    Recognize {
        #[arg(long)]
        automaton: PathBuf,
        #[arg(long)]
        dag: PathBuf,
        #[arg(long)]
        all_runs: bool,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long)]
        ordered: bool,
    },
    /// Weight of one DAG under a weighted automaton.
    Weigh {
        #[arg(long)]
        automaton: PathBuf,
        #[arg(long)]
        dag: PathBuf,
    },
    /// Truncated language mass.
    Mass {
        #[arg(long)]
        automaton: PathBuf,
        #[arg(long, value_enum, default_value = "single")]
        mode: ModeArg,
        #[arg(long)]
        max_nodes: usize,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long)]
        ordered: bool,
        /// Exit with status 1 unless the mass is within `--tolerance` of this.
        #[arg(long)]
        expect: Option<f64>,
        #[arg(long, default_value_t = 1e-9)]
        tolerance: f64,
        /// Also report DAGs with weight outside (0, 1].
        #[arg(long)]
        full_support: bool,
    },
    /// Ratio-test probe of a series.
    Probe {
        #[arg(long, value_enum)]
        series: Option<Series>,
        #[arg(long = "B", default_value_t = 1.0)]
        b: f64,
        #[arg(long = "C", default_value_t = 1.0)]
        c: f64,
        #[arg(long, default_value_t = 50)]
        n_max: usize,
        /// Probe the per-size masses of an enumerated language instead.
        #[arg(long)]
        from_enumeration: bool,
        #[arg(long)]
        automaton: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "single")]
        mode: ModeArg,
        #[arg(long, default_value_t = 11)]
        max_nodes: usize,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Root-to-leaf label strings.
    Paths {
        #[arg(long)]
        dag: PathBuf,
    },
    /// Planarity of the underlying undirected graph; status 1 if non-planar.
    PlanarCheck {
        #[arg(long)]
        dag: PathBuf,
    },
    /// Canonical form (hex) of a DAG.
    Canon {
        #[arg(long)]
        dag: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Permute the targets of same-state edges.
    Rewire {
        #[arg(long)]
        automaton: PathBuf,
        #[arg(long)]
        dag: PathBuf,
        /// Run file; defaults to the first accepting run.
        #[arg(long)]
        run: Option<PathBuf>,
        #[arg(long, value_delimiter = ',', required = true)]
        edges: Vec<u32>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Replace labelled edges by labelled nodes.
    EncodeEdges {
        #[arg(long)]
        dag: PathBuf,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Run the acceptance suite.
    Reproduce {
        #[arg(long, value_delimiter = ',')]
        criteria: Option<Vec<String>>,
        /// Fixture directory; defaults to $DAGAUT_FIXTURES, then the bundled copies.
        #[arg(long)]
        fixtures: Option<PathBuf>,
        #[arg(long, default_value_t = 1e-9)]
        tolerance: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
}

/// Exit status 1 for domain failures, 2 for usage and input errors.
struct Failure {
    code: u8,
    err: anyhow::Error,
}

fn usage(err: impl Into<anyhow::Error>) -> Failure {
    Failure { code: 2, err: err.into() }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidBudget | Error::UnknownCriterion(_) | Error::UnknownLabel(_) | Error::Format(_) => 2,
            _ => 1,
        };
        Failure { code, err: e.into() }
    }
}

type Outcome = Result<ExitCode, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display())).map_err(usage)
}

fn load_dag(path: &Path) -> Result<Dag, Failure> {
    io::parse_dag(&read(path)?).with_context(|| format!("{}", path.display())).map_err(usage)
}

fn load_automaton(path: &Path, ordered: bool) -> Result<AnyAutomaton, Failure> {
    let a = io::parse_automaton(&read(path)?).with_context(|| format!("{}", path.display())).map_err(usage)?;
    if ordered && matches!(a, AnyAutomaton::Multiset(_)) {
        return Err(usage(anyhow!("{}: --ordered needs an automaton with \"ordered\": true", path.display())));
    }
    Ok(a)
}

fn load_multiset(path: &Path) -> Result<DagAutomaton, Failure> {
    match load_automaton(path, false)? {
        AnyAutomaton::Multiset(a) => Ok(a),
        AnyAutomaton::Planar(_) => Err(usage(anyhow!("{}: this command needs an unordered automaton", path.display()))),
    }
}

fn print_json(v: &serde_json::Value) {
    out!("{}", serde_json::to_string_pretty(v).expect("json"));
}

fn check_format(format: Format, allowed: &[Format]) -> Result<(), Failure> {
    if allowed.contains(&format) {
        Ok(())
    } else {
        Err(usage(anyhow!("unsupported --format for this command")))
    }
}

fn status(ok: bool) -> ExitCode {
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn validate(dag: Option<PathBuf>, automaton: Option<PathBuf>, roots: Roots) -> Outcome {
    if dag.is_none() && automaton.is_none() {
        return Err(usage(anyhow!("give --dag and/or --automaton")));
    }
    if let Some(p) = automaton {
        let a = load_automaton(&p, false)?;
        out!("automaton ok: {} states, {} labels", a.alphabet().states().len(), a.alphabet().labels().len());
    }
    if let Some(p) = dag {
        let g = load_dag(&p)?;
        let policy = match roots {
            Roots::One => RootPolicy::One,
            Roots::Any => RootPolicy::Any,
        };
        match g.validate(policy) {
            Ok(()) => out!("dag ok: {} nodes, {} edges", g.node_count(), g.edge_count()),
            Err(v) => {
                out!("dag invalid: {v}");
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn emit_dags(dags: &[Dag], out: Option<&Path>, format: Format) -> Result<(), Failure> {
    check_format(format, &[Format::Json, Format::Dot])?;
    let render = |g: &Dag| match format {
        Format::Dot => io::to_dot(g, None),
        _ => io::dag_to_json(g),
    };
    match out {
        Some(dir) => {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display())).map_err(usage)?;
            let ext = if format == Format::Dot { "dot" } else { "json" };
            for (i, g) in dags.iter().enumerate() {
                let path = dir.join(format!("dag_{i:04}.{ext}"));
                fs::write(&path, render(g)).with_context(|| format!("writing {}", path.display())).map_err(usage)?;
            }
            eprintln!("wrote {} DAGs to {}", dags.len(), dir.display());
        }
        None if format == Format::Dot => dags.iter().for_each(|g| out_raw!("{}", render(g))),
        None => print_json(&serde_json::to_value(dags).expect("json")),
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn generate(
    automaton: PathBuf,
    mode: Mode,
    max_nodes: usize,
    out: Option<PathBuf>,
    format: Format,
    ordered: bool,
    sample: bool,
    seed: u64,
) -> Outcome {
    if max_nodes == 0 {
        return Err(Error::InvalidBudget.into());
    }
    let dags = match load_automaton(&automaton, ordered)? {
        AnyAutomaton::Planar(pa) => {
            if sample || mode == Mode::Multi {
                return Err(usage(anyhow!("ordered automata support only single-rooted enumeration")));
            }
            enumerate_planar(&pa, max_nodes)?
        }
        AnyAutomaton::Multiset(a) if sample => match sample_derivation(&a, mode, max_nodes, seed) {
            SampleOutcome::Complete { dag, .. } => vec![dag],
            SampleOutcome::DeadEnd { stranded, .. } => {
                out!("dead end; stranded frontier states: {}", stranded.join(", "));
                return Ok(ExitCode::from(1));
            }
            SampleOutcome::Disconnected { .. } => {
                out!("derivation completed but the graph is disconnected");
                return Ok(ExitCode::from(1));
            }
            SampleOutcome::StepLimit { .. } => {
                out!("step limit {max_nodes} reached");
                return Ok(ExitCode::from(1));
            }
        },
        AnyAutomaton::Multiset(a) => enumerate_language(&a, mode, max_nodes)?,
    };
    emit_dags(&dags, out.as_deref(), format)?;
    Ok(ExitCode::SUCCESS)
}

fn recognize(automaton: PathBuf, dag: PathBuf, all_runs: bool, format: Format, ordered: bool) -> Outcome {
    check_format(format, &[Format::Json, Format::Dot])?;
    let g = load_dag(&dag)?;
    match load_automaton(&automaton, ordered)? {
        AnyAutomaton::Planar(pa) => {
            let ok = planar_recognizes(&pa, &g)?;
            print_json(&json!({ "recognized": ok, "method": "generate-and-match" }));
            Ok(status(ok))
        }
        AnyAutomaton::Multiset(a) => {
            let runs = if all_runs { accepting_runs(&a, &g)? } else { first_run(&a, &g).into_iter().collect() };
            if format == Format::Dot {
                for r in &runs {
                    out_raw!("{}", io::to_dot(&g, Some((r, a.alphabet()))));
                }
            } else {
                let rs: Vec<_> = runs.iter().map(|r| io::run_to_value(r, a.alphabet())).collect();
                print_json(&json!({ "recognized": !runs.is_empty(), "runs": rs }));
            }
            Ok(status(!runs.is_empty()))
        }
    }
}

fn weigh(automaton: PathBuf, dag: PathBuf) -> Outcome {
    let a = load_multiset(&automaton)?;
    let g = load_dag(&dag)?;
    let w = dag_weight(&a, &g)?;
    let runs = accepting_runs(&a, &g)?.len();
    print_json(&json!({ "weight": w, "accepting_runs": runs }));
    Ok(ExitCode::SUCCESS)
}

fn planar_mass(pa: &PlanarAutomaton, max_nodes: usize, format: Format) -> Result<f64, Failure> {
    let weights = planar_weights(pa, max_nodes)?;
    let total = planar_partial_mass(pa, max_nodes)?;
    let mut by_size = std::collections::BTreeMap::<usize, (usize, f64)>::new();
    for (g, w) in &weights {
        let e = by_size.entry(g.node_count()).or_default();
        e.0 += 1;
        e.1 += w;
    }
    print_mass(total, &by_size, format);
    Ok(total)
}

fn print_mass(total: f64, by_size: &std::collections::BTreeMap<usize, (usize, f64)>, format: Format) {
    if format == Format::Csv {
        out!("nodes,dags,mass");
        for (n, (c, w)) in by_size {
            out!("{n},{c},{w}");
        }
    } else {
        let sizes: Vec<_> = by_size.iter().map(|(n, (c, w))| json!({ "nodes": n, "dags": c, "mass": w })).collect();
        print_json(&json!({ "total": total, "by_size": sizes }));
    }
}

#[allow(clippy::too_many_arguments)]
fn mass(
    automaton: PathBuf,
    mode: Mode,
    max_nodes: usize,
    format: Format,
    ordered: bool,
    expect: Option<f64>,
    tolerance: f64,
    full_support: bool,
) -> Outcome {
    check_format(format, &[Format::Json, Format::Csv])?;
    let total = match load_automaton(&automaton, ordered)? {
        AnyAutomaton::Planar(pa) => {
            if mode == Mode::Multi {
                return Err(usage(anyhow!("ordered automata support only single-rooted derivations")));
            }
            planar_mass(&pa, max_nodes, format)?
        }
        AnyAutomaton::Multiset(a) if full_support => {
            let r = full_support_check(&a, mode, max_nodes)?;
            let violations: Vec<_> = r.violations.iter().map(|v| json!({ "dag": v.dag, "weight": v.weight })).collect();
            print_json(&json!({
                "mass": r.mass,
                "violations": violations,
                "verdict": r.series.verdict,
                "caveat": r.series.caveat,
            }));
            r.mass
        }
        AnyAutomaton::Multiset(a) => {
            let r = partial_mass(&a, mode, max_nodes)?;
            print_mass(r.total, &r.by_size, format);
            r.total
        }
    };
    match expect {
        Some(x) if (total - x).abs() > tolerance => {
            eprintln!("mass {total} differs from {x} by more than {tolerance}");
            Ok(ExitCode::from(1))
        }
        _ => Ok(ExitCode::SUCCESS),
    }
}

fn print_series(r: &SeriesReport, format: Format) -> Result<(), Failure> {
    check_format(format, &[Format::Json, Format::Csv])?;
    if format == Format::Csv {
        out_raw!("{}", r.to_csv());
        eprintln!("verdict: {} ({})", r.verdict, r.caveat);
    } else {
        print_json(&serde_json::to_value(r).expect("json"));
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn probe(
    series: Option<Series>,
    b: f64,
    c: f64,
    n_max: usize,
    from_enumeration: bool,
    automaton: Option<PathBuf>,
    mode: Mode,
    max_nodes: usize,
    format: Format,
) -> Outcome {
    let report = if from_enumeration {
        let path = automaton.ok_or_else(|| usage(anyhow!("--from-enumeration needs --automaton")))?;
        let a = load_multiset(&path)?;
        let r = partial_mass(&a, mode, max_nodes)?;
        let terms = r.by_size.iter().map(|(&n, &(k, w))| Term::new(n, k as f64, w / k as f64)).collect();
        probe_terms(terms)
    } else {
        match series {
            Some(Series::Theorem1) => divergence_probe(|n| theorem1_series_term(b, c, n), n_max)?,
            Some(Series::Reference) => divergence_probe(
                |n| {
                    let ln_fact: f64 = (2..=n).map(|k| (k as f64).ln()).sum();
                    Term::from_logs(n, ln_fact, -((n + 1) as f64) * std::f64::consts::LN_2 - ln_fact, false)
                },
                n_max,
            )?,
            None => return Err(usage(anyhow!("give --series or --from-enumeration"))),
        }
    };
    print_series(&report, format)?;
    Ok(ExitCode::SUCCESS)
}

fn rewire_cmd(automaton: PathBuf, dag: PathBuf, run: Option<PathBuf>, edges: Vec<u32>, format: Format) -> Outcome {
    let a = load_multiset(&automaton)?;
    let g = load_dag(&dag)?;
    let r = match run {
        Some(p) => io::parse_run(&read(&p)?, a.alphabet()).with_context(|| format!("{}", p.display())).map_err(usage)?,
        None => match first_run(&a, &g) {
            Some(r) => r,
            None => {
                out!("the DAG is not recognized, so there is no run to rewire");
                return Ok(ExitCode::from(1));
            }
        },
    };
    let edges: Vec<EdgeId> = edges.into_iter().map(EdgeId).collect();
    let report = rewire(&g, &r, &edges)?;
    if format == Format::Dot {
        emit_dags(&report.dags, None, format)?;
    } else {
        check_format(format, &[Format::Json])?;
        print_json(&json!({
            "permutations": report.permutations,
            "cyclic_discarded": report.cyclic_discarded,
            "dags": report.dags,
        }));
    }
    Ok(ExitCode::SUCCESS)
}

fn reproduce_cmd(
    criteria: Option<Vec<String>>,
    fixtures: Option<PathBuf>,
    tolerance: f64,
    seed: u64,
    format: Format,
) -> Outcome {
    check_format(format, &[Format::Json, Format::Text])?;
    let set = match fixtures {
        Some(dir) => FixtureSet::load(&dir).map_err(usage)?,
        None => FixtureSet::from_env().map_err(usage)?,
    };
    let results = reproduce(&set, criteria.as_deref(), Options { tolerance, seed })?;
    if format == Format::Json {
        print_json(&serde_json::to_value(&results).expect("json"));
    } else {
        for r in &results {
            out!("{:<4} {} {}", r.id, if r.passed { "PASS" } else { "FAIL" }, r.detail);
        }
    }
    Ok(status(results.iter().all(|r| r.passed)))
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Validate { dag, automaton, roots } => validate(dag, automaton, roots),
        Command::Generate { automaton, mode, max_nodes, out, format, ordered, sample, seed } => {
            generate(automaton, mode.into(), max_nodes, out, format, ordered, sample, seed)
        }
        Command::Recognize { automaton, dag, all_runs, format, ordered } => {
            recognize(automaton, dag, all_runs, format, ordered)
        }
        Command::Weigh { automaton, dag } => weigh(automaton, dag),
        Command::Mass { automaton, mode, max_nodes, format, ordered, expect, tolerance, full_support } => {
            mass(automaton, mode.into(), max_nodes, format, ordered, expect, tolerance, full_support)
        }
        Command::Probe { series, b, c, n_max, from_enumeration, automaton, mode, max_nodes, format } => {
            probe(series, b, c, n_max, from_enumeration, automaton, mode.into(), max_nodes, format)
        }
        Command::Paths { dag } => {
            let g = load_dag(&dag)?;
            print_json(&json!(path_language(&g)?));
            Ok(ExitCode::SUCCESS)
        }
        Command::PlanarCheck { dag } => {
            let planar = is_planar(&load_dag(&dag)?);
            print_json(&json!({ "planar": planar }));
            Ok(status(planar))
        }
        Command::Canon { dag, format } => {
            let g = load_dag(&dag)?;
            let form = canonical_form(&g).to_hex();
            match format {
                Format::Json => print_json(&json!({ "canonical_form": form })),
                Format::Text => out!("{form}"),
                _ => return Err(usage(anyhow!("unsupported --format for this command"))),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Rewire { automaton, dag, run, edges, format } => rewire_cmd(automaton, dag, run, edges, format),
        Command::EncodeEdges { dag, format } => {
            let g = encode_edge_labels(&load_dag(&dag)?)?;
            emit_dags(std::slice::from_ref(&g), None, format)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Reproduce { criteria, fixtures, tolerance, seed, format } => {
            reproduce_cmd(criteria, fixtures, tolerance, seed, format)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(Failure { code, err }) => {
            eprintln!("error: {err:#}");
            ExitCode::from(code)
        }
    }
}
