use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};
use msolearn::graph::{gen_cograph, gen_tree, CwExpression, LabeledGraph};
use msolearn::learn::{
    err_empirical, err_true, learn_1d, learn_hd_consistent, pac_learn, synthesize_hypothesis, DistributionSpec,
    ErmMode, Hypothesis, LearnError, PacConfig, TrainingSequence,
};
use msolearn::logic::{eval_formula, parse_formula, Assignment, Formula};
use msolearn::realizable::{
    count_diagnostics, emit_table, realizable_tuples, vc_dimension, DpConfig, DpError, RealizableTable,
};
use msolearn::reductions::{
    gen_wsat, mc_via_learning, two_copy_gadget, wsat_brute, Cnf2, McConfig, OracleMode, ReductionError,
};
use msolearn::types::{compute_type, TypeStore};

mod verify;

const CAP_ENV: &str = "MSOLEARN_CAP_NODES";

#[derive(Parser)]
#[command(name = "msolearn", version, about = "Learn MSO-definable concepts on graphs of bounded clique-width")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Worker threads for the DP.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Cross-check negative answers by brute force on small inputs.
    #[arg(long)]
    verify: bool,
    /// Print the root table of realizable types.
    #[arg(long)]
    emit_table: bool,
}

#[derive(Args, Clone)]
struct Rank {
    #[arg(long)]
    q: usize,
    #[arg(long, default_value_t = 0)]
    ell: usize,
    #[arg(long = "set-budget", default_value_t = 0)]
    set_budget: usize,
}

#[derive(Args, Clone)]
struct GraphInput {
    /// Clique-width expression (.cwx).
    #[arg(long, conflicts_with = "graph")]
    expr: Option<PathBuf>,
    /// Graph as JSON.
    #[arg(long)]
    graph: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Model checking through learner queries.
    Mc {
        #[command(flatten)]
        input: GraphInput,
        #[arg(long)]
        formula: PathBuf,
        #[arg(long, value_enum, default_value_t = Oracle::Types)]
        oracle: Oracle,
        /// Largest candidate family in the set loop.
        #[arg(long, default_value_t = 4096)]
        family_cap: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Consistent learning of unary concepts.
    Learn1d {
        #[arg(long)]
        expr: PathBuf,
        #[arg(long)]
        train: PathBuf,
        #[command(flatten)]
        rank: Rank,
        /// One formula per line; learn the first consistent one.
        #[arg(long)]
        bank: Option<PathBuf>,
        #[arg(long, default_value = "hypothesis.json")]
        out: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Parameters for a fixed formula on a training sequence of any arity.
    Learnhd {
        #[arg(long)]
        expr: PathBuf,
        #[arg(long)]
        train: PathBuf,
        #[arg(long)]
        formula: PathBuf,
        #[command(flatten)]
        rank: Rank,
        #[command(flatten)]
        common: Common,
    },
    /// A type-based consistent hypothesis of any arity.
    Synth {
        #[arg(long)]
        expr: PathBuf,
        #[arg(long)]
        train: PathBuf,
        #[command(flatten)]
        rank: Rank,
        #[arg(long, default_value = "hypothesis.json")]
        out: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Sample from a distribution and minimize empirical risk.
    Pac {
        #[arg(long)]
        expr: PathBuf,
        #[arg(long)]
        dist: PathBuf,
        #[command(flatten)]
        rank: Rank,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        delta: f64,
        #[arg(long, default_value_t = 8.0)]
        c: f64,
        #[arg(long, default_value_t = 2)]
        vc_dim: usize,
        #[arg(long)]
        seed: u64,
        /// Sample size instead of the bound.
        #[arg(long)]
        m: Option<usize>,
        #[arg(long, value_enum, default_value_t = Erm::Types)]
        erm: Erm,
        #[arg(long, default_value = "hypothesis.json")]
        out: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Generate inputs.
    Gen {
        #[command(subcommand)]
        what: GenCommand,
    },
    /// Type of a tuple, by direct computation.
    Types {
        #[command(flatten)]
        input: GraphInput,
        /// Comma-separated vertex ids.
        #[arg(long, default_value = "")]
        tuple: String,
        #[arg(long)]
        q: usize,
        #[arg(long = "set-budget", default_value_t = 0)]
        set_budget: usize,
    },
    /// VC dimension of a formula's concept class on a graph.
    Vc {
        #[command(flatten)]
        input: GraphInput,
        #[arg(long)]
        formula: PathBuf,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value_t = 1)]
        ell: usize,
        #[arg(long, default_value_t = 4)]
        maxd: usize,
    },
    /// Time the DP on a generated family.
    Bench {
        #[arg(long, value_enum, default_value_t = Family::Cograph)]
        family: Family,
        /// Comma-separated vertex counts.
        #[arg(long, default_value = "50,100,200")]
        sizes: String,
        #[arg(long, default_value_t = 1)]
        q: usize,
        #[arg(long = "set-budget", default_value_t = 0)]
        set_budget: usize,
        #[arg(long, default_value_t = 4)]
        m: usize,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = 1)]
        ell: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
}

#[derive(Subcommand)]
enum GenCommand {
    /// Random cograph expression.
    Cograph {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Random tree expression.
    Tree {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Consistency instance from a 2-CNF: writes `wsat.cwx`, `wsat.txt`, `wsat.mso`.
    Wsat {
        #[arg(long)]
        cnf: PathBuf,
        #[arg(long)]
        ell: usize,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Two-copy gadget of a graph.
    Gadget {
        #[arg(long)]
        graph: PathBuf,
        /// Comma-separated vertices marked in copy 1.
        #[arg(long, default_value = "")]
        c1: String,
        #[arg(long, default_value = "")]
        c2: String,
        #[arg(long, default_value = "C")]
        label: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Oracle {
    Types,
    Bank,
}

#[derive(Clone, Copy, ValueEnum)]
enum Erm {
    Types,
    Subsequence,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Cograph,
    Tree,
}

/// Why a command stopped without a verdict.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Cap(String),
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn dp_failure(e: &DpError) -> Failure {
    match e {
        DpError::Cap { .. } => Failure::Cap(e.to_string()),
        _ => Failure::Usage(e.to_string()),
    }
}

impl From<DpError> for Failure {
    fn from(e: DpError) -> Self {
        dp_failure(&e)
    }
}

impl From<LearnError> for Failure {
    fn from(e: LearnError) -> Self {
        match &e {
            LearnError::Dp(d) => dp_failure(d),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<ReductionError> for Failure {
    fn from(e: ReductionError) -> Self {
        match e {
            ReductionError::Dp(d) => d.into(),
            ReductionError::Learn(l) => l.into(),
            ReductionError::Cap { .. } => Failure::Cap(e.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

macro_rules! usage_from {
    ($($t:ty),*) => {$(
        impl From<$t> for Failure {
            fn from(e: $t) -> Self {
                Failure::Usage(e.to_string())
            }
        }
    )*};
}

usage_from!(
    msolearn::graph::GraphError,
    msolearn::logic::ParseError,
    msolearn::logic::EvalError,
    msolearn::types::TypeError
);

/// Deterministic lines first; timings and interner sizes after a marker.
#[derive(Default)]
struct Report {
    body: String,
    timing: Vec<(String, Duration)>,
    extra: Vec<String>,
}

impl Report {
    fn line(&mut self, s: impl AsRef<str>) {
        self.body.push_str(s.as_ref());
        self.body.push('\n');
    }

    fn phase<T>(&mut self, name: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        self.timing.push((name.to_string(), start.elapsed()));
        out
    }

    fn store(&mut self, store: &TypeStore) {
        let s = store.stats();
        self.extra.push(format!(
            "interned types: {}, extension entries: {}, label sets: {}",
            s.types, s.children, s.label_sets
        ));
    }

    fn print(&self) {
        print!("{}", self.body);
        if !self.timing.is_empty() || !self.extra.is_empty() {
            println!("--- timing (varies between runs) ---");
            for (name, d) in &self.timing {
                println!("{name}: {:.3}s", d.as_secs_f64());
            }
            for e in &self.extra {
                println!("{e}");
            }
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn cap_from_env() -> Result<Option<usize>, Failure> {
    match std::env::var(CAP_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| Failure::Usage(format!("{CAP_ENV} must be a number, got `{v}`"))),
        Err(_) => Ok(None),
    }
}

fn dp_config(rank: &Rank, jobs: usize) -> Result<DpConfig, Failure> {
    if rank.set_budget > rank.q {
        return Err(Failure::Usage(format!("set budget {} exceeds q = {}", rank.set_budget, rank.q)));
    }
    Ok(DpConfig { jobs: jobs.max(1), max_types: cap_from_env()?, ..DpConfig::new(rank.q, rank.ell, rank.set_budget) })
}

fn load_expr(path: &Path) -> Result<CwExpression, Failure> {
    Ok(CwExpression::parse_cwx(&read(path)?)?)
}

fn load_graph(input: &GraphInput) -> Result<LabeledGraph, Failure> {
    match (&input.expr, &input.graph) {
        (Some(e), None) => Ok(load_expr(e)?.eval()?),
        (None, Some(g)) => Ok(LabeledGraph::from_json(&read(g)?)?),
        _ => Err(Failure::Usage("give exactly one of --expr or --graph".into())),
    }
}

fn load_formula(path: &Path, labels: &BTreeSet<String>) -> Result<Formula, Failure> {
    Ok(parse_formula(&read(path)?, labels)?)
}

fn load_training(path: &Path) -> Result<TrainingSequence, Failure> {
    Ok(TrainingSequence::parse(&read(path)?)?)
}

fn list(s: &str) -> Vec<String> {
    s.split(',').map(str::trim).filter(|x| !x.is_empty()).map(String::from).collect()
}

fn emit(report: &mut Report, common: &Common, store: &TypeStore, table: Option<&RealizableTable>) {
    if let (true, Some(t)) = (common.emit_table, table) {
        report.line(format!("table: {} rows", t.rows.len()));
        report.body.push_str(&emit_table(store, t));
    }
}

fn diagnostics(report: &mut Report, table: &RealizableTable, m: usize, k: usize) {
    // VC dimension unknown here; the default bound uses d = 2.
    let c = count_diagnostics(table, 2, m, k, table.distinct.len().max(1));
    report.line(format!("largest node table: {} (diagnostic bound {})", c.max, c.bound));
    if !c.flagged.is_empty() {
        report.line(format!("diagnostic: {} nodes above the bound", c.flagged.len()));
    }
}

/// Runs one command; `Ok(true)` is a positive answer.
fn run(cli: Cli, report: &mut Report) -> Result<bool, Failure> {
    match cli.command {
        Command::Mc { input, formula, oracle, family_cap, common } => {
            let g = load_graph(&input)?;
            let phi = load_formula(&formula, &g.label_names())?;
            let cfg = McConfig {
                cap: family_cap,
                mode: match oracle {
                    Oracle::Types => OracleMode::Types,
                    Oracle::Bank => OracleMode::Bank,
                },
                jobs: common.jobs.max(1),
                max_types: cap_from_env()?,
            };
            let store = TypeStore::new();
            let (v, stats) = report.phase("model checking", || mc_via_learning(&store, &g, &phi, &cfg))?;
            report.line(format!("verdict: {v}"));
            report.line(format!("oracle calls: {}", stats.oracle_calls));
            report.line(format!("largest candidate family: {}", stats.max_family));
            if common.verify && !v {
                let direct = verify::desk_scale(g.order()).then(|| eval_formula(&g, &phi, &Assignment::new()));
                report.line(verify::line(direct.transpose()?.map(|b| b == v)));
            }
            report.store(&store);
            Ok(v)
        }
        Command::Learn1d { expr, train, rank, bank, out, common } => {
            let e = load_expr(&expr)?;
            let s = load_training(&train)?;
            let cfg = dp_config(&rank, common.jobs)?;
            let store = TypeStore::new();
            let bank = match &bank {
                Some(p) => Some(
                    read(p)?
                        .lines()
                        .map(|l| l.split('#').next().unwrap_or("").trim())
                        .filter(|l| !l.is_empty())
                        .map(|l| parse_formula(l, &e.labels_used()))
                        .collect::<Result<Vec<_>, _>>()?,
                ),
                None => None,
            };
            let h = report.phase("learning", || learn_1d(&store, &e, &s, cfg, bank.as_deref()))?;
            if common.emit_table {
                let t = report.phase("table", || realizable_tuples(&store, &e, &s.tuples(), cfg))?;
                emit(report, &common, &store, Some(&t));
            }
            finish_hypothesis(report, &common, &store, &e, &s, cfg, h, &out)
        }
        Command::Learnhd { expr, train, formula, rank, common } => {
            let e = load_expr(&expr)?;
            let s = load_training(&train)?;
            let phi = load_formula(&formula, &e.labels_used())?;
            let cfg = dp_config(&rank, common.jobs)?;
            let store = TypeStore::new();
            let w = report.phase("learning", || learn_hd_consistent(&store, &e, &s, &phi, cfg))?;
            if common.emit_table {
                let t = report.phase("table", || realizable_tuples(&store, &e, &s.tuples(), cfg))?;
                emit(report, &common, &store, Some(&t));
            }
            let found = w.is_some();
            match w {
                Some(w) => report.line(format!("witness: ({})", w.join(","))),
                None => {
                    report.line("verdict: NoConsistent");
                    if common.verify {
                        let g = e.eval()?;
                        let brute = verify::desk_scale(g.order())
                            .then(|| verify::brute_witness(&g, &phi, &s, cfg.ell))
                            .transpose()?;
                        report.line(verify::line(brute.map(|b| b.is_none())));
                    }
                }
            }
            report.store(&store);
            Ok(found)
        }
        Command::Synth { expr, train, rank, out, common } => {
            let e = load_expr(&expr)?;
            let s = load_training(&train)?;
            let cfg = dp_config(&rank, common.jobs)?;
            let store = TypeStore::new();
            let h = report.phase("synthesis", || synthesize_hypothesis(&store, &e, &s, cfg))?;
            if common.emit_table {
                let t = report.phase("table", || realizable_tuples(&store, &e, &s.tuples(), cfg))?;
                emit(report, &common, &store, Some(&t));
            }
            finish_hypothesis(report, &common, &store, &e, &s, cfg, h, &out)
        }
        Command::Pac { expr, dist, rank, eps, delta, c, vc_dim, seed, m, erm: mode, out, common } => {
            let e = load_expr(&expr)?;
            let d = DistributionSpec::from_json(&read(&dist)?)?;
            let cfg = dp_config(&rank, common.jobs)?;
            let pac = PacConfig {
                eps,
                delta,
                c,
                vc_dim,
                seed,
                m_override: m,
                mode: match mode {
                    Erm::Types => ErmMode::Types,
                    Erm::Subsequence => ErmMode::Subsequence,
                },
            };
            let store = TypeStore::new();
            let run = report.phase("learning", || pac_learn(&store, &e, &d, cfg, &pac))?;
            let emp = err_empirical(&store, &e, &run.hypothesis, &run.sample, cfg.jobs)?;
            let tru = report.phase("true error", || err_true(&store, &e, &run.hypothesis, &d, cfg.jobs))?;
            report.line(format!("sample size: {}", run.m));
            report.line(format!("params: ({})", run.hypothesis.params.join(",")));
            report.line(format!("empirical error: {emp}"));
            report.line(format!("true error: {tru}"));
            if common.emit_table {
                let t = realizable_tuples(&store, &e, &run.sample.tuples(), cfg)?;
                emit(report, &common, &store, Some(&t));
            }
            write(&out, &run.hypothesis.to_json())?;
            report.line(format!("hypothesis: {}", out.display()));
            report.store(&store);
            Ok(true)
        }
        Command::Gen { what } => gen(what, report),
        Command::Types { input, tuple, q, set_budget } => {
            let g = load_graph(&input)?;
            let ids = list(&tuple);
            let refs: Vec<&str> = ids.iter().map(String::as_str).collect();
            let store = TypeStore::new();
            let t = report.phase("types", || compute_type(&store, &g, &refs, &[], q, set_budget))?;
            report.line(format!("type: {}", store.digest_hex(t)));
            report.line(format!("extensions: {}", store.get(t).vext.len()));
            report.line(format!("set extensions: {}", store.get(t).sext.len()));
            report.store(&store);
            Ok(true)
        }
        Command::Vc { input, formula, k, ell, maxd } => {
            let g = load_graph(&input)?;
            let phi = load_formula(&formula, &g.label_names())?;
            let d = report.phase("vc", || vc_dimension(&g, &phi, k, ell, maxd))?;
            report.line(format!("vc dimension: {d}{}", if d == maxd { " (capped)" } else { "" }));
            Ok(true)
        }
        Command::Bench { family, sizes, q, set_budget, m, k, ell, seed, jobs } => {
            bench(report, family, &sizes, q, set_budget, m, k, ell, seed, jobs)
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn finish_hypothesis(
    report: &mut Report,
    common: &Common,
    store: &TypeStore,
    e: &CwExpression,
    s: &TrainingSequence,
    cfg: DpConfig,
    h: Option<Hypothesis>,
    out: &Path,
) -> Result<bool, Failure> {
    match h {
        Some(h) => {
            report.line(format!("params: ({})", h.params.join(",")));
            if let Some(f) = &h.formula {
                report.line(format!("formula: {f}"));
            }
            report.line(format!("positive types: {}", h.positive_types.len()));
            write(out, &h.to_json())?;
            report.line(format!("hypothesis: {}", out.display()));
            if s.k() > 0 && !s.is_empty() {
                let t = realizable_tuples(store, e, &s.tuples(), cfg)?;
                diagnostics(report, &t, s.len(), s.k());
            }
            report.store(store);
            Ok(true)
        }
        None => {
            report.line("verdict: NoConsistent");
            if common.verify {
                let g = e.eval()?;
                let brute = verify::desk_scale(g.order())
                    .then(|| verify::brute_separable(&g, s, cfg))
                    .transpose()?;
                report.line(verify::line(brute.map(|b| !b)));
            }
            report.store(store);
            Ok(false)
        }
    }
}

fn gen(what: GenCommand, report: &mut Report) -> Result<bool, Failure> {
    let emit_text = |report: &mut Report, out: Option<PathBuf>, text: String| -> Result<(), Failure> {
        match out {
            Some(p) => {
                write(&p, &text)?;
                report.line(format!("wrote {}", p.display()));
            }
            None => report.body.push_str(&text),
        }
        Ok(())
    };
    match what {
        GenCommand::Cograph { n, seed, out } => emit_text(report, out, gen_cograph(n, seed)?.to_cwx())?,
        GenCommand::Tree { n, seed, out } => emit_text(report, out, gen_tree(n, seed)?.to_cwx())?,
        GenCommand::Wsat { cnf, ell, out_dir } => {
            let f = Cnf2::parse_dimacs(&read(&cnf)?)?;
            let inst = gen_wsat(&f, ell)?;
            fs::create_dir_all(&out_dir)?;
            let mut train = String::new();
            for (e, l) in inst.examples.iter().zip(&inst.labels) {
                let _ = writeln!(train, "{} {}", e.join(" "), if *l { '+' } else { '-' });
            }
            write(&out_dir.join("wsat.cwx"), &inst.expr.to_cwx())?;
            write(&out_dir.join("wsat.txt"), &train)?;
            write(&out_dir.join("wsat.mso"), &format!("{}\n", inst.phi))?;
            report.line(format!("wrote {}/wsat.{{cwx,txt,mso}}", out_dir.display()));
            report.line(format!("q: {}", inst.q));
            report.line(format!("weight-{ell} satisfiable: {}", wsat_brute(&f, ell)));
        }
        GenCommand::Gadget { graph, c1, c2, label, out } => {
            let g = LabeledGraph::from_json(&read(&graph)?)?;
            let (c1, c2): (BTreeSet<String>, BTreeSet<String>) = (list(&c1).into_iter().collect(), list(&c2).into_iter().collect());
            emit_text(report, out, two_copy_gadget(&g, &c1, &c2, &label)?.to_json())?;
        }
    }
    Ok(true)
}

#[allow(clippy::too_many_arguments)]
fn bench(
    report: &mut Report,
    family: Family,
    sizes: &str,
    q: usize,
    set_budget: usize,
    m: usize,
    k: usize,
    ell: usize,
    seed: u64,
    jobs: usize,
) -> Result<bool, Failure> {
    let sizes = list(sizes)
        .iter()
        .map(|s| s.parse::<usize>().map_err(|_| Failure::Usage(format!("bad size `{s}`"))))
        .collect::<Result<Vec<_>, _>>()?;
    let cfg = DpConfig { jobs: jobs.max(1), max_types: cap_from_env()?, ..DpConfig::new(q, ell, set_budget) };
    report.line(format!("family: {}", match family { Family::Cograph => "cograph", Family::Tree => "tree" }));
    let mut rows = Vec::new();
    for &n in &sizes {
        let e = match family {
            Family::Cograph => gen_cograph(n, seed)?,
            Family::Tree => gen_tree(n, seed)?,
        };
        let mut ids: Vec<String> = e.base_vertices().iter().map(|s| s.to_string()).collect();
        ids.sort();
        // Examples spread evenly over the sorted vertex ids.
        let examples: Vec<Vec<String>> =
            (0..m).map(|i| (0..k).map(|j| ids[(i * 7 + j * 3 + 1) % ids.len()].clone()).collect()).collect();
        let store = TypeStore::new();
        let start = Instant::now();
        let t = realizable_tuples(&store, &e, &examples, cfg)?;
        let took = start.elapsed();
        report.line(format!("n={n}: |expr|={} visits={} rows={}", e.size(), t.visits, t.rows.len()));
        rows.push((n, e.size(), took, store.len()));
    }
    let mut table = String::from("n\t|expr|\tseconds\ttypes");
    for (n, size, took, types) in rows {
        let _ = write!(table, "\n{n}\t{size}\t{:.3}\t{types}", took.as_secs_f64());
    }
    report.extra.push(table);
    Ok(true)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let mut report = Report::default();
    let result = run(cli, &mut report);
    report.print();
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Cap(msg)) => {
            eprintln!("resource cap: {msg}");
            ExitCode::from(3)
        }
    }
}
