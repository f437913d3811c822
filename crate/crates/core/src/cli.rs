//! Command-line front end: `correlator`, `check`, `table` and `export`.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage error, 3 I/O error.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::algebra::Rational;
use crate::key::{CorrelatorKey, GenusIndex};
use crate::numbers::{correlators_to_csv, correlators_to_json, table_to_csv, table_to_json, table_to_text, tabulate};
use crate::oracle::{
    apply_lhat, apply_mhat, master_equation_residual, render_residual_table, residual_report, solve_f,
    TPoly, TruncatedFreeEnergy,
};
use crate::q_refinement::{compute_q_correlator, structure_report, symmetry_report, StructureReport, SymmetryReport};
use crate::recursion::{base_correlator, BaseCorrelator, Correlator, CorrelatorStore, Flavor, RecursionError};
use crate::specialization::{
    principal_specialize, quantum_curve_report, quantum_curve_residual, stratum, QValue, UnstableDecomposition,
};

pub const CACHE_ENV: &str = "OPEN_TR_CACHE_DIR";

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFICATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Constraints,
    Master,
    Dual,
    QuantumCurve,
    QSymmetry,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Export {
    Correlators,
    QCorrelators,
    Numbers,
    QSymmetry,
}

/// `off`, `symbolic` or an exact value `p/q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum QMode {
    Off,
    Symbolic,
    Value(Rational),
}

impl FromStr for QMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "off" => Ok(QMode::Off),
            "symbolic" => Ok(QMode::Symbolic),
            v => v
                .parse::<Rational>()
                .map(QMode::Value)
                .map_err(|_| format!("expected off, symbolic or p/q, got {v:?}")),
        }
    }
}

#[derive(Debug, Args, Clone)]
pub struct GlobalOpts {
    /// Largest `4g + n` to compute.
    #[arg(long, global = true, default_value_t = 8)]
    pub budget: u32,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Worker threads for the recursion; output does not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Directory for cached correlators.
    #[arg(long, global = true, env = CACHE_ENV)]
    pub cache_dir: Option<PathBuf>,
}

#[derive(Debug, Parser)]
#[command(name = "open-tr", version, about = "Exact correlators and intersection numbers of open surfaces")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print one correlator W_{g,n}.
    Correlator {
        /// Genus as an integer or p/2.
        #[arg(long)]
        g: GenusIndex,
        #[arg(long)]
        n: u32,
        /// Also print the unstable initial data (0,1) and (0,2).
        #[arg(long)]
        allow_unstable: bool,
        /// Use the Q-graded recursion.
        #[arg(long)]
        graded: bool,
    },
    /// Run a verification suite.
    Check {
        #[arg(value_enum)]
        suite: Suite,
        /// Highest hbar order for the quantum curve.
        #[arg(long, default_value_t = 2)]
        order: i32,
        /// Value of Q for the quantum curve: symbolic or p/q.
        #[arg(long, default_value = "1")]
        q: QMode,
    },
    /// Tabulate every nonzero intersection number within budget.
    Table,
    /// Write a versioned export.
    Export {
        #[arg(long, value_enum, default_value_t = Export::Correlators)]
        what: Export,
        /// Output file; stdout when absent.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

/// Resolved run settings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub budget: u32,
    /// Largest time index the oracle tracks.
    pub degree_bound: u32,
    pub cache_dir: Option<PathBuf>,
    pub format: Format,
    pub threads: Option<usize>,
}

impl RunConfig {
    pub fn from_opts(g: &GlobalOpts) -> Self {
        RunConfig {
            budget: g.budget,
            degree_bound: CorrelatorKey::max_t_index(g.budget),
            cache_dir: g.cache_dir.clone(),
            format: g.format,
            threads: g.threads,
        }
    }

    pub fn store(&self, flavor: Flavor) -> Result<CorrelatorStore, RecursionError> {
        let mut s = CorrelatorStore::new(flavor);
        if let Some(dir) = &self.cache_dir {
            s = s.with_cache_dir(dir)?;
        }
        if let Some(t) = self.threads {
            s = s.with_threads(t)?;
        }
        Ok(s)
    }
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Verification(String),
    Io(String),
}

impl From<RecursionError> for Failure {
    fn from(e: RecursionError) -> Self {
        match e {
            RecursionError::Io(_) | RecursionError::CacheCorrupt { .. } => Failure::Io(e.to_string()),
            RecursionError::Unstable(_) => Failure::Usage(e.to_string()),
            other => Failure::Verification(other.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

fn verification<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Verification(e.to_string())
}

fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("plain data");
    s.push('\n');
    s
}

/// Parses `args` (program name first) and runs the command; returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(text.as_bytes());
                    EXIT_OK
                }
                _ => {
                    let _ = err.write_all(text.as_bytes());
                    EXIT_USAGE
                }
            };
        }
    };
    let cfg = RunConfig::from_opts(&cli.global);
    match execute(&cfg, &cli.command, out) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let (code, msg) = match f {
                Failure::Usage(m) => (EXIT_USAGE, m),
                Failure::Verification(m) => (EXIT_VERIFICATION, m),
                Failure::Io(m) => (EXIT_IO, m),
            };
            let _ = writeln!(err, "error: {msg}");
            code
        }
    }
}

fn execute(cfg: &RunConfig, cmd: &Command, out: &mut dyn Write) -> Result<(), Failure> {
    let text = match cmd {
        Command::Correlator {
            g,
            n,
            allow_unstable,
            graded,
        } => cmd_correlator(cfg, CorrelatorKey::new(g.twice(), *n), *allow_unstable, *graded)?,
        Command::Check { suite, order, q } => cmd_check(cfg, *suite, *order, q)?,
        Command::Table => cmd_table(cfg)?,
        Command::Export { what, output } => {
            let body = cmd_export(cfg, *what)?;
            if let Some(path) = output {
                std::fs::write(path, body.as_bytes())?;
                return Ok(());
            }
            body
        }
    };
    out.write_all(text.as_bytes())?;
    Ok(())
}

fn render_correlators(cfg: &RunConfig, flavor: Flavor, ws: &[Arc<Correlator>]) -> String {
    match cfg.format {
        Format::Json => correlators_to_json(flavor, cfg.budget, ws),
        Format::Csv => correlators_to_csv(ws),
        Format::Text => {
            let mut s = String::new();
            for w in ws {
                let _ = writeln!(s, "W{} = {}", w.key(), w.value());
            }
            s
        }
    }
}

fn cmd_correlator(cfg: &RunConfig, key: CorrelatorKey, allow_unstable: bool, graded: bool) -> Result<String, Failure> {
    let initial = key == CorrelatorKey::new(1, 1);
    if !key.is_stable() {
        if key.n == 0 || !(initial || allow_unstable) {
            return Err(Failure::Usage(format!(
                "{key} is unstable; pass --allow-unstable to print initial data"
            )));
        }
        let text = if initial && graded {
            compute_q_correlator(&cfg.store(Flavor::QGraded)?, key)?.value().to_string()
        } else {
            match base_correlator(key)? {
                BaseCorrelator::Differential(v) => v.to_string(),
                BaseCorrelator::Bergman => "1 * (z1 - z2)^-2 dz1 dz2".to_string(),
            }
        };
        return Ok(match cfg.format {
            Format::Json => json(&serde_json::json!({
                "g": key.genus.to_string(),
                "n": key.n,
                "initial": true,
                "text": text,
            })),
            Format::Csv => format!("g,n,text\n{},{},{}\n", key.genus, key.n, text),
            Format::Text => format!("W{key} = {text}\n"),
        });
    }
    if key.level() > cfg.budget {
        return Err(Failure::Usage(format!(
            "{key} has 4g + n = {} above budget {}",
            key.level(),
            cfg.budget
        )));
    }
    let flavor = if graded { Flavor::QGraded } else { Flavor::Baseline };
    let store = cfg.store(flavor)?;
    let w = store.ensure(key)?;
    Ok(render_correlators(cfg, flavor, &[w]))
}

fn recursion_free_energy(cfg: &RunConfig, store: &CorrelatorStore) -> Result<TruncatedFreeEnergy, Failure> {
    let ws = store.ensure_budget(cfg.budget)?;
    TruncatedFreeEnergy::from_correlators(cfg.budget, ws.iter().map(|w| (w.key(), w.value()))).map_err(verification)
}

#[derive(Serialize)]
struct CheckLine {
    item: String,
    ok: bool,
    detail: String,
}

struct CheckOutcome {
    suite: &'static str,
    lines: Vec<CheckLine>,
    extra: Option<serde_json::Value>,
}

impl CheckOutcome {
    fn new(suite: &'static str) -> Self {
        CheckOutcome {
            suite,
            lines: Vec::new(),
            extra: None,
        }
    }

    fn push(&mut self, item: impl Into<String>, ok: bool, detail: impl Into<String>) {
        self.lines.push(CheckLine {
            item: item.into(),
            ok,
            detail: detail.into(),
        });
    }

    fn passed(&self) -> bool {
        self.lines.iter().all(|l| l.ok)
    }

    fn render(&self, format: Format) -> String {
        match format {
            Format::Json => json(&serde_json::json!({
                "suite": self.suite,
                "passed": self.passed(),
                "checks": self.lines,
                "details": self.extra,
            })),
            Format::Csv => {
                let mut s = String::from("item,ok,detail\n");
                for l in &self.lines {
                    let _ = writeln!(s, "{},{},{}", l.item, l.ok, l.detail.replace(',', ";"));
                }
                s
            }
            Format::Text => {
                let mut s = String::new();
                for l in &self.lines {
                    let mark = if l.ok { "ok  " } else { "FAIL" };
                    let _ = writeln!(s, "{mark} {}  {}", l.item, l.detail);
                }
                let _ = writeln!(s, "{}: {}", self.suite, if self.passed() { "passed" } else { "failed" });
                s
            }
        }
    }
}

fn cmd_check(cfg: &RunConfig, suite: Suite, order: i32, q: &QMode) -> Result<String, Failure> {
    let outcome = match suite {
        Suite::Dual => check_dual(cfg)?,
        Suite::Constraints => check_constraints(cfg)?,
        Suite::Master => check_master(cfg)?,
        Suite::QuantumCurve => check_quantum_curve(cfg, order, q)?,
        Suite::QSymmetry => check_q_symmetry(cfg)?,
    };
    let text = outcome.render(cfg.format);
    if outcome.passed() {
        Ok(text)
    } else {
        let first = outcome.lines.iter().find(|l| !l.ok).expect("a failing line");
        Err(Failure::Verification(format!(
            "{text}first counterexample: {} {}",
            first.item, first.detail
        )))
    }
}

fn check_dual(cfg: &RunConfig) -> Result<CheckOutcome, Failure> {
    let store = cfg.store(Flavor::Baseline)?;
    let f = solve_f(cfg.budget).map_err(verification)?;
    let mut o = CheckOutcome::new("dual");
    for w in store.ensure_budget(cfg.budget)? {
        let key = w.key();
        let expect = f.correlator_differential(key);
        let same = &expect == w.value();
        o.push(format!("W{key}"), same, format!("{} terms", w.value().len()));
        if let Some(s) = w.symmetry_witness() {
            o.push(format!("W{key} symmetry"), false, format!("{s:?}"));
        }
        if let Some(e) = w.homogeneity_violation() {
            o.push(format!("W{key} homogeneity"), false, format!("{e:?}"));
        }
    }
    Ok(o)
}

fn check_constraints(cfg: &RunConfig) -> Result<CheckOutcome, Failure> {
    let mut o = CheckOutcome::new("constraints");
    let empty = TruncatedFreeEnergy::empty(cfg.budget.max(8));
    let l0 = apply_lhat(0, &empty).map_err(verification)?;
    let m0 = apply_mhat(0, &empty).map_err(verification)?;
    o.push("L^_0 on F = 0", l0 == TPoly::constant(Rational::new(13, 8)), l0.to_string());
    o.push("M^_0 on F = 0", m0 == TPoly::constant(Rational::new(3, 4)), m0.to_string());
    let store = cfg.store(Flavor::Baseline)?;
    let f = recursion_free_energy(cfg, &store)?;
    let rows = residual_report(&f, 0..=4).map_err(verification)?;
    for r in &rows {
        let detail = match r.max_degree {
            None => "0".to_string(),
            Some(d) => format!("{} terms, max degree {d}", r.terms),
        };
        o.push(format!("{}_{}", r.operator, r.k), r.vanishes(), detail);
    }
    o.extra = Some(serde_json::Value::String(render_residual_table(&rows)));
    Ok(o)
}

fn check_master(cfg: &RunConfig) -> Result<CheckOutcome, Failure> {
    let mut o = CheckOutcome::new("master");
    let store = cfg.store(Flavor::Baseline)?;
    let f = recursion_free_energy(cfg, &store)?;
    for which in [2u8, 3] {
        let r = master_equation_residual(which, &f).map_err(verification)?;
        o.push(format!("residual {which}"), r.is_zero(), format!("{} terms", r.len()));
    }
    Ok(o)
}

fn check_quantum_curve(cfg: &RunConfig, order: i32, q: &QMode) -> Result<CheckOutcome, Failure> {
    let mut o = CheckOutcome::new("quantum-curve");
    let f = solve_f(cfg.budget).map_err(verification)?;
    let psi = principal_specialize(&f, order, UnstableDecomposition::default())
        .map_err(|e| Failure::Usage(e.to_string()))?;
    let qv = match q {
        QMode::Off => QValue::Value(Rational::one()),
        QMode::Symbolic => QValue::Symbolic,
        QMode::Value(v) => QValue::Value(v.clone()),
    };
    let report = quantum_curve_report(&psi, &qv).map_err(verification)?;
    for s in &report.strata {
        o.push(
            format!("hbar^{}", s.hbar_power),
            s.vanishes,
            s.leading.clone().unwrap_or_else(|| "0".to_string()),
        );
    }
    let symbolic = quantum_curve_residual(&psi, &QValue::Symbolic).map_err(verification)?;
    let semi = stratum(&symbolic, 0).map_err(verification)?;
    o.push("semiclassical, symbolic Q", semi.is_zero(), semi.to_string());
    o.extra = Some(serde_json::to_value(&report).expect("plain data"));
    Ok(o)
}

#[derive(Serialize)]
struct QKeyReport {
    structure: StructureReport,
    symmetry: SymmetryReport,
}

fn q_reports(cfg: &RunConfig) -> Result<Vec<QKeyReport>, Failure> {
    let graded = cfg.store(Flavor::QGraded)?;
    let plain = cfg.store(Flavor::Baseline)?;
    let base = plain.ensure_budget(cfg.budget)?;
    graded.ensure_budget(cfg.budget)?;
    let mut out = Vec::new();
    for b in base {
        let q = compute_q_correlator(&graded, b.key())?;
        out.push(QKeyReport {
            structure: structure_report(&q, &b),
            symmetry: symmetry_report(&q),
        });
    }
    Ok(out)
}

fn check_q_symmetry(cfg: &RunConfig) -> Result<CheckOutcome, Failure> {
    let mut o = CheckOutcome::new("q-symmetry");
    let reports = q_reports(cfg)?;
    for r in &reports {
        let s = &r.structure;
        o.push(
            format!("Q{} structure", s.key),
            s.holds(),
            format!(
                "Q=1 reduction {}, degree {:?} <= {}, powers {:?}",
                s.reduces_to_baseline, s.q_degree, s.degree_bound, s.q_powers
            ),
        );
        let detail = match &r.symmetry.witness {
            None => "symmetric".to_string(),
            Some(w) => format!(
                "asymmetric (expected, experimental): swap {:?} at {:?}: {} vs {}",
                w.permutation, w.z_exponents, w.polynomial, w.swapped_polynomial
            ),
        };
        o.push(format!("Q{} symmetry", r.symmetry.key), true, detail);
    }
    o.extra = Some(serde_json::to_value(&reports).expect("plain data"));
    Ok(o)
}

fn cmd_table(cfg: &RunConfig) -> Result<String, Failure> {
    let store = cfg.store(Flavor::Baseline)?;
    let f = solve_f(cfg.budget).map_err(verification)?;
    let t = tabulate(&store, &f, cfg.budget).map_err(verification)?;
    if let Some(bad) = t.disagreements().next() {
        return Err(Failure::Verification(format!(
            "pipelines disagree on {}: recursion {}, oracle {}",
            bad.index,
            bad.value,
            bad.other.clone().unwrap_or_else(Rational::zero)
        )));
    }
    Ok(match cfg.format {
        Format::Json => table_to_json(&t),
        Format::Csv => table_to_csv(&t),
        Format::Text => table_to_text(&t),
    })
}

fn cmd_export(cfg: &RunConfig, what: Export) -> Result<String, Failure> {
    match what {
        Export::Correlators | Export::QCorrelators => {
            let flavor = if what == Export::Correlators {
                Flavor::Baseline
            } else {
                Flavor::QGraded
            };
            let store = cfg.store(flavor)?;
            let ws = store.ensure_budget(cfg.budget)?;
            let cfg = RunConfig {
                format: if cfg.format == Format::Text { Format::Json } else { cfg.format },
                ..cfg.clone()
            };
            Ok(render_correlators(&cfg, flavor, &ws))
        }
        Export::Numbers => {
            let cfg = RunConfig {
                format: if cfg.format == Format::Text { Format::Json } else { cfg.format },
                ..cfg.clone()
            };
            cmd_table(&cfg)
        }
        Export::QSymmetry => {
            let reports: Vec<SymmetryReport> = q_reports(cfg)?.into_iter().map(|r| r.symmetry).collect();
            Ok(json(&serde_json::json!({
                "format": "open-tr/q-symmetry",
                "version": crate::numbers::EXPORT_VERSION,
                "budget": cfg.budget,
                "reports": reports,
            })))
        }
    }
}
