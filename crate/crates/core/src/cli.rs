//! Command-line front end.
//!
//! Exit codes: 0 when every check passed, 1 when a property or contract
//! violation was found (details in the report), 2 on input or usage errors.
//! Reports start with a single `PASS:`/`FAIL:` line followed by the seed.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::algebra::{cocycle_form, BasisIndex, Element, Window};
use crate::derivation::{check_leibniz, decompose, find_annihilators, DecomposeError, InnerOuterDerivation};
use crate::expr_io::{self, ParseError};
use crate::sample;
use crate::two_local::{
    self, audit_witnesses, default_probes, lemma31_constraint_check, lemma32_form_check, lemma33_form_check,
    lemma34_support_check, reconstruct, CheckError, ReconstructError, TwoLocalMap, WitnessFamilySpec,
    WitnessViolation,
};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "blocklie", version, about = "Exact computations in the Block-type Lie algebra")]
struct Cli {
    /// Seed for every randomized check.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct WindowArg {
    /// ALPHA_MIN ALPHA_MAX I_MAX
    #[arg(long, num_args = 3, allow_negative_numbers = true, value_names = ["ALPHA_MIN", "ALPHA_MAX", "I_MAX"])]
    window: Vec<i64>,
}

#[derive(Debug, Args)]
struct WitnessArg {
    /// Witness family file (TOML).
    #[arg(long)]
    witness: PathBuf,
    /// Load without checking that perturbation kernels kill their pairs.
    #[arg(long)]
    no_validate: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print [x, y].
    Bracket { x: String, y: String },
    /// Print D(x).
    Apply {
        #[arg(long)]
        derivation: String,
        x: String,
    },
    /// Print the central-extension cocycle ψ(x, y).
    Cocycle { x: String, y: String },
    /// Jacobi identity on every basis triple of a window.
    CheckJacobi(WindowArg),
    /// Antisymmetry on every basis pair of a window.
    CheckAntisym(WindowArg),
    /// Antisymmetry and the 2-cocycle identity of ψ on a window.
    CheckCocycle(WindowArg),
    /// Leibniz identity on random element pairs.
    CheckDerivation {
        #[arg(long, conflicts_with = "spec", required_unless_present = "spec")]
        table: Option<PathBuf>,
        #[arg(long)]
        spec: Option<String>,
        #[arg(long, default_value_t = 100)]
        pairs: usize,
        /// Sampling window for spec mode (tables use their own window).
        #[arg(long, num_args = 3, allow_negative_numbers = true, default_values_t = [-3, 3, 2])]
        window: Vec<i64>,
    },
    /// Write a table as ad(a) + λd.
    Decompose {
        #[arg(long)]
        table: PathBuf,
        /// Search window for the support of a (default: the table's window).
        #[arg(long, num_args = 3, allow_negative_numbers = true)]
        search: Option<Vec<i64>>,
    },
    /// Basis of the derivations ad(a) + λd killing every target.
    Annihilators {
        /// Targets separated by ';'.
        #[arg(long, allow_hyphen_values = true)]
        targets: String,
        #[arg(long, num_args = 3, allow_negative_numbers = true)]
        search: Vec<i64>,
    },
    /// Shape of a derivation that kills L[β,j].
    Lemma31 {
        #[arg(long, allow_negative_numbers = true)]
        beta: i64,
        #[arg(long)]
        j: u64,
        #[arg(long, allow_hyphen_values = true)]
        spec: String,
    },
    /// Shape of a derivation that kills L[p,0] + L[-2p,2p].
    Lemma34 {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        p: u64,
        #[arg(long, allow_hyphen_values = true)]
        spec: String,
    },
    /// Δ(L[β,j]) = j·ξ·L[β,j] on every basis vector of a window.
    Lemma32 {
        #[command(flatten)]
        witness: WitnessArg,
        #[arg(long, num_args = 3, allow_negative_numbers = true, default_values_t = [-3, 3, 3])]
        window: Vec<i64>,
    },
    /// Δ(x) = ξ_x·Σ k·μ_{γ,k}·L[γ,k] on given or random elements.
    Lemma33 {
        #[command(flatten)]
        witness: WitnessArg,
        #[arg(long = "element", allow_hyphen_values = true)]
        elements: Vec<String>,
        /// Random samples drawn when no --element is given.
        #[arg(long, default_value_t = 10)]
        samples: usize,
        #[arg(long, num_args = 3, allow_negative_numbers = true, default_values_t = [-3, 3, 3])]
        window: Vec<i64>,
    },
    /// Witness contract and homogeneity audit.
    Audit {
        #[command(flatten)]
        witness: WitnessArg,
        #[arg(long, default_value_t = 50)]
        pairs: usize,
        #[arg(long, num_args = 3, allow_negative_numbers = true, default_values_t = [-3, 3, 3])]
        window: Vec<i64>,
    },
    /// Recover the global derivation behind a 2-local map and verify it.
    Reconstruct {
        #[command(flatten)]
        witness: WitnessArg,
        #[arg(long, num_args = 3, allow_negative_numbers = true, default_values_t = [-4, 4, 4])]
        probe_window: Vec<i64>,
    },
}

/// A failure that ends the run with exit code 2.
struct UsageError(String);

impl UsageError {
    fn parse(what: &str, text: &str, err: ParseError) -> Self {
        let at = err.offset().min(text.len());
        let caret = " ".repeat(text.get(..at).map_or(at, |s| s.chars().count()));
        UsageError(format!("{what}: {err}\n  {text}\n  {caret}^"))
    }
}

fn element_arg(what: &str, text: &str) -> Result<Element, UsageError> {
    expr_io::parse_element(text).map_err(|e| UsageError::parse(what, text, e))
}

fn derivation_arg(what: &str, text: &str) -> Result<InnerOuterDerivation, UsageError> {
    expr_io::parse_derivation(text).map_err(|e| UsageError::parse(what, text, e))
}

fn window_arg(v: &[i64]) -> Result<Window, UsageError> {
    Window::from_signed(v[0], v[1], v[2]).map_err(|e| UsageError(format!("window: {e}")))
}

fn witness_arg(w: &WitnessArg) -> Result<WitnessFamilySpec, UsageError> {
    let loaded = if w.no_validate {
        expr_io::load_witness_family_unchecked(&w.witness)
    } else {
        expr_io::load_witness_family(&w.witness)
    };
    loaded.map_err(|e| UsageError(format!("{}: {e}", w.witness.display())))
}

fn precondition(e: CheckError) -> UsageError {
    UsageError(e.to_string())
}

/// Collected report text and verdict.
struct Report {
    ok: bool,
    summary: String,
    body: Vec<String>,
}

impl Report {
    fn new(ok: bool, summary: impl Into<String>) -> Self {
        Report {
            ok,
            summary: summary.into(),
            body: Vec::new(),
        }
    }

    fn line(&mut self, s: impl Into<String>) {
        self.body.push(s.into());
    }

    fn write(&self, seed: u64, out: &mut dyn Write) -> std::io::Result<i32> {
        writeln!(out, "{}: {}", if self.ok { "PASS" } else { "FAIL" }, self.summary)?;
        writeln!(out, "seed: {seed}")?;
        for l in &self.body {
            writeln!(out, "{l}")?;
        }
        Ok(if self.ok { EXIT_PASS } else { EXIT_VIOLATION })
    }
}

enum Outcome {
    /// Plain value output (arithmetic commands).
    Value(String),
    Report(Report),
}

/// Runs the CLI on `args` (including the program name), writing the report
/// to `out` and diagnostics to `err`. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let target: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    let seed = cli.seed;
    let written = match execute(cli) {
        Ok(Outcome::Value(v)) => writeln!(out, "{v}").map(|_| EXIT_PASS),
        Ok(Outcome::Report(r)) => r.write(seed, out),
        Err(UsageError(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            return EXIT_USAGE;
        }
    };
    written.unwrap_or(EXIT_USAGE)
}

fn execute(cli: Cli) -> Result<Outcome, UsageError> {
    let seed = cli.seed;
    match cli.command {
        Command::Bracket { x, y } => {
            let (x, y) = (element_arg("x", &x)?, element_arg("y", &y)?);
            Ok(Outcome::Value(x.bracket(&y).to_string()))
        }
        Command::Apply { derivation, x } => {
            let d = derivation_arg("derivation", &derivation)?;
            let x = element_arg("x", &x)?;
            Ok(Outcome::Value(d.apply(&x).to_string()))
        }
        Command::Cocycle { x, y } => {
            let (x, y) = (element_arg("x", &x)?, element_arg("y", &y)?);
            Ok(Outcome::Value(cocycle_form(&x, &y).to_string()))
        }
        Command::CheckJacobi(w) => Ok(Outcome::Report(check_jacobi(window_arg(&w.window)?))),
        Command::CheckAntisym(w) => Ok(Outcome::Report(check_antisym(window_arg(&w.window)?))),
        Command::CheckCocycle(w) => Ok(Outcome::Report(check_cocycle(window_arg(&w.window)?))),
        Command::CheckDerivation {
            table,
            spec,
            pairs,
            window,
        } => {
            let mut rng = sample::rng(seed);
            let report = if let Some(path) = table {
                let t = expr_io::load_derivation_table(&path).map_err(|e| UsageError(format!("{}: {e}", path.display())))?;
                let sampled = sample::element_pairs(&mut rng, t.window(), 3, pairs);
                check_leibniz(&t, &sampled)
            } else {
                let d = derivation_arg("spec", spec.as_deref().unwrap_or_default())?;
                let sampled = sample::element_pairs(&mut rng, window_arg(&window)?, 4, pairs);
                check_leibniz(&d, &sampled)
            };
            let mut r = Report::new(
                report.passed(),
                format!(
                    "{} violations over {} pairs ({} skipped)",
                    report.failures.len(),
                    report.checked,
                    report.skipped.len()
                ),
            );
            for f in &report.failures {
                r.line(format!("violation: x = {}; y = {}; residual = {}", f.x, f.y, f.residual));
            }
            Ok(Outcome::Report(r))
        }
        Command::Decompose { table, search } => {
            let t = expr_io::load_derivation_table(&table).map_err(|e| UsageError(format!("{}: {e}", table.display())))?;
            let search = search.as_deref().map(window_arg).transpose()?;
            let r = match decompose(&t, search) {
                Ok(d) => {
                    let mut r = Report::new(true, "table decomposes as ad(a) + λd");
                    r.line(format!("inner: {}", d.inner));
                    r.line(format!("lambda: {}", d.lambda));
                    r.line(format!("derivation: {d}"));
                    r
                }
                Err(DecomposeError::Inconsistent) => Report::new(
                    false,
                    "Inconsistent: the table is not ad(a) + λd for any a in the search window",
                ),
                Err(DecomposeError::Underdetermined { free }) => {
                    let mut r = Report::new(false, format!("Underdetermined: {} free direction(s)", free.len()));
                    for d in free {
                        r.line(format!("free: {d}"));
                    }
                    r
                }
            };
            Ok(Outcome::Report(r))
        }
        Command::Annihilators { targets, search } => {
            let targets = targets
                .split(';')
                .enumerate()
                .map(|(n, t)| element_arg(&format!("target {}", n + 1), t))
                .collect::<Result<Vec<_>, _>>()?;
            let basis = find_annihilators(&targets, window_arg(&search)?);
            let bad = basis
                .iter()
                .filter(|d| targets.iter().any(|t| !d.apply(t).is_zero()))
                .count();
            let mut r = Report::new(
                bad == 0,
                format!("annihilator space has dimension {} ({bad} basis vectors fail to annihilate)", basis.len()),
            );
            for (n, d) in basis.iter().enumerate() {
                r.line(format!("[{n}] {d}"));
            }
            Ok(Outcome::Report(r))
        }
        Command::Lemma31 { beta, j, spec } => {
            let d = derivation_arg("spec", &spec)?;
            let report = lemma31_constraint_check(beta, j, &d).map_err(precondition)?;
            Ok(Outcome::Report(constraint_report(
                &format!("D kills {} and has the required shape", BasisIndex::new(beta, j)),
                &report,
            )))
        }
        Command::Lemma34 { p, spec } => {
            let d = derivation_arg("spec", &spec)?;
            let report = lemma34_support_check(p, &d).map_err(precondition)?;
            Ok(Outcome::Report(constraint_report(
                &format!("D kills {} and has the required support", two_local::lemma34_target(p)),
                &report,
            )))
        }
        Command::Lemma32 { witness, window } => {
            let delta = witness_arg(&witness)?.into_map();
            let samples: Vec<_> = window_arg(&window)?.indices().collect();
            let report = lemma32_form_check(&delta, &samples).map_err(precondition)?;
            let failed = report.samples.iter().filter(|s| !s.ok).count();
            let mut r = Report::new(failed == 0, format!("{failed} violations over {} samples", report.samples.len()));
            for s in &report.samples {
                let xi = s.xi.as_ref().map_or("none".to_string(), |x| x.to_string());
                r.line(format!(
                    "{} {}: value = {}; xi = {xi}; witness xi = {}",
                    if s.ok { "ok" } else { "violation" },
                    s.index,
                    s.value,
                    s.witness_xi
                ));
            }
            Ok(Outcome::Report(r))
        }
        Command::Lemma33 {
            witness,
            elements,
            samples,
            window,
        } => {
            let delta = witness_arg(&witness)?.into_map();
            let xs = if elements.is_empty() {
                let w = window_arg(&window)?;
                let mut rng = sample::rng(seed);
                (0..samples).map(|_| sample::element(&mut rng, w, 5)).collect()
            } else {
                elements
                    .iter()
                    .map(|e| element_arg("element", e))
                    .collect::<Result<Vec<_>, _>>()?
            };
            let mut lines = Vec::new();
            let mut failed = 0;
            for x in &xs {
                let rep = lemma33_form_check(&delta, x).map_err(precondition)?;
                failed += usize::from(!rep.passed);
                let xi = rep.xi.as_ref().map_or("none".to_string(), |x| x.to_string());
                lines.push(format!(
                    "{} x = {}: value = {}; reference = {}; xi = {xi}",
                    if rep.passed { "ok" } else { "violation" },
                    rep.x,
                    rep.value,
                    rep.reference
                ));
            }
            let mut r = Report::new(failed == 0, format!("{failed} violations over {} elements", xs.len()));
            lines.into_iter().for_each(|l| r.line(l));
            Ok(Outcome::Report(r))
        }
        Command::Audit {
            witness,
            pairs,
            window,
        } => {
            let spec = witness_arg(&witness)?;
            let mut rng = sample::rng(seed);
            let mut all = vec![(Element::l(0, 0), Element::l(1, 0))];
            all.extend(spec.perturbations().iter().map(|p| (p.x.clone(), p.y.clone())));
            all.extend(sample::element_pairs(&mut rng, window_arg(&window)?, 4, pairs));
            let delta = spec.into_map();
            let report = audit_witnesses(&delta, &all);
            let mut r = Report::new(
                report.passed(),
                format!(
                    "{} violations over {} pairs and {} homogeneity checks",
                    report.violations.len(),
                    report.pairs_checked,
                    report.homogeneity_checked
                ),
            );
            for v in &report.violations {
                r.line(match v {
                    WitnessViolation::Contract { x, y, member, residual } => {
                        format!("contract: pair ({x}; {y}) at {member}: residual {residual}")
                    }
                    WitnessViolation::Homogeneity { x, k, residual } => {
                        format!("homogeneity: x = {x}, k = {k}: residual {residual}")
                    }
                });
            }
            Ok(Outcome::Report(r))
        }
        Command::Reconstruct { witness, probe_window } => {
            let delta: TwoLocalMap<_> = witness_arg(&witness)?.into_map();
            let probes = default_probes(window_arg(&probe_window)?, seed);
            let r = match reconstruct(&delta, &probes) {
                Ok(rec) => {
                    let mut r = Report::new(
                        rec.passed(),
                        format!(
                            "{} mismatches over {} probes",
                            rec.mismatches.len(),
                            rec.probes_checked
                        ),
                    );
                    r.line(format!("derivation: {}", rec.derivation));
                    r.line(format!("anchor witness: {}", rec.anchor));
                    r.line(format!("xi: {}", rec.xi));
                    for m in &rec.mismatches {
                        r.line(format!("mismatch: x = {}; Δ(x) = {}; D(x) = {}", m.probe, m.expected, m.got));
                    }
                    r
                }
                Err(e @ ReconstructError::AnchorContractViolation { .. }) => {
                    Report::new(false, format!("AnchorContractViolation: {e}"))
                }
                Err(e @ ReconstructError::NotProportional { .. }) => {
                    Report::new(false, format!("NotProportional: {e}"))
                }
            };
            Ok(Outcome::Report(r))
        }
    }
}

fn constraint_report(what: &str, report: &two_local::ConstraintReport) -> Report {
    let mut r = Report::new(
        report.passed(),
        if report.passed() {
            what.to_string()
        } else {
            format!("{} shape violations", report.violations.len())
        },
    );
    for v in &report.violations {
        r.line(format!("violation: {v:?}"));
    }
    r
}

fn check_jacobi(w: Window) -> Report {
    let basis = w.basis();
    let mut violations = Vec::new();
    for x in &basis {
        for y in &basis {
            let xy = x.bracket(y);
            for z in &basis {
                let sum = xy.bracket(z) + y.bracket(z).bracket(x) + z.bracket(x).bracket(y);
                if !sum.is_zero() {
                    violations.push(format!("violation: ({x}, {y}, {z}): {sum}"));
                }
            }
        }
    }
    let n = basis.len().pow(3);
    let mut r = Report::new(violations.is_empty(), format!("{} violations over {n} triples", violations.len()));
    violations.into_iter().for_each(|v| r.line(v));
    r
}

fn check_antisym(w: Window) -> Report {
    let basis = w.basis();
    let mut violations = Vec::new();
    for x in &basis {
        for y in &basis {
            let sum = x.bracket(y) + y.bracket(x);
            if !sum.is_zero() {
                violations.push(format!("violation: ({x}, {y}): {sum}"));
            }
        }
    }
    let n = basis.len().pow(2);
    let mut r = Report::new(violations.is_empty(), format!("{} violations over {n} pairs", violations.len()));
    violations.into_iter().for_each(|v| r.line(v));
    r
}

fn check_cocycle(w: Window) -> Report {
    let basis = w.basis();
    let mut violations = Vec::new();
    for x in &basis {
        for y in &basis {
            let s = cocycle_form(x, y) + cocycle_form(y, x);
            if !num_traits::Zero::is_zero(&s) {
                violations.push(format!("antisymmetry: ({x}, {y}): {s}"));
            }
            let xy = x.bracket(y);
            for z in &basis {
                let s = cocycle_form(&xy, z) + cocycle_form(&y.bracket(z), x) + cocycle_form(&z.bracket(x), y);
                if !num_traits::Zero::is_zero(&s) {
                    violations.push(format!("cocycle: ({x}, {y}, {z}): {s}"));
                }
            }
        }
    }
    let n = basis.len();
    let mut r = Report::new(
        violations.is_empty(),
        format!("{} violations over {} triples and {} pairs", violations.len(), n.pow(3), n.pow(2)),
    );
    violations.into_iter().for_each(|v| r.line(v));
    r
}
