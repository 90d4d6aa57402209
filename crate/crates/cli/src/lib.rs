//! Command-line front end for the `mgl` library.
//!
//! Every command writes one JSON document (to `--out` or stdout) and a short
//! text summary derived from it on stderr. Exit codes: 0 success, 1 a
//! verified failure, 2 an input error.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde::Serialize;

use mgl::bundle::{load_bundle_file, validate_bundle, BundleReport, HermitianBundle};
use mgl::domination::{domination_report, DominationReport, SamplingConfig, DOMINATION_TOL};
use mgl::form::{assemble_magnetic_form, assemble_scalar_form, FormOperator};
use mgl::graph::{load_graph_file, VertexSubset, WeightedGraph};
use mgl::random::{self, seeded};
use mgl::spectral::identity_suite;
use mgl::uniqueness::exhaustion_uniqueness_experiment;
use mgl::Error;

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILED: u8 = 1;
pub const EXIT_INPUT: u8 = 2;

pub const DEFAULT_SEED: u64 = 42;

#[derive(Parser, Debug)]
#[command(name = "mgl", version, about = "Verify domination, identities and uniqueness experiments for magnetic forms on finite graphs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Options,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Check the graph axioms and, if given, the bundle.
    Validate,
    /// Semigroup, resolvent and form domination of the bundle form by a scalar form.
    Dominate,
    /// Dirichlet/Neumann resolvent gaps along an exhaustion.
    Uniqueness,
    /// Sorted eigenvalues of the scalar and magnetic generators.
    Spectrum,
    /// Laplace transform, Euler limit and difference quotient identities.
    SemigroupId,
}

#[derive(Args, Debug, Clone, Default)]
pub struct Options {
    /// Graph document (JSON).
    #[arg(long, global = true, value_name = "PATH")]
    pub graph: Option<PathBuf>,
    /// Bundle document (JSON) over the graph.
    #[arg(long, global = true, value_name = "PATH")]
    pub bundle: Option<PathBuf>,
    /// Graph whose scalar form is the dominating operator (default: --graph).
    #[arg(long, global = true, value_name = "PATH")]
    pub dominating: Option<PathBuf>,
    /// Time grid, comma separated.
    #[arg(long = "t", global = true, value_delimiter = ',', allow_negative_numbers = true)]
    pub t: Option<Vec<f64>>,
    /// Resolvent parameters, comma separated.
    #[arg(long, global = true, value_delimiter = ',', allow_negative_numbers = true)]
    pub alpha: Option<Vec<f64>>,
    /// Random samples per check.
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// Sampling seed.
    #[arg(long, global = true, env = "MGL_SEED")]
    pub seed: Option<u64>,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Tolerance for pointwise domination comparisons.
    #[arg(long = "tol-domination", global = true, allow_negative_numbers = true)]
    pub tol_domination: Option<f64>,
    /// Exhaustion by prefixes {0, …, k−1}, comma separated sizes.
    #[arg(long, global = true, value_delimiter = ',')]
    pub sizes: Option<Vec<usize>>,
    /// Exhaustion as a JSON array of vertex lists.
    #[arg(long, global = true, value_name = "PATH")]
    pub exhaustion: Option<PathBuf>,
}

/// Why a command stopped without a report.
#[derive(Debug)]
pub enum Failure {
    Input(String),
    Verified(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => EXIT_INPUT,
            Failure::Verified(_) => EXIT_FAILED,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Invariant(_) | Error::BundleInvalid(_) | Error::NotNested { .. } => {
                Failure::Verified(e.to_string())
            }
            _ => Failure::Input(e.to_string()),
        }
    }
}

/// A finished command: the JSON document, a summary and the exit code.
pub struct Outcome {
    pub json: String,
    pub summary: String,
    pub code: u8,
}

/// Settings resolved from the options with defaults applied.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub sampling: SamplingConfig,
    pub identity_alpha: Vec<f64>,
    pub identity_t: Vec<f64>,
}

impl RunConfig {
    pub fn from_options(opts: &Options) -> Result<Self, Failure> {
        let defaults = SamplingConfig::default();
        let nonempty = |v: &Option<Vec<f64>>, name: &str| -> Result<(), Failure> {
            match v {
                Some(list) if list.is_empty() => Err(Failure::Input(format!("--{name} needs at least one value"))),
                Some(list) if list.iter().any(|x| !x.is_finite()) => {
                    Err(Failure::Input(format!("--{name} values must be finite")))
                }
                _ => Ok(()),
            }
        };
        nonempty(&opts.t, "t")?;
        nonempty(&opts.alpha, "alpha")?;
        let tolerance = opts.tol_domination.unwrap_or(DOMINATION_TOL);
        if !(tolerance > 0.0 && tolerance.is_finite()) {
            return Err(Failure::Input("--tol-domination must be positive".into()));
        }
        Ok(Self {
            sampling: SamplingConfig {
                t_list: opts.t.clone().unwrap_or(defaults.t_list.clone()),
                alpha_list: opts.alpha.clone().unwrap_or(defaults.alpha_list),
                samples: opts.samples.unwrap_or(defaults.samples),
                seed: opts.seed.unwrap_or(DEFAULT_SEED),
                tolerance,
            },
            identity_alpha: opts.alpha.clone().unwrap_or(vec![0.5, 2.0]),
            identity_t: opts.t.clone().unwrap_or(defaults.t_list),
        })
    }
}

/// 0 when the three verdicts agree and a satisfied hypothesis comes with a
/// full pass, 1 otherwise.
pub fn dominate_exit_code(report: &DominationReport) -> u8 {
    if report.consistent() {
        EXIT_OK
    } else {
        EXIT_FAILED
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

fn require_graph(opts: &Options) -> Result<Arc<WeightedGraph>, Failure> {
    let path = opts
        .graph
        .as_ref()
        .ok_or_else(|| Failure::Input("--graph is required".into()))?;
    Ok(Arc::new(load_graph_file(path)?))
}

fn load_bundle(opts: &Options, graph: &Arc<WeightedGraph>) -> Result<Option<HermitianBundle>, Failure> {
    opts.bundle
        .as_ref()
        .map(|p| load_bundle_file(p, graph.clone()).map_err(Failure::from))
        .transpose()
}

#[derive(Serialize)]
struct GraphSummary {
    n: usize,
    edges: usize,
    passed: bool,
}

#[derive(Serialize)]
struct ValidateReport {
    graph: GraphSummary,
    bundle: Option<BundleReport>,
}

pub fn cmd_validate(opts: &Options) -> Result<Outcome, Failure> {
    let graph = require_graph(opts)?;
    let bundle = load_bundle(opts, &graph)?.map(|b| validate_bundle(&b));
    let passed = bundle.as_ref().is_none_or(|r| r.passed);
    let mut summary = format!("graph: {} vertices, {} edges, axioms hold\n", graph.n(), graph.edges().len());
    if let Some(r) = &bundle {
        if r.passed {
            summary.push_str("bundle: valid\n");
        } else {
            for f in r.failures() {
                summary.push_str(&format!("bundle: {f}\n"));
            }
        }
    }
    let report = ValidateReport {
        graph: GraphSummary {
            n: graph.n(),
            edges: graph.edges().len(),
            passed: true,
        },
        bundle,
    };
    Ok(Outcome {
        json: to_json(&report),
        summary,
        code: if passed { EXIT_OK } else { EXIT_FAILED },
    })
}

fn verdict_line(name: &str, pass: bool, slack: f64) -> String {
    format!("{name:<10} {} (slack {slack:.3e})\n", if pass { "pass" } else { "FAIL" })
}

pub fn cmd_dominate(opts: &Options) -> Result<Outcome, Failure> {
    let config = RunConfig::from_options(opts)?;
    let graph = require_graph(opts)?;
    let bundle = load_bundle(opts, &graph)?.unwrap_or_else(|| HermitianBundle::scalar(graph.clone()));
    let dominating = match &opts.dominating {
        Some(p) => load_graph_file(p)?,
        None => (*graph).clone(),
    };
    let report = domination_report(&bundle, &dominating, &config.sampling)?;
    let h = &report.hypothesis;
    let mut summary = if h.applicable {
        format!(
            "hypothesis {} (min eig of W - c: {:.3e})\n",
            if h.passed { "holds" } else { "fails" },
            h.min_eigenvalue
        )
    } else {
        "hypothesis not applicable (dominating graph differs)\n".to_string()
    };
    summary.push_str(&verdict_line("form", report.form.verdict.pass, report.form.verdict.slack));
    summary.push_str(&verdict_line("resolvent", report.resolvent.pass, report.resolvent.slack));
    summary.push_str(&verdict_line("semigroup", report.semigroup.pass, report.semigroup.slack));
    let code = dominate_exit_code(&report);
    if code != EXIT_OK {
        summary.push_str("verdicts are inconsistent\n");
    }
    Ok(Outcome {
        json: to_json(&report),
        summary,
        code,
    })
}

fn exhaustion_subsets(opts: &Options, graph: &WeightedGraph) -> Result<Vec<VertexSubset>, Failure> {
    match (&opts.sizes, &opts.exhaustion) {
        (Some(_), Some(_)) => Err(Failure::Input("use either --sizes or --exhaustion".into())),
        (Some(sizes), None) => sizes
            .iter()
            .map(|&k| VertexSubset::prefix(graph, k).map_err(Failure::from))
            .collect(),
        (None, Some(path)) => {
            let text = fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
            let lists: Vec<Vec<usize>> =
                serde_json::from_str(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
            lists
                .into_iter()
                .map(|l| VertexSubset::new(graph, l).map_err(Failure::from))
                .collect()
        }
        (None, None) => Ok(vec![VertexSubset::all(graph)]),
    }
}

pub fn cmd_uniqueness(opts: &Options) -> Result<Outcome, Failure> {
    let graph = require_graph(opts)?;
    let bundle = load_bundle(opts, &graph)?.unwrap_or_else(|| HermitianBundle::scalar(graph.clone()));
    let subsets = exhaustion_subsets(opts, &graph)?;
    let report = exhaustion_uniqueness_experiment(&bundle, &subsets)?;
    let mut summary = String::from("   k  size        scalar      magnetic\n");
    for row in &report.gaps {
        summary.push_str(&format!("{:>4} {:>5} {:>13.6e} {:>13.6e}\n", row.k, row.size, row.scalar, row.magnetic));
    }
    summary.push_str(&format!("({})\n", report.label));
    Ok(Outcome {
        json: to_json(&report),
        summary,
        code: EXIT_OK,
    })
}

/// Rounds away eigenvalue noise below `1e-12` for display.
fn display_value(x: f64) -> f64 {
    let r = (x * 1e12).round() / 1e12;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

fn listing(values: &[f64]) -> String {
    values
        .iter()
        .map(|&x| display_value(x).to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

#[derive(Serialize)]
struct SpectrumReport {
    scalar: Vec<f64>,
    magnetic: Option<Vec<f64>>,
}

pub fn cmd_spectrum(opts: &Options) -> Result<Outcome, Failure> {
    let graph = require_graph(opts)?;
    let scalar = assemble_scalar_form(&graph)?.eigenvalues().to_vec();
    let magnetic = load_bundle(opts, &graph)?
        .map(|b| assemble_magnetic_form(&b).map(|f| f.eigenvalues().to_vec()))
        .transpose()?;
    let mut summary = format!("scalar: {}\n", listing(&scalar));
    if let Some(m) = &magnetic {
        summary.push_str(&format!("magnetic: {}\n", listing(m)));
    }
    Ok(Outcome {
        json: to_json(&SpectrumReport { scalar, magnetic }),
        summary,
        code: EXIT_OK,
    })
}

fn normalized_sample(form: &FormOperator, seed: u64) -> Vec<Complex64> {
    let mut rng = seeded(seed);
    let u = random::complex_vector(&mut rng, form.dim());
    let norm = form.norm(u.as_slice());
    u.iter().map(|z| z / norm).collect()
}

pub fn cmd_semigroup_id(opts: &Options) -> Result<Outcome, Failure> {
    let config = RunConfig::from_options(opts)?;
    let graph = require_graph(opts)?;
    let form = match load_bundle(opts, &graph)? {
        Some(b) => assemble_magnetic_form(&b)?,
        None => assemble_scalar_form(&graph)?,
    };
    let u = normalized_sample(&form, config.sampling.seed);
    let report = identity_suite(&form, &u, &config.identity_alpha, &config.identity_t)?;
    let mut summary = String::new();
    for l in &report.laplace {
        summary.push_str(&format!("laplace   alpha={} residual {:.3e}\n", l.alpha, l.residual));
    }
    for e in &report.euler {
        summary.push_str(&format!(
            "euler     t={} error(n={}) {:.3e} {}\n",
            e.t,
            e.powers.last().copied().unwrap_or(0),
            e.errors.last().copied().unwrap_or(0.0),
            if e.pass { "pass" } else { "FAIL" }
        ));
    }
    if let Some(f) = &report.form_limit {
        summary.push_str(&format!("quotient  t={:.3e} ratio {:.4}\n", f.t, f.ratio));
    }
    Ok(Outcome {
        json: to_json(&report),
        summary,
        code: if report.pass { EXIT_OK } else { EXIT_FAILED },
    })
}

pub fn execute(cli: &Cli) -> Result<Outcome, Failure> {
    match cli.command {
        Command::Validate => cmd_validate(&cli.opts),
        Command::Dominate => cmd_dominate(&cli.opts),
        Command::Uniqueness => cmd_uniqueness(&cli.opts),
        Command::Spectrum => cmd_spectrum(&cli.opts),
        Command::SemigroupId => cmd_semigroup_id(&cli.opts),
    }
}

fn write_out(path: &Path, json: &str) -> Result<(), Failure> {
    fs::write(path, json).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

/// Parses `args`, runs the command and returns the exit code. Output goes
/// to stdout/stderr or the `--out` file.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    match execute(&cli) {
        Ok(outcome) => {
            // the spectrum listing is that command's primary output; its JSON
            // goes only to --out
            let listing = cli.command == Command::Spectrum;
            let written = match &cli.opts.out {
                Some(path) => write_out(path, &outcome.json),
                None if listing => Ok(()),
                None => {
                    print!("{}", outcome.json);
                    Ok(())
                }
            };
            if let Err(f) = written {
                eprintln!("error: {}", describe(&f));
                return f.code();
            }
            if listing {
                print!("{}", outcome.summary);
            } else {
                eprint!("{}", outcome.summary);
            }
            outcome.code
        }
        Err(f) => {
            eprintln!("error: {}", describe(&f));
            f.code()
        }
    }
}

fn describe(f: &Failure) -> &str {
    match f {
        Failure::Input(m) | Failure::Verified(m) => m,
    }
}
