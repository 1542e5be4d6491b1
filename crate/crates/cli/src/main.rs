//! `clonewt`: weigh, share, audit and attack from the command line.
//!
//! Exit codes: 0 success, 1 validation error, 2 audit violations found.

mod input;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use clonewt::audit::{
    conjecture_search, run_graph_suite, run_metric_suite, strict_locality_demo, GraphSuiteConfig, MetricSuiteConfig,
    Target,
};
use clonewt::euclid::{sharing_fnu, sharing_gr, Estimator, DEFAULT_SAMPLES};
use clonewt::metric::DEFAULT_TRIANGLE_TOL;
use clonewt::metric_weighting::sample_labels;
use clonewt::numeric::format_rational;
use clonewt::rules::{maximal_cliques, w_entropy_report, EntropyOptions};
use clonewt::sharing::{audit_axioms, sharing_table};
use clonewt::{attack, neighborhood_graph, AttackConfig, GraphWeighting, MetricWeighting, WeightsDocument};

#[derive(Parser)]
#[command(name = "clonewt", version, about = "Clone-robust weighting of finite metric spaces")]
struct Cli {
    /// Worker threads for parallel sections (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write the result here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct InstanceArgs {
    /// Instance document (.json) or distance matrix (.csv).
    #[arg(long)]
    input: PathBuf,
    /// Slack allowed on the triangle inequality.
    #[arg(long, default_value_t = DEFAULT_TRIANGLE_TOL)]
    triangle_tol: f64,
}

#[derive(Args)]
struct WeightingArgs {
    /// Graph rule: uniform, cu, lift:<base>, smooth:<base>, mcca, mccp, entropy.
    #[arg(long)]
    rule: String,
    #[arg(long)]
    alpha: Option<f64>,
    /// Radius density: `uniform` or `pl:r:g,…`.
    #[arg(long, default_value = "uniform")]
    nu: String,
    /// Sum in exact rationals.
    #[arg(long)]
    exact: bool,
    /// Refuse rules that fail the symmetry and locality probes.
    #[arg(long)]
    certify: bool,
}

impl WeightingArgs {
    fn build(&self) -> Result<MetricWeighting> {
        let rule = Arc::new(input::rule(&self.rule)?);
        let density = input::density(&self.nu, self.alpha)?;
        let mw = if self.certify {
            MetricWeighting::certified(rule, density)?
        } else {
            MetricWeighting::new(rule, density)
        };
        Ok(mw.exact(self.exact))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Weights of an instance, or of a graph under a graph rule.
    Weigh {
        #[arg(long, conflicts_with = "graph", required_unless_present = "graph")]
        input: Option<PathBuf>,
        /// Edge-list graph to weigh directly.
        #[arg(long)]
        graph: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_TRIANGLE_TOL)]
        triangle_tol: f64,
        #[command(flatten)]
        weighting: WeightingArgs,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Neighborhood graph at radius r, as an edge list.
    Graph {
        #[command(flatten)]
        instance: InstanceArgs,
        #[arg(long)]
        r: f64,
    },
    /// Maximal cliques of an edge-list graph.
    Cliques {
        #[arg(long)]
        input: PathBuf,
    },
    /// Sharing coefficients of a Euclidean family or of a graph rule.
    Share(ShareArgs),
    /// Axiom and property audits.
    Audit(AuditArgs),
    /// Inject clones of one element and measure far drift.
    Attack {
        #[command(flatten)]
        instance: InstanceArgs,
        #[command(flatten)]
        weighting: WeightingArgs,
        /// Label of the element to clone.
        #[arg(long)]
        target: String,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value_t = 0.0)]
        eps: f64,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Entropy-maximizing weights of an edge-list graph.
    Entropy {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = EntropyOptions::default().tol)]
        tol: f64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Draw labels from a weights document.
    Sample {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
}

#[derive(Args)]
struct ShareArgs {
    #[arg(long, conflicts_with = "graph", required_unless_present = "graph")]
    input: Option<PathBuf>,
    /// Edge-list graph; reports χ for `--rule`.
    #[arg(long, requires = "rule")]
    graph: Option<PathBuf>,
    #[arg(long, conflicts_with = "family")]
    rule: Option<String>,
    #[arg(long, value_enum)]
    family: Option<Family>,
    /// Ball radius for `gr`.
    #[arg(long)]
    r: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long, default_value = "uniform")]
    nu: String,
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    samples: usize,
    /// Required in two or more dimensions.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Gr,
    Fnu,
}

#[derive(Args)]
#[command(args_conflicts_with_subcommands = true, subcommand_negates_reqs = true)]
struct AuditArgs {
    #[command(subcommand)]
    suite: Option<Suite>,
    #[command(flatten)]
    axioms: AxiomArgs,
}

#[derive(Args)]
struct AxiomArgs {
    /// Edge-list graph.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    rule: Option<String>,
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,4")]
    axioms: Vec<u8>,
    #[command(flatten)]
    report: ReportArg,
}

#[derive(Args)]
struct ReportArg {
    /// Write the full report here; stdout then gets a summary.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Suite {
    /// Sharing axioms of a graph rule on one graph.
    Axioms(AxiomArgs),
    /// Positivity, symmetry, clone fairness, locality and continuity on seeded instances.
    Metric {
        #[command(flatten)]
        weighting: WeightingArgs,
        /// Number of seeded instances.
        #[arg(long, default_value_t = MetricSuiteConfig::default().instances)]
        seeds: usize,
        #[arg(long, default_value_t = MetricSuiteConfig::default().max_n)]
        max_n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        report: ReportArg,
    },
    /// Graph-level symmetry and locality on seeded graphs.
    Graph {
        #[arg(long)]
        rule: String,
        /// Number of seeded graphs.
        #[arg(long, default_value_t = GraphSuiteConfig::default().graphs)]
        seeds: usize,
        #[arg(long, default_value_t = GraphSuiteConfig::default().max_vertices)]
        max_vertices: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = GraphSuiteConfig::default().float_tol)]
        tol: f64,
        #[command(flatten)]
        report: ReportArg,
    },
    /// Stage-by-stage strict-locality derivation on the spider graph.
    Demo {
        #[command(flatten)]
        report: ReportArg,
    },
    /// Bounded counterexample search.
    Conjecture {
        /// mcc_axiom2[:rule] or entropy_negative_chi.
        #[arg(long)]
        target: String,
        #[arg(long, default_value_t = 1000)]
        budget: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        report: ReportArg,
    },
}

/// What a command produced.
struct Outcome {
    text: String,
    violations: bool,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Outcome { text, violations: false }
    }
}

fn pretty(v: &impl serde::Serialize) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn emit_weights(doc: &WeightsDocument, format: Format) -> Result<String> {
    Ok(match format {
        Format::Json => doc.to_json_string() + "\n",
        Format::Csv => doc.to_csv()?,
    })
}

/// Full report to `--report` with a summary on stdout, or the report on stdout.
fn audit_outcome(report: &ReportArg, body: &impl serde::Serialize, summary: String, violations: bool) -> Result<Outcome> {
    let text = pretty(body)?;
    let text = match &report.report {
        Some(path) => {
            write(path, &text)?;
            summary + "\n"
        }
        None => text,
    };
    Ok(Outcome { text, violations })
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn require_seed(seed: Option<u64>, why: &str) -> Result<u64> {
    seed.with_context(|| format!("--seed is required: {why}"))
}

fn run(cmd: Command) -> Result<Outcome> {
    match cmd {
        Command::Weigh { input, graph, triangle_tol, weighting, format } => {
            let doc = if let Some(path) = graph {
                let g = input::graph(&path)?;
                let rule = input::rule(&weighting.rule)?;
                let w = rule.weigh(&g)?;
                if weighting.exact && !w.is_exact() {
                    bail!(clonewt::Error::NotExact(rule.name()));
                }
                WeightsDocument::new(None, rule.name(), g.labels().to_vec(), w)?
            } else {
                let inst = input::instance(&input.expect("clap enforces --input"), triangle_tol)?;
                let mw = weighting.build()?;
                let w = mw.evaluate_all(&inst)?;
                WeightsDocument::new(Some(mw.alpha()), mw.rule().name(), inst.labels().to_vec(), w)?
            };
            Ok(Outcome::ok(emit_weights(&doc, format)?))
        }
        Command::Graph { instance, r } => {
            if !(r >= 0.0 && r.is_finite()) {
                bail!("--r must be a non-negative number, got {r}");
            }
            let inst = input::instance(&instance.input, instance.triangle_tol)?;
            Ok(Outcome::ok(neighborhood_graph(&inst, r).to_edge_list()))
        }
        Command::Cliques { input } => {
            let g = input::graph(&input)?;
            let cover = maximal_cliques(&g, &input::caps()?)?;
            let labels = g.labels();
            let doc = json!({
                "labels": labels,
                "cliques": cover.cliques.iter().map(|k| k.iter().map(|&v| &labels[v]).collect::<Vec<_>>()).collect::<Vec<_>>(),
                "membership": labels.iter().zip(&cover.membership).map(|(l, c)| (l.clone(), json!(c))).collect::<serde_json::Map<_, _>>(),
                "participation": cover.participation.iter().map(format_rational).collect::<Vec<_>>(),
            });
            Ok(Outcome::ok(pretty(&doc)?))
        }
        Command::Share(args) => share(args),
        Command::Audit(args) => audit(args),
        Command::Attack { instance, weighting, target, k, eps, seed } => {
            let inst = input::instance(&instance.input, instance.triangle_tol)?;
            let mw = weighting.build()?;
            let seed = if k > 0 && eps > 0.0 { require_seed(seed, "clones are placed at random")? } else { seed.unwrap_or(0) };
            let cfg = AttackConfig { target: inst.index_of(&target)?, k, eps, seed };
            let rep = attack(&inst, &mw, &cfg)?;
            Ok(Outcome { text: pretty(&rep)?, violations: !rep.within_bound })
        }
        Command::Entropy { input, tol, format } => {
            let g = input::graph(&input)?;
            let opts = EntropyOptions { tol, ..EntropyOptions::default() };
            let rep = w_entropy_report(&g, &opts, &input::caps()?)?;
            let doc = WeightsDocument::new(None, "entropy", g.labels().to_vec(), rep.weights.clone())?;
            Ok(Outcome::ok(match format {
                Format::Csv => doc.to_csv()?,
                Format::Json => {
                    let mut v = doc.to_json();
                    v["value_bits"] = json!(rep.value_bits);
                    v["class_entropy_bits"] = json!(rep.class_entropy_bits);
                    v["constraints"] = json!(rep.constraints);
                    v["newton_steps"] = json!(rep.newton_steps);
                    pretty(&v)?
                }
            }))
        }
        Command::Sample { input, k, seed, format } => {
            let doc = input::weights(&input)?;
            let draws = sample_labels(&doc.labels, &doc.weights, k, seed)?;
            Ok(Outcome::ok(match format {
                Format::Json => pretty(&json!({ "seed": seed, "k": k, "draws": draws }))?,
                Format::Csv => std::iter::once("label".to_string()).chain(draws).map(|l| l + "\n").collect(),
            }))
        }
    }
}

fn share(args: ShareArgs) -> Result<Outcome> {
    if let Some(path) = &args.graph {
        let g = input::graph(path)?;
        let rule = input::rule(args.rule.as_deref().expect("clap enforces --rule"))?;
        return Ok(Outcome::ok(pretty(&sharing_table(&g, &rule)?)?));
    }
    let path = args.input.as_ref().expect("clap enforces --input");
    let inst = input::instance(path, DEFAULT_TRIANGLE_TOL)?;
    let points = inst.points().context("sharing needs an instance given as points")?;
    let dim = points.first().map_or(1, Vec::len);
    let seed = if dim > 1 { require_seed(args.seed, "Monte-Carlo estimation in dimension ≥ 2")? } else { 0 };
    let est = Estimator::auto(dim, args.samples, seed);
    let family = args.family.context("--family gr|fnu is required with --input")?;
    let m = match family {
        Family::Gr => {
            let r = args.r.context("--r is required for family gr")?;
            if !(r > 0.0 && r.is_finite()) {
                bail!("--r must be positive, got {r}");
            }
            sharing_gr(points, r, est)?
        }
        Family::Fnu => sharing_fnu(points, &input::density(&args.nu, args.alpha)?, est)?,
    };
    let mut doc = serde_json::to_value(&m)?;
    doc["labels"] = json!(inst.labels());
    if let Some(ex) = &m.exact {
        doc["exact"] = json!({
            "weights": ex.weights.iter().map(format_rational).collect::<Vec<_>>(),
            "chi": ex.chi.iter().map(|row| row.iter().map(format_rational).collect::<Vec<_>>()).collect::<Vec<_>>(),
        });
    }
    Ok(Outcome::ok(pretty(&doc)?))
}

fn axioms(args: AxiomArgs) -> Result<Outcome> {
    let path = args.input.context("--input <graph.edges> is required")?;
    let rule = input::rule(&args.rule.context("--rule is required")?)?;
    if let Some(bad) = args.axioms.iter().find(|a| !(1..=4).contains(*a)) {
        bail!("unknown axiom {bad}; axioms are 1, 2, 3, 4");
    }
    let g = input::graph(&path)?;
    let rep = audit_axioms(&g, &rule, &args.axioms)?;
    let failed: Vec<String> = rep.results.iter().filter(|r| !r.holds).map(|r| r.axiom.to_string()).collect();
    let summary = if failed.is_empty() {
        format!("{}: axioms hold", rep.rule)
    } else {
        format!("{}: axioms violated: {}", rep.rule, failed.join(","))
    };
    audit_outcome(&args.report, &rep, summary, !rep.all_hold())
}

fn audit(args: AuditArgs) -> Result<Outcome> {
    let suite = match args.suite {
        None => return axioms(args.axioms),
        Some(Suite::Axioms(a)) => return axioms(a),
        Some(s) => s,
    };
    match suite {
        Suite::Axioms(_) => unreachable!(),
        Suite::Metric { weighting, seeds, max_n, seed, report } => {
            let mw = weighting.build()?;
            let rep = run_metric_suite(&mw, &MetricSuiteConfig { instances: seeds, max_n, seed })?;
            let summary = format!("{}: {} instances, {} violations", rep.rule, rep.instances, rep.violations());
            audit_outcome(&report, &rep, summary, rep.violations() > 0)
        }
        Suite::Graph { rule, seeds, max_vertices, seed, tol, report } => {
            let rule = input::rule(&rule)?;
            let cfg = GraphSuiteConfig { graphs: seeds, max_vertices, seed, float_tol: tol };
            let rep = run_graph_suite(&rule, &cfg)?;
            let summary = format!("{}: {} graphs, {} violations", rep.rule, rep.graphs, rep.violations());
            audit_outcome(&report, &rep, summary, rep.violations() > 0)
        }
        Suite::Demo { report } => {
            // Reaching the contradiction is the expected result.
            let rep = strict_locality_demo();
            let summary = rep.trace.join("\n");
            audit_outcome(&report, &rep, summary, false)
        }
        Suite::Conjecture { target, budget, seed, report } => {
            let found = conjecture_search(&Target::parse(&target)?, budget, seed)?;
            let summary = format!("{target}: {}", found.verdict);
            let violations = !found.witnesses.is_empty();
            audit_outcome(&report, &found, summary, violations)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot start thread pool: {e}");
            return ExitCode::from(1);
        }
    }
    let output = cli.output;
    let result = run(cli.command).and_then(|out| {
        match &output {
            Some(path) => write(path, &out.text)?,
            None => print!("{}", out.text),
        }
        Ok(out.violations)
    });
    match result {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;
    use clonewt::WeightVector;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn audit_accepts_both_forms() {
        let a = Cli::try_parse_from(["clonewt", "audit", "--input", "g.edges", "--rule", "cu", "--axioms", "1,3"]).unwrap();
        let Command::Audit(a) = a.command else { panic!() };
        assert!(a.suite.is_none());
        assert_eq!(a.axioms.axioms, vec![1, 3]);
        let b = Cli::try_parse_from(["clonewt", "audit", "graph", "--rule", "cu", "--seeds", "50"]).unwrap();
        let Command::Audit(b) = b.command else { panic!() };
        assert!(matches!(b.suite, Some(Suite::Graph { seeds: 50, .. })));
    }

    #[test]
    fn weights_csv_is_label_weight() {
        let doc = WeightsDocument::new(None, "cu", vec!["a".into()], WeightVector::uniform(1)).unwrap();
        assert_eq!(emit_weights(&doc, Format::Csv).unwrap(), "label,weight\na,1/1\n");
    }
}
