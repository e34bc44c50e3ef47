//! Command-line surface: scoring, learning, simulation, Bayes-factor
//! curves, SHD, sampling and prediction.
//!
//! Exit codes: 0 success, 2 input error (files, parsing, validation),
//! 3 computation error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand};

use bnsl::io::{emit_bif, parse_bif, read_csv_dataset, write_csv_dataset, Schema};
use bnsl::{hill_climb, shd, shd_dags, Bn, Dataset, LearnConfig, SearchTrace, Variable};
use bnsl_cli::{bfcurve, simulate, strategy, structures};

#[derive(Parser)]
#[command(
    name = "bnsl",
    version,
    about = "Structure learning for discrete Bayesian networks with Dirichlet scores and graph priors"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct DataArgs {
    /// Dataset CSV (header row of variable names, one level label per cell)
    #[arg(long)]
    data: PathBuf,
    /// Sidecar schema declaring level sets, one `name:level1,level2,...` per line
    #[arg(long)]
    schema: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Print the per-node local scores of a structure on a dataset
    Score {
        #[command(flatten)]
        data: DataArgs,
        /// Structure file (.bif network or arcs list)
        #[arg(long)]
        structure: PathBuf,
        /// Scoring rule, e.g. bdeu:1, bds:10, k2, bd-jeffreys, bic, loglik
        #[arg(long)]
        score: String,
        /// Graph prior: u, mu:beta or mu-sparse:c
        #[arg(long, default_value = "u")]
        prior: String,
        /// Also write the breakdown as CSV
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Learn a structure by hill climbing and write it as an arcs list
    Learn {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        score: String,
        #[arg(long, default_value = "u")]
        prior: String,
        /// Cap on the number of parents per node
        #[arg(long)]
        max_parents: Option<usize>,
        #[arg(long, default_value_t = 10_000)]
        max_iterations: usize,
        /// Strict-improvement threshold on the log posterior
        #[arg(long, default_value_t = 1e-10)]
        epsilon: f64,
        /// Structure file to start the search from (default: empty graph)
        #[arg(long)]
        start: Option<PathBuf>,
        /// Where to write the learned arcs list (default: stdout)
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also fit CPTs on the training data and write a BIF network
        #[arg(long)]
        fit_out: Option<PathBuf>,
        /// Imaginary sample size for --fit-out
        #[arg(long, default_value_t = 1.0)]
        fit_alpha: f64,
        /// Also write the accepted-move trace as CSV
        #[arg(long)]
        trace_out: Option<PathBuf>,
    },
    /// Replicated sample-learn-evaluate runs against a reference network
    Simulate {
        /// Flat key-value configuration file; flags override its values
        #[arg(long)]
        config: Option<PathBuf>,
        /// Reference network (.bif)
        #[arg(long = "ref")]
        reference: Option<PathBuf>,
        /// Training set sizes as fractions of the reference parameter count
        #[arg(long, value_delimiter = ',')]
        ratios: Option<Vec<f64>>,
        #[arg(long)]
        replicates: Option<usize>,
        /// Score+prior strategy, e.g. bds:1+mu:0.5 (repeatable)
        #[arg(long = "strategy")]
        strategies: Vec<String>,
        #[arg(long)]
        test_size: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long)]
        max_parents: Option<usize>,
        #[arg(long)]
        fit_alpha: Option<f64>,
        /// Record wall-clock seconds per run (off by default so reruns are
        /// byte-identical)
        #[arg(long)]
        timing: bool,
    },
    /// Sparse/uniform score ratios and Bayes factors over an alpha grid
    Bfcurve {
        #[command(flatten)]
        data: DataArgs,
        /// The denser structure (one extra arc)
        #[arg(long)]
        plus: PathBuf,
        /// The sparser structure
        #[arg(long)]
        minus: PathBuf,
        /// Comma-separated imaginary sample sizes
        #[arg(long, value_delimiter = ',')]
        alphas: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Structural Hamming distance between two structures
    Shd {
        a: PathBuf,
        b: PathBuf,
        /// Compare the DAGs directly instead of their equivalence classes
        #[arg(long)]
        on_dags: bool,
    },
    /// Draw rows from a network by ancestral sampling
    Sample {
        #[arg(long)]
        bif: PathBuf,
        #[arg(short, long)]
        n: usize,
        #[arg(long)]
        seed: u64,
        /// Generator stream within the seed (replicate id)
        #[arg(long, default_value_t = 0)]
        stream: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Predictive log-likelihood of a network on a test CSV
    Predict {
        #[arg(long)]
        bif: PathBuf,
        #[arg(long)]
        test: PathBuf,
    },
}

enum Failure {
    Input(anyhow::Error),
    Compute(anyhow::Error),
}

trait Classify<T> {
    fn input(self) -> Result<T, Failure>;
    fn compute(self) -> Result<T, Failure>;
}

impl<T, E: Into<anyhow::Error>> Classify<T> for Result<T, E> {
    fn input(self) -> Result<T, Failure> {
        self.map_err(|e| Failure::Input(e.into()))
    }
    fn compute(self) -> Result<T, Failure> {
        self.map_err(|e| Failure::Compute(e.into()))
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Compute(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(3)
        }
    }
}

fn load_dataset(args: &DataArgs) -> Result<Dataset> {
    let text = std::fs::read_to_string(&args.data)
        .with_context(|| format!("reading {}", args.data.display()))?;
    let schema = match &args.schema {
        Some(path) => Some(Schema::parse(
            &std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?,
        )?),
        None => None,
    };
    let loaded = read_csv_dataset(&text, schema.as_ref())
        .with_context(|| format!("loading {}", args.data.display()))?;
    for warning in &loaded.warnings {
        eprintln!("warning: {warning}");
    }
    Ok(loaded.dataset)
}

fn load_bn(path: &Path) -> Result<Bn> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_bif(&text).with_context(|| format!("parsing {}", path.display()))
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<()> {
    match out {
        Some(path) => {
            std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn trace_csv(trace: &SearchTrace, variables: &[Variable]) -> String {
    let mut out = String::from("# bnsl-trace v1\niteration,move,from,to,delta,log_posterior\n");
    for step in &trace.steps {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            step.iteration,
            step.mv.kind,
            variables[step.mv.from].name,
            variables[step.mv.to].name,
            step.delta,
            step.log_posterior
        ));
    }
    out
}

/// Loads a structure file together with its own node-name order.
fn load_standalone(path: &Path) -> Result<(Vec<String>, bnsl::Dag)> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    if path.extension().is_some_and(|e| e == "bif") {
        let bn = parse_bif(&text).with_context(|| format!("parsing {}", path.display()))?;
        let names: Vec<String> = bn.variables().iter().map(|v| v.name.clone()).collect();
        Ok((names, bn.dag().clone()))
    } else {
        let file = structures::parse_arcs_text(&text)
            .with_context(|| format!("parsing {}", path.display()))?;
        let variables: Vec<Variable> = file
            .nodes
            .iter()
            .map(|n| Variable::indexed(n.clone(), 2))
            .collect();
        let dag = structures::to_dag(&file, &variables)?;
        Ok((file.nodes, dag))
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Score {
            data,
            structure,
            score,
            prior,
            out,
        } => {
            let kind = strategy::parse_score(&score).input()?;
            let prior = strategy::parse_prior(&prior).input()?;
            let dataset = load_dataset(&data).input()?;
            let dag = structures::load_structure(&structure, dataset.variables()).input()?;

            let mut csv = String::from("# bnsl-score v1\nnode,parents,local_score\n");
            let mut total = 0.0;
            println!("{:<16} {:<24} {:>18}", "node", "parents", "local score");
            for node in 0..dag.node_count() {
                let counts = bnsl::count_family(&dataset, node, dag.parents(node)).compute()?;
                let local = bnsl::local_score(&counts, kind).compute()?;
                total += local;
                let parents: Vec<&str> = dag
                    .parents(node)
                    .iter()
                    .map(|&p| dataset.variables()[p].name.as_str())
                    .collect();
                let name = &dataset.variables()[node].name;
                println!("{:<16} {:<24} {:>18.6}", name, parents.join(" "), local);
                csv.push_str(&format!("{},{},{}\n", name, parents.join(" "), local));
            }
            let log_prior = prior.log_structure_prior(&dag).compute()?;
            println!("total log score  {total:>18.6}");
            if total > -700.0 {
                println!("exp total        {:>18.3e}", total.exp());
            }
            println!("log prior        {log_prior:>18.6}");
            println!("log posterior    {:>18.6}", total + log_prior);
            csv.push_str(&format!("__total__,,{total}\n__log_prior__,,{log_prior}\n"));
            if out.is_some() {
                emit(&csv, out.as_ref()).input()?;
            }
            Ok(())
        }

        Command::Learn {
            data,
            score,
            prior,
            max_parents,
            max_iterations,
            epsilon,
            start,
            out,
            fit_out,
            fit_alpha,
            trace_out,
        } => {
            let kind = strategy::parse_score(&score).input()?;
            let prior = strategy::parse_prior(&prior).input()?;
            let dataset = load_dataset(&data).input()?;
            let start = match start {
                Some(path) => {
                    Some(structures::load_structure(&path, dataset.variables()).input()?)
                }
                None => None,
            };
            let config = LearnConfig {
                max_parents,
                max_iterations,
                improvement_epsilon: epsilon,
                start,
            };
            let (dag, trace) = hill_climb(&dataset, kind, prior, &config).compute()?;
            if trace.iteration_limit_hit {
                eprintln!("warning: iteration limit reached, result is best-so-far");
            }
            emit(&structures::render_arcs(&dag, dataset.variables()), out.as_ref()).input()?;
            if let Some(path) = fit_out {
                let fitted = Bn::fit(&dag, &dataset, fit_alpha).compute()?;
                emit(&emit_bif(&fitted, "learned"), Some(&path)).input()?;
            }
            if let Some(path) = trace_out {
                emit(&trace_csv(&trace, dataset.variables()), Some(&path)).input()?;
            }
            Ok(())
        }

        Command::Simulate {
            config,
            reference,
            ratios,
            replicates,
            strategies,
            test_size,
            seed,
            out,
            threads,
            max_parents,
            fit_alpha,
            timing,
        } => {
            let file = match config {
                Some(path) => {
                    let text = std::fs::read_to_string(&path)
                        .with_context(|| format!("reading {}", path.display()))
                        .input()?;
                    simulate::parse_config_file(&text).input()?
                }
                None => simulate::ConfigFile::default(),
            };
            let reference_path = reference
                .or(file.reference.map(PathBuf::from))
                .ok_or_else(|| anyhow!("a reference network is required (--ref or `ref =`)"))
                .input()?;
            let strategy_texts = if strategies.is_empty() {
                file.strategies.clone()
            } else {
                strategies
            };
            if strategy_texts.is_empty() {
                return Err(anyhow!("at least one --strategy is required")).input();
            }
            let parsed: Result<Vec<_>> = strategy_texts
                .iter()
                .map(|s| strategy::parse_strategy(s))
                .collect();

            let defaults = simulate::SimulationConfig::default();
            let sim_config = simulate::SimulationConfig {
                ratios: ratios.or(file.ratios).unwrap_or(defaults.ratios),
                replicates: replicates.or(file.replicates).unwrap_or(defaults.replicates),
                strategies: parsed.input()?,
                test_set_size: test_size
                    .or(file.test_set_size)
                    .unwrap_or(defaults.test_set_size),
                master_seed: seed.or(file.seed).unwrap_or(defaults.master_seed),
                max_parents: max_parents.or(file.max_parents),
                fit_alpha: fit_alpha.or(file.fit_alpha).unwrap_or(defaults.fit_alpha),
                timing: timing || file.timing.unwrap_or(false),
            };
            let out = out.or(file.out.map(PathBuf::from));

            let bn = load_bn(&reference_path).input()?;
            let name = reference_path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "reference".into());

            let threads = threads.or(file.threads);
            let rows = match threads {
                Some(t) => rayon::ThreadPoolBuilder::new()
                    .num_threads(t)
                    .build()
                    .context("building worker pool")
                    .compute()?
                    .install(|| simulate::run_simulation(&bn, &name, &sim_config)),
                None => simulate::run_simulation(&bn, &name, &sim_config),
            };
            emit(&simulate::write_results_csv(&rows), out.as_ref()).input()?;
            Ok(())
        }

        Command::Bfcurve {
            data,
            plus,
            minus,
            alphas,
            out,
        } => {
            if alphas.is_empty() {
                return Err(anyhow!("--alphas must name at least one value")).input();
            }
            let dataset = load_dataset(&data).input()?;
            let plus = structures::load_structure(&plus, dataset.variables()).input()?;
            let minus = structures::load_structure(&minus, dataset.variables()).input()?;
            let pair = bfcurve::differing_family(&dataset, &plus, &minus).input()?;
            let points = bfcurve::curve(&pair, &alphas).compute()?;
            emit(&bfcurve::write_curve_csv(&points), out.as_ref()).input()?;
            Ok(())
        }

        Command::Shd { a, b, on_dags } => {
            let (names, dag_a) = load_standalone(&a).input()?;
            let variables: Vec<Variable> = names
                .iter()
                .map(|n| Variable::indexed(n.clone(), 2))
                .collect();
            let dag_b = structures::load_structure(&b, &variables).input()?;
            let distance = if on_dags {
                shd_dags(&dag_a, &dag_b).compute()?
            } else {
                shd(&dag_a.to_cpdag(), &dag_b.to_cpdag()).compute()?
            };
            println!("{distance}");
            Ok(())
        }

        Command::Sample {
            bif,
            n,
            seed,
            stream,
            out,
        } => {
            let bn = load_bn(&bif).input()?;
            let sample = bn.sample_stream(n, seed, stream);
            emit(&write_csv_dataset(&sample), out.as_ref()).input()?;
            Ok(())
        }

        Command::Predict { bif, test } => {
            let bn = load_bn(&bif).input()?;
            let text = std::fs::read_to_string(&test)
                .with_context(|| format!("reading {}", test.display()))
                .input()?;
            // interpret the test CSV with the network's own level sets
            let schema = Schema::from_variables(bn.variables());
            let loaded = read_csv_dataset(&text, Some(&schema))
                .with_context(|| format!("loading {}", test.display()))
                .input()?;
            let total = bn.predictive_loglik(&loaded.dataset).compute()?;
            println!("{total}");
            if loaded.dataset.n_rows() > 0 {
                eprintln!(
                    "rows: {}, mean per row: {}",
                    loaded.dataset.n_rows(),
                    total / loaded.dataset.n_rows() as f64
                );
            }
            Ok(())
        }
    }
}
