//! `netmob`: batch pipeline over the core library.
//!
//! Every subcommand reads its inputs, writes artifacts under `--out-dir`
//! together with a `manifest.json`, and exits 0. On failure it prints a JSON
//! error report (module, operation, cause) to stderr and exits 1.

mod commands;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

const SCHEMAS: &str = "\
FILE FORMATS

  Tweets (--input for ingest)
    JSON lines, one object per line:
      {\"id\": \"...\", \"created_at\": \"...\", \"author\": \"...\", \"followers\": 123, \"text\": \"...\"}
    or CSV (extension .csv) with header id,created_at,author,followers,text.
    created_at: RFC 3339, \"YYYY-MM-DD HH:MM:SS\" (UTC) or \"Sun Aug 28 10:00:00 +0000 2011\".

  Role codings (--roles for ingest)
    CSV with header screen_name,role; role is organization, leader,
    influential or ordinary. Uncoded accounts are ordinary.

  Exclusions (--exclude)
    One tweet id per line; '#' starts a comment.

  Edge list (edges.tsv)
    source<TAB>target per line, zero-based node ids.

  Node table (nodes.csv; --roles/--nodes for other subcommands)
    CSV with header node_id,screen_name,role,followers.

  Raw edge log (edge_log.csv)
    tweet_id,created_at,retweeter,author,source,target; one row per retweet.

  Model file (--model)
    TOML with [[term]] tables in order, e.g.
      default_decay = 0.5
      [[term]]
      kind = \"edges\"
      [[term]]
      kind = \"gwesp_otp\"         # gwnsp_otp, gwidegree, gwodegree take decay
      decay = 0.5
      [[term]]
      kind = \"nodeofactor\"       # nodeifactor; level = organization|leader|influential
      level = \"organization\"
      [[term]]
      kind = \"nodeicov\"          # nodeocov; covariate = \"followers\"

  Fit (fit.json)
    method, terms, labels, theta, std_errors, odds_ratios, p_values,
    log_lik, log_lik_basis, aic, bic, n_obs, iterations, converged,
    degeneracy_flag, se_approximate, notes.

  Simulated statistics (stats.csv)
    sample, then one column per model term; one row per retained network.

  Goodness of fit (gof_<family>.csv, family = indegree|outdegree|esp|distance|model)
    coordinate,observed,q025,q25,q50,q75,q975,inside
    Distance coordinate \"inf\" counts unreachable ordered pairs.

  Manifest (manifest.json)
    subcommand, version, seed, config, inputs and artifacts with SHA-256.
";

#[derive(Parser, Debug)]
#[command(name = "netmob", version, about = "Retweet-network ERGM pipeline", after_long_help = SCHEMAS)]
struct Cli {
    /// More log output (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
enum Command {
    /// Build the retweet network from tweets.
    Ingest(IngestArgs),
    /// Descriptive tables for a network.
    Describe(DescribeArgs),
    /// Estimate an ERGM.
    Fit(FitArgs),
    /// Sample networks from an ERGM.
    Simulate(SimulateArgs),
    /// Simulation-based goodness of fit.
    Gof(GofArgs),
    /// Generate a synthetic crowd-like or org-like network.
    Scenario(ScenarioArgs),
}

#[derive(Args, Debug, Serialize)]
struct Output {
    /// Directory for all artifacts.
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
}

#[derive(Args, Debug, Serialize)]
struct Sampling {
    /// RNG seed.
    #[arg(long, default_value_t = netmob_core::DEFAULT_SEED)]
    seed: u64,
    /// Number of sampled networks (MC-MLE: per iteration).
    #[arg(long)]
    samples: Option<usize>,
    /// MH steps before the first retained network (default 10 n²).
    #[arg(long)]
    burn_in: Option<usize>,
    /// MH steps between retained networks (default n²).
    #[arg(long)]
    interval: Option<usize>,
}

#[derive(Args, Debug, Serialize)]
struct NetworkInput {
    /// Edge list (TSV).
    #[arg(long)]
    input: PathBuf,
    /// Node table (CSV).
    #[arg(long, alias = "nodes")]
    roles: PathBuf,
}

#[derive(Args, Debug, Serialize)]
struct IngestArgs {
    /// Tweets, JSON lines or CSV.
    #[arg(long)]
    input: PathBuf,
    /// Role codings (CSV screen_name,role).
    #[arg(long)]
    roles: Option<PathBuf>,
    /// Retweets to keep, in time order.
    #[arg(long, default_value_t = 1000)]
    limit: usize,
    /// Tweet ids to drop.
    #[arg(long)]
    exclude: Option<PathBuf>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug, Serialize)]
struct DescribeArgs {
    #[command(flatten)]
    network: NetworkInput,
    /// Raw edge log; without it, edges = unique dyads.
    #[arg(long)]
    edge_log: Option<PathBuf>,
    #[command(flatten)]
    output: Output,
}

#[derive(Clone, Copy, Debug, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
enum MethodArg {
    Mple,
    Mcmle,
}

#[derive(Args, Debug, Serialize)]
struct FitArgs {
    #[command(flatten)]
    network: NetworkInput,
    /// Model file (TOML).
    #[arg(long)]
    model: PathBuf,
    #[arg(long, value_enum, default_value = "mple")]
    method: MethodArg,
    #[command(flatten)]
    sampling: Sampling,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug, Serialize)]
struct SimulateArgs {
    /// Node table (CSV).
    #[arg(long, alias = "nodes")]
    roles: PathBuf,
    /// Model file (TOML).
    #[arg(long)]
    model: PathBuf,
    /// Coefficients, comma separated, in model order.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "fit", required_unless_present = "fit")]
    theta: Option<String>,
    /// Take coefficients from a fit JSON.
    #[arg(long)]
    fit: Option<PathBuf>,
    /// Starting network (default: empty).
    #[arg(long)]
    input: Option<PathBuf>,
    /// Also write each sampled network as an edge list.
    #[arg(long)]
    edge_lists: bool,
    #[command(flatten)]
    sampling: Sampling,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug, Serialize)]
struct GofArgs {
    #[command(flatten)]
    network: NetworkInput,
    /// Model file (TOML).
    #[arg(long)]
    model: PathBuf,
    /// Fit JSON to check; without it the model is fitted first.
    #[arg(long)]
    fit: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "mple")]
    method: MethodArg,
    #[command(flatten)]
    sampling: Sampling,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug, Serialize)]
struct ScenarioArgs {
    /// crowd or org.
    #[arg(long)]
    kind: String,
    /// Network size; role shares follow the observed networks.
    #[arg(long, default_value_t = 300)]
    size: usize,
    #[arg(long, default_value_t = netmob_core::DEFAULT_SEED)]
    seed: u64,
    #[command(flatten)]
    output: Output,
}

/// Error report printed on failure.
#[derive(Debug, Serialize)]
pub struct Failure {
    pub module: &'static str,
    pub operation: &'static str,
    pub cause: String,
}

impl Failure {
    pub fn new(module: &'static str, operation: &'static str, cause: impl std::fmt::Display) -> Self {
        Self {
            module,
            operation,
            cause: cause.to_string(),
        }
    }
}

/// `map_err` adapter: `.map_err(fail("estimator", "mple"))`.
pub fn fail<E: std::fmt::Display>(module: &'static str, operation: &'static str) -> impl Fn(E) -> Failure {
    move |e| Failure::new(module, operation, e)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();
    match commands::run(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let report = serde_json::json!({ "error": f });
            eprintln!("{}", serde_json::to_string_pretty(&report).expect("error report serializes"));
            ExitCode::FAILURE
        }
    }
}
