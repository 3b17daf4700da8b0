use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "hftml", version, about = "Measure liquidity-demanding and liquidity-supplying HFT activity from tick data")]
pub struct Cli {
    /// TOML run configuration; command-line flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Worker threads (default: available cores).
    #[arg(long, global = true, env = "HFTML_THREADS", value_name = "N")]
    pub threads: Option<usize>,

    /// Log level for stderr: error, warn, info, debug or trace.
    #[arg(long, global = true, value_name = "LEVEL")]
    pub log_level: Option<String>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a labeled synthetic market (trades.csv, quotes.csv, latent.csv).
    Synth(SynthArgs),
    /// Compute the 24 daily features from trades and quotes.
    Features(FeaturesArgs),
    /// Compute hft_d / hft_s targets from labeled trades.
    Targets(TargetsArgs),
    /// Fit a tree ensemble and save it.
    Train(TrainArgs),
    /// Monte Carlo cross-validation of one ensemble configuration and OLS.
    Cv(CvArgs),
    /// Cross-validated grid over (min_split, n_trees).
    Gridsearch(GridArgs),
    /// Compare RF-MM, RF, ET-MM and ET on shared splits.
    Compare(CvArgs),
    /// Predict targets for every complete feature row.
    Predict(PredictArgs),
    /// Impurity-based feature importance of a saved model.
    Importance(ImportanceArgs),
    /// Partial dependence curves of a saved model.
    Pdp(PdpArgs),
    /// Count latency-arbitrage opportunities per stock-day.
    Latarb(LatarbArgs),
    /// Event study of a daily measure around announcements.
    Eventstudy(EventStudyArgs),
    /// JUMP ratio of cumulative abnormal returns around announcements.
    Jump(JumpArgs),
    /// Difference-in-differences with two-way fixed effects.
    Did(DidArgs),
    /// Panel OLS with optional fixed effects and clustered errors.
    Ols(OlsArgs),
    /// Just-identified 2SLS on a panel.
    Iv(IvArgs),
    /// Winsorize numeric CSV columns at both tails.
    Winsorize(WinsorizeArgs),
    /// Summary statistics of numeric CSV columns.
    Stats(StatsArgs),
}

#[derive(Debug, Args)]
pub struct OutDir {
    /// Output directory (created if missing).
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub stocks: Option<usize>,
    #[arg(long)]
    pub days: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub out: OutDir,
}

#[derive(Debug, Args)]
pub struct TickInput {
    /// Trades CSV; a `profile` column marks a labeled file.
    #[arg(long, value_name = "FILE")]
    pub trades: PathBuf,
    /// Sort records by time within each stock-day instead of rejecting disorder.
    #[arg(long)]
    pub sort: bool,
    /// Skip malformed rows with a warning instead of failing.
    #[arg(long)]
    pub lenient: bool,
}

#[derive(Debug, Args)]
pub struct FeaturesArgs {
    #[command(flatten)]
    pub input: TickInput,
    #[arg(long, value_name = "FILE")]
    pub quotes: PathBuf,
    #[command(flatten)]
    pub out: OutDir,
}

#[derive(Debug, Args)]
pub struct TargetsArgs {
    #[command(flatten)]
    pub input: TickInput,
    #[command(flatten)]
    pub out: OutDir,
}

#[derive(Debug, Args)]
pub struct DataArgs {
    /// features.csv, optionally carrying hft_d,hft_s.
    #[arg(long, value_name = "FILE")]
    pub features: PathBuf,
    /// targets.csv joined on (stock, date).
    #[arg(long, value_name = "FILE")]
    pub targets: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MethodArg {
    Extra,
    Forest,
}

#[derive(Debug, Args)]
pub struct ForestArgs {
    #[arg(long)]
    pub trees: Option<usize>,
    #[arg(long)]
    pub min_split: Option<usize>,
    #[arg(long, value_enum)]
    pub method: Option<MethodArg>,
    /// Candidate features per split (default ceil(sqrt(p))).
    #[arg(long)]
    pub k_features: Option<usize>,
    /// One ensemble per target instead of a single multi-target ensemble.
    #[arg(long)]
    pub multi_model: bool,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct CvFlags {
    #[arg(long)]
    pub iterations: Option<usize>,
    #[arg(long)]
    pub sample_size: Option<usize>,
    #[arg(long)]
    pub test_fraction: Option<f64>,
    /// z-score features with training-split statistics.
    #[arg(long)]
    pub scale: bool,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub forest: ForestArgs,
    #[command(flatten)]
    pub out: OutDir,
}

#[derive(Debug, Args)]
pub struct CvArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub forest: ForestArgs,
    #[command(flatten)]
    pub cv: CvFlags,
    #[command(flatten)]
    pub out: OutDir,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub forest: ForestArgs,
    #[command(flatten)]
    pub cv: CvFlags,
    /// Comma-separated min_split values.
    #[arg(long, value_delimiter = ',')]
    pub splits: Option<Vec<usize>>,
    /// Comma-separated tree counts.
    #[arg(long = "tree-grid", value_delimiter = ',')]
    pub tree_grid: Option<Vec<usize>>,
    #[command(flatten)]
    pub out: OutDir,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[arg(long, value_name = "FILE")]
    pub model: PathBuf,
    #[arg(long, value_name = "FILE")]
    pub features: PathBuf,
    #[command(flatten)]
    pub out: OutDir,
}

#[derive(Debug, Args)]
pub struct ImportanceArgs {
    #[arg(long, value_name = "FILE")]
    pub model: PathBuf,
    #[command(flatten)]
    pub out: OutDir,
}

#[derive(Debug, Args)]
pub struct PdpArgs {
    #[arg(long, value_name = "FILE")]
    pub model: PathBuf,
    #[arg(long, value_name = "FILE")]
    pub features: PathBuf,
    /// Restrict to these features (comma-separated); default all.
    #[arg(long = "feature", value_delimiter = ',')]
    pub feature: Vec<String>,
    #[arg(long)]
    pub grid: Option<usize>,
    /// Average over a random subsample of this many rows.
    #[arg(long)]
    pub sample: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub out: OutDir,
}

#[derive(Debug, Args)]
pub struct LatarbArgs {
    #[arg(long, value_name = "FILE")]
    pub quotes: PathBuf,
    /// Minimum tick in cents.
    #[arg(long)]
    pub tick_cents: Option<i64>,
    /// Also write every detected opportunity to latarb_events.csv.
    #[arg(long)]
    pub events: bool,
    #[arg(long)]
    pub sort: bool,
    #[arg(long)]
    pub lenient: bool,
    #[command(flatten)]
    pub out: OutDir,
}

#[derive(Debug, Args)]
pub struct EventStudyArgs {
    /// Daily CSV with stock,date and the measure column.
    #[arg(long, value_name = "FILE")]
    pub series: PathBuf,
    #[arg(long, default_value = "hft_d")]
    pub column: String,
    /// events.csv: stock,event_date,kind.
    #[arg(long, value_name = "FILE")]
    pub events: PathBuf,
    /// Keep only events of this kind.
    #[arg(long)]
    pub kind: Option<String>,
    #[arg(long)]
    pub pre: Option<i64>,
    #[arg(long)]
    pub post: Option<i64>,
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct JumpArgs {
    /// returns.csv: stock,date,ret with market rows under stock id "market".
    #[arg(long, value_name = "FILE")]
    pub returns: PathBuf,
    #[arg(long, value_name = "FILE")]
    pub events: PathBuf,
    /// Winsorization level applied to JUMP (0 disables).
    #[arg(long)]
    pub winsorize: Option<f64>,
    #[command(flatten)]
    pub out: OutDir,
}

#[derive(Debug, Args)]
pub struct DidArgs {
    /// CSV: entity,time,y,treated,post,<controls...>.
    #[arg(long, value_name = "FILE")]
    pub panel: PathBuf,
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ClusterArg {
    Both,
    Entity,
    Time,
    None,
}

#[derive(Debug, Args)]
pub struct SpecArgs {
    #[arg(long)]
    pub no_entity_fe: bool,
    #[arg(long)]
    pub no_time_fe: bool,
    #[arg(long, value_enum, default_value = "both")]
    pub cluster: ClusterArg,
}

#[derive(Debug, Args)]
pub struct OlsArgs {
    /// panel.csv: entity,time,y,<regressors...>[,cluster_entity,cluster_time].
    #[arg(long, value_name = "FILE")]
    pub panel: PathBuf,
    #[command(flatten)]
    pub spec: SpecArgs,
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct IvArgs {
    #[arg(long, value_name = "FILE")]
    pub panel: PathBuf,
    #[arg(long)]
    pub endog: String,
    #[arg(long)]
    pub instrument: String,
    #[command(flatten)]
    pub spec: SpecArgs,
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct WinsorizeArgs {
    #[arg(long, value_name = "FILE")]
    pub input: PathBuf,
    /// Columns to clamp (comma-separated).
    #[arg(long, value_delimiter = ',', required = true)]
    pub columns: Vec<String>,
    #[arg(long)]
    pub p: Option<f64>,
    #[command(flatten)]
    pub out: OutDir,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[arg(long, value_name = "FILE")]
    pub input: PathBuf,
    /// Columns to summarize (comma-separated); default every numeric column.
    #[arg(long, value_delimiter = ',')]
    pub columns: Vec<String>,
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}
