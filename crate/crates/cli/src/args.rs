use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use clusterlab::kmeans::KMeansInit;
use clusterlab::pipeline::{ColumnChoice, InputFormat, InputOptions};
use clusterlab::validation::SweepAlgorithm;
use clusterlab::Metric;

#[derive(Debug, Parser)]
#[command(
    name = "clusterlab",
    version,
    about = "Clustering analysis for tabular data"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub global: GlobalArgs,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Distance for PAM and silhouette (K-means always uses Euclidean).
    #[arg(long, global = true, default_value = "euclidean")]
    pub metric: Metric,

    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,

    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,

    /// Worker threads for internal parallelism (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Input table (CSV or ARFF).
    pub input: PathBuf,

    /// Input format; `auto` picks ARFF for `.arff` files.
    #[arg(long, default_value = "auto")]
    pub format: InputFormat,

    /// The CSV file's first line holds column names.
    #[arg(long)]
    pub header: bool,

    #[arg(long, default_value_t = ',')]
    pub delimiter: char,

    /// Token marking a missing cell.
    #[arg(long, default_value = "?")]
    pub missing: String,

    /// Column holding row identifiers (dropped from the features).
    #[arg(long, conflicts_with = "no_id")]
    pub id_column: Option<String>,

    /// Column holding the benign/malignant class (dropped from the features).
    #[arg(long, conflicts_with = "no_label")]
    pub label_column: Option<String>,

    /// Treat no column as an identifier.
    #[arg(long)]
    pub no_id: bool,

    /// Treat no column as the class label.
    #[arg(long)]
    pub no_label: bool,

    /// Keep raw feature values instead of min-max scaling them.
    #[arg(long)]
    pub no_normalize: bool,

    /// Z-score the features instead of min-max scaling them.
    #[arg(long, conflicts_with = "no_normalize")]
    pub standardize: bool,
}

fn column_choice(named: &Option<String>, none: bool) -> ColumnChoice {
    match (named, none) {
        (_, true) => ColumnChoice::None,
        (Some(n), false) => ColumnChoice::Named(n.clone()),
        (None, false) => ColumnChoice::Auto,
    }
}

impl InputArgs {
    pub fn options(&self) -> InputOptions {
        InputOptions {
            format: self.format,
            has_header: self.header,
            delimiter: self.delimiter,
            missing_marker: self.missing.clone(),
            id_column: column_choice(&self.id_column, self.no_id),
            label_column: column_choice(&self.label_column, self.no_label),
            normalize: !self.no_normalize,
            standardize: self.standardize,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Emit {
    Csv,
    Arff,
}

#[derive(Debug, Args)]
pub struct KMeansArgs {
    #[arg(long, default_value = "kmeans++")]
    pub init: KMeansInit,

    #[arg(long, default_value_t = 25)]
    pub restarts: usize,

    #[arg(long, default_value_t = 100)]
    pub max_iter: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Summarize a table: shape, missing cells, class balance.
    Inspect {
        #[command(flatten)]
        input: InputArgs,
    },
    /// Drop incomplete rows, scale features and write the result.
    Preprocess {
        #[command(flatten)]
        input: InputArgs,
        /// Output format.
        #[arg(long, default_value = "csv")]
        emit: Emit,
        /// Output file (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Hopkins clustering-tendency statistic.
    Tendency {
        #[command(flatten)]
        input: InputArgs,
        /// Points sampled per trial (default: a tenth of the rows).
        #[arg(long)]
        m: Option<usize>,
        #[arg(long, default_value_t = 30)]
        trials: usize,
        /// Use the d-th power variant of the statistic.
        #[arg(long)]
        power_d: bool,
    },
    /// K-means clustering.
    Kmeans {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[command(flatten)]
        kmeans: KMeansArgs,
        /// Directory for the scatter plot and its data.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Partitioning around medoids.
    Pam {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = 200)]
        max_swaps: usize,
        /// Directory for the scatter plot and its data.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Silhouette widths of a K-means or PAM partition.
    Silhouette {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value = "pam")]
        algorithm: SweepAlgorithm,
        #[command(flatten)]
        kmeans: KMeansArgs,
        /// Directory for the silhouette plot and its data.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Average silhouette and WSS over a range of k.
    Sweep {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, default_value_t = 2)]
        k_min: usize,
        #[arg(long, default_value_t = 10)]
        k_max: usize,
        #[arg(long, default_value = "kmeans")]
        algorithm: SweepAlgorithm,
        #[command(flatten)]
        kmeans: KMeansArgs,
        /// Directory for the sweep plot and its data.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the whole pipeline and write the report and every plot.
    Analyze {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = 2)]
        k_min: usize,
        #[arg(long, default_value_t = 10)]
        k_max: usize,
        #[arg(long, default_value = "kmeans")]
        sweep_algorithm: SweepAlgorithm,
        #[command(flatten)]
        kmeans: KMeansArgs,
        #[arg(long, default_value_t = 30)]
        trials: usize,
        #[arg(long, default_value = "results")]
        out: PathBuf,
    },
}
