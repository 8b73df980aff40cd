//! End-to-end analysis: load → preprocess → Hopkins → K-means → PAM →
//! silhouette → k sweep, then write the report and plot files.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dataset::{
    parse_arff, parse_csv, preprocess, standardize, CsvConfig, Dataset, PreprocessOptions,
    PreprocessReport, RawTable, WBC_CLASS_COLUMN, WBC_COLUMNS, WBC_ID_COLUMN,
};
use crate::error::{Error, Result};
use crate::kmeans::{kmeans, KMeansConfig, Partition};
use crate::metrics::{pairwise, Metric};
use crate::pam::{pam, PamConfig, PamResult};
use crate::plot;
use crate::projection::{pca_2d, Projection2D};
use crate::report::{
    emit_report, label_agreement, name_clusters, size_table, AnalysisReport, ClassDistribution,
    DatasetSummary, KMeansSection, PamSection, ReportFormat,
};
use crate::tendency::{hopkins, HopkinsConfig};
use crate::validation::{silhouette, sweep_k, SilhouetteReport, SweepAlgorithm, SweepConfig};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InputFormat {
    /// Decide from the file extension (`.arff` → ARFF, anything else → CSV).
    #[default]
    Auto,
    Csv,
    Arff,
}

impl std::str::FromStr for InputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "auto" => Ok(InputFormat::Auto),
            "csv" => Ok(InputFormat::Csv),
            "arff" => Ok(InputFormat::Arff),
            other => Err(Error::InvalidConfig(format!(
                "unknown input format {other:?}"
            ))),
        }
    }
}

/// How to pick the id or class column.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColumnChoice {
    /// The breast-cancer column name when the table has it, otherwise none.
    #[default]
    Auto,
    None,
    Named(String),
}

impl ColumnChoice {
    fn resolve(&self, table: &RawTable, wbc_name: &str) -> Option<String> {
        match self {
            ColumnChoice::Auto => table
                .column_names()
                .iter()
                .find(|c| c.as_str() == wbc_name)
                .cloned(),
            ColumnChoice::None => None,
            ColumnChoice::Named(n) => Some(n.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputOptions {
    pub format: InputFormat,
    pub has_header: bool,
    pub delimiter: char,
    pub missing_marker: String,
    pub id_column: ColumnChoice,
    pub label_column: ColumnChoice,
    /// Min-max scale features onto [0, 1].
    pub normalize: bool,
    /// Z-score features after preprocessing (takes precedence over `normalize`).
    #[serde(default)]
    pub standardize: bool,
}

impl Default for InputOptions {
    fn default() -> Self {
        InputOptions {
            format: InputFormat::Auto,
            has_header: false,
            delimiter: ',',
            missing_marker: "?".into(),
            id_column: ColumnChoice::Auto,
            label_column: ColumnChoice::Auto,
            normalize: true,
            standardize: false,
        }
    }
}

/// Every parameter behind a report; echoed verbatim into it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisConfig {
    pub input: String,
    pub options: InputOptions,
    pub metric: Metric,
    pub seed: u64,
    pub k: usize,
    pub hopkins: HopkinsConfig,
    pub kmeans: KMeansConfig,
    pub pam: PamConfig,
    pub sweep_algorithm: SweepAlgorithm,
    pub sweep_k_min: usize,
    pub sweep_k_max: usize,
}

impl AnalysisConfig {
    /// Defaults for a given input file: k = 2, seed 42, Euclidean, sweep 2..=10.
    pub fn new(input: impl Into<String>) -> Self {
        let seed = 42;
        AnalysisConfig {
            input: input.into(),
            options: InputOptions::default(),
            metric: Metric::Euclidean,
            seed,
            k: 2,
            hopkins: HopkinsConfig {
                seed,
                ..HopkinsConfig::default()
            },
            kmeans: KMeansConfig {
                seed,
                ..KMeansConfig::default()
            },
            pam: PamConfig::default(),
            sweep_algorithm: SweepAlgorithm::KMeans,
            sweep_k_min: 2,
            sweep_k_max: 10,
        }
    }

    /// Sets the seed everywhere a seed is used.
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self.hopkins.seed = seed;
        self.kmeans.seed = seed;
        self
    }

    pub fn with_k(mut self, k: usize) -> Self {
        self.k = k;
        self.kmeans.k = k;
        self.pam.k = k;
        self
    }

    pub fn with_metric(mut self, metric: Metric) -> Self {
        self.metric = metric;
        self.pam.metric = metric;
        self
    }
}

pub fn load_table(path: &Path, opts: &InputOptions) -> Result<RawTable> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let is_arff = match opts.format {
        InputFormat::Arff => true,
        InputFormat::Csv => false,
        InputFormat::Auto => path
            .extension()
            .is_some_and(|e| e.eq_ignore_ascii_case("arff")),
    };
    if is_arff {
        return parse_arff(&bytes[..]);
    }
    let delimiter = u8::try_from(opts.delimiter)
        .map_err(|_| Error::InvalidConfig("delimiter must be ASCII".into()))?;
    let table = parse_csv(
        &bytes[..],
        &CsvConfig {
            has_header: opts.has_header,
            delimiter,
            missing_marker: opts.missing_marker.clone(),
            column_names: None,
        },
    )?;
    // The public breast-cancer file has no header; give its columns their names.
    if !opts.has_header && table.n_cols() == WBC_COLUMNS.len() {
        return table.with_column_names(WBC_COLUMNS.iter().map(|s| s.to_string()).collect());
    }
    Ok(table)
}

pub fn load_dataset(
    path: &Path,
    opts: &InputOptions,
) -> Result<(RawTable, Dataset, PreprocessReport)> {
    let table = load_table(path, opts)?;
    let pre = PreprocessOptions {
        id_column: opts.id_column.resolve(&table, WBC_ID_COLUMN),
        label_column: opts.label_column.resolve(&table, WBC_CLASS_COLUMN),
        normalize: opts.normalize && !opts.standardize,
    };
    let (mut dataset, report) = preprocess(&table, &pre)?;
    if opts.standardize {
        dataset = standardize(&dataset);
    }
    Ok((table, dataset, report))
}

/// Everything a full run produces; `report` is what gets serialized.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub report: AnalysisReport,
    pub dataset: Dataset,
    pub projection: Projection2D,
    pub kmeans: Partition,
    pub pam: PamResult,
    pub pam_silhouette: SilhouetteReport,
}

pub fn run_analysis(config: &AnalysisConfig) -> Result<Analysis> {
    let path = Path::new(&config.input);
    let (_, dataset, pre) = load_dataset(path, &config.options)?;
    let x = dataset.features();
    let n = dataset.n_rows();
    if n < 3 {
        return Err(Error::TooFewPoints { n, k: 3 });
    }

    let hop = hopkins(x, &config.hopkins)?;
    let dist = pairwise(x, config.metric);

    let km = kmeans(
        x,
        &KMeansConfig {
            k: config.k,
            ..config.kmeans
        },
    )?;
    let km_sil = silhouette(&dist, &km.labels)?;
    let km_naming = dataset
        .labels()
        .map(|classes| name_clusters(&km.labels, Some(classes)))
        .transpose()?;

    let pam_res = pam(
        &dist,
        &PamConfig {
            k: config.k,
            metric: config.metric,
            ..config.pam
        },
    )?;
    let pam_sil = silhouette(&dist, &pam_res.labels)?;
    let pam_naming = dataset
        .labels()
        .map(|classes| name_clusters(&pam_res.labels, Some(classes)))
        .transpose()?;

    let k_max = config.sweep_k_max.min(n - 1);
    let sweep = sweep_k(
        x,
        &dist,
        config.sweep_k_min..=k_max,
        &SweepConfig {
            algorithm: config.sweep_algorithm,
            kmeans: config.kmeans,
            pam: PamConfig {
                metric: config.metric,
                ..config.pam
            },
        },
    )?;

    let projection = pca_2d(x)?;

    let report = AnalysisReport {
        dataset: DatasetSummary {
            source: path.file_name().map_or_else(
                || config.input.clone(),
                |f| f.to_string_lossy().into_owned(),
            ),
            rows_before: pre.rows_before,
            rows_after: pre.rows_after,
            dropped_row_ids: pre.dropped_row_ids.clone(),
            n_features: dataset.n_features(),
            feature_names: dataset.feature_names().to_vec(),
            class_distribution: dataset
                .class_counts()
                .map(|(benign, malignant)| ClassDistribution { benign, malignant }),
        },
        preprocessing: pre,
        hopkins: Some(hop),
        kmeans: Some(KMeansSection {
            sizes: size_table(&km.labels, km.k, km_naming.as_deref()),
            agreement: km_naming.as_deref().map(label_agreement),
            naming: km_naming,
            silhouette: km_sil.overall,
            partition: km.clone(),
        }),
        pam: Some(PamSection {
            result: pam_res.clone(),
            silhouette: pam_sil.overall,
            sizes: size_table(&pam_res.labels, config.k, pam_naming.as_deref()),
            naming: pam_naming,
        }),
        silhouette: Some(pam_sil.clone()),
        sweep: Some(sweep),
        config: config.clone(),
        version: VERSION.to_string(),
    };

    Ok(Analysis {
        report,
        dataset,
        projection,
        kmeans: km,
        pam: pam_res,
        pam_silhouette: pam_sil,
    })
}

/// Names of the files [`write_outputs`] creates, in creation order.
pub const OUTPUT_FILES: [&str; 10] = [
    "report.json",
    "report.md",
    "scatter_kmeans.svg",
    "scatter_kmeans.csv",
    "scatter_pam.svg",
    "scatter_pam.csv",
    "silhouette_pam.svg",
    "silhouette_pam.csv",
    "sweep.svg",
    "sweep.csv",
];

pub fn write_outputs(analysis: &Analysis, out_dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let proj = &analysis.projection;
    let ids = analysis.dataset.row_ids();

    let km_centers: Vec<(f64, f64)> = analysis
        .kmeans
        .centroids
        .as_ref()
        .map(|c| c.rows().map(|r| proj.project(r)).collect())
        .unwrap_or_default();
    let pam_centers: Vec<(f64, f64)> = analysis
        .pam
        .medoid_indices
        .iter()
        .map(|&m| (proj.coords.get(m, 0), proj.coords.get(m, 1)))
        .collect();
    let sweep = analysis
        .report
        .sweep
        .as_ref()
        .expect("full analysis has a sweep");

    let contents: [Vec<u8>; 10] = [
        emit_report(&analysis.report, ReportFormat::Json)?,
        emit_report(&analysis.report, ReportFormat::Markdown)?,
        plot::emit_scatter_svg(
            proj,
            &analysis.kmeans.labels,
            Some(&km_centers),
            "K-means clusters (PCA plane)",
        ),
        plot::scatter_csv(proj, &analysis.kmeans.labels, ids),
        plot::emit_scatter_svg(
            proj,
            &analysis.pam.labels,
            Some(&pam_centers),
            "PAM clusters (PCA plane)",
        ),
        plot::scatter_csv(proj, &analysis.pam.labels, ids),
        plot::emit_silhouette_svg(&analysis.pam_silhouette, "Silhouette plot, PAM"),
        plot::silhouette_csv(&analysis.pam_silhouette),
        plot::emit_sweep_svg(sweep, "Average silhouette and WSS by k"),
        plot::sweep_csv(sweep),
    ];

    let mut written = Vec::with_capacity(OUTPUT_FILES.len());
    for (name, bytes) in OUTPUT_FILES.iter().zip(contents) {
        let path = out_dir.join(name);
        fs::write(&path, bytes).map_err(|e| Error::io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}
