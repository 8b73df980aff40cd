//! Analysis report: majority-class cluster naming, the aggregate
//! [`AnalysisReport`], and its JSON / Markdown renderings.
//!
//! JSON output is canonical (object keys sorted, shortest round-trip floats),
//! so parsing and re-emitting a report reproduces it byte for byte.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::dataset::{ClassLabel, PreprocessReport};
use crate::error::{Error, Result};
use crate::kmeans::{cluster_sizes, Partition};
use crate::pam::PamResult;
use crate::pipeline::AnalysisConfig;
use crate::tendency::HopkinsResult;
use crate::validation::{KSweepResult, SilhouetteReport};

/// JSON Schema every emitted report must satisfy.
pub const REPORT_SCHEMA: &str = include_str!("../schema/report.schema.json");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterName {
    pub cluster: usize,
    pub name: String,
    pub majority_class: ClassLabel,
    /// Fraction of members carrying the majority class.
    pub purity: f64,
    pub size: usize,
}

/// Names each non-empty cluster after the class most of its members carry.
/// A tie goes to Benign.
pub fn name_clusters(labels: &[usize], classes: Option<&[ClassLabel]>) -> Result<Vec<ClusterName>> {
    let classes = classes.ok_or(Error::NoLabels)?;
    if classes.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            left: labels.len(),
            right: classes.len(),
        });
    }
    let k = labels.iter().max().map_or(0, |&m| m + 1);
    let mut counts = vec![(0usize, 0usize); k];
    for (&l, &c) in labels.iter().zip(classes) {
        match c {
            ClassLabel::Benign => counts[l].0 += 1,
            ClassLabel::Malignant => counts[l].1 += 1,
        }
    }
    Ok(counts
        .into_iter()
        .enumerate()
        .filter(|(_, (b, m))| b + m > 0)
        .map(|(cluster, (b, m))| {
            let (majority_class, top) = if b >= m {
                (ClassLabel::Benign, b)
            } else {
                (ClassLabel::Malignant, m)
            };
            ClusterName {
                cluster,
                name: majority_class.to_string(),
                majority_class,
                purity: top as f64 / (b + m) as f64,
                size: b + m,
            }
        })
        .collect())
}

/// Fraction of points whose class matches their cluster's majority class.
pub fn label_agreement(naming: &[ClusterName]) -> f64 {
    let n: usize = naming.iter().map(|c| c.size).sum();
    let agree: f64 = naming.iter().map(|c| c.purity * c.size as f64).sum();
    if n == 0 {
        0.0
    } else {
        agree / n as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizeRow {
    pub cluster: usize,
    pub name: Option<String>,
    pub size: usize,
    /// Share of all points, rounded to a whole percent.
    pub percent: u32,
}

pub fn size_table(labels: &[usize], k: usize, naming: Option<&[ClusterName]>) -> Vec<SizeRow> {
    let n = labels.len().max(1) as f64;
    cluster_sizes(labels, k)
        .into_iter()
        .enumerate()
        .map(|(cluster, size)| SizeRow {
            cluster,
            name: naming
                .and_then(|nm| nm.iter().find(|c| c.cluster == cluster))
                .map(|c| c.name.clone()),
            size,
            percent: (100.0 * size as f64 / n).round() as u32,
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassDistribution {
    pub benign: usize,
    pub malignant: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSummary {
    pub source: String,
    pub rows_before: usize,
    pub rows_after: usize,
    pub dropped_row_ids: Vec<String>,
    pub n_features: usize,
    pub feature_names: Vec<String>,
    pub class_distribution: Option<ClassDistribution>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KMeansSection {
    pub partition: Partition,
    pub sizes: Vec<SizeRow>,
    pub naming: Option<Vec<ClusterName>>,
    pub agreement: Option<f64>,
    pub silhouette: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PamSection {
    pub result: PamResult,
    pub silhouette: f64,
    pub sizes: Vec<SizeRow>,
    pub naming: Option<Vec<ClusterName>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub dataset: DatasetSummary,
    pub preprocessing: PreprocessReport,
    pub hopkins: Option<HopkinsResult>,
    pub kmeans: Option<KMeansSection>,
    pub pam: Option<PamSection>,
    /// Silhouette analysis of the PAM partition.
    pub silhouette: Option<SilhouetteReport>,
    pub sweep: Option<KSweepResult>,
    pub config: AnalysisConfig,
    pub version: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Markdown,
}

pub fn emit_report(report: &AnalysisReport, format: ReportFormat) -> Result<Vec<u8>> {
    match format {
        ReportFormat::Json => {
            let value = serde_json::to_value(report)?;
            validate_report(&value)?;
            let mut out = serde_json::to_vec_pretty(&value)?;
            out.push(b'\n');
            Ok(out)
        }
        ReportFormat::Markdown => Ok(render_markdown(report).into_bytes()),
    }
}

pub fn parse_report(bytes: &[u8]) -> Result<AnalysisReport> {
    Ok(serde_json::from_slice(bytes)?)
}

/// Checks a JSON value against [`REPORT_SCHEMA`].
pub fn validate_report(value: &Value) -> Result<()> {
    let schema: Value = serde_json::from_str(REPORT_SCHEMA)?;
    let mut problems = Vec::new();
    check(value, &schema, "$", &mut problems);
    if problems.is_empty() {
        Ok(())
    } else {
        Err(Error::Schema(problems.join("; ")))
    }
}

/// Interprets the `type` / `required` / `properties` / `items` subset of JSON Schema.
fn check(value: &Value, schema: &Value, path: &str, problems: &mut Vec<String>) {
    if let Some(ty) = schema.get("type") {
        let allowed: Vec<&str> = match ty {
            Value::String(s) => vec![s.as_str()],
            Value::Array(a) => a.iter().filter_map(Value::as_str).collect(),
            _ => vec![],
        };
        if !allowed.iter().any(|t| type_matches(value, t)) {
            problems.push(format!("{path}: expected {allowed:?}"));
            return;
        }
    }
    if let Value::Object(map) = value {
        if let Some(Value::Array(req)) = schema.get("required") {
            for key in req.iter().filter_map(Value::as_str) {
                if !map.contains_key(key) {
                    problems.push(format!("{path}: missing key {key:?}"));
                }
            }
        }
        if let Some(Value::Object(props)) = schema.get("properties") {
            for (key, sub) in props {
                if let Some(v) = map.get(key) {
                    check(v, sub, &format!("{path}.{key}"), problems);
                }
            }
        }
    }
    if let (Value::Array(items), Some(sub)) = (value, schema.get("items")) {
        for (i, v) in items.iter().enumerate() {
            check(v, sub, &format!("{path}[{i}]"), problems);
        }
    }
}

fn type_matches(value: &Value, ty: &str) -> bool {
    match ty {
        "object" => value.is_object(),
        "array" => value.is_array(),
        "string" => value.is_string(),
        "number" => value.is_number(),
        "integer" => value.is_u64() || value.is_i64(),
        "boolean" => value.is_boolean(),
        "null" => value.is_null(),
        _ => false,
    }
}

fn render_markdown(r: &AnalysisReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# Clustering analysis: {}\n", r.dataset.source);
    let _ = writeln!(s, "Generated by clusterlab {}.\n", r.version);

    s.push_str("## Dataset\n\n");
    let _ = writeln!(s, "| | |\n|---|---|");
    let _ = writeln!(
        s,
        "| Rows before preprocessing | {} |",
        r.preprocessing.rows_before
    );
    let _ = writeln!(
        s,
        "| Rows after preprocessing | {} |",
        r.preprocessing.rows_after
    );
    let _ = writeln!(
        s,
        "| Rows dropped (missing values) | {} |",
        r.preprocessing.rows_dropped
    );
    let _ = writeln!(s, "| Features | {} |", r.dataset.n_features);
    if let Some(c) = r.dataset.class_distribution {
        let _ = writeln!(s, "| Benign / Malignant | {} / {} |", c.benign, c.malignant);
    }
    if !r.preprocessing.columns_dropped.is_empty() {
        let _ = writeln!(
            s,
            "| Columns removed | {} |",
            r.preprocessing.columns_dropped.join(", ")
        );
    }
    let _ = writeln!(
        s,
        "| Min-max normalized | {} |\n",
        if r.preprocessing.norm_params.is_empty() {
            "no"
        } else {
            "yes"
        }
    );
    if !r.preprocessing.dropped_row_ids.is_empty() {
        let _ = writeln!(
            s,
            "Dropped rows: {}\n",
            r.preprocessing.dropped_row_ids.join(", ")
        );
    }

    s.push_str("## Clustering tendency\n\n");
    match &r.hopkins {
        Some(h) => {
            let _ = writeln!(
                s,
                "Hopkins statistic H = {:.4} (sd {:.4} over {} trials, m = {}, seed {}).{}\n",
                h.h,
                h.std_dev,
                h.trials,
                h.m,
                h.seed,
                if h.degenerate {
                    " All points identical."
                } else {
                    ""
                }
            );
        }
        None => s.push_str("Not computed.\n\n"),
    }

    s.push_str("## K-means\n\n");
    match &r.kmeans {
        Some(km) => {
            let _ = writeln!(
                s,
                "k = {}, WSS = {:.4}, average silhouette = {:.4}, {} iterations{}.\n",
                km.partition.k,
                km.partition.objective,
                km.silhouette,
                km.partition.iterations,
                if km.partition.converged {
                    ""
                } else {
                    " (not converged)"
                }
            );
            size_rows(&mut s, &km.sizes);
            if let Some(a) = km.agreement {
                let _ = writeln!(s, "Majority-class agreement: {:.1}%\n", 100.0 * a);
            }
        }
        None => s.push_str("Not computed.\n\n"),
    }

    s.push_str("## PAM\n\n");
    match &r.pam {
        Some(p) => {
            let _ = writeln!(
                s,
                "Medoids (row indices): {:?}, cost = {:.4}, swaps = {}, average silhouette = {:.4}.\n",
                p.result.medoid_indices, p.result.cost, p.result.swaps_performed, p.silhouette
            );
            size_rows(&mut s, &p.sizes);
        }
        None => s.push_str("Not computed.\n\n"),
    }

    s.push_str("## Silhouette (PAM)\n\n");
    match &r.silhouette {
        Some(sil) => {
            s.push_str("| Cluster | Size | Mean width |\n|---|---|---|\n");
            for c in &sil.cluster_means {
                let _ = writeln!(s, "| {} | {} | {:.4} |", c.cluster, c.size, c.mean);
            }
            let _ = writeln!(
                s,
                "\nOverall average silhouette width: {:.4}\n",
                sil.overall
            );
        }
        None => s.push_str("Not computed.\n\n"),
    }

    s.push_str("## k sweep\n\n");
    match &r.sweep {
        Some(sw) => {
            s.push_str("| k | Average silhouette | WSS |\n|---|---|---|\n");
            for ((k, sil), w) in sw.ks.iter().zip(&sw.avg_silhouette).zip(&sw.wss) {
                let mark = if *k == sw.best_k { " **best**" } else { "" };
                let _ = writeln!(s, "| {k} | {sil:.4}{mark} | {w:.4} |");
            }
            s.push('\n');
        }
        None => s.push_str("Not computed.\n\n"),
    }

    s.push_str("## Configuration\n\n```json\n");
    s.push_str(&serde_json::to_string_pretty(&r.config).unwrap_or_default());
    s.push_str("\n```\n");
    s
}

fn size_rows(s: &mut String, rows: &[SizeRow]) {
    s.push_str("| Cluster | Instances | Share |\n|---|---|---|\n");
    for row in rows {
        let name = row
            .name
            .clone()
            .unwrap_or_else(|| format!("Cluster {}", row.cluster));
        let _ = writeln!(s, "| {} | {} | {}% |", name, row.size, row.percent);
    }
    s.push('\n');
}
