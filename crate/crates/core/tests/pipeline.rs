//! End-to-end checks on the bundled data set and the report format.

mod common;

use clusterlab::dataset::{standardize, ClassLabel};
use clusterlab::kmeans::{kmeans, kmeans_pp_indices, KMeansConfig};
use clusterlab::metrics::{pairwise, Metric};
use clusterlab::pam::{pam, PamConfig};
use clusterlab::pipeline::{run_analysis, write_outputs, AnalysisConfig, OUTPUT_FILES};
use clusterlab::report::{emit_report, parse_report, validate_report, ReportFormat};
use clusterlab::tendency::{hopkins, HopkinsConfig};
use clusterlab::validation::{silhouette, sweep_k, SweepAlgorithm, SweepConfig};
use clusterlab::{Error, Matrix};
use common::*;

#[test]
fn wbc_class_balance() {
    let table = wbc_table();
    assert_eq!(table.n_rows(), 699);
    assert_eq!(table.missing_counts()[6], 16);
    assert_eq!(table.missing_counts().iter().sum::<usize>(), 16);
    let ds = wbc_dataset(true);
    assert_eq!(ds.class_counts(), Some((444, 239)));
    assert_eq!(ds.labels().unwrap()[0], ClassLabel::Benign);
}

#[test]
fn wbc_raw_values_are_one_to_ten() {
    let ds = wbc_dataset(false);
    for j in 0..ds.n_features() {
        let col: Vec<f64> = ds.features().column(j).collect();
        assert_eq!(col.iter().cloned().fold(f64::INFINITY, f64::min), 1.0);
        assert_eq!(col.iter().cloned().fold(f64::NEG_INFINITY, f64::max), 10.0);
    }
}

#[test]
fn hopkins_is_deterministic_and_separates_structure() {
    let cfg = HopkinsConfig {
        m: Some(20),
        trials: 10,
        seed: 7,
        power_d: false,
    };
    let clustered = blobs(&[100, 100], 3, 1.0, 1);
    let uniform = random_matrix(200, 3, 1);
    let a = hopkins(&clustered, &cfg).unwrap();
    assert_eq!(a, hopkins(&clustered, &cfg).unwrap());
    let b = hopkins(&uniform, &cfg).unwrap();
    assert!(a.h > 0.9, "clustered H = {}", a.h);
    assert!((b.h - 0.5).abs() < 0.1, "uniform H = {}", b.h);
    let other = hopkins(&clustered, &HopkinsConfig { seed: 8, ..cfg }).unwrap();
    assert_ne!(a.per_trial, other.per_trial);
}

#[test]
fn kmeans_plus_plus_follows_squared_distance_weights() {
    let xs = [0.0, 1.0, 3.0, 7.0];
    let x = Matrix::from_vec(4, 1, xs.to_vec()).unwrap();
    let n = xs.len();
    let draws = 40_000u64;
    let mut counts = vec![0u64; n * n];
    for seed in 0..draws {
        let idx = kmeans_pp_indices(&x, 2, &mut rng(seed));
        counts[idx[0] * n + idx[1]] += 1;
    }
    let mut chi2 = 0.0;
    for first in 0..n {
        let total: f64 = xs.iter().map(|v| (v - xs[first]).powi(2)).sum();
        for second in (0..n).filter(|&s| s != first) {
            let p = 0.25 * (xs[second] - xs[first]).powi(2) / total;
            let expected = p * draws as f64;
            let observed = counts[first * n + second] as f64;
            chi2 += (observed - expected).powi(2) / expected;
        }
        assert_eq!(counts[first * n + first], 0);
    }
    // 11 degrees of freedom; 31.26 is the 0.999 quantile.
    assert!(chi2 < 31.26, "chi-square {chi2}");
}

#[test]
fn wbc_sweep_wss_never_increases() {
    let ds = wbc_dataset(true);
    let dist = pairwise(ds.features(), Metric::Euclidean);
    let cfg = SweepConfig {
        algorithm: SweepAlgorithm::KMeans,
        kmeans: KMeansConfig::default(),
        pam: PamConfig::default(),
    };
    let sweep = sweep_k(ds.features(), &dist, 2..=10, &cfg).unwrap();
    assert_eq!(sweep.ks, (2..=10).collect::<Vec<_>>());
    for w in sweep.wss.windows(2) {
        assert!(w[1] <= w[0] + 1e-9, "{:?}", sweep.wss);
    }
}

#[test]
fn wbc_pam_sweep_prefers_two_clusters() {
    let ds = wbc_dataset(true);
    let dist = pairwise(ds.features(), Metric::Euclidean);
    let cfg = SweepConfig {
        algorithm: SweepAlgorithm::Pam,
        kmeans: KMeansConfig::default(),
        pam: PamConfig::default(),
    };
    let sweep = sweep_k(ds.features(), &dist, 2..=5, &cfg).unwrap();
    assert_eq!(sweep.best_k, 2);
}

#[test]
fn wbc_kmeans_and_pam_agree_with_diagnosis() {
    let ds = wbc_dataset(true);
    let km = kmeans(ds.features(), &KMeansConfig::new(2)).unwrap();
    let dist = pairwise(ds.features(), Metric::Euclidean);
    let pm = pam(&dist, &PamConfig::new(2)).unwrap();
    for labels in [&km.labels, &pm.labels] {
        let names = clusterlab::report::name_clusters(labels, ds.labels()).unwrap();
        assert!(clusterlab::report::label_agreement(&names) > 0.95);
        let mut classes: Vec<_> = names.iter().map(|c| c.majority_class).collect();
        classes.sort_by_key(|c| c.code());
        assert_eq!(classes, [ClassLabel::Benign, ClassLabel::Malignant]);
    }
}

/// The min-max pipeline lands slightly above the reference PAM silhouette band.
/// Z-scoring the features instead reproduces it closely.
#[test]
fn wbc_pam_silhouette_under_z_scores() {
    let ds = standardize(&wbc_dataset(false));
    let dist = pairwise(ds.features(), Metric::Euclidean);
    let res = pam(&dist, &PamConfig::new(2)).unwrap();
    let s = silhouette(&dist, &res.labels).unwrap().overall;
    println!("z-score PAM silhouette {s:.4}");
    assert!((0.55..=0.59).contains(&s), "{s}");
}

#[test]
fn report_json_round_trips_byte_for_byte() {
    let cfg = AnalysisConfig::new(wbc_path().to_string_lossy()).with_seed(3);
    let analysis = run_analysis(&cfg).unwrap();
    let bytes = emit_report(&analysis.report, ReportFormat::Json).unwrap();
    let parsed = parse_report(&bytes).unwrap();
    assert_eq!(parsed, analysis.report);
    assert_eq!(emit_report(&parsed, ReportFormat::Json).unwrap(), bytes);
}

#[test]
fn report_with_empty_sections_is_valid() {
    let cfg = AnalysisConfig::new(wbc_path().to_string_lossy());
    let mut report = run_analysis(&cfg).unwrap().report;
    report.hopkins = None;
    report.kmeans = None;
    report.pam = None;
    report.silhouette = None;
    report.sweep = None;
    let bytes = emit_report(&report, ReportFormat::Json).unwrap();
    let value: serde_json::Value = serde_json::from_slice(&bytes).unwrap();
    assert!(value["kmeans"].is_null());
    assert_eq!(parse_report(&bytes).unwrap(), report);
    let md = String::from_utf8(emit_report(&report, ReportFormat::Markdown).unwrap()).unwrap();
    assert!(md.contains("683"));
}

#[test]
fn schema_rejects_missing_sections() {
    let cfg = AnalysisConfig::new(wbc_path().to_string_lossy());
    let report = run_analysis(&cfg).unwrap().report;
    let mut value = serde_json::to_value(&report).unwrap();
    validate_report(&value).unwrap();
    value.as_object_mut().unwrap().remove("hopkins");
    assert!(matches!(validate_report(&value), Err(Error::Schema(_))));
    let mut value = serde_json::to_value(&report).unwrap();
    value["kmeans"]["silhouette"] = serde_json::json!("high");
    assert!(matches!(validate_report(&value), Err(Error::Schema(_))));
}

#[test]
fn outputs_are_written_and_well_formed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = AnalysisConfig::new(wbc_path().to_string_lossy()).with_metric(Metric::Manhattan);
    let analysis = run_analysis(&cfg).unwrap();
    let written = write_outputs(&analysis, dir.path()).unwrap();
    assert_eq!(written.len(), OUTPUT_FILES.len());
    let svg = std::fs::read_to_string(dir.path().join("scatter_kmeans.svg")).unwrap();
    assert!(svg.starts_with("<svg") || svg.starts_with("<?xml"));
    assert_eq!(svg.matches("class=\"point\"").count(), 683);
    assert_eq!(svg.matches("class=\"center\"").count(), 2);
    let sil = std::fs::read_to_string(dir.path().join("silhouette_pam.svg")).unwrap();
    assert_eq!(sil.matches("class=\"bar\"").count(), 683);
    let csv = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 10);
}

#[test]
fn missing_input_is_an_input_error() {
    let cfg = AnalysisConfig::new("/nonexistent/wbc.data");
    let err = run_analysis(&cfg).unwrap_err();
    assert!(err.is_input_error());
    assert!(err.to_string().contains("/nonexistent/wbc.data"));
}
