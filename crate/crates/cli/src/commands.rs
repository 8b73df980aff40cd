use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use clusterlab::dataset::{drop_missing_rows, write_arff, write_csv};
use clusterlab::kmeans::KMeansConfig;
use clusterlab::pipeline::{load_dataset, load_table, run_analysis, write_outputs, AnalysisConfig};
use clusterlab::report::{name_clusters, size_table, ClusterName, SizeRow};
use clusterlab::validation::silhouette;
use clusterlab::{
    hopkins, kmeans, pairwise, pam, pca_2d, plot, sweep_k, Dataset, Error, HopkinsConfig,
    PamConfig, Result, SweepAlgorithm, SweepConfig,
};
use serde_json::{json, Value};

use crate::args::{Command, Emit, GlobalArgs, InputArgs, KMeansArgs};

/// Runs one subcommand and returns what should go to stdout.
pub fn run(command: &Command, global: &GlobalArgs) -> Result<String> {
    match command {
        Command::Inspect { input } => inspect(input, global),
        Command::Preprocess { input, emit, out } => preprocess(input, *emit, out.as_deref()),
        Command::Tendency {
            input,
            m,
            trials,
            power_d,
        } => {
            let (data, _) = load(input)?;
            let cfg = HopkinsConfig {
                m: *m,
                trials: *trials,
                seed: global.seed,
                power_d: *power_d,
            };
            let res = hopkins(data.features(), &cfg)?;
            if global.json {
                return to_json(&res);
            }
            let mut s = format!(
                "Hopkins H = {:.6} (sd {:.6}, m = {}, {} trials, seed {})\n",
                res.h, res.std_dev, res.m, res.trials, res.seed
            );
            if res.degenerate {
                s.push_str("warning: every point is identical; H is fixed at 1\n");
            }
            Ok(s)
        }
        Command::Kmeans {
            input,
            k,
            kmeans: ka,
            out,
        } => {
            let (data, _) = load(input)?;
            let part = kmeans(data.features(), &kmeans_config(*k, ka, global.seed))?;
            let dist = pairwise(data.features(), global.metric);
            let sil = silhouette(&dist, &part.labels)?;
            let naming = naming(&data, &part.labels)?;
            let sizes = size_table(&part.labels, *k, naming.as_deref());
            if let Some(dir) = out {
                let proj = pca_2d(data.features())?;
                let centers: Vec<(f64, f64)> = part
                    .centroids
                    .as_ref()
                    .map(|c| c.rows().map(|r| proj.project(r)).collect())
                    .unwrap_or_default();
                write_pair(
                    dir,
                    "scatter_kmeans",
                    plot::emit_scatter_svg(
                        &proj,
                        &part.labels,
                        Some(&centers),
                        "K-means clusters (PCA plane)",
                    ),
                    plot::scatter_csv(&proj, &part.labels, data.row_ids()),
                )?;
            }
            if global.json {
                return to_json(&json!({
                    "partition": part,
                    "sizes": sizes,
                    "naming": naming,
                    "silhouette": sil.overall,
                }));
            }
            let mut s = format!(
                "K-means k = {k}: WSS {:.6}, {} iterations, best restart {}, average silhouette {:.4}\n",
                part.objective, part.iterations, part.restart, sil.overall
            );
            s.push_str(&render_sizes(&sizes, naming.as_deref()));
            Ok(s)
        }
        Command::Pam {
            input,
            k,
            max_swaps,
            out,
        } => {
            let (data, _) = load(input)?;
            let dist = pairwise(data.features(), global.metric);
            let cfg = PamConfig {
                k: *k,
                max_swap_iters: *max_swaps,
                metric: global.metric,
            };
            let res = pam(&dist, &cfg)?;
            let sil = silhouette(&dist, &res.labels)?;
            let naming = naming(&data, &res.labels)?;
            let sizes = size_table(&res.labels, *k, naming.as_deref());
            if let Some(dir) = out {
                let proj = pca_2d(data.features())?;
                let centers: Vec<(f64, f64)> = res
                    .medoid_indices
                    .iter()
                    .map(|&m| (proj.coords.get(m, 0), proj.coords.get(m, 1)))
                    .collect();
                write_pair(
                    dir,
                    "scatter_pam",
                    plot::emit_scatter_svg(
                        &proj,
                        &res.labels,
                        Some(&centers),
                        "PAM clusters (PCA plane)",
                    ),
                    plot::scatter_csv(&proj, &res.labels, data.row_ids()),
                )?;
            }
            if global.json {
                return to_json(&json!({
                    "result": res,
                    "sizes": sizes,
                    "naming": naming,
                    "silhouette": sil.overall,
                }));
            }
            let medoids: Vec<&str> = res
                .medoid_indices
                .iter()
                .map(|&m| data.row_ids()[m].as_str())
                .collect();
            let mut s = format!(
                "PAM k = {k} ({}): cost {:.6}, {} swaps, medoids {}, average silhouette {:.4}\n",
                global.metric,
                res.cost,
                res.swaps_performed,
                medoids.join(", "),
                sil.overall
            );
            if !res.converged {
                s.push_str("warning: swap limit reached before convergence\n");
            }
            s.push_str(&render_sizes(&sizes, naming.as_deref()));
            Ok(s)
        }
        Command::Silhouette {
            input,
            k,
            algorithm,
            kmeans: ka,
            out,
        } => {
            let (data, _) = load(input)?;
            let dist = pairwise(data.features(), global.metric);
            let labels = match algorithm {
                SweepAlgorithm::KMeans => {
                    kmeans(data.features(), &kmeans_config(*k, ka, global.seed))?.labels
                }
                SweepAlgorithm::Pam => {
                    pam(
                        &dist,
                        &PamConfig {
                            k: *k,
                            metric: global.metric,
                            ..PamConfig::default()
                        },
                    )?
                    .labels
                }
            };
            let rep = silhouette(&dist, &labels)?;
            if let Some(dir) = out {
                let stem = match algorithm {
                    SweepAlgorithm::KMeans => "silhouette_kmeans",
                    SweepAlgorithm::Pam => "silhouette_pam",
                };
                let title = format!("Silhouette plot, {}", algorithm_name(*algorithm));
                write_pair(
                    dir,
                    stem,
                    plot::emit_silhouette_svg(&rep, &title),
                    plot::silhouette_csv(&rep),
                )?;
            }
            if global.json {
                return to_json(&rep);
            }
            let mut s = format!(
                "{} k = {k}: average silhouette {:.4}\n",
                algorithm_name(*algorithm),
                rep.overall
            );
            for c in &rep.cluster_means {
                let _ = writeln!(
                    s,
                    "  cluster {}: n = {}, mean width {:.4}",
                    c.cluster, c.size, c.mean
                );
            }
            Ok(s)
        }
        Command::Sweep {
            input,
            k_min,
            k_max,
            algorithm,
            kmeans: ka,
            out,
        } => {
            let (data, _) = load(input)?;
            let dist = pairwise(data.features(), global.metric);
            let cfg = SweepConfig {
                algorithm: *algorithm,
                kmeans: kmeans_config(2, ka, global.seed),
                pam: PamConfig {
                    metric: global.metric,
                    ..PamConfig::default()
                },
            };
            let res = sweep_k(data.features(), &dist, *k_min..=*k_max, &cfg)?;
            if let Some(dir) = out {
                write_pair(
                    dir,
                    "sweep",
                    plot::emit_sweep_svg(&res, "Average silhouette and WSS by k"),
                    plot::sweep_csv(&res),
                )?;
            }
            if global.json {
                return to_json(&res);
            }
            let mut s = format!(
                "{} sweep, k = {k_min}..{k_max}\n   k  silhouette          wss\n",
                algorithm_name(*algorithm)
            );
            for ((k, sil), w) in res.ks.iter().zip(&res.avg_silhouette).zip(&res.wss) {
                let mark = if *k == res.best_k { "  <- best" } else { "" };
                let _ = writeln!(s, "{k:>4}  {sil:>10.4}  {w:>11.4}{mark}");
            }
            Ok(s)
        }
        Command::Analyze {
            input,
            k,
            k_min,
            k_max,
            sweep_algorithm,
            kmeans: ka,
            trials,
            out,
        } => {
            let mut cfg = AnalysisConfig::new(input.input.to_string_lossy())
                .with_seed(global.seed)
                .with_metric(global.metric);
            cfg.options = input.options();
            cfg.kmeans = kmeans_config(*k, ka, global.seed);
            cfg = cfg.with_k(*k);
            cfg.hopkins.trials = *trials;
            cfg.sweep_algorithm = *sweep_algorithm;
            cfg.sweep_k_min = *k_min;
            cfg.sweep_k_max = *k_max;
            let analysis = run_analysis(&cfg)?;
            let written = write_outputs(&analysis, out)?;
            if global.json {
                return to_json(&analysis.report);
            }
            let r = &analysis.report;
            let mut s = format!(
                "{} rows read, {} kept, {} features\n",
                r.dataset.rows_before, r.dataset.rows_after, r.dataset.n_features
            );
            if let Some(h) = &r.hopkins {
                let _ = writeln!(s, "Hopkins H = {:.4}", h.h);
            }
            if let Some(km) = &r.kmeans {
                let _ = writeln!(s, "K-means silhouette {:.4}", km.silhouette);
                s.push_str(&render_sizes(&km.sizes, km.naming.as_deref()));
            }
            if let Some(p) = &r.pam {
                let _ = writeln!(s, "PAM silhouette {:.4}", p.silhouette);
            }
            if let Some(sw) = &r.sweep {
                let _ = writeln!(s, "best k by silhouette: {}", sw.best_k);
            }
            for path in written {
                let _ = writeln!(s, "wrote {}", path.display());
            }
            Ok(s)
        }
    }
}

fn load(input: &InputArgs) -> Result<(Dataset, clusterlab::dataset::PreprocessReport)> {
    let (_, data, report) = load_dataset(&input.input, &input.options())?;
    Ok((data, report))
}

fn kmeans_config(k: usize, a: &KMeansArgs, seed: u64) -> KMeansConfig {
    KMeansConfig {
        k,
        init: a.init,
        max_iter: a.max_iter,
        restarts: a.restarts,
        seed,
        ..KMeansConfig::default()
    }
}

fn naming(data: &Dataset, labels: &[usize]) -> Result<Option<Vec<ClusterName>>> {
    data.labels()
        .map(|c| name_clusters(labels, Some(c)))
        .transpose()
}

fn algorithm_name(a: SweepAlgorithm) -> &'static str {
    match a {
        SweepAlgorithm::KMeans => "K-means",
        SweepAlgorithm::Pam => "PAM",
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn render_sizes(rows: &[SizeRow], naming: Option<&[ClusterName]>) -> String {
    let mut s = String::from("  cluster  name          size  share  purity\n");
    for r in rows {
        let purity = naming
            .and_then(|n| n.iter().find(|c| c.cluster == r.cluster))
            .map_or_else(|| "-".to_string(), |c| format!("{:.3}", c.purity));
        let _ = writeln!(
            s,
            "  {:>7}  {:<12}  {:>4}  {:>4}%  {:>6}",
            r.cluster,
            r.name.as_deref().unwrap_or("-"),
            r.size,
            r.percent,
            purity
        );
    }
    s
}

fn write_pair(dir: &Path, stem: &str, svg: Vec<u8>, csv: Vec<u8>) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    for (ext, bytes) in [("svg", svg), ("csv", csv)] {
        let path = dir.join(format!("{stem}.{ext}"));
        fs::write(&path, bytes).map_err(|e| Error::io(&path, e))?;
    }
    Ok(())
}

fn inspect(input: &InputArgs, global: &GlobalArgs) -> Result<String> {
    let opts = input.options();
    let table = load_table(&input.input, &opts)?;
    let missing = table.missing_counts();
    let (complete, dropped) = drop_missing_rows(&table);
    let (data, _) = load(input)?;
    let classes = data.class_counts();
    if global.json {
        let columns: Vec<Value> = table
            .column_names()
            .iter()
            .zip(&missing)
            .map(|(name, m)| json!({ "name": name, "missing": m }))
            .collect();
        return to_json(&json!({
            "rows": table.n_rows(),
            "complete_rows": complete.n_rows(),
            "incomplete_rows": dropped.len(),
            "columns": columns,
            "features": data.feature_names(),
            "class_distribution": classes.map(|(b, m)| json!({ "benign": b, "malignant": m })),
        }));
    }
    let mut s = format!(
        "{} rows x {} columns; {} complete, {} with missing cells\n",
        table.n_rows(),
        table.n_cols(),
        complete.n_rows(),
        dropped.len()
    );
    for (name, m) in table.column_names().iter().zip(&missing) {
        let role = if data.feature_names().contains(name) {
            "feature"
        } else {
            "meta"
        };
        let _ = writeln!(s, "  {name:<30} {role:<8} missing {m}");
    }
    if let Some((b, m)) = classes {
        let _ = writeln!(
            s,
            "classes after dropping incomplete rows: {b} benign, {m} malignant"
        );
    }
    Ok(s)
}

fn preprocess(input: &InputArgs, emit: Emit, out: Option<&Path>) -> Result<String> {
    let (data, report) = load(input)?;
    let table = data.to_raw_table();
    let bytes = match emit {
        Emit::Csv => write_csv(&table, b',', "?"),
        Emit::Arff => write_arff(&table, "preprocessed"),
    };
    eprintln!(
        "{} rows read, {} dropped for missing values, {} kept",
        report.rows_before, report.rows_dropped, report.rows_after
    );
    match out {
        Some(path) => {
            fs::write(path, bytes).map_err(|e| Error::io(path, e))?;
            Ok(String::new())
        }
        None => String::from_utf8(bytes).map_err(|e| Error::InvalidConfig(e.to_string())),
    }
}
