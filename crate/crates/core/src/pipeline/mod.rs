//! End-to-end runs and the stage-level commands behind the CLI.
//!
//! A run reads a cohort directory (one `<subject>.rri` or `.txt` file per
//! subject), cleans and windows every series, extracts features, fits the
//! K-means baseline, trains the selected autoencoders over five folds,
//! clusters each fold's validation latents with DBSCAN, labels the held-out
//! test windows by KNN and writes the stress report. Everything lands in
//! `<out>/seed-<seed>/`:
//!
//! ```text
//! manifest.json  report.json  features.csv  split.json  kmeans.json  kmeans.csv
//! <model>/fold-<k>.ckpt.json  loss_curve.csv  latents.csv  test_latents.csv
//!         clusters.csv  test_labels.csv  markers.csv  figure6_data.csv
//! ```
//!
//! `window_id` in every CSV is the row number in `features.csv`.
//!
//! Per-stage seeds are `derive_seed(seed, name)` with names `split`,
//! `kmeans`, `train/cae` and `train/lae`.

pub mod artifacts;
pub mod config;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::analysis::{build_report, ClusterReport};
use crate::autoencoder::{self, ModelKind, CAE_REFERENCE_PARAMS, LAE_PARAMS};
use crate::cluster::{
    dbscan, eps_grid, eps_sweep, kmeans, knn_fit, select_eps, standardize, KmeansConfig, Label,
    Point2,
};
use crate::error::{Error, Result};
use crate::features::{FeatureExtractor, FeatureVector, MarkerSet};
use crate::nn::{count_params, Checkpoint};
use crate::rng::derive_seed;
use crate::rri::{make_split, outlier_mask, parse_rri, rescale, winsorize, CleanConfig, Window};
use crate::synth::{synth_mixed, LabeledSubject};

use artifacts::{MarkerRow, WindowId};
pub use config::{resolve, ModelSelection, ResolvedConfig, RunConfig, Source};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

const COHORT_EXTENSIONS: [&str; 2] = ["rri", "txt"];

/// One input recording as recorded in the manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputFile {
    pub subject_id: String,
    pub file: String,
    pub sha256: String,
    pub samples: usize,
    pub outliers: usize,
    pub windows: usize,
}

/// Cleaned, windowed cohort in subject-file order.
#[derive(Debug, Clone)]
pub struct Cohort {
    pub inputs: Vec<InputFile>,
    pub windows: Vec<Window>,
    pub ids: Vec<WindowId>,
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Cohort files of `dir`, sorted by file name.
pub fn cohort_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let entries = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut files = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        let ext_ok = path
            .extension()
            .and_then(|e| e.to_str())
            .is_some_and(|e| COHORT_EXTENSIONS.contains(&e));
        let hidden = path
            .file_name()
            .and_then(|n| n.to_str())
            .is_some_and(|n| n.starts_with('.'));
        if ext_ok && !hidden && path.is_file() {
            files.push(path);
        }
    }
    files.sort();
    if files.is_empty() {
        return Err(Error::InsufficientData(format!(
            "no .rri or .txt files in {}",
            dir.display()
        )));
    }
    Ok(files)
}

/// Reads, winsorizes and windows every recording in `dir`.
pub fn read_cohort(dir: &Path, clean: &CleanConfig) -> Result<Cohort> {
    let mut cohort = Cohort {
        inputs: Vec::new(),
        windows: Vec::new(),
        ids: Vec::new(),
    };
    for path in cohort_files(dir)? {
        let bytes = fs::read(&path).map_err(|e| Error::io(&path, e))?;
        let subject_id = path
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or_default()
            .to_string();
        let series = parse_rri(bytes.as_slice(), &subject_id).map_err(|e| match e {
            Error::Parse { line, message } => Error::Parse {
                line,
                message: format!("{}: {message}", path.display()),
            },
            other => other,
        })?;
        let outliers = outlier_mask(&series.intervals, clean).iter().filter(|&&o| o).count();
        let cleaned = winsorize(&series, clean)?;
        let windows = crate::rri::windowize(&cleaned);
        cohort.inputs.push(InputFile {
            subject_id: subject_id.clone(),
            file: path
                .file_name()
                .and_then(|n| n.to_str())
                .unwrap_or_default()
                .to_string(),
            sha256: hex(&Sha256::digest(&bytes)),
            samples: series.intervals.len(),
            outliers,
            windows: windows.len(),
        });
        for (i, w) in windows.into_iter().enumerate() {
            cohort.ids.push(WindowId {
                subject_id: subject_id.clone(),
                window_index: i,
            });
            cohort.windows.push(w);
        }
    }
    Ok(cohort)
}

/// Reads `dir` and applies the configured scaling.
pub fn load_cohort(dir: &Path, cfg: &RunConfig) -> Result<Cohort> {
    let mut cohort = read_cohort(dir, &cfg.clean())?;
    rescale(&mut cohort.windows, cfg.scaling);
    Ok(cohort)
}

pub fn extract_features(windows: &[Window], cfg: &RunConfig) -> Result<Vec<FeatureVector>> {
    let mut fx = FeatureExtractor::new(cfg.features());
    windows.iter().map(|w| fx.extract(&w.raw)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageTiming {
    pub stage: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamCounts {
    pub cae: usize,
    pub cae_reference: usize,
    pub lae: usize,
    pub lae_reference: usize,
}

impl ParamCounts {
    pub fn realized() -> Self {
        let (cae, lae) = autoencoder::param_counts();
        Self {
            cae,
            cae_reference: CAE_REFERENCE_PARAMS,
            lae,
            lae_reference: LAE_PARAMS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DbscanRecord {
    pub model: ModelKind,
    pub fold: usize,
    pub eps: f64,
    pub min_pts: usize,
    pub n_clusters: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub status: String,
    pub error: Option<String>,
    pub seed: u64,
    pub config: RunConfig,
    pub config_sources: BTreeMap<String, Source>,
    pub stage_seeds: BTreeMap<String, u64>,
    pub inputs: Vec<InputFile>,
    pub param_counts: ParamCounts,
    pub dbscan: Vec<DbscanRecord>,
    pub timings: Vec<StageTiming>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldSummary {
    pub fold: usize,
    pub init_seed: u64,
    pub initial_val_mae: f64,
    pub final_train_mae: f64,
    pub final_val_mae: f64,
    pub eps: f64,
    pub min_pts: usize,
    pub cluster_sizes: Vec<usize>,
    pub noise: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelReport {
    pub model: ModelKind,
    pub param_count: usize,
    pub folds: Vec<FoldSummary>,
    /// Validation windows of all folds, labelled by their fold's DBSCAN.
    pub validation: ClusterReport,
    /// Test windows, labelled by majority vote of the fold KNN models.
    pub test: Option<ClusterReport>,
    pub test_note: Option<String>,
    /// Share of (fold, test window) pairs whose KNN label equals the label of
    /// the nearest validation cluster centroid.
    pub knn_centroid_agreement: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KmeansSummary {
    pub cluster_sizes: Vec<usize>,
    pub inertia: f64,
    pub iterations: usize,
    pub centroids: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub seed: u64,
    pub n_subjects: usize,
    pub n_windows: usize,
    pub n_test: usize,
    pub param_counts: ParamCounts,
    pub kmeans: KmeansSummary,
    pub models: Vec<ModelReport>,
}

impl RunReport {
    pub fn model(&self, kind: ModelKind) -> Option<&ModelReport> {
        self.models.iter().find(|m| m.model == kind)
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub run_dir: PathBuf,
    pub report: RunReport,
    pub manifest: RunManifest,
}

struct Timer(Vec<StageTiming>);

impl Timer {
    fn stage<T>(&mut self, name: &'static str, f: impl FnOnce() -> Result<T>) -> Result<T> {
        log::info!("stage {name}");
        let t = Instant::now();
        let out = f().map_err(|e| e.in_stage(name));
        self.0.push(StageTiming {
            stage: name.to_string(),
            seconds: t.elapsed().as_secs_f64(),
        });
        out
    }
}

/// lf_hf is infinite when a window has no HF power; such entries take the
/// largest finite value of their column before z-scoring.
fn kmeans_points(features: &[FeatureVector]) -> Vec<Vec<f64>> {
    let mut rows: Vec<Vec<f64>> = features.iter().map(|f| f.values().to_vec()).collect();
    let dim = rows.first().map_or(0, Vec::len);
    for j in 0..dim {
        let cap = rows
            .iter()
            .map(|r| r[j])
            .filter(|v| v.is_finite())
            .fold(f64::NEG_INFINITY, f64::max);
        let cap = if cap.is_finite() { cap } else { 0.0 };
        for r in &mut rows {
            if !r[j].is_finite() {
                r[j] = if r[j] == f64::NEG_INFINITY { -cap } else { cap };
            }
        }
    }
    standardize(&rows)
}

fn sq_dist(a: &Point2, b: &Point2) -> f64 {
    (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)
}

fn centroids(points: &[Point2], labels: &[Label]) -> [Point2; 2] {
    let mut sum = [[0.0; 2]; 2];
    let mut n = [0usize; 2];
    for (p, l) in points.iter().zip(labels) {
        if let Some(c) = l.cluster() {
            sum[c][0] += p[0];
            sum[c][1] += p[1];
            n[c] += 1;
        }
    }
    [0, 1].map(|c| [sum[c][0] / n[c] as f64, sum[c][1] / n[c] as f64])
}

struct RunContext<'a> {
    cfg: &'a RunConfig,
    run_dir: &'a Path,
    cohort: &'a Cohort,
    plan: &'a crate::rri::SplitPlan,
    markers: &'a [MarkerSet],
    dbscan_log: Vec<DbscanRecord>,
}

fn run_model(ctx: &mut RunContext<'_>, kind: ModelKind, seed: u64) -> Result<ModelReport> {
    let dir = ctx.run_dir.join(kind.name());
    artifacts::create_dir(&dir)?;
    let spec = kind.spec();
    let windows = &ctx.cohort.windows;
    let plan = ctx.plan;
    let results = autoencoder::train_folds(&spec, windows, plan, &ctx.cfg.train(seed))?;

    let mut curve = csv::Writer::from_path(dir.join("loss_curve.csv"))?;
    curve.write_record(["fold", "epoch", "val_mae"])?;
    let mut latent_rows = Vec::new();
    let test_windows: Vec<Window> = plan.test.iter().map(|&i| windows[i].clone()).collect();
    let mut test_latents = Vec::with_capacity(results.len());
    for r in &results {
        Checkpoint::new(&spec, &r.params, r.init_seed, Some(&r.adam))
            .save(&dir.join(format!("fold-{}.ckpt.json", r.fold)))?;
        curve.write_record([r.fold.to_string(), "0".into(), artifacts::fmt_f64(r.initial_val_mae)])?;
        for (e, v) in r.val_curve.iter().enumerate() {
            curve.write_record([r.fold.to_string(), (e + 1).to_string(), artifacts::fmt_f64(*v)])?;
        }
        latent_rows.extend(r.val_indices.iter().zip(&r.latents).map(|(&i, z)| (i, *z, r.fold)));
        test_latents.push(autoencoder::encode(&spec, &r.params, &test_windows)?);
    }
    curve.flush().map_err(|e| Error::io(dir.join("loss_curve.csv"), e))?;
    latent_rows.sort_by_key(|r| r.0);
    artifacts::write_latents(&dir.join("latents.csv"), &latent_rows)?;
    let test_rows: Vec<(usize, usize, Point2)> = test_latents
        .iter()
        .enumerate()
        .flat_map(|(f, zs)| plan.test.iter().zip(zs).map(move |(&i, z)| (i, f, *z)))
        .collect();
    artifacts::write_test_latents(&dir.join("test_latents.csv"), &test_rows)?;

    let mut fold_labels = Vec::with_capacity(results.len());
    let mut summaries = Vec::with_capacity(results.len());
    for r in &results {
        let min_pts = ctx.cfg.min_pts;
        let eps = select_eps(&r.latents, min_pts, ctx.cfg.eps)?;
        let d = dbscan(&r.latents, eps, min_pts)?;
        ctx.dbscan_log.push(DbscanRecord {
            model: kind,
            fold: r.fold,
            eps,
            min_pts,
            n_clusters: d.n_clusters,
        });
        if d.n_clusters != 2 {
            let sweep = eps_grid(&r.latents, min_pts)
                .map(|g| eps_sweep(&r.latents, min_pts, &g))
                .unwrap_or_else(|e| e.to_string());
            return Err(Error::ClusterCount {
                found: d.n_clusters,
                sweep: format!("fold {}, chosen eps {eps}: {sweep}", r.fold),
            });
        }
        summaries.push(FoldSummary {
            fold: r.fold,
            init_seed: r.init_seed,
            initial_val_mae: r.initial_val_mae,
            final_train_mae: r.final_train_mae,
            final_val_mae: r.final_val_mae,
            eps,
            min_pts,
            cluster_sizes: d.cluster_sizes(),
            noise: d.noise_count(),
        });
        fold_labels.push(d.labels);
    }

    let mut cluster_rows: Vec<(usize, usize, Label)> = results
        .iter()
        .zip(&fold_labels)
        .flat_map(|(r, ls)| r.val_indices.iter().zip(ls).map(|(&i, &l)| (i, r.fold, l)))
        .collect();
    cluster_rows.sort_by_key(|r| r.0);
    artifacts::write_clusters(&dir.join("clusters.csv"), &cluster_rows)?;

    // KNN per fold on that fold's validation latents, then a majority vote.
    let n_test = plan.test.len();
    let mut votes = vec![Vec::with_capacity(results.len()); n_test];
    let mut agree = 0usize;
    for ((r, labels), zs) in results.iter().zip(&fold_labels).zip(&test_latents) {
        let knn = knn_fit(&r.latents, labels, ctx.cfg.knn_k)?;
        let cents = centroids(&r.latents, labels);
        for (t, z) in zs.iter().enumerate() {
            let pred = knn.predict_one(z);
            let nearest = usize::from(sq_dist(z, &cents[1]) < sq_dist(z, &cents[0]));
            agree += usize::from(pred == nearest);
            votes[t].push(pred);
        }
    }
    let test_labels: Vec<usize> = votes
        .iter()
        .map(|v| usize::from(2 * v.iter().filter(|&&p| p == 1).count() > v.len()))
        .collect();
    let mut tl = csv::Writer::from_path(dir.join("test_labels.csv"))?;
    let mut header = vec!["window_id".to_string()];
    header.extend((0..results.len()).map(|f| format!("fold{f}")));
    header.push("cluster".into());
    tl.write_record(&header)?;
    for ((&i, v), l) in plan.test.iter().zip(&votes).zip(&test_labels) {
        let mut row = vec![i.to_string()];
        row.extend(v.iter().map(|p| p.to_string()));
        row.push(l.to_string());
        tl.write_record(&row)?;
    }
    tl.flush().map_err(|e| Error::io(dir.join("test_labels.csv"), e))?;

    let mut marker_rows: Vec<MarkerRow> = cluster_rows
        .iter()
        .map(|&(i, fold, label)| MarkerRow {
            window_id: i,
            set: "validation".into(),
            fold: Some(fold),
            label,
            markers: ctx.markers[i],
        })
        .collect();
    marker_rows.extend(plan.test.iter().zip(&test_labels).map(|(&i, &c)| MarkerRow {
        window_id: i,
        set: "test".into(),
        fold: None,
        label: Label::Cluster(c),
        markers: ctx.markers[i],
    }));
    artifacts::write_markers(&dir.join("markers.csv"), &marker_rows)?;

    let (validation, test) = reports_from_rows(&marker_rows, ctx.cfg.significance)?;
    let (test, test_note) = match test {
        Ok(t) => (Some(t), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let mut fig = vec![("validation", &validation)];
    if let Some(t) = &test {
        fig.push(("test", t));
    }
    artifacts::write_figure_data(&dir.join("figure6_data.csv"), &fig)?;

    Ok(ModelReport {
        model: kind,
        param_count: count_params(&spec),
        folds: summaries,
        validation,
        test,
        test_note,
        knn_centroid_agreement: agree as f64 / (n_test * results.len()).max(1) as f64,
    })
}

/// Validation and test reports from exported marker rows.
pub fn reports_from_rows(
    rows: &[MarkerRow],
    significance: f64,
) -> Result<(ClusterReport, Result<ClusterReport>)> {
    let pick = |set: &str| -> (Vec<MarkerSet>, Vec<Label>) {
        rows.iter().filter(|r| r.set == set).map(|r| (r.markers, r.label)).unzip()
    };
    let (vm, vl) = pick("validation");
    let (tm, tl) = pick("test");
    Ok((
        build_report(&vm, &vl, significance)?,
        build_report(&tm, &tl, significance),
    ))
}

fn stage_seeds(cfg: &RunConfig) -> BTreeMap<String, u64> {
    let mut names = vec!["split".to_string(), "kmeans".to_string()];
    names.extend(cfg.model.models().iter().map(|m| format!("train/{}", m.name())));
    names
        .into_iter()
        .map(|n| {
            let s = derive_seed(cfg.seed, &n);
            (n, s)
        })
        .collect()
}

/// Runs the whole pipeline. The manifest is written even when a stage fails.
pub fn cmd_run(resolved: &ResolvedConfig) -> Result<RunOutcome> {
    let cfg = &resolved.config;
    cfg.validate()?;
    let run_dir = cfg.run_dir();
    artifacts::create_dir(&run_dir)?;
    let seeds = stage_seeds(cfg);
    let mut manifest = RunManifest {
        tool_version: TOOL_VERSION.to_string(),
        status: "running".into(),
        error: None,
        seed: cfg.seed,
        config: cfg.clone(),
        config_sources: resolved.sources.clone(),
        stage_seeds: seeds.clone(),
        inputs: Vec::new(),
        param_counts: ParamCounts::realized(),
        dbscan: Vec::new(),
        timings: Vec::new(),
    };
    let mut timer = Timer(Vec::new());
    let result = run_stages(cfg, &run_dir, &seeds, &mut timer, &mut manifest);
    manifest.timings = timer.0;
    match &result {
        Ok(_) => manifest.status = "ok".into(),
        Err(e) => {
            manifest.status = "failed".into();
            manifest.error = Some(e.to_string());
        }
    }
    artifacts::write_json(&run_dir.join("manifest.json"), &manifest)?;
    let report = result?;
    Ok(RunOutcome {
        run_dir,
        report,
        manifest,
    })
}

fn run_stages(
    cfg: &RunConfig,
    run_dir: &Path,
    seeds: &BTreeMap<String, u64>,
    timer: &mut Timer,
    manifest: &mut RunManifest,
) -> Result<RunReport> {
    let cohort = timer.stage("ingest", || load_cohort(&cfg.input, cfg))?;
    manifest.inputs = cohort.inputs.clone();

    let features = timer.stage("features", || {
        let f = extract_features(&cohort.windows, cfg)?;
        artifacts::write_features(&run_dir.join("features.csv"), &cohort.ids, &f)?;
        Ok(f)
    })?;
    let markers: Vec<MarkerSet> = features.iter().map(FeatureVector::markers).collect();

    let plan = timer.stage("split", || {
        let plan = make_split(cohort.windows.len(), seeds["split"])?;
        artifacts::write_json(&run_dir.join("split.json"), &plan)?;
        Ok(plan)
    })?;

    let kmeans_summary = timer.stage("kmeans", || {
        let km = kmeans(
            &kmeans_points(&features),
            &KmeansConfig {
                k: 2,
                n_init: cfg.kmeans_n_init,
                seed: seeds["kmeans"],
                ..KmeansConfig::default()
            },
        )?;
        let mut w = csv::Writer::from_path(run_dir.join("kmeans.csv"))?;
        w.write_record(["window_id", "cluster"])?;
        for (i, a) in km.assignments.iter().enumerate() {
            w.write_record([i.to_string(), a.to_string()])?;
        }
        w.flush().map_err(|e| Error::io(run_dir.join("kmeans.csv"), e))?;
        let mut sizes = vec![0; km.centroids.len()];
        for &a in &km.assignments {
            sizes[a] += 1;
        }
        let summary = KmeansSummary {
            cluster_sizes: sizes,
            inertia: km.inertia,
            iterations: km.iterations,
            centroids: km.centroids,
        };
        artifacts::write_json(&run_dir.join("kmeans.json"), &summary)?;
        Ok(summary)
    })?;

    let mut ctx = RunContext {
        cfg,
        run_dir,
        cohort: &cohort,
        plan: &plan,
        markers: &markers,
        dbscan_log: Vec::new(),
    };
    let mut models = Vec::new();
    for kind in cfg.model.models() {
        let seed = seeds[&format!("train/{}", kind.name())];
        let out = timer.stage(kind.name(), || run_model(&mut ctx, kind, seed));
        manifest.dbscan = ctx.dbscan_log.clone();
        models.push(out?);
    }

    let report = RunReport {
        seed: cfg.seed,
        n_subjects: cohort.inputs.len(),
        n_windows: cohort.windows.len(),
        n_test: plan.test.len(),
        param_counts: ParamCounts::realized(),
        kmeans: kmeans_summary,
        models,
    };
    artifacts::write_json(&run_dir.join("report.json"), &report)?;
    Ok(report)
}

/// `features`: one CSV row per window of the cohort.
pub fn cmd_features(cohort_dir: &Path, out_csv: &Path, cfg: &RunConfig) -> Result<usize> {
    let cohort = load_cohort(cohort_dir, cfg).map_err(|e| e.in_stage("ingest"))?;
    let f = extract_features(&cohort.windows, cfg).map_err(|e| e.in_stage("features"))?;
    artifacts::write_features(out_csv, &cohort.ids, &f)?;
    Ok(f.len())
}

/// `encode`: latent point of every window of the cohort under a checkpoint.
pub fn cmd_encode(checkpoint: &Path, cohort_dir: &Path, out_csv: &Path, cfg: &RunConfig) -> Result<usize> {
    let ckpt = Checkpoint::read(checkpoint)?;
    let kind: ModelKind = ckpt.spec.name.parse()?;
    let (_, params) = Checkpoint::load(checkpoint, &kind.spec())?;
    let cohort = load_cohort(cohort_dir, cfg).map_err(|e| e.in_stage("ingest"))?;
    let z = autoencoder::encode(&kind.spec(), &params, &cohort.windows)?;
    let mut w = csv::Writer::from_path(out_csv)?;
    w.write_record(["window_id", "subject_id", "window_index", "z1", "z2"])?;
    for (i, (id, p)) in cohort.ids.iter().zip(&z).enumerate() {
        w.write_record([
            i.to_string(),
            id.subject_id.clone(),
            id.window_index.to_string(),
            artifacts::fmt_f64(p[0]),
            artifacts::fmt_f64(p[1]),
        ])?;
    }
    w.flush().map_err(|e| Error::io(out_csv, e))?;
    Ok(z.len())
}

/// Reports recomputed from a finished run's `markers.csv` files.
#[derive(Debug, Clone)]
pub struct RebuiltReport {
    pub model: ModelKind,
    pub validation: ClusterReport,
    pub test: Option<ClusterReport>,
}

/// `report`: rebuilds the marker statistics of every model in `run_dir`.
pub fn cmd_report(run_dir: &Path, significance: f64) -> Result<Vec<RebuiltReport>> {
    let mut out = Vec::new();
    for kind in [ModelKind::Cae, ModelKind::Lae] {
        let path = run_dir.join(kind.name()).join("markers.csv");
        if !path.is_file() {
            continue;
        }
        let rows = artifacts::read_markers(&path)?;
        let (validation, test) = reports_from_rows(&rows, significance)?;
        out.push(RebuiltReport {
            model: kind,
            validation,
            test: test.ok(),
        });
    }
    if out.is_empty() {
        return Err(Error::InsufficientData(format!(
            "no <model>/markers.csv under {}",
            run_dir.display()
        )));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthRequest {
    pub out: PathBuf,
    pub subjects: usize,
    pub stressed_frac: f64,
    pub beats: usize,
    pub seed: u64,
}

/// `synth`: writes `<subject>.rri` files plus `labels.csv` (subject_id, regime).
pub fn cmd_synth(req: &SynthRequest) -> Result<Vec<LabeledSubject>> {
    let cohort = synth_mixed(req.subjects, req.stressed_frac, req.beats, req.seed)?;
    artifacts::create_dir(&req.out)?;
    for s in &cohort {
        let path = req.out.join(format!("{}.rri", s.series.subject_id));
        let mut text = String::with_capacity(s.series.intervals.len() * 20);
        for v in &s.series.intervals {
            text.push_str(&artifacts::fmt_f64(*v));
            text.push('\n');
        }
        fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    }
    let path = req.out.join("labels.csv");
    let mut w = csv::Writer::from_path(&path)?;
    w.write_record(["subject_id", "regime"])?;
    for s in &cohort {
        w.write_record([s.series.subject_id.clone(), s.regime.to_string()])?;
    }
    w.flush().map_err(|e| Error::io(&path, e))?;
    Ok(cohort)
}
