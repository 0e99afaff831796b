//! Helpers shared by the end-to-end tests: synthesize a cohort, run the
//! pipeline on it and read the artifacts back.

use std::collections::HashMap;
use std::path::Path;

use hrvae_core::pipeline::{self, cmd_run, cmd_synth, resolve, RunOutcome, SynthRequest};
use hrvae_core::synth::Regime;

pub fn synth(dir: &Path, subjects: usize, stressed_frac: f64, beats: usize, seed: u64) {
    cmd_synth(&SynthRequest {
        out: dir.to_path_buf(),
        subjects,
        stressed_frac,
        beats,
        seed,
    })
    .unwrap();
}

pub fn run(input: &Path, out: &Path, settings: &[(&str, &str)]) -> hrvae_core::Result<RunOutcome> {
    let mut overrides = vec![
        ("input".to_string(), input.display().to_string()),
        ("out".to_string(), out.display().to_string()),
    ];
    overrides.extend(settings.iter().map(|(k, v)| (k.to_string(), v.to_string())));
    cmd_run(&resolve(None, &overrides)?)
}

/// Rows of a CSV file keyed by header name.
pub fn read_csv(path: &Path) -> Vec<HashMap<String, String>> {
    let mut r = csv::Reader::from_path(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    let headers = r.headers().unwrap().clone();
    r.records()
        .map(|rec| {
            let rec = rec.unwrap();
            headers.iter().map(String::from).zip(rec.iter().map(String::from)).collect()
        })
        .collect()
}

pub fn num<T: std::str::FromStr>(row: &HashMap<String, String>, key: &str) -> T
where
    T::Err: std::fmt::Debug,
{
    row[key].parse().unwrap_or_else(|e| panic!("column {key}: {e:?}"))
}

/// Ground-truth regime of every window, indexed like the run's window ids.
pub fn window_truth(input: &Path, run_dir: &Path) -> Vec<Regime> {
    let labels: HashMap<String, Regime> = read_csv(&input.join("labels.csv"))
        .iter()
        .map(|r| (r["subject_id"].clone(), r["regime"].parse().unwrap()))
        .collect();
    read_csv(&run_dir.join("features.csv"))
        .iter()
        .map(|r| labels[&r["subject_id"]])
        .collect()
}

/// (window_id, fold, z) from a latents or test_latents file.
pub fn latents(path: &Path) -> Vec<(usize, usize, [f64; 2])> {
    read_csv(path)
        .iter()
        .map(|r| (num(r, "window_id"), num(r, "fold"), [num(r, "z1"), num(r, "z2")]))
        .collect()
}

/// (window_id, fold, cluster or None for noise) from clusters.csv.
pub fn clusters(path: &Path) -> Vec<(usize, usize, Option<usize>)> {
    read_csv(path)
        .iter()
        .map(|r| {
            let c = &r["cluster"];
            (num(r, "window_id"), num(r, "fold"), if c.is_empty() { None } else { Some(c.parse().unwrap()) })
        })
        .collect()
}

pub fn manifest(run_dir: &Path) -> pipeline::RunManifest {
    serde_json::from_str(&std::fs::read_to_string(run_dir.join("manifest.json")).unwrap()).unwrap()
}
