//! CSV and JSON artifact writers and the readers `report` needs.

use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::analysis::{ClusterReport, Marker};
use crate::cluster::Label;
use crate::error::{Error, Result};
use crate::features::{FeatureVector, MarkerSet, FEATURE_NAMES};

/// Shortest round-trip decimal form (`inf` for infinity).
pub fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

fn label_field(l: Label) -> String {
    l.cluster().map(|c| c.to_string()).unwrap_or_default()
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|e| Error::io(path, e))
}

/// Row identity shared by every per-window CSV.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WindowId {
    pub subject_id: String,
    pub window_index: usize,
}

pub fn write_features(path: &Path, ids: &[WindowId], features: &[FeatureVector]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec!["subject_id", "window_index"];
    header.extend(FEATURE_NAMES);
    w.write_record(&header)?;
    for (id, f) in ids.iter().zip(features) {
        let mut row = vec![id.subject_id.clone(), id.window_index.to_string()];
        row.extend(f.values().iter().map(|&v| fmt_f64(v)));
        w.write_record(&row)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_latents(path: &Path, rows: &[(usize, [f64; 2], usize)]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["window_id", "z1", "z2", "fold"])?;
    for (id, z, fold) in rows {
        w.write_record([id.to_string(), fmt_f64(z[0]), fmt_f64(z[1]), fold.to_string()])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_test_latents(path: &Path, rows: &[(usize, usize, [f64; 2])]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["window_id", "fold", "z1", "z2"])?;
    for (id, fold, z) in rows {
        w.write_record([id.to_string(), fold.to_string(), fmt_f64(z[0]), fmt_f64(z[1])])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_clusters(path: &Path, rows: &[(usize, usize, Label)]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["window_id", "fold", "cluster", "is_noise"])?;
    for (id, fold, l) in rows {
        w.write_record([
            id.to_string(),
            fold.to_string(),
            label_field(*l),
            l.is_noise().to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// One marker row: which set the window belongs to, its fold (validation
/// only) and its cluster.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkerRow {
    pub window_id: usize,
    pub set: String,
    pub fold: Option<usize>,
    pub label: Label,
    pub markers: MarkerSet,
}

const MARKER_HEADER: [&str; 8] = [
    "window_id", "set", "fold", "cluster", "RMSSD", "Max-HR", "Mean-RR", "LF-HF",
];

pub fn write_markers(path: &Path, rows: &[MarkerRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(MARKER_HEADER)?;
    for r in rows {
        let mut rec = vec![
            r.window_id.to_string(),
            r.set.clone(),
            r.fold.map(|f| f.to_string()).unwrap_or_default(),
            label_field(r.label),
        ];
        rec.extend(Marker::ALL.iter().map(|m| fmt_f64(m.value(&r.markers))));
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

fn field<'a>(rec: &'a csv::StringRecord, i: usize, path: &Path) -> Result<&'a str> {
    rec.get(i).ok_or_else(|| {
        Error::Validation(format!("{}: row has no column {i}", path.display()))
    })
}

fn parse_field<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize, path: &Path) -> Result<T> {
    let s = field(rec, i, path)?;
    s.parse().map_err(|_| {
        Error::Validation(format!("{}: cannot parse `{s}` in column {i}", path.display()))
    })
}

pub fn read_markers(path: &Path) -> Result<Vec<MarkerRow>> {
    let mut r = csv::Reader::from_path(path)?;
    if r.headers()?.iter().ne(MARKER_HEADER) {
        return Err(Error::Validation(format!(
            "{}: unexpected header",
            path.display()
        )));
    }
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let fold = field(&rec, 2, path)?;
        let cluster = field(&rec, 3, path)?;
        rows.push(MarkerRow {
            window_id: parse_field(&rec, 0, path)?,
            set: field(&rec, 1, path)?.to_string(),
            fold: if fold.is_empty() {
                None
            } else {
                Some(parse_field(&rec, 2, path)?)
            },
            label: if cluster.is_empty() {
                Label::Noise
            } else {
                Label::Cluster(parse_field(&rec, 3, path)?)
            },
            markers: MarkerSet {
                rmssd: parse_field(&rec, 4, path)?,
                max_hr: parse_field(&rec, 5, path)?,
                mean_rr: parse_field(&rec, 6, path)?,
                lf_hf: parse_field(&rec, 7, path)?,
            },
        });
    }
    Ok(rows)
}

/// Per-cluster means, error bars and p-values behind a marker bar plot.
pub fn write_figure_data(path: &Path, reports: &[(&str, &ClusterReport)]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["set", "marker", "cluster", "mean", "sd", "n", "excluded", "t", "df", "p"])?;
    for (set, rep) in reports {
        for m in &rep.markers {
            for (c, s) in m.clusters.iter().enumerate() {
                let (t, df, p) = match m.test {
                    Some(t) => (fmt_f64(t.t), fmt_f64(t.df), fmt_f64(t.p)),
                    None => Default::default(),
                };
                w.write_record([
                    set.to_string(),
                    m.marker.name().to_string(),
                    c.to_string(),
                    fmt_f64(s.mean),
                    fmt_f64(s.sd),
                    s.n.to_string(),
                    s.excluded.to_string(),
                    t,
                    df,
                    p,
                ])?;
            }
        }
    }
    w.flush().map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn markers_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.csv");
        let rows = vec![
            MarkerRow {
                window_id: 3,
                set: "validation".into(),
                fold: Some(2),
                label: Label::Cluster(1),
                markers: MarkerSet {
                    rmssd: 12.345678901234,
                    max_hr: 97.1,
                    mean_rr: 650.0,
                    lf_hf: f64::INFINITY,
                },
            },
            MarkerRow {
                window_id: 9,
                set: "test".into(),
                fold: None,
                label: Label::Noise,
                markers: MarkerSet {
                    rmssd: 0.1,
                    max_hr: 1.0 / 3.0,
                    mean_rr: 2.0,
                    lf_hf: 0.5,
                },
            },
        ];
        write_markers(&path, &rows).unwrap();
        assert_eq!(read_markers(&path).unwrap(), rows);
    }
}
