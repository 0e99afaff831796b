//! Marker statistics per cluster, Welch t-tests and the stress labelling rule.

use std::fmt;

use serde::{Deserialize, Serialize};
use statrs::function::beta::beta_reg;

use crate::cluster::Label;
use crate::error::{Error, Result};
use crate::features::MarkerSet;

pub const DEFAULT_SIGNIFICANCE: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Marker {
    #[serde(rename = "RMSSD")]
    Rmssd,
    #[serde(rename = "Max-HR")]
    MaxHr,
    #[serde(rename = "Mean-RR")]
    MeanRr,
    #[serde(rename = "LF-HF")]
    LfHf,
}

impl Marker {
    pub const ALL: [Marker; 4] = [Marker::Rmssd, Marker::MaxHr, Marker::MeanRr, Marker::LfHf];

    pub fn name(self) -> &'static str {
        match self {
            Marker::Rmssd => "RMSSD",
            Marker::MaxHr => "Max-HR",
            Marker::MeanRr => "Mean-RR",
            Marker::LfHf => "LF-HF",
        }
    }

    pub fn value(self, m: &MarkerSet) -> f64 {
        match self {
            Marker::Rmssd => m.rmssd,
            Marker::MaxHr => m.max_hr,
            Marker::MeanRr => m.mean_rr,
            Marker::LfHf => m.lf_hf,
        }
    }
}

impl fmt::Display for Marker {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TTestResult {
    pub t: f64,
    pub df: f64,
    pub p: f64,
}

fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

/// Two-sided Welch t-test with Welch-Satterthwaite degrees of freedom.
pub fn welch_ttest(a: &[f64], b: &[f64]) -> Result<TTestResult> {
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "t-test needs n >= 2 per sample, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("t-test sample".into()));
    }
    let (ma, va) = mean_var(a);
    let (mb, vb) = mean_var(b);
    let (sa, sb) = (va / a.len() as f64, vb / b.len() as f64);
    let se2 = sa + sb;
    if !(se2 > 0.0) {
        return Err(Error::DegenerateVariance(
            "both samples have zero variance".into(),
        ));
    }
    let t = (ma - mb) / se2.sqrt();
    let df = se2 * se2
        / (sa * sa / (a.len() as f64 - 1.0) + sb * sb / (b.len() as f64 - 1.0));
    // P(|T| > |t|) = I_{df/(df+t^2)}(df/2, 1/2)
    let p = if t == 0.0 {
        1.0
    } else {
        beta_reg(df / 2.0, 0.5, df / (df + t * t)).clamp(0.0, 1.0)
    };
    Ok(TTestResult { t, df, p })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    /// Sample standard deviation (0 when n < 2).
    pub sd: f64,
    pub n: usize,
    /// Values left out because they were infinite (LF/HF with no HF power).
    pub excluded: usize,
}

fn summarize(values: &[f64]) -> (Summary, Vec<f64>) {
    let finite: Vec<f64> = values.iter().copied().filter(|v| v.is_finite()).collect();
    let n = finite.len();
    let (mean, sd) = match n {
        0 => (f64::NAN, f64::NAN),
        1 => (finite[0], 0.0),
        _ => {
            let (m, v) = mean_var(&finite);
            (m, v.sqrt())
        }
    };
    (
        Summary {
            mean,
            sd,
            n,
            excluded: values.len() - n,
        },
        finite,
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarkerComparison {
    pub marker: Marker,
    /// Indexed by cluster id.
    pub clusters: [Summary; 2],
    /// `None` when a cluster has fewer than two finite values or both have
    /// zero variance.
    pub test: Option<TTestResult>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Assignment {
    Stressed,
    Normal,
    Undetermined,
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Assignment::Stressed => "stressed",
            Assignment::Normal => "normal",
            Assignment::Undetermined => "undetermined",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterReport {
    pub n_windows: usize,
    pub cluster_sizes: [usize; 2],
    pub cluster_fractions: [f64; 2],
    pub noise_fraction: f64,
    pub significance: f64,
    pub markers: Vec<MarkerComparison>,
    pub assignment: [Assignment; 2],
    pub rationale: Vec<String>,
}

impl ClusterReport {
    pub fn marker(&self, m: Marker) -> Option<&MarkerComparison> {
        self.markers.iter().find(|c| c.marker == m)
    }

    pub fn stressed_cluster(&self) -> Option<usize> {
        self.assignment.iter().position(|a| *a == Assignment::Stressed)
    }
}

/// A cluster is stressed iff it has lower mean RMSSD and higher mean LF-HF
/// than the other, with both differences significant. Otherwise both are
/// undetermined.
pub fn label_stress(markers: &[MarkerComparison], significance: f64) -> ([Assignment; 2], Vec<String>) {
    let undetermined = [Assignment::Undetermined; 2];
    let find = |m: Marker| markers.iter().find(|c| c.marker == m);
    let (Some(rmssd), Some(lfhf)) = (find(Marker::Rmssd), find(Marker::LfHf)) else {
        return (undetermined, vec!["RMSSD or LF-HF statistics missing".into()]);
    };

    let mut rationale = Vec::new();
    let mut significant = true;
    for c in [rmssd, lfhf] {
        match c.test {
            Some(t) if t.p < significance => {
                rationale.push(format!("{}: p = {:.3e} < {significance}", c.marker, t.p))
            }
            Some(t) => {
                significant = false;
                rationale.push(format!("{}: p = {:.3e} not below {significance}", c.marker, t.p));
            }
            None => {
                significant = false;
                rationale.push(format!("{}: test unavailable", c.marker));
            }
        }
    }

    let low_rmssd = lowest(rmssd);
    let high_lfhf = lowest(lfhf).map(|c| 1 - c);
    match (low_rmssd, high_lfhf) {
        (Some(a), Some(b)) if a == b => {
            rationale.push(format!(
                "cluster {a} has lower RMSSD ({:.2} vs {:.2}) and higher LF-HF ({:.2} vs {:.2})",
                rmssd.clusters[a].mean,
                rmssd.clusters[1 - a].mean,
                lfhf.clusters[a].mean,
                lfhf.clusters[1 - a].mean
            ));
            if significant {
                let mut out = [Assignment::Normal; 2];
                out[a] = Assignment::Stressed;
                return (out, rationale);
            }
        }
        (Some(a), Some(b)) => rationale.push(format!(
            "directions conflict: cluster {a} has lower RMSSD but cluster {b} has higher LF-HF"
        )),
        _ => rationale.push("marker means tie or are undefined".into()),
    }
    (undetermined, rationale)
}

fn lowest(c: &MarkerComparison) -> Option<usize> {
    let [a, b] = c.clusters.map(|s| s.mean);
    if a < b {
        Some(0)
    } else if b < a {
        Some(1)
    } else {
        None
    }
}

/// Builds the full report for per-window markers and their cluster labels.
/// Noise windows count toward `noise_fraction` only.
pub fn build_report(markers: &[MarkerSet], labels: &[Label], significance: f64) -> Result<ClusterReport> {
    if markers.len() != labels.len() {
        return Err(Error::Validation(format!(
            "{} marker rows vs {} labels",
            markers.len(),
            labels.len()
        )));
    }
    let found = labels.iter().filter_map(|l| l.cluster()).max().map_or(0, |m| m + 1);
    let mut sizes = vec![0usize; found];
    for c in labels.iter().filter_map(|l| l.cluster()) {
        sizes[c] += 1;
    }
    if found != 2 || sizes.contains(&0) {
        return Err(Error::ClusterCount {
            found: sizes.iter().filter(|&&s| s > 0).count(),
            sweep: "not available at report stage".into(),
        });
    }
    let n = markers.len();
    let noise = labels.iter().filter(|l| l.is_noise()).count();

    let comparisons = Marker::ALL
        .iter()
        .map(|&m| {
            let per: Vec<(Summary, Vec<f64>)> = (0..2)
                .map(|c| {
                    let vals: Vec<f64> = markers
                        .iter()
                        .zip(labels)
                        .filter(|(_, l)| l.cluster() == Some(c))
                        .map(|(ms, _)| m.value(ms))
                        .collect();
                    summarize(&vals)
                })
                .collect();
            MarkerComparison {
                marker: m,
                clusters: [per[0].0, per[1].0],
                test: welch_ttest(&per[0].1, &per[1].1).ok(),
            }
        })
        .collect::<Vec<_>>();

    let (assignment, rationale) = label_stress(&comparisons, significance);
    Ok(ClusterReport {
        n_windows: n,
        cluster_sizes: [sizes[0], sizes[1]],
        cluster_fractions: [sizes[0] as f64 / n as f64, sizes[1] as f64 / n as f64],
        noise_fraction: noise as f64 / n as f64,
        significance,
        markers: comparisons,
        assignment,
        rationale,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    fn summary(mean: f64) -> Summary {
        Summary {
            mean,
            sd: 1.0,
            n: 10,
            excluded: 0,
        }
    }

    fn comparison(marker: Marker, means: [f64; 2], p: f64) -> MarkerComparison {
        MarkerComparison {
            marker,
            clusters: means.map(summary),
            test: Some(TTestResult { t: 5.0, df: 10.0, p }),
        }
    }

    #[test]
    fn identical_samples() {
        let a = [1.0, 2.0, 3.0, 4.0];
        let r = welch_ttest(&a, &a).unwrap();
        assert_eq!(r.t, 0.0);
        assert_eq!(r.p, 1.0);
    }

    #[test]
    fn symmetric_p() {
        let a = [1.0, 2.5, 3.0, 4.2, 0.3];
        let b = [2.0, 3.1, 5.0];
        let ab = welch_ttest(&a, &b).unwrap();
        let ba = welch_ttest(&b, &a).unwrap();
        assert!((ab.p - ba.p).abs() < 1e-15);
        assert!((ab.t + ba.t).abs() < 1e-15);
    }

    #[test]
    fn known_value() {
        // scipy.stats.ttest_ind([1,2,3,4], [3,4,5,6,7], equal_var=False): p = 0.0349388
        let r = welch_ttest(&[1.0, 2.0, 3.0, 4.0], &[3.0, 4.0, 5.0, 6.0, 7.0]).unwrap();
        let se2: f64 = (5.0 / 3.0) / 4.0 + 2.5 / 5.0;
        assert!((r.t - (-2.5 / se2.sqrt())).abs() < 1e-12);
        let df = se2 * se2 / ((5.0f64 / 12.0).powi(2) / 3.0 + 0.25 / 4.0);
        assert!((r.df - df).abs() < 1e-12);
        assert!((r.p - 0.034_938_782_359_964).abs() < 1e-12, "p = {}", r.p);
    }

    #[test]
    fn degenerate_and_small() {
        assert!(matches!(
            welch_ttest(&[1.0, 1.0], &[2.0, 2.0]),
            Err(Error::DegenerateVariance(_))
        ));
        assert!(welch_ttest(&[1.0], &[2.0, 3.0]).is_err());
    }

    #[test]
    fn clear_separation_is_significant() {
        let mut rng = SplitMix64::new(2);
        let a: Vec<f64> = (0..4).map(|_| rng.gaussian(0.0, 1e-3)).collect();
        let b: Vec<f64> = (0..4).map(|_| 1.0 + rng.gaussian(0.0, 1e-3)).collect();
        assert!(welch_ttest(&a, &b).unwrap().p < 1e-3);
    }

    #[test]
    fn rule_fires_on_consistent_directions() {
        let m = vec![
            comparison(Marker::Rmssd, [20.0, 60.0], 1e-5),
            comparison(Marker::LfHf, [4.0, 1.0], 1e-5),
        ];
        let (a, _) = label_stress(&m, 0.05);
        assert_eq!(a, [Assignment::Stressed, Assignment::Normal]);
    }

    #[test]
    fn rule_is_symmetric_under_swap() {
        let m = vec![
            comparison(Marker::Rmssd, [60.0, 20.0], 1e-5),
            comparison(Marker::LfHf, [1.0, 4.0], 1e-5),
        ];
        let (a, _) = label_stress(&m, 0.05);
        assert_eq!(a, [Assignment::Normal, Assignment::Stressed]);
    }

    #[test]
    fn rule_needs_significance() {
        let m = vec![
            comparison(Marker::Rmssd, [20.0, 60.0], 0.2),
            comparison(Marker::LfHf, [4.0, 1.0], 1e-5),
        ];
        assert_eq!(label_stress(&m, 0.05).0, [Assignment::Undetermined; 2]);
    }

    #[test]
    fn rule_rejects_conflicting_directions() {
        let m = vec![
            comparison(Marker::Rmssd, [20.0, 60.0], 1e-5),
            comparison(Marker::LfHf, [1.0, 4.0], 1e-5),
        ];
        let (a, why) = label_stress(&m, 0.05);
        assert_eq!(a, [Assignment::Undetermined; 2]);
        assert!(why.iter().any(|s| s.contains("conflict")));
    }

    fn marker_set(rmssd: f64, lf_hf: f64) -> MarkerSet {
        MarkerSet {
            rmssd,
            max_hr: 100.0,
            mean_rr: 700.0,
            lf_hf,
        }
    }

    #[test]
    fn report_bookkeeping() {
        let mut rng = SplitMix64::new(9);
        let mut ms = Vec::new();
        let mut ls = Vec::new();
        for i in 0..100 {
            let stressed = i % 10 != 0;
            let (r, l) = if stressed { (20.0, 4.0) } else { (60.0, 1.0) };
            ms.push(marker_set(r + rng.gaussian(0.0, 2.0), l + rng.gaussian(0.0, 0.2)));
            ls.push(Label::Cluster(usize::from(!stressed)));
        }
        ms.push(marker_set(10.0, f64::INFINITY));
        ls.push(Label::Cluster(0));
        ms.push(marker_set(10.0, 1.0));
        ls.push(Label::Noise);

        let rep = build_report(&ms, &ls, 0.05).unwrap();
        assert_eq!(rep.cluster_sizes, [91, 10]);
        let total = rep.cluster_fractions.iter().sum::<f64>() + rep.noise_fraction;
        assert!((total - 1.0).abs() < 1e-12);
        let lfhf = rep.marker(Marker::LfHf).unwrap();
        assert_eq!(lfhf.clusters[0].excluded, 1);
        assert_eq!(lfhf.clusters[0].n, 90);
        assert_eq!(rep.assignment, [Assignment::Stressed, Assignment::Normal]);
        assert_eq!(rep.stressed_cluster(), Some(0));
    }

    #[test]
    fn report_small_cluster_has_no_tests() {
        let ms = vec![marker_set(20.0, 4.0), marker_set(21.0, 4.5), marker_set(60.0, 1.0)];
        let ls = vec![Label::Cluster(0), Label::Cluster(0), Label::Cluster(1)];
        let rep = build_report(&ms, &ls, 0.05).unwrap();
        assert!(rep.markers.iter().all(|m| m.test.is_none()));
        assert_eq!(rep.assignment, [Assignment::Undetermined; 2]);
    }

    #[test]
    fn report_requires_two_clusters() {
        let ms = vec![marker_set(20.0, 4.0); 3];
        let ls = vec![Label::Cluster(0); 3];
        assert!(matches!(
            build_report(&ms, &ls, 0.05),
            Err(Error::ClusterCount { found: 1, .. })
        ));
    }
}
