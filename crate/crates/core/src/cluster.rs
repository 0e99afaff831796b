//! K-means on engineered features, DBSCAN on latent points, KNN labelling.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::SplitMix64;

pub type Point2 = [f64; 2];

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum()
}

/// Z-scores every column; zero-variance columns become 0.
pub fn standardize(points: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let Some(first) = points.first() else {
        return Vec::new();
    };
    let n = points.len() as f64;
    let d = first.len();
    let mut mean = vec![0.0; d];
    for p in points {
        for (m, v) in mean.iter_mut().zip(p) {
            *m += v / n;
        }
    }
    let mut sd = vec![0.0; d];
    for p in points {
        for ((s, v), m) in sd.iter_mut().zip(p).zip(&mean) {
            *s += (v - m).powi(2) / n;
        }
    }
    for s in &mut sd {
        *s = s.sqrt();
    }
    points
        .iter()
        .map(|p| {
            p.iter()
                .zip(&mean)
                .zip(&sd)
                .map(|((v, m), s)| if *s > 0.0 { (v - m) / s } else { 0.0 })
                .collect()
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KmeansConfig {
    pub k: usize,
    pub max_iter: usize,
    /// Independent seedings; the lowest-inertia run is kept.
    pub n_init: usize,
    pub seed: u64,
}

impl Default for KmeansConfig {
    fn default() -> Self {
        Self {
            k: 2,
            max_iter: 300,
            n_init: 10,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KmeansModel {
    pub centroids: Vec<Vec<f64>>,
    pub assignments: Vec<usize>,
    pub inertia: f64,
    pub iterations: usize,
    /// Inertia after every assignment step of the kept run.
    pub inertia_history: Vec<f64>,
}

fn nearest(centroids: &[Vec<f64>], p: &[f64]) -> (usize, f64) {
    centroids
        .iter()
        .enumerate()
        .map(|(j, c)| (j, sq_dist(c, p)))
        .fold((0, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best })
}

fn kmeans_pp(points: &[Vec<f64>], k: usize, rng: &mut SplitMix64) -> Vec<Vec<f64>> {
    let mut centroids = vec![points[rng.below(points.len() as u64) as usize].clone()];
    let mut d2: Vec<f64> = points.iter().map(|p| sq_dist(p, &centroids[0])).collect();
    while centroids.len() < k {
        let total: f64 = d2.iter().sum();
        let next = if total > 0.0 {
            let mut target = rng.next_f64() * total;
            let mut pick = points.len() - 1;
            for (i, &d) in d2.iter().enumerate() {
                if target < d {
                    pick = i;
                    break;
                }
                target -= d;
            }
            pick
        } else {
            rng.below(points.len() as u64) as usize
        };
        centroids.push(points[next].clone());
        for (d, p) in d2.iter_mut().zip(points) {
            *d = d.min(sq_dist(p, centroids.last().unwrap()));
        }
    }
    centroids
}

fn lloyd(points: &[Vec<f64>], mut centroids: Vec<Vec<f64>>, max_iter: usize) -> KmeansModel {
    let k = centroids.len();
    let dim = points[0].len();
    let mut assignments = vec![usize::MAX; points.len()];
    let mut history = Vec::new();
    let mut iterations = 0;

    loop {
        let mut changed = false;
        let mut inertia = 0.0;
        for (a, p) in assignments.iter_mut().zip(points) {
            let (j, d) = nearest(&centroids, p);
            inertia += d;
            if *a != j {
                *a = j;
                changed = true;
            }
        }
        history.push(inertia);
        if !changed || iterations >= max_iter {
            return KmeansModel {
                centroids,
                assignments,
                inertia,
                iterations,
                inertia_history: history,
            };
        }
        iterations += 1;

        let mut sums = vec![vec![0.0; dim]; k];
        let mut counts = vec![0usize; k];
        for (&a, p) in assignments.iter().zip(points) {
            counts[a] += 1;
            for (s, v) in sums[a].iter_mut().zip(p) {
                *s += v;
            }
        }
        for j in 0..k {
            if counts[j] > 0 {
                centroids[j] = sums[j].iter().map(|s| s / counts[j] as f64).collect();
            } else {
                // Empty cluster: move it to the point farthest from its centroid.
                let far = points
                    .iter()
                    .zip(&assignments)
                    .map(|(p, &a)| sq_dist(p, &centroids[a]))
                    .enumerate()
                    .fold((0, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best })
                    .0;
                centroids[j] = points[far].clone();
            }
        }
    }
}

/// Lloyd's algorithm with k-means++ seeding. Points should already be
/// standardized (see [`standardize`]).
pub fn kmeans(points: &[Vec<f64>], cfg: &KmeansConfig) -> Result<KmeansModel> {
    if cfg.k == 0 || points.len() < cfg.k {
        return Err(Error::InsufficientData(format!(
            "{} points for k = {}",
            points.len(),
            cfg.k
        )));
    }
    let dim = points[0].len();
    if points.iter().any(|p| p.len() != dim || p.iter().any(|v| !v.is_finite())) {
        return Err(Error::Validation(
            "k-means points must be finite and equally sized".into(),
        ));
    }
    let mut rng = SplitMix64::new(cfg.seed);
    let mut best: Option<KmeansModel> = None;
    for _ in 0..cfg.n_init.max(1) {
        let init = kmeans_pp(points, cfg.k, &mut rng);
        let model = lloyd(points, init, cfg.max_iter);
        if best.as_ref().is_none_or(|b| model.inertia < b.inertia) {
            best = Some(model);
        }
    }
    Ok(best.expect("at least one initialization"))
}

/// Cluster membership of one DBSCAN point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Label {
    Cluster(usize),
    Noise,
}

impl Label {
    pub fn cluster(self) -> Option<usize> {
        match self {
            Label::Cluster(c) => Some(c),
            Label::Noise => None,
        }
    }

    pub fn is_noise(self) -> bool {
        self == Label::Noise
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DbscanResult {
    pub labels: Vec<Label>,
    pub eps: f64,
    pub min_pts: usize,
    pub n_clusters: usize,
}

impl DbscanResult {
    pub fn cluster_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.n_clusters];
        for c in self.labels.iter().filter_map(|l| l.cluster()) {
            sizes[c] += 1;
        }
        sizes
    }

    pub fn noise_count(&self) -> usize {
        self.labels.iter().filter(|l| l.is_noise()).count()
    }
}

/// Indices within `eps` of point `i`, itself included.
fn region(points: &[Point2], i: usize, eps2: f64) -> Vec<usize> {
    points
        .iter()
        .enumerate()
        .filter(|(_, q)| sq_dist(&points[i], *q) <= eps2)
        .map(|(j, _)| j)
        .collect()
}

/// Classic DBSCAN. A point is core when at least `min_pts` points (itself
/// included) lie within `eps`. Clusters are grown from unvisited core points
/// in index order, then renumbered by decreasing size (ties keep discovery
/// order), so cluster 0 is the largest.
pub fn dbscan(points: &[Point2], eps: f64, min_pts: usize) -> Result<DbscanResult> {
    if !(eps > 0.0) {
        return Err(Error::Validation(format!("eps must be positive, got {eps}")));
    }
    if min_pts < 2 {
        return Err(Error::Validation(format!("min_pts must be >= 2, got {min_pts}")));
    }
    let eps2 = eps * eps;
    let n = points.len();
    let mut labels: Vec<Option<Label>> = vec![None; n];
    let mut n_clusters = 0;

    for i in 0..n {
        if labels[i].is_some() {
            continue;
        }
        let neighbors = region(points, i, eps2);
        if neighbors.len() < min_pts {
            labels[i] = Some(Label::Noise);
            continue;
        }
        let c = n_clusters;
        n_clusters += 1;
        labels[i] = Some(Label::Cluster(c));
        let mut queue: std::collections::VecDeque<usize> = neighbors.into();
        while let Some(j) = queue.pop_front() {
            match labels[j] {
                Some(Label::Noise) => labels[j] = Some(Label::Cluster(c)),
                None => {
                    labels[j] = Some(Label::Cluster(c));
                    let nj = region(points, j, eps2);
                    if nj.len() >= min_pts {
                        queue.extend(nj);
                    }
                }
                Some(Label::Cluster(_)) => {}
            }
        }
    }

    let raw: Vec<Label> = labels.into_iter().map(|l| l.expect("every point visited")).collect();
    let mut sizes = vec![0usize; n_clusters];
    for c in raw.iter().filter_map(|l| l.cluster()) {
        sizes[c] += 1;
    }
    let mut order: Vec<usize> = (0..n_clusters).collect();
    order.sort_by(|&a, &b| sizes[b].cmp(&sizes[a]).then(a.cmp(&b)));
    let mut remap = vec![0; n_clusters];
    for (new, &old) in order.iter().enumerate() {
        remap[old] = new;
    }
    let labels = raw
        .into_iter()
        .map(|l| match l {
            Label::Cluster(c) => Label::Cluster(remap[c]),
            Label::Noise => Label::Noise,
        })
        .collect();

    Ok(DbscanResult {
        labels,
        eps,
        min_pts,
        n_clusters,
    })
}

/// Sorted (ascending) distance from every point to its `k`-th nearest point,
/// counting the point itself as the first.
pub fn k_distances(points: &[Point2], k: usize) -> Vec<f64> {
    let mut out: Vec<f64> = points
        .iter()
        .map(|p| {
            let mut d: Vec<f64> = points.iter().map(|q| sq_dist(p, q)).collect();
            d.sort_by(f64::total_cmp);
            d[(k.max(1) - 1).min(d.len() - 1)].sqrt()
        })
        .collect();
    out.sort_by(f64::total_cmp);
    out
}

/// Knee of the sorted k-distance curve: the point farthest from the chord
/// joining its first and last values.
pub fn knee_eps(points: &[Point2], min_pts: usize) -> Result<f64> {
    if points.len() < 3 {
        return Err(Error::InsufficientData(
            "k-distance knee needs at least 3 points".into(),
        ));
    }
    let d = k_distances(points, min_pts);
    let n = d.len();
    let (x0, y0, x1, y1) = (0.0, d[0], (n - 1) as f64, d[n - 1]);
    let (dx, dy) = (x1 - x0, y1 - y0);
    let norm = (dx * dx + dy * dy).sqrt();
    let mut best = (0, f64::NEG_INFINITY);
    for (i, &y) in d.iter().enumerate() {
        let dist = if norm > 0.0 {
            (dy * (i as f64 - x0) - dx * (y - y0)).abs() / norm
        } else {
            0.0
        };
        if dist > best.1 {
            best = (i, dist);
        }
    }
    let eps = d[best.0];
    if eps > 0.0 {
        Ok(eps)
    } else {
        // Coincident points: fall back to the smallest positive k-distance.
        d.iter()
            .copied()
            .find(|&v| v > 0.0)
            .ok_or_else(|| Error::DegenerateVariance("all latent points coincide".into()))
    }
}

/// Number of geometrically spaced eps values scanned by [`stable_eps`].
pub const EPS_GRID: usize = 64;

/// Geometric eps grid from the smallest positive `min_pts`-distance up to the
/// diameter of the point set.
pub fn eps_grid(points: &[Point2], min_pts: usize) -> Result<Vec<f64>> {
    let kd = k_distances(points, min_pts);
    let lo = kd.iter().copied().find(|&v| v > 0.0);
    let hi = points
        .iter()
        .flat_map(|p| points.iter().map(move |q| sq_dist(p, q)))
        .fold(0.0, f64::max)
        .sqrt();
    match lo {
        Some(lo) if hi > lo => {
            let ratio = (hi / lo).ln() / (EPS_GRID - 1) as f64;
            Ok((0..EPS_GRID).map(|i| lo * (ratio * i as f64).exp()).collect())
        }
        _ => Err(Error::DegenerateVariance(
            "latent points have no spread to scan eps over".into(),
        )),
    }
}

/// Picks eps from the longest run of consecutive [`eps_grid`] values that give
/// the same number of clusters, ignoring runs with fewer than two clusters.
/// Returns the geometric midpoint of that run. Unlike the k-distance knee this
/// does not lock onto the densest cluster when densities differ a lot.
pub fn stable_eps(points: &[Point2], min_pts: usize) -> Result<f64> {
    let grid = eps_grid(points, min_pts)?;
    let counts = grid
        .iter()
        .map(|&e| dbscan(points, e, min_pts).map(|r| r.n_clusters))
        .collect::<Result<Vec<_>>>()?;
    let mut best: Option<(usize, usize)> = None;
    let mut start = 0;
    for i in 1..=counts.len() {
        if i == counts.len() || counts[i] != counts[start] {
            let len = i - start;
            if counts[start] >= 2 && best.is_none_or(|(s, e)| len > e - s) {
                best = Some((start, i));
            }
            start = i;
        }
    }
    let (s, e) = best.ok_or_else(|| Error::ClusterCount {
        found: counts.iter().copied().max().unwrap_or(0),
        sweep: eps_sweep(points, min_pts, &grid),
    })?;
    Ok((grid[s] * grid[e - 1]).sqrt())
}

/// How DBSCAN's eps is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
#[derive(Default)]
pub enum EpsRule {
    /// Knee of the sorted k-distance curve.
    Knee,
    /// Most persistent multi-cluster eps, see [`stable_eps`].
    #[default]
    Stable,
    Fixed(f64),
}


impl fmt::Display for EpsRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EpsRule::Knee => f.write_str("knee"),
            EpsRule::Stable => f.write_str("stable"),
            EpsRule::Fixed(e) => write!(f, "{e}"),
        }
    }
}

impl FromStr for EpsRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "knee" => Ok(EpsRule::Knee),
            "stable" => Ok(EpsRule::Stable),
            _ => match s.parse::<f64>() {
                Ok(e) if e > 0.0 && e.is_finite() => Ok(EpsRule::Fixed(e)),
                _ => Err(Error::Config(format!(
                    "eps must be `knee`, `stable` or a positive number, got `{s}`"
                ))),
            },
        }
    }
}

pub fn select_eps(points: &[Point2], min_pts: usize, rule: EpsRule) -> Result<f64> {
    match rule {
        EpsRule::Knee => knee_eps(points, min_pts),
        EpsRule::Stable => stable_eps(points, min_pts),
        EpsRule::Fixed(e) => Ok(e),
    }
}

/// Cluster counts for a range of eps values, as a readable diagnostic.
pub fn eps_sweep(points: &[Point2], min_pts: usize, eps_values: &[f64]) -> String {
    eps_values
        .iter()
        .map(|&e| match dbscan(points, e, min_pts) {
            Ok(r) => format!(
                "eps={e:.4}: {} clusters {:?}, {} noise",
                r.n_clusters,
                r.cluster_sizes(),
                r.noise_count()
            ),
            Err(err) => format!("eps={e:.4}: {err}"),
        })
        .collect::<Vec<_>>()
        .join("; ")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnModel {
    pub points: Vec<Point2>,
    pub labels: Vec<usize>,
    pub k: usize,
}

/// Keeps non-noise reference points of a two-cluster labelling.
pub fn knn_fit(latents: &[Point2], labels: &[Label], k: usize) -> Result<KnnModel> {
    if latents.len() != labels.len() {
        return Err(Error::Validation(format!(
            "{} latents vs {} labels",
            latents.len(),
            labels.len()
        )));
    }
    if k.is_multiple_of(2) {
        return Err(Error::Config(format!("KNN k must be odd, got {k}")));
    }
    let mut points = Vec::new();
    let mut refs = Vec::new();
    for (p, l) in latents.iter().zip(labels) {
        if let Label::Cluster(c) = l {
            if *c > 1 {
                return Err(Error::Validation(format!(
                    "KNN reference label {c} outside {{0, 1}}"
                )));
            }
            points.push(*p);
            refs.push(*c);
        }
    }
    if points.is_empty() {
        return Err(Error::InsufficientData("KNN reference set is empty".into()));
    }
    if k > points.len() {
        return Err(Error::InsufficientData(format!(
            "k = {k} exceeds {} reference points",
            points.len()
        )));
    }
    Ok(KnnModel {
        points,
        labels: refs,
        k,
    })
}

impl KnnModel {
    /// Majority vote among the `k` nearest references (distance ties broken
    /// by reference index).
    pub fn predict_one(&self, q: &Point2) -> usize {
        let mut d: Vec<(f64, usize)> = self
            .points
            .iter()
            .enumerate()
            .map(|(i, p)| (sq_dist(p, q), i))
            .collect();
        d.select_nth_unstable_by(self.k - 1, |a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let ones = d[..self.k].iter().filter(|(_, i)| self.labels[*i] == 1).count();
        usize::from(2 * ones > self.k)
    }

    pub fn predict(&self, queries: &[Point2]) -> Vec<usize> {
        queries.iter().map(|q| self.predict_one(q)).collect()
    }
}

pub fn knn_predict(model: &KnnModel, points: &[Point2]) -> Vec<usize> {
    model.predict(points)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn blob(rng: &mut SplitMix64, center: Point2, sd: f64, n: usize) -> Vec<Point2> {
        (0..n)
            .map(|_| [rng.gaussian(center[0], sd), rng.gaussian(center[1], sd)])
            .collect()
    }

    #[test]
    fn kmeans_finds_blob_means() {
        let mut rng = SplitMix64::new(1);
        let mut pts: Vec<Vec<f64>> = blob(&mut rng, [0.0, 0.0], 0.3, 200)
            .into_iter()
            .map(|p| p.to_vec())
            .collect();
        pts.extend(blob(&mut rng, [5.0, 5.0], 0.3, 200).into_iter().map(|p| p.to_vec()));
        let cfg = KmeansConfig {
            seed: 3,
            ..KmeansConfig::default()
        };
        let m = kmeans(&pts, &cfg).unwrap();
        let mut cs = m.centroids.clone();
        cs.sort_by(|a, b| a[0].total_cmp(&b[0]));
        assert!(sq_dist(&cs[0], &[0.0, 0.0]).sqrt() < 0.2);
        assert!(sq_dist(&cs[1], &[5.0, 5.0]).sqrt() < 0.2);
        for (p, &a) in pts.iter().zip(&m.assignments) {
            assert_eq!(nearest(&m.centroids, p).0, a);
        }
        assert!(m.inertia_history.windows(2).all(|w| w[1] <= w[0] + 1e-9));
        assert_eq!(kmeans(&pts, &cfg).unwrap(), m);
    }

    #[test]
    fn kmeans_identical_points() {
        let pts = vec![vec![1.0, 2.0]; 10];
        let m = kmeans(&pts, &KmeansConfig::default()).unwrap();
        assert_eq!(m.inertia, 0.0);
        assert!(m.centroids.iter().all(|c| c == &vec![1.0, 2.0]));
    }

    #[test]
    fn kmeans_needs_k_points() {
        assert!(kmeans(&[vec![1.0]], &KmeansConfig::default()).is_err());
    }

    #[test]
    fn standardize_columns() {
        let z = standardize(&[vec![1.0, 5.0], vec![3.0, 5.0]]);
        assert_eq!(z, vec![vec![-1.0, 0.0], vec![1.0, 0.0]]);
    }

    #[test]
    fn dbscan_two_blobs_and_stragglers() {
        let mut rng = SplitMix64::new(4);
        let mut pts = blob(&mut rng, [0.0, 0.0], 0.1, 60);
        pts.extend(blob(&mut rng, [3.0, 0.0], 0.1, 40));
        pts.extend([[10.0, 10.0], [-10.0, 8.0], [6.0, -9.0]]);
        let r = dbscan(&pts, 0.3, 5).unwrap();
        assert_eq!(r.n_clusters, 2);
        assert_eq!(r.cluster_sizes(), vec![60, 40]);
        assert_eq!(r.noise_count(), 3);
        assert!(r.labels[100..].iter().all(|l| l.is_noise()));
    }

    #[test]
    fn dbscan_huge_eps_single_cluster() {
        let mut rng = SplitMix64::new(5);
        let pts = blob(&mut rng, [0.0, 0.0], 1.0, 50);
        let r = dbscan(&pts, 1e6, 5).unwrap();
        assert_eq!(r.n_clusters, 1);
        assert!(r.labels.iter().all(|&l| l == Label::Cluster(0)));
    }

    #[test]
    fn dbscan_rejects_bad_params() {
        assert!(dbscan(&[[0.0, 0.0]], 0.0, 5).is_err());
        assert!(dbscan(&[[0.0, 0.0]], 1.0, 1).is_err());
    }

    #[test]
    fn knee_separates_blob_from_outliers() {
        let mut rng = SplitMix64::new(6);
        let mut pts = blob(&mut rng, [0.0, 0.0], 0.1, 200);
        pts.extend((0..10).map(|i| [5.0 + i as f64, 5.0]));
        let eps = knee_eps(&pts, 5).unwrap();
        let r = dbscan(&pts, eps, 5).unwrap();
        assert_eq!(r.n_clusters, 1);
        assert!(r.cluster_sizes()[0] >= 190);
        assert!(r.labels[200..].iter().all(|l| l.is_noise()));
    }

    #[test]
    fn stable_eps_handles_unequal_densities() {
        let mut rng = SplitMix64::new(7);
        let mut pts = blob(&mut rng, [0.0, 0.0], 0.002, 450);
        pts.extend(blob(&mut rng, [1.0, 1.0], 0.03, 50));
        let knee = knee_eps(&pts, 5).unwrap();
        assert!(dbscan(&pts, knee, 5).unwrap().noise_count() > 10);
        let eps = stable_eps(&pts, 5).unwrap();
        let r = dbscan(&pts, eps, 5).unwrap();
        assert_eq!(r.cluster_sizes(), vec![450, 50]);
    }

    #[test]
    fn stable_eps_without_structure_fails() {
        let pts: Vec<Point2> = (0..20).map(|i| [i as f64, 0.0]).collect();
        assert!(matches!(stable_eps(&pts, 5), Err(Error::ClusterCount { .. })));
        assert!(stable_eps(&[[1.0, 1.0]; 10], 5).is_err());
    }

    #[test]
    fn eps_rule_parsing() {
        assert_eq!("knee".parse::<EpsRule>().unwrap(), EpsRule::Knee);
        assert_eq!("0.5".parse::<EpsRule>().unwrap(), EpsRule::Fixed(0.5));
        assert!("-1".parse::<EpsRule>().is_err());
        assert!("tight".parse::<EpsRule>().is_err());
        assert_eq!(EpsRule::Fixed(0.25).to_string(), "0.25");
    }

    #[test]
    fn knn_basics() {
        let refs = vec![[0.0, 0.0], [1.0, 1.0], [1.1, 1.0], [0.9, 1.0], [1.0, 1.1], [1.0, 0.9]];
        let labels = vec![
            Label::Cluster(0),
            Label::Cluster(1),
            Label::Cluster(1),
            Label::Cluster(1),
            Label::Cluster(1),
            Label::Cluster(1),
        ];
        let m1 = knn_fit(&refs, &labels, 1).unwrap();
        assert_eq!(m1.predict_one(&[0.0, 0.0]), 0);
        let m5 = knn_fit(&refs, &labels, 5).unwrap();
        assert_eq!(m5.predict_one(&[1.0, 1.0]), 1);
        assert!(knn_fit(&refs, &labels, 4).is_err());
        assert!(knn_fit(&refs, &labels, 7).is_err());
        assert!(knn_fit(&refs, &[Label::Noise; 6], 1).is_err());
    }

    #[test]
    fn knn_skips_noise_references() {
        let refs = vec![[0.0, 0.0], [0.1, 0.0], [5.0, 5.0]];
        let labels = vec![Label::Cluster(0), Label::Noise, Label::Cluster(1)];
        let m = knn_fit(&refs, &labels, 1).unwrap();
        assert_eq!(m.points.len(), 2);
        assert_eq!(m.predict_one(&[0.1, 0.0]), 0);
    }
}
