//! Reference implementations the library is checked against. They favour
//! obviousness over speed and share no code with the crate.

use hrvae_core::rng::SplitMix64;
use hrvae_core::rri::SplitPlan;

/// mean_rr, min_rr, max_rr, sdnn (population), rmssd, nn50, pnn50, mean_hr.
pub fn time_domain(rr: &[f64]) -> [f64; 8] {
    // Welford for mean and variance.
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for (i, &x) in rr.iter().enumerate() {
        let d = x - mean;
        mean += d / (i + 1) as f64;
        m2 += d * (x - mean);
    }
    let n = rr.len() as f64;
    let mut sorted = rr.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut sq = 0.0;
    let mut nn50 = 0.0;
    for i in 1..rr.len() {
        let d = rr[i] - rr[i - 1];
        sq += d * d;
        if !(-50.0..=50.0).contains(&d) {
            nn50 += 1.0;
        }
    }
    let pairs = n - 1.0;
    let mut hr = 0.0;
    for &x in rr {
        hr += 60.0 / (x / 1000.0);
    }
    [
        mean,
        sorted[0],
        sorted[rr.len() - 1],
        (m2 / n).sqrt(),
        (sq / pairs).sqrt(),
        nn50,
        nn50 / pairs * 100.0,
        hr / n,
    ]
}

/// Random RR window: a drifting baseline plus jitter and occasional jumps.
pub fn random_rr(rng: &mut SplitMix64, n: usize) -> Vec<f64> {
    let mut base = rng.uniform(550.0, 1100.0);
    (0..n)
        .map(|_| {
            base += rng.gaussian(0.0, 8.0);
            let jump = if rng.below(10) == 0 { rng.gaussian(0.0, 60.0) } else { 0.0 };
            (base + rng.gaussian(0.0, 25.0) + jump).clamp(300.0, 2000.0)
        })
        .collect()
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

/// DBSCAN by definition: core points are those with at least `min_pts`
/// neighbours within `eps` (self included), clusters are the connected
/// components of the core graph, and a border point joins the adjacent
/// component whose lowest core index is smallest. `None` is noise.
pub fn dbscan(points: &[[f64; 2]], eps: f64, min_pts: usize) -> Vec<Option<usize>> {
    let n = points.len();
    let near = |i: usize, j: usize| {
        let dx = points[i][0] - points[j][0];
        let dy = points[i][1] - points[j][1];
        (dx * dx + dy * dy).sqrt() <= eps
    };
    let core: Vec<bool> = (0..n)
        .map(|i| (0..n).filter(|&j| near(i, j)).count() >= min_pts)
        .collect();
    let mut parent: Vec<usize> = (0..n).collect();
    for i in 0..n {
        for j in 0..i {
            if core[i] && core[j] && near(i, j) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    // With the smaller root always kept, every root is its component's lowest index.
    (0..n)
        .map(|i| {
            if core[i] {
                Some(find(&mut parent, i))
            } else {
                (0..n)
                    .filter(|&j| core[j] && near(i, j))
                    .map(|j| find(&mut parent, j))
                    .min()
            }
        })
        .collect()
}

/// True when the two labelings are equal up to renaming clusters, with noise
/// matching noise.
pub fn same_partition<A: Copy + Eq + std::hash::Hash, B: Copy + Eq + std::hash::Hash>(
    a: &[Option<A>],
    b: &[Option<B>],
) -> bool {
    use std::collections::HashMap;
    if a.len() != b.len() {
        return false;
    }
    let mut fwd: HashMap<A, B> = HashMap::new();
    let mut back: HashMap<B, A> = HashMap::new();
    for (&x, &y) in a.iter().zip(b) {
        match (x, y) {
            (None, None) => {}
            (Some(x), Some(y)) => {
                if *fwd.entry(x).or_insert(y) != y || *back.entry(y).or_insert(x) != x {
                    return false;
                }
            }
            _ => return false,
        }
    }
    true
}

/// Points drawn from a few Gaussian blobs plus uniform background.
pub fn random_blobs(rng: &mut SplitMix64, n: usize) -> Vec<[f64; 2]> {
    let blobs: Vec<([f64; 2], f64)> = (0..1 + rng.below(4))
        .map(|_| ([rng.uniform(-5.0, 5.0), rng.uniform(-5.0, 5.0)], rng.uniform(0.2, 1.0)))
        .collect();
    (0..n)
        .map(|_| {
            if rng.below(5) == 0 {
                [rng.uniform(-7.0, 7.0), rng.uniform(-7.0, 7.0)]
            } else {
                let (c, s) = blobs[rng.below(blobs.len() as u64) as usize];
                [rng.gaussian(c[0], s), rng.gaussian(c[1], s)]
            }
        })
        .collect()
}

/// Every structural property a split must have; the first violation found.
pub fn split_violation(plan: &SplitPlan, n: usize, folds: usize) -> Option<String> {
    let expected_test = (n as f64 / 10.0).round() as usize;
    if plan.test.len() != expected_test {
        return Some(format!("n={n}: test has {} windows, want {expected_test}", plan.test.len()));
    }
    if plan.folds.len() != folds {
        return Some(format!("n={n}: {} folds", plan.folds.len()));
    }
    let mut seen = vec![0u32; n];
    for &i in plan.test.iter().chain(plan.folds.iter().flatten()) {
        if i >= n {
            return Some(format!("n={n}: index {i} out of range"));
        }
        seen[i] += 1;
    }
    if let Some(i) = seen.iter().position(|&c| c != 1) {
        return Some(format!("n={n}: window {i} appears {} times", seen[i]));
    }
    let sizes: Vec<usize> = plan.folds.iter().map(Vec::len).collect();
    let (lo, hi) = (sizes.iter().min().unwrap(), sizes.iter().max().unwrap());
    if hi - lo > 1 {
        return Some(format!("n={n}: unbalanced folds {sizes:?}"));
    }
    for k in 0..folds {
        let train = plan.train_indices(k);
        if train.len() + plan.folds[k].len() + plan.test.len() != n {
            return Some(format!("n={n}: fold {k} train size {}", train.len()));
        }
        if train.iter().any(|i| plan.folds[k].contains(i) || plan.test.contains(i)) {
            return Some(format!("n={n}: fold {k} train overlaps validation or test"));
        }
    }
    None
}

/// Index of the nearest centroid, ties to the lower index.
pub fn nearest(z: [f64; 2], centroids: &[[f64; 2]]) -> usize {
    let d = |c: &[f64; 2]| (z[0] - c[0]).powi(2) + (z[1] - c[1]).powi(2);
    (0..centroids.len())
        .min_by(|&a, &b| d(&centroids[a]).total_cmp(&d(&centroids[b])).then(a.cmp(&b)))
        .unwrap()
}
