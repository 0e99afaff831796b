use hrvae_core::analysis::{build_report, welch_ttest, Assignment, Marker};
use hrvae_core::cluster::Label;
use hrvae_core::features::MarkerSet;
use hrvae_core::rng::SplitMix64;
use proptest::prelude::*;

fn welch_t(a: &[f64], b: &[f64]) -> f64 {
    let mv = |x: &[f64]| {
        let m = x.iter().sum::<f64>() / x.len() as f64;
        let v = x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (x.len() - 1) as f64;
        (m, v / x.len() as f64)
    };
    let ((ma, sa), (mb, sb)) = (mv(a), mv(b));
    (ma - mb) / (sa + sb).sqrt()
}

fn sample(rng: &mut SplitMix64, n: usize, mean: f64, sd: f64) -> Vec<f64> {
    (0..n).map(|_| rng.gaussian(mean, sd)).collect()
}

/// The p-value against a Monte Carlo null: how often two normal samples with
/// the same sizes and variances but equal means give a larger |t|.
#[test]
fn p_value_matches_simulated_null() {
    const DRAWS: usize = 100_000;
    let mut rng = SplitMix64::new(99);
    for pair in 0..20 {
        let (na, nb) = (20 + rng.below(41) as usize, 20 + rng.below(41) as usize);
        let (sa, sb) = (rng.uniform(0.5, 3.0), rng.uniform(0.5, 3.0));
        let shift = rng.uniform(0.0, 1.2);
        let a = sample(&mut rng, na, shift, sa);
        let b = sample(&mut rng, nb, 0.0, sb);
        let r = welch_ttest(&a, &b).unwrap();
        let mut exceed = 0usize;
        let (mut xa, mut xb) = (vec![0.0; na], vec![0.0; nb]);
        for _ in 0..DRAWS {
            xa.iter_mut().for_each(|v| *v = rng.gaussian(0.0, sa));
            xb.iter_mut().for_each(|v| *v = rng.gaussian(0.0, sb));
            exceed += usize::from(welch_t(&xa, &xb).abs() >= r.t.abs());
        }
        let p_mc = exceed as f64 / DRAWS as f64;
        assert!((r.p - p_mc).abs() < 0.02, "pair {pair}: p {} vs simulated {p_mc}", r.p);
    }
}

fn cohort(rng: &mut SplitMix64, n: usize, stressed: bool) -> Vec<MarkerSet> {
    (0..n)
        .map(|_| {
            let (rmssd, lf_hf) = if stressed { (15.0, 4.0) } else { (45.0, 1.0) };
            MarkerSet {
                rmssd: rng.gaussian(rmssd, 4.0),
                max_hr: rng.gaussian(if stressed { 100.0 } else { 75.0 }, 5.0),
                mean_rr: rng.gaussian(if stressed { 650.0 } else { 900.0 }, 30.0),
                lf_hf: rng.gaussian(lf_hf, 0.3).abs(),
            }
        })
        .collect()
}

#[test]
fn stressed_cluster_is_found_whichever_label_it_carries() {
    let mut rng = SplitMix64::new(3);
    let mut markers = cohort(&mut rng, 180, true);
    markers.extend(cohort(&mut rng, 20, false));
    let labels: Vec<Label> = (0..200).map(|i| Label::Cluster(usize::from(i >= 180))).collect();
    let flipped: Vec<Label> = labels
        .iter()
        .map(|l| Label::Cluster(1 - l.cluster().unwrap()))
        .collect();
    let a = build_report(&markers, &labels, 0.05).unwrap();
    let b = build_report(&markers, &flipped, 0.05).unwrap();
    assert_eq!(a.assignment, [Assignment::Stressed, Assignment::Normal]);
    assert_eq!(b.assignment, [Assignment::Normal, Assignment::Stressed]);
    for m in Marker::ALL {
        let (ta, tb) = (a.marker(m).unwrap().test.unwrap(), b.marker(m).unwrap().test.unwrap());
        assert!((ta.t + tb.t).abs() < 1e-12);
        assert!((ta.p - tb.p).abs() < 1e-15);
    }
}

#[test]
fn no_real_difference_stays_undetermined() {
    let mut rng = SplitMix64::new(4);
    let markers = cohort(&mut rng, 200, true);
    let labels: Vec<Label> = (0..200).map(|i| Label::Cluster(i % 2)).collect();
    let r = build_report(&markers, &labels, 1e-6).unwrap();
    assert_eq!(r.assignment, [Assignment::Undetermined; 2]);
}

proptest! {
    #[test]
    fn t_test_is_antisymmetric_and_p_is_a_probability(
        a in prop::collection::vec(-100.0f64..100.0, 2..40),
        b in prop::collection::vec(-100.0f64..100.0, 2..40),
    ) {
        if let (Ok(x), Ok(y)) = (welch_ttest(&a, &b), welch_ttest(&b, &a)) {
            prop_assert!((0.0..=1.0).contains(&x.p));
            prop_assert!((x.t + y.t).abs() <= 1e-9 * x.t.abs().max(1.0));
            prop_assert!((x.p - y.p).abs() < 1e-12);
            prop_assert!((x.df - y.df).abs() < 1e-9 * x.df);
        }
    }

    #[test]
    fn location_shift_leaves_test_unchanged(
        a in prop::collection::vec(-100.0f64..100.0, 3..30),
        b in prop::collection::vec(-100.0f64..100.0, 3..30),
        c in -1000.0f64..1000.0,
    ) {
        let sa: Vec<f64> = a.iter().map(|v| v + c).collect();
        let sb: Vec<f64> = b.iter().map(|v| v + c).collect();
        if let (Ok(x), Ok(y)) = (welch_ttest(&a, &b), welch_ttest(&sa, &sb)) {
            prop_assert!((x.t - y.t).abs() < 1e-6 * x.t.abs().max(1.0));
        }
    }
}
