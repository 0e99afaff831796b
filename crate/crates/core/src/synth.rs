//! Synthetic RRI cohorts with known calm/stressed ground truth.
//!
//! Each beat is generated as
//! `rr(t) = mean_rr + lf_amp sin(2 pi 0.1 t) + hf_amp sin(2 pi 0.25 t) + N(0, rr_sd)`
//! where `t` is the cumulative time in seconds at the start of the beat.
//! Values are floored at 1 ms so the series stays strictly positive.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{derive_seed, SplitMix64};
use crate::rri::RriSeries;

pub const LF_MODULATION_HZ: f64 = 0.1;
pub const HF_MODULATION_HZ: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Calm,
    Stressed,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::Calm => "calm",
            Regime::Stressed => "stressed",
        })
    }
}

impl FromStr for Regime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "calm" => Ok(Regime::Calm),
            "stressed" => Ok(Regime::Stressed),
            other => Err(Error::Validation(format!("unknown regime `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub n_subjects: usize,
    pub regime: Regime,
    pub mean_rr_ms: f64,
    pub rr_sd_ms: f64,
    pub lf_amp: f64,
    pub hf_amp: f64,
    pub beats_per_subject: usize,
    pub seed: u64,
}

impl SynthConfig {
    /// Preset parameters for a regime. The stressed preset has a shorter
    /// mean RR, less beat-to-beat noise and a much weaker respiratory (HF)
    /// component than the calm preset.
    pub fn preset(regime: Regime, n_subjects: usize, beats_per_subject: usize, seed: u64) -> Self {
        let (mean_rr_ms, rr_sd_ms, lf_amp, hf_amp) = match regime {
            Regime::Calm => (900.0, 8.0, 15.0, 45.0),
            Regime::Stressed => (650.0, 4.0, 20.0, 6.0),
        };
        Self {
            n_subjects,
            regime,
            mean_rr_ms,
            rr_sd_ms,
            lf_amp,
            hf_amp,
            beats_per_subject,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.mean_rr_ms.is_finite()
            && self.mean_rr_ms > 0.0
            && self.rr_sd_ms >= 0.0
            && self.lf_amp >= 0.0
            && self.hf_amp >= 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::Validation(format!("bad synth config {self:?}")))
        }
    }
}

/// One series per subject; subject `i` is seeded from `derive_seed(seed, "subject/i")`.
pub fn synth_cohort(cfg: &SynthConfig) -> Result<Vec<RriSeries>> {
    cfg.validate()?;
    Ok((0..cfg.n_subjects)
        .map(|i| {
            let mut rng = SplitMix64::new(derive_seed(cfg.seed, &format!("subject/{i}")));
            RriSeries {
                subject_id: format!("{}{i:03}", cfg.regime),
                intervals: synth_series(cfg, &mut rng),
            }
        })
        .collect())
}

fn synth_series(cfg: &SynthConfig, rng: &mut SplitMix64) -> Vec<f64> {
    let mut t = 0.0;
    (0..cfg.beats_per_subject)
        .map(|_| {
            let mut rr = cfg.mean_rr_ms
                + cfg.lf_amp * (2.0 * PI * LF_MODULATION_HZ * t).sin()
                + cfg.hf_amp * (2.0 * PI * HF_MODULATION_HZ * t).sin();
            if cfg.rr_sd_ms > 0.0 {
                rr += rng.gaussian(0.0, cfg.rr_sd_ms);
            }
            let rr = rr.max(1.0);
            t += rr / 1000.0;
            rr
        })
        .collect()
}

/// A subject of a mixed cohort together with its ground-truth regime.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSubject {
    pub series: RriSeries,
    pub regime: Regime,
}

/// Mixed cohort: `round(stressed_frac * n)` stressed subjects, the rest calm,
/// named `subj000..` in an order shuffled by the seed.
pub fn synth_mixed(
    n_subjects: usize,
    stressed_frac: f64,
    beats_per_subject: usize,
    seed: u64,
) -> Result<Vec<LabeledSubject>> {
    if n_subjects == 0 {
        return Err(Error::Validation("cohort needs at least one subject".into()));
    }
    if !(0.0..=1.0).contains(&stressed_frac) {
        return Err(Error::Validation(format!(
            "stressed fraction {stressed_frac} outside [0, 1]"
        )));
    }
    let n_stressed = (stressed_frac * n_subjects as f64).round() as usize;
    let mut regimes: Vec<Regime> = (0..n_subjects)
        .map(|i| {
            if i < n_stressed {
                Regime::Stressed
            } else {
                Regime::Calm
            }
        })
        .collect();
    SplitMix64::new(derive_seed(seed, "synth/assign")).shuffle(&mut regimes);

    regimes
        .into_iter()
        .enumerate()
        .map(|(i, regime)| {
            let cfg = SynthConfig::preset(regime, 1, beats_per_subject, seed);
            cfg.validate()?;
            let mut rng = SplitMix64::new(derive_seed(seed, &format!("synth/subject/{i}")));
            Ok(LabeledSubject {
                series: RriSeries {
                    subject_id: format!("subj{i:03}"),
                    intervals: synth_series(&cfg, &mut rng),
                },
                regime,
            })
        })
        .collect()
}
