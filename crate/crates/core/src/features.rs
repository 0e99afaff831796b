//! Time- and frequency-domain HRV features for one window.
//!
//! Frequency features follow the usual short-term HRV recipe: the RR series is
//! linearly interpolated onto a 4 Hz grid over cumulative beat time, the mean
//! is removed, and a Welch periodogram (periodic Hann window, 50% overlap,
//! segments of `min(256, n)` samples, constant detrend, zero padding to
//! 4096 points) is integrated over the VLF/LF/HF bands with the trapezoidal
//! rule.

use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rri::Window;

pub const VLF_BAND: (f64, f64) = (0.003, 0.04);
pub const LF_BAND: (f64, f64) = (0.04, 0.15);
pub const HF_BAND: (f64, f64) = (0.15, 0.4);

/// Column names, in [`FeatureVector::values`] order.
pub const FEATURE_NAMES: [&str; 18] = [
    "MeanRR", "MinRR", "MaxRR", "SDNN", "RMSSD", "NN50", "pNN50", "MeanHR", "VLFms", "LFms",
    "HFms", "LFrel", "HFrel", "LFnu", "HFnu", "LFpeak", "HFpeak", "LF_HF",
];

/// Divisor used for SDNN.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SdConvention {
    /// Divide by `n`.
    #[default]
    Population,
    /// Divide by `n - 1`.
    Sample,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureConfig {
    pub sdnn: SdConvention,
    pub resample_hz: f64,
    pub segment_len: usize,
    pub nfft: usize,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        Self {
            sdnn: SdConvention::Population,
            resample_hz: 4.0,
            segment_len: 256,
            nfft: 4096,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeDomain {
    pub mean_rr: f64,
    pub min_rr: f64,
    pub max_rr: f64,
    pub sdnn: f64,
    pub rmssd: f64,
    pub nn50: usize,
    pub pnn50: f64,
    pub mean_hr: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FreqDomain {
    pub vlf_ms: f64,
    pub lf_ms: f64,
    pub hf_ms: f64,
    pub lf_rel: f64,
    pub hf_rel: f64,
    pub lf_nu: f64,
    pub hf_nu: f64,
    pub lf_peak: f64,
    pub hf_peak: f64,
    /// `+inf` when the HF band carries no power.
    pub lf_hf: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub time: TimeDomain,
    pub freq: FreqDomain,
}

impl FeatureVector {
    pub fn values(&self) -> [f64; 18] {
        let t = &self.time;
        let f = &self.freq;
        [
            t.mean_rr,
            t.min_rr,
            t.max_rr,
            t.sdnn,
            t.rmssd,
            t.nn50 as f64,
            t.pnn50,
            t.mean_hr,
            f.vlf_ms,
            f.lf_ms,
            f.hf_ms,
            f.lf_rel,
            f.hf_rel,
            f.lf_nu,
            f.hf_nu,
            f.lf_peak,
            f.hf_peak,
            f.lf_hf,
        ]
    }

    pub fn markers(&self) -> MarkerSet {
        MarkerSet {
            rmssd: self.time.rmssd,
            max_hr: 60_000.0 / self.time.min_rr,
            mean_rr: self.time.mean_rr,
            lf_hf: self.freq.lf_hf,
        }
    }
}

/// The four stress markers compared between clusters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarkerSet {
    pub rmssd: f64,
    pub max_hr: f64,
    pub mean_rr: f64,
    pub lf_hf: f64,
}

pub fn time_domain(raw: &[f64], sd: SdConvention) -> Result<TimeDomain> {
    let n = raw.len();
    if n < 2 {
        return Err(Error::InsufficientData(format!(
            "time-domain features need at least 2 intervals, got {n}"
        )));
    }
    let nf = n as f64;
    let mean_rr = raw.iter().sum::<f64>() / nf;
    let min_rr = raw.iter().copied().fold(f64::INFINITY, f64::min);
    let max_rr = raw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let ss = raw.iter().map(|x| (x - mean_rr).powi(2)).sum::<f64>();
    let sdnn = match sd {
        SdConvention::Population => (ss / nf).sqrt(),
        SdConvention::Sample => (ss / (nf - 1.0)).sqrt(),
    };
    let diffs: Vec<f64> = raw.windows(2).map(|w| w[1] - w[0]).collect();
    let rmssd = (diffs.iter().map(|d| d * d).sum::<f64>() / diffs.len() as f64).sqrt();
    let nn50 = diffs.iter().filter(|d| d.abs() > 50.0).count();
    let pnn50 = 100.0 * nn50 as f64 / diffs.len() as f64;
    let mean_hr = raw.iter().map(|rr| 60_000.0 / rr).sum::<f64>() / nf;
    Ok(TimeDomain {
        mean_rr,
        min_rr,
        max_rr,
        sdnn,
        rmssd,
        nn50,
        pnn50,
        mean_hr,
    })
}

/// Linear interpolation of RR-versus-beat-time onto a uniform grid starting
/// at the first beat, mean removed.
pub fn resample_evenly(raw: &[f64], rate_hz: f64) -> Result<Vec<f64>> {
    if raw.len() < 2 {
        return Err(Error::InsufficientData(
            "resampling needs at least 2 intervals".into(),
        ));
    }
    if !(rate_hz > 0.0) {
        return Err(Error::Validation(format!("sampling rate {rate_hz}")));
    }
    let mut times = Vec::with_capacity(raw.len());
    let mut acc = 0.0;
    for &rr in raw {
        acc += rr / 1000.0;
        times.push(acc);
    }
    let t0 = times[0];
    for t in &mut times {
        *t -= t0;
    }
    let t_end = *times.last().unwrap();
    let n_grid = (t_end * rate_hz + 1e-9).floor() as usize + 1;

    let mut out = Vec::with_capacity(n_grid);
    let mut seg = 0;
    for k in 0..n_grid {
        let t = k as f64 / rate_hz;
        while seg + 2 < times.len() && times[seg + 1] < t {
            seg += 1;
        }
        let (ta, tb) = (times[seg], times[seg + 1]);
        let frac = if tb > ta { (t - ta) / (tb - ta) } else { 0.0 };
        out.push(raw[seg] + frac.clamp(0.0, 1.0) * (raw[seg + 1] - raw[seg]));
    }
    let mean = out.iter().sum::<f64>() / out.len() as f64;
    for v in &mut out {
        *v -= mean;
    }
    Ok(out)
}

/// One-sided power spectral density (ms^2/Hz).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Psd {
    pub freqs: Vec<f64>,
    pub power: Vec<f64>,
}

impl Psd {
    pub fn resolution(&self) -> f64 {
        if self.freqs.len() < 2 {
            0.0
        } else {
            self.freqs[1] - self.freqs[0]
        }
    }

    /// Rectangle-rule integral over the whole spectrum.
    pub fn total_power(&self) -> f64 {
        self.power.iter().sum::<f64>() * self.resolution()
    }

    fn band_indices(&self, (lo, hi): (f64, f64)) -> impl Iterator<Item = usize> + '_ {
        self.freqs
            .iter()
            .enumerate()
            .filter(move |(_, &f)| f >= lo && f < hi)
            .map(|(i, _)| i)
    }

    /// Trapezoidal integral over bins with `lo <= f < hi`.
    pub fn band_power(&self, band: (f64, f64)) -> f64 {
        let idx: Vec<usize> = self.band_indices(band).collect();
        idx.windows(2)
            .map(|w| {
                let (a, b) = (w[0], w[1]);
                0.5 * (self.power[a] + self.power[b]) * (self.freqs[b] - self.freqs[a])
            })
            .sum()
    }

    /// Frequency of the largest bin in the band (earliest on ties); the band's
    /// lower edge when it holds no bins.
    pub fn band_peak(&self, band: (f64, f64)) -> f64 {
        let mut best: Option<usize> = None;
        for i in self.band_indices(band) {
            if best.is_none_or(|b| self.power[i] > self.power[b]) {
                best = Some(i);
            }
        }
        best.map_or(band.0, |i| self.freqs[i])
    }
}

/// Reusable Welch estimator; holds the FFT plan.
pub struct Welch {
    segment_len: usize,
    nfft: usize,
    planner: FftPlanner<f64>,
}

impl Welch {
    pub fn new(cfg: &FeatureConfig) -> Self {
        Self {
            segment_len: cfg.segment_len,
            nfft: cfg.nfft,
            planner: FftPlanner::new(),
        }
    }

    pub fn psd(&mut self, signal: &[f64], rate_hz: f64) -> Result<Psd> {
        let n = signal.len();
        if n < 8 {
            return Err(Error::InsufficientData(format!(
                "Welch estimate needs at least 8 samples, got {n}"
            )));
        }
        let seg = self.segment_len.min(n);
        let step = (seg / 2).max(1);
        let nfft = self.nfft.max(seg);
        let fft: Arc<dyn Fft<f64>> = self.planner.plan_fft_forward(nfft);

        let window: Vec<f64> = (0..seg)
            .map(|i| 0.5 - 0.5 * (2.0 * std::f64::consts::PI * i as f64 / seg as f64).cos())
            .collect();
        let win_energy: f64 = window.iter().map(|w| w * w).sum();
        let n_bins = nfft / 2 + 1;
        let mut power = vec![0.0; n_bins];
        let mut buf = vec![Complex::new(0.0, 0.0); nfft];
        let mut n_segments = 0usize;

        let mut start = 0;
        while start + seg <= n {
            let chunk = &signal[start..start + seg];
            let mean = chunk.iter().sum::<f64>() / seg as f64;
            for (i, slot) in buf.iter_mut().enumerate() {
                *slot = if i < seg {
                    Complex::new((chunk[i] - mean) * window[i], 0.0)
                } else {
                    Complex::new(0.0, 0.0)
                };
            }
            fft.process(&mut buf);
            for (k, p) in power.iter_mut().enumerate() {
                *p += buf[k].norm_sqr();
            }
            n_segments += 1;
            start += step;
        }

        let scale = 1.0 / (rate_hz * win_energy * n_segments as f64);
        for (k, p) in power.iter_mut().enumerate() {
            *p *= scale;
            let edge = k == 0 || (nfft.is_multiple_of(2) && k == nfft / 2);
            if !edge {
                *p *= 2.0;
            }
        }
        let freqs = (0..n_bins).map(|k| k as f64 * rate_hz / nfft as f64).collect();
        Ok(Psd { freqs, power })
    }
}

/// Convenience wrapper around [`Welch::psd`] with default segmenting.
pub fn welch_psd(tachogram: &[f64], rate_hz: f64) -> Result<Psd> {
    Welch::new(&FeatureConfig::default()).psd(tachogram, rate_hz)
}

pub fn freq_domain(psd: &Psd) -> FreqDomain {
    let vlf_ms = psd.band_power(VLF_BAND);
    let lf_ms = psd.band_power(LF_BAND);
    let hf_ms = psd.band_power(HF_BAND);
    let total = vlf_ms + lf_ms + hf_ms;
    let lf_hf_total = lf_ms + hf_ms;
    let pct = |x: f64, of: f64| if of > 0.0 { 100.0 * x / of } else { 0.0 };
    FreqDomain {
        vlf_ms,
        lf_ms,
        hf_ms,
        lf_rel: pct(lf_ms, total),
        hf_rel: pct(hf_ms, total),
        lf_nu: pct(lf_ms, lf_hf_total),
        hf_nu: pct(hf_ms, lf_hf_total),
        lf_peak: psd.band_peak(LF_BAND),
        hf_peak: psd.band_peak(HF_BAND),
        lf_hf: if hf_ms > 0.0 { lf_ms / hf_ms } else { f64::INFINITY },
    }
}

/// Feature extraction with a cached FFT plan.
pub struct FeatureExtractor {
    cfg: FeatureConfig,
    welch: Welch,
}

impl FeatureExtractor {
    pub fn new(cfg: FeatureConfig) -> Self {
        Self {
            welch: Welch::new(&cfg),
            cfg,
        }
    }

    pub fn extract(&mut self, raw: &[f64]) -> Result<FeatureVector> {
        let time = time_domain(raw, self.cfg.sdnn)?;
        let tach = resample_evenly(raw, self.cfg.resample_hz)?;
        let psd = self.welch.psd(&tach, self.cfg.resample_hz)?;
        Ok(FeatureVector {
            time,
            freq: freq_domain(&psd),
        })
    }
}

impl Default for FeatureExtractor {
    fn default() -> Self {
        Self::new(FeatureConfig::default())
    }
}

pub fn features(window: &Window) -> Result<FeatureVector> {
    FeatureExtractor::default().extract(&window.raw)
}

pub fn markers(window: &Window) -> Result<MarkerSet> {
    Ok(features(window)?.markers())
}
