//! Continuous-variable conditional preparation by Monte Carlo.
//!
//! Signal and idler photocurrent fluctuations are modelled as a zero-mean
//! bivariate Gaussian in units of the shot-noise width `σ₀`. Keeping signal
//! values only when the idler falls in a narrow band leaves a signal
//! ensemble whose Fano factor tends to the conditional variance
//! `F(1 - C12²)` as the band shrinks.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Samples per independent random substream. Fixed so that the sample
/// sequence does not depend on the number of worker threads.
pub const BLOCK_SIZE: usize = 1 << 14;
/// Minimum selection size for a Fano estimate.
pub const MIN_FANO_SAMPLES: usize = 100;
/// Minimum sample count for statistics runs.
pub const MIN_RUN_SAMPLES: usize = 10_000;

/// How `band_halfwidth` is read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Window {
    /// Keep `|I_i - I₀| ≤ ΔI`.
    #[default]
    HalfWidth,
    /// Keep `|I_i - I₀| ≤ ΔI/2`.
    FullWidth,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CondPrepConfig {
    pub fano_signal: f64,
    pub fano_idler: f64,
    pub gemellity: f64,
    /// Band centre, in `σ₀` from the mean.
    #[serde(default)]
    pub band_center: f64,
    /// In `σ₀`; see [`Window`]. `null`/absent in JSON means unbounded.
    #[serde(default = "unbounded", with = "maybe_infinite")]
    pub band_halfwidth: f64,
    pub n_samples: usize,
    pub seed: u64,
    #[serde(default = "one")]
    pub n_bands: usize,
    #[serde(default)]
    pub window: Window,
}

fn unbounded() -> f64 {
    f64::INFINITY
}

fn one() -> usize {
    1
}

mod maybe_infinite {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}

impl CondPrepConfig {
    /// Reference twin-beam conditional preparation: `F = 110` on both
    /// beams, `G = 0.18`, band half-width `0.1 σ₀` at the mean, 200 000
    /// acquisitions.
    pub fn twin_beam_default() -> Self {
        Self {
            fano_signal: 110.0,
            fano_idler: 110.0,
            gemellity: 0.18,
            band_center: 0.0,
            band_halfwidth: 0.1,
            n_samples: 200_000,
            seed: 20_040_115,
            n_bands: 1,
            window: Window::HalfWidth,
        }
    }

    /// `C12 = 1 - G/√(F_s F_i)`.
    pub fn correlation(&self) -> f64 {
        1.0 - self.gemellity / (self.fano_signal * self.fano_idler).sqrt()
    }

    /// Half-width actually applied to `|I_i - I₀|`.
    pub fn effective_halfwidth(&self) -> f64 {
        match self.window {
            Window::HalfWidth => self.band_halfwidth,
            Window::FullWidth => self.band_halfwidth / 2.0,
        }
    }

    /// `F_s(1 - C12²)`, the narrow-band limit of the conditioned Fano factor.
    pub fn analytic_conditional_variance(&self) -> f64 {
        let c = self.correlation();
        self.fano_signal * (1.0 - c * c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.fano_signal > 0.0 && self.fano_idler > 0.0) {
            return Err(Error::Config("Fano factors must be positive".into()));
        }
        if !(self.gemellity >= 0.0) {
            return Err(Error::Config("gemellity must be ≥ 0".into()));
        }
        if !(self.band_halfwidth > 0.0) {
            return Err(Error::Config("band half-width must be positive".into()));
        }
        if !self.band_center.is_finite() {
            return Err(Error::Config("band centre must be finite".into()));
        }
        if self.n_samples == 0 {
            return Err(Error::Config("n_samples must be positive".into()));
        }
        if self.n_bands == 0 {
            return Err(Error::Config("n_bands must be positive".into()));
        }
        if self.n_bands > 1 && !self.band_halfwidth.is_finite() {
            return Err(Error::Config("multiple bands need a finite width".into()));
        }
        let c = self.correlation();
        if !(c.abs() <= 1.0) {
            return Err(Error::BadCorrelation(c));
        }
        Ok(())
    }
}

/// One `(I_s, I_i)` acquisition in units of `σ₀`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Photocurrents {
    pub signal: f64,
    pub idler: f64,
}

/// Draws `n_samples` correlated pairs. Block `k` of [`BLOCK_SIZE`] samples
/// uses ChaCha stream `k` of the seed, so the output is identical whatever
/// the thread count.
pub fn sample_photocurrents(cfg: &CondPrepConfig) -> Result<Vec<Photocurrents>> {
    cfg.validate()?;
    let c = cfg.correlation();
    let residual = (1.0 - c * c).max(0.0).sqrt();
    let (ss, si) = (cfg.fano_signal.sqrt(), cfg.fano_idler.sqrt());
    let mut out = vec![
        Photocurrents {
            signal: 0.0,
            idler: 0.0
        };
        cfg.n_samples
    ];
    out.par_chunks_mut(BLOCK_SIZE)
        .enumerate()
        .for_each(|(block, chunk)| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(block as u64);
            for p in chunk.iter_mut() {
                let z1: f64 = StandardNormal.sample(&mut rng);
                let z2: f64 = StandardNormal.sample(&mut rng);
                p.idler = si * z1;
                p.signal = ss * (c * z1 + residual * z2);
            }
        });
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    pub values: Vec<f64>,
    pub total: usize,
}

impl Selection {
    pub fn count(&self) -> usize {
        self.values.len()
    }

    pub fn rate(&self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.count() as f64 / self.total as f64
        }
    }
}

/// Keeps `I_s` where `|I_i - center| ≤ halfwidth`.
pub fn conditional_select(
    pairs: &[Photocurrents],
    center: f64,
    halfwidth: f64,
) -> Result<Selection> {
    if !(halfwidth > 0.0) {
        return Err(Error::Config("band half-width must be positive".into()));
    }
    let values: Vec<f64> = pairs
        .iter()
        .filter(|p| (p.idler - center).abs() <= halfwidth)
        .map(|p| p.signal)
        .collect();
    if values.is_empty() {
        return Err(Error::EmptySelection);
    }
    Ok(Selection {
        values,
        total: pairs.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FanoEstimate {
    pub fano: f64,
    pub stderr: f64,
    pub n: usize,
}

/// Unbiased sample variance over `σ₀²`, with the Gaussian standard error
/// `s²·√(2/(n-1))`.
pub fn estimate_fano(values: &[f64], sigma0: f64) -> Result<FanoEstimate> {
    let n = values.len();
    if n < MIN_FANO_SAMPLES {
        return Err(Error::TooFewSamples {
            needed: MIN_FANO_SAMPLES,
            got: n,
        });
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let ss: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
    let var = ss / (n - 1) as f64;
    let fano = var / (sigma0 * sigma0);
    Ok(FanoEstimate {
        fano,
        stderr: fano * (2.0 / (n - 1) as f64).sqrt(),
        n,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BandResult {
    pub center: f64,
    pub halfwidth: f64,
    pub selected: usize,
    pub rate: f64,
    pub fano: Option<f64>,
    pub stderr: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CondPrepResult {
    /// `None` when nothing (or too little) was selected.
    pub fano_conditioned: Option<f64>,
    pub fano_stderr: Option<f64>,
    pub success_rate: f64,
    pub selected: usize,
    pub n_samples: usize,
    pub correlation: f64,
    pub analytic_conditional_variance: f64,
    pub per_band: Vec<BandResult>,
}

/// Single band (`n_bands == 1`) or [`multi_band_run`].
pub fn run(cfg: &CondPrepConfig) -> Result<CondPrepResult> {
    if cfg.n_bands > 1 {
        return multi_band_run(cfg);
    }
    let pairs = sample_photocurrents(cfg)?;
    let hw = cfg.effective_halfwidth();
    let band = match conditional_select(&pairs, cfg.band_center, hw) {
        Ok(sel) => band_result(cfg.band_center, hw, &sel.values, pairs.len()),
        Err(Error::EmptySelection) => band_result(cfg.band_center, hw, &[], pairs.len()),
        Err(e) => return Err(e),
    };
    Ok(CondPrepResult {
        fano_conditioned: band.fano,
        fano_stderr: band.stderr,
        success_rate: band.rate,
        selected: band.selected,
        n_samples: pairs.len(),
        correlation: cfg.correlation(),
        analytic_conditional_variance: cfg.analytic_conditional_variance(),
        per_band: vec![band],
    })
}

fn band_result(center: f64, halfwidth: f64, values: &[f64], total: usize) -> BandResult {
    let est = estimate_fano(values, 1.0).ok();
    BandResult {
        center,
        halfwidth,
        selected: values.len(),
        rate: values.len() as f64 / total as f64,
        fano: est.map(|e| e.fano),
        stderr: est.map(|e| e.stderr),
    }
}

/// `n_bands` adjacent, non-overlapping bands of half-width `h` tiling
/// `[I₀ - n h, I₀ + n h)`. The overall Fano factor pools the within-band
/// variances; the overall rate is the sum of band rates.
pub fn multi_band_run(cfg: &CondPrepConfig) -> Result<CondPrepResult> {
    let pairs = sample_photocurrents(cfg)?;
    let n = cfg.n_bands;
    let h = cfg.effective_halfwidth();
    let mut buckets: Vec<Vec<f64>> = vec![Vec::new(); n];
    if h.is_infinite() {
        buckets[0].extend(pairs.iter().map(|p| p.signal));
    } else {
        let lower = cfg.band_center - n as f64 * h;
        for p in &pairs {
            let k = ((p.idler - lower) / (2.0 * h)).floor();
            if k >= 0.0 && (k as usize) < n {
                buckets[k as usize].push(p.signal);
            }
        }
    }
    let per_band: Vec<BandResult> = buckets
        .iter()
        .enumerate()
        .map(|(k, vals)| {
            let center = if h.is_infinite() {
                cfg.band_center
            } else {
                cfg.band_center - n as f64 * h + (2 * k + 1) as f64 * h
            };
            band_result(center, h, vals, pairs.len())
        })
        .collect();

    let selected: usize = per_band.iter().map(|b| b.selected).sum();
    // Pooled within-band variance over bands large enough to estimate.
    let (mut num, mut dof) = (0.0, 0usize);
    for (band, vals) in per_band.iter().zip(&buckets) {
        if let Some(f) = band.fano {
            num += f * (vals.len() - 1) as f64;
            dof += vals.len() - 1;
        }
    }
    let (fano, stderr) = if dof > 0 {
        let f = num / dof as f64;
        (Some(f), Some(f * (2.0 / dof as f64).sqrt()))
    } else {
        (None, None)
    };
    Ok(CondPrepResult {
        fano_conditioned: fano,
        fano_stderr: stderr,
        success_rate: per_band.iter().map(|b| b.rate).sum(),
        selected,
        n_samples: pairs.len(),
        correlation: cfg.correlation(),
        analytic_conditional_variance: cfg.analytic_conditional_variance(),
        per_band,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(n: usize) -> CondPrepConfig {
        CondPrepConfig {
            n_samples: n,
            ..CondPrepConfig::twin_beam_default()
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let a = sample_photocurrents(&cfg(50_000)).unwrap();
        let b = sample_photocurrents(&cfg(50_000)).unwrap();
        assert_eq!(a, b);
        let c = sample_photocurrents(&CondPrepConfig {
            seed: 7,
            ..cfg(50_000)
        })
        .unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn prefix_stable_across_lengths() {
        let short = sample_photocurrents(&cfg(BLOCK_SIZE + 17)).unwrap();
        let long = sample_photocurrents(&cfg(3 * BLOCK_SIZE)).unwrap();
        assert_eq!(&long[..short.len()], &short[..]);
    }

    #[test]
    fn thread_count_does_not_matter() {
        let c = cfg(5 * BLOCK_SIZE + 3);
        let one = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let four = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap();
        let a = one.install(|| sample_photocurrents(&c)).unwrap();
        let b = four.install(|| sample_photocurrents(&c)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_bad_correlation() {
        let c = CondPrepConfig {
            gemellity: 500.0,
            ..cfg(20_000)
        };
        assert!(matches!(
            sample_photocurrents(&c),
            Err(Error::BadCorrelation(_))
        ));
    }

    #[test]
    fn config_validation() {
        let bad = [
            CondPrepConfig {
                fano_signal: 0.0,
                ..cfg(20_000)
            },
            CondPrepConfig {
                band_halfwidth: 0.0,
                ..cfg(20_000)
            },
            CondPrepConfig {
                n_bands: 0,
                ..cfg(20_000)
            },
            CondPrepConfig {
                gemellity: -1.0,
                ..cfg(20_000)
            },
            CondPrepConfig {
                n_bands: 3,
                band_halfwidth: f64::INFINITY,
                ..cfg(20_000)
            },
        ];
        for c in bad {
            assert!(c.validate().is_err(), "{c:?}");
        }
    }

    #[test]
    fn unbounded_band_keeps_everything() {
        let c = CondPrepConfig {
            band_halfwidth: f64::INFINITY,
            gemellity: 110.0,
            ..cfg(100_000)
        };
        assert_eq!(c.correlation(), 0.0);
        let r = run(&c).unwrap();
        assert_eq!(r.success_rate, 1.0);
        let f = r.fano_conditioned.unwrap();
        assert!((f - 110.0).abs() < 5.0 * r.fano_stderr.unwrap());
    }

    #[test]
    fn empty_selection_is_reported() {
        let pairs = vec![
            Photocurrents {
                signal: 1.0,
                idler: 0.0
            };
            10
        ];
        assert_eq!(
            conditional_select(&pairs, 50.0, 0.1),
            Err(Error::EmptySelection)
        );
        let c = CondPrepConfig {
            band_center: 1e6,
            ..cfg(20_000)
        };
        let r = run(&c).unwrap();
        assert_eq!(r.success_rate, 0.0);
        assert_eq!(r.fano_conditioned, None);
    }

    #[test]
    fn too_few_samples() {
        assert_eq!(
            estimate_fano(&[1.0; 99], 1.0),
            Err(Error::TooFewSamples {
                needed: 100,
                got: 99
            })
        );
    }

    #[test]
    fn fano_estimator_on_known_values() {
        // Alternating ±1: unbiased variance n/(n-1).
        let v: Vec<f64> = (0..200)
            .map(|i| if i % 2 == 0 { 1.0 } else { -1.0 })
            .collect();
        let e = estimate_fano(&v, 1.0).unwrap();
        assert!((e.fano - 200.0 / 199.0).abs() < 1e-12);
        let e2 = estimate_fano(&v, 2.0).unwrap();
        assert!((e2.fano - e.fano / 4.0).abs() < 1e-12);
    }

    #[test]
    fn full_width_window_halves_band() {
        let c = CondPrepConfig {
            window: Window::FullWidth,
            ..cfg(20_000)
        };
        assert_eq!(c.effective_halfwidth(), 0.05);
    }

    #[test]
    fn config_json_round_trip() {
        let c = CondPrepConfig::twin_beam_default();
        let s = serde_json::to_string(&c).unwrap();
        assert_eq!(serde_json::from_str::<CondPrepConfig>(&s).unwrap(), c);
        let inf = CondPrepConfig {
            band_halfwidth: f64::INFINITY,
            ..c
        };
        let s = serde_json::to_string(&inf).unwrap();
        assert!(s.contains("\"band_halfwidth\":null"));
        assert_eq!(serde_json::from_str::<CondPrepConfig>(&s).unwrap(), inf);
    }
}
