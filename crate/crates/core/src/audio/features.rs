//! Short-term spectral features pooled into long-term segment statistics.
//!
//! Frames use a rectangular window. Per frame:
//!
//! | # | feature  | definition                                                   |
//! |---|----------|--------------------------------------------------------------|
//! | 0 | energy   | mean of squared samples                                      |
//! | 1 | zcr      | sign changes / (frame length - 1)                            |
//! | 2 | centroid | magnitude-weighted mean frequency (Hz)                       |
//! | 3 | spread   | magnitude-weighted std of frequency around the centroid (Hz) |
//! | 4 | rolloff  | lowest frequency below which 90% of spectral energy lies     |
//! | 5 | flux     | squared L2 change of the sum-normalized magnitude spectrum   |
//!
//! Flux of the first frame in a segment is 0. A segment vector is the six
//! means followed by the six population standard deviations.

use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const SHORT_TERM_FEATURES: usize = 6;
pub const SEGMENT_DIM: usize = 2 * SHORT_TERM_FEATURES;
pub const ROLLOFF_FRACTION: f64 = 0.90;
pub const MIN_SAMPLE_RATE: u32 = 8000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FeatureConfig {
    pub frame_ms: f64,
    pub step_ms: f64,
    pub segment_s: f64,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        FeatureConfig {
            frame_ms: 50.0,
            step_ms: 25.0,
            segment_s: 2.0,
        }
    }
}

impl FeatureConfig {
    fn lengths(&self, sample_rate: u32) -> Result<(usize, usize, usize)> {
        let sr = sample_rate as f64;
        let frame = (self.frame_ms * sr / 1000.0).round() as usize;
        let step = (self.step_ms * sr / 1000.0).round() as usize;
        let segment = (self.segment_s * sr).round() as usize;
        if frame < 2 || step < 1 || segment < frame {
            return Err(Error::Parameter(format!(
                "unusable framing: frame {frame}, step {step}, segment {segment} samples"
            )));
        }
        Ok((frame, step, segment))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Pcm {
    pub samples: Vec<f64>,
    pub sample_rate: u32,
    pub channels: u16,
}

impl Pcm {
    pub fn mono(samples: Vec<f64>, sample_rate: u32) -> Self {
        Pcm {
            samples,
            sample_rate,
            channels: 1,
        }
    }
}

/// Long-term feature vectors of one movie, in time order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentFeatures {
    pub movie_id: String,
    pub dim: usize,
    pub segments: Vec<Vec<f64>>,
}

impl SegmentFeatures {
    pub fn new(movie_id: impl Into<String>, dim: usize, segments: Vec<Vec<f64>>) -> Result<Self> {
        let movie_id = movie_id.into();
        for (i, s) in segments.iter().enumerate() {
            if s.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: s.len(),
                });
            }
            if s.iter().any(|x| !x.is_finite()) {
                return Err(Error::Validation(format!(
                    "{movie_id}: segment {i} has a non-finite feature"
                )));
            }
        }
        Ok(SegmentFeatures {
            movie_id,
            dim,
            segments,
        })
    }

    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }
}

struct FrameAnalyzer {
    fft: Arc<dyn Fft<f64>>,
    buf: Vec<Complex<f64>>,
    bin_hz: f64,
}

impl FrameAnalyzer {
    fn new(frame: usize, sample_rate: u32) -> Self {
        FrameAnalyzer {
            fft: FftPlanner::new().plan_fft_forward(frame),
            buf: vec![Complex::new(0.0, 0.0); frame],
            bin_hz: sample_rate as f64 / frame as f64,
        }
    }

    /// Magnitudes of bins `0..=frame/2`.
    fn magnitudes(&mut self, frame: &[f64]) -> Vec<f64> {
        for (b, &x) in self.buf.iter_mut().zip(frame) {
            *b = Complex::new(x, 0.0);
        }
        self.fft.process(&mut self.buf);
        self.buf[..frame.len() / 2 + 1].iter().map(|c| c.norm()).collect()
    }
}

/// The six short-term features of one frame; `prev` is the previous frame's
/// normalized spectrum and is replaced with this one's.
fn frame_features(frame: &[f64], mags: &[f64], bin_hz: f64, prev: &mut Option<Vec<f64>>) -> [f64; 6] {
    let n = frame.len() as f64;
    let energy = frame.iter().map(|x| x * x).sum::<f64>() / n;
    let crossings = frame.windows(2).filter(|w| (w[0] >= 0.0) != (w[1] >= 0.0)).count();
    let zcr = crossings as f64 / (n - 1.0);

    let mag_sum: f64 = mags.iter().sum();
    let (centroid, spread, normalized) = if mag_sum > 0.0 {
        let centroid = mags.iter().enumerate().map(|(k, m)| k as f64 * bin_hz * m).sum::<f64>() / mag_sum;
        let var = mags
            .iter()
            .enumerate()
            .map(|(k, m)| (k as f64 * bin_hz - centroid).powi(2) * m)
            .sum::<f64>()
            / mag_sum;
        let normalized: Vec<f64> = mags.iter().map(|m| m / mag_sum).collect();
        (centroid, var.sqrt(), normalized)
    } else {
        (0.0, 0.0, vec![0.0; mags.len()])
    };

    let power_total: f64 = mags.iter().map(|m| m * m).sum();
    let rolloff = if power_total > 0.0 {
        let threshold = ROLLOFF_FRACTION * power_total;
        let mut acc = 0.0;
        let mut bin = mags.len() - 1;
        for (k, m) in mags.iter().enumerate() {
            acc += m * m;
            if acc >= threshold {
                bin = k;
                break;
            }
        }
        bin as f64 * bin_hz
    } else {
        0.0
    };

    let flux = match prev.as_ref() {
        Some(p) => p.iter().zip(&normalized).map(|(a, b)| (a - b).powi(2)).sum(),
        None => 0.0,
    };
    *prev = Some(normalized);
    [energy, zcr, centroid, spread, rolloff, flux]
}

/// Per-frame features for every whole frame of `samples`.
pub fn short_term_features(samples: &[f64], sample_rate: u32, cfg: &FeatureConfig) -> Result<Vec<[f64; 6]>> {
    let (frame, step, _) = cfg.lengths(sample_rate)?;
    let mut analyzer = FrameAnalyzer::new(frame, sample_rate);
    let mut prev = None;
    let mut out = Vec::new();
    let mut start = 0;
    while start + frame <= samples.len() {
        let f = &samples[start..start + frame];
        let mags = analyzer.magnitudes(f);
        out.push(frame_features(f, &mags, analyzer.bin_hz, &mut prev));
        start += step;
    }
    Ok(out)
}

pub fn extract_features(movie_id: &str, pcm: &Pcm, cfg: &FeatureConfig) -> Result<SegmentFeatures> {
    if pcm.channels != 1 {
        return Err(Error::Validation(format!(
            "{movie_id}: audio has {} channels; downmix to mono first (e.g. `ffmpeg -i in.wav -ac 1 out.wav`)",
            pcm.channels
        )));
    }
    if pcm.sample_rate < MIN_SAMPLE_RATE {
        return Err(Error::Validation(format!(
            "{movie_id}: sample rate {} Hz is below {MIN_SAMPLE_RATE} Hz",
            pcm.sample_rate
        )));
    }
    if let Some(i) = pcm.samples.iter().position(|x| !x.is_finite()) {
        return Err(Error::Validation(format!("{movie_id}: sample {i} is not finite")));
    }
    let (_, _, segment) = cfg.lengths(pcm.sample_rate)?;
    let count = pcm.samples.len() / segment;
    if count == 0 {
        return Err(Error::Validation(format!(
            "{movie_id}: {:.3} s of audio is shorter than one {} s segment",
            pcm.samples.len() as f64 / pcm.sample_rate as f64,
            cfg.segment_s
        )));
    }
    let segments = (0..count)
        .map(|s| {
            let chunk = &pcm.samples[s * segment..(s + 1) * segment];
            short_term_features(chunk, pcm.sample_rate, cfg).map(|frames| pool(&frames))
        })
        .collect::<Result<Vec<_>>>()?;
    SegmentFeatures::new(movie_id, SEGMENT_DIM, segments)
}

fn pool(frames: &[[f64; 6]]) -> Vec<f64> {
    let n = frames.len() as f64;
    let mut out = vec![0.0; SEGMENT_DIM];
    for f in 0..SHORT_TERM_FEATURES {
        let mean = frames.iter().map(|fr| fr[f]).sum::<f64>() / n;
        let var = frames.iter().map(|fr| (fr[f] - mean).powi(2)).sum::<f64>() / n;
        out[f] = mean;
        out[SHORT_TERM_FEATURES + f] = var.sqrt();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn sine(freq: f64, sr: u32, secs: f64) -> Vec<f64> {
        let n = (sr as f64 * secs) as usize;
        (0..n).map(|i| (2.0 * PI * freq * i as f64 / sr as f64).sin()).collect()
    }

    fn naive_dft_magnitudes(x: &[f64]) -> Vec<f64> {
        let n = x.len();
        (0..=n / 2)
            .map(|k| {
                let (mut re, mut im) = (0.0, 0.0);
                for (t, v) in x.iter().enumerate() {
                    let a = -2.0 * PI * (k * t) as f64 / n as f64;
                    re += v * a.cos();
                    im += v * a.sin();
                }
                (re * re + im * im).sqrt()
            })
            .collect()
    }

    #[test]
    fn fft_matches_naive_dft() {
        let x: Vec<f64> = (0..400).map(|i| ((i * 7919) % 113) as f64 / 56.0 - 1.0).collect();
        let mut a = FrameAnalyzer::new(400, 8000);
        let fast = a.magnitudes(&x);
        let slow = naive_dft_magnitudes(&x);
        for (f, s) in fast.iter().zip(&slow) {
            assert!((f - s).abs() < 1e-9 * (1.0 + s), "{f} vs {s}");
        }
    }

    #[test]
    fn silence_is_all_zero() {
        let pcm = Pcm::mono(vec![0.0; 16000 * 3], 16000);
        let feats = extract_features("m", &pcm, &FeatureConfig::default()).unwrap();
        assert_eq!(feats.len(), 1);
        assert!(feats.segments[0].iter().all(|&x| x == 0.0));
    }

    #[test]
    fn sine_centroid_near_frequency() {
        let frames = short_term_features(&sine(1000.0, 16000, 1.0), 16000, &FeatureConfig::default()).unwrap();
        assert_eq!(frames.len(), 39);
        for f in &frames {
            assert!((f[2] - 1000.0).abs() < 50.0, "centroid {}", f[2]);
            assert!((f[0] - 0.5).abs() < 1e-9);
            assert!((f[4] - 1000.0).abs() < 1e-9);
        }
    }

    #[test]
    fn drops_partial_segment() {
        let pcm = Pcm::mono(sine(440.0, 16000, 5.0), 16000);
        let feats = extract_features("m", &pcm, &FeatureConfig::default()).unwrap();
        assert_eq!(feats.len(), 2);
        assert_eq!(feats.dim, 12);
    }

    #[test]
    fn input_errors() {
        let cfg = FeatureConfig::default();
        let short = Pcm::mono(vec![0.1; 16000], 16000);
        assert!(extract_features("m", &short, &cfg)
            .unwrap_err()
            .to_string()
            .contains("shorter"));
        let stereo = Pcm {
            samples: vec![0.0; 64000],
            sample_rate: 16000,
            channels: 2,
        };
        assert!(extract_features("m", &stereo, &cfg)
            .unwrap_err()
            .to_string()
            .contains("downmix"));
        let slow = Pcm::mono(vec![0.0; 40000], 4000);
        assert!(extract_features("m", &slow, &cfg).is_err());
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(24))]
        #[test]
        fn finite_input_gives_finite_features(samples in proptest::collection::vec(-1.0f64..1.0, 16000..17000)) {
            let pcm = Pcm::mono(samples, 8000);
            let feats = extract_features("m", &pcm, &FeatureConfig::default()).unwrap();
            proptest::prop_assert!(feats.segments.iter().flatten().all(|x| x.is_finite() && *x >= 0.0));
        }
    }
}
