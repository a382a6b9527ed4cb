//! Audio ingestion, framing, windowing, and spectrum utilities shared by all
//! feature extractors.
//!
//! Everything here is a pure function of its inputs: signals and frames are
//! immutable after construction and safe to share across worker threads.
//!
//! ```
//! use emovox::signal::{AudioSignal, frame_signal, WindowKind};
//!
//! let samples: Vec<f64> = (0..16000).map(|i| (0.05 * i as f64).sin() * 0.5).collect();
//! let signal = AudioSignal::new(samples, 16000).unwrap();
//! let frames = frame_signal(&signal, 30.0, 15.0, WindowKind::Hamming).unwrap();
//! assert_eq!(frames.frame_length, 480);
//! ```

use rustfft::{num_complex::Complex64, FftPlanner};

use crate::error::{Error, Result};

/// A mono audio signal with normalized amplitude in `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AudioSignal {
    /// Normalized samples (dimensionless).
    pub samples: Vec<f64>,
    /// Sampling rate in Hz.
    pub sample_rate_hz: u32,
}

impl AudioSignal {
    /// Build a signal, validating that it is non-empty, has a positive sample
    /// rate, and contains only finite samples.
    pub fn new(samples: Vec<f64>, sample_rate_hz: u32) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptySignal);
        }
        if sample_rate_hz == 0 {
            return Err(Error::InvalidParameter("sample_rate_hz must be positive"));
        }
        if let Some(index) = samples.iter().position(|s| !s.is_finite()) {
            return Err(Error::NonFiniteSample { index });
        }
        Ok(Self {
            samples,
            sample_rate_hz,
        })
    }

    /// Total duration in seconds.
    pub fn duration_s(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate_hz as f64
    }

    /// A copy of the signal scaled by `factor`.
    pub fn scaled(&self, factor: f64) -> AudioSignal {
        AudioSignal {
            samples: self.samples.iter().map(|s| s * factor).collect(),
            sample_rate_hz: self.sample_rate_hz,
        }
    }
}

/// Analysis window applied to each frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WindowKind {
    /// Identity window: frame samples equal the raw slice.
    Rectangular,
    /// Hamming taper `0.54 - 0.46 cos(2πn/(N-1))`.
    Hamming,
}

impl WindowKind {
    /// Window weights for a frame of `len` samples.
    pub fn weights(&self, len: usize) -> Vec<f64> {
        match self {
            WindowKind::Rectangular => vec![1.0; len],
            WindowKind::Hamming => {
                if len == 1 {
                    return vec![1.0];
                }
                (0..len)
                    .map(|n| {
                        0.54 - 0.46
                            * (2.0 * std::f64::consts::PI * n as f64 / (len - 1) as f64).cos()
                    })
                    .collect()
            }
        }
    }
}

/// A signal cut into fixed-length, windowed frames.
///
/// The last frame is zero-padded so every frame has exactly `frame_length`
/// samples.
#[derive(Debug, Clone)]
pub struct FrameSequence {
    pub frames: Vec<Vec<f64>>,
    pub frame_length: usize,
    pub hop_length: usize,
    pub window_kind: WindowKind,
}

/// Cut `signal` into frames of `frame_ms` milliseconds every `hop_ms`
/// milliseconds, applying the window multiplicatively.
///
/// Frame count is `ceil((len - frame_length)/hop) + 1`, with a minimum of one
/// zero-padded frame for signals shorter than a full frame.
pub fn frame_signal(
    signal: &AudioSignal,
    frame_ms: f64,
    hop_ms: f64,
    window_kind: WindowKind,
) -> Result<FrameSequence> {
    if signal.samples.is_empty() {
        return Err(Error::EmptySignal);
    }
    if frame_ms <= 0.0 {
        return Err(Error::InvalidParameter("frame_ms must be positive"));
    }
    if hop_ms <= 0.0 {
        return Err(Error::InvalidParameter("hop_ms must be positive"));
    }
    let rate = signal.sample_rate_hz as f64;
    let frame_length = ((frame_ms / 1000.0) * rate).round().max(1.0) as usize;
    let hop_length = ((hop_ms / 1000.0) * rate).round().max(1.0) as usize;
    Ok(frame_slices(
        &signal.samples,
        frame_length,
        hop_length,
        window_kind,
    ))
}

/// Frame a raw sample slice by lengths instead of durations.
pub fn frame_slices(
    samples: &[f64],
    frame_length: usize,
    hop_length: usize,
    window_kind: WindowKind,
) -> FrameSequence {
    let len = samples.len();
    let n_frames = if len <= frame_length {
        1
    } else {
        1 + (len - frame_length).div_ceil(hop_length)
    };
    let window = window_kind.weights(frame_length);
    let mut frames = Vec::with_capacity(n_frames);
    for f in 0..n_frames {
        let start = f * hop_length;
        let mut frame = vec![0.0; frame_length];
        for (i, slot) in frame.iter_mut().enumerate() {
            if start + i < len {
                *slot = samples[start + i] * window[i];
            }
        }
        frames.push(frame);
    }
    FrameSequence {
        frames,
        frame_length,
        hop_length,
        window_kind,
    }
}

/// One-sided magnitude spectrum of a frame.
///
/// Bins hold the unnormalized magnitude `|X(k)|` of the length-`fft_size`
/// DFT, for `k = 0 ..= fft_size/2`.
#[derive(Debug, Clone)]
pub struct MagnitudeSpectrum {
    pub bins: Vec<f64>,
    /// Frequency resolution in Hz per bin.
    pub bin_hz: f64,
}

impl MagnitudeSpectrum {
    /// Sum of squared bin magnitudes, a spectral-domain energy proxy.
    pub fn energy(&self) -> f64 {
        self.bins.iter().map(|b| b * b).sum()
    }

    /// Sum of squared magnitudes over bins whose center frequency falls in
    /// `[low_hz, high_hz]`.
    pub fn band_energy(&self, low_hz: f64, high_hz: f64) -> f64 {
        self.bins
            .iter()
            .enumerate()
            .filter(|(k, _)| {
                let f = *k as f64 * self.bin_hz;
                f >= low_hz && f <= high_hz
            })
            .map(|(_, b)| b * b)
            .sum()
    }
}

/// Compute the one-sided magnitude spectrum of `frame` with a length-`fft_size`
/// FFT (the frame is zero-padded up to `fft_size`).
///
/// The output has `fft_size/2 + 1` bins and no normalization is applied.
pub fn magnitude_spectrum(
    frame: &[f64],
    fft_size: usize,
    sample_rate_hz: u32,
) -> Result<MagnitudeSpectrum> {
    if fft_size == 0 || !fft_size.is_power_of_two() {
        return Err(Error::NonPowerOfTwoSize(fft_size));
    }
    if fft_size < frame.len() {
        return Err(Error::FftTooSmall {
            fft_size,
            frame_len: frame.len(),
        });
    }
    let mut buf: Vec<Complex64> = frame
        .iter()
        .map(|&s| Complex64::new(s, 0.0))
        .chain(std::iter::repeat(Complex64::new(0.0, 0.0)))
        .take(fft_size)
        .collect();
    FftPlanner::new().plan_fft_forward(fft_size).process(&mut buf);
    let bins = buf[..=fft_size / 2].iter().map(|c| c.norm()).collect();
    Ok(MagnitudeSpectrum {
        bins,
        bin_hz: sample_rate_hz as f64 / fft_size as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tone(freq: f64, rate: u32, len: usize) -> AudioSignal {
        let samples = (0..len)
            .map(|i| (2.0 * std::f64::consts::PI * freq * i as f64 / rate as f64).cos())
            .collect();
        AudioSignal::new(samples, rate).unwrap()
    }

    // Deterministic uniform noise in [-0.5, 0.5).
    fn noise(seed: u64, len: usize) -> Vec<f64> {
        let mut state = seed.max(1);
        (0..len)
            .map(|_| {
                state ^= state << 13;
                state ^= state >> 7;
                state ^= state << 17;
                (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
            })
            .collect()
    }

    #[test]
    fn audio_signal_rejects_empty_and_non_finite() {
        assert!(matches!(
            AudioSignal::new(vec![], 16000),
            Err(Error::EmptySignal)
        ));
        assert!(matches!(
            AudioSignal::new(vec![0.0, f64::NAN], 16000),
            Err(Error::NonFiniteSample { index: 1 })
        ));
        assert!(AudioSignal::new(vec![0.1], 0).is_err());
    }

    #[test]
    fn frame_count_matches_closed_form() {
        // 16000 samples at 16 kHz, 30 ms frame, 30 ms hop:
        // frame_length 480, ceil((16000-480)/480) + 1 = 34 frames.
        let sig = tone(440.0, 16000, 16000);
        let frames = frame_signal(&sig, 30.0, 30.0, WindowKind::Rectangular).unwrap();
        assert_eq!(frames.frame_length, 480);
        assert_eq!(frames.frames.len(), 34);
    }

    #[test]
    fn short_signal_yields_single_padded_frame() {
        let sig = AudioSignal::new(vec![1.0; 100], 8000).unwrap();
        // 25 ms at 8 kHz = 200 samples.
        let frames = frame_signal(&sig, 25.0, 25.0, WindowKind::Rectangular).unwrap();
        assert_eq!(frames.frames.len(), 1);
        assert_eq!(frames.frames[0].len(), 200);
        assert_eq!(&frames.frames[0][..100], &[1.0; 100][..]);
        assert_eq!(&frames.frames[0][100..], &[0.0; 100][..]);
    }

    #[test]
    fn rectangular_window_is_identity() {
        let sig = AudioSignal::new((1..=10).map(f64::from).collect(), 1000).unwrap();
        let frames = frame_signal(&sig, 5.0, 5.0, WindowKind::Rectangular).unwrap();
        assert_eq!(frames.frames[0], vec![1.0, 2.0, 3.0, 4.0, 5.0]);
    }

    #[test]
    fn hamming_energy_never_exceeds_rectangular() {
        for seed in 1..=20u64 {
            let samples = noise(seed, 256);
            let rect = frame_slices(&samples, 256, 256, WindowKind::Rectangular);
            let ham = frame_slices(&samples, 256, 256, WindowKind::Hamming);
            let e_rect: f64 = rect.frames[0].iter().map(|x| x * x).sum();
            let e_ham: f64 = ham.frames[0].iter().map(|x| x * x).sum();
            assert!(e_ham <= e_rect + 1e-12, "seed {seed}: {e_ham} > {e_rect}");
        }
    }

    #[test]
    fn frames_reconstruct_signal_when_hop_equals_frame() {
        let samples = noise(7, 1000);
        let frames = frame_slices(&samples, 240, 240, WindowKind::Rectangular);
        let glued: Vec<f64> = frames.frames.concat();
        assert!(glued.len() >= samples.len());
        for (i, s) in samples.iter().enumerate() {
            assert_eq!(glued[i], *s);
        }
        for pad in &glued[samples.len()..] {
            assert_eq!(*pad, 0.0);
        }
    }

    #[test]
    fn spectrum_of_zero_frame_is_zero() {
        let spec = magnitude_spectrum(&[0.0; 64], 64, 16000).unwrap();
        assert_eq!(spec.bins.len(), 33);
        assert!(spec.bins.iter().all(|&b| b == 0.0));
    }

    #[test]
    fn spectrum_of_unit_impulse_is_flat() {
        // DFT of [1, 0, 0, 0] has magnitude 1 in every bin.
        let spec = magnitude_spectrum(&[1.0, 0.0, 0.0, 0.0], 4, 8000).unwrap();
        assert_eq!(spec.bins.len(), 3);
        for b in &spec.bins {
            assert!((b - 1.0).abs() < 1e-12);
        }
        assert!((spec.bin_hz - 2000.0).abs() < 1e-12);
    }

    #[test]
    fn cosine_at_bin_k_dominates_bin_k() {
        let n = 64;
        let k = 5;
        let frame: Vec<f64> = (0..n)
            .map(|i| (2.0 * std::f64::consts::PI * k as f64 * i as f64 / n as f64).cos())
            .collect();
        let spec = magnitude_spectrum(&frame, n, 16000).unwrap();
        let peak = spec
            .bins
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap()
            .0;
        assert_eq!(peak, k);
    }

    #[test]
    fn spectrum_matches_direct_dft_oracle() {
        // O(n^2) DFT oracle, checked for n <= 64.
        for n in [4usize, 8, 16, 32, 64] {
            let frame = noise(n as u64, n);
            let spec = magnitude_spectrum(&frame, n, 16000).unwrap();
            for k in 0..=n / 2 {
                let (mut re, mut im) = (0.0, 0.0);
                for (i, &x) in frame.iter().enumerate() {
                    let phase = -2.0 * std::f64::consts::PI * k as f64 * i as f64 / n as f64;
                    re += x * phase.cos();
                    im += x * phase.sin();
                }
                let oracle = (re * re + im * im).sqrt();
                assert!(
                    (spec.bins[k] - oracle).abs() < 1e-9,
                    "n={n} k={k}: {} vs {oracle}",
                    spec.bins[k]
                );
            }
        }
    }

    #[test]
    fn spectrum_rejects_bad_fft_sizes() {
        assert!(matches!(
            magnitude_spectrum(&[1.0; 5], 6, 8000),
            Err(Error::NonPowerOfTwoSize(6))
        ));
        assert!(matches!(
            magnitude_spectrum(&[1.0; 10], 8, 8000),
            Err(Error::FftTooSmall { .. })
        ));
    }
}
