//! Deterministic signal generators: tones, seeded noise, pulse trains, and
//! all-pole vowels with known formants.
//!
//! These exist so examples and tests can exercise the analysis pipeline
//! without shipping audio files. Everything is reproducible: noise comes
//! from a fixed xorshift generator, never the system RNG.

use crate::signal::AudioSignal;

/// Minimal xorshift64 generator for reproducible noise.
#[derive(Debug, Clone)]
pub struct XorShift64 {
    state: u64,
}

impl XorShift64 {
    pub fn new(seed: u64) -> Self {
        Self {
            state: seed.max(1),
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state ^= self.state << 13;
        self.state ^= self.state >> 7;
        self.state ^= self.state << 17;
        self.state
    }

    /// Uniform sample in `[-1, 1)`.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 52) as f64 - 1.0
    }
}

/// A pure cosine at `freq_hz` with amplitude 0.5.
pub fn tone(freq_hz: f64, sample_rate_hz: u32, len: usize) -> AudioSignal {
    let w = 2.0 * std::f64::consts::PI * freq_hz / sample_rate_hz as f64;
    let samples = (0..len).map(|n| 0.5 * (w * n as f64).cos()).collect();
    AudioSignal::new(samples, sample_rate_hz).expect("tone is non-empty and finite")
}

/// Seeded white noise with amplitude 0.5.
pub fn white_noise(seed: u64, sample_rate_hz: u32, len: usize) -> AudioSignal {
    let samples = white_noise_samples(seed, len)
        .into_iter()
        .map(|x| 0.5 * x)
        .collect();
    AudioSignal::new(samples, sample_rate_hz).expect("noise is non-empty and finite")
}

/// Raw seeded noise samples in `[-1, 1)`.
pub fn white_noise_samples(seed: u64, len: usize) -> Vec<f64> {
    let mut rng = XorShift64::new(seed);
    (0..len).map(|_| rng.next_f64()).collect()
}

/// An impulse every `sample_rate_hz / pitch_hz` samples.
pub fn pulse_train(pitch_hz: f64, sample_rate_hz: u32, len: usize) -> Vec<f64> {
    let period = (sample_rate_hz as f64 / pitch_hz).round().max(1.0) as usize;
    (0..len).map(|n| if n % period == 0 { 1.0 } else { 0.0 }).collect()
}

/// Band-limited noise: a dense sum of sinusoids with seeded random
/// frequencies in `[low_hz, high_hz]` and random phases, peak-normalized.
pub fn band_noise_samples(
    seed: u64,
    low_hz: f64,
    high_hz: f64,
    sample_rate_hz: u32,
    len: usize,
) -> Vec<f64> {
    let mut rng = XorShift64::new(seed);
    let n_partials = 160;
    let partials: Vec<(f64, f64)> = (0..n_partials)
        .map(|_| {
            let f = low_hz + 0.5 * (rng.next_f64() + 1.0) * (high_hz - low_hz);
            let phase = std::f64::consts::PI * rng.next_f64();
            (2.0 * std::f64::consts::PI * f / sample_rate_hz as f64, phase)
        })
        .collect();
    let mut out: Vec<f64> = (0..len)
        .map(|n| {
            partials
                .iter()
                .map(|&(w, p)| (w * n as f64 + p).cos())
                .sum::<f64>()
        })
        .collect();
    normalize_peak(&mut out, 1.0);
    out
}

/// Expand resonator pairs `(frequency_hz, radius)` into the denominator
/// coefficients `a(1..)` of `A(z) = Π (1 - 2r·cosθ·z^-1 + r²·z^-2)`.
pub fn resonator_coefficients(formants: &[(f64, f64)], sample_rate_hz: u32) -> Vec<f64> {
    let mut a = vec![1.0];
    for &(freq, radius) in formants {
        let theta = 2.0 * std::f64::consts::PI * freq / sample_rate_hz as f64;
        let (b1, b2) = (-2.0 * radius * theta.cos(), radius * radius);
        let mut next = vec![0.0; a.len() + 2];
        for (i, &c) in a.iter().enumerate() {
            next[i] += c;
            next[i + 1] += c * b1;
            next[i + 2] += c * b2;
        }
        a = next;
    }
    a.remove(0);
    a
}

/// Drive the all-pole filter `1/A(z)` defined by `formants` with the given
/// excitation.
pub fn all_pole(formants: &[(f64, f64)], sample_rate_hz: u32, excitation: &[f64]) -> Vec<f64> {
    let a = resonator_coefficients(formants, sample_rate_hz);
    let mut out = vec![0.0; excitation.len()];
    for n in 0..excitation.len() {
        let mut v = excitation[n];
        for (i, &ai) in a.iter().enumerate() {
            if n > i {
                v -= ai * out[n - i - 1];
            }
        }
        out[n] = v;
    }
    out
}

/// Scale samples in place so the largest magnitude equals `peak`.
pub fn normalize_peak(samples: &mut [f64], peak: f64) {
    let max = samples.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
    if max > 0.0 {
        let g = peak / max;
        for s in samples.iter_mut() {
            *s *= g;
        }
    }
}

/// A vowel-like signal: pulse-train excitation at `pitch_hz` through an
/// all-pole filter with the given `(frequency, radius)` resonances,
/// peak-normalized to 0.5.
pub fn pulse_train_vowel(
    formants: &[(f64, f64)],
    pitch_hz: f64,
    sample_rate_hz: u32,
    len: usize,
) -> AudioSignal {
    let excitation = pulse_train(pitch_hz, sample_rate_hz, len);
    let mut samples = all_pole(formants, sample_rate_hz, &excitation);
    normalize_peak(&mut samples, 0.5);
    AudioSignal::new(samples, sample_rate_hz).expect("vowel is non-empty and finite")
}
