//! Vocal-tract spectrum bandwidth and the mel-cepstrum pipeline.
//!
//! Bandwidth is measured on the whole-utterance average magnitude spectrum:
//! `BW = F_max - F_min`, where the extremes are the lowest and highest bins
//! still within a relative threshold of the spectral peak.
//!
//! MFCCs follow the usual five phases: frame blocking (30 ms Hamming, 15 ms
//! hop), windowing, FFT, mel-filterbank wrapping with
//! `Mel(f) = 2595·log10(1 + f/700)`, and a type-II orthonormal DCT of the
//! log filter energies. The scalar handed to the classifier is the grand
//! mean over all frames of coefficients `1..n_coeffs`, excluding coefficient
//! 0 so that loudness cancels and only spectral shape remains.

use crate::error::{Error, Result};
use crate::signal::{frame_signal, magnitude_spectrum, AudioSignal, WindowKind};

/// Frame length used by the shared spectral front end, in milliseconds.
pub const FRAME_MS: f64 = 30.0;
/// Hop between frames, in milliseconds.
pub const HOP_MS: f64 = 15.0;
/// Floor applied to mel filter energies before the log.
pub const LOG_FLOOR: f64 = 1e-10;

/// Perceptual mel value of a frequency: `2595·log10(1 + f/700)`.
pub fn mel_scale(f_hz: f64) -> Result<f64> {
    if f_hz < 0.0 {
        return Err(Error::NegativeFrequency(f_hz));
    }
    Ok(2595.0 * (1.0 + f_hz / 700.0).log10())
}

/// Inverse of [`mel_scale`].
pub fn mel_to_hz(mel: f64) -> f64 {
    700.0 * (10f64.powf(mel / 2595.0) - 1.0)
}

/// Occupied bandwidth of the average spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralBandwidth {
    pub f_min_hz: f64,
    pub f_max_hz: f64,
    pub bw_hz: f64,
}

/// Measure `F_max - F_min` on the utterance-average magnitude spectrum.
///
/// A bin counts as occupied when its magnitude is at least
/// `peak · 10^(rel_threshold_db/20)`; `rel_threshold_db` must be negative.
/// Because the threshold is relative to the peak, the result is invariant
/// under amplitude scaling.
pub fn vocal_tract_bandwidth(
    signal: &AudioSignal,
    rel_threshold_db: f64,
) -> Result<SpectralBandwidth> {
    if rel_threshold_db >= 0.0 {
        return Err(Error::InvalidParameter("rel_threshold_db must be negative"));
    }
    let frames = frame_signal(signal, FRAME_MS, HOP_MS, WindowKind::Hamming)?;
    let fft_size = frames.frame_length.next_power_of_two();
    let mut mean = vec![0.0; fft_size / 2 + 1];
    for frame in &frames.frames {
        let spec = magnitude_spectrum(frame, fft_size, signal.sample_rate_hz)?;
        for (m, b) in mean.iter_mut().zip(&spec.bins) {
            *m += b;
        }
    }
    let n = frames.frames.len() as f64;
    for m in mean.iter_mut() {
        *m /= n;
    }

    let peak = mean.iter().fold(0.0f64, |p, &b| p.max(b));
    if peak <= 0.0 {
        return Err(Error::SilentSignal);
    }
    let threshold = peak * 10f64.powf(rel_threshold_db / 20.0);
    let bin_hz = signal.sample_rate_hz as f64 / fft_size as f64;
    let first = mean.iter().position(|&b| b >= threshold).unwrap();
    let last = mean.iter().rposition(|&b| b >= threshold).unwrap();
    let f_min_hz = first as f64 * bin_hz;
    let f_max_hz = last as f64 * bin_hz;
    Ok(SpectralBandwidth {
        f_min_hz,
        f_max_hz,
        bw_hz: f_max_hz - f_min_hz,
    })
}

/// Mel-cepstral coefficients for every frame of an utterance.
#[derive(Debug, Clone)]
pub struct MfccMatrix {
    /// One row of `n_coeffs` coefficients per frame.
    pub frames: Vec<Vec<f64>>,
    pub n_coeffs: usize,
    /// Grand mean over all frames of coefficients `1..n_coeffs`.
    pub mean_mfcc: f64,
}

/// Triangular mel filterbank: `n_filters` rows of `fft_size/2 + 1` weights.
///
/// Filter centers are equally spaced on the mel axis between 0 and the
/// Nyquist frequency; each triangle peaks at exactly 1 on its center bin.
#[allow(clippy::needless_range_loop)]
pub fn mel_filterbank(n_filters: usize, fft_size: usize, sample_rate_hz: u32) -> Vec<Vec<f64>> {
    let nyquist = sample_rate_hz as f64 / 2.0;
    let mel_max = mel_scale(nyquist).expect("nyquist is non-negative");
    let bin_of = |mel: f64| -> usize {
        let hz = mel_to_hz(mel);
        ((fft_size as f64 + 1.0) * hz / sample_rate_hz as f64).floor() as usize
    };
    let edges: Vec<usize> = (0..n_filters + 2)
        .map(|i| bin_of(mel_max * i as f64 / (n_filters + 1) as f64).min(fft_size / 2))
        .collect();

    let mut bank = vec![vec![0.0; fft_size / 2 + 1]; n_filters];
    for m in 1..=n_filters {
        let (lo, center, hi) = (edges[m - 1], edges[m], edges[m + 1]);
        let row = &mut bank[m - 1];
        for k in lo..center {
            row[k] = (k - lo) as f64 / (center - lo).max(1) as f64;
        }
        row[center] = 1.0;
        for k in center + 1..=hi {
            row[k] = (hi - k) as f64 / (hi - center).max(1) as f64;
        }
    }
    bank
}

/// Orthonormal type-II discrete cosine transform.
pub fn dct_ii(x: &[f64]) -> Vec<f64> {
    let m = x.len();
    (0..m)
        .map(|k| {
            let scale = if k == 0 {
                (1.0 / m as f64).sqrt()
            } else {
                (2.0 / m as f64).sqrt()
            };
            scale
                * x.iter()
                    .enumerate()
                    .map(|(i, &v)| {
                        v * (std::f64::consts::PI * k as f64 * (i as f64 + 0.5) / m as f64).cos()
                    })
                    .sum::<f64>()
        })
        .collect()
}

/// Inverse of [`dct_ii`] (its transpose, by orthonormality).
pub fn dct_ii_inverse(c: &[f64]) -> Vec<f64> {
    let m = c.len();
    (0..m)
        .map(|i| {
            c.iter()
                .enumerate()
                .map(|(k, &v)| {
                    let scale = if k == 0 {
                        (1.0 / m as f64).sqrt()
                    } else {
                        (2.0 / m as f64).sqrt()
                    };
                    scale
                        * v
                        * (std::f64::consts::PI * k as f64 * (i as f64 + 0.5) / m as f64).cos()
                })
                .sum()
        })
        .collect()
}

/// Compute the MFCC matrix of an utterance.
///
/// Requires `n_coeffs <= n_filters` and at least one full analysis frame of
/// samples.
pub fn mfcc(signal: &AudioSignal, n_filters: usize, n_coeffs: usize) -> Result<MfccMatrix> {
    if n_coeffs == 0 || n_coeffs > n_filters {
        return Err(Error::InvalidParameter("n_coeffs must be in 1..=n_filters"));
    }
    let frame_length =
        ((FRAME_MS / 1000.0) * signal.sample_rate_hz as f64).round() as usize;
    if signal.samples.len() < frame_length {
        return Err(Error::SignalTooShort {
            len: signal.samples.len(),
            needed: frame_length,
        });
    }
    let frames = frame_signal(signal, FRAME_MS, HOP_MS, WindowKind::Hamming)?;
    let fft_size = frames.frame_length.next_power_of_two();
    let bank = mel_filterbank(n_filters, fft_size, signal.sample_rate_hz);

    let mut rows = Vec::with_capacity(frames.frames.len());
    for frame in &frames.frames {
        let spec = magnitude_spectrum(frame, fft_size, signal.sample_rate_hz)?;
        let log_energies: Vec<f64> = bank
            .iter()
            .map(|row| {
                let e: f64 = row.iter().zip(&spec.bins).map(|(w, b)| w * b).sum();
                e.max(LOG_FLOOR).ln()
            })
            .collect();
        let mut coeffs = dct_ii(&log_energies);
        coeffs.truncate(n_coeffs);
        rows.push(coeffs);
    }

    let included = rows.len() * (n_coeffs - 1);
    let mean_mfcc = if included == 0 {
        0.0
    } else {
        rows.iter().flat_map(|r| &r[1..]).sum::<f64>() / included as f64
    };
    Ok(MfccMatrix {
        frames: rows,
        n_coeffs,
        mean_mfcc,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth;

    #[test]
    fn mel_fixed_points() {
        assert_eq!(mel_scale(0.0).unwrap(), 0.0);
        assert!((mel_scale(1000.0).unwrap() - 999.99).abs() < 0.01);
        // 2595·log10(2)
        assert!((mel_scale(700.0).unwrap() - 781.17).abs() < 0.01);
        assert!(matches!(
            mel_scale(-1.0),
            Err(Error::NegativeFrequency(_))
        ));
    }

    #[test]
    fn mel_is_strictly_increasing() {
        let mut prev = -1.0;
        for f in 0..=8000 {
            let m = mel_scale(f as f64).unwrap();
            assert!(m > prev, "not increasing at {f} Hz");
            prev = m;
        }
    }

    #[test]
    fn mel_round_trip() {
        for f in [0.0, 120.0, 700.0, 3400.0, 7999.0] {
            let back = mel_to_hz(mel_scale(f).unwrap());
            assert!((back - f).abs() < 1e-6, "{f} -> {back}");
        }
    }

    #[test]
    fn filterbank_rows_are_nonnegative_and_peak_at_one() {
        let bank = mel_filterbank(26, 512, 16000);
        assert_eq!(bank.len(), 26);
        for row in &bank {
            assert_eq!(row.len(), 257);
            assert!(row.iter().all(|&w| w >= 0.0));
            let max = row.iter().fold(0.0f64, |m, &w| m.max(w));
            assert_eq!(max, 1.0);
        }
    }

    #[test]
    fn filterbank_covers_interior_bins() {
        let bank = mel_filterbank(26, 512, 16000);
        let first_edge = bank
            .iter()
            .flat_map(|r| r.iter().position(|&w| w > 0.0))
            .min()
            .unwrap();
        let last_edge = bank
            .iter()
            .flat_map(|r| r.iter().rposition(|&w| w > 0.0))
            .max()
            .unwrap();
        for k in first_edge..=last_edge {
            let total: f64 = bank.iter().map(|r| r[k]).sum();
            assert!(total > 0.0, "bin {k} uncovered");
        }
    }

    #[test]
    fn dct_orthogonality_round_trip() {
        let x: Vec<f64> = synth::white_noise_samples(4, 26);
        let c = dct_ii(&x);
        let back = dct_ii_inverse(&c);
        for (a, b) in x.iter().zip(&back) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn silence_yields_identical_frames_and_zero_mean() {
        let silence = AudioSignal::new(vec![0.0; 16000], 16000).unwrap();
        let m = mfcc(&silence, 26, 13).unwrap();
        for row in &m.frames {
            assert_eq!(row.len(), 13);
            for (a, b) in row.iter().zip(&m.frames[0]) {
                assert_eq!(a, b);
            }
        }
        assert!(m.mean_mfcc.abs() < 1e-9);
    }

    #[test]
    fn mfcc_rejects_short_signals_and_bad_orders() {
        let short = AudioSignal::new(vec![0.1; 100], 16000).unwrap();
        assert!(matches!(
            mfcc(&short, 26, 13),
            Err(Error::SignalTooShort { .. })
        ));
        let ok = synth::tone(440.0, 16000, 4800);
        assert!(mfcc(&ok, 26, 27).is_err());
    }

    #[test]
    fn mean_mfcc_is_amplitude_invariant() {
        let vowel = synth::pulse_train_vowel(
            &[(500.0, 0.95), (1500.0, 0.95), (2500.0, 0.9)],
            100.0,
            16000,
            16000,
        );
        let base = mfcc(&vowel, 26, 13).unwrap();
        let scaled = mfcc(&vowel.scaled(2.0), 26, 13).unwrap();
        let rel = (base.mean_mfcc - scaled.mean_mfcc).abs()
            / base.mean_mfcc.abs().max(1e-12);
        assert!(rel < 1e-6, "relative drift {rel}");
    }

    #[test]
    fn pure_tone_occupies_at_most_two_bins() {
        let sig = synth::tone(1000.0, 16000, 16000);
        let bw = vocal_tract_bandwidth(&sig, -20.0).unwrap();
        let bin_hz = 16000.0 / 512.0;
        assert!(bw.bw_hz <= 2.0 * bin_hz + 1e-9, "bw {}", bw.bw_hz);
    }

    #[test]
    fn two_tones_span_their_separation() {
        let a = synth::tone(300.0, 16000, 16000);
        let b = synth::tone(3400.0, 16000, 16000);
        let mix: Vec<f64> = a
            .samples
            .iter()
            .zip(&b.samples)
            .map(|(x, y)| x + y)
            .collect();
        let sig = AudioSignal::new(mix, 16000).unwrap();
        let bw = vocal_tract_bandwidth(&sig, -20.0).unwrap();
        // The Hamming main lobe holds bins above -20 dB up to ~1.5 bins
        // beyond each off-bin tone, so allow a few bins around the
        // tone separation.
        assert!(
            (bw.bw_hz - 3100.0).abs() <= 100.0,
            "bw {} fmin {} fmax {}",
            bw.bw_hz,
            bw.f_min_hz,
            bw.f_max_hz
        );
    }

    #[test]
    fn silent_signal_is_an_error() {
        let silence = AudioSignal::new(vec![0.0; 16000], 16000).unwrap();
        assert!(matches!(
            vocal_tract_bandwidth(&silence, -20.0),
            Err(Error::SilentSignal)
        ));
    }

    #[test]
    fn bandwidth_grows_as_threshold_drops() {
        let vowel = synth::pulse_train_vowel(
            &[(500.0, 0.97), (2500.0, 0.9)],
            100.0,
            16000,
            16000,
        );
        let mut prev = 0.0;
        for db in [-6.0, -12.0, -20.0, -40.0, -60.0] {
            let bw = vocal_tract_bandwidth(&vowel, db).unwrap().bw_hz;
            assert!(bw >= prev, "threshold {db}: {bw} < {prev}");
            prev = bw;
        }
    }

    #[test]
    fn bandwidth_is_amplitude_invariant() {
        let vowel = synth::pulse_train_vowel(&[(700.0, 0.95)], 110.0, 16000, 8000);
        let a = vocal_tract_bandwidth(&vowel, -20.0).unwrap();
        let b = vocal_tract_bandwidth(&vowel.scaled(2.0), -20.0).unwrap();
        assert_eq!(a.bw_hz, b.bw_hz);
    }
}
