//! Frame-level phoneme-class labeling and duration statistics.
//!
//! Frames are labeled in fixed priority order: silence (energy under the
//! floor), vowel (three or more formants with a low first formant),
//! semivowel (four or more formants whose spacings fall in the configured
//! windows), and consonant for everything else that is speech-active —
//! including frames whose energy sits in the 0-300 Hz or 640-2800 Hz
//! consonant bands.
//!
//! Class durations are frame counts times the hop, and "mean word duration"
//! is an alias for total speech duration here: the toolkit performs no word
//! segmentation.

use crate::error::{Error, Result};
use crate::formant::FormantSet;
use crate::signal::{frame_signal, magnitude_spectrum, AudioSignal, WindowKind};

/// Low consonant energy band, Hz.
pub const CONSONANT_LOW_BAND: (f64, f64) = (0.0, 300.0);
/// Mid consonant energy band, Hz.
pub const CONSONANT_MID_BAND: (f64, f64) = (640.0, 2800.0);

/// Phoneme class of one analysis frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhonemeClass {
    Vowel,
    Semivowel,
    Consonant,
    Silence,
}

/// Per-frame class labels with the hop that converts counts to seconds.
#[derive(Debug, Clone)]
pub struct PhonemeClassTrack {
    pub labels: Vec<PhonemeClass>,
    pub frame_hop_s: f64,
}

/// Spectral energies of one frame used by the labeling rules.
#[derive(Debug, Clone, Copy)]
pub struct FrameBandEnergy {
    /// Energy in the 0-300 Hz band.
    pub low: f64,
    /// Energy in the 640-2800 Hz band.
    pub mid: f64,
    /// Full-spectrum energy.
    pub total: f64,
}

/// Formant-spacing windows for the semivowel test, and the vowel F1 cap.
///
/// Only formants below `max_formant_hz` participate in the class tests:
/// prediction analysis scatters poles into high-frequency noise (fricative
/// energy lives at 4-8 kHz), and those pole clusters would otherwise pass
/// the literal vowel and semivowel tests.
#[derive(Debug, Clone, Copy)]
pub struct DurationRules {
    pub vowel_max_f1_hz: f64,
    pub f2_f1_hz: (f64, f64),
    pub f3_f2_hz: (f64, f64),
    pub f4_f2_hz: (f64, f64),
    /// Ceiling on formants considered by the class rules.
    pub max_formant_hz: f64,
}

impl Default for DurationRules {
    fn default() -> Self {
        Self {
            vowel_max_f1_hz: 1000.0,
            f2_f1_hz: (300.0, 1200.0),
            f3_f2_hz: (200.0, 1500.0),
            f4_f2_hz: (800.0, 2800.0),
            max_formant_hz: 4000.0,
        }
    }
}

/// Compute per-frame band energies from Hamming-windowed magnitude spectra.
pub fn band_energies(
    signal: &AudioSignal,
    frame_ms: f64,
    hop_ms: f64,
) -> Result<Vec<FrameBandEnergy>> {
    let frames = frame_signal(signal, frame_ms, hop_ms, WindowKind::Hamming)?;
    let fft_size = frames.frame_length.next_power_of_two();
    frames
        .frames
        .iter()
        .map(|frame| {
            let spec = magnitude_spectrum(frame, fft_size, signal.sample_rate_hz)?;
            Ok(FrameBandEnergy {
                low: spec.band_energy(CONSONANT_LOW_BAND.0, CONSONANT_LOW_BAND.1),
                mid: spec.band_energy(CONSONANT_MID_BAND.0, CONSONANT_MID_BAND.1),
                total: spec.energy(),
            })
        })
        .collect()
}

/// Silence floor: `floor_db` decibels below the loudest frame's energy.
pub fn relative_energy_floor(energies: &[FrameBandEnergy], floor_db: f64) -> f64 {
    let peak = energies.iter().fold(0.0f64, |p, e| p.max(e.total));
    peak * 10f64.powf(-floor_db / 10.0)
}

/// Label every frame given its formants and band energies.
///
/// The two tracks must be frame-aligned. The rules are deterministic: equal
/// inputs always produce equal tracks.
pub fn classify_frames(
    formant_track: &[FormantSet],
    band_energies: &[FrameBandEnergy],
    energy_floor: f64,
    rules: &DurationRules,
    frame_hop_s: f64,
) -> Result<PhonemeClassTrack> {
    if formant_track.len() != band_energies.len() {
        return Err(Error::TrackLengthMismatch {
            formants: formant_track.len(),
            energies: band_energies.len(),
        });
    }
    let labels = formant_track
        .iter()
        .zip(band_energies)
        .map(|(set, energy)| classify_frame(set, energy, energy_floor, rules))
        .collect();
    Ok(PhonemeClassTrack {
        labels,
        frame_hop_s,
    })
}

fn classify_frame(
    set: &FormantSet,
    energy: &FrameBandEnergy,
    energy_floor: f64,
    rules: &DurationRules,
) -> PhonemeClass {
    if energy.total < energy_floor || energy.total <= 0.0 {
        return PhonemeClass::Silence;
    }
    let f: Vec<f64> = set
        .formants
        .iter()
        .map(|f| f.frequency_hz)
        .filter(|&hz| hz < rules.max_formant_hz)
        .collect();
    if f.len() >= 3 && f[0] < rules.vowel_max_f1_hz {
        return PhonemeClass::Vowel;
    }
    if f.len() >= 4 {
        let in_window = |v: f64, (lo, hi): (f64, f64)| v >= lo && v <= hi;
        let (f1, f2, f3, f4) = (f[0], f[1], f[2], f[3]);
        if in_window(f2 - f1, rules.f2_f1_hz)
            && in_window(f3 - f2, rules.f3_f2_hz)
            && in_window(f4 - f2, rules.f4_f2_hz)
        {
            return PhonemeClass::Semivowel;
        }
    }
    // Speech-active frames failing the vowel and semivowel tests are
    // consonants, whether or not their energy concentrates in the low or mid
    // consonant bands.
    PhonemeClass::Consonant
}

/// Per-class durations in seconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DurationSummary {
    pub vowel_s: f64,
    pub semivowel_s: f64,
    pub consonant_s: f64,
    /// Sum of the three class durations; silence is excluded.
    pub total_speech_s: f64,
    /// Alias of `total_speech_s`: no word segmentation is performed.
    pub mean_word_duration_s: f64,
}

/// Aggregate a class track into durations: `count × hop` per class.
pub fn duration_summary(track: &PhonemeClassTrack) -> DurationSummary {
    let count = |class: PhonemeClass| {
        track.labels.iter().filter(|&&l| l == class).count() as f64 * track.frame_hop_s
    };
    let vowel_s = count(PhonemeClass::Vowel);
    let semivowel_s = count(PhonemeClass::Semivowel);
    let consonant_s = count(PhonemeClass::Consonant);
    let total_speech_s = vowel_s + semivowel_s + consonant_s;
    DurationSummary {
        vowel_s,
        semivowel_s,
        consonant_s,
        total_speech_s,
        mean_word_duration_s: total_speech_s,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formant::{formants_per_frame, Formant};
    use crate::synth;
    use crate::AnalysisParams;

    fn set(freqs: &[f64]) -> FormantSet {
        FormantSet {
            formants: freqs
                .iter()
                .map(|&frequency_hz| Formant {
                    frequency_hz,
                    bandwidth_hz: 100.0,
                    radius: 0.95,
                })
                .collect(),
        }
    }

    fn energy(total: f64) -> FrameBandEnergy {
        FrameBandEnergy {
            low: total * 0.2,
            mid: total * 0.5,
            total,
        }
    }

    #[test]
    fn three_low_formants_make_a_vowel() {
        let track = classify_frames(
            &[set(&[500.0, 1500.0, 2500.0])],
            &[energy(1.0)],
            1e-6,
            &DurationRules::default(),
            0.015,
        )
        .unwrap();
        assert_eq!(track.labels, vec![PhonemeClass::Vowel]);
    }

    #[test]
    fn zero_energy_frames_are_silence() {
        let track = classify_frames(
            &[set(&[500.0, 1500.0, 2500.0]), FormantSet::default()],
            &[energy(0.0), energy(0.0)],
            1e-6,
            &DurationRules::default(),
            0.015,
        )
        .unwrap();
        assert!(track.labels.iter().all(|&l| l == PhonemeClass::Silence));
    }

    #[test]
    fn high_f1_spaced_formants_make_a_semivowel() {
        // F1 over the vowel cap, spacings inside every window.
        let track = classify_frames(
            &[set(&[1100.0, 1500.0, 2400.0, 3000.0])],
            &[energy(1.0)],
            1e-6,
            &DurationRules::default(),
            0.015,
        )
        .unwrap();
        assert_eq!(track.labels, vec![PhonemeClass::Semivowel]);
    }

    #[test]
    fn sparse_formants_fall_back_to_consonant() {
        let track = classify_frames(
            &[set(&[3000.0])],
            &[energy(1.0)],
            1e-6,
            &DurationRules::default(),
            0.015,
        )
        .unwrap();
        assert_eq!(track.labels, vec![PhonemeClass::Consonant]);
    }

    #[test]
    fn mismatched_tracks_are_rejected() {
        assert!(matches!(
            classify_frames(
                &[set(&[500.0])],
                &[],
                1e-6,
                &DurationRules::default(),
                0.015
            ),
            Err(Error::TrackLengthMismatch { .. })
        ));
    }

    #[test]
    fn sibilant_noise_is_labeled_consonant() {
        // Band-limited 4-8 kHz noise: no stable low formants.
        let samples: Vec<f64> = synth::band_noise_samples(11, 4000.0, 7800.0, 16000, 16000)
            .iter()
            .map(|x| 0.5 * x)
            .collect();
        let sig = AudioSignal::new(samples, 16000).unwrap();
        let params = AnalysisParams::default();
        let formants = formants_per_frame(&sig, &params).unwrap();
        let energies = band_energies(&sig, params.frame_ms, params.hop_ms).unwrap();
        let floor = relative_energy_floor(&energies, params.silence_floor_db);
        let track = classify_frames(
            &formants,
            &energies,
            floor,
            &params.duration_rules,
            params.hop_ms / 1000.0,
        )
        .unwrap();
        let consonant = track
            .labels
            .iter()
            .filter(|&&l| l == PhonemeClass::Consonant)
            .count();
        assert!(
            consonant * 2 > track.labels.len(),
            "{consonant} of {} frames",
            track.labels.len()
        );
    }

    #[test]
    fn durations_count_times_hop() {
        let track = PhonemeClassTrack {
            labels: vec![PhonemeClass::Vowel; 100],
            frame_hop_s: 0.015,
        };
        let summary = duration_summary(&track);
        assert!((summary.vowel_s - 1.5).abs() < 1e-12);
        assert!((summary.total_speech_s - 1.5).abs() < 1e-12);
        assert_eq!(summary.mean_word_duration_s, summary.total_speech_s);
    }

    #[test]
    fn empty_track_is_all_zero() {
        let summary = duration_summary(&PhonemeClassTrack {
            labels: vec![],
            frame_hop_s: 0.015,
        });
        assert_eq!(summary.total_speech_s, 0.0);
        assert_eq!(summary.vowel_s, 0.0);
    }

    #[test]
    fn class_durations_partition_speech_and_ignore_silence() {
        use PhonemeClass::*;
        let mut labels = vec![Vowel, Vowel, Semivowel, Consonant, Vowel, Consonant];
        let base = duration_summary(&PhonemeClassTrack {
            labels: labels.clone(),
            frame_hop_s: 0.015,
        });
        assert_eq!(
            base.vowel_s + base.semivowel_s + base.consonant_s,
            base.total_speech_s
        );
        labels.extend([Silence; 40]);
        let padded = duration_summary(&PhonemeClassTrack {
            labels,
            frame_hop_s: 0.015,
        });
        assert_eq!(base, padded);
    }

    #[test]
    fn synthetic_vowel_is_vowel_dominated() {
        let vowel = synth::pulse_train_vowel(
            &[(500.0, 0.97), (1500.0, 0.96), (2500.0, 0.95)],
            100.0,
            16000,
            16000,
        );
        let params = AnalysisParams::default();
        let formants = formants_per_frame(&vowel, &params).unwrap();
        let energies = band_energies(&vowel, params.frame_ms, params.hop_ms).unwrap();
        let floor = relative_energy_floor(&energies, params.silence_floor_db);
        let track = classify_frames(
            &formants,
            &energies,
            floor,
            &params.duration_rules,
            params.hop_ms / 1000.0,
        )
        .unwrap();
        let summary = duration_summary(&track);
        assert!(
            summary.vowel_s / summary.total_speech_s > 0.9,
            "vowel fraction {}",
            summary.vowel_s / summary.total_speech_s
        );
    }
}
