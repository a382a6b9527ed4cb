//! Shared helpers for integration tests: a deterministic synthetic corpus
//! with feature characteristics planted on known sides of every cascade
//! stage.

use std::path::Path;

use emovox::classifier::EmotionLabel;
use emovox::wav::write_wav_mono16;
use emovox::{synth, AudioSignal};

pub const RATE: u32 = 16000;

fn mix(a: &[f64], b: &[f64], wa: f64, wb: f64) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| wa * x + wb * y).collect()
}

/// Synthesize one utterance whose extracted features land on `emotion`'s
/// side of each decision stage:
///
/// - anger, disgust: clean pulse-train vowels (periodic in every band, so
///   `z1` is high); anger gets the high first formant.
/// - happy: noise-excited vowel plus strong 3.5-7.5 kHz noise, so the
///   occupied bandwidth is wide while `z1` stays low.
/// - sad: a 2 s low-band noise vowel (long duration).
/// - boredom: dark, tilted noise vowel (large positive cepstral mean).
/// - neutral: flat-ish noise vowel.
///
/// `jitter` in about `[-1, 1]` perturbs pitch and formants so corpus
/// entries are not identical; `seed` drives all noise.
pub fn utterance(emotion: EmotionLabel, seed: u64, jitter: f64) -> AudioSignal {
    let j = jitter;
    let mut samples = match emotion {
        EmotionLabel::Anger => {
            let exc = synth::pulse_train(105.0 + 3.0 * j, RATE, 12800);
            synth::all_pole(
                &[(750.0 + 15.0 * j, 0.97), (1800.0, 0.96), (2900.0, 0.95)],
                RATE,
                &exc,
            )
        }
        EmotionLabel::Disgust => {
            let exc = synth::pulse_train(88.0 + 3.0 * j, RATE, 12800);
            synth::all_pole(
                &[(280.0 + 10.0 * j, 0.97), (1200.0, 0.96), (2400.0, 0.95)],
                RATE,
                &exc,
            )
        }
        EmotionLabel::Happy => {
            let exc = synth::white_noise_samples(seed, 12800);
            let mut voiced = synth::all_pole(
                &[(500.0 + 15.0 * j, 0.88), (1500.0, 0.87), (2500.0, 0.86)],
                RATE,
                &exc,
            );
            synth::normalize_peak(&mut voiced, 1.0);
            let hf = synth::band_noise_samples(seed + 7, 3500.0, 7500.0, RATE, 12800);
            mix(&voiced, &hf, 0.7, 0.45)
        }
        EmotionLabel::Sad => {
            let exc = synth::white_noise_samples(seed, 32000);
            synth::all_pole(&[(350.0 + 10.0 * j, 0.88), (900.0, 0.86)], RATE, &exc)
        }
        EmotionLabel::Boredom => {
            let exc = synth::white_noise_samples(seed, 12800);
            synth::all_pole(
                &[(0.0, 0.9), (250.0 + 8.0 * j, 0.9), (700.0, 0.88)],
                RATE,
                &exc,
            )
        }
        EmotionLabel::Neutral => {
            let exc = synth::white_noise_samples(seed, 12800);
            synth::all_pole(
                &[(500.0 + 15.0 * j, 0.85), (1500.0, 0.85), (2500.0, 0.85)],
                RATE,
                &exc,
            )
        }
    };
    synth::normalize_peak(&mut samples, 0.5);
    AudioSignal::new(samples, RATE).unwrap()
}

/// Emotion letter of the corpus naming scheme.
pub fn letter(emotion: EmotionLabel) -> char {
    match emotion {
        EmotionLabel::Anger => 'W',
        EmotionLabel::Boredom => 'L',
        EmotionLabel::Disgust => 'E',
        EmotionLabel::Happy => 'F',
        EmotionLabel::Sad => 'T',
        EmotionLabel::Neutral => 'N',
    }
}

/// Write a 12-file corpus (two versions per emotion) into `dir` and return
/// the file names.
pub fn write_corpus(dir: &Path) -> Vec<String> {
    let mut names = Vec::new();
    for (e, emotion) in EmotionLabel::ALL.iter().enumerate() {
        for (v, (version, jitter)) in [('a', -1.0), ('b', 1.0)].iter().enumerate() {
            let seed = 10 + 10 * (2 * e + v) as u64;
            let signal = utterance(*emotion, seed, *jitter);
            let name = format!("{:02}a{:02}{}{}.wav", e + 3, e + 1, letter(*emotion), version);
            write_wav_mono16(&dir.join(&name), &signal.samples, RATE).unwrap();
            names.push(name);
        }
    }
    names
}
