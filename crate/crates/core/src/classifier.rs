//! The hierarchical six-emotion decision cascade and its threshold
//! calibration.
//!
//! Classification walks a fixed-order tree of binary threshold decisions,
//! one feature per stage:
//!
//! ```text
//! z1 > th_teo ──yes──▶ f1 > th_formant_f1 ? anger : disgust
//!      │no
//!      ▼
//! vt_bw on happy side ──yes──▶ happy
//!      │no
//!      ▼
//! duration on sad side ──yes──▶ sad
//!      │no
//!      ▼
//! mfcc_mean > th_mfcc ? boredom : neutral
//! ```
//!
//! Three comparison directions are fixed by the method itself: high `z1`
//! marks arousal, a higher first formant separates anger from disgust, and a
//! higher MFCC mean separates boredom from neutral. The happy and sad
//! directions are chosen during calibration. All comparisons are strict, so
//! a tie falls to the calmer branch.
//!
//! ```
//! use emovox::classifier::{classify, FeatureVector, ThresholdConfig, EmotionLabel};
//!
//! let angry = FeatureVector {
//!     z1: 102.8542, f1_hz: 384.0, vt_bw: 3000.0, duration_s: 1.2, mfcc_mean: 0.5,
//! };
//! let (label, trace) = classify(&angry, &ThresholdConfig::default()).unwrap();
//! assert_eq!(label, EmotionLabel::Anger);
//! assert_eq!(trace.stages.len(), 2); // teo stage, then the formant stage
//! ```

use std::fmt;

use crate::duration::{band_energies, classify_frames, duration_summary, relative_energy_floor};
use crate::error::{Error, Result};
use crate::formant::{formants_per_frame, median_first_formant};
use crate::signal::AudioSignal;
use crate::spectral::{mfcc, vocal_tract_bandwidth};
use crate::teo::teo_feature;
use crate::AnalysisParams;

/// The five per-utterance scalars feeding the cascade.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct FeatureVector {
    /// TEO envelope-area aggregate.
    pub z1: f64,
    /// Median first-formant frequency, Hz; 0 when no frame was voiced.
    pub f1_hz: f64,
    /// Vocal-tract spectrum bandwidth, Hz.
    pub vt_bw: f64,
    /// Total speech duration, seconds.
    pub duration_s: f64,
    /// Grand mean of MFCC coefficients 1 and up.
    pub mfcc_mean: f64,
}

impl FeatureVector {
    fn validate(&self) -> Result<()> {
        let fields = [
            ("z1", self.z1),
            ("f1_hz", self.f1_hz),
            ("vt_bw", self.vt_bw),
            ("duration_s", self.duration_s),
            ("mfcc_mean", self.mfcc_mean),
        ];
        for (name, value) in fields {
            if !value.is_finite() {
                return Err(Error::NonFiniteFeature(name));
            }
        }
        Ok(())
    }
}

/// The six emotional states the cascade can emit.
///
/// Fear exists in the source corpus but is rejected at ingestion and never
/// classified.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EmotionLabel {
    Neutral,
    Happy,
    Disgust,
    Sad,
    Boredom,
    Anger,
}

impl EmotionLabel {
    pub const ALL: [EmotionLabel; 6] = [
        EmotionLabel::Neutral,
        EmotionLabel::Happy,
        EmotionLabel::Disgust,
        EmotionLabel::Sad,
        EmotionLabel::Boredom,
        EmotionLabel::Anger,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            EmotionLabel::Neutral => "neutral",
            EmotionLabel::Happy => "happy",
            EmotionLabel::Disgust => "disgust",
            EmotionLabel::Sad => "sad",
            EmotionLabel::Boredom => "boredom",
            EmotionLabel::Anger => "anger",
        }
    }

    /// Position in [`EmotionLabel::ALL`], used for confusion-matrix indexing.
    pub fn index(&self) -> usize {
        Self::ALL.iter().position(|l| l == self).unwrap()
    }
}

impl fmt::Display for EmotionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Which side of a threshold selects the stage's positive branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Gt,
    Lt,
}

impl Direction {
    /// Strict comparison; a tie never passes.
    pub fn passes(&self, value: f64, threshold: f64) -> bool {
        match self {
            Direction::Gt => value > threshold,
            Direction::Lt => value < threshold,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Direction::Gt => "gt",
            Direction::Lt => "lt",
        }
    }

    fn parse(s: &str) -> Result<Self> {
        match s {
            "gt" => Ok(Direction::Gt),
            "lt" => Ok(Direction::Lt),
            other => Err(Error::ConfigParse(format!(
                "direction must be `gt` or `lt`, got `{other}`"
            ))),
        }
    }
}

/// Stage names in cascade order.
pub const STAGE_TEO: &str = "teo";
pub const STAGE_FORMANT: &str = "formant";
pub const STAGE_VT_BW: &str = "vt_bw";
pub const STAGE_DURATION: &str = "duration";
pub const STAGE_MFCC: &str = "mfcc";

/// Calibrated thresholds and split directions for every cascade stage.
///
/// The teo, formant, and mfcc directions are fixed (`gt`) by the method;
/// only the happy and sad directions are free.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdConfig {
    pub th_teo: f64,
    pub th_formant_f1: f64,
    pub th_vtbw: f64,
    pub th_duration: f64,
    pub th_mfcc: f64,
    pub dir_happy: Direction,
    pub dir_sad: Direction,
}

impl Default for ThresholdConfig {
    /// Uncalibrated defaults bracketing typical trace values; corpus work
    /// should replace them via [`calibrate`].
    fn default() -> Self {
        Self {
            th_teo: 80.0,
            th_formant_f1: 350.0,
            th_vtbw: 200.0,
            th_duration: 0.5,
            th_mfcc: 0.6,
            dir_happy: Direction::Gt,
            dir_sad: Direction::Gt,
        }
    }
}

impl ThresholdConfig {
    /// Serialize as a flat `name = value` document. Floats use the shortest
    /// representation that round-trips bit-exactly.
    pub fn to_text(&self) -> String {
        format!(
            "th_teo = {}\nth_formant_f1 = {}\nth_vtbw = {}\nth_duration = {}\nth_mfcc = {}\n\
             direction.teo = gt\ndirection.formant = gt\ndirection.happy = {}\n\
             direction.sad = {}\ndirection.mfcc = gt\n",
            self.th_teo,
            self.th_formant_f1,
            self.th_vtbw,
            self.th_duration,
            self.th_mfcc,
            self.dir_happy.as_str(),
            self.dir_sad.as_str(),
        )
    }

    /// Parse the flat key-value format written by [`ThresholdConfig::to_text`].
    /// Blank lines and `#` comments are allowed; unknown keys, missing keys,
    /// and flipped fixed directions are rejected.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut cfg = ThresholdConfig::default();
        let mut seen = std::collections::BTreeSet::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::ConfigParse(format!("line {}: expected `name = value`", lineno + 1))
            })?;
            let (key, value) = (key.trim(), value.trim());
            let float = || -> Result<f64> {
                value.parse::<f64>().map_err(|_| {
                    Error::ConfigParse(format!("line {}: `{value}` is not a number", lineno + 1))
                })
            };
            match key {
                "th_teo" => cfg.th_teo = float()?,
                "th_formant_f1" => cfg.th_formant_f1 = float()?,
                "th_vtbw" => cfg.th_vtbw = float()?,
                "th_duration" => cfg.th_duration = float()?,
                "th_mfcc" => cfg.th_mfcc = float()?,
                "direction.happy" => cfg.dir_happy = Direction::parse(value)?,
                "direction.sad" => cfg.dir_sad = Direction::parse(value)?,
                "direction.teo" | "direction.formant" | "direction.mfcc" => {
                    if Direction::parse(value)? != Direction::Gt {
                        return Err(Error::ConfigParse(format!(
                            "`{key}` is fixed to `gt` by the method"
                        )));
                    }
                }
                other => {
                    return Err(Error::ConfigParse(format!("unknown key `{other}`")));
                }
            }
            seen.insert(key.split('.').next().unwrap().to_string());
        }
        for required in ["th_teo", "th_formant_f1", "th_vtbw", "th_duration", "th_mfcc"] {
            if !seen.contains(required) {
                return Err(Error::ConfigParse(format!("missing key `{required}`")));
            }
        }
        Ok(cfg)
    }

    pub fn write_file(&self, path: &std::path::Path) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn read_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            if e.kind() == std::io::ErrorKind::NotFound {
                Error::FileNotFound(path.to_path_buf())
            } else {
                Error::Io(e)
            }
        })?;
        Self::from_text(&text)
    }
}

/// One recorded cascade decision.
#[derive(Debug, Clone, serde::Serialize)]
pub struct TraceStage {
    pub stage: &'static str,
    pub value: f64,
    pub threshold: f64,
    pub direction: Direction,
    /// Whether the strict comparison selected the stage's positive branch.
    pub passed: bool,
    /// Branch actually taken.
    pub branch: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Ordered record of every decision taken for one feature vector. The
/// trace is the decision: replaying the recorded comparisons reproduces
/// the label.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ClassificationTrace {
    pub stages: Vec<TraceStage>,
    pub label: EmotionLabel,
}

impl fmt::Display for ClassificationTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.stages {
            let op = match s.direction {
                Direction::Gt => ">",
                Direction::Lt => "<",
            };
            writeln!(
                f,
                "stage {}: {:.4} {} {:.4} is {} -> {}{}",
                s.stage,
                s.value,
                op,
                s.threshold,
                s.passed,
                s.branch,
                s.note.as_deref().map(|n| format!(" ({n})")).unwrap_or_default()
            )?;
        }
        write!(f, "label: {}", self.label)
    }
}

/// Run the cascade over one feature vector.
///
/// Always returns exactly one label for finite features, together with the
/// full decision trace.
pub fn classify(
    features: &FeatureVector,
    config: &ThresholdConfig,
) -> Result<(EmotionLabel, ClassificationTrace)> {
    features.validate()?;
    let mut stages = Vec::with_capacity(4);

    let aroused = features.z1 > config.th_teo;
    stages.push(TraceStage {
        stage: STAGE_TEO,
        value: features.z1,
        threshold: config.th_teo,
        direction: Direction::Gt,
        passed: aroused,
        branch: if aroused { "anger|disgust" } else { "calm" },
        note: None,
    });

    let label = if aroused {
        let note = (features.f1_hz <= 0.0)
            .then(|| "no voiced formants; defaulting to disgust".to_string());
        let angry = features.f1_hz > config.th_formant_f1;
        stages.push(TraceStage {
            stage: STAGE_FORMANT,
            value: features.f1_hz,
            threshold: config.th_formant_f1,
            direction: Direction::Gt,
            passed: angry,
            branch: if angry { "anger" } else { "disgust" },
            note,
        });
        if angry {
            EmotionLabel::Anger
        } else {
            EmotionLabel::Disgust
        }
    } else {
        let happy = config.dir_happy.passes(features.vt_bw, config.th_vtbw);
        stages.push(TraceStage {
            stage: STAGE_VT_BW,
            value: features.vt_bw,
            threshold: config.th_vtbw,
            direction: config.dir_happy,
            passed: happy,
            branch: if happy { "happy" } else { "sad|boredom|neutral" },
            note: None,
        });
        if happy {
            EmotionLabel::Happy
        } else {
            let sad = config.dir_sad.passes(features.duration_s, config.th_duration);
            stages.push(TraceStage {
                stage: STAGE_DURATION,
                value: features.duration_s,
                threshold: config.th_duration,
                direction: config.dir_sad,
                passed: sad,
                branch: if sad { "sad" } else { "boredom|neutral" },
                note: None,
            });
            if sad {
                EmotionLabel::Sad
            } else {
                let bored = features.mfcc_mean > config.th_mfcc;
                stages.push(TraceStage {
                    stage: STAGE_MFCC,
                    value: features.mfcc_mean,
                    threshold: config.th_mfcc,
                    direction: Direction::Gt,
                    passed: bored,
                    branch: if bored { "boredom" } else { "neutral" },
                    note: None,
                });
                if bored {
                    EmotionLabel::Boredom
                } else {
                    EmotionLabel::Neutral
                }
            }
        }
    };

    Ok((label, ClassificationTrace { stages, label }))
}

/// Result of fitting one cascade stage.
#[derive(Debug, Clone, serde::Serialize)]
pub struct StageFit {
    pub stage: &'static str,
    pub threshold: f64,
    pub direction: Direction,
    /// Fraction of the stage's training subset split correctly.
    pub accuracy: f64,
    /// Set when the method-fixed direction fits the data worse than its
    /// flip, a sign the training features contradict the method.
    pub direction_warning: bool,
}

/// A full calibration: the config plus per-stage training diagnostics.
#[derive(Debug, Clone)]
pub struct Calibration {
    pub config: ThresholdConfig,
    pub stages: Vec<StageFit>,
}

/// Fit every stage threshold on labeled feature vectors.
///
/// Each stage scans the midpoints of adjacent sorted feature values of its
/// own training subset and keeps the threshold maximizing that stage's
/// binary split accuracy (lowest threshold on ties). Fixed-direction stages
/// keep their direction and only warn when the flip would fit better; the
/// happy and sad stages pick whichever direction fits best (`gt` on ties).
pub fn calibrate(labeled: &[(FeatureVector, EmotionLabel)]) -> Result<Calibration> {
    use EmotionLabel::*;
    let subset = |keep: &dyn Fn(EmotionLabel) -> bool,
                  feature: &dyn Fn(&FeatureVector) -> f64,
                  positive: &dyn Fn(EmotionLabel) -> bool|
     -> Vec<(f64, bool)> {
        labeled
            .iter()
            .filter(|(_, l)| keep(*l))
            .map(|(f, l)| (feature(f), positive(*l)))
            .collect()
    };

    let teo = fit_stage(
        STAGE_TEO,
        &subset(&|_| true, &|f| f.z1, &|l| matches!(l, Anger | Disgust)),
        Some(Direction::Gt),
    )?;
    let formant = fit_stage(
        STAGE_FORMANT,
        &subset(
            &|l| matches!(l, Anger | Disgust),
            &|f| f.f1_hz,
            &|l| l == Anger,
        ),
        Some(Direction::Gt),
    )?;
    let vtbw = fit_stage(
        STAGE_VT_BW,
        &subset(
            &|l| matches!(l, Neutral | Happy | Sad | Boredom),
            &|f| f.vt_bw,
            &|l| l == Happy,
        ),
        None,
    )?;
    let duration = fit_stage(
        STAGE_DURATION,
        &subset(
            &|l| matches!(l, Neutral | Sad | Boredom),
            &|f| f.duration_s,
            &|l| l == Sad,
        ),
        None,
    )?;
    let mfcc = fit_stage(
        STAGE_MFCC,
        &subset(&|l| matches!(l, Neutral | Boredom), &|f| f.mfcc_mean, &|l| {
            l == Boredom
        }),
        Some(Direction::Gt),
    )?;

    let config = ThresholdConfig {
        th_teo: teo.threshold,
        th_formant_f1: formant.threshold,
        th_vtbw: vtbw.threshold,
        th_duration: duration.threshold,
        th_mfcc: mfcc.threshold,
        dir_happy: vtbw.direction,
        dir_sad: duration.direction,
    };
    Ok(Calibration {
        config,
        stages: vec![teo, formant, vtbw, duration, mfcc],
    })
}

/// Accuracy of `direction`/`threshold` on `(value, is_positive)` samples.
fn split_accuracy(samples: &[(f64, bool)], threshold: f64, direction: Direction) -> f64 {
    let correct = samples
        .iter()
        .filter(|(v, pos)| direction.passes(*v, threshold) == *pos)
        .count();
    correct as f64 / samples.len() as f64
}

fn fit_stage(
    stage: &'static str,
    samples: &[(f64, bool)],
    fixed: Option<Direction>,
) -> Result<StageFit> {
    let positives = samples.iter().filter(|(_, p)| *p).count();
    if positives == 0 || positives == samples.len() {
        return Err(Error::InsufficientClassCoverage { stage });
    }

    let mut values: Vec<f64> = samples.iter().map(|(v, _)| *v).collect();
    values.sort_by(f64::total_cmp);
    values.dedup();
    let candidates: Vec<f64> = if values.len() == 1 {
        values.clone()
    } else {
        values.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
    };

    let best_for = |direction: Direction| -> (f64, f64) {
        let mut best = (candidates[0], -1.0);
        for &th in &candidates {
            let acc = split_accuracy(samples, th, direction);
            if acc > best.1 {
                best = (th, acc);
            }
        }
        best
    };

    match fixed {
        Some(direction) => {
            let (threshold, accuracy) = best_for(direction);
            let flipped = best_for(match direction {
                Direction::Gt => Direction::Lt,
                Direction::Lt => Direction::Gt,
            });
            Ok(StageFit {
                stage,
                threshold,
                direction,
                accuracy,
                direction_warning: flipped.1 > accuracy,
            })
        }
        None => {
            let gt = best_for(Direction::Gt);
            let lt = best_for(Direction::Lt);
            let (direction, (threshold, accuracy)) = if lt.1 > gt.1 {
                (Direction::Lt, lt)
            } else {
                (Direction::Gt, gt)
            };
            Ok(StageFit {
                stage,
                threshold,
                direction,
                accuracy,
                direction_warning: false,
            })
        }
    }
}

/// Extract the full feature vector from a signal with one shared front end.
///
/// Errors from individual extractors are wrapped with the failing stage's
/// name.
pub fn extract_features(signal: &AudioSignal, params: &AnalysisParams) -> Result<FeatureVector> {
    // The bandwidth stage runs first: it is the cheapest place to catch
    // silent input, and the other extractors assume a live spectrum.
    let bw = vocal_tract_bandwidth(signal, params.bw_threshold_db)
        .map_err(|e| e.at_stage("spectral"))?;

    let teo = teo_feature(
        signal,
        params.n_bands,
        params.teo_frame_ms,
        params.teo_scale,
    )
    .map_err(|e| e.at_stage(STAGE_TEO))?;

    let formant_track =
        formants_per_frame(signal, params).map_err(|e| e.at_stage(STAGE_FORMANT))?;
    let f1_hz = median_first_formant(&formant_track).unwrap_or(0.0);

    let energies = band_energies(signal, params.frame_ms, params.hop_ms)
        .map_err(|e| e.at_stage(STAGE_DURATION))?;
    let floor = relative_energy_floor(&energies, params.silence_floor_db);
    let track = classify_frames(
        &formant_track,
        &energies,
        floor,
        &params.duration_rules,
        params.hop_ms / 1000.0,
    )
    .map_err(|e| e.at_stage(STAGE_DURATION))?;
    let durations = duration_summary(&track);

    let cepstra = mfcc(signal, params.n_mel_filters, params.n_mfcc_coeffs)
        .map_err(|e| e.at_stage(STAGE_MFCC))?;

    Ok(FeatureVector {
        z1: teo.z1,
        f1_hz,
        vt_bw: bw.bw_hz,
        duration_s: durations.total_speech_s,
        mfcc_mean: cepstra.mean_mfcc,
    })
}
