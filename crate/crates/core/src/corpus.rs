//! Corpus ingestion, batch evaluation, and reporting.
//!
//! Corpus files follow the Berlin emotional-speech naming scheme: a 2-char
//! speaker code, a 3-char text code, one emotion letter, and a version
//! letter (`03a01Wa.wav`). The letter map is W anger, L boredom, E disgust,
//! F happy, T sad, N neutral; A (fear) is listed but excluded from
//! classification, since the cascade only knows six states.
//!
//! Batch runs are embarrassingly parallel per file. One bad file never
//! aborts a run: its error lands in the report and the batch continues.
//! Output ordering is always by path, independent of worker count, and JSON
//! values are rounded to six significant digits so reports are byte-stable.

use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::classifier::{
    calibrate, classify, extract_features, Calibration, ClassificationTrace, EmotionLabel,
    FeatureVector, ThresholdConfig,
};
use crate::error::{Error, Result};
use crate::wav::load_wav;
use crate::AnalysisParams;

/// One corpus file, parsed from its name.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusEntry {
    pub path: PathBuf,
    pub speaker_id: String,
    pub text_code: String,
    /// `None` marks a fear recording: listed, never classified.
    pub emotion: Option<EmotionLabel>,
    pub version: char,
}

impl CorpusEntry {
    pub fn is_excluded(&self) -> bool {
        self.emotion.is_none()
    }
}

/// Parse a Berlin-style file name such as `03a01Wa.wav`.
pub fn parse_emodb_filename(name: &str) -> Result<CorpusEntry> {
    let stem = name
        .strip_suffix(".wav")
        .or_else(|| name.strip_suffix(".WAV"))
        .ok_or_else(|| Error::MalformedName(name.to_string()))?;
    let chars: Vec<char> = stem.chars().collect();
    if chars.len() != 7 || !chars.iter().all(|c| c.is_ascii_alphanumeric()) {
        return Err(Error::MalformedName(name.to_string()));
    }
    let emotion = match chars[5] {
        'W' => Some(EmotionLabel::Anger),
        'L' => Some(EmotionLabel::Boredom),
        'E' => Some(EmotionLabel::Disgust),
        'A' => None, // fear: excluded
        'F' => Some(EmotionLabel::Happy),
        'T' => Some(EmotionLabel::Sad),
        'N' => Some(EmotionLabel::Neutral),
        other => return Err(Error::UnknownEmotionLetter(other)),
    };
    Ok(CorpusEntry {
        path: PathBuf::from(name),
        speaker_id: chars[0..2].iter().collect(),
        text_code: chars[2..5].iter().collect(),
        emotion,
        version: chars[6],
    })
}

/// List every `.wav` in a directory as a corpus entry, sorted by path.
pub fn scan_corpus(dir: &Path) -> Result<Vec<CorpusEntry>> {
    let mut entries = Vec::new();
    for item in std::fs::read_dir(dir)? {
        let path = item?.path();
        let name = match path.file_name().and_then(|n| n.to_str()) {
            Some(n) => n,
            None => continue,
        };
        if !name.to_ascii_lowercase().ends_with(".wav") {
            continue;
        }
        let mut entry = parse_emodb_filename(name)?;
        entry.path = path;
        entries.push(entry);
    }
    entries.sort_by(|a, b| a.path.cmp(&b.path));
    Ok(entries)
}

/// Round to six significant digits, the fixed report precision.
fn sig6(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let magnitude = x.abs().log10().floor() as i32;
    let scale = 10f64.powi(5 - magnitude);
    (x * scale).round() / scale
}

fn round_trace(mut trace: ClassificationTrace) -> ClassificationTrace {
    for s in trace.stages.iter_mut() {
        s.value = sig6(s.value);
        s.threshold = sig6(s.threshold);
    }
    trace
}

fn round_features(f: FeatureVector) -> FeatureVector {
    FeatureVector {
        z1: sig6(f.z1),
        f1_hz: sig6(f.f1_hz),
        vt_bw: sig6(f.vt_bw),
        duration_s: sig6(f.duration_s),
        mfcc_mean: sig6(f.mfcc_mean),
    }
}

/// Run `op` inside a rayon pool with `jobs` workers (0 = rayon's default).
fn with_jobs<T: Send>(jobs: usize, op: impl FnOnce() -> T + Send) -> T {
    if jobs == 0 {
        op()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .expect("thread pool construction cannot fail for positive sizes")
            .install(op)
    }
}

/// Extract features for a batch of files into CSV text.
///
/// One row per input path (sorted), with an `error` column instead of
/// aborting on bad files.
pub fn run_extract(paths: &[PathBuf], params: &AnalysisParams, jobs: usize) -> Result<String> {
    let mut sorted: Vec<PathBuf> = paths.to_vec();
    sorted.sort();

    let results: Vec<(PathBuf, std::result::Result<FeatureVector, String>)> = with_jobs(jobs, || {
        sorted
            .par_iter()
            .map(|path| {
                let features = load_wav(path)
                    .and_then(|sig| extract_features(&sig, params))
                    .map_err(|e| e.to_string());
                (path.clone(), features)
            })
            .collect()
    });

    let mut writer = csv::Writer::from_writer(Vec::new());
    writer
        .write_record(["path", "z1", "f1_hz", "vt_bw", "duration_s", "mfcc_mean", "error"])
        .map_err(csv_error)?;
    for (path, outcome) in results {
        let path = path.to_string_lossy().into_owned();
        match outcome {
            Ok(f) => writer
                .write_record([
                    path,
                    f.z1.to_string(),
                    f.f1_hz.to_string(),
                    f.vt_bw.to_string(),
                    f.duration_s.to_string(),
                    f.mfcc_mean.to_string(),
                    String::new(),
                ])
                .map_err(csv_error)?,
            Err(msg) => writer
                .write_record([path, String::new(), String::new(), String::new(), String::new(), String::new(), msg])
                .map_err(csv_error)?,
        }
    }
    let bytes = writer.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

fn csv_error(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

/// Classification outcome for one file.
#[derive(Debug, Clone, serde::Serialize)]
pub struct FileResult {
    pub path: String,
    pub truth: EmotionLabel,
    pub predicted: EmotionLabel,
    pub features: FeatureVector,
    pub trace: ClassificationTrace,
}

/// Precision and recall of one class.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ClassMetrics {
    pub label: EmotionLabel,
    pub truth_count: usize,
    pub predicted_count: usize,
    pub precision: f64,
    pub recall: f64,
}

/// Full evaluation over a labeled corpus.
#[derive(Debug, Clone, serde::Serialize)]
pub struct EvaluationReport {
    /// Fraction of classified files predicted correctly.
    pub accuracy: f64,
    pub total_classified: usize,
    /// Emotion order used by the matrix rows and columns.
    pub labels: Vec<&'static str>,
    /// `confusion[truth][predicted]` counts.
    pub confusion: Vec<Vec<usize>>,
    pub per_class: Vec<ClassMetrics>,
    pub files: Vec<FileResult>,
    /// Fear recordings: listed, never classified.
    pub excluded: Vec<String>,
    /// Files that failed extraction, with their error text.
    pub errors: Vec<(String, String)>,
}

impl EvaluationReport {
    /// Deterministic JSON with stable key order and six-significant-digit
    /// values.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }

    /// Human-readable confusion matrix and summary.
    pub fn console_table(&self) -> String {
        let mut out = String::new();
        let width = 9;
        out.push_str(&format!("{:>width$} |", "truth\\pred"));
        for l in &self.labels {
            out.push_str(&format!("{l:>width$}"));
        }
        out.push('\n');
        out.push_str(&format!(
            "{}-+{}\n",
            "-".repeat(width),
            "-".repeat(width * self.labels.len())
        ));
        for (i, row) in self.confusion.iter().enumerate() {
            out.push_str(&format!("{:>width$} |", self.labels[i]));
            for c in row {
                out.push_str(&format!("{c:>width$}"));
            }
            out.push('\n');
        }
        out.push_str(&format!(
            "accuracy: {:.4} ({} of {} classified, {} excluded, {} errors)\n",
            self.accuracy,
            (0..6).map(|i| self.confusion[i][i]).sum::<usize>(),
            self.total_classified,
            self.excluded.len(),
            self.errors.len(),
        ));
        out
    }
}

/// Classify every non-excluded file of a corpus directory against a config.
pub fn run_evaluate(
    corpus_dir: &Path,
    config: &ThresholdConfig,
    params: &AnalysisParams,
    jobs: usize,
) -> Result<EvaluationReport> {
    let entries = scan_corpus(corpus_dir)?;
    let excluded: Vec<String> = entries
        .iter()
        .filter(|e| e.is_excluded())
        .map(|e| e.path.to_string_lossy().into_owned())
        .collect();
    let classifiable: Vec<&CorpusEntry> = entries.iter().filter(|e| !e.is_excluded()).collect();
    if classifiable.is_empty() {
        return Err(Error::EmptyCorpus);
    }

    let outcomes: Vec<std::result::Result<FileResult, (String, String)>> = with_jobs(jobs, || {
        classifiable
            .par_iter()
            .map(|entry| {
                let path = entry.path.to_string_lossy().into_owned();
                let truth = entry.emotion.expect("excluded entries are filtered out");
                load_wav(&entry.path)
                    .and_then(|sig| extract_features(&sig, params))
                    .and_then(|features| {
                        let (predicted, trace) = classify(&features, config)?;
                        Ok(FileResult {
                            path: path.clone(),
                            truth,
                            predicted,
                            features: round_features(features),
                            trace: round_trace(trace),
                        })
                    })
                    .map_err(|e| (path, e.to_string()))
            })
            .collect()
    });

    let mut files = Vec::new();
    let mut errors = Vec::new();
    let mut confusion = vec![vec![0usize; 6]; 6];
    for outcome in outcomes {
        match outcome {
            Ok(result) => {
                confusion[result.truth.index()][result.predicted.index()] += 1;
                files.push(result);
            }
            Err(pair) => errors.push(pair),
        }
    }
    let total_classified = files.len();
    let correct: usize = (0..6).map(|i| confusion[i][i]).sum();
    let accuracy = if total_classified == 0 {
        0.0
    } else {
        correct as f64 / total_classified as f64
    };

    let per_class = EmotionLabel::ALL
        .iter()
        .map(|label| {
            let i = label.index();
            let truth_count: usize = confusion[i].iter().sum();
            let predicted_count: usize = (0..6).map(|r| confusion[r][i]).sum();
            let ratio = |num: usize, den: usize| if den == 0 { 0.0 } else { sig6(num as f64 / den as f64) };
            ClassMetrics {
                label: *label,
                truth_count,
                predicted_count,
                precision: ratio(confusion[i][i], predicted_count),
                recall: ratio(confusion[i][i], truth_count),
            }
        })
        .collect();

    Ok(EvaluationReport {
        accuracy: sig6(accuracy),
        total_classified,
        labels: EmotionLabel::ALL.iter().map(|l| l.name()).collect(),
        confusion,
        per_class,
        files,
        excluded,
        errors,
    })
}

/// Calibrate thresholds on a labeled corpus directory.
///
/// Files that fail extraction are skipped (reported in the second return
/// value); calibration itself fails if a cascade stage then lacks coverage.
pub fn run_calibrate(
    corpus_dir: &Path,
    params: &AnalysisParams,
    jobs: usize,
) -> Result<(Calibration, Vec<(String, String)>)> {
    let entries = scan_corpus(corpus_dir)?;
    let classifiable: Vec<&CorpusEntry> = entries.iter().filter(|e| !e.is_excluded()).collect();
    if classifiable.is_empty() {
        return Err(Error::EmptyCorpus);
    }

    let outcomes: Vec<std::result::Result<(FeatureVector, EmotionLabel), (String, String)>> =
        with_jobs(jobs, || {
            classifiable
                .par_iter()
                .map(|entry| {
                    let truth = entry.emotion.expect("excluded entries are filtered out");
                    load_wav(&entry.path)
                        .and_then(|sig| extract_features(&sig, params))
                        .map(|features| (features, truth))
                        .map_err(|e| {
                            (entry.path.to_string_lossy().into_owned(), e.to_string())
                        })
                })
                .collect()
        });

    let mut labeled = Vec::new();
    let mut skipped = Vec::new();
    for outcome in outcomes {
        match outcome {
            Ok(pair) => labeled.push(pair),
            Err(pair) => skipped.push(pair),
        }
    }
    let calibration = calibrate(&labeled)?;
    Ok((calibration, skipped))
}

/// Classify a single file: the `classify` CLI verb.
pub fn classify_file(
    path: &Path,
    config: &ThresholdConfig,
    params: &AnalysisParams,
) -> Result<(FeatureVector, EmotionLabel, ClassificationTrace)> {
    let signal = load_wav(path)?;
    let features = extract_features(&signal, params)?;
    let (label, trace) = classify(&features, config)?;
    Ok((features, label, trace))
}
