//! Error type shared by all analysis stages.

use std::path::PathBuf;

/// Errors produced anywhere in the analysis pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("file not found: {0}")]
    FileNotFound(PathBuf),
    #[error("corrupt WAV header: {0}")]
    CorruptHeader(String),
    #[error("unsupported WAV format: {0}")]
    UnsupportedFormat(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("signal is empty")]
    EmptySignal,
    #[error("sample {index} is not finite")]
    NonFiniteSample { index: usize },
    #[error("silent signal: spectrum peak is zero")]
    SilentSignal,
    #[error("signal too short: {len} samples, need at least {needed}")]
    SignalTooShort { len: usize, needed: usize },
    #[error("FFT size {0} is not a power of two")]
    NonPowerOfTwoSize(usize),
    #[error("FFT size {fft_size} is smaller than the frame length {frame_len}")]
    FftTooSmall { fft_size: usize, frame_len: usize },

    #[error("autocorrelation lag {max_lag} is not below the frame length {frame_len}")]
    LagTooLarge { max_lag: usize, frame_len: usize },
    #[error("autocorrelation is numerically singular")]
    SingularAutocorrelation,
    #[error("root finding did not converge: worst residual {residual:e}")]
    RootFindingDivergence { residual: f64 },

    #[error("negative frequency: {0}")]
    NegativeFrequency(f64),
    #[error("sequence too short: {len} samples, need at least {needed}")]
    SequenceTooShort { len: usize, needed: usize },
    #[error("band count {n_bands} too large: band edges collapse")]
    BandCountTooLarge { n_bands: usize },
    #[error("every frame is silent")]
    AllSilentFrames,
    #[error("track lengths differ: {formants} formant frames vs {energies} energy frames")]
    TrackLengthMismatch { formants: usize, energies: usize },

    #[error("feature `{0}` is not finite")]
    NonFiniteFeature(&'static str),
    #[error("calibration stage `{stage}` has no examples on one side of the split")]
    InsufficientClassCoverage { stage: &'static str },

    #[error("malformed corpus file name: {0}")]
    MalformedName(String),
    #[error("unknown emotion letter `{0}` in corpus file name")]
    UnknownEmotionLetter(char),
    #[error("corpus contains no classifiable files")]
    EmptyCorpus,
    #[error("config parse error: {0}")]
    ConfigParse(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
    #[error("{stage} stage failed: {source}")]
    Feature {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Wrap an error with the name of the feature-extraction stage it came from.
    pub fn at_stage(self, stage: &'static str) -> Error {
        Error::Feature {
            stage,
            source: Box::new(self),
        }
    }
}
