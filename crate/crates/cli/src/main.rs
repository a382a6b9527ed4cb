//! Command-line front end: feature extraction, single-file classification,
//! corpus evaluation, and threshold calibration.
//!
//! Exit codes: 0 success, 1 usage error, 2 I/O or analysis error, 3 config
//! error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use emovox::corpus::{classify_file, run_calibrate, run_evaluate, run_extract};
use emovox::{AnalysisParams, Error, ThresholdConfig};

#[derive(Parser)]
#[command(
    name = "emovox",
    version,
    about = "Speech feature extraction and six-way emotion classification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Analysis knobs shared by every verb.
#[derive(Args, Clone, Copy)]
struct ParamArgs {
    /// Analysis frame length in milliseconds (hop is half of it).
    #[arg(long, default_value_t = 30.0)]
    frame_ms: f64,
    /// Linear-prediction order for formant analysis.
    #[arg(long, default_value_t = 12)]
    lpc_order: usize,
    /// Number of critical bands for the nonlinear feature.
    #[arg(long, default_value_t = 16)]
    n_bands: usize,
    /// Relative bandwidth threshold in dB; must be negative.
    #[arg(long, default_value_t = -20.0, allow_negative_numbers = true)]
    threshold_db: f64,
    /// Worker threads for batch verbs (0 = one per core).
    #[arg(long, default_value_t = 0)]
    jobs: usize,
}

impl ParamArgs {
    fn params(&self) -> AnalysisParams {
        AnalysisParams {
            frame_ms: self.frame_ms,
            hop_ms: self.frame_ms / 2.0,
            lpc_order: self.lpc_order,
            n_bands: self.n_bands,
            bw_threshold_db: self.threshold_db,
            ..AnalysisParams::default()
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Extract feature vectors from WAV files into CSV.
    Extract {
        /// WAV files to process.
        #[arg(required = true)]
        paths: Vec<PathBuf>,
        /// Write CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Classify a single WAV file and print the decision trace.
    Classify {
        path: PathBuf,
        /// Threshold config file (defaults to built-in uncalibrated values).
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Evaluate a labeled corpus directory: JSON report plus confusion matrix.
    Evaluate {
        corpus_dir: PathBuf,
        /// Threshold config file (defaults to built-in uncalibrated values).
        #[arg(long)]
        config: Option<PathBuf>,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Fit thresholds on a labeled corpus and write a config file.
    Calibrate {
        corpus_dir: PathBuf,
        /// Output config path.
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        params: ParamArgs,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::ConfigParse(_) => 3,
        Error::Feature { source, .. } => exit_code_for(source),
        _ => 2,
    }
}

fn load_config(path: &Option<PathBuf>) -> Result<ThresholdConfig, Error> {
    match path {
        Some(p) => ThresholdConfig::read_file(p),
        None => Ok(ThresholdConfig::default()),
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Extract { paths, out, params } => {
            let csv = run_extract(&paths, &params.params(), params.jobs)?;
            match out {
                Some(path) => std::fs::write(path, csv)?,
                None => print!("{csv}"),
            }
        }
        Command::Classify {
            path,
            config,
            params,
        } => {
            let config = load_config(&config)?;
            let (features, _, trace) = classify_file(&path, &config, &params.params())?;
            println!(
                "z1 = {:.4}\nf1_hz = {:.4}\nvt_bw = {:.4}\nduration_s = {:.4}\nmfcc_mean = {:.4}",
                features.z1, features.f1_hz, features.vt_bw, features.duration_s, features.mfcc_mean
            );
            println!("{trace}");
        }
        Command::Evaluate {
            corpus_dir,
            config,
            out,
            params,
        } => {
            let config = load_config(&config)?;
            let report = run_evaluate(&corpus_dir, &config, &params.params(), params.jobs)?;
            eprint!("{}", report.console_table());
            match out {
                Some(path) => std::fs::write(path, report.to_json())?,
                None => println!("{}", report.to_json()),
            }
        }
        Command::Calibrate {
            corpus_dir,
            out,
            params,
        } => {
            let (calibration, skipped) = run_calibrate(&corpus_dir, &params.params(), params.jobs)?;
            for (path, err) in &skipped {
                eprintln!("skipped {path}: {err}");
            }
            for fit in &calibration.stages {
                let warn = if fit.direction_warning {
                    "  [warning: data fits the flipped direction better]"
                } else {
                    ""
                };
                println!(
                    "stage {:<9} threshold {:>12.6} direction {} accuracy {:.4}{}",
                    fit.stage,
                    fit.threshold,
                    fit.direction.as_str(),
                    fit.accuracy,
                    warn
                );
            }
            calibration.config.write_file(&out)?;
            println!("wrote {}", out.display());
        }
    }
    Ok(())
}
