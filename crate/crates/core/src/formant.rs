//! Formant estimation from the roots of the linear-prediction polynomial.
//!
//! The analysis polynomial factors as `A(z) = Π (1 - c_k·z^-1)`; each
//! complex-conjugate pole pair close to the unit circle marks a vocal-tract
//! resonance at
//!
//! ```text
//! F_k = (Fs / 2π) · atan2(Im c_k, Re c_k)
//! B_k = -(Fs / π) · ln r_k          r_k = |c_k|
//! ```
//!
//! Pairs with radius below 0.7 are rejected as too damped to be formants,
//! as are real poles and frequencies within 50 Hz of DC or Nyquist.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lpc::{autocorrelate, levinson_durbin, pre_emphasis, LpcModel};
use crate::signal::{frame_signal, AudioSignal, WindowKind};
use crate::AnalysisParams;

/// Minimum pole radius for a resonance to count as a formant.
pub const FORMANT_RADIUS_MIN: f64 = 0.7;
/// Guard band excluding DC and Nyquist artifacts, in Hz.
pub const EDGE_GUARD_HZ: f64 = 50.0;

const ROOT_RESIDUAL_TOL: f64 = 1e-8;
const ROOT_MAX_ITER: usize = 200;

/// The z-plane poles of a fitted prediction polynomial.
#[derive(Debug, Clone)]
pub struct PoleSet {
    pub roots: Vec<Complex64>,
}

/// One vocal-tract resonance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Formant {
    pub frequency_hz: f64,
    pub bandwidth_hz: f64,
    pub radius: f64,
}

/// Formants of one frame, sorted ascending by frequency. May be empty.
#[derive(Debug, Clone, Default)]
pub struct FormantSet {
    pub formants: Vec<Formant>,
}

impl FormantSet {
    /// Frequency of the k-th formant (1-based), if present.
    pub fn frequency(&self, k: usize) -> Option<f64> {
        self.formants.get(k.checked_sub(1)?).map(|f| f.frequency_hz)
    }

    /// A frame is treated as voiced when it exposes at least three formants.
    pub fn is_voiced(&self) -> bool {
        self.formants.len() >= 3
    }
}

/// Find all roots of the prediction polynomial `A(z)` by Durand-Kerner
/// iteration, returned as z-plane poles.
///
/// Trailing zero coefficients lower the effective degree (the all-zero model
/// `A = 1` has no roots at all). Fails with `RootFindingDivergence` when the
/// iteration cap is reached before every root's relative residual drops
/// below `1e-8`.
pub fn polynomial_roots(model: &LpcModel) -> Result<PoleSet> {
    // A(z) = 1 + a1·z^-1 + ... + ad·z^-d with ad != 0 has the same roots as
    // the monic polynomial z^d + a1·z^(d-1) + ... + ad in the z plane.
    let mut coeffs = model.polynomial();
    while coeffs.len() > 1 && coeffs[coeffs.len() - 1] == 0.0 {
        coeffs.pop();
    }
    let degree = coeffs.len() - 1;
    if degree == 0 {
        return Ok(PoleSet { roots: Vec::new() });
    }

    let eval = |z: Complex64| -> Complex64 {
        coeffs
            .iter()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    };
    // Scale-free backward error: |P(z)| relative to the evaluation magnitude.
    let rel_residual = |z: Complex64| -> f64 {
        let zn = z.norm();
        let denom = coeffs.iter().fold(0.0f64, |acc, &c| acc * zn + c.abs());
        eval(z).norm() / denom.max(f64::MIN_POSITIVE)
    };

    // Standard Durand-Kerner start: powers of 0.4 + 0.9i.
    let seed = Complex64::new(0.4, 0.9);
    let mut roots: Vec<Complex64> = (0..degree)
        .map(|k| seed.powu(k as u32 + 1))
        .collect();

    for _ in 0..ROOT_MAX_ITER {
        let mut max_step = 0.0f64;
        for i in 0..degree {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..degree {
                if j != i {
                    denom *= roots[i] - roots[j];
                }
            }
            if denom.norm() == 0.0 {
                // Coincident estimates: nudge apart and retry next sweep.
                roots[i] += Complex64::new(1e-6, 1e-6);
                max_step = f64::MAX;
                continue;
            }
            let step = eval(roots[i]) / denom;
            roots[i] -= step;
            max_step = max_step.max(step.norm());
        }
        if max_step < 1e-12 {
            break;
        }
    }

    let worst = roots.iter().map(|&z| rel_residual(z)).fold(0.0, f64::max);
    if worst > ROOT_RESIDUAL_TOL {
        return Err(Error::RootFindingDivergence { residual: worst });
    }
    Ok(PoleSet { roots })
}

/// Map poles to formants: keep one entry per conjugate pair with positive
/// imaginary part, radius in `[0.7, 1)`, and frequency inside the guard
/// bands. The result is sorted ascending by frequency.
pub fn poles_to_formants(poles: &PoleSet, sample_rate_hz: u32) -> FormantSet {
    let fs = sample_rate_hz as f64;
    let mut formants: Vec<Formant> = poles
        .roots
        .iter()
        .filter(|c| c.im > 0.0)
        .filter_map(|c| {
            let radius = c.norm();
            if !(FORMANT_RADIUS_MIN..1.0).contains(&radius) {
                return None;
            }
            let frequency_hz = fs / (2.0 * std::f64::consts::PI) * c.im.atan2(c.re);
            if frequency_hz <= EDGE_GUARD_HZ || frequency_hz >= fs / 2.0 - EDGE_GUARD_HZ {
                return None;
            }
            Some(Formant {
                frequency_hz,
                bandwidth_hz: -(fs / std::f64::consts::PI) * radius.ln(),
                radius,
            })
        })
        .collect();
    formants.sort_by(|a, b| a.frequency_hz.total_cmp(&b.frequency_hz));
    FormantSet { formants }
}

/// Run the full per-frame pipeline: pre-emphasis, Hamming framing, LPC fit,
/// root finding, formant mapping.
///
/// Frames whose autocorrelation is numerically singular (silence) yield an
/// empty `FormantSet` rather than an error.
pub fn formants_per_frame(
    signal: &AudioSignal,
    params: &AnalysisParams,
) -> Result<Vec<FormantSet>> {
    let emphasized = AudioSignal {
        samples: pre_emphasis(&signal.samples, params.pre_emphasis),
        sample_rate_hz: signal.sample_rate_hz,
    };
    let frames = frame_signal(
        &emphasized,
        params.frame_ms,
        params.hop_ms,
        WindowKind::Hamming,
    )?;
    let order = params.lpc_order.min(frames.frame_length.saturating_sub(1));
    frames
        .frames
        .iter()
        .map(|frame| {
            let r = autocorrelate(frame, order)?;
            let model = match levinson_durbin(&r, order) {
                Ok(m) => m,
                Err(Error::SingularAutocorrelation) => return Ok(FormantSet::default()),
                Err(e) => return Err(e),
            };
            let poles = polynomial_roots(&model)?;
            Ok(poles_to_formants(&poles, signal.sample_rate_hz))
        })
        .collect()
}

/// Median first-formant frequency over voiced frames, the per-utterance
/// summary consumed by the classifier. `None` when no frame is voiced.
pub fn median_first_formant(track: &[FormantSet]) -> Option<f64> {
    let mut f1: Vec<f64> = track
        .iter()
        .filter(|set| set.is_voiced())
        .filter_map(|set| set.frequency(1))
        .collect();
    if f1.is_empty() {
        return None;
    }
    f1.sort_by(f64::total_cmp);
    let n = f1.len();
    Some(if n % 2 == 1 {
        f1[n / 2]
    } else {
        0.5 * (f1[n / 2 - 1] + f1[n / 2])
    })
}
