//! Autocorrelation-method linear prediction.
//!
//! A speech sample is modeled as a linear combination of its predecessors,
//! `s(n) = -Σ a(i)·s(n-i) + e(n)`, so the analysis polynomial is
//! `A(z) = 1 + Σ a(i)·z^-i` with the leading coefficient fixed at 1.
//! Filtering a frame through `A(z)` whitens it; the roots of `A(z)` are the
//! vocal-tract poles the formant tracker consumes.
//!
//! ```
//! use emovox::lpc::{autocorrelate, levinson_durbin};
//! use emovox::synth;
//!
//! // An AR(1) process x(n) = 0.9 x(n-1) + e(n) fits with a(1) close to -0.9.
//! let noise = synth::white_noise_samples(1, 4000);
//! let mut x = vec![0.0f64; noise.len()];
//! for i in 1..x.len() {
//!     x[i] = 0.9 * x[i - 1] + noise[i];
//! }
//! let r = autocorrelate(&x, 1).unwrap();
//! let model = levinson_durbin(&r, 1).unwrap();
//! assert!((model.coefficients[0] + 0.9).abs() < 0.05);
//! ```

use crate::error::{Error, Result};

/// Autocorrelation lags `R(0) ..= R(max_lag)` of one frame.
#[derive(Debug, Clone)]
pub struct AutocorrelationSequence {
    pub lags: Vec<f64>,
}

impl AutocorrelationSequence {
    /// Highest available lag.
    pub fn max_lag(&self) -> usize {
        self.lags.len() - 1
    }
}

/// Biased autocorrelation `R(j) = Σ_n x(n)·x(n-j)` over the valid overlap,
/// with no normalization.
pub fn autocorrelate(frame: &[f64], max_lag: usize) -> Result<AutocorrelationSequence> {
    if max_lag >= frame.len() {
        return Err(Error::LagTooLarge {
            max_lag,
            frame_len: frame.len(),
        });
    }
    let lags = (0..=max_lag)
        .map(|j| frame[j..].iter().zip(&frame[..frame.len() - j]).map(|(a, b)| a * b).sum())
        .collect();
    Ok(AutocorrelationSequence { lags })
}

/// A fitted linear-prediction model.
///
/// `coefficients[i-1]` stores `a(i)` of `A(z) = 1 + Σ a(i)·z^-i`; the
/// implicit `a(0) = 1` is not stored. `gain_sq` is the final prediction-error
/// energy of the recursion, in the units of `R(0)`.
#[derive(Debug, Clone)]
pub struct LpcModel {
    pub order: usize,
    pub coefficients: Vec<f64>,
    pub gain_sq: f64,
}

impl LpcModel {
    /// The full analysis polynomial `[1, a(1), ..., a(order)]`.
    pub fn polynomial(&self) -> Vec<f64> {
        let mut p = Vec::with_capacity(self.order + 1);
        p.push(1.0);
        p.extend_from_slice(&self.coefficients);
        p
    }
}

/// Solve the normal equations by the Levinson-Durbin recursion.
///
/// Returns the model minimizing prediction-error energy for the given
/// autocorrelation. Fails with `SingularAutocorrelation` when `R(0) = 0` or
/// the recursion error drops to zero or below, which signals numerically
/// degenerate input.
pub fn levinson_durbin(r: &AutocorrelationSequence, order: usize) -> Result<LpcModel> {
    if order > r.max_lag() {
        return Err(Error::LagTooLarge {
            max_lag: r.max_lag(),
            frame_len: order,
        });
    }
    let lags = &r.lags;
    if lags[0] <= 0.0 || !lags[0].is_finite() {
        return Err(Error::SingularAutocorrelation);
    }

    // `pred` holds predictor coefficients of s(n) ≈ Σ pred(i)·s(n-i).
    let mut pred = vec![0.0; order + 1];
    let mut err = lags[0];
    for i in 1..=order {
        let mut acc = lags[i];
        for j in 1..i {
            acc -= pred[j] * lags[i - j];
        }
        let k = acc / err;
        // Reflection coefficients stay inside (-1, 1) for positive-definite R.
        if !k.is_finite() || k.abs() >= 1.0 {
            return Err(Error::SingularAutocorrelation);
        }
        let prev = pred.clone();
        pred[i] = k;
        for j in 1..i {
            pred[j] = prev[j] - k * prev[i - j];
        }
        err *= 1.0 - k * k;
        if err <= 0.0 {
            return Err(Error::SingularAutocorrelation);
        }
    }

    Ok(LpcModel {
        order,
        coefficients: (1..=order).map(|i| -pred[i]).collect(),
        gain_sq: err,
    })
}

/// Run a frame through the analysis filter: `e(n) = s(n) + Σ a(i)·s(n-i)`,
/// with zero initial conditions.
pub fn inverse_filter(frame: &[f64], model: &LpcModel) -> Vec<f64> {
    let a = &model.coefficients;
    (0..frame.len())
        .map(|n| {
            let mut e = frame[n];
            for (i, &ai) in a.iter().enumerate() {
                if n > i {
                    e += ai * frame[n - i - 1];
                }
            }
            e
        })
        .collect()
}

/// First-order high-pass pre-emphasis `y(n) = x(n) - coeff·x(n-1)`.
pub fn pre_emphasis(signal: &[f64], coeff: f64) -> Vec<f64> {
    if signal.is_empty() {
        return Vec::new();
    }
    let mut out = Vec::with_capacity(signal.len());
    out.push(signal[0]);
    for i in 1..signal.len() {
        out.push(signal[i] - coeff * signal[i - 1]);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

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

    // Drive an all-pole filter 1/A(z) with the given excitation.
    fn synthesize_ar(a: &[f64], excitation: &[f64]) -> Vec<f64> {
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

    #[test]
    fn autocorrelation_by_hand() {
        // x = [1, 2, 3]: R(0)=14, R(1)=1*2+2*3=8, R(2)=1*3=3.
        let r = autocorrelate(&[1.0, 2.0, 3.0], 2).unwrap();
        assert_eq!(r.lags, vec![14.0, 8.0, 3.0]);
    }

    #[test]
    fn zero_lag_is_energy_and_bounds_other_lags() {
        for seed in 1..=10u64 {
            let x = noise(seed, 300);
            let r = autocorrelate(&x, 50).unwrap();
            let energy: f64 = x.iter().map(|v| v * v).sum();
            assert!((r.lags[0] - energy).abs() < 1e-12);
            for j in 1..=50 {
                assert!(r.lags[j].abs() <= r.lags[0] * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn all_zero_frame_gives_zero_lags() {
        let r = autocorrelate(&[0.0; 32], 8).unwrap();
        assert!(r.lags.iter().all(|&l| l == 0.0));
    }

    #[test]
    fn lag_must_stay_below_frame_length() {
        assert!(matches!(
            autocorrelate(&[1.0, 2.0], 2),
            Err(Error::LagTooLarge { .. })
        ));
    }

    #[test]
    fn white_noise_autocorrelation_predicts_nothing() {
        let mut lags = vec![0.0; 11];
        lags[0] = 1.0;
        let model = levinson_durbin(&AutocorrelationSequence { lags }, 10).unwrap();
        assert!(model.coefficients.iter().all(|&c| c == 0.0));
        assert_eq!(model.gain_sq, 1.0);
    }

    #[test]
    fn ar1_fit_recovers_negated_coefficient() {
        let x = synthesize_ar(&[-0.9], &noise(3, 10000));
        let r = autocorrelate(&x, 1).unwrap();
        let model = levinson_durbin(&r, 1).unwrap();
        assert!(
            (model.coefficients[0] + 0.9).abs() < 0.02,
            "a(1) = {}",
            model.coefficients[0]
        );
    }

    #[test]
    fn gain_never_exceeds_frame_energy_and_is_monotone_in_order() {
        let x = synthesize_ar(&[-1.2, 0.6], &noise(11, 4000));
        let r = autocorrelate(&x, 16).unwrap();
        let mut prev = r.lags[0];
        for order in 1..=16 {
            let model = levinson_durbin(&r, order).unwrap();
            assert!(model.gain_sq <= r.lags[0]);
            assert!(
                model.gain_sq <= prev + 1e-9,
                "order {order}: {} > {prev}",
                model.gain_sq
            );
            prev = model.gain_sq;
        }
    }

    #[test]
    fn singular_input_is_rejected() {
        let r = AutocorrelationSequence {
            lags: vec![0.0, 0.0, 0.0],
        };
        assert!(matches!(
            levinson_durbin(&r, 2),
            Err(Error::SingularAutocorrelation)
        ));
    }

    #[test]
    fn zero_coefficients_make_identity_filter() {
        let model = LpcModel {
            order: 2,
            coefficients: vec![0.0, 0.0],
            gain_sq: 1.0,
        };
        let frame = [0.3, -0.1, 0.7];
        assert_eq!(inverse_filter(&frame, &model), frame.to_vec());
    }

    #[test]
    fn impulse_through_first_order_filter() {
        // a = [-0.5] gives e = [1, -0.5, 0, ...].
        let model = LpcModel {
            order: 1,
            coefficients: vec![-0.5],
            gain_sq: 1.0,
        };
        let e = inverse_filter(&[1.0, 0.0, 0.0, 0.0], &model);
        assert_eq!(e, vec![1.0, -0.5, 0.0, 0.0]);
    }

    #[test]
    fn fitted_filter_whitens_ar_frame() {
        // Stable AR(10): five pole pairs well inside the unit circle.
        let pairs: [(f64, f64); 5] = [
            (0.95, 0.2),
            (0.93, 0.7),
            (0.9, 1.2),
            (0.88, 1.9),
            (0.85, 2.6),
        ];
        let mut a = vec![1.0];
        for &(r, th) in &pairs {
            let (b1, b2) = (-2.0 * r * th.cos(), r * r);
            let mut next = vec![0.0; a.len() + 2];
            for (i, &c) in a.iter().enumerate() {
                next[i] += c;
                next[i + 1] += c * b1;
                next[i + 2] += c * b2;
            }
            a = next;
        }
        let x = synthesize_ar(&a[1..], &noise(5, 8000));
        let frame = &x[4000..6000];
        let r = autocorrelate(frame, 10).unwrap();
        let model = levinson_durbin(&r, 10).unwrap();
        let residual = inverse_filter(frame, &model);
        let e_sig: f64 = frame.iter().map(|v| v * v).sum();
        let e_res: f64 = residual.iter().map(|v| v * v).sum();
        assert!(e_res / e_sig < 0.1, "ratio {}", e_res / e_sig);
        // The recursion's own error estimate agrees with the measured residual.
        assert!((e_res - model.gain_sq).abs() / e_sig < 0.05);
    }

    #[test]
    fn pre_emphasis_matches_definition() {
        let y = pre_emphasis(&[1.0, 1.0, 1.0], 0.97);
        assert_eq!(y[0], 1.0);
        assert!((y[1] - 0.03).abs() < 1e-12);
        assert!((y[2] - 0.03).abs() < 1e-12);
        assert!(pre_emphasis(&[], 0.97).is_empty());
    }
}
