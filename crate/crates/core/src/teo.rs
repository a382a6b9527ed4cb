//! The nonlinear envelope feature: Teager energy per critical band,
//! normalized autocorrelation, and the area under its upper envelope.
//!
//! The Teager operator `y(n) = x(n)² - x(n+1)·x(n-1)` measures instantaneous
//! oscillation energy. The signal is first split into critical bands spaced
//! on the Bark scale; each band's Teager profile is cut into 25 ms frames;
//! each frame's autocorrelation is normalized by its lag-0 value, the upper
//! envelope across local maxima is traced, and the area under that envelope
//! is integrated over lags `0..frame_len/2`. Periodic bands keep the
//! envelope near 1 and score large areas; noise-like bands decay immediately
//! and score small ones. The scalar aggregate `z1` is the scaled mean of the
//! per-band, per-frame normalized areas.
//!
//! ```
//! use emovox::teo::teager_energy;
//!
//! // For x(n) = cos(Ωn) the interior output is the constant sin²(Ω).
//! let x: Vec<f64> = (0..100).map(|n| (0.5 * n as f64).cos()).collect();
//! let y = teager_energy(&x).unwrap();
//! let expect = (0.5f64).sin().powi(2);
//! assert!(y.iter().all(|v| (v - expect).abs() < 1e-9));
//! ```

use crate::error::{Error, Result};
use crate::lpc::autocorrelate;
use crate::signal::{frame_slices, AudioSignal, WindowKind};

/// Lowest critical-band edge in Hz.
pub const BAND_LOW_HZ: f64 = 100.0;
/// Highest critical-band edge cap in Hz.
pub const BAND_HIGH_CAP_HZ: f64 = 8000.0;

/// Relative lag-0 floor below which a frame counts as silent for `z1`.
///
/// The Teager profile scales as amplitude squared and its lag-0
/// autocorrelation as amplitude to the fourth, so 1e-24 gates out frames
/// more than 60 dB (in band amplitude) below the loudest one — digital
/// silence and filter ring, not quiet speech bands.
const VOICED_REL_FLOOR: f64 = 1e-24;

/// Traunmüller's Bark transform.
pub fn hz_to_bark(hz: f64) -> f64 {
    26.81 * hz / (1960.0 + hz) - 0.53
}

/// Inverse of [`hz_to_bark`].
pub fn bark_to_hz(bark: f64) -> f64 {
    1960.0 * (bark + 0.53) / (26.28 - bark)
}

/// Discrete Teager energy `y(n) = x(n)² - x(n+1)·x(n-1)` for interior
/// samples; the output is two samples shorter than the input.
pub fn teager_energy(x: &[f64]) -> Result<Vec<f64>> {
    if x.len() < 3 {
        return Err(Error::SequenceTooShort {
            len: x.len(),
            needed: 3,
        });
    }
    Ok((1..x.len() - 1)
        .map(|n| x[n] * x[n] - x[n + 1] * x[n - 1])
        .collect())
}

/// A signal split into critical-band channels.
#[derive(Debug, Clone)]
pub struct BandSignals {
    /// One filtered channel per band, each as long as the input.
    pub bands: Vec<Vec<f64>>,
    /// `(low, high)` edge per band, strictly increasing and gap-free.
    pub band_edges_hz: Vec<(f64, f64)>,
    pub sample_rate_hz: u32,
}

/// Teager energy of every critical-band channel.
#[derive(Debug, Clone)]
pub struct TeoProfile {
    /// Per-band Teager sequences, each 2 samples shorter than its channel.
    pub bands: Vec<Vec<f64>>,
    pub band_edges_hz: Vec<(f64, f64)>,
    pub sample_rate_hz: u32,
}

/// Split a signal into `n_bands` channels with edges equally spaced on the
/// Bark scale from 100 Hz to `min(8000, Fs/2 - 100)` Hz.
///
/// Each channel is a 4-pole Butterworth bandpass applied forward-backward,
/// so the channels are zero-phase and time-aligned with the input.
pub fn critical_band_filter(signal: &AudioSignal, n_bands: usize) -> Result<BandSignals> {
    if n_bands == 0 {
        return Err(Error::InvalidParameter("n_bands must be at least 1"));
    }
    let fs = signal.sample_rate_hz as f64;
    let high = BAND_HIGH_CAP_HZ.min(fs / 2.0 - BAND_LOW_HZ);
    if high <= BAND_LOW_HZ {
        return Err(Error::InvalidParameter(
            "sample rate too low for the critical-band range",
        ));
    }
    let (bark_lo, bark_hi) = (hz_to_bark(BAND_LOW_HZ), hz_to_bark(high));
    let edges: Vec<f64> = (0..=n_bands)
        .map(|i| bark_to_hz(bark_lo + (bark_hi - bark_lo) * i as f64 / n_bands as f64))
        .collect();
    let band_edges_hz: Vec<(f64, f64)> = edges.windows(2).map(|w| (w[0], w[1])).collect();
    if band_edges_hz.iter().any(|(lo, hi)| hi - lo < 1.0) {
        return Err(Error::BandCountTooLarge { n_bands });
    }

    let bands = band_edges_hz
        .iter()
        .map(|&(lo, hi)| {
            let sos = butterworth_bandpass(lo, hi, fs);
            filtfilt(&sos, &signal.samples)
        })
        .collect();
    Ok(BandSignals {
        bands,
        band_edges_hz,
        sample_rate_hz: signal.sample_rate_hz,
    })
}

/// Apply the Teager operator to every band channel.
pub fn teo_profile(filtered: &BandSignals) -> Result<TeoProfile> {
    let bands = filtered
        .bands
        .iter()
        .map(|b| teager_energy(b))
        .collect::<Result<Vec<_>>>()?;
    Ok(TeoProfile {
        bands,
        band_edges_hz: filtered.band_edges_hz.clone(),
        sample_rate_hz: filtered.sample_rate_hz,
    })
}

/// Per-band, per-frame envelope areas and the aggregate scalar `z1`.
#[derive(Debug, Clone)]
pub struct TeoEnvelopeFeature {
    /// `areas[band][frame]` in lag units, in `[0, lag_span]`. Silent frames
    /// hold 0 and are excluded from `z1`.
    pub areas: Vec<Vec<f64>>,
    /// Number of lag intervals integrated per frame (`frame_len / 2`).
    pub lag_span: usize,
    /// Scaled mean of `area / lag_span` over all voiced band-frames.
    pub z1: f64,
}

/// Autocorrelation of a frame normalized by its lag-0 value, for lags
/// `0..=len/2`. `None` when the frame has no energy.
pub fn normalized_autocorrelation(frame: &[f64]) -> Option<Vec<f64>> {
    let r = autocorrelate(frame, frame.len() / 2).ok()?;
    let r0 = r.lags[0];
    if r0 <= 0.0 {
        return None;
    }
    Some(r.lags.iter().map(|&l| l / r0).collect())
}

/// Upper envelope of `|m|`: piecewise-linear interpolation across the local
/// maxima of the magnitude sequence, anchored at both endpoints.
#[allow(clippy::needless_range_loop)]
pub fn upper_envelope(m: &[f64]) -> Vec<f64> {
    let mag: Vec<f64> = m.iter().map(|v| v.abs()).collect();
    let n = mag.len();
    if n <= 2 {
        return mag;
    }
    let mut anchors = vec![0usize];
    for j in 1..n - 1 {
        if mag[j] >= mag[j - 1] && mag[j] >= mag[j + 1] {
            anchors.push(j);
        }
    }
    anchors.push(n - 1);

    let mut env = vec![0.0; n];
    for pair in anchors.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let (va, vb) = (mag[a], mag[b]);
        for j in a..=b {
            let t = if b == a {
                0.0
            } else {
                (j - a) as f64 / (b - a) as f64
            };
            env[j] = va + t * (vb - va);
        }
    }
    env
}

/// Trapezoid-rule area under the envelope of the normalized autocorrelation
/// of one frame, in lag units. `None` for a silent frame.
pub fn envelope_area(frame: &[f64]) -> Option<f64> {
    let m = normalized_autocorrelation(frame)?;
    let env = upper_envelope(&m);
    Some(env.windows(2).map(|w| 0.5 * (w[0] + w[1])).sum())
}

/// Segment every band's Teager profile into `frame_ms` frames and integrate
/// per-frame envelope areas; `z1` is `scale_factor` times the mean
/// normalized area over voiced frames.
///
/// Voicing is judged relative to the loudest frame, so `z1` is invariant
/// under amplitude scaling of the input. Fails with `AllSilentFrames` when
/// no frame anywhere carries energy.
pub fn envelope_area_feature(
    profile: &TeoProfile,
    frame_ms: f64,
    scale_factor: f64,
) -> Result<TeoEnvelopeFeature> {
    if frame_ms <= 0.0 {
        return Err(Error::InvalidParameter("frame_ms must be positive"));
    }
    let frame_len =
        ((frame_ms / 1000.0) * profile.sample_rate_hz as f64).round().max(2.0) as usize;
    let lag_span = frame_len / 2;

    // First pass: frame every band and find the global lag-0 peak.
    let framed: Vec<Vec<Vec<f64>>> = profile
        .bands
        .iter()
        .map(|band| frame_slices(band, frame_len, frame_len, WindowKind::Rectangular).frames)
        .collect();
    let mut max_r0 = 0.0f64;
    for frames in &framed {
        for frame in frames {
            let r0: f64 = frame.iter().map(|x| x * x).sum();
            max_r0 = max_r0.max(r0);
        }
    }
    if max_r0 <= 0.0 {
        return Err(Error::AllSilentFrames);
    }
    let floor = max_r0 * VOICED_REL_FLOOR;

    let mut areas = Vec::with_capacity(framed.len());
    let mut sum = 0.0;
    let mut voiced = 0usize;
    for frames in &framed {
        let mut row = Vec::with_capacity(frames.len());
        for frame in frames {
            let r0: f64 = frame.iter().map(|x| x * x).sum();
            if r0 > floor {
                let area = envelope_area(frame).unwrap_or(0.0);
                sum += area / lag_span as f64;
                voiced += 1;
                row.push(area);
            } else {
                row.push(0.0);
            }
        }
        areas.push(row);
    }
    if voiced == 0 {
        return Err(Error::AllSilentFrames);
    }
    Ok(TeoEnvelopeFeature {
        areas,
        lag_span,
        z1: scale_factor * sum / voiced as f64,
    })
}

/// Full nonlinear pipeline: critical bands, Teager operator, envelope areas.
pub fn teo_feature(
    signal: &AudioSignal,
    n_bands: usize,
    frame_ms: f64,
    scale_factor: f64,
) -> Result<TeoEnvelopeFeature> {
    let filtered = critical_band_filter(signal, n_bands)?;
    let profile = teo_profile(&filtered)?;
    envelope_area_feature(&profile, frame_ms, scale_factor)
}

// ── Butterworth bandpass (order 4) and zero-phase filtering ─────────

/// One second-order filter section.
#[derive(Debug, Clone, Copy)]
struct Biquad {
    b: [f64; 3],
    a: [f64; 3], // a[0] == 1
}

impl Biquad {
    fn run(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; x.len()];
        let (mut x1, mut x2, mut y1, mut y2) = (0.0, 0.0, 0.0, 0.0);
        for (n, &xn) in x.iter().enumerate() {
            let yn = self.b[0] * xn + self.b[1] * x1 + self.b[2] * x2
                - self.a[1] * y1
                - self.a[2] * y2;
            x2 = x1;
            x1 = xn;
            y2 = y1;
            y1 = yn;
            y[n] = yn;
        }
        y
    }

    fn response_at(&self, z: num_complex::Complex64) -> num_complex::Complex64 {
        let zi = 1.0 / z;
        let num = self.b[0] + self.b[1] * zi + self.b[2] * zi * zi;
        let den = self.a[0] + self.a[1] * zi + self.a[2] * zi * zi;
        num / den
    }
}

/// Design a 4-pole digital Butterworth bandpass (second-order analog
/// prototype, lowpass-to-bandpass transform, bilinear mapping) with unit
/// gain at the band's geometric center.
fn butterworth_bandpass(low_hz: f64, high_hz: f64, fs: f64) -> Vec<Biquad> {
    use num_complex::Complex64;
    // Prewarped analog edge frequencies (bilinear with T = 1).
    let wl = 2.0 * (std::f64::consts::PI * low_hz / fs).tan();
    let wh = 2.0 * (std::f64::consts::PI * high_hz / fs).tan();
    let w0_sq = wl * wh;
    let bw = wh - wl;

    // Upper prototype pole of the order-2 Butterworth lowpass.
    let proto = Complex64::from_polar(1.0, 3.0 * std::f64::consts::FRAC_PI_4);
    // Lowpass-to-bandpass: s² - p·B·s + w0² = 0.
    let pb = proto * bw;
    let disc = (pb * pb - 4.0 * w0_sq).sqrt();
    let analog_poles = [(pb + disc) * 0.5, (pb - disc) * 0.5];

    let mut sections: Vec<Biquad> = analog_poles
        .iter()
        .map(|&s| {
            let z = (2.0 + s) / (2.0 - s);
            Biquad {
                b: [1.0, 0.0, -1.0],
                a: [1.0, -2.0 * z.re, z.norm_sqr()],
            }
        })
        .collect();

    // Normalize overall gain to 1 at the warped center frequency.
    let wc = 2.0 * (w0_sq.sqrt() / 2.0).atan();
    let zc = Complex64::from_polar(1.0, wc);
    let gain: f64 = sections
        .iter()
        .map(|s| s.response_at(zc).norm())
        .product();
    if gain > 0.0 {
        let k = 1.0 / gain;
        for v in sections[0].b.iter_mut() {
            *v *= k;
        }
    }
    sections
}

/// Forward-backward application of a biquad cascade (zero phase).
fn filtfilt(sections: &[Biquad], x: &[f64]) -> Vec<f64> {
    let mut y = x.to_vec();
    for s in sections {
        y = s.run(&y);
    }
    y.reverse();
    for s in sections {
        y = s.run(&y);
    }
    y.reverse();
    y
}
