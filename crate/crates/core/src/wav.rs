//! Minimal RIFF/WAVE reader and writer for 16-bit PCM files.
//!
//! The reader accepts mono or stereo little-endian PCM; stereo is averaged
//! down to mono and int16 samples are scaled to `[-1, 1]` by dividing by
//! 32768. The sample rate is taken from the header as-is, with no
//! resampling.

use std::fs;
use std::io::ErrorKind;
use std::path::Path;

use crate::error::{Error, Result};
use crate::signal::AudioSignal;

/// Load a 16-bit PCM WAV file as a normalized mono signal.
pub fn load_wav(path: &Path) -> Result<AudioSignal> {
    let bytes = fs::read(path).map_err(|e| {
        if e.kind() == ErrorKind::NotFound {
            Error::FileNotFound(path.to_path_buf())
        } else {
            Error::Io(e)
        }
    })?;
    decode_wav(&bytes)
}

/// Decode a WAV byte buffer. See [`load_wav`].
pub fn decode_wav(bytes: &[u8]) -> Result<AudioSignal> {
    let corrupt = |msg: &str| Error::CorruptHeader(msg.to_string());
    if bytes.len() < 12 {
        return Err(corrupt("file shorter than RIFF header"));
    }
    if &bytes[0..4] != b"RIFF" {
        return Err(corrupt("missing RIFF magic"));
    }
    if &bytes[8..12] != b"WAVE" {
        return Err(corrupt("missing WAVE magic"));
    }

    let mut fmt: Option<(u16, u16, u32, u16)> = None; // format, channels, rate, bits
    let mut data: Option<&[u8]> = None;
    let mut off = 12;
    while off + 8 <= bytes.len() {
        let id = &bytes[off..off + 4];
        let size = u32::from_le_bytes(bytes[off + 4..off + 8].try_into().unwrap()) as usize;
        let body_start = off + 8;
        let body_end = body_start + size;
        if body_end > bytes.len() {
            return Err(corrupt("chunk extends past end of file"));
        }
        let body = &bytes[body_start..body_end];
        match id {
            b"fmt " => {
                if size < 16 {
                    return Err(corrupt("fmt chunk shorter than 16 bytes"));
                }
                let format = u16::from_le_bytes(body[0..2].try_into().unwrap());
                let channels = u16::from_le_bytes(body[2..4].try_into().unwrap());
                let rate = u32::from_le_bytes(body[4..8].try_into().unwrap());
                let bits = u16::from_le_bytes(body[14..16].try_into().unwrap());
                fmt = Some((format, channels, rate, bits));
            }
            b"data" => data = Some(body),
            _ => {} // skip LIST, fact, and other chunks
        }
        // chunks are word-aligned
        off = body_end + (size & 1);
    }

    let (format, channels, rate, bits) = fmt.ok_or_else(|| corrupt("missing fmt chunk"))?;
    if format != 1 {
        return Err(Error::UnsupportedFormat(format!(
            "audio format {format}, only PCM (1) is supported"
        )));
    }
    if bits != 16 {
        return Err(Error::UnsupportedFormat(format!(
            "{bits}-bit samples, only 16-bit is supported"
        )));
    }
    if channels == 0 || channels > 2 {
        return Err(Error::UnsupportedFormat(format!(
            "{channels} channels, only mono or stereo is supported"
        )));
    }
    let data = data.ok_or_else(|| corrupt("missing data chunk"))?;
    let frame_bytes = 2 * channels as usize;
    let n_frames = data.len() / frame_bytes;
    if n_frames == 0 {
        return Err(Error::EmptySignal);
    }

    let mut samples = Vec::with_capacity(n_frames);
    for f in 0..n_frames {
        let mut acc = 0.0;
        for c in 0..channels as usize {
            let at = f * frame_bytes + 2 * c;
            let v = i16::from_le_bytes(data[at..at + 2].try_into().unwrap());
            acc += v as f64 / 32768.0;
        }
        samples.push(acc / channels as f64);
    }
    AudioSignal::new(samples, rate)
}

/// Write a normalized mono signal as a 16-bit PCM WAV file.
///
/// Samples are clamped to `[-1, 1]` and scaled by 32768 (the top value
/// saturates at 32767), so a written file reads back within one quantization
/// step.
pub fn write_wav_mono16(path: &Path, samples: &[f64], sample_rate_hz: u32) -> Result<()> {
    let data_len = (samples.len() * 2) as u32;
    let mut bytes = Vec::with_capacity(44 + samples.len() * 2);
    bytes.extend_from_slice(b"RIFF");
    bytes.extend_from_slice(&(36 + data_len).to_le_bytes());
    bytes.extend_from_slice(b"WAVE");
    bytes.extend_from_slice(b"fmt ");
    bytes.extend_from_slice(&16u32.to_le_bytes());
    bytes.extend_from_slice(&1u16.to_le_bytes()); // PCM
    bytes.extend_from_slice(&1u16.to_le_bytes()); // mono
    bytes.extend_from_slice(&sample_rate_hz.to_le_bytes());
    bytes.extend_from_slice(&(sample_rate_hz * 2).to_le_bytes());
    bytes.extend_from_slice(&2u16.to_le_bytes());
    bytes.extend_from_slice(&16u16.to_le_bytes());
    bytes.extend_from_slice(b"data");
    bytes.extend_from_slice(&data_len.to_le_bytes());
    for &s in samples {
        let v = (s.clamp(-1.0, 1.0) * 32768.0).round().clamp(-32768.0, 32767.0) as i16;
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    fs::write(path, bytes)?;
    Ok(())
}
