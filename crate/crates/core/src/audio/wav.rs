use std::path::Path;

use super::features::Pcm;
use crate::error::{Error, Result};

/// Reads 16-bit PCM mono WAV. Samples are scaled to [-1, 1).
pub fn read_wav(path: &Path) -> Result<Pcm> {
    let reader = hound::WavReader::open(path).map_err(|e| wav_error(path, e))?;
    let spec = reader.spec();
    if spec.sample_format != hound::SampleFormat::Int || spec.bits_per_sample != 16 {
        return Err(Error::Validation(format!(
            "{}: expected 16-bit integer PCM, found {}-bit {:?}",
            path.display(),
            spec.bits_per_sample,
            spec.sample_format
        )));
    }
    if spec.channels != 1 {
        return Err(Error::Validation(format!(
            "{}: {} channels; downmix to mono first (e.g. `ffmpeg -i in.wav -ac 1 out.wav`)",
            path.display(),
            spec.channels
        )));
    }
    let samples = reader
        .into_samples::<i16>()
        .map(|s| s.map(|v| v as f64 / 32768.0))
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|e| wav_error(path, e))?;
    Ok(Pcm::mono(samples, spec.sample_rate))
}

fn wav_error(path: &Path, e: hound::Error) -> Error {
    match e {
        hound::Error::IoError(io) => Error::io(path, io),
        other => Error::parse(path.display().to_string(), other.to_string()),
    }
}
