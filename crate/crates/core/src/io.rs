//! Waveform and key files.
//!
//! Waveforms are stored either as CSV (one decimal amplitude per line) or in
//! a binary layout: the 8-byte magic `SLKDWAV1`, a little-endian `u32` sample
//! count, then that many little-endian IEEE-754 `f32` samples.
//!
//! Keys are stored raw (16-byte header: magic `SLKDKEY1`, little-endian `u32`
//! bit count, four zero bytes; then the bits packed most significant bit
//! first) or as hex text (`<bit count> <hex digits>` on one line).

use std::fs;
use std::path::Path;

use crate::error::{Result, SyncError};
use crate::key::BitKey;
use crate::waveform::Waveform;

pub const WAVE_MAGIC: &[u8; 8] = b"SLKDWAV1";
pub const KEY_MAGIC: &[u8; 8] = b"SLKDKEY1";
pub const KEY_HEADER_LEN: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WaveFormat {
    Csv,
    Binary,
}

impl WaveFormat {
    /// `.bin` and `.wav1` select binary; anything else is CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("bin" | "wav1") => Self::Binary,
            _ => Self::Csv,
        }
    }

    pub fn extension(self) -> &'static str {
        match self {
            Self::Csv => "csv",
            Self::Binary => "bin",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KeyFormat {
    Raw,
    Hex,
}

pub fn encode_waveform_binary(wave: &Waveform) -> Result<Vec<u8>> {
    let count = u32::try_from(wave.len())
        .map_err(|_| SyncError::Length(format!("{} samples exceed the u32 count field", wave.len())))?;
    let mut out = Vec::with_capacity(12 + 4 * wave.len());
    out.extend_from_slice(WAVE_MAGIC);
    out.extend_from_slice(&count.to_le_bytes());
    for &s in wave.iter() {
        out.extend_from_slice(&(s as f32).to_le_bytes());
    }
    Ok(out)
}

pub fn decode_waveform_binary(bytes: &[u8]) -> Result<Waveform> {
    let body =
        bytes.strip_prefix(WAVE_MAGIC.as_slice()).ok_or_else(|| SyncError::Format("missing SLKDWAV1 magic".into()))?;
    if body.len() < 4 {
        return Err(SyncError::Format("truncated sample count".into()));
    }
    let count = u32::from_le_bytes(body[..4].try_into().expect("4 bytes")) as usize;
    let data = &body[4..];
    if data.len() != 4 * count {
        return Err(SyncError::Format(format!("header declares {count} samples, payload holds {} bytes", data.len())));
    }
    let samples = data.chunks_exact(4).map(|c| f32::from_le_bytes(c.try_into().expect("4 bytes")) as f64).collect();
    Waveform::new(samples)
}

pub fn encode_waveform_csv(wave: &Waveform) -> String {
    let mut out = String::with_capacity(wave.len() * 20);
    for s in wave.iter() {
        out.push_str(&s.to_string());
        out.push('\n');
    }
    out
}

/// Parses CSV amplitudes; blank lines and `#` comments are skipped.
pub fn decode_waveform_csv(text: &str) -> Result<Waveform> {
    let mut samples = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let field = line.split(',').next().unwrap_or(line).trim();
        let v: f64 =
            field.parse().map_err(|_| SyncError::Format(format!("line {}: '{field}' is not a number", n + 1)))?;
        samples.push(v);
    }
    Waveform::new(samples)
}

/// Reads a waveform, detecting the binary layout by its magic.
pub fn read_waveform(path: &Path) -> Result<Waveform> {
    let bytes = fs::read(path)?;
    let wave = if bytes.starts_with(WAVE_MAGIC) {
        decode_waveform_binary(&bytes)?
    } else {
        let text = String::from_utf8(bytes)
            .map_err(|_| SyncError::Format(format!("{} is neither SLKDWAV1 nor text", path.display())))?;
        decode_waveform_csv(&text)?
    };
    Ok(wave.with_label(path.display().to_string()))
}

pub fn write_waveform(path: &Path, wave: &Waveform, format: WaveFormat) -> Result<()> {
    match format {
        WaveFormat::Csv => fs::write(path, encode_waveform_csv(wave))?,
        WaveFormat::Binary => fs::write(path, encode_waveform_binary(wave)?)?,
    }
    Ok(())
}

pub fn encode_key_raw(key: &BitKey) -> Result<Vec<u8>> {
    let bits = u32::try_from(key.len())
        .map_err(|_| SyncError::Length(format!("{} bits exceed the u32 count field", key.len())))?;
    let mut out = Vec::with_capacity(KEY_HEADER_LEN + key.as_bytes().len());
    out.extend_from_slice(KEY_MAGIC);
    out.extend_from_slice(&bits.to_le_bytes());
    out.extend_from_slice(&[0; 4]);
    out.extend_from_slice(key.as_bytes());
    Ok(out)
}

pub fn decode_key_raw(bytes: &[u8]) -> Result<BitKey> {
    if bytes.len() < KEY_HEADER_LEN || !bytes.starts_with(KEY_MAGIC) {
        return Err(SyncError::Format("missing SLKDKEY1 header".into()));
    }
    let bits = u32::from_le_bytes(bytes[8..12].try_into().expect("4 bytes")) as usize;
    BitKey::from_packed(bytes[KEY_HEADER_LEN..].to_vec(), bits)
        .map_err(|e| SyncError::Format(format!("key payload: {e}")))
}

pub fn encode_key_hex(key: &BitKey) -> String {
    format!("{} {}\n", key.len(), key.to_hex())
}

pub fn decode_key_hex(text: &str) -> Result<BitKey> {
    let mut parts = text.split_whitespace();
    let (Some(count), Some(hex), None) = (parts.next(), parts.next(), parts.next()) else {
        return Err(SyncError::Format("hex key must be '<bits> <hex>'".into()));
    };
    let bits: usize = count.parse().map_err(|_| SyncError::Format(format!("bad bit count '{count}'")))?;
    if hex.len() % 2 != 0 {
        return Err(SyncError::Format("odd number of hex digits".into()));
    }
    let bytes = (0..hex.len())
        .step_by(2)
        .map(|i| u8::from_str_radix(&hex[i..i + 2], 16))
        .collect::<std::result::Result<Vec<u8>, _>>()
        .map_err(|e| SyncError::Format(format!("hex key: {e}")))?;
    BitKey::from_packed(bytes, bits).map_err(|e| SyncError::Format(format!("key payload: {e}")))
}

pub fn read_key(path: &Path) -> Result<BitKey> {
    let bytes = fs::read(path)?;
    if bytes.starts_with(KEY_MAGIC) {
        decode_key_raw(&bytes)
    } else {
        let text = String::from_utf8(bytes)
            .map_err(|_| SyncError::Format(format!("{} is neither SLKDKEY1 nor hex text", path.display())))?;
        decode_key_hex(&text)
    }
}

pub fn write_key(path: &Path, key: &BitKey, format: KeyFormat) -> Result<()> {
    match format {
        KeyFormat::Raw => fs::write(path, encode_key_raw(key)?)?,
        KeyFormat::Hex => fs::write(path, encode_key_hex(key))?,
    }
    Ok(())
}
