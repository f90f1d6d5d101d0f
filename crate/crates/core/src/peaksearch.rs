//! Peak search alignment.
//!
//! A capture either opens with a quiescent lead-in (the device idles before
//! the chaotic burst) or starts mid-waveform. The scan first looks for a
//! quiescent window, then walks forward to the first local peak above
//! `align_threshold * max`. Both sides run it independently; no information
//! is exchanged.

use crate::error::{Result, SyncError};
use crate::params::SyncParams;
use crate::waveform::{AlignAlgorithm, AlignmentResult, Waveform};

/// Outcome of the quiescent lead-in scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WaveformStart {
    /// Index where the peak scan begins.
    pub position: usize,
    /// `false` when no window was quiescent and the scan starts at 0.
    pub quiescent: bool,
}

/// Scans windows `[i, i + align_window)` from `i = 0` and returns
/// `i + align_window` for the first window whose absolute-amplitude sum is at
/// most `align_window * sync_margin * max|wave|`. Returns position 0 with
/// `quiescent == false` when no window qualifies.
pub fn find_waveform_start(wave: &Waveform, params: &SyncParams) -> Result<WaveformStart> {
    let window = params.align_window;
    if window == 0 {
        return Err(SyncError::Parameter("align_window must be at least 1".into()));
    }
    if wave.len() < window {
        return Err(SyncError::Length(format!("waveform has {} samples, align_window is {window}", wave.len())));
    }
    let limit = window as f64 * params.sync_margin * wave.max_abs();
    let found = wave.windows(window).position(|w| w.iter().map(|s| s.abs()).sum::<f64>() <= limit);
    Ok(match found {
        Some(i) => WaveformStart { position: i + window, quiescent: true },
        None => WaveformStart { position: 0, quiescent: false },
    })
}

/// Finds the first local peak above `align_threshold * max(wave)` at or after
/// `start`.
///
/// Super-threshold samples raise a running maximum; the first super-threshold
/// sample that does not exceed it ends the scan. Sub-threshold samples are
/// skipped. Equal values keep the earlier index.
pub fn find_first_peak(wave: &Waveform, start: usize, params: &SyncParams) -> Result<AlignmentResult> {
    if start >= wave.len() {
        return Err(SyncError::Bounds { index: start, limit: wave.len() });
    }
    let threshold = params.align_threshold * wave.max();
    let mut peak: Option<(usize, f64)> = None;
    for (i, &s) in wave.iter().enumerate().skip(start) {
        if s <= threshold {
            continue;
        }
        match peak {
            Some((_, value)) if s <= value => break,
            _ => peak = Some((i, s)),
        }
    }
    let (position, value) = peak.ok_or(SyncError::NoPeak { start, threshold })?;
    Ok(AlignmentResult { position, score: value.max(0.0), algorithm: AlignAlgorithm::PeakSearch })
}

/// Locates the waveform start and then the first peak. The key for this
/// algorithm begins at [`peak_key_start`] and needs `key_len` samples.
pub fn peak_align(wave: &Waveform, params: &SyncParams) -> Result<AlignmentResult> {
    let start = find_waveform_start(wave, params)?;
    let peak = find_first_peak(wave, start.position, params)?;
    let key_start = peak_key_start(&peak);
    if key_start + params.key_len > wave.len() {
        return Err(SyncError::Length(format!(
            "peak at {} leaves {} samples, key needs {}",
            peak.position,
            wave.len() - key_start,
            params.key_len
        )));
    }
    Ok(peak)
}

/// First key sample for a peak-search alignment: the sample after the peak.
pub fn peak_key_start(peak: &AlignmentResult) -> usize {
    peak.position + 1
}
