use crate::error::{Result, SyncError};
use crate::waveform::SyncSequence;

/// Squared Euclidean distance between `wave[start..start + L]` and the sync
/// sequence.
///
/// The sum runs in index order; both matchers rely on this exact order so
/// their reported scores agree bit for bit.
pub fn segment_sq_distance(wave: &[f64], start: usize, sync: &SyncSequence) -> Result<f64> {
    let len = sync.len();
    match start.checked_add(len) {
        Some(end) if end <= wave.len() => Ok(sq_distance(&wave[start..end], sync.samples())),
        _ => Err(SyncError::Bounds { index: start, limit: wave.len().saturating_sub(len) }),
    }
}

#[inline]
pub(crate) fn sq_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}
