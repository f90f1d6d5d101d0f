//! Algorithm tunables shared by both alignment algorithms and the harness.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SyncError};

/// Default synchronization sequence length in samples.
pub const DEFAULT_SYNC_LEN: usize = 1200;
/// Default key length in samples (one bit per sample).
pub const DEFAULT_KEY_LEN: usize = 64800;
/// Keys whose Hamming fraction is at or above this are counted as failures.
pub const DEFAULT_SUCCESS_THRESHOLD: f64 = 0.08;

/// Tunables for peak search, adaptive synchronization and key evaluation.
///
/// `align_threshold`, `align_window` and `sync_margin` have no published
/// values; the defaults are engineering choices and every experiment may
/// override them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SyncParams {
    /// Fraction of the waveform maximum a sample must exceed to count as part
    /// of a peak.
    pub align_threshold: f64,
    /// Window length (samples) used when scanning for the quiescent lead-in.
    pub align_window: usize,
    /// Fraction of the maximum absolute amplitude below which a window's mean
    /// absolute amplitude counts as quiescent.
    pub sync_margin: f64,
    /// Synchronization sequence length `L`.
    pub sync_len: usize,
    /// Key length `K`.
    pub key_len: usize,
    /// Hamming fraction below which a key pair counts as a success.
    pub success_threshold: f64,
}

impl Default for SyncParams {
    fn default() -> Self {
        Self {
            align_threshold: 0.8,
            align_window: 100,
            sync_margin: 0.05,
            sync_len: DEFAULT_SYNC_LEN,
            key_len: DEFAULT_KEY_LEN,
            success_threshold: DEFAULT_SUCCESS_THRESHOLD,
        }
    }
}

impl SyncParams {
    /// Checks every field against its admissible range.
    pub fn validate(&self) -> Result<()> {
        let open_unit = |name: &str, v: f64| {
            if v > 0.0 && v < 1.0 {
                Ok(())
            } else {
                Err(SyncError::Parameter(format!("{name} must lie in (0, 1), got {v}")))
            }
        };
        open_unit("align_threshold", self.align_threshold)?;
        open_unit("sync_margin", self.sync_margin)?;
        open_unit("success_threshold", self.success_threshold)?;
        for (name, v) in [("align_window", self.align_window), ("sync_len", self.sync_len), ("key_len", self.key_len)] {
            if v == 0 {
                return Err(SyncError::Parameter(format!("{name} must be at least 1")));
            }
        }
        Ok(())
    }

    /// Returns a copy with different sync and key lengths.
    pub fn with_lengths(mut self, sync_len: usize, key_len: usize) -> Self {
        self.sync_len = sync_len;
        self.key_len = key_len;
        self
    }

    /// Samples needed after a sync origin to hold both the sync sequence and a key.
    pub fn frame_len(&self) -> usize {
        self.sync_len + self.key_len
    }
}
