//! Sampled waveforms and the alignment results computed over them.

use std::fmt;
use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SyncError};

/// One device capture: a non-empty sequence of finite amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct Waveform {
    samples: Vec<f64>,
    label: Option<String>,
    seed: Option<u64>,
}

impl Waveform {
    /// Wraps `samples`, rejecting empty input and non-finite values.
    pub fn new(samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(SyncError::Length("waveform must contain at least one sample".into()));
        }
        if let Some(i) = samples.iter().position(|s| !s.is_finite()) {
            return Err(SyncError::Data(format!("sample {i} is not finite ({})", samples[i])));
        }
        Ok(Self { samples, label: None, seed: None })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    /// Largest signed amplitude.
    pub fn max(&self) -> f64 {
        self.samples.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Largest absolute amplitude.
    pub fn max_abs(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, s| m.max(s.abs()))
    }

    /// `len` samples starting at `start`, or a length error if the waveform
    /// is too short.
    pub fn segment(&self, start: usize, len: usize) -> Result<&[f64]> {
        let end = start.checked_add(len).filter(|&e| e <= self.samples.len()).ok_or_else(|| {
            SyncError::Length(format!("need {len} samples from index {start}, waveform has {}", self.samples.len()))
        })?;
        Ok(&self.samples[start..end])
    }
}

impl Deref for Waveform {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.samples
    }
}

impl TryFrom<Vec<f64>> for Waveform {
    type Error = SyncError;

    fn try_from(samples: Vec<f64>) -> Result<Self> {
        Self::new(samples)
    }
}

/// The sender's synchronization sequence: `L` samples cut at `origin`.
#[derive(Debug, Clone, PartialEq)]
pub struct SyncSequence {
    samples: Vec<f64>,
    origin: usize,
}

impl SyncSequence {
    /// Cuts `len` samples from `wave` starting at `origin`.
    pub fn cut(wave: &Waveform, origin: usize, len: usize) -> Result<Self> {
        if len == 0 {
            return Err(SyncError::Length("sync sequence must be non-empty".into()));
        }
        Ok(Self { samples: wave.segment(origin, len)?.to_vec(), origin })
    }

    /// Builds a sync sequence from samples received out of band.
    pub fn from_samples(samples: Vec<f64>, origin: usize) -> Result<Self> {
        // Reuse the waveform checks for emptiness and finiteness.
        let samples = Waveform::new(samples)?.into_samples();
        Ok(Self { samples, origin })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn origin(&self) -> usize {
        self.origin
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// Which procedure produced an [`AlignmentResult`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlignAlgorithm {
    PeakSearch,
    AdaptiveNaive,
    AdaptiveFft,
}

impl fmt::Display for AlignAlgorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            Self::PeakSearch => "peak_search",
            Self::AdaptiveNaive => "adaptive_naive",
            Self::AdaptiveFft => "adaptive_fft",
        })
    }
}

/// A matched position in the searched waveform.
///
/// `score` is the squared Euclidean distance for adaptive matching and the
/// peak amplitude for peak search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlignmentResult {
    pub position: usize,
    pub score: f64,
    pub algorithm: AlignAlgorithm,
}
