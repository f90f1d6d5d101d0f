//! Experiment runner: cross-pairs simulated sender and receiver captures,
//! aligns each pairing with the requested algorithms and aggregates the
//! Hamming distances of the extracted keys.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::adaptsync::{match_fft, match_naive, select_sync_sequence, Matcher};
use crate::error::{Result, SyncError};
use crate::key::{hamming_fraction, quantize, BitKey, QuantizePolicy};
use crate::params::SyncParams;
use crate::peaksearch::{peak_align, peak_key_start};
use crate::simulator::{gen_driving, make_pair_with_device, CapturePair, ChannelPreset, ChaoticDevice, DrivingKind};
use crate::waveform::{SyncSequence, Waveform};

/// Alignment procedure evaluated by the harness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Adaptive,
    #[serde(alias = "peak_search")]
    PeakSearch,
}

impl Algorithm {
    pub const ALL: [Algorithm; 2] = [Algorithm::Adaptive, Algorithm::PeakSearch];

    pub fn name(self) -> &'static str {
        match self {
            Self::Adaptive => "adaptive",
            Self::PeakSearch => "peak-search",
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            Self::Adaptive => "Adaptive time synchronization",
            Self::PeakSearch => "Peak search",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = SyncError;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('_', "-").as_str() {
            "adaptive" => Ok(Self::Adaptive),
            "peak-search" | "peak" => Ok(Self::PeakSearch),
            other => Err(SyncError::Parameter(format!("unknown algorithm '{other}'"))),
        }
    }
}

/// Key extraction options that are not alignment parameters.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct TrialOptions {
    pub policy: QuantizePolicy,
    pub matcher: Matcher,
}

/// Result of aligning one sender/receiver pairing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub driving_kind: DrivingKind,
    pub algorithm: Algorithm,
    /// 1.0 for hard failures.
    pub hamming: f64,
    pub success: bool,
    pub hard_failure: bool,
    pub sender_trial_id: u32,
    pub receiver_trial_id: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Keys extracted from both sides of an aligned pair.
#[derive(Debug, Clone, PartialEq)]
pub struct KeyPair {
    pub sender_start: usize,
    pub receiver_start: usize,
    pub sender: BitKey,
    pub receiver: BitKey,
}

impl KeyPair {
    pub fn hamming(&self) -> Result<f64> {
        hamming_fraction(&self.sender, &self.receiver)
    }
}

fn key_at(wave: &Waveform, start: usize, params: &SyncParams, policy: QuantizePolicy) -> Result<BitKey> {
    quantize(wave.segment(start, params.key_len)?, params.key_len, policy)
}

fn peak_key(wave: &Waveform, params: &SyncParams, policy: QuantizePolicy) -> Result<(usize, BitKey)> {
    let start = peak_key_start(&peak_align(wave, params)?);
    Ok((start, key_at(wave, start, params, policy)?))
}

/// Sender-side state for adaptive synchronization.
struct SenderSync {
    sync: SyncSequence,
    key_start: usize,
    key: BitKey,
}

fn sender_sync(sender: &Waveform, params: &SyncParams, policy: QuantizePolicy) -> Result<SenderSync> {
    let sync = select_sync_sequence(sender, params)?;
    let key_start = sync.origin() + params.sync_len;
    let key = key_at(sender, key_start, params, policy)?;
    Ok(SenderSync { sync, key_start, key })
}

fn receiver_key(
    receiver: &Waveform,
    sender: &SenderSync,
    params: &SyncParams,
    options: TrialOptions,
) -> Result<(usize, BitKey)> {
    let found = match options.matcher {
        Matcher::Naive => match_naive(receiver, &sender.sync, params)?,
        Matcher::Fft => match_fft(receiver, &sender.sync, params)?,
    };
    let start = found.position + params.sync_len;
    Ok((start, key_at(receiver, start, params, options.policy)?))
}

/// Aligns `sender` and `receiver` with `algorithm` and quantizes both keys.
pub fn extract_keys(
    sender: &Waveform,
    receiver: &Waveform,
    algorithm: Algorithm,
    params: &SyncParams,
    options: TrialOptions,
) -> Result<KeyPair> {
    match algorithm {
        Algorithm::PeakSearch => {
            let (sender_start, sender_key) = peak_key(sender, params, options.policy)?;
            let (receiver_start, receiver_key) = peak_key(receiver, params, options.policy)?;
            Ok(KeyPair { sender_start, receiver_start, sender: sender_key, receiver: receiver_key })
        }
        Algorithm::Adaptive => {
            let s = sender_sync(sender, params, options.policy)?;
            let (receiver_start, receiver_key) = receiver_key(receiver, &s, params, options)?;
            Ok(KeyPair { sender_start: s.key_start, receiver_start, sender: s.key, receiver: receiver_key })
        }
    }
}

fn outcome(
    kind: DrivingKind,
    algorithm: Algorithm,
    ids: (u32, u32),
    keys: Result<(&BitKey, &BitKey)>,
    params: &SyncParams,
) -> TrialOutcome {
    let measured = keys.and_then(|(a, b)| hamming_fraction(a, b));
    let (hamming, hard_failure, error) = match measured {
        Ok(h) => (h, false, None),
        Err(e) => (1.0, true, Some(e.to_string())),
    };
    TrialOutcome {
        driving_kind: kind,
        algorithm,
        hamming,
        success: !hard_failure && hamming < params.success_threshold,
        hard_failure,
        sender_trial_id: ids.0,
        receiver_trial_id: ids.1,
        error,
    }
}

/// Runs one algorithm on a simulated pair with default options. Alignment
/// errors are recorded as hard failures.
pub fn run_trial(pair: &CapturePair, algorithm: Algorithm, params: &SyncParams) -> TrialOutcome {
    run_trial_with(pair, algorithm, params, TrialOptions::default())
}

pub fn run_trial_with(
    pair: &CapturePair,
    algorithm: Algorithm,
    params: &SyncParams,
    options: TrialOptions,
) -> TrialOutcome {
    let keys = extract_keys(&pair.sender, &pair.receiver, algorithm, params, options);
    let keys = keys.as_ref().map(|k| (&k.sender, &k.receiver)).map_err(clone_err);
    outcome(pair.kind, algorithm, (0, 0), keys, params)
}

fn clone_err(e: &SyncError) -> SyncError {
    // Outcomes only keep the message.
    SyncError::Data(e.to_string())
}

/// Everything needed to reproduce an experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub kinds: Vec<DrivingKind>,
    pub algorithms: Vec<Algorithm>,
    /// Captures per side; each kind yields `n_per_side^2` pairings.
    pub n_per_side: usize,
    pub preset: ChannelPreset,
    pub master_seed: u64,
    pub params: SyncParams,
    pub options: TrialOptions,
    /// Capture length; defaults to twice sync plus key.
    pub capture_len: Option<usize>,
    /// Base period of periodic drives; defaults to sync plus key so that a
    /// default capture spans two periods.
    pub period: Option<usize>,
    pub coupling: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            kinds: DrivingKind::ALL.to_vec(),
            algorithms: Algorithm::ALL.to_vec(),
            n_per_side: 30,
            preset: ChannelPreset::PaperCalibrated,
            master_seed: 0,
            params: SyncParams::default(),
            options: TrialOptions::default(),
            capture_len: None,
            period: None,
            coupling: ChaoticDevice::DEFAULT_COUPLING,
        }
    }
}

impl ExperimentConfig {
    pub fn capture_len(&self) -> usize {
        self.capture_len.unwrap_or(2 * self.params.frame_len())
    }

    pub fn period(&self) -> usize {
        self.period.unwrap_or(self.params.frame_len())
    }
}

/// Aggregates for one (driving kind, algorithm) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellReport {
    pub driving_kind: DrivingKind,
    pub algorithm: Algorithm,
    pub trials: usize,
    pub failures: usize,
    pub hard_failures: usize,
    pub failure_rate: f64,
    pub mean_hamming: f64,
    pub median_hamming: f64,
    pub max_hamming: f64,
    pub outcomes: Vec<TrialOutcome>,
}

impl CellReport {
    pub fn from_outcomes(kind: DrivingKind, algorithm: Algorithm, outcomes: Vec<TrialOutcome>) -> Self {
        let trials = outcomes.len();
        let failures = outcomes.iter().filter(|o| !o.success).count();
        let hard_failures = outcomes.iter().filter(|o| o.hard_failure).count();
        let mut h: Vec<f64> = outcomes.iter().map(|o| o.hamming).collect();
        h.sort_unstable_by(f64::total_cmp);
        let (mean, median, max) = if trials == 0 {
            (0.0, 0.0, 0.0)
        } else {
            let median = if trials % 2 == 1 { h[trials / 2] } else { (h[trials / 2 - 1] + h[trials / 2]) / 2.0 };
            (h.iter().sum::<f64>() / trials as f64, median, h[trials - 1])
        };
        Self {
            driving_kind: kind,
            algorithm,
            trials,
            failures,
            hard_failures,
            failure_rate: if trials == 0 { 0.0 } else { failures as f64 / trials as f64 },
            mean_hamming: mean,
            median_hamming: median,
            max_hamming: max,
            outcomes,
        }
    }

    pub fn successes(&self) -> usize {
        self.trials - self.failures
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub cells: Vec<CellReport>,
}

impl ExperimentReport {
    pub fn cell(&self, kind: DrivingKind, algorithm: Algorithm) -> Option<&CellReport> {
        self.cells.iter().find(|c| c.driving_kind == kind && c.algorithm == algorithm)
    }

    /// Driving kinds in first-appearance order.
    pub fn kinds(&self) -> Vec<DrivingKind> {
        let mut out = Vec::new();
        for c in &self.cells {
            if !out.contains(&c.driving_kind) {
                out.push(c.driving_kind);
            }
        }
        out
    }

    pub fn algorithms(&self) -> Vec<Algorithm> {
        let mut out = Vec::new();
        for c in &self.cells {
            if !out.contains(&c.algorithm) {
                out.push(c.algorithm);
            }
        }
        out
    }
}

/// Derives an independent seed from `master` and a path of tags.
pub fn derive_seed(master: u64, tags: &[u64]) -> u64 {
    fn splitmix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }
    tags.iter().fold(splitmix(master), |acc, &t| splitmix(acc ^ splitmix(t)))
}

fn kind_tag(kind: DrivingKind) -> u64 {
    match kind {
        DrivingKind::PseudoRandom => 1,
        DrivingKind::Periodic => 2,
        DrivingKind::PeriodicSuperposition => 3,
    }
}

/// Runs every requested algorithm on all `n_per_side^2` pairings of each
/// driving kind. Fully determined by the config.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    if config.n_per_side == 0 {
        return Err(SyncError::Parameter("n_per_side must be at least 1".into()));
    }
    config.params.validate()?;
    let mut cells = Vec::new();
    for &kind in &config.kinds {
        cells.extend(run_kind(config, kind)?);
    }
    Ok(ExperimentReport { config: config.clone(), cells })
}

fn run_kind(config: &ExperimentConfig, kind: DrivingKind) -> Result<Vec<CellReport>> {
    let tag = kind_tag(kind);
    let seed = config.master_seed;
    let params = &config.params;
    let policy = config.options.policy;
    let n = config.n_per_side;

    let driving = gen_driving(kind, config.capture_len(), config.period(), derive_seed(seed, &[1, tag]))?;
    let device = ChaoticDevice::new(derive_seed(seed, &[2, tag])).with_coupling(config.coupling);
    let capture = |role: u64, i: usize| {
        let channel = config.preset.channel(derive_seed(seed, &[3, tag, role, i as u64]));
        make_pair_with_device(&driving, &device, &channel, params)
    };
    let senders = (0..n).into_par_iter().map(|i| capture(0, i).map(|p| p.sender)).collect::<Result<Vec<_>>>()?;
    let receivers = (0..n).into_par_iter().map(|j| capture(1, j).map(|p| p.receiver)).collect::<Result<Vec<_>>>()?;

    let pairings: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
    let ids = |i: usize, j: usize| (i as u32 + 1, j as u32 + 1);
    let mut cells = Vec::new();
    for &algorithm in &config.algorithms {
        let outcomes: Vec<TrialOutcome> = match algorithm {
            Algorithm::PeakSearch => {
                let s_keys: Vec<_> = senders.par_iter().map(|w| peak_key(w, params, policy)).collect();
                let r_keys: Vec<_> = receivers.par_iter().map(|w| peak_key(w, params, policy)).collect();
                pairings
                    .par_iter()
                    .map(|&(i, j)| {
                        let keys = match (&s_keys[i], &r_keys[j]) {
                            (Ok((_, a)), Ok((_, b))) => Ok((a, b)),
                            (Err(e), _) | (_, Err(e)) => Err(clone_err(e)),
                        };
                        outcome(kind, algorithm, ids(i, j), keys, params)
                    })
                    .collect()
            }
            Algorithm::Adaptive => {
                let s_sync: Vec<_> = senders.par_iter().map(|w| sender_sync(w, params, policy)).collect();
                pairings
                    .par_iter()
                    .map(|&(i, j)| {
                        let found = s_sync[i]
                            .as_ref()
                            .map_err(clone_err)
                            .and_then(|s| receiver_key(&receivers[j], s, params, config.options).map(|(_, k)| (s, k)));
                        let keys = found.as_ref().map(|(s, k)| (&s.key, k)).map_err(clone_err);
                        outcome(kind, algorithm, ids(i, j), keys, params)
                    })
                    .collect()
            }
        };
        cells.push(CellReport::from_outcomes(kind, algorithm, outcomes));
    }
    Ok(cells)
}
