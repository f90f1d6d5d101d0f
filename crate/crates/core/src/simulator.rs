//! Paired-capture simulator standing in for a matched pair of chaotic devices.
//!
//! Both devices see the same driving sequence and produce the same driven
//! chaotic response. The sender capture is that response behind a short
//! quiescent lead-in; the receiver capture passes it through a
//! [`ChannelModel`] (delay, gain, optional time stretch, additive noise).

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Result, SyncError};
use crate::params::SyncParams;
use crate::waveform::Waveform;

const GOLDEN_RATIO: f64 = 1.618_033_988_749_895;

/// Number of monotone laps of the tent map over `[-1, 1]`. Three laps give
/// slope 3, so with the default coupling the effective slope (2.1) stays
/// above sqrt(2) and the attractor does not split into two bands.
const TENT_LAPS: f64 = 3.0;

/// Peak amplitude of the quiescent lead-in samples.
const LEAD_IN_LEVEL: f64 = 1e-3;

/// Fitted noise level of the `paper-calibrated` preset (relative to signal
/// RMS). Not a measured device property: chosen by the sweep in
/// `examples/calibrate_noise.rs` so that the mean post-sync Hamming distance
/// of adaptive synchronization falls in the 5-6% band.
pub const CALIBRATED_NOISE_SIGMA: f64 = 0.22;

/// Driving sequence families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DrivingKind {
    #[serde(alias = "pseudo_random")]
    PseudoRandom,
    Periodic,
    #[serde(alias = "periodic_superposition")]
    PeriodicSuperposition,
}

impl DrivingKind {
    pub const ALL: [DrivingKind; 3] =
        [DrivingKind::Periodic, DrivingKind::PeriodicSuperposition, DrivingKind::PseudoRandom];

    pub fn name(self) -> &'static str {
        match self {
            Self::PseudoRandom => "pseudo-random",
            Self::Periodic => "periodic",
            Self::PeriodicSuperposition => "periodic-superposition",
        }
    }

    fn is_periodic(self) -> bool {
        !matches!(self, Self::PseudoRandom)
    }
}

impl fmt::Display for DrivingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for DrivingKind {
    type Err = SyncError;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('_', "-").as_str() {
            "pseudo-random" | "random" => Ok(Self::PseudoRandom),
            "periodic" => Ok(Self::Periodic),
            "periodic-superposition" | "superposition" => Ok(Self::PeriodicSuperposition),
            other => Err(SyncError::Parameter(format!("unknown driving kind '{other}'"))),
        }
    }
}

/// Excitation shared by both devices.
#[derive(Debug, Clone, PartialEq)]
pub struct DrivingSequence {
    pub kind: DrivingKind,
    pub samples: Vec<f64>,
    /// Base period in samples; `None` for pseudo-random drives.
    pub period: Option<usize>,
    pub seed: u64,
}

impl DrivingSequence {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// Generates a driving sequence with amplitudes in `[-1, 1]`.
///
/// `period` is ignored for pseudo-random drives and must be at least 2
/// otherwise. The superposition drive sums sines with periods `p`, `p*phi`
/// and `p*phi^2` (phi the golden ratio) and rescales to unit peak.
pub fn gen_driving(kind: DrivingKind, length: usize, period: usize, seed: u64) -> Result<DrivingSequence> {
    if length == 0 {
        return Err(SyncError::Parameter("driving length must be at least 1".into()));
    }
    if kind.is_periodic() && period < 2 {
        return Err(SyncError::Parameter(format!("period must be at least 2, got {period}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples = match kind {
        DrivingKind::PseudoRandom => (0..length).map(|_| rng.random_range(-1.0..=1.0)).collect(),
        DrivingKind::Periodic => {
            let phase = rng.random_range(0.0..TAU);
            // Reduce the index first so repetition is exact in floating point.
            (0..length).map(|i| (TAU * (i % period) as f64 / period as f64 + phase).sin()).collect()
        }
        DrivingKind::PeriodicSuperposition => {
            let periods = [1.0, GOLDEN_RATIO, GOLDEN_RATIO * GOLDEN_RATIO].map(|m| m * period as f64);
            let phases: [f64; 3] = std::array::from_fn(|_| rng.random_range(0.0..TAU));
            let raw: Vec<f64> = (0..length)
                .map(|i| periods.iter().zip(&phases).map(|(p, ph)| (TAU * i as f64 / p + ph).sin()).sum())
                .collect();
            let peak = raw.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if peak > 0.0 {
                raw.into_iter().map(|v| v / peak).collect()
            } else {
                raw
            }
        }
    };
    Ok(DrivingSequence { kind, samples, period: kind.is_periodic().then_some(period), seed })
}

/// A driven tent-map device:
/// `x[n+1] = (1 - coupling) * T(x[n]) + coupling * d[n]`, where `T` folds
/// `[-1, 1]` onto itself three times with slope 3.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChaoticDevice {
    pub coupling: f64,
    /// Determines the initial state.
    pub seed: u64,
}

impl ChaoticDevice {
    pub const DEFAULT_COUPLING: f64 = 0.3;

    pub fn new(seed: u64) -> Self {
        Self { coupling: Self::DEFAULT_COUPLING, seed }
    }

    pub fn with_coupling(mut self, coupling: f64) -> Self {
        self.coupling = coupling;
        self
    }

    /// Response to `driving`, one output sample per driving sample.
    pub fn respond(&self, driving: &DrivingSequence) -> Result<Waveform> {
        if driving.is_empty() {
            return Err(SyncError::Parameter("driving sequence is empty".into()));
        }
        if !(0.0..=1.0).contains(&self.coupling) {
            return Err(SyncError::Parameter(format!("coupling must lie in [0, 1], got {}", self.coupling)));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut x: f64 = rng.random_range(-1.0..1.0);
        let mut out = Vec::with_capacity(driving.len());
        for &d in &driving.samples {
            out.push(x);
            x = (1.0 - self.coupling) * tent(x) + self.coupling * d;
        }
        Ok(Waveform::new(out)?.with_seed(self.seed))
    }
}

/// Three-lap tent map on `[-1, 1]`.
fn tent(x: f64) -> f64 {
    let w = (TENT_LAPS * (x + 1.0) / 2.0) % 2.0;
    let tri = if w <= 1.0 { w } else { 2.0 - w };
    2.0 * tri - 1.0
}

/// Response of a default-coupling device seeded with `device_seed`.
pub fn gen_chaotic_response(driving: &DrivingSequence, device_seed: u64) -> Result<Waveform> {
    ChaoticDevice::new(device_seed).respond(driving)
}

/// Impairments applied to the receiver capture.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelModel {
    /// Extra quiescent samples in front of the receiver capture.
    pub offset: usize,
    /// Additive Gaussian noise standard deviation relative to signal RMS.
    pub noise_sigma: f64,
    pub gain: f64,
    /// Time-stretch factor applied by linear interpolation (1.0 = none).
    pub stretch: f64,
    /// Number of active samples after the lead-in that the stretch covers;
    /// the lead-in itself is always included. `None` stretches everything.
    pub stretch_span: Option<usize>,
    pub seed: u64,
}

impl ChannelModel {
    /// Receiver identical to the sender.
    pub fn identity(seed: u64) -> Self {
        Self { offset: 0, noise_sigma: 0.0, gain: 1.0, stretch: 1.0, stretch_span: None, seed }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return Err(SyncError::Parameter(format!("noise_sigma must be >= 0, got {}", self.noise_sigma)));
        }
        if !(self.gain > 0.0 && self.gain.is_finite()) {
            return Err(SyncError::Parameter(format!("gain must be > 0, got {}", self.gain)));
        }
        if !(self.stretch > 0.0 && self.stretch.is_finite()) {
            return Err(SyncError::Parameter(format!("stretch must be > 0, got {}", self.stretch)));
        }
        Ok(())
    }
}

/// Named channel presets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChannelPreset {
    /// Identity channel.
    Clean,
    /// Random delay in `[0, 2000]`, 3% gain loss and fitted noise.
    PaperCalibrated,
    /// As `PaperCalibrated`, plus a 3% stretch over the lead-in and the first
    /// 400 active samples, lengthening the receiver capture.
    StretchAnomaly,
}

impl ChannelPreset {
    pub const MAX_OFFSET: usize = 2000;
    pub const ANOMALY_STRETCH: f64 = 1.03;
    pub const ANOMALY_SPAN: usize = 400;

    pub fn name(self) -> &'static str {
        match self {
            Self::Clean => "clean",
            Self::PaperCalibrated => "paper-calibrated",
            Self::StretchAnomaly => "stretch-anomaly",
        }
    }

    /// Instantiates the preset; the delay is drawn from `seed`.
    pub fn channel(self, seed: u64) -> ChannelModel {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(7);
        match self {
            Self::Clean => ChannelModel::identity(seed),
            Self::PaperCalibrated => ChannelModel {
                offset: rng.random_range(0..=Self::MAX_OFFSET),
                noise_sigma: CALIBRATED_NOISE_SIGMA,
                gain: 0.97,
                stretch: 1.0,
                stretch_span: None,
                seed,
            },
            Self::StretchAnomaly => ChannelModel {
                stretch: Self::ANOMALY_STRETCH,
                stretch_span: Some(Self::ANOMALY_SPAN),
                ..Self::PaperCalibrated.channel(seed)
            },
        }
    }
}

impl fmt::Display for ChannelPreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for ChannelPreset {
    type Err = SyncError;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('_', "-").as_str() {
            "clean" => Ok(Self::Clean),
            "paper-calibrated" | "calibrated" => Ok(Self::PaperCalibrated),
            "stretch-anomaly" | "stretch" => Ok(Self::StretchAnomaly),
            other => Err(SyncError::Parameter(format!("unknown channel preset '{other}'"))),
        }
    }
}

/// Sender and receiver captures of one driving run.
#[derive(Debug, Clone, PartialEq)]
pub struct CapturePair {
    pub kind: DrivingKind,
    pub sender: Waveform,
    pub receiver: Waveform,
    /// `receiver[i + truth_offset]` corresponds to `sender[i]` in the
    /// unstretched part of the captures.
    pub truth_offset: i64,
    /// Length of the sender's quiescent lead-in.
    pub lead_in: usize,
}

/// Builds a capture pair with a default device seeded from the driving seed.
pub fn make_pair(driving: &DrivingSequence, channel: &ChannelModel, params: &SyncParams) -> Result<CapturePair> {
    make_pair_with_device(driving, &ChaoticDevice::new(driving.seed ^ 0x5eed_de71_ce00_0001), channel, params)
}

/// Builds a capture pair whose captures are `driving.len()` samples long.
pub fn make_pair_with_device(
    driving: &DrivingSequence,
    device: &ChaoticDevice,
    channel: &ChannelModel,
    params: &SyncParams,
) -> Result<CapturePair> {
    channel.validate()?;
    let capture_len = driving.len();
    let needed = 2 * params.frame_len();
    if capture_len < needed {
        return Err(SyncError::Length(format!("capture length {capture_len} is below twice sync plus key ({needed})")));
    }
    let response = device.respond(driving)?;

    let mut lead_rng = stream_rng(channel.seed, 1);
    let window = params.align_window;
    let lead_in = lead_rng.random_range(2 * window..=4 * window);
    let mut timeline: Vec<f64> = (0..lead_in).map(|_| lead_rng.random_range(-LEAD_IN_LEVEL..LEAD_IN_LEVEL)).collect();
    timeline.extend_from_slice(response.samples());

    let sender = Waveform::new(timeline[..capture_len].to_vec())?.with_label("sender").with_seed(channel.seed);

    let (stretched, extra) = match channel.stretch_span {
        _ if channel.stretch == 1.0 => (timeline, 0),
        Some(span) => stretch_prefix(&timeline, (lead_in + span).min(capture_len), channel.stretch),
        None => stretch_prefix(&timeline, timeline.len(), channel.stretch),
    };

    let mut prefix_rng = stream_rng(channel.seed, 2);
    let mut receiver: Vec<f64> =
        (0..channel.offset).map(|_| prefix_rng.random_range(-LEAD_IN_LEVEL..LEAD_IN_LEVEL)).collect();
    receiver.extend(stretched.into_iter().take(capture_len.saturating_sub(channel.offset)));
    // Linear interpolation with stretch < 1 shortens the timeline; pad with silence.
    receiver.resize(capture_len, 0.0);
    if channel.gain != 1.0 {
        receiver.iter_mut().for_each(|v| *v *= channel.gain);
    }
    if channel.noise_sigma > 0.0 {
        let rms = (receiver.iter().map(|v| v * v).sum::<f64>() / receiver.len() as f64).sqrt();
        let normal = Normal::new(0.0, channel.noise_sigma * rms).map_err(|e| SyncError::Parameter(e.to_string()))?;
        let mut noise_rng = stream_rng(channel.seed, 3);
        receiver.iter_mut().for_each(|v| *v += normal.sample(&mut noise_rng));
    }

    Ok(CapturePair {
        kind: driving.kind,
        sender,
        receiver: Waveform::new(receiver)?.with_label("receiver").with_seed(channel.seed),
        truth_offset: channel.offset as i64 + extra,
        lead_in,
    })
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Resamples `timeline[..region]` by `factor` (linear interpolation) and
/// appends the rest untouched. Returns the new timeline and its length change.
fn stretch_prefix(timeline: &[f64], region: usize, factor: f64) -> (Vec<f64>, i64) {
    let region = region.min(timeline.len());
    let out_len = ((region as f64) * factor).round() as usize;
    let mut out = Vec::with_capacity(timeline.len() + out_len);
    for j in 0..out_len {
        let t = j as f64 / factor;
        let i = t.floor() as usize;
        let frac = t - i as f64;
        let a = timeline[i.min(region - 1)];
        let b = timeline[(i + 1).min(timeline.len() - 1)];
        out.push(a + (b - a) * frac);
    }
    out.extend_from_slice(&timeline[region..]);
    (out, out_len as i64 - region as i64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_params() -> SyncParams {
        SyncParams::default().with_lengths(200, 1000)
    }

    #[test]
    fn periodic_drive_repeats_exactly() {
        let d = gen_driving(DrivingKind::Periodic, 40, 8, 3).unwrap();
        for i in 0..32 {
            assert_eq!(d.samples[i], d.samples[i + 8]);
        }
        assert_eq!(d.period, Some(8));
    }

    #[test]
    fn pseudo_random_drive_is_reproducible() {
        let a = gen_driving(DrivingKind::PseudoRandom, 500, 0, 42).unwrap();
        let b = gen_driving(DrivingKind::PseudoRandom, 500, 0, 42).unwrap();
        assert_eq!(a, b);
        assert!(a.samples.iter().all(|v| (-1.0..=1.0).contains(v)));
        assert_ne!(a.samples, gen_driving(DrivingKind::PseudoRandom, 500, 0, 43).unwrap().samples);
    }

    #[test]
    fn superposition_is_not_periodic_at_base_period() {
        let d = gen_driving(DrivingKind::PeriodicSuperposition, 1000, 50, 9).unwrap();
        let x = &d.samples;
        let lag = 50;
        let a = &x[..x.len() - lag];
        let b = &x[lag..];
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        let (ma, mb) = (mean(a), mean(b));
        let cov: f64 = a.iter().zip(b).map(|(p, q)| (p - ma) * (q - mb)).sum();
        let va: f64 = a.iter().map(|p| (p - ma).powi(2)).sum();
        let vb: f64 = b.iter().map(|q| (q - mb).powi(2)).sum();
        let r = cov / (va * vb).sqrt();
        assert!(r < 0.999, "autocorrelation {r}");
        assert!(x.iter().all(|v| v.abs() <= 1.0));
    }

    #[test]
    fn driving_parameter_errors() {
        assert!(gen_driving(DrivingKind::Periodic, 10, 1, 0).is_err());
        assert!(gen_driving(DrivingKind::PeriodicSuperposition, 10, 0, 0).is_err());
        assert!(gen_driving(DrivingKind::PseudoRandom, 0, 0, 0).is_err());
        assert!(gen_driving(DrivingKind::PseudoRandom, 10, 0, 0).is_ok());
    }

    #[test]
    fn tent_map_folds_the_interval() {
        assert_eq!(tent(-1.0), -1.0);
        assert_eq!(tent(1.0), 1.0);
        assert_eq!(tent(-1.0 / 3.0), 1.0);
        assert_eq!(tent(1.0 / 3.0), -1.0);
        assert!((tent(0.0) - 0.0).abs() < 1e-15);
        for i in 0..=1000 {
            let x = -1.0 + i as f64 / 500.0;
            assert!(tent(x).abs() <= 1.0);
        }
    }

    #[test]
    fn response_is_deterministic() {
        let d = gen_driving(DrivingKind::PseudoRandom, 2000, 0, 1).unwrap();
        assert_eq!(gen_chaotic_response(&d, 5).unwrap(), gen_chaotic_response(&d, 5).unwrap());
        assert_ne!(gen_chaotic_response(&d, 5).unwrap(), gen_chaotic_response(&d, 6).unwrap());
    }

    #[test]
    fn full_coupling_follows_the_drive() {
        let d = gen_driving(DrivingKind::Periodic, 300, 37, 1).unwrap();
        let a = ChaoticDevice::new(1).with_coupling(1.0).respond(&d).unwrap();
        let b = ChaoticDevice::new(2).with_coupling(1.0).respond(&d).unwrap();
        assert_ne!(a[0], b[0]);
        assert_eq!(a[1..], b[1..]);
        assert_eq!(a[1..], d.samples[..299]);
    }

    #[test]
    fn zero_coupling_ignores_the_drive() {
        let d1 = gen_driving(DrivingKind::Periodic, 300, 37, 1).unwrap();
        let d2 = gen_driving(DrivingKind::PseudoRandom, 300, 0, 2).unwrap();
        let dev = ChaoticDevice::new(11).with_coupling(0.0);
        assert_eq!(dev.respond(&d1).unwrap().samples(), dev.respond(&d2).unwrap().samples());
    }

    #[test]
    fn response_stays_bounded_and_non_degenerate() {
        let d = gen_driving(DrivingKind::PseudoRandom, 10_000, 0, 4).unwrap();
        let w = gen_chaotic_response(&d, 4).unwrap();
        assert!(w.iter().all(|v| v.abs() <= 1.0));
        let distinct: std::collections::HashSet<u64> = w.iter().map(|v| v.to_bits()).collect();
        assert!(distinct.len() > 9_000);
    }

    #[test]
    fn identity_channel_copies_sender() {
        let p = small_params();
        let d = gen_driving(DrivingKind::PseudoRandom, 2 * p.frame_len(), 0, 8).unwrap();
        let pair = make_pair(&d, &ChannelModel::identity(3), &p).unwrap();
        assert_eq!(pair.sender, pair.receiver.clone().with_label("sender"));
        assert_eq!(pair.truth_offset, 0);
    }

    #[test]
    fn offset_channel_shifts_exactly() {
        let p = small_params();
        let d = gen_driving(DrivingKind::Periodic, 2 * p.frame_len(), 600, 8).unwrap();
        let ch = ChannelModel { offset: 977, ..ChannelModel::identity(4) };
        let pair = make_pair(&d, &ch, &p).unwrap();
        assert_eq!(pair.truth_offset, 977);
        assert_eq!(pair.sender.len(), pair.receiver.len());
        for i in 0..pair.sender.len() - 977 {
            assert_eq!(pair.receiver[i + 977], pair.sender[i]);
        }
    }

    #[test]
    fn sender_lead_in_is_quiescent() {
        let p = small_params();
        let d = gen_driving(DrivingKind::PseudoRandom, 2 * p.frame_len(), 0, 8).unwrap();
        for seed in 0..20 {
            let pair = make_pair(&d, &ChannelPreset::PaperCalibrated.channel(seed), &p).unwrap();
            let limit = p.sync_margin * pair.sender.max_abs();
            assert!(pair.sender[..p.align_window].iter().all(|v| v.abs() < limit));
            assert!((2 * p.align_window..=4 * p.align_window).contains(&pair.lead_in));
        }
    }

    #[test]
    fn stretch_lengthens_the_leading_region() {
        let p = small_params();
        let d = gen_driving(DrivingKind::PseudoRandom, 2 * p.frame_len(), 0, 8).unwrap();
        let ch = ChannelModel { stretch: 1.03, stretch_span: Some(400), ..ChannelModel::identity(5) };
        let pair = make_pair(&d, &ch, &p).unwrap();
        let region = pair.lead_in + 400;
        let extra = ((region as f64 * 1.03).round() as usize - region) as i64;
        assert_eq!(pair.truth_offset, extra);
        let shift = extra as usize;
        for i in region..pair.sender.len() - shift {
            assert_eq!(pair.receiver[i + shift], pair.sender[i]);
        }
    }

    #[test]
    fn rejects_short_capture_and_bad_channel() {
        let p = small_params();
        let d = gen_driving(DrivingKind::PseudoRandom, 2 * p.frame_len() - 1, 0, 8).unwrap();
        assert!(matches!(make_pair(&d, &ChannelModel::identity(0), &p), Err(SyncError::Length(_))));
        let d = gen_driving(DrivingKind::PseudoRandom, 2 * p.frame_len(), 0, 8).unwrap();
        for ch in [
            ChannelModel { gain: 0.0, ..ChannelModel::identity(0) },
            ChannelModel { stretch: -1.0, ..ChannelModel::identity(0) },
            ChannelModel { noise_sigma: -0.1, ..ChannelModel::identity(0) },
        ] {
            assert!(matches!(make_pair(&d, &ch, &p), Err(SyncError::Parameter(_))));
        }
    }

    #[test]
    fn names_round_trip() {
        for k in DrivingKind::ALL {
            assert_eq!(k.name().parse::<DrivingKind>().unwrap(), k);
        }
        for p in [ChannelPreset::Clean, ChannelPreset::PaperCalibrated, ChannelPreset::StretchAnomaly] {
            assert_eq!(p.name().parse::<ChannelPreset>().unwrap(), p);
        }
    }
}
