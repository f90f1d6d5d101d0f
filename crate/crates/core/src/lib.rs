//! Synchronization of paired chaotic waveforms for symmetric key extraction.
//!
//! Two devices driven by the same excitation emit near-identical chaotic
//! waveforms, but their captures start at different times. Before each side
//! can quantize its waveform into a key, both must agree on where the key
//! begins. This crate provides two ways of doing that:
//!
//! - [`peaksearch`]: each side independently finds the first peak after a
//!   quiescent lead-in and starts its key right after it.
//! - [`adaptsync`]: the sender shares a short synchronization sequence and the
//!   receiver finds the offset of least squared Euclidean distance, either by
//!   exhaustive scan or with an FFT-accelerated matcher returning the same
//!   position.
//!
//! Around the algorithms sit a key model ([`quantize`], [`hamming_fraction`]),
//! a paired-capture [`simulator`], an experiment [`harness`] with [`report`]
//! rendering, and [`io`] for waveform and key files.
//!
//! ```
//! use slkd::{adaptsync, simulator, SyncParams};
//!
//! let params = SyncParams::default().with_lengths(256, 2048);
//! let drive = simulator::gen_driving(
//!     simulator::DrivingKind::PseudoRandom, 2 * params.frame_len(), 0, 1)?;
//! let channel = simulator::ChannelModel { offset: 321, ..simulator::ChannelModel::identity(1) };
//! let pair = simulator::make_pair(&drive, &channel, &params)?;
//! let sync = adaptsync::adaptive_sync(&pair.sender, &pair.receiver, &params, adaptsync::Matcher::Fft)?;
//! assert_eq!(sync.receiver_key_start - sync.sender_key_start, 321);
//! # Ok::<(), slkd::SyncError>(())
//! ```

pub mod adaptsync;
pub mod distance;
pub mod error;
pub mod harness;
pub mod io;
pub mod key;
pub mod params;
pub mod peaksearch;
pub mod report;
pub mod simulator;
pub mod waveform;

pub use adaptsync::{adaptive_sync, match_fft, match_naive, select_sync_sequence, AdaptiveSync, Matcher};
pub use distance::segment_sq_distance;
pub use error::{Result, SyncError};
pub use key::{hamming_fraction, quantize, BitKey, QuantizePolicy};
pub use params::SyncParams;
pub use peaksearch::{find_first_peak, find_waveform_start, peak_align, WaveformStart};
pub use waveform::{AlignAlgorithm, AlignmentResult, SyncSequence, Waveform};
