//! Invariant suites shared by the `properties` test target and the
//! acceptance runner. Each suite runs 1000 generated cases with a
//! deterministic RNG.

#![allow(dead_code)]

use proptest::prelude::*;
use proptest::test_runner::{Config, TestRng, TestRunner};

use slkd::simulator::{gen_driving, make_pair, ChannelModel, DrivingKind};
use slkd::{
    find_first_peak, find_waveform_start, hamming_fraction, match_fft, match_naive, peak_align, quantize,
    segment_sq_distance, BitKey, QuantizePolicy, SyncParams, SyncSequence, Waveform,
};

pub const CASES: u32 = 1000;

pub fn runner() -> TestRunner {
    let config = Config { cases: CASES, failure_persistence: None, ..Config::default() };
    TestRunner::new_with_rng(config.clone(), TestRng::deterministic_rng(config.rng_algorithm))
}

type Suite = fn(&mut TestRunner) -> Result<(), String>;

/// `(name, suite)` for every invariant suite.
pub fn suites() -> Vec<(&'static str, Suite)> {
    vec![
        ("hamming metric laws", hamming_metric_laws),
        ("quantize length and affine invariance", quantize_affine_invariance),
        ("peak search amplitude-scale invariance", peak_scale_invariance),
        ("peak search translation covariance and local maximum", peak_translation_covariance),
        ("segment distance zero iff equal", segment_distance_zero_iff_equal),
        ("matcher equivalence (small instances)", matcher_equivalence),
        ("matcher self-recovery and shift equivariance", matcher_self_recovery),
        ("simulator determinism", simulator_determinism),
        ("simulator zero-noise exactness", simulator_zero_noise_exactness),
    ]
}

fn report<V: std::fmt::Debug>(r: Result<(), proptest::test_runner::TestError<V>>) -> Result<(), String> {
    r.map_err(|e| e.to_string())
}

fn bits(len: usize) -> impl Strategy<Value = Vec<bool>> {
    prop::collection::vec(any::<bool>(), len)
}

pub fn hamming_metric_laws(runner: &mut TestRunner) -> Result<(), String> {
    let strategy = (1usize..200).prop_flat_map(|n| (bits(n), bits(n), bits(n)));
    report(runner.run(&strategy, |(a, b, c)| {
        let (ka, kb, kc) = (BitKey::from_bits(a.clone()), BitKey::from_bits(b.clone()), BitKey::from_bits(c));
        let ab = hamming_fraction(&ka, &kb).unwrap();
        let ba = hamming_fraction(&kb, &ka).unwrap();
        let bc = hamming_fraction(&kb, &kc).unwrap();
        let ac = hamming_fraction(&ka, &kc).unwrap();
        prop_assert_eq!(ab, ba);
        prop_assert_eq!(hamming_fraction(&ka, &ka).unwrap(), 0.0);
        prop_assert_eq!(ab == 0.0, a == b);
        prop_assert!(ac <= ab + bc + 1e-12);
        prop_assert!((0.0..=1.0).contains(&ab));
        let differing = ka.hamming_count(&kb).unwrap();
        let agreeing = ka.bits().zip(kb.bits()).filter(|(x, y)| x == y).count();
        prop_assert_eq!(differing + agreeing, ka.len());
        Ok(())
    }))
}

pub fn quantize_affine_invariance(runner: &mut TestRunner) -> Result<(), String> {
    // Integer-valued samples and integer maps keep every threshold exact.
    let strategy = (prop::collection::vec(-50i32..50, 1..300), 1i32..20, -100i32..100, -60i32..60);
    report(runner.run(&strategy, |(xs, scale, shift, t)| {
        let x: Vec<f64> = xs.iter().map(|&v| f64::from(v)).collect();
        let y: Vec<f64> = xs.iter().map(|&v| f64::from(v * scale + shift)).collect();
        let k = x.len();
        for policy in [QuantizePolicy::Median, QuantizePolicy::Mean] {
            let a = quantize(&x, k, policy).unwrap();
            let b = quantize(&y, k, policy).unwrap();
            prop_assert_eq!(a.len(), k);
            prop_assert_eq!(&a, &b);
        }
        let fixed_x = quantize(&x, k, QuantizePolicy::Fixed(f64::from(t))).unwrap();
        let fixed_y = quantize(&y, k, QuantizePolicy::Fixed(f64::from(t * scale + shift))).unwrap();
        prop_assert_eq!(fixed_x, fixed_y);
        Ok(())
    }))
}

fn small_peak_params() -> SyncParams {
    SyncParams { align_window: 10, key_len: 20, ..SyncParams::default() }
}

/// Quiet lead-in (zeros) followed by an active burst.
fn lead_and_burst() -> impl Strategy<Value = (usize, Vec<f64>)> {
    (0usize..60, prop::collection::vec(-0.2f64..1.0, 30..300))
}

pub fn peak_scale_invariance(runner: &mut TestRunner) -> Result<(), String> {
    let params = small_peak_params();
    let strategy = (lead_and_burst(), 1e-3f64..1e3);
    report(runner.run(&strategy, |((lead, burst), c)| {
        let mut samples = vec![0.0; lead];
        samples.extend(burst);
        let base = Waveform::new(samples.clone()).unwrap();
        let scaled = Waveform::new(samples.iter().map(|v| v * c).collect()).unwrap();
        prop_assert_eq!(find_waveform_start(&base, &params).unwrap(), find_waveform_start(&scaled, &params).unwrap());
        let a = peak_align(&base, &params).map(|r| r.position).map_err(|e| e.to_string());
        let b = peak_align(&scaled, &params).map(|r| r.position).map_err(|e| e.to_string());
        prop_assert_eq!(a.is_ok(), b.is_ok());
        if let (Ok(a), Ok(b)) = (a, b) {
            prop_assert_eq!(a, b);
        }
        Ok(())
    }))
}

pub fn peak_translation_covariance(runner: &mut TestRunner) -> Result<(), String> {
    let params = small_peak_params();
    // Lead-in of at least one window so the peak scan starts inside silence.
    let strategy = (10usize..60, prop::collection::vec(-0.2f64..1.0, 30..300), 0usize..200);
    report(runner.run(&strategy, |(lead, burst, q)| {
        let mut samples = vec![0.0; lead];
        samples.extend(burst);
        let base = Waveform::new(samples.clone()).unwrap();
        let mut shifted_samples = vec![0.0; q];
        shifted_samples.extend(samples);
        let shifted = Waveform::new(shifted_samples).unwrap();

        let s0 = find_waveform_start(&base, &params).unwrap();
        let s1 = find_waveform_start(&shifted, &params).unwrap();
        // A quiescent opening pins the start to the first window.
        prop_assert_eq!(s0.position, params.align_window);
        prop_assert_eq!(s1.position, params.align_window);

        let p0 = find_first_peak(&base, s0.position, &params).unwrap();
        let p1 = find_first_peak(&shifted, s1.position, &params).unwrap();
        prop_assert_eq!(p1.position, p0.position + q);

        let w = base.samples();
        let p = p0.position;
        if p > s0.position {
            prop_assert!(w[p] >= w[p - 1]);
        }
        if p + 1 < w.len() {
            prop_assert!(w[p] >= w[p + 1]);
        }
        prop_assert!(w[p] > params.align_threshold * base.max());
        Ok(())
    }))
}

pub fn segment_distance_zero_iff_equal(runner: &mut TestRunner) -> Result<(), String> {
    let strategy = (
        prop::collection::vec(-2i8..=2, 10..60),
        1usize..8,
        any::<prop::sample::Index>(),
        any::<bool>(),
        prop::collection::vec(-2i8..=2, 8),
    );
    report(runner.run(&strategy, |(wave, l, at, cut, other)| {
        let wave: Vec<f64> = wave.iter().map(|&v| f64::from(v)).collect();
        let i = at.index(wave.len() - l + 1);
        let sync: Vec<f64> =
            if cut { wave[i..i + l].to_vec() } else { other[..l].iter().map(|&v| f64::from(v)).collect() };
        let equal = wave[i..i + l] == sync[..];
        let s = SyncSequence::from_samples(sync, 0).unwrap();
        let d = segment_sq_distance(&wave, i, &s).unwrap();
        prop_assert!(d >= 0.0);
        prop_assert_eq!(d == 0.0, equal);
        Ok(())
    }))
}

fn sample_values(discrete: bool, n: usize) -> BoxedStrategy<Vec<f64>> {
    if discrete {
        prop::collection::vec((-2i8..=2).prop_map(f64::from), n).boxed()
    } else {
        prop::collection::vec(-1.0f64..1.0, n).boxed()
    }
}

pub fn matcher_equivalence(runner: &mut TestRunner) -> Result<(), String> {
    let strategy = (1usize..=8, 1usize..=16, any::<bool>()).prop_flat_map(|(l, k, discrete)| {
        ((l + k)..=64)
            .prop_flat_map(move |n| (Just(l), Just(k), sample_values(discrete, n), sample_values(discrete, l)))
    });
    report(runner.run(&strategy, |(l, k, wave, sync)| {
        let params = SyncParams::default().with_lengths(l, k);
        let w = Waveform::new(wave).unwrap();
        let s = SyncSequence::from_samples(sync, 0).unwrap();
        let naive = match_naive(&w, &s, &params).unwrap();
        let fft = match_fft(&w, &s, &params).unwrap();
        prop_assert_eq!(naive.position, fft.position);
        prop_assert_eq!(naive.score, fft.score);
        prop_assert!(naive.position + l + k <= w.len());
        Ok(())
    }))
}

pub fn matcher_self_recovery(runner: &mut TestRunner) -> Result<(), String> {
    let strategy = (
        2usize..24,
        1usize..40,
        prop::collection::vec(-1.0f64..1.0, 80..240),
        prop::collection::vec(-1.0f64..1.0, 0..50),
        any::<prop::sample::Index>(),
    );
    report(runner.run(&strategy, |(l, k, wave, prefix, at)| {
        let params = SyncParams::default().with_lengths(l, k);
        let w = Waveform::new(wave.clone()).unwrap();
        let origin = at.index(wave.len() - l - k + 1);
        let sync = SyncSequence::cut(&w, origin, l).unwrap();
        for found in [match_naive(&w, &sync, &params).unwrap(), match_fft(&w, &sync, &params).unwrap()] {
            prop_assert_eq!(found.position, origin);
            prop_assert_eq!(found.score, 0.0);
        }
        let q = prefix.len();
        let mut shifted = prefix;
        shifted.extend(wave);
        let shifted = Waveform::new(shifted).unwrap();
        prop_assert_eq!(match_fft(&shifted, &sync, &params).unwrap().position, origin + q);
        prop_assert_eq!(match_naive(&shifted, &sync, &params).unwrap().position, origin + q);
        Ok(())
    }))
}

fn small_sim_params() -> SyncParams {
    SyncParams { align_window: 4, sync_len: 8, key_len: 32, ..SyncParams::default() }
}

fn kind() -> impl Strategy<Value = DrivingKind> {
    prop::sample::select(DrivingKind::ALL.to_vec())
}

pub fn simulator_determinism(runner: &mut TestRunner) -> Result<(), String> {
    let params = small_sim_params();
    let strategy =
        (kind(), 80usize..200, 2usize..40, any::<u64>(), any::<u64>(), 0.0f64..0.5, 0.5f64..1.5, 0.9f64..1.1);
    report(runner.run(&strategy, |(kind, len, period, drive_seed, channel_seed, noise, gain, stretch)| {
        let d1 = gen_driving(kind, len, period, drive_seed).unwrap();
        let d2 = gen_driving(kind, len, period, drive_seed).unwrap();
        prop_assert_eq!(&d1, &d2);
        let channel = ChannelModel {
            offset: (channel_seed % 20) as usize,
            noise_sigma: noise,
            gain,
            stretch,
            stretch_span: Some(10),
            seed: channel_seed,
        };
        let a = make_pair(&d1, &channel, &params).unwrap();
        let b = make_pair(&d2, &channel, &params).unwrap();
        prop_assert_eq!(a.sender.samples(), b.sender.samples());
        prop_assert_eq!(a.receiver.samples(), b.receiver.samples());
        prop_assert_eq!(a.truth_offset, b.truth_offset);
        Ok(())
    }))
}

pub fn simulator_zero_noise_exactness(runner: &mut TestRunner) -> Result<(), String> {
    let params = small_sim_params();
    let strategy = (kind(), 80usize..200, any::<u64>(), any::<u64>(), 0usize..60);
    report(runner.run(&strategy, |(kind, len, drive_seed, channel_seed, offset)| {
        let d = gen_driving(kind, len, 17, drive_seed).unwrap();
        let channel = ChannelModel { offset, ..ChannelModel::identity(channel_seed) };
        let pair = make_pair(&d, &channel, &params).unwrap();
        prop_assert_eq!(pair.truth_offset, offset as i64);
        prop_assert_eq!(pair.sender.len(), pair.receiver.len());
        for i in 0..pair.sender.len().saturating_sub(offset) {
            prop_assert_eq!(pair.receiver[i + offset], pair.sender[i]);
        }
        Ok(())
    }))
}
