use std::f64::consts::{PI, SQRT_2};
use vibronav::dsp::{
    acc_rms, arrival_cue, integrated_loudness, normalize_loudness, shear_wave_attenuation,
    spatialize_vox, thd, AttenuationModel, CueKind, CueSignal, StereoBuffer, StimulusParams,
    TrackGroup, TriaxialRecording, DEFAULT_HARMONICS, DEFAULT_TARGET_LUFS,
};
use vibronav::Condition;

fn sine(fs: f64, n: usize, f: f64, a: f64) -> Vec<f64> {
    (0..n)
        .map(|i| a * (2.0 * PI * f * i as f64 / fs).sin())
        .collect()
}

// |H(e^jw)|^2 of a biquad with a0 = 1.
fn biquad_power(b: [f64; 3], a: [f64; 2], f: f64, fs: f64) -> f64 {
    let w = 2.0 * PI * f / fs;
    let mag2 = |c: [f64; 3]| {
        let re = c[0] + c[1] * w.cos() + c[2] * (2.0 * w).cos();
        let im = -c[1] * w.sin() - c[2] * (2.0 * w).sin();
        re * re + im * im
    };
    mag2(b) / mag2([1.0, a[0], a[1]])
}

fn k_weight_power(f: f64) -> f64 {
    // published 48 kHz stage coefficients
    let shelf = biquad_power(
        [1.53512485958697, -2.69169618940638, 1.19839281085285],
        [-1.69065929318241, 0.73248077421585],
        f,
        48_000.0,
    );
    let rlb = biquad_power(
        [1.0, -2.0, 1.0],
        [-1.99004745483398, 0.99007225036621],
        f,
        48_000.0,
    );
    shelf * rlb
}

fn stereo(fs: u32, left: &[f64], right: &[f64]) -> StereoBuffer {
    let l: Vec<f32> = left.iter().map(|&v| v as f32).collect();
    let r: Vec<f32> = right.iter().map(|&v| v as f32).collect();
    StereoBuffer::from_channels(fs, &l, &r).unwrap()
}

#[test]
fn full_scale_997_one_channel_matches_closed_form() {
    let n = 48_000 * 5;
    let left = sine(48_000.0, n, 997.0, 1.0);
    let right = vec![0.0; n];
    let got = integrated_loudness(&stereo(48_000, &left, &right))
        .unwrap()
        .lufs()
        .unwrap();
    let z = k_weight_power(997.0) / 2.0;
    let want = -0.691 + 10.0 * z.log10();
    assert!((got - want).abs() < 0.01, "got {got}, oracle {want}");
}

#[test]
fn both_channels_add_three_db() {
    let n = 48_000 * 4;
    let s = sine(48_000.0, n, 997.0, 0.5);
    let one = integrated_loudness(&stereo(48_000, &s, &vec![0.0; n]))
        .unwrap()
        .lufs()
        .unwrap();
    let two = integrated_loudness(&stereo(48_000, &s, &s))
        .unwrap()
        .lufs()
        .unwrap();
    assert!((two - one - 10.0 * 2f64.log10()).abs() < 0.01);
}

#[test]
fn scaling_shifts_by_twenty_log_gain() {
    let track = StimulusParams::default().generate().unwrap();
    let mix = track.group(TrackGroup::Mix).clone();
    let base = integrated_loudness(&mix).unwrap().lufs().unwrap();
    for g in [0.5, 0.25, 1.5, 0.1] {
        let l = integrated_loudness(&mix.scaled(g)).unwrap().lufs().unwrap();
        let want = 20.0 * f64::log10(g);
        assert!(
            (l - base - want).abs() < 0.05,
            "gain {g}: {} vs {want}",
            l - base
        );
    }
    let half = integrated_loudness(&mix.scaled(0.5))
        .unwrap()
        .lufs()
        .unwrap();
    assert!((base - half - 6.02).abs() < 0.05);
}

#[test]
fn normalize_lands_on_target_and_is_idempotent() {
    let n = 48_000 * 3;
    let s = sine(48_000.0, n, 440.0, 0.05);
    let quiet = stereo(48_000, &s, &s);
    let once = normalize_loudness(&quiet, DEFAULT_TARGET_LUFS).unwrap();
    let l1 = integrated_loudness(&once.buffer).unwrap().lufs().unwrap();
    assert!((l1 + 14.0).abs() < 0.1);
    let twice = normalize_loudness(&once.buffer, DEFAULT_TARGET_LUFS).unwrap();
    assert!((twice.gain - 1.0).abs() < 1e-3);

    // -20 needs +6 dB
    let at20 = normalize_loudness(&quiet, -20.0).unwrap().buffer;
    let g = normalize_loudness(&at20, -14.0).unwrap().gain;
    assert!((g - 10f64.powf(6.0 / 20.0)).abs() < 2e-3);
}

#[test]
fn generated_groups_all_at_target() {
    let track = StimulusParams::default().generate().unwrap();
    for g in [TrackGroup::Vox, TrackGroup::Inst, TrackGroup::Mix] {
        let out = normalize_loudness(track.group(g), -14.0).unwrap();
        let l = integrated_loudness(&out.buffer).unwrap().lufs().unwrap();
        assert!((l + 14.0).abs() < 0.1, "{}: {l}", g.name());
    }
}

#[test]
fn sine_has_no_distortion() {
    for (f, fs) in [(100.0, 48_000.0), (137.3, 44_100.0), (1000.0, 48_000.0)] {
        let s = sine(fs, 1 << 16, f, 0.8);
        let d = thd(&s, fs, DEFAULT_HARMONICS).unwrap();
        assert!(d < 1e-6, "{f} Hz: {d}");
    }
}

#[test]
fn square_wave_thd_matches_fourier_series() {
    // band-limited unit square: odd harmonics at 4/(pi k)
    let (fs, f0, n) = (48_000.0, 100.0, 1 << 16);
    let sq: Vec<f64> = (0..n)
        .map(|i| {
            let t = i as f64 / fs;
            (1..)
                .step_by(2)
                .take_while(|&k| k as f64 * f0 < fs / 2.0)
                .map(|k| 4.0 / (PI * k as f64) * (2.0 * PI * k as f64 * f0 * t).sin())
                .sum()
        })
        .collect();
    let oracle = ((1.0f64 / 3.0).powi(2) + (1.0f64 / 5.0).powi(2)).sqrt();
    let d = thd(&sq, fs, DEFAULT_HARMONICS).unwrap();
    assert!((oracle - 0.3887).abs() < 1e-4);
    assert!((d - oracle).abs() < 0.001, "thd {d}");
    assert!((20.0 * d.log10() + 8.2).abs() < 0.05);
}

// direct mean square over whole periods
fn rms_oracle(v: &[f64]) -> f64 {
    (v.iter().map(|x| x * x).sum::<f64>() / v.len() as f64).sqrt()
}

#[test]
fn acc_rms_of_axis_sines() {
    let fs = 1000.0;
    let n = 2000; // 40 whole periods at 20 Hz
    let a = 3.5;
    let s = sine(fs, n, 20.0, a);
    let z = vec![0.0; n];
    let one =
        acc_rms(&TriaxialRecording::new(fs, s.clone(), z.clone(), z.clone()).unwrap()).unwrap();
    assert!((one - rms_oracle(&s)).abs() / one < 1e-9);
    assert!((one - a / SQRT_2).abs() / (a / SQRT_2) < 1e-3);
    let all =
        acc_rms(&TriaxialRecording::new(fs, s.clone(), s.clone(), s.clone()).unwrap()).unwrap();
    assert!((all - 3.0 * a / SQRT_2).abs() / (3.0 * a / SQRT_2) < 1e-3);
    // a constant offset (gravity) does not count
    let shifted: Vec<f64> = s.iter().map(|v| v + 9.81).collect();
    let g = acc_rms(&TriaxialRecording::new(fs, shifted, z.clone(), z).unwrap()).unwrap();
    assert!((g - one).abs() < 1e-9);
}

#[test]
fn vox_pan_preserves_power() {
    for k in 0..3600 {
        let theta = -179.9 + 0.1 * k as f64;
        let f = spatialize_vox(0.6, theta);
        assert!((f.left.powi(2) + f.right.powi(2) - 0.36).abs() < 1e-12);
        assert!(f.left >= -1e-15 && f.right >= -1e-15);
    }
}

#[test]
fn attenuation_ratio() {
    let m = AttenuationModel::new(0.5).unwrap();
    let ratio = shear_wave_attenuation(0.07, 140.0, &m).unwrap()
        / shear_wave_attenuation(0.07, 20.0, &m).unwrap();
    assert!((ratio - (-0.5f64 * 0.07 * 120.0).exp()).abs() < 1e-12);
    assert!((ratio - 0.0150).abs() < 5e-5);
}

#[test]
fn cue_kinds_per_condition() {
    for c in [Condition::HapDir, Condition::HapDirDist] {
        assert_eq!(
            arrival_cue(c),
            CueKind::Vibration {
                freq_hz: 10.0,
                duration_s: 1.0
            }
        );
    }
    for c in [Condition::Nt, Condition::NtHap] {
        assert!(matches!(arrival_cue(c), CueKind::Ping { .. }));
    }
    let sig = CueSignal::render(arrival_cue(Condition::HapDir), 1000);
    assert_eq!(sig.samples.len(), 1000);
    // ten cycles from phase zero: upward crossings at 0.1 s .. 0.9 s
    let ups = sig
        .samples
        .windows(2)
        .filter(|w| w[0] < 0.0 && w[1] >= 0.0)
        .count();
    assert_eq!(ups, 9);
}
