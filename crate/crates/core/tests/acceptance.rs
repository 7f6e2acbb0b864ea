//! Acceptance gate: one PASS/FAIL line per criterion. Exits non-zero if
//! any criterion fails.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{PI, SQRT_2};
use std::sync::Arc;
use std::time::{Duration, Instant};
use vibronav::agents::AgentParams;
use vibronav::dsp::{
    acc_rms, integrated_loudness, normalize_loudness, thd, StimulusParams, TrackGroup,
    TriaxialRecording, DEFAULT_HARMONICS,
};
use vibronav::evaluation::{
    classify_log, front_detect_errors, front_detect_summary, holm_correct, wilcoxon_rank_sum,
    wilcoxon_signed_rank, TrialClass, TrialOutcome,
};
use vibronav::modulation::{direction_gains, distance_gain};
use vibronav::session_io::{
    measure_realtime, run_batch, simulate, world_reach, RunConfig, RunManifest,
};
use vibronav::world::{
    detect_steps, Command, DEFAULT_TICK_S, STEP_DURATION_S, STEP_LENGTH_M, STEP_THRESHOLD_M,
};
use vibronav::{
    gains, Condition, Mode, ModulationConfig, PolarTarget, Session, SessionConfig, WorldSpec,
};

mod oracle;

// Tolerances and bands.
const GAIN_TOL: f64 = 1e-12;
const GAIN_BUDGET: Duration = Duration::from_secs(1);
const FD_IDEAL_MAX_DEG: f64 = 0.5;
const FD_IDEAL_BUDGET: Duration = Duration::from_secs(5);
const FD_MEAN_BAND: (f64, f64) = (15.0, 25.0);
const FD_WITHIN_30_MIN: f64 = 0.80;
const ARRIVAL_TOL: f64 = 0.10;
const WALK_SPEED: f64 = 100.0 / 60.0;
const PERFECT_BAND: (f64, f64) = (0.70, 0.95);
const NAV_BUDGET: Duration = Duration::from_secs(60);
const THD_SINE_MAX: f64 = 1e-6;
const THD_SQUARE: f64 = 0.3887;
const THD_SQUARE_TOL: f64 = 0.001;
const ACC_REL_TOL: f64 = 1e-3;
const TARGET_LUFS: f64 = -14.0;
const LUFS_TOL: f64 = 0.1;
const SCALE_TOL_LU: f64 = 0.05;
const REALTIME_MIN: f64 = 10.0;
const PERF_SESSIONS: usize = 10;
const PERF_SECONDS: f64 = 60.0;

// Calibrated agent.
const CAL_JND: f64 = 1.0;
const CAL_CONFUSION: f64 = 0.05;

struct Gate {
    failed: Vec<&'static str>,
}

impl Gate {
    fn report(&mut self, name: &'static str, ok: bool, detail: String) {
        println!("{} {name}: {detail}", if ok { "PASS" } else { "FAIL" });
        if !ok {
            self.failed.push(name);
        }
    }
}

fn gain_law(g: &mut Gate) {
    let start = Instant::now();
    let cfg = ModulationConfig::new(1.0, 0.2, 0.0707, true).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for _ in 0..100_000 {
        let r = rng.random_range(0.0..30.0);
        let theta = rng.random_range(-720.0..720.0);
        let t = PolarTarget::new(r, theta).unwrap();
        let (al, ar) = direction_gains(t.theta()).unwrap();
        let p = gains(t, &cfg).unwrap();
        worst = worst
            .max((al + ar - 1.0).abs())
            .max((p.sum() - cfg.c_max * distance_gain(r, &cfg).unwrap()).abs());
    }
    let bounds = [
        (-180.0, (1.0, 0.0)),
        (-90.0, (0.0, 1.0)),
        (0.0, (0.5, 0.5)),
        (90.0, (1.0, 0.0)),
        (180.0, (1.0, 0.0)),
    ]
    .iter()
    .all(|&(th, want)| {
        direction_gains(PolarTarget::new(1.0, th).unwrap().theta()).unwrap() == want
    });
    let took = start.elapsed();
    g.report(
        "gain law",
        worst <= GAIN_TOL && bounds && took < GAIN_BUDGET,
        format!("max deviation {worst:.1e}, boundaries exact: {bounds}, {took:.2?}"),
    );
}

fn distance_floor(g: &mut Gate) {
    let world = WorldSpec::default_world();
    let cfg = ModulationConfig::with_reach(1.0, 0.2, world_reach(&world)).unwrap();
    let knee = 0.8 / cfg.alpha;
    let floor_ok = (0..1000).all(|k| distance_gain(knee + k as f64 * 0.05, &cfg).unwrap() == 0.2);
    let dir = cfg.direction_only();
    let dir_ok = (0..1000).all(|k| distance_gain(k as f64 * 0.05, &dir).unwrap() == 1.0);
    g.report(
        "distance floor",
        floor_ok && dir_ok,
        format!("A(r) = 0.2 beyond {knee:.3} m: {floor_ok}, direction-only A = 1: {dir_ok}"),
    );
}

fn front_detect(jnd: f64, p: f64, trials: usize) -> (f64, f64) {
    let mut cfg = RunConfig::new(Mode::FrontDetect);
    cfg.conditions = vec![Condition::HapDir];
    cfg.trial_count = Some(trials);
    cfg.agent = AgentParams {
        amp_jnd: jnd,
        front_back_confusion_p: p,
        ..AgentParams::default()
    };
    let runs = run_batch(&cfg, Arc::new(WorldSpec::default_world())).unwrap();
    let errs: Vec<f64> = front_detect_errors(&runs[0].log)
        .unwrap()
        .into_iter()
        .map(|e| e.1)
        .collect();
    assert_eq!(errs.len(), trials);
    let s = front_detect_summary(&errs).unwrap();
    (s.mean_abs, s.pct_within_30)
}

fn front_detect_criteria(g: &mut Gate) {
    let start = Instant::now();
    let (ideal, _) = front_detect(0.0, 0.0, 100);
    let took = start.elapsed();
    let (mean, within) = front_detect(CAL_JND, CAL_CONFUSION, 200);
    g.report(
        "front-detect",
        ideal < FD_IDEAL_MAX_DEG
            && took < FD_IDEAL_BUDGET
            && (FD_MEAN_BAND.0..=FD_MEAN_BAND.1).contains(&mean)
            && within >= FD_WITHIN_30_MIN,
        format!(
            "ideal mean {ideal:.2e} deg in {took:.2?}; calibrated mean {mean:.2} deg, {:.1}% within 30 deg",
            100.0 * within
        ),
    );
}

fn navigation(agent: AgentParams) -> (Vec<TrialOutcome>, usize, Duration) {
    let world = Arc::new(WorldSpec::default_world());
    let mut cfg = RunConfig::new(Mode::Navigation);
    cfg.agent = agent;
    let start = Instant::now();
    let runs = run_batch(&cfg, world.clone()).unwrap();
    let took = start.elapsed();
    let mut all = Vec::new();
    let mut skipped = 0;
    for r in &runs {
        let (o, s) = classify_log(&r.log, &world).unwrap();
        all.extend(o);
        skipped += s;
    }
    (all, skipped, took)
}

fn mean(xs: impl Iterator<Item = f64>) -> Option<f64> {
    let (s, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    (n > 0).then(|| s / n as f64)
}

fn navigation_ideal(g: &mut Gate) {
    let (out, skipped, _) = navigation(AgentParams::ideal());
    let perfect = out
        .iter()
        .filter(|o| o.class == TrialClass::Perfect)
        .count();
    let worst_travel = out
        .iter()
        .map(|o| (o.travel_distance - o.route_distance).abs())
        .fold(0.0, f64::max);
    let arrival = mean(out.iter().map(|o| o.arrival_time)).unwrap_or(f64::NAN);
    let walk = mean(out.iter().map(|o| o.shortest_distance / WALK_SPEED)).unwrap_or(f64::NAN);
    let ratio = arrival / walk;
    g.report(
        "navigation, zero noise",
        out.len() == 96 && skipped == 0 && perfect == 96 && worst_travel <= STEP_LENGTH_M && (ratio - 1.0).abs() <= ARRIVAL_TOL,
        format!(
            "{perfect}/{} Perfect, max |travel - route| {worst_travel:.3} m, arrival {arrival:.2} s vs {walk:.2} s at 100 m/min (ratio {ratio:.3})",
            out.len()
        ),
    );
}

fn navigation_calibrated(g: &mut Gate) {
    let (out, skipped, took) = navigation(AgentParams {
        amp_jnd: CAL_JND,
        front_back_confusion_p: CAL_CONFUSION,
        ..AgentParams::default()
    });
    let mut rates = Vec::new();
    for c in Condition::ALL {
        let of: Vec<&TrialOutcome> = out.iter().filter(|o| o.condition == c).collect();
        let p = of.iter().filter(|o| o.class == TrialClass::Perfect).count() as f64
            / of.len().max(1) as f64;
        rates.push((c, p));
    }
    let in_band = rates
        .iter()
        .all(|&(_, p)| (PERFECT_BAND.0..=PERFECT_BAND.1).contains(&p));
    let dist = |class| {
        mean(
            out.iter()
                .filter(|o| o.class == class)
                .map(|o| o.travel_distance),
        )
    };
    let (dp, dm) = (dist(TrialClass::Perfect), dist(TrialClass::Miss));
    let ordered = matches!((dp, dm), (Some(p), Some(m)) if m > p);
    let listed: Vec<String> = rates.iter().map(|(c, p)| format!("{c} {p:.3}")).collect();
    g.report(
        "navigation, calibrated",
        in_band && ordered && out.len() + skipped == 96 && skipped == 0 && took < NAV_BUDGET,
        format!(
            "Perfect {}; mean distance Perfect {:.2} m, Miss {:.2} m; {} trials in {took:.2?}",
            listed.join(", "),
            dp.unwrap_or(f64::NAN),
            dm.unwrap_or(f64::NAN),
            out.len()
        ),
    );
}

fn sine(fs: f64, n: usize, f: f64, a: f64) -> Vec<f64> {
    (0..n)
        .map(|i| a * (2.0 * PI * f * i as f64 / fs).sin())
        .collect()
}

fn dsp(g: &mut Gate) {
    let fs = 48_000.0;
    let sine_thd = thd(&sine(fs, 1 << 16, 1000.0, 0.8), fs, DEFAULT_HARMONICS).unwrap();
    let square: Vec<f64> = (0..1 << 16)
        .map(|i| {
            let t = i as f64 / fs;
            (1..240)
                .step_by(2)
                .map(|k| 4.0 / (PI * k as f64) * (2.0 * PI * 100.0 * k as f64 * t).sin())
                .sum()
        })
        .collect();
    let square_thd = thd(&square, fs, DEFAULT_HARMONICS).unwrap();

    let a = 2.0;
    let x = sine(1000.0, 2000, 20.0, a);
    let z = vec![0.0; x.len()];
    let acc = acc_rms(&TriaxialRecording::new(1000.0, x, z.clone(), z).unwrap()).unwrap();
    let acc_err = (acc - a / SQRT_2).abs() / (a / SQRT_2);

    let track = StimulusParams::default().generate().unwrap();
    let mut worst_norm: f64 = 0.0;
    for grp in TrackGroup::ALL {
        let n = normalize_loudness(track.group(grp), TARGET_LUFS).unwrap();
        let l = integrated_loudness(&n.buffer).unwrap().lufs().unwrap();
        worst_norm = worst_norm.max((l - TARGET_LUFS).abs());
    }
    let mix = track.group(TrackGroup::Mix);
    let base = integrated_loudness(mix).unwrap().lufs().unwrap();
    let mut worst_scale: f64 = 0.0;
    for gain in [0.5, 0.25, 2.0, 0.1] {
        let l = integrated_loudness(&mix.scaled(gain))
            .unwrap()
            .lufs()
            .unwrap();
        worst_scale = worst_scale.max((l - base - 20.0 * f64::log10(gain)).abs());
    }
    g.report(
        "DSP",
        sine_thd < THD_SINE_MAX
            && (square_thd - THD_SQUARE).abs() <= THD_SQUARE_TOL
            && acc_err <= ACC_REL_TOL
            && worst_norm <= LUFS_TOL
            && worst_scale <= SCALE_TOL_LU,
        format!(
            "sine THD {sine_thd:.1e}, square THD {square_thd:.4}, ACC_RMS rel err {acc_err:.1e}, normalize off by {worst_norm:.3} LU, scaling off by {worst_scale:.3} LU"
        ),
    );
}

fn statistics(g: &mut Gate) {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut mismatches = 0;
    for _ in 0..1000 {
        let n = rng.random_range(1..=8);
        let d: Vec<f64> = (0..n).map(|_| rng.random_range(-5..=5) as f64).collect();
        if d.iter().any(|&x| x != 0.0)
            && wilcoxon_signed_rank(&d).unwrap().p_value != oracle::signed_rank_oracle(&d)
        {
            mismatches += 1;
        }
        let n1 = rng.random_range(1..=6);
        let n2 = rng.random_range(1..=12 - n1);
        let a: Vec<f64> = (0..n1).map(|_| rng.random_range(0..6) as f64).collect();
        let b: Vec<f64> = (0..n2).map(|_| rng.random_range(0..6) as f64).collect();
        if wilcoxon_rank_sum(&a, &b).unwrap().p_value != oracle::rank_sum_oracle(&a, &b) {
            mismatches += 1;
        }
    }
    let once = holm_correct(&[0.01, 0.04]).unwrap();
    let twice = holm_correct(&once).unwrap();
    let hand = once == [0.02, 0.04];
    let idempotent = twice == once;
    g.report(
        "statistics",
        mismatches == 0 && hand && idempotent,
        format!(
            "{mismatches} mismatches against enumeration over 2000 tests; Holm [0.01, 0.04] -> {once:?} (hand value: {hand}); applied twice -> {twice:?} (idempotent: {idempotent})"
        ),
    );
}

fn excursion(peak: f64) -> Vec<f64> {
    let mut v = vec![0.0; 4];
    v.extend([0.3, 0.6, 1.0, 0.6, 0.3].map(|k| k * peak));
    v.extend([0.0; 4]);
    v
}

fn step_detection(g: &mut Gate) {
    let count = |trace: &[f64]| detect_steps(trace, DEFAULT_TICK_S, 0.0, STEP_THRESHOLD_M).len();
    let double: Vec<f64> = [excursion(0.12), excursion(0.14)].concat();
    let counts = (
        count(&excursion(0.12)),
        count(&excursion(0.09)),
        count(&double),
    );

    let cfg = SessionConfig::new(
        Mode::FrontDetect,
        Condition::HapDir,
        ModulationConfig::default(),
    );
    let mut s = Session::new(Arc::new(WorldSpec::default_world()), cfg, "acceptance").unwrap();
    let y0 = s.pose().y;
    s.step(Command {
        step: true,
        ..Default::default()
    })
    .unwrap();
    let mut ticks = 1;
    while s.pose().y - y0 < STEP_LENGTH_M - 1e-9 && ticks < 100 {
        s.step(Command::default()).unwrap();
        ticks += 1;
    }
    let moved = s.pose().y - y0;
    let elapsed = ticks as f64 * DEFAULT_TICK_S;
    let ok = counts == (1, 0, 2)
        && (moved - STEP_LENGTH_M).abs() <= STEP_LENGTH_M / STEP_DURATION_S * DEFAULT_TICK_S
        && (elapsed - STEP_DURATION_S).abs() <= DEFAULT_TICK_S;
    g.report(
        "step detection",
        ok,
        format!("steps for +12 cm / +9 cm / double: {counts:?}; one step moved {moved:.4} m over {elapsed:.3} s"),
    );
}

fn determinism(g: &mut Gate) {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let mut cfg = RunConfig::new(Mode::Navigation);
    cfg.agent = AgentParams {
        amp_jnd: CAL_JND,
        front_back_confusion_p: CAL_CONFUSION,
        ..AgentParams::default()
    };
    let first = simulate(&cfg, &WorldSpec::default_world(), a.path()).unwrap();
    let m = RunManifest::load(&first.manifest_path).unwrap();
    simulate(&m.config, &m.world().unwrap(), b.path()).unwrap();
    let same = first.manifest.outputs.iter().all(|name| {
        std::fs::read(a.path().join(name)).unwrap() == std::fs::read(b.path().join(name)).unwrap()
    });
    g.report(
        "determinism",
        same,
        format!(
            "{} logs replayed from the manifest, byte-identical: {same}",
            first.manifest.outputs.len()
        ),
    );
}

fn performance(g: &mut Gate) {
    let r = measure_realtime(PERF_SESSIONS, PERF_SECONDS).unwrap();
    g.report(
        "performance",
        r.factor() >= REALTIME_MIN,
        format!(
            "{} sessions x {} s simulated with block rendering in {:.2} s wall: {:.1}x real time each",
            r.sessions,
            r.simulated_s,
            r.wall_s,
            r.factor()
        ),
    );
}

fn main() {
    let mut g = Gate { failed: Vec::new() };
    gain_law(&mut g);
    distance_floor(&mut g);
    front_detect_criteria(&mut g);
    navigation_ideal(&mut g);
    navigation_calibrated(&mut g);
    dsp(&mut g);
    statistics(&mut g);
    step_detection(&mut g);
    determinism(&mut g);
    performance(&mut g);
    if g.failed.is_empty() {
        println!("acceptance: all criteria pass");
    } else {
        println!(
            "acceptance: {} failing: {}",
            g.failed.len(),
            g.failed.join(", ")
        );
        std::process::exit(1);
    }
}
