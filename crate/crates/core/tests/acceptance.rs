//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Criteria listed in `EXPECTED_FAILURES` are reported as FAIL but do not
//! fail the run; if one of them starts passing the run fails so the list
//! gets updated.

mod common;

use std::fs;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hasel_joint::actuator::{
    ClutchEngagementState, ClutchForceModel, ClutchMode, HaselAnchor, HaselModel, HaselSpec,
};
use hasel_joint::control::{
    command_trace, validate_schedule, Braking, Gait, GaitParams, ViolationKind,
};
use hasel_joint::harness::{summarize_sweep, sweep_rom, Mode, Scenario, SweepSpec};
use hasel_joint::joint::{
    quasi_static_reach, simulate_observed, AntagonistIdealization, JointConfig, JointState,
    MuscleUnit, SimOptions, TendonSpec, UnitDrive, UnitInternal,
};

use common::UnitCase;

/// Criterion 6 cannot be met with the default limb; see the project notes.
const EXPECTED_FAILURES: &[u32] = &[6];

// Criterion 1
const SIZING_REL_TOL: f64 = 0.05;
const SIZING_MAX_TIME: Duration = Duration::from_secs(1);
// Criterion 2
const CLUTCH_FORCE_REL_TOL: f64 = 0.02;
const SHEAR_REL_TOL: f64 = 0.03;
// Criterion 3
const OPERATING_POINT_REL_TOL: f64 = 0.05;
// Criterion 4
const UTILIZATION_TOL: f64 = 0.01;
const RATIO_TOL: f64 = 0.05;
const QUASI_STATIC_MAX_TIME: Duration = Duration::from_secs(10);
// Criterion 5
const MIN_GAIN_AT_DEFAULT: f64 = 0.30;
const SWEEP_MAX_TIME: Duration = Duration::from_secs(300);
// Criterion 6
const PEAK_REL_TOL: f64 = 0.25;
// Criterion 7
const CONE_STEPS: usize = 1_000_000;
const CONE_TOL_N: f64 = 1e-6;
// Criterion 8
const ENERGY_TOL_J: f64 = 1e-4;
const FINAL_ANGLE_TOL_DEG: f64 = 0.5;
const DECAY_DURATION_S: f64 = 20.0;
// Criterion 9
const ORACLE_CASES: usize = 100;
const ORACLE_GRID: usize = 10_000;
const ORACLE_TOL_N: f64 = 1e-3;
// Criterion 10
const DT_S: f64 = 50e-6;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hasel-joint"))
}

fn sizing() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("design.json");
    fs::write(
        &input,
        r#"{
  "operating_force_n": 1.0,
  "operating_strain": 0.08,
  "hasel_length_cm": 16.0,
  "hasel_width_cm": 4.5,
  "friction_density_n_per_cm2": 5.5,
  "sleeve_modulus_kpa": 100.0,
  "sleeve_thickness_mm": 1.0,
  "safety_factor": 1.0
}"#,
    )
    .unwrap();
    let start = Instant::now();
    let out = bin()
        .args(["size", "--json", "--input"])
        .arg(&input)
        .output()
        .unwrap();
    let elapsed = start.elapsed();
    if !out.status.success() {
        return outcome(false, format!("size exited with {:?}", out.status.code()));
    }
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let lc = v["theoretical_clutch_length_cm"].as_f64().unwrap();
    let area = v["theoretical_clutch_area_cm2"].as_f64().unwrap();
    let pass = rel(lc, 0.0404) <= SIZING_REL_TOL
        && rel(area, 0.182) <= SIZING_REL_TOL
        && rel(lc, 0.04) <= SIZING_REL_TOL
        && rel(area, 0.18) <= SIZING_REL_TOL
        && elapsed < SIZING_MAX_TIME;
    outcome(
        pass,
        format!(
            "L_c = {lc:.5} cm, area = {area:.4} cm^2, {:.3} s",
            elapsed.as_secs_f64()
        ),
    )
}

fn clutch_law() -> Outcome {
    let m = ClutchForceModel::default();
    let f100 = m.holding_force(100.0).unwrap();
    let f150 = m.holding_force(150.0).unwrap();
    let s100 = m.shear_stress(100.0, 15.0).unwrap();
    let s150 = m.shear_stress(150.0, 15.0).unwrap();
    let pass = rel(f100, 41.7) <= CLUTCH_FORCE_REL_TOL
        && rel(f150, 82.5) <= CLUTCH_FORCE_REL_TOL
        && rel(s100, 2.8) <= SHEAR_REL_TOL
        && rel(s150, 5.6) <= SHEAR_REL_TOL;
    outcome(
        pass,
        format!(
            "F(100 V) = {f100:.3} N, F(150 V) = {f150:.3} N, stress {s100:.3} / {s150:.3} N/cm^2, alpha = {:.4}",
            m.exponent_alpha
        ),
    )
}

fn hasel_anchors() -> Outcome {
    let m = HaselModel::default();
    let fb = m.blocked_force(8.0).unwrap();
    let xf = m.free_displacement(8.0).unwrap();
    let f_op = m.force(0.08 * 160.0, 8.0).unwrap();
    let pass = fb == 16.3 && xf == 18.0 && rel(f_op, 1.0) <= OPERATING_POINT_REL_TOL;
    outcome(
        pass,
        format!(
            "F_b = {fb} N, x_f = {xf} mm, n = {:.4}, F(12.8 mm) = {f_op:.4} N",
            m.shape_exponent
        ),
    )
}

fn slack_law() -> Outcome {
    let start = Instant::now();
    let s = Scenario::default();
    let hasel = HaselModel::default();
    let tendon = TendonSpec::default();
    let contraction = s.operating_strain * hasel.spec.total_length_mm();
    let slack = s.slack_only_slack_mm().unwrap();
    let slack_only = quasi_static_reach(
        contraction,
        slack,
        AntagonistIdealization::LockedRigid,
        &hasel,
        &tendon,
    )
    .unwrap();
    let clutch = quasi_static_reach(
        contraction,
        0.0,
        AntagonistIdealization::ReleasedFree,
        &hasel,
        &tendon,
    )
    .unwrap();
    let ratio = clutch.excursion_mm / slack_only.excursion_mm;
    let elapsed = start.elapsed();
    let pass = (slack_only.utilization - 0.5).abs() <= UTILIZATION_TOL
        && (clutch.utilization - 1.0).abs() <= UTILIZATION_TOL
        && (ratio - 2.0).abs() <= RATIO_TOL
        && elapsed < QUASI_STATIC_MAX_TIME;
    outcome(
        pass,
        format!(
            "slack-only {:.2}%, clutch {:.2}%, ratio {ratio:.4}, {:.3} s",
            100.0 * slack_only.utilization,
            100.0 * clutch.utilization,
            elapsed.as_secs_f64()
        ),
    )
}

struct SweepResult {
    rows: Vec<(f64, f64, f64)>,
    peak_hz: f64,
    peak_deg: f64,
    interior: bool,
    f_lin: f64,
    elapsed: Duration,
}

fn run_default_sweep() -> Result<SweepResult, String> {
    let spec = SweepSpec::default();
    let start = Instant::now();
    let points = sweep_rom(&spec).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let summary = summarize_sweep(&spec, points).map_err(|e| e.to_string())?;
    let rows = spec
        .frequencies_hz
        .iter()
        .map(|&f| {
            let rom = |mode: Mode| {
                summary
                    .points
                    .iter()
                    .find(|p| p.frequency_hz == f && p.mode == mode)
                    .map(|p| p.rom_deg)
                    .unwrap_or(f64::NAN)
            };
            (f, rom(Mode::SlackOnly), rom(Mode::ClutchAugmented))
        })
        .collect();
    Ok(SweepResult {
        rows,
        peak_hz: summary.peak_frequency_hz,
        peak_deg: summary.peak_rom_deg,
        interior: summary.interior_peak,
        f_lin: summary.linearized_natural_frequency_hz,
        elapsed,
    })
}

fn dynamic_ordering(sweep: &Result<SweepResult, String>) -> Outcome {
    let s = match sweep {
        Ok(s) => s,
        Err(e) => return outcome(false, format!("sweep failed: {e}")),
    };
    let ordered = s.rows.iter().all(|(_, slack, clutch)| clutch > slack);
    let worst = s
        .rows
        .iter()
        .map(|(f, slack, clutch)| (clutch / slack, *f))
        .fold((f64::INFINITY, 0.0), |a, b| if b.0 < a.0 { b } else { a });
    let at_default = s.rows.iter().find(|(f, _, _)| (f - 2.5).abs() < 1e-9);
    let (gain, slack25, clutch25) = match at_default {
        Some((_, slack, clutch)) => (clutch / slack - 1.0, *slack, *clutch),
        None => return outcome(false, "2.5 Hz missing from the sweep".into()),
    };
    let pass = ordered && gain >= MIN_GAIN_AT_DEFAULT && s.elapsed < SWEEP_MAX_TIME;
    outcome(
        pass,
        format!(
            "{} frequencies, ordering {}; 2.5 Hz: {slack25:.1} vs {clutch25:.1} deg (+{:.0}%); min ratio {:.2} at {:.1} Hz; {:.1} s",
            s.rows.len(),
            if ordered { "holds" } else { "broken" },
            100.0 * gain,
            worst.0,
            worst.1,
            s.elapsed.as_secs_f64()
        ),
    )
}

fn resonance(sweep: &Result<SweepResult, String>) -> Outcome {
    let s = match sweep {
        Ok(s) => s,
        Err(e) => return outcome(false, format!("sweep failed: {e}")),
    };
    let window = (1.0 - PEAK_REL_TOL) * s.f_lin..=(1.0 + PEAK_REL_TOL) * s.f_lin;
    let pass = s.interior && window.contains(&s.peak_hz);
    outcome(
        pass,
        format!(
            "peak {:.1} deg at {:.1} Hz (interior: {}); f_lin = {:.3} Hz, window {:.2}-{:.2} Hz",
            s.peak_deg,
            s.peak_hz,
            s.interior,
            s.f_lin,
            window.start(),
            window.end()
        ),
    )
}

fn random_gait(rng: &mut ChaCha8Rng) -> Scenario {
    let f = rng.gen_range(0.5..3.6);
    let half_ms = 500.0 / f;
    let braking = if rng.gen_bool(0.3) {
        Some(Braking {
            direction: None,
            voltage_v: rng.gen_range(0.0..100.0),
        })
    } else {
        None
    };
    Scenario {
        mode: if rng.gen_bool(0.5) {
            Mode::ClutchAugmented
        } else {
            Mode::SlackOnly
        },
        gait: GaitParams {
            frequency_hz: f,
            hasel_peak_kv: rng.gen_range(1.0..8.0),
            clutch_amplitude_v: rng.gen_range(0.0..100.0),
            clutch_lead_time_ms: rng.gen_range(0.0..(0.5 * half_ms).min(40.0)),
            rise_fraction: rng.gen_range(0.1..0.9),
            braking,
            ..GaitParams::default()
        },
        ..Scenario::default()
    }
}

fn friction_cone() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0007);
    let steps_per_run = 20_000;
    let mut steps = 0usize;
    let mut negative = 0usize;
    let mut over = 0usize;
    let mut worst_excess = f64::NEG_INFINITY;
    let mut runs = 0;
    while steps < CONE_STEPS {
        let s = random_gait(&mut rng);
        let config = s.joint_config().unwrap();
        let opts = SimOptions {
            duration_s: steps_per_run as f64 * DT_S,
            dt_s: DT_S,
            sample_period_s: 1e-3,
        };
        let mut observe = |r: &hasel_joint::joint::StepRecord| {
            for u in [&r.outcome.left, &r.outcome.right] {
                if u.tension_n < 0.0 {
                    negative += 1;
                }
                let excess = u.tension_n - (u.capacity_n + u.sleeve_force_n);
                worst_excess = worst_excess.max(excess);
                if excess > CONE_TOL_N {
                    over += 1;
                }
            }
            steps += 1;
        };
        if let Err(e) = simulate_observed(
            &config,
            &JointState::at_rest(),
            &s.command_source(),
            &opts,
            &mut observe,
        ) {
            return outcome(false, format!("run {runs} failed: {e}"));
        }
        runs += 1;
    }
    outcome(
        negative == 0 && over == 0,
        format!(
            "{steps} steps in {runs} runs: {negative} negative, {over} over the cone (max excess {worst_excess:.2e} N)"
        ),
    )
}

fn passive_energy() -> Outcome {
    let config = JointConfig::default();
    let opts = SimOptions {
        duration_s: DECAY_DURATION_S,
        dt_s: DT_S,
        sample_period_s: 1e-3,
    };
    let start = JointState::at_angle(30f64.to_radians());
    let mut last = config.mechanical_energy_j(&start);
    let initial = last;
    let mut worst_rise = 0.0_f64;
    let mut final_deg = f64::NAN;
    let result = simulate_observed(
        &config,
        &start,
        &hasel_joint::control::Idle,
        &opts,
        &mut |r| {
            let e = config.mechanical_energy_j(&r.outcome.state);
            worst_rise = worst_rise.max(e - last);
            last = e;
            final_deg = r.outcome.state.theta_rad.to_degrees();
        },
    );
    if let Err(e) = result {
        return outcome(false, e.to_string());
    }
    outcome(
        worst_rise <= ENERGY_TOL_J && final_deg.abs() <= FINAL_ANGLE_TOL_DEG,
        format!(
            "E {initial:.3e} -> {last:.3e} J, largest step rise {worst_rise:.2e} J, final angle {final_deg:.4} deg"
        ),
    )
}

fn series_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0009);
    let dt_ms = DT_S * 1e3;
    let mut worst = 0.0_f64;
    for i in 0..ORACLE_CASES {
        let blocked = rng.gen_range(2.0..40.0);
        let free = rng.gen_range(3.0..25.0);
        let shape = rng.gen_range(0.5..4.0);
        let mut hasel = HaselModel::new(
            HaselSpec::default(),
            vec![HaselAnchor::new(8.0, blocked, free)],
        )
        .unwrap()
        .with_shape_exponent(shape)
        .unwrap();
        hasel.shell_stiffness_n_per_mm = rng.gen_range(20.0..300.0);
        hasel.relaxation_time_ms = rng.gen_range(5.0..60.0);
        let mut unit = MuscleUnit {
            hasel,
            ..MuscleUnit::default()
        };
        unit.clutch.sleeve.modulus_kpa = rng.gen_range(20.0..500.0);
        let tendon = TendonSpec {
            slack_per_side_mm: rng.gen_range(0.0..3.0),
            taut_stiffness_n_per_mm: rng.gen_range(50.0..500.0),
            smoothing_mm: rng.gen_range(0.01..0.2),
            ..TendonSpec::default()
        };
        let kv = rng.gen_range(0.0..8.0);
        let clutch_v = rng.gen_range(0.0..150.0);
        let anchor = rng.gen_range(0.0..10.0);
        let previous = rng.gen_range(0.0..free);
        let excursion = rng.gen_range(-10.0..15.0);
        let (engagement, on, fraction) = match i % 3 {
            0 => (ClutchEngagementState::locked_at(anchor), true, 1.0),
            1 => (ClutchEngagementState::released(), false, 0.0),
            _ => {
                let p = rng.gen_range(0.0..0.9);
                let state = ClutchEngagementState {
                    mode: ClutchMode::Engaging,
                    lock_anchor_mm: anchor,
                    transition_progress: p,
                };
                (state, true, p + dt_ms / unit.clutch.spec.lock_time_ms)
            }
        };
        let internal = UnitInternal {
            hasel_active_mm: previous,
            hasel_contraction_mm: previous,
            clutch_stretch_mm: anchor,
            engagement,
            tension_n: 0.0,
        };
        let drive = UnitDrive {
            hasel_kv: kv,
            clutch_v,
            clutch_on: on,
            forced_lock: false,
        };
        let got = match unit.solve(&internal, excursion, &tendon, &drive, dt_ms) {
            Ok(s) => s.tension_n,
            Err(e) => return outcome(false, format!("case {i}: {e}")),
        };
        let model = &unit.clutch.force_model;
        let scale = (kv / 8.0).powi(2);
        let case = UnitCase {
            blocked_n: blocked * scale,
            free_mm: free * scale,
            shape_n: shape,
            shell_k: unit.hasel.shell_stiffness_n_per_mm,
            previous_active_mm: previous,
            retain: (-dt_ms / unit.hasel.relaxation_time_ms).exp(),
            sleeve_k: {
                let sl = &unit.clutch.sleeve;
                sl.modulus_kpa * 1e-3 * sl.width_cm * 10.0 * sl.thickness_mm * sl.layer_count as f64
                    / (unit.clutch.spec.stretchable_length_cm * 10.0)
            },
            anchor_mm: anchor,
            capacity_n: model.coefficient_k_n * clutch_v.powf(model.exponent_alpha) * fraction,
            tendon_k: tendon.taut_stiffness_n_per_mm,
            tendon_w: tendon.smoothing_mm,
            gap_mm: excursion - tendon.slack_per_side_mm,
        };
        worst = worst.max((got - case.grid_tension(ORACLE_GRID)).abs());
    }
    outcome(
        worst <= ORACLE_TOL_N,
        format!("{ORACLE_CASES} cases, largest deviation {worst:.2e} N"),
    )
}

fn timing() -> Outcome {
    let unit = MuscleUnit::default();
    let tendon = TendonSpec::default();
    let dt_ms = DT_S * 1e3;
    let full = unit.clutch.holding_force(100.0).unwrap();
    let mut internal = UnitInternal::default();
    let drive = |on: bool| UnitDrive {
        hasel_kv: 0.0,
        clutch_v: 100.0,
        clutch_on: on,
        forced_lock: false,
    };
    let mut t = 0.0;
    let mut locked_at = None;
    while t < 0.05 && locked_at.is_none() {
        let s = unit
            .solve(&internal, 0.0, &tendon, &drive(true), dt_ms)
            .unwrap();
        internal = s.internal;
        t += DT_S;
        if (s.capacity_n - full).abs() <= 1e-9 * full {
            locked_at = Some(t);
        }
    }
    let mut t = 0.0;
    let mut released_at = None;
    while t < 0.05 && released_at.is_none() {
        let s = unit
            .solve(&internal, 0.0, &tendon, &drive(false), dt_ms)
            .unwrap();
        internal = s.internal;
        t += DT_S;
        if s.capacity_n == 0.0 {
            released_at = Some(t);
        }
    }
    let lock_ok = locked_at.is_some_and(|t| (t - 0.005).abs() <= DT_S + 1e-12);
    let release_ok = released_at.is_some_and(|t| (t - 0.015).abs() <= DT_S + 1e-12);

    let flagged = |lead_ms: f64| {
        let p = GaitParams {
            clutch_lead_time_ms: lead_ms,
            ..GaitParams::default()
        };
        let trace = command_trace(&Gait::new(p), 4.0, 1e-4).unwrap();
        validate_schedule(&trace, &unit.clutch.spec)
    };
    let zero = flagged(0.0);
    let default = flagged(20.0);
    let zero_ok = zero
        .iter()
        .any(|v| v.kind == ViolationKind::EarlyHaselOnset);
    let default_ok = default.is_empty();
    outcome(
        lock_ok && release_ok && zero_ok && default_ok,
        format!(
            "full capacity after {:.3} ms, zero after {:.3} ms; 0 ms lead: {} violations, 20 ms lead: {}",
            locked_at.map_or(f64::NAN, |t| t * 1e3),
            released_at.map_or(f64::NAN, |t| t * 1e3),
            zero.len(),
            default.len()
        ),
    )
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("sweep.json");
    fs::write(&config, "{}\n").unwrap();
    let mut csvs = Vec::new();
    for name in ["first", "second"] {
        let out = dir.path().join(name);
        let status = bin()
            .arg("sweep")
            .arg("--config")
            .arg(&config)
            .arg("--out")
            .arg(&out)
            .output();
        match status {
            Ok(o) if o.status.success() => {}
            Ok(o) => return outcome(false, format!("sweep exited with {:?}", o.status.code())),
            Err(e) => return outcome(false, e.to_string()),
        }
        csvs.push(fs::read(out.join("rom_vs_frequency.csv")).unwrap());
    }
    outcome(
        csvs[0] == csvs[1],
        format!("{} and {} bytes", csvs[0].len(), csvs[1].len()),
    )
}

fn main() -> ExitCode {
    let sweep = run_default_sweep();
    let criteria: Vec<(u32, &str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        (1, "sizing reproduction", Box::new(sizing)),
        (2, "clutch force law", Box::new(clutch_law)),
        (3, "HASEL anchors", Box::new(hasel_anchors)),
        (4, "50% slack law", Box::new(slack_law)),
        (5, "dynamic ordering", Box::new(|| dynamic_ordering(&sweep))),
        (
            6,
            "resonance near linearized frequency",
            Box::new(|| resonance(&sweep)),
        ),
        (
            7,
            "friction cone and unilaterality",
            Box::new(friction_cone),
        ),
        (8, "passive energy decrease", Box::new(passive_energy)),
        (9, "series-balance oracle", Box::new(series_oracle)),
        (10, "engagement timing and schedule", Box::new(timing)),
        (11, "sweep determinism", Box::new(determinism)),
    ];
    let mut unexpected = Vec::new();
    let mut passed = 0;
    for (id, name, check) in &criteria {
        let start = Instant::now();
        let o = check();
        let secs = start.elapsed().as_secs_f64();
        println!(
            "{} {id:>2} {name}: {} [{secs:.2} s]",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
        let expected_fail = EXPECTED_FAILURES.contains(id);
        if o.pass {
            passed += 1;
            if expected_fail {
                unexpected.push(format!(
                    "criterion {id} passes but is listed as an expected failure"
                ));
            }
        } else if !expected_fail {
            unexpected.push(format!("criterion {id} failed"));
        }
    }
    println!(
        "{passed}/{} criteria passed; expected failures: {EXPECTED_FAILURES:?}",
        criteria.len()
    );
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        for u in &unexpected {
            eprintln!("{u}");
        }
        ExitCode::FAILURE
    }
}
