//! Fixed-step integration of the limb and trace post-processing.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::unit::{UnitDrive, UnitInternal, UnitSolution};
use super::{joint_torque, tendon_excursion, JointConfig, Side};
use crate::actuator::ClutchMode;
use crate::control::{CommandSource, PairCommand};
use crate::error::{check_positive, Error, Result};

pub const MAX_DT_S: f64 = 1e-3;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct JointState {
    pub time_s: f64,
    pub theta_rad: f64,
    pub theta_dot_rad_s: f64,
    pub left: UnitInternal,
    pub right: UnitInternal,
}

impl JointState {
    pub fn at_rest() -> Self {
        Self::default()
    }

    pub fn at_angle(theta_rad: f64) -> Self {
        Self {
            theta_rad,
            ..Self::default()
        }
    }

    pub fn internal(&self, side: Side) -> &UnitInternal {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        }
    }

    fn is_finite(&self) -> bool {
        let unit_ok = |u: &UnitInternal| {
            u.hasel_active_mm.is_finite()
                && u.hasel_contraction_mm.is_finite()
                && u.clutch_stretch_mm.is_finite()
                && u.tension_n.is_finite()
        };
        self.time_s.is_finite()
            && self.theta_rad.is_finite()
            && self.theta_dot_rad_s.is_finite()
            && unit_ok(&self.left)
            && unit_ok(&self.right)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StepOutcome {
    pub state: JointState,
    pub left: UnitSolution,
    pub right: UnitSolution,
    pub torque_n_m: f64,
    /// The hard stop at ±π was hit this step.
    pub at_stop: bool,
}

fn drive_for(config: &JointConfig, command: &PairCommand, side: Side) -> UnitDrive {
    let mut d = command.side(side).drive();
    if let Some(v) = config.forced_lock_voltage_v {
        d.forced_lock = true;
        d.clutch_on = true;
        d.clutch_v = v;
    }
    d
}

/// One semi-implicit Euler step of length `dt_s`.
pub fn step(
    config: &JointConfig,
    state: &JointState,
    command: &PairCommand,
    dt_s: f64,
) -> Result<StepOutcome> {
    if !(dt_s > 0.0 && dt_s <= MAX_DT_S) {
        return Err(Error::OutOfRange {
            name: "dt_s",
            value: dt_s,
            min: 0.0,
            max: MAX_DT_S,
        });
    }
    let dt_ms = dt_s * 1e3;
    let r = config.tendon.lever_radius_mm;
    let solve = |side: Side| {
        config.unit(side).solve(
            state.internal(side),
            tendon_excursion(state.theta_rad, r, side),
            &config.tendon,
            &drive_for(config, command, side),
            dt_ms,
        )
    };
    let diverged = |e: Error| match e {
        Error::NonConvergence { .. } => Error::Diverged {
            time: state.time_s,
            state: Box::new(state.clone()),
        },
        other => other,
    };
    let left = solve(Side::Left).map_err(diverged)?;
    let right = solve(Side::Right).map_err(diverged)?;
    let torque = joint_torque(
        state.theta_rad,
        state.theta_dot_rad_s,
        left.tension_n,
        right.tension_n,
        &config.limb,
        &config.tendon,
    );
    let mut theta_dot = state.theta_dot_rad_s + dt_s * torque / config.limb.inertia_kg_m2();
    let mut theta = state.theta_rad + dt_s * theta_dot;
    let mut at_stop = false;
    if theta.abs() > PI {
        theta = PI.copysign(theta);
        if theta_dot * theta > 0.0 {
            theta_dot = 0.0;
        }
        at_stop = true;
    }
    let next = JointState {
        time_s: state.time_s + dt_s,
        theta_rad: theta,
        theta_dot_rad_s: theta_dot,
        left: left.internal,
        right: right.internal,
    };
    if !next.is_finite() {
        return Err(Error::Diverged {
            time: next.time_s,
            state: Box::new(next),
        });
    }
    Ok(StepOutcome {
        state: next,
        left,
        right,
        torque_n_m: torque,
        at_stop,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimOptions {
    pub duration_s: f64,
    pub dt_s: f64,
    pub sample_period_s: f64,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self {
            duration_s: 4.0,
            dt_s: 50e-6,
            sample_period_s: 1e-3,
        }
    }
}

impl SimOptions {
    /// Step count and steps per sample.
    fn grid(&self) -> Result<(usize, usize)> {
        check_positive("duration_s", self.duration_s)?;
        if !(self.dt_s > 0.0 && self.dt_s <= MAX_DT_S) {
            return Err(Error::OutOfRange {
                name: "dt_s",
                value: self.dt_s,
                min: 0.0,
                max: MAX_DT_S,
            });
        }
        let ratio = self.sample_period_s / self.dt_s;
        let every = ratio.round();
        if !(every >= 1.0 && (ratio - every).abs() < 1e-6) {
            return Err(Error::invalid(format!(
                "sample_period_s {} must be a whole multiple of dt_s {}",
                self.sample_period_s, self.dt_s
            )));
        }
        let steps = (self.duration_s / self.dt_s).round() as usize;
        Ok((steps, every as usize))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub time_s: f64,
    pub theta_deg: f64,
    pub theta_dot_rad_s: f64,
    pub tension_left_n: f64,
    pub tension_right_n: f64,
    pub v_hasel_left_kv: f64,
    pub v_hasel_right_kv: f64,
    pub v_clutch_left_v: f64,
    pub v_clutch_right_v: f64,
    pub mode_left: ClutchMode,
    pub mode_right: ClutchMode,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub sample_period_s: f64,
    pub rows: Vec<TraceRow>,
}

fn row(state: &JointState, cmd: &PairCommand) -> TraceRow {
    TraceRow {
        time_s: state.time_s,
        theta_deg: state.theta_rad.to_degrees(),
        theta_dot_rad_s: state.theta_dot_rad_s,
        tension_left_n: state.left.tension_n,
        tension_right_n: state.right.tension_n,
        v_hasel_left_kv: cmd.left.hasel_voltage_kv,
        v_hasel_right_kv: cmd.right.hasel_voltage_kv,
        v_clutch_left_v: if cmd.left.clutch_engaged {
            cmd.left.clutch_voltage_signed_v()
        } else {
            0.0
        },
        v_clutch_right_v: if cmd.right.clutch_engaged {
            cmd.right.clutch_voltage_signed_v()
        } else {
            0.0
        },
        mode_left: state.left.engagement.mode,
        mode_right: state.right.engagement.mode,
    }
}

/// What an observer sees after every integrator step.
pub struct StepRecord<'a> {
    pub step_index: usize,
    pub command: &'a PairCommand,
    pub outcome: &'a StepOutcome,
}

pub fn simulate(
    config: &JointConfig,
    initial: &JointState,
    source: &dyn CommandSource,
    options: &SimOptions,
) -> Result<Trace> {
    simulate_observed(config, initial, source, options, &mut |_| {})
}

/// [`simulate`] with a callback after every step.
pub fn simulate_observed(
    config: &JointConfig,
    initial: &JointState,
    source: &dyn CommandSource,
    options: &SimOptions,
    observer: &mut dyn FnMut(&StepRecord),
) -> Result<Trace> {
    config.validate()?;
    let (steps, every) = options.grid()?;
    let t0 = initial.time_s;
    let mut rows = Vec::with_capacity(steps / every + 1);
    let mut state = initial.clone();
    rows.push(row(&state, &source.command(t0)));
    for i in 0..steps {
        // Time from the step index so long runs do not accumulate drift.
        state.time_s = t0 + i as f64 * options.dt_s;
        let cmd = source.command(state.time_s);
        let outcome = step(config, &state, &cmd, options.dt_s)?;
        observer(&StepRecord {
            step_index: i,
            command: &cmd,
            outcome: &outcome,
        });
        state = outcome.state;
        state.time_s = t0 + (i + 1) as f64 * options.dt_s;
        if (i + 1) % every == 0 {
            rows.push(row(&state, &source.command(state.time_s)));
        }
    }
    Ok(Trace {
        sample_period_s: every as f64 * options.dt_s,
        rows,
    })
}

fn window(trace: &Trace, settle_cycles: u32, frequency_hz: f64) -> Result<&[TraceRow]> {
    check_positive("frequency_hz", frequency_hz)?;
    let (first, last) = match (trace.rows.first(), trace.rows.last()) {
        (Some(a), Some(b)) => (a.time_s, b.time_s),
        _ => return Err(Error::invalid("trace is empty")),
    };
    let period = 1.0 / frequency_hz;
    let needed = (settle_cycles as f64 + 2.0) * period;
    let tol = 0.5 * trace.sample_period_s.max(1e-12);
    if last - first + tol < needed {
        return Err(Error::invalid(format!(
            "trace spans {:.4} s but {settle_cycles} settling cycles plus 2 need {needed:.4} s",
            last - first
        )));
    }
    let start = first + settle_cycles as f64 * period - tol;
    let i = trace.rows.partition_point(|r| r.time_s < start);
    Ok(&trace.rows[i..])
}

/// Peak-to-peak angle in degrees after `settle_cycles` periods.
pub fn range_of_motion(trace: &Trace, settle_cycles: u32, frequency_hz: f64) -> Result<f64> {
    let rows = window(trace, settle_cycles, frequency_hz)?;
    let (lo, hi) = rows
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| {
            (lo.min(r.theta_deg), hi.max(r.theta_deg))
        });
    Ok(hi - lo)
}

/// Largest angle difference, in degrees, between the last period of the
/// trace and the one before it.
pub fn periodic_deviation_deg(trace: &Trace, frequency_hz: f64) -> Result<f64> {
    check_positive("frequency_hz", frequency_hz)?;
    let rows = &trace.rows;
    let period = 1.0 / frequency_hz;
    let last = rows
        .last()
        .ok_or_else(|| Error::invalid("trace is empty"))?
        .time_s;
    if last - rows[0].time_s < 2.0 * period {
        return Err(Error::invalid("trace shorter than two periods"));
    }
    let theta_at = |t: f64| {
        let i = rows
            .partition_point(|r| r.time_s < t)
            .clamp(1, rows.len() - 1);
        let (a, b) = (&rows[i - 1], &rows[i]);
        let s = ((t - a.time_s) / (b.time_s - a.time_s)).clamp(0.0, 1.0);
        a.theta_deg + s * (b.theta_deg - a.theta_deg)
    };
    let start = rows.partition_point(|r| r.time_s < last - period);
    Ok(rows[start..]
        .iter()
        .map(|r| (r.theta_deg - theta_at(r.time_s - period)).abs())
        .fold(0.0, f64::max))
}

pub fn is_periodic(trace: &Trace, frequency_hz: f64, tolerance_deg: f64) -> Result<bool> {
    Ok(periodic_deviation_deg(trace, frequency_hz)? <= tolerance_deg)
}
