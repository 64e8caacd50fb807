//! Sampled command traces and the synchronization checker.

use serde::{Deserialize, Serialize};

use super::{CommandSource, PairState, UnitCommand};
use crate::actuator::ClutchSpec;
use crate::error::{check_positive, Result};
use crate::joint::Side;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CommandRow {
    pub time_s: f64,
    pub left: UnitCommand,
    pub right: UnitCommand,
    pub brake: bool,
}

impl CommandRow {
    fn side(&self, side: Side) -> &UnitCommand {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CommandTrace {
    pub rows: Vec<CommandRow>,
}

/// Samples `source` every `sample_period_s` over `[0, duration_s]`.
pub fn command_trace(
    source: &dyn CommandSource,
    duration_s: f64,
    sample_period_s: f64,
) -> Result<CommandTrace> {
    check_positive("duration_s", duration_s)?;
    check_positive("sample_period_s", sample_period_s)?;
    let n = (duration_s / sample_period_s).round() as usize;
    let rows = (0..=n)
        .map(|i| {
            let t = i as f64 * sample_period_s;
            let c = source.command(t);
            CommandRow {
                time_s: t,
                left: c.left,
                right: c.right,
                brake: c.brake,
            }
        })
        .collect();
    Ok(CommandTrace { rows })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ViolationKind {
    /// HASEL ramp began before the antagonist clutch had finished releasing.
    EarlyHaselOnset,
    /// Clutch engaged while its own HASEL was still relaxing.
    EngageDuringHaselRelease,
    /// Both units contracting against locked clutches outside a brake.
    BothSidesLocked,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub side: Side,
    pub time_s: f64,
}

const TIME_EPS: f64 = 1e-9;

pub fn validate_schedule(trace: &CommandTrace, clutch: &ClutchSpec) -> Vec<Violation> {
    let release_s = clutch.release_time_ms * 1e-3;
    let lock_s = clutch.lock_time_ms * 1e-3;
    let mut out = Vec::new();
    let mut last_disengage: [Option<f64>; 2] = [None, None];
    let mut last_falling: [Option<f64>; 2] = [None, None];
    let idx = |s: Side| match s {
        Side::Left => 0,
        Side::Right => 1,
    };
    let both_locked = |r: &CommandRow| {
        !r.brake && r.left.state() == PairState::S2OnOn && r.right.state() == PairState::S2OnOn
    };
    if let Some(first) = trace.rows.first() {
        if both_locked(first) {
            out.push(Violation {
                kind: ViolationKind::BothSidesLocked,
                side: Side::Right,
                time_s: first.time_s,
            });
        }
    }
    for w in trace.rows.windows(2) {
        let (prev, cur) = (&w[0], &w[1]);
        let t = cur.time_s;
        for side in [Side::Left, Side::Right] {
            let (p, c) = (prev.side(side), cur.side(side));
            let i = idx(side);
            if p.clutch_engaged && !c.clutch_engaged {
                last_disengage[i] = Some(t);
            }
            if !p.clutch_engaged && c.clutch_engaged {
                if let Some(tf) = last_falling[i] {
                    if t - tf <= lock_s + TIME_EPS {
                        out.push(Violation {
                            kind: ViolationKind::EngageDuringHaselRelease,
                            side,
                            time_s: t,
                        });
                    }
                }
            }
            if c.hasel_voltage_kv < p.hasel_voltage_kv && p.hasel_voltage_kv > 0.0 {
                last_falling[i] = Some(t);
            }
            if p.hasel_voltage_kv <= 0.0 && c.hasel_voltage_kv > 0.0 {
                let other = idx(side.opposite());
                if let Some(td) = last_disengage[other] {
                    if t - td < release_s - TIME_EPS {
                        out.push(Violation {
                            kind: ViolationKind::EarlyHaselOnset,
                            side,
                            time_s: t,
                        });
                    }
                }
            }
        }
        if both_locked(cur) && !both_locked(prev) {
            out.push(Violation {
                kind: ViolationKind::BothSidesLocked,
                side: Side::Right,
                time_s: t,
            });
        }
    }
    out
}
