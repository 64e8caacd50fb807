//! Scenario runner, frequency sweeps, model fitting front end and the file
//! formats behind the `hasel-joint` binary.

mod fit;
pub mod io;
pub mod svg;
mod sweep;

pub use fit::fit_models;
pub use io::SweepRow;
pub use sweep::{
    default_frequencies, run_sweep, summarize_sweep, sweep_rom, SweepPoint, SweepSpec, SweepSummary,
};

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::actuator::{Clutch, HaselModel};
use crate::control::{command_trace, validate_schedule, Gait, GaitParams};
use crate::design::Configuration;
use crate::error::{check_positive, check_range, Error, Result};
use crate::joint::{
    periodic_deviation_deg, range_of_motion, simulate, JointConfig, JointState, LimbSpec,
    MuscleUnit, SimOptions, TendonSpec, Trace,
};

/// Periodicity tolerance used in summaries, degrees.
pub const PERIODIC_TOLERANCE_DEG: f64 = 2.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mode {
    /// Muscles behind slack tendons with clutches permanently locked.
    SlackOnly,
    /// Taut tendons; clutches switched by the gait.
    ClutchAugmented,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::SlackOnly => "SlackOnly",
            Mode::ClutchAugmented => "ClutchAugmented",
        }
    }

    pub fn dir_name(self) -> &'static str {
        match self {
            Mode::SlackOnly => "slack_only",
            Mode::ClutchAugmented => "clutch_augmented",
        }
    }

    pub fn other(self) -> Mode {
        match self {
            Mode::SlackOnly => Mode::ClutchAugmented,
            Mode::ClutchAugmented => Mode::SlackOnly,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct JointSection {
    pub limb: LimbSpec,
    /// Slack in here is ignored; the mode sets it.
    pub tendon: TendonSpec,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelsSection {
    pub hasel: HaselModel,
    pub clutch: Clutch,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Scenario {
    pub name: String,
    pub mode: Mode,
    pub gait: GaitParams,
    pub joint: JointSection,
    pub models: ModelsSection,
    pub configuration: Configuration,
    /// Working strain of the muscle; sets the slack of the slack-only mode.
    pub operating_strain: f64,
    pub duration_s: f64,
    pub dt_s: f64,
    pub sample_period_s: f64,
    pub settle_cycles: u32,
}

impl Default for Scenario {
    fn default() -> Self {
        Self {
            name: "default".into(),
            mode: Mode::ClutchAugmented,
            gait: GaitParams::default(),
            joint: JointSection::default(),
            models: ModelsSection::default(),
            configuration: Configuration::Enhanced,
            operating_strain: 0.08,
            duration_s: 4.0,
            dt_s: 50e-6,
            sample_period_s: 1e-3,
            settle_cycles: 5,
        }
    }
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        if self.name.is_empty()
            || !self
                .name
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
        {
            return Err(Error::invalid(format!(
                "scenario name {:?} must be non-empty ASCII letters, digits, '-' or '_'",
                self.name
            )));
        }
        self.gait.validate()?;
        check_range(
            "operating_strain",
            self.operating_strain,
            f64::MIN_POSITIVE,
            1.0,
        )?;
        check_positive("duration_s", self.duration_s)?;
        check_positive("dt_s", self.dt_s)?;
        check_positive("sample_period_s", self.sample_period_s)?;
        self.joint_config()?.validate()
    }

    pub fn with_mode(&self, mode: Mode) -> Scenario {
        Scenario {
            mode,
            ..self.clone()
        }
    }

    pub fn with_frequency(&self, frequency_hz: f64) -> Scenario {
        let mut s = self.clone();
        s.gait.frequency_hz = frequency_hz;
        s
    }

    fn hasel(&self) -> Result<HaselModel> {
        self.models
            .hasel
            .with_length_fraction(self.configuration.length_fraction())
    }

    /// Slack per side for the slack-only arrangement: half the working
    /// stroke `sigma * L_h'`.
    pub fn slack_only_slack_mm(&self) -> Result<f64> {
        Ok(0.5 * self.operating_strain * self.hasel()?.spec.total_length_mm())
    }

    pub fn joint_config(&self) -> Result<JointConfig> {
        let hasel = self.hasel()?;
        let unit = MuscleUnit {
            hasel,
            clutch: self.models.clutch.clone(),
        };
        let mut tendon = self.joint.tendon.clone();
        let (slack, forced) = match self.mode {
            Mode::SlackOnly => (
                self.slack_only_slack_mm()?,
                Some(self.gait.clutch_voltage_cap_v),
            ),
            Mode::ClutchAugmented => (0.0, None),
        };
        tendon.slack_per_side_mm = slack;
        Ok(JointConfig {
            limb: self.joint.limb.clone(),
            tendon,
            left: unit.clone(),
            right: unit,
            forced_lock_voltage_v: forced,
        })
    }

    pub fn command_source(&self) -> Gait {
        match self.mode {
            Mode::SlackOnly => Gait::without_clutches(self.gait.clone()),
            Mode::ClutchAugmented => Gait::new(self.gait.clone()),
        }
    }

    pub fn sim_options(&self) -> SimOptions {
        SimOptions {
            duration_s: self.duration_s,
            dt_s: self.dt_s,
            sample_period_s: self.sample_period_s,
        }
    }

    pub fn simulate(&self) -> Result<Trace> {
        self.validate()?;
        simulate(
            &self.joint_config()?,
            &JointState::at_rest(),
            &self.command_source(),
            &self.sim_options(),
        )
    }

    pub fn schedule_violations(&self) -> Result<usize> {
        let trace = command_trace(
            &self.command_source(),
            self.duration_s,
            self.sample_period_s,
        )?;
        Ok(validate_schedule(&trace, &self.models.clutch.spec).len())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSummary {
    pub name: String,
    pub mode: Mode,
    pub frequency_hz: f64,
    pub rom_deg: f64,
    pub periodic_deviation_deg: f64,
    pub periodic: bool,
    pub max_tension_n: f64,
    pub schedule_violations: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryReport {
    pub scenarios: Vec<ScenarioSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rom_ratio_clutch_over_slack: Option<f64>,
}

pub fn summarize(scenario: &Scenario, trace: &Trace) -> Result<ScenarioSummary> {
    let f = scenario.gait.frequency_hz;
    let rom = range_of_motion(trace, scenario.settle_cycles, f)?;
    let dev = periodic_deviation_deg(trace, f)?;
    let max_tension = trace
        .rows
        .iter()
        .map(|r| r.tension_left_n.max(r.tension_right_n))
        .fold(0.0, f64::max);
    Ok(ScenarioSummary {
        name: scenario.name.clone(),
        mode: scenario.mode,
        frequency_hz: f,
        rom_deg: rom,
        periodic_deviation_deg: dev,
        periodic: dev <= PERIODIC_TOLERANCE_DEG,
        max_tension_n: max_tension,
        schedule_violations: scenario.schedule_violations()?,
    })
}

/// Runs one scenario and writes `trace.csv`, `commands.csv`,
/// `summary.json` and `theta.svg` into `out_dir`.
pub fn run_scenario(scenario: &Scenario, out_dir: &Path) -> Result<ScenarioSummary> {
    let trace = scenario.simulate()?;
    let summary = summarize(scenario, &trace)?;
    fs::create_dir_all(out_dir)?;
    io::write_trace(&out_dir.join("trace.csv"), &trace)?;
    let commands = command_trace(
        &scenario.command_source(),
        scenario.duration_s,
        trace.sample_period_s,
    )?;
    io::write_commands(&out_dir.join("commands.csv"), &commands)?;
    let report = SummaryReport {
        scenarios: vec![summary.clone()],
        rom_ratio_clutch_over_slack: None,
    };
    io::write_json(&out_dir.join("summary.json"), &report)?;
    let points: Vec<(f64, f64)> = trace.rows.iter().map(|r| (r.time_s, r.theta_deg)).collect();
    let plot = svg::line_chart(
        &format!("{} ({})", scenario.name, scenario.mode.as_str()),
        "time (s)",
        "joint angle (deg)",
        &[svg::Series {
            name: scenario.mode.as_str().to_string(),
            points,
        }],
    );
    fs::write(out_dir.join("theta.svg"), plot)?;
    Ok(summary)
}

/// Runs the scenario in both modes, each into its own subdirectory, and
/// writes a combined `summary.json`.
pub fn run_comparison(scenario: &Scenario, out_dir: &Path) -> Result<SummaryReport> {
    let slack = run_scenario(
        &scenario.with_mode(Mode::SlackOnly),
        &out_dir.join(Mode::SlackOnly.dir_name()),
    )?;
    let clutch = run_scenario(
        &scenario.with_mode(Mode::ClutchAugmented),
        &out_dir.join(Mode::ClutchAugmented.dir_name()),
    )?;
    let ratio = if slack.rom_deg > 0.0 {
        Some(clutch.rom_deg / slack.rom_deg)
    } else {
        None
    };
    let report = SummaryReport {
        scenarios: vec![slack, clutch],
        rom_ratio_clutch_over_slack: ratio,
    };
    io::write_json(&out_dir.join("summary.json"), &report)?;
    Ok(report)
}
