use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{io, svg, Mode, Scenario};
use crate::error::{Error, Result};
use crate::joint::{linearized_natural_frequency, range_of_motion};

/// 0.5 Hz to 3.6 Hz in 0.1 Hz steps.
pub fn default_frequencies() -> Vec<f64> {
    (5..=36).map(|i| i as f64 / 10.0).collect()
}

fn default_settle() -> u32 {
    5
}

fn default_measure() -> u32 {
    2
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    #[serde(default)]
    pub base: Scenario,
    #[serde(default = "default_frequencies")]
    pub frequencies_hz: Vec<f64>,
    #[serde(default = "default_settle")]
    pub settle_cycles: u32,
    /// Cycles measured after settling.
    #[serde(default = "default_measure")]
    pub measure_cycles: u32,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            base: Scenario::default(),
            frequencies_hz: default_frequencies(),
            settle_cycles: default_settle(),
            measure_cycles: default_measure(),
        }
    }
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.frequencies_hz.is_empty() {
            return Err(Error::invalid("sweep needs at least one frequency"));
        }
        if self
            .frequencies_hz
            .iter()
            .any(|f| !(f.is_finite() && *f > 0.0))
        {
            return Err(Error::invalid("sweep frequencies must be positive"));
        }
        if self.frequencies_hz.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid(
                "sweep frequencies must be strictly increasing",
            ));
        }
        if self.measure_cycles < 2 {
            return Err(Error::invalid("measure_cycles must be at least 2"));
        }
        for &f in &self.frequencies_hz {
            self.scenario(f, Mode::ClutchAugmented).validate()?;
        }
        Ok(())
    }

    /// The base scenario at one sweep point.
    pub fn scenario(&self, frequency_hz: f64, mode: Mode) -> Scenario {
        let mut s = self.base.with_frequency(frequency_hz).with_mode(mode);
        s.settle_cycles = self.settle_cycles;
        // Whole samples, so the trace covers the measured cycles completely.
        let cycles = (self.settle_cycles + self.measure_cycles) as f64 / frequency_hz;
        s.duration_s = (cycles / s.sample_period_s - 1e-9).ceil() * s.sample_period_s;
        s
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub frequency_hz: f64,
    pub mode: Mode,
    pub rom_deg: f64,
    pub schedule_violations: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub points: Vec<SweepPoint>,
    pub peak_frequency_hz: f64,
    pub peak_rom_deg: f64,
    /// The clutch-mode maximum is neither the first nor the last frequency.
    pub interior_peak: bool,
    pub linearized_natural_frequency_hz: f64,
    /// Clutch ROM exceeds slack ROM at every frequency.
    pub clutch_always_larger: bool,
    pub total_schedule_violations: usize,
}

/// ROM of both modes at every frequency, in sweep order.
pub fn sweep_rom(spec: &SweepSpec) -> Result<Vec<SweepPoint>> {
    spec.validate()?;
    let mut points = Vec::with_capacity(2 * spec.frequencies_hz.len());
    for &f in &spec.frequencies_hz {
        for mode in [Mode::SlackOnly, Mode::ClutchAugmented] {
            let s = spec.scenario(f, mode);
            let trace = s.simulate()?;
            points.push(SweepPoint {
                frequency_hz: f,
                mode,
                rom_deg: range_of_motion(&trace, s.settle_cycles, f)?,
                schedule_violations: s.schedule_violations()?,
            });
        }
    }
    Ok(points)
}

pub fn summarize_sweep(spec: &SweepSpec, points: Vec<SweepPoint>) -> Result<SweepSummary> {
    let clutch: Vec<&SweepPoint> = points
        .iter()
        .filter(|p| p.mode == Mode::ClutchAugmented)
        .collect();
    let slack: Vec<&SweepPoint> = points
        .iter()
        .filter(|p| p.mode == Mode::SlackOnly)
        .collect();
    let (peak_index, peak) = clutch
        .iter()
        .enumerate()
        .fold(None::<(usize, &SweepPoint)>, |best, (i, p)| match best {
            Some((_, b)) if b.rom_deg >= p.rom_deg => best,
            _ => Some((i, p)),
        })
        .ok_or_else(|| Error::invalid("sweep produced no points"))?;
    let config = spec.base.joint_config()?;
    Ok(SweepSummary {
        peak_frequency_hz: peak.frequency_hz,
        peak_rom_deg: peak.rom_deg,
        interior_peak: peak_index > 0 && peak_index + 1 < clutch.len(),
        linearized_natural_frequency_hz: linearized_natural_frequency(
            &config.limb,
            &config.tendon,
            config.right.clutch.sleeve_stiffness_n_per_mm(),
        ),
        clutch_always_larger: clutch
            .iter()
            .zip(&slack)
            .all(|(c, s)| c.rom_deg > s.rom_deg),
        total_schedule_violations: points.iter().map(|p| p.schedule_violations).sum(),
        points,
    })
}

/// Runs the sweep and writes `rom_vs_frequency.csv`, `rom_vs_frequency.svg`
/// and `summary.json` into `out_dir`.
pub fn run_sweep(spec: &SweepSpec, out_dir: &Path) -> Result<SweepSummary> {
    let summary = summarize_sweep(spec, sweep_rom(spec)?)?;
    fs::create_dir_all(out_dir)?;
    io::write_sweep(&out_dir.join("rom_vs_frequency.csv"), &summary.points)?;
    let series = [Mode::SlackOnly, Mode::ClutchAugmented]
        .into_iter()
        .map(|mode| svg::Series {
            name: mode.as_str().to_string(),
            points: summary
                .points
                .iter()
                .filter(|p| p.mode == mode)
                .map(|p| (p.frequency_hz, p.rom_deg))
                .collect(),
        })
        .collect::<Vec<_>>();
    let plot = svg::line_chart(
        "Range of motion versus frequency",
        "frequency (Hz)",
        "range of motion (deg)",
        &series,
    );
    fs::write(out_dir.join("rom_vs_frequency.svg"), plot)?;
    io::write_json(&out_dir.join("summary.json"), &summary)?;
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid() {
        let f = default_frequencies();
        assert_eq!(f.len(), 32);
        assert_eq!(f[0], 0.5);
        assert_eq!(f[31], 3.6);
    }

    #[test]
    fn rejects_unsorted_frequencies() {
        let s = SweepSpec {
            frequencies_hz: vec![1.0, 1.0],
            ..SweepSpec::default()
        };
        assert!(s.validate().is_err());
        let empty = SweepSpec {
            frequencies_hz: vec![],
            ..SweepSpec::default()
        };
        assert!(empty.validate().is_err());
    }

    #[test]
    fn point_duration_covers_settle_and_measure() {
        let s = SweepSpec::default().scenario(2.0, Mode::SlackOnly);
        assert!((s.duration_s - 3.5).abs() < 1e-12);
        assert_eq!(s.mode, Mode::SlackOnly);
    }
}
