//! CSV and JSON file formats.

use std::fs::{self, File};
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::sweep::SweepPoint;
use super::Mode;
use crate::control::{CommandRow, CommandTrace, PairState, UnitCommand};
use crate::error::{Error, Result};
use crate::joint::Trace;

pub const COMMAND_COLUMNS: [&str; 7] = [
    "time_s",
    "v_hasel_left_kv",
    "v_hasel_right_kv",
    "v_clutch_left_v",
    "v_clutch_right_v",
    "state_left",
    "state_right",
];

fn csv_writer(path: &Path) -> Result<csv::Writer<BufWriter<File>>> {
    Ok(csv::Writer::from_writer(BufWriter::new(File::create(
        path,
    )?)))
}

fn finish(mut w: csv::Writer<BufWriter<File>>) -> Result<()> {
    w.flush()?;
    Ok(())
}

fn csv_io(e: csv::Error) -> Error {
    Error::Io(e.into())
}

pub fn write_trace(path: &Path, trace: &Trace) -> Result<()> {
    let mut w = csv_writer(path)?;
    for r in &trace.rows {
        w.serialize(r).map_err(csv_io)?;
    }
    finish(w)
}

#[derive(Serialize)]
struct CommandCsvRow<'a> {
    time_s: f64,
    v_hasel_left_kv: f64,
    v_hasel_right_kv: f64,
    v_clutch_left_v: f64,
    v_clutch_right_v: f64,
    state_left: &'a str,
    state_right: &'a str,
}

fn channel_v(u: &UnitCommand) -> f64 {
    if u.clutch_engaged {
        u.clutch_voltage_signed_v()
    } else {
        0.0
    }
}

pub fn write_commands(path: &Path, trace: &CommandTrace) -> Result<()> {
    let mut w = csv_writer(path)?;
    for r in &trace.rows {
        w.serialize(CommandCsvRow {
            time_s: r.time_s,
            v_hasel_left_kv: r.left.hasel_voltage_kv,
            v_hasel_right_kv: r.right.hasel_voltage_kv,
            v_clutch_left_v: channel_v(&r.left),
            v_clutch_right_v: channel_v(&r.right),
            state_left: r.left.state().label(),
            state_right: r.right.state().label(),
        })
        .map_err(csv_io)?;
    }
    finish(w)
}

/// Reads a command CSV as written by [`write_commands`]. Brake segments are
/// not recorded in the file, so every row is read as unbraked.
pub fn read_commands<R: Read>(source_name: &str, reader: R) -> Result<CommandTrace> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header: Vec<String> = rdr
        .headers()
        .map_err(|e| data_err(source_name, 1, e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    if header.iter().map(String::as_str).ne(COMMAND_COLUMNS) {
        return Err(data_err(
            source_name,
            1,
            format!(
                "header `{}` does not match `{}`",
                header.join(","),
                COMMAND_COLUMNS.join(",")
            ),
        ));
    }
    let mut rows = Vec::new();
    let mut last_time = f64::NEG_INFINITY;
    for (i, rec) in rdr.records().enumerate() {
        let line = i as u64 + 2;
        let rec = rec.map_err(|e| data_err(source_name, line, e.to_string()))?;
        let num = |k: usize| -> Result<f64> {
            rec[k]
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| data_err(source_name, line, format!("bad number `{}`", &rec[k])))
        };
        let state = |k: usize| -> Result<PairState> {
            PairState::from_label(&rec[k])
                .ok_or_else(|| data_err(source_name, line, format!("unknown state `{}`", &rec[k])))
        };
        let unit = |hv: f64, cv: f64, s: PairState| {
            let (hasel_on, clutch_engaged) = crate::control::state_outputs(s);
            UnitCommand {
                hasel_on,
                hasel_voltage_kv: hv,
                clutch_engaged,
                clutch_voltage_magnitude_v: cv.abs(),
                clutch_polarity: if cv < 0.0 { -1 } else { 1 },
            }
        };
        let t = num(0)?;
        if t <= last_time {
            return Err(data_err(
                source_name,
                line,
                "timestamps must be strictly increasing",
            ));
        }
        last_time = t;
        rows.push(CommandRow {
            time_s: t,
            left: unit(num(1)?, num(3)?, state(5)?),
            right: unit(num(2)?, num(4)?, state(6)?),
            brake: false,
        });
    }
    if rows.is_empty() {
        return Err(data_err(source_name, 2, "no command rows"));
    }
    Ok(CommandTrace { rows })
}

fn data_err(source_name: &str, line: u64, message: impl Into<String>) -> Error {
    Error::Data {
        source_name: source_name.to_string(),
        line,
        message: message.into(),
    }
}

/// One sweep CSV row: both arrangements at one frequency.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub frequency_hz: f64,
    pub rom_slack_only_deg: f64,
    pub rom_clutch_augmented_deg: f64,
}

/// Pairs up the points of each frequency. Frequencies missing either mode
/// are skipped.
pub fn sweep_rows(points: &[SweepPoint]) -> Vec<SweepRow> {
    let mut rows: Vec<SweepRow> = Vec::new();
    for p in points {
        let row = match rows.iter_mut().find(|r| r.frequency_hz == p.frequency_hz) {
            Some(r) => r,
            None => {
                rows.push(SweepRow {
                    frequency_hz: p.frequency_hz,
                    rom_slack_only_deg: f64::NAN,
                    rom_clutch_augmented_deg: f64::NAN,
                });
                rows.last_mut().expect("just pushed")
            }
        };
        match p.mode {
            Mode::SlackOnly => row.rom_slack_only_deg = p.rom_deg,
            Mode::ClutchAugmented => row.rom_clutch_augmented_deg = p.rom_deg,
        }
    }
    rows.retain(|r| !r.rom_slack_only_deg.is_nan() && !r.rom_clutch_augmented_deg.is_nan());
    rows
}

pub fn write_sweep(path: &Path, points: &[SweepPoint]) -> Result<()> {
    let mut w = csv_writer(path)?;
    for r in sweep_rows(points) {
        w.serialize(r).map_err(csv_io)?;
    }
    finish(w)
}

pub fn read_sweep(path: &Path) -> Result<Vec<SweepRow>> {
    let mut rdr = csv::Reader::from_path(path).map_err(csv_io)?;
    let mut out = Vec::new();
    for rec in rdr.deserialize::<SweepRow>() {
        out.push(rec.map_err(csv_io)?);
    }
    Ok(out)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut f = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut f, value)?;
    f.write_all(b"\n")?;
    f.flush()?;
    Ok(())
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}
