//! Characterization data ingestion (CSV) and the fitted-models JSON document.
//!
//! Clutch CSV: header `voltage,force`, volts and newtons.
//! HASEL CSV: header `voltage,displacement_mm,force_n`, kilovolts, mm and N.
//! A HASEL row with zero displacement is the blocked force at that voltage,
//! a row with zero force is the free displacement; every other row is a
//! calibration point for the curve shape.

use std::io::Read;

use serde::{Deserialize, Serialize};

use super::clutch::{ClutchAnchor, ClutchForceModel};
use super::hasel::{HaselAnchor, HaselCalibrationPoint, HaselFitReport, HaselModel};
use crate::error::{Error, Result};

pub const CLUTCH_COLUMNS: [&str; 2] = ["voltage", "force"];
pub const HASEL_COLUMNS: [&str; 3] = ["voltage", "displacement_mm", "force_n"];

fn data_err(source_name: &str, line: u64, message: impl Into<String>) -> Error {
    Error::Data {
        source_name: source_name.to_string(),
        line,
        message: message.into(),
    }
}

/// Reads a headed numeric CSV table. Returns `(line, values)` per data row.
pub fn read_table<R: Read>(
    source_name: &str,
    reader: R,
    columns: &[&str],
) -> Result<Vec<(u64, Vec<f64>)>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(reader);
    let mut records = rdr.records();
    let header = match records.next() {
        None => {
            return Err(data_err(
                source_name,
                1,
                format!("empty file, expected header `{}`", columns.join(",")),
            ))
        }
        Some(r) => r.map_err(|e| data_err(source_name, 1, e.to_string()))?,
    };
    let found: Vec<&str> = header.iter().collect();
    if found != columns {
        return Err(data_err(
            source_name,
            1,
            format!(
                "header `{}` does not match `{}`",
                found.join(","),
                columns.join(",")
            ),
        ));
    }
    let mut rows = Vec::new();
    for rec in records {
        let rec = rec.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            data_err(source_name, line, e.to_string())
        })?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        if rec.iter().all(|f| f.is_empty()) {
            continue;
        }
        if rec.len() != columns.len() {
            return Err(data_err(
                source_name,
                line,
                format!("expected {} fields, found {}", columns.len(), rec.len()),
            ));
        }
        let values = rec
            .iter()
            .map(|f| {
                f.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| data_err(source_name, line, format!("`{f}` is not a number")))
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push((line, values));
    }
    if rows.is_empty() {
        return Err(data_err(source_name, 2, "no data rows after the header"));
    }
    Ok(rows)
}

pub fn read_clutch_anchors<R: Read>(source_name: &str, reader: R) -> Result<Vec<ClutchAnchor>> {
    read_table(source_name, reader, &CLUTCH_COLUMNS)?
        .into_iter()
        .map(|(line, v)| {
            if v[0] <= 0.0 || v[1] <= 0.0 {
                return Err(data_err(
                    source_name,
                    line,
                    "voltage and force must be positive",
                ));
            }
            Ok(ClutchAnchor {
                voltage_v: v[0],
                force_n: v[1],
            })
        })
        .collect()
}

/// HASEL characterization split into curve endpoints and interior points.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct HaselData {
    pub anchors: Vec<HaselAnchor>,
    pub points: Vec<HaselCalibrationPoint>,
}

pub fn read_hasel_data<R: Read>(source_name: &str, reader: R) -> Result<HaselData> {
    struct Partial {
        voltage: f64,
        blocked: Option<(u64, f64)>,
        free: Option<(u64, f64)>,
    }
    let mut partial: Vec<Partial> = Vec::new();
    let mut points = Vec::new();
    for (line, v) in read_table(source_name, reader, &HASEL_COLUMNS)? {
        let (kv, x, f) = (v[0], v[1], v[2]);
        if kv <= 0.0 || x < 0.0 || f < 0.0 || (x == 0.0 && f == 0.0) {
            return Err(data_err(
                source_name,
                line,
                "need voltage > 0, displacement >= 0, force >= 0, not both zero",
            ));
        }
        if x > 0.0 && f > 0.0 {
            points.push(HaselCalibrationPoint {
                contraction_mm: x,
                voltage_kv: kv,
                force_n: f,
            });
            continue;
        }
        let idx = match partial.iter().position(|p| p.voltage == kv) {
            Some(i) => i,
            None => {
                partial.push(Partial {
                    voltage: kv,
                    blocked: None,
                    free: None,
                });
                partial.len() - 1
            }
        };
        let slot = if x == 0.0 {
            &mut partial[idx].blocked
        } else {
            &mut partial[idx].free
        };
        if let Some((first, _)) = slot {
            return Err(data_err(
                source_name,
                line,
                format!("duplicate endpoint at {kv} kV (first on line {first})"),
            ));
        }
        *slot = Some((line, if x == 0.0 { f } else { x }));
    }
    let mut anchors = Vec::with_capacity(partial.len());
    for p in partial {
        match (p.blocked, p.free) {
            (Some((_, fb)), Some((_, xf))) => anchors.push(HaselAnchor::new(p.voltage, fb, xf)),
            (Some((line, _)), None) | (None, Some((line, _))) => {
                return Err(data_err(
                    source_name,
                    line,
                    format!(
                        "{} kV has only one curve endpoint; both blocked force and free \
                         displacement rows are required",
                        p.voltage
                    ),
                ))
            }
            (None, None) => unreachable!(),
        }
    }
    anchors.sort_by(|a, b| a.voltage_kv.total_cmp(&b.voltage_kv));
    Ok(HaselData { anchors, points })
}

/// Fitted HASEL parameters as written to disk.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HaselFitDocument {
    pub anchors: Vec<HaselAnchor>,
    pub shape_exponent: f64,
    pub voltage_scaling_exponent: f64,
    pub calibration_points: Vec<HaselCalibrationPoint>,
    pub max_relative_residual: f64,
}

impl HaselFitDocument {
    pub fn new(
        model: &HaselModel,
        points: &[HaselCalibrationPoint],
        report: &HaselFitReport,
    ) -> Self {
        Self {
            anchors: model.anchors.clone(),
            shape_exponent: model.shape_exponent,
            voltage_scaling_exponent: model.voltage_scaling_exponent,
            calibration_points: points.to_vec(),
            max_relative_residual: report.max_relative_residual,
        }
    }
}

/// The document written by the `fit` subcommand.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelsDocument {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub clutch: Option<ClutchForceModel>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hasel: Option<HaselFitDocument>,
}
