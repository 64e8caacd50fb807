use serde::{Deserialize, Serialize};

use crate::error::{check_positive, check_range, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub enum Waveform {
    /// Periodic triangle: 0 to `peak` over `rise_fraction * period`, back to
    /// 0 over the rest. Starts at 0.
    Ramp {
        period_s: f64,
        peak: f64,
        rise_fraction: f64,
    },
    /// Symmetric square wave, `+amplitude` during the first half period.
    SquareAc {
        frequency_hz: f64,
        amplitude: f64,
    },
    Constant {
        level: f64,
    },
}

impl Waveform {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Waveform::Ramp {
                period_s,
                peak,
                rise_fraction,
            } => {
                check_positive("ramp period_s", period_s)?;
                check_range("ramp peak", peak, 0.0, f64::MAX)?;
                check_range("rise_fraction", rise_fraction, f64::MIN_POSITIVE, 1.0)?;
            }
            Waveform::SquareAc {
                frequency_hz,
                amplitude,
            } => {
                check_positive("square frequency_hz", frequency_hz)?;
                check_range("square amplitude", amplitude, 0.0, f64::MAX)?;
            }
            Waveform::Constant { level } => {
                if !level.is_finite() {
                    return Err(Error::invalid("constant level must be finite"));
                }
            }
        }
        Ok(())
    }
}

/// Value of `w` at time `t_s` (negative times are treated as 0).
pub fn waveform_value(w: &Waveform, t_s: f64) -> f64 {
    let t = t_s.max(0.0);
    match *w {
        Waveform::Ramp {
            period_s,
            peak,
            rise_fraction,
        } => {
            let u = t.rem_euclid(period_s) / period_s;
            triangle(u, rise_fraction) * peak
        }
        Waveform::SquareAc {
            frequency_hz,
            amplitude,
        } => {
            if (t * frequency_hz).rem_euclid(1.0) < 0.5 {
                amplitude
            } else {
                -amplitude
            }
        }
        Waveform::Constant { level } => level,
    }
}

/// Unit triangle on `u` in [0, 1) peaking at `rise`.
pub(crate) fn triangle(u: f64, rise: f64) -> f64 {
    if u <= 0.0 || u >= 1.0 {
        0.0
    } else if u < rise {
        u / rise
    } else if rise >= 1.0 {
        1.0
    } else {
        (1.0 - u) / (1.0 - rise)
    }
}
