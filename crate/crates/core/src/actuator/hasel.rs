//! Voltage-parametrized force/contraction law of one HASEL muscle pack.
//!
//! At a fixed voltage the pack follows
//!
//! ```text
//! F(x, V) = F_b(V) * (1 - x / x_f(V))^n        0 <= x <= x_f(V)
//! F(x, V) = 0                                  x > x_f(V)
//! F(x, V) = F_b(V) + k_shell * (-x)            x < 0
//! ```
//!
//! where `x` is contraction from rest length, `F_b` the blocked force and
//! `x_f` the free displacement. Below the lowest anchor both endpoints scale
//! as `(V / V_anchor)^p`; between anchors they are linearly interpolated.

use serde::{Deserialize, Serialize};

use crate::error::{check_positive, check_range, Error, Result};

/// Geometry and rating of one pack.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HaselSpec {
    pub pouch_count: u32,
    pub pouch_length_cm: f64,
    pub width_cm: f64,
    pub total_length_cm: f64,
    pub mass_g: f64,
    pub rated_voltage_kv: f64,
}

impl Default for HaselSpec {
    fn default() -> Self {
        Self {
            pouch_count: 8,
            pouch_length_cm: 2.0,
            width_cm: 4.5,
            total_length_cm: 16.0,
            mass_g: 13.7,
            rated_voltage_kv: 8.0,
        }
    }
}

impl HaselSpec {
    pub fn validate(&self) -> Result<()> {
        if self.pouch_count < 1 {
            return Err(Error::invalid("pouch_count must be at least 1"));
        }
        check_positive("pouch_length_cm", self.pouch_length_cm)?;
        check_positive("width_cm", self.width_cm)?;
        check_positive("total_length_cm", self.total_length_cm)?;
        check_positive("mass_g", self.mass_g)?;
        check_positive("rated_voltage_kv", self.rated_voltage_kv)?;
        let expected = self.pouch_count as f64 * self.pouch_length_cm;
        if ((self.total_length_cm - expected) / expected).abs() > 0.01 {
            return Err(Error::invalid(format!(
                "total_length_cm {} differs from pouch_count x pouch_length_cm = {} by more than 1%",
                self.total_length_cm, expected
            )));
        }
        Ok(())
    }

    pub fn total_length_mm(&self) -> f64 {
        self.total_length_cm * 10.0
    }
}

/// Measured endpoints of the force/displacement curve at one voltage.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HaselAnchor {
    pub voltage_kv: f64,
    pub blocked_force_n: f64,
    pub free_displacement_mm: f64,
}

impl HaselAnchor {
    pub const fn new(voltage_kv: f64, blocked_force_n: f64, free_displacement_mm: f64) -> Self {
        Self {
            voltage_kv,
            blocked_force_n,
            free_displacement_mm,
        }
    }

    /// Characterized endpoint at 8 kV: 16.3 N blocked, 18.0 mm free.
    pub const fn characterized_8kv() -> Self {
        Self::new(8.0, 16.3, 18.0)
    }

    fn validate(&self) -> Result<()> {
        check_positive("anchor voltage_kv", self.voltage_kv)?;
        check_positive("anchor blocked_force_n", self.blocked_force_n)?;
        check_positive("anchor free_displacement_mm", self.free_displacement_mm)?;
        Ok(())
    }
}

/// A measured point `(contraction, voltage, force)` used to calibrate the
/// curve shape.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HaselCalibrationPoint {
    pub contraction_mm: f64,
    pub voltage_kv: f64,
    pub force_n: f64,
}

impl HaselCalibrationPoint {
    /// 1 N at 8% strain of the 16 cm pack (12.8 mm) at 8 kV.
    pub const fn operating_point() -> Self {
        Self {
            contraction_mm: 12.8,
            voltage_kv: 8.0,
            force_n: 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HaselModel {
    pub spec: HaselSpec,
    pub anchors: Vec<HaselAnchor>,
    pub shape_exponent: f64,
    pub voltage_scaling_exponent: f64,
    pub shell_stiffness_n_per_mm: f64,
    pub relaxation_time_ms: f64,
}

impl Default for HaselModel {
    /// The characterized pack with the shape exponent calibrated to the
    /// operating point.
    fn default() -> Self {
        let (model, _) = HaselModel::fit(
            &[HaselAnchor::characterized_8kv()],
            &[HaselCalibrationPoint::operating_point()],
        )
        .expect("characterized anchor and operating point are consistent");
        model
    }
}

pub const DEFAULT_SHELL_STIFFNESS_N_PER_MM: f64 = 100.0;
pub const DEFAULT_RELAXATION_TIME_MS: f64 = 30.0;
pub const DEFAULT_VOLTAGE_SCALING_EXPONENT: f64 = 2.0;

impl HaselModel {
    /// Model with a linear curve shape (`n = 1`) through the given anchors.
    pub fn new(spec: HaselSpec, anchors: Vec<HaselAnchor>) -> Result<Self> {
        let model = Self {
            spec,
            anchors,
            shape_exponent: 1.0,
            voltage_scaling_exponent: DEFAULT_VOLTAGE_SCALING_EXPONENT,
            shell_stiffness_n_per_mm: DEFAULT_SHELL_STIFFNESS_N_PER_MM,
            relaxation_time_ms: DEFAULT_RELAXATION_TIME_MS,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn with_shape_exponent(mut self, n: f64) -> Result<Self> {
        check_positive("shape_exponent", n)?;
        self.shape_exponent = n;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        self.spec.validate()?;
        if self.anchors.is_empty() {
            return Err(Error::invalid("HASEL model needs at least one anchor"));
        }
        for a in &self.anchors {
            a.validate()?;
        }
        for w in self.anchors.windows(2) {
            if w[1].voltage_kv <= w[0].voltage_kv {
                return Err(Error::invalid(
                    "HASEL anchors must be sorted strictly ascending in voltage",
                ));
            }
            // Monotone endpoints keep F_b(V) and x_f(V) non-decreasing.
            if w[1].blocked_force_n < w[0].blocked_force_n
                || w[1].free_displacement_mm < w[0].free_displacement_mm
            {
                return Err(Error::invalid(
                    "HASEL anchor endpoints must not decrease with voltage",
                ));
            }
        }
        let top = self.anchors.last().map(|a| a.voltage_kv).unwrap_or(0.0);
        if top > self.spec.rated_voltage_kv {
            return Err(Error::invalid(format!(
                "anchor at {top} kV exceeds rated voltage {} kV",
                self.spec.rated_voltage_kv
            )));
        }
        check_positive("shape_exponent", self.shape_exponent)?;
        check_positive("voltage_scaling_exponent", self.voltage_scaling_exponent)?;
        check_positive("shell_stiffness_n_per_mm", self.shell_stiffness_n_per_mm)?;
        check_positive("relaxation_time_ms", self.relaxation_time_ms)?;
        Ok(())
    }

    fn check_voltage(&self, kv: f64) -> Result<f64> {
        check_range("voltage_kv", kv, 0.0, self.spec.rated_voltage_kv)
    }

    pub fn blocked_force(&self, kv: f64) -> Result<f64> {
        let kv = self.check_voltage(kv)?;
        Ok(self.blocked_force_unchecked(kv))
    }

    pub fn free_displacement(&self, kv: f64) -> Result<f64> {
        let kv = self.check_voltage(kv)?;
        Ok(self.free_displacement_unchecked(kv))
    }

    /// Tension at contraction `x_mm` (positive = shorter than rest length).
    pub fn force(&self, x_mm: f64, kv: f64) -> Result<f64> {
        let kv = self.check_voltage(kv)?;
        Ok(self.force_unchecked(x_mm, kv))
    }

    /// Strain of the pack at contraction `x_mm`.
    pub fn strain(&self, x_mm: f64) -> f64 {
        x_mm / self.spec.total_length_mm()
    }

    pub(crate) fn blocked_force_unchecked(&self, kv: f64) -> f64 {
        self.interpolate(kv, |a| a.blocked_force_n)
    }

    pub(crate) fn free_displacement_unchecked(&self, kv: f64) -> f64 {
        self.interpolate(kv, |a| a.free_displacement_mm)
    }

    pub(crate) fn force_unchecked(&self, x_mm: f64, kv: f64) -> f64 {
        let fb = self.blocked_force_unchecked(kv);
        if x_mm < 0.0 {
            return fb + self.shell_stiffness_n_per_mm * (-x_mm);
        }
        let xf = self.free_displacement_unchecked(kv);
        if xf <= 0.0 || x_mm >= xf {
            return 0.0;
        }
        fb * (1.0 - x_mm / xf).powf(self.shape_exponent)
    }

    /// Active contraction (0 ..= x_f) that carries tension `t_n` with the
    /// shell slack. Zero once the tension reaches the blocked force.
    pub(crate) fn active_contraction(&self, t_n: f64, kv: f64) -> f64 {
        let fb = self.blocked_force_unchecked(kv);
        let xf = self.free_displacement_unchecked(kv);
        if fb <= 0.0 || xf <= 0.0 || t_n >= fb {
            return 0.0;
        }
        let t = t_n.max(0.0);
        xf * (1.0 - (t / fb).powf(1.0 / self.shape_exponent))
    }

    /// Passive shell extension (≤ 0 contraction) at tension `t_n`: only the
    /// tension in excess of the blocked force stretches the shell.
    pub(crate) fn shell_contraction(&self, t_n: f64, kv: f64) -> f64 {
        let excess = t_n - self.blocked_force_unchecked(kv);
        if excess > 0.0 {
            -excess / self.shell_stiffness_n_per_mm
        } else {
            0.0
        }
    }

    fn interpolate(&self, kv: f64, value: impl Fn(&HaselAnchor) -> f64) -> f64 {
        if kv <= 0.0 {
            return 0.0;
        }
        let p = self.voltage_scaling_exponent;
        let first = &self.anchors[0];
        let last = &self.anchors[self.anchors.len() - 1];
        if kv <= first.voltage_kv {
            return value(first) * (kv / first.voltage_kv).powf(p);
        }
        if kv >= last.voltage_kv {
            return value(last) * (kv / last.voltage_kv).powf(p);
        }
        let i = self
            .anchors
            .windows(2)
            .position(|w| kv <= w[1].voltage_kv)
            .unwrap_or(0);
        let (a, b) = (&self.anchors[i], &self.anchors[i + 1]);
        let s = (kv - a.voltage_kv) / (b.voltage_kv - a.voltage_kv);
        value(a) + s * (value(b) - value(a))
    }

    /// Copy of this pack with only a fraction of its length active (the
    /// compact configuration uses half). Free displacement scales with the
    /// active length; forces do not.
    pub fn with_length_fraction(&self, fraction: f64) -> Result<Self> {
        check_range("length fraction", fraction, f64::MIN_POSITIVE, 1.0)?;
        let mut m = self.clone();
        for a in &mut m.anchors {
            a.free_displacement_mm *= fraction;
        }
        m.spec.pouch_length_cm *= fraction;
        m.spec.total_length_cm *= fraction;
        Ok(m)
    }

    /// Fits the curve shape exponent to calibration points.
    ///
    /// No points gives the linear shape. One point is solved exactly. Several
    /// points choose the exponent minimizing the squared force error.
    pub fn fit(
        anchors: &[HaselAnchor],
        points: &[HaselCalibrationPoint],
    ) -> Result<(HaselModel, HaselFitReport)> {
        if anchors.is_empty() {
            return Err(Error::Fit("at least one HASEL anchor is required".into()));
        }
        let mut anchors = anchors.to_vec();
        anchors.sort_by(|a, b| a.voltage_kv.total_cmp(&b.voltage_kv));
        let mut spec = HaselSpec::default();
        let top = anchors[anchors.len() - 1].voltage_kv;
        spec.rated_voltage_kv = spec.rated_voltage_kv.max(top);
        let base = HaselModel::new(spec, anchors).map_err(|e| Error::Fit(e.to_string()))?;

        // Envelope check: each point must sit strictly inside the curve box.
        let mut targets = Vec::with_capacity(points.len());
        for (i, p) in points.iter().enumerate() {
            let fb = base.blocked_force_unchecked(p.voltage_kv);
            let xf = base.free_displacement_unchecked(p.voltage_kv);
            let inside = p.voltage_kv > 0.0
                && p.voltage_kv <= base.spec.rated_voltage_kv
                && p.contraction_mm > 0.0
                && p.contraction_mm < xf
                && p.force_n > 0.0
                && p.force_n < fb;
            if !inside {
                return Err(Error::Fit(format!(
                    "calibration point {i} ({} mm, {} kV, {} N) is outside the feasible envelope \
                     (0 < x < {xf:.4} mm, 0 < F < {fb:.4} N)",
                    p.contraction_mm, p.voltage_kv, p.force_n
                )));
            }
            targets.push((1.0 - p.contraction_mm / xf, fb, p.force_n));
        }

        let n = match targets.as_slice() {
            [] => 1.0,
            [(u, fb, f)] => (f / fb).ln() / u.ln(),
            many => minimize_sse(many),
        };
        let model = base.with_shape_exponent(n)?;
        let residuals: Vec<f64> = points
            .iter()
            .map(|p| {
                let model_f = model.force_unchecked(p.contraction_mm, p.voltage_kv);
                (model_f - p.force_n) / p.force_n
            })
            .collect();
        let max_relative_residual = residuals.iter().fold(0.0_f64, |m, r| m.max(r.abs()));
        Ok((
            model,
            HaselFitReport {
                shape_exponent: n,
                max_relative_residual,
                relative_residuals: residuals,
            },
        ))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HaselFitReport {
    pub shape_exponent: f64,
    pub max_relative_residual: f64,
    pub relative_residuals: Vec<f64>,
}

const FIT_EXPONENT_MIN: f64 = 0.05;
const FIT_EXPONENT_MAX: f64 = 20.0;

fn sse(targets: &[(f64, f64, f64)], n: f64) -> f64 {
    targets
        .iter()
        .map(|(u, fb, f)| {
            let e = fb * u.powf(n) - f;
            e * e
        })
        .sum()
}

/// Log-spaced scan followed by golden-section refinement around the best
/// grid cell.
fn minimize_sse(targets: &[(f64, f64, f64)]) -> f64 {
    const GRID: usize = 400;
    let (lo, hi) = (FIT_EXPONENT_MIN.ln(), FIT_EXPONENT_MAX.ln());
    let at = |i: usize| (lo + (hi - lo) * i as f64 / GRID as f64).exp();
    let best = (0..=GRID)
        .min_by(|&a, &b| sse(targets, at(a)).total_cmp(&sse(targets, at(b))))
        .unwrap_or(0);
    let mut a = at(best.saturating_sub(1));
    let mut b = at((best + 1).min(GRID));
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    for _ in 0..200 {
        if (b - a).abs() < 1e-12 {
            break;
        }
        if sse(targets, c) < sse(targets, d) {
            b = d;
        } else {
            a = c;
        }
        c = b - inv_phi * (b - a);
        d = a + inv_phi * (b - a);
    }
    0.5 * (a + b)
}
