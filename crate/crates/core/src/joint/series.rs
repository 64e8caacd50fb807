//! Quasi-static force balance of a tendon in series with massless elements.
//!
//! Every element carries the same tension `T` and reports the elongation it
//! takes at that tension. The tendon closes the loop: its stretch is the
//! geometric gap left after the elements' elongations, and its one-sided
//! law gives back a tension. The balance `T = k_t * g(gap - sum(e_i(T)))`
//! has a single root because every `e_i` is non-decreasing in `T`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_BISECTION_STEPS: usize = 200;
pub const TENSION_TOLERANCE_N: f64 = 1e-6;

/// Bracket width at which bisection stops; well inside the tolerance.
const STOP_WIDTH_N: f64 = 1e-8;

/// Something in the load path whose length change depends only on tension.
pub trait SeriesElement {
    /// Elongation in mm at tension `t_n >= 0`. Must be non-decreasing in
    /// tension; `+inf` means the element cannot carry that tension.
    fn elongation_mm(&self, t_n: f64) -> f64;
}

/// A rigid element with a fixed contraction (negative elongation).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IdealStroke {
    pub contraction_mm: f64,
}

impl SeriesElement for IdealStroke {
    fn elongation_mm(&self, _t_n: f64) -> f64 {
        -self.contraction_mm
    }
}

/// Unilateral tendon: no force when slack, linear when taut, with a short
/// quadratic blend so the force law is C1 at the slack point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TendonLaw {
    pub stiffness_n_per_mm: f64,
    pub smoothing_mm: f64,
}

impl TendonLaw {
    pub fn force_n(&self, stretch_mm: f64) -> f64 {
        self.stiffness_n_per_mm * self.shape(stretch_mm)
    }

    fn shape(&self, d: f64) -> f64 {
        let w = self.smoothing_mm;
        if d <= 0.0 {
            0.0
        } else if d < w {
            d * d / (2.0 * w)
        } else {
            d - 0.5 * w
        }
    }

    /// Elastic energy at `stretch_mm`, in joules.
    pub fn energy_j(&self, stretch_mm: f64) -> f64 {
        let w = self.smoothing_mm;
        let d = stretch_mm;
        let e_mm = if d <= 0.0 {
            0.0
        } else if d < w {
            d * d * d / (6.0 * w)
        } else {
            w * w / 6.0 + 0.5 * (d * d - w * w) - 0.5 * w * (d - w)
        };
        self.stiffness_n_per_mm * e_mm * 1e-3
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesSolution {
    pub tension_n: f64,
    pub tendon_stretch_mm: f64,
    pub iterations: usize,
}

fn tendon_stretch(gap_mm: f64, elements: &[&dyn SeriesElement], t: f64) -> f64 {
    let total: f64 = elements.iter().map(|e| e.elongation_mm(t)).sum();
    gap_mm - total
}

/// Solves the series balance for a tendon whose ends are `gap_mm` apart
/// beyond the elements' rest lengths (positive gap = tendon stretched if the
/// elements kept their rest length).
pub fn solve_series(
    gap_mm: f64,
    elements: &[&dyn SeriesElement],
    tendon: &TendonLaw,
) -> Result<SeriesSolution> {
    let residual = |t: f64| tendon.force_n(tendon_stretch(gap_mm, elements, t)) - t;
    let r0 = residual(0.0);
    if !r0.is_finite() {
        return Err(Error::NonConvergence {
            iterations: 0,
            lo: 0.0,
            hi: f64::NAN,
        });
    }
    if r0 <= 0.0 {
        return Ok(SeriesSolution {
            tension_n: 0.0,
            tendon_stretch_mm: tendon_stretch(gap_mm, elements, 0.0),
            iterations: 0,
        });
    }
    // The tendon force can only drop as tension rises, so r(r0 + 1) <= -1.
    let (mut lo, mut hi) = (0.0, r0 + 1.0);
    let mut iterations = 0;
    while hi - lo > STOP_WIDTH_N {
        if iterations == MAX_BISECTION_STEPS {
            return Err(Error::NonConvergence { iterations, lo, hi });
        }
        let mid = 0.5 * (lo + hi);
        if residual(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }
    if hi - lo > TENSION_TOLERANCE_N {
        return Err(Error::NonConvergence { iterations, lo, hi });
    }
    let t = 0.5 * (lo + hi);
    Ok(SeriesSolution {
        tension_n: t,
        tendon_stretch_mm: tendon_stretch(gap_mm, elements, t),
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const TENDON: TendonLaw = TendonLaw {
        stiffness_n_per_mm: 200.0,
        smoothing_mm: 0.05,
    };

    struct Spring(f64);

    impl SeriesElement for Spring {
        fn elongation_mm(&self, t: f64) -> f64 {
            t / self.0
        }
    }

    #[test]
    fn slack_tendon_carries_nothing() {
        let s = solve_series(-1.0, &[], &TENDON).unwrap();
        assert_eq!(s.tension_n, 0.0);
        assert_eq!(s.iterations, 0);
    }

    #[test]
    fn springs_in_series() {
        // 200 N/mm tendon and 100 N/mm spring: 66.67 N/mm, offset by w/2.
        let spring = Spring(100.0);
        let s = solve_series(1.0, &[&spring], &TENDON).unwrap();
        let k = 1.0 / (1.0 / 200.0 + 1.0 / 100.0);
        assert!(
            (s.tension_n - k * (1.0 - 0.025)).abs() < 1e-6,
            "{}",
            s.tension_n
        );
    }

    #[test]
    fn ideal_stroke_takes_up_gap() {
        let stroke = IdealStroke {
            contraction_mm: 2.0,
        };
        let s = solve_series(-1.0, &[&stroke], &TENDON).unwrap();
        assert!((s.tension_n - 200.0 * 0.975).abs() < 1e-6);
    }

    #[test]
    fn element_that_cannot_carry_load() {
        struct Free;
        impl SeriesElement for Free {
            fn elongation_mm(&self, t: f64) -> f64 {
                if t > 0.0 {
                    f64::INFINITY
                } else {
                    0.0
                }
            }
        }
        let s = solve_series(5.0, &[&Free], &TENDON).unwrap();
        assert!(s.tension_n < 1e-6);
    }

    #[test]
    fn tendon_law_is_c1() {
        let w = TENDON.smoothing_mm;
        let below = TENDON.force_n(w - 1e-9);
        let above = TENDON.force_n(w + 1e-9);
        assert!((above - below).abs() < 1e-5);
        assert_eq!(TENDON.force_n(0.0), 0.0);
        assert!((TENDON.force_n(1.0) - 200.0 * 0.975).abs() < 1e-9);
    }

    #[test]
    fn tendon_energy_integrates_force() {
        let n = 20_000;
        let d = 0.3;
        let h = d / n as f64;
        let integral: f64 = (0..n)
            .map(|i| TENDON.force_n((i as f64 + 0.5) * h) * h)
            .sum::<f64>()
            * 1e-3;
        assert!((integral - TENDON.energy_j(d)).abs() < 1e-9);
    }
}
