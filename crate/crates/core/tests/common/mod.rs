//! Reference computations written directly from the force laws, sharing no
//! code with the library beyond reading parameters.

#![allow(dead_code)]

/// Tendon force at stretch `d` with a quadratic blend of width `w`.
pub fn tendon_force(k: f64, w: f64, d: f64) -> f64 {
    if d <= 0.0 {
        0.0
    } else if d < w {
        k * d * d / (2.0 * w)
    } else {
        k * (d - 0.5 * w)
    }
}

/// Inverse of [`tendon_force`] for `t > 0`.
pub fn tendon_stretch(k: f64, w: f64, t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t / k < 0.5 * w {
        (2.0 * w * t / k).sqrt()
    } else {
        t / k + 0.5 * w
    }
}

/// Parameters of one unit evaluation, all in N, mm, kV, V.
#[derive(Clone, Copy, Debug)]
pub struct UnitCase {
    pub blocked_n: f64,
    pub free_mm: f64,
    pub shape_n: f64,
    pub shell_k: f64,
    pub previous_active_mm: f64,
    pub retain: f64,
    pub sleeve_k: f64,
    pub anchor_mm: f64,
    pub capacity_n: f64,
    pub tendon_k: f64,
    pub tendon_w: f64,
    pub gap_mm: f64,
}

impl UnitCase {
    pub fn hasel_contraction(&self, t: f64) -> f64 {
        let (fb, xf) = (self.blocked_n, self.free_mm);
        let qs = if fb <= 0.0 || xf <= 0.0 || t >= fb {
            0.0
        } else {
            xf * (1.0 - (t.max(0.0) / fb).powf(1.0 / self.shape_n))
        };
        let active = if qs >= self.previous_active_mm {
            qs
        } else {
            (1.0 - self.retain) * qs + self.retain * self.previous_active_mm
        };
        let shell = if t > fb {
            -(t - fb) / self.shell_k
        } else {
            0.0
        };
        active + shell
    }

    pub fn clutch_stretch(&self, t: f64) -> f64 {
        let lo = (t - self.capacity_n) / self.sleeve_k;
        let hi = (t + self.capacity_n) / self.sleeve_k;
        self.anchor_mm.max(lo).min(hi).max(0.0)
    }

    fn residual(&self, t: f64) -> f64 {
        let d = self.gap_mm + self.hasel_contraction(t) - self.clutch_stretch(t);
        tendon_force(self.tendon_k, self.tendon_w, d) - t
    }

    /// Tension by scanning a uniform grid of `n` points for the first sign
    /// change of the balance residual, then a second grid of `n` points
    /// inside that cell, then a linear interpolation.
    pub fn grid_tension(&self, n: usize) -> f64 {
        if self.residual(0.0) <= 0.0 {
            return 0.0;
        }
        // Tendon stretch can never exceed gap plus the largest contraction,
        // which with lag may still be the previous one.
        let reach = self.free_mm.max(self.previous_active_mm);
        let t_max = tendon_force(self.tendon_k, self.tendon_w, self.gap_mm + reach) + 1.0;
        let (mut lo, mut hi) = (0.0, t_max);
        for _ in 0..2 {
            let h = (hi - lo) / n as f64;
            let mut a = lo;
            for i in 1..=n {
                let b = lo + i as f64 * h;
                if self.residual(b) <= 0.0 {
                    hi = b;
                    break;
                }
                a = b;
            }
            lo = a;
        }
        let (ra, rb) = (self.residual(lo), self.residual(hi));
        if rb == ra {
            return 0.5 * (lo + hi);
        }
        lo + (hi - lo) * ra / (ra - rb)
    }
}

/// Passive unit (HASEL off, clutch released): tension at tendon gap `gap_mm`
/// by bisection on the explicit compliance.
pub fn passive_tension(
    gap_mm: f64,
    sleeve_k: f64,
    shell_k: f64,
    tendon_k: f64,
    tendon_w: f64,
) -> f64 {
    if gap_mm <= 0.0 {
        return 0.0;
    }
    let elongation = |t: f64| t / sleeve_k + t / shell_k + tendon_stretch(tendon_k, tendon_w, t);
    let (mut lo, mut hi) = (0.0, tendon_k * gap_mm + 1.0);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if elongation(mid) < gap_mm {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
