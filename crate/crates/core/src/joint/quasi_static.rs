//! Quasi-static stroke accounting for one agonist stroke.
//!
//! The agonist is an ideal, rigid contraction `c` behind a tendon with
//! slack `s`; the antagonist is an idealized unit behind an equal slack.
//! The reach is the largest lever excursion at which the agonist still out-
//! pulls the antagonist.

use serde::{Deserialize, Serialize};

use super::series::{solve_series, IdealStroke, SeriesElement, TendonLaw};
use super::unit::ClutchElement;
use super::TendonSpec;
use crate::actuator::{Clutch, HaselModel, SleeveSpec};
use crate::error::{check_positive, check_range, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum AntagonistIdealization {
    /// Clutch locked with unlimited friction; only the passive HASEL shell
    /// gives.
    LockedRigid,
    /// Clutch released and its sleeve has zero stiffness.
    ReleasedFree,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReachReport {
    pub excursion_mm: f64,
    /// Excursion over the agonist contraction.
    pub utilization: f64,
}

/// Passive HASEL at 0 kV: only its shell stretches.
struct PassiveHasel<'a>(&'a HaselModel);

impl SeriesElement for PassiveHasel<'_> {
    fn elongation_mm(&self, t: f64) -> f64 {
        -self.0.shell_contraction(t, 0.0)
    }
}

pub fn quasi_static_reach(
    contraction_mm: f64,
    slack_mm: f64,
    antagonist: AntagonistIdealization,
    hasel: &HaselModel,
    tendon: &TendonSpec,
) -> Result<ReachReport> {
    check_positive("contraction_mm", contraction_mm)?;
    check_range("slack_mm", slack_mm, 0.0, f64::MAX)?;
    let law: TendonLaw = tendon.law();
    let stroke = IdealStroke { contraction_mm };
    let clutch = match antagonist {
        AntagonistIdealization::LockedRigid => Clutch::default(),
        AntagonistIdealization::ReleasedFree => Clutch {
            sleeve: SleeveSpec {
                modulus_kpa: 0.0,
                ..SleeveSpec::default()
            },
            ..Clutch::default()
        },
    };
    let clutch_element = ClutchElement {
        clutch: &clutch,
        anchor_mm: 0.0,
        capacity_n: match antagonist {
            AntagonistIdealization::LockedRigid => f64::INFINITY,
            AntagonistIdealization::ReleasedFree => 0.0,
        },
    };
    let shell = PassiveHasel(hasel);

    // Excursion e in mm: the agonist tendon is shortened by e, the
    // antagonist tendon paid out by e.
    let agonist_wins = |e: f64| -> Result<bool> {
        let ag = solve_series(-e - slack_mm, &[&stroke], &law)?.tension_n;
        let ant = solve_series(e - slack_mm, &[&shell, &clutch_element], &law)?.tension_n;
        Ok(ag > ant)
    };
    let (mut lo, mut hi) = (0.0, contraction_mm);
    if !agonist_wins(lo)? {
        return Ok(ReachReport {
            excursion_mm: 0.0,
            utilization: 0.0,
        });
    }
    while hi - lo > 1e-9 * contraction_mm {
        let mid = 0.5 * (lo + hi);
        if agonist_wins(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let e = 0.5 * (lo + hi);
    Ok(ReachReport {
        excursion_mm: e,
        utilization: e / contraction_mm,
    })
}
