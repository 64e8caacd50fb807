//! Unit conversions. Public APIs take the mixed units used on datasheets
//! (cm, mm, kPa, kV, V); these helpers keep the conversions in one place.

/// Standard gravity used for kgf to newton conversion and limb weight.
pub const STANDARD_GRAVITY: f64 = 9.81;

pub fn kgf_to_newton(kgf: f64) -> f64 {
    kgf * STANDARD_GRAVITY
}

/// 1 kPa = 0.1 N/cm².
pub fn kpa_to_n_per_cm2(kpa: f64) -> f64 {
    kpa * 0.1
}

/// 1 kPa = 1e-3 N/mm².
pub fn kpa_to_n_per_mm2(kpa: f64) -> f64 {
    kpa * 1e-3
}

pub fn mm_to_cm(mm: f64) -> f64 {
    mm * 0.1
}

pub fn cm_to_mm(cm: f64) -> f64 {
    cm * 10.0
}

pub fn mm_to_m(mm: f64) -> f64 {
    mm * 1e-3
}

pub fn grams_to_kg(g: f64) -> f64 {
    g * 1e-3
}
