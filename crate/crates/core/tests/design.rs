use hasel_joint::design::{
    adjusted_width, effective_hasel_length, required_clutch_length, size_design,
    sleeve_resisting_force, Configuration, DesignInputs, SleeveLoad,
};
use proptest::prelude::*;

const SLEEVE: SleeveLoad = SleeveLoad {
    modulus_kpa: 100.0,
    width_cm: 4.5,
    thickness_mm: 1.0,
    layers: 1,
};

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * b.abs().max(1e-12)
}

#[test]
fn reference_clutch_length_and_area() {
    let r = size_design(&DesignInputs::reference()).unwrap();
    assert!(close(r.theoretical_clutch_length_cm, 0.0404, 0.005));
    assert!(close(r.theoretical_clutch_area_cm2, 0.182, 0.005));
    assert!(close(
        r.theoretical_clutch_length_cm,
        1.0 / (5.5 * 4.5),
        1e-12
    ));
}

#[test]
fn clutch_length_is_homogeneous() {
    let a = required_clutch_length(1.0, 5.5, 4.5).unwrap();
    let b = required_clutch_length(3.0, 5.5, 4.5).unwrap();
    let c = required_clutch_length(3.0, 11.0, 4.5).unwrap();
    assert!(close(b, 3.0 * a, 1e-12));
    assert!(close(c, 1.5 * a, 1e-12));
    assert!(required_clutch_length(1.0, 0.0, 4.5).is_err());
}

#[test]
fn sleeve_resisting_force_examples() {
    let f = sleeve_resisting_force(0.08, 16.0, 9.0, SLEEVE).unwrap();
    assert!(close(f, 0.64, 1e-12), "{f}");
    assert_eq!(sleeve_resisting_force(0.0, 16.0, 9.0, SLEEVE).unwrap(), 0.0);
    let doubled = sleeve_resisting_force(0.08, 16.0, 18.0, SLEEVE).unwrap();
    assert!(close(doubled, 0.32, 1e-12));
}

#[test]
fn widened_muscle_examples() {
    assert!(close(adjusted_width(4.5, 0.64, 1.0).unwrap(), 7.38, 1e-12));
    assert_eq!(adjusted_width(4.5, 0.0, 1.0).unwrap(), 4.5);
    assert!(close(adjusted_width(4.5, 1.0, 1.0).unwrap(), 9.0, 1e-12));
}

#[test]
fn oversized_clutch() {
    let inputs = DesignInputs {
        safety_factor: 10.0,
        ..DesignInputs::reference()
    };
    let r = size_design(&inputs).unwrap();
    assert!(close(r.clutch_length_cm, 0.404, 0.005));
    let base = size_design(&DesignInputs::reference()).unwrap();
    assert!(close(
        r.sleeve_resisting_force_n,
        base.sleeve_resisting_force_n / 10.0,
        1e-12
    ));
}

#[test]
fn stretchable_length_override() {
    let inputs = DesignInputs {
        sleeve_stretchable_length_cm: Some(9.0),
        ..DesignInputs::reference()
    };
    let r = size_design(&inputs).unwrap();
    assert!(close(r.sleeve_resisting_force_n, 0.64, 1e-12));
    assert!(close(r.adjusted_width_cm, 7.38, 1e-12));
}

#[test]
fn compact_configuration_halves_sleeve_force() {
    let enhanced = DesignInputs {
        sleeve_stretchable_length_cm: Some(9.0),
        ..DesignInputs::reference()
    };
    let compact = DesignInputs {
        configuration: Configuration::Compact,
        ..enhanced.clone()
    };
    let e = size_design(&enhanced).unwrap();
    let c = size_design(&compact).unwrap();
    assert!(close(
        c.sleeve_resisting_force_n,
        0.5 * e.sleeve_resisting_force_n,
        1e-12
    ));
    assert_eq!(
        effective_hasel_length(Configuration::Compact, 16.0).unwrap(),
        8.0
    );
}

#[test]
fn invalid_inputs_are_rejected() {
    let mut i = DesignInputs::reference();
    i.operating_strain = 1.5;
    assert!(size_design(&i).is_err());
    let mut i = DesignInputs::reference();
    i.safety_factor = 0.5;
    assert!(size_design(&i).is_err());
}

proptest! {
    #[test]
    fn width_adjustment_round_trips(
        w in 0.5..20.0f64,
        ft in 0.0..10.0f64,
        fh in 0.1..50.0f64,
    ) {
        let w2 = adjusted_width(w, ft, fh).unwrap();
        // Force per width is preserved: (w2 - w) / w = ft / fh.
        prop_assert!(((w2 - w) / w - ft / fh).abs() < 1e-9);
    }

    #[test]
    fn sleeve_force_scales_inversely_with_clutch_length(
        s in 1.0..50.0f64,
        lc in 0.01..10.0f64,
    ) {
        let a = sleeve_resisting_force(0.08, 16.0, lc, SLEEVE).unwrap();
        let b = sleeve_resisting_force(0.08, 16.0, s * lc, SLEEVE).unwrap();
        prop_assert!((b - a / s).abs() <= 1e-9 * a);
    }
}
