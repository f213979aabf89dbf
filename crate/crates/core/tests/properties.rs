#[path = "support/properties.rs"]
#[allow(dead_code)]
mod properties;

use properties::*;

#[test]
fn exp_log_round_trips() {
    exp_log_round_trip(1000).unwrap();
}

#[test]
fn energy_density_is_frame_independent() {
    frame_independence(200).unwrap();
}

#[test]
fn isometries_act_equivariantly() {
    isometry_equivariance(300).unwrap();
}

#[test]
fn second_fundamental_form_is_symmetric() {
    alpha_symmetry(200).unwrap();
}

#[test]
fn central_differences_are_second_order() {
    differential_convergence(100).unwrap();
}
