use projective_energy::constructions::standard_map;
use projective_energy::energy::p_energy;
use projective_energy::maps::grid::mesh_grid;
use projective_energy::{Manifold32, Map32};

#[test]
fn single_precision_energies() {
    let cp1 = Manifold32::complex_projective(1);
    let grid = mesh_grid(&cp1, 3).unwrap();
    for (key, d) in [("identity(CP1)", 1.0f32), ("rational(conic)", 2.0)] {
        let f: Map32 = standard_map(key).unwrap();
        let e = p_energy(&f, &grid, 2.0).unwrap().value();
        assert!((e - d * std::f32::consts::PI).abs() < 1e-3 * d, "{key}: {e}");
    }
    let s2 = Manifold32::sphere(2);
    let f: Map32 = standard_map("identity(S2)").unwrap();
    let e = p_energy(&f, &mesh_grid(&s2, 3).unwrap(), 2.0).unwrap().value();
    assert!((e - 4.0 * std::f32::consts::PI).abs() < 1e-3);
}
