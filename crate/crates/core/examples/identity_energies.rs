//! p-energies of identity maps next to the bounds they saturate.

use projective_energy::energy::p_energy;
use projective_energy::maps::grid::build_grid;
use projective_energy::report::{eval_bound, BoundSpec};
use projective_energy::{GridScheme, Manifold64, MapObject};
use std::f64::consts::PI;

fn main() -> projective_energy::Result<()> {
    for n in 1..=2 {
        let m = Manifold64::complex_projective(n);
        let grid = build_grid(&m, 20_000, GridScheme::MonteCarlo, 7)?;
        let id = MapObject::identity(m);
        for p in [2.0, 3.0, 4.0] {
            let e = p_energy(&id, &grid, p)?.value();
            let b = eval_bound(&BoundSpec::CpnP { n, p, a_star: PI })?.scalar()?;
            println!("CP{n} p={p}: E_p = {e:.6}, bound = {b:.6}");
        }
    }
    Ok(())
}
