use std::f64::consts::PI;

use projective_energy::constructions::standard_map;
use projective_energy::energy::{elementary_bound, gram_at, p_energy, pullback_volume};
use projective_energy::flow::{flow_minimize, FlowOptions, MeshMap};
use projective_energy::harmonic::{second_fundamental_form, second_variation, tension, VariationField, SECOND_STEP};
use projective_energy::intgeo::{line_energy_average, rp2_family_average, LineEmbedding, RESTRICTION_LEVEL};
use projective_energy::linalg;
use projective_energy::maps::grid::{build_grid, mesh_grid};
use projective_energy::report::{run_experiment, run_suite, ExperimentConfig, SuiteConfig};
use projective_energy::{GridScheme, Manifold64, Map64, MapObject, RngStream};

fn map(key: &str) -> Map64 {
    standard_map(key).unwrap()
}

#[test]
fn cp_distance_is_the_hermitian_angle() {
    let m = Manifold64::complex_projective(2);
    let mut rng = RngStream::new(31).generator();
    for _ in 0..500 {
        let (x, y) = (m.random_point(&mut rng), m.random_point(&mut rng));
        let (re, im) = linalg::hermitian(&x.coords, &y.coords);
        let angle = re.hypot(im).min(1.0).acos();
        assert!((m.distance(&x, &y) - angle).abs() < 1e-10);
        let v = m.log_map(&x, &y).unwrap();
        assert!((linalg::norm(&v.components) - angle).abs() < 1e-10);
    }
}

#[test]
fn holder_chain_holds_with_equality_for_homogeneous_maps() {
    let m = Manifold64::complex_projective(2);
    let grid = build_grid(&m, 20_000, GridScheme::MonteCarlo, 3).unwrap();
    let vol = m.volume();
    for (key, equal) in [
        ("identity(CP2)", true),
        ("dilation(CP2,3)", false),
        ("perturbed(CP2,0.2)", false),
    ] {
        let f = map(key);
        let e2 = p_energy(&f, &grid, 2.0).unwrap().value();
        for p in [3.0, 4.0] {
            let ep = p_energy(&f, &grid, p).unwrap().value();
            let chain = 0.5 * vol.powf(1.0 - p / 2.0) * (2.0 * e2).powf(p / 2.0);
            assert!(ep >= chain * (1.0 - 1e-12), "{key} p={p}: {ep} < {chain}");
            if equal {
                assert!((ep - chain).abs() <= 1e-9 * chain, "{key} p={p}: {ep} vs {chain}");
            } else {
                assert!(ep > chain * (1.0 + 1e-3), "{key} p={p}: {ep} vs {chain}");
            }
        }
    }
}

#[test]
fn holomorphic_maps_commute_with_j() {
    for key in [
        "rational(line)",
        "rational(conic)",
        "rational(random3,2)",
        "dilation(CP2,3)",
        "dilation(CP2,0.5)",
    ] {
        let f = map(key);
        let mut rng = RngStream::new(5).generator();
        for _ in 0..50 {
            let x = f.domain.random_point(&mut rng);
            let e = f.domain.random_unit_tangent(&x, &mut rng).components;
            let (_, cols) = f.push_forward(&x, &[e.clone(), linalg::mul_i(&e)]).unwrap();
            let residual = linalg::norm(&linalg::sub(&cols[1], &linalg::mul_i(&cols[0])));
            let scale = linalg::norm(&cols[0]).max(1.0);
            assert!(residual < 1e-6 * scale, "{key}: dF(Je) - J dF(e) = {residual}");
            assert!((linalg::norm(&cols[0]) - linalg::norm(&cols[1])).abs() < 1e-6 * scale);
        }
    }
}

#[test]
fn theta_is_conformal() {
    let mut rng = RngStream::new(9).generator();
    for t in [1.5, 2.0, 8.0] {
        let f = map(&format!("theta({t})"));
        for _ in 0..50 {
            let x = f.domain.random_point(&mut rng);
            let ev = gram_at(&f, &x).unwrap().eigenvalues;
            let spread = (ev[2] - ev[0]) / ev[2];
            assert!(spread < 1e-6, "t={t}: eigenvalues {ev:?}");
        }
    }
}

#[test]
fn second_variation_is_even() {
    let s2 = Manifold64::sphere(2);
    let grid = mesh_grid(&s2, 3).unwrap();
    let f = map("latitude_squash");
    let m = s2.clone();
    let w = VariationField::new("w", move |x| {
        let up = m.project_tangent(x, &[0.0, 0.0, 1.0]);
        Ok(linalg::scale(&up, 1.0 + x.coords[0]))
    });
    let a = second_variation(&f, &w, &grid).unwrap();
    let b = second_variation(&f, &w.negated(), &grid).unwrap();
    assert!(a != 0.0);
    assert!((a - b).abs() <= 1e-9 * a.abs(), "{a} vs {b}");
}

#[test]
fn lines_are_totally_geodesic() {
    let cp2 = Manifold64::complex_projective(2);
    let mut rng = RngStream::new(12).generator();
    for _ in 0..10 {
        let u = cp2.random_unit_tangent_bundle(&mut rng);
        let line = LineEmbedding::new(2, &u.base, &u.components).unwrap().embedding();
        for _ in 0..10 {
            let x = line.domain.random_point(&mut rng);
            let v = line.domain.random_unit_tangent(&x, &mut rng).components;
            let w = line.domain.random_unit_tangent(&x, &mut rng).components;
            let a = second_fundamental_form(&line, &x, &v, &w, SECOND_STEP).unwrap();
            assert!(a.value.norm() < 1e-5, "{}", a.value.norm());
        }
    }
}

#[test]
fn surface_energies_dominate_the_elementary_bound() {
    let grid = mesh_grid(&Manifold64::sphere(2), 4).unwrap();
    for key in [
        "identity(S2)",
        "latitude_squash",
        "perturbed(S2,0.2)",
        "compose(latitude_squash,latitude_squash)",
    ] {
        let f = map(key);
        let e2 = p_energy(&f, &grid, 2.0).unwrap().value();
        let pv = pullback_volume(&f, &grid).unwrap().value;
        let bound = elementary_bound(2.0, 2, 4.0 * PI, pv).unwrap();
        assert!(e2 >= bound * (1.0 - 1e-9), "{key}: {e2} < {bound}");
    }
}

#[test]
fn monte_carlo_refinement_stays_within_three_sigma() {
    let m = Manifold64::complex_projective(2);
    let f = map("perturbed(CP2,0.2)");
    let coarse = p_energy(&f, &build_grid(&m, 10_000, GridScheme::MonteCarlo, 1).unwrap(), 2.0).unwrap();
    let fine = p_energy(&f, &build_grid(&m, 100_000, GridScheme::MonteCarlo, 2).unwrap(), 2.0).unwrap();
    let sigma = coarse.estimate.sigma().hypot(fine.estimate.sigma());
    assert!((coarse.value() - fine.value()).abs() <= 3.0 * sigma);
}

#[test]
fn averages_are_isometry_invariant() {
    let rp3 = Manifold64::real_projective(3);
    let f = map("perturbed(RP3,0.2)");
    let g = rp3.random_isometry(RngStream::new(4)).unwrap();
    let (r1, g1) = (rp3.clone(), g.clone());
    let iso = MapObject::new(rp3.clone(), rp3.clone(), "g", move |x| g1.apply(&r1, x));
    let fg = MapObject::compose(&f, &iso).unwrap();
    let a = rp2_family_average(&f, 300, 8).unwrap();
    let b = rp2_family_average(&fg, 300, 9).unwrap();
    assert!(
        (a.value - b.value).abs() <= 3.0 * a.std_error.hypot(b.std_error),
        "{} vs {}",
        a.value,
        b.value
    );
}

#[test]
fn line_average_matches_direct_energy_for_a_perturbed_map() {
    let cp2 = Manifold64::complex_projective(2);
    let f = map("perturbed(CP2,0.2)");
    let avg = line_energy_average(&f, 500, RESTRICTION_LEVEL, 3).unwrap();
    let direct = p_energy(&f, &build_grid(&cp2, 100_000, GridScheme::MonteCarlo, 3).unwrap(), 2.0).unwrap();
    let sigma = avg.std_error.hypot(direct.estimate.sigma());
    // mesh quadrature on each line adds a bias well below 0.2%
    assert!((avg.value - direct.value()).abs() <= 3.0 * sigma + 2e-3 * direct.value());
}

#[test]
fn discrete_energy_matches_continuum_energy() {
    let s2 = Manifold64::sphere(2);
    let grid = mesh_grid(&s2, 5).unwrap();
    for key in ["identity(S2)", "latitude_squash", "perturbed(S2,0.2)"] {
        let f = map(key);
        let discrete = MeshMap::sample(&f, 4).unwrap().discrete_energy();
        let continuum = p_energy(&f, &grid, 2.0).unwrap().value();
        assert!(
            (discrete - continuum).abs() <= 0.01 * continuum,
            "{key}: {discrete} vs {continuum}"
        );
    }
}

#[test]
fn flow_descends_and_its_interpolant_is_nearly_harmonic() {
    let f = map("perturbed(S2,0.2)");
    let m = MeshMap::sample(&f, 3).unwrap();
    let r = flow_minimize(
        &m,
        FlowOptions {
            step: 1e-2,
            iterations: 3000,
            tolerance: 1e-6,
        },
    )
    .unwrap();
    for w in r.log.windows(2) {
        assert!(w[1].energy <= w[0].energy);
    }
    let discrete = r.log.last().unwrap().tension;
    assert!(discrete < 1e-4);
    let g = r.map.interpolate();
    let mut rng = RngStream::new(2).generator();
    let (mut before, mut after): (f64, f64) = (0.0, 0.0);
    for _ in 0..40 {
        let x = g.domain.random_point(&mut rng);
        before = before.max(tension(&f, &x, SECOND_STEP).unwrap().norm());
        after = after.max(tension(&g, &x, SECOND_STEP).unwrap().norm());
    }
    // the interpolant's tension is set by the interpolation error, not by the discrete tension
    assert!(after < 1e-2 * before, "tension {before} -> {after}");
}

#[test]
fn reports_are_reproducible() {
    let cfg = ExperimentConfig::with_seed(3);
    for name in ["croke", "theta", "holomorphic-corpus"] {
        let a = run_experiment(name, &cfg).unwrap().without_timing();
        let b = run_experiment(name, &cfg).unwrap().without_timing();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }
    let suite: SuiteConfig = [("croke", 1), ("theta", 2)]
        .into_iter()
        .map(|(n, s)| (n.to_string(), ExperimentConfig::with_seed(s)))
        .collect();
    let seq: Vec<_> = run_suite(&suite, false)
        .unwrap()
        .into_iter()
        .map(|r| r.without_timing())
        .collect();
    let par: Vec<_> = run_suite(&suite, true)
        .unwrap()
        .into_iter()
        .map(|r| r.without_timing())
        .collect();
    assert_eq!(
        serde_json::to_string(&seq).unwrap(),
        serde_json::to_string(&par).unwrap()
    );
}
