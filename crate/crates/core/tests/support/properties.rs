//! Randomized property checks shared by the `properties` tests and the acceptance run.
//! Each check returns the failing case as a message.

use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};

use projective_energy::constructions::standard_map;
use projective_energy::harmonic::{second_fundamental_form, tension, tension_in_frame, SECOND_STEP};
use projective_energy::linalg;
use projective_energy::maps::{pullback_gram, DEFAULT_STEP};
use projective_energy::{Manifold64, Map64, MapObject, Point64, RngStream, TangentFrame, TangentVector};

fn runner(cases: u32) -> TestRunner {
    let config = Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

fn check<S: Strategy>(
    cases: u32,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String> {
    runner(cases).run(&strategy, test).map_err(|e| e.to_string())
}

fn fail(msg: String) -> TestCaseError {
    TestCaseError::fail(msg)
}

pub fn spaces() -> Vec<Manifold64> {
    vec![
        Manifold64::sphere(2),
        Manifold64::sphere(3),
        Manifold64::sphere_with_radius(2, 2.0),
        Manifold64::real_projective(2),
        Manifold64::real_projective(3),
        Manifold64::complex_projective(1),
        Manifold64::complex_projective(2),
    ]
}

/// Maps with and without analytic differentials.
pub const MAPS: &[&str] = &[
    "identity(CP2)",
    "rational(conic)",
    "rational(random3,5)",
    "dilation(CP2,3)",
    "theta(2)",
    "homothety(RP3,2)",
    "latitude_squash",
    "perturbed(S2,0.2)",
    "perturbed(RP3,0.2)",
    "perturbed(CP2,0.2)",
];

fn map(key: &str) -> Result<Map64, TestCaseError> {
    standard_map(key).map_err(|e| fail(format!("{key}: {e}")))
}

fn lift<T>(r: projective_energy::Result<T>) -> Result<T, TestCaseError> {
    r.map_err(|e| fail(e.to_string()))
}

fn trace_at(f: &Map64, x: &Point64, frame: &TangentFrame<f64>) -> Result<f64, TestCaseError> {
    Ok(lift(pullback_gram(f, x, frame, DEFAULT_STEP))?.trace())
}

/// `log_x exp_x v = v` and `d(x, exp_x v) = |v|` below the cut distance.
pub fn exp_log_round_trip(cases: u32) -> Result<(), String> {
    let spaces = spaces();
    check(
        cases,
        (0..spaces.len(), any::<u64>(), 0.0..0.95f64),
        |(i, seed, frac)| {
            let m = &spaces[i];
            let mut rng = RngStream::new(seed).generator();
            let x = m.random_point(&mut rng);
            let u = m.random_unit_tangent(&x, &mut rng);
            let v = linalg::scale(&u.components, frac * m.cut_distance());
            let y = lift(m.exp_raw(&x, &v))?;
            let back = lift(m.log_raw(&x, &y.coords))?;
            let residual = linalg::norm(&linalg::sub(&back, &v));
            let dist = (m.distance(&x, &y) - linalg::norm(&v)).abs();
            prop_assert!(residual < 1e-9, "{}: log∘exp residual {residual}", m.label());
            prop_assert!(dist < 1e-9, "{}: distance residual {dist}", m.label());
            Ok(())
        },
    )
}

/// The trace of the pullback metric does not depend on the orthonormal frame.
pub fn frame_independence(cases: u32) -> Result<(), String> {
    check(cases, (0..MAPS.len(), any::<u64>()), |(i, seed)| {
        let f = map(MAPS[i])?;
        let mut rng = RngStream::new(seed).generator();
        let x = f.domain.random_point(&mut rng);
        let reference = trace_at(&f, &x, &lift(TangentFrame::standard(&f.domain, &x))?)?;
        for _ in 0..10 {
            let frame = lift(TangentFrame::random(&f.domain, &x, &mut rng))?;
            let t = trace_at(&f, &x, &frame)?;
            prop_assert!(
                (t - reference).abs() <= 1e-8 * reference.max(1.0),
                "{}: trace {t} vs {reference}",
                MAPS[i]
            );
        }
        Ok(())
    })
}

fn isometry_map(m: &Manifold64, g: projective_energy::Isometry<f64>) -> Map64 {
    let (m1, m2, g2) = (m.clone(), m.clone(), g.clone());
    MapObject::new(m.clone(), m.clone(), "isometry", move |x| g.apply(&m1, x)).with_pushforward(move |x, vs| {
        let y = g2.apply(&m2, x)?;
        let cols = vs
            .iter()
            .map(|v| {
                let t = TangentVector {
                    base: x.clone(),
                    components: v.clone(),
                };
                Ok(g2.apply_tangent(&m2, &t)?.components)
            })
            .collect::<projective_energy::Result<Vec<_>>>()?;
        Ok((y, cols))
    })
}

/// Distances and inner products are invariant under the isometry group, and
/// energy densities are equivariant: `|d(F∘g)|²(x) = |dF|²(g x)`.
pub fn isometry_equivariance(cases: u32) -> Result<(), String> {
    let spaces = spaces();
    check(cases, (0..spaces.len(), 0..MAPS.len(), any::<u64>()), |(i, k, seed)| {
        let root = RngStream::new(seed);
        let mut rng = root.split(0).generator();
        let m = &spaces[i];
        let g = lift(m.random_isometry(root.split(1)))?;
        let (x, y) = (m.random_point(&mut rng), m.random_point(&mut rng));
        let (gx, gy) = (lift(g.apply(m, &x))?, lift(g.apply(m, &y))?);
        let dd = (m.distance(&x, &y) - m.distance(&gx, &gy)).abs();
        prop_assert!(dd < 1e-12, "{}: distance moved by {dd}", m.label());
        let u = m.random_unit_tangent(&x, &mut rng);
        let v = m.random_unit_tangent(&x, &mut rng);
        let (gu, gv) = (lift(g.apply_tangent(m, &u))?, lift(g.apply_tangent(m, &v))?);
        let di = (m.inner(&u, &v) - m.inner(&gu, &gv)).abs();
        prop_assert!(di < 1e-12, "{}: inner product moved by {di}", m.label());

        let f = map(MAPS[k])?;
        let h = lift(f.domain.random_isometry(root.split(2)))?;
        let fh = lift(MapObject::compose(&f, &isometry_map(&f.domain, h.clone())))?;
        let z = f.domain.random_point(&mut rng);
        let hz = lift(h.apply(&f.domain, &z))?;
        let a = trace_at(&fh, &z, &lift(TangentFrame::standard(&f.domain, &z))?)?;
        let b = trace_at(&f, &hz, &lift(TangentFrame::standard(&f.domain, &hz))?)?;
        prop_assert!((a - b).abs() <= 1e-8 * b.max(1.0), "{}: density {a} vs {b}", MAPS[k]);
        Ok(())
    })
}

/// `α(v, w) = α(w, v)` and the trace of `α` is frame independent.
pub fn alpha_symmetry(cases: u32) -> Result<(), String> {
    check(cases, (0..MAPS.len(), any::<u64>()), |(i, seed)| {
        let f = map(MAPS[i])?;
        let mut rng = RngStream::new(seed).generator();
        let x = f.domain.random_point(&mut rng);
        // the random cubic has fourth derivatives near 500 around its branch points
        let h = SECOND_STEP / 10.0;
        let v = f.domain.random_unit_tangent(&x, &mut rng).components;
        let w = linalg::scale(&f.domain.random_unit_tangent(&x, &mut rng).components, 0.7);
        let a = lift(second_fundamental_form(&f, &x, &v, &w, h))?.value.components;
        let b = lift(second_fundamental_form(&f, &x, &w, &v, h))?.value.components;
        let asym = linalg::norm(&linalg::sub(&a, &b));
        prop_assert!(asym < 1e-5, "{}: |α(v,w) - α(w,v)| = {asym}", MAPS[i]);
        let t0 = lift(tension(&f, &x, h))?.components;
        let frame = lift(TangentFrame::random(&f.domain, &x, &mut rng))?;
        let t1 = lift(tension_in_frame(&f, &x, &frame, h))?.components;
        let dt = linalg::norm(&linalg::sub(&t0, &t1));
        prop_assert!(dt < 1e-5, "{}: tension frame dependence {dt}", MAPS[i]);
        Ok(())
    })
}

/// Smooth maps with analytic differentials and nonzero third derivatives.
pub const SMOOTH_MAPS: &[&str] = &[
    "rational(conic)",
    "rational(random3,5)",
    "dilation(CP2,3)",
    "theta(2)",
    "capped_theta(4)",
];

/// Least-squares slope of log(error) against log(h) for central differences
/// over `h = 1e-2 · 2^-k`, `k = 0..7`.
pub fn convergence_slope(f: &Map64, x: &Point64, v: &[f64]) -> projective_energy::Result<f64> {
    let (_, exact) = f.push_forward(x, &[v.to_vec()])?;
    let fd = f.finite_difference_only();
    let mut pts = Vec::new();
    for k in 0..7 {
        let h = 1e-2 / f64::powi(2.0, k);
        let (_, approx) = fd.push_forward_fd(x, &[v.to_vec()], h, false)?;
        let err = linalg::norm(&linalg::sub(&approx[0], &exact[0]));
        pts.push((h.ln(), err.ln()));
    }
    let n = pts.len() as f64;
    let (mx, my) = pts.iter().fold((0.0, 0.0), |(a, b), p| (a + p.0 / n, b + p.1 / n));
    let (sxy, sxx) = pts.iter().fold((0.0, 0.0), |(a, b), p| {
        (a + (p.0 - mx) * (p.1 - my), b + (p.0 - mx) * (p.0 - mx))
    });
    Ok(sxy / sxx)
}

/// Central differences converge at second order: slope `2 ± 0.2`.
pub fn differential_convergence(cases: u32) -> Result<(), String> {
    check(cases, (0..SMOOTH_MAPS.len(), any::<u64>()), |(i, seed)| {
        let f = map(SMOOTH_MAPS[i])?;
        let mut rng = RngStream::new(seed).generator();
        let x = f.domain.random_point(&mut rng);
        let v = f.domain.random_unit_tangent(&x, &mut rng).components;
        let slope = lift(convergence_slope(&f, &x, &v))?;
        prop_assert!((slope - 2.0).abs() <= 0.2, "{}: slope {slope}", SMOOTH_MAPS[i]);
        Ok(())
    })
}

pub type Property = fn(u32) -> Result<(), String>;

pub const ALL: &[(&str, Property)] = &[
    ("exp/log round trip", exp_log_round_trip),
    ("frame independence", frame_independence),
    ("isometry equivariance", isometry_equivariance),
    ("α symmetry", alpha_symmetry),
    ("O(h²) differential convergence", differential_convergence),
];
