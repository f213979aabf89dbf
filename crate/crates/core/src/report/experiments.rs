//! Named end-to-end experiments. Each returns its checks; references and
//! default tolerances follow the acceptance table in the README.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde_json::json;

use super::{eval_bound, systole_rp2, BoundSpec, BoundValue, Check, ExperimentConfig, Outcome};
use crate::constructions::{capped_theta_seam, make_capped_theta, make_theta, squeeze_limit, standard_map};
use crate::energy::{energy_density, gram_at, integrate, p_energy, surface_area};
use crate::error::{GeometryError, Result};
use crate::flow::{flow_minimize, FlowOptions, MeshMap};
use crate::harmonic::{
    field_norm_squared, hermitian_residual, holomorphic_field, jacobi_identity_check, omega_star_line_integral,
    pluriharmonic_residual, rank_profile, second_fundamental_form, second_variation, su2_basis, tension,
    tension_in_frame, trace_form_ii, VariationField, SECOND_STEP,
};
use crate::intgeo::{
    e1_geodesic_bound, line_energy_average, line_space_mass, plane_family_mass, rp2_family_average, LineEmbedding,
    RESTRICTION_LEVEL,
};
use crate::linalg;
use crate::manifolds::ModelManifold;
use crate::maps::grid::{build_grid, mesh_grid, product_angles_grid};
use crate::maps::{GridScheme, MapObject, QuadratureGrid, TangentFrame, DEFAULT_STEP};
use crate::rng::RngStream;
use crate::scalar::line_constant;

type Map = MapObject<f64>;
type Grid = QuadratureGrid<f64>;
type Pipeline = fn(&ExperimentConfig) -> Result<Outcome>;

pub struct ExperimentInfo {
    pub name: &'static str,
    pub description: &'static str,
    pipeline: Pipeline,
}

pub const EXPERIMENTS: &[ExperimentInfo] = &[
    ExperimentInfo {
        name: "croke",
        description: "averaged unit-sphere density equals the trace of the pullback metric",
        pipeline: croke,
    },
    ExperimentInfo {
        name: "bounds-identity",
        description: "identity maps saturate the p-energy bounds on CP^N and RP^n",
        pipeline: bounds_identity,
    },
    ExperimentInfo {
        name: "line-formula",
        description: "line average of restricted energies equals E_2 on CP^2",
        pipeline: line_formula,
    },
    ExperimentInfo {
        name: "rp2-family",
        description: "average over totally geodesic RP^2 equals E_2 on RP^3",
        pipeline: rp2_family,
    },
    ExperimentInfo {
        name: "squeeze",
        description: "E_2(F∘T_λ) approaches C_N E_2(F|P_0)",
        pipeline: squeeze,
    },
    ExperimentInfo {
        name: "theta",
        description: "energies of the conformal dilations θ_t of S^3",
        pipeline: theta,
    },
    ExperimentInfo {
        name: "capped-theta",
        description: "energies of the capped maps Θ_t of RP^3 and their limit",
        pipeline: capped_theta,
    },
    ExperimentInfo {
        name: "holomorphic-corpus",
        description: "rational curves: energy equals area, harmonic and pluriharmonic",
        pipeline: holomorphic_corpus,
    },
    ExperimentInfo {
        name: "harmonic-diagnostics",
        description: "second fundamental form, tension, residuals, ranks and ω* integrals",
        pipeline: harmonic_diagnostics,
    },
    ExperimentInfo {
        name: "jacobi",
        description: "second variation along holomorphic fields and the Jacobi identity",
        pipeline: jacobi,
    },
    ExperimentInfo {
        name: "trace-II",
        description: "trace of the second variation over an su(2) basis",
        pipeline: trace_ii,
    },
    ExperimentInfo {
        name: "pu",
        description: "graph systole and the isosystolic inequality on RP^2",
        pipeline: pu,
    },
    ExperimentInfo {
        name: "flow",
        description: "discrete harmonic map flow of a perturbed identity of S^2",
        pipeline: flow,
    },
    ExperimentInfo {
        name: "e1-geodesic",
        description: "geodesic-length lower bound for E_1 on RP^3",
        pipeline: e1_geodesic,
    },
];

pub(super) fn lookup(name: &str) -> Result<Pipeline> {
    EXPERIMENTS
        .iter()
        .find(|e| e.name == name)
        .map(|e| e.pipeline)
        .ok_or_else(|| {
            let known: Vec<&str> = EXPERIMENTS.iter().map(|e| e.name).collect();
            GeometryError::Usage(format!("unknown experiment {name}; known: {}", known.join(", ")))
        })
}

fn map(key: &str) -> Result<Map> {
    standard_map::<f64>(key)
}

fn scalar_bound(spec: BoundSpec) -> Result<f64> {
    eval_bound(&spec)?.scalar()
}

fn e2(f: &Map, grid: &Grid) -> Result<f64> {
    Ok(p_energy(f, grid, 2.0)?.value())
}

fn cp1_mesh(level: usize) -> Result<Grid> {
    mesh_grid(&ModelManifold::complex_projective(1), level)
}

/// Random points on `m`, one independent stream per probe.
fn probes(m: &ModelManifold<f64>, k: usize, seed: u64) -> Vec<crate::manifolds::Point<f64>> {
    let root = RngStream::new(seed);
    (0..k)
        .map(|i| m.random_point(&mut root.split(i as u64).generator()))
        .collect()
}

fn croke(cfg: &ExperimentConfig) -> Result<Outcome> {
    let pairs = cfg.resolution_or(1000);
    let tol = cfg.tolerance_or(1e-6);
    let keys = [
        "identity(S2)",
        "latitude_squash",
        "perturbed(S2,0.2)",
        "identity(RP3)",
        "homothety(RP3,2)",
        "perturbed(RP3,0.2)",
        "identity(CP2)",
        "dilation(CP2,3)",
        "perturbed(CP2,0.2)",
    ];
    let maps = keys.iter().map(|k| map(k)).collect::<Result<Vec<_>>>()?;
    let root = RngStream::new(cfg.seed);
    let errors = (0..pairs)
        .into_par_iter()
        .map(|i| {
            let f = &maps[i % maps.len()];
            let x = f.domain.random_point(&mut root.split(i as u64).generator());
            let density = crate::energy::croke_density(f, &x, 3)?;
            let trace = gram_at(f, &x)?.trace();
            Ok((
                i % maps.len(),
                (density - trace).abs() / trace.abs().max(f64::MIN_POSITIVE),
            ))
        })
        .collect::<Result<Vec<(usize, f64)>>>()?;
    let mut worst = vec![0.0_f64; maps.len()];
    for (k, e) in errors {
        worst[k] = worst[k].max(e);
    }
    let checks = keys
        .iter()
        .zip(&worst)
        .map(|(k, &w)| Check::at_most(format!("max relative error, {k}"), w, tol))
        .collect();
    Ok(Outcome {
        inputs: json!({ "maps": keys, "pairs": pairs }),
        checks,
        details: json!({ "max_relative_error": worst }),
    })
}

fn bounds_identity(cfg: &ExperimentConfig) -> Result<Outcome> {
    let k = cfg.resolution_or(100_000);
    let tol = cfg.tolerance_or(0.005);
    let complex_ps = cfg.p.map(|p| vec![p]).unwrap_or_else(|| vec![2.0, 3.0, 4.0]);
    let real_ps = cfg.p.map(|p| vec![p]).unwrap_or_else(|| vec![1.0, 2.0, 4.0]);
    let mut checks = Vec::new();
    let mut energies = serde_json::Map::new();
    for n in [1usize, 2] {
        let m = ModelManifold::complex_projective(n);
        let grid = build_grid(&m, k, GridScheme::MonteCarlo, cfg.seed)?;
        let id = MapObject::identity(m.clone());
        for &p in complex_ps.iter().filter(|&&p| p >= 2.0) {
            let e = p_energy(&id, &grid, p)?.value();
            let b = scalar_bound(BoundSpec::CpnP { n, p, a_star: PI })?;
            energies.insert(format!("E{p}(id CP{n})"), json!(e));
            checks.push(Check::relative(format!("E_{p}(id CP{n}) vs complex bound"), e, b, tol));
        }
    }
    for n in [2usize, 3] {
        let m = ModelManifold::real_projective(n);
        let grid = build_grid(&m, k, GridScheme::MonteCarlo, cfg.seed)?;
        let id = MapObject::identity(m.clone());
        for &p in &real_ps {
            let e = p_energy(&id, &grid, p)?.value();
            let b = scalar_bound(BoundSpec::RpnP { n, p, l_star: PI })?;
            energies.insert(format!("E{p}(id RP{n})"), json!(e));
            checks.push(Check::relative(format!("E_{p}(id RP{n}) vs real bound"), e, b, tol));
        }
    }
    for n in 1..=3 {
        let a = scalar_bound(BoundSpec::CpnP { n, p: 2.0, a_star: PI })?;
        let b = scalar_bound(BoundSpec::Infimum { n, a_star: PI })?;
        checks.push(Check::at_most(
            format!("complex bound at p = 2 minus C_{n} A*"),
            (a - b).abs(),
            1e-12,
        ));
    }
    // corpus maps homotopic to the identity stay above the bounds
    let cp2 = ModelManifold::complex_projective(2);
    let cp2_grid = build_grid(&cp2, k, GridScheme::MonteCarlo, cfg.seed)?;
    for key in ["dilation(CP2,4)", "perturbed(CP2,0.2)"] {
        let f = map(key)?;
        for &p in complex_ps.iter().filter(|&&p| p >= 2.0) {
            let ev = p_energy(&f, &cp2_grid, p)?;
            let b = scalar_bound(BoundSpec::CpnP { n: 2, p, a_star: PI })?;
            energies.insert(format!("E{p}({key})"), json!(ev.value()));
            checks.push(Check::at_least(
                format!("E_{p}({key}) + 3σ minus complex bound, relative"),
                (ev.value() + 3.0 * ev.estimate.sigma() - b) / b,
                -tol,
            ));
        }
    }
    let rp3 = ModelManifold::real_projective(3);
    let rp3_grid = build_grid(&rp3, k, GridScheme::MonteCarlo, cfg.seed)?;
    for key in ["capped_theta(4)", "perturbed(RP3,0.2)"] {
        let f = map(key)?;
        for &p in &real_ps {
            let ev = p_energy(&f, &rp3_grid, p)?;
            let b = scalar_bound(BoundSpec::RpnP { n: 3, p, l_star: PI })?;
            energies.insert(format!("E{p}({key})"), json!(ev.value()));
            checks.push(Check::at_least(
                format!("E_{p}({key}) + 3σ minus real bound, relative"),
                (ev.value() + 3.0 * ev.estimate.sigma() - b) / b,
                -tol,
            ));
        }
    }
    Ok(Outcome {
        inputs: json!({ "nodes": k, "a_star": PI, "l_star": PI, "complex_p": complex_ps, "real_p": real_ps }),
        checks,
        details: serde_json::Value::Object(energies),
    })
}

fn line_formula(cfg: &ExperimentConfig) -> Result<Outcome> {
    let lines = cfg.resolution_or(10_000);
    let tol = cfg.tolerance_or(0.01);
    let nodes = cfg.f64_or("nodes", 100_000.0)? as usize;
    let cp2 = ModelManifold::complex_projective(2);
    let grid = build_grid(&cp2, nodes, GridScheme::MonteCarlo, cfg.seed)?;
    let mut checks = Vec::new();
    let mut details = serde_json::Map::new();
    for key in ["identity(CP2)", "dilation(CP2,4)"] {
        let f = map(key)?;
        let avg = line_energy_average(&f, lines, RESTRICTION_LEVEL, cfg.seed)?;
        let direct = e2(&f, &grid)?;
        checks.push(Check::relative(
            format!("line average vs direct E_2, {key}"),
            avg.value,
            direct,
            tol,
        ));
        checks.push(Check::relative(
            format!("line average vs π², {key}"),
            avg.value,
            PI * PI,
            tol,
        ));
        checks.push(Check::at_most(
            format!("line mass minus π²/2, {key}"),
            (avg.mass - line_space_mass::<f64>(2)).abs() + (line_space_mass::<f64>(2) - PI * PI / 2.0).abs(),
            1e-12,
        ));
        details.insert(
            key.to_string(),
            json!({ "line_average": avg.value, "std_error": avg.std_error, "direct": direct, "mass": avg.mass }),
        );
    }
    Ok(Outcome {
        inputs: json!({ "lines": lines, "line_mesh_level": RESTRICTION_LEVEL, "direct_nodes": nodes }),
        checks,
        details: serde_json::Value::Object(details),
    })
}

fn rp2_family(cfg: &ExperimentConfig) -> Result<Outcome> {
    let planes = cfg.resolution_or(1000);
    let tol = cfg.tolerance_or(0.01);
    let id = map("identity(RP3)")?;
    let avg = rp2_family_average(&id, planes, cfg.seed)?;
    let mut checks = vec![
        Check::relative("family average, identity(RP3), vs 3π²/2", avg.value, 1.5 * PI * PI, tol),
        Check::at_most("family mass minus 3π/4", (avg.mass - 3.0 * PI / 4.0).abs(), 1e-12),
        Check::at_most(
            "closed-form mass minus 3π/4",
            (plane_family_mass::<f64>(3) - 3.0 * PI / 4.0).abs(),
            1e-12,
        ),
    ];
    let key = cfg.str_or("map", "perturbed(RP3,0.2)")?;
    let f = map(&key)?;
    let fav = rp2_family_average(&f, planes, cfg.seed)?;
    let grid = build_grid(&f.domain, 100_000, GridScheme::MonteCarlo, cfg.seed)?;
    let ev = p_energy(&f, &grid, 2.0)?;
    let sigma = (fav.std_error.powi(2) + ev.estimate.sigma().powi(2)).sqrt();
    checks.push(Check::at_most(
        format!("|family average - E_2| - 3σ, {key}, relative"),
        ((fav.value - ev.value()).abs() - 3.0 * sigma).max(0.0) / ev.value(),
        tol,
    ));
    Ok(Outcome {
        inputs: json!({ "planes": planes, "map": key }),
        checks,
        details: json!({
            "identity": { "average": avg.value, "std_error": avg.std_error, "mass": avg.mass },
            "map": { "average": fav.value, "std_error": fav.std_error, "direct": ev.value(), "direct_std_error": ev.estimate.sigma() },
        }),
    })
}

fn squeeze(cfg: &ExperimentConfig) -> Result<Outcome> {
    let nodes = cfg.resolution_or(100_000);
    let tol = cfg.tolerance_or(0.02);
    let key = cfg.str_or("map", "perturbed(CP2,0.2)")?;
    let lambdas = cfg.list_or("lambdas", &[1.0, 2.0, 4.0, 8.0, 16.0])?;
    if lambdas.len() < 2 {
        return Err(GeometryError::Usage("squeeze needs at least two λ values".into()));
    }
    let f = map(&key)?;
    let n = match f.domain {
        ModelManifold::ComplexProjective { n } => n,
        _ => return Err(GeometryError::Usage(format!("{key} is not defined on CP^N"))),
    };
    let grid = build_grid(&f.domain, nodes, GridScheme::MonteCarlo, cfg.seed)?;
    let r = squeeze_limit(&f, &lambdas, &grid, RESTRICTION_LEVEL)?;
    let energies: Vec<f64> = r.energies.iter().map(|e| e.value()).collect();
    let last = *energies.last().expect("nonempty");
    // paired differences on common nodes
    let composed = lambdas
        .iter()
        .map(|&l| MapObject::compose(&f, &crate::constructions::make_projective_dilation(n, l)?))
        .collect::<Result<Vec<_>>>()?;
    let mut diffs = Vec::new();
    for w in composed.windows(2) {
        let d = integrate(&grid, |x| {
            Ok((energy_density(&gram_at(&w[1], x)?) - energy_density(&gram_at(&w[0], x)?)) / 2.0)
        })?;
        diffs.push((d.value, d.sigma()));
    }
    let violation = |sign: f64| {
        diffs
            .iter()
            .map(|&(d, s)| (sign * d - 3.0 * s).max(0.0))
            .fold(0.0_f64, f64::max)
    };
    let (up, down) = (violation(-1.0), violation(1.0));
    let checks = vec![
        Check::relative(
            format!("E_2(F∘T_{}) vs C_{n} E_2(F|P_0)", lambdas.last().unwrap()),
            last,
            r.target,
            tol,
        ),
        Check::at_most("monotonicity violation beyond 3 paired σ", up.min(down), 0.0),
    ];
    Ok(Outcome {
        inputs: json!({ "map": key, "lambdas": lambdas, "nodes": nodes, "line_mesh_level": RESTRICTION_LEVEL }),
        checks,
        details: json!({
            "energies": energies,
            "std_errors": r.energies.iter().map(|e| e.estimate.sigma()).collect::<Vec<_>>(),
            "paired_differences": diffs,
            "line_energy": r.line_energy,
            "line_constant": line_constant::<f64>(n),
            "target": r.target,
            "net_change": diffs.iter().map(|d| d.0).sum::<f64>(),
        }),
    })
}

fn seam_grid(m: &ModelManifold<f64>, n_psi: usize, t: f64) -> Result<Grid> {
    product_angles_grid(m, n_psi, 1, &[capped_theta_seam(t)])
}

fn theta(cfg: &ExperimentConfig) -> Result<Outcome> {
    let n_psi = cfg.resolution_or(48);
    let tol = cfg.tolerance_or(0.005);
    let ts = cfg.list_or("t", &[1.0, 2.0, 4.0, 8.0])?;
    let s3 = ModelManifold::sphere(3);
    let energies = ts
        .iter()
        .map(|&t| e2(&make_theta(t)?, &seam_grid(&s3, n_psi, t)?))
        .collect::<Result<Vec<f64>>>()?;
    let mut checks = Vec::new();
    if let Some(i) = ts.iter().position(|&t| t == 1.0) {
        checks.push(Check::relative("E_2(θ_1) vs 3π²", energies[i], 3.0 * PI * PI, tol));
    }
    let rise = energies
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::NEG_INFINITY, f64::max);
    checks.push(Check::at_least("smallest decrease between successive t", -rise, 0.0));
    for (&t, &e) in ts.iter().zip(&energies) {
        // conformal factor of θ_t integrates in closed form
        let closed = 12.0 * PI * PI * t / ((1.0 + t) * (1.0 + t));
        checks.push(Check::relative(format!("E_2(θ_{t}) vs 12π² t/(1+t)²"), e, closed, tol));
    }
    Ok(Outcome {
        inputs: json!({ "t": ts, "psi_nodes": n_psi }),
        checks,
        details: json!({ "energies": energies }),
    })
}

fn capped_theta(cfg: &ExperimentConfig) -> Result<Outcome> {
    let n_psi = cfg.resolution_or(48);
    let tol = cfg.tolerance_or(0.02);
    let ts = cfg.list_or("t", &[1.0, 2.0, 4.0, 8.0, 16.0])?;
    if ts.len() < 2 {
        return Err(GeometryError::Usage("capped-theta needs at least two t values".into()));
    }
    let b_star = cfg.f64_or("b_star", 2.0 * PI)?;
    let rp3 = ModelManifold::real_projective(3);
    let energies = ts
        .iter()
        .map(|&t| e2(&make_capped_theta(t)?, &seam_grid(&rp3, n_psi, t)?))
        .collect::<Result<Vec<f64>>>()?;
    let k = ts.len();
    let (ta, tb) = (ts[k - 2], ts[k - 1]);
    let (ea, eb) = (energies[k - 2], energies[k - 1]);
    // Richardson extrapolation for an O(1/t) error
    let limit = (tb * eb - ta * ea) / (tb - ta);
    let mut checks = vec![Check::relative(
        "extrapolated lim E_2(Θ_t) vs 2π²",
        limit,
        2.0 * PI * PI,
        tol,
    )];
    if let Some(i) = ts.iter().position(|&t| t == 1.0) {
        checks.push(Check::relative(
            "E_2(Θ_1) vs E_2(id RP3) = 3π²/2",
            energies[i],
            1.5 * PI * PI,
            0.005,
        ));
    }
    let interval = match eval_bound(&BoundSpec::Rp3Interval { b_star })? {
        BoundValue::Interval(a, b) => [a, b],
        BoundValue::Scalar(_) => unreachable!("interval bound"),
    };
    Ok(Outcome {
        inputs: json!({ "t": ts, "psi_nodes": n_psi, "b_star": b_star }),
        checks,
        details: json!({
            "energies": energies,
            "extrapolated_limit": limit,
            "interval_at_b_star": interval,
            "candidates": { "identity(RP3)": 1.5 * PI * PI, "capped_theta limit": limit },
        }),
    })
}

fn holomorphic_corpus(cfg: &ExperimentConfig) -> Result<Outcome> {
    let level = cfg.resolution_or(4);
    let tol = cfg.tolerance_or(0.005);
    let n_probes = cfg.f64_or("probes", 100.0)? as usize;
    let grid = cp1_mesh(level)?;
    let cubic = format!("rational(random3,{})", cfg.seed);
    let corpus = [
        ("rational(line)".to_string(), 1.0),
        ("rational(conic)".to_string(), 2.0),
        (cubic, 3.0),
    ];
    let mut checks = Vec::new();
    let mut details = serde_json::Map::new();
    for (key, d) in &corpus {
        let f = map(key)?;
        let e = e2(&f, &grid)?;
        let a = surface_area(&f, &grid)?.value;
        checks.push(Check::relative(format!("E_2({key}) vs {d}π"), e, d * PI, tol));
        checks.push(Check::relative(format!("area({key}) vs {d}π"), a, d * PI, tol));
        let pts = probes(&f.domain, n_probes, cfg.seed);
        let sups = pts
            .par_iter()
            .map(|x| {
                Ok([
                    tension(&f, x, SECOND_STEP)?.norm(),
                    pluriharmonic_residual(&f, x, SECOND_STEP)?,
                    hermitian_residual(&f, x, DEFAULT_STEP)?,
                ])
            })
            .collect::<Result<Vec<[f64; 3]>>>()?
            .into_iter()
            .fold([0.0_f64; 3], |m, r| [m[0].max(r[0]), m[1].max(r[1]), m[2].max(r[2])]);
        for (name, v) in ["tension", "pluriharmonic residual", "Hermitian residual"]
            .iter()
            .zip(sups)
        {
            checks.push(Check::at_most(format!("sup {name}, {key}"), v, 1e-3));
        }
        details.insert(key.clone(), json!({ "energy": e, "area": a, "sup_residuals": sups }));
    }
    Ok(Outcome {
        inputs: json!({ "mesh_level": level, "probes": n_probes, "corpus": corpus.iter().map(|c| &c.0).collect::<Vec<_>>() }),
        checks,
        details: serde_json::Value::Object(details),
    })
}

fn sup_over<F>(pts: &[crate::manifolds::Point<f64>], f: F) -> Result<f64>
where
    F: Fn(usize, &crate::manifolds::Point<f64>) -> Result<f64> + Sync,
{
    Ok(pts
        .par_iter()
        .enumerate()
        .map(|(i, x)| f(i, x))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max))
}

fn harmonic_diagnostics(cfg: &ExperimentConfig) -> Result<Outcome> {
    let n_probes = cfg.resolution_or(100);
    let h = SECOND_STEP;
    let mut checks = Vec::new();
    let mut details = serde_json::Map::new();
    // tangent directions come from a stream disjoint from the probe points
    let tangents = RngStream::new(cfg.seed).split(u64::MAX);

    // totally geodesic maps
    for key in ["inclusion(CP1,CP2)", "double_cover"] {
        let f = map(key)?;
        let pts = probes(&f.domain, n_probes, cfg.seed);
        let sup = sup_over(&pts, |i, x| {
            let mut rng = tangents.split(7).split(i as u64).generator();
            let v = f.domain.random_unit_tangent(x, &mut rng).components;
            let w = f.domain.random_unit_tangent(x, &mut rng).components;
            Ok(second_fundamental_form(&f, x, &v, &w, h)?.value.norm())
        })?;
        checks.push(Check::at_most(format!("sup |α|, {key}"), sup, 1e-5));
    }
    // symmetry of α and frame independence of its trace
    for key in [
        "rational(conic)",
        "latitude_squash",
        "perturbed(S2,0.2)",
        "perturbed(CP2,0.2)",
    ] {
        let f = map(key)?;
        let pts = probes(&f.domain, n_probes, cfg.seed.wrapping_add(1));
        let sym = sup_over(&pts, |i, x| {
            let mut rng = tangents.split(11).split(i as u64).generator();
            let v = f.domain.random_unit_tangent(x, &mut rng).components;
            let w = f.domain.random_unit_tangent(x, &mut rng).components;
            let a = second_fundamental_form(&f, x, &v, &w, h)?.value.components;
            let b = second_fundamental_form(&f, x, &w, &v, h)?.value.components;
            Ok(linalg::norm(&linalg::sub(&a, &b)))
        })?;
        checks.push(Check::at_most(format!("sup |α(v,w) - α(w,v)|, {key}"), sym, 1e-5));
        let frame = sup_over(&pts, |i, x| {
            let mut rng = tangents.split(13).split(i as u64).generator();
            let a = tension(&f, x, h)?.components;
            let b = tension_in_frame(&f, x, &TangentFrame::random(&f.domain, x, &mut rng)?, h)?.components;
            Ok(linalg::norm(&linalg::sub(&a, &b)))
        })?;
        checks.push(Check::at_most(
            format!("sup tension frame dependence, {key}"),
            frame,
            1e-5,
        ));
    }
    // analytic tension against the mesh Laplacian
    let squash = map("latitude_squash")?;
    let mesh = MeshMap::sample(&squash, 4)?;
    let discrete = mesh.discrete_tension()?;
    let (mut num, mut den) = (0.0, 0.0);
    for (i, x) in mesh.vertices.iter().enumerate() {
        let t = tension(&squash, x, h)?.components;
        num += mesh.areas[i] * linalg::dot(&linalg::sub(&t, &discrete[i]), &linalg::sub(&t, &discrete[i]));
        den += mesh.areas[i] * linalg::dot(&t, &t);
    }
    let oracle = (num / den).sqrt();
    checks.push(Check::at_most(
        "relative L2 gap, latitude_squash tension vs mesh oracle",
        oracle,
        0.05,
    ));
    details.insert("squash_tension_l2".into(), json!(den.sqrt()));

    // pluriharmonic and Hermitian residuals
    let cp2 = ModelManifold::complex_projective(2);
    let pts = probes(&cp2, n_probes, cfg.seed.wrapping_add(2));
    for key in ["dilation(CP2,2)", "dilation(CP2,8)"] {
        let f = map(key)?;
        let ph = sup_over(&pts, |_, x| pluriharmonic_residual(&f, x, h))?;
        checks.push(Check::at_most(format!("sup pluriharmonic residual, {key}"), ph, 1e-3));
    }
    let pert = map("perturbed(CP2,0.2)")?;
    let ph = sup_over(&pts, |_, x| pluriharmonic_residual(&pert, x, h))?;
    let he = sup_over(&pts, |_, x| hermitian_residual(&pert, x, DEFAULT_STEP))?;
    checks.push(Check::at_least(
        "max pluriharmonic residual, perturbed(CP2,0.2)",
        ph,
        1e-2,
    ));
    checks.push(Check::at_least("max Hermitian residual, perturbed(CP2,0.2)", he, 1e-3));
    let conj = map("conjugation")?;
    let cp1_pts = probes(&conj.domain, n_probes, cfg.seed.wrapping_add(3));
    let ch = sup_over(&cp1_pts, |_, x| hermitian_residual(&conj, x, DEFAULT_STEP))?;
    checks.push(Check::at_most("sup Hermitian residual, conjugation", ch, 1e-5));
    details.insert(
        "perturbed_residuals".into(),
        json!({ "pluriharmonic": ph, "hermitian": he }),
    );

    // ranks
    let rank_grid = build_grid(&cp2, 2000, GridScheme::MonteCarlo, cfg.seed)?;
    for (key, full) in [
        ("identity(CP2)", true),
        ("dilation(CP2,8)", true),
        ("constant(CP2)", false),
    ] {
        let r = rank_profile(&map(key)?, &rank_grid)?;
        let value = if full {
            r.full_rank_fraction
        } else {
            r.counts[0] as f64 / rank_grid.len() as f64
        };
        let label = if full {
            "full-rank fraction"
        } else {
            "rank-zero fraction"
        };
        checks.push(Check::relative(format!("{label}, {key}"), value, 1.0, 0.0));
        details.insert(format!("rank_profile {key}"), json!(r.counts));
    }

    // ω* over lines
    let line_grid = cp1_mesh(4)?;
    let u = cp2.random_unit_tangent_bundle(&mut tangents.split(17).generator());
    let lines = [
        ("coordinate line", LineEmbedding::coordinate(2)),
        ("random line", LineEmbedding::new(2, &u.base, &u.components)?),
    ];
    for key in ["identity(CP2)", "dilation(CP2,2)"] {
        let f = map(key)?;
        for (name, line) in &lines {
            let w = omega_star_line_integral(&f, line, &line_grid)?;
            let area = surface_area(&MapObject::compose(&f, &line.embedding())?, &line_grid)?.value;
            checks.push(Check::relative(format!("∫ω* over {name}, {key}, vs π"), w, PI, 0.005));
            checks.push(Check::relative(
                format!("∫ω* over {name}, {key}, vs image area"),
                w,
                area,
                1e-6,
            ));
        }
    }
    Ok(Outcome {
        inputs: json!({ "probes": n_probes }),
        checks,
        details: serde_json::Value::Object(details),
    })
}

/// `ε = 1e-3 ∫|W|²`: the scale below which second variations count as zero.
fn zero_scale(w: &VariationField<f64>, grid: &Grid) -> Result<f64> {
    Ok(1e-3 * field_norm_squared(w, grid)?)
}

fn jacobi(cfg: &ExperimentConfig) -> Result<Outcome> {
    let level = cfg.resolution_or(3);
    let tol = cfg.tolerance_or(0.05);
    let grid = cp1_mesh(level)?;
    let basis = su2_basis::<f64>();
    let id = map("identity(CP1)")?;
    let mut checks = Vec::new();
    let mut sv = Vec::new();
    for (i, a) in basis.iter().enumerate() {
        let w = VariationField::pushforward(&id, "F_*(JV)", holomorphic_field(&id.domain, a)?);
        let v = second_variation(&id, &w, &grid)?;
        let eps = zero_scale(&w, &grid)?;
        checks.push(Check::at_most(
            format!("second variation, identity(CP1), su(2) element {i}"),
            v,
            eps,
        ));
        sv.push(v);
    }
    let curve = map("rational(veronese2)")?;
    let mut sides = Vec::new();
    for (i, a) in basis.iter().enumerate() {
        let (lhs, rhs) = jacobi_identity_check(&curve, a, &grid)?;
        let w = VariationField::pushforward(&curve, "F_*(JV)", holomorphic_field(&curve.domain, a)?);
        let eps = zero_scale(&w, &grid)?;
        let scale = lhs.abs().max(rhs.abs()).max(eps);
        checks.push(Check::at_most(
            format!("|lhs - rhs|, veronese2, su(2) element {i}"),
            (lhs - rhs).abs(),
            tol * scale,
        ));
        sides.push([lhs, rhs]);
    }
    let tr = trace_form_ii(&id, &grid, &basis)?;
    let energy = e2(&id, &grid)?;
    checks.push(Check::at_most("|Tr II|, identity(CP1)", tr.trace.abs(), 1e-3 * energy));
    Ok(Outcome {
        inputs: json!({ "mesh_level": level }),
        checks,
        details: json!({ "identity_second_variations": sv, "veronese2_sides": sides, "trace_ii": tr.trace }),
    })
}

fn trace_ii(cfg: &ExperimentConfig) -> Result<Outcome> {
    let level = cfg.resolution_or(3);
    let tol = cfg.tolerance_or(0.05);
    let grid = cp1_mesh(level)?;
    let basis = su2_basis::<f64>();
    let mut checks = Vec::new();
    let mut details = serde_json::Map::new();
    let id = map("identity(CP1)")?;
    let tr = trace_form_ii(&id, &grid, &basis)?;
    checks.push(Check::at_most(
        "|Tr II|, identity(CP1)",
        tr.trace.abs(),
        1e-3 * e2(&id, &grid)?,
    ));
    details.insert("identity(CP1)".into(), json!(tr));
    let curve = map("rational(veronese2)")?;
    let tc = trace_form_ii(&curve, &grid, &basis)?;
    let total: f64 = tc.terms.iter().map(|t| t.abs()).sum();
    let scale = total.max(1e-3 * tc.field_scale);
    checks.push(Check::at_most("|Tr II|, veronese2", tc.trace.abs(), tol * scale));
    details.insert("rational(veronese2)".into(), json!(tc));
    let constant = map("constant(CP1)")?;
    let t0 = trace_form_ii(&constant, &grid, &basis)?;
    checks.push(Check::at_most("|Tr II|, constant(CP1)", t0.trace.abs(), 1e-12));
    Ok(Outcome {
        inputs: json!({ "mesh_level": level }),
        checks,
        details: serde_json::Value::Object(details),
    })
}

fn pu(cfg: &ExperimentConfig) -> Result<Outcome> {
    let level = cfg.resolution_or(3);
    let tol = cfg.tolerance_or(0.02);
    let a = cfg.f64_or("amplitude", 0.5)?;
    let round = systole_rp2(&|_: &[f64]| 1.0, level)?;
    let scaled = systole_rp2(&|_: &[f64]| 4.0, level)?;
    let bumped = systole_rp2(&move |x: &[f64]| 1.0 + a * x[0] * x[0], level)?;
    let round_slack = round.pu_slack();
    let checks = vec![
        Check::relative("systole, μ = 1, vs π", round.refined, PI, tol),
        Check::relative("systole, μ = 4, vs 2π", scaled.refined, 2.0 * PI, tol),
        Check::at_most("|isosystolic slack| / area, μ = 1", round_slack.abs() / round.area, 2.0 * tol),
        Check::at_least(
            format!("isosystolic slack minus 3 uncertainties, μ = 1 + {a} x_0²"),
            bumped.pu_slack() - 3.0 * bumped.slack_uncertainty(),
            0.0,
        ),
    ];
    Ok(Outcome {
        inputs: json!({ "mesh_level": level, "amplitude": a }),
        checks,
        details: json!({
            "round": round, "scaled": scaled, "bumped": bumped,
            "bumped_slack": bumped.pu_slack(), "bumped_slack_uncertainty": bumped.slack_uncertainty(),
        }),
    })
}

fn flow(cfg: &ExperimentConfig) -> Result<Outcome> {
    let level = cfg.resolution_or(4);
    let tol = cfg.tolerance_or(0.01);
    let key = cfg.str_or("map", "perturbed(S2,0.2)")?;
    let options = FlowOptions {
        step: cfg.f64_or("step", 1e-2)?,
        iterations: cfg.f64_or("iterations", 3000.0)? as usize,
        tolerance: cfg.f64_or("flow_tolerance", 1e-6)?,
    };
    let f = map(&key)?;
    let m = MeshMap::sample(&f, level)?;
    let d0 = m.conformality_defect().value;
    let r = flow_minimize(&m, options)?;
    let last = r.log.last().expect("flow log is never empty");
    let rise = r
        .log
        .windows(2)
        .map(|w| w[1].energy - w[0].energy)
        .fold(0.0_f64, f64::max);
    let target = 4.0 * PI;
    let checks = vec![
        Check::at_most("largest energy increase between accepted steps", rise, 0.0),
        Check::relative(format!("final discrete energy, {key}, vs 4π"), last.energy, target, tol),
        Check::at_least(
            "conformality defect reduction factor",
            d0 / last.defect.max(f64::MIN_POSITIVE),
            10.0,
        ),
        Check::at_most("final sup discrete tension", last.tension, 1e-4),
    ];
    Ok(Outcome {
        inputs: json!({ "map": key, "mesh_level": level, "options": options }),
        checks,
        details: json!({
            "initial_energy": r.log[0].energy, "final_energy": last.energy,
            "initial_defect": d0, "final_defect": last.defect,
            "iterations": r.log.len() - 1, "stop": r.stop,
        }),
    })
}

fn e1_geodesic(cfg: &ExperimentConfig) -> Result<Outcome> {
    let k = cfg.resolution_or(500);
    let tol = cfg.tolerance_or(0.005);
    let rp3 = ModelManifold::real_projective(3);
    let mut checks = Vec::new();
    let mut details = serde_json::Map::new();
    let id = map("identity(RP3)")?;
    let b = e1_geodesic_bound(&id, k, cfg.seed)?;
    let e1_id = 0.5 * 3f64.sqrt() * rp3.volume();
    checks.push(Check::relative(
        "geodesic bound, identity(RP3), vs E_1",
        b.value,
        e1_id,
        tol,
    ));
    details.insert("identity(RP3)".into(), json!({ "bound": b.value, "e1": e1_id }));
    for key in ["capped_theta(4)", "perturbed(RP3,0.2)"] {
        let f = map(key)?;
        let grid = if key.starts_with("capped") {
            seam_grid(&rp3, 48, 4.0)?
        } else {
            build_grid(&rp3, 100_000, GridScheme::MonteCarlo, cfg.seed)?
        };
        let ev = p_energy(&f, &grid, 1.0)?;
        let bound = e1_geodesic_bound(&f, k, cfg.seed)?;
        let slack = ev.value() - bound.value + 3.0 * (bound.std_error.powi(2) + ev.estimate.sigma().powi(2)).sqrt();
        checks.push(Check::at_least(format!("E_1 - bound + 3σ, {key}"), slack, 0.0));
        details.insert(
            key.into(),
            json!({ "bound": bound.value, "bound_std_error": bound.std_error, "e1": ev.value() }),
        );
    }
    Ok(Outcome {
        inputs: json!({ "geodesics": k }),
        checks,
        details: serde_json::Value::Object(details),
    })
}
