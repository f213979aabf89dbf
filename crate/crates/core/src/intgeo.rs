//! Spaces of geodesics, projective lines and totally geodesic planes with their
//! invariant measures, and the averaging formulas built on them.

use rayon::prelude::*;
use serde::Serialize;

use crate::energy::{curve_length, p_energy};
use crate::error::{GeometryError, Result};
use crate::linalg;
use crate::manifolds::{ModelManifold, Point};
use crate::maps::grid::mesh_grid;
use crate::maps::MapObject;
use crate::rng::RngStream;
use crate::scalar::{factorial, sphere_volume, Scalar};

/// Mesh level used for restricted energies on lines and planes.
pub const RESTRICTION_LEVEL: usize = 4;
/// Steps used for lengths of image curves.
pub const LENGTH_STEPS: usize = 256;

/// Closed unit-speed geodesic `t ↦ exp_x(t u)` on a sphere or real projective space.
#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicLoop<T> {
    pub manifold: ModelManifold<T>,
    pub base: Point<T>,
    pub direction: Vec<T>,
}

impl<T: Scalar> GeodesicLoop<T> {
    pub fn new(manifold: ModelManifold<T>, base: Point<T>, direction: Vec<T>) -> Result<Self> {
        if !matches!(
            manifold,
            ModelManifold::Sphere { .. } | ModelManifold::RealProjective { .. }
        ) {
            return Err(GeometryError::Domain(format!(
                "closed geodesic loops on {}",
                manifold.label()
            )));
        }
        if (linalg::norm(&direction) - T::one()).abs() > T::of(1e-10)
            || manifold.tangent_residual(&base, &direction) > T::of(1e-10)
        {
            return Err(GeometryError::Domain(
                "loop direction must be a unit tangent vector".into(),
            ));
        }
        Ok(Self {
            manifold,
            base,
            direction,
        })
    }

    /// `π r` on `RP^n(r)`, `2π r` on `S^n(r)`.
    pub fn period(&self) -> T {
        match self.manifold {
            ModelManifold::RealProjective { radius, .. } => T::PI() * radius,
            _ => T::of(2.0) * T::PI() * self.manifold.radius(),
        }
    }

    /// `γ(t)` and `γ'(t)`, with the velocity expressed at the canonical representative.
    pub fn point_and_velocity(&self, t: T) -> Result<(Point<T>, Vec<T>)> {
        let th = t / self.manifold.radius();
        let (c, s) = (th.cos(), th.sin());
        let raw: Vec<T> = self
            .base
            .coords
            .iter()
            .zip(&self.direction)
            .map(|(&x, &u)| c * x + s * u)
            .collect();
        let vel: Vec<T> = self
            .base
            .coords
            .iter()
            .zip(&self.direction)
            .map(|(&x, &u)| -s * x + c * u)
            .collect();
        let (p, phase) = self.manifold.normalize_with_phase(&raw)?;
        let v = self.manifold.apply_phase(&vel, phase);
        Ok((p, v))
    }
}

/// Degree-one curve `[a:b] ↦ [a z + b u]` through `[z]` tangent to `u`.
#[derive(Debug, Clone, PartialEq)]
pub struct LineEmbedding<T> {
    pub n: usize,
    pub z: Vec<T>,
    pub u: Vec<T>,
}

impl<T: Scalar> LineEmbedding<T> {
    /// Line through `base` tangent to the unit horizontal vector `direction`.
    pub fn new(n: usize, base: &Point<T>, direction: &[T]) -> Result<Self> {
        let (re, im) = linalg::hermitian(&base.coords, direction);
        if base.coords.len() != 2 * n + 2 || direction.len() != 2 * n + 2 {
            return Err(GeometryError::Domain("line data does not match the dimension".into()));
        }
        if (re * re + im * im).sqrt() > T::of(1e-10) || (linalg::norm(direction) - T::one()).abs() > T::of(1e-10) {
            return Err(GeometryError::Domain(
                "line direction must be a unit horizontal vector".into(),
            ));
        }
        Ok(Self {
            n,
            z: base.coords.clone(),
            u: direction.to_vec(),
        })
    }

    /// The coordinate line `{z_2 = ... = z_N = 0}`.
    pub fn coordinate(n: usize) -> Self {
        let mut z = vec![T::zero(); 2 * n + 2];
        let mut u = vec![T::zero(); 2 * n + 2];
        z[0] = T::one();
        u[2] = T::one();
        Self { n, z, u }
    }

    pub fn embedding(&self) -> MapObject<T> {
        let (z1, u1) = (self.z.clone(), self.u.clone());
        let (z2, u2) = (self.z.clone(), self.u.clone());
        let combo = |ab: &[T], z: &[T], u: &[T]| {
            linalg::add(&linalg::cscale(z, (ab[0], ab[1])), &linalg::cscale(u, (ab[2], ab[3])))
        };
        MapObject::lifted(
            ModelManifold::complex_projective(1),
            ModelManifold::complex_projective(self.n),
            "line",
            move |ab| combo(ab, &z1, &u1),
            move |_, v| combo(v, &z2, &u2),
        )
    }
}

/// Totally geodesic `RP^2 ⊂ RP^n` spanned by an orthonormal 3-frame.
#[derive(Debug, Clone, PartialEq)]
pub struct PlaneEmbedding<T> {
    pub n: usize,
    pub frame: [Vec<T>; 3],
}

impl<T: Scalar> PlaneEmbedding<T> {
    pub fn embedding(&self) -> MapObject<T> {
        let f1 = self.frame.clone();
        let f2 = self.frame.clone();
        let combo = |c: &[T], f: &[Vec<T>; 3]| {
            let mut out = linalg::scale(&f[0], c[0]);
            out = linalg::axpy(&out, c[1], &f[1]);
            linalg::axpy(&out, c[2], &f[2])
        };
        MapObject::lifted(
            ModelManifold::real_projective(2),
            ModelManifold::real_projective(self.n),
            "plane",
            move |c| combo(c, &f1),
            move |_, v| combo(v, &f2),
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SampleElement<T> {
    Geodesic(GeodesicLoop<T>),
    Line(LineEmbedding<T>),
    Plane(PlaneEmbedding<T>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasureSample<T> {
    pub element: SampleElement<T>,
    pub weight: T,
    pub stream: RngStream,
}

/// Total mass `σ(n)σ(n-1)/(2π)` of the space of geodesics of `RP^n`.
pub fn geodesic_space_mass<T: Scalar>(n: usize) -> T {
    sphere_volume::<T>(n) * sphere_volume::<T>(n - 1) / (T::of(2.0) * T::PI())
}

/// Total mass `π^{2N-2}/(N!(N-1)!)` of the space of lines of `CP^N`.
pub fn line_space_mass<T: Scalar>(n: usize) -> T {
    T::PI().powi(2 * n as i32 - 2) / (factorial::<T>(n) * factorial::<T>(n - 1))
}

/// Total mass `nσ(n)/(8π)` of the family of totally geodesic `RP^2 ⊂ RP^n`.
pub fn plane_family_mass<T: Scalar>(n: usize) -> T {
    T::of_usize(n) * sphere_volume::<T>(n) / (T::of(8.0) * T::PI())
}

pub fn sample_geodesics<T: Scalar>(n: usize, k: usize, seed: u64) -> Result<Vec<MeasureSample<T>>> {
    if n < 2 || k == 0 {
        return Err(GeometryError::Domain("geodesic sampling needs n ≥ 2 and K ≥ 1".into()));
    }
    let m = ModelManifold::<T>::real_projective(n);
    let w = geodesic_space_mass::<T>(n) / T::of_usize(k);
    let root = RngStream::new(seed);
    (0..k)
        .map(|i| {
            let stream = root.split(i as u64);
            let u = m.random_unit_tangent_bundle(&mut stream.generator());
            Ok(MeasureSample {
                element: SampleElement::Geodesic(GeodesicLoop::new(m.clone(), u.base, u.components)?),
                weight: w,
                stream,
            })
        })
        .collect()
}

pub fn sample_lines<T: Scalar>(n: usize, k: usize, seed: u64) -> Result<Vec<MeasureSample<T>>> {
    if n < 1 || k == 0 {
        return Err(GeometryError::Domain("line sampling needs N ≥ 1 and K ≥ 1".into()));
    }
    let m = ModelManifold::<T>::complex_projective(n);
    let w = line_space_mass::<T>(n) / T::of_usize(k);
    let root = RngStream::new(seed);
    (0..k)
        .map(|i| {
            let stream = root.split(i as u64);
            let u = m.random_unit_tangent_bundle(&mut stream.generator());
            Ok(MeasureSample {
                element: SampleElement::Line(LineEmbedding::new(n, &u.base, &u.components)?),
                weight: w,
                stream,
            })
        })
        .collect()
}

pub fn sample_planes<T: Scalar>(n: usize, k: usize, seed: u64) -> Result<Vec<MeasureSample<T>>> {
    if n < 3 || k == 0 {
        return Err(GeometryError::Domain("plane sampling needs n ≥ 3 and K ≥ 1".into()));
    }
    let w = plane_family_mass::<T>(n) / T::of_usize(k);
    let root = RngStream::new(seed);
    (0..k)
        .map(|i| {
            let stream = root.split(i as u64);
            let mut rng = stream.generator();
            let frame = loop {
                let g: Vec<Vec<T>> = (0..3).map(|_| rng.gaussian_vec(n + 1)).collect();
                let q = linalg::gram_schmidt(&g);
                if q.len() == 3 {
                    break [q[0].clone(), q[1].clone(), q[2].clone()];
                }
            };
            Ok(MeasureSample {
                element: SampleElement::Plane(PlaneEmbedding { n, frame }),
                weight: w,
                stream,
            })
        })
        .collect()
}

/// Weighted Monte Carlo average over a sample batch.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleAverage<T> {
    /// `factor · Σ w_i f_i`.
    pub value: T,
    pub std_error: T,
    /// `Σ w_i`.
    pub mass: T,
    /// The per-sample values `f_i`.
    pub values: Vec<T>,
}

impl<T: Scalar> SampleAverage<T> {
    fn from_values(values: Vec<T>, weights: &[T], factor: T) -> Self {
        let mass: T = weights.iter().copied().sum();
        let value = factor * values.iter().zip(weights).map(|(&v, &w)| v * w).sum::<T>();
        let k = T::of_usize(values.len());
        let mean = values.iter().copied().sum::<T>() / k;
        let var = values.iter().map(|&v| (v - mean) * (v - mean)).sum::<T>() / (k - T::one()).max(T::one());
        Self {
            value,
            std_error: factor * mass * (var / k).sqrt(),
            mass,
            values,
        }
    }

    pub fn mean(&self) -> T {
        self.values.iter().copied().sum::<T>() / T::of_usize(self.values.len())
    }

    /// `max_i |f_i - mean|`.
    pub fn max_deviation(&self) -> T {
        let m = self.mean();
        self.values.iter().fold(T::zero(), |a, &v| a.max((v - m).abs()))
    }
}

fn require_cp<T: Scalar>(f: &MapObject<T>) -> Result<usize> {
    match f.domain {
        ModelManifold::ComplexProjective { n } => Ok(n),
        _ => Err(GeometryError::Domain(format!(
            "{} is not defined on a complex projective space",
            f.label
        ))),
    }
}

fn require_rp<T: Scalar>(f: &MapObject<T>) -> Result<usize> {
    match f.domain {
        ModelManifold::RealProjective { dim, radius } if radius == T::one() => Ok(dim),
        _ => Err(GeometryError::Domain(format!(
            "{} is not defined on a unit real projective space",
            f.label
        ))),
    }
}

/// Energies `E_2(F|_P)` of the restrictions of `F` to `K` random lines.
pub fn restricted_line_energies<T: Scalar>(
    f: &MapObject<T>,
    k: usize,
    line_level: usize,
    seed: u64,
) -> Result<(Vec<MeasureSample<T>>, Vec<T>)> {
    let n = require_cp(f)?;
    let samples = sample_lines::<T>(n, k, seed)?;
    let grid = mesh_grid(&ModelManifold::complex_projective(1), line_level)?;
    let energies = samples
        .par_iter()
        .map(|s| match &s.element {
            SampleElement::Line(l) => {
                let g = MapObject::compose(f, &l.embedding())?;
                Ok(p_energy(&g, &grid, T::of(2.0))?.value())
            }
            _ => unreachable!("line sampler returns lines"),
        })
        .collect::<Result<Vec<T>>>()?;
    Ok((samples, energies))
}

/// `(N!/π^{N-1}) ∫_L E_2(F|_P) dP`.
pub fn line_energy_average<T: Scalar>(
    f: &MapObject<T>,
    k: usize,
    line_level: usize,
    seed: u64,
) -> Result<SampleAverage<T>> {
    let n = require_cp(f)?;
    let (samples, energies) = restricted_line_energies(f, k, line_level, seed)?;
    let weights: Vec<T> = samples.iter().map(|s| s.weight).collect();
    let factor = factorial::<T>(n) / T::PI().powi(n as i32 - 1);
    Ok(SampleAverage::from_values(energies, &weights, factor))
}

/// Mean and maximal deviation of the restricted line energies.
pub fn line_energy_spread<T: Scalar>(f: &MapObject<T>, k: usize, seed: u64) -> Result<(T, T)> {
    let (samples, energies) = restricted_line_energies(f, k, RESTRICTION_LEVEL, seed)?;
    let weights: Vec<T> = samples.iter().map(|s| s.weight).collect();
    let avg = SampleAverage::from_values(energies, &weights, T::one());
    Ok((avg.mean(), avg.max_deviation()))
}

/// `(√n / (2σ(n-1))) ∫_G |F∘γ| dγ`, the lower bound for `E_1(F)` on `RP^n`.
pub fn e1_geodesic_bound<T: Scalar>(f: &MapObject<T>, k: usize, seed: u64) -> Result<SampleAverage<T>> {
    let n = require_rp(f)?;
    let samples = sample_geodesics::<T>(n, k, seed)?;
    let lengths = samples
        .par_iter()
        .map(|s| match &s.element {
            SampleElement::Geodesic(g) => curve_length(f, g, LENGTH_STEPS),
            _ => unreachable!("geodesic sampler returns geodesics"),
        })
        .collect::<Result<Vec<T>>>()?;
    let weights: Vec<T> = samples.iter().map(|s| s.weight).collect();
    let factor = T::of_usize(n).sqrt() / (T::of(2.0) * sphere_volume::<T>(n - 1));
    Ok(SampleAverage::from_values(lengths, &weights, factor))
}

/// `∫_H E_2(F|_Q) dQ` over totally geodesic `RP^2 ⊂ RP^n`.
pub fn rp2_family_average<T: Scalar>(f: &MapObject<T>, k: usize, seed: u64) -> Result<SampleAverage<T>> {
    let n = require_rp(f)?;
    let samples = sample_planes::<T>(n, k, seed)?;
    let grid = mesh_grid(&ModelManifold::real_projective(2), RESTRICTION_LEVEL)?;
    let energies = samples
        .par_iter()
        .map(|s| match &s.element {
            SampleElement::Plane(q) => {
                let g = MapObject::compose(f, &q.embedding())?;
                Ok(p_energy(&g, &grid, T::of(2.0))?.value())
            }
            _ => unreachable!("plane sampler returns planes"),
        })
        .collect::<Result<Vec<T>>>()?;
    let weights: Vec<T> = samples.iter().map(|s| s.weight).collect();
    Ok(SampleAverage::from_values(energies, &weights, T::one()))
}
