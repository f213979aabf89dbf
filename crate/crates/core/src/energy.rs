//! Scalar functionals of maps: p-energies, averaged densities, pulled-back
//! volumes, curve lengths and the elementary volume bound.

use log::warn;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{GeometryError, Result};
use crate::intgeo::GeodesicLoop;
use crate::linalg;
use crate::manifolds::Point;
use crate::maps::{
    pullback_gram, unit_tangent_quadrature, GramMatrix, GridScheme, MapObject, QuadratureGrid, TangentFrame,
    DEFAULT_STEP,
};
use crate::scalar::{sphere_volume, Scalar};

/// A grid integral with its provenance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Estimate<T> {
    pub value: T,
    pub scheme: GridScheme,
    pub resolution: usize,
    pub seed: Option<u64>,
    /// Present iff the grid is Monte Carlo.
    pub std_error: Option<T>,
    pub nodes: usize,
    /// Nodes that requested a resample (cut locus, singular lift); their mass is redistributed.
    pub dropped: usize,
}

impl<T: Scalar> Estimate<T> {
    pub fn dropped_fraction(&self) -> f64 {
        if self.nodes == 0 {
            0.0
        } else {
            self.dropped as f64 / self.nodes as f64
        }
    }

    pub fn accuracy_warning(&self) -> bool {
        self.dropped_fraction() > 0.01
    }

    /// Standard error, or zero for deterministic grids.
    pub fn sigma(&self) -> T {
        self.std_error.unwrap_or(T::zero())
    }
}

/// `E_p(F)` with grid provenance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyValue<T> {
    pub p: T,
    #[serde(flatten)]
    pub estimate: Estimate<T>,
}

impl<T: Scalar> EnergyValue<T> {
    pub fn value(&self) -> T {
        self.estimate.value
    }
}

/// `Σ w_k f(x_k)` evaluated in parallel with a deterministic reduction order.
/// Nodes whose evaluation asks for a resample are dropped and the remaining mass
/// is rescaled to the grid's total.
pub fn integrate<T, F>(grid: &QuadratureGrid<T>, f: F) -> Result<Estimate<T>>
where
    T: Scalar,
    F: Fn(&Point<T>) -> Result<T> + Sync,
{
    let values: Vec<Result<T>> = grid.nodes.par_iter().map(&f).collect();
    let mut kept = Vec::with_capacity(values.len());
    let mut dropped = 0;
    for (v, &w) in values.into_iter().zip(&grid.weights) {
        match v {
            Ok(v) => kept.push((v, w)),
            Err(e) if e.is_resample() => dropped += 1,
            Err(e) => return Err(e),
        }
    }
    if kept.is_empty() {
        return Err(GeometryError::Resample("every quadrature node failed".into()));
    }
    let mass: T = kept.iter().map(|&(_, w)| w).sum();
    let scale = grid.total_mass / mass;
    let value = kept.iter().map(|&(v, w)| v * w).sum::<T>() * scale;
    let std_error = (grid.scheme == GridScheme::MonteCarlo).then(|| {
        let k = T::of_usize(kept.len());
        let mean = kept.iter().map(|&(v, _)| v).sum::<T>() / k;
        let var = kept.iter().map(|&(v, _)| (v - mean) * (v - mean)).sum::<T>() / (k - T::one()).max(T::one());
        grid.total_mass * (var / k).sqrt()
    });
    let est = Estimate {
        value,
        scheme: grid.scheme,
        resolution: grid.resolution,
        seed: grid.seed,
        std_error,
        nodes: grid.len(),
        dropped,
    };
    if est.accuracy_warning() {
        warn!(
            "{:.2}% of quadrature nodes were dropped on {}",
            100.0 * est.dropped_fraction(),
            grid.manifold.label()
        );
    }
    Ok(est)
}

/// `|dF_x|²`, the trace of the pullback Gram matrix.
pub fn energy_density<T: Scalar>(g: &GramMatrix<T>) -> T {
    g.trace()
}

fn check_domain<T: Scalar>(f: &MapObject<T>, grid: &QuadratureGrid<T>) -> Result<()> {
    if f.domain != grid.manifold {
        return Err(GeometryError::Domain(format!(
            "grid lives on {} but {} is defined on {}",
            grid.manifold.label(),
            f.label,
            f.domain.label()
        )));
    }
    Ok(())
}

/// Pullback Gram matrix in the standard frame at `x`.
pub fn gram_at<T: Scalar>(f: &MapObject<T>, x: &Point<T>) -> Result<GramMatrix<T>> {
    let frame = TangentFrame::standard(&f.domain, x)?;
    pullback_gram(f, x, &frame, T::of(DEFAULT_STEP))
}

/// `E_p(F) = ½ ∫ |dF|^p`.
pub fn p_energy<T: Scalar>(f: &MapObject<T>, grid: &QuadratureGrid<T>, p: T) -> Result<EnergyValue<T>> {
    if p < T::one() {
        return Err(GeometryError::Domain(format!("energy exponent p = {p} is below 1")));
    }
    check_domain(f, grid)?;
    let half_p = p / T::of(2.0);
    let est = integrate(grid, |x| {
        let d = energy_density(&gram_at(f, x)?);
        Ok(d.powf(half_p) / T::of(2.0))
    })?;
    Ok(EnergyValue { p, estimate: est })
}

/// Averaged unit-sphere density `n/σ(n-1) ∫_{U_x} |dF(u)|² du` by tangent-sphere quadrature.
pub fn croke_density<T: Scalar>(f: &MapObject<T>, x: &Point<T>, order: usize) -> Result<T> {
    let q = unit_tangent_quadrature(&f.domain, x, order)?;
    let (_, cols) = f.push_forward(x, &q.directions)?;
    let n = f.domain.dim();
    let s: T = cols.iter().zip(&q.weights).map(|(c, &w)| w * linalg::dot(c, c)).sum();
    Ok(T::of_usize(n) / sphere_volume::<T>(n - 1) * s)
}

/// `∫ sqrt(det(dFᵀ dF))`.
pub fn pullback_volume<T: Scalar>(f: &MapObject<T>, grid: &QuadratureGrid<T>) -> Result<Estimate<T>> {
    check_domain(f, grid)?;
    integrate(grid, |x| Ok(gram_at(f, x)?.volume_density()))
}

/// Area of a map from a surface (pullback volume in dimension 2).
pub fn surface_area<T: Scalar>(f: &MapObject<T>, grid: &QuadratureGrid<T>) -> Result<Estimate<T>> {
    if f.domain.dim() != 2 {
        return Err(GeometryError::Domain(format!(
            "surface area needs a 2-dimensional domain, {} has dimension {}",
            f.domain.label(),
            f.domain.dim()
        )));
    }
    pullback_volume(f, grid)
}

/// `n^{p/2} V_F^{p/n} / (2 Vol^{(p-n)/n})` for `p ≥ n`.
pub fn elementary_bound<T: Scalar>(p: T, n: usize, vol_domain: T, pullback_vol: T) -> Result<T> {
    let nf = T::of_usize(n);
    if p < nf {
        return Err(GeometryError::Domain(format!(
            "elementary bound needs p ≥ n, got p = {p}, n = {n}"
        )));
    }
    if vol_domain <= T::zero() || pullback_vol < T::zero() {
        return Err(GeometryError::Domain("volumes must be positive".into()));
    }
    Ok(nf.powf(p / T::of(2.0)) * pullback_vol.powf(p / nf) / (T::of(2.0) * vol_domain.powf((p - nf) / nf)))
}

/// Length of `F∘γ` by the periodic trapezoid rule on `|(F∘γ)'|`; segments where the
/// differential is unavailable use the chord `d(F(γ(t_i)), F(γ(t_{i+1})))`.
pub fn curve_length<T: Scalar>(f: &MapObject<T>, gamma: &GeodesicLoop<T>, steps: usize) -> Result<T> {
    let steps = steps.max(3);
    let dt = gamma.period() / T::of_usize(steps);
    let samples: Vec<(Point<T>, Option<T>)> = (0..steps)
        .map(|i| {
            let t = dt * T::of_usize(i);
            let (x, v) = gamma.point_and_velocity(t)?;
            let speed = f.push_forward(&x, &[v]).ok().map(|(_, c)| linalg::norm(&c[0]));
            Ok((x, speed))
        })
        .collect::<Result<_>>()?;
    let mut total = T::zero();
    for i in 0..steps {
        let j = (i + 1) % steps;
        match (samples[i].1, samples[j].1) {
            (Some(a), Some(b)) => total = total + dt * (a + b) / T::of(2.0),
            _ => {
                let a = f.evaluate(&samples[i].0)?;
                let b = f.evaluate(&samples[j].0)?;
                total = total + f.codomain.distance(&a, &b);
            }
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifolds::ModelManifold;
    use crate::maps::build_grid;
    use std::f64::consts::PI;

    #[test]
    fn density_arithmetic() {
        let g = GramMatrix::<f64>::from_columns(&[vec![3.0, 0.0], vec![0.0, 4.0]]);
        assert!((energy_density(&g) - 25.0).abs() < 1e-13);
        let id = GramMatrix::from_columns(&[
            vec![1.0, 0.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0, 0.0],
            vec![0.0, 0.0, 1.0, 0.0],
            vec![0.0, 0.0, 0.0, 1.0],
        ]);
        assert_eq!(energy_density(&id), 4.0);
    }

    #[test]
    fn elementary_bound_examples() {
        let four_pi = 4.0 * PI;
        assert!((elementary_bound(2.0, 2, four_pi, four_pi).unwrap() - four_pi).abs() < 1e-12);
        assert!((elementary_bound(4.0, 2, four_pi, four_pi).unwrap() - 8.0 * PI).abs() < 1e-12);
        let v = PI * PI / 2.0;
        assert!((elementary_bound(4.0, 4, v, v).unwrap() - 4.0 * PI * PI).abs() < 1e-12);
        assert!(elementary_bound(1.0, 2, four_pi, four_pi).is_err());
    }

    #[test]
    fn croke_on_linear_differential() {
        // F(x) = diagonal stretch seen through the lift; at the pole the differential is diag(3, 4)
        let m = ModelManifold::<f64>::sphere(2);
        let f = MapObject::new(m.clone(), m.clone(), "probe", |x| Ok(x.clone())).with_pushforward(|x, vs| {
            Ok((
                x.clone(),
                vs.iter().map(|v| vec![3.0 * v[0], 4.0 * v[1], 0.0]).collect(),
            ))
        });
        let x = m.point(&[0.0, 0.0, 1.0]).unwrap();
        let c = croke_density(&f, &x, 2).unwrap();
        assert!((c - 25.0).abs() < 1e-12);
    }

    #[test]
    fn constant_map_energies_vanish() {
        let m = ModelManifold::<f64>::real_projective(2);
        let p = m.point(&[1.0, 0.0, 0.0]).unwrap();
        let f = MapObject::constant(m.clone(), m.clone(), p);
        let g = build_grid(&m, 2, GridScheme::Mesh, 0).unwrap();
        assert_eq!(p_energy(&f, &g, 2.0).unwrap().value(), 0.0);
        assert_eq!(pullback_volume(&f, &g).unwrap().value, 0.0);
    }

    #[test]
    fn p_below_one_is_rejected() {
        let m = ModelManifold::<f64>::sphere(2);
        let g = build_grid(&m, 1, GridScheme::Mesh, 0).unwrap();
        assert!(p_energy(&MapObject::identity(m), &g, 0.5).is_err());
    }

    #[test]
    fn grid_must_match_domain() {
        let g = build_grid(&ModelManifold::<f64>::sphere(2), 1, GridScheme::Mesh, 0).unwrap();
        let f = MapObject::identity(ModelManifold::<f64>::real_projective(2));
        assert!(p_energy(&f, &g, 2.0).is_err());
    }
}
