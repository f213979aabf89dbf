//! Quadrature grids on model manifolds and on unit tangent spheres.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::frame::TangentFrame;
use super::mesh::SphereMesh;
use crate::error::{GeometryError, Result};
use crate::linalg;
use crate::manifolds::{ModelManifold, Point};
use crate::rng::RngStream;
use crate::scalar::{sphere_volume, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridScheme {
    Mesh,
    MonteCarlo,
    ProductAngles,
}

impl GridScheme {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Mesh => "mesh",
            Self::MonteCarlo => "monte_carlo",
            Self::ProductAngles => "product_angles",
        }
    }
}

/// Weighted node set approximating the Riemannian volume of a manifold.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureGrid<T> {
    pub manifold: ModelManifold<T>,
    pub nodes: Vec<Point<T>>,
    pub weights: Vec<T>,
    pub total_mass: T,
    pub scheme: GridScheme,
    pub resolution: usize,
    pub seed: Option<u64>,
}

impl<T: Scalar> QuadratureGrid<T> {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn weight_sum(&self) -> T {
        self.weights.iter().copied().sum()
    }

    /// `Σ w_k f(x_k)` for a plain function of the node.
    pub fn integrate(&self, f: impl Fn(&Point<T>) -> T) -> T {
        self.nodes.iter().zip(&self.weights).map(|(x, &w)| w * f(x)).sum()
    }

    /// Writes one node per line (`x0, x1, ..., weight`) with 17 significant digits.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let d = self.manifold.ambient_dim();
        let mut header: Vec<String> = (0..d).map(|i| format!("x{i}")).collect();
        header.push("weight".into());
        w.write_record(&header)?;
        for (x, &wt) in self.nodes.iter().zip(&self.weights) {
            let mut row: Vec<String> = x.coords.iter().map(|c| format!("{:.16e}", c.to_f64_lossy())).collect();
            row.push(format!("{:.16e}", wt.to_f64_lossy()));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads a grid written by [`write_csv`](Self::write_csv).
    pub fn read_csv<R: Read>(manifold: ModelManifold<T>, scheme: GridScheme, reader: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(reader);
        let d = manifold.ambient_dim();
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for rec in r.records() {
            let rec = rec?;
            if rec.len() != d + 1 {
                return Err(GeometryError::Io(format!(
                    "expected {} columns, found {}",
                    d + 1,
                    rec.len()
                )));
            }
            let vals: Vec<f64> = rec
                .iter()
                .map(|s| s.trim().parse::<f64>().map_err(|e| GeometryError::Io(e.to_string())))
                .collect::<Result<_>>()?;
            let coords: Vec<T> = vals[..d].iter().map(|&v| T::of(v)).collect();
            nodes.push(Point {
                coords,
                canonical: true,
            });
            weights.push(T::of(vals[d]));
        }
        let total_mass = weights.iter().copied().sum();
        let resolution = nodes.len();
        Ok(Self {
            manifold,
            nodes,
            weights,
            total_mass,
            scheme,
            resolution,
            seed: None,
        })
    }
}

/// Builds a grid on `m`.
///
/// * `MonteCarlo`: `resolution` uniform samples, each of weight `volume/resolution`.
/// * `Mesh`: icosphere of level `resolution`; available on `S^2(r)`, `RP^2(r)` and `CP^1`.
/// * `ProductAngles`: `resolution` Gauss-Legendre nodes in the polar angle about
///   `e_0` times a level-2 icosphere; available on `S^3(r)` and `RP^3(r)`.
pub fn build_grid<T: Scalar>(
    m: &ModelManifold<T>,
    resolution: usize,
    scheme: GridScheme,
    seed: u64,
) -> Result<QuadratureGrid<T>> {
    if resolution == 0 {
        return Err(GeometryError::Domain("grid resolution must be positive".into()));
    }
    match scheme {
        GridScheme::MonteCarlo => Ok(monte_carlo_grid(m, resolution, RngStream::new(seed))),
        GridScheme::Mesh => mesh_grid(m, resolution),
        GridScheme::ProductAngles => product_angles_grid(m, resolution, 2, &[]),
    }
}

pub fn monte_carlo_grid<T: Scalar>(m: &ModelManifold<T>, k: usize, stream: RngStream) -> QuadratureGrid<T> {
    let mut rng = stream.generator();
    let nodes: Vec<Point<T>> = (0..k).map(|_| m.random_point(&mut rng)).collect();
    let vol = m.volume();
    QuadratureGrid {
        manifold: m.clone(),
        nodes,
        weights: vec![vol / T::of_usize(k); k],
        total_mass: vol,
        scheme: GridScheme::MonteCarlo,
        resolution: k,
        seed: Some(stream.seed),
    }
}

/// Lift of a unit vector of `S^2` to `C^2` under the identification `S^2(1/2) ≅ CP^1`.
pub fn sphere_to_cp1<T: Scalar>(v: &[T]) -> Vec<T> {
    let (x, y, z) = (v[0], v[1], v[2]);
    if z > -T::of(0.5) {
        vec![T::one() + z, T::zero(), x, y]
    } else {
        vec![x, -y, T::one() - z, T::zero()]
    }
}

pub fn mesh_grid<T: Scalar>(m: &ModelManifold<T>, level: usize) -> Result<QuadratureGrid<T>> {
    let mesh = SphereMesh::<T>::icosphere(level);
    let (nodes, weights): (Vec<Point<T>>, Vec<T>) = match m {
        ModelManifold::Sphere { dim: 2, radius } => mesh
            .vertices
            .iter()
            .zip(&mesh.vertex_areas)
            .map(|(v, &a)| (m.point(v).expect("unit vertex"), a * *radius * *radius))
            .unzip(),
        ModelManifold::RealProjective { dim: 2, radius } => {
            // each antipodal pair contributes the cell of its canonical member
            let mut nodes = Vec::new();
            let mut weights = Vec::new();
            for (v, &a) in mesh.vertices.iter().zip(&mesh.vertex_areas) {
                let p = m.point(v).expect("unit vertex");
                if linalg::dot(&p.coords, v) > T::zero() {
                    nodes.push(p);
                    weights.push(a * *radius * *radius);
                }
            }
            (nodes, weights)
        }
        ModelManifold::ComplexProjective { n: 1 } => mesh
            .vertices
            .iter()
            .zip(&mesh.vertex_areas)
            .map(|(v, &a)| (m.point(&sphere_to_cp1(v)).expect("nonzero lift"), a / T::of(4.0)))
            .unzip(),
        _ => {
            return Err(GeometryError::Domain(format!(
                "mesh grids exist on S2, RP2 and CP1, not {}",
                m.label()
            )))
        }
    };
    let total_mass = weights.iter().copied().sum();
    Ok(QuadratureGrid {
        manifold: m.clone(),
        nodes,
        weights,
        total_mass,
        scheme: GridScheme::Mesh,
        resolution: level,
        seed: None,
    })
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 {
                1.0
            } else if n == 1 {
                x
            } else {
                p1
            };
            let pnm1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pnm1) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Grid on `S^3(r)` or `RP^3(r)` in polar coordinates about `e_0`:
/// composite Gauss-Legendre in the polar angle (`n_psi` nodes per subinterval,
/// split at `breakpoints`) times an icosphere of the given level. Weights are
/// renormalized so the total mass is the exact volume.
pub fn product_angles_grid<T: Scalar>(
    m: &ModelManifold<T>,
    n_psi: usize,
    sphere_level: usize,
    breakpoints: &[T],
) -> Result<QuadratureGrid<T>> {
    let top = match m {
        ModelManifold::Sphere { dim: 3, .. } => std::f64::consts::PI,
        ModelManifold::RealProjective { dim: 3, .. } => std::f64::consts::FRAC_PI_2,
        _ => {
            return Err(GeometryError::Domain(format!(
                "product-angle grids exist on S3 and RP3, not {}",
                m.label()
            )))
        }
    };
    let mut cuts: Vec<f64> = vec![0.0];
    let mut inner: Vec<f64> = breakpoints
        .iter()
        .map(|b| b.to_f64_lossy())
        .filter(|&b| b > 1e-12 && b < top - 1e-12)
        .collect();
    inner.sort_by(|a, b| a.partial_cmp(b).expect("finite breakpoints"));
    cuts.extend(inner);
    cuts.push(top);
    let (gx, gw) = gauss_legendre(n_psi);
    let mesh = SphereMesh::<f64>::icosphere(sphere_level);
    let mut nodes = Vec::new();
    let mut raw_weights = Vec::new();
    for seg in cuts.windows(2) {
        let (a, b) = (seg[0], seg[1]);
        let half = (b - a) / 2.0;
        for (x, w) in gx.iter().zip(&gw) {
            let psi = a + half * (x + 1.0);
            let radial = w * half * psi.sin().powi(2);
            for (v, area) in mesh.vertices.iter().zip(&mesh.vertex_areas) {
                let coords = [psi.cos(), psi.sin() * v[0], psi.sin() * v[1], psi.sin() * v[2]];
                let c: Vec<T> = coords.iter().map(|&c| T::of(c)).collect();
                nodes.push(m.point(&c)?);
                raw_weights.push(radial * area);
            }
        }
    }
    let vol = m.volume();
    let s: f64 = raw_weights.iter().sum();
    let weights: Vec<T> = raw_weights.iter().map(|w| T::of(w / s) * vol).collect();
    Ok(QuadratureGrid {
        manifold: m.clone(),
        nodes,
        weights,
        total_mass: vol,
        scheme: GridScheme::ProductAngles,
        resolution: n_psi,
        seed: None,
    })
}

/// Weighted direction set on the unit sphere of `T_x M`.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentQuadrature<T> {
    pub directions: Vec<Vec<T>>,
    pub weights: Vec<T>,
}

impl<T: Scalar> TangentQuadrature<T> {
    pub fn total_weight(&self) -> T {
        self.weights.iter().copied().sum()
    }
}

/// Direction quadrature on the unit tangent sphere at `x`, exact for polynomials
/// of degree `order` in the direction components. Total weight `σ(dim-1)`.
///
/// In dimension 2 this is `order + 1` (at least 3) equally spaced angles; in
/// higher dimension the vertices of a regular simplex together with their
/// negatives (exact through degree 3).
pub fn unit_tangent_quadrature<T: Scalar>(
    m: &ModelManifold<T>,
    x: &Point<T>,
    order: usize,
) -> Result<TangentQuadrature<T>> {
    if order < 2 {
        return Err(GeometryError::Domain(
            "tangent quadrature order must be at least 2".into(),
        ));
    }
    let d = m.dim();
    let frame = TangentFrame::standard(m, x)?;
    let total = sphere_volume::<T>(d - 1);
    let combine = |c: &[T]| -> Vec<T> {
        let mut out = vec![T::zero(); m.ambient_dim()];
        for (coef, e) in c.iter().zip(&frame.vectors) {
            out = linalg::axpy(&out, *coef, e);
        }
        out
    };
    let coeffs: Vec<Vec<T>> = match d {
        1 => vec![vec![T::one()], vec![-T::one()]],
        2 => {
            let n = (order + 1).max(3);
            (0..n)
                .map(|k| {
                    let a = T::of(2.0 * std::f64::consts::PI * k as f64 / n as f64);
                    vec![a.cos(), a.sin()]
                })
                .collect()
        }
        _ => {
            if order > 3 {
                return Err(GeometryError::Domain(format!(
                    "tangent quadrature of order {order} is not available in dimension {d}"
                )));
            }
            let simplex = regular_simplex::<T>(d);
            let mut all = simplex.clone();
            all.extend(simplex.iter().map(|v| linalg::scale(v, -T::one())));
            all
        }
    };
    let n = coeffs.len();
    Ok(TangentQuadrature {
        directions: coeffs.iter().map(|c| combine(c)).collect(),
        weights: vec![total / T::of_usize(n); n],
    })
}

/// Unit vertices of a regular simplex centered at the origin of `R^d`.
pub fn regular_simplex<T: Scalar>(d: usize) -> Vec<Vec<T>> {
    // e_i - centroid in R^{d+1}, expressed in an orthonormal basis of the hyperplane
    let c = T::one() / T::of_usize(d + 1);
    let pts: Vec<Vec<T>> = (0..=d)
        .map(|i| (0..=d).map(|j| if i == j { T::one() - c } else { -c }).collect())
        .collect();
    let basis = linalg::gram_schmidt(&pts[..d]);
    pts.iter()
        .map(|p| {
            let v: Vec<T> = basis.iter().map(|b| linalg::dot(b, p)).collect();
            linalg::normalized(&v).expect("nonzero simplex vertex")
        })
        .collect()
}
