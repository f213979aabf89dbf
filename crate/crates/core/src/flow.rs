//! Discrete harmonic map flow on triangulated `S^2` and `RP^2`.

use std::io::{Read, Write};
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{GeometryError, Result};
use crate::linalg;
use crate::manifolds::{ModelManifold, Point};
use crate::maps::{MapObject, SphereMesh};
use crate::scalar::Scalar;

/// Maximum number of step halvings per iteration before the flow reports a stall.
pub const MAX_HALVINGS: usize = 10;
/// Iterations of weighted exp/log averaging in [`MeshMap::interpolate`].
pub const AVERAGING_ITERATIONS: usize = 3;

/// A map sampled at the vertices of a triangulated domain.
#[derive(Debug, Clone)]
pub struct MeshMap<T> {
    pub domain: ModelManifold<T>,
    pub codomain: ModelManifold<T>,
    pub vertices: Vec<Point<T>>,
    pub triangles: Vec<[usize; 3]>,
    /// Dual cell areas.
    pub areas: Vec<T>,
    /// Cotangent weights `(i, j, w_ij)` with `i < j`.
    pub edges: Vec<(usize, usize, T)>,
    pub images: Vec<Point<T>>,
    neighbors: Vec<Vec<(usize, T)>>,
    incident: Vec<Vec<usize>>,
}

fn unit_surface<T: Scalar>(m: &ModelManifold<T>) -> Result<()> {
    match m {
        ModelManifold::Sphere { dim: 2, radius } | ModelManifold::RealProjective { dim: 2, radius }
            if *radius == T::one() =>
        {
            Ok(())
        }
        _ => Err(GeometryError::Domain(format!(
            "mesh domains are unit S2 or RP2, not {}",
            m.label()
        ))),
    }
}

/// Vertices, triangles and vertex areas.
pub type DomainMesh<T> = (Vec<Point<T>>, Vec<[usize; 3]>, Vec<T>);

/// Vertices, triangles and areas of the level-`level` icosphere, or of its
/// antipodal quotient for `RP^2` (one canonical vertex per pair, one triangle per pair).
pub fn domain_mesh<T: Scalar>(domain: &ModelManifold<T>, level: usize) -> Result<DomainMesh<T>> {
    unit_surface(domain)?;
    let mesh = SphereMesh::<T>::icosphere(level);
    if let ModelManifold::Sphere { .. } = domain {
        let vertices = mesh
            .vertices
            .iter()
            .map(|v| domain.point(v))
            .collect::<Result<Vec<_>>>()?;
        return Ok((vertices, mesh.triangles.clone(), mesh.vertex_areas.clone()));
    }
    let antipode = mesh.antipodes();
    let mut class = vec![usize::MAX; mesh.vertices.len()];
    let mut vertices = Vec::new();
    let mut areas = Vec::new();
    for (i, v) in mesh.vertices.iter().enumerate() {
        let p = domain.point(v)?;
        if linalg::dot(&p.coords, v) > T::zero() {
            class[i] = vertices.len();
            class[antipode[i]] = vertices.len();
            vertices.push(p);
            areas.push(mesh.vertex_areas[i]);
        }
    }
    let mut seen = std::collections::HashSet::new();
    let mut triangles = Vec::new();
    for t in &mesh.triangles {
        let c = [class[t[0]], class[t[1]], class[t[2]]];
        let mut key = c;
        key.sort_unstable();
        if seen.insert(key) {
            triangles.push(c);
        }
    }
    Ok((vertices, triangles, areas))
}

/// `(cot_0, cot_1, cot_2, area)` of a flat triangle with side `l_k` opposite vertex `k`.
fn flat_triangle<T: Scalar>(l: [T; 3]) -> Option<([T; 3], T)> {
    let (a, b, c) = (l[0], l[1], l[2]);
    let h = (a + b + c) * (-a + b + c) * (a - b + c) * (a + b - c);
    if !(h > T::zero()) {
        return None;
    }
    let area = h.sqrt() / T::of(4.0);
    let four = T::of(4.0) * area;
    Some((
        [
            (b * b + c * c - a * a) / four,
            (a * a + c * c - b * b) / four,
            (a * a + b * b - c * c) / four,
        ],
        area,
    ))
}

impl<T: Scalar> MeshMap<T> {
    pub fn from_parts(
        domain: ModelManifold<T>,
        codomain: ModelManifold<T>,
        vertices: Vec<Point<T>>,
        triangles: Vec<[usize; 3]>,
        areas: Vec<T>,
        images: Vec<Point<T>>,
    ) -> Result<Self> {
        unit_surface(&domain)?;
        let n = vertices.len();
        if areas.len() != n || images.len() != n {
            return Err(GeometryError::Domain(format!(
                "{n} vertices but {} areas and {} images",
                areas.len(),
                images.len()
            )));
        }
        if let Some(t) = triangles.iter().find(|t| t.iter().any(|&k| k >= n)) {
            return Err(GeometryError::Domain(format!(
                "triangle {t:?} references a missing vertex"
            )));
        }
        let mut acc: std::collections::BTreeMap<(usize, usize), T> = Default::default();
        let mut incident = vec![Vec::new(); n];
        for (ti, t) in triangles.iter().enumerate() {
            let side = |i: usize, j: usize| domain.distance(&vertices[t[i]], &vertices[t[j]]);
            let l = [side(1, 2), side(2, 0), side(0, 1)];
            let (cot, _) =
                flat_triangle(l).ok_or_else(|| GeometryError::Domain(format!("degenerate domain triangle {t:?}")))?;
            for k in 0..3 {
                let (i, j) = (t[(k + 1) % 3], t[(k + 2) % 3]);
                let e = acc.entry((i.min(j), i.max(j))).or_insert(T::zero());
                *e = *e + cot[k] / T::of(2.0);
                incident[t[k]].push(ti);
            }
        }
        let edges: Vec<(usize, usize, T)> = acc.into_iter().map(|((i, j), w)| (i, j, w)).collect();
        let mut neighbors = vec![Vec::new(); n];
        for &(i, j, w) in &edges {
            neighbors[i].push((j, w));
            neighbors[j].push((i, w));
        }
        Ok(Self {
            domain,
            codomain,
            vertices,
            triangles,
            areas,
            edges,
            images,
            neighbors,
            incident,
        })
    }

    /// Samples `f` at the vertices of the level-`level` mesh of its domain.
    pub fn sample(f: &MapObject<T>, level: usize) -> Result<Self> {
        let (vertices, triangles, areas) = domain_mesh(&f.domain, level)?;
        let images = vertices.par_iter().map(|x| f.evaluate(x)).collect::<Result<Vec<_>>>()?;
        Self::from_parts(f.domain.clone(), f.codomain.clone(), vertices, triangles, areas, images)
    }

    pub fn total_area(&self) -> T {
        self.areas.iter().copied().sum()
    }

    pub fn image_residual(&self) -> T {
        self.images.iter().fold(T::zero(), |m, p| m.max(p.norm_residual()))
    }

    pub fn with_images(&self, images: Vec<Point<T>>) -> Self {
        Self { images, ..self.clone() }
    }

    /// `½ Σ_edges w_ij d(F_i, F_j)²`.
    pub fn discrete_energy(&self) -> T {
        self.edges
            .iter()
            .map(|&(i, j, w)| {
                let d = self.codomain.distance(&self.images[i], &self.images[j]);
                w * d * d
            })
            .sum::<T>()
            / T::of(2.0)
    }

    /// `τ_i = (1/A_i) Σ_j w_ij log_{F_i} F_j`, tangent at `F_i`.
    pub fn discrete_tension(&self) -> Result<Vec<Vec<T>>> {
        (0..self.vertices.len())
            .into_par_iter()
            .map(|i| {
                let y = &self.images[i];
                let mut s = vec![T::zero(); y.coords.len()];
                for &(j, w) in &self.neighbors[i] {
                    let l = self.codomain.log_raw(y, &self.images[j].coords)?;
                    s = linalg::axpy(&s, w, &l);
                }
                Ok(linalg::scale(&s, T::one() / self.areas[i]))
            })
            .collect()
    }

    /// Area-weighted mean of `|σ_1 - σ_2| / (σ_1 + σ_2 + ε)` over triangles, from the
    /// affine map between flat triangles with geodesic side lengths.
    pub fn conformality_defect(&self) -> ConformalityDefect<T> {
        let eps = T::of(1e-12);
        let mut total = T::zero();
        let mut weight = T::zero();
        let mut skipped = 0;
        for t in &self.triangles {
            let dl = |i: usize, j: usize| self.domain.distance(&self.vertices[t[i]], &self.vertices[t[j]]);
            let il = |i: usize, j: usize| self.codomain.distance(&self.images[t[i]], &self.images[t[j]]);
            let (Some(p), Some(q)) = (
                planar(dl(0, 1), dl(1, 2), dl(2, 0)),
                planar_or_flat(il(0, 1), il(1, 2), il(2, 0)),
            ) else {
                skipped += 1;
                continue;
            };
            let area = p.1 * p.2 / T::of(2.0);
            // A = Q P^{-1}, P = [(p0, 0), (p1, p2)] columns
            let inv = [[T::one() / p.0, -p.1 / (p.0 * p.2)], [T::zero(), T::one() / p.2]];
            let qm = [[q.0, q.1], [T::zero(), q.2]];
            let mut a = [[T::zero(); 2]; 2];
            for r in 0..2 {
                for c in 0..2 {
                    a[r][c] = qm[r][0] * inv[0][c] + qm[r][1] * inv[1][c];
                }
            }
            let fro = a[0][0] * a[0][0] + a[0][1] * a[0][1] + a[1][0] * a[1][0] + a[1][1] * a[1][1];
            let det = (a[0][0] * a[1][1] - a[0][1] * a[1][0]).abs();
            let disc = (fro * fro - T::of(4.0) * det * det).max(T::zero()).sqrt();
            let s1 = ((fro + disc) / T::of(2.0)).sqrt();
            let s2 = ((fro - disc) / T::of(2.0)).max(T::zero()).sqrt();
            total = total + area * (s1 - s2).abs() / (s1 + s2 + eps);
            weight = weight + area;
        }
        ConformalityDefect {
            value: if weight > T::zero() { total / weight } else { T::zero() },
            skipped,
        }
    }

    /// Continuous map through the mesh: barycentric weights of `x` with respect to
    /// its triangle, then weighted exp/log averaging of the vertex images.
    pub fn interpolate(&self) -> MapObject<T> {
        let mesh = Arc::new(self.clone());
        MapObject::new(
            self.domain.clone(),
            self.codomain.clone(),
            "mesh interpolant",
            move |x| mesh.evaluate_at(x),
        )
        .lipschitz()
    }

    fn evaluate_at(&self, x: &Point<T>) -> Result<Point<T>> {
        let projective = matches!(self.domain, ModelManifold::RealProjective { .. });
        let closeness = |k: usize| {
            let c = linalg::dot(&self.vertices[k].coords, &x.coords);
            if projective {
                c.abs()
            } else {
                c
            }
        };
        let nearest = (0..self.vertices.len())
            .max_by(|&a, &b| {
                closeness(a)
                    .partial_cmp(&closeness(b))
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .ok_or_else(|| GeometryError::Domain("empty mesh".into()))?;
        let mut best: Option<(T, usize, [T; 3])> = None;
        for &ti in &self.incident[nearest] {
            let b = self.barycentric(ti, x);
            let worst = b.iter().fold(T::infinity(), |m, &v| m.min(v));
            if best.as_ref().is_none_or(|(w, _, _)| worst > *w) {
                best = Some((worst, ti, b));
            }
        }
        let (_, ti, b) = best.ok_or_else(|| GeometryError::Domain("isolated vertex".into()))?;
        let t = self.triangles[ti];
        let start = (0..3)
            .max_by(|&i, &j| b[i].partial_cmp(&b[j]).unwrap_or(std::cmp::Ordering::Equal))
            .unwrap();
        let mut m = self.images[t[start]].clone();
        for _ in 0..AVERAGING_ITERATIONS {
            let mut v = vec![T::zero(); m.coords.len()];
            for k in 0..3 {
                let l = self.codomain.log_raw(&m, &self.images[t[k]].coords)?;
                v = linalg::axpy(&v, b[k], &l);
            }
            m = self.codomain.exp_raw(&m, &v)?;
        }
        Ok(m)
    }

    /// Weights `b` with `Σ b_k log_x v_k = 0`, `Σ b_k = 1`.
    fn barycentric(&self, ti: usize, x: &Point<T>) -> [T; 3] {
        let t = self.triangles[ti];
        let l: Vec<Vec<T>> = t
            .iter()
            .map(|&k| {
                let v = &self.vertices[k].coords;
                // align antipodal representatives on RP2
                let v = if linalg::dot(v, &x.coords) < T::zero() {
                    linalg::scale(v, -T::one())
                } else {
                    v.clone()
                };
                self.domain.log_raw(x, &v).unwrap_or_else(|_| vec![T::zero(); 3])
            })
            .collect();
        let det = |a: &[T], b: &[T]| {
            let c = [
                a[1] * b[2] - a[2] * b[1],
                a[2] * b[0] - a[0] * b[2],
                a[0] * b[1] - a[1] * b[0],
            ];
            c[0] * x.coords[0] + c[1] * x.coords[1] + c[2] * x.coords[2]
        };
        let raw = [det(&l[1], &l[2]), det(&l[2], &l[0]), det(&l[0], &l[1])];
        let s = raw[0] + raw[1] + raw[2];
        if s == T::zero() {
            return [T::one() / T::of(3.0); 3];
        }
        [raw[0] / s, raw[1] / s, raw[2] / s]
    }

    /// Writes `x0,x1,x2,area,y0..` rows and `a,b,c` triangle rows.
    pub fn write_csv<W1: Write, W2: Write>(&self, vertices: W1, triangles: W2) -> Result<()> {
        let mut w = csv::Writer::from_writer(vertices);
        let mut header: Vec<String> = ["x0", "x1", "x2", "area"].iter().map(|s| s.to_string()).collect();
        header.extend((0..self.codomain.ambient_dim()).map(|k| format!("y{k}")));
        w.write_record(&header)?;
        for ((x, a), y) in self.vertices.iter().zip(&self.areas).zip(&self.images) {
            let row: Vec<String> = x
                .coords
                .iter()
                .chain(std::iter::once(a))
                .chain(&y.coords)
                .map(|v| format!("{:.16e}", v.to_f64_lossy()))
                .collect();
            w.write_record(&row)?;
        }
        w.flush()?;
        let mut w = csv::Writer::from_writer(triangles);
        w.write_record(["a", "b", "c"])?;
        for t in &self.triangles {
            w.write_record(t.iter().map(|k| k.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R1: Read, R2: Read>(
        domain: ModelManifold<T>,
        codomain: ModelManifold<T>,
        vertices: R1,
        triangles: R2,
    ) -> Result<Self> {
        let ny = codomain.ambient_dim();
        let mut xs = Vec::new();
        let mut areas = Vec::new();
        let mut ys = Vec::new();
        for rec in csv::Reader::from_reader(vertices).records() {
            let rec = rec?;
            let vals: Vec<f64> = rec
                .iter()
                .map(|s| {
                    s.trim()
                        .parse::<f64>()
                        .map_err(|e| GeometryError::Io(format!("bad value {s:?}: {e}")))
                })
                .collect::<Result<_>>()?;
            if vals.len() != 4 + ny {
                return Err(GeometryError::Io(format!(
                    "expected {} columns, found {}",
                    4 + ny,
                    vals.len()
                )));
            }
            let v: Vec<T> = vals.iter().map(|&v| T::of(v)).collect();
            xs.push(domain.point(&v[..3])?);
            areas.push(v[3]);
            ys.push(codomain.point(&v[4..])?);
        }
        let mut tris = Vec::new();
        for rec in csv::Reader::from_reader(triangles).records() {
            let rec = rec?;
            let idx: Vec<usize> = rec
                .iter()
                .map(|s| {
                    s.trim()
                        .parse::<usize>()
                        .map_err(|e| GeometryError::Io(format!("bad index {s:?}: {e}")))
                })
                .collect::<Result<_>>()?;
            if idx.len() != 3 {
                return Err(GeometryError::Io(format!("triangle row with {} entries", idx.len())));
            }
            tris.push([idx[0], idx[1], idx[2]]);
        }
        Self::from_parts(domain, codomain, xs, tris, areas, ys)
    }
}

/// Planar triangle `(0,0), (p0,0), (p1,p2)` with `p2 > 0` from side lengths.
fn planar<T: Scalar>(l01: T, l12: T, l20: T) -> Option<(T, T, T)> {
    let (p0, p1, p2) = planar_or_flat(l01, l12, l20)?;
    (p2 > T::of(1e-14) * p0 * p0).then_some((p0, p1, p2))
}

fn planar_or_flat<T: Scalar>(l01: T, l12: T, l20: T) -> Option<(T, T, T)> {
    if !(l01 > T::zero()) {
        return None;
    }
    let x = (l01 * l01 + l20 * l20 - l12 * l12) / (T::of(2.0) * l01);
    let y2 = l20 * l20 - x * x;
    if y2 < -T::of(1e-12) * l20 * l20 {
        return None;
    }
    Some((l01, x, y2.max(T::zero()).sqrt()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConformalityDefect<T> {
    pub value: T,
    pub skipped: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowOptions {
    pub step: f64,
    pub iterations: usize,
    /// Stop when `max_i |τ_i|` falls below this.
    pub tolerance: f64,
}

impl Default for FlowOptions {
    fn default() -> Self {
        Self {
            step: 1e-3,
            iterations: 2000,
            tolerance: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlowLogEntry {
    pub iteration: usize,
    pub energy: f64,
    pub defect: f64,
    pub step: f64,
    pub tension: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    /// `max_i |τ_i|` fell below the tolerance.
    Tolerance,
    /// Energy changes reached round-off before the tolerance.
    Stationary,
    Iterations,
}

#[derive(Debug, Clone)]
pub struct FlowResult<T> {
    pub map: MeshMap<T>,
    pub log: Vec<FlowLogEntry>,
    pub stop: StopReason,
}

impl<T> FlowResult<T> {
    pub fn write_log<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        for e in &self.log {
            w.serialize(e)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn sup_norm<T: Scalar>(tau: &[Vec<T>]) -> T {
    tau.iter().fold(T::zero(), |m, v| m.max(linalg::norm(v)))
}

/// Projected gradient descent `F_i ← exp_{F_i}(s τ_i)`; a step that raises the
/// energy is retried at half the step size, and accepted steps regrow it up to
/// `options.step`.
pub fn flow_minimize<T: Scalar>(m: &MeshMap<T>, options: FlowOptions) -> Result<FlowResult<T>> {
    let mut current = m.clone();
    let mut energy = current.discrete_energy();
    let mut step = T::of(options.step);
    let mut log = Vec::with_capacity(options.iterations + 1);
    let record = |log: &mut Vec<FlowLogEntry>, k: usize, map: &MeshMap<T>, e: T, s: T, t: T| {
        log.push(FlowLogEntry {
            iteration: k,
            energy: e.to_f64_lossy(),
            defect: map.conformality_defect().value.to_f64_lossy(),
            step: s.to_f64_lossy(),
            tension: t.to_f64_lossy(),
        })
    };
    for k in 0..options.iterations {
        let tau = current.discrete_tension()?;
        let sup = sup_norm(&tau);
        record(&mut log, k, &current, energy, step, sup);
        if sup < T::of(options.tolerance) {
            return Ok(FlowResult {
                map: current,
                log,
                stop: StopReason::Tolerance,
            });
        }
        // predicted first-order decrease, used to recognise a stationary energy
        let predicted: T = tau
            .iter()
            .zip(&current.areas)
            .map(|(t, &a)| a * linalg::dot(t, t))
            .sum();
        let mut halvings = 0;
        loop {
            let images = current
                .images
                .par_iter()
                .zip(&tau)
                .map(|(y, t)| current.codomain.exp_raw(y, &linalg::scale(t, step)))
                .collect::<Result<Vec<_>>>()?;
            let trial = current.with_images(images);
            let e = trial.discrete_energy();
            if e <= energy {
                current = trial;
                energy = e;
                if halvings == 0 {
                    step = (step * T::of(1.5)).min(T::of(options.step));
                }
                break;
            }
            halvings += 1;
            step = step / T::of(2.0);
            if halvings > MAX_HALVINGS {
                if step * predicted < T::of(1e-13) * energy.max(T::one()) {
                    return Ok(FlowResult {
                        map: current,
                        log,
                        stop: StopReason::Stationary,
                    });
                }
                return Err(GeometryError::Stall {
                    iteration: k,
                    energy: energy.to_f64_lossy(),
                    halvings,
                });
            }
        }
    }
    let sup = sup_norm(&current.discrete_tension()?);
    record(&mut log, options.iterations, &current, energy, step, sup);
    Ok(FlowResult {
        map: current,
        log,
        stop: if sup < T::of(options.tolerance) {
            StopReason::Tolerance
        } else {
            StopReason::Iterations
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::standard_map;
    use std::f64::consts::PI;

    #[test]
    fn flat_triangle_cotangents() {
        // right isosceles triangle: legs 1, hypotenuse sqrt2
        let (cot, area) = flat_triangle([1.0_f64, 1.0, 2f64.sqrt()]).unwrap();
        assert!((area - 0.5).abs() < 1e-14);
        assert!((cot[0] - 1.0).abs() < 1e-14 && (cot[1] - 1.0).abs() < 1e-14 && cot[2].abs() < 1e-14);
    }

    #[test]
    fn mesh_invariants() {
        for key in ["identity(S2)", "identity(RP2)"] {
            let f = standard_map::<f64>(key).unwrap();
            let m = MeshMap::sample(&f, 3).unwrap();
            let area = f.domain.volume();
            assert!((m.total_area() - area).abs() < 1e-3 * area, "{key}");
            assert!(m.image_residual() < 1e-10);
            assert!(m.edges.iter().all(|&(i, j, w)| i < j && w > 0.0));
            assert!(m.conformality_defect().value < 1e-12);
        }
    }

    #[test]
    fn rp2_quotient_halves_the_sphere() {
        let (v, t, _) = domain_mesh(&ModelManifold::<f64>::real_projective(2), 2).unwrap();
        let (sv, st, _) = domain_mesh(&ModelManifold::<f64>::sphere(2), 2).unwrap();
        assert_eq!(2 * v.len(), sv.len());
        assert_eq!(2 * t.len(), st.len());
    }

    #[test]
    fn constant_is_a_fixed_point() {
        let f = standard_map::<f64>("constant(S2)").unwrap();
        let m = MeshMap::sample(&f, 2).unwrap();
        assert_eq!(m.discrete_energy(), 0.0);
        let r = flow_minimize(&m, FlowOptions::default()).unwrap();
        assert_eq!(r.stop, StopReason::Tolerance);
        assert_eq!(r.map.images, m.images);
    }

    #[test]
    fn identity_energy_is_near_area() {
        let f = standard_map::<f64>("identity(S2)").unwrap();
        let m = MeshMap::sample(&f, 4).unwrap();
        assert!((m.discrete_energy() - 4.0 * PI).abs() < 0.01 * 4.0 * PI);
    }

    #[test]
    fn interpolant_reproduces_identity() {
        let f = standard_map::<f64>("identity(S2)").unwrap();
        let m = MeshMap::sample(&f, 2).unwrap();
        let g = m.interpolate();
        let mut rng = crate::rng::RngStream::new(4).generator();
        for _ in 0..20 {
            let x = f.domain.random_point(&mut rng);
            let y = g.evaluate(&x).unwrap();
            let d = f.domain.distance(&x, &y);
            assert!(d < 1e-6, "{d}");
        }
    }

    #[test]
    fn csv_round_trip() {
        let f = standard_map::<f64>("double_cover").unwrap();
        let m = MeshMap::sample(&f, 1).unwrap();
        let (mut v, mut t) = (Vec::new(), Vec::new());
        m.write_csv(&mut v, &mut t).unwrap();
        let back = MeshMap::read_csv(m.domain.clone(), m.codomain.clone(), &v[..], &t[..]).unwrap();
        assert_eq!(back.triangles, m.triangles);
        assert!((back.discrete_energy() - m.discrete_energy()).abs() < 1e-12);
    }
}
