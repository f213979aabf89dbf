//! Subdivided icosahedra with spherical Voronoi vertex areas.

use std::collections::HashMap;

use crate::scalar::Scalar;

/// Triangulated unit sphere `S^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereMesh<T> {
    pub vertices: Vec<[T; 3]>,
    /// Counter-clockwise seen from outside.
    pub triangles: Vec<[usize; 3]>,
    /// Spherical Voronoi (circumcentric dual) cell areas; they sum to `4π`.
    pub vertex_areas: Vec<T>,
    pub level: usize,
}

type V3 = [f64; 3];

fn cross(a: V3, b: V3) -> V3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn dot3(a: V3, b: V3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn sub3(a: V3, b: V3) -> V3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn unit3(a: V3) -> V3 {
    let n = dot3(a, a).sqrt();
    [a[0] / n, a[1] / n, a[2] / n]
}

/// Signed area of the spherical triangle `abc` (Van Oosterom-Strackee).
pub fn spherical_triangle_area(a: V3, b: V3, c: V3) -> f64 {
    let num = dot3(a, cross(b, c));
    let den = 1.0 + dot3(a, b) + dot3(b, c) + dot3(c, a);
    2.0 * num.atan2(den)
}

fn icosahedron() -> (Vec<V3>, Vec<[usize; 3]>) {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let mut v = Vec::new();
    for s1 in [-1.0, 1.0] {
        for s2 in [-1.0, 1.0] {
            v.push([0.0, s1, s2 * phi]);
            v.push([s1, s2 * phi, 0.0]);
            v.push([s2 * phi, 0.0, s1]);
        }
    }
    // faces are the vertex triples at mutual distance 2
    let mut faces = Vec::new();
    let close = |a: V3, b: V3| (dot3(sub3(a, b), sub3(a, b)) - 4.0).abs() < 1e-9;
    for i in 0..12 {
        for j in i + 1..12 {
            for k in j + 1..12 {
                if close(v[i], v[j]) && close(v[j], v[k]) && close(v[i], v[k]) {
                    let n = cross(sub3(v[j], v[i]), sub3(v[k], v[i]));
                    if dot3(n, v[i]) > 0.0 {
                        faces.push([i, j, k]);
                    } else {
                        faces.push([i, k, j]);
                    }
                }
            }
        }
    }
    (v.into_iter().map(unit3).collect(), faces)
}

impl<T: Scalar> SphereMesh<T> {
    /// Icosahedron subdivided `level` times: `10·4^level + 2` vertices.
    pub fn icosphere(level: usize) -> Self {
        let (mut verts, mut faces) = icosahedron();
        for _ in 0..level {
            let mut cache: HashMap<(usize, usize), usize> = HashMap::new();
            let mut next = Vec::with_capacity(faces.len() * 4);
            let mut midpoint = |i: usize, j: usize, verts: &mut Vec<V3>| -> usize {
                let key = (i.min(j), i.max(j));
                *cache.entry(key).or_insert_with(|| {
                    let a = verts[i];
                    let b = verts[j];
                    verts.push(unit3([a[0] + b[0], a[1] + b[1], a[2] + b[2]]));
                    verts.len() - 1
                })
            };
            for &[a, b, c] in &faces {
                let ab = midpoint(a, b, &mut verts);
                let bc = midpoint(b, c, &mut verts);
                let ca = midpoint(c, a, &mut verts);
                next.push([a, ab, ca]);
                next.push([ab, b, bc]);
                next.push([ca, bc, c]);
                next.push([ab, bc, ca]);
            }
            faces = next;
        }
        let mut areas = vec![0.0f64; verts.len()];
        for &[a, b, c] in &faces {
            let (pa, pb, pc) = (verts[a], verts[b], verts[c]);
            let o = unit3(cross(sub3(pb, pa), sub3(pc, pa)));
            let mid = |p: V3, q: V3| unit3([p[0] + q[0], p[1] + q[1], p[2] + q[2]]);
            let (mab, mbc, mca) = (mid(pa, pb), mid(pb, pc), mid(pc, pa));
            areas[a] += spherical_triangle_area(pa, mab, o) + spherical_triangle_area(pa, o, mca);
            areas[b] += spherical_triangle_area(pb, mbc, o) + spherical_triangle_area(pb, o, mab);
            areas[c] += spherical_triangle_area(pc, mca, o) + spherical_triangle_area(pc, o, mbc);
        }
        Self {
            vertices: verts.iter().map(|v| [T::of(v[0]), T::of(v[1]), T::of(v[2])]).collect(),
            triangles: faces,
            vertex_areas: areas.into_iter().map(T::of).collect(),
            level,
        }
    }

    pub fn vertex(&self, i: usize) -> Vec<T> {
        self.vertices[i].to_vec()
    }

    /// Index of the antipodal vertex of each vertex.
    pub fn antipodes(&self) -> Vec<usize> {
        let key = |v: &[T; 3]| {
            let q = |x: T| (x.to_f64_lossy() * 1e8).round() as i64;
            (q(v[0]), q(v[1]), q(v[2]))
        };
        let index: HashMap<_, usize> = self.vertices.iter().enumerate().map(|(i, v)| (key(v), i)).collect();
        self.vertices
            .iter()
            .map(|v| index[&key(&[-v[0], -v[1], -v[2]])])
            .collect()
    }

    /// Undirected edges `(i, j)` with `i < j`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut e: Vec<(usize, usize)> = self
            .triangles
            .iter()
            .flat_map(|&[a, b, c]| [(a, b), (b, c), (c, a)])
            .map(|(i, j)| (i.min(j), i.max(j)))
            .collect();
        e.sort_unstable();
        e.dedup();
        e
    }

    pub fn total_area(&self) -> T {
        self.vertex_areas.iter().copied().sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn counts_and_euler_characteristic() {
        for level in 0..4 {
            let m = SphereMesh::<f64>::icosphere(level);
            let v = m.vertices.len();
            let f = m.triangles.len();
            let e = m.edges().len();
            assert_eq!(v, 10 * 4usize.pow(level as u32) + 2);
            assert_eq!(v + f - e, 2);
        }
    }

    #[test]
    fn voronoi_areas_tile_the_sphere() {
        let m = SphereMesh::<f64>::icosphere(3);
        assert!((m.total_area() - 4.0 * PI).abs() < 1e-10);
        assert!(m.vertex_areas.iter().all(|&a| a > 0.0));
    }

    #[test]
    fn antipodes_are_involutive() {
        let m = SphereMesh::<f64>::icosphere(2);
        let a = m.antipodes();
        for (i, &j) in a.iter().enumerate() {
            assert_eq!(a[j], i);
            assert_ne!(i, j);
        }
    }
}
