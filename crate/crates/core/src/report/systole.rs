//! Graph approximation of the systole of a conformal metric `μ g_0` on `RP^2`.

use petgraph::algo::astar;
use petgraph::graph::{NodeIndex, UnGraph};
use serde::Serialize;

use crate::error::{GeometryError, Result};
use crate::linalg;
use crate::manifolds::ModelManifold;
use crate::maps::grid::mesh_grid;
use crate::maps::SphereMesh;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SystoleEstimate {
    /// Graph systole at `level`.
    pub value: f64,
    /// Graph systole at `level + 1`.
    pub refined: f64,
    /// `|value - refined|`.
    pub uncertainty: f64,
    pub level: usize,
    /// `∫_{RP^2} μ` on the refined mesh.
    pub area: f64,
}

impl SystoleEstimate {
    /// `A - (2/π) sys²` with the refined systole.
    pub fn pu_slack(&self) -> f64 {
        self.area - 2.0 / std::f64::consts::PI * self.refined * self.refined
    }

    /// Uncertainty of [`Self::pu_slack`] propagated from the systole uncertainty.
    pub fn slack_uncertainty(&self) -> f64 {
        4.0 / std::f64::consts::PI * self.refined * self.uncertainty
    }
}

/// Shortest noncontractible loop for `μ g_0`: the minimum over antipodal vertex
/// pairs of the shortest path between them on the icosphere, with edges weighted
/// by `∫ √μ` along the arc. Computed at `level` and `level + 1`.
pub fn systole_rp2(mu: &(dyn Fn(&[f64]) -> f64 + Sync), level: usize) -> Result<SystoleEstimate> {
    let value = graph_systole(mu, level)?;
    let refined = graph_systole(mu, level + 1)?;
    let grid = mesh_grid(&ModelManifold::<f64>::real_projective(2), level + 1)?;
    let area = grid.integrate(|x| mu(&x.coords));
    Ok(SystoleEstimate {
        value,
        refined,
        uncertainty: (value - refined).abs(),
        level,
        area,
    })
}

fn arc(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    let c = linalg::dot(a, b).clamp(-1.0, 1.0);
    let s = linalg::norm(&[
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]);
    s.atan2(c)
}

/// Longest arc used as a single graph edge. Edges are all vertex pairs within this
/// distance, so refining the mesh at fixed reach refines the available directions.
pub const SYSTOLE_REACH: f64 = 0.4;

pub fn graph_systole(mu: &(dyn Fn(&[f64]) -> f64 + Sync), level: usize) -> Result<f64> {
    graph_systole_with_reach(mu, level, SYSTOLE_REACH)
}

pub fn graph_systole_with_reach(mu: &(dyn Fn(&[f64]) -> f64 + Sync), level: usize, reach: f64) -> Result<f64> {
    let mesh = SphereMesh::<f64>::icosphere(level);
    let root = |v: &[f64]| -> Result<f64> {
        let m = mu(v);
        if !(m > 0.0 && m.is_finite()) {
            return Err(GeometryError::Domain(format!(
                "conformal factor {m} at {v:?} is not positive"
            )));
        }
        Ok(m.sqrt())
    };
    let roots = mesh.vertices.iter().map(|v| root(v)).collect::<Result<Vec<f64>>>()?;
    let min_root = roots.iter().fold(f64::INFINITY, |m, &r| m.min(r));
    let n = mesh.vertices.len();
    let mut ring = vec![Vec::new(); n];
    for (i, j) in mesh.edges() {
        ring[i].push(j);
        ring[j].push(i);
    }
    let mut g = UnGraph::<(), f64>::with_capacity(n, 0);
    let nodes: Vec<NodeIndex> = (0..n).map(|_| g.add_node(())).collect();
    for i in 0..n {
        for j in within_reach(&mesh.vertices, &ring, i, reach) {
            if j <= i {
                continue;
            }
            let (a, b) = (&mesh.vertices[i], &mesh.vertices[j]);
            let mid = linalg::normalized(&linalg::add(a, b)).expect("short arc midpoint");
            // Simpson's rule for ∫ √μ along the arc
            let w = arc(a, b) * (roots[i] + 4.0 * root(&mid)? + roots[j]) / 6.0;
            g.add_edge(nodes[i], nodes[j], w);
        }
    }
    let antipode = mesh.antipodes();
    // every noncontractible loop crosses {x_2 = 0}; start at the upper end of a crossing edge
    let sources: Vec<usize> = (0..n)
        .filter(|&i| {
            let z = mesh.vertices[i][2];
            z >= 0.0 && g.neighbors(nodes[i]).any(|m| mesh.vertices[m.index()][2] <= 0.0)
        })
        .collect();
    let mut best = f64::INFINITY;
    for i in sources {
        let j = antipode[i];
        let target = mesh.vertices[j];
        // √μ_min times the great-circle distance is an admissible heuristic
        let found = astar(
            &g,
            nodes[i],
            |m| m == nodes[j],
            |e| *e.weight(),
            |m| min_root * arc(&mesh.vertices[m.index()], &target),
        );
        match found {
            Some((d, _)) => best = best.min(d),
            None => return Err(GeometryError::Domain(format!("vertex {i} cannot reach its antipode"))),
        }
    }
    if !best.is_finite() {
        return Err(GeometryError::Domain("no path crosses the reference circle".into()));
    }
    Ok(best)
}

/// Mesh neighbours of vertex `i` and all vertices within `reach` of it, by breadth-first search.
fn within_reach(vertices: &[[f64; 3]], ring: &[Vec<usize>], i: usize, reach: f64) -> Vec<usize> {
    let mut seen = std::collections::HashSet::from([i]);
    let mut frontier = vec![i];
    let mut out = Vec::new();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for k in frontier {
            for &m in &ring[k] {
                if seen.insert(m) && (k == i || arc(&vertices[i], &vertices[m]) <= reach) {
                    out.push(m);
                    next.push(m);
                }
            }
        }
        frontier = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn round_systole_is_pi() {
        let s = graph_systole(&|_| 1.0, 3).unwrap();
        assert!((PI - 1e-12..1.02 * PI).contains(&s), "{s}");
    }

    #[test]
    fn scaling_doubles_systole() {
        let a = graph_systole(&|_| 1.0, 2).unwrap();
        let b = graph_systole(&|_| 4.0, 2).unwrap();
        assert!((b - 2.0 * a).abs() < 1e-12);
    }

    #[test]
    fn nonpositive_factor_is_rejected() {
        assert!(graph_systole(&|x| x[0], 1).is_err());
    }
}
