//! Maps between model manifolds, their differentials, and quadrature grids.

pub mod frame;
pub mod grid;
pub mod mesh;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{GeometryError, Result};
use crate::linalg;
use crate::manifolds::{ModelManifold, Point, TangentVector};
use crate::scalar::Scalar;

pub use frame::{GramMatrix, TangentFrame};
pub use grid::{build_grid, unit_tangent_quadrature, GridScheme, QuadratureGrid, TangentQuadrature};
pub use mesh::SphereMesh;

/// Default central-difference step.
pub const DEFAULT_STEP: f64 = 1e-4;

pub type Evaluator<T> = Arc<dyn Fn(&Point<T>) -> Result<Point<T>> + Send + Sync>;
/// `(x, [v_1, ..., v_k]) ↦ (F(x), [dF v_1, ..., dF v_k])`.
pub type Pushforward<T> = Arc<dyn Fn(&Point<T>, &[Vec<T>]) -> Result<(Point<T>, Vec<Vec<T>>)> + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Smoothness {
    Smooth,
    Lipschitz,
}

/// An evaluatable map between two model manifolds.
#[derive(Clone)]
pub struct MapObject<T> {
    pub domain: ModelManifold<T>,
    pub codomain: ModelManifold<T>,
    pub label: String,
    pub smoothness: Smoothness,
    eval: Evaluator<T>,
    push: Option<Pushforward<T>>,
}

impl<T: Scalar> fmt::Debug for MapObject<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MapObject")
            .field("label", &self.label)
            .field("domain", &self.domain.label())
            .field("codomain", &self.codomain.label())
            .field("smoothness", &self.smoothness)
            .field("analytic_differential", &self.push.is_some())
            .finish()
    }
}

impl<T: Scalar> MapObject<T> {
    pub fn new(
        domain: ModelManifold<T>,
        codomain: ModelManifold<T>,
        label: impl Into<String>,
        eval: impl Fn(&Point<T>) -> Result<Point<T>> + Send + Sync + 'static,
    ) -> Self {
        Self {
            domain,
            codomain,
            label: label.into(),
            smoothness: Smoothness::Smooth,
            eval: Arc::new(eval),
            push: None,
        }
    }

    pub fn with_pushforward(
        mut self,
        push: impl Fn(&Point<T>, &[Vec<T>]) -> Result<(Point<T>, Vec<Vec<T>>)> + Send + Sync + 'static,
    ) -> Self {
        self.push = Some(Arc::new(push));
        self
    }

    pub fn lipschitz(mut self) -> Self {
        self.smoothness = Smoothness::Lipschitz;
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn has_analytic_differential(&self) -> bool {
        self.push.is_some()
    }

    /// The same map with its analytic differential removed (forces finite differences).
    pub fn finite_difference_only(&self) -> Self {
        let mut m = self.clone();
        m.push = None;
        m
    }

    pub fn evaluate(&self, x: &Point<T>) -> Result<Point<T>> {
        (self.eval)(x)
    }

    /// Pushes tangent vectors at `x` forward, analytically when possible.
    pub fn push_forward(&self, x: &Point<T>, vectors: &[Vec<T>]) -> Result<(Point<T>, Vec<Vec<T>>)> {
        match &self.push {
            Some(p) => p(x, vectors),
            None => self.push_forward_fd(x, vectors, T::of(DEFAULT_STEP), false),
        }
    }

    /// Central differences through the codomain logarithm:
    /// `dF v ≈ (log_{F(x)} F(exp_x(hv)) - log_{F(x)} F(exp_x(-hv))) / 2h`,
    /// optionally Richardson-extrapolated with `h/2`.
    pub fn push_forward_fd(
        &self,
        x: &Point<T>,
        vectors: &[Vec<T>],
        h: T,
        richardson: bool,
    ) -> Result<(Point<T>, Vec<Vec<T>>)> {
        let y = self.evaluate(x)?;
        let mut cols = Vec::with_capacity(vectors.len());
        for v in vectors {
            let n = linalg::norm(v);
            if n == T::zero() {
                cols.push(vec![T::zero(); self.codomain.ambient_dim()]);
                continue;
            }
            let dir = linalg::scale(v, T::one() / n);
            let d1 = self.central_difference(x, &y, &dir, h)?;
            let d = if richardson {
                let d2 = self.central_difference(x, &y, &dir, h / T::of(2.0))?;
                d1.iter()
                    .zip(&d2)
                    .map(|(&a, &b)| (T::of(4.0) * b - a) / T::of(3.0))
                    .collect()
            } else {
                d1
            };
            cols.push(linalg::scale(&d, n));
        }
        Ok((y, cols))
    }

    fn central_difference(&self, x: &Point<T>, y: &Point<T>, dir: &[T], h: T) -> Result<Vec<T>> {
        let xp = self.domain.exp_raw(x, &linalg::scale(dir, h))?;
        let xm = self.domain.exp_raw(x, &linalg::scale(dir, -h))?;
        let lp = self.codomain.log_raw(y, &self.evaluate(&xp)?.coords)?;
        let lm = self.codomain.log_raw(y, &self.evaluate(&xm)?.coords)?;
        Ok(lp.iter().zip(&lm).map(|(&a, &b)| (a - b) / (T::of(2.0) * h)).collect())
    }

    /// `outer ∘ inner`. The composite keeps an analytic differential when `inner`
    /// has one (the chain rule falls back to differences for `outer` if needed).
    pub fn compose(outer: &Self, inner: &Self) -> Result<Self> {
        if outer.domain != inner.codomain {
            return Err(GeometryError::Domain(format!(
                "cannot compose {} after {}: {} vs {}",
                outer.label,
                inner.label,
                outer.domain.label(),
                inner.codomain.label()
            )));
        }
        let (o, i) = (outer.clone(), inner.clone());
        let mut m = Self::new(
            inner.domain.clone(),
            outer.codomain.clone(),
            format!("{}∘{}", outer.label, inner.label),
            move |x| o.evaluate(&i.evaluate(x)?),
        );
        if outer.smoothness == Smoothness::Lipschitz || inner.smoothness == Smoothness::Lipschitz {
            m.smoothness = Smoothness::Lipschitz;
        }
        if inner.push.is_some() {
            let (o, i) = (outer.clone(), inner.clone());
            m = m.with_pushforward(move |x, vs| {
                let (y, ws) = i.push_forward(x, vs)?;
                o.push_forward(&y, &ws)
            });
        }
        Ok(m)
    }

    pub fn constant(domain: ModelManifold<T>, codomain: ModelManifold<T>, value: Point<T>) -> Self {
        let v = value.clone();
        let zero = codomain.ambient_dim();
        Self::new(domain, codomain, "constant", move |_| Ok(v.clone()))
            .with_pushforward(move |_, vs| Ok((value.clone(), vs.iter().map(|_| vec![T::zero(); zero]).collect())))
    }

    pub fn identity(m: ModelManifold<T>) -> Self {
        let label = format!("id_{}", m.label());
        let mm = m.clone();
        Self::new(m.clone(), m, label, |x| Ok(x.clone()))
            .with_pushforward(move |x, vs| Ok((x.clone(), vs.iter().map(|v| mm.project_tangent(x, v)).collect())))
    }

    /// Map induced by an ambient lift `P` (homogeneous on projective domains):
    /// `F(x) = [P(x)]`, with `dF v` the tangent (horizontal) part of `dP(x)[v] / |P(x)|`.
    /// Radii of round domains and codomains are accounted for.
    pub fn lifted(
        domain: ModelManifold<T>,
        codomain: ModelManifold<T>,
        label: impl Into<String>,
        lift: impl Fn(&[T]) -> Vec<T> + Send + Sync + 'static,
        dlift: impl Fn(&[T], &[T]) -> Vec<T> + Send + Sync + 'static,
    ) -> Self {
        let lift = Arc::new(lift);
        let (l1, cod1) = (lift.clone(), codomain.clone());
        let eval = move |x: &Point<T>| {
            let raw = l1(&x.coords);
            if linalg::norm(&raw) <= T::epsilon() {
                return Err(GeometryError::Resample("lift vanishes at this point".into()));
            }
            cod1.point(&raw)
        };
        let (l2, cod2) = (lift, codomain.clone());
        let rd = domain.radius();
        let rc = codomain.radius();
        let push = move |x: &Point<T>, vs: &[Vec<T>]| {
            let raw = l2(&x.coords);
            let n = linalg::norm(&raw);
            if n <= T::epsilon() {
                return Err(GeometryError::Resample("lift vanishes at this point".into()));
            }
            let (y, phase) = cod2.normalize_with_phase(&raw)?;
            let cols = vs
                .iter()
                .map(|v| {
                    let u = linalg::scale(&dlift(&x.coords, &linalg::scale(v, T::one() / rd)), rc / n);
                    cod2.project_tangent(&y, &cod2.apply_phase(&u, phase))
                })
                .collect();
            Ok((y, cols))
        };
        Self::new(domain, codomain, label, eval).with_pushforward(push)
    }
}

/// Columns `dF e_i` for the frame `e`; analytic when available, otherwise central
/// differences with step `h ∈ [1e-6, 1e-2]`.
pub fn differential<T: Scalar>(
    f: &MapObject<T>,
    x: &Point<T>,
    frame: &TangentFrame<T>,
    h: T,
) -> Result<Vec<TangentVector<T>>> {
    check_step(h)?;
    let (y, cols) = if f.has_analytic_differential() {
        f.push_forward(x, &frame.vectors)?
    } else {
        f.push_forward_fd(x, &frame.vectors, h, false)?
    };
    Ok(cols
        .into_iter()
        .map(|c| TangentVector {
            base: y.clone(),
            components: c,
        })
        .collect())
}

fn check_step<T: Scalar>(h: T) -> Result<()> {
    if h < T::of(1e-6) || h > T::of(1e-2) {
        return Err(GeometryError::Domain(format!(
            "difference step {h} outside [1e-6, 1e-2]"
        )));
    }
    Ok(())
}

pub fn pullback_gram<T: Scalar>(
    f: &MapObject<T>,
    x: &Point<T>,
    frame: &TangentFrame<T>,
    h: T,
) -> Result<GramMatrix<T>> {
    let cols: Vec<Vec<T>> = differential(f, x, frame, h)?
        .into_iter()
        .map(|t| t.components)
        .collect();
    Ok(GramMatrix::from_columns(&cols))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;

    #[test]
    fn identity_differential_reproduces_frame() {
        let m = ModelManifold::<f64>::sphere(2);
        let f = MapObject::identity(m.clone()).finite_difference_only();
        let mut rng = RngStream::new(1).generator();
        let x = m.random_point(&mut rng);
        let frame = TangentFrame::random(&m, &x, &mut rng).unwrap();
        let cols = differential(&f, &x, &frame, 1e-4).unwrap();
        for (c, e) in cols.iter().zip(&frame.vectors) {
            assert!(linalg::max_abs(&linalg::sub(&c.components, e)) < 1e-8);
        }
    }

    #[test]
    fn step_outside_range_is_rejected() {
        let m = ModelManifold::<f64>::sphere(2);
        let f = MapObject::identity(m.clone());
        let x = m.point(&[0.0, 0.0, 1.0]).unwrap();
        let frame = TangentFrame::standard(&m, &x).unwrap();
        assert!(differential(&f, &x, &frame, 0.1).is_err());
    }

    #[test]
    fn constant_map_has_zero_gram() {
        let m = ModelManifold::<f64>::complex_projective(1);
        let p = m.point(&[1.0, 0.0, 0.0, 0.0]).unwrap();
        let f = MapObject::constant(m.clone(), m.clone(), p);
        let x = m.point(&[0.6, 0.0, 0.0, 0.8]).unwrap();
        let frame = TangentFrame::standard(&m, &x).unwrap();
        let g = pullback_gram(&f, &x, &frame, 1e-4).unwrap();
        assert_eq!(g.trace(), 0.0);
        let g = pullback_gram(&f.finite_difference_only(), &x, &frame, 1e-4).unwrap();
        assert_eq!(g.trace(), 0.0);
    }

    #[test]
    fn composition_requires_matching_spaces() {
        let a = MapObject::identity(ModelManifold::<f64>::sphere(2));
        let b = MapObject::identity(ModelManifold::<f64>::sphere(3));
        assert!(MapObject::compose(&a, &b).is_err());
        assert!(MapObject::compose(&a, &a).unwrap().has_analytic_differential());
    }
}
