//! Model Riemannian manifolds: round spheres, real and complex projective
//! spaces, and finite products of them.
//!
//! Points are unit vectors in an ambient Euclidean space. `RP^n` is the
//! quotient of `S^n` by `±1` and `CP^N` the quotient of `S^{2N+1} ⊂ C^{N+1}`
//! by the circle action, carrying the Fubini-Study metric of holomorphic
//! sectional curvature 4 (the Riemannian submersion metric). Tangent vectors
//! are stored as ambient vectors orthogonal to the representative; on `CP^N`
//! they are horizontal, i.e. complex-orthogonal to the lift. All metric
//! quantities are then Euclidean dot products of ambient components.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{GeometryError, Result};
use crate::linalg::{self, Matrix};
use crate::rng::RngStream;
use crate::scalar::{factorial, sphere_volume, Scalar};

/// Guard distance below the cut locus inside which `log_map` refuses to answer.
pub const CUT_GUARD: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelManifold<T> {
    /// Round `S^dim` of the given radius.
    Sphere {
        dim: usize,
        radius: T,
    },
    /// `S^dim(radius) / ±1`; curvature `1/radius²`, closed geodesics of length `π·radius`.
    RealProjective {
        dim: usize,
        radius: T,
    },
    /// `CP^n` with the Fubini-Study metric of maximal sectional curvature 4.
    ComplexProjective {
        n: usize,
    },
    Product(Vec<ModelManifold<T>>),
}

/// A point, stored as a unit-norm ambient representative.
#[derive(Debug, Clone, PartialEq)]
pub struct Point<T> {
    pub coords: Vec<T>,
    /// Whether the representative is in canonical form (first significant coordinate
    /// positive on `RP^n`, real positive on `CP^N`).
    pub canonical: bool,
}

impl<T: Scalar> Point<T> {
    pub fn norm_residual(&self) -> T {
        (linalg::norm(&self.coords) - T::one()).abs()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TangentVector<T> {
    pub base: Point<T>,
    pub components: Vec<T>,
}

impl<T: Scalar> TangentVector<T> {
    pub fn norm(&self) -> T {
        linalg::norm(&self.components)
    }
}

/// Unit scalar by which a raw ambient vector was multiplied to reach its canonical
/// representative: `±1` on real spaces, a unit complex number on `CP^N`.
pub type Phase<T> = (T, T);

/// Element of the isometry Lie algebra, acting on ambient coordinates.
///
/// For `S^n` and `RP^n` the matrix is skew-symmetric. For `CP^N` it is the real
/// form of a skew-Hermitian matrix on interleaved complex coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct LieAlgebraElement<T> {
    pub matrix: Matrix<T>,
    pub complex: bool,
}

impl<T: Scalar> LieAlgebraElement<T> {
    pub fn skew_symmetric(matrix: Matrix<T>) -> Result<Self> {
        if matrix.skew_residual() > T::of(1e-12) {
            return Err(GeometryError::Domain("matrix is not skew-symmetric".into()));
        }
        Ok(Self { matrix, complex: false })
    }

    /// `A = re + i·im` with `re` skew-symmetric and `im` symmetric.
    pub fn skew_hermitian(re: &Matrix<T>, im: &Matrix<T>) -> Result<Self> {
        if re.n != im.n {
            return Err(GeometryError::Domain("real and imaginary parts differ in size".into()));
        }
        let m = re.n;
        let mut real = Matrix::zeros(2 * m);
        for j in 0..m {
            for k in 0..m {
                let (b, c) = (re.get(j, k), im.get(j, k));
                real.set(2 * j, 2 * k, b);
                real.set(2 * j, 2 * k + 1, -c);
                real.set(2 * j + 1, 2 * k, c);
                real.set(2 * j + 1, 2 * k + 1, b);
            }
        }
        if real.skew_residual() > T::of(1e-12) {
            return Err(GeometryError::Domain("matrix is not skew-Hermitian".into()));
        }
        Ok(Self {
            matrix: real,
            complex: true,
        })
    }

    pub fn zero(ambient_dim: usize, complex: bool) -> Self {
        Self {
            matrix: Matrix::zeros(ambient_dim),
            complex,
        }
    }

    pub fn skewness_residual(&self) -> T {
        self.matrix.skew_residual()
    }

    /// Norm for the inner product `-½ tr(XY)` on the ambient real form, a positive
    /// multiple of the negative Killing form.
    pub fn killing_norm(&self) -> T {
        (-self.matrix.matmul(&self.matrix).trace() / T::of(2.0))
            .max(T::zero())
            .sqrt()
    }

    /// One-parameter isometry `exp(t·a)`.
    pub fn flow(&self, t: T) -> Isometry<T> {
        Isometry {
            matrix: matrix_exp(&self.matrix, t),
        }
    }
}

fn matrix_exp<T: Scalar>(a: &Matrix<T>, t: T) -> Matrix<T> {
    let n = a.n;
    let mut scaled = a.clone();
    for v in scaled.data.iter_mut() {
        *v = *v * t;
    }
    let nrm = scaled.data.iter().fold(T::zero(), |m, &x| m.max(x.abs())) * T::of_usize(n);
    let mut squarings = 0;
    let mut s = nrm;
    while s > T::of(0.25) {
        s = s / T::of(2.0);
        squarings += 1;
    }
    let factor = T::of(2.0).powi(-squarings);
    for v in scaled.data.iter_mut() {
        *v = *v * factor;
    }
    let mut result = Matrix::identity(n);
    let mut term = Matrix::identity(n);
    for k in 1..=20 {
        term = term.matmul(&scaled);
        for v in term.data.iter_mut() {
            *v = *v / T::of_usize(k);
        }
        for (r, x) in result.data.iter_mut().zip(&term.data) {
            *r = *r + *x;
        }
    }
    for _ in 0..squarings {
        result = result.matmul(&result);
    }
    result
}

/// An isometry realized by an orthogonal (resp. unitary) ambient matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Isometry<T> {
    pub matrix: Matrix<T>,
}

impl<T: Scalar> Isometry<T> {
    pub fn apply(&self, m: &ModelManifold<T>, x: &Point<T>) -> Result<Point<T>> {
        Ok(m.normalize_with_phase(&self.matrix.mul_vec(&x.coords))?.0)
    }

    pub fn apply_tangent(&self, m: &ModelManifold<T>, v: &TangentVector<T>) -> Result<TangentVector<T>> {
        let (base, phase) = m.normalize_with_phase(&self.matrix.mul_vec(&v.base.coords))?;
        let comps = m.apply_phase(&self.matrix.mul_vec(&v.components), phase);
        Ok(TangentVector {
            base,
            components: comps,
        })
    }
}

impl<T: Scalar> ModelManifold<T> {
    pub fn sphere(dim: usize) -> Self {
        Self::Sphere { dim, radius: T::one() }
    }

    pub fn sphere_with_radius(dim: usize, radius: T) -> Self {
        Self::Sphere { dim, radius }
    }

    pub fn real_projective(dim: usize) -> Self {
        Self::RealProjective { dim, radius: T::one() }
    }

    pub fn complex_projective(n: usize) -> Self {
        Self::ComplexProjective { n }
    }

    pub fn product(factors: Vec<Self>) -> Self {
        Self::Product(factors)
    }

    /// Real dimension.
    pub fn dim(&self) -> usize {
        match self {
            Self::Sphere { dim, .. } | Self::RealProjective { dim, .. } => *dim,
            Self::ComplexProjective { n } => 2 * n,
            Self::Product(f) => f.iter().map(|m| m.dim()).sum(),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        match self {
            Self::Sphere { dim, .. } | Self::RealProjective { dim, .. } => dim + 1,
            Self::ComplexProjective { n } => 2 * n + 2,
            Self::Product(f) => f.iter().map(|m| m.ambient_dim()).sum(),
        }
    }

    pub fn volume(&self) -> T {
        match self {
            Self::Sphere { dim, radius } => radius.powi(*dim as i32) * sphere_volume::<T>(*dim),
            Self::RealProjective { dim, radius } => radius.powi(*dim as i32) * sphere_volume::<T>(*dim) / T::of(2.0),
            Self::ComplexProjective { n } => T::PI().powi(*n as i32) / factorial::<T>(*n),
            Self::Product(f) => f.iter().fold(T::one(), |acc, m| acc * m.volume()),
        }
    }

    /// Distance to the cut locus from any point (constant on these spaces).
    pub fn cut_distance(&self) -> T {
        match self {
            Self::Sphere { radius, .. } => T::PI() * *radius,
            Self::RealProjective { radius, .. } => T::FRAC_PI_2() * *radius,
            Self::ComplexProjective { .. } => T::FRAC_PI_2(),
            Self::Product(f) => f.iter().map(|m| m.cut_distance()).fold(T::infinity(), |a, b| a.min(b)),
        }
    }

    /// Radius of a round factor (1 for `CP^N` and products).
    pub fn radius(&self) -> T {
        match self {
            Self::Sphere { radius, .. } | Self::RealProjective { radius, .. } => *radius,
            _ => T::one(),
        }
    }

    pub fn is_complex(&self) -> bool {
        matches!(self, Self::ComplexProjective { .. })
    }

    /// Short human-readable name, e.g. `CP2`, `RP3`, `S2(0.5)`.
    pub fn label(&self) -> String {
        match self {
            Self::Sphere { dim, radius } if *radius == T::one() => format!("S{dim}"),
            Self::Sphere { dim, radius } => format!("S{dim}({radius})"),
            Self::RealProjective { dim, radius } if *radius == T::one() => format!("RP{dim}"),
            Self::RealProjective { dim, radius } => format!("RP{dim}({radius})"),
            Self::ComplexProjective { n } => format!("CP{n}"),
            Self::Product(f) => f.iter().map(|m| m.label()).collect::<Vec<_>>().join("x"),
        }
    }

    fn factor_blocks(factors: &[Self]) -> Vec<Range<usize>> {
        let mut out = Vec::with_capacity(factors.len());
        let mut start = 0;
        for f in factors {
            let end = start + f.ambient_dim();
            out.push(start..end);
            start = end;
        }
        out
    }

    /// Ambient coordinate ranges of the factors (a single range for non-products).
    #[allow(clippy::single_range_in_vec_init)]
    pub fn blocks(&self) -> Vec<Range<usize>> {
        match self {
            Self::Product(f) => Self::factor_blocks(f),
            _ => vec![0..self.ambient_dim()],
        }
    }

    fn canonical_tolerance() -> T {
        T::epsilon().sqrt() * T::of(1e-2)
    }

    /// Normalizes a raw ambient vector and puts it in canonical form. Returns the
    /// point and the phase `c` with `point = c · raw / |raw|`.
    pub fn normalize_with_phase(&self, raw: &[T]) -> Result<(Point<T>, Phase<T>)> {
        if raw.len() != self.ambient_dim() {
            return Err(GeometryError::Domain(format!(
                "ambient vector of length {} for {} (expected {})",
                raw.len(),
                self.label(),
                self.ambient_dim()
            )));
        }
        match self {
            Self::Sphere { .. } => {
                let v = linalg::normalized(raw).ok_or_else(|| GeometryError::Resample("zero ambient vector".into()))?;
                Ok((
                    Point {
                        coords: v,
                        canonical: true,
                    },
                    (T::one(), T::zero()),
                ))
            }
            Self::RealProjective { .. } => {
                let mut v =
                    linalg::normalized(raw).ok_or_else(|| GeometryError::Resample("zero ambient vector".into()))?;
                let tol = Self::canonical_tolerance();
                let sign = v
                    .iter()
                    .find(|x| x.abs() > tol)
                    .map(|x| if *x < T::zero() { -T::one() } else { T::one() })
                    .unwrap_or(T::one());
                if sign < T::zero() {
                    v.iter_mut().for_each(|x| *x = -*x);
                }
                Ok((
                    Point {
                        coords: v,
                        canonical: true,
                    },
                    (sign, T::zero()),
                ))
            }
            Self::ComplexProjective { .. } => {
                let v = linalg::normalized(raw).ok_or_else(|| GeometryError::Resample("zero ambient vector".into()))?;
                let tol = Self::canonical_tolerance();
                let mut phase = (T::one(), T::zero());
                for k in (0..v.len()).step_by(2) {
                    let m = (v[k] * v[k] + v[k + 1] * v[k + 1]).sqrt();
                    if m > tol {
                        phase = (v[k] / m, -v[k + 1] / m);
                        break;
                    }
                }
                let mut coords = linalg::cscale(&v, phase);
                // the first significant coordinate is real by construction
                for k in (0..coords.len()).step_by(2) {
                    if (coords[k] * coords[k] + coords[k + 1] * coords[k + 1]).sqrt() > tol {
                        coords[k + 1] = T::zero();
                        break;
                    }
                }
                Ok((
                    Point {
                        coords,
                        canonical: true,
                    },
                    phase,
                ))
            }
            Self::Product(factors) => {
                let mut coords = Vec::with_capacity(raw.len());
                for (f, r) in factors.iter().zip(Self::factor_blocks(factors)) {
                    coords.extend(f.normalize_with_phase(&raw[r])?.0.coords);
                }
                Ok((
                    Point {
                        coords,
                        canonical: true,
                    },
                    (T::one(), T::zero()),
                ))
            }
        }
    }

    pub fn point(&self, raw: &[T]) -> Result<Point<T>> {
        Ok(self.normalize_with_phase(raw)?.0)
    }

    /// Multiplies tangent components by the phase returned from
    /// [`normalize_with_phase`](Self::normalize_with_phase).
    pub fn apply_phase(&self, v: &[T], phase: Phase<T>) -> Vec<T> {
        match self {
            Self::ComplexProjective { .. } => linalg::cscale(v, phase),
            Self::RealProjective { .. } => linalg::scale(v, phase.0),
            _ => v.to_vec(),
        }
    }

    /// Orthogonal (horizontal on `CP^N`) projection of an ambient vector onto `T_x`.
    pub fn project_tangent(&self, x: &Point<T>, raw: &[T]) -> Vec<T> {
        match self {
            Self::Sphere { .. } | Self::RealProjective { .. } => linalg::real_reject(raw, &x.coords),
            Self::ComplexProjective { .. } => linalg::complex_reject(raw, &x.coords),
            Self::Product(factors) => {
                let mut out = Vec::with_capacity(raw.len());
                for (f, r) in factors.iter().zip(Self::factor_blocks(factors)) {
                    let xp = Point {
                        coords: x.coords[r.clone()].to_vec(),
                        canonical: true,
                    };
                    out.extend(f.project_tangent(&xp, &raw[r]));
                }
                out
            }
        }
    }

    /// Size of the component of `v` that is not tangent at `x`.
    pub fn tangent_residual(&self, x: &Point<T>, v: &[T]) -> T {
        linalg::max_abs(&linalg::sub(v, &self.project_tangent(x, v)))
    }

    pub fn tangent(&self, x: &Point<T>, raw: &[T]) -> TangentVector<T> {
        TangentVector {
            base: x.clone(),
            components: self.project_tangent(x, raw),
        }
    }

    pub fn zero_tangent(&self, x: &Point<T>) -> TangentVector<T> {
        TangentVector {
            base: x.clone(),
            components: vec![T::zero(); self.ambient_dim()],
        }
    }

    pub fn inner(&self, u: &TangentVector<T>, v: &TangentVector<T>) -> T {
        linalg::dot(&u.components, &v.components)
    }

    fn check_base(x: &Point<T>, v: &TangentVector<T>) -> Result<()> {
        let d = linalg::max_abs(&linalg::sub(&x.coords, &v.base.coords));
        if x.coords.len() != v.base.coords.len() || d > T::of(1e-12) {
            return Err(GeometryError::Domain(
                "tangent vector is based at a different point".into(),
            ));
        }
        Ok(())
    }

    /// Exponential map.
    pub fn exp_map(&self, x: &Point<T>, v: &TangentVector<T>) -> Result<Point<T>> {
        Self::check_base(x, v)?;
        self.exp_raw(x, &v.components)
    }

    /// Exponential map on raw tangent components based at `x`.
    pub fn exp_raw(&self, x: &Point<T>, v: &[T]) -> Result<Point<T>> {
        match self {
            Self::Sphere { radius, .. } | Self::RealProjective { radius, .. } => {
                let len = linalg::norm(v);
                if len == T::zero() {
                    return Ok(x.clone());
                }
                let theta = len / *radius;
                let y: Vec<T> = x
                    .coords
                    .iter()
                    .zip(v)
                    .map(|(&a, &b)| theta.cos() * a + theta.sin() * b / len)
                    .collect();
                self.point(&y)
            }
            Self::ComplexProjective { .. } => {
                let len = linalg::norm(v);
                if len == T::zero() {
                    return Ok(x.clone());
                }
                let y: Vec<T> = x
                    .coords
                    .iter()
                    .zip(v)
                    .map(|(&a, &b)| len.cos() * a + len.sin() * b / len)
                    .collect();
                self.point(&y)
            }
            Self::Product(factors) => {
                let mut coords = Vec::with_capacity(x.coords.len());
                for (f, r) in factors.iter().zip(Self::factor_blocks(factors)) {
                    let xp = Point {
                        coords: x.coords[r.clone()].to_vec(),
                        canonical: true,
                    };
                    coords.extend(f.exp_raw(&xp, &v[r])?.coords);
                }
                Ok(Point {
                    coords,
                    canonical: true,
                })
            }
        }
    }

    /// Logarithm map; refuses pairs within [`CUT_GUARD`] of the cut locus.
    pub fn log_map(&self, x: &Point<T>, y: &Point<T>) -> Result<TangentVector<T>> {
        Ok(TangentVector {
            base: x.clone(),
            components: self.log_raw(x, &y.coords)?,
        })
    }

    /// Logarithm map on a raw (any-representative) unit vector `y`.
    pub fn log_raw(&self, x: &Point<T>, y: &[T]) -> Result<Vec<T>> {
        let guard = T::of(CUT_GUARD);
        match self {
            Self::Sphere { radius, .. } | Self::RealProjective { radius, .. } => {
                let mut c = linalg::dot(&x.coords, y);
                let mut yy = y.to_vec();
                if matches!(self, Self::RealProjective { .. }) && c < T::zero() {
                    c = -c;
                    yy.iter_mut().for_each(|v| *v = -*v);
                }
                let w = linalg::axpy(&yy, -c, &x.coords);
                let s = linalg::norm(&w);
                let theta = s.atan2(c);
                let dist = theta * *radius;
                let cut = self.cut_distance();
                if dist >= cut - guard {
                    return Err(GeometryError::CutLocus {
                        distance: dist.to_f64_lossy(),
                        cut: cut.to_f64_lossy(),
                    });
                }
                if s == T::zero() {
                    return Ok(vec![T::zero(); y.len()]);
                }
                Ok(linalg::scale(&w, dist / s))
            }
            Self::ComplexProjective { .. } => {
                let (cr, ci) = linalg::hermitian(&x.coords, y);
                let m = (cr * cr + ci * ci).sqrt();
                let cut = self.cut_distance();
                if m == T::zero() {
                    return Err(GeometryError::CutLocus {
                        distance: cut.to_f64_lossy(),
                        cut: cut.to_f64_lossy(),
                    });
                }
                let aligned = linalg::cscale(y, (cr / m, -ci / m));
                let w = linalg::complex_reject(&aligned, &x.coords);
                let s = linalg::norm(&w);
                let theta = s.atan2(m);
                if theta >= cut - guard {
                    return Err(GeometryError::CutLocus {
                        distance: theta.to_f64_lossy(),
                        cut: cut.to_f64_lossy(),
                    });
                }
                if s == T::zero() {
                    return Ok(vec![T::zero(); y.len()]);
                }
                Ok(linalg::scale(&w, theta / s))
            }
            Self::Product(factors) => {
                let mut out = Vec::with_capacity(y.len());
                for (f, r) in factors.iter().zip(Self::factor_blocks(factors)) {
                    let xp = Point {
                        coords: x.coords[r.clone()].to_vec(),
                        canonical: true,
                    };
                    out.extend(f.log_raw(&xp, &y[r])?);
                }
                Ok(out)
            }
        }
    }

    /// Geodesic distance.
    pub fn distance(&self, x: &Point<T>, y: &Point<T>) -> T {
        self.distance_raw(&x.coords, &y.coords)
    }

    pub fn distance_raw(&self, x: &[T], y: &[T]) -> T {
        match self {
            Self::Sphere { radius, .. } => {
                let c = linalg::dot(x, y);
                let s = linalg::norm(&linalg::axpy(y, -c, x));
                *radius * s.atan2(c)
            }
            Self::RealProjective { radius, .. } => {
                let c = linalg::dot(x, y);
                let s = linalg::norm(&linalg::axpy(y, -c, x));
                *radius * s.atan2(c.abs())
            }
            Self::ComplexProjective { .. } => {
                let (cr, ci) = linalg::hermitian(x, y);
                let m = (cr * cr + ci * ci).sqrt();
                // |y - <x,y> x| = sqrt(1 - m²), computed without cancellation
                let s = linalg::norm(&linalg::complex_reject(y, x));
                s.atan2(m)
            }
            Self::Product(factors) => factors
                .iter()
                .zip(Self::factor_blocks(factors))
                .map(|(f, r)| {
                    let d = f.distance_raw(&x[r.clone()], &y[r]);
                    d * d
                })
                .sum::<T>()
                .sqrt(),
        }
    }

    /// The complex structure `J` (multiplication by `i` on horizontal lifts).
    pub fn complex_structure(&self, u: &TangentVector<T>) -> Result<TangentVector<T>> {
        if !self.is_complex() {
            return Err(GeometryError::Domain(format!(
                "{} has no complex structure",
                self.label()
            )));
        }
        Ok(TangentVector {
            base: u.base.clone(),
            components: linalg::mul_i(&u.components),
        })
    }

    /// Value at `x` of the Killing field generated by `a`.
    pub fn killing_field(&self, a: &LieAlgebraElement<T>, x: &Point<T>) -> Result<TangentVector<T>> {
        if a.matrix.n != self.ambient_dim() || matches!(self, Self::Product(_)) {
            return Err(GeometryError::Domain(format!(
                "Lie algebra element of size {} does not act on {}",
                a.matrix.n,
                self.label()
            )));
        }
        if self.is_complex() != a.complex {
            return Err(GeometryError::Domain("algebra type does not match the manifold".into()));
        }
        let ax = a.matrix.mul_vec(&x.coords);
        let scale = match self {
            Self::Sphere { radius, .. } | Self::RealProjective { radius, .. } => *radius,
            _ => T::one(),
        };
        Ok(TangentVector {
            base: x.clone(),
            components: linalg::scale(&self.project_tangent(x, &ax), scale),
        })
    }

    /// Covariant derivative `∇_u V` of the Killing field of `a` at `u.base`.
    ///
    /// On `CP^N` this is the horizontal part of `a·u - u <z, a z>`; on spheres the
    /// tangential part of `a·u`.
    pub fn killing_covariant_derivative(
        &self,
        a: &LieAlgebraElement<T>,
        u: &TangentVector<T>,
    ) -> Result<TangentVector<T>> {
        let x = &u.base;
        match self {
            Self::ComplexProjective { .. } => {
                let az = a.matrix.mul_vec(&x.coords);
                let c = linalg::hermitian(&x.coords, &az);
                let au = a.matrix.mul_vec(&u.components);
                let raw = linalg::sub(&au, &linalg::cscale(&u.components, c));
                Ok(self.tangent(x, &raw))
            }
            Self::Sphere { .. } | Self::RealProjective { .. } => {
                let au = a.matrix.mul_vec(&u.components);
                Ok(self.tangent(x, &au))
            }
            Self::Product(_) => Err(GeometryError::Domain("Killing fields on products".into())),
        }
    }

    pub fn random_point(&self, rng: &mut crate::rng::Sampler) -> Point<T> {
        loop {
            let raw: Vec<T> = rng.gaussian_vec(self.ambient_dim());
            if let Ok(p) = self.point(&raw) {
                return p;
            }
        }
    }

    /// Uniformly distributed unit tangent vector at `x`.
    pub fn random_unit_tangent(&self, x: &Point<T>, rng: &mut crate::rng::Sampler) -> TangentVector<T> {
        loop {
            let raw: Vec<T> = rng.gaussian_vec(self.ambient_dim());
            let t = self.project_tangent(x, &raw);
            if let Some(u) = linalg::normalized(&t) {
                return TangentVector {
                    base: x.clone(),
                    components: u,
                };
            }
        }
    }

    /// Uniform sample of the unit tangent bundle.
    pub fn random_unit_tangent_bundle(&self, rng: &mut crate::rng::Sampler) -> TangentVector<T> {
        let x = self.random_point(rng);
        self.random_unit_tangent(&x, rng)
    }

    /// Haar-random isometry (orthogonal for real spaces, unitary for `CP^N`).
    pub fn random_isometry(&self, stream: RngStream) -> Result<Isometry<T>> {
        let mut rng = stream.generator();
        let d = self.ambient_dim();
        match self {
            Self::Sphere { .. } | Self::RealProjective { .. } => {
                let cols: Vec<Vec<T>> = (0..d).map(|_| rng.gaussian_vec(d)).collect();
                let q = linalg::gram_schmidt(&cols);
                let mut m = Matrix::zeros(d);
                for (j, c) in q.iter().enumerate() {
                    for (i, &v) in c.iter().enumerate() {
                        m.set(i, j, v);
                    }
                }
                Ok(Isometry { matrix: m })
            }
            Self::ComplexProjective { n } => {
                let m = n + 1;
                // complex Gram-Schmidt on Gaussian columns
                let mut cols: Vec<Vec<T>> = Vec::with_capacity(m);
                while cols.len() < m {
                    let mut c: Vec<T> = rng.gaussian_vec(2 * m);
                    for _ in 0..2 {
                        for q in &cols {
                            c = linalg::complex_reject(&c, q);
                        }
                    }
                    if let Some(c) = linalg::normalized(&c) {
                        cols.push(c);
                    }
                }
                let mut real = Matrix::zeros(2 * m);
                for (k, c) in cols.iter().enumerate() {
                    for j in 0..m {
                        let (b, cc) = (c[2 * j], c[2 * j + 1]);
                        real.set(2 * j, 2 * k, b);
                        real.set(2 * j, 2 * k + 1, -cc);
                        real.set(2 * j + 1, 2 * k, cc);
                        real.set(2 * j + 1, 2 * k + 1, b);
                    }
                }
                Ok(Isometry { matrix: real })
            }
            Self::Product(_) => Err(GeometryError::Domain("random isometry of a product".into())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    type M = ModelManifold<f64>;

    #[test]
    fn volumes_match_closed_forms() {
        assert!((M::sphere(2).volume() - 4.0 * PI).abs() < 1e-13);
        assert!((M::real_projective(3).volume() - PI * PI).abs() < 1e-13);
        assert!((M::complex_projective(2).volume() - PI * PI / 2.0).abs() < 1e-13);
        assert!((M::complex_projective(1).volume() - PI).abs() < 1e-14);
    }

    #[test]
    fn exp_of_zero_is_identity() {
        let m = M::sphere(3);
        let x = m.point(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        let v = m.zero_tangent(&x);
        assert_eq!(m.exp_map(&x, &v).unwrap(), x);
    }

    #[test]
    fn rp_geodesics_close_with_length_pi() {
        let m = M::real_projective(3);
        let mut rng = RngStream::new(3).generator();
        let x = m.random_point(&mut rng);
        let u = m.random_unit_tangent(&x, &mut rng);
        let y = m.exp_raw(&x, &linalg::scale(&u.components, PI)).unwrap();
        assert!(m.distance(&x, &y) < 1e-7);
        assert!(linalg::max_abs(&linalg::sub(&x.coords, &y.coords)) < 1e-12);
    }

    #[test]
    fn cp_exp_reaches_max_distance() {
        let m = M::complex_projective(2);
        let mut rng = RngStream::new(5).generator();
        let x = m.random_point(&mut rng);
        let u = m.random_unit_tangent(&x, &mut rng);
        let y = m.exp_raw(&x, &linalg::scale(&u.components, FRAC_PI_2)).unwrap();
        // independent distance formula arccos |<z,w>|
        let (re, im) = linalg::hermitian(&x.coords, &y.coords);
        let d = (re * re + im * im).sqrt().min(1.0).acos();
        assert!((d - FRAC_PI_2).abs() < 1e-7);
        assert!((m.distance(&x, &y) - FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn log_of_same_point_is_zero() {
        let m = M::complex_projective(2);
        let mut rng = RngStream::new(9).generator();
        let x = m.random_point(&mut rng);
        let v = m.log_map(&x, &x).unwrap();
        assert!(v.norm() < 1e-15);
    }

    #[test]
    fn sphere_antipode_is_cut_locus() {
        let m = M::sphere(2);
        let x = m.point(&[0.0, 0.0, 1.0]).unwrap();
        let y = m.point(&[0.0, 0.0, -1.0]).unwrap();
        assert!(matches!(m.log_map(&x, &y), Err(GeometryError::CutLocus { .. })));
    }

    #[test]
    fn exp_rejects_foreign_tangent() {
        let m = M::sphere(2);
        let x = m.point(&[0.0, 0.0, 1.0]).unwrap();
        let y = m.point(&[0.0, 1.0, 0.0]).unwrap();
        let v = m.tangent(&y, &[1.0, 0.0, 0.0]);
        assert!(matches!(m.exp_map(&x, &v), Err(GeometryError::Domain(_))));
    }

    #[test]
    fn complex_structure_properties() {
        let m = M::complex_projective(2);
        let mut rng = RngStream::new(11).generator();
        let x = m.random_point(&mut rng);
        let u = m.random_unit_tangent(&x, &mut rng);
        let ju = m.complex_structure(&u).unwrap();
        let jju = m.complex_structure(&ju).unwrap();
        let r = linalg::add(&jju.components, &u.components);
        assert!(linalg::max_abs(&r) < 1e-15);
        assert!((ju.norm() - u.norm()).abs() < 1e-15);
        assert!(m.inner(&ju, &u).abs() < 1e-15);
        assert!(m.tangent_residual(&x, &ju.components) < 1e-15);
        assert!(M::sphere(2).complex_structure(&u).is_err());
    }

    #[test]
    fn killing_field_zero_and_axis() {
        let m = M::sphere(2);
        let x = m.point(&[0.0, 0.0, 1.0]).unwrap();
        let z = LieAlgebraElement::zero(3, false);
        assert!(m.killing_field(&z, &x).unwrap().norm() == 0.0);
        // rotation about the x2 axis fixes its poles
        let a = LieAlgebraElement::skew_symmetric(Matrix::from_rows(&[
            vec![0.0, -1.0, 0.0],
            vec![1.0, 0.0, 0.0],
            vec![0.0, 0.0, 0.0],
        ]))
        .unwrap();
        assert!(m.killing_field(&a, &x).unwrap().norm() < 1e-15);
        assert!(m.killing_field(&LieAlgebraElement::zero(4, false), &x).is_err());
    }

    #[test]
    fn killing_flow_is_isometric() {
        let m = M::complex_projective(2);
        let re = Matrix::from_rows(&[vec![0.0, 0.3, -0.1], vec![-0.3, 0.0, 0.2], vec![0.1, -0.2, 0.0]]);
        let im = Matrix::from_rows(&[vec![0.5, 0.1, 0.0], vec![0.1, -0.2, 0.4], vec![0.0, 0.4, 0.7]]);
        let a = LieAlgebraElement::skew_hermitian(&re, &im).unwrap();
        let g = a.flow(0.7);
        let mut rng = RngStream::new(2).generator();
        for _ in 0..20 {
            let x = m.random_point(&mut rng);
            let y = m.random_point(&mut rng);
            let d0 = m.distance(&x, &y);
            let d1 = m.distance(&g.apply(&m, &x).unwrap(), &g.apply(&m, &y).unwrap());
            assert!((d0 - d1).abs() < 1e-12);
        }
    }

    #[test]
    fn canonical_forms() {
        let rp = M::real_projective(2);
        let p = rp.point(&[0.0, -1.0, 1.0]).unwrap();
        assert!(p.coords[1] > 0.0);
        let cp = M::complex_projective(1);
        let p = cp.point(&[0.0, 1.0, 0.5, 0.5]).unwrap();
        assert!(p.coords[0] > 0.0 && p.coords[1] == 0.0);
        assert!(p.norm_residual() < 1e-15);
    }

    #[test]
    fn product_distance_is_euclidean_combination() {
        let m = M::product(vec![M::sphere(2), M::sphere_with_radius(2, 2.0)]);
        let x = m.point(&[0.0, 0.0, 1.0, 0.0, 0.0, 1.0]).unwrap();
        let y = m.point(&[0.0, 1.0, 0.0, 0.0, 1.0, 0.0]).unwrap();
        let d = m.distance(&x, &y);
        let expected = ((FRAC_PI_2).powi(2) + (PI).powi(2)).sqrt();
        assert!((d - expected).abs() < 1e-13);
        let v = m.log_map(&x, &y).unwrap();
        let back = m.exp_map(&x, &v).unwrap();
        assert!(m.distance(&back, &y) < 1e-12);
    }
}
