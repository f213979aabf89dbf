//! Explicit map families: rational curves, projective dilations, conformal
//! dilations of `S^3` and their capped versions on `RP^3`, perturbations, and a
//! catalog of standard maps addressed by string keys.

use num_complex::Complex;
use serde::Serialize;

use crate::energy::{p_energy, EnergyValue};
use crate::error::{GeometryError, Result};
use crate::intgeo::LineEmbedding;
use crate::linalg;
use crate::manifolds::{ModelManifold, Point};
use crate::maps::grid::mesh_grid;
use crate::maps::{MapObject, QuadratureGrid};
use crate::rng::RngStream;
use crate::scalar::{line_constant, Scalar};

/// `N+1` homogeneous polynomials of degree `d` in `(a, b)`;
/// `coefficients[j][k]` multiplies `a^{d-k} b^k` in the `j`-th component.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RationalCurveSpec {
    pub n: usize,
    pub degree: usize,
    pub coefficients: Vec<Vec<(f64, f64)>>,
}

fn horner(coefs: &[Complex<f64>], t: Complex<f64>) -> Complex<f64> {
    coefs.iter().fold(Complex::new(0.0, 0.0), |acc, &c| acc * t + c)
}

/// Roots of `Σ c_k t^{n-k}` (leading coefficient first) by Durand-Kerner.
fn polynomial_roots(coefs: &[Complex<f64>]) -> Vec<Complex<f64>> {
    let lead = coefs[0];
    let monic: Vec<Complex<f64>> = coefs.iter().map(|c| c / lead).collect();
    let deg = monic.len() - 1;
    let seed = Complex::new(0.4, 0.9);
    let mut roots: Vec<Complex<f64>> = (0..deg).map(|k| seed.powu(k as u32)).collect();
    for _ in 0..500 {
        let mut delta: f64 = 0.0;
        for i in 0..deg {
            let mut denom = Complex::new(1.0, 0.0);
            for j in 0..deg {
                if i != j {
                    denom *= roots[i] - roots[j];
                }
            }
            let step = horner(&monic, roots[i]) / denom;
            roots[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-15 {
            break;
        }
    }
    roots
}

impl RationalCurveSpec {
    pub fn new(n: usize, degree: usize, coefficients: Vec<Vec<(f64, f64)>>) -> Result<Self> {
        let spec = Self {
            n,
            degree,
            coefficients,
        };
        spec.validate()?;
        Ok(spec)
    }

    fn complex(&self) -> Vec<Vec<Complex<f64>>> {
        self.coefficients
            .iter()
            .map(|p| p.iter().map(|&(re, im)| Complex::new(re, im)).collect())
            .collect()
    }

    /// Shape checks plus a resultant-style common-zero test: the roots of one
    /// component (and the point `[1:0]`) must not annihilate every component,
    /// and no probe point may give a near-zero normalized value.
    pub fn validate(&self) -> Result<()> {
        if self.degree == 0 || self.coefficients.len() != self.n + 1 {
            return Err(GeometryError::Construction(format!(
                "expected {} polynomials of positive degree",
                self.n + 1
            )));
        }
        if self.coefficients.iter().any(|p| p.len() != self.degree + 1) {
            return Err(GeometryError::Construction(format!(
                "every polynomial needs {} coefficients",
                self.degree + 1
            )));
        }
        let polys = self.complex();
        let scale = polys.iter().flatten().fold(0.0f64, |m, c| m.max(c.norm()));
        if scale == 0.0 {
            return Err(GeometryError::Construction("all coefficients vanish".into()));
        }
        let tol = 1e-8;
        let value_at = |a: Complex<f64>, b: Complex<f64>| -> f64 {
            let r = (a.norm_sqr() + b.norm_sqr()).sqrt();
            let (a, b) = (a / r, b / r);
            let v: f64 = polys
                .iter()
                .map(|p| eval_homogeneous(p, a, b).norm_sqr())
                .sum::<f64>()
                .sqrt();
            v / scale
        };
        // [1:0]
        if value_at(Complex::new(1.0, 0.0), Complex::new(0.0, 0.0)) < tol {
            return Err(GeometryError::Construction("common zero at [1:0]".into()));
        }
        // affine roots t = a/b of the first polynomial that is not a pure a^d multiple
        if let Some(p) = polys.iter().find(|p| p.iter().skip(1).any(|c| c.norm() > 0.0)) {
            // in t = a/b (b = 1): Σ c_k t^{d-k}; strip vanishing leading terms
            let first = p.iter().position(|c| c.norm() > 0.0).unwrap_or(0);
            let trimmed = &p[first..];
            if trimmed.len() > 1 {
                for t in polynomial_roots(trimmed) {
                    if value_at(t, Complex::new(1.0, 0.0)) < tol {
                        return Err(GeometryError::Construction(format!("common zero at [{t}:1]")));
                    }
                }
            }
        }
        let mut rng = RngStream::new(0x5eed).generator();
        for _ in 0..1000 {
            let g: Vec<f64> = rng.gaussian_vec(4);
            if value_at(Complex::new(g[0], g[1]), Complex::new(g[2], g[3])) < tol {
                return Err(GeometryError::Construction("near common zero at a probe point".into()));
            }
        }
        Ok(())
    }

    /// `[a : b : 0 : ... : 0]`.
    pub fn line(n: usize) -> Self {
        let mut c = vec![vec![(0.0, 0.0); 2]; n + 1];
        c[0][0] = (1.0, 0.0);
        c[1][1] = (1.0, 0.0);
        Self {
            n,
            degree: 1,
            coefficients: c,
        }
    }

    /// `[a² - b² : i(a² + b²) : 2ab]`, the conic `z_0² + z_1² + z_2² = 0`.
    pub fn conic() -> Self {
        Self {
            n: 2,
            degree: 2,
            coefficients: vec![
                vec![(1.0, 0.0), (0.0, 0.0), (-1.0, 0.0)],
                vec![(0.0, 1.0), (0.0, 0.0), (0.0, 1.0)],
                vec![(0.0, 0.0), (2.0, 0.0), (0.0, 0.0)],
            ],
        }
    }

    /// `[a^d : ... : sqrt(binom(d,k)) a^{d-k} b^k : ... : b^d]` in `CP^d`.
    pub fn veronese(d: usize) -> Self {
        let mut c = vec![vec![(0.0, 0.0); d + 1]; d + 1];
        let mut binom = 1.0f64;
        for (k, row) in c.iter_mut().enumerate() {
            row[k] = (binom.sqrt(), 0.0);
            binom = binom * (d - k) as f64 / (k + 1) as f64;
        }
        Self {
            n: d,
            degree: d,
            coefficients: c,
        }
    }

    /// Gaussian coefficients, resampled until the spec validates.
    pub fn random(n: usize, degree: usize, seed: u64) -> Result<Self> {
        for attempt in 0..16 {
            let mut rng = RngStream::new(seed).split(attempt).generator();
            let coefficients = (0..=n)
                .map(|_| {
                    (0..=degree)
                        .map(|_| (rng.gaussian::<f64>(), rng.gaussian::<f64>()))
                        .collect()
                })
                .collect();
            if let Ok(s) = Self::new(n, degree, coefficients) {
                return Ok(s);
            }
        }
        Err(GeometryError::Construction(
            "no valid random spec after 16 attempts".into(),
        ))
    }
}

fn eval_homogeneous(p: &[Complex<f64>], a: Complex<f64>, b: Complex<f64>) -> Complex<f64> {
    let d = p.len() - 1;
    p.iter()
        .enumerate()
        .map(|(k, &c)| c * a.powu((d - k) as u32) * b.powu(k as u32))
        .sum()
}

fn to_complex<T: Scalar>(re: T, im: T) -> Complex<T> {
    Complex::new(re, im)
}

/// Holomorphic map `CP^1 → CP^N`, `[a:b] ↦ [p_0(a,b) : ... : p_N(a,b)]`.
pub fn make_rational_curve<T: Scalar>(spec: &RationalCurveSpec) -> Result<MapObject<T>> {
    spec.validate()?;
    let polys: Vec<Vec<Complex<T>>> = spec
        .coefficients
        .iter()
        .map(|p| p.iter().map(|&(re, im)| Complex::new(T::of(re), T::of(im))).collect())
        .collect();
    let d = spec.degree;
    let p1 = polys.clone();
    let lift = move |ab: &[T]| -> Vec<T> {
        let (a, b) = (to_complex(ab[0], ab[1]), to_complex(ab[2], ab[3]));
        let mut out = Vec::with_capacity(2 * p1.len());
        for p in &p1 {
            let v: Complex<T> = p
                .iter()
                .enumerate()
                .map(|(k, &c)| c * a.powu((d - k) as u32) * b.powu(k as u32))
                .fold(Complex::new(T::zero(), T::zero()), |s, x| s + x);
            out.push(v.re);
            out.push(v.im);
        }
        out
    };
    let dlift = move |ab: &[T], v: &[T]| -> Vec<T> {
        let (a, b) = (to_complex(ab[0], ab[1]), to_complex(ab[2], ab[3]));
        let (va, vb) = (to_complex(v[0], v[1]), to_complex(v[2], v[3]));
        let zero = Complex::new(T::zero(), T::zero());
        let mut out = Vec::with_capacity(2 * polys.len());
        for p in &polys {
            let mut s = zero;
            for (k, &c) in p.iter().enumerate() {
                let (i, j) = (d - k, k);
                if i > 0 {
                    s = s + c * T::of_usize(i) * a.powu(i as u32 - 1) * b.powu(j as u32) * va;
                }
                if j > 0 {
                    s = s + c * T::of_usize(j) * a.powu(i as u32) * b.powu(j as u32 - 1) * vb;
                }
            }
            out.push(s.re);
            out.push(s.im);
        }
        out
    };
    Ok(MapObject::lifted(
        ModelManifold::complex_projective(1),
        ModelManifold::complex_projective(spec.n),
        format!("rational(degree {}, CP{})", spec.degree, spec.n),
        lift,
        dlift,
    ))
}

/// `T_λ[z] = [λz_0 : λz_1 : z_2 : ... : z_N]`.
pub fn make_projective_dilation<T: Scalar>(n: usize, lambda: T) -> Result<MapObject<T>> {
    if !(lambda > T::zero()) {
        return Err(GeometryError::Domain(format!(
            "dilation factor must be positive, got {lambda}"
        )));
    }
    let scale = move |z: &[T]| -> Vec<T> {
        z.iter()
            .enumerate()
            .map(|(k, &c)| if k < 4 { c * lambda } else { c })
            .collect()
    };
    let m = ModelManifold::complex_projective(n);
    Ok(MapObject::lifted(
        m.clone(),
        m,
        format!("dilation(CP{n},{lambda})"),
        scale,
        move |_, v| scale(v),
    ))
}

/// Result of the squeeze construction: energies of `F∘T_λ` and the limit target
/// `C_N E_2(F|_{P_0})`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SqueezeResult<T> {
    pub lambdas: Vec<T>,
    pub energies: Vec<EnergyValue<T>>,
    pub line_energy: T,
    pub target: T,
}

/// Energies of `F∘T_λ` over a λ schedule, and the independently computed target.
pub fn squeeze_limit<T: Scalar>(
    f: &MapObject<T>,
    lambdas: &[T],
    grid: &QuadratureGrid<T>,
    line_level: usize,
) -> Result<SqueezeResult<T>> {
    let n = match f.domain {
        ModelManifold::ComplexProjective { n } if n >= 1 => n,
        _ => return Err(GeometryError::Domain(format!("{} is not defined on CP^N", f.label))),
    };
    let energies = lambdas
        .iter()
        .map(|&l| {
            let g = MapObject::compose(f, &make_projective_dilation(n, l)?)?;
            p_energy(&g, grid, T::of(2.0))
        })
        .collect::<Result<Vec<_>>>()?;
    let restricted = MapObject::compose(f, &LineEmbedding::coordinate(n).embedding())?;
    let line_grid = mesh_grid(&ModelManifold::complex_projective(1), line_level)?;
    let line_energy = p_energy(&restricted, &line_grid, T::of(2.0))?.value();
    Ok(SqueezeResult {
        lambdas: lambdas.to_vec(),
        energies,
        line_energy,
        target: line_constant::<T>(n) * line_energy,
    })
}

fn theta_lift<T: Scalar>(t: T, x: &[T]) -> Vec<T> {
    let s = T::one() + x[0];
    let r2: T = x[1..].iter().map(|&c| c * c).sum();
    let mut out = Vec::with_capacity(x.len());
    out.push(s * s - t * t * r2);
    out.extend(x[1..].iter().map(|&c| T::of(2.0) * t * s * c));
    out
}

fn theta_dlift<T: Scalar>(t: T, x: &[T], v: &[T]) -> Vec<T> {
    let s = T::one() + x[0];
    let xv: T = x[1..].iter().zip(&v[1..]).map(|(&a, &b)| a * b).sum();
    let mut out = Vec::with_capacity(x.len());
    out.push(T::of(2.0) * s * v[0] - T::of(2.0) * t * t * xv);
    out.extend(
        x[1..]
            .iter()
            .zip(&v[1..])
            .map(|(&c, &dc)| T::of(2.0) * t * (v[0] * c + s * dc)),
    );
    out
}

/// Conformal dilation of `S^3` by `t` in stereographic coordinates centered at `e_0`.
pub fn make_theta<T: Scalar>(t: T) -> Result<MapObject<T>> {
    if t < T::one() {
        return Err(GeometryError::Domain(format!("dilation parameter t = {t} is below 1")));
    }
    let m = ModelManifold::sphere(3);
    Ok(MapObject::lifted(
        m.clone(),
        m,
        format!("theta({t})"),
        move |x| theta_lift(t, x),
        move |x, v| theta_dlift(t, x, v),
    ))
}

/// Seam radius `ψ_t = 2 arctan(1/t)` between the dilated cap and the collar.
pub fn capped_theta_seam<T: Scalar>(t: T) -> T {
    T::of(2.0) * (T::one() / t).atan()
}

/// `Θ_t` on `RP^3`: `θ_t` on the cap `tan(ψ/2) < 1/t` around `p_0 = [e_0]`, radial
/// projection from `p_0` onto `Q_0 = {x_0 = 0}` outside it. Lipschitz; fixes `Q_0`.
pub fn make_capped_theta<T: Scalar>(t: T) -> Result<MapObject<T>> {
    if t < T::one() {
        return Err(GeometryError::Domain(format!("dilation parameter t = {t} is below 1")));
    }
    // lift on the hemisphere x_0 ≥ 0
    let oriented = |x: &[T], v: &[T]| -> (Vec<T>, Vec<T>) {
        if x[0] < T::zero() {
            (linalg::scale(x, -T::one()), linalg::scale(v, -T::one()))
        } else {
            (x.to_vec(), v.to_vec())
        }
    };
    let in_cap = move |x: &[T]| {
        let r: T = x[1..].iter().map(|&c| c * c).sum::<T>().sqrt();
        t * r < T::one() + x[0]
    };
    let lift = move |x: &[T]| -> Vec<T> {
        let (x, _) = oriented(x, x);
        if in_cap(&x) {
            theta_lift(t, &x)
        } else {
            let mut out = x.clone();
            out[0] = T::zero();
            out
        }
    };
    let dlift = move |x: &[T], v: &[T]| -> Vec<T> {
        let (x, v) = oriented(x, v);
        if in_cap(&x) {
            theta_dlift(t, &x, &v)
        } else {
            let mut out = v.clone();
            out[0] = T::zero();
            out
        }
    };
    let m = ModelManifold::real_projective(3);
    Ok(MapObject::lifted(m.clone(), m, format!("capped_theta({t})"), lift, dlift).lipschitz())
}

type PolynomialField<T> = Box<dyn Fn(&[T]) -> Vec<T> + Send + Sync>;

/// `exp_x(ε X(x))` for a fixed polynomial tangent field `X`: on `CP^N`
/// `X_j = z_{j+1}|z_j|²` (horizontally projected), on `S^n` the gradient of
/// `x_0 x_1 x_2`, on `RP^n` the gradient of `x_0 x_1 + x_1 x_2`. Smooth and homotopic to the identity; no analytic differential.
pub fn perturbed_identity<T: Scalar>(m: &ModelManifold<T>, magnitude: T) -> Result<MapObject<T>> {
    let mm = m.clone();
    let field: PolynomialField<T> = match m {
        ModelManifold::ComplexProjective { n } => {
            let k = n + 1;
            Box::new(move |z: &[T]| {
                let mut out = vec![T::zero(); 2 * k];
                for j in 0..k {
                    let nxt = (j + 1) % k;
                    let m2 = z[2 * j] * z[2 * j] + z[2 * j + 1] * z[2 * j + 1];
                    out[2 * j] = z[2 * nxt] * m2;
                    out[2 * j + 1] = z[2 * nxt + 1] * m2;
                }
                out
            })
        }
        ModelManifold::Sphere { dim, .. } if *dim >= 2 => {
            let d = *dim;
            Box::new(move |x: &[T]| {
                let mut out = vec![T::zero(); d + 1];
                out[0] = x[1] * x[2];
                out[1] = x[0] * x[2];
                out[2] = x[0] * x[1];
                out
            })
        }
        ModelManifold::RealProjective { dim, .. } if *dim >= 2 => {
            let d = *dim;
            Box::new(move |x: &[T]| {
                let mut out = vec![T::zero(); d + 1];
                out[0] = x[1];
                out[1] = x[0] + x[2];
                out[2] = x[1];
                out
            })
        }
        _ => return Err(GeometryError::Domain(format!("no perturbation field on {}", m.label()))),
    };
    let r = m.radius();
    Ok(MapObject::new(
        m.clone(),
        m.clone(),
        format!("perturbed({},{magnitude})", m.label()),
        move |x| {
            let w = mm.project_tangent(x, &field(&x.coords));
            mm.exp_raw(x, &linalg::scale(&w, magnitude * r))
        },
    ))
}

/// Latitude squash `(θ, φ) ↦ (θ + 0.2 sin 2θ, φ)` on `S^2`, polar angle from `e_2`.
pub fn latitude_squash<T: Scalar>() -> MapObject<T> {
    let m = ModelManifold::<T>::sphere(2);
    MapObject::new(m.clone(), m.clone(), "latitude_squash", move |x| {
        let rho = (x.coords[0] * x.coords[0] + x.coords[1] * x.coords[1]).sqrt();
        let th = rho.atan2(x.coords[2]);
        let th2 = th + T::of(0.2) * (T::of(2.0) * th).sin();
        // sin(θ')/sin(θ) stays bounded at the poles
        let ratio = if rho > T::of(1e-300) {
            th2.sin() / rho
        } else {
            T::of(1.4)
        };
        m.point(&[x.coords[0] * ratio, x.coords[1] * ratio, th2.cos()])
    })
}

/// Parses `S2`, `S2(0.5)`, `RP3`, `RP2(2)`, `CP2`.
pub fn parse_manifold<T: Scalar>(key: &str) -> Result<ModelManifold<T>> {
    let key = key.trim();
    let (head, radius) = match key.find('(') {
        Some(i) if key.ends_with(')') => {
            let r: f64 = key[i + 1..key.len() - 1]
                .trim()
                .parse()
                .map_err(|_| GeometryError::Domain(format!("bad radius in {key}")))?;
            (&key[..i], Some(r))
        }
        _ => (key, None),
    };
    let num = |s: &str| -> Result<usize> {
        s.parse()
            .map_err(|_| GeometryError::Domain(format!("bad dimension in manifold key {key}")))
    };
    let radius = T::of(radius.unwrap_or(1.0));
    if radius <= T::zero() {
        return Err(GeometryError::Domain(format!("radius must be positive in {key}")));
    }
    if let Some(d) = head.strip_prefix("RP") {
        Ok(ModelManifold::RealProjective { dim: num(d)?, radius })
    } else if let Some(d) = head.strip_prefix("CP") {
        if radius != T::one() {
            return Err(GeometryError::Domain("CP^N carries a fixed normalization".into()));
        }
        Ok(ModelManifold::complex_projective(num(d)?))
    } else if let Some(d) = head.strip_prefix('S') {
        Ok(ModelManifold::Sphere { dim: num(d)?, radius })
    } else {
        Err(GeometryError::Domain(format!("unknown manifold key {key}")))
    }
}

/// Splits `name(a, b(c, d))` into `("name", ["a", "b(c, d)"])`.
fn split_key(key: &str) -> Result<(String, Vec<String>)> {
    let key = key.trim();
    let Some(open) = key.find('(') else {
        return Ok((key.to_string(), vec![]));
    };
    if !key.ends_with(')') {
        return Err(GeometryError::Domain(format!("unbalanced parentheses in {key}")));
    }
    let inner = &key[open + 1..key.len() - 1];
    let mut args = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for ch in inner.chars() {
        match ch {
            '(' => {
                depth += 1;
                cur.push(ch);
            }
            ')' => {
                depth -= 1;
                cur.push(ch);
            }
            ',' if depth == 0 => {
                args.push(cur.trim().to_string());
                cur.clear();
            }
            _ => cur.push(ch),
        }
    }
    if depth != 0 {
        return Err(GeometryError::Domain(format!("unbalanced parentheses in {key}")));
    }
    if !cur.trim().is_empty() {
        args.push(cur.trim().to_string());
    }
    Ok((key[..open].trim().to_string(), args))
}

fn parse_scalar<T: Scalar>(s: &str) -> Result<T> {
    s.trim()
        .parse::<f64>()
        .map(T::of)
        .map_err(|_| GeometryError::Domain(format!("expected a number, found {s}")))
}

fn pad_inclusion<T: Scalar>(from: ModelManifold<T>, to: ModelManifold<T>) -> Result<MapObject<T>> {
    if from.ambient_dim() > to.ambient_dim() || from.is_complex() != to.is_complex() {
        return Err(GeometryError::Domain(format!(
            "no standard inclusion {} ⊂ {}",
            from.label(),
            to.label()
        )));
    }
    let d = to.ambient_dim();
    let pad = move |x: &[T]| {
        let mut out = x.to_vec();
        out.resize(d, T::zero());
        out
    };
    let label = format!("inclusion({},{})", from.label(), to.label());
    Ok(MapObject::lifted(from, to, label, pad, move |_, v| pad(v)))
}

/// Map `[a:b] ↦ [ā : b̄]` of `CP^1`.
pub fn conjugation<T: Scalar>() -> MapObject<T> {
    let m = ModelManifold::complex_projective(1);
    MapObject::lifted(m.clone(), m, "conjugation", |z| linalg::conj(z), |_, v| linalg::conj(v))
}

/// `f_r(x) = (f(x), x) ∈ M × S^n(r)` for `f` defined on a unit sphere `S^n`.
pub fn product_lift<T: Scalar>(f: &MapObject<T>, r: T) -> Result<MapObject<T>> {
    let n = match f.domain {
        ModelManifold::Sphere { dim, radius } if radius == T::one() => dim,
        _ => {
            return Err(GeometryError::Domain(
                "product lifts are defined for maps from unit spheres".into(),
            ))
        }
    };
    if r <= T::zero() {
        return Err(GeometryError::Domain("product lift radius must be positive".into()));
    }
    let cod = ModelManifold::product(vec![f.codomain.clone(), ModelManifold::sphere_with_radius(n, r)]);
    let (f1, f2) = (f.clone(), f.clone());
    let dom = f.domain.clone();
    let label = format!("product_lift({},{r})", f.label);
    let m = MapObject::new(f.domain.clone(), cod, label, move |x| {
        let mut c = f1.evaluate(x)?.coords;
        c.extend_from_slice(&x.coords);
        Ok(Point {
            coords: c,
            canonical: true,
        })
    });
    Ok(m.with_pushforward(move |x, vs| {
        let (y, cols) = f2.push_forward(x, vs)?;
        let mut coords = y.coords;
        coords.extend_from_slice(&x.coords);
        let out = cols
            .into_iter()
            .zip(vs)
            .map(|(mut c, v)| {
                c.extend(linalg::scale(&dom.project_tangent(x, v), r));
                c
            })
            .collect();
        Ok((
            Point {
                coords,
                canonical: true,
            },
            out,
        ))
    }))
}

/// One entry of the map catalog.
pub struct CatalogEntry {
    pub key: &'static str,
    pub description: &'static str,
}

pub const CATALOG: &[CatalogEntry] = &[
    CatalogEntry {
        key: "identity(M)",
        description: "identity of S<n>, S<n>(r), RP<n> or CP<N>",
    },
    CatalogEntry {
        key: "inclusion(RP<k>,RP<n>)",
        description: "totally geodesic linear inclusion",
    },
    CatalogEntry {
        key: "inclusion(CP<k>,CP<N>)",
        description: "totally geodesic linear inclusion",
    },
    CatalogEntry {
        key: "double_cover",
        description: "S2 → RP2, x ↦ [x]",
    },
    CatalogEntry {
        key: "homothety(S<n>|RP<n>,k)",
        description: "unit space onto the same space of radius k",
    },
    CatalogEntry {
        key: "product_lift(f,r)",
        description: "x ↦ (f(x), x) into M × S<n>(r)",
    },
    CatalogEntry {
        key: "dilation(CP<N>,l)",
        description: "[z] ↦ [l z0 : l z1 : z2 : ...]",
    },
    CatalogEntry {
        key: "rational(line|conic|veronese<d>|random<d>[,seed])",
        description: "holomorphic curve CP1 → CP<N>",
    },
    CatalogEntry {
        key: "conjugation",
        description: "antiholomorphic [a:b] ↦ [ā:b̄] of CP1",
    },
    CatalogEntry {
        key: "theta(t)",
        description: "conformal dilation of S3 by t",
    },
    CatalogEntry {
        key: "capped_theta(t)",
        description: "dilated cap plus radial projection onto RP2 ⊂ RP3",
    },
    CatalogEntry {
        key: "perturbed(M,e)",
        description: "exp-push of the identity along a fixed polynomial field",
    },
    CatalogEntry {
        key: "latitude_squash",
        description: "(θ, φ) ↦ (θ + 0.2 sin 2θ, φ) on S2",
    },
    CatalogEntry {
        key: "constant(M)",
        description: "constant map of M onto its first basis point",
    },
    CatalogEntry {
        key: "compose(f,g)",
        description: "f ∘ g",
    },
];

/// Builds a map from a catalog key such as `identity(CP2)` or `product_lift(identity(S2),0.5)`.
pub fn standard_map<T: Scalar>(key: &str) -> Result<MapObject<T>> {
    let (name, args) = split_key(key)?;
    let arity = |n: usize| -> Result<()> {
        if args.len() != n {
            return Err(GeometryError::Domain(format!(
                "{name} takes {n} argument(s), got {}",
                args.len()
            )));
        }
        Ok(())
    };
    match name.as_str() {
        "identity" => {
            arity(1)?;
            Ok(MapObject::identity(parse_manifold(&args[0])?))
        }
        "constant" => {
            arity(1)?;
            let m = parse_manifold::<T>(&args[0])?;
            let mut e = vec![T::zero(); m.ambient_dim()];
            e[0] = T::one();
            let p = m.point(&e)?;
            Ok(MapObject::constant(m.clone(), m, p))
        }
        "inclusion" => {
            arity(2)?;
            pad_inclusion(parse_manifold(&args[0])?, parse_manifold(&args[1])?)
        }
        "double_cover" => {
            arity(0)?;
            Ok(MapObject::lifted(
                ModelManifold::sphere(2),
                ModelManifold::real_projective(2),
                "double_cover",
                |x| x.to_vec(),
                |_, v| v.to_vec(),
            ))
        }
        "homothety" => {
            arity(2)?;
            let k: T = parse_scalar(&args[1])?;
            if k <= T::zero() {
                return Err(GeometryError::Domain("homothety factor must be positive".into()));
            }
            let (from, to) = match parse_manifold::<T>(&args[0])? {
                ModelManifold::Sphere { dim, radius } if radius == T::one() => {
                    (ModelManifold::sphere(dim), ModelManifold::Sphere { dim, radius: k })
                }
                ModelManifold::RealProjective { dim, radius } if radius == T::one() => (
                    ModelManifold::real_projective(dim),
                    ModelManifold::RealProjective { dim, radius: k },
                ),
                _ => return Err(GeometryError::Domain("homotheties act on unit S<n> or RP<n>".into())),
            };
            let label = format!("homothety({},{k})", from.label());
            Ok(MapObject::lifted(from, to, label, |x| x.to_vec(), |_, v| v.to_vec()))
        }
        "product_lift" => {
            arity(2)?;
            product_lift(&standard_map(&args[0])?, parse_scalar(&args[1])?)
        }
        "dilation" => {
            arity(2)?;
            match parse_manifold::<T>(&args[0])? {
                ModelManifold::ComplexProjective { n } => make_projective_dilation(n, parse_scalar(&args[1])?),
                _ => Err(GeometryError::Domain("dilations act on CP<N>".into())),
            }
        }
        "rational" => {
            if args.is_empty() || args.len() > 2 {
                return Err(GeometryError::Domain(
                    "rational takes a curve name and an optional seed".into(),
                ));
            }
            let seed: u64 = match args.get(1) {
                Some(s) => s.parse().map_err(|_| GeometryError::Domain(format!("bad seed {s}")))?,
                None => 0,
            };
            let a = args[0].as_str();
            let spec = if a == "line" {
                RationalCurveSpec::line(2)
            } else if a == "conic" {
                RationalCurveSpec::conic()
            } else if let Some(d) = a.strip_prefix("veronese") {
                RationalCurveSpec::veronese(
                    d.parse()
                        .map_err(|_| GeometryError::Domain(format!("bad degree in {a}")))?,
                )
            } else if let Some(d) = a.strip_prefix("random") {
                let d: usize = d
                    .parse()
                    .map_err(|_| GeometryError::Domain(format!("bad degree in {a}")))?;
                RationalCurveSpec::random(2, d, seed)?
            } else {
                return Err(GeometryError::Domain(format!("unknown rational curve {a}")));
            };
            make_rational_curve(&spec)
        }
        "conjugation" => {
            arity(0)?;
            Ok(conjugation())
        }
        "theta" => {
            arity(1)?;
            make_theta(parse_scalar(&args[0])?)
        }
        "capped_theta" => {
            arity(1)?;
            make_capped_theta(parse_scalar(&args[0])?)
        }
        "perturbed" => {
            arity(2)?;
            perturbed_identity(&parse_manifold(&args[0])?, parse_scalar(&args[1])?)
        }
        "latitude_squash" => {
            arity(0)?;
            Ok(latitude_squash())
        }
        "compose" => {
            arity(2)?;
            MapObject::compose(&standard_map(&args[0])?, &standard_map(&args[1])?)
        }
        _ => Err(GeometryError::Domain(format!("unknown map key {key}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;

    #[test]
    fn parameter_one_is_identity() {
        let mut rng = RngStream::new(1).generator();
        let cp = ModelManifold::<f64>::complex_projective(2);
        let t1 = make_projective_dilation(2, 1.0).unwrap();
        let th = make_theta(1.0).unwrap();
        let cth = make_capped_theta(1.0).unwrap();
        let s3 = ModelManifold::<f64>::sphere(3);
        let rp3 = ModelManifold::<f64>::real_projective(3);
        for _ in 0..50 {
            let x = cp.random_point(&mut rng);
            assert!(cp.distance(&t1.evaluate(&x).unwrap(), &x) < 1e-12);
            let y = s3.random_point(&mut rng);
            assert!(s3.distance(&th.evaluate(&y).unwrap(), &y) < 1e-7);
            let z = rp3.random_point(&mut rng);
            assert!(rp3.distance(&cth.evaluate(&z).unwrap(), &z) < 1e-7);
        }
    }

    #[test]
    fn nonpositive_dilation_is_rejected() {
        assert!(make_projective_dilation::<f64>(2, 0.0).is_err());
        assert!(make_projective_dilation::<f64>(2, -1.0).is_err());
        assert!(make_theta::<f64>(0.5).is_err());
    }

    #[test]
    fn dilation_preserves_coordinate_line() {
        let m = ModelManifold::<f64>::complex_projective(2);
        let t = make_projective_dilation(2, 4.0).unwrap();
        let x = m.point(&[0.3, 0.1, -0.5, 0.7, 0.0, 0.0]).unwrap();
        let y = t.evaluate(&x).unwrap();
        assert!(m.distance(&x, &y) < 1e-12);
    }

    #[test]
    fn common_zero_is_detected() {
        // a(a - b) and a b share the zero [0:1]
        let bad = RationalCurveSpec::new(
            1,
            2,
            vec![
                vec![(1.0, 0.0), (-1.0, 0.0), (0.0, 0.0)],
                vec![(0.0, 0.0), (1.0, 0.0), (0.0, 0.0)],
            ],
        );
        assert!(matches!(bad, Err(GeometryError::Construction(_))));
        // (a - 2b)(a + b) and (a - 2b) b share [2:1]
        let bad = RationalCurveSpec::new(
            1,
            2,
            vec![
                vec![(1.0, 0.0), (-1.0, 0.0), (-2.0, 0.0)],
                vec![(0.0, 0.0), (1.0, 0.0), (-2.0, 0.0)],
            ],
        );
        assert!(bad.is_err());
        assert!(RationalCurveSpec::conic().validate().is_ok());
        assert!(RationalCurveSpec::veronese(3).validate().is_ok());
        assert!(RationalCurveSpec::random(2, 3, 4).is_ok());
    }

    #[test]
    fn conic_lies_on_quadric() {
        let f = make_rational_curve::<f64>(&RationalCurveSpec::conic()).unwrap();
        let mut rng = RngStream::new(3).generator();
        let m = ModelManifold::<f64>::complex_projective(1);
        for _ in 0..20 {
            let z = f.evaluate(&m.random_point(&mut rng)).unwrap().coords;
            let sq = |re: f64, im: f64| (re * re - im * im, 2.0 * re * im);
            let (a, b, c) = (sq(z[0], z[1]), sq(z[2], z[3]), sq(z[4], z[5]));
            assert!((a.0 + b.0 + c.0).abs() < 1e-12 && (a.1 + b.1 + c.1).abs() < 1e-12);
        }
    }

    #[test]
    fn capped_theta_is_continuous_at_the_seam() {
        let t = 4.0;
        let f = make_capped_theta(t).unwrap();
        let m = ModelManifold::<f64>::real_projective(3);
        let seam = capped_theta_seam(t);
        let mut rng = RngStream::new(5).generator();
        for _ in 0..1000 {
            let w: Vec<f64> = rng.gaussian_vec(3);
            let w = linalg::normalized(&w).unwrap();
            let at = |psi: f64| {
                let c = [psi.cos(), psi.sin() * w[0], psi.sin() * w[1], psi.sin() * w[2]];
                f.evaluate(&m.point(&c).unwrap()).unwrap()
            };
            let (a, b) = (at(seam - 1e-12), at(seam + 1e-12));
            assert!(m.distance(&a, &b) < 1e-8);
        }
    }

    #[test]
    fn catalog_keys_parse() {
        for key in [
            "identity(CP2)",
            "identity(S2(0.5))",
            "inclusion(RP2,RP3)",
            "inclusion(CP1,CP2)",
            "double_cover",
            "homothety(RP2,2)",
            "product_lift(identity(S2),0.5)",
            "dilation(CP2,4)",
            "rational(conic)",
            "rational(random3,7)",
            "conjugation",
            "theta(2)",
            "capped_theta(8)",
            "perturbed(CP2,0.2)",
            "latitude_squash",
            "constant(RP3)",
            "compose(identity(CP2),dilation(CP2,2))",
        ] {
            assert!(standard_map::<f64>(key).is_ok(), "{key}");
        }
        assert!(matches!(standard_map::<f64>("unknown"), Err(GeometryError::Domain(_))));
        assert!(standard_map::<f64>("inclusion(RP3,RP2)").is_err());
    }
}
