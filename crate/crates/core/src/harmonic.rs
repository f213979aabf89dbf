//! Second fundamental forms, tension, pluriharmonic and Hermitian residuals,
//! second variation of the energy, and the diagnostics built from them.

use std::sync::Arc;

use log::warn;
use serde::Serialize;

use crate::energy::{integrate, p_energy};
use crate::error::{GeometryError, Result};
use crate::intgeo::LineEmbedding;
use crate::linalg::{self, Matrix};
use crate::manifolds::{LieAlgebraElement, ModelManifold, Point, TangentVector};
use crate::maps::{differential, pullback_gram, MapObject, QuadratureGrid, TangentFrame, DEFAULT_STEP};
use crate::scalar::Scalar;

/// Step for second differences.
pub const SECOND_STEP: f64 = 1e-3;
/// Step `τ` of the five-point stencil in the variation parameter.
pub const VARIATION_STEP: f64 = 1e-2;

#[derive(Debug, Clone, PartialEq)]
pub struct SecondFormSample<T> {
    pub base: Point<T>,
    pub v: Vec<T>,
    pub w: Vec<T>,
    /// `α_F(v, w)`, tangent at `F(base)`.
    pub value: TangentVector<T>,
}

/// Intrinsic acceleration of `t ↦ F(exp_x(t v))` at `t = 0`, by a second difference
/// of codomain logarithms.
fn acceleration<T: Scalar>(f: &MapObject<T>, x: &Point<T>, y: &Point<T>, v: &[T], h: T) -> Result<Vec<T>> {
    let xp = f.domain.exp_raw(x, &linalg::scale(v, h))?;
    let xm = f.domain.exp_raw(x, &linalg::scale(v, -h))?;
    let lp = f.codomain.log_raw(y, &f.evaluate(&xp)?.coords)?;
    let lm = f.codomain.log_raw(y, &f.evaluate(&xm)?.coords)?;
    Ok(lp.iter().zip(&lm).map(|(&a, &b)| (a + b) / (h * h)).collect())
}

fn alpha<T: Scalar>(f: &MapObject<T>, x: &Point<T>, y: &Point<T>, v: &[T], w: &[T], h: T) -> Result<Vec<T>> {
    let a = acceleration(f, x, y, &linalg::add(v, w), h)?;
    let b = acceleration(f, x, y, &linalg::sub(v, w), h)?;
    Ok(linalg::scale(&linalg::sub(&a, &b), T::of(0.25)))
}

/// `α_F(v, w)` by geodesic acceleration and polarization.
pub fn second_fundamental_form<T: Scalar>(
    f: &MapObject<T>,
    x: &Point<T>,
    v: &[T],
    w: &[T],
    h: T,
) -> Result<SecondFormSample<T>> {
    let y = f.evaluate(x)?;
    let value = alpha(f, x, &y, v, w, h)?;
    Ok(SecondFormSample {
        base: x.clone(),
        v: v.to_vec(),
        w: w.to_vec(),
        value: TangentVector {
            base: y,
            components: value,
        },
    })
}

/// `Σ_i α_F(e_i, e_i)` in the standard frame.
pub fn tension<T: Scalar>(f: &MapObject<T>, x: &Point<T>, h: T) -> Result<TangentVector<T>> {
    let frame = TangentFrame::standard(&f.domain, x)?;
    tension_in_frame(f, x, &frame, h)
}

pub fn tension_in_frame<T: Scalar>(
    f: &MapObject<T>,
    x: &Point<T>,
    frame: &TangentFrame<T>,
    h: T,
) -> Result<TangentVector<T>> {
    let y = f.evaluate(x)?;
    let mut sum = vec![T::zero(); f.codomain.ambient_dim()];
    for e in &frame.vectors {
        sum = linalg::add(&sum, &acceleration(f, x, &y, e, h)?);
    }
    Ok(TangentVector {
        base: y,
        components: sum,
    })
}

fn require_complex_domain<T: Scalar>(f: &MapObject<T>) -> Result<()> {
    if !f.domain.is_complex() {
        return Err(GeometryError::Domain(format!("{} is not defined on CP^N", f.label)));
    }
    Ok(())
}

/// `sup_{i,j} |α(Je_i, Je_j) + α(e_i, e_j)|` over a unitary frame.
pub fn pluriharmonic_residual<T: Scalar>(f: &MapObject<T>, x: &Point<T>, h: T) -> Result<T> {
    require_complex_domain(f)?;
    let frame = TangentFrame::standard(&f.domain, x)?;
    let y = f.evaluate(x)?;
    let j: Vec<Vec<T>> = frame.vectors.iter().map(|e| linalg::mul_i(e)).collect();
    let mut worst = T::zero();
    for a in 0..frame.dim() {
        for b in a..frame.dim() {
            let plain = alpha(f, x, &y, &frame.vectors[a], &frame.vectors[b], h)?;
            let rotated = alpha(f, x, &y, &j[a], &j[b], h)?;
            worst = worst.max(linalg::norm(&linalg::add(&plain, &rotated)));
        }
    }
    Ok(worst)
}

/// `sup_{i,j} |F*g(Je_i, Je_j) - F*g(e_i, e_j)|`.
pub fn hermitian_residual<T: Scalar>(f: &MapObject<T>, x: &Point<T>, h: T) -> Result<T> {
    require_complex_domain(f)?;
    let frame = TangentFrame::standard(&f.domain, x)?;
    let rotated = TangentFrame {
        base: x.clone(),
        vectors: frame.vectors.iter().map(|e| linalg::mul_i(e)).collect(),
        unitary: true,
    };
    let g = pullback_gram(f, x, &frame, h)?;
    let gj = pullback_gram(f, x, &rotated, h)?;
    let mut worst = T::zero();
    for (a, b) in g.matrix.data.iter().zip(&gj.matrix.data) {
        worst = worst.max((*a - *b).abs());
    }
    Ok(worst)
}

type FieldFn<T> = Arc<dyn Fn(&Point<T>) -> Result<Vec<T>> + Send + Sync + 'static>;

/// `x ↦ W(x) ∈ T_{F(x)}`, expressed at the representative returned by `F`.
#[derive(Clone)]
pub struct VariationField<T> {
    pub label: String,
    field: FieldFn<T>,
}

impl<T: Scalar> VariationField<T> {
    pub fn new(label: impl Into<String>, f: impl Fn(&Point<T>) -> Result<Vec<T>> + Send + Sync + 'static) -> Self {
        Self {
            label: label.into(),
            field: Arc::new(f),
        }
    }

    pub fn at(&self, x: &Point<T>) -> Result<Vec<T>> {
        (self.field)(x)
    }

    pub fn zero(codomain_dim: usize) -> Self {
        Self::new("zero", move |_| Ok(vec![T::zero(); codomain_dim]))
    }

    /// `F_* V` for a tangent field `V` on the domain.
    pub fn pushforward(
        f: &MapObject<T>,
        label: impl Into<String>,
        v: impl Fn(&Point<T>) -> Result<Vec<T>> + Send + Sync + 'static,
    ) -> Self {
        let f = f.clone();
        Self::new(label, move |x| {
            let (_, cols) = f.push_forward(x, &[v(x)?])?;
            Ok(cols.into_iter().next().expect("one column"))
        })
    }

    /// `W ↦ -W`.
    pub fn negated(&self) -> Self {
        let s = self.clone();
        Self::new(format!("-{}", self.label), move |x| {
            Ok(linalg::scale(&s.at(x)?, -T::one()))
        })
    }
}

/// `F_t(x) = exp_{F(x)}(t W(x))`.
pub fn variation_map<T: Scalar>(f: &MapObject<T>, w: &VariationField<T>, t: T) -> MapObject<T> {
    let (f1, w1) = (f.clone(), w.clone());
    let m = MapObject::new(
        f.domain.clone(),
        f.codomain.clone(),
        format!("exp({t}·{})∘{}", w.label, f.label),
        move |x| {
            let y = f1.evaluate(x)?;
            let v = w1.at(x)?;
            f1.codomain.exp_raw(&y, &linalg::scale(&v, t))
        },
    );
    if f.smoothness == crate::maps::Smoothness::Lipschitz {
        m.lipschitz()
    } else {
        m
    }
}

fn warn_if_not_harmonic<T: Scalar>(f: &MapObject<T>, grid: &QuadratureGrid<T>) {
    let probe: T = grid
        .nodes
        .iter()
        .take(8)
        .filter_map(|x| tension(f, x, T::of(SECOND_STEP)).ok())
        .fold(T::zero(), |m, t| m.max(t.norm()));
    if probe > T::of(1e-3) {
        warn!(
            "{} has tension {probe} at probe nodes; the second variation assumes a harmonic map",
            f.label
        );
    }
}

/// `d²/dt² E_2(F_t)` at `t = 0` by the five-point stencil with step `τ`.
/// If a variation crosses a cut locus the step is halved once before failing.
pub fn second_variation<T: Scalar>(f: &MapObject<T>, w: &VariationField<T>, grid: &QuadratureGrid<T>) -> Result<T> {
    warn_if_not_harmonic(f, grid);
    let mut tau = T::of(VARIATION_STEP);
    for _ in 0..2 {
        match five_point(f, w, grid, tau) {
            Ok(v) => return Ok(v),
            Err(e) if e.is_resample() => tau = tau / T::of(2.0),
            Err(e) => return Err(e),
        }
    }
    Err(GeometryError::Resample(format!(
        "variation along {} crosses the cut locus even at step {tau}",
        w.label
    )))
}

fn five_point<T: Scalar>(f: &MapObject<T>, w: &VariationField<T>, grid: &QuadratureGrid<T>, tau: T) -> Result<T> {
    let mut e = [T::zero(); 5];
    for (k, slot) in e.iter_mut().enumerate() {
        let t = tau * T::of(k as f64 - 2.0);
        let ft = variation_map(f, w, t);
        let val = p_energy(&ft, grid, T::of(2.0))?;
        if val.estimate.dropped > 0 {
            return Err(GeometryError::Resample(format!(
                "{} nodes dropped at t = {t}",
                val.estimate.dropped
            )));
        }
        *slot = val.value();
    }
    Ok((-e[0] + T::of(16.0) * e[1] - T::of(30.0) * e[2] + T::of(16.0) * e[3] - e[4]) / (T::of(12.0) * tau * tau))
}

/// `∫ |W|²`, the natural scale for second variations along `W`.
pub fn field_norm_squared<T: Scalar>(w: &VariationField<T>, grid: &QuadratureGrid<T>) -> Result<T> {
    Ok(integrate(grid, |x| {
        let v = w.at(x)?;
        Ok(linalg::dot(&v, &v))
    })?
    .value)
}

/// `J V` for the Killing field `V` of `a` on a complex projective domain.
pub fn holomorphic_field<T: Scalar>(
    m: &ModelManifold<T>,
    a: &LieAlgebraElement<T>,
) -> Result<impl Fn(&Point<T>) -> Result<Vec<T>> + Send + Sync + 'static> {
    if !m.is_complex() {
        return Err(GeometryError::Domain(format!("{} has no complex structure", m.label())));
    }
    let (m, a) = (m.clone(), a.clone());
    Ok(move |x: &Point<T>| Ok(linalg::mul_i(&m.killing_field(&a, x)?.components)))
}

/// Both sides of the Jacobi identity for the holomorphic field `Ṽ = J V`:
/// `lhs = d²/dt² E_2` along `F_* Ṽ`, `rhs = ∫ -2 g(Σ_i α_F(∇_{e_i} Ṽ, e_i), F_* Ṽ)`.
pub fn jacobi_identity_check<T: Scalar>(
    f: &MapObject<T>,
    a: &LieAlgebraElement<T>,
    grid: &QuadratureGrid<T>,
) -> Result<(T, T)> {
    require_complex_domain(f)?;
    let vt = holomorphic_field(&f.domain, a)?;
    let w = VariationField::pushforward(f, "F_*(JV)", vt);
    let lhs = second_variation(f, &w, grid)?;
    let h = T::of(SECOND_STEP);
    let rhs = integrate(grid, |x| {
        let frame = TangentFrame::standard(&f.domain, x)?;
        let y = f.evaluate(x)?;
        let mut sum = vec![T::zero(); f.codomain.ambient_dim()];
        for e in &frame.vectors {
            let u = f.domain.tangent(x, e);
            let grad = f.domain.killing_covariant_derivative(a, &u)?;
            let jgrad = linalg::mul_i(&grad.components);
            sum = linalg::add(&sum, &alpha(f, x, &y, &jgrad, e, h)?);
        }
        let fw = w.at(x)?;
        Ok(-T::of(2.0) * linalg::dot(&sum, &fw))
    })?
    .value;
    Ok((lhs, rhs))
}

/// Orthonormal basis of `su(2)` for the inner product `-½ tr(XY)` on the real form.
pub fn su2_basis<T: Scalar>() -> Vec<LieAlgebraElement<T>> {
    let s = T::one() / T::of(2.0).sqrt();
    let z = T::zero();
    let pauli = [
        (
            Matrix::from_rows(&[vec![z, z], vec![z, z]]),
            Matrix::from_rows(&[vec![z, s], vec![s, z]]),
        ),
        (
            Matrix::from_rows(&[vec![z, s], vec![-s, z]]),
            Matrix::from_rows(&[vec![z, z], vec![z, z]]),
        ),
        (
            Matrix::from_rows(&[vec![z, z], vec![z, z]]),
            Matrix::from_rows(&[vec![s, z], vec![z, -s]]),
        ),
    ];
    pauli
        .iter()
        .map(|(re, im)| LieAlgebraElement::skew_hermitian(re, im).expect("skew-Hermitian by construction"))
        .collect()
}

/// `Σ_i d²/dt² E_2` along `F_*(J V_i)` for a basis `V_i`.
pub fn trace_form_ii<T: Scalar>(
    f: &MapObject<T>,
    grid: &QuadratureGrid<T>,
    basis: &[LieAlgebraElement<T>],
) -> Result<TraceForm<T>> {
    require_complex_domain(f)?;
    let mut terms = Vec::with_capacity(basis.len());
    let mut scale = T::zero();
    for a in basis {
        let w = VariationField::pushforward(f, "F_*(JV)", holomorphic_field(&f.domain, a)?);
        terms.push(second_variation(f, &w, grid)?);
        scale = scale + field_norm_squared(&w, grid)?;
    }
    Ok(TraceForm {
        trace: terms.iter().copied().sum(),
        terms,
        field_scale: scale,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceForm<T> {
    pub trace: T,
    pub terms: Vec<T>,
    /// `Σ_i ∫ |F_*(J V_i)|²`.
    pub field_scale: T,
}

/// `∫_P ω*` over a line, with `ω*(V, W) = F*g(JV, W)` evaluated on `(ι_* e, ι_* Je)`.
pub fn omega_star_line_integral<T: Scalar>(
    f: &MapObject<T>,
    line: &LineEmbedding<T>,
    grid: &QuadratureGrid<T>,
) -> Result<T> {
    require_complex_domain(f)?;
    let g = MapObject::compose(f, &line.embedding())?;
    let probe = grid
        .nodes
        .first()
        .map(|x| pluriharmonic_residual(&g, x, T::of(SECOND_STEP)))
        .transpose()?
        .unwrap_or(T::zero());
    if probe > T::of(1e-3) {
        warn!("{} is not pluriharmonic along the line (residual {probe})", f.label);
    }
    Ok(integrate(grid, |x| {
        let frame = TangentFrame::standard(&g.domain, x)?;
        let cols = differential(&g, x, &frame, T::of(DEFAULT_STEP))?;
        // frame = (e, Je); ω*(e, Je) = F*g(Je, Je)
        let je = &cols[1].components;
        Ok(linalg::dot(je, je))
    })?
    .value)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankProfile {
    /// `counts[r]` nodes have numerical rank `r`.
    pub counts: Vec<usize>,
    pub full_rank_fraction: f64,
}

/// Histogram of numerical ranks of `dF` (eigenvalues above `1e-6 ·` max).
pub fn rank_profile<T: Scalar>(f: &MapObject<T>, grid: &QuadratureGrid<T>) -> Result<RankProfile> {
    let d = f.domain.dim();
    let mut counts = vec![0usize; d + 1];
    for x in &grid.nodes {
        let frame = TangentFrame::standard(&f.domain, x)?;
        let g = pullback_gram(f, x, &frame, T::of(DEFAULT_STEP))?;
        counts[g.rank(T::of(1e-6))] += 1;
    }
    let total: usize = counts.iter().sum();
    Ok(RankProfile {
        full_rank_fraction: counts[d] as f64 / total.max(1) as f64,
        counts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{make_rational_curve, standard_map, RationalCurveSpec};
    use crate::rng::RngStream;

    #[test]
    fn identity_has_no_second_form() {
        let mut rng = RngStream::new(2).generator();
        for key in [
            "identity(S3)",
            "identity(RP2)",
            "identity(CP2)",
            "inclusion(CP1,CP2)",
            "double_cover",
        ] {
            let f = standard_map::<f64>(key).unwrap();
            let x = f.domain.random_point(&mut rng);
            let u = f.domain.random_unit_tangent(&x, &mut rng);
            let w = f.domain.random_unit_tangent(&x, &mut rng);
            let a = second_fundamental_form(&f, &x, &u.components, &w.components, 1e-3).unwrap();
            assert!(a.value.norm() < 1e-5, "{key}: {}", a.value.norm());
            assert!(tension(&f, &x, 1e-3).unwrap().norm() < 1e-5);
        }
    }

    #[test]
    fn conic_is_pluriharmonic_but_curved() {
        let f = make_rational_curve::<f64>(&RationalCurveSpec::conic()).unwrap();
        let m = f.domain.clone();
        let mut rng = RngStream::new(6).generator();
        let x = m.random_point(&mut rng);
        let frame = TangentFrame::standard(&m, &x).unwrap();
        let a = second_fundamental_form(&f, &x, &frame.vectors[0], &frame.vectors[0], 1e-3).unwrap();
        assert!(a.value.norm() > 1e-2);
        assert!(tension(&f, &x, 1e-3).unwrap().norm() < 1e-4);
        assert!(pluriharmonic_residual(&f, &x, 1e-3).unwrap() < 1e-4);
        assert!(hermitian_residual(&f, &x, 1e-4).unwrap() < 1e-5);
    }

    #[test]
    fn constant_map_residuals_vanish() {
        let f = standard_map::<f64>("constant(CP2)").unwrap();
        let x = f.domain.point(&[0.5, 0.5, 0.5, 0.0, 0.5, 0.0]).unwrap();
        assert_eq!(pluriharmonic_residual(&f, &x, 1e-3).unwrap(), 0.0);
        assert_eq!(hermitian_residual(&f, &x, 1e-4).unwrap(), 0.0);
    }

    #[test]
    fn su2_basis_is_orthonormal() {
        let b = su2_basis::<f64>();
        for (i, x) in b.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                let ip = -x.matrix.matmul(&y.matrix).trace() / 2.0;
                assert!((ip - if i == j { 1.0 } else { 0.0 }).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn real_domain_is_rejected_by_complex_diagnostics() {
        let f = standard_map::<f64>("identity(S2)").unwrap();
        let x = f.domain.point(&[0.0, 0.0, 1.0]).unwrap();
        assert!(pluriharmonic_residual(&f, &x, 1e-3).is_err());
        assert!(hermitian_residual(&f, &x, 1e-4).is_err());
    }
}
