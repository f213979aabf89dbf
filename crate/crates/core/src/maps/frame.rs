//! Orthonormal tangent frames and pullback Gram matrices.

use crate::error::{GeometryError, Result};
use crate::linalg::{self, Matrix};
use crate::manifolds::{ModelManifold, Point};
use crate::rng::Sampler;
use crate::scalar::Scalar;

/// Orthonormal basis of `T_x M`. When `unitary` is set the vectors come in
/// pairs `(e, J e)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentFrame<T> {
    pub base: Point<T>,
    pub vectors: Vec<Vec<T>>,
    pub unitary: bool,
}

impl<T: Scalar> TangentFrame<T> {
    /// Deterministic frame obtained by orthonormalizing projected ambient basis vectors.
    pub fn standard(m: &ModelManifold<T>, x: &Point<T>) -> Result<Self> {
        let d = m.ambient_dim();
        let candidates = (0..d).map(|k| {
            let mut e = vec![T::zero(); d];
            e[k] = T::one();
            e
        });
        Self::from_candidates(m, x, candidates)
    }

    /// Frame built from Gaussian candidates; uniformly rotated.
    pub fn random(m: &ModelManifold<T>, x: &Point<T>, rng: &mut Sampler) -> Result<Self> {
        let d = m.ambient_dim();
        let candidates: Vec<Vec<T>> = (0..4 * d).map(|_| rng.gaussian_vec(d)).collect();
        Self::from_candidates(m, x, candidates)
    }

    fn from_candidates(
        m: &ModelManifold<T>,
        x: &Point<T>,
        candidates: impl IntoIterator<Item = Vec<T>>,
    ) -> Result<Self> {
        let dim = m.dim();
        let tol = T::of(1e-6);
        let mut vectors: Vec<Vec<T>> = Vec::with_capacity(dim);
        let unitary = m.is_complex();
        for c in candidates {
            if vectors.len() == dim {
                break;
            }
            let mut w = m.project_tangent(x, &c);
            for _ in 0..2 {
                // on CP^N the list holds both e and Je, so this is a complex rejection
                for v in &vectors {
                    w = linalg::real_reject(&w, v);
                }
            }
            if linalg::norm(&w) < tol {
                continue;
            }
            let e = linalg::normalized(&w).expect("nonzero");
            if unitary {
                let je = linalg::mul_i(&e);
                vectors.push(e);
                vectors.push(je);
            } else {
                vectors.push(e);
            }
        }
        if vectors.len() != dim {
            return Err(GeometryError::Domain(format!(
                "could not complete a tangent frame of dimension {dim} on {}",
                m.label()
            )));
        }
        Ok(Self {
            base: x.clone(),
            vectors,
            unitary,
        })
    }

    /// Largest entry of `|G - I|` for the Gram matrix of the frame.
    pub fn orthonormality_residual(&self) -> T {
        let mut r = T::zero();
        for (i, a) in self.vectors.iter().enumerate() {
            for (j, b) in self.vectors.iter().enumerate() {
                let target = if i == j { T::one() } else { T::zero() };
                r = r.max((linalg::dot(a, b) - target).abs());
            }
        }
        r
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }
}

/// `G_ij = g(dF e_i, dF e_j)` for a frame `e`.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix<T> {
    pub matrix: Matrix<T>,
    /// Ascending, clamped at zero.
    pub eigenvalues: Vec<T>,
}

impl<T: Scalar> GramMatrix<T> {
    pub fn from_columns(columns: &[Vec<T>]) -> Self {
        let n = columns.len();
        let mut matrix = Matrix::zeros(n);
        for i in 0..n {
            for j in i..n {
                let v = linalg::dot(&columns[i], &columns[j]);
                matrix.set(i, j, v);
                matrix.set(j, i, v);
            }
        }
        let eigenvalues = matrix
            .symmetric_eigenvalues()
            .into_iter()
            .map(|e| e.max(T::zero()))
            .collect();
        Self { matrix, eigenvalues }
    }

    pub fn trace(&self) -> T {
        self.matrix.trace()
    }

    /// `sqrt(det G)`, the pulled-back volume density.
    pub fn volume_density(&self) -> T {
        self.eigenvalues.iter().fold(T::one(), |a, &e| a * e).sqrt()
    }

    /// Number of eigenvalues above `rel · max eigenvalue` (0 for the zero matrix).
    pub fn rank(&self, rel: T) -> usize {
        let max = self.eigenvalues.last().copied().unwrap_or(T::zero());
        if max <= T::zero() {
            return 0;
        }
        self.eigenvalues.iter().filter(|&&e| e > rel * max).count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;

    #[test]
    fn frames_are_orthonormal() {
        let mut rng = RngStream::new(1).generator();
        for m in [
            ModelManifold::<f64>::sphere(3),
            ModelManifold::real_projective(2),
            ModelManifold::complex_projective(2),
            ModelManifold::product(vec![ModelManifold::complex_projective(1), ModelManifold::sphere(2)]),
        ] {
            let x = m.random_point(&mut rng);
            for f in [
                TangentFrame::standard(&m, &x).unwrap(),
                TangentFrame::random(&m, &x, &mut rng).unwrap(),
            ] {
                assert_eq!(f.dim(), m.dim());
                assert!(f.orthonormality_residual() < 1e-12);
                for v in &f.vectors {
                    assert!(m.tangent_residual(&x, v) < 1e-12);
                }
            }
        }
    }

    #[test]
    fn unitary_pairs() {
        let m = ModelManifold::<f64>::complex_projective(2);
        let mut rng = RngStream::new(4).generator();
        let x = m.random_point(&mut rng);
        let f = TangentFrame::random(&m, &x, &mut rng).unwrap();
        assert!(f.unitary);
        for k in 0..2 {
            let je = linalg::mul_i(&f.vectors[2 * k]);
            assert_eq!(je, f.vectors[2 * k + 1]);
        }
    }

    #[test]
    fn gram_of_scaled_columns() {
        let g = GramMatrix::<f64>::from_columns(&[vec![3.0, 0.0], vec![0.0, 4.0]]);
        assert!((g.trace() - 25.0).abs() < 1e-14);
        assert!((g.volume_density() - 12.0).abs() < 1e-12);
        assert_eq!(g.rank(1e-6), 2);
        assert_eq!(GramMatrix::<f64>::from_columns(&[vec![0.0], vec![0.0]]).rank(1e-6), 0);
    }
}
