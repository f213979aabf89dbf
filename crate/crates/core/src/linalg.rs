//! Small dense linear algebra on ambient coordinate vectors.
//!
//! Complex vectors in `C^{m}` are stored interleaved in `R^{2m}` as
//! `(re_0, im_0, re_1, im_1, ...)`, so the complex structure is a fixed real
//! linear map and every metric operation is the Euclidean one.

use crate::scalar::Scalar;

#[inline]
pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

#[inline]
pub fn norm<T: Scalar>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

pub fn add<T: Scalar>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(&x, &y)| x + y).collect()
}

pub fn sub<T: Scalar>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(&x, &y)| x - y).collect()
}

pub fn scale<T: Scalar>(a: &[T], s: T) -> Vec<T> {
    a.iter().map(|&x| x * s).collect()
}

/// `a + s b`
pub fn axpy<T: Scalar>(a: &[T], s: T, b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(&x, &y)| x + s * y).collect()
}

pub fn normalized<T: Scalar>(a: &[T]) -> Option<Vec<T>> {
    let n = norm(a);
    if n > T::zero() && n.is_finite() {
        Some(scale(a, T::one() / n))
    } else {
        None
    }
}

pub fn max_abs<T: Scalar>(a: &[T]) -> T {
    a.iter().fold(T::zero(), |m, &x| m.max(x.abs()))
}

/// Hermitian product `Σ conj(a_k) b_k` of interleaved complex vectors, as `(re, im)`.
pub fn hermitian<T: Scalar>(a: &[T], b: &[T]) -> (T, T) {
    debug_assert_eq!(a.len() % 2, 0);
    let mut re = T::zero();
    let mut im = T::zero();
    for k in (0..a.len()).step_by(2) {
        let (ar, ai, br, bi) = (a[k], a[k + 1], b[k], b[k + 1]);
        re = re + ar * br + ai * bi;
        im = im + ar * bi - ai * br;
    }
    (re, im)
}

/// Multiplies an interleaved complex vector by the scalar `c = (re, im)`.
pub fn cscale<T: Scalar>(a: &[T], c: (T, T)) -> Vec<T> {
    let mut out = Vec::with_capacity(a.len());
    for k in (0..a.len()).step_by(2) {
        let (x, y) = (a[k], a[k + 1]);
        out.push(c.0 * x - c.1 * y);
        out.push(c.0 * y + c.1 * x);
    }
    out
}

/// Multiplication by the imaginary unit.
pub fn mul_i<T: Scalar>(a: &[T]) -> Vec<T> {
    let mut out = Vec::with_capacity(a.len());
    for k in (0..a.len()).step_by(2) {
        out.push(-a[k + 1]);
        out.push(a[k]);
    }
    out
}

pub fn conj<T: Scalar>(a: &[T]) -> Vec<T> {
    a.iter()
        .enumerate()
        .map(|(k, &x)| if k % 2 == 1 { -x } else { x })
        .collect()
}

/// Removes the complex span of the unit vector `z` from `v`: `v - z <z, v>`.
pub fn complex_reject<T: Scalar>(v: &[T], z: &[T]) -> Vec<T> {
    let c = hermitian(z, v);
    sub(v, &cscale(z, c))
}

/// Removes the real span of the unit vector `x` from `v`.
pub fn real_reject<T: Scalar>(v: &[T], x: &[T]) -> Vec<T> {
    axpy(v, -dot(x, v), x)
}

/// Dense row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    pub n: usize,
    pub data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![T::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = T::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for r in rows {
            assert_eq!(r.len(), n, "matrix rows must be square");
            data.extend_from_slice(r);
        }
        Self { n, data }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.n + j] = v;
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.n);
        (0..self.n)
            .map(|i| dot(&self.data[i * self.n..(i + 1) * self.n], v))
            .collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn matmul(&self, other: &Self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == T::zero() {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] = out.data[i * n + j] + a * other.get(k, j);
                }
            }
        }
        out
    }

    pub fn trace(&self) -> T {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    /// Largest entry of `|A + A^T|`.
    pub fn skew_residual(&self) -> T {
        let mut r = T::zero();
        for i in 0..self.n {
            for j in 0..self.n {
                r = r.max((self.get(i, j) + self.get(j, i)).abs());
            }
        }
        r
    }

    pub fn symmetry_residual(&self) -> T {
        let mut r = T::zero();
        for i in 0..self.n {
            for j in 0..self.n {
                r = r.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        r
    }

    /// Determinant by partial-pivot elimination.
    pub fn determinant(&self) -> T {
        let n = self.n;
        let mut a = self.data.clone();
        let mut det = T::one();
        for c in 0..n {
            let mut piv = c;
            for r in c + 1..n {
                if a[r * n + c].abs() > a[piv * n + c].abs() {
                    piv = r;
                }
            }
            if a[piv * n + c] == T::zero() {
                return T::zero();
            }
            if piv != c {
                for j in 0..n {
                    a.swap(c * n + j, piv * n + j);
                }
                det = -det;
            }
            let p = a[c * n + c];
            det = det * p;
            for r in c + 1..n {
                let f = a[r * n + c] / p;
                if f != T::zero() {
                    for j in c..n {
                        a[r * n + j] = a[r * n + j] - f * a[c * n + j];
                    }
                }
            }
        }
        det
    }

    /// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
    pub fn symmetric_eigenvalues(&self) -> Vec<T> {
        let n = self.n;
        let mut a = self.clone();
        let eps = T::epsilon();
        for _sweep in 0..64 {
            let mut off = T::zero();
            let mut total = T::zero();
            for i in 0..n {
                for j in 0..n {
                    let v = a.get(i, j) * a.get(i, j);
                    total = total + v;
                    if i != j {
                        off = off + v;
                    }
                }
            }
            if off <= eps * eps * total || off == T::zero() {
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    let apq = a.get(p, q);
                    if apq == T::zero() {
                        continue;
                    }
                    let app = a.get(p, p);
                    let aqq = a.get(q, q);
                    let theta = (aqq - app) / (T::of(2.0) * apq);
                    let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                    let c = T::one() / (t * t + T::one()).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let akp = a.get(k, p);
                        let akq = a.get(k, q);
                        a.set(k, p, c * akp - s * akq);
                        a.set(k, q, s * akp + c * akq);
                    }
                    for k in 0..n {
                        let apk = a.get(p, k);
                        let aqk = a.get(q, k);
                        a.set(p, k, c * apk - s * aqk);
                        a.set(q, k, s * apk + c * aqk);
                    }
                }
            }
        }
        let mut ev: Vec<T> = (0..n).map(|i| a.get(i, i)).collect();
        ev.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
        ev
    }
}

/// Orthonormalizes `vectors` in order (modified Gram-Schmidt), dropping
/// vectors that become numerically dependent.
pub fn gram_schmidt<T: Scalar>(vectors: &[Vec<T>]) -> Vec<Vec<T>> {
    let mut out: Vec<Vec<T>> = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        for _ in 0..2 {
            for u in &out {
                w = real_reject(&w, u);
            }
        }
        if norm(&w) > T::of(1e-8) * norm(v).max(T::one()) {
            out.push(normalized(&w).expect("nonzero"));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jacobi_eigenvalues_of_known_matrix() {
        let m = Matrix::from_rows(&[vec![2.0_f64, 1.0, 0.0], vec![1.0, 2.0, 0.0], vec![0.0, 0.0, 5.0]]);
        let ev = m.symmetric_eigenvalues();
        assert!((ev[0] - 1.0).abs() < 1e-13);
        assert!((ev[1] - 3.0).abs() < 1e-13);
        assert!((ev[2] - 5.0).abs() < 1e-13);
    }

    #[test]
    fn determinant_with_pivoting() {
        let m = Matrix::from_rows(&[vec![0.0_f64, 2.0], vec![3.0, 1.0]]);
        assert!((m.determinant() + 6.0).abs() < 1e-14);
    }

    #[test]
    fn complex_helpers() {
        // z = (1, i)/sqrt2 ; <z, z> = 1
        let s = 1.0 / 2f64.sqrt();
        let z = vec![s, 0.0, 0.0, s];
        let (re, im) = hermitian(&z, &z);
        assert!((re - 1.0).abs() < 1e-15 && im.abs() < 1e-15);
        let iz = mul_i(&z);
        let (re, im) = hermitian(&z, &iz);
        assert!(re.abs() < 1e-15 && (im - 1.0).abs() < 1e-15);
        let w = complex_reject(&iz, &z);
        assert!(norm(&w) < 1e-15);
    }
}
