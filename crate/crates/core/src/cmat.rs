//! Small dense complex matrix kernels and the `e(z) = exp(2 pi i z)` helper.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::Error;
use crate::fx;
use crate::mat::RMat;

/// `e(t) = exp(2 pi i t)` for real `t`.
#[inline(always)]
pub fn e_real(t: f64) -> Complex64 {
    let a = core::f64::consts::TAU * t;
    Complex64::new(fx::cos(a), fx::sin(a))
}

/// `e(z) = exp(2 pi i z)` for complex `z`.
#[inline(always)]
pub fn e_complex(z: Complex64) -> Complex64 {
    let r = fx::exp(-core::f64::consts::TAU * z.im);
    let a = core::f64::consts::TAU * z.re;
    Complex64::new(r * fx::cos(a), r * fx::sin(a))
}

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMat {
    rows: usize,
    cols: usize,
    a: Vec<Complex64>,
}

impl CMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMat { rows, cols, a: vec![Complex64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMat::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = CMat::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    pub fn from_parts(re: &RMat, im: &RMat) -> Self {
        assert_eq!((re.rows(), re.cols()), (im.rows(), im.cols()));
        CMat::from_fn(re.rows(), re.cols(), |i, j| Complex64::new(re.get(i, j), im.get(i, j)))
    }

    pub fn from_real(re: &RMat) -> Self {
        CMat::from_fn(re.rows(), re.cols(), |i, j| Complex64::new(re.get(i, j), 0.0))
    }

    pub fn diag(d: &[Complex64]) -> Self {
        let n = d.len();
        let mut m = CMat::zeros(n, n);
        for i in 0..n {
            m.set(i, i, d[i]);
        }
        m
    }

    #[inline(always)]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline(always)]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline(always)]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.a[i * self.cols + j]
    }

    #[inline(always)]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.a[i * self.cols + j] = v;
    }

    pub fn re(&self) -> RMat {
        RMat::from_fn(self.rows, self.cols, |i, j| self.get(i, j).re)
    }

    pub fn im(&self) -> RMat {
        RMat::from_fn(self.rows, self.cols, |i, j| self.get(i, j).im)
    }

    pub fn transpose(&self) -> CMat {
        CMat::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn conj_transpose(&self) -> CMat {
        CMat::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn mul(&self, other: &CMat) -> CMat {
        assert_eq!(self.cols, other.rows);
        let mut out = CMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let s = self.get(i, k);
                if s.re == 0.0 && s.im == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + s * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    /// Left-multiply by a real matrix: `r * self`.
    pub fn real_mul_left(&self, r: &RMat) -> CMat {
        assert_eq!(r.cols(), self.rows);
        CMat::from_fn(r.rows(), self.cols, |i, j| {
            let mut s = Complex64::new(0.0, 0.0);
            for k in 0..self.rows {
                s += self.get(k, j).scale(r.get(i, k));
            }
            s
        })
    }

    pub fn add(&self, other: &CMat) -> CMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        CMat::from_fn(self.rows, self.cols, |i, j| self.get(i, j) + other.get(i, j))
    }

    pub fn sub(&self, other: &CMat) -> CMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        CMat::from_fn(self.rows, self.cols, |i, j| self.get(i, j) - other.get(i, j))
    }

    pub fn scale(&self, s: Complex64) -> CMat {
        CMat::from_fn(self.rows, self.cols, |i, j| self.get(i, j) * s)
    }

    pub fn max_abs(&self) -> f64 {
        self.a.iter().fold(0.0f64, |m, z| m.max(z.norm()))
    }

    pub fn max_abs_diff(&self, other: &CMat) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.a
            .iter()
            .zip(&other.a)
            .fold(0.0f64, |m, (x, y)| m.max((x - y).norm()))
    }

    /// Row vector times matrix: `v * self`.
    pub fn left_mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.rows);
        let mut out = vec![Complex64::new(0.0, 0.0); self.cols];
        for (i, &vi) in v.iter().enumerate() {
            for j in 0..self.cols {
                out[j] += vi * self.get(i, j);
            }
        }
        out
    }

    /// Quadratic form `x A x^T` for a complex row vector (plain transpose,
    /// no conjugation).
    pub fn quad_form(&self, x: &[Complex64]) -> Complex64 {
        assert_eq!(x.len(), self.rows);
        let mut s = Complex64::new(0.0, 0.0);
        for i in 0..self.rows {
            let mut row = Complex64::new(0.0, 0.0);
            for j in 0..self.cols {
                row += self.get(i, j) * x[j];
            }
            s += x[i] * row;
        }
        s
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        if self.rows != self.cols {
            return false;
        }
        let prod = self.mul(&self.conj_transpose());
        prod.max_abs_diff(&CMat::identity(self.rows)) <= tol
    }

    /// Project a near-unitary matrix onto the unitary group by
    /// Newton-Schulz iteration `Q <- Q (3 I - Q* Q) / 2`; quadratic
    /// convergence removes accumulated drift.
    pub fn unitarize(&self) -> CMat {
        let n = self.rows;
        let mut q = self.clone();
        for _ in 0..4 {
            let gram = q.conj_transpose().mul(&q);
            let defect = gram.max_abs_diff(&CMat::identity(n));
            if defect <= 1e-15 {
                break;
            }
            let mut corr = gram.scale(Complex64::new(-0.5, 0.0));
            for i in 0..n {
                let v = corr.get(i, i) + Complex64::new(1.5, 0.0);
                corr.set(i, i, v);
            }
            q = q.mul(&corr);
        }
        q
    }

    /// Determinant by LU with partial pivoting on magnitude.
    pub fn det(&self) -> Complex64 {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.a.clone();
        let mut det = Complex64::new(1.0, 0.0);
        for k in 0..n {
            let mut p = k;
            let mut best = a[k * n + k].norm_sqr();
            for i in k + 1..n {
                let v = a[i * n + k].norm_sqr();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                det = -det;
            }
            let piv = a[k * n + k];
            det *= piv;
            for i in k + 1..n {
                let f = a[i * n + k] / piv;
                for j in k..n {
                    let v = a[i * n + j] - f * a[k * n + j];
                    a[i * n + j] = v;
                }
            }
        }
        det
    }

    /// Inverse by Gauss-Jordan with partial pivoting.
    pub fn inverse(&self) -> Result<CMat, Error> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.a.clone();
        let mut inv = CMat::identity(n);
        for k in 0..n {
            let mut p = k;
            let mut best = a[k * n + k].norm_sqr();
            for i in k + 1..n {
                let v = a[i * n + k].norm_sqr();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == 0.0 || !best.is_finite() {
                return Err(Error::NumericalBreakdown("singular complex inverse"));
            }
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                    inv.a.swap(k * n + j, p * n + j);
                }
            }
            let piv = a[k * n + k];
            for j in 0..n {
                a[k * n + j] /= piv;
                inv.a[k * n + j] /= piv;
            }
            for i in 0..n {
                if i == k {
                    continue;
                }
                let f = a[i * n + k];
                if f.re == 0.0 && f.im == 0.0 {
                    continue;
                }
                for j in 0..n {
                    let v = a[i * n + j] - f * a[k * n + j];
                    a[i * n + j] = v;
                    let w = inv.a[i * n + j] - f * inv.a[k * n + j];
                    inv.a[i * n + j] = w;
                }
            }
        }
        Ok(inv)
    }
}

/// Solve `L Z = B` for `Z` with `L` real lower-triangular, column by column.
pub fn solve_lower_real(l: &RMat, b: &CMat) -> Result<CMat, Error> {
    let n = l.rows();
    assert_eq!(b.rows(), n);
    let mut z = CMat::zeros(n, b.cols());
    for col in 0..b.cols() {
        for i in 0..n {
            let mut s = b.get(i, col);
            for k in 0..i {
                s -= z.get(k, col).scale(l.get(i, k));
            }
            let d = l.get(i, i);
            if d == 0.0 || !d.is_finite() {
                return Err(Error::NumericalBreakdown("singular triangular solve"));
            }
            z.set(i, col, s / d);
        }
    }
    Ok(z)
}

/// Principal square root of a complex number.
pub fn sqrt_principal(z: Complex64) -> Complex64 {
    let r = z.norm();
    if r == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let phi = fx::atan2(z.im, z.re);
    let s = fx::sqrt(r);
    Complex64::new(s * fx::cos(0.5 * phi), s * fx::sin(0.5 * phi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn e_of_values() {
        let v = e_real(0.25);
        assert!((v - Complex64::new(0.0, 1.0)).norm() < 1e-15);
        let v = e_complex(Complex64::new(0.0, 0.5));
        assert!((v.re - fx::exp(-core::f64::consts::PI)).abs() < 1e-15);
        assert!(v.im.abs() < 1e-15);
    }

    #[test]
    fn det_and_inverse() {
        let m = CMat::from_fn(2, 2, |i, j| match (i, j) {
            (0, 0) => Complex64::new(1.0, 1.0),
            (0, 1) => Complex64::new(0.0, 2.0),
            (1, 0) => Complex64::new(3.0, 0.0),
            _ => Complex64::new(1.0, -1.0),
        });
        let d = m.det();
        // (1+i)(1-i) - (2i)(3) = 2 - 6i
        assert!((d - Complex64::new(2.0, -6.0)).norm() < 1e-14);
        let inv = m.inverse().unwrap();
        let prod = m.mul(&inv);
        assert!(prod.max_abs_diff(&CMat::identity(2)) < 1e-14);
    }

    #[test]
    fn principal_sqrt() {
        let z = Complex64::new(-1.0, 1e-30);
        let s = sqrt_principal(z);
        assert!((s - Complex64::new(0.0, 1.0)).norm() < 1e-12);
        let w = Complex64::new(3.0, -4.0);
        let s = sqrt_principal(w);
        assert!((s * s - w).norm() < 1e-12);
    }
}
