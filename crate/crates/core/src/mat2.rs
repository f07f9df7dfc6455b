//! 2x2 matrices over real or complex scalars.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Row-major 2x2 matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mat2<T> {
    pub a: [[T; 2]; 2],
}

pub type RMat2 = Mat2<f64>;
pub type CMat2 = Mat2<Complex64>;

impl<T: Copy> Mat2<T> {
    pub const fn new(a00: T, a01: T, a10: T, a11: T) -> Self {
        Mat2 { a: [[a00, a01], [a10, a11]] }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.a[i][j]
    }

    pub fn transpose(&self) -> Self {
        Mat2::new(self.a[0][0], self.a[1][0], self.a[0][1], self.a[1][1])
    }

    pub fn map<U: Copy>(&self, f: impl Fn(T) -> U) -> Mat2<U> {
        Mat2::new(f(self.a[0][0]), f(self.a[0][1]), f(self.a[1][0]), f(self.a[1][1]))
    }
}

impl<T> Mat2<T>
where
    T: Copy + Add<Output = T> + Sub<Output = T> + Mul<Output = T>,
{
    pub fn det(&self) -> T {
        self.a[0][0] * self.a[1][1] - self.a[0][1] * self.a[1][0]
    }

    pub fn trace(&self) -> T {
        self.a[0][0] + self.a[1][1]
    }

    pub fn scale(&self, s: T) -> Self {
        self.map(|x| x * s)
    }
}

impl<T> Mul for Mat2<T>
where
    T: Copy + Add<Output = T> + Mul<Output = T>,
{
    type Output = Mat2<T>;

    fn mul(self, rhs: Self) -> Self {
        let (x, y) = (&self.a, &rhs.a);
        Mat2::new(
            x[0][0] * y[0][0] + x[0][1] * y[1][0],
            x[0][0] * y[0][1] + x[0][1] * y[1][1],
            x[1][0] * y[0][0] + x[1][1] * y[1][0],
            x[1][0] * y[0][1] + x[1][1] * y[1][1],
        )
    }
}

impl<T> Add for Mat2<T>
where
    T: Copy + Add<Output = T>,
{
    type Output = Mat2<T>;

    fn add(self, rhs: Self) -> Self {
        Mat2::new(
            self.a[0][0] + rhs.a[0][0],
            self.a[0][1] + rhs.a[0][1],
            self.a[1][0] + rhs.a[1][0],
            self.a[1][1] + rhs.a[1][1],
        )
    }
}

impl<T> Sub for Mat2<T>
where
    T: Copy + Sub<Output = T>,
{
    type Output = Mat2<T>;

    fn sub(self, rhs: Self) -> Self {
        Mat2::new(
            self.a[0][0] - rhs.a[0][0],
            self.a[0][1] - rhs.a[0][1],
            self.a[1][0] - rhs.a[1][0],
            self.a[1][1] - rhs.a[1][1],
        )
    }
}

impl RMat2 {
    pub fn identity() -> Self {
        Mat2::new(1.0, 0.0, 0.0, 1.0)
    }

    /// Counter-clockwise rotation `[[cos, -sin], [sin, cos]]`.
    pub fn rotation(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Mat2::new(c, -s, s, c)
    }

    pub fn diag(d0: f64, d1: f64) -> Self {
        Mat2::new(d0, 0.0, 0.0, d1)
    }

    pub fn to_complex(&self) -> CMat2 {
        self.map(|x| Complex64::new(x, 0.0))
    }

    /// Eigenvalues of the symmetric part, ascending.
    pub fn sym_eigenvalues(&self) -> (f64, f64) {
        let b = 0.5 * (self.a[0][1] + self.a[1][0]);
        hermitian_eigs(self.a[0][0], self.a[1][1], b * b)
    }

    pub fn max_abs(&self) -> f64 {
        self.a.iter().flatten().fold(0.0_f64, |acc, x| acc.max(x.abs()))
    }
}

impl CMat2 {
    pub fn identity() -> Self {
        let (o, z) = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
        Mat2::new(o, z, z, o)
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        self.transpose().map(|x| x.conj())
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn hermitian_eigenvalues(&self) -> (f64, f64) {
        let b = 0.5 * (self.a[0][1] + self.a[1][0].conj());
        hermitian_eigs(self.a[0][0].re, self.a[1][1].re, b.norm_sqr())
    }

    pub fn max_abs(&self) -> f64 {
        self.a.iter().flatten().fold(0.0_f64, |acc, x| acc.max(x.norm()))
    }

    /// Largest entrywise deviation from Hermitian symmetry.
    pub fn hermitian_defect(&self) -> f64 {
        (*self - self.adjoint()).max_abs()
    }
}

/// Eigenvalues of `[[p, b], [conj b, q]]` given `|b|^2`.
fn hermitian_eigs(p: f64, q: f64, b_sq: f64) -> (f64, f64) {
    let mean = 0.5 * (p + q);
    let rad = (0.25 * (p - q) * (p - q) + b_sq).sqrt();
    let hi = mean + rad;
    // det / hi avoids cancellation for the small eigenvalue
    let det = p * q - b_sq;
    let lo = if hi != 0.0 { det / hi } else { mean - rad };
    (lo, hi)
}

/// Spin-basis change `[[1, i], [1, -i]]`: row vector `(g1, g2)` in the `(t, tbar)` basis
/// times this matrix gives the real-basis row vector.
pub fn spin_basis_b() -> CMat2 {
    let (o, i) = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0));
    Mat2::new(o, i, o, -i)
}

/// Conjugate transpose of [`spin_basis_b`].
pub fn spin_basis_b_adjoint() -> CMat2 {
    spin_basis_b().adjoint()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn products_and_involutions() {
        let x = RMat2::new(1.0, 2.0, 3.0, 4.0);
        let y = RMat2::new(-1.0, 0.5, 2.0, 0.0);
        let z = RMat2::rotation(0.3);
        assert!(((x * y) * z - x * (y * z)).max_abs() < 1e-14);
        assert_eq!(x.transpose().transpose(), x);
        assert!((z.det() - 1.0).abs() < 1e-15);
        let c = spin_basis_b();
        assert_eq!(c.adjoint().adjoint(), c);
        assert!((c.det().norm() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn eigenvalues() {
        let (lo, hi) = RMat2::new(2.0, 1.0, 1.0, 2.0).sym_eigenvalues();
        assert!((lo - 1.0).abs() < 1e-15 && (hi - 3.0).abs() < 1e-15);
        let h = CMat2::new(
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 2.0),
            Complex64::new(0.0, -2.0),
            Complex64::new(1.0, 0.0),
        );
        let (lo, hi) = h.hermitian_eigenvalues();
        assert!((lo + 1.0).abs() < 1e-15 && (hi - 3.0).abs() < 1e-15);
    }
}
