//! Small dense complex matrices and spinors.
//!
//! Everything in this crate lives in either the 2-dimensional Pauli space or
//! the 4-dimensional Dirac space, so the types are thin `Copy` wrappers
//! around `nalgebra` static matrices with the vocabulary used elsewhere
//! (daggers, commutators, defect measures).

use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub};

use nalgebra::{SMatrix, SVector};
use num_complex::Complex64;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// Shorthand for building a complex number.
#[inline]
pub const fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Square complex matrix of fixed dimension `N`.
#[derive(Clone, Copy, PartialEq)]
pub struct Matrix<const N: usize>(pub SMatrix<Complex64, N, N>);

/// Operators on Pauli spinors.
pub type ComplexMatrix2 = Matrix<2>;
/// Operators on Dirac spinors.
pub type ComplexMatrix4 = Matrix<4>;

impl<const N: usize> Matrix<N> {
    pub fn zeros() -> Self {
        Matrix(SMatrix::zeros())
    }

    pub fn identity() -> Self {
        Matrix(SMatrix::identity())
    }

    pub fn from_fn(f: impl FnMut(usize, usize) -> Complex64) -> Self {
        Matrix(SMatrix::from_fn(f))
    }

    pub fn from_real(rows: [[f64; N]; N]) -> Self {
        Self::from_fn(|i, j| c(rows[i][j], 0.0))
    }

    pub fn diagonal(d: [Complex64; N]) -> Self {
        Matrix(SMatrix::from_diagonal(&SVector::from(d)))
    }

    /// Hermitian conjugate.
    pub fn dagger(&self) -> Self {
        Matrix(self.0.adjoint())
    }

    /// Entrywise complex conjugate.
    pub fn conj(&self) -> Self {
        Matrix(self.0.conjugate())
    }

    pub fn transpose(&self) -> Self {
        Matrix(self.0.transpose())
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Matrix(self.0 * s)
    }

    pub fn scale_re(&self, s: f64) -> Self {
        Matrix(self.0.map(|z| z * s))
    }

    /// `[A, B] = AB - BA`
    pub fn commutator(&self, other: &Self) -> Self {
        *self * *other - *other * *self
    }

    /// `{A, B} = AB + BA`
    pub fn anticommutator(&self, other: &Self) -> Self {
        *self * *other + *other * *self
    }

    /// Largest entry modulus (the max norm).
    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (*self - *other).max_abs()
    }

    /// Induced 1-norm (maximum absolute column sum).
    pub fn norm_one(&self) -> f64 {
        self.0
            .column_iter()
            .map(|col| col.iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Deviation from hermiticity, `max |A - A†|`.
    pub fn hermiticity_defect(&self) -> f64 {
        self.max_abs_diff(&self.dagger())
    }

    /// Deviation from unitarity, `max |A†A - 1|`.
    pub fn unitarity_defect(&self) -> f64 {
        (self.dagger() * *self).max_abs_diff(&Self::identity())
    }

    pub fn apply(&self, v: &Spinor<N>) -> Spinor<N> {
        Spinor(self.0 * v.0)
    }
}

macro_rules! dense_ops {
    ($n:literal) => {
        impl Matrix<$n> {
            pub fn determinant(&self) -> Complex64 {
                self.0.determinant()
            }

            /// Inverse from an LU factorization; `None` when a pivot is
            /// negligible against the largest entry.
            pub fn inverse(&self) -> Option<Self> {
                let lu = self.0.lu();
                let scale = self.max_abs().max(f64::MIN_POSITIVE);
                if lu.u().diagonal().iter().any(|d| d.norm() <= 1e-14 * scale) {
                    return None;
                }
                lu.try_inverse().map(Matrix)
            }

            pub fn exp(&self) -> Self {
                Matrix(self.0.exp())
            }
        }
    };
}

dense_ops!(2);
dense_ops!(4);

impl ComplexMatrix2 {
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Self {
        Matrix(nalgebra::Matrix2::new(a, b, c, d))
    }
}

impl ComplexMatrix4 {
    /// Assemble from 2×2 blocks `[[a, b], [c, d]]`.
    pub fn from_blocks(
        a: &ComplexMatrix2,
        b: &ComplexMatrix2,
        c: &ComplexMatrix2,
        d: &ComplexMatrix2,
    ) -> Self {
        let mut m = Self::zeros();
        m.0.fixed_view_mut::<2, 2>(0, 0).copy_from(&a.0);
        m.0.fixed_view_mut::<2, 2>(0, 2).copy_from(&b.0);
        m.0.fixed_view_mut::<2, 2>(2, 0).copy_from(&c.0);
        m.0.fixed_view_mut::<2, 2>(2, 2).copy_from(&d.0);
        m
    }

    pub fn block_diag(a: &ComplexMatrix2, d: &ComplexMatrix2) -> Self {
        let z = ComplexMatrix2::zeros();
        Self::from_blocks(a, &z, &z, d)
    }

    /// The 2×2 block at block-row `r`, block-column `s`.
    pub fn block(&self, r: usize, s: usize) -> ComplexMatrix2 {
        Matrix(self.0.fixed_view::<2, 2>(2 * r, 2 * s).into_owned())
    }
}

impl<const N: usize> Index<(usize, usize)> for Matrix<N> {
    type Output = Complex64;
    fn index(&self, ij: (usize, usize)) -> &Complex64 {
        &self.0[ij]
    }
}

impl<const N: usize> IndexMut<(usize, usize)> for Matrix<N> {
    fn index_mut(&mut self, ij: (usize, usize)) -> &mut Complex64 {
        &mut self.0[ij]
    }
}

impl<const N: usize> Add for Matrix<N> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Matrix(self.0 + rhs.0)
    }
}

impl<const N: usize> AddAssign for Matrix<N> {
    fn add_assign(&mut self, rhs: Self) {
        self.0 += rhs.0;
    }
}

impl<const N: usize> Sub for Matrix<N> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Matrix(self.0 - rhs.0)
    }
}

impl<const N: usize> Neg for Matrix<N> {
    type Output = Self;
    fn neg(self) -> Self {
        Matrix(-self.0)
    }
}

impl<const N: usize> Mul for Matrix<N> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Matrix(self.0 * rhs.0)
    }
}

impl<const N: usize> Mul<Complex64> for Matrix<N> {
    type Output = Self;
    fn mul(self, rhs: Complex64) -> Self {
        self.scale(rhs)
    }
}

impl<const N: usize> Mul<f64> for Matrix<N> {
    type Output = Self;
    fn mul(self, rhs: f64) -> Self {
        self.scale_re(rhs)
    }
}

impl<const N: usize> Mul<Spinor<N>> for Matrix<N> {
    type Output = Spinor<N>;
    fn mul(self, rhs: Spinor<N>) -> Spinor<N> {
        self.apply(&rhs)
    }
}

impl<const N: usize> std::iter::Sum for Matrix<N> {
    fn sum<It: Iterator<Item = Self>>(iter: It) -> Self {
        iter.fold(Self::zeros(), |a, b| a + b)
    }
}

impl<const N: usize> fmt::Debug for Matrix<N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix<{N}>[")?;
        for row in self.0.row_iter() {
            write!(f, "  ")?;
            for z in row.iter() {
                write!(f, "{:>+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Complex column vector of fixed dimension `N`.
#[derive(Clone, Copy, PartialEq)]
pub struct Spinor<const N: usize>(pub SVector<Complex64, N>);

pub type Spinor2 = Spinor<2>;
pub type Spinor4 = Spinor<4>;

impl<const N: usize> Spinor<N> {
    pub fn zeros() -> Self {
        Spinor(SVector::zeros())
    }

    pub fn from_array(v: [Complex64; N]) -> Self {
        Spinor(SVector::from(v))
    }

    /// Unit vector along component `k`.
    pub fn basis(k: usize) -> Self {
        let mut v = Self::zeros();
        v[k] = ONE;
        v
    }

    /// Hermitian inner product `self† · other` (antilinear in `self`).
    pub fn dot(&self, other: &Self) -> Complex64 {
        self.0.dotc(&other.0)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.norm_squared()
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn conj(&self) -> Self {
        Spinor(self.0.conjugate())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Spinor(self.0 * s)
    }

    pub fn scale_re(&self, s: f64) -> Self {
        Spinor(self.0.map(|z| z * s))
    }

    /// Outer product `self · other†`.
    pub fn outer(&self, other: &Self) -> Matrix<N> {
        Matrix(self.0 * other.0.adjoint())
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (*self - *other).max_abs()
    }
}

impl Spinor2 {
    pub fn new(a: Complex64, b: Complex64) -> Self {
        Spinor(nalgebra::Vector2::new(a, b))
    }
}

impl Spinor4 {
    /// Stack two Pauli spinors into a Dirac spinor.
    pub fn stack(upper: &Spinor2, lower: &Spinor2) -> Self {
        Spinor(nalgebra::Vector4::new(upper[0], upper[1], lower[0], lower[1]))
    }
}

impl<const N: usize> Index<usize> for Spinor<N> {
    type Output = Complex64;
    fn index(&self, k: usize) -> &Complex64 {
        &self.0[k]
    }
}

impl<const N: usize> IndexMut<usize> for Spinor<N> {
    fn index_mut(&mut self, k: usize) -> &mut Complex64 {
        &mut self.0[k]
    }
}

impl<const N: usize> Add for Spinor<N> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Spinor(self.0 + rhs.0)
    }
}

impl<const N: usize> Sub for Spinor<N> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Spinor(self.0 - rhs.0)
    }
}

impl<const N: usize> Neg for Spinor<N> {
    type Output = Self;
    fn neg(self) -> Self {
        Spinor(-self.0)
    }
}

impl<const N: usize> Mul<Complex64> for Spinor<N> {
    type Output = Self;
    fn mul(self, rhs: Complex64) -> Self {
        self.scale(rhs)
    }
}

impl<const N: usize> Mul<f64> for Spinor<N> {
    type Output = Self;
    fn mul(self, rhs: f64) -> Self {
        self.scale_re(rhs)
    }
}

impl<const N: usize> fmt::Debug for Spinor<N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

/// Real 3-vectors (spatial momenta, rotation and rapidity parameters).
pub type Vec3 = [f64; 3];

pub fn dot3(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn norm3(a: &Vec3) -> f64 {
    dot3(a, a).sqrt()
}

pub fn scale3(a: &Vec3, s: f64) -> Vec3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

pub fn add3(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub fn sub3(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub fn neg3(a: &Vec3) -> Vec3 {
    [-a[0], -a[1], -a[2]]
}

/// Totally antisymmetric symbol on spatial indices 0, 1, 2.
pub fn levi_civita(i: usize, j: usize, k: usize) -> f64 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}
