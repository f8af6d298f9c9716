//! Dirac matrices in the chiral representation, the SL(2,C) generators of
//! the representation (½,0)⊕(0,½), rotations, boosts, and the canonical
//! homomorphism onto the Lorentz group.
//!
//! Conventions: metric η = diag(1,−1,−1,−1), ε^{0123} = −1, and
//!
//! ```text
//! γ⁰ = [[0, 1], [1, 0]],   γⁱ = [[0, σᵢ], [−σᵢ, 0]],   γ⁵ = iγ⁰γ¹γ²γ³ = diag(−1, 1).
//! ```
//!
//! With this choice the rest-frame spinors have equal upper and lower Pauli
//! blocks, `s_{0i} = diag(iσᵢ/2, −iσᵢ/2)` and the boosts take the block form
//! `diag(l̂, l̂⁻¹)` with `l̂ = exp(τ·σ/2)`.

use std::ops::Mul;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, ComplexMatrix2, ComplexMatrix4, Vec3, I, ONE, ZERO};

/// Minkowski metric diagonal.
pub const METRIC: [f64; 4] = [1.0, -1.0, -1.0, -1.0];

/// Spatial axis label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    /// Zero-based component index.
    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }

    pub fn from_index(i: usize) -> Result<Axis> {
        Axis::ALL
            .get(i)
            .copied()
            .ok_or(Error::IndexOutOfRange { index: i, bound: 3 })
    }
}

/// Pauli matrix σᵢ.
pub fn pauli(axis: Axis) -> ComplexMatrix2 {
    match axis {
        Axis::X => ComplexMatrix2::new(ZERO, ONE, ONE, ZERO),
        Axis::Y => ComplexMatrix2::new(ZERO, -I, I, ZERO),
        Axis::Z => ComplexMatrix2::new(ONE, ZERO, ZERO, -ONE),
    }
}

pub fn pauli_all() -> [ComplexMatrix2; 3] {
    Axis::ALL.map(pauli)
}

/// `σ·v`
pub fn pauli_dot(v: &Vec3) -> ComplexMatrix2 {
    Axis::ALL
        .iter()
        .map(|&a| pauli(a) * v[a.index()])
        .sum()
}

/// Dirac matrix γ^μ (upper index), μ = 0..=3.
pub fn gamma(mu: usize) -> Result<ComplexMatrix4> {
    let z = ComplexMatrix2::zeros();
    let one = ComplexMatrix2::identity();
    match mu {
        0 => Ok(ComplexMatrix4::from_blocks(&z, &one, &one, &z)),
        1..=3 => {
            let s = pauli(Axis::ALL[mu - 1]);
            Ok(ComplexMatrix4::from_blocks(&z, &s, &(-s), &z))
        }
        _ => Err(Error::IndexOutOfRange { index: mu, bound: 4 }),
    }
}

pub(crate) fn gamma0() -> ComplexMatrix4 {
    gamma(0).expect("valid index")
}

/// Spatial Dirac matrix γⁱ for an axis.
pub fn gamma_spatial(axis: Axis) -> ComplexMatrix4 {
    gamma(axis.index() + 1).expect("valid index")
}

/// `γ⁵ = iγ⁰γ¹γ²γ³`
pub fn gamma5() -> ComplexMatrix4 {
    (gamma0() * gamma_spatial(Axis::X) * gamma_spatial(Axis::Y) * gamma_spatial(Axis::Z)) * I
}

/// `γ^i v^i` summed over spatial components.
pub fn gamma_dot(v: &Vec3) -> ComplexMatrix4 {
    Axis::ALL
        .iter()
        .map(|&a| gamma_spatial(a) * v[a.index()])
        .sum()
}

/// Charge conjugation matrix `C = C⁻¹ = iγ²`.
pub fn charge_conjugation() -> ComplexMatrix4 {
    gamma_spatial(Axis::Y) * I
}

/// `s^{μν} = (i/4)[γ^μ, γ^ν]` (upper indices).
pub fn spin_generator(mu: usize, nu: usize) -> Result<ComplexMatrix4> {
    let (gm, gn) = (gamma(mu)?, gamma(nu)?);
    Ok(gm.commutator(&gn) * c(0.0, 0.25))
}

/// `s_{μν}` with both indices lowered by the metric.
pub fn spin_generator_lower(mu: usize, nu: usize) -> Result<ComplexMatrix4> {
    Ok(spin_generator(mu, nu)? * (METRIC[mu.min(3)] * METRIC[nu.min(3)]))
}

/// Pauli spin operator `ŝᵢ = σᵢ/2`.
pub fn pauli_spin(axis: Axis) -> ComplexMatrix2 {
    pauli(axis) * 0.5
}

/// Rotation generator `sᵢ = ½ε_{ijk}s^{jk} = diag(ŝᵢ, ŝᵢ)`.
pub fn spin_rotation_generator(axis: Axis) -> ComplexMatrix4 {
    let s = pauli_spin(axis);
    ComplexMatrix4::block_diag(&s, &s)
}

pub fn spin_rotation_generators() -> [ComplexMatrix4; 3] {
    Axis::ALL.map(spin_rotation_generator)
}

/// Boost generator `s_{0i} = diag(iŝᵢ, −iŝᵢ)`.
pub fn spin_boost_generator(axis: Axis) -> ComplexMatrix4 {
    let s = pauli_spin(axis) * I;
    ComplexMatrix4::block_diag(&s, &(-s))
}

/// `s·v = Σ sᵢvⁱ`
pub fn spin_dot(v: &Vec3) -> ComplexMatrix4 {
    Axis::ALL
        .iter()
        .map(|&a| spin_rotation_generator(a) * v[a.index()])
        .sum()
}

/// Element of SL(2,C), carried as the upper (½,0) block `λ̂` of its Dirac
/// representative `diag(λ̂, (λ̂†)⁻¹)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sl2c(ComplexMatrix2);

impl Sl2c {
    pub fn identity() -> Self {
        Sl2c(ComplexMatrix2::identity())
    }

    /// Wraps a 2×2 matrix, rejecting anything with `|det − 1| > 1e-10`.
    pub fn new(m: ComplexMatrix2) -> Result<Self> {
        let det = m.determinant();
        if !m.is_finite() {
            return Err(Error::NonFinite("SL(2,C) element"));
        }
        if (det - ONE).norm() > 1e-10 {
            return Err(Error::NotInDiracRepresentation { defect: (det - ONE).norm() });
        }
        Ok(Sl2c(m))
    }

    /// `r̂(θ) = exp(−iθⁱŝᵢ)`
    pub fn rotation(theta: &Vec3) -> Self {
        Sl2c((pauli_dot(theta) * c(0.0, -0.5)).exp())
    }

    /// `l̂(τ) = exp(τⁱŝᵢ)`
    pub fn boost(tau: &Vec3) -> Self {
        Sl2c((pauli_dot(tau) * 0.5).exp())
    }

    pub fn matrix(&self) -> &ComplexMatrix2 {
        &self.0
    }

    pub fn inverse(&self) -> Self {
        // det = 1, so the adjugate is the inverse
        let m = &self.0;
        Sl2c(ComplexMatrix2::new(m[(1, 1)], -m[(0, 1)], -m[(1, 0)], m[(0, 0)]))
    }

    /// Dirac representative `diag(λ̂, (λ̂†)⁻¹)`.
    pub fn dirac(&self) -> ComplexMatrix4 {
        let lower = self.inverse().0.dagger();
        ComplexMatrix4::block_diag(&self.0, &lower)
    }

    pub fn lorentz(&self) -> LorentzMatrix {
        lorentz_from_sl2(&self.dirac()).expect("SL(2,C) elements map onto the Lorentz group")
    }
}

impl Mul for Sl2c {
    type Output = Sl2c;
    fn mul(self, rhs: Sl2c) -> Sl2c {
        Sl2c(self.0 * rhs.0)
    }
}

/// `r(θ) = diag(r̂, r̂)` together with its Pauli block.
pub fn rotation(theta: &Vec3) -> (ComplexMatrix2, ComplexMatrix4) {
    let r = Sl2c::rotation(theta);
    (r.0, ComplexMatrix4::block_diag(&r.0, &r.0))
}

/// `l(τ) = diag(l̂, l̂⁻¹)` together with its Pauli block.
pub fn lorentz_boost_sl2(tau: &Vec3) -> (ComplexMatrix2, ComplexMatrix4) {
    let l = Sl2c::boost(tau);
    (l.0, l.dirac())
}

/// Contravariant four-vector `x^μ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FourVector(pub [f64; 4]);

impl FourVector {
    pub fn new(x0: f64, spatial: Vec3) -> Self {
        FourVector([x0, spatial[0], spatial[1], spatial[2]])
    }

    pub fn time(&self) -> f64 {
        self.0[0]
    }

    pub fn spatial(&self) -> Vec3 {
        [self.0[1], self.0[2], self.0[3]]
    }

    /// `x·y = η_{μν} x^μ y^ν`
    pub fn minkowski_dot(&self, other: &FourVector) -> f64 {
        (0..4).map(|m| METRIC[m] * self.0[m] * other.0[m]).sum()
    }

    /// `γ^μ x_μ = x⁰γ⁰ − xⁱγⁱ`
    pub fn slash(&self) -> ComplexMatrix4 {
        gamma0() * self.0[0] - gamma_dot(&self.spatial())
    }
}

/// Real 4×4 matrix `Λ^μ_ν` acting on contravariant four-vectors.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LorentzMatrix(pub [[f64; 4]; 4]);

impl LorentzMatrix {
    pub fn identity() -> Self {
        let mut m = [[0.0; 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        LorentzMatrix(m)
    }

    pub fn apply(&self, x: &FourVector) -> FourVector {
        let mut out = [0.0; 4];
        for (mu, o) in out.iter_mut().enumerate() {
            *o = (0..4).map(|nu| self.0[mu][nu] * x.0[nu]).sum();
        }
        FourVector(out)
    }

    pub fn transpose(&self) -> Self {
        let mut m = [[0.0; 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = self.0[j][i];
            }
        }
        LorentzMatrix(m)
    }

    /// `Λ⁻¹ = η Λᵀ η`, valid for Lorentz matrices.
    pub fn inverse(&self) -> Self {
        let mut m = [[0.0; 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = METRIC[i] * self.0[j][i] * METRIC[j];
            }
        }
        LorentzMatrix(m)
    }

    /// `max |ΛᵀηΛ − η|`
    pub fn metric_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for a in 0..4 {
            for b in 0..4 {
                let v: f64 = (0..4).map(|m| self.0[m][a] * METRIC[m] * self.0[m][b]).sum();
                let target = if a == b { METRIC[a] } else { 0.0 };
                worst = worst.max((v - target).abs());
            }
        }
        worst
    }

    pub fn max_abs_diff(&self, other: &LorentzMatrix) -> f64 {
        self.0
            .iter()
            .flatten()
            .zip(other.0.iter().flatten())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl Mul for LorentzMatrix {
    type Output = LorentzMatrix;
    fn mul(self, rhs: LorentzMatrix) -> LorentzMatrix {
        let mut m = [[0.0; 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = (0..4).map(|k| self.0[i][k] * rhs.0[k][j]).sum();
            }
        }
        LorentzMatrix(m)
    }
}

/// Lorentz matrix of an element of the Dirac representation, from the
/// defining relation `λ⁻¹γ^μλ = Λ^μ_ν γ^ν`.
///
/// The coefficients are extracted with `tr(γ^ν γ^ρ) = 4η^{νρ}`; the relation
/// is then re-checked so that inputs outside the representation are rejected.
pub fn lorentz_from_sl2(lambda: &ComplexMatrix4) -> Result<LorentzMatrix> {
    if !lambda.is_finite() {
        return Err(Error::NonFinite("Dirac-space transformation"));
    }
    let scale = lambda.max_abs().max(1.0);
    let off = lambda.block(0, 1).max_abs().max(lambda.block(1, 0).max_abs());
    if off > 1e-12 * scale {
        return Err(Error::NotInDiracRepresentation { defect: off });
    }
    let inv = lambda.inverse().ok_or(Error::Singular)?;
    let gammas: Vec<ComplexMatrix4> = (0..4).map(|m| gamma(m).expect("valid index")).collect();

    let mut out = [[0.0; 4]; 4];
    let mut defect: f64 = 0.0;
    for mu in 0..4 {
        let conj = inv * gammas[mu] * *lambda;
        let mut rebuilt = ComplexMatrix4::zeros();
        for nu in 0..4 {
            let coef: Complex64 = (conj * gammas[nu]).trace() * (METRIC[nu] / 4.0);
            defect = defect.max(coef.im.abs());
            out[mu][nu] = coef.re;
            rebuilt += gammas[nu] * coef.re;
        }
        defect = defect.max(rebuilt.max_abs_diff(&conj));
    }
    let lscale = out.iter().flatten().fold(1.0f64, |a, b| a.max(b.abs()));
    if defect > 1e-10 * lscale {
        return Err(Error::NotInDiracRepresentation { defect });
    }
    Ok(LorentzMatrix(out))
}

/// Antisymmetric parameters `ω^{μν}` of a rotation θ combined with a boost τ,
/// returned with one index lowered as the matrix `ω^μ_ν`.
///
/// `θⁱ = ½ε_{ijk}ω^{jk}` and `τⁱ = ω^{0i}`.
pub fn generator_matrix(theta: &Vec3, tau: &Vec3) -> [[f64; 4]; 4] {
    let mut upper = [[0.0; 4]; 4];
    for i in 0..3 {
        upper[0][i + 1] = tau[i];
        upper[i + 1][0] = -tau[i];
        for j in 0..3 {
            upper[i + 1][j + 1] = (0..3)
                .map(|k| crate::linalg::levi_civita(i, j, k) * theta[k])
                .sum();
        }
    }
    let mut mixed = [[0.0; 4]; 4];
    for (mu, row) in mixed.iter_mut().enumerate() {
        for (nu, v) in row.iter_mut().enumerate() {
            *v = upper[mu][nu] * METRIC[nu];
        }
    }
    mixed
}

/// `λ(ω) = exp(−(i/2)ω^{αβ}s_{αβ})` for the same parametrization as
/// [`generator_matrix`].
pub fn dirac_from_generators(theta: &Vec3, tau: &Vec3) -> ComplexMatrix4 {
    let mut arg = ComplexMatrix4::zeros();
    for a in Axis::ALL {
        let i = a.index();
        // ω^{jk}s_{jk} summed = 2θ·s, ω^{0i}s_{0i} + ω^{i0}s_{i0} = 2τ·s_{0·}
        arg += spin_rotation_generator(a) * theta[i] + spin_boost_generator(a) * tau[i];
    }
    (arg * c(0.0, -1.0)).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::levi_civita;

    const TOL: f64 = 1e-13;

    #[test]
    fn clifford_relations() {
        for mu in 0..4 {
            for nu in 0..4 {
                let ac = gamma(mu).unwrap().anticommutator(&gamma(nu).unwrap());
                let expected = if mu == nu {
                    ComplexMatrix4::identity() * (2.0 * METRIC[mu])
                } else {
                    ComplexMatrix4::zeros()
                };
                assert!(ac.max_abs_diff(&expected) < 1e-14, "mu={mu} nu={nu}");
            }
        }
    }

    #[test]
    fn gamma_index_out_of_range() {
        assert_eq!(gamma(4), Err(Error::IndexOutOfRange { index: 4, bound: 4 }));
        assert!(spin_generator(0, 7).is_err());
    }

    #[test]
    fn gamma5_is_diagonal_chiral() {
        let g5 = gamma5();
        let expected = ComplexMatrix4::diagonal([-ONE, -ONE, ONE, ONE]);
        assert!(g5.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn charge_conjugation_identities() {
        let cc = charge_conjugation();
        assert!((cc * cc).max_abs_diff(&ComplexMatrix4::identity()) < 1e-15);
        for mu in 0..4 {
            let g = gamma(mu).unwrap();
            assert!((g.conj() + cc * g * cc).max_abs() < 1e-15);
        }
        let s12 = spin_generator_lower(1, 2).unwrap();
        assert!((s12.conj() + cc * s12 * cc).max_abs() < 1e-15);
        let s03 = spin_generator_lower(0, 3).unwrap();
        assert!((s03.conj() + cc * s03 * cc).max_abs() < 1e-15);
    }

    #[test]
    fn generators_have_block_form() {
        for a in Axis::ALL {
            let i = a.index();
            let from_eps: ComplexMatrix4 = (0..3)
                .flat_map(|j| (0..3).map(move |k| (j, k)))
                .map(|(j, k)| spin_generator(j + 1, k + 1).unwrap() * (0.5 * levi_civita(i, j, k)))
                .sum();
            assert!(from_eps.max_abs_diff(&spin_rotation_generator(a)) < TOL);
            let s0i = spin_generator_lower(0, i + 1).unwrap();
            assert!(s0i.max_abs_diff(&spin_boost_generator(a)) < TOL);
        }
        let s3 = spin_rotation_generator(Axis::Z);
        let expected = ComplexMatrix4::diagonal([c(0.5, 0.0), c(-0.5, 0.0), c(0.5, 0.0), c(-0.5, 0.0)]);
        assert!(s3.max_abs_diff(&expected) < TOL);
    }

    #[test]
    fn generators_antisymmetric_and_dirac_self_adjoint() {
        let g0 = gamma0();
        for mu in 0..4 {
            for nu in 0..4 {
                let s = spin_generator(mu, nu).unwrap();
                assert!((s + spin_generator(nu, mu).unwrap()).max_abs() < TOL);
                assert!((g0 * s.dagger() * g0).max_abs_diff(&s) < TOL);
            }
        }
    }

    #[test]
    fn rotation_generators_close_so3() {
        let s = spin_rotation_generators();
        for i in 0..3 {
            for j in 0..3 {
                let rhs: ComplexMatrix4 = (0..3).map(|k| s[k] * c(0.0, levi_civita(i, j, k))).sum();
                assert!(s[i].commutator(&s[j]).max_abs_diff(&rhs) < TOL);
            }
        }
    }

    #[test]
    fn rotation_by_two_pi_is_minus_identity() {
        let (r, r4) = rotation(&[0.0, 0.0, 2.0 * std::f64::consts::PI]);
        assert!(r.max_abs_diff(&(-ComplexMatrix2::identity())) < 1e-13);
        assert!(r4.max_abs_diff(&(-ComplexMatrix4::identity())) < 1e-13);
        let (r0, r04) = rotation(&[0.0; 3]);
        assert_eq!(r0, ComplexMatrix2::identity());
        assert_eq!(r04, ComplexMatrix4::identity());
    }

    #[test]
    fn boost_blocks() {
        let tau = [0.3, -0.8, 0.5];
        let (l, l4) = lorentz_boost_sl2(&tau);
        assert!(l.hermiticity_defect() < TOL);
        assert!((l.determinant() - ONE).norm() < TOL);
        let inv = l.inverse().unwrap();
        assert!(l4.block(0, 0).max_abs_diff(&l) < TOL);
        assert!(l4.block(1, 1).max_abs_diff(&inv) < TOL);
        // Hermitian positive definite: trace and determinant positive
        assert!(l.trace().re > 0.0);
    }

    #[test]
    fn identity_maps_to_identity() {
        let lam = lorentz_from_sl2(&ComplexMatrix4::identity()).unwrap();
        assert!(lam.max_abs_diff(&LorentzMatrix::identity()) < 1e-15);
    }

    #[test]
    fn rotation_maps_to_active_rotation() {
        // r̂(θ e3) rotates by +θ about e3
        let theta = 0.7f64;
        let lam = Sl2c::rotation(&[0.0, 0.0, theta]).lorentz();
        let x = lam.apply(&FourVector([0.0, 1.0, 0.0, 0.0]));
        assert!((x.0[1] - theta.cos()).abs() < TOL);
        assert!((x.0[2] - theta.sin()).abs() < TOL);
    }

    #[test]
    fn series_expansion_agrees_for_small_parameters() {
        // Λ = 1 + ω + ω²/2 + O(ω³)
        let theta = [0.3, -0.2, 0.5];
        let tau = [-0.1, 0.4, 0.2];
        for eps in [1e-2, 1e-3] {
            let th = theta.map(|x| x * eps);
            let ta = tau.map(|x| x * eps);
            let om = generator_matrix(&th, &ta);
            let lam = lorentz_from_sl2(&dirac_from_generators(&th, &ta)).unwrap();
            let mut worst: f64 = 0.0;
            for mu in 0..4 {
                for nu in 0..4 {
                    let sq: f64 = (0..4).map(|a| om[mu][a] * om[a][nu]).sum();
                    let series = if mu == nu { 1.0 } else { 0.0 } + om[mu][nu] + 0.5 * sq;
                    worst = worst.max((lam.0[mu][nu] - series).abs());
                }
            }
            assert!(worst < 2.0 * eps.powi(3), "eps={eps} worst={worst}");
        }
    }

    #[test]
    fn generator_exponential_matches_block_forms() {
        let theta = [0.2, 0.9, -0.4];
        let (_, r4) = rotation(&theta);
        assert!(dirac_from_generators(&theta, &[0.0; 3]).max_abs_diff(&r4) < 1e-13);
        let tau = [0.5, 0.1, -0.3];
        let (_, l4) = lorentz_boost_sl2(&tau);
        assert!(dirac_from_generators(&[0.0; 3], &tau).max_abs_diff(&l4) < 1e-13);
    }

    #[test]
    fn rejects_inputs_outside_representation() {
        let mut m = ComplexMatrix4::identity();
        m[(0, 2)] = ONE;
        assert!(matches!(lorentz_from_sl2(&m), Err(Error::NotInDiracRepresentation { .. })));
        // diag(A, B) with B != (A†)⁻¹ has no Lorentz image
        let a = ComplexMatrix2::new(c(2.0, 0.0), ZERO, ZERO, c(0.5, 0.0));
        let bad = ComplexMatrix4::block_diag(&a, &a);
        assert!(matches!(lorentz_from_sl2(&bad), Err(Error::NotInDiracRepresentation { .. })));
        assert_eq!(lorentz_from_sl2(&ComplexMatrix4::zeros()), Err(Error::Singular));
    }

    #[test]
    fn sl2c_rejects_bad_determinant() {
        assert!(Sl2c::new(ComplexMatrix2::identity() * 2.0).is_err());
        assert!(Sl2c::new(ComplexMatrix2::identity()).is_ok());
    }
}
