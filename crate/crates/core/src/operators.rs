//! Momentum-space forms `Ỹ(p)` of the integral operators acting on Dirac
//! spinors: Hamiltonian, Pryce projectors, Pryce spin, Foldy–Wouthuysen
//! transformation, polarization and helicity operators, coordinate
//! correction, and the 2×2 restriction of the Pauli–Lubanski vector.

use std::fmt;
use std::sync::Arc;

use crate::algebra::{
    gamma0, gamma_dot, gamma_spatial, spin_dot, spin_rotation_generator, Axis,
};
use crate::bases::PolarizationBasis;
use crate::connection::sigma_matrices;
use crate::error::{Error, Result};
use crate::kinematics::{standard_boost, OnShellMomentum};
use crate::linalg::{c, levi_civita, ComplexMatrix2, ComplexMatrix4, Spinor4, I};
use crate::numdiff;
use crate::spinors::momentum_spinors;

/// Largest E-normalized disagreement accepted between independent
/// constructions of the same operator.
pub const CONSISTENCY_TOLERANCE: f64 = 1e-10;

/// `max |a − b| / max(1, E/m)`
pub fn normalized_diff(a: &ComplexMatrix4, b: &ComplexMatrix4, q: &OnShellMomentum) -> f64 {
    a.max_abs_diff(b) / q.scale()
}

/// `H̃_D(p) = mγ⁰ + γ⁰γⁱpⁱ`
pub fn hamiltonian(q: &OnShellMomentum) -> ComplexMatrix4 {
    let g0 = gamma0();
    g0 * q.mass() + g0 * gamma_dot(&q.momentum())
}

/// `(Π̃₊, Π̃₋) = ½(1 ± H̃_D/E)`
pub fn projectors(q: &OnShellMomentum) -> (ComplexMatrix4, ComplexMatrix4) {
    let one = ComplexMatrix4::identity();
    let h = hamiltonian(q) * (1.0 / q.energy());
    ((one + h) * 0.5, (one - h) * 0.5)
}

/// Boost-sandwich forms `(m/E)l_p((1+γ⁰)/2)l_p` and `(m/E)l_p⁻¹((1−γ⁰)/2)l_p⁻¹`.
pub fn projectors_sandwich(q: &OnShellMomentum) -> (ComplexMatrix4, ComplexMatrix4) {
    let one = ComplexMatrix4::identity();
    let g0 = gamma0();
    let (l, li) = (standard_boost(q), standard_boost(&q.neg()));
    let f = q.mass() / q.energy();
    (l * ((one + g0) * 0.5) * l * f, li * ((one - g0) * 0.5) * li * f)
}

/// Pryce spin in closed form:
/// `S̃ᵢ = (m/E)sᵢ + pⁱ(s·p)/(E(E+m)) + (i/2E)ε_{ijk}pʲγᵏ`.
pub fn pryce_spin_closed(q: &OnShellMomentum, axis: Axis) -> ComplexMatrix4 {
    let (m, e, p) = (q.mass(), q.energy(), q.momentum());
    let i = axis.index();
    let mut out = spin_rotation_generator(axis) * (m / e) + spin_dot(&p) * (p[i] / (e * (e + m)));
    for j in 0..3 {
        for k in 0..3 {
            let eps = levi_civita(i, j, k);
            if eps != 0.0 {
                out += gamma_spatial(Axis::ALL[k]) * c(0.0, eps * p[j] / (2.0 * e));
            }
        }
    }
    out
}

/// Pryce spin as the projector sandwich
/// `(m/E)[l_p sᵢ((1+γ⁰)/2)l_p + l_p⁻¹ sᵢ((1−γ⁰)/2)l_p⁻¹]`.
pub fn pryce_spin_sandwich(q: &OnShellMomentum, axis: Axis) -> ComplexMatrix4 {
    let one = ComplexMatrix4::identity();
    let g0 = gamma0();
    let s = spin_rotation_generator(axis);
    let (l, li) = (standard_boost(q), standard_boost(&q.neg()));
    (l * s * ((one + g0) * 0.5) * l + li * s * ((one - g0) * 0.5) * li) * (q.mass() / q.energy())
}

/// Pryce spin as `U_FW(−p) sᵢ U_FW(p)`.
pub fn pryce_spin_fw(q: &OnShellMomentum, axis: Axis) -> ComplexMatrix4 {
    fw_transform(&q.neg()) * spin_rotation_generator(axis) * fw_transform(q)
}

/// Pryce spin `S̃ᵢ(p)`, cross-checked against the sandwich form.
pub fn pryce_spin(q: &OnShellMomentum, axis: Axis) -> Result<ComplexMatrix4> {
    let closed = pryce_spin_closed(q, axis);
    let defect = normalized_diff(&closed, &pryce_spin_sandwich(q, axis), q);
    if !(defect <= CONSISTENCY_TOLERANCE) {
        return Err(Error::InternalMismatch { operator: "pryce_spin", defect });
    }
    Ok(closed)
}

/// `U_FW(p) = (E + m + γⁱpⁱ)/sqrt(2E(E+m))`
pub fn fw_transform(q: &OnShellMomentum) -> ComplexMatrix4 {
    let (m, e) = (q.mass(), q.energy());
    (ComplexMatrix4::identity() * (e + m) + gamma_dot(&q.momentum())) * (1.0 / (2.0 * e * (e + m)).sqrt())
}

/// `w(p) = l_p (s·n(p)) l_p⁻¹`
fn polarization_part(q: &OnShellMomentum, b: &PolarizationBasis) -> Result<ComplexMatrix4> {
    let n = b.direction(&q.momentum())?;
    Ok(standard_boost(q) * spin_dot(&n) * standard_boost(&q.neg()))
}

/// `W̃(p) = w(p)Π̃₊(p) + w(−p)Π̃₋(p)`
pub fn polarization(q: &OnShellMomentum, b: &PolarizationBasis) -> Result<ComplexMatrix4> {
    if !b.has_direction() {
        return Err(Error::MissingDirection);
    }
    let (pp, pm) = projectors(q);
    Ok(polarization_part(q, b)? * pp + polarization_part(&q.neg(), b)? * pm)
}

/// `W̃₀(p) = sᵢpⁱ`
pub fn helicity_operator(q: &OnShellMomentum) -> ComplexMatrix4 {
    spin_dot(&q.momentum())
}

/// Pryce coordinate correction in closed form:
/// `δX̃ⁱ = iγⁱ/2E + ε_{ijk}pʲsₖ/(E(E+m)) − ipⁱ(γ·p)/(2E²(E+m))`.
pub fn coordinate_correction(q: &OnShellMomentum, axis: Axis) -> ComplexMatrix4 {
    let (m, e, p) = (q.mass(), q.energy(), q.momentum());
    let i = axis.index();
    let mut out = gamma_spatial(axis) * c(0.0, 1.0 / (2.0 * e))
        - gamma_dot(&p) * c(0.0, p[i] / (2.0 * e * e * (e + m)));
    for j in 0..3 {
        for k in 0..3 {
            let eps = levi_civita(i, j, k);
            if eps != 0.0 {
                out += spin_rotation_generator(Axis::ALL[k]) * (eps * p[j] / (e * (e + m)));
            }
        }
    }
    out
}

/// Coordinate correction assembled from finite differences of the boosts,
/// `δx(p)Π̃₊ + δx₋(p)Π̃₋`, where `δx(p) = −iN⁻¹∂ᵢ(N l_p) l_p⁻¹` and
/// `δx₋(p) = −iN⁻¹∂ᵢ(N l_{−p}) l_{−p}⁻¹` differentiates the boost at `−p`
/// as a function of `p`.
pub fn coordinate_correction_projector_form(q: &OnShellMomentum, axis: Axis) -> Result<ComplexMatrix4> {
    let h = numdiff::step(q.magnitude().max(q.mass()));
    let n = q.normalization();
    let scaled_boost = |sign: f64| {
        move |p: &crate::linalg::Vec3| {
            let k = q.with_momentum(*p)?;
            let b = if sign > 0.0 { standard_boost(&k) } else { standard_boost(&k.neg()) };
            Ok(b * k.normalization())
        }
    };
    let d_plus = numdiff::derivative(scaled_boost(1.0), &q.momentum(), axis, h)?;
    let d_minus = numdiff::derivative(scaled_boost(-1.0), &q.momentum(), axis, h)?;
    let factor = -I * (1.0 / n);
    let dx_plus = d_plus * standard_boost(&q.neg()) * factor;
    let dx_minus = d_minus * standard_boost(q) * factor;
    let (pp, pm) = projectors(q);
    Ok(dx_plus * pp + dx_minus * pm)
}

/// Restriction of the Pauli–Lubanski vector to a polarization basis:
/// `W̃₀ = ½pⁱΣᵢ` and `W̃ᵢ = mΣᵢ/2 + pⁱW̃₀/(E+m)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PauliLubanski {
    pub w0: ComplexMatrix2,
    pub w: [ComplexMatrix2; 3],
}

impl PauliLubanski {
    /// `C̃₂ = −η^{μν}W̃_μW̃_ν = Σᵢ W̃ᵢ² − W̃₀²`
    pub fn casimir(&self) -> ComplexMatrix2 {
        let spatial: ComplexMatrix2 = self.w.iter().map(|w| *w * *w).sum();
        spatial - self.w0 * self.w0
    }
}

pub fn pauli_lubanski_restricted(q: &OnShellMomentum, b: &PolarizationBasis) -> Result<PauliLubanski> {
    let sigma = sigma_matrices(b, &q.momentum())?.sigma;
    let (m, e, p) = (q.mass(), q.energy(), q.momentum());
    let w0: ComplexMatrix2 = (0..3).map(|i| sigma[i] * (0.5 * p[i])).sum();
    let w = std::array::from_fn(|i| sigma[i] * (0.5 * m) + w0 * (p[i] / (e + m)));
    Ok(PauliLubanski { w0, w })
}

type KernelFn = Arc<dyn Fn(&OnShellMomentum) -> Result<ComplexMatrix4> + Send + Sync>;

/// Fourier transform `Ỹ(p)` of an integral operator.
#[derive(Clone)]
pub struct OperatorKernel {
    name: String,
    eval: KernelFn,
}

impl fmt::Debug for OperatorKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OperatorKernel").field("name", &self.name).finish()
    }
}

impl OperatorKernel {
    pub fn new<F>(name: impl Into<String>, eval: F) -> Self
    where
        F: Fn(&OnShellMomentum) -> Result<ComplexMatrix4> + Send + Sync + 'static,
    {
        OperatorKernel { name: name.into(), eval: Arc::new(eval) }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, q: &OnShellMomentum) -> Result<ComplexMatrix4> {
        let m = (self.eval)(q)?;
        if !m.is_finite() {
            return Err(Error::NonFinite("operator kernel"));
        }
        Ok(m)
    }

    pub fn hamiltonian() -> Self {
        Self::new("hamiltonian", |q| Ok(hamiltonian(q)))
    }

    pub fn pryce_spin(axis: Axis) -> Self {
        Self::new(format!("spin[{}]", axis.index() + 1), move |q| pryce_spin(q, axis))
    }

    pub fn polarization(b: PolarizationBasis) -> Self {
        Self::new("polarization", move |q| polarization(q, &b))
    }

    pub fn helicity() -> Self {
        Self::new("helicity0", |q| Ok(helicity_operator(q)))
    }

    pub fn coordinate_correction(axis: Axis) -> Self {
        Self::new(format!("coordinate[{}]", axis.index() + 1), move |q| {
            Ok(coordinate_correction(q, axis))
        })
    }

    /// `ỹ_{σσ'}(p) = u_σ(p)†Ỹ(p)u_σ'(p)`
    pub fn particle_matrix(&self, q: &OnShellMomentum, b: &PolarizationBasis) -> Result<ComplexMatrix2> {
        let y = self.eval(q)?;
        let ms = momentum_spinors(b, q)?;
        Ok(sandwich(&ms.u.map(|s| s.components), &y))
    }

    /// `v_σ(p)†Ỹ(−p)v_σ'(p)`, the action on negative-frequency modes.
    pub fn antiparticle_matrix(&self, q: &OnShellMomentum, b: &PolarizationBasis) -> Result<ComplexMatrix2> {
        let y = self.eval(&q.neg())?;
        let ms = momentum_spinors(b, q)?;
        Ok(sandwich(&ms.v.map(|s| s.components), &y))
    }
}

fn sandwich(spinors: &[Spinor4; 2], y: &ComplexMatrix4) -> ComplexMatrix2 {
    ComplexMatrix2::from_fn(|a, b| spinors[a].dot(&(*y * spinors[b])))
}
