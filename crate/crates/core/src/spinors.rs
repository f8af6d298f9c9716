//! Rest-frame spinors, the momentum-space spinors `u_σ(p)`, `v_σ(p)` and the
//! plane-wave mode spinors `U_{p,σ}(t,x)`, `V_{p,σ}(t,x)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bases::{conjugate_spinor, Polarization, PolarizationBasis};
use crate::error::Result;
use crate::kinematics::{standard_boost, OnShellMomentum};
use crate::linalg::{dot3, Spinor4, Vec3};

/// Frequency sign of a mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Frequency {
    Positive,
    Negative,
}

impl Frequency {
    pub fn sign(self) -> f64 {
        match self {
            Frequency::Positive => 1.0,
            Frequency::Negative => -1.0,
        }
    }
}

/// `ů_σ(p) = (ξ_σ; ξ_σ)/√2` and `v̊_σ(p) = (η_σ; −η_σ)/√2`, indexed by
/// [`Polarization::index`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RestSpinors {
    pub u_ring: [Spinor4; 2],
    pub v_ring: [Spinor4; 2],
}

pub fn rest_spinors(b: &PolarizationBasis, p: &Vec3) -> Result<RestSpinors> {
    let xi = b.spinors(p)?;
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let u_ring = xi.map(|x| Spinor4::stack(&x, &x) * r);
    let v_ring = xi.map(|x| {
        let eta = conjugate_spinor(&x);
        Spinor4::stack(&eta, &(-eta)) * r
    });
    Ok(RestSpinors { u_ring, v_ring })
}

/// `u_σ(p)` or `v_σ(p)` with its labels.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MomentumSpinor {
    pub components: Spinor4,
    pub frequency: Frequency,
    pub sigma: Polarization,
    pub momentum: OnShellMomentum,
}

impl MomentumSpinor {
    /// `max |(γ^μp_μ ∓ m)s|`, zero for solutions of the Dirac equation.
    pub fn dirac_residual(&self) -> f64 {
        let q = &self.momentum;
        let slash = q.four_vector().slash();
        let m = q.mass() * self.frequency.sign();
        (slash * self.components - self.components * m).max_abs() / q.scale()
    }
}

/// `u_σ(p) = N(p)l_p ů_σ(p)` and `v_σ(p) = N(p)l_p v̊_σ(p)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MomentumSpinors {
    pub u: [MomentumSpinor; 2],
    pub v: [MomentumSpinor; 2],
}

impl MomentumSpinors {
    pub fn u(&self, sigma: Polarization) -> Spinor4 {
        self.u[sigma.index()].components
    }

    pub fn v(&self, sigma: Polarization) -> Spinor4 {
        self.v[sigma.index()].components
    }
}

pub fn momentum_spinors(b: &PolarizationBasis, q: &OnShellMomentum) -> Result<MomentumSpinors> {
    let rest = rest_spinors(b, &q.momentum())?;
    let l = standard_boost(q) * q.normalization();
    let make = |s: &Spinor4, frequency, sigma| MomentumSpinor {
        components: l * *s,
        frequency,
        sigma,
        momentum: *q,
    };
    Ok(MomentumSpinors {
        u: Polarization::ALL.map(|s| make(&rest.u_ring[s.index()], Frequency::Positive, s)),
        v: Polarization::ALL.map(|s| make(&rest.v_ring[s.index()], Frequency::Negative, s)),
    })
}

/// Value of a mode spinor at `(t, x)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModeSpinorValue {
    pub value: Spinor4,
    pub t: f64,
    pub x: Vec3,
}

/// `U = u e^{−iEt+ip·x}/(2π)^{3/2}` or `V = v e^{iEt−ip·x}/(2π)^{3/2}`.
pub fn mode_spinor_value(s: &MomentumSpinor, t: f64, x: &Vec3) -> ModeSpinorValue {
    let q = &s.momentum;
    let phase = s.frequency.sign() * (dot3(&q.momentum(), x) - q.energy() * t);
    let factor = Complex64::from_polar((2.0 * PI).powf(-1.5), phase);
    ModeSpinorValue { value: s.components * factor, t, x: *x }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{charge_conjugation, gamma0, rotation};
    use crate::bases::{helicity_basis, spin_basis};
    use crate::linalg::{ComplexMatrix4, ONE, ZERO};

    fn q(p: Vec3) -> OnShellMomentum {
        OnShellMomentum::new(1.3, p).unwrap()
    }

    #[test]
    fn rest_spinor_structure() {
        let g0 = gamma0();
        for b in [spin_basis(), helicity_basis()] {
            let r = rest_spinors(&b, &[0.3, -0.4, 0.8]).unwrap();
            let mut up = ComplexMatrix4::zeros();
            let mut down = ComplexMatrix4::zeros();
            for s in 0..2 {
                assert!((g0 * r.u_ring[s]).max_abs_diff(&r.u_ring[s]) < 1e-15);
                assert!((g0 * r.v_ring[s] + r.v_ring[s]).max_abs() < 1e-15);
                for t in 0..2 {
                    let d = if s == t { ONE } else { ZERO };
                    assert!((r.u_ring[s].dot(&r.u_ring[t]) - d).norm() < 1e-14);
                    assert!((r.v_ring[s].dot(&r.v_ring[t]) - d).norm() < 1e-14);
                }
                up += r.u_ring[s].outer(&r.u_ring[s]);
                down += r.v_ring[s].outer(&r.v_ring[s]);
            }
            let one = ComplexMatrix4::identity();
            assert!(up.max_abs_diff(&((one + g0) * 0.5)) < 1e-14);
            assert!(down.max_abs_diff(&((one - g0) * 0.5)) < 1e-14);
        }
    }

    #[test]
    fn rest_v_is_charge_conjugate_of_u() {
        let r = rest_spinors(&spin_basis(), &[0.0; 3]).unwrap();
        let cc = charge_conjugation();
        for s in 0..2 {
            assert!((cc * r.u_ring[s].conj()).max_abs_diff(&r.v_ring[s]) < 1e-15);
        }
    }

    #[test]
    fn dirac_equations_and_normalization() {
        let cc = charge_conjugation();
        for b in [spin_basis(), helicity_basis()] {
            for p in [[0.2, 0.1, 0.5], [-3.0, 4.0, -1.0], [1e-3, 2e-3, 1e-3]] {
                let ms = momentum_spinors(&b, &q(p)).unwrap();
                for s in Polarization::ALL {
                    assert!(ms.u[s.index()].dirac_residual() < 1e-13);
                    assert!(ms.v[s.index()].dirac_residual() < 1e-13);
                    assert!((cc * ms.u(s).conj()).max_abs_diff(&ms.v(s)) < 1e-14);
                    for t in Polarization::ALL {
                        let d = if s == t { 1.0 } else { 0.0 };
                        assert!((ms.u(s).dot(&ms.u(t)).re - d).abs() < 1e-13);
                        assert!(ms.u(s).dot(&ms.u(t)).im.abs() < 1e-13);
                    }
                }
            }
        }
    }

    #[test]
    fn rest_frame_spinors_coincide() {
        let b = spin_basis();
        let ms = momentum_spinors(&b, &q([0.0; 3])).unwrap();
        let r = rest_spinors(&b, &[0.0; 3]).unwrap();
        for s in Polarization::ALL {
            assert!(ms.u(s).max_abs_diff(&r.u_ring[s.index()]) < 1e-15);
        }
    }

    #[test]
    fn frequency_orthogonality() {
        let b = helicity_basis();
        let p = [0.7, -0.2, 0.4];
        let plus = momentum_spinors(&b, &q(p)).unwrap();
        let minus = momentum_spinors(&b, &q(p).neg()).unwrap();
        for s in Polarization::ALL {
            for t in Polarization::ALL {
                assert!(plus.u(s).dot(&minus.v(t)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn basis_rotation_covariance() {
        let (r, _) = rotation(&[0.3, 0.5, -0.9]);
        let b = helicity_basis();
        let rotated = b.rotated(r);
        let p = [0.4, 1.0, -0.3];
        let ms = momentum_spinors(&b, &q(p)).unwrap();
        let ms_rot = momentum_spinors(&rotated, &q(p)).unwrap();
        let xi = b.spinors(&p).unwrap();
        for s in Polarization::ALL {
            let mut expected = Spinor4::zeros();
            for t in Polarization::ALL {
                let d = xi[t.index()].dot(&(r * xi[s.index()]));
                expected = expected + ms.u(t) * d;
            }
            assert!(ms_rot.u(s).max_abs_diff(&expected) < 1e-14);
        }
    }

    #[test]
    fn mode_values() {
        let b = spin_basis();
        let ms = momentum_spinors(&b, &q([0.3, -0.1, 0.2])).unwrap();
        let u = ms.u[0];
        let at0 = mode_spinor_value(&u, 0.0, &[0.0; 3]);
        assert!((at0.value * (2.0 * PI).powf(1.5)).max_abs_diff(&u.components) < 1e-14);

        // i∂_t U = E U
        let h = 1e-5;
        let x = [0.2, 0.4, -0.3];
        let (t0, e) = (0.7, u.momentum.energy());
        let fwd = mode_spinor_value(&u, t0 + h, &x).value;
        let bwd = mode_spinor_value(&u, t0 - h, &x).value;
        let dt = (fwd - bwd) * Complex64::new(0.0, 1.0 / (2.0 * h));
        let here = mode_spinor_value(&u, t0, &x).value;
        assert!(dt.max_abs_diff(&(here * e)) < 1e-6);

        // −i∂_i V = −p^i V
        let v = ms.v[1];
        for i in 0..3 {
            let mut xp = x;
            let mut xm = x;
            xp[i] += h;
            xm[i] -= h;
            let d = (mode_spinor_value(&v, t0, &xp).value - mode_spinor_value(&v, t0, &xm).value)
                * Complex64::new(0.0, -1.0 / (2.0 * h));
            let here = mode_spinor_value(&v, t0, &x).value;
            assert!(d.max_abs_diff(&(here * -v.momentum.momentum()[i])) < 1e-6);
        }
    }
}
