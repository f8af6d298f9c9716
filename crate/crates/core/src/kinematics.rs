//! On-shell momenta and the standard boosts `l_p`, `L_p`.

use serde::{Deserialize, Serialize};

use crate::algebra::{gamma0, gamma_dot, pauli_dot, FourVector, LorentzMatrix};
use crate::error::{Error, Result};
use crate::linalg::{dot3, neg3, norm3, ComplexMatrix2, ComplexMatrix4, Vec3};

/// Spatial momentum of a particle of mass `m`, always carried with its mass
/// so the energy is computed consistently.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OnShellMomentum {
    mass: f64,
    p: Vec3,
}

impl OnShellMomentum {
    pub fn new(mass: f64, p: Vec3) -> Result<Self> {
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::NonPositiveMass(mass));
        }
        if p.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("momentum"));
        }
        Ok(OnShellMomentum { mass, p })
    }

    pub fn at_rest(mass: f64) -> Result<Self> {
        Self::new(mass, [0.0; 3])
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn momentum(&self) -> Vec3 {
        self.p
    }

    /// `|p|`
    pub fn magnitude(&self) -> f64 {
        norm3(&self.p)
    }

    /// `E(p) = sqrt(m² + p²)`
    pub fn energy(&self) -> f64 {
        self.mass.hypot(self.magnitude())
    }

    /// `N(p) = sqrt(m/E)`
    pub fn normalization(&self) -> f64 {
        (self.mass / self.energy()).sqrt()
    }

    /// Same mass, momentum `−p`.
    pub fn neg(&self) -> Self {
        OnShellMomentum { mass: self.mass, p: neg3(&self.p) }
    }

    /// Same mass, another momentum.
    pub fn with_momentum(&self, p: Vec3) -> Result<Self> {
        Self::new(self.mass, p)
    }

    /// `(E, p)`
    pub fn four_vector(&self) -> FourVector {
        FourVector::new(self.energy(), self.p)
    }

    /// `max(1, E/m)`, the scale used to normalize operator comparisons.
    pub fn scale(&self) -> f64 {
        (self.energy() / self.mass).max(1.0)
    }
}

pub fn energy(q: &OnShellMomentum) -> f64 {
    q.energy()
}

pub fn normalization(q: &OnShellMomentum) -> f64 {
    q.normalization()
}

/// Upper block `l̂_p = (E + m − σ·p)/sqrt(2m(E+m))` of the standard boost,
/// its SL(2,C) element.
pub fn pauli_boost(q: &OnShellMomentum) -> ComplexMatrix2 {
    let (m, e) = (q.mass(), q.energy());
    let norm = (2.0 * m * (e + m)).sqrt();
    (ComplexMatrix2::identity() * (e + m) - pauli_dot(&q.momentum())) * (1.0 / norm)
}

/// Standard boost `l_p = (E + m + γ⁰γⁱpⁱ)/sqrt(2m(E+m))`, equal to
/// `diag(l̂_p, l̂_{−p}) = diag(l̂_p, l̂_p⁻¹)` in the chiral representation.
pub fn standard_boost(q: &OnShellMomentum) -> ComplexMatrix4 {
    let (m, e) = (q.mass(), q.energy());
    let norm = (2.0 * m * (e + m)).sqrt();
    let g0 = gamma0();
    (ComplexMatrix4::identity() * (e + m) + g0 * gamma_dot(&q.momentum())) * (1.0 / norm)
}

/// Sign selector for quantities evaluated at `±p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// `l_{±p}² = (E ± γ⁰γⁱpⁱ)/m`
pub fn boost_squared(q: &OnShellMomentum, sign: Sign) -> ComplexMatrix4 {
    let g0 = gamma0();
    (ComplexMatrix4::identity() * q.energy() + g0 * gamma_dot(&q.momentum()) * sign.value())
        * (1.0 / q.mass())
}

/// `L_p = Λ(l_p)`, in closed form.
pub fn lorentz_boost_matrix(q: &OnShellMomentum) -> LorentzMatrix {
    let (m, e, p) = (q.mass(), q.energy(), q.momentum());
    let mut out = [[0.0; 4]; 4];
    out[0][0] = e / m;
    for i in 0..3 {
        out[0][i + 1] = p[i] / m;
        out[i + 1][0] = p[i] / m;
        for j in 0..3 {
            let delta = if i == j { 1.0 } else { 0.0 };
            out[i + 1][j + 1] = delta + p[i] * p[j] / (m * (e + m));
        }
    }
    LorentzMatrix(out)
}

/// Momentum part of `Λ·(E(p), p)`.
pub fn transform_momentum(lambda: &LorentzMatrix, q: &OnShellMomentum) -> Result<OnShellMomentum> {
    q.with_momentum(lambda.apply(&q.four_vector()).spatial())
}

/// `p·v`
pub fn project(q: &OnShellMomentum, v: &Vec3) -> f64 {
    dot3(&q.momentum(), v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{lorentz_from_sl2, Sl2c};
    use crate::linalg::c;

    fn q(p: Vec3) -> OnShellMomentum {
        OnShellMomentum::new(1.0, p).unwrap()
    }

    #[test]
    fn energy_values() {
        assert_eq!(q([0.0; 3]).energy(), 1.0);
        let q34 = OnShellMomentum::new(3.0, [0.0, 4.0, 0.0]).unwrap();
        assert!((q34.energy() - 5.0).abs() < 1e-15);
        assert!((q34.normalization() - (3.0f64 / 5.0).sqrt()).abs() < 1e-15);
        let r = q([0.3, -1.2, 2.0]);
        assert!((r.energy().powi(2) - r.magnitude().powi(2) - 1.0).abs() < 1e-13);
    }

    #[test]
    fn rejects_bad_mass() {
        assert_eq!(OnShellMomentum::new(0.0, [0.0; 3]), Err(Error::NonPositiveMass(0.0)));
        assert!(OnShellMomentum::new(-1.0, [0.0; 3]).is_err());
        assert!(OnShellMomentum::new(f64::NAN, [0.0; 3]).is_err());
        assert!(OnShellMomentum::new(1.0, [f64::INFINITY, 0.0, 0.0]).is_err());
    }

    #[test]
    fn normalization_decreases() {
        let mut last = 1.0;
        assert_eq!(q([0.0; 3]).normalization(), 1.0);
        for k in 1..20 {
            let n = q([0.0, 0.0, k as f64 * 0.5]).normalization();
            assert!(n > 0.0 && n < last);
            last = n;
        }
    }

    #[test]
    fn standard_boost_properties() {
        assert!(standard_boost(&q([0.0; 3])).max_abs_diff(&ComplexMatrix4::identity()) < 1e-15);
        let r = q([0.4, -0.7, 1.3]);
        let l = standard_boost(&r);
        assert!(l.hermiticity_defect() < 1e-14);
        let g0 = gamma0();
        assert!((g0 * l * g0 * l).max_abs_diff(&ComplexMatrix4::identity()) < 1e-13);
        assert!((g0 * l * g0).max_abs_diff(&standard_boost(&r.neg())) < 1e-15);
        // chiral blocks
        let up = pauli_boost(&r);
        assert!(l.block(0, 0).max_abs_diff(&up) < 1e-15);
        assert!(l.block(1, 1).max_abs_diff(&pauli_boost(&r.neg())) < 1e-15);
        assert!((up.determinant() - c(1.0, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn boost_squared_matches_square() {
        let r = q([-2.0, 0.1, 0.9]);
        let l = standard_boost(&r);
        assert!((l * l).max_abs_diff(&boost_squared(&r, Sign::Plus)) < 1e-13);
        let lm = standard_boost(&r.neg());
        assert!((lm * lm).max_abs_diff(&boost_squared(&r, Sign::Minus)) < 1e-13);
    }

    #[test]
    fn projector_identities() {
        let r = q([0.5, 0.2, -0.3]);
        let g0 = gamma0();
        let one = ComplexMatrix4::identity();
        let pp = (one + g0) * 0.5;
        let pm = (one - g0) * 0.5;
        let e = r.energy();
        assert!((pp * boost_squared(&r, Sign::Plus) * pp).max_abs_diff(&(pp * e)) < 1e-13);
        assert!((pm * boost_squared(&r, Sign::Minus) * pm).max_abs_diff(&(pm * e)) < 1e-13);
    }

    #[test]
    fn boost_matrix_maps_rest_momentum() {
        let r = OnShellMomentum::new(2.0, [0.3, 1.1, -0.6]).unwrap();
        let lp = lorentz_boost_matrix(&r);
        let out = lp.apply(&FourVector::new(2.0, [0.0; 3]));
        assert!((out.0[0] - r.energy()).abs() < 1e-14);
        for i in 0..3 {
            assert!((out.0[i + 1] - r.momentum()[i]).abs() < 1e-14);
        }
        let via_sl2 = lorentz_from_sl2(&standard_boost(&r)).unwrap();
        assert!(via_sl2.max_abs_diff(&lp) < 1e-12);
        assert!(lorentz_boost_matrix(&q([0.0; 3])).max_abs_diff(&LorentzMatrix::identity()) == 0.0);
    }

    #[test]
    fn energy_is_time_component_after_transformation() {
        let lam = (Sl2c::rotation(&[0.3, 0.1, -1.0]) * Sl2c::boost(&[0.5, -0.2, 0.8])).lorentz();
        let r = q([1.0, -0.4, 0.25]);
        let moved = lam.apply(&r.four_vector());
        let on_shell = transform_momentum(&lam, &r).unwrap();
        assert!((on_shell.energy() - moved.time()).abs() < 1e-12);
    }
}
