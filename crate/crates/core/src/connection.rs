//! Basis-dependent geometry of momentum space: the matrices
//! `Σᵢ(p) = ξ†σᵢξ`, the connection `Ωᵢ(p) = ξ†∂ᵢξ`, covariant derivatives
//! `∂̃ᵢ = ∂ᵢ + Ωᵢ`, Wigner matrices and the one-particle generator table.

use std::sync::Arc;

use crate::algebra::{lorentz_from_sl2, pauli, Axis, LorentzMatrix, Sl2c};
use crate::bases::{north_sum, PolarizationBasis};
use crate::error::Result;
use crate::kinematics::{pauli_boost, OnShellMomentum};
use crate::linalg::{c, levi_civita, norm3, ComplexMatrix2, Spinor2, Vec3, I};
use crate::numdiff;

/// `Σᵢ(p)`, Pauli matrices in the basis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SigmaMatrices {
    pub sigma: [ComplexMatrix2; 3],
}

/// `Ωᵢ(p)`, with units of inverse momentum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OmegaMatrices {
    pub omega: [ComplexMatrix2; 3],
}

/// `Σᵢ = X†σᵢX` where the columns of `X` are the basis spinors.
pub fn sigma_matrices(b: &PolarizationBasis, p: &Vec3) -> Result<SigmaMatrices> {
    let x = b.matrix(p)?;
    let xd = x.dagger();
    Ok(SigmaMatrices { sigma: Axis::ALL.map(|a| xd * pauli(a) * x) })
}

/// Closed forms of `Σᵢ(p)` in the momentum-helicity basis.
pub fn sigma_matrices_helicity(p: &Vec3) -> Result<SigmaMatrices> {
    crate::bases::ChartConfig::default().check(p)?;
    let [p1, p2, p3] = *p;
    let mag = norm3(p);
    let (s1, s2, s3) = (pauli(Axis::X), pauli(Axis::Y), pauli(Axis::Z));
    let transverse = s1 * p1 + s2 * p2;
    let den = mag * north_sum(p);
    Ok(SigmaMatrices {
        sigma: [
            s3 * (p1 / mag) - transverse * (p1 / den) + s1,
            s3 * (p2 / mag) - transverse * (p2 / den) + s2,
            s3 * (p3 / mag) - transverse * (1.0 / mag),
        ],
    })
}

/// Step used to differentiate the basis at `p`.
fn basis_step(b: &PolarizationBasis, p: &Vec3) -> f64 {
    let scale = b.length_scale(p);
    numdiff::step(if scale.is_finite() { scale } else { norm3(p).max(1.0) })
}

/// `Ωᵢ(p)` for one axis, by central differences of the basis.
pub fn omega_component(b: &PolarizationBasis, axis: Axis, p: &Vec3) -> Result<ComplexMatrix2> {
    if b.is_common() {
        return Ok(ComplexMatrix2::zeros());
    }
    let h = basis_step(b, p);
    let dx = numdiff::derivative(|q: &Vec3| b.matrix(q), p, axis, h)?;
    Ok(b.matrix(p)?.dagger() * dx)
}

/// `Ωᵢ(p) = X†∂ᵢX` by central differences.
pub fn omega_matrices(b: &PolarizationBasis, p: &Vec3) -> Result<OmegaMatrices> {
    let mut omega = [ComplexMatrix2::zeros(); 3];
    for a in Axis::ALL {
        omega[a.index()] = omega_component(b, a, p)?;
    }
    Ok(OmegaMatrices { omega })
}

/// Closed forms of `Ωᵢ(p)` in the momentum-helicity basis.
pub fn omega_matrices_helicity(p: &Vec3) -> Result<OmegaMatrices> {
    crate::bases::ChartConfig::default().check(p)?;
    let [p1, p2, p3] = *p;
    let mag = norm3(p);
    let (s1, s2, s3) = (pauli(Axis::X), pauli(Axis::Y), pauli(Axis::Z));
    let den = 2.0 * mag * mag * north_sum(p);
    let o1 = (s1 * (p1 * p2) + s3 * (mag * p2) + s2 * (mag * p3 + p2 * p2 + p3 * p3)) * c(0.0, -1.0 / den);
    let o2 = (s2 * (p1 * p2) + s3 * (mag * p1) + s1 * (mag * p3 + p1 * p1 + p3 * p3)) * c(0.0, 1.0 / den);
    let o3 = (s2 * p1 - s1 * p2) * c(0.0, 1.0 / (2.0 * mag * mag));
    Ok(OmegaMatrices { omega: [o1, o2, o3] })
}

/// Finite-difference step for a profile varying on `profile_scale`.
pub fn profile_step(b: &PolarizationBasis, p: &Vec3, profile_scale: f64) -> f64 {
    numdiff::step(profile_scale.min(b.length_scale(p)))
}

/// `∂̃ᵢf = ∂ᵢf + Ωᵢf` for a 2-spinor valued function `f`.
pub fn covariant_derivative<F>(
    f: F,
    b: &PolarizationBasis,
    axis: Axis,
    p: &Vec3,
    profile_scale: f64,
) -> Result<Spinor2>
where
    F: Fn(&Vec3) -> Result<Spinor2>,
{
    let h = profile_step(b, p, profile_scale);
    let here = f(p)?;
    let d = numdiff::derivative(&f, p, axis, h)?;
    Ok(d + omega_component(b, axis, p)? * here)
}

/// `Σ_σ' ξ_σ†∂ᵢ(ξ_σ'f_σ')`, the right-hand side of the covariant derivative
/// identity.
pub fn covariant_derivative_embedded<F>(
    f: F,
    b: &PolarizationBasis,
    axis: Axis,
    p: &Vec3,
    profile_scale: f64,
) -> Result<Spinor2>
where
    F: Fn(&Vec3) -> Result<Spinor2>,
{
    let h = profile_step(b, p, profile_scale);
    let embedded = |q: &Vec3| Ok(b.matrix(q)? * f(q)?);
    let d = numdiff::derivative(embedded, p, axis, h)?;
    Ok(b.matrix(p)?.dagger() * d)
}

/// `D(λ,p)` together with its inputs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WignerMatrix {
    pub d: ComplexMatrix2,
    pub lambda: Sl2c,
    pub p: OnShellMomentum,
    pub p_prime: OnShellMomentum,
}

impl WignerMatrix {
    /// `max(|D†D − 1|, |det D − 1|)`
    pub fn su2_defect(&self) -> f64 {
        let det = (self.d.determinant() - crate::linalg::ONE).norm();
        self.d.unitarity_defect().max(det)
    }
}

/// `λ` together with `Λ(λ)⁻¹`, for repeated evaluation of Wigner matrices.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LorentzAction {
    pub lambda: Sl2c,
    pub inverse: LorentzMatrix,
}

impl LorentzAction {
    pub fn new(lambda: &Sl2c) -> Result<Self> {
        let big = lorentz_from_sl2(&lambda.dirac())?;
        Ok(Self { lambda: *lambda, inverse: big.inverse() })
    }

    /// `p' = Λ⁻¹p` on the mass shell of `q`.
    pub fn preimage(&self, q: &OnShellMomentum) -> Result<OnShellMomentum> {
        q.with_momentum(self.inverse.apply(&q.four_vector()).spatial())
    }

    /// `D_{σσ'}(λ,p) = ξ_σ†(p) l̂_p⁻¹ λ̂ l̂_{p'} ξ_σ'(p')` with `p' = Λ(λ)⁻¹p`.
    pub fn wigner(&self, b: &PolarizationBasis, q: &OnShellMomentum) -> Result<WignerMatrix> {
        let q_prime = self.preimage(q)?;
        let d = b.matrix(&q.momentum())?.dagger()
            * pauli_boost(&q.neg())
            * *self.lambda.matrix()
            * pauli_boost(&q_prime)
            * b.matrix(&q_prime.momentum())?;
        Ok(WignerMatrix { d, lambda: self.lambda, p: *q, p_prime: q_prime })
    }
}

/// `D_{σσ'}(λ,p)`; see [`LorentzAction::wigner`].
pub fn wigner_matrix(lambda: &Sl2c, b: &PolarizationBasis, q: &OnShellMomentum) -> Result<WignerMatrix> {
    LorentzAction::new(lambda)?.wigner(b, q)
}

/// `kᵢ(p) = ε_{ijk}pʲΣₖ(p)/(2(E+m))`
pub fn boost_generator_matrix_part(q: &OnShellMomentum, b: &PolarizationBasis) -> Result<[ComplexMatrix2; 3]> {
    let sigma = sigma_matrices(b, &q.momentum())?.sigma;
    Ok(boost_matrix_part_from(q, &sigma))
}

pub(crate) fn boost_matrix_part_from(q: &OnShellMomentum, sigma: &[ComplexMatrix2; 3]) -> [ComplexMatrix2; 3] {
    let p = q.momentum();
    let f = 1.0 / (2.0 * (q.energy() + q.mass()));
    std::array::from_fn(|i| {
        let mut out = ComplexMatrix2::zeros();
        for j in 0..3 {
            for k in 0..3 {
                let eps = levi_civita(i, j, k);
                if eps != 0.0 {
                    out += sigma[k] * (eps * p[j] * f);
                }
            }
        }
        out
    })
}

/// A 2-spinor valued wave function on momentum space.
pub type ProfileFn<'a> = dyn Fn(&Vec3) -> Result<Spinor2> + 'a;

/// A derivative-bearing one-particle operator acting on profiles.
pub type DifferentialOperator = Arc<dyn Fn(&ProfileFn<'_>, &Vec3) -> Result<Spinor2> + Send + Sync>;

/// Derivative-bearing one-particle generators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DifferentialGenerator {
    /// `L̃ᵢ = −iε_{ijk}pʲ∂̃ₖ`
    Orbital(Axis),
    /// `J̃ᵢ = L̃ᵢ + Σᵢ/2`
    AngularMomentum(Axis),
    /// `K̃ᵢ = iE∂̃ᵢ + (i/2)pⁱ/E + kᵢ`, the symmetrized form of `iE∂̃ᵢ + kᵢ`
    /// that is hermitian with respect to `d³p`
    Boost(Axis),
    /// `X̃ⁱ = i∂̃ᵢ`
    Position(Axis),
}

/// Closure applying a derivative-bearing generator of mass `mass` in basis
/// `b` to a profile varying on `profile_scale`.
pub fn differential_operator(
    g: DifferentialGenerator,
    b: &PolarizationBasis,
    mass: f64,
    profile_scale: f64,
) -> DifferentialOperator {
    let b = b.clone();
    Arc::new(move |f: &ProfileFn<'_>, p: &Vec3| {
        let cov = |axis: Axis| covariant_derivative(f, &b, axis, p, profile_scale);
        match g {
            DifferentialGenerator::Position(a) => Ok(cov(a)? * I),
            DifferentialGenerator::Orbital(a) => orbital(&cov, a, p),
            DifferentialGenerator::AngularMomentum(a) => {
                let sigma = sigma_matrices(&b, p)?.sigma;
                Ok(orbital(&cov, a, p)? + sigma[a.index()] * f(p)? * 0.5)
            }
            DifferentialGenerator::Boost(a) => {
                let q = OnShellMomentum::new(mass, *p)?;
                let k = boost_generator_matrix_part(&q, &b)?;
                let weyl = c(0.0, 0.5 * p[a.index()] / q.energy());
                Ok(cov(a)? * c(0.0, q.energy()) + (k[a.index()] * f(p)?) + f(p)? * weyl)
            }
        }
    })
}

fn orbital(cov: &dyn Fn(Axis) -> Result<Spinor2>, a: Axis, p: &Vec3) -> Result<Spinor2> {
    let i = a.index();
    let mut out = Spinor2::zeros();
    for j in 0..3 {
        for k in 0..3 {
            let eps = levi_civita(i, j, k);
            if eps != 0.0 && p[j] != 0.0 {
                out = out + cov(Axis::ALL[k])? * c(0.0, -eps * p[j]);
            }
        }
    }
    Ok(out)
}

/// One-particle generators at a momentum: multiplicative parts as matrices,
/// derivative-bearing ones as closures.
#[derive(Clone)]
pub struct GeneratorTable {
    pub momentum: Vec3,
    pub energy: f64,
    /// `W̃`, the polarization operator.
    pub w: ComplexMatrix2,
    /// `W̃₀ = ½pⁱΣᵢ`
    pub w0: ComplexMatrix2,
    /// `S̃ᵢ = Σᵢ/2`
    pub spin: [ComplexMatrix2; 3],
    /// `kᵢ`
    pub k: [ComplexMatrix2; 3],
    pub orbital: [DifferentialOperator; 3],
    pub boost: [DifferentialOperator; 3],
}

impl std::fmt::Debug for GeneratorTable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GeneratorTable")
            .field("momentum", &self.momentum)
            .field("energy", &self.energy)
            .field("w", &self.w)
            .field("w0", &self.w0)
            .field("spin", &self.spin)
            .field("k", &self.k)
            .finish_non_exhaustive()
    }
}

/// Generator table at `q`. `W̃` is `Σ·n/2` in the basis, equal to `σ₃/2` for
/// bases whose spinors are eigenvectors of `σ·n`.
pub fn rqm_generator_table(
    q: &OnShellMomentum,
    b: &PolarizationBasis,
    profile_scale: f64,
) -> Result<GeneratorTable> {
    let p = q.momentum();
    let sigma = sigma_matrices(b, &p)?.sigma;
    let n = b.direction(&p)?;
    let w: ComplexMatrix2 = (0..3).map(|i| sigma[i] * (0.5 * n[i])).sum();
    let w0: ComplexMatrix2 = (0..3).map(|i| sigma[i] * (0.5 * p[i])).sum();
    let op = |g| differential_operator(g, b, q.mass(), profile_scale);
    Ok(GeneratorTable {
        momentum: p,
        energy: q.energy(),
        w,
        w0,
        spin: sigma.map(|s| s * 0.5),
        k: boost_matrix_part_from(q, &sigma),
        orbital: Axis::ALL.map(|a| op(DifferentialGenerator::Orbital(a))),
        boost: Axis::ALL.map(|a| op(DifferentialGenerator::Boost(a))),
    })
}

/// Checks that `λ` maps `p` to an in-chart `p'`; used by samplers.
pub fn transformed_in_chart(lambda: &Sl2c, b: &PolarizationBasis, q: &OnShellMomentum) -> bool {
    wigner_matrix(lambda, b, q).is_ok()
}
