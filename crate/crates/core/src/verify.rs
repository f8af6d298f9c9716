//! Seeded property suites. Each suite draws momenta or wave packets from a
//! per-sample ChaCha8 stream and reports the worst violation of a family of
//! identities, expressed in units of the suite's tolerance class.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, UnitSphere};
use serde::{Deserialize, Serialize};

use crate::algebra::{
    charge_conjugation, gamma, gamma0, gamma5, pauli, spin_rotation_generator, Axis, FourVector, Sl2c, METRIC,
};
use crate::bases::{
    helicity_basis, spin_basis, BasisKind, Polarization, PolarizationBasis, SAMPLER_CAP_HALF_ANGLE,
};
use crate::connection::{
    covariant_derivative, covariant_derivative_embedded, differential_operator, omega_matrices,
    omega_matrices_helicity, sigma_matrices, sigma_matrices_helicity, DifferentialGenerator, LorentzAction,
    boost_generator_matrix_part,
};
use crate::error::{Error, Result};
use crate::kinematics::OnShellMomentum;
use crate::linalg::{c, levi_civita, norm3, ComplexMatrix2, ComplexMatrix4, Spinor2, Spinor4, Vec3, I, ONE, ZERO};
use crate::operators::{
    coordinate_correction, coordinate_correction_projector_form, fw_transform, hamiltonian, helicity_operator,
    normalized_diff, pauli_lubanski_restricted, polarization, projectors, projectors_sandwich, pryce_spin_closed,
    pryce_spin_fw, pryce_spin_sandwich, OperatorKernel,
};
use crate::spinors::momentum_spinors;
use crate::wavepacket::{
    boost_trajectory, dipole_trajectory, expectation, gaussian_packet, mass_center_trajectory,
    spin_conservation_check, Observable, Species, WavePacket,
};

/// Default tolerances of the three classes of checks.
pub mod tolerance {
    /// Matrix identities.
    pub const ALGEBRAIC: f64 = 1e-12;
    /// Identities evaluated through finite differences.
    pub const FINITE_DIFFERENCE: f64 = 1e-6;
    /// Wave-packet expectation values.
    pub const QUADRATURE: f64 = 1e-3;
    /// Closed forms of `Σᵢ(p)` against their definition.
    pub const SIGMA_CLOSED_FORM: f64 = 1e-13;
}

/// Default momentum range `(min |p|/m, max |p|/m)`.
pub const DEFAULT_RANGE: (f64, f64) = (1e-3, 10.0);

/// Packet suites run at most this many packets, alternating particle and
/// antiparticle.
pub const PACKET_SAMPLES: usize = 2;

/// Gaussian width of suite packets, in units of the mass.
pub const PACKET_WIDTH: f64 = 0.15;

/// Evolution times of suite packets, in units of `1/m`.
pub const PACKET_TIMES: [f64; 3] = [0.0, 5.0, 10.0];

const MAX_DRAWS: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ToleranceClass {
    Algebraic,
    FiniteDifference,
    Quadrature,
}

impl ToleranceClass {
    pub fn value(self) -> f64 {
        match self {
            ToleranceClass::Algebraic => tolerance::ALGEBRAIC,
            ToleranceClass::FiniteDifference => tolerance::FINITE_DIFFERENCE,
            ToleranceClass::Quadrature => tolerance::QUADRATURE,
        }
    }
}

impl fmt::Display for ToleranceClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ToleranceClass::Algebraic => "algebraic",
            ToleranceClass::FiniteDifference => "finite-difference",
            ToleranceClass::Quadrature => "quadrature",
        })
    }
}

/// Built-in polarization basis used by a suite.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisChoice {
    Spin,
    #[default]
    Helicity,
}

impl BasisChoice {
    pub fn basis(self) -> PolarizationBasis {
        match self {
            BasisChoice::Spin => spin_basis(),
            BasisChoice::Helicity => helicity_basis(),
        }
    }

    pub fn kind(self) -> BasisKind {
        match self {
            BasisChoice::Spin => BasisKind::Spin,
            BasisChoice::Helicity => BasisKind::Helicity,
        }
    }
}

impl FromStr for BasisChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "spin" => Ok(BasisChoice::Spin),
            "helicity" => Ok(BasisChoice::Helicity),
            _ => Err(Error::InvalidArgument(format!("unknown basis {s:?}; expected spin or helicity"))),
        }
    }
}

impl fmt::Display for BasisChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BasisChoice::Spin => "spin",
            BasisChoice::Helicity => "helicity",
        })
    }
}

/// Directions removed from the sampling sphere.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CapExclusion {
    None,
    /// The cap around `−e₃`.
    South,
    /// The caps around `±e₃`, for checks that also evaluate the basis at `−p`.
    Both,
}

impl CapExclusion {
    pub fn admits(self, p: &Vec3) -> bool {
        let mag = norm3(p);
        if self == CapExclusion::None {
            return true;
        }
        if mag == 0.0 {
            return false;
        }
        let cos = p[2] / mag;
        let cap = SAMPLER_CAP_HALF_ANGLE.cos();
        match self {
            CapExclusion::None => true,
            CapExclusion::South => -cos < cap,
            CapExclusion::Both => cos.abs() < cap,
        }
    }
}

/// Momentum with `|p|/m` log-uniform in `range` and direction uniform on the
/// sphere minus the excluded caps.
pub fn sample_momentum<R: Rng + ?Sized>(rng: &mut R, mass: f64, range: (f64, f64), exclusion: CapExclusion) -> Vec3 {
    let (lo, hi) = range;
    let magnitude = if lo < hi { rng.random_range(lo.ln()..hi.ln()).exp() } else { lo };
    loop {
        let n: [f64; 3] = UnitSphere.sample(rng);
        if exclusion.admits(&n) {
            return n.map(|x| x * magnitude * mass);
        }
    }
}

/// Parameters of one suite run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteSpec {
    pub name: String,
    pub samples: usize,
    pub seed: u64,
    pub tolerance: f64,
    /// `(min |p|/m, max |p|/m)`
    pub momentum_range: (f64, f64),
    pub basis: BasisChoice,
    pub mass: f64,
}

impl SuiteSpec {
    /// Spec for a registered suite with its default tolerance, 100 samples,
    /// seed 0, the helicity basis and unit mass.
    pub fn new(name: &str) -> Result<Self> {
        let suite = find_suite(name)?;
        Ok(SuiteSpec {
            name: suite.name.to_string(),
            samples: 100,
            seed: 0,
            tolerance: suite.class.value(),
            momentum_range: DEFAULT_RANGE,
            basis: BasisChoice::default(),
            mass: 1.0,
        })
    }

    pub fn with_samples(mut self, samples: usize) -> Self {
        self.samples = samples;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn with_basis(mut self, basis: BasisChoice) -> Self {
        self.basis = basis;
        self
    }

    pub fn with_mass(mut self, mass: f64) -> Self {
        self.mass = mass;
        self
    }

    pub fn with_range(mut self, min: f64, max: f64) -> Self {
        self.momentum_range = (min, max);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::InvalidArgument("sample count must be at least 1".into()));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::InvalidArgument(format!("tolerance must be positive, got {}", self.tolerance)));
        }
        if !(self.mass > 0.0 && self.mass.is_finite()) {
            return Err(Error::NonPositiveMass(self.mass));
        }
        let (lo, hi) = self.momentum_range;
        if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
            return Err(Error::InvalidArgument(format!("invalid momentum range ({lo}, {hi})")));
        }
        Ok(())
    }
}

/// Outcome of a suite run. The wall time is not serialized, so reports of
/// identical specs serialize identically.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub suite: String,
    pub basis: BasisChoice,
    pub samples: usize,
    pub seed: u64,
    pub tolerance: f64,
    pub max_violation: f64,
    pub pass: bool,
    pub first_failure_p: Option<Vec3>,
    #[serde(skip)]
    pub wall_time: Duration,
}

/// Worst violation at one sample.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SampleOutcome {
    pub p: Vec3,
    pub violation: f64,
}

type Check = fn(&mut Probe) -> Result<SampleOutcome>;

/// A registered suite.
#[derive(Clone, Copy)]
pub struct Suite {
    pub name: &'static str,
    pub summary: &'static str,
    pub class: ToleranceClass,
    /// Runs in the helicity basis whatever the requested basis.
    pub helicity_only: bool,
    /// Samples wave packets rather than momenta.
    pub packets: bool,
    check: Check,
}

impl fmt::Debug for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Suite")
            .field("name", &self.name)
            .field("class", &self.class)
            .field("helicity_only", &self.helicity_only)
            .field("packets", &self.packets)
            .finish()
    }
}

const fn suite(name: &'static str, summary: &'static str, class: ToleranceClass, check: Check) -> Suite {
    Suite { name, summary, class, helicity_only: false, packets: false, check }
}

const fn helicity(mut s: Suite) -> Suite {
    s.helicity_only = true;
    s
}

const fn packets(mut s: Suite) -> Suite {
    s.packets = true;
    s
}

use ToleranceClass::{Algebraic, FiniteDifference, Quadrature};

static SUITES: [Suite; 20] = [
    suite("clifford", "gamma anticommutators, gamma5, charge conjugation, slash(p)^2 = m^2", Algebraic, clifford),
    suite("projectors", "Pi+- idempotent, orthogonal, complete; sandwich = H/E forms; eigen-spinors", Algebraic, projectors_check),
    suite("spin-equivalence", "Pryce spin: sandwich, closed and FW forms agree", Algebraic, spin_equivalence),
    suite("spin-algebra", "[S_i,S_j] = i eps S_k, [S_i,H] = 0, restriction Sigma/2", Algebraic, spin_algebra),
    packets(suite("spin-conservation", "<S>(t), <L>(t) constant; <J> = <L> + <S>", FiniteDifference, spin_conservation)),
    suite("fw", "FW transform unitary, U(-p) = U(p)^-1, diagonalizes H", Algebraic, fw),
    suite("polarization-eigen", "W u = s u, W(-p) v = -s v, W^2 = 1/4, [W,H] = 0", Algebraic, polarization_eigen),
    helicity(suite("helicity-sign", "helicity eigenvalues; W and W0 signs per species", Algebraic, helicity_sign)),
    suite("coordinate-identity", "eps_ijk dX^j p^k + S_i = s_i; dX hermitian", Algebraic, coordinate_identity),
    helicity(suite("sigma-omega-closed-forms", "helicity Sigma and Omega closed forms; p.Sigma = |p| s3, p.Omega = 0", FiniteDifference, sigma_omega)),
    suite("covariant-derivative-flatness", "[D_i,D_j] f = 0, D_i Sigma_j = Sigma_j D_i, embedding identity", FiniteDifference, flatness),
    suite("wigner-unitarity", "D(lambda,p) in SU(2); spinor transformation law", Algebraic, wigner_unitarity),
    suite("casimir", "-W^mu W_mu = 3/4 m^2 on the restriction", Algebraic, casimir),
    packets(suite("dipole-law", "<X>(t) = <X> + <V>t, mass-center law, <V> conserved", Quadrature, dipole_law)),
    suite("generator-splitting", "L and J close so(3), [L_i,S_j] = 0, p.L = 0, k_i hermitian with p.k = 0", FiniteDifference, generator_splitting),
    suite("spinors", "Dirac equations, u+u = delta, v = C u*, completeness", Algebraic, spinors),
    suite("coordinate-projector", "dX closed form against boost finite differences", FiniteDifference, coordinate_projector),
    packets(suite("boost-law", "<K>(t) = <K> + <P>t", Quadrature, boost_law)),
    packets(suite("packet-norm", "norm preserved by time evolution and Lorentz transformations", Quadrature, packet_norm)),
    packets(suite("hermitian-expectations", "expectations of hermitian generators are real", Quadrature, hermitian_expectations)),
];

/// All registered suites in a fixed order.
pub fn suites() -> &'static [Suite] {
    &SUITES
}

pub fn suite_names() -> Vec<&'static str> {
    SUITES.iter().map(|s| s.name).collect()
}

pub fn find_suite(name: &str) -> Result<&'static Suite> {
    SUITES
        .iter()
        .find(|s| s.name == name)
        .ok_or_else(|| Error::UnknownSuite { name: name.to_string(), registered: suite_names() })
}

/// Runs one suite. Samples are independent: sample `k` draws from stream `k`
/// of a ChaCha8 generator seeded with `spec.seed`.
pub fn run_suite(spec: &SuiteSpec) -> Result<VerificationReport> {
    let suite = find_suite(&spec.name)?;
    spec.validate()?;
    let basis = if suite.helicity_only { BasisChoice::Helicity } else { spec.basis };
    let count = if suite.packets { spec.samples.min(PACKET_SAMPLES) } else { spec.samples };
    let start = Instant::now();
    let mut max_violation: f64 = 0.0;
    let mut first_failure_p = None;
    for index in 0..count {
        let mut probe = Probe::new(spec, basis, index);
        let outcome = (suite.check)(&mut probe)?;
        if outcome.violation.is_nan() {
            return Err(Error::NonFinite("suite violation"));
        }
        max_violation = max_violation.max(outcome.violation);
        if first_failure_p.is_none() && outcome.violation > spec.tolerance {
            first_failure_p = Some(outcome.p);
        }
    }
    Ok(VerificationReport {
        suite: suite.name.to_string(),
        basis,
        samples: count,
        seed: spec.seed,
        tolerance: spec.tolerance,
        max_violation,
        pass: max_violation <= spec.tolerance,
        first_failure_p,
        wall_time: start.elapsed(),
    })
}

/// Sampling state of one sample.
pub struct Probe {
    rng: ChaCha8Rng,
    index: usize,
    mass: f64,
    range: (f64, f64),
    choice: BasisChoice,
    basis: PolarizationBasis,
}

impl Probe {
    fn new(spec: &SuiteSpec, choice: BasisChoice, index: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        rng.set_stream(index as u64);
        Probe { rng, index, mass: spec.mass, range: spec.momentum_range, choice, basis: choice.basis() }
    }

    fn exclusion(&self, both: bool) -> CapExclusion {
        match (self.choice, both) {
            (BasisChoice::Spin, _) => CapExclusion::None,
            (BasisChoice::Helicity, false) => CapExclusion::South,
            (BasisChoice::Helicity, true) => CapExclusion::Both,
        }
    }

    fn momentum(&mut self, both: bool) -> Result<OnShellMomentum> {
        let exclusion = self.exclusion(both);
        let p = sample_momentum(&mut self.rng, self.mass, self.range, exclusion);
        OnShellMomentum::new(self.mass, p)
    }

    /// Rotation by up to π about a random axis followed by a boost of
    /// rapidity up to 1.
    fn lorentz(&mut self) -> Sl2c {
        let axis: [f64; 3] = UnitSphere.sample(&mut self.rng);
        let angle = self.rng.random_range(0.0..PI);
        let dir: [f64; 3] = UnitSphere.sample(&mut self.rng);
        let rapidity = self.rng.random_range(0.0..1.0);
        Sl2c::rotation(&axis.map(|x| x * angle)) * Sl2c::boost(&dir.map(|x| x * rapidity))
    }

    /// Gaussian packet of width `PACKET_WIDTH·m` with an admissible center;
    /// even samples are particles, odd ones antiparticles.
    fn packet(&mut self) -> Result<WavePacket> {
        let species = if self.index.is_multiple_of(2) { Species::Particle } else { Species::Antiparticle };
        let pol = if self.rng.random_bool(0.5) { Polarization::Up } else { Polarization::Down };
        let exclusion = self.exclusion(false);
        for _ in 0..MAX_DRAWS {
            let center = sample_momentum(&mut self.rng, self.mass, self.range, exclusion);
            match gaussian_packet(self.mass, center, PACKET_WIDTH * self.mass, pol, self.basis.clone(), species) {
                Ok(w) => return Ok(w),
                Err(e) if e.is_chart_error() => continue,
                Err(e) => return Err(e),
            }
        }
        Err(Error::InvalidArgument("no packet center in the momentum range keeps the grid inside the chart".into()))
    }

    fn times(&self) -> Vec<f64> {
        PACKET_TIMES.iter().map(|t| t / self.mass).collect()
    }
}

/// Running maximum of violations rescaled to the suite's class: a check with
/// its own tolerance `tol` contributes `violation · class / tol`.
struct Tracker {
    class: f64,
    worst: f64,
}

impl Tracker {
    fn new(class: ToleranceClass) -> Self {
        Tracker { class: class.value(), worst: 0.0 }
    }

    fn record(&mut self, v: f64) {
        self.worst = if v.is_nan() { f64::NAN } else { self.worst.max(v) };
    }

    fn record_at(&mut self, v: f64, tol: f64) {
        self.record(v * self.class / tol);
    }

    fn outcome(self, p: Vec3) -> Result<SampleOutcome> {
        Ok(SampleOutcome { p, violation: self.worst })
    }
}

fn eps_sum<T>(i: usize, j: usize, items: &[T; 3]) -> T
where
    T: Copy + std::ops::Mul<num_complex::Complex64, Output = T> + std::ops::Add<Output = T>,
{
    let mut out = items[0] * ZERO;
    for (k, item) in items.iter().enumerate() {
        let e = levi_civita(i, j, k);
        if e != 0.0 {
            out = out + *item * c(0.0, e);
        }
    }
    out
}

fn clifford(pr: &mut Probe) -> Result<SampleOutcome> {
    let q = pr.momentum(false)?;
    let mut t = Tracker::new(Algebraic);
    let one = ComplexMatrix4::identity();
    let g: Vec<ComplexMatrix4> = (0..4).map(gamma).collect::<Result<_>>()?;
    let (g5, cc) = (gamma5(), charge_conjugation());
    for mu in 0..4 {
        for nu in 0..4 {
            let target = if mu == nu { one * (2.0 * METRIC[mu]) } else { ComplexMatrix4::zeros() };
            t.record(g[mu].anticommutator(&g[nu]).max_abs_diff(&target));
        }
        t.record(g[mu].anticommutator(&g5).max_abs());
        t.record((cc * g[mu].conj() * cc + g[mu]).max_abs());
    }
    t.record((g5 * g5).max_abs_diff(&one));
    t.record((cc * cc).max_abs_diff(&one));
    let slash = q.four_vector().slash();
    let m2 = q.mass() * q.mass();
    t.record((slash * slash).max_abs_diff(&(one * m2)) / (m2 * q.scale().powi(2)));
    t.outcome(q.momentum())
}

fn projectors_check(pr: &mut Probe) -> Result<SampleOutcome> {
    let q = pr.momentum(true)?;
    let mut t = Tracker::new(Algebraic);
    let one = ComplexMatrix4::identity();
    let (pp, pm) = projectors(&q);
    let (sp, sm) = projectors_sandwich(&q);
    t.record((pp + pm).max_abs_diff(&one));
    t.record((pp * pp).max_abs_diff(&pp));
    t.record((pm * pm).max_abs_diff(&pm));
    t.record((pp * pm).max_abs());
    t.record((pm * pp).max_abs());
    t.record(normalized_diff(&sp, &pp, &q));
    t.record(normalized_diff(&sm, &pm, &q));
    t.record(normalized_diff(&hamiltonian(&q), &((pp - pm) * q.energy()), &q));
    let here = momentum_spinors(&pr.basis, &q)?;
    let opposite = momentum_spinors(&pr.basis, &q.neg())?;
    for s in Polarization::ALL {
        t.record((pp * here.u(s)).max_abs_diff(&here.u(s)));
        t.record((pm * opposite.v(s)).max_abs_diff(&opposite.v(s)));
    }
    t.outcome(q.momentum())
}

fn spin_equivalence(pr: &mut Probe) -> Result<SampleOutcome> {
    let q = pr.momentum(false)?;
    let mut t = Tracker::new(Algebraic);
    for a in Axis::ALL {
        let closed = pryce_spin_closed(&q, a);
        t.record(normalized_diff(&closed, &pryce_spin_sandwich(&q, a), &q));
        t.record(normalized_diff(&closed, &pryce_spin_fw(&q, a), &q));
        t.record(closed.hermiticity_defect() / q.scale());
    }
    t.outcome(q.momentum())
}

fn spin_algebra(pr: &mut Probe) -> Result<SampleOutcome> {
    let q = pr.momentum(false)?;
    let mut t = Tracker::new(Algebraic);
    let s = Axis::ALL.map(|a| pryce_spin_closed(&q, a));
    let h = hamiltonian(&q);
    let sigma = sigma_matrices(&pr.basis, &q.momentum())?.sigma;
    for i in 0..3 {
        t.record(normalized_diff(&s[i].commutator(&h), &ComplexMatrix4::zeros(), &q));
        for j in 0..3 {
            t.record(normalized_diff(&s[i].commutator(&s[j]), &eps_sum(i, j, &s), &q));
        }
        let restricted = OperatorKernel::pryce_spin(Axis::ALL[i]).particle_matrix(&q, &pr.basis)?;
        t.record(restricted.max_abs_diff(&(sigma[i] * 0.5)));
    }
    t.outcome(q.momentum())
}

fn spin_conservation(pr: &mut Probe) -> Result<SampleOutcome> {
    let w = pr.packet()?;
    let r = spin_conservation_check(&w, &pr.times())?;
    let mut t = Tracker::new(FiniteDifference);
    t.record(r.max_spin_deviation);
    t.record(r.max_orbital_deviation);
    t.record(r.max_additivity_defect);
    t.outcome(w.grid().center)
}

fn fw(pr: &mut Probe) -> Result<SampleOutcome> {
    let q = pr.momentum(false)?;
    let mut t = Tracker::new(Algebraic);
    let (u, um) = (fw_transform(&q), fw_transform(&q.neg()));
    t.record(u.unitarity_defect());
    t.record((u * um).max_abs_diff(&ComplexMatrix4::identity()));
    t.record(um.max_abs_diff(&u.dagger()));
    t.record(normalized_diff(&(u * hamiltonian(&q) * um), &(gamma0() * q.energy()), &q));
    t.outcome(q.momentum())
}

fn polarization_eigen(pr: &mut Probe) -> Result<SampleOutcome> {
    let q = pr.momentum(true)?;
    let mut t = Tracker::new(Algebraic);
    let b = &pr.basis;
    let w = polarization(&q, b)?;
    let wm = polarization(&q.neg(), b)?;
    let h = hamiltonian(&q);
    let ms = momentum_spinors(b, &q)?;
    for s in Polarization::ALL {
        t.record((w * ms.u(s)).max_abs_diff(&(ms.u(s) * s.value())) / q.scale());
        t.record((wm * ms.v(s)).max_abs_diff(&(ms.v(s) * -s.value())) / q.scale());
    }
    t.record(normalized_diff(&(w * w), &(ComplexMatrix4::identity() * 0.25), &q));
    t.record(normalized_diff(&w.commutator(&h), &ComplexMatrix4::zeros(), &q));
    let half = pauli(Axis::Z) * 0.5;
    let kernel = OperatorKernel::polarization(b.clone());
    t.record(kernel.particle_matrix(&q, b)?.max_abs_diff(&half));
    t.record(kernel.antiparticle_matrix(&q, b)?.max_abs_diff(&(-half)));
    t.outcome(q.momentum())
}

/// The one-particle antiparticle operators carry the normal-ordering sign:
/// `W → −v†W̃(−p)v = +σ₃/2` while `W₀ → −v†W̃₀(−p)v = −(|p|/2)σ₃`.
fn helicity_sign(pr: &mut Probe) -> Result<SampleOutcome> {
    let q = pr.momentum(false)?;
    let mut t = Tracker::new(Algebraic);
    let b = &pr.basis;
    let mag = q.magnitude();
    let ms = momentum_spinors(b, &q)?;
    let (w0, w0m) = (helicity_operator(&q), helicity_operator(&q.neg()));
    for s in Polarization::ALL {
        t.record((w0 * ms.u(s)).max_abs_diff(&(ms.u(s) * (s.value() * mag))) / q.scale());
        t.record((w0m * ms.v(s)).max_abs_diff(&(ms.v(s) * (s.value() * mag))) / q.scale());
    }
    let s3 = pauli(Axis::Z);
    let hel = OperatorKernel::helicity();
    let pol = OperatorKernel::polarization(b.clone());
    t.record(hel.particle_matrix(&q, b)?.max_abs_diff(&(s3 * (0.5 * mag))) / q.scale());
    t.record((-hel.antiparticle_matrix(&q, b)?).max_abs_diff(&(s3 * (-0.5 * mag))) / q.scale());
    t.record(pol.particle_matrix(&q, b)?.max_abs_diff(&(s3 * 0.5)));
    t.record((-pol.antiparticle_matrix(&q, b)?).max_abs_diff(&(s3 * 0.5)));
    let pl = pauli_lubanski_restricted(&q, b)?;
    t.record(pl.w0.max_abs_diff(&(s3 * (0.5 * mag))) / q.scale());
    t.outcome(q.momentum())
}

fn coordinate_identity(pr: &mut Probe) -> Result<SampleOutcome> {
    let q = pr.momentum(false)?;
    let mut t = Tracker::new(Algebraic);
    let p = q.momentum();
    let dx = Axis::ALL.map(|a| coordinate_correction(&q, a));
    for a in Axis::ALL {
        let i = a.index();
        let mut lhs = pryce_spin_closed(&q, a) - spin_rotation_generator(a);
        for j in 0..3 {
            for k in 0..3 {
                let e = levi_civita(i, j, k);
                if e != 0.0 {
                    lhs += dx[j] * (e * p[k]);
                }
            }
        }
        t.record(lhs.max_abs() / q.scale());
        t.record(dx[i].hermiticity_defect() * q.mass());
    }
    t.outcome(p)
}

fn coordinate_projector(pr: &mut Probe) -> Result<SampleOutcome> {
    let q = pr.momentum(false)?;
    let mut t = Tracker::new(FiniteDifference);
    for a in Axis::ALL {
        let fd = coordinate_correction_projector_form(&q, a)?;
        t.record(fd.max_abs_diff(&coordinate_correction(&q, a)) * q.energy());
    }
    t.outcome(q.momentum())
}

fn sigma_omega(pr: &mut Probe) -> Result<SampleOutcome> {
    let q = pr.momentum(false)?;
    let p = q.momentum();
    let mut t = Tracker::new(FiniteDifference);
    let b = &pr.basis;
    let general = sigma_matrices(b, &p)?.sigma;
    let closed = sigma_matrices_helicity(&p)?.sigma;
    let fd = omega_matrices(b, &p)?.omega;
    let omega = omega_matrices_helicity(&p)?.omega;
    let (mut p_sigma, mut p_omega) = (ComplexMatrix2::zeros(), ComplexMatrix2::zeros());
    let ell = b.length_scale(&p);
    for i in 0..3 {
        t.record_at(general[i].max_abs_diff(&closed[i]), tolerance::SIGMA_CLOSED_FORM);
        t.record(fd[i].max_abs_diff(&omega[i]));
        t.record_at((omega[i] * I).hermiticity_defect() * ell, tolerance::ALGEBRAIC);
        for j in 0..3 {
            let rhs = eps_sum(i, j, &general) * 2.0;
            t.record_at(general[i].commutator(&general[j]).max_abs_diff(&rhs), tolerance::ALGEBRAIC);
        }
        p_sigma += general[i] * p[i];
        p_omega += omega[i] * p[i];
    }
    let mag = q.magnitude();
    t.record_at(p_sigma.max_abs_diff(&(pauli(Axis::Z) * mag)) / q.scale(), tolerance::ALGEBRAIC);
    t.record_at(p_omega.max_abs(), tolerance::ALGEBRAIC);
    t.outcome(p)
}

/// Smooth test profile varying on `width` around `center`.
fn test_profile(center: Vec3, width: f64) -> impl Fn(&Vec3) -> Result<Spinor2> + Clone {
    move |p: &Vec3| {
        let d: f64 = (0..3).map(|i| (p[i] - center[i]).powi(2)).sum();
        let g = (-d / (2.0 * width * width)).exp();
        let x = (p[0] - center[0]) / width;
        let y = (p[1] - center[1]) / width;
        Ok(Spinor2::new(c(g, 0.3 * g * x), c(0.5 * g * y, -g)))
    }
}

/// Sampled momentum with a test profile centered nearby; returns the profile
/// width and the effective finite-difference length scale.
fn profile_probe(pr: &mut Probe) -> Result<(OnShellMomentum, Vec3, f64, f64)> {
    let q = pr.momentum(false)?;
    let p = q.momentum();
    let width = 0.5 * q.magnitude().max(0.2 * q.mass());
    let shift: [f64; 3] = UnitSphere.sample(&mut pr.rng);
    let center = std::array::from_fn(|i| p[i] + 0.3 * width * shift[i]);
    let ell = width.min(pr.basis.length_scale(&p));
    Ok((q, center, width, ell))
}

fn flatness(pr: &mut Probe) -> Result<SampleOutcome> {
    let (q, center, width, ell) = profile_probe(pr)?;
    let p = q.momentum();
    let b = pr.basis.clone();
    let f = test_profile(center, width);
    let mut t = Tracker::new(FiniteDifference);
    let sigma = sigma_matrices(&b, &p)?.sigma;
    for i in Axis::ALL {
        let lhs = covariant_derivative(&f, &b, i, &p, width)?;
        let rhs = covariant_derivative_embedded(&f, &b, i, &p, width)?;
        t.record(lhs.max_abs_diff(&rhs) * ell);
        for j in Axis::ALL {
            let di = |k: &Vec3| covariant_derivative(&f, &b, i, k, width);
            let dj = |k: &Vec3| covariant_derivative(&f, &b, j, k, width);
            let dij = covariant_derivative(dj, &b, i, &p, width)?;
            let dji = covariant_derivative(di, &b, j, &p, width)?;
            t.record((dij - dji).max_abs() * ell * ell);

            let sf = |k: &Vec3| Ok(sigma_matrices(&b, k)?.sigma[j.index()] * f(k)?);
            let d_sf = covariant_derivative(sf, &b, i, &p, width)?;
            let s_df = sigma[j.index()] * covariant_derivative(&f, &b, i, &p, width)?;
            t.record(d_sf.max_abs_diff(&s_df) * ell);
        }
    }
    t.outcome(p)
}

fn wigner_unitarity(pr: &mut Probe) -> Result<SampleOutcome> {
    let q = pr.momentum(false)?;
    let exclusion = pr.exclusion(false);
    let b = pr.basis.clone();
    let mut t = Tracker::new(Algebraic);
    for _ in 0..MAX_DRAWS {
        let lambda = pr.lorentz();
        let action = LorentzAction::new(&lambda)?;
        let q_prime = action.preimage(&q)?;
        if !exclusion.admits(&q_prime.momentum()) {
            continue;
        }
        let w = action.wigner(&b, &q)?;
        t.record(w.su2_defect());
        // λ u_σ(p') = sqrt(E/E') Σ_σ' u_σ'(p) D_σ'σ
        let at_p = momentum_spinors(&b, &q)?;
        let at_pp = momentum_spinors(&b, &q_prime)?;
        let ratio = (q.energy() / q_prime.energy()).sqrt();
        let dirac = lambda.dirac();
        for s in Polarization::ALL {
            let lhs = dirac * at_pp.u(s);
            let mut rhs = Spinor4::zeros();
            for r in Polarization::ALL {
                rhs = rhs + at_p.u(r) * w.d[(r.index(), s.index())];
            }
            t.record(lhs.max_abs_diff(&(rhs * ratio)) / q.scale().max(q_prime.scale()));
        }
        return t.outcome(q.momentum());
    }
    Err(Error::InvalidArgument("no Lorentz transformation keeps p' inside the chart".into()))
}

fn casimir(pr: &mut Probe) -> Result<SampleOutcome> {
    let q = pr.momentum(false)?;
    let mut t = Tracker::new(Algebraic);
    let pl = pauli_lubanski_restricted(&q, &pr.basis)?;
    let m2 = q.mass() * q.mass();
    let target = ComplexMatrix2::identity() * (0.75 * m2);
    t.record(pl.casimir().max_abs_diff(&target) / (m2 * q.scale().powi(2)));
    t.outcome(q.momentum())
}

fn dipole_law(pr: &mut Probe) -> Result<SampleOutcome> {
    let w = pr.packet()?;
    let times = pr.times();
    let mut t = Tracker::new(Quadrature);
    let dipole = dipole_trajectory(&w, &times)?;
    let mc = mass_center_trajectory(&w, &times)?;
    t.record(dipole.max_residual);
    t.record(mc.max_residual);
    t.record_at(dipole.max_velocity_drift, tolerance::FINITE_DIFFERENCE);
    t.record_at(mc.max_velocity_drift, tolerance::FINITE_DIFFERENCE);
    t.outcome(w.grid().center)
}

fn boost_law(pr: &mut Probe) -> Result<SampleOutcome> {
    let w = pr.packet()?;
    let r = boost_trajectory(&w, &pr.times())?;
    let mut t = Tracker::new(Quadrature);
    t.record(r.max_residual);
    t.outcome(w.grid().center)
}

fn packet_norm(pr: &mut Probe) -> Result<SampleOutcome> {
    let w = pr.packet()?;
    let mut t = Tracker::new(Quadrature);
    for time in pr.times() {
        t.record((expectation(Observable::Norm, &w, time)?.value - 1.0).abs());
    }
    for _ in 0..MAX_DRAWS {
        let lambda = pr.lorentz();
        let shift: [f64; 3] = UnitSphere.sample(&mut pr.rng);
        let a = FourVector::new(pr.rng.random_range(-1.0..1.0) / pr.mass, shift.map(|x| x / pr.mass));
        match w.transformed(&lambda, &a) {
            Ok(moved) => {
                let n = expectation(Observable::Norm, &moved, 0.0)?;
                t.record((n.value - 1.0).abs());
                return t.outcome(w.grid().center);
            }
            Err(e) if e.is_chart_error() => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::InvalidArgument("no Lorentz transformation keeps the packet inside the chart".into()))
}

/// `|Im⟨O⟩|/max(1, ⟨H⟩/m)` for the hermitian generators, against the bound
/// `1e-10`.
fn hermitian_expectations(pr: &mut Probe) -> Result<SampleOutcome> {
    const IMAGINARY_BOUND: f64 = 1e-10;
    let w = pr.packet()?;
    let mut t = Tracker::new(Quadrature);
    let mut obs = vec![Observable::Norm, Observable::Charge, Observable::Energy, Observable::Polarization, Observable::Helicity];
    for a in Axis::ALL {
        obs.extend([
            Observable::Momentum(a),
            Observable::Spin(a),
            Observable::Orbital(a),
            Observable::Boost(a),
            Observable::Position(a),
            Observable::Velocity(a),
        ]);
    }
    for time in [0.0, PACKET_TIMES[2] / pr.mass] {
        let reports = crate::wavepacket::expectations(&obs, &w, time)?;
        let scale = (reports[2].value / pr.mass).max(1.0);
        for r in reports {
            t.record_at(r.imaginary.abs() / scale, IMAGINARY_BOUND);
        }
    }
    t.outcome(w.grid().center)
}

fn generator_splitting(pr: &mut Probe) -> Result<SampleOutcome> {
    let (q, center, width, ell) = profile_probe(pr)?;
    let p = q.momentum();
    let b = pr.basis.clone();
    let f = test_profile(center, width);
    let mut t = Tracker::new(FiniteDifference);
    let op = |g| differential_operator(g, &b, q.mass(), width);
    let l = Axis::ALL.map(|a| op(DifferentialGenerator::Orbital(a)));
    let j = Axis::ALL.map(|a| op(DifferentialGenerator::AngularMomentum(a)));
    let sigma = sigma_matrices(&b, &p)?.sigma;
    let momentum_scale = q.scale();

    let mut p_dot_l = Spinor2::zeros();
    for x in 0..3 {
        p_dot_l = p_dot_l + (l[x])(&f, &p)? * p[x];
        for y in 0..3 {
            for ops in [&l, &j] {
                let of = |k: &Vec3| (ops[y])(&f, k);
                let xf = |k: &Vec3| (ops[x])(&f, k);
                let xy = (ops[x])(&of, &p)?;
                let yx = (ops[y])(&xf, &p)?;
                let mut rhs = Spinor2::zeros();
                for z in 0..3 {
                    let e = levi_civita(x, y, z);
                    if e != 0.0 {
                        rhs = rhs + (ops[z])(&f, &p)? * c(0.0, e);
                    }
                }
                t.record((xy - yx - rhs).max_abs() * ell * ell / momentum_scale);
            }
            // [Lₓ, S_y] f = 0
            let sf = |k: &Vec3| Ok(sigma_matrices(&b, k)?.sigma[y] * f(k)? * 0.5);
            let l_sf = (l[x])(&sf, &p)?;
            let s_lf = sigma[y] * (l[x])(&f, &p)? * 0.5;
            t.record(l_sf.max_abs_diff(&s_lf) * ell / momentum_scale);
        }
    }
    t.record(p_dot_l.max_abs() * ell / momentum_scale.powi(2));

    let k = boost_generator_matrix_part(&q, &b)?;
    let mut p_dot_k = ComplexMatrix2::zeros();
    for x in 0..3 {
        t.record_at(k[x].hermiticity_defect(), tolerance::ALGEBRAIC);
        p_dot_k += k[x] * p[x];
    }
    t.record_at(p_dot_k.max_abs() / momentum_scale, tolerance::ALGEBRAIC);
    t.outcome(p)
}

fn spinors(pr: &mut Probe) -> Result<SampleOutcome> {
    let q = pr.momentum(true)?;
    let mut t = Tracker::new(Algebraic);
    let b = &pr.basis;
    let ms = momentum_spinors(b, &q)?;
    let opposite = momentum_spinors(b, &q.neg())?;
    let cc = charge_conjugation();
    let (pp, pm) = projectors(&q);
    let (mut up, mut down) = (ComplexMatrix4::zeros(), ComplexMatrix4::zeros());
    for s in Polarization::ALL {
        t.record(ms.u[s.index()].dirac_residual());
        t.record(ms.v[s.index()].dirac_residual());
        t.record((cc * ms.u(s).conj()).max_abs_diff(&ms.v(s)));
        for r in Polarization::ALL {
            let d = if r == s { ONE } else { ZERO };
            t.record((ms.u(s).dot(&ms.u(r)) - d).norm());
            t.record((ms.v(s).dot(&ms.v(r)) - d).norm());
            t.record(ms.u(s).dot(&opposite.v(r)).norm());
        }
        up += ms.u(s).outer(&ms.u(s));
        down += opposite.v(s).outer(&opposite.v(s));
    }
    t.record(up.max_abs_diff(&pp));
    t.record(down.max_abs_diff(&pm));
    t.outcome(q.momentum())
}
