//! One-particle wave packets in momentum space: quadrature expectation values
//! of the restricted generators, free time evolution and the kinematics of
//! the dipole and mass-center coordinates.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{Axis, FourVector, Sl2c};
use crate::bases::{Polarization, PolarizationBasis};
use crate::connection::{
    boost_matrix_part_from, covariant_derivative, sigma_matrices, DifferentialGenerator, LorentzAction,
};
use crate::error::{Error, Result};
use crate::kinematics::{transform_momentum, OnShellMomentum};
use crate::linalg::{c, dot3, levi_civita, norm3, ComplexMatrix2, Spinor2, Vec3, I, ZERO};
use crate::quadrature::CubeGrid;

/// Default relative bound on the quadrature error estimate.
pub const QUADRATURE_TOLERANCE: f64 = 1e-3;
/// Packet grids extend this many widths from the center.
pub const GRID_HALF_WIDTHS: f64 = 6.0;
pub const DEFAULT_POINTS: usize = 40;
pub const DEFAULT_CHECK_POINTS: usize = 32;
const MAX_TRANSFORMED_POINTS: usize = 96;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Species {
    Particle,
    Antiparticle,
}

impl FromStr for Species {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "particle" => Ok(Species::Particle),
            "antiparticle" => Ok(Species::Antiparticle),
            other => Err(Error::InvalidArgument(format!("unknown species {other:?}"))),
        }
    }
}

impl fmt::Display for Species {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Species::Particle => "particle",
            Species::Antiparticle => "antiparticle",
        })
    }
}

/// Cubic quadrature grid with a coarser companion rule for error estimates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub center: Vec3,
    pub half_width: f64,
    pub points: usize,
    pub check_points: usize,
}

impl GridSpec {
    /// Default grid for a packet of width `width` around `center`.
    pub fn around(center: Vec3, width: f64) -> Self {
        GridSpec {
            center,
            half_width: GRID_HALF_WIDTHS * width,
            points: DEFAULT_POINTS,
            check_points: DEFAULT_CHECK_POINTS,
        }
    }

    fn cube(&self, points: usize) -> CubeGrid {
        CubeGrid { center: self.center, half_width: self.half_width, points }
    }

    fn validate(&self) -> Result<()> {
        if !(self.half_width > 0.0 && self.half_width.is_finite()) || self.center.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument("grid needs a finite center and positive half-width".into()));
        }
        if self.points < 2 || self.check_points < 2 || self.points == self.check_points {
            return Err(Error::InvalidArgument("grid needs two distinct rules of at least 2 points".into()));
        }
        Ok(())
    }
}

/// `p ↦ (α_{+½}(p), α_{−½}(p))`
pub type Profile = Arc<dyn Fn(&Vec3) -> Result<Spinor2> + Send + Sync>;

/// Species-pure one-particle state.
#[derive(Clone)]
pub struct WavePacket {
    profile: Profile,
    species: Species,
    basis: PolarizationBasis,
    grid: GridSpec,
    mass: f64,
    scale: f64,
    tolerance: f64,
}

impl fmt::Debug for WavePacket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WavePacket")
            .field("species", &self.species)
            .field("basis", &self.basis.kind())
            .field("grid", &self.grid)
            .field("mass", &self.mass)
            .field("scale", &self.scale)
            .finish_non_exhaustive()
    }
}

impl WavePacket {
    /// Packet with an arbitrary profile. `scale` is the momentum scale on
    /// which the profile varies. The grid must avoid the basis chart limits.
    pub fn new(
        mass: f64,
        profile: Profile,
        species: Species,
        basis: PolarizationBasis,
        grid: GridSpec,
        scale: f64,
    ) -> Result<Self> {
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::NonPositiveMass(mass));
        }
        if !(scale > 0.0) {
            return Err(Error::InvalidArgument(format!("profile scale must be positive, got {scale}")));
        }
        grid.validate()?;
        if let Some(chart) = basis.chart() {
            chart.check_box(&grid.center, grid.half_width)?;
        }
        Ok(WavePacket { profile, species, basis, grid, mass, scale, tolerance: QUADRATURE_TOLERANCE })
    }

    pub fn species(&self) -> Species {
        self.species
    }

    pub fn basis(&self) -> &PolarizationBasis {
        &self.basis
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn with_species(mut self, species: Species) -> Self {
        self.species = species;
        self
    }

    pub fn with_grid(self, grid: GridSpec) -> Result<Self> {
        let WavePacket { profile, species, basis, mass, scale, tolerance, .. } = self;
        Ok(WavePacket::new(mass, profile, species, basis, grid, scale)?.with_tolerance(tolerance))
    }

    /// `α(p)`
    pub fn amplitude(&self, p: &Vec3) -> Result<Spinor2> {
        (self.profile)(p)
    }

    /// `α(p,t) = e^{−iE(p)t}α(p)`. The same phase applies to both species:
    /// the state of an antiparticle evolves with positive energy.
    pub fn evolved(&self, p: &Vec3, t: f64) -> Result<Spinor2> {
        let a = (self.profile)(p)?;
        if t == 0.0 {
            return Ok(a);
        }
        let e = (self.mass * self.mass + dot3(p, p)).sqrt();
        Ok(a * Complex64::from_polar(1.0, -e * t))
    }

    /// Scale on which `α(p,t)` varies; the phase oscillates on `1/|t|`.
    fn scale_at(&self, t: f64) -> f64 {
        if t == 0.0 {
            self.scale
        } else {
            self.scale.min(1.0 / t.abs())
        }
    }

    /// `(T̃_{λ,a}α)(p) = sqrt(E(p')/E(p)) e^{ia·p} D(λ,p) α(p')` with
    /// `p' = Λ⁻¹p`. The profile is taken to vanish outside the original grid,
    /// and the new grid bounds the image of the original one.
    pub fn transformed(&self, lambda: &Sl2c, a: &FourVector) -> Result<WavePacket> {
        let action = LorentzAction::new(lambda)?;
        let forward = action.inverse.inverse();
        let grid = image_grid(&self.grid, &forward, self.mass)?;
        let gamma = forward.0[0][0].max(1.0);
        let stretch = gamma + (gamma * gamma - 1.0).sqrt();
        let translation = norm3(&a.spatial()).max(a.time().abs());
        let mut scale = self.scale / stretch;
        if translation > 0.0 {
            scale = scale.min(1.0 / translation);
        }

        let original = self.profile.clone();
        let support = self.grid.cube(self.grid.points);
        let basis = self.basis.clone();
        let mass = self.mass;
        let a = *a;
        let profile: Profile = Arc::new(move |p: &Vec3| {
            let q = OnShellMomentum::new(mass, *p)?;
            let q_prime = action.preimage(&q)?;
            if !support.contains(&q_prime.momentum()) {
                return Ok(Spinor2::zeros());
            }
            let d = action.wigner(&basis, &q)?.d;
            let phase = a.time() * q.energy() - dot3(&a.spatial(), p);
            let factor = Complex64::from_polar((q_prime.energy() / q.energy()).sqrt(), phase);
            Ok(d * original(&q_prime.momentum())? * factor)
        });
        Ok(WavePacket::new(self.mass, profile, self.species, self.basis.clone(), grid, scale)?
            .with_tolerance(self.tolerance))
    }
}

/// Cubic grid bounding the on-shell image of `grid` under `forward`.
fn image_grid(grid: &GridSpec, forward: &crate::algebra::LorentzMatrix, mass: f64) -> Result<GridSpec> {
    const FACE_SAMPLES: usize = 9;
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    let h = grid.half_width;
    let ticks: Vec<f64> = (0..FACE_SAMPLES).map(|k| -1.0 + 2.0 * k as f64 / (FACE_SAMPLES - 1) as f64).collect();
    for axis in 0..3 {
        for side in [-1.0, 1.0] {
            for &u in &ticks {
                for &v in &ticks {
                    let mut p = grid.center;
                    let (j, k) = ((axis + 1) % 3, (axis + 2) % 3);
                    p[axis] += side * h;
                    p[j] += u * h;
                    p[k] += v * h;
                    let image = transform_momentum(forward, &OnShellMomentum::new(mass, p)?)?.momentum();
                    for i in 0..3 {
                        lo[i] = lo[i].min(image[i]);
                        hi[i] = hi[i].max(image[i]);
                    }
                }
            }
        }
    }
    let center = std::array::from_fn(|i| 0.5 * (lo[i] + hi[i]));
    let half_width = (0..3).map(|i| 0.5 * (hi[i] - lo[i])).fold(0.0, f64::max) * 1.05;
    // keep the node density of the original grid
    let ratio = (half_width / grid.half_width).max(1.0);
    let grow = |n: usize| ((n as f64 * ratio).ceil() as usize).min(MAX_TRANSFORMED_POINTS).max(n);
    let points = grow(grid.points);
    let check_points = grow(grid.check_points).min(points - 1);
    Ok(GridSpec { center, half_width, points, check_points })
}

/// `α_σ(p) = δ_{σ,pol}(πw²)^{−3/4} exp(−|p − center|²/2w²)` on the default grid.
pub fn gaussian_packet(
    mass: f64,
    center: Vec3,
    width: f64,
    pol: Polarization,
    basis: PolarizationBasis,
    species: Species,
) -> Result<WavePacket> {
    if !(width > 0.0 && width.is_finite()) {
        return Err(Error::InvalidArgument(format!("packet width must be positive, got {width}")));
    }
    if center.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("packet center"));
    }
    let amplitude = (std::f64::consts::PI * width * width).powf(-0.75);
    let slot = pol.index();
    let profile: Profile = Arc::new(move |p: &Vec3| {
        let d: f64 = (0..3).map(|i| (p[i] - center[i]).powi(2)).sum();
        let g = amplitude * (-d / (2.0 * width * width)).exp();
        let mut out = Spinor2::zeros();
        out[slot] = c(g, 0.0);
        Ok(out)
    });
    WavePacket::new(mass, profile, species, basis, GridSpec::around(center, width), width)
}

/// Quantities whose expectation values can be taken in a one-particle state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Observable {
    /// `⟨α, α⟩`
    Norm,
    /// `Q`
    Charge,
    /// `H`
    Energy,
    /// `Pⁱ`
    Momentum(Axis),
    /// `W`, the polarization
    Polarization,
    /// `W₀`
    Helicity,
    /// `Sᵢ`
    Spin(Axis),
    /// `Lᵢ`
    Orbital(Axis),
    /// `Jᵢ`
    AngularMomentum(Axis),
    /// `Kᵢ`
    Boost(Axis),
    /// `Xⁱ`, the dipole coordinate
    Position(Axis),
    /// `Vⁱ`
    Velocity(Axis),
    /// `Xⁱ_MC`
    MassCenter(Axis),
    /// `Vⁱ_MC`
    MassCenterVelocity(Axis),
}

impl Observable {
    /// Sign relating the antiparticle expectation value to the integral of
    /// the restricted operator. Charge, `W₀`, `X` and `V` flip; the
    /// kinetic and rotational quantities, the polarization and the
    /// mass-center coordinates do not.
    pub fn species_sign(self, species: Species) -> f64 {
        use Observable::*;
        match (species, self) {
            (Species::Particle, _) => 1.0,
            (Species::Antiparticle, Charge | Helicity | Position(_) | Velocity(_)) => -1.0,
            (Species::Antiparticle, _) => 1.0,
        }
    }

    pub fn needs_derivative(self) -> bool {
        use Observable::*;
        matches!(self, Orbital(_) | AngularMomentum(_) | Boost(_) | Position(_) | MassCenter(_))
    }

    fn needs_sigma(self) -> bool {
        use Observable::*;
        matches!(self, Polarization | Helicity | Spin(_) | AngularMomentum(_) | Boost(_))
    }

    /// Expands a name such as `X` into its three components; scalar names
    /// and indexed names such as `X2` give one observable.
    pub fn expand(name: &str) -> Result<Vec<Observable>> {
        if let Ok(o) = name.parse() {
            return Ok(vec![o]);
        }
        Axis::ALL
            .iter()
            .map(|a| format!("{name}{}", a.index() + 1).parse())
            .collect()
    }
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Observable::*;
        let (head, axis) = match self {
            Norm => ("N", None),
            Charge => ("Q", None),
            Energy => ("H", None),
            Polarization => ("W", None),
            Helicity => ("W0", None),
            Momentum(a) => ("P", Some(a)),
            Spin(a) => ("S", Some(a)),
            Orbital(a) => ("L", Some(a)),
            AngularMomentum(a) => ("J", Some(a)),
            Boost(a) => ("K", Some(a)),
            Position(a) => ("X", Some(a)),
            Velocity(a) => ("V", Some(a)),
            MassCenter(a) => ("XMC", Some(a)),
            MassCenterVelocity(a) => ("VMC", Some(a)),
        };
        match axis {
            Some(a) => write!(f, "{head}{}", a.index() + 1),
            None => f.write_str(head),
        }
    }
}

impl FromStr for Observable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        use Observable::*;
        let unknown = || Error::InvalidArgument(format!("unknown observable {s:?}"));
        let upper = s.to_ascii_uppercase();
        match upper.as_str() {
            "N" | "NORM" => return Ok(Norm),
            "Q" => return Ok(Charge),
            "H" => return Ok(Energy),
            "W" => return Ok(Polarization),
            "W0" => return Ok(Helicity),
            _ => {}
        }
        let split = upper.len().checked_sub(1).ok_or_else(unknown)?;
        let (head, index) = upper.split_at(split);
        let axis = match index {
            "1" => Axis::X,
            "2" => Axis::Y,
            "3" => Axis::Z,
            _ => return Err(unknown()),
        };
        Ok(match head {
            "P" => Momentum(axis),
            "S" => Spin(axis),
            "L" => Orbital(axis),
            "J" => AngularMomentum(axis),
            "K" => Boost(axis),
            "X" => Position(axis),
            "V" => Velocity(axis),
            "XMC" => MassCenter(axis),
            "VMC" => MassCenterVelocity(axis),
            _ => return Err(unknown()),
        })
    }
}

/// Expectation value with the quadrature error estimate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpectationReport {
    pub observable: String,
    pub value: f64,
    pub imaginary: f64,
    pub time: f64,
    pub error_estimate: f64,
}

/// Integrands of `obs` at one grid point, before the species sign.
fn integrands(w: &WavePacket, t: f64, obs: &[Observable], p: &Vec3, out: &mut [Complex64]) -> Result<()> {
    let q = OnShellMomentum::new(w.mass, *p)?;
    let e = q.energy();
    let a = w.evolved(p, t)?;
    let density = a.norm_sqr();
    if density == 0.0 && obs.iter().all(|o| !o.needs_derivative()) {
        out.iter_mut().for_each(|v| *v = ZERO);
        return Ok(());
    }
    let cov = if obs.iter().any(|o| o.needs_derivative()) {
        let f = |k: &Vec3| w.evolved(k, t);
        let scale = w.scale_at(t);
        let mut d = [Spinor2::zeros(); 3];
        for axis in Axis::ALL {
            d[axis.index()] = covariant_derivative(f, &w.basis, axis, p, scale)?;
        }
        Some(d)
    } else {
        None
    };
    let sigma = if obs.iter().any(|o| o.needs_sigma()) {
        Some(sigma_matrices(&w.basis, p)?.sigma)
    } else {
        None
    };
    let sandwich = |m: ComplexMatrix2| a.dot(&(m * a));
    let orbital = |i: usize, cov: &[Spinor2; 3]| {
        let mut s = Spinor2::zeros();
        for j in 0..3 {
            for k in 0..3 {
                let eps = levi_civita(i, j, k);
                if eps != 0.0 {
                    s = s + cov[k] * c(0.0, -eps * p[j]);
                }
            }
        }
        a.dot(&s)
    };
    let density = c(density, 0.0);
    for (slot, o) in out.iter_mut().zip(obs) {
        use Observable::*;
        let cov = || cov.as_ref().expect("derivatives computed");
        let sig = || sigma.as_ref().expect("sigma computed");
        *slot = match *o {
            Norm | Charge => density,
            Energy => density * e,
            Momentum(i) => density * p[i.index()],
            Velocity(i) | MassCenterVelocity(i) => density * (p[i.index()] / e),
            Polarization => {
                let n = w.basis.direction(p)?;
                sandwich((0..3).map(|i| sig()[i] * (0.5 * n[i])).sum())
            }
            Helicity => sandwich((0..3).map(|i| sig()[i] * (0.5 * p[i])).sum()),
            Spin(i) => sandwich(sig()[i.index()] * 0.5),
            Orbital(i) => orbital(i.index(), cov()),
            AngularMomentum(i) => orbital(i.index(), cov()) + sandwich(sig()[i.index()] * 0.5),
            Boost(i) => {
                let k = boost_matrix_part_from(&q, sig());
                let weyl = density * c(0.0, 0.5 * p[i.index()] / e);
                a.dot(&(cov()[i.index()] * c(0.0, e))) + weyl + sandwich(k[i.index()])
            }
            Position(i) | MassCenter(i) => a.dot(&(cov()[i.index()] * I)),
        };
    }
    Ok(())
}

fn integrate(w: &WavePacket, t: f64, obs: &[Observable], grid: &CubeGrid) -> Result<Vec<Complex64>> {
    let mut total = vec![ZERO; obs.len()];
    let mut point = vec![ZERO; obs.len()];
    for (p, weight) in grid.nodes() {
        integrands(w, t, obs, &p, &mut point)?;
        for (acc, v) in total.iter_mut().zip(&point) {
            *acc += v * weight;
        }
    }
    Ok(total)
}

/// Expectation values of several observables at time `t` in one pass over
/// the grid.
pub fn expectations(obs: &[Observable], w: &WavePacket, t: f64) -> Result<Vec<ExpectationReport>> {
    if !t.is_finite() {
        return Err(Error::NonFinite("time"));
    }
    let fine = integrate(w, t, obs, &w.grid.cube(w.grid.points))?;
    let coarse = integrate(w, t, obs, &w.grid.cube(w.grid.check_points))?;
    obs.iter()
        .zip(fine.iter().zip(&coarse))
        .map(|(o, (v, check))| {
            let sign = o.species_sign(w.species);
            let estimate = (v - check).norm();
            let bound = w.tolerance * v.norm().max(1.0);
            if !(estimate <= bound) {
                return Err(Error::QuadratureNonConvergence { observable: o.to_string(), estimate, bound });
            }
            Ok(ExpectationReport {
                observable: o.to_string(),
                value: sign * v.re,
                imaginary: sign * v.im,
                time: t,
                error_estimate: estimate,
            })
        })
        .collect()
}

pub fn expectation(o: Observable, w: &WavePacket, t: f64) -> Result<ExpectationReport> {
    Ok(expectations(&[o], w, t)?.remove(0))
}

/// One time slice of a linear law `x(t) = x(0) + v t`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRow {
    pub t: f64,
    pub position: Vec3,
    pub velocity: Vec3,
    /// `|x(t) − x(0) − v(0)t| / max(|x(t)|, floor)`
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub position: String,
    pub velocity: String,
    pub rows: Vec<TrajectoryRow>,
    pub max_residual: f64,
    /// `max |xᵢ(t) − xᵢ(0) − vᵢ(0)t|`
    pub max_deviation: f64,
    /// `max |vᵢ(t) − vᵢ(0)|`
    pub max_velocity_drift: f64,
}

fn linear_law(
    w: &WavePacket,
    times: &[f64],
    position: fn(Axis) -> Observable,
    velocity: fn(Axis) -> Observable,
    floor: f64,
) -> Result<Trajectory> {
    if times.is_empty() {
        return Err(Error::InvalidArgument("no times given".into()));
    }
    let obs: Vec<Observable> = Axis::ALL.map(position).into_iter().chain(Axis::ALL.map(velocity)).collect();
    let mut rows: Vec<TrajectoryRow> = Vec::with_capacity(times.len());
    let start = expectations(&obs, w, 0.0)?;
    let x0: Vec3 = std::array::from_fn(|i| start[i].value);
    let v0: Vec3 = std::array::from_fn(|i| start[3 + i].value);
    let (mut max_residual, mut max_deviation, mut max_drift) = (0.0f64, 0.0f64, 0.0f64);
    for &t in times {
        let r = if t == 0.0 { start.clone() } else { expectations(&obs, w, t)? };
        let x: Vec3 = std::array::from_fn(|i| r[i].value);
        let v: Vec3 = std::array::from_fn(|i| r[3 + i].value);
        let dev: Vec3 = std::array::from_fn(|i| x[i] - x0[i] - v0[i] * t);
        let residual = norm3(&dev) / norm3(&x).max(floor);
        max_residual = max_residual.max(residual);
        max_deviation = dev.iter().fold(max_deviation, |m, d| m.max(d.abs()));
        max_drift = (0..3).fold(max_drift, |m, i| m.max((v[i] - v0[i]).abs()));
        rows.push(TrajectoryRow { t, position: x, velocity: v, residual });
    }
    let name = |f: fn(Axis) -> Observable| f(Axis::X).to_string().trim_end_matches('1').to_string();
    Ok(Trajectory {
        position: name(position),
        velocity: name(velocity),
        rows,
        max_residual,
        max_deviation,
        max_velocity_drift: max_drift,
    })
}

/// `⟨X⟩(t)` and `⟨V⟩(t)` against the law `X(t) = X + Vt`.
pub fn dipole_trajectory(w: &WavePacket, times: &[f64]) -> Result<Trajectory> {
    linear_law(w, times, Observable::Position, Observable::Velocity, 1.0 / w.mass)
}

/// `⟨X_MC⟩(t)` and `⟨V_MC⟩(t)` against `X_MC(t) = X_MC + V_MC t`.
pub fn mass_center_trajectory(w: &WavePacket, times: &[f64]) -> Result<Trajectory> {
    linear_law(w, times, Observable::MassCenter, Observable::MassCenterVelocity, 1.0 / w.mass)
}

/// `⟨K⟩(t)` and `⟨P⟩` against `K(t) = K + Pt`.
pub fn boost_trajectory(w: &WavePacket, times: &[f64]) -> Result<Trajectory> {
    linear_law(w, times, Observable::Boost, Observable::Momentum, 1.0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConservationReport {
    pub times: Vec<f64>,
    pub spin: Vec<Vec3>,
    pub orbital: Vec<Vec3>,
    pub total: Vec<Vec3>,
    pub max_spin_deviation: f64,
    pub max_orbital_deviation: f64,
    /// `max |⟨J⟩ − ⟨L⟩ − ⟨S⟩|`, with `J` applied as one operator.
    pub max_additivity_defect: f64,
}

/// `⟨S⟩(t)`, `⟨L⟩(t)` and `⟨J⟩(t)`; the first two are separately conserved.
pub fn spin_conservation_check(w: &WavePacket, times: &[f64]) -> Result<ConservationReport> {
    if times.is_empty() {
        return Err(Error::InvalidArgument("no times given".into()));
    }
    let obs: Vec<Observable> = Axis::ALL.map(Observable::Spin).into_iter().chain(Axis::ALL.map(Observable::Orbital)).collect();
    let mut report = ConservationReport {
        times: times.to_vec(),
        spin: vec![],
        orbital: vec![],
        total: vec![],
        max_spin_deviation: 0.0,
        max_orbital_deviation: 0.0,
        max_additivity_defect: 0.0,
    };
    for &t in times {
        let r = expectations(&obs, w, t)?;
        let s: Vec3 = std::array::from_fn(|i| r[i].value);
        let l: Vec3 = std::array::from_fn(|i| r[3 + i].value);
        let j = total_angular_momentum(w, t)?;
        for i in 0..3 {
            report.max_additivity_defect = report.max_additivity_defect.max((j[i] - l[i] - s[i]).abs());
            report.max_spin_deviation = report.max_spin_deviation.max((s[i] - report.spin.first().unwrap_or(&s)[i]).abs());
            report.max_orbital_deviation =
                report.max_orbital_deviation.max((l[i] - report.orbital.first().unwrap_or(&l)[i]).abs());
        }
        report.spin.push(s);
        report.orbital.push(l);
        report.total.push(j);
    }
    Ok(report)
}

/// `⟨J⟩(t)` with `J̃ᵢ` applied through its closure, independently of the
/// `L + S` split.
fn total_angular_momentum(w: &WavePacket, t: f64) -> Result<Vec3> {
    let ops = Axis::ALL.map(|a| {
        crate::connection::differential_operator(
            DifferentialGenerator::AngularMomentum(a),
            &w.basis,
            w.mass,
            w.scale_at(t),
        )
    });
    let f = |k: &Vec3| w.evolved(k, t);
    let mut total = [ZERO; 3];
    for (p, weight) in w.grid.cube(w.grid.points).nodes() {
        let a = f(&p)?;
        for i in 0..3 {
            total[i] += a.dot(&(ops[i])(&f, &p)?) * weight;
        }
    }
    Ok(total.map(|v| v.re))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bases::{helicity_basis, spin_basis};

    fn packet(species: Species) -> WavePacket {
        gaussian_packet(1.0, [0.3, -0.2, 1.0], 0.15, Polarization::Up, helicity_basis(), species).unwrap()
    }

    #[test]
    fn observable_names_round_trip() {
        for name in ["N", "Q", "H", "W", "W0", "P1", "S2", "L3", "J1", "K2", "X3", "V1", "XMC2", "VMC3"] {
            let o: Observable = name.parse().unwrap();
            assert_eq!(o.to_string(), name);
        }
        assert_eq!(Observable::expand("X").unwrap().len(), 3);
        assert_eq!(Observable::expand("w0").unwrap(), vec![Observable::Helicity]);
        assert!("Z1".parse::<Observable>().is_err());
        assert!("".parse::<Observable>().is_err());
    }

    #[test]
    fn sign_table() {
        use Observable::*;
        let anti = Species::Antiparticle;
        for o in [Charge, Helicity, Position(Axis::X), Velocity(Axis::Z)] {
            assert_eq!(o.species_sign(anti), -1.0);
            assert_eq!(o.species_sign(Species::Particle), 1.0);
        }
        for o in [Norm, Energy, Momentum(Axis::Y), Polarization, Spin(Axis::X), Orbital(Axis::X), Boost(Axis::Y)] {
            assert_eq!(o.species_sign(anti), 1.0);
        }
        assert_eq!(MassCenter(Axis::X).species_sign(anti), 1.0);
        assert_eq!(MassCenterVelocity(Axis::X).species_sign(anti), 1.0);
    }

    #[test]
    fn gaussian_moments() {
        let w = packet(Species::Particle);
        let obs = [Observable::Norm, Observable::Energy, Observable::Momentum(Axis::X), Observable::Momentum(Axis::Z)];
        let r = expectations(&obs, &w, 0.0).unwrap();
        assert!((r[0].value - 1.0).abs() < 1e-6);
        assert!(r[1].value >= 1.0);
        assert!((r[2].value - 0.3).abs() < 1e-6);
        assert!((r[3].value - 1.0).abs() < 1e-6);
        assert!(r.iter().all(|x| x.imaginary.abs() < 1e-10));
    }

    #[test]
    fn charge_and_polarization_signs() {
        let obs = [Observable::Charge, Observable::Polarization, Observable::Helicity];
        let part = expectations(&obs, &packet(Species::Particle), 0.0).unwrap();
        let anti = expectations(&obs, &packet(Species::Antiparticle), 0.0).unwrap();
        assert!((part[0].value - 1.0).abs() < 1e-6 && (anti[0].value + 1.0).abs() < 1e-6);
        assert!((part[1].value - 0.5).abs() < 1e-6 && (anti[1].value - 0.5).abs() < 1e-6);
        assert!(part[2].value > 0.0);
        assert!((part[2].value + anti[2].value).abs() < 1e-12);
    }

    #[test]
    fn rest_centered_spin_packet() {
        let w = gaussian_packet(1.0, [0.0; 3], 0.05, Polarization::Up, spin_basis(), Species::Particle).unwrap();
        let s3 = expectation(Observable::Spin(Axis::Z), &w, 0.0).unwrap();
        assert!((s3.value - 0.5).abs() < 1e-9);
    }

    #[test]
    fn chart_conflicts_are_rejected() {
        let err = gaussian_packet(1.0, [0.0, 0.0, 0.5], 0.2, Polarization::Up, helicity_basis(), Species::Particle);
        assert!(err.unwrap_err().is_chart_error());
        assert!(gaussian_packet(1.0, [0.0; 3], 0.0, Polarization::Up, spin_basis(), Species::Particle).is_err());
    }

    #[test]
    fn coarse_grid_reports_non_convergence() {
        let w = packet(Species::Particle);
        let grid = GridSpec { points: 4, check_points: 3, ..*w.grid() };
        let w = w.with_grid(grid).unwrap().with_tolerance(1e-9);
        match expectation(Observable::Norm, &w, 0.0) {
            Err(Error::QuadratureNonConvergence { observable, .. }) => assert_eq!(observable, "N"),
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }

    #[test]
    fn norm_is_conserved_in_time() {
        let w = packet(Species::Antiparticle);
        for t in [0.0, 3.0, 10.0] {
            assert!((expectation(Observable::Norm, &w, t).unwrap().value - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn rotation_preserves_norm() {
        let w = gaussian_packet(1.0, [0.3, -0.2, 2.0], 0.15, Polarization::Up, helicity_basis(), Species::Particle)
            .unwrap();
        let r = Sl2c::rotation(&[0.1, 0.2, 0.05]);
        let moved = w.transformed(&r, &FourVector::new(0.5, [0.1, -0.3, 0.2])).unwrap();
        let n = expectation(Observable::Norm, &moved, 0.0).unwrap();
        assert!((n.value - 1.0).abs() < 1e-6, "{n:?}");
    }
}
