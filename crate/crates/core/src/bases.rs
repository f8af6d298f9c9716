//! Polarization bases: momentum-dependent orthonormal pairs of Pauli spinors
//! `(ξ_{+½}(p), ξ_{−½}(p))`, optionally with a polarization direction `n(p)`
//! such that `(σ·n/2)ξ_σ = σξ_σ`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::algebra::{pauli, pauli_dot, Axis};
use crate::error::{Error, Result};
use crate::linalg::{norm3, ComplexMatrix2, Spinor2, Vec3, I, ONE, ZERO};

/// Tolerance used when validating user-supplied bases.
pub const BASIS_TOLERANCE: f64 = 1e-12;

/// Half-angle (radians) of the polar cap around `−e₃` avoided by samplers.
pub const SAMPLER_CAP_HALF_ANGLE: f64 = 1e-2;

/// Polarization label `σ = ±½`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Polarization {
    #[serde(rename = "+")]
    Up,
    #[serde(rename = "-")]
    Down,
}

impl Polarization {
    pub const ALL: [Polarization; 2] = [Polarization::Up, Polarization::Down];

    pub fn value(self) -> f64 {
        match self {
            Polarization::Up => 0.5,
            Polarization::Down => -0.5,
        }
    }

    /// Position in a [`SpinorPair`].
    pub fn index(self) -> usize {
        match self {
            Polarization::Up => 0,
            Polarization::Down => 1,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Polarization::Up => Polarization::Down,
            Polarization::Down => Polarization::Up,
        }
    }
}

impl fmt::Display for Polarization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Polarization::Up => "+1/2",
            Polarization::Down => "-1/2",
        })
    }
}

/// `[ξ_{+½}, ξ_{−½}]`
pub type SpinorPair = [Spinor2; 2];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisKind {
    Spin,
    Helicity,
    Custom,
}

/// Chart limits of the helicity basis: `|p| > eps_p` and `|p| + p³ > eps_chart·|p|`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChartConfig {
    pub eps_p: f64,
    pub eps_chart: f64,
}

impl Default for ChartConfig {
    fn default() -> Self {
        ChartConfig { eps_p: 1e-10, eps_chart: 1e-6 }
    }
}

impl ChartConfig {
    /// Chart with `eps_p` scaled by the mass.
    pub fn for_mass(mass: f64) -> Self {
        ChartConfig { eps_p: 1e-10 * mass, ..Default::default() }
    }

    pub fn check(&self, p: &Vec3) -> Result<()> {
        let mag = norm3(p);
        if mag <= self.eps_p {
            return Err(Error::ZeroMomentum { p: *p });
        }
        if north_sum(p) <= self.eps_chart * mag {
            return Err(Error::ChartSingularity { p: *p });
        }
        Ok(())
    }

    /// Checks that the closed box `center ± half_width` (per axis) stays clear
    /// of the excluded region around the `−e₃` ray and the origin.
    pub fn check_box(&self, center: &Vec3, half_width: f64) -> Result<()> {
        let nearest = |c: f64| {
            if c.abs() <= half_width {
                0.0
            } else {
                c.abs() - half_width
            }
        };
        let rho = nearest(center[0]).hypot(nearest(center[1]));
        let reach = half_width - center[2];
        // enlarged cone around the ray: half-angle 2·sqrt(eps_chart)
        let tan = 2.0 * self.eps_chart.sqrt();
        let touches_ray = reach >= 0.0 && rho <= tan * reach + self.eps_p;
        if touches_ray {
            let mut p = *center;
            p[2] = (center[2] - half_width).min(0.0);
            return Err(Error::ChartSingularity { p });
        }
        Ok(())
    }
}

type Provider = Arc<dyn Fn(&Vec3) -> Result<SpinorPair> + Send + Sync>;
type DirectionFn = Arc<dyn Fn(&Vec3) -> Result<Vec3> + Send + Sync>;
type ScaleFn = Arc<dyn Fn(&Vec3) -> f64 + Send + Sync>;

/// Map from momentum to an orthonormal pair of Pauli spinors.
#[derive(Clone)]
pub struct PolarizationBasis {
    kind: BasisKind,
    common: bool,
    xi: Provider,
    direction: Option<DirectionFn>,
    scale: ScaleFn,
    chart: Option<ChartConfig>,
}

impl fmt::Debug for PolarizationBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PolarizationBasis")
            .field("kind", &self.kind)
            .field("common", &self.common)
            .field("has_direction", &self.direction.is_some())
            .field("chart", &self.chart)
            .finish()
    }
}

impl PolarizationBasis {
    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    /// True when the spinors do not depend on the momentum.
    pub fn is_common(&self) -> bool {
        self.common
    }

    pub fn chart(&self) -> Option<&ChartConfig> {
        self.chart.as_ref()
    }

    /// `(ξ_{+½}(p), ξ_{−½}(p))`
    pub fn spinors(&self, p: &Vec3) -> Result<SpinorPair> {
        if let Some(chart) = &self.chart {
            chart.check(p)?;
        }
        (self.xi)(p)
    }

    pub fn spinor(&self, p: &Vec3, sigma: Polarization) -> Result<Spinor2> {
        Ok(self.spinors(p)?[sigma.index()])
    }

    /// Matrix whose columns are `ξ_{+½}(p)`, `ξ_{−½}(p)`.
    pub fn matrix(&self, p: &Vec3) -> Result<ComplexMatrix2> {
        let [a, b] = self.spinors(p)?;
        Ok(ComplexMatrix2::new(a[0], b[0], a[1], b[1]))
    }

    pub fn has_direction(&self) -> bool {
        self.direction.is_some()
    }

    /// Unit polarization direction `n(p)`.
    pub fn direction(&self, p: &Vec3) -> Result<Vec3> {
        let dir = self.direction.as_ref().ok_or(Error::MissingDirection)?;
        if let Some(chart) = &self.chart {
            chart.check(p)?;
        }
        dir(p)
    }

    /// Distance over which the basis varies appreciably near `p`; used to
    /// size finite-difference steps. Infinite for common bases.
    pub fn length_scale(&self, p: &Vec3) -> f64 {
        (self.scale)(p)
    }

    /// Checks the chart, orthonormality and, when a direction is present,
    /// the eigenvector property at `p`.
    pub fn validate_at(&self, p: &Vec3, tolerance: f64) -> Result<()> {
        let pair = self.spinors(p)?;
        let defect = orthonormality_defect(&pair);
        if !(defect <= tolerance) {
            return Err(Error::NonOrthonormal { p: *p, defect });
        }
        if self.direction.is_some() {
            let n = self.direction(p)?;
            let sn = pauli_dot(&n) * 0.5;
            let defect = Polarization::ALL
                .iter()
                .map(|&s| (sn * pair[s.index()] - pair[s.index()] * s.value()).max_abs())
                .fold(0.0, f64::max);
            if !(defect <= tolerance) {
                return Err(Error::NotPolarizationEigenbasis { p: *p, defect });
            }
        }
        Ok(())
    }

    /// The basis `ξ'_σ(p) = r̂ ξ_σ(p)` for a fixed `r̂ ∈ SU(2)`; the direction
    /// rotates to `R n(p)`.
    pub fn rotated(&self, r: ComplexMatrix2) -> PolarizationBasis {
        let xi = self.xi.clone();
        let rot = rotation_matrix(&r);
        let direction = self.direction.clone().map(|d| -> DirectionFn {
            Arc::new(move |p: &Vec3| {
                let n = d(p)?;
                Ok(std::array::from_fn(|i| (0..3).map(|j| rot[i][j] * n[j]).sum()))
            })
        });
        PolarizationBasis {
            kind: BasisKind::Custom,
            common: self.common,
            xi: Arc::new(move |p| {
                let [a, b] = xi(p)?;
                Ok([r * a, r * b])
            }),
            direction,
            scale: self.scale.clone(),
            chart: self.chart,
        }
    }
}

/// `max |ξ_σ†ξ_σ' − δ_σσ'|`
pub fn orthonormality_defect(pair: &SpinorPair) -> f64 {
    let mut worst: f64 = 0.0;
    for (a, xa) in pair.iter().enumerate() {
        for (b, xb) in pair.iter().enumerate() {
            let target = if a == b { ONE } else { ZERO };
            worst = worst.max((xa.dot(xb) - target).norm());
        }
    }
    worst
}

/// `max |Σ_σ ξ_σξ_σ† − I|`
pub fn completeness_defect(pair: &SpinorPair) -> f64 {
    let sum = pair[0].outer(&pair[0]) + pair[1].outer(&pair[1]);
    sum.max_abs_diff(&ComplexMatrix2::identity())
}

/// SO(3) matrix of the rotation `r̂ ∈ SU(2)`, from `r̂σⱼr̂† = R_{ij}σᵢ`.
fn rotation_matrix(r: &ComplexMatrix2) -> [[f64; 3]; 3] {
    let mut out = [[0.0; 3]; 3];
    for j in Axis::ALL {
        let conj = *r * pauli(j) * r.dagger();
        for i in Axis::ALL {
            out[i.index()][j.index()] = 0.5 * (pauli(i) * conj).trace().re;
        }
    }
    out
}

/// `|p| + p³`, computed without cancellation for `p³ < 0`.
pub(crate) fn north_sum(p: &Vec3) -> f64 {
    let mag = norm3(p);
    if p[2] >= 0.0 {
        mag + p[2]
    } else {
        (p[0] * p[0] + p[1] * p[1]) / (mag - p[2])
    }
}

fn distance_to_south_ray(p: &Vec3) -> f64 {
    if p[2] <= 0.0 {
        p[0].hypot(p[1])
    } else {
        norm3(p)
    }
}

/// Common momentum-spin basis `ξ_{+½} = (1,0)`, `ξ_{−½} = (0,1)`, `n = e₃`.
pub fn spin_basis() -> PolarizationBasis {
    PolarizationBasis {
        kind: BasisKind::Spin,
        common: true,
        xi: Arc::new(|_| Ok([Spinor2::basis(0), Spinor2::basis(1)])),
        direction: Some(Arc::new(|_| Ok([0.0, 0.0, 1.0]))),
        scale: Arc::new(|_| f64::INFINITY),
        chart: None,
    }
}

/// `r̂_h(p) = sqrt((p+p³)/2p)[1 − i(p¹σ₂ − p²σ₁)/(p+p³)]`, rotating `e₃` onto
/// `p/|p|`.
pub fn helicity_rotation(p: &Vec3) -> Result<ComplexMatrix2> {
    helicity_rotation_in(p, &ChartConfig::default())
}

pub fn helicity_rotation_in(p: &Vec3, chart: &ChartConfig) -> Result<ComplexMatrix2> {
    chart.check(p)?;
    let mag = norm3(p);
    let plus = north_sum(p);
    let pre = (plus / (2.0 * mag)).sqrt();
    let gen = pauli(Axis::Y) * p[0] - pauli(Axis::X) * p[1];
    Ok((ComplexMatrix2::identity() - gen * (I * (1.0 / plus))) * pre)
}

/// Momentum-helicity basis `ξ_σ(p) = r̂_h(p)ξ_σ` with `n(p) = p/|p|`.
pub fn helicity_basis() -> PolarizationBasis {
    helicity_basis_with(ChartConfig::default())
}

pub fn helicity_basis_with(chart: ChartConfig) -> PolarizationBasis {
    PolarizationBasis {
        kind: BasisKind::Helicity,
        common: false,
        xi: Arc::new(move |p| {
            let r = helicity_rotation_in(p, &chart)?;
            Ok([
                Spinor2::new(r[(0, 0)], r[(1, 0)]),
                Spinor2::new(r[(0, 1)], r[(1, 1)]),
            ])
        }),
        direction: Some(Arc::new(|p| {
            let mag = norm3(p);
            Ok([p[0] / mag, p[1] / mag, p[2] / mag])
        })),
        scale: Arc::new(|p| distance_to_south_ray(p).min(norm3(p))),
        chart: Some(chart),
    }
}

/// Quantization direction `n(p)` of a custom basis.
pub type DirectionProvider = Box<dyn Fn(&Vec3) -> Result<Vec3> + Send + Sync>;

/// User-supplied basis, validated at each probe momentum.
///
/// `length_scale` defaults to `max(|p|, 1)` when not given.
pub fn custom_basis<F>(
    provider: F,
    direction: Option<DirectionProvider>,
    probes: &[Vec3],
) -> Result<PolarizationBasis>
where
    F: Fn(&Vec3) -> Result<SpinorPair> + Send + Sync + 'static,
{
    let basis = PolarizationBasis {
        kind: BasisKind::Custom,
        common: false,
        xi: Arc::new(provider),
        direction: direction.map(|d| -> DirectionFn { Arc::from(d) }),
        scale: Arc::new(|p| norm3(p).max(1.0)),
        chart: None,
    };
    for p in probes {
        basis.validate_at(p, BASIS_TOLERANCE)?;
    }
    Ok(basis)
}

impl PolarizationBasis {
    /// Overrides the finite-difference length scale.
    pub fn with_length_scale<F>(mut self, scale: F) -> Self
    where
        F: Fn(&Vec3) -> f64 + Send + Sync + 'static,
    {
        self.scale = Arc::new(scale);
        self
    }

    /// Adds chart limits checked before every evaluation.
    pub fn with_chart(mut self, chart: ChartConfig) -> Self {
        self.chart = Some(chart);
        self
    }
}

/// `η_σ(p) = iσ₂ ξ_σ(p)*`
pub fn conjugate_spinor(xi: &Spinor2) -> Spinor2 {
    let x = xi.conj();
    Spinor2::new(x[1], -x[0])
}

/// Charge-conjugate partner `η_σ = iσ₂ξ_σ*` of a polarization basis.
#[derive(Clone, Debug)]
pub struct ConjugateBasis {
    base: PolarizationBasis,
}

impl ConjugateBasis {
    pub fn base(&self) -> &PolarizationBasis {
        &self.base
    }

    pub fn spinors(&self, p: &Vec3) -> Result<SpinorPair> {
        let [a, b] = self.base.spinors(p)?;
        Ok([conjugate_spinor(&a), conjugate_spinor(&b)])
    }

    pub fn spinor(&self, p: &Vec3, sigma: Polarization) -> Result<Spinor2> {
        Ok(self.spinors(p)?[sigma.index()])
    }
}

pub fn conjugate_basis(b: &PolarizationBasis) -> ConjugateBasis {
    ConjugateBasis { base: b.clone() }
}

/// `iσ₂`
pub fn i_sigma2() -> ComplexMatrix2 {
    ComplexMatrix2::new(ZERO, ONE, -ONE, ZERO)
}
