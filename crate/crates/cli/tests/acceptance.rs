//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::process::{Command, ExitCode};
use std::time::Instant;

use pryce_core::algebra::{charge_conjugation, pauli, spin_rotation_generator, Axis, FourVector, Sl2c};
use pryce_core::bases::{helicity_basis, spin_basis, Polarization, PolarizationBasis};
use pryce_core::connection::{
    covariant_derivative, omega_matrices, omega_matrices_helicity, sigma_matrices, sigma_matrices_helicity,
    LorentzAction,
};
use pryce_core::kinematics::OnShellMomentum;
use pryce_core::linalg::{c, levi_civita, norm3, ComplexMatrix2, ComplexMatrix4, Spinor2, Vec3, ONE, ZERO};
use pryce_core::operators::{
    coordinate_correction, coordinate_correction_projector_form, hamiltonian, normalized_diff, pauli_lubanski_restricted,
    polarization, projectors, projectors_sandwich, pryce_spin_closed, pryce_spin_fw, pryce_spin_sandwich,
};
use pryce_core::quadrature::CubeGrid;
use pryce_core::spinors::momentum_spinors;
use pryce_core::verify::{sample_momentum, suite_names, CapExclusion, DEFAULT_RANGE};
use pryce_core::wavepacket::{
    boost_trajectory, dipole_trajectory, expectation, gaussian_packet, spin_conservation_check, Observable, Species,
    WavePacket,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, UnitSphere};
use serde_json::Value;

const ALGEBRAIC: f64 = 1e-12;
const SIGMA_CLOSED_FORM: f64 = 1e-13;
const FINITE_DIFFERENCE: f64 = 1e-6;
const QUADRATURE: f64 = 1e-3;

const SEED: u64 = 42;
const SAMPLES: usize = 200;
const WIGNER_PAIRS: usize = 100;
const CENTER: Vec3 = [0.4, -0.3, 1.2];
const WIDTH: f64 = 0.15;

type Outcome = Result<Checks, String>;
type Criterion = (&'static str, fn() -> Outcome);

/// Worst value of each named check against its tolerance.
#[derive(Default)]
struct Checks(Vec<(&'static str, f64, f64)>);

impl Checks {
    fn record(&mut self, name: &'static str, value: f64, tol: f64) {
        match self.0.iter_mut().find(|(n, _, _)| *n == name) {
            Some(entry) => entry.1 = if value.is_nan() { f64::NAN } else { entry.1.max(value) },
            None => self.0.push((name, value, tol)),
        }
    }

    fn pass(&self) -> bool {
        !self.0.is_empty() && self.0.iter().all(|&(_, v, tol)| v <= tol)
    }

    fn summary(&self) -> String {
        self.0.iter().map(|(n, v, tol)| format!("{n} {v:.2e}/{tol:.0e}")).collect::<Vec<_>>().join(", ")
    }
}

fn momenta(exclusion: CapExclusion) -> Vec<OnShellMomentum> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    (0..SAMPLES)
        .map(|_| OnShellMomentum::new(1.0, sample_momentum(&mut rng, 1.0, DEFAULT_RANGE, exclusion)).unwrap())
        .collect()
}

fn bases() -> [PolarizationBasis; 2] {
    [spin_basis(), helicity_basis()]
}

fn eps_sum(i: usize, j: usize, m: &[ComplexMatrix4; 3]) -> ComplexMatrix4 {
    (0..3).fold(ComplexMatrix4::zeros(), |acc, k| acc + m[k] * c(0.0, levi_civita(i, j, k)))
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn spin_triple_equivalence() -> Outcome {
    let qs = momenta(CapExclusion::None);
    let start = Instant::now();
    let mut out = Checks::default();
    for q in &qs {
        for a in Axis::ALL {
            let closed = pryce_spin_closed(q, a);
            out.record("sandwich", normalized_diff(&pryce_spin_sandwich(q, a), &closed, q), ALGEBRAIC);
            out.record("fw", normalized_diff(&pryce_spin_fw(q, a), &closed, q), ALGEBRAIC);
        }
    }
    out.record("runtime_s", start.elapsed().as_secs_f64(), 1.0);
    Ok(out)
}

fn algebra_and_conservation() -> Outcome {
    let mut out = Checks::default();
    let zero = ComplexMatrix4::zeros();
    for q in &momenta(CapExclusion::South) {
        let h = hamiltonian(q);
        let s = Axis::ALL.map(|a| pryce_spin_closed(q, a));
        for i in 0..3 {
            for j in 0..3 {
                out.record("[S,S]", normalized_diff(&s[i].commutator(&s[j]), &eps_sum(i, j, &s), q), ALGEBRAIC);
            }
            out.record("[S,H]", normalized_diff(&s[i].commutator(&h), &zero, q), ALGEBRAIC);
        }
        for b in bases() {
            let w = polarization(q, &b).map_err(err)?;
            out.record("[W,H]", normalized_diff(&w.commutator(&h), &zero, q), ALGEBRAIC);
            out.record("W^2", normalized_diff(&(w * w), &(ComplexMatrix4::identity() * 0.25), q), ALGEBRAIC);
        }
    }
    Ok(out)
}

fn projector_suite() -> Outcome {
    let mut out = Checks::default();
    let one = ComplexMatrix4::identity();
    for q in &momenta(CapExclusion::Both) {
        let (pp, pm) = projectors(q);
        let (sp, sm) = projectors_sandwich(q);
        out.record("idempotent", (pp * pp).max_abs_diff(&pp).max((pm * pm).max_abs_diff(&pm)), ALGEBRAIC);
        out.record("orthogonal", (pp * pm).max_abs().max((pm * pp).max_abs()), ALGEBRAIC);
        out.record("complete", (pp + pm).max_abs_diff(&one), ALGEBRAIC);
        out.record("sandwich", normalized_diff(&sp, &pp, q).max(normalized_diff(&sm, &pm, q)), ALGEBRAIC);
        for b in bases() {
            let here = momentum_spinors(&b, q).map_err(err)?;
            let opposite = momentum_spinors(&b, &q.neg()).map_err(err)?;
            for s in Polarization::ALL {
                out.record("Pi+u", (pp * here.u(s)).max_abs_diff(&here.u(s)), ALGEBRAIC);
                out.record("Pi-v(-p)", (pm * opposite.v(s)).max_abs_diff(&opposite.v(s)), ALGEBRAIC);
            }
        }
    }
    Ok(out)
}

fn coordinate_identity() -> Outcome {
    let mut out = Checks::default();
    for q in &momenta(CapExclusion::None) {
        let p = q.momentum();
        let dx = Axis::ALL.map(|a| coordinate_correction(q, a));
        for a in Axis::ALL {
            let i = a.index();
            let mut lhs = pryce_spin_closed(q, a) - spin_rotation_generator(a);
            for j in 0..3 {
                for k in 0..3 {
                    lhs += dx[j] * (levi_civita(i, j, k) * p[k]);
                }
            }
            out.record("identity", lhs.max_abs() / q.scale(), ALGEBRAIC);
            let fd = coordinate_correction_projector_form(q, a).map_err(err)?;
            out.record("fd", fd.max_abs_diff(&dx[i]) * q.scale(), FINITE_DIFFERENCE);
        }
    }
    Ok(out)
}

/// Gaussian spinor profile of width `w` around `center`.
fn profile(center: Vec3, w: f64) -> impl Fn(&Vec3) -> pryce_core::Result<Spinor2> + Copy {
    move |k: &Vec3| {
        let d: f64 = (0..3).map(|i| (k[i] - center[i]).powi(2)).sum();
        let g = (-d / (2.0 * w * w)).exp();
        Ok(Spinor2::new(c(g, 0.2 * g * (k[0] - center[0]) / w), c(0.4 * g, -g * (k[2] - center[2]) / w)))
    }
}

fn helicity_geometry() -> Outcome {
    let mut out = Checks::default();
    let b = helicity_basis();
    let offset = [0.6, -0.48, 0.64];
    for q in &momenta(CapExclusion::South) {
        let p = q.momentum();
        let general = sigma_matrices(&b, &p).map_err(err)?.sigma;
        let closed = sigma_matrices_helicity(&p).map_err(err)?.sigma;
        let omega_general = omega_matrices(&b, &p).map_err(err)?.omega;
        let omega = omega_matrices_helicity(&p).map_err(err)?.omega;
        let (mut p_sigma, mut p_omega) = (ComplexMatrix2::zeros(), ComplexMatrix2::zeros());
        for i in 0..3 {
            out.record("Sigma", general[i].max_abs_diff(&closed[i]), SIGMA_CLOSED_FORM);
            out.record("Omega", omega_general[i].max_abs_diff(&omega[i]), FINITE_DIFFERENCE);
            p_sigma += closed[i] * p[i];
            p_omega += omega[i] * p[i];
        }
        out.record("p.Sigma", p_sigma.max_abs_diff(&(pauli(Axis::Z) * q.magnitude())) / q.scale(), ALGEBRAIC);
        out.record("p.Omega", p_omega.max_abs(), ALGEBRAIC);

        let width = 0.5 * q.magnitude().max(0.2);
        let center = std::array::from_fn(|i| p[i] + 0.3 * width * offset[i]);
        let f = profile(center, width);
        let ell = width.min(b.length_scale(&p));
        for i in Axis::ALL {
            for j in Axis::ALL {
                let di = |k: &Vec3| covariant_derivative(f, &b, i, k, width);
                let dj = |k: &Vec3| covariant_derivative(f, &b, j, k, width);
                let dij = covariant_derivative(dj, &b, i, &p, width).map_err(err)?;
                let dji = covariant_derivative(di, &b, j, &p, width).map_err(err)?;
                out.record("[d,d]", (dij - dji).max_abs() * ell * ell, FINITE_DIFFERENCE);
            }
        }
    }
    Ok(out)
}

fn casimir() -> Outcome {
    let mut out = Checks::default();
    let target = ComplexMatrix2::identity() * 0.75;
    for q in &momenta(CapExclusion::South) {
        for b in bases() {
            let pl = pauli_lubanski_restricted(q, &b).map_err(err)?;
            out.record("C2", pl.casimir().max_abs_diff(&target) / q.scale().powi(2), ALGEBRAIC);
        }
    }
    Ok(out)
}

fn random_lorentz(rng: &mut ChaCha8Rng) -> Sl2c {
    let axis: [f64; 3] = UnitSphere.sample(rng);
    let angle = rng.random_range(0.0..PI);
    let dir: [f64; 3] = UnitSphere.sample(rng);
    let rapidity = rng.random_range(0.0..1.0);
    Sl2c::rotation(&axis.map(|x| x * angle)) * Sl2c::boost(&dir.map(|x| x * rapidity))
}

fn packet(pol: Polarization, species: Species) -> Result<WavePacket, String> {
    gaussian_packet(1.0, CENTER, WIDTH, pol, helicity_basis(), species).map_err(err)
}

fn wigner_unitarity() -> Outcome {
    let mut out = Checks::default();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 1);
    let b = helicity_basis();
    let qs = momenta(CapExclusion::South);
    let mut pairs = 0;
    for q in qs.iter().cycle().take(10 * WIGNER_PAIRS) {
        if pairs == WIGNER_PAIRS {
            break;
        }
        let action = LorentzAction::new(&random_lorentz(&mut rng)).map_err(err)?;
        let q_prime = action.preimage(q).map_err(err)?;
        if !CapExclusion::South.admits(&q_prime.momentum()) {
            continue;
        }
        for basis in [&b, &spin_basis()] {
            out.record("SU(2)", action.wigner(basis, q).map_err(err)?.su2_defect(), ALGEBRAIC);
        }
        pairs += 1;
    }
    out.record("missing_pairs", (WIGNER_PAIRS - pairs) as f64, 0.0);

    let w = packet(Polarization::Up, Species::Particle)?;
    let mut moved = 0;
    while moved < 4 {
        let shift: [f64; 3] = UnitSphere.sample(&mut rng);
        let a = FourVector::new(rng.random_range(-1.0..1.0), shift);
        match w.transformed(&random_lorentz(&mut rng), &a) {
            Ok(t) => {
                let n = expectation(Observable::Norm, &t, 0.0).map_err(err)?;
                out.record("packet_norm", (n.value - 1.0).abs(), QUADRATURE);
                moved += 1;
            }
            Err(e) if e.is_chart_error() => continue,
            Err(e) => return Err(e.to_string()),
        }
    }
    Ok(out)
}

fn kinematic_laws() -> Outcome {
    let mut out = Checks::default();
    let w = packet(Polarization::Up, Species::Particle)?;
    let times: Vec<f64> = (0..5).map(|k| 2.5 * k as f64).collect();
    out.record("dipole", dipole_trajectory(&w, &times).map_err(err)?.max_residual, QUADRATURE);
    let cons = spin_conservation_check(&w, &times).map_err(err)?;
    out.record("S(t)", cons.max_spin_deviation, FINITE_DIFFERENCE);
    out.record("L(t)", cons.max_orbital_deviation, FINITE_DIFFERENCE);
    out.record("K-Pt", boost_trajectory(&w, &times).map_err(err)?.max_deviation, QUADRATURE);
    Ok(out)
}

/// `⟨|p|⟩` of `w` on its own grid.
fn mean_magnitude(w: &WavePacket) -> Result<f64, String> {
    let g = w.grid();
    let cube = CubeGrid { center: g.center, half_width: g.half_width, points: g.points };
    let mut total = 0.0;
    for (p, weight) in cube.nodes() {
        total += w.amplitude(&p).map_err(err)?.norm_sqr() * norm3(&p) * weight;
    }
    Ok(total)
}

fn antiparticle_signs() -> Outcome {
    let mut out = Checks::default();
    let bound = |value: f64, target: f64| (value - target).abs() / target.abs().max(1.0);
    for pol in Polarization::ALL {
        let w = packet(pol, Species::Antiparticle)?;
        let sigma = pol.value();
        let mag = mean_magnitude(&w)?;
        for t in [0.0, 10.0] {
            let value = |o| expectation(o, &w, t).map(|r| r.value).map_err(err);
            out.record("Q", bound(value(Observable::Charge)?, -1.0), QUADRATURE);
            out.record("W", bound(value(Observable::Polarization)?, sigma), QUADRATURE);
            out.record("W0", bound(value(Observable::Helicity)?, -sigma * mag), QUADRATURE);
        }
    }
    Ok(out)
}

fn spinor_suite() -> Outcome {
    let mut out = Checks::default();
    let cc = charge_conjugation();
    for q in &momenta(CapExclusion::Both) {
        let (pp, pm) = projectors(q);
        for b in bases() {
            let ms = momentum_spinors(&b, q).map_err(err)?;
            let opposite = momentum_spinors(&b, &q.neg()).map_err(err)?;
            let (mut up, mut down) = (ComplexMatrix4::zeros(), ComplexMatrix4::zeros());
            for s in Polarization::ALL {
                let residual = ms.u[s.index()].dirac_residual().max(ms.v[s.index()].dirac_residual());
                out.record("dirac", residual, ALGEBRAIC);
                out.record("v=Cu*", (cc * ms.u(s).conj()).max_abs_diff(&ms.v(s)), ALGEBRAIC);
                for r in Polarization::ALL {
                    let d = if r == s { ONE } else { ZERO };
                    out.record("u'u", (ms.u(s).dot(&ms.u(r)) - d).norm(), ALGEBRAIC);
                }
                up += ms.u(s).outer(&ms.u(s));
                down += opposite.v(s).outer(&opposite.v(s));
            }
            out.record("sum uu'", up.max_abs_diff(&pp), ALGEBRAIC);
            out.record("sum vv'", down.max_abs_diff(&pm), ALGEBRAIC);
        }
    }
    Ok(out)
}

const REPORT_KEYS: [&str; 9] =
    ["schema", "suite", "basis", "samples", "seed", "tolerance", "max_violation", "pass", "first_failure_p"];

/// Checks one report object against the documented schema; returns the
/// number of violations.
fn schema_violations(report: &Value, registered: &[&str]) -> usize {
    let Some(obj) = report.as_object() else { return 1 };
    let keys: BTreeSet<&str> = obj.keys().map(String::as_str).collect();
    let mut bad = usize::from(keys != REPORT_KEYS.into_iter().collect());
    let number = |k: &str| obj.get(k).and_then(Value::as_f64).filter(|x| x.is_finite());
    bad += usize::from(obj.get("schema").and_then(Value::as_u64) != Some(1));
    bad += usize::from(!obj.get("suite").and_then(Value::as_str).is_some_and(|s| registered.contains(&s)));
    bad += usize::from(!matches!(obj.get("basis").and_then(Value::as_str), Some("spin" | "helicity")));
    bad += usize::from(!obj.get("samples").and_then(Value::as_u64).is_some_and(|n| n > 0));
    bad += usize::from(obj.get("seed").and_then(Value::as_u64).is_none());
    bad += usize::from(!number("tolerance").is_some_and(|x| x > 0.0));
    bad += usize::from(!number("max_violation").is_some_and(|x| x >= 0.0));
    bad += usize::from(obj.get("pass").and_then(Value::as_bool).is_none());
    bad += usize::from(!match obj.get("first_failure_p") {
        Some(Value::Null) => true,
        Some(Value::Array(p)) => p.len() == 3 && p.iter().all(|x| x.as_f64().is_some()),
        _ => false,
    });
    bad
}

fn cli_contract() -> Outcome {
    let mut out = Checks::default();
    let dir = tempfile::tempdir().map_err(err)?;
    let mut stdouts = Vec::new();
    for run in 0..2 {
        let path = dir.path().join(format!("run{run}.json"));
        let output = Command::new(env!("CARGO_BIN_EXE_pryce"))
            .args(["verify", "--suite", "all", "--samples", "200", "--seed", "42", "--json", "--out"])
            .arg(&path)
            .output()
            .map_err(err)?;
        out.record("exit_code", f64::from(output.status.code().unwrap_or(-1)).abs(), 0.0);
        let file = std::fs::read(&path).map_err(err)?;
        out.record("out_file_differs", f64::from(u8::from(file != output.stdout)), 0.0);
        stdouts.push(output.stdout);
    }
    out.record("rerun_differs", f64::from(u8::from(stdouts[0] != stdouts[1])), 0.0);

    let text = String::from_utf8(stdouts.remove(0)).map_err(err)?;
    let doc: Value = serde_json::from_str(&text).map_err(err)?;
    let registered = suite_names();
    let reports = doc.as_array().ok_or("verify JSON is not an array")?;
    out.record("report_count", registered.len().abs_diff(reports.len()) as f64, 0.0);
    let violations: usize = reports.iter().map(|r| schema_violations(r, &registered)).sum();
    out.record("schema_violations", violations as f64, 0.0);
    let failing = reports.iter().filter(|r| r["pass"] != Value::Bool(true)).count();
    out.record("failing_suites", failing as f64, 0.0);
    let once = serde_json::to_string_pretty(&doc).map_err(err)?;
    let reparsed: Value = serde_json::from_str(&once).map_err(err)?;
    let twice = serde_json::to_string_pretty(&reparsed).map_err(err)?;
    out.record("round_trip_differs", f64::from(u8::from(reparsed != doc || twice != once)), 0.0);
    Ok(out)
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("spin-operator triple equivalence", spin_triple_equivalence),
        ("spin algebra and conservation", algebra_and_conservation),
        ("projector suite", projector_suite),
        ("coordinate identity", coordinate_identity),
        ("helicity-basis geometry", helicity_geometry),
        ("casimir", casimir),
        ("wigner unitarity", wigner_unitarity),
        ("kinematic laws", kinematic_laws),
        ("antiparticle sign table", antiparticle_signs),
        ("spinor suite", spinor_suite),
        ("cli contract", cli_contract),
    ];
    let mut all = true;
    for (n, (title, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (pass, detail) = match run() {
            Ok(checks) => (checks.pass(), checks.summary()),
            Err(e) => (false, format!("error: {e}")),
        };
        all &= pass;
        let verdict = if pass { "PASS" } else { "FAIL" };
        println!("{verdict} {:>2} {title:<34} {:>6.2}s  {detail}", n + 1, start.elapsed().as_secs_f64());
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
