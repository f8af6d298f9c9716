use std::time::Instant;

use pryce_core::algebra::Axis;
use pryce_core::connection::{omega_matrices, sigma_matrices};
use pryce_core::kinematics::OnShellMomentum;
use pryce_core::operators::{
    coordinate_correction, fw_transform, hamiltonian, helicity_operator, pauli_lubanski_restricted, polarization,
    projectors, pryce_spin,
};
use pryce_core::verify::{find_suite, run_suite, suite_names, suites, BasisChoice, SuiteSpec};
use pryce_core::wavepacket::{
    boost_trajectory, dipole_trajectory, expectations, gaussian_packet, mass_center_trajectory, Observable,
    Trajectory,
};

use crate::args::{OpArg, OpsArgs, VerifyArgs, WavepacketArgs};
use crate::render::{
    emit_json, human_matrix, json_matrix, num, FitDocument, JsonMatrix, OpsDocument, ReportDocument,
    WavepacketDocument, SCHEMA,
};
use crate::{Failure, EXIT_VERIFY_FAILED};

type Outcome = Result<u8, Failure>;

fn op_name(op: OpArg) -> &'static str {
    match op {
        OpArg::Hamiltonian => "hamiltonian",
        OpArg::Projectors => "projectors",
        OpArg::Spin => "spin",
        OpArg::Fw => "fw",
        OpArg::Polarization => "polarization",
        OpArg::Helicity0 => "helicity0",
        OpArg::Coordinate => "coordinate",
        OpArg::Sigma => "sigma",
        OpArg::Omega => "omega",
        OpArg::PauliLubanski => "pauli-lubanski",
    }
}

fn indexed(head: &str) -> Vec<String> {
    Axis::ALL.iter().map(|a| format!("{head}{}", a.index() + 1)).collect()
}

pub fn ops(a: &OpsArgs) -> Outcome {
    let start = Instant::now();
    let q = OnShellMomentum::new(a.mass, a.momentum)?;
    let choice = BasisChoice::from(a.basis);
    let b = choice.basis();
    let p = q.momentum();
    let (labels, matrices): (Vec<String>, Vec<JsonMatrix>) = match a.op {
        OpArg::Hamiltonian => (vec!["H".into()], vec![json_matrix(&hamiltonian(&q))]),
        OpArg::Projectors => {
            let (pp, pm) = projectors(&q);
            (vec!["Pi+".into(), "Pi-".into()], vec![json_matrix(&pp), json_matrix(&pm)])
        }
        OpArg::Spin => {
            let s = Axis::ALL.iter().map(|&ax| pryce_spin(&q, ax).map(|m| json_matrix(&m)));
            (indexed("S"), s.collect::<Result<_, _>>()?)
        }
        OpArg::Fw => (vec!["U_FW".into()], vec![json_matrix(&fw_transform(&q))]),
        OpArg::Polarization => (vec!["W".into()], vec![json_matrix(&polarization(&q, &b)?)]),
        OpArg::Helicity0 => (vec!["W0".into()], vec![json_matrix(&helicity_operator(&q))]),
        OpArg::Coordinate => {
            (indexed("dX"), Axis::ALL.iter().map(|&ax| json_matrix(&coordinate_correction(&q, ax))).collect())
        }
        OpArg::Sigma => (indexed("Sigma"), sigma_matrices(&b, &p)?.sigma.iter().map(json_matrix).collect()),
        OpArg::Omega => (indexed("Omega"), omega_matrices(&b, &p)?.omega.iter().map(json_matrix).collect()),
        OpArg::PauliLubanski => {
            let pl = pauli_lubanski_restricted(&q, &b)?;
            let mut labels = vec!["W0".to_string()];
            labels.extend(indexed("W"));
            labels.push("C2".into());
            let mut ms = vec![json_matrix(&pl.w0)];
            ms.extend(pl.w.iter().map(json_matrix));
            ms.push(json_matrix(&pl.casimir()));
            (labels, ms)
        }
    };
    let doc = OpsDocument {
        schema: SCHEMA,
        op: op_name(a.op).into(),
        m: a.mass,
        p,
        basis: choice.to_string(),
        labels,
        matrices,
    };
    emit_json(&doc, a.output.json, a.output.out.as_deref())?;
    if !a.output.json {
        out!("op {}  m = {}  p = ({}, {}, {})  basis {}", doc.op, num(doc.m), num(p[0]), num(p[1]), num(p[2]), doc.basis);
        for (label, m) in doc.labels.iter().zip(&doc.matrices) {
            out!("{label} =\n{}", human_matrix(m));
        }
    }
    eprintln!("wall time {:.3} s", start.elapsed().as_secs_f64());
    Ok(0)
}

pub fn verify(a: &VerifyArgs) -> Outcome {
    if a.list {
        for s in suites() {
            let basis = if s.helicity_only { " (helicity basis)" } else { "" };
            let kind = if s.packets { " [packets]" } else { "" };
            out!("{:<30} {:<18} {}{}{}", s.name, s.class.to_string(), s.summary, basis, kind);
        }
        return Ok(0);
    }
    let names: Vec<&str> = if a.suite == "all" { suite_names() } else { vec![find_suite(&a.suite)?.name] };
    let mut docs = Vec::with_capacity(names.len());
    for name in names {
        let mut spec = SuiteSpec::new(name)?
            .with_samples(a.samples)
            .with_seed(a.seed)
            .with_basis(a.basis.into())
            .with_mass(a.mass)
            .with_range(a.min_p, a.max_p);
        if let Some(tol) = a.tol {
            spec = spec.with_tolerance(tol);
        }
        let report = run_suite(&spec)?;
        eprintln!("{:<30} wall time {:.3} s", report.suite, report.wall_time.as_secs_f64());
        if !a.output.json {
            let verdict = if report.pass { "PASS" } else { "FAIL" };
            let mut line = format!(
                "{verdict} {:<30} basis={:<8} samples={:<4} max_violation={} tolerance={}",
                report.suite,
                report.basis.to_string(),
                report.samples,
                num(report.max_violation),
                num(report.tolerance)
            );
            if let Some(p) = report.first_failure_p {
                line.push_str(&format!(" first_failure_p=({}, {}, {})", num(p[0]), num(p[1]), num(p[2])));
            }
            out!("{line}");
        }
        docs.push(ReportDocument { schema: SCHEMA, report });
    }
    emit_json(&docs, a.output.json, a.output.out.as_deref())?;
    Ok(if docs.iter().all(|d| d.report.pass) { 0 } else { EXIT_VERIFY_FAILED })
}

fn parse_observables(list: &str) -> Result<Vec<Observable>, Failure> {
    let mut out: Vec<Observable> = Vec::new();
    for name in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        for o in Observable::expand(name)? {
            if !out.contains(&o) {
                out.push(o);
            }
        }
    }
    if out.is_empty() {
        return Err(Failure::usage("no observables given"));
    }
    Ok(out)
}

fn fit(law: &str, t: Trajectory) -> FitDocument {
    FitDocument {
        law: law.into(),
        residuals: t.rows.iter().map(|r| r.residual).collect(),
        max_residual: t.max_residual,
        max_deviation: t.max_deviation,
        max_velocity_drift: t.max_velocity_drift,
    }
}

pub fn wavepacket(a: &WavepacketArgs) -> Outcome {
    let start = Instant::now();
    let observables = parse_observables(&a.observables)?;
    let choice = BasisChoice::from(a.basis);
    let mut w = gaussian_packet(a.mass, a.center, a.width, a.pol, choice.basis(), a.species)?;
    if a.points.is_some() || a.check_points.is_some() {
        let mut grid = *w.grid();
        if let Some(n) = a.points {
            grid.points = n;
            grid.check_points = (n * 4 / 5).max(2);
        }
        if let Some(n) = a.check_points {
            grid.check_points = n;
        }
        w = w.with_grid(grid)?;
    }
    if let Some(tol) = a.tol {
        if !(tol > 0.0) {
            return Err(Failure::usage(format!("tolerance must be positive, got {tol}")));
        }
        w = w.with_tolerance(tol);
    }

    let mut rows = Vec::with_capacity(a.times.0.len());
    let (mut max_error, mut max_imaginary) = (0.0f64, 0.0f64);
    for &t in &a.times.0 {
        let reports = expectations(&observables, &w, t)?;
        let mut row = vec![t];
        for r in reports {
            max_error = max_error.max(r.error_estimate);
            max_imaginary = max_imaginary.max(r.imaginary.abs());
            row.push(r.value);
        }
        rows.push(row);
    }

    let has = |f: fn(&Observable) -> bool| observables.iter().any(f);
    let mut fits = Vec::new();
    if has(|o| matches!(o, Observable::Position(_))) {
        fits.push(fit("X(t) = X + V t", dipole_trajectory(&w, &a.times.0)?));
    }
    if has(|o| matches!(o, Observable::MassCenter(_))) {
        fits.push(fit("XMC(t) = XMC + VMC t", mass_center_trajectory(&w, &a.times.0)?));
    }
    if has(|o| matches!(o, Observable::Boost(_))) {
        fits.push(fit("K(t) = K + P t", boost_trajectory(&w, &a.times.0)?));
    }

    let grid = w.grid();
    let mut columns = vec!["t".to_string()];
    columns.extend(observables.iter().map(|o| o.to_string()));
    let doc = WavepacketDocument {
        schema: SCHEMA,
        m: a.mass,
        center: a.center,
        width: a.width,
        pol: if a.pol.value() > 0.0 { "+".into() } else { "-".into() },
        species: a.species.to_string(),
        basis: choice.to_string(),
        points: grid.points,
        check_points: grid.check_points,
        columns,
        rows,
        max_error_estimate: max_error,
        max_imaginary,
        fits,
    };
    emit_json(&doc, a.output.json, a.output.out.as_deref())?;
    if !a.output.json {
        out!(
            "{} packet  m = {}  center = ({}, {}, {})  width = {}  pol {}  basis {}",
            doc.species,
            num(doc.m),
            num(doc.center[0]),
            num(doc.center[1]),
            num(doc.center[2]),
            num(doc.width),
            doc.pol,
            doc.basis
        );
        out!("{}", doc.columns.iter().map(|c| format!("{c:>22}")).collect::<Vec<_>>().join(" "));
        for row in &doc.rows {
            out!("{}", row.iter().map(|x| format!("{:>22}", num(*x))).collect::<Vec<_>>().join(" "));
        }
        for f in &doc.fits {
            out!(
                "fit {}: max residual {}  max deviation {}  velocity drift {}",
                f.law,
                num(f.max_residual),
                num(f.max_deviation),
                num(f.max_velocity_drift)
            );
            out!("  residuals {}", f.residuals.iter().map(|r| num(*r)).collect::<Vec<_>>().join(" "));
        }
        out!("max error estimate {}  max |imaginary part| {}", num(doc.max_error_estimate), num(doc.max_imaginary));
    }
    eprintln!("wall time {:.3} s", start.elapsed().as_secs_f64());
    Ok(0)
}
