//! End-to-end acceptance checks. Run with `cargo test --test acceptance`;
//! every criterion prints one PASS/FAIL line and the process fails if any
//! criterion fails.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use conserva::corrections::energy_update_identity;
use conserva::harness::{
    convergence, run, weak_residual_diagnostic, CaseId, RunConfig, RunOutput, SchemeId, TestFunction,
};
use conserva::mesh::{Boundary, ElementGraph, GraphKind, Mesh1D};
use conserva::models::{Model, Primitive};
use conserva::recovery::{reconstruct_scheme, recover_fluxes, RecoveryProblem};
use conserva::schemes::{
    fv_flux_form_update, fv_residuals_1d, rd_step, triangle_fv_residuals, NodalScheme, NumericalFlux, PlanarModel,
    ResidualKind, TriangleGeometry,
};
use conserva::state::State;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn within(elapsed: Duration, limit_s: f64) -> bool {
    elapsed.as_secs_f64() < limit_s
}

fn max_diff(a: &[State], b: &[State]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (*x - *y).norm_inf()).fold(0.0, f64::max)
}

fn fv_rd_equivalence() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0_f64;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for n in [50, 200] {
        for boundary in [Boundary::Periodic, Boundary::Transmissive] {
            let mesh = Mesh1D::uniform(0.0, 1.0, n, boundary).unwrap();
            let burgers: Vec<State> = (0..mesh.dof_count())
                .map(|_| State::scalar(rng.gen_range(-2.0..2.0)))
                .collect();
            let euler_model = Model::euler(1.4).unwrap();
            let euler: Vec<State> = (0..mesh.dof_count())
                .map(|_| {
                    euler_model.conserved(&Primitive {
                        density: rng.gen_range(0.1..2.0),
                        velocity: rng.gen_range(-1.0..1.0),
                        pressure: rng.gen_range(0.1..2.0),
                    })
                })
                .collect();
            for (model, states) in [(Model::Burgers, &burgers), (euler_model, &euler)] {
                for flux in [NumericalFlux::Rusanov, NumericalFlux::Central] {
                    let dt = 1e-3;
                    let set = fv_residuals_1d(&mesh, states, flux, &model).unwrap();
                    let rd = rd_step(&mesh, states, &set, dt, &model);
                    let fv = fv_flux_form_update(&mesh, states, flux, &model, dt).unwrap();
                    if let Ok(rd) = rd {
                        worst = worst.max(max_diff(&rd, &fv));
                    }
                }
            }
        }
    }
    let elapsed = start.elapsed();
    outcome(
        worst <= 1e-13 && within(elapsed, 1.0),
        format!(
            "max |RD - FV| = {worst:.3e} (limit 1e-13), {:.3} s (limit 1 s)",
            elapsed.as_secs_f64()
        ),
    )
}

fn random_conservative(rng: &mut ChaCha8Rng, dofs: usize) -> Vec<State> {
    let mut psi: Vec<f64> = (0..dofs).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let mean = psi.iter().sum::<f64>() / dofs as f64;
    for p in &mut psi {
        *p -= mean;
    }
    psi.into_iter().map(State::scalar).collect()
}

fn flux_recovery() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0_f64;
    let mut worst_oracle = 0.0_f64;
    let mut kinds = vec![GraphKind::Segment, GraphKind::Triangle];
    kinds.extend((3..=6).map(GraphKind::Path));
    for kind in kinds {
        let graph = ElementGraph::new(kind).unwrap();
        let a = graph.incidence();
        let pinv = a.clone().pseudo_inverse(1e-12).unwrap();
        for _ in 0..1000 {
            let psi = random_conservative(&mut rng, graph.dof_count());
            let scale = psi.iter().map(|p| p[0].abs()).fold(0.0, f64::max);
            let fluxes = recover_fluxes(&graph, &RecoveryProblem::new(psi.clone()).unwrap()).unwrap();
            let f = DVector::from_iterator(graph.edge_count(), fluxes.values().iter().map(|v| v[0]));
            let af = &a * &f;
            for (i, p) in psi.iter().enumerate() {
                worst = worst.max((af[i] - p[0]).abs() / scale);
            }
            let oracle = &pinv * DVector::from_iterator(psi.len(), psi.iter().map(|p| p[0]));
            worst_oracle = worst_oracle.max((oracle - f).amax() / scale);
        }
    }
    let tri = ElementGraph::new(GraphKind::Triangle).unwrap();
    let psi = vec![State::scalar(1.0), State::scalar(-1.0), State::scalar(0.0)];
    let f = recover_fluxes(&tri, &RecoveryProblem::new(psi).unwrap()).unwrap();
    let expect = [2.0 / 3.0, -1.0 / 3.0, -1.0 / 3.0];
    let tri_err = f
        .values()
        .iter()
        .zip(expect)
        .map(|(v, e)| (v[0] - e).abs())
        .fold(0.0, f64::max);
    let elapsed = start.elapsed();
    outcome(
        worst <= 1e-11 && worst_oracle <= 1e-11 && tri_err <= 1e-12 && within(elapsed, 5.0),
        format!(
            "max |Af - Psi|/|Psi| = {worst:.3e}, vs pseudo-inverse {worst_oracle:.3e} (limit 1e-11), \
             triangle (1,-1,0) error {tri_err:.3e} (limit 1e-12), {:.3} s (limit 5 s)",
            elapsed.as_secs_f64()
        ),
    )
}

fn scheme_reconstruction() -> Outcome {
    let mut worst = 0.0_f64;
    let mut steps = 0;
    for (name, kind, correct) in [
        ("supg", ResidualKind::Supg { tau_scale: 1.0 }, false),
        ("entropy-corrected", ResidualKind::Fv(NumericalFlux::Central), true),
    ] {
        let cfg = RunConfig {
            case: CaseId::BurgersSine,
            scheme: SchemeId::FvRusanov,
            nx: 50,
            snapshot_stride: 1,
            max_steps: Some(60),
            t_end: Some(2.0),
            ..RunConfig::default()
        };
        let scheme_id = if correct {
            SchemeId::FvEntropyCorrected
        } else {
            SchemeId::Supg
        };
        let out = run(&RunConfig {
            scheme: scheme_id,
            ..cfg
        })
        .unwrap();
        let scheme = NodalScheme::new(out.mesh.clone(), Model::Burgers, kind).with_entropy_correction(correct);
        for snap in &out.record.snapshots {
            let (set, _) = scheme.residuals(&snap.values).unwrap();
            let dt = 0.2 * out.mesh.min_width();
            let rd = rd_step(&out.mesh, &snap.values, &set, dt, &Model::Burgers).unwrap();
            let form = reconstruct_scheme(&out.mesh, &set).unwrap();
            let fv = form.update(&out.mesh, &snap.values, dt);
            let d = max_diff(&rd, &fv);
            if d > worst {
                log::debug!("{name}: {d:e}");
            }
            worst = worst.max(d);
            steps += 1;
        }
    }
    outcome(
        worst <= 1e-12,
        format!("max |flux form - RD| = {worst:.3e} over {steps} states (limit 1e-12)"),
    )
}

fn relative_mass_drift(out: &RunOutput) -> f64 {
    let first = &out.record.ledger[0];
    let scale = out.record.snapshots[0].values.iter().map(|u| u[0].abs()).sum::<f64>() * out.mesh.min_width();
    out.record.conservation_drift()[0] / first.totals[0].abs().max(scale)
}

fn conservation_ledgers() -> Outcome {
    let mut details = Vec::new();
    let mut pass = true;
    // the bare central flux has no dissipation and is unstable once the
    // shock forms, so it only appears as the control of criterion 5
    for scheme in [
        SchemeId::FvRusanov,
        SchemeId::Supg,
        SchemeId::FvEntropyCorrected,
        SchemeId::ActiveFlux,
    ] {
        let cfg = RunConfig {
            case: CaseId::BurgersSine,
            scheme,
            nx: 100,
            // the decaying sawtooth lets dt grow, so only the step cap ends the run
            t_end: Some(1e300),
            max_steps: Some(500),
            ..RunConfig::default()
        };
        match run(&cfg) {
            Ok(out) => {
                let drift = relative_mass_drift(&out);
                pass &= drift <= 1e-11 && out.record.steps == 500;
                details.push(format!("{scheme} {drift:.1e} ({} steps)", out.record.steps));
            }
            Err(e) => {
                pass = false;
                details.push(format!("{scheme} failed: {e}"));
            }
        }
    }
    let cfg = RunConfig {
        case: CaseId::EulerDensityWave,
        scheme: SchemeId::NcEnergyCorrected,
        nx: 100,
        t_end: Some(1e3),
        max_steps: Some(500),
        ..RunConfig::default()
    };
    match run(&cfg) {
        Ok(out) => {
            let e0 = out.record.ledger[0].totals[2];
            let drift = out.record.conservation_drift()[2] / e0.abs();
            pass &= drift <= 1e-10;
            details.push(format!("nc-energy-corrected energy {drift:.1e}"));
        }
        Err(e) => {
            pass = false;
            details.push(format!("nc-energy-corrected failed: {e}"));
        }
    }
    outcome(
        pass,
        format!(
            "relative drift after 500 steps: {} (limits 1e-11 mass, 1e-10 energy)",
            details.join(", ")
        ),
    )
}

fn entropy_correction() -> Outcome {
    let base = RunConfig {
        case: CaseId::BurgersSine,
        nx: 100,
        cfl: Some(0.1),
        t_end: Some(0.6),
        ..RunConfig::default()
    };
    let corrected = run(&RunConfig {
        scheme: SchemeId::FvEntropyCorrected,
        ..base.clone()
    })
    .unwrap();
    let min_margin = corrected
        .record
        .ledger
        .iter()
        .filter_map(|r| r.entropy_margin)
        .fold(f64::INFINITY, f64::min);
    let max_increase = corrected
        .record
        .ledger
        .windows(2)
        .map(|w| w[1].entropy - w[0].entropy)
        .fold(f64::NEG_INFINITY, f64::max);
    let uncorrected = run(&RunConfig {
        scheme: SchemeId::FvCentral,
        ..base
    })
    .unwrap();
    let violations = uncorrected
        .record
        .ledger
        .iter()
        .filter(|r| r.entropy_margin.is_some_and(|m| m < -1e-12))
        .count();
    let increases = uncorrected
        .record
        .ledger
        .windows(2)
        .filter(|w| w[1].entropy > w[0].entropy)
        .count();
    outcome(
        min_margin >= -1e-12 && max_increase <= 0.0 && violations > 0,
        format!(
            "corrected: min margin {min_margin:.3e} (limit -1e-12), largest entropy change per step {max_increase:.3e} \
             (limit 0); uncorrected central: {violations} steps with negative margin, {increases} with entropy increase"
        ),
    )
}

fn shock_location(out: &RunOutput) -> f64 {
    let values: Vec<f64> = out.record.final_snapshot().values.iter().map(|u| u[0]).collect();
    let x = &out.record.positions;
    let i = values.iter().position(|&u| u < 0.5).expect("no shock found");
    let s = (values[i - 1] - 0.5) / (values[i - 1] - values[i]);
    x[i - 1] + s * (x[i] - x[i - 1])
}

fn shock_capturing() -> Outcome {
    let base = RunConfig {
        case: CaseId::BurgersRiemann,
        scheme: SchemeId::FvRusanov,
        snapshot_stride: 1,
        ..RunConfig::default()
    };
    let fine = run(&RunConfig {
        nx: 400,
        ..base.clone()
    })
    .unwrap();
    let location = shock_location(&fine);
    let dx = fine.mesh.min_width();
    let defect = |cfg: RunConfig| -> f64 {
        let out = run(&cfg).unwrap();
        let family = TestFunction::family(&out.case, out.record.final_time());
        weak_residual_diagnostic(&out.record, &out.case.model, &family)
            .unwrap()
            .max()
    };
    let defects: Vec<f64> = [100, 200, 400]
        .iter()
        .map(|&nx| defect(RunConfig { nx, ..base.clone() }))
        .collect();
    let control: Vec<f64> = [100, 200, 400]
        .iter()
        .map(|&nx| {
            defect(RunConfig {
                nx,
                scheme: SchemeId::NcBurgers,
                ..base.clone()
            })
        })
        .collect();
    let monotone = defects.windows(2).all(|w| w[1] < w[0]);
    let stagnates = control[2] > 0.5 * control[0] && control[2] > 10.0 * defects[2];
    outcome(
        (location - 0.5).abs() <= 2.0 * dx && monotone && stagnates,
        format!(
            "shock at {location:.5} (|x - 0.5| = {:.2} dx, limit 2); weak defect n=100,200,400: {:.3e}, {:.3e}, {:.3e}; \
             non-conservative control: {:.3e}, {:.3e}, {:.3e}",
            (location - 0.5).abs() / dx,
            defects[0],
            defects[1],
            defects[2],
            control[0],
            control[1],
            control[2]
        ),
    )
}

fn sod() -> Outcome {
    let start = Instant::now();
    let base = RunConfig {
        case: CaseId::Sod,
        nx: 1000,
        gamma: 1.4,
        t_end: Some(0.2),
        ..RunConfig::default()
    };
    let fv = run(&RunConfig {
        scheme: SchemeId::FvRusanov,
        ..base.clone()
    })
    .unwrap()
    .l1_error(0)
    .unwrap();
    let af = run(&RunConfig {
        scheme: SchemeId::ActiveFlux,
        detector: true,
        ..base
    })
    .and_then(|o| o.l1_error(0));
    let elapsed = start.elapsed();
    let (af_ok, af_text) = match af {
        Ok(e) => (e <= 5e-3, format!("{e:.3e}")),
        Err(e) => (false, format!("failed ({e})")),
    };
    outcome(
        fv <= 2e-2 && af_ok && within(elapsed, 30.0),
        format!(
            "L1 density error: fv-rusanov {fv:.3e} (limit 2e-2), active-flux+detector {af_text} (limit 5e-3), {:.2} s (limit 30 s)",
            elapsed.as_secs_f64()
        ),
    )
}

fn active_flux_accuracy() -> Outcome {
    let mut pass = true;
    let mut details = Vec::new();
    for (case, t_end) in [(CaseId::AdvectionSine, 2.0), (CaseId::BurgersSine, 0.25 / PI)] {
        let cfg = RunConfig {
            case,
            scheme: SchemeId::ActiveFlux,
            t_end: Some(t_end),
            ..RunConfig::default()
        };
        let table = convergence(&cfg, &[40, 80, 160]).unwrap();
        let order = table.min_order().unwrap();
        pass &= order >= 2.7;
        let orders: Vec<String> = table
            .rows
            .iter()
            .filter_map(|r| r.order)
            .map(|o| format!("{o:.2}"))
            .collect();
        details.push(format!("{case} orders {}", orders.join(", ")));
    }
    outcome(pass, format!("{} (limit 2.7)", details.join("; ")))
}

fn shu_osher() -> Outcome {
    let base = RunConfig {
        case: CaseId::ShuOsher,
        scheme: SchemeId::ActiveFlux,
        detector: true,
        t_end: Some(1.8),
        ..RunConfig::default()
    };
    let runs: Vec<_> = std::thread::scope(|s| {
        let handles: Vec<_> = [100, 200, 400, 1600]
            .iter()
            .map(|&nx| {
                let cfg = RunConfig { nx, ..base.clone() };
                s.spawn(move || run(&cfg))
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    let runs: Vec<RunOutput> = match runs.into_iter().collect::<Result<Vec<_>, _>>() {
        Ok(r) => r,
        Err(e) => return outcome(false, format!("run failed: {e}")),
    };
    let target = &runs[2];
    let mass0 = target.record.ledger[0].totals[0];
    let drift = target.record.conservation_drift()[0] / mass0.abs();
    let reference = &runs[3];
    let distances: Vec<f64> = runs[..3]
        .iter()
        .map(|r| r.l1_distance_to(reference, 0).unwrap())
        .collect();
    let decreasing = distances.windows(2).all(|w| w[1] < w[0]);
    let fallbacks: usize = target.record.ledger.iter().map(|r| r.fallback_cells).sum();
    outcome(
        (target.record.final_time() - 1.8).abs() < 1e-12 && drift <= 1e-11 && decreasing,
        format!(
            "n=400 reached t=1.8 in {} steps ({fallbacks} fallback cell-stages), relative mass drift {drift:.2e} (limit 1e-11); \
             L1 density distance to n=1600 for n=100,200,400: {:.3e}, {:.3e}, {:.3e}",
            target.record.steps, distances[0], distances[1], distances[2]
        ),
    )
}

fn algebraic_identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut worst_energy = 0.0_f64;
    for _ in 0..100_000 {
        let mut tuple = || {
            [
                rng.gen_range(0.1..10.0),
                rng.gen_range(-5.0..5.0),
                rng.gen_range(0.1..10.0),
            ]
        };
        let (old, new) = (tuple(), tuple());
        let total = |s: [f64; 3]| s[2] + 0.5 * s[0] * s[1] * s[1];
        let scale = total(old).abs().max(total(new).abs());
        worst_energy = worst_energy.max(energy_update_identity(old, new) / scale);
    }
    let mut worst_triangle = 0.0_f64;
    let models = [PlanarModel::Burgers, PlanarModel::Advection { velocity: [0.7, -1.3] }];
    for i in 0..1000 {
        let p = [
            [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)],
            [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)],
            [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)],
        ];
        let Ok(geometry) = TriangleGeometry::from_vertices(p) else {
            continue;
        };
        let states = [
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
        ];
        let el = triangle_fv_residuals(states, &geometry, &models[i % 2]);
        let scale = el
            .boundary
            .iter()
            .chain(&el.residuals)
            .map(|s| s[0].abs())
            .fold(1e-300, f64::max);
        worst_triangle = worst_triangle.max(el.defect() / scale);
    }
    outcome(
        worst_energy <= 1e-14 && worst_triangle <= 1e-13,
        format!(
            "energy identity relative defect {worst_energy:.3e} over 1e5 tuples (limit 1e-14); \
             triangle FV identity {worst_triangle:.3e} over 1e3 triangles (limit 1e-13)"
        ),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let criteria: [Criterion; 10] = [
        ("FV-as-RD equivalence", fv_rd_equivalence),
        ("flux recovery", flux_recovery),
        ("scheme reconstruction", scheme_reconstruction),
        ("conservation ledgers", conservation_ledgers),
        ("entropy correction", entropy_correction),
        ("shock capturing", shock_capturing),
        ("Sod shock tube", sod),
        ("active-flux accuracy", active_flux_accuracy),
        ("Shu-Osher", shu_osher),
        ("algebraic identities", algebraic_identities),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let id = (i + 1).to_string();
        if !filter.is_empty() && !filter.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let result = std::panic::catch_unwind(check).unwrap_or_else(|_| outcome(false, "panicked"));
        let verdict = if result.pass { "PASS" } else { "FAIL" };
        if !result.pass {
            failures += 1;
        }
        println!(
            "criterion {id:>2} [{verdict}] {name}: {} ({:.2} s)",
            result.detail,
            start.elapsed().as_secs_f64()
        );
    }
    if failures > 0 {
        println!("{failures} acceptance criteria failed");
        std::process::exit(1);
    }
}
