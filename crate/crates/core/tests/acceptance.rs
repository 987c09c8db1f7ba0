//! Acceptance criteria, one line each. Runs without the libtest harness so
//! the lines show up in plain `cargo test` output.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use stein_nbhd::certificate::Witness;
use stein_nbhd::error::Error;
use stein_nbhd::invariants::{
    adjunction_rhs, check_adjunction, lai, stein_condition, AdjunctionVariant, ImmersionClass,
    SurfaceTopology,
};
use stein_nbhd::localgeo::patch::{GraphPatch, SigmaHandle};
use stein_nbhd::localgeo::{
    det_identity_check, exhaustion_certificate, flow_to_surface, levi_closed, levi_fd,
    locate_complex_points, locate_in_atlas, model_patch, psh_certificate, winding_index,
    FlowOptions, Grid, LocalModel, ModelKind, PointC2, PshOptions, ScalarField, Scene,
};
use stein_nbhd::suites::{sample_sublevel, DEFAULT_SEED};
use stein_nbhd::surgery::{plan_cp2, replay, PlanTarget, Sign, SurgeryStep};

type Outcome = Result<String, String>;
type Criterion = (&'static str, Option<u64>, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn seeded(stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SEED);
    rng.set_stream(stream);
    rng
}

fn random_point(rng: &mut ChaCha8Rng) -> PointC2 {
    PointC2::from_real(std::array::from_fn(|_| rng.gen_range(-1.0..=1.0)))
}

fn index_arithmetic() -> Outcome {
    for d in 1..=6 {
        let r = lai(&ImmersionClass::cp2_curve(d)).map_err(|e| e.to_string())?;
        ensure(r.positive == Some(3 * d) && r.negative == Some(0), || {
            format!("degree {d}: I+ = {:?}, I- = {:?}", r.positive, r.negative)
        })?;
    }
    Ok("I+ = 3d, I- = 0 for d = 1..6".into())
}

fn sharp_cp2_bounds() -> Outcome {
    for d in 1..=10 {
        let rhs = adjunction_rhs(&ImmersionClass::cp2_curve(d)).map_err(|e| e.to_string())?;
        ensure(rhs == (d + 1) * (d + 2) / 2, || {
            format!("degree {d}: rhs {rhs}")
        })?;
    }
    for (g, k) in [(3, 0), (0, 3)] {
        let recipe = plan_cp2(PlanTarget::oriented(1, g, k)).map_err(|e| e.to_string())?;
        let result = replay(recipe.base(), recipe.steps()).map_err(|e| e.to_string())?;
        let (_, plus, minus) = common::indices(&result);
        ensure(
            result.topology.genus == g && result.delta_plus == k && plus <= 0 && minus <= 0,
            || format!("plan (1, {g}, {k}) replays to {result}"),
        )?;
    }
    match plan_cp2(PlanTarget::oriented(1, 0, 2)) {
        Err(Error::Infeasible { lhs: 2, rhs: 3, .. }) => {}
        other => return Err(format!("plan (1, 0, 2) gave {other:?}")),
    }
    Ok("rhs = (d+1)(d+2)/2 for d = 1..10; (1,3,0) and (1,0,3) replay with I± <= 0; (1,0,2) infeasible".into())
}

fn degree_one_symplectic_bound() -> Outcome {
    let mut first_pass = None;
    for k in 0..=5 {
        // d = 1, g = 0 forces delta_plus = delta_minus
        let imm = ImmersionClass::immersed(SurfaceTopology::orientable(0), 1, 3, k, k);
        let cert = check_adjunction(&imm, AdjunctionVariant::ImmersedStarstar)
            .map_err(|e| e.to_string())?;
        ensure(cert.pass == (k >= 3), || {
            format!("δ± = {k}: pass = {}", cert.pass)
        })?;
        if cert.pass && first_pass.is_none() {
            first_pass = Some(k);
        }
    }
    ensure(first_pass == Some(3), || {
        format!("first passing δ± = {first_pass:?}")
    })?;
    Ok("no class with fewer than 6 double points passes; δ+ = δ- = 3 passes".into())
}

fn unorientable_replay() -> Outcome {
    let base = ImmersionClass::real_projective_plane_in_cp2();
    for k in 0..=10 {
        let steps = vec![SurgeryStep::AttachRP2; k as usize];
        let imm = replay(&base, &steps).map_err(|e| e.to_string())?;
        let idx = lai(&imm).map_err(|e| e.to_string())?;
        let stein = stein_condition(&imm).map_err(|e| e.to_string())?;
        ensure(
            imm.topology.genus == 1 + k && idx.total == -3 * k && stein.pass,
            || format!("k = {k}: {imm}, I = {}", idx.total),
        )?;
    }
    Ok("genus 1+k, I = -3k, Stein for k = 0..10".into())
}

fn surgery_conservation() -> Outcome {
    let mut rng = seeded(5);
    let mut applied = 0usize;
    for _ in 0..10_000 {
        let imm = common::random_class(&mut rng);
        let (total, plus, minus) = common::indices(&imm);
        let idx = lai(&imm).map_err(|e| format!("{imm}: {e}"))?;
        if imm.topology.orientable {
            ensure(
                idx.positive == Some(plus)
                    && idx.negative == Some(minus)
                    && plus + minus == idx.total,
                || format!("{imm}: {idx:?}"),
            )?;
        }
        ensure(idx.total == total, || format!("{imm}: I = {}", idx.total))?;
        ensure(
            imm.self_intersection() == common::self_intersection(&imm),
            || format!("{imm}: S²"),
        )?;

        for step in common::LOCAL_STEPS {
            let next = match step.apply(&imm) {
                Ok((next, _)) => next,
                Err(_) if common::may_refuse(&step, &imm) => continue,
                Err(e) => return Err(format!("{step} refused {imm}: {e}")),
            };
            applied += 1;
            // only oriented surfaces carry an integral class
            ensure(
                !next.topology.orientable
                    || common::self_intersection(&next) == common::self_intersection(&imm),
                || format!("{step} changes S² of {imm}"),
            )?;
            match step {
                SurgeryStep::ResolvePositiveDpHandle => {
                    let (_, p2, m2) = common::indices(&next);
                    ensure(
                        (p2, m2) == (plus, minus)
                            && next.topology.genus + next.delta_plus
                                == imm.topology.genus + imm.delta_plus,
                        || format!("positive resolution of {imm} gives {next}"),
                    )?;
                }
                SurgeryStep::ResolveNegativeDpBlowup => {
                    ensure(adjunction_rhs(&next) == adjunction_rhs(&imm), || {
                        format!("blow-up changes adjunction rhs of {imm}")
                    })?;
                }
                _ => {}
            }
        }
    }
    Ok(format!(
        "10000 classes, {applied} step applications, zero violations"
    ))
}

fn levi_oracles() -> Outcome {
    let mut rng = seeded(6);
    let mut worst_fd = 0.0f64;
    for model in LocalModel::ALL {
        for _ in 0..100 {
            let p = random_point(&mut rng);
            let fd = levi_fd(&model, p, 1e-4).map_err(|e| e.to_string())?;
            worst_fd = worst_fd.max(fd.max_abs_diff(&levi_closed(model, p)));
        }
    }
    ensure(worst_fd < 1e-6, || format!("levi_fd error {worst_fd:.3e}"))?;

    let mut worst_rel = 0.0f64;
    for _ in 0..10_000 {
        let p = random_point(&mut rng);
        let cert = det_identity_check(p);
        ensure(cert.pass, || format!("identity fails at {p}"))?;
        // r⁴ − 4 Im(z̄w)², computed in complex arithmetic
        let r2 = p.z.norm_sqr() + p.w.norm_sqr();
        let im = (p.z.conj() * p.w).im;
        let quartic = r2 * r2 - 4.0 * im * im;
        let four_det = 4.0 * levi_closed(LocalModel::DoublePoint, p).det();
        worst_rel = worst_rel.max((four_det - quartic).abs() / (r2 * r2));
    }
    ensure(worst_rel < 1e-12, || {
        format!("determinant identity error {worst_rel:.3e}")
    })?;
    Ok(format!(
        "fd vs closed {worst_fd:.2e} < 1e-6; identity {worst_rel:.2e} < 1e-12"
    ))
}

fn degeneracy_oracle(model: LocalModel, p: PointC2) -> f64 {
    match model {
        LocalModel::SpecialHyperbolic => p.z.norm(),
        LocalModel::DoublePoint => {
            let i = Complex64::new(0.0, 1.0);
            (p.w - i * p.z).norm().min((p.w + i * p.z).norm()) / 2f64.sqrt()
        }
    }
}

fn psh_certificates() -> Outcome {
    let grid = Grid::cube(1.0, 0.05).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for model in LocalModel::ALL {
        for (opts, floor) in [
            (PshOptions::closed(), 1e-9),
            (PshOptions::finite_difference(), 1e-5),
        ] {
            ensure(opts.tol == floor, || "eigenvalue floor drifted".into())?;
            let cert = psh_certificate(&model, &grid, &opts).map_err(|e| e.to_string())?;
            ensure(cert.pass, || format!("{model}: {cert:?}"))?;
            let p = PointC2::from_real(cert.first_point().unwrap().try_into().unwrap());
            let d = degeneracy_oracle(model, p);
            ensure(d <= 1e-6, || {
                format!("{model}: witness {p} at distance {d:.3e}")
            })?;
            worst = worst.max(d);
        }
    }
    Ok(format!(
        "{} grid points per sweep; witness distance <= {worst:.1e}",
        grid.len()
    ))
}

fn complex_points() -> Outcome {
    let c = 0.05f64.sqrt();
    let minus = SigmaHandle::new(Sign::Negative, 0.1).map_err(|e| e.to_string())?;
    let scan = locate_complex_points(&minus, 0.02, 1e-12).map_err(|e| e.to_string())?;
    ensure(scan.points.len() == 4, || {
        format!("Σ-: {} points", scan.points.len())
    })?;
    let mut signs = Vec::new();
    for p in &scan.points {
        let [x, y, u, v] = p.point.to_real();
        let err = [(x.abs() - c), (y - x), (u.abs() - c), (v + u)]
            .iter()
            .fold(0.0f64, |m, e| m.max(e.abs()));
        ensure(err < 1e-4 && p.index == -1, || {
            format!("Σ- point {} off by {err:.2e}, index {}", p.point, p.index)
        })?;
        signs.push((x > 0.0, u > 0.0));
    }
    signs.sort();
    signs.dedup();
    ensure(signs.len() == 4, || {
        "Σ- points are not the four sign patterns".into()
    })?;

    let plus = SigmaHandle::new(Sign::Positive, 0.1).map_err(|e| e.to_string())?;
    let scan_plus = locate_complex_points(&plus, 0.02, 1e-12).map_err(|e| e.to_string())?;
    let weinstein = model_patch(ModelKind::Weinstein).map_err(|e| e.to_string())?;
    let scan_w = locate_in_atlas(&weinstein, 0.05, 1e-12).map_err(|e| e.to_string())?;
    for (name, n, m) in [
        ("Σ+", scan_plus.points.len(), scan_plus.min_modulus),
        ("Weinstein", scan_w.points.len(), scan_w.min_modulus),
    ] {
        ensure(n == 0 && m > 0.0, || {
            format!("{name}: {n} points, min |det| {m:.3e}")
        })?;
    }

    let windings: Vec<i64> = [
        GraphPatch::special_elliptic(),
        GraphPatch::special_hyperbolic(),
        GraphPatch::cubic(),
    ]
    .iter()
    .map(|g| winding_index(g, [0.0, 0.0], 0.5, 64))
    .collect::<Result<_, _>>()
    .map_err(|e| e.to_string())?;
    ensure(windings == [1, -1, -2], || format!("windings {windings:?}"))?;
    Ok(format!(
        "Σ- 4 points of index -1; Σ+ min |det| {:.3}, Weinstein min |det| {:.3}; windings {windings:?}",
        scan_plus.min_modulus, scan_w.min_modulus
    ))
}

fn retraction() -> Outcome {
    let opts = FlowOptions::default();
    let mut worst = 0.0f64;
    for model in LocalModel::ALL {
        for start in sample_sublevel(model, 0.01, 100, DEFAULT_SEED) {
            ensure(model.value(start) < 0.01, || {
                format!("{start} not in the sublevel set")
            })?;
            let r = flow_to_surface(&model, start, &opts)
                .map_err(|e| format!("{model} from {start}: {e}"))?;
            ensure(
                r.converged && r.final_value < 1e-10 && r.is_monotone(),
                || format!("{model} from {start}: final {:.3e}", r.final_value),
            )?;
            let recomputed: Vec<f64> = r.trajectory.iter().map(|&p| model.value(p)).collect();
            ensure(recomputed.windows(2).all(|w| w[1] <= w[0]), || {
                format!("{model} from {start}: values increase")
            })?;
            worst = worst.max(r.final_value);
        }
    }
    Ok(format!(
        "200 starts converge; worst final value {worst:.2e}"
    ))
}

fn exhaustion() -> Outcome {
    let mut summary = Vec::new();
    for (name, scene) in [
        ("special hyperbolic", Scene::special_hyperbolic(0.5)),
        ("double point", Scene::double_point()),
    ] {
        let small = exhaustion_certificate(&scene, 0.01, 1e-3, 0.025).map_err(|e| e.to_string())?;
        ensure(small.pass, || format!("{name}, δ = 1e-3: {small:?}"))?;
        let large = exhaustion_certificate(&scene, 0.01, 10.0, 0.025).map_err(|e| e.to_string())?;
        let p = PointC2::from_real(large.first_point().unwrap().try_into().unwrap());
        ensure(!large.pass && scene.in_cutoff_annulus(p), || {
            format!("{name}, δ = 10: pass = {}, witness {p}", large.pass)
        })?;
        let min = |c: &stein_nbhd::certificate::Certificate| match c.witnesses.first() {
            Some(Witness::Sample { value, .. }) => *value,
            _ => f64::NAN,
        };
        summary.push(format!("{name} {:.2e} / {:.2e}", min(&small), min(&large)));
    }
    Ok(format!(
        "min eigenvalue at δ = 1e-3 / δ = 10: {}",
        summary.join(", ")
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("index arithmetic", Some(1), index_arithmetic),
        ("sharp CP2 bounds", Some(1), sharp_cp2_bounds),
        (
            "degree-1 symplectic bound",
            Some(1),
            degree_one_symplectic_bound,
        ),
        ("unorientable replay", None, unorientable_replay),
        ("surgery conservation", None, surgery_conservation),
        ("Levi-form oracles", Some(5), levi_oracles),
        ("plurisubharmonicity", Some(60), psh_certificates),
        ("complex points", Some(30), complex_points),
        ("retraction", Some(30), retraction),
        ("exhaustion", Some(60), exhaustion),
    ];
    let mut failed = 0;
    for (i, (name, budget, run)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let in_time = budget.is_none_or(|b| elapsed <= Duration::from_secs(b));
        let limit = budget.map_or(String::new(), |b| format!(" / {b} s"));
        let (pass, detail) = match outcome {
            Ok(d) if in_time => (true, d),
            Ok(d) => (false, format!("{d}; over the time budget")),
            Err(d) => (false, d),
        };
        failed += usize::from(!pass);
        println!(
            "criterion {:>2} {} {name}: {detail} [{:.2} s{limit}]",
            i + 1,
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64()
        );
    }
    println!("acceptance: {} of 10 criteria pass", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
