//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.

use std::path::Path;
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use ncusp::embedding_lab::{default_eps_grid, scaling_slopes, sharpness_scan, Cutoff};
use ncusp::geometry::{derived_exponents, jacobian_suite, validate_params, CuspMap, DomainParams, RawParams, Usage};
use ncusp::operators::area_formula_check;
use ncusp::quadrature::{volume_integral, GradedRule, VolumeIntegrand};
use ncusp::sampling::halton;
use ncusp::steklov::{
    generate_cusp_mesh, linear_oracle, minimize_rayleigh, weak_residual, Assembler, SolverOptions, SteklovSolution,
    TriMesh,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn valid(raw: RawParams, usage: Usage) -> DomainParams {
    validate_params(&raw, usage).expect("reference parameters are valid")
}

fn p1() -> DomainParams {
    valid(RawParams::new(2, 1.5, 3.0, 2.0), Usage::Geometry)
}

fn p2() -> DomainParams {
    valid(RawParams::new(3, 2.0, 4.0, 3.0), Usage::Geometry)
}

fn simplex() -> DomainParams {
    valid(RawParams::simplex(2, 1.5, 2.0), Usage::Geometry)
}

fn solve(mesh: &TriMesh, params: &DomainParams) -> Result<SteklovSolution, String> {
    minimize_rayleigh(mesh, params, &SolverOptions::default()).map_err(|e| e.to_string())
}

fn exponent_identities() -> Outcome {
    let mut worst = (0.0f64, 0.0f64);
    for i in 0..1000u64 {
        let u = halton(i, 4);
        let n = 2 + (u[0] * 3.0) as usize;
        let nf = n as f64;
        let p = 1.0 + (0.01 + 0.98 * u[1]) * (nf - 1.0);
        let gamma = nf + 0.01 + 8.0 * u[2];
        let p_star = p * (nf - 1.0) / (nf - p);
        let q = 1.0 + (0.01 + 0.98 * u[3]) * (p_star - 1.0);
        let params = validate_params(&RawParams::new(n, p, gamma, q), Usage::Trace).map_err(|e| e.to_string())?;
        let e = derived_exponents(&params);
        let scale = |v: f64| 1.0 + v.abs();
        worst.0 = worst.0.max((e.theta_min(e.p_star) - e.beta).abs() / scale(e.beta));
        worst.1 = worst.1.max((p * e.d_gamma / (nf - p) - e.r_max).abs() / scale(e.r_max));
    }
    check(
        worst.0 < 1e-12 && worst.1 < 1e-12,
        format!("max |theta_min(p*) - beta| {:.1e}, max |p d/(n-p) - r_max| {:.1e}", worst.0, worst.1),
    )
}

fn jacobian_suites() -> Outcome {
    let mut details = Vec::new();
    let mut ok = true;
    for (name, params) in [("P1", p1()), ("P2", p2()), ("simplex", simplex())] {
        let s = jacobian_suite(&CuspMap::sharp(&params), 10_000).map_err(|e| e.to_string())?;
        ok &= s.passes();
        details.push(format!(
            "{name}: roundtrip {:.1e}, reciprocity {:.1e}, fd {:.1e}, sandwich violations {}",
            s.roundtrip, s.reciprocity, s.finite_difference, s.sandwich_violations
        ));
    }
    check(ok, details.join("; "))
}

fn measure_identities() -> Outcome {
    let rule = GradedRule::default_rule();
    let mut worst_volume = 0.0f64;
    for params in [p1(), p2(), simplex()] {
        let v = volume_integral(VolumeIntegrand::Height(&|_| 1.0), &params, &rule).map_err(|e| e.to_string())?;
        worst_volume = worst_volume.max((v * params.gamma() - 1.0).abs());
    }
    let map = CuspMap::sharp(&p1());
    let probes: [&dyn Fn(&[f64]) -> f64; 3] = [&|_| 1.0, &|y| y[1], &|y| y[0]];
    let mut worst_area = 0.0f64;
    for g in probes {
        let c = area_formula_check(g, &map, &rule).map_err(|e| e.to_string())?;
        worst_area = worst_area.max(c.discrepancy);
    }
    check(
        worst_volume < 1e-8 && worst_area < 1e-6,
        format!("volume rel err {worst_volume:.1e}, area formula discrepancy {worst_area:.1e}"),
    )
}

fn sharpness_scaling() -> Outcome {
    let grid = default_eps_grid();
    let mut worst = 0.0f64;
    let mut sharp_gap = 0.0f64;
    let mut signs_ok = true;
    for (params, scan_q) in [(p1(), 2.0), (p2(), 3.0)] {
        let e = derived_exponents(&params);
        for theta in [e.beta - 0.5, e.beta, e.beta + 0.5] {
            let r = scaling_slopes(&params, theta, e.p_star, &grid, Cutoff::Cubic).map_err(|e| e.to_string())?;
            worst = worst
                .max((r.lhs_slope - r.predicted_lhs).abs())
                .max((r.rhs_slope - r.predicted_rhs).abs());
            if theta == e.beta {
                sharp_gap = sharp_gap.max((r.lhs_slope - r.rhs_slope).abs());
            }
        }
        let tm = e.theta_min(scan_q);
        let rows = sharpness_scan(&params, scan_q, &[tm - 0.5, tm - 0.1, tm - 0.05, tm, tm + 0.05, tm + 0.1, tm + 0.5], Cutoff::Cubic)
            .map_err(|e| e.to_string())?;
        signs_ok &= rows.iter().all(|r| r.sign_agrees != Some(false));
    }
    check(
        worst < 0.02 && sharp_gap < 0.02 && signs_ok,
        format!("max slope deviation {worst:.4}, sharp-case gap {sharp_gap:.4}, scan signs agree: {signs_ok}"),
    )
}

fn oracle_equivalence() -> Outcome {
    let base = p1();
    let mut details = Vec::new();
    let mut ok = true;
    for theta in [0.0, base.theta()] {
        let params = base.with_theta(theta).with_exponents(2.0, 2.0);
        let mesh = generate_cusp_mesh(&params, 10, 0.5).map_err(|e| e.to_string())?;
        let oracle = linear_oracle(&mesh, theta).map_err(|e| e.to_string())?;
        let sol = solve(&mesh, &params)?;
        let residual = weak_residual(&mesh, &sol, &params).map_err(|e| e.to_string())?;
        let energy = Assembler::new(&mesh, &params).map_err(|e| e.to_string())?.energy(&sol.u, 0.0);
        let rel = (sol.lambda - oracle.lambda).abs() / oracle.lambda;
        let lagrange = (sol.lambda - energy).abs() / energy.max(1.0);
        ok &= rel < 1e-6 && residual < 1e-8 && lagrange < 1e-8;
        details.push(format!(
            "theta={theta}: {} dof, rel {rel:.1e}, residual {residual:.1e}, lagrange {lagrange:.1e}",
            mesh.dof()
        ));
    }
    check(ok, details.join("; "))
}

fn gradient_checks() -> Outcome {
    const STEP: f64 = 1e-6;
    const REG: f64 = 1e-8;
    let mut worst = 0.0f64;
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for k in 0..20 {
        let p = if k % 2 == 0 { 1.5 } else { 2.0 };
        let params = p1().with_exponents(p, 2.0);
        let mesh = generate_cusp_mesh(&params, 3 + k % 3, 0.5).map_err(|e| e.to_string())?;
        let asm = Assembler::new(&mesh, &params).map_err(|e| e.to_string())?;
        let u: Vec<f64> = (0..mesh.dof()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let f = asm.evaluate(&u, REG);
        let scale_e = f.grad_energy.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let scale_b = f.grad_boundary.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let boundary_nodes: Vec<usize> = mesh.boundary_edges().iter().map(|e| e.v[0]).collect();
        let mut nodes: Vec<usize> = (0..25).map(|_| rng.random_range(0..mesh.dof())).collect();
        nodes.extend((0..15).map(|_| boundary_nodes[rng.random_range(0..boundary_nodes.len())]));
        for i in nodes {
            let (mut up, mut um) = (u.clone(), u.clone());
            up[i] += STEP;
            um[i] -= STEP;
            let fe = (asm.energy(&up, REG) - asm.energy(&um, REG)) / (2.0 * STEP);
            let fb = (asm.boundary(&up) - asm.boundary(&um)) / (2.0 * STEP);
            worst = worst
                .max((fe - f.grad_energy[i]).abs() / scale_e)
                .max((fb - f.grad_boundary[i]).abs() / scale_b);
        }
    }
    check(worst < 1e-5, format!("max relative gradient error {worst:.1e} over 20 states"))
}

fn trace_bound() -> Outcome {
    const LEVELS: usize = 8;
    let mut details = Vec::new();
    let mut ok = true;
    for (n, p, gamma, q) in [(2, 1.5, 3.0, 2.0), (2, 1.25, 2.5, 1.6)] {
        let cusp = valid(RawParams::new(n, p, gamma, q), Usage::Steklov);
        let lip = valid(RawParams::simplex(n, p, q), Usage::Steklov);
        let c_cusp = solve(&generate_cusp_mesh(&cusp, LEVELS, 0.5).map_err(|e| e.to_string())?, &cusp)?
            .lambda
            .powf(-1.0 / p);
        let c_lip = solve(&generate_cusp_mesh(&lip, LEVELS, 0.5).map_err(|e| e.to_string())?, &lip)?
            .lambda
            .powf(-1.0 / p);
        let factor = ncusp::steklov::bound_factor(&cusp);
        let ratio = c_cusp / (factor * c_lip);
        ok &= ratio <= 1.05;
        details.push(format!("(p={p}, gamma={gamma}, q={q}): C_tr / (factor C_simplex) = {ratio:.3}, factor {factor:.5}"));
    }
    check(ok, details.join("; "))
}

fn refinement_stability() -> Outcome {
    let params = valid(RawParams::new(2, 1.5, 3.0, 2.0), Usage::Steklov);
    let mut lambdas = Vec::new();
    for levels in [6, 8, 10] {
        let mesh = generate_cusp_mesh(&params, levels, 0.5).map_err(|e| e.to_string())?;
        lambdas.push(solve(&mesh, &params)?.lambda);
    }
    let (d1, d2) = ((lambdas[1] - lambdas[0]).abs(), (lambdas[2] - lambdas[1]).abs());
    check(d2 < d1, format!("lambda {lambdas:.6?}, differences {d1:.2e} then {d2:.2e}"))
}

fn read_dir_sorted(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .expect("output directory")
        .map(|e| {
            let e = e.expect("directory entry");
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).expect("artifact"))
        })
        .collect();
    files.sort();
    files
}

fn cli_reproducibility() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let config = tmp.path().join("run.json");
    std::fs::write(
        &config,
        r#"{"params": {"n": 2, "p": 1.5, "gamma": 3, "q": 2}, "mesh": {"levels": 6}, "scaling": {"theta_grid": [0.5, 1.0, 1.5]}}"#,
    )
    .map_err(|e| e.to_string())?;
    let mut runs = Vec::new();
    for run in ["a", "b"] {
        let out = tmp.path().join(run);
        for cmd in ["exponents", "scaling", "solve", "mesh"] {
            let status = Command::new(env!("CARGO_BIN_EXE_ncusp"))
                .args([cmd, "--threads", "1", "--seed", "5", "--config"])
                .arg(&config)
                .arg("--out")
                .arg(&out)
                .env("NCUSP_LOG", "quiet")
                .stdout(Stdio::null())
                .status()
                .map_err(|e| e.to_string())?;
            if !status.success() {
                return Err(format!("`ncusp {cmd}` exited with {status}"));
            }
        }
        runs.push(read_dir_sorted(&out));
    }
    // the resolved config records its own output directory; compare the
    // artifacts with that path normalized
    let normalize = |files: &[(String, Vec<u8>)], run: &str| -> Vec<(String, String)> {
        let dir = tmp.path().join(run).to_string_lossy().into_owned();
        files
            .iter()
            .map(|(n, b)| (n.clone(), String::from_utf8_lossy(b).replace(&dir, "OUT")))
            .collect()
    };
    let (a, b) = (normalize(&runs[0], "a"), normalize(&runs[1], "b"));
    let names: Vec<&str> = a.iter().map(|(n, _)| n.as_str()).collect();
    check(a == b && a.len() >= 8, format!("{} artifacts identical: {}", a.len(), names.join(", ")))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, Duration); 9] = [
        ("exponent identities", exponent_identities, Duration::from_secs(1)),
        ("jacobian suite", jacobian_suites, Duration::from_secs(5)),
        ("measure identities", measure_identities, Duration::from_secs(5)),
        ("sharpness scaling", sharpness_scaling, Duration::from_secs(10)),
        ("steklov oracle equivalence", oracle_equivalence, Duration::from_secs(60)),
        ("gradient checks", gradient_checks, Duration::from_secs(10)),
        ("trace-constant bound", trace_bound, Duration::from_secs(120)),
        ("refinement stability", refinement_stability, Duration::from_secs(120)),
        ("cli reproducibility", cli_reproducibility, Duration::from_secs(60)),
    ];
    let mut failed = 0;
    for (i, (name, run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let over = elapsed > *budget;
        let (status, detail) = match &outcome {
            Ok(d) if !over => ("PASS", d.clone()),
            Ok(d) => ("FAIL", format!("{d}; over the {budget:?} budget")),
            Err(d) => ("FAIL", d.clone()),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!("criterion {}: {status} {name} [{:.2}s] {detail}", i + 1, elapsed.as_secs_f64());
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
