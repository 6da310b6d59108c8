use log::{info, warn};
use ncusp::embedding_lab::{scaling_slopes, sharpness_scan, ScanRow};
use ncusp::geometry::{
    derived_exponents, jacobian_suite, validate_params, CuspMap, DomainParams, RawParams, Usage,
};
use ncusp::operators::{
    area_formula_check, change_of_variables_check, embedding_ranges, k_pp_estimate, AreaCheck, ModelBox,
};
use ncusp::quadrature::{volume_integral, GradedRule, VolumeIntegrand};
use ncusp::steklov::{
    generate_cusp_mesh, linear_oracle, minimize_rayleigh, trace_constant, weak_residual, Assembler, SteklovSolution,
    TriMesh,
};
use ncusp::Error;
use serde::Serialize;
use serde_json::json;

use crate::artifacts::{num, OutDir};
use crate::config::RunConfig;
use crate::error::CliError;

fn params(config: &RunConfig, usage: Usage) -> Result<DomainParams, CliError> {
    Ok(validate_params(&config.params, usage)?)
}

/// Writes the resolved `theta` back into the config so artifacts record it.
fn resolve_theta(config: &mut RunConfig, params: &DomainParams) {
    config.params.theta = Some(params.theta());
}

pub fn exponents(mut config: RunConfig) -> Result<(), CliError> {
    let p = params(&config, Usage::Geometry)?;
    resolve_theta(&mut config, &p);
    let e = derived_exponents(&p);
    let ranges = embedding_ranges(&p);
    let out = OutDir::create(&config)?;
    out.json(
        "exponents.json",
        &json!({
            "exponents": e,
            "theta_min_at_q": e.theta_min(p.q()),
            "theta_min_at_p_star": e.theta_min(e.p_star),
            "ranges": ranges,
        }),
    )?;
    println!(
        "alpha={} a_max={} beta={} p*={} r_max={} d_gamma={}",
        e.alpha, e.a_max, e.beta, e.p_star, e.r_max, e.d_gamma
    );
    Ok(())
}

#[derive(Serialize)]
struct NamedCheck<T> {
    name: &'static str,
    #[serde(flatten)]
    check: T,
}

pub fn verify_geometry(mut config: RunConfig) -> Result<(), CliError> {
    let p = params(&config, Usage::Geometry)?;
    resolve_theta(&mut config, &p);
    let map = match config.geometry.map_parameter {
        Some(a) => CuspMap::with_parameter(&p, a)?,
        None => CuspMap::sharp(&p),
    };
    let rule = GradedRule::default_rule();
    let suite = jacobian_suite(&map, config.geometry.samples)?;
    let kpp = k_pp_estimate(&map, config.geometry.samples)?;
    let volume = volume_integral(VolumeIntegrand::Height(&|_| 1.0), &p, &rule)?;
    let volume_error = (volume * p.gamma() - 1.0).abs();

    let n = p.n();
    let probes: [(&'static str, Box<dyn Fn(&[f64]) -> f64>); 3] = [
        ("one", Box::new(|_| 1.0)),
        ("y_n", Box::new(move |y| y[n - 1])),
        ("y_1", Box::new(|y| y[0])),
    ];
    let mut area = Vec::new();
    let mut chv = Vec::new();
    for (name, g) in &probes {
        let check: AreaCheck = area_formula_check(g.as_ref(), &map, &rule)?;
        area.push(NamedCheck { name, check });
        let d = change_of_variables_check(g.as_ref(), &map, &ModelBox::full(n), &rule)?;
        chv.push(json!({ "name": name, "discrepancy": d }));
    }
    let passed = suite.passes()
        && kpp.sampled <= kpp.analytic_bound * (1.0 + 1e-12)
        && volume_error < 1e-8
        && area.iter().all(|c| c.check.discrepancy < 1e-6);
    let out = OutDir::create(&config)?;
    out.json(
        "geometry.json",
        &json!({
            "map_parameter": map.a(),
            "jacobian": suite,
            "k_pp": kpp,
            "volume": { "value": volume, "expected": 1.0 / p.gamma(), "relative_error": volume_error },
            "area_formula": area,
            "change_of_variables": chv,
            "passed": passed,
        }),
    )?;
    if passed {
        println!("geometry checks passed");
    } else {
        warn!("geometry checks failed; see geometry.json");
        println!("geometry checks FAILED");
    }
    Ok(())
}

pub fn scaling(mut config: RunConfig) -> Result<(), CliError> {
    let p = params(&config, Usage::Geometry)?;
    resolve_theta(&mut config, &p);
    let sc = &config.scaling;
    let r = scaling_slopes(&p, p.theta(), p.q(), &sc.eps_grid, sc.cutoff)?;
    let scan: Vec<ScanRow> = if sc.theta_grid.is_empty() {
        Vec::new()
    } else {
        sharpness_scan(&p, p.q(), &sc.theta_grid, sc.cutoff)?
    };
    let out = OutDir::create(&config)?;
    let rows: Vec<Vec<String>> = r
        .eps_grid
        .iter()
        .zip(r.lhs_norms.iter().zip(&r.rhs_norms))
        .map(|(e, (l, h))| vec![num(*e), num(*l), num(*h), num(l / h)])
        .collect();
    out.csv("scaling.csv", &["eps", "lhs_norm", "rhs_norm", "ratio"], &rows)?;
    if !scan.is_empty() {
        let rows: Vec<Vec<String>> = scan
            .iter()
            .map(|s| {
                let sign = match s.sign_agrees {
                    Some(true) => "agree",
                    Some(false) => "disagree",
                    None => "near",
                };
                vec![num(s.theta), num(s.slope_gap), num(s.distance), sign.to_string()]
            })
            .collect();
        out.csv("sharpness.csv", &["theta", "slope_gap", "distance", "sign"], &rows)?;
    }
    out.json(
        "scaling.json",
        &json!({
            "lhs_slope": r.lhs_slope,
            "rhs_slope": r.rhs_slope,
            "predicted_lhs": r.predicted_lhs,
            "predicted_rhs": r.predicted_rhs,
            "theta_min": derived_exponents(&p).theta_min(p.q()),
            "sharpness": scan,
        }),
    )?;
    println!(
        "lhs slope {:.4} (predicted {:.4}), rhs slope {:.4} (predicted {:.4})",
        r.lhs_slope, r.predicted_lhs, r.rhs_slope, r.predicted_rhs
    );
    Ok(())
}

/// Steklov parameters. The quadratic case `n = p = q = 2` lies outside the
/// validated range `p < n`; it is accepted here as the linear problem, with
/// `theta` required unless in simplex mode.
fn steklov_params(config: &RunConfig) -> Result<DomainParams, CliError> {
    let raw = &config.params;
    if is_quadratic(raw) {
        let theta = match (raw.theta, raw.simplex) {
            (Some(t), _) => t,
            (None, true) => 0.0,
            (None, false) => {
                return Err(CliError::Config("p = q = 2 needs an explicit theta".into()));
            }
        };
        let geometry = RawParams {
            p: 1.5,
            q: 1.5,
            theta: Some(theta),
            ..raw.clone()
        };
        return Ok(validate_params(&geometry, Usage::Geometry)?.with_exponents(2.0, 2.0));
    }
    params(config, Usage::Steklov)
}

fn is_quadratic(raw: &RawParams) -> bool {
    raw.n == 2 && raw.p == 2.0 && raw.q == 2.0
}

fn mesh_for(config: &RunConfig, p: &DomainParams) -> Result<TriMesh, CliError> {
    Ok(generate_cusp_mesh(p, config.mesh.levels, config.mesh.grading_ratio)?)
}

fn solve_or_best(mesh: &TriMesh, p: &DomainParams, config: &RunConfig) -> Result<SteklovSolution, CliError> {
    match minimize_rayleigh(mesh, p, &config.solver) {
        Ok(s) => Ok(s),
        Err(Error::NotConverged { best }) => Ok(*best),
        Err(e) => Err(e.into()),
    }
}

pub fn solve(mut config: RunConfig) -> Result<(), CliError> {
    let p = steklov_params(&config)?;
    resolve_theta(&mut config, &p);
    let mesh = mesh_for(&config, &p)?;
    info!("mesh: {} vertices, {} triangles", mesh.dof(), mesh.triangles().len());
    let sol = solve_or_best(&mesh, &p, &config)?;
    let residual = weak_residual(&mesh, &sol, &p)?;

    let reference = if config.solve.compare_simplex {
        let raw = RawParams::simplex(2, p.p(), p.q());
        let lip = validate_params(&raw, Usage::Geometry)?.with_exponents(p.p(), p.q());
        let lip_mesh = mesh_for(&config, &lip)?;
        let s = solve_or_best(&lip_mesh, &lip, &config)?;
        Some(s.lambda.powf(-1.0 / p.p()))
    } else {
        None
    };
    let trace = trace_constant(sol.lambda, &p, reference);

    let out = OutDir::create(&config)?;
    out.json(
        "solution.json",
        &json!({
            "lambda": sol.lambda,
            "mu": sol.mu,
            "energy": sol.energy,
            "boundary_norm": sol.boundary_norm,
            "residual": residual,
            "iterations": sol.iterations,
            "restarts": sol.restarts,
            "dof": sol.dof(),
            "converged": sol.converged,
            "params": p,
            "trace": trace,
            "simplex_c_tr": reference,
        }),
    )?;
    out.csv(
        "solve.csv",
        &["lambda", "mu", "energy", "boundary_norm", "residual", "iters", "dof"],
        &[vec![
            num(sol.lambda),
            num(sol.mu),
            num(sol.energy),
            num(sol.boundary_norm),
            num(residual),
            sol.iterations.to_string(),
            sol.dof().to_string(),
        ]],
    )?;
    let rows: Vec<Vec<String>> = mesh
        .vertices()
        .iter()
        .zip(&sol.u)
        .enumerate()
        .map(|(i, (v, u))| vec![i.to_string(), num(v[0]), num(v[1]), num(*u)])
        .collect();
    out.csv("nodal.csv", &["vertex_index", "x1", "x2", "u"], &rows)?;
    println!("lambda = {} (residual {:e}, {} dof)", sol.lambda, residual, sol.dof());
    if sol.converged {
        Ok(())
    } else {
        Err(CliError::NotConverged)
    }
}

pub fn oracle_check(mut config: RunConfig) -> Result<(), CliError> {
    let p = if is_quadratic(&config.params) {
        steklov_params(&config)?
    } else {
        params(&config, Usage::Geometry)?.with_exponents(2.0, 2.0)
    };
    resolve_theta(&mut config, &p);
    let mesh = mesh_for(&config, &p)?;
    let oracle = linear_oracle(&mesh, p.theta())?;
    let sol = solve_or_best(&mesh, &p, &config)?;
    let residual = weak_residual(&mesh, &sol, &p)?;
    let energy = Assembler::new(&mesh, &p)?.energy(&sol.u, 0.0);
    let rel = (sol.lambda - oracle.lambda).abs() / oracle.lambda;
    let lagrange = (sol.lambda - energy).abs() / energy.max(1.0);
    let passed = sol.converged && rel < 1e-6 && residual < 1e-8 && lagrange < 1e-8;
    let out = OutDir::create(&config)?;
    out.json(
        "oracle.json",
        &json!({
            "theta": p.theta(),
            "dof": mesh.dof(),
            "lambda_oracle": oracle.lambda,
            "oracle_iterations": oracle.iterations,
            "lambda_descent": sol.lambda,
            "descent_iterations": sol.iterations,
            "relative_difference": rel,
            "residual": residual,
            "lagrange_gap": lagrange,
            "converged": sol.converged,
            "passed": passed,
        }),
    )?;
    println!("oracle {} descent {} (rel {:e})", oracle.lambda, sol.lambda, rel);
    if sol.converged {
        Ok(())
    } else {
        Err(CliError::NotConverged)
    }
}

pub fn mesh(mut config: RunConfig) -> Result<(), CliError> {
    let p = params(&config, Usage::Geometry)?;
    resolve_theta(&mut config, &p);
    let mesh = mesh_for(&config, &p)?;
    let out = OutDir::create(&config)?;
    out.text_after_header("mesh.txt", &mesh.to_text())?;
    out.json(
        "mesh.json",
        &json!({
            "vertices": mesh.dof(),
            "triangles": mesh.triangles().len(),
            "boundary_edges": mesh.boundary_edges().len(),
            "area": mesh.area(),
            "min_quality": mesh.min_quality(),
            "tip_height": mesh.tip_height(),
        }),
    )?;
    println!("{} vertices, {} triangles", mesh.dof(), mesh.triangles().len());
    Ok(())
}
