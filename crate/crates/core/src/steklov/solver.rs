use std::collections::VecDeque;

use log::{debug, info};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::fem::{Assembler, FemFunction};
use super::linalg::{dot, SkylineCholesky};
use super::mesh::TriMesh;
use crate::geometry::DomainParams;
use crate::{Error, Result};

/// Candidate first eigenpair.
#[derive(Clone, Debug, Serialize)]
pub struct SteklovSolution {
    pub lambda: f64,
    /// Lagrange multiplier `lambda p / q`.
    pub mu: f64,
    pub energy: f64,
    /// `B(u)^{1/q}`, equal to 1 up to rounding.
    pub boundary_norm: f64,
    pub residual: f64,
    pub iterations: usize,
    pub restarts: usize,
    pub converged: bool,
    pub reg_eps: f64,
    /// Nodal values.
    pub u: Vec<f64>,
}

impl SteklovSolution {
    pub fn dof(&self) -> usize {
        self.u.len()
    }

    pub fn function<'a>(&self, mesh: &'a TriMesh) -> FemFunction<'a> {
        FemFunction::new(mesh, self.u.clone())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverOptions {
    pub max_iter: usize,
    pub tol_rel: f64,
    pub reg_eps: f64,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            max_iter: 5000,
            tol_rel: 1e-8,
            reg_eps: 1e-8,
            restarts: 4,
            seed: 0,
        }
    }
}

/// `E(u) / B(u)^{p/q}` with the unregularized functionals.
pub fn rayleigh_quotient(mesh: &TriMesh, u: &FemFunction<'_>, params: &DomainParams) -> Result<f64> {
    let asm = Assembler::new(mesh, params)?;
    let b = asm.boundary(u.values());
    if !(b > 0.0) {
        return Err(Error::ZeroTrace);
    }
    Ok(asm.energy(u.values(), 0.0) / b.powf(params.p() / params.q()))
}

fn residual_of(asm: &Assembler, u: &[f64], reg_eps: f64) -> (f64, f64) {
    let f = asm.evaluate(u, reg_eps);
    let lambda = f.energy / f.boundary.powf(asm.p() / asm.q());
    let scale = f.energy.max(1.0);
    let r = f
        .grad_energy
        .iter()
        .zip(&f.grad_boundary)
        .fold(0.0f64, |m, (ge, gb)| m.max((ge / asm.p() - lambda * gb / asm.q()).abs()));
    (r / scale, lambda)
}

/// `max_i |dE/du_i / p - lambda dB/du_i / q| / max(1, E)`, the discrete weak
/// form tested against every nodal basis function.
pub fn weak_residual(mesh: &TriMesh, solution: &SteklovSolution, params: &DomainParams) -> Result<f64> {
    let asm = Assembler::new(mesh, params)?;
    let f = asm.evaluate(&solution.u, solution.reg_eps);
    let scale = f.energy.max(1.0);
    let (p, q, l) = (params.p(), params.q(), solution.lambda);
    Ok(f
        .grad_energy
        .iter()
        .zip(&f.grad_boundary)
        .fold(0.0f64, |m, (ge, gb)| m.max((ge / p - l * gb / q).abs()))
        / scale)
}

struct Problem<'a> {
    asm: &'a Assembler,
    reg_eps: f64,
}

/// A point of `S = {B = 1}` with its objective value and the gradient of
/// `u -> E(u / B(u)^{1/q})`.
struct State {
    u: Vec<f64>,
    energy: f64,
    grad: Vec<f64>,
    residual: f64,
}

impl Problem<'_> {
    /// Scales `u` onto `S` and evaluates; `None` if the trace vanishes.
    fn state(&self, mut u: Vec<f64>) -> Option<State> {
        let b = self.asm.boundary(&u);
        if !(b > 0.0) || !b.is_finite() {
            return None;
        }
        let s = b.powf(-1.0 / self.asm.q());
        u.iter_mut().for_each(|v| *v *= s);
        let f = self.asm.evaluate(&u, self.reg_eps);
        let (p, q) = (self.asm.p(), self.asm.q());
        let eu = dot(&f.grad_energy, &u);
        let grad: Vec<f64> = f
            .grad_energy
            .iter()
            .zip(&f.grad_boundary)
            .map(|(ge, gb)| ge - eu / q * gb)
            .collect();
        let lambda = f.energy / f.boundary.powf(p / q);
        let residual = f
            .grad_energy
            .iter()
            .zip(&f.grad_boundary)
            .fold(0.0f64, |m, (ge, gb)| m.max((ge / p - lambda * gb / q).abs()))
            / f.energy.max(1.0);
        Some(State {
            u,
            energy: f.energy,
            grad,
            residual,
        })
    }

    /// Factor of the energy Hessian at `u`, the initial inverse Hessian of
    /// the quasi-Newton recursion.
    fn precondition(&self, u: &[f64]) -> Result<SkylineCholesky> {
        SkylineCholesky::factor(&self.asm.energy_hessian(u, self.reg_eps))
    }

    /// L-BFGS two-loop recursion with `H_0 = precond^{-1}`; returns `-H g`.
    fn direction(
        &self,
        g: &[f64],
        precond: &SkylineCholesky,
        memory: &VecDeque<(Vec<f64>, Vec<f64>, f64)>,
    ) -> Vec<f64> {
        let mut r = g.to_vec();
        let mut alphas = Vec::with_capacity(memory.len());
        for (s, y, rho) in memory.iter().rev() {
            let a = rho * dot(s, &r);
            r.iter_mut().zip(y).for_each(|(ri, yi)| *ri -= a * yi);
            alphas.push(a);
        }
        let mut z = precond.solve(&r);
        for ((s, y, rho), a) in memory.iter().zip(alphas.iter().rev()) {
            let b = rho * dot(y, &z);
            z.iter_mut().zip(s).for_each(|(zi, si)| *zi += (a - b) * si);
        }
        z.iter_mut().for_each(|v| *v = -*v);
        z
    }
}

const MEMORY: usize = 8;
const ARMIJO_C1: f64 = 1e-4;
const MAX_HALVINGS: usize = 40;
const ROUNDING: f64 = 1e-13;

struct RunOutcome {
    state: State,
    iterations: usize,
    converged: bool,
}

fn descend(problem: &Problem<'_>, start: Vec<f64>, opts: &SolverOptions) -> Result<RunOutcome> {
    let mut state = problem.state(start).ok_or(Error::ZeroTrace)?;
    let mut memory: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::with_capacity(MEMORY);
    let mut converged = false;
    let mut iterations = 0;
    let quadratic = problem.asm.p() == 2.0;
    let mut precond = problem.precondition(&state.u)?;
    while iterations < opts.max_iter {
        iterations += 1;
        if !quadratic && iterations > 1 {
            precond = problem.precondition(&state.u)?;
        }
        let mut d = problem.direction(&state.grad, &precond, &memory);
        let mut slope = dot(&state.grad, &d);
        if !(slope < 0.0) {
            memory.clear();
            d = problem.direction(&state.grad, &precond, &memory);
            slope = dot(&state.grad, &d);
        }
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..MAX_HALVINGS {
            let trial: Vec<f64> = state.u.iter().zip(&d).map(|(u, d)| u + step * d).collect();
            if let Some(next) = problem.state(trial) {
                let armijo = next.energy <= state.energy + ARMIJO_C1 * step * slope;
                // below the rounding level of E only the residual can still improve
                let flat = (next.energy - state.energy).abs() <= ROUNDING * state.energy
                    && next.residual < state.residual;
                if armijo || flat {
                    accepted = Some(next);
                    break;
                }
            }
            step *= 0.5;
        }
        let Some(next) = accepted else {
            // no decrease is representable any more
            converged = state.residual < 10.0 * opts.tol_rel;
            if !converged && !memory.is_empty() {
                memory.clear();
                continue;
            }
            break;
        };
        let decrease = (state.energy - next.energy) / next.energy;
        let s: Vec<f64> = next.u.iter().zip(&state.u).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = next.grad.iter().zip(&state.grad).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-14 * dot(&s, &s).sqrt() * dot(&y, &y).sqrt() {
            if memory.len() == MEMORY {
                memory.pop_front();
            }
            memory.push_back((s, y, 1.0 / sy));
        }
        state = next;
        if iterations % 100 == 0 {
            debug!(
                "iteration {iterations}: lambda {:.12e}, residual {:.3e}",
                state.energy, state.residual
            );
        }
        if decrease < opts.tol_rel && state.residual < 10.0 * opts.tol_rel {
            converged = true;
            break;
        }
    }
    Ok(RunOutcome {
        state,
        iterations,
        converged,
    })
}

/// Minimizes the Rayleigh quotient `E(u) / B(u)^{p/q}` over `S = {B = 1}`.
///
/// Each restart descends from `1 + xi/2`, `xi` uniform on `[-1, 1]` per
/// vertex, seeded by `seed + k`. Directions come from limited-memory BFGS
/// whose initial inverse Hessian is the inverse of the energy Hessian at
/// the current iterate (the constant `2(K + M)` when `p = 2`, which turns
/// the first step into inverse iteration); trial points are scaled back to
/// `S` and accepted by Armijo backtracking. The smallest
/// value over all restarts is returned.
pub fn minimize_rayleigh(mesh: &TriMesh, params: &DomainParams, opts: &SolverOptions) -> Result<SteklovSolution> {
    minimize_rayleigh_from(mesh, params, opts, None)
}

/// As [`minimize_rayleigh`], with `initial` replacing the first random start.
pub fn minimize_rayleigh_from(
    mesh: &TriMesh,
    params: &DomainParams,
    opts: &SolverOptions,
    initial: Option<&[f64]>,
) -> Result<SteklovSolution> {
    if !(opts.tol_rel > 0.0) || opts.reg_eps < 0.0 || opts.max_iter == 0 {
        return Err(Error::InvalidArgument(
            "solver needs tol_rel > 0, reg_eps >= 0, max_iter > 0".into(),
        ));
    }
    let asm = Assembler::new(mesh, params)?;
    let problem = Problem {
        asm: &asm,
        reg_eps: opts.reg_eps,
    };
    let restarts = opts.restarts.max(1);
    let starts: Vec<Vec<f64>> = (0..restarts)
        .map(|k| match (k, initial) {
            (0, Some(u)) => u.to_vec(),
            _ => {
                let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(k as u64));
                (0..mesh.dof())
                    .map(|_| 1.0 + 0.5 * rng.random_range(-1.0..=1.0))
                    .collect()
            }
        })
        .collect();
    let runs: Vec<Result<RunOutcome>> = starts
        .into_par_iter()
        .map(|s| descend(&problem, s, opts))
        .collect();

    let mut best: Option<RunOutcome> = None;
    let mut last_err = None;
    for (k, run) in runs.into_iter().enumerate() {
        match run {
            Ok(r) => {
                info!(
                    "restart {k}: lambda {:.12e} after {} iterations (converged: {})",
                    r.state.energy, r.iterations, r.converged
                );
                if best.as_ref().is_none_or(|b| r.state.energy < b.state.energy) {
                    best = Some(r);
                }
            }
            Err(e) => last_err = Some(e),
        }
    }
    let Some(best) = best else {
        return Err(last_err.unwrap_or(Error::ZeroTrace));
    };
    let RunOutcome {
        state,
        iterations,
        converged,
    } = best;
    let mut u = state.u;
    if asm.boundary_moment(&u) < 0.0 {
        u.iter_mut().for_each(|v| *v = -*v);
    }
    let (residual, lambda) = residual_of(&asm, &u, opts.reg_eps);
    let b = asm.boundary(&u);
    let solution = SteklovSolution {
        lambda,
        mu: lambda * params.p() / params.q(),
        energy: state.energy,
        boundary_norm: b.powf(1.0 / params.q()),
        residual,
        iterations,
        restarts,
        converged,
        reg_eps: opts.reg_eps,
        u,
    };
    if converged {
        Ok(solution)
    } else {
        Err(Error::NotConverged {
            best: Box::new(solution),
        })
    }
}
