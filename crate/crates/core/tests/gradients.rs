//! Analytic gradients of the discrete functionals against central
//! differences.

mod common;

use ncusp::geometry::{validate_params, RawParams, Usage};
use ncusp::steklov::{assemble_functionals, generate_cusp_mesh, Assembler, FemFunction};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const STEP: f64 = 1e-6;
const REG: f64 = 1e-8;

fn max_rel_error(p: f64, q: f64, levels: usize, seed: u64) -> (f64, f64) {
    let params = validate_params(&RawParams::new(2, 1.5, 3.0, 2.0), Usage::Geometry)
        .unwrap()
        .with_exponents(p, q);
    let mesh = generate_cusp_mesh(&params, levels, 0.5).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u: Vec<f64> = (0..mesh.dof()).map(|_| rng.random_range(-1.0..1.0)).collect();
    let f = assemble_functionals(&mesh, &FemFunction::new(&mesh, u.clone()), &params, REG).unwrap();
    let asm = Assembler::new(&mesh, &params).unwrap();
    let (mut ge, mut gb) = (vec![0.0; u.len()], vec![0.0; u.len()]);
    for i in 0..u.len() {
        let (mut up, mut um) = (u.clone(), u.clone());
        up[i] += STEP;
        um[i] -= STEP;
        ge[i] = (asm.energy(&up, REG) - asm.energy(&um, REG)) / (2.0 * STEP);
        gb[i] = (asm.boundary(&up) - asm.boundary(&um)) / (2.0 * STEP);
    }
    let err = |a: &[f64], b: &[f64]| {
        let scale = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs())) / scale
    };
    (err(&ge, &f.grad_energy), err(&gb, &f.grad_boundary))
}

#[test]
fn twenty_random_states() {
    for k in 0..20u64 {
        let p = if k % 2 == 0 { 1.5 } else { 2.0 };
        let levels = 3 + (k as usize % 3);
        let (e, b) = max_rel_error(p, 2.0, levels, k);
        assert!(e < 1e-5 && b < 1e-5, "state {k}: p = {p}, energy {e:e}, boundary {b:e}");
    }
}
