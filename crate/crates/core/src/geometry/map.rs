use super::{powr, DomainParams};
use crate::{Error, Result};

/// The straightening map `phi_a: Omega_n -> Omega_gamma`,
/// `y -> (y_1 y_n^{a alpha - 1}, ..., y_{n-1} y_n^{a alpha - 1}, y_n^a)`.
#[derive(Clone, Debug)]
pub struct CuspMap {
    params: DomainParams,
    a: f64,
    alpha: f64,
}

const SLACK: f64 = 1e-12;

impl CuspMap {
    /// The map with the sharp parameter `a = a_max = (n - p)/(gamma - p)`.
    pub fn sharp(params: &DomainParams) -> Self {
        let a = params.exponents().a_max;
        CuspMap {
            params: params.clone(),
            a,
            alpha: params.alpha(),
        }
    }

    /// Any `a > 0`. Values above `a_max` are representable so that the
    /// distortion estimates can reject them.
    pub fn with_parameter(params: &DomainParams, a: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::range("a", "0 < a"));
        }
        Ok(CuspMap {
            params: params.clone(),
            a,
            alpha: params.alpha(),
        })
    }

    pub fn params(&self) -> &DomainParams {
        &self.params
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn n(&self) -> usize {
        self.params.n()
    }

    fn check_model_point(&self, y: &[f64]) -> Result<f64> {
        let n = self.n();
        let outside = || Error::OutsideDomain { point: y.to_vec() };
        if y.len() != n {
            return Err(outside());
        }
        let yn = y[n - 1];
        if !(yn > 0.0 && yn <= 1.0 + SLACK) {
            return Err(outside());
        }
        let tol = SLACK * (1.0 + yn);
        if y[..n - 1].iter().any(|&yi| !(yi >= -tol && yi <= yn + tol)) {
            return Err(outside());
        }
        Ok(yn)
    }

    fn check_cusp_point(&self, x: &[f64]) -> Result<f64> {
        let n = self.n();
        let outside = || Error::OutsideDomain { point: x.to_vec() };
        if x.len() != n {
            return Err(outside());
        }
        let xn = x[n - 1];
        if !(xn > 0.0 && xn <= 1.0 + SLACK) {
            return Err(outside());
        }
        let width = powr(xn, self.alpha);
        let tol = SLACK * (1.0 + width);
        if x[..n - 1].iter().any(|&xi| !(xi >= -tol && xi <= width + tol)) {
            return Err(outside());
        }
        Ok(xn)
    }

    /// `phi_a(y)`. Accepts the closed model domain minus the tip.
    pub fn forward(&self, y: &[f64]) -> Result<Vec<f64>> {
        let yn = self.check_model_point(y)?;
        let n = self.n();
        let s = powr(yn, self.a * self.alpha - 1.0);
        let mut x: Vec<f64> = y[..n - 1].iter().map(|yi| yi * s).collect();
        x.push(powr(yn, self.a));
        Ok(x)
    }

    /// `phi_a^{-1}(x)`.
    pub fn inverse(&self, x: &[f64]) -> Result<Vec<f64>> {
        let xn = self.check_cusp_point(x)?;
        let n = self.n();
        let s = powr(xn, 1.0 / self.a - self.alpha);
        let mut y: Vec<f64> = x[..n - 1].iter().map(|xi| xi * s).collect();
        y.push(powr(xn, 1.0 / self.a));
        Ok(y)
    }

    /// `J(y, phi_a) = a y_n^{a gamma - n}`.
    pub fn jacobian_forward(&self, y: &[f64]) -> Result<f64> {
        let yn = self.check_model_point(y)?;
        Ok(self.a * powr(yn, self.a * self.params.gamma() - self.n() as f64))
    }

    /// `J(x, phi_a^{-1}) = x_n^{n/a - gamma} / a`.
    pub fn jacobian_inverse(&self, x: &[f64]) -> Result<f64> {
        let xn = self.check_cusp_point(x)?;
        Ok(powr(xn, self.n() as f64 / self.a - self.params.gamma()) / self.a)
    }

    /// Row-major Jacobi matrix `D phi_a(y)`.
    pub fn jacobi_matrix(&self, y: &[f64]) -> Result<Vec<f64>> {
        let yn = self.check_model_point(y)?;
        let n = self.n();
        let e = self.a * self.alpha - 1.0;
        let diag = powr(yn, e);
        let mut m = vec![0.0; n * n];
        for i in 0..n - 1 {
            m[i * n + i] = diag;
            m[i * n + n - 1] = e * y[i] * powr(yn, e - 1.0);
        }
        m[n * n - 1] = self.a * powr(yn, self.a - 1.0);
        Ok(m)
    }

    /// Spectral norm `|D phi_a(y)|`.
    ///
    /// `D phi_a = [c I, v; 0, d]`, so `D^T D` has the eigenvalue `c^2` with
    /// multiplicity `n - 2` and a 2x2 block on `span{v, e_n}` with trace
    /// `c^2 + |v|^2 + d^2` and determinant `c^2 d^2`.
    pub fn operator_norm(&self, y: &[f64]) -> Result<f64> {
        let yn = self.check_model_point(y)?;
        let n = self.n();
        let e = self.a * self.alpha - 1.0;
        let c2 = powr(yn, 2.0 * e);
        let d2 = self.a * self.a * powr(yn, 2.0 * self.a - 2.0);
        let ysq: f64 = y[..n - 1].iter().map(|v| v * v).sum();
        let v2 = e * e * ysq * powr(yn, 2.0 * e - 2.0);
        let disc = (c2 + v2 - d2).powi(2) + 4.0 * v2 * d2;
        Ok((0.5 * (c2 + v2 + d2 + disc.sqrt())).sqrt())
    }

    /// Same norm written in the reduced variables `y_i = t z_i`, `y_n = t`.
    pub(crate) fn operator_norm_reduced(&self, t: f64, zsq: f64) -> f64 {
        let e = self.a * self.alpha - 1.0;
        let c2 = powr(t, 2.0 * e);
        let d2 = self.a * self.a * powr(t, 2.0 * self.a - 2.0);
        let v2 = e * e * zsq * powr(t, 2.0 * e);
        let disc = (c2 + v2 - d2).powi(2) + 4.0 * v2 * d2;
        (0.5 * (c2 + v2 + d2 + disc.sqrt())).sqrt()
    }
}
