use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Unvalidated parameter tuple, as read from a config file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawParams {
    pub n: usize,
    pub p: f64,
    pub gamma: f64,
    pub q: f64,
    #[serde(default)]
    pub theta: Option<f64>,
    #[serde(default)]
    pub simplex: bool,
}

impl RawParams {
    pub fn new(n: usize, p: f64, gamma: f64, q: f64) -> Self {
        RawParams {
            n,
            p,
            gamma,
            q,
            theta: None,
            simplex: false,
        }
    }

    /// The Lipschitz model domain `gamma = n` with the simplex flag set.
    pub fn simplex(n: usize, p: f64, q: f64) -> Self {
        RawParams {
            n,
            p,
            gamma: n as f64,
            q,
            theta: None,
            simplex: true,
        }
    }

    pub fn with_theta(mut self, theta: f64) -> Self {
        self.theta = Some(theta);
        self
    }
}

/// Which range of the boundary exponent `q` the caller needs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Usage {
    /// Only `(n, p, gamma)` matter; `q` must merely exceed 1.
    Geometry,
    /// Trace inequalities: `1 < q <= p*`.
    Trace,
    /// The Steklov eigenvalue problem: `p < q < p*`.
    Steklov,
}

/// A validated problem instance `(n, gamma, p, q, theta)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DomainParams {
    n: usize,
    p: f64,
    gamma: f64,
    q: f64,
    theta: Option<f64>,
    simplex: bool,
}

/// Checks the strict inequalities `1 < p < n < gamma` and the `q` range
/// demanded by `usage`.
pub fn validate_params(raw: &RawParams, usage: Usage) -> Result<DomainParams> {
    let RawParams {
        n,
        p,
        gamma,
        q,
        theta,
        simplex,
    } = *raw;
    for (field, v) in [("p", p), ("gamma", gamma), ("q", q)] {
        if !v.is_finite() {
            return Err(Error::range(field, "finite value"));
        }
    }
    if let Some(t) = theta {
        if !t.is_finite() {
            return Err(Error::range("theta", "finite value"));
        }
    }
    if n < 2 {
        return Err(Error::range("n", "n >= 2"));
    }
    let nf = n as f64;
    if p <= 1.0 {
        return Err(Error::range("p", "1 < p"));
    }
    if p >= nf {
        return Err(Error::range("p", format!("p < n = {n}")));
    }
    if simplex {
        if gamma != nf {
            return Err(Error::range("gamma", format!("gamma = n = {n} in simplex mode")));
        }
    } else if gamma == nf {
        return Err(Error::SimplexModeRequired);
    } else if gamma < nf {
        return Err(Error::range("gamma", format!("n = {n} < gamma")));
    }
    let p_star = p * (nf - 1.0) / (nf - p);
    match usage {
        Usage::Geometry => {
            if q <= 1.0 {
                return Err(Error::range("q", "1 < q"));
            }
        }
        Usage::Trace => {
            if q <= 1.0 || q > p_star {
                return Err(Error::range("q", format!("1 < q <= p(n-1)/(n-p) = {p_star}")));
            }
        }
        Usage::Steklov => {
            if q <= p || q >= p_star {
                return Err(Error::range(
                    "q",
                    format!("p = {p} < q < p(n-1)/(n-p) = {p_star}"),
                ));
            }
        }
    }
    Ok(DomainParams {
        n,
        p,
        gamma,
        q,
        theta,
        simplex,
    })
}

impl DomainParams {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn is_simplex(&self) -> bool {
        self.simplex
    }

    /// Boundary weight exponent; the sharp exponent `beta` unless overridden.
    pub fn theta(&self) -> f64 {
        self.theta.unwrap_or_else(|| self.exponents().beta)
    }

    pub fn alpha(&self) -> f64 {
        (self.gamma - 1.0) / (self.n as f64 - 1.0)
    }

    pub fn exponents(&self) -> ExponentSet {
        derived_exponents(self)
    }

    pub fn with_theta(&self, theta: f64) -> Self {
        DomainParams {
            theta: Some(theta),
            ..self.clone()
        }
    }

    pub fn with_q(&self, q: f64) -> Self {
        DomainParams { q, ..self.clone() }
    }

    /// Replaces the exponents of the eigenvalue problem while keeping the
    /// domain and the resolved weight. No range check is applied, so this
    /// also reaches the quadratic case `p = q = 2` used for comparisons with
    /// the linear oracle.
    pub fn with_exponents(&self, p: f64, q: f64) -> Self {
        DomainParams {
            p,
            q,
            theta: Some(self.theta()),
            ..self.clone()
        }
    }

    pub fn raw(&self) -> RawParams {
        RawParams {
            n: self.n,
            p: self.p,
            gamma: self.gamma,
            q: self.q,
            theta: self.theta,
            simplex: self.simplex,
        }
    }
}

/// Every exponent derived from `(n, p, gamma)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExponentSet {
    pub n: usize,
    pub p: f64,
    pub alpha: f64,
    pub a_max: f64,
    pub beta: f64,
    pub p_star: f64,
    pub r_max: f64,
    pub d_gamma: f64,
    pub gv_q_min: f64,
}

pub fn derived_exponents(params: &DomainParams) -> ExponentSet {
    let n = params.n as f64;
    let p = params.p;
    let g = params.gamma;
    ExponentSet {
        n: params.n,
        p,
        alpha: (g - 1.0) / (n - 1.0),
        a_max: (n - p) / (g - p),
        beta: (g - n) * (1.0 + p * (n - 2.0)) / ((n - p) * (n - 1.0)),
        p_star: p * (n - 1.0) / (n - p),
        r_max: p * (1.0 + (n - 2.0) * g) / ((g - p) * (n - 1.0)),
        d_gamma: (n - p) * (g * n - 2.0 * g + 1.0) / ((g - p) * (n - 1.0)),
        gv_q_min: p * (n - 1.0) * (g - p) / (g * (n - p)),
    }
}

impl ExponentSet {
    /// Smallest power-weight exponent compatible with a bounded trace into
    /// `L^q(x_n^theta)`.
    pub fn theta_min(&self, q: f64) -> f64 {
        let n = self.n as f64;
        q / self.p * (self.alpha * (n - 1.0) + 1.0 - self.p) - self.alpha * (n - 2.0) - 1.0
    }

    /// Exponent of the weight `x_n^{(n-1)/a - (n-2) alpha - 1}` produced by
    /// the map with parameter `a`.
    pub fn weight_exponent(&self, a: f64) -> f64 {
        let n = self.n as f64;
        (n - 1.0) / a - (n - 2.0) * self.alpha - 1.0
    }

    /// `alpha (n - 2) + 1`, the reduced dimension of a boundary face.
    pub fn face_exponent(&self) -> f64 {
        self.alpha * (self.n as f64 - 2.0) + 1.0
    }

    /// Least `q` for which the Hölder step `L^q(w) -> L^r` closes.
    pub fn holder_q_min(&self, r: f64) -> f64 {
        r * (1.0 + self.beta / self.face_exponent())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12 * (1.0 + b.abs())
    }

    #[test]
    fn accepts_reference_tuple() {
        assert!(validate_params(&RawParams::new(2, 1.5, 3.0, 2.0), Usage::Steklov).is_ok());
    }

    #[test]
    fn rejects_p_equal_n() {
        let err = validate_params(&RawParams::new(2, 2.0, 3.0, 2.0), Usage::Trace).unwrap_err();
        assert!(matches!(err, Error::RangeViolation { field: "p", .. }), "{err}");
    }

    #[test]
    fn rejects_critical_q_for_steklov() {
        let raw = RawParams::new(3, 2.0, 4.0, 4.0);
        let err = validate_params(&raw, Usage::Steklov).unwrap_err();
        assert!(matches!(err, Error::RangeViolation { field: "q", .. }), "{err}");
        // q = p* is admissible for the (non-compact) trace bound
        assert!(validate_params(&raw, Usage::Trace).is_ok());
    }

    #[test]
    fn simplex_requires_flag() {
        let raw = RawParams::new(2, 1.5, 2.0, 2.0);
        assert!(matches!(
            validate_params(&raw, Usage::Steklov),
            Err(Error::SimplexModeRequired)
        ));
        assert!(validate_params(&RawParams::simplex(2, 1.5, 2.0), Usage::Steklov).is_ok());
        let bad = RawParams {
            gamma: 3.0,
            ..RawParams::simplex(2, 1.5, 2.0)
        };
        assert!(validate_params(&bad, Usage::Steklov).is_err());
    }

    #[test]
    fn rejects_non_finite() {
        let raw = RawParams::new(2, f64::NAN, 3.0, 2.0);
        assert!(validate_params(&raw, Usage::Geometry).is_err());
        let raw = RawParams::new(2, 1.5, 3.0, 2.0).with_theta(f64::INFINITY);
        assert!(validate_params(&raw, Usage::Geometry).is_err());
    }

    #[test]
    fn exponents_planar_reference() {
        let e = validate_params(&RawParams::new(2, 1.5, 3.0, 2.0), Usage::Geometry)
            .unwrap()
            .exponents();
        assert!(close(e.alpha, 2.0));
        assert!(close(e.a_max, 1.0 / 3.0));
        assert!(close(e.beta, 2.0));
        assert!(close(e.p_star, 3.0));
        assert!(close(e.r_max, 1.0));
        assert!(close(e.d_gamma, 1.0 / 3.0));
        assert!(close(e.gv_q_min, 1.5));
    }

    #[test]
    fn exponents_spatial_reference() {
        let e = validate_params(&RawParams::new(3, 2.0, 4.0, 3.0), Usage::Geometry)
            .unwrap()
            .exponents();
        assert!(close(e.alpha, 1.5));
        assert!(close(e.a_max, 0.5));
        assert!(close(e.beta, 1.5));
        assert!(close(e.p_star, 4.0));
        assert!(close(e.r_max, 2.5));
        assert!(close(e.d_gamma, 1.25));
        assert!(close(e.gv_q_min, 2.0));
        assert!(close(e.holder_q_min(2.4), 3.84));
    }

    #[test]
    fn exponents_simplex_degenerate() {
        let params = validate_params(&RawParams::simplex(3, 2.0, 3.0), Usage::Geometry).unwrap();
        let e = params.exponents();
        assert_eq!(e.alpha, 1.0);
        assert_eq!(e.a_max, 1.0);
        assert_eq!(e.beta, 0.0);
        assert!(close(e.r_max, e.p_star));
        assert_eq!(params.theta(), 0.0);
    }

    #[test]
    fn theta_min_examples() {
        let e = validate_params(&RawParams::new(2, 1.5, 3.0, 2.0), Usage::Geometry)
            .unwrap()
            .exponents();
        assert!(close(e.theta_min(2.0), 1.0));
        let e = validate_params(&RawParams::new(3, 2.0, 4.0, 3.0), Usage::Geometry)
            .unwrap()
            .exponents();
        assert!(close(e.theta_min(3.0), 0.5));
    }
}
