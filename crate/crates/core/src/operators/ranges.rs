use serde::Serialize;

use crate::geometry::{derived_exponents, DomainParams, ExponentSet};

/// Admissible trace exponents `r` for the unweighted embedding
/// `W^{1,p} -> L^r(boundary)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExponentRange {
    Empty,
    /// Open interval `(lo, hi)`.
    Open { lo: f64, hi: f64 },
}

impl ExponentRange {
    pub fn contains(&self, r: f64) -> bool {
        match *self {
            ExponentRange::Empty => false,
            ExponentRange::Open { lo, hi } => lo < r && r < hi,
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, ExponentRange::Empty)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RangeReport {
    pub unweighted_r_range: ExponentRange,
    pub r_max: f64,
    pub d_gamma: f64,
    pub gv_q_min: f64,
    pub p_star: f64,
    pub beta: f64,
    #[serde(skip)]
    exponents: ExponentSet,
}

impl RangeReport {
    /// `r (1 + beta / (alpha (n - 2) + 1))`: the least weighted exponent `q`
    /// from which Hölder's inequality reaches `L^r`.
    pub fn holder_q_min(&self, r: f64) -> f64 {
        self.exponents.holder_q_min(r)
    }

    /// Whether `r` is reached through the weighted trace with some `q < p*`.
    pub fn holder_feasible(&self, r: f64) -> bool {
        self.holder_q_min(r) < self.p_star
    }
}

pub fn embedding_ranges(params: &DomainParams) -> RangeReport {
    let e = derived_exponents(params);
    let unweighted_r_range = if e.r_max > 1.0 {
        ExponentRange::Open { lo: 1.0, hi: e.r_max }
    } else {
        ExponentRange::Empty
    };
    RangeReport {
        unweighted_r_range,
        r_max: e.r_max,
        d_gamma: e.d_gamma,
        gv_q_min: e.gv_q_min,
        p_star: e.p_star,
        beta: e.beta,
        exponents: e,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{validate_params, RawParams, Usage};

    fn report(n: usize, p: f64, gamma: f64) -> RangeReport {
        embedding_ranges(&validate_params(&RawParams::new(n, p, gamma, p), Usage::Geometry).unwrap())
    }

    #[test]
    fn planar_ranges() {
        let r = report(2, 1.5, 3.0);
        assert!(r.unweighted_r_range.is_empty());
        assert!((r.r_max - 1.0).abs() < 1e-14);
        let r = report(2, 1.5, 2.5);
        match r.unweighted_r_range {
            ExponentRange::Open { lo, hi } => {
                assert_eq!(lo, 1.0);
                assert!((hi - 1.5).abs() < 1e-14);
            }
            ExponentRange::Empty => panic!("expected a nonempty range"),
        }
    }

    #[test]
    fn holder_threshold_in_three_dimensions() {
        let r = report(3, 2.0, 4.0);
        assert!((r.holder_q_min(2.4) - 3.84).abs() < 1e-12);
        assert!(r.holder_feasible(2.4));
        assert!((r.holder_q_min(2.5) - 4.0).abs() < 1e-12);
        assert!(!r.holder_feasible(2.5));
        assert!((2.0 * r.d_gamma / (3.0 - 2.0) - r.r_max).abs() < 1e-12);
    }
}
