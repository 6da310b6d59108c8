use serde::{Deserialize, Serialize};

/// Profile `eta` with `eta = 1` on `[0, 1]`, `eta = 0` on `[2, inf)` and a
/// monotone smoothstep in between.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Cutoff {
    /// `1 - 3u^2 + 2u^3`, `u = s - 1`.
    #[default]
    Cubic,
    /// `1 - 10u^3 + 15u^4 - 6u^5`.
    Quintic,
}

impl Cutoff {
    /// `(eta(s), eta'(s))` for `s >= 0`.
    pub fn eval(self, s: f64) -> (f64, f64) {
        if s <= 1.0 {
            return (1.0, 0.0);
        }
        if s >= 2.0 {
            return (0.0, 0.0);
        }
        let u = s - 1.0;
        match self {
            Cutoff::Cubic => (1.0 - u * u * (3.0 - 2.0 * u), -6.0 * u * (1.0 - u)),
            Cutoff::Quintic => (
                1.0 - u * u * u * (10.0 - 15.0 * u + 6.0 * u * u),
                -30.0 * u * u * (1.0 - u) * (1.0 - u),
            ),
        }
    }

    /// `sup |eta'|`, attained at `s = 3/2`.
    pub fn derivative_bound(self) -> f64 {
        match self {
            Cutoff::Cubic => 1.5,
            Cutoff::Quintic => 1.875,
        }
    }
}

/// The cubic cutoff.
pub fn cutoff_eta(s: f64) -> (f64, f64) {
    Cutoff::Cubic.eval(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plateau_and_midpoint() {
        assert_eq!(cutoff_eta(0.5), (1.0, 0.0));
        assert_eq!(cutoff_eta(2.0).0, 0.0);
        assert!((cutoff_eta(1.5).0 - 0.5).abs() < 1e-15);
        assert!((Cutoff::Quintic.eval(1.5).0 - 0.5).abs() < 1e-15);
    }

    #[test]
    fn derivative_matches_differences() {
        for cutoff in [Cutoff::Cubic, Cutoff::Quintic] {
            let mut sup = 0.0f64;
            for k in 1..200 {
                let s = 1.0 + k as f64 / 200.0;
                let h = 1e-6;
                let fd = (cutoff.eval(s + h).0 - cutoff.eval(s - h).0) / (2.0 * h);
                let (v, d) = cutoff.eval(s);
                assert!((fd - d).abs() < 1e-8);
                assert!((0.0..=1.0).contains(&v));
                sup = sup.max(d.abs());
            }
            assert!(sup <= cutoff.derivative_bound() + 1e-12);
        }
    }
}
