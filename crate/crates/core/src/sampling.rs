//! Deterministic low-discrepancy points.

const PRIMES: [u64; 8] = [2, 3, 5, 7, 11, 13, 17, 19];

/// Radical inverse of `i` in base `b`.
pub fn radical_inverse(mut i: u64, b: u64) -> f64 {
    let inv = 1.0 / b as f64;
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += f * (i % b) as f64;
        i /= b;
        f *= inv;
    }
    r
}

/// Point `index` of the Halton sequence in `(0,1)^dim`, `dim <= 8`.
/// Index 0 (the origin) is skipped.
pub fn halton(index: u64, dim: usize) -> Vec<f64> {
    assert!(dim <= PRIMES.len(), "Halton dimension {dim} > 8");
    PRIMES[..dim]
        .iter()
        .map(|&b| radical_inverse(index + 1, b))
        .collect()
}

/// Maps a point of the unit cube to the open model simplex
/// `{0 < y_i < y_n < 1}`: `y_n = u_n^{1/n}` is distributed like the
/// height of a uniform point, `y_i = u_i y_n`.
pub fn cube_to_simplex(u: &[f64]) -> Vec<f64> {
    let n = u.len();
    let yn = u[n - 1].powf(1.0 / n as f64);
    let mut y: Vec<f64> = u[..n - 1].iter().map(|v| v * yn).collect();
    y.push(yn);
    y
}

/// `count` interior points of the model simplex in dimension `n`.
pub fn simplex_points(n: usize, count: usize) -> Vec<Vec<f64>> {
    (0..count as u64)
        .map(|i| cube_to_simplex(&halton(i, n)))
        .collect()
}
