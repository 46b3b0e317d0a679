//! Fixtures shared by the benchmarks.

use wdistill::WCoefficients;

/// Generic interior point.
pub fn sample() -> WCoefficients {
    WCoefficients::from_squares(0.5, 0.3, 0.2).unwrap()
}

/// Named points across the ordered region, including its corners.
pub fn points() -> Vec<(&'static str, WCoefficients)> {
    [
        ("interior", (0.5, 0.3, 0.2)),
        ("a_eq_b", (0.4, 0.4, 0.2)),
        ("b_eq_c", (0.6, 0.2, 0.2)),
        ("w_state", (1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0)),
    ]
    .into_iter()
    .map(|(name, (a2, b2, c2))| (name, WCoefficients::from_squares(a2, b2, c2).unwrap()))
    .collect()
}
