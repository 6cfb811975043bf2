//! Shared fixtures for the benchmark targets.

use roughpath_core::*;

/// Deterministic piecewise-linear path with `segs` random segments.
pub fn random_pwl(seed: u64, dim: usize, segs: usize) -> PointPath {
    let mut src = NormalSource::new(seed);
    let times: Vec<f64> = (0..=segs).map(|k| k as f64 / segs as f64).collect();
    let mut points = vec![vec![0.0; dim]];
    for _ in 0..segs {
        let last = points.last().unwrap().clone();
        points.push((0..dim).map(|c| last[c] + 0.3 * src.next_normal()).collect());
    }
    PointPath::new(times, points).expect("valid path")
}

/// Deterministic group element built from a few segment exponentials.
pub fn random_group(seed: u64, dim: usize, level: usize) -> GroupElement {
    let mut src = NormalSource::new(seed);
    let mut g = GroupElement::identity(dim, level);
    for _ in 0..4 {
        let v: Vec<f64> = (0..dim).map(|_| src.next_normal()).collect();
        g = g.mul(&GroupElement::exp_level1(level, &v)).expect("same shape");
    }
    g
}
