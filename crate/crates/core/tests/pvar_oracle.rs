//! The dynamic-programming p-variation against exhaustive enumeration over
//! all subdivisions of small grids.

use roughpath_core::*;

/// Brute-force p-variation distance: enumerate every subset of interior grid
/// points (2^{M−2} subdivisions) and take the largest increment sum directly.
fn dist_pvar_bruteforce(x: &SampledRoughPath, y: &SampledRoughPath, p: f64) -> f64 {
    let m = x.len();
    let interior = m - 2;
    let mut best = 0.0f64;
    for mask in 0..(1u32 << interior) {
        let mut idx = vec![0usize];
        for b in 0..interior {
            if mask & (1 << b) != 0 {
                idx.push(b + 1);
            }
        }
        idx.push(m - 1);
        let mut sum = 0.0;
        for w in idx.windows(2) {
            let d = gdist(
                &x.increment(w[0], w[1]).unwrap(),
                &y.increment(w[0], w[1]).unwrap(),
            )
            .unwrap();
            sum += d.powf(p);
        }
        best = best.max(sum);
    }
    gdist(x.value(0), y.value(0)).unwrap() + best.powf(1.0 / p)
}

fn random_lift(seed: u64, grid: &Subdivision, dim: usize) -> SampledRoughPath {
    let mut src = NormalSource::new(seed);
    let mut pts = vec![vec![0.0; dim]];
    for _ in 1..grid.len() {
        let last = pts.last().unwrap().clone();
        pts.push((0..dim).map(|c| last[c] + 0.7 * src.next_normal()).collect());
    }
    sig_pwl(&PointPath::new(grid.times().to_vec(), pts).unwrap(), 2).unwrap()
}

#[test]
fn dp_matches_bruteforce_exactly() {
    for m in [4usize, 7, 10] {
        let grid = Subdivision::uniform(m - 1);
        for s in 0..8u64 {
            let x = random_lift(derive_seed(5, 0, m as u64, s), &grid, 2);
            let y = random_lift(derive_seed(5, 1, m as u64, s), &grid, 2);
            for p in [1.5, 2.0, 2.5] {
                let dp = dist_pvar(&x, &y, p).unwrap();
                let bf = dist_pvar_bruteforce(&x, &y, p);
                assert_eq!(dp, bf, "m={m} s={s} p={p}");
            }
        }
    }
}
