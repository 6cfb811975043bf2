//! Sampled paths and the two path metrics: p-variation distance and the
//! modulus (Hölder-type) distance relative to a control.
//!
//! Both metrics are evaluated on the sampled grid only: subdivisions and
//! (s, t) pairs are restricted to sample times. This is the documented
//! grid-restriction policy of the whole crate; refining the grid never
//! decreases the p-variation value, so the finest available grid gives the
//! sharpest estimate.

use crate::error::{Error, Result};
use crate::tensor::{gdist, GroupElement};

/// Control function `ω(s, t)`: continuous, superadditive, zero on the diagonal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Control {
    /// `ω(s, t) = t − s`, the control of the 1/p-Hölder scale.
    Linear,
}

impl Control {
    pub fn eval(&self, s: f64, t: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&s) || !(0.0..=1.0).contains(&t) || s > t {
            return Err(Error::Domain(format!(
                "control needs 0 <= s <= t <= 1, got ({s}, {t})"
            )));
        }
        match self {
            Control::Linear => Ok(t - s),
        }
    }
}

/// Sorted time grid on `[0, 1]` containing both endpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct Subdivision {
    times: Vec<f64>,
}

impl Subdivision {
    pub fn new(times: Vec<f64>) -> Result<Self> {
        if times.len() < 2 {
            return Err(Error::Domain("subdivision needs at least two times".into()));
        }
        if times[0].abs() > 1e-12 || (times[times.len() - 1] - 1.0).abs() > 1e-12 {
            return Err(Error::Domain(
                "subdivision must contain the endpoints 0 and 1".into(),
            ));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Domain("subdivision times must strictly increase".into()));
        }
        if times.iter().any(|t| !t.is_finite()) {
            return Err(Error::Domain("subdivision times must be finite".into()));
        }
        let mut times = times;
        times[0] = 0.0;
        let n = times.len();
        times[n - 1] = 1.0;
        Ok(Subdivision { times })
    }

    /// Dyadic grid `k · 2^{-level}`, `k = 0 … 2^level`.
    pub fn dyadic(level: u32) -> Self {
        let n = 1usize << level;
        let times = (0..=n).map(|k| k as f64 / n as f64).collect();
        Subdivision { times }
    }

    /// Uniform grid with `n` steps.
    pub fn uniform(n: usize) -> Self {
        assert!(n >= 1);
        let times = (0..=n).map(|k| k as f64 / n as f64).collect();
        Subdivision { times }
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction guarantees at least two points
    }

    /// Largest step `|D|`.
    pub fn mesh(&self) -> f64 {
        self.times.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
    }
}

/// Piecewise-linear `R^d`-valued path: a time grid plus one point per time,
/// interpolated linearly in between.
#[derive(Debug, Clone, PartialEq)]
pub struct PointPath {
    times: Vec<f64>,
    points: Vec<Vec<f64>>,
}

impl PointPath {
    pub fn new(times: Vec<f64>, points: Vec<Vec<f64>>) -> Result<Self> {
        if times.len() != points.len() {
            return Err(Error::Shape(format!(
                "{} times vs {} points",
                times.len(),
                points.len()
            )));
        }
        if times.is_empty() {
            return Err(Error::Domain("path needs at least one sample".into()));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Domain("path times must strictly increase".into()));
        }
        let dim = points[0].len();
        if dim == 0 || points.iter().any(|p| p.len() != dim) {
            return Err(Error::Shape("inconsistent point dimension".into()));
        }
        if points.iter().any(|p| p.iter().any(|c| !c.is_finite())) {
            return Err(Error::Domain("path coordinates must be finite".into()));
        }
        Ok(PointPath { times, points })
    }

    /// Constant path on the given grid.
    pub fn constant(times: Vec<f64>, value: Vec<f64>) -> Result<Self> {
        let points = vec![value; times.len()];
        Self::new(times, points)
    }

    pub fn dim(&self) -> usize {
        self.points[0].len()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i]
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn mesh(&self) -> f64 {
        self.times.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
    }

    /// Linear interpolation; clamps outside the sampled range.
    pub fn eval(&self, t: f64) -> Vec<f64> {
        if t <= self.times[0] {
            return self.points[0].clone();
        }
        let last = self.times.len() - 1;
        if t >= self.times[last] {
            return self.points[last].clone();
        }
        let i = match self.times.binary_search_by(|x| x.partial_cmp(&t).unwrap()) {
            Ok(i) => return self.points[i].clone(),
            Err(i) => i - 1,
        };
        let (t0, t1) = (self.times[i], self.times[i + 1]);
        let w = (t - t0) / (t1 - t0);
        self.points[i]
            .iter()
            .zip(&self.points[i + 1])
            .map(|(a, b)| a + w * (b - a))
            .collect()
    }

    /// Resample onto a new grid by linear interpolation.
    pub fn resample(&self, times: &[f64]) -> Result<PointPath> {
        let points = times.iter().map(|&t| self.eval(t)).collect();
        PointPath::new(times.to_vec(), points)
    }

    /// Slope on segment `i`.
    pub fn slope(&self, i: usize) -> Vec<f64> {
        let dt = self.times[i + 1] - self.times[i];
        self.points[i]
            .iter()
            .zip(&self.points[i + 1])
            .map(|(a, b)| (b - a) / dt)
            .collect()
    }
}

/// Group-valued sampled path: a prefix `GroupElement` per grid time.
/// Increments `x_{s,t} = x_s^{-1} ⊗ x_t` are multiplicative by construction.
#[derive(Debug, Clone)]
pub struct SampledRoughPath {
    grid: Subdivision,
    values: Vec<GroupElement>,
    /// Variation exponent metadata (not enforced by the data structure).
    p: f64,
}

impl SampledRoughPath {
    pub fn new(grid: Subdivision, values: Vec<GroupElement>, p: f64) -> Result<Self> {
        if grid.len() != values.len() {
            return Err(Error::Shape(format!(
                "{} grid times vs {} values",
                grid.len(),
                values.len()
            )));
        }
        let (dim, level) = (values[0].dim(), values[0].level());
        if values.iter().any(|v| v.dim() != dim || v.level() != level) {
            return Err(Error::Shape("inconsistent group element shapes".into()));
        }
        Ok(SampledRoughPath { grid, values, p })
    }

    /// Constant identity path (the lift of the zero path).
    pub fn constant_identity(grid: Subdivision, dim: usize, level: usize, p: f64) -> Self {
        let values = vec![GroupElement::identity(dim, level); grid.len()];
        SampledRoughPath { grid, values, p }
    }

    pub fn with_p(mut self, p: f64) -> Self {
        self.p = p;
        self
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn grid(&self) -> &Subdivision {
        &self.grid
    }

    pub fn times(&self) -> &[f64] {
        self.grid.times()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.values[0].dim()
    }

    pub fn level(&self) -> usize {
        self.values[0].level()
    }

    pub fn value(&self, i: usize) -> &GroupElement {
        &self.values[i]
    }

    pub fn values(&self) -> &[GroupElement] {
        &self.values
    }

    /// Increment `x_{t_i, t_j} = x_{t_i}^{-1} ⊗ x_{t_j}`.
    pub fn increment(&self, i: usize, j: usize) -> Result<GroupElement> {
        if i > j || j >= self.values.len() {
            return Err(Error::Index(format!(
                "increment({i}, {j}) on {} samples",
                self.values.len()
            )));
        }
        self.values[i].inverse().mul(&self.values[j])
    }

    /// Restriction to a subset of sample indices (must include 0 and the last
    /// index so that the grid still spans `[0, 1]`).
    pub fn restrict(&self, indices: &[usize]) -> Result<SampledRoughPath> {
        let times: Vec<f64> = indices.iter().map(|&i| self.grid.times()[i]).collect();
        let grid = Subdivision::new(times)?;
        let values = indices.iter().map(|&i| self.values[i].clone()).collect();
        SampledRoughPath::new(grid, values, self.p)
    }

    /// Restriction to the dyadic grid of the given level; the own grid must be
    /// the dyadic grid of some finer level.
    pub fn restrict_dyadic(&self, level: u32) -> Result<SampledRoughPath> {
        let n = self.len() - 1;
        let coarse = 1usize << level;
        if !n.is_multiple_of(coarse) {
            return Err(Error::Shape(format!(
                "grid with {n} steps is not a refinement of 2^{level}"
            )));
        }
        let stride = n / coarse;
        let indices: Vec<usize> = (0..=coarse).map(|k| k * stride).collect();
        self.restrict(&indices)
    }
}

fn check_same_grid(x: &SampledRoughPath, y: &SampledRoughPath) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::Shape(format!(
            "grids differ: {} vs {} samples",
            x.len(),
            y.len()
        )));
    }
    if x.times()
        .iter()
        .zip(y.times())
        .any(|(a, b)| (a - b).abs() > 1e-12)
    {
        return Err(Error::Shape("grids differ in sample times".into()));
    }
    if x.dim() != y.dim() || x.level() != y.level() {
        return Err(Error::Shape("paths differ in dimension or level".into()));
    }
    Ok(())
}

/// p-variation distance on the shared grid:
/// `d(x_0, y_0) + (max over grid subdivisions Σ d(x_inc, y_inc)^p)^{1/p}`.
///
/// The maximum over subdivisions is computed exactly by dynamic programming
/// over sample indices (longest path on the index DAG, O(M²) segment
/// evaluations).
#[allow(clippy::needless_range_loop)] // index pairs drive increment()
pub fn dist_pvar(x: &SampledRoughPath, y: &SampledRoughPath, p: f64) -> Result<f64> {
    check_same_grid(x, y)?;
    if p < 1.0 {
        return Err(Error::Domain(format!("p-variation needs p >= 1, got {p}")));
    }
    let m = x.len();
    let mut best = vec![0.0f64; m];
    for j in 1..m {
        let mut b = f64::NEG_INFINITY;
        for i in 0..j {
            let d = gdist(&x.increment(i, j)?, &y.increment(i, j)?)?;
            let cand = best[i] + d.powf(p);
            if cand > b {
                b = cand;
            }
        }
        best[j] = b;
    }
    let start = gdist(x.value(0), y.value(0))?;
    Ok(start + best[m - 1].powf(1.0 / p))
}

/// Modulus distance on the shared grid:
/// `d(x_0, y_0) + sup_{s < t} d(x_{s,t}, y_{s,t}) / ω(s,t)^{1/p}`,
/// the supremum restricted to sampled pairs. With the linear control this is
/// the grid 1/p-Hölder distance.
pub fn dist_modulus(
    x: &SampledRoughPath,
    y: &SampledRoughPath,
    p: f64,
    omega: &Control,
) -> Result<f64> {
    dist_modulus_strided(x, y, p, omega, 1)
}

/// Same as [`dist_modulus`] but with the pair supremum subsampled to every
/// `stride`-th grid index (endpoints always included). Intended for very fine
/// grids where the exact O(M²) pair sweep is too expensive; callers should log
/// the stride they picked.
pub fn dist_modulus_strided(
    x: &SampledRoughPath,
    y: &SampledRoughPath,
    p: f64,
    omega: &Control,
    stride: usize,
) -> Result<f64> {
    check_same_grid(x, y)?;
    if p < 1.0 {
        return Err(Error::Domain(format!("modulus distance needs p >= 1, got {p}")));
    }
    if stride == 0 {
        return Err(Error::Domain("stride must be positive".into()));
    }
    let idx = strided_indices(x.len(), stride);
    let times = x.times();
    let weights = PairWeights::build(times, omega, p, &idx)?;

    let mut sup = 0.0f64;
    if x.level() == 2 {
        // Flat fast path, monomorphized over small dimensions so the block
        // loops unroll; increments and the group distance come from the
        // closed level-2 formulas without allocating per pair.
        let fx = FlatLevel2::from(x);
        let fy = FlatLevel2::from(y);
        sup = match x.dim() {
            1 => modulus_sweep::<1>(&fx, &fy, &idx, &weights),
            2 => modulus_sweep::<2>(&fx, &fy, &idx, &weights),
            3 => modulus_sweep::<3>(&fx, &fy, &idx, &weights),
            4 => modulus_sweep::<4>(&fx, &fy, &idx, &weights),
            6 => modulus_sweep::<6>(&fx, &fy, &idx, &weights),
            d => modulus_sweep_dyn(&fx, &fy, d, &idx, &weights),
        };
    } else {
        for (a, &i) in idx.iter().enumerate() {
            for &j in &idx[a + 1..] {
                let w1 = weights.inv_w2(i, j).sqrt().recip();
                let d = gdist(&x.increment(i, j)?, &y.increment(i, j)?)?;
                sup = sup.max(d / w1);
            }
        }
    }
    let start = gdist(x.value(0), y.value(0))?;
    Ok(start + sup)
}

/// Per-pair control weights `1/ω^{2/p}` and `1/ω^{4/p}`. On a uniform grid
/// the control value depends only on the index gap, so the weights are
/// tabulated once; otherwise they are computed per pair.
pub(crate) enum PairWeights<'a> {
    Gap { inv_w2: Vec<f64>, inv_w4: Vec<f64> },
    PerPair { times: &'a [f64], omega: &'a Control, two_over_p: f64 },
}

impl<'a> PairWeights<'a> {
    pub(crate) fn build(
        times: &'a [f64],
        omega: &'a Control,
        p: f64,
        _idx: &[usize],
    ) -> Result<PairWeights<'a>> {
        let m = times.len();
        if let (Control::Linear, Some(h)) = (omega, uniform_mesh(times)) {
            let mut inv_w2 = vec![f64::NAN; m];
            let mut inv_w4 = vec![f64::NAN; m];
            for (g, (w2s, w4s)) in inv_w2.iter_mut().zip(inv_w4.iter_mut()).enumerate().skip(1) {
                let w2 = (g as f64 * h).powf(2.0 / p);
                *w2s = 1.0 / w2;
                *w4s = 1.0 / (w2 * w2);
            }
            return Ok(PairWeights::Gap { inv_w2, inv_w4 });
        }
        // sanity: the control must be positive on off-diagonal grid pairs
        let w = omega.eval(times[0], times[m - 1])?;
        if w <= 0.0 {
            return Err(Error::Domain(
                "control vanishes off the diagonal on the grid".into(),
            ));
        }
        Ok(PairWeights::PerPair { times, omega, two_over_p: 2.0 / p })
    }

    #[inline(always)]
    pub(crate) fn inv_w2(&self, i: usize, j: usize) -> f64 {
        match self {
            PairWeights::Gap { inv_w2, .. } => inv_w2[j - i],
            PairWeights::PerPair { times, omega, two_over_p } => {
                let w = omega.eval(times[i], times[j]).unwrap_or(f64::NAN);
                1.0 / w.powf(*two_over_p)
            }
        }
    }

    #[inline(always)]
    pub(crate) fn inv_w4(&self, i: usize, j: usize) -> f64 {
        match self {
            PairWeights::Gap { inv_w4, .. } => inv_w4[j - i],
            PairWeights::PerPair { .. } => {
                let v = self.inv_w2(i, j);
                v * v
            }
        }
    }
}

/// Squared level-1 and level-2 norms of `a^{-1} ⊗ b` for the `(i, j)`
/// increments `a` of `fx` and `b` of `fy` at level 2: the level-1 part is
/// `b¹ − a¹` and the level-2 part is `a¹ ⊗ (a¹ − b¹) − a² + b²`.
#[inline(always)]
fn increment_quotient_sq<const D: usize>(
    fx: &FlatLevel2,
    fy: &FlatLevel2,
    i: usize,
    j: usize,
) -> (f64, f64) {
    let dd = D * D;
    let mut a1 = [0.0f64; D];
    let mut b1 = [0.0f64; D];
    let mut n1 = 0.0;
    for k in 0..D {
        a1[k] = fx.lvl1[j * D + k] - fx.lvl1[i * D + k];
        b1[k] = fy.lvl1[j * D + k] - fy.lvl1[i * D + k];
        let diff = b1[k] - a1[k];
        n1 += diff * diff;
    }
    let x2i = &fx.lvl2[i * dd..(i + 1) * dd];
    let x2j = &fx.lvl2[j * dd..(j + 1) * dd];
    let y2i = &fy.lvl2[i * dd..(i + 1) * dd];
    let y2j = &fy.lvl2[j * dd..(j + 1) * dd];
    let mut n2 = 0.0;
    for r in 0..D {
        let gxr = fx.lvl1[i * D + r];
        let gyr = fy.lvl1[i * D + r];
        for c in 0..D {
            let e = r * D + c;
            let a2 = x2j[e] - x2i[e] - gxr * a1[c];
            let b2 = y2j[e] - y2i[e] - gyr * b1[c];
            let v = a1[r] * (a1[c] - b1[c]) - a2 + b2;
            n2 += v * v;
        }
    }
    (n1, n2)
}

/// Tile width for the O(M²) pair sweeps. The sweeps are bandwidth-bound:
/// visiting pairs tile by tile keeps both tiles' level blocks in cache. The
/// visiting order does not affect the result (pure max reductions).
pub(crate) const PAIR_TILE: usize = 256;

/// Runs `body(i, j)` over all index pairs `i < j` of `idx`, tiled.
#[inline]
pub(crate) fn for_each_pair_tiled(idx: &[usize], mut body: impl FnMut(usize, usize)) {
    let len = idx.len();
    for ib in (0..len).step_by(PAIR_TILE) {
        let iend = (ib + PAIR_TILE).min(len);
        for jb in (ib..len).step_by(PAIR_TILE) {
            let jend = (jb + PAIR_TILE).min(len);
            for a in ib..iend {
                let i = idx[a];
                let jstart = if jb > a + 1 { jb } else { a + 1 };
                for &j in &idx[jstart..jend] {
                    body(i, j);
                }
            }
        }
    }
}

/// Pair supremum of `hnorm(x_inc^{-1} ⊗ y_inc) / ω^{1/p}`, with the square
/// roots deferred: the level-1 ratio is tracked as its square and the level-2
/// ratio as its fourth power.
fn modulus_sweep<const D: usize>(
    fx: &FlatLevel2,
    fy: &FlatLevel2,
    idx: &[usize],
    weights: &PairWeights,
) -> f64 {
    let mut sup1 = 0.0f64;
    let mut sup2 = 0.0f64;
    for_each_pair_tiled(idx, |i, j| {
        let (n1, n2) = increment_quotient_sq::<D>(fx, fy, i, j);
        let r1 = n1 * weights.inv_w2(i, j);
        if r1 > sup1 {
            sup1 = r1;
        }
        let r2 = n2 * weights.inv_w4(i, j);
        if r2 > sup2 {
            sup2 = r2;
        }
    });
    // hnorm = max(|lvl1|, (2·|lvl2|)^{1/2})
    sup1.sqrt().max((4.0 * sup2).powf(0.25))
}

fn modulus_sweep_dyn(
    fx: &FlatLevel2,
    fy: &FlatLevel2,
    d: usize,
    idx: &[usize],
    weights: &PairWeights,
) -> f64 {
    let mut a1 = vec![0.0; d];
    let mut a2 = vec![0.0; d * d];
    let mut b1 = vec![0.0; d];
    let mut b2 = vec![0.0; d * d];
    let mut sup1 = 0.0f64;
    let mut sup2 = 0.0f64;
    for_each_pair_tiled(idx, |i, j| {
        fx.increment_into(i, j, &mut a1, &mut a2);
        fy.increment_into(i, j, &mut b1, &mut b2);
        let mut n1 = 0.0;
        for k in 0..d {
            let diff = b1[k] - a1[k];
            n1 += diff * diff;
        }
        let mut n2 = 0.0;
        for r in 0..d {
            for c in 0..d {
                let v = a1[r] * (a1[c] - b1[c]) - a2[r * d + c] + b2[r * d + c];
                n2 += v * v;
            }
        }
        sup1 = sup1.max(n1 * weights.inv_w2(i, j));
        sup2 = sup2.max(n2 * weights.inv_w4(i, j));
    });
    sup1.sqrt().max((4.0 * sup2).powf(0.25))
}

/// The common step when the grid is uniform (within 1e-13), else `None`.
pub(crate) fn uniform_mesh(times: &[f64]) -> Option<f64> {
    let h = times[1] - times[0];
    for w in times.windows(2) {
        if (w[1] - w[0] - h).abs() > 1e-13 {
            return None;
        }
    }
    Some(h)
}

pub(crate) fn strided_indices(len: usize, stride: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..len).step_by(stride.max(1)).collect();
    if *idx.last().unwrap() != len - 1 {
        idx.push(len - 1);
    }
    idx
}

/// Level-2 path flattened to contiguous level-1 / level-2 coefficient arrays.
pub(crate) struct FlatLevel2 {
    pub lvl1: Vec<f64>,
    pub lvl2: Vec<f64>,
    dim: usize,
}

impl FlatLevel2 {
    pub fn from(x: &SampledRoughPath) -> Self {
        let d = x.dim();
        let mut lvl1 = Vec::with_capacity(x.len() * d);
        let mut lvl2 = Vec::with_capacity(x.len() * d * d);
        for g in x.values() {
            lvl1.extend_from_slice(g.level1());
            lvl2.extend_from_slice(g.level2());
        }
        FlatLevel2 { lvl1, lvl2, dim: d }
    }

    /// Blocks of the increment over `(t_i, t_j)`:
    /// level-1 is `g¹_j − g¹_i`, level-2 is `g²_j − g²_i − g¹_i ⊗ (g¹_j − g¹_i)`.
    #[inline]
    #[allow(clippy::needless_range_loop)]
    pub fn increment_into(&self, i: usize, j: usize, d1: &mut [f64], d2: &mut [f64]) {
        let d = self.dim;
        for k in 0..d {
            d1[k] = self.lvl1[j * d + k] - self.lvl1[i * d + k];
        }
        for r in 0..d {
            let gs = self.lvl1[i * d + r];
            for c in 0..d {
                d2[r * d + c] =
                    self.lvl2[j * d * d + r * d + c] - self.lvl2[i * d * d + r * d + c] - gs * d1[c];
            }
        }
    }
}
