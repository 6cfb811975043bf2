//! Brownian drivers on dyadic grids: sampling, bridge refinement, linear
//! approximations on subdivisions, the fine-grid reference lift, and the
//! small-noise dilation of lifted paths.
//!
//! # Reproducibility
//!
//! All randomness flows through one documented 64-bit mixing function so that
//! runs are reproducible bit-for-bit from a base seed. A derived seed is
//!
//! ```text
//! derive_seed(base, stream, level, position) =
//!     m(m(m(m(base ^ 0x9E3779B97F4A7C15)
//!         ^ stream   · 0xA24BAED4963EE407)
//!         ^ level    · 0x9FB21C651E98DF25)
//!         ^ position · 0xD6E8FEB86659FD93)
//! ```
//!
//! where `m` is the splitmix64 finalizer
//! `z ^= z >> 30; z *= 0xBF58476D1CE4E5B9; z ^= z >> 27; z *= 0x94D049BB133111EB; z ^= z >> 31`
//! and all arithmetic is wrapping. Gaussian draws come from a splitmix64
//! stream mapped through the Box–Muller transform (see [`NormalSource`]).
//!
//! A sample at dyadic level `K` is built by midpoint displacement: the value
//! at time 1 uses the sub-seed `(seed, 0, 0, 0)`, and the midpoint created at
//! refinement level `l` in slot `k` uses `(seed, 0, l, k)`. Refining a sample
//! therefore never changes existing values, and coarser approximations of one
//! sample are plain restrictions — experiments compare coupled paths.

use crate::error::{Error, Result};
use crate::lift::sig_pwl;
use crate::path::{PointPath, SampledRoughPath, Subdivision};

const GOLDEN: u64 = 0x9E3779B97F4A7C15;

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// Documented sub-seed derivation, collision-resistant across
/// `(stream, level, position)` triples. See the module docs for the formula.
pub fn derive_seed(base: u64, stream: u64, level: u64, position: u64) -> u64 {
    let mut h = mix64(base ^ GOLDEN);
    h = mix64(h ^ stream.wrapping_mul(0xA24BAED4963EE407));
    h = mix64(h ^ level.wrapping_mul(0x9FB21C651E98DF25));
    h = mix64(h ^ position.wrapping_mul(0xD6E8FEB86659FD93));
    h
}

/// Stream of standard Gaussian draws: a splitmix64 counter produces 53-bit
/// uniforms `u = ((bits >> 11) + 0.5) / 2^53` and consecutive pairs are mapped
/// through Box–Muller, `z0 = √(−2 ln u1) cos(2π u2)`, `z1 = … sin(2π u2)`.
#[derive(Debug, Clone)]
pub struct NormalSource {
    state: u64,
    spare: Option<f64>,
}

impl NormalSource {
    pub fn new(seed: u64) -> Self {
        NormalSource { state: seed, spare: None }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN);
        mix64(self.state)
    }

    /// Uniform draw in the open interval (0, 1).
    #[inline]
    pub fn next_uniform(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) / (1u64 << 53) as f64
    }

    /// Standard normal draw.
    pub fn next_normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = self.next_uniform();
        let u2 = self.next_uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = 2.0 * std::f64::consts::PI * u2;
        self.spare = Some(r * theta.sin());
        r * theta.cos()
    }

    pub fn fill_normal(&mut self, out: &mut [f64]) {
        for v in out.iter_mut() {
            *v = self.next_normal();
        }
    }
}

/// Maximal dyadic level; 2^24 + 1 points per coordinate is the memory guard.
pub const MAX_LEVEL: u32 = 24;

/// A `d`-dimensional Brownian path sampled at the dyadic times `k · 2^{-K}`,
/// starting at zero, reproducible bit-for-bit from its seed.
#[derive(Debug, Clone)]
pub struct BrownianSample {
    seed: u64,
    level: u32,
    dim: usize,
    /// Flat row-major storage: `values[i * dim + c]` is coordinate `c` at time
    /// `i · 2^{-level}`.
    values: Vec<f64>,
}

impl BrownianSample {
    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of sample times, `2^level + 1`.
    pub fn len(&self) -> usize {
        (1usize << self.level) + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    pub fn times(&self) -> Vec<f64> {
        let n = 1usize << self.level;
        (0..=n).map(|k| k as f64 / n as f64).collect()
    }

    /// Piecewise-linear value at an arbitrary time (exact at grid times).
    pub fn value_at(&self, t: f64) -> Vec<f64> {
        let n = (1usize << self.level) as f64;
        let s = (t.clamp(0.0, 1.0) * n).floor() as usize;
        let s = s.min((1usize << self.level) - 1);
        let w = t * n - s as f64;
        self.point(s)
            .iter()
            .zip(self.point(s + 1))
            .map(|(a, b)| a + w * (b - a))
            .collect()
    }

    /// Largest coordinate magnitude over the sample.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// The full-resolution piecewise-linear path through all samples.
    pub fn to_point_path(&self) -> PointPath {
        let points = (0..self.len()).map(|i| self.point(i).to_vec()).collect();
        PointPath::new(self.times(), points).expect("dyadic grid is valid")
    }
}

/// Samples a standard `d`-dimensional Brownian path at dyadic level `K` by
/// midpoint displacement. Deterministic in the seed; increments over disjoint
/// dyadic intervals are independent `N(0, length)` per coordinate.
pub fn sample_bm(seed: u64, level: u32, dim: usize) -> Result<BrownianSample> {
    if level > MAX_LEVEL {
        return Err(Error::Resource(format!(
            "dyadic level {level} exceeds the guard {MAX_LEVEL}"
        )));
    }
    if dim == 0 {
        return Err(Error::Domain("dimension must be positive".into()));
    }
    // level 0: B_0 = 0 and B_1 ~ N(0, 1)
    let mut values = vec![0.0; 2 * dim];
    let mut src = NormalSource::new(derive_seed(seed, 0, 0, 0));
    src.fill_normal(&mut values[dim..]);
    let mut sample = BrownianSample { seed, level: 0, dim, values };
    for _ in 0..level {
        sample = dyadic_refine(&sample);
    }
    Ok(sample)
}

/// One level of Brownian-bridge refinement. Existing values are preserved
/// exactly; the midpoint of each interval of length `2^{-K}` is drawn as
/// `N(average of the endpoints, 2^{-K}/4)` per coordinate, from the sub-seed
/// `(seed, 0, K+1, slot)`.
pub fn dyadic_refine(b: &BrownianSample) -> BrownianSample {
    let dim = b.dim;
    let old_n = 1usize << b.level;
    let new_level = b.level + 1;
    let mut values = vec![0.0; ((old_n << 1) + 1) * dim];
    let sd = (1.0f64 / (1u64 << b.level) as f64 / 4.0).sqrt();
    for k in 0..old_n {
        let left = b.point(k);
        let right = b.point(k + 1);
        let mut src = NormalSource::new(derive_seed(b.seed, 0, new_level as u64, k as u64));
        let base = 2 * k * dim;
        for c in 0..dim {
            values[base + c] = left[c];
            values[base + dim + c] = 0.5 * (left[c] + right[c]) + sd * src.next_normal();
        }
    }
    let last = b.point(old_n);
    values[(old_n << 1) * dim..].copy_from_slice(last);
    BrownianSample { seed: b.seed, level: new_level, dim, values }
}

/// The `D`-linear approximation: the piecewise-linear path through
/// `(t_i, B_{t_i})` for the subdivision times, each snapped to the nearest
/// sample time (round half up).
pub fn linear_approx(b: &BrownianSample, d_sub: &Subdivision) -> Result<PointPath> {
    let n = (1usize << b.level) as f64;
    let mut times = Vec::with_capacity(d_sub.len());
    let mut points = Vec::with_capacity(d_sub.len());
    let mut last_idx = usize::MAX;
    for &t in d_sub.times() {
        let idx = ((t * n).round() as usize).min(1usize << b.level);
        if idx == last_idx {
            continue; // distinct subdivision times can snap to one sample
        }
        last_idx = idx;
        times.push(idx as f64 / n);
        points.push(b.point(idx).to_vec());
    }
    if times.len() < 2 {
        return Err(Error::Domain(
            "subdivision collapses to fewer than two sample times".into(),
        ));
    }
    PointPath::new(times, points)
}

/// The level-2 lift of the full-resolution piecewise-linear path. Serves as
/// the reference group path of an experiment; all coarser approximants should
/// be derived from the same sample so comparisons are coupled.
pub fn reference_lift(b: &BrownianSample) -> SampledRoughPath {
    sig_pwl(&b.to_point_path(), 2).expect("dyadic grid spans [0, 1]")
}

/// Pointwise dilation by `√α`: level-1 scales by `√α`, level-2 by `α`.
pub fn scale_lift(alpha: f64, x: &SampledRoughPath) -> Result<SampledRoughPath> {
    if alpha <= 0.0 {
        return Err(Error::Domain(format!("scaling needs α > 0, got {alpha}")));
    }
    let lam = alpha.sqrt();
    let values = x.values().iter().map(|g| g.dilate(lam)).collect();
    SampledRoughPath::new(Subdivision::new(x.times().to_vec())?, values, x.p())
}
