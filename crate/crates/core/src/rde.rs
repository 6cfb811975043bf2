//! Differential equations driven by sampled paths: a classical fourth-order
//! reference solver for piecewise-linear drivers, a level-2 one-step scheme
//! for group-valued drivers with drift, compensated rough integration of
//! one-forms, and a registry of scenarios whose initial condition and vector
//! fields may depend on the whole driving sample.
//!
//! # The level-2 step
//!
//! Over a grid step `(s, t)` with driver increment `X = (1, X¹, X²)` the state
//! advances by
//!
//! ```text
//! y ← y + V0(y)·(t−s) + Σ_i V_i(y)·X¹_i + Σ_{i,j} DV_i(y)[V_j(y)]·X²_{(j,i)}
//! ```
//!
//! with `X²_{(j,i)} = ∫ x^j dx^i` in the crate-wide index convention. Drift is
//! first order only; the neglected mixed drift–noise corrections are
//! `O(mesh^{3/2})` and do not affect the targeted convergence orders. On
//! smooth drivers the scheme converges at order 2 to the classical solution,
//! which is what the reference solver provides.

use std::sync::Arc;

use crate::brownian::BrownianSample;
use crate::error::{Error, Result};
use crate::lift::sig_pwl;
use crate::path::{PointPath, SampledRoughPath};

/// Declared smoothness metadata; informational, never verified numerically.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LipschitzMeta {
    pub gamma: f64,
    pub bound: f64,
}

impl Default for LipschitzMeta {
    fn default() -> Self {
        LipschitzMeta { gamma: f64::INFINITY, bound: f64::INFINITY }
    }
}

type VecFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

/// A vector field on `R^n` with its Jacobian.
#[derive(Clone)]
pub struct VectorField {
    dim: usize,
    value: VecFn,
    /// Row-major `n×n` Jacobian, entry `(r, c) = ∂V_r/∂y_c`.
    jacobian: VecFn,
}

impl std::fmt::Debug for VectorField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("VectorField").field("dim", &self.dim).finish()
    }
}

impl VectorField {
    pub fn from_fns<V, J>(dim: usize, value: V, jacobian: J) -> Self
    where
        V: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
        J: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        VectorField { dim, value: Arc::new(value), jacobian: Arc::new(jacobian) }
    }

    /// Affine field `V(y) = A y + b` with constant Jacobian `A` (row-major).
    pub fn affine(dim: usize, a: Vec<f64>, b: Vec<f64>) -> Self {
        assert_eq!(a.len(), dim * dim);
        assert_eq!(b.len(), dim);
        let a2 = a.clone();
        VectorField::from_fns(
            dim,
            move |y| {
                (0..dim)
                    .map(|r| b[r] + (0..dim).map(|c| a[r * dim + c] * y[c]).sum::<f64>())
                    .collect()
            },
            move |_| a2.clone(),
        )
    }

    /// Identically zero field.
    pub fn zero(dim: usize) -> Self {
        VectorField::from_fns(dim, move |_| vec![0.0; dim], move |_| vec![0.0; dim * dim])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn value(&self, y: &[f64]) -> Vec<f64> {
        (self.value)(y)
    }

    pub fn jacobian(&self, y: &[f64]) -> Vec<f64> {
        (self.jacobian)(y)
    }
}

/// Drift `V0` plus diffusion fields `V1 … Vd` on `R^n`.
#[derive(Debug, Clone)]
pub struct VectorFieldSet {
    pub state_dim: usize,
    pub driver_dim: usize,
    pub drift: VectorField,
    pub diffusion: Vec<VectorField>,
    /// Declared `(γ, bound)` for the diffusion fields, informational only.
    pub lipschitz: LipschitzMeta,
}

impl VectorFieldSet {
    pub fn new(drift: VectorField, diffusion: Vec<VectorField>) -> Self {
        let state_dim = drift.dim();
        assert!(!diffusion.is_empty(), "need at least one diffusion field");
        assert!(diffusion.iter().all(|v| v.dim() == state_dim));
        VectorFieldSet {
            state_dim,
            driver_dim: diffusion.len(),
            drift,
            diffusion,
            lipschitz: LipschitzMeta::default(),
        }
    }

    pub fn with_lipschitz(mut self, meta: LipschitzMeta) -> Self {
        self.lipschitz = meta;
        self
    }

    /// Largest relative deviation between the declared Jacobians and central
    /// finite differences of the values, over the probe points.
    pub fn jacobian_probe_error(&self, probes: &[Vec<f64>]) -> f64 {
        let mut worst = 0.0f64;
        for field in std::iter::once(&self.drift).chain(&self.diffusion) {
            for y in probes {
                worst = worst.max(jacobian_rel_err(field, y));
            }
        }
        worst
    }
}

fn jacobian_rel_err(field: &VectorField, y: &[f64]) -> f64 {
    let n = field.dim();
    let jac = field.jacobian(y);
    let mut worst = 0.0f64;
    for c in 0..n {
        let h = 1e-6 * (1.0 + y[c].abs());
        let mut yp = y.to_vec();
        let mut ym = y.to_vec();
        yp[c] += h;
        ym[c] -= h;
        let fp = field.value(&yp);
        let fm = field.value(&ym);
        for r in 0..n {
            let fd = (fp[r] - fm[r]) / (2.0 * h);
            let rel = (fd - jac[r * n + c]).abs() / (1.0 + jac[r * n + c].abs());
            worst = worst.max(rel);
        }
    }
    worst
}

/// One-form `θ: R^d → Hom(R^d, R^n)` with its derivative.
#[derive(Clone)]
pub struct OneForm {
    driver_dim: usize,
    target_dim: usize,
    /// Row-major `n×d` matrix value.
    value: VecFn,
    /// Flat `n×d×d` derivative, entry `((a·d + j)·d + k) = ∂θ_{a,j}/∂x_k`.
    derivative: VecFn,
    pub lipschitz: LipschitzMeta,
}

impl std::fmt::Debug for OneForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("OneForm")
            .field("driver_dim", &self.driver_dim)
            .field("target_dim", &self.target_dim)
            .finish()
    }
}

impl OneForm {
    pub fn from_fns<V, D>(driver_dim: usize, target_dim: usize, value: V, derivative: D) -> Self
    where
        V: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
        D: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        OneForm {
            driver_dim,
            target_dim,
            value: Arc::new(value),
            derivative: Arc::new(derivative),
            lipschitz: LipschitzMeta::default(),
        }
    }

    /// Constant one-form with matrix `a` (row-major `n×d`).
    pub fn constant(driver_dim: usize, target_dim: usize, a: Vec<f64>) -> Self {
        assert_eq!(a.len(), driver_dim * target_dim);
        let zeros = vec![0.0; target_dim * driver_dim * driver_dim];
        OneForm::from_fns(driver_dim, target_dim, move |_| a.clone(), move |_| zeros.clone())
    }

    pub fn driver_dim(&self) -> usize {
        self.driver_dim
    }

    pub fn target_dim(&self) -> usize {
        self.target_dim
    }

    pub fn value(&self, x: &[f64]) -> Vec<f64> {
        (self.value)(x)
    }

    pub fn derivative(&self, x: &[f64]) -> Vec<f64> {
        (self.derivative)(x)
    }

    /// Largest relative deviation between the declared derivative and central
    /// finite differences over probe points.
    pub fn derivative_probe_error(&self, probes: &[Vec<f64>]) -> f64 {
        let (d, n) = (self.driver_dim, self.target_dim);
        let mut worst = 0.0f64;
        for x in probes {
            let der = self.derivative(x);
            for k in 0..d {
                let h = 1e-6 * (1.0 + x[k].abs());
                let mut xp = x.to_vec();
                let mut xm = x.to_vec();
                xp[k] += h;
                xm[k] -= h;
                let fp = self.value(&xp);
                let fm = self.value(&xm);
                for a in 0..n {
                    for j in 0..d {
                        let fd = (fp[a * d + j] - fm[a * d + j]) / (2.0 * h);
                        let want = der[(a * d + j) * d + k];
                        let rel = (fd - want).abs() / (1.0 + want.abs());
                        worst = worst.max(rel);
                    }
                }
            }
        }
        worst
    }
}

const DIVERGENCE_GUARD: f64 = 1e12;

fn check_state(y: &[f64], t: f64) -> Result<()> {
    if y.iter().any(|v| !v.is_finite() || v.abs() > DIVERGENCE_GUARD) {
        return Err(Error::Divergence { time: t });
    }
    Ok(())
}

/// Classical solve of `dy = V0(y) dt + V(y) dx` along a piecewise-linear
/// driver: on each segment the slope is constant, so a fourth-order one-step
/// method applies, sub-stepped so the local error stays near 1e-10 on
/// unit-scale problems. Returns the solution at the driver's sample times.
pub fn solve_ode_ref(vf: &VectorFieldSet, x: &PointPath, y0: &[f64]) -> Result<PointPath> {
    if x.dim() != vf.driver_dim {
        return Err(Error::Shape(format!(
            "driver dimension {} vs field set {}",
            x.dim(),
            vf.driver_dim
        )));
    }
    if y0.len() != vf.state_dim {
        return Err(Error::Shape(format!(
            "initial state dimension {} vs field set {}",
            y0.len(),
            vf.state_dim
        )));
    }
    let n = vf.state_dim;
    let mut y = y0.to_vec();
    let mut out = Vec::with_capacity(x.len());
    out.push(y.clone());
    for seg in 0..x.len() - 1 {
        let slope = x.slope(seg);
        let seg_len = x.times()[seg + 1] - x.times()[seg];
        let slope_mag = slope.iter().map(|c| c * c).sum::<f64>().sqrt();
        // (h·(1 + |slope|))^5 ≈ 1e-10 gives h·(1 + |slope|) ≈ 0.01
        let sub = ((seg_len * (1.0 + slope_mag)) / 0.01).ceil().max(1.0) as usize;
        let h = seg_len / sub as f64;
        let rhs = |y: &[f64]| -> Vec<f64> {
            let mut f = vf.drift.value(y);
            for (i, field) in vf.diffusion.iter().enumerate() {
                let v = field.value(y);
                for a in 0..n {
                    f[a] += slope[i] * v[a];
                }
            }
            f
        };
        for step in 0..sub {
            let k1 = rhs(&y);
            let y2: Vec<f64> = (0..n).map(|a| y[a] + 0.5 * h * k1[a]).collect();
            let k2 = rhs(&y2);
            let y3: Vec<f64> = (0..n).map(|a| y[a] + 0.5 * h * k2[a]).collect();
            let k3 = rhs(&y3);
            let y4: Vec<f64> = (0..n).map(|a| y[a] + h * k3[a]).collect();
            let k4 = rhs(&y4);
            for a in 0..n {
                y[a] += h / 6.0 * (k1[a] + 2.0 * k2[a] + 2.0 * k3[a] + k4[a]);
            }
            check_state(&y, x.times()[seg] + (step + 1) as f64 * h)?;
        }
        out.push(y.clone());
    }
    PointPath::new(x.times().to_vec(), out)
}

/// Level-2 one-step solve of `dy = V0(y) dt + V(y) dx` along a group-valued
/// driver; see the module docs for the step formula. Returns the solution at
/// the driver's grid times.
#[allow(clippy::needless_range_loop)] // block indices address several arrays at once
pub fn solve_rde2(vf: &VectorFieldSet, x: &SampledRoughPath, y0: &[f64]) -> Result<PointPath> {
    if x.level() != 2 {
        return Err(Error::Domain("the step scheme needs a level-2 driver".into()));
    }
    if x.dim() != vf.driver_dim {
        return Err(Error::Shape(format!(
            "driver dimension {} vs field set {}",
            x.dim(),
            vf.driver_dim
        )));
    }
    if y0.len() != vf.state_dim {
        return Err(Error::Shape(format!(
            "initial state dimension {} vs field set {}",
            y0.len(),
            vf.state_dim
        )));
    }
    let n = vf.state_dim;
    let d = vf.driver_dim;
    let times = x.times();
    let mut y = y0.to_vec();
    let mut out = Vec::with_capacity(times.len());
    out.push(y.clone());

    let mut x1 = vec![0.0; d];
    let mut x2 = vec![0.0; d * d];
    for k in 0..times.len() - 1 {
        let (gs, gt) = (x.value(k), x.value(k + 1));
        // increment blocks without allocating group elements:
        // X¹ = g¹_t − g¹_s, X² = g²_t − g²_s − g¹_s ⊗ X¹
        for c in 0..d {
            x1[c] = gt.level1()[c] - gs.level1()[c];
        }
        for r in 0..d {
            for c in 0..d {
                x2[r * d + c] =
                    gt.level2()[r * d + c] - gs.level2()[r * d + c] - gs.level1()[r] * x1[c];
            }
        }
        let dt = times[k + 1] - times[k];

        let drift = vf.drift.value(&y);
        let vals: Vec<Vec<f64>> = vf.diffusion.iter().map(|f| f.value(&y)).collect();
        let jacs: Vec<Vec<f64>> = vf.diffusion.iter().map(|f| f.jacobian(&y)).collect();

        let mut ynew = y.clone();
        for a in 0..n {
            ynew[a] += drift[a] * dt;
        }
        for (i, v) in vals.iter().enumerate() {
            for a in 0..n {
                ynew[a] += v[a] * x1[i];
            }
        }
        // second-order term: DV_i(y)[V_j(y)] weighted by X²_{(j,i)}
        for i in 0..d {
            let jac = &jacs[i];
            for j in 0..d {
                let w = x2[j * d + i];
                if w == 0.0 {
                    continue;
                }
                let vj = &vals[j];
                for a in 0..n {
                    let mut dot = 0.0;
                    for b in 0..n {
                        dot += jac[a * n + b] * vj[b];
                    }
                    ynew[a] += w * dot;
                }
            }
        }
        check_state(&ynew, times[k + 1])?;
        y = ynew;
        out.push(y.clone());
    }
    PointPath::new(times.to_vec(), out)
}

/// Compensated rough integral `∫ θ(x) dx` along a level-2 driver: the
/// increment over each grid step is `θ(x¹_s)·X¹ + Dθ(x¹_s)·X²`, accumulated
/// from zero. The result is returned as the lift of the accumulated path
/// (level 2 filled in by the canonical piecewise-linear completion).
#[allow(clippy::needless_range_loop)]
pub fn rough_integral(theta: &OneForm, x: &SampledRoughPath) -> Result<SampledRoughPath> {
    if x.level() != 2 {
        return Err(Error::Domain("rough integration needs a level-2 driver".into()));
    }
    if x.dim() != theta.driver_dim {
        return Err(Error::Shape(format!(
            "driver dimension {} vs one-form {}",
            x.dim(),
            theta.driver_dim
        )));
    }
    let d = theta.driver_dim;
    let n = theta.target_dim;
    let times = x.times();
    let mut acc = vec![0.0; n];
    let mut points = Vec::with_capacity(times.len());
    points.push(acc.clone());
    let mut x1 = vec![0.0; d];
    let mut x2 = vec![0.0; d * d];
    for k in 0..times.len() - 1 {
        let (gs, gt) = (x.value(k), x.value(k + 1));
        for c in 0..d {
            x1[c] = gt.level1()[c] - gs.level1()[c];
        }
        for r in 0..d {
            for c in 0..d {
                x2[r * d + c] =
                    gt.level2()[r * d + c] - gs.level2()[r * d + c] - gs.level1()[r] * x1[c];
            }
        }
        let base = gs.level1();
        let th = theta.value(base);
        let dth = theta.derivative(base);
        for a in 0..n {
            let mut inc = 0.0;
            for j in 0..d {
                inc += th[a * d + j] * x1[j];
                for kk in 0..d {
                    inc += dth[(a * d + j) * d + kk] * x2[kk * d + j];
                }
            }
            acc[a] += inc;
        }
        points.push(acc.clone());
    }
    let path = PointPath::new(times.to_vec(), points)?;
    Ok(sig_pwl(&path, 2)?.with_p(x.p()))
}

/// Solution map of a driven differential equation evaluated on times.
pub type ClosedForm = Arc<dyn Fn(&[f64]) -> Vec<Vec<f64>> + Send + Sync>;

/// A reproducible experiment setup derived from one driving sample: initial
/// condition, vector fields (both possibly functionals of the whole sample)
/// and, when available, a closed-form solution for validation.
#[derive(Clone)]
pub struct Scenario {
    pub name: String,
    pub y0: Vec<f64>,
    pub fields: VectorFieldSet,
    pub closed_form: Option<ClosedForm>,
}

impl std::fmt::Debug for Scenario {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Scenario")
            .field("name", &self.name)
            .field("y0", &self.y0)
            .field("closed_form", &self.closed_form.is_some())
            .finish()
    }
}

/// Scenario names accepted by [`build_anticipating_scenario`].
pub const SCENARIO_NAMES: [&str; 4] = [
    "classical_circle",
    "driftless_circle",
    "anticipating_linear",
    "random_scale_linear",
];

/// Builds a named scenario from a driving sample. The driver sample comes
/// first; initial condition and fields are deterministic functionals of it,
/// so non-adapted setups are expressed naturally — the solvers themselves
/// never look at adaptedness.
///
/// * `classical_circle` — deterministic affine, non-commuting fields on `R²`
///   with a mild drift; the control case, no closed form (validate against
///   the classical solver).
/// * `driftless_circle` — the same diffusion fields with zero drift; the
///   variant for clean second-order step-scheme comparisons (the drift is
///   handled at first order, so it caps the smooth-driver rate at one).
/// * `anticipating_linear` — `n = d = 1`, `y0 = B_1`, `V(y) = y`, no drift;
///   closed form `y_t = B_1 · exp(B_t)`.
/// * `random_scale_linear` — `n = d = 1`, `V(y) = (1 + max_t |B_t|)^{-1} y`;
///   closed form `y_t = exp(c B_t)` with that same factor `c ≤ 1`.
pub fn build_anticipating_scenario(name: &str, b: &BrownianSample) -> Result<Scenario> {
    match name {
        "classical_circle" | "driftless_circle" => {
            if b.dim() != 2 {
                return Err(Error::Shape(format!(
                    "{name} needs a 2-dimensional driver, got {}",
                    b.dim()
                )));
            }
            let drift = if name == "classical_circle" {
                VectorField::affine(2, vec![-0.2, 0.0, 0.0, -0.2], vec![0.0, 0.0])
            } else {
                VectorField::zero(2)
            };
            let v1 = VectorField::affine(2, vec![0.0, -1.0, 1.0, 0.0], vec![0.3, 0.0]);
            let v2 = VectorField::affine(2, vec![0.4, 0.1, 0.1, -0.4], vec![0.0, 0.2]);
            Ok(Scenario {
                name: name.into(),
                y0: vec![1.0, 0.0],
                fields: VectorFieldSet::new(drift, vec![v1, v2])
                    .with_lipschitz(LipschitzMeta { gamma: 3.0, bound: 1.5 }),
                closed_form: None,
            })
        }
        "anticipating_linear" => {
            if b.dim() != 1 {
                return Err(Error::Shape(format!(
                    "anticipating_linear needs a 1-dimensional driver, got {}",
                    b.dim()
                )));
            }
            let b_final = b.point(b.len() - 1)[0];
            let v1 = VectorField::affine(1, vec![1.0], vec![0.0]);
            let sample = b.clone();
            let closed: ClosedForm = Arc::new(move |times: &[f64]| {
                times
                    .iter()
                    .map(|&t| vec![b_final * sample.value_at(t)[0].exp()])
                    .collect()
            });
            Ok(Scenario {
                name: name.into(),
                y0: vec![b_final],
                fields: VectorFieldSet::new(VectorField::zero(1), vec![v1])
                    .with_lipschitz(LipschitzMeta { gamma: 3.0, bound: 1.0 }),
                closed_form: Some(closed),
            })
        }
        "random_scale_linear" => {
            if b.dim() != 1 {
                return Err(Error::Shape(format!(
                    "random_scale_linear needs a 1-dimensional driver, got {}",
                    b.dim()
                )));
            }
            let c = 1.0 / (1.0 + b.max_abs());
            let v1 = VectorField::affine(1, vec![c], vec![0.0]);
            let sample = b.clone();
            let closed: ClosedForm = Arc::new(move |times: &[f64]| {
                times
                    .iter()
                    .map(|&t| vec![(c * sample.value_at(t)[0]).exp()])
                    .collect()
            });
            Ok(Scenario {
                name: name.into(),
                y0: vec![1.0],
                fields: VectorFieldSet::new(VectorField::zero(1), vec![v1])
                    .with_lipschitz(LipschitzMeta { gamma: 3.0, bound: c }),
                closed_form: Some(closed),
            })
        }
        other => Err(Error::UnknownScenario(other.into())),
    }
}
