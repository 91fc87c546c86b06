//! Forward operators: optical depth, the attenuated ray transform of order k
//! (stationary and causal non-stationary), the longitudinal ray transform,
//! its tensor-valued form and the back-projection.
//!
//! Every ray integral is truncated at the exit length of the domain ball.
//! The panel count depends only on the step and the ball diameter,
//! so the discrete operator depends smoothly on x and ξ.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{ArtError, Result};
use crate::fields::{AbsorptionSpec, PhaseField, TensorFieldSpec};
use crate::geometry::{gauss_legendre, ray_exit_length, BallDomain, Direction, Point3, SphereGrid};
use crate::tensor::{component_count, SymTensor};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadRule {
    /// Composite Simpson on an even number of panels.
    Simpson,
    /// Composite 4-point Gauss–Legendre.
    GaussPanel4,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayQuadSpec {
    pub step: f64,
    pub rule: QuadRule,
    pub domain: BallDomain,
}

impl Default for RayQuadSpec {
    fn default() -> Self {
        let domain = BallDomain::default();
        RayQuadSpec {
            step: 1e-3 * domain.diameter(),
            rule: QuadRule::Simpson,
            domain,
        }
    }
}

impl RayQuadSpec {
    pub fn new(step: f64, rule: QuadRule, domain: BallDomain) -> Result<Self> {
        if !(step > 0.0 && step.is_finite()) {
            return Err(ArtError::arg(format!(
                "ray step must be positive, got {step}"
            )));
        }
        Ok(RayQuadSpec { step, rule, domain })
    }

    pub fn with_step(self, step: f64) -> Result<Self> {
        RayQuadSpec::new(step, self.rule, self.domain)
    }

    pub fn with_rule(self, rule: QuadRule) -> Self {
        RayQuadSpec { rule, ..self }
    }

    /// Panel count for a ray of length `upper`.
    fn panels(&self, upper: f64) -> usize {
        let n = (upper.max(self.domain.diameter()) / self.step)
            .ceil()
            .max(1.0) as usize;
        match self.rule {
            QuadRule::Simpson => n + n % 2,
            QuadRule::GaussPanel4 => n,
        }
    }
}

/// Quadrature nodes s_i, weights w_i and attenuation exp(−τ(s_i)) along one ray.
#[derive(Debug, Clone, Default)]
pub struct RayNodes {
    pub s: Vec<f64>,
    pub w: Vec<f64>,
    pub atten: Vec<Complex64>,
}

impl RayNodes {
    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }
}

struct GaussPanel {
    x: [f64; 4],
    w: [f64; 4],
    /// m[i][j] = ∫₀^{x_i} ℓ_j(t) dt on [0, 1]
    m: [[f64; 4]; 4],
}

fn gauss_panel() -> &'static GaussPanel {
    static P: OnceLock<GaussPanel> = OnceLock::new();
    P.get_or_init(|| {
        let (gx, gw) = gauss_legendre(4);
        let mut x = [0.0; 4];
        let mut w = [0.0; 4];
        for i in 0..4 {
            x[i] = 0.5 * (gx[i] + 1.0);
            w[i] = 0.5 * gw[i];
        }
        let lag = |j: usize, t: f64| {
            (0..4)
                .filter(|&l| l != j)
                .fold(1.0, |acc, l| acc * (t - x[l]) / (x[j] - x[l]))
        };
        // degree-3 integrand: the 4-point rule on [0, x_i] is exact
        let m: [[f64; 4]; 4] = std::array::from_fn(|i| {
            std::array::from_fn(|j| (0..4).map(|q| w[q] * x[i] * lag(j, x[q] * x[i])).sum())
        });
        GaussPanel { x, w, m }
    })
}

/// Build nodes, weights and cumulative attenuation on [0, upper].
pub fn ray_nodes(
    a: &AbsorptionSpec,
    x: &Point3,
    xi: &Direction,
    upper: f64,
    q: &RayQuadSpec,
) -> Result<RayNodes> {
    if !(upper >= 0.0) {
        return Err(ArtError::arg(format!(
            "ray length must be nonnegative, got {upper}"
        )));
    }
    let n = q.panels(upper);
    let h = upper / n as f64;
    let constant = a.ray_constant(xi);
    let alpha_at = |s: f64| a.eval(&x.along(xi, -s), xi);
    let mut out = RayNodes::default();
    match q.rule {
        QuadRule::Simpson => {
            out.s = (0..=n).map(|j| j as f64 * h).collect();
            out.w = (0..=n)
                .map(|j| {
                    let c = if j == 0 || j == n {
                        1.0
                    } else if j % 2 == 1 {
                        4.0
                    } else {
                        2.0
                    };
                    c * h / 3.0
                })
                .collect();
            out.atten = match constant {
                Some(al) => {
                    let step = (-al * h).exp();
                    let mut v = Complex64::new(1.0, 0.0);
                    (0..=n)
                        .map(|_| {
                            let cur = v;
                            v *= step;
                            cur
                        })
                        .collect()
                }
                None => {
                    let al: Vec<Complex64> = out.s.iter().map(|&s| alpha_at(s)).collect();
                    let mut tau = vec![ZERO; n + 1];
                    for p in (0..n).step_by(2) {
                        let (a0, a1, a2) = (al[p], al[p + 1], al[p + 2]);
                        tau[p + 1] = tau[p] + (a0 * 5.0 + a1 * 8.0 - a2) * (h / 12.0);
                        tau[p + 2] = tau[p] + (a0 + a1 * 4.0 + a2) * (h / 3.0);
                    }
                    tau.iter().map(|t| (-t).exp()).collect()
                }
            };
        }
        QuadRule::GaussPanel4 => {
            let gp = gauss_panel();
            out.s.reserve(4 * n);
            for p in 0..n {
                for i in 0..4 {
                    out.s.push((p as f64 + gp.x[i]) * h);
                    out.w.push(gp.w[i] * h);
                }
            }
            out.atten = match constant {
                Some(al) => {
                    // e^{−α(p + x_i)h} = e^{−αph}·e^{−αx_i h}
                    let inner: Vec<Complex64> =
                        gp.x.iter().map(|xi| (-al * xi * h).exp()).collect();
                    let step = (-al * h).exp();
                    let mut base = Complex64::new(1.0, 0.0);
                    let mut atten = Vec::with_capacity(4 * n);
                    for _ in 0..n {
                        atten.extend(inner.iter().map(|e| base * e));
                        base *= step;
                    }
                    atten
                }
                None => {
                    let mut atten = Vec::with_capacity(4 * n);
                    let mut start = ZERO;
                    for p in 0..n {
                        let al: Vec<Complex64> =
                            (0..4).map(|i| alpha_at(out.s[4 * p + i])).collect();
                        for i in 0..4 {
                            let tau =
                                start + (0..4).fold(ZERO, |acc, j| acc + al[j] * gp.m[i][j]) * h;
                            atten.push((-tau).exp());
                        }
                        start += (0..4).fold(ZERO, |acc, j| acc + al[j] * gp.w[j]) * h;
                    }
                    atten
                }
            };
        }
    }
    Ok(out)
}

/// ∫₀^s α(x − σξ, ξ) dσ.
pub fn optical_depth(
    a: &AbsorptionSpec,
    x: &Point3,
    xi: &Direction,
    s: f64,
    q: &RayQuadSpec,
) -> Result<Complex64> {
    if !(s >= 0.0) {
        return Err(ArtError::arg(format!(
            "optical depth needs s >= 0, got {s}"
        )));
    }
    if let Some(al) = a.ray_constant(xi) {
        return Ok(al * s);
    }
    let n = q.panels(s);
    let n = n + n % 2;
    let h = s / n as f64;
    let mut acc = ZERO;
    for j in 0..=n {
        let c = if j == 0 || j == n {
            1.0
        } else if j % 2 == 1 {
            4.0
        } else {
            2.0
        };
        acc += a.eval(&x.along(xi, -(j as f64) * h), xi) * c;
    }
    Ok(acc * (h / 3.0))
}

fn check_inside(x: &Point3, xi: &Direction, q: &RayQuadSpec) -> Result<f64> {
    ray_exit_length(x, xi, &q.domain)
}

/// [u_0, …, u_kmax] on prepared nodes; `src(s)` is the source along the ray.
fn moments_on_nodes(
    kmax: usize,
    nodes: &RayNodes,
    mut src: impl FnMut(f64) -> Complex64,
) -> Vec<Complex64> {
    let mut out = vec![ZERO; kmax + 1];
    for i in 0..nodes.len() {
        let s = nodes.s[i];
        let v = src(s);
        if v == ZERO {
            continue;
        }
        let mut g = v * nodes.atten[i] * nodes.w[i];
        for o in out.iter_mut() {
            *o += g;
            g *= s;
        }
    }
    out
}

/// u_k(x, ξ) = ∫₀^{s*} s^k exp(−τ(s)) f(x − sξ, ξ) ds.
pub fn art_k(
    k: usize,
    f: &PhaseField,
    a: &AbsorptionSpec,
    x: &Point3,
    xi: &Direction,
    q: &RayQuadSpec,
) -> Result<Complex64> {
    Ok(art_multi(k, f, a, x, xi, q)?[k])
}

/// [u_0, …, u_kmax] from a single pass along the ray.
pub fn art_multi(
    kmax: usize,
    f: &PhaseField,
    a: &AbsorptionSpec,
    x: &Point3,
    xi: &Direction,
    q: &RayQuadSpec,
) -> Result<Vec<Complex64>> {
    let upper = check_inside(x, xi, q)?;
    let nodes = ray_nodes(a, x, xi, upper, q)?;
    Ok(moments_on_nodes(kmax, &nodes, |s| {
        f.eval_static(&x.along(xi, -s), xi)
    }))
}

/// Non-stationary transform at time t; a causal source is integrated up to
/// min(s*, t), anything else up to s*.
pub fn art_k_time(
    k: usize,
    f: &PhaseField,
    a: &AbsorptionSpec,
    t: f64,
    x: &Point3,
    xi: &Direction,
    q: &RayQuadSpec,
) -> Result<Complex64> {
    Ok(art_multi_time(k, f, a, t, x, xi, q)?[k])
}

pub fn art_multi_time(
    kmax: usize,
    f: &PhaseField,
    a: &AbsorptionSpec,
    t: f64,
    x: &Point3,
    xi: &Direction,
    q: &RayQuadSpec,
) -> Result<Vec<Complex64>> {
    if !t.is_finite() {
        return Err(ArtError::arg(format!("time must be finite, got {t}")));
    }
    let exit = check_inside(x, xi, q)?;
    let upper = if f.is_causal() { exit.min(t) } else { exit };
    if upper <= 0.0 {
        return Ok(vec![ZERO; kmax + 1]);
    }
    let nodes = ray_nodes(a, x, xi, upper, q)?;
    Ok(moments_on_nodes(kmax, &nodes, |s| {
        f.eval(t - s, &x.along(xi, -s), xi)
    }))
}

/// Longitudinal ray transform ∫₀^{s*} ⟨W(x − sξ), ξ^m⟩ ds.
pub fn lrt(w: &TensorFieldSpec, x: &Point3, xi: &Direction, q: &RayQuadSpec) -> Result<Complex64> {
    art_k(
        0,
        &PhaseField::tensor_generated(w.clone()),
        &AbsorptionSpec::zero(),
        x,
        xi,
        q,
    )
}

/// (1/4π²) ∫ ξ^{i1}…ξ^{im} h(x, ξ) dλ(ξ) for every sorted multi-index.
pub fn back_projection_lrt<H>(mut h: H, m: usize, x: &Point3, grid: &SphereGrid) -> SymTensor
where
    H: FnMut(&Point3, &Direction) -> Complex64,
{
    let mut out = vec![ZERO; component_count(m)];
    for (xi, w) in grid.nodes.iter().zip(&grid.weights) {
        let v = h(x, xi) * *w;
        if v == ZERO {
            continue;
        }
        let p = SymTensor::direction_power(xi, m);
        for (o, c) in out.iter_mut().zip(p.components()) {
            *o += v * c;
        }
    }
    let scale = 1.0 / (4.0 * PI * PI);
    SymTensor::from_components(m, out.into_iter().map(|v| v * scale).collect())
        .expect("component count matches rank")
}

/// Componentwise ∫₀^{s*} s^k exp(−τ(s)) W(x − sξ) ds.
pub fn art_tensor(
    k: usize,
    w: &TensorFieldSpec,
    a: &AbsorptionSpec,
    x: &Point3,
    xi: &Direction,
    q: &RayQuadSpec,
) -> Result<SymTensor> {
    let upper = check_inside(x, xi, q)?;
    let nodes = ray_nodes(a, x, xi, upper, q)?;
    let mut out = vec![ZERO; component_count(w.rank)];
    for i in 0..nodes.len() {
        let s = nodes.s[i];
        let wv = w.eval(&x.along(xi, -s));
        let g = nodes.atten[i] * nodes.w[i] * s.powi(k as i32);
        for (o, c) in out.iter_mut().zip(wv.components()) {
            *o += g * c;
        }
    }
    SymTensor::from_components(w.rank, out)
}

/// Imaging presets. `Wave(kw)` gives u_1 with α = −i·kw, so the attenuation
/// is e^{i·kw·s}; `Photo(ε)` gives u_0 with α = ε.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Preset {
    Wave { kw: f64 },
    Photo { eps: f64 },
}

impl Preset {
    pub fn order(&self) -> usize {
        match self {
            Preset::Wave { .. } => 1,
            Preset::Photo { .. } => 0,
        }
    }

    pub fn absorption(&self) -> Result<AbsorptionSpec> {
        match *self {
            Preset::Wave { kw } => AbsorptionSpec::constant(Complex64::new(0.0, -kw)),
            Preset::Photo { eps } => AbsorptionSpec::constant(Complex64::new(eps, 0.0)),
        }
    }
}
