use num_complex::Complex64;
use rayon::prelude::*;

pub use super::algebra::Cor42Convention;
use super::algebra::{cor42_expansion, delta_power, thm41_expansion, Expr, Term};
use super::{MomentRequest, MomentTable, SourceMomentTable};
use crate::art::RayQuadSpec;
use crate::error::{ArtError, Result};
use crate::fields::{AbsorptionSpec, PhaseField};
use crate::geometry::{Grid3, SphereGrid};
use crate::report::{max_and_rms, observed_order, ResidualReport, ToleranceModel, Verdict};
use crate::tensor::{convolve_tensor, divergence_power, SymTensorGridField};

/// Source, absorption and angular/ray discretization shared by the grid checks.
#[derive(Debug, Clone, Copy)]
pub struct MomentSource<'a> {
    pub f: &'a PhaseField,
    pub a: &'a AbsorptionSpec,
    pub sgrid: &'a SphereGrid,
    pub q: RayQuadSpec,
}

/// A moment identity checked node-wise on a grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GridIdentity {
    /// δE_kp against its first-order right-hand side; k = 0 uses f_{p−1}.
    Divergence { k: usize, p: usize },
    /// δ^n E_{(k+n)(p+n)} against the alternating binomial sum.
    Thm41 { n: usize, k: usize, p: usize },
    /// δ^n E_{0(p+n)} against the source expansion.
    Cor42 {
        n: usize,
        p: usize,
        conv: Cor42Convention,
    },
    /// Time-dependent binomial sum with β = ∂_t + α, at time t.
    Thm43 {
        n: usize,
        k: usize,
        p: usize,
        t: f64,
    },
    /// Time-dependent source expansion at time t.
    Thm43Source {
        n: usize,
        p: usize,
        t: f64,
        conv: Cor42Convention,
    },
}

impl GridIdentity {
    pub fn depth(&self) -> usize {
        match *self {
            GridIdentity::Divergence { .. } => 1,
            GridIdentity::Thm41 { n, .. }
            | GridIdentity::Cor42 { n, .. }
            | GridIdentity::Thm43 { n, .. }
            | GridIdentity::Thm43Source { n, .. } => n,
        }
    }

    fn time(&self) -> Option<f64> {
        match *self {
            GridIdentity::Thm43 { t, .. } | GridIdentity::Thm43Source { t, .. } => Some(t),
            _ => None,
        }
    }

    fn kp(&self) -> (usize, usize) {
        match *self {
            GridIdentity::Divergence { k, p } => (k, p),
            GridIdentity::Thm41 { n, k, p } | GridIdentity::Thm43 { n, k, p, .. } => (k + n, p + n),
            GridIdentity::Cor42 { n, p, .. } | GridIdentity::Thm43Source { n, p, .. } => (0, p + n),
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Beta {
    Const(Complex64),
    Time { alpha: Complex64, h_t: f64 },
}

fn constant_alpha(a: &AbsorptionSpec) -> Result<Complex64> {
    a.as_constant()
        .ok_or_else(|| ArtError::arg("this recurrence needs a constant α"))
}

fn lookup<'t>(
    term: &Term,
    e: &'t MomentTable,
    s: Option<&'t SourceMomentTable>,
) -> Result<&'t SymTensorGridField> {
    match *term {
        Term::E { k, p } => e.get(k, p),
        Term::Source { m, p } => s
            .ok_or_else(|| ArtError::arg("source moments missing from the table set"))?
            .get(m, p),
    }
}

/// Σ c(β)·term over tables at time offsets −c..c (one table when stationary).
fn eval_expr(
    expr: &Expr,
    e: &[MomentTable],
    s: &[SourceMomentTable],
    beta: Beta,
) -> Result<SymTensorGridField> {
    let center = e.len() / 2;
    let mut out: Option<SymTensorGridField> = None;
    for (term, poly) in expr.terms() {
        for (d, &c) in poly.coeffs().iter().enumerate() {
            if c == 0 {
                continue;
            }
            let piece = match beta {
                Beta::Const(alpha) => {
                    let x = lookup(term, &e[center], s.get(center))?;
                    x.scale(alpha.powu(d as u32) * c as f64)
                }
                Beta::Time { alpha, h_t } => {
                    if d > center {
                        return Err(ArtError::arg(format!(
                            "β^{d} needs {d} time levels on each side"
                        )));
                    }
                    let mut series: Vec<SymTensorGridField> = (center - d..=center + d)
                        .map(|i| lookup(term, &e[i], s.get(i)).cloned())
                        .collect::<Result<_>>()?;
                    for _ in 0..d {
                        series = (0..series.len() - 2)
                            .map(|j| {
                                series[j + 2]
                                    .axpy(Complex64::new(-1.0, 0.0), &series[j])?
                                    .scale(Complex64::new(0.5 / h_t, 0.0))
                                    .axpy(alpha, &series[j + 1])
                            })
                            .collect::<Result<_>>()?;
                    }
                    series[0].scale(Complex64::new(c as f64, 0.0))
                }
            };
            out = Some(match out {
                None => piece,
                Some(acc) => acc.axpy(Complex64::new(1.0, 0.0), &piece)?,
            });
        }
    }
    out.ok_or_else(|| ArtError::arg("empty expansion"))
}

/// Σ_{j=0}^{n} (−1)^j C(n,j) α^j (k+n)!/(k+j)! E_{(k+j)p}, node by node.
pub fn thm41_rhs(
    n: usize,
    k: usize,
    p: usize,
    alpha: Complex64,
    table: &MomentTable,
) -> Result<SymTensorGridField> {
    if n < 1 {
        return Err(ArtError::arg("n must be at least 1"));
    }
    eval_expr(
        &thm41_expansion(n, k, p),
        std::slice::from_ref(table),
        &[],
        Beta::Const(alpha),
    )
}

/// Source-form right-hand side for δ^n E_{0(p+n)}.
pub fn cor42_rhs(
    n: usize,
    p: usize,
    alpha: Complex64,
    conv: Cor42Convention,
    e: &MomentTable,
    sources: &SourceMomentTable,
) -> Result<SymTensorGridField> {
    if n < 1 {
        return Err(ArtError::arg("n must be at least 1"));
    }
    eval_expr(
        &cor42_expansion(n, p, conv),
        std::slice::from_ref(e),
        std::slice::from_ref(sources),
        Beta::Const(alpha),
    )
}

fn max_rank(a: &AbsorptionSpec) -> usize {
    match a {
        AbsorptionSpec::XiPolynomial {
            eps_terms,
            rho_terms,
            ..
        } => eps_terms
            .iter()
            .chain(rho_terms)
            .map(|t| t.rank)
            .max()
            .unwrap_or(0),
        _ => 0,
    }
}

fn source_step(grid: &Grid3) -> f64 {
    0.25 * grid.spacing().iter().cloned().fold(f64::INFINITY, f64::min)
}

/// (LHS − RHS) of the identity on `grid` plus the largest |RHS|.
pub(crate) fn residual_field(
    id: &GridIdentity,
    src: &MomentSource,
    grid: &Grid3,
    h_t: f64,
) -> Result<(SymTensorGridField, f64)> {
    let (lk, lp) = id.kp();
    let n = id.depth();
    if lp < n {
        return Err(ArtError::arg(format!(
            "moment rank {lp} too small for {n} divergences"
        )));
    }
    let table = |kmax: usize, pmax: usize, time: Option<f64>, alpha_weighted: bool| {
        let req = MomentRequest {
            kmax,
            pmax,
            time,
            alpha_weighted,
        };
        MomentTable::compute(&req, src.f, src.a, grid, src.sgrid, &src.q)
    };
    let sources = |mmax: usize, pmax: usize, t: f64| {
        SourceMomentTable::compute(mmax, pmax, src.f, t, grid, src.sgrid, source_step(grid))
    };

    let (lhs_table, rhs) = match *id {
        GridIdentity::Divergence { k, p } => {
            if let Some(alpha) = src.a.as_constant() {
                let e = table(k, p, None, false)?;
                let s: Vec<SourceMomentTable> = if k == 0 {
                    vec![sources(0, p - 1, 0.0)?]
                } else {
                    vec![]
                };
                let rhs = eval_expr(
                    &delta_power(1, k, p)?,
                    std::slice::from_ref(&e),
                    &s,
                    Beta::Const(alpha),
                )?;
                (e, rhs)
            } else {
                let explicit = !matches!(src.a, AbsorptionSpec::XiPolynomial { .. });
                let e = table(k, p - 1 + max_rank(src.a).max(1), None, explicit)?;
                let mut rhs = if k >= 1 {
                    e.get(k - 1, p - 1)?.scale(Complex64::new(k as f64, 0.0))
                } else {
                    sources(0, p - 1, 0.0)?.get(0, p - 1)?.clone()
                };
                let aterm = if explicit {
                    e.alpha_weighted(k, p - 1)?.clone()
                } else {
                    let mut acc = SymTensorGridField::zeros(p - 1, *grid);
                    for idx in 0..grid.len() {
                        let (c, qs) = src.a.polynomial_terms(&grid.node_at(idx));
                        let mut v = e.get(k, p - 1)?.at(idx).scale(c);
                        for qr in &qs {
                            v = v.add(&convolve_tensor(
                                qr,
                                &e.get(k, p - 1 + qr.rank())?.at(idx),
                            )?)?;
                        }
                        acc.set(idx, &v);
                    }
                    acc
                };
                rhs = rhs.axpy(Complex64::new(-1.0, 0.0), &aterm)?;
                (e, rhs)
            }
        }
        GridIdentity::Thm41 { n, k, p } => {
            let e = table(k + n, p + n, None, false)?;
            let rhs = thm41_rhs(n, k, p, constant_alpha(src.a)?, &e)?;
            (e, rhs)
        }
        GridIdentity::Cor42 { n, p, conv } => {
            let e = table(0, p + n, None, false)?;
            let s = sources(n - 1, p, 0.0)?;
            let rhs = cor42_rhs(n, p, constant_alpha(src.a)?, conv, &e, &s)?;
            (e, rhs)
        }
        GridIdentity::Thm43 { .. } | GridIdentity::Thm43Source { .. } => {
            let alpha = constant_alpha(src.a)?;
            let t = id.time().unwrap_or(0.0);
            let (expr, kmax, with_sources) = match *id {
                GridIdentity::Thm43 { n, k, p, .. } => (thm41_expansion(n, k, p), k + n, false),
                GridIdentity::Thm43Source { n, p, conv, .. } => {
                    (cor42_expansion(n, p, conv), 0, true)
                }
                _ => unreachable!(),
            };
            let times: Vec<f64> = (0..=2 * n)
                .map(|i| t + (i as f64 - n as f64) * h_t)
                .collect();
            let mut es: Vec<MomentTable> = times
                .iter()
                .map(|&ti| table(kmax, lp, Some(ti), false))
                .collect::<Result<_>>()?;
            let ss: Vec<SourceMomentTable> = if with_sources {
                times
                    .iter()
                    .map(|&ti| sources(n - 1, lp - n, ti))
                    .collect::<Result<_>>()?
            } else {
                vec![]
            };
            let rhs = eval_expr(&expr, &es, &ss, Beta::Time { alpha, h_t })?;
            (es.swap_remove(n), rhs)
        }
    };
    let lhs = divergence_power(lhs_table.get(lk, lp)?, n)?;
    let scale = rhs.data.iter().map(|v| v.norm()).fold(0.0, f64::max);
    Ok((lhs.axpy(Complex64::new(-1.0, 0.0), &rhs)?, scale))
}

fn node_norm(field: &SymTensorGridField, idx: usize) -> f64 {
    (0..field.ncomp())
        .map(|c| field.value(c, idx).norm())
        .fold(0.0, f64::max)
}

/// Refinement used to set the tolerance of a grid identity.
#[derive(Debug, Clone, PartialEq)]
pub struct GridCheckConfig {
    /// Number of worst production nodes re-evaluated on refined blocks.
    pub probes: usize,
    /// Refinement factors of the probe blocks.
    pub levels: Vec<usize>,
    /// Time step at the production spacing; scaled with the blocks.
    pub h_t: f64,
    /// Smallest fitted order accepted as convergence of the residual.
    pub min_order: f64,
}

impl Default for GridCheckConfig {
    fn default() -> Self {
        GridCheckConfig {
            probes: 3,
            levels: vec![2, 4, 8],
            h_t: 1.0 / 32.0,
            min_order: 1.5,
        }
    }
}

/// Evaluate an identity on the interior of `grid` and set its tolerance from
/// C·h^p fitted to the residual at the worst nodes on blocks of spacing h/s.
pub fn grid_check(
    identity: &str,
    id: &GridIdentity,
    src: &MomentSource,
    grid: &Grid3,
    cfg: &GridCheckConfig,
) -> Result<ResidualReport> {
    let depth = id.depth();
    let h = grid.spacing()[0];
    let (res, scale) = residual_field(id, src, grid, cfg.h_t)?;
    let interior: Vec<usize> = (0..grid.len())
        .filter(|&i| grid.is_interior(i, depth))
        .collect();
    if interior.is_empty() {
        return Err(ArtError::arg(format!(
            "grid {:?} has no interior nodes at depth {depth}",
            grid.dims
        )));
    }
    let norms: Vec<(usize, f64)> = interior.iter().map(|&i| (i, node_norm(&res, i))).collect();
    let (rmax, rms) = max_and_rms(norms.iter().map(|v| v.1));

    let mut worst = norms.clone();
    worst.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    worst.truncate(cfg.probes.max(1));

    let fits: Vec<(ToleranceModel, Option<f64>)> = worst
        .par_iter()
        .filter_map(|&(idx, _)| {
            let center = grid.node_at(idx);
            let pts: Result<Vec<(f64, f64)>> = cfg
                .levels
                .iter()
                .map(|&s| {
                    let hs = h / s as f64;
                    let block = Grid3::block(center, hs, depth)?;
                    let (r, _) = residual_field(id, src, &block, cfg.h_t / s as f64)?;
                    Ok((hs, node_norm(&r, block.index(depth, depth, depth))))
                })
                .collect();
            match pts {
                Ok(pts) => {
                    let order = match pts.len() {
                        0 | 1 => None,
                        l => observed_order(pts[l - 2].1, pts[l - 1].1),
                    };
                    ToleranceModel::fit(&pts).map(|m| Ok((m, order)))
                }
                Err(e) => Some(Err(e)),
            }
        })
        .collect::<Result<_>>()?;

    let floor = 64.0 * f64::EPSILON * scale.max(f64::MIN_POSITIVE) * (1.0 / h).powi(depth as i32);
    let tolerance = fits
        .iter()
        .map(|(m, _)| ToleranceModel::tolerance(Some(m), h, floor))
        .fold(floor, f64::max);
    let model = fits
        .iter()
        .max_by(|a, b| a.0.predict(h).total_cmp(&b.0.predict(h)))
        .map(|f| f.0);
    let order = fits.first().and_then(|f| f.1);
    // a residual that does not shrink under refinement fails however small
    let converging = tolerance == floor || fits.iter().all(|(m, _)| m.p >= cfg.min_order);
    let (k, p) = id.kp();
    Ok(ResidualReport {
        identity: identity.to_string(),
        k,
        p,
        n: depth,
        grid: format!(
            "{}x{}x{} s{}x{}",
            grid.dims[0], grid.dims[1], grid.dims[2], src.sgrid.n_polar, src.sgrid.n_azimuth
        ),
        h_ray: src.q.step,
        h_fd: h,
        h_t: if id.time().is_some() { cfg.h_t } else { 0.0 },
        samples: interior.len(),
        residual_max: rmax,
        residual_l2: rms,
        tolerance,
        verdict: Verdict::from_check(rmax <= tolerance && converging),
        order,
        model,
    })
}

/// δE_kp against its right-hand side, chosen by the kind of α: constant,
/// ξ-polynomial (via tensor convolution) or general (explicit α-weighted
/// moments).
pub fn moment_div_residual(
    k: usize,
    p: usize,
    src: &MomentSource,
    grid: &Grid3,
    cfg: &GridCheckConfig,
) -> Result<ResidualReport> {
    if p < 1 {
        return Err(ArtError::arg("divergence needs p >= 1"));
    }
    let name = match (src.a, k) {
        (a, 0) if a.as_constant().is_some() => "eq4.10",
        (a, _) if a.as_constant().is_some() => "eq4.6",
        (AbsorptionSpec::XiPolynomial { .. }, 0) => "eq4.11",
        (AbsorptionSpec::XiPolynomial { .. }, _) => "eq4.7",
        (_, 0) => "eq4.8",
        _ => "eq4.5",
    };
    grid_check(name, &GridIdentity::Divergence { k, p }, src, grid, cfg)
}

/// Time-dependent recurrence at time t: the binomial form for a given k, or
/// with `source_form` the k = 0 analog with H-powers of f.
pub fn thm43_residual(
    n: usize,
    k: usize,
    p: usize,
    t: f64,
    source_form: Option<Cor42Convention>,
    src: &MomentSource,
    grid: &Grid3,
    cfg: &GridCheckConfig,
) -> Result<ResidualReport> {
    if n < 1 {
        return Err(ArtError::arg("n must be at least 1"));
    }
    if !src.f.is_causal() {
        return Err(ArtError::arg(
            "time-dependent recurrence needs a causal source",
        ));
    }
    let id = match source_form {
        Some(conv) => GridIdentity::Thm43Source { n, p, t, conv },
        None => GridIdentity::Thm43 { n, k, p, t },
    };
    grid_check("thm4.3", &id, src, grid, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{TemporalProfile, TensorFieldSpec};
    use crate::geometry::{make_sphere_grid, Point3};
    use crate::tensor::SymTensor;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn gaussian() -> PhaseField {
        PhaseField::gaussian(Point3::new(0.02, -0.01, 0.0), 0.12, c(1.0, 0.0)).unwrap()
    }

    fn small() -> (Grid3, SphereGrid, RayQuadSpec) {
        (
            Grid3::cube(Point3::ORIGIN, 0.2, 7).unwrap(),
            make_sphere_grid(4, 8).unwrap(),
            RayQuadSpec::default().with_step(0.01).unwrap(),
        )
    }

    #[test]
    fn zero_source_has_zero_residual() {
        let (g, sg, q) = small();
        let f = PhaseField::zero();
        let a = AbsorptionSpec::constant(c(0.4, 0.0)).unwrap();
        let src = MomentSource {
            f: &f,
            a: &a,
            sgrid: &sg,
            q,
        };
        let (r, _) =
            residual_field(&GridIdentity::Divergence { k: 1, p: 1 }, &src, &g, 0.01).unwrap();
        assert!(r.data.iter().all(|v| *v == c(0.0, 0.0)));
    }

    #[test]
    fn first_order_rhs_is_thm41_at_n1() {
        let (g, sg, q) = small();
        let f = gaussian();
        let alpha = c(0.4, 0.3);
        let a = AbsorptionSpec::constant(alpha).unwrap();
        let req = MomentRequest {
            kmax: 2,
            pmax: 1,
            time: None,
            alpha_weighted: false,
        };
        let e = MomentTable::compute(&req, &f, &a, &g, &sg, &q).unwrap();
        let via_thm = thm41_rhs(1, 1, 0, alpha, &e).unwrap();
        let via_div = eval_expr(
            &delta_power(1, 2, 1).unwrap(),
            std::slice::from_ref(&e),
            &[],
            Beta::Const(alpha),
        )
        .unwrap();
        assert_eq!(via_thm, via_div);
    }

    #[test]
    fn divergence_residual_decays_at_second_order() {
        let f = gaussian();
        let a = AbsorptionSpec::constant(c(0.4, 0.0)).unwrap();
        let sg = make_sphere_grid(4, 8).unwrap();
        let q = RayQuadSpec::default().with_step(0.005).unwrap();
        let src = MomentSource {
            f: &f,
            a: &a,
            sgrid: &sg,
            q,
        };
        let center = Point3::new(0.05, 0.03, -0.04);
        let r: Vec<f64> = [0.02, 0.01]
            .iter()
            .map(|&h| {
                let b = Grid3::block(center, h, 1).unwrap();
                let (res, _) =
                    residual_field(&GridIdentity::Divergence { k: 1, p: 1 }, &src, &b, 0.0)
                        .unwrap();
                node_norm(&res, b.index(1, 1, 1))
            })
            .collect();
        let order = (r[0] / r[1]).log2();
        assert!((1.8..2.2).contains(&order), "{r:?}");
    }

    #[test]
    fn polynomial_and_explicit_forms_agree() {
        // the convolution form and the α-weighted sphere integral are the
        // same sum, so their residuals coincide to rounding
        let (g, sg, q) = small();
        let f = gaussian();
        let qr = SymTensor::from_real(2, &[0.3, 0.1, 0.0, 0.2, 0.05, 0.4]).unwrap();
        let poly =
            AbsorptionSpec::xi_polynomial(c(0.2, 0.0), vec![], vec![TensorFieldSpec::constant(qr)])
                .unwrap();
        let src = MomentSource {
            f: &f,
            a: &poly,
            sgrid: &sg,
            q,
        };
        let (r1, _) =
            residual_field(&GridIdentity::Divergence { k: 1, p: 1 }, &src, &g, 0.0).unwrap();

        let req = MomentRequest {
            kmax: 1,
            pmax: 2,
            time: None,
            alpha_weighted: true,
        };
        let e = MomentTable::compute(&req, &f, &poly, &g, &sg, &q).unwrap();
        let explicit = e
            .get(0, 0)
            .unwrap()
            .axpy(c(-1.0, 0.0), e.alpha_weighted(1, 0).unwrap())
            .unwrap();
        let lhs = divergence_power(e.get(1, 1).unwrap(), 1).unwrap();
        let r2 = lhs.axpy(c(-1.0, 0.0), &explicit).unwrap();
        for (u, v) in r1.data.iter().zip(&r2.data) {
            assert!((u - v).norm() < 1e-12 * (1.0 + u.norm()));
        }
    }

    #[test]
    fn stationary_source_reduces_to_thm41() {
        let (g, sg, q) = small();
        let f = gaussian();
        let a = AbsorptionSpec::constant(c(0.3, 0.2)).unwrap();
        let src = MomentSource {
            f: &f,
            a: &a,
            sgrid: &sg,
            q,
        };
        let id_s = GridIdentity::Thm41 { n: 1, k: 1, p: 1 };
        let id_t = GridIdentity::Thm43 {
            n: 1,
            k: 1,
            p: 1,
            t: 0.7,
        };
        let (rs, _) = residual_field(&id_s, &src, &g, 0.01).unwrap();
        let (rt, _) = residual_field(&id_t, &src, &g, 0.01).unwrap();
        for (u, v) in rs.data.iter().zip(&rt.data) {
            assert!((u - v).norm() < 1e-9 * (1.0 + u.norm()), "{u} {v}");
        }
    }

    #[test]
    fn pulsed_source_requires_time_form() {
        let f = gaussian()
            .with_time(TemporalProfile::GaussianPulse {
                center: 0.9,
                width: 0.1,
            })
            .unwrap();
        let (g, sg, q) = small();
        let a = AbsorptionSpec::constant(c(0.3, 0.0)).unwrap();
        let src = MomentSource {
            f: &f,
            a: &a,
            sgrid: &sg,
            q,
        };
        let cfg = GridCheckConfig {
            probes: 1,
            levels: vec![2, 4],
            h_t: 0.01,
            min_order: 1.5,
        };
        assert!(thm43_residual(0, 1, 1, 0.7, None, &src, &g, &cfg).is_err());
        let stat = PhaseField::zero();
        let src0 = MomentSource { f: &stat, ..src };
        assert!(thm43_residual(1, 1, 1, 0.7, None, &src0, &g, &cfg).is_err());
    }
}
