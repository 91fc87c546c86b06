//! Named identity checks run by `artkit verify`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::art::{art_k, QuadRule, RayQuadSpec};
use crate::calculus::{
    energy_balance, sweep_transport, verify_cor_2_3, verify_lemma_2_1, verify_lemma_2_2,
    verify_lemma_2_5, verify_theorem_2_4, verify_theorem_2_6, FDSpec, FdCheckConfig, LtNorm,
};
use crate::error::{ArtError, Result};
use crate::fields::{
    sample_grid, AbsorptionSpec, GridField, PhaseField, ScalarProfile, TemporalProfile,
    TensorFieldSpec,
};
use crate::geometry::{make_sphere_grid, BallDomain, Direction, Grid3, Point3, SphereGrid};
use crate::moments::algebra::{cor42_expansion, delta_power, thm41_expansion};
use crate::moments::{
    g_radial_apply, g_radial_check, grid_check, helmholtz_probe, helmholtz_residual,
    moment_div_residual, prop44_probe, reconstruct_prop44, thm43_residual, volume_potential_grid,
    Cor42Convention, GridCheckConfig, GridIdentity, MomentSource,
};
use crate::report::{max_and_rms, observed_order, ResidualReport, ToleranceModel, Verdict};
use crate::tensor::SymTensor;

/// Overrides and presets shared by every check.
#[derive(Debug, Clone, Default)]
pub struct SuiteConfig {
    pub quick: bool,
    pub seed: u64,
    pub k: Option<usize>,
    pub p: Option<usize>,
    pub n: Option<usize>,
    pub alpha: Option<Complex64>,
    pub samples: Option<usize>,
    pub dims: Option<usize>,
    pub sphere: Option<(usize, usize)>,
    pub h_ray: Option<f64>,
    pub h_fd: Option<f64>,
    pub h_t: Option<f64>,
}

type Runner = fn(&SuiteConfig) -> Result<Vec<ResidualReport>>;

pub struct Identity {
    pub name: &'static str,
    pub statement: &'static str,
    run: Runner,
}

pub const REGISTRY: &[Identity] = &[
    Identity {
        name: "lemma2.1",
        statement: "(H + α)u_k = k·u_{k−1}",
        run: lemma21,
    },
    Identity {
        name: "lemma2.2",
        statement: "(H + α)u_0 = f",
        run: lemma22,
    },
    Identity {
        name: "cor2.3",
        statement: "(H + α)⟨U, ξ^m⟩ = ⟨w, ξ^m⟩ for f = ⟨w, ξ^m⟩",
        run: cor23,
    },
    Identity {
        name: "thm2.4",
        statement: "L_{k+1}u_k = f",
        run: thm24,
    },
    Identity {
        name: "lemma2.5",
        statement: "(∂_t + H + α)u_k = k·u_{k−1}, (∂_t + H + α)u_0 = f",
        run: lemma25,
    },
    Identity {
        name: "thm2.6",
        statement: "L^t_{k+1}u_k = f",
        run: thm26,
    },
    Identity {
        name: "sweep3.1",
        statement: "transport sweep converges to the ray transform",
        run: sweep31,
    },
    Identity {
        name: "eq4.6",
        statement: "δE_kp = k·E_{(k−1)(p−1)} − α·E_{k(p−1)}",
        run: eq46,
    },
    Identity {
        name: "eq4.7",
        statement: "δE_kp = k·E_{(k−1)(p−1)} − Σ Q^r ∗ E_{k(p+r−1)}",
        run: eq47,
    },
    Identity {
        name: "eq4.10",
        statement: "δE_0p = f_{p−1} − α·E_{0(p−1)}",
        run: eq410,
    },
    Identity {
        name: "eq4.11",
        statement: "δE_0p = f_{p−1} − Σ Q^r ∗ E_{0(p+r−1)}",
        run: eq411,
    },
    Identity {
        name: "thm4.1",
        statement: "δ^n E_{(k+n)(p+n)} = Σ (−1)^j C(n,j) α^j (k+n)!/(k+j)! E_{(k+j)p}",
        run: thm41,
    },
    Identity {
        name: "cor4.2",
        statement: "δ^n E_{0(p+n)} = Σ_{j<n} (−α)^j (H^{n−j−1}f)_p + (−α)^n E_{0p}",
        run: cor42,
    },
    Identity {
        name: "thm4.3",
        statement: "the binomial and source forms with α replaced by ∂_t + α",
        run: thm43,
    },
    Identity {
        name: "eq4.14",
        statement: "ΔG_k = (k−1)(k−2)G_{k−2} − 2α(k−1)G_{k−1} + α²G_k",
        run: eq414,
    },
    Identity {
        name: "helmholtz",
        statement: "ΔE_10 + κ²E_10 = −4πf for α = iκ",
        run: helmholtz,
    },
    Identity {
        name: "prop4.4",
        statement: "(Δ − α²)²(E_20/(8πα)) = f",
        run: prop44,
    },
];

pub fn names() -> Vec<&'static str> {
    REGISTRY.iter().map(|i| i.name).collect()
}

pub fn lookup(name: &str) -> Option<&'static Identity> {
    REGISTRY.iter().find(|i| i.name == name)
}

/// Run one identity by name, or every identity for `all`.
pub fn run(name: &str, cfg: &SuiteConfig) -> Result<Vec<ResidualReport>> {
    if name == "all" {
        let mut out = Vec::new();
        for id in REGISTRY {
            out.extend((id.run)(cfg)?);
        }
        return Ok(out);
    }
    let id = lookup(name).ok_or_else(|| {
        ArtError::arg(format!(
            "unknown identity '{name}'; registered: {}, all",
            names().join(", ")
        ))
    })?;
    (id.run)(cfg)
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn alpha(cfg: &SuiteConfig) -> Complex64 {
    cfg.alpha.unwrap_or(c(0.5, 0.3))
}

fn absorption(cfg: &SuiteConfig) -> Result<AbsorptionSpec> {
    AbsorptionSpec::constant(alpha(cfg))
}

/// Source of the ray-identity checks.
pub fn ray_phantom() -> PhaseField {
    PhaseField::gaussian(Point3::new(0.03, -0.02, 0.01), 0.11, c(1.0, 0.0)).expect("valid phantom")
}

/// Source of the moment checks.
pub fn moment_phantom() -> PhaseField {
    PhaseField::gaussian(Point3::new(0.02, -0.01, 0.015), 0.11, c(1.0, 0.0)).expect("valid phantom")
}

pub fn pulse() -> TemporalProfile {
    TemporalProfile::GaussianPulse {
        center: 1.0,
        width: 0.12,
    }
}

fn fd_config(cfg: &SuiteConfig) -> Result<FdCheckConfig> {
    let base = FdCheckConfig::default();
    let fd = FDSpec::new(
        cfg.h_fd.unwrap_or(base.fd.h_fd),
        cfg.h_t.unwrap_or(base.fd.h_t),
    )?;
    let q = match cfg.h_ray {
        Some(h) => base.q.with_step(h)?,
        None => base.q,
    };
    Ok(FdCheckConfig {
        samples: cfg.samples.unwrap_or(if cfg.quick { 16 } else { 64 }),
        seed: cfg.seed,
        q,
        fd,
        ..base
    })
}

fn ks(cfg: &SuiteConfig, default: &[usize]) -> Vec<usize> {
    cfg.k.map_or(default.to_vec(), |k| vec![k])
}

fn lemma21(cfg: &SuiteConfig) -> Result<Vec<ResidualReport>> {
    let (f, a, fc) = (ray_phantom(), absorption(cfg)?, fd_config(cfg)?);
    ks(cfg, &[1, 2, 3])
        .into_iter()
        .map(|k| verify_lemma_2_1(k, &f, &a, &fc))
        .collect()
}

fn lemma22(cfg: &SuiteConfig) -> Result<Vec<ResidualReport>> {
    Ok(vec![verify_lemma_2_2(
        &ray_phantom(),
        &absorption(cfg)?,
        &fd_config(cfg)?,
    )?])
}

/// Generating tensor of the given rank with a gaussian profile.
pub fn tensor_phantom(rank: usize, center: Point3, width: f64) -> Result<TensorFieldSpec> {
    let n = crate::tensor::component_count(rank);
    let comps: Vec<f64> = (0..n)
        .map(|i| 0.4 + 0.3 * ((i * 7 + 3) % 5) as f64 / 5.0 - 0.1 * i as f64)
        .collect();
    TensorFieldSpec::single(
        SymTensor::from_real(rank, &comps)?,
        ScalarProfile::Gaussian { center, width },
    )
}

fn cor23(cfg: &SuiteConfig) -> Result<Vec<ResidualReport>> {
    verify_cor_2_3(
        &tensor_phantom(cfg.p.unwrap_or(2), Point3::new(0.03, -0.02, 0.01), 0.11)?,
        &absorption(cfg)?,
        &fd_config(cfg)?,
    )
}

fn thm24(cfg: &SuiteConfig) -> Result<Vec<ResidualReport>> {
    let (f, a, fc) = (ray_phantom(), absorption(cfg)?, fd_config(cfg)?);
    ks(cfg, &[1, 2, 3])
        .into_iter()
        .map(|k| {
            let r = verify_theorem_2_4(k, &f, &a, &fc)?;
            // beyond k = 2 the nested stencil loses to round-off; shown, not asserted
            Ok(if k >= 3 { r.informational() } else { r })
        })
        .collect()
}

fn pulsed_ray_phantom() -> Result<PhaseField> {
    ray_phantom().with_time(pulse())
}

fn lemma25(cfg: &SuiteConfig) -> Result<Vec<ResidualReport>> {
    let (f, a, fc) = (pulsed_ray_phantom()?, absorption(cfg)?, fd_config(cfg)?);
    ks(cfg, &[0, 1, 2])
        .into_iter()
        .map(|k| verify_lemma_2_5(k, &f, &a, &fc))
        .collect()
}

fn thm26(cfg: &SuiteConfig) -> Result<Vec<ResidualReport>> {
    let (f, a, fc) = (pulsed_ray_phantom()?, absorption(cfg)?, fd_config(cfg)?);
    let mut out = Vec::new();
    for k in ks(cfg, &[1, 2]) {
        out.push(verify_theorem_2_6(k, &f, &a, &fc, LtNorm::Factorial)?);
        if k >= 2 {
            out.push(
                verify_theorem_2_6(k, &f, &a, &fc, LtNorm::Verbatim)?
                    .renamed("thm2.6:verbatim")
                    .informational(),
            );
        }
    }
    Ok(out)
}

fn plain_report(
    identity: &str,
    k: usize,
    p: usize,
    n: usize,
    grid: String,
    max: f64,
    l2: f64,
    tol: f64,
    ok: bool,
) -> ResidualReport {
    ResidualReport {
        identity: identity.to_string(),
        k,
        p,
        n,
        grid,
        h_ray: 0.0,
        h_fd: 0.0,
        h_t: 0.0,
        samples: 0,
        residual_max: max,
        residual_l2: l2,
        tolerance: tol,
        verdict: Verdict::from_check(ok),
        order: None,
        model: None,
    }
}

/// Sweep gaps to the ray transform at three steps, exact zero for zero data,
/// and the energy balance of a source-free problem.
pub fn sweep_reports(cfg: &SuiteConfig) -> Result<Vec<ResidualReport>> {
    let f = moment_phantom();
    let a = absorption(cfg)?;
    let dom = BallDomain::unit();
    let grid = Grid3::cube(Point3::ORIGIN, 0.3, if cfg.quick { 5 } else { 9 })?;
    let sg = make_sphere_grid(4, 8)?;
    let q = RayQuadSpec::default();
    let exact: Vec<Complex64> = sg
        .nodes
        .par_iter()
        .flat_map_iter(|xi| (0..grid.len()).map(move |i| (i, *xi)))
        .map(|(i, xi)| art_k(0, &f, &a, &grid.node_at(i), &xi, &q))
        .collect::<Result<_>>()?;
    let steps = [0.04, 0.02, 0.01];
    let mut gaps = Vec::new();
    for &h in &steps {
        let s = sweep_transport(&f, &a, &grid, &sg, h, &dom, None)?;
        gaps.push(max_and_rms(
            s.data.iter().zip(&exact).map(|(u, v)| (u - v).norm()),
        ));
    }
    let model = ToleranceModel::fit(
        &steps
            .iter()
            .zip(&gaps)
            .map(|(h, g)| (*h, g.0))
            .collect::<Vec<_>>(),
    );
    let ratio = gaps[1].1 / gaps[2].1;
    let (mx, l2) = gaps[2];
    let tol = ToleranceModel::tolerance(model.as_ref(), steps[2], 0.0);
    let label = format!("{}^3 s{}x{}", grid.dims[0], sg.n_polar, sg.n_azimuth);
    let mut conv = plain_report(
        "sweep3.1",
        0,
        0,
        0,
        label.clone(),
        mx,
        l2,
        tol,
        mx <= tol && (1.7..=2.3).contains(&ratio),
    );
    conv.h_fd = steps[2];
    conv.h_ray = q.step;
    conv.order = observed_order(gaps[1].1, gaps[2].1);
    conv.model = model;

    let zero = sweep_transport(&PhaseField::zero(), &a, &grid, &sg, steps[2], &dom, None)?;
    let zmax = zero.data.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let zrow = plain_report(
        "sweep3.1",
        0,
        0,
        0,
        format!("{label} zero data"),
        zmax,
        zmax,
        0.0,
        zmax == 0.0,
    );

    let eps = AbsorptionSpec::constant(c(alpha(cfg).re.max(0.1), 0.0))?;
    let inflow = |y: &Point3, xi: &Direction| c(1.0 + 0.5 * y.0[0] + 0.2 * xi.components()[2], 0.0);
    let pos = make_sphere_grid(4, 8)?;
    let coarse = energy_balance(&eps, &inflow, &dom, &pos, 4, &sg, 0.04)?;
    let fine = energy_balance(&eps, &inflow, &dom, &pos, 4, &sg, 0.02)?;
    let erow = plain_report(
        "sweep3.1",
        0,
        0,
        0,
        format!("energy balance s{}x{}", sg.n_polar, sg.n_azimuth),
        fine.relative(),
        fine.relative(),
        coarse.relative(),
        true,
    )
    .informational();
    Ok(vec![conv, zrow, erow])
}

fn sweep31(cfg: &SuiteConfig) -> Result<Vec<ResidualReport>> {
    sweep_reports(cfg)
}

/// Grid, sphere and ray settings of the moment checks.
pub struct MomentSetup {
    pub grid: Grid3,
    pub sgrid: SphereGrid,
    pub q: RayQuadSpec,
    pub check: GridCheckConfig,
}

pub fn moment_setup(cfg: &SuiteConfig) -> Result<MomentSetup> {
    let n = cfg.dims.unwrap_or(if cfg.quick { 17 } else { 25 });
    let (np, na) = cfg
        .sphere
        .unwrap_or(if cfg.quick { (8, 16) } else { (12, 24) });
    let grid = Grid3::cube(Point3::ORIGIN, 0.25, n)?;
    let q = RayQuadSpec::default()
        .with_step(cfg.h_ray.unwrap_or(0.05))?
        .with_rule(QuadRule::GaussPanel4);
    let check = GridCheckConfig {
        h_t: cfg.h_t.unwrap_or(grid.spacing()[0]),
        ..GridCheckConfig::default()
    };
    Ok(MomentSetup {
        grid,
        sgrid: make_sphere_grid(np, na)?,
        q,
        check,
    })
}

fn divergence_rows(
    cfg: &SuiteConfig,
    a: &AbsorptionSpec,
    cases: &[(usize, usize)],
) -> Result<Vec<ResidualReport>> {
    let f = moment_phantom();
    let s = moment_setup(cfg)?;
    let src = MomentSource {
        f: &f,
        a,
        sgrid: &s.sgrid,
        q: s.q,
    };
    cases
        .iter()
        .map(|&(k, p)| moment_div_residual(k, p, &src, &s.grid, &s.check))
        .collect()
}

fn kp_cases(cfg: &SuiteConfig, default: &[(usize, usize)]) -> Vec<(usize, usize)> {
    match (cfg.k, cfg.p) {
        (None, None) => default.to_vec(),
        (k, p) => vec![(k.unwrap_or(1), p.unwrap_or(1).max(1))],
    }
}

fn eq46(cfg: &SuiteConfig) -> Result<Vec<ResidualReport>> {
    let cases: Vec<(usize, usize)> = kp_cases(cfg, &[(1, 1), (2, 1), (2, 2)])
        .into_iter()
        .map(|(k, p)| (k.max(1), p))
        .collect();
    divergence_rows(cfg, &absorption(cfg)?, &cases)
}

fn eq410(cfg: &SuiteConfig) -> Result<Vec<ResidualReport>> {
    let ps = cfg.p.map_or(vec![1, 2], |p| vec![p.max(1)]);
    let cases: Vec<(usize, usize)> = ps.into_iter().map(|p| (0, p)).collect();
    divergence_rows(cfg, &absorption(cfg)?, &cases)
}

/// α = c + i⟨Q(x), ξ²⟩ with a symmetric rank-2 Q; spatially varying unless quick.
pub fn polynomial_absorption(cfg: &SuiteConfig) -> Result<AbsorptionSpec> {
    let q = SymTensor::from_real(2, &[0.3, 0.1, -0.05, 0.2, 0.05, 0.4])?;
    let term = if cfg.quick {
        TensorFieldSpec::constant(q)
    } else {
        TensorFieldSpec::single(
            q,
            ScalarProfile::Gaussian {
                center: Point3::ORIGIN,
                width: 0.4,
            },
        )?
    };
    AbsorptionSpec::xi_polynomial(c(alpha(cfg).re, 0.0), vec![], vec![term])
}

fn eq47(cfg: &SuiteConfig) -> Result<Vec<ResidualReport>> {
    let cases: Vec<(usize, usize)> = kp_cases(cfg, &[(1, 1), (2, 2)])
        .into_iter()
        .map(|(k, p)| (k.max(1), p))
        .collect();
    divergence_rows(cfg, &polynomial_absorption(cfg)?, &cases)
}

fn eq411(cfg: &SuiteConfig) -> Result<Vec<ResidualReport>> {
    let ps = cfg.p.map_or(vec![1, 2], |p| vec![p.max(1)]);
    let cases: Vec<(usize, usize)> = ps.into_iter().map(|p| (0, p)).collect();
    divergence_rows(cfg, &polynomial_absorption(cfg)?, &cases)
}

/// Mismatching coefficient count between two expansions.
fn expansion_gap(a: &crate::moments::algebra::Expr, b: &crate::moments::algebra::Expr) -> f64 {
    let mut gap = 0usize;
    for (t, p) in a.terms() {
        if b.coefficient(t) != *p {
            gap += 1;
        }
    }
    for (t, _) in b.terms() {
        if a.coefficient(t).is_zero() {
            gap += 1;
        }
    }
    gap as f64
}

fn symbolic_thm41() -> Result<ResidualReport> {
    let mut gap = 0.0;
    for n in 1..=4 {
        for k in 0..=2 {
            for p in 0..=2 {
                gap += expansion_gap(&delta_power(n, k + n, p + n)?, &thm41_expansion(n, k, p));
            }
        }
    }
    // the printed second-order display, read at k = 2: (2, −4α, α²)
    let d = delta_power(2, 2, 2)?;
    use crate::moments::algebra::{Poly, Term};
    let printed = [
        (Term::E { k: 0, p: 0 }, Poly::new(vec![2])),
        (Term::E { k: 1, p: 0 }, Poly::new(vec![0, -4])),
        (Term::E { k: 2, p: 0 }, Poly::new(vec![0, 0, 1])),
    ];
    for (t, p) in printed {
        if d.coefficient(&t) != p {
            gap += 1.0;
        }
    }
    Ok(plain_report(
        "thm4.1",
        2,
        2,
        4,
        "symbolic n<=4 k<=2 p<=2".into(),
        gap,
        gap,
        0.0,
        gap == 0.0,
    ))
}

fn thm41(cfg: &SuiteConfig) -> Result<Vec<ResidualReport>> {
    let f = moment_phantom();
    let a = absorption(cfg)?;
    let s = moment_setup(cfg)?;
    let src = MomentSource {
        f: &f,
        a: &a,
        sgrid: &s.sgrid,
        q: s.q,
    };
    let id = GridIdentity::Thm41 {
        n: cfg.n.unwrap_or(2),
        k: cfg.k.unwrap_or(0),
        p: cfg.p.unwrap_or(0),
    };
    Ok(vec![
        symbolic_thm41()?,
        grid_check("thm4.1", &id, &src, &s.grid, &s.check)?,
    ])
}

fn symbolic_source_form(identity: &str, conv: Cor42Convention) -> Result<ResidualReport> {
    let mut gap = 0.0;
    for n in 1..=4 {
        for p in 0..=2 {
            gap += expansion_gap(&delta_power(n, 0, p + n)?, &cor42_expansion(n, p, conv));
        }
    }
    Ok(plain_report(
        identity,
        0,
        0,
        4,
        "symbolic n<=4 p<=2".into(),
        gap,
        gap,
        0.0,
        gap == 0.0,
    ))
}

fn cor42(cfg: &SuiteConfig) -> Result<Vec<ResidualReport>> {
    let f = moment_phantom();
    let a = absorption(cfg)?;
    let s = moment_setup(cfg)?;
    let src = MomentSource {
        f: &f,
        a: &a,
        sgrid: &s.sgrid,
        q: s.q,
    };
    let (n, p) = (cfg.n.unwrap_or(2), cfg.p.unwrap_or(0));
    let unit = GridIdentity::Cor42 {
        n,
        p,
        conv: Cor42Convention::Unit,
    };
    let binom = GridIdentity::Cor42 {
        n,
        p,
        conv: Cor42Convention::Binomial,
    };
    Ok(vec![
        symbolic_source_form("cor4.2", Cor42Convention::Unit)?,
        grid_check("cor4.2", &unit, &src, &s.grid, &s.check)?,
        symbolic_source_form("cor4.2:binomial", Cor42Convention::Binomial)?.informational(),
        grid_check("cor4.2:binomial", &binom, &src, &s.grid, &s.check)?.informational(),
    ])
}

/// Time at which the pulsed source fills the moment grid.
pub const THM43_TIME: f64 = 1.2;

fn thm43(cfg: &SuiteConfig) -> Result<Vec<ResidualReport>> {
    let f = moment_phantom().with_time(pulse())?;
    let a = absorption(cfg)?;
    let s = moment_setup(cfg)?;
    let src = MomentSource {
        f: &f,
        a: &a,
        sgrid: &s.sgrid,
        q: s.q,
    };
    let n = cfg.n.unwrap_or(1);
    let (k, p) = (cfg.k.unwrap_or(1), cfg.p.unwrap_or(1));
    Ok(vec![
        thm43_residual(n, k, p, THM43_TIME, None, &src, &s.grid, &s.check)?,
        thm43_residual(
            n,
            0,
            p.saturating_sub(1),
            THM43_TIME,
            Some(Cor42Convention::Unit),
            &src,
            &s.grid,
            &s.check,
        )?,
        symbolic_source_form("thm4.3", Cor42Convention::Unit)?,
        symbolic_source_form("thm4.3:binomial", Cor42Convention::Binomial)?.informational(),
    ])
}

/// Coefficient triples as displayed for k = 2..5.
fn printed_g(k: usize, a: Complex64) -> Option<[Complex64; 3]> {
    let (c0, c1) = match k {
        2 => (0.0, -2.0),
        3 => (2.0, -4.0),
        4 => (6.0, -6.0),
        5 => (12.0, -8.0),
        _ => return None,
    };
    Some([c(c0, 0.0), a * c1, a * a])
}

pub fn g_radii() -> Vec<f64> {
    (0..20).map(|i| 0.25 + 0.125 * i as f64).collect()
}

fn eq414(cfg: &SuiteConfig) -> Result<Vec<ResidualReport>> {
    let a = cfg.alpha.unwrap_or(c(0.6, 0.2));
    let h = 1e-4;
    ks(cfg, &[2, 3, 4, 5])
        .into_iter()
        .map(|k| {
            let coeffs = g_radial_apply(k, a)?;
            let exact = printed_g(k, a).is_none_or(|p| p == coeffs);
            let err = g_radial_check(k, a, &g_radii(), h)?;
            let mut r = plain_report(
                "eq4.14",
                k,
                0,
                0,
                "20 radii".into(),
                err,
                err,
                1e-6,
                exact && err <= 1e-6,
            );
            r.h_fd = h;
            Ok(r)
        })
        .collect()
}

fn grid_label(g: &Grid3) -> String {
    format!("{}x{}x{}", g.dims[0], g.dims[1], g.dims[2])
}

/// ‖ΔE_10 + κ²E_10 + 4πf‖_∞ / ‖4πf‖_∞ on the interior of an n³ grid.
pub fn helmholtz_relative(f: &PhaseField, a: Complex64, n: usize) -> Result<(f64, f64, Grid3)> {
    let g = Grid3::cube(Point3::ORIGIN, 0.6, n)?;
    let fs = sample_grid(f, g, None)?.frame(0);
    let e = volume_potential_grid(1, &fs, a)?;
    let r = helmholtz_residual(&e, &fs, a)?;
    let (mx, l2) = max_and_rms(r.data.iter().map(|v| v.norm()));
    let scale = 4.0 * PI * fs.data.iter().map(|v| v.norm()).fold(0.0, f64::max);
    Ok((mx / scale, l2 / scale, g))
}

pub fn helmholtz_phantom() -> PhaseField {
    PhaseField::ball_bump(Point3::ORIGIN, 0.5, c(1.0, 0.0)).expect("valid phantom")
}

/// Probe node shared by the 17³ and 33³ grids on [−0.6, 0.6]³.
pub const HELMHOLTZ_PROBE: [f64; 3] = [0.15, 0.075, 0.0];

fn helmholtz(cfg: &SuiteConfig) -> Result<Vec<ResidualReport>> {
    let kappa = cfg.alpha.map_or(2.5, |a| a.im);
    let a = c(0.0, kappa);
    let f = helmholtz_phantom();
    let n = cfg.dims.unwrap_or(if cfg.quick { 17 } else { 33 });
    let (rel, rel_l2, g) = helmholtz_relative(&f, a, n)?;
    let mut full = plain_report(
        "helmholtz",
        1,
        0,
        0,
        grid_label(&g),
        rel,
        rel_l2,
        5e-2,
        rel <= 5e-2,
    );
    full.h_fd = g.spacing()[0];

    let x0 = Point3(HELMHOLTZ_PROBE);
    let (hc, hf) = (1.2 / 16.0, 1.2 / 32.0);
    let (rc, _) = helmholtz_probe(&f, a, &x0, hc)?;
    let (rf, sf) = helmholtz_probe(&f, a, &x0, hf)?;
    let order = observed_order(rc, rf);
    let ok = order.is_some_and(|o| (1.7..=2.3).contains(&o));
    let model = ToleranceModel::fit(&[(hc, rc / sf), (hf, rf / sf)]);
    let mut probe = plain_report(
        "helmholtz",
        1,
        0,
        0,
        "5^3 probe 17^3->33^3".into(),
        rf / sf,
        rf / sf,
        ToleranceModel::tolerance(model.as_ref(), hf, 0.0),
        ok,
    );
    probe.h_fd = hf;
    probe.order = order;
    probe.model = model;
    Ok(vec![full, probe])
}

/// Relative L² error of the round trip on an n³ grid over [−0.75, 0.75]³.
pub fn prop44_relative(f: &PhaseField, a: Complex64, n: usize) -> Result<(f64, Grid3)> {
    let g = Grid3::cube(Point3::ORIGIN, 0.75, n)?;
    let fs = sample_grid(f, g, None)?.frame(0);
    let e = volume_potential_grid(2, &fs, a)?;
    let est = reconstruct_prop44(&GridField::stationary(e), a)?;
    let truth = sample_grid(f, est.grid, None)?;
    let num: f64 = est
        .data
        .iter()
        .zip(&truth.data)
        .map(|(u, v)| (u - v).norm_sqr())
        .sum();
    let den: f64 = truth.data.iter().map(|v| v.norm_sqr()).sum();
    Ok(((num / den).sqrt(), g))
}

/// Probe node shared by the grids of spacing 1.5/32 and 1.5/64.
pub const PROP44_PROBE: [f64; 3] = [0.1875, 0.09375, 0.0];

fn prop44(cfg: &SuiteConfig) -> Result<Vec<ResidualReport>> {
    let a = cfg.alpha.unwrap_or(c(0.6, 0.2));
    let f = helmholtz_phantom();
    let n = cfg.dims.unwrap_or(if cfg.quick { 25 } else { 33 });
    let (rel, g) = prop44_relative(&f, a, n)?;
    let mut full = plain_report(
        "prop4.4",
        2,
        0,
        0,
        grid_label(&g),
        rel,
        rel,
        0.1,
        rel <= 0.1,
    );
    full.h_fd = g.spacing()[0];

    let x0 = Point3(PROP44_PROBE);
    let (hc, hf) = (1.5 / 32.0, 1.5 / 64.0);
    let rc = prop44_probe(&f, a, &x0, hc)?;
    let rf = prop44_probe(&f, a, &x0, hf)?;
    let order = observed_order(rc, rf);
    let model = ToleranceModel::fit(&[(hc, rc), (hf, rf)]);
    let mut probe = plain_report(
        "prop4.4",
        2,
        0,
        0,
        "7^3 probe 33^3->65^3".into(),
        rf,
        rf,
        ToleranceModel::tolerance(model.as_ref(), hf, 0.0),
        order.is_some_and(|o| (1.7..=2.3).contains(&o)),
    );
    probe.h_fd = hf;
    probe.order = order;
    probe.model = model;

    let rejected = reconstruct_prop44(
        &GridField::stationary(crate::tensor::SymTensorGridField::zeros(0, g)),
        c(0.0, 0.0),
    )
    .is_err();
    let zero = plain_report(
        "prop4.4",
        2,
        0,
        0,
        "alpha=0 rejected".into(),
        if rejected { 0.0 } else { 1.0 },
        if rejected { 0.0 } else { 1.0 },
        0.0,
        rejected,
    );
    Ok(vec![full, probe, zero])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_is_complete_and_unique() {
        let n = names();
        assert_eq!(n.len(), 17);
        let mut s = n.clone();
        s.sort();
        s.dedup();
        assert_eq!(s.len(), 17);
        assert!(lookup("eq4.14").is_some());
        let err = run("eq9.9", &SuiteConfig::default())
            .unwrap_err()
            .to_string();
        assert!(err.contains("lemma2.1") && err.contains("prop4.4"));
    }

    #[test]
    fn g_rows_pass_for_printed_orders() {
        let rows = run("eq4.14", &SuiteConfig::default()).unwrap();
        assert_eq!(rows.len(), 4);
        assert!(rows.iter().all(|r| r.verdict == Verdict::Pass), "{rows:?}");
        let k3 = SuiteConfig {
            k: Some(3),
            alpha: Some(c(0.2, 0.5)),
            ..SuiteConfig::default()
        };
        assert!(run("eq4.14", &k3).unwrap()[0].passed());
    }

    #[test]
    fn symbolic_rows() {
        assert_eq!(symbolic_thm41().unwrap().verdict, Verdict::Pass);
        assert_eq!(
            symbolic_source_form("x", Cor42Convention::Unit)
                .unwrap()
                .verdict,
            Verdict::Pass
        );
        assert_eq!(
            symbolic_source_form("x", Cor42Convention::Binomial)
                .unwrap()
                .verdict,
            Verdict::Fail
        );
    }
}
