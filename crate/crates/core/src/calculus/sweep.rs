use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{ArtError, Result};
use crate::fields::{AbsorptionSpec, PhaseField};
use crate::geometry::{
    gauss_legendre, ray_exit_length, BallDomain, Direction, Grid3, Point3, SphereGrid,
};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Boundary data u(y, ξ) prescribed where ⟨n_y, ξ⟩ < 0.
pub type Inflow<'a> = &'a (dyn Fn(&Point3, &Direction) -> Complex64 + Sync);

/// Solve du/ds + αu = f along the characteristic ending at x, starting from
/// the inflow point with the given boundary value, by the first-order update
/// u ← e^{−α(y)Δ}·u + Δ·f(y) evaluated at the right end of each step.
pub fn march(
    f: &PhaseField,
    a: &AbsorptionSpec,
    x: &Point3,
    xi: &Direction,
    step: f64,
    dom: &BallDomain,
    inflow: Option<Inflow<'_>>,
) -> Result<Complex64> {
    if !(step > 0.0) {
        return Err(ArtError::arg(format!(
            "sweep step must be positive, got {step}"
        )));
    }
    let len = ray_exit_length(x, xi, dom)?;
    let start = x.along(xi, -len);
    let mut u = inflow.map_or(ZERO, |g| g(&start, xi));
    let n = (len / step).ceil() as usize;
    if n == 0 {
        return Ok(u);
    }
    let d = len / n as f64;
    let constant = a.ray_constant(xi);
    for j in 1..=n {
        let y = x.along(xi, -(len - j as f64 * d));
        let al = constant.unwrap_or_else(|| a.eval(&y, xi));
        u = (-al * d).exp() * u + f.eval_static(&y, xi) * d;
    }
    Ok(u)
}

/// Sweep solution on grid nodes × directions, stored `[direction][node]`.
/// Nodes outside the domain are left at zero and flagged.
#[derive(Debug, Clone)]
pub struct SweepField {
    pub grid: Grid3,
    pub directions: Vec<Direction>,
    pub inside: Vec<bool>,
    pub data: Vec<Complex64>,
}

impl SweepField {
    pub fn value(&self, dir: usize, node: usize) -> Complex64 {
        self.data[dir * self.grid.len() + node]
    }
}

pub fn sweep_transport(
    f: &PhaseField,
    a: &AbsorptionSpec,
    grid: &Grid3,
    sgrid: &SphereGrid,
    step: f64,
    dom: &BallDomain,
    inflow: Option<Inflow<'_>>,
) -> Result<SweepField> {
    let inside: Vec<bool> = (0..grid.len())
        .map(|i| dom.contains(&grid.node_at(i)))
        .collect();
    let rows: Vec<Vec<Complex64>> = sgrid
        .nodes
        .par_iter()
        .map(|xi| {
            (0..grid.len())
                .map(|i| {
                    if inside[i] {
                        march(f, a, &grid.node_at(i), xi, step, dom, inflow)
                    } else {
                        Ok(ZERO)
                    }
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    Ok(SweepField {
        grid: *grid,
        directions: sgrid.nodes.clone(),
        inside,
        data: rows.concat(),
    })
}

/// Terms of ½∮∫⟨n, ξ⟩|u|² + ∫∫ε|u|² = 0 for a source-free sweep solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyBalance {
    /// ½∮∫⟨n, ξ⟩|u|² over outgoing directions.
    pub outflow: f64,
    /// ½∮∫⟨n, ξ⟩|u|² over incoming directions (negative).
    pub inflow: f64,
    /// ∫∫ ε|u|².
    pub absorbed: f64,
}

impl EnergyBalance {
    pub fn residual(&self) -> f64 {
        self.outflow + self.inflow + self.absorbed
    }

    /// Residual relative to the incoming energy.
    pub fn relative(&self) -> f64 {
        self.residual().abs() / self.inflow.abs().max(f64::MIN_POSITIVE)
    }
}

/// Evaluate the balance with `positions` nodes on the boundary sphere and in
/// each radial shell (`n_radial` Gauss shells), `dirs` in velocity space.
pub fn energy_balance(
    a: &AbsorptionSpec,
    inflow: Inflow<'_>,
    dom: &BallDomain,
    positions: &SphereGrid,
    n_radial: usize,
    dirs: &SphereGrid,
    step: f64,
) -> Result<EnergyBalance> {
    if let Some(p) = probe_imaginary(a, dom) {
        return Err(ArtError::arg(format!(
            "energy balance needs real α, found Im α = {p}"
        )));
    }
    let zero = PhaseField::zero();
    let r = dom.radius;

    let surface: Vec<(f64, f64)> = positions
        .nodes
        .par_iter()
        .zip(&positions.weights)
        .map(|(nrm, wp)| {
            // pull the point a hair inside so rounding never puts it outside
            let y = dom.center + nrm.as_point() * (r * (1.0 - 1e-13));
            let mut out = 0.0;
            let mut inn = 0.0;
            for (xi, wd) in dirs.nodes.iter().zip(&dirs.weights) {
                let c = xi.dot(&nrm.as_point());
                let w = 0.5 * c * wd * wp * r * r;
                if c > 0.0 {
                    out += w * march(&zero, a, &y, xi, step, dom, Some(inflow))?.norm_sqr();
                } else {
                    inn += w * inflow(&y, xi).norm_sqr();
                }
            }
            Ok((out, inn))
        })
        .collect::<Result<_>>()?;

    let (gx, gw) = gauss_legendre(n_radial);
    let shells: Vec<f64> = gx
        .par_iter()
        .zip(&gw)
        .map(|(t, wt)| {
            let rho = 0.5 * r * (t + 1.0);
            let jac = 0.5 * r * wt * rho * rho;
            let mut acc = 0.0;
            for (nrm, wp) in positions.nodes.iter().zip(&positions.weights) {
                let y = dom.center + nrm.as_point() * rho;
                for (xi, wd) in dirs.nodes.iter().zip(&dirs.weights) {
                    let eps = a.eval(&y, xi).re;
                    if eps == 0.0 {
                        continue;
                    }
                    acc += jac
                        * wp
                        * wd
                        * eps
                        * march(&zero, a, &y, xi, step, dom, Some(inflow))?.norm_sqr();
                }
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;

    Ok(EnergyBalance {
        outflow: surface.iter().map(|s| s.0).sum(),
        inflow: surface.iter().map(|s| s.1).sum(),
        absorbed: shells.iter().sum(),
    })
}

fn probe_imaginary(a: &AbsorptionSpec, dom: &BallDomain) -> Option<f64> {
    let probes = [
        Point3::ORIGIN,
        Point3::new(0.5, 0.0, 0.0),
        Point3::new(0.0, -0.3, 0.4),
    ];
    for p in probes {
        for xi in [Direction::e1(), Direction::e2(), Direction::e3()] {
            let v = a.eval(&(dom.center + p * dom.radius), &xi).im;
            if v != 0.0 {
                return Some(v);
            }
        }
    }
    None
}
