use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{ArtError, Result};
use crate::fields::{GridField, PhaseField};
use crate::geometry::{Grid3, Point3};
use crate::tensor::SymTensorGridField;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// G_j(r) = r^{j−2} e^{−αr}, any integer j.
pub fn g_kernel(j: i32, alpha: Complex64, r: f64) -> Complex64 {
    (-alpha * r).exp() * r.powi(j - 2)
}

/// Kernel of E_k0 as a volume potential: |x − q|^{k−2} e^{−α|x−q|}.
pub fn kernel_value(k: usize, alpha: Complex64, r: f64) -> Complex64 {
    g_kernel(k as i32, alpha, r)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GKernel {
    pub k: usize,
    pub alpha: Complex64,
}

impl GKernel {
    pub fn new(k: usize, alpha: Complex64) -> Result<Self> {
        if k < 1 {
            return Err(ArtError::arg("G_k needs k >= 1"));
        }
        if alpha == ZERO {
            return Err(ArtError::arg("ε and κ must not both vanish"));
        }
        Ok(GKernel { k, alpha })
    }

    pub fn eval(&self, r: f64) -> Complex64 {
        g_kernel(self.k as i32, self.alpha, r)
    }

    /// (a_{k−2}, a_{k−1}, a_k) with ΔG_k = a_{k−2}G_{k−2} + a_{k−1}G_{k−1} + a_k G_k.
    pub fn coefficients(&self) -> [Complex64; 3] {
        let k = self.k as f64;
        [
            Complex64::new((k - 1.0) * (k - 2.0), 0.0),
            -2.0 * self.alpha * (k - 1.0),
            self.alpha * self.alpha,
        ]
    }

    /// (Δ − α²)G_k at r from the radial part G'' + (2/r)G' by central differences.
    pub fn apply_numeric(&self, r: f64, h: f64) -> Complex64 {
        let (gm, g0, gp) = (self.eval(r - h), self.eval(r), self.eval(r + h));
        let d2 = (gp - 2.0 * g0 + gm) / (h * h);
        let d1 = (gp - gm) / (2.0 * h);
        d2 + d1 * (2.0 / r) - self.alpha * self.alpha * g0
    }

    /// a_{k−2}G_{k−2} + a_{k−1}G_{k−1} + (a_k − α²)G_k at r.
    pub fn apply_formula(&self, r: f64) -> Complex64 {
        let [a0, a1, a2] = self.coefficients();
        let k = self.k as i32;
        a0 * g_kernel(k - 2, self.alpha, r)
            + a1 * g_kernel(k - 1, self.alpha, r)
            + (a2 - self.alpha * self.alpha) * g_kernel(k, self.alpha, r)
    }
}

/// ((k−1)(k−2), −2α(k−1), α²)
pub fn g_radial_apply(k: usize, alpha: Complex64) -> Result<[Complex64; 3]> {
    Ok(GKernel::new(k, alpha)?.coefficients())
}

/// Largest relative gap between the numeric and the closed-form (Δ − α²)G_k
/// over `radii`, scaled by the size of the terms on the right.
pub fn g_radial_check(k: usize, alpha: Complex64, radii: &[f64], h: f64) -> Result<f64> {
    let g = GKernel::new(k, alpha)?;
    let [a0, a1, a2] = g.coefficients();
    let mut worst: f64 = 0.0;
    for &r in radii {
        if !(r > h) {
            return Err(ArtError::arg(format!(
                "radius {r} must exceed the step {h}"
            )));
        }
        let ki = k as i32;
        let scale = (a0 * g_kernel(ki - 2, alpha, r)).norm()
            + (a1 * g_kernel(ki - 1, alpha, r)).norm()
            + (a2 * g_kernel(ki, alpha, r)).norm();
        worst = worst.max((g.apply_numeric(r, h) - g.apply_formula(r)).norm() / scale);
    }
    Ok(worst)
}

fn equal_volume_radius(cell: f64) -> f64 {
    (3.0 * cell / (4.0 * PI)).cbrt()
}

fn check_isotropic(f: &PhaseField) -> Result<()> {
    if !f.is_isotropic() || f.is_causal() {
        return Err(ArtError::arg(
            "volume potential needs a stationary source independent of ξ",
        ));
    }
    Ok(())
}

/// E_k0(x) = ∫ e^{−α|x−q|}|x−q|^{k−2} f(q) dV_q by the midpoint rule on the
/// nodes of `fgrid`. For k = 1 any node closer than the equal-volume radius
/// a contributes the potential of a uniform ball, (2π/3)(3a² − d²)e^{−αd},
/// which is 2πa² at the node itself.
pub fn volume_potential(
    k: usize,
    f: &PhaseField,
    alpha: Complex64,
    fgrid: &Grid3,
    x: &Point3,
) -> Result<Complex64> {
    if k < 1 {
        return Err(ArtError::arg("volume potential needs k >= 1"));
    }
    check_isotropic(f)?;
    let h = fgrid.spacing();
    let cell = h[0] * h[1] * h[2];
    let a = equal_volume_radius(cell);
    let e = crate::geometry::Direction::e3();
    // summed in index order so the result does not depend on scheduling
    let sum: Complex64 = (0..fgrid.len())
        .into_par_iter()
        .map(|idx| {
            let q = fgrid.node_at(idx);
            let fq = f.eval_static(&q, &e);
            if fq == ZERO {
                return ZERO;
            }
            let d = (*x - q).norm();
            let w = if k == 1 && d < a {
                (-alpha * d).exp() * (2.0 * PI / 3.0) * (3.0 * a * a - d * d)
            } else if d == 0.0 {
                if k == 2 {
                    Complex64::new(cell, 0.0)
                } else {
                    ZERO
                }
            } else {
                kernel_value(k, alpha, d) * cell
            };
            w * fq
        })
        .collect::<Vec<_>>()
        .into_iter()
        .sum();
    Ok(sum)
}

/// E_k0 at every node of the grid of `f` (rank 0), sharing one kernel table
/// indexed by node offset.
pub fn volume_potential_grid(
    k: usize,
    f: &SymTensorGridField,
    alpha: Complex64,
) -> Result<SymTensorGridField> {
    if k < 1 {
        return Err(ArtError::arg("volume potential needs k >= 1"));
    }
    if f.rank != 0 {
        return Err(ArtError::arg(format!(
            "volume potential needs a scalar field, got rank {}",
            f.rank
        )));
    }
    let g = f.grid;
    let [nx, ny, nz] = g.dims;
    let h = g.spacing();
    let cell = h[0] * h[1] * h[2];
    let a = equal_volume_radius(cell);
    let mut table = vec![ZERO; nx * ny * nz];
    for dk in 0..nz {
        for dj in 0..ny {
            for di in 0..nx {
                let r = ((di as f64 * h[0]).powi(2)
                    + (dj as f64 * h[1]).powi(2)
                    + (dk as f64 * h[2]).powi(2))
                .sqrt();
                table[di + nx * (dj + ny * dk)] = if r == 0.0 {
                    match k {
                        1 => Complex64::new(2.0 * PI * a * a, 0.0),
                        2 => Complex64::new(cell, 0.0),
                        _ => ZERO,
                    }
                } else {
                    kernel_value(k, alpha, r) * cell
                };
            }
        }
    }
    let support: Vec<([usize; 3], Complex64)> = (0..g.len())
        .filter(|&i| f.data[i] != ZERO)
        .map(|i| (g.ijk(i), f.data[i]))
        .collect();
    let data: Vec<Complex64> = (0..g.len())
        .into_par_iter()
        .map(|idx| {
            let [i, j, l] = g.ijk(idx);
            support.iter().fold(ZERO, |acc, (q, v)| {
                let t = i.abs_diff(q[0]) + nx * (j.abs_diff(q[1]) + ny * l.abs_diff(q[2]));
                acc + table[t] * v
            })
        })
        .collect();
    SymTensorGridField::from_data(0, g, data)
}

/// 7-point Laplacian of every component, on the grid shrunk by one node.
pub fn laplacian(field: &SymTensorGridField) -> Result<SymTensorGridField> {
    let g = field.grid;
    let inner = g.shrink(1)?;
    let h = g.spacing();
    let mut out = SymTensorGridField::zeros(field.rank, inner);
    let n_in = inner.len();
    for c in 0..field.ncomp() {
        let src = field.component(c);
        for idx in 0..n_in {
            let [i, j, l] = inner.ijk(idx);
            let (i, j, l) = (i + 1, j + 1, l + 1);
            let at = |a: usize, b: usize, d: usize| src[g.index(a, b, d)];
            let centre = at(i, j, l);
            let v = (at(i + 1, j, l) - 2.0 * centre + at(i - 1, j, l)) / (h[0] * h[0])
                + (at(i, j + 1, l) - 2.0 * centre + at(i, j - 1, l)) / (h[1] * h[1])
                + (at(i, j, l + 1) - 2.0 * centre + at(i, j, l - 1)) / (h[2] * h[2]);
            out.data[c * n_in + idx] = v;
        }
    }
    Ok(out)
}

fn restrict(field: &SymTensorGridField, to: &Grid3) -> Result<SymTensorGridField> {
    let g = field.grid;
    let h = g.spacing();
    let off: Vec<usize> = (0..3)
        .map(|a| ((to.min.0[a] - g.min.0[a]) / h[a]).round() as usize)
        .collect();
    if (0..3).any(|a| off[a] + to.dims[a] > g.dims[a]) {
        return Err(ArtError::arg("restriction target is not a sub-grid"));
    }
    let n = to.len();
    let mut out = SymTensorGridField::zeros(field.rank, *to);
    for c in 0..field.ncomp() {
        for idx in 0..n {
            let [i, j, l] = to.ijk(idx);
            out.data[c * n + idx] = field.value(c, g.index(i + off[0], j + off[1], l + off[2]));
        }
    }
    Ok(out)
}

/// Δ_h E − α²E + 4πf on the interior; with α = iκ this is ΔE + κ²E + 4πf.
pub fn helmholtz_residual(
    e10: &SymTensorGridField,
    f: &SymTensorGridField,
    alpha: Complex64,
) -> Result<SymTensorGridField> {
    e10.check_compatible(f)?;
    let lap = laplacian(e10)?;
    let e_in = restrict(e10, &lap.grid)?;
    let f_in = restrict(f, &lap.grid)?;
    lap.axpy(-alpha * alpha, &e_in)?
        .axpy(Complex64::new(4.0 * PI, 0.0), &f_in)
}

/// f ≈ (Δ_h − α²)² (E_20/(8πα)) on the grid shrunk by two nodes.
pub fn reconstruct_prop44(e20: &GridField, alpha: Complex64) -> Result<GridField> {
    if alpha == ZERO {
        return Err(ArtError::arg(
            "reconstruction needs α ≠ 0 (prop4.4 hypothesis)",
        ));
    }
    if e20.rank != 0 || e20.frames() != 1 {
        return Err(ArtError::arg("E_20 must be a stationary scalar field"));
    }
    let u = e20.frame(0).scale(1.0 / (8.0 * PI * alpha));
    let step = |v: &SymTensorGridField| -> Result<SymTensorGridField> {
        let lap = laplacian(v)?;
        let inner = restrict(v, &lap.grid)?;
        lap.axpy(-alpha * alpha, &inner)
    };
    Ok(GridField::stationary(step(&step(&u)?)?))
}

/// Lattice of spacing `h` through `center` covering the support of `f`.
fn aligned_lattice(f: &PhaseField, center: &Point3, h: f64) -> Result<Grid3> {
    let reach = f.effective_radius_about(center);
    if !reach.is_finite() {
        return Err(ArtError::arg("source has unbounded support"));
    }
    let half = (reach / h).ceil() as usize + 1;
    Grid3::cube(*center, h * half as f64, 2 * half + 1)
}

fn block_potential(
    k: usize,
    f: &PhaseField,
    alpha: Complex64,
    center: &Point3,
    h: f64,
    half: usize,
) -> Result<SymTensorGridField> {
    let lattice = aligned_lattice(f, center, h)?;
    let block = Grid3::block(*center, h, half)?;
    let values: Vec<Complex64> = (0..block.len())
        .map(|i| volume_potential(k, f, alpha, &lattice, &block.node_at(i)))
        .collect::<Result<_>>()?;
    SymTensorGridField::from_data(0, block, values)
}

/// Helmholtz residual on the 3³ interior of a 5³ block of spacing `h` around
/// `center`, with E_10 from a lattice through the block. Returns the largest
/// residual and the largest 4π|f| on the same nodes.
pub fn helmholtz_probe(
    f: &PhaseField,
    alpha: Complex64,
    center: &Point3,
    h: f64,
) -> Result<(f64, f64)> {
    check_isotropic(f)?;
    let e = block_potential(1, f, alpha, center, h, 2)?;
    let fs = SymTensorGridField::from_fn(0, e.grid, |i| {
        crate::tensor::SymTensor::scalar(
            f.eval_static(&e.grid.node_at(i), &crate::geometry::Direction::e3()),
        )
    });
    let r = helmholtz_residual(&e, &fs, alpha)?;
    let inner = r.grid;
    let rmax = r.data.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let fmax = (0..inner.len())
        .map(|i| {
            4.0 * PI
                * f.eval_static(&inner.node_at(i), &crate::geometry::Direction::e3())
                    .norm()
        })
        .fold(0.0, f64::max);
    Ok((rmax, fmax))
}

/// Largest |f-estimate − f| of the round trip on the 3³ centre of a 7³
/// block of spacing `h` around `center`.
pub fn prop44_probe(f: &PhaseField, alpha: Complex64, center: &Point3, h: f64) -> Result<f64> {
    check_isotropic(f)?;
    let e = block_potential(2, f, alpha, center, h, 3)?;
    let est = reconstruct_prop44(&GridField::stationary(e), alpha)?;
    Ok((0..est.grid.len())
        .map(|i| {
            (est.data[i] - f.eval_static(&est.grid.node_at(i), &crate::geometry::Direction::e3()))
                .norm()
        })
        .fold(0.0, f64::max))
}
