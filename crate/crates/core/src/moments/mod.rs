//! Integral angular moments E_kp of the transforms, the divergence
//! recurrences between them, volume potentials and the G_k kernels.

pub mod algebra;
mod potential;
mod recurrence;

pub use potential::{
    g_kernel, g_radial_apply, g_radial_check, helmholtz_probe, helmholtz_residual, kernel_value,
    laplacian, prop44_probe, reconstruct_prop44, volume_potential, volume_potential_grid, GKernel,
};
pub use recurrence::{
    cor42_rhs, grid_check, moment_div_residual, thm41_rhs, thm43_residual, Cor42Convention,
    GridCheckConfig, GridIdentity, MomentSource,
};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::art::{art_multi, art_multi_time, RayQuadSpec};
use crate::calculus::apply_h_power;
use crate::error::{ArtError, Result};
use crate::fields::{AbsorptionSpec, GridField, PhaseField};
use crate::geometry::{Direction, Grid3, Point3, SphereGrid};
use crate::tensor::{component_count, direction_monomials, SymTensor, SymTensorGridField};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// E_kp as a rank-p field, with the discretization it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentField {
    pub k: usize,
    pub p: usize,
    pub field: SymTensorGridField,
    pub sphere: (usize, usize),
    pub h_ray: f64,
}

impl MomentField {
    pub fn to_grid_field(&self) -> GridField {
        GridField::stationary(self.field.clone())
    }
}

fn monomials(sgrid: &SphereGrid, pmax: usize) -> Vec<Vec<Vec<f64>>> {
    sgrid
        .nodes
        .iter()
        .map(|xi| (0..=pmax).map(|p| direction_monomials(xi, p)).collect())
        .collect()
}

/// E^{i1…ip}_k(x) = ∫ u_k(x, ξ) ξ^{i1}…ξ^{ip} dλ(ξ), unnormalized.
pub fn angular_moment(
    k: usize,
    p: usize,
    f: &PhaseField,
    a: &AbsorptionSpec,
    x: &Point3,
    sgrid: &SphereGrid,
    q: &RayQuadSpec,
) -> Result<SymTensor> {
    let mut out = vec![ZERO; component_count(p)];
    for (xi, w) in sgrid.nodes.iter().zip(&sgrid.weights) {
        let u = art_multi(k, f, a, x, xi, q)?[k] * *w;
        if u == ZERO {
            continue;
        }
        for (o, m) in out
            .iter_mut()
            .zip(SymTensor::direction_power(xi, p).components())
        {
            *o += u * m;
        }
    }
    SymTensor::from_components(p, out)
}

/// f_p^{j1…jp}(x) = ∫ f(x, ξ) ξ^{j1}…ξ^{jp} dλ(ξ) at time t.
pub fn f_moment_at(p: usize, f: &PhaseField, t: f64, x: &Point3, sgrid: &SphereGrid) -> SymTensor {
    let mut out = vec![ZERO; component_count(p)];
    for (xi, w) in sgrid.nodes.iter().zip(&sgrid.weights) {
        let v = f.eval(t, x, xi) * *w;
        for (o, m) in out
            .iter_mut()
            .zip(SymTensor::direction_power(xi, p).components())
        {
            *o += v * m;
        }
    }
    SymTensor::from_components(p, out).expect("component count matches rank")
}

pub fn f_moment(p: usize, f: &PhaseField, x: &Point3, sgrid: &SphereGrid) -> SymTensor {
    f_moment_at(p, f, 0.0, x, sgrid)
}

/// All E_kp with k ≤ kmax, p ≤ pmax on a grid from one ray pass per
/// (node, direction). Optionally also the moments of α·u_k.
#[derive(Debug, Clone)]
pub struct MomentTable {
    pub grid: Grid3,
    pub kmax: usize,
    pub pmax: usize,
    pub time: Option<f64>,
    pub sphere: (usize, usize),
    pub h_ray: f64,
    e: Vec<SymTensorGridField>,
    alpha_u: Option<Vec<SymTensorGridField>>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentRequest {
    pub kmax: usize,
    pub pmax: usize,
    pub time: Option<f64>,
    pub alpha_weighted: bool,
}

impl MomentTable {
    pub fn compute(
        req: &MomentRequest,
        f: &PhaseField,
        a: &AbsorptionSpec,
        grid: &Grid3,
        sgrid: &SphereGrid,
        q: &RayQuadSpec,
    ) -> Result<Self> {
        let (kmax, pmax) = (req.kmax, req.pmax);
        let mons = monomials(sgrid, pmax);
        let offsets: Vec<usize> = (0..=pmax)
            .scan(0, |acc, p| {
                let o = *acc;
                *acc += component_count(p);
                Some(o)
            })
            .collect();
        let width = offsets[pmax] + component_count(pmax);
        let slots = if req.alpha_weighted { 2 } else { 1 };

        let per_node: Vec<Vec<Complex64>> = (0..grid.len())
            .into_par_iter()
            .map(|idx| {
                let x = grid.node_at(idx);
                let mut acc = vec![ZERO; slots * (kmax + 1) * width];
                for (d, (xi, w)) in sgrid.nodes.iter().zip(&sgrid.weights).enumerate() {
                    let u = match req.time {
                        Some(t) => art_multi_time(kmax, f, a, t, &x, xi, q)?,
                        None => art_multi(kmax, f, a, &x, xi, q)?,
                    };
                    let al = if req.alpha_weighted {
                        a.eval(&x, xi)
                    } else {
                        ZERO
                    };
                    for (k, uk) in u.iter().enumerate() {
                        if *uk == ZERO {
                            continue;
                        }
                        let wu = uk * *w;
                        let base = k * width;
                        for p in 0..=pmax {
                            for (c, m) in mons[d][p].iter().enumerate() {
                                acc[base + offsets[p] + c] += wu * m;
                            }
                        }
                        if req.alpha_weighted {
                            let wau = wu * al;
                            let base = (kmax + 1) * width + k * width;
                            for p in 0..=pmax {
                                for (c, m) in mons[d][p].iter().enumerate() {
                                    acc[base + offsets[p] + c] += wau * m;
                                }
                            }
                        }
                    }
                }
                Ok(acc)
            })
            .collect::<Result<_>>()?;

        let build = |slot: usize| -> Vec<SymTensorGridField> {
            let mut out = Vec::with_capacity((kmax + 1) * (pmax + 1));
            for k in 0..=kmax {
                for (p, off) in offsets.iter().enumerate() {
                    let nc = component_count(p);
                    let mut data = vec![ZERO; nc * grid.len()];
                    let base = slot * (kmax + 1) * width + k * width + off;
                    for (idx, acc) in per_node.iter().enumerate() {
                        for c in 0..nc {
                            data[c * grid.len() + idx] = acc[base + c];
                        }
                    }
                    out.push(SymTensorGridField {
                        rank: p,
                        grid: *grid,
                        data,
                    });
                }
            }
            out
        };
        Ok(MomentTable {
            grid: *grid,
            kmax,
            pmax,
            time: req.time,
            sphere: (sgrid.n_polar, sgrid.n_azimuth),
            h_ray: q.step,
            e: build(0),
            alpha_u: if req.alpha_weighted {
                Some(build(1))
            } else {
                None
            },
        })
    }

    fn slot(&self, k: usize, p: usize) -> Result<usize> {
        if k > self.kmax || p > self.pmax {
            return Err(ArtError::arg(format!(
                "moment E_{{{k},{p}}} not in table (kmax {}, pmax {})",
                self.kmax, self.pmax
            )));
        }
        Ok(k * (self.pmax + 1) + p)
    }

    pub fn get(&self, k: usize, p: usize) -> Result<&SymTensorGridField> {
        Ok(&self.e[self.slot(k, p)?])
    }

    /// Moments of α·u_k, present when requested.
    pub fn alpha_weighted(&self, k: usize, p: usize) -> Result<&SymTensorGridField> {
        let s = self.slot(k, p)?;
        self.alpha_u
            .as_ref()
            .map(|v| &v[s])
            .ok_or_else(|| ArtError::arg("table was computed without α-weighted moments"))
    }

    pub fn moment_field(&self, k: usize, p: usize) -> Result<MomentField> {
        Ok(MomentField {
            k,
            p,
            field: self.get(k, p)?.clone(),
            sphere: self.sphere,
            h_ray: self.h_ray,
        })
    }
}

/// Moments (H^m f)_p for m ≤ mmax, p ≤ pmax on a grid; H by nested central
/// differences with step `h`.
#[derive(Debug, Clone)]
pub struct SourceMomentTable {
    pub grid: Grid3,
    pub mmax: usize,
    pub pmax: usize,
    fields: Vec<SymTensorGridField>,
}

impl SourceMomentTable {
    pub fn compute(
        mmax: usize,
        pmax: usize,
        f: &PhaseField,
        t: f64,
        grid: &Grid3,
        sgrid: &SphereGrid,
        h: f64,
    ) -> Result<Self> {
        let mons = monomials(sgrid, pmax);
        let per_node: Vec<Vec<Vec<Complex64>>> = (0..grid.len())
            .into_par_iter()
            .map(|idx| {
                let x = grid.node_at(idx);
                let mut acc: Vec<Vec<Complex64>> = (0..=mmax)
                    .flat_map(|_| (0..=pmax).map(|p| vec![ZERO; component_count(p)]))
                    .collect();
                for (d, (xi, w)) in sgrid.nodes.iter().zip(&sgrid.weights).enumerate() {
                    for m in 0..=mmax {
                        let v = if m == 0 {
                            f.eval(t, &x, xi)
                        } else {
                            apply_h_power(
                                m,
                                |y: &Point3, e: &Direction| Ok(f.eval(t, y, e)),
                                &x,
                                xi,
                                h,
                            )?
                        } * *w;
                        for p in 0..=pmax {
                            for (c, mm) in mons[d][p].iter().enumerate() {
                                acc[m * (pmax + 1) + p][c] += v * mm;
                            }
                        }
                    }
                }
                Ok(acc)
            })
            .collect::<Result<_>>()?;
        let mut fields = Vec::new();
        for m in 0..=mmax {
            for p in 0..=pmax {
                let nc = component_count(p);
                let mut data = vec![ZERO; nc * grid.len()];
                for (idx, acc) in per_node.iter().enumerate() {
                    for c in 0..nc {
                        data[c * grid.len() + idx] = acc[m * (pmax + 1) + p][c];
                    }
                }
                fields.push(SymTensorGridField {
                    rank: p,
                    grid: *grid,
                    data,
                });
            }
        }
        Ok(SourceMomentTable {
            grid: *grid,
            mmax,
            pmax,
            fields,
        })
    }

    pub fn get(&self, m: usize, p: usize) -> Result<&SymTensorGridField> {
        if m > self.mmax || p > self.pmax {
            return Err(ArtError::arg(format!(
                "source moment (H^{m} f)_{p} not in table"
            )));
        }
        Ok(&self.fields[m * (self.pmax + 1) + p])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::make_sphere_grid;
    use crate::oracle;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn angular_moment_examples() {
        let sg = make_sphere_grid(8, 16).unwrap();
        let q = RayQuadSpec::default();
        let a0 = AbsorptionSpec::zero();
        let zero =
            angular_moment(2, 2, &PhaseField::zero(), &a0, &Point3::ORIGIN, &sg, &q).unwrap();
        assert_eq!(zero.max_abs(), 0.0);

        let bump = PhaseField::ball_bump(Point3::ORIGIN, 0.6, c(1.0, 0.0)).unwrap();
        let e1 = angular_moment(1, 1, &bump, &a0, &Point3::ORIGIN, &sg, &q).unwrap();
        assert!(e1.max_abs() < 1e-14);

        for k in 0..3 {
            let e0 = angular_moment(k, 0, &bump, &a0, &Point3::ORIGIN, &sg, &q).unwrap();
            let radial = oracle::integrate(
                |s| {
                    c(
                        s.powi(k as i32) * crate::fields::ball_bump_radial(s * s / 0.36),
                        0.0,
                    )
                },
                0.0,
                0.6,
                1e-14,
            );
            assert!(
                (e0.components()[0] - radial * 4.0 * PI).norm() < 1e-9,
                "k = {k}"
            );
        }
    }

    #[test]
    fn f_moment_examples() {
        let sg = make_sphere_grid(4, 8).unwrap();
        let x = Point3::new(0.1, 0.2, 0.0);
        let g = PhaseField::gaussian(Point3::ORIGIN, 0.3, c(2.0, 1.0)).unwrap();
        let fx = g.eval_static(&x, &Direction::e1());
        assert!((f_moment(0, &g, &x, &sg).components()[0] - fx * 4.0 * PI).norm() < 1e-13);
        assert!(f_moment(1, &g, &x, &sg).max_abs() < 1e-14);

        let w = SymTensor::from_real(1, &[0.3, -0.5, 1.2]).unwrap();
        let f = PhaseField::tensor_generated(crate::fields::TensorFieldSpec::constant(w.clone()));
        let m = f_moment(1, &f, &x, &sg);
        for i in 0..3 {
            assert!((m.components()[i] - w.components()[i] * (4.0 * PI / 3.0)).norm() < 1e-13);
        }
    }

    #[test]
    fn table_agrees_with_pointwise_moments() {
        let sg = make_sphere_grid(4, 8).unwrap();
        let q = RayQuadSpec::default().with_step(0.01).unwrap();
        let f = PhaseField::gaussian(Point3::new(0.02, 0.0, 0.01), 0.15, c(1.0, 0.0)).unwrap();
        let a = AbsorptionSpec::constant(c(0.4, 0.2)).unwrap();
        let grid = Grid3::cube(Point3::ORIGIN, 0.2, 3).unwrap();
        let req = MomentRequest {
            kmax: 2,
            pmax: 2,
            time: None,
            alpha_weighted: true,
        };
        let t = MomentTable::compute(&req, &f, &a, &grid, &sg, &q).unwrap();
        for idx in [0, 13, 26] {
            let x = grid.node_at(idx);
            for k in 0..=2 {
                for p in 0..=2 {
                    let direct = angular_moment(k, p, &f, &a, &x, &sg, &q).unwrap();
                    let got = t.get(k, p).unwrap().at(idx);
                    for (u, v) in got.components().iter().zip(direct.components()) {
                        assert!((u - v).norm() < 1e-13);
                    }
                    let aw = t.alpha_weighted(k, p).unwrap().at(idx);
                    for (u, v) in aw.components().iter().zip(direct.components()) {
                        assert!((u - v * c(0.4, 0.2)).norm() < 1e-13);
                    }
                }
            }
        }
        assert!(t.get(3, 0).is_err());
    }

    #[test]
    fn moment_tensors_are_symmetric() {
        // stored in sorted-index form, so symmetry means every permutation of a
        // multi-index reads the same value; check against an explicit loop
        let sg = make_sphere_grid(6, 12).unwrap();
        let q = RayQuadSpec::default().with_step(0.01).unwrap();
        let f = PhaseField::gaussian(Point3::new(0.1, -0.05, 0.0), 0.2, c(1.0, 0.5)).unwrap();
        let a = AbsorptionSpec::constant(c(0.3, 0.0)).unwrap();
        let x = Point3::new(0.05, 0.1, -0.1);
        let e = angular_moment(1, 3, &f, &a, &x, &sg, &q).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                for l in 0..3 {
                    let mut naive = c(0.0, 0.0);
                    for (xi, w) in sg.nodes.iter().zip(&sg.weights) {
                        let xc = xi.components();
                        naive += crate::art::art_k(1, &f, &a, &x, xi, &q).unwrap()
                            * (w * xc[i] * xc[j] * xc[l]);
                    }
                    assert!((e.get(&[i, j, l]) - naive).norm() < 1e-13);
                    assert_eq!(e.get(&[i, j, l]), e.get(&[l, i, j]));
                }
            }
        }
    }
}
