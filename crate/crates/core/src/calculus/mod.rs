//! Transport operators H, L_k and L_k^t by central differences, the residual
//! checks of the ray identities, and an independent characteristic sweep.

mod sweep;
mod verify;

pub use sweep::{energy_balance, march, sweep_transport, EnergyBalance, SweepField};
pub use verify::{
    verify_cor_2_3, verify_lemma_2_1, verify_lemma_2_2, verify_lemma_2_5, verify_theorem_2_4,
    verify_theorem_2_6, FdCheckConfig,
};

use num_complex::Complex64;

use crate::error::{ArtError, Result};
use crate::fields::AbsorptionSpec;
use crate::geometry::{Direction, Point3};

/// Steps of the second-order central differences in x (along ξ) and t.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FDSpec {
    pub h_fd: f64,
    pub h_t: f64,
}

impl Default for FDSpec {
    fn default() -> Self {
        FDSpec {
            h_fd: 1e-3,
            h_t: 1e-3,
        }
    }
}

impl FDSpec {
    pub fn new(h_fd: f64, h_t: f64) -> Result<Self> {
        if !(h_fd > 0.0 && h_fd.is_finite() && h_t > 0.0 && h_t.is_finite()) {
            return Err(ArtError::arg(format!(
                "finite-difference steps must be positive, got {h_fd}, {h_t}"
            )));
        }
        Ok(FDSpec { h_fd, h_t })
    }

    /// Both steps multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        FDSpec {
            h_fd: self.h_fd * factor,
            h_t: self.h_t * factor,
        }
    }
}

/// Normalization of the non-stationary operator L_k^t.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LtNorm {
    /// L_k^t = (∂_t + H + α)^k, no factor.
    #[default]
    Verbatim,
    /// L_k^t = (1/(k−1)!)(∂_t + H + α)^k, matching L_k.
    Factorial,
}

pub(crate) fn factorial(n: usize) -> f64 {
    (1..=n).map(|v| v as f64).product()
}

/// Hψ(x, ξ) ≈ [ψ(x + hξ) − ψ(x − hξ)]/(2h).
#[allow(non_snake_case)]
pub fn apply_H<P>(mut psi: P, x: &Point3, xi: &Direction, fd: &FDSpec) -> Result<Complex64>
where
    P: FnMut(&Point3, &Direction) -> Result<Complex64>,
{
    let h = fd.h_fd;
    Ok((psi(&x.along(xi, h), xi)? - psi(&x.along(xi, -h), xi)?) / (2.0 * h))
}

/// (H + α)^k ψ at x from the 2k + 1 values ψ(x + jhξ), j = −k..k.
fn nested_transport<P>(
    k: usize,
    mut psi: P,
    x: &Point3,
    xi: &Direction,
    a: &AbsorptionSpec,
    h: f64,
) -> Result<Complex64>
where
    P: FnMut(&Point3, &Direction) -> Result<Complex64>,
{
    let pts: Vec<Point3> = (0..=2 * k)
        .map(|j| x.along(xi, (j as f64 - k as f64) * h))
        .collect();
    let mut g: Vec<Complex64> = pts.iter().map(|p| psi(p, xi)).collect::<Result<_>>()?;
    let alpha: Vec<Complex64> = pts.iter().map(|p| a.eval(p, xi)).collect();
    for level in 1..=k {
        // g now lives on offsets −(k − level)..(k − level)
        let next: Vec<Complex64> = (1..g.len() - 1)
            .map(|j| (g[j + 1] - g[j - 1]) / (2.0 * h) + alpha[j + level - 1] * g[j])
            .collect();
        g = next;
    }
    Ok(g[0])
}

/// H^m ψ by m nested central differences of step `h`.
pub fn apply_h_power<P>(m: usize, psi: P, x: &Point3, xi: &Direction, h: f64) -> Result<Complex64>
where
    P: FnMut(&Point3, &Direction) -> Result<Complex64>,
{
    nested_transport(m, psi, x, xi, &AbsorptionSpec::zero(), h)
}

/// L_1 = H + α, L_k = (1/(k−1))(H + α)L_{k−1}, i.e. (1/(k−1)!)(H + α)^k.
#[allow(non_snake_case)]
pub fn apply_L<P>(
    k: usize,
    psi: P,
    x: &Point3,
    xi: &Direction,
    a: &AbsorptionSpec,
    fd: &FDSpec,
) -> Result<Complex64>
where
    P: FnMut(&Point3, &Direction) -> Result<Complex64>,
{
    if k < 1 {
        return Err(ArtError::arg("L_k needs k >= 1"));
    }
    Ok(nested_transport(k, psi, x, xi, a, fd.h_fd)? / factorial(k - 1))
}

/// (∂_t + H + α)^k ψ on a (2k+1)² space-time stencil, normalized per `norm`.
#[allow(non_snake_case, clippy::too_many_arguments)]
pub fn apply_Lt<P>(
    k: usize,
    mut psi: P,
    t: f64,
    x: &Point3,
    xi: &Direction,
    a: &AbsorptionSpec,
    fd: &FDSpec,
    norm: LtNorm,
) -> Result<Complex64>
where
    P: FnMut(f64, &Point3, &Direction) -> Result<Complex64>,
{
    if k < 1 {
        return Err(ArtError::arg("L_k^t needs k >= 1"));
    }
    let (h, ht) = (fd.h_fd, fd.h_t);
    let w = 2 * k + 1;
    let pts: Vec<Point3> = (0..w)
        .map(|j| x.along(xi, (j as f64 - k as f64) * h))
        .collect();
    let alpha: Vec<Complex64> = pts.iter().map(|p| a.eval(p, xi)).collect();
    // g[i][j]: time offset i, space offset j
    let mut g: Vec<Vec<Complex64>> = (0..w)
        .map(|i| {
            let ti = t + (i as f64 - k as f64) * ht;
            pts.iter()
                .map(|p| psi(ti, p, xi))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    for level in 1..=k {
        let m = g.len() - 2;
        let mut next = vec![vec![Complex64::new(0.0, 0.0); m]; m];
        for i in 0..m {
            for j in 0..m {
                next[i][j] = (g[i + 2][j + 1] - g[i][j + 1]) / (2.0 * ht)
                    + (g[i + 1][j + 2] - g[i + 1][j]) / (2.0 * h)
                    + alpha[j + level] * g[i + 1][j + 1];
            }
        }
        g = next;
    }
    let v = g[0][0];
    Ok(match norm {
        LtNorm::Verbatim => v,
        LtNorm::Factorial => v / factorial(k - 1),
    })
}
