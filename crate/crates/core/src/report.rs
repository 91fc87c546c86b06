//! Residual reports, the fitted error model behind every tolerance, and the
//! deterministic sample sets the checks run on.

use std::io::Write;

use crate::error::{ArtError, Result};
use crate::fields::PhaseField;
use crate::geometry::{BallDomain, Direction, Point3};

/// Outcome of one check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    /// Informational row; never affects the exit code.
    Report,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Pass => "true",
            Verdict::Fail => "false",
            Verdict::Report => "report",
        }
    }

    pub fn from_check(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport {
    pub identity: String,
    pub k: usize,
    pub p: usize,
    pub n: usize,
    /// Free-form discretization label, e.g. "64 samples" or "17^3 s8x16".
    pub grid: String,
    pub h_ray: f64,
    pub h_fd: f64,
    pub h_t: f64,
    pub samples: usize,
    pub residual_max: f64,
    /// Root mean square over samples.
    pub residual_l2: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
    /// Observed order from the last two refinement levels, when measured.
    pub order: Option<f64>,
    pub model: Option<ToleranceModel>,
}

impl ResidualReport {
    pub fn passed(&self) -> bool {
        self.verdict != Verdict::Fail
    }

    pub fn informational(mut self) -> Self {
        self.verdict = Verdict::Report;
        self
    }

    pub fn renamed(mut self, identity: impl Into<String>) -> Self {
        self.identity = identity.into();
        self
    }
}

pub const CSV_HEADER: [&str; 12] = [
    "identity",
    "k",
    "p",
    "n",
    "grid",
    "h_ray",
    "h_fd",
    "h_t",
    "residual_max",
    "residual_l2",
    "tolerance",
    "pass",
];

fn num(v: f64) -> String {
    format!("{v:.6e}")
}

/// Write reports as RFC 4180 CSV with a header row.
pub fn write_csv<W: Write>(reports: &[ResidualReport], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let io = |e: csv::Error| ArtError::Io(std::io::Error::other(e));
    out.write_record(CSV_HEADER).map_err(io)?;
    for r in reports {
        out.write_record([
            r.identity.clone(),
            r.k.to_string(),
            r.p.to_string(),
            r.n.to_string(),
            r.grid.clone(),
            num(r.h_ray),
            num(r.h_fd),
            num(r.h_t),
            num(r.residual_max),
            num(r.residual_l2),
            num(r.tolerance),
            r.verdict.as_str().to_string(),
        ])
        .map_err(io)?;
    }
    out.flush()?;
    Ok(())
}

/// Error model r(h) ≈ C·h^p fitted in log-log space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToleranceModel {
    pub c: f64,
    pub p: f64,
}

impl ToleranceModel {
    /// Least-squares fit through (h, r) pairs with r > 0; `None` if fewer than
    /// two usable points.
    pub fn fit(points: &[(f64, f64)]) -> Option<Self> {
        let pts: Vec<(f64, f64)> = points
            .iter()
            .filter(|(h, r)| *h > 0.0 && *r > 0.0 && r.is_finite())
            .map(|(h, r)| (h.ln(), r.ln()))
            .collect();
        if pts.len() < 2 {
            return None;
        }
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        if sxx == 0.0 {
            return None;
        }
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let p = sxy / sxx;
        Some(ToleranceModel {
            c: (my - p * mx).exp(),
            p,
        })
    }

    pub fn predict(&self, h: f64) -> f64 {
        self.c * h.powf(self.p)
    }

    /// 2× the model prediction, never below `floor`.
    pub fn tolerance(model: Option<&ToleranceModel>, h: f64, floor: f64) -> f64 {
        match model {
            Some(m) => (2.0 * m.predict(h)).max(floor),
            None => floor,
        }
    }
}

/// log2(r_coarse / r_fine) for a halving step.
pub fn observed_order(r_coarse: f64, r_fine: f64) -> Option<f64> {
    if r_coarse > 0.0 && r_fine > 0.0 {
        Some((r_coarse / r_fine).log2())
    } else {
        None
    }
}

pub fn max_and_rms(values: impl IntoIterator<Item = f64>) -> (f64, f64) {
    let mut n = 0usize;
    let mut max: f64 = 0.0;
    let mut sq = 0.0;
    for v in values {
        n += 1;
        max = max.max(v);
        sq += v * v;
    }
    (max, if n == 0 { 0.0 } else { (sq / n as f64).sqrt() })
}

const PRIMES: [u32; 8] = [2, 3, 5, 7, 11, 13, 17, 19];

/// Radical inverse of `i` in base `b`.
pub fn radical_inverse(mut i: u64, b: u32) -> f64 {
    let b = b as u64;
    let mut f = 1.0;
    let mut r = 0.0;
    while i > 0 {
        f /= b as f64;
        r += f * (i % b) as f64;
        i /= b;
    }
    r
}

/// The `dim`-dimensional Halton point with index `i`.
pub fn halton(i: u64, dim: usize) -> Vec<f64> {
    assert!(dim <= PRIMES.len());
    PRIMES[..dim]
        .iter()
        .map(|&b| radical_inverse(i, b))
        .collect()
}

/// One phase-space point (t, x, ξ) at which an identity is checked.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub x: Point3,
    pub xi: Direction,
}

/// Halton samples inside `fraction`·R with directions aimed back through the
/// bulk of `f`, so that every ray actually crosses the source.
///
/// The time coordinate is the arrival time of the source's `t_peak` at x,
/// jittered by `t_jitter`.
pub fn aimed_samples(
    n: usize,
    seed: u64,
    dom: &BallDomain,
    fraction: f64,
    f: &PhaseField,
    spread: f64,
    t_peak: f64,
    t_jitter: f64,
) -> Vec<Sample> {
    let focus = f.focus();
    let r = fraction * dom.radius;
    let mut out = Vec::with_capacity(n);
    let mut i = 1 + seed.wrapping_mul(7919) % 100_003;
    while out.len() < n {
        let u = halton(i, 7);
        i += 1;
        let x = dom.center + Point3::new(2.0 * u[0] - 1.0, 2.0 * u[1] - 1.0, 2.0 * u[2] - 1.0) * r;
        if (x - dom.center).norm() > r {
            continue;
        }
        let aim =
            focus + Point3::new(2.0 * u[3] - 1.0, 2.0 * u[4] - 1.0, 2.0 * u[5] - 1.0) * spread;
        let Ok(xi) = Direction::from_point(x - aim) else {
            continue;
        };
        let t = t_peak + (x - focus).norm() + t_jitter * (2.0 * u[6] - 1.0);
        out.push(Sample { t, x, xi });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn fit_recovers_power_law() {
        let pts: Vec<(f64, f64)> = [0.1, 0.05, 0.025]
            .iter()
            .map(|&h| (h, 3.0 * h * h))
            .collect();
        let m = ToleranceModel::fit(&pts).unwrap();
        assert!((m.p - 2.0).abs() < 1e-12);
        assert!((m.c - 3.0).abs() < 1e-10);
        assert!((m.predict(0.01) - 3e-4).abs() < 1e-15);
        assert!(ToleranceModel::fit(&[(0.1, 0.0), (0.2, 0.0)]).is_none());
        assert_eq!(ToleranceModel::tolerance(None, 0.1, 1e-12), 1e-12);
    }

    #[test]
    fn halton_first_points() {
        assert_eq!(halton(1, 2), vec![0.5, 1.0 / 3.0]);
        assert_eq!(radical_inverse(6, 2), 0.375);
    }

    #[test]
    fn aimed_samples_are_interior_and_deterministic() {
        let f = PhaseField::gaussian(Point3::ORIGIN, 0.1, Complex64::new(1.0, 0.0)).unwrap();
        let dom = BallDomain::unit();
        let a = aimed_samples(32, 5, &dom, 0.8, &f, 0.1, 0.0, 0.0);
        let b = aimed_samples(32, 5, &dom, 0.8, &f, 0.1, 0.0, 0.0);
        assert_eq!(a, b);
        for s in &a {
            assert!(s.x.norm() <= 0.8 + 1e-15);
            // the backward ray passes within `spread`·√3 of the focus
            let d = s.x.norm_sq() - s.xi.dot(&s.x).powi(2);
            assert!(d.sqrt() <= 0.1 * 3f64.sqrt() + 1e-12);
        }
    }

    #[test]
    fn csv_has_fixed_columns() {
        let r = ResidualReport {
            identity: "lemma2.1".into(),
            k: 1,
            p: 0,
            n: 0,
            grid: "64 samples".into(),
            h_ray: 2e-3,
            h_fd: 1e-3,
            h_t: 0.0,
            samples: 64,
            residual_max: 1e-7,
            residual_l2: 5e-8,
            tolerance: 2e-7,
            verdict: Verdict::Pass,
            order: Some(2.0),
            model: None,
        };
        let mut buf = Vec::new();
        write_csv(&[r], &mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        let mut lines = s.lines();
        assert_eq!(lines.next().unwrap(), CSV_HEADER.join(","));
        assert!(lines
            .next()
            .unwrap()
            .starts_with("lemma2.1,1,0,0,64 samples,2.000000e-3"));
    }
}
