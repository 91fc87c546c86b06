//! Analytic phantoms for sources f(t, x, ξ), symmetric tensor fields w(t, x)
//! and absorption α(x, ξ) = ε + iρ, plus grid sampling and persistence.

mod grid;

pub use grid::{
    load_grid, read_grid, sample_grid, save_grid, write_grid, GridField, HEADER_LEN, MAGIC, VERSION,
};

use num_complex::Complex64;

use crate::error::{ArtError, Result};
use crate::geometry::{Direction, Point3};
use crate::tensor::{contract_direction, SymTensor};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Scalar spatial profile g(x) used to build phantoms and coefficient fields.
#[derive(Debug, Clone, PartialEq)]
pub enum ScalarProfile {
    /// g ≡ 1
    One,
    /// exp(−|x − c|² / (2 width²))
    Gaussian { center: Point3, width: f64 },
    /// exp(1 − 1/(1 − |x − c|²/R²)) inside the ball, 0 outside.
    BallBump { center: Point3, radius: f64 },
}

impl ScalarProfile {
    pub fn eval(&self, x: &Point3) -> f64 {
        match self {
            ScalarProfile::One => 1.0,
            ScalarProfile::Gaussian { center, width } => {
                (-(*x - *center).norm_sq() / (2.0 * width * width)).exp()
            }
            ScalarProfile::BallBump { center, radius } => {
                ball_bump_radial((*x - *center).norm_sq() / (radius * radius))
            }
        }
    }

    pub fn center(&self) -> Option<Point3> {
        match self {
            ScalarProfile::One => None,
            ScalarProfile::Gaussian { center, .. } | ScalarProfile::BallBump { center, .. } => {
                Some(*center)
            }
        }
    }

    /// Radius beyond which the profile is below 1e-14 (∞ for `One`).
    pub fn effective_radius(&self) -> f64 {
        match self {
            ScalarProfile::One => f64::INFINITY,
            // exp(−r²/2w²) < 1e-14  ⇔  r > w·sqrt(2·14·ln 10)
            ScalarProfile::Gaussian { width, .. } => {
                width * (28.0 * std::f64::consts::LN_10).sqrt()
            }
            ScalarProfile::BallBump { radius, .. } => *radius,
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            ScalarProfile::One => Ok(()),
            ScalarProfile::Gaussian { width, center } => {
                if !(*width > 0.0) || !center.is_finite() {
                    return Err(ArtError::arg(format!(
                        "gaussian width must be positive, got {width}"
                    )));
                }
                Ok(())
            }
            ScalarProfile::BallBump { radius, center } => {
                if !(*radius > 0.0) || !center.is_finite() {
                    return Err(ArtError::arg(format!(
                        "bump radius must be positive, got {radius}"
                    )));
                }
                Ok(())
            }
        }
    }
}

/// The C∞ mollifier exp(1 − 1/(1 − ρ²)) as a function of ρ².
pub fn ball_bump_radial(rho_sq: f64) -> f64 {
    if rho_sq >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - rho_sq)).exp()
    }
}

/// Temporal factor of a non-stationary source.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TemporalProfile {
    /// ≡ 1 (stationary).
    Off,
    /// exp(−(t − center)²/(2 width²)) for t ≥ 0, zero before.
    GaussianPulse { center: f64, width: f64 },
    /// Smooth step rising from 0 at t ≤ 0 to 1 at t ≥ duration.
    CausalRamp { duration: f64 },
}

impl TemporalProfile {
    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            TemporalProfile::Off => 1.0,
            TemporalProfile::GaussianPulse { center, width } => {
                if t < 0.0 {
                    0.0
                } else {
                    (-(t - center).powi(2) / (2.0 * width * width)).exp()
                }
            }
            TemporalProfile::CausalRamp { duration } => smooth_step(t / duration),
        }
    }

    pub fn is_causal(&self) -> bool {
        !matches!(self, TemporalProfile::Off)
    }

    /// Time after which the profile is identically 1, if any.
    pub fn settles_at(&self) -> Option<f64> {
        match *self {
            TemporalProfile::Off => Some(f64::NEG_INFINITY),
            TemporalProfile::GaussianPulse { .. } => None,
            TemporalProfile::CausalRamp { duration } => Some(duration),
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            TemporalProfile::Off => Ok(()),
            TemporalProfile::GaussianPulse { center, width } => {
                if !(width > 0.0) {
                    return Err(ArtError::arg("pulse width must be positive"));
                }
                // the jump at t = 0 must be invisible at double precision
                if (-(center * center) / (2.0 * width * width)).exp() > 1e-14 {
                    return Err(ArtError::arg(format!(
                        "pulse centred at {center} with width {width} is not causal to 1e-14"
                    )));
                }
                Ok(())
            }
            TemporalProfile::CausalRamp { duration } => {
                if !(duration > 0.0) {
                    return Err(ArtError::arg("ramp duration must be positive"));
                }
                Ok(())
            }
        }
    }
}

/// C∞ transition: 0 for u ≤ 0, 1 for u ≥ 1.
pub fn smooth_step(u: f64) -> f64 {
    if u <= 0.0 {
        0.0
    } else if u >= 1.0 {
        1.0
    } else {
        let a = (-1.0 / u).exp();
        let b = (-1.0 / (1.0 - u)).exp();
        a / (a + b)
    }
}

/// One term T·g(x) of a tensor field.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorTerm {
    pub tensor: SymTensor,
    pub profile: ScalarProfile,
}

/// Symmetric m-tensor field w(x) = Σ_j T_j g_j(x).
#[derive(Debug, Clone, PartialEq)]
pub struct TensorFieldSpec {
    pub rank: usize,
    pub terms: Vec<TensorTerm>,
}

impl TensorFieldSpec {
    pub fn new(rank: usize, terms: Vec<TensorTerm>) -> Result<Self> {
        for t in &terms {
            if t.tensor.rank() != rank {
                return Err(ArtError::arg(format!(
                    "term of rank {} in a rank-{rank} field",
                    t.tensor.rank()
                )));
            }
            t.profile.validate()?;
        }
        Ok(TensorFieldSpec { rank, terms })
    }

    pub fn zero(rank: usize) -> Self {
        TensorFieldSpec {
            rank,
            terms: vec![],
        }
    }

    pub fn constant(tensor: SymTensor) -> Self {
        TensorFieldSpec {
            rank: tensor.rank(),
            terms: vec![TensorTerm {
                tensor,
                profile: ScalarProfile::One,
            }],
        }
    }

    pub fn single(tensor: SymTensor, profile: ScalarProfile) -> Result<Self> {
        TensorFieldSpec::new(tensor.rank(), vec![TensorTerm { tensor, profile }])
    }

    pub fn eval(&self, x: &Point3) -> SymTensor {
        let mut out = SymTensor::zeros(self.rank);
        for term in &self.terms {
            let g = term.profile.eval(x);
            if g == 0.0 {
                continue;
            }
            for (o, v) in out
                .components_mut()
                .iter_mut()
                .zip(term.tensor.components())
            {
                *o += v * g;
            }
        }
        out
    }

    pub fn contract(&self, x: &Point3, xi: &Direction) -> Complex64 {
        self.terms.iter().fold(ZERO, |acc, term| {
            let g = term.profile.eval(x);
            if g == 0.0 {
                acc
            } else {
                acc + contract_direction(&term.tensor, xi) * g
            }
        })
    }

    pub fn is_spatially_constant(&self) -> bool {
        self.terms.iter().all(|t| t.profile == ScalarProfile::One)
    }

    pub fn effective_radius_about(&self, c: &Point3) -> f64 {
        self.terms
            .iter()
            .map(|t| match t.profile.center() {
                Some(pc) => (pc - *c).norm() + t.profile.effective_radius(),
                None => f64::INFINITY,
            })
            .fold(0.0, f64::max)
    }
}

/// Source f(t, x, ξ).
#[derive(Debug, Clone, PartialEq)]
pub enum PhaseField {
    Gaussian {
        center: Point3,
        width: f64,
        amplitude: Complex64,
    },
    BallBump {
        center: Point3,
        radius: f64,
        amplitude: Complex64,
    },
    /// f(x, ξ) = w_{i1…im}(x) ξ^{i1}…ξ^{im}
    TensorGenerated(TensorFieldSpec),
    /// f(t, x, ξ) = profile(t)·spatial(x, ξ)
    SeparableTime {
        spatial: Box<PhaseField>,
        profile: TemporalProfile,
    },
}

impl PhaseField {
    pub fn gaussian(center: Point3, width: f64, amplitude: Complex64) -> Result<Self> {
        ScalarProfile::Gaussian { center, width }.validate()?;
        Ok(PhaseField::Gaussian {
            center,
            width,
            amplitude,
        })
    }

    pub fn ball_bump(center: Point3, radius: f64, amplitude: Complex64) -> Result<Self> {
        ScalarProfile::BallBump { center, radius }.validate()?;
        Ok(PhaseField::BallBump {
            center,
            radius,
            amplitude,
        })
    }

    pub fn tensor_generated(w: TensorFieldSpec) -> Self {
        PhaseField::TensorGenerated(w)
    }

    pub fn with_time(self, profile: TemporalProfile) -> Result<Self> {
        profile.validate()?;
        if let PhaseField::SeparableTime { .. } = self {
            return Err(ArtError::arg("phantom already carries a temporal profile"));
        }
        Ok(PhaseField::SeparableTime {
            spatial: Box::new(self),
            profile,
        })
    }

    pub fn zero() -> Self {
        PhaseField::TensorGenerated(TensorFieldSpec::zero(0))
    }

    pub fn eval(&self, t: f64, x: &Point3, xi: &Direction) -> Complex64 {
        match self {
            PhaseField::Gaussian {
                center,
                width,
                amplitude,
            } => {
                amplitude
                    * ScalarProfile::Gaussian {
                        center: *center,
                        width: *width,
                    }
                    .eval(x)
            }
            PhaseField::BallBump {
                center,
                radius,
                amplitude,
            } => {
                amplitude
                    * ScalarProfile::BallBump {
                        center: *center,
                        radius: *radius,
                    }
                    .eval(x)
            }
            PhaseField::TensorGenerated(w) => w.contract(x, xi),
            PhaseField::SeparableTime { spatial, profile } => {
                let p = profile.eval(t);
                if p == 0.0 {
                    ZERO
                } else {
                    spatial.eval(t, x, xi) * p
                }
            }
        }
    }

    /// Stationary evaluation f(x, ξ).
    pub fn eval_static(&self, x: &Point3, xi: &Direction) -> Complex64 {
        self.eval(0.0, x, xi)
    }

    /// Rank of the generating tensor (0 for scalar phantoms).
    pub fn rank(&self) -> usize {
        match self {
            PhaseField::TensorGenerated(w) => w.rank,
            PhaseField::SeparableTime { spatial, .. } => spatial.rank(),
            _ => 0,
        }
    }

    /// The generating tensor w(t, x), so that f = ⟨w, ξ^m⟩.
    pub fn generating_tensor(&self, t: f64, x: &Point3) -> SymTensor {
        match self {
            PhaseField::TensorGenerated(w) => w.eval(x),
            PhaseField::SeparableTime { spatial, profile } => spatial
                .generating_tensor(t, x)
                .scale(Complex64::new(profile.eval(t), 0.0)),
            _ => SymTensor::scalar(self.eval(t, x, &Direction::e3())),
        }
    }

    pub fn is_causal(&self) -> bool {
        matches!(self, PhaseField::SeparableTime { profile, .. } if profile.is_causal())
    }

    pub fn profile(&self) -> TemporalProfile {
        match self {
            PhaseField::SeparableTime { profile, .. } => *profile,
            _ => TemporalProfile::Off,
        }
    }

    /// Whether f does not depend on ξ.
    pub fn is_isotropic(&self) -> bool {
        self.rank() == 0
    }

    /// A point near the bulk of the source, used to aim sample rays.
    pub fn focus(&self) -> Point3 {
        match self {
            PhaseField::Gaussian { center, .. } | PhaseField::BallBump { center, .. } => *center,
            PhaseField::TensorGenerated(w) => w
                .terms
                .iter()
                .find_map(|t| t.profile.center())
                .unwrap_or(Point3::ORIGIN),
            PhaseField::SeparableTime { spatial, .. } => spatial.focus(),
        }
    }

    /// Radius about `c` outside of which |f| < 1e-14.
    pub fn effective_radius_about(&self, c: &Point3) -> f64 {
        match self {
            PhaseField::Gaussian {
                center,
                width,
                amplitude,
            } => {
                (*center - *c).norm()
                    + ScalarProfile::Gaussian {
                        center: *center,
                        width: *width,
                    }
                    .effective_radius()
                        * (1.0 + amplitude.norm().max(1.0).ln() / (28.0 * std::f64::consts::LN_10))
                            .sqrt()
            }
            PhaseField::BallBump { center, radius, .. } => (*center - *c).norm() + radius,
            PhaseField::TensorGenerated(w) => w.effective_radius_about(c),
            PhaseField::SeparableTime { spatial, .. } => spatial.effective_radius_about(c),
        }
    }
}

/// Absorption α(x, ξ) = ε(x, ξ) + iρ(x, ξ).
#[derive(Debug, Clone, PartialEq)]
pub enum AbsorptionSpec {
    Constant(Complex64),
    /// α(x) = base + bump·g(x)
    Spatial {
        base: Complex64,
        bump: Complex64,
        profile: ScalarProfile,
    },
    /// α(x, ξ) = constant + Σ ⟨Q_ε(x), ξ^r⟩ + i Σ ⟨Q_ρ(x), ξ^r⟩.
    /// ε-terms must have even rank; odd ranks are only accepted in ρ.
    XiPolynomial {
        constant: Complex64,
        eps_terms: Vec<TensorFieldSpec>,
        rho_terms: Vec<TensorFieldSpec>,
    },
}

impl AbsorptionSpec {
    pub fn constant(alpha: Complex64) -> Result<Self> {
        let a = AbsorptionSpec::Constant(alpha);
        a.validate()?;
        Ok(a)
    }

    pub fn zero() -> Self {
        AbsorptionSpec::Constant(ZERO)
    }

    pub fn spatial(base: Complex64, bump: Complex64, profile: ScalarProfile) -> Result<Self> {
        let a = AbsorptionSpec::Spatial {
            base,
            bump,
            profile,
        };
        a.validate()?;
        Ok(a)
    }

    pub fn xi_polynomial(
        constant: Complex64,
        eps_terms: Vec<TensorFieldSpec>,
        rho_terms: Vec<TensorFieldSpec>,
    ) -> Result<Self> {
        let a = AbsorptionSpec::XiPolynomial {
            constant,
            eps_terms,
            rho_terms,
        };
        a.validate()?;
        Ok(a)
    }

    pub fn eval(&self, x: &Point3, xi: &Direction) -> Complex64 {
        match self {
            AbsorptionSpec::Constant(a) => *a,
            AbsorptionSpec::Spatial {
                base,
                bump,
                profile,
            } => base + bump * profile.eval(x),
            AbsorptionSpec::XiPolynomial {
                constant,
                eps_terms,
                rho_terms,
            } => {
                let eps = eps_terms
                    .iter()
                    .fold(ZERO, |acc, q| acc + q.contract(x, xi).re);
                let rho = rho_terms
                    .iter()
                    .fold(ZERO, |acc, q| acc + q.contract(x, xi).re);
                constant + eps + Complex64::new(0.0, 1.0) * rho
            }
        }
    }

    /// The value of α if it is constant along every line with direction ξ.
    pub fn ray_constant(&self, xi: &Direction) -> Option<Complex64> {
        match self {
            AbsorptionSpec::Constant(a) => Some(*a),
            AbsorptionSpec::Spatial {
                bump,
                profile,
                base,
            } => {
                if *bump == ZERO || *profile == ScalarProfile::One {
                    Some(base + bump * profile.eval(&Point3::ORIGIN))
                } else {
                    None
                }
            }
            AbsorptionSpec::XiPolynomial {
                eps_terms,
                rho_terms,
                ..
            } => {
                if eps_terms
                    .iter()
                    .chain(rho_terms)
                    .all(|q| q.is_spatially_constant())
                {
                    Some(self.eval(&Point3::ORIGIN, xi))
                } else {
                    None
                }
            }
        }
    }

    /// Whether α depends neither on x nor on ξ.
    pub fn as_constant(&self) -> Option<Complex64> {
        match self {
            AbsorptionSpec::Constant(a) => Some(*a),
            AbsorptionSpec::XiPolynomial {
                constant,
                eps_terms,
                rho_terms,
            } if eps_terms.is_empty() && rho_terms.is_empty() => Some(*constant),
            _ => None,
        }
    }

    /// The homogeneous ξ-polynomial parts as complex coefficient tensors
    /// (ρ-terms multiplied by i), evaluated at `x`, plus the constant part.
    pub fn polynomial_terms(&self, x: &Point3) -> (Complex64, Vec<SymTensor>) {
        match self {
            AbsorptionSpec::Constant(a) => (*a, vec![]),
            AbsorptionSpec::Spatial {
                base,
                bump,
                profile,
            } => (base + bump * profile.eval(x), vec![]),
            AbsorptionSpec::XiPolynomial {
                constant,
                eps_terms,
                rho_terms,
            } => {
                let mut terms: Vec<SymTensor> = Vec::new();
                for q in eps_terms {
                    let t = q.eval(x);
                    terms.push(t.scale(Complex64::new(1.0, 0.0)));
                }
                for q in rho_terms {
                    terms.push(q.eval(x).scale(Complex64::new(0.0, 1.0)));
                }
                (*constant, terms)
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            AbsorptionSpec::Constant(a) => {
                if a.re < 0.0 || !a.re.is_finite() || !a.im.is_finite() {
                    return Err(ArtError::arg(format!(
                        "absorption ε = {} must be nonnegative",
                        a.re
                    )));
                }
            }
            AbsorptionSpec::Spatial {
                base,
                bump,
                profile,
            } => {
                profile.validate()?;
                if base.re < 0.0 || base.re + bump.re.min(0.0) < 0.0 {
                    return Err(ArtError::arg("spatial absorption must keep ε ≥ 0"));
                }
            }
            AbsorptionSpec::XiPolynomial {
                constant,
                eps_terms,
                rho_terms,
            } => {
                if constant.re < 0.0 {
                    return Err(ArtError::arg("constant part of ε must be nonnegative"));
                }
                for q in eps_terms {
                    if q.rank % 2 == 1 {
                        return Err(ArtError::arg(format!(
                            "odd-rank ({}) ξ-polynomial terms belong to ρ, not ε",
                            q.rank
                        )));
                    }
                }
                for q in eps_terms.iter().chain(rho_terms) {
                    if q.terms
                        .iter()
                        .any(|t| t.tensor.components().iter().any(|c| c.im != 0.0))
                    {
                        return Err(ArtError::arg("ξ-polynomial coefficients must be real"));
                    }
                }
                if !eps_terms.is_empty() {
                    let probe = min_epsilon_probe(self, 10_000, 17);
                    if probe < 0.0 {
                        return Err(ArtError::arg(format!(
                            "ε-polynomial takes the negative value {probe} on a probe"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Smallest Re α over `n` deterministic (x, ξ) probes in the ball of radius 2.
pub fn min_epsilon_probe(a: &AbsorptionSpec, n: usize, seed: u64) -> f64 {
    let mut best = f64::INFINITY;
    let mut state = seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) | 1;
    let mut next = || {
        // xorshift64*, enough for probing
        state ^= state >> 12;
        state ^= state << 25;
        state ^= state >> 27;
        (state.wrapping_mul(0x2545_F491_4F6C_DD1D) >> 11) as f64 / (1u64 << 53) as f64
    };
    for _ in 0..n {
        let x = Point3::new(4.0 * next() - 2.0, 4.0 * next() - 2.0, 4.0 * next() - 2.0);
        let z = 2.0 * next() - 1.0;
        let phi = 2.0 * std::f64::consts::PI * next();
        let xi = Direction::from_angles(z.acos(), phi);
        best = best.min(a.eval(&x, &xi).re);
    }
    best
}

pub fn eval_field(f: &PhaseField, t: f64, x: &Point3, xi: &Direction) -> Complex64 {
    f.eval(t, x, xi)
}

pub fn eval_alpha(a: &AbsorptionSpec, x: &Point3, xi: &Direction) -> Complex64 {
    a.eval(x, xi)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn phantom_examples() {
        let g = PhaseField::gaussian(Point3::ORIGIN, 1.0, c(1.0, 0.0)).unwrap();
        assert_eq!(g.eval(0.0, &Point3::ORIGIN, &Direction::e1()), c(1.0, 0.0));

        let pulse = g
            .clone()
            .with_time(TemporalProfile::GaussianPulse {
                center: 1.0,
                width: 0.1,
            })
            .unwrap();
        assert_eq!(
            pulse.eval(-1.0, &Point3::ORIGIN, &Direction::e1()),
            c(0.0, 0.0)
        );
        assert!(pulse.is_causal());

        let w = PhaseField::tensor_generated(TensorFieldSpec::constant(SymTensor::kronecker()));
        for xi in [Direction::e2(), Direction::new(1.0, 2.0, -3.0).unwrap()] {
            assert!((w.eval(0.0, &Point3::new(0.3, 0.1, 0.0), &xi) - 1.0).norm() < 1e-15);
        }
    }

    #[test]
    fn ball_bump_is_compact_and_peaks_at_centre() {
        let b = PhaseField::ball_bump(Point3::new(0.1, 0.0, 0.0), 0.5, c(2.0, 0.0)).unwrap();
        assert!(
            (b.eval_static(&Point3::new(0.1, 0.0, 0.0), &Direction::e1()) - 2.0).norm() < 1e-15
        );
        assert_eq!(
            b.eval_static(&Point3::new(0.61, 0.0, 0.0), &Direction::e1()),
            c(0.0, 0.0)
        );
        assert!(
            b.eval_static(&Point3::new(0.59, 0.0, 0.0), &Direction::e1())
                .norm()
                < 1e-9
        );
    }

    #[test]
    fn absorption_examples() {
        let a = AbsorptionSpec::constant(c(0.5, 0.3)).unwrap();
        assert_eq!(
            a.eval(&Point3::new(0.2, 0.0, 1.0), &Direction::e1()),
            c(0.5, 0.3)
        );

        let q1 = TensorFieldSpec::constant(SymTensor::from_real(1, &[1.0, 0.0, 0.0]).unwrap());
        let a1 = AbsorptionSpec::xi_polynomial(c(0.0, 0.0), vec![], vec![q1.clone()]).unwrap();
        assert_eq!(a1.eval(&Point3::ORIGIN, &Direction::e2()), c(0.0, 0.0));
        // odd ranks are refused on ε
        assert!(AbsorptionSpec::xi_polynomial(c(0.0, 0.0), vec![q1], vec![]).is_err());

        let q2 = TensorFieldSpec::constant(SymTensor::kronecker());
        let a2 = AbsorptionSpec::xi_polynomial(c(0.0, 0.0), vec![], vec![q2]).unwrap();
        let xi = Direction::new(0.2, -0.7, 0.4).unwrap();
        assert!((a2.eval(&Point3::ORIGIN, &xi) - c(0.0, 1.0)).norm() < 1e-15);

        assert!(AbsorptionSpec::constant(c(-0.1, 0.0)).is_err());
        let indefinite = TensorFieldSpec::constant(
            SymTensor::from_real(2, &[1.0, 0.0, 0.0, -1.0, 0.0, 0.0]).unwrap(),
        );
        assert!(AbsorptionSpec::xi_polynomial(c(0.0, 0.0), vec![indefinite], vec![]).is_err());
    }

    #[test]
    fn smooth_step_limits() {
        assert_eq!(smooth_step(-0.5), 0.0);
        assert_eq!(smooth_step(1.5), 1.0);
        assert!((smooth_step(0.5) - 0.5).abs() < 1e-15);
        let r = TemporalProfile::CausalRamp { duration: 2.0 };
        assert_eq!(r.eval(3.0), 1.0);
        assert_eq!(r.eval(-1.0), 0.0);
    }

    #[test]
    fn non_causal_pulse_is_rejected() {
        let g = PhaseField::gaussian(Point3::ORIGIN, 0.1, c(1.0, 0.0)).unwrap();
        assert!(g
            .with_time(TemporalProfile::GaussianPulse {
                center: 0.2,
                width: 0.1
            })
            .is_err());
    }
}
