//! Exact coefficient algebra for repeated divergences of moments.
//!
//! An expression is a sum of moment symbols with coefficients that are
//! integer polynomials in a commuting symbol β. β stands for α in the
//! stationary recurrences and for ∂_t + α in the time-dependent ones.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::error::{ArtError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    /// E_{k p}
    E { k: usize, p: usize },
    /// (H^m f)_p
    Source { m: usize, p: usize },
}

impl Term {
    pub fn rank(&self) -> usize {
        match *self {
            Term::E { p, .. } | Term::Source { p, .. } => p,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Term::E { k, p } => write!(f, "E[{k},{p}]"),
            Term::Source { m: 0, p } => write!(f, "f[{p}]"),
            Term::Source { m, p } => write!(f, "(H^{m} f)[{p}]"),
        }
    }
}

/// Integer polynomial in β, lowest degree first, without trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Poly(Vec<i128>);

impl Poly {
    pub fn new(mut c: Vec<i128>) -> Self {
        while c.last() == Some(&0) {
            c.pop();
        }
        Poly(c)
    }

    /// c·β^d
    pub fn monomial(c: i128, d: usize) -> Self {
        let mut v = vec![0; d + 1];
        v[d] = c;
        Poly::new(v)
    }

    pub fn coeffs(&self) -> &[i128] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn coeff(&self, d: usize) -> i128 {
        self.0.get(d).copied().unwrap_or(0)
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let n = self.0.len().max(o.0.len());
        Poly::new((0..n).map(|d| self.coeff(d) + o.coeff(d)).collect())
    }

    pub fn scale(&self, s: i128) -> Poly {
        Poly::new(self.0.iter().map(|c| c * s).collect())
    }

    /// β·self
    pub fn shift(&self) -> Poly {
        if self.is_zero() {
            return Poly::default();
        }
        let mut v = vec![0];
        v.extend_from_slice(&self.0);
        Poly(v)
    }

    pub fn eval(&self, beta: Complex64) -> Complex64 {
        self.0
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * beta + *c as f64)
    }
}

/// Σ coefficient(β)·term
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Expr(BTreeMap<Term, Poly>);

impl Expr {
    pub fn single(t: Term) -> Self {
        let mut m = BTreeMap::new();
        m.insert(t, Poly::monomial(1, 0));
        Expr(m)
    }

    pub fn add_term(&mut self, t: Term, c: Poly) {
        let sum = self.0.get(&t).map_or(c.clone(), |old| old.add(&c));
        if sum.is_zero() {
            self.0.remove(&t);
        } else {
            self.0.insert(t, sum);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Term, &Poly)> {
        self.0.iter()
    }

    pub fn coefficient(&self, t: &Term) -> Poly {
        self.0.get(t).cloned().unwrap_or_default()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// One divergence, using
    /// δE_{a b} = a·E_{(a−1)(b−1)} − β·E_{a(b−1)} for a ≥ 1,
    /// δE_{0 b} = f_{b−1} − β·E_{0(b−1)},
    /// δ(H^m f)_b = (H^{m+1} f)_{b−1}.
    pub fn delta(&self) -> Result<Expr> {
        let mut out = Expr::default();
        for (t, c) in &self.0 {
            if t.rank() == 0 {
                return Err(ArtError::arg(format!("divergence of rank-0 term {t}")));
            }
            match *t {
                Term::E { k, p } => {
                    if k >= 1 {
                        out.add_term(Term::E { k: k - 1, p: p - 1 }, c.scale(k as i128));
                    } else {
                        out.add_term(Term::Source { m: 0, p: p - 1 }, c.clone());
                    }
                    out.add_term(Term::E { k, p: p - 1 }, c.shift().scale(-1));
                }
                Term::Source { m, p } => {
                    out.add_term(Term::Source { m: m + 1, p: p - 1 }, c.clone())
                }
            }
        }
        Ok(out)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(t, c)| format!("({:?})·{t}", c.0))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// δ^n E_{k p} by repeated application of the one-step relation.
pub fn delta_power(n: usize, k: usize, p: usize) -> Result<Expr> {
    if p < n {
        return Err(ArtError::arg(format!("δ^{n} needs rank ≥ {n}, got {p}")));
    }
    let mut e = Expr::single(Term::E { k, p });
    for _ in 0..n {
        e = e.delta()?;
    }
    Ok(e)
}

pub fn binomial(n: usize, j: usize) -> i128 {
    if j > n {
        return 0;
    }
    (0..j).fold(1i128, |acc, i| acc * (n - i) as i128 / (i + 1) as i128)
}

fn falling(top: usize, bottom: usize) -> i128 {
    // top!/bottom!
    ((bottom + 1)..=top).fold(1i128, |acc, v| acc * v as i128)
}

/// Closed form of δ^n E_{(k+n)(p+n)}:
/// Σ_{j=0}^{n} (−1)^j C(n,j) β^j (k+n)!/(k+j)! E_{(k+j) p}.
pub fn thm41_expansion(n: usize, k: usize, p: usize) -> Expr {
    let mut e = Expr::default();
    for j in 0..=n {
        let sign = if j % 2 == 0 { 1 } else { -1 };
        let c = sign * binomial(n, j) * falling(k + n, k + j);
        e.add_term(Term::E { k: k + j, p }, Poly::monomial(c, j));
    }
    e
}

/// Which coefficients to put on the source terms of the k = 0 recurrence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Cor42Convention {
    /// Σ_{j=0}^{n−1} (−β)^j (H^{n−j−1} f)_p + (−β)^n E_{0p}.
    #[default]
    Unit,
    /// As printed: the source terms carry C(n, j).
    Binomial,
}

/// Closed form of δ^n E_{0(p+n)}.
pub fn cor42_expansion(n: usize, p: usize, conv: Cor42Convention) -> Expr {
    let mut e = Expr::default();
    let sign = |j: usize| if j.is_multiple_of(2) { 1 } else { -1 };
    for j in 0..n {
        let c = match conv {
            Cor42Convention::Unit => 1,
            Cor42Convention::Binomial => binomial(n, j),
        };
        e.add_term(
            Term::Source { m: n - j - 1, p },
            Poly::monomial(sign(j) * c, j),
        );
    }
    e.add_term(Term::E { k: 0, p }, Poly::monomial(sign(n), n));
    e
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_step_is_the_first_order_recurrence() {
        let d = delta_power(1, 2, 3).unwrap();
        assert_eq!(d.coefficient(&Term::E { k: 1, p: 2 }), Poly::new(vec![2]));
        assert_eq!(
            d.coefficient(&Term::E { k: 2, p: 2 }),
            Poly::new(vec![0, -1])
        );
        assert_eq!(d.len(), 2);
        let d0 = delta_power(1, 0, 2).unwrap();
        assert_eq!(
            d0.coefficient(&Term::Source { m: 0, p: 1 }),
            Poly::new(vec![1])
        );
        assert!(delta_power(3, 1, 2).is_err());
    }

    #[test]
    fn closed_form_matches_composition() {
        for n in 1..=4 {
            for k in 0..=2 {
                for p in 0..=2 {
                    let composed = delta_power(n, k + n, p + n).unwrap();
                    assert_eq!(composed, thm41_expansion(n, k, p), "n={n} k={k} p={p}");
                }
            }
        }
    }

    #[test]
    fn printed_second_order_example() {
        // δ²E_{k p} = k(k−1)E_{(k−2)(p−2)} − 2kβE_{(k−1)(p−2)} + β²E_{k(p−2)}
        for k in 2..=6usize {
            let d = delta_power(2, k, 4).unwrap();
            let kk = k as i128;
            assert_eq!(
                d.coefficient(&Term::E { k: k - 2, p: 2 }),
                Poly::new(vec![kk * (kk - 1)])
            );
            assert_eq!(
                d.coefficient(&Term::E { k: k - 1, p: 2 }),
                Poly::new(vec![0, -2 * kk])
            );
            assert_eq!(
                d.coefficient(&Term::E { k, p: 2 }),
                Poly::new(vec![0, 0, 1])
            );
        }
    }

    #[test]
    fn unit_convention_matches_composition() {
        for n in 1..=4 {
            for p in 0..=2 {
                let composed = delta_power(n, 0, p + n).unwrap();
                assert_eq!(composed, cor42_expansion(n, p, Cor42Convention::Unit));
                let printed = cor42_expansion(n, p, Cor42Convention::Binomial);
                assert_eq!(composed == printed, n == 1, "n={n}");
            }
        }
        // (Hf)_{p} − βf_{p} + β²E_{0p}
        let two = delta_power(2, 0, 3).unwrap();
        assert_eq!(
            two.coefficient(&Term::Source { m: 1, p: 1 }),
            Poly::new(vec![1])
        );
        assert_eq!(
            two.coefficient(&Term::Source { m: 0, p: 1 }),
            Poly::new(vec![0, -1])
        );
        assert_eq!(
            two.coefficient(&Term::E { k: 0, p: 1 }),
            Poly::new(vec![0, 0, 1])
        );
    }

    #[test]
    fn poly_arithmetic() {
        let p = Poly::new(vec![1, -2, 0, 0]);
        assert_eq!(p.coeffs(), &[1, -2]);
        assert_eq!(p.shift(), Poly::new(vec![0, 1, -2]));
        assert_eq!(p.add(&Poly::new(vec![-1, 2])), Poly::default());
        let v = p.eval(Complex64::new(0.5, 0.5));
        assert!((v - Complex64::new(0.0, -1.0)).norm() < 1e-15);
        assert_eq!(binomial(4, 2), 6);
        assert_eq!(binomial(2, 3), 0);
    }
}
