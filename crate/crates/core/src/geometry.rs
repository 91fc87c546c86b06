//! Points, unit directions, the ball domain, Cartesian node grids and
//! quadrature over the unit sphere.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{ArtError, Result};

/// Tolerance used when deciding whether a point lies inside a ball.
const INSIDE_TOL: f64 = 1e-12;

/// A point of R³.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point3(pub [f64; 3]);

impl Point3 {
    pub const ORIGIN: Point3 = Point3([0.0; 3]);

    pub fn new(x1: f64, x2: f64, x3: f64) -> Self {
        Point3([x1, x2, x3])
    }

    pub fn dot(&self, other: &Point3) -> f64 {
        self.0[0] * other.0[0] + self.0[1] * other.0[1] + self.0[2] * other.0[2]
    }

    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    /// `self + s·ξ`
    pub fn along(&self, xi: &Direction, s: f64) -> Point3 {
        Point3([
            self.0[0] + s * xi.0[0],
            self.0[1] + s * xi.0[1],
            self.0[2] + s * xi.0[2],
        ])
    }
}

impl Add for Point3 {
    type Output = Point3;
    fn add(self, rhs: Point3) -> Point3 {
        Point3([
            self.0[0] + rhs.0[0],
            self.0[1] + rhs.0[1],
            self.0[2] + rhs.0[2],
        ])
    }
}

impl Sub for Point3 {
    type Output = Point3;
    fn sub(self, rhs: Point3) -> Point3 {
        Point3([
            self.0[0] - rhs.0[0],
            self.0[1] - rhs.0[1],
            self.0[2] - rhs.0[2],
        ])
    }
}

impl Mul<f64> for Point3 {
    type Output = Point3;
    fn mul(self, rhs: f64) -> Point3 {
        Point3([self.0[0] * rhs, self.0[1] * rhs, self.0[2] * rhs])
    }
}

impl Neg for Point3 {
    type Output = Point3;
    fn neg(self) -> Point3 {
        self * -1.0
    }
}

/// A unit vector ξ ∈ S². Construction renormalizes its input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction(pub(crate) [f64; 3]);

impl Direction {
    pub fn new(x1: f64, x2: f64, x3: f64) -> Result<Self> {
        let n = (x1 * x1 + x2 * x2 + x3 * x3).sqrt();
        if !n.is_finite() || n == 0.0 {
            return Err(ArtError::arg(format!(
                "direction ({x1}, {x2}, {x3}) cannot be normalized"
            )));
        }
        Ok(Direction([x1 / n, x2 / n, x3 / n]))
    }

    /// Unit vector from polar angle θ (measured from the x3 axis) and azimuth φ.
    pub fn from_angles(theta: f64, phi: f64) -> Self {
        let st = theta.sin();
        Direction([st * phi.cos(), st * phi.sin(), theta.cos()])
    }

    pub fn from_point(p: Point3) -> Result<Self> {
        Direction::new(p.0[0], p.0[1], p.0[2])
    }

    pub fn e1() -> Self {
        Direction([1.0, 0.0, 0.0])
    }

    pub fn e2() -> Self {
        Direction([0.0, 1.0, 0.0])
    }

    pub fn e3() -> Self {
        Direction([0.0, 0.0, 1.0])
    }

    pub fn components(&self) -> [f64; 3] {
        self.0
    }

    pub fn dot(&self, p: &Point3) -> f64 {
        self.0[0] * p.0[0] + self.0[1] * p.0[1] + self.0[2] * p.0[2]
    }

    pub fn as_point(&self) -> Point3 {
        Point3(self.0)
    }

    pub fn flipped(&self) -> Direction {
        Direction([-self.0[0], -self.0[1], -self.0[2]])
    }
}

/// The ball D = {x : |x − center| ≤ radius}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BallDomain {
    pub center: Point3,
    pub radius: f64,
}

impl Default for BallDomain {
    fn default() -> Self {
        BallDomain {
            center: Point3::ORIGIN,
            radius: 1.0,
        }
    }
}

impl BallDomain {
    pub fn new(center: Point3, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() || !center.is_finite() {
            return Err(ArtError::arg(format!(
                "ball radius must be positive, got {radius}"
            )));
        }
        Ok(BallDomain { center, radius })
    }

    pub fn unit() -> Self {
        BallDomain::default()
    }

    pub fn diameter(&self) -> f64 {
        2.0 * self.radius
    }

    pub fn contains(&self, x: &Point3) -> bool {
        (*x - self.center).norm() <= self.radius * (1.0 + INSIDE_TOL)
    }

    /// Outer unit normal at the boundary point nearest to `x`.
    pub fn outer_normal(&self, x: &Point3) -> Result<Direction> {
        Direction::from_point(*x - self.center)
    }
}

/// Distance s* ≥ 0 travelled backwards along −ξ from `x` until the boundary of `dom`.
pub fn ray_exit_length(x: &Point3, xi: &Direction, dom: &BallDomain) -> Result<f64> {
    let d = *x - dom.center;
    let dn = d.norm();
    if !x.is_finite() || dn > dom.radius * (1.0 + INSIDE_TOL) {
        return Err(ArtError::Domain(format!(
            "point {:?} lies outside the ball of radius {} at {:?}",
            x.0, dom.radius, dom.center.0
        )));
    }
    // |d − sξ|² = R²  ⇔  s² − 2s⟨d,ξ⟩ + |d|² − R² = 0; take the larger root.
    let b = xi.dot(&d);
    let disc = (b * b - dn * dn + dom.radius * dom.radius).max(0.0);
    Ok((b + disc.sqrt()).max(0.0))
}

/// Gauss–Legendre nodes and weights on [−1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            // P_n(z) by the three-term recurrence, P_{n-1} kept for the derivative
            let (mut p1, mut p2) = (1.0, 0.0);
            for j in 1..=n {
                let p3 = p2;
                p2 = p1;
                p1 = ((2 * j - 1) as f64 * z * p2 - (j - 1) as f64 * p3) / j as f64;
            }
            dp = n as f64 * (z * p1 - p2) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Product quadrature on S²: Gauss–Legendre in cos θ times the periodic
/// trapezoid rule in φ. Weights sum to 4π.
#[derive(Debug, Clone)]
pub struct SphereGrid {
    pub nodes: Vec<Direction>,
    pub weights: Vec<f64>,
    pub n_polar: usize,
    pub n_azimuth: usize,
}

impl SphereGrid {
    pub fn new(n_polar: usize, n_azimuth: usize) -> Result<Self> {
        make_sphere_grid(n_polar, n_azimuth)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Highest spherical-polynomial degree integrated exactly.
    pub fn exact_degree(&self) -> usize {
        (2 * self.n_polar - 1).min(self.n_azimuth - 1)
    }

    pub fn integrate<F>(&self, g: F) -> Complex64
    where
        F: FnMut(&Direction) -> Complex64,
    {
        sphere_integrate(self, g)
    }
}

pub fn make_sphere_grid(n_polar: usize, n_azimuth: usize) -> Result<SphereGrid> {
    if n_polar == 0 || n_azimuth == 0 {
        return Err(ArtError::arg(format!(
            "sphere grid needs positive node counts, got {n_polar}x{n_azimuth}"
        )));
    }
    let (mu, wmu) = gauss_legendre(n_polar);
    let dphi = 2.0 * PI / n_azimuth as f64;
    let mut nodes = Vec::with_capacity(n_polar * n_azimuth);
    let mut weights = Vec::with_capacity(n_polar * n_azimuth);
    for (c, w) in mu.iter().zip(&wmu) {
        let s = (1.0 - c * c).max(0.0).sqrt();
        for j in 0..n_azimuth {
            let phi = (j as f64 + 0.5) * dphi;
            nodes.push(Direction([s * phi.cos(), s * phi.sin(), *c]));
            weights.push(w * dphi);
        }
    }
    Ok(SphereGrid {
        nodes,
        weights,
        n_polar,
        n_azimuth,
    })
}

/// Σ w_i g(ξ_i).
pub fn sphere_integrate<F>(grid: &SphereGrid, mut g: F) -> Complex64
where
    F: FnMut(&Direction) -> Complex64,
{
    grid.nodes
        .iter()
        .zip(&grid.weights)
        .fold(Complex64::new(0.0, 0.0), |acc, (xi, w)| acc + g(xi) * *w)
}

/// Axis-aligned box with node-centred uniform sampling; x is the fastest index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid3 {
    pub dims: [usize; 3],
    pub min: Point3,
    pub max: Point3,
}

impl Grid3 {
    pub fn new(dims: [usize; 3], min: Point3, max: Point3) -> Result<Self> {
        if dims.iter().any(|&d| d < 2) {
            return Err(ArtError::arg(format!(
                "grid dims must be >= 2, got {dims:?}"
            )));
        }
        for a in 0..3 {
            if !(max.0[a] > min.0[a]) || !min.0[a].is_finite() || !max.0[a].is_finite() {
                return Err(ArtError::arg(format!(
                    "degenerate bounding box on axis {a}: [{}, {}]",
                    min.0[a], max.0[a]
                )));
            }
        }
        Ok(Grid3 { dims, min, max })
    }

    /// Cube [c − half, c + half]³ with `n` nodes per axis.
    pub fn cube(center: Point3, half: f64, n: usize) -> Result<Self> {
        let h = Point3([half; 3]);
        Grid3::new([n; 3], center - h, center + h)
    }

    /// (2·half_nodes + 1)³ block with spacing `h` centred on `center`.
    pub fn block(center: Point3, h: f64, half_nodes: usize) -> Result<Self> {
        Grid3::cube(center, h * half_nodes as f64, 2 * half_nodes + 1)
    }

    pub fn len(&self) -> usize {
        self.dims[0] * self.dims[1] * self.dims[2]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn spacing(&self) -> [f64; 3] {
        std::array::from_fn(|a| (self.max.0[a] - self.min.0[a]) / (self.dims[a] - 1) as f64)
    }

    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.dims[0] * (j + self.dims[1] * k)
    }

    pub fn ijk(&self, idx: usize) -> [usize; 3] {
        let i = idx % self.dims[0];
        let r = idx / self.dims[0];
        [i, r % self.dims[1], r / self.dims[1]]
    }

    pub fn node(&self, i: usize, j: usize, k: usize) -> Point3 {
        let h = self.spacing();
        Point3([
            self.min.0[0] + i as f64 * h[0],
            self.min.0[1] + j as f64 * h[1],
            self.min.0[2] + k as f64 * h[2],
        ])
    }

    pub fn node_at(&self, idx: usize) -> Point3 {
        let [i, j, k] = self.ijk(idx);
        self.node(i, j, k)
    }

    pub fn center(&self) -> Point3 {
        (self.min + self.max) * 0.5
    }

    /// Whether node `idx` lies at least `margin` nodes away from every face.
    pub fn is_interior(&self, idx: usize, margin: usize) -> bool {
        let ijk = self.ijk(idx);
        (0..3).all(|a| ijk[a] >= margin && ijk[a] + margin < self.dims[a])
    }

    /// Grid with `margin` nodes removed from each face.
    pub fn shrink(&self, margin: usize) -> Result<Grid3> {
        let h = self.spacing();
        let mut dims = [0; 3];
        let mut min = self.min;
        let mut max = self.max;
        for a in 0..3 {
            if self.dims[a] < 2 * margin + 2 {
                return Err(ArtError::arg(format!(
                    "cannot shrink axis {a} of {} nodes by {margin}",
                    self.dims[a]
                )));
            }
            dims[a] = self.dims[a] - 2 * margin;
            min.0[a] += margin as f64 * h[a];
            max.0[a] -= margin as f64 * h[a];
        }
        Ok(Grid3 { dims, min, max })
    }

    /// Largest distance from `c` to a grid corner.
    pub fn max_corner_distance(&self, c: &Point3) -> f64 {
        let mut best: f64 = 0.0;
        for mask in 0..8 {
            let p = Point3([
                if mask & 1 == 0 {
                    self.min.0[0]
                } else {
                    self.max.0[0]
                },
                if mask & 2 == 0 {
                    self.min.0[1]
                } else {
                    self.max.0[1]
                },
                if mask & 4 == 0 {
                    self.min.0[2]
                } else {
                    self.max.0[2]
                },
            ]);
            best = best.max((p - *c).norm());
        }
        best
    }
}
