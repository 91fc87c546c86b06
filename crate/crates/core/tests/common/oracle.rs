//! Test-only reference computations. Nothing here calls into the library's
//! quadrature, so agreement with it is an independent check.
#![allow(dead_code, clippy::excessive_precision)]

use num_complex::Complex64;

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15<F: FnMut(f64) -> Complex64>(f: &mut F, a: f64, b: f64) -> (Complex64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let d = h * XGK[j];
        let s = f(c - d) + f(c + d);
        k += s * WGK[j];
        if j % 2 == 1 {
            g += s * WG[j / 2];
        }
    }
    (k * h, ((k - g) * h).norm())
}

fn adapt<F: FnMut(f64) -> Complex64>(f: &mut F, a: f64, b: f64, tol: f64, depth: u32) -> Complex64 {
    let (k, err) = gk15(f, a, b);
    if err <= tol || depth == 0 || (b - a) < 1e-12 {
        return k;
    }
    let m = 0.5 * (a + b);
    adapt(f, a, m, 0.5 * tol, depth - 1) + adapt(f, m, b, 0.5 * tol, depth - 1)
}

/// Adaptive Gauss–Kronrod (7/15) integral of a complex function on [a, b].
pub fn integrate<F: FnMut(f64) -> Complex64>(mut f: F, a: f64, b: f64, tol: f64) -> Complex64 {
    if b <= a {
        return Complex64::new(0.0, 0.0);
    }
    // a few initial panels so narrow features are not missed
    let n = 8;
    let h = (b - a) / n as f64;
    (0..n).fold(Complex64::new(0.0, 0.0), |acc, i| {
        acc + adapt(
            &mut f,
            a + i as f64 * h,
            a + (i + 1) as f64 * h,
            tol / n as f64,
            40,
        )
    })
}

pub fn integrate_real<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64) -> f64 {
    integrate(|s| Complex64::new(f(s), 0.0), a, b, tol).re
}

/// Distance from x to the sphere |y − c| = r along ξ (x inside).
pub fn exit_length(x: [f64; 3], xi: [f64; 3], c: [f64; 3], r: f64) -> f64 {
    let d = [x[0] - c[0], x[1] - c[1], x[2] - c[2]];
    let b = d[0] * xi[0] + d[1] * xi[1] + d[2] * xi[2];
    let dd = d[0] * d[0] + d[1] * d[1] + d[2] * d[2];
    b + (b * b - dd + r * r).sqrt()
}

/// ∫₀^upper s^k exp(−∫₀^s α(σ) dσ) f(s) ds with both integrals adaptive.
pub fn ray_transform(
    k: u32,
    alpha: &dyn Fn(f64) -> Complex64,
    f: &dyn Fn(f64) -> Complex64,
    upper: f64,
    tol: f64,
) -> Complex64 {
    integrate(
        |s| {
            let tau = integrate(alpha, 0.0, s, 1e-3 * tol);
            (-tau).exp() * f(s) * s.powi(k as i32)
        },
        0.0,
        upper,
        tol,
    )
}

/// Brute-force tensor product Gauss–Legendre cube rule on [a, b]³ split into
/// `cells` sub-cubes per axis, 6 points each.
pub fn cube_integrate<F: FnMut([f64; 3]) -> Complex64>(
    mut f: F,
    a: [f64; 3],
    b: [f64; 3],
    cells: usize,
) -> Complex64 {
    const X: [f64; 6] = [
        -0.932469514203152,
        -0.661209386466265,
        -0.238619186083197,
        0.238619186083197,
        0.661209386466265,
        0.932469514203152,
    ];
    const W: [f64; 6] = [
        0.171324492379170,
        0.360761573048139,
        0.467913934572691,
        0.467913934572691,
        0.360761573048139,
        0.171324492379170,
    ];
    let h = [
        (b[0] - a[0]) / cells as f64,
        (b[1] - a[1]) / cells as f64,
        (b[2] - a[2]) / cells as f64,
    ];
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..cells {
        for j in 0..cells {
            for l in 0..cells {
                let lo = [
                    a[0] + i as f64 * h[0],
                    a[1] + j as f64 * h[1],
                    a[2] + l as f64 * h[2],
                ];
                for (xa, wa) in X.iter().zip(W) {
                    for (xb, wb) in X.iter().zip(W) {
                        for (xc, wc) in X.iter().zip(W) {
                            let p = [
                                lo[0] + 0.5 * h[0] * (xa + 1.0),
                                lo[1] + 0.5 * h[1] * (xb + 1.0),
                                lo[2] + 0.5 * h[2] * (xc + 1.0),
                            ];
                            acc += f(p) * (wa * wb * wc);
                        }
                    }
                }
            }
        }
    }
    acc * (0.125 * h[0] * h[1] * h[2])
}

#[test]
fn oracle_self_check() {
    let v = integrate(|s| Complex64::new(s.cos(), s.sin()), 0.0, 2.0, 1e-14);
    assert!((v - Complex64::new(2f64.sin(), 1.0 - 2f64.cos())).norm() < 1e-13);
    let g = integrate_real(|s| (-s * s).exp(), -8.0, 8.0, 1e-14);
    assert!((g - std::f64::consts::PI.sqrt()).abs() < 1e-13);
    let c = cube_integrate(
        |p| Complex64::new(p[0] * p[0] * p[1].exp(), 0.0),
        [0.0; 3],
        [1.0; 3],
        2,
    );
    assert!((c.re - (std::f64::consts::E - 1.0) / 3.0).abs() < 1e-13);
}
