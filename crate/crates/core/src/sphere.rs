//! Gauss-Legendre quadrature and real spherical harmonics sampled on a
//! Gauss-Legendre x uniform-longitude grid. Supports the sphere builtin of
//! the manifold module.

use std::f64::consts::PI;

/// Gauss-Legendre nodes and weights on [-1, 1], by Newton iteration on the
/// Legendre recurrence. Exact for polynomials of degree 2n - 1.
pub(crate) fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        // Tricomi initial guess, then Newton.
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    nodes.reverse();
    weights.reverse();
    (nodes, weights)
}

/// (P_n(x), P_n'(x)) via the three-term recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Legendre polynomial P_l(x); used by the addition-theorem oracle.
pub(crate) fn legendre(l: usize, x: f64) -> f64 {
    let mut p0 = 1.0;
    let mut p1 = x;
    if l == 0 {
        return p0;
    }
    for k in 2..=l {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    p1
}

/// Associated Legendre P_l^m(x) without the Condon-Shortley phase.
fn associated_legendre(l: usize, m: usize, x: f64) -> f64 {
    debug_assert!(m <= l);
    // P_m^m = (2m-1)!! (1-x^2)^{m/2}
    let mut pmm = 1.0;
    if m > 0 {
        let somx2 = ((1.0 - x) * (1.0 + x)).sqrt();
        let mut fact = 1.0;
        for _ in 0..m {
            pmm *= fact * somx2;
            fact += 2.0;
        }
    }
    if l == m {
        return pmm;
    }
    let mut pm1 = x * (2.0 * m as f64 + 1.0) * pmm;
    if l == m + 1 {
        return pm1;
    }
    let mut p = 0.0;
    for ll in (m + 2)..=l {
        let llf = ll as f64;
        let mf = m as f64;
        p = (x * (2.0 * llf - 1.0) * pm1 - (llf + mf - 1.0) * pmm) / (llf - mf);
        pmm = pm1;
        pm1 = p;
    }
    p
}

/// sqrt((2l+1)/(4 pi) * (l-m)!/(l+m)!), computed through the factorial
/// ratio product to avoid overflow.
fn harmonic_norm(l: usize, m: usize) -> f64 {
    let mut ratio = 1.0;
    for j in (l - m + 1)..=(l + m) {
        ratio /= j as f64;
    }
    ((2.0 * l as f64 + 1.0) / (4.0 * PI) * ratio).sqrt()
}

/// One real spherical harmonic identified by degree l and the signed index
/// m: m = 0 is zonal, m > 0 the cos(m phi) harmonic, m < 0 the sin(|m| phi)
/// harmonic. Arguments are colatitude cosine and longitude.
pub(crate) fn real_harmonic(l: usize, m: i64, cos_theta: f64, phi: f64) -> f64 {
    let m_abs = m.unsigned_abs() as usize;
    let norm = harmonic_norm(l, m_abs);
    let plm = associated_legendre(l, m_abs, cos_theta);
    match m.signum() {
        0 => norm * plm,
        1 => std::f64::consts::SQRT_2 * norm * plm * (m_abs as f64 * phi).cos(),
        _ => std::f64::consts::SQRT_2 * norm * plm * (m_abs as f64 * phi).sin(),
    }
}
