//! Fractional Laplacians and Riesz transforms on periodic grids, in both
//! Fourier-multiplier and singular-integral form.
//!
//! The multiplier route is the precision route: `Lambda^alpha` acts as
//! |k|^alpha on coefficients, with the zero mode annihilated. The
//! singular-integral route periodizes the kernel c_{n,alpha} |x-y|^-(n+alpha)
//! over lattice images and omits the cell containing the singularity, which
//! costs O(h^(2-alpha)) accuracy but provides an independent representation
//! of the same operator.

use rustfft::num_complex::Complex;
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::fft;
use crate::grid::{FractionalOrder, ScalarField, TorusGrid};

/// Applies the Fourier multiplier |k|^alpha; the zero mode maps to 0, so the
/// output has mean zero. The unpaired Nyquist mode is retained (the symbol
/// is real there, so the output stays real).
pub fn apply_fractional_laplacian(
    field: &ScalarField,
    order: FractionalOrder,
) -> Result<ScalarField> {
    field.check_finite()?;
    let grid = field.grid();
    let alpha = order.alpha();
    let mut spectrum = fft::forward(field);
    fft::apply_symbol(grid, &mut spectrum, |k1, k2| {
        let k2norm = (k1 * k1 + k2 * k2) as f64;
        Complex::new(k2norm.powf(alpha / 2.0), 0.0)
    });
    Ok(fft::inverse(grid, spectrum))
}

/// Riesz transform R_j with symbol -i k_j / |k|.
///
/// `axis` is 1-based (R_1, R_2). On a 1-D grid only R_1 is defined and
/// reduces to the Hilbert transform -i sign(k). The zero mode maps to 0;
/// Nyquist modes are zeroed because the odd symbol has no real-output
/// value on an unpaired mode.
pub fn riesz_transform(field: &ScalarField, axis: usize) -> Result<ScalarField> {
    field.check_finite()?;
    let grid = field.grid();
    if axis == 0 || axis > grid.dimension() {
        return Err(Error::InvalidRieszAxis {
            axis,
            dimension: grid.dimension(),
        });
    }
    let nyquist = (grid.points_per_axis() / 2) as i64;
    let mut spectrum = fft::forward(field);
    fft::apply_symbol(grid, &mut spectrum, |k1, k2| {
        if (k1 == 0 && k2 == 0) || k1.abs() == nyquist || k2.abs() == nyquist {
            return Complex::new(0.0, 0.0);
        }
        let norm = ((k1 * k1 + k2 * k2) as f64).sqrt();
        let kj = if axis == 1 { k1 } else { k2 } as f64;
        Complex::new(0.0, -kj / norm)
    });
    Ok(fft::inverse(grid, spectrum))
}

/// The constant c_{n,alpha} making the singular-integral representation
/// agree with the |k|^alpha multiplier, in closed Gamma-function form:
///
///   c_{n,alpha} = 2^alpha Gamma((n+alpha)/2) * alpha
///                 / (2 pi^(n/2) Gamma(1 - alpha/2))
///
/// (the |Gamma(-alpha/2)| in the usual display is rewritten through the
/// recurrence so only positive arguments are evaluated). Defined for
/// 0 < alpha < 2; the representation degenerates at alpha = 2.
pub fn normalization_constant(n: usize, order: FractionalOrder) -> Result<f64> {
    if n != 1 && n != 2 {
        return Err(Error::InvalidDimension(n));
    }
    order.require_below_two()?;
    let alpha = order.alpha();
    let num = 2.0_f64.powf(alpha) * gamma((n as f64 + alpha) / 2.0) * alpha;
    let den = 2.0 * std::f64::consts::PI.powf(n as f64 / 2.0) * gamma(1.0 - alpha / 2.0);
    Ok(num / den)
}

/// Truncated periodized kernel for the singular-integral form of
/// Lambda^alpha on a torus.
#[derive(Debug, Clone)]
pub struct SingularKernel {
    order: FractionalOrder,
    dimension: usize,
    constant: f64,
    truncation_radius: usize,
}

impl SingularKernel {
    /// Builds the kernel with the closed-form constant. The constant is
    /// cross-validated against the multiplier route by the calibration
    /// tests before being trusted anywhere else.
    pub fn new(dimension: usize, order: FractionalOrder, truncation_radius: usize) -> Result<Self> {
        if truncation_radius == 0 {
            return Err(Error::InvalidTruncationRadius(truncation_radius));
        }
        let constant = normalization_constant(dimension, order)?;
        Ok(Self {
            order,
            dimension,
            constant,
            truncation_radius,
        })
    }

    /// Same kernel with an explicit constant (used by the calibration
    /// oracle, which measures the constant instead of assuming it).
    pub fn with_constant(
        dimension: usize,
        order: FractionalOrder,
        truncation_radius: usize,
        constant: f64,
    ) -> Result<Self> {
        if truncation_radius == 0 {
            return Err(Error::InvalidTruncationRadius(truncation_radius));
        }
        if !(constant > 0.0) {
            return Err(Error::Parse(format!("nonpositive kernel constant {constant}")));
        }
        order.require_below_two()?;
        Ok(Self {
            order,
            dimension,
            constant,
            truncation_radius,
        })
    }

    pub fn order(&self) -> FractionalOrder {
        self.order
    }

    pub fn constant(&self) -> f64 {
        self.constant
    }

    pub fn truncation_radius(&self) -> usize {
        self.truncation_radius
    }

    /// Default lattice truncation: kernel tails decay like r^-(n+alpha),
    /// giving sub-percent tails for alpha >= 0.5 at 20 images.
    pub const DEFAULT_TRUNCATION_RADIUS: usize = 20;

    /// Tabulates sum over images |m|_inf <= R of |x_d + 2 pi m|^-(n+alpha)
    /// for every node offset d. The d = 0 entry is zeroed: the cell holding
    /// the singularity is omitted (symmetric exclusion), and for periodic
    /// fields its images contribute nothing anyway.
    fn tabulate(&self, grid: TorusGrid) -> Vec<f64> {
        let n = grid.points_per_axis();
        let h = grid.spacing();
        let period = 2.0 * std::f64::consts::PI;
        let r = self.truncation_radius as i64;
        let exponent = -(self.dimension as f64 + self.order.alpha());
        match self.dimension {
            1 => {
                let mut table = vec![0.0; n];
                for (d, slot) in table.iter_mut().enumerate().skip(1) {
                    let base = d as f64 * h;
                    let mut acc = 0.0;
                    for m in -r..=r {
                        let dist = (base + period * m as f64).abs();
                        acc += dist.powf(exponent);
                    }
                    *slot = acc;
                }
                table
            }
            _ => {
                let mut table = vec![0.0; n * n];
                for d1 in 0..n {
                    for d2 in 0..n {
                        if d1 == 0 && d2 == 0 {
                            continue;
                        }
                        let b1 = d1 as f64 * h;
                        let b2 = d2 as f64 * h;
                        let mut acc = 0.0;
                        for m1 in -r..=r {
                            let y1 = b1 + period * m1 as f64;
                            for m2 in -r..=r {
                                let y2 = b2 + period * m2 as f64;
                                acc += (y1 * y1 + y2 * y2).powf(exponent / 2.0);
                            }
                        }
                        table[d1 * n + d2] = acc;
                    }
                }
                table
            }
        }
    }
}

/// Truncated principal-value quadrature of the singular-integral
/// representation:
///
///   c_{n,alpha} * h^n * sum_{y != x} (f(x) - f(y)) K(x - y)
///
/// with K the periodized kernel from [`SingularKernel::tabulate`].
/// Converges to [`apply_fractional_laplacian`] under simultaneous grid and
/// truncation refinement.
pub fn singular_integral_laplacian(
    field: &ScalarField,
    kernel: &SingularKernel,
) -> Result<ScalarField> {
    field.check_finite()?;
    let grid = field.grid();
    if grid.dimension() != kernel.dimension {
        return Err(Error::InvalidDimension(kernel.dimension));
    }
    let n = grid.points_per_axis();
    let table = kernel.tabulate(grid);
    let weight = kernel.constant * grid.quadrature_weight();
    let v = field.values();
    let values = match grid.dimension() {
        1 => (0..n)
            .map(|i| {
                let mut acc = 0.0;
                for j in 0..n {
                    // table[0] = 0 covers the excluded cell
                    acc += (v[i] - v[j]) * table[(i + n - j) % n];
                }
                acc * weight
            })
            .collect(),
        _ => {
            let mut out = vec![0.0; n * n];
            for i1 in 0..n {
                for i2 in 0..n {
                    let fi = v[i1 * n + i2];
                    let mut acc = 0.0;
                    for j1 in 0..n {
                        let d1 = (i1 + n - j1) % n;
                        let row = &table[d1 * n..(d1 + 1) * n];
                        let frow = &v[j1 * n..(j1 + 1) * n];
                        for (j2, fj) in frow.iter().enumerate() {
                            acc += (fi - fj) * row[(i2 + n - j2) % n];
                        }
                    }
                    out[i1 * n + i2] = acc * weight;
                }
            }
            out
        }
    };
    ScalarField::from_values(grid, values)
}

/// Truncated singular-integral quadrature evaluated at a single node:
/// identical arithmetic to [`singular_integral_laplacian`] restricted to
/// one output value, which keeps fine-grid calibration runs affordable.
fn singular_value_at_node(field: &ScalarField, kernel: &SingularKernel, node: usize) -> f64 {
    let grid = field.grid();
    let n = grid.points_per_axis();
    let h = grid.spacing();
    let period = 2.0 * std::f64::consts::PI;
    let r = kernel.truncation_radius as i64;
    let exponent = -(kernel.dimension as f64 + kernel.order.alpha());
    let v = field.values();
    let weight = kernel.constant * grid.quadrature_weight();
    match grid.dimension() {
        1 => {
            let mut acc = 0.0;
            for j in 0..n {
                let d = (node + n - j) % n;
                if d == 0 {
                    continue;
                }
                let base = d as f64 * h;
                let mut k = 0.0;
                for m in -r..=r {
                    k += (base + period * m as f64).abs().powf(exponent);
                }
                acc += (v[node] - v[j]) * k;
            }
            acc * weight
        }
        _ => {
            let i1 = node / n;
            let i2 = node % n;
            let mut acc = 0.0;
            for j1 in 0..n {
                let d1 = (i1 + n - j1) % n;
                let b1 = d1 as f64 * h;
                for j2 in 0..n {
                    let d2 = (i2 + n - j2) % n;
                    if d1 == 0 && d2 == 0 {
                        continue;
                    }
                    let b2 = d2 as f64 * h;
                    let mut k = 0.0;
                    for m1 in -r..=r {
                        let y1 = b1 + period * m1 as f64;
                        for m2 in -r..=r {
                            let y2 = b2 + period * m2 as f64;
                            k += (y1 * y1 + y2 * y2).powf(exponent / 2.0);
                        }
                    }
                    acc += (v[node] - v[j1 * n + j2]) * k;
                }
            }
            acc * weight
        }
    }
}

/// Measures the normalization constant empirically: applies the truncated
/// singular integral with constant 1 to cos(x_1) and matches the multiplier
/// answer Lambda^alpha cos = 1^alpha cos at its maximum. This is the
/// calibration oracle the closed form must agree with.
pub fn calibrate_constant(
    n: usize,
    order: FractionalOrder,
    grid_points: usize,
    truncation_radius: usize,
) -> Result<f64> {
    let grid = TorusGrid::new(n, grid_points)?;
    let field = ScalarField::from_fn(grid, |x1, _| x1.cos());
    let kernel = SingularKernel::with_constant(n, order, truncation_radius, 1.0)?;
    // cos attains its max 1 at node 0; the multiplier answer there is 1^alpha = 1.
    let raw = singular_value_at_node(&field, &kernel, 0);
    Ok(1.0 / raw)
}
