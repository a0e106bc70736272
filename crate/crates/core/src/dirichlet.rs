//! Dirichlet-Neumann operators on planar domains via harmonic extension,
//! the even-power boundary inequality
//! `(1/2m) D(f^{2m}) <= f^{2m-1} D f`, and the Hopf-lemma mechanism behind
//! it as executable diagnostics.
//!
//! Three domain realizations:
//!  - disk: boundary Fourier modes, extension r^|k| e^{ik theta}, D exact
//!    multiplier |k|;
//!  - periodic half-plane: Poisson multiplier e^{-|k| y}, D = |k| exactly
//!    (the fractional Laplacian of order one on the boundary line);
//!  - rectangle: 5-point Laplace direct solve (DST-I diagonalization), D by
//!    a second-order one-sided normal difference. Corner nodes violate the
//!    C^2 boundary hypothesis; they and their two neighbors are excluded
//!    from every verdict and only ever reported.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::fft;
use crate::grid::{ScalarField, TorusGrid};
use crate::report::{CheckMetadata, InequalityReport};

/// Planar domain with a distinguished boundary discretization.
#[derive(Debug, Clone)]
pub enum PlanarDomain {
    /// Unit disk; boundary sampled at `boundary_nodes` uniform angles,
    /// extension represented through modes |k| <= `boundary_modes`, interior
    /// sampled on `radial_rings` + 1 uniform radii for diagnostics.
    Disk {
        boundary_modes: usize,
        boundary_nodes: usize,
        radial_rings: usize,
    },
    /// Periodic half-plane {y >= 0}: boundary line T^1 with `boundary_nodes`
    /// nodes; the strip [0, height] sampled on `strip_rows` + 1 rows carries
    /// the diagnostics.
    HalfPlane {
        boundary_nodes: usize,
        strip_rows: usize,
        strip_height: f64,
    },
    /// Axis-aligned rectangle with `nx` x `ny` interior nodes at spacing `h`
    /// (side lengths (nx+1) h and (ny+1) h).
    Rectangle { nx: usize, ny: usize, h: f64 },
}

impl PlanarDomain {
    pub fn disk(boundary_modes: usize, boundary_nodes: usize) -> Result<Self> {
        if boundary_nodes < 8 || boundary_nodes % 2 != 0 {
            return Err(Error::InvalidGridSize(boundary_nodes));
        }
        if boundary_modes == 0 || boundary_modes > boundary_nodes / 2 - 1 {
            return Err(Error::ManifoldParameter(format!(
                "disk boundary_modes {boundary_modes} outside 1..={}",
                boundary_nodes / 2 - 1
            )));
        }
        Ok(Self::Disk {
            boundary_modes,
            boundary_nodes,
            radial_rings: 64,
        })
    }

    pub fn half_plane(boundary_nodes: usize) -> Result<Self> {
        if boundary_nodes < 8 || boundary_nodes % 2 != 0 {
            return Err(Error::InvalidGridSize(boundary_nodes));
        }
        Ok(Self::HalfPlane {
            boundary_nodes,
            strip_rows: 64,
            strip_height: 2.0 * PI,
        })
    }

    pub fn rectangle(nx: usize, ny: usize, h: f64) -> Result<Self> {
        if nx < 3 || ny < 3 || !(h > 0.0) || !h.is_finite() {
            return Err(Error::ManifoldParameter(format!(
                "rectangle {nx}x{ny} with spacing {h}"
            )));
        }
        Ok(Self::Rectangle { nx, ny, h })
    }

    /// Unit square with n x n interior nodes (h = 1/(n+1)).
    pub fn unit_square(n: usize) -> Result<Self> {
        Self::rectangle(n, n, 1.0 / (n as f64 + 1.0))
    }

    pub fn boundary_count(&self) -> usize {
        match self {
            Self::Disk { boundary_nodes, .. } | Self::HalfPlane { boundary_nodes, .. } => {
                *boundary_nodes
            }
            Self::Rectangle { nx, ny, .. } => 2 * nx + 2 * ny + 4,
        }
    }

    /// Physical coordinates of a boundary node. The rectangle path walks
    /// counterclockwise from the origin corner.
    pub fn boundary_coordinates(&self, index: usize) -> [f64; 2] {
        match self {
            Self::Disk { boundary_nodes, .. } => {
                let theta = 2.0 * PI * index as f64 / *boundary_nodes as f64;
                [theta.cos(), theta.sin()]
            }
            Self::HalfPlane { boundary_nodes, .. } => {
                [2.0 * PI * index as f64 / *boundary_nodes as f64, 0.0]
            }
            Self::Rectangle { nx, ny, h } => {
                let (i, j) = rectangle_boundary_node(*nx, *ny, index);
                [i as f64 * h, j as f64 * h]
            }
        }
    }

    /// Boundary indices excluded from verdicts (rectangle corners and their
    /// two neighbors; empty on smooth domains).
    pub fn excluded_boundary_indices(&self) -> Vec<usize> {
        match self {
            Self::Rectangle { nx, ny, .. } => {
                let total = 2 * nx + 2 * ny + 4;
                let corners = [0, nx + 1, nx + ny + 2, 2 * nx + ny + 3];
                let mut out = Vec::new();
                for &c in &corners {
                    out.push(c);
                    out.push((c + 1) % total);
                    out.push((c + total - 1) % total);
                }
                out.sort_unstable();
                out.dedup();
                out
            }
            _ => Vec::new(),
        }
    }

    fn verdict_mask(&self) -> Vec<bool> {
        let mut mask = vec![true; self.boundary_count()];
        for i in self.excluded_boundary_indices() {
            mask[i] = false;
        }
        mask
    }
}

/// (i, j) grid position of rectangle boundary node `index` in CCW order
/// starting at the (0, 0) corner.
fn rectangle_boundary_node(nx: usize, ny: usize, index: usize) -> (usize, usize) {
    let bottom = nx + 2; // (0,0) .. (nx+1, 0)
    let right = ny + 1; // (nx+1, 1) .. (nx+1, ny+1)
    let top = nx + 1; // (nx, ny+1) .. (0, ny+1)
    if index < bottom {
        (index, 0)
    } else if index < bottom + right {
        (nx + 1, index - bottom + 1)
    } else if index < bottom + right + top {
        (nx - (index - bottom - right), ny + 1)
    } else {
        (0, ny + 1 - (index - bottom - right - top + 1))
    }
}

/// Real values on the boundary nodes of a domain.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryField {
    values: Vec<f64>,
}

impl BoundaryField {
    pub fn from_values(domain: &PlanarDomain, values: Vec<f64>) -> Result<Self> {
        if values.len() != domain.boundary_count() {
            return Err(Error::BoundaryCountMismatch {
                got: values.len(),
                expected: domain.boundary_count(),
            });
        }
        if let Some(bad) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue(bad));
        }
        Ok(Self { values })
    }

    /// Samples g at the physical boundary coordinates.
    pub fn from_fn(domain: &PlanarDomain, g: impl Fn(f64, f64) -> f64) -> Self {
        let values = (0..domain.boundary_count())
            .map(|i| {
                let [x, y] = domain.boundary_coordinates(i);
                g(x, y)
            })
            .collect();
        Self { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn powi(&self, p: i32) -> BoundaryField {
        BoundaryField {
            values: self.values.iter().map(|v| v.powi(p)).collect(),
        }
    }
}

/// Interior solution of the Dirichlet problem, with the layout documented
/// per domain: disk rings x angles (ring 0 = center), half-plane rows x
/// boundary nodes (row 0 = boundary), rectangle full (ny+2) x (nx+2) grid
/// including boundary values, row-major in y.
#[derive(Debug, Clone)]
pub struct HarmonicExtension {
    pub values: Vec<f64>,
    pub rows: usize,
    pub cols: usize,
    /// Sup-norm defect of the discrete 5-point equations for the rectangle
    /// direct solve; 0 for the analytic disk / half-plane families.
    pub residual: f64,
}

impl HarmonicExtension {
    pub fn value(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.cols + col]
    }

    pub fn min(&self) -> f64 {
        self.values.iter().fold(f64::INFINITY, |m, &v| m.min(v))
    }

    pub fn max(&self) -> f64 {
        self.values.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v))
    }
}

/// Fourier coefficients of periodic boundary data, reusing the torus FFT.
fn boundary_spectrum(values: &[f64]) -> Result<(TorusGrid, Vec<Complex<f64>>)> {
    let grid = TorusGrid::new_1d(values.len())?;
    let field = ScalarField::from_values(grid, values.to_vec())?;
    Ok((grid, fft::forward(&field)))
}

/// Solves the Dirichlet problem for the domain's Laplacian.
pub fn harmonic_extend(domain: &PlanarDomain, f: &BoundaryField) -> Result<HarmonicExtension> {
    if f.values.len() != domain.boundary_count() {
        return Err(Error::BoundaryCountMismatch {
            got: f.values.len(),
            expected: domain.boundary_count(),
        });
    }
    match domain {
        PlanarDomain::Disk {
            boundary_modes,
            boundary_nodes,
            radial_rings,
        } => {
            let n = *boundary_nodes;
            let (grid, spectrum) = boundary_spectrum(&f.values)?;
            let rows = radial_rings + 1;
            let mut values = vec![0.0; rows * n];
            for ring in 0..rows {
                let r = ring as f64 / *radial_rings as f64;
                let mut damped = spectrum.clone();
                fft::apply_symbol(grid, &mut damped, |k1, _| {
                    let k = k1.unsigned_abs() as usize;
                    if k > *boundary_modes {
                        Complex::new(0.0, 0.0)
                    } else {
                        Complex::new(r.powi(k as i32), 0.0)
                    }
                });
                let ring_values = fft::inverse(grid, damped);
                values[ring * n..(ring + 1) * n].copy_from_slice(ring_values.values());
            }
            Ok(HarmonicExtension {
                values,
                rows,
                cols: n,
                residual: 0.0,
            })
        }
        PlanarDomain::HalfPlane {
            boundary_nodes,
            strip_rows,
            strip_height,
        } => {
            let n = *boundary_nodes;
            let (grid, spectrum) = boundary_spectrum(&f.values)?;
            let rows = strip_rows + 1;
            let dy = strip_height / *strip_rows as f64;
            let mut values = vec![0.0; rows * n];
            for row in 0..rows {
                let y = row as f64 * dy;
                let mut damped = spectrum.clone();
                fft::apply_symbol(grid, &mut damped, |k1, _| {
                    let k = (k1 * k1) as f64;
                    Complex::new((-(k.sqrt()) * y).exp(), 0.0)
                });
                let row_values = fft::inverse(grid, damped);
                values[row * n..(row + 1) * n].copy_from_slice(row_values.values());
            }
            Ok(HarmonicExtension {
                values,
                rows,
                cols: n,
                residual: 0.0,
            })
        }
        PlanarDomain::Rectangle { nx, ny, .. } => rectangle_extend(*nx, *ny, &f.values),
    }
}

/// DST-I of a real vector: S[k] = sum_j v_j sin(pi j k / (M+1)).
fn dst1(v: &[f64]) -> Vec<f64> {
    let m = v.len();
    let ext = 2 * (m + 1);
    let mut buf = vec![Complex::new(0.0, 0.0); ext];
    for (j, &val) in v.iter().enumerate() {
        buf[j + 1] = Complex::new(val, 0.0);
        buf[ext - 1 - j] = Complex::new(-val, 0.0);
    }
    FftPlanner::new().plan_fft_forward(ext).process(&mut buf);
    (1..=m).map(|k| -0.5 * buf[k].im).collect()
}

/// Direct 5-point Laplace solve on the rectangle by double-DST
/// diagonalization. Returns the full grid including boundary values.
fn rectangle_extend(nx: usize, ny: usize, boundary: &[f64]) -> Result<HarmonicExtension> {
    let cols = nx + 2;
    let rows = ny + 2;
    let mut grid_vals = vec![0.0; rows * cols];
    // scatter boundary data onto the full grid
    for (idx, &val) in boundary.iter().enumerate() {
        let (i, j) = rectangle_boundary_node(nx, ny, idx);
        grid_vals[j * cols + i] = val;
    }
    // right-hand side: boundary neighbors of interior nodes
    let mut rhs = vec![0.0; nx * ny];
    for j in 1..=ny {
        for i in 1..=nx {
            let mut b = 0.0;
            if i == 1 {
                b += grid_vals[j * cols];
            }
            if i == nx {
                b += grid_vals[j * cols + nx + 1];
            }
            if j == 1 {
                b += grid_vals[i];
            }
            if j == ny {
                b += grid_vals[(ny + 1) * cols + i];
            }
            rhs[(j - 1) * nx + (i - 1)] = b;
        }
    }
    // forward DST rows then columns
    let mut coef = vec![0.0; nx * ny];
    for j in 0..ny {
        let row = dst1(&rhs[j * nx..(j + 1) * nx]);
        coef[j * nx..(j + 1) * nx].copy_from_slice(&row);
    }
    let mut col = vec![0.0; ny];
    for i in 0..nx {
        for j in 0..ny {
            col[j] = coef[j * nx + i];
        }
        let t = dst1(&col);
        for j in 0..ny {
            coef[j * nx + i] = t[j];
        }
    }
    // eigenvalues of the 5-point operator (times h^2): 4 - 2cos - 2cos
    for j in 1..=ny {
        let mu_y = 2.0 - 2.0 * (PI * j as f64 / (ny as f64 + 1.0)).cos();
        for i in 1..=nx {
            let mu_x = 2.0 - 2.0 * (PI * i as f64 / (nx as f64 + 1.0)).cos();
            coef[(j - 1) * nx + (i - 1)] /= mu_x + mu_y;
        }
    }
    // inverse DST (same transform scaled by 2/(M+1) per direction)
    for j in 0..ny {
        let row = dst1(&coef[j * nx..(j + 1) * nx]);
        coef[j * nx..(j + 1) * nx].copy_from_slice(&row);
    }
    for i in 0..nx {
        for j in 0..ny {
            col[j] = coef[j * nx + i];
        }
        let t = dst1(&col);
        for j in 0..ny {
            coef[j * nx + i] = t[j];
        }
    }
    let scale = 4.0 / ((nx as f64 + 1.0) * (ny as f64 + 1.0));
    for j in 1..=ny {
        for i in 1..=nx {
            grid_vals[j * cols + i] = coef[(j - 1) * nx + (i - 1)] * scale;
        }
    }
    // direct-solve residual: defect of the undivided 5-point equations
    let mut residual = 0.0_f64;
    for j in 1..=ny {
        for i in 1..=nx {
            let defect = 4.0 * grid_vals[j * cols + i]
                - grid_vals[j * cols + i - 1]
                - grid_vals[j * cols + i + 1]
                - grid_vals[(j - 1) * cols + i]
                - grid_vals[(j + 1) * cols + i];
            residual = residual.max(defect.abs());
        }
    }
    if residual > 1e-10 {
        return Err(Error::ManifoldParameter(format!(
            "rectangle direct solve residual {residual:.3e} exceeds 1e-10"
        )));
    }
    Ok(HarmonicExtension {
        values: grid_vals,
        rows,
        cols,
        residual,
    })
}

/// Dirichlet-Neumann operator: boundary data to outward normal derivative
/// of its harmonic extension. Disk and half-plane act as the exact |k|
/// multiplier; the rectangle uses the second-order one-sided stencil on the
/// direct solve (corner entries are set to zero and excluded from verdicts).
pub fn dn_apply(domain: &PlanarDomain, f: &BoundaryField) -> Result<BoundaryField> {
    if f.values.len() != domain.boundary_count() {
        return Err(Error::BoundaryCountMismatch {
            got: f.values.len(),
            expected: domain.boundary_count(),
        });
    }
    match domain {
        PlanarDomain::Disk { boundary_modes, .. } => {
            let (grid, mut spectrum) = boundary_spectrum(&f.values)?;
            fft::apply_symbol(grid, &mut spectrum, |k1, _| {
                let k = k1.unsigned_abs() as usize;
                if k > *boundary_modes {
                    Complex::new(0.0, 0.0)
                } else {
                    Complex::new(k as f64, 0.0)
                }
            });
            Ok(BoundaryField {
                values: fft::inverse(grid, spectrum).into_values(),
            })
        }
        PlanarDomain::HalfPlane { .. } => {
            let (grid, mut spectrum) = boundary_spectrum(&f.values)?;
            let nyquist = (grid.points_per_axis() / 2) as i64;
            fft::apply_symbol(grid, &mut spectrum, |k1, _| {
                if k1.abs() == nyquist {
                    Complex::new(0.0, 0.0)
                } else {
                    Complex::new(k1.unsigned_abs() as f64, 0.0)
                }
            });
            Ok(BoundaryField {
                values: fft::inverse(grid, spectrum).into_values(),
            })
        }
        PlanarDomain::Rectangle { nx, ny, h } => {
            let ext = harmonic_extend(domain, f)?;
            let cols = ext.cols;
            let count = domain.boundary_count();
            let mut values = vec![0.0; count];
            for idx in 0..count {
                let (i, j) = rectangle_boundary_node(*nx, *ny, idx);
                let corner = (i == 0 || i == nx + 1) && (j == 0 || j == *ny + 1);
                if corner {
                    continue; // excluded; flagged through excluded_boundary_indices
                }
                let at = |ii: usize, jj: usize| ext.values[jj * cols + ii];
                // outward derivative by the 3-point one-sided stencil
                let d = if j == 0 {
                    (3.0 * at(i, 0) - 4.0 * at(i, 1) + at(i, 2)) / (2.0 * h)
                } else if j == *ny + 1 {
                    (3.0 * at(i, ny + 1) - 4.0 * at(i, *ny) + at(i, ny - 1)) / (2.0 * h)
                } else if i == 0 {
                    (3.0 * at(0, j) - 4.0 * at(1, j) + at(2, j)) / (2.0 * h)
                } else {
                    (3.0 * at(nx + 1, j) - 4.0 * at(*nx, j) + at(nx - 1, j)) / (2.0 * h)
                };
                values[idx] = d;
            }
            Ok(BoundaryField { values })
        }
    }
}

/// Largest boundary mode carried by the data (trig-interpolant band).
fn boundary_band(values: &[f64]) -> Result<usize> {
    let grid = TorusGrid::new_1d(values.len())?;
    let field = ScalarField::from_values(grid, values.to_vec())?;
    Ok(fft::spectral_band(&field))
}

/// Verifies `f^{2m-1} D f - (1/2m) D(f^{2m}) >= -tolerance` at every
/// non-excluded boundary node.
pub fn verify_power_inequality(
    domain: &PlanarDomain,
    f: &BoundaryField,
    m: u32,
    tolerance: f64,
) -> Result<InequalityReport> {
    if m < 1 {
        return Err(Error::InvalidPower(m));
    }
    let slack = power_slack(domain, f, m)?;
    let mask = domain.verdict_mask();
    let mut max_violation = f64::NEG_INFINITY;
    let mut argmax = 0;
    for (i, (&s, &ok)) in slack.iter().zip(&mask).enumerate() {
        if ok && -s > max_violation {
            max_violation = -s;
            argmax = i;
        }
    }
    let excluded = domain.excluded_boundary_indices().len();
    let mut metadata = CheckMetadata::new("dirichlet_neumann", "verify_power_inequality")
        .operator(&domain_label(domain))
        .phi(&format!("x^{}", 2 * m))
        .note(format!("m = {m}, excluded boundary nodes: {excluded}"));
    let tolerance_used = match domain {
        PlanarDomain::Rectangle { h, .. } => {
            // first-order normal differencing: O(h) tolerance at the scale
            // of f^{2m-1} D f
            let f_sup = f.values.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
            tolerance.max(10.0 * h * f_sup.powi(2 * m as i32).max(1e-30))
        }
        _ => {
            let band = boundary_band(&f.values)?;
            let resolvable = f.values.len() / 2 - 1;
            let mode_cap = match domain {
                PlanarDomain::Disk { boundary_modes, .. } => *boundary_modes,
                _ => resolvable,
            };
            if band.saturating_mul(2 * m as usize) <= mode_cap.min(resolvable) {
                tolerance.max(1e-8)
            } else {
                // degraded-tolerance path: compare against the doubled
                // boundary resolution of the same trig interpolant
                let measured = refinement_difference(domain, f, m, &slack)?;
                metadata = metadata.note("band precondition unmet; tolerance degraded".into());
                tolerance.max(1e-8 + 2.0 * measured)
            }
        }
    };
    let mut report = InequalityReport::new(max_violation, argmax, tolerance_used, metadata);
    report.details.push(("excluded_nodes".into(), excluded as f64));
    Ok(report)
}

fn domain_label(domain: &PlanarDomain) -> String {
    match domain {
        PlanarDomain::Disk {
            boundary_modes,
            boundary_nodes,
            ..
        } => format!("disk[Kb={boundary_modes},Nb={boundary_nodes}]"),
        PlanarDomain::HalfPlane { boundary_nodes, .. } => {
            format!("half_plane[N={boundary_nodes}]")
        }
        PlanarDomain::Rectangle { nx, ny, h } => format!("rectangle[{nx}x{ny},h={h:.4e}]"),
    }
}

/// Nodewise slack f^{2m-1} D f - (1/2m) D(f^{2m}).
pub fn power_slack(domain: &PlanarDomain, f: &BoundaryField, m: u32) -> Result<Vec<f64>> {
    let df = dn_apply(domain, f)?;
    let dpow = dn_apply(domain, &f.powi(2 * m as i32))?;
    let inv2m = 1.0 / (2.0 * m as f64);
    Ok(f.values
        .iter()
        .zip(df.values.iter().zip(&dpow.values))
        .map(|(&fi, (&dfi, &dpi))| fi.powi(2 * m as i32 - 1) * dfi - inv2m * dpi)
        .collect())
}

/// Slack difference against the doubled boundary resolution (disk and
/// half-plane), used for the degraded-tolerance path.
fn refinement_difference(
    domain: &PlanarDomain,
    f: &BoundaryField,
    m: u32,
    coarse_slack: &[f64],
) -> Result<f64> {
    let n = f.values.len();
    let grid = TorusGrid::new_1d(n)?;
    let fine_values = fft::resample_double(&ScalarField::from_values(grid, f.values.clone())?);
    let fine_domain = match domain {
        PlanarDomain::Disk {
            boundary_modes,
            radial_rings,
            ..
        } => PlanarDomain::Disk {
            boundary_modes: 2 * boundary_modes,
            boundary_nodes: 2 * n,
            radial_rings: *radial_rings,
        },
        PlanarDomain::HalfPlane {
            strip_rows,
            strip_height,
            ..
        } => PlanarDomain::HalfPlane {
            boundary_nodes: 2 * n,
            strip_rows: *strip_rows,
            strip_height: *strip_height,
        },
        PlanarDomain::Rectangle { .. } => return Ok(0.0),
    };
    let fine_f = BoundaryField {
        values: fine_values.into_values(),
    };
    let fine_slack = power_slack(&fine_domain, &fine_f, m)?;
    let mut measured = 0.0_f64;
    for i in 0..n {
        measured = measured.max((coarse_slack[i] - fine_slack[2 * i]).abs());
    }
    Ok(measured)
}

/// The three quantities of the Hopf-lemma mechanism for w = u^{2m} - v:
/// the interior maximum of w, the worst outward normal derivative of w on
/// the boundary, and the worst interior discrete Laplacian of w.
#[derive(Debug, Clone)]
pub struct HopfDiagnostic {
    pub max_w: f64,
    pub min_normal_derivative: f64,
    pub min_interior_laplacian: f64,
    pub excluded_boundary: usize,
    /// Grid spacing entering the O(h) tolerances, when the domain has one.
    pub spacing: Option<f64>,
}

pub fn hopf_mechanism_diagnostic(
    domain: &PlanarDomain,
    f: &BoundaryField,
    m: u32,
) -> Result<HopfDiagnostic> {
    if m < 1 {
        return Err(Error::InvalidPower(m));
    }
    let u = harmonic_extend(domain, f)?;
    let v = harmonic_extend(domain, &f.powi(2 * m as i32))?;
    let w: Vec<f64> = u
        .values
        .iter()
        .zip(&v.values)
        .map(|(&a, &b)| a.powi(2 * m as i32) - b)
        .collect();
    let max_w = w.iter().fold(f64::NEG_INFINITY, |acc, &x| acc.max(x));

    // boundary: dw/dnu = 2m f^{2m-1} Df - D(f^{2m}) = 2m * power slack
    let slack = power_slack(domain, f, m)?;
    let mask = domain.verdict_mask();
    let min_normal_derivative = slack
        .iter()
        .zip(&mask)
        .filter(|(_, &ok)| ok)
        .map(|(&s, _)| 2.0 * m as f64 * s)
        .fold(f64::INFINITY, f64::min);

    let min_interior_laplacian = interior_laplacian_min(domain, &w, u.rows, u.cols)?;
    Ok(HopfDiagnostic {
        max_w,
        min_normal_derivative,
        min_interior_laplacian,
        excluded_boundary: domain.excluded_boundary_indices().len(),
        spacing: match domain {
            PlanarDomain::Rectangle { h, .. } => Some(*h),
            _ => None,
        },
    })
}

/// Worst discrete Laplacian of w over interior sample nodes.
fn interior_laplacian_min(
    domain: &PlanarDomain,
    w: &[f64],
    rows: usize,
    cols: usize,
) -> Result<f64> {
    let mut min_lap = f64::INFINITY;
    match domain {
        PlanarDomain::Disk { radial_rings, .. } => {
            let dr = 1.0 / *radial_rings as f64;
            let grid = TorusGrid::new_1d(cols)?;
            // theta second derivative per ring, spectral
            let d2theta: Vec<Vec<f64>> = (0..rows)
                .map(|ring| {
                    let field = ScalarField::from_values_unchecked(
                        grid,
                        w[ring * cols..(ring + 1) * cols].to_vec(),
                    );
                    let mut spec = fft::forward(&field);
                    fft::apply_symbol(grid, &mut spec, |k1, _| {
                        Complex::new(-((k1 * k1) as f64), 0.0)
                    });
                    fft::inverse(grid, spec).into_values()
                })
                .collect();
            for ring in 1..rows - 1 {
                let r = ring as f64 * dr;
                for i in 0..cols {
                    let w_rr =
                        (w[(ring + 1) * cols + i] - 2.0 * w[ring * cols + i] + w[(ring - 1) * cols + i])
                            / (dr * dr);
                    let w_r = (w[(ring + 1) * cols + i] - w[(ring - 1) * cols + i]) / (2.0 * dr);
                    let lap = w_rr + w_r / r + d2theta[ring][i] / (r * r);
                    min_lap = min_lap.min(lap);
                }
            }
        }
        PlanarDomain::HalfPlane {
            strip_rows,
            strip_height,
            boundary_nodes,
        } => {
            let dy = strip_height / *strip_rows as f64;
            let dx = 2.0 * PI / *boundary_nodes as f64;
            for row in 1..rows - 1 {
                for i in 0..cols {
                    let left = w[row * cols + (i + cols - 1) % cols];
                    let right = w[row * cols + (i + 1) % cols];
                    let down = w[(row - 1) * cols + i];
                    let up = w[(row + 1) * cols + i];
                    let c = w[row * cols + i];
                    let lap = (left + right - 2.0 * c) / (dx * dx) + (up + down - 2.0 * c) / (dy * dy);
                    min_lap = min_lap.min(lap);
                }
            }
        }
        PlanarDomain::Rectangle { h, .. } => {
            for j in 1..rows - 1 {
                for i in 1..cols - 1 {
                    let lap = (w[j * cols + i - 1] + w[j * cols + i + 1] + w[(j - 1) * cols + i]
                        + w[(j + 1) * cols + i]
                        - 4.0 * w[j * cols + i])
                        / (h * h);
                    min_lap = min_lap.min(lap);
                }
            }
        }
    }
    Ok(min_lap)
}
