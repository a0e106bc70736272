//! Spectral decompositions of Laplace-Beltrami-type operators on builtin
//! discretized manifolds and user-supplied matrix pencils, with fractional
//! powers by functional calculus.
//!
//! Builtins carry exact analytic spectra (circle k^2, flat torus |k|^2,
//! sphere l(l+1)), which removes discretization error from every downstream
//! inequality test. The custom path solves the generalized symmetric problem
//! (S, M) densely for a diagonal mass matrix.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::grid::FractionalOrder;
use crate::report::{CheckMetadata, InequalityReport};
use crate::sphere;

/// Ceiling on node counts for any decomposition (dense desk-scale paths).
pub const MAX_NODES: usize = 4096;

/// What to decompose.
#[derive(Debug, Clone)]
pub enum ManifoldSpec {
    /// Unit circle sampled at `nodes` uniform points; spectrum k^2.
    Circle { nodes: usize },
    /// Flat 2-torus on an N x N grid; spectrum |k|^2.
    FlatTorus { nodes_per_axis: usize },
    /// Unit sphere on a Gauss-Legendre x uniform-longitude grid holding all
    /// spherical harmonics of degree <= band_limit; spectrum l(l+1).
    Sphere { band_limit: usize },
    /// Generalized pencil (S, M): S symmetric positive semidefinite
    /// stiffness, M a positive diagonal mass.
    Custom {
        stiffness: DMatrix<f64>,
        mass: Vec<f64>,
    },
}

/// First K generalized eigenpairs, M-orthonormal, eigenvalues ascending
/// with lambda_0 = 0 first on connected builtins.
#[derive(Debug, Clone)]
pub struct SpectrumDecomposition {
    eigenvalues: Vec<f64>,
    /// Row k holds eigenfunction k sampled at every node.
    eigenfunctions: Vec<Vec<f64>>,
    /// Quadrature weights (the mass diagonal).
    weights: Vec<f64>,
    /// Manifold dimension for builtins; 0 for custom pencils.
    dimension: usize,
    volume: f64,
    label: String,
}

/// Builds the first `modes` eigenpairs of the spec.
pub fn build_spectrum(spec: &ManifoldSpec, modes: usize) -> Result<SpectrumDecomposition> {
    SpectrumDecomposition::build(spec, modes)
}

impl SpectrumDecomposition {
    pub fn build(spec: &ManifoldSpec, modes: usize) -> Result<Self> {
        let dec = match spec {
            ManifoldSpec::Circle { nodes } => Self::circle(*nodes, modes)?,
            ManifoldSpec::FlatTorus { nodes_per_axis } => Self::flat_torus(*nodes_per_axis, modes)?,
            ManifoldSpec::Sphere { band_limit } => Self::sphere(*band_limit, modes)?,
            ManifoldSpec::Custom { stiffness, mass } => Self::custom(stiffness, mass, modes)?,
        };
        dec.validate()?;
        Ok(dec)
    }

    fn circle(nodes: usize, modes: usize) -> Result<Self> {
        if nodes < 8 || nodes % 2 != 0 || nodes > MAX_NODES {
            return Err(Error::ManifoldParameter(format!(
                "circle nodes {nodes}: need even, 8..={MAX_NODES}"
            )));
        }
        // Modes above the resolved band break grid orthonormality.
        let available = nodes - 1;
        if modes > available {
            return Err(Error::TooManyModes {
                requested: modes,
                available,
            });
        }
        let h = 2.0 * PI / nodes as f64;
        let xs: Vec<f64> = (0..nodes).map(|i| i as f64 * h).collect();
        let inv_sqrt_2pi = 1.0 / (2.0 * PI).sqrt();
        let inv_sqrt_pi = 1.0 / PI.sqrt();
        let mut eigenvalues = Vec::with_capacity(modes);
        let mut eigenfunctions = Vec::with_capacity(modes);
        for j in 0..modes {
            if j == 0 {
                eigenvalues.push(0.0);
                eigenfunctions.push(vec![inv_sqrt_2pi; nodes]);
            } else {
                let k = ((j + 1) / 2) as f64;
                eigenvalues.push(k * k);
                let f: Vec<f64> = if j % 2 == 1 {
                    xs.iter().map(|x| (k * x).cos() * inv_sqrt_pi).collect()
                } else {
                    xs.iter().map(|x| (k * x).sin() * inv_sqrt_pi).collect()
                };
                eigenfunctions.push(f);
            }
        }
        Ok(Self {
            eigenvalues,
            eigenfunctions,
            weights: vec![h; nodes],
            dimension: 1,
            volume: 2.0 * PI,
            label: format!("circle[N={nodes}]"),
        })
    }

    fn flat_torus(n: usize, modes: usize) -> Result<Self> {
        if n < 8 || n % 2 != 0 || n * n > MAX_NODES {
            return Err(Error::ManifoldParameter(format!(
                "flat torus nodes_per_axis {n}: need even >= 8 with n^2 <= {MAX_NODES}"
            )));
        }
        let band = (n / 2 - 1) as i64;
        // Half-lattice representatives (k1 > 0, or k1 = 0 and k2 > 0),
        // each contributing a cos and a sin eigenfunction.
        let mut reps: Vec<(i64, i64)> = Vec::new();
        for k1 in 0..=band {
            let lo = if k1 == 0 { 1 } else { -band };
            for k2 in lo..=band {
                reps.push((k1, k2));
            }
        }
        reps.sort_by_key(|&(k1, k2)| (k1 * k1 + k2 * k2, k1, k2));
        let available = 1 + 2 * reps.len();
        if modes > available {
            return Err(Error::TooManyModes {
                requested: modes,
                available,
            });
        }
        let h = 2.0 * PI / n as f64;
        let vol = (2.0 * PI).powi(2);
        let const_norm = 1.0 / vol.sqrt();
        let pair_norm = (2.0 / vol).sqrt();
        let mut eigenvalues = Vec::with_capacity(modes);
        let mut eigenfunctions = Vec::with_capacity(modes);
        let node_xy = |i: usize| ((i / n) as f64 * h, (i % n) as f64 * h);
        for j in 0..modes {
            if j == 0 {
                eigenvalues.push(0.0);
                eigenfunctions.push(vec![const_norm; n * n]);
                continue;
            }
            let (k1, k2) = reps[(j - 1) / 2];
            eigenvalues.push((k1 * k1 + k2 * k2) as f64);
            let is_cos = (j - 1) % 2 == 0;
            let f: Vec<f64> = (0..n * n)
                .map(|i| {
                    let (x1, x2) = node_xy(i);
                    let phase = k1 as f64 * x1 + k2 as f64 * x2;
                    pair_norm * if is_cos { phase.cos() } else { phase.sin() }
                })
                .collect();
            eigenfunctions.push(f);
        }
        Ok(Self {
            eigenvalues,
            eigenfunctions,
            weights: vec![h * h; n * n],
            dimension: 2,
            volume: vol,
            label: format!("flat_torus[N={n}]"),
        })
    }

    fn sphere(band_limit: usize, modes: usize) -> Result<Self> {
        let l_max = band_limit;
        let nq = 2 * (l_max + 1);
        let nphi = 4 * (l_max + 1);
        if nq * nphi > MAX_NODES {
            return Err(Error::ManifoldParameter(format!(
                "sphere band limit {l_max}: grid {nq}x{nphi} exceeds {MAX_NODES} nodes"
            )));
        }
        let available = (l_max + 1) * (l_max + 1);
        if modes > available {
            return Err(Error::TooManyModes {
                requested: modes,
                available,
            });
        }
        let (ct, wq) = sphere::gauss_legendre(nq);
        let dphi = 2.0 * PI / nphi as f64;
        let mut weights = Vec::with_capacity(nq * nphi);
        for wi in &wq {
            for _ in 0..nphi {
                weights.push(wi * dphi);
            }
        }
        // (l, m) ordered by eigenvalue l(l+1), zonal first then cos/sin pairs.
        let mut lm: Vec<(usize, i64)> = Vec::new();
        for l in 0..=l_max {
            lm.push((l, 0));
            for m in 1..=(l as i64) {
                lm.push((l, m));
                lm.push((l, -m));
            }
        }
        let mut eigenvalues = Vec::with_capacity(modes);
        let mut eigenfunctions = Vec::with_capacity(modes);
        for &(l, m) in lm.iter().take(modes) {
            eigenvalues.push((l * (l + 1)) as f64);
            let mut f = Vec::with_capacity(nq * nphi);
            for cti in &ct {
                for j in 0..nphi {
                    f.push(sphere::real_harmonic(l, m, *cti, j as f64 * dphi));
                }
            }
            eigenfunctions.push(f);
        }
        Ok(Self {
            eigenvalues,
            eigenfunctions,
            weights,
            dimension: 2,
            volume: 4.0 * PI,
            label: format!("sphere[L={l_max}]"),
        })
    }

    fn custom(stiffness: &DMatrix<f64>, mass: &[f64], modes: usize) -> Result<Self> {
        let n = mass.len();
        if n == 0 || n > MAX_NODES {
            return Err(Error::ManifoldParameter(format!(
                "custom pencil with {n} nodes (ceiling {MAX_NODES})"
            )));
        }
        if stiffness.nrows() != n || stiffness.ncols() != n {
            return Err(Error::NodeCountMismatch {
                got: stiffness.nrows(),
                expected: n,
            });
        }
        if modes > n {
            return Err(Error::TooManyModes {
                requested: modes,
                available: n,
            });
        }
        if let Some(i) = mass.iter().position(|&m| !(m > 0.0)) {
            return Err(Error::MassNotPositiveDefinite {
                index: i,
                value: mass[i],
            });
        }
        let scale = stiffness.amax().max(1e-300);
        let asym = (stiffness - stiffness.transpose()).amax();
        if asym > 1e-10 * scale {
            return Err(Error::StiffnessNotSymmetric(asym));
        }
        // Similarity transform to the ordinary symmetric problem:
        // B = M^{-1/2} S M^{-1/2}, eigenvectors mapped back by M^{-1/2}.
        let inv_sqrt_m: Vec<f64> = mass.iter().map(|m| 1.0 / m.sqrt()).collect();
        let mut b = stiffness.clone();
        for i in 0..n {
            for j in 0..n {
                b[(i, j)] *= inv_sqrt_m[i] * inv_sqrt_m[j];
            }
        }
        let b = (&b + b.transpose()) * 0.5;
        let eig = SymmetricEigen::new(b);
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &c| {
            eig.eigenvalues[a]
                .partial_cmp(&eig.eigenvalues[c])
                .expect("eigenvalues are finite")
        });
        let lambda_max = order
            .last()
            .map(|&i| eig.eigenvalues[i].abs())
            .unwrap_or(1.0);
        let floor = -1e-10 * lambda_max.max(1.0);
        let mut eigenvalues = Vec::with_capacity(modes);
        let mut eigenfunctions = Vec::with_capacity(modes);
        for &col in order.iter().take(modes) {
            let lam = eig.eigenvalues[col];
            if lam < floor {
                return Err(Error::NotPositiveSemidefinite(lam));
            }
            eigenvalues.push(lam.max(0.0));
            let f: Vec<f64> = (0..n)
                .map(|row| eig.eigenvectors[(row, col)] * inv_sqrt_m[row])
                .collect();
            eigenfunctions.push(f);
        }
        Ok(Self {
            eigenvalues,
            eigenfunctions,
            weights: mass.to_vec(),
            dimension: 0,
            volume: mass.iter().sum(),
            label: format!("custom[n={n}]"),
        })
    }

    /// Ascending eigenvalue / orthonormality / nonnegativity checks from the
    /// type contract. Full Gram verification when affordable, deterministic
    /// sampling beyond that.
    fn validate(&self) -> Result<()> {
        let k = self.mode_count();
        for i in 1..k {
            if self.eigenvalues[i] < self.eigenvalues[i - 1] {
                return Err(Error::ManifoldParameter(format!(
                    "eigenvalues not ascending at index {i}"
                )));
            }
        }
        if let Some(&first) = self.eigenvalues.first() {
            if first < -1e-10 {
                return Err(Error::NotPositiveSemidefinite(first));
            }
        }
        let defect = self.gram_defect();
        if defect > 1e-8 {
            return Err(Error::ManifoldParameter(format!(
                "eigenfunction Gram defect {defect:.3e} exceeds 1e-8"
            )));
        }
        Ok(())
    }

    /// max |<phi_i, phi_j>_M - delta_ij| over checked pairs.
    pub fn gram_defect(&self) -> f64 {
        let k = self.mode_count();
        let full = k * k * self.node_count() <= 200_000_000;
        let mut defect = 0.0_f64;
        for i in 0..k {
            let ji: Box<dyn Iterator<Item = usize>> = if full {
                Box::new(i..k)
            } else {
                // diagonal plus a fixed stride of off-diagonal pairs
                Box::new((i..k).step_by(1 + k / 64))
            };
            for j in ji {
                let g = self.inner(&self.eigenfunctions[i], &self.eigenfunctions[j]);
                let target = if i == j { 1.0 } else { 0.0 };
                defect = defect.max((g - target).abs());
            }
        }
        defect
    }

    pub fn mode_count(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn node_count(&self) -> usize {
        self.weights.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenfunction(&self, k: usize) -> &[f64] {
        &self.eigenfunctions[k]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Manifold dimension for builtins (0 for custom pencils).
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn volume(&self) -> f64 {
        self.volume
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// M-weighted inner product of two node-value vectors.
    pub fn inner(&self, f: &[f64], g: &[f64]) -> f64 {
        f.iter()
            .zip(g)
            .zip(&self.weights)
            .map(|((a, b), w)| a * b * w)
            .sum()
    }

    /// Quadrature L^p norm with the decomposition's weights.
    pub fn lp_norm(&self, f: &[f64], p: f64) -> f64 {
        f.iter()
            .zip(&self.weights)
            .map(|(v, w)| v.abs().powf(p) * w)
            .sum::<f64>()
            .powf(1.0 / p)
    }

    /// Coefficients <f, phi_k>_M for every resolved mode.
    pub fn project(&self, f: &[f64]) -> Result<Vec<f64>> {
        if f.len() != self.node_count() {
            return Err(Error::NodeCountMismatch {
                got: f.len(),
                expected: self.node_count(),
            });
        }
        Ok(self
            .eigenfunctions
            .iter()
            .map(|phi| self.inner(f, phi))
            .collect())
    }

    /// sum_k c_k phi_k as node values.
    pub fn synthesize(&self, coefficients: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.node_count()];
        for (c, phi) in coefficients.iter().zip(&self.eigenfunctions) {
            if *c == 0.0 {
                continue;
            }
            for (o, p) in out.iter_mut().zip(phi) {
                *o += c * p;
            }
        }
        out
    }
}

/// Functional calculus: sum_k lambda_k^(alpha/2) <f, phi_k>_M phi_k.
/// The lambda = 0 mode contributes nothing.
pub fn apply_fractional_power(
    dec: &SpectrumDecomposition,
    order: FractionalOrder,
    f: &[f64],
) -> Result<Vec<f64>> {
    let mut coeffs = dec.project(f)?;
    let half = order.half();
    for (c, &lam) in coeffs.iter_mut().zip(dec.eigenvalues()) {
        *c *= if lam > 0.0 { lam.powf(half) } else { 0.0 };
    }
    Ok(dec.synthesize(&coeffs))
}

/// Verifies the squared-eigenfunction comparison
/// (-Delta_g)(phi_k^2) <= 2 lambda_k phi_k^2 pointwise, with phi_k^2 first
/// projected onto the resolved modes. Aliased mass beyond the resolved band
/// is reported in the `aliasing_residual` detail, never silently dropped.
pub fn bochner_square_check(dec: &SpectrumDecomposition, k: usize) -> Result<InequalityReport> {
    if k >= dec.mode_count() {
        return Err(Error::ModeOutOfRange {
            index: k,
            modes: dec.mode_count(),
        });
    }
    let phi = dec.eigenfunction(k);
    let squared: Vec<f64> = phi.iter().map(|v| v * v).collect();
    let coeffs = dec.project(&squared)?;
    let resolved = dec.synthesize(&coeffs);
    let aliasing_residual = squared
        .iter()
        .zip(&resolved)
        .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
    let mut lap_coeffs = coeffs;
    for (c, &lam) in lap_coeffs.iter_mut().zip(dec.eigenvalues()) {
        *c *= lam;
    }
    let lhs = dec.synthesize(&lap_coeffs);
    let lam_k = dec.eigenvalues()[k];
    let mut max_violation = f64::NEG_INFINITY;
    let mut argmax = 0;
    for (i, (l, p)) in lhs.iter().zip(phi).enumerate() {
        let violation = l - 2.0 * lam_k * p * p;
        if violation > max_violation {
            max_violation = violation;
            argmax = i;
        }
    }
    let metadata = CheckMetadata::new("manifold_spectrum", "bochner_square_check")
        .operator(dec.label())
        .note(format!("mode {k}, lambda = {lam_k}"));
    Ok(
        InequalityReport::new(max_violation, argmax, 1e-8, metadata)
            .with_detail("aliasing_residual", aliasing_residual),
    )
}

/// One row of the eigenfunction sup-norm growth table.
#[derive(Debug, Clone, Serialize)]
pub struct SupnormRow {
    pub eigenvalue: f64,
    pub sup_norm: f64,
    /// sup_norm / lambda^(n/2); None on the lambda = 0 mode.
    pub ratio: Option<f64>,
}

/// Eigenfunction sup-norm growth against the lambda^(n/2) envelope.
#[derive(Debug, Clone, Serialize)]
pub struct SupnormReport {
    pub rows: Vec<SupnormRow>,
}

impl SupnormReport {
    pub fn max_ratio(&self) -> Option<f64> {
        self.rows
            .iter()
            .filter_map(|r| r.ratio)
            .fold(None, |m, r| Some(m.map_or(r, |m: f64| m.max(r))))
    }
}

/// Tabulates (lambda_k, ||phi_k||_inf, ratio) sorted by eigenvalue. The
/// `dimension` argument sets the envelope exponent n/2 (pass the manifold
/// dimension; custom pencils have no intrinsic one).
pub fn supnorm_growth_report(dec: &SpectrumDecomposition, dimension: usize) -> SupnormReport {
    let rows = dec
        .eigenvalues()
        .iter()
        .enumerate()
        .map(|(k, &lam)| {
            let sup = dec
                .eigenfunction(k)
                .iter()
                .fold(0.0_f64, |m, v| m.max(v.abs()));
            let ratio = if lam > 0.0 {
                Some(sup / lam.powf(dimension as f64 / 2.0))
            } else {
                None
            };
            SupnormRow {
                eigenvalue: lam,
                sup_norm: sup,
                ratio,
            }
        })
        .collect();
    SupnormReport { rows }
}

/// Combinatorial Laplacian of the n-node path graph: tridiagonal
/// (-1, degree, -1) with degree 1 at the endpoints. An M-matrix generator
/// with zero row sums.
pub fn path_graph_laplacian(n: usize) -> DMatrix<f64> {
    let mut l = DMatrix::zeros(n, n);
    for i in 0..n {
        if i > 0 {
            l[(i, i - 1)] = -1.0;
            l[(i, i)] += 1.0;
        }
        if i + 1 < n {
            l[(i, i + 1)] = -1.0;
            l[(i, i)] += 1.0;
        }
    }
    l
}

/// Combinatorial Laplacian of the n-node cycle graph.
pub fn cycle_graph_laplacian(n: usize) -> DMatrix<f64> {
    let mut l = DMatrix::zeros(n, n);
    for i in 0..n {
        let prev = (i + n - 1) % n;
        let next = (i + 1) % n;
        l[(i, i)] = 2.0;
        l[(i, prev)] += -1.0;
        l[(i, next)] += -1.0;
    }
    l
}
