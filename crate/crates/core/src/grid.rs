use std::f64::consts::PI;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Uniform periodic grid on T^1 or T^2 with period 2*pi per axis.
///
/// Node `i` of a 1-D grid sits at `x = i * h`; node `(i1, i2)` of a 2-D grid
/// sits at `(i1 * h, i2 * h)` with linear index `i1 * N + i2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TorusGrid {
    dimension: usize,
    points_per_axis: usize,
}

impl TorusGrid {
    pub fn new(dimension: usize, points_per_axis: usize) -> Result<Self> {
        if dimension != 1 && dimension != 2 {
            return Err(Error::InvalidDimension(dimension));
        }
        if points_per_axis < 8 || points_per_axis % 2 != 0 {
            return Err(Error::InvalidGridSize(points_per_axis));
        }
        Ok(Self {
            dimension,
            points_per_axis,
        })
    }

    pub fn new_1d(points: usize) -> Result<Self> {
        Self::new(1, points)
    }

    pub fn new_2d(points_per_axis: usize) -> Result<Self> {
        Self::new(2, points_per_axis)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn points_per_axis(&self) -> usize {
        self.points_per_axis
    }

    pub fn spacing(&self) -> f64 {
        2.0 * PI / self.points_per_axis as f64
    }

    pub fn node_count(&self) -> usize {
        self.points_per_axis.pow(self.dimension as u32)
    }

    /// Quadrature weight of one node (h^n); the weights sum to (2*pi)^n.
    pub fn quadrature_weight(&self) -> f64 {
        self.spacing().powi(self.dimension as i32)
    }

    /// Coordinates of the node with the given linear index; the second
    /// entry is 0 on a 1-D grid.
    pub fn coordinates(&self, index: usize) -> [f64; 2] {
        let h = self.spacing();
        match self.dimension {
            1 => [index as f64 * h, 0.0],
            _ => {
                let n = self.points_per_axis;
                [(index / n) as f64 * h, (index % n) as f64 * h]
            }
        }
    }

    /// Largest wavenumber magnitude representable without ambiguity
    /// (the Nyquist mode N/2 is excluded).
    pub fn max_resolved_mode(&self) -> usize {
        self.points_per_axis / 2 - 1
    }
}

/// Sampled real-valued function on a [`TorusGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: TorusGrid,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn from_values(grid: TorusGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.node_count() {
            return Err(Error::NodeCountMismatch {
                got: values.len(),
                expected: grid.node_count(),
            });
        }
        if let Some(bad) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue(bad));
        }
        Ok(Self { grid, values })
    }

    /// Samples `f(x)` on a 1-D grid or `f(x1, x2)` (via coordinates) on 2-D.
    pub fn from_fn(grid: TorusGrid, f: impl Fn(f64, f64) -> f64) -> Self {
        let values = (0..grid.node_count())
            .map(|i| {
                let [x1, x2] = grid.coordinates(i);
                f(x1, x2)
            })
            .collect();
        Self { grid, values }
    }

    pub fn constant(grid: TorusGrid, value: f64) -> Self {
        Self {
            grid,
            values: vec![value; grid.node_count()],
        }
    }

    pub fn zeros(grid: TorusGrid) -> Self {
        Self::constant(grid, 0.0)
    }

    pub fn grid(&self) -> TorusGrid {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub(crate) fn from_values_unchecked(grid: TorusGrid, values: Vec<f64>) -> Self {
        Self { grid, values }
    }

    pub fn check_finite(&self) -> Result<()> {
        if let Some(bad) = self.values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue(bad));
        }
        Ok(())
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().fold(f64::INFINITY, |m, &v| m.min(v))
    }

    pub fn max(&self) -> f64 {
        self.values.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v))
    }

    /// Quadrature L^p norm, `(sum h^n |f_i|^p)^(1/p)`.
    pub fn lp_norm(&self, p: f64) -> f64 {
        let w = self.grid.quadrature_weight();
        (self
            .values
            .iter()
            .map(|v| v.abs().powf(p))
            .sum::<f64>()
            * w)
            .powf(1.0 / p)
    }

    /// Quadrature inner product with matching sampling.
    pub fn inner(&self, other: &ScalarField) -> f64 {
        let w = self.grid.quadrature_weight();
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b)
            .sum::<f64>()
            * w
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> ScalarField {
        ScalarField {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }
}

/// Order alpha of a fractional Laplacian, constrained to (0, 2].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FractionalOrder(f64);

impl FractionalOrder {
    pub fn new(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha <= 0.0 || alpha > 2.0 {
            return Err(Error::InvalidOrder(alpha));
        }
        Ok(Self(alpha))
    }

    pub fn alpha(&self) -> f64 {
        self.0
    }

    /// The exponent alpha/2 entering the spectral definition lambda^(alpha/2).
    pub fn half(&self) -> f64 {
        self.0 / 2.0
    }

    pub fn require_below_two(&self) -> Result<()> {
        if self.0 >= 2.0 {
            return Err(Error::OrderNotBelowTwo(self.0));
        }
        Ok(())
    }
}

/// Seeded band-limited random field with coefficient decay |k|^-2.
///
/// Deterministic for a fixed (grid, band, seed) triple; the zero mode is
/// excluded so the field has mean zero, and all modes satisfy |k|_inf <= band.
pub fn random_band_limited(grid: TorusGrid, band: usize, seed: u64) -> ScalarField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let band = band.min(grid.max_resolved_mode());
    match grid.dimension() {
        1 => {
            let mut modes = Vec::new();
            for k in 1..=band {
                let a: f64 = rng.gen_range(-1.0..=1.0);
                let b: f64 = rng.gen_range(-1.0..=1.0);
                let decay = (k as f64).powi(-2);
                modes.push((k as f64, a * decay, b * decay));
            }
            ScalarField::from_fn(grid, |x, _| {
                modes
                    .iter()
                    .map(|&(k, a, b)| a * (k * x).cos() + b * (k * x).sin())
                    .sum()
            })
        }
        _ => {
            // Half-lattice representatives: k1 > 0, or k1 == 0 and k2 > 0.
            let mut modes = Vec::new();
            let b = band as i64;
            for k1 in 0..=b {
                let lo = if k1 == 0 { 1 } else { -b };
                for k2 in lo..=b {
                    let a: f64 = rng.gen_range(-1.0..=1.0);
                    let c: f64 = rng.gen_range(-1.0..=1.0);
                    let norm2 = (k1 * k1 + k2 * k2) as f64;
                    modes.push((k1 as f64, k2 as f64, a / norm2, c / norm2));
                }
            }
            ScalarField::from_fn(grid, |x1, x2| {
                modes
                    .iter()
                    .map(|&(k1, k2, a, c)| {
                        let phase = k1 * x1 + k2 * x2;
                        a * phase.cos() + c * phase.sin()
                    })
                    .sum()
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_rejects_odd_or_tiny_sizes() {
        assert!(TorusGrid::new_1d(7).is_err());
        assert!(TorusGrid::new_1d(9).is_err());
        assert!(TorusGrid::new_1d(4).is_err());
        assert!(TorusGrid::new(3, 16).is_err());
        assert!(TorusGrid::new_1d(8).is_ok());
    }

    #[test]
    fn node_count_and_coordinates() {
        let g = TorusGrid::new_2d(8).unwrap();
        assert_eq!(g.node_count(), 64);
        let [x1, x2] = g.coordinates(8 + 3);
        assert!((x1 - g.spacing()).abs() < 1e-15);
        assert!((x2 - 3.0 * g.spacing()).abs() < 1e-15);
    }

    #[test]
    fn field_rejects_non_finite() {
        let g = TorusGrid::new_1d(8).unwrap();
        let mut v = vec![0.0; 8];
        v[3] = f64::NAN;
        assert!(matches!(
            ScalarField::from_values(g, v),
            Err(Error::NonFiniteValue(3))
        ));
    }

    #[test]
    fn order_bounds() {
        assert!(FractionalOrder::new(0.0).is_err());
        assert!(FractionalOrder::new(2.0 + 1e-12).is_err());
        assert!(FractionalOrder::new(2.0).is_ok());
        assert!(FractionalOrder::new(2.0).unwrap().require_below_two().is_err());
    }

    #[test]
    fn random_field_is_deterministic_and_mean_zero() {
        let g = TorusGrid::new_1d(64).unwrap();
        let f1 = random_band_limited(g, 10, 42);
        let f2 = random_band_limited(g, 10, 42);
        assert_eq!(f1.values(), f2.values());
        assert!(f1.mean().abs() < 1e-13);
        let f3 = random_band_limited(g, 10, 43);
        assert_ne!(f1.values(), f3.values());
    }
}
