//! Internal FFT plumbing: transforms between node values and Fourier
//! coefficients on [`TorusGrid`]s, and multiplier application.
//!
//! Coefficients use the standard FFT layout: index j carries wavenumber
//! j for j <= N/2 and j - N above. All spectra are unnormalized forward
//! transforms; `inverse` divides by the node count.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::grid::{ScalarField, TorusGrid};

pub(crate) fn wavenumber(j: usize, n: usize) -> i64 {
    if j <= n / 2 {
        j as i64
    } else {
        j as i64 - n as i64
    }
}

/// Forward transform of a real field; output length equals node count.
pub(crate) fn forward(field: &ScalarField) -> Vec<Complex<f64>> {
    let grid = field.grid();
    let n = grid.points_per_axis();
    let mut data: Vec<Complex<f64>> = field
        .values()
        .iter()
        .map(|&v| Complex::new(v, 0.0))
        .collect();
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(n);
    match grid.dimension() {
        1 => fft.process(&mut data),
        _ => {
            // Rows (axis 2, contiguous), then columns (axis 1).
            for row in data.chunks_exact_mut(n) {
                fft.process(row);
            }
            let mut col = vec![Complex::default(); n];
            for j2 in 0..n {
                for j1 in 0..n {
                    col[j1] = data[j1 * n + j2];
                }
                fft.process(&mut col);
                for j1 in 0..n {
                    data[j1 * n + j2] = col[j1];
                }
            }
        }
    }
    data
}

/// Inverse transform back to a real field (imaginary parts discarded).
pub(crate) fn inverse(grid: TorusGrid, mut spectrum: Vec<Complex<f64>>) -> ScalarField {
    let n = grid.points_per_axis();
    let mut planner = FftPlanner::new();
    let ifft = planner.plan_fft_inverse(n);
    match grid.dimension() {
        1 => ifft.process(&mut spectrum),
        _ => {
            for row in spectrum.chunks_exact_mut(n) {
                ifft.process(row);
            }
            let mut col = vec![Complex::default(); n];
            for j2 in 0..n {
                for j1 in 0..n {
                    col[j1] = spectrum[j1 * n + j2];
                }
                ifft.process(&mut col);
                for j1 in 0..n {
                    spectrum[j1 * n + j2] = col[j1];
                }
            }
        }
    }
    let scale = 1.0 / grid.node_count() as f64;
    let values = spectrum.iter().map(|c| c.re * scale).collect();
    ScalarField::from_values_unchecked(grid, values)
}

/// Wavenumber vector (k1, k2) of the coefficient at linear index `idx`;
/// k2 = 0 on 1-D grids.
pub(crate) fn mode_of(grid: TorusGrid, idx: usize) -> (i64, i64) {
    let n = grid.points_per_axis();
    match grid.dimension() {
        1 => (wavenumber(idx, n), 0),
        _ => (wavenumber(idx / n, n), wavenumber(idx % n, n)),
    }
}

/// Applies a complex Fourier multiplier in place on a spectrum.
pub(crate) fn apply_symbol(
    grid: TorusGrid,
    spectrum: &mut [Complex<f64>],
    symbol: impl Fn(i64, i64) -> Complex<f64>,
) {
    for (idx, c) in spectrum.iter_mut().enumerate() {
        let (k1, k2) = mode_of(grid, idx);
        *c *= symbol(k1, k2);
    }
}

/// Trigonometric interpolation onto the doubled grid (2N per axis).
/// Band content is preserved exactly; unpaired Nyquist coefficients are
/// split evenly between +N/2 and -N/2 in the refined spectrum.
pub(crate) fn resample_double(field: &ScalarField) -> ScalarField {
    let grid = field.grid();
    let n = grid.points_per_axis();
    let fine = TorusGrid::new(grid.dimension(), 2 * n).expect("doubled grid is valid");
    let coarse_spec = forward(field);
    let n2 = 2 * n;
    let fine_len = fine.node_count();
    let mut fine_spec = vec![Complex::new(0.0, 0.0); fine_len];
    let splits = |k: i64| -> Vec<(i64, f64)> {
        if k.unsigned_abs() as usize == n / 2 {
            vec![(n as i64 / 2, 0.5), (-(n as i64) / 2, 0.5)]
        } else {
            vec![(k, 1.0)]
        }
    };
    let wrap = |k: i64| -> usize { k.rem_euclid(n2 as i64) as usize };
    let gain = (fine_len / grid.node_count()) as f64;
    for (idx, &c) in coarse_spec.iter().enumerate() {
        if c.norm_sqr() == 0.0 {
            continue;
        }
        let (k1, k2) = mode_of(grid, idx);
        match grid.dimension() {
            1 => {
                for (k1p, w1) in splits(k1) {
                    fine_spec[wrap(k1p)] += c * w1 * gain;
                }
            }
            _ => {
                for (k1p, w1) in splits(k1) {
                    for (k2p, w2) in splits(k2) {
                        fine_spec[wrap(k1p) * n2 + wrap(k2p)] += c * w1 * w2 * gain;
                    }
                }
            }
        }
    }
    inverse(fine, fine_spec)
}

/// Largest |k|_inf carried by coefficients above a relative threshold.
pub(crate) fn spectral_band(field: &ScalarField) -> usize {
    let spectrum = forward(field);
    let peak = spectrum.iter().fold(0.0_f64, |m, c| m.max(c.norm()));
    if peak == 0.0 {
        return 0;
    }
    let mut band = 0usize;
    for (idx, c) in spectrum.iter().enumerate() {
        if c.norm() > 1e-12 * peak {
            let (k1, k2) = mode_of(field.grid(), idx);
            band = band.max(k1.unsigned_abs().max(k2.unsigned_abs()) as usize);
        }
    }
    band
}
