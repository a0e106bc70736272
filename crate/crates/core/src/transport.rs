//! Pseudo-spectral solver for the dissipative transport equation
//! `theta_t + u . grad theta = -kappa Lambda^alpha theta` on T^1 / T^2,
//! including the SQG velocity law u = (-R_2 theta, R_1 theta), with
//! L^p-decay monitoring.
//!
//! Time stepping is integrating-factor RK4: the stiff diffusion
//! `exp(-kappa |k|^alpha dt)` is applied exactly in transform space, so pure
//! diffusion runs reproduce the spectral decay to round-off and the
//! inequality physics is isolated from stiffness error. The quadratic
//! advection term is dealiased by the 2/3 rule.

use rustfft::num_complex::Complex;

use crate::error::{Error, Result};
use crate::fft;
use crate::grid::{FractionalOrder, ScalarField, TorusGrid};
use crate::report::{CheckMetadata, InequalityReport};
use crate::torus::riesz_transform;

/// Velocity law for the advection term.
#[derive(Debug, Clone)]
pub enum VelocityMode {
    /// Pure diffusion.
    None,
    /// Fixed divergence-free velocity (2-D grids).
    Prescribed { u1: ScalarField, u2: ScalarField },
    /// Surface quasi-geostrophic law u = (-R_2 theta, R_1 theta).
    Sqg,
}

#[derive(Debug, Clone)]
pub struct TransportConfig {
    pub grid: TorusGrid,
    pub order: FractionalOrder,
    pub kappa: f64,
    pub velocity: VelocityMode,
    pub dt: f64,
    pub final_time: f64,
    /// 2/3-rule dealiasing of the advection product (default on).
    pub dealias: bool,
}

impl TransportConfig {
    pub fn new(
        grid: TorusGrid,
        order: FractionalOrder,
        kappa: f64,
        velocity: VelocityMode,
        dt: f64,
        final_time: f64,
    ) -> Result<Self> {
        if !(kappa >= 0.0) || !kappa.is_finite() {
            return Err(Error::Parse(format!("kappa {kappa} must be >= 0")));
        }
        if !(dt > 0.0) || !(final_time >= 0.0) {
            return Err(Error::Parse(format!(
                "bad time parameters dt = {dt}, T = {final_time}"
            )));
        }
        match &velocity {
            VelocityMode::None => {}
            VelocityMode::Sqg => {
                if grid.dimension() != 2 {
                    return Err(Error::WrongDomain("SQG velocity needs a 2-D grid".into()));
                }
            }
            VelocityMode::Prescribed { u1, u2 } => {
                if grid.dimension() != 2 {
                    return Err(Error::WrongDomain(
                        "prescribed velocity needs a 2-D grid".into(),
                    ));
                }
                if u1.grid() != grid || u2.grid() != grid {
                    return Err(Error::NodeCountMismatch {
                        got: u1.values().len(),
                        expected: grid.node_count(),
                    });
                }
                let div = spectral_divergence_sup(u1, u2)?;
                if div > 1e-10 {
                    return Err(Error::Parse(format!(
                        "prescribed velocity has spectral divergence {div:.3e}"
                    )));
                }
            }
        }
        Ok(Self {
            grid,
            order,
            kappa,
            velocity,
            dt,
            final_time,
            dealias: true,
        })
    }
}

/// SQG velocity (u1, u2) = (-R_2 theta, R_1 theta). Divergence-free by the
/// symbol identity k_1 (-k_2) + k_2 k_1 = 0; both components mean-zero.
pub fn sqg_velocity(theta: &ScalarField) -> Result<(ScalarField, ScalarField)> {
    let r2 = riesz_transform(theta, 2)?;
    let r1 = riesz_transform(theta, 1)?;
    let u1 = r2.map(|v| -v);
    Ok((u1, r1))
}

/// Sup-norm of the spectral divergence of a velocity field.
pub fn spectral_divergence_sup(u1: &ScalarField, u2: &ScalarField) -> Result<f64> {
    let grid = u1.grid();
    let mut s1 = fft::forward(u1);
    let mut s2 = fft::forward(u2);
    let nyquist = (grid.points_per_axis() / 2) as i64;
    let deriv = |k: i64| -> Complex<f64> {
        if k.abs() == nyquist {
            Complex::new(0.0, 0.0)
        } else {
            Complex::new(0.0, k as f64)
        }
    };
    fft::apply_symbol(grid, &mut s1, |k1, _| deriv(k1));
    fft::apply_symbol(grid, &mut s2, |_, k2| deriv(k2));
    for (a, b) in s1.iter_mut().zip(&s2) {
        *a += b;
    }
    Ok(fft::inverse(grid, s1).sup_norm())
}

/// 2/3-rule mask: zeroes modes with any |k_i| above N/3.
fn dealias_mask(grid: TorusGrid, spectrum: &mut [Complex<f64>]) {
    let cutoff = (grid.points_per_axis() / 3) as i64;
    fft::apply_symbol(grid, spectrum, |k1, k2| {
        if k1.abs() > cutoff || k2.abs() > cutoff {
            Complex::new(0.0, 0.0)
        } else {
            Complex::new(1.0, 0.0)
        }
    });
}

/// -(u . grad theta) in transform space, evaluated pseudo-spectrally.
/// Returns an error on a CFL violation at the current velocity.
fn advection_term(
    config: &TransportConfig,
    theta_hat: &[Complex<f64>],
) -> Result<Vec<Complex<f64>>> {
    let grid = config.grid;
    if matches!(config.velocity, VelocityMode::None) {
        return Ok(vec![Complex::new(0.0, 0.0); theta_hat.len()]);
    }
    let theta = fft::inverse(grid, theta_hat.to_vec());
    let (u1, u2) = match &config.velocity {
        VelocityMode::None => unreachable!(),
        VelocityMode::Prescribed { u1, u2 } => (u1.clone(), u2.clone()),
        VelocityMode::Sqg => sqg_velocity(&theta)?,
    };
    let max_u = u1
        .values()
        .iter()
        .zip(u2.values())
        .map(|(a, b)| (a * a + b * b).sqrt())
        .fold(0.0_f64, f64::max);
    let limit = grid.spacing() / (2.0 * max_u.max(1e-300));
    if config.dt > limit {
        return Err(Error::CflViolation {
            dt: config.dt,
            limit,
            max_u,
        });
    }
    let nyquist = (grid.points_per_axis() / 2) as i64;
    let deriv = |k: i64| -> Complex<f64> {
        if k.abs() == nyquist {
            Complex::new(0.0, 0.0)
        } else {
            Complex::new(0.0, k as f64)
        }
    };
    let mut gx = theta_hat.to_vec();
    fft::apply_symbol(grid, &mut gx, |k1, _| deriv(k1));
    let mut gy = theta_hat.to_vec();
    fft::apply_symbol(grid, &mut gy, |_, k2| deriv(k2));
    let gx = fft::inverse(grid, gx);
    let gy = fft::inverse(grid, gy);
    let product: Vec<f64> = u1
        .values()
        .iter()
        .zip(u2.values())
        .zip(gx.values().iter().zip(gy.values()))
        .map(|((a, b), (dx, dy))| -(a * dx + b * dy))
        .collect();
    let mut spectrum = fft::forward(&ScalarField::from_values_unchecked(grid, product));
    if config.dealias {
        dealias_mask(grid, &mut spectrum);
    }
    Ok(spectrum)
}

/// One integrating-factor RK4 step.
pub fn step(state: &ScalarField, config: &TransportConfig) -> Result<ScalarField> {
    state.check_finite()?;
    let grid = config.grid;
    if state.grid() != grid {
        return Err(Error::NodeCountMismatch {
            got: state.values().len(),
            expected: grid.node_count(),
        });
    }
    let mut theta_hat = fft::forward(state);
    if config.dealias {
        dealias_mask(grid, &mut theta_hat);
    }
    let dt = config.dt;
    let half = config.order.half();
    let damp = |t: f64| -> Vec<f64> {
        (0..theta_hat.len())
            .map(|idx| {
                let (k1, k2) = fft::mode_of(grid, idx);
                let k2norm = (k1 * k1 + k2 * k2) as f64;
                (-config.kappa * k2norm.powf(half) * t).exp()
            })
            .collect()
    };
    let e_half = damp(dt / 2.0);
    let e_full = damp(dt);
    let mul = |v: &[Complex<f64>], e: &[f64]| -> Vec<Complex<f64>> {
        v.iter().zip(e).map(|(c, d)| c * d).collect()
    };
    let axpy = |v: &[Complex<f64>], s: f64, w: &[Complex<f64>]| -> Vec<Complex<f64>> {
        v.iter().zip(w).map(|(a, b)| a + b * s).collect()
    };

    let k1 = advection_term(config, &theta_hat)?;
    let k2 = advection_term(config, &mul(&axpy(&theta_hat, dt / 2.0, &k1), &e_half))?;
    let k3 = advection_term(config, &axpy(&mul(&theta_hat, &e_half), dt / 2.0, &k2))?;
    let k4 = advection_term(
        config,
        &axpy(&mul(&theta_hat, &e_full), dt, &mul(&k3, &e_half)),
    )?;

    let mut next = mul(&theta_hat, &e_full);
    for (i, slot) in next.iter_mut().enumerate() {
        let incr = k1[i] * e_full[i] + (k2[i] + k3[i]) * (2.0 * e_half[i]) + k4[i];
        *slot += incr * (dt / 6.0);
    }
    let out = fft::inverse(grid, next);
    out.check_finite().map_err(|_| Error::NonFiniteState(0))?;
    Ok(out)
}

/// Snapshots of a transport run, carrying the run's fractional order for
/// downstream decay reports.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub snapshots: Vec<ScalarField>,
    pub alpha: f64,
}

/// Integrates to `final_time`, recording a bounded number of snapshots
/// (cadence every max(1, floor(T / (100 dt))) steps, plus the endpoints).
pub fn run(config: &TransportConfig, theta0: &ScalarField) -> Result<Trajectory> {
    let steps = (config.final_time / config.dt).ceil() as usize;
    let cadence = (steps / 100).max(1);
    let mut times = vec![0.0];
    let mut snapshots = vec![theta0.clone()];
    let mut state = theta0.clone();
    for n in 1..=steps {
        state = step(&state, config).map_err(|e| match e {
            Error::NonFiniteState(_) => Error::NonFiniteState(n),
            other => other,
        })?;
        if n % cadence == 0 || n == steps {
            times.push(n as f64 * config.dt);
            snapshots.push(state.clone());
        }
    }
    Ok(Trajectory {
        times,
        snapshots,
        alpha: config.order.alpha(),
    })
}

/// L^p exponent choices of the decay monitor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpExponent {
    Even(u32),
    /// sup-norm proxy for p = infinity
    SupProxy,
}

/// Norm history of a trajectory with the maximum-principle verdict and a
/// fitted tail exponent for qualitative comparison against the closed decay
/// form (whose constant is not reproducible).
#[derive(Debug, Clone)]
pub struct DecayMonitor {
    pub exponent: LpExponent,
    pub times: Vec<f64>,
    pub norms: Vec<f64>,
    /// delta = alpha / (2 (p - 1)); None for the sup proxy.
    pub delta: Option<f64>,
    /// Least-squares slope of log norm vs log time over the tail half.
    pub fitted_exponent: Option<f64>,
    /// Slope the closed decay form approaches at large time, -1/(p delta).
    pub reference_exponent: Option<f64>,
    pub pass: bool,
}

pub fn lp_decay_report(trajectory: &Trajectory, p: LpExponent) -> Result<DecayMonitor> {
    if trajectory.snapshots.len() < 3 {
        return Err(Error::TooFewSnapshots {
            got: trajectory.snapshots.len(),
            need: 3,
        });
    }
    let norms: Vec<f64> = trajectory
        .snapshots
        .iter()
        .map(|s| match p {
            LpExponent::Even(pe) => {
                if pe % 2 != 0 || pe == 0 {
                    f64::NAN
                } else {
                    s.lp_norm(pe as f64)
                }
            }
            LpExponent::SupProxy => s.sup_norm(),
        })
        .collect();
    if let LpExponent::Even(pe) = p {
        if pe % 2 != 0 || pe == 0 {
            return Err(Error::OddExponent(pe));
        }
    }
    let slack = 1e-10 * norms[0];
    let pass = norms.windows(2).all(|w| w[1] <= w[0] + slack);
    let (delta, reference_exponent) = match p {
        LpExponent::Even(pe) => {
            let delta = trajectory.alpha / (2.0 * (pe as f64 - 1.0));
            (Some(delta), Some(-1.0 / (pe as f64 * delta)))
        }
        LpExponent::SupProxy => (None, None),
    };
    // log-log fit over the tail half of the positive-time snapshots
    let tail: Vec<(f64, f64)> = trajectory
        .times
        .iter()
        .zip(&norms)
        .skip(trajectory.times.len() / 2)
        .filter(|(&t, &n)| t > 0.0 && n > 0.0)
        .map(|(&t, &n)| (t.ln(), n.ln()))
        .collect();
    let fitted_exponent = if tail.len() >= 2 {
        let n = tail.len() as f64;
        let sx: f64 = tail.iter().map(|(x, _)| x).sum();
        let sy: f64 = tail.iter().map(|(_, y)| y).sum();
        let sxx: f64 = tail.iter().map(|(x, _)| x * x).sum();
        let sxy: f64 = tail.iter().map(|(x, y)| x * y).sum();
        let denom = n * sxx - sx * sx;
        if denom.abs() > 1e-12 {
            Some((n * sxy - sx * sy) / denom)
        } else {
            None
        }
    } else {
        None
    };
    Ok(DecayMonitor {
        exponent: p,
        times: trajectory.times.clone(),
        norms,
        delta,
        fitted_exponent,
        reference_exponent,
        pass,
    })
}

/// Quadrature sign check of the dissipation integral
/// `int theta^{p-1} Lambda^alpha theta >= -1e-8` for even p, the integrated
/// consequence of the pointwise inequality with phi = x^p.
pub fn dissipation_sign_check(
    theta: &ScalarField,
    order: FractionalOrder,
    p: u32,
) -> Result<InequalityReport> {
    if p == 0 || p % 2 != 0 {
        return Err(Error::OddExponent(p));
    }
    theta.check_finite()?;
    let grid = theta.grid();
    let band = fft::spectral_band(theta);
    let resolvable = grid.max_resolved_mode();
    if band.saturating_mul((p - 1) as usize) > resolvable {
        return Err(Error::AliasingPrecondition {
            band,
            factor: (p - 1) as usize,
            resolvable,
        });
    }
    let lap = crate::torus::apply_fractional_laplacian(theta, order)?;
    let w = grid.quadrature_weight();
    let integral: f64 = theta
        .values()
        .iter()
        .zip(lap.values())
        .map(|(t, l)| t.powi(p as i32 - 1) * l)
        .sum::<f64>()
        * w;
    let metadata = CheckMetadata::new("transport_sim", "dissipation_sign_check")
        .operator(&format!(
            "torus[n={},N={}]",
            grid.dimension(),
            grid.points_per_axis()
        ))
        .alpha(order.alpha())
        .phi(&format!("x^{p}"));
    let mut report = InequalityReport::new(-integral, 0, 1e-8, metadata);
    report.details.push(("integral".into(), integral));
    if p == 2 {
        // Parseval route for the quadratic case:
        // sum_x h^n theta Lambda theta = (h^n / n_nodes) sum_k |k|^alpha |c_k|^2
        let spectrum = fft::forward(theta);
        let scale = w / grid.node_count() as f64;
        let spectral: f64 = spectrum
            .iter()
            .enumerate()
            .map(|(idx, c)| {
                let (k1, k2) = fft::mode_of(grid, idx);
                let k2norm = (k1 * k1 + k2 * k2) as f64;
                k2norm.powf(order.half()) * c.norm_sqr()
            })
            .sum::<f64>()
            * scale;
        report.details.push(("parseval".into(), spectral));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::random_band_limited;
    use std::f64::consts::PI;

    fn order(a: f64) -> FractionalOrder {
        FractionalOrder::new(a).unwrap()
    }

    #[test]
    fn sqg_velocity_single_mode() {
        let grid = TorusGrid::new_2d(32).unwrap();
        let theta = ScalarField::from_fn(grid, |x1, _| x1.cos());
        let (u1, u2) = sqg_velocity(&theta).unwrap();
        assert!(u1.sup_norm() < 1e-12, "R2 annihilates k2 = 0 modes");
        for (i, v) in u2.values().iter().enumerate() {
            let x1 = grid.coordinates(i)[0];
            assert!((v - x1.sin()).abs() < 1e-12);
        }
        assert!(u1.mean().abs() < 1e-13 && u2.mean().abs() < 1e-13);
    }

    #[test]
    fn sqg_velocity_is_divergence_free() {
        let grid = TorusGrid::new_2d(64).unwrap();
        let theta = random_band_limited(grid, 12, 17);
        let (u1, u2) = sqg_velocity(&theta).unwrap();
        assert!(spectral_divergence_sup(&u1, &u2).unwrap() < 1e-12);
    }

    #[test]
    fn sqg_velocity_of_constant_vanishes() {
        let grid = TorusGrid::new_2d(16).unwrap();
        let theta = ScalarField::constant(grid, 4.0);
        let (u1, u2) = sqg_velocity(&theta).unwrap();
        assert!(u1.sup_norm() < 1e-13 && u2.sup_norm() < 1e-13);
    }

    #[test]
    fn pure_diffusion_matches_exact_multiplier_decay() {
        let grid = TorusGrid::new_1d(64).unwrap();
        let kappa = 0.3;
        let a = order(1.5);
        let config = TransportConfig::new(grid, a, kappa, VelocityMode::None, 0.01, 0.0).unwrap();
        let theta0 = ScalarField::from_fn(grid, |x, _| (2.0 * x).cos() - 0.5 * (7.0 * x).sin());
        let mut state = theta0.clone();
        let steps = 25;
        for _ in 0..steps {
            state = step(&state, &config).unwrap();
        }
        let t = steps as f64 * config.dt;
        for (i, v) in state.values().iter().enumerate() {
            let x = grid.coordinates(i)[0];
            let exact = (-kappa * 2.0_f64.powf(1.5) * t).exp() * (2.0 * x).cos()
                - 0.5 * (-kappa * 7.0_f64.powf(1.5) * t).exp() * (7.0 * x).sin();
            assert!((v - exact).abs() < 1e-8, "node {i}: {v} vs {exact}");
        }
    }

    #[test]
    fn zero_state_stays_zero() {
        let grid = TorusGrid::new_2d(16).unwrap();
        let config =
            TransportConfig::new(grid, order(1.0), 0.1, VelocityMode::Sqg, 0.01, 0.0).unwrap();
        let state = step(&ScalarField::zeros(grid), &config).unwrap();
        assert!(state.sup_norm() == 0.0);
    }

    #[test]
    fn no_dissipation_no_velocity_is_identity() {
        let grid = TorusGrid::new_1d(32).unwrap();
        let config =
            TransportConfig::new(grid, order(1.0), 0.0, VelocityMode::None, 0.01, 0.0).unwrap();
        let theta0 = ScalarField::from_fn(grid, |x, _| (3.0 * x).sin());
        let state = step(&theta0, &config).unwrap();
        for (a, b) in state.values().iter().zip(theta0.values()) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn mean_is_conserved() {
        let grid = TorusGrid::new_2d(64).unwrap();
        let theta0 = random_band_limited(grid, 10, 3).map(|v| v + 0.37);
        let config =
            TransportConfig::new(grid, order(1.5), 0.1, VelocityMode::Sqg, 0.005, 0.0).unwrap();
        let mut state = theta0.clone();
        for _ in 0..20 {
            state = step(&state, &config).unwrap();
        }
        assert!((state.mean() - theta0.mean()).abs() < 1e-12);
    }

    #[test]
    fn inviscid_prescribed_advection_conserves_l2() {
        let grid = TorusGrid::new_2d(64).unwrap();
        let u1 = ScalarField::from_fn(grid, |x1, x2| -(x1.sin() * x2.cos()));
        let u2 = ScalarField::from_fn(grid, |x1, x2| x1.cos() * x2.sin());
        let theta0 = random_band_limited(grid, 8, 5);
        let config = TransportConfig::new(
            grid,
            order(1.0),
            0.0,
            VelocityMode::Prescribed { u1, u2 },
            0.002,
            0.0,
        )
        .unwrap();
        let l2_0 = theta0.lp_norm(2.0);
        let mut state = theta0;
        for _ in 0..100 {
            state = step(&state, &config).unwrap();
        }
        let drift = (state.lp_norm(2.0) - l2_0).abs() / l2_0;
        assert!(drift < 1e-6, "L2 drift {drift}");
    }

    #[test]
    fn cfl_violation_is_reported_with_velocity() {
        let grid = TorusGrid::new_2d(32).unwrap();
        let u1 = ScalarField::from_fn(grid, |_, x2| -(8.0 * x2.cos()));
        let u2 = ScalarField::from_fn(grid, |x1, _| 8.0 * x1.cos());
        let theta0 = random_band_limited(grid, 4, 1);
        let config = TransportConfig::new(
            grid,
            order(1.0),
            0.0,
            VelocityMode::Prescribed { u1, u2 },
            0.05,
            0.0,
        )
        .unwrap();
        match step(&theta0, &config) {
            Err(Error::CflViolation { max_u, .. }) => assert!(max_u > 7.0),
            other => panic!("expected CFL violation, got {other:?}"),
        }
    }

    #[test]
    fn prescribed_velocity_must_be_divergence_free() {
        let grid = TorusGrid::new_2d(32).unwrap();
        let u1 = ScalarField::from_fn(grid, |x1, _| x1.cos());
        let u2 = ScalarField::zeros(grid);
        assert!(TransportConfig::new(
            grid,
            order(1.0),
            0.0,
            VelocityMode::Prescribed { u1, u2 },
            0.01,
            0.0
        )
        .is_err());
    }

    #[test]
    fn decay_report_zero_trajectory_passes() {
        let grid = TorusGrid::new_1d(32).unwrap();
        let traj = Trajectory {
            times: vec![0.0, 0.1, 0.2, 0.3],
            snapshots: vec![ScalarField::zeros(grid); 4],
            alpha: 1.0,
        };
        let monitor = lp_decay_report(&traj, LpExponent::Even(2)).unwrap();
        assert!(monitor.pass);
        assert!(monitor.norms.iter().all(|&n| n == 0.0));
    }

    #[test]
    fn decay_report_needs_three_snapshots() {
        let grid = TorusGrid::new_1d(32).unwrap();
        let traj = Trajectory {
            times: vec![0.0, 0.1],
            snapshots: vec![ScalarField::zeros(grid); 2],
            alpha: 1.0,
        };
        assert!(matches!(
            lp_decay_report(&traj, LpExponent::Even(2)),
            Err(Error::TooFewSnapshots { .. })
        ));
    }

    #[test]
    fn single_mode_diffusion_norms_match_exact_decay() {
        let grid = TorusGrid::new_1d(64).unwrap();
        let kappa = 0.4;
        let k = 3.0_f64;
        let a = order(1.0);
        let theta0 = ScalarField::from_fn(grid, |x, _| (k * x).cos());
        let config = TransportConfig::new(grid, a, kappa, VelocityMode::None, 0.01, 0.5).unwrap();
        let traj = run(&config, &theta0).unwrap();
        let monitor = lp_decay_report(&traj, LpExponent::Even(2)).unwrap();
        assert!(monitor.pass);
        let l2_0 = theta0.lp_norm(2.0);
        for (t, n) in monitor.times.iter().zip(&monitor.norms) {
            let exact = l2_0 * (-kappa * k * t).exp();
            assert!((n - exact).abs() < 1e-8, "t = {t}: {n} vs {exact}");
        }
        assert_eq!(monitor.delta, Some(0.5));
    }

    #[test]
    fn sqg_short_run_norms_nonincreasing() {
        let grid = TorusGrid::new_2d(64).unwrap();
        let theta0 = random_band_limited(grid, 8, 21);
        let config =
            TransportConfig::new(grid, order(1.5), 0.1, VelocityMode::Sqg, 0.005, 0.25).unwrap();
        let traj = run(&config, &theta0).unwrap();
        for p in [LpExponent::Even(2), LpExponent::Even(4), LpExponent::SupProxy] {
            let monitor = lp_decay_report(&traj, p).unwrap();
            assert!(monitor.pass, "{p:?}: {:?}", monitor.norms);
        }
    }

    #[test]
    fn dissipation_sign_quadratic_matches_parseval() {
        let grid = TorusGrid::new_1d(128).unwrap();
        let theta = random_band_limited(grid, 20, 8);
        let report = dissipation_sign_check(&theta, order(1.0), 2).unwrap();
        assert!(report.pass);
        let quad = report.detail("integral").unwrap();
        let spectral = report.detail("parseval").unwrap();
        assert!(
            (quad - spectral).abs() <= 1e-10 * quad.abs().max(1.0),
            "{quad} vs {spectral}"
        );
        assert!(quad >= 0.0);
    }

    #[test]
    fn dissipation_sign_eigenmode_quartic_oracle() {
        // theta = cos(3x), p = 4, alpha = 1: integral of cos^3(3x) * 3 cos(3x)
        // over the period is 3 * (3/8) * 2 pi = 9 pi / 4.
        let grid = TorusGrid::new_1d(128).unwrap();
        let theta = ScalarField::from_fn(grid, |x, _| (3.0 * x).cos());
        let report = dissipation_sign_check(&theta, order(1.0), 4).unwrap();
        let integral = report.detail("integral").unwrap();
        assert!((integral - 9.0 * PI / 4.0).abs() < 1e-10, "{integral}");
    }

    #[test]
    fn dissipation_sign_random_fields() {
        let grid = TorusGrid::new_1d(256).unwrap();
        for (p, a, seed) in [(4u32, 0.5, 1u64), (6, 1.0, 2), (8, 1.5, 3)] {
            let theta = random_band_limited(grid, 15, seed);
            let report = dissipation_sign_check(&theta, order(a), p).unwrap();
            assert!(report.pass, "p={p}, alpha={a}: {}", report.max_violation);
        }
    }

    #[test]
    fn dissipation_sign_rejects_odd_p_and_aliasing() {
        let grid = TorusGrid::new_1d(64).unwrap();
        let theta = random_band_limited(grid, 8, 4);
        assert!(matches!(
            dissipation_sign_check(&theta, order(1.0), 3),
            Err(Error::OddExponent(3))
        ));
        let wide = random_band_limited(grid, 30, 4);
        assert!(matches!(
            dissipation_sign_check(&wide, order(1.0), 8),
            Err(Error::AliasingPrecondition { .. })
        ));
    }
}
