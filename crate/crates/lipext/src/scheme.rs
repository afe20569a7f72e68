//! Monotone epsilon-ball schemes as fixed-point iterations.
//!
//! Writing `m` and `M` for the min and max of the current iterate over the
//! punctured ball neighborhood of an interior node `x`, the three update
//! rules are the closed-form solutions of the discrete equations:
//!
//! - gradient-constrained lower equation:
//!   `min{ (v - m - eps*lambda)/eps, (2v - M - m)/eps^2 } = 0`
//!   has the unique solution `v = max(m + eps*lambda, (M + m)/2)`;
//! - gradient-constrained upper equation:
//!   `max{ (v - M + eps*lambda)/eps, (2v - M - m)/eps^2 } = 0`
//!   has the unique solution `v = min(M - eps*lambda, (M + m)/2)`;
//! - infinity-harmonic: `v = (M + m)/2`.
//!
//! The update takes extrema over the punctured neighborhood so that the
//! fixed point has this explicit form; the convergence certificate is the
//! center-included residual, which vanishes at the same fixed points (see
//! [`discrete_residual`]). Every update is nondecreasing in `m` and `M`,
//! which makes the sweeps order-preserving and nonexpansive.
//!
//! Boundary nodes are pinned to the boundary data throughout. Iteration
//! stops when the sup-norm change of a sweep and the max interior residual
//! are both below their tolerances.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::Serialize;

use crate::extension::{mcshane_extension, whitney_extension, ExtensionParams};
use crate::grid::{BallStencil, BoundaryData, ScalarField};
use crate::{Error, Result};

/// Which equation the scheme solves.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Equation {
    /// `min{ |grad u| - lambda, -(infinity Laplacian of u) } = 0`.
    JensenMin,
    /// `max{ lambda - |grad u|, -(infinity Laplacian of u) } = 0`.
    JensenMax,
    /// `-(infinity Laplacian of u) = 0`.
    InfHarmonic,
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Equation::JensenMin => write!(f, "jensen-min"),
            Equation::JensenMax => write!(f, "jensen-max"),
            Equation::InfHarmonic => write!(f, "inf-harmonic"),
        }
    }
}

impl FromStr for Equation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "min" | "jensen-min" => Ok(Equation::JensenMin),
            "max" | "jensen-max" => Ok(Equation::JensenMax),
            "inf" | "inf-harmonic" => Ok(Equation::InfHarmonic),
            _ => Err(Error::InvalidConfig(format!("unknown equation {:?}", s))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepOrder {
    Jacobi,
    GaussSeidel,
}

impl FromStr for SweepOrder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "jacobi" => Ok(SweepOrder::Jacobi),
            "gs" | "gauss-seidel" => Ok(SweepOrder::GaussSeidel),
            _ => Err(Error::InvalidConfig(format!("unknown sweep order {:?}", s))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InitStrategy {
    Whitney,
    McShane,
    Midpoint,
    Zero,
}

impl FromStr for InitStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "whitney" => Ok(InitStrategy::Whitney),
            "mcshane" => Ok(InitStrategy::McShane),
            "midpoint" => Ok(InitStrategy::Midpoint),
            "zero" => Ok(InitStrategy::Zero),
            _ => Err(Error::InvalidConfig(format!("unknown init strategy {:?}", s))),
        }
    }
}

/// Solver parameters.
#[derive(Clone, Debug)]
pub struct SchemeConfig {
    pub equation: Equation,
    pub lambda: f64,
    /// Ball radius, in length units (typically a multiple of the spacing).
    pub eps: f64,
    /// Sup-norm successive-change threshold.
    pub tol_change: f64,
    /// Max interior centered-residual threshold.
    pub tol_residual: f64,
    pub max_iter: u64,
    pub sweep: SweepOrder,
    /// `None` picks the per-equation default: whitney for the lower
    /// equation, mcshane for the upper one, their midpoint for the
    /// infinity-harmonic equation.
    pub init: Option<InitStrategy>,
}

impl SchemeConfig {
    pub fn new(equation: Equation, lambda: f64, eps: f64) -> Self {
        SchemeConfig {
            equation,
            lambda,
            eps,
            tol_change: 1e-10,
            tol_residual: 1e-9,
            max_iter: 1_000_000,
            sweep: SweepOrder::GaussSeidel,
            init: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.lambda.is_finite() || self.lambda < 0.0 {
            return Err(Error::InvalidConfig("lambda must be nonnegative".into()));
        }
        if !self.eps.is_finite() || self.eps <= 0.0 {
            return Err(Error::InvalidConfig("eps must be positive".into()));
        }
        if self.tol_change <= 0.0 || self.tol_residual <= 0.0 {
            return Err(Error::InvalidConfig("tolerances must be positive".into()));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidConfig("max_iter must be at least 1".into()));
        }
        Ok(())
    }

    pub fn effective_init(&self) -> InitStrategy {
        self.init.unwrap_or(match self.equation {
            Equation::JensenMin => InitStrategy::Whitney,
            Equation::JensenMax => InitStrategy::McShane,
            Equation::InfHarmonic => InitStrategy::Midpoint,
        })
    }
}

/// Convergence diagnostics of a solve.
#[derive(Clone, Debug, Serialize)]
pub struct SolveReport {
    pub iterations: u64,
    pub final_change: f64,
    pub final_residual: f64,
    pub converged: bool,
    pub seconds: f64,
}

/// Update for the lower equation: `max(m + eps*lambda, (M + m)/2)`.
#[inline]
pub fn jensen_min_update(m: f64, big_m: f64, lambda: f64, eps: f64) -> f64 {
    assert!(m <= big_m, "ball extrema out of order: {} > {}", m, big_m);
    (m + eps * lambda).max(0.5 * (big_m + m))
}

/// Update for the upper equation: `min(M - eps*lambda, (M + m)/2)`.
#[inline]
pub fn jensen_max_update(m: f64, big_m: f64, lambda: f64, eps: f64) -> f64 {
    assert!(m <= big_m, "ball extrema out of order: {} > {}", m, big_m);
    (big_m - eps * lambda).min(0.5 * (big_m + m))
}

/// Midpoint update for the infinity-harmonic equation: `(M + m)/2`.
#[inline]
pub fn inf_harmonic_update(m: f64, big_m: f64) -> f64 {
    assert!(m <= big_m, "ball extrema out of order: {} > {}", m, big_m);
    0.5 * (big_m + m)
}

#[inline]
fn update_value(eq: Equation, m: f64, big_m: f64, lambda: f64, eps: f64) -> f64 {
    match eq {
        Equation::JensenMin => jensen_min_update(m, big_m, lambda, eps),
        Equation::JensenMax => jensen_max_update(m, big_m, lambda, eps),
        Equation::InfHarmonic => inf_harmonic_update(m, big_m),
    }
}

/// Scheme residual at an interior node. With `centered = false` the extrema
/// are taken over the punctured neighborhood (matching the fixed point of
/// the update rules); with `centered = true` the node's own value is
/// included, which is the form used as the convergence certificate.
pub fn discrete_residual(
    u: &ScalarField,
    id: usize,
    stencil: &BallStencil,
    equation: Equation,
    lambda: f64,
    centered: bool,
) -> f64 {
    let (mut m, mut big_m) = stencil.extrema(u, id);
    let ux = u.value(id);
    if centered {
        if ux < m {
            m = ux;
        }
        if ux > big_m {
            big_m = ux;
        }
    }
    let eps = stencil.eps();
    // terms are grouped so that the residual is exactly odd under
    // (u, m, M) -> (-u, -M, -m), and exactly -lambda on constant fields
    let second = (2.0 * ux - (big_m + m)) / (eps * eps);
    match equation {
        Equation::JensenMin => ((ux - m) / eps - lambda).min(second),
        Equation::JensenMax => ((ux - big_m) / eps + lambda).max(second),
        Equation::InfHarmonic => second,
    }
}

/// Max of `|discrete_residual|` over the interior.
pub fn max_abs_residual(
    u: &ScalarField,
    stencil: &BallStencil,
    equation: Equation,
    lambda: f64,
    centered: bool,
) -> f64 {
    u.domain()
        .interior()
        .iter()
        .map(|&id| discrete_residual(u, id as usize, stencil, equation, lambda, centered).abs())
        .fold(0.0, f64::max)
}

fn initial_field(data: &BoundaryData, cfg: &SchemeConfig) -> Result<ScalarField> {
    let params = ExtensionParams::new(cfg.lambda)?;
    let mut u = match cfg.effective_init() {
        InitStrategy::Whitney => whitney_extension(data, params),
        InitStrategy::McShane => mcshane_extension(data, params),
        InitStrategy::Midpoint => {
            let up = mcshane_extension(data, params);
            let low = whitney_extension(data, params);
            up.zip_map(&low, |a, b| 0.5 * (a + b))
        }
        InitStrategy::Zero => ScalarField::zeros(data.domain()),
    };
    for (id, fz) in data.iter() {
        u.set(id, fz);
    }
    Ok(u)
}

fn gauss_seidel_sweep(
    u: &mut ScalarField,
    stencil: &BallStencil,
    cfg: &SchemeConfig,
    forward: bool,
) -> f64 {
    let domain = u.domain().clone();
    let interior = domain.interior();
    let n = interior.len();
    let mut change = 0.0f64;
    for k in 0..n {
        let id = interior[if forward { k } else { n - 1 - k }] as usize;
        let (m, big_m) = stencil.extrema(u, id);
        let new = update_value(cfg.equation, m, big_m, cfg.lambda, cfg.eps);
        let delta = (new - u.value(id)).abs();
        if delta > change {
            change = delta;
        }
        u.set(id, new);
    }
    change
}

fn jacobi_sweep(
    u: &mut ScalarField,
    scratch: &mut Vec<f64>,
    stencil: &BallStencil,
    cfg: &SchemeConfig,
    threads: usize,
) -> f64 {
    let domain = u.domain().clone();
    let interior = domain.interior();
    let n = interior.len();
    scratch.resize(n, 0.0);
    if threads <= 1 || n < 2 * threads {
        for (pos, &id) in interior.iter().enumerate() {
            let (m, big_m) = stencil.extrema(u, id as usize);
            scratch[pos] = update_value(cfg.equation, m, big_m, cfg.lambda, cfg.eps);
        }
    } else {
        let chunk = n.div_ceil(threads);
        let u_ref = &*u;
        std::thread::scope(|scope| {
            for (ids, out) in interior.chunks(chunk).zip(scratch.chunks_mut(chunk)) {
                scope.spawn(move || {
                    for (pos, &id) in ids.iter().enumerate() {
                        let (m, big_m) = stencil.extrema(u_ref, id as usize);
                        out[pos] = update_value(cfg.equation, m, big_m, cfg.lambda, cfg.eps);
                    }
                });
            }
        });
    }
    let mut change = 0.0f64;
    for (pos, &id) in interior.iter().enumerate() {
        let delta = (scratch[pos] - u.value(id as usize)).abs();
        if delta > change {
            change = delta;
        }
        u.set(id as usize, scratch[pos]);
    }
    change
}

/// Solves the configured equation with boundary values pinned to `data`.
///
/// Non-convergence within `max_iter` is not an error: the best iterate is
/// returned with `converged = false` in the report.
pub fn solve(data: &BoundaryData, cfg: &SchemeConfig) -> Result<(ScalarField, SolveReport)> {
    solve_with_threads(data, cfg, 1)
}

/// Like [`solve`]; Jacobi sweeps may use `threads` worker threads. The
/// result is identical to the single-threaded one.
pub fn solve_with_threads(
    data: &BoundaryData,
    cfg: &SchemeConfig,
    threads: usize,
) -> Result<(ScalarField, SolveReport)> {
    cfg.validate()?;
    let domain = data.domain();
    let stencil = BallStencil::build(domain, cfg.eps)?;
    let mut u = initial_field(data, cfg)?;
    let mut scratch = Vec::new();

    let start = Instant::now();
    let mut iterations = 0u64;
    let mut change = f64::INFINITY;
    let mut residual = f64::NAN;
    let mut converged = false;
    while iterations < cfg.max_iter {
        iterations += 1;
        change = match cfg.sweep {
            SweepOrder::GaussSeidel => {
                gauss_seidel_sweep(&mut u, &stencil, cfg, iterations % 2 == 1)
            }
            SweepOrder::Jacobi => jacobi_sweep(&mut u, &mut scratch, &stencil, cfg, threads),
        };
        if change <= cfg.tol_change {
            residual = max_abs_residual(&u, &stencil, cfg.equation, cfg.lambda, true);
            if residual <= cfg.tol_residual {
                converged = true;
                break;
            }
        }
    }
    if residual.is_nan() {
        residual = max_abs_residual(&u, &stencil, cfg.equation, cfg.lambda, true);
    }
    debug_assert!(u.all_finite());
    let report = SolveReport {
        iterations,
        final_change: change,
        final_residual: residual,
        converged,
        seconds: start.elapsed().as_secs_f64(),
    };
    Ok((u, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extension::BoundaryPreset;
    use crate::grid::{build_domain, DomainSpec};
    use std::sync::Arc;

    /// Residual-substitution oracle: plug a candidate value into the two
    /// branches of the discrete equations directly.
    fn min_form(v: f64, m: f64, big_m: f64, lambda: f64, eps: f64) -> f64 {
        ((v - m - eps * lambda) / eps).min((2.0 * v - big_m - m) / (eps * eps))
    }

    fn max_form(v: f64, m: f64, big_m: f64, lambda: f64, eps: f64) -> f64 {
        ((v - big_m + eps * lambda) / eps).max((2.0 * v - big_m - m) / (eps * eps))
    }

    #[test]
    fn jensen_min_update_solves_the_min_form() {
        // eps*lambda = 0.5: midpoint branch wins
        let v = jensen_min_update(0.0, 2.0, 1.0, 0.5);
        assert_eq!(v, 1.0);
        assert_eq!(min_form(v, 0.0, 2.0, 1.0, 0.5), 0.0);
        // eps*lambda = 3: gradient branch wins
        let v = jensen_min_update(0.0, 2.0, 6.0, 0.5);
        assert_eq!(v, 3.0);
        assert_eq!(min_form(v, 0.0, 2.0, 6.0, 0.5), 0.0);
        // degenerate neighborhood
        let v = jensen_min_update(0.75, 0.75, 2.0, 0.25);
        assert_eq!(v, 0.75 + 0.5);
        // random values still solve the equation up to roundoff
        for k in 0..50 {
            let m = (k as f64) * 0.013 - 0.3;
            let big_m = m + (k as f64) * 0.021;
            let lambda = 0.1 + (k as f64) * 0.07;
            let eps = 0.05 + (k as f64) * 0.01;
            let v = jensen_min_update(m, big_m, lambda, eps);
            assert!(min_form(v, m, big_m, lambda, eps).abs() <= 1e-10);
        }
    }

    #[test]
    fn jensen_max_update_solves_the_max_form() {
        let v = jensen_max_update(0.0, 2.0, 1.0, 0.5);
        assert_eq!(v, 1.0);
        assert_eq!(max_form(v, 0.0, 2.0, 1.0, 0.5), 0.0);
        let v = jensen_max_update(0.0, 2.0, 6.0, 0.5);
        assert_eq!(v, -1.0);
        assert_eq!(max_form(v, 0.0, 2.0, 6.0, 0.5), 0.0);
        let v = jensen_max_update(0.75, 0.75, 2.0, 0.25);
        assert_eq!(v, 0.75 - 0.5);
        for k in 0..50 {
            let m = (k as f64) * 0.017 - 0.4;
            let big_m = m + (k as f64) * 0.019;
            let lambda = 0.1 + (k as f64) * 0.06;
            let eps = 0.05 + (k as f64) * 0.011;
            let v = jensen_max_update(m, big_m, lambda, eps);
            assert!(max_form(v, m, big_m, lambda, eps).abs() <= 1e-10);
        }
    }

    #[test]
    fn inf_harmonic_update_is_the_midpoint() {
        assert_eq!(inf_harmonic_update(0.0, 2.0), 1.0);
        assert_eq!(inf_harmonic_update(0.25, 0.25), 0.25);
    }

    #[test]
    #[should_panic(expected = "out of order")]
    fn updates_reject_disordered_extrema() {
        jensen_min_update(1.0, 0.0, 1.0, 1.0);
    }

    #[test]
    fn linear_values_are_midpoint_fixed_points_in_1d() {
        // punctured window of radius k*h around a center node: for linear
        // data the extrema are u -+ k*h*s, so the midpoint returns u
        let d = build_domain(&DomainSpec::Interval { nodes: 11 }).unwrap();
        let h = d.spacing();
        let s = BallStencil::build(&d, 3.0 * h).unwrap();
        let slope = 0.8125; // dyadic: exact arithmetic all the way through
        let u = ScalarField::from_coord_fn(&d, |c| slope * c[0]);
        let center = d.id(5, 0);
        let (m, big_m) = s.extrema(&u, center);
        assert_eq!(inf_harmonic_update(m, big_m), u.value(center));
    }

    #[test]
    fn constant_field_min_residual_is_minus_lambda() {
        let d = build_domain(&DomainSpec::Square { nodes: 9 }).unwrap();
        let s = BallStencil::build(&d, d.spacing()).unwrap();
        let u = ScalarField::constant(&d, 1.5);
        for &id in d.interior() {
            let r = discrete_residual(&u, id as usize, &s, Equation::JensenMin, 0.7, false);
            assert_eq!(r, -0.7);
            let rc = discrete_residual(&u, id as usize, &s, Equation::JensenMin, 0.7, true);
            assert_eq!(rc, -0.7);
        }
    }

    #[test]
    fn residuals_vanish_at_update_fixed_points() {
        // drive a small solve to an exact floating-point fixed point, then
        // check both the punctured and the centered residual forms
        let d = build_domain(&DomainSpec::Square { nodes: 9 }).unwrap();
        let f = BoundaryPreset::Sine { k: 1.0 }.evaluate(&d).unwrap();
        for eq in [Equation::JensenMin, Equation::JensenMax, Equation::InfHarmonic] {
            let mut cfg = SchemeConfig::new(eq, 1.25, 2.0 * d.spacing());
            cfg.tol_change = 1e-15;
            cfg.tol_residual = 1e-13;
            cfg.max_iter = 400_000;
            let (u, report) = solve(&f, &cfg).unwrap();
            assert!(report.final_change <= 1e-15, "{} change {}", eq, report.final_change);
            let s = BallStencil::build(&d, cfg.eps).unwrap();
            for &id in d.interior() {
                let rp = discrete_residual(&u, id as usize, &s, eq, cfg.lambda, false);
                let rc = discrete_residual(&u, id as usize, &s, eq, cfg.lambda, true);
                assert!(rp.abs() <= 1e-12, "{} punctured residual {}", eq, rp);
                assert!(rc.abs() <= 1e-12, "{} centered residual {}", eq, rc);
            }
        }
    }

    // Sampled cone fields solve the lower equation away from the vertex;
    // the residual budget C*(h/eps)*(lambda/eps) was sized from a spacing
    // refinement of this very test (C = 4 leaves a ~2x margin at h = 1/40).
    #[test]
    fn cone_field_residual_is_small_far_from_vertex_and_boundary() {
        let d = build_domain(&DomainSpec::Square { nodes: 41 }).unwrap();
        let h = d.spacing();
        let eps = 4.0 * h;
        let lambda = 1.5;
        let s = BallStencil::build(&d, eps).unwrap();
        let vertex = [0.0, 0.0];
        let u = ScalarField::from_coord_fn(&d, |c| {
            lambda * ((c[0] - vertex[0]).powi(2) + (c[1] - vertex[1]).powi(2)).sqrt()
        });
        let tol = 4.0 * (h / eps) * (lambda / eps);
        let mut checked = 0;
        for &id in d.interior() {
            let id = id as usize;
            let [x, y] = d.coord(id);
            let from_vertex = (x * x + y * y).sqrt();
            let from_boundary = x.min(1.0 - x).min(y).min(1.0 - y);
            if from_vertex < 2.0 * eps || from_boundary < eps {
                continue;
            }
            checked += 1;
            let r = discrete_residual(&u, id, &s, Equation::JensenMin, lambda, true);
            assert!(r.abs() <= tol, "residual {} at ({}, {}), tol {}", r, x, y, tol);
        }
        assert!(checked > 100);
    }

    #[test]
    fn inf_harmonic_solve_recovers_linear_interpolant_in_1d() {
        let d = build_domain(&DomainSpec::Interval { nodes: 101 }).unwrap();
        let f = BoundaryPreset::Linear { a: 0.0, b: 1.0 }.evaluate(&d).unwrap();
        let mut cfg = SchemeConfig::new(Equation::InfHarmonic, 1.0, d.spacing());
        cfg.init = Some(InitStrategy::Zero);
        cfg.tol_change = 1e-12;
        cfg.tol_residual = 1e-10;
        let (u, report) = solve(&f, &cfg).unwrap();
        assert!(report.converged);
        for id in d.non_exterior() {
            let x = d.coord(id)[0];
            assert!((u.value(id) - x).abs() <= 1e-10, "u({}) = {}", x, u.value(id));
        }
    }

    #[test]
    fn lambda_zero_min_scheme_equals_inf_harmonic() {
        let d = build_domain(&DomainSpec::Interval { nodes: 21 }).unwrap();
        let f = BoundaryPreset::Sine { k: 1.0 }.evaluate(&d).unwrap();
        let mut cfg_min = SchemeConfig::new(Equation::JensenMin, 0.0, 2.0 * d.spacing());
        cfg_min.init = Some(InitStrategy::Zero);
        let mut cfg_inf = cfg_min.clone();
        cfg_inf.equation = Equation::InfHarmonic;
        let (u_min, r_min) = solve(&f, &cfg_min).unwrap();
        let (u_inf, r_inf) = solve(&f, &cfg_inf).unwrap();
        assert_eq!(r_min.iterations, r_inf.iterations);
        for id in d.non_exterior() {
            assert!(u_min.value(id) == u_inf.value(id));
        }
    }

    #[test]
    fn scheme_duality_under_data_negation() {
        let d = build_domain(&DomainSpec::Square { nodes: 15 }).unwrap();
        let f = BoundaryPreset::Sine { k: 1.0 }.evaluate(&d).unwrap();
        let cfg_max = SchemeConfig::new(Equation::JensenMax, 1.3, 2.5 * d.spacing());
        let cfg_min = SchemeConfig::new(Equation::JensenMin, 1.3, 2.5 * d.spacing());
        let (u_max, rep_max) = solve(&f, &cfg_max).unwrap();
        let (u_min, rep_min) = solve(&f.negated(), &cfg_min).unwrap();
        assert_eq!(rep_max.iterations, rep_min.iterations);
        for id in d.non_exterior() {
            assert!(
                (u_max.value(id) + u_min.value(id)).abs() <= 1e-12,
                "duality gap at node {}",
                id
            );
        }
    }

    #[test]
    fn gradient_bounds_hold_at_fixed_points() {
        let d = build_domain(&DomainSpec::Square { nodes: 15 }).unwrap();
        let f = BoundaryPreset::Sine { k: 1.0 }.evaluate(&d).unwrap();
        let eps = 2.0 * d.spacing();
        let lambda = 1.3;
        let s = BallStencil::build(&d, eps).unwrap();

        let (u, rep) = solve(&f, &SchemeConfig::new(Equation::JensenMin, lambda, eps)).unwrap();
        assert!(rep.converged);
        for &id in d.interior() {
            let (m, _) = s.extrema(&u, id as usize);
            assert!((u.value(id as usize) - m) / eps >= lambda - 1e-12);
        }

        let (u, rep) = solve(&f, &SchemeConfig::new(Equation::JensenMax, lambda, eps)).unwrap();
        assert!(rep.converged);
        for &id in d.interior() {
            let (_, big_m) = s.extrema(&u, id as usize);
            assert!((big_m - u.value(id as usize)) / eps >= lambda - 1e-12);
        }
    }

    #[test]
    fn min_solve_approaches_distance_for_zero_data() {
        let d = build_domain(&DomainSpec::Square { nodes: 31 }).unwrap();
        let f = BoundaryPreset::Zero.evaluate(&d).unwrap();
        let eps = 3.0 * d.spacing();
        let (u, rep) = solve(&f, &SchemeConfig::new(Equation::JensenMin, 1.0, eps)).unwrap();
        assert!(rep.converged);
        let mut worst = 0.0f64;
        for id in d.non_exterior() {
            let [x, y] = d.coord(id);
            let dist = x.min(1.0 - x).min(y).min(1.0 - y);
            worst = worst.max((u.value(id) - dist).abs());
        }
        assert!(worst <= 2.0 * eps, "sup error {} vs eps {}", worst, eps);
    }

    #[test]
    fn jacobi_with_threads_matches_single_thread() {
        let d = build_domain(&DomainSpec::Square { nodes: 21 }).unwrap();
        let f = BoundaryPreset::Xy.evaluate(&d).unwrap();
        let mut cfg = SchemeConfig::new(Equation::InfHarmonic, 2.0, 2.0 * d.spacing());
        cfg.sweep = SweepOrder::Jacobi;
        cfg.max_iter = 500;
        let (u1, r1) = solve_with_threads(&f, &cfg, 1).unwrap();
        let (u4, r4) = solve_with_threads(&f, &cfg, 4).unwrap();
        assert_eq!(r1.iterations, r4.iterations);
        for id in d.non_exterior() {
            assert_eq!(u1.value(id).to_bits(), u4.value(id).to_bits());
        }
    }

    #[test]
    fn max_iter_exhaustion_reports_non_convergence() {
        let d = build_domain(&DomainSpec::Square { nodes: 21 }).unwrap();
        let f = BoundaryPreset::Xy.evaluate(&d).unwrap();
        let mut cfg = SchemeConfig::new(Equation::InfHarmonic, 2.0, d.spacing());
        cfg.max_iter = 3;
        cfg.init = Some(InitStrategy::Zero);
        let (u, rep) = solve(&f, &cfg).unwrap();
        assert!(!rep.converged);
        assert_eq!(rep.iterations, 3);
        assert!(rep.final_residual.is_finite());
        assert!(u.all_finite());
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let d = build_domain(&DomainSpec::Square { nodes: 9 }).unwrap();
        let f = BoundaryPreset::Zero.evaluate(&d).unwrap();
        let cfg = SchemeConfig::new(Equation::JensenMin, -1.0, 2.0 * d.spacing());
        assert!(solve(&f, &cfg).is_err());
        let cfg = SchemeConfig::new(Equation::JensenMin, 1.0, 0.25 * d.spacing());
        assert!(solve(&f, &cfg).is_err());
        let mut cfg = SchemeConfig::new(Equation::JensenMin, 1.0, d.spacing());
        cfg.tol_change = 0.0;
        assert!(cfg.validate().is_err());
        let _ = Arc::strong_count(&d);
    }

    #[test]
    fn equation_and_strategy_parsing() {
        assert_eq!("min".parse::<Equation>().unwrap(), Equation::JensenMin);
        assert_eq!("jensen-max".parse::<Equation>().unwrap(), Equation::JensenMax);
        assert_eq!("inf".parse::<Equation>().unwrap(), Equation::InfHarmonic);
        assert!("poisson".parse::<Equation>().is_err());
        assert_eq!("gs".parse::<SweepOrder>().unwrap(), SweepOrder::GaussSeidel);
        assert_eq!("jacobi".parse::<SweepOrder>().unwrap(), SweepOrder::Jacobi);
        assert_eq!("midpoint".parse::<InitStrategy>().unwrap(), InitStrategy::Midpoint);
    }
}
