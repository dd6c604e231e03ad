//! Independent verification solver: 4th-order finite differences in space,
//! adaptive Runge-Kutta in time, with Dirichlet boundary values supplied by
//! the analytic solution. Used as an oracle against the closed-form
//! propagator, never as a general-purpose solver (plane-wave data does not
//! decay, so honest boundaries require the analytic values).

use num_complex::Complex64;
use thiserror::Error;

use crate::hamiltonians::{CoefficientSet, ModelError};
use crate::ode::{integrate, OdeError, OdeOptions, OdeSystem};
use crate::par::ExecMode;

#[derive(Debug, Clone, Error)]
pub enum PdeError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("IntegrationFailure: {0}")]
    Integration(OdeError),
    #[error("UnstableStep: step controller underflow at t = {t}; dx too coarse for the oscillation scale")]
    UnstableStep { t: f64 },
    #[error("OutOfDomain: {0}")]
    OutOfDomain(String),
    #[error("EmptyWindow: no grid points inside [{lo}, {hi}]")]
    EmptyWindow { lo: f64, hi: f64 },
    #[error("InvalidGrid: {0}")]
    InvalidGrid(String),
}

impl From<OdeError> for PdeError {
    fn from(e: OdeError) -> Self {
        match e {
            OdeError::StepSizeUnderflow { t, .. } => PdeError::UnstableStep { t },
            other => PdeError::Integration(other),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryCondition {
    AnalyticDirichlet,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub x_min: f64,
    pub x_max: f64,
    pub n_points: usize,
    pub bc: BoundaryCondition,
}

impl Grid {
    pub fn new(x_min: f64, x_max: f64, n_points: usize) -> Result<Grid, PdeError> {
        if n_points < 16 {
            return Err(PdeError::InvalidGrid(format!(
                "n_points = {n_points}, need at least 16"
            )));
        }
        if !(x_max > x_min) {
            return Err(PdeError::InvalidGrid(format!(
                "empty extent [{x_min}, {x_max}]"
            )));
        }
        Ok(Grid {
            x_min,
            x_max,
            n_points,
            bc: BoundaryCondition::AnalyticDirichlet,
        })
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n_points - 1) as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        self.x_min + self.dx() * i as f64
    }
}

#[derive(Debug, Clone)]
pub struct WaveField {
    pub grid: Grid,
    pub t: f64,
    pub values: Vec<Complex64>,
}

type SpaceFn<'a> = &'a (dyn Fn(f64) -> Complex64 + Sync);
type SpaceTimeFn<'a> = &'a (dyn Fn(f64, f64) -> Complex64 + Sync);

/// Semi-discretization of the evolution equation over the interior points.
/// The outermost two layers on each side carry the analytic Dirichlet
/// values; the state vector interleaves re/im of the interior.
struct FdSystem<'a> {
    cs: &'a CoefficientSet,
    grid: &'a Grid,
    boundary: SpaceTimeFn<'a>,
    mode: ExecMode,
}

impl FdSystem<'_> {
    fn interior(&self) -> usize {
        self.grid.n_points - 4
    }

    fn assemble(&self, t: f64, y: &[f64]) -> Vec<Complex64> {
        let n = self.grid.n_points;
        let mut full = vec![Complex64::new(0.0, 0.0); n];
        for (j, slot) in [0, 1, n - 2, n - 1].into_iter().enumerate() {
            let _ = j;
            full[slot] = (self.boundary)(self.grid.point(slot), t);
        }
        for i in 0..self.interior() {
            full[i + 2] = Complex64::new(y[2 * i], y[2 * i + 1]);
        }
        full
    }
}

impl OdeSystem for FdSystem<'_> {
    fn dim(&self) -> usize {
        2 * self.interior()
    }

    fn rhs(&self, t: f64, y: &[f64], dydt: &mut [f64]) {
        let full = self.assemble(t, y);
        let v = self.cs.raw(t);
        let dx = self.grid.dx();
        let inv12dx = 1.0 / (12.0 * dx);
        let inv12dx2 = 1.0 / (12.0 * dx * dx);
        let grid = self.grid;
        let full_ref = &full;
        let point_rate = move |i: usize| -> Complex64 {
            let j = i + 2;
            let x = grid.point(j);
            let psi = full_ref[j];
            let d2 = (-full_ref[j + 2] + 16.0 * full_ref[j + 1] - 30.0 * psi
                + 16.0 * full_ref[j - 1]
                - full_ref[j - 2])
                * inv12dx2;
            let d1 = (-full_ref[j + 2] + 8.0 * full_ref[j + 1] - 8.0 * full_ref[j - 1]
                + full_ref[j - 2])
                * inv12dx;
            // ∂ₜψ = i a ψ_xx − i b x² ψ − c x ψ_x − d ψ + i f x ψ + g ψ_x
            Complex64::i() * (v.a * d2 - (v.b * x * x - v.f * x) * psi)
                + (v.g - v.c * x) * d1
                - v.d * psi
        };
        match self.mode {
            ExecMode::Sequential => {
                for (i, ch) in dydt.chunks_mut(2).enumerate() {
                    let r = point_rate(i);
                    ch[0] = r.re;
                    ch[1] = r.im;
                }
            }
            #[cfg(feature = "parallel")]
            ExecMode::Parallel => {
                use rayon::prelude::*;
                dydt.par_chunks_mut(2).enumerate().for_each(|(i, ch)| {
                    let r = point_rate(i);
                    ch[0] = r.re;
                    ch[1] = r.im;
                });
            }
        }
    }
}

/// Advances the sampled `initial` data to `t_final` under the coefficient
/// set, imposing `boundary` (the analytic solution) on the two outermost
/// layers of each side. Deterministic: identical inputs give bit-identical
/// fields in either execution mode.
pub fn evolve_fd(
    cs: &CoefficientSet,
    initial: SpaceFn,
    grid: &Grid,
    t_final: f64,
    tol: f64,
    boundary: SpaceTimeFn,
) -> Result<WaveField, PdeError> {
    evolve_fd_with_mode(cs, initial, grid, t_final, tol, boundary, ExecMode::default())
}

pub fn evolve_fd_with_mode(
    cs: &CoefficientSet,
    initial: SpaceFn,
    grid: &Grid,
    t_final: f64,
    tol: f64,
    boundary: SpaceTimeFn,
    mode: ExecMode,
) -> Result<WaveField, PdeError> {
    if !(t_final >= 0.0 && t_final <= cs.t_max() * (1.0 + 1e-12)) {
        return Err(PdeError::OutOfDomain(format!(
            "t_final = {t_final} outside [0, {}]",
            cs.t_max()
        )));
    }
    if t_final == 0.0 {
        let values = (0..grid.n_points).map(|i| initial(grid.point(i))).collect();
        return Ok(WaveField {
            grid: *grid,
            t: 0.0,
            values,
        });
    }
    let sys = FdSystem {
        cs,
        grid,
        boundary,
        mode,
    };
    let m = sys.interior();
    let mut y0 = vec![0.0; 2 * m];
    for i in 0..m {
        let v = initial(grid.point(i + 2));
        y0[2 * i] = v.re;
        y0[2 * i + 1] = v.im;
    }
    let opts = OdeOptions {
        rtol: tol,
        atol: tol,
        max_steps: 2_000_000,
        ..Default::default()
    };
    let sol = integrate(&sys, 0.0, t_final, &y0, &opts)?;
    let mut values = vec![Complex64::new(0.0, 0.0); grid.n_points];
    for (slot, value) in values.iter_mut().enumerate() {
        if slot < 2 || slot >= grid.n_points - 2 {
            *value = boundary(grid.point(slot), t_final);
        }
    }
    for i in 0..m {
        values[i + 2] = Complex64::new(sol.y_end[2 * i], sol.y_end[2 * i + 1]);
    }
    Ok(WaveField {
        grid: *grid,
        t: t_final,
        values,
    })
}

/// Error norms between a numeric field and an analytic solution over the
/// grid points inside `window`.
#[derive(Debug, Clone, Copy)]
pub struct FieldComparison {
    /// ‖num − ana‖₂ / ‖ana‖₂
    pub l2_rel: f64,
    pub linf: f64,
    /// Relative L2 of the real parts alone.
    pub re_l2: f64,
    /// Relative L2 of the imaginary parts alone.
    pub im_l2: f64,
}

pub fn compare_fields(
    numeric: &WaveField,
    analytic: SpaceFn,
    window: (f64, f64),
) -> Result<FieldComparison, PdeError> {
    let (lo, hi) = window;
    let mut diff2 = 0.0;
    let mut ana2 = 0.0;
    let mut re_diff2 = 0.0;
    let mut re2 = 0.0;
    let mut im_diff2 = 0.0;
    let mut im2 = 0.0;
    let mut linf = 0.0f64;
    let mut count = 0usize;
    for (i, &num) in numeric.values.iter().enumerate() {
        let x = numeric.grid.point(i);
        if x < lo || x > hi {
            continue;
        }
        count += 1;
        let ana = analytic(x);
        let d = num - ana;
        diff2 += d.norm_sqr();
        ana2 += ana.norm_sqr();
        re_diff2 += (num.re - ana.re).powi(2);
        re2 += ana.re * ana.re;
        im_diff2 += (num.im - ana.im).powi(2);
        im2 += ana.im * ana.im;
        linf = linf.max(d.norm());
    }
    if count == 0 {
        return Err(PdeError::EmptyWindow { lo, hi });
    }
    Ok(FieldComparison {
        l2_rel: (diff2 / ana2).sqrt(),
        linf,
        re_l2: (re_diff2 / re2).sqrt(),
        im_l2: (im_diff2 / im2).sqrt(),
    })
}

/// Equation residual |i ψ_t + a ψ_xx − b x²ψ + i c x ψ_x + i d ψ + f x ψ −
/// i g ψ_x| of an arbitrary solution candidate, with 4th-order centered
/// differences of the given `step` in both variables.
pub fn pde_residual(
    solution: SpaceTimeFn,
    cs: &CoefficientSet,
    x: f64,
    t: f64,
    step: f64,
) -> Result<f64, PdeError> {
    if t - 2.0 * step <= 0.0 {
        return Err(PdeError::OutOfDomain(format!(
            "residual stencil needs t - 2*step > 0 (t = {t}, step = {step})"
        )));
    }
    let v = cs.eval(t)?;
    let d1 = |f: &dyn Fn(f64) -> Complex64, u: f64| {
        (-f(u + 2.0 * step) + 8.0 * f(u + step) - 8.0 * f(u - step) + f(u - 2.0 * step))
            / (12.0 * step)
    };
    let d2 = |f: &dyn Fn(f64) -> Complex64, u: f64| {
        (-f(u + 2.0 * step) + 16.0 * f(u + step) - 30.0 * f(u) + 16.0 * f(u - step)
            - f(u - 2.0 * step))
            / (12.0 * step * step)
    };
    let psi = solution(x, t);
    let psi_t = d1(&|s| solution(x, s), t);
    let psi_x = d1(&|s| solution(s, t), x);
    let psi_xx = d2(&|s| solution(s, t), x);
    let residual = Complex64::i() * psi_t + v.a * psi_xx - v.b * x * x * psi
        + Complex64::i() * v.c * x * psi_x
        + Complex64::i() * v.d * psi
        + v.f * x * psi
        - Complex64::i() * v.g * psi_x;
    Ok(residual.norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characteristic::characteristic_pair;
    use crate::hamiltonians::catalog_model;
    use crate::propagator::plane_wave_solution;
    use crate::riccati::riccati_closed_form;
    use std::collections::BTreeMap;

    fn params(kv: &[(&str, f64)]) -> BTreeMap<String, f64> {
        kv.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[test]
    fn zero_time_returns_sampled_initial_data() {
        let cs = catalog_model("harmonic", &BTreeMap::new()).unwrap();
        let grid = Grid::new(-2.0, 2.0, 33).unwrap();
        let init = |x: f64| Complex64::from_polar(1.0, 1.2 * x);
        let field = evolve_fd(&cs, &init, &grid, 0.0, 1e-8, &|x, _| init(x)).unwrap();
        for (i, v) in field.values.iter().enumerate() {
            assert_eq!(*v, init(grid.point(i)));
        }
    }

    #[test]
    fn grid_validation() {
        assert!(matches!(Grid::new(-1.0, 1.0, 8), Err(PdeError::InvalidGrid(_))));
        assert!(matches!(Grid::new(1.0, -1.0, 32), Err(PdeError::InvalidGrid(_))));
        let g = Grid::new(-8.0, 8.0, 801).unwrap();
        assert!((g.dx() - 0.02).abs() < 1e-15);
    }

    #[test]
    fn compare_fields_reference_cases() {
        let grid = Grid::new(-1.0, 1.0, 21).unwrap();
        let f = |x: f64| Complex64::new(x.cos(), x.sin());
        let exact = WaveField {
            grid,
            t: 0.0,
            values: (0..21).map(|i| f(grid.point(i))).collect(),
        };
        let cmp = compare_fields(&exact, &f, (-1.0, 1.0)).unwrap();
        assert_eq!(cmp.l2_rel, 0.0);
        assert_eq!(cmp.linf, 0.0);

        let perturbed = WaveField {
            grid,
            t: 0.0,
            values: exact
                .values
                .iter()
                .map(|v| v + Complex64::new(1e-3, 0.0))
                .collect(),
        };
        let cmp = compare_fields(&perturbed, &f, (-1.0, 1.0)).unwrap();
        assert!((cmp.linf - 1e-3).abs() < 1e-12);

        assert!(matches!(
            compare_fields(&exact, &f, (5.0, 6.0)),
            Err(PdeError::EmptyWindow { .. })
        ));
    }

    #[test]
    fn short_caldirola_kanai_run_tracks_analytic_solution() {
        let ps = params(&[("lambda", 0.1)]);
        let cs = catalog_model("caldirola_kanai", &ps).unwrap();
        let pair = characteristic_pair(&cs, 1e-10).unwrap();
        let h = 1.2;
        // Below ~1e-9 the state is ill-conditioned and φ_h = e^{ihx} + O(t).
        let phi = |x: f64, t: f64| {
            if t < 1e-9 {
                Complex64::from_polar(1.0, h * x)
            } else {
                let state = riccati_closed_form(&pair, &cs, t).unwrap();
                plane_wave_solution(&state, &pair, h, x).unwrap().value
            }
        };
        let grid = Grid::new(-6.0, 6.0, 241).unwrap();
        let t_final = 0.25;
        let field = evolve_fd(
            &cs,
            &|x| Complex64::from_polar(1.0, h * x),
            &grid,
            t_final,
            1e-8,
            &phi,
        )
        .unwrap();
        let cmp = compare_fields(&field, &|x| phi(x, t_final), (-3.0, 3.0)).unwrap();
        assert!(cmp.l2_rel < 1e-3, "relative L2 = {}", cmp.l2_rel);
    }

    #[test]
    fn evolution_is_deterministic() {
        let cs = catalog_model("harmonic", &BTreeMap::new()).unwrap();
        let grid = Grid::new(-4.0, 4.0, 101).unwrap();
        let init = |x: f64| Complex64::new((-x * x).exp(), 0.0);
        // Gaussian data decays fast enough that frozen edges stay honest
        // over a short horizon.
        let bc = |x: f64, _t: f64| Complex64::new((-x * x).exp(), 0.0);
        let run = || evolve_fd(&cs, &init, &grid, 0.05, 1e-8, &bc).unwrap();
        let (a, b) = (run(), run());
        assert_eq!(a.values, b.values);
    }

    #[test]
    fn residual_of_plane_wave_solution_is_small() {
        let cs = catalog_model("harmonic", &BTreeMap::new()).unwrap();
        let pair = characteristic_pair(&cs, 1e-10).unwrap();
        let phi = |x: f64, t: f64| {
            let state = riccati_closed_form(&pair, &cs, t).unwrap();
            plane_wave_solution(&state, &pair, 1.2, x).unwrap().value
        };
        let r = pde_residual(&phi, &cs, 0.5, 0.7, 1e-3).unwrap();
        assert!(r < 1e-6, "residual {r}");
    }

    #[test]
    fn residual_rejects_frozen_data() {
        let cs = catalog_model("harmonic", &BTreeMap::new()).unwrap();
        let frozen = |x: f64, _t: f64| Complex64::from_polar(1.0, 1.2 * x);
        let r = pde_residual(&frozen, &cs, 0.5, 0.5, 1e-3).unwrap();
        assert!(r > 0.1, "frozen plane wave must not satisfy the equation: {r}");
    }

    #[test]
    fn residual_shows_fourth_order_convergence() {
        let cs = catalog_model("harmonic", &BTreeMap::new()).unwrap();
        let pair = characteristic_pair(&cs, 1e-10).unwrap();
        let phi = |x: f64, t: f64| {
            let state = riccati_closed_form(&pair, &cs, t).unwrap();
            plane_wave_solution(&state, &pair, 1.2, x).unwrap().value
        };
        let r1 = pde_residual(&phi, &cs, 0.5, 0.7, 0.02).unwrap();
        let r2 = pde_residual(&phi, &cs, 0.5, 0.7, 0.01).unwrap();
        let ratio = r2 / r1;
        assert!(
            ratio < 1.0 / 8.0 && ratio > 1.0 / 40.0,
            "expected ~1/16, got {ratio} ({r1} -> {r2})"
        );
    }

    #[test]
    fn residual_stencil_domain_guard() {
        let cs = catalog_model("harmonic", &BTreeMap::new()).unwrap();
        let f = |_x: f64, _t: f64| Complex64::new(1.0, 0.0);
        assert!(matches!(
            pde_residual(&f, &cs, 0.0, 1e-4, 1e-3),
            Err(PdeError::OutOfDomain(_))
        ));
    }
}
