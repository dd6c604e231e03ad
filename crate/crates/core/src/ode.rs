//! Embedded Dormand-Prince 5(4) integrator with cubic-Hermite dense output.
//!
//! This is the single time-stepper behind the numeric characteristic pairs,
//! the Riccati ODE path, and the finite-difference field evolution. Dense
//! output stores the accepted steps (values and derivatives) and
//! interpolates with a cubic Hermite polynomial; step size is additionally
//! capped when dense output is requested so the interpolation error stays
//! below the integration tolerance.

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum OdeError {
    #[error("IntegrationFailure: step size underflow at t = {t} (h = {h})")]
    StepSizeUnderflow { t: f64, h: f64 },
    #[error("IntegrationFailure: exceeded {max_steps} steps at t = {t}")]
    MaxStepsExceeded { t: f64, max_steps: usize },
    #[error("Singularity: non-finite right-hand side at t = {t}")]
    NonFiniteRhs { t: f64 },
    #[error("OutOfRange: sample time {t} outside integrated span [{t0}, {t1}]")]
    SampleOutOfRange { t: f64, t0: f64, t1: f64 },
}

pub trait OdeSystem {
    fn dim(&self) -> usize;
    fn rhs(&self, t: f64, y: &[f64], dydt: &mut [f64]);
}

#[derive(Debug, Clone)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Hard cap on the step size; `f64::INFINITY` disables it.
    pub h_max: f64,
    pub max_steps: usize,
    /// Keep accepted steps for interpolation.
    pub dense: bool,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions {
            rtol: 1e-10,
            atol: 1e-10,
            h_max: f64::INFINITY,
            max_steps: 1_000_000,
            dense: false,
        }
    }
}

impl OdeOptions {
    pub fn with_tol(tol: f64) -> Self {
        OdeOptions {
            rtol: tol,
            atol: tol,
            ..Self::default()
        }
    }
}

struct DenseStep {
    t0: f64,
    t1: f64,
    y0: Vec<f64>,
    y1: Vec<f64>,
    f0: Vec<f64>,
    f1: Vec<f64>,
}

pub struct OdeSolution {
    t_start: f64,
    pub t_end: f64,
    pub y_end: Vec<f64>,
    pub n_accepted: usize,
    pub n_rejected: usize,
    steps: Vec<DenseStep>,
}

impl OdeSolution {
    /// Interpolated state at `t` (dense solves only).
    pub fn sample(&self, t: f64) -> Result<Vec<f64>, OdeError> {
        self.sample_with_derivative(t).map(|(y, _)| y)
    }

    /// Interpolated state and its time derivative at `t`.
    pub fn sample_with_derivative(&self, t: f64) -> Result<(Vec<f64>, Vec<f64>), OdeError> {
        let slack = (self.t_end - self.t_start).abs() * 1e-9 + 1e-12;
        if self.steps.is_empty() || t < self.t_start - slack || t > self.t_end + slack {
            return Err(OdeError::SampleOutOfRange {
                t,
                t0: self.t_start,
                t1: self.t_end,
            });
        }
        let idx = self
            .steps
            .partition_point(|s| s.t1 < t)
            .min(self.steps.len() - 1);
        let s = &self.steps[idx];
        let h = s.t1 - s.t0;
        let u = ((t - s.t0) / h).clamp(0.0, 1.0);
        let dim = s.y0.len();
        let mut y = vec![0.0; dim];
        let mut dy = vec![0.0; dim];
        // Cubic Hermite basis and its derivative.
        let (u2, u3) = (u * u, u * u * u);
        let h00 = 2.0 * u3 - 3.0 * u2 + 1.0;
        let h10 = u3 - 2.0 * u2 + u;
        let h01 = -2.0 * u3 + 3.0 * u2;
        let h11 = u3 - u2;
        let d00 = (6.0 * u2 - 6.0 * u) / h;
        let d10 = (3.0 * u2 - 4.0 * u + 1.0) / h;
        let d01 = (-6.0 * u2 + 6.0 * u) / h;
        let d11 = (3.0 * u2 - 2.0 * u) / h;
        for i in 0..dim {
            y[i] = h00 * s.y0[i] + h10 * h * s.f0[i] + h01 * s.y1[i] + h11 * h * s.f1[i];
            dy[i] = d00 * s.y0[i] + d10 * h * s.f0[i] + d01 * s.y1[i] + d11 * h * s.f1[i];
        }
        Ok((y, dy))
    }
}

// Dormand-Prince 5(4) tableau.
const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const C: [f64; 6] = [1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
// 5th-order minus embedded 4th-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Integrate `sys` from `t0` to `t1` (`t1 > t0`).
pub fn integrate<S: OdeSystem>(
    sys: &S,
    t0: f64,
    t1: f64,
    y0: &[f64],
    opts: &OdeOptions,
) -> Result<OdeSolution, OdeError> {
    assert!(t1 >= t0, "reverse-time integration not supported");
    let dim = sys.dim();
    assert_eq!(y0.len(), dim);
    let span = t1 - t0;
    let mut h_cap = opts.h_max.min(span.max(f64::MIN_POSITIVE));
    if opts.dense {
        // Keep Hermite interpolation error (O(h^4)) near the solver tolerance.
        h_cap = h_cap.min(span / 256.0);
    }

    let mut t = t0;
    let mut y = y0.to_vec();
    let mut k: Vec<Vec<f64>> = (0..7).map(|_| vec![0.0; dim]).collect();
    let mut y_stage = vec![0.0; dim];
    sys.rhs(t, &y, &mut k[0]);
    if !k[0].iter().all(|v| v.is_finite()) {
        return Err(OdeError::NonFiniteRhs { t });
    }

    // Initial step from the ratio of scaled state and rhs norms.
    let mut d0 = 0.0;
    let mut d1 = 0.0;
    for (yi, fi) in y.iter().zip(&k[0]) {
        let sk = opts.atol + opts.rtol * yi.abs();
        d0 += (yi / sk).powi(2);
        d1 += (fi / sk).powi(2);
    }
    let mut h = if d0 > 0.0 && d1 > 0.0 {
        (0.01 * (d0 / d1).sqrt()).min(h_cap).min(span)
    } else {
        h_cap.min(span / 100.0)
    };
    h = h.max(span * 1e-12);

    let mut sol = OdeSolution {
        t_start: t0,
        t_end: t0,
        y_end: Vec::new(),
        n_accepted: 0,
        n_rejected: 0,
        steps: Vec::new(),
    };
    let mut steps = 0usize;

    if span == 0.0 {
        sol.y_end = y;
        return Ok(sol);
    }

    while t < t1 {
        if steps >= opts.max_steps {
            return Err(OdeError::MaxStepsExceeded {
                t,
                max_steps: opts.max_steps,
            });
        }
        steps += 1;
        if h < span * 1e-14 {
            return Err(OdeError::StepSizeUnderflow { t, h });
        }
        let mut last = false;
        let mut h_step = h.min(h_cap);
        if h_step >= t1 - t {
            h_step = t1 - t;
            last = true;
        }

        for stage in 0..6 {
            for i in 0..dim {
                let mut acc = 0.0;
                for (j, kj) in k.iter().enumerate().take(stage + 1) {
                    acc += A[stage][j] * kj[i];
                }
                y_stage[i] = y[i] + h_step * acc;
            }
            let ts = t + C[stage] * h_step;
            sys.rhs(ts, &y_stage, &mut k[stage + 1]);
        }
        // The last A row equals the 5th-order weights, so after stage 6
        // y_stage is y_new and k[6] = f(t+h, y_new) (FSAL).
        let y_new = y_stage.clone();
        if !y_new.iter().all(|v| v.is_finite()) {
            return Err(OdeError::NonFiniteRhs { t });
        }

        let mut err = 0.0;
        for i in 0..dim {
            let mut e = 0.0;
            for (j, kj) in k.iter().enumerate() {
                e += E[j] * kj[i];
            }
            let sk = opts.atol + opts.rtol * y[i].abs().max(y_new[i].abs());
            err += (h_step * e / sk).powi(2);
        }
        err = (err / dim as f64).sqrt();

        if err <= 1.0 {
            let f1 = k[6].clone();
            if opts.dense {
                sol.steps.push(DenseStep {
                    t0: t,
                    t1: t + h_step,
                    y0: y.clone(),
                    y1: y_new.clone(),
                    f0: k[0].clone(),
                    f1: f1.clone(),
                });
            }
            t += h_step;
            y = y_new;
            k[0].copy_from_slice(&f1);
            sol.n_accepted += 1;
            if last {
                t = t1;
                if let Some(s) = sol.steps.last_mut() {
                    s.t1 = t1;
                }
                break;
            }
        } else {
            sol.n_rejected += 1;
        }
        let fac = (0.9 * err.powf(-0.2)).clamp(0.2, 10.0);
        h = h_step * fac;
    }

    sol.t_end = t;
    sol.y_end = y;
    Ok(sol)
}
