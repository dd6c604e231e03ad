//! Runnable invariant suites. Each check returns a pass/fail outcome with a
//! one-line detail; the CLI `check` subcommand aggregates them and the
//! acceptance tests reuse the heavier ones.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::characteristic::{
    characteristic_pair, characteristic_residual, closed_form_characteristic, ince_residual,
    solve_characteristic_numeric, PairSource,
};
use crate::hamiltonians::{catalog_model, CoefficientSet, CATALOG};
use crate::pdecheck::{compare_fields, evolve_fd, pde_residual, Grid};
use crate::propagator::{
    convergence_sweep, corollary1_plane_wave, operator_apply_exponential, operator_plane_wave,
    plane_wave_quadrature_oracle, plane_wave_solution, superosc_data, DataParity, OperatorSpec,
};
use crate::riccati::{
    check_assumption1, handoff_time, riccati_closed_form, riccati_ode_solution,
    riccati_residuals, weight,
};

#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn outcome(name: &str, result: Result<String, String>) -> CheckOutcome {
    match result {
        Ok(detail) => CheckOutcome {
            name: name.into(),
            passed: true,
            detail,
        },
        Err(detail) => CheckOutcome {
            name: name.into(),
            passed: false,
            detail,
        },
    }
}

fn model(name: &str) -> CoefficientSet {
    catalog_model(name, &BTreeMap::new()).expect("catalog model instantiates with defaults")
}

fn wanted(filter: Option<&str>, name: &str) -> bool {
    filter.map_or(true, |f| f == name)
}

/// Deterministic xorshift for the randomized sample points.
struct Rng(u64);

impl Rng {
    fn next_f64(&mut self) -> f64 {
        let mut x = self.0;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        self.0 = x;
        (x >> 11) as f64 / (1u64 << 53) as f64
    }

    fn in_range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }
}

pub fn hamiltonian_checks(filter: Option<&str>) -> Vec<CheckOutcome> {
    let mut out = Vec::new();
    for info in CATALOG {
        if !wanted(filter, info.name) {
            continue;
        }
        let name = format!("hamiltonians/{}/finite-and-elliptic", info.name);
        let cs = model(info.name);
        let mut worst: Option<String> = None;
        for i in 1..=64 {
            let t = cs.t_max() * i as f64 / 64.0;
            match cs.eval(t) {
                Ok(v) if v.a != 0.0 => {}
                Ok(v) => {
                    worst = Some(format!("a({t}) = {}", v.a));
                    break;
                }
                Err(e) => {
                    worst = Some(e.to_string());
                    break;
                }
            }
        }
        out.push(outcome(
            &name,
            match worst {
                None => Ok(format!("64 samples on (0, {:.3}]", cs.t_max())),
                Some(w) => Err(w),
            },
        ));
    }
    if wanted(filter, "caldirola_kanai") {
        // analytic vs finite-difference derivative route for tau/sigma
        let analytic = model("caldirola_kanai");
        let lam = 0.1;
        let custom = CoefficientSet::custom("ck_fd", analytic.t_max())
            .a(move |t| 0.5 * (-2.0 * lam * t).exp())
            .b(move |t| 0.5 * (2.0 * lam * t).exp())
            .build();
        let mut max_dev = 0.0f64;
        for i in 1..=32 {
            let t = analytic.t_max() * i as f64 / 34.0;
            let ca = analytic.characteristic_coefficients(t).unwrap();
            let cf = custom.characteristic_coefficients(t).unwrap();
            max_dev = max_dev.max((ca.tau - cf.tau).abs().max((ca.sigma - cf.sigma).abs()));
        }
        out.push(outcome(
            "hamiltonians/derivative-rule-agreement",
            if max_dev < 1e-8 {
                Ok(format!("max |analytic - fd| = {max_dev:.2e}"))
            } else {
                Err(format!("max |analytic - fd| = {max_dev:.2e}"))
            },
        ));
    }
    out
}

const CLOSED_FORM_MODELS: &[&str] = &[
    "harmonic",
    "airy",
    "caldirola_kanai",
    "modified_caldirola_kanai",
    "meiler_cordero_suslov",
    "degenerate_parametric",
];

pub fn characteristic_checks(filter: Option<&str>) -> Vec<CheckOutcome> {
    let mut out = Vec::new();
    for &name in CLOSED_FORM_MODELS {
        if !wanted(filter, name) {
            continue;
        }
        let cs = model(name);
        let pair = closed_form_characteristic(name, &BTreeMap::new()).unwrap();

        let a0 = cs.eval(0.0).unwrap().a;
        let ic_err = pair.mu0(0.0).abs().max((pair.dmu0(0.0) - 2.0 * a0).abs())
            .max(pair.dmu1(0.0).abs())
            .max((pair.mu1(0.0) - pair.mu1_at_zero()).abs());
        out.push(outcome(
            &format!("characteristic/{name}/initial-conditions"),
            if ic_err < 1e-10 {
                Ok(format!("worst deviation {ic_err:.2e}"))
            } else {
                Err(format!("worst deviation {ic_err:.2e}"))
            },
        ));

        let mut max_res = 0.0f64;
        for i in 1..=50 {
            let t = 0.01 + (0.98 * cs.t_max() - 0.01) * i as f64 / 50.0;
            max_res = max_res.max(characteristic_residual(&pair, &cs, t, 1e-4).unwrap());
        }
        out.push(outcome(
            &format!("characteristic/{name}/ode-residual"),
            if max_res < 1e-8 {
                Ok(format!("max residual {max_res:.2e} on 50 samples"))
            } else {
                Err(format!("max residual {max_res:.2e}"))
            },
        ));

        let numeric = solve_characteristic_numeric(&cs, cs.t_max(), 1e-10).unwrap();
        let scale = pair.mu1_at_zero();
        let mut max_dev = 0.0f64;
        for i in 0..=50 {
            let t = cs.t_max() * i as f64 / 50.0;
            max_dev = max_dev
                .max((pair.mu0(t) - numeric.mu0(t)).abs())
                .max((pair.mu1(t) - scale * numeric.mu1(t)).abs());
        }
        out.push(outcome(
            &format!("characteristic/{name}/closed-vs-numeric"),
            if max_dev < 1e-6 {
                Ok(format!("max |closed - numeric| = {max_dev:.2e}"))
            } else {
                Err(format!("max |closed - numeric| = {max_dev:.2e}"))
            },
        ));
    }

    if filter.is_none() {
        // The textbook harmonic pair (sin t, cos t / 2) belongs to the
        // b = 1/2 coefficient set, not to the b = 1 set printed alongside
        // it; the conflict is resolved by exposing b as a parameter, and
        // this check documents that the b = 1 equation rejects the b = 1/2
        // pair.
        let cs = model("harmonic");
        let printed = closed_form_characteristic(
            "harmonic",
            &[("b".to_string(), 0.5)].into_iter().collect(),
        )
        .unwrap();
        let res = characteristic_residual(&printed, &cs, 0.5, 1e-4).unwrap();
        out.push(outcome(
            "characteristic/harmonic-printed-variant-flagged",
            if res > 1e-2 {
                Ok(format!(
                    "b = 1/2 pair rejected by the b = 1 equation (residual {res:.2e}); \
                     both variants ship via the `b` parameter"
                ))
            } else {
                Err(format!("expected a large residual, got {res:.2e}"))
            },
        ));

        // Ince-equation residuals for the degenerate parametric pair.
        let (lam, om) = (0.05, 1.0);
        let mu0 =
            move |t: f64| (lam * t).sinh() * (om * t).cos() + (lam * t).cosh() * (om * t).sin();
        let dmu0 = move |t: f64| {
            (lam + om) * (lam * t).cosh() * (om * t).cos()
                + (lam - om) * (lam * t).sinh() * (om * t).sin()
        };
        let mu1 =
            move |t: f64| (lam * t).sinh() * (om * t).sin() + (lam * t).cosh() * (om * t).cos();
        let dmu1 = move |t: f64| {
            (lam - om) * (lam * t).cosh() * (om * t).sin()
                + (lam + om) * (lam * t).sinh() * (om * t).cos()
        };
        let r0 = ince_residual(&mu0, &dmu0, lam, om, 0.8).unwrap();
        let r1 = ince_residual(&mu1, &dmu1, lam, om, 0.3).unwrap();
        out.push(outcome(
            "characteristic/ince-pair-residual",
            if r0 < 1e-8 && r1 < 1e-8 {
                Ok(format!("residuals {r0:.2e}, {r1:.2e}"))
            } else {
                Err(format!("residuals {r0:.2e}, {r1:.2e}"))
            },
        ));
    }
    out
}

pub fn riccati_checks(filter: Option<&str>) -> Vec<CheckOutcome> {
    let mut out = Vec::new();
    for info in CATALOG {
        if !wanted(filter, info.name) {
            continue;
        }
        let cs = model(info.name);
        let pair = characteristic_pair(&cs, 1e-10).unwrap();
        let t0 = handoff_time(&pair);
        let hi = cs.t_max() - 1e-3;

        let mut max_res = 0.0f64;
        for i in 1..=50 {
            let t = t0 + (hi - t0) * i as f64 / 50.0;
            let r = riccati_residuals(&pair, &cs, t, 1e-5).unwrap();
            max_res = max_res.max(r.into_iter().fold(0.0, f64::max));
        }
        out.push(outcome(
            &format!("riccati/{}/rate-equation-residuals", info.name),
            if max_res < 1e-6 {
                Ok(format!("max residual {max_res:.2e} on 50 samples"))
            } else {
                Err(format!("max residual {max_res:.2e}"))
            },
        ));

        let t_end = 0.95 * cs.t_max();
        let ode = riccati_ode_solution(&cs, &pair, t_end, 1e-10).unwrap();
        let mut max_dev = 0.0f64;
        for i in 1..=50 {
            let t = ode.t0 + (t_end - ode.t0) * i as f64 / 50.0;
            let c = riccati_closed_form(&pair, &cs, t).unwrap();
            let o = ode.state_at(t);
            for (x, y) in [
                (c.alpha, o.alpha),
                (c.beta, o.beta),
                (c.gamma, o.gamma),
                (c.delta, o.delta),
                (c.epsilon, o.epsilon),
                (c.kappa, o.kappa),
            ] {
                max_dev = max_dev.max((x - y).abs());
            }
        }
        out.push(outcome(
            &format!("riccati/{}/path-agreement", info.name),
            if max_dev < 1e-6 {
                Ok(format!("max |closed - ode| = {max_dev:.2e} on 50 samples"))
            } else {
                Err(format!("max |closed - ode| = {max_dev:.2e}"))
            },
        ));

        let mut w_ok = true;
        for i in 1..=20 {
            let t = cs.t_max() * i as f64 / 20.0;
            let w = weight(&cs, t).unwrap();
            w_ok &= w > 0.0 && w.is_finite();
        }
        out.push(outcome(
            &format!("riccati/{}/weight-positive", info.name),
            if w_ok {
                Ok("w(t) > 0 on 20 samples".into())
            } else {
                Err("w(t) not positive".into())
            },
        ));
    }

    for name in ["harmonic", "caldirola_kanai"] {
        if !wanted(filter, name) {
            continue;
        }
        let cs = model(name);
        let report = check_assumption1(&cs, 1.2, 1.0, 101).unwrap();
        out.push(outcome(
            &format!("riccati/{name}/assumption1-bounded"),
            if report.bounded && report.samples == 101 {
                Ok(format!(
                    "max |rho| = {:.3} at t = {:.3}",
                    report.max_abs_rho, report.argmax_t
                ))
            } else {
                Err(format!("{report:?}"))
            },
        ));
    }
    out
}

/// Draws (x, t, h) samples for which the operator series is well
/// conditioned (|λ q²| ≤ 10, away from both caustic families).
fn operator_sample(
    rng: &mut Rng,
    cs: &CoefficientSet,
    pair: &crate::characteristic::CharacteristicPair,
) -> (f64, f64, f64) {
    for _ in 0..200 {
        let t = rng.in_range(0.15 * cs.t_max(), 0.9 * cs.t_max());
        let x = rng.in_range(-2.0, 2.0);
        let h = rng.in_range(1.05, 1.5);
        if pair.is_caustic(t) {
            continue;
        }
        if let Ok(state) = riccati_closed_form(pair, cs, t) {
            let q = 2.0 * pair.mu0(t) * state.gamma;
            if q.abs() < 1e-3 {
                continue;
            }
            let z = (state.epsilon + h).powi(2) / (4.0 * state.gamma);
            if z.abs() <= 10.0 {
                return (x, t, h);
            }
        }
    }
    (1.0, 0.5 * cs.t_max(), 1.2)
}

pub fn propagator_checks(filter: Option<&str>) -> Vec<CheckOutcome> {
    let mut out = Vec::new();

    for name in ["harmonic", "caldirola_kanai"] {
        if !wanted(filter, name) {
            continue;
        }
        let cs = model(name);
        let pair = characteristic_pair(&cs, 1e-10).unwrap();
        let mut worst = 0.0f64;
        for t0 in [1e-3, 1e-4] {
            let state = riccati_closed_form(&pair, &cs, t0).unwrap();
            for h in [0.5, 1.0, 1.2, 2.0] {
                for xi in -2..=2 {
                    let x = xi as f64;
                    let phi = plane_wave_solution(&state, &pair, h, x).unwrap();
                    let dev = (phi.value - Complex64::from_polar(1.0, h * x)).norm() / t0;
                    worst = worst.max(dev);
                }
            }
        }
        out.push(outcome(
            &format!("propagator/{name}/initial-condition-recovery"),
            if worst * 1e-4 < 1e-3 {
                Ok(format!("|phi_h(x, t0) - e^(ihx)| <= {worst:.2} * t0"))
            } else {
                Err(format!("growth constant {worst:.2}"))
            },
        ));
    }

    for info in CATALOG {
        if !wanted(filter, info.name) {
            continue;
        }
        let cs = model(info.name);
        let pair = characteristic_pair(&cs, 1e-10).unwrap();
        let t = (0.6 * cs.t_max()).min(0.9);
        let phi = |x: f64, s: f64| {
            let state = riccati_closed_form(&pair, &cs, s).unwrap();
            plane_wave_solution(&state, &pair, 1.2, x).unwrap().value
        };
        let r = pde_residual(&phi, &cs, 0.5, t, 1e-3).unwrap();
        out.push(outcome(
            &format!("propagator/{}/plane-wave-pde-residual", info.name),
            if r < 1e-6 {
                Ok(format!("residual {r:.2e} at (0.5, {t:.2})"))
            } else {
                Err(format!("residual {r:.2e} at (0.5, {t:.2})"))
            },
        ));

        // Operator representation vs the direct formula at 20 seeded
        // random points (f = g = 0 for every catalog model, so the
        // specialized coefficient route applies too).
        let mut rng = Rng(0x9e3779b97f4a7c15 ^ info.name.len() as u64);
        let mut worst = 0.0f64;
        for _ in 0..20 {
            let (x, t, h) = operator_sample(&mut rng, &cs, &pair);
            let state = riccati_closed_form(&pair, &cs, t).unwrap();
            let direct = plane_wave_solution(&state, &pair, h, x).unwrap().value;
            let op = operator_plane_wave(&state, &pair, h, x, 60).unwrap().value;
            let special = corollary1_plane_wave(&state, &pair, h, x, 60).unwrap().value;
            worst = worst
                .max((direct - op).norm())
                .max((direct - special).norm());
        }
        out.push(outcome(
            &format!("propagator/{}/operator-representation", info.name),
            if worst < 1e-8 {
                Ok(format!("max |direct - operator| = {worst:.2e} over 20 points"))
            } else {
                Err(format!("max |direct - operator| = {worst:.2e}"))
            },
        ));
    }

    if filter.is_none() {
        // Factorial tail bound at the calibration point of the operator
        // series (harmonic, t = 0.5, h = 1.2).
        let cs = model("harmonic");
        let pair = characteristic_pair(&cs, 1e-10).unwrap();
        let state = riccati_closed_form(&pair, &cs, 0.5).unwrap();
        let lambda = crate::propagator::corollary1_operator_coefficient(&state, &pair);
        let q = -state.beta * 1.2 / (2.0 * state.gamma);
        let mut ok = true;
        let mut detail = String::new();
        for m in [5usize, 10, 20] {
            let spec = OperatorSpec {
                lambda_t: lambda,
                p: 2,
                max_terms: m,
            };
            match operator_apply_exponential(&spec, Complex64::new(q, 0.0), 1.0) {
                Ok(app) => {
                    let diff = (app.truncated - app.closed).norm();
                    let z = lambda.norm() * q * q;
                    let allowed = app.tail_bound / (1.0 - z / (m as f64 + 2.0)) + 1e-13;
                    ok &= diff <= allowed;
                    detail.push_str(&format!("M={m}: diff {diff:.2e} bound {:.2e}; ", app.tail_bound));
                }
                Err(e) => {
                    ok = false;
                    detail = e.to_string();
                    break;
                }
            }
        }
        out.push(outcome(
            "propagator/operator-tail-bound",
            if ok { Ok(detail.clone()) } else { Err(detail) },
        ));
    }

    for name in ["harmonic", "caldirola_kanai"] {
        if !wanted(filter, name) {
            continue;
        }
        let cs = model(name);
        let pair = characteristic_pair(&cs, 1e-10).unwrap();
        let state = riccati_closed_form(&pair, &cs, 0.5).unwrap();
        let direct = plane_wave_solution(&state, &pair, 1.2, 1.0).unwrap().value;
        let oracle = plane_wave_quadrature_oracle(&state, &pair, 1.2, 1.0, 1e-9).unwrap();
        let dev = (direct - oracle).norm();
        out.push(outcome(
            &format!("propagator/{name}/quadrature-equivalence"),
            if dev < 1e-6 {
                Ok(format!("|direct - quadrature| = {dev:.2e} at (x,t,h)=(1,0.5,1.2)"))
            } else {
                Err(format!("|direct - quadrature| = {dev:.2e}"))
            },
        ));

        let t_sweep = (1.0f64).min(0.9 * cs.t_max());
        let n_list: Vec<usize> = (1..=20).map(|k| 5 * k).collect();
        let table =
            convergence_sweep(name, &BTreeMap::new(), 1.2, 1, 1.0, t_sweep, &n_list).unwrap();
        let errs: Vec<f64> = table.rows.iter().map(|r| r.err_abs).collect();
        let m = errs.len();
        let ok = errs[m - 1] < errs[0] && errs[m - 1] <= errs[m - 2] && errs[m - 2] <= errs[m - 3];
        out.push(outcome(
            &format!("propagator/{name}/superoscillation-persistence"),
            if ok {
                Ok(format!(
                    "err_abs {:.3e} (n=5) -> {:.3e} (n=100), tail non-increasing",
                    errs[0],
                    errs[m - 1]
                ))
            } else {
                Err(format!("errors {errs:?}"))
            },
        ));
    }

    if filter.is_none() {
        let target = Complex64::from_polar(1.0, 1.2);
        let mut prev = f64::INFINITY;
        let mut monotone = true;
        let mut last = f64::INFINITY;
        for n in (5..=100).step_by(5) {
            let d = (superosc_data(n, 1.2, 1.0, 1, DataParity::CosForm).unwrap() - target).norm();
            monotone &= d < prev;
            prev = d;
            last = d;
        }
        out.push(outcome(
            "propagator/data-family-convergence",
            if monotone && last < 1e-2 {
                Ok(format!("|F_n(1,1.2) - e^(1.2i)| decreasing, {last:.2e} at n=100"))
            } else {
                Err(format!("monotone = {monotone}, final = {last:.2e}"))
            },
        ));

        let table = convergence_sweep("harmonic", &BTreeMap::new(), 1.0, 1, 1.0, 0.5, &[2, 4, 8])
            .unwrap();
        let ok = table.rows.iter().all(|r| r.err_abs < 1e-12);
        out.push(outcome(
            "propagator/degenerate-h-exact",
            if ok {
                Ok("h = 1 superposition equals phi_1 to roundoff".into())
            } else {
                Err("h = 1 superposition deviates".into())
            },
        ));
    }
    out
}

pub fn pdecheck_checks() -> Vec<CheckOutcome> {
    let mut out = Vec::new();
    let cs = model("caldirola_kanai");
    let pair = characteristic_pair(&cs, 1e-10).unwrap();
    let h = 1.2;
    let phi = |x: f64, t: f64| {
        if t < 1e-9 {
            Complex64::from_polar(1.0, h * x)
        } else {
            let state = riccati_closed_form(&pair, &cs, t).unwrap();
            plane_wave_solution(&state, &pair, h, x).unwrap().value
        }
    };

    let grid = Grid::new(-8.0, 8.0, 401).unwrap();
    let t_final = 0.5;
    let field = evolve_fd(
        &cs,
        &|x| Complex64::from_polar(1.0, h * x),
        &grid,
        t_final,
        1e-8,
        &phi,
    )
    .unwrap();
    let cmp = compare_fields(&field, &|x| phi(x, t_final), (-4.0, 4.0)).unwrap();
    out.push(outcome(
        "pdecheck/interior-window-agreement",
        if cmp.l2_rel < 1e-2 {
            Ok(format!(
                "relative L2 = {:.2e} (re {:.2e}, im {:.2e}) on 401 points",
                cmp.l2_rel, cmp.re_l2, cmp.im_l2
            ))
        } else {
            Err(format!("relative L2 = {:.2e}", cmp.l2_rel))
        },
    ));

    let r1 = pde_residual(&phi, &cs, 0.5, 0.7, 0.02).unwrap();
    let r2 = pde_residual(&phi, &cs, 0.5, 0.7, 0.01).unwrap();
    let ratio = r2 / r1;
    out.push(outcome(
        "pdecheck/residual-order",
        if ratio < 1.0 / 8.0 && ratio > 1.0 / 40.0 {
            Ok(format!("halving the step scales the residual by {ratio:.4}"))
        } else {
            Err(format!("residual ratio {ratio:.4}, expected ~1/16"))
        },
    ));

    let small = Grid::new(-4.0, 4.0, 101).unwrap();
    let gauss_init = |x: f64| Complex64::new((-x * x).exp(), 0.0);
    let gauss_bc = |x: f64, _t: f64| Complex64::new((-x * x).exp(), 0.0);
    let cs_h = model("harmonic");
    let run = || evolve_fd(&cs_h, &gauss_init, &small, 0.05, 1e-8, &gauss_bc).unwrap();
    let (a, b) = (run(), run());
    out.push(outcome(
        "pdecheck/deterministic",
        if a.values == b.values {
            Ok("two runs bit-identical".into())
        } else {
            Err("runs differ".into())
        },
    ));
    out
}

/// Everything, optionally restricted to one catalog model's suites.
pub fn run_all(filter: Option<&str>) -> Vec<CheckOutcome> {
    let mut out = Vec::new();
    out.extend(hamiltonian_checks(filter));
    out.extend(characteristic_checks(filter));
    out.extend(riccati_checks(filter));
    out.extend(propagator_checks(filter));
    if filter.is_none() || filter == Some("caldirola_kanai") {
        out.extend(pdecheck_checks());
    }
    out
}

/// Numeric-pair residual sanity used by the characteristic suites (closed
/// forms are covered separately); kept public for the acceptance tests.
pub fn numeric_pair_residual_check(name: &str) -> CheckOutcome {
    let cs = model(name);
    let pair = characteristic_pair(&cs, 1e-10).unwrap();
    debug_assert!(matches!(pair.source(), PairSource::Numeric | PairSource::ClosedForm));
    let mut max_res = 0.0f64;
    for i in 1..=30 {
        let t = 0.02 + (0.95 * cs.t_max() - 0.04) * i as f64 / 30.0;
        max_res = max_res.max(characteristic_residual(&pair, &cs, t, 1e-4).unwrap());
    }
    outcome(
        &format!("characteristic/{name}/pair-residual"),
        if max_res < 1e-6 {
            Ok(format!("max residual {max_res:.2e}"))
        } else {
            Err(format!("max residual {max_res:.2e}"))
        },
    )
}
