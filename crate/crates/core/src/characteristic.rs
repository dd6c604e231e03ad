//! Fundamental pairs μ₀, μ₁ of the characteristic equation
//!
//! ```text
//! μ″ − τ(t) μ′ + 4 σ(t) μ = 0,
//! μ₀(0) = 0, μ₀′(0) = 2a(0) ≠ 0,   μ₁(0) ≠ 0, μ₁′(0) = 0,
//! ```
//!
//! by closed form for the catalog models that have one and by adaptive
//! Runge-Kutta integration otherwise, plus the Bessel series pair of the
//! `airy` model and the residual check against the Ince-type equation that
//! arises for the degenerate parametric oscillator.
//!
//! Printed closed forms whose scale does not reproduce μ₀′(0) = 2a(0) are
//! stored rescaled so every catalog pair satisfies the same initial data;
//! the rescaling never affects α, γ or the kernel, which are invariant under
//! μ₀ ↦ kμ₀ only through the combinations fixed by the initial conditions.

use std::collections::BTreeMap;
use std::sync::Arc;

use thiserror::Error;

use crate::hamiltonians::{catalog_model, first_positive_zero, CoefficientSet, ModelError, TimeFn};
use crate::ode::{integrate, OdeError, OdeOptions, OdeSolution, OdeSystem};
use crate::special::{bessel_i, gamma};

#[derive(Debug, Clone, Error)]
pub enum CharacteristicError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Integration(#[from] OdeError),
    #[error("NoClosedForm: model `{0}` has no closed-form fundamental pair")]
    NoClosedForm(String),
    #[error("Singularity: ince coefficient denominator vanishes at t = {t}")]
    InceSingularity { t: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairSource {
    ClosedForm,
    Numeric,
}

enum PairImpl {
    Closed {
        mu0: TimeFn,
        dmu0: TimeFn,
        mu1: TimeFn,
        dmu1: TimeFn,
    },
    Dense(OdeSolution),
}

/// A fundamental pair, evaluable (with first derivatives) anywhere on
/// [0, t_max]. Immutable after construction; the dense-output table of
/// numeric pairs is read-only, so concurrent evaluation is safe.
pub struct CharacteristicPair {
    source: PairSource,
    t_max: f64,
    imp: PairImpl,
    mu1_at_zero: f64,
    d0_over_2a0: f64,
    mu0_abs_max: f64,
    mu0_zeros: Vec<f64>,
}

/// Relative caustic threshold: |μ₀(t)| below this fraction of max|μ₀| on the
/// interval counts as a caustic.
pub const CAUSTIC_EPS: f64 = 1e-8;

impl CharacteristicPair {
    pub fn source(&self) -> PairSource {
        self.source
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    /// μ₁(0); numeric pairs normalize it to 1, closed forms keep their
    /// catalog scale.
    pub fn mu1_at_zero(&self) -> f64 {
        self.mu1_at_zero
    }

    /// d(0) / (2 a(0)) of the generating coefficient set (the additive
    /// constant in γ's closed form).
    pub fn d0_over_2a0(&self) -> f64 {
        self.d0_over_2a0
    }

    pub fn mu0(&self, t: f64) -> f64 {
        self.component(t, 0)
    }

    pub fn dmu0(&self, t: f64) -> f64 {
        self.component(t, 1)
    }

    pub fn mu1(&self, t: f64) -> f64 {
        self.component(t, 2)
    }

    pub fn dmu1(&self, t: f64) -> f64 {
        self.component(t, 3)
    }

    fn component(&self, t: f64, idx: usize) -> f64 {
        match &self.imp {
            PairImpl::Closed { mu0, dmu0, mu1, dmu1 } => match idx {
                0 => mu0(t),
                1 => dmu0(t),
                2 => mu1(t),
                _ => dmu1(t),
            },
            PairImpl::Dense(sol) => sol
                .sample(t)
                .expect("characteristic pair sampled outside its interval")[idx],
        }
    }

    pub fn mu0_abs_max(&self) -> f64 {
        self.mu0_abs_max
    }

    /// Zeros of μ₀ in (0, t_max], located on a 2048-point scan.
    pub fn mu0_zeros(&self) -> &[f64] {
        &self.mu0_zeros
    }

    pub fn first_caustic(&self) -> Option<f64> {
        self.mu0_zeros.first().copied()
    }

    /// Number of sign changes of μ₀ on (0, t); drives the branch of the
    /// kernel prefactor.
    pub fn mu0_crossings_before(&self, t: f64) -> usize {
        self.mu0_zeros.iter().take_while(|&&z| z < t).count()
    }

    pub fn is_caustic(&self, t: f64) -> bool {
        self.mu0(t).abs() < CAUSTIC_EPS * self.mu0_abs_max
    }

    fn finalize(mut self) -> Self {
        const N: usize = 2048;
        let mut max_abs = 0.0f64;
        let mut zeros = Vec::new();
        let mut prev_t = self.t_max / N as f64;
        let mut prev_v = self.mu0(prev_t);
        max_abs = max_abs.max(prev_v.abs());
        for i in 2..=N {
            let t = self.t_max * i as f64 / N as f64;
            let v = self.mu0(t);
            max_abs = max_abs.max(v.abs());
            if prev_v.signum() != v.signum() && prev_v != 0.0 {
                if let Some(z) =
                    first_positive_zero(&|s| self.mu0(s), prev_t, t, 8)
                {
                    zeros.push(z);
                }
            }
            prev_t = t;
            prev_v = v;
        }
        self.mu0_abs_max = max_abs.max(f64::MIN_POSITIVE);
        self.mu0_zeros = zeros;
        self
    }
}

struct CharacteristicSystem<'a> {
    cs: &'a CoefficientSet,
}

impl OdeSystem for CharacteristicSystem<'_> {
    fn dim(&self) -> usize {
        4
    }
    fn rhs(&self, t: f64, y: &[f64], dydt: &mut [f64]) {
        let v = self.cs.raw(t);
        let da = self.cs.a_prime(t);
        let dd = self.cs.d_prime(t);
        let tau = da / v.a - 2.0 * v.c + 4.0 * v.d;
        let sigma = v.a * v.b - v.c * v.d + v.d * v.d + v.d * da / (2.0 * v.a) - 0.5 * dd;
        dydt[0] = y[1];
        dydt[1] = tau * y[1] - 4.0 * sigma * y[0];
        dydt[2] = y[3];
        dydt[3] = tau * y[3] - 4.0 * sigma * y[2];
    }
}

/// Numeric fundamental pair by Dormand-Prince integration with dense output;
/// μ₁ is normalized to μ₁(0) = 1.
pub fn solve_characteristic_numeric(
    cs: &CoefficientSet,
    t_max: f64,
    tol: f64,
) -> Result<CharacteristicPair, CharacteristicError> {
    let a0 = cs.eval(0.0)?.a;
    let d0 = cs.eval(0.0)?.d;
    let y0 = [0.0, 2.0 * a0, 1.0, 0.0];
    let opts = OdeOptions {
        dense: true,
        ..OdeOptions::with_tol(tol)
    };
    let sol = integrate(&CharacteristicSystem { cs }, 0.0, t_max, &y0, &opts)?;
    Ok(CharacteristicPair {
        source: PairSource::Numeric,
        t_max,
        imp: PairImpl::Dense(sol),
        mu1_at_zero: 1.0,
        d0_over_2a0: d0 / (2.0 * a0),
        mu0_abs_max: 0.0,
        mu0_zeros: Vec::new(),
    }
    .finalize())
}

/// Closed-form fundamental pair for the catalog models that print one
/// (`harmonic`, `airy` with sign +1, `caldirola_kanai`,
/// `modified_caldirola_kanai`, `meiler_cordero_suslov`,
/// `degenerate_parametric`). `damped` and custom models return
/// [`CharacteristicError::NoClosedForm`].
pub fn closed_form_characteristic(
    model: &str,
    params: &BTreeMap<String, f64>,
) -> Result<CharacteristicPair, CharacteristicError> {
    let cs = catalog_model(model, params)?;
    closed_form_for(&cs)
}

fn closed_form_for(cs: &CoefficientSet) -> Result<CharacteristicPair, CharacteristicError> {
    let p = cs.params();
    let a0 = cs.eval(0.0)?.a;
    let d0 = cs.eval(0.0)?.d;
    let (mu0, dmu0, mu1, dmu1, mu1_at_zero): (TimeFn, TimeFn, TimeFn, TimeFn, f64) =
        match cs.name() {
            "harmonic" => {
                let om = (2.0 * p["b"]).sqrt();
                (
                    Arc::new(move |t: f64| (om * t).sin() / om),
                    Arc::new(move |t: f64| (om * t).cos()),
                    // Textbook scale μ₁(0) = 1/2; γ is scale invariant.
                    Arc::new(move |t: f64| 0.5 * (om * t).cos()),
                    Arc::new(move |t: f64| -0.5 * om * (om * t).sin()),
                    0.5,
                )
            }
            "airy" => {
                if p["sign"] != 1.0 {
                    return Err(CharacteristicError::NoClosedForm(
                        "airy with sign -1".into(),
                    ));
                }
                // Bessel-series pair for μ″ - t μ = 0, rescaled by 1/2 so
                // μ₀′(0) = 2a(0) = 1/2.
                let s0 = 0.5 * 3.0f64.powf(-2.0 / 3.0) * gamma(1.0 / 3.0);
                let s1 = 3.0f64.powf(-1.0 / 3.0) * gamma(2.0 / 3.0);
                let z = |t: f64| 2.0 / 3.0 * t.powf(1.5);
                let ib = |v: f64, z: f64| {
                    bessel_i(v, z).expect("bessel series converges on the airy domain")
                };
                (
                    Arc::new(move |t: f64| {
                        if t < 1e-3 {
                            0.5 * t * (1.0 + t.powi(3) / 12.0)
                        } else {
                            s0 * t.sqrt() * ib(1.0 / 3.0, z(t))
                        }
                    }),
                    Arc::new(move |t: f64| {
                        if t < 1e-3 {
                            0.5 * (1.0 + t.powi(3) / 3.0)
                        } else {
                            s0 * t * ib(-2.0 / 3.0, z(t))
                        }
                    }),
                    Arc::new(move |t: f64| {
                        if t < 1e-3 {
                            1.0 + t.powi(3) / 6.0
                        } else {
                            s1 * t.sqrt() * ib(-1.0 / 3.0, z(t))
                        }
                    }),
                    Arc::new(move |t: f64| {
                        if t < 1e-3 {
                            0.5 * t * t
                        } else {
                            s1 * t * ib(2.0 / 3.0, z(t))
                        }
                    }),
                    1.0,
                )
            }
            "caldirola_kanai" => {
                let lam = p["lambda"];
                let om = (1.0 - lam * lam).sqrt();
                (
                    Arc::new(move |t: f64| (-lam * t).exp() * (om * t).sin() / om),
                    Arc::new(move |t: f64| {
                        (-lam * t).exp() * ((om * t).cos() - lam / om * (om * t).sin())
                    }),
                    Arc::new(move |t: f64| {
                        (-lam * t).exp() * ((om * t).cos() + lam / om * (om * t).sin())
                    }),
                    Arc::new(move |t: f64| -(-lam * t).exp() * (om * t).sin() / om),
                    1.0,
                )
            }
            "modified_caldirola_kanai" => {
                let lam = p["lambda"];
                let om0 = p["omega0"];
                let om = (om0 * om0 - lam * lam).sqrt();
                (
                    Arc::new(move |t: f64| om0 * (-lam * t).exp() * (om * t).sin() / om),
                    Arc::new(move |t: f64| {
                        om0 * (-lam * t).exp() * ((om * t).cos() - lam / om * (om * t).sin())
                    }),
                    Arc::new(move |t: f64| {
                        (-lam * t).exp() * ((om * t).cos() + lam / om * (om * t).sin())
                    }),
                    Arc::new(move |t: f64| {
                        -om0 * om0 * (-lam * t).exp() * (om * t).sin() / om
                    }),
                    1.0,
                )
            }
            "meiler_cordero_suslov" => (
                Arc::new(|t: f64| t.cos() * t.sinh() + t.cosh() * t.sin()),
                Arc::new(|t: f64| 2.0 * t.cosh() * t.cos()),
                Arc::new(|t: f64| t.cosh() * t.cos() + t.sinh() * t.sin()),
                Arc::new(|t: f64| 2.0 * t.sinh() * t.cos()),
                1.0,
            ),
            "degenerate_parametric" => {
                let lam = p["lambda"];
                let om = p["omega"];
                // Ince-equation pair, with μ₀ rescaled by 1/ω so that
                // μ₀′(0) = (λ+ω)/ω = 2a(0).
                (
                    Arc::new(move |t: f64| {
                        ((lam * t).sinh() * (om * t).cos() + (lam * t).cosh() * (om * t).sin())
                            / om
                    }),
                    Arc::new(move |t: f64| {
                        ((lam + om) * (lam * t).cosh() * (om * t).cos()
                            + (lam - om) * (lam * t).sinh() * (om * t).sin())
                            / om
                    }),
                    Arc::new(move |t: f64| {
                        (lam * t).sinh() * (om * t).sin() + (lam * t).cosh() * (om * t).cos()
                    }),
                    Arc::new(move |t: f64| {
                        (lam - om) * (lam * t).cosh() * (om * t).sin()
                            + (lam + om) * (lam * t).sinh() * (om * t).cos()
                    }),
                    1.0,
                )
            }
            other => return Err(CharacteristicError::NoClosedForm(other.to_string())),
        };
    Ok(CharacteristicPair {
        source: PairSource::ClosedForm,
        t_max: cs.t_max(),
        imp: PairImpl::Closed {
            mu0,
            dmu0,
            mu1,
            dmu1,
        },
        mu1_at_zero,
        d0_over_2a0: d0 / (2.0 * a0),
        mu0_abs_max: 0.0,
        mu0_zeros: Vec::new(),
    }
    .finalize())
}

/// Best available pair for a coefficient set: closed form when the catalog
/// has one, numeric integration at `tol` otherwise. The pair inherits the
/// set's (possibly overridden) t_max.
pub fn characteristic_pair(
    cs: &CoefficientSet,
    tol: f64,
) -> Result<CharacteristicPair, CharacteristicError> {
    match closed_form_for(cs) {
        Ok(mut pair) => {
            if (pair.t_max - cs.t_max()).abs() > 1e-15 {
                pair.t_max = cs.t_max();
                pair = pair.finalize();
            }
            Ok(pair)
        }
        Err(CharacteristicError::NoClosedForm(_)) => {
            solve_characteristic_numeric(cs, cs.t_max(), tol)
        }
        Err(e) => Err(e),
    }
}

/// Residual |μ″ − τμ′ + 4σμ| at `t`, with μ″ from a 4th-order centered
/// difference of μ′.
pub fn characteristic_residual(
    pair: &CharacteristicPair,
    cs: &CoefficientSet,
    t: f64,
    step: f64,
) -> Result<f64, CharacteristicError> {
    let cc = cs.characteristic_coefficients(t)?;
    let ddmu = (-pair.dmu0(t + 2.0 * step) + 8.0 * pair.dmu0(t + step)
        - 8.0 * pair.dmu0(t - step)
        + pair.dmu0(t - 2.0 * step))
        / (12.0 * step);
    let r0 = (ddmu - cc.tau * pair.dmu0(t) + 4.0 * cc.sigma * pair.mu0(t)).abs();
    let ddmu1 = (-pair.dmu1(t + 2.0 * step) + 8.0 * pair.dmu1(t + step)
        - 8.0 * pair.dmu1(t - step)
        + pair.dmu1(t - 2.0 * step))
        / (12.0 * step);
    let r1 = (ddmu1 - cc.tau * pair.dmu1(t) + 4.0 * cc.sigma * pair.mu1(t)).abs();
    Ok(r0.max(r1))
}

/// Residual of the Ince-type equation
///
/// ```text
/// μ″ + [2λω sin(2ωt) / (ω + λ cos 2ωt)] μ′
///    + [(ω³ − 3ωλ² − (ω²λ + λ³) cos 2ωt) / (ω + λ cos 2ωt)] μ = 0
/// ```
///
/// with μ″ from a 4th-order centered difference of `mu` (step 1e-3) and μ′
/// taken from `dmu`.
pub fn ince_residual(
    mu: &dyn Fn(f64) -> f64,
    dmu: &dyn Fn(f64) -> f64,
    lambda: f64,
    omega: f64,
    t: f64,
) -> Result<f64, CharacteristicError> {
    let den = omega + lambda * (2.0 * omega * t).cos();
    if den.abs() < 1e-12 {
        return Err(CharacteristicError::InceSingularity { t });
    }
    let p = 2.0 * lambda * omega * (2.0 * omega * t).sin() / den;
    let q = (omega.powi(3) - 3.0 * omega * lambda * lambda
        - (omega * omega * lambda + lambda.powi(3)) * (2.0 * omega * t).cos())
        / den;
    let h = 1e-3;
    let ddmu =
        (-mu(t + 2.0 * h) + 16.0 * mu(t + h) - 30.0 * mu(t) + 16.0 * mu(t - h) - mu(t - 2.0 * h))
            / (12.0 * h * h);
    Ok((ddmu + p * dmu(t) + q * mu(t)).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::adaptive_simpson;
    use proptest::prelude::*;

    fn params(kv: &[(&str, f64)]) -> BTreeMap<String, f64> {
        kv.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    fn initial_conditions_hold(pair: &CharacteristicPair, a0: f64, tol: f64) {
        assert!(pair.mu0(0.0).abs() < tol);
        assert!((pair.dmu0(0.0) - 2.0 * a0).abs() < tol);
        assert!(pair.mu1(0.0).abs() > 1e-3);
        assert!((pair.mu1(0.0) - pair.mu1_at_zero()).abs() < tol);
        assert!(pair.dmu1(0.0).abs() < tol);
    }

    #[test]
    fn closed_form_initial_conditions() {
        for (name, ps) in [
            ("harmonic", params(&[])),
            ("airy", params(&[])),
            ("caldirola_kanai", params(&[("lambda", 0.1)])),
            (
                "modified_caldirola_kanai",
                params(&[("lambda", 0.1), ("omega0", 1.0)]),
            ),
            ("meiler_cordero_suslov", params(&[])),
            (
                "degenerate_parametric",
                params(&[("lambda", 0.05), ("omega", 1.0)]),
            ),
        ] {
            let cs = catalog_model(name, &ps).unwrap();
            let pair = closed_form_characteristic(name, &ps).unwrap();
            initial_conditions_hold(&pair, cs.eval(0.0).unwrap().a, 1e-12);
        }
    }

    #[test]
    fn closed_form_residuals_small() {
        for (name, ps) in [
            ("harmonic", params(&[])),
            ("airy", params(&[])),
            ("caldirola_kanai", params(&[("lambda", 0.1)])),
            (
                "modified_caldirola_kanai",
                params(&[("lambda", 0.1), ("omega0", 1.0)]),
            ),
            ("meiler_cordero_suslov", params(&[])),
            (
                "degenerate_parametric",
                params(&[("lambda", 0.05), ("omega", 1.0)]),
            ),
        ] {
            let cs = catalog_model(name, &ps).unwrap();
            let pair = closed_form_characteristic(name, &ps).unwrap();
            for i in 1..=20 {
                let t = 0.02 + (cs.t_max() - 0.04) * i as f64 / 20.0;
                let r = characteristic_residual(&pair, &cs, t, 1e-4).unwrap();
                assert!(r < 1e-8, "{name} residual {r} at t = {t}");
            }
        }
    }

    #[test]
    fn numeric_matches_closed_forms() {
        for (name, ps) in [
            ("harmonic", params(&[])),
            ("caldirola_kanai", params(&[("lambda", 0.1)])),
            ("meiler_cordero_suslov", params(&[])),
            (
                "degenerate_parametric",
                params(&[("lambda", 0.05), ("omega", 1.0)]),
            ),
        ] {
            let cs = catalog_model(name, &ps).unwrap();
            let closed = closed_form_characteristic(name, &ps).unwrap();
            let numeric = solve_characteristic_numeric(&cs, cs.t_max(), 1e-10).unwrap();
            // Numeric pairs normalize μ₁(0) = 1; align scales before comparing.
            let scale = closed.mu1_at_zero();
            for i in 0..=50 {
                let t = cs.t_max() * i as f64 / 50.0;
                assert!(
                    (closed.mu0(t) - numeric.mu0(t)).abs() < 1e-6,
                    "{name} mu0 at {t}"
                );
                assert!(
                    (closed.mu1(t) - scale * numeric.mu1(t)).abs() < 1e-6,
                    "{name} mu1 at {t}"
                );
            }
        }
    }

    #[test]
    fn caldirola_kanai_numeric_matches_printed_mu0() {
        let lam = 0.1;
        let om = (1.0f64 - lam * lam).sqrt();
        let cs = catalog_model("caldirola_kanai", &params(&[("lambda", lam)])).unwrap();
        let pair = solve_characteristic_numeric(&cs, 2.0, 1e-10).unwrap();
        for i in 1..=20 {
            let t = 2.0 * i as f64 / 20.0;
            let printed = (om * t).sin() / ((lam * t).exp() * om);
            assert!((pair.mu0(t) - printed).abs() < 1e-8, "t = {t}");
        }
    }

    #[test]
    fn harmonic_derived_pair_has_sqrt2_frequency() {
        // With a = 1/2, b = 1 the characteristic equation is μ″ + 2μ = 0:
        // μ₀ = sin(√2 t)/√2, μ₁ = cos(√2 t) (for μ₁(0) = 1). The printed
        // textbook pair (sin t, cos t / 2) solves the b = 1/2 variant
        // instead; both are exposed through the `b` parameter.
        let cs = catalog_model("harmonic", &BTreeMap::new()).unwrap();
        let pair = solve_characteristic_numeric(&cs, 1.0, 1e-10).unwrap();
        let rt2 = 2.0f64.sqrt();
        for i in 1..=10 {
            let t = i as f64 / 10.0;
            assert!((pair.mu0(t) - (rt2 * t).sin() / rt2).abs() < 1e-9);
            assert!((pair.mu1(t) - (rt2 * t).cos()).abs() < 1e-9);
        }
        // and the printed pair fails the b = 1 equation
        let printed = closed_form_characteristic("harmonic", &params(&[("b", 0.5)])).unwrap();
        let r = characteristic_residual(&printed, &cs, 0.5, 1e-4).unwrap();
        assert!(r > 1e-2, "printed pair should not solve the b = 1 equation");
    }

    #[test]
    fn printed_airy_combination_has_unit_slope_at_zero() {
        // The raw Bessel combination 3^{-2/3} Γ(1/3) √t I_{1/3}((2/3)t^{3/2})
        // vanishes at 0 with slope 1 (the catalog entry rescales it by 1/2
        // to meet μ₀'(0) = 2a(0) for a(0) = 1/4).
        let mu0p = |t: f64| {
            3.0f64.powf(-2.0 / 3.0)
                * gamma(1.0 / 3.0)
                * t.sqrt()
                * bessel_i(1.0 / 3.0, 2.0 / 3.0 * t.powf(1.5)).unwrap()
        };
        assert_eq!(mu0p(0.0), 0.0);
        let h = 1e-6;
        assert!((mu0p(h) / h - 1.0).abs() < 1e-9);
    }

    #[test]
    fn airy_pair_matches_bessel_reference_values() {
        let pair = closed_form_characteristic("airy", &BTreeMap::new()).unwrap();
        // Reference values of the unscaled Bessel combination at t = 0.8;
        // the catalog pair carries the 1/2 rescaling on μ₀.
        assert!((pair.mu0(0.8) - 0.5 * 0.834_551_809_862_056_9).abs() < 1e-13);
        assert!((pair.dmu0(0.8) - 0.5 * 1.174_337_271_582_140_3).abs() < 1e-13);
        assert!((pair.mu1(0.8) - 1.086_800_085_463_078_7).abs() < 1e-13);
        assert!((pair.dmu1(0.8) - 0.331_039_779_499_865_2).abs() < 1e-13);
    }

    #[test]
    fn airy_mu0_satisfies_equation_with_linear_sigma() {
        // For the airy model 4σ = b = -t, so μ″ = tμ.
        let cs = catalog_model("airy", &BTreeMap::new()).unwrap();
        let pair = closed_form_characteristic("airy", &BTreeMap::new()).unwrap();
        for i in 1..=15 {
            let t = 0.1 + 1.8 * i as f64 / 15.0;
            let r = characteristic_residual(&pair, &cs, t, 1e-4).unwrap();
            assert!(r < 1e-8, "residual {r} at t = {t}");
        }
    }

    #[test]
    fn ince_pair_residuals() {
        let (lam, om) = (0.05, 1.0);
        let mu0 = move |t: f64| (lam * t).sinh() * (om * t).cos() + (lam * t).cosh() * (om * t).sin();
        let dmu0 = move |t: f64| {
            (lam + om) * (lam * t).cosh() * (om * t).cos()
                + (lam - om) * (lam * t).sinh() * (om * t).sin()
        };
        let mu1 = move |t: f64| (lam * t).sinh() * (om * t).sin() + (lam * t).cosh() * (om * t).cos();
        let dmu1 = move |t: f64| {
            (lam - om) * (lam * t).cosh() * (om * t).sin()
                + (lam + om) * (lam * t).sinh() * (om * t).cos()
        };
        assert!(ince_residual(&mu0, &dmu0, lam, om, 0.8).unwrap() < 1e-8);
        assert!(ince_residual(&mu1, &dmu1, lam, om, 0.3).unwrap() < 1e-8);
        // a non-solution is rejected
        let bad = |t: f64| t * t;
        let dbad = |t: f64| 2.0 * t;
        assert!(ince_residual(&bad, &dbad, lam, om, 1.0).unwrap() > 1e-2);
    }

    #[test]
    fn ince_singularity_detected() {
        // omega + lambda cos(2 omega t) = 0 at cos(2t) = -1/2 for λ=2, ω=1.
        let mu = |t: f64| t;
        let dmu = |_: f64| 1.0;
        let t = std::f64::consts::PI / 3.0;
        assert!(matches!(
            ince_residual(&mu, &dmu, 2.0, 1.0, t),
            Err(CharacteristicError::InceSingularity { .. })
        ));
    }

    #[test]
    fn damped_has_no_closed_form() {
        assert!(matches!(
            closed_form_characteristic("damped", &BTreeMap::new()),
            Err(CharacteristicError::NoClosedForm(_))
        ));
    }

    #[test]
    fn caustic_bookkeeping() {
        // extend caldirola_kanai past the first zero of μ₀ at π/ω
        let lam = 0.1;
        let om = (1.0f64 - lam * lam).sqrt();
        let cs = catalog_model("caldirola_kanai", &params(&[("lambda", lam)]))
            .unwrap()
            .with_t_max(4.0);
        let pair = characteristic_pair(&cs, 1e-10).unwrap();
        let zero = std::f64::consts::PI / om;
        let fc = pair.first_caustic().expect("one caustic inside [0, 4]");
        assert!((fc - zero).abs() < 1e-6, "caustic at {fc}, expected {zero}");
        assert_eq!(pair.mu0_crossings_before(zero - 0.1), 0);
        assert_eq!(pair.mu0_crossings_before(zero + 0.1), 1);
        assert!(pair.is_caustic(zero + 1e-12));
        assert!(!pair.is_caustic(1.0));
    }

    proptest! {
        // Abel identity: W(t) = W(0) exp(∫₀ᵗ τ), a consequence of the
        // characteristic equation alone.
        #[test]
        fn wronskian_identity(t in 0.05f64..1.4, lam in 0.02f64..0.4) {
            let ps = params(&[("lambda", lam)]);
            let cs = catalog_model("caldirola_kanai", &ps).unwrap();
            let pair = closed_form_characteristic("caldirola_kanai", &ps).unwrap();
            let w = |s: f64| pair.dmu0(s) * pair.mu1(s) - pair.mu0(s) * pair.dmu1(s);
            let tau_int = adaptive_simpson(
                &|s| cs.characteristic_coefficients(s).unwrap().tau,
                0.0,
                t,
                1e-12,
                40,
            )
            .unwrap();
            let expected = w(0.0) * tau_int.exp();
            prop_assert!((w(t) - expected).abs() < 1e-8);
        }

        #[test]
        fn wronskian_identity_meiler(t in 0.05f64..1.4) {
            let cs = catalog_model("meiler_cordero_suslov", &BTreeMap::new()).unwrap();
            let pair = closed_form_characteristic("meiler_cordero_suslov", &BTreeMap::new()).unwrap();
            let w = |s: f64| pair.dmu0(s) * pair.mu1(s) - pair.mu0(s) * pair.dmu1(s);
            let tau_int = adaptive_simpson(
                &|s| cs.characteristic_coefficients(s).unwrap().tau,
                0.0,
                t,
                1e-12,
                40,
            )
            .unwrap();
            prop_assert!((w(t) - w(0.0) * tau_int.exp()).abs() < 1e-8);
        }
    }
}
