//! Coefficient sets for the equation
//!
//! ```text
//! i ∂ₜψ = -a(t) ∂ₓ²ψ + b(t) x²ψ - i c(t) x ∂ₓψ - i d(t) ψ - f(t) x ψ + i g(t) ∂ₓψ
//! ```
//!
//! a catalog of named oscillator models, and the derived coefficients
//!
//! ```text
//! τ(t) = a'/a - 2c + 4d
//! σ(t) = ab - cd + d² + (d/2)(a'/a - d'/d)
//! ```
//!
//! of the characteristic equation μ″ − τμ′ + 4σμ = 0.

use std::collections::BTreeMap;
use std::sync::Arc;

use thiserror::Error;

pub type TimeFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Debug, Clone, Error)]
pub enum ModelError {
    #[error("UnknownModel: no catalog entry named `{0}`")]
    UnknownModel(String),
    #[error("InvalidParameter: {model}.{name} = {value}: {requirement}")]
    InvalidParameter {
        model: String,
        name: String,
        value: f64,
        requirement: String,
    },
    #[error("OutOfDomain: t = {t} outside [0, {t_max}]")]
    OutOfDomain { t: f64, t_max: f64 },
    #[error("NonFinite: coefficient {name}({t}) is not finite")]
    NonFinite { name: &'static str, t: f64 },
    #[error("Singularity: {what} at t = {t}")]
    Singularity { what: String, t: f64 },
}

/// The six coefficient values at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coefficients {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub f: f64,
    pub g: f64,
}

/// τ(t), σ(t) of the characteristic equation at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharacteristicCoefficients {
    pub tau: f64,
    pub sigma: f64,
    pub t: f64,
}

/// A time-dependent quadratic Hamiltonian: the six coefficient functions,
/// analytic derivatives of `a` and `d` where the catalog provides them, and
/// the validity interval [0, t_max]. Immutable after construction; safe to
/// share across threads.
#[derive(Clone)]
pub struct CoefficientSet {
    name: String,
    params: BTreeMap<String, f64>,
    t_max: f64,
    a: TimeFn,
    b: TimeFn,
    c: TimeFn,
    d: TimeFn,
    f: TimeFn,
    g: TimeFn,
    da: TimeFn,
    dd: TimeFn,
    fg_zero: bool,
    weight_is_unity: bool,
}

impl std::fmt::Debug for CoefficientSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CoefficientSet")
            .field("name", &self.name)
            .field("params", &self.params)
            .field("t_max", &self.t_max)
            .finish()
    }
}

impl CoefficientSet {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn params(&self) -> &BTreeMap<String, f64> {
        &self.params
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    /// Shrinks or extends the validity interval (caustic avoidance is the
    /// caller's responsibility when extending).
    pub fn with_t_max(mut self, t_max: f64) -> Self {
        self.t_max = t_max;
        self
    }

    /// True when f ≡ g ≡ 0, in which case δ = ε = κ = 0 identically.
    pub fn fg_identically_zero(&self) -> bool {
        self.fg_zero
    }

    /// True when c ≡ 2d, in which case the weight w(t) ≡ 1.
    pub fn weight_identically_one(&self) -> bool {
        self.weight_is_unity
    }

    /// Raw coefficient access without domain checks (used by stencils that
    /// need values just outside [0, t_max]).
    pub fn raw(&self, t: f64) -> Coefficients {
        Coefficients {
            a: (self.a)(t),
            b: (self.b)(t),
            c: (self.c)(t),
            d: (self.d)(t),
            f: (self.f)(t),
            g: (self.g)(t),
        }
    }

    pub fn a_prime(&self, t: f64) -> f64 {
        (self.da)(t)
    }

    pub fn d_prime(&self, t: f64) -> f64 {
        (self.dd)(t)
    }

    /// The six coefficients at `t`, checked finite and inside the domain.
    pub fn eval(&self, t: f64) -> Result<Coefficients, ModelError> {
        if t < -1e-12 || t > self.t_max + 1e-12 {
            return Err(ModelError::OutOfDomain {
                t,
                t_max: self.t_max,
            });
        }
        let v = self.raw(t);
        for (name, x) in [
            ("a", v.a),
            ("b", v.b),
            ("c", v.c),
            ("d", v.d),
            ("f", v.f),
            ("g", v.g),
        ] {
            if !x.is_finite() {
                return Err(ModelError::NonFinite { name, t });
            }
        }
        Ok(v)
    }

    /// τ(t) and σ(t). The potentially singular term (d/2)(a'/a − d'/d) is
    /// evaluated in the cancelled form d·a'/(2a) − d'/2, which is its limit
    /// when d vanishes; a(t) = 0 is a genuine singularity.
    pub fn characteristic_coefficients(
        &self,
        t: f64,
    ) -> Result<CharacteristicCoefficients, ModelError> {
        let v = self.eval(t)?;
        if v.a == 0.0 {
            return Err(ModelError::Singularity {
                what: "a(t) = 0 in tau = a'/a - 2c + 4d".into(),
                t,
            });
        }
        let da = (self.da)(t);
        let dd = (self.dd)(t);
        let tau = da / v.a - 2.0 * v.c + 4.0 * v.d;
        let sigma = v.a * v.b - v.c * v.d + v.d * v.d + v.d * da / (2.0 * v.a) - 0.5 * dd;
        if !tau.is_finite() || !sigma.is_finite() {
            return Err(ModelError::Singularity {
                what: format!("non-finite characteristic coefficients (tau={tau}, sigma={sigma})"),
                t,
            });
        }
        Ok(CharacteristicCoefficients { tau, sigma, t })
    }

    /// Builder for a user-supplied model. Coefficients default to the free
    /// particle (a = 1/2, everything else 0).
    pub fn custom(name: &str, t_max: f64) -> CustomModelBuilder {
        CustomModelBuilder {
            name: name.to_string(),
            t_max,
            a: None,
            b: None,
            c: None,
            d: None,
            f: None,
            g: None,
            da: None,
            dd: None,
            fd_step: 1e-5,
        }
    }
}

/// Builder returned by [`CoefficientSet::custom`]. Supplied functions are
/// wrapped unchanged; when analytic `a'`/`d'` are not given they fall back
/// to 4th-order centered differences with the configured step.
pub struct CustomModelBuilder {
    name: String,
    t_max: f64,
    a: Option<TimeFn>,
    b: Option<TimeFn>,
    c: Option<TimeFn>,
    d: Option<TimeFn>,
    f: Option<TimeFn>,
    g: Option<TimeFn>,
    da: Option<TimeFn>,
    dd: Option<TimeFn>,
    fd_step: f64,
}

macro_rules! builder_fn {
    ($field:ident) => {
        pub fn $field(mut self, func: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
            self.$field = Some(Arc::new(func));
            self
        }
    };
}

impl CustomModelBuilder {
    builder_fn!(a);
    builder_fn!(b);
    builder_fn!(c);
    builder_fn!(d);
    builder_fn!(f);
    builder_fn!(g);
    builder_fn!(da);
    builder_fn!(dd);

    /// Step for the centered-difference fallback derivatives.
    pub fn fd_step(mut self, h: f64) -> Self {
        self.fd_step = h;
        self
    }

    pub fn build(self) -> CoefficientSet {
        let zero: TimeFn = Arc::new(|_| 0.0);
        let fg_zero = self.f.is_none() && self.g.is_none();
        let weight_is_unity = self.c.is_none() && self.d.is_none();
        let a = self.a.unwrap_or_else(|| Arc::new(|_| 0.5));
        let d = self.d.unwrap_or_else(|| zero.clone());
        let h = self.fd_step;
        let da = self.da.unwrap_or_else(|| fd_derivative(a.clone(), h));
        let dd = self.dd.unwrap_or_else(|| fd_derivative(d.clone(), h));
        CoefficientSet {
            name: self.name,
            params: BTreeMap::new(),
            t_max: self.t_max,
            a,
            b: self.b.unwrap_or_else(|| zero.clone()),
            c: self.c.unwrap_or_else(|| zero.clone()),
            d,
            f: self.f.unwrap_or_else(|| zero.clone()),
            g: self.g.unwrap_or(zero),
            da,
            dd,
            fg_zero,
            weight_is_unity,
        }
    }
}

fn fd_derivative(f: TimeFn, h: f64) -> TimeFn {
    Arc::new(move |t| {
        (-f(t + 2.0 * h) + 8.0 * f(t + h) - 8.0 * f(t - h) + f(t - 2.0 * h)) / (12.0 * h)
    })
}

/// Catalog metadata for one model.
#[derive(Debug, Clone)]
pub struct ModelInfo {
    pub name: &'static str,
    pub doc: &'static str,
    pub params: &'static [(&'static str, f64, &'static str)],
}

pub const CATALOG: &[ModelInfo] = &[
    ModelInfo {
        name: "harmonic",
        doc: "quantum harmonic oscillator: a = 1/2, b constant",
        params: &[("b", 1.0, "x² coefficient, > 0; b = 0.5 gives the textbook Mehler kernel")],
    },
    ModelInfo {
        name: "airy",
        doc: "linear-in-time potential strength: a = 1/4, b = -sign·t",
        params: &[("sign", 1.0, "+1 or -1; +1 has the Bessel-series closed form")],
    },
    ModelInfo {
        name: "caldirola_kanai",
        doc: "damped oscillator: a = e^{-2λt}/2, b = e^{2λt}/2",
        params: &[("lambda", 0.1, "damping, 0 < λ < 1")],
    },
    ModelInfo {
        name: "modified_caldirola_kanai",
        doc: "damped oscillator with drift: adds c = -2λ, d = -λ",
        params: &[
            ("lambda", 0.1, "damping, 0 ≤ λ < ω₀"),
            ("omega0", 1.0, "bare frequency, > 0"),
        ],
    },
    ModelInfo {
        name: "meiler_cordero_suslov",
        doc: "a = cos²t, b = sin²t, c = sin 2t, d = sin(2t)/2",
        params: &[],
    },
    ModelInfo {
        name: "degenerate_parametric",
        doc: "parametric amplifier; characteristic equation of Ince type",
        params: &[
            ("lambda", 0.05, "pump strength, 0 ≤ λ < ω"),
            ("omega", 1.0, "carrier frequency, > 0"),
        ],
    },
    ModelInfo {
        name: "damped",
        doc: "damped oscillator in transformed coordinates (no closed-form pair)",
        params: &[
            ("gamma", 0.1, "damping, 0 < γ < min(ω, 1/2)"),
            ("omega", 1.0, "frequency, > γ"),
        ],
    },
];

fn invalid(model: &str, name: &str, value: f64, requirement: &str) -> ModelError {
    ModelError::InvalidParameter {
        model: model.into(),
        name: name.into(),
        value,
        requirement: requirement.into(),
    }
}

fn resolve_params(
    model: &str,
    info: &ModelInfo,
    params: &BTreeMap<String, f64>,
) -> Result<BTreeMap<String, f64>, ModelError> {
    for key in params.keys() {
        if !info.params.iter().any(|(n, _, _)| n == key) {
            return Err(invalid(model, key, params[key], "unknown parameter"));
        }
    }
    let mut out = BTreeMap::new();
    for (name, default, _) in info.params {
        out.insert(
            name.to_string(),
            params.get(*name).copied().unwrap_or(*default),
        );
    }
    Ok(out)
}

/// Instantiates a catalog model. Parameters not present in `params` take
/// their defaults; out-of-range or unknown parameters are rejected.
///
/// User-defined Hamiltonians go through [`CoefficientSet::custom`] instead,
/// which wraps the caller's coefficient functions unchanged.
pub fn catalog_model(
    name: &str,
    params: &BTreeMap<String, f64>,
) -> Result<CoefficientSet, ModelError> {
    let info = CATALOG
        .iter()
        .find(|m| m.name == name)
        .ok_or_else(|| ModelError::UnknownModel(name.to_string()))?;
    let p = resolve_params(name, info, params)?;

    let half: TimeFn = Arc::new(|_| 0.5);
    let zero: TimeFn = Arc::new(|_| 0.0);

    let cs = match name {
        "harmonic" => {
            let b = p["b"];
            if b <= 0.0 {
                return Err(invalid(name, "b", b, "must be positive"));
            }
            // First zero of μ₀ = sin(Ωt)/Ω at π/Ω, Ω = sqrt(2b).
            let t_max = 0.95 * std::f64::consts::PI / (2.0 * b).sqrt();
            CoefficientSet {
                name: name.into(),
                params: p,
                t_max,
                a: half,
                b: Arc::new(move |_| b),
                c: zero.clone(),
                d: zero.clone(),
                f: zero.clone(),
                g: zero.clone(),
                da: zero.clone(),
                dd: zero,
                fg_zero: true,
                weight_is_unity: true,
            }
        }
        "airy" => {
            let sign = p["sign"];
            if sign != 1.0 && sign != -1.0 {
                return Err(invalid(name, "sign", sign, "must be +1 or -1"));
            }
            CoefficientSet {
                name: name.into(),
                params: p,
                t_max: 2.0,
                a: Arc::new(|_| 0.25),
                b: Arc::new(move |t| -sign * t),
                c: zero.clone(),
                d: zero.clone(),
                f: zero.clone(),
                g: zero.clone(),
                da: zero.clone(),
                dd: zero,
                fg_zero: true,
                weight_is_unity: true,
            }
        }
        "caldirola_kanai" => {
            let lam = p["lambda"];
            if !(lam > 0.0 && lam < 1.0) {
                return Err(invalid(name, "lambda", lam, "requires 0 < lambda < 1"));
            }
            let omega = (1.0 - lam * lam).sqrt();
            let t_max = 0.95 * std::f64::consts::PI / omega;
            CoefficientSet {
                name: name.into(),
                params: p,
                t_max,
                a: Arc::new(move |t| 0.5 * (-2.0 * lam * t).exp()),
                b: Arc::new(move |t| 0.5 * (2.0 * lam * t).exp()),
                c: zero.clone(),
                d: zero.clone(),
                f: zero.clone(),
                g: zero.clone(),
                da: Arc::new(move |t| -lam * (-2.0 * lam * t).exp()),
                dd: zero,
                fg_zero: true,
                weight_is_unity: true,
            }
        }
        "modified_caldirola_kanai" => {
            let lam = p["lambda"];
            let om0 = p["omega0"];
            if om0 <= 0.0 {
                return Err(invalid(name, "omega0", om0, "must be positive"));
            }
            if !(lam >= 0.0 && lam < om0) {
                return Err(invalid(name, "lambda", lam, "requires 0 <= lambda < omega0"));
            }
            let omega = (om0 * om0 - lam * lam).sqrt();
            let t_max = 0.95 * std::f64::consts::PI / omega;
            // Sign mapping against the canonical equation: the drift terms
            // +i(2λ x ∂ₓ + λ)ψ on the right-hand side give c = -2λ, d = -λ.
            CoefficientSet {
                name: name.into(),
                params: p,
                t_max,
                a: Arc::new(move |t| 0.5 * om0 * (-2.0 * lam * t).exp()),
                b: Arc::new(move |t| 0.5 * om0 * (2.0 * lam * t).exp()),
                c: Arc::new(move |_| -2.0 * lam),
                d: Arc::new(move |_| -lam),
                f: zero.clone(),
                g: zero.clone(),
                da: Arc::new(move |t| -lam * om0 * (-2.0 * lam * t).exp()),
                dd: zero,
                fg_zero: true,
                weight_is_unity: true, // c - 2d = -2λ + 2λ = 0
            }
        }
        "meiler_cordero_suslov" => {
            // a(π/2) = 0 ends the domain before the first zero of μ₀.
            let t_max = 0.95 * std::f64::consts::FRAC_PI_2;
            CoefficientSet {
                name: name.into(),
                params: p,
                t_max,
                a: Arc::new(|t| t.cos() * t.cos()),
                b: Arc::new(|t| t.sin() * t.sin()),
                c: Arc::new(|t| (2.0 * t).sin()),
                d: Arc::new(|t| 0.5 * (2.0 * t).sin()),
                f: zero.clone(),
                g: zero.clone(),
                da: Arc::new(|t| -(2.0 * t).sin()),
                dd: Arc::new(|t| (2.0 * t).cos()),
                fg_zero: true,
                weight_is_unity: true, // c - 2d = 0
            }
        }
        "degenerate_parametric" => {
            let lam = p["lambda"];
            let om = p["omega"];
            if om <= 0.0 {
                return Err(invalid(name, "omega", om, "must be positive"));
            }
            if !(lam >= 0.0 && lam < om) {
                return Err(invalid(name, "lambda", lam, "requires 0 <= lambda < omega"));
            }
            // First zero of μ₀ = sin(ωt)cosh(λt) + cos(ωt)sinh(λt) lies in
            // (π/2ω, π/ω].
            let mu0 = move |t: f64| {
                (om * t).sin() * (lam * t).cosh() + (om * t).cos() * (lam * t).sinh()
            };
            let zero_t = first_positive_zero(
                &mu0,
                0.5 * std::f64::consts::PI / om,
                1.000_001 * std::f64::consts::PI / om,
                4096,
            )
            .unwrap_or(std::f64::consts::PI / om);
            let t_max = 0.95 * zero_t;
            CoefficientSet {
                name: name.into(),
                params: p,
                t_max,
                a: Arc::new(move |t| 0.5 * (1.0 + lam / om * (2.0 * om * t).cos())),
                b: Arc::new(move |t| {
                    0.5 * om * om * (1.0 - lam / om * (2.0 * om * t).cos())
                }),
                c: Arc::new(move |t| lam * (2.0 * om * t).sin()),
                d: Arc::new(move |t| 0.5 * lam * (2.0 * om * t).sin()),
                f: zero.clone(),
                g: zero.clone(),
                da: Arc::new(move |t| -lam * (2.0 * om * t).sin()),
                dd: Arc::new(move |t| lam * om * (2.0 * om * t).cos()),
                fg_zero: true,
                weight_is_unity: true, // c - 2d = 0
            }
        }
        "damped" => {
            let ga = p["gamma"];
            let om = p["omega"];
            if om <= 0.0 {
                return Err(invalid(name, "omega", om, "must be positive"));
            }
            if !(ga > 0.0 && ga < om && ga < 0.5) {
                return Err(invalid(name, "gamma", ga, "requires 0 < gamma < min(omega, 1/2)"));
            }
            let cap_om = (om * om - ga * ga).sqrt();
            // a = N/D with
            //   N(t) = Ω² cos(Ωt) - γ sin(Ωt) tan(Ωt)
            //   D(t) = cosh(γt) (cos(γt) cosh(γt) - 2γ)
            // transcribed verbatim; validated by the residual suite rather
            // than by rearrangement. N has its first zero where
            // tan²(Ωt) = Ω²/γ, before the tan pole at π/2Ω.
            let num = move |t: f64| {
                cap_om * cap_om * (cap_om * t).cos()
                    - ga * (cap_om * t).sin() * (cap_om * t).tan()
            };
            let den = move |t: f64| {
                (ga * t).cosh() * ((ga * t).cos() * (ga * t).cosh() - 2.0 * ga)
            };
            let dnum = move |t: f64| {
                let s = (cap_om * t).sin();
                let sec2 = 1.0 / ((cap_om * t).cos() * (cap_om * t).cos());
                -cap_om.powi(3) * s - ga * cap_om * s * (1.0 + sec2)
            };
            let dden = move |t: f64| {
                let (sg, cg) = (ga * t).sin_cos();
                let (shg, chg) = ((ga * t).sinh(), (ga * t).cosh());
                -ga * sg * chg * chg + 2.0 * ga * cg * chg * shg - 2.0 * ga * ga * shg
            };
            let t_n = (cap_om / ga.sqrt()).atan() / cap_om;
            let t_max = 0.9 * t_n;
            let a_fn = move |t: f64| num(t) / den(t);
            CoefficientSet {
                name: name.into(),
                params: p,
                t_max,
                a: Arc::new(a_fn),
                b: Arc::new(move |t| -om * om / (8.0 * a_fn(t))),
                c: zero.clone(),
                d: zero.clone(),
                f: zero.clone(),
                g: zero.clone(),
                da: Arc::new(move |t| {
                    let d_val = den(t);
                    (dnum(t) * d_val - num(t) * dden(t)) / (d_val * d_val)
                }),
                dd: zero,
                fg_zero: true,
                weight_is_unity: true,
            }
        }
        _ => unreachable!("catalog covered above"),
    };
    Ok(cs)
}

/// First sign change of `f` in (lo, hi], located by bisection after a grid
/// scan; `None` when the sign never flips on the grid.
pub(crate) fn first_positive_zero(
    f: &dyn Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    n_grid: usize,
) -> Option<f64> {
    let mut prev_t = lo;
    let mut prev_v = f(lo);
    for i in 1..=n_grid {
        let t = lo + (hi - lo) * i as f64 / n_grid as f64;
        let v = f(t);
        if prev_v == 0.0 {
            return Some(prev_t);
        }
        if v == 0.0 {
            return Some(t);
        }
        if prev_v.signum() != v.signum() {
            let (mut a, mut b, mut fa) = (prev_t, t, prev_v);
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                let fm = f(m);
                if fm == 0.0 {
                    return Some(m);
                }
                if fa.signum() != fm.signum() {
                    b = m;
                } else {
                    a = m;
                    fa = fm;
                }
            }
            return Some(0.5 * (a + b));
        }
        prev_t = t;
        prev_v = v;
    }
    None
}
