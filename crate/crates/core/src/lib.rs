//! Exact propagation of the 1-D Schrödinger equation
//!
//! ```text
//! i ∂ₜψ = -a(t) ∂ₓ²ψ + b(t) x²ψ - i c(t) x ∂ₓψ - i d(t) ψ - f(t) x ψ + i g(t) ∂ₓψ
//! ```
//!
//! with time-dependent quadratic Hamiltonians. The evolution kernel is a
//! generalized Mehler Gaussian whose exponent is parameterized by six
//! auxiliary functions α, β, γ, δ, ε, κ solving a Riccati-type system; those
//! in turn come from a fundamental pair μ₀, μ₁ of the linear characteristic
//! equation μ″ − τ(t)μ′ + 4σ(t)μ = 0.
//!
//! Module map:
//!
//! * [`hamiltonians`] — the coefficient catalog (harmonic, airy,
//!   Caldirola-Kanai, …) and the derived τ(t), σ(t).
//! * [`characteristic`] — closed-form and numeric fundamental pairs,
//!   including the Bessel-series pair and the Ince-equation pair.
//! * [`riccati`] — the auxiliary functions by closed form and by direct ODE
//!   integration, plus the boundedness check on ρ(t).
//! * [`propagator`] — the Gaussian kernel, plane-wave solutions φ_h,
//!   superoscillating data Fₙ/Yₙ/Zₙ and their evolutions, the convolution
//!   operator representation, and convergence sweeps.
//! * [`pdecheck`] — an independent finite-difference / Runge-Kutta solver
//!   used as an oracle against the analytic formulas.
//! * [`checks`] — runnable invariant suites aggregating the above.
//!
//! Everything is deterministic; data-parallel paths (sweep rows, stencil
//! application, grid sampling) go through [`par::ExecMode`] and are enabled
//! by the `parallel` feature (on by default) with a sequential fallback.

pub mod characteristic;
pub mod checks;
pub mod hamiltonians;
pub mod ode;
pub mod par;
pub mod pdecheck;
pub mod propagator;
pub mod quadrature;
pub mod riccati;
pub mod special;

pub use num_complex::Complex64;
