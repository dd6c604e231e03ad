//! Quadrature: adaptive Simpson for the smooth Riccati integrals, adaptive
//! Gauss-Kronrod 15(7) for complex integrands, and a truncated-range
//! oscillatory rule for Gaussian-phase integrals over the whole line.

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum QuadratureError {
    #[error("QuadratureFailure: adaptive rule did not meet tol {tol} on [{a}, {b}] (max depth {max_depth})")]
    DepthExceeded {
        a: f64,
        b: f64,
        tol: f64,
        max_depth: u32,
    },
    #[error("QuadratureFailure: non-finite integrand value at {x}")]
    NonFinite { x: f64 },
    #[error("QuadratureFailure: degenerate quadratic phase (gamma = 0)")]
    DegeneratePhase,
}

/// Adaptive Simpson with Richardson correction.
///
/// Defaults elsewhere in the crate: `tol = 1e-10`, `max_depth = 40`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    tol: f64,
    max_depth: u32,
) -> Result<f64, QuadratureError> {
    if a == b {
        return Ok(0.0);
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    for (x, v) in [(a, fa), (m, fm), (b, fb)] {
        if !v.is_finite() {
            return Err(QuadratureError::NonFinite { x });
        }
    }
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth)
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64, QuadratureError> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    if !flm.is_finite() {
        return Err(QuadratureError::NonFinite { x: lm });
    }
    if !frm.is_finite() {
        return Err(QuadratureError::NonFinite { x: rm });
    }
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 {
        return Err(QuadratureError::DepthExceeded {
            a,
            b,
            tol,
            max_depth: 0,
        });
    }
    let l = simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?;
    let r = simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?;
    Ok(l + r)
}

// Gauss-Kronrod 15(7) nodes and weights (QUADPACK values).
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_33,
    0.949_107_912_342_758_524_526_189_684_047_85,
    0.864_864_423_359_769_072_789_712_788_640_93,
    0.741_531_185_599_394_439_863_864_773_280_79,
    0.586_087_235_467_691_130_294_144_838_258_73,
    0.405_845_151_377_397_166_906_606_412_076_96,
    0.207_784_955_007_898_467_600_689_403_773_24,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_08,
    0.279_705_391_489_276_667_901_467_771_423_78,
    0.381_830_050_505_118_944_950_369_775_488_98,
    0.417_959_183_673_469_387_755_102_040_816_33,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_97,
    0.063_092_092_629_978_553_290_700_663_189_2,
    0.104_790_010_322_250_183_839_876_322_541_52,
    0.140_653_259_715_525_918_745_189_590_510_24,
    0.169_004_726_639_267_902_826_583_426_598_55,
    0.190_350_578_064_785_409_913_256_402_421_01,
    0.204_432_940_075_298_892_414_161_999_234_65,
    0.209_482_141_084_727_828_012_999_174_891_71,
];

/// One Gauss-Kronrod 15(7) panel for a complex integrand; returns the
/// Kronrod estimate and |K15 - G7| as the error estimate.
pub fn gk15_complex<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> (Complex64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let fsum = f(center - dx) + f(center + dx);
        kronrod += fsum * WGK[j];
        if j % 2 == 1 {
            gauss += fsum * WG[j / 2];
        }
    }
    kronrod *= half;
    gauss *= half;
    (kronrod, (kronrod - gauss).norm())
}

/// Adaptive Gauss-Kronrod for complex integrands, bisecting until the
/// per-panel error estimate meets a length-proportional share of `tol`.
pub fn adaptive_gk_complex<F: Fn(f64) -> Complex64>(
    f: &F,
    a: f64,
    b: f64,
    tol: f64,
    max_depth: u32,
) -> Result<Complex64, QuadratureError> {
    fn rec<F: Fn(f64) -> Complex64>(
        f: &F,
        a: f64,
        b: f64,
        tol: f64,
        depth: u32,
    ) -> Result<Complex64, QuadratureError> {
        let (val, err) = gk15_complex(f, a, b);
        if !val.is_finite() {
            return Err(QuadratureError::NonFinite { x: 0.5 * (a + b) });
        }
        if err <= tol {
            return Ok(val);
        }
        if depth == 0 {
            return Err(QuadratureError::DepthExceeded {
                a,
                b,
                tol,
                max_depth: 0,
            });
        }
        let m = 0.5 * (a + b);
        Ok(rec(f, a, m, 0.5 * tol, depth - 1)? + rec(f, m, b, 0.5 * tol, depth - 1)?)
    }
    rec(f, a, b, tol, max_depth)
}

/// Truncation data for ∫ exp(i(γ y² + B y)) dy over the real line:
/// the finite window [-y_cut, y_cut] is chosen so the phase slope at the cut
/// is at least `slope_min`, and the two half-line tails are summed by
/// integration by parts to three orders with an explicit remainder bound.
#[derive(Debug, Clone, Copy)]
pub struct OscillatoryTruncation {
    pub y_cut: f64,
    /// Magnitude bound on the neglected part of both tails.
    pub tail_remainder: f64,
}

/// Phase-slope floor at the truncation point. 150 keeps the three-term tail
/// remainder near 1e-10 for |γ| of order one.
pub const OSC_SLOPE_MIN: f64 = 150.0;

pub fn oscillatory_truncation(gamma: f64, b_lin: f64) -> Result<OscillatoryTruncation, QuadratureError> {
    if gamma == 0.0 || !gamma.is_finite() || !b_lin.is_finite() {
        return Err(QuadratureError::DegeneratePhase);
    }
    let y_cut = (OSC_SLOPE_MIN + b_lin.abs()) / (2.0 * gamma.abs());
    let slope = 2.0 * gamma.abs() * y_cut - b_lin.abs();
    // After three integrations by parts the remainder of each tail is
    // bounded by 12 γ² / slope⁵.
    let tail_remainder = 2.0 * 12.0 * gamma * gamma / slope.powi(5);
    Ok(OscillatoryTruncation {
        y_cut,
        tail_remainder,
    })
}

/// Analytic three-term tail ∫_{y_cut}^{∞} exp(i(γ y² + B y)) dy plus its
/// mirror over (-∞, -y_cut] (obtained from the substitution y → -y).
pub fn oscillatory_tails(gamma: f64, b_lin: f64, y_cut: f64) -> Complex64 {
    let one_sided = |b: f64| -> Complex64 {
        let phase = gamma * y_cut * y_cut + b * y_cut;
        let dp = 2.0 * gamma * y_cut + b;
        let ddp = 2.0 * gamma;
        let series = Complex64::new(ddp / dp.powi(3), 1.0 / dp - 3.0 * ddp * ddp / dp.powi(5));
        Complex64::from_polar(1.0, phase) * series
    };
    one_sided(b_lin) + one_sided(-b_lin)
}

/// Splits [-y_cut, y_cut] into panels covering roughly π/2 of phase change
/// of γ y² + B y each, so a single GK15 panel resolves the oscillation.
pub fn phase_panels(gamma: f64, b_lin: f64, y_cut: f64) -> Vec<(f64, f64)> {
    let mut edges = vec![-y_cut];
    let mut y = -y_cut;
    while y < y_cut {
        let slope = (2.0 * gamma * y + b_lin).abs().max(1.0);
        let step = std::f64::consts::FRAC_PI_2 / slope;
        y = (y + step).min(y_cut);
        edges.push(y);
    }
    edges.windows(2).map(|w| (w[0], w[1])).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_polynomial_and_sine() {
        let v = adaptive_simpson(&|x: f64| x * x, 0.0, 1.0, 1e-12, 40).unwrap();
        assert!((v - 1.0 / 3.0).abs() < 1e-12);
        let v = adaptive_simpson(&|x: f64| x.sin(), 0.0, std::f64::consts::PI, 1e-12, 40).unwrap();
        assert!((v - 2.0).abs() < 1e-11);
    }

    #[test]
    fn gk_complex_full_turn_is_zero() {
        let f = |x: f64| Complex64::from_polar(1.0, x);
        let v = adaptive_gk_complex(&f, 0.0, 2.0 * std::f64::consts::PI, 1e-12, 40).unwrap();
        assert!(v.norm() < 1e-12);
    }

    #[test]
    fn oscillatory_rule_reproduces_fresnel_integral() {
        // ∫_R e^{i y²} dy = sqrt(π) e^{iπ/4}
        let gamma = 1.0;
        let b_lin = 0.0;
        let tr = oscillatory_truncation(gamma, b_lin).unwrap();
        let f = |y: f64| Complex64::from_polar(1.0, gamma * y * y + b_lin * y);
        let mut acc = Complex64::new(0.0, 0.0);
        for (a, b) in phase_panels(gamma, b_lin, tr.y_cut) {
            acc += adaptive_gk_complex(&f, a, b, 1e-12, 30).unwrap();
        }
        acc += oscillatory_tails(gamma, b_lin, tr.y_cut);
        let exact = Complex64::new(1.253_314_137_315_500_3, 1.253_314_137_315_500_3);
        assert!(
            (acc - exact).norm() < 1e-8,
            "got {acc}, expected {exact}, remainder bound {}",
            tr.tail_remainder
        );
    }

    #[test]
    fn degenerate_phase_rejected() {
        assert!(matches!(
            oscillatory_truncation(0.0, 1.0),
            Err(QuadratureError::DegeneratePhase)
        ));
    }
}
