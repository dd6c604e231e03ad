//! Gamma function and the modified Bessel series used by the closed-form
//! characteristic pairs.

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum SpecialError {
    /// The series did not meet its stopping rule within the term budget;
    /// the argument is too large for series evaluation.
    #[error("NonConvergence: bessel series for I_{v}({z}) did not converge in {terms} terms")]
    NonConvergence { v: f64, z: f64, terms: usize },
    #[error("OutOfRange: bessel order v = {v} must satisfy v > -1")]
    OrderOutOfRange { v: f64 },
    #[error("OutOfRange: bessel argument z = {z} must be >= 0")]
    ArgumentOutOfRange { z: f64 },
}

/// Lanczos coefficients, g = 7, 9 terms. Relative error ~1e-13 over the
/// positive real axis.
const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Gamma function with reflection for the left half-line.
pub fn gamma(x: f64) -> f64 {
    if x < 0.5 {
        std::f64::consts::PI / ((std::f64::consts::PI * x).sin() * gamma(1.0 - x))
    } else {
        let x = x - 1.0;
        let mut acc = LANCZOS[0];
        for (i, &p) in LANCZOS.iter().enumerate().skip(1) {
            acc += p / (x + i as f64);
        }
        let w = x + LANCZOS_G + 0.5;
        (2.0 * std::f64::consts::PI).sqrt() * w.powf(x + 0.5) * (-w).exp() * acc
    }
}

/// ln Γ(x) for x > 0, in log form to avoid overflow for large arguments.
pub fn ln_gamma(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    if x < 0.5 {
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, &p) in LANCZOS.iter().enumerate().skip(1) {
        acc += p / (x + i as f64);
    }
    let w = x + LANCZOS_G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * w.ln() - w + acc.ln()
}

/// ln n! via `ln_gamma`.
pub fn ln_factorial(n: usize) -> f64 {
    ln_gamma(n as f64 + 1.0)
}

const BESSEL_MAX_TERMS: usize = 200;
const BESSEL_TERM_CUTOFF: f64 = 1e-16;

/// Modified Bessel function of the first kind by its power series
///
/// ```text
/// I_v(z) = (z/2)^v Σ_k (z²/4)^k / (k! Γ(v+k+1))
/// ```
///
/// truncated once the next term falls below `1e-16` of the running sum.
/// Supports v > -1 and z ≥ 0, which covers the orders ±1/3, ±2/3 needed by
/// the Airy-type characteristic pair.
pub fn bessel_i(v: f64, z: f64) -> Result<f64, SpecialError> {
    if !(v > -1.0) {
        return Err(SpecialError::OrderOutOfRange { v });
    }
    if !(z >= 0.0) {
        return Err(SpecialError::ArgumentOutOfRange { z });
    }
    if z == 0.0 {
        return Ok(if v == 0.0 {
            1.0
        } else if v > 0.0 {
            0.0
        } else {
            f64::INFINITY
        });
    }
    let q = 0.25 * z * z;
    let mut term = 1.0 / gamma(v + 1.0);
    let mut sum = term;
    for k in 0..BESSEL_MAX_TERMS {
        term *= q / ((k as f64 + 1.0) * (v + k as f64 + 1.0));
        sum += term;
        if term.abs() < BESSEL_TERM_CUTOFF * sum.abs() {
            return Ok((0.5 * z).powf(v) * sum);
        }
    }
    Err(SpecialError::NonConvergence {
        v,
        z,
        terms: BESSEL_MAX_TERMS,
    })
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;

    // Reference values computed with an independent arbitrary-precision
    // evaluation of the same series / Γ definitions (30 digits, rounded).
    const GAMMA_THIRD: f64 = 2.678_938_534_707_747_6;
    const GAMMA_TWO_THIRDS: f64 = 1.354_117_939_426_400_4;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn gamma_reference_values() {
        assert!(rel(gamma(1.0 / 3.0), GAMMA_THIRD) < 1e-13);
        assert!(rel(gamma(2.0 / 3.0), GAMMA_TWO_THIRDS) < 1e-13);
        assert!(rel(gamma(4.0 / 3.0), 0.892_979_511_569_249_2) < 1e-13);
        assert!(rel(gamma(0.5), std::f64::consts::PI.sqrt()) < 1e-13);
        assert!(rel(gamma(5.0), 24.0) < 1e-13);
        assert!(rel(gamma(7.5), 1_871.254_305_797_788_3) < 1e-13);
        // reflection
        assert!(rel(gamma(-0.5), -3.544_907_701_811_032_1) < 1e-13);
        assert!(rel(gamma(0.1), 9.513_507_698_668_731_8) < 1e-13);
    }

    #[test]
    fn ln_gamma_consistent_with_gamma() {
        // gamma itself overflows near x ~ 140; ln_gamma keeps going.
        for &x in &[0.3, 1.0, 2.5, 10.0, 50.5, 130.0] {
            assert!(rel(ln_gamma(x).exp(), gamma(x)) < 1e-11, "x = {x}");
        }
        // recurrence ln Γ(x+1) = ln x + ln Γ(x) beyond the overflow point
        for &x in &[151.0, 400.5] {
            assert!(
                (ln_gamma(x + 1.0) - x.ln() - ln_gamma(x)).abs() < 1e-10 * ln_gamma(x + 1.0),
                "x = {x}"
            );
        }
    }

    #[test]
    fn bessel_series_reference_values() {
        assert!(rel(bessel_i(1.0 / 3.0, 0.5).unwrap(), 0.738_973_156_425_119_3) < 1e-14);
        assert!(rel(bessel_i(-1.0 / 3.0, 0.5).unwrap(), 1.284_254_566_127_394_2) < 1e-14);
        assert!(rel(bessel_i(1.0 / 3.0, 2.0).unwrap(), 2.158_782_581_372_863_0) < 1e-14);
        assert!(rel(bessel_i(2.0 / 3.0, 1.0).unwrap(), 0.807_521_288_606_130_3) < 1e-14);
        assert!(rel(bessel_i(-2.0 / 3.0, 0.3).unwrap(), 1.412_244_904_450_392_2) < 1e-14);
        assert!(rel(bessel_i(0.0, 1.0).unwrap(), 1.266_065_877_752_008_3) < 1e-14);
    }

    #[test]
    fn bessel_at_zero_argument() {
        assert_eq!(bessel_i(1.0 / 3.0, 0.0).unwrap(), 0.0);
        assert_eq!(bessel_i(0.0, 0.0).unwrap(), 1.0);
        assert!(bessel_i(-1.0 / 3.0, 0.0).unwrap().is_infinite());
    }

    #[test]
    fn bessel_rejects_bad_inputs() {
        assert!(matches!(
            bessel_i(-1.5, 1.0),
            Err(SpecialError::OrderOutOfRange { .. })
        ));
        assert!(matches!(
            bessel_i(0.5, -1.0),
            Err(SpecialError::ArgumentOutOfRange { .. })
        ));
    }

    #[test]
    fn bessel_large_argument_does_not_converge_in_series_mode() {
        // the peak term sits near k = z/2, past the 200-term budget
        assert!(matches!(
            bessel_i(1.0 / 3.0, 400.0),
            Err(SpecialError::NonConvergence { .. })
        ));
    }
}
