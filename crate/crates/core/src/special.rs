//! Gamma function for generic scalars (Lanczos, g = 7, n = 9).

use crate::Scalar;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
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

/// Γ(x) for real `x`, including negative non-integers via reflection.
///
/// Returns NaN at the poles (non-positive integers).
pub fn gamma<T: Scalar>(x: T) -> T {
    let half = T::lit(0.5);
    if x < half {
        if x == x.floor() {
            return T::nan();
        }
        // Γ(x)Γ(1-x) = π / sin(πx)
        let pi = T::PI();
        return pi / ((pi * x).sin() * gamma(T::one() - x));
    }
    let x = x - T::one();
    let mut acc = T::lit(LANCZOS_COEFFS[0]);
    for (i, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        acc = acc + T::lit(c) / (x + T::from_usize_lossy(i));
    }
    let t = x + T::lit(LANCZOS_G) + half;
    let sqrt_two_pi = (T::lit(2.0) * T::PI()).sqrt();
    sqrt_two_pi * t.powf(x + half) * (-t).exp() * acc
}

/// Natural logarithm of n!.
pub fn ln_factorial(n: u32) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn integer_and_half_integer_values() {
        assert_relative_eq!(gamma(1.0_f64), 1.0, max_relative = 1e-14);
        assert_relative_eq!(gamma(5.0_f64), 24.0, max_relative = 1e-13);
        assert_relative_eq!(gamma(0.5_f64), std::f64::consts::PI.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(gamma(1.5_f64), 0.5 * std::f64::consts::PI.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(
            gamma(-0.5_f64),
            -2.0 * std::f64::consts::PI.sqrt(),
            max_relative = 1e-13
        );
    }

    #[test]
    fn poles_are_nan() {
        assert!(gamma(0.0_f64).is_nan());
        assert!(gamma(-2.0_f64).is_nan());
    }

    #[test]
    fn single_precision_is_close() {
        assert!((gamma(0.5_f32) - std::f32::consts::PI.sqrt()).abs() < 1e-5);
    }

    #[test]
    fn matches_statrs() {
        for &x in &[0.1, 0.3, 0.77, 1.2, 2.5, 3.3, 7.9, 12.1] {
            assert_relative_eq!(gamma(x), statrs::function::gamma::gamma(x), max_relative = 1e-13);
        }
    }
}
