use super::{kappa, AnalyticError};
use crate::quadrature::{integrate_semi_infinite, QuadratureSpec};
use crate::Scalar;

/// Laplace transform `s ↦ exp(-coeff · s^exponent)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StretchedExpLaplace<T> {
    coeff: T,
    exponent: T,
}

impl<T: Scalar> StretchedExpLaplace<T> {
    pub fn new(coeff: T, exponent: T) -> Result<Self, AnalyticError> {
        if !(coeff >= T::zero()) || !coeff.is_finite() {
            return Err(AnalyticError::Domain {
                name: "coeff",
                requirement: "finite and >= 0",
                value: coeff.as_f64(),
            });
        }
        if !(exponent > T::zero() && exponent < T::one()) {
            return Err(AnalyticError::Domain {
                name: "exponent",
                requirement: "in (0, 1)",
                value: exponent.as_f64(),
            });
        }
        Ok(StretchedExpLaplace { coeff, exponent })
    }

    /// Transform of PPP interference with intensity `intensity`, unit-mean
    /// exponential marks and path loss `r^-eta`.
    pub fn for_ppp(intensity: T, eta: T) -> Result<Self, AnalyticError> {
        Self::new(intensity * T::PI() * kappa(eta)?, T::lit(2.0) / eta)
    }

    pub fn coeff(&self) -> T {
        self.coeff
    }

    pub fn exponent(&self) -> T {
        self.exponent
    }
}

pub fn laplace_eval<T: Scalar>(l: &StretchedExpLaplace<T>, s: T) -> Result<T, AnalyticError> {
    if !(s >= T::zero()) {
        return Err(AnalyticError::Domain {
            name: "s",
            requirement: ">= 0",
            value: s.as_f64(),
        });
    }
    if l.coeff == T::zero() || s == T::zero() {
        return Ok(T::one());
    }
    Ok((-l.coeff * s.powf(l.exponent)).exp())
}

/// `2πλ ∫ (1 − 1/(1 + s y^-η)) y dy` evaluated by quadrature; the Laplace
/// transform of the interference is `exp` of minus this value.
pub fn generating_functional_exponent<T: Scalar>(
    intensity: T,
    eta: T,
    s: T,
    spec: &QuadratureSpec<T>,
) -> Result<T, AnalyticError> {
    if eta <= T::lit(2.0) {
        return Err(AnalyticError::PathLossDomain(eta.as_f64()));
    }
    if s <= T::zero() || intensity == T::zero() {
        return Ok(T::zero());
    }
    // s/(s + y^η) rewritten to stay finite for large y
    let scale = s.powf(T::one() / eta);
    let v = integrate_semi_infinite::<_, _, AnalyticError>(
        |y: T| {
            let ratio = (y / scale).powf(eta);
            Ok(y / (T::one() + ratio))
        },
        scale,
        spec,
    )?;
    Ok(T::lit(2.0) * T::PI() * intensity * v.value)
}
