use super::partitions::{correction_factor, partition_table};
use super::{AnalyticError, EavesdropperLink, Hop, Partition, ServingLink};
use crate::quadrature::{integrate_decaying, QuadratureSpec};
use crate::{NetworkConfig, Scalar};

fn check_threshold<T: Scalar>(gamma_th: T) -> Result<(), AnalyticError> {
    if gamma_th.is_nan() || gamma_th < T::zero() {
        return Err(AnalyticError::Domain {
            name: "gamma_th",
            requirement: ">= 0",
            value: gamma_th.as_f64(),
        });
    }
    Ok(())
}

fn clamp_probability<T: Scalar>(p: T, spec: &QuadratureSpec<T>, what: &str) -> T {
    let slack = T::lit(10.0) * spec.rel_tol;
    if p < -slack || p > T::one() + slack {
        log::warn!("{what} = {p} left [0, 1] by more than 10·rel_tol before clamping");
    }
    p.max(T::zero()).min(T::one())
}

/// Probability that SINR at the kernel radius `√t` exceeds `gamma_th`,
/// conditioned on the serving distance.
pub fn conditional_coverage<T: Scalar>(link: &ServingLink<T>, t: T, gamma_th: T, table: &[Vec<Partition>]) -> T {
    let delta = T::lit(2.0) / link.eta;
    let x = t.powf(link.eta / T::lit(2.0));
    let log_v = -link.interference * gamma_th.powf(delta) * t - gamma_th * link.noise * x;
    log_v.exp() * correction_factor(link, t, gamma_th, table)
}

/// P(SINR > γ) at the served receiver.
pub fn coverage<T: Scalar>(link: &ServingLink<T>, gamma_th: T, spec: &QuadratureSpec<T>) -> Result<T, AnalyticError> {
    check_threshold(gamma_th)?;
    spec.validate()?;
    if gamma_th == T::zero() {
        return Ok(T::one());
    }
    if gamma_th.is_infinite() || link.association == T::zero() {
        return Ok(T::zero());
    }
    let table = partition_table(link.antennas)?;
    let a = link.association;
    let delta = T::lit(2.0) / link.eta;
    let rate = a + link.interference * gamma_th.powf(delta) + (gamma_th * link.noise).powf(delta);
    let v = integrate_decaying::<_, _, AnalyticError>(
        |t: T| Ok(a * (-a * t).exp() * conditional_coverage(link, t, gamma_th, &table)),
        T::one() / rate,
        spec,
    )?;
    Ok(clamp_probability(v.value, spec, "coverage"))
}

/// CDF of the SINR at a served receiver (access point or sink).
pub fn serving_cdf<T: Scalar>(
    link: &ServingLink<T>,
    gamma_th: T,
    spec: &QuadratureSpec<T>,
) -> Result<T, AnalyticError> {
    let c = coverage(link, gamma_th, spec)?;
    Ok(clamp_probability(T::one() - c, spec, "serving CDF"))
}

pub fn cdf_gamma_ap<T: Scalar>(
    gamma_th: T,
    cfg: &NetworkConfig<T>,
    spec: &QuadratureSpec<T>,
) -> Result<T, AnalyticError> {
    serving_cdf(&ServingLink::new(cfg, Hop::SensorAp)?, gamma_th, spec)
}

pub fn cdf_gamma_sk<T: Scalar>(
    gamma_th: T,
    cfg: &NetworkConfig<T>,
    spec: &QuadratureSpec<T>,
) -> Result<T, AnalyticError> {
    serving_cdf(&ServingLink::new(cfg, Hop::ApSink)?, gamma_th, spec)
}

/// `∫ exp(−K γ^(2/η) t − n γ t^(η/2)) dt` and, optionally, its γ-derivative
/// with the sign flipped.
fn eve_integrals<T: Scalar>(
    link: &EavesdropperLink<T>,
    gamma_th: T,
    spec: &QuadratureSpec<T>,
    derivative: bool,
) -> Result<(T, T), AnalyticError> {
    let delta = T::lit(2.0) / link.eta;
    let half = link.eta / T::lit(2.0);
    let k_gamma = link.interference * gamma_th.powf(delta);
    let n_gamma = link.noise * gamma_th;
    let rate = k_gamma + n_gamma.powf(delta);
    if rate == T::zero() {
        return Ok((T::infinity(), T::zero()));
    }
    let j = integrate_decaying::<_, _, AnalyticError>(
        |t: T| Ok((-k_gamma * t - n_gamma * t.powf(half)).exp()),
        T::one() / rate,
        spec,
    )?;
    if !derivative {
        return Ok((j.value, T::zero()));
    }
    let dk = link.interference * delta * gamma_th.powf(delta - T::one());
    let d = integrate_decaying::<_, _, AnalyticError>(
        |t: T| {
            let th = t.powf(half);
            Ok((dk * t + link.noise * th) * (-k_gamma * t - n_gamma * th).exp())
        },
        T::one() / rate,
        spec,
    )?;
    Ok((j.value, d.value))
}

/// CDF of the strongest eavesdropper's SINR.
pub fn eavesdropper_cdf<T: Scalar>(
    link: &EavesdropperLink<T>,
    gamma_th: T,
    spec: &QuadratureSpec<T>,
) -> Result<T, AnalyticError> {
    check_threshold(gamma_th)?;
    spec.validate()?;
    if link.eve_density == T::zero() {
        return Ok(T::one());
    }
    if gamma_th == T::zero() {
        return Ok(T::zero());
    }
    if gamma_th.is_infinite() {
        return Ok(T::one());
    }
    let (j, _) = eve_integrals(link, gamma_th, spec, false)?;
    Ok(clamp_probability(
        (-link.eve_density * j).exp(),
        spec,
        "eavesdropper CDF",
    ))
}

/// Density of the strongest eavesdropper's SINR.
pub fn eavesdropper_pdf<T: Scalar>(
    link: &EavesdropperLink<T>,
    gamma_th: T,
    spec: &QuadratureSpec<T>,
) -> Result<T, AnalyticError> {
    if !(gamma_th > T::zero()) || gamma_th.is_infinite() {
        return Err(AnalyticError::Domain {
            name: "gamma_th",
            requirement: "finite and > 0",
            value: gamma_th.as_f64(),
        });
    }
    spec.validate()?;
    if link.eve_density == T::zero() {
        return Err(AnalyticError::Degenerate("no eavesdroppers, the SINR has no density"));
    }
    let (j, dj) = eve_integrals(link, gamma_th, spec, true)?;
    if j.is_infinite() {
        return Ok(T::zero());
    }
    let f = (-link.eve_density * j).exp();
    Ok((f * link.eve_density * dj).max(T::zero()))
}

pub fn cdf_gamma_se<T: Scalar>(
    gamma_th: T,
    cfg: &NetworkConfig<T>,
    spec: &QuadratureSpec<T>,
) -> Result<T, AnalyticError> {
    eavesdropper_cdf(&EavesdropperLink::new(cfg, Hop::SensorAp)?, gamma_th, spec)
}

pub fn cdf_gamma_ape<T: Scalar>(
    gamma_th: T,
    cfg: &NetworkConfig<T>,
    spec: &QuadratureSpec<T>,
) -> Result<T, AnalyticError> {
    eavesdropper_cdf(&EavesdropperLink::new(cfg, Hop::ApSink)?, gamma_th, spec)
}

pub fn pdf_gamma_se<T: Scalar>(
    gamma_th: T,
    cfg: &NetworkConfig<T>,
    spec: &QuadratureSpec<T>,
) -> Result<T, AnalyticError> {
    eavesdropper_pdf(&EavesdropperLink::new(cfg, Hop::SensorAp)?, gamma_th, spec)
}

pub fn pdf_gamma_ape<T: Scalar>(
    gamma_th: T,
    cfg: &NetworkConfig<T>,
    spec: &QuadratureSpec<T>,
) -> Result<T, AnalyticError> {
    eavesdropper_pdf(&EavesdropperLink::new(cfg, Hop::ApSink)?, gamma_th, spec)
}
