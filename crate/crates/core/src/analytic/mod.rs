//! Closed-form ingredients of the secrecy analysis.
//!
//! Interference from a PPP of Rayleigh-faded transmitters has the
//! stretched-exponential Laplace transform `exp(-K s^(2/η))`; the SINR
//! distributions at the legitimate receivers and at the strongest
//! eavesdroppers all follow from it. Multi-antenna receivers pick up a
//! finite sum of derivatives of that transform, expanded over integer
//! partitions.

mod laplace;
mod partitions;
mod sinr;

pub use laplace::{generating_functional_exponent, laplace_eval, StretchedExpLaplace};
pub use partitions::{faa_di_bruno_term, partitions, Partition, MAX_ANTENNAS};
pub use sinr::{
    cdf_gamma_ap, cdf_gamma_ape, cdf_gamma_se, cdf_gamma_sk, conditional_coverage, coverage, eavesdropper_cdf,
    eavesdropper_pdf, pdf_gamma_ape, pdf_gamma_se, serving_cdf,
};

use thiserror::Error;

use crate::quadrature::QuadratureError;
use crate::special::gamma;
use crate::{NetworkConfig, Scalar};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalyticError {
    #[error("path-loss exponent must exceed 2 (got {0})")]
    PathLossDomain(f64),
    #[error("argument {name} must be {requirement} (got {value})")]
    Domain {
        name: &'static str,
        requirement: &'static str,
        value: f64,
    },
    #[error("partition of order {order} exceeds M - 1 = {max}")]
    PartitionOrder { order: u32, max: u32 },
    #[error("antenna count {0} exceeds the supported maximum of {MAX_ANTENNAS}")]
    TooManyAntennas(u32),
    #[error("{0} requires a single-antenna access point (got M = {1})")]
    RequiresSingleAntenna(&'static str, u32),
    #[error("degenerate case: {0}")]
    Degenerate(&'static str),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

/// Γ(1 + 2/η)·Γ(1 − 2/η).
pub fn kappa<T: Scalar>(eta: T) -> Result<T, AnalyticError> {
    if eta.is_nan() || eta <= T::lit(2.0) {
        return Err(AnalyticError::PathLossDomain(eta.as_f64()));
    }
    let delta = T::lit(2.0) / eta;
    Ok(gamma(T::one() + delta) * gamma(T::one() - delta))
}

/// Interference coefficient at the typical access point (and at sensor-tier
/// eavesdroppers): (λ_s ρ_s + λ_ap ρ_ap μ^(2/α))·π·κ(α).
pub fn lambda1<T: Scalar>(cfg: &NetworkConfig<T>) -> Result<T, AnalyticError> {
    let delta = T::lit(2.0) / cfg.alpha();
    let weighted = cfg.lambda_s() * cfg.rho_s() + cfg.lambda_ap() * cfg.rho_ap() * cfg.mu().powf(delta);
    Ok(weighted * T::PI() * kappa(cfg.alpha())?)
}

/// Interference coefficient at the typical sink (and at AP-tier
/// eavesdroppers): λ_ap ρ_ap·π·κ(β).
pub fn lambda2<T: Scalar>(cfg: &NetworkConfig<T>) -> Result<T, AnalyticError> {
    Ok(cfg.lambda_ap() * cfg.rho_ap() * T::PI() * kappa(cfg.beta())?)
}

/// Which hop a link belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Hop {
    /// Sensor → access point.
    SensorAp,
    /// Access point → sink.
    ApSink,
}

/// Parameters of a served link: nearest-receiver association under PPP
/// interference with a Gamma(M, 1) desired gain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ServingLink<T> {
    /// π times the intensity of candidate receivers.
    pub association: T,
    /// Interference coefficient K of the stretched exponential.
    pub interference: T,
    pub eta: T,
    /// Noise over transmit power.
    pub noise: T,
    pub antennas: u32,
}

impl<T: Scalar> ServingLink<T> {
    pub fn new(cfg: &NetworkConfig<T>, hop: Hop) -> Result<Self, AnalyticError> {
        Ok(match hop {
            Hop::SensorAp => ServingLink {
                association: T::PI() * cfg.lambda_ap() * (T::one() - cfg.rho_ap()),
                interference: lambda1(cfg)?,
                eta: cfg.alpha(),
                noise: cfg.noise() / cfg.p_s(),
                antennas: cfg.antennas(),
            },
            Hop::ApSink => ServingLink {
                association: T::PI() * cfg.lambda_sk(),
                interference: lambda2(cfg)?,
                eta: cfg.beta(),
                noise: cfg.noise() / cfg.p_ap(),
                antennas: cfg.antennas(),
            },
        })
    }
}

/// Parameters of the strongest eavesdropper of one hop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EavesdropperLink<T> {
    /// π times the eavesdropper intensity.
    pub eve_density: T,
    pub interference: T,
    pub eta: T,
    pub noise: T,
}

impl<T: Scalar> EavesdropperLink<T> {
    pub fn new(cfg: &NetworkConfig<T>, hop: Hop) -> Result<Self, AnalyticError> {
        Ok(match hop {
            Hop::SensorAp => EavesdropperLink {
                eve_density: T::PI() * cfg.lambda_e_s(),
                interference: lambda1(cfg)?,
                eta: cfg.alpha(),
                noise: cfg.noise() / cfg.p_s(),
            },
            Hop::ApSink => EavesdropperLink {
                eve_density: T::PI() * cfg.lambda_e_ap(),
                interference: lambda2(cfg)?,
                eta: cfg.beta(),
                noise: cfg.noise() / cfg.p_ap(),
            },
        })
    }
}
