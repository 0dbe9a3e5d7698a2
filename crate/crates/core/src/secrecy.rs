//! Average secrecy rates of the two hops and of the end-to-end path.

use std::fmt;

use crate::analytic::{
    coverage, eavesdropper_cdf, eavesdropper_pdf, lambda2, AnalyticError, EavesdropperLink, Hop, ServingLink,
};
use crate::quadrature::{integrate_decaying, integrate_semi_infinite, QuadratureSpec};
use crate::{NetworkConfig, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    AnalyticGeneral,
    AnalyticCorollary,
    MonteCarlo,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::AnalyticGeneral => "analytic",
            Method::AnalyticCorollary => "corollary",
            Method::MonteCarlo => "mc",
        })
    }
}

/// A secrecy rate in bits/s/Hz and where it came from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecrecyEstimate<T> {
    pub value: T,
    pub method: Method,
    /// 95% confidence half-width (Monte Carlo only).
    pub ci_half_width: Option<T>,
    pub trials: Option<u64>,
}

impl<T: Scalar> SecrecyEstimate<T> {
    pub fn analytic(value: T, method: Method) -> Self {
        SecrecyEstimate {
            value: value.max(T::zero()),
            method,
            ci_half_width: None,
            trials: None,
        }
    }
}

fn require_single_antenna<T: Scalar>(cfg: &NetworkConfig<T>, what: &'static str) -> Result<(), AnalyticError> {
    if cfg.antennas() != 1 {
        return Err(AnalyticError::RequiresSingleAntenna(what, cfg.antennas()));
    }
    Ok(())
}

fn hop_links<T: Scalar>(
    cfg: &NetworkConfig<T>,
    hop: Hop,
) -> Result<(ServingLink<T>, EavesdropperLink<T>), AnalyticError> {
    Ok((ServingLink::new(cfg, hop)?, EavesdropperLink::new(cfg, hop)?))
}

/// (1/ln 2) ∫ F_e(x) (1 − F_main(x)) / (1 + x) dx.
fn hop_asr<T: Scalar>(
    main: &ServingLink<T>,
    eve: &EavesdropperLink<T>,
    spec: &QuadratureSpec<T>,
) -> Result<T, AnalyticError> {
    if main.association == T::zero() {
        return Ok(T::zero());
    }
    let v = integrate_semi_infinite::<_, _, AnalyticError>(
        |x: T| {
            let fe = eavesdropper_cdf(eve, x, spec)?;
            if fe == T::zero() {
                return Ok(T::zero());
            }
            Ok(fe * coverage(main, x, spec)? / (T::one() + x))
        },
        T::one(),
        spec,
    )?;
    Ok(v.value / T::LN_2())
}

/// Average secrecy rate of the sensor → access point hop.
pub fn asr_sensor_ap<T: Scalar>(
    cfg: &NetworkConfig<T>,
    spec: &QuadratureSpec<T>,
) -> Result<SecrecyEstimate<T>, AnalyticError> {
    let (main, eve) = hop_links(cfg, Hop::SensorAp)?;
    Ok(SecrecyEstimate::analytic(
        hop_asr(&main, &eve, spec)?,
        Method::AnalyticGeneral,
    ))
}

/// Average secrecy rate of the access point → sink hop.
pub fn asr_ap_sink<T: Scalar>(
    cfg: &NetworkConfig<T>,
    spec: &QuadratureSpec<T>,
) -> Result<SecrecyEstimate<T>, AnalyticError> {
    let (main, eve) = hop_links(cfg, Hop::ApSink)?;
    Ok(SecrecyEstimate::analytic(
        hop_asr(&main, &eve, spec)?,
        Method::AnalyticGeneral,
    ))
}

/// Single-antenna, interference-limited hop rate:
/// (a/ln 2) ∫ exp(−e/(Λ x^δ)) / ((1+x)(Λ x^δ + a)) dx.
fn il1_rate<T: Scalar>(a: T, big_lambda: T, eve: T, eta: T, spec: &QuadratureSpec<T>) -> Result<T, AnalyticError> {
    if a == T::zero() {
        return Ok(T::zero());
    }
    if big_lambda == T::zero() {
        return if eve > T::zero() {
            Ok(T::zero())
        } else {
            Err(AnalyticError::Degenerate(
                "no interference, no noise and no eavesdroppers",
            ))
        };
    }
    let delta = T::lit(2.0) / eta;
    let v = integrate_semi_infinite::<_, _, AnalyticError>(
        |x: T| {
            let lx = big_lambda * x.powf(delta);
            if lx == T::zero() && eve > T::zero() {
                return Ok(T::zero());
            }
            Ok((-eve / lx).exp() / ((T::one() + x) * (lx + a)))
        },
        T::one(),
        spec,
    )?;
    Ok(a * v.value / T::LN_2())
}

/// Closed-form sensor-hop rate for M = 1 with noise ignored.
pub fn asr_sensor_ap_il1<T: Scalar>(
    cfg: &NetworkConfig<T>,
    spec: &QuadratureSpec<T>,
) -> Result<SecrecyEstimate<T>, AnalyticError> {
    require_single_antenna(cfg, "asr_sensor_ap_il1")?;
    let (main, eve) = hop_links(cfg, Hop::SensorAp)?;
    let v = il1_rate(main.association, main.interference, eve.eve_density, main.eta, spec)?;
    Ok(SecrecyEstimate::analytic(v, Method::AnalyticCorollary))
}

/// Closed-form sink-hop rate for M = 1 with noise ignored.
pub fn asr_ap_sink_il1<T: Scalar>(
    cfg: &NetworkConfig<T>,
    spec: &QuadratureSpec<T>,
) -> Result<SecrecyEstimate<T>, AnalyticError> {
    require_single_antenna(cfg, "asr_ap_sink_il1")?;
    let (main, eve) = hop_links(cfg, Hop::ApSink)?;
    let v = il1_rate(main.association, main.interference, eve.eve_density, main.eta, spec)?;
    Ok(SecrecyEstimate::analytic(v, Method::AnalyticCorollary))
}

/// Sink density at which the interference-limited sink-hop rate bound
/// `πλ_sk ε / (Λ₂ ln 2)` reaches `target`.
///
/// The bound drops `πλ_sk` from the denominator of the single-antenna rate
/// integrand, so it over-estimates the rate: the returned density is a
/// necessary condition for reaching `target`. See [`tight_sink_density`]
/// for the exact requirement.
pub fn min_sink_density<T: Scalar>(
    target: T,
    cfg: &NetworkConfig<T>,
    spec: &QuadratureSpec<T>,
) -> Result<T, AnalyticError> {
    if !(target >= T::zero()) || target.is_infinite() {
        return Err(AnalyticError::Domain {
            name: "target",
            requirement: "finite and >= 0",
            value: target.as_f64(),
        });
    }
    if target == T::zero() {
        return Ok(T::zero());
    }
    let big_lambda = lambda2(cfg)?;
    let eve = T::PI() * cfg.lambda_e_ap();
    let delta = T::lit(2.0) / cfg.beta();
    if big_lambda == T::zero() {
        return Err(AnalyticError::Degenerate("no access-point interference"));
    }
    let eps = integrate_semi_infinite::<_, _, AnalyticError>(
        |x: T| {
            let xd = x.powf(delta);
            if xd == T::zero() {
                return Ok(T::zero());
            }
            Ok((-eve / (big_lambda * xd)).exp() / ((T::one() + x) * xd))
        },
        T::one(),
        spec,
    )?
    .value;
    if !(eps > T::zero()) {
        return Err(AnalyticError::Degenerate("eavesdropper density saturates the sink hop"));
    }
    Ok(target * big_lambda * T::LN_2() / (T::PI() * eps))
}

/// Smallest sink density at which the single-antenna interference-limited
/// sink-hop rate equals `target`, found by bisection.
pub fn tight_sink_density<T: Scalar>(
    target: T,
    cfg: &NetworkConfig<T>,
    spec: &QuadratureSpec<T>,
) -> Result<T, AnalyticError> {
    let start = min_sink_density(target, cfg, spec)?;
    if start == T::zero() {
        return Ok(T::zero());
    }
    let big_lambda = lambda2(cfg)?;
    let eve = T::PI() * cfg.lambda_e_ap();
    let rate = |lambda_sk: T| il1_rate(T::PI() * lambda_sk, big_lambda, eve, cfg.beta(), spec);
    let (mut lo, mut hi) = (T::zero(), start);
    let mut doublings = 0;
    while rate(hi)? < target {
        lo = hi;
        hi = hi * T::lit(2.0);
        doublings += 1;
        if doublings > 200 || hi.is_infinite() {
            return Err(AnalyticError::Degenerate("target rate unreachable"));
        }
    }
    let tol = T::lit(4.0) * spec.rel_tol.max(T::epsilon());
    for _ in 0..200 {
        if hi - lo <= tol * hi {
            break;
        }
        let mid = T::lit(0.5) * (lo + hi);
        if rate(mid)? < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

/// Median of the strongest-eavesdropper SINR when noise is ignored.
fn eve_scale<T: Scalar>(eve: &EavesdropperLink<T>) -> T {
    let delta = T::lit(2.0) / eve.eta;
    if eve.interference == T::zero() {
        return T::one();
    }
    let s = (eve.eve_density / (eve.interference * T::LN_2())).powf(T::one() / delta);
    if s > T::zero() && s.is_finite() {
        s
    } else {
        T::one()
    }
}

/// P(C > x) for one hop: 1 − ∫ f_e(t) F_main(2^x (1+t) − 1) dt.
fn hop_survival<T: Scalar>(
    main: &ServingLink<T>,
    eve: &EavesdropperLink<T>,
    x: T,
    spec: &QuadratureSpec<T>,
) -> Result<T, AnalyticError> {
    if x.is_nan() || x < T::zero() {
        return Err(AnalyticError::Domain {
            name: "x",
            requirement: ">= 0",
            value: x.as_f64(),
        });
    }
    let gain = T::lit(2.0).powf(x);
    if gain.is_infinite() {
        return Ok(T::zero());
    }
    if eve.eve_density == T::zero() {
        return coverage(main, gain - T::one(), spec);
    }
    // ∫ f_e = 1, so the survival is ∫ f_e(t) (1 − F_main(·)) dt
    let v = integrate_semi_infinite::<_, _, AnalyticError>(
        |t: T| {
            if t == T::zero() {
                return Ok(T::zero());
            }
            let f = eavesdropper_pdf(eve, t, spec)?;
            if f == T::zero() {
                return Ok(T::zero());
            }
            Ok(f * coverage(main, gain * (T::one() + t) - T::one(), spec)?)
        },
        eve_scale(eve),
        spec,
    )?;
    Ok(v.value.max(T::zero()).min(T::one()))
}

/// P(C_s^ap > x): survival function of the sensor-hop secrecy rate.
pub fn pr_cs_ap_exceeds<T: Scalar>(x: T, cfg: &NetworkConfig<T>, spec: &QuadratureSpec<T>) -> Result<T, AnalyticError> {
    let (main, eve) = hop_links(cfg, Hop::SensorAp)?;
    hop_survival(&main, &eve, x, spec)
}

/// P(C_s^sk > x): survival function of the sink-hop secrecy rate.
pub fn pr_cs_sk_exceeds<T: Scalar>(x: T, cfg: &NetworkConfig<T>, spec: &QuadratureSpec<T>) -> Result<T, AnalyticError> {
    let (main, eve) = hop_links(cfg, Hop::ApSink)?;
    hop_survival(&main, &eve, x, spec)
}

/// E[min(C_s^ap, C_s^sk)] with the two hops independent.
pub fn overall_asr<T: Scalar>(
    cfg: &NetworkConfig<T>,
    spec: &QuadratureSpec<T>,
) -> Result<SecrecyEstimate<T>, AnalyticError> {
    let (m1, e1) = hop_links(cfg, Hop::SensorAp)?;
    let (m2, e2) = hop_links(cfg, Hop::ApSink)?;
    if m1.association == T::zero() || m2.association == T::zero() {
        return Ok(SecrecyEstimate::analytic(T::zero(), Method::AnalyticGeneral));
    }
    let v = integrate_decaying::<_, _, AnalyticError>(
        |x: T| {
            let p1 = hop_survival(&m1, &e1, x, spec)?;
            if p1 == T::zero() {
                return Ok(T::zero());
            }
            Ok(p1 * hop_survival(&m2, &e2, x, spec)?)
        },
        T::one(),
        spec,
    )?;
    Ok(SecrecyEstimate::analytic(v.value, Method::AnalyticGeneral))
}

/// Survival of one hop's rate from the single-antenna closed forms:
/// eavesdropper density `(δ e / (Λ y^(δ+1))) exp(−e/(Λ y^δ))` against the
/// served coverage `a / (a + Λ γ^δ)`.
fn il1_survival<T: Scalar>(
    a: T,
    big_lambda: T,
    eve: T,
    eta: T,
    x: T,
    spec: &QuadratureSpec<T>,
) -> Result<T, AnalyticError> {
    let delta = T::lit(2.0) / eta;
    let gain = T::lit(2.0).powf(x);
    if gain.is_infinite() {
        return Ok(T::zero());
    }
    let cov = |g: T| a / (a + big_lambda * g.powf(delta));
    if eve == T::zero() {
        return Ok(cov(gain - T::one()));
    }
    let scale = (eve / (big_lambda * T::LN_2())).powf(T::one() / delta);
    let v = integrate_semi_infinite::<_, _, AnalyticError>(
        |y: T| {
            let yd = big_lambda * y.powf(delta);
            if yd == T::zero() {
                return Ok(T::zero());
            }
            let pdf = delta * eve / (yd * y) * (-eve / yd).exp();
            Ok(pdf * cov(gain * (T::one() + y) - T::one()))
        },
        scale,
        spec,
    )?;
    Ok(v.value.max(T::zero()).min(T::one()))
}

/// Closed-form end-to-end rate for M = 1 with noise ignored.
pub fn overall_asr_il1<T: Scalar>(
    cfg: &NetworkConfig<T>,
    spec: &QuadratureSpec<T>,
) -> Result<SecrecyEstimate<T>, AnalyticError> {
    require_single_antenna(cfg, "overall_asr_il1")?;
    let (m1, e1) = hop_links(cfg, Hop::SensorAp)?;
    let (m2, e2) = hop_links(cfg, Hop::ApSink)?;
    if m1.association == T::zero() || m2.association == T::zero() {
        return Ok(SecrecyEstimate::analytic(T::zero(), Method::AnalyticCorollary));
    }
    if m1.interference == T::zero() || m2.interference == T::zero() {
        return Err(AnalyticError::Degenerate("no interference on one hop"));
    }
    let v = integrate_decaying::<_, _, AnalyticError>(
        |x: T| {
            let p1 = il1_survival(m1.association, m1.interference, e1.eve_density, m1.eta, x, spec)?;
            if p1 == T::zero() {
                return Ok(T::zero());
            }
            Ok(p1 * il1_survival(m2.association, m2.interference, e2.eve_density, m2.eta, x, spec)?)
        },
        T::one(),
        spec,
    )?;
    Ok(SecrecyEstimate::analytic(v.value, Method::AnalyticCorollary))
}
