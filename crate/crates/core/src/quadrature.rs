//! Adaptive Gauss–Kronrod quadrature on finite and semi-infinite ranges.
//!
//! The 21-point Kronrod rule with its embedded 10-point Gauss rule gives the
//! local error estimate; intervals are bisected worst-first until the summed
//! estimate meets `max(abs_tol, rel_tol·|I|)`. `[0, ∞)` is handled either by
//! the algebraic map `t = s·(u / (1 - u))^p`, which turns power-law tails into
//! integrable endpoint behaviour, or by truncating where the integrand's
//! envelope has fallen below `abs_tol`.

use thiserror::Error;

use crate::Scalar;

#[derive(Debug, Error, Clone, Copy, PartialEq)]
pub enum QuadratureError {
    #[error("no convergence after {subdivisions} subdivisions: value {value:e}, error estimate {error:e} (requested {requested:e})")]
    NoConvergence {
        value: f64,
        error: f64,
        requested: f64,
        subdivisions: usize,
    },
    #[error("integrand is not finite at x = {0:e}")]
    NonFinite(f64),
    #[error("integrand envelope still above tolerance at the truncation cap {0:e}")]
    TruncationCap(f64),
    #[error("invalid quadrature tolerance")]
    InvalidTolerance,
}

/// Tolerance and truncation policy for every integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec<T> {
    pub rel_tol: T,
    pub abs_tol: T,
    /// Maximum number of bisections per integral.
    pub max_subdivisions: usize,
    /// Exponent `p` of the map `t = s·(u / (1 - u))^p`.
    pub tail_power: i32,
    /// Truncated integrals give up beyond `scale · 2^max_doublings`.
    pub max_doublings: u32,
}

impl<T: Scalar> Default for QuadratureSpec<T> {
    fn default() -> Self {
        let floor = T::epsilon() * T::lit(100.0);
        QuadratureSpec {
            rel_tol: T::lit(1e-8).max(floor),
            abs_tol: T::lit(1e-12).max(floor * floor),
            max_subdivisions: 2000,
            tail_power: 4,
            max_doublings: 80,
        }
    }
}

impl<T: Scalar> QuadratureSpec<T> {
    pub fn with_rel_tol(self, rel_tol: T) -> Self {
        QuadratureSpec { rel_tol, ..self }
    }

    pub fn with_abs_tol(self, abs_tol: T) -> Self {
        QuadratureSpec { abs_tol, ..self }
    }

    pub fn validate(&self) -> Result<(), QuadratureError> {
        if self.rel_tol > T::zero() && self.abs_tol > T::zero() && self.tail_power >= 1 && self.max_subdivisions > 0 {
            Ok(())
        } else {
            Err(QuadratureError::InvalidTolerance)
        }
    }
}

/// Integral value with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral<T> {
    pub value: T,
    pub error: T,
    pub evaluations: usize,
}

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_814_748_240,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

#[derive(Clone, Copy)]
struct Segment<T> {
    a: T,
    b: T,
    value: T,
    error: T,
}

fn check<T: Scalar, E: From<QuadratureError>>(x: T, y: T) -> Result<T, E> {
    if y.is_finite() {
        Ok(y)
    } else {
        Err(QuadratureError::NonFinite(x.as_f64()).into())
    }
}

/// One 21-point Kronrod panel on [a, b].
fn kronrod21<T, F, E>(f: &mut F, a: T, b: T) -> Result<(T, T), E>
where
    T: Scalar,
    F: FnMut(T) -> Result<T, E>,
    E: From<QuadratureError>,
{
    let half = T::lit(0.5);
    let center = half * (a + b);
    let half_len = half * (b - a);
    let fc = check(center, f(center)?)?;
    let mut res_k = fc * T::lit(WGK[10]);
    let mut res_g = T::zero();
    let mut res_abs = res_k.abs();
    let mut fv1 = [T::zero(); 10];
    let mut fv2 = [T::zero(); 10];
    for j in 0..10 {
        let dx = half_len * T::lit(XGK[j]);
        let (x1, x2) = (center - dx, center + dx);
        let f1 = check(x1, f(x1)?)?;
        let f2 = check(x2, f(x2)?)?;
        fv1[j] = f1;
        fv2[j] = f2;
        res_k = res_k + T::lit(WGK[j]) * (f1 + f2);
        res_abs = res_abs + T::lit(WGK[j]) * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g = res_g + T::lit(WG[j / 2]) * (f1 + f2);
        }
    }
    let mean = res_k * half;
    let mut res_asc = T::lit(WGK[10]) * (fc - mean).abs();
    for j in 0..10 {
        res_asc = res_asc + T::lit(WGK[j]) * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let hl = half_len.abs();
    let value = res_k * half_len;
    let res_abs = res_abs * hl;
    let res_asc = res_asc * hl;
    let mut err = ((res_k - res_g) * half_len).abs();
    if res_asc != T::zero() && err != T::zero() {
        let scale = (T::lit(200.0) * err / res_asc).powf(T::lit(1.5));
        err = if scale < T::one() { res_asc * scale } else { res_asc };
    }
    let fifty_eps = T::lit(50.0) * T::epsilon();
    if res_abs > T::min_positive_value() / fifty_eps {
        err = err.max(fifty_eps * res_abs);
    }
    Ok((value, err))
}

/// Adaptive integration of `f` over the finite interval [a, b].
pub fn integrate<T, F, E>(mut f: F, a: T, b: T, spec: &QuadratureSpec<T>) -> Result<Integral<T>, E>
where
    T: Scalar,
    F: FnMut(T) -> Result<T, E>,
    E: From<QuadratureError>,
{
    spec.validate()?;
    if a == b {
        return Ok(Integral {
            value: T::zero(),
            error: T::zero(),
            evaluations: 0,
        });
    }
    let (value, error) = kronrod21(&mut f, a, b)?;
    let mut segments = vec![Segment { a, b, value, error }];
    let mut evaluations = 21;
    loop {
        let total: T = segments.iter().fold(T::zero(), |acc, s| acc + s.value);
        let err: T = segments.iter().fold(T::zero(), |acc, s| acc + s.error);
        let requested = spec.abs_tol.max(spec.rel_tol * total.abs());
        if err <= requested {
            return Ok(Integral {
                value: total,
                error: err,
                evaluations,
            });
        }
        if segments.len() > spec.max_subdivisions {
            return Err(QuadratureError::NoConvergence {
                value: total.as_f64(),
                error: err.as_f64(),
                requested: requested.as_f64(),
                subdivisions: segments.len(),
            }
            .into());
        }
        let (worst, _) = segments
            .iter()
            .enumerate()
            .fold((0, T::neg_infinity()), |(bi, be), (i, s)| {
                if s.error > be {
                    (i, s.error)
                } else {
                    (bi, be)
                }
            });
        let seg = segments.swap_remove(worst);
        let mid = T::lit(0.5) * (seg.a + seg.b);
        if mid <= seg.a.min(seg.b) || mid >= seg.a.max(seg.b) {
            // Interval can no longer be split in this precision.
            return Err(QuadratureError::NoConvergence {
                value: total.as_f64(),
                error: err.as_f64(),
                requested: requested.as_f64(),
                subdivisions: segments.len() + 1,
            }
            .into());
        }
        let (v1, e1) = kronrod21(&mut f, seg.a, mid)?;
        let (v2, e2) = kronrod21(&mut f, mid, seg.b)?;
        evaluations += 42;
        segments.push(Segment {
            a: seg.a,
            b: mid,
            value: v1,
            error: e1,
        });
        segments.push(Segment {
            a: mid,
            b: seg.b,
            value: v2,
            error: e2,
        });
    }
}

/// ∫₀^∞ f(t) dt through the map `t = scale·(u / (1 - u))^p`.
///
/// `scale` should sit near where the integrand does most of its work.
pub fn integrate_semi_infinite<T, F, E>(mut f: F, scale: T, spec: &QuadratureSpec<T>) -> Result<Integral<T>, E>
where
    T: Scalar,
    F: FnMut(T) -> Result<T, E>,
    E: From<QuadratureError>,
{
    let p = spec.tail_power;
    let pt = T::from_i32(p).expect("small integer");
    let scale = if scale > T::zero() && scale.is_finite() {
        scale
    } else {
        T::one()
    };
    integrate(
        |u: T| {
            let w = T::one() - u;
            let ratio = u / w;
            let t = scale * ratio.powi(p);
            let jac = scale * pt * ratio.powi(p - 1) / (w * w);
            if !t.is_finite() || !jac.is_finite() {
                return Ok(T::zero());
            }
            let y = f(t)?;
            let v = y * jac;
            Ok(if v.is_nan() && y == T::zero() { T::zero() } else { v })
        },
        T::zero(),
        T::one(),
        spec,
    )
}

/// ∫₀^∞ f(t) dt for integrands with super-polynomial decay.
///
/// The upper limit doubles from `scale` until `|f(L)|·L` drops below
/// `abs_tol` at two consecutive probes; the integral over [0, L] is then
/// done adaptively.
pub fn integrate_decaying<T, F, E>(mut f: F, scale: T, spec: &QuadratureSpec<T>) -> Result<Integral<T>, E>
where
    T: Scalar,
    F: FnMut(T) -> Result<T, E>,
    E: From<QuadratureError>,
{
    spec.validate()?;
    let scale = if scale > T::zero() && scale.is_finite() {
        scale
    } else {
        T::one()
    };
    let two = T::lit(2.0);
    let mut upper = scale;
    let mut quiet = 0;
    let mut doublings = 0;
    while quiet < 2 {
        let env = (check(upper, f(upper)?)? * upper).abs();
        if env <= spec.abs_tol {
            quiet += 1;
        } else {
            quiet = 0;
        }
        upper = upper * two;
        doublings += 1;
        if doublings > spec.max_doublings {
            return Err(QuadratureError::TruncationCap(upper.as_f64()).into());
        }
    }
    // The last probe was at upper / 2; stop there.
    integrate(f, T::zero(), upper / two, spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    type R = Result<f64, QuadratureError>;

    #[test]
    fn polynomial_is_exact() {
        let spec = QuadratureSpec::<f64>::default();
        let v = integrate(|x: f64| -> R { Ok(3.0 * x * x) }, 0.0, 2.0, &spec).unwrap();
        assert_relative_eq!(v.value, 8.0, max_relative = 1e-14);
    }

    #[test]
    fn oscillatory_finite() {
        let spec = QuadratureSpec::<f64>::default();
        let v = integrate(|x: f64| -> R { Ok((20.0 * x).sin()) }, 0.0, std::f64::consts::PI, &spec).unwrap();
        assert!(v.value.abs() < 1e-10);
    }

    #[test]
    fn endpoint_singularity() {
        let spec = QuadratureSpec::<f64>::default();
        let v = integrate(|x: f64| -> R { Ok(1.0 / x.sqrt()) }, 0.0, 1.0, &spec).unwrap();
        assert_relative_eq!(v.value, 2.0, max_relative = 1e-8);
    }

    #[test]
    fn semi_infinite_exponential_and_power_tails() {
        let spec = QuadratureSpec::<f64>::default();
        let v = integrate_semi_infinite(|t: f64| -> R { Ok((-t).exp()) }, 1.0, &spec).unwrap();
        assert_relative_eq!(v.value, 1.0, max_relative = 1e-9);
        // ∫ 1/((1+x) x^{0.4}) dx over (0,∞) = π / sin(0.4 π)
        let v = integrate_semi_infinite(|x: f64| -> R { Ok(1.0 / ((1.0 + x) * x.powf(0.4))) }, 1.0, &spec).unwrap();
        let exact = std::f64::consts::PI / (0.4 * std::f64::consts::PI).sin();
        assert_relative_eq!(v.value, exact, max_relative = 1e-8);
    }

    #[test]
    fn truncated_gaussian() {
        let spec = QuadratureSpec::<f64>::default();
        let v = integrate_decaying(|t: f64| -> R { Ok((-t * t).exp()) }, 1.0, &spec).unwrap();
        assert_relative_eq!(v.value, std::f64::consts::PI.sqrt() / 2.0, max_relative = 1e-10);
    }

    #[test]
    fn truncation_cap_is_reported() {
        let spec = QuadratureSpec::<f64>::default();
        let r = integrate_decaying(|_t: f64| -> R { Ok(1.0) }, 1.0, &spec);
        assert!(matches!(r, Err(QuadratureError::TruncationCap(_))));
    }

    #[test]
    fn non_convergence_reports_achieved_error() {
        let spec = QuadratureSpec {
            max_subdivisions: 3,
            ..QuadratureSpec::<f64>::default()
        };
        let r = integrate(
            |x: f64| -> R { Ok((50.0 * x).sin() * (-x).exp() / x.sqrt()) },
            0.0,
            10.0,
            &spec,
        );
        match r {
            Err(QuadratureError::NoConvergence { error, requested, .. }) => assert!(error > requested),
            other => panic!("expected failure, got {other:?}"),
        }
    }

    #[test]
    fn non_finite_integrand() {
        let spec = QuadratureSpec::<f64>::default();
        let r = integrate(|_x: f64| -> R { Ok(f64::NAN) }, 0.0, 1.0, &spec);
        assert!(matches!(r, Err(QuadratureError::NonFinite(_))));
    }

    #[test]
    fn single_precision_instantiation() {
        let spec = QuadratureSpec::<f32>::default();
        let v =
            integrate_semi_infinite(|t: f32| -> Result<f32, QuadratureError> { Ok((-t).exp()) }, 1.0, &spec).unwrap();
        assert!((v.value - 1.0).abs() < 1e-4);
    }
}
