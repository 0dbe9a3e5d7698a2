//! Monte Carlo simulation of the three-tier network.
//!
//! Each trial places the typical sensor at the origin, draws the point
//! processes on a disc window, associates the sensor with its nearest
//! receiving access point and that access point with its nearest sink, and
//! evaluates the four SINRs directly. The second hop is drawn independently
//! of the first.
//!
//! Every trial owns a ChaCha8 generator seeded from `(base_seed, trial)`,
//! and every random sequence inside a trial (each pattern, each gain list,
//! each eavesdropper's interference field) reads its own ChaCha stream. A
//! result therefore depends only on the seed, never on thread scheduling
//! or on how much of a sequence an early exit skipped.

mod field;
mod stats;

pub use stats::{pairwise_sum, EmpiricalCdf, MeanEstimate, Z95};

use std::fmt::Write as _;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::channel::{exp_gain, gamma_gain, vector, GainKind, GainMode, GainSample};
use crate::geometry::{nearest, sample_hppp_rings, thin, GeometryError, Point, PointPattern, Window};
use crate::secrecy::{Method, SecrecyEstimate};
use crate::Config;
use field::{far_field_mean, Component, LazyField};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MonteCarloError {
    #[error("trial count must be at least 1")]
    NoTrials,
    #[error("tolerance must be in (0, 1) (got {0})")]
    InvalidTolerance(f64),
    #[error("realization degenerate: {0}")]
    DegenerateDraw(&'static str),
    #[error("trial {trial} stayed degenerate after {attempts} draws (degenerate rate so far {rate:.3}); enlarge the window or the densities")]
    RetriesExhausted { trial: u64, attempts: u32, rate: f64 },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// How interference fields at different receivers relate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FieldModel {
    /// Every receiver (typical access point, typical sink, each eavesdropper)
    /// sees its own independent interference field. This is the
    /// independence the closed-form analysis rests on.
    #[default]
    PerReceiver,
    /// One physical layout of interferers shared by all receivers, with
    /// independent fading per link.
    Shared,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationSettings {
    /// Fixed window radius; chosen from `tolerance` when `None`.
    pub window_radius: Option<f64>,
    /// Relative truncation tolerance for the window rule.
    pub tolerance: f64,
    pub field_model: FieldModel,
    pub gain_mode: GainMode,
    /// Add the mean interference from beyond the window.
    pub far_field: bool,
    pub max_retries: u32,
}

impl Default for SimulationSettings {
    fn default() -> Self {
        SimulationSettings {
            window_radius: None,
            tolerance: 1e-2,
            field_model: FieldModel::PerReceiver,
            gain_mode: GainMode::Scalar,
            far_field: true,
            max_retries: 100,
        }
    }
}

/// P(no receiving access point / sink inside the window) is kept below this.
const ASSOCIATION_MISS: f64 = 1e-6;
const MAX_WINDOW: f64 = 1e7;

/// Window radius for a configuration, snapped to the ring grid.
///
/// Largest of the interference-tail radii of both hops and the radii that
/// make an empty association set unlikely.
pub fn simulation_window(cfg: &Config, settings: &SimulationSettings) -> Result<Window, MonteCarloError> {
    if let Some(r) = settings.window_radius {
        return Ok(Window::new(r)?.snapped());
    }
    let tol = settings.tolerance;
    if !(tol > 0.0 && tol < 1.0) {
        return Err(MonteCarloError::InvalidTolerance(tol));
    }
    let mut r: f64 = 0.0;
    let hop1 = cfg.lambda_s() * cfg.rho_s() + cfg.lambda_ap() * cfg.rho_ap();
    if hop1 > 0.0 {
        r = r.max(Window::for_interference(hop1, cfg.alpha(), tol)?.radius());
    }
    let hop2 = cfg.lambda_ap() * cfg.rho_ap();
    if hop2 > 0.0 {
        r = r.max(Window::for_interference(hop2, cfg.beta(), tol)?.radius());
    }
    for lambda in [cfg.lambda_ap() * (1.0 - cfg.rho_ap()), cfg.lambda_sk()] {
        if lambda > 0.0 {
            r = r.max((-ASSOCIATION_MISS.ln() / (std::f64::consts::PI * lambda)).sqrt());
        }
    }
    if r == 0.0 {
        r = 100.0;
    }
    Ok(Window::new(r.min(MAX_WINDOW))?.snapped())
}

/// Effective power gains of one realization.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkGains {
    pub desired_ap: GainSample,
    pub desired_sk: GainSample,
    /// Towards the typical access point, aligned with `active_sensors`.
    pub sensors_at_ap: Vec<f64>,
    /// Towards the typical access point, aligned with `active_aps`.
    pub aps_at_ap: Vec<f64>,
    /// Towards the typical sink, aligned with `hop2_active_aps`.
    pub aps_at_sink: Vec<f64>,
    /// Signal gains at the sensor-tier eavesdroppers.
    pub eves_s: Vec<f64>,
    /// Signal gains at the access-point-tier eavesdroppers.
    pub eves_ap: Vec<f64>,
}

/// One draw of the whole network.
///
/// Hop 1 lives in a frame with the typical sensor at the origin, hop 2 in
/// an independent frame with the transmitting access point at the origin.
/// Under [`FieldModel::PerReceiver`] the interferer patterns of a hop are
/// centred on that hop's receiver; under [`FieldModel::Shared`] they are
/// centred on the origin and also act on the eavesdroppers.
#[derive(Debug, Clone)]
pub struct NetworkRealization {
    pub window: Window,
    pub receiving_aps: PointPattern,
    pub active_aps: PointPattern,
    pub active_sensors: PointPattern,
    pub eves_s: PointPattern,
    pub typical_ap: Point,
    pub sinks: PointPattern,
    pub hop2_active_aps: PointPattern,
    pub eves_ap: PointPattern,
    pub typical_sink: Point,
    pub gains: LinkGains,
    pub field_model: FieldModel,
    pub gain_mode: GainMode,
    pub far_field: bool,
    /// Seed of the per-eavesdropper interference streams.
    pub field_seed: u64,
}

mod stream {
    pub const AP_DRAW: u64 = 1;
    pub const AP_THIN: u64 = 2;
    pub const HOP1_SENSORS: u64 = 3;
    pub const HOP1_APS: u64 = 4;
    pub const EVES_S: u64 = 5;
    pub const DESIRED_AP: u64 = 6;
    pub const SENSOR_GAINS: u64 = 7;
    pub const AP_GAINS: u64 = 8;
    pub const EVE_S_GAINS: u64 = 9;
    pub const SINKS: u64 = 10;
    pub const HOP2_APS: u64 = 11;
    pub const EVES_AP: u64 = 12;
    pub const DESIRED_SK: u64 = 13;
    pub const SINK_GAINS: u64 = 14;
    pub const EVE_AP_GAINS: u64 = 15;
    pub const EVE_S_FIELD: u64 = 1 << 32;
    pub const EVE_AP_FIELD: u64 = 2 << 32;
}

fn stream_rng(seed: u64, id: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(id);
    r
}

/// Fading gain generator for one gain mode.
#[derive(Debug, Clone, Copy)]
struct Fading {
    mode: GainMode,
    antennas: usize,
}

impl Fading {
    /// Single-antenna transmitter to single-antenna receiver.
    fn siso<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self.mode {
            GainMode::Scalar => exp_gain(rng),
            GainMode::FullVector => vector::complex_gaussian(rng).norm_sqr(),
        }
    }

    /// Access point precoding for someone else, seen by a single antenna.
    fn miso<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self.mode {
            GainMode::Scalar => exp_gain(rng),
            GainMode::FullVector => {
                let v = vector::random_mrt(self.antennas, rng);
                vector::projection(&v, &vector::channel(self.antennas, rng))
            }
        }
    }

    /// Single-antenna transmitter through the receive combiner `w`.
    fn simo<R: Rng + ?Sized>(&self, w: &[Complex64], rng: &mut R) -> f64 {
        match self.mode {
            GainMode::Scalar => exp_gain(rng),
            GainMode::FullVector => vector::projection(w, &vector::channel(w.len(), rng)),
        }
    }

    /// Precoding access point through the receive combiner `w`.
    fn mimo<R: Rng + ?Sized>(&self, w: &[Complex64], rng: &mut R) -> f64 {
        match self.mode {
            GainMode::Scalar => exp_gain(rng),
            GainMode::FullVector => {
                let v = vector::random_mrt(w.len(), rng);
                vector::matrix_projection(w, &v, rng)
            }
        }
    }

    /// Served link; returns the gain and the matched beamformer.
    fn desired<R: Rng + ?Sized>(&self, kind: GainKind, rng: &mut R) -> (GainSample, Vec<Complex64>) {
        match self.mode {
            GainMode::Scalar => (
                GainSample {
                    value: gamma_gain(self.antennas as u32, rng),
                    kind,
                },
                Vec::new(),
            ),
            GainMode::FullVector => {
                let h = vector::channel(self.antennas, rng);
                let (w, value) = vector::matched_beamformer(&h);
                (GainSample { value, kind }, w)
            }
        }
    }
}

/// Draws one realization. The caller resamples on
/// [`MonteCarloError::DegenerateDraw`].
pub fn draw_realization<R: Rng + ?Sized>(
    cfg: &Config,
    window: Window,
    settings: &SimulationSettings,
    rng: &mut R,
) -> Result<NetworkRealization, MonteCarloError> {
    let seed: u64 = rng.gen();
    let rings = window.rings();
    let fading = Fading {
        mode: settings.gain_mode,
        antennas: cfg.antennas() as usize,
    };
    let m = cfg.antennas();

    // hop 1: one AP draw split into active (ρ_ap) and receiving (1 − ρ_ap)
    let aps = sample_hppp_rings(
        cfg.lambda_ap(),
        Point::ORIGIN,
        &rings,
        &mut stream_rng(seed, stream::AP_DRAW),
    )?;
    let (shared_active, receiving_aps) = thin(&aps, cfg.rho_ap(), &mut stream_rng(seed, stream::AP_THIN))?;
    let typical_ap = nearest(&receiving_aps, Point::ORIGIN)
        .ok_or(MonteCarloError::DegenerateDraw("no receiving access point in window"))?
        .0;
    let (center1, active_aps) = match settings.field_model {
        FieldModel::Shared => (Point::ORIGIN, shared_active),
        FieldModel::PerReceiver => {
            let fresh = sample_hppp_rings(
                cfg.lambda_ap() * cfg.rho_ap(),
                typical_ap,
                &rings,
                &mut stream_rng(seed, stream::HOP1_APS),
            )?;
            (typical_ap, fresh)
        }
    };
    let active_sensors = sample_hppp_rings(
        cfg.lambda_s() * cfg.rho_s(),
        center1,
        &rings,
        &mut stream_rng(seed, stream::HOP1_SENSORS),
    )?;
    let eves_s = sample_hppp_rings(
        cfg.lambda_e_s(),
        Point::ORIGIN,
        &rings,
        &mut stream_rng(seed, stream::EVES_S),
    )?;

    // hop 2: transmitting AP at the origin of its own frame
    let sinks = sample_hppp_rings(
        cfg.lambda_sk(),
        Point::ORIGIN,
        &rings,
        &mut stream_rng(seed, stream::SINKS),
    )?;
    let typical_sink = nearest(&sinks, Point::ORIGIN)
        .ok_or(MonteCarloError::DegenerateDraw("no sink in window"))?
        .0;
    let center2 = match settings.field_model {
        FieldModel::Shared => Point::ORIGIN,
        FieldModel::PerReceiver => typical_sink,
    };
    let hop2_active_aps = sample_hppp_rings(
        cfg.lambda_ap() * cfg.rho_ap(),
        center2,
        &rings,
        &mut stream_rng(seed, stream::HOP2_APS),
    )?;
    let eves_ap = sample_hppp_rings(
        cfg.lambda_e_ap(),
        Point::ORIGIN,
        &rings,
        &mut stream_rng(seed, stream::EVES_AP),
    )?;

    let (desired_ap, combiner) = fading.desired(
        GainKind::DesiredMrc { antennas: m },
        &mut stream_rng(seed, stream::DESIRED_AP),
    );
    let (desired_sk, precoder) = fading.desired(
        GainKind::DesiredMrt { antennas: m },
        &mut stream_rng(seed, stream::DESIRED_SK),
    );
    let mut g = stream_rng(seed, stream::SENSOR_GAINS);
    let sensors_at_ap = (0..active_sensors.len())
        .map(|_| fading.simo(&combiner, &mut g))
        .collect();
    let mut g = stream_rng(seed, stream::AP_GAINS);
    let aps_at_ap = (0..active_aps.len()).map(|_| fading.mimo(&combiner, &mut g)).collect();
    let mut g = stream_rng(seed, stream::SINK_GAINS);
    let aps_at_sink = (0..hop2_active_aps.len()).map(|_| fading.miso(&mut g)).collect();
    let mut g = stream_rng(seed, stream::EVE_S_GAINS);
    let eve_s_gains = (0..eves_s.len()).map(|_| fading.siso(&mut g)).collect();
    let mut g = stream_rng(seed, stream::EVE_AP_GAINS);
    let eve_ap_gains = (0..eves_ap.len())
        .map(|_| match settings.gain_mode {
            GainMode::Scalar => exp_gain(&mut g),
            GainMode::FullVector => vector::projection(&precoder, &vector::channel(precoder.len(), &mut g)),
        })
        .collect();

    Ok(NetworkRealization {
        window,
        receiving_aps,
        active_aps,
        active_sensors,
        eves_s,
        typical_ap,
        sinks,
        hop2_active_aps,
        eves_ap,
        typical_sink,
        gains: LinkGains {
            desired_ap,
            desired_sk,
            sensors_at_ap,
            aps_at_ap,
            aps_at_sink,
            eves_s: eve_s_gains,
            eves_ap: eve_ap_gains,
        },
        field_model: settings.field_model,
        gain_mode: settings.gain_mode,
        far_field: settings.far_field,
        field_seed: seed,
    })
}

/// SINRs of one realization.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SinrSample {
    pub gamma_ap: f64,
    pub gamma_se: f64,
    pub gamma_sk: f64,
    pub gamma_ape: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SinrKind {
    Ap,
    Se,
    Sk,
    Ape,
}

impl SinrSample {
    pub fn get(&self, kind: SinrKind) -> f64 {
        match kind {
            SinrKind::Ap => self.gamma_ap,
            SinrKind::Se => self.gamma_se,
            SinrKind::Sk => self.gamma_sk,
            SinrKind::Ape => self.gamma_ape,
        }
    }
}

fn path_sum(points: &[Point], gains: &[f64], rx: Point, eta: f64) -> f64 {
    points
        .iter()
        .zip(gains)
        .map(|(p, g)| g * p.distance_sq(&rx).powf(-0.5 * eta))
        .sum()
}

struct EveTier<'a> {
    eves: &'a PointPattern,
    gains: &'a [f64],
    eta: f64,
    noise: f64,
    components: &'a [Component],
    /// Whether each component is a precoding access point.
    precoded: &'a [bool],
    /// Shared-model interferers with their component index.
    shared: &'a [(&'a PointPattern, usize)],
    stream_base: u64,
}

/// Largest eavesdropper SINR of one tier; zero with no eavesdroppers.
fn strongest_eavesdropper(real: &NetworkRealization, tier: &EveTier<'_>, fading: &Fading) -> f64 {
    let far_mean = if real.far_field {
        far_field_mean(tier.components, tier.eta, real.window.radius())
    } else {
        0.0
    };
    let mut order: Vec<(f64, usize)> = tier
        .eves
        .points
        .iter()
        .zip(tier.gains)
        .enumerate()
        .map(|(j, (p, g))| (g * p.distance_sq(&Point::ORIGIN).powf(-0.5 * tier.eta), j))
        .collect();
    order.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    let mut best = 0.0;
    for (signal, j) in order {
        // the far-field mean is a floor on every eavesdropper's interference
        if signal / (far_mean + tier.noise) <= best {
            break;
        }
        let mut rng = stream_rng(real.field_seed, tier.stream_base + j as u64);
        let mut gain = |k: usize, r: &mut ChaCha8Rng| {
            if tier.precoded[k] {
                fading.miso(r)
            } else {
                fading.siso(r)
            }
        };
        let sinr = match real.field_model {
            FieldModel::PerReceiver => LazyField {
                components: tier.components,
                eta: tier.eta,
                radius: real.window.radius(),
                far_mean,
            }
            .sinr_above(signal, tier.noise, best, &mut gain, &mut rng),
            FieldModel::Shared => {
                let at = tier.eves.points[j];
                let mut interference = far_mean;
                for (pattern, k) in tier.shared {
                    let w = tier.components[*k].weight;
                    for p in &pattern.points {
                        interference += w * gain(*k, &mut rng) * p.distance_sq(&at).powf(-0.5 * tier.eta);
                    }
                }
                Some(signal / (interference + tier.noise))
            }
        };
        if let Some(s) = sinr {
            if s > best {
                best = s;
            }
        }
    }
    best
}

/// Evaluates the four SINRs of a realization.
pub fn compute_sinrs(real: &NetworkRealization, cfg: &Config) -> SinrSample {
    let (alpha, beta) = (cfg.alpha(), cfg.beta());
    let mu = cfg.mu();
    let n1 = cfg.noise() / cfg.p_s();
    let n2 = cfg.noise() / cfg.p_ap();
    let fading = Fading {
        mode: real.gain_mode,
        antennas: cfg.antennas() as usize,
    };
    let hop1 = [
        Component {
            intensity: cfg.lambda_s() * cfg.rho_s(),
            weight: 1.0,
        },
        Component {
            intensity: cfg.lambda_ap() * cfg.rho_ap(),
            weight: mu,
        },
    ];
    let hop2 = [Component {
        intensity: cfg.lambda_ap() * cfg.rho_ap(),
        weight: 1.0,
    }];
    let radius = real.window.radius();
    let far = |c: &[Component], eta: f64| {
        if real.far_field {
            far_field_mean(c, eta, radius)
        } else {
            0.0
        }
    };

    let ap = real.typical_ap;
    let i_ap = path_sum(&real.active_sensors.points, &real.gains.sensors_at_ap, ap, alpha)
        + mu * path_sum(&real.active_aps.points, &real.gains.aps_at_ap, ap, alpha)
        + far(&hop1, alpha);
    let gamma_ap = real.gains.desired_ap.value * ap.distance_sq(&Point::ORIGIN).powf(-0.5 * alpha) / (i_ap + n1);

    let sk = real.typical_sink;
    let i_sk = path_sum(&real.hop2_active_aps.points, &real.gains.aps_at_sink, sk, beta) + far(&hop2, beta);
    let gamma_sk = real.gains.desired_sk.value * sk.distance_sq(&Point::ORIGIN).powf(-0.5 * beta) / (i_sk + n2);

    let shared1 = [(&real.active_sensors, 0usize), (&real.active_aps, 1usize)];
    let gamma_se = strongest_eavesdropper(
        real,
        &EveTier {
            eves: &real.eves_s,
            gains: &real.gains.eves_s,
            eta: alpha,
            noise: n1,
            components: &hop1,
            precoded: &[false, true],
            shared: &shared1,
            stream_base: stream::EVE_S_FIELD,
        },
        &fading,
    );
    let shared2 = [(&real.hop2_active_aps, 0usize)];
    let gamma_ape = strongest_eavesdropper(
        real,
        &EveTier {
            eves: &real.eves_ap,
            gains: &real.gains.eves_ap,
            eta: beta,
            noise: n2,
            components: &hop2,
            precoded: &[true],
            shared: &shared2,
            stream_base: stream::EVE_AP_FIELD,
        },
        &fading,
    );
    SinrSample {
        gamma_ap,
        gamma_se,
        gamma_sk,
        gamma_ape,
    }
}

/// Instantaneous secrecy rates in bits/s/Hz.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SecrecyRates {
    pub c_ap: f64,
    pub c_sk: f64,
    pub c_overall: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RateKind {
    SensorAp,
    ApSink,
    Overall,
}

impl SecrecyRates {
    pub fn get(&self, kind: RateKind) -> f64 {
        match kind {
            RateKind::SensorAp => self.c_ap,
            RateKind::ApSink => self.c_sk,
            RateKind::Overall => self.c_overall,
        }
    }
}

pub fn secrecy_rates(s: &SinrSample) -> SecrecyRates {
    let c = |main: f64, eve: f64| (main.ln_1p() - eve.ln_1p()).max(0.0) / std::f64::consts::LN_2;
    let c_ap = c(s.gamma_ap, s.gamma_se);
    let c_sk = c(s.gamma_sk, s.gamma_ape);
    SecrecyRates {
        c_ap,
        c_sk,
        c_overall: c_ap.min(c_sk),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialRecord {
    pub trial: u64,
    pub sinr: SinrSample,
    pub rates: SecrecyRates,
    /// Draws needed, including degenerate ones.
    pub attempts: u32,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Generator of one trial.
pub fn trial_rng(base_seed: u64, trial: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(splitmix64(base_seed ^ splitmix64(trial)))
}

/// Runs one trial, resampling degenerate realizations.
pub fn run_trial(
    cfg: &Config,
    window: Window,
    settings: &SimulationSettings,
    base_seed: u64,
    trial: u64,
) -> Result<TrialRecord, MonteCarloError> {
    let mut rng = trial_rng(base_seed, trial);
    let cap = settings.max_retries.max(1);
    for attempt in 1..=cap {
        match draw_realization(cfg, window, settings, &mut rng) {
            Ok(real) => {
                let sinr = compute_sinrs(&real, cfg);
                return Ok(TrialRecord {
                    trial,
                    sinr,
                    rates: secrecy_rates(&sinr),
                    attempts: attempt,
                });
            }
            Err(MonteCarloError::DegenerateDraw(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(MonteCarloError::RetriesExhausted {
        trial,
        attempts: cap,
        rate: 1.0,
    })
}

/// All trials of one simulation, in trial order.
#[derive(Debug, Clone)]
pub struct SimulationRun {
    pub records: Vec<TrialRecord>,
    pub window: Window,
    pub base_seed: u64,
}

/// Runs `trials` independent trials in parallel.
pub fn run_trials(
    cfg: &Config,
    trials: u64,
    base_seed: u64,
    settings: &SimulationSettings,
) -> Result<SimulationRun, MonteCarloError> {
    if trials == 0 {
        return Err(MonteCarloError::NoTrials);
    }
    let window = simulation_window(cfg, settings)?;
    let records = (0..trials)
        .into_par_iter()
        .map(|t| run_trial(cfg, window, settings, base_seed, t))
        .collect::<Result<Vec<_>, _>>();
    let records = match records {
        Ok(r) => r,
        Err(MonteCarloError::RetriesExhausted { trial, attempts, .. }) => {
            // report how often the first draws of other trials failed
            let probe = trials.min(1000);
            let failed = (0..probe)
                .into_par_iter()
                .filter(|&t| draw_realization(cfg, window, settings, &mut trial_rng(base_seed, t)).is_err())
                .count();
            return Err(MonteCarloError::RetriesExhausted {
                trial,
                attempts,
                rate: failed as f64 / probe as f64,
            });
        }
        Err(e) => return Err(e),
    };
    Ok(SimulationRun {
        records,
        window,
        base_seed,
    })
}

/// Column header of the per-trial CSV.
pub const TRIAL_CSV_HEADER: &str = "trial,gamma_ap,gamma_se,gamma_sk,gamma_ape,c_ap,c_sk,c_overall";

impl SimulationRun {
    pub fn trials(&self) -> u64 {
        self.records.len() as u64
    }

    /// Fraction of all draws that had to be thrown away.
    pub fn degenerate_rate(&self) -> f64 {
        let draws: u64 = self.records.iter().map(|r| r.attempts as u64).sum();
        if draws == 0 {
            return 0.0;
        }
        (draws - self.records.len() as u64) as f64 / draws as f64
    }

    pub fn rate_samples(&self, kind: RateKind) -> Vec<f64> {
        self.records.iter().map(|r| r.rates.get(kind)).collect()
    }

    pub fn sinr_samples(&self, kind: SinrKind) -> Vec<f64> {
        self.records.iter().map(|r| r.sinr.get(kind)).collect()
    }

    /// Mean secrecy rate with its 95% confidence half-width.
    pub fn asr(&self, kind: RateKind) -> SecrecyEstimate<f64> {
        let m = MeanEstimate::from_samples(&self.rate_samples(kind));
        SecrecyEstimate {
            value: m.mean,
            method: Method::MonteCarlo,
            ci_half_width: m.ci_half_width,
            trials: Some(self.trials()),
        }
    }

    pub fn sinr_cdf(&self, kind: SinrKind) -> EmpiricalCdf {
        EmpiricalCdf::new(self.sinr_samples(kind))
    }

    pub fn rate_cdf(&self, kind: RateKind) -> EmpiricalCdf {
        EmpiricalCdf::new(self.rate_samples(kind))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(64 * self.records.len() + 80);
        out.push_str(TRIAL_CSV_HEADER);
        out.push('\n');
        for r in &self.records {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                r.trial,
                r.sinr.gamma_ap,
                r.sinr.gamma_se,
                r.sinr.gamma_sk,
                r.sinr.gamma_ape,
                r.rates.c_ap,
                r.rates.c_sk,
                r.rates.c_overall
            );
        }
        out
    }
}

/// What to estimate.
#[derive(Debug, Clone, PartialEq)]
pub enum Quantity {
    Asr(RateKind),
    SinrCdf(SinrKind, Vec<f64>),
    RateSurvival(RateKind, Vec<f64>),
}

/// A point of an empirical distribution with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TablePoint {
    pub x: f64,
    pub value: f64,
    pub std_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Estimate {
    Rate(SecrecyEstimate<f64>),
    Table(Vec<TablePoint>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimateReport {
    pub estimate: Estimate,
    pub trials: u64,
    pub degenerate_rate: f64,
}

pub fn estimate(
    cfg: &Config,
    trials: u64,
    base_seed: u64,
    quantity: &Quantity,
    settings: &SimulationSettings,
) -> Result<EstimateReport, MonteCarloError> {
    let run = run_trials(cfg, trials, base_seed, settings)?;
    Ok(EstimateReport {
        estimate: run.evaluate(quantity),
        trials,
        degenerate_rate: run.degenerate_rate(),
    })
}

impl SimulationRun {
    pub fn evaluate(&self, quantity: &Quantity) -> Estimate {
        let n = self.trials() as f64;
        let table = |cdf: EmpiricalCdf, xs: &[f64], survival: bool| {
            xs.iter()
                .map(|&x| {
                    let p = cdf.eval(x);
                    let value = if survival { 1.0 - p } else { p };
                    TablePoint {
                        x,
                        value,
                        std_error: (p * (1.0 - p) / n).sqrt(),
                    }
                })
                .collect()
        };
        match quantity {
            Quantity::Asr(k) => Estimate::Rate(self.asr(*k)),
            Quantity::SinrCdf(k, xs) => Estimate::Table(table(self.sinr_cdf(*k), xs, false)),
            Quantity::RateSurvival(k, xs) => Estimate::Table(table(self.rate_cdf(*k), xs, true)),
        }
    }
}
