//! Sweeps, validation and sink planning behind the `wsnsec` binary.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use wsnsec::analytic::{cdf_gamma_ap, cdf_gamma_ape, cdf_gamma_se, cdf_gamma_sk, AnalyticError};
use wsnsec::model::{ConfigError, FIELD_NAMES};
use wsnsec::montecarlo::{run_trials, MonteCarloError, RateKind, SimulationRun, SimulationSettings, SinrKind, Z95};
use wsnsec::secrecy::{
    asr_ap_sink, asr_ap_sink_il1, asr_sensor_ap, min_sink_density, overall_asr, pr_cs_ap_exceeds, pr_cs_sk_exceeds,
    tight_sink_density,
};
use wsnsec::{Config, Quadrature};

/// Version of the sweep CSV layout, written in its first line.
pub const SCHEMA_VERSION: u32 = 1;
pub const SWEEP_HEADER: &str = "param,value,method,ci_half_width,trials,degenerate_rate";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Analytic(#[from] AnalyticError),
    #[error(transparent)]
    MonteCarlo(#[from] MonteCarloError),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    /// Process exit code: 2 for bad input, 1 for numerical failure.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Analytic(_) | CliError::MonteCarlo(_) => 1,
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Grid of sweep values: `a,b,c`, `log:from:to:points` or `lin:from:to:points`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid(pub Vec<f64>);

impl FromStr for Grid {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        let s = s.trim();
        if s.is_empty() {
            return Err(usage("empty grid"));
        }
        let num = |t: &str| -> Result<f64, CliError> {
            let v: f64 = t.trim().parse().map_err(|_| usage(format!("bad grid value {t:?}")))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(usage(format!("grid value {t:?} is not finite")))
            }
        };
        let values = if let Some(rest) = s.strip_prefix("log:").or_else(|| s.strip_prefix("lin:")) {
            let log = s.starts_with("log:");
            let parts: Vec<&str> = rest.split(':').collect();
            if parts.len() != 3 {
                return Err(usage(format!("range grid needs from:to:points, got {rest:?}")));
            }
            let (from, to) = (num(parts[0])?, num(parts[1])?);
            let n: usize = parts[2]
                .trim()
                .parse()
                .map_err(|_| usage(format!("bad point count {:?}", parts[2])))?;
            if n == 0 {
                return Err(usage("empty grid"));
            }
            if log && !(from > 0.0 && to > 0.0) {
                return Err(usage("log grid bounds must be > 0"));
            }
            (0..n)
                .map(|i| {
                    let t = if n == 1 { 0.0 } else { i as f64 / (n - 1) as f64 };
                    if log {
                        from * (to / from).powf(t)
                    } else {
                        from + (to - from) * t
                    }
                })
                .collect()
        } else {
            s.split(',').map(num).collect::<Result<Vec<_>, _>>()?
        };
        if values.is_empty() {
            return Err(usage("empty grid"));
        }
        Ok(Grid(values))
    }
}

/// `--sweep <param>=<grid>`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepArg {
    pub param: String,
    pub grid: Grid,
}

/// Threshold axis of the distribution quantities.
pub const THRESHOLD_PARAM: &str = "threshold";
/// Eavesdropper densities as a multiple of the legitimate density of the tier.
pub const RATIO_PARAMS: [&str; 2] = ["ratio_e_s", "ratio_e_ap"];

impl FromStr for SweepArg {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        let (param, grid) = s
            .split_once('=')
            .ok_or_else(|| usage(format!("--sweep expects <param>=<grid>, got {s:?}")))?;
        let param = param.trim().to_string();
        if !FIELD_NAMES.contains(&param.as_str()) && param != THRESHOLD_PARAM && !RATIO_PARAMS.contains(&param.as_str())
        {
            return Err(usage(format!(
                "unknown sweep parameter {param:?}; expected one of {}, {}, {}",
                FIELD_NAMES.join(", "),
                RATIO_PARAMS.join(", "),
                THRESHOLD_PARAM
            )));
        }
        Ok(SweepArg {
            param,
            grid: grid.parse()?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    AsrSensorAp,
    AsrApSink,
    AsrOverall,
    CdfAp,
    CdfSe,
    CdfSk,
    CdfApe,
    /// P(C_ap > x).
    SurvivalAp,
    /// P(C_sk > x).
    SurvivalSk,
}

impl Quantity {
    pub const ALL: [Quantity; 9] = [
        Quantity::AsrSensorAp,
        Quantity::AsrApSink,
        Quantity::AsrOverall,
        Quantity::CdfAp,
        Quantity::CdfSe,
        Quantity::CdfSk,
        Quantity::CdfApe,
        Quantity::SurvivalAp,
        Quantity::SurvivalSk,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Quantity::AsrSensorAp => "asr-sensor-ap",
            Quantity::AsrApSink => "asr-ap-sink",
            Quantity::AsrOverall => "asr-overall",
            Quantity::CdfAp => "cdf-ap",
            Quantity::CdfSe => "cdf-se",
            Quantity::CdfSk => "cdf-sk",
            Quantity::CdfApe => "cdf-ape",
            Quantity::SurvivalAp => "survival-ap",
            Quantity::SurvivalSk => "survival-sk",
        }
    }

    /// Whether the quantity is evaluated at a threshold.
    pub fn needs_threshold(self) -> bool {
        !matches!(self, Quantity::AsrSensorAp | Quantity::AsrApSink | Quantity::AsrOverall)
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Quantity {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        Quantity::ALL.into_iter().find(|q| q.name() == s).ok_or_else(|| {
            let names: Vec<&str> = Quantity::ALL.iter().map(|q| q.name()).collect();
            usage(format!("unknown quantity {s:?}; expected one of {}", names.join(", ")))
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodChoice {
    Analytic,
    MonteCarlo,
    Both,
}

impl FromStr for MethodChoice {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "analytic" => Ok(MethodChoice::Analytic),
            "mc" => Ok(MethodChoice::MonteCarlo),
            "both" => Ok(MethodChoice::Both),
            _ => Err(usage(format!("unknown method {s:?}; expected analytic, mc or both"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub sweep: SweepArg,
    pub quantity: Quantity,
    pub method: MethodChoice,
    /// Fixed threshold for distribution quantities swept over a model parameter.
    pub threshold: Option<f64>,
    pub trials: u64,
    pub seed: u64,
    pub settings: SimulationSettings,
    pub quadrature: Quadrature,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), CliError> {
        let on_threshold = self.sweep.param == THRESHOLD_PARAM;
        if on_threshold && !self.quantity.needs_threshold() {
            return Err(usage(format!("{} has no threshold to sweep", self.quantity)));
        }
        if self.quantity.needs_threshold() && !on_threshold && self.threshold.is_none() {
            return Err(usage(format!(
                "{} swept over {} needs --at <threshold>",
                self.quantity, self.sweep.param
            )));
        }
        if self.method != MethodChoice::Analytic && self.trials == 0 {
            return Err(usage("--trials must be at least 1"));
        }
        Ok(())
    }
}

/// Applies one sweep value to a configuration.
pub fn apply_param(cfg: &Config, param: &str, value: f64) -> Result<Config, CliError> {
    match param {
        THRESHOLD_PARAM => Ok(*cfg),
        "ratio_e_s" => Ok(cfg.with_param("lambda_e_s", value * cfg.lambda_s())?),
        "ratio_e_ap" => Ok(cfg.with_param("lambda_e_ap", value * cfg.lambda_ap())?),
        field => Ok(cfg.with_param(field, value)?),
    }
}

/// One CSV row. `value` is `None` when the evaluation failed.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub param: f64,
    pub value: Option<f64>,
    pub method: &'static str,
    pub ci_half_width: Option<f64>,
    pub trials: Option<u64>,
    pub degenerate_rate: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub param: String,
    pub quantity: Quantity,
    pub rows: Vec<SweepRow>,
    /// Messages of failed rows, in row order.
    pub errors: Vec<String>,
}

impl SweepTable {
    pub fn has_errors(&self) -> bool {
        !self.errors.is_empty()
    }

    pub fn to_csv(&self) -> String {
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        let mut out = format!(
            "# wsnsec sweep schema={SCHEMA_VERSION} param={} quantity={}\n{SWEEP_HEADER}\n",
            self.param, self.quantity
        );
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                r.param,
                r.value.map(|v| v.to_string()).unwrap_or_else(|| "error".into()),
                r.method,
                opt(r.ci_half_width),
                r.trials.map(|t| t.to_string()).unwrap_or_default(),
                opt(r.degenerate_rate)
            );
        }
        for e in &self.errors {
            let _ = writeln!(out, "# error: {e}");
        }
        out
    }
}

/// Analytic value of `quantity` at threshold `x` (ignored for rates).
pub fn analytic_value(quantity: Quantity, cfg: &Config, x: f64, spec: &Quadrature) -> Result<f64, AnalyticError> {
    Ok(match quantity {
        Quantity::AsrSensorAp => asr_sensor_ap(cfg, spec)?.value,
        Quantity::AsrApSink => asr_ap_sink(cfg, spec)?.value,
        Quantity::AsrOverall => overall_asr(cfg, spec)?.value,
        Quantity::CdfAp => cdf_gamma_ap(x, cfg, spec)?,
        Quantity::CdfSe => cdf_gamma_se(x, cfg, spec)?,
        Quantity::CdfSk => cdf_gamma_sk(x, cfg, spec)?,
        Quantity::CdfApe => cdf_gamma_ape(x, cfg, spec)?,
        Quantity::SurvivalAp => pr_cs_ap_exceeds(x, cfg, spec)?,
        Quantity::SurvivalSk => pr_cs_sk_exceeds(x, cfg, spec)?,
    })
}

/// Monte Carlo value of `quantity` at threshold `x` with its 95% half-width.
pub fn mc_value(quantity: Quantity, run: &SimulationRun, x: f64) -> (f64, Option<f64>) {
    let rate = |k: RateKind| {
        let e = run.asr(k);
        (e.value, e.ci_half_width)
    };
    let n = run.trials() as f64;
    let binomial = |p: f64| (p, (n > 1.0).then(|| Z95 * (p * (1.0 - p) / n).sqrt()));
    match quantity {
        Quantity::AsrSensorAp => rate(RateKind::SensorAp),
        Quantity::AsrApSink => rate(RateKind::ApSink),
        Quantity::AsrOverall => rate(RateKind::Overall),
        Quantity::CdfAp => binomial(run.sinr_cdf(SinrKind::Ap).eval(x)),
        Quantity::CdfSe => binomial(run.sinr_cdf(SinrKind::Se).eval(x)),
        Quantity::CdfSk => binomial(run.sinr_cdf(SinrKind::Sk).eval(x)),
        Quantity::CdfApe => binomial(run.sinr_cdf(SinrKind::Ape).eval(x)),
        Quantity::SurvivalAp => binomial(1.0 - run.rate_cdf(RateKind::SensorAp).eval(x)),
        Quantity::SurvivalSk => binomial(1.0 - run.rate_cdf(RateKind::ApSink).eval(x)),
    }
}

/// Runs a sweep. Failures at single grid points become error rows; only
/// invalid input is returned as `Err`.
pub fn run_sweep(base: &Config, spec: &SweepSpec) -> Result<SweepTable, CliError> {
    spec.validate()?;
    let on_threshold = spec.sweep.param == THRESHOLD_PARAM;
    // configurations are validated up front so bad grids fail before any work
    let configs = spec
        .sweep
        .grid
        .0
        .iter()
        .map(|&v| apply_param(base, &spec.sweep.param, v))
        .collect::<Result<Vec<_>, _>>()?;
    let threshold_at = |v: f64| if on_threshold { v } else { spec.threshold.unwrap_or(0.0) };
    let mut table = SweepTable {
        param: spec.sweep.param.clone(),
        quantity: spec.quantity,
        rows: Vec::new(),
        errors: Vec::new(),
    };
    let grid = &spec.sweep.grid.0;

    if spec.method != MethodChoice::MonteCarlo {
        for (&v, cfg) in grid.iter().zip(&configs) {
            let value = analytic_value(spec.quantity, cfg, threshold_at(v), &spec.quadrature);
            if let Err(e) = &value {
                table.errors.push(format!("{}={v} analytic: {e}", spec.sweep.param));
            }
            table.rows.push(SweepRow {
                param: v,
                value: value.ok(),
                method: "analytic",
                ci_half_width: None,
                trials: None,
                degenerate_rate: None,
            });
        }
    }

    if spec.method != MethodChoice::Analytic {
        // a threshold sweep reuses one simulation of the base scenario
        let shared = if on_threshold {
            Some(run_trials(base, spec.trials, spec.seed, &spec.settings))
        } else {
            None
        };
        for (&v, cfg) in grid.iter().zip(&configs) {
            let owned;
            let run = match &shared {
                Some(r) => r,
                None => {
                    owned = run_trials(cfg, spec.trials, spec.seed, &spec.settings);
                    &owned
                }
            };
            match run {
                Ok(run) => {
                    let (value, ci) = mc_value(spec.quantity, run, threshold_at(v));
                    table.rows.push(SweepRow {
                        param: v,
                        value: Some(value),
                        method: "mc",
                        ci_half_width: ci,
                        trials: Some(run.trials()),
                        degenerate_rate: Some(run.degenerate_rate()),
                    });
                }
                Err(e) => {
                    table.errors.push(format!("{}={v} mc: {e}", spec.sweep.param));
                    table.rows.push(SweepRow {
                        param: v,
                        value: None,
                        method: "mc",
                        ci_half_width: None,
                        trials: Some(spec.trials),
                        degenerate_rate: None,
                    });
                }
            }
        }
    }
    Ok(table)
}

/// One line of a validation report.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub analytic: f64,
    pub mc: f64,
    pub tolerance: f64,
}

impl Check {
    pub fn delta(&self) -> f64 {
        (self.mc - self.analytic).abs()
    }

    pub fn passed(&self) -> bool {
        self.delta() <= self.tolerance
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {:<22} analytic {:<12.6} mc {:<12.6} |d| {:.2e} tol {:.2e}",
            if self.passed() { "PASS" } else { "FAIL" },
            self.name,
            self.analytic,
            self.mc,
            self.delta(),
            self.tolerance
        )
    }
}

/// Thresholds at which the SINR distributions are compared.
pub const VALIDATION_THRESHOLDS: [f64; 5] = [0.01, 0.1, 1.0, 10.0, 100.0];

/// Compares the four SINR distributions and three rates against simulation.
///
/// CDF checks pass within max(0.01, 3 binomial standard errors), rate
/// checks within max(5% relative, 3 confidence half-widths).
pub fn validate(cfg: &Config, run: &SimulationRun, spec: &Quadrature) -> Result<Vec<Check>, CliError> {
    let mut checks = Vec::new();
    let n = run.trials() as f64;
    for (label, q) in [
        ("cdf_ap", Quantity::CdfAp),
        ("cdf_se", Quantity::CdfSe),
        ("cdf_sk", Quantity::CdfSk),
        ("cdf_ape", Quantity::CdfApe),
    ] {
        for &x in &VALIDATION_THRESHOLDS {
            let a = analytic_value(q, cfg, x, spec)?;
            let (m, _) = mc_value(q, run, x);
            checks.push(Check {
                name: format!("{label}({x})"),
                analytic: a,
                mc: m,
                tolerance: f64::max(0.01, 3.0 * (m * (1.0 - m) / n).sqrt()),
            });
        }
    }
    for (label, q) in [
        ("asr_sensor_ap", Quantity::AsrSensorAp),
        ("asr_ap_sink", Quantity::AsrApSink),
        ("asr_overall", Quantity::AsrOverall),
    ] {
        let a = analytic_value(q, cfg, 0.0, spec)?;
        let (m, ci) = mc_value(q, run, 0.0);
        checks.push(Check {
            name: label.to_string(),
            analytic: a,
            mc: m,
            tolerance: f64::max(0.05 * a.abs(), 3.0 * ci.unwrap_or(0.0)),
        });
    }
    Ok(checks)
}

/// Result of sink-density planning.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinkPlan {
    pub target: f64,
    /// Closed-form density bound.
    pub bound: f64,
    /// Exact density at which the single-antenna interference-limited rate meets the target.
    pub tight: f64,
    /// That rate evaluated at `bound`.
    pub rate_at_bound: f64,
}

impl SinkPlan {
    pub fn bound_sufficient(&self) -> bool {
        self.rate_at_bound >= self.target - 1e-3
    }

    pub fn ratio(&self) -> f64 {
        if self.tight == 0.0 {
            1.0
        } else {
            self.bound / self.tight
        }
    }
}

/// Plans the sink density for `target` bits/s/Hz on the sink hop. Works on
/// the single-antenna, interference-limited version of `cfg`.
pub fn plan_sinks(cfg: &Config, target: f64, spec: &Quadrature) -> Result<SinkPlan, CliError> {
    if !(target >= 0.0) || !target.is_finite() {
        return Err(usage(format!("target must be finite and >= 0 (got {target})")));
    }
    let il = cfg.with_antennas(1)?.with_noise(0.0)?;
    let bound = min_sink_density(target, &il, spec)?;
    let tight = tight_sink_density(target, &il, spec)?;
    let rate_at_bound = if bound == 0.0 {
        0.0
    } else {
        asr_ap_sink_il1(&il.with_param("lambda_sk", bound)?, spec)?.value
    };
    Ok(SinkPlan {
        target,
        bound,
        tight,
        rate_at_bound,
    })
}
