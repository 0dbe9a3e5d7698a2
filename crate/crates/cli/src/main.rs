use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use wsnsec::channel::GainMode;
use wsnsec::model::{preset, presets, Scenario};
use wsnsec::montecarlo::{draw_realization, run_trials, simulation_window, trial_rng, FieldModel, SimulationSettings};
use wsnsec::{Config, Quadrature};
use wsnsec_cli::{plan_sinks, run_sweep, validate, CliError, Grid, MethodChoice, Quantity, SweepArg, SweepSpec};

#[derive(Parser)]
#[command(
    name = "wsnsec",
    version,
    about = "Secrecy-rate curves for three-tier wireless sensor networks"
)]
struct Cli {
    /// Directory for outputs given as relative paths, and for default file names.
    #[arg(long, global = true, env = "WSNSEC_OUT_DIR")]
    out_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a quantity over a parameter grid and write CSV.
    Sweep(SweepCmd),
    /// Compare analytic distributions and rates with simulation.
    Validate(ValidateCmd),
    /// Sink density needed for a target sink-hop secrecy rate.
    PlanSinks(PlanCmd),
    /// List the bundled reference scenarios.
    Presets(PresetsCmd),
}

#[derive(Args)]
struct ScenarioArgs {
    /// Scenario file (JSON or key = value lines).
    #[arg(long, conflicts_with = "preset")]
    scenario: Option<PathBuf>,
    /// Bundled scenario name (see `wsnsec presets`).
    #[arg(long)]
    preset: Option<String>,
}

impl ScenarioArgs {
    fn load(&self) -> Result<(String, Config), CliError> {
        match (&self.scenario, &self.preset) {
            (Some(path), None) => {
                let sc = Scenario::load(path)?;
                let label = sc.name.clone().unwrap_or_else(|| path.display().to_string());
                Ok((label, sc.config()?))
            }
            (None, Some(name)) => {
                let p = preset(name).ok_or_else(|| CliError::Usage(format!("unknown preset {name:?}")))?;
                Ok((p.name.to_string(), p.config()))
            }
            _ => Err(CliError::Usage("give --scenario <path> or --preset <name>".into())),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FieldArg {
    PerReceiver,
    Shared,
}

#[derive(Clone, Copy, ValueEnum)]
enum GainArg {
    Scalar,
    Vector,
}

#[derive(Args)]
struct SimArgs {
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Fixed simulation window radius in metres.
    #[arg(long)]
    window_radius: Option<f64>,
    /// Relative interference truncation tolerance for the window rule.
    #[arg(long, default_value_t = 1e-2)]
    tol: f64,
    #[arg(long, value_enum, default_value = "per-receiver")]
    field_model: FieldArg,
    #[arg(long, value_enum, default_value = "scalar")]
    gains: GainArg,
}

impl SimArgs {
    fn settings(&self) -> Result<SimulationSettings, CliError> {
        if let Some(r) = self.window_radius {
            if !(r > 0.0 && r.is_finite()) {
                return Err(CliError::Usage(format!("--window-radius must be > 0 (got {r})")));
            }
        }
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(CliError::Usage(format!("--tol must lie in (0, 1) (got {})", self.tol)));
        }
        Ok(SimulationSettings {
            window_radius: self.window_radius,
            tolerance: self.tol,
            field_model: match self.field_model {
                FieldArg::PerReceiver => FieldModel::PerReceiver,
                FieldArg::Shared => FieldModel::Shared,
            },
            gain_mode: match self.gains {
                GainArg::Scalar => GainMode::Scalar,
                GainArg::Vector => GainMode::FullVector,
            },
            ..SimulationSettings::default()
        })
    }
}

#[derive(Args)]
struct SweepCmd {
    #[command(flatten)]
    scenario: ScenarioArgs,
    /// `<param>=<grid>`; grid is `a,b,c`, `log:from:to:points` or `lin:from:to:points`.
    #[arg(long)]
    sweep: String,
    #[arg(long, default_value = "asr-sensor-ap")]
    quantity: String,
    /// analytic, mc or both.
    #[arg(long, default_value = "analytic")]
    method: String,
    /// Threshold for cdf-* and survival-* quantities swept over a model parameter.
    #[arg(long)]
    at: Option<f64>,
    #[command(flatten)]
    sim: SimArgs,
    /// Output CSV; stdout when neither this nor the output directory is set.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateCmd {
    #[command(flatten)]
    scenario: ScenarioArgs,
    #[command(flatten)]
    sim: SimArgs,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write per-trial SINRs and rates as CSV.
    #[arg(long)]
    trial_csv: Option<PathBuf>,
    /// Write the point patterns of trial 0 as x,y CSV files into this directory.
    #[arg(long)]
    dump_patterns: Option<PathBuf>,
}

#[derive(Args)]
struct PlanCmd {
    #[command(flatten)]
    scenario: ScenarioArgs,
    /// Target sink-hop secrecy rate(s) in bits/s/Hz, as a grid.
    #[arg(long)]
    target: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PresetsCmd {
    /// Print one preset as a scenario file.
    #[arg(long)]
    show: Option<String>,
}

fn resolve(out_dir: &Option<PathBuf>, out: &Option<PathBuf>, default_name: &str) -> Option<PathBuf> {
    match (out, out_dir) {
        (Some(p), Some(dir)) if p.is_relative() => Some(dir.join(p)),
        (Some(p), _) => Some(p.clone()),
        (None, Some(dir)) => Some(dir.join(default_name)),
        (None, None) => None,
    }
}

fn emit(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => {
            if let Some(parent) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(parent)
                    .map_err(|e| CliError::Io(format!("cannot create {}: {e}", parent.display())))?;
            }
            fs::write(p, text).map_err(|e| CliError::Io(format!("cannot write {}: {e}", p.display())))?;
            log::info!("wrote {}", p.display());
            Ok(())
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::Io(e.to_string()))
        }
    }
}

fn sweep(cmd: &SweepCmd, out_dir: &Option<PathBuf>) -> Result<ExitCode, CliError> {
    let (_, cfg) = cmd.scenario.load()?;
    let spec = SweepSpec {
        sweep: cmd.sweep.parse::<SweepArg>()?,
        quantity: cmd.quantity.parse::<Quantity>()?,
        method: cmd.method.parse::<MethodChoice>()?,
        threshold: cmd.at,
        trials: cmd.sim.trials,
        seed: cmd.sim.seed,
        settings: cmd.sim.settings()?,
        quadrature: Quadrature::default(),
    };
    let table = run_sweep(&cfg, &spec)?;
    let name = format!("sweep-{}-{}.csv", spec.sweep.param, spec.quantity);
    emit(resolve(out_dir, &cmd.out, &name).as_deref(), &table.to_csv())?;
    for e in &table.errors {
        eprintln!("error: {e}");
    }
    Ok(if table.has_errors() {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    })
}

fn run_validate(cmd: &ValidateCmd, out_dir: &Option<PathBuf>) -> Result<ExitCode, CliError> {
    let (label, cfg) = cmd.scenario.load()?;
    if cmd.sim.trials == 0 {
        return Err(CliError::Usage("--trials must be at least 1".into()));
    }
    let settings = cmd.sim.settings()?;
    let run = run_trials(&cfg, cmd.sim.trials, cmd.sim.seed, &settings)?;
    let checks = validate(&cfg, &run, &Quadrature::default())?;
    let passed = checks.iter().filter(|c| c.passed()).count();
    let mut report = format!(
        "scenario {label}: {} trials, seed {}, window {} m, degenerate rate {}\n",
        run.trials(),
        cmd.sim.seed,
        run.window.radius(),
        run.degenerate_rate()
    );
    for c in &checks {
        report.push_str(&c.to_string());
        report.push('\n');
    }
    report.push_str(&format!("{passed}/{} checks passed\n", checks.len()));
    emit(resolve(out_dir, &cmd.out, "validate.txt").as_deref(), &report)?;
    if let Some(p) = &cmd.trial_csv {
        emit(resolve(out_dir, &Some(p.clone()), "").as_deref(), &run.to_csv())?;
    }
    if let Some(dir) = &cmd.dump_patterns {
        let dir = resolve(out_dir, &Some(dir.clone()), "").unwrap_or_default();
        let window = simulation_window(&cfg, &settings)?;
        // trial 0's first draw, which is what the run used unless it was degenerate
        let real = draw_realization(&cfg, window, &settings, &mut trial_rng(cmd.sim.seed, 0))?;
        for (name, pattern) in [
            ("receiving_aps", &real.receiving_aps),
            ("active_aps", &real.active_aps),
            ("active_sensors", &real.active_sensors),
            ("eves_s", &real.eves_s),
            ("sinks", &real.sinks),
            ("hop2_active_aps", &real.hop2_active_aps),
            ("eves_ap", &real.eves_ap),
        ] {
            emit(Some(&dir.join(format!("{name}.csv"))), &pattern.to_csv())?;
        }
    }
    Ok(if passed == checks.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn run_plan(cmd: &PlanCmd, out_dir: &Option<PathBuf>) -> Result<ExitCode, CliError> {
    let (label, cfg) = cmd.scenario.load()?;
    let targets: Grid = cmd.target.parse()?;
    let q = Quadrature::default();
    let mut report = format!(
        "scenario {label}: sink hop with M = 1 and noise ignored, lambda_ap = {}, beta = {}, lambda_e_ap = {}\n",
        cfg.lambda_ap(),
        cfg.beta(),
        cfg.lambda_e_ap()
    );
    report.push_str("target,bound,tight,bound_over_tight,rate_at_bound,bound_sufficient\n");
    let mut insufficient = 0;
    for &t in &targets.0 {
        let p = plan_sinks(&cfg, t, &q)?;
        if !p.bound_sufficient() {
            insufficient += 1;
        }
        report.push_str(&format!(
            "{},{},{},{},{},{}\n",
            p.target,
            p.bound,
            p.tight,
            p.ratio(),
            p.rate_at_bound,
            p.bound_sufficient()
        ));
    }
    emit(resolve(out_dir, &cmd.out, "plan-sinks.csv").as_deref(), &report)?;
    if insufficient > 0 {
        eprintln!(
            "warning: the closed-form bound under-provisions sinks for {insufficient} target(s); use the tight density"
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn list_presets(cmd: &PresetsCmd) -> Result<ExitCode, CliError> {
    if let Some(name) = &cmd.show {
        let p = preset(name).ok_or_else(|| CliError::Usage(format!("unknown preset {name:?}")))?;
        emit(None, &(p.scenario.to_json() + "\n"))?;
        return Ok(ExitCode::SUCCESS);
    }
    let mut text = String::new();
    for p in presets() {
        let c: Config = p.config();
        text.push_str(&format!("{}  {}\n", p.name, p.description()));
        text.push_str(&format!(
            "      lambda_s={} lambda_ap={} lambda_sk={} lambda_e_s={} lambda_e_ap={} rho_s={} rho_ap={} M={} alpha={} beta={} p_s={:.4e} p_ap={:.4e} noise={:.4e}\n",
            c.lambda_s(),
            c.lambda_ap(),
            c.lambda_sk(),
            c.lambda_e_s(),
            c.lambda_e_ap(),
            c.rho_s(),
            c.rho_ap(),
            c.antennas(),
            c.alpha(),
            c.beta(),
            c.p_s(),
            c.p_ap(),
            c.noise()
        ));
    }
    emit(None, &text)?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Sweep(c) => sweep(c, &cli.out_dir),
        Command::Validate(c) => run_validate(c, &cli.out_dir),
        Command::PlanSinks(c) => run_plan(c, &cli.out_dir),
        Command::Presets(c) => list_presets(c),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
