//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero when any criterion fails.

use std::collections::HashMap;
use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ContinuousCDF, Normal};

use wsnsec::analytic::*;
use wsnsec::channel::GainMode;
use wsnsec::geometry::{nearest, sample_hppp, thin, Point, Window};
use wsnsec::model::{preset, presets};
use wsnsec::montecarlo::{run_trials, simulation_window, RateKind, SimulationRun, SimulationSettings, SinrKind};
use wsnsec::secrecy::*;
use wsnsec::{Config, Quadrature};

const TRIALS: u64 = 100_000;
const SEED: u64 = 20_240_601;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn fig(name: &str) -> Config {
    preset(name).unwrap().config()
}

fn spec() -> Quadrature {
    Quadrature::default()
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64)).collect()
}

/// Monte Carlo runs shared by the cross-oracle criteria.
struct Runs {
    cache: HashMap<(String, u32), SimulationRun>,
}

impl Runs {
    fn get(&mut self, name: &str, antennas: u32) -> (&SimulationRun, Config) {
        let cfg = fig(name).with_antennas(antennas).unwrap();
        let run = self
            .cache
            .entry((name.to_string(), antennas))
            .or_insert_with(|| run_trials(&cfg, TRIALS, SEED, &SimulationSettings::default()).unwrap());
        (run, cfg)
    }
}

fn criterion_1(runs: &mut Runs) -> Outcome {
    let s = spec();
    let mut worst = (0.0f64, String::new());
    let mut pass = true;
    for (name, m) in [("fig2", 1), ("fig2", 2), ("fig4", 1), ("fig4", 2)] {
        let (run, cfg) = runs.get(name, m);
        let n = run.trials() as f64;
        for &g in &[0.1, 1.0, 10.0] {
            let checks = [
                ("ap", SinrKind::Ap, cdf_gamma_ap(g, &cfg, &s).unwrap()),
                ("se", SinrKind::Se, cdf_gamma_se(g, &cfg, &s).unwrap()),
                ("sk", SinrKind::Sk, cdf_gamma_sk(g, &cfg, &s).unwrap()),
                ("ape", SinrKind::Ape, cdf_gamma_ape(g, &cfg, &s).unwrap()),
            ];
            for (label, kind, analytic) in checks {
                let emp = run.sinr_cdf(kind).eval(g);
                let tol = f64::max(0.01, 3.0 * (emp * (1.0 - emp) / n).sqrt());
                let dev = (emp - analytic).abs();
                pass &= dev <= tol;
                if dev / tol > worst.0 {
                    worst = (
                        dev / tol,
                        format!("{name} M={m} {label} at {g}: |d|={dev:.4} tol={tol:.4}"),
                    );
                }
            }
        }
    }
    outcome(
        pass,
        format!("48 checks, worst {:.2} of tolerance ({})", worst.0, worst.1),
    )
}

fn criterion_2(runs: &mut Runs) -> Outcome {
    let s = spec();
    let mut pass = true;
    let mut parts = Vec::new();
    for name in ["fig2", "fig4", "fig6"] {
        let m = fig(name).antennas();
        let (run, cfg) = runs.get(name, m);
        let analytic = [
            ("asr1", RateKind::SensorAp, asr_sensor_ap(&cfg, &s).unwrap().value),
            ("asr2", RateKind::ApSink, asr_ap_sink(&cfg, &s).unwrap().value),
            ("overall", RateKind::Overall, overall_asr(&cfg, &s).unwrap().value),
        ];
        for (label, kind, a) in analytic {
            let mc = run.asr(kind);
            let tol = f64::max(0.05 * a.abs(), 3.0 * mc.ci_half_width.unwrap());
            let ok = (mc.value - a).abs() <= tol;
            pass &= ok;
            parts.push(format!(
                "{name} {label} {a:.4}/{:.4}{}",
                mc.value,
                if ok { "" } else { "!" }
            ));
        }
    }
    outcome(pass, format!("analytic/mc: {}", parts.join(", ")))
}

fn criterion_3() -> Outcome {
    let s = spec();
    let mut worst = (0.0f64, String::new());
    for p in presets() {
        let cfg: Config = p.config::<f64>().with_antennas(1).unwrap().with_noise(0.0).unwrap();
        let pairs = [
            (
                "asr1",
                asr_sensor_ap(&cfg, &s).unwrap().value,
                asr_sensor_ap_il1(&cfg, &s).unwrap().value,
            ),
            (
                "asr2",
                asr_ap_sink(&cfg, &s).unwrap().value,
                asr_ap_sink_il1(&cfg, &s).unwrap().value,
            ),
            (
                "overall",
                overall_asr(&cfg, &s).unwrap().value,
                overall_asr_il1(&cfg, &s).unwrap().value,
            ),
        ];
        for (label, general, corollary) in pairs {
            let rel = (general - corollary).abs() / general.abs().max(f64::MIN_POSITIVE);
            if rel > worst.0 || worst.1.is_empty() {
                worst = (rel, format!("{} {label}", p.name));
            }
        }
    }
    outcome(
        worst.0 <= 1e-5,
        format!("worst relative gap {:.2e} ({})", worst.0, worst.1),
    )
}

fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

fn strictly_increasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] > w[0])
}

fn criterion_4() -> Outcome {
    let s = spec();
    let mut notes = Vec::new();
    let mut pass = true;
    let mut check = |label: &str, ok: bool, note: String| {
        pass &= ok;
        notes.push(format!("{label} {}{note}", if ok { "ok" } else { "FAIL" }));
    };

    // (a)
    let f2 = fig("fig2");
    let by_eve: Vec<f64> = log_grid(0.2, 2.0, 8)
        .into_iter()
        .map(|r| {
            asr_sensor_ap(&f2.with_param("lambda_e_s", r * f2.lambda_s()).unwrap(), &s)
                .unwrap()
                .value
        })
        .collect();
    let by_m: Vec<f64> = (1..=4)
        .map(|m| asr_sensor_ap(&f2.with_antennas(m).unwrap(), &s).unwrap().value)
        .collect();
    check(
        "(a)",
        strictly_decreasing(&by_eve) && strictly_increasing(&by_m),
        String::new(),
    );

    // (b)
    let f3 = fig("fig3");
    let at_s = |l: f64| asr_sensor_ap(&f3.with_param("lambda_s", l).unwrap(), &s).unwrap().value;
    let low: Vec<f64> = log_grid(1e-4, 1.9e-3, 8).into_iter().map(at_s).collect();
    let high: Vec<f64> = log_grid(2e-3, 1e-1, 8).into_iter().map(at_s).collect();
    let mx = low.iter().cloned().fold(f64::MIN, f64::max);
    let mn = low.iter().cloned().fold(f64::MAX, f64::min);
    let variation = (mx - mn) / mx;
    check(
        "(b)",
        variation < 0.02 && strictly_decreasing(&high),
        format!(" flat variation {:.2}%", 100.0 * variation),
    );

    // (c)
    let f5 = fig("fig5");
    let by_sk: Vec<f64> = log_grid(1e-3, 1e-1, 8)
        .into_iter()
        .map(|l| asr_ap_sink(&f5.with_param("lambda_sk", l).unwrap(), &s).unwrap().value)
        .collect();
    let by_ap: Vec<f64> = log_grid(2.5e-3, 1e-1, 8)
        .into_iter()
        .map(|l| asr_ap_sink(&f5.with_param("lambda_ap", l).unwrap(), &s).unwrap().value)
        .collect();
    check(
        "(c)",
        strictly_increasing(&by_sk) && strictly_decreasing(&by_ap),
        String::new(),
    );

    // (d)
    for name in ["fig6", "fig7"] {
        let f = fig(name);
        let v: Vec<f64> = log_grid(1e-3, 1e-1, 12)
            .into_iter()
            .map(|l| overall_asr(&f.with_param("lambda_ap", l).unwrap(), &s).unwrap().value)
            .collect();
        let (i, _) = v.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap();
        let interior = i > 0 && i + 1 < v.len() && v[i] > v[i - 1] && v[i] > v[i + 1];
        check(
            &format!("(d) {name}"),
            interior,
            format!(" peak at grid index {i} of {}", v.len()),
        );
    }
    outcome(pass, notes.join("; "))
}

fn criterion_5() -> Outcome {
    let s = spec();
    let cfg = fig("fig4").with_antennas(1).unwrap().with_noise(0.0).unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    for &target in &[0.5, 1.0, 2.0, 3.0] {
        let bound = min_sink_density(target, &cfg, &s).unwrap();
        let achieved = asr_ap_sink_il1(&cfg.with_param("lambda_sk", bound).unwrap(), &s)
            .unwrap()
            .value;
        let tight = tight_sink_density(target, &cfg, &s).unwrap();
        let ok = achieved >= target - 1e-3 && tight <= bound;
        pass &= ok;
        parts.push(format!(
            "target {target}: bound {bound:.3e} gives {achieved:.3}, tight {tight:.3e}"
        ));
    }
    outcome(pass, parts.join("; "))
}

/// m-th derivative of exp(−K(γx)^(2/η) − γxn) by Richardson-extrapolated
/// central differences.
fn fd_derivative(l: &ServingLink<f64>, gamma: f64, x: f64, m: usize) -> f64 {
    let v = |y: f64| (-l.interference * (gamma * y).powf(2.0 / l.eta) - gamma * y * l.noise).exp();
    let stencil = |h: f64| -> f64 {
        let mut acc = 0.0;
        let mut binom = 1.0;
        for k in 0..=m {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            acc += sign * binom * v(x + (m as f64 / 2.0 - k as f64) * h);
            binom = binom * (m - k) as f64 / (k + 1) as f64;
        }
        acc / h.powi(m as i32)
    };
    let h0 = x * 0.2;
    let mut t: Vec<f64> = (0..4).map(|i| stencil(h0 / 2f64.powi(i))).collect();
    let mut factor = 4.0;
    for _ in 0..3 {
        t = t.windows(2).map(|w| (factor * w[1] - w[0]) / (factor - 1.0)).collect();
        factor *= 4.0;
    }
    t[0]
}

fn criterion_6() -> Outcome {
    let s = spec();
    let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(f64::MIN_POSITIVE);

    let mut laplace = 0.0f64;
    for &eta in &[2.5f64, 3.0, 3.5, 4.0, 5.0] {
        for &lambda in &[1e-4f64, 1e-3, 1e-2] {
            for &x in &[1e-3f64, 0.1, 1.0, 10.0, 1e3] {
                let closed = laplace_eval(&StretchedExpLaplace::for_ppp(lambda, eta).unwrap(), x).unwrap();
                let numeric = (-generating_functional_exponent(lambda, eta, x, &s).unwrap()).exp();
                laplace = laplace.max(rel(closed, numeric));
            }
        }
    }

    let mut fdb = 0.0f64;
    for &noise in &[0.0, 0.05] {
        for antennas in 2..=5u32 {
            let l = ServingLink {
                association: 0.03,
                interference: 0.02,
                eta: 3.5,
                noise,
                antennas,
            };
            for &r in &[0.7f64, 1.3, 2.5] {
                for &gamma in &[0.3, 1.0, 4.0] {
                    let x = r.powf(l.eta);
                    let vx = (-l.interference * (gamma * x).powf(2.0 / l.eta) - gamma * x * noise).exp();
                    for m in 1..antennas {
                        let sum: f64 = partitions(m)
                            .unwrap()
                            .iter()
                            .map(|p| faa_di_bruno_term(p, &l, r, gamma).unwrap())
                            .sum();
                        let factorial: f64 = (1..=m).map(f64::from).product();
                        let fd = fd_derivative(&l, gamma, x, m as usize) / (factorial * vx);
                        fdb = fdb.max(rel(sum, fd));
                    }
                }
            }
        }
    }

    let counts: Vec<usize> = (1..=10).map(|m| partitions(m).unwrap().len()).collect();
    let counts_ok = counts == [1, 2, 3, 5, 7, 11, 15, 22, 30, 42];

    let fine = Quadrature::default().with_rel_tol(1e-12).with_abs_tol(1e-15);
    let mut pdf = 0.0f64;
    for name in ["fig2", "fig5"] {
        let cfg = fig(name);
        for &g in &[0.1, 1.0, 10.0] {
            let h = g * 1e-3;
            let fd = |cdf: fn(f64, &Config, &Quadrature) -> Result<f64, AnalyticError>| {
                let f = |x: f64| cdf(x, &cfg, &fine).unwrap();
                (-f(g + 2.0 * h) + 8.0 * f(g + h) - 8.0 * f(g - h) + f(g - 2.0 * h)) / (12.0 * h)
            };
            pdf = pdf.max(rel(pdf_gamma_se(g, &cfg, &fine).unwrap(), fd(cdf_gamma_se)));
            pdf = pdf.max(rel(pdf_gamma_ape(g, &cfg, &fine).unwrap(), fd(cdf_gamma_ape)));
        }
    }

    let mut norm = 0.0f64;
    for name in ["fig2", "fig6"] {
        let cfg = fig(name);
        for density in [
            pdf_gamma_se as fn(f64, &Config, &Quadrature) -> Result<f64, AnalyticError>,
            pdf_gamma_ape,
        ] {
            let total =
                wsnsec::quadrature::integrate_semi_infinite::<_, _, AnalyticError>(|g| density(g, &cfg, &s), 1.0, &s)
                    .unwrap()
                    .value;
            norm = norm.max((total - 1.0).abs());
        }
    }

    let pass = laplace <= 1e-6 && fdb <= 1e-6 && counts_ok && pdf <= 1e-6 && norm <= 1e-4;
    outcome(
        pass,
        format!(
            "laplace {laplace:.1e}, faa di bruno {fdb:.1e}, partition counts {}, pdf {pdf:.1e}, normalization {norm:.1e}",
            if counts_ok { "ok" } else { "wrong" }
        ),
    )
}

fn two_sided_p(z: f64) -> f64 {
    2.0 * (1.0 - Normal::new(0.0, 1.0).unwrap().cdf(z.abs()))
}

/// Asymptotic Kolmogorov p-value of the KS statistic `d` on `n` samples.
fn ks_p(d: f64, n: usize) -> f64 {
    let t = d * (n as f64).sqrt();
    let mut p = 0.0;
    for k in 1..=100 {
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        p += sign * (-2.0 * (k * k) as f64 * t * t).exp();
    }
    (2.0 * p).clamp(0.0, 1.0)
}

fn criterion_7() -> Outcome {
    let mut notes = Vec::new();
    let mut pass = true;
    let mut check = |label: &str, ok: bool, note: String| {
        pass &= ok;
        notes.push(format!("{label} {}{note}", if ok { "ok" } else { "FAIL" }));
    };
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);

    // counts
    let (lambda, window) = (0.01, Window::new(30.0).unwrap());
    let reps = 4000;
    let counts: Vec<f64> = (0..reps)
        .map(|_| sample_hppp(lambda, window, &mut rng).unwrap().len() as f64)
        .collect();
    let mean = counts.iter().sum::<f64>() / reps as f64;
    let var = counts.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (reps - 1) as f64;
    let expect = lambda * window.area();
    // variance of the sample variance of a Poisson(μ) is ≈ (μ + 2μ²)/n
    let var_se = ((expect + 2.0 * expect * expect) / reps as f64).sqrt();
    check(
        "counts",
        (mean - expect).abs() < 4.0 * (expect / reps as f64).sqrt() && (var - expect).abs() < 4.0 * var_se,
        format!(" mean {mean:.2} var {var:.2} vs {expect:.2}"),
    );

    // thinning
    let big = sample_hppp(0.05, Window::new(200.0).unwrap(), &mut rng).unwrap();
    let (kept, dropped) = thin(&big, 0.3, &mut rng).unwrap();
    let n = big.len() as f64;
    let frac = kept.len() as f64 / n;
    check(
        "thinning",
        (frac - 0.3).abs() < 4.0 * (0.3 * 0.7 / n).sqrt() && kept.len() + dropped.len() == big.len(),
        format!(" kept {frac:.4}"),
    );

    // nearest distance
    let lambda = 0.02;
    let mut d: Vec<f64> = (0..5000)
        .map(|_| {
            let p = sample_hppp(lambda, Window::new(40.0).unwrap(), &mut rng).unwrap();
            nearest(&p, Point::ORIGIN).unwrap().1
        })
        .collect();
    d.sort_by(f64::total_cmp);
    let ks = d
        .iter()
        .enumerate()
        .map(|(i, &r)| {
            let f = 1.0 - (-lambda * std::f64::consts::PI * r * r).exp();
            f64::max(
                ((i + 1) as f64 / d.len() as f64 - f).abs(),
                (i as f64 / d.len() as f64 - f).abs(),
            )
        })
        .fold(0.0, f64::max);
    let p_ks = ks_p(ks, d.len());
    check("rayleigh KS", p_ks > 0.01, format!(" p={p_ks:.3}"));

    // window doubling, scalar vs full vector, E[min] ≤ min(E)
    let kinds = [RateKind::SensorAp, RateKind::ApSink, RateKind::Overall];
    let mut worst_doubling = 0.0f64;
    let mut worst_p = 1.0f64;
    let mut min_ok = true;
    let s = spec();
    for p in presets() {
        let cfg: Config = p.config();
        let base = SimulationSettings::default();
        let radius = simulation_window(&cfg, &base).unwrap().radius();
        let near = run_trials(
            &cfg,
            10_000,
            SEED,
            &SimulationSettings {
                window_radius: Some(radius),
                ..base
            },
        )
        .unwrap();
        let far = run_trials(
            &cfg,
            10_000,
            SEED,
            &SimulationSettings {
                window_radius: Some(2.0 * radius),
                ..base
            },
        )
        .unwrap();
        let vector = run_trials(
            &cfg,
            10_000,
            SEED + 1,
            &SimulationSettings {
                gain_mode: GainMode::FullVector,
                ..base
            },
        )
        .unwrap();
        for k in kinds {
            let (a, b) = (near.asr(k).value, far.asr(k).value);
            worst_doubling = worst_doubling.max((a - b).abs() / a.abs().max(f64::MIN_POSITIVE));
            let (x, y) = (near.asr(k), vector.asr(k));
            let se = (x.ci_half_width.unwrap().powi(2) + y.ci_half_width.unwrap().powi(2)).sqrt() / 1.959_964;
            worst_p = worst_p.min(two_sided_p((x.value - y.value) / se));
        }
        let mc = [
            near.asr(kinds[0]).value,
            near.asr(kinds[1]).value,
            near.asr(kinds[2]).value,
        ];
        min_ok &= mc[2] <= mc[0].min(mc[1]);
        let a1 = asr_sensor_ap(&cfg, &s).unwrap().value;
        let a2 = asr_ap_sink(&cfg, &s).unwrap().value;
        let overall = overall_asr(&cfg, &s).unwrap().value;
        min_ok &= overall <= a1.min(a2) * (1.0 + 1e-9);
    }
    let tol = SimulationSettings::default().tolerance;
    check(
        "window doubling",
        worst_doubling < tol,
        format!(" worst {worst_doubling:.1e} < {tol}"),
    );
    check("scalar vs vector", worst_p > 0.01, format!(" min p={worst_p:.3}"));
    check("E[min] <= min(E)", min_ok, String::new());
    outcome(pass, notes.join("; "))
}

fn main() -> ExitCode {
    let mut runs = Runs { cache: HashMap::new() };
    let criteria: Vec<(&str, Box<dyn FnOnce(&mut Runs) -> Outcome>)> = vec![
        ("1 cross-oracle CDFs", Box::new(criterion_1)),
        ("2 cross-oracle ASRs", Box::new(criterion_2)),
        ("3 corollary consistency", Box::new(|_| criterion_3())),
        ("4 figure trends", Box::new(|_| criterion_4())),
        ("5 sink density bound sufficiency", Box::new(|_| criterion_5())),
        ("6 math kernel oracles", Box::new(|_| criterion_6())),
        ("7 simulation health", Box::new(|_| criterion_7())),
    ];
    let mut failed = 0;
    let mut out = std::io::stdout();
    for (label, run) in criteria {
        let start = Instant::now();
        let o = run(&mut runs);
        if !o.pass {
            failed += 1;
        }
        let _ = writeln!(
            out,
            "{} criterion {label}: {} [{:.0}s]",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail,
            start.elapsed().as_secs_f64()
        );
        let _ = out.flush();
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        let _ = writeln!(out, "{failed} criterion(s) failed");
        ExitCode::FAILURE
    }
}
