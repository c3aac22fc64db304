//! `optomech` — steady states, stability, and scattering spectra for a
//! cross-Kerr-enhanced optomechanical system.
//!
//! Exit codes: 0 success, 1 usage/configuration error, 2 physics error
//! (unstable model, singular probe, phase out of branch), 3 marginal
//! stability (the `stability` subcommand only), 4 acceptance failure.

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use optomech::dynamics::{eigen_stability, FluctuationModel, Verdict};
use optomech::scattering::{self, sweep_spectrum, SweepParams, Which};
use optomech::steadystate::{self, classify_regime, solve_steady_state, Regime};
use optomech_cli::acceptance;
use optomech_cli::config::RunConfig;
use optomech_cli::output::{fmt_f64, spectrum_rows, write_csv, write_flat, SPECTRUM_HEADER};
use optomech_cli::presets::{run_preset, Preset};
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "optomech", version, about, disable_help_subcommand = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModelChoice {
    Full,
    Rwa,
    Both,
}

#[derive(Args)]
struct CommonIo {
    /// Parameter file (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format.
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Worker threads for sweeps (env: OPTOMECH_JOBS).
    #[arg(long, env = "OPTOMECH_JOBS")]
    jobs: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the classical steady state and classify the coupling regime.
    Steady {
        #[arg(long)]
        config: PathBuf,
        /// Emit one JSON object instead of key=value lines.
        #[arg(long)]
        json: bool,
    },
    /// Stability analysis of the linearized fluctuation dynamics.
    Stability {
        #[arg(long)]
        config: PathBuf,
        /// Which drift matrix to test.
        #[arg(long, value_enum, default_value = "full")]
        model: ModelChoice,
        /// Override the effective coupling (rad/s, after unit conversion).
        #[arg(long)]
        g_eff: Option<f64>,
        /// Override the modified optical detuning (rad/s).
        #[arg(long)]
        delta_c2: Option<f64>,
        #[arg(long)]
        json: bool,
    },
    /// Sweep the probe frequency and write the scattering spectrum.
    Spectrum {
        #[command(flatten)]
        io: CommonIo,
        /// Which model's stability gates the sweep.
        #[arg(long, value_enum, default_value = "both")]
        which: ModelChoice,
        /// Sweep even if the gated model is unstable.
        #[arg(long)]
        allow_unstable: bool,
    },
    /// Two-parameter sweep in long CSV format (param1,param2,value).
    Sweep2d {
        #[command(flatten)]
        io: CommonIo,
        /// First axis: a [grid.<name>] table (omega, g_eff, gamma_b, xi).
        #[arg(long)]
        x: String,
        /// Second axis, same options as --x.
        #[arg(long)]
        y: String,
        /// Probability channel to record.
        #[arg(long, default_value = "t_ab")]
        channel: String,
        #[arg(long)]
        allow_unstable: bool,
    },
    /// Print the coupling-regime table for the configured parameters.
    Regimes {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Reproduce a published table or figure dataset.
    Reproduce {
        /// Preset name (table2, fig3a, fig3b, fig5..fig11, appendixD).
        preset: String,
        /// Output directory.
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Override the default grid resolution (smoke runs).
        #[arg(long)]
        count: Option<usize>,
        #[arg(long, env = "OPTOMECH_JOBS")]
        jobs: Option<usize>,
    },
    /// Run the acceptance suite; nonzero exit on failure.
    Acceptance {
        /// Only run criteria whose id starts with this prefix.
        filter: Option<String>,
        /// Write the JSON summary here as well.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // clap prints its own message; usage problems exit with 1.
            let _ = err.print();
            return if err.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(classify_error(&err))
        }
    }
}

/// Physics failures exit 2; everything else is a usage/configuration error.
fn classify_error(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<steadystate::SteadyStateError>()
            || cause.is::<scattering::ScatterError>()
            || cause.is::<optomech::dynamics::DynError>()
        {
            return 2;
        }
    }
    1
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Steady { config, json } => steady(&config, json),
        Command::Stability { config, model, g_eff, delta_c2, json } => {
            stability(&config, model, g_eff, delta_c2, json)
        }
        Command::Spectrum { io, which, allow_unstable } => spectrum(io, which, allow_unstable),
        Command::Sweep2d { io, x, y, channel, allow_unstable } => {
            sweep2d(io, &x, &y, &channel, allow_unstable)
        }
        Command::Regimes { config, json } => regimes(&config, json),
        Command::Reproduce { preset, out, count, jobs } => {
            with_jobs(jobs, || reproduce(&preset, &out, count))
        }
        Command::Acceptance { filter, out, format } => acceptance_cmd(filter.as_deref(), out, format),
    }
}

fn with_jobs<T>(jobs: Option<usize>, body: impl FnOnce() -> T + Send) -> T
where
    T: Send,
{
    match jobs {
        Some(n) if n > 0 => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .expect("thread pool")
            .install(body),
        _ => body(),
    }
}

fn write_out(out: Option<&PathBuf>, body: &str) -> Result<()> {
    match out {
        Some(path) => {
            std::fs::write(path, body).with_context(|| format!("writing {}", path.display()))?
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(body.as_bytes())?;
        }
    }
    Ok(())
}

fn steady(config: &PathBuf, json: bool) -> Result<u8> {
    let cfg = RunConfig::from_path(config)?;
    let solution = solve_steady_state(&cfg.params, &cfg.drive_a, &cfg.drive_b)?;
    let report = classify_regime(solution.state.g_eff, cfg.params.g0, &cfg.params, &cfg.drive_b)?;
    if json {
        let blob = serde_json::json!({ "steady_state": solution, "regime": report });
        println!("{}", serde_json::to_string_pretty(&blob)?);
        return Ok(0);
    }
    let s = &solution.state;
    let mut entries: Vec<(&str, String)> = vec![
        ("beta_s_re", fmt_f64(s.beta_s.re)),
        ("beta_s_im", fmt_f64(s.beta_s.im)),
        ("beta_s_real", s.beta_s_real.map_or("none".into(), fmt_f64)),
        ("alpha_re", fmt_f64(s.alpha.re)),
        ("alpha_im", fmt_f64(s.alpha.im)),
        ("alpha_r", fmt_f64(s.alpha_r)),
        ("eta_re", fmt_f64(s.eta.re)),
        ("eta_im", fmt_f64(s.eta.im)),
        ("n_a", fmt_f64(s.n_a)),
        ("n_b", fmt_f64(s.n_b)),
        ("g_single", fmt_f64(s.g_single)),
        ("g_eff", fmt_f64(s.g_eff)),
        ("phi_a", fmt_f64(solution.phi_a)),
        ("phi_b", fmt_f64(solution.phi_b)),
        ("phi_b_constrained", fmt_f64(solution.phi_b_constrained)),
        ("delta_c0", fmt_f64(solution.delta_c0)),
        ("delta_c2", fmt_f64(solution.delta_c2)),
        ("regime", report.regime.label().to_string()),
        ("regime_beta_lo", fmt_f64(report.beta_required.lo)),
        ("regime_beta_hi", report.beta_required.hi.map_or("inf".into(), fmt_f64)),
        ("regime_power_lo_w", fmt_f64(report.power_required.lo)),
        ("regime_power_hi_w", report.power_required.hi.map_or("inf".into(), fmt_f64)),
        ("regime_phonons_lo", fmt_f64(report.phonons.lo)),
        ("regime_phonons_hi", report.phonons.hi.map_or("inf".into(), fmt_f64)),
    ];
    for (i, root) in solution.photon_roots.iter().enumerate() {
        entries.push(("photon_root", format!("{i}:{}", fmt_f64(*root))));
    }
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    let owned: Vec<(&str, String)> = entries;
    write_flat(&mut lock, &owned)?;
    Ok(0)
}

fn derived_sweep_params(cfg: &RunConfig) -> Result<SweepParams> {
    let g_eff = match cfg.g_eff {
        Some(g) => g,
        None => solve_steady_state(&cfg.params, &cfg.drive_a, &cfg.drive_b)?.state.g_eff,
    };
    Ok(SweepParams {
        delta_c2: cfg.delta_c2_or_default(),
        delta_m: cfg.params.delta_m,
        kappa_a: cfg.params.kappa_a,
        gamma_b: cfg.params.gamma_b,
        g_eff,
    })
}

fn stability(
    config: &PathBuf,
    model: ModelChoice,
    g_eff: Option<f64>,
    delta_c2: Option<f64>,
    json: bool,
) -> Result<u8> {
    let cfg = RunConfig::from_path(config)?;
    let mut sp = derived_sweep_params(&cfg)?;
    if let Some(g) = g_eff {
        sp.g_eff = g;
    }
    if let Some(d) = delta_c2 {
        sp.delta_c2 = d;
    }
    let models: Vec<(&str, FluctuationModel)> = match model {
        ModelChoice::Full => vec![("full", FluctuationModel::Full(sp.full_model()))],
        ModelChoice::Rwa => vec![("rwa", FluctuationModel::Rwa(sp.rwa_model()))],
        ModelChoice::Both => vec![
            ("full", FluctuationModel::Full(sp.full_model())),
            ("rwa", FluctuationModel::Rwa(sp.rwa_model())),
        ],
    };
    let mut worst = Verdict::Stable;
    let mut reports = Vec::new();
    for (label, m) in &models {
        let report = eigen_stability(m)?;
        worst = worse_verdict(worst, report.verdict);
        reports.push((*label, report));
    }
    if json {
        let blob: serde_json::Value = serde_json::json!({
            "params": sp,
            "reports": reports.iter().map(|(k, v)| serde_json::json!({"model": k, "report": v})).collect::<Vec<_>>(),
        });
        println!("{}", serde_json::to_string_pretty(&blob)?);
    } else {
        for (label, report) in &reports {
            println!("model={label}");
            println!(
                "coefficients={}",
                report.coefficients.map(fmt_f64).join(",")
            );
            for (i, e) in report.eigenvalues.iter().enumerate() {
                println!("eigenvalue_{i}={}{}{}i", fmt_f64(e.re), if e.im < 0.0 { "-" } else { "+" }, fmt_f64(e.im.abs()));
            }
            println!("margins={}", report.margins.map(fmt_f64).join(","));
            println!("routh_hurwitz_pass={}", report.routh_hurwitz_pass);
            println!("eigen_pass={}", report.eigen_pass);
            println!("verdict={:?}", report.verdict);
        }
    }
    Ok(match worst {
        Verdict::Stable => 0,
        Verdict::Unstable => 2,
        Verdict::Marginal => 3,
    })
}

fn worse_verdict(a: Verdict, b: Verdict) -> Verdict {
    use Verdict::*;
    match (a, b) {
        (Unstable, _) | (_, Unstable) => Unstable,
        (Marginal, _) | (_, Marginal) => Marginal,
        _ => Stable,
    }
}

fn which_of(choice: ModelChoice) -> Which {
    match choice {
        ModelChoice::Full => Which::Full,
        ModelChoice::Rwa => Which::Rwa,
        ModelChoice::Both => Which::Both,
    }
}

fn spectrum(io: CommonIo, which: ModelChoice, allow_unstable: bool) -> Result<u8> {
    let cfg = RunConfig::from_path(&io.config)?;
    let sp = derived_sweep_params(&cfg)?;
    let axis = cfg.grid("omega")?;
    let spec = with_jobs(io.jobs, || {
        sweep_spectrum(&sp, &axis.points, which_of(which), allow_unstable)
    })?;
    let body = match io.format {
        Format::Csv => {
            let mut buf = Vec::new();
            write_csv(&mut buf, &SPECTRUM_HEADER, &spectrum_rows(&spec))?;
            String::from_utf8(buf)?
        }
        Format::Json => serde_json::to_string_pretty(&spec)?,
    };
    write_out(io.out.as_ref(), &body)?;
    Ok(0)
}

fn sweep2d(io: CommonIo, x: &str, y: &str, channel: &str, allow_unstable: bool) -> Result<u8> {
    let cfg = RunConfig::from_path(&io.config)?;
    let base = derived_sweep_params(&cfg)?;
    let channel = parse_channel(channel)?;
    let x_axis = cfg.grid(x)?.points.clone();
    let y_axis = cfg.grid(y)?.points.clone();
    validate_axis_name(x)?;
    validate_axis_name(y)?;
    if !allow_unstable {
        // The base point is gated; axis values vary the model, so points
        // crossing a stability boundary require the explicit override.
        let report = eigen_stability(&FluctuationModel::Full(base.full_model()))?;
        if report.verdict == Verdict::Unstable {
            return Err(scattering::ScatterError::UnstableModel.into());
        }
    }
    let mut rows = Vec::with_capacity(x_axis.len() * y_axis.len());
    for &xv in &x_axis {
        for &yv in &y_axis {
            let mut sp = base;
            let mut omega = base.delta_c2;
            apply_axis(&mut sp, &mut omega, x, xv);
            apply_axis(&mut sp, &mut omega, y, yv);
            let probs =
                scattering::probabilities(omega, &sp.full_model(), &sp.rwa_model())?;
            rows.push(vec![xv, yv, channel.extract(&probs)]);
        }
    }
    let mut buf = Vec::new();
    write_csv(&mut buf, &["param1", "param2", "value"], &rows)?;
    write_out(io.out.as_ref(), &String::from_utf8(buf)?)?;
    Ok(0)
}

fn validate_axis_name(name: &str) -> Result<()> {
    match name {
        "omega" | "g_eff" | "gamma_b" | "xi" => Ok(()),
        other => anyhow::bail!("unknown sweep axis {other:?}; use omega, g_eff, gamma_b, or xi"),
    }
}

fn apply_axis(sp: &mut SweepParams, omega: &mut f64, axis: &str, value: f64) {
    match axis {
        "omega" => *omega = value,
        "g_eff" => sp.g_eff = value,
        "gamma_b" => sp.gamma_b = value,
        // Dissipative-equilibrium axis: both rates move together.
        "xi" => {
            sp.kappa_a = value;
            sp.gamma_b = value;
        }
        _ => unreachable!("validated earlier"),
    }
}

fn parse_channel(name: &str) -> Result<scattering::Channel> {
    use scattering::Channel::*;
    Ok(match name {
        "p_ab" => PAb,
        "p_ba" => PBa,
        "theta_vac_a" => ThetaVacA,
        "theta_vac_b" => ThetaVacB,
        "t_ab" => TAb,
        "t_ba" => TBa,
        "sigma_ab" => SigmaAb,
        other => anyhow::bail!("unknown channel {other:?}"),
    })
}

fn regimes(config: &PathBuf, json: bool) -> Result<u8> {
    let cfg = RunConfig::from_path(config)?;
    let solution = solve_steady_state(&cfg.params, &cfg.drive_a, &cfg.drive_b)?;
    let g_eff = cfg.g_eff.unwrap_or(solution.state.g_eff);
    let probes = [
        (Regime::Weak, 0.25 * cfg.params.kappa_a),
        (Regime::Strong, 0.5 * cfg.params.kappa_a),
        (Regime::Ultrastrong, 0.1 * cfg.params.delta_m),
        (Regime::DeepStrong, 1.5 * cfg.params.delta_m),
    ];
    let mut rows = Vec::new();
    for (_, probe) in &probes {
        rows.push(classify_regime(*probe, cfg.params.g0, &cfg.params, &cfg.drive_b)?);
    }
    let current = classify_regime(g_eff, cfg.params.g0, &cfg.params, &cfg.drive_b)?;
    if json {
        println!(
            "{}",
            serde_json::to_string_pretty(&serde_json::json!({
                "operating_point": { "g_eff": g_eff, "regime": current.regime.label() },
                "table": rows,
            }))?
        );
        return Ok(0);
    }
    println!("operating point: g_eff={} -> {}", fmt_f64(g_eff), current.regime.label());
    let fmt_hi = |v: Option<f64>| v.map_or("inf".to_string(), fmt_f64);
    for row in &rows {
        println!(
            "{}: G [{}, {}) beta [{}, {}) P_b [{}, {}) W N_b [{}, {})",
            row.regime.label(),
            fmt_f64(row.g_interval.lo),
            fmt_hi(row.g_interval.hi),
            fmt_f64(row.beta_required.lo),
            fmt_hi(row.beta_required.hi),
            fmt_f64(row.power_required.lo),
            fmt_hi(row.power_required.hi),
            fmt_f64(row.phonons.lo),
            fmt_hi(row.phonons.hi),
        );
    }
    Ok(0)
}

fn reproduce(preset: &str, out: &PathBuf, count: Option<usize>) -> Result<u8> {
    let preset = Preset::parse(preset)?;
    let run = run_preset(preset, out, count)?;
    for file in &run.files {
        println!("wrote {}", file.display());
    }
    for line in &run.summary {
        println!("{line}");
    }
    Ok(0)
}

fn acceptance_cmd(filter: Option<&str>, out: Option<PathBuf>, format: Format) -> Result<u8> {
    let results = acceptance::run(filter);
    for line in acceptance::format_lines(&results) {
        println!("{line}");
    }
    let failed = results.iter().filter(|r| !r.pass).count();
    let summary = serde_json::json!({
        "total": results.len(),
        "failed": failed,
        "results": results,
    });
    let blob = serde_json::to_string_pretty(&summary)?;
    if let Some(path) = &out {
        std::fs::write(path, &blob).with_context(|| format!("writing {}", path.display()))?;
    }
    if format == Format::Json && out.is_none() {
        println!("{blob}");
    }
    println!(
        "acceptance: {}/{} passed",
        results.len() - failed,
        results.len()
    );
    Ok(if failed > 0 { 4 } else { 0 })
}
