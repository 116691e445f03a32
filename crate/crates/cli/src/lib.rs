//! The `aoci` command-line tool: single-point evaluation, parameter sweeps,
//! figure presets and the validation suite.

pub mod output;
pub mod presets;
pub mod svg;

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};

use aoci_core::exec::Execution;
use aoci_core::kpi::kpi_report;
use aoci_core::photometry::{link_budget, mean_flux, ChannelState, FluxMethod};
use aoci_core::sweep::{run_sweep, SweepSpec};
use aoci_core::validation::{run_check, ValidateOptions, CHECKS};
use aoci_core::{Error, LinkConfig};

use crate::presets::preset;
use crate::svg::{LinePlot, Series};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Parser)]
#[command(name = "aoci", version, about = "Link budget of an all-optical cochlear implant")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one configuration and print the link report.
    Eval {
        /// Link configuration (JSON).
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        run: RunArgs,
        /// Also write eval.csv to this directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate a metric over a one- or two-axis grid.
    Sweep {
        /// Base link configuration (JSON).
        #[arg(long)]
        config: PathBuf,
        /// Sweep specification (JSON).
        #[arg(long)]
        sweep: PathBuf,
        #[command(flatten)]
        run: RunArgs,
        /// Directory for sweep.csv (and sweep.svg).
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Also write sweep.svg.
        #[arg(long)]
        svg: bool,
    },
    /// Regenerate a bundled figure (3 to 8) and print its trend checks.
    Figure {
        #[arg(value_parser = clap::value_parser!(u8).range(3..=8))]
        number: u8,
        #[command(flatten)]
        run: RunArgs,
        /// Directory for the figure's CSV and SVG files.
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Accepted for symmetry with `sweep`; figures always include SVG.
        #[arg(long)]
        svg: bool,
    },
    /// Run the self-check suite.
    Validate {
        /// Reduced grids and sample counts.
        #[arg(long)]
        quick: bool,
        /// Skew every closed-form value slightly so the suite must fail.
        #[arg(long, hide = true)]
        inject_perturbation: bool,
    },
}

#[derive(Args, Clone)]
struct RunArgs {
    /// Mean-flux route. Probabilities are always Monte Carlo.
    #[arg(long, value_enum)]
    method: Option<MethodArg>,
    /// Monte Carlo sample count (overrides the config).
    #[arg(long)]
    samples: Option<u64>,
    /// Monte Carlo seed (overrides the config).
    #[arg(long)]
    seed: Option<u64>,
    /// Fail with exit code 3 instead of falling back when the series declines.
    #[arg(long)]
    strict: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Series,
    Quadrature,
    Mc,
}

impl From<MethodArg> for FluxMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Series => FluxMethod::Series,
            MethodArg::Quadrature => FluxMethod::Quadrature,
            MethodArg::Mc => FluxMethod::MonteCarlo,
        }
    }
}

impl RunArgs {
    fn method(&self, default: FluxMethod) -> FluxMethod {
        self.method.map_or(default, FluxMethod::from)
    }

    fn apply(&self, cfg: LinkConfig) -> anyhow::Result<LinkConfig> {
        if self.samples.is_none() && self.seed.is_none() {
            return Ok(cfg);
        }
        let samples = self.samples.unwrap_or(cfg.mc.samples);
        let seed = self.seed.unwrap_or(cfg.mc.seed);
        Ok(cfg.with_mc(samples, seed)?)
    }
}

/// Parse `args` (including the program name), run, and return the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    let result = match cli.command {
        Command::Eval { config, run, out } => cmd_eval(&config, &run, out.as_deref()),
        Command::Sweep { config, sweep, run, out, svg } => cmd_sweep(&config, &sweep, &run, &out, svg),
        Command::Figure { number, run, out, svg: _ } => cmd_figure(number, &run, &out),
        Command::Validate { quick, inject_perturbation } => cmd_validate(quick, inject_perturbation),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            exit_code(&e)
        }
    }
}

fn exit_code(e: &anyhow::Error) -> i32 {
    match e.downcast_ref::<Error>() {
        Some(Error::Config { .. }) | None => EXIT_CONFIG,
        Some(_) => EXIT_NUMERICAL,
    }
}

fn load_config(path: &Path) -> anyhow::Result<LinkConfig> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let cfg = LinkConfig::from_json(&text)?;
    for w in &cfg.warnings {
        eprintln!("warning: {w}");
    }
    Ok(cfg)
}

fn write_file(dir: &Path, name: &str, bytes: &[u8]) -> anyhow::Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn cmd_eval(config: &Path, run: &RunArgs, out: Option<&Path>) -> anyhow::Result<i32> {
    let cfg = run.apply(load_config(config)?)?;
    let exec = Execution::default();
    let st = ChannelState::new(&cfg);
    let method = run.method(FluxMethod::Quadrature);
    let flux = mean_flux(&cfg, method, run.strict, exec)?;
    let report = kpi_report(&cfg, exec)?;
    let budget = link_budget(flux.value, &cfg.neural);

    let mut rows: Vec<(&str, String)> = vec![
        ("config_hash", cfg.hash()),
        ("seed", cfg.mc.seed.to_string()),
        ("samples", cfg.mc.samples.to_string()),
        ("path_gain", st.path_gain.to_string()),
        ("w_delta_m", st.beam.w_delta.to_string()),
        ("upsilon", st.beam.upsilon.to_string()),
        ("w_eq_m", st.beam.w_eq.to_string()),
        ("a0", st.beam.a0.to_string()),
        ("collimation_gain", st.collimation_gain.to_string()),
        ("fiber_efficiency", st.fiber_efficiency.to_string()),
        ("coupling_argument", st.coupling_argument.to_string()),
        ("eta_aligned", st.eta_aligned.to_string()),
        ("mean_flux", flux.value.to_string()),
        ("mean_flux_err_bound", flux.err_bound.to_string()),
        ("mean_flux_method", flux.method.to_string()),
        ("link_budget_photons", budget.to_string()),
        ("p_hearing", report.p_hearing.p.to_string()),
        ("p_hearing_ci_low", report.p_hearing.ci_low.to_string()),
        ("p_hearing_ci_high", report.p_hearing.ci_high.to_string()),
        ("p_false_hearing", report.p_false_hearing.literal.to_string()),
        ("p_false_hearing_gamma_closed_form", report.p_false_hearing.gamma_closed_form.to_string()),
        ("p_damage", report.p_damage.p.to_string()),
        ("p_damage_ci_low", report.p_damage.ci_low.to_string()),
        ("p_damage_ci_high", report.p_damage.ci_high.to_string()),
        ("skin_irradiance_w_per_m2", report.safety.skin_irradiance.to_string()),
        ("neuron_irradiance_w_per_m2", report.safety.neuron_irradiance.to_string()),
        ("mpe_skin_ok", report.safety.mpe_skin_ok.to_string()),
        ("mpe_neuron_ok", report.safety.mpe_neuron_ok.to_string()),
        ("max_safe_power_w", report.safety.max_safe_power.to_string()),
        ("min_hearing_power_w", report.safety.min_hearing_power.map(|p| p.to_string()).unwrap_or_default()),
    ];
    let (lo, hi) =
        report.safety.dynamic_range.map_or((String::new(), String::new()), |(a, b)| (a.to_string(), b.to_string()));
    rows.push(("dynamic_range_min_w", lo));
    rows.push(("dynamic_range_max_w", hi));

    if flux.method != method {
        println!("note: the {method} route declined; mean flux computed by {}", flux.method);
    }
    if report.safety.dynamic_range.is_none() {
        println!("note: dynamic range is empty");
    }
    let width = rows.iter().map(|r| r.0.len()).max().unwrap_or(0);
    for (k, v) in &rows {
        println!("{k:width$}  {v}");
    }
    if let Some(dir) = out {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(["quantity", "value"])?;
        for (k, v) in &rows {
            w.write_record([k, v.as_str()])?;
        }
        write_file(dir, "eval.csv", &w.into_inner()?)?;
    }
    Ok(EXIT_OK)
}

fn provenance(cfg: &LinkConfig) -> String {
    format!("config_hash={} seed={} samples={}", cfg.hash(), cfg.mc.seed, cfg.mc.samples)
}

/// Code for a finished sweep: numerical failures only count in strict mode.
fn sweep_exit(result: &aoci_core::sweep::SweepResult, strict: bool) -> i32 {
    let mut numerical = 0;
    for e in result.failures() {
        eprintln!("point failed: {e}");
        numerical += usize::from(!matches!(e, Error::Config { .. }));
    }
    if strict && numerical > 0 {
        EXIT_NUMERICAL
    } else {
        EXIT_OK
    }
}

fn cmd_sweep(config: &Path, sweep: &Path, run: &RunArgs, out: &Path, svg: bool) -> anyhow::Result<i32> {
    let cfg = run.apply(load_config(config)?)?;
    let text = fs::read_to_string(sweep).with_context(|| format!("reading {}", sweep.display()))?;
    let mut spec = SweepSpec::from_json(&text)?;
    spec.method = run.method(spec.method);
    if run.samples.is_some() || run.seed.is_some() {
        // flags win over the sweep file's budget
        spec.mc = None;
    }
    let result = run_sweep(&cfg, &spec, run.strict, Execution::default())?;
    write_file(out, "sweep.csv", &output::sweep_csv(&result, &cfg.hash())?)?;
    if svg {
        let title = format!("{} sweep", output::metric_label(spec.metric.as_str()));
        let svg = svg::with_desc(&output::sweep_svg(&result, &title), &provenance(&cfg));
        write_file(out, "sweep.svg", svg.as_bytes())?;
    }
    Ok(sweep_exit(&result, run.strict))
}

fn cmd_figure(number: u8, run: &RunArgs, out: &Path) -> anyhow::Result<i32> {
    let p = preset(number).expect("clap restricts the figure number");
    let cfg = run.apply(p.link_config())?;
    let exec = Execution::default();
    let mut code = EXIT_OK;
    let mut results = Vec::new();
    for (suffix, mut spec) in p.sweeps() {
        spec.method = run.method(spec.method);
        let result = run_sweep(&cfg, &spec, run.strict, exec)?;
        write_file(out, &format!("fig{number}{suffix}.csv"), &output::sweep_csv(&result, &cfg.hash())?)?;
        code = code.max(sweep_exit(&result, run.strict));
        results.push(result);
    }
    let svg = if number == 8 {
        figure8_svg(&p, &cfg, &results)
    } else {
        output::render(&results[0], p.title, p.plot_style())
    };
    write_file(out, &format!("fig{number}.svg"), svg::with_desc(&svg, &provenance(&cfg)).as_bytes())?;

    println!("trend checks (config {}, seed {}):", cfg.hash(), cfg.mc.seed);
    for t in presets::trend_checks(number, &cfg, exec)? {
        let verdict = if t.passed { "PASS" } else { "FAIL" };
        println!("  {verdict} {}: {:.4e} (target {})", t.label, t.measured, t.target);
    }
    Ok(code)
}

/// Hearing and damage curves on one log-power axis with the skin-MPE
/// power marked.
fn figure8_svg(p: &presets::Preset, cfg: &LinkConfig, results: &[aoci_core::sweep::SweepResult]) -> String {
    let s = &cfg.safety;
    let skin_limit_mw = s.skin_mpe * std::f64::consts::PI * s.skin_spot_radius * s.skin_spot_radius * 1e3;
    let mut series: Vec<Series> = output::curves(&results[0], false);
    series.extend(output::curves(&results[1], true).into_iter().map(|mut c| {
        c.label = format!("{}, P_d", c.label);
        c
    }));
    svg::line_plot(&LinePlot {
        title: p.title.into(),
        x_label: output::axis_label("source.power_mw"),
        y_label: "probability".into(),
        x_log: true,
        y_log: false,
        series,
        markers: vec![(skin_limit_mw, "skin MPE".into())],
    })
}

fn cmd_validate(quick: bool, perturb: bool) -> anyhow::Result<i32> {
    let opts = ValidateOptions { quick, perturbation: if perturb { 1e-4 } else { 0.0 }, exec: Execution::default() };
    let mut failed = Vec::new();
    for (name, check) in CHECKS {
        let r = run_check(name, check, &opts);
        let verdict = if r.passed { "PASS" } else { "FAIL" };
        println!(
            "{verdict} {:<28} worst {:.3e} (limit {:.1e})  {}  [{:.2} s]",
            r.name,
            r.worst,
            r.limit,
            r.detail,
            r.elapsed.as_secs_f64()
        );
        if !r.passed {
            failed.push(r.name);
        }
    }
    if failed.is_empty() {
        println!("all {} checks passed", CHECKS.len());
        Ok(EXIT_OK)
    } else {
        println!("failed: {}", failed.join(", "));
        Ok(EXIT_VALIDATION)
    }
}
