//! One line per acceptance criterion; exits nonzero if any fails.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use aoci_cli::presets::{preset, trend_checks};
use aoci_core::exec::Execution;
use aoci_core::validation::{run_check, ValidateOptions, CHECKS};

struct Outcome {
    passed: bool,
    detail: String,
}

fn suite_check(name: &str, budget: Option<Duration>) -> Outcome {
    let &(name, check) = CHECKS.iter().find(|c| c.0 == name).expect("known check");
    let r = run_check(name, check, &ValidateOptions::default());
    let in_time = budget.is_none_or(|b| r.elapsed <= b);
    Outcome {
        passed: r.passed && in_time,
        detail: format!(
            "worst {:.3e} (limit {:.1e}), {}, {:.1} s",
            r.worst,
            r.limit,
            r.detail,
            r.elapsed.as_secs_f64()
        ),
    }
}

fn first_trend(figure: u8) -> Outcome {
    let cfg = preset(figure).expect("bundled preset").link_config();
    match trend_checks(figure, &cfg, Execution::default()) {
        Ok(checks) => {
            let t = &checks[0];
            Outcome { passed: t.passed, detail: format!("{} = {:.4} (target {})", t.label, t.measured, t.target) }
        }
        Err(e) => Outcome { passed: false, detail: format!("error: {e}") },
    }
}

fn run_twice(label: &str, args: &[&str], files: &[&str]) -> Result<(), String> {
    let root = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut outputs = Vec::new();
    for run in ["first", "second"] {
        let dir = root.path().join(run);
        let status = Command::new(env!("CARGO_BIN_EXE_aoci"))
            .args(args)
            .arg("--out")
            .arg(&dir)
            .output()
            .map_err(|e| e.to_string())?
            .status;
        if !status.success() {
            return Err(format!("{label}: {status}"));
        }
        let bytes: Result<Vec<Vec<u8>>, String> =
            files.iter().map(|f| std::fs::read(dir.join(f)).map_err(|e| format!("{f}: {e}"))).collect();
        outputs.push(bytes?);
    }
    if outputs[0] == outputs[1] {
        Ok(())
    } else {
        Err(format!("{label}: outputs differ"))
    }
}

fn reproducibility() -> Outcome {
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR"));
    let tmp = tempfile::tempdir().expect("temp dir");
    let sweep = tmp.path().join("sweep.json");
    std::fs::write(
        &sweep,
        r#"{"axis1": {"path": "beam.sigma_s_mm", "values": [0.05, 0.1, 0.5]}, "axis2": {"path": "source.power_mw", "values": [10, 40]}, "metric": "p_damage"}"#,
    )
    .expect("write sweep");
    let cfg = manifest.join("presets/fig7/config.json");
    let runs = [
        run_twice("figure 7", &["figure", "7", "--seed", "5"], &["fig7.csv", "fig7.svg"]),
        run_twice("figure 5", &["figure", "5"], &["fig5.csv", "fig5.svg"]),
        run_twice(
            "sweep",
            &[
                "sweep",
                "--config",
                cfg.to_str().unwrap(),
                "--sweep",
                sweep.to_str().unwrap(),
                "--method",
                "mc",
                "--svg",
            ],
            &["sweep.csv", "sweep.svg"],
        ),
        run_twice(
            "eval",
            &["eval", "--config", cfg.to_str().unwrap(), "--seed", "42", "--samples", "1000000"],
            &["eval.csv"],
        ),
    ];
    let errors: Vec<String> = runs.into_iter().filter_map(Result::err).collect();
    Outcome {
        passed: errors.is_empty(),
        detail: if errors.is_empty() {
            "figure 7, figure 5, sweep and eval outputs byte-identical".into()
        } else {
            errors.join("; ")
        },
    }
}

fn validate_command() -> Outcome {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_aoci")).arg("validate").output();
    let elapsed = start.elapsed();
    match out {
        Ok(o) => Outcome {
            passed: o.status.success() && elapsed <= Duration::from_secs(300),
            detail: format!("{}, {:.1} s", o.status, elapsed.as_secs_f64()),
        },
        Err(e) => Outcome { passed: false, detail: e.to_string() },
    }
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        ("coupling closed form vs overlap integral", || {
            suite_check("coupling_closed_vs_integral", Some(Duration::from_secs(60)))
        }),
        ("coupling maximum", || suite_check("coupling_maximum", None)),
        ("mean flux three-way agreement", || suite_check("mean_flux_three_way", Some(Duration::from_secs(300)))),
        ("closed-form pointing integral", || suite_check("pointing_integral_identity", None)),
        ("Poisson identities", || suite_check("poisson_identities", None)),
        ("jitter ratio at 40 mW", || first_trend(5)),
        ("jitter ratio at 20 mW", || first_trend(6)),
        ("monotonicity", || suite_check("monotonicity", None)),
        ("reproducibility", reproducibility),
        ("validate command", validate_command),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        failures += usize::from(!o.passed);
        println!("{} {:>2} {name}: {}", if o.passed { "PASS" } else { "FAIL" }, i + 1, o.detail);
    }
    if failures > 0 {
        println!("{failures} of {} criteria failed", criteria.len());
        std::process::exit(1);
    }
    println!("all {} criteria passed", criteria.len());
}
