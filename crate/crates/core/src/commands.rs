//! Command dispatch and artifact writers shared by the CLI and the tests.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::bc_algebra::{classify_locality, validate_pair, Verdict};
use crate::charge_dynamics::{activation_times, bc_residual, default_activation_threshold, ChargeHistory};
use crate::free_wave::{Kirchhoff, QuadratureOrders};
use crate::scenario::{to_toml, Scenario};
use crate::wavefield::{default_snapshot_times, propagation_experiment, run_charges, FieldEvaluator, FieldSnapshot};
use crate::Result;

pub const EXIT_SUCCESS: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_BOUND_VIOLATED: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Validate,
    Classify,
    Simulate,
    PropagationTest,
}

/// Command-line overrides applied on top of the scenario.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunOptions {
    pub step: Option<f64>,
    pub quad_order: Option<usize>,
    pub workers: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub exit_code: i32,
    pub files: Vec<PathBuf>,
    pub summary: String,
}

/// Fixed 12-significant-digit scientific notation; `-0` prints as `0`.
pub fn format_number(v: f64) -> String {
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{v:.11e}")
}

fn apply_options(scenario: &Scenario, options: &RunOptions) -> Scenario {
    let mut s = scenario.clone();
    if let Some(h) = options.step {
        s.step = h;
    }
    if let Some(n) = options.quad_order {
        s.quadrature = QuadratureOrders::with_polar(n);
    }
    s
}

struct Writer {
    dir: PathBuf,
    files: Vec<PathBuf>,
}

impl Writer {
    fn new(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, contents)?;
        self.files.push(path);
        Ok(())
    }

    fn finish(self, exit_code: i32, summary: String) -> Outcome {
        Outcome {
            exit_code,
            files: self.files,
            summary,
        }
    }
}

/// Runs `command` on `scenario`, writing artifacts into `out_dir`.
///
/// Exit codes: 0 success, 2 invalid boundary-condition pair, 3 propagation
/// bound violated. Other failures are returned as errors (exit code 1 in the CLI).
pub fn run_command(command: Command, scenario: &Scenario, out_dir: &Path, options: &RunOptions) -> Result<Outcome> {
    let scenario = apply_options(scenario, options);
    let mut out = Writer::new(out_dir)?;
    out.write("scenario.toml", &to_toml(&scenario))?;

    let report = validate_pair(&scenario.config);
    if command == Command::Validate || !report.is_valid() {
        out.write("validation.txt", &format!("{report}\n"))?;
        if !report.is_valid() {
            let summary = match report.first_failure() {
                Some(check) => format!("invalid: {} check failed", check.kind.code()),
                None => "invalid".to_string(),
            };
            return Ok(out.finish(EXIT_INVALID, summary));
        }
        if command == Command::Validate {
            return Ok(out.finish(EXIT_SUCCESS, "valid".to_string()));
        }
    }

    match command {
        Command::Validate => unreachable!("handled above"),
        Command::Classify => {
            let class = classify_locality(&scenario.config);
            out.write("classification.txt", &format!("{class}\n"))?;
            let code = match class.verdict {
                Verdict::Invalid { .. } => EXIT_INVALID,
                _ => EXIT_SUCCESS,
            };
            Ok(out.finish(code, class.verdict.label().to_string()))
        }
        Command::Simulate => simulate(&scenario, out, options.workers),
        Command::PropagationTest => {
            let report = propagation_experiment(&scenario.experiment(options.workers.max(1)))?;
            let json = serde_json::to_string_pretty(&report).expect("report serializes");
            out.write("report.json", &(json + "\n"))?;
            let (code, summary) = if report.is_violated() {
                (EXIT_BOUND_VIOLATED, "bound-violated")
            } else {
                (EXIT_SUCCESS, "bound-respected")
            };
            Ok(out.finish(code, summary.to_string()))
        }
    }
}

fn simulate(scenario: &Scenario, mut out: Writer, workers: usize) -> Result<Outcome> {
    let config = &scenario.config;
    let data = scenario.propagated_data();
    let kirchhoff = Kirchhoff::new(scenario.quadrature);
    let run = run_charges(config, &data, scenario.horizon, scenario.step, &kirchhoff)?;
    let sign = scenario.time_sign();

    out.write("charges.csv", &charges_csv(&run.history, sign))?;

    let residual = bc_residual(config, &run.history, &run.forcing);
    let mut summary = String::new();
    writeln!(summary, "step            = {}", format_number(run.step)).unwrap();
    writeln!(summary, "nodes           = {}", run.history.n_nodes()).unwrap();
    writeln!(summary, "residual_abs    = {}", format_number(residual.absolute)).unwrap();
    writeln!(summary, "residual_scaled = {}", format_number(residual.scaled)).unwrap();
    writeln!(summary, "worst_time      = {}", format_number(sign * residual.worst_time)).unwrap();
    out.write("bc_residual.txt", &summary)?;

    let times = scenario.snapshot_times.clone().unwrap_or_else(|| {
        let delta = scenario
            .activation_threshold
            .unwrap_or_else(|| default_activation_threshold(run.forcing.max_abs()));
        let first = activation_times(&run.history, delta)
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        default_snapshot_times(first, run.history.end_time().min(scenario.horizon))
    });
    let evaluator = FieldEvaluator {
        config,
        data: &data,
        history: (config.n() > 0).then_some(&run.history),
        kirchhoff: &kirchhoff,
    };
    for t in times {
        let snap = evaluator.snapshot(t, &scenario.grid, workers.max(1))?;
        out.write(&format!("snapshot_t{}.csv", time_tag(sign * t)), &snapshot_csv(&snap))?;
    }
    Ok(out.finish(
        EXIT_SUCCESS,
        format!("simulated; scaled bc residual {}", format_number(residual.scaled)),
    ))
}

/// File-name tag for a time, e.g. `3p000` or `m1p500`.
pub fn time_tag(t: f64) -> String {
    let t = if t == 0.0 { 0.0 } else { t };
    format!("{t:.3}").replace('-', "m").replace('.', "p")
}

/// `t, re_zeta_1, im_zeta_1, ...`, one row per node.
pub fn charges_csv(history: &ChargeHistory, time_sign: f64) -> String {
    let mut s = String::from("t");
    for k in 1..=history.n_points() {
        write!(s, ",re_zeta_{k},im_zeta_{k}").unwrap();
    }
    s.push('\n');
    for i in 0..history.n_nodes() {
        s.push_str(&format_number(time_sign * history.node_time(i)));
        for z in history.node_values(i) {
            write!(s, ",{},{}", format_number(z.re), format_number(z.im)).unwrap();
        }
        s.push('\n');
    }
    s
}

/// `x,y,z,re_phi,im_phi` for every non-excluded sample.
pub fn snapshot_csv(snapshot: &FieldSnapshot) -> String {
    let mut s = String::from("x,y,z,re_phi,im_phi\n");
    for (p, v, excluded) in snapshot.samples() {
        if excluded {
            continue;
        }
        writeln!(
            s,
            "{},{},{},{},{}",
            format_number(p.x),
            format_number(p.y),
            format_number(p.z),
            format_number(v.re),
            format_number(v.im)
        )
        .unwrap();
    }
    s
}
