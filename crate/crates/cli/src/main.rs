mod args;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;
use serde::Serialize;
use thiserror::Error;

use jetgeo_core::dynamics::observables;
use jetgeo_core::trajectory_csv::{read_csv, write_csv};
use jetgeo_core::verify::{generic_suites, verify_lorenz, SuiteReport, VerifyConfig};
use jetgeo_core::{
    action, classify_level_set, integrate_el, integrate_field, lorenz_field, parse_field, DynamicsError, EvalError,
    GeometryReport, Params, Trajectory, VectorField,
};

use args::{Cli, Command, Format, Model, OutputArgs, SourceArgs};

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Numeric(String),
    #[error("{0} suite(s) failed")]
    VerifyFailed(usize),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::VerifyFailed(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        match e {
            EvalError::DimensionMismatch { .. } | EvalError::UnboundParameter(_) => CliError::Usage(e.to_string()),
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

impl From<DynamicsError> for CliError {
    fn from(e: DynamicsError) -> Self {
        match e {
            DynamicsError::Eval(e) => e.into(),
            DynamicsError::BlowUp { .. } => CliError::Numeric(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("jetgeo: {e}");
            ExitCode::from(e.code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Geometry { source, at, output } => {
            let field = load_field(&source)?;
            let x = parse_vector("--at", &at)?;
            field.check_dim(&x)?;
            let report = GeometryReport::compute(&field, &x)?;
            emit_json(&output, &report)
        }
        Command::Integrate {
            source,
            x0,
            v0,
            el,
            t0,
            t1,
            dt,
            observables: with_obs,
            output,
            format,
        } => {
            let field = load_field(&source)?;
            let x0 = parse_vector("--x0", &x0)?;
            field.check_dim(&x0)?;
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(CliError::Usage(format!("--dt must be positive, got {dt}")));
            }
            let traj = if el {
                let v0 = v0.ok_or_else(|| CliError::Usage("--el requires --v0".into()))?;
                let v0 = parse_vector("--v0", &v0)?;
                field.check_dim(&v0)?;
                integrate_el(&field, &x0, &v0, t0, t1, dt)?
            } else {
                if v0.is_some() {
                    return Err(CliError::Usage("--v0 is only used with --el".into()));
                }
                integrate_field(&field, &x0, t0, t1, dt)?
            };
            let obs = if with_obs {
                Some(observables(&field, &traj)?)
            } else {
                None
            };
            match format {
                Format::Csv => with_writer(&output, |w| {
                    write_csv(&traj, obs.as_deref(), w).map_err(|e| io::Error::other(e.to_string()))
                }),
                Format::Json => emit_json(&output, &TrajectoryJson::new(&traj, obs.as_deref())),
            }
        }
        Command::Action { source, traj, output } => {
            let field = load_field(&source)?;
            let file = File::open(&traj).map_err(|e| CliError::Usage(format!("{}: {e}", traj.display())))?;
            let traj = read_csv(file).map_err(|e| CliError::Usage(e.to_string()))?;
            if traj.dim() != field.dim() {
                return Err(CliError::Usage(format!(
                    "trajectory has {} coordinates, field has {}",
                    traj.dim(),
                    field.dim()
                )));
            }
            let value = action(&field, &traj)?;
            emit_json(&output, &serde_json::json!({ "action": value }))
        }
        Command::Levelset { level, params, output } => {
            let params = parse_params(&params)?;
            if let Some(name) = params.keys().find(|k| k.as_str() != "eps") {
                return Err(CliError::Usage(format!(
                    "unknown parameter `{name}` (levelset takes eps)"
                )));
            }
            let class = match params.get("eps") {
                Some(&eps) => classify_level_set(level, eps),
                // C < 1 is empty for every eps; otherwise the geometry depends on eps.
                None if level < 1.0 - jetgeo_core::lorenz5::LEVEL_TOLERANCE => classify_level_set(level, 0.0),
                None => return Err(CliError::Usage("levelset requires --param eps=VALUE".into())),
            };
            emit_json(&output, &class)
        }
        Command::Verify { source, seed, output } => {
            let cfg = VerifyConfig {
                seed,
                ..VerifyConfig::default()
            };
            let reports = if source.field.is_some() {
                let field = load_field(&source)?;
                generic_suites(&field, None, &cfg)
            } else {
                let params = parse_params(&source.params)?;
                let epsilons = match params.get("eps") {
                    Some(&eps) => vec![eps],
                    None => vec![0.0, 0.1, 1.0],
                };
                verify_lorenz(&epsilons, &cfg)
            };
            let failed = reports.iter().filter(|r| !r.passed()).count();
            with_writer(&output, |w| {
                for r in &reports {
                    writeln!(w, "{}", suite_line(r))?;
                }
                writeln!(w, "{} of {} suites passed", reports.len() - failed, reports.len())
            })?;
            if failed > 0 {
                Err(CliError::VerifyFailed(failed))
            } else {
                Ok(())
            }
        }
    }
}

trait CheckDim {
    fn check_dim(&self, x: &[f64]) -> Result<(), CliError>;
}

impl CheckDim for VectorField {
    fn check_dim(&self, x: &[f64]) -> Result<(), CliError> {
        if x.len() != self.dim() {
            return Err(EvalError::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            }
            .into());
        }
        let unbound = self.unbound_params();
        if let Some(name) = unbound.first() {
            return Err(EvalError::UnboundParameter(name.clone()).into());
        }
        Ok(())
    }
}

fn suite_line(r: &SuiteReport) -> String {
    let mut line = format!("{} {}", if r.passed() { "PASS" } else { "FAIL" }, r.name);
    if let Some(eps) = r.eps {
        line.push_str(&format!(" eps={eps:?}"));
    }
    line.push_str(&format!(
        " max_residual={:e} tolerance={:e}",
        r.max_residual, r.tolerance
    ));
    if !r.passed() {
        if let Some(d) = &r.detail {
            line.push_str(&format!(" {d}"));
        }
    }
    line
}

fn load_field(source: &SourceArgs) -> Result<VectorField, CliError> {
    let params = parse_params(&source.params)?;
    match (&source.field, source.model) {
        (Some(path), _) => {
            let text =
                std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
            parse_field(&text, &params).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
        }
        (None, Some(Model::Lorenz5)) => {
            if let Some(name) = params.keys().find(|k| k.as_str() != "eps") {
                return Err(CliError::Usage(format!(
                    "unknown parameter `{name}` for lorenz5 (expected eps)"
                )));
            }
            let eps = params.get("eps").copied().unwrap_or(0.0);
            Ok(lorenz_field(eps))
        }
        (None, None) => Err(CliError::Usage(
            "one of --model lorenz5 or --field PATH is required".into(),
        )),
    }
}

fn parse_params(raw: &[String]) -> Result<Params, CliError> {
    let mut params = Params::new();
    for item in raw {
        let (name, value) = item
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("--param expects NAME=VALUE, got `{item}`")))?;
        let name = name.trim();
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("--param {name}: `{value}` is not a number")))?;
        if name.is_empty() {
            return Err(CliError::Usage(format!("--param expects NAME=VALUE, got `{item}`")));
        }
        params.insert(name.to_string(), value);
    }
    Ok(params)
}

fn parse_vector(flag: &str, raw: &str) -> Result<Vec<f64>, CliError> {
    raw.split(',')
        .map(|s| {
            let s = s.trim();
            match s.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(CliError::Usage(format!("{flag}: `{s}` is not a finite number"))),
            }
        })
        .collect()
}

fn with_writer(output: &OutputArgs, f: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> Result<(), CliError> {
    let io_err = |path: &Path, e: io::Error| CliError::Usage(format!("{}: {e}", path.display()));
    match &output.out {
        Some(path) => {
            let file = File::create(path).map_err(|e| io_err(path, e))?;
            let mut w = BufWriter::new(file);
            f(&mut w).and_then(|_| w.flush()).map_err(|e| io_err(path, e))
        }
        None => {
            let stdout = io::stdout();
            let mut w = BufWriter::new(stdout.lock());
            f(&mut w)
                .and_then(|_| w.flush())
                .map_err(|e| io_err(&PathBuf::from("<stdout>"), e))
        }
    }
}

fn emit_json<T: Serialize>(output: &OutputArgs, value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Numeric(e.to_string()))?;
    with_writer(output, |w| writeln!(w, "{text}"))
}

#[derive(Serialize)]
struct TrajectoryJson<'a> {
    t: &'a [f64],
    x: &'a [Vec<f64>],
    #[serde(skip_serializing_if = "Option::is_none")]
    v: Option<&'a [Vec<f64>]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    eym: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    jls: Option<Vec<f64>>,
}

impl<'a> TrajectoryJson<'a> {
    fn new(traj: &'a Trajectory, obs: Option<&[(f64, f64)]>) -> Self {
        TrajectoryJson {
            t: &traj.times,
            x: &traj.xs,
            v: traj.vs.as_deref(),
            eym: obs.map(|o| o.iter().map(|p| p.0).collect()),
            jls: obs.map(|o| o.iter().map(|p| p.1).collect()),
        }
    }
}
