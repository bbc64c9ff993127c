//! The `tmpa` command-line front end.
//!
//! Five commands share one set of options (see [`config::Settings`]). Values
//! come from flags first, then from the `--config` file, then from defaults.
//! Relative output paths are resolved against `$TMPA_OUTPUT_DIR` when it is set.
//! Failures print a single JSON record `{"error": {...}}` on stderr and exit
//! nonzero.

pub mod config;
pub mod output;
pub mod plot;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use crate::array::{
    directivity, full_pattern, theta_grid, ArrayConfig, PatternResult, DEFAULT_SPACING_WL, DEFAULT_THETA_POINTS,
};
use crate::error::Error;
use crate::harmonics::DEFAULT_Q_MAX;
use crate::metrics::{design_delta, efficiencies, sweep};
use crate::timedomain::{verify_array, DEFAULT_SAMPLES};
use crate::waveform::PulseSpec;

pub use config::{Format, Settings};
use output::{fmt_sig, render_csv, render_json};

/// Environment variable naming the directory for relative output paths.
pub const OUTPUT_DIR_ENV: &str = "TMPA_OUTPUT_DIR";

pub const DEFAULT_N_ELEMENTS: usize = 16;
pub const DEFAULT_SCAN_DEG: f64 = 90.0;
pub const DEFAULT_SWEEP: (f64, f64, f64) = (0.0, 0.09, 0.001);

#[derive(Debug, Parser)]
#[command(name = "tmpa", version, about = "Single-sideband time-modulated phased array simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// key = value file with defaults for any option
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(flatten)]
    settings: Settings,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Per-harmonic radiation patterns of a steered array
    Pattern,
    /// Efficiencies and 5th-harmonic level over a rise/fall-time sweep
    Efficiency,
    /// Smallest rise/fall time meeting a 5th-harmonic target
    Design,
    /// Progressive delays that steer the wanted beam
    Steer,
    /// Time-domain check of the closed-form harmonic amplitudes
    Verify,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Pattern => "pattern",
            Command::Efficiency => "efficiency",
            Command::Design => "design",
            Command::Steer => "steer",
            Command::Verify => "verify",
        }
    }

    /// Settings the command reads. Anything else given on the command line is an
    /// invalid combination; config files may carry unrelated keys.
    fn accepts(self) -> &'static [&'static str] {
        const OUT: [&str; 2] = ["output_path", "format"];
        match self {
            Command::Pattern => &[
                "n_elements", "spacing_wl", "delta_norm", "theta_scan_deg", "delays", "q_max", "theta_points",
                OUT[0], OUT[1], "plot_path",
            ],
            Command::Efficiency => &["sweep_start", "sweep_end", "sweep_step", OUT[0], OUT[1], "plot_path"],
            Command::Design => &["pl5_target_db", "n_elements", "spacing_wl", "theta_scan_deg", "delays", "q_max", OUT[0], OUT[1]],
            Command::Steer => &["n_elements", "spacing_wl", "theta_scan_deg", OUT[0], OUT[1]],
            Command::Verify => &[
                "n_elements", "spacing_wl", "delta_norm", "theta_scan_deg", "theta_deg", "delays", "q_max", "samples",
                OUT[0], OUT[1],
            ],
        }
    }

    fn formats(self) -> &'static [Format] {
        match self {
            Command::Pattern | Command::Efficiency => &[Format::Csv, Format::Json, Format::Svg],
            Command::Design => &[Format::Json],
            Command::Steer => &[Format::Csv, Format::Json],
            Command::Verify => &[Format::Json, Format::Csv],
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{}:{line}: {message}", path.display())]
    Config { path: PathBuf, line: usize, message: String },
    #[error("{0}")]
    InvalidFlags(String),
    #[error("{command} needs {field}")]
    Missing { command: &'static str, field: &'static str },
    #[error("{}: {message}", path.display())]
    Io { path: PathBuf, message: String },
    #[error("plot rendering failed: {0}")]
    Plot(String),
    #[error(transparent)]
    Model(#[from] Error),
    #[error("max abs error {max_abs_error:e} exceeds tolerance {tolerance:e}")]
    VerificationFailed { max_abs_error: f64, tolerance: f64 },
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Config { .. } => "config",
            CliError::InvalidFlags(_) => "invalid_flags",
            CliError::Missing { .. } => "missing_field",
            CliError::Io { .. } => "io",
            CliError::Plot(_) => "plot",
            CliError::Model(e) => e.kind(),
            CliError::VerificationFailed { .. } => "verification_failed",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::VerificationFailed { .. } => 1,
            CliError::Usage(_) | CliError::Config { .. } | CliError::InvalidFlags(_) | CliError::Missing { .. } => 2,
            CliError::Io { .. } | CliError::Plot(_) => 3,
            CliError::Model(_) => 4,
        }
    }

    /// `{"error": {"kind", "message", "exit_code"}}` on one line.
    pub fn record(&self) -> String {
        json!({"error": {"kind": self.kind(), "message": self.to_string(), "exit_code": self.exit_code()}}).to_string()
    }
}

/// Fully resolved invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub n_elements: usize,
    pub spacing_wl: f64,
    pub delta_norm: Option<f64>,
    pub theta_scan_deg: f64,
    pub theta_deg: Option<f64>,
    pub delays: Option<Vec<f64>>,
    pub pl5_target_db: Option<f64>,
    pub q_max: u32,
    pub theta_points: usize,
    pub samples: usize,
    pub sweep: (f64, f64, f64),
    pub output_path: Option<PathBuf>,
    pub plot_path: Option<PathBuf>,
    pub format: Format,
}

impl RunConfig {
    /// Merges flags over file values over defaults and checks the combination.
    pub fn resolve(command: Command, flags: Settings, file: Settings) -> Result<RunConfig, CliError> {
        let accepted = command.accepts();
        let stray: Vec<&str> = flags.present().into_iter().filter(|k| !accepted.contains(k)).collect();
        if !stray.is_empty() {
            return Err(CliError::InvalidFlags(format!("{} does not take {}", command.name(), stray.join(", "))));
        }
        if flags.delays.is_some() && flags.theta_scan_deg.is_some() {
            return Err(CliError::InvalidFlags("give either a scan angle or explicit delays, not both".into()));
        }
        let mut file = file;
        if flags.theta_scan_deg.is_some() {
            // A scan flag outranks delays from the file.
            file.delays = None;
        }
        let s = flags.or(file);
        let format = s.format.unwrap_or(command.formats()[0]);
        if !command.formats().contains(&format) {
            return Err(CliError::InvalidFlags(format!("{} cannot write {}", command.name(), format.name())));
        }
        let config = RunConfig {
            command,
            n_elements: s.n_elements.unwrap_or(DEFAULT_N_ELEMENTS),
            spacing_wl: s.spacing_wl.unwrap_or(DEFAULT_SPACING_WL),
            delta_norm: s.delta_norm,
            theta_scan_deg: s.theta_scan_deg.unwrap_or(DEFAULT_SCAN_DEG),
            theta_deg: s.theta_deg,
            delays: s.delays,
            pl5_target_db: s.pl5_target_db,
            q_max: s.q_max.unwrap_or(DEFAULT_Q_MAX),
            theta_points: s.theta_points.unwrap_or(DEFAULT_THETA_POINTS),
            samples: s.samples.unwrap_or(DEFAULT_SAMPLES),
            sweep: (
                s.sweep_start.unwrap_or(DEFAULT_SWEEP.0),
                s.sweep_end.unwrap_or(DEFAULT_SWEEP.1),
                s.sweep_step.unwrap_or(DEFAULT_SWEEP.2),
            ),
            output_path: s.output_path,
            plot_path: s.plot_path,
            format,
        };
        let missing = |field| CliError::Missing { command: command.name(), field };
        match command {
            Command::Pattern | Command::Verify if config.delta_norm.is_none() => Err(missing("--delta")),
            Command::Design if config.pl5_target_db.is_none() => Err(missing("--pl5")),
            _ => Ok(config),
        }
    }

    fn spec(&self) -> Result<PulseSpec, CliError> {
        Ok(PulseSpec::new(self.delta_norm.unwrap_or(0.0))?)
    }

    /// Explicit delays when given, otherwise steering to the scan angle.
    fn array(&self) -> Result<ArrayConfig, CliError> {
        Ok(match &self.delays {
            Some(d) => ArrayConfig::with_delays(self.n_elements, self.spacing_wl, d.clone())?,
            None => ArrayConfig::steered(self.n_elements, self.spacing_wl, self.theta_scan_deg)?,
        })
    }
}

/// One file (or stdout) produced by a command.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub path: Option<PathBuf>,
    pub contents: String,
}

fn array_json(array: &ArrayConfig) -> Value {
    json!({
        "n_elements": array.n_elements(),
        "spacing_wl": array.spacing_wl(),
        "theta_scan_deg": array.steering_angle_deg(),
        "delays": array.delays(),
    })
}

fn pattern_json(array: &ArrayConfig, delta: f64, pattern: &PatternResult) -> Value {
    let harmonics: Vec<Value> = pattern
        .harmonics
        .iter()
        .map(|h| {
            json!({
                "q": h.q,
                "band": h.band,
                "signed_order": h.band.signed(h.q),
                "frequency": h.frequency_label(),
                "peak_db": h.peak_db,
                "peak_theta_deg": h.peak_theta_deg,
                "db": h.db,
            })
        })
        .collect();
    json!({
        "report": "pattern",
        "array": array_json(array),
        "delta_norm": delta,
        "reference_peak": pattern.reference_peak,
        "theta_deg": pattern.theta_grid_deg,
        "harmonics": harmonics,
    })
}

fn pattern_csv(pattern: &PatternResult) -> String {
    let names: Vec<String> = pattern.harmonics.iter().map(|h| h.column_name()).collect();
    let mut header = vec!["theta_deg"];
    header.extend(names.iter().map(String::as_str));
    let rows = pattern.theta_grid_deg.iter().enumerate().map(|(i, &t)| {
        std::iter::once(fmt_sig(t)).chain(pattern.harmonics.iter().map(move |h| fmt_sig(h.db[i])))
    });
    render_csv(&header, rows)
}

fn run_pattern(c: &RunConfig) -> Result<Vec<Artifact>, CliError> {
    let spec = c.spec()?;
    let array = c.array()?;
    let grid = theta_grid(c.theta_points)?;
    let pattern = full_pattern(&array, spec, c.q_max, &grid)?;
    let title = format!("N = {}, rise/fall {}", array.n_elements(), fmt_sig(spec.delta_norm()));
    let svg = || plot::pattern_svg(&pattern, &title).map_err(CliError::Plot);
    let mut artifacts = vec![Artifact {
        path: c.output_path.clone(),
        contents: match c.format {
            Format::Csv => pattern_csv(&pattern),
            Format::Json => render_json(pattern_json(&array, spec.delta_norm(), &pattern)),
            Format::Svg => svg()?,
        },
    }];
    if let Some(path) = &c.plot_path {
        artifacts.push(Artifact { path: Some(path.clone()), contents: svg()? });
    }
    Ok(artifacts)
}

fn run_efficiency(c: &RunConfig) -> Result<Vec<Artifact>, CliError> {
    let (start, end, step) = c.sweep;
    let rows = sweep(start, end, step)?;
    let svg = || plot::sweep_svg(&rows).map_err(CliError::Plot);
    let contents = match c.format {
        Format::Csv => render_csv(
            &["delta_norm", "pl5_db", "eta_tma", "eta_s", "eta"],
            rows.iter().map(|r| [r.delta_norm, r.pl5_db, r.eta_tma, r.eta_s, r.eta].map(fmt_sig)),
        ),
        Format::Json => render_json(json!({
            "report": "efficiency",
            "sweep": {"start": start, "end": end, "step": step},
            "rows": rows,
        })),
        Format::Svg => svg()?,
    };
    let mut artifacts = vec![Artifact { path: c.output_path.clone(), contents }];
    if let Some(path) = &c.plot_path {
        artifacts.push(Artifact { path: Some(path.clone()), contents: svg()? });
    }
    Ok(artifacts)
}

fn run_design(c: &RunConfig) -> Result<Vec<Artifact>, CliError> {
    let outcome = design_delta(c.pl5_target_db.expect("checked in resolve"))?;
    let spec = PulseSpec::new(outcome.delta_norm)?;
    let array = c.array()?;
    let d = directivity(&array, spec, c.q_max)?;
    let mut report = efficiencies(&spec, array.n_elements())?;
    report.directivity_dbi = Some(d.closed_form_dbi.unwrap_or(d.numerical_dbi));
    let value = json!({
        "report": "design",
        "design": outcome,
        "array": array_json(&array),
        "efficiency": report,
        "directivity": d,
    });
    Ok(vec![Artifact { path: c.output_path.clone(), contents: render_json(value) }])
}

fn run_steer(c: &RunConfig) -> Result<Vec<Artifact>, CliError> {
    let array = ArrayConfig::steered(c.n_elements, c.spacing_wl, c.theta_scan_deg)?;
    let rows: Vec<(usize, f64, f64, f64)> = array
        .positions_wl()
        .iter()
        .zip(array.delays())
        .enumerate()
        .map(|(n, (&z, &d))| (n, z, d, d.rem_euclid(1.0)))
        .collect();
    let contents = match c.format {
        Format::Json => {
            let elements: Vec<Value> = rows
                .iter()
                .map(|&(n, z, d, w)| json!({"n": n, "z_wl": z, "delay_norm": d, "delay_wrapped": w}))
                .collect();
            render_json(json!({"report": "steer", "array": array_json(&array), "elements": elements}))
        }
        _ => render_csv(
            &["n", "z_wl", "delay_norm", "delay_wrapped"],
            rows.iter().map(|&(n, z, d, w)| [n.to_string(), fmt_sig(z), fmt_sig(d), fmt_sig(w)]),
        ),
    };
    Ok(vec![Artifact { path: c.output_path.clone(), contents }])
}

fn run_verify(c: &RunConfig) -> Result<(Vec<Artifact>, Option<CliError>), CliError> {
    let spec = c.spec()?;
    let array = c.array()?;
    let theta = c.theta_deg.or(array.steering_angle_deg()).unwrap_or(DEFAULT_SCAN_DEG);
    let cmp = verify_array(&array, &spec, theta, c.samples, c.q_max)?;
    let contents = match c.format {
        Format::Csv => render_csv(
            &["m", "measured_re", "measured_im", "predicted_re", "predicted_im", "abs_error"],
            cmp.bins.iter().map(|b| {
                [
                    b.m.to_string(),
                    fmt_sig(b.measured.re),
                    fmt_sig(b.measured.im),
                    fmt_sig(b.predicted.re),
                    fmt_sig(b.predicted.im),
                    fmt_sig(b.abs_error),
                ]
            }),
        ),
        _ => {
            let mut value = serde_json::to_value(&cmp).expect("comparison serializes");
            let object = value.as_object_mut().expect("struct serializes to an object");
            object.insert("report".into(), json!("verify"));
            object.insert("array".into(), array_json(&array));
            object.insert("delta_norm".into(), json!(spec.delta_norm()));
            render_json(value)
        }
    };
    let failure = (!cmp.passed)
        .then_some(CliError::VerificationFailed { max_abs_error: cmp.max_abs_error, tolerance: cmp.tolerance });
    Ok((vec![Artifact { path: c.output_path.clone(), contents }], failure))
}

/// Runs a resolved command. A failed verification still returns its report,
/// alongside the error to exit with.
pub fn execute(config: &RunConfig) -> Result<(Vec<Artifact>, Option<CliError>), CliError> {
    match config.command {
        Command::Pattern => run_pattern(config).map(|a| (a, None)),
        Command::Efficiency => run_efficiency(config).map(|a| (a, None)),
        Command::Design => run_design(config).map(|a| (a, None)),
        Command::Steer => run_steer(config).map(|a| (a, None)),
        Command::Verify => run_verify(config),
    }
}

/// `path` joined onto `output_dir` when relative.
pub fn resolve_output(path: &Path, output_dir: Option<&Path>) -> PathBuf {
    match output_dir {
        Some(dir) if path.is_relative() => dir.join(path),
        _ => path.to_path_buf(),
    }
}

fn write_artifact(artifact: &Artifact, output_dir: Option<&Path>, stdout: &mut dyn Write) -> Result<(), CliError> {
    match &artifact.path {
        None => stdout
            .write_all(artifact.contents.as_bytes())
            .map_err(|e| CliError::Io { path: PathBuf::from("<stdout>"), message: e.to_string() }),
        Some(path) => {
            let path = resolve_output(path, output_dir);
            let io = |e: std::io::Error| CliError::Io { path: path.clone(), message: e.to_string() };
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent).map_err(io)?;
            }
            std::fs::write(&path, &artifact.contents).map_err(io)
        }
    }
}

/// Parses `args` (program name first), runs the command and writes its outputs.
pub fn run_with<I, T>(args: I, output_dir: Option<&Path>, stdout: &mut dyn Write) -> Result<(), CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| CliError::Usage(e.to_string().trim_end().to_string()))?;
    let file = match &cli.config {
        Some(path) => config::load(path)?,
        None => Settings::default(),
    };
    let config = RunConfig::resolve(cli.command, cli.settings, file)?;
    let (artifacts, failure) = execute(&config)?;
    for artifact in &artifacts {
        write_artifact(artifact, output_dir, stdout)?;
    }
    failure.map_or(Ok(()), Err)
}

/// Process entry point; returns the exit status.
pub fn main() -> i32 {
    let args: Vec<OsString> = std::env::args_os().collect();
    // Help and version requests are not errors.
    if let Err(e) = Cli::try_parse_from(&args) {
        if matches!(e.kind(), clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion) {
            let _ = e.print();
            return 0;
        }
    }
    let output_dir = std::env::var_os(OUTPUT_DIR_ENV).filter(|v| !v.is_empty()).map(PathBuf::from);
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match run_with(args, output_dir.as_deref(), &mut lock) {
        Ok(()) => 0,
        Err(e) => {
            let _ = lock.flush();
            eprintln!("{}", e.record());
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn resolve(args: &[&str]) -> Result<RunConfig, CliError> {
        let cli = Cli::try_parse_from(std::iter::once("tmpa").chain(args.iter().copied()))
            .map_err(|e| CliError::Usage(e.to_string()))?;
        RunConfig::resolve(cli.command, cli.settings, Settings::default())
    }

    #[test]
    fn defaults_describe_the_sixteen_element_broadside_array() {
        let c = resolve(&["pattern", "--delta", "0"]).unwrap();
        assert_eq!((c.n_elements, c.spacing_wl, c.theta_scan_deg), (16, 0.5, 90.0));
        assert_eq!((c.q_max, c.theta_points, c.samples), (41, 1801, 4096));
        assert_eq!(c.format, Format::Csv);
        assert_eq!(resolve(&["design", "--pl5", "-22"]).unwrap().format, Format::Json);
    }

    #[test]
    fn flags_override_file_over_defaults() {
        let cli = Cli::try_parse_from(["tmpa", "pattern", "--n", "8"]).unwrap();
        let file = config::parse("n_elements = 4\ndelta_norm = 0.05\nspacing_wl = 1").unwrap();
        let c = RunConfig::resolve(cli.command, cli.settings, file).unwrap();
        assert_eq!(c.n_elements, 8);
        assert_eq!(c.delta_norm, Some(0.05));
        assert_eq!(c.spacing_wl, 1.0);
        assert_eq!(c.theta_scan_deg, 90.0);
    }

    #[test]
    fn scan_flag_outranks_file_delays() {
        let cli = Cli::try_parse_from(["tmpa", "pattern", "--delta", "0", "--n", "2", "--scan", "60"]).unwrap();
        let file = config::parse("delays = 0.1, 0.2").unwrap();
        let c = RunConfig::resolve(cli.command, cli.settings, file).unwrap();
        assert_eq!(c.delays, None);
        assert_eq!(c.theta_scan_deg, 60.0);
    }

    #[test]
    fn file_may_hold_keys_other_commands_use() {
        let cli = Cli::try_parse_from(["tmpa", "steer"]).unwrap();
        let file = config::parse("pl5_target_db = -22\nsamples = 8192").unwrap();
        assert!(RunConfig::resolve(cli.command, cli.settings, file).is_ok());
    }

    #[test]
    fn rejects_invalid_combinations() {
        let kind = |args: &[&str]| resolve(args).unwrap_err().kind();
        assert_eq!(kind(&["steer", "--delta", "0.05"]), "invalid_flags");
        assert_eq!(kind(&["design", "--pl5", "-22", "--format", "csv"]), "invalid_flags");
        assert_eq!(kind(&["verify", "--delta", "0", "--plot", "x.svg"]), "invalid_flags");
        assert_eq!(kind(&["efficiency", "--delta", "0.05"]), "invalid_flags");
        assert_eq!(kind(&["pattern", "--delta", "0", "--scan", "80", "--delays", "0,0"]), "invalid_flags");
        assert_eq!(kind(&["pattern"]), "missing_field");
        assert_eq!(kind(&["design"]), "missing_field");
        assert_eq!(kind(&["pattern", "--delta", "zero"]), "usage");
    }

    #[test]
    fn negative_values_parse() {
        let c = resolve(&["design", "--pl5", "-17"]).unwrap();
        assert_eq!(c.pl5_target_db, Some(-17.0));
        let c = resolve(&["verify", "--delta", "0", "--n", "3", "--delays", "-0.25,0,0.5"]).unwrap();
        assert_eq!(c.delays, Some(vec![-0.25, 0.0, 0.5]));
    }

    #[test]
    fn error_records_are_json() {
        let e = CliError::Model(Error::TargetOutOfRange(-70.0));
        let v: Value = serde_json::from_str(&e.record()).unwrap();
        assert_eq!(v["error"]["kind"], "target_out_of_range");
        assert_eq!(v["error"]["exit_code"], 4);
    }

    #[test]
    fn relative_outputs_follow_output_dir() {
        let dir = Path::new("/tmp/out");
        assert_eq!(resolve_output(Path::new("a.csv"), Some(dir)), dir.join("a.csv"));
        assert_eq!(resolve_output(Path::new("/abs/a.csv"), Some(dir)), PathBuf::from("/abs/a.csv"));
        assert_eq!(resolve_output(Path::new("a.csv"), None), PathBuf::from("a.csv"));
    }
}
