//! Settings shared by the command line and the `key = value` config file.
//!
//! A config file holds one `key = value` pair per line. Blank lines and lines
//! starting with `#` are skipped. Keys are the field names of [`Settings`];
//! lists (`delays`) are comma separated.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, ValueEnum};

use super::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

impl Format {
    pub fn name(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Svg => "svg",
        }
    }
}

/// Every tunable, unset unless given. Command-line values are merged over
/// config-file values, which are merged over built-in defaults.
#[derive(Debug, Clone, Default, PartialEq, Args)]
pub struct Settings {
    /// Number of array elements [default: 16]
    #[arg(long = "n", global = true)]
    pub n_elements: Option<usize>,

    /// Element spacing in wavelengths [default: 0.5]
    #[arg(long = "spacing", global = true)]
    pub spacing_wl: Option<f64>,

    /// Normalized rise/fall time of the switching pulses
    #[arg(long = "delta", global = true)]
    pub delta_norm: Option<f64>,

    /// Scan angle from the array axis, degrees [default: 90]
    #[arg(long = "scan", global = true, allow_negative_numbers = true)]
    pub theta_scan_deg: Option<f64>,

    /// Observation angle for `verify`, degrees [default: scan angle]
    #[arg(long = "theta", global = true, allow_negative_numbers = true)]
    pub theta_deg: Option<f64>,

    /// Explicit per-element delays as fractions of the modulation period,
    /// comma separated; replaces steering
    #[arg(long = "delays", global = true, value_delimiter = ',', allow_hyphen_values = true)]
    pub delays: Option<Vec<f64>>,

    /// Target 5th-harmonic level for `design`, dB
    #[arg(long = "pl5", global = true, allow_negative_numbers = true)]
    pub pl5_target_db: Option<f64>,

    /// Highest harmonic order kept [default: 41]
    #[arg(long = "q-max", global = true)]
    pub q_max: Option<u32>,

    /// Angular grid points over [0, 180] degrees [default: 1801]
    #[arg(long = "theta-points", global = true)]
    pub theta_points: Option<usize>,

    /// Samples per modulation period for `verify` [default: 4096]
    #[arg(long = "samples", global = true)]
    pub samples: Option<usize>,

    /// First rise/fall time of the `efficiency` sweep [default: 0]
    #[arg(long = "from", global = true)]
    pub sweep_start: Option<f64>,

    /// Last rise/fall time of the `efficiency` sweep [default: 0.09]
    #[arg(long = "to", global = true)]
    pub sweep_end: Option<f64>,

    /// Step of the `efficiency` sweep [default: 0.001]
    #[arg(long = "step", global = true)]
    pub sweep_step: Option<f64>,

    /// Output file; stdout when absent
    #[arg(short = 'o', long = "output", global = true)]
    pub output_path: Option<PathBuf>,

    /// Also render an SVG plot to this file (`pattern`, `efficiency`)
    #[arg(long = "plot", global = true)]
    pub plot_path: Option<PathBuf>,

    /// Output format
    #[arg(long = "format", global = true, value_enum)]
    pub format: Option<Format>,
}

impl Settings {
    /// Fills every unset field from `lower`.
    pub fn or(self, lower: Settings) -> Settings {
        Settings {
            n_elements: self.n_elements.or(lower.n_elements),
            spacing_wl: self.spacing_wl.or(lower.spacing_wl),
            delta_norm: self.delta_norm.or(lower.delta_norm),
            theta_scan_deg: self.theta_scan_deg.or(lower.theta_scan_deg),
            theta_deg: self.theta_deg.or(lower.theta_deg),
            delays: self.delays.or(lower.delays),
            pl5_target_db: self.pl5_target_db.or(lower.pl5_target_db),
            q_max: self.q_max.or(lower.q_max),
            theta_points: self.theta_points.or(lower.theta_points),
            samples: self.samples.or(lower.samples),
            sweep_start: self.sweep_start.or(lower.sweep_start),
            sweep_end: self.sweep_end.or(lower.sweep_end),
            sweep_step: self.sweep_step.or(lower.sweep_step),
            output_path: self.output_path.or(lower.output_path),
            plot_path: self.plot_path.or(lower.plot_path),
            format: self.format.or(lower.format),
        }
    }

    /// Names (config-file keys) of the fields that are set.
    pub fn present(&self) -> Vec<&'static str> {
        let flags = [
            ("n_elements", self.n_elements.is_some()),
            ("spacing_wl", self.spacing_wl.is_some()),
            ("delta_norm", self.delta_norm.is_some()),
            ("theta_scan_deg", self.theta_scan_deg.is_some()),
            ("theta_deg", self.theta_deg.is_some()),
            ("delays", self.delays.is_some()),
            ("pl5_target_db", self.pl5_target_db.is_some()),
            ("q_max", self.q_max.is_some()),
            ("theta_points", self.theta_points.is_some()),
            ("samples", self.samples.is_some()),
            ("sweep_start", self.sweep_start.is_some()),
            ("sweep_end", self.sweep_end.is_some()),
            ("sweep_step", self.sweep_step.is_some()),
            ("output_path", self.output_path.is_some()),
            ("plot_path", self.plot_path.is_some()),
            ("format", self.format.is_some()),
        ];
        flags.iter().filter(|(_, set)| *set).map(|(name, _)| *name).collect()
    }
}

pub fn load(path: &Path) -> Result<Settings, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io { path: path.to_path_buf(), message: e.to_string() })?;
    parse(&text).map_err(|(line, message)| CliError::Config { path: path.to_path_buf(), line, message })
}

fn value<T: FromStr>(key: &str, raw: &str) -> Result<T, String> {
    raw.parse().map_err(|_| format!("cannot parse {key} = {raw:?}"))
}

/// Parses config-file text. Errors carry the 1-based line number.
pub fn parse(text: &str) -> Result<Settings, (usize, String)> {
    let mut s = Settings::default();
    let mut seen = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, raw) = line.split_once('=').ok_or((line_no, format!("expected key = value, got {line:?}")))?;
        let (key, raw) = (key.trim(), raw.trim());
        if seen.contains(&key.to_string()) {
            return Err((line_no, format!("duplicate key {key}")));
        }
        seen.push(key.to_string());
        let set = |r: Result<(), String>| r.map_err(|m| (line_no, m));
        match key {
            "n_elements" => set(value(key, raw).map(|v| s.n_elements = Some(v)))?,
            "spacing_wl" => set(value(key, raw).map(|v| s.spacing_wl = Some(v)))?,
            "delta_norm" => set(value(key, raw).map(|v| s.delta_norm = Some(v)))?,
            "theta_scan_deg" => set(value(key, raw).map(|v| s.theta_scan_deg = Some(v)))?,
            "theta_deg" => set(value(key, raw).map(|v| s.theta_deg = Some(v)))?,
            "delays" => {
                let parsed: Result<Vec<f64>, String> = raw.split(',').map(|p| value(key, p.trim())).collect();
                set(parsed.map(|v| s.delays = Some(v)))?
            }
            "pl5_target_db" => set(value(key, raw).map(|v| s.pl5_target_db = Some(v)))?,
            "q_max" => set(value(key, raw).map(|v| s.q_max = Some(v)))?,
            "theta_points" => set(value(key, raw).map(|v| s.theta_points = Some(v)))?,
            "samples" => set(value(key, raw).map(|v| s.samples = Some(v)))?,
            "sweep_start" => set(value(key, raw).map(|v| s.sweep_start = Some(v)))?,
            "sweep_end" => set(value(key, raw).map(|v| s.sweep_end = Some(v)))?,
            "sweep_step" => set(value(key, raw).map(|v| s.sweep_step = Some(v)))?,
            "output_path" => s.output_path = Some(PathBuf::from(raw)),
            "plot_path" => s.plot_path = Some(PathBuf::from(raw)),
            "format" => {
                let f = Format::from_str(raw, true).map_err(|_| (line_no, format!("unknown format {raw:?}")))?;
                s.format = Some(f);
            }
            _ => return Err((line_no, format!("unknown key {key}"))),
        }
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_documented_keys() {
        let text = "# steered off broadside\nn_elements = 16\nspacing_wl=0.5\n\ndelta_norm = 0.047\ntheta_scan_deg = 110\n\
                    delays = 0, 0.25 ,-0.5\nformat = JSON\noutput_path = out/p.csv\n";
        let s = parse(text).unwrap();
        assert_eq!(s.n_elements, Some(16));
        assert_eq!(s.delta_norm, Some(0.047));
        assert_eq!(s.theta_scan_deg, Some(110.0));
        assert_eq!(s.delays, Some(vec![0.0, 0.25, -0.5]));
        assert_eq!(s.format, Some(Format::Json));
        assert_eq!(s.output_path, Some(PathBuf::from("out/p.csv")));
        assert_eq!(s.q_max, None);
    }

    #[test]
    fn reports_line_of_bad_entries() {
        assert_eq!(parse("n_elements = 4\nbogus = 1").unwrap_err().0, 2);
        assert_eq!(parse("\n\nq_max = -3").unwrap_err().0, 3);
        assert_eq!(parse("just text").unwrap_err().0, 1);
        assert_eq!(parse("q_max = 3\nq_max = 5").unwrap_err().0, 2);
        assert_eq!(parse("format = pdf").unwrap_err().0, 1);
    }

    #[test]
    fn merge_prefers_upper_layer() {
        let upper = Settings { n_elements: Some(4), ..Default::default() };
        let lower = Settings { n_elements: Some(8), spacing_wl: Some(1.0), ..Default::default() };
        let merged = upper.or(lower);
        assert_eq!(merged.n_elements, Some(4));
        assert_eq!(merged.spacing_wl, Some(1.0));
        assert_eq!(merged.present(), vec!["n_elements", "spacing_wl"]);
    }
}
