//! Uniform linear array along `z`: steering delays, per-harmonic array factors,
//! normalized power patterns and directivity.
//!
//! Element `n` sits at `z_n = n·d`, and its field at angle `θ` from the axis picks up
//! `e^{j2π(d/λ)n cosθ}`. The time factor `e^{±jqω0t}` of each harmonic has unit
//! modulus and is left out of every pattern.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harmonics::{Band, ExcitationSet};
use crate::metrics::{efficiencies, harmonic_power_sum, partial_power_sum, DEFAULT_REL_TOL};
use crate::waveform::PulseSpec;

pub const DEFAULT_SPACING_WL: f64 = 0.5;
pub const DEFAULT_THETA_POINTS: usize = 1801;
/// Simpson intervals over `cosθ ∈ [-1, 1]` for the numerical directivity.
pub const DEFAULT_QUADRATURE_INTERVALS: usize = 4096;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArrayConfig {
    n_elements: usize,
    spacing_wl: f64,
    steering_angle_deg: Option<f64>,
    delays: Vec<f64>,
}

impl ArrayConfig {
    /// Array steered to `theta_scan_deg` with progressive delays.
    pub fn steered(n_elements: usize, spacing_wl: f64, theta_scan_deg: f64) -> Result<Self> {
        let delays = steering_delays(n_elements, theta_scan_deg, spacing_wl)?;
        let mut config = Self::with_delays(n_elements, spacing_wl, delays)?;
        config.steering_angle_deg = Some(theta_scan_deg);
        Ok(config)
    }

    /// Array with explicit normalized delays `D_n/T0` (any real, reduced modulo 1).
    pub fn with_delays(n_elements: usize, spacing_wl: f64, delays: Vec<f64>) -> Result<Self> {
        check_geometry(n_elements, spacing_wl)?;
        if delays.len() != n_elements {
            return Err(Error::LengthMismatch { expected: n_elements, got: delays.len() });
        }
        if delays.iter().any(|d| !d.is_finite()) {
            return Err(Error::InvalidConfig("delays must be finite".into()));
        }
        Ok(Self { n_elements, spacing_wl, steering_angle_deg: None, delays })
    }

    pub fn n_elements(&self) -> usize {
        self.n_elements
    }

    pub fn spacing_wl(&self) -> f64 {
        self.spacing_wl
    }

    pub fn steering_angle_deg(&self) -> Option<f64> {
        self.steering_angle_deg
    }

    pub fn delays(&self) -> &[f64] {
        &self.delays
    }

    /// Element positions `z_n/λ`.
    pub fn positions_wl(&self) -> Vec<f64> {
        (0..self.n_elements).map(|n| n as f64 * self.spacing_wl).collect()
    }

    pub fn excitations(&self, spec: PulseSpec, q_max: u32) -> Result<ExcitationSet> {
        ExcitationSet::new(self.n_elements, spec, &self.delays, q_max)
    }

    /// Spacing is a whole number of half wavelengths.
    pub fn is_half_wave_multiple(&self) -> bool {
        let halves = 2.0 * self.spacing_wl;
        (halves - halves.round()).abs() < 1e-9 && halves.round() >= 1.0
    }

    /// Delays form an arithmetic progression modulo one period.
    pub fn has_progressive_delays(&self) -> bool {
        if self.n_elements < 3 {
            return true;
        }
        let step = self.delays[1] - self.delays[0];
        self.delays.iter().enumerate().all(|(n, &d)| {
            let off = (d - self.delays[0] - n as f64 * step).rem_euclid(1.0);
            off < 1e-9 || 1.0 - off < 1e-9
        })
    }

    /// `Σ_n c_n e^{j2π(d/λ)n cosθ}` for one harmonic's excitation column.
    fn array_factor(&self, column: &[Complex64], cos_theta: f64) -> Complex64 {
        let step = Complex64::from_polar(1.0, 2.0 * PI * self.spacing_wl * cos_theta);
        // Horner in the per-element phase step.
        column.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * step + c)
    }
}

fn check_geometry(n_elements: usize, spacing_wl: f64) -> Result<()> {
    if n_elements == 0 {
        return Err(Error::InvalidConfig("array needs at least one element".into()));
    }
    if !(spacing_wl > 0.0 && spacing_wl.is_finite()) {
        return Err(Error::InvalidConfig(format!("spacing {spacing_wl} must be positive")));
    }
    Ok(())
}

/// Progressive delays `D_n/T0 = n (d/λ) cos θ_scan` that align the first harmonic's
/// phase front with `θ_scan`.
pub fn steering_delays(n_elements: usize, theta_scan_deg: f64, spacing_wl: f64) -> Result<Vec<f64>> {
    if !(theta_scan_deg > 0.0 && theta_scan_deg < 180.0) {
        return Err(Error::ScanAngle(theta_scan_deg));
    }
    check_geometry(n_elements, spacing_wl)?;
    let c = cos_deg(theta_scan_deg);
    Ok((0..n_elements).map(|n| n as f64 * spacing_wl * c).collect())
}

/// `cos` of an angle in degrees, exact at multiples of 90°.
fn cos_deg(deg: f64) -> f64 {
    if deg.rem_euclid(180.0) == 90.0 {
        0.0
    } else {
        deg.to_radians().cos()
    }
}

/// `points` evenly spaced angles from 0° to 180° inclusive.
pub fn theta_grid(points: usize) -> Result<Vec<f64>> {
    if points < 2 {
        return Err(Error::InvalidConfig(format!("theta grid needs at least 2 points, got {points}")));
    }
    let step = 180.0 / (points - 1) as f64;
    Ok((0..points).map(|i| i as f64 * step).collect())
}

/// Complex far-field of harmonic `(q, band)` at each grid angle.
pub fn harmonic_pattern(
    config: &ArrayConfig,
    excitations: &ExcitationSet,
    q: u32,
    band: Band,
    theta_grid_deg: &[f64],
) -> Result<Vec<Complex64>> {
    let column = excitations.harmonic(q, band).ok_or(Error::MissingHarmonic { q, band })?;
    if column.len() != config.n_elements {
        return Err(Error::LengthMismatch { expected: config.n_elements, got: column.len() });
    }
    Ok(theta_grid_deg.iter().map(|&t| config.array_factor(column, cos_deg(t))).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarmonicPattern {
    pub q: u32,
    pub band: Band,
    /// `|F|²`, linear.
    pub power: Vec<f64>,
    /// Power relative to the peak of the first positive harmonic, in dB.
    pub db: Vec<f64>,
    pub peak_db: f64,
    pub peak_theta_deg: f64,
}

impl HarmonicPattern {
    /// Column name used in tabular output, e.g. `pos_q1_db`.
    pub fn column_name(&self) -> String {
        format!("{}_q{}_db", self.band.label(), self.q)
    }

    /// Radiated frequency relative to the carrier, e.g. `wc+5w0`.
    pub fn frequency_label(&self) -> String {
        match self.band {
            Band::Positive => format!("wc+{}w0", self.q),
            Band::Negative => format!("wc-{}w0", self.q),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternResult {
    pub theta_grid_deg: Vec<f64>,
    /// Peak `|F|²` of the `(1, positive)` pattern; every dB column is relative to it.
    pub reference_peak: f64,
    pub harmonics: Vec<HarmonicPattern>,
}

impl PatternResult {
    pub fn get(&self, q: u32, band: Band) -> Option<&HarmonicPattern> {
        self.harmonics.iter().find(|h| h.q == q && h.band == band)
    }
}

/// Normalized power patterns of every kept harmonic.
pub fn full_pattern(
    config: &ArrayConfig,
    spec: PulseSpec,
    q_max: u32,
    theta_grid_deg: &[f64],
) -> Result<PatternResult> {
    if q_max < 1 {
        return Err(Error::InvalidHarmonic(q_max));
    }
    let excitations = config.excitations(spec, q_max)?;
    let mut raw = Vec::with_capacity(excitations.len());
    for (q, band) in excitations.harmonics() {
        let field = harmonic_pattern(config, &excitations, q, band, theta_grid_deg)?;
        raw.push((q, band, field.iter().map(Complex64::norm_sqr).collect::<Vec<f64>>()));
    }
    let reference_peak = raw
        .iter()
        .find(|(q, band, _)| *q == 1 && *band == Band::Positive)
        .map(|(_, _, p)| p.iter().copied().fold(0.0, f64::max))
        .ok_or(Error::MissingHarmonic { q: 1, band: Band::Positive })?;

    let harmonics = raw
        .into_iter()
        .map(|(q, band, power)| {
            let db: Vec<f64> = power.iter().map(|&p| 10.0 * (p / reference_peak).log10()).collect();
            let (peak_idx, peak_db) = db
                .iter()
                .copied()
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |best, (i, v)| if v > best.1 { (i, v) } else { best });
            HarmonicPattern {
                q,
                band,
                power,
                db,
                peak_db,
                peak_theta_deg: theta_grid_deg.get(peak_idx).copied().unwrap_or(f64::NAN),
            }
        })
        .collect();

    Ok(PatternResult { theta_grid_deg: theta_grid_deg.to_vec(), reference_peak, harmonics })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Directivity {
    /// `10 log10(N η_TMA)`, when the geometry admits the closed form.
    pub closed_form_dbi: Option<f64>,
    /// From quadrature of every kept harmonic pattern plus the tail beyond `q_max`.
    pub numerical_dbi: f64,
    pub q_max: u32,
}

/// `D = N·η_TMA(Δ̄)` in dBi. Cross-element terms of the radiated power vanish for
/// half-wavelength-multiple spacing, and progressive delays put the full coherent
/// peak `N²|I_1|²` in visible space.
pub fn directivity_closed_form(config: &ArrayConfig, spec: PulseSpec) -> Result<f64> {
    if !config.is_half_wave_multiple() {
        return Err(Error::ClosedFormUnavailable(format!("spacing {} wavelengths", config.spacing_wl)));
    }
    if !config.has_progressive_delays() {
        return Err(Error::ClosedFormUnavailable("delays are not progressive".into()));
    }
    let report = efficiencies(&spec, config.n_elements)?;
    Ok(10.0 * (config.n_elements as f64 * report.eta_tma).log10())
}

/// `D = 4π max|F_1|² / P_R` with `P_R` from Simpson quadrature over `u = cosθ`:
/// `P_R = Σ_q 2π ∫_{-1}^{1} |F_q(u)|² du` for `q ≤ q_max`, plus the element-power
/// tail `(32N/π) Σ_{q > q_max} sinc²(2πqΔ̄)/q²`.
pub fn directivity_numerical(config: &ArrayConfig, spec: PulseSpec, q_max: u32, intervals: usize) -> Result<f64> {
    if intervals < 2 || !intervals.is_multiple_of(2) {
        return Err(Error::InvalidConfig(format!("Simpson needs an even interval count, got {intervals}")));
    }
    let excitations = config.excitations(spec, q_max)?;
    let h = 2.0 / intervals as f64;
    let nodes: Vec<f64> = (0..=intervals).map(|i| -1.0 + i as f64 * h).collect();
    let weight = |i: usize| {
        if i == 0 || i == intervals {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        }
    };

    let mut radiated = 0.0;
    for (q, band) in excitations.harmonics() {
        let column = excitations.harmonic(q, band).ok_or(Error::MissingHarmonic { q, band })?;
        let integral: f64 = nodes
            .iter()
            .enumerate()
            .map(|(i, &u)| weight(i) * config.array_factor(column, u).norm_sqr())
            .sum::<f64>()
            * h
            / 3.0;
        radiated += 2.0 * PI * integral;
    }
    let total = harmonic_power_sum(&spec, DEFAULT_REL_TOL)?.value;
    let kept = partial_power_sum(&spec, q_max);
    radiated += 32.0 * config.n_elements as f64 / PI * (total - kept).max(0.0);

    let first = excitations.harmonic(1, Band::Positive).ok_or(Error::MissingHarmonic { q: 1, band: Band::Positive })?;
    let peak = peak_power(|u| config.array_factor(first, u).norm_sqr(), &nodes);
    Ok(10.0 * (4.0 * PI * peak / radiated).log10())
}

/// Maximum of `f` on `[-1, 1]`: coarse scan over `nodes`, then golden-section
/// refinement around the best node.
fn peak_power(f: impl Fn(f64) -> f64, nodes: &[f64]) -> f64 {
    let (best, _) = nodes
        .iter()
        .enumerate()
        .map(|(i, &u)| (i, f(u)))
        .fold((0, f64::NEG_INFINITY), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });
    let mut lo = nodes[best.saturating_sub(1)];
    let mut hi = nodes[(best + 1).min(nodes.len() - 1)];
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..80 {
        let a = hi - ratio * (hi - lo);
        let b = lo + ratio * (hi - lo);
        if f(a) >= f(b) {
            hi = b;
        } else {
            lo = a;
        }
    }
    f(0.5 * (lo + hi)).max(f(nodes[best]))
}

/// Both directivity routes; the closed form is `None` outside its domain.
pub fn directivity(config: &ArrayConfig, spec: PulseSpec, q_max: u32) -> Result<Directivity> {
    let closed_form_dbi = match directivity_closed_form(config, spec) {
        Ok(v) => Some(v),
        Err(Error::ClosedFormUnavailable(_)) => None,
        Err(e) => return Err(e),
    };
    let numerical_dbi = directivity_numerical(config, spec, q_max, DEFAULT_QUADRATURE_INTERVALS)?;
    Ok(Directivity { closed_form_dbi, numerical_dbi, q_max })
}
