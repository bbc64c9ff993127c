//! Time-domain check of the closed-form excitations.
//!
//! Each element is fed `(w_n(t) + j w_n(t - T0/4)) / √2` with `w_n(t) = w(t - D_n)`,
//! built from the exact trapezoids. One period of the array signal in a given
//! direction is sampled, transformed, and every harmonic bin is compared with the
//! prediction from [`crate::harmonics::dynamic_excitation`].
//!
//! Samples are cell means over `[t_k - 1/(2M), t_k + 1/(2M)]` by default. That
//! aperture scales bin `m` by `sinc(πm/M)`, which is divided back out, and it keeps
//! aliasing at `O(M⁻²)` even for ideal square switching, where point samples of
//! the jumps would only give `O(M⁻¹)`.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::array::{harmonic_pattern, ArrayConfig};
use crate::error::{Error, Result};
use crate::harmonics::{excitation_magnitude, Band, ExcitationSet};
use crate::waveform::{eval_w_exact, sinc, w_cell_mean, PulseSpec, WaveformSamples};

pub const MIN_SAMPLES: usize = 1024;
pub const DEFAULT_SAMPLES: usize = 4096;

/// Error constant `C` of the `C·N·q_max/M²` tolerance. The jumps of ideal
/// switching dominate and alias in proportion to the bin index; measured
/// `max error · M² / (N q_max)` stays near 1 for random arrays at
/// `M ∈ [1024, 8192]`. The constant keeps a 2x margin.
pub const ALIASING_CONSTANT: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sampling {
    /// Instantaneous values at `t_k`.
    Point,
    /// Exact means over each sample cell.
    CellAverage,
}

impl Sampling {
    /// Response of the sampling aperture at bin `m`.
    fn aperture(self, m: i64, samples: usize) -> f64 {
        match self {
            Sampling::Point => 1.0,
            Sampling::CellAverage => sinc(PI * m as f64 / samples as f64),
        }
    }
}

/// Oracle tolerance `C·N·q_max/M²` on harmonic amplitudes of an `n_elements`
/// array checked up to bin `q_max`.
pub fn aliasing_tolerance(samples: usize, n_elements: usize, q_max: u32) -> f64 {
    ALIASING_CONSTANT * n_elements as f64 * f64::from(q_max) / (samples as f64).powi(2)
}

fn check_samples(samples: usize) -> Result<()> {
    if samples < MIN_SAMPLES {
        return Err(Error::SampleCount { count: samples, reason: "time-domain synthesis needs at least 1024 samples" });
    }
    if !samples.is_multiple_of(4) {
        return Err(Error::SampleCount { count: samples, reason: "quarter-period delay must land on the grid" });
    }
    Ok(())
}

/// Samples of `w(t - delay)` over one period.
fn branch_samples(spec: &PulseSpec, delay_norm: f64, samples: usize, sampling: Sampling) -> Result<Vec<f64>> {
    let width = 1.0 / samples as f64;
    (0..samples)
        .map(|k| {
            let t = k as f64 * width - delay_norm;
            match sampling {
                Sampling::Point => eval_w_exact(spec, t),
                Sampling::CellAverage => w_cell_mean(spec, t, width),
            }
        })
        .collect()
}

/// Feed signal of one element over one period.
pub fn element_signal(
    spec: &PulseSpec,
    delay_norm: f64,
    samples: usize,
    sampling: Sampling,
) -> Result<WaveformSamples<Complex64>> {
    spec.require_synthesis()?;
    check_samples(samples)?;
    let direct = branch_samples(spec, delay_norm, samples, sampling)?;
    // The T0/4 delay is a rotation by M/4 samples.
    let quarter = samples / 4;
    let values = (0..samples)
        .map(|k| {
            let delayed = direct[(k + samples - quarter) % samples];
            Complex64::new(direct[k], delayed) * FRAC_1_SQRT_2
        })
        .collect();
    WaveformSamples::from_values(values)
}

/// `Σ_n s_n(t) e^{j2π(d/λ)n cosθ}` over one period.
pub fn array_signal(
    config: &ArrayConfig,
    spec: &PulseSpec,
    theta_deg: f64,
    samples: usize,
    sampling: Sampling,
) -> Result<WaveformSamples<Complex64>> {
    let cos_theta = theta_deg.to_radians().cos();
    let mut total = vec![Complex64::new(0.0, 0.0); samples];
    for (n, &delay) in config.delays().iter().enumerate() {
        let phase = Complex64::from_polar(1.0, 2.0 * PI * config.spacing_wl() * n as f64 * cos_theta);
        let element = element_signal(spec, delay, samples, sampling)?;
        for (acc, v) in total.iter_mut().zip(element.values()) {
            *acc += v * phase;
        }
    }
    WaveformSamples::from_values(total)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BinComparison {
    /// Signed harmonic: coefficient of `e^{+j2πmt/T0}`.
    pub m: i64,
    pub measured: Complex64,
    pub predicted: Complex64,
    pub abs_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralComparison {
    pub sample_count: usize,
    pub sampling: Sampling,
    pub theta_deg: f64,
    pub q_max: u32,
    pub bins: Vec<BinComparison>,
    pub max_abs_error: f64,
    /// Largest measured magnitude among bins predicted to be zero.
    pub suppressed_max: f64,
    /// `suppressed_max / (N |I_1|)`, relative to the beam peak of the wanted harmonic.
    pub suppressed_max_relative: f64,
    /// `C·N·q_max/M²`; see [`aliasing_tolerance`].
    pub tolerance: f64,
    /// Every bin, suppressed ones included, is within `tolerance`.
    pub passed: bool,
}

impl SpectralComparison {
    pub fn bin(&self, m: i64) -> Option<&BinComparison> {
        self.bins.iter().find(|b| b.m == m)
    }
}

/// Closed-form amplitude of signed harmonic `m` in direction `theta_deg`.
pub fn predicted_amplitude(
    config: &ArrayConfig,
    excitations: &ExcitationSet,
    theta_deg: f64,
    m: i64,
) -> Result<Complex64> {
    let q = u32::try_from(m.unsigned_abs()).map_err(|_| Error::InvalidHarmonic(u32::MAX))?;
    let band = match Band::of(q) {
        Some(band) if band.signed(q) == m => band,
        _ => return Ok(Complex64::new(0.0, 0.0)),
    };
    if excitations.harmonic(q, band).is_none() {
        return Err(Error::MissingHarmonic { q, band });
    }
    Ok(harmonic_pattern(config, excitations, q, band, &[theta_deg])?[0])
}

/// Compares every bin `|m| ≤ q_max` of the synthesized array signal with the
/// closed form, using cell-mean sampling.
pub fn verify_array(
    config: &ArrayConfig,
    spec: &PulseSpec,
    theta_deg: f64,
    samples: usize,
    q_max: u32,
) -> Result<SpectralComparison> {
    verify_array_with(config, spec, theta_deg, samples, q_max, Sampling::CellAverage)
}

pub fn verify_array_with(
    config: &ArrayConfig,
    spec: &PulseSpec,
    theta_deg: f64,
    samples: usize,
    q_max: u32,
    sampling: Sampling,
) -> Result<SpectralComparison> {
    if q_max < 1 || (2 * q_max as usize) >= samples {
        return Err(Error::InvalidConfig(format!("q_max {q_max} must be in [1, M/2) for M = {samples}")));
    }
    let signal = array_signal(config, spec, theta_deg, samples, sampling)?;
    let spectrum = signal.spectrum();
    let excitations = config.excitations(*spec, q_max)?;

    let mut bins = Vec::with_capacity(2 * q_max as usize + 1);
    let mut max_abs_error: f64 = 0.0;
    let mut suppressed_max: f64 = 0.0;
    let q = i64::from(q_max);
    for m in -q..=q {
        let measured = spectrum.at(m) / sampling.aperture(m, samples);
        let predicted = predicted_amplitude(config, &excitations, theta_deg, m)?;
        let abs_error = (measured - predicted).norm();
        max_abs_error = max_abs_error.max(abs_error);
        if predicted == Complex64::new(0.0, 0.0) {
            suppressed_max = suppressed_max.max(measured.norm());
        }
        bins.push(BinComparison { m, measured, predicted, abs_error });
    }
    // Coherent peak of the wanted harmonic. Bin +1 itself can vanish off-beam.
    let reference = config.n_elements() as f64 * excitation_magnitude(1, spec);
    let suppressed_max_relative = suppressed_max / reference;
    let tolerance = aliasing_tolerance(samples, config.n_elements(), q_max);
    let passed = max_abs_error <= tolerance;
    Ok(SpectralComparison {
        sample_count: samples,
        sampling,
        theta_deg,
        q_max,
        bins,
        max_abs_error,
        suppressed_max,
        suppressed_max_relative,
        tolerance,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harmonics::dynamic_excitation;
    use crate::waveform::eval_w_exact;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn spec(d: f64) -> PulseSpec {
        PulseSpec::new(d).unwrap()
    }

    #[test]
    fn element_signal_structure() {
        let s = spec(0.05);
        let sig = element_signal(&s, 0.0, 1024, Sampling::Point).unwrap();
        let first = sig.values()[0];
        let expected = Complex64::new(0.0, eval_w_exact(&s, 0.75).unwrap()) * FRAC_1_SQRT_2;
        assert_abs_diff_eq!((first - expected).norm(), 0.0, epsilon = 1e-15);

        let mean: Complex64 = sig.values().iter().sum::<Complex64>() / 1024.0;
        assert!(mean.norm() < 1e-10);

        assert!(matches!(element_signal(&s, 0.0, 512, Sampling::Point), Err(Error::SampleCount { .. })));
        assert!(matches!(element_signal(&s, 0.0, 1026, Sampling::Point), Err(Error::SampleCount { .. })));
        assert_eq!(element_signal(&spec(0.1), 0.0, 1024, Sampling::Point), Err(Error::SynthesisDomain(0.1)));
    }

    #[test]
    fn element_bin_one_matches_excitation() {
        let s = spec(0.05);
        let sig = element_signal(&s, 0.1, 4096, Sampling::Point).unwrap();
        let measured = sig.spectrum().at(1);
        let predicted = dynamic_excitation(1, &s, 0.1).unwrap();
        assert!((measured - predicted).norm() < 1e-6);
    }

    #[test]
    fn parseval_for_array_signal() {
        let config = ArrayConfig::with_delays(3, 0.5, vec![0.0, 0.31, -0.7]).unwrap();
        let sig = array_signal(&config, &spec(0.02), 63.0, 2048, Sampling::CellAverage).unwrap();
        let mean_sq = sig.values().iter().map(Complex64::norm_sqr).sum::<f64>() / 2048.0;
        assert_abs_diff_eq!(sig.spectrum().energy(), mean_sq, epsilon = 1e-10);
    }

    #[test]
    fn single_element_oracle() {
        let c = ArrayConfig::with_delays(1, 0.5, vec![0.0]).unwrap();
        let r = verify_array(&c, &spec(0.05), 90.0, 8192, 13).unwrap();
        assert!(r.max_abs_error < 1e-4);
        assert!(r.suppressed_max_relative < 1e-6);
        assert!(r.passed);
        for m in (-13i64..=13).filter(|m| m % 2 == 0) {
            assert!(r.bin(m).unwrap().measured.norm() < 1e-10, "bin {m}");
        }
    }

    #[test]
    fn ideal_square_band_structure() {
        let c = ArrayConfig::steered(16, 0.5, 90.0).unwrap();
        let r = verify_array(&c, &PulseSpec::ideal(), 90.0, 8192, 13).unwrap();
        let reference = r.bin(1).unwrap().measured.norm();
        for m in [-1i64, -5, 7, 11, 3, -3, 9, -9] {
            assert!(r.bin(m).unwrap().measured.norm() < 1e-6 * reference, "bin {m}");
        }
        for m in [1i64, 5, 13, -7, -11] {
            assert!(r.bin(m).unwrap().predicted.norm() > 0.0);
        }
        assert!(r.passed);
    }

    #[test]
    fn point_sampling_is_first_order_for_jumps() {
        let c = ArrayConfig::with_delays(1, 0.5, vec![0.123_456]).unwrap();
        let point = verify_array_with(&c, &PulseSpec::ideal(), 90.0, 4096, 13, Sampling::Point).unwrap();
        let cell = verify_array_with(&c, &PulseSpec::ideal(), 90.0, 4096, 13, Sampling::CellAverage).unwrap();
        assert!(cell.max_abs_error * 100.0 < point.max_abs_error);
    }

    #[test]
    fn error_converges_at_second_order() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let delays: Vec<f64> = (0..4).map(|_| rng.random_range(-1.0..1.0)).collect();
        let c = ArrayConfig::with_delays(4, 0.5, delays).unwrap();
        let errors = |d: f64, sampling: Sampling| -> Vec<f64> {
            [1024usize, 2048, 4096, 8192]
                .iter()
                .map(|&m| verify_array_with(&c, &spec(d), 75.0, m, 13, sampling).unwrap().max_abs_error)
                .collect()
        };
        // Jumps dominate with ideal switching: 64x over three doublings once
        // asymptotic, with some scatter per step.
        let ideal = errors(0.0, Sampling::CellAverage);
        let overall = ideal[0] / ideal[3];
        assert!((40.0..90.0).contains(&overall), "{ideal:?}");
        for w in ideal.windows(2) {
            assert!(w[0] / w[1] > 2.5, "{ideal:?}");
        }
        // Trapezoids converge at least that fast.
        let trapezoid = errors(0.05, Sampling::CellAverage);
        for w in trapezoid.windows(2) {
            assert!(w[0] / w[1] > 3.5, "{trapezoid:?}");
        }
        let point = errors(0.05, Sampling::Point);
        assert!(point[3] < point[0] / 16.0, "{point:?}");
        for (m, e) in [1024usize, 2048, 4096, 8192].iter().zip(&ideal) {
            assert!(*e <= aliasing_tolerance(*m, 4, 13));
        }
    }

    #[test]
    fn rejects_bad_harmonic_range() {
        let c = ArrayConfig::with_delays(1, 0.5, vec![0.0]).unwrap();
        assert!(verify_array(&c, &spec(0.0), 90.0, 1024, 0).is_err());
        assert!(verify_array(&c, &spec(0.0), 90.0, 1024, 512).is_err());
    }
}
