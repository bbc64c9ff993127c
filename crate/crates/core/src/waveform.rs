//! Periodic trapezoidal bipolar pulses and the composite waveforms built from them.
//!
//! All times are normalized to the modulation period `T0`, so one period is `[0, 1)`.
//! The pulse `u(t)` is the ideal odd square wave (`+1` on `(0, 1/2)`, `-1` on
//! `(1/2, 1)`) convolved with a unit-area rectangle of width `2Δ̄`. Its transitions
//! are linear ramps from `-1` to `+1` (or back) spanning `[-Δ̄, +Δ̄]` around
//! `t = 0` and `t = 1/2`, which gives the sine coefficients
//! `U_q = 4 sinc(2πqΔ̄) / (πq)` for odd `q`.
//!
//! The composite `w(t) = u(t) - v(t)/3` subtracts a copy of the pulse running at three
//! times the fundamental frequency with the same absolute ramp duration, which cancels
//! every harmonic that is a multiple of 3.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harmonics::{HarmonicKind, HarmonicSet};

/// Upper bound (exclusive) on `Δ̄` for a well-formed fundamental trapezoid.
pub const MAX_DELTA: f64 = 0.25;

/// Upper bound (inclusive) on `Δ̄` for exact time-domain synthesis of `w(t)`.
/// The triple-frequency pulse has normalized ramp `3Δ̄` against its own period.
pub const MAX_SYNTHESIS_DELTA: f64 = 1.0 / 12.0;

/// Unnormalized cardinal sine `sin(x)/x`, with `sinc(0) = 1`.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-6 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

/// The periodic trapezoidal bipolar pulse, parameterized by its normalized
/// rise/fall time `Δ̄ = Δ/T0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct PulseSpec {
    delta_norm: f64,
}

impl PulseSpec {
    pub fn new(delta_norm: f64) -> Result<Self> {
        if !(0.0..MAX_DELTA).contains(&delta_norm) {
            return Err(Error::InvalidDelta(delta_norm));
        }
        Ok(Self { delta_norm })
    }

    /// Ideal square switching (`Δ̄ = 0`).
    pub const fn ideal() -> Self {
        Self { delta_norm: 0.0 }
    }

    pub fn delta_norm(&self) -> f64 {
        self.delta_norm
    }

    /// Always 1: every time quantity is a fraction of `T0`.
    pub fn period_norm(&self) -> f64 {
        1.0
    }

    pub fn supports_synthesis(&self) -> bool {
        self.delta_norm <= MAX_SYNTHESIS_DELTA
    }

    pub(crate) fn require_synthesis(&self) -> Result<()> {
        if self.supports_synthesis() {
            Ok(())
        } else {
            Err(Error::SynthesisDomain(self.delta_norm))
        }
    }
}

impl TryFrom<f64> for PulseSpec {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        Self::new(value)
    }
}

impl From<PulseSpec> for f64 {
    fn from(spec: PulseSpec) -> f64 {
        spec.delta_norm
    }
}

/// Trapezoid with half-ramp `delta ∈ [0, 1/4]` at normalized time `t` (any real).
/// Exact transition centers evaluate to 0.
fn trapezoid(delta: f64, t: f64) -> f64 {
    let t = t.rem_euclid(1.0);
    let (y, sign) = if t <= 0.5 { (t, 1.0) } else { (1.0 - t, -1.0) };
    let edge = y.min(0.5 - y);
    let value = if delta == 0.0 {
        if edge == 0.0 {
            0.0
        } else {
            1.0
        }
    } else {
        (edge / delta).min(1.0)
    };
    sign * value
}

/// Periodic antiderivative `∫_0^x trapezoid(delta, s) ds`. The pulse has zero mean,
/// so this is 1-periodic, and it is even because the pulse is odd.
fn trapezoid_antiderivative(delta: f64, x: f64) -> f64 {
    let x = x.rem_euclid(1.0);
    let y = x.min(1.0 - x);
    if y < delta {
        y * y / (2.0 * delta)
    } else if y <= 0.5 - delta {
        y - delta / 2.0
    } else {
        let r = 0.5 - y;
        0.5 - delta - r * r / (2.0 * delta)
    }
}

/// Mean of `trapezoid(delta, scale * t)` over `[center - width/2, center + width/2]`.
fn trapezoid_cell_mean(delta: f64, scale: f64, center: f64, width: f64) -> f64 {
    let a = scale * (center - 0.5 * width);
    let b = scale * (center + 0.5 * width);
    (trapezoid_antiderivative(delta, b) - trapezoid_antiderivative(delta, a)) / (b - a)
}

/// Fundamental bipolar pulse `u(t)`.
pub fn eval_bipolar_pulse(spec: &PulseSpec, t: f64) -> f64 {
    trapezoid(spec.delta_norm, t)
}

/// SPDT control sequence `g(t) = (u(t) + 1) / 2`.
pub fn unipolar_control(spec: &PulseSpec, t: f64) -> f64 {
    0.5 * (eval_bipolar_pulse(spec, t) + 1.0)
}

/// Triple-frequency pulse `v(t)`, same absolute ramp duration as `u`.
pub fn eval_triple_pulse(spec: &PulseSpec, t: f64) -> Result<f64> {
    spec.require_synthesis()?;
    Ok(trapezoid(3.0 * spec.delta_norm, 3.0 * t))
}

/// Sine-series coefficient `U_q` of the fundamental pulse.
pub fn fourier_coefficient_u(q: u32, spec: &PulseSpec) -> Result<f64> {
    if q == 0 {
        return Err(Error::InvalidHarmonic(q));
    }
    if q.is_multiple_of(2) {
        return Ok(0.0);
    }
    let q = f64::from(q);
    Ok(4.0 * sinc(2.0 * PI * q * spec.delta_norm) / (PI * q))
}

/// `w(t) = u(t) - v(t)/3` from the exact piecewise-linear pulses.
pub fn eval_w_exact(spec: &PulseSpec, t: f64) -> Result<f64> {
    let v = eval_triple_pulse(spec, t)?;
    Ok(eval_bipolar_pulse(spec, t) - v / 3.0)
}

/// `w(t)` from its sine series truncated at `q_max`.
pub fn eval_w_series(spec: &PulseSpec, t: f64, q_max: u32) -> f64 {
    let terms = HarmonicSet::generate(HarmonicKind::Upsilon, q_max);
    let sum: f64 = terms
        .members()
        .iter()
        .map(|&q| {
            let qf = f64::from(q);
            sinc(2.0 * PI * qf * spec.delta_norm) / qf * (2.0 * PI * qf * t).sin()
        })
        .sum();
    4.0 / PI * sum
}

/// Mean of `w(t)` over the cell `[center - width/2, center + width/2]`, computed
/// exactly from the antiderivatives of both pulses.
pub fn w_cell_mean(spec: &PulseSpec, center: f64, width: f64) -> Result<f64> {
    spec.require_synthesis()?;
    if width.is_nan() || width <= 0.0 {
        return eval_w_exact(spec, center);
    }
    let d = spec.delta_norm;
    let u = trapezoid_cell_mean(d, 1.0, center, width);
    let v = trapezoid_cell_mean(3.0 * d, 3.0, center, width);
    Ok(u - v / 3.0)
}

/// Uniformly sampled values over exactly one period, `t_k = k / M`.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveformSamples<T> {
    values: Vec<T>,
}

impl<T> WaveformSamples<T> {
    pub fn from_values(values: Vec<T>) -> Result<Self> {
        check_sample_count(values.len())?;
        Ok(Self { values })
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn sample_count(&self) -> usize {
        self.values.len()
    }

    pub fn time(&self, k: usize) -> f64 {
        k as f64 / self.values.len() as f64
    }
}

impl<T: Copy + Into<Complex64>> WaveformSamples<T> {
    /// Fourier coefficients over one period: bin `m` is the coefficient of
    /// `e^{+j2πmt}`, computed as `(1/M) Σ x_k e^{-j2πmk/M}`.
    pub fn spectrum(&self) -> Spectrum {
        let mut buf: Vec<Complex64> = self.values.iter().map(|&v| v.into()).collect();
        let m = buf.len();
        FftPlanner::new().plan_fft_forward(m).process(&mut buf);
        let scale = 1.0 / m as f64;
        buf.iter_mut().for_each(|c| *c *= scale);
        Spectrum { bins: buf }
    }
}

fn check_sample_count(m: usize) -> Result<()> {
    if m < 16 {
        return Err(Error::SampleCount { count: m, reason: "at least 16 samples are required" });
    }
    if !m.is_multiple_of(2) {
        return Err(Error::SampleCount { count: m, reason: "sample count must be even" });
    }
    Ok(())
}

/// Samples `f` at `t_k = k/M`, `k = 0..M`.
pub fn sample_waveform<T, F>(f: F, m: usize) -> Result<WaveformSamples<T>>
where
    F: Fn(f64) -> T,
{
    check_sample_count(m)?;
    let values = (0..m).map(|k| f(k as f64 / m as f64)).collect();
    Ok(WaveformSamples { values })
}

/// One-period DFT, indexed by signed harmonic.
#[derive(Debug, Clone)]
pub struct Spectrum {
    bins: Vec<Complex64>,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.bins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bins.is_empty()
    }

    /// Coefficient of `e^{+j2πmt}`; negative `m` wraps to `M + m`.
    pub fn at(&self, m: i64) -> Complex64 {
        let len = self.bins.len() as i64;
        self.bins[m.rem_euclid(len) as usize]
    }

    pub fn bins(&self) -> &[Complex64] {
        &self.bins
    }

    pub fn energy(&self) -> f64 {
        self.bins.iter().map(|c| c.norm_sqr()).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    /// Brute-force convolution of the ideal square wave with a unit-area rect of
    /// width 2Δ̄, by midpoint rule on a fine grid.
    fn convolved_square(delta: f64, t: f64) -> f64 {
        let square = |s: f64| {
            let s = s.rem_euclid(1.0);
            if s == 0.0 || s == 0.5 {
                0.0
            } else if s < 0.5 {
                1.0
            } else {
                -1.0
            }
        };
        if delta == 0.0 {
            return square(t);
        }
        let n = 200_000;
        let h = 2.0 * delta / n as f64;
        (0..n).map(|i| square(t - delta + (i as f64 + 0.5) * h)).sum::<f64>() / n as f64
    }

    /// Adaptive Simpson quadrature.
    fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
        fn simpson(f: &dyn Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
            let m = 0.5 * (a + b);
            let fm = f(m);
            (m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb))
        }
        #[allow(clippy::too_many_arguments)]
        fn recurse(
            f: &dyn Fn(f64) -> f64,
            a: f64,
            fa: f64,
            b: f64,
            fb: f64,
            whole: f64,
            m: f64,
            fm: f64,
            tol: f64,
            depth: u32,
        ) -> f64 {
            let (lm, flm, left) = simpson(f, a, fa, m, fm);
            let (rm, frm, right) = simpson(f, m, fm, b, fb);
            let delta = left + right - whole;
            if depth == 0 || delta.abs() <= 15.0 * tol {
                return left + right + delta / 15.0;
            }
            recurse(f, a, fa, m, fm, left, lm, flm, tol / 2.0, depth - 1)
                + recurse(f, m, fm, b, fb, right, rm, frm, tol / 2.0, depth - 1)
        }
        let (fa, fb) = (f(a), f(b));
        let (m, fm, whole) = simpson(f, a, fa, b, fb);
        recurse(f, a, fa, b, fb, whole, m, fm, tol, 50)
    }

    fn spec(d: f64) -> PulseSpec {
        PulseSpec::new(d).unwrap()
    }

    #[test]
    fn rejects_out_of_range_delta() {
        assert_eq!(PulseSpec::new(-0.01), Err(Error::InvalidDelta(-0.01)));
        assert_eq!(PulseSpec::new(0.25), Err(Error::InvalidDelta(0.25)));
        assert!(PulseSpec::new(f64::NAN).is_err());
        assert!(PulseSpec::new(0.2499).is_ok());
    }

    #[test]
    fn pulse_plateau_and_transition_values() {
        assert_eq!(eval_bipolar_pulse(&spec(0.05), 0.25), 1.0);
        assert_eq!(eval_bipolar_pulse(&spec(0.05), 0.0), 0.0);
        assert_eq!(eval_bipolar_pulse(&spec(0.05), 0.75), -1.0);
        assert_eq!(eval_bipolar_pulse(&spec(0.0), 0.5), 0.0);
    }

    #[test]
    fn ramp_matches_convolution_oracle() {
        let oracle = convolved_square(0.05, 0.025);
        assert_abs_diff_eq!(oracle, 0.5, epsilon = 1e-4);
        assert_abs_diff_eq!(eval_bipolar_pulse(&spec(0.05), 0.025), oracle, epsilon = 1e-4);
        for &(d, t) in &[(0.05, 0.49), (0.08, 0.93), (0.2, 0.1), (0.01, 0.505)] {
            assert_abs_diff_eq!(eval_bipolar_pulse(&spec(d), t), convolved_square(d, t), epsilon = 1e-4);
        }
    }

    #[test]
    fn unipolar_control_values() {
        assert_eq!(unipolar_control(&spec(0.0), 0.25), 1.0);
        assert_eq!(unipolar_control(&spec(0.0), 0.75), 0.0);
        assert_abs_diff_eq!(unipolar_control(&spec(0.05), 0.025), 0.75, epsilon = 1e-12);
    }

    #[test]
    fn coefficient_closed_form_values() {
        assert_eq!(fourier_coefficient_u(2, &spec(0.08)).unwrap(), 0.0);
        assert_abs_diff_eq!(fourier_coefficient_u(1, &spec(0.0)).unwrap(), 4.0 / PI, epsilon = 1e-15);
        assert_eq!(fourier_coefficient_u(0, &spec(0.0)), Err(Error::InvalidHarmonic(0)));
        // Frozen from the quadrature oracle below.
        assert_abs_diff_eq!(fourier_coefficient_u(5, &spec(0.08)).unwrap(), 0.059_555_0, epsilon = 1e-6);
    }

    #[test]
    fn coefficients_match_quadrature() {
        for &d in &[0.0, 0.02, 0.05, 0.08] {
            let s = spec(d);
            for q in (1..=31).step_by(2) {
                let integrand = |t: f64| eval_bipolar_pulse(&s, t) * (2.0 * PI * f64::from(q) * t).sin();
                // Split at the kinks so the integrand is smooth on each piece.
                let mut knots = vec![0.0, 0.5];
                if d > 0.0 {
                    knots = vec![0.0, d, 0.5 - d, 0.5];
                }
                // Pre-split each smooth piece so the adaptive rule cannot stop on a
                // coincidentally consistent first estimate.
                let integral: f64 = knots
                    .windows(2)
                    .flat_map(|w| {
                        let h = (w[1] - w[0]) / 64.0;
                        (0..64).map(move |i| (w[0] + i as f64 * h, w[0] + (i + 1) as f64 * h))
                    })
                    .map(|(a, b)| adaptive_simpson(&integrand, a, b, 1e-15))
                    .sum();
                let numeric = 4.0 * integral;
                let closed = fourier_coefficient_u(q, &s).unwrap();
                assert!(
                    (numeric - closed).abs() < 1e-8,
                    "delta={d} q={q}: quadrature {numeric} vs closed form {closed}"
                );
            }
        }
    }

    #[test]
    fn composite_regression_values() {
        assert_eq!(eval_w_exact(&spec(0.05), 0.0).unwrap(), 0.0);
        // v(0.25) sits on the negative plateau of the triple-frequency pulse.
        assert_eq!(eval_triple_pulse(&spec(0.05), 0.25).unwrap(), -1.0);
        assert_abs_diff_eq!(eval_w_exact(&spec(0.05), 0.25).unwrap(), 4.0 / 3.0, epsilon = 1e-15);
        assert_eq!(eval_w_exact(&spec(0.09), 0.1), Err(Error::SynthesisDomain(0.09)));
        assert!(eval_w_exact(&spec(1.0 / 12.0), 0.1).is_ok());
    }

    #[test]
    fn series_converges_to_exact_near_plateaus() {
        let s = spec(0.0);
        let exact = eval_w_exact(&s, 0.25).unwrap();
        let series = eval_w_series(&s, 0.25, 10_001);
        assert!((series - exact).abs() < 5e-3, "{series} vs {exact}");

        let s = spec(0.05);
        let mut last = f64::INFINITY;
        for q_max in [11, 101, 1001] {
            let err = [0.1, 0.25, 0.4, 0.7]
                .iter()
                .map(|&t| (eval_w_series(&s, t, q_max) - eval_w_exact(&s, t).unwrap()).abs())
                .fold(0.0, f64::max);
            assert!(err < last);
            last = err;
        }
        assert!(last < 1e-5);
    }

    #[test]
    fn cell_mean_matches_quadrature() {
        let s = spec(0.05);
        for &(c, w) in &[(0.0, 0.01), (0.013, 0.002), (0.3, 0.5), (0.91, 0.07), (0.17, 1.0)] {
            let f = |t: f64| eval_w_exact(&s, t).unwrap();
            let oracle = adaptive_simpson(&f, c - w / 2.0, c + w / 2.0, 1e-12) / w;
            assert_abs_diff_eq!(w_cell_mean(&s, c, w).unwrap(), oracle, epsilon = 1e-7);
        }
        let ideal = spec(0.0);
        assert_abs_diff_eq!(w_cell_mean(&ideal, 0.0, 0.02).unwrap(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(w_cell_mean(&ideal, 0.25, 0.02).unwrap(), 4.0 / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn sampling_conventions() {
        let zeros = sample_waveform(|_| 0.0, 16).unwrap();
        assert_eq!(zeros.values(), &[0.0; 16]);
        assert!(matches!(sample_waveform(|_| 0.0, 8), Err(Error::SampleCount { count: 8, .. })));
        assert!(matches!(sample_waveform(|_| 0.0, 17), Err(Error::SampleCount { count: 17, .. })));

        let s = spec(0.0);
        let square = sample_waveform(|t| eval_bipolar_pulse(&s, t), 16).unwrap();
        let expected: Vec<f64> =
            (0..16).map(|k| if k == 0 || k == 8 { 0.0 } else if k < 8 { 1.0 } else { -1.0 }).collect();
        assert_eq!(square.values(), expected.as_slice());
        assert_eq!(square.time(4), 0.25);
    }

    #[test]
    fn dft_bin_one_matches_coefficient() {
        let s = spec(0.05);
        let samples = sample_waveform(|t| eval_bipolar_pulse(&s, t), 4096).unwrap();
        let spectrum = samples.spectrum();
        // u(t) = Σ U_q sin(2πqt) puts U_q/(2j) in bin +q.
        let bin1 = spectrum.at(1);
        let u1 = fourier_coefficient_u(1, &s).unwrap();
        assert!((2.0 * bin1.norm() - u1).abs() < 1e-5);
        assert_abs_diff_eq!(bin1.re, 0.0, epsilon = 1e-12);
        assert!(bin1.im < 0.0);
    }

    #[test]
    fn composite_spectrum_cancels_triples_and_evens() {
        for &d in &[0.0, 0.02, 0.05, 1.0 / 12.0] {
            let s = spec(d);
            let m = 4096;
            let samples =
                sample_waveform(|t| w_cell_mean(&s, t, 1.0 / m as f64).unwrap(), m).unwrap();
            let spectrum = samples.spectrum();
            let reference = spectrum.at(1).norm();
            // Ideal switching leaves jumps whose aliasing floor reaches 1e-6 near bin
            // 15 at this M; trapezoids stay far below it over a wide band.
            let top = if d == 0.0 { 13 } else { 199 };
            for bin in 2..=top as i64 {
                if bin % 2 == 0 || bin % 3 == 0 {
                    assert!(
                        spectrum.at(bin).norm() < 1e-6 * reference,
                        "delta={d} bin={bin}: {}",
                        spectrum.at(bin).norm()
                    );
                }
            }
        }
    }

    #[test]
    fn parseval_holds_for_sampled_pulse() {
        let s = spec(0.03);
        let samples = sample_waveform(|t| eval_bipolar_pulse(&s, t), 1024).unwrap();
        let mean_sq = samples.values().iter().map(|v| v * v).sum::<f64>() / 1024.0;
        assert_abs_diff_eq!(samples.spectrum().energy(), mean_sq, epsilon = 1e-12);
    }

    proptest! {
        #[test]
        fn pulse_is_odd(d in 0.0..0.2499f64, t in 0.0..1.0f64) {
            let s = spec(d);
            let a = eval_bipolar_pulse(&s, t);
            let b = eval_bipolar_pulse(&s, 1.0 - t);
            prop_assert!((a + b).abs() < 1e-12);
            prop_assert!((-1.0..=1.0).contains(&a));
        }

        #[test]
        fn pulse_is_periodic(d in 0.0..0.2499f64, t in 0.0..1.0f64, k in -5i32..5) {
            let s = spec(d);
            let shifted = eval_bipolar_pulse(&s, t + f64::from(k));
            prop_assert!((shifted - eval_bipolar_pulse(&s, t)).abs() < 1e-9);
        }

        #[test]
        fn composite_is_odd(d in 0.0..(1.0 / 12.0), t in 0.0..1.0f64) {
            let s = spec(d);
            let a = eval_w_exact(&s, t).unwrap();
            let b = eval_w_exact(&s, -t).unwrap();
            prop_assert!((a + b).abs() < 1e-12);
        }
    }
}
