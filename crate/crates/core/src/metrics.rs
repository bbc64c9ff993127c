//! Figures of merit for the modulated array and the inverse design of `Δ̄`.
//!
//! Powers follow the isotropic-element, unit-carrier normalization: a uniform static
//! array of `N` elements radiates `4πN`, and the modulated array radiates
//! `(32N/π) S(Δ̄)` where `S(Δ̄) = Σ_{q odd, 3∤q} sinc²(2πqΔ̄)/q²`.
//!
//! Percent changes in [`RelativeChanges`] are relative to the ideal-switch values
//! at `Δ̄ = 0`, e.g. `η_s(0.08)/η_s(0) - 1 = -0.160`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::waveform::{sinc, PulseSpec};

/// `8/π²`, the overall efficiency with ideal switches and its upper bound.
pub const MAX_EFFICIENCY: f64 = 8.0 / (PI * PI);

/// `S(0) = π²/9`.
pub const IDEAL_POWER_SUM: f64 = PI * PI / 9.0;

/// Relative tolerance used when a caller does not pick one.
pub const DEFAULT_REL_TOL: f64 = 1e-10;

const SUM_CAP: u64 = 10_000_000;

/// Largest `Δ̄` the design solver searches; the 5th-harmonic coefficient vanishes here.
pub const PL5_ZERO: f64 = 0.1;

/// Most stringent 5th-harmonic target the solver accepts, in dB.
pub const MIN_PL5_TARGET_DB: f64 = -60.0;

/// Peak level of the 5th-harmonic pattern relative to the 1st, in dB.
///
/// Returns `-inf` when the 5th harmonic is fully suppressed (`10Δ̄` an integer).
pub fn pl5(spec: &PulseSpec) -> f64 {
    let d = spec.delta_norm();
    if d > 0.0 && (10.0 * d).fract() == 0.0 {
        return f64::NEG_INFINITY;
    }
    20.0 * (sinc(10.0 * PI * d) / (5.0 * sinc(2.0 * PI * d))).abs().log10()
}

/// Result of summing `S(Δ̄)` with its truncation diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerSum {
    pub value: f64,
    /// Largest order included in the partial sum (0 when closed form was used).
    pub q_max_used: u64,
    /// Upper bound on the omitted tail.
    pub tail_bound: f64,
}

fn power_term(q: u64, d: f64) -> f64 {
    let qf = q as f64;
    let s = sinc(2.0 * PI * qf * d);
    s * s / (qf * qf)
}

/// Bound on `Σ_{q>Q} sinc²(2πqΔ̄)/q²`, using `sinc² ≤ min(1, 1/(2πqΔ̄)²)`.
fn tail_bound(q: u64, d: f64) -> f64 {
    let qf = q as f64;
    let coarse = 1.0 / qf;
    if d == 0.0 {
        return coarse;
    }
    coarse.min(1.0 / (12.0 * PI * PI * d * d * qf * qf * qf))
}

/// `S(Δ̄)`, summed until the tail bound falls below `rel_tol` times the partial sum.
pub fn harmonic_power_sum(spec: &PulseSpec, rel_tol: f64) -> Result<PowerSum> {
    if !(rel_tol > 0.0 && rel_tol <= 1e-3) {
        return Err(Error::InvalidTolerance(rel_tol));
    }
    let d = spec.delta_norm();
    if d == 0.0 {
        return Ok(PowerSum { value: IDEAL_POWER_SUM, q_max_used: 0, tail_bound: 0.0 });
    }
    let mut sum = 0.0;
    // Orders 6k ± 1 are exactly the odd non-multiples of 3.
    let mut k = 0u64;
    loop {
        k += 1;
        let (lo, hi) = (6 * k - 5, 6 * k - 1);
        sum += power_term(lo, d) + power_term(hi, d);
        let bound = tail_bound(hi, d);
        if bound < rel_tol * sum {
            return Ok(PowerSum { value: sum, q_max_used: hi, tail_bound: bound });
        }
        if hi >= SUM_CAP {
            return Err(Error::ToleranceUnreachable { rel_tol, cap: SUM_CAP });
        }
    }
}

/// `Σ sinc²(2πqΔ̄)/q²` over kept orders `q ≤ q_max`.
pub fn partial_power_sum(spec: &PulseSpec, q_max: u32) -> f64 {
    let d = spec.delta_norm();
    (1..=u64::from(q_max))
        .step_by(2)
        .filter(|q| q % 3 != 0)
        .map(|q| power_term(q, d))
        .sum()
}

/// Changes relative to the ideal-switch (`Δ̄ = 0`) values, as fractions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelativeChanges {
    pub eta_tma: f64,
    pub eta_s: f64,
    pub eta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyReport {
    pub delta_norm: f64,
    pub n_elements: usize,
    pub eta_tma: f64,
    pub eta_s: f64,
    pub eta: f64,
    /// `null` in JSON when the 5th harmonic is fully suppressed.
    pub pl5_db: f64,
    pub p_u_tm: f64,
    pub p_r_tm: f64,
    pub p_r_st: f64,
    pub relative_to_ideal: RelativeChanges,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub directivity_dbi: Option<f64>,
    pub q_max_used: u64,
    pub tail_bound: f64,
}

/// Efficiencies and mean powers of an `n_elements` array at `Δ̄`.
pub fn efficiencies(spec: &PulseSpec, n_elements: usize) -> Result<EfficiencyReport> {
    let sum = harmonic_power_sum(spec, DEFAULT_REL_TOL)?;
    let d = spec.delta_norm();
    let useful = sinc(2.0 * PI * d).powi(2);
    let eta_tma = useful / sum.value;
    let eta_s = MAX_EFFICIENCY * sum.value;
    let eta = MAX_EFFICIENCY * useful;

    let n = n_elements as f64;
    let ideal_tma = 9.0 / (PI * PI);
    let ideal_s = 8.0 / 9.0;
    Ok(EfficiencyReport {
        delta_norm: d,
        n_elements,
        eta_tma,
        eta_s,
        eta,
        pl5_db: pl5(spec),
        p_u_tm: 32.0 * n / PI * useful,
        p_r_tm: 32.0 * n / PI * sum.value,
        p_r_st: 4.0 * PI * n,
        relative_to_ideal: RelativeChanges {
            eta_tma: eta_tma / ideal_tma - 1.0,
            eta_s: eta_s / ideal_s - 1.0,
            eta: eta / MAX_EFFICIENCY - 1.0,
        },
        directivity_dbi: None,
        q_max_used: sum.q_max_used,
        tail_bound: sum.tail_bound,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DesignOutcome {
    pub target_db: f64,
    pub delta_norm: f64,
    pub pl5_db: f64,
    /// Ideal switches already meet the target; `delta_norm` is 0.
    pub already_satisfied: bool,
    pub iterations: u32,
}

const BISECTION_MAX_ITER: u32 = 50;

/// Bisection for the boundary of `pred` on `[lo, hi]`, assuming `pred(lo)` is false,
/// `pred(hi)` is true, and the predicate flips once. Returns the final bracket.
fn bisect(mut lo: f64, mut hi: f64, max_iter: u32, pred: impl Fn(f64) -> bool) -> (f64, f64, u32) {
    let mut iterations = 0;
    while iterations < max_iter && hi - lo > f64::EPSILON * hi {
        let mid = 0.5 * (lo + hi);
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
        iterations += 1;
    }
    (lo, hi, iterations)
}

/// Smallest `Δ̄` in `[0, 0.1)` whose 5th-harmonic level is at or below `target_db`.
pub fn design_delta(target_db: f64) -> Result<DesignOutcome> {
    if !target_db.is_finite() || target_db <= MIN_PL5_TARGET_DB {
        return Err(Error::TargetOutOfRange(target_db));
    }
    let ideal = pl5(&PulseSpec::ideal());
    if target_db >= ideal {
        return Ok(DesignOutcome {
            target_db,
            delta_norm: 0.0,
            pl5_db: ideal,
            already_satisfied: true,
            iterations: 0,
        });
    }
    let level = |d: f64| PulseSpec::new(d).map(|s| pl5(&s)).unwrap_or(f64::NAN);
    let (lo, hi) = (0.0, PL5_ZERO);
    if !(level(lo) > target_db && level(hi) <= target_db) {
        return Err(Error::Bracket(format!(
            "pl5({lo}) = {} and pl5({hi}) = {} do not straddle {target_db} dB",
            level(lo),
            level(hi)
        )));
    }
    let (_, hi, iterations) = bisect(lo, hi, BISECTION_MAX_ITER, |d| level(d) <= target_db);
    let achieved = level(hi);
    if achieved.is_nan() {
        return Err(Error::Bracket(format!("non-finite level at {hi}")));
    }
    Ok(DesignOutcome { target_db, delta_norm: hi, pl5_db: achieved, already_satisfied: false, iterations })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub delta_norm: f64,
    pub pl5_db: f64,
    pub eta_tma: f64,
    pub eta_s: f64,
    pub eta: f64,
}

/// Figures of merit on the grid `start, start + step, …, end` (inclusive, within
/// half a step). Rows are ordered by `Δ̄`.
pub fn sweep(start: f64, end: f64, step: f64) -> Result<Vec<SweepRow>> {
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::InvalidRange(format!("step must be positive, got {step}")));
    }
    if !(0.0..=PL5_ZERO).contains(&start) || !(0.0..=PL5_ZERO).contains(&end) {
        return Err(Error::InvalidRange(format!("[{start}, {end}] is not inside [0, 0.1]")));
    }
    if start > end {
        return Err(Error::InvalidRange(format!("empty range [{start}, {end}]")));
    }
    let count = ((end - start) / step + 0.5).floor() as usize + 1;
    (0..count)
        .map(|i| {
            let d = (start + i as f64 * step).min(end);
            let spec = PulseSpec::new(d)?;
            let report = efficiencies(&spec, 1)?;
            Ok(SweepRow {
                delta_norm: d,
                pl5_db: report.pl5_db,
                eta_tma: report.eta_tma,
                eta_s: report.eta_s,
                eta: report.eta,
            })
        })
        .collect()
}
