//! Harmonic index sets and the per-element dynamic excitations.
//!
//! Only odd harmonics that are not multiples of 3 survive the composite waveform.
//! The two-branch feeding then keeps orders `q ≡ 1 (mod 4)` above the carrier
//! (`ω_c + qω0`) and orders `q ≡ 3 (mod 4)` below it (`ω_c - qω0`).

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;

use num_complex::{Complex, Complex64};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::waveform::{sinc, PulseSpec};

/// Default harmonic cutoff for pattern work.
pub const DEFAULT_Q_MAX: u32 = 41;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HarmonicKind {
    /// Odd orders not divisible by 3.
    Upsilon,
    /// Members of `Upsilon` with `q ≡ 1 (mod 4)`.
    Upsilon1,
    /// Members of `Upsilon` with `q ≡ 3 (mod 4)`.
    Upsilon2,
}

impl HarmonicKind {
    pub fn contains(self, q: u32) -> bool {
        let base = q % 2 == 1 && !q.is_multiple_of(3);
        match self {
            HarmonicKind::Upsilon => base,
            HarmonicKind::Upsilon1 => base && q % 4 == 1,
            HarmonicKind::Upsilon2 => base && q % 4 == 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HarmonicSet {
    kind: HarmonicKind,
    q_max: u32,
    members: Vec<u32>,
}

impl HarmonicSet {
    /// Ascending members of `kind` up to and including `q_max`.
    pub fn generate(kind: HarmonicKind, q_max: u32) -> Self {
        let members = (1..=q_max).step_by(2).filter(|&q| kind.contains(q)).collect();
        Self { kind, q_max, members }
    }

    pub fn kind(&self) -> HarmonicKind {
        self.kind
    }

    pub fn q_max(&self) -> u32 {
        self.q_max
    }

    pub fn members(&self) -> &[u32] {
        &self.members
    }

    pub fn contains(&self, q: u32) -> bool {
        q <= self.q_max && self.kind.contains(q)
    }
}

/// Which side of the carrier a harmonic radiates on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Band {
    /// `ω_c + qω0`, orders in `Upsilon1`.
    Positive,
    /// `ω_c - qω0`, orders in `Upsilon2`.
    Negative,
}

impl Band {
    /// Band selected by the two-branch combination for order `q`, if any.
    pub fn of(q: u32) -> Option<Band> {
        if !HarmonicKind::Upsilon.contains(q) {
            return None;
        }
        let (upper, lower) = selection_constants(q);
        match (upper == Complex::new(0, 0), lower == Complex::new(0, 0)) {
            (false, true) => Some(Band::Positive),
            (true, false) => Some(Band::Negative),
            _ => None,
        }
    }

    /// Sign of the spectral line: `+q` for the positive band, `-q` otherwise.
    pub fn signed(self, q: u32) -> i64 {
        match self {
            Band::Positive => i64::from(q),
            Band::Negative => -i64::from(q),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Band::Positive => "pos",
            Band::Negative => "neg",
        }
    }
}

impl fmt::Display for Band {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// The weights `(1 - (-j)^{q+1}, -1 - j^{q+1})` that the quarter-period delay and the
/// 90° branch shift put on the `+q` and `-q` lines, in exact Gaussian integers.
pub fn selection_constants(q: u32) -> (Complex<i64>, Complex<i64>) {
    let j = Complex::new(0i64, 1);
    let minus_j = Complex::new(0i64, -1);
    let upper = Complex::new(1, 0) - minus_j.powu(q + 1);
    let lower = Complex::new(-1, 0) - j.powu(q + 1);
    (upper, lower)
}

/// Magnitude shared by `I_nq` and `I'_nq`: `4 |sinc(2πqΔ̄)| / (π√2 q)`.
pub fn excitation_magnitude(q: u32, spec: &PulseSpec) -> f64 {
    let qf = f64::from(q);
    4.0 * sinc(2.0 * PI * qf * spec.delta_norm()).abs() * FRAC_1_SQRT_2 / (PI * qf)
}

/// Dynamic excitation of an element with normalized delay `D_n/T0` at order `q`.
///
/// Positive band: `4 sinc(2πqΔ̄) / (jπ√2 q) · e^{-j2πq D_n/T0}`.
/// Negative band: `-4 sinc(2πqΔ̄) / (jπ√2 q) · e^{+j2πq D_n/T0}`.
pub fn dynamic_excitation(q: u32, spec: &PulseSpec, delay_norm: f64) -> Result<Complex64> {
    let band = Band::of(q).ok_or(Error::NotInUpsilon(q))?;
    let qf = f64::from(q);
    let scale = 4.0 * sinc(2.0 * PI * qf * spec.delta_norm()) * FRAC_1_SQRT_2 / (PI * qf);
    // Reduce before scaling by 2π so large delays keep full phase precision.
    let turns = (qf * delay_norm.rem_euclid(1.0)).rem_euclid(1.0);
    let inv_j = Complex64::new(0.0, -1.0);
    Ok(match band {
        Band::Positive => inv_j * scale * Complex64::from_polar(1.0, -2.0 * PI * turns),
        Band::Negative => -inv_j * scale * Complex64::from_polar(1.0, 2.0 * PI * turns),
    })
}

/// Per-element excitations for every kept harmonic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExcitationSet {
    n_elements: usize,
    spec: PulseSpec,
    delays: Vec<f64>,
    q_max: u32,
    entries: BTreeMap<(u32, Band), Vec<Complex64>>,
}

impl ExcitationSet {
    pub fn new(n_elements: usize, spec: PulseSpec, delays: &[f64], q_max: u32) -> Result<Self> {
        if delays.len() != n_elements {
            return Err(Error::LengthMismatch { expected: n_elements, got: delays.len() });
        }
        let mut entries = BTreeMap::new();
        for &q in HarmonicSet::generate(HarmonicKind::Upsilon, q_max).members() {
            let band = Band::of(q).ok_or(Error::NotInUpsilon(q))?;
            let column = delays
                .iter()
                .map(|&d| dynamic_excitation(q, &spec, d))
                .collect::<Result<Vec<_>>>()?;
            entries.insert((q, band), column);
        }
        Ok(Self { n_elements, spec, delays: delays.to_vec(), q_max, entries })
    }

    pub fn n_elements(&self) -> usize {
        self.n_elements
    }

    pub fn spec(&self) -> PulseSpec {
        self.spec
    }

    pub fn delays(&self) -> &[f64] {
        &self.delays
    }

    pub fn q_max(&self) -> u32 {
        self.q_max
    }

    /// Excitations of all elements at `(q, band)`.
    pub fn harmonic(&self, q: u32, band: Band) -> Option<&[Complex64]> {
        self.entries.get(&(q, band)).map(Vec::as_slice)
    }

    pub fn get(&self, n: usize, q: u32, band: Band) -> Option<Complex64> {
        self.harmonic(q, band).and_then(|col| col.get(n).copied())
    }

    /// Kept `(q, band)` pairs in ascending order of `q`.
    pub fn harmonics(&self) -> impl Iterator<Item = (u32, Band)> + '_ {
        self.entries.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}
