//! Dimensionless conventions and Feshbach-Villars spinor algebra.
//!
//! Everything is expressed in natural units with `ħ = c = m = 1`: lengths in
//! Compton wavelengths, wavenumbers as `x = k λ_C`, energies in units of the
//! rest energy and times in `ħ / (m c²)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Box side lengths measured in Compton wavelengths, one entry per axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxSpec {
    lengths: Vec<f64>,
}

impl BoxSpec {
    pub fn new(lengths: Vec<f64>) -> Result<Self> {
        if lengths.len() != 1 && lengths.len() != 3 {
            return Err(domain(format!(
                "box must have 1 or 3 lengths, got {}",
                lengths.len()
            )));
        }
        if let Some(bad) = lengths.iter().find(|l| !(l.is_finite() && **l > 0.0)) {
            return Err(domain(format!("box length must be positive and finite, got {bad}")));
        }
        Ok(Self { lengths })
    }

    pub fn line(length: f64) -> Result<Self> {
        Self::new(vec![length])
    }

    pub fn cube(length: f64) -> Result<Self> {
        Self::new(vec![length; 3])
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    pub fn dim(&self) -> usize {
        self.lengths.len()
    }

    /// True for 1D boxes and for 3D boxes with all sides equal.
    pub fn is_cubic(&self) -> bool {
        self.lengths.iter().all(|l| *l == self.lengths[0])
    }

    pub fn volume(&self) -> f64 {
        self.lengths.iter().product()
    }

    /// Whether `pos` lies in the closed box.
    pub fn contains(&self, pos: &[f64]) -> bool {
        pos.len() == self.dim()
            && pos
                .iter()
                .zip(&self.lengths)
                .all(|(p, l)| p.is_finite() && *p >= 0.0 && *p <= *l)
    }
}

/// Mode labels: `n` in 1D or `(n1, n2, n3)` in 3D, all at least 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct QuantumNumbers {
    indices: Vec<u32>,
}

impl QuantumNumbers {
    pub fn new(indices: Vec<u32>) -> Result<Self> {
        if indices.len() != 1 && indices.len() != 3 {
            return Err(domain(format!(
                "expected 1 or 3 quantum numbers, got {}",
                indices.len()
            )));
        }
        if indices.contains(&0) {
            return Err(domain("quantum numbers must be >= 1"));
        }
        Ok(Self { indices })
    }

    pub fn one(n: u32) -> Result<Self> {
        Self::new(vec![n])
    }

    pub fn triple(n1: u32, n2: u32, n3: u32) -> Result<Self> {
        Self::new(vec![n1, n2, n3])
    }

    pub fn indices(&self) -> &[u32] {
        &self.indices
    }

    pub fn dim(&self) -> usize {
        self.indices.len()
    }

    pub(crate) fn check_arity(&self, b: &BoxSpec) -> Result<()> {
        if self.dim() == b.dim() {
            Ok(())
        } else {
            Err(domain(format!(
                "{} quantum numbers used with a {}D box",
                self.dim(),
                b.dim()
            )))
        }
    }

    /// Indices sorted ascending; the canonical label of a permutation class.
    pub fn sorted(&self) -> Self {
        let mut indices = self.indices.clone();
        indices.sort_unstable();
        Self { indices }
    }

    /// Number of distinct permutations of the indices (1, 3 or 6 in 3D).
    pub fn permutation_count(&self) -> u32 {
        match self.indices.as_slice() {
            [_] => 1,
            [a, b, c] => {
                if a == b && b == c {
                    1
                } else if a == b || b == c || a == c {
                    3
                } else {
                    6
                }
            }
            _ => unreachable!("arity is checked on construction"),
        }
    }
}

impl std::fmt::Display for QuantumNumbers {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.indices.iter().map(u32::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Energy branch of a plane-wave solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Branch {
    Positive,
    Negative,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Positive => 1.0,
            Branch::Negative => -1.0,
        }
    }
}

/// Two-component amplitudes `(φ₀, χ₀)` of a momentum eigenmode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeAmplitudes {
    pub phi0: f64,
    pub chi0: f64,
    pub branch: Branch,
    /// `E_p / (m c²) = sqrt(x² + 1)`.
    pub scaled_energy: f64,
}

impl ModeAmplitudes {
    /// `φ₀² − χ₀²`, which equals the branch sign.
    pub fn charge(&self) -> f64 {
        (self.phi0 - self.chi0) * (self.phi0 + self.chi0)
    }
}

/// Amplitudes of the plane wave with momentum magnitude `x_mag` (Compton
/// units) on the given energy branch.
pub fn mode_amplitudes(x_mag: f64, branch: Branch) -> Result<ModeAmplitudes> {
    if !x_mag.is_finite() || x_mag < 0.0 {
        return Err(domain(format!("momentum magnitude must be finite and >= 0, got {x_mag}")));
    }
    let eps = x_mag.hypot(1.0);
    let s = branch.sign();
    let denom = 2.0 * eps.sqrt();
    let amps = ModeAmplitudes {
        phi0: (s * eps + 1.0) / denom,
        chi0: (1.0 - s * eps) / denom,
        branch,
        scaled_energy: eps,
    };
    debug_assert!(
        (amps.charge() - s).abs() <= 1e-12 * eps.max(1.0),
        "amplitude identity violated at x = {x_mag}"
    );
    Ok(amps)
}

/// Relativistic kinetic energy `sqrt(x² + 1) − 1` in units of `m c²`.
pub fn scaled_kinetic_energy(x_mag: f64) -> Result<f64> {
    if !x_mag.is_finite() || x_mag < 0.0 {
        return Err(domain(format!("momentum magnitude must be finite and >= 0, got {x_mag}")));
    }
    Ok(kinetic_from_sq(x_mag * x_mag))
}

/// `sqrt(s + 1) − 1` for `s = |x|²`, written to avoid cancellation at small `s`.
pub(crate) fn kinetic_from_sq(s: f64) -> f64 {
    s / ((s + 1.0).sqrt() + 1.0)
}

/// Non-relativistic kinetic energy `x² / 2`.
pub fn nonrel_kinetic_energy(x_mag: f64) -> Result<f64> {
    if !x_mag.is_finite() || x_mag < 0.0 {
        return Err(domain(format!("momentum magnitude must be finite and >= 0, got {x_mag}")));
    }
    Ok(0.5 * x_mag * x_mag)
}

/// The pair `Ψ = (φ, χ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FVSpinor {
    pub upper: Complex64,
    pub lower: Complex64,
}

impl FVSpinor {
    pub const ZERO: FVSpinor = FVSpinor {
        upper: Complex64::new(0.0, 0.0),
        lower: Complex64::new(0.0, 0.0),
    };

    pub fn new(upper: Complex64, lower: Complex64) -> Self {
        Self { upper, lower }
    }

    pub fn is_finite(&self) -> bool {
        self.upper.is_finite() && self.lower.is_finite()
    }

    /// Charge density `Ψ† τ₃ Ψ = |φ|² − |χ|²`.
    pub fn charge_density(&self) -> f64 {
        self.upper.norm_sqr() - self.lower.norm_sqr()
    }

    /// `|φ|² + |χ|²`.
    pub fn norm_sqr(&self) -> f64 {
        self.upper.norm_sqr() + self.lower.norm_sqr()
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self::new(self.upper * c, self.lower * c)
    }
}

/// `Ψ_c = τ₁ Ψ*`: swaps the components and conjugates them.
pub fn charge_conjugate(s: &FVSpinor) -> FVSpinor {
    FVSpinor::new(s.lower.conj(), s.upper.conj())
}
