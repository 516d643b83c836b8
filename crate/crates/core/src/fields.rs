//! Box eigenstates of the Feshbach-Villars equation and checks on them.
//!
//! A positive-energy box state is a standing wave
//! `Ψ(x, t) = sqrt(2^d / V) (φ₀, χ₀) e^{−iEt} ∏ sin(x_i r_i)` with
//! `x_i = n_i π / L_i`. Its charge conjugate is obtained pointwise.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{domain, Result};
use crate::model::{charge_conjugate, mode_amplitudes, BoxSpec, Branch, FVSpinor, ModeAmplitudes, QuantumNumbers};
use crate::rootfind::kg_wavenumbers_3d;

/// Field values at one spacetime point.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSample {
    pub position: Vec<f64>,
    pub time: f64,
    pub spinor: FVSpinor,
    pub rho: f64,
    pub current: Vec<f64>,
}

/// Points per axis; `include_boundary` selects the closed grid
/// `0, h, …, L` rather than the strictly interior one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridSpec {
    pub points_per_axis: usize,
    pub include_boundary: bool,
}

impl GridSpec {
    pub fn closed(points_per_axis: usize) -> Self {
        Self {
            points_per_axis,
            include_boundary: true,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.points_per_axis < 3 {
            return Err(domain(format!(
                "grid needs at least 3 points per axis, got {}",
                self.points_per_axis
            )));
        }
        Ok(())
    }

    /// Coordinates along an axis of length `l`.
    pub fn axis(&self, l: f64) -> Vec<f64> {
        let n = self.points_per_axis;
        if self.include_boundary {
            let h = l / (n - 1) as f64;
            (0..n).map(|j| if j == n - 1 { l } else { j as f64 * h }).collect()
        } else {
            let h = l / (n + 1) as f64;
            (1..=n).map(|j| j as f64 * h).collect()
        }
    }
}

/// A positive-energy box eigenstate or its charge conjugate.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxState {
    qnums: QuantumNumbers,
    box_spec: BoxSpec,
    conjugated: bool,
    wavenumbers: Vec<f64>,
    amps: ModeAmplitudes,
    prefactor: f64,
}

impl BoxState {
    pub fn new(qnums: QuantumNumbers, box_spec: BoxSpec) -> Result<Self> {
        qnums.check_arity(&box_spec)?;
        let wavenumbers: Vec<f64> = if box_spec.dim() == 1 {
            vec![f64::from(qnums.indices()[0]) * std::f64::consts::PI / box_spec.lengths()[0]]
        } else {
            kg_wavenumbers_3d(&qnums, &box_spec)?.to_vec()
        };
        let x_mag = wavenumbers.iter().map(|x| x * x).sum::<f64>().sqrt();
        let amps = mode_amplitudes(x_mag, Branch::Positive)?;
        let prefactor = (f64::from(1u32 << box_spec.dim()) / box_spec.volume()).sqrt();
        Ok(Self {
            qnums,
            box_spec,
            conjugated: false,
            wavenumbers,
            amps,
            prefactor,
        })
    }

    pub fn qnums(&self) -> &QuantumNumbers {
        &self.qnums
    }

    pub fn box_spec(&self) -> &BoxSpec {
        &self.box_spec
    }

    pub fn is_conjugated(&self) -> bool {
        self.conjugated
    }

    pub fn wavenumbers(&self) -> &[f64] {
        &self.wavenumbers
    }

    pub fn amplitudes(&self) -> &ModeAmplitudes {
        &self.amps
    }

    /// Energy eigenvalue in units of `m c²`; negative for the conjugate.
    pub fn energy(&self) -> f64 {
        if self.conjugated {
            -self.amps.scaled_energy
        } else {
            self.amps.scaled_energy
        }
    }

    /// Real stationary amplitudes `(φ̃₀, χ̃₀)` multiplying the spatial profile.
    fn stationary_pair(&self) -> (f64, f64) {
        if self.conjugated {
            (self.amps.chi0, self.amps.phi0)
        } else {
            (self.amps.phi0, self.amps.chi0)
        }
    }

    fn check_position(&self, pos: &[f64]) -> Result<()> {
        if self.box_spec.contains(pos) {
            Ok(())
        } else {
            Err(domain(format!("position {pos:?} lies outside the box")))
        }
    }

    fn on_face(&self, pos: &[f64]) -> bool {
        pos.iter()
            .zip(self.box_spec.lengths())
            .any(|(p, l)| *p == 0.0 || *p == *l)
    }

    /// `sqrt(2^d / V) ∏ sin(x_i r_i)`, exactly zero on the faces.
    fn profile(&self, pos: &[f64]) -> f64 {
        if self.on_face(pos) {
            return 0.0;
        }
        self.prefactor
            * pos
                .iter()
                .zip(&self.wavenumbers)
                .map(|(r, x)| (x * r).sin())
                .product::<f64>()
    }

    fn profile_gradient(&self, pos: &[f64]) -> Vec<f64> {
        (0..pos.len())
            .map(|j| {
                let mut g = self.prefactor;
                for (i, (r, x)) in pos.iter().zip(&self.wavenumbers).enumerate() {
                    g *= if i == j { x * (x * r).cos() } else { (x * r).sin() };
                }
                g
            })
            .collect()
    }

    fn particle_spinor(&self, scalar: f64, t: f64) -> FVSpinor {
        let phase = Complex64::from_polar(1.0, -self.amps.scaled_energy * t);
        FVSpinor::new(
            phase * (self.amps.phi0 * scalar),
            phase * (self.amps.chi0 * scalar),
        )
    }

    fn spinor_from_profile(&self, scalar: f64, t: f64) -> FVSpinor {
        let s = self.particle_spinor(scalar, t);
        if self.conjugated {
            charge_conjugate(&s)
        } else {
            s
        }
    }

    /// `Ψ(r, t)`.
    pub fn spinor(&self, pos: &[f64], t: f64) -> Result<FVSpinor> {
        self.check_position(pos)?;
        Ok(self.spinor_from_profile(self.profile(pos), t))
    }

    /// `∂Ψ/∂r_j` for each axis.
    pub fn spinor_gradient(&self, pos: &[f64], t: f64) -> Result<Vec<FVSpinor>> {
        self.check_position(pos)?;
        Ok(self
            .profile_gradient(pos)
            .into_iter()
            .map(|g| self.spinor_from_profile(g, t))
            .collect())
    }

    pub fn sample(&self, pos: &[f64], t: f64) -> Result<FieldSample> {
        let spinor = self.spinor(pos, t)?;
        let grad = self.spinor_gradient(pos, t)?;
        Ok(FieldSample {
            position: pos.to_vec(),
            time: t,
            rho: spinor.charge_density(),
            current: charge_current(&spinor, &grad),
            spinor,
        })
    }
}

/// `J = Im[(φ + χ)* ∇(φ + χ)]` in units with `ħ = m = 1`.
pub fn charge_current(s: &FVSpinor, grad: &[FVSpinor]) -> Vec<f64> {
    let psi = s.upper + s.lower;
    grad.iter()
        .map(|g| (psi.conj() * (g.upper + g.lower)).im)
        .collect()
}

/// Sample of the 1D box state `n` at position `x` and time `t`.
pub fn box_state_1d(n: u32, lc: f64, x: f64, t: f64) -> Result<FieldSample> {
    BoxState::new(QuantumNumbers::one(n)?, BoxSpec::line(lc)?)?.sample(&[x], t)
}

/// Sample of the 3D box state `qn` at `pos` and time `t`.
pub fn box_state_3d(qn: &QuantumNumbers, b: &BoxSpec, pos: &[f64; 3], t: f64) -> Result<FieldSample> {
    if b.dim() != 3 {
        return Err(domain("box_state_3d needs a 3D box"));
    }
    BoxState::new(qn.clone(), b.clone())?.sample(pos, t)
}

/// The pointwise charge conjugate of `state`.
pub fn conjugated_state(state: &BoxState) -> BoxState {
    BoxState {
        conjugated: !state.conjugated,
        ..state.clone()
    }
}

/// Composite Simpson weights for `n >= 3` equally spaced points with step
/// `h`; an even count closes with the 3/8 rule on the last three intervals.
pub fn simpson_weights(n: usize, h: f64) -> Vec<f64> {
    assert!(n >= 3, "Simpson needs at least 3 points");
    let mut w = vec![0.0; n];
    let simpson_end = if n % 2 == 1 { n - 1 } else { n - 4 };
    let mut i = 0;
    while i + 2 <= simpson_end {
        w[i] += h / 3.0;
        w[i + 1] += 4.0 * h / 3.0;
        w[i + 2] += h / 3.0;
        i += 2;
    }
    if n % 2 == 0 {
        let s = n - 4;
        w[s] += 3.0 * h / 8.0;
        w[s + 1] += 9.0 * h / 8.0;
        w[s + 2] += 9.0 * h / 8.0;
        w[s + 3] += 3.0 * h / 8.0;
    }
    w
}

/// `∫ρ` over the closed box by tensor-product Simpson on
/// `grid.points_per_axis` points per axis. The exact value is 1 for a
/// particle state and −1 for its conjugate.
pub fn normalization_check(state: &BoxState, grid: &GridSpec) -> Result<f64> {
    grid.validate()?;
    let n = grid.points_per_axis;
    let closed = GridSpec::closed(n);
    let lengths = state.box_spec().lengths();
    let axes: Vec<Vec<f64>> = lengths.iter().map(|l| closed.axis(*l)).collect();
    let weights: Vec<Vec<f64>> = lengths
        .iter()
        .map(|l| simpson_weights(n, l / (n - 1) as f64))
        .collect();
    let rho = |pos: &[f64]| state.spinor_from_profile(state.profile(pos), 0.0).charge_density();

    if lengths.len() == 1 {
        return Ok(axes[0]
            .iter()
            .zip(&weights[0])
            .map(|(x, w)| w * rho(&[*x]))
            .sum());
    }
    // one partial sum per outer slice, added in order for reproducibility
    let slices: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut acc = 0.0;
            for j in 0..n {
                let mut row = 0.0;
                for k in 0..n {
                    row += weights[2][k] * rho(&[axes[0][i], axes[1][j], axes[2][k]]);
                }
                acc += weights[1][j] * row;
            }
            weights[0][i] * acc
        })
        .collect();
    Ok(slices.iter().sum())
}

/// How `p̂²` is applied in [`stationarity_residual_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Laplacian {
    /// Three-point central differences per axis.
    FiniteDifference,
    /// `−∇² sin = |x|² sin`, exact.
    Analytic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationarityProbe {
    pub laplacian: Laplacian,
    /// Added to the eigenvalue; non-zero values check that the test can fail.
    pub energy_shift: f64,
}

impl Default for StationarityProbe {
    fn default() -> Self {
        Self {
            laplacian: Laplacian::FiniteDifference,
            energy_shift: 0.0,
        }
    }
}

/// Interior points of the closed grid, with the grid steps.
fn interior_points(state: &BoxState, n: usize) -> (Vec<Vec<f64>>, Vec<f64>) {
    let closed = GridSpec::closed(n);
    let lengths = state.box_spec().lengths();
    let axes: Vec<Vec<f64>> = lengths.iter().map(|l| closed.axis(*l)).collect();
    let steps: Vec<f64> = lengths.iter().map(|l| l / (n - 1) as f64).collect();
    let mut points = Vec::new();
    if lengths.len() == 1 {
        for x in &axes[0][1..n - 1] {
            points.push(vec![*x]);
        }
    } else {
        for a in &axes[0][1..n - 1] {
            for b in &axes[1][1..n - 1] {
                for c in &axes[2][1..n - 1] {
                    points.push(vec![*a, *b, *c]);
                }
            }
        }
    }
    (points, steps)
}

/// `−∇² f` of the spatial profile at `pos`.
fn minus_laplacian(state: &BoxState, pos: &[f64], steps: &[f64], how: Laplacian) -> f64 {
    match how {
        Laplacian::Analytic => {
            let k_sq: f64 = state.wavenumbers().iter().map(|x| x * x).sum();
            k_sq * state.profile(pos)
        }
        Laplacian::FiniteDifference => {
            let centre = state.profile(pos);
            let mut acc = 0.0;
            let mut p = pos.to_vec();
            for (axis, h) in steps.iter().enumerate() {
                p[axis] = pos[axis] + h;
                let fwd = state.profile(&p);
                p[axis] = pos[axis] - h;
                let back = state.profile(&p);
                p[axis] = pos[axis];
                acc += (2.0 * centre - fwd - back) / (h * h);
            }
            acc
        }
    }
}

fn max_over(points: &[Vec<f64>], f: impl Fn(&[f64]) -> f64 + Sync) -> f64 {
    points
        .par_iter()
        .map(|p| f(p))
        .reduce(|| 0.0, f64::max)
}

/// `max |HΨ̃ − EΨ̃|` over interior grid points, with `p̂²` applied by central
/// differences. Decreases as `O(h²)`.
pub fn stationarity_residual(state: &BoxState, grid: &GridSpec) -> Result<f64> {
    stationarity_residual_with(state, grid, StationarityProbe::default())
}

/// [`stationarity_residual`] with a choice of Laplacian and an optional
/// energy shift.
pub fn stationarity_residual_with(
    state: &BoxState,
    grid: &GridSpec,
    probe: StationarityProbe,
) -> Result<f64> {
    grid.validate()?;
    let (points, steps) = interior_points(state, grid.points_per_axis);
    let (phi0, chi0) = state.stationary_pair();
    let e = state.energy() + probe.energy_shift;
    Ok(max_over(&points, |pos| {
        let f = state.profile(pos);
        // (p̂²/2)(φ + χ) with ħ = m = 1
        let kin = 0.5 * (phi0 + chi0) * minus_laplacian(state, pos, &steps, probe.laplacian);
        let (phi, chi) = (phi0 * f, chi0 * f);
        let r_upper = kin + phi - e * phi;
        let r_lower = -kin - chi - e * chi;
        r_upper.hypot(r_lower)
    }))
}

/// `max |∂²ψ/∂t² − ∇²ψ + ψ|` over interior points for `ψ = φ + χ`, using
/// `∂²/∂t² → −E²` and central differences in space.
pub fn klein_gordon_residual(state: &BoxState, grid: &GridSpec) -> Result<f64> {
    grid.validate()?;
    let (points, steps) = interior_points(state, grid.points_per_axis);
    let (phi0, chi0) = state.stationary_pair();
    let e = state.energy();
    Ok(max_over(&points, |pos| {
        let psi = (phi0 + chi0) * state.profile(pos);
        let lap = (phi0 + chi0) * minus_laplacian(state, pos, &steps, Laplacian::FiniteDifference);
        (-e * e * psi + lap + psi).abs()
    }))
}

/// Largest `|Ψ̃|` over the interior of the grid.
pub fn max_amplitude(state: &BoxState, grid: &GridSpec) -> Result<f64> {
    grid.validate()?;
    let (points, _) = interior_points(state, grid.points_per_axis);
    let (phi0, chi0) = state.stationary_pair();
    Ok(max_over(&points, |pos| {
        let f = state.profile(pos);
        (phi0 * f).hypot(chi0 * f)
    }))
}
