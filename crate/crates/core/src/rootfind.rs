//! Boundary-condition solvers for the box spectra.
//!
//! The 1D Dirac condition `tan(y) = −y / L_C` has one root per branch
//! `((n − ½)π, nπ)`. In 3D the three conditions
//! `tan(y_i) = 2 a x_i / (x_i² − a²)` with `a = 𝒯 + 2` are coupled through the
//! energy. Because `x_i < a` on every solution, the right-hand side equals
//! `tan(−2 atan(x_i / a))`, so on branch `n_i` the condition reads
//! `y_i = n_i π − 2 atan(x_i / a)`. The coupled solver iterates that pole-free
//! form; residuals are always reported in the tangent form.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{domain, Error, Result};
use crate::model::{kinetic_from_sq, BoxSpec, QuantumNumbers};

/// Tolerances and caps shared by the scalar and coupled solvers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub rel_tol: f64,
    pub max_scalar_iters: usize,
    pub max_fixed_point_iters: usize,
    /// Initial relaxation factor for the coupled iteration, in `(0, 1]`.
    pub damping: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-12,
            max_scalar_iters: 200,
            max_fixed_point_iters: 500,
            damping: 1.0,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol.is_finite() && self.rel_tol > 0.0) {
            return Err(domain(format!("rel_tol must be positive, got {}", self.rel_tol)));
        }
        if self.max_scalar_iters == 0 || self.max_fixed_point_iters == 0 {
            return Err(domain("iteration caps must be >= 1"));
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(domain(format!("damping must lie in (0, 1], got {}", self.damping)));
        }
        Ok(())
    }
}

/// A bracket `(lo, hi)` known to hold the root of branch `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootBranch {
    pub n: u32,
    pub bracket_lo: f64,
    pub bracket_hi: f64,
}

/// Shrink applied to the lower edge of a tangent branch, away from the pole.
const POLE_GAP: f64 = 1e-9 * PI;

impl RootBranch {
    /// Bracket in `y` for the 1D Dirac root on branch `n`.
    pub fn dirac_1d(n: u32) -> Self {
        let n_f = f64::from(n);
        Self {
            n,
            bracket_lo: (n_f - 0.5) * PI + POLE_GAP,
            bracket_hi: n_f * PI,
        }
    }
}

/// Finds a root of `f` in `[lo, hi]` with Brent's method (inverse quadratic
/// and secant steps, falling back to bisection).
pub fn solve_bracketed<F>(f: F, lo: f64, hi: f64, cfg: &SolverConfig) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(domain(format!("invalid bracket [{lo}, {hi}]")));
    }
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if !(fa.is_finite() && fb.is_finite()) || fa.signum() == fb.signum() {
        return Err(Error::Bracket { lo, hi, f_lo: fa, f_hi: fb });
    }

    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..cfg.max_scalar_iters {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * cfg.rel_tol * b.abs().max(1.0);
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return Ok(b.clamp(lo, hi));
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q) = if a == c {
                (2.0 * m * s, 1.0 - s)
            } else {
                let q = fa / fc;
                let r = fb / fc;
                (
                    s * (2.0 * m * q * (q - r) - (b - a) * (r - 1.0)),
                    (q - 1.0) * (r - 1.0) * (s - 1.0),
                )
            };
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b);
        if !fb.is_finite() {
            return Err(Error::Convergence { iterations: 0, last: b });
        }
    }
    Err(Error::Convergence {
        iterations: cfg.max_scalar_iters,
        last: b.clamp(lo, hi),
    })
}

fn check_length(l: f64) -> Result<()> {
    if l.is_finite() && l > 0.0 {
        Ok(())
    } else {
        Err(domain(format!("L_C must be positive and finite, got {l}")))
    }
}

fn check_n(n: u32) -> Result<()> {
    if n >= 1 {
        Ok(())
    } else {
        Err(domain("quantum number must be >= 1"))
    }
}

/// Low-order part of π, so that `PI + PI_LO` carries ~32 digits.
const PI_LO: f64 = 1.224_646_799_147_353_2e-16;

/// A root of `tan(y) = −y / L_C`, held as its offset from the pole
/// `(n − ½)π` that opens its branch.
///
/// Near the pole `tan` is too steep for `tan(y)` of a rounded `y` to
/// resolve the residual, so it is evaluated as `−cot(offset)` instead.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiracRoot1d {
    pub n: u32,
    pub lc: f64,
    /// `y − (n − ½)π`, in `(0, π/2]`.
    pub offset: f64,
}

impl DiracRoot1d {
    fn pole(n: u32) -> (f64, f64) {
        let k = f64::from(n) - 0.5;
        (k * PI, k * PI_LO)
    }

    /// `y = x L_C`.
    pub fn y(&self) -> f64 {
        let (hi, lo) = Self::pole(self.n);
        hi + (lo + self.offset)
    }

    pub fn wavenumber(&self) -> f64 {
        self.y() / self.lc
    }

    /// `tan(y) + y / L_C` at the root.
    pub fn residual(&self) -> f64 {
        -1.0 / self.offset.tan() + self.y() / self.lc
    }
}

/// Solves `tan(y) + y / L_C = 0` on branch `n`.
pub fn dirac_root_1d(n: u32, lc: f64, cfg: &SolverConfig) -> Result<DiracRoot1d> {
    check_n(n)?;
    check_length(lc)?;
    let (hi, lo) = DiracRoot1d::pole(n);
    let y_of = |d: f64| hi + (lo + d);
    // sin(d) * (tan(y) + y / L_C), free of the pole
    let g = |d: f64| d.sin() * y_of(d) / lc - d.cos();
    let branch = RootBranch::dirac_1d(n);
    let mut d = solve_bracketed(g, branch.bracket_lo - hi, branch.bracket_hi - hi, cfg)?;

    // Brent stops on an absolute tolerance; the root can sit close to the
    // pole, so finish with Newton to full relative precision.
    for _ in 0..4 {
        let gd = g(d);
        let slope = d.cos() * y_of(d) / lc + d.sin() * (1.0 / lc + 1.0);
        let next = d - gd / slope;
        if !(next > 0.0 && next <= FRAC_PI_2) || g(next).abs() >= gd.abs() {
            break;
        }
        d = next;
    }
    Ok(DiracRoot1d { n, lc, offset: d })
}

/// Dirac wavenumber `x_n` of the 1D box of size `lc`.
pub fn dirac_wavenumber_1d(n: u32, lc: f64, cfg: &SolverConfig) -> Result<f64> {
    Ok(dirac_root_1d(n, lc, cfg)?.wavenumber())
}

/// Klein-Gordon (node-at-wall) wavenumber `nπ / L_C`.
pub fn kg_wavenumber_1d(n: u32, lc: f64) -> Result<f64> {
    check_n(n)?;
    check_length(lc)?;
    Ok(f64::from(n) * PI / lc)
}

/// Componentwise `n_i π / L_i`.
pub fn kg_wavenumbers_3d(qn: &QuantumNumbers, b: &BoxSpec) -> Result<[f64; 3]> {
    check_3d(qn, b)?;
    let mut x = [0.0; 3];
    for (i, (n, l)) in qn.indices().iter().zip(b.lengths()).enumerate() {
        x[i] = f64::from(*n) * PI / l;
    }
    Ok(x)
}

fn check_3d(qn: &QuantumNumbers, b: &BoxSpec) -> Result<()> {
    if b.dim() != 3 {
        return Err(domain("a 3D solve needs a 3D box"));
    }
    qn.check_arity(b)
}

/// Self-consistent solution of the coupled 3D Dirac conditions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiracSolution3d {
    pub wavenumbers: [f64; 3],
    /// Scaled kinetic energy recomputed from `wavenumbers`.
    pub kinetic: f64,
    pub iterations: usize,
}

/// Tangent-form residuals `tan(x_i L_i) − 2 a x_i / (x_i² − a²)` with
/// `a = 𝒯 + 2` recomputed from `x`.
pub fn dirac_residuals_3d(x: &[f64; 3], b: &BoxSpec) -> [f64; 3] {
    let a = kinetic_from_sq(x.iter().map(|v| v * v).sum()) + 2.0;
    let mut r = [0.0; 3];
    for i in 0..3 {
        let xi = x[i];
        r[i] = (xi * b.lengths()[i]).tan() - 2.0 * a * xi / (xi * xi - a * a);
    }
    r
}

/// Solves the coupled 3D Dirac conditions by relaxed Gauss-Seidel iteration
/// started from the Klein-Gordon wavenumbers.
pub fn dirac_wavenumbers_3d(
    qn: &QuantumNumbers,
    b: &BoxSpec,
    cfg: &SolverConfig,
) -> Result<DiracSolution3d> {
    cfg.validate()?;
    let mut x = kg_wavenumbers_3d(qn, b)?;
    let ns = qn.indices();
    let ls = b.lengths();

    let mut omega = cfg.damping;
    let mut prev_step = [0.0f64; 3];
    let mut alternations = 0usize;

    for iter in 1..=cfg.max_fixed_point_iters {
        let mut max_rel = 0.0f64;
        let mut step = [0.0f64; 3];
        for i in 0..3 {
            let a = kinetic_from_sq(x.iter().map(|v| v * v).sum()) + 2.0;
            let (n, l) = (f64::from(ns[i]), ls[i]);
            // Strictly increasing in y; negative at the lower edge because
            // the current x_i < a, positive at the upper edge.
            let g = |y: f64| y - n * PI + 2.0 * (y / (l * a)).atan();
            let y = solve_bracketed(g, (n - 0.5) * PI, n * PI, cfg)?;
            let target = y / l;
            let next = x[i] + omega * (target - x[i]);
            step[i] = next - x[i];
            max_rel = max_rel.max(step[i].abs() / next.abs());
            x[i] = next;
        }
        if max_rel < cfg.rel_tol {
            return Ok(DiracSolution3d {
                wavenumbers: x,
                kinetic: kinetic_from_sq(x.iter().map(|v| v * v).sum()),
                iterations: iter,
            });
        }
        let flipped = step
            .iter()
            .zip(&prev_step)
            .any(|(s, p)| s * p < 0.0 && s.abs() > 0.5 * p.abs());
        alternations = if flipped { alternations + 1 } else { 0 };
        if alternations >= 2 && omega > 0.5 {
            omega = 0.5;
            alternations = 0;
        }
        prev_step = step;
    }
    Err(Error::FixedPoint {
        qnums: ns.to_vec(),
        history: cfg.max_fixed_point_iters,
    })
}

/// Lower bound on a Dirac wavenumber on branch `n`: `(n − ½)π / L`.
pub(crate) fn dirac_lower_bound(n: u32, l: f64) -> f64 {
    (f64::from(n) - 0.5) * PI / l
}
