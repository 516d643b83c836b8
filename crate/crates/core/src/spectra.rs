//! Level enumeration, degeneracy grouping and state counting.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::model::{kinetic_from_sq, BoxSpec, QuantumNumbers};
use crate::rootfind::{
    dirac_lower_bound, dirac_wavenumber_1d, dirac_wavenumbers_3d, kg_wavenumber_1d,
    kg_wavenumbers_3d, SolverConfig,
};

/// Which wave equation supplies the spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Model {
    #[serde(rename = "kg")]
    KleinGordon,
    #[serde(rename = "dirac")]
    Dirac,
    #[serde(rename = "nonrel")]
    NonRel,
}

impl Model {
    pub const ALL: [Model; 3] = [Model::KleinGordon, Model::Dirac, Model::NonRel];

    pub fn tag(self) -> &'static str {
        match self {
            Model::KleinGordon => "kg",
            Model::Dirac => "dirac",
            Model::NonRel => "nonrel",
        }
    }

    /// Kinetic energy for a squared wavenumber magnitude.
    fn dispersion(self, x_sq: f64) -> f64 {
        match self {
            Model::KleinGordon | Model::Dirac => kinetic_from_sq(x_sq),
            Model::NonRel => 0.5 * x_sq,
        }
    }

    fn spin_factor(self, spin_counting: bool) -> u32 {
        if spin_counting && self == Model::Dirac {
            2
        } else {
            1
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "kg" => Ok(Model::KleinGordon),
            "dirac" => Ok(Model::Dirac),
            "nonrel" => Ok(Model::NonRel),
            other => Err(domain(format!("unknown model '{other}'"))),
        }
    }
}

/// One energy level, possibly shared by several quantum-number triples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Level {
    pub model: Model,
    /// Representative quantum numbers (sorted ascending on cubes).
    pub qnums: QuantumNumbers,
    pub wavenumbers: Vec<f64>,
    pub kinetic: f64,
    pub degeneracy: u32,
    /// Further representatives whose energy coincides with this level.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub merged: Vec<QuantumNumbers>,
}

/// Either the first `count` distinct levels or every level with kinetic
/// energy at or below `cutoff`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Extent {
    Count(usize),
    Cutoff(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumRequest {
    pub model: Model,
    pub box_spec: BoxSpec,
    pub extent: Extent,
    pub spin_counting: bool,
    /// Largest quantum number the enumeration may visit on any axis.
    pub max_index: u32,
    pub solver: SolverConfig,
}

pub const DEFAULT_MAX_INDEX: u32 = 256;

/// Relative gap below which two kinetic energies count as one level.
pub const DEGENERACY_RTOL: f64 = 1e-9;

impl SpectrumRequest {
    pub fn new(model: Model, box_spec: BoxSpec, extent: Extent) -> Self {
        Self {
            model,
            box_spec,
            extent,
            spin_counting: false,
            max_index: DEFAULT_MAX_INDEX,
            solver: SolverConfig::default(),
        }
    }

    pub fn with_spin_counting(mut self, on: bool) -> Self {
        self.spin_counting = on;
        self
    }

    fn validate(&self) -> Result<()> {
        match self.extent {
            Extent::Count(0) => return Err(domain("level count must be >= 1")),
            Extent::Cutoff(t) if !(t.is_finite() && t > 0.0) => {
                return Err(domain(format!("kinetic cutoff must be positive, got {t}")))
            }
            _ => {}
        }
        if self.max_index == 0 {
            return Err(domain("lattice bound must be >= 1"));
        }
        self.solver.validate()
    }
}

/// Level of the 1D box for mode `n`.
pub fn level_1d(model: Model, n: u32, lc: f64, cfg: &SolverConfig) -> Result<Level> {
    let x = match model {
        Model::Dirac => dirac_wavenumber_1d(n, lc, cfg)?,
        Model::KleinGordon | Model::NonRel => kg_wavenumber_1d(n, lc)?,
    };
    Ok(Level {
        model,
        qnums: QuantumNumbers::one(n)?,
        wavenumbers: vec![x],
        kinetic: model.dispersion(x * x),
        degeneracy: 1,
        merged: Vec::new(),
    })
}

/// Level of the 3D box for the triple `qn`; degeneracy is left at 1.
pub fn level_3d(model: Model, qn: &QuantumNumbers, b: &BoxSpec, cfg: &SolverConfig) -> Result<Level> {
    let x = match model {
        Model::Dirac => dirac_wavenumbers_3d(qn, b, cfg)?.wavenumbers,
        Model::KleinGordon | Model::NonRel => kg_wavenumbers_3d(qn, b)?,
    };
    Ok(Level {
        model,
        qnums: qn.clone(),
        wavenumbers: x.to_vec(),
        kinetic: model.dispersion(x.iter().map(|v| v * v).sum()),
        degeneracy: 1,
        merged: Vec::new(),
    })
}

fn solve_level(model: Model, qn: &QuantumNumbers, b: &BoxSpec, cfg: &SolverConfig) -> Result<Level> {
    let solved = if b.dim() == 1 {
        level_1d(model, qn.indices()[0], b.lengths()[0], cfg)
    } else {
        level_3d(model, qn, b, cfg)
    };
    solved.map_err(|e| {
        if e.is_solver_failure() {
            Error::Level {
                qnums: qn.indices().to_vec(),
                lengths: b.lengths().to_vec(),
                reason: Box::new(e),
            }
        } else {
            e
        }
    })
}

/// Kinetic energy that no level with these quantum numbers can undercut.
fn kinetic_lower_bound(model: Model, idx: &[u32], b: &BoxSpec) -> f64 {
    let x_sq: f64 = idx
        .iter()
        .zip(b.lengths())
        .map(|(n, l)| {
            let x = match model {
                Model::Dirac => dirac_lower_bound(*n, *l),
                Model::KleinGordon | Model::NonRel => f64::from(*n) * std::f64::consts::PI / l,
            };
            x * x
        })
        .sum();
    model.dispersion(x_sq)
}

/// Largest index on `axis` whose lower bound (other axes at 1) stays within
/// `cutoff`, or 0 if even index 1 exceeds it.
fn axis_reach(model: Model, b: &BoxSpec, axis: usize, cutoff: f64, bound: u32) -> Result<u32> {
    let mut idx = vec![1u32; b.dim()];
    let mut reach = 0u32;
    loop {
        idx[axis] = reach + 1;
        if kinetic_lower_bound(model, &idx, b) > cutoff {
            return Ok(reach);
        }
        reach += 1;
        if reach > bound {
            return Err(Error::Capacity {
                needed: u64::from(reach),
                bound,
            });
        }
    }
}

/// Quantum numbers that can reach `cutoff`; one per permutation class on cubes.
fn candidates(model: Model, b: &BoxSpec, cutoff: f64, bound: u32) -> Result<Vec<QuantumNumbers>> {
    let reach: Vec<u32> = (0..b.dim())
        .map(|axis| axis_reach(model, b, axis, cutoff, bound))
        .collect::<Result<_>>()?;
    let mut out = Vec::new();
    if b.dim() == 1 {
        for n in 1..=reach[0] {
            out.push(QuantumNumbers::one(n)?);
        }
        return Ok(out);
    }
    let cubic = b.is_cubic();
    for n1 in 1..=reach[0] {
        let start2 = if cubic { n1 } else { 1 };
        for n2 in start2..=reach[1] {
            if kinetic_lower_bound(model, &[n1, n2, 1], b) > cutoff {
                break;
            }
            let start3 = if cubic { n2 } else { 1 };
            for n3 in start3..=reach[2] {
                if kinetic_lower_bound(model, &[n1, n2, n3], b) > cutoff {
                    break;
                }
                out.push(QuantumNumbers::triple(n1, n2, n3)?);
            }
        }
    }
    Ok(out)
}

fn multiplicity(qn: &QuantumNumbers, b: &BoxSpec) -> u32 {
    if b.dim() == 3 && b.is_cubic() {
        qn.permutation_count()
    } else {
        1
    }
}

fn solve_all(
    model: Model,
    b: &BoxSpec,
    qnums: Vec<QuantumNumbers>,
    cfg: &SolverConfig,
) -> Result<Vec<Level>> {
    qnums
        .into_par_iter()
        .map(|qn| {
            let mut level = solve_level(model, &qn, b, cfg)?;
            level.degeneracy = multiplicity(&qn, b);
            Ok(level)
        })
        .collect()
}

/// Sorts by energy and merges levels closer than [`DEGENERACY_RTOL`].
fn group_levels(mut levels: Vec<Level>, spin: u32) -> Vec<Level> {
    levels.sort_by(|a, b| a.kinetic.total_cmp(&b.kinetic).then_with(|| a.qnums.cmp(&b.qnums)));
    let mut out: Vec<Level> = Vec::with_capacity(levels.len());
    for level in levels {
        if let Some(last) = out.last_mut() {
            let scale = last.kinetic.abs().max(level.kinetic.abs());
            if (level.kinetic - last.kinetic).abs() <= DEGENERACY_RTOL * scale {
                last.degeneracy += level.degeneracy * spin;
                last.merged.push(level.qnums);
                continue;
            }
        }
        out.push(Level {
            degeneracy: level.degeneracy * spin,
            ..level
        });
    }
    out
}

fn levels_up_to(req: &SpectrumRequest, cutoff: f64) -> Result<Vec<Level>> {
    let cands = candidates(req.model, &req.box_spec, cutoff, req.max_index)?;
    let mut levels = solve_all(req.model, &req.box_spec, cands, &req.solver)?;
    levels.retain(|l| l.kinetic <= cutoff);
    Ok(group_levels(levels, req.model.spin_factor(req.spin_counting)))
}

/// Distinct levels in increasing energy, complete up to the requested extent.
pub fn enumerate_levels(req: &SpectrumRequest) -> Result<Vec<Level>> {
    req.validate()?;
    match req.extent {
        Extent::Cutoff(cutoff) => levels_up_to(req, cutoff),
        Extent::Count(count) => {
            let ground = vec![1u32; req.box_spec.dim()];
            let ground = solve_level(
                req.model,
                &QuantumNumbers::new(ground)?,
                &req.box_spec,
                &req.solver,
            )?;
            let mut cutoff = ground.kinetic;
            loop {
                let mut levels = levels_up_to(req, cutoff)?;
                if levels.len() >= count {
                    levels.truncate(count);
                    return Ok(levels);
                }
                cutoff *= 2.0;
            }
        }
    }
}

/// Degeneracy-weighted number of states with kinetic energy `<= t_max`.
pub fn count_states(
    model: Model,
    b: &BoxSpec,
    t_max: f64,
    spin_counting: bool,
    cfg: &SolverConfig,
) -> Result<u64> {
    let req = SpectrumRequest {
        solver: *cfg,
        ..SpectrumRequest::new(model, b.clone(), Extent::Cutoff(t_max)).with_spin_counting(spin_counting)
    };
    Ok(enumerate_levels(&req)?
        .iter()
        .map(|l| u64::from(l.degeneracy))
        .sum())
}

/// Every triple (or index) with all entries `<= n_max`, grouped into levels.
pub fn enumerate_lattice(
    model: Model,
    b: &BoxSpec,
    n_max: u32,
    spin_counting: bool,
    cfg: &SolverConfig,
) -> Result<Vec<Level>> {
    if n_max == 0 {
        return Err(domain("n_max must be >= 1"));
    }
    let cubic = b.dim() == 3 && b.is_cubic();
    let mut qnums = Vec::new();
    if b.dim() == 1 {
        for n in 1..=n_max {
            qnums.push(QuantumNumbers::one(n)?);
        }
    } else {
        for n1 in 1..=n_max {
            for n2 in (if cubic { n1 } else { 1 })..=n_max {
                for n3 in (if cubic { n2 } else { 1 })..=n_max {
                    qnums.push(QuantumNumbers::triple(n1, n2, n3)?);
                }
            }
        }
    }
    let levels = solve_all(model, b, qnums, cfg)?;
    Ok(group_levels(levels, model.spin_factor(spin_counting)))
}

/// One row of the comparison table behind the level figures.
#[derive(Debug, Clone, PartialEq)]
pub struct FigureRow {
    pub lc: f64,
    /// 1-based position of the level in its spectrum.
    pub index: usize,
    pub level: Level,
}

/// Lowest `count` levels for each model and box size, in order of model,
/// then box size, then energy. Non-relativistic rows appear only for the
/// largest box size.
pub fn figure_table(
    models: &[Model],
    lcs: &[f64],
    count: usize,
    dim: usize,
    spin_counting: bool,
    cfg: &SolverConfig,
) -> Result<Vec<FigureRow>> {
    if models.is_empty() || lcs.is_empty() {
        return Err(domain("figure table needs at least one model and one L_C"));
    }
    if dim != 1 && dim != 3 {
        return Err(domain(format!("dimension must be 1 or 3, got {dim}")));
    }
    let largest = lcs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut rows = Vec::new();
    for &model in models {
        for &lc in lcs {
            if model == Model::NonRel && lc != largest {
                continue;
            }
            let b = BoxSpec::new(vec![lc; dim])?;
            let req = SpectrumRequest {
                solver: *cfg,
                ..SpectrumRequest::new(model, b, Extent::Count(count)).with_spin_counting(spin_counting)
            };
            for (i, level) in enumerate_levels(&req)?.into_iter().enumerate() {
                rows.push(FigureRow { lc, index: i + 1, level });
            }
        }
    }
    Ok(rows)
}
